//! Sliding block codes: maps between shifts where the image symbol at each
//! coordinate is a function of a bounded window of the input.
//!
//! A code with memory `m` and anticipation `a` reads the window
//! `x[i-m ..= i+a]` to produce `y[i]`. Rules may be partial; applying a code
//! to a point whose window has no rule is an error, and totality over a
//! given shift can be checked separately.

use std::collections::HashMap;

use thiserror::Error;

use crate::alphabet::{Alphabet, SymbolId};
use crate::graph::{LabeledGraph, StateSet};
use crate::point::{PointError, PointPresentation, Sidedness};
use crate::presentation::{PresentationError, ShiftPresentation};
use crate::word::Word;

const RULE_SPACE_CAP: usize = 1 << 22;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("alphabet mismatch")]
    AlphabetMismatch,
    #[error("rule window \"{got}\" has length {len}, expected {expected}")]
    BadRuleLength {
        got: String,
        len: usize,
        expected: usize,
    },
    #[error("duplicate rule for window \"{0}\"")]
    DuplicateRule(String),
    #[error("no rule for window \"{0}\"")]
    RuleIncomplete(String),
    #[error("one-sided codes cannot use memory")]
    MemoryOnOneSided,
    #[error("rule table too large ({0} windows)")]
    RuleSpaceTooLarge(usize),
    #[error(transparent)]
    Point(#[from] PointError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

#[derive(Clone)]
pub struct SlidingBlockCode {
    name: String,
    domain: Alphabet,
    codomain: Alphabet,
    memory: usize,
    anticipation: usize,
    rule: HashMap<Vec<SymbolId>, SymbolId>,
}

impl SlidingBlockCode {
    pub fn new(
        name: impl Into<String>,
        domain: Alphabet,
        codomain: Alphabet,
        memory: usize,
        anticipation: usize,
    ) -> Self {
        SlidingBlockCode {
            name: name.into(),
            domain,
            codomain,
            memory,
            anticipation,
            rule: HashMap::new(),
        }
    }

    pub fn add_rule(&mut self, window: &Word, out: SymbolId) -> Result<(), CodeError> {
        if window.alphabet() != &self.domain || out >= self.codomain.len() {
            return Err(CodeError::AlphabetMismatch);
        }
        if window.len() != self.window_len() {
            return Err(CodeError::BadRuleLength {
                got: window.to_string(),
                len: window.len(),
                expected: self.window_len(),
            });
        }
        if self
            .rule
            .insert(window.symbols().to_vec(), out)
            .is_some()
        {
            return Err(CodeError::DuplicateRule(window.to_string()));
        }
        Ok(())
    }

    /// Builds a total code from a symbol-level function over full windows.
    pub fn from_fn(
        name: impl Into<String>,
        domain: Alphabet,
        codomain: Alphabet,
        memory: usize,
        anticipation: usize,
        f: impl Fn(&[SymbolId]) -> SymbolId,
    ) -> Self {
        let mut code = SlidingBlockCode::new(name, domain, codomain, memory, anticipation);
        let k = code.domain.len();
        let l = code.window_len();
        let mut w = vec![0usize; l];
        loop {
            let out = f(&w);
            assert!(out < code.codomain.len(), "rule output out of range");
            code.rule.insert(w.clone(), out);
            // mixed-radix increment
            let mut i = l;
            loop {
                if i == 0 {
                    return code;
                }
                i -= 1;
                w[i] += 1;
                if w[i] < k {
                    break;
                }
                w[i] = 0;
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &Alphabet {
        &self.domain
    }

    pub fn codomain(&self) -> &Alphabet {
        &self.codomain
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn anticipation(&self) -> usize {
        self.anticipation
    }

    pub fn window_len(&self) -> usize {
        self.memory + self.anticipation + 1
    }

    pub fn rule_count(&self) -> usize {
        self.rule.len()
    }

    pub fn lookup(&self, window: &[SymbolId]) -> Option<SymbolId> {
        self.rule.get(window).copied()
    }

    fn image_symbol(&self, x: &PointPresentation, i: isize) -> Result<SymbolId, CodeError> {
        let w = x.window(i - self.memory as isize, i + self.anticipation as isize)?;
        self.lookup(w.symbols())
            .ok_or_else(|| CodeError::RuleIncomplete(w.to_string()))
    }

    /// Applies the code coordinatewise. The image of an eventually periodic
    /// point is eventually periodic with the same tail periods, so only the
    /// finitely many windows that touch the core need individual evaluation.
    pub fn apply(&self, x: &PointPresentation) -> Result<PointPresentation, CodeError> {
        if x.alphabet() != &self.domain {
            return Err(CodeError::AlphabetMismatch);
        }
        let m = self.memory as isize;
        let a = self.anticipation as isize;
        let collect = |lo: isize, hi: isize| -> Result<Word, CodeError> {
            let mut out = Vec::with_capacity((hi - lo).max(0) as usize);
            for i in lo..hi {
                out.push(self.image_symbol(x, i)?);
            }
            Ok(Word::new(self.codomain.clone(), out))
        };
        match x.sidedness() {
            Sidedness::TwoSided => {
                let y_cs = x.core_start() - a;
                let y_ce = x.core_end() + m;
                let p_l = x.left_tail().expect("two-sided").period() as isize;
                let p_r = x.right_tail().period() as isize;
                let left = collect(y_cs - p_l, y_cs)?;
                let core = collect(y_cs, y_ce)?;
                let right = collect(y_ce, y_ce + p_r)?;
                Ok(PointPresentation::two_sided(&left, &core, &right, y_cs)?)
            }
            Sidedness::OneSided => {
                if self.memory > 0 {
                    return Err(CodeError::MemoryOnOneSided);
                }
                let y_ce = x.core_end();
                let p_r = x.right_tail().period() as isize;
                let core = collect(0, y_ce)?;
                let right = collect(y_ce, y_ce + p_r)?;
                Ok(PointPresentation::one_sided(&core, &right)?)
            }
        }
    }

    /// The composite `self . inner` (apply `inner` first). Defined on a
    /// window exactly when every intermediate lookup is.
    pub fn compose(
        &self,
        inner: &SlidingBlockCode,
        name: impl Into<String>,
    ) -> Result<SlidingBlockCode, CodeError> {
        if inner.codomain != self.domain {
            return Err(CodeError::AlphabetMismatch);
        }
        let memory = self.memory + inner.memory;
        let anticipation = self.anticipation + inner.anticipation;
        let mut out = SlidingBlockCode::new(
            name,
            inner.domain.clone(),
            self.codomain.clone(),
            memory,
            anticipation,
        );
        let l = out.window_len();
        let k = inner.domain.len();
        if k.checked_pow(l as u32).is_none_or(|n| n > RULE_SPACE_CAP) {
            return Err(CodeError::RuleSpaceTooLarge(l));
        }
        let mut w = vec![0usize; l];
        'windows: loop {
            let mut mid = Vec::with_capacity(self.window_len());
            for j in 0..self.window_len() {
                match inner.lookup(&w[j..j + inner.window_len()]) {
                    Some(y) => mid.push(y),
                    None => mid.clear(),
                }
                if mid.len() != j + 1 {
                    break;
                }
            }
            if mid.len() == self.window_len() {
                if let Some(z) = self.lookup(&mid) {
                    out.rule.insert(w.clone(), z);
                }
            }
            let mut i = l;
            loop {
                if i == 0 {
                    break 'windows;
                }
                i -= 1;
                w[i] += 1;
                if w[i] < k {
                    continue 'windows;
                }
                w[i] = 0;
            }
        }
        Ok(out)
    }

    /// First window occurring in `shift` that the rule does not cover.
    pub fn undefined_window_in(
        &self,
        shift: &ShiftPresentation,
    ) -> Result<Option<Word>, CodeError> {
        if shift.alphabet() != &self.domain {
            return Err(CodeError::AlphabetMismatch);
        }
        for w in language_words(shift.graph(), self.window_len()) {
            if !self.rule.contains_key(&w) {
                return Ok(Some(Word::new(self.domain.clone(), w)));
            }
        }
        Ok(None)
    }

    pub fn is_total_on(&self, shift: &ShiftPresentation) -> Result<bool, CodeError> {
        Ok(self.undefined_window_in(shift)?.is_none())
    }

    /// Presentation of the image `f(X)`: walk the domain graph tracking the
    /// last `m + a` labels, and relabel each step by the rule applied to the
    /// full window it completes.
    pub fn image_presentation(
        &self,
        domain: &ShiftPresentation,
    ) -> Result<ShiftPresentation, CodeError> {
        if domain.alphabet() != &self.domain {
            return Err(CodeError::AlphabetMismatch);
        }
        if domain.sidedness() == Sidedness::OneSided && self.memory > 0 {
            return Err(CodeError::MemoryOnOneSided);
        }
        let g = domain.graph();
        let l = self.memory + self.anticipation;
        // states: (graph state, last l labels actually readable into it)
        let mut states: Vec<(usize, Vec<SymbolId>)> =
            (0..g.state_count()).map(|q| (q, Vec::new())).collect();
        for _ in 0..l {
            let mut next = Vec::new();
            for (q, w) in states {
                for &(b, r) in g.edges_from(q) {
                    let mut w2 = w.clone();
                    w2.push(b);
                    next.push((r, w2));
                }
            }
            states = next;
        }
        states.sort();
        states.dedup();
        let index: HashMap<(usize, Vec<SymbolId>), usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let mut img = LabeledGraph::new(self.codomain.clone());
        for (q, w) in &states {
            let mut name = String::new();
            for &a in w {
                name.push_str(self.domain.symbol(a));
            }
            img.add_state(format!("{}|{}", g.state_name(*q), name));
        }
        for (i, (q, w)) in states.iter().enumerate() {
            for &(b, r) in g.edges_from(*q) {
                let mut window = w.clone();
                window.push(b);
                let label = self.lookup(&window).ok_or_else(|| {
                    CodeError::RuleIncomplete(
                        Word::new(self.domain.clone(), window.clone()).to_string(),
                    )
                })?;
                let mut w2 = window;
                w2.remove(0);
                let j = index[&(r, w2)];
                img.add_edge(i, label, j);
            }
        }
        Ok(ShiftPresentation::from_graph(
            format!("{}({})", self.name, domain.name()),
            img,
            domain.sidedness(),
        )?)
    }

    /// Whether the image of `domain` is contained in `codomain`.
    pub fn maps_into(
        &self,
        domain: &ShiftPresentation,
        codomain: &ShiftPresentation,
    ) -> Result<bool, CodeError> {
        if codomain.alphabet() != &self.codomain {
            return Err(CodeError::AlphabetMismatch);
        }
        let img = self.image_presentation(domain)?;
        Ok(language_contained(img.graph(), codomain.graph()))
    }
}

/// All words of length `len` readable in `g`, in lexicographic order.
fn language_words(g: &LabeledGraph, len: usize) -> Vec<Vec<SymbolId>> {
    let mut out = Vec::new();
    let full = StateSet::full(g.state_count());
    let mut stack: Vec<(Vec<SymbolId>, StateSet)> = vec![(Vec::new(), full)];
    while let Some((w, s)) = stack.pop() {
        if w.len() == len {
            out.push(w);
            continue;
        }
        // push in reverse so lexicographically smaller symbols pop first
        for a in g.alphabet().ids().rev() {
            let t = g.step(&s, a);
            if !t.is_empty() {
                let mut w2 = w.clone();
                w2.push(a);
                stack.push((w2, t));
            }
        }
    }
    out
}

/// Every word readable in `a` is readable in `b`.
fn language_contained(a: &LabeledGraph, b: &LabeledGraph) -> bool {
    if a.alphabet() != b.alphabet() {
        return false;
    }
    let start = (
        StateSet::full(a.state_count()),
        StateSet::full(b.state_count()),
    );
    let mut seen = std::collections::HashSet::new();
    seen.insert(start.clone());
    let mut queue = vec![start];
    while let Some((sa, sb)) = queue.pop() {
        for sym in a.alphabet().ids() {
            let na = a.step(&sa, sym);
            if na.is_empty() {
                continue;
            }
            let nb = b.step(&sb, sym);
            if nb.is_empty() {
                return false;
            }
            let pair = (na, nb);
            if seen.insert(pair.clone()) {
                queue.push(pair);
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin() -> Alphabet {
        Alphabet::digits(2)
    }

    fn full2() -> ShiftPresentation {
        ShiftPresentation::from_forbidden("full2", &bin(), &[], Sidedness::TwoSided).unwrap()
    }

    fn golden() -> ShiftPresentation {
        let f = [Word::parse(&bin(), "11").unwrap()];
        ShiftPresentation::from_forbidden("golden", &bin(), &f, Sidedness::TwoSided).unwrap()
    }

    fn xor() -> SlidingBlockCode {
        SlidingBlockCode::from_fn("xor", bin(), bin(), 0, 1, |w| w[0] ^ w[1])
    }

    fn pt(lit: &str) -> PointPresentation {
        PointPresentation::parse(&bin(), Sidedness::TwoSided, lit).unwrap()
    }

    #[test]
    fn xor_neighbor_code() {
        let f = xor();
        assert_eq!(f.apply(&pt("[01]^inf")).unwrap(), pt("[1]^inf"));
        assert_eq!(
            f.apply(&pt("[0]^-inf 1 [0]^inf @0")).unwrap(),
            pt("[0]^-inf 11 [0]^inf @1") // ones at -1 and 0
        );
        assert_eq!(f.apply(&pt("[0]^inf")).unwrap(), pt("[0]^inf"));
    }

    #[test]
    fn shift_then_flip() {
        let f = SlidingBlockCode::from_fn("sf", bin(), bin(), 0, 1, |w| 1 - w[1]);
        let y = f.apply(&pt("[0]^-inf 1 [0]^inf @0")).unwrap();
        assert_eq!(y, pt("[1]^-inf 0 [1]^inf @1"));
    }

    #[test]
    fn composition_matches_double_application() {
        let f = SlidingBlockCode::from_fn("sf", bin(), bin(), 0, 1, |w| 1 - w[1]);
        let ff = f.compose(&f, "sf2").unwrap();
        assert_eq!(ff.memory(), 0);
        assert_eq!(ff.anticipation(), 2);
        for lit in ["[01]^inf", "[0]^-inf 1 [0]^inf @0", "[0]^-inf 1101 [10]^inf @-2"] {
            let x = pt(lit);
            assert_eq!(ff.apply(&x).unwrap(), f.apply(&f.apply(&x).unwrap()).unwrap());
        }
        // shift-then-flip twice is the square of the shift map
        let x = pt("[0]^-inf 1 [0]^inf @0");
        assert_eq!(ff.apply(&x).unwrap(), x.shifted(2).unwrap());
    }

    #[test]
    fn memory_keeps_coordinates_aligned() {
        // y[i] = x[i-1]: the inverse shift as a memory-1 code
        let f = SlidingBlockCode::from_fn("delay", bin(), bin(), 1, 0, |w| w[0]);
        let x = pt("[0]^-inf 1 [0]^inf @0");
        assert_eq!(f.apply(&x).unwrap(), x.shifted(-1).unwrap());
    }

    #[test]
    fn one_sided_application() {
        let one = |lit: &str| PointPresentation::parse(&bin(), Sidedness::OneSided, lit).unwrap();
        let f = xor();
        assert_eq!(f.apply(&one("11 [0]^inf")).unwrap(), one("01 [0]^inf"));
        let delay = SlidingBlockCode::from_fn("delay", bin(), bin(), 1, 0, |w| w[0]);
        assert!(matches!(
            delay.apply(&one("1 [0]^inf")),
            Err(CodeError::MemoryOnOneSided)
        ));
    }

    #[test]
    fn partial_rules_error_on_application() {
        let mut f = SlidingBlockCode::new("partial", bin(), bin(), 0, 0);
        f.add_rule(&Word::parse(&bin(), "0").unwrap(), 0).unwrap();
        assert!(matches!(
            f.apply(&pt("[01]^inf")),
            Err(CodeError::RuleIncomplete(w)) if w == "1"
        ));
        let g = golden();
        assert_eq!(
            f.undefined_window_in(&g).unwrap().unwrap().to_string(),
            "1"
        );
        assert!(!f.is_total_on(&g).unwrap());
        assert!(f.is_total_on(
            &ShiftPresentation::from_forbidden("zeros", &bin(), &[Word::parse(&bin(), "1").unwrap()], Sidedness::TwoSided).unwrap()
        ).unwrap());
    }

    #[test]
    fn rule_validation() {
        let mut f = SlidingBlockCode::new("v", bin(), bin(), 0, 1);
        let w01 = Word::parse(&bin(), "01").unwrap();
        f.add_rule(&w01, 1).unwrap();
        assert!(matches!(
            f.add_rule(&w01, 0),
            Err(CodeError::DuplicateRule(_))
        ));
        assert!(matches!(
            f.add_rule(&Word::parse(&bin(), "0").unwrap(), 0),
            Err(CodeError::BadRuleLength { expected: 2, .. })
        ));
    }

    #[test]
    fn image_presentation_of_block_recoding() {
        // two-block recoding of the golden mean shift onto three symbols
        let tri = Alphabet::digits(3);
        let f = SlidingBlockCode::from_fn("blocks", bin(), tri.clone(), 1, 0, |w| {
            match (w[0], w[1]) {
                (0, 0) => 0,
                (0, 1) => 1,
                (1, 0) => 2,
                _ => 0, // "11" never occurs in the domain
            }
        });
        let img = f.image_presentation(&golden()).unwrap();
        let w = |t: &str| Word::parse(&tri, t).unwrap();
        assert!(img.word_in_language(&w("12")).unwrap()); // x = 010
        assert!(img.word_in_language(&w("20")).unwrap()); // x = 100
        assert!(img.word_in_language(&w("21")).unwrap()); // x = 101
        assert!(!img.word_in_language(&w("11")).unwrap()); // blocks disagree at overlap
        assert!(!img.word_in_language(&w("10")).unwrap()); // likewise
    }

    #[test]
    fn containment_checks() {
        let f = xor();
        assert!(f.maps_into(&golden(), &full2()).unwrap());
        let id = SlidingBlockCode::from_fn("id", bin(), bin(), 0, 0, |w| w[0]);
        assert!(id.maps_into(&golden(), &full2()).unwrap());
        assert!(!id.maps_into(&full2(), &golden()).unwrap());
        // xor of golden: can it produce "11"? x = a b c with b = a xor b', ...
        // 0 1 1 0 gives y = 1 0 1; 0 1 0 1 gives 1 1 1, but 11 in x is
        // forbidden, so check against the even shift instead
        let a = bin();
        let even =
            ShiftPresentation::from_regex("even", &a, "(1(00)*)*", Sidedness::TwoSided).unwrap();
        assert!(!f.maps_into(&full2(), &even).unwrap());
    }
}
