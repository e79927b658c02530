//! Shift spaces presented by labeled graphs: construction from forbidden
//! words, regular expressions or explicit graphs, membership queries for
//! words and eventually periodic points, determinization down to a minimal
//! right-resolving presentation, and power recodings.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::alphabet::{Alphabet, SymbolId};
use crate::graph::{LabeledGraph, StateSet};
use crate::point::{PointError, PointPresentation, Sidedness};
use crate::regex::RegexError;
use crate::word::Word;

const STATE_CAP: usize = 1 << 20;

#[derive(Debug, Error)]
pub enum PresentationError {
    #[error("the presented shift is empty")]
    EmptyShift,
    #[error("presentation too large ({0} states)")]
    TooLarge(usize),
    #[error("alphabet mismatch")]
    AlphabetMismatch,
    #[error("point sidedness does not match the shift")]
    SidednessMismatch,
    #[error("power must be at least 1")]
    BadPower,
    #[error("block \"{0}\" does not occur in the shift")]
    BlockNotInLanguage(String),
    #[error(transparent)]
    Regex(#[from] RegexError),
    #[error(transparent)]
    Point(#[from] PointError),
}

/// A shift space together with a presenting labeled graph. The graph is kept
/// essential: every state lies on a bi-infinite walk.
#[derive(Clone)]
pub struct ShiftPresentation {
    name: String,
    alphabet: Alphabet,
    graph: LabeledGraph,
    sidedness: Sidedness,
}

impl ShiftPresentation {
    pub fn from_graph(
        name: impl Into<String>,
        graph: LabeledGraph,
        sidedness: Sidedness,
    ) -> Result<Self, PresentationError> {
        let (graph, _) = graph.trimmed();
        if graph.state_count() == 0 {
            return Err(PresentationError::EmptyShift);
        }
        Ok(ShiftPresentation {
            name: name.into(),
            alphabet: graph.alphabet().clone(),
            graph,
            sidedness,
        })
    }

    /// Shift of finite type avoiding every word in `forbidden`, presented on
    /// the de Bruijn graph of order `max(len) - 1`.
    pub fn from_forbidden(
        name: impl Into<String>,
        alphabet: &Alphabet,
        forbidden: &[Word],
        sidedness: Sidedness,
    ) -> Result<Self, PresentationError> {
        for w in forbidden {
            if w.alphabet() != alphabet {
                return Err(PresentationError::AlphabetMismatch);
            }
        }
        let order = forbidden.iter().map(Word::len).max().unwrap_or(0).max(2) - 1;
        let k = alphabet.len();
        let states = k.checked_pow(order as u32).filter(|&s| s <= STATE_CAP);
        let states = states.ok_or(PresentationError::TooLarge(usize::MAX))?;

        let mut g = LabeledGraph::new(alphabet.clone());
        let word_of = |mut id: usize| -> Vec<SymbolId> {
            let mut w = vec![0; order];
            for slot in w.iter_mut().rev() {
                *slot = id % k;
                id /= k;
            }
            w
        };
        for id in 0..states {
            let w = word_of(id);
            let name: Vec<&str> = w.iter().map(|&a| alphabet.symbol(a)).collect();
            g.add_state(name.join(""));
        }
        for id in 0..states {
            let mut window = word_of(id);
            for b in alphabet.ids() {
                window.push(b);
                let blocked = forbidden
                    .iter()
                    .any(|f| window.ends_with(f.symbols()));
                if !blocked {
                    // successor drops the oldest symbol
                    let succ = window[1..]
                        .iter()
                        .fold(0, |acc, &a| acc * k + a);
                    g.add_edge(id, b, succ);
                }
                window.pop();
            }
        }
        Self::from_graph(name, g, sidedness)
    }

    /// Sofic shift presented by the cyclic closure of a regular expression.
    pub fn from_regex(
        name: impl Into<String>,
        alphabet: &Alphabet,
        expr: &str,
        sidedness: Sidedness,
    ) -> Result<Self, PresentationError> {
        let g = crate::regex::compile_cyclic(alphabet, expr)?;
        Self::from_graph(name, g, sidedness)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn sidedness(&self) -> Sidedness {
        self.sidedness
    }

    pub fn is_deterministic(&self) -> bool {
        self.graph.is_deterministic()
    }

    fn full_set(&self) -> StateSet {
        StateSet::full(self.graph.state_count())
    }

    /// Whether `w` occurs in some point of the shift.
    pub fn word_in_language(&self, w: &Word) -> Result<bool, PresentationError> {
        if w.alphabet() != &self.alphabet {
            return Err(PresentationError::AlphabetMismatch);
        }
        Ok(!self.graph.step_word(&self.full_set(), w.symbols()).is_empty())
    }

    /// Whether the eventually periodic point `p` lies in the shift.
    ///
    /// Left side: the states carrying a genuinely left-infinite walk spelling
    /// the tail form the greatest fixed point of stepping the full set
    /// through one tail period. Right side: the states from which the tail
    /// can be spelled forever form the greatest fixed point of one-period
    /// viability. The point is present iff some state survives both.
    pub fn contains_point(&self, p: &PointPresentation) -> Result<bool, PresentationError> {
        if p.alphabet() != &self.alphabet {
            return Err(PresentationError::AlphabetMismatch);
        }
        if p.sidedness() != self.sidedness {
            return Err(PresentationError::SidednessMismatch);
        }
        let g = &self.graph;
        let n = g.state_count();
        let cs = p.core_start();

        let mut s = self.full_set();
        if let Some(lt) = p.left_tail() {
            let w: Vec<SymbolId> = (cs - lt.period() as isize..cs)
                .map(|k| lt.symbol_at(k))
                .collect();
            loop {
                let next = g.step_word(&s, &w);
                if next == s {
                    break;
                }
                s = next;
            }
        }
        s = g.step_word(&s, p.core_word().symbols());
        if s.is_empty() {
            return Ok(false);
        }

        let rt = p.right_tail();
        let ce = p.core_end();
        let w_r: Vec<SymbolId> = (ce..ce + rt.period() as isize)
            .map(|k| rt.symbol_at(k))
            .collect();
        let mut viable = self.full_set();
        loop {
            let mut next = StateSet::empty(n);
            for q in viable.iter() {
                if g.step_word(&StateSet::single(n, q), &w_r).intersects(&viable) {
                    next.insert(q);
                }
            }
            if next == viable {
                break;
            }
            viable = next;
        }
        Ok(s.intersects(&viable))
    }

    /// A minimal deterministic (right-resolving) presentation of the same
    /// shift: subset construction from the full state set, follower-set
    /// merging, and restriction to a language-preserving strongly connected
    /// component when one exists.
    pub fn determinized_minimal(&self) -> Result<ShiftPresentation, PresentationError> {
        let det = subset_automaton(&self.graph)?;
        let (mut cur, _) = det.trimmed();
        if cur.state_count() == 0 {
            return Err(PresentationError::EmptyShift);
        }
        loop {
            let merged = follower_quotient(&cur);
            let restricted = restrict_to_language_component(&merged);
            let done = restricted.state_count() == cur.state_count();
            cur = restricted;
            if done {
                break;
            }
        }
        Ok(ShiftPresentation {
            name: self.name.clone(),
            alphabet: self.alphabet.clone(),
            graph: cur,
            sidedness: self.sidedness,
        })
    }

    /// Presentation of the same shift under the power map: symbols become
    /// non-overlapping blocks of length `m`.
    pub fn power_recode(&self, m: usize) -> Result<PowerRecoding, PresentationError> {
        if m == 0 {
            return Err(PresentationError::BadPower);
        }
        let g = &self.graph;
        // all labels of m-paths, in a stable order
        let mut labels: BTreeSet<Vec<SymbolId>> = BTreeSet::new();
        let mut paths: Vec<(usize, Vec<SymbolId>, usize)> = Vec::new();
        for q in 0..g.state_count() {
            let mut frontier = vec![(q, Vec::new())];
            for _ in 0..m {
                let mut next = Vec::new();
                for (r, w) in frontier {
                    for &(a, t) in g.edges_from(r) {
                        let mut w2 = w.clone();
                        w2.push(a);
                        next.push((t, w2));
                    }
                }
                frontier = next;
            }
            for (r, w) in frontier {
                labels.insert(w.clone());
                paths.push((q, w, r));
            }
        }
        if labels.is_empty() {
            return Err(PresentationError::EmptyShift);
        }
        let blocks: Vec<Word> = labels
            .iter()
            .map(|w| Word::new(self.alphabet.clone(), w.clone()))
            .collect();
        let names: Vec<String> = blocks
            .iter()
            .map(|w| {
                let parts: Vec<&str> =
                    w.symbols().iter().map(|&a| self.alphabet.symbol(a)).collect();
                if self.alphabet.single_char() {
                    parts.join("")
                } else {
                    parts.join("_")
                }
            })
            .collect();
        let block_alphabet = Alphabet::new(&names).expect("block names are valid symbols");
        let block_ids: HashMap<Vec<SymbolId>, SymbolId> = labels
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();

        let mut powered = LabeledGraph::new(block_alphabet.clone());
        for q in 0..g.state_count() {
            powered.add_state(g.state_name(q).to_string());
        }
        for (q, w, r) in &paths {
            powered.add_edge(*q, block_ids[w], *r);
        }
        let presentation = ShiftPresentation::from_graph(
            format!("{}^{}", self.name, m),
            powered,
            self.sidedness,
        )?;
        Ok(PowerRecoding {
            m,
            base: self.alphabet.clone(),
            blocks,
            block_ids,
            presentation,
        })
    }
}

/// Deterministic automaton of reachable state sets, rooted at the full set
/// (state 0). Words readable in `g` correspond bijectively to paths from the
/// root, which is what word counting and determinization both need.
pub(crate) fn subset_automaton(g: &LabeledGraph) -> Result<LabeledGraph, PresentationError> {
    let n = g.state_count();
    let alphabet = g.alphabet().clone();
    let mut index: HashMap<StateSet, usize> = HashMap::new();
    let mut subsets = vec![StateSet::full(n)];
    let mut det = LabeledGraph::new(alphabet.clone());
    det.add_state("s0");
    index.insert(subsets[0].clone(), 0);
    let mut i = 0;
    while i < subsets.len() {
        for a in alphabet.ids() {
            let t = g.step(&subsets[i], a);
            if t.is_empty() {
                continue;
            }
            let id = match index.get(&t) {
                Some(&id) => id,
                None => {
                    if subsets.len() >= STATE_CAP {
                        return Err(PresentationError::TooLarge(subsets.len()));
                    }
                    let id = det.add_state(format!("s{}", subsets.len()));
                    subsets.push(t.clone());
                    index.insert(t, id);
                    id
                }
            };
            det.add_edge(i, a, id);
        }
        i += 1;
    }
    Ok(det)
}

/// Merges states with equal follower behavior: seeded by out-label sets,
/// refined by successor classes until stable. Sound only on deterministic
/// graphs, which is where it is used.
fn follower_quotient(g: &LabeledGraph) -> LabeledGraph {
    let n = g.state_count();
    let mut class: Vec<usize> = {
        let mut seen: HashMap<BTreeSet<SymbolId>, usize> = HashMap::new();
        (0..n)
            .map(|q| {
                let next = seen.len();
                *seen.entry(g.out_labels(q)).or_insert(next)
            })
            .collect()
    };
    loop {
        let mut seen: HashMap<(usize, Vec<(SymbolId, usize)>), usize> = HashMap::new();
        let next: Vec<usize> = (0..n)
            .map(|q| {
                let sig: Vec<(SymbolId, usize)> = g
                    .edges_from(q)
                    .iter()
                    .map(|&(a, r)| (a, class[r]))
                    .collect();
                let fresh = seen.len();
                *seen.entry((class[q], sig)).or_insert(fresh)
            })
            .collect();
        let stable = seen.len() == class.iter().collect::<BTreeSet<_>>().len();
        class = next;
        if stable {
            break;
        }
    }
    let mut newid: HashMap<usize, usize> = HashMap::new();
    let mut out = LabeledGraph::new(g.alphabet().clone());
    for (q, &c) in class.iter().enumerate().take(n) {
        newid
            .entry(c)
            .or_insert_with(|| out.add_state(g.state_name(q).to_string()));
    }
    for q in 0..n {
        for &(a, r) in g.edges_from(q) {
            out.add_edge(newid[&class[q]], a, newid[&class[r]]);
        }
    }
    out
}

/// If some strongly connected subgraph presents the whole language, restrict
/// to the smallest such one; otherwise return the graph unchanged.
fn restrict_to_language_component(g: &LabeledGraph) -> LabeledGraph {
    let n = g.state_count();
    let mut candidates: Vec<Vec<usize>> = g
        .sccs()
        .into_iter()
        .filter(|comp| {
            comp.len() > 1
                || g.edges_from(comp[0]).iter().any(|&(_, r)| r == comp[0])
        })
        .collect();
    candidates.sort_by_key(Vec::len);
    for comp in candidates {
        if comp.len() == n {
            return g.clone();
        }
        if presents_same_language(g, &comp) {
            return induced_subgraph(g, &comp);
        }
    }
    g.clone()
}

/// True when the subgraph induced on `sub` spells every word the whole graph
/// does. Runs a product search over (whole-set, sub-set) pairs looking for a
/// word alive in the whole graph but dead in the subgraph.
fn presents_same_language(g: &LabeledGraph, sub: &[usize]) -> bool {
    let n = g.state_count();
    let mut sub_set = StateSet::empty(n);
    for &q in sub {
        sub_set.insert(q);
    }
    let start = (StateSet::full(n), sub_set.clone());
    let mut seen = std::collections::HashSet::new();
    seen.insert(start.clone());
    let mut queue = vec![start];
    while let Some((sw, ss)) = queue.pop() {
        for a in g.alphabet().ids() {
            let nw = g.step(&sw, a);
            if nw.is_empty() {
                continue;
            }
            // stepping then re-intersecting keeps exactly the internal edges
            let ns = g.step(&ss, a).intersection(&sub_set);
            if ns.is_empty() {
                return false;
            }
            let pair = (nw, ns);
            if seen.insert(pair.clone()) {
                queue.push(pair);
            }
        }
    }
    true
}

fn induced_subgraph(g: &LabeledGraph, states: &[usize]) -> LabeledGraph {
    let mut keep = vec![None; g.state_count()];
    let mut out = LabeledGraph::new(g.alphabet().clone());
    for &q in states {
        keep[q] = Some(out.add_state(g.state_name(q).to_string()));
    }
    for (q, a, r) in g.edges() {
        if let (Some(nq), Some(nr)) = (keep[q], keep[r]) {
            out.add_edge(nq, a, nr);
        }
    }
    out
}

/// Recodes a shift to its `m`-th power: one new symbol per length-`m` block.
pub struct PowerRecoding {
    m: usize,
    base: Alphabet,
    blocks: Vec<Word>,
    block_ids: HashMap<Vec<SymbolId>, SymbolId>,
    presentation: ShiftPresentation,
}

impl PowerRecoding {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn presentation(&self) -> &ShiftPresentation {
        &self.presentation
    }

    pub fn blocks(&self) -> &[Word] {
        &self.blocks
    }

    fn block_of(&self, p: &PointPresentation, k: isize) -> Result<SymbolId, PresentationError> {
        let m = self.m as isize;
        let w = p.window(k * m, k * m + m - 1)?;
        self.block_ids.get(w.symbols()).copied().ok_or_else(|| {
            PresentationError::BlockNotInLanguage(w.to_string())
        })
    }

    /// Rewrites a point of the base shift as a point over block symbols.
    pub fn encode(&self, p: &PointPresentation) -> Result<PointPresentation, PresentationError> {
        if p.alphabet() != &self.base {
            return Err(PresentationError::AlphabetMismatch);
        }
        let m = self.m as isize;
        let ba = self.presentation.alphabet().clone();
        let div_floor = |a: isize| a.div_euclid(m);
        let div_ceil = |a: isize| -((-a).div_euclid(m));

        let k_lo = div_floor(p.core_start());
        let k_hi = div_ceil(p.core_end()) - 1;
        let mut core = Vec::new();
        for k in k_lo..=k_hi {
            core.push(self.block_of(p, k)?);
        }
        let core = Word::new(ba.clone(), core);

        let rt = p.right_tail();
        let q_r = lcm(rt.period(), self.m) / self.m;
        let r_from = if k_hi < k_lo { k_lo } else { k_hi + 1 };
        let mut right = Vec::new();
        for k in r_from..r_from + q_r as isize {
            right.push(self.block_of(p, k)?);
        }
        let right = Word::new(ba.clone(), right);

        match p.left_tail() {
            Some(lt) => {
                let q_l = lcm(lt.period(), self.m) / self.m;
                let mut left = Vec::new();
                for k in k_lo - q_l as isize..k_lo {
                    left.push(self.block_of(p, k)?);
                }
                let left = Word::new(ba, left);
                Ok(PointPresentation::two_sided(&left, &core, &right, k_lo)?)
            }
            None => Ok(PointPresentation::one_sided(&core, &right)?),
        }
    }

    /// Expands a point over block symbols back to the base shift.
    pub fn decode(&self, p: &PointPresentation) -> Result<PointPresentation, PresentationError> {
        if p.alphabet() != self.presentation.alphabet() {
            return Err(PresentationError::AlphabetMismatch);
        }
        let m = self.m as isize;
        let expand = |w: &Word| -> Word {
            let mut out = Vec::new();
            for &b in w.symbols() {
                out.extend_from_slice(self.blocks[b].symbols());
            }
            Word::new(self.base.clone(), out)
        };
        let core = expand(&p.core_word());
        let rt = p.right_tail();
        let right = expand(&rt.window(p.core_end(), p.core_end() + rt.period() as isize - 1));
        match p.left_tail() {
            Some(lt) => {
                let left =
                    expand(&lt.window(p.core_start() - lt.period() as isize, p.core_start() - 1));
                Ok(PointPresentation::two_sided(
                    &left,
                    &core,
                    &right,
                    p.core_start() * m,
                )?)
            }
            None => Ok(PointPresentation::one_sided(&core, &right)?),
        }
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
