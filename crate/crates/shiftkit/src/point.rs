//! Finitely presented points: eventually periodic in both directions
//! (two-sided) or eventually periodic to the right (one-sided).
//!
//! A presentation is a left tail, a finite core occupying
//! `[core_start, core_start + |core|)`, and a right tail. Tails are
//! [`PeriodicWord`]s anchored in absolute coordinates, so a tail knows its
//! value at every position it covers. Construction always canonicalizes:
//! core symbols that merely repeat the adjacent tail are absorbed into it,
//! an empty core's boundary is pushed as far left as it goes, and a purely
//! periodic point gets boundary 0. The canonical form is unique per denoted
//! sequence, so derived equality and hashing are semantic.

use std::fmt;

use thiserror::Error;

use crate::alphabet::{Alphabet, SymbolId};
use crate::word::{PeriodicWord, Word, WordError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sidedness {
    TwoSided,
    OneSided,
}

impl fmt::Display for Sidedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sidedness::TwoSided => write!(f, "two"),
            Sidedness::OneSided => write!(f, "one"),
        }
    }
}

#[derive(Debug, Error)]
pub enum PointError {
    #[error("one-sided point has no symbols at negative index {0}")]
    NegativeIndex(isize),
    #[error("cannot shift a one-sided point by negative {0}")]
    NegativeShift(isize),
    #[error("splice inputs disagree on the central interval at {at}")]
    SpliceMismatch { at: isize },
    #[error("points use different alphabets")]
    AlphabetMismatch,
    #[error("expected a {expected}-sided point")]
    WrongSidedness { expected: Sidedness },
    #[error("point literal: {msg} (byte {at})")]
    Literal { msg: String, at: usize },
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointPresentation {
    alphabet: Alphabet,
    sidedness: Sidedness,
    left: Option<PeriodicWord>,
    core: Vec<SymbolId>,
    right: PeriodicWord,
    core_start: isize,
}

impl PointPresentation {
    /// Two-sided point `left^{-inf} core right^{inf}` with the core placed
    /// at `core_start`; copies of `left` end at `core_start - 1` and copies
    /// of `right` begin at the core's end.
    pub fn two_sided(
        left: &Word,
        core: &Word,
        right: &Word,
        core_start: isize,
    ) -> Result<Self, PointError> {
        if left.alphabet() != core.alphabet() || core.alphabet() != right.alphabet() {
            return Err(PointError::AlphabetMismatch);
        }
        let lt = PeriodicWord::new(left)?.realigned(core_start);
        let rt = PeriodicWord::new(right)?.realigned(core_start + core.len() as isize);
        Ok(Self::assemble(
            Sidedness::TwoSided,
            Some(lt),
            core.symbols().to_vec(),
            rt,
            core_start,
            core.alphabet().clone(),
        ))
    }

    /// One-sided point `core right^{inf}` on indices `[0, inf)`.
    pub fn one_sided(core: &Word, right: &Word) -> Result<Self, PointError> {
        if core.alphabet() != right.alphabet() {
            return Err(PointError::AlphabetMismatch);
        }
        let rt = PeriodicWord::new(right)?.realigned(core.len() as isize);
        Ok(Self::assemble(
            Sidedness::OneSided,
            None,
            core.symbols().to_vec(),
            rt,
            0,
            core.alphabet().clone(),
        ))
    }

    /// The purely periodic two-sided point with a copy of `generator`
    /// starting at index 0.
    pub fn periodic(generator: &Word) -> Result<Self, PointError> {
        let tail = PeriodicWord::new(generator)?;
        Ok(Self::assemble(
            Sidedness::TwoSided,
            Some(tail.clone()),
            Vec::new(),
            tail,
            0,
            generator.alphabet().clone(),
        ))
    }

    pub fn periodic_one_sided(generator: &Word) -> Result<Self, PointError> {
        let tail = PeriodicWord::new(generator)?;
        Ok(Self::assemble(
            Sidedness::OneSided,
            None,
            Vec::new(),
            tail,
            0,
            generator.alphabet().clone(),
        ))
    }

    /// Assembles from already-aligned parts and canonicalizes. Internal
    /// plumbing for splice, code application and the extension engine.
    pub(crate) fn assemble(
        sidedness: Sidedness,
        left: Option<PeriodicWord>,
        core: Vec<SymbolId>,
        right: PeriodicWord,
        core_start: isize,
        alphabet: Alphabet,
    ) -> Self {
        debug_assert_eq!(left.is_some(), sidedness == Sidedness::TwoSided);
        debug_assert!(sidedness == Sidedness::TwoSided || core_start == 0);
        let mut p = PointPresentation {
            alphabet,
            sidedness,
            left,
            core,
            right,
            core_start,
        };
        p.canonicalize();
        p
    }

    fn canonicalize(&mut self) {
        // absorb core symbols the right tail already predicts
        let mut keep_end = self.core.len();
        while keep_end > 0
            && self.core[keep_end - 1]
                == self
                    .right
                    .symbol_at(self.core_start + keep_end as isize - 1)
        {
            keep_end -= 1;
        }
        self.core.truncate(keep_end);
        if let Some(lt) = &self.left {
            let mut drop_front = 0;
            while drop_front < self.core.len()
                && self.core[drop_front] == lt.symbol_at(self.core_start + drop_front as isize)
            {
                drop_front += 1;
            }
            if drop_front > 0 {
                self.core.drain(..drop_front);
                self.core_start += drop_front as isize;
            }
            if self.core.is_empty() {
                let lt = self.left.as_ref().unwrap();
                if lt == &self.right {
                    self.core_start = 0;
                } else {
                    // push the boundary left; distinct periodic sequences
                    // disagree unboundedly far down, so this terminates
                    let mut b = self.core_start;
                    while lt.symbol_at(b - 1) == self.right.symbol_at(b - 1) {
                        b -= 1;
                    }
                    self.core_start = b;
                }
            }
        } else if self.core.is_empty() {
            self.core_start = 0;
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn sidedness(&self) -> Sidedness {
        self.sidedness
    }

    pub fn core_start(&self) -> isize {
        self.core_start
    }

    pub fn core_end(&self) -> isize {
        self.core_start + self.core.len() as isize
    }

    pub fn core_word(&self) -> Word {
        Word::new(self.alphabet.clone(), self.core.clone())
    }

    pub fn left_tail(&self) -> Option<&PeriodicWord> {
        self.left.as_ref()
    }

    pub fn right_tail(&self) -> &PeriodicWord {
        &self.right
    }

    pub fn symbol_at(&self, k: isize) -> Result<SymbolId, PointError> {
        if k < self.core_start {
            return match &self.left {
                Some(lt) => Ok(lt.symbol_at(k)),
                None => Err(PointError::NegativeIndex(k)),
            };
        }
        if k < self.core_end() {
            return Ok(self.core[(k - self.core_start) as usize]);
        }
        Ok(self.right.symbol_at(k))
    }

    /// Exact symbols on `[lo, hi]`; empty word when `lo > hi`.
    pub fn window(&self, lo: isize, hi: isize) -> Result<Word, PointError> {
        let mut symbols = Vec::new();
        let mut k = lo;
        while k <= hi {
            symbols.push(self.symbol_at(k)?);
            k += 1;
        }
        Ok(Word::new(self.alphabet.clone(), symbols))
    }

    /// The shift action: `result_i = self_{i+k}`. One-sided points only
    /// move forward.
    pub fn shifted(&self, k: isize) -> Result<Self, PointError> {
        match self.sidedness {
            Sidedness::TwoSided => Ok(Self::assemble(
                self.sidedness,
                self.left.as_ref().map(|lt| lt.shifted(k)),
                self.core.clone(),
                self.right.shifted(k),
                self.core_start - k,
                self.alphabet.clone(),
            )),
            Sidedness::OneSided => {
                if k < 0 {
                    return Err(PointError::NegativeShift(k));
                }
                let drop = (k as usize).min(self.core.len());
                Ok(Self::assemble(
                    self.sidedness,
                    None,
                    self.core[drop..].to_vec(),
                    self.right.shifted(k),
                    0,
                    self.alphabet.clone(),
                ))
            }
        }
    }

    /// Least shift period of the denoted point, if it is periodic.
    pub fn least_period(&self) -> Option<usize> {
        if !self.core.is_empty() {
            return None;
        }
        match &self.left {
            Some(lt) if lt != &self.right => None,
            _ => Some(self.right.period()),
        }
    }

    pub fn is_periodic(&self) -> bool {
        self.least_period().is_some()
    }

    /// The gluing of `x`, `s`, `y`: `x` strictly left of `-ell`, `s` on
    /// `[-ell, ell]`, `y` strictly right of `ell`. The three points must
    /// agree on the central interval; membership of the result in any
    /// particular shift is the caller's problem.
    pub fn splice(
        x: &PointPresentation,
        s: &PointPresentation,
        y: &PointPresentation,
        ell: usize,
    ) -> Result<PointPresentation, PointError> {
        for p in [x, s, y] {
            if p.sidedness != Sidedness::TwoSided {
                return Err(PointError::WrongSidedness {
                    expected: Sidedness::TwoSided,
                });
            }
        }
        if x.alphabet != s.alphabet || s.alphabet != y.alphabet {
            return Err(PointError::AlphabetMismatch);
        }
        let l = ell as isize;
        for k in -l..=l {
            let a = x.symbol_at(k)?;
            if a != s.symbol_at(k)? || a != y.symbol_at(k)? {
                return Err(PointError::SpliceMismatch { at: k });
            }
        }
        let cs = x.core_start.min(-l);
        let ce = y.core_end().max(l + 1);
        let mut core = x.window(cs, -l - 1)?.symbols().to_vec();
        core.extend(s.window(-l, l)?.symbols());
        core.extend(y.window(l + 1, ce - 1)?.symbols());
        Ok(Self::assemble(
            Sidedness::TwoSided,
            x.left.clone(),
            core,
            y.right.clone(),
            cs,
            x.alphabet.clone(),
        ))
    }

    /// Parses the point literal syntax:
    /// `[u]^-inf w [v]^inf @k` (two-sided; index 0 sits at offset `k` of
    /// `w`, so `w` starts at `-k`; `@k` optional, `w` may be absent) and
    /// `w [v]^inf` (one-sided). A bare `[v]^inf @k` two-sided literal is
    /// the purely periodic point with a copy of `v` starting at `-k`.
    pub fn parse(
        alphabet: &Alphabet,
        sidedness: Sidedness,
        text: &str,
    ) -> Result<Self, PointError> {
        let toks = lex_literal(text)?;
        let lit = |msg: &str, at: usize| PointError::Literal {
            msg: msg.to_string(),
            at,
        };
        let mut groups: Vec<(String, bool, usize)> = Vec::new(); // (word, is_left_tail, pos)
        let mut bare: Option<(String, usize)> = None;
        let mut origin: i64 = 0;
        let mut i = 0;
        while i < toks.len() {
            match &toks[i] {
                Tok::Group(g, at) => {
                    let Some(Tok::Tail { left, .. }) = toks.get(i + 1) else {
                        return Err(lit("bracket group must be followed by ^inf or ^-inf", *at));
                    };
                    groups.push((g.clone(), *left, *at));
                    i += 2;
                }
                Tok::Bare(b, at) => {
                    if bare.replace((b.clone(), *at)).is_some() {
                        return Err(lit("more than one core word", *at));
                    }
                    i += 1;
                }
                Tok::Tail { at, .. } => return Err(lit("tail marker without a [group]", *at)),
                Tok::At(k, at) => {
                    if sidedness == Sidedness::OneSided {
                        return Err(lit("@ offset is not meaningful one-sided", *at));
                    }
                    origin = *k;
                    i += 1;
                }
            }
        }
        let core_text = bare.map(|(b, _)| b).unwrap_or_default();
        let core = Word::parse(alphabet, &core_text)?;
        match sidedness {
            Sidedness::OneSided => match groups.as_slice() {
                [(v, false, _)] => {
                    Self::one_sided(&core, &Word::parse(alphabet, v)?)
                }
                _ => Err(lit("one-sided literal needs exactly one [v]^inf", 0)),
            },
            Sidedness::TwoSided => {
                let cs = -(origin as isize);
                match groups.as_slice() {
                    [(u, true, _), (v, false, _)] => {
                        Self::two_sided(
                            &Word::parse(alphabet, u)?,
                            &core,
                            &Word::parse(alphabet, v)?,
                            cs,
                        )
                    }
                    [(v, false, _)] if core.is_empty() => {
                        // a copy of v starts at cs
                        Ok(PointPresentation::periodic(&Word::parse(alphabet, v)?)?
                            .shifted(-cs)?)
                    }
                    _ => Err(lit(
                        "two-sided literal needs [u]^-inf ... [v]^inf or a single [v]^inf",
                        0,
                    )),
                }
            }
        }
    }

    /// Renders the canonical literal; `parse` inverts it.
    pub fn to_literal(&self) -> String {
        let core = self.core_word();
        let rp = self.right.period() as isize;
        let rt = self
            .right
            .window(self.core_end(), self.core_end() + rp - 1);
        match (&self.left, self.sidedness) {
            (None, _) => {
                if core.is_empty() {
                    format!("[{rt}]^inf")
                } else {
                    format!("{core} [{rt}]^inf")
                }
            }
            (Some(lt), _) => {
                if core.is_empty() && lt == &self.right {
                    return format!("[{}]^inf", self.right.window(0, rp - 1));
                }
                let lp = lt.period() as isize;
                let ltw = lt.window(self.core_start - lp, self.core_start - 1);
                let origin = -self.core_start;
                if core.is_empty() {
                    format!("[{ltw}]^-inf [{rt}]^inf @{origin}")
                } else {
                    format!("[{ltw}]^-inf {core} [{rt}]^inf @{origin}")
                }
            }
        }
    }
}

impl fmt::Display for PointPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}

impl fmt::Debug for PointPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point({} {})", self.sidedness, self.to_literal())
    }
}

enum Tok {
    Group(String, usize),
    Tail { left: bool, at: usize },
    Bare(String, usize),
    At(i64, usize),
}

fn lex_literal(text: &str) -> Result<Vec<Tok>, PointError> {
    let lit = |msg: &str, at: usize| PointError::Literal {
        msg: msg.to_string(),
        at,
    };
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c == '[' {
            let close = text[i..]
                .find(']')
                .ok_or_else(|| lit("unclosed [", i))?
                + i;
            toks.push(Tok::Group(text[i + 1..close].to_string(), i));
            i = close + 1;
        } else if c == '^' {
            if text[i..].starts_with("^-inf") {
                toks.push(Tok::Tail { left: true, at: i });
                i += 5;
            } else if text[i..].starts_with("^inf") {
                toks.push(Tok::Tail { left: false, at: i });
                i += 4;
            } else {
                return Err(lit("expected ^inf or ^-inf", i));
            }
        } else if c == '@' {
            let start = i + 1;
            let mut j = start;
            if j < bytes.len() && (bytes[j] == b'-' || bytes[j] == b'+') {
                j += 1;
            }
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            let k: i64 = text[start..j]
                .parse()
                .map_err(|_| lit("expected integer after @", i))?;
            toks.push(Tok::At(k, i));
            i = j;
        } else {
            let mut j = i;
            while j < bytes.len() && !"[^@]".contains(bytes[j] as char) {
                j += 1;
            }
            let chunk = text[i..j].trim();
            if !chunk.is_empty() {
                toks.push(Tok::Bare(chunk.to_string(), i));
            }
            i = j;
        }
    }
    Ok(toks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn bin() -> Alphabet {
        Alphabet::digits(2)
    }

    fn two(text: &str) -> PointPresentation {
        PointPresentation::parse(&bin(), Sidedness::TwoSided, text).unwrap()
    }

    fn one(text: &str) -> PointPresentation {
        PointPresentation::parse(&bin(), Sidedness::OneSided, text).unwrap()
    }

    #[test]
    fn window_of_denoted_point() {
        let spike = two("[0]^-inf 1 [0]^inf @0");
        assert_eq!(spike.window(-2, 2).unwrap().to_string(), "00100");

        let p = one("[01]^inf");
        assert_eq!(p.window(0, 4).unwrap().to_string(), "01010");

        let q = two("[100]^inf");
        assert_eq!(q.window(-3, 2).unwrap().to_string(), "100100");
        assert_eq!(q.symbol_at(0).unwrap(), 1);
    }

    #[test]
    fn one_sided_has_no_negative_indices() {
        let p = one("[01]^inf");
        assert!(p.window(-1, 2).is_err());
        assert!(p.shifted(-1).is_err());
        assert_eq!(p.shifted(1).unwrap(), one("[10]^inf"));
    }

    #[test]
    fn shifting_moves_the_defect() {
        let spike = two("[0]^-inf 1 [0]^inf @0");
        let moved = spike.shifted(1).unwrap();
        assert_eq!(moved.symbol_at(-1).unwrap(), 1);
        assert_eq!(moved, two("[0]^-inf 1 [0]^inf @1"));
        assert_ne!(moved, spike);

        let fixed = two("[1]^inf");
        assert_eq!(fixed.shifted(7).unwrap(), fixed);
    }

    #[test]
    fn shift_action_law() {
        let mut rng = StdRng::seed_from_u64(11);
        let pts = [
            two("[0]^-inf 1 [0]^inf @0"),
            two("[01]^-inf 0 [01]^inf @0"),
            two("[100]^inf"),
            two("[10]^-inf 1101 [011]^inf @-2"),
        ];
        for _ in 0..50 {
            let p = &pts[rng.random_range(0..pts.len())];
            let a = rng.random_range(-4..=4i64) as isize;
            let b = rng.random_range(-4..=4i64) as isize;
            assert_eq!(
                p.shifted(a).unwrap().shifted(b).unwrap(),
                p.shifted(a + b).unwrap()
            );
        }
    }

    #[test]
    fn window_compatible_with_shift() {
        let p = two("[10]^-inf 1101 [011]^inf @-2");
        for k in -3..=3isize {
            let s = p.shifted(k).unwrap();
            assert_eq!(
                s.window(-4, 4).unwrap(),
                p.window(-4 + k, 4 + k).unwrap()
            );
        }
    }

    #[test]
    fn periodicity_detection() {
        assert!(!two("[0]^-inf 1 [0]^inf @0").is_periodic());

        let aligned = two("[01]^-inf 01 [01]^inf @0");
        assert_eq!(aligned.least_period(), Some(2));
        assert_eq!(aligned, two("[01]^inf"));

        let misaligned = two("[01]^-inf 0 [01]^inf @0");
        assert!(!misaligned.is_periodic());

        // brute-force cross-check: p periodic iff some small shift fixes it
        for p in [
            two("[0]^-inf 1 [0]^inf @0"),
            aligned.clone(),
            misaligned.clone(),
            two("[100]^inf @1"),
        ] {
            let brute = (1..=12).any(|n| p.shifted(n).unwrap() == p);
            assert_eq!(brute, p.is_periodic(), "{p}");
        }
    }

    #[test]
    fn canonical_forms_merge() {
        assert_eq!(two("[0]^-inf 000 [0]^inf @-5"), two("[0]^inf"));
        assert_eq!(
            two("[0]^-inf 001 [0]^inf @1"),
            two("[0]^-inf 1 [0]^inf @-1")
        );
        assert_ne!(
            two("[0]^-inf 1 [0]^inf @-1"),
            two("[0]^-inf 1 [0]^inf @0")
        );
        // copy of "001" placed at -2 puts its 1 at position 0
        assert_eq!(two("[100]^inf @0"), two("[001]^inf @2").shifted(0).unwrap());
    }

    #[test]
    fn literal_round_trip() {
        for text in [
            "[0]^-inf 1 [0]^inf @0",
            "[01]^inf",
            "[10]^-inf 1101 [011]^inf @-2",
            "[01]^-inf [10]^inf @3",
        ] {
            let p = two(text);
            assert_eq!(
                PointPresentation::parse(&bin(), Sidedness::TwoSided, &p.to_literal()).unwrap(),
                p,
                "literal {}",
                p.to_literal()
            );
        }
        for text in ["100 [0]^inf", "[01]^inf", "1 [10]^inf"] {
            let p = one(text);
            assert_eq!(
                PointPresentation::parse(&bin(), Sidedness::OneSided, &p.to_literal()).unwrap(),
                p
            );
        }
    }

    #[test]
    fn splice_identity_and_disjoint_defects() {
        let zero = two("[0]^inf");
        assert_eq!(
            PointPresentation::splice(&zero, &zero, &zero, 3).unwrap(),
            zero
        );

        let x = two("[0]^-inf 1 [0]^inf @5"); // 1 at -5
        let y = two("[0]^-inf 1 [0]^inf @-5"); // 1 at +5
        let z = PointPresentation::splice(&x, &zero, &y, 2).unwrap();
        assert_eq!(z.window(-6, 6).unwrap().to_string(), "0100000000010");

        let bad = two("[0]^-inf 1 [0]^inf @-1"); // 1 at +1, inside the overlap
        assert!(PointPresentation::splice(&bad, &zero, &y, 2).is_err());
    }

    #[test]
    fn splice_defining_property() {
        let mut rng = StdRng::seed_from_u64(23);
        let s = two("[01]^inf");
        for _ in 0..50 {
            let ell = rng.random_range(1..=3usize);
            let l = ell as isize;
            // perturb s outside the agreed interval on each side
            let lw: String = (0..rng.random_range(1..=3))
                .map(|_| if rng.random_bool(0.5) { '0' } else { '1' })
                .collect();
            let rw: String = (0..rng.random_range(1..=3))
                .map(|_| if rng.random_bool(0.5) { '0' } else { '1' })
                .collect();
            let x = PointPresentation::two_sided(
                &Word::parse(&bin(), &lw).unwrap(),
                &s.window(-l - 1, l).unwrap(),
                &Word::parse(&bin(), "01").unwrap(),
                -l - 1,
            )
            .unwrap();
            let y = PointPresentation::two_sided(
                &Word::parse(&bin(), "01").unwrap(),
                &s.window(-l, l + 1).unwrap(),
                &Word::parse(&bin(), &rw).unwrap(),
                -l,
            )
            .unwrap();
            let z = PointPresentation::splice(&x, &s, &y, ell).unwrap();
            assert_eq!(z.window(-9, -l - 1).unwrap(), x.window(-9, -l - 1).unwrap());
            assert_eq!(z.window(-l, l).unwrap(), s.window(-l, l).unwrap());
            assert_eq!(z.window(l + 1, 9).unwrap(), y.window(l + 1, 9).unwrap());
        }
    }

    #[test]
    fn multichar_symbols_render_spaced() {
        let a = Alphabet::new(["aa", "b"]).unwrap();
        let p = PointPresentation::parse(&a, Sidedness::TwoSided, "[aa b]^-inf b [aa]^inf @0")
            .unwrap();
        assert_eq!(p.window(-2, 1).unwrap().to_string(), "aa b b aa");
        let round =
            PointPresentation::parse(&a, Sidedness::TwoSided, &p.to_literal()).unwrap();
        assert_eq!(round, p);
    }
}
