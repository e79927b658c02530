//! Oracles for shift-commuting maps that need not come from a finite window
//! rule. An oracle is asked: given this admissible window and a coordinate
//! inside it, what symbol does the image carry there? It may answer with the
//! symbol or admit that the window does not pin it down.
//!
//! Sliding block codes are oracles with a uniform radius. The interesting
//! oracles are the bundled worked examples, where the deciding context grows
//! with the distance to certain markers and no uniform radius exists.

use std::collections::HashMap;

use thiserror::Error;

use crate::alphabet::{Alphabet, SymbolId};
use crate::code::SlidingBlockCode;
use crate::point::{PointError, PointPresentation, Sidedness};
use crate::presentation::{PresentationError, ShiftPresentation};
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleAnswer {
    Determined(SymbolId),
    Unknown,
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("window \"{window}\" is not admissible in {shift}")]
    InadmissibleWindow { window: String, shift: String },
    #[error("alphabet mismatch")]
    AlphabetMismatch,
    #[error("coordinate {center} outside window of length {len}")]
    BadCenter { center: usize, len: usize },
    #[error(transparent)]
    Point(#[from] PointError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

/// A shift-commuting map answered through finite windows.
pub trait EquivariantOracle {
    fn name(&self) -> &str;
    fn domain(&self) -> &ShiftPresentation;
    fn codomain(&self) -> &ShiftPresentation;

    /// Image symbol at `center` (an index into `window`), when every point
    /// containing the window agrees there.
    fn query(&self, window: &Word, center: usize) -> Result<OracleAnswer, OracleError>;

    /// A uniform radius if the oracle has one (sliding block codes do).
    fn radius_hint(&self) -> Option<usize> {
        None
    }
}

fn validate(window: &Word, center: usize, domain: &ShiftPresentation) -> Result<(), OracleError> {
    if window.alphabet() != domain.alphabet() {
        return Err(OracleError::AlphabetMismatch);
    }
    if center >= window.len() {
        return Err(OracleError::BadCenter {
            center,
            len: window.len(),
        });
    }
    if !domain.word_in_language(window)? {
        return Err(OracleError::InadmissibleWindow {
            window: window.to_string(),
            shift: domain.name().to_string(),
        });
    }
    Ok(())
}

/// Queries a point through the oracle by cutting the radius-`r` window
/// around `coord` (clipped at 0 for one-sided points).
pub fn query_point(
    oracle: &dyn EquivariantOracle,
    x: &PointPresentation,
    coord: isize,
    radius: usize,
) -> Result<OracleAnswer, OracleError> {
    let r = radius as isize;
    let lo = match x.sidedness() {
        Sidedness::TwoSided => coord - r,
        Sidedness::OneSided => (coord - r).max(0),
    };
    let w = x.window(lo, coord + r)?;
    oracle.query(&w, (coord - lo) as usize)
}

/// A sliding block code seen as an oracle.
pub struct CodeOracle {
    code: SlidingBlockCode,
    domain: ShiftPresentation,
    codomain: ShiftPresentation,
}

impl CodeOracle {
    pub fn new(
        code: SlidingBlockCode,
        domain: ShiftPresentation,
        codomain: ShiftPresentation,
    ) -> Result<Self, OracleError> {
        if code.domain() != domain.alphabet() || code.codomain() != codomain.alphabet() {
            return Err(OracleError::AlphabetMismatch);
        }
        Ok(CodeOracle {
            code,
            domain,
            codomain,
        })
    }

    pub fn code(&self) -> &SlidingBlockCode {
        &self.code
    }
}

impl EquivariantOracle for CodeOracle {
    fn name(&self) -> &str {
        self.code.name()
    }

    fn domain(&self) -> &ShiftPresentation {
        &self.domain
    }

    fn codomain(&self) -> &ShiftPresentation {
        &self.codomain
    }

    fn query(&self, window: &Word, center: usize) -> Result<OracleAnswer, OracleError> {
        validate(window, center, &self.domain)?;
        let m = self.code.memory();
        let a = self.code.anticipation();
        if center < m || center + a >= window.len() {
            return Ok(OracleAnswer::Unknown);
        }
        Ok(
            match self.code.lookup(&window.symbols()[center - m..=center + a]) {
                Some(s) => OracleAnswer::Determined(s),
                None => OracleAnswer::Unknown,
            },
        )
    }

    fn radius_hint(&self) -> Option<usize> {
        Some(self.code.memory().max(self.code.anticipation()))
    }
}

/// Flips 0/1 runs according to their markers. Runs are delimited by the
/// alternating markers 2 and 3; a run is flipped exactly when it follows a 2
/// or precedes a 3. One visible marker decides, because alternation forces
/// the identity of the other.
pub struct RunFlipOracle {
    domain: ShiftPresentation,
}

impl RunFlipOracle {
    pub fn new() -> Self {
        let a = Alphabet::digits(4);
        let domain = ShiftPresentation::from_regex(
            "marked-runs",
            &a,
            "((0*+1*)2(0*+1*)3)*",
            Sidedness::TwoSided,
        )
        .expect("fixture regex compiles");
        RunFlipOracle { domain }
    }
}

impl Default for RunFlipOracle {
    fn default() -> Self {
        Self::new()
    }
}

impl EquivariantOracle for RunFlipOracle {
    fn name(&self) -> &str {
        "run-flip"
    }

    fn domain(&self) -> &ShiftPresentation {
        &self.domain
    }

    fn codomain(&self) -> &ShiftPresentation {
        &self.domain
    }

    fn query(&self, window: &Word, center: usize) -> Result<OracleAnswer, OracleError> {
        validate(window, center, &self.domain)?;
        let w = window.symbols();
        let a = w[center];
        if a >= 2 {
            return Ok(OracleAnswer::Determined(a));
        }
        let left = w[..center].iter().rev().find(|&&s| s != a).copied();
        let right = w[center + 1..].iter().find(|&&s| s != a).copied();
        let flip = match (left, right) {
            (Some(2), _) | (_, Some(3)) => Some(true),
            (Some(3), _) | (_, Some(2)) => Some(false),
            (None, None) => None,
            _ => unreachable!("runs are pure in admissible windows"),
        };
        Ok(match flip {
            Some(true) => OracleAnswer::Determined(1 - a),
            Some(false) => OracleAnswer::Determined(a),
            None => OracleAnswer::Unknown,
        })
    }
}

/// Recodes the even shift onto the (2(01)*)* shift: each 1 becomes a 2, and
/// a 0 becomes the parity of its distance to the nearest 1, counted so that
/// the symbol next to a left 1 is 0. The two directions agree because runs
/// of zeros have even length.
pub struct ParityRecodeOracle {
    domain: ShiftPresentation,
    codomain: ShiftPresentation,
}

impl ParityRecodeOracle {
    pub fn new() -> Self {
        let domain = ShiftPresentation::from_regex(
            "even",
            &Alphabet::digits(2),
            "(1(00)*)*",
            Sidedness::TwoSided,
        )
        .expect("fixture regex compiles");
        let codomain = ShiftPresentation::from_regex(
            "marked-pairs",
            &Alphabet::digits(3),
            "(2(01)*)*",
            Sidedness::TwoSided,
        )
        .expect("fixture regex compiles");
        ParityRecodeOracle { domain, codomain }
    }
}

impl Default for ParityRecodeOracle {
    fn default() -> Self {
        Self::new()
    }
}

impl EquivariantOracle for ParityRecodeOracle {
    fn name(&self) -> &str {
        "parity-recode"
    }

    fn domain(&self) -> &ShiftPresentation {
        &self.domain
    }

    fn codomain(&self) -> &ShiftPresentation {
        &self.codomain
    }

    fn query(&self, window: &Word, center: usize) -> Result<OracleAnswer, OracleError> {
        validate(window, center, &self.domain)?;
        let w = window.symbols();
        if w[center] == 1 {
            return Ok(OracleAnswer::Determined(2));
        }
        if let Some(i) = (0..center).rev().find(|&i| w[i] == 1) {
            let dl = center - i;
            return Ok(OracleAnswer::Determined(if dl % 2 == 1 { 0 } else { 1 }));
        }
        if let Some(j) = (center + 1..w.len()).find(|&j| w[j] == 1) {
            let dr = j - center;
            return Ok(OracleAnswer::Determined(if dr % 2 == 1 { 1 } else { 0 }));
        }
        Ok(OracleAnswer::Unknown)
    }
}

/// Marks the left-of-center midpoint of every gap between consecutive 2s
/// with a 1. A gap's midpoint is only known once both delimiters are
/// visible, so the deciding window grows with the gap.
pub struct GapMidpointOracle {
    domain: ShiftPresentation,
    codomain: ShiftPresentation,
}

impl GapMidpointOracle {
    pub fn new() -> Self {
        let in_alpha = Alphabet::new(["0", "2"]).expect("valid alphabet");
        let domain =
            ShiftPresentation::from_forbidden("gaps", &in_alpha, &[], Sidedness::TwoSided)
                .expect("full shifts are nonempty");
        let codomain = ShiftPresentation::from_forbidden(
            "full3",
            &Alphabet::digits(3),
            &[],
            Sidedness::TwoSided,
        )
        .expect("full shifts are nonempty");
        GapMidpointOracle { domain, codomain }
    }
}

impl Default for GapMidpointOracle {
    fn default() -> Self {
        Self::new()
    }
}

impl EquivariantOracle for GapMidpointOracle {
    fn name(&self) -> &str {
        "gap-midpoint"
    }

    fn domain(&self) -> &ShiftPresentation {
        &self.domain
    }

    fn codomain(&self) -> &ShiftPresentation {
        &self.codomain
    }

    fn query(&self, window: &Word, center: usize) -> Result<OracleAnswer, OracleError> {
        validate(window, center, &self.domain)?;
        let w = window.symbols();
        // domain symbol ids: 0 is "0", 1 is "2"; codomain ids are 0, 1, 2
        if w[center] == 1 {
            return Ok(OracleAnswer::Determined(2));
        }
        let left = (0..center).rev().find(|&i| w[i] == 1);
        let right = (center + 1..w.len()).find(|&j| w[j] == 1);
        match (left, right) {
            (Some(i), Some(j)) => {
                let gap = j - i - 1;
                let midpoint = (gap - 1) >> 1;
                let offset = center - i - 1;
                Ok(OracleAnswer::Determined(u8::from(offset == midpoint) as SymbolId))
            }
            _ => Ok(OracleAnswer::Unknown),
        }
    }
}

/// One-sided oracle on the full 3-shift: 0 is fixed, and 1 or 2 flips to the
/// other exactly when the distance to the next nonzero symbol on the right
/// is odd.
pub struct RightParityFlipOracle {
    domain: ShiftPresentation,
}

impl RightParityFlipOracle {
    pub fn new() -> Self {
        let domain = ShiftPresentation::from_forbidden(
            "full3",
            &Alphabet::digits(3),
            &[],
            Sidedness::OneSided,
        )
        .expect("full shifts are nonempty");
        RightParityFlipOracle { domain }
    }
}

impl Default for RightParityFlipOracle {
    fn default() -> Self {
        Self::new()
    }
}

impl EquivariantOracle for RightParityFlipOracle {
    fn name(&self) -> &str {
        "right-parity-flip"
    }

    fn domain(&self) -> &ShiftPresentation {
        &self.domain
    }

    fn codomain(&self) -> &ShiftPresentation {
        &self.domain
    }

    fn query(&self, window: &Word, center: usize) -> Result<OracleAnswer, OracleError> {
        validate(window, center, &self.domain)?;
        let w = window.symbols();
        let a = w[center];
        if a == 0 {
            return Ok(OracleAnswer::Determined(0));
        }
        match (center + 1..w.len()).find(|&j| w[j] != 0) {
            Some(j) => {
                let d = j - center;
                Ok(OracleAnswer::Determined(if d % 2 == 1 { 3 - a } else { a }))
            }
            None => Ok(OracleAnswer::Unknown),
        }
    }
}

/// Two-sided oracle on the full 3-shift: 0 is fixed, and 1 or 2 flips when
/// the distance to the nearest nonzero symbol (either side) is odd. Defined
/// away from the points with exactly one nonzero coordinate. Determination
/// needs the nearest nonzero visible and the opposite side covered far
/// enough to rule out anything closer.
pub struct NearestParityFlipOracle {
    domain: ShiftPresentation,
}

impl NearestParityFlipOracle {
    pub fn new() -> Self {
        let domain = ShiftPresentation::from_forbidden(
            "full3",
            &Alphabet::digits(3),
            &[],
            Sidedness::TwoSided,
        )
        .expect("full shifts are nonempty");
        NearestParityFlipOracle { domain }
    }
}

impl Default for NearestParityFlipOracle {
    fn default() -> Self {
        Self::new()
    }
}

impl EquivariantOracle for NearestParityFlipOracle {
    fn name(&self) -> &str {
        "nearest-parity-flip"
    }

    fn domain(&self) -> &ShiftPresentation {
        &self.domain
    }

    fn codomain(&self) -> &ShiftPresentation {
        &self.domain
    }

    fn query(&self, window: &Word, center: usize) -> Result<OracleAnswer, OracleError> {
        validate(window, center, &self.domain)?;
        let w = window.symbols();
        let a = w[center];
        if a == 0 {
            return Ok(OracleAnswer::Determined(0));
        }
        let vl = center;
        let vr = w.len() - 1 - center;
        let dl = (0..center)
            .rev()
            .find(|&i| w[i] != 0)
            .map(|i| center - i);
        let dr = (center + 1..w.len()).find(|&j| w[j] != 0).map(|j| j - center);
        let d = match (dl, dr) {
            (Some(x), Some(y)) => x.min(y),
            (Some(x), None) => x,
            (None, Some(y)) => y,
            (None, None) => return Ok(OracleAnswer::Unknown),
        };
        if vl + 1 < d || vr + 1 < d {
            // the unseen side could hide something closer
            return Ok(OracleAnswer::Unknown);
        }
        Ok(OracleAnswer::Determined(if d % 2 == 1 { 3 - a } else { a }))
    }
}

/// The worked examples shipped with the tool, by their catalog number.
pub fn worked_example(id: &str) -> Option<Box<dyn EquivariantOracle>> {
    match id {
        "5.1" => Some(Box::new(RunFlipOracle::new())),
        "5.2" => Some(Box::new(ParityRecodeOracle::new())),
        "5.3" => Some(Box::new(GapMidpointOracle::new())),
        "5.4" => Some(Box::new(RightParityFlipOracle::new())),
        "5.5" => Some(Box::new(NearestParityFlipOracle::new())),
        _ => None,
    }
}

pub const WORKED_EXAMPLE_IDS: [&str; 5] = ["5.1", "5.2", "5.3", "5.4", "5.5"];

/// Two contexts that agree with `target` on `[-r, r]` (or `[0, r]` one-sided)
/// yet force different image symbols at `coord`: a witness that no oracle
/// extension is continuous at the target.
#[derive(Debug, Clone)]
pub struct ContinuityWitness {
    pub coord: isize,
    pub agreement_radius: usize,
    pub first: (SymbolId, Word),
    pub second: (SymbolId, Word),
}

/// Searches all admissible extensions of the target's central window by
/// `extension_depth` symbols on each free side, collecting determined
/// answers at `coord`.
pub fn continuity_probe(
    oracle: &dyn EquivariantOracle,
    target: &PointPresentation,
    coord: isize,
    agreement_radius: usize,
    extension_depth: usize,
) -> Result<Option<ContinuityWitness>, OracleError> {
    let dom = oracle.domain();
    if target.alphabet() != dom.alphabet() {
        return Err(OracleError::AlphabetMismatch);
    }
    let n = agreement_radius as isize;
    let e = extension_depth as isize;
    let two_sided = target.sidedness() == Sidedness::TwoSided;
    let lo = if two_sided { -n - e } else { 0 };
    let base_lo = if two_sided { -n } else { 0 };
    let base: Vec<SymbolId> = target.window(base_lo, n)?.symbols().to_vec();
    let left_len = (base_lo - lo) as usize;
    let right_len = e as usize;
    let k = dom.alphabet().len();
    let center = (coord - lo) as usize;

    let mut found: HashMap<SymbolId, Word> = HashMap::new();
    let total = left_len + right_len;
    let mut choice = vec![0usize; total];
    loop {
        let mut symbols = Vec::with_capacity(left_len + base.len() + right_len);
        symbols.extend_from_slice(&choice[..left_len]);
        symbols.extend_from_slice(&base);
        symbols.extend_from_slice(&choice[left_len..]);
        let window = Word::new(dom.alphabet().clone(), symbols);
        if dom.word_in_language(&window)? {
            if let OracleAnswer::Determined(s) = oracle.query(&window, center)? {
                found.entry(s).or_insert_with(|| window.clone());
                if found.len() >= 2 {
                    let mut pairs: Vec<(SymbolId, Word)> = found.into_iter().collect();
                    pairs.sort_by_key(|&(s, _)| s);
                    let mut it = pairs.into_iter();
                    return Ok(Some(ContinuityWitness {
                        coord,
                        agreement_radius,
                        first: it.next().expect("two answers"),
                        second: it.next().expect("two answers"),
                    }));
                }
            }
        }
        // mixed-radix increment over the free symbols
        let mut i = total;
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < k {
                break;
            }
            choice[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn answers(o: &dyn EquivariantOracle, text: &str) -> Vec<Option<SymbolId>> {
        let w = Word::parse(o.domain().alphabet(), text).unwrap();
        (0..w.len())
            .map(|c| match o.query(&w, c).unwrap() {
                OracleAnswer::Determined(s) => Some(s),
                OracleAnswer::Unknown => None,
            })
            .collect()
    }

    #[test]
    fn run_flip_marker_logic() {
        let o = RunFlipOracle::new();
        let a = o.domain().alphabet().clone();
        assert!(!o.domain().word_in_language(&Word::parse(&a, "120013").unwrap()).unwrap());
        assert!(o.domain().word_in_language(&Word::parse(&a, "231").unwrap()).unwrap());

        // a visible 2 on the left flips; a visible 3 on the left does not
        assert_eq!(answers(&o, "20003"), vec![Some(2), Some(1), Some(1), Some(1), Some(3)]);
        assert_eq!(answers(&o, "30002"), vec![Some(3), Some(0), Some(0), Some(0), Some(2)]);
        // one marker decides: alternation forces the hidden one
        assert_eq!(answers(&o, "0002"), vec![Some(0), Some(0), Some(0), Some(2)]);
        assert_eq!(answers(&o, "0003"), vec![Some(1), Some(1), Some(1), Some(3)]);
        assert_eq!(answers(&o, "000"), vec![None, None, None]);

        let w = Word::parse(&a, "2002").unwrap();
        assert!(matches!(
            o.query(&w, 1),
            Err(OracleError::InadmissibleWindow { .. })
        ));
    }

    #[test]
    fn parity_recode_distances() {
        let o = ParityRecodeOracle::new();
        assert_eq!(
            answers(&o, "100001"),
            vec![Some(2), Some(0), Some(1), Some(0), Some(1), Some(2)]
        );
        assert_eq!(answers(&o, "00"), vec![None, None]);
        assert_eq!(answers(&o, "100"), vec![Some(2), Some(0), Some(1)]);
        assert_eq!(answers(&o, "001"), vec![Some(0), Some(1), Some(2)]);

        let a = o.domain().alphabet().clone();
        let w = Word::parse(&a, "101").unwrap();
        assert!(matches!(
            o.query(&w, 0),
            Err(OracleError::InadmissibleWindow { .. })
        ));
    }

    #[test]
    fn gap_midpoint_needs_both_markers() {
        let o = GapMidpointOracle::new();
        assert_eq!(
            answers(&o, "20002"),
            vec![Some(2), Some(0), Some(1), Some(0), Some(2)]
        );
        assert_eq!(
            answers(&o, "200002"),
            vec![Some(2), Some(0), Some(1), Some(0), Some(0), Some(2)]
        );
        assert_eq!(answers(&o, "2000"), vec![Some(2), None, None, None]);
        assert_eq!(answers(&o, "000"), vec![None, None, None]);
    }

    #[test]
    fn right_parity_flip() {
        let o = RightParityFlipOracle::new();
        assert_eq!(answers(&o, "12"), vec![Some(2), None]);
        assert_eq!(answers(&o, "102"), vec![Some(1), Some(0), None]);
        assert_eq!(answers(&o, "1002"), vec![Some(2), Some(0), Some(0), None]);
        assert_eq!(answers(&o, "10"), vec![None, Some(0)]);
        assert_eq!(answers(&o, "0"), vec![Some(0)]);
    }

    #[test]
    fn nearest_parity_flip_certification() {
        let o = NearestParityFlipOracle::new();
        let a = o.domain().alphabet().clone();
        let q = |text: &str, c: usize| {
            let w = Word::parse(&a, text).unwrap();
            o.query(&w, c).unwrap()
        };
        assert_eq!(q("12", 0), OracleAnswer::Determined(2)); // distance 1 is always nearest
        assert_eq!(q("102", 0), OracleAnswer::Unknown); // left side unseen at depth 1
        assert_eq!(q("0102", 1), OracleAnswer::Determined(1)); // nearest at 2, even
        assert_eq!(q("001000", 2), OracleAnswer::Unknown);
        assert_eq!(q("000", 1), OracleAnswer::Determined(0));
    }

    #[test]
    fn code_oracle_radius() {
        let bin = Alphabet::digits(2);
        let full =
            ShiftPresentation::from_forbidden("full2", &bin, &[], Sidedness::TwoSided).unwrap();
        let xor = SlidingBlockCode::from_fn("xor", bin.clone(), bin.clone(), 0, 1, |w| w[0] ^ w[1]);
        let o = CodeOracle::new(xor, full.clone(), full).unwrap();
        assert_eq!(o.radius_hint(), Some(1));
        let w = Word::parse(&bin, "01").unwrap();
        assert_eq!(o.query(&w, 0).unwrap(), OracleAnswer::Determined(1));
        assert_eq!(o.query(&w, 1).unwrap(), OracleAnswer::Unknown);
    }

    #[test]
    fn query_point_clips_one_sided_windows() {
        let o = RightParityFlipOracle::new();
        let x = PointPresentation::parse(
            o.domain().alphabet(),
            Sidedness::OneSided,
            "102 [0]^inf",
        )
        .unwrap();
        assert_eq!(
            query_point(&o, &x, 0, 4).unwrap(),
            OracleAnswer::Determined(1)
        );
        assert_eq!(query_point(&o, &x, 2, 4).unwrap(), OracleAnswer::Unknown);
    }

    #[test]
    fn continuity_witness_at_a_lonely_nonzero() {
        let o = NearestParityFlipOracle::new();
        let a = o.domain().alphabet().clone();
        let spike = PointPresentation::parse(&a, Sidedness::TwoSided, "[0]^-inf 1 [0]^inf").unwrap();
        let w = continuity_probe(&o, &spike, 0, 2, 2).unwrap().expect("witness");
        assert_eq!(w.first.0, 1);
        assert_eq!(w.second.0, 2);

        // a sliding block code is continuous everywhere: no witness
        let bin = Alphabet::digits(2);
        let full =
            ShiftPresentation::from_forbidden("full2", &bin, &[], Sidedness::TwoSided).unwrap();
        let xor = SlidingBlockCode::from_fn("xor", bin.clone(), bin.clone(), 0, 1, |w| w[0] ^ w[1]);
        let co = CodeOracle::new(xor, full.clone(), full).unwrap();
        let z = PointPresentation::parse(&bin, Sidedness::TwoSided, "[0]^inf").unwrap();
        assert!(continuity_probe(&co, &z, 0, 2, 2).unwrap().is_none());
    }

    #[test]
    fn worked_example_registry() {
        for id in WORKED_EXAMPLE_IDS {
            assert!(worked_example(id).is_some(), "{id}");
        }
        assert!(worked_example("5.9").is_none());
    }
}
