//! Structural questions about a presented shift: transitivity, mixing,
//! entropy, word counts, periodic orbits, synchronization of periodic
//! points, and isolated periodic points in the one-sided truncations.
//!
//! Everything here works on the minimal deterministic presentation; callers
//! pass the original and the functions determinize internally, while the
//! bundled [`check_hypotheses`] determinizes once and shares the result.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::alphabet::SymbolId;
use crate::graph::{LabeledGraph, StateSet};
use crate::point::Sidedness;
use crate::presentation::{subset_automaton, PresentationError, ShiftPresentation};
use crate::word::Word;

/// Orbit enumeration is exhaustive over primitive necklaces, so it is capped.
pub const MAX_ENUM_PERIOD: usize = 16;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("period {0} exceeds the enumeration bound of {MAX_ENUM_PERIOD}")]
    PeriodTooLarge(usize),
    #[error("word count overflows at length {0}")]
    CountOverflow(usize),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

/// A shift is transitive iff some strongly connected graph presents it; the
/// minimal deterministic presentation is strongly connected exactly then.
pub fn is_transitive(s: &ShiftPresentation) -> Result<bool, AnalysisError> {
    Ok(s.determinized_minimal()?.graph().is_strongly_connected())
}

/// Transitive with coprime cycle lengths in the minimal presentation.
pub fn is_mixing(s: &ShiftPresentation) -> Result<bool, AnalysisError> {
    let min = s.determinized_minimal()?;
    let g = min.graph();
    if !g.is_strongly_connected() {
        return Ok(false);
    }
    let all: Vec<usize> = (0..g.state_count()).collect();
    Ok(g.cycle_length_gcd(&all) == 1)
}

/// A verified bracket around the topological entropy, in bits per symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEstimate {
    pub lower: f64,
    pub upper: f64,
}

impl EntropyEstimate {
    pub fn value(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Entropy as log2 of the largest spectral radius over the strongly
/// connected components of the minimal deterministic presentation.
///
/// Each component is bracketed by Collatz-Wielandt bounds under power
/// iteration on M + I (the +I keeps periodic components converging); the
/// iteration stops once the bracket is narrower than `tol` bits.
pub fn entropy(s: &ShiftPresentation, tol: f64) -> Result<EntropyEstimate, AnalysisError> {
    let min = s.determinized_minimal()?;
    let g = min.graph();
    let mut best: Option<(f64, f64)> = None;
    for comp in g.sccs() {
        let has_edge = comp.iter().any(|&q| {
            g.edges_from(q)
                .iter()
                .any(|&(_, r)| comp.contains(&r))
        });
        if !has_edge {
            continue;
        }
        let (lo, hi) = component_radius_bracket(g, &comp, tol);
        best = Some(match best {
            None => (lo, hi),
            Some((bl, bh)) => (bl.max(lo), bh.max(hi)),
        });
    }
    let (lo, hi) = best.unwrap_or((1.0, 1.0)); // essential graphs always have a cycle
    Ok(EntropyEstimate {
        lower: lo.log2(),
        upper: hi.log2(),
    })
}

fn component_radius_bracket(g: &LabeledGraph, comp: &[usize], tol: f64) -> (f64, f64) {
    let d = comp.len();
    let pos: std::collections::HashMap<usize, usize> =
        comp.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    // edge-count matrix of the component, plus the identity
    let mut m = vec![vec![0.0f64; d]; d];
    for (i, &q) in comp.iter().enumerate() {
        m[i][i] += 1.0;
        for &(_, r) in g.edges_from(q) {
            if let Some(&j) = pos.get(&r) {
                m[i][j] += 1.0;
            }
        }
    }
    let mut v = vec![1.0f64; d];
    let mut bounds = (1.0, f64::INFINITY);
    for _ in 0..200_000 {
        let w: Vec<f64> = (0..d)
            .map(|i| (0..d).map(|j| m[i][j] * v[j]).sum())
            .collect();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..d {
            let r = w[i] / v[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        // shift back: spectral radius of M+I is radius(M) + 1
        bounds = (lo - 1.0, hi - 1.0);
        if bounds.0 > 0.0 && (bounds.1.log2() - bounds.0.log2()) <= tol {
            break;
        }
        let scale = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        v = w.into_iter().map(|x| x / scale).collect();
    }
    bounds
}

/// Number of distinct words of each length `0..=n` in the language.
pub fn count_words(s: &ShiftPresentation, n: usize) -> Result<Vec<u128>, AnalysisError> {
    let auto = subset_automaton(s.graph())?;
    let states = auto.state_count();
    let mut v = vec![0u128; states];
    v[0] = 1; // the full set: every word is read from here
    let mut counts = vec![1u128];
    for t in 1..=n {
        let mut next = vec![0u128; states];
        for (q, _, r) in auto.edges() {
            next[r] = next[r]
                .checked_add(v[q])
                .ok_or(AnalysisError::CountOverflow(t))?;
        }
        let total = next
            .iter()
            .try_fold(0u128, |acc, &x| acc.checked_add(x))
            .ok_or(AnalysisError::CountOverflow(t))?;
        counts.push(total);
        v = next;
    }
    Ok(counts)
}

/// A periodic orbit named by the lexicographically least primitive generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicOrbit {
    pub generator: Word,
    pub least_period: usize,
}

/// All periodic orbits of least period at most `n_max`, ordered by period
/// and then lexicographically.
pub fn enumerate_periodic_orbits(
    s: &ShiftPresentation,
    n_max: usize,
) -> Result<Vec<PeriodicOrbit>, AnalysisError> {
    if n_max > MAX_ENUM_PERIOD {
        return Err(AnalysisError::PeriodTooLarge(n_max));
    }
    let alphabet = s.alphabet();
    let mut orbits = Vec::new();
    for w in lyndon_words(alphabet.len(), n_max) {
        if s.graph().has_cycle_spelling(&w) {
            orbits.push(PeriodicOrbit {
                least_period: w.len(),
                generator: Word::new(alphabet.clone(), w),
            });
        }
    }
    orbits.sort_by(|a, b| {
        (a.least_period, a.generator.symbols()).cmp(&(b.least_period, b.generator.symbols()))
    });
    Ok(orbits)
}

/// Lexicographically least generators of primitive necklaces, lengths 1..=n.
fn lyndon_words(k: usize, n: usize) -> Vec<Vec<SymbolId>> {
    let mut out = Vec::new();
    if k == 0 || n == 0 {
        return out;
    }
    let mut w: Vec<SymbolId> = vec![0];
    loop {
        out.push(w.clone());
        let m = w.len();
        while w.len() < n {
            let c = w[w.len() - m];
            w.push(c);
        }
        while w.last() == Some(&(k - 1)) {
            w.pop();
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => break,
        }
    }
    out
}

/// Number of points fixed by the n-th power of the shift map.
pub fn fixed_points_of_power(s: &ShiftPresentation, n: usize) -> Result<u128, AnalysisError> {
    let orbits = enumerate_periodic_orbits(s, n)?;
    Ok(orbits
        .iter()
        .filter(|o| n.is_multiple_of(o.least_period))
        .map(|o| o.least_period as u128)
        .sum())
}

/// If the periodic point generated by `w` is synchronizing, the length of a
/// synchronizing factor: reading it from anywhere in the minimal
/// deterministic presentation focuses on a single state.
pub fn synchronizing_witness(
    s: &ShiftPresentation,
    generator: &Word,
) -> Result<Option<usize>, AnalysisError> {
    let min = s.determinized_minimal()?;
    Ok(sync_witness_on(min.graph(), generator.symbols()))
}

fn sync_witness_on(g: &LabeledGraph, w: &[SymbolId]) -> Option<usize> {
    let p = w.len();
    let mut best: Option<usize> = None;
    for rot in 0..p {
        let word: Vec<SymbolId> = (0..p).map(|i| w[(rot + i) % p]).collect();
        let mut u = StateSet::full(g.state_count());
        let mut j = 0;
        loop {
            let next = g.step_word(&u, &word);
            j += 1;
            if next.count() == 1 {
                let len = j * p;
                best = Some(best.map_or(len, |b: usize| b.min(len)));
                break;
            }
            if next == u {
                break;
            }
            u = next;
        }
    }
    best
}

/// Which truncation of a two-sided shift a question refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    Right,
    Left,
}

/// Whether some point of the orbit of `w`-periodic points is isolated in the
/// chosen truncation.
///
/// Rotation by rotation: stabilize the reachable set after reading long
/// powers, then follow forced labels. If the continuation ever branches the
/// point is a limit of others; if the forced walk revisits a configuration
/// the continuation is unique and the point is isolated.
pub fn orbit_isolated_in_truncation(
    s: &ShiftPresentation,
    generator: &Word,
    side: Truncation,
) -> Result<bool, AnalysisError> {
    let min = s.determinized_minimal()?;
    Ok(isolated_on(min.graph(), generator.symbols(), side))
}

fn isolated_on(g: &LabeledGraph, w: &[SymbolId], side: Truncation) -> bool {
    let (g, w) = match side {
        Truncation::Right => (g.clone(), w.to_vec()),
        Truncation::Left => (g.reversed(), w.iter().rev().cloned().collect()),
    };
    let p = w.len();
    (0..p).any(|rot| {
        let word: Vec<SymbolId> = (0..p).map(|i| w[(rot + i) % p]).collect();
        rotation_isolated(&g, &word)
    })
}

fn rotation_isolated(g: &LabeledGraph, w: &[SymbolId]) -> bool {
    let mut c = StateSet::full(g.state_count());
    loop {
        let next = g.step_word(&c, w);
        if next == c {
            break;
        }
        c = next;
    }
    if c.is_empty() {
        return false; // the periodic point is not even in the truncation
    }
    let mut seen: HashSet<(usize, StateSet)> = HashSet::new();
    let mut d = c;
    let mut t = 0usize;
    loop {
        if !seen.insert((t % w.len(), d.clone())) {
            return true; // unique continuation loops forever
        }
        let labels: BTreeSet<SymbolId> =
            d.iter().flat_map(|q| g.out_labels(q)).collect();
        if labels.len() != 1 {
            return false; // continuations branch: other points accumulate
        }
        d = g.step(&d, *labels.first().expect("nonempty"));
        t += 1;
    }
}

/// One periodic orbit's share of the extension hypotheses.
#[derive(Debug, Clone)]
pub struct OrbitCheck {
    pub generator: Word,
    pub witness: Option<usize>,
    pub isolated_right: bool,
    pub isolated_left: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HypothesisFailure {
    NotTransitive,
    Finite,
    NotSynchronizing(Word),
    Isolated(Word, Truncation),
}

impl HypothesisFailure {
    /// Stable machine-readable tag.
    pub fn reason(&self) -> &'static str {
        match self {
            HypothesisFailure::NotTransitive => "not_transitive",
            HypothesisFailure::Finite => "finite",
            HypothesisFailure::NotSynchronizing(_) => "not_synchronizing",
            HypothesisFailure::Isolated(_, Truncation::Right) => "isolated_right",
            HypothesisFailure::Isolated(_, Truncation::Left) => "isolated_left",
        }
    }

    pub fn orbit(&self) -> Option<&Word> {
        match self {
            HypothesisFailure::NotSynchronizing(w) | HypothesisFailure::Isolated(w, _) => Some(w),
            _ => None,
        }
    }
}

/// Outcome of checking, up to a period bound, the hypotheses under which
/// maps on the aperiodic part extend: transitive, infinite, every periodic
/// point synchronizing, and no periodic point isolated in a truncation.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub transitive: bool,
    pub mixing: bool,
    pub infinite: bool,
    pub period_bound: usize,
    pub orbits: Vec<OrbitCheck>,
    pub failures: Vec<HypothesisFailure>,
}

impl HypothesisReport {
    pub fn satisfied(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn check_hypotheses(
    s: &ShiftPresentation,
    period_bound: usize,
) -> Result<HypothesisReport, AnalysisError> {
    let min = s.determinized_minimal()?;
    let g = min.graph();
    let transitive = g.is_strongly_connected();
    let mixing = transitive && {
        let all: Vec<usize> = (0..g.state_count()).collect();
        g.cycle_length_gcd(&all) == 1
    };
    let infinite = (0..g.state_count()).any(|q| g.edges_from(q).len() >= 2);
    let two_sided = s.sidedness() == Sidedness::TwoSided;

    let mut failures = Vec::new();
    if !transitive {
        failures.push(HypothesisFailure::NotTransitive);
    }
    if !infinite {
        failures.push(HypothesisFailure::Finite);
    }
    let mut orbits = Vec::new();
    for orbit in enumerate_periodic_orbits(s, period_bound)? {
        let w = orbit.generator;
        let witness = sync_witness_on(g, w.symbols());
        let isolated_right = isolated_on(g, w.symbols(), Truncation::Right);
        let isolated_left =
            two_sided.then(|| isolated_on(g, w.symbols(), Truncation::Left));
        if witness.is_none() {
            failures.push(HypothesisFailure::NotSynchronizing(w.clone()));
        }
        if isolated_right {
            failures.push(HypothesisFailure::Isolated(w.clone(), Truncation::Right));
        }
        if isolated_left == Some(true) {
            failures.push(HypothesisFailure::Isolated(w.clone(), Truncation::Left));
        }
        orbits.push(OrbitCheck {
            generator: w,
            witness,
            isolated_right,
            isolated_left,
        });
    }
    Ok(HypothesisReport {
        transitive,
        mixing,
        infinite,
        period_bound,
        orbits,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;

    fn sft(forbid: &[&str]) -> ShiftPresentation {
        let a = Alphabet::digits(2);
        let f: Vec<Word> = forbid.iter().map(|w| Word::parse(&a, w).unwrap()).collect();
        ShiftPresentation::from_forbidden("t", &a, &f, Sidedness::TwoSided).unwrap()
    }

    fn golden() -> ShiftPresentation {
        sft(&["11"])
    }

    fn even() -> ShiftPresentation {
        let a = Alphabet::digits(2);
        ShiftPresentation::from_regex("even", &a, "(1(00)*)*", Sidedness::TwoSided).unwrap()
    }

    fn w(s: &ShiftPresentation, text: &str) -> Word {
        Word::parse(s.alphabet(), text).unwrap()
    }

    #[test]
    fn transitivity_and_mixing() {
        assert!(is_transitive(&golden()).unwrap());
        assert!(is_mixing(&golden()).unwrap());
        assert!(is_mixing(&even()).unwrap());

        let alternating = sft(&["00", "11"]);
        assert!(is_transitive(&alternating).unwrap());
        assert!(!is_mixing(&alternating).unwrap());

        // two disjoint fixed points
        let mut g = LabeledGraph::new(Alphabet::digits(2));
        let a = g.add_state("a");
        let b = g.add_state("b");
        g.add_edge(a, 0, a);
        g.add_edge(b, 1, b);
        let s = ShiftPresentation::from_graph("pair", g, Sidedness::TwoSided).unwrap();
        assert!(!is_transitive(&s).unwrap());
        assert!(!is_mixing(&s).unwrap());
    }

    #[test]
    fn entropy_golden_mean() {
        let e = entropy(&golden(), 1e-9).unwrap();
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!(e.width() <= 1e-9);
        assert!((e.value() - phi.log2()).abs() < 1e-9);
        assert!((e.value() - 0.6942419136306174).abs() < 1e-9);
    }

    #[test]
    fn entropy_full_shift_is_exact() {
        let a = Alphabet::digits(3);
        let s = ShiftPresentation::from_forbidden("full3", &a, &[], Sidedness::TwoSided).unwrap();
        let e = entropy(&s, 1e-9).unwrap();
        assert_eq!(e.lower, e.upper);
        assert!((e.value() - 3.0f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn even_shift_has_golden_entropy() {
        let eg = entropy(&golden(), 1e-10).unwrap();
        let ee = entropy(&even(), 1e-10).unwrap();
        assert!((eg.value() - ee.value()).abs() < 1e-9);
    }

    #[test]
    fn word_counts_are_fibonacci_on_golden() {
        let c = count_words(&golden(), 24).unwrap();
        assert_eq!(&c[..6], &[1, 2, 3, 5, 8, 13]);
        assert_eq!(c[24], 121_393);
    }

    #[test]
    fn word_counts_even_and_full() {
        assert_eq!(count_words(&even(), 4).unwrap(), vec![1, 2, 4, 7, 12]);
        assert_eq!(count_words(&sft(&[]), 3).unwrap(), vec![1, 2, 4, 8]);
    }

    #[test]
    fn orbit_enumeration_golden() {
        let orbits = enumerate_periodic_orbits(&golden(), 3).unwrap();
        let gens: Vec<String> = orbits.iter().map(|o| o.generator.to_string()).collect();
        assert_eq!(gens, vec!["0", "01", "001"]);
        assert_eq!(
            (1..=6)
                .map(|n| fixed_points_of_power(&golden(), n).unwrap())
                .collect::<Vec<_>>(),
            vec![1, 3, 4, 7, 11, 18]
        );
        assert_eq!(fixed_points_of_power(&sft(&[]), 5).unwrap(), 32);
        assert!(matches!(
            enumerate_periodic_orbits(&golden(), 17),
            Err(AnalysisError::PeriodTooLarge(17))
        ));
    }

    #[test]
    fn fixed_point_counts_match_traces_on_de_bruijn() {
        // on the order-1 de Bruijn presentation, cycles of length n
        // correspond bijectively to points fixed by the n-th shift power
        let g = golden();
        let n = g.graph().state_count();
        let mut m = vec![vec![0u128; n]; n];
        for (q, _, r) in g.graph().edges() {
            m[q][r] += 1;
        }
        let mut pow = m.clone();
        for len in 1..=6 {
            let trace: u128 = (0..n).map(|i| pow[i][i]).sum();
            assert_eq!(trace, fixed_points_of_power(&g, len).unwrap(), "n={len}");
            let mut next = vec![vec![0u128; n]; n];
            for i in 0..n {
                for k in 0..n {
                    for j in 0..n {
                        next[i][j] += pow[i][k] * m[k][j];
                    }
                }
            }
            pow = next;
        }
    }

    #[test]
    fn synchronizing_witnesses() {
        let g = golden();
        assert_eq!(synchronizing_witness(&g, &w(&g, "0")).unwrap(), Some(1));
        assert_eq!(synchronizing_witness(&g, &w(&g, "01")).unwrap(), Some(2));
        let e = even();
        assert_eq!(synchronizing_witness(&e, &w(&e, "0")).unwrap(), None);
        assert_eq!(synchronizing_witness(&e, &w(&e, "1")).unwrap(), Some(1));
    }

    #[test]
    fn isolated_orbits() {
        let lone = sft(&["00", "11"]); // only the alternating orbit
        let gen = w(&lone, "01");
        assert!(orbit_isolated_in_truncation(&lone, &gen, Truncation::Right).unwrap());
        assert!(orbit_isolated_in_truncation(&lone, &gen, Truncation::Left).unwrap());

        let g = golden();
        let zero = w(&g, "0");
        assert!(!orbit_isolated_in_truncation(&g, &zero, Truncation::Right).unwrap());
        assert!(!orbit_isolated_in_truncation(&g, &zero, Truncation::Left).unwrap());
    }

    #[test]
    fn hypothesis_report_golden() {
        let r = check_hypotheses(&golden(), 6).unwrap();
        assert!(r.satisfied());
        assert!(r.transitive && r.mixing && r.infinite);
        assert_eq!(r.period_bound, 6);
        assert!(r.orbits.iter().all(|o| o.witness.is_some()));
    }

    #[test]
    fn hypothesis_report_even_shift() {
        let r = check_hypotheses(&even(), 6).unwrap();
        assert!(!r.satisfied());
        let f = &r.failures[0];
        assert_eq!(f.reason(), "not_synchronizing");
        assert_eq!(f.orbit().unwrap().to_string(), "0");
    }
}
