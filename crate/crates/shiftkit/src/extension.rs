//! The extension engine. Given an oracle for a shift-commuting map defined
//! away from the periodic points, approximate the set of image windows the
//! map forces at each periodic point, and either reconstruct the unique
//! continuous extension or produce an obstruction: two windows that are both
//! realized by in-shift approximants, so no extension can be continuous
//! there.
//!
//! Approximants of a target point are built from menus of periodic tails and
//! short attachment words glued onto a long block of the target, plus a
//! long-padding sweep that walks a single deviation arbitrarily far out (the
//! midpoint-style maps need it). Every context is validated by
//! `contains_point` before it is queried, so every reported window comes
//! with a genuine in-shift realizer.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::alphabet::{Alphabet, SymbolId};
use crate::analysis::{self, AnalysisError};
use crate::code::{CodeError, SlidingBlockCode};
use crate::oracle::{CodeOracle, EquivariantOracle, OracleAnswer, OracleError};
use crate::point::{PointError, PointPresentation, Sidedness};
use crate::presentation::{PresentationError, ShiftPresentation};
use crate::word::{PeriodicWord, Word, WordError};

/// Search budgets. `depth_factor` scales the context agreement depth:
/// approximants of a scale-n window agree with the target on radius
/// `depth_factor * n + diameter(presentation)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    pub period_max: usize,
    pub scale_max: usize,
    pub depth_factor: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            period_max: 6,
            scale_max: 16,
            depth_factor: 4,
        }
    }
}

const SCALE_SCHEDULE: [usize; 5] = [1, 2, 4, 8, 16];
const TAIL_LEN_MAX: usize = 3;
const ATTACH_LEN_MAX: usize = 2;
const HALF_MENU_CAP: usize = 24;
const SWEEP_MENU_CAP: usize = 4;

#[derive(Debug, Error)]
pub enum ExtensionError {
    #[error("scale budget admits no scale from the schedule")]
    EmptySchedule,
    #[error("expected a {expected:?} domain")]
    WrongSidedness { expected: Sidedness },
    #[error("target point lies outside the oracle's domain")]
    TargetOutsideDomain,
    #[error("context word \"{0}\" is not admissible next to the periodic block")]
    BadContext(String),
    #[error("gluing failed: \"{0}\" does not synchronize at the supplied length")]
    NotSynchronizing(String),
    #[error("every padded gluing is the periodic point itself")]
    PeriodicSplice,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Point(#[from] PointError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// An image window together with one in-shift approximant realizing it.
#[derive(Debug, Clone)]
pub struct RealizedWindow {
    pub window: Word,
    pub context: PointPresentation,
}

/// The set of image windows of length 2n+1 (n+1 one-sided) forced at the
/// center of `target` by in-shift points agreeing with it to radius `depth`
/// but differing somewhere.
#[derive(Debug, Clone)]
pub struct ImageSetApproximation {
    pub orbit: Word,
    pub target: PointPresentation,
    pub scale: usize,
    pub depth: usize,
    pub windows: Vec<RealizedWindow>,
    pub contexts_tried: usize,
    pub undetermined: usize,
}

#[derive(Debug, Clone)]
pub struct OrbitExtension {
    pub orbit: Word,
    pub period: usize,
    pub image: PointPresentation,
    pub scale: usize,
}

#[derive(Debug, Clone)]
pub struct ObstructionWitness {
    pub orbit: Word,
    pub target: PointPresentation,
    pub scale: usize,
    pub windows: Vec<RealizedWindow>,
    /// Window counts per tested scale; `growth` when every count reaches
    /// the scale, the signature of an infinite limit set.
    pub scale_counts: Vec<(usize, usize)>,
    pub growth: bool,
}

#[derive(Debug, Clone)]
pub enum ExtensionResult {
    /// Every probed target stabilized on a single consistent image.
    Extended { table: Vec<OrbitExtension> },
    /// Two windows coexist at some target: definitive, no continuous
    /// extension exists.
    Obstruction(ObstructionWitness),
    /// Budgets exhausted before the named target stabilized.
    Inconclusive {
        orbit: Word,
        target: PointPresentation,
        scale: usize,
    },
}

impl ExtensionResult {
    pub fn verdict(&self) -> &'static str {
        match self {
            ExtensionResult::Extended { .. } => "extended",
            ExtensionResult::Obstruction(_) => "obstruction",
            ExtensionResult::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Longest finite shortest-path distance in the presentation graph.
fn diameter(s: &ShiftPresentation) -> usize {
    let g = s.graph();
    let n = g.state_count();
    let mut best = 0;
    for start in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &(_, v) in g.edges_from(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    best = best.max(dist[v]);
                    queue.push_back(v);
                }
            }
        }
    }
    best
}

/// One side of a context: a periodic tail, a short attachment word between
/// the tail and the agreement block, and extra target periods of padding.
#[derive(Debug, Clone)]
struct Half {
    tail: Word,
    attach: Word,
    pad: usize,
}

fn words_of_len(alphabet: &Alphabet, len: usize) -> Vec<Word> {
    let k = alphabet.len();
    let mut out = Vec::new();
    let mut w = vec![0usize; len];
    loop {
        out.push(Word::new(alphabet.clone(), w.clone()));
        let mut i = len;
        loop {
            if i == 0 {
                return out;
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

fn is_primitive(w: &Word) -> bool {
    w.least_word_period() == w.len()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

struct Probe<'a> {
    oracle: &'a dyn EquivariantOracle,
    target: &'a PointPresentation,
    orbit: &'a Word,
    period: usize,
    scale: usize,
    depth: usize,
}

/// Windows keyed by symbol content for deterministic order; first realizer
/// wins.
type WindowMap = BTreeMap<Vec<SymbolId>, RealizedWindow>;

impl<'a> Probe<'a> {
    fn domain(&self) -> &ShiftPresentation {
        self.oracle.domain()
    }

    fn two_sided(&self) -> bool {
        self.target.sidedness() == Sidedness::TwoSided
    }

    /// Candidate halves in a fixed order, pre-filtered by admissibility of
    /// the tail-attach-block seam.
    fn halves(&self, side: Side, pads: &[usize], cap: usize) -> Result<Vec<Half>, ExtensionError> {
        let alphabet = self.domain().alphabet();
        let mut out = Vec::new();
        for attach_len in 0..=ATTACH_LEN_MAX {
            for attach in words_of_len(alphabet, attach_len) {
                for tail_len in 1..=TAIL_LEN_MAX {
                    for tail in words_of_len(alphabet, tail_len) {
                        if !is_primitive(&tail) {
                            continue;
                        }
                        for &pad in pads {
                            let half = Half {
                                tail: tail.clone(),
                                attach: attach.clone(),
                                pad,
                            };
                            if self.half_admissible(side, &half)? {
                                out.push(half);
                                if out.len() == cap {
                                    return Ok(out);
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Necessary condition only; the assembled point is still checked by
    /// `contains_point`.
    fn half_admissible(&self, side: Side, half: &Half) -> Result<bool, ExtensionError> {
        let p = self.period as isize;
        let probe_span = 2 * p + 2;
        let seam = match side {
            Side::Left => {
                let lo = self.block_lo(half.pad);
                let block = self.target.window(lo, lo + probe_span)?;
                half.tail.repeated(3).concat(&half.attach).concat(&block)
            }
            Side::Right => {
                let hi = self.block_hi(half.pad);
                let lo = if self.two_sided() {
                    hi - probe_span
                } else {
                    (hi - probe_span).max(0)
                };
                let block = self.target.window(lo, hi)?;
                block.concat(&half.attach).concat(&half.tail.repeated(3))
            }
        };
        Ok(self.domain().word_in_language(&seam)?)
    }

    fn block_lo(&self, pad: usize) -> isize {
        -(self.depth as isize) - (pad * self.period) as isize
    }

    fn block_hi(&self, pad: usize) -> isize {
        self.depth as isize + (pad * self.period) as isize
    }

    fn assemble(&self, left: Option<&Half>, right: &Half) -> Result<PointPresentation, ExtensionError> {
        if self.two_sided() {
            let l = left.expect("two-sided context has a left half");
            let lo = self.block_lo(l.pad);
            let hi = self.block_hi(right.pad);
            let block = self.target.window(lo, hi)?;
            let core = l.attach.concat(&block).concat(&right.attach);
            let start = lo - l.attach.len() as isize;
            Ok(PointPresentation::two_sided(&l.tail, &core, &right.tail, start)?)
        } else {
            let hi = self.block_hi(right.pad);
            let block = self.target.window(0, hi)?;
            let core = block.concat(&right.attach);
            Ok(PointPresentation::one_sided(&core, &right.tail)?)
        }
    }

    /// Queries the context at every window coordinate; contributes its
    /// image window when fully determined.
    fn try_context(
        &self,
        x: PointPresentation,
        windows: &mut WindowMap,
        tried: &mut usize,
        undetermined: &mut usize,
    ) -> Result<bool, ExtensionError> {
        if x == *self.target || !self.domain().contains_point(&x)? {
            return Ok(false);
        }
        *tried += 1;
        let n = self.scale as isize;
        // canonicalization may absorb the agreement block into a tail, so
        // anchor the query window to the scale window as well as the core
        let margin = |t: Option<&PeriodicWord>| t.map_or(0, |pw| 3 * pw.period() as isize + 2);
        let qlo = if self.two_sided() {
            x.core_start().min(-n) - margin(x.left_tail())
        } else {
            0
        };
        let qhi = x.core_end().max(n) + margin(Some(x.right_tail()));
        let w = x.window(qlo, qhi)?;
        let coords = if self.two_sided() { -n..=n } else { 0..=n };
        let mut image = Vec::new();
        for i in coords {
            match self.oracle.query(&w, (i - qlo) as usize)? {
                OracleAnswer::Determined(s) => image.push(s),
                OracleAnswer::Unknown => {
                    *undetermined += 1;
                    return Ok(false);
                }
            }
        }
        let word = Word::new(self.oracle.codomain().alphabet().clone(), image);
        windows.entry(word.symbols().to_vec()).or_insert(RealizedWindow {
            window: word,
            context: x,
        });
        Ok(true)
    }

    fn run(&self) -> Result<ImageSetApproximation, ExtensionError> {
        let mut windows = WindowMap::new();
        let mut tried = 0;
        let mut undetermined = 0;

        // With a declared radius the window cannot depend on the context
        // once the agreement region covers it, so two contexts certify.
        let radius_covered = self
            .oracle
            .radius_hint()
            .is_some_and(|r| self.scale + r <= self.depth);

        let rights = self.halves(Side::Right, &[0, 1], HALF_MENU_CAP)?;
        let lefts = if self.two_sided() {
            self.halves(Side::Left, &[0, 1], HALF_MENU_CAP)?
        } else {
            Vec::new()
        };

        let mut contributions = 0;
        'pairs: for right in &rights {
            if self.two_sided() {
                for left in &lefts {
                    if self.try_context(self.assemble(Some(left), right)?, &mut windows, &mut tried, &mut undetermined)? {
                        contributions += 1;
                    }
                    if radius_covered && contributions >= 2 {
                        break 'pairs;
                    }
                }
            } else {
                if self.try_context(self.assemble(None, right)?, &mut windows, &mut tried, &mut undetermined)? {
                    contributions += 1;
                }
                if radius_covered && contributions >= 2 {
                    break 'pairs;
                }
            }
        }

        // Long-padding sweep: walk one side's deviation outward so maps
        // keyed to far markers (midpoints) realize every placement.
        if !radius_covered {
            let sweep_max = 2 * self.scale + 2 * self.period + 4;
            let tiny_r: Vec<Half> = rights.iter().take(SWEEP_MENU_CAP).cloned().collect();
            let tiny_l: Vec<Half> = lefts.iter().take(SWEEP_MENU_CAP).cloned().collect();
            for t in 2..=sweep_max {
                for right in &tiny_r {
                    let swept = Half { pad: t, ..right.clone() };
                    if self.two_sided() {
                        for left in &tiny_l {
                            self.try_context(self.assemble(Some(left), &swept)?, &mut windows, &mut tried, &mut undetermined)?;
                        }
                    } else {
                        self.try_context(self.assemble(None, &swept)?, &mut windows, &mut tried, &mut undetermined)?;
                    }
                }
                if self.two_sided() {
                    for left in &tiny_l {
                        let swept = Half { pad: t, ..left.clone() };
                        for right in &tiny_r {
                            self.try_context(self.assemble(Some(&swept), right)?, &mut windows, &mut tried, &mut undetermined)?;
                        }
                    }
                }
            }
        }

        Ok(ImageSetApproximation {
            orbit: self.orbit.clone(),
            target: self.target.clone(),
            scale: self.scale,
            depth: self.depth,
            windows: windows.into_values().collect(),
            contexts_tried: tried,
            undetermined,
        })
    }
}

/// The forced image windows of the periodic point of `s` at scale `n`,
/// from contexts agreeing to radius `depth`.
pub fn approximate_image_set(
    o: &dyn EquivariantOracle,
    s: &PeriodicWord,
    n: usize,
    depth: usize,
) -> Result<ImageSetApproximation, ExtensionError> {
    let generator = s.primitive_word();
    let target = match o.domain().sidedness() {
        Sidedness::TwoSided => PointPresentation::periodic(&generator)?,
        Sidedness::OneSided => PointPresentation::periodic_one_sided(&generator)?,
    };
    approximate_target(o, &target, &generator, n, depth)
}

/// As `approximate_image_set` for an arbitrary (eventually periodic) target.
pub fn approximate_target(
    o: &dyn EquivariantOracle,
    target: &PointPresentation,
    orbit: &Word,
    n: usize,
    depth: usize,
) -> Result<ImageSetApproximation, ExtensionError> {
    if !o.domain().contains_point(target)? {
        return Err(ExtensionError::TargetOutsideDomain);
    }
    let depth = depth.max(n);
    Probe {
        oracle: o,
        target,
        orbit,
        period: orbit.len(),
        scale: n,
        depth,
    }
    .run()
}

/// Smallest divisor q of `period` such that the window is q-periodic, and
/// the induced periodic image (aligned so the window center sits at 0).
fn periodic_image_from_window(
    w: &Word,
    center: usize,
    period: usize,
    sidedness: Sidedness,
    codomain: &ShiftPresentation,
) -> Result<Option<PointPresentation>, ExtensionError> {
    let syms = w.symbols();
    'q: for q in 1..=period {
        if !period.is_multiple_of(q) {
            continue;
        }
        for i in 0..syms.len().saturating_sub(q) {
            if syms[i] != syms[i + q] {
                continue 'q;
            }
        }
        if center + q > syms.len() {
            continue;
        }
        let generator = w.slice(center, center + q);
        let image = match sidedness {
            Sidedness::TwoSided => PointPresentation::periodic(&generator)?,
            Sidedness::OneSided => PointPresentation::periodic_one_sided(&generator)?,
        };
        if codomain.contains_point(&image)? {
            return Ok(Some(image));
        }
        return Ok(None);
    }
    Ok(None)
}

fn schedule(budgets: &Budgets) -> Result<Vec<usize>, ExtensionError> {
    let s: Vec<usize> = SCALE_SCHEDULE
        .into_iter()
        .filter(|&n| n <= budgets.scale_max)
        .collect();
    if s.is_empty() {
        return Err(ExtensionError::EmptySchedule);
    }
    Ok(s)
}

/// Per-target outcome inside the main loop.
enum TargetOutcome {
    Stable { image: PointPresentation, scale: usize },
    Obstructed(ObstructionWitness),
    Exhausted { scale: usize },
}

#[allow(clippy::too_many_arguments)]
fn settle_target(
    o: &dyn EquivariantOracle,
    target: &PointPresentation,
    orbit: &Word,
    period: usize,
    expected_tail: Option<&PointPresentation>,
    scales: &[usize],
    budgets: &Budgets,
    diam: usize,
) -> Result<TargetOutcome, ExtensionError> {
    let mut singleton_run: Vec<(usize, Word)> = Vec::new();
    let mut last_scale = scales[0];
    for (idx, &n) in scales.iter().enumerate() {
        last_scale = n;
        let depth = budgets.depth_factor * n + diam;
        let approx = approximate_target(o, target, orbit, n, depth)?;
        if approx.windows.len() >= 2 {
            return Ok(TargetOutcome::Obstructed(finish_obstructed(
                o,
                target,
                orbit,
                n,
                approx,
                &scales[idx + 1..],
                budgets,
                diam,
            )?));
        }
        if approx.windows.len() == 1 {
            let rw = &approx.windows[0];
            if let Some((pn, pw)) = singleton_run.last() {
                // a singleton disagreeing with the previous scale's center
                // restriction exposes two realized windows at that scale
                let restricted = restrict_center(&rw.window, n, *pn, target.sidedness());
                if restricted.symbols() != pw.symbols() {
                    let witness = ObstructionWitness {
                        orbit: orbit.clone(),
                        target: target.clone(),
                        scale: *pn,
                        windows: vec![
                            RealizedWindow {
                                window: pw.clone(),
                                context: approx_context_for(o, target, orbit, *pn, budgets, diam, pw)?,
                            },
                            RealizedWindow {
                                window: restricted,
                                context: rw.context.clone(),
                            },
                        ],
                        scale_counts: vec![(*pn, 2)],
                        growth: false,
                    };
                    return Ok(TargetOutcome::Obstructed(witness));
                }
            }
            singleton_run.push((n, rw.window.clone()));
            if singleton_run.len() >= 3 && n >= period {
                let center = if target.sidedness() == Sidedness::TwoSided {
                    n
                } else {
                    0
                };
                let candidate = match expected_tail {
                    None => periodic_image_from_window(
                        &rw.window,
                        center,
                        period,
                        target.sidedness(),
                        o.codomain(),
                    )?,
                    Some(parent) => boundary_image_from_window(&rw.window, parent, o.codomain())?,
                };
                if let Some(image) = candidate {
                    return Ok(TargetOutcome::Stable { image, scale: n });
                }
            }
        } else {
            singleton_run.clear();
        }
    }
    Ok(TargetOutcome::Exhausted { scale: last_scale })
}

/// Re-runs the remaining scales after an obstruction to measure growth and
/// report the richest window set.
#[allow(clippy::too_many_arguments)]
fn finish_obstructed(
    o: &dyn EquivariantOracle,
    target: &PointPresentation,
    orbit: &Word,
    first_scale: usize,
    first: ImageSetApproximation,
    rest: &[usize],
    budgets: &Budgets,
    diam: usize,
) -> Result<ObstructionWitness, ExtensionError> {
    let mut counts = vec![(first_scale, first.windows.len())];
    let mut scale = first_scale;
    let mut windows = first.windows;
    for &n in rest {
        let depth = budgets.depth_factor * n + diam;
        let approx = approximate_target(o, target, orbit, n, depth)?;
        counts.push((n, approx.windows.len()));
        if approx.windows.len() >= 2 {
            scale = n;
            windows = approx.windows;
        }
    }
    let growth = counts.iter().all(|&(n, c)| c >= n);
    Ok(ObstructionWitness {
        orbit: orbit.clone(),
        target: target.clone(),
        scale,
        windows,
        scale_counts: counts,
        growth,
    })
}

/// Fetches a realizing context for `window` at the given scale (used when a
/// cross-scale mismatch is promoted to an obstruction).
fn approx_context_for(
    o: &dyn EquivariantOracle,
    target: &PointPresentation,
    orbit: &Word,
    n: usize,
    budgets: &Budgets,
    diam: usize,
    window: &Word,
) -> Result<PointPresentation, ExtensionError> {
    let depth = budgets.depth_factor * n + diam;
    let approx = approximate_target(o, target, orbit, n, depth)?;
    approx
        .windows
        .into_iter()
        .find(|rw| rw.window.symbols() == window.symbols())
        .map(|rw| rw.context)
        .ok_or(ExtensionError::TargetOutsideDomain)
}

fn restrict_center(w: &Word, n: usize, m: usize, sidedness: Sidedness) -> Word {
    match sidedness {
        Sidedness::TwoSided => w.slice(n - m, n + m + 1),
        Sidedness::OneSided => w.slice(0, m + 1),
    }
}

/// Image of an eventually periodic boundary target `b s^inf`: first window
/// symbol, then the parent orbit's image.
fn boundary_image_from_window(
    w: &Word,
    parent_image: &PointPresentation,
    codomain: &ShiftPresentation,
) -> Result<Option<PointPresentation>, ExtensionError> {
    let syms = w.symbols();
    for (i, &sym) in syms.iter().enumerate().skip(1) {
        if sym != parent_image.symbol_at(i as isize - 1)? {
            return Ok(None);
        }
    }
    let q = parent_image
        .least_period()
        .expect("parent image is periodic");
    let head = w.slice(0, 1);
    let tail = parent_image.window(0, q as isize - 1)?;
    let image = PointPresentation::one_sided(&head, &tail)?;
    if codomain.contains_point(&image)? {
        Ok(Some(image))
    } else {
        Ok(None)
    }
}

/// Runs the scale schedule over every periodic orbit of the (two-sided)
/// domain. Declared-radius oracles get an exact certificate; black-box
/// oracles are certified up to the budgets.
pub fn extend(
    o: &dyn EquivariantOracle,
    budgets: &Budgets,
) -> Result<ExtensionResult, ExtensionError> {
    if o.domain().sidedness() != Sidedness::TwoSided {
        return Err(ExtensionError::WrongSidedness {
            expected: Sidedness::TwoSided,
        });
    }
    run_schedule(o, budgets, false)
}

/// One-sided variant: besides the periodic orbits, probes every boundary
/// point `b s^inf` (one symbol prepended to a periodic tail), where the
/// one-sided theory predicts the failures.
pub fn extend_one_sided(
    o: &dyn EquivariantOracle,
    budgets: &Budgets,
) -> Result<ExtensionResult, ExtensionError> {
    if o.domain().sidedness() != Sidedness::OneSided {
        return Err(ExtensionError::WrongSidedness {
            expected: Sidedness::OneSided,
        });
    }
    run_schedule(o, budgets, true)
}

fn run_schedule(
    o: &dyn EquivariantOracle,
    budgets: &Budgets,
    one_sided: bool,
) -> Result<ExtensionResult, ExtensionError> {
    let scales = schedule(budgets)?;
    let domain = o.domain();
    let diam = diameter(domain);
    let orbits = analysis::enumerate_periodic_orbits(domain, budgets.period_max)?;
    let mut table = Vec::new();
    for orbit in &orbits {
        let target = if one_sided {
            PointPresentation::periodic_one_sided(&orbit.generator)?
        } else {
            PointPresentation::periodic(&orbit.generator)?
        };
        let outcome = settle_target(
            o,
            &target,
            &orbit.generator,
            orbit.least_period,
            None,
            &scales,
            budgets,
            diam,
        )?;
        let parent_image = match outcome {
            TargetOutcome::Stable { image, scale } => {
                table.push(OrbitExtension {
                    orbit: orbit.generator.clone(),
                    period: orbit.least_period,
                    image: image.clone(),
                    scale,
                });
                image
            }
            TargetOutcome::Obstructed(w) => return Ok(ExtensionResult::Obstruction(w)),
            TargetOutcome::Exhausted { scale } => {
                return Ok(ExtensionResult::Inconclusive {
                    orbit: orbit.generator.clone(),
                    target,
                    scale,
                })
            }
        };
        if !one_sided {
            continue;
        }
        for b in domain.alphabet().ids() {
            // b s^inf is periodic again exactly when b closes the cycle
            if b == orbit.generator.at(orbit.least_period - 1) {
                continue;
            }
            let head = Word::new(domain.alphabet().clone(), vec![b]);
            let boundary = PointPresentation::one_sided(&head, &orbit.generator)?;
            if !domain.contains_point(&boundary)? {
                continue;
            }
            let outcome = settle_target(
                o,
                &boundary,
                &orbit.generator,
                orbit.least_period,
                Some(&parent_image),
                &scales,
                budgets,
                diam,
            )?;
            match outcome {
                TargetOutcome::Stable { .. } => {}
                TargetOutcome::Obstructed(w) => return Ok(ExtensionResult::Obstruction(w)),
                TargetOutcome::Exhausted { scale } => {
                    return Ok(ExtensionResult::Inconclusive {
                        orbit: orbit.generator.clone(),
                        target: boundary,
                        scale,
                    })
                }
            }
        }
    }
    Ok(ExtensionResult::Extended { table })
}

fn admissible_windows(
    s: &ShiftPresentation,
    len: usize,
) -> Result<Vec<Word>, PresentationError> {
    let alphabet = s.alphabet().clone();
    let mut out = Vec::new();
    let mut stack: Vec<Vec<SymbolId>> = vec![Vec::new()];
    while let Some(prefix) = stack.pop() {
        if prefix.len() == len {
            out.push(Word::new(alphabet.clone(), prefix));
            continue;
        }
        for a in alphabet.ids().rev() {
            let mut next = prefix.clone();
            next.push(a);
            if s.word_in_language(&Word::new(alphabet.clone(), next.clone()))? {
                stack.push(next);
            }
        }
    }
    Ok(out)
}

/// Checks the supplied inverse on all admissible windows, then verifies
/// that restriction-then-extension reproduces `f` on every periodic orbit
/// within budget.
pub fn aut_roundtrip(
    f: &SlidingBlockCode,
    f_inv: &SlidingBlockCode,
    shift: &ShiftPresentation,
    budgets: &Budgets,
) -> Result<bool, ExtensionError> {
    for (outer, inner) in [(f_inv, f), (f, f_inv)] {
        let composed = outer.compose(inner, "roundtrip-check")?;
        let len = composed.memory() + composed.anticipation() + 1;
        for w in admissible_windows(shift, len)? {
            if composed.lookup(w.symbols()) != Some(w.at(composed.memory())) {
                return Ok(false);
            }
        }
    }
    let oracle = CodeOracle::new(f.clone(), shift.clone(), shift.clone())?;
    match extend(&oracle, budgets)? {
        ExtensionResult::Extended { table } => {
            for entry in table {
                let point = PointPresentation::periodic(&entry.orbit)?;
                if f.apply(&point)? != entry.image {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Ok(false),
    }
}

/// Glues `left` and `right` through a block of the synchronizing periodic
/// word: `[s]^-inf left s^pad right [s]^inf`. Retries once with one more
/// padding period if the first gluing collapses to a periodic point.
pub fn splice_aperiodic_context(
    shift: &ShiftPresentation,
    s: &PeriodicWord,
    left: &Word,
    right: &Word,
    ell: usize,
) -> Result<PointPresentation, ExtensionError> {
    let base = s.primitive_word();
    let guard = base.repeated(ell.max(1));
    for (w, side) in [(left, Side::Left), (right, Side::Right)] {
        let seam = match side {
            Side::Left => w.concat(&guard),
            Side::Right => guard.concat(w),
        };
        if !shift.word_in_language(&seam)? {
            return Err(ExtensionError::BadContext(seam.to_string()));
        }
    }
    for extra in 0..2 {
        let pad = ell.max(1) + extra;
        let core = left.concat(&base.repeated(pad)).concat(right);
        let x = PointPresentation::two_sided(&base, &core, &base, 0)?;
        if !shift.contains_point(&x)? {
            return Err(ExtensionError::NotSynchronizing(base.to_string()));
        }
        if !x.is_periodic() {
            return Ok(x);
        }
    }
    Err(ExtensionError::PeriodicSplice)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{
        GapMidpointOracle, ParityRecodeOracle, RightParityFlipOracle, RunFlipOracle,
    };

    fn full(k: usize, sided: Sidedness) -> ShiftPresentation {
        ShiftPresentation::from_forbidden("full", &Alphabet::digits(k), &[], sided).unwrap()
    }

    fn golden() -> ShiftPresentation {
        let a = Alphabet::digits(2);
        let forbid = [Word::parse(&a, "11").unwrap()];
        ShiftPresentation::from_forbidden("golden", &a, &forbid, Sidedness::TwoSided).unwrap()
    }

    fn identity_oracle(shift: &ShiftPresentation) -> CodeOracle {
        let a = shift.alphabet().clone();
        let code = SlidingBlockCode::from_fn("id", a.clone(), a, 0, 0, |w| w[0]);
        CodeOracle::new(code, shift.clone(), shift.clone()).unwrap()
    }

    fn window_texts(approx: &ImageSetApproximation) -> Vec<String> {
        approx.windows.iter().map(|rw| rw.window.to_string()).collect()
    }

    #[test]
    fn identity_image_set_is_tight() {
        let shift = full(2, Sidedness::TwoSided);
        let o = identity_oracle(&shift);
        let s = PeriodicWord::parse(&Alphabet::digits(2), "0").unwrap();
        let approx = approximate_image_set(&o, &s, 2, 8).unwrap();
        assert_eq!(window_texts(&approx), vec!["00000"]);
        assert!(approx.contexts_tried >= 2);
    }

    #[test]
    fn parity_recode_realizes_both_phases() {
        let o = ParityRecodeOracle::new();
        let s = PeriodicWord::parse(o.domain().alphabet(), "0").unwrap();
        for n in [1usize, 2, 4] {
            let approx = approximate_image_set(&o, &s, n, 4 * n + 2).unwrap();
            let phase = |start: usize| -> String {
                (0..2 * n + 1)
                    .map(|i| if (start + i).is_multiple_of(2) { '0' } else { '1' })
                    .collect()
            };
            assert_eq!(window_texts(&approx), vec![phase(0), phase(1)], "scale {n}");
            for rw in &approx.windows {
                assert!(o.domain().contains_point(&rw.context).unwrap());
                assert_ne!(rw.context, approx.target);
            }
        }
    }

    #[test]
    fn run_flip_realizes_both_constants() {
        let o = RunFlipOracle::new();
        let s = PeriodicWord::parse(o.domain().alphabet(), "0").unwrap();
        let approx = approximate_image_set(&o, &s, 1, 6).unwrap();
        assert_eq!(window_texts(&approx), vec!["000", "111"]);
    }

    #[test]
    fn midpoint_window_count_grows_with_scale() {
        let o = GapMidpointOracle::new();
        let s = PeriodicWord::parse(o.domain().alphabet(), "0").unwrap();
        for n in [4usize, 8] {
            let approx = approximate_image_set(&o, &s, n, 4 * n).unwrap();
            assert!(
                approx.windows.len() >= n,
                "scale {n}: only {} windows",
                approx.windows.len()
            );
        }
    }

    #[test]
    fn extend_identity_reconstructs_every_orbit() {
        let shift = golden();
        let o = identity_oracle(&shift);
        match extend(&o, &Budgets::default()).unwrap() {
            ExtensionResult::Extended { table } => {
                assert!(!table.is_empty());
                for entry in table {
                    let point = PointPresentation::periodic(&entry.orbit).unwrap();
                    assert_eq!(entry.image, point, "orbit {}", entry.orbit);
                    assert_eq!(entry.image.least_period(), Some(entry.period));
                }
            }
            other => panic!("expected extension, got {}", other.verdict()),
        }
    }

    #[test]
    fn extend_swap_composed_with_shift() {
        let a = Alphabet::digits(2);
        let shift = full(2, Sidedness::TwoSided);
        let code = SlidingBlockCode::from_fn("shift-swap", a.clone(), a.clone(), 0, 1, |w| {
            1 - w[1]
        });
        let o = CodeOracle::new(code.clone(), shift.clone(), shift).unwrap();
        match extend(&o, &Budgets::default()).unwrap() {
            ExtensionResult::Extended { table } => {
                for entry in table {
                    let point = PointPresentation::periodic(&entry.orbit).unwrap();
                    assert_eq!(entry.image, code.apply(&point).unwrap());
                }
            }
            other => panic!("expected extension, got {}", other.verdict()),
        }
    }

    #[test]
    fn parity_recode_obstructs_at_the_fixed_point() {
        let o = ParityRecodeOracle::new();
        match extend(&o, &Budgets::default()).unwrap() {
            ExtensionResult::Obstruction(w) => {
                assert_eq!(w.orbit.to_string(), "0");
                assert_eq!(w.windows.len(), 2);
                assert!(!w.growth);
                let period_out = w
                    .windows
                    .iter()
                    .map(|rw| rw.window.least_word_period())
                    .max()
                    .unwrap();
                assert_eq!(period_out, 2);
            }
            other => panic!("expected obstruction, got {}", other.verdict()),
        }
    }

    #[test]
    fn midpoint_obstruction_carries_growth_certificate() {
        let o = GapMidpointOracle::new();
        let budgets = Budgets {
            scale_max: 8,
            ..Budgets::default()
        };
        match extend(&o, &budgets).unwrap() {
            ExtensionResult::Obstruction(w) => {
                assert!(w.growth, "counts {:?}", w.scale_counts);
                assert_eq!(w.orbit.to_string(), "0");
            }
            other => panic!("expected obstruction, got {}", other.verdict()),
        }
    }

    #[test]
    fn one_sided_identity_extends_with_boundaries() {
        let shift = full(2, Sidedness::OneSided);
        let o = identity_oracle(&shift);
        match extend_one_sided(&o, &Budgets::default()).unwrap() {
            ExtensionResult::Extended { table } => assert!(!table.is_empty()),
            other => panic!("expected extension, got {}", other.verdict()),
        }
    }

    #[test]
    fn right_parity_flip_obstructs_at_a_boundary_point() {
        let o = RightParityFlipOracle::new();
        match extend_one_sided(&o, &Budgets::default()).unwrap() {
            ExtensionResult::Obstruction(w) => {
                assert_eq!(w.orbit.to_string(), "0");
                assert_eq!(w.target.to_literal(), "1 [0]^inf");
                assert_eq!(w.windows.len(), 2);
                let first: Vec<String> =
                    w.windows.iter().map(|rw| rw.window.to_string()).collect();
                let n = w.scale;
                assert_eq!(first, vec![format!("1{}", "0".repeat(n)), format!("2{}", "0".repeat(n))]);
            }
            other => panic!("expected obstruction, got {}", other.verdict()),
        }
    }

    #[test]
    fn roundtrip_accepts_involution_and_rejects_fake_inverse() {
        let a = Alphabet::digits(3);
        let shift = full(3, Sidedness::TwoSided);
        let inv = SlidingBlockCode::from_fn("inv3", a.clone(), a.clone(), 0, 1, |w| {
            if w[0] != 0 && w[1] == 0 {
                3 - w[0]
            } else {
                w[0]
            }
        });
        assert!(aut_roundtrip(&inv, &inv, &shift, &Budgets::default()).unwrap());

        let ident = SlidingBlockCode::from_fn("id3", a.clone(), a.clone(), 0, 0, |w| w[0]);
        assert!(!aut_roundtrip(&inv, &ident, &shift, &Budgets::default()).unwrap());
    }

    #[test]
    fn splice_builds_aperiodic_points() {
        let shift = golden();
        let a = shift.alphabet().clone();
        let s = PeriodicWord::parse(&a, "0").unwrap();
        let one = Word::parse(&a, "1").unwrap();
        let x = splice_aperiodic_context(&shift, &s, &one, &one, 1).unwrap();
        assert!(shift.contains_point(&x).unwrap());
        assert!(!x.is_periodic());

        let empty = Word::empty(a.clone());
        assert!(matches!(
            splice_aperiodic_context(&shift, &s, &empty, &empty, 1),
            Err(ExtensionError::PeriodicSplice)
        ));

        let bad = Word::parse(&a, "11").unwrap();
        assert!(matches!(
            splice_aperiodic_context(&shift, &s, &bad, &one, 1),
            Err(ExtensionError::BadContext(_))
        ));
    }
}
