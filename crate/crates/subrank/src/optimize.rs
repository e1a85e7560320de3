//! Greedy-family optimization with matroid constraints, the split
//! meta-algorithms, and exhaustive verification oracles.
//!
//! The split algorithms run a subroutine on every restriction of the
//! objective at a flip set `B` (fixed part `A ⊆ B`), under the contracted
//! constraint `{C : C ∪ A ∈ M}`, and return the best candidate found
//! including the unrestricted run. All tie-breaking is by smallest element
//! index or smallest set mask, so traces are reproducible bit for bit.

use crate::error::{Error, Result};
use crate::lattice::{masks_of_size, Element, Restriction, SetFunction, Subset};
use rayon::prelude::*;
use serde::Serialize;

/// Downward-closed feasibility oracle over subsets.
pub trait Matroid: Sync {
    fn ground_size(&self) -> usize;

    fn is_feasible(&self, s: Subset) -> bool;

    /// Known bound on the size of feasible sets, if any; lets exhaustive
    /// search prune by cardinality.
    fn rank_hint(&self) -> Option<usize> {
        None
    }
}

/// `feasible(S) ⇔ |S| ≤ m`.
#[derive(Copy, Clone, Debug)]
pub struct CardinalityMatroid {
    n: usize,
    m: usize,
}

impl CardinalityMatroid {
    pub fn new(n: usize, m: usize) -> CardinalityMatroid {
        CardinalityMatroid { n, m }
    }

    pub fn max_cardinality(&self) -> usize {
        self.m
    }
}

impl Matroid for CardinalityMatroid {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn is_feasible(&self, s: Subset) -> bool {
        s.len() <= self.m
    }

    fn rank_hint(&self) -> Option<usize> {
        Some(self.m.min(self.n))
    }
}

/// Feasibility from an arbitrary predicate. In debug builds the constructor
/// spot-checks downward closure on a few random feasible sets.
pub struct PredicateMatroid<F: Fn(Subset) -> bool + Sync> {
    n: usize,
    predicate: F,
}

impl<F: Fn(Subset) -> bool + Sync> PredicateMatroid<F> {
    pub fn new(n: usize, predicate: F) -> Result<PredicateMatroid<F>> {
        if !predicate(Subset::EMPTY) {
            return Err(Error::argument(
                "matroid must contain the empty set".to_string(),
            ));
        }
        let matroid = PredicateMatroid { n, predicate };
        #[cfg(debug_assertions)]
        matroid.spot_check_downward_closed();
        Ok(matroid)
    }

    #[cfg(debug_assertions)]
    fn spot_check_downward_closed(&self) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        let full = Subset::full(self.n).bits();
        for _ in 0..64 {
            let s = Subset::from_bits(rng.random::<u32>() & full);
            if !(self.predicate)(s) {
                continue;
            }
            for e in s.elements() {
                debug_assert!(
                    (self.predicate)(s.without(e)),
                    "predicate is not downward closed at {s:?} ∖ {{{e}}}"
                );
            }
        }
    }
}

impl<F: Fn(Subset) -> bool + Sync> Matroid for PredicateMatroid<F> {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn is_feasible(&self, s: Subset) -> bool {
        (self.predicate)(s)
    }
}

/// Constraint seen by a subproblem: `C` (in restricted labels) is feasible
/// when `lift(C) ∪ A` is feasible upstairs.
struct ContractedMatroid<'a, M: Matroid + ?Sized, F: SetFunction + ?Sized> {
    base: &'a M,
    view: &'a Restriction<'a, F>,
}

impl<M: Matroid + ?Sized, F: SetFunction + ?Sized> Matroid for ContractedMatroid<'_, M, F> {
    fn ground_size(&self) -> usize {
        self.view.ground_size()
    }

    fn is_feasible(&self, s: Subset) -> bool {
        self.base.is_feasible(self.view.lift_full(s))
    }

    fn rank_hint(&self) -> Option<usize> {
        self.base
            .rank_hint()
            .map(|r| r.saturating_sub(self.view.fixed().len()))
    }
}

/// One accepted step of a run: the element added and its score (marginal
/// gain for maximization, achieved ratio for ratio minimization).
#[derive(Copy, Clone, Debug, Serialize)]
pub struct TraceStep {
    pub element: Element,
    pub score: f64,
}

/// Outcome of an optimization run, in original ground-set labels.
#[derive(Clone, Debug, Serialize)]
pub struct RunTrace {
    pub chosen: Subset,
    pub value: f64,
    pub steps: Vec<TraceStep>,
    /// `(A, B)` of the winning subproblem when a split run won.
    pub subproblem: Option<(Subset, Subset)>,
}

impl RunTrace {
    fn candidate(chosen: Subset, value: f64) -> RunTrace {
        RunTrace {
            chosen,
            value,
            steps: Vec::new(),
            subproblem: None,
        }
    }
}

/// Plain greedy: starting from the empty set, repeatedly add the feasible
/// element of largest marginal gain (ties to the smallest index) until no
/// feasible addition remains.
pub fn greedy(f: &(impl SetFunction + ?Sized), matroid: &(impl Matroid + ?Sized)) -> RunTrace {
    greedy_from(f, matroid, Subset::EMPTY)
}

/// Greedy continuation from a feasible starting set.
pub fn seeded_greedy(
    f: &(impl SetFunction + ?Sized),
    matroid: &(impl Matroid + ?Sized),
    seed: Subset,
) -> Result<RunTrace> {
    if !matroid.is_feasible(seed) {
        return Err(Error::argument(format!("seed {seed:?} is infeasible")));
    }
    Ok(greedy_from(f, matroid, seed))
}

fn greedy_from(
    f: &(impl SetFunction + ?Sized),
    matroid: &(impl Matroid + ?Sized),
    start: Subset,
) -> RunTrace {
    let n = f.ground_size();
    let mut current = start;
    let mut current_value = f.value(current);
    let mut steps = Vec::new();
    loop {
        let mut best: Option<(f64, Element)> = None;
        for e in 1..=n {
            if current.contains(e) || !matroid.is_feasible(current.with(e)) {
                continue;
            }
            let gain = f.value(current.with(e)) - current_value;
            let better = match best {
                None => true,
                Some((g, _)) => gain > g,
            };
            if better {
                best = Some((gain, e));
            }
        }
        match best {
            None => break,
            Some((gain, e)) => {
                current = current.with(e);
                current_value += gain;
                steps.push(TraceStep {
                    element: e,
                    score: gain,
                });
            }
        }
    }
    RunTrace {
        chosen: current,
        value: f.value(current),
        steps,
        subproblem: None,
    }
}

/// Ranking used everywhere a single candidate must win deterministically:
/// larger value first, then smaller mask.
fn better_max(a: &RunTrace, b: &RunTrace) -> bool {
    a.value > b.value || (a.value == b.value && a.chosen < b.chosen)
}

fn better_min(a: &RunTrace, b: &RunTrace) -> bool {
    a.value < b.value || (a.value == b.value && a.chosen < b.chosen)
}

/// Split meta-algorithm for maximization: run `subroutine` on every
/// restriction of `f` at a flip set of size `r` (fixed part feasible),
/// under the contracted constraint, plus once unrestricted; return the
/// best candidate evaluated on the original `f`.
pub fn r_split<F, M, S>(f: &F, r: usize, matroid: &M, subroutine: S) -> Result<RunTrace>
where
    F: SetFunction + ?Sized,
    M: Matroid + ?Sized,
    S: Fn(&dyn SetFunction, &dyn Matroid) -> RunTrace + Sync,
{
    let n = f.ground_size();
    if r > n {
        return Err(Error::argument(format!("split size r={r} exceeds n={n}")));
    }

    let plain = {
        let t = subroutine(&ObjectRef(f), &MatroidRef(matroid));
        RunTrace {
            value: f.value(t.chosen),
            ..t
        }
    };

    let flip_sets: Vec<Subset> = masks_of_size(n, r).collect();
    let best_split = flip_sets
        .par_iter()
        .map(|&b| {
            let mut local: Option<RunTrace> = None;
            for a in b.subsets() {
                if !matroid.is_feasible(a) {
                    continue;
                }
                let view = Restriction::new(f, a, b)?;
                if view.ground_size() == 0 {
                    let cand = RunTrace::candidate(a, f.value(a));
                    local = Some(pick(local, cand, better_max));
                    continue;
                }
                let contracted = ContractedMatroid {
                    base: matroid,
                    view: &view,
                };
                let t = subroutine(&view, &contracted);
                let chosen = view.lift_full(t.chosen);
                let cand = RunTrace {
                    chosen,
                    value: f.value(chosen),
                    steps: lift_steps(&view, &t.steps),
                    subproblem: Some((a, b)),
                };
                local = Some(pick(local, cand, better_max));
            }
            Ok(local)
        })
        .try_reduce(
            || None,
            |a, b| {
                Ok(match (a, b) {
                    (Some(x), Some(y)) => Some(if better_max(&x, &y) { x } else { y }),
                    (x, None) => x,
                    (None, y) => y,
                })
            },
        )?;

    Ok(match best_split {
        Some(split) if better_max(&split, &plain) => split,
        _ => plain,
    })
}

fn pick(
    current: Option<RunTrace>,
    cand: RunTrace,
    better: impl Fn(&RunTrace, &RunTrace) -> bool,
) -> RunTrace {
    match current {
        None => cand,
        Some(cur) => {
            if better(&cand, &cur) {
                cand
            } else {
                cur
            }
        }
    }
}

fn lift_steps<F: SetFunction + ?Sized>(
    view: &Restriction<'_, F>,
    steps: &[TraceStep],
) -> Vec<TraceStep> {
    steps
        .iter()
        .map(|s| TraceStep {
            element: view.surviving()[s.element - 1],
            score: s.score,
        })
        .collect()
}

/// Sized adapters so possibly-unsized callees coerce to trait objects.
struct ObjectRef<'a, F: SetFunction + ?Sized>(&'a F);

impl<F: SetFunction + ?Sized> SetFunction for ObjectRef<'_, F> {
    fn ground_size(&self) -> usize {
        self.0.ground_size()
    }
    fn value(&self, s: Subset) -> f64 {
        self.0.value(s)
    }
}

struct MatroidRef<'a, M: Matroid + ?Sized>(&'a M);

impl<M: Matroid + ?Sized> Matroid for MatroidRef<'_, M> {
    fn ground_size(&self) -> usize {
        self.0.ground_size()
    }
    fn is_feasible(&self, s: Subset) -> bool {
        self.0.is_feasible(s)
    }
    fn rank_hint(&self) -> Option<usize> {
        self.0.rank_hint()
    }
}

/// Greedy for ratio minimization `f/g`: repeatedly add the element
/// minimizing `f(S∪{v})/g(S∪{v})` among those keeping `g` positive, and
/// return the best ratio seen over all nonempty iterates.
pub fn ratio_greedy(
    f: &(impl SetFunction + ?Sized),
    g: &(impl SetFunction + ?Sized),
) -> Result<RunTrace> {
    let n = f.ground_size();
    if g.ground_size() != n {
        return Err(Error::argument(
            "numerator/denominator sizes differ".to_string(),
        ));
    }
    let mut current = Subset::EMPTY;
    let mut steps = Vec::new();
    let mut best: Option<(f64, Subset)> = None;
    loop {
        let mut pick: Option<(f64, Element)> = None;
        for v in 1..=n {
            if current.contains(v) {
                continue;
            }
            let s = current.with(v);
            let gv = g.value(s);
            if gv <= 0.0 {
                continue;
            }
            let ratio = f.value(s) / gv;
            let better = match pick {
                None => true,
                Some((r, _)) => ratio < r,
            };
            if better {
                pick = Some((ratio, v));
            }
        }
        match pick {
            None => break,
            Some((ratio, v)) => {
                current = current.with(v);
                steps.push(TraceStep {
                    element: v,
                    score: ratio,
                });
                let improves = match best {
                    None => true,
                    Some((r, _)) => ratio < r,
                };
                if improves {
                    best = Some((ratio, current));
                }
            }
        }
    }
    let (value, chosen) = best.ok_or_else(|| {
        Error::domain("denominator vanishes on every nonempty candidate".to_string())
    })?;
    Ok(RunTrace {
        chosen,
        value,
        steps,
        subproblem: None,
    })
}

/// Which functions the split certificate is taken over; the mechanics of
/// the run are identical (both functions are restricted to the same piece).
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum RatioSplitMode {
    /// Split budget covers the numerator only.
    SplitNumerator,
    /// Split budget covers numerator and denominator jointly.
    SplitBoth,
}

/// Split meta-algorithm for ratio minimization: run [`ratio_greedy`] on the
/// restrictions of `f` and `g` at every flip set of size `r`, plus once
/// unrestricted, evaluating candidates as `f(C∪A)/g(C∪A)` on the original
/// pair; candidates with a nonpositive denominator are skipped.
pub fn r_split_ratio<F, G>(f: &F, g: &G, r: usize, _mode: RatioSplitMode) -> Result<RunTrace>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    let n = f.ground_size();
    if g.ground_size() != n {
        return Err(Error::argument(
            "numerator/denominator sizes differ".to_string(),
        ));
    }
    if r > n {
        return Err(Error::argument(format!("split size r={r} exceeds n={n}")));
    }
    let plain = ratio_greedy(f, g)?;

    let flip_sets: Vec<Subset> = masks_of_size(n, r).collect();
    let best_split = flip_sets
        .par_iter()
        .map(|&b| {
            let mut local: Option<RunTrace> = None;
            for a in b.subsets() {
                let fv = Restriction::new(f, a, b)?;
                let gv = Restriction::new(g, a, b)?;
                if fv.ground_size() == 0 {
                    continue;
                }
                let t = match ratio_greedy(&fv, &gv) {
                    Ok(t) => t,
                    // A degenerate piece (denominator vanishing throughout)
                    // simply contributes no candidate.
                    Err(Error::Domain(_)) => continue,
                    Err(e) => return Err(e),
                };
                let chosen = fv.lift_full(t.chosen);
                let denom = g.value(chosen);
                if denom <= 0.0 {
                    continue;
                }
                let cand = RunTrace {
                    chosen,
                    value: f.value(chosen) / denom,
                    steps: lift_steps(&fv, &t.steps),
                    subproblem: Some((a, b)),
                };
                local = Some(pick(local, cand, better_min));
            }
            Ok(local)
        })
        .try_reduce(
            || None,
            |a, b| {
                Ok(match (a, b) {
                    (Some(x), Some(y)) => Some(if better_min(&x, &y) { x } else { y }),
                    (x, None) => x,
                    (None, y) => y,
                })
            },
        )?;

    Ok(match best_split {
        Some(split) if better_min(&split, &plain) => split,
        _ => plain,
    })
}

/// Exhaustive size caps: full subset scan and cardinality-pruned scan.
const EXHAUSTIVE_FULL_MAX_N: usize = 16;
const EXHAUSTIVE_PRUNED_MAX_N: usize = 20;

/// True optimum of constrained maximization by enumeration
/// (ties: smallest mask).
pub fn exhaustive_max(
    f: &(impl SetFunction + ?Sized),
    matroid: &(impl Matroid + ?Sized),
) -> Result<RunTrace> {
    let n = f.ground_size();
    let mut best: Option<(f64, Subset)> = None;
    let mut consider = |s: Subset| {
        if !matroid.is_feasible(s) {
            return;
        }
        let v = f.value(s);
        let better = match best {
            None => true,
            Some((bv, bs)) => v > bv || (v == bv && s < bs),
        };
        if better {
            best = Some((v, s));
        }
    };
    match matroid.rank_hint() {
        Some(m) if n <= EXHAUSTIVE_PRUNED_MAX_N => {
            for k in 0..=m.min(n) {
                for s in masks_of_size(n, k) {
                    consider(s);
                }
            }
        }
        _ if n <= EXHAUSTIVE_FULL_MAX_N => {
            for s in crate::lattice::all_masks(n) {
                consider(s);
            }
        }
        _ => {
            return Err(Error::size_guard(format!(
                "exhaustive maximization refuses n={n} without cardinality pruning"
            )))
        }
    }
    let (value, chosen) = best.expect("the empty set is always feasible");
    Ok(RunTrace {
        chosen,
        value,
        steps: Vec::new(),
        subproblem: None,
    })
}

/// True minimum of `f/g` over nonempty sets with positive denominator.
pub fn exhaustive_ratio_min(
    f: &(impl SetFunction + ?Sized),
    g: &(impl SetFunction + ?Sized),
) -> Result<RunTrace> {
    let n = f.ground_size();
    if g.ground_size() != n {
        return Err(Error::argument(
            "numerator/denominator sizes differ".to_string(),
        ));
    }
    if n > EXHAUSTIVE_FULL_MAX_N {
        return Err(Error::size_guard(format!(
            "exhaustive ratio search refuses n={n} > {EXHAUSTIVE_FULL_MAX_N}"
        )));
    }
    let mut best: Option<(f64, Subset)> = None;
    for s in crate::lattice::all_masks(n).skip(1) {
        let gv = g.value(s);
        if gv <= 0.0 {
            continue;
        }
        let ratio = f.value(s) / gv;
        let better = match best {
            None => true,
            Some((bv, bs)) => ratio < bv || (ratio == bv && s < bs),
        };
        if better {
            best = Some((ratio, s));
        }
    }
    let (value, chosen) = best
        .ok_or_else(|| Error::domain("denominator vanishes on every nonempty set".to_string()))?;
    Ok(RunTrace {
        chosen,
        value,
        steps: Vec::new(),
        subproblem: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{modular_from_weights, SetFunctionTable};

    /// Coverage 1→{a,b}, 2→{b,c}, 3→{d}.
    fn coverage_table() -> SetFunctionTable {
        let sets: [u8; 3] = [0b0011, 0b0110, 0b1000];
        SetFunctionTable::from_fn(3, |s| {
            let mut covered = 0u8;
            for e in s.elements() {
                covered |= sets[e - 1];
            }
            covered.count_ones() as f64
        })
        .unwrap()
    }

    #[test]
    fn greedy_solves_small_coverage() {
        let f = coverage_table();
        let m = CardinalityMatroid::new(3, 2);
        let t = greedy(&f, &m);
        assert_eq!(t.chosen, Subset::from_elements(&[1, 2]));
        assert_eq!(t.value, 3.0);
        let opt = exhaustive_max(&f, &m).unwrap();
        assert_eq!(t.value, opt.value);
    }

    #[test]
    fn greedy_on_modular_takes_top_weights() {
        let f = modular_from_weights(&[1.0, 9.0, 4.0, 7.0], 0.0).unwrap();
        let m = CardinalityMatroid::new(4, 2);
        let t = greedy(&f, &m);
        assert_eq!(t.chosen, Subset::from_elements(&[2, 4]));
        assert_eq!(t.value, 16.0);
        assert_eq!(t.steps[0].element, 2);
        assert_eq!(t.steps[1].element, 4);
    }

    #[test]
    fn seeded_greedy_edge_cases() {
        let f = coverage_table();
        let m = CardinalityMatroid::new(3, 2);
        let plain = greedy(&f, &m);
        let seeded = seeded_greedy(&f, &m, Subset::EMPTY).unwrap();
        assert_eq!(plain.chosen, seeded.chosen);
        // Re-seeding with a capacity-saturated output returns it unchanged.
        let again = seeded_greedy(&f, &m, plain.chosen).unwrap();
        assert_eq!(again.chosen, plain.chosen);
        assert!(seeded_greedy(&f, &m, Subset::full(3)).is_err());
    }

    #[test]
    fn split_zero_matches_plain_run() {
        let f = coverage_table();
        let m = CardinalityMatroid::new(3, 2);
        let t = r_split(&f, 0, &m, |f, m| greedy(f, m)).unwrap();
        let plain = greedy(&f, &m);
        assert_eq!(t.chosen, plain.chosen);
        assert_eq!(t.value, plain.value);
    }

    #[test]
    fn split_dominates_plain_greedy() {
        // Supermodular bait: greedy's first pick is suboptimal.
        let f = SetFunctionTable::from_fn(4, |s| {
            let base: f64 = s.elements().map(|e| [2.1, 1.0, 1.0, 0.2][e - 1]).sum();
            let bonus = if s.contains(2) && s.contains(3) {
                3.0
            } else {
                0.0
            };
            base + bonus
        })
        .unwrap();
        let m = CardinalityMatroid::new(4, 2);
        let plain = greedy(&f, &m);
        let opt = exhaustive_max(&f, &m).unwrap();
        assert!(plain.value < opt.value, "instance must fool plain greedy");
        for r in 0..=2 {
            let t = r_split(&f, r, &m, |f, m| greedy(f, m)).unwrap();
            assert!(t.value >= plain.value);
            if r >= 1 {
                assert_eq!(t.value, opt.value);
            }
        }
    }

    #[test]
    fn split_full_size_is_exhaustive() {
        let f = coverage_table();
        let m = CardinalityMatroid::new(3, 2);
        let t = r_split(&f, 3, &m, |f, m| greedy(f, m)).unwrap();
        let opt = exhaustive_max(&f, &m).unwrap();
        assert_eq!(t.value, opt.value);
    }

    #[test]
    fn subproblem_constraint_is_contraction() {
        // With m = 1, a subproblem fixing A = {e} admits no further element.
        let f = coverage_table();
        let m = CardinalityMatroid::new(3, 1);
        let t = r_split(&f, 1, &m, |f, m| greedy(f, m)).unwrap();
        assert!(m.is_feasible(t.chosen));
        assert_eq!(t.chosen.len(), 1);
    }

    #[test]
    fn ratio_greedy_modular_pair_is_optimal() {
        let f = modular_from_weights(&[2.0, 3.0], 0.0).unwrap();
        let g = modular_from_weights(&[1.0, 3.0], 0.0).unwrap();
        let t = ratio_greedy(&f, &g).unwrap();
        assert_eq!(t.chosen, Subset::singleton(2));
        assert_eq!(t.value, 1.0);
        let opt = exhaustive_ratio_min(&f, &g).unwrap();
        assert_eq!(t.value, opt.value);
    }

    #[test]
    fn ratio_greedy_identical_pair() {
        let f = modular_from_weights(&[2.0, 5.0, 1.0], 0.0).unwrap();
        let t = ratio_greedy(&f, &f).unwrap();
        assert_eq!(t.value, 1.0);
        assert_eq!(t.chosen.len(), 1);
    }

    #[test]
    fn ratio_greedy_rejects_vanishing_denominator() {
        let f = modular_from_weights(&[1.0, 1.0], 0.0).unwrap();
        let g = SetFunctionTable::zeros(2).unwrap();
        assert!(matches!(ratio_greedy(&f, &g), Err(Error::Domain(_))));
    }

    #[test]
    fn split_ratio_dominates_plain() {
        let f = SetFunctionTable::from_fn(3, |s| {
            let k = s.len() as f64;
            k * k * 0.8 + 0.4 * f64::from(s.contains(1))
        })
        .unwrap();
        let g = modular_from_weights(&[1.0, 1.2, 0.9], 0.0).unwrap();
        let plain = ratio_greedy(&f, &g).unwrap();
        for r in 0..=2 {
            let t = r_split_ratio(&f, &g, r, RatioSplitMode::SplitNumerator).unwrap();
            assert!(t.value <= plain.value);
        }
    }

    #[test]
    fn exhaustive_oracles_basics() {
        let f = modular_from_weights(&[3.0, 1.0, 2.0], 0.0).unwrap();
        let m = CardinalityMatroid::new(3, 2);
        let t = exhaustive_max(&f, &m).unwrap();
        assert_eq!(t.chosen, Subset::from_elements(&[1, 3]));
        let r = exhaustive_ratio_min(&f, &f).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn predicate_matroid_rejects_missing_empty_set() {
        assert!(PredicateMatroid::new(3, |s: Subset| !s.is_empty()).is_err());
        let partition = PredicateMatroid::new(4, |s: Subset| {
            (s & Subset::from_elements(&[1, 2])).len() <= 1
                && (s & Subset::from_elements(&[3, 4])).len() <= 1
        })
        .unwrap();
        let f = modular_from_weights(&[4.0, 3.0, 2.0, 1.0], 0.0).unwrap();
        let t = greedy(&f, &partition);
        assert_eq!(t.chosen, Subset::from_elements(&[1, 3]));
    }

    #[test]
    fn traces_are_deterministic() {
        let f = coverage_table();
        let m = CardinalityMatroid::new(3, 2);
        let a = r_split(&f, 1, &m, |f, m| greedy(f, m)).unwrap();
        let b = r_split(&f, 1, &m, |f, m| greedy(f, m)).unwrap();
        assert_eq!(a.chosen, b.chosen);
        assert_eq!(a.value, b.value);
        assert_eq!(a.subproblem, b.subproblem);
    }
}
