//! Least-squares projection onto pattern cones.
//!
//! The cones of interest are cut out by up to `C(n,2)·2^(n−2)` imset rows,
//! so the solver keeps an active set: an oracle surfaces violated rows, a
//! cyclic pass applies the exact quadratic Bregman step to each active row
//! while maintaining one nonnegative dual correction per row, and rows whose
//! correction returns to zero are forgotten. For the quadratic objective
//! `½‖x − f‖²` the step against an oriented row `b` (with `‖b‖² = 4`) is
//! `θ = −⟨b,x⟩/4`, applied as `c = max(θ, −z)` so that duals never go
//! negative; the iterate always satisfies `x = f + Σ z·b`.
//!
//! Convergence is declared when a full scan shows every kept row within the
//! violation tolerance and the last sweep moved the iterate less than the
//! step tolerance. A final deterministic sweep certifies feasibility of the
//! returned table even when the random oracle was used.

use crate::cones::{pair_count, PairIndex, XiPattern};
use crate::error::{Error, Result};
use crate::lattice::{SetFunctionTable, Subset};
use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};

/// How violated rows are discovered each sweep.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum OracleKind {
    /// Scan every kept row.
    Deterministic,
    /// Per pair, sample `samples_per_pair` contexts without replacement and
    /// report the violated ones; every violated row has positive probability
    /// of being returned.
    Random,
}

/// Solver options. `samples_per_pair` defaults to `5n` when unset.
///
/// Both tolerances are interpreted relative to the target's scale
/// `max(1, ‖f‖∞)`: a fixed absolute step tolerance would sit below one ulp
/// on large-magnitude tables and could never be met. On tables of unit
/// scale the stated values apply verbatim.
#[derive(Copy, Clone, Debug)]
pub struct ProjectionOptions {
    pub oracle: OracleKind,
    pub samples_per_pair: Option<usize>,
    pub tol_violation: f64,
    pub tol_step: f64,
    pub max_iterations: usize,
    pub rng_seed: u64,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        ProjectionOptions {
            oracle: OracleKind::Deterministic,
            samples_per_pair: None,
            tol_violation: 1e-8,
            tol_step: 1e-10,
            max_iterations: 100_000,
            rng_seed: 0,
        }
    }
}

impl ProjectionOptions {
    pub fn validate(&self) -> Result<()> {
        if self.tol_violation <= 0.0 || self.tol_step <= 0.0 {
            return Err(Error::argument(
                "projection tolerances must be > 0".to_string(),
            ));
        }
        Ok(())
    }

    fn effective_samples(&self, n: usize) -> usize {
        self.samples_per_pair.unwrap_or(5 * n).max(1)
    }
}

/// Identity of one imset row: (pair rank, context mask). Duals are keyed by
/// this id so they persist across forget/re-add cycles.
type RowId = (u32, u32);

/// Final solver state: iterate, per-row dual corrections, active list.
#[derive(Clone, Debug)]
pub struct ProjectionState {
    pub iterate: Vec<f64>,
    /// Dual correction per ever-touched row with a nonzero value.
    pub duals: Vec<(PairIndex, Subset, f64)>,
    /// Rows still on the active list at termination.
    pub active: Vec<(PairIndex, Subset)>,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct ProjectionReport {
    pub iterations: usize,
    pub max_violation: f64,
    pub distance: f64,
    pub converged: bool,
}

struct ConeRows {
    n: usize,
    /// (pair, oriented sign, complement mask of the pair).
    pairs: Vec<(PairIndex, f64, u32)>,
}

impl ConeRows {
    fn new(xi: &XiPattern) -> ConeRows {
        let n = xi.n();
        let full = Subset::full(n).bits();
        let pairs = xi
            .nonzero_pairs()
            .into_iter()
            .map(|(p, s)| {
                let comp =
                    full & !(Subset::singleton(p.i()).bits() | Subset::singleton(p.j()).bits());
                (p, f64::from(s), comp)
            })
            .collect();
        ConeRows { n, pairs }
    }

    #[inline]
    fn indices(pair: PairIndex, context: u32) -> [usize; 4] {
        let bi = 1u32 << (pair.i() - 1);
        let bj = 1u32 << (pair.j() - 1);
        [
            context as usize,
            (context | bi | bj) as usize,
            (context | bi) as usize,
            (context | bj) as usize,
        ]
    }

    /// Oriented row value `sign · (x[z] + x[zij] − x[zi] − x[zj])`.
    #[inline]
    fn oriented(x: &[f64], pair: PairIndex, context: u32, sign: f64) -> f64 {
        let [a, b, c, d] = Self::indices(pair, context);
        sign * (x[a] + x[b] - x[c] - x[d])
    }

    /// Worst violation `max(0, −min oriented row)` over all kept rows.
    fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for &(pair, sign, comp) in &self.pairs {
            for context in Subset::from_bits(comp).subsets() {
                let v = Self::oriented(x, pair, context.bits(), sign);
                worst = worst.max(-v);
            }
        }
        worst
    }

    fn violated_deterministic(&self, x: &[f64], tol: f64, out: &mut Vec<RowId>) {
        for &(pair, sign, comp) in &self.pairs {
            let rank = pair.rank(self.n) as u32;
            for context in Subset::from_bits(comp).subsets() {
                if Self::oriented(x, pair, context.bits(), sign) < -tol {
                    out.push((rank, context.bits()));
                }
            }
        }
    }

    fn violated_random(
        &self,
        x: &[f64],
        tol: f64,
        per_pair: usize,
        rng: &mut ChaCha8Rng,
        out: &mut Vec<RowId>,
    ) {
        let total = 1usize << (self.n - 2);
        let k = per_pair.min(total);
        for &(pair, sign, comp) in &self.pairs {
            let rank = pair.rank(self.n) as u32;
            if k == total {
                for context in Subset::from_bits(comp).subsets() {
                    if Self::oriented(x, pair, context.bits(), sign) < -tol {
                        out.push((rank, context.bits()));
                    }
                }
                continue;
            }
            for idx in sample_indices(rng, total, k) {
                let context = spread_bits(idx as u32, comp);
                if Self::oriented(x, pair, context, sign) < -tol {
                    out.push((rank, context));
                }
            }
        }
    }
}

/// Distribute the low bits of `idx` over the set bits of `mask`, in
/// ascending bit order; enumerates context masks from flat sample indices.
fn spread_bits(idx: u32, mask: u32) -> u32 {
    let mut out = 0u32;
    let mut rest = mask;
    let mut take = idx;
    while rest != 0 {
        let bit = rest & rest.wrapping_neg();
        if take & 1 != 0 {
            out |= bit;
        }
        take >>= 1;
        rest &= rest - 1;
    }
    out
}

/// Violated-row oracle as a standalone operation: returns the violated rows
/// (with their pattern orientation) that one oracle call would surface.
pub fn violated_oracle(
    x: &SetFunctionTable,
    xi: &XiPattern,
    opts: &ProjectionOptions,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<crate::cones::ImsetConstraint>> {
    if x.n() != xi.n() {
        return Err(Error::argument("pattern/table size mismatch".to_string()));
    }
    let rows = ConeRows::new(xi);
    let mut found = Vec::new();
    match opts.oracle {
        OracleKind::Deterministic => {
            rows.violated_deterministic(x.values(), opts.tol_violation, &mut found)
        }
        OracleKind::Random => rows.violated_random(
            x.values(),
            opts.tol_violation,
            opts.effective_samples(x.n()),
            rng,
            &mut found,
        ),
    }
    let pairs = PairIndex::all(x.n());
    Ok(found
        .into_iter()
        .map(|(rank, context)| {
            let pair = pairs[rank as usize];
            crate::cones::ImsetConstraint {
                pair,
                context: Subset::from_bits(context),
                orientation: xi.get(pair),
            }
        })
        .collect())
}

/// Euclidean projection of `f` onto the pattern cone.
///
/// Returns the projected table and a report; `report.converged` is false
/// when the iteration budget ran out with violations above tolerance, in
/// which case the best iterate is still returned.
pub fn project_onto_cone(
    f: &SetFunctionTable,
    xi: &XiPattern,
    opts: &ProjectionOptions,
) -> Result<(SetFunctionTable, ProjectionReport)> {
    let (table, report, _) = project_with_state(f, xi, opts)?;
    Ok((table, report))
}

/// As [`project_onto_cone`], additionally returning the final solver state
/// (duals and active list) for certification.
pub fn project_with_state(
    f: &SetFunctionTable,
    xi: &XiPattern,
    opts: &ProjectionOptions,
) -> Result<(SetFunctionTable, ProjectionReport, ProjectionState)> {
    opts.validate()?;
    if f.n() != xi.n() {
        return Err(Error::argument("pattern/table size mismatch".to_string()));
    }
    let n = f.n();
    let rows = ConeRows::new(xi);
    let signs: Vec<f64> = {
        let mut by_rank = vec![0.0f64; pair_count(n)];
        for &(pair, sign, _) in &rows.pairs {
            by_rank[pair.rank(n)] = sign;
        }
        by_rank
    };
    let scale = f.values().iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let tol_violation = opts.tol_violation * scale;
    let tol_step = opts.tol_step * scale;

    let mut x: Vec<f64> = f.values().to_vec();
    let mut prev = vec![0.0f64; x.len()];
    let mut duals: BTreeMap<RowId, f64> = BTreeMap::new();
    let mut active: BTreeSet<RowId> = BTreeSet::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let pairs = PairIndex::all(n);
    let mut found = Vec::new();
    let mut iterations = 0usize;
    let mut converged = false;

    while iterations < opts.max_iterations {
        iterations += 1;
        found.clear();
        match opts.oracle {
            OracleKind::Deterministic => rows.violated_deterministic(&x, tol_violation, &mut found),
            OracleKind::Random => rows.violated_random(
                &x,
                tol_violation,
                opts.effective_samples(n),
                &mut rng,
                &mut found,
            ),
        }
        active.extend(found.iter().copied());

        prev.copy_from_slice(&x);
        sweep(&mut x, &mut duals, &active, &pairs, &signs);
        forget(&mut duals, &mut active);

        let step = x
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let violation = rows.max_violation(&x);
        if violation <= tol_violation && step <= tol_step {
            converged = true;
            break;
        }
    }

    if converged {
        // Certifying polish: one deterministic sweep over everything found
        // by a full scan, so the result is feasible to tolerance regardless
        // of which oracle drove the iteration.
        found.clear();
        rows.violated_deterministic(&x, tol_violation, &mut found);
        active.extend(found.iter().copied());
        sweep(&mut x, &mut duals, &active, &pairs, &signs);
        forget(&mut duals, &mut active);
    }

    let max_violation = rows.max_violation(&x);
    let table = SetFunctionTable::new(n, x.clone())?;
    let distance = table.distance(f)?;
    let report = ProjectionReport {
        iterations,
        max_violation,
        distance,
        converged: converged && max_violation <= tol_violation,
    };
    let state = ProjectionState {
        iterate: x,
        duals: duals
            .iter()
            .map(|(&(rank, ctx), &z)| (pairs[rank as usize], Subset::from_bits(ctx), z))
            .collect(),
        active: active
            .iter()
            .map(|&(rank, ctx)| (pairs[rank as usize], Subset::from_bits(ctx)))
            .collect(),
        iterations,
    };
    Ok((table, report, state))
}

/// One cyclic pass of exact quadratic Bregman steps over the active rows.
fn sweep(
    x: &mut [f64],
    duals: &mut BTreeMap<RowId, f64>,
    active: &BTreeSet<RowId>,
    pairs: &[PairIndex],
    signs: &[f64],
) {
    for &(rank, context) in active {
        let pair = pairs[rank as usize];
        let sign = signs[rank as usize];
        let [a, b, c, d] = ConeRows::indices(pair, context);
        let value = sign * (x[a] + x[b] - x[c] - x[d]);
        let z = duals.entry((rank, context)).or_insert(0.0);
        // Full projection when violated, relaxation bounded by the dual
        // when slack; duals stay ≥ 0 and x − f stays equal to Σ z·row.
        let step = (-value / 4.0).max(-*z);
        if step != 0.0 {
            let delta = step * sign;
            x[a] += delta;
            x[b] += delta;
            x[c] -= delta;
            x[d] -= delta;
            *z += step;
        }
    }
}

fn forget(duals: &mut BTreeMap<RowId, f64>, active: &mut BTreeSet<RowId>) {
    active.retain(|id| duals.get(id).copied().unwrap_or(0.0) != 0.0);
    duals.retain(|_, z| *z != 0.0);
}

/// Result of the best rank-`r` cone-sum approximation search.
#[derive(Clone, Debug)]
pub struct RankApproximation {
    pub table: SetFunctionTable,
    /// Flip set `B` of the winning cone sum.
    pub flip_set: Subset,
    /// `‖f − g‖₂ / ‖f‖₂` (zero when `‖f‖ = 0`).
    pub rel_error: f64,
    pub iterations: usize,
    /// False when any candidate projection hit the iteration budget.
    pub all_converged: bool,
}

/// Best approximation of `f` among functions splitting into submodular
/// pieces at some `r`-element flip set: for every `B` with `|B| = r`,
/// project onto the cone keeping `row ≤ 0` on all pairs outside `B`, and
/// return the projection with the least error (ties: smallest `B` mask).
pub fn best_elementary_rank_r_approximation(
    f: &SetFunctionTable,
    r: usize,
    opts: &ProjectionOptions,
) -> Result<RankApproximation> {
    let n = f.n();
    if r >= n {
        return Err(Error::argument(format!(
            "flip-set size must satisfy 0 ≤ r ≤ n−1, got r={r} for n={n}"
        )));
    }
    let norm = f.norm();
    let candidates: Vec<Subset> = crate::lattice::masks_of_size(n, r).collect();
    let mut results: Vec<RankApproximation> = candidates
        .par_iter()
        .map(|&b| {
            let xi = XiPattern::submodular_outside(n, b);
            let (table, report) = project_onto_cone(f, &xi, opts)?;
            let rel_error = if norm > 0.0 {
                report.distance / norm
            } else {
                0.0
            };
            Ok(RankApproximation {
                table,
                flip_set: b,
                rel_error,
                iterations: report.iterations,
                all_converged: report.converged,
            })
        })
        .collect::<Result<_>>()?;
    let all_converged = results.iter().all(|r| r.all_converged);
    results.sort_by(|a, b| {
        a.rel_error
            .partial_cmp(&b.rel_error)
            .unwrap()
            .then(a.flip_set.cmp(&b.flip_set))
    });
    let mut best = results.into_iter().next().expect("at least one flip set");
    best.all_converged = all_converged;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::{cone_membership, imset_evaluate};
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_element_halfspace_projection() {
        let f = SetFunctionTable::new(2, vec![0.0, 1.0, 1.0, 4.0]).unwrap();
        let xi = XiPattern::submodular(2);
        let (g, report) = project_onto_cone(&f, &xi, &ProjectionOptions::default()).unwrap();
        let expect = [-0.5, 1.5, 1.5, 3.5];
        for (got, want) in g.values().iter().zip(expect) {
            assert_abs_diff_eq!(got, &want, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(report.distance, 1.0, epsilon = 1e-12);
        assert!(report.converged);
    }

    #[test]
    fn member_is_fixed_point() {
        let f = SetFunctionTable::from_fn(3, |s| -((s.len() * s.len()) as f64)).unwrap();
        let xi = XiPattern::submodular(3);
        let (g, report) = project_onto_cone(&f, &xi, &ProjectionOptions::default()).unwrap();
        assert_eq!(g.values(), f.values());
        assert_eq!(report.distance, 0.0);
    }

    #[test]
    fn empty_pattern_is_identity() {
        let f = SetFunctionTable::new(2, vec![3.0, -1.0, 0.5, 9.0]).unwrap();
        let (g, report) =
            project_onto_cone(&f, &XiPattern::zero(2), &ProjectionOptions::default()).unwrap();
        assert_eq!(g.values(), f.values());
        assert!(report.converged);
        assert_eq!(report.distance, 0.0);
    }

    #[test]
    fn oracle_respects_membership() {
        let f = SetFunctionTable::from_fn(3, |s| -((s.len() * s.len()) as f64)).unwrap();
        let xi = XiPattern::submodular(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let opts = ProjectionOptions::default();
        assert!(violated_oracle(&f, &xi, &opts, &mut rng)
            .unwrap()
            .is_empty());

        let g = SetFunctionTable::new(2, vec![0.0, 1.0, 1.0, 4.0]).unwrap();
        let hit = violated_oracle(&g, &XiPattern::submodular(2), &opts, &mut rng).unwrap();
        assert_eq!(hit.len(), 1);
        assert_eq!(hit[0].orientation, -1);
    }

    #[test]
    fn random_oracle_with_full_budget_matches_deterministic() {
        let f = SetFunctionTable::from_fn(4, |s| (s.bits() as f64).sin() * 3.0).unwrap();
        let xi = XiPattern::supermodular(4);
        let det = ProjectionOptions::default();
        let rnd = ProjectionOptions {
            oracle: OracleKind::Random,
            samples_per_pair: Some(1 << 2),
            ..det
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut a = violated_oracle(&f, &xi, &det, &mut rng).unwrap();
        let mut b = violated_oracle(&f, &xi, &rnd, &mut rng).unwrap();
        let key = |c: &crate::cones::ImsetConstraint| (c.pair, c.context);
        a.sort_by_key(key);
        b.sort_by_key(key);
        assert_eq!(a, b);
    }

    #[test]
    fn projection_satisfies_kkt_on_random_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        use rand::Rng;
        for trial in 0..10 {
            let f = SetFunctionTable::from_fn(4, |_| rng.random_range(-2.0..2.0)).unwrap();
            let xi = XiPattern::submodular(4);
            let opts = ProjectionOptions {
                rng_seed: trial,
                ..ProjectionOptions::default()
            };
            let (g, report, state) = project_with_state(&f, &xi, &opts).unwrap();
            assert!(report.converged, "trial {trial} did not converge");
            assert!(cone_membership(&g, &xi, 1e-6).unwrap());
            // Stationarity: g − f = Σ z · (oriented row indicator).
            let mut recon = f.values().to_vec();
            for &(pair, context, z) in &state.duals {
                assert!(z >= 0.0);
                let sign = f64::from(xi.get(pair));
                let [a, b, c, d] = ConeRows::indices(pair, context.bits());
                recon[a] += z * sign;
                recon[b] += z * sign;
                recon[c] -= z * sign;
                recon[d] -= z * sign;
            }
            for (got, want) in recon.iter().zip(g.values()) {
                assert_abs_diff_eq!(got, want, epsilon = 1e-9);
            }
            // Complementarity per active row.
            for &(pair, context, z) in &state.duals {
                let sign = f64::from(xi.get(pair));
                let v = ConeRows::oriented(g.values(), pair, context.bits(), sign);
                assert!((z * v).abs() <= 1e-6, "trial {trial}: z·row = {}", z * v);
            }
            // Idempotence.
            let (g2, _) = project_onto_cone(&g, &xi, &opts).unwrap();
            for (a, b) in g2.values().iter().zip(g.values()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn random_oracle_converges_and_is_seed_reproducible() {
        let f = SetFunctionTable::from_fn(4, |s| (s.bits().wrapping_mul(2654435761) % 17) as f64)
            .unwrap();
        let xi = XiPattern::submodular(4);
        let opts = ProjectionOptions {
            oracle: OracleKind::Random,
            rng_seed: 99,
            ..ProjectionOptions::default()
        };
        let (g1, r1) = project_onto_cone(&f, &xi, &opts).unwrap();
        let (g2, _) = project_onto_cone(&f, &xi, &opts).unwrap();
        assert!(r1.converged);
        assert_eq!(g1.values(), g2.values());
        assert!(cone_membership(&g1, &xi, 1e-6).unwrap());
    }

    #[test]
    fn rank_approximation_error_is_monotone_in_r() {
        let f = SetFunctionTable::from_fn(4, |s| {
            let b = s.bits() as f64;
            (b * 0.7).cos() * 2.0 + b * 0.05
        })
        .unwrap();
        let opts = ProjectionOptions::default();
        let mut last = f64::INFINITY;
        for r in 0..4 {
            let approx = best_elementary_rank_r_approximation(&f, r, &opts).unwrap();
            assert!(approx.all_converged);
            assert!(
                approx.rel_error <= last + 1e-9,
                "rel_error grew at r={r}: {} > {last}",
                approx.rel_error
            );
            last = approx.rel_error;
        }
    }

    #[test]
    fn rank_approximation_of_member_is_exact() {
        let f = SetFunctionTable::from_fn(3, |s| -((s.len() * s.len()) as f64)).unwrap();
        let approx =
            best_elementary_rank_r_approximation(&f, 0, &ProjectionOptions::default()).unwrap();
        assert_eq!(approx.rel_error, 0.0);
        assert_eq!(approx.flip_set, Subset::EMPTY);
    }

    #[test]
    fn spread_bits_enumerates_contexts() {
        // mask 0b1010: index bits land on positions 1 and 3.
        assert_eq!(spread_bits(0b00, 0b1010), 0b0000);
        assert_eq!(spread_bits(0b01, 0b1010), 0b0010);
        assert_eq!(spread_bits(0b10, 0b1010), 0b1000);
        assert_eq!(spread_bits(0b11, 0b1010), 0b1010);
    }

    #[test]
    fn projected_interior_witness_stays_put() {
        let mut xi = XiPattern::zero(3);
        xi.set(PairIndex::new(1, 3).unwrap(), 1);
        let w = crate::cones::witness_interior(&xi).unwrap();
        let (g, report) = project_onto_cone(&w, &xi, &ProjectionOptions::default()).unwrap();
        assert_eq!(g.values(), w.values());
        assert!(report.converged);
        assert!(imset_evaluate(&g, 1, 3).unwrap().iter().all(|&v| v > 0.0));
    }
}
