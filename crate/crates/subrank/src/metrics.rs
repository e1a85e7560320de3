//! Curvature and submodularity-ratio quantities, plus the closed-form
//! guarantee bounds they plug into.
//!
//! Everything here is an exact exponential sweep with a hard size guard —
//! sampled estimates would invalidate certified optimization bounds. Triples
//! whose denominator vanishes impose no constraint and are skipped.

use crate::error::{Error, Result};
use crate::lattice::{SetFunctionTable, Subset};
use serde::Serialize;

/// Size cap for the exact global curvature/ratio sweeps.
pub const METRIC_SWEEP_MAX_N: usize = 12;
/// Size cap for the nested flip-set sweeps of [`alpha_r`] / [`gamma_r`].
pub const RESTRICTED_SWEEP_MAX_N: usize = 10;

fn guard(n: usize, cap: usize, what: &str) -> Result<()> {
    if n > cap {
        Err(Error::size_guard(format!(
            "exact {what} refuses n={n} > {cap}"
        )))
    } else {
        Ok(())
    }
}

/// Scalar deviations of a table from modular/submodular behaviour.
#[derive(Clone, Debug, Serialize)]
pub struct MetricReport {
    pub total_curvature: f64,
    pub generalized_curvature: f64,
    pub submodularity_ratio: f64,
    pub generalized_inverse_curvature: f64,
    /// Curvature with respect to the full ground set.
    pub curvature_wrt_full: f64,
}

/// All five metrics of `f` in one call.
pub fn metric_report(f: &SetFunctionTable) -> Result<MetricReport> {
    let full = f.full_mask();
    Ok(MetricReport {
        total_curvature: total_curvature(f)?,
        generalized_curvature: generalized_curvature(f)?,
        submodularity_ratio: submodularity_ratio(f, full, f.n())?,
        generalized_inverse_curvature: generalized_inverse_curvature(f)?,
        curvature_wrt_full: curvature_wrt(f, full)?,
    })
}

/// Total curvature: `max_e (Δ(e|∅) − Δ(e|V∖{e})) / Δ(e|∅)` over elements
/// with `Δ(e|∅) > 0`; zero when no element qualifies.
pub fn total_curvature(f: &SetFunctionTable) -> Result<f64> {
    let n = f.n();
    let full = f.full_mask();
    let mut worst: Option<f64> = None;
    for e in 1..=n {
        let at_empty = f.discrete_derivative(e, Subset::EMPTY)?;
        if at_empty <= 0.0 {
            continue;
        }
        let at_rest = f.discrete_derivative(e, full.without(e))?;
        let v = (at_empty - at_rest) / at_empty;
        worst = Some(worst.map_or(v, |w: f64| w.max(v)));
    }
    Ok(worst.unwrap_or(0.0))
}

/// Submodularity ratio with respect to `X` and cardinality cap `m`:
/// the minimum of `Σ_{e∈S} Δ(e|T) / Δ(S|T)` over `T ⊆ X` and nonempty
/// `S ⊆ V ∖ T` with `|S| ≤ m`. Terms with `Δ(S|T) ≤ 0` are skipped; the
/// convention is 1 when no term constrains. The result is clamped below at
/// zero, and capped at 1 only when `f` is monotone (so the reported value
/// lies in `[0,1]` exactly when the definition promises it).
pub fn submodularity_ratio(f: &SetFunctionTable, x: Subset, m: usize) -> Result<f64> {
    let n = f.n();
    guard(n, METRIC_SWEEP_MAX_N, "submodularity ratio")?;
    let full = f.full_mask();
    if !x.is_subset_of(full) {
        return Err(Error::argument("X exceeds the ground set".to_string()));
    }
    let mut best: Option<f64> = None;
    for t in x.subsets() {
        let ft = f.value_at(t);
        for s in (full - t).subsets() {
            if s.is_empty() || s.len() > m {
                continue;
            }
            let joint = f.value_at(s | t) - ft;
            if joint <= 0.0 {
                continue;
            }
            let singles: f64 = s.elements().map(|e| f.value_at(t.with(e)) - ft).sum();
            let ratio = singles / joint;
            best = Some(best.map_or(ratio, |b: f64| b.min(ratio)));
        }
    }
    let mut gamma = best.unwrap_or(1.0).max(0.0);
    if f.is_monotone() {
        gamma = gamma.min(1.0);
    }
    Ok(gamma)
}

/// Generalized curvature: smallest `α` with
/// `Δ(e|W) ≥ (1−α)·Δ(e|U)` for all chains `U ⊆ W ⊆ V∖{e}`.
/// Computed as the largest `1 − Δ(e|W)/Δ(e|U)` over chains with
/// `Δ(e|U) > 0`, clamped into `[0,1]`.
pub fn generalized_curvature(f: &SetFunctionTable) -> Result<f64> {
    chain_curvature(f, false)
}

/// Generalized inverse curvature: smallest `α̃` with
/// `Δ(e|U) ≥ (1−α̃)·Δ(e|W)` on the same chains, clamped into `[0,1]`.
pub fn generalized_inverse_curvature(f: &SetFunctionTable) -> Result<f64> {
    chain_curvature(f, true)
}

fn chain_curvature(f: &SetFunctionTable, inverse: bool) -> Result<f64> {
    let n = f.n();
    guard(n, METRIC_SWEEP_MAX_N, "generalized curvature")?;
    let full = f.full_mask();
    let mut worst = 0.0f64;
    for e in 1..=n {
        let rest = full.without(e);
        for w in rest.subsets() {
            let at_w = f.value_at(w.with(e)) - f.value_at(w);
            for u in w.subsets() {
                let at_u = f.value_at(u.with(e)) - f.value_at(u);
                let (num, den) = if inverse { (at_u, at_w) } else { (at_w, at_u) };
                if den > 0.0 {
                    worst = worst.max(1.0 - num / den);
                }
            }
        }
    }
    Ok(worst.min(1.0))
}

/// Curvature with respect to `X`:
/// `1 − Σ_{e∈X}(f(X) − f(X∖{e})) / Σ_{e∈X} f({e})`.
pub fn curvature_wrt(f: &SetFunctionTable, x: Subset) -> Result<f64> {
    if !x.is_subset_of(f.full_mask()) {
        return Err(Error::argument("X exceeds the ground set".to_string()));
    }
    let denom: f64 = x.elements().map(|e| f.value_at(Subset::singleton(e))).sum();
    if denom <= 0.0 {
        return Err(Error::domain(
            "curvature_wrt needs Σ_{e∈X} f({e}) > 0".to_string(),
        ));
    }
    let fx = f.value_at(x);
    let numer: f64 = x.elements().map(|e| fx - f.value_at(x.without(e))).sum();
    Ok(1.0 - numer / denom)
}

/// Curvature after the best split over flip sets of size at most `r`:
/// `min_{|B|≤r} max_{A⊆B} α(f_{A,B})`.
pub fn alpha_r(f: &SetFunctionTable, r: usize) -> Result<f64> {
    restricted_extremum(f, r, true)
}

/// Submodularity ratio after the best split over flip sets of size at most
/// `r`: `max_{|B|≤r} min_{A⊆B} γ(f_{A,B})`.
pub fn gamma_r(f: &SetFunctionTable, r: usize) -> Result<f64> {
    restricted_extremum(f, r, false)
}

fn restricted_extremum(f: &SetFunctionTable, r: usize, curvature: bool) -> Result<f64> {
    let n = f.n();
    guard(n, RESTRICTED_SWEEP_MAX_N, "restricted metric sweep")?;
    if r >= n {
        return Err(Error::argument(format!(
            "flip-set budget must satisfy r ≤ n−1, got r={r}"
        )));
    }
    let mut best: Option<f64> = None;
    for size in 0..=r {
        for b in crate::lattice::masks_of_size(n, size) {
            let mut inner: Option<f64> = None;
            for a in b.subsets() {
                let piece = f.restrict(a, b)?;
                let v = if curvature {
                    generalized_curvature(&piece)?
                } else {
                    let full = piece.full_mask();
                    submodularity_ratio(&piece, full, piece.n())?
                };
                inner = Some(match inner {
                    None => v,
                    // Worst piece inside the split.
                    Some(w) => {
                        if curvature {
                            w.max(v)
                        } else {
                            w.min(v)
                        }
                    }
                });
            }
            let inner = inner.expect("at least A = ∅");
            best = Some(match best {
                None => inner,
                // Best split among candidates.
                Some(w) => {
                    if curvature {
                        w.min(inner)
                    } else {
                        w.max(inner)
                    }
                }
            });
        }
    }
    Ok(best.expect("at least B = ∅"))
}

/// Greedy guarantee `(1/α)(1 − e^{−αγ})` for cardinality-constrained
/// maximization; continuous limit `γ` as `α → 0`.
pub fn greedy_guarantee(alpha: f64, gamma: f64) -> f64 {
    if alpha.abs() < 1e-12 {
        gamma
    } else {
        (1.0 - (-alpha * gamma).exp()) / alpha
    }
}

/// Ratio-minimization guarantee
/// `(1/γ_g) · k / (1 + (k−1)(1−ĉ))` for numerators that split submodular.
pub fn ratio_guarantee_general(gamma_g: f64, optimum_size: usize, c_hat: f64) -> f64 {
    let k = optimum_size as f64;
    (1.0 / gamma_g) * k / (1.0 + (k - 1.0) * (1.0 - c_hat))
}

/// Ratio-minimization guarantee
/// `(1/γ_g) · k / (1 + (k−1)(1−α)(1−α̃))` for general monotone pairs.
pub fn ratio_guarantee_curvature(
    gamma_g: f64,
    optimum_size: usize,
    alpha_f: f64,
    inverse_alpha_f: f64,
) -> f64 {
    let k = optimum_size as f64;
    (1.0 / gamma_g) * k / (1.0 + (k - 1.0) * (1.0 - alpha_f) * (1.0 - inverse_alpha_f))
}

/// Ratio-minimization guarantee `1 / (1 − e^{α̂−1})` when the denominator
/// splits submodular.
pub fn ratio_guarantee_submodular(alpha_hat_f: f64) -> f64 {
    1.0 / (1.0 - (alpha_hat_f - 1.0).exp())
}
