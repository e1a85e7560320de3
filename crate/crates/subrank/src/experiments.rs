//! Experiment runners: Monte Carlo cone volumes, metric curves over the
//! split budget, and split studies against exhaustive optima.
//!
//! Every run is reproducible bit for bit from its parameters and seed: the
//! Monte Carlo workers draw from per-chunk ChaCha streams derived from the
//! master seed, so results do not depend on thread count, and every emitted
//! row carries the parameters needed to re-run it.

use crate::cones::{pair_count, PairIndex, SignVector};
use crate::error::{Error, Result};
use crate::lattice::{masks_of_size, Subset};
use crate::metrics::{alpha_r, gamma_r, greedy_guarantee};
use crate::objectives::{Family, ObjectiveInstance, Preset};
use crate::optimize::{exhaustive_max, greedy, r_split, CardinalityMatroid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

/// Largest ground set for exact per-sample membership sweeps at the default
/// sample count.
pub const VOLUME_MAX_N: usize = 5;
pub const DEFAULT_VOLUME_SAMPLES: u64 = 500_000;

/// Which union of cones a volume request measures.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RankFamily {
    /// Functions of supermodular rank at most `r`.
    Supermodular,
    /// Functions of elementary submodular rank at most `r`.
    Elementary,
    /// The single unreordered supermodular cone (used for the decay bound).
    SingleCone,
}

impl RankFamily {
    pub fn parse(s: &str) -> Result<RankFamily> {
        match s {
            "supermodular" => Ok(RankFamily::Supermodular),
            "elementary" => Ok(RankFamily::Elementary),
            "single-cone" => Ok(RankFamily::SingleCone),
            other => Err(Error::argument(format!("unknown rank family '{other}'"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RankFamily::Supermodular => "supermodular",
            RankFamily::Elementary => "elementary",
            RankFamily::SingleCone => "single-cone",
        }
    }
}

#[derive(Copy, Clone, Debug)]
pub struct VolumeRequest {
    pub n: usize,
    pub family: RankFamily,
    pub rank: usize,
    pub samples: u64,
    pub seed: u64,
}

impl VolumeRequest {
    pub fn new(n: usize, family: RankFamily, rank: usize) -> VolumeRequest {
        VolumeRequest {
            n,
            family,
            rank,
            samples: DEFAULT_VOLUME_SAMPLES,
            seed: 0,
        }
    }
}

/// Estimated relative volume (Gaussian mass) with its binomial standard
/// error.
#[derive(Clone, Debug, Serialize)]
pub struct VolumeEstimate {
    pub family: &'static str,
    pub n: usize,
    pub rank: usize,
    pub samples: u64,
    pub seed: u64,
    pub hits: u64,
    pub fraction: f64,
    pub std_error: f64,
}

/// Membership test data shared by all samples of one request.
enum MembershipTest {
    /// Candidate shared-sign patterns (pair-rank indexed, `{−1,0,+1}`);
    /// membership means some pattern admits the sample.
    Patterns(Vec<Vec<i8>>),
    /// Flip sets; membership means all pairs outside some flip set have all
    /// rows `≤ 0`.
    FlipSets(Vec<Vec<usize>>),
}

fn supermodular_patterns(n: usize, rank: usize) -> Vec<Vec<i8>> {
    let canonical = SignVector::enumerate_canonical(n);
    let pairs = PairIndex::all(n);
    let prods: Vec<Vec<i8>> = canonical
        .iter()
        .map(|t| pairs.iter().map(|&p| t.pair_sign(p)).collect())
        .collect();
    let k = rank.min(canonical.len()).max(1);
    let mut patterns = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut stack: Vec<usize> = Vec::new();
    collect_shared(&mut stack, 0, k, &prods, &mut |shared: Vec<i8>| {
        if seen.insert(shared.clone()) {
            patterns.push(shared);
        }
    });
    patterns
}

fn collect_shared(
    stack: &mut Vec<usize>,
    start: usize,
    want: usize,
    prods: &[Vec<i8>],
    sink: &mut impl FnMut(Vec<i8>),
) {
    if stack.len() == want {
        let first = &prods[stack[0]];
        let shared = first
            .iter()
            .enumerate()
            .map(|(p, &s)| {
                if stack[1..].iter().all(|&i| prods[i][p] == s) {
                    s
                } else {
                    0
                }
            })
            .collect();
        sink(shared);
        return;
    }
    for i in start..prods.len() {
        stack.push(i);
        collect_shared(stack, i + 1, want, prods, sink);
        stack.pop();
    }
}

fn elementary_flip_sets(n: usize, rank: usize) -> Vec<Vec<usize>> {
    // Elementary rank ≤ k holds iff some flip set of size k−1 leaves only
    // all-nonpositive pairs; list the pair ranks outside each candidate.
    let size = rank.saturating_sub(1).min(n - 1);
    let pairs = PairIndex::all(n);
    masks_of_size(n, size)
        .map(|b| {
            pairs
                .iter()
                .enumerate()
                .filter(|(_, p)| !b.contains(p.i()) && !b.contains(p.j()))
                .map(|(rank, _)| rank)
                .collect()
        })
        .collect()
}

/// Per-pair row extremes of one raw sample.
fn pair_extremes(values: &[f64], n: usize, mins: &mut [f64], maxs: &mut [f64]) {
    for (rank, pair) in PairIndex::all(n).into_iter().enumerate() {
        let bi = 1usize << (pair.i() - 1);
        let bj = 1usize << (pair.j() - 1);
        let comp = Subset::full(n) - Subset::singleton(pair.i()) - Subset::singleton(pair.j());
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for z in comp.subsets() {
            let z = z.index();
            let v = values[z] + values[z | bi | bj] - values[z | bi] - values[z | bj];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        mins[rank] = lo;
        maxs[rank] = hi;
    }
}

fn sample_is_member(test: &MembershipTest, mins: &[f64], maxs: &[f64]) -> bool {
    match test {
        MembershipTest::Patterns(patterns) => patterns.iter().any(|pat| {
            pat.iter().enumerate().all(|(p, &s)| match s {
                1 => mins[p] >= 0.0,
                -1 => maxs[p] <= 0.0,
                _ => true,
            })
        }),
        MembershipTest::FlipSets(sets) => sets
            .iter()
            .any(|outside| outside.iter().all(|&p| maxs[p] <= 0.0)),
    }
}

/// Fraction of standard-Gaussian tables lying in the requested union of
/// cones, with binomial standard error.
pub fn volume_estimate(req: &VolumeRequest) -> Result<VolumeEstimate> {
    if req.n < 2 || req.n > VOLUME_MAX_N {
        return Err(Error::size_guard(format!(
            "volume sweeps support 2 ≤ n ≤ {VOLUME_MAX_N}, got {}",
            req.n
        )));
    }
    if req.family != RankFamily::SingleCone && req.rank == 0 {
        return Err(Error::argument("rank must be ≥ 1".to_string()));
    }
    let n = req.n;
    let test = match req.family {
        RankFamily::Supermodular => MembershipTest::Patterns(supermodular_patterns(n, req.rank)),
        RankFamily::Elementary => MembershipTest::FlipSets(elementary_flip_sets(n, req.rank)),
        RankFamily::SingleCone => MembershipTest::Patterns(vec![vec![1; pair_count(n)]]),
    };

    let chunk_size: u64 = 8192;
    let chunks = req.samples.div_ceil(chunk_size);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
            rng.set_stream(c + 1);
            let count = chunk_size.min(req.samples - c * chunk_size);
            let mut values = vec![0.0f64; 1 << n];
            let mut mins = vec![0.0f64; pair_count(n)];
            let mut maxs = vec![0.0f64; pair_count(n)];
            let mut local = 0u64;
            for _ in 0..count {
                for v in values.iter_mut() {
                    *v = StandardNormal.sample(&mut rng);
                }
                pair_extremes(&values, n, &mut mins, &mut maxs);
                if sample_is_member(&test, &mins, &maxs) {
                    local += 1;
                }
            }
            local
        })
        .sum();

    let fraction = hits as f64 / req.samples as f64;
    let std_error = (fraction * (1.0 - fraction) / req.samples as f64).sqrt();
    Ok(VolumeEstimate {
        family: req.family.name(),
        n,
        rank: req.rank,
        samples: req.samples,
        seed: req.seed,
        hits,
        fraction,
        std_error,
    })
}

/// Volume of the single unreordered supermodular cone.
pub fn single_cone_volume(n: usize, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    volume_estimate(&VolumeRequest {
        n,
        family: RankFamily::SingleCone,
        rank: 1,
        samples,
        seed,
    })
}

/// Decay bound on the single-cone volume: `0.85^(2^n)`.
pub fn single_cone_volume_bound(n: usize) -> f64 {
    0.85f64.powi(1 << n)
}

/// Whether a measured single-cone volume respects the decay bound with a
/// three-standard-error allowance.
pub fn volume_bound_check(n: usize, measured: &VolumeEstimate) -> bool {
    measured.fraction <= single_cone_volume_bound(n) + 3.0 * measured.std_error
}

/// One row of a metric-curve run.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CurveRow {
    pub family: String,
    pub n: usize,
    pub r: usize,
    pub trial: usize,
    pub seed: u64,
    pub alpha_r: f64,
    pub gamma_r: f64,
    /// `greedy_guarantee(alpha_r, gamma_r)`.
    pub guarantee: f64,
}

/// Aggregate of [`CurveRow`]s sharing `(family, n, r)`.
#[derive(Clone, Debug, Serialize)]
pub struct CurveSummary {
    pub family: String,
    pub n: usize,
    pub r: usize,
    pub trials: usize,
    pub alpha_mean: f64,
    pub alpha_se: f64,
    pub gamma_mean: f64,
    pub gamma_se: f64,
    pub guarantee_mean: f64,
    pub guarantee_se: f64,
}

/// Size guard for curve runs (restricted metric sweeps grow as `5^n`).
pub const CURVES_MAX_N: usize = 8;

/// Exact `α_r`, `γ_r`, and the greedy guarantee across the split budget,
/// one row per `(trial, r)`.
pub fn run_metric_curves(
    family: Family,
    n: usize,
    r_max: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<CurveRow>> {
    if n > CURVES_MAX_N {
        return Err(Error::size_guard(format!(
            "metric curves refuse n={n} > {CURVES_MAX_N}"
        )));
    }
    if r_max >= n {
        return Err(Error::argument(format!("r_max must be < n, got {r_max}")));
    }
    let jobs: Vec<(usize, u64)> = (0..trials)
        .map(|t| (t, seed.wrapping_add(t as u64)))
        .collect();
    let per_trial: Vec<Vec<CurveRow>> = jobs
        .par_iter()
        .map(|&(trial, trial_seed)| {
            let instance =
                ObjectiveInstance::generate(family, n, Preset::MetricCurves, trial_seed)?;
            let table = instance.materialize()?;
            (0..=r_max)
                .map(|r| {
                    let a = alpha_r(&table, r)?;
                    let g = gamma_r(&table, r)?;
                    Ok(CurveRow {
                        family: family.name().to_string(),
                        n,
                        r,
                        trial,
                        seed: trial_seed,
                        alpha_r: a,
                        gamma_r: g,
                        guarantee: greedy_guarantee(a, g),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Mean ± standard error per `(family, n, r)` cell.
pub fn summarize_curves(rows: &[CurveRow]) -> Vec<CurveSummary> {
    let mut cells: Vec<(String, usize, usize)> =
        rows.iter().map(|r| (r.family.clone(), r.n, r.r)).collect();
    cells.sort();
    cells.dedup();
    cells
        .into_iter()
        .map(|(family, n, r)| {
            let cell: Vec<&CurveRow> = rows
                .iter()
                .filter(|row| row.family == family && row.n == n && row.r == r)
                .collect();
            let alphas: Vec<f64> = cell.iter().map(|c| c.alpha_r).collect();
            let gammas: Vec<f64> = cell.iter().map(|c| c.gamma_r).collect();
            let bounds: Vec<f64> = cell.iter().map(|c| c.guarantee).collect();
            let (alpha_mean, alpha_se) = mean_se(&alphas);
            let (gamma_mean, gamma_se) = mean_se(&gammas);
            let (guarantee_mean, guarantee_se) = mean_se(&bounds);
            CurveSummary {
                family,
                n,
                r,
                trials: cell.len(),
                alpha_mean,
                alpha_se,
                gamma_mean,
                gamma_se,
                guarantee_mean,
                guarantee_se,
            }
        })
        .collect()
}

/// One row of a split study: one algorithm on one instance.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SplitRow {
    pub family: String,
    pub n: usize,
    pub m: usize,
    pub trial: usize,
    pub seed: u64,
    pub algorithm: String,
    pub r: usize,
    pub value: f64,
    pub optimum: Option<f64>,
    pub achieved_ratio: Option<f64>,
    pub found_optimum: Option<bool>,
    pub millis: u64,
}

/// Regime where exhaustive optima are computed alongside the heuristics.
pub const STUDY_EXHAUSTIVE_MAX_N: usize = 20;
pub const STUDY_EXHAUSTIVE_MAX_M: usize = 10;

/// Greedy against its split variants under a cardinality constraint, with
/// exhaustive optima whenever the instance is small enough.
pub fn run_split_study(
    family: Family,
    n: usize,
    m: usize,
    r_list: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<SplitRow>> {
    if family == Family::Random && n > crate::lattice::MAX_GROUND_SIZE {
        return Err(Error::size_guard(
            "random tables cannot be stored beyond the dense-table cap".to_string(),
        ));
    }
    let with_optimum = n <= STUDY_EXHAUSTIVE_MAX_N && m <= STUDY_EXHAUSTIVE_MAX_M;
    let preset = if with_optimum {
        Preset::SplitStudy
    } else {
        Preset::LargeScale
    };
    let mut rows = Vec::new();
    for trial in 0..trials {
        let trial_seed = seed.wrapping_add(trial as u64);
        let instance = ObjectiveInstance::generate(family, n, preset, trial_seed)?;
        let matroid = CardinalityMatroid::new(n, m);
        let optimum = if with_optimum {
            Some(exhaustive_max(&instance, &matroid)?.value)
        } else {
            None
        };
        let mut push = |algorithm: &str, r: usize, value: f64, millis: u64| {
            rows.push(SplitRow {
                family: family.name().to_string(),
                n,
                m,
                trial,
                seed: trial_seed,
                algorithm: algorithm.to_string(),
                r,
                value,
                optimum,
                achieved_ratio: optimum.map(|o| if o != 0.0 { value / o } else { 1.0 }),
                found_optimum: optimum.map(|o| value >= o - 1e-9 * o.abs().max(1.0)),
                millis,
            });
        };
        let t0 = std::time::Instant::now();
        let plain = greedy(&instance, &matroid);
        push("greedy", 0, plain.value, t0.elapsed().as_millis() as u64);
        for &r in r_list {
            let t0 = std::time::Instant::now();
            let split = r_split(&instance, r, &matroid, |f, m| greedy(f, m))?;
            push("rsplit", r, split.value, t0.elapsed().as_millis() as u64);
        }
    }
    Ok(rows)
}

/// CSV encoding for result rows; numeric fields round-trip exactly.
pub trait ResultRow: Sized + Serialize {
    fn csv_header() -> &'static str;
    fn to_csv_row(&self) -> String;
    fn from_csv_row(line: &str) -> Result<Self>;
}

fn split_fields(line: &str, expect: usize) -> Result<Vec<&str>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != expect {
        return Err(Error::Parse(format!(
            "expected {expect} fields, got {}",
            fields.len()
        )));
    }
    Ok(fields)
}

fn parse<T: std::str::FromStr>(field: &str, name: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    field
        .parse()
        .map_err(|e| Error::Parse(format!("bad {name} '{field}': {e}")))
}

fn parse_opt<T: std::str::FromStr>(field: &str, name: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if field.is_empty() {
        Ok(None)
    } else {
        parse(field, name).map(Some)
    }
}

fn opt_str<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

impl ResultRow for CurveRow {
    fn csv_header() -> &'static str {
        "family,n,r,trial,seed,alpha_r,gamma_r,guarantee"
    }

    fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.r,
            self.trial,
            self.seed,
            self.alpha_r,
            self.gamma_r,
            self.guarantee
        )
    }

    fn from_csv_row(line: &str) -> Result<CurveRow> {
        let f = split_fields(line, 8)?;
        Ok(CurveRow {
            family: f[0].to_string(),
            n: parse(f[1], "n")?,
            r: parse(f[2], "r")?,
            trial: parse(f[3], "trial")?,
            seed: parse(f[4], "seed")?,
            alpha_r: parse(f[5], "alpha_r")?,
            gamma_r: parse(f[6], "gamma_r")?,
            guarantee: parse(f[7], "guarantee")?,
        })
    }
}

impl ResultRow for SplitRow {
    fn csv_header() -> &'static str {
        "family,n,m,trial,seed,algorithm,r,value,optimum,achieved_ratio,found_optimum,millis"
    }

    fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.m,
            self.trial,
            self.seed,
            self.algorithm,
            self.r,
            self.value,
            opt_str(&self.optimum),
            opt_str(&self.achieved_ratio),
            opt_str(&self.found_optimum),
            self.millis
        )
    }

    fn from_csv_row(line: &str) -> Result<SplitRow> {
        let f = split_fields(line, 12)?;
        Ok(SplitRow {
            family: f[0].to_string(),
            n: parse(f[1], "n")?,
            m: parse(f[2], "m")?,
            trial: parse(f[3], "trial")?,
            seed: parse(f[4], "seed")?,
            algorithm: f[5].to_string(),
            r: parse(f[6], "r")?,
            value: parse(f[7], "value")?,
            optimum: parse_opt(f[8], "optimum")?,
            achieved_ratio: parse_opt(f[9], "achieved_ratio")?,
            found_optimum: parse_opt(f[10], "found_optimum")?,
            millis: parse(f[11], "millis")?,
        })
    }
}

impl ResultRow for VolumeEstimate {
    fn csv_header() -> &'static str {
        "family,n,rank,samples,seed,hits,fraction,std_error"
    }

    fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.rank,
            self.samples,
            self.seed,
            self.hits,
            self.fraction,
            self.std_error
        )
    }

    fn from_csv_row(line: &str) -> Result<VolumeEstimate> {
        let f = split_fields(line, 8)?;
        let family = RankFamily::parse(f[0])?.name();
        Ok(VolumeEstimate {
            family,
            n: parse(f[1], "n")?,
            rank: parse(f[2], "rank")?,
            samples: parse(f[3], "samples")?,
            seed: parse(f[4], "seed")?,
            hits: parse(f[5], "hits")?,
            fraction: parse(f[6], "fraction")?,
            std_error: parse(f[7], "std_error")?,
        })
    }
}

pub fn rows_to_csv<R: ResultRow>(rows: &[R]) -> String {
    let mut out = String::from(R::csv_header());
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_row());
        out.push('\n');
    }
    out
}

pub fn rows_from_csv<R: ResultRow>(text: &str) -> Result<Vec<R>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == R::csv_header() => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header '{}', got {other:?}",
                R::csv_header()
            )))
        }
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(R::from_csv_row)
        .collect()
}
