//! Elementary imset constraints and the cones they cut out.
//!
//! For a pair `i < j` and a context set `z ⊆ V ∖ {i,j}`, the elementary imset
//! row evaluates `f(z) + f(z∪{i,j}) − f(z∪{i}) − f(z∪{j})`. A function is
//! supermodular exactly when every row is nonnegative, and supermodular with
//! respect to a coordinatewise reordering (sign vector `τ ∈ {±1}^n`) exactly
//! when every row of pair `(i,j)` has the sign of `τ_i τ_j`. There are
//! `C(n,2) · 2^(n−2)` rows in total; they are the facets of each such cone.
//!
//! Minkowski sums of these cones keep precisely the facet inequalities the
//! summands share, which this module encodes as a pattern
//! `ξ ∈ {−1,0,+1}^(n choose 2)`: zero entries are unconstrained pairs. That
//! characterization drives both rank computation (smallest number of
//! summands whose shared facets the function satisfies) and the constraint
//! sets used by the projection solver.

use crate::error::{Error, Result};
use crate::lattice::{Element, SetFunctionTable, Subset};

/// Number of `(i,j)` pairs with `1 ≤ i < j ≤ n`.
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Default absolute tolerance on imset row values (4-term sums of table
/// entries), used by all membership checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// An unordered pair `i < j` of ground-set elements.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairIndex {
    i: Element,
    j: Element,
}

impl PairIndex {
    pub fn new(i: Element, j: Element) -> Result<PairIndex> {
        if i == 0 || j == 0 || i == j {
            return Err(Error::argument(format!(
                "pair needs two distinct elements ≥ 1, got ({i},{j})"
            )));
        }
        Ok(PairIndex {
            i: i.min(j),
            j: i.max(j),
        })
    }

    pub fn i(self) -> Element {
        self.i
    }

    pub fn j(self) -> Element {
        self.j
    }

    /// Lexicographic rank among all pairs of `[n]`: (1,2), (1,3), ..., (n−1,n).
    pub fn rank(self, n: usize) -> usize {
        (self.i - 1) * n - self.i * (self.i - 1) / 2 + (self.j - self.i - 1)
    }

    /// All pairs of `[n]` in lexicographic order.
    pub fn all(n: usize) -> Vec<PairIndex> {
        let mut out = Vec::with_capacity(pair_count(n));
        for i in 1..=n {
            for j in (i + 1)..=n {
                out.push(PairIndex { i, j });
            }
        }
        out
    }
}

/// One elementary imset row: context `z`, pair `(i,j)`, and an orientation.
///
/// The row applies coefficients `+1` on `z` and `z∪{i,j}` and `−1` on
/// `z∪{i}` and `z∪{j}`; `orientation` records which direction of the
/// inequality is being asserted (`+1` for `row ≥ 0`, `−1` for `row ≤ 0`).
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ImsetConstraint {
    pub pair: PairIndex,
    pub context: Subset,
    pub orientation: i8,
}

impl ImsetConstraint {
    /// Masks carrying coefficient `+1`: `(z, z∪{i,j})`.
    pub fn plus_masks(&self) -> (Subset, Subset) {
        let zij = self.context.with(self.pair.i).with(self.pair.j);
        (self.context, zij)
    }

    /// Masks carrying coefficient `−1`: `(z∪{i}, z∪{j})`.
    pub fn minus_masks(&self) -> (Subset, Subset) {
        (
            self.context.with(self.pair.i),
            self.context.with(self.pair.j),
        )
    }

    /// Raw row value `f(z) + f(z∪{i,j}) − f(z∪{i}) − f(z∪{j})`.
    pub fn row_value(&self, f: &SetFunctionTable) -> f64 {
        let (p0, p1) = self.plus_masks();
        let (m0, m1) = self.minus_masks();
        f.value_at(p0) + f.value_at(p1) - f.value_at(m0) - f.value_at(m1)
    }

    /// Row value signed by the stored orientation.
    pub fn oriented_value(&self, f: &SetFunctionTable) -> f64 {
        f64::from(self.orientation) * self.row_value(f)
    }
}

/// The `2^(n−2)` rows of pair `(i,j)`, contexts in increasing mask order.
pub fn imset_rows(n: usize, i: Element, j: Element) -> Result<Vec<ImsetConstraint>> {
    let pair = PairIndex::new(i, j)?;
    if pair.j > n {
        return Err(Error::argument(format!(
            "pair ({i},{j}) exceeds ground set of size {n}"
        )));
    }
    let complement = Subset::full(n) - Subset::singleton(pair.i) - Subset::singleton(pair.j);
    Ok(complement
        .subsets()
        .map(|context| ImsetConstraint {
            pair,
            context,
            orientation: 1,
        })
        .collect())
}

/// Row values of pair `(i,j)` on `f`, contexts in increasing mask order.
pub fn imset_evaluate(f: &SetFunctionTable, i: Element, j: Element) -> Result<Vec<f64>> {
    Ok(imset_rows(f.n(), i, j)?
        .iter()
        .map(|c| c.row_value(f))
        .collect())
}

/// Sign vector `τ ∈ {±1}^n` identifying a reordered supermodular cone.
///
/// A global sign flip yields the same cone, so the stored form is canonical
/// with `τ_1 = +1`; there are `2^(n−1)` distinct cones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignVector {
    taus: Vec<i8>,
}

impl SignVector {
    pub fn new(taus: Vec<i8>) -> Result<SignVector> {
        if taus.is_empty() {
            return Err(Error::argument("empty sign vector".to_string()));
        }
        if taus.iter().any(|&t| t != 1 && t != -1) {
            return Err(Error::argument(
                "sign vector entries must be ±1".to_string(),
            ));
        }
        let mut taus = taus;
        if taus[0] == -1 {
            for t in &mut taus {
                *t = -*t;
            }
        }
        Ok(SignVector { taus })
    }

    pub fn all_ones(n: usize) -> SignVector {
        SignVector { taus: vec![1; n] }
    }

    /// The sign vector with `−1` exactly at coordinate `i` (canonicalized).
    pub fn elementary(n: usize, i: Element) -> Result<SignVector> {
        if i == 0 || i > n {
            return Err(Error::argument(format!("element {i} outside 1..={n}")));
        }
        let mut taus = vec![1i8; n];
        taus[i - 1] = -1;
        SignVector::new(taus)
    }

    /// Canonical sign vector from a negative-coordinate mask; callers must
    /// not set bit 0 (that cone is the global flip of another).
    pub fn from_negative_mask(n: usize, mask: Subset) -> Result<SignVector> {
        if mask.contains(1) {
            return Err(Error::argument(
                "canonical sign vectors fix τ_1 = +1".to_string(),
            ));
        }
        let taus = (1..=n)
            .map(|e| if mask.contains(e) { -1 } else { 1 })
            .collect();
        SignVector::new(taus)
    }

    /// All `2^(n−1)` canonical sign vectors, in increasing mask order of
    /// their negative coordinates.
    pub fn enumerate_canonical(n: usize) -> Vec<SignVector> {
        (0..1u32 << (n - 1))
            .map(|m| SignVector::from_negative_mask(n, Subset::from_bits(m << 1)).unwrap())
            .collect()
    }

    pub fn n(&self) -> usize {
        self.taus.len()
    }

    pub fn taus(&self) -> &[i8] {
        &self.taus
    }

    pub fn tau(&self, e: Element) -> i8 {
        self.taus[e - 1]
    }

    /// Product `τ_i τ_j` giving the inequality direction of pair `(i,j)`.
    pub fn pair_sign(&self, pair: PairIndex) -> i8 {
        self.tau(pair.i) * self.tau(pair.j)
    }

    /// Mask of negative coordinates; doubles as the canonical sort key.
    pub fn negative_mask(&self) -> Subset {
        let mut m = Subset::EMPTY;
        for (k, &t) in self.taus.iter().enumerate() {
            if t == -1 {
                m = m.with(k + 1);
            }
        }
        m
    }
}

/// Constraint pattern `ξ ∈ {−1,0,+1}^(n choose 2)` of a Minkowski-sum cone:
/// pair `(i,j)` with `ξ_{ij} ≠ 0` keeps the facet rows `ξ_{ij}·row ≥ 0`;
/// `ξ_{ij} = 0` drops the pair entirely.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct XiPattern {
    n: usize,
    xi: Vec<i8>,
}

impl XiPattern {
    pub fn zero(n: usize) -> XiPattern {
        XiPattern {
            n,
            xi: vec![0; pair_count(n)],
        }
    }

    /// All pairs constrained to `row ≥ 0` (the unreordered supermodular cone).
    pub fn supermodular(n: usize) -> XiPattern {
        XiPattern {
            n,
            xi: vec![1; pair_count(n)],
        }
    }

    /// All pairs constrained to `row ≤ 0`.
    pub fn submodular(n: usize) -> XiPattern {
        XiPattern {
            n,
            xi: vec![-1; pair_count(n)],
        }
    }

    /// Pattern of a single sign vector: `ξ_{ij} = τ_i τ_j`.
    pub fn from_sign_vector(tau: &SignVector) -> XiPattern {
        let n = tau.n();
        let xi = PairIndex::all(n)
            .iter()
            .map(|&p| tau.pair_sign(p))
            .collect();
        XiPattern { n, xi }
    }

    /// `row ≤ 0` on every pair with both endpoints outside `b`; used for the
    /// cones whose members split into submodular pieces at `b`.
    pub fn submodular_outside(n: usize, b: Subset) -> XiPattern {
        let xi = PairIndex::all(n)
            .iter()
            .map(|p| {
                if b.contains(p.i) || b.contains(p.j) {
                    0
                } else {
                    -1
                }
            })
            .collect();
        XiPattern { n, xi }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, pair: PairIndex) -> i8 {
        self.xi[pair.rank(self.n)]
    }

    pub fn set(&mut self, pair: PairIndex, sign: i8) {
        self.xi[pair.rank(self.n)] = sign;
    }

    pub fn signs(&self) -> &[i8] {
        &self.xi
    }

    pub fn negated(&self) -> XiPattern {
        XiPattern {
            n: self.n,
            xi: self.xi.iter().map(|s| -s).collect(),
        }
    }

    pub fn nonzero_pairs(&self) -> Vec<(PairIndex, i8)> {
        PairIndex::all(self.n)
            .into_iter()
            .zip(self.xi.iter().copied())
            .filter(|&(_, s)| s != 0)
            .collect()
    }

    /// Number of facet rows the pattern keeps: `2^(n−2)` per nonzero pair.
    pub fn constraint_count(&self) -> usize {
        let rows_per_pair = 1usize << (self.n - 2);
        self.xi.iter().filter(|&&s| s != 0).count() * rows_per_pair
    }
}

/// Shared facet pattern of a Minkowski sum of reordered supermodular cones:
/// `ξ_{ij} = τ_i τ_j` where the product agrees across all summands, else 0.
pub fn xi_from_taus(taus: &[SignVector]) -> Result<XiPattern> {
    let first = taus
        .first()
        .ok_or_else(|| Error::argument("need at least one sign vector".to_string()))?;
    let n = first.n();
    if taus.iter().any(|t| t.n() != n) {
        return Err(Error::argument(
            "sign vectors have mixed lengths".to_string(),
        ));
    }
    let mut xi = XiPattern::zero(n);
    for pair in PairIndex::all(n) {
        let s = first.pair_sign(pair);
        if taus.iter().all(|t| t.pair_sign(pair) == s) {
            xi.set(pair, s);
        }
    }
    Ok(xi)
}

/// Per-pair extremes of the imset rows, enough to classify membership in any
/// pattern cone without re-touching the table.
#[derive(Clone, Debug)]
pub struct SignPattern {
    n: usize,
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

/// Classification of one pair's rows at a tolerance.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PairClass {
    /// Every row within `±tol` of zero.
    AllEq,
    /// Every row `≥ −tol`, at least one `> tol`.
    AllGeq,
    /// Every row `≤ tol`, at least one `< −tol`.
    AllLeq,
    /// Some row `> tol` and some row `< −tol`.
    Mixed,
}

impl SignPattern {
    /// One pass over all pairs and contexts of `f`.
    pub fn of(f: &SetFunctionTable) -> SignPattern {
        let n = f.n();
        let mut mins = Vec::with_capacity(pair_count(n));
        let mut maxs = Vec::with_capacity(pair_count(n));
        for pair in PairIndex::all(n) {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            let complement =
                Subset::full(n) - Subset::singleton(pair.i) - Subset::singleton(pair.j);
            for context in complement.subsets() {
                let row = ImsetConstraint {
                    pair,
                    context,
                    orientation: 1,
                };
                let v = row.row_value(f);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            mins.push(lo);
            maxs.push(hi);
        }
        SignPattern { n, mins, maxs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row_min(&self, pair: PairIndex) -> f64 {
        self.mins[pair.rank(self.n)]
    }

    pub fn row_max(&self, pair: PairIndex) -> f64 {
        self.maxs[pair.rank(self.n)]
    }

    pub fn class(&self, pair: PairIndex, tol: f64) -> PairClass {
        let geq = self.row_min(pair) >= -tol;
        let leq = self.row_max(pair) <= tol;
        match (geq, leq) {
            (true, true) => PairClass::AllEq,
            (true, false) => PairClass::AllGeq,
            (false, true) => PairClass::AllLeq,
            (false, false) => PairClass::Mixed,
        }
    }

    /// Whether every row of `pair` satisfies `sign·row ≥ −tol`; rows within
    /// `±tol` are compatible with both signs.
    pub fn admits(&self, pair: PairIndex, sign: i8, tol: f64) -> bool {
        match sign {
            1 => self.row_min(pair) >= -tol,
            -1 => self.row_max(pair) <= tol,
            _ => true,
        }
    }

    /// Membership of the profiled function in the pattern cone.
    pub fn admits_xi(&self, xi: &XiPattern, tol: f64) -> bool {
        PairIndex::all(self.n)
            .into_iter()
            .all(|p| self.admits(p, xi.get(p), tol))
    }

    pub(crate) fn admits_signs(&self, signs: &[i8], tol: f64) -> bool {
        signs.iter().enumerate().all(|(k, &s)| match s {
            1 => self.mins[k] >= -tol,
            -1 => self.maxs[k] <= tol,
            _ => true,
        })
    }
}

/// Membership of `f` in the pattern cone: for every pair with `ξ_{ij} ≠ 0`,
/// every row satisfies `ξ_{ij}·row ≥ −tol`. Submodular-side membership is
/// membership with `ξ` negated.
pub fn cone_membership(f: &SetFunctionTable, xi: &XiPattern, tol: f64) -> Result<bool> {
    if xi.n() != f.n() {
        return Err(Error::argument(format!(
            "pattern is for n={}, table has n={}",
            xi.n(),
            f.n()
        )));
    }
    for (pair, sign) in xi.nonzero_pairs() {
        let complement =
            Subset::full(f.n()) - Subset::singleton(pair.i) - Subset::singleton(pair.j);
        for context in complement.subsets() {
            let row = ImsetConstraint {
                pair,
                context,
                orientation: sign,
            };
            if row.oriented_value(f) < -tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Strict interior witness of the pattern cone: the sum over nonzero pairs
/// of tables depending only on coordinates `(i, j)`, with the 2×2 cell
/// values chosen so every kept row evaluates to `±2` on the right side and
/// every dropped pair's rows evaluate to exactly zero.
pub fn witness_interior(xi: &XiPattern) -> Result<SetFunctionTable> {
    let n = xi.n();
    let mut witness = SetFunctionTable::zeros(n)?;
    for (pair, sign) in xi.nonzero_pairs() {
        // cell value at (bit_i, bit_j): equal bits get c, unequal get 1−c.
        let c = if sign == 1 { 1.0 } else { 0.0 };
        let piece = SetFunctionTable::from_fn(n, |s| {
            if s.contains(pair.i) == s.contains(pair.j) {
                c
            } else {
                1.0 - c
            }
        })?;
        witness = witness.add(&piece)?;
    }
    Ok(witness)
}

fn ceil_log2(n: usize) -> usize {
    debug_assert!(n >= 1);
    if n == 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Largest possible ranks on `n ≥ 3` elements: `(⌈log2 n⌉ + 1, n)` for the
/// supermodular and elementary-submodular decompositions respectively.
pub fn max_rank_bounds(n: usize) -> Result<(usize, usize)> {
    if n < 3 {
        return Err(Error::argument(format!(
            "rank bounds are defined for n ≥ 3, got {n}"
        )));
    }
    Ok((ceil_log2(n) + 1, n))
}

/// Certificate returned by [`supermodular_rank`]: the summand sign vectors.
pub type RankWitness = Vec<SignVector>;

/// Smallest `r` such that `f` lies in a Minkowski sum of `r` reordered
/// supermodular cones, with a witness choice of sign vectors.
///
/// The search classifies each pair's rows once, then tests candidate
/// combinations of canonical sign vectors against that classification:
/// a combination is feasible exactly when every pair on which all summands
/// agree keeps rows of the agreed sign. Combinations are scanned in
/// increasing size and lexicographic order, so the witness is the
/// lexicographically smallest among the smallest.
pub fn supermodular_rank(f: &SetFunctionTable, tol: f64) -> Result<(usize, RankWitness)> {
    let n = f.n();
    if n > 6 {
        return Err(Error::size_guard(format!(
            "exact rank search enumerates 2^(n−1) sign vectors; n={n} > 6"
        )));
    }
    if n == 1 {
        return Ok((1, vec![SignVector::all_ones(1)]));
    }
    let pattern = SignPattern::of(f);
    let pairs = PairIndex::all(n);
    let canonical = SignVector::enumerate_canonical(n);
    // Product signs per candidate, indexed by pair rank.
    let prods: Vec<Vec<i8>> = canonical
        .iter()
        .map(|t| pairs.iter().map(|&p| t.pair_sign(p)).collect())
        .collect();
    let (max_rank, _) = if n >= 3 { max_rank_bounds(n)? } else { (2, n) };

    let mut stack: Vec<usize> = Vec::new();
    for r in 1..=max_rank {
        stack.clear();
        if let Some(found) = search_combinations(&mut stack, 0, r, &prods, &pattern, tol) {
            let witness = found.iter().map(|&k| canonical[k].clone()).collect();
            return Ok((r, witness));
        }
    }
    // Unreachable: a sum of max_rank cones with all-zero shared pattern
    // always exists and admits every function.
    Err(Error::Numerical(
        "rank search exhausted all combinations".to_string(),
    ))
}

fn search_combinations(
    stack: &mut Vec<usize>,
    start: usize,
    want: usize,
    prods: &[Vec<i8>],
    pattern: &SignPattern,
    tol: f64,
) -> Option<Vec<usize>> {
    if stack.len() == want {
        let shared = shared_signs(stack, prods);
        if pattern.admits_signs(&shared, tol) {
            return Some(stack.clone());
        }
        return None;
    }
    for k in start..prods.len() {
        stack.push(k);
        if let Some(hit) = search_combinations(stack, k + 1, want, prods, pattern, tol) {
            return Some(hit);
        }
        stack.pop();
    }
    None
}

fn shared_signs(chosen: &[usize], prods: &[Vec<i8>]) -> Vec<i8> {
    let first = &prods[chosen[0]];
    first
        .iter()
        .enumerate()
        .map(|(p, &s)| {
            if chosen[1..].iter().all(|&k| prods[k][p] == s) {
                s
            } else {
                0
            }
        })
        .collect()
}

/// Smallest `r + 1` such that some `B` with `|B| = r` makes every
/// restriction of `f` at `B` submodular, together with the smallest such
/// `B` (by mask). Equivalently: all imset rows whose pair avoids `B` are
/// `≤ tol`.
pub fn elementary_submodular_rank(f: &SetFunctionTable, tol: f64) -> Result<(usize, Subset)> {
    let n = f.n();
    let pattern = SignPattern::of(f);
    let pairs = PairIndex::all(n);
    for r in 0..n {
        for b in sorted_masks_of_size(n, r) {
            let ok = pairs
                .iter()
                .filter(|p| !b.contains(p.i) && !b.contains(p.j))
                .all(|&p| pattern.admits(p, -1, tol));
            if ok {
                return Ok((r + 1, b));
            }
        }
    }
    unreachable!("|B| = n − 1 leaves no pairs and is always feasible");
}

fn sorted_masks_of_size(n: usize, k: usize) -> Vec<Subset> {
    let mut v: Vec<Subset> = crate::lattice::masks_of_size(n, k).collect();
    v.sort();
    v
}
