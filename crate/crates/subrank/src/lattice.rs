//! Ground sets, subset masks, and dense set-function tables.
//!
//! A set function on a ground set of `n` elements is stored as a dense table
//! of `2^n` values indexed by subset bitmask. Elements are labelled `1..=n`
//! and element `k` corresponds to bit `k - 1`, so the table index of a subset
//! is exactly its mask value. All types here are immutable after construction
//! and safe to share across threads.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{BitAnd, BitOr, Sub};

/// Largest supported ground set for dense tables; `2^24` doubles per table.
pub const MAX_GROUND_SIZE: usize = 24;

/// Element label, `1..=n`.
pub type Element = usize;

/// A subset of the ground set, encoded as a bitmask with element `k` at bit
/// `k - 1`. The mask value doubles as the table index.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u32) -> Subset {
        Subset(bits)
    }

    /// Full ground set `{1, ..., n}`.
    pub fn full(n: usize) -> Subset {
        debug_assert!(n <= 32);
        if n == 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << n) - 1)
        }
    }

    pub fn singleton(e: Element) -> Subset {
        Subset(1 << (e - 1))
    }

    pub fn from_elements(elements: &[Element]) -> Subset {
        let mut bits = 0u32;
        for &e in elements {
            bits |= 1 << (e - 1);
        }
        Subset(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, e: Element) -> bool {
        self.0 & (1 << (e - 1)) != 0
    }

    pub fn with(self, e: Element) -> Subset {
        Subset(self.0 | (1 << (e - 1)))
    }

    pub fn without(self, e: Element) -> Subset {
        Subset(self.0 & !(1 << (e - 1)))
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    /// Elements of the subset in increasing order.
    pub fn elements(self) -> impl Iterator<Item = Element> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let e = bits.trailing_zeros() as usize + 1;
                bits &= bits - 1;
                Some(e)
            }
        })
    }

    /// All subsets of `self` in increasing mask order, including the empty
    /// set and `self` itself.
    pub fn subsets(self) -> Submasks {
        Submasks {
            of: self.0,
            next: Some(0),
        }
    }
}

impl BitOr for Subset {
    type Output = Subset;
    fn bitor(self, rhs: Subset) -> Subset {
        Subset(self.0 | rhs.0)
    }
}

impl BitAnd for Subset {
    type Output = Subset;
    fn bitand(self, rhs: Subset) -> Subset {
        Subset(self.0 & rhs.0)
    }
}

impl Sub for Subset {
    type Output = Subset;
    fn sub(self, rhs: Subset) -> Subset {
        Subset(self.0 & !rhs.0)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, e) in self.elements().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Subset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.0)
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Subset(u32::deserialize(d)?))
    }
}

/// Iterator over submasks in increasing mask order.
pub struct Submasks {
    of: u32,
    next: Option<u32>,
}

impl Iterator for Submasks {
    type Item = Subset;
    fn next(&mut self) -> Option<Subset> {
        let cur = self.next?;
        let succ = cur.wrapping_sub(self.of) & self.of;
        self.next = if succ == 0 { None } else { Some(succ) };
        Some(Subset(cur))
    }
}

/// Subsets of `{1..n}` with exactly `k` elements, in increasing mask order
/// (Gosper's hack).
pub fn masks_of_size(n: usize, k: usize) -> impl Iterator<Item = Subset> {
    let limit = 1u64 << n;
    let mut cur: u64 = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let mut done = k > n;
    std::iter::from_fn(move || {
        if done || cur >= limit {
            return None;
        }
        let out = Subset(cur as u32);
        if cur == 0 {
            done = true;
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            cur = (((r ^ cur) >> 2) / c) | r;
        }
        Some(out)
    })
}

/// All `2^n` subsets of `{1..n}` in increasing mask order.
pub fn all_masks(n: usize) -> impl Iterator<Item = Subset> {
    (0u64..(1u64 << n)).map(|m| Subset(m as u32))
}

/// Ground set `{1, ..., n}` with the dense-table size cap enforced.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<GroundSet> {
        if n == 0 || n > MAX_GROUND_SIZE {
            return Err(Error::argument(format!(
                "ground set size must be in 1..={MAX_GROUND_SIZE}, got {n}"
            )));
        }
        Ok(GroundSet { n })
    }

    pub fn size(self) -> usize {
        self.n
    }

    pub fn full_mask(self) -> Subset {
        Subset::full(self.n)
    }

    pub fn table_len(self) -> usize {
        1usize << self.n
    }
}

/// Evaluation interface shared by dense tables and lazily evaluated
/// objective instances. Implementations must be pure.
pub trait SetFunction: Sync {
    /// Number of ground-set elements.
    fn ground_size(&self) -> usize;

    /// Value of the function on the given subset.
    fn value(&self, s: Subset) -> f64;
}

/// Dense table of `2^n` values, `values[mask] = f(S(mask))`.
#[derive(Clone, Debug, PartialEq)]
pub struct SetFunctionTable {
    n: usize,
    values: Vec<f64>,
}

impl SetFunctionTable {
    pub fn new(n: usize, values: Vec<f64>) -> Result<SetFunctionTable> {
        let ground = GroundSet::new(n)?;
        if values.len() != ground.table_len() {
            return Err(Error::argument(format!(
                "table for n={n} needs {} values, got {}",
                ground.table_len(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "table entry at mask {bad} is not finite"
            )));
        }
        Ok(SetFunctionTable { n, values })
    }

    pub fn zeros(n: usize) -> Result<SetFunctionTable> {
        SetFunctionTable::new(n, vec![0.0; 1usize << n])
    }

    /// Materialize `f` as a dense table by evaluating every mask in
    /// increasing order.
    pub fn from_fn(n: usize, mut f: impl FnMut(Subset) -> f64) -> Result<SetFunctionTable> {
        let ground = GroundSet::new(n)?;
        let values = (0..ground.table_len())
            .map(|m| f(Subset(m as u32)))
            .collect();
        SetFunctionTable::new(n, values)
    }

    /// Materialize any [`SetFunction`] (size cap applies).
    pub fn materialize(f: &dyn SetFunction) -> Result<SetFunctionTable> {
        SetFunctionTable::from_fn(f.ground_size(), |s| f.value(s))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn full_mask(&self) -> Subset {
        Subset::full(self.n)
    }

    /// Checked evaluation; out-of-range masks are a domain error.
    pub fn eval(&self, s: Subset) -> Result<f64> {
        self.values.get(s.index()).copied().ok_or_else(|| {
            Error::domain(format!("mask {} out of range for n={}", s.bits(), self.n))
        })
    }

    /// Unchecked-by-contract evaluation for masks known to be in range.
    #[inline]
    pub fn value_at(&self, s: Subset) -> f64 {
        self.values[s.index()]
    }

    /// Discrete derivative `f(S ∪ {e}) − f(S)`; zero when `e ∈ S`.
    pub fn discrete_derivative(&self, e: Element, s: Subset) -> Result<f64> {
        if e == 0 || e > self.n {
            return Err(Error::argument(format!(
                "element {e} outside ground set 1..={}",
                self.n
            )));
        }
        let with = self.eval(s.with(e))?;
        let without = self.eval(s)?;
        Ok(with - without)
    }

    /// Restriction to the sets `C` with `C ∩ B = A`, viewed as a function on
    /// the renumbered ground set `V ∖ B`: `g(C) = f(C ∪ A)`.
    pub fn restrict(&self, a: Subset, b: Subset) -> Result<SetFunctionTable> {
        let view = Restriction::new(self, a, b)?;
        let surviving = view.surviving().to_vec();
        let m = surviving.len();
        if m == 0 {
            // Zero surviving elements: a single-value "table" is not
            // representable (n >= 1); treat as an argument error.
            return Err(Error::argument(
                "restriction removes every ground-set element".to_string(),
            ));
        }
        SetFunctionTable::from_fn(m, |c| view.value(c))
    }

    /// `f(S) ≤ f(S ∪ {e})` for every cover pair.
    pub fn is_monotone(&self) -> bool {
        for mask in 0..self.values.len() {
            let s = Subset(mask as u32);
            for e in 1..=self.n {
                if !s.contains(e) && self.values[mask] > self.value_at(s.with(e)) {
                    return false;
                }
            }
        }
        true
    }

    /// `f(∅) = 0`.
    pub fn is_normalized(&self) -> bool {
        self.values[0] == 0.0
    }

    /// `f(A) > 0` for every nonempty `A`.
    pub fn is_positive(&self) -> bool {
        self.values[1..].iter().all(|&v| v > 0.0)
    }

    /// Entrywise sum; both tables must share the same ground set.
    pub fn add(&self, other: &SetFunctionTable) -> Result<SetFunctionTable> {
        if self.n != other.n {
            return Err(Error::argument("table sizes differ".to_string()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        SetFunctionTable::new(self.n, values)
    }

    pub fn scale(&self, c: f64) -> Result<SetFunctionTable> {
        SetFunctionTable::new(self.n, self.values.iter().map(|v| v * c).collect())
    }

    pub fn negated(&self) -> SetFunctionTable {
        let values = self.values.iter().map(|v| -v).collect();
        SetFunctionTable { n: self.n, values }
    }

    /// Euclidean norm of the table seen as a vector in `R^{2^n}`.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &SetFunctionTable) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::argument("table sizes differ".to_string()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }
}

impl SetFunction for SetFunctionTable {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn value(&self, s: Subset) -> f64 {
        self.value_at(s)
    }
}

/// Modular function `f(S) = c0 + Σ_{k∈S} w_k`.
pub fn modular_from_weights(weights: &[f64], c0: f64) -> Result<SetFunctionTable> {
    let n = weights.len();
    SetFunctionTable::from_fn(n, |s| {
        c0 + s.elements().map(|e| weights[e - 1]).sum::<f64>()
    })
}

/// Lazy restriction of a set function to `Π(A,B) = {C : C ∩ B = A}`.
///
/// The induced function lives on the renumbered ground set `V ∖ B`
/// (surviving elements keep their relative order); `value(C) = f(lift(C) ∪ A)`.
pub struct Restriction<'a, F: SetFunction + ?Sized> {
    base: &'a F,
    fixed: Subset,
    surviving: Vec<Element>,
}

impl<'a, F: SetFunction + ?Sized> Restriction<'a, F> {
    pub fn new(base: &'a F, a: Subset, b: Subset) -> Result<Restriction<'a, F>> {
        let n = base.ground_size();
        let full = Subset::full(n);
        if !a.is_subset_of(b) {
            return Err(Error::argument(format!(
                "A = {a:?} is not a subset of B = {b:?}"
            )));
        }
        if !b.is_subset_of(full) {
            return Err(Error::argument(format!("B = {b:?} exceeds the ground set")));
        }
        let surviving = (full - b).elements().collect();
        Ok(Restriction {
            base,
            fixed: a,
            surviving,
        })
    }

    /// Original labels of the restricted ground set, in increasing order;
    /// element `k` of the restriction is `surviving()[k-1]` upstairs.
    pub fn surviving(&self) -> &[Element] {
        &self.surviving
    }

    /// Map a subset of the restricted ground set back to original labels.
    pub fn lift(&self, c: Subset) -> Subset {
        let mut out = Subset::EMPTY;
        for (k, &orig) in self.surviving.iter().enumerate() {
            if c.contains(k + 1) {
                out = out.with(orig);
            }
        }
        out
    }

    /// Lifted set including the fixed part `A`.
    pub fn lift_full(&self, c: Subset) -> Subset {
        self.lift(c) | self.fixed
    }

    pub fn fixed(&self) -> Subset {
        self.fixed
    }
}

impl<F: SetFunction + ?Sized> SetFunction for Restriction<'_, F> {
    fn ground_size(&self) -> usize {
        self.surviving.len()
    }

    fn value(&self, c: Subset) -> f64 {
        self.base.value(self.lift_full(c))
    }
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    n: usize,
    values: Vec<f64>,
}

/// JSON table format: `{"n": int, "values": [2^n floats]}`.
pub fn table_to_json(f: &SetFunctionTable) -> String {
    serde_json::to_string(&TableFile {
        n: f.n,
        values: f.values.clone(),
    })
    .expect("table serialization cannot fail")
}

pub fn table_from_json(text: &str) -> Result<SetFunctionTable> {
    let file: TableFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad table JSON: {e}")))?;
    SetFunctionTable::new(file.n, file.values)
}

/// CSV table format: header `mask,value`, masks ascending `0..2^n−1`,
/// values printed with round-trip-exact formatting.
pub fn table_to_csv(f: &SetFunctionTable) -> String {
    let mut out = String::from("mask,value\n");
    for (mask, v) in f.values.iter().enumerate() {
        out.push_str(&format!("{mask},{v}\n"));
    }
    out
}

pub fn table_from_csv(text: &str) -> Result<SetFunctionTable> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "mask,value" => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header 'mask,value', got {other:?}"
            )))
        }
    }
    let mut values = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (mask, value) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {}: missing comma", k + 2)))?;
        let mask: usize = mask
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: bad mask: {e}", k + 2)))?;
        if mask != k {
            return Err(Error::Parse(format!(
                "line {}: masks must ascend from 0, got {mask}",
                k + 2
            )));
        }
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: bad value: {e}", k + 2)))?;
        values.push(value);
    }
    let n = values.len().trailing_zeros() as usize;
    if values.is_empty() || values.len() != 1usize << n {
        return Err(Error::Parse(format!(
            "row count {} is not a power of two",
            values.len()
        )));
    }
    SetFunctionTable::new(n, values)
}
