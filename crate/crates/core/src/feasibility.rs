//! Strict homogeneous feasibility: does `{x : r_i · x > 0 for all i}` have
//! a point?
//!
//! Fourier–Motzkin elimination runs from the last coordinate to the first.
//! Every derived row carries the nonnegative combination of input rows that
//! produced it, so the first identically-zero row (`0 > 0`) is a Gordan
//! certificate `y ≥ 0, y ≠ 0, Σ y_i r_i = 0`. When no contradiction appears,
//! a witness is rebuilt by back-substitution through the stored levels.
//!
//! Derived rows are pruned by direction (equal primitive directions mean
//! equal half-spaces) and by Chernikov's rule: after `k` eliminations a row
//! combining more than `k + 1` input rows is implied by the others.
//!
//! Elimination runs in `i128` with checked arithmetic and restarts over
//! exact rationals if anything overflows.

use std::collections::HashSet;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{RatVector, Rational};

/// Rows already multiplied by their signs; the system asks for every row
/// to be strictly positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictSystem {
    forms: Vec<RatVector>,
    dim: usize,
}

impl StrictSystem {
    pub fn new(forms: Vec<RatVector>, dim: usize) -> Result<Self> {
        for (i, f) in forms.iter().enumerate() {
            if f.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: f.dim() });
            }
            if f.is_zero() {
                return Err(Error::ZeroForm { index: i + 1 });
            }
        }
        Ok(StrictSystem { forms, dim })
    }

    pub fn forms(&self) -> &[RatVector] {
        &self.forms
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }
}

/// Either side of Gordan's alternative. Serializes as `{"witness": [...]}`
/// or `{"dual": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FeasibilityResult {
    Witness(RatVector),
    Dual(RatVector),
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Witness(_))
    }

    pub fn witness(&self) -> Option<&RatVector> {
        match self {
            FeasibilityResult::Witness(w) => Some(w),
            FeasibilityResult::Dual(_) => None,
        }
    }

    pub fn dual(&self) -> Option<&RatVector> {
        match self {
            FeasibilityResult::Dual(y) => Some(y),
            FeasibilityResult::Witness(_) => None,
        }
    }

    /// Checks the certificate against `sys` with exact arithmetic.
    pub fn verify(&self, sys: &StrictSystem) -> bool {
        match self {
            FeasibilityResult::Witness(w) => verify_witness(sys, w),
            FeasibilityResult::Dual(y) => verify_dual(sys, y),
        }
    }
}

pub fn verify_witness(sys: &StrictSystem, w: &RatVector) -> bool {
    w.dim() == sys.dim && sys.forms.iter().all(|r| r.dot(w).is_positive())
}

pub fn verify_dual(sys: &StrictSystem, y: &RatVector) -> bool {
    if y.dim() != sys.len() || y.iter().any(Signed::is_negative) || y.is_zero() {
        return false;
    }
    let mut sum = RatVector::zeros(sys.dim);
    for (c, r) in y.iter().zip(&sys.forms) {
        if !c.is_zero() {
            sum = sum.add(&r.scale(c));
        }
    }
    sum.is_zero()
}

#[derive(Clone)]
struct Row {
    coeffs: Vec<Rational>,
    comb: Vec<Rational>,
}

impl Row {
    /// Rescales by a positive factor so the coefficients are coprime integers.
    fn normalized(mut self) -> Row {
        let l = self.coeffs.iter().fold(num_bigint::BigInt::one(), |l, a| l.lcm(a.denom()));
        let g = self
            .coeffs
            .iter()
            .fold(num_bigint::BigInt::zero(), |g, a| g.gcd(&(a.numer() * (&l / a.denom()))));
        if g.is_zero() {
            return self;
        }
        let factor = Rational::new(l, g);
        if !factor.is_one() {
            for a in self.coeffs.iter_mut().chain(self.comb.iter_mut()) {
                *a *= &factor;
            }
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn support(&self) -> usize {
        self.comb.iter().filter(|c| !c.is_zero()).count()
    }
}

/// Stored elimination levels: the variable and the rows over coordinates
/// `0..=var` just before it was eliminated.
type Levels = Vec<(usize, Vec<Vec<Rational>>)>;

/// Decides strict feasibility and returns the matching certificate.
///
/// The empty system is feasible with witness `e_1`.
pub fn strict_feasible(sys: &StrictSystem) -> FeasibilityResult {
    let dim = sys.dim;
    if sys.is_empty() {
        let w = if dim == 0 { RatVector::zeros(0) } else { RatVector::unit(dim, 0) };
        return FeasibilityResult::Witness(w);
    }
    let outcome = match eliminate_small(sys) {
        Some(o) => o,
        None => eliminate_exact(sys),
    };
    match outcome {
        Err(dual) => {
            debug_assert!(verify_dual(sys, &dual));
            FeasibilityResult::Dual(dual)
        }
        Ok(levels) => {
            let w = back_substitute(&levels, dim);
            debug_assert!(verify_witness(sys, &w));
            FeasibilityResult::Witness(w)
        }
    }
}

fn back_substitute(levels: &Levels, dim: usize) -> RatVector {
    let mut x = vec![Rational::zero(); dim];
    for (var, rows) in levels.iter().rev() {
        x[*var] = choose_value(rows, *var, &x);
    }
    RatVector::new(x).primitive()
}

/// Elimination over exact rationals.
fn eliminate_exact(sys: &StrictSystem) -> std::result::Result<Levels, RatVector> {
    let dim = sys.dim;
    let m = sys.len();
    let dual_from = |row: &Row| RatVector::new(row.comb.clone()).primitive();
    let mut current: Vec<Row> = Vec::with_capacity(m);
    let mut seen = HashSet::new();
    for (i, f) in sys.forms.iter().enumerate() {
        let mut comb = vec![Rational::zero(); m];
        comb[i] = Rational::one();
        let row = Row { coeffs: f.entries().to_vec(), comb }.normalized();
        if row.is_zero() {
            return Err(dual_from(&row));
        }
        if seen.insert(row.coeffs.clone()) {
            current.push(row);
        }
    }

    let mut levels: Levels = Vec::with_capacity(dim);
    for var in (0..dim).rev() {
        let eliminated = dim - var;
        let (mut pos, mut neg, mut next) = (Vec::new(), Vec::new(), Vec::new());
        for row in &current {
            if row.coeffs[var].is_positive() {
                pos.push(row);
            } else if row.coeffs[var].is_negative() {
                neg.push(row);
            } else {
                next.push(row.clone());
            }
        }
        let mut seen: HashSet<Vec<Rational>> = next.iter().map(|r| r.coeffs.clone()).collect();
        for p in &pos {
            for q in &neg {
                let a = -&q.coeffs[var];
                let b = p.coeffs[var].clone();
                let mut coeffs: Vec<Rational> =
                    p.coeffs.iter().zip(&q.coeffs).map(|(x, y)| &a * x + &b * y).collect();
                coeffs[var] = Rational::zero();
                let comb = p.comb.iter().zip(&q.comb).map(|(x, y)| &a * x + &b * y).collect();
                let row = Row { coeffs, comb }.normalized();
                if row.is_zero() {
                    return Err(dual_from(&row));
                }
                if row.support() > eliminated + 1 {
                    continue;
                }
                if seen.insert(row.coeffs.clone()) {
                    next.push(row);
                }
            }
        }
        let done = std::mem::replace(&mut current, next);
        levels.push((var, done.into_iter().map(|r| r.coeffs).collect()));
    }
    debug_assert!(current.is_empty());
    Ok(levels)
}

#[derive(Clone)]
struct SmallRow {
    coeffs: Vec<i128>,
    comb: Vec<i128>,
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl SmallRow {
    /// Divides coefficients and combination by their common gcd, keeping
    /// `coeffs = Σ comb_i · row_i` exact.
    fn reduced(mut self) -> SmallRow {
        let g = self.coeffs.iter().chain(&self.comb).fold(0, |g, &a| gcd_i128(g, a));
        if g > 1 {
            for a in self.coeffs.iter_mut().chain(self.comb.iter_mut()) {
                *a /= g;
            }
        }
        self
    }

    /// The primitive direction, used to recognize repeated half-spaces.
    fn direction(&self) -> Vec<i128> {
        let g = self.coeffs.iter().fold(0, |g, &a| gcd_i128(g, a)).max(1);
        self.coeffs.iter().map(|a| a / g).collect()
    }
}

fn combine(a: i128, x: i128, b: i128, y: i128) -> Option<i128> {
    a.checked_mul(x)?.checked_add(b.checked_mul(y)?)
}

/// The same elimination in machine integers. Rows are first cleared of
/// denominators, so a Gordan combination of the cleared rows is rescaled by
/// the clearing factors. Returns `None` on overflow.
fn eliminate_small(sys: &StrictSystem) -> Option<std::result::Result<Levels, RatVector>> {
    use num_traits::ToPrimitive;
    let dim = sys.dim;
    let m = sys.len();
    let mut scales = Vec::with_capacity(m);
    let mut current: Vec<SmallRow> = Vec::with_capacity(m);
    let mut seen = HashSet::new();
    for (i, f) in sys.forms.iter().enumerate() {
        let l = f.iter().fold(num_bigint::BigInt::one(), |l, a| l.lcm(a.denom()));
        let coeffs = f
            .iter()
            .map(|a| (a.numer() * (&l / a.denom())).to_i64().map(i128::from))
            .collect::<Option<Vec<i128>>>()?;
        scales.push(Rational::from_integer(l));
        let mut comb = vec![0; m];
        comb[i] = 1;
        let row = SmallRow { coeffs, comb }.reduced();
        if seen.insert(row.direction()) {
            current.push(row);
        }
    }
    let dual_from = |row: &SmallRow| {
        let y = row.comb.iter().zip(&scales).map(|(&c, s)| Rational::from_integer(c.into()) * s).collect();
        RatVector::new(y).primitive()
    };

    let mut levels: Levels = Vec::with_capacity(dim);
    for var in (0..dim).rev() {
        let eliminated = dim - var;
        let (mut pos, mut neg, mut next) = (Vec::new(), Vec::new(), Vec::new());
        for row in &current {
            match row.coeffs[var].signum() {
                1 => pos.push(row),
                -1 => neg.push(row),
                _ => next.push(row.clone()),
            }
        }
        let mut seen: HashSet<Vec<i128>> = next.iter().map(SmallRow::direction).collect();
        for p in &pos {
            for q in &neg {
                let a = -q.coeffs[var];
                let b = p.coeffs[var];
                let mut coeffs = Vec::with_capacity(dim);
                for (x, y) in p.coeffs.iter().zip(&q.coeffs) {
                    coeffs.push(combine(a, *x, b, *y)?);
                }
                coeffs[var] = 0;
                let mut comb = Vec::with_capacity(m);
                for (x, y) in p.comb.iter().zip(&q.comb) {
                    comb.push(combine(a, *x, b, *y)?);
                }
                let row = SmallRow { coeffs, comb }.reduced();
                if row.coeffs.iter().all(|&c| c == 0) {
                    return Some(Err(dual_from(&row)));
                }
                if row.comb.iter().filter(|&&c| c != 0).count() > eliminated + 1 {
                    continue;
                }
                if seen.insert(row.direction()) {
                    next.push(row);
                }
            }
        }
        let done = std::mem::replace(&mut current, next);
        let rows = done
            .into_iter()
            .map(|r| r.coeffs.into_iter().map(|c| Rational::from_integer(c.into())).collect())
            .collect();
        levels.push((var, rows));
    }
    Some(Ok(levels))
}

/// Picks `x[var]` strictly inside the interval cut out by the rows, given
/// the already fixed lower coordinates.
fn choose_value(rows: &[Vec<Rational>], var: usize, x: &[Rational]) -> Rational {
    let mut lower: Option<Rational> = None;
    let mut upper: Option<Rational> = None;
    for row in rows {
        let c = &row[var];
        if c.is_zero() {
            continue;
        }
        let rest = (0..var).fold(Rational::zero(), |acc, v| acc + &row[v] * &x[v]);
        let bound = -rest / c;
        if c.is_positive() {
            if lower.as_ref().map_or(true, |l| bound > *l) {
                lower = Some(bound);
            }
        } else if upper.as_ref().map_or(true, |u| bound < *u) {
            upper = Some(bound);
        }
    }
    match (lower, upper) {
        (None, None) => Rational::zero(),
        (Some(l), None) => l.floor() + Rational::one(),
        (None, Some(u)) => u.ceil() - Rational::one(),
        (Some(l), Some(u)) => {
            debug_assert!(l < u);
            (l + u) / Rational::from_integer(2.into())
        }
    }
}

/// A witness rescaled onto the boundary of the unit cross-polytope
/// (`‖x‖₁ = 1`).
pub fn interior_witness(sys: &StrictSystem) -> Result<RatVector> {
    match strict_feasible(sys) {
        FeasibilityResult::Witness(w) => {
            let norm = w.l1_norm();
            if norm.is_zero() {
                Ok(w)
            } else {
                Ok(w.scale(&norm.recip()))
            }
        }
        FeasibilityResult::Dual(_) => Err(Error::Infeasible),
    }
}
