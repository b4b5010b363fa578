//! Exact rational vectors and matrices.
//!
//! Scalars are arbitrary-precision rationals in lowest terms. Rank, pivot
//! columns and kernel bases come from a fraction-free (Bareiss) row echelon
//! form computed on integer rows, so no floating point value ever enters a
//! decision.

use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p"` or `"p/q"` (optional sign on `p`, `q` nonzero).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidRational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Formats as `"p"` when the denominator is one, else `"p/q"`.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Serde adapter for a single rational stored as a string.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a list of rationals stored as strings.
pub mod rational_vec_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(format_rational).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// A point or linear form with rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatVector {
    entries: Vec<Rational>,
}

impl RatVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        RatVector { entries }
    }

    pub fn from_i64s(values: &[i64]) -> Self {
        RatVector::new(values.iter().map(|&v| rat(v)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        RatVector::new(vec![Rational::zero(); dim])
    }

    /// The `i`-th standard basis vector.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = RatVector::zeros(dim);
        v.entries[i] = Rational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &RatVector) -> Rational {
        debug_assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn scale(&self, c: &Rational) -> RatVector {
        RatVector::new(self.entries.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> RatVector {
        RatVector::new(self.entries.iter().map(|a| -a).collect())
    }

    pub fn add(&self, other: &RatVector) -> RatVector {
        debug_assert_eq!(self.dim(), other.dim());
        RatVector::new(self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect())
    }

    /// Sum of absolute values.
    pub fn l1_norm(&self) -> Rational {
        self.entries.iter().fold(Rational::zero(), |acc, a| acc + a.abs())
    }

    /// Entries restricted to the given coordinate positions, in that order.
    pub fn select(&self, coords: &[usize]) -> RatVector {
        RatVector::new(coords.iter().map(|&c| self.entries[c].clone()).collect())
    }

    /// True if `other` is a nonzero rational multiple of `self`.
    pub fn is_proportional(&self, other: &RatVector) -> bool {
        if self.dim() != other.dim() || self.is_zero() || other.is_zero() {
            return false;
        }
        let pivot = self.entries.iter().position(|a| !a.is_zero()).unwrap();
        if other.entries[pivot].is_zero() {
            return false;
        }
        let c = &other.entries[pivot] / &self.entries[pivot];
        self.entries.iter().zip(&other.entries).all(|(a, b)| a * &c == *b)
    }

    /// Integer entries with gcd 1 obtained by a positive rescaling.
    /// The zero vector is returned unchanged.
    pub fn primitive(&self) -> RatVector {
        let ints = integer_row(&self.entries);
        let g = ints.iter().fold(BigInt::zero(), |g, a| g.gcd(a));
        if g.is_zero() {
            return self.clone();
        }
        RatVector::new(ints.into_iter().map(|a| Rational::from_integer(a / &g)).collect())
    }

    /// [`RatVector::primitive`] with the sign fixed so the first nonzero
    /// entry is positive.
    pub fn canonical(&self) -> RatVector {
        let p = self.primitive();
        match p.entries.iter().find(|a| !a.is_zero()) {
            Some(first) if first.is_negative() => p.neg(),
            _ => p,
        }
    }
}

impl Index<usize> for RatVector {
    type Output = Rational;

    fn index(&self, i: usize) -> &Rational {
        &self.entries[i]
    }
}

impl fmt::Debug for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.entries.iter().map(format_rational).collect();
        write!(f, "({})", strs.join(", "))
    }
}

impl Serialize for RatVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        rational_vec_str::serialize(&self.entries, s)
    }
}

impl<'de> Deserialize<'de> for RatVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        rational_vec_str::deserialize(d).map(RatVector::new)
    }
}

/// Scales a rational row by the lcm of its denominators.
fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |l, a| l.lcm(a.denom()));
    row.iter().map(|a| a.numer() * (&l / a.denom())).collect()
}

/// A dense rational matrix stored by rows.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct RatMatrix {
    rows: Vec<RatVector>,
    #[serde(skip)]
    ncols: usize,
}

impl RatMatrix {
    pub fn new(rows: Vec<RatVector>, ncols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.dim() != ncols) {
            return Err(Error::DimensionMismatch { expected: ncols, found: bad.dim() });
        }
        Ok(RatMatrix { rows, ncols })
    }

    pub fn from_i64_rows(rows: &[&[i64]], ncols: usize) -> Result<Self> {
        RatMatrix::new(rows.iter().map(|r| RatVector::from_i64s(r)).collect(), ncols)
    }

    pub fn identity(n: usize) -> Self {
        RatMatrix { rows: (0..n).map(|i| RatVector::unit(n, i)).collect(), ncols: n }
    }

    pub fn empty(ncols: usize) -> Self {
        RatMatrix { rows: Vec::new(), ncols }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[RatVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &RatVector {
        &self.rows[i]
    }

    pub fn mul_vec(&self, x: &RatVector) -> RatVector {
        RatVector::new(self.rows.iter().map(|r| r.dot(x)).collect())
    }

    /// Submatrix made of the given rows.
    pub fn select_rows(&self, idx: &[usize]) -> RatMatrix {
        RatMatrix { rows: idx.iter().map(|&i| self.rows[i].clone()).collect(), ncols: self.ncols }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Pivot columns of the row echelon form, ascending.
    pub fn pivot_columns(&self) -> Vec<usize> {
        self.echelon().pivots
    }

    /// A basis of `{x : Mx = 0}`, one canonical integer row per free column.
    pub fn kernel_basis(&self) -> RatMatrix {
        let ech = self.echelon();
        let free: Vec<usize> = (0..self.ncols).filter(|c| !ech.pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut x = vec![Rational::zero(); self.ncols];
            x[f] = Rational::one();
            for (r, &p) in ech.pivots.iter().enumerate().rev() {
                let row = &ech.rows[r];
                let mut acc = Rational::zero();
                for j in p + 1..self.ncols {
                    if !row[j].is_zero() && !x[j].is_zero() {
                        acc += Rational::from_integer(row[j].clone()) * &x[j];
                    }
                }
                x[p] = -acc / Rational::from_integer(row[p].clone());
            }
            basis.push(RatVector::new(x).canonical());
        }
        RatMatrix { rows: basis, ncols: self.ncols }
    }

    fn echelon(&self) -> Echelon {
        bareiss_echelon(self.rows.iter().map(|r| integer_row(r.entries())).collect(), self.ncols)
    }
}

struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

/// Fraction-free row echelon form. Every intermediate entry is a minor of
/// the input, so each division by the previous pivot is exact.
fn bareiss_echelon(mut m: Vec<Vec<BigInt>>, ncols: usize) -> Echelon {
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (top, rest) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..ncols {
                let v = &pivot_row[c] * &row[j] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    Echelon { rows: m, pivots }
}
