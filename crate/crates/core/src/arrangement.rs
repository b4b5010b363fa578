//! Central arrangements as ordered lists of rational linear forms.
//!
//! Forms are kept exactly as given: the positive side of hyperplane `i` is
//! `{x : α_i(x) > 0}` for the stored `α_i`, so rescaling a form by a negative
//! number changes the meaning of its signs.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{rational_vec_str, RatMatrix, RatVector, Rational};

/// Sign vectors are packed into `u64` masks during enumeration.
pub const MAX_HYPERPLANES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    /// Sign of a nonzero rational; `None` for zero.
    pub fn of(q: &Rational) -> Option<Sign> {
        if q.is_positive() {
            Some(Sign::Plus)
        } else if q.is_negative() {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    pub fn apply(self, v: &RatVector) -> RatVector {
        match self {
            Sign::Plus => v.clone(),
            Sign::Minus => v.neg(),
        }
    }
}

/// A choice of open half-space per hyperplane. Orders like its string form
/// (`'+' < '-'`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector(Vec<Sign>);

impl SignVector {
    pub fn new(signs: Vec<Sign>) -> Self {
        SignVector(signs)
    }

    pub fn all_plus(n: usize) -> Self {
        SignVector(vec![Sign::Plus; n])
    }

    /// Bit `i` of `mask` set means `Minus` at index `i`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        SignVector((0..n).map(|i| if mask >> i & 1 == 1 { Sign::Minus } else { Sign::Plus }).collect())
    }

    pub fn to_mask(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Sign::Minus)
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Sign {
        self.0[i]
    }

    pub fn negated(&self) -> SignVector {
        SignVector(self.0.iter().map(|s| s.flip()).collect())
    }

    pub fn flipped(&self, i: usize) -> SignVector {
        let mut v = self.0.clone();
        v[i] = v[i].flip();
        SignVector(v)
    }

    /// 0-based indices where the two vectors differ.
    pub fn differences(&self, other: &SignVector) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i] != other.0[i]).collect()
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.as_char()))
    }
}

impl fmt::Debug for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for SignVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                _ => Err(Error::InvalidSignVector(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(SignVector)
    }
}

impl Serialize for SignVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SignVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperplane {
    pub form: RatVector,
    pub label: String,
}

/// A validated central essential arrangement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    dim: usize,
    hyperplanes: Vec<Hyperplane>,
}

fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("H{i}")).collect()
}

/// Rejects zero and pairwise proportional forms.
fn check_forms(forms: &[RatVector], dim: usize) -> Result<()> {
    if forms.len() > MAX_HYPERPLANES {
        return Err(Error::InvalidArgument(format!(
            "at most {MAX_HYPERPLANES} hyperplanes are supported, got {}",
            forms.len()
        )));
    }
    for (i, f) in forms.iter().enumerate() {
        if f.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: f.dim() });
        }
        if f.is_zero() {
            return Err(Error::ZeroForm { index: i + 1 });
        }
    }
    for i in 0..forms.len() {
        for j in i + 1..forms.len() {
            if forms[i].is_proportional(&forms[j]) {
                return Err(Error::DuplicateHyperplane { first: i + 1, second: j + 1 });
            }
        }
    }
    Ok(())
}

impl Arrangement {
    /// Builds and validates an arrangement. Missing labels default to `H1, H2, …`.
    pub fn new(dim: usize, forms: Vec<RatVector>, labels: Option<Vec<String>>) -> Result<Self> {
        let labels = labels.unwrap_or_else(|| default_labels(forms.len()));
        if labels.len() != forms.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} forms",
                labels.len(),
                forms.len()
            )));
        }
        let hyperplanes = forms
            .into_iter()
            .zip(labels)
            .map(|(form, label)| Hyperplane { form, label })
            .collect();
        Arrangement { dim, hyperplanes }.validate()
    }

    pub fn from_i64_forms(dim: usize, forms: &[&[i64]]) -> Result<Self> {
        Arrangement::new(dim, forms.iter().map(|f| RatVector::from_i64s(f)).collect(), None)
    }

    /// Returns the arrangement unchanged if it is central, essential and
    /// free of repeated hyperplanes.
    pub fn validate(self) -> Result<Self> {
        if self.dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        let forms = self.forms();
        check_forms(&forms, self.dim)?;
        let rank = RatMatrix::new(forms, self.dim)?.rank();
        if rank < self.dim {
            return Err(Error::NotEssential { rank, dim: self.dim });
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }

    pub fn form(&self, i: usize) -> &RatVector {
        &self.hyperplanes[i].form
    }

    pub fn forms(&self) -> Vec<RatVector> {
        self.hyperplanes.iter().map(|h| h.form.clone()).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.hyperplanes.iter().map(|h| h.label.clone()).collect()
    }

    pub fn forms_matrix(&self) -> RatMatrix {
        RatMatrix::new(self.forms(), self.dim).expect("validated dimensions")
    }

    /// Rank of the forms indexed by `indices` (0-based).
    pub fn rank_of(&self, indices: &[usize]) -> usize {
        self.forms_matrix().select_rows(indices).rank()
    }

    /// Rows `ε_i α_i` for the given 0-based indices, in that order.
    pub fn signed_rows(&self, eps: &SignVector, indices: &[usize]) -> Vec<RatVector> {
        indices.iter().map(|&i| eps.get(i).apply(self.form(i))).collect()
    }

    pub fn check_sign_vector(&self, eps: &SignVector) -> Result<()> {
        if eps.len() != self.n() {
            return Err(Error::InvalidSignVector(format!(
                "{eps} has length {}, arrangement has {} hyperplanes",
                eps.len(),
                self.n()
            )));
        }
        Ok(())
    }

    /// Adds a hyperplane, revalidating.
    pub fn with_hyperplane(&self, form: RatVector, label: &str) -> Result<Arrangement> {
        let mut hyperplanes = self.hyperplanes.clone();
        hyperplanes.push(Hyperplane { form, label: label.to_string() });
        Arrangement { dim: self.dim, hyperplanes }.validate()
    }

    pub fn to_file(&self) -> ArrangementFile {
        ArrangementFile { dim: self.dim, forms: self.forms(), labels: Some(self.labels()) }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: ArrangementFile =
            serde_json::from_str(s).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        file.into_arrangement()
    }
}

/// Serializes 0-based hyperplane indices as the 1-based labels used in
/// reports.
pub fn one_based<S: serde::Serializer>(v: &[usize], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|i| i + 1))
}

/// `ε_i = sign(α_i(x))`.
pub fn sign_vector_of_point(arr: &Arrangement, x: &RatVector) -> Result<SignVector> {
    if x.dim() != arr.dim() {
        return Err(Error::DimensionMismatch { expected: arr.dim(), found: x.dim() });
    }
    arr.hyperplanes
        .iter()
        .enumerate()
        .map(|(i, h)| Sign::of(&h.form.dot(x)).ok_or(Error::OnHyperplane(i + 1)))
        .collect::<Result<Vec<_>>>()
        .map(SignVector)
}

/// Restricts a central arrangement to a complement of the common
/// intersection of its hyperplanes. The complement is spanned by the
/// coordinate vectors of the pivot columns, so the new forms are the old
/// forms restricted to those columns.
pub fn essentialize(forms: Vec<RatVector>, dim: usize) -> Result<Arrangement> {
    if forms.is_empty() {
        return Err(Error::InvalidArgument("no forms to essentialize".into()));
    }
    check_forms(&forms, dim)?;
    let pivots = RatMatrix::new(forms.clone(), dim)?.pivot_columns();
    let reduced = forms.iter().map(|f| f.select(&pivots)).collect();
    Arrangement::new(pivots.len(), reduced, None)
}

/// On-disk JSON shape of an arrangement.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArrangementFile {
    pub dim: usize,
    pub forms: Vec<RatVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl ArrangementFile {
    pub fn into_arrangement(self) -> Result<Arrangement> {
        Arrangement::new(self.dim, self.forms, self.labels)
    }
}

/// Affine hyperplanes `⟨a, x⟩ + c = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineArrangement {
    dim: usize,
    forms: Vec<RatVector>,
    constants: Vec<Rational>,
    labels: Vec<String>,
}

impl AffineArrangement {
    pub fn new(
        dim: usize,
        forms: Vec<RatVector>,
        constants: Vec<Rational>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let labels = labels.unwrap_or_else(|| default_labels(forms.len()));
        if constants.len() != forms.len() || labels.len() != forms.len() {
            return Err(Error::InvalidArgument(
                "forms, constants and labels must have equal length".into(),
            ));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        for (i, f) in forms.iter().enumerate() {
            if f.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: f.dim() });
            }
            if f.is_zero() {
                return Err(Error::ZeroForm { index: i + 1 });
            }
        }
        let homog: Vec<RatVector> = forms
            .iter()
            .zip(&constants)
            .map(|(f, c)| homogenize(f, c))
            .collect();
        check_forms(&homog, dim + 1)?;
        Ok(AffineArrangement { dim, forms, constants, labels })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.forms.len()
    }

    pub fn forms(&self) -> &[RatVector] {
        &self.forms
    }

    pub fn constants(&self) -> &[Rational] {
        &self.constants
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Value of the `i`-th affine form at `x`.
    pub fn eval(&self, i: usize, x: &RatVector) -> Rational {
        self.forms[i].dot(x) + &self.constants[i]
    }

    pub fn to_file(&self) -> AffineArrangementFile {
        AffineArrangementFile {
            dim: self.dim,
            forms: self.forms.clone(),
            constants: self.constants.clone(),
            labels: Some(self.labels.clone()),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: AffineArrangementFile =
            serde_json::from_str(s).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        AffineArrangement::new(file.dim, file.forms, file.constants, file.labels)
    }
}

fn homogenize(form: &RatVector, constant: &Rational) -> RatVector {
    let mut e = form.entries().to_vec();
    e.push(constant.clone());
    RatVector::new(e)
}

/// On-disk JSON shape of an affine arrangement.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AffineArrangementFile {
    pub dim: usize,
    pub forms: Vec<RatVector>,
    #[serde(with = "rational_vec_str")]
    pub constants: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// Homogenizes `⟨a, x⟩ + c` to `⟨a, x⟩ + c·z` and appends the hyperplane
/// at infinity `z = 0` as the last hyperplane.
pub fn cone(affine: &AffineArrangement) -> Result<Arrangement> {
    let d = affine.dim + 1;
    let mut forms: Vec<RatVector> = affine
        .forms
        .iter()
        .zip(&affine.constants)
        .map(|(f, c)| homogenize(f, c))
        .collect();
    forms.push(RatVector::unit(d, affine.dim));
    let mut labels = affine.labels.clone();
    labels.push("H_inf".to_string());
    Arrangement::new(d, forms, Some(labels))
}

/// True if `x` lies on none of the hyperplanes.
pub fn is_generic_point(arr: &Arrangement, x: &RatVector) -> bool {
    arr.hyperplanes.iter().all(|h| !h.form.dot(x).is_zero())
}
