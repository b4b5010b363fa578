//! The intersection lattice `L(A)`, its Möbius function and the Zaslavsky
//! chamber count.
//!
//! A flat is identified by its closed index set: the hyperplanes that
//! contain it. Flats are built one codimension at a time by intersecting
//! each flat with each hyperplane not already containing it and closing the
//! result.

use std::collections::HashMap;

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::linalg::{RatMatrix, RatVector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flat {
    contains: Vec<usize>,
    mask: u64,
    codim: usize,
    kernel: RatMatrix,
}

impl Flat {
    /// 0-based indices of the hyperplanes containing this flat, ascending.
    pub fn contains(&self) -> &[usize] {
        &self.contains
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    /// Rows form a basis of the flat as a subspace.
    pub fn kernel(&self) -> &RatMatrix {
        &self.kernel
    }

    pub fn dim(&self) -> usize {
        self.kernel.nrows()
    }

    /// The localization is Boolean: its hyperplanes are independent.
    pub fn is_boolean(&self) -> bool {
        self.contains.len() == self.codim
    }

    /// 1-based indices, as printed in reports.
    pub fn labels_1based(&self) -> Vec<usize> {
        self.contains.iter().map(|i| i + 1).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Lattice {
    dim: usize,
    n: usize,
    flats: Vec<Flat>,
    moebius: Vec<i64>,
    by_mask: HashMap<u64, usize>,
}

fn mask_of(indices: &[usize]) -> u64 {
    indices.iter().fold(0, |m, &i| m | 1 << i)
}

fn indices_of(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

/// The flat cut out by the hyperplanes in `mask`, with its closed index set.
fn close(forms: &RatMatrix, mask: u64) -> Flat {
    let n = forms.nrows();
    let dim = forms.ncols();
    let gens = indices_of(mask, n);
    let kernel = forms.select_rows(&gens).kernel_basis();
    let contains: Vec<usize> = (0..n)
        .filter(|&j| kernel.rows().iter().all(|k| forms.row(j).dot(k) == num_traits::Zero::zero()))
        .collect();
    Flat { mask: mask_of(&contains), codim: dim - kernel.nrows(), contains, kernel }
}

/// Builds `L` for arbitrary nonzero forms, essential or not.
pub fn lattice_of_forms(forms: &[RatVector], dim: usize) -> Result<Lattice> {
    let n = forms.len();
    if n > 64 {
        return Err(Error::InvalidArgument("at most 64 hyperplanes are supported".into()));
    }
    let matrix = RatMatrix::new(forms.to_vec(), dim)?;
    let top = Flat { contains: Vec::new(), mask: 0, codim: 0, kernel: RatMatrix::identity(dim) };
    let mut flats = vec![top];
    let mut level: Vec<usize> = vec![0];
    while !level.is_empty() {
        let mut next_level = Vec::new();
        let mut found: HashMap<u64, usize> = HashMap::new();
        for &fid in &level {
            let base = flats[fid].mask;
            let mut covered = base;
            for i in 0..n {
                if covered >> i & 1 == 1 {
                    continue;
                }
                let g = close(&matrix, base | 1 << i);
                covered |= g.mask;
                if !found.contains_key(&g.mask) {
                    found.insert(g.mask, flats.len());
                    next_level.push(flats.len());
                    flats.push(g);
                }
            }
        }
        level = next_level;
    }
    // level order already groups by codim; sort within a codim by index set
    flats.sort_by(|a, b| a.codim.cmp(&b.codim).then_with(|| a.contains.cmp(&b.contains)));
    let by_mask = flats.iter().enumerate().map(|(i, f)| (f.mask, i)).collect();
    let moebius = moebius_values(&flats);
    Ok(Lattice { dim, n, flats, moebius, by_mask })
}

/// `μ(V) = 1` and `Σ_{Y ⊇ X} μ(Y) = 0` for `X ≠ V`, where `Y ⊇ X` as
/// subspaces means `Y.contains ⊆ X.contains`. Flats must be sorted by codim.
fn moebius_values(flats: &[Flat]) -> Vec<i64> {
    let mut mu = vec![0i64; flats.len()];
    for x in 0..flats.len() {
        if flats[x].codim == 0 {
            mu[x] = 1;
            continue;
        }
        let xm = flats[x].mask;
        let sum: i64 = (0..x)
            .filter(|&y| flats[y].codim < flats[x].codim && flats[y].mask & !xm == 0)
            .map(|y| mu[y])
            .sum();
        mu[x] = -sum;
    }
    mu
}

pub fn build_lattice(arr: &Arrangement) -> Lattice {
    lattice_of_forms(&arr.forms(), arr.dim()).expect("validated arrangement")
}

impl Lattice {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// All flats, sorted by codimension then by index set.
    pub fn flats(&self) -> &[Flat] {
        &self.flats
    }

    pub fn flat(&self, id: usize) -> &Flat {
        &self.flats[id]
    }

    pub fn moebius(&self, id: usize) -> i64 {
        self.moebius[id]
    }

    pub fn moebius_values(&self) -> &[i64] {
        &self.moebius
    }

    /// Flat id for a closed index set given as a bit mask.
    pub fn find(&self, mask: u64) -> Option<usize> {
        self.by_mask.get(&mask).copied()
    }

    pub fn find_indices(&self, contains: &[usize]) -> Option<usize> {
        self.find(mask_of(contains))
    }

    pub fn with_codim(&self, k: usize) -> impl Iterator<Item = (usize, &Flat)> {
        self.flats.iter().enumerate().filter(move |(_, f)| f.codim == k)
    }

    /// Number of flats of each codimension `0..=max codim`.
    pub fn shape(&self) -> Vec<usize> {
        let top = self.flats.iter().map(|f| f.codim).max().unwrap_or(0);
        (0..=top).map(|k| self.with_codim(k).count()).collect()
    }

    /// The minimal flat (the common intersection of all hyperplanes).
    pub fn bottom(&self) -> usize {
        self.flats.len() - 1
    }

    /// Coefficients of `χ(t) = Σ_X μ(X) t^{dim X}`, highest degree first
    /// (`t^ℓ, …, t^0`).
    pub fn characteristic_polynomial(&self) -> Vec<i64> {
        let mut coeffs = vec![0i64; self.dim + 1];
        for (f, mu) in self.flats.iter().zip(&self.moebius) {
            coeffs[self.dim - f.dim()] += mu;
        }
        coeffs
    }
}

/// The localization `A_X`: indices of the hyperplanes containing `X`.
pub fn localization(lattice: &Lattice, flat: &Flat) -> Result<Vec<usize>> {
    match lattice.find(flat.mask) {
        Some(id) if lattice.flat(id).contains == flat.contains => Ok(flat.contains.clone()),
        _ => Err(Error::UnknownFlat),
    }
}

/// Zaslavsky: the number of chambers equals `Σ_X |μ(X)|`.
pub fn chamber_count_oracle(lattice: &Lattice) -> u64 {
    lattice.moebius.iter().map(|m| m.unsigned_abs()).sum()
}

/// Rejects index sets that are not closed flats of `arr`.
pub fn flat_of(arr: &Arrangement, contains: &[usize]) -> Result<Flat> {
    if contains.iter().any(|&i| i >= arr.n()) {
        return Err(Error::UnknownFlat);
    }
    let f = close(&arr.forms_matrix(), mask_of(contains));
    let mut sorted = contains.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if f.contains != sorted {
        return Err(Error::UnknownFlat);
    }
    Ok(f)
}
