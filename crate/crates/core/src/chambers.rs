//! Chambers, walls, flows and sinks.
//!
//! A chamber is a globally consistent sign vector. Hyperplane `i` is a wall
//! of chamber `C` when `H_i` carries a facet of `C`, i.e. some point of `H_i`
//! satisfies every other inequality of `C` strictly. That is decided by
//! parametrizing `H_i` with a kernel basis and running the strict kernel on
//! the `ℓ − 1` dimensional restriction.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::arrangement::{Arrangement, Sign, SignVector};
use crate::consistency::check_limit;
use crate::error::{Error, Result};
use crate::feasibility::{strict_feasible, FeasibilityResult, StrictSystem};
use crate::linalg::{RatMatrix, RatVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chamber {
    pub signs: SignVector,
    pub witness: RatVector,
    /// 0-based wall indices, ascending.
    #[serde(serialize_with = "crate::arrangement::one_based")]
    pub walls: Vec<usize>,
}

impl Chamber {
    /// The chamber with the given signs; fails if they are inconsistent.
    pub fn new(arr: &Arrangement, signs: SignVector) -> Result<Chamber> {
        let charts = HyperplaneCharts::new(arr);
        Chamber::with_charts(arr, &charts, signs)
    }

    fn with_charts(arr: &Arrangement, charts: &HyperplaneCharts, signs: SignVector) -> Result<Chamber> {
        arr.check_sign_vector(&signs)?;
        let all: Vec<usize> = (0..arr.n()).collect();
        let sys = StrictSystem::new(arr.signed_rows(&signs, &all), arr.dim())?;
        match strict_feasible(&sys) {
            FeasibilityResult::Witness(witness) => {
                let walls = charts.walls(arr, &signs);
                Ok(Chamber { signs, witness, walls })
            }
            FeasibilityResult::Dual(_) => {
                Err(Error::InvalidSignVector(format!("{signs} is not a chamber")))
            }
        }
    }

    pub fn walls_1based(&self) -> Vec<usize> {
        self.walls.iter().map(|i| i + 1).collect()
    }
}

/// Kernel bases of every hyperplane, used to restrict systems to `H_i`.
pub struct HyperplaneCharts {
    bases: Vec<RatMatrix>,
}

impl HyperplaneCharts {
    pub fn new(arr: &Arrangement) -> Self {
        let bases = (0..arr.n())
            .map(|i| RatMatrix::new(vec![arr.form(i).clone()], arr.dim()).unwrap().kernel_basis())
            .collect();
        HyperplaneCharts { bases }
    }

    /// Whether `H_i` supports a facet of the chamber `signs`.
    pub fn is_wall(&self, arr: &Arrangement, signs: &SignVector, i: usize) -> bool {
        let basis = &self.bases[i];
        let rows: Vec<RatVector> = (0..arr.n())
            .filter(|&j| j != i)
            .map(|j| {
                let f = signs.get(j).apply(arr.form(j));
                RatVector::new(basis.rows().iter().map(|b| f.dot(b)).collect())
            })
            .collect();
        // no other form vanishes on H_i since forms are pairwise non-proportional
        let sys = StrictSystem::new(rows, basis.nrows()).expect("non-proportional forms");
        strict_feasible(&sys).is_feasible()
    }

    pub fn walls(&self, arr: &Arrangement, signs: &SignVector) -> Vec<usize> {
        (0..arr.n()).filter(|&i| self.is_wall(arr, signs, i)).collect()
    }
}

/// Walls of the chamber `C`.
pub fn walls(arr: &Arrangement, chamber: &SignVector) -> Vec<usize> {
    HyperplaneCharts::new(arr).walls(arr, chamber)
}

/// Every chamber, lexicographically sorted, found by depth-first sign
/// assignment that abandons an inconsistent prefix. Walls are read off the
/// chamber set: `H_i` is a wall of `C` exactly when flipping the `i`-th sign
/// of `C` gives another chamber.
pub fn enumerate_chambers(arr: &Arrangement, limit: usize) -> Result<Vec<Chamber>> {
    check_limit(arr.n(), limit)?;
    let found = chambers_with_witnesses(arr);
    let masks: HashSet<u64> = found.iter().map(|(s, _)| s.to_mask()).collect();
    Ok(found
        .into_iter()
        .map(|(signs, witness)| {
            let m = signs.to_mask();
            let walls = (0..arr.n()).filter(|&i| masks.contains(&(m ^ 1 << i))).collect();
            Chamber { signs, witness, walls }
        })
        .collect())
}

/// Sign vectors of all chambers, sorted.
pub fn chamber_sign_vectors(arr: &Arrangement) -> Vec<SignVector> {
    chambers_with_witnesses(arr).into_iter().map(|(s, _)| s).collect()
}

type Partial = (Vec<Sign>, RatVector);

fn chambers_with_witnesses(arr: &Arrangement) -> Vec<(SignVector, RatVector)> {
    let n = arr.n();
    let depth = n.min(6);
    let mut prefixes = Vec::new();
    extend(arr, (Vec::new(), RatVector::zeros(arr.dim())), depth, &mut prefixes);
    let parts: Vec<Vec<Partial>> = prefixes
        .into_par_iter()
        .map(|p| {
            let mut out = Vec::new();
            extend(arr, p, n, &mut out);
            out
        })
        .collect();
    parts.into_iter().flatten().map(|(s, w)| (SignVector::new(s), w)).collect()
}

fn prefix_witness(arr: &Arrangement, prefix: &[Sign]) -> Option<RatVector> {
    let rows = prefix.iter().enumerate().map(|(i, s)| s.apply(arr.form(i))).collect();
    match strict_feasible(&StrictSystem::new(rows, arr.dim()).expect("validated forms")) {
        FeasibilityResult::Witness(w) => Some(w),
        FeasibilityResult::Dual(_) => None,
    }
}

fn prefix_feasible(arr: &Arrangement, prefix: &[Sign]) -> bool {
    prefix_witness(arr, prefix).is_some()
}

/// Extends a feasible prefix, reusing its witness when it already lies on
/// the requested side of the next hyperplane.
fn extend(arr: &Arrangement, (prefix, witness): Partial, stop: usize, out: &mut Vec<Partial>) {
    if prefix.len() == stop {
        out.push((prefix, witness));
        return;
    }
    let value = arr.form(prefix.len()).dot(&witness);
    for s in [Sign::Plus, Sign::Minus] {
        let mut next = prefix.clone();
        next.push(s);
        let w = if Sign::of(&value) == Some(s) { Some(witness.clone()) } else { prefix_witness(arr, &next) };
        if let Some(w) = w {
            extend(arr, (next, w), stop, out);
        }
    }
}

/// The lexicographically first chamber, built greedily: an open feasible
/// prefix always extends to a chamber.
pub fn first_chamber(arr: &Arrangement) -> Chamber {
    let mut prefix = Vec::with_capacity(arr.n());
    for _ in 0..arr.n() {
        prefix.push(Sign::Plus);
        if !prefix_feasible(arr, &prefix) {
            *prefix.last_mut().unwrap() = Sign::Minus;
        }
    }
    Chamber::new(arr, SignVector::new(prefix)).expect("greedy prefix is consistent")
}

/// `C` lies on the `ε` side of each of its walls.
pub fn is_sink(eps: &SignVector, chamber: &Chamber) -> bool {
    chamber.walls.iter().all(|&i| chamber.signs.get(i) == eps.get(i))
}

/// A walk through adjacent chambers, each step crossing into the `ε` side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlowPath {
    pub chambers: Vec<SignVector>,
    /// 0-based crossed hyperplanes; `crossed[p]` separates `chambers[p]` and
    /// `chambers[p + 1]`.
    #[serde(serialize_with = "crate::arrangement::one_based")]
    pub crossed: Vec<usize>,
}

impl FlowPath {
    pub fn len(&self) -> usize {
        self.crossed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossed.is_empty()
    }

    pub fn end(&self) -> &SignVector {
        self.chambers.last().expect("path has a start")
    }

    pub fn crossed_1based(&self) -> Vec<usize> {
        self.crossed.iter().map(|i| i + 1).collect()
    }
}

/// Follows the flow from `start`, always crossing the lowest-index wall whose
/// chamber sign disagrees with `ε`, and returns the path with its final sink.
pub fn flow_to_sink(arr: &Arrangement, eps: &SignVector, start: &Chamber) -> Result<(FlowPath, Chamber)> {
    arr.check_sign_vector(eps)?;
    let charts = HyperplaneCharts::new(arr);
    let mut current = start.clone();
    let mut path = FlowPath { chambers: vec![current.signs.clone()], crossed: Vec::new() };
    while let Some(&i) = current.walls.iter().find(|&&i| current.signs.get(i) != eps.get(i)) {
        let next = current.signs.flipped(i);
        current = Chamber::with_charts(arr, &charts, next)?;
        path.chambers.push(current.signs.clone());
        path.crossed.push(i);
        // a flow crosses each hyperplane at most once
        assert!(path.len() <= arr.n(), "flow longer than the number of hyperplanes");
    }
    Ok((path, current))
}

/// Every sink of `ε`.
pub fn all_sinks(arr: &Arrangement, eps: &SignVector, limit: usize) -> Result<Vec<Chamber>> {
    arr.check_sign_vector(eps)?;
    Ok(enumerate_chambers(arr, limit)?.into_iter().filter(|c| is_sink(eps, c)).collect())
}
