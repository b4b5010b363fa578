//! Constructors for the standard example arrangements, each checked for the
//! combinatorial property it is meant to have.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arrangement::{cone, essentialize, AffineArrangement, Arrangement, Sign, SignVector};
use crate::consistency::{is_globally_consistent, is_locally_consistent};
use crate::error::{Error, Result};
use crate::feasibility::{strict_feasible, StrictSystem};
use crate::lattice::{build_lattice, lattice_of_forms};
use crate::linalg::{rat, RatMatrix, RatVector};

/// Attempts made by the randomized constructors before giving up.
pub const RETRY_BUDGET: usize = 64;

/// Randomness for the randomized constructors: the RNG seed and the bound on
/// the absolute value of drawn integer coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenericitySeed {
    pub seed: u64,
    pub coefficient_bound: i64,
}

impl GenericitySeed {
    pub fn new(seed: u64) -> Self {
        GenericitySeed { seed, coefficient_bound: 5 }
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

impl From<u64> for GenericitySeed {
    fn from(seed: u64) -> Self {
        GenericitySeed::new(seed)
    }
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize, bound: i64) -> RatVector {
    let v: Vec<i64> = (0..dim).map(|_| rng.gen_range(-bound..=bound)).collect();
    RatVector::from_i64s(&v)
}

/// The coordinate hyperplanes of `ℝ^ℓ`.
pub fn boolean(dim: usize) -> Result<Arrangement> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    Arrangement::new(dim, (0..dim).map(|i| RatVector::unit(dim, i)).collect(), None)
}

/// `x, y, z, x + y + z` in `ℝ³`.
pub fn generic4() -> Arrangement {
    Arrangement::from_i64_forms(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]]).expect("valid forms")
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `n` random forms in `ℝ^ℓ` with every `ℓ`-subset independent.
pub fn generic(n: usize, dim: usize, seed: GenericitySeed) -> Result<Arrangement> {
    if dim == 0 || n < dim {
        return Err(Error::InvalidArgument(format!("need n ≥ ℓ ≥ 1, got n = {n}, ℓ = {dim}")));
    }
    if seed.coefficient_bound < 1 {
        return Err(Error::InvalidArgument("coefficient bound must be positive".into()));
    }
    let mut rng = seed.rng();
    let checks = subsets(n, dim);
    for _ in 0..RETRY_BUDGET {
        let forms: Vec<RatVector> = (0..n).map(|_| random_vector(&mut rng, dim, seed.coefficient_bound)).collect();
        let m = RatMatrix::new(forms.clone(), dim)?;
        if checks.iter().all(|s| m.select_rows(s).rank() == dim) {
            return Arrangement::new(dim, forms, None);
        }
    }
    Err(Error::GenericityFailed { attempts: RETRY_BUDGET })
}

/// Forms `x_i − x_j` for `i < j` on `ℝ^m`, restricted to `ℝ^{m−1}`.
pub fn braid(m: usize) -> Result<Arrangement> {
    if m < 2 {
        return Err(Error::InvalidArgument("braid arrangement needs m ≥ 2".into()));
    }
    let mut forms = Vec::new();
    let mut labels = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            forms.push(RatVector::unit(m, i).add(&RatVector::unit(m, j).neg()));
            labels.push(format!("x{}-x{}", i + 1, j + 1));
        }
    }
    let reduced = essentialize(forms, m)?;
    Arrangement::new(reduced.dim(), reduced.forms(), Some(labels))
}

/// Six affine lines with two triple points `{1,3,5}` and `{2,4,6}` and three
/// parallel classes `{1,2}`, `{3,4}`, `{5,6}`:
/// `x + 2y = 10`, `x + 2y = 8`, `x = 6`, `x = 4`, `x − 2y = 2`, `x − 2y = 0`.
pub fn x2_affine() -> Result<AffineArrangement> {
    let rows: [([i64; 2], i64); 6] = [([1, 2], -10), ([1, 2], -8), ([1, 0], -6), ([1, 0], -4), ([1, -2], -2), ([1, -2], 0)];
    let a = AffineArrangement::new(
        2,
        rows.iter().map(|(f, _)| RatVector::from_i64s(f)).collect(),
        rows.iter().map(|(_, c)| rat(*c)).collect(),
        None,
    )?;
    verify_x2(&a)?;
    Ok(a)
}

/// The cone over [`x2_affine`]: seven planes in `ℝ³`.
pub fn x2_coned() -> Result<Arrangement> {
    cone(&x2_affine()?)
}

/// Checks the incidences of an affine line arrangement against those of
/// `X₂`, reading points and parallel classes off the rank-2 flats of the
/// cone.
pub fn verify_x2(affine: &AffineArrangement) -> Result<()> {
    if affine.dim() != 2 || affine.n() != 6 {
        return Err(Error::RealizationInvalid("expected six lines in the plane".into()));
    }
    let coned = cone(affine)?;
    let lattice = build_lattice(&coned);
    let infinity = 6;
    let mut points = BTreeSet::new();
    let mut parallel = BTreeSet::new();
    for (_, f) in lattice.with_codim(2) {
        let c = f.contains().to_vec();
        if c.contains(&infinity) {
            parallel.insert(c.into_iter().filter(|&i| i != infinity).collect::<Vec<_>>());
        } else {
            points.insert(c);
        }
    }
    let triples: BTreeSet<Vec<usize>> = points.iter().filter(|p| p.len() > 2).cloned().collect();
    let expected_triples: BTreeSet<Vec<usize>> = [vec![0, 2, 4], vec![1, 3, 5]].into();
    let expected_parallel: BTreeSet<Vec<usize>> = [vec![0, 1], vec![2, 3], vec![4, 5]].into();
    if triples != expected_triples {
        return Err(Error::RealizationInvalid(format!("triple points {triples:?}")));
    }
    if parallel != expected_parallel {
        return Err(Error::RealizationInvalid(format!("parallel classes {parallel:?}")));
    }
    if points.len() != 8 {
        return Err(Error::RealizationInvalid(format!("{} intersection points, expected 8", points.len())));
    }
    Ok(())
}

/// `dim(X ∩ Y) = max(0, dim X + dim Y − ℓ)` for every flat `X` of the first
/// family and `Y` of the second.
fn in_general_position(a: &[RatVector], b: &[RatVector], dim: usize) -> Result<bool> {
    let la = lattice_of_forms(a, dim)?;
    let lb = lattice_of_forms(b, dim)?;
    for x in la.flats() {
        for y in lb.flats() {
            let mut rows: Vec<RatVector> = x.contains().iter().map(|&i| a[i].clone()).collect();
            rows.extend(y.contains().iter().map(|&j| b[j].clone()));
            let meet = dim - RatMatrix::new(rows, dim)?.rank();
            let expected = (x.dim() + y.dim()).saturating_sub(dim);
            if meet != expected {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn feasible(rows: Vec<RatVector>, dim: usize) -> bool {
    strict_feasible(&StrictSystem::new(rows, dim).expect("nonzero forms")).is_feasible()
}

/// Greedy sign choice for `forms` starting from fixed leading signs, giving
/// the lexicographically first chamber with that prefix.
fn chamber_with_prefix(forms: &[RatVector], dim: usize, prefix: &[Sign]) -> Vec<Sign> {
    let mut signs = prefix.to_vec();
    let mut rows: Vec<RatVector> = forms.iter().zip(prefix).map(|(f, s)| s.apply(f)).collect();
    for f in &forms[prefix.len()..] {
        rows.push(f.clone());
        if feasible(rows.clone(), dim) {
            signs.push(Sign::Plus);
        } else {
            *rows.last_mut().unwrap() = f.neg();
            signs.push(Sign::Minus);
        }
    }
    signs
}

/// `A ∪ gB` for a random integer `g` in general position with respect to
/// `A`, together with a locally consistent but globally inconsistent `ε`:
/// a chamber `C₀` of `A` missed by `gH_{n+1}`, the side of `gH_{n+1}` away
/// from `C₀`, then a chamber of `gB` on that side. `B` is given by its forms
/// and need not be essential.
pub fn generic_union(a: &Arrangement, b: &[RatVector], seed: GenericitySeed) -> Result<(Arrangement, SignVector)> {
    let dim = a.dim();
    if b.is_empty() {
        return Err(Error::InvalidArgument("second arrangement must be nonempty".into()));
    }
    if dim < 2 {
        return Err(Error::InvalidArgument("generic unions need dimension at least 2".into()));
    }
    if let Some(f) = b.iter().find(|f| f.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: f.dim() });
    }
    let mut rng = seed.rng();
    let a_forms = a.forms();
    let mut positioned = false;
    for _ in 0..RETRY_BUDGET {
        let g = (0..dim).map(|_| random_vector(&mut rng, dim, seed.coefficient_bound)).collect::<Vec<_>>();
        let g = RatMatrix::new(g, dim)?;
        if g.rank() < dim {
            continue;
        }
        // forms transform by g, hyperplanes by its inverse
        let gb: Vec<RatVector> = b
            .iter()
            .map(|f| RatVector::new((0..dim).map(|c| (0..dim).map(|r| &f[r] * &g.row(r)[c]).sum()).collect()))
            .collect();
        if gb.iter().any(|f| f.is_zero()) || !in_general_position(&a_forms, &gb, dim)? {
            continue;
        }
        positioned = true;
        let Some(witness) = union_witness(a, &gb)? else {
            continue;
        };
        let mut forms = a_forms.clone();
        forms.extend(gb);
        let mut labels = a.labels();
        labels.extend((1..=b.len()).map(|j| format!("gB{j}")));
        let union = Arrangement::new(dim, forms, Some(labels))?;
        if is_locally_consistent(&union, &witness)? && !is_globally_consistent(&union, &witness)?.is_feasible() {
            return Ok((union, witness));
        }
    }
    if positioned {
        Err(Error::WitnessNotFound { attempts: RETRY_BUDGET })
    } else {
        Err(Error::GenericityFailed { attempts: RETRY_BUDGET })
    }
}

fn union_witness(a: &Arrangement, gb: &[RatVector]) -> Result<Option<SignVector>> {
    let dim = a.dim();
    let h = &gb[0];
    for c0 in crate::chambers::chamber_sign_vectors(a) {
        let rows = a.signed_rows(&c0, &(0..a.n()).collect::<Vec<_>>());
        let mut plus = rows.clone();
        plus.push(h.clone());
        let mut minus = rows;
        minus.push(h.neg());
        let side = match (feasible(plus, dim), feasible(minus, dim)) {
            (true, false) => Sign::Minus,
            (false, true) => Sign::Plus,
            _ => continue,
        };
        let c1 = chamber_with_prefix(gb, dim, &[side]);
        let mut eps = c0.signs().to_vec();
        eps.extend(c1);
        return Ok(Some(SignVector::new(eps)));
    }
    Ok(None)
}
