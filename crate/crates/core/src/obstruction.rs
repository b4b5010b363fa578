//! The `K(π,1)` obstruction read off the `Σ_k` filtration, the rank-one
//! monodromy certificate for a locally consistent but globally inconsistent
//! system, and point samples of the sphere it spans in the complexified
//! complement.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arrangement::{one_based, Arrangement, Sign, SignVector};
use crate::chambers::{first_chamber, flow_to_sink, walls, Chamber, FlowPath};
use crate::consistency::{
    is_globally_consistent, is_locally_consistent, search_gap_witnesses, sigma_filtration_with,
    EnumerationOptions, GapWitness, DEFAULT_LIMIT,
};
use crate::error::{Error, Result};
use crate::feasibility::{interior_witness, strict_feasible, verify_dual, FeasibilityResult, StrictSystem};
use crate::lattice::{build_lattice, Lattice};
use crate::linalg::{rational_str, rational_vec_str, ratio, Rational, RatVector};

#[derive(Clone, Debug)]
pub struct ObstructionOptions {
    pub limit: usize,
    /// Samples drawn by the witness search when `n` exceeds `limit`; zero
    /// turns the search off.
    pub samples: usize,
    pub seed: u64,
}

impl Default for ObstructionOptions {
    fn default() -> Self {
        ObstructionOptions { limit: DEFAULT_LIMIT, samples: 20_000, seed: 0 }
    }
}

/// A flat with a strict primal witness of `ε` on its localization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlatWitness {
    #[serde(serialize_with = "one_based")]
    pub flat: Vec<usize>,
    pub witness: RatVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionGap {
    pub k: usize,
    pub eps: SignVector,
    #[serde(serialize_with = "one_based")]
    pub flat: Vec<usize>,
    pub codim: usize,
    /// Gordan certificate at `flat`, indexed like `flat`.
    pub dual: RatVector,
    /// Witnesses at every flat strictly containing `flat`, except the whole
    /// space.
    pub primal: Vec<FlatWitness>,
    /// `π_k ≠ 0` follows; only gaps with `k ≥ 2` carry the claim.
    pub pi_k_nonzero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub n: usize,
    pub dim: usize,
    /// False when the report comes from the randomized witness search.
    pub exhaustive: bool,
    /// `|Σ_k|` for `k = 1..=ℓ` when exhaustive.
    pub counts: Option<Vec<u64>>,
    pub gaps: Vec<ObstructionGap>,
    pub minimal_k: Option<usize>,
    /// No gap with `k ≥ 2`. After a non-exhaustive search this only means
    /// none was found.
    pub kpi1_possible: bool,
}

fn gap_certificates(arr: &Arrangement, lattice: &Lattice, g: &GapWitness) -> ObstructionGap {
    let mask = g.flat.iter().fold(0u64, |m, &i| m | 1 << i);
    let primal = lattice
        .flats()
        .iter()
        .filter(|y| y.codim() >= 1 && y.mask() != mask && y.mask() & !mask == 0)
        .map(|y| {
            let sys = StrictSystem::new(arr.signed_rows(&g.eps, y.contains()), arr.dim()).expect("validated forms");
            match strict_feasible(&sys) {
                FeasibilityResult::Witness(w) => FlatWitness { flat: y.contains().to_vec(), witness: w },
                FeasibilityResult::Dual(_) => panic!("gap witness inconsistent above its flat"),
            }
        })
        .collect();
    ObstructionGap {
        k: g.k,
        eps: g.eps.clone(),
        flat: g.flat.clone(),
        codim: g.k + 1,
        dual: g.dual.clone(),
        primal,
        pi_k_nonzero: g.k >= 2,
    }
}

/// Every gap `Σ_k ⊋ Σ_{k+1}` with a lexicographically smallest witness, its
/// failing flat of codim `k + 1`, the dual certificate there and primal
/// witnesses on every flat above.
pub fn detect_obstruction(arr: &Arrangement, opts: &ObstructionOptions) -> Result<ObstructionReport> {
    let lattice = build_lattice(arr);
    let (exhaustive, counts, witnesses) = if arr.n() <= opts.limit.min(crate::consistency::MAX_LIMIT) {
        let f = sigma_filtration_with(arr, &lattice, EnumerationOptions { limit: opts.limit, full_sets: false })?;
        (true, Some(f.counts), f.gaps)
    } else if opts.samples > 0 {
        (false, None, search_gap_witnesses(arr, &lattice, opts.samples, opts.seed))
    } else {
        return Err(Error::TooLarge { n: arr.n(), limit: opts.limit });
    };
    let gaps: Vec<ObstructionGap> = witnesses.iter().map(|g| gap_certificates(arr, &lattice, g)).collect();
    let minimal_k = gaps.iter().map(|g| g.k).find(|&k| k >= 2);
    Ok(ObstructionReport {
        n: arr.n(),
        dim: arr.dim(),
        exhaustive,
        counts,
        gaps,
        minimal_k,
        kpi1_possible: minimal_k.is_none(),
    })
}

/// Re-checks every certificate in a gap from the arrangement alone.
pub fn verify_gap(arr: &Arrangement, gap: &ObstructionGap) -> bool {
    let lattice = build_lattice(arr);
    let Some(id) = lattice.find_indices(&gap.flat) else {
        return false;
    };
    if lattice.flat(id).codim() != gap.codim {
        return false;
    }
    let sys = match StrictSystem::new(arr.signed_rows(&gap.eps, &gap.flat), arr.dim()) {
        Ok(s) => s,
        Err(_) => return false,
    };
    if !verify_dual(&sys, &gap.dual) {
        return false;
    }
    let above = lattice
        .flats()
        .iter()
        .filter(|y| y.codim() >= 1 && y.codim() < gap.codim && y.mask() & !lattice.flat(id).mask() == 0)
        .count();
    above == gap.primal.len()
        && gap.primal.iter().all(|p| {
            p.flat.iter().all(|&i| {
                let v = gap.eps.get(i).apply(arr.form(i)).dot(&p.witness);
                v.is_positive()
            })
        })
}

/// The data behind `1 − λ ≠ 0`: a sink `C` of `ε`, the separating set `T`
/// where `C` disagrees with `ε`, weights `a_i` with `Σ a_i ∈ ℤ`, and the
/// rotation `r = Σ_{i∈T} a_i mod 1`, which is nonzero, so `λ = e^{2πir} ≠ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonodromyCertificate {
    pub eps: SignVector,
    pub flow: FlowPath,
    pub sink: Chamber,
    #[serde(serialize_with = "one_based")]
    pub sink_walls: Vec<usize>,
    #[serde(serialize_with = "one_based")]
    pub separating: Vec<usize>,
    #[serde(with = "rational_vec_str")]
    pub weights: Vec<Rational>,
    #[serde(with = "rational_str")]
    pub rotation: Rational,
}

fn fractional_part(q: &Rational) -> Rational {
    q - q.floor()
}

fn check_certifiable(arr: &Arrangement, eps: &SignVector) -> Result<()> {
    arr.check_sign_vector(eps)?;
    if !is_locally_consistent(arr, eps)? {
        return Err(Error::NotLocallyConsistent);
    }
    if is_globally_consistent(arr, eps)?.is_feasible() {
        return Err(Error::GloballyConsistent);
    }
    Ok(())
}

/// Certificate with the default weights `a_i = 1/n`.
pub fn certify_nontrivial_sphere(arr: &Arrangement, eps: &SignVector) -> Result<MonodromyCertificate> {
    let n = arr.n() as i64;
    custom_weights(arr, eps, &vec![ratio(1, n); arr.n()])
}

/// Certificate with caller-chosen weights; requires `Σ a_i ∈ ℤ` and
/// `Σ_{i∈T} a_i ∉ ℤ`.
pub fn custom_weights(arr: &Arrangement, eps: &SignVector, weights: &[Rational]) -> Result<MonodromyCertificate> {
    check_certifiable(arr, eps)?;
    if weights.len() != arr.n() {
        return Err(Error::DimensionMismatch { expected: arr.n(), found: weights.len() });
    }
    let total: Rational = weights.iter().sum();
    if !total.is_integer() {
        return Err(Error::WeightConditionViolated(format!(
            "weights sum to {}, not an integer",
            crate::linalg::format_rational(&total)
        )));
    }
    let start = first_chamber(arr);
    let (flow, sink) = flow_to_sink(arr, eps, &start)?;
    let separating = sink.signs.differences(eps);
    // a sink cannot agree with an inconsistent ε everywhere or nowhere
    assert!(!separating.is_empty() && separating.len() < arr.n(), "degenerate separating set");
    let t_sum: Rational = separating.iter().map(|&i| &weights[i]).sum();
    let rotation = fractional_part(&t_sum);
    if rotation.is_zero() {
        return Err(Error::WeightConditionViolated(format!(
            "weights over the separating set sum to {}, an integer",
            crate::linalg::format_rational(&t_sum)
        )));
    }
    debug_assert!(rotation > Rational::zero() && rotation < Rational::one());
    Ok(MonodromyCertificate {
        eps: eps.clone(),
        flow,
        sink_walls: sink.walls.clone(),
        sink,
        separating,
        weights: weights.to_vec(),
        rotation,
    })
}

impl MonodromyCertificate {
    /// Recomputes the sink property, the separating set and the weight
    /// arithmetic from the arrangement.
    pub fn verify(&self, arr: &Arrangement) -> bool {
        let n = arr.n();
        if self.eps.len() != n || self.sink.signs.len() != n || self.weights.len() != n {
            return false;
        }
        let in_chamber = (0..n).all(|i| {
            let v = arr.form(i).dot(&self.sink.witness);
            Sign::of(&v) == Some(self.sink.signs.get(i))
        });
        let w = walls(arr, &self.sink.signs);
        let sink_ok = w == self.sink_walls && w.iter().all(|&i| self.sink.signs.get(i) == self.eps.get(i));
        let t: Vec<usize> = (0..n).filter(|&i| self.sink.signs.get(i) != self.eps.get(i)).collect();
        let total: Rational = self.weights.iter().sum();
        let t_sum: Rational = t.iter().map(|&i| &self.weights[i]).sum();
        let r = fractional_part(&t_sum);
        in_chamber
            && sink_ok
            && t == self.separating
            && total.is_integer()
            && r == self.rotation
            && r > Rational::zero()
            && r < Rational::one()
    }
}

/// A point `x + √−1·v` of the complexified complement on the sphere spanned
/// by `ε`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexSamplePoint {
    pub real: RatVector,
    pub imag: RatVector,
    /// Hyperplanes through or near `x` that `v` is pushed across.
    #[serde(serialize_with = "one_based")]
    pub nearby: Vec<usize>,
}

/// The largest prefix of hyperplanes ordered by `|α_i(x)|`, cut between
/// distinct values, whose intersection is not the origin.
fn nearby_set(arr: &Arrangement, x: &RatVector) -> Vec<usize> {
    let values: Vec<Rational> = (0..arr.n()).map(|i| arr.form(i).dot(x).abs()).collect();
    let mut order: Vec<usize> = (0..arr.n()).collect();
    order.sort_by(|&a, &b| values[a].cmp(&values[b]).then(a.cmp(&b)));
    let mut best = 0;
    let mut end = 0;
    while end < order.len() {
        let mut next = end + 1;
        while next < order.len() && values[order[next]] == values[order[end]] {
            next += 1;
        }
        if arr.rank_of(&order[..next]) >= arr.dim() {
            break;
        }
        best = next;
        end = next;
    }
    let mut out = order[..best].to_vec();
    out.sort_unstable();
    out
}

fn random_nonzero(rng: &mut ChaCha8Rng, dim: usize) -> Vec<i64> {
    loop {
        let v: Vec<i64> = (0..dim).map(|_| rng.gen_range(-9..=9)).collect();
        if v.iter().any(|&c| c != 0) {
            return v;
        }
    }
}

fn random_real_part(arr: &Arrangement, lattice: &Lattice, rng: &mut ChaCha8Rng, on_flat: bool) -> RatVector {
    let x = if on_flat {
        let proper: Vec<usize> = (0..lattice.flats().len())
            .filter(|&id| {
                let c = lattice.flat(id).codim();
                c >= 1 && c < arr.dim()
            })
            .collect();
        let basis = lattice.flat(proper[rng.gen_range(0..proper.len())]).kernel();
        loop {
            let coeffs = random_nonzero(rng, basis.nrows());
            let x = basis
                .rows()
                .iter()
                .zip(&coeffs)
                .fold(RatVector::zeros(arr.dim()), |acc, (b, &c)| acc.add(&b.scale(&Rational::from_integer(c.into()))));
            if !x.is_zero() {
                break x;
            }
        }
    } else {
        RatVector::from_i64s(&random_nonzero(rng, arr.dim()))
    };
    let norm = x.l1_norm();
    x.scale(&norm.recip())
}

/// `m` points with real parts on the unit cross-polytope; half of them lie on
/// random proper flats so that the boundary behaviour is exercised.
pub fn sample_sphere_points(arr: &Arrangement, eps: &SignVector, m: usize, seed: u64) -> Result<Vec<ComplexSamplePoint>> {
    arr.check_sign_vector(eps)?;
    if m == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    if !is_locally_consistent(arr, eps)? {
        return Err(Error::NotLocallyConsistent);
    }
    let lattice = build_lattice(arr);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(m);
    for s in 0..m {
        let on_flat = s % 2 == 1 && arr.dim() >= 2;
        let real = random_real_part(arr, &lattice, &mut rng, on_flat);
        let nearby = nearby_set(arr, &real);
        let sys = StrictSystem::new(arr.signed_rows(eps, &nearby), arr.dim())?;
        let imag = interior_witness(&sys)?;
        let p = ComplexSamplePoint { real, imag, nearby };
        debug_assert!(verify_sample_point(&arr.forms(), eps, &p));
        out.push(p);
    }
    Ok(out)
}

/// Membership of `x + √−1·v` in the complement and the sign conditions,
/// recomputed from the raw forms.
pub fn verify_sample_point(forms: &[RatVector], eps: &SignVector, p: &ComplexSamplePoint) -> bool {
    let dot = |a: &RatVector, b: &RatVector| -> Rational { a.iter().zip(b.iter()).map(|(u, w)| u * w).sum() };
    let l1: Rational = p.real.iter().map(|c| c.abs()).sum();
    if !l1.is_one() || forms.len() != eps.len() {
        return false;
    }
    forms.iter().enumerate().all(|(i, f)| {
        let ax = dot(f, &p.real);
        let av = dot(f, &p.imag);
        let want = match eps.get(i) {
            Sign::Plus => av.is_positive(),
            Sign::Minus => av.is_negative(),
        };
        if ax.is_zero() {
            want
        } else {
            !p.nearby.contains(&i) || want
        }
    })
}

/// Hyperplanes through `x`.
pub fn zero_set(arr: &Arrangement, x: &RatVector) -> Vec<usize> {
    (0..arr.n()).filter(|&i| arr.form(i).dot(x).is_zero()).collect()
}
