//! Consistency of systems of half-spaces: globally, at a flat, locally, and
//! the filtration `Σ_1 ⊇ Σ_2 ⊇ … ⊇ Σ_ℓ`.
//!
//! `Σ_k` is enumerated by depth-first sign assignment in index order. A
//! partial assignment is dropped as soon as a flat of codimension `≤ k`
//! whose hyperplanes are all assigned is inconsistent. Only flats with a
//! non-Boolean localization are ever checked: independent hyperplanes admit
//! every sign pattern. Verdicts are cached per flat on the restricted sign
//! pattern, and subtrees below a fixed prefix depth run in parallel.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arrangement::{Arrangement, SignVector};
use crate::error::{Error, Result};
use crate::feasibility::{strict_feasible, FeasibilityResult, StrictSystem};
use crate::lattice::{build_lattice, flat_of, Flat, Lattice};
use crate::linalg::RatVector;

/// Default cap on `n` for exhaustive enumeration.
pub const DEFAULT_LIMIT: usize = 22;

/// Hard cap: sign vectors are `u64` masks and `|Σ_1| = 2^n` must fit.
pub const MAX_LIMIT: usize = 63;

const PREFIX_DEPTH: usize = 8;

fn system(arr: &Arrangement, eps: &SignVector, indices: &[usize]) -> StrictSystem {
    StrictSystem::new(arr.signed_rows(eps, indices), arr.dim()).expect("validated forms")
}

/// Strict feasibility of all `n` signed forms.
pub fn is_globally_consistent(arr: &Arrangement, eps: &SignVector) -> Result<FeasibilityResult> {
    arr.check_sign_vector(eps)?;
    let all: Vec<usize> = (0..arr.n()).collect();
    Ok(strict_feasible(&system(arr, eps, &all)))
}

/// Strict feasibility of the signed forms in the localization at `flat`.
pub fn is_consistent_at(
    arr: &Arrangement,
    eps: &SignVector,
    flat: &Flat,
) -> Result<FeasibilityResult> {
    arr.check_sign_vector(eps)?;
    let checked = flat_of(arr, flat.contains())?;
    if checked.codim() != flat.codim() {
        return Err(Error::UnknownFlat);
    }
    Ok(strict_feasible(&system(arr, eps, flat.contains())))
}

/// Consistent at every flat except the origin.
pub fn is_locally_consistent(arr: &Arrangement, eps: &SignVector) -> Result<bool> {
    arr.check_sign_vector(eps)?;
    let lattice = build_lattice(arr);
    Ok(lattice
        .flats()
        .iter()
        .filter(|f| f.codim() < arr.dim() && !f.is_boolean())
        .all(|f| strict_feasible(&system(arr, eps, f.contains())).is_feasible()))
}

/// Largest `k` with `ε ∈ Σ_k`, and the first flat of codim `k + 1` where `ε`
/// fails (lattice order), if any.
pub fn consistency_level(arr: &Arrangement, lattice: &Lattice, eps: &SignVector) -> Result<(usize, Option<usize>)> {
    arr.check_sign_vector(eps)?;
    let engine = Engine::new(arr, lattice, 1);
    let mut cache = engine.new_cache();
    let (level, check) = engine.level(&mut cache, eps.to_mask());
    Ok((level, check.map(|c| engine.checks[c].flat)))
}

/// Options shared by the exhaustive enumerations.
#[derive(Clone, Copy, Debug)]
pub struct EnumerationOptions {
    pub limit: usize,
    pub full_sets: bool,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions { limit: DEFAULT_LIMIT, full_sets: false }
    }
}

pub(crate) fn check_limit(n: usize, limit: usize) -> Result<()> {
    let limit = limit.min(MAX_LIMIT);
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    Ok(())
}

/// `Σ_k`, sorted lexicographically (`'+' < '-'`).
pub fn sigma(arr: &Arrangement, k: usize, limit: usize) -> Result<Vec<SignVector>> {
    if k == 0 || k > arr.dim() {
        return Err(Error::InvalidArgument(format!("k must lie in 1..={}", arr.dim())));
    }
    check_limit(arr.n(), limit)?;
    let lattice = build_lattice(arr);
    let engine = Engine::new(arr, &lattice, k);
    let masks: Vec<u64> = engine
        .run(|| Vec::new(), |acc: &mut Vec<u64>, _, m| acc.push(m))
        .into_iter()
        .flatten()
        .collect();
    let mut out: Vec<SignVector> = masks.into_iter().map(|m| SignVector::from_mask(m, arr.n())).collect();
    out.sort();
    Ok(out)
}

/// One witness of a strict inclusion `Σ_k ⊋ Σ_{k+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapWitness {
    pub k: usize,
    pub eps: SignVector,
    /// 0-based hyperplane indices of the flat of codim `k + 1`.
    #[serde(serialize_with = "crate::arrangement::one_based")]
    pub flat: Vec<usize>,
    /// Gordan certificate of inconsistency at the flat, indexed like `flat`.
    pub dual: RatVector,
}

impl GapWitness {
    pub fn flat_1based(&self) -> Vec<usize> {
        self.flat.iter().map(|i| i + 1).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SigmaFiltration {
    pub n: usize,
    pub dim: usize,
    /// `counts[k - 1] = |Σ_k|`.
    pub counts: Vec<u64>,
    /// `sets[k - 1] = Σ_k`, sorted; only for `k ≥ 2` when `full_sets` is on
    /// (`Σ_1` is every sign vector and is listed too).
    pub sets: Option<Vec<Vec<SignVector>>>,
    /// Lexicographically smallest witness for each gap, by increasing `k`.
    pub gaps: Vec<GapWitness>,
}

impl SigmaFiltration {
    pub fn count(&self, k: usize) -> u64 {
        self.counts[k - 1]
    }

    pub fn gap_at(&self, k: usize) -> Option<&GapWitness> {
        self.gaps.iter().find(|g| g.k == k)
    }
}

#[derive(Default)]
struct LevelCollector {
    counts: Vec<u64>,
    first: Vec<Option<(u64, usize)>>,
    leaves: Vec<(u64, usize)>,
}

/// All counts of the filtration plus one lexicographically smallest witness
/// per gap.
pub fn sigma_filtration(arr: &Arrangement, opts: EnumerationOptions) -> Result<SigmaFiltration> {
    check_limit(arr.n(), opts.limit)?;
    let lattice = build_lattice(arr);
    sigma_filtration_with(arr, &lattice, opts)
}

pub fn sigma_filtration_with(
    arr: &Arrangement,
    lattice: &Lattice,
    opts: EnumerationOptions,
) -> Result<SigmaFiltration> {
    check_limit(arr.n(), opts.limit)?;
    let n = arr.n();
    let dim = arr.dim();
    let mut counts = vec![0u64; dim];
    counts[0] = 1u64 << n;
    let mut gaps = Vec::new();

    if dim == 1 {
        let sets = opts.full_sets.then(|| vec![all_sign_vectors(n)]);
        return Ok(SigmaFiltration { n, dim, counts, sets, gaps });
    }

    if let Some(g) = first_codim2_failure(arr, lattice) {
        gaps.push(g);
    }

    let engine = Engine::new(arr, lattice, 2);
    let full = opts.full_sets;
    let parts = engine.run(
        || LevelCollector { counts: vec![0; dim + 1], first: vec![None; dim + 1], leaves: Vec::new() },
        |acc: &mut LevelCollector, cache: &mut Cache, m| {
            let (level, check) = engine.level(cache, m);
            acc.counts[level] += 1;
            if acc.first[level].is_none() {
                if let Some(c) = check {
                    acc.first[level] = Some((m, c));
                }
            }
            if full {
                acc.leaves.push((m, level));
            }
        },
    );

    let mut by_level = vec![0u64; dim + 1];
    let mut first: Vec<Option<(u64, usize)>> = vec![None; dim + 1];
    let mut leaves = Vec::new();
    // parts arrive in prefix (lexicographic) order
    for part in parts {
        for lvl in 0..=dim {
            by_level[lvl] += part.counts[lvl];
            if first[lvl].is_none() {
                first[lvl] = part.first[lvl];
            }
        }
        leaves.extend(part.leaves);
    }
    for k in 2..=dim {
        counts[k - 1] = (k..=dim).map(|l| by_level[l]).sum();
    }
    for k in 2..dim {
        if let Some((m, c)) = first[k] {
            let eps = SignVector::from_mask(m, n);
            let flat = lattice.flat(engine.checks[c].flat);
            gaps.push(gap_witness(arr, k, eps, flat));
        }
    }
    debug_assert!(counts.windows(2).all(|w| w[0] >= w[1]));

    let sets = full.then(|| {
        let mut sets = vec![all_sign_vectors(n)];
        for k in 2..=dim {
            let mut s: Vec<SignVector> = leaves
                .iter()
                .filter(|(_, l)| *l >= k)
                .map(|(m, _)| SignVector::from_mask(*m, n))
                .collect();
            s.sort();
            sets.push(s);
        }
        sets
    });
    Ok(SigmaFiltration { n, dim, counts, sets, gaps })
}

fn all_sign_vectors(n: usize) -> Vec<SignVector> {
    let mut all: Vec<SignVector> = (0..1u64 << n).map(|m| SignVector::from_mask(m, n)).collect();
    all.sort();
    all
}

fn gap_witness(arr: &Arrangement, k: usize, eps: SignVector, flat: &Flat) -> GapWitness {
    let cert = strict_feasible(&system(arr, &eps, flat.contains()));
    let dual = cert.dual().cloned().expect("witness flat must be inconsistent");
    GapWitness { k, eps, flat: flat.contains().to_vec(), dual }
}

/// Lexicographically smallest sign vector inconsistent at some codim-2 flat.
/// Outside the flat every sign is `+`, so the minimum is found flat by flat.
fn first_codim2_failure(arr: &Arrangement, lattice: &Lattice) -> Option<GapWitness> {
    let n = arr.n();
    let mut best: Option<SignVector> = None;
    for (_, flat) in lattice.with_codim(2).filter(|(_, f)| !f.is_boolean()) {
        let idx = flat.contains();
        let r = idx.len();
        // patterns over idx in lexicographic order: bit r-1-j <-> idx[j]
        for p in 0..1u64 << r {
            let mut signs = SignVector::all_plus(n);
            for (j, &i) in idx.iter().enumerate() {
                if p >> (r - 1 - j) & 1 == 1 {
                    signs = signs.flipped(i);
                }
            }
            if best.as_ref().is_some_and(|b| signs >= *b) {
                break;
            }
            if !strict_feasible(&system(arr, &signs, idx)).is_feasible() {
                best = Some(signs);
                break;
            }
        }
    }
    let eps = best?;
    let flat = lattice
        .with_codim(2)
        .map(|(_, f)| f)
        .find(|f| !strict_feasible(&system(arr, &eps, f.contains())).is_feasible())?;
    Some(gap_witness(arr, 1, eps, flat))
}

/// Randomized search for gap witnesses when exhaustive enumeration is out of
/// reach: random sign vectors and sign vectors of random chambers with one or
/// two coordinates flipped. Returns the smallest witness found per `k`.
pub fn search_gap_witnesses(
    arr: &Arrangement,
    lattice: &Lattice,
    samples: usize,
    seed: u64,
) -> Vec<GapWitness> {
    let n = arr.n();
    let dim = arr.dim();
    let engine = Engine::new(arr, lattice, 1);
    let mut cache = engine.new_cache();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Vec<Option<(SignVector, usize)>> = vec![None; dim];
    for s in 0..samples {
        let mask = if s % 2 == 0 {
            let point = random_generic_point(arr, &mut rng);
            let mut m = crate::arrangement::sign_vector_of_point(arr, &point)
                .expect("generic point")
                .to_mask();
            let flips = rng.gen_range(1..=2.min(n));
            for _ in 0..flips {
                m ^= 1 << rng.gen_range(0..n);
            }
            m
        } else {
            rng.gen::<u64>() & if n == 64 { u64::MAX } else { (1u64 << n) - 1 }
        };
        let (level, check) = engine.level(&mut cache, mask);
        if level >= dim {
            continue;
        }
        let eps = SignVector::from_mask(mask, n);
        let flat = engine.checks[check.expect("failing flat")].flat;
        if best[level].as_ref().map_or(true, |(b, _)| eps < *b) {
            best[level] = Some((eps, flat));
        }
    }
    best.into_iter()
        .enumerate()
        .filter_map(|(k, b)| b.map(|(eps, f)| gap_witness(arr, k, eps, lattice.flat(f))))
        .collect()
}

fn random_generic_point(arr: &Arrangement, rng: &mut ChaCha8Rng) -> RatVector {
    loop {
        let p: Vec<i64> = (0..arr.dim()).map(|_| rng.gen_range(-1000..=1000)).collect();
        let p = RatVector::from_i64s(&p);
        if crate::arrangement::is_generic_point(arr, &p) {
            return p;
        }
    }
}

pub(crate) type Cache = Vec<HashMap<u64, bool>>;

struct Check {
    flat: usize,
    mask: u64,
    codim: usize,
}

/// Depth-first enumeration of `Σ_k` for a fixed pruning codimension `k`.
pub(crate) struct Engine<'a> {
    arr: &'a Arrangement,
    checks: Vec<Check>,
    /// check ids with codim ≤ prune codim, keyed by their largest index
    prune_at: Vec<Vec<usize>>,
    /// check ids by codim, for codims above the prune codim
    by_codim: Vec<Vec<usize>>,
    prune_codim: usize,
}

impl<'a> Engine<'a> {
    fn new(arr: &'a Arrangement, lattice: &Lattice, prune_codim: usize) -> Self {
        let dim = arr.dim();
        let checks: Vec<Check> = lattice
            .flats()
            .iter()
            .enumerate()
            .filter(|(_, f)| f.codim() >= 2 && !f.is_boolean())
            .map(|(id, f)| Check { flat: id, mask: f.mask(), codim: f.codim() })
            .collect();
        let mut prune_at = vec![Vec::new(); arr.n()];
        let mut by_codim = vec![Vec::new(); dim + 1];
        for (c, check) in checks.iter().enumerate() {
            if check.codim <= prune_codim {
                let last = 63 - check.mask.leading_zeros() as usize;
                prune_at[last].push(c);
            } else {
                by_codim[check.codim].push(c);
            }
        }
        Engine { arr, checks, prune_at, by_codim, prune_codim }
    }

    fn new_cache(&self) -> Cache {
        vec![HashMap::new(); self.checks.len()]
    }

    fn holds(&self, cache: &mut Cache, c: usize, eps_mask: u64) -> bool {
        let check = &self.checks[c];
        let key = eps_mask & check.mask;
        if let Some(&v) = cache[c].get(&key) {
            return v;
        }
        let rows: Vec<RatVector> = (0..self.arr.n())
            .filter(|&i| check.mask >> i & 1 == 1)
            .map(|i| {
                let f = self.arr.form(i);
                if eps_mask >> i & 1 == 1 {
                    f.neg()
                } else {
                    f.clone()
                }
            })
            .collect();
        let v = strict_feasible(&StrictSystem::new(rows, self.arr.dim()).expect("validated forms"))
            .is_feasible();
        cache[c].insert(key, v);
        v
    }

    /// For a leaf that passed every check up to the prune codim.
    fn level(&self, cache: &mut Cache, eps_mask: u64) -> (usize, Option<usize>) {
        for k in self.prune_codim + 1..=self.arr.dim() {
            if k < 2 {
                continue;
            }
            for &c in &self.by_codim[k] {
                if !self.holds(cache, c, eps_mask) {
                    return (k - 1, Some(c));
                }
            }
        }
        (self.arr.dim(), None)
    }

    fn dfs(
        &self,
        depth: usize,
        stop: usize,
        mask: u64,
        cache: &mut Cache,
        visit: &mut dyn FnMut(&mut Cache, u64),
    ) {
        if depth == stop {
            visit(cache, mask);
            return;
        }
        for bit in [0u64, 1] {
            let m = mask | bit << depth;
            if self.prune_at[depth].iter().all(|&c| self.holds(cache, c, m)) {
                self.dfs(depth + 1, stop, m, cache, visit);
            }
        }
    }

    /// Runs the enumeration; one accumulator per prefix subtree, returned in
    /// lexicographic prefix order.
    fn run<T, I, V>(&self, init: I, visit: V) -> Vec<T>
    where
        T: Send,
        I: Fn() -> T + Sync,
        V: Fn(&mut T, &mut Cache, u64) + Sync,
    {
        let n = self.arr.n();
        let depth = n.min(PREFIX_DEPTH);
        let mut prefixes = Vec::new();
        let mut cache = self.new_cache();
        self.dfs(0, depth, 0, &mut cache, &mut |_, m| prefixes.push(m));
        // bit 0 is the most significant sign, so sort by reversed bits
        prefixes.sort_by_key(|m| m.reverse_bits());
        prefixes
            .par_iter()
            .map(|&prefix| {
                let mut cache = self.new_cache();
                let mut acc = init();
                self.dfs(depth, n, prefix, &mut cache, &mut |cache, m| visit(&mut acc, cache, m));
                acc
            })
            .collect()
    }
}
