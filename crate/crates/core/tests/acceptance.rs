//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hyparr_core::arrangement::{Arrangement, SignVector};
use hyparr_core::builtins::{boolean, braid, generic, generic4, x2_coned, GenericitySeed};
use hyparr_core::chambers::{all_sinks, enumerate_chambers, flow_to_sink, is_sink};
use hyparr_core::consistency::{is_globally_consistent, sigma_filtration, EnumerationOptions, DEFAULT_LIMIT};
use hyparr_core::feasibility::{strict_feasible, StrictSystem};
use hyparr_core::lattice::{build_lattice, chamber_count_oracle};
use hyparr_core::linalg::{ratio, Rational, RatVector};
use hyparr_core::obstruction::{certify_nontrivial_sphere, detect_obstruction, sample_sphere_points, ComplexSamplePoint, ObstructionOptions};

mod common;

use common::{caratheodory_infeasible, random_arrangement};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn full(arr: &Arrangement) -> Vec<BTreeSet<SignVector>> {
    let f = sigma_filtration(arr, EnumerationOptions { limit: DEFAULT_LIMIT, full_sets: true }).expect("enumerable");
    f.sets.expect("requested").into_iter().map(|s| s.into_iter().collect()).collect()
}

fn sv(s: &str) -> SignVector {
    s.parse().unwrap()
}

fn timed(budget: Duration, start: Instant) -> Result<String, String> {
    let t = start.elapsed();
    check(t < budget, || format!("took {t:?}, budget {budget:?}"))?;
    Ok(format!("{:.3} s", t.as_secs_f64()))
}

/// Locally consistent, globally inconsistent sign vectors: `Σ_{ℓ−1} ∖ Σ_ℓ`.
fn lcgi(arr: &Arrangement) -> Vec<SignVector> {
    let sets = full(arr);
    let l = arr.dim();
    if l < 2 {
        return Vec::new();
    }
    sets[l - 2].difference(&sets[l - 1]).cloned().collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let a = generic4();
    let f = sigma_filtration(&a, EnumerationOptions::default()).map_err(|e| e.to_string())?;
    check(f.counts == vec![16, 16, 14], || format!("counts {:?}", f.counts))?;
    let sets = full(&a);
    let diff: BTreeSet<SignVector> = sets[1].difference(&sets[2]).cloned().collect();
    let want: BTreeSet<SignVector> = [sv("+++-"), sv("---+")].into();
    check(diff == want, || format!("Σ2∖Σ3 = {diff:?}"))?;
    let r = detect_obstruction(&a, &ObstructionOptions::default()).map_err(|e| e.to_string())?;
    check(r.minimal_k == Some(2) && !r.kpi1_possible, || format!("minimal_k {:?}", r.minimal_k))?;
    let g = &r.gaps[0];
    check(g.pi_k_nonzero && g.flat == vec![0, 1, 2, 3], || format!("gap {g:?}"))?;
    let mut sum = RatVector::zeros(3);
    for (j, &i) in g.flat.iter().enumerate() {
        check(g.dual[j].is_positive(), || "dual not strictly positive".into())?;
        let signed = if g.eps.get(i) == hyparr_core::arrangement::Sign::Plus { a.form(i).clone() } else { a.form(i).neg() };
        sum = sum.add(&signed.scale(&g.dual[j]));
    }
    check(sum.is_zero(), || format!("dual combination {sum:?}"))?;
    timed(Duration::from_secs(1), start)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let a = x2_coned().map_err(|e| e.to_string())?;
    let sets = full(&a);
    check(sets[1] == sets[2], || "Σ2 ≠ Σ3".into())?;
    check(sets[2].len() == 34, || format!("|Σ3| = {}", sets[2].len()))?;
    let z = chamber_count_oracle(&build_lattice(&a));
    check(z == 34, || format!("Zaslavsky {z}"))?;
    let r = detect_obstruction(&a, &ObstructionOptions::default()).map_err(|e| e.to_string())?;
    check(r.kpi1_possible && r.exhaustive, || "obstruction reported".into())?;
    timed(Duration::from_secs(10), start)
}

fn hattori_arrangements() -> Vec<Arrangement> {
    let mut out = Vec::new();
    for (n, l) in [(4, 3), (5, 3), (5, 4)] {
        for s in 0..5 {
            out.push(generic(n, l, GenericitySeed::new(s)).expect("generic arrangement"));
        }
    }
    out
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    for a in hattori_arrangements() {
        let l = a.dim();
        let f = sigma_filtration(&a, EnumerationOptions::default()).map_err(|e| e.to_string())?;
        check(f.count(l - 1) > f.count(l), || format!("counts {:?} for n={} ℓ={l}", f.counts, a.n()))?;
        let r = detect_obstruction(&a, &ObstructionOptions::default()).map_err(|e| e.to_string())?;
        check(r.gaps.iter().any(|g| g.k == l - 1 && g.pi_k_nonzero), || format!("no π_{} claim", l - 1))?;
    }
    let t = timed(Duration::from_secs(30), start)?;
    Ok(format!("15 arrangements, {t}"))
}

fn criterion_4() -> Outcome {
    let mut arrs: Vec<Arrangement> = (1..=5).map(|l| boolean(l).unwrap()).collect();
    arrs.push(braid(4).unwrap());
    for a in &arrs {
        let sets = full(a);
        for k in 2..a.dim() {
            check(sets[k - 1] == sets[k], || format!("Σ{k} ≠ Σ{} for {:?}", k + 1, a.labels()))?;
        }
    }
    Ok("boolean(1..=5), braid(4)".into())
}

fn random_sign_vector(rng: &mut ChaCha8Rng, n: usize) -> SignVector {
    SignVector::from_mask(rng.gen::<u64>() & ((1u64 << n) - 1), n)
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pairs = 0;
    let mut consistent = 0;
    for _ in 0..250 {
        let a = random_arrangement(&mut rng, 4, 8);
        let chambers = enumerate_chambers(&a, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
        for trial in 0..4 {
            // every other trial targets a chamber so the uniqueness clause is exercised
            let eps = if trial % 2 == 0 {
                random_sign_vector(&mut rng, a.n())
            } else {
                chambers[rng.gen_range(0..chambers.len())].signs.clone()
            };
            let sinks: Vec<_> = chambers.iter().filter(|c| is_sink(&eps, c)).collect();
            check(!sinks.is_empty(), || format!("no sink for {eps} on {:?}", a.forms()))?;
            let via_api = all_sinks(&a, &eps, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
            check(via_api.len() == sinks.len(), || "all_sinks disagrees".into())?;
            let start = &chambers[rng.gen_range(0..chambers.len())];
            let (path, end) = flow_to_sink(&a, &eps, start).map_err(|e| e.to_string())?;
            let distinct: BTreeSet<usize> = path.crossed.iter().copied().collect();
            check(path.len() <= a.n() && distinct.len() == path.len(), || format!("flow {:?}", path.crossed))?;
            check(is_sink(&eps, &end), || "flow stopped off a sink".into())?;
            if is_globally_consistent(&a, &eps).map_err(|e| e.to_string())?.is_feasible() {
                consistent += 1;
                check(sinks.len() == 1 && sinks[0].signs == eps, || format!("consistent {eps} has sinks {sinks:?}"))?;
            }
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs, {consistent} globally consistent"))
}

fn criterion_6() -> Outcome {
    let mut arrs = vec![generic4(), x2_coned().unwrap()];
    arrs.extend(hattori_arrangements());
    let mut certified = 0;
    for a in &arrs {
        for eps in lcgi(a) {
            let c = certify_nontrivial_sphere(a, &eps).map_err(|e| format!("{eps}: {e}"))?;
            let total: Rational = c.weights.iter().sum();
            check(total.is_integer(), || "weights do not sum to an integer".into())?;
            check(c.rotation > Rational::zero() && c.rotation < ratio(1, 1), || format!("rotation {}", c.rotation))?;
            check(c.verify(a), || format!("certificate for {eps} fails verification"))?;
            certified += 1;
        }
    }
    let a = generic4();
    let c = certify_nontrivial_sphere(&a, &sv("+++-")).map_err(|e| e.to_string())?;
    check(c.sink.signs == sv("++++"), || format!("sink {}", c.sink.signs))?;
    check(c.separating == vec![3], || format!("T {:?}", c.separating))?;
    check(c.rotation == ratio(1, 4), || format!("r {}", c.rotation))?;
    Ok(format!("{certified} certificates"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut infeasible = 0;
    let total = 10_000;
    for _ in 0..total {
        let dim = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=8);
        let rows: Vec<Vec<i64>> = (0..m)
            .map(|_| loop {
                let r: Vec<i64> = (0..dim).map(|_| rng.gen_range(-3..=3)).collect();
                if r.iter().any(|&c| c != 0) {
                    break r;
                }
            })
            .collect();
        let sys = StrictSystem::new(rows.iter().map(|r| RatVector::from_i64s(r)).collect(), dim).unwrap();
        let res = strict_feasible(&sys);
        check(res.verify(&sys), || format!("certificate fails for {rows:?}"))?;
        let second = caratheodory_infeasible(&rows, dim);
        check(second != res.is_feasible(), || format!("routines disagree on {rows:?}"))?;
        if second {
            infeasible += 1;
        }
        let scaled: Vec<RatVector> = rows
            .iter()
            .map(|r| RatVector::from_i64s(r).scale(&ratio(rng.gen_range(1..=5), rng.gen_range(1..=5))))
            .collect();
        let scaled_sys = StrictSystem::new(scaled, dim).unwrap();
        let again = strict_feasible(&scaled_sys);
        check(again.is_feasible() == res.is_feasible() && again.verify(&scaled_sys), || format!("scaling flips {rows:?}"))?;
    }
    Ok(format!("{total} systems, {infeasible} infeasible"))
}

fn criterion_8() -> Outcome {
    let mut arrs: Vec<Arrangement> = (1..=5).map(|l| boolean(l).unwrap()).collect();
    arrs.push(generic4());
    arrs.push(x2_coned().unwrap());
    arrs.push(braid(3).unwrap());
    arrs.push(braid(4).unwrap());
    arrs.extend(hattori_arrangements());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..250 {
        arrs.push(random_arrangement(&mut rng, 4, 8));
    }
    for a in &arrs {
        let f = sigma_filtration(a, EnumerationOptions::default()).map_err(|e| e.to_string())?;
        let z = chamber_count_oracle(&build_lattice(a));
        check(f.count(a.dim()) == z, || format!("|Σℓ| = {} but Zaslavsky {z} for {:?}", f.count(a.dim()), a.forms()))?;
        check(f.count(1) == 1u64 << a.n(), || format!("|Σ1| = {}", f.count(1)))?;
    }
    Ok(format!("{} arrangements", arrs.len()))
}

/// Membership and sign conditions recomputed from integer forms.
fn independent_sample_check(forms: &[[i64; 3]], eps: &str, p: &ComplexSamplePoint) -> Result<bool, String> {
    let mut on_some = false;
    for (i, (f, s)) in forms.iter().zip(eps.chars()).enumerate() {
        let eval = |v: &RatVector| -> Rational { (0..3).map(|c| &v[c] * Rational::from_integer(f[c].into())).sum() };
        let ax = eval(&p.real);
        let av = eval(&p.imag);
        if ax.is_zero() {
            on_some = true;
            if av.is_zero() {
                return Err(format!("point lies on complexified H{}", i + 1));
            }
            let side = if s == '+' { av.is_positive() } else { av.is_negative() };
            if !side {
                return Err(format!("imaginary part on the wrong side of H{}", i + 1));
            }
        }
    }
    Ok(on_some)
}

fn criterion_9() -> Outcome {
    let forms = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]];
    let eps = "+++-";
    let pts = sample_sphere_points(&generic4(), &sv(eps), 200, 0).map_err(|e| e.to_string())?;
    check(pts.len() == 200, || format!("{} points", pts.len()))?;
    let mut boundary = 0;
    for p in &pts {
        let l1: Rational = p.real.iter().map(|c| c.abs()).sum();
        check(l1 == ratio(1, 1), || "real part off the unit cross-polytope".into())?;
        if independent_sample_check(&forms, eps, p)? {
            boundary += 1;
        }
    }
    check(boundary > 0, || "no sample lies on a hyperplane".into())?;
    Ok(format!("200 points, {boundary} on hyperplanes, 0 failures"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("generic4 regression", criterion_1),
        ("cX2 satisfies Σ2 = Σ3", criterion_2),
        ("generic arrangements have a top gap", criterion_3),
        ("boolean and braid have no gaps", criterion_4),
        ("sinks and flows", criterion_5),
        ("monodromy certificates", criterion_6),
        ("strict feasibility kernel", criterion_7),
        ("Zaslavsky cross-check", criterion_8),
        ("sphere sampling", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.2} s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
