use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use hyparr_core::arrangement::{cone, AffineArrangement, Arrangement, SignVector};
use hyparr_core::builtins::{self, GenericitySeed};
use hyparr_core::chambers::{enumerate_chambers, first_chamber, flow_to_sink, is_sink, Chamber};
use hyparr_core::consistency::{is_globally_consistent, sigma, sigma_filtration, EnumerationOptions};
use hyparr_core::error::Error;
use hyparr_core::lattice::{build_lattice, chamber_count_oracle};
use hyparr_core::linalg::parse_rational;
use hyparr_core::obstruction::{
    certify_nontrivial_sphere, custom_weights, detect_obstruction, sample_sphere_points, verify_gap,
    verify_sample_point, ObstructionOptions,
};

use crate::Command;

pub struct Failure {
    pub kind: String,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { kind: e.kind().to_string(), message: e.to_string() }
    }
}

type Outcome = Result<Value, Failure>;

#[derive(Serialize)]
struct Report {
    command: &'static str,
    input_digest: String,
    payload: Value,
    certificates: Vec<Value>,
}

fn report(command: &'static str, digest: String, payload: Value, certificates: Vec<Value>) -> Outcome {
    let r = Report { command, input_digest: digest, payload, certificates };
    Ok(serde_json::to_value(r).expect("serializable report"))
}

fn read(path: &Path) -> Result<(String, String), Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure {
        kind: "Io".into(),
        message: format!("{}: {e}", path.display()),
    })?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|e| Failure {
        kind: "InvalidArgument".into(),
        message: format!("{}: {e}", path.display()),
    })?;
    Ok((text, digest))
}

fn load(path: &Path) -> Result<(Arrangement, String), Failure> {
    let (text, digest) = read(path)?;
    Ok((Arrangement::from_json(&text)?, digest))
}

fn parse_eps(arr: &Arrangement, s: &str) -> Result<SignVector, Failure> {
    let eps: SignVector = s.parse()?;
    arr.check_sign_vector(&eps)?;
    Ok(eps)
}

/// `HYPARR_SEED` replaces the default seed of every randomized command.
fn default_seed() -> Result<u64, Failure> {
    match std::env::var("HYPARR_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| Failure {
            kind: "InvalidArgument".into(),
            message: format!("HYPARR_SEED is not an unsigned integer: {v:?}"),
        }),
        Err(_) => Ok(0),
    }
}

fn seed_or_default(seed: Option<u64>) -> Result<u64, Failure> {
    seed.map_or_else(default_seed, Ok)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn witness_cert(flat: Option<Vec<usize>>, signs: &SignVector, point: Value) -> Value {
    let mut c = json!({ "type": "witness", "signs": signs.to_string(), "point": point });
    if let Some(f) = flat {
        c["flat"] = to_value(&f);
    }
    c
}

pub fn run(command: Command, limit: usize) -> Outcome {
    match command {
        Command::Validate { file } => validate(&file),
        Command::Lattice { file } => lattice(&file),
        Command::Chambers { file } => chambers(&file, limit),
        Command::Sigma { file, k, full_sets } => sigma_cmd(&file, limit, k, full_sets),
        Command::Obstruct { file, samples, seed } => obstruct(&file, limit, samples, seed),
        Command::Sink { file, eps, start } => sink(&file, &eps, start.as_deref()),
        Command::Certify { file, eps, weights } => certify(&file, &eps, weights),
        Command::Sphere { file, eps, count, seed } => sphere(&file, &eps, count, seed),
        Command::Builtin { name, n, l, seed } => builtin(&name, n, l, seed),
        Command::Cone { file } => cone_cmd(&file),
    }
}

fn validate(file: &Path) -> Outcome {
    let (arr, digest) = load(file)?;
    let payload = json!({
        "valid": true,
        "dim": arr.dim(),
        "n": arr.n(),
        "rank": arr.rank_of(&(0..arr.n()).collect::<Vec<_>>()),
        "labels": arr.labels(),
    });
    report("validate", digest, payload, Vec::new())
}

fn lattice(file: &Path) -> Outcome {
    let (arr, digest) = load(file)?;
    let l = build_lattice(&arr);
    let flats: Vec<Value> = l
        .flats()
        .iter()
        .enumerate()
        .map(|(id, f)| json!({ "contains": f.labels_1based(), "codim": f.codim(), "moebius": l.moebius(id) }))
        .collect();
    let payload = json!({
        "shape": l.shape(),
        "characteristic_polynomial": l.characteristic_polynomial(),
        "chamber_count": chamber_count_oracle(&l),
        "flats": flats,
    });
    report("lattice", digest, payload, Vec::new())
}

fn chambers(file: &Path, limit: usize) -> Outcome {
    let (arr, digest) = load(file)?;
    let cs = enumerate_chambers(&arr, limit)?;
    let listed: Vec<Value> = cs
        .iter()
        .map(|c| json!({ "signs": c.signs.to_string(), "walls": c.walls_1based() }))
        .collect();
    let certs = cs.iter().map(|c| witness_cert(None, &c.signs, to_value(&c.witness))).collect();
    let payload = json!({
        "count": cs.len(),
        "zaslavsky": chamber_count_oracle(&build_lattice(&arr)),
        "chambers": listed,
    });
    report("chambers", digest, payload, certs)
}

fn sigma_cmd(file: &Path, limit: usize, k: Option<usize>, full_sets: bool) -> Outcome {
    let (arr, digest) = load(file)?;
    let f = sigma_filtration(&arr, EnumerationOptions { limit, full_sets })?;
    let witnesses: Vec<Value> = f
        .gaps
        .iter()
        .map(|g| json!({ "k": g.k, "eps": g.eps.to_string(), "flat": g.flat_1based() }))
        .collect();
    let certs = f
        .gaps
        .iter()
        .map(|g| json!({ "type": "dual", "k": g.k, "eps": g.eps.to_string(), "flat": g.flat_1based(), "dual": to_value(&g.dual) }))
        .collect();
    let mut payload = json!({ "n": f.n, "dim": f.dim, "counts": f.counts, "witnesses": witnesses });
    if let Some(sets) = &f.sets {
        payload["sets"] = to_value(sets);
    }
    if let Some(k) = k {
        let members = match &f.sets {
            Some(sets) if (1..=arr.dim()).contains(&k) => sets[k - 1].clone(),
            _ => sigma(&arr, k, limit)?,
        };
        payload["k"] = json!(k);
        payload["members"] = to_value(&members);
    }
    report("sigma", digest, payload, certs)
}

fn obstruct(file: &Path, limit: usize, samples: usize, seed: Option<u64>) -> Outcome {
    let (arr, digest) = load(file)?;
    let opts = ObstructionOptions { limit, samples, seed: seed_or_default(seed)? };
    let r = detect_obstruction(&arr, &opts)?;
    let mut certs = Vec::new();
    for g in &r.gaps {
        let flat: Vec<usize> = g.flat.iter().map(|i| i + 1).collect();
        certs.push(json!({
            "type": "dual",
            "k": g.k,
            "eps": g.eps.to_string(),
            "flat": flat,
            "dual": to_value(&g.dual),
            "verified": verify_gap(&arr, g),
        }));
        for p in &g.primal {
            let f = p.flat.iter().map(|i| i + 1).collect();
            certs.push(witness_cert(Some(f), &g.eps, to_value(&p.witness)));
        }
    }
    let mut payload = to_value(&r);
    payload["homotopy"] = json!(r
        .gaps
        .iter()
        .filter(|g| g.pi_k_nonzero)
        .map(|g| format!("pi_{} != 0", g.k))
        .collect::<Vec<_>>());
    report("obstruct", digest, payload, certs)
}

fn sink(file: &Path, eps: &str, start: Option<&str>) -> Outcome {
    let (arr, digest) = load(file)?;
    let eps = parse_eps(&arr, eps)?;
    let start = match start {
        Some(s) => Chamber::new(&arr, parse_eps(&arr, s)?)?,
        None => first_chamber(&arr),
    };
    let (path, end) = flow_to_sink(&arr, &eps, &start)?;
    let payload = json!({
        "eps": eps.to_string(),
        "start": start.signs.to_string(),
        "path": to_value(&path.chambers),
        "crossed": path.crossed_1based(),
        "sink": end.signs.to_string(),
        "sink_walls": end.walls_1based(),
        "is_sink": is_sink(&eps, &end),
    });
    let certs = vec![witness_cert(None, &end.signs, to_value(&end.witness))];
    report("sink", digest, payload, certs)
}

fn certify(file: &Path, eps: &str, weights: Option<Vec<String>>) -> Outcome {
    let (arr, digest) = load(file)?;
    let eps = parse_eps(&arr, eps)?;
    let cert = match weights {
        Some(ws) => {
            let ws = ws.iter().map(|w| parse_rational(w.trim())).collect::<Result<Vec<_>, _>>()?;
            custom_weights(&arr, &eps, &ws)?
        }
        None => certify_nontrivial_sphere(&arr, &eps)?,
    };
    let global = is_globally_consistent(&arr, &eps)?;
    let mut payload = to_value(&cert);
    payload["verified"] = json!(cert.verify(&arr));
    let mut monodromy = to_value(&cert);
    monodromy["type"] = json!("monodromy");
    let certs = vec![
        json!({ "type": "dual", "eps": eps.to_string(), "flat": "origin", "dual": to_value(&global.dual()) }),
        monodromy,
    ];
    report("certify", digest, payload, certs)
}

fn sphere(file: &Path, eps: &str, count: usize, seed: Option<u64>) -> Outcome {
    let (arr, digest) = load(file)?;
    let eps = parse_eps(&arr, eps)?;
    let seed = seed_or_default(seed)?;
    let points = sample_sphere_points(&arr, &eps, count, seed)?;
    let forms = arr.forms();
    let verified = points.iter().filter(|p| verify_sample_point(&forms, &eps, p)).count();
    let payload = json!({
        "eps": eps.to_string(),
        "count": points.len(),
        "seed": seed,
        "verified": verified,
        "points": to_value(&points),
    });
    report("sphere", digest, payload, Vec::new())
}

fn builtin(name: &str, n: Option<usize>, l: Option<usize>, seed: Option<u64>) -> Outcome {
    let need = |v: Option<usize>, flag: &str| {
        v.ok_or_else(|| Failure { kind: "InvalidArgument".into(), message: format!("builtin {name} needs --{flag}") })
    };
    let arr = match name {
        "boolean" => builtins::boolean(need(l, "l")?)?,
        "generic4" => builtins::generic4(),
        "generic" => builtins::generic(need(n, "n")?, need(l, "l")?, GenericitySeed::new(seed_or_default(seed)?))?,
        "x2" => return Ok(to_value(&builtins::x2_affine()?.to_file())),
        "cx2" => builtins::x2_coned()?,
        "braid" => builtins::braid(need(n, "n")?)?,
        other => {
            return Err(Failure {
                kind: "InvalidArgument".into(),
                message: format!("unknown builtin {other:?}; expected boolean, generic4, generic, x2, cx2 or braid"),
            })
        }
    };
    Ok(to_value(&arr.to_file()))
}

fn cone_cmd(file: &Path) -> Outcome {
    let (text, _) = read(file)?;
    let affine = AffineArrangement::from_json(&text)?;
    Ok(to_value(&cone(&affine)?.to_file()))
}
