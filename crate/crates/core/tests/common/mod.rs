//! Test-only oracles, written without the library's linear algebra or
//! feasibility kernel.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use hyparr_core::arrangement::Arrangement;
use hyparr_core::linalg::RatVector;

/// A small exact rational.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Q(pub i128, pub i128);

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Q {
    pub fn new(n: i128, d: i128) -> Q {
        let g = gcd(n, d).max(1);
        let s = if d < 0 { -1 } else { 1 };
        Q(s * n / g, s * d / g)
    }
    pub fn int(n: i64) -> Q {
        Q(n as i128, 1)
    }
    pub fn sub(self, o: Q) -> Q {
        Q::new(self.0 * o.1 - o.0 * self.1, self.1 * o.1)
    }
    pub fn mul(self, o: Q) -> Q {
        Q::new(self.0 * o.0, self.1 * o.1)
    }
    pub fn div(self, o: Q) -> Q {
        Q::new(self.0 * o.1, self.1 * o.0)
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(mat: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = mat.len();
    let cols = mat.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| mat[r][col].0 != 0) else {
            continue;
        };
        mat.swap(row, p);
        let lead = mat[row][col];
        for c in 0..cols {
            mat[row][c] = mat[row][c].div(lead);
        }
        for r in 0..rows {
            if r != row && mat[r][col].0 != 0 {
                let f = mat[r][col];
                for c in 0..cols {
                    mat[r][c] = mat[r][c].sub(f.mul(mat[row][c]));
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<i64>]) -> usize {
    let mut mat: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&v| Q::int(v)).collect()).collect();
    rref(&mut mat).len()
}

/// One-dimensional dependency space among the chosen rows spanned by a
/// strictly positive vector.
fn positive_circuit(rows: &[Vec<i64>], idx: &[usize], dim: usize) -> bool {
    let s = idx.len();
    // columns are the chosen rows, so the kernel holds their dependencies
    let mut mat: Vec<Vec<Q>> = (0..dim).map(|r| idx.iter().map(|&i| Q::int(rows[i][r])).collect()).collect();
    let pivots = rref(&mut mat);
    if pivots.len() != s - 1 {
        return false;
    }
    let free = (0..s).find(|c| !pivots.contains(c)).unwrap();
    let mut y = vec![Q(0, 1); s];
    y[free] = Q(1, 1);
    for (r, &pc) in pivots.iter().enumerate() {
        y[pc] = Q(0, 1).sub(mat[r][free]);
    }
    y.iter().all(|q| q.0 > 0) || y.iter().all(|q| q.0 < 0)
}

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
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

/// Gordan by Carathéodory: `{x : r_i · x > 0}` is empty iff some set of at
/// most `d + 1` rows has a one-dimensional space of dependencies spanned by
/// a strictly positive vector.
pub fn caratheodory_infeasible(rows: &[Vec<i64>], dim: usize) -> bool {
    (1..=(dim + 1).min(rows.len())).any(|size| subsets(rows.len(), size).iter().any(|s| positive_circuit(rows, s, dim)))
}

/// Integer forms of an arrangement built from integer data.
pub fn int_forms(arr: &Arrangement) -> Vec<Vec<i64>> {
    arr.forms()
        .iter()
        .map(|f| {
            f.iter()
                .map(|c| {
                    assert!(c.is_integer(), "integer forms expected");
                    i64::try_from(c.to_integer()).unwrap()
                })
                .collect()
        })
        .collect()
}

/// Closed index sets of all flats with their codimension, by brute force
/// over every subset of hyperplanes.
pub fn brute_force_flats(forms: &[Vec<i64>]) -> Vec<(Vec<usize>, usize)> {
    let n = forms.len();
    let mut out: Vec<(Vec<usize>, usize)> = Vec::new();
    for mask in 0u64..1 << n {
        let s: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let rows: Vec<Vec<i64>> = s.iter().map(|&i| forms[i].clone()).collect();
        let r = rank(&rows);
        let closure: Vec<usize> = (0..n)
            .filter(|&j| {
                let mut with = rows.clone();
                with.push(forms[j].clone());
                rank(&with) == r
            })
            .collect();
        if !out.iter().any(|(c, _)| *c == closure) {
            out.push((closure, r));
        }
    }
    out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    out
}

pub fn signed(forms: &[Vec<i64>], eps: &[bool], idx: &[usize]) -> Vec<Vec<i64>> {
    idx.iter()
        .map(|&i| forms[i].iter().map(|&c| if eps[i] { c } else { -c }).collect())
        .collect()
}

/// `Σ_k` by brute force: every sign vector (`true` = '+') checked at every
/// flat of codimension `≤ k`, as sign strings.
pub fn brute_force_sigma(forms: &[Vec<i64>], dim: usize, k: usize) -> Vec<String> {
    let n = forms.len();
    let flats = brute_force_flats(forms);
    let mut out = Vec::new();
    for mask in 0u64..1 << n {
        let eps: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 0).collect();
        let ok = flats
            .iter()
            .filter(|(_, r)| *r >= 1 && *r <= k)
            .all(|(c, _)| !caratheodory_infeasible(&signed(forms, &eps, c), dim));
        if ok {
            out.push(eps.iter().map(|&p| if p { '+' } else { '-' }).collect());
        }
    }
    out.sort();
    out
}

pub fn random_arrangement(rng: &mut ChaCha8Rng, max_dim: usize, max_n: usize) -> Arrangement {
    loop {
        let dim = rng.gen_range(1..=max_dim);
        let n = rng.gen_range(dim..=max_n);
        let forms: Vec<RatVector> = (0..n)
            .map(|_| RatVector::from_i64s(&(0..dim).map(|_| rng.gen_range(-3..=3)).collect::<Vec<_>>()))
            .collect();
        if let Ok(a) = Arrangement::new(dim, forms, None) {
            return a;
        }
    }
}
