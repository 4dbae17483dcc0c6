//! Concentration of a point set on low-degree curves over `F_p`.
//!
//! Degree one is exact: for every point, the other points are grouped by
//! the slope of the line joining them. Degrees two and three are a
//! heuristic: curves are interpolated through random `D(D+3)/2`-subsets
//! and the best one found within the budget is reported.

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::lab::{inv_mod, mul_mod};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GpDegree {
    pub degree: u32,
    /// Largest `|A ∩ C|` found over curves `C` of degree at most `degree`.
    pub max_concentration: usize,
    /// A curve attaining it, in the polynomial grammar.
    pub witness: Option<String>,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GpReport {
    pub per_degree: Vec<GpDegree>,
}

impl GpReport {
    pub fn max_line(&self) -> usize {
        self.per_degree.first().map_or(0, |d| d.max_concentration)
    }
}

/// `budget` bounds the number of interpolated curves per degree above one.
pub fn gp_check(points: &[[u64; 2]], p: u64, max_degree: u32, budget: usize, seed: u64) -> GpReport {
    let mut per_degree = vec![max_line(points, p)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for d in 2..=max_degree.min(3) {
        let prev = per_degree.last().unwrap().clone();
        let found = curve_search(points, p, d, budget, &mut rng);
        let best = match found {
            Some((n, w)) if n > prev.max_concentration => GpDegree {
                degree: d,
                max_concentration: n,
                witness: Some(w),
                exact: false,
            },
            _ => GpDegree {
                degree: d,
                exact: false,
                ..prev
            },
        };
        per_degree.push(best);
    }
    GpReport { per_degree }
}

/// Largest collinear subset, exactly.
fn max_line(points: &[[u64; 2]], p: u64) -> GpDegree {
    let mut best = (points.len().min(1), None::<(usize, u64)>);
    let inv: Option<Vec<u64>> = (p <= 1 << 22).then(|| (0..p).map(|v| if v == 0 { 0 } else { inv_mod(v, p) }).collect());
    let mut slopes: HashMap<u64, usize> = HashMap::new();
    for (i, a) in points.iter().enumerate() {
        slopes.clear();
        for b in &points[i + 1..] {
            let dx = (b[0] + p - a[0]) % p;
            let dy = (b[1] + p - a[1]) % p;
            // vertical lines get the slope p
            let s = if dx == 0 {
                p
            } else {
                let di = inv.as_ref().map_or_else(|| inv_mod(dx, p), |t| t[dx as usize]);
                mul_mod(dy, di, p)
            };
            *slopes.entry(s).or_insert(0) += 1;
        }
        // smallest slope among the most popular, for a stable witness
        if let Some((&s, &n)) = slopes.iter().max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(x.0))) {
            if n + 1 > best.0 {
                best = (n + 1, Some((i, s)));
            }
        }
    }
    let witness = best.1.map(|(i, s)| {
        let a = points[i];
        if s == p {
            format!("x - {}", a[0])
        } else {
            // y = s (x - a0) + a1
            let c = (a[1] + p - mul_mod(s, a[0], p)) % p;
            let mut w = String::from("y");
            if s != 0 {
                w.push_str(&format!(" - {s}*x"));
            }
            if c != 0 {
                w.push_str(&format!(" - {c}"));
            }
            w
        }
    });
    GpDegree {
        degree: 1,
        max_concentration: best.0,
        witness,
        exact: true,
    }
}

/// Exponents of the monomials of degree at most `d`.
fn monomials(d: u32) -> Vec<(u32, u32)> {
    (0..=d).flat_map(|t| (0..=t).map(move |i| (i, t - i))).collect()
}

fn curve_search(points: &[[u64; 2]], p: u64, d: u32, budget: usize, rng: &mut ChaCha8Rng) -> Option<(usize, String)> {
    let monos = monomials(d);
    let k = monos.len() - 1;
    if points.len() < k {
        return None;
    }
    let eval_row = |pt: &[u64; 2]| -> Vec<u64> {
        monos
            .iter()
            .map(|&(i, j)| mul_mod(pow_mod(pt[0], i, p), pow_mod(pt[1], j, p), p))
            .collect()
    };
    let mut best: Option<(usize, Vec<u64>)> = None;
    for _ in 0..budget {
        let idx = sample(rng, points.len(), k);
        let rows: Vec<Vec<u64>> = idx.iter().map(|i| eval_row(&points[i])).collect();
        let Some(c) = kernel_vector(rows, monos.len(), p) else {
            continue;
        };
        let n = points
            .iter()
            .filter(|pt| {
                eval_row(pt)
                    .iter()
                    .zip(&c)
                    .fold(0, |acc, (m, ci)| (acc + mul_mod(*m, *ci, p)) % p)
                    == 0
            })
            .count();
        if best.as_ref().is_none_or(|b| n > b.0) {
            best = Some((n, c));
        }
    }
    best.map(|(n, c)| {
        let terms: Vec<String> = monos
            .iter()
            .zip(&c)
            .filter(|(_, ci)| **ci != 0)
            .map(|(&(i, j), ci)| {
                let mut t = ci.to_string();
                for (v, e) in [("x", i), ("y", j)] {
                    match e {
                        0 => {}
                        1 => t.push_str(&format!("*{v}")),
                        _ => t.push_str(&format!("*{v}^{e}")),
                    }
                }
                t
            })
            .collect();
        (n, terms.join(" + "))
    })
}

fn pow_mod(mut b: u64, mut e: u32, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

/// A nonzero solution of the homogeneous system, if the kernel is nonzero.
fn kernel_vector(mut rows: Vec<Vec<u64>>, cols: usize, p: u64) -> Option<Vec<u64>> {
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = inv_mod(rows[r][c], p);
        for v in rows[r].iter_mut() {
            *v = mul_mod(*v, inv, p);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for j in 0..cols {
                    let d = mul_mod(f, rows[r][j], p);
                    rows[i][j] = (rows[i][j] + p - d) % p;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let free = (0..cols).find(|c| !pivot_cols.contains(c))?;
    let mut out = vec![0; cols];
    out[free] = 1;
    for (i, &pc) in pivot_cols.iter().enumerate() {
        out[pc] = (p - rows[i][free]) % p;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_points() {
        let pts: Vec<[u64; 2]> = (0..100).map(|x| [x, 0]).collect();
        let r = gp_check(&pts, 10007, 1, 0, 0);
        assert_eq!(r.max_line(), 100);
        assert_eq!(r.per_degree[0].witness.as_deref(), Some("y"));
    }

    #[test]
    fn grid_lines() {
        let pts: Vec<[u64; 2]> = (0..10).flat_map(|x| (0..10).map(move |y| [x, y])).collect();
        assert_eq!(gp_check(&pts, 10007, 1, 0, 0).max_line(), 10);
        assert_eq!(gp_check(&pts[..1], 10007, 1, 0, 0).max_line(), 1);
    }

    #[test]
    fn lines_oracle() {
        // brute force over all lines of F_7
        let p = 7;
        let pts: Vec<[u64; 2]> = vec![[0, 0], [1, 2], [2, 4], [3, 6], [5, 5], [6, 1], [4, 4], [2, 2]];
        let mut brute = 0;
        for s in 0..p {
            for c in 0..p {
                brute = brute.max(pts.iter().filter(|q| (s * q[0] + c) % p == q[1]).count());
            }
        }
        for c in 0..p {
            brute = brute.max(pts.iter().filter(|q| q[0] == c).count());
        }
        assert_eq!(gp_check(&pts, p, 1, 0, 0).max_line(), brute);
    }

    #[test]
    fn finds_a_conic() {
        let p = 101;
        // y = x^2 over 30 points plus noise off the parabola
        let mut pts: Vec<[u64; 2]> = (0..30).map(|x| [x, x * x % p]).collect();
        pts.extend([[3, 1], [50, 7], [8, 90]]);
        let r = gp_check(&pts, p, 2, 400, 3);
        assert_eq!(r.per_degree[1].max_concentration, 30);
        assert!(!r.per_degree[1].exact);
    }
}
