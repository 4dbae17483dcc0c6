//! Expansion experiments over `F_p`: specialize a family on a parameter set
//! `B`, count the image of a point set `A` under all the specializations,
//! and report how far `A` concentrates on curves and how much of the family
//! sits in one coset of a template group.

pub mod config;
pub mod count;
pub mod eps;
pub mod gp;

use std::time::Instant;

use serde::Serialize;

use crate::error::LabError;
use crate::family::ParamFamily;
use crate::jung;
use crate::plane::PlaneMap;
use crate::scalar::Scalar;

pub use config::{ExperimentConfig, MapSource, PointSpec, ParamSpec};
pub use count::{act_count, ActCount, CountOptions};
pub use eps::{eps_nilpotent_check, EpsBounds, EpsFinding};
pub use gp::{gp_check, GpDegree, GpReport};

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut acc, mut b, mut e) = (1u64, a % p, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

/// A map over `F_p` flattened to `(coefficient, i, j)` terms.
pub(crate) struct FpMap {
    p: u64,
    gx: Vec<(u64, u32, u32)>,
    gy: Vec<(u64, u32, u32)>,
    max_i: usize,
    max_j: usize,
}

impl FpMap {
    pub fn new(f: &PlaneMap) -> Result<FpMap, LabError> {
        let p = f.field().characteristic();
        if p == 0 {
            return Err(LabError::config("prime", "point counts need a prime field"));
        }
        let flat = |poly: &crate::poly::MPoly| -> Vec<(u64, u32, u32)> {
            poly.terms()
                .map(|(e, c)| (c.residue().expect("prime field"), e[0], e[1]))
                .collect()
        };
        let (gx, gy) = (flat(f.gx()), flat(f.gy()));
        let max_i = gx.iter().chain(&gy).map(|t| t.1).max().unwrap_or(0) as usize;
        let max_j = gx.iter().chain(&gy).map(|t| t.2).max().unwrap_or(0) as usize;
        Ok(FpMap { p, gx, gy, max_i, max_j })
    }

    pub fn apply(&self, x: u64, y: u64) -> [u64; 2] {
        let p = self.p;
        let mut xp = Vec::with_capacity(self.max_i + 1);
        let mut yp = Vec::with_capacity(self.max_j + 1);
        xp.push(1);
        yp.push(1);
        for k in 1..=self.max_i {
            xp.push(mul_mod(xp[k - 1], x, p));
        }
        for k in 1..=self.max_j {
            yp.push(mul_mod(yp[k - 1], y, p));
        }
        let eval = |terms: &[(u64, u32, u32)]| {
            terms.iter().fold(0u64, |acc, &(c, i, j)| {
                (acc + mul_mod(c, mul_mod(xp[i as usize], yp[j as usize], p), p)) % p
            })
        };
        [eval(&self.gx), eval(&self.gy)]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rejection {
    pub index: usize,
    pub params: Vec<Scalar>,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Specialized {
    pub valid: Vec<PlaneMap>,
    pub rejected: Vec<Rejection>,
}

/// Specializes at every parameter point and keeps the automorphisms.
pub fn specialize_family(family: &ParamFamily, b: &[Vec<Scalar>]) -> Specialized {
    let mut out = Specialized::default();
    for (index, point) in b.iter().enumerate() {
        let f = family.specialize(point);
        match jung::decompose(&f) {
            Ok(_) => out.valid.push(f),
            Err(e) => out.rejected.push(Rejection {
                index,
                params: point.clone(),
                reason: e.to_string(),
            }),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub prime: u64,
    pub seed: u64,
    pub a_size: usize,
    pub b_size: usize,
    pub valid_maps: usize,
    pub rejected: Vec<Rejection>,
    pub image_size: u64,
    /// `log |F*A| / log |A|`.
    pub exponent: f64,
    /// `1 + log |F| / log |A|`, the largest possible exponent.
    pub exponent_bound: f64,
    pub gp: GpReport,
    pub eps: Option<EpsFinding>,
    /// Wall-clock time; left out of the structured report.
    #[serde(skip)]
    pub millis: u128,
}

impl ExpansionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub const CSV_HEADER: [&'static str; 8] =
        ["|A|", "|B|", "|F|", "|F*A|", "exponent", "gp_max_line", "eps_nilp_fraction", "millis"];

    pub fn csv_row(&self) -> [String; 8] {
        [
            self.a_size.to_string(),
            self.b_size.to_string(),
            self.valid_maps.to_string(),
            self.image_size.to_string(),
            format!("{:.6}", self.exponent),
            self.gp.max_line().to_string(),
            self.eps.as_ref().map_or(String::new(), |e| format!("{:.6}", e.fraction)),
            self.millis.to_string(),
        ]
    }
}

fn exponent(n: f64, base: f64) -> f64 {
    if base <= 1.0 {
        return if n <= 1.0 { 1.0 } else { f64::INFINITY };
    }
    n.ln() / base.ln()
}

/// Runs a validated configuration. The report depends only on the config,
/// not on the worker count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExpansionReport, LabError> {
    let start = Instant::now();
    let resolved = cfg.resolve()?;
    let field = resolved.field;
    let p = field.characteristic();
    let (specialized, b_size) = match &resolved.source {
        config::Resolved::Family { family, b } => (specialize_family(family, b), b.len()),
        config::Resolved::Maps(maps) => {
            let mut s = Specialized::default();
            for (index, m) in maps.iter().enumerate() {
                match jung::decompose(m) {
                    Ok(_) => s.valid.push(m.clone()),
                    Err(e) => s.rejected.push(Rejection {
                        index,
                        params: Vec::new(),
                        reason: e.to_string(),
                    }),
                }
            }
            (s, maps.len())
        }
    };
    let count = act_count(
        &specialized.valid,
        &resolved.points,
        &CountOptions {
            workers: cfg.workers,
            spill_threshold: cfg.spill_threshold,
            keep_image: false,
        },
    )?;
    let gp = gp_check(&resolved.points, p, cfg.gp_degree, cfg.gp_budget, cfg.seed);
    let eps = if cfg.eps_check && specialized.valid.len() >= 2 {
        Some(eps_nilpotent_check(&specialized.valid, &EpsBounds::default())?)
    } else {
        None
    };
    let a = resolved.points.len() as f64;
    let f = specialized.valid.len() as f64;
    Ok(ExpansionReport {
        prime: p,
        seed: cfg.seed,
        a_size: resolved.points.len(),
        b_size,
        valid_maps: specialized.valid.len(),
        rejected: specialized.rejected,
        image_size: count.count,
        exponent: exponent(count.count as f64, a),
        exponent_bound: 1.0 + exponent(f.max(1.0), a),
        gp,
        eps,
        millis: start.elapsed().as_millis(),
    })
}
