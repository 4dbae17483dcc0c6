//! Experiment configuration, read from TOML.
//!
//! ```toml
//! prime = 10007
//! seed = 7
//!
//! [family]
//! expr = "(y, y^2 + x + b)"
//! params = ["b"]
//!
//! [b]
//! random = 64
//!
//! [a]
//! grid = [[0, 63], [0, 63]]
//! ```
//!
//! `[family]` takes `expr` and `params`, or an explicit `maps` list (then
//! `[b]` is omitted). `[b]` takes one of `values`, `random` or `ranges`
//! (inclusive, one per parameter); `[a]` one of `grid` (inclusive `x` and
//! `y` ranges), `random` or `points`.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::LabError;
use crate::family::ParamFamily;
use crate::plane::PlaneMap;
use crate::scalar::{is_prime, Field, Scalar};

fn default_prime() -> u64 {
    10007
}
fn default_gp_degree() -> u32 {
    1
}
fn default_gp_budget() -> usize {
    2000
}
fn default_workers() -> usize {
    1
}
fn default_spill() -> usize {
    1 << 23
}
fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_prime")]
    pub prime: u64,
    #[serde(default)]
    pub seed: u64,
    pub family: MapSource,
    #[serde(default)]
    pub b: Option<ParamSpec>,
    pub a: PointSpec,
    #[serde(default = "default_gp_degree")]
    pub gp_degree: u32,
    #[serde(default = "default_gp_budget")]
    pub gp_budget: usize,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_spill")]
    pub spill_threshold: usize,
    #[serde(default = "default_true")]
    pub eps_check: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSource {
    pub expr: Option<String>,
    #[serde(default)]
    pub params: Vec<String>,
    pub maps: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    pub values: Option<Vec<Vec<u64>>>,
    pub random: Option<usize>,
    pub ranges: Option<Vec<[u64; 2]>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub grid: Option<[[u64; 2]; 2]>,
    pub random: Option<usize>,
    pub points: Option<Vec<[u64; 2]>>,
}

pub(crate) enum Resolved {
    Family { family: ParamFamily, b: Vec<Vec<Scalar>> },
    Maps(Vec<PlaneMap>),
}

pub(crate) struct ResolvedConfig {
    pub field: Field,
    pub source: Resolved,
    pub points: Vec<[u64; 2]>,
}

/// Distinct random tuples in `F_p^m`, in draw order.
fn distinct_tuples(rng: &mut ChaCha8Rng, p: u64, m: usize, n: usize) -> Vec<Vec<u64>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let t: Vec<u64> = (0..m).map(|_| rng.gen_range(0..p)).collect();
        if seen.insert(t.clone()) {
            out.push(t);
        }
    }
    out
}

fn check_range(field: &str, r: [u64; 2], p: u64) -> Result<(), LabError> {
    if r[0] > r[1] || r[1] >= p {
        return Err(LabError::config(
            field,
            format!("range [{}, {}] must satisfy lo <= hi < p = {p}", r[0], r[1]),
        ));
    }
    Ok(())
}

/// `p^m`, saturating.
fn space_size(p: u64, m: usize) -> u64 {
    (0..m).fold(1u64, |acc, _| acc.saturating_mul(p))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<ExperimentConfig, LabError> {
        toml::from_str(text).map_err(|e| LabError::ConfigSyntax(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every field without running anything.
    pub fn validate(&self) -> Result<(), LabError> {
        self.resolve().map(|_| ())
    }

    pub(crate) fn resolve(&self) -> Result<ResolvedConfig, LabError> {
        let p = self.prime;
        if !is_prime(p) {
            return Err(LabError::config("prime", format!("{p} is not prime")));
        }
        if p >= 1 << 31 {
            return Err(LabError::config("prime", "must be below 2^31 so points pack into 64 bits"));
        }
        let field = Field::Prime(p);
        if self.workers == 0 {
            return Err(LabError::config("workers", "must be at least 1"));
        }
        if self.gp_degree == 0 {
            return Err(LabError::config("gp_degree", "must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);

        let source = match (&self.family.expr, &self.family.maps) {
            (Some(expr), None) => {
                if self.family.params.is_empty() {
                    return Err(LabError::config("family.params", "a family needs at least one parameter"));
                }
                let family = ParamFamily::parse(expr, field, &self.family.params)
                    .map_err(|e| LabError::config("family.expr", e.to_string()))?;
                let m = self.family.params.len();
                let Some(spec) = &self.b else {
                    return Err(LabError::config("b", "a family needs a parameter set"));
                };
                let tuples = match (&spec.values, spec.random, &spec.ranges) {
                    (Some(values), None, None) => {
                        if values.is_empty() {
                            return Err(LabError::config("b.values", "must not be empty"));
                        }
                        if let Some(v) = values.iter().find(|v| v.len() != m) {
                            return Err(LabError::config(
                                "b.values",
                                format!("entry {v:?} has {} values for {m} parameters", v.len()),
                            ));
                        }
                        values.clone()
                    }
                    (None, Some(n), None) => {
                        if n == 0 {
                            return Err(LabError::config("b.random", "must be at least 1"));
                        }
                        if n as u64 > space_size(p, m) {
                            return Err(LabError::config("b.random", "more points than the parameter space holds"));
                        }
                        distinct_tuples(&mut rng, p, m, n)
                    }
                    (None, None, Some(ranges)) => {
                        if ranges.len() != m {
                            return Err(LabError::config(
                                "b.ranges",
                                format!("{} ranges for {m} parameters", ranges.len()),
                            ));
                        }
                        for r in ranges {
                            check_range("b.ranges", *r, p)?;
                        }
                        let mut out: Vec<Vec<u64>> = vec![Vec::new()];
                        for r in ranges {
                            out = out
                                .into_iter()
                                .flat_map(|prefix| {
                                    (r[0]..=r[1]).map(move |v| {
                                        let mut t = prefix.clone();
                                        t.push(v);
                                        t
                                    })
                                })
                                .collect();
                        }
                        out
                    }
                    _ => return Err(LabError::config("b", "give exactly one of values, random, ranges")),
                };
                let b = tuples
                    .into_iter()
                    .map(|t| t.into_iter().map(|v| field.from_i64((v % p) as i64)).collect())
                    .collect();
                Resolved::Family { family, b }
            }
            (None, Some(maps)) => {
                if self.b.is_some() {
                    return Err(LabError::config("b", "not used with an explicit map list"));
                }
                if maps.is_empty() {
                    return Err(LabError::config("family.maps", "must not be empty"));
                }
                let parsed = maps
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        PlaneMap::parse(m, field).map_err(|e| LabError::config(&format!("family.maps[{i}]"), e.to_string()))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Resolved::Maps(parsed)
            }
            _ => return Err(LabError::config("family", "give exactly one of expr, maps")),
        };

        let points = match (&self.a.grid, self.a.random, &self.a.points) {
            (Some(grid), None, None) => {
                check_range("a.grid", grid[0], p)?;
                check_range("a.grid", grid[1], p)?;
                (grid[0][0]..=grid[0][1])
                    .flat_map(|x| (grid[1][0]..=grid[1][1]).map(move |y| [x, y]))
                    .collect()
            }
            (None, Some(n), None) => {
                if n == 0 {
                    return Err(LabError::config("a.random", "must be at least 1"));
                }
                if n as u64 > space_size(p, 2) {
                    return Err(LabError::config("a.random", "more points than the plane holds"));
                }
                distinct_tuples(&mut rng, p, 2, n)
                    .into_iter()
                    .map(|t| [t[0], t[1]])
                    .collect()
            }
            (None, None, Some(points)) => {
                if points.is_empty() {
                    return Err(LabError::config("a.points", "must not be empty"));
                }
                if let Some(pt) = points.iter().find(|pt| pt[0] >= p || pt[1] >= p) {
                    return Err(LabError::config("a.points", format!("{pt:?} is not in [0, p)^2")));
                }
                let distinct: BTreeSet<[u64; 2]> = points.iter().copied().collect();
                if distinct.len() != points.len() {
                    return Err(LabError::config("a.points", "points must be distinct"));
                }
                points.clone()
            }
            _ => return Err(LabError::config("a", "give exactly one of grid, random, points")),
        };
        Ok(ResolvedConfig { field, source, points })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRANSLATIONS: &str = r#"
prime = 10007
seed = 3

[family]
expr = "(x + b, y + b)"
params = ["b"]

[b]
ranges = [[0, 7]]

[a]
grid = [[0, 7], [0, 7]]
"#;

    #[test]
    fn parses_and_resolves() {
        let cfg = ExperimentConfig::from_toml(TRANSLATIONS).unwrap();
        assert_eq!(cfg.gp_degree, 1);
        assert_eq!(cfg.workers, 1);
        let r = cfg.resolve().unwrap();
        assert_eq!(r.points.len(), 64);
        let Resolved::Family { b, .. } = r.source else {
            panic!("expected a family");
        };
        assert_eq!(b.len(), 8);
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn field_level_errors() {
        let bad = TRANSLATIONS.replace("prime = 10007", "prime = 10008");
        let err = ExperimentConfig::from_toml(&bad).unwrap().validate().unwrap_err();
        assert!(matches!(err, LabError::Config { ref field, .. } if field == "prime"));

        let bad = TRANSLATIONS.replace("grid = [[0, 7], [0, 7]]", "grid = [[0, 7], [5, 10007]]");
        let err = ExperimentConfig::from_toml(&bad).unwrap().validate().unwrap_err();
        assert!(matches!(err, LabError::Config { ref field, .. } if field == "a.grid"));

        let bad = TRANSLATIONS.replace("ranges = [[0, 7]]", "ranges = [[0, 7]]\nrandom = 3");
        let err = ExperimentConfig::from_toml(&bad).unwrap().validate().unwrap_err();
        assert!(matches!(err, LabError::Config { ref field, .. } if field == "b"));

        let bad = TRANSLATIONS.replace("(x + b, y + b)", "(x + b, y + c)");
        let err = ExperimentConfig::from_toml(&bad).unwrap().validate().unwrap_err();
        assert!(matches!(err, LabError::Config { ref field, .. } if field == "family.expr"));

        let bad = TRANSLATIONS.replace("seed = 3", "seed = 3\ncolour = 1");
        assert!(matches!(ExperimentConfig::from_toml(&bad), Err(LabError::ConfigSyntax(_))));
    }

    #[test]
    fn random_sets_are_seeded_and_distinct() {
        let text = TRANSLATIONS
            .replace("ranges = [[0, 7]]", "random = 50")
            .replace("grid = [[0, 7], [0, 7]]", "random = 200");
        let cfg = ExperimentConfig::from_toml(&text).unwrap();
        let r1 = cfg.resolve().unwrap();
        let r2 = cfg.resolve().unwrap();
        assert_eq!(r1.points, r2.points);
        let distinct: BTreeSet<_> = r1.points.iter().collect();
        assert_eq!(distinct.len(), 200);
    }
}
