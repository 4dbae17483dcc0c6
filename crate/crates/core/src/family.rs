//! Parametrized maps `(F(x, y, z̄), G(x, y, z̄))`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{AutError, MapError, NotAutReason, PolyError};
use crate::plane::{shift, split_pair, PlaneMap};
use crate::poly::{MPoly, Vars};
use crate::scalar::{Field, Scalar};

/// Components live over `[x, y, params...]`.
#[derive(Clone, PartialEq, Eq)]
pub struct ParamFamily {
    gx: MPoly,
    gy: MPoly,
}

impl ParamFamily {
    pub fn new(gx: MPoly, gy: MPoly) -> Result<ParamFamily, MapError> {
        let vars = gx.vars();
        if vars != gy.vars() {
            return Err(PolyError::VariableMismatch {
                left: vars.to_string(),
                right: gy.vars().to_string(),
            }
            .into());
        }
        if vars.len() < 2 || vars.names()[0] != "x" || vars.names()[1] != "y" {
            return Err(MapError::Shape(format!(
                "family ambient must start with x, y (got [{vars}])"
            )));
        }
        if gx.field() != gy.field() {
            return Err(PolyError::FieldMismatch {
                left: gx.field().to_string(),
                right: gy.field().to_string(),
            }
            .into());
        }
        Ok(ParamFamily { gx, gy })
    }

    pub fn parse<S: AsRef<str>>(text: &str, field: Field, params: &[S]) -> Result<ParamFamily, MapError> {
        for p in params {
            let p = p.as_ref();
            if p == "x" || p == "y" || p.is_empty() {
                return Err(MapError::Shape(format!("invalid parameter name `{p}`")));
            }
        }
        let vars = Vars::xy_with(params);
        let (left, right) = split_pair(text)?;
        let gx = MPoly::parse(left.1, field, &vars).map_err(|e| shift(e, left.0))?;
        let gy = MPoly::parse(right.1, field, &vars).map_err(|e| shift(e, right.0))?;
        Ok(ParamFamily { gx, gy })
    }

    /// A map seen as a family that ignores its parameters.
    pub fn lift(map: &PlaneMap, vars: &Vars) -> ParamFamily {
        ParamFamily {
            gx: map.gx().embed(vars).expect("x, y lead the ambient"),
            gy: map.gy().embed(vars).expect("x, y lead the ambient"),
        }
    }

    pub fn gx(&self) -> &MPoly {
        &self.gx
    }

    pub fn gy(&self) -> &MPoly {
        &self.gy
    }

    pub fn field(&self) -> Field {
        self.gx.field()
    }

    pub fn vars(&self) -> &Vars {
        self.gx.vars()
    }

    pub fn params(&self) -> &[String] {
        &self.vars().names()[2..]
    }

    pub fn num_params(&self) -> usize {
        self.vars().len() - 2
    }

    /// Total degree in `x, y`.
    pub fn degree(&self) -> Option<u32> {
        self.gx
            .total_degree_in(&[0, 1])
            .max(self.gy.total_degree_in(&[0, 1]))
    }

    /// The map at the parameter point `values`.
    pub fn specialize(&self, values: &[Scalar]) -> PlaneMap {
        assert_eq!(values.len(), self.num_params(), "parameter arity");
        let xy = Vars::xy();
        let field = self.field();
        let mut subst = vec![MPoly::var(field, &xy, 0), MPoly::var(field, &xy, 1)];
        subst.extend(values.iter().map(|v| MPoly::constant(&xy, v.clone())));
        PlaneMap::from_parts(
            self.gx.substitute(&subst).expect("arity"),
            self.gy.substitute(&subst).expect("arity"),
        )
    }

    fn identity_values(&self) -> Vec<MPoly> {
        (0..self.vars().len())
            .map(|i| MPoly::var(self.field(), self.vars(), i))
            .collect()
    }

    /// `self ∘ other`, parameters shared.
    pub fn compose(&self, other: &ParamFamily) -> ParamFamily {
        assert_eq!(self.vars(), other.vars(), "family ambient");
        let mut values = self.identity_values();
        values[0] = other.gx.clone();
        values[1] = other.gy.clone();
        ParamFamily {
            gx: self.gx.substitute(&values).expect("ambient"),
            gy: self.gy.substitute(&values).expect("ambient"),
        }
    }

    /// `g ∘ self`.
    pub fn pre(&self, g: &PlaneMap) -> ParamFamily {
        ParamFamily::lift(g, self.vars()).compose(self)
    }

    /// `self ∘ h`.
    pub fn post(&self, h: &PlaneMap) -> ParamFamily {
        self.compose(&ParamFamily::lift(h, self.vars()))
    }

    pub fn uses_params(&self) -> bool {
        (2..self.vars().len()).any(|i| self.gx.uses_var(i) || self.gy.uses_var(i))
    }

    /// Inverse over the parameter ring. Available for elementary families
    /// whose `x` and `y` coefficients are nonzero constants.
    pub fn elementary_inverse(&self) -> Result<ParamFamily, AutError> {
        let shape = ElementaryShape::of(&self.gx, &self.gy)
            .ok_or_else(|| AutError::Internal("family inverse needs an elementary family".into()))?;
        let (Some(a), Some(b)) = (shape.a.as_constant(), shape.b.as_constant()) else {
            return Err(AutError::NotAnAutomorphism(NotAutReason::NonInvertibleLetter));
        };
        let (Some(ai), Some(bi)) = (a.inv(), b.inv()) else {
            return Err(AutError::NotAnAutomorphism(NotAutReason::NonInvertibleLetter));
        };
        let vars = self.vars();
        let field = self.field();
        let x = MPoly::var(field, vars, 0);
        let y = MPoly::var(field, vars, 1);
        let c = shape.c.embed(vars).unwrap();
        let new_y = (&y - &c).scale(&bi);
        // P(y, z) with y -> b⁻¹(y - c)
        let p = &self.gx - &x.scale(&a);
        let mut values = self.identity_values();
        values[1] = new_y.clone();
        let p_back = p.substitute(&values).expect("ambient");
        Ok(ParamFamily {
            gx: (&x - &p_back).scale(&ai),
            gy: new_y,
        })
    }
}

impl MPoly {
    fn as_constant(&self) -> Option<Scalar> {
        self.is_constant().then(|| self.constant_term())
    }
}

/// Groups `p` by its `(x, y)`-exponents; coefficients are polynomials in the
/// remaining variables.
pub(crate) fn xy_coefficients(p: &MPoly) -> BTreeMap<(u32, u32), MPoly> {
    let rest = p.vars().tail(2);
    let mut out: BTreeMap<(u32, u32), Vec<(Vec<u32>, Scalar)>> = BTreeMap::new();
    for (e, c) in p.terms() {
        out.entry((e[0], e[1]))
            .or_default()
            .push((e[2..].to_vec(), c.clone()));
    }
    out.into_iter()
        .map(|(k, ts)| (k, MPoly::from_terms(p.field(), &rest, ts)))
        .collect()
}

/// `(a x + Σ p_j y^j, b y + c)` with coefficients in the parameters, read off
/// a pair over `[x, y, params...]`. `a` and `b` are nonzero polynomials.
#[derive(Clone, Debug)]
pub(crate) struct ElementaryShape {
    pub a: MPoly,
    pub p: BTreeMap<u32, MPoly>,
    pub b: MPoly,
    pub c: MPoly,
}

impl ElementaryShape {
    pub fn of(gx: &MPoly, gy: &MPoly) -> Option<ElementaryShape> {
        let cx = xy_coefficients(gx);
        let cy = xy_coefficients(gy);
        let rest = gx.vars().tail(2);
        let zero = MPoly::zero(gx.field(), &rest);
        let mut a = zero.clone();
        let mut p = BTreeMap::new();
        for ((i, j), c) in cx {
            match (i, j) {
                (1, 0) => a = c,
                (0, j) => {
                    p.insert(j, c);
                }
                _ => return None,
            }
        }
        let mut b = zero.clone();
        let mut c = zero;
        for ((i, j), v) in cy {
            match (i, j) {
                (0, 1) => b = v,
                (0, 0) => c = v,
                _ => return None,
            }
        }
        if a.is_zero() || b.is_zero() {
            return None;
        }
        Some(ElementaryShape { a, p, b, c })
    }

    /// Degree of `P` in `y`; zero when `P` vanishes.
    pub fn p_degree(&self) -> u32 {
        self.p.keys().next_back().copied().unwrap_or(0)
    }
}

impl fmt::Display for ParamFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.gx, self.gy)
    }
}

impl fmt::Debug for ParamFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParamFamily[{}; {}]{}", self.field(), self.vars(), self)
    }
}

impl Serialize for ParamFamily {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(text: &str, params: &[&str]) -> ParamFamily {
        ParamFamily::parse(text, Field::Rational, params).unwrap()
    }

    #[test]
    fn specialization() {
        let f = fam("(y, y^2 + x + t)", &["t"]);
        let m = f.specialize(&[Field::Rational.from_i64(3)]);
        assert_eq!(m, PlaneMap::parse("(y, y^2 + x + 3)", Field::Rational).unwrap());
        assert!(f.uses_params());
        assert_eq!(f.params(), &["t".to_string()]);
    }

    #[test]
    fn composition_with_maps() {
        let f = fam("(t*x, y + t)", &["t"]);
        let g = PlaneMap::parse("(x + y^2, y)", Field::Rational).unwrap();
        let composed = f.pre(&g);
        assert_eq!(composed, fam("(t*x + y^2 + 2*t*y + t^2, y + t)", &["t"]));
        let composed = f.post(&g);
        assert_eq!(composed, fam("(t*x + t*y^2, y + t)", &["t"]));
    }

    #[test]
    fn elementary_inverse_with_symbolic_translation() {
        let f = fam("(2*x + p*y^2 + q, 3*y + p)", &["p", "q"]);
        let fi = f.elementary_inverse().unwrap();
        let id = ParamFamily::lift(&PlaneMap::identity(Field::Rational), f.vars());
        assert_eq!(f.compose(&fi), id);
        assert_eq!(fi.compose(&f), id);
        assert!(fam("(t*x, y)", &["t"]).elementary_inverse().is_err());
    }

    #[test]
    fn shapes() {
        let f = fam("(b^3*x + a*y^3, b*y)", &["a", "b"]);
        let s = ElementaryShape::of(f.gx(), f.gy()).unwrap();
        assert_eq!(s.p_degree(), 3);
        assert!(s.c.is_zero());
        assert!(ElementaryShape::of(&fam("(y, x)", &["t"]).gx, &fam("(y, x)", &["t"]).gy).is_none());
    }

    #[test]
    fn parse_rejects_bad_params() {
        assert!(ParamFamily::parse("(x, y)", Field::Rational, &["x"]).is_err());
        assert!(ParamFamily::parse("(x + w, y)", Field::Rational, &["t"]).is_err());
    }
}
