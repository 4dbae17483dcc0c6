//! Polynomial endomorphisms of the plane.
//!
//! `g.compose(&h)` is `g ∘ h`: the components of `h` are substituted into
//! those of `g`, so `g.compose(&h).apply(p) == g.apply(&h.apply(p))`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{MapError, PolyError};
use crate::poly::{MPoly, UPoly, Vars};
use crate::scalar::{Field, Scalar};

/// A pair `(gx, gy)` of polynomials in `x, y`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PlaneMap {
    gx: MPoly,
    gy: MPoly,
}

/// Which of the subgroups `A`, `E` and `S = A ∩ E` a map lies in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", content = "degree")]
pub enum FactorClass {
    S,
    AffineOnly,
    /// Elementary but not affine; carries the least `n` with the map in `E_n`.
    ElementaryOnly(u32),
    General,
}

/// `(a x + P(y), b y + c)` with `a b != 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Elementary {
    pub a: Scalar,
    pub p: UPoly,
    pub b: Scalar,
    pub c: Scalar,
}

/// `(m00 x + m01 y + t0, m10 x + m11 y + t1)` with nonzero determinant.
#[derive(Clone, Debug, PartialEq)]
pub struct Affine {
    pub m: [[Scalar; 2]; 2],
    pub t: [Scalar; 2],
}

impl PlaneMap {
    /// Both components must live over `[x, y]` and share a field.
    pub fn new(gx: MPoly, gy: MPoly) -> Result<PlaneMap, MapError> {
        let xy = Vars::xy();
        for p in [&gx, &gy] {
            if *p.vars() != xy {
                return Err(PolyError::VariableMismatch {
                    left: p.vars().to_string(),
                    right: xy.to_string(),
                }
                .into());
            }
        }
        if gx.field() != gy.field() {
            return Err(PolyError::FieldMismatch {
                left: gx.field().to_string(),
                right: gy.field().to_string(),
            }
            .into());
        }
        Ok(PlaneMap { gx, gy })
    }

    pub(crate) fn from_parts(gx: MPoly, gy: MPoly) -> PlaneMap {
        debug_assert_eq!(gx.vars(), &Vars::xy());
        debug_assert_eq!(gy.vars(), &Vars::xy());
        PlaneMap { gx, gy }
    }

    pub fn identity(field: Field) -> PlaneMap {
        let xy = Vars::xy();
        PlaneMap {
            gx: MPoly::var(field, &xy, 0),
            gy: MPoly::var(field, &xy, 1),
        }
    }

    /// `τ = (y, x)`.
    pub fn swap(field: Field) -> PlaneMap {
        let xy = Vars::xy();
        PlaneMap {
            gx: MPoly::var(field, &xy, 1),
            gy: MPoly::var(field, &xy, 0),
        }
    }

    /// Reads `"(expr, expr)"`.
    pub fn parse(text: &str, field: Field) -> Result<PlaneMap, MapError> {
        let (left, right) = split_pair(text)?;
        let xy = Vars::xy();
        let gx = MPoly::parse(left.1, field, &xy).map_err(|e| shift(e, left.0))?;
        let gy = MPoly::parse(right.1, field, &xy).map_err(|e| shift(e, right.0))?;
        Ok(PlaneMap { gx, gy })
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

    /// `max(deg gx, deg gy)`, or `None` for the zero map.
    pub fn degree(&self) -> Option<u32> {
        self.gx.total_degree().max(self.gy.total_degree())
    }

    pub fn is_identity(&self) -> bool {
        *self == PlaneMap::identity(self.field())
    }

    /// `self ∘ h`.
    pub fn compose(&self, h: &PlaneMap) -> PlaneMap {
        let values = [h.gx.clone(), h.gy.clone()];
        PlaneMap {
            gx: self.gx.substitute(&values).expect("plane ambient"),
            gy: self.gy.substitute(&values).expect("plane ambient"),
        }
    }

    pub fn apply(&self, p: &[Scalar; 2]) -> [Scalar; 2] {
        [self.gx.eval(p), self.gy.eval(p)]
    }

    pub fn jacobian_det(&self) -> MPoly {
        let (fx, fy) = (self.gx.partial(0), self.gx.partial(1));
        let (gx, gy) = (self.gy.partial(0), self.gy.partial(1));
        &(&fx * &gy) - &(&fy * &gx)
    }

    pub fn as_affine(&self) -> Option<Affine> {
        if self.gx.total_degree().unwrap_or(0) > 1 || self.gy.total_degree().unwrap_or(0) > 1 {
            return None;
        }
        let m = [
            [self.gx.coeff(&[1, 0]), self.gx.coeff(&[0, 1])],
            [self.gy.coeff(&[1, 0]), self.gy.coeff(&[0, 1])],
        ];
        let det = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
        if det.is_zero() {
            return None;
        }
        Some(Affine {
            m,
            t: [self.gx.constant_term(), self.gy.constant_term()],
        })
    }

    pub fn as_elementary(&self) -> Option<Elementary> {
        let field = self.field();
        // gy = b y + c
        if self.gy.terms().any(|(e, _)| e[0] > 0 || e[1] > 1) {
            return None;
        }
        // gx = a x + P(y)
        if self.gx.terms().any(|(e, _)| e[0] > 1 || (e[0] == 1 && e[1] > 0)) {
            return None;
        }
        let a = self.gx.coeff(&[1, 0]);
        let b = self.gy.coeff(&[0, 1]);
        if a.is_zero() || b.is_zero() {
            return None;
        }
        let dp = self.gx.degree_in(1).unwrap_or(0) as usize;
        let mut pc = vec![field.zero(); dp + 1];
        for (e, c) in self.gx.terms() {
            if e[0] == 0 {
                pc[e[1] as usize] = c.clone();
            }
        }
        Some(Elementary {
            a,
            p: UPoly::new(field, pc),
            b,
            c: self.gy.constant_term(),
        })
    }

    pub fn classify(&self) -> FactorClass {
        let affine = self.as_affine().is_some();
        match (affine, self.as_elementary()) {
            (true, Some(_)) => FactorClass::S,
            (true, None) => FactorClass::AffineOnly,
            (false, Some(e)) => FactorClass::ElementaryOnly(e.p.degree().unwrap_or(0) as u32),
            (false, None) => FactorClass::General,
        }
    }

    pub fn is_in_s(&self) -> bool {
        self.classify() == FactorClass::S
    }
}

impl Elementary {
    pub fn field(&self) -> Field {
        self.a.field()
    }

    pub fn to_map(&self) -> PlaneMap {
        let xy = Vars::xy();
        let x = MPoly::var(self.field(), &xy, 0);
        let y = MPoly::var(self.field(), &xy, 1);
        let gx = &x.scale(&self.a) + &self.p.to_mpoly(&xy, 1);
        let gy = &y.scale(&self.b) + &MPoly::constant(&xy, self.c.clone());
        PlaneMap::from_parts(gx, gy)
    }

    /// `(a⁻¹(x − P(b⁻¹(y − c))), b⁻¹(y − c))`.
    pub fn inverse(&self) -> Elementary {
        let field = self.field();
        let ai = self.a.inv().expect("a != 0");
        let bi = self.b.inv().expect("b != 0");
        // P(b⁻¹ y - b⁻¹ c) as a polynomial in y
        let shift = UPoly::new(field, vec![-&(&bi * &self.c), bi.clone()]);
        let composed = compose_upoly(&self.p, &shift);
        Elementary {
            a: ai.clone(),
            p: composed.scale(&-ai),
            b: bi.clone(),
            c: -&(&bi * &self.c),
        }
    }
}

/// `p(q(t))` for univariate polynomials, by Horner's rule.
pub(crate) fn compose_upoly(p: &UPoly, q: &UPoly) -> UPoly {
    let mut acc = UPoly::zero(p.field());
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(q).add(&UPoly::constant(c.clone()));
    }
    acc
}

impl Affine {
    pub fn field(&self) -> Field {
        self.m[0][0].field()
    }

    pub fn det(&self) -> Scalar {
        &(&self.m[0][0] * &self.m[1][1]) - &(&self.m[0][1] * &self.m[1][0])
    }

    pub fn to_map(&self) -> PlaneMap {
        let xy = Vars::xy();
        let x = MPoly::var(self.field(), &xy, 0);
        let y = MPoly::var(self.field(), &xy, 1);
        let row = |r: usize| {
            &(&x.scale(&self.m[r][0]) + &y.scale(&self.m[r][1]))
                + &MPoly::constant(&xy, self.t[r].clone())
        };
        PlaneMap::from_parts(row(0), row(1))
    }

    pub fn inverse(&self) -> Affine {
        let di = self.det().inv().expect("nonzero determinant");
        let m = [
            [&self.m[1][1] * &di, -&(&self.m[0][1] * &di)],
            [-&(&self.m[1][0] * &di), &self.m[0][0] * &di],
        ];
        let t = [
            -&(&(&m[0][0] * &self.t[0]) + &(&m[0][1] * &self.t[1])),
            -&(&(&m[1][0] * &self.t[0]) + &(&m[1][1] * &self.t[1])),
        ];
        Affine { m, t }
    }
}

/// Splits `"(left, right)"` at its top-level comma, returning each half with
/// its byte offset in `text`.
pub(crate) fn split_pair(text: &str) -> Result<((usize, &str), (usize, &str)), MapError> {
    let trimmed_start = text.len() - text.trim_start().len();
    let t = text.trim();
    if !t.starts_with('(') || !t.ends_with(')') || t.len() < 2 {
        return Err(MapError::Shape("missing enclosing parentheses".into()));
    }
    let inner = &t[1..t.len() - 1];
    let base = trimmed_start + 1;
    let mut depth = 0i32;
    let mut split = None;
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(MapError::Shape("unbalanced parentheses".into()));
                }
            }
            ',' if depth == 0 => {
                if split.is_some() {
                    return Err(MapError::Shape("more than two components".into()));
                }
                split = Some(i);
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(MapError::Shape("unbalanced parentheses".into()));
    }
    let i = split.ok_or_else(|| MapError::Shape("expected two comma-separated components".into()))?;
    Ok(((base, &inner[..i]), (base + i + 1, &inner[i + 1..])))
}

pub(crate) fn shift(e: PolyError, offset: usize) -> MapError {
    let e = match e {
        PolyError::Syntax { pos, message } => PolyError::Syntax {
            pos: pos + offset,
            message,
        },
        PolyError::UnknownVariable { name, pos } => PolyError::UnknownVariable {
            name,
            pos: pos + offset,
        },
        PolyError::NonLiteralDivision { pos } => PolyError::NonLiteralDivision { pos: pos + offset },
        PolyError::ZeroDenominator { pos } => PolyError::ZeroDenominator { pos: pos + offset },
        other => other,
    };
    MapError::Poly(e)
}

impl fmt::Display for PlaneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.gx, self.gy)
    }
}

impl fmt::Debug for PlaneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlaneMap[{}]{}", self.field(), self)
    }
}

impl Serialize for PlaneMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for MPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
