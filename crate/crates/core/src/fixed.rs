//! Fixed points of a plane map: the common zeros of `gx − x` and `gy − y`.
//!
//! A non-constant common factor gives a curve of fixed points. Otherwise the
//! fixed set is finite and the points over the base field come from the
//! resultant in `y` and a univariate gcd in `x` for each of its roots.
//! Roots are only searched in the base field; the finiteness verdict does
//! not depend on the field.

use serde::Serialize;

use crate::plane::PlaneMap;
use crate::poly::{gcd_bivariate, resultant_x, square_free_part, MPoly, UPoly, Vars};
use crate::scalar::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FixedSet {
    WholePlane,
    Finite {
        points: Vec<[Scalar; 2]>,
        /// Whether every base-field root was found; always true over `F_p`.
        complete: bool,
        certificate: FiniteCertificate,
    },
    InfiniteCurve {
        /// Square-free common factor of `gx − x` and `gy − y`.
        components: Vec<MPoly>,
        /// Fixed points off the curve.
        isolated_points: Vec<[Scalar; 2]>,
        complete: bool,
    },
}

/// The gcd of `gx − x` and `gy − y` is constant, so the common zeros are
/// finite: at most `bezout_bound` of them, lying over the roots of a
/// nonzero resultant of degree `resultant_degree`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteCertificate {
    pub resultant_degree: u32,
    pub bezout_bound: u32,
}

impl FixedSet {
    pub fn is_finite(&self) -> bool {
        matches!(self, FixedSet::Finite { .. })
    }

    /// Whether the point is fixed, read off the description.
    pub fn contains(&self, p: &[Scalar; 2]) -> bool {
        match self {
            FixedSet::WholePlane => true,
            FixedSet::Finite { points, .. } => points.contains(p),
            FixedSet::InfiniteCurve {
                components,
                isolated_points,
                ..
            } => components.iter().any(|c| c.eval(p).is_zero()) || isolated_points.contains(p),
        }
    }
}

pub fn fixed_set(g: &PlaneMap) -> FixedSet {
    let field = g.field();
    let xy = Vars::xy();
    let u = g.gx() - &MPoly::var(field, &xy, 0);
    let v = g.gy() - &MPoly::var(field, &xy, 1);
    if u.is_zero() && v.is_zero() {
        return FixedSet::WholePlane;
    }
    // a zero equation imposes nothing, and gcd(u, 0) = u
    let common = gcd_bivariate(&u, &v);
    if !common.is_constant() {
        let curve = square_free_part(&common);
        let (u1, v1) = (u.div_exact(&common).unwrap(), v.div_exact(&common).unwrap());
        let (mut points, complete) = if u1.is_zero() || v1.is_zero() {
            // only one equation: its zeros are exactly the curve
            (Vec::new(), true)
        } else {
            common_zeros(&u1, &v1)
        };
        points.retain(|p| !curve.eval(p).is_zero());
        return FixedSet::InfiniteCurve {
            components: vec![curve],
            isolated_points: points,
            complete,
        };
    }
    if u.is_zero() || v.is_zero() {
        // the other equation is a nonzero constant
        return FixedSet::Finite {
            points: Vec::new(),
            complete: true,
            certificate: FiniteCertificate {
                resultant_degree: 0,
                bezout_bound: 0,
            },
        };
    }
    let res = resultant_x(&u, &v);
    let (points, complete) = common_zeros(&u, &v);
    FixedSet::Finite {
        points,
        complete,
        certificate: FiniteCertificate {
            resultant_degree: res.degree().unwrap_or(0) as u32,
            bezout_bound: u.total_degree().unwrap_or(0) * v.total_degree().unwrap_or(0),
        },
    }
}

/// Base-field zeros of two coprime nonzero polynomials, sorted.
fn common_zeros(u: &MPoly, v: &MPoly) -> (Vec<[Scalar; 2]>, bool) {
    let field = u.field();
    let res = resultant_x(u, v);
    debug_assert!(!res.is_zero(), "coprime inputs");
    let (ys, mut complete) = res.roots();
    let mut points = Vec::new();
    for y0 in ys {
        let fu = specialize_y(u, &y0);
        let fv = specialize_y(v, &y0);
        let g = fu.gcd(&fv);
        if g.is_zero() {
            // both vanish on the line, which a common factor would explain
            continue;
        }
        let (xs, c) = g.roots();
        complete &= c;
        points.extend(xs.into_iter().map(|x0| [x0, y0.clone()]));
    }
    sort_points(field, &mut points);
    (points, complete)
}

/// `p(x, y₀)` as a polynomial in `x`.
fn specialize_y(p: &MPoly, y0: &Scalar) -> UPoly {
    let field = p.field();
    let deg = p.degree_in(0).unwrap_or(0) as usize;
    let mut coeffs = vec![field.zero(); deg + 1];
    for (e, c) in p.terms() {
        let term = c * &y0.pow(e[1]);
        coeffs[e[0] as usize] = &coeffs[e[0] as usize] + &term;
    }
    UPoly::new(field, coeffs)
}

fn sort_points(field: Field, points: &mut [[Scalar; 2]]) {
    match field {
        Field::Prime(_) => points.sort_by_key(|p| (p[0].residue(), p[1].residue())),
        Field::Rational => points.sort_by(|a, b| {
            (a[0].as_rational(), a[1].as_rational()).cmp(&(b[0].as_rational(), b[1].as_rational()))
        }),
    }
}
