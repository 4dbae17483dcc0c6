//! Bivariate gcd and resultant, treating `K[x, y]` as `(K[y])[x]`.
//!
//! The gcd uses a primitive polynomial remainder sequence: pseudo-remainders
//! with the `K[y]`-content stripped at every step. The resultant uses the
//! subresultant recurrence so that every division in `K[y]` is exact.

use super::{MPoly, UPoly, Vars};
use crate::scalar::Field;

/// A polynomial in `x` whose coefficients are polynomials in `y`.
#[derive(Clone, Debug, PartialEq)]
struct XPoly {
    field: Field,
    coeffs: Vec<UPoly>,
}

impl XPoly {
    fn new(field: Field, mut coeffs: Vec<UPoly>) -> XPoly {
        while coeffs.last().is_some_and(UPoly::is_zero) {
            coeffs.pop();
        }
        XPoly { field, coeffs }
    }

    /// Reads a polynomial of a two-variable ambient; position 0 plays `x`.
    fn from_mpoly(p: &MPoly) -> XPoly {
        assert_eq!(p.vars().len(), 2, "bivariate polynomial expected");
        let dx = p.degree_in(0).unwrap_or(0) as usize;
        let mut rows: Vec<Vec<crate::scalar::Scalar>> = vec![Vec::new(); dx + 1];
        for (e, c) in p.terms() {
            let row = &mut rows[e[0] as usize];
            let j = e[1] as usize;
            if row.len() <= j {
                row.resize(j + 1, p.field().zero());
            }
            row[j] = c.clone();
        }
        XPoly::new(
            p.field(),
            rows.into_iter().map(|r| UPoly::new(p.field(), r)).collect(),
        )
    }

    fn to_mpoly(&self, vars: &Vars) -> MPoly {
        let terms = self.coeffs.iter().enumerate().flat_map(|(i, c)| {
            c.coeffs()
                .iter()
                .enumerate()
                .map(move |(j, s)| (vec![i as u32, j as u32], s.clone()))
        });
        MPoly::from_terms(self.field, vars, terms)
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lc(&self) -> UPoly {
        self.coeffs.last().cloned().unwrap_or_else(|| UPoly::zero(self.field))
    }

    fn scale(&self, c: &UPoly) -> XPoly {
        XPoly::new(self.field, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    fn div_exact_by(&self, c: &UPoly) -> XPoly {
        XPoly::new(
            self.field,
            self.coeffs
                .iter()
                .map(|a| a.div_exact(c).expect("exact division in K[y]"))
                .collect(),
        )
    }

    /// Monic gcd of the coefficients.
    fn content(&self) -> UPoly {
        self.coeffs
            .iter()
            .fold(UPoly::zero(self.field), |g, c| g.gcd(c))
    }

    fn primitive_part(&self) -> XPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.div_exact_by(&self.content())
    }

    /// `lc(b)^(deg a - deg b + 1) * a mod b`.
    fn prem(&self, b: &XPoly) -> XPoly {
        let db = b.degree().expect("nonzero divisor");
        let lb = b.lc();
        let mut r = self.clone();
        let Some(da) = self.degree() else {
            return r;
        };
        if da < db {
            return r;
        }
        for _ in 0..=(da - db) {
            r = r.scale(&lb);
        }
        // now each reduction step divides exactly by lb
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let q = r.lc().div_exact(&lb).expect("scaled remainder divisible by lc");
            let shift = dr - db;
            let mut coeffs = r.coeffs.clone();
            for (j, bc) in b.coeffs.iter().enumerate() {
                coeffs[shift + j] = coeffs[shift + j].sub(&q.mul(bc));
            }
            r = XPoly::new(self.field, coeffs);
        }
        r
    }
}

/// Greatest common divisor of two bivariate polynomials (ambient of length
/// two, position 0 treated as `x`), normalized to be monic under the
/// lexicographic order `x > y`. `gcd(f, 0)` is `f` made monic; `gcd(0, 0)`
/// is zero.
pub fn gcd_bivariate(f: &MPoly, g: &MPoly) -> MPoly {
    assert_eq!(f.vars(), g.vars(), "gcd ambient");
    assert_eq!(f.field(), g.field(), "gcd field");
    if f.is_zero() {
        return g.monic();
    }
    if g.is_zero() {
        return f.monic();
    }
    let a = XPoly::from_mpoly(f);
    let b = XPoly::from_mpoly(g);
    let content = a.content().gcd(&b.content());
    let (mut a, mut b) = (a.primitive_part(), b.primitive_part());
    if a.degree() < b.degree() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        let r = a.prem(&b);
        a = b;
        b = r.primitive_part();
    }
    let g = if a.degree() == Some(0) {
        XPoly::new(f.field(), vec![content])
    } else {
        a.primitive_part().scale(&content)
    };
    g.to_mpoly(f.vars()).monic()
}

/// Resultant with respect to the first ambient variable, as a polynomial in
/// the second. Zero if either input is zero.
pub fn resultant_x(f: &MPoly, g: &MPoly) -> UPoly {
    let field = f.field();
    let mut a = XPoly::from_mpoly(f);
    let mut b = XPoly::from_mpoly(g);
    if a.is_zero() || b.is_zero() {
        return UPoly::zero(field);
    }
    let mut sign_flip = false;
    if a.degree() < b.degree() {
        if a.degree().unwrap() % 2 == 1 && b.degree().unwrap() % 2 == 1 {
            sign_flip = true;
        }
        std::mem::swap(&mut a, &mut b);
    }
    if b.degree() == Some(0) {
        let r = b.lc().pow(a.degree().unwrap() as u32);
        return if sign_flip { r.scale(&-field.one()) } else { r };
    }
    let ca = a.content();
    let cb = b.content();
    let t = ca
        .pow(b.degree().unwrap() as u32)
        .mul(&cb.pow(a.degree().unwrap() as u32));
    a = a.div_exact_by(&ca);
    b = b.div_exact_by(&cb);
    let mut g = UPoly::one(field);
    let mut h = UPoly::one(field);
    loop {
        let da = a.degree().unwrap();
        let db = b.degree().unwrap();
        let delta = (da - db) as u32;
        if da % 2 == 1 && db % 2 == 1 {
            sign_flip = !sign_flip;
        }
        let r = a.prem(&b);
        a = b;
        if r.is_zero() {
            return UPoly::zero(field);
        }
        let divisor = g.mul(&h.pow(delta));
        b = r.div_exact_by(&divisor);
        g = a.lc();
        // h <- g^delta / h^(delta - 1)
        h = if delta == 0 {
            h.clone()
        } else {
            g.pow(delta)
                .div_exact(&h.pow(delta - 1))
                .expect("subresultant division is exact")
        };
        if b.degree() == Some(0) {
            let da = a.degree().unwrap() as u32;
            let lb = b.lc();
            // h <- lb^da / h^(da - 1)
            let hn = if da == 0 {
                h
            } else {
                lb.pow(da).div_exact(&h.pow(da - 1)).expect("exact")
            };
            let res = hn.mul(&t);
            return if sign_flip { res.scale(&-field.one()) } else { res };
        }
    }
}

/// Product of the distinct irreducible factors, computed as
/// `f / gcd(f, df/dx, df/dy)`. Over `F_p` a factor whose partials both
/// vanish is kept with its multiplicity.
pub fn square_free_part(f: &MPoly) -> MPoly {
    if f.is_constant() {
        return f.monic();
    }
    let g = gcd_bivariate(&gcd_bivariate(f, &f.partial(0)), &f.partial(1));
    let q = f.div_exact(&g).expect("gcd divides");
    if q.is_constant() {
        f.monic()
    } else {
        q.monic()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;
    use proptest::prelude::*;

    fn p(field: Field, s: &str) -> MPoly {
        MPoly::parse(s, field, &Vars::xy()).unwrap()
    }

    #[test]
    fn gcd_of_difference_of_squares() {
        let q = Field::Rational;
        assert_eq!(gcd_bivariate(&p(q, "x^2 - y^2"), &p(q, "x - y")), p(q, "x - y"));
        assert_eq!(gcd_bivariate(&p(q, "x"), &p(q, "y")), p(q, "1"));
        assert_eq!(gcd_bivariate(&p(q, "2*x*y + 4*y"), &p(q, "0")), p(q, "x*y + 2*y"));
        assert_eq!(gcd_bivariate(&p(q, "3*y^2 - 3"), &p(q, "y + 1")), p(q, "y + 1"));
    }

    #[test]
    fn gcd_with_content_in_y() {
        let q = Field::Rational;
        let f = p(q, "(y^2 - 1)*(x + y)*(x - 2)");
        let g = p(q, "(y - 1)*(x + y)*(x + 3)");
        assert_eq!(gcd_bivariate(&f, &g), p(q, "(y - 1)*(x + y)"));
    }

    #[test]
    fn resultant_matches_sylvester_by_hand() {
        let q = Field::Rational;
        // Res_x(x - y, x + y) = det [[1, -y], [1, y]] = 2y
        let r = resultant_x(&p(q, "x - y"), &p(q, "x + y"));
        assert_eq!(r.to_mpoly(&Vars::xy(), 1), p(q, "2*y"));
        // Res_x(x^2 - y, x - 1) = 1 - y
        let r = resultant_x(&p(q, "x^2 - y"), &p(q, "x - 1"));
        assert_eq!(r.to_mpoly(&Vars::xy(), 1), p(q, "1 - y"));
        // common factor gives zero
        assert!(resultant_x(&p(q, "x*y - 1"), &p(q, "(x*y - 1)*(x + 1)")).is_zero());
    }

    /// Resultant oracle: product of g over the roots of a monic f that
    /// splits with explicit roots r_i(y): Res(f, g) = prod g(r_i).
    #[test]
    fn resultant_against_root_product() {
        let q = Field::Rational;
        // f = (x - y)(x - 2y - 1), g = x^2 + x*y + 3
        let f = p(q, "(x - y)*(x - 2*y - 1)");
        let g = p(q, "x^2 + x*y + 3");
        let r1 = p(q, "y");
        let r2 = p(q, "2*y + 1");
        let y = p(q, "y");
        let g1 = g.substitute(&[r1, y.clone()]).unwrap();
        let g2 = g.substitute(&[r2, y]).unwrap();
        let expected = &g1 * &g2;
        let res = resultant_x(&f, &g).to_mpoly(&Vars::xy(), 1);
        assert_eq!(res, expected);
    }

    #[test]
    fn square_free_parts() {
        let q = Field::Rational;
        assert_eq!(square_free_part(&p(q, "(y - 1)^2*(x + y)")), p(q, "(y - 1)*(x + y)"));
        assert_eq!(square_free_part(&p(q, "y^2 - 1")), p(q, "y^2 - 1"));
    }

    fn small_factor(field: Field) -> impl Strategy<Value = MPoly> {
        (0i64..3, 0i64..3, -3i64..4, -3i64..4, -3i64..4).prop_map(move |(a, b, c, d, e)| {
            let terms = vec![
                (vec![1, 0], field.from_i64(a)),
                (vec![0, 1], field.from_i64(b)),
                (vec![0, 0], field.from_i64(c)),
                (vec![1, 1], field.from_i64(d)),
                (vec![0, 2], field.from_i64(e)),
            ];
            MPoly::from_terms(field, &Vars::xy(), terms)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn gcd_scales_with_common_factor(
            f in small_factor(Field::Rational),
            g in small_factor(Field::Rational),
            h in small_factor(Field::Rational),
        ) {
            prop_assume!(!h.is_zero());
            let lhs = gcd_bivariate(&(&f * &h), &(&g * &h));
            let rhs = (&h * &gcd_bivariate(&f, &g)).monic();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn gcd_scales_with_common_factor_mod_p(
            f in small_factor(Field::Prime(101)),
            g in small_factor(Field::Prime(101)),
            h in small_factor(Field::Prime(101)),
        ) {
            prop_assume!(!h.is_zero());
            let lhs = gcd_bivariate(&(&f * &h), &(&g * &h));
            let rhs = (&h * &gcd_bivariate(&f, &g)).monic();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
