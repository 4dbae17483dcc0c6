//! Dense univariate polynomials, used as the coefficient ring `K[y]` for
//! bivariate gcds and resultants and for root finding.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{MPoly, Vars};
use crate::scalar::{Field, Scalar};

/// Coefficients in ascending degree order, with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct UPoly {
    field: Field,
    coeffs: Vec<Scalar>,
}

impl UPoly {
    pub fn new(field: Field, mut coeffs: Vec<Scalar>) -> UPoly {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        UPoly { field, coeffs }
    }

    pub fn zero(field: Field) -> UPoly {
        UPoly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: Scalar) -> UPoly {
        UPoly::new(c.field(), vec![c])
    }

    pub fn one(field: Field) -> UPoly {
        UPoly::constant(field.one())
    }

    /// The monic linear polynomial `t - root`.
    pub fn linear_root(root: &Scalar) -> UPoly {
        UPoly::new(root.field(), vec![-root, root.field().one()])
    }

    pub fn identity(field: Field) -> UPoly {
        UPoly::new(field, vec![field.zero(), field.one()])
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> Scalar {
        self.coeffs.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn eval(&self, t: &Scalar) -> Scalar {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * t) + c;
        }
        acc
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::new(self.field, (0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::new(self.field, (0..n).map(|i| &self.coeff(i) - &other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        UPoly::new(self.field, out)
    }

    pub fn scale(&self, c: &Scalar) -> UPoly {
        UPoly::new(self.field, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: u32) -> UPoly {
        let mut acc = UPoly::one(self.field);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = d.lc().inv().expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![self.field.zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let top = rem.len() - 1;
            let c = &rem[top] * &inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    let k = top - dd + j;
                    rem[k] = &rem[k] - &(&c * dc);
                }
            }
            quot[top - dd] = c;
            rem.pop();
        }
        (UPoly::new(self.field, quot), UPoly::new(self.field, rem))
    }

    pub fn rem(&self, d: &UPoly) -> UPoly {
        self.div_rem(d).1
    }

    /// Exact quotient; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &UPoly) -> Option<UPoly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lc().inv().expect("nonzero leading coefficient"))
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.field,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &self.field.from_i64(i as i64))
                .collect(),
        )
    }

    /// `base^exp mod m`.
    fn pow_mod(base: &UPoly, mut exp: u64, m: &UPoly) -> UPoly {
        let mut acc = UPoly::one(base.field).rem(m);
        let mut b = base.rem(m);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&b).rem(m);
            }
            b = b.mul(&b).rem(m);
            exp >>= 1;
        }
        acc
    }

    /// Distinct roots in the base field, sorted, plus whether the search was
    /// exhaustive. Over `F_p` it always is; over the rationals the
    /// rational-root candidates may be capped for huge coefficients.
    pub fn roots(&self) -> (Vec<Scalar>, bool) {
        if self.degree().unwrap_or(0) == 0 {
            return (Vec::new(), true);
        }
        match self.field {
            Field::Prime(p) => {
                let mut roots = prime_field_roots(self, p);
                roots.sort_by_key(|r| r.residue());
                (roots, true)
            }
            Field::Rational => rational_roots(self),
        }
    }

    /// Lifts to a polynomial of the ambient `vars` in the variable at `index`.
    pub fn to_mpoly(&self, vars: &Vars, index: usize) -> MPoly {
        let terms = self.coeffs.iter().enumerate().map(|(i, c)| {
            let mut e = vec![0; vars.len()];
            e[index] = i as u32;
            (e, c.clone())
        });
        MPoly::from_terms(self.field, vars, terms)
    }

    /// Reads a polynomial that only involves the variable at `index`.
    pub fn from_mpoly(p: &MPoly, index: usize) -> Option<UPoly> {
        let deg = p.degree_in(index).unwrap_or(0) as usize;
        let mut coeffs = vec![p.field().zero(); deg + 1];
        for (e, c) in p.terms() {
            if e.iter().enumerate().any(|(i, &d)| i != index && d > 0) {
                return None;
            }
            coeffs[e[index] as usize] = c.clone();
        }
        Some(UPoly::new(p.field(), coeffs))
    }
}

fn prime_field_roots(f: &UPoly, p: u64) -> Vec<Scalar> {
    let field = f.field;
    if p <= 64 {
        return field.elements().filter(|t| f.eval(t).is_zero()).collect();
    }
    // product of the distinct linear factors: gcd(f, t^p - t)
    let t = UPoly::identity(field);
    let tp = UPoly::pow_mod(&t, p, &f.monic());
    let g = f.gcd(&tp.sub(&t));
    let mut out = Vec::new();
    split_linear(&g, p, &mut out);
    out
}

/// Splits a product of distinct monic linear factors (Cantor-Zassenhaus with
/// a deterministic shift sequence).
fn split_linear(g: &UPoly, p: u64, out: &mut Vec<Scalar>) {
    match g.degree() {
        None | Some(0) => return,
        Some(1) => {
            let g = g.monic();
            out.push(-&g.coeff(0));
            return;
        }
        _ => {}
    }
    let field = g.field;
    for shift in 0..p {
        let base = UPoly::new(field, vec![field.from_i64(shift as i64), field.one()]);
        let h = UPoly::pow_mod(&base, (p - 1) / 2, g).sub(&UPoly::one(field));
        let d = g.gcd(&h);
        let dd = d.degree().unwrap_or(0);
        if dd > 0 && dd < g.degree().unwrap() {
            let rest = g.div_exact(&d).expect("gcd divides");
            split_linear(&d, p, out);
            split_linear(&rest, p, out);
            return;
        }
    }
    unreachable!("equal-degree splitting always finds a separating shift");
}

/// Bound on trial division when enumerating divisors for rational roots.
const TRIAL_LIMIT: u64 = 1_000_000;
/// Bound on the number of candidate roots tested.
const CANDIDATE_LIMIT: usize = 200_000;

/// Prime factorization by trial division; `None` when a cofactor cannot be
/// certified prime within the trial bound.
fn factor_small(n: &BigInt) -> Option<Vec<(BigInt, u32)>> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut d: u64 = 2;
    while d <= TRIAL_LIMIT {
        let bd = BigInt::from(d);
        if &bd * &bd > n {
            break;
        }
        let mut k = 0;
        while (&n % &bd).is_zero() {
            n /= &bd;
            k += 1;
        }
        if k > 0 {
            out.push((bd, k));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        let lim = BigInt::from(TRIAL_LIMIT);
        if n > &lim * &lim {
            return None;
        }
        out.push((n, 1));
    }
    Some(out)
}

fn divisors(factors: &[(BigInt, u32)]) -> Vec<BigInt> {
    let mut ds = vec![BigInt::one()];
    for (p, k) in factors {
        let mut next = Vec::with_capacity(ds.len() * (*k as usize + 1));
        for d in &ds {
            let mut pk = BigInt::one();
            for _ in 0..=*k {
                next.push(d * &pk);
                pk *= p;
            }
        }
        ds = next;
    }
    ds
}

fn rational_roots(f: &UPoly) -> (Vec<Scalar>, bool) {
    // clear denominators
    let mut lcm = BigInt::one();
    for c in f.coeffs() {
        lcm = lcm.lcm(c.as_rational().expect("rational coefficient").denom());
    }
    let ints: Vec<BigInt> = f
        .coeffs()
        .iter()
        .map(|c| {
            let r = c.as_rational().unwrap();
            r.numer() * (&lcm / r.denom())
        })
        .collect();
    let low = ints.iter().position(|c| !c.is_zero()).unwrap();
    let mut roots = Vec::new();
    if low > 0 {
        roots.push(Field::Rational.zero());
    }
    let ints = &ints[low..];
    if ints.len() <= 1 {
        return (roots, true);
    }
    let a0 = &ints[0];
    let an = ints.last().unwrap();
    let (Some(f0), Some(fn_)) = (factor_small(a0), factor_small(an)) else {
        return (roots, false);
    };
    let nums = divisors(&f0);
    let dens = divisors(&fn_);
    if nums.len().saturating_mul(dens.len()) > CANDIDATE_LIMIT {
        return (roots, false);
    }
    let deg = ints.len() - 1;
    for d in &dens {
        for n in &nums {
            if n.gcd(d) != BigInt::one() {
                continue;
            }
            for sign in [Sign::Plus, Sign::Minus] {
                let num = BigInt::from_biguint(sign, n.magnitude().clone());
                // sum a_i n^i d^(deg-i) == 0
                let mut acc = BigInt::zero();
                let mut npow = BigInt::one();
                let mut dpows = vec![BigInt::one(); deg + 1];
                for i in 1..=deg {
                    dpows[i] = &dpows[i - 1] * d;
                }
                for (i, a) in ints.iter().enumerate() {
                    acc += a * &npow * &dpows[deg - i];
                    npow *= &num;
                }
                if acc.is_zero() {
                    roots.push(Field::Rational.from_ratio(&num, d).unwrap());
                }
            }
        }
    }
    roots.sort_by(|a, b| a.as_rational().cmp(&b.as_rational()));
    roots.dedup();
    (roots, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(field: Field, cs: &[i64]) -> UPoly {
        UPoly::new(field, cs.iter().map(|&c| field.from_i64(c)).collect())
    }

    #[test]
    fn division_identity() {
        let f = Field::Rational;
        let a = poly(f, &[1, 2, 3, 4]);
        let d = poly(f, &[1, 1]);
        let (q, r) = a.div_rem(&d);
        assert_eq!(q.mul(&d).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 1);
    }

    #[test]
    fn gcd_is_monic() {
        let f = Field::Rational;
        // (t-1)(t-2) and (t-1)(t+5)
        let a = poly(f, &[2, -3, 1]);
        let b = poly(f, &[-5, 4, 1]);
        assert_eq!(a.gcd(&b), poly(f, &[-1, 1]));
        assert_eq!(a.gcd(&UPoly::zero(f)), a.monic());
    }

    #[test]
    fn rational_roots_found() {
        let f = Field::Rational;
        // 6t^3 - 7t^2 + 1 = (t-1)(2t-1)(3t+1)
        let p = poly(f, &[1, 0, -7, 6]);
        let (roots, complete) = p.roots();
        assert!(complete);
        let expected: Vec<Scalar> = [(-1, 3), (1, 2), (1, 1)]
            .iter()
            .map(|&(n, d)| f.from_ratio(&BigInt::from(n), &BigInt::from(d)).unwrap())
            .collect();
        assert_eq!(roots, expected);
        // t^2 + 1 has none
        assert_eq!(poly(f, &[1, 0, 1]).roots(), (vec![], true));
        // t^3 has the root 0
        assert_eq!(poly(f, &[0, 0, 0, 1]).roots(), (vec![f.zero()], true));
    }

    #[test]
    fn prime_field_roots_match_scan() {
        for p in [2u64, 5, 11, 101, 10007] {
            let f = Field::prime(p).unwrap();
            let cases = [vec![3, 0, 1], vec![-6, 11, -6, 1], vec![1, 0, 0, 0, 1], vec![0, 1, 1]];
            for cs in cases {
                let g = poly(f, &cs);
                let (roots, complete) = g.roots();
                assert!(complete);
                if p <= 101 {
                    let scan: Vec<Scalar> = f.elements().filter(|t| g.eval(t).is_zero()).collect();
                    assert_eq!(roots, scan, "p={p} cs={cs:?}");
                } else {
                    for r in &roots {
                        assert!(g.eval(r).is_zero());
                    }
                }
            }
        }
        // (t-1)(t-2)(t-3) over F_10007 splits completely
        let f = Field::prime(10007).unwrap();
        let (roots, _) = poly(f, &[-6, 11, -6, 1]).roots();
        assert_eq!(roots.iter().map(|r| r.residue().unwrap()).collect::<Vec<_>>(), vec![1, 2, 3]);
    }
}
