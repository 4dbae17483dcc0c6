//! Sparse multivariate polynomials over a [`Field`].
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors, so the key order is
//! lexicographic with the first ambient variable most significant. That order
//! is the canonical term order used for leading terms and monic
//! normalization. Zero coefficients are never stored; the zero polynomial is
//! the empty map.

mod gcd;
mod parse;
mod univariate;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, LazyLock};

pub use gcd::{gcd_bivariate, resultant_x, square_free_part};
pub use univariate::UPoly;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::PolyError;
use crate::scalar::{Field, Scalar};

/// An ordered list of variable names forming a polynomial's ambient ring.
#[derive(Clone, Debug, Eq)]
pub struct Vars(Arc<[String]>);

static XY: LazyLock<Vars> = LazyLock::new(|| Vars::new(["x", "y"]));

impl Vars {
    pub fn new<I, S>(names: I) -> Vars
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Vars(names.into_iter().map(Into::into).collect())
    }

    /// The plane's coordinate ring variables `[x, y]`.
    pub fn xy() -> Vars {
        XY.clone()
    }

    /// `[x, y, params...]`.
    pub fn xy_with<S: AsRef<str>>(params: &[S]) -> Vars {
        Vars::new(["x", "y"].into_iter().map(String::from).chain(params.iter().map(|p| p.as_ref().to_string())))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|v| v == name)
    }

    /// The variables from position `start` on, as their own ambient.
    pub fn tail(&self, start: usize) -> Vars {
        Vars::new(self.0[start..].iter().cloned())
    }
}

impl PartialEq for Vars {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl std::hash::Hash for Vars {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

impl fmt::Display for Vars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.join(", "))
    }
}

pub type Exponents = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MPoly {
    field: Field,
    vars: Vars,
    terms: BTreeMap<Exponents, Scalar>,
}

fn add_exps(a: &[u32], b: &[u32]) -> Exponents {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_add(*y).expect("exponent overflow"))
        .collect()
}

impl MPoly {
    pub fn zero(field: Field, vars: &Vars) -> MPoly {
        MPoly {
            field,
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Vars, c: Scalar) -> MPoly {
        let field = c.field();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; vars.len()], c);
        }
        MPoly {
            field,
            vars: vars.clone(),
            terms,
        }
    }

    pub fn from_i64(field: Field, vars: &Vars, n: i64) -> MPoly {
        MPoly::constant(vars, field.from_i64(n))
    }

    pub fn one(field: Field, vars: &Vars) -> MPoly {
        MPoly::from_i64(field, vars, 1)
    }

    /// The variable at position `index` of the ambient.
    pub fn var(field: Field, vars: &Vars, index: usize) -> MPoly {
        assert!(index < vars.len(), "variable index out of range");
        let mut e = vec![0; vars.len()];
        e[index] = 1;
        MPoly::monomial(vars, e, field.one())
    }

    pub fn var_named(field: Field, vars: &Vars, name: &str) -> Option<MPoly> {
        vars.index_of(name).map(|i| MPoly::var(field, vars, i))
    }

    pub fn monomial(vars: &Vars, exps: Exponents, coeff: Scalar) -> MPoly {
        assert_eq!(exps.len(), vars.len(), "exponent vector arity");
        let field = coeff.field();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exps, coeff);
        }
        MPoly {
            field,
            vars: vars.clone(),
            terms,
        }
    }

    /// Builds a polynomial from possibly repeated terms, summing duplicates.
    pub fn from_terms<I>(field: Field, vars: &Vars, terms: I) -> MPoly
    where
        I: IntoIterator<Item = (Exponents, Scalar)>,
    {
        let mut acc: BTreeMap<Exponents, Scalar> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector arity");
            assert_eq!(c.field(), field, "coefficient field");
            match acc.entry(e) {
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let s = o.get() + &c;
                    if s.is_zero() {
                        o.remove();
                    } else {
                        *o.get_mut() = s;
                    }
                }
                std::collections::btree_map::Entry::Vacant(v) => {
                    if !c.is_zero() {
                        v.insert(c);
                    }
                }
            }
        }
        MPoly {
            field,
            vars: vars.clone(),
            terms: acc,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &Scalar)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for the zero polynomial and for nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&d| d == 0))
    }

    pub fn coeff(&self, exps: &[u32]) -> Scalar {
        self.terms.get(exps).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&vec![0; self.vars.len()])
    }

    /// Total degree, or `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Total degree counting only the variables at `indices`.
    pub fn total_degree_in(&self, indices: &[usize]) -> Option<u32> {
        self.terms
            .keys()
            .map(|e| indices.iter().map(|&i| e[i]).sum())
            .max()
    }

    pub fn degree_in(&self, index: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[index]).max()
    }

    pub fn uses_var(&self, index: usize) -> bool {
        self.terms.keys().any(|e| e[index] > 0)
    }

    /// Sum of the terms of maximal total degree.
    pub fn leading_form(&self) -> MPoly {
        let all: Vec<usize> = (0..self.vars.len()).collect();
        self.leading_form_in(&all)
    }

    /// Sum of the terms whose degree in the variables at `indices` is maximal.
    pub fn leading_form_in(&self, indices: &[usize]) -> MPoly {
        let Some(d) = self.total_degree_in(indices) else {
            return self.clone();
        };
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| indices.iter().map(|&i| e[i]).sum::<u32>() == d)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        MPoly {
            field: self.field,
            vars: self.vars.clone(),
            terms,
        }
    }

    /// Leading term under lexicographic order (first variable highest).
    pub fn leading_term(&self) -> Option<(&Exponents, &Scalar)> {
        self.terms.last_key_value()
    }

    /// Scales so that the lexicographic leading coefficient is one.
    pub fn monic(&self) -> MPoly {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
        }
    }

    pub fn scale(&self, c: &Scalar) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.field, &self.vars);
        }
        MPoly {
            field: self.field,
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    fn compatible(&self, other: &MPoly) -> Result<(), PolyError> {
        if self.field != other.field {
            return Err(PolyError::FieldMismatch {
                left: self.field.to_string(),
                right: other.field.to_string(),
            });
        }
        if self.vars != other.vars {
            return Err(PolyError::VariableMismatch {
                left: self.vars.to_string(),
                right: other.vars.to_string(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &MPoly) -> Result<MPoly, PolyError> {
        self.compatible(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            accumulate(&mut terms, e, c);
        }
        Ok(MPoly {
            field: self.field,
            vars: self.vars.clone(),
            terms,
        })
    }

    pub fn try_sub(&self, other: &MPoly) -> Result<MPoly, PolyError> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &MPoly) -> Result<MPoly, PolyError> {
        self.compatible(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(MPoly::zero(self.field, &self.vars));
        }
        let (small, large) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        if self.field == Field::Rational {
            return Ok(mul_rational(small, large));
        }
        let mut acc: HashMap<Exponents, Scalar> =
            HashMap::with_capacity(large.terms.len() * 2);
        for (ea, ca) in &small.terms {
            for (eb, cb) in &large.terms {
                let e = add_exps(ea, eb);
                let p = ca * cb;
                match acc.entry(e) {
                    std::collections::hash_map::Entry::Occupied(mut o) => {
                        let s = o.get() + &p;
                        *o.get_mut() = s;
                    }
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(p);
                    }
                }
            }
        }
        Ok(MPoly {
            field: self.field,
            vars: self.vars.clone(),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn pow(&self, exp: u32) -> MPoly {
        let mut result = MPoly::one(self.field, &self.vars);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Simultaneous substitution: variable `i` of `self` becomes `values[i]`.
    /// All values must share one ambient, which becomes the result's ambient.
    pub fn substitute(&self, values: &[MPoly]) -> Result<MPoly, PolyError> {
        if values.len() != self.vars.len() {
            return Err(PolyError::ArityMismatch {
                expected: self.vars.len(),
                got: values.len(),
            });
        }
        let Some(first) = values.first() else {
            // no variables: self is a constant in an empty ambient
            return Ok(self.clone());
        };
        for v in values {
            first.compatible(v)?;
            if v.field != self.field {
                return Err(PolyError::FieldMismatch {
                    left: self.field.to_string(),
                    right: v.field.to_string(),
                });
            }
        }
        let target = first.vars.clone();
        let field = self.field;
        // powers[i][k] = values[i]^k, built lazily up to the needed exponent
        let mut powers: Vec<Vec<MPoly>> = vec![vec![MPoly::one(field, &target)]; values.len()];
        for (i, v) in values.iter().enumerate() {
            let need = self.degree_in(i).unwrap_or(0);
            for _ in 1..=need {
                let next = powers[i].last().unwrap() * v;
                powers[i].push(next);
            }
        }
        let mut acc: BTreeMap<Exponents, Scalar> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut term = MPoly::constant(&target, c.clone());
            for (i, &d) in e.iter().enumerate() {
                if d > 0 {
                    term = &term * &powers[i][d as usize];
                }
            }
            for (te, tc) in term.terms {
                accumulate(&mut acc, &te, &tc);
            }
        }
        Ok(MPoly {
            field,
            vars: target,
            terms: acc,
        })
    }

    /// Substitution by variable name. Variables not mentioned in the
    /// assignment map to the same-named variable of the target ambient.
    pub fn substitute_named(&self, assignment: &[(&str, MPoly)], target: &Vars) -> Result<MPoly, PolyError> {
        let mut values = Vec::with_capacity(self.vars.len());
        for name in self.vars.names() {
            if let Some((_, v)) = assignment.iter().find(|(n, _)| n == name) {
                values.push(v.clone());
            } else if let Some(v) = MPoly::var_named(self.field, target, name) {
                values.push(v);
            } else if !self.uses_var(self.vars.index_of(name).unwrap()) {
                values.push(MPoly::zero(self.field, target));
            } else {
                return Err(PolyError::VariableNotInTarget(name.clone()));
            }
        }
        if values.is_empty() {
            return self.embed(target);
        }
        self.substitute(&values)
    }

    /// Evaluates at a point given in ambient order.
    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.vars.len(), "point arity");
        let mut acc = self.field.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &d) in e.iter().enumerate() {
                if d > 0 {
                    t = &t * &point[i].pow(d);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Partial derivative with respect to the variable at `index`.
    pub fn partial(&self, index: usize) -> MPoly {
        let terms = self.terms.iter().filter(|(e, _)| e[index] > 0).map(|(e, c)| {
            let mut e2 = e.clone();
            e2[index] -= 1;
            (e2, c * &self.field.from_i64(e[index] as i64))
        });
        MPoly::from_terms(self.field, &self.vars, terms)
    }

    /// Re-expresses the polynomial in another ambient, matching variables by
    /// name. Fails if a variable that actually occurs is missing there.
    pub fn embed(&self, target: &Vars) -> Result<MPoly, PolyError> {
        if *target == self.vars {
            return Ok(self.clone());
        }
        let mut map = Vec::with_capacity(self.vars.len());
        for (i, name) in self.vars.names().iter().enumerate() {
            let j = target.index_of(name);
            if j.is_none() && self.uses_var(i) {
                return Err(PolyError::VariableNotInTarget(name.clone()));
            }
            map.push(j);
        }
        let terms = self.terms.iter().map(|(e, c)| {
            let mut e2 = vec![0; target.len()];
            for (i, &d) in e.iter().enumerate() {
                if let Some(j) = map[i] {
                    e2[j] += d;
                }
            }
            (e2, c.clone())
        });
        Ok(MPoly::from_terms(self.field, target, terms))
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &MPoly) -> Option<MPoly> {
        self.compatible(divisor).ok()?;
        let (de, dc) = divisor.leading_term()?;
        let dc_inv = dc.inv()?;
        let mut rem = self.clone();
        let mut quot = MPoly::zero(self.field, &self.vars);
        while let Some((re, rc)) = rem.leading_term() {
            if re.iter().zip(de).any(|(a, b)| a < b) {
                return None;
            }
            let e: Exponents = re.iter().zip(de).map(|(a, b)| a - b).collect();
            let t = MPoly::monomial(&self.vars, e, rc * &dc_inv);
            rem = &rem - &(&t * divisor);
            quot = &quot + &t;
        }
        Some(quot)
    }
}

/// Numerators over the least common denominator.
fn cleared(p: &MPoly) -> (Vec<(&Exponents, BigInt)>, BigInt) {
    let mut den = BigInt::one();
    for c in p.terms.values() {
        let d = c.as_rational().expect("rational coefficient").denom();
        if !d.is_one() {
            den = den.lcm(d);
        }
    }
    let nums = p
        .terms
        .iter()
        .map(|(e, c)| {
            let r = c.as_rational().unwrap();
            (e, r.numer() * (&den / r.denom()))
        })
        .collect();
    (nums, den)
}

/// Product over `Q` with integer arithmetic inside and one reduction per
/// output term.
fn mul_rational(a: &MPoly, b: &MPoly) -> MPoly {
    let (na, da) = cleared(a);
    let (nb, db) = cleared(b);
    let mut acc: HashMap<Exponents, BigInt> = HashMap::with_capacity(nb.len() * 2);
    for (ea, ca) in &na {
        for (eb, cb) in &nb {
            let prod = ca * cb;
            match acc.entry(add_exps(ea, eb)) {
                std::collections::hash_map::Entry::Occupied(mut o) => *o.get_mut() += prod,
                std::collections::hash_map::Entry::Vacant(v) => {
                    v.insert(prod);
                }
            }
        }
    }
    let den = da * db;
    MPoly {
        field: Field::Rational,
        vars: a.vars.clone(),
        terms: acc
            .into_iter()
            .filter(|(_, n)| !n.is_zero())
            .map(|(e, n)| (e, Scalar::Rational(BigRational::new(n, den.clone()))))
            .collect(),
    }
}

fn accumulate(terms: &mut BTreeMap<Exponents, Scalar>, e: &Exponents, c: &Scalar) {
    if let Some(v) = terms.get_mut(e) {
        let s = &*v + c;
        if s.is_zero() {
            terms.remove(e);
        } else {
            *v = s;
        }
    } else if !c.is_zero() {
        terms.insert(e.clone(), c.clone());
    }
}

impl<'a> Add<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn add(self, rhs: &'a MPoly) -> MPoly {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Sub<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &'a MPoly) -> MPoly {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Mul<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &'a MPoly) -> MPoly {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            field: self.field,
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly[{}]({})", self.field, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(text: &str) -> MPoly {
        MPoly::parse(text, Field::Rational, &Vars::xy()).unwrap()
    }

    /// Independent product oracle: expands term lists by nested loops into
    /// a plain vector and sums like terms by linear search.
    fn naive_product(a: &MPoly, b: &MPoly) -> Vec<(Exponents, Scalar)> {
        let mut out: Vec<(Exponents, Scalar)> = Vec::new();
        for (ea, ca) in a.terms() {
            for (eb, cb) in b.terms() {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let c = ca * cb;
                if let Some(slot) = out.iter_mut().find(|(k, _)| *k == e) {
                    slot.1 = &slot.1 + &c;
                } else {
                    out.push((e, c));
                }
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        out.sort_by(|x, y| x.0.cmp(&y.0));
        out
    }

    fn sorted_terms(p: &MPoly) -> Vec<(Exponents, Scalar)> {
        p.terms().map(|(e, c)| (e.clone(), c.clone())).collect()
    }

    #[test]
    fn difference_of_squares() {
        let a = q("x + y");
        let b = q("x - y");
        let prod = &a * &b;
        assert_eq!(sorted_terms(&prod), naive_product(&a, &b));
        assert_eq!(prod, q("x^2 - y^2"));
    }

    #[test]
    fn binomial_square_matches_oracle() {
        let a = q("x + y");
        let sq = q("(x+y)^2");
        assert_eq!(sorted_terms(&sq), naive_product(&a, &a));
        assert_eq!(sq.num_terms(), 3);
        assert_eq!(sq.coeff(&[1, 1]), Field::Rational.from_i64(2));
    }

    #[test]
    fn zero_is_additive_identity() {
        let f = q("x + 2*y^2 - 1/3");
        assert_eq!(&f + &MPoly::zero(Field::Rational, &Vars::xy()), f);
        assert!(q("0").is_zero());
        assert_eq!(q("0").total_degree(), None);
    }

    #[test]
    fn swap_substitution() {
        let f = q("x + y^2");
        let g = f.substitute(&[q("y"), q("x")]).unwrap();
        assert_eq!(g, q("y + x^2"));
    }

    #[test]
    fn degrees_and_leading_forms() {
        assert_eq!(q("x + y^2").total_degree(), Some(2));
        assert_eq!(q("x + y^2").leading_form(), q("y^2"));
        assert_eq!(q("x^2 + 3*x*y + y + 1").leading_form(), q("x^2 + 3*x*y"));
        assert_eq!(q("5").total_degree(), Some(0));
    }

    #[test]
    fn exact_division() {
        let f = q("x^2 - y^2");
        assert_eq!(f.div_exact(&q("x - y")), Some(q("x + y")));
        assert_eq!(f.div_exact(&q("x - 2*y")), None);
    }

    #[test]
    fn embedding_by_name() {
        let xyz = Vars::new(["x", "y", "z"]);
        let f = q("x*y + 1").embed(&xyz).unwrap();
        assert_eq!(f.vars(), &xyz);
        let back = MPoly::parse("x*y + 1", Field::Rational, &xyz).unwrap();
        assert_eq!(f, back);
        let z = MPoly::parse("z", Field::Rational, &xyz).unwrap();
        assert!(z.embed(&Vars::xy()).is_err());
    }

    #[test]
    fn mismatches_are_reported() {
        let a = q("x");
        let b = MPoly::parse("x", Field::Prime(7), &Vars::xy()).unwrap();
        assert!(matches!(a.try_add(&b), Err(PolyError::FieldMismatch { .. })));
        let c = MPoly::parse("x", Field::Rational, &Vars::new(["x", "z"])).unwrap();
        assert!(matches!(a.try_mul(&c), Err(PolyError::VariableMismatch { .. })));
        assert!(matches!(a.substitute(&[q("x")]), Err(PolyError::ArityMismatch { .. })));
    }

    #[test]
    fn partial_derivatives() {
        let f = q("x^3*y + 2*y^2");
        assert_eq!(f.partial(0), q("3*x^2*y"));
        assert_eq!(f.partial(1), q("x^3 + 4*y"));
    }
}
