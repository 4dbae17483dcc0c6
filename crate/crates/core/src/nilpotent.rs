//! Nilpotent subgroups of the elementary group: the four template groups,
//! commutators, and the conjugations that bring a nilpotent family into
//! template shape.
//!
//! A template is one of
//!
//! * `T1 = {(a x, b y)}`
//! * `T2 = {(a x, y + c)}`
//! * `T3(ℓ) = {(b^ℓ x + t y^ℓ, b y)}`
//! * `T4(n) = {(x + P(y), y + c) : deg P ≤ n}`
//!
//! Normalization looks for `κ = (x, y + y₀) ∘ (x + R(y), y)` with
//! `κ⁻¹ F κ` in a template. Conjugating `(a x + P(y), b y + c)` by
//! `(x + R(y), y)` gives `x`-part `a R(y) + P(y) − R(b y + c)`, which is
//! linear in the coefficients of `R`, so each template reduces to a linear
//! system over the base field.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AutError, NilpotentError};
use crate::family::{ElementaryShape, ParamFamily};
use crate::jung;
use crate::plane::PlaneMap;
use crate::poly::{MPoly, Vars};
use crate::scalar::{Field, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "id")]
pub enum NilTemplate {
    T1,
    T2,
    T3 { ell: u32 },
    T4 { n: u32 },
}

impl NilTemplate {
    /// The separability case of the matching normal form.
    pub fn case(&self) -> u8 {
        match self {
            NilTemplate::T1 => 1,
            NilTemplate::T2 => 2,
            NilTemplate::T3 { .. } => 3,
            NilTemplate::T4 { .. } => 4,
        }
    }
}

impl fmt::Display for NilTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NilTemplate::T1 => write!(f, "T1"),
            NilTemplate::T2 => write!(f, "T2"),
            NilTemplate::T3 { ell } => write!(f, "T3({ell})"),
            NilTemplate::T4 { n } => write!(f, "T4({n})"),
        }
    }
}

/// Composition and inversion, shared by maps and parameter families.
pub trait MapGroup: Sized {
    /// `self ∘ other`.
    fn then_apply(&self, other: &Self) -> Self;
    fn inverse(&self) -> Result<Self, AutError>;
}

impl MapGroup for PlaneMap {
    fn then_apply(&self, other: &Self) -> Self {
        self.compose(other)
    }

    fn inverse(&self) -> Result<Self, AutError> {
        jung::invert(self)
    }
}

impl MapGroup for ParamFamily {
    fn then_apply(&self, other: &Self) -> Self {
        self.compose(other)
    }

    fn inverse(&self) -> Result<Self, AutError> {
        self.elementary_inverse()
    }
}

/// `[g, h] = g⁻¹ h⁻¹ g h`.
pub fn commutator<M: MapGroup>(g: &M, h: &M) -> Result<M, AutError> {
    let gi = g.inverse()?;
    let hi = h.inverse()?;
    Ok(gi.then_apply(&hi).then_apply(g).then_apply(h))
}

/// `h^g = g⁻¹ h g`.
pub fn conjugation<M: MapGroup>(h: &M, g: &M) -> Result<M, AutError> {
    Ok(g.inverse()?.then_apply(h).then_apply(g))
}

fn shape_in_template(s: &ElementaryShape, t: NilTemplate) -> bool {
    let one = MPoly::one(s.a.field(), s.a.vars());
    match t {
        NilTemplate::T1 => s.p.is_empty() && s.c.is_zero(),
        NilTemplate::T2 => s.p.is_empty() && s.b == one,
        NilTemplate::T3 { ell } => {
            s.c.is_zero() && s.a == s.b.pow(ell) && s.p.keys().all(|&j| j == ell)
        }
        NilTemplate::T4 { n } => s.a == one && s.b == one && s.p_degree() <= n,
    }
}

/// Exact shape match; for a family every parameter value must match.
pub fn family_in_template(gx: &MPoly, gy: &MPoly, t: NilTemplate) -> bool {
    ElementaryShape::of(gx, gy).is_some_and(|s| shape_in_template(&s, t))
}

pub fn template_member(g: &PlaneMap, t: NilTemplate) -> bool {
    family_in_template(g.gx(), g.gy(), t)
}

/// Smallest template containing an elementary pair, trying `T1`, `T2`,
/// `T3(0..)`, then `T4`.
pub fn smallest_template(gx: &MPoly, gy: &MPoly) -> Option<NilTemplate> {
    let s = ElementaryShape::of(gx, gy)?;
    candidate_templates(s.p_degree())
        .into_iter()
        .find(|&t| shape_in_template(&s, t))
        .map(|t| match t {
            NilTemplate::T4 { .. } => NilTemplate::T4 { n: s.p_degree() },
            t => t,
        })
}

fn candidate_templates(n: u32) -> Vec<NilTemplate> {
    let mut out = vec![NilTemplate::T1, NilTemplate::T2];
    out.extend((0..=n).map(|ell| NilTemplate::T3 { ell }));
    out.push(NilTemplate::T4 { n });
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum AffineConjugation {
    /// `β` with `g^β ∈ S` for every generator.
    Conjugator { beta: PlaneMap },
    /// Eigenvalues lie in a quadratic extension. `triangularizable` says
    /// whether the generators share an eigenvector there.
    NeedsFieldExtension { degree: u32, triangularizable: bool },
}

/// Conjugates a group of affine maps into the triangular group `S` by a
/// common eigenvector of the linear parts.
pub fn conjugate_affine_to_s(generators: &[PlaneMap]) -> Result<AffineConjugation, NilpotentError> {
    let Some(first) = generators.first() else {
        return Err(NilpotentError::Family("no generators".into()));
    };
    let field = first.field();
    let mut linear = Vec::with_capacity(generators.len());
    for (index, g) in generators.iter().enumerate() {
        if g.field() != field {
            return Err(NilpotentError::NotAffine { index });
        }
        linear.push(g.as_affine().ok_or(NilpotentError::NotAffine { index })?.m);
    }
    if generators.iter().all(PlaneMap::is_in_s) {
        return Ok(AffineConjugation::Conjugator {
            beta: PlaneMap::identity(field),
        });
    }
    let is_scalar = |m: &[[Scalar; 2]; 2]| m[0][1].is_zero() && m[1][0].is_zero() && m[0][0] == m[1][1];
    let Some(m) = linear.iter().find(|m| !is_scalar(m)) else {
        // scalar linear parts are already triangular
        return Ok(AffineConjugation::Conjugator {
            beta: PlaneMap::identity(field),
        });
    };
    let eigen = eigenvalues(m);
    if eigen.is_empty() {
        let commutes = linear.iter().all(|n| mat_mul(m, n) == mat_mul(n, m));
        if commutes {
            return Ok(AffineConjugation::NeedsFieldExtension {
                degree: 2,
                triangularizable: true,
            });
        }
        return Err(NilpotentError::NotNilpotentOrNotTriangularizable);
    }
    for lambda in eigen {
        let v = eigenvector(m, &lambda);
        let shared = linear.iter().all(|n| {
            let nv = [
                &(&n[0][0] * &v[0]) + &(&n[0][1] * &v[1]),
                &(&n[1][0] * &v[0]) + &(&n[1][1] * &v[1]),
            ];
            (&(&nv[0] * &v[1]) - &(&nv[1] * &v[0])).is_zero()
        });
        if !shared {
            continue;
        }
        // first column v: the common eigenline becomes the x-direction,
        // which every element of S preserves
        let (zero, one) = (field.zero(), field.one());
        let cols = if !v[0].is_zero() {
            [[v[0].clone(), zero], [v[1].clone(), one]]
        } else {
            [[zero, one], [v[1].clone(), field.zero()]]
        };
        let xy = Vars::xy();
        let x = MPoly::var(field, &xy, 0);
        let y = MPoly::var(field, &xy, 1);
        let beta = PlaneMap::from_parts(
            &x.scale(&cols[0][0]) + &y.scale(&cols[0][1]),
            &x.scale(&cols[1][0]) + &y.scale(&cols[1][1]),
        );
        let beta_inv = beta.as_affine().expect("basis").inverse().to_map();
        let ok = generators
            .iter()
            .all(|g| beta_inv.compose(g).compose(&beta).is_in_s());
        if ok {
            return Ok(AffineConjugation::Conjugator { beta });
        }
    }
    Err(NilpotentError::NotNilpotentOrNotTriangularizable)
}

fn mat_mul(a: &[[Scalar; 2]; 2], b: &[[Scalar; 2]; 2]) -> [[Scalar; 2]; 2] {
    let e = |i: usize, j: usize| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// Roots of `t² − tr·t + det` in the base field.
fn eigenvalues(m: &[[Scalar; 2]; 2]) -> Vec<Scalar> {
    let field = m[0][0].field();
    let tr = &m[0][0] + &m[1][1];
    let det = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
    if field.characteristic() == 2 {
        return field
            .elements()
            .filter(|t| (&(&(t * t) - &(&tr * t)) + &det).is_zero())
            .collect();
    }
    let disc = &(&tr * &tr) - &(&det * &field.from_i64(4));
    let Some(r) = disc.sqrt() else {
        return Vec::new();
    };
    let half = field.from_i64(2).inv().unwrap();
    let mut out = vec![&(&tr + &r) * &half];
    if !r.is_zero() {
        out.push(&(&tr - &r) * &half);
    }
    out
}

/// A nonzero kernel vector of `m − λ` for non-scalar `m`.
fn eigenvector(m: &[[Scalar; 2]; 2], lambda: &Scalar) -> [Scalar; 2] {
    let v = [m[0][1].clone(), lambda - &m[0][0]];
    if !v[0].is_zero() || !v[1].is_zero() {
        return v;
    }
    [lambda - &m[1][1], m[1][0].clone()]
}

#[derive(Clone, Debug)]
pub struct NormalizeOptions {
    /// Parameter points checked besides the symbolic verification.
    pub samples: usize,
    pub seed: u64,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions { samples: 6, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum NormalForm {
    /// `pre ∘ F ∘ post` lies in `template` for every parameter value.
    Found {
        template: NilTemplate,
        pre: PlaneMap,
        post: PlaneMap,
    },
    Unknown,
}

const SAMPLE_RETRIES: usize = 32;

/// Deterministic parameter points for a family; over `Q` small integers,
/// over `F_p` uniform residues.
pub(crate) fn sample_point(rng: &mut ChaCha8Rng, field: Field, m: usize) -> Vec<Scalar> {
    (0..m)
        .map(|_| match field {
            Field::Rational => field.from_i64(rng.gen_range(-1000..=1000)),
            Field::Prime(p) => field.from_i64(rng.gen_range(0..p) as i64),
        })
        .collect()
}

/// Draws sample specializations of an `E_n`-valued family, resampling
/// degenerate points.
fn checked_samples(
    family: &ParamFamily,
    n: u32,
    opts: &NormalizeOptions,
) -> Result<Vec<PlaneMap>, NilpotentError> {
    let field = family.field();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let generic_b = ElementaryShape::of(family.gx(), family.gy()).map(|s| s.b);
    let mut out = Vec::with_capacity(opts.samples);
    for index in 0..opts.samples {
        let mut accepted = None;
        for _ in 0..SAMPLE_RETRIES {
            let point = sample_point(&mut rng, field, family.num_params());
            let f = family.specialize(&point);
            let gy_ok = f.gy().terms().all(|(e, _)| e[0] == 0 && e[1] <= 1);
            let gx_ok = f.gx().terms().all(|(e, _)| e == &[1, 0] || e[0] == 0);
            if !gx_ok || !gy_ok {
                return Err(NilpotentError::SampleNotInEn { index, degree: n });
            }
            if f.gx().degree_in(1).unwrap_or(0) > n {
                return Err(NilpotentError::SampleNotInEn { index, degree: n });
            }
            let Some(e) = f.as_elementary() else {
                continue;
            };
            // b must not be a root of unity of small order unless it is
            // constant in the family
            if let Some(b) = &generic_b {
                if !b.is_constant() && (1..=n + 1).any(|m| e.b.pow(m).is_one()) {
                    continue;
                }
            }
            accepted = Some(f);
            break;
        }
        out.push(accepted.ok_or(NilpotentError::SampleNotAutomorphism { index })?);
    }
    Ok(out)
}

/// Conjugates an `E_n`-valued family into a template.
pub fn normalize_nilpotent_family(
    family: &ParamFamily,
    n: u32,
    opts: &NormalizeOptions,
) -> Result<NormalForm, NilpotentError> {
    let samples = checked_samples(family, n, opts)?;
    let Some(shape) = ElementaryShape::of(family.gx(), family.gy()) else {
        return Ok(NormalForm::Unknown);
    };
    if shape.p_degree() > n {
        return Ok(NormalForm::Unknown);
    }
    let Some((template, kappa)) = solve_template(&[shape], family.field(), n) else {
        return Ok(NormalForm::Unknown);
    };
    let pre = jung::invert(&kappa)?;
    let post = kappa;
    let conj = family.pre(&pre).post(&post);
    if !family_in_template(conj.gx(), conj.gy(), template) {
        return Ok(NormalForm::Unknown);
    }
    for s in &samples {
        if !template_member(&pre.compose(s).compose(&post), template) {
            return Ok(NormalForm::Unknown);
        }
    }
    Ok(NormalForm::Found { template, pre, post })
}

/// Finds `κ ∈ E_n` and the smallest template with `κ⁻¹ e κ` in it for
/// every shape. All shapes share an ambient `[x, y, params...]`; their
/// coefficients live over the parameters.
pub(crate) fn solve_template(
    shapes: &[ElementaryShape],
    field: Field,
    n: u32,
) -> Option<(NilTemplate, PlaneMap)> {
    let first = shapes.first()?;
    let pvars = first.a.vars().clone();
    let one = MPoly::one(field, &pvars);
    let all_unipotent = shapes.iter().all(|s| s.a == one && s.b == one);
    let translation = common_fixed_height(shapes, &one);
    for t in candidate_templates(n) {
        let kappa_y = match t {
            NilTemplate::T1 | NilTemplate::T3 { .. } => match &translation {
                Some(y0) => y0.clone(),
                None => continue,
            },
            NilTemplate::T2 => {
                if shapes.iter().any(|s| s.b != one) {
                    continue;
                }
                field.zero()
            }
            NilTemplate::T4 { .. } => {
                if !all_unipotent {
                    continue;
                }
                let deg = shapes.iter().map(ElementaryShape::p_degree).max().unwrap_or(0);
                return Some((NilTemplate::T4 { n: deg }, PlaneMap::identity(field)));
            }
        };
        if let NilTemplate::T3 { ell } = t {
            if shapes.iter().any(|s| s.a != s.b.pow(ell)) {
                continue;
            }
        }
        let shifted: Vec<ElementaryShape> = shapes.iter().map(|s| shift_y(s, &kappa_y)).collect();
        let allowed = match t {
            NilTemplate::T3 { ell } => Some(ell),
            _ => None,
        };
        let Some(r) = solve_r(&shifted, field, n, allowed) else {
            continue;
        };
        let xy = Vars::xy();
        let x = MPoly::var(field, &xy, 0);
        let y = MPoly::var(field, &xy, 1);
        let r_poly = r
            .iter()
            .enumerate()
            .fold(MPoly::zero(field, &xy), |acc, (i, c)| &acc + &y.pow(i as u32).scale(c));
        let ky = PlaneMap::from_parts(x.clone(), &y + &MPoly::constant(&xy, kappa_y));
        let xi = PlaneMap::from_parts(&x + &r_poly, y);
        return Some((t, ky.compose(&xi)));
    }
    None
}

/// `y₀` in the base field with `c = y₀ (1 − b)` for every shape, when one
/// exists.
fn common_fixed_height(shapes: &[ElementaryShape], one: &MPoly) -> Option<Scalar> {
    let field = one.field();
    let mut y0: Option<Scalar> = None;
    for s in shapes {
        let denom = one - &s.b;
        if denom.is_zero() {
            if !s.c.is_zero() {
                return None;
            }
            continue;
        }
        let q = s.c.div_exact(&denom)?;
        if !q.is_constant() {
            return None;
        }
        let v = q.constant_term();
        match &y0 {
            Some(prev) if *prev != v => return None,
            _ => y0 = Some(v),
        }
    }
    Some(y0.unwrap_or_else(|| field.zero()))
}

/// Conjugation by `(x, y + y₀)`.
fn shift_y(s: &ElementaryShape, y0: &Scalar) -> ElementaryShape {
    if y0.is_zero() {
        return s.clone();
    }
    let pvars = s.a.vars();
    let field = s.a.field();
    let y0p = MPoly::constant(pvars, y0.clone());
    // P(y + y₀) as polynomials in the parameters
    let mut p = std::collections::BTreeMap::new();
    for (&j, cj) in &s.p {
        for i in 0..=j {
            let binom = binomial(field, j, i);
            let term = &cj.scale(&binom) * &y0p.pow(j - i);
            let entry = p.entry(i).or_insert_with(|| MPoly::zero(field, pvars));
            *entry = &*entry + &term;
        }
    }
    p.retain(|_, c: &mut MPoly| !c.is_zero());
    ElementaryShape {
        a: s.a.clone(),
        p,
        b: s.b.clone(),
        c: &(&s.c + &(&s.b * &y0p)) - &y0p,
    }
}

fn binomial(field: Field, n: u32, k: u32) -> Scalar {
    let mut acc = field.one();
    for i in 0..k {
        acc = &acc * &field.from_i64((n - i) as i64);
        acc = &acc * &field.from_i64((i + 1) as i64).inv().expect("small factorial");
    }
    acc
}

/// Coefficients `r_0..r_n` of `R` making `a R(y) + P(y) − R(b y + c)`
/// vanish outside `y^allowed`, for every shape at once.
fn solve_r(shapes: &[ElementaryShape], field: Field, n: u32, allowed: Option<u32>) -> Option<Vec<Scalar>> {
    let pvars = shapes[0].a.vars().clone();
    // ambient [y, params...]
    let mut names = vec!["y".to_string()];
    names.extend(pvars.names().iter().cloned());
    let yp = Vars::new(names);
    let y = MPoly::var(field, &yp, 0);
    let lift = |p: &MPoly| p.embed(&yp).expect("parameter ambient");
    let cols = n as usize + 1;
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for s in shapes {
        let a = lift(&s.a);
        let lin = &(&y * &lift(&s.b)) + &lift(&s.c);
        let mut p_total = MPoly::zero(field, &yp);
        for (&j, cj) in &s.p {
            p_total = &p_total + &(&lift(cj) * &y.pow(j));
        }
        let mut contributions = Vec::with_capacity(cols);
        let mut lin_pow = MPoly::one(field, &yp);
        for i in 0..cols {
            contributions.push(&(&a * &y.pow(i as u32)) - &lin_pow);
            lin_pow = &lin_pow * &lin;
        }
        let mut monomials: BTreeSet<Vec<u32>> = p_total.terms().map(|(e, _)| e.clone()).collect();
        for c in &contributions {
            monomials.extend(c.terms().map(|(e, _)| e.clone()));
        }
        for mono in monomials {
            if Some(mono[0]) == allowed {
                continue;
            }
            let mut row: Vec<Scalar> = contributions.iter().map(|c| c.coeff(&mono)).collect();
            row.push(-p_total.coeff(&mono));
            rows.push(row);
        }
    }
    solve_linear(field, rows, cols)
}

/// Gauss–Jordan elimination on an augmented matrix; free unknowns are set
/// to zero.
fn solve_linear(field: Field, mut rows: Vec<Vec<Scalar>>, cols: usize) -> Option<Vec<Scalar>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = rows[r][col].inv().unwrap();
        for v in rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in col..=cols {
                    let d = &f * &rows[r][j];
                    rows[i][j] = &rows[i][j] - &d;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut out = vec![field.zero(); cols];
    for (i, &col) in pivots.iter().enumerate() {
        out[col] = rows[i][cols].clone();
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(text: &str) -> PlaneMap {
        PlaneMap::parse(text, Field::Rational).unwrap()
    }

    fn fam(text: &str, params: &[&str]) -> ParamFamily {
        ParamFamily::parse(text, Field::Rational, params).unwrap()
    }

    #[test]
    fn commutator_convention() {
        let phi = q("(2*x + y, y)");
        let psi = q("(3*x + y^2, y)");
        assert_eq!(commutator(&phi, &psi).unwrap(), q("(x + 1/6*y^2 - 1/3*y, y)"));
        let phi = q("(x + y^2, y)");
        let psi = q("(2*x + 7*y, 2*y)");
        assert_eq!(commutator(&phi, &psi).unwrap(), q("(x + y^2, y)"));
        assert!(commutator(&phi, &phi).unwrap().is_identity());
    }

    #[test]
    fn conjugations() {
        let psi = q("(3*x, y)");
        let phi = q("(2*x + y^3, 5*y + 1)");
        assert_eq!(conjugation(&psi, &phi).unwrap(), q("(3*x + y^3, y)"));
        assert_eq!(conjugation(&psi, &PlaneMap::identity(Field::Rational)).unwrap(), psi);
        let e = q("(x + y^2, y)");
        assert_eq!(conjugation(&e, &q("(y, x)")).unwrap(), q("(x, y + x^2)"));
    }

    #[test]
    fn membership() {
        assert!(template_member(&q("(3*x, 5*y)"), NilTemplate::T1));
        assert!(template_member(&q("(8*x + 2*y^3, 2*y)"), NilTemplate::T3 { ell: 3 }));
        assert!(!template_member(&q("(4*x + 2*y^3, 2*y)"), NilTemplate::T3 { ell: 3 }));
        let g = q("(x + y^2, y + 1)");
        assert!(template_member(&g, NilTemplate::T4 { n: 2 }));
        assert!(!template_member(&g, NilTemplate::T4 { n: 1 }));
        assert!(!template_member(&g, NilTemplate::T1));
        assert!(template_member(&q("(x + 4, 3*y)"), NilTemplate::T3 { ell: 0 }));
        assert!(!template_member(&q("(y, x)"), NilTemplate::T1));
    }

    #[test]
    fn affine_to_s() {
        let shear = q("(x, y + x)");
        let Ok(AffineConjugation::Conjugator { beta }) = conjugate_affine_to_s(&[shear.clone()]) else {
            panic!("expected a conjugator");
        };
        assert_eq!(beta, q("(y, x)"));
        assert!(conjugation(&shear, &beta).unwrap().is_in_s());

        let s = q("(2*x + y, 3*y + 1)");
        assert_eq!(
            conjugate_affine_to_s(&[s]).unwrap(),
            AffineConjugation::Conjugator { beta: PlaneMap::identity(Field::Rational) }
        );

        let rot = q("(-y, x)");
        assert_eq!(
            conjugate_affine_to_s(&[rot]).unwrap(),
            AffineConjugation::NeedsFieldExtension { degree: 2, triangularizable: true }
        );
        let rot5 = PlaneMap::parse("(-y, x)", Field::Prime(5)).unwrap();
        let Ok(AffineConjugation::Conjugator { beta }) = conjugate_affine_to_s(&[rot5.clone()]) else {
            panic!("expected a conjugator over F_5");
        };
        assert!(conjugation(&rot5, &beta).unwrap().is_in_s());

        // no common eigenvector
        let both = [q("(x, y + x)"), q("(x + y, y)")];
        assert_eq!(
            conjugate_affine_to_s(&both),
            Err(NilpotentError::NotNilpotentOrNotTriangularizable)
        );
        assert!(matches!(
            conjugate_affine_to_s(&[q("(x + y^2, y)")]),
            Err(NilpotentError::NotAffine { index: 0 })
        ));
    }

    #[test]
    fn rational_eigenvalues() {
        let g = q("(2*x + y, 3*y)");
        let h = q("(x + 2*y + 1, 2*x + y)");
        for m in [g, h] {
            if let Ok(AffineConjugation::Conjugator { beta }) = conjugate_affine_to_s(&[m.clone()]) {
                assert!(conjugation(&m, &beta).unwrap().is_in_s());
            } else {
                panic!("expected a conjugator for {m}");
            }
        }
    }

    #[test]
    fn normalize_known_families() {
        let opts = NormalizeOptions::default();
        let f = fam("(b^3*x + a*y^3, b*y)", &["a", "b"]);
        assert_eq!(
            normalize_nilpotent_family(&f, 3, &opts).unwrap(),
            NormalForm::Found {
                template: NilTemplate::T3 { ell: 3 },
                pre: PlaneMap::identity(Field::Rational),
                post: PlaneMap::identity(Field::Rational),
            }
        );
        let f = fam("(b^3*x + c*y^3 + (b^3 - b^2)*y^2, b*y)", &["b", "c"]);
        assert_eq!(
            normalize_nilpotent_family(&f, 3, &opts).unwrap(),
            NormalForm::Found {
                template: NilTemplate::T3 { ell: 3 },
                pre: q("(x + y^2, y)"),
                post: q("(x - y^2, y)"),
            }
        );
        let f = fam("(x + a, y + b)", &["a", "b"]);
        assert_eq!(
            normalize_nilpotent_family(&f, 0, &opts).unwrap(),
            NormalForm::Found {
                template: NilTemplate::T4 { n: 0 },
                pre: PlaneMap::identity(Field::Rational),
                post: PlaneMap::identity(Field::Rational),
            }
        );
    }

    #[test]
    fn normalize_with_translation() {
        // (t x, 2 y - 1) fixes the line y = 1
        let f = fam("(t*x + (t - 4)*(y - 1)^2, 2*y - 1)", &["t"]);
        let NormalForm::Found { template, pre, post } =
            normalize_nilpotent_family(&f, 2, &NormalizeOptions::default()).unwrap()
        else {
            panic!("expected a normal form");
        };
        assert_eq!(template, NilTemplate::T1);
        let g = f.pre(&pre).post(&post);
        assert!(family_in_template(g.gx(), g.gy(), NilTemplate::T1));
    }

    #[test]
    fn normalize_errors() {
        let opts = NormalizeOptions::default();
        assert!(matches!(
            normalize_nilpotent_family(&fam("(y, x + t)", &["t"]), 2, &opts),
            Err(NilpotentError::SampleNotInEn { index: 0, .. })
        ));
        assert!(matches!(
            normalize_nilpotent_family(&fam("(x + t*y^3, y)", &["t"]), 2, &opts),
            Err(NilpotentError::SampleNotInEn { .. })
        ));
        assert!(matches!(
            normalize_nilpotent_family(&fam("(0*x + t, y)", &["t"]), 2, &opts),
            Err(NilpotentError::SampleNotAutomorphism { index: 0 })
        ));
        // a non-abelian family has no template
        assert_eq!(
            normalize_nilpotent_family(&fam("(t*x + y^2, y)", &["t"]), 2, &opts).unwrap(),
            NormalForm::Unknown
        );
    }

    #[test]
    fn linear_solver() {
        let f = Field::Rational;
        let rows = vec![
            vec![f.from_i64(1), f.from_i64(1), f.from_i64(3)],
            vec![f.from_i64(1), f.from_i64(-1), f.from_i64(1)],
        ];
        assert_eq!(solve_linear(f, rows, 2), Some(vec![f.from_i64(2), f.from_i64(1)]));
        let rows = vec![
            vec![f.from_i64(1), f.from_i64(1), f.from_i64(3)],
            vec![f.from_i64(2), f.from_i64(2), f.from_i64(1)],
        ];
        assert_eq!(solve_linear(f, rows, 2), None);
    }
}
