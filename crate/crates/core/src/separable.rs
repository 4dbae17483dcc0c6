//! Bounded search for `g, h` putting a parameter family into one of the four
//! separable normal forms
//!
//! 1. `(t₀ x, t₁ y)`
//! 2. `(t₀ x, y + t₁)`
//! 3. `(t₁^ℓ x + t₀ y^ℓ, t₁ y)`
//! 4. `(x + s(y), y + t₁)`
//!
//! with coefficients polynomial in the parameters. These are the template
//! shapes with parameter-dependent coefficients, so a match is a template
//! match of `g ∘ F ∘ h` over the parameter ring.
//!
//! Search: fix one specialization `f₀` and pass to `D = f₀⁻¹ ∘ F`, which
//! takes values in the group the family generates. Cyclic reduction of
//! sampled values of `D` proposes conjugators `h` with `h⁻¹ D h` in a single
//! factor; elementary results go to [`normalize_nilpotent_family`], affine
//! ones are first triangularized. Every verdict is checked symbolically, so
//! `Separable` is always correct and `Unknown` claims nothing.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::NilpotentError;
use crate::family::{ElementaryShape, ParamFamily};
use crate::jung;
use crate::nilpotent::{
    conjugate_affine_to_s, family_in_template, normalize_nilpotent_family, sample_point,
    smallest_template, AffineConjugation, NilTemplate, NormalForm, NormalizeOptions,
};
use crate::plane::PlaneMap;

#[derive(Clone, Debug)]
pub struct SeparableBounds {
    /// Longest conjugator word tried.
    pub max_word: usize,
    /// Highest letter degree in a conjugator.
    pub max_deg: u32,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SeparableBounds {
    fn default() -> Self {
        SeparableBounds {
            max_word: 4,
            max_deg: 6,
            samples: 8,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Separability {
    /// `pre ∘ F ∘ post` has the shape of `case`, witnessed by `template`.
    Separable {
        pre: PlaneMap,
        post: PlaneMap,
        case: u8,
        template: NilTemplate,
    },
    Unknown,
}

const SAMPLE_RETRIES: usize = 32;

pub fn match_separable(family: &ParamFamily, bounds: &SeparableBounds) -> Result<Separability, NilpotentError> {
    let field = family.field();
    if bounds.samples < 2 {
        return Err(NilpotentError::Family("at least two samples are needed".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
    let mut samples = Vec::with_capacity(bounds.samples);
    for index in 0..bounds.samples {
        let mut found = None;
        for _ in 0..SAMPLE_RETRIES {
            let f = family.specialize(&sample_point(&mut rng, field, family.num_params()));
            if jung::is_automorphism(&f) {
                found = Some(f);
                break;
            }
        }
        samples.push(found.ok_or(NilpotentError::SampleNotAutomorphism { index })?);
    }

    let id = PlaneMap::identity(field);
    if let Some(t) = smallest_template(family.gx(), family.gy()) {
        return Ok(verified(family, id.clone(), id, t));
    }
    let nopts = NormalizeOptions {
        samples: bounds.samples,
        seed: bounds.seed,
    };
    if let Some((pre, post, t)) = try_elementary(family, &id, &id, &nopts) {
        return Ok(verified(family, pre, post, t));
    }

    let f0_inv = jung::invert(&samples[0])?;
    let diff = family.pre(&f0_inv);
    let diff_samples: Vec<PlaneMap> = samples[1..].iter().map(|f| f0_inv.compose(f)).collect();
    for h in conjugator_candidates(&diff_samples, bounds) {
        let h_inv = jung::invert(&h)?;
        let conj = diff.pre(&h_inv).post(&h);
        let pre = h_inv.compose(&f0_inv);
        if let Some((pre, post, t)) = try_elementary(&conj, &pre, &h, &nopts) {
            return Ok(verified(family, pre, post, t));
        }
        if conj.degree() == Some(1) {
            let values: Vec<PlaneMap> = diff_samples.iter().map(|d| h_inv.compose(d).compose(&h)).collect();
            let Ok(AffineConjugation::Conjugator { beta }) = conjugate_affine_to_s(&values) else {
                continue;
            };
            let beta_inv = jung::invert(&beta)?;
            let tri = conj.pre(&beta_inv).post(&beta);
            if let Some((pre, post, t)) = try_elementary(&tri, &beta_inv.compose(&pre), &h.compose(&beta), &nopts) {
                return Ok(verified(family, pre, post, t));
            }
        }
    }
    Ok(Separability::Unknown)
}

type Witness = (PlaneMap, PlaneMap, NilTemplate);

/// Normalizes `conj = pre ∘ F ∘ post` when it is elementary, folding the
/// normalizing conjugators into `pre` and `post`.
fn try_elementary(
    conj: &ParamFamily,
    pre: &PlaneMap,
    post: &PlaneMap,
    opts: &NormalizeOptions,
) -> Option<Witness> {
    let shape = ElementaryShape::of(conj.gx(), conj.gy())?;
    // sample failures of a derived family only end this branch
    match normalize_nilpotent_family(conj, shape.p_degree(), opts) {
        Ok(NormalForm::Found { template, pre: p2, post: q2 }) => {
            Some((p2.compose(pre), post.compose(&q2), template))
        }
        _ => None,
    }
}

/// Wraps a witness after checking it on the generic parameter.
fn verified(family: &ParamFamily, pre: PlaneMap, post: PlaneMap, template: NilTemplate) -> Separability {
    let g = family.pre(&pre).post(&post);
    if !family_in_template(g.gx(), g.gy(), template) {
        return Separability::Unknown;
    }
    Separability::Separable {
        pre,
        post,
        case: template.case(),
        template,
    }
}

/// The identity, then `η⁻¹` for each sampled difference that cyclic
/// reduction writes as `η⁻¹ β η` within the bounds.
fn conjugator_candidates(diffs: &[PlaneMap], bounds: &SeparableBounds) -> Vec<PlaneMap> {
    let field = diffs[0].field();
    let mut out = vec![PlaneMap::identity(field)];
    for d in diffs {
        let Ok(w) = jung::decompose(d) else {
            continue;
        };
        let Some((_, eta)) = w.conjugate_into_factor() else {
            continue;
        };
        if eta.len() > bounds.max_word {
            continue;
        }
        if eta.letters().iter().any(|l| l.map().degree().unwrap_or(0) > bounds.max_deg) {
            continue;
        }
        let h = eta.inverse().multiply_out();
        if !out.contains(&h) {
            out.push(h);
        }
    }
    out
}
