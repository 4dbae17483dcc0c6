//! Jung–van der Kulk decomposition by degree reduction from the left.
//!
//! While the map has degree above one, make `deg gx >= deg gy` (composing
//! with the swap on the left if needed), match the leading form of `gx`
//! against a power of the leading form of `gy`, and cancel it with an
//! elementary map. Success writes the input as a product of affine and
//! elementary letters, so it also decides invertibility.

use crate::error::{AutError, NotAutReason};
use crate::poly::MPoly;
use crate::plane::PlaneMap;
use crate::scalar::Field;
use crate::word::{AltWord, Letter};

/// Canonical alternating word whose product is `f`.
pub fn decompose(f: &PlaneMap) -> Result<AltWord, AutError> {
    let field = f.field();
    let Some(start_degree) = f.degree() else {
        return Err(AutError::DegenerateInput);
    };
    let budget = 10 * start_degree.max(1) as usize;
    let xy = f.gx().vars().clone();
    let x = MPoly::var(field, &xy, 0);
    let y = MPoly::var(field, &xy, 1);

    let mut letters: Vec<Letter> = Vec::new();
    let mut gx = f.gx().clone();
    let mut gy = f.gy().clone();
    // gy^k for k = 0, 1, ...; reset whenever gy changes
    let mut powers: Vec<MPoly> = Vec::new();

    for _ in 0..budget {
        if gx.is_zero() && gy.is_zero() {
            return Err(AutError::DegenerateInput);
        }
        if gx.is_constant() || gy.is_constant() {
            return Err(AutError::NotAnAutomorphism(NotAutReason::ConstantComponent));
        }
        let mut dx = gx.total_degree().unwrap();
        let mut dy = gy.total_degree().unwrap();
        if dx.max(dy) <= 1 {
            let last = PlaneMap::from_parts(gx, gy);
            if last.as_affine().is_none() {
                return Err(AutError::NotAnAutomorphism(NotAutReason::SingularAffine));
            }
            letters.push(Letter::from_map(last).expect("affine"));
            return Ok(AltWord::reduce(field, letters));
        }
        if dx < dy {
            std::mem::swap(&mut gx, &mut gy);
            std::mem::swap(&mut dx, &mut dy);
            powers.clear();
            letters.push(Letter::from_map(PlaneMap::swap(field)).unwrap());
        }
        if !dx.is_multiple_of(dy) {
            return Err(AutError::NotAnAutomorphism(NotAutReason::DegreeNotDivisible { dx, dy }));
        }
        let k = (dx / dy) as usize;
        if powers.is_empty() {
            powers.push(MPoly::one(field, &xy));
        }
        while powers.len() <= k {
            let next = powers.last().unwrap() * &gy;
            powers.push(next);
        }
        let lx = gx.leading_form();
        let lyk = powers[k].leading_form();
        // compare one extreme monomial, then the whole form
        let (e, cy) = lyk.leading_term().expect("nonzero power");
        let c = &lx.coeff(e) * &cy.inv().unwrap();
        if c.is_zero() || lx != lyk.scale(&c) {
            return Err(AutError::NotAnAutomorphism(
                NotAutReason::LeadingFormsNotProportional { dx, dy },
            ));
        }
        gx = &gx - &powers[k].scale(&c);
        let e = &x + &y.pow(k as u32).scale(&c);
        letters.push(Letter::from_map(PlaneMap::from_parts(e, y.clone())).unwrap());
    }
    Err(AutError::Internal(format!(
        "degree reduction exceeded its budget of {budget} steps"
    )))
}

/// Over `Q` a Jacobian that is not a nonzero constant rules the map out
/// immediately. Over `F_p` only the decomposition decides.
pub fn is_automorphism(f: &PlaneMap) -> bool {
    if f.field() == Field::Rational {
        let j = f.jacobian_det();
        if j.is_zero() || !j.is_constant() {
            return false;
        }
    }
    decompose(f).is_ok()
}

/// Compositional inverse, from the reversed word of letter inverses.
pub fn invert(f: &PlaneMap) -> Result<PlaneMap, AutError> {
    Ok(decompose(f)?.inverse().multiply_out())
}
