//! Largest part of a finite set of automorphisms inside one coset
//! `f · N · g` of a template group.
//!
//! For a base map `f_i` the differences `d_j = f_i⁻¹ f_j` are conjugated by
//! candidates `h` (the identity and the conjugators cyclic reduction finds
//! for the first few differences). Elementary conjugates go to the template
//! solver, first all together, then in pairs; affine ones are triangularized
//! first. A solution `κ` for template `N` gives the coset with
//! `f = f_i h κ` and `g = κ⁻¹ h⁻¹`, and membership of every counted map is
//! checked exactly.

use serde::Serialize;

use crate::error::LabError;
use crate::family::ElementaryShape;
use crate::jung;
use crate::nilpotent::{conjugate_affine_to_s, solve_template, template_member, AffineConjugation, NilTemplate};
use crate::plane::PlaneMap;

#[derive(Clone, Debug)]
pub struct EpsBounds {
    /// Maps tried as the base `f_i`.
    pub bases: usize,
    /// Differences used to propose conjugators.
    pub probes: usize,
    pub max_word: usize,
    pub max_deg: u32,
    /// Elementary conjugates tried in pairs when the whole set has no
    /// common template.
    pub pair_pool: usize,
}

impl Default for EpsBounds {
    fn default() -> Self {
        EpsBounds {
            bases: 4,
            probes: 8,
            max_word: 4,
            max_deg: 6,
            pair_pool: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsFinding {
    pub fraction: f64,
    pub members: usize,
    pub total: usize,
    pub template: NilTemplate,
    /// The coset is `f · N · g`.
    pub f: PlaneMap,
    pub g: PlaneMap,
    /// Indices of the maps in the coset.
    pub indices: Vec<usize>,
}

/// Best coset found; a lower bound for the true maximum.
pub fn eps_nilpotent_check(maps: &[PlaneMap], bounds: &EpsBounds) -> Result<EpsFinding, LabError> {
    let Some(first) = maps.first() else {
        return Err(LabError::config("family", "no maps to check"));
    };
    let field = first.field();
    let id = PlaneMap::identity(field);
    // any single map is in the coset f N with f itself
    let mut best = EpsFinding {
        fraction: 1.0 / maps.len() as f64,
        members: 1,
        total: maps.len(),
        template: NilTemplate::T1,
        f: first.clone(),
        g: id.clone(),
        indices: vec![0],
    };
    for i in 0..bounds.bases.min(maps.len()) {
        let Ok(fi_inv) = jung::invert(&maps[i]) else {
            continue;
        };
        let diffs: Vec<PlaneMap> = maps.iter().map(|f| fi_inv.compose(f)).collect();
        let mut candidates = vec![id.clone()];
        for d in diffs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, d)| d).take(bounds.probes) {
            let Ok(w) = jung::decompose(d) else {
                continue;
            };
            let Some((_, eta)) = w.conjugate_into_factor() else {
                continue;
            };
            if eta.len() > bounds.max_word
                || eta.letters().iter().any(|l| l.map().degree().unwrap_or(0) > bounds.max_deg)
            {
                continue;
            }
            let h = eta.inverse().multiply_out();
            if !candidates.contains(&h) {
                candidates.push(h);
            }
        }
        let mut k = 0;
        while k < candidates.len() {
            let h = candidates[k].clone();
            k += 1;
            let Ok(h_inv) = jung::invert(&h) else {
                continue;
            };
            let conj: Vec<PlaneMap> = diffs.iter().map(|d| h_inv.compose(d).compose(&h)).collect();
            if let Some(found) = best_in_conjugates(maps, &conj, i, &h, &h_inv, bounds) {
                if found.members > best.members {
                    best = found;
                    if best.members == maps.len() {
                        return Ok(best);
                    }
                }
            }
            // triangularize affine conjugates once
            if k == 1 {
                let affine: Vec<PlaneMap> = conj
                    .iter()
                    .filter(|e| e.as_affine().is_some() && !e.is_in_s())
                    .cloned()
                    .collect();
                if !affine.is_empty() {
                    if let Ok(AffineConjugation::Conjugator { beta }) = conjugate_affine_to_s(&affine) {
                        candidates.push(h.compose(&beta));
                    }
                }
            }
        }
    }
    Ok(best)
}

fn best_in_conjugates(
    maps: &[PlaneMap],
    conj: &[PlaneMap],
    base: usize,
    h: &PlaneMap,
    h_inv: &PlaneMap,
    bounds: &EpsBounds,
) -> Option<EpsFinding> {
    let field = h.field();
    let elementary: Vec<(usize, ElementaryShape)> = conj
        .iter()
        .enumerate()
        .filter_map(|(j, e)| ElementaryShape::of(e.gx(), e.gy()).map(|s| (j, s)))
        .collect();
    if elementary.len() < 2 {
        return None;
    }
    let degree = |set: &[&ElementaryShape]| set.iter().map(|s| s.p_degree()).max().unwrap_or(0);
    let all: Vec<&ElementaryShape> = elementary.iter().map(|(_, s)| s).collect();
    let mut solutions = Vec::new();
    if let Some(sol) = solve_template(&all.iter().map(|s| (*s).clone()).collect::<Vec<_>>(), field, degree(&all)) {
        solutions.push(sol);
    } else {
        let pool = &elementary[..elementary.len().min(bounds.pair_pool)];
        for a in 0..pool.len() {
            for b in a + 1..pool.len() {
                let pair = [pool[a].1.clone(), pool[b].1.clone()];
                if let Some(sol) = solve_template(&pair, field, degree(&[&pair[0], &pair[1]])) {
                    solutions.push(sol);
                }
            }
        }
    }
    let mut best: Option<EpsFinding> = None;
    for (template, kappa) in solutions {
        let Ok(kappa_inv) = jung::invert(&kappa) else {
            continue;
        };
        let f = maps[base].compose(h).compose(&kappa);
        let g = kappa_inv.compose(h_inv);
        // membership in T4 is checked without a degree cap, which is then
        // set to the largest degree among the members
        let test_template = match template {
            NilTemplate::T4 { .. } => NilTemplate::T4 { n: u32::MAX },
            t => t,
        };
        let normalized: Vec<(usize, PlaneMap)> = elementary
            .iter()
            .map(|(j, _)| (*j, kappa_inv.compose(&conj[*j]).compose(&kappa)))
            .filter(|(_, m)| template_member(m, test_template))
            .collect();
        let indices: Vec<usize> = normalized.iter().map(|(j, _)| *j).collect();
        let template = match template {
            NilTemplate::T4 { .. } => NilTemplate::T4 {
                n: normalized
                    .iter()
                    .map(|(_, m)| m.gx().degree_in(1).unwrap_or(0))
                    .max()
                    .unwrap_or(0),
            },
            t => t,
        };
        if !verify(maps, &indices, &f, &g, template) {
            continue;
        }
        if best.as_ref().is_none_or(|b| indices.len() > b.members) {
            best = Some(EpsFinding {
                fraction: indices.len() as f64 / maps.len() as f64,
                members: indices.len(),
                total: maps.len(),
                template,
                f,
                g,
                indices,
            });
        }
    }
    best
}

/// `f⁻¹ m g⁻¹ ∈ N` for every counted map.
fn verify(maps: &[PlaneMap], indices: &[usize], f: &PlaneMap, g: &PlaneMap, t: NilTemplate) -> bool {
    let (Ok(fi), Ok(gi)) = (jung::invert(f), jung::invert(g)) else {
        return false;
    };
    indices
        .iter()
        .all(|&j| template_member(&fi.compose(&maps[j]).compose(&gi), t))
}
