//! Alternating words over the amalgam `E ⋆_S A`.
//!
//! A word is reduced by a stack pass: adjacent letters of the same factor
//! are multiplied together, letters that land in `S` are absorbed into a
//! neighbour, and identities vanish. The result is then put in canonical
//! form by walking left to right and replacing every non-final letter `h`
//! by a fixed representative `r` of its coset `h·S`, pushing the leftover
//! `s = r⁻¹·h` into the next letter:
//!
//! * `E` letters become `(x + Q(y), y)` with `Q` free of terms of degree
//!   below two.
//! * `A` letters (whose `y`-component must involve `x`) become
//!   `(t·x + y, x)`.
//!
//! The last letter absorbs the residue. Two words multiply out to the same
//! map exactly when their canonical forms agree letter for letter.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{AutError, WordError};
use crate::plane::{compose_upoly, Affine, Elementary, FactorClass, PlaneMap};
use crate::poly::UPoly;
use crate::scalar::{Field, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Factor {
    A,
    E,
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::A => write!(f, "A"),
            Factor::E => write!(f, "E"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Letter {
    factor: Factor,
    map: PlaneMap,
}

impl Letter {
    /// Checks that `map` belongs to the tagged factor.
    pub fn new(factor: Factor, map: PlaneMap) -> Result<Letter, WordError> {
        let ok = match factor {
            Factor::A => map.as_affine().is_some(),
            Factor::E => map.as_elementary().is_some(),
        };
        if ok {
            Ok(Letter { factor, map })
        } else {
            Err(WordError::WrongFactor { index: 0 })
        }
    }

    /// Tags a map by membership, preferring `A` for elements of `S`.
    pub fn from_map(map: PlaneMap) -> Option<Letter> {
        let factor = match map.classify() {
            FactorClass::S | FactorClass::AffineOnly => Factor::A,
            FactorClass::ElementaryOnly(_) => Factor::E,
            FactorClass::General => return None,
        };
        Some(Letter { factor, map })
    }

    pub fn factor(&self) -> Factor {
        self.factor
    }

    pub fn map(&self) -> &PlaneMap {
        &self.map
    }

    pub fn into_map(self) -> PlaneMap {
        self.map
    }

    pub fn is_in_s(&self) -> bool {
        self.map.is_in_s()
    }

    pub fn inverse(&self) -> Letter {
        let map = match self.factor {
            Factor::A => self.map.as_affine().expect("affine letter").inverse().to_map(),
            Factor::E => self.map.as_elementary().expect("elementary letter").inverse().to_map(),
        };
        Letter {
            factor: self.factor,
            map,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.map, self.factor)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    S,
    A,
    E,
}

fn kind(map: &PlaneMap) -> Kind {
    match map.classify() {
        FactorClass::S => Kind::S,
        FactorClass::AffineOnly => Kind::A,
        FactorClass::ElementaryOnly(_) => Kind::E,
        FactorClass::General => unreachable!("letters are affine or elementary"),
    }
}

/// An alternating word; the empty word is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AltWord {
    field: Field,
    letters: Vec<Letter>,
}

impl AltWord {
    pub fn identity(field: Field) -> AltWord {
        AltWord {
            field,
            letters: Vec::new(),
        }
    }

    /// Validates an alternating word as given, without normalizing it.
    pub fn new(field: Field, letters: Vec<Letter>) -> Result<AltWord, WordError> {
        for (index, l) in letters.iter().enumerate() {
            Letter::new(l.factor, l.map.clone()).map_err(|_| WordError::WrongFactor { index })?;
            if l.map.field() != field {
                return Err(WordError::WrongFactor { index });
            }
        }
        if letters.len() >= 2 {
            for (index, l) in letters.iter().enumerate() {
                if l.is_in_s() {
                    return Err(WordError::LetterInS { index });
                }
            }
            for (index, pair) in letters.windows(2).enumerate() {
                if pair[0].factor == pair[1].factor {
                    return Err(WordError::NotAlternating { index });
                }
            }
        }
        Ok(AltWord { field, letters })
    }

    /// Reduces an arbitrary sequence of letters to the canonical alternating
    /// word with the same product.
    pub fn reduce<I: IntoIterator<Item = Letter>>(field: Field, letters: I) -> AltWord {
        let mut stack: Vec<(PlaneMap, Kind)> = Vec::new();
        for l in letters {
            let mut m = l.map;
            loop {
                if m.is_identity() {
                    break;
                }
                let k = kind(&m);
                match stack.last() {
                    Some((_, top)) if k == Kind::S || *top == Kind::S || k == *top => {
                        let (prev, _) = stack.pop().unwrap();
                        m = prev.compose(&m);
                    }
                    _ => {
                        stack.push((m, k));
                        break;
                    }
                }
            }
        }
        let maps: Vec<(PlaneMap, Kind)> = stack;
        canonical_from_reduced(field, maps)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The product `h_0 ∘ h_1 ∘ … ∘ h_{n-1}`.
    pub fn multiply_out(&self) -> PlaneMap {
        // right fold: each step substitutes the large accumulated map into
        // one small letter
        let mut acc: Option<PlaneMap> = None;
        for l in self.letters.iter().rev() {
            acc = Some(match acc {
                None => l.map.clone(),
                Some(m) => l.map.compose(&m),
            });
        }
        acc.unwrap_or_else(|| PlaneMap::identity(self.field))
    }

    pub fn canonicalize(&self) -> AltWord {
        AltWord::reduce(self.field, self.letters.iter().cloned())
    }

    pub fn product(&self, other: &AltWord) -> AltWord {
        AltWord::reduce(
            self.field,
            self.letters.iter().chain(&other.letters).cloned(),
        )
    }

    pub fn inverse(&self) -> AltWord {
        AltWord::reduce(self.field, self.letters.iter().rev().map(Letter::inverse))
    }

    /// Cyclic reduction. On success returns `(β, η)` with
    /// `self.multiply_out() == η⁻¹ ∘ β ∘ η` and `β` in a single factor.
    /// Words that reduce to an even length of at least two are cyclically
    /// reduced and not conjugate into a factor.
    pub fn conjugate_into_factor(&self) -> Option<(Letter, AltWord)> {
        let mut cur = self.canonicalize();
        let mut eta = AltWord::identity(self.field);
        loop {
            match cur.len() {
                0 => {
                    let id = Letter::from_map(PlaneMap::identity(self.field)).unwrap();
                    return Some((id, eta));
                }
                1 => return Some((cur.letters[0].clone(), eta)),
                n if n % 2 == 0 => return None,
                _ => {
                    // h0·rest = h0·(rest·h0)·h0⁻¹
                    let h0 = cur.letters[0].clone();
                    let rotated = cur.letters[1..].iter().cloned().chain([h0.clone()]);
                    cur = AltWord::reduce(self.field, rotated);
                    eta = AltWord::reduce(
                        self.field,
                        std::iter::once(h0.inverse()).chain(eta.letters.iter().cloned()),
                    );
                }
            }
        }
    }
}

fn canonical_from_reduced(field: Field, maps: Vec<(PlaneMap, Kind)>) -> AltWord {
    let n = maps.len();
    let tag = |k: Kind| if k == Kind::E { Factor::E } else { Factor::A };
    let mut letters = Vec::with_capacity(n);
    let mut carry: Option<PlaneMap> = None;
    for (i, (m, k)) in maps.into_iter().enumerate() {
        let h = match carry.take() {
            Some(s) => s.compose(&m),
            None => m,
        };
        if i + 1 == n {
            letters.push(Letter { factor: tag(k), map: h });
        } else {
            let (r, s) = match k {
                Kind::E => split_elementary(&h.as_elementary().expect("elementary letter")),
                Kind::A => split_affine(&h.as_affine().expect("affine letter")),
                Kind::S => unreachable!("S letters are absorbed during reduction"),
            };
            letters.push(Letter { factor: tag(k), map: r });
            carry = Some(s);
        }
    }
    AltWord { field, letters }
}

/// `h = (x + Q(y), y) ∘ s` with `s ∈ S` and `Q` having no terms of degree
/// below two.
fn split_elementary(h: &Elementary) -> (PlaneMap, PlaneMap) {
    let field = h.field();
    let bi = h.b.inv().expect("b != 0");
    // Q = P((y - c)/b) with its constant and linear terms dropped
    let back = UPoly::new(field, vec![-&(&bi * &h.c), bi]);
    let mut q = compose_upoly(&h.p, &back).coeffs().to_vec();
    for c in q.iter_mut().take(2) {
        *c = field.zero();
    }
    let q = UPoly::new(field, q);
    let forward = UPoly::new(field, vec![h.c.clone(), h.b.clone()]);
    let residue = Elementary {
        a: h.a.clone(),
        p: h.p.sub(&compose_upoly(&q, &forward)),
        b: h.b.clone(),
        c: h.c.clone(),
    };
    let rep = Elementary {
        a: field.one(),
        p: q,
        b: field.one(),
        c: field.zero(),
    };
    (rep.to_map(), residue.to_map())
}

/// `h = (t·x + y, x) ∘ s` with `s ∈ S`; requires the `y`-row of `h` to
/// involve `x`.
fn split_affine(h: &Affine) -> (PlaneMap, PlaneMap) {
    let field = h.field();
    let [[a1, b1], [a2, b2]] = &h.m;
    let [c1, c2] = &h.t;
    let t = a1 * &a2.inv().expect("affine letter outside S");
    let rep = Affine {
        m: [[t.clone(), field.one()], [field.one(), field.zero()]],
        t: [field.zero(), field.zero()],
    };
    let residue = Affine {
        m: [[a2.clone(), b2.clone()], [field.zero(), b1 - &(&t * b2)]],
        t: [c2.clone(), c1 - &(&t * c2)],
    };
    (rep.to_map(), residue.to_map())
}

pub fn word_product(w1: &AltWord, w2: &AltWord) -> AltWord {
    w1.product(w2)
}

pub fn word_inverse(w: &AltWord) -> AltWord {
    w.inverse()
}

/// Which coset to compare: `h·S` (left) or `S·h` (right).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Left: `h1⁻¹ ∘ h2 ∈ S`. Right: `h2 ∘ h1⁻¹ ∈ S`.
pub fn coset_eq(h1: &PlaneMap, h2: &PlaneMap, side: Side) -> Result<bool, AutError> {
    let h1i = crate::jung::invert(h1)?;
    crate::jung::decompose(h2)?;
    let d = match side {
        Side::Left => h1i.compose(h2),
        Side::Right => h2.compose(&h1i),
    };
    Ok(d.is_in_s())
}

impl fmt::Display for AltWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for AltWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.letters.serialize(s)
    }
}

/// Random words for tests and the acceptance harness: alternating letters
/// outside `S`, small integer coefficients.
pub mod random {
    use rand::Rng;

    use super::*;

    fn small<R: Rng>(rng: &mut R, field: Field, nonzero: bool) -> Scalar {
        loop {
            let v = field.from_i64(rng.gen_range(-3..=3));
            if !nonzero || !v.is_zero() {
                return v;
            }
        }
    }

    /// A random element of `S`.
    pub fn s_element<R: Rng>(rng: &mut R, field: Field) -> PlaneMap {
        Affine {
            m: [
                [small(rng, field, true), small(rng, field, false)],
                [field.zero(), small(rng, field, true)],
            ],
            t: [small(rng, field, false), small(rng, field, false)],
        }
        .to_map()
    }

    /// A random elementary map with `deg P` exactly `degree` (at least 2).
    pub fn elementary<R: Rng>(rng: &mut R, field: Field, degree: u32) -> PlaneMap {
        let mut p: Vec<Scalar> = (0..degree).map(|_| small(rng, field, false)).collect();
        p.push(small(rng, field, true));
        Elementary {
            a: small(rng, field, true),
            p: UPoly::new(field, p),
            b: small(rng, field, true),
            c: small(rng, field, false),
        }
        .to_map()
    }

    /// A random affine map outside `S`.
    pub fn affine<R: Rng>(rng: &mut R, field: Field) -> PlaneMap {
        loop {
            let a = Affine {
                m: [
                    [small(rng, field, false), small(rng, field, false)],
                    [small(rng, field, true), small(rng, field, false)],
                ],
                t: [small(rng, field, false), small(rng, field, false)],
            };
            if !a.det().is_zero() {
                return a.to_map();
            }
        }
    }

    /// A canonical alternating word of exactly `len` letters with
    /// elementary degrees in `2..=max_degree`.
    pub fn word<R: Rng>(rng: &mut R, field: Field, len: usize, max_degree: u32) -> AltWord {
        let start_e = rng.gen_bool(0.5);
        let mut letters = Vec::with_capacity(len);
        for i in 0..len {
            let map = if (i % 2 == 0) == start_e {
                let d = rng.gen_range(2..=max_degree);
                elementary(rng, field, d)
            } else {
                affine(rng, field)
            };
            letters.push(Letter::from_map(map).expect("letter"));
        }
        let w = AltWord::reduce(field, letters);
        debug_assert_eq!(w.len(), len);
        w
    }

    /// The same group element written with `S` elements shuffled between
    /// adjacent letters: `(h0·s0⁻¹, s0·h1·s1⁻¹, …, s_{n-2}·h_{n-1})`.
    pub fn shuffle<R: Rng>(rng: &mut R, w: &AltWord) -> Vec<Letter> {
        let field = w.field();
        let n = w.len();
        let mut out = Vec::with_capacity(n);
        let mut prev: Option<PlaneMap> = None;
        for (i, l) in w.letters().iter().enumerate() {
            let mut m = l.map().clone();
            if let Some(s) = &prev {
                m = s.compose(&m);
            }
            if i + 1 < n {
                let s = s_element(rng, field);
                let si = s.as_affine().unwrap().inverse().to_map();
                m = m.compose(&si);
                prev = Some(s);
            }
            out.push(Letter::new(l.factor(), m).expect("shuffle stays in the factor"));
        }
        out
    }
}
