//! Polynomial text grammar.
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { "*" unary } ;
//! unary   = ("+" | "-") unary | power ;
//! power   = atom [ "^" uint ] ;
//! atom    = uint [ "/" uint ] | ident | "(" expr ")" ;
//! ident   = letter { letter | digit | "_" } ;
//! ```
//!
//! Whitespace is ignored between tokens. Division is only accepted between
//! two integer literals (`1/3`); anything else is rejected rather than
//! silently turned into a rational function. Every identifier must name a
//! variable of the ambient list. This grammar is the interchange format for
//! maps, families and config files.

use std::fmt;

use num_bigint::BigInt;

use super::{MPoly, Vars};
use crate::error::PolyError;
use crate::scalar::{Field, Scalar};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: Field,
    vars: &'a Vars,
}

enum Atom {
    Literal(MPoly),
    Other(MPoly),
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err(&self, message: impl Into<String>) -> PolyError {
        PolyError::Syntax {
            pos: self.pos,
            message: message.into(),
        }
    }

    fn expr(&mut self) -> Result<MPoly, PolyError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MPoly, PolyError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MPoly, PolyError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MPoly, PolyError> {
        let base = match self.atom()? {
            Atom::Literal(p) | Atom::Other(p) => p,
        };
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.err("expected a non-negative integer exponent"));
            }
            let e: u32 = digits.parse().map_err(|_| PolyError::Syntax {
                pos: start,
                message: "exponent too large".into(),
            })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<Atom, PolyError> {
        let Some(c) = self.peek() else {
            return Err(self.err("unexpected end of input"));
        };
        let atom = if c.is_ascii_digit() {
            let num: BigInt = self.digits().parse().expect("digit string");
            if self.peek() == Some(b'/') {
                let slash = self.pos;
                self.pos += 1;
                self.skip_ws();
                if !self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                    return Err(PolyError::NonLiteralDivision { pos: slash });
                }
                let den: BigInt = self.digits().parse().expect("digit string");
                let value = self
                    .field
                    .from_ratio(&num, &den)
                    .ok_or(PolyError::ZeroDenominator { pos: slash })?;
                Atom::Literal(MPoly::constant(self.vars, value))
            } else {
                Atom::Literal(MPoly::constant(self.vars, self.field.from_bigint(&num)))
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
            let v = MPoly::var_named(self.field, self.vars, name).ok_or_else(|| {
                PolyError::UnknownVariable {
                    name: name.to_string(),
                    pos: start,
                }
            })?;
            Atom::Other(v)
        } else if c == b'(' {
            self.pos += 1;
            let inner = self.expr()?;
            if self.peek() != Some(b')') {
                return Err(self.err("expected `)`"));
            }
            self.pos += 1;
            Atom::Other(inner)
        } else {
            return Err(self.err(format!("unexpected character `{}`", c as char)));
        };
        if self.peek() == Some(b'/') {
            return Err(PolyError::NonLiteralDivision { pos: self.pos });
        }
        Ok(atom)
    }
}

impl MPoly {
    /// Parses `text` over `field` with the given ambient variables.
    pub fn parse(text: &str, field: Field, vars: &Vars) -> Result<MPoly, PolyError> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
            field,
            vars,
        };
        let result = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(result)
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, vars: &Vars, exps: &[u32]) -> fmt::Result {
    let mut first = true;
    for (name, &d) in vars.names().iter().zip(exps) {
        if d == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        if d == 1 {
            write!(f, "{name}")?;
        } else {
            write!(f, "{name}^{d}")?;
        }
    }
    Ok(())
}

impl fmt::Display for MPoly {
    /// Terms in descending total degree, ties broken lexicographically.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&Vec<u32>, &Scalar)> = self.terms().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (i, (e, c)) in terms.into_iter().enumerate() {
            let negative = c.prints_negative();
            let mag = if negative { -c } else { c.clone() };
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let constant = e.iter().all(|&d| d == 0);
            if constant {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                write_monomial(f, self.vars(), e)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn xy() -> Vars {
        Vars::xy()
    }

    #[test]
    fn reads_three_terms() {
        let p = MPoly::parse("x + 2*y^2 - 1/3", Field::Rational, &xy()).unwrap();
        assert_eq!(p.num_terms(), 3);
        assert_eq!(p.to_string(), "2*y^2 + x - 1/3");
    }

    #[test]
    fn reads_zero() {
        let p = MPoly::parse("0", Field::Rational, &xy()).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.to_string(), "0");
    }

    #[test]
    fn errors_carry_positions() {
        let e = MPoly::parse("x + * y", Field::Rational, &xy()).unwrap_err();
        assert!(matches!(e, PolyError::Syntax { pos: 4, .. }), "{e:?}");
        let e = MPoly::parse("x + w", Field::Rational, &xy()).unwrap_err();
        assert_eq!(
            e,
            PolyError::UnknownVariable {
                name: "w".into(),
                pos: 4
            }
        );
        let e = MPoly::parse("x/2", Field::Rational, &xy()).unwrap_err();
        assert_eq!(e, PolyError::NonLiteralDivision { pos: 1 });
        let e = MPoly::parse("2/x", Field::Rational, &xy()).unwrap_err();
        assert_eq!(e, PolyError::NonLiteralDivision { pos: 1 });
        let e = MPoly::parse("1/0", Field::Rational, &xy()).unwrap_err();
        assert_eq!(e, PolyError::ZeroDenominator { pos: 1 });
        assert!(MPoly::parse("(x + y", Field::Rational, &xy()).is_err());
        assert!(MPoly::parse("x y", Field::Rational, &xy()).is_err());
        assert!(MPoly::parse("", Field::Rational, &xy()).is_err());
    }

    #[test]
    fn prime_field_literals() {
        let f = Field::prime(7).unwrap();
        let p = MPoly::parse("1/2*x - 1", f, &xy()).unwrap();
        assert_eq!(p.coeff(&[1, 0]).residue(), Some(4));
        assert_eq!(p.to_string(), "-3*x - 1");
        assert_eq!(MPoly::parse(&p.to_string(), f, &xy()).unwrap(), p);
        assert!(matches!(
            MPoly::parse("1/7", f, &xy()),
            Err(PolyError::ZeroDenominator { .. })
        ));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let p = MPoly::parse("-x^2", Field::Rational, &xy()).unwrap();
        assert_eq!(p.coeff(&[2, 0]), Field::Rational.from_i64(-1));
        let p = MPoly::parse("x*-y", Field::Rational, &xy()).unwrap();
        assert_eq!(p.coeff(&[1, 1]), Field::Rational.from_i64(-1));
    }

    fn arb_poly(field: Field) -> impl Strategy<Value = MPoly> {
        prop::collection::vec(((0u32..4, 0u32..4), -20i64..20, 1i64..5), 0..6).prop_map(
            move |terms| {
                let terms = terms.into_iter().map(|((a, b), n, d)| {
                    let c = field
                        .from_ratio(&BigInt::from(n), &BigInt::from(d))
                        .unwrap();
                    (vec![a, b], c)
                });
                MPoly::from_terms(field, &Vars::xy(), terms)
            },
        )
    }

    proptest! {
        #[test]
        fn format_reparses_rational(p in arb_poly(Field::Rational)) {
            let back = MPoly::parse(&p.to_string(), Field::Rational, &xy()).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn format_reparses_prime(p in arb_poly(Field::Prime(10007))) {
            let back = MPoly::parse(&p.to_string(), Field::Prime(10007), &xy()).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
