//! Elements `a + b w` of `Q(sqrt p)` with `w^2 = p`, valued by the unique
//! extension of the p-adic valuation, normalised so that `v(w) = 1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_rat, parse_rat, pow_rat, vp, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadElt {
    pub a: Rat,
    pub b: Rat,
    pub p: i64,
}

impl QuadElt {
    pub fn new(a: Rat, b: Rat, p: i64) -> Self {
        QuadElt { a, b, p }
    }

    pub fn from_rat(a: Rat, p: i64) -> Self {
        QuadElt { a, b: Rat::zero(), p }
    }

    pub fn from_int(a: i64, p: i64) -> Self {
        Self::from_rat(Rat::from_integer(a.into()), p)
    }

    pub fn zero(p: i64) -> Self {
        Self::from_int(0, p)
    }

    pub fn one(p: i64) -> Self {
        Self::from_int(1, p)
    }

    /// The uniformizer `w`.
    pub fn w(p: i64) -> Self {
        QuadElt { a: Rat::zero(), b: Rat::one(), p }
    }

    /// `w^d` for any integer `d`.
    pub fn w_pow(p: i64, d: i64) -> Self {
        let half = pow_rat(&Rat::from_integer(p.into()), d.div_euclid(2));
        if d.rem_euclid(2) == 0 {
            QuadElt { a: half, b: Rat::zero(), p }
        } else {
            QuadElt { a: Rat::zero(), b: half, p }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// `min(2 v_p(a), 2 v_p(b) + 1)`; `None` for zero.
    pub fn val(&self) -> Option<i64> {
        match (vp(&self.a, self.p), vp(&self.b, self.p)) {
            (None, None) => None,
            (Some(x), None) => Some(2 * x),
            (None, Some(y)) => Some(2 * y + 1),
            (Some(x), Some(y)) => Some((2 * x).min(2 * y + 1)),
        }
    }

    pub fn is_integral(&self) -> bool {
        self.val().is_none_or(|v| v >= 0)
    }

    /// The Galois conjugate `a - b w`.
    pub fn sigma(&self) -> Self {
        QuadElt { a: self.a.clone(), b: -&self.b, p: self.p }
    }

    pub fn norm(&self) -> Rat {
        &self.a * &self.a - &self.b * &self.b * Rat::from_integer(self.p.into())
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        Some(QuadElt { a: &self.a / &n, b: -&self.b / &n, p: self.p })
    }

    pub fn div(&self, other: &QuadElt) -> Option<Self> {
        other.inv().map(|i| self * &i)
    }

    pub fn scale(&self, r: &Rat) -> Self {
        QuadElt { a: &self.a * r, b: &self.b * r, p: self.p }
    }

    pub fn parse(s: &str, p: i64) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("bad element of Q(sqrt {p}): {s:?}"));
        if s.is_empty() {
            return Err(bad());
        }
        let Some(body) = s.strip_suffix('w') else {
            return Ok(QuadElt::from_rat(parse_rat(&s)?, p));
        };
        let body = body.strip_suffix('*').unwrap_or(body);
        // split the b coefficient off at the last sign not at the start
        let split = body
            .char_indices()
            .rev()
            .find(|&(i, c)| i > 0 && (c == '+' || c == '-') && !body[..i].ends_with('/'))
            .map(|(i, _)| i);
        let (a_str, b_str) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let b = match b_str {
            "" | "+" => Rat::one(),
            "-" => -Rat::one(),
            other => parse_rat(other.strip_prefix('+').unwrap_or(other))?,
        };
        let a = parse_rat(a_str)?;
        Ok(QuadElt { a, b, p })
    }
}

impl fmt::Display for QuadElt {
    /// `3`, `1/2+w`, `-w`, `1-3/2*w`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return f.write_str(&fmt_rat(&self.a));
        }
        let coef = if self.b.abs().is_one() { String::new() } else { format!("{}*", fmt_rat(&self.b.abs())) };
        let sign = if self.b.is_negative() { "-" } else { "+" };
        if self.a.is_zero() {
            let sign = if self.b.is_negative() { "-" } else { "" };
            write!(f, "{sign}{coef}w")
        } else {
            write!(f, "{}{sign}{coef}w", fmt_rat(&self.a))
        }
    }
}

impl<'a> Add<&'a QuadElt> for &'a QuadElt {
    type Output = QuadElt;
    fn add(self, o: &QuadElt) -> QuadElt {
        debug_assert_eq!(self.p, o.p);
        QuadElt { a: &self.a + &o.a, b: &self.b + &o.b, p: self.p }
    }
}

impl<'a> Sub<&'a QuadElt> for &'a QuadElt {
    type Output = QuadElt;
    fn sub(self, o: &QuadElt) -> QuadElt {
        debug_assert_eq!(self.p, o.p);
        QuadElt { a: &self.a - &o.a, b: &self.b - &o.b, p: self.p }
    }
}

impl<'a> Mul<&'a QuadElt> for &'a QuadElt {
    type Output = QuadElt;
    fn mul(self, o: &QuadElt) -> QuadElt {
        debug_assert_eq!(self.p, o.p);
        let p = Rat::from_integer(BigInt::from(self.p));
        QuadElt {
            a: &self.a * &o.a + &self.b * &o.b * p,
            b: &self.a * &o.b + &self.b * &o.a,
            p: self.p,
        }
    }
}

impl Neg for &QuadElt {
    type Output = QuadElt;
    fn neg(self) -> QuadElt {
        QuadElt { a: -&self.a, b: -&self.b, p: self.p }
    }
}
