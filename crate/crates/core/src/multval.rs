//! Exact positive reals of the form `c * q^e` with `c > 0` and `e` rational.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{contract, Error, Result};
use crate::rational::{fmt_rat, parse_rat, pow_rat, rat_to_f64, Rat};

/// `log_q` of a multiplicative value.
#[derive(Debug, Clone, PartialEq)]
pub enum LogValue {
    Exact(Rat),
    /// `c` was not a rational power of `q`.
    Inexact(f64),
}

impl LogValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            LogValue::Exact(r) => rat_to_f64(r),
            LogValue::Inexact(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rat> {
        match self {
            LogValue::Exact(r) => Some(r),
            LogValue::Inexact(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MultVal {
    pub q: Rat,
    pub c: Rat,
    pub e: Rat,
}

impl MultVal {
    pub fn new(q: &Rat, c: Rat, e: Rat) -> Result<Self> {
        if *q <= Rat::one() {
            return Err(contract!("base q = {q} must exceed 1"));
        }
        if !c.is_positive() {
            return Err(contract!("multiplicative value must be positive, got {c}"));
        }
        Ok(MultVal { q: q.clone(), c, e }.normalized())
    }

    pub fn from_rat(q: &Rat, c: Rat) -> Result<Self> {
        Self::new(q, c, Rat::zero())
    }

    pub fn q_pow(q: &Rat, e: Rat) -> Self {
        MultVal { q: q.clone(), c: Rat::one(), e }
    }

    pub fn one(q: &Rat) -> Self {
        Self::q_pow(q, Rat::zero())
    }

    /// Moves the part of `c` that is a rational power of `q` into `e`.
    fn normalized(mut self) -> Self {
        if let Some(k) = rational_log(&self.c, &self.q) {
            self.e += k;
            self.c = Rat::one();
        }
        self
    }

    pub fn mul(&self, other: &MultVal) -> MultVal {
        debug_assert_eq!(self.q, other.q);
        MultVal { q: self.q.clone(), c: &self.c * &other.c, e: &self.e + &other.e }.normalized()
    }

    pub fn pow(&self, k: i64) -> MultVal {
        MultVal { q: self.q.clone(), c: pow_rat(&self.c, k), e: &self.e * Rat::from_integer(k.into()) }
            .normalized()
    }

    pub fn recip(&self) -> MultVal {
        self.pow(-1)
    }

    pub fn mul_q_pow(&self, k: &Rat) -> MultVal {
        MultVal { q: self.q.clone(), c: self.c.clone(), e: &self.e + k }
    }

    pub fn is_one(&self) -> bool {
        self.c.is_one() && self.e.is_zero()
    }

    /// The value as an exact rational, when `q^e` is rational.
    pub fn to_rat(&self) -> Option<Rat> {
        if self.e.is_integer() {
            let k = i64::try_from(self.e.to_integer()).ok()?;
            return Some(&self.c * pow_rat(&self.q, k));
        }
        let b = u32::try_from(self.e.denom().clone()).ok()?;
        let a = i64::try_from(self.e.numer().clone()).ok()?;
        let qa = pow_rat(&self.q, a);
        let n = crate::rational::exact_root(qa.numer(), b)?;
        let d = crate::rational::exact_root(qa.denom(), b)?;
        Some(&self.c * Rat::new(n, d))
    }

    pub fn log_q(&self) -> LogValue {
        match rational_log(&self.c, &self.q) {
            Some(k) => LogValue::Exact(&self.e + k),
            None => LogValue::Inexact(rat_to_f64(&self.e) + rat_to_f64(&self.c).ln() / rat_to_f64(&self.q).ln()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.c) * rat_to_f64(&self.q).powf(rat_to_f64(&self.e))
    }

    /// Exact comparison: `c1 q^e1` vs `c2 q^e2` reduces to `(c1/c2)^b` vs
    /// `q^a` where `e2 - e1 = a/b`, `b > 0`.
    pub fn cmp_value(&self, other: &MultVal) -> Ordering {
        debug_assert_eq!(self.q, other.q);
        let r = &self.c / &other.c;
        let d = &other.e - &self.e;
        let b = d.denom().clone();
        let a = d.numer().clone();
        let lhs = pow_big(&r, &b);
        let rhs = if a.is_negative() { pow_big(&self.q, &(-a)).recip() } else { pow_big(&self.q, &a) };
        lhs.cmp(&rhs)
    }

    pub fn parse(q: &Rat, s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("bad multiplicative value {s:?}"));
        let (c, e) = match s.find("q^") {
            None => (parse_rat(&s)?, Rat::zero()),
            Some(pos) => {
                let c = match &s[..pos] {
                    "" => Rat::one(),
                    pre => parse_rat(pre.strip_suffix('*').ok_or_else(bad)?)?,
                };
                let exp = &s[pos + 2..];
                let exp = exp.strip_prefix('(').and_then(|e| e.strip_suffix(')')).unwrap_or(exp);
                (c, parse_rat(exp)?)
            }
        };
        MultVal::new(q, c, e)
    }
}

fn pow_big(base: &Rat, e: &BigInt) -> Rat {
    let k = u32::try_from(e.clone()).expect("exponent fits in u32");
    num_traits::pow(base.clone(), k as usize)
}

/// `log_q c` when it is rational.
fn rational_log(c: &Rat, q: &Rat) -> Option<Rat> {
    if c.is_one() {
        return Some(Rat::zero());
    }
    if !c.is_positive() {
        return None;
    }
    // c = q^(a/b)  <=>  c^b = q^a. Write q = r^m with r not a perfect power;
    // then c must be a power r^j and log_q c = j/m.
    let (r, m) = primitive_root(q);
    let (cr, up) = if *c > Rat::one() { (c.clone(), true) } else { (c.recip(), false) };
    let mut acc = Rat::one();
    let mut j: i64 = 0;
    while acc < cr {
        acc *= &r;
        j += 1;
        if j > 4096 {
            return None;
        }
    }
    if acc != cr {
        return None;
    }
    let j = if up { j } else { -j };
    Some(Rat::new(j.into(), m.into()))
}

/// `q = r^m` with `m` maximal.
fn primitive_root(q: &Rat) -> (Rat, i64) {
    let bits = q.numer().bits().max(q.denom().bits()) as u32;
    for m in (2..=bits.max(2)).rev() {
        if let (Some(n), Some(d)) = (
            crate::rational::exact_root(q.numer(), m),
            crate::rational::exact_root(q.denom(), m),
        ) {
            if n.gcd(&d).is_one() {
                return (Rat::new(n, d), m as i64);
            }
        }
    }
    (q.clone(), 1)
}

impl PartialEq for MultVal {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.cmp_value(other) == Ordering::Equal
    }
}

impl Eq for MultVal {}

impl fmt::Display for MultVal {
    /// `3/2`, `q^(1/2)`, `3*q^(-1)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e.is_zero() {
            return f.write_str(&fmt_rat(&self.c));
        }
        if let Some(r) = self.to_rat() {
            if self.e.is_integer() {
                return f.write_str(&fmt_rat(&r));
            }
        }
        if self.c.is_one() {
            write!(f, "q^({})", fmt_rat(&self.e))
        } else {
            write!(f, "{}*q^({})", fmt_rat(&self.c), fmt_rat(&self.e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    #[test]
    fn normalisation_and_log() {
        let q = rat(4);
        let v = MultVal::from_rat(&q, rat(2)).unwrap();
        assert_eq!(v.log_q(), LogValue::Exact(ratio(1, 2)));
        let v = MultVal::from_rat(&q, ratio(1, 8)).unwrap();
        assert_eq!(v.log_q(), LogValue::Exact(ratio(-3, 2)));
        let v = MultVal::from_rat(&q, rat(3)).unwrap();
        assert!(matches!(v.log_q(), LogValue::Inexact(_)));
    }

    #[test]
    fn exact_comparison() {
        let q = rat(2);
        let a = MultVal::q_pow(&q, ratio(1, 2));
        let b = MultVal::from_rat(&q, ratio(141, 100)).unwrap();
        let c = MultVal::from_rat(&q, ratio(142, 100)).unwrap();
        assert_eq!(b.cmp_value(&a), Ordering::Less);
        assert_eq!(c.cmp_value(&a), Ordering::Greater);
        assert_eq!(a.pow(2), MultVal::from_rat(&q, rat(2)).unwrap());
        assert_eq!(a.mul(&a.recip()), MultVal::one(&q));
    }

    #[test]
    fn text_round_trip() {
        let q = rat(2);
        for s in ["3/2", "q^(1/2)", "3*q^(-1/3)", "8"] {
            let v = MultVal::parse(&q, s).unwrap();
            assert_eq!(MultVal::parse(&q, &v.to_string()).unwrap(), v, "{s}");
        }
        assert_eq!(MultVal::parse(&q, "q^(3)").unwrap().to_string(), "8");
        assert!(MultVal::parse(&q, "-1").is_err());
    }
}
