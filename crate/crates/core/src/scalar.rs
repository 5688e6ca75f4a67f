//! Exact arithmetic in the rational function field Q(q).
//!
//! A [`Scalar`] is a reduced fraction of two integer polynomials in the formal
//! variable `q`. The representation is canonical: the denominator has a
//! positive leading coefficient and shares no common factor (polynomial or
//! integer content) with the numerator, so structural equality is field
//! equality.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole: denominator vanishes at q = {0}")]
    Pole(BigRational),
    #[error("cannot parse scalar: {0}")]
    Parse(String),
}

/// Dense integer polynomial in `q`, coefficients in ascending order of power.
/// Trailing zeros are never stored, so the zero polynomial is the empty vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<BigInt>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Poly::from_coeffs(vec![c.into()])
    }

    /// `c * q^k`.
    pub fn monomial(c: impl Into<BigInt>, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c.into();
        Poly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Poly::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Lowest power of `q` with a nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Number of nonzero coefficients.
    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    fn is_monomial(&self) -> bool {
        self.term_count() == 1
    }

    /// Positive gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    fn div_scalar_exact(&self, c: &BigInt) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|x| x / c).collect())
    }

    fn shift_down(&self, k: usize) -> Poly {
        Poly::from_coeffs(self.coeffs[k..].to_vec())
    }

    fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Primitive part with positive leading coefficient.
    fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = self.content();
        if self.leading().unwrap().is_negative() {
            c = -c;
        }
        self.div_scalar_exact(&c)
    }

    /// Pseudo-remainder of `self` by `b`: `lc(b)^(deg a - deg b + 1) * a mod b`.
    fn pseudo_rem(&self, b: &Poly) -> Poly {
        let db = b.degree().expect("pseudo_rem by zero");
        let lb = b.leading().unwrap().clone();
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let lr = r.leading().unwrap().clone();
            let shifted = b.shift_up(dr - db).scale(&lr);
            r = &r.scale(&lb) - &shifted;
        }
        r
    }

    /// Greatest common divisor over Z[q], normalized to a positive leading
    /// coefficient. Content is included: `gcd(2q, 4) = 2`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.primitive().scale(&other.content());
        }
        if other.is_zero() {
            return self.primitive().scale(&self.content());
        }
        let content = self.content().gcd(&other.content());
        let shift = self.order().unwrap().min(other.order().unwrap());
        if self.is_monomial() || other.is_monomial() {
            return Poly::monomial(content, shift);
        }
        // strip powers of q, which are handled by `shift`
        let mut a = self.shift_down(self.order().unwrap()).primitive();
        let mut b = other.shift_down(other.order().unwrap()).primitive();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            if b.degree() == Some(0) {
                return Poly::monomial(content, shift);
            }
            let r = a.pseudo_rem(&b);
            if r.is_zero() {
                return b.shift_up(shift).scale(&content);
            }
            a = b;
            b = r.primitive();
        }
    }

    /// Exact division; panics if `d` does not divide `self` over Z[q].
    pub fn div_exact(&self, d: &Poly) -> Poly {
        let dd = d.degree().expect("division by the zero polynomial");
        if self.is_zero() {
            return Poly::zero();
        }
        if dd == 0 {
            let c = &d.coeffs[0];
            debug_assert!(self.coeffs.iter().all(|x| (x % c).is_zero()));
            return self.div_scalar_exact(c);
        }
        let ld = d.leading().unwrap();
        let mut r = self.clone();
        let mut quot = vec![BigInt::zero(); self.coeffs.len().saturating_sub(dd)];
        while let Some(dr) = r.degree() {
            if dr < dd {
                break;
            }
            let (qc, rem) = r.leading().unwrap().div_rem(ld);
            assert!(rem.is_zero(), "inexact polynomial division");
            let k = dr - dd;
            r = &r - &d.shift_up(k).scale(&qc);
            quot[k] = qc;
        }
        assert!(r.is_zero(), "inexact polynomial division");
        Poly::from_coeffs(quot)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (c, s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c += s;
        }
        Poly::from_coeffs(coeffs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly::from_coeffs(coeffs)
    }
}

impl fmt::Display for Poly {
    /// Ascending powers, e.g. `1-q^2`, `2q+3q^4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if c.is_negative() {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}")?;
                    }
                    write!(f, "q")?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// An element of Q(q) in canonical reduced form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Scalar {
    /// Reduce `num / den` to canonical form.
    pub fn canonicalize(num: Poly, den: Poly) -> Result<Scalar, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Scalar {
        if num.is_zero() {
            return Scalar::zero();
        }
        if den.is_one() {
            return Scalar { num, den };
        }
        let mut g = num.gcd(&den);
        if den.leading().unwrap().is_negative() {
            g = -&g;
        }
        if g.is_one() {
            return Scalar { num, den };
        }
        Scalar { num: num.div_exact(&g), den: den.div_exact(&g) }
    }

    pub fn zero() -> Self {
        Scalar { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Scalar { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_int(c: i64) -> Self {
        Scalar { num: Poly::constant(c), den: Poly::one() }
    }

    pub fn from_poly(p: Poly) -> Self {
        Scalar { num: p, den: Poly::one() }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Scalar::reduce(Poly::constant(r.numer().clone()), Poly::constant(r.denom().clone()))
    }

    /// The formal variable `q`.
    pub fn q() -> Self {
        Scalar::q_pow(1)
    }

    /// `q^k` for any integer `k`.
    pub fn q_pow(k: i64) -> Self {
        let m = Poly::monomial(1, k.unsigned_abs() as usize);
        if k >= 0 {
            Scalar { num: m, den: Poly::one() }
        } else {
            Scalar { num: Poly::one(), den: m }
        }
    }

    /// `(-q)^k`.
    pub fn neg_q_pow(k: i64) -> Self {
        let s = Scalar::q_pow(k);
        if k.rem_euclid(2) == 1 {
            -s
        } else {
            s
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the value is a constant (no `q` dependence).
    pub fn is_constant(&self) -> bool {
        self.num.degree().unwrap_or(0) == 0 && self.den.degree() == Some(0)
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        if rhs.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::reduce(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        Scalar::one().checked_div(self)
    }

    pub fn pow(&self, k: u32) -> Scalar {
        (0..k).fold(Scalar::one(), |acc, _| &acc * self)
    }

    /// Exact value at `q = q0`.
    pub fn eval_at(&self, q0: &BigRational) -> Result<BigRational, ScalarError> {
        let d = self.den.eval(q0);
        if d.is_zero() {
            return Err(ScalarError::Pole(q0.clone()));
        }
        Ok(self.num.eval(q0) / d)
    }

    pub fn eval_f64(&self, q0: f64) -> f64 {
        let ev = |p: &Poly| {
            p.coeffs()
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * q0 + c.to_string().parse::<f64>().unwrap_or(f64::NAN))
        };
        ev(&self.num) / ev(&self.den)
    }

    /// Size of the canonical form, used to choose cheap pivots.
    pub fn weight(&self) -> usize {
        self.num.coeffs().len() + self.den.coeffs().len()
    }

    /// If this is `±q^k` (k possibly negative), return `(sign, k)`.
    pub fn as_signed_q_power(&self) -> Option<(bool, i64)> {
        if !self.num.is_monomial() || !self.den.is_monomial() {
            return None;
        }
        let nc = self.num.leading().unwrap();
        let dc = self.den.leading().unwrap();
        if !nc.abs().is_one() || !dc.is_one() {
            return None;
        }
        let k = self.num.order().unwrap() as i64 - self.den.order().unwrap() as i64;
        Some((nc.is_negative(), k))
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(c: i64) -> Self {
        Scalar::from_int(c)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return Scalar::reduce(&self.num + &rhs.num, self.den.clone());
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        Scalar::reduce(num, &self.den * &rhs.den)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.is_one() {
            return rhs.clone();
        }
        if rhs.is_one() {
            return self.clone();
        }
        // cross-reduce first to keep intermediate degrees small
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let num = &self.num.div_exact(&g1) * &rhs.num.div_exact(&g2);
        let den = &self.den.div_exact(&g2) * &rhs.den.div_exact(&g1);
        let mut s = Scalar { num, den };
        if s.den.leading().unwrap().is_negative() {
            s.num = -&s.num;
            s.den = -&s.den;
        }
        s
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    /// Panics on division by zero; use [`Scalar::checked_div`] for a fallible version.
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for Scalar {
    /// `p` when the denominator is 1, otherwise `(p)/(r)`; powers ascend.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl FromStr for Scalar {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::expr::parse_scalar(s).map_err(|e| ScalarError::Parse(e.to_string()))
    }
}
