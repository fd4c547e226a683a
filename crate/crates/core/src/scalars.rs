//! Exact scalar arithmetic.
//!
//! Two regimes are supported: the rationals with a fixed `q0` that is not a
//! root of unity, and the cyclotomic field `Q(ζ_t)` stored as polynomials in
//! `ζ` reduced modulo the `t`-th cyclotomic polynomial.
//!
//! [`Scalar`] values are kept in a canonical form: anything that lies in `Q`
//! is stored as [`Scalar::Rat`], so structural equality is field equality.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"` into a canonical rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    let den = BigInt::from_str(den).map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(Rational::new(num, den))
}

/// Dense univariate polynomial over `Q`, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::from_ints(&[1])
    }

    pub fn monomial(degree: usize, c: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let d = divisor.degree().expect("polynomial division by zero");
        let lead_inv = divisor.leading().unwrap().recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - d];
        for k in (d..rem.len()).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let c = &rem[k] * &lead_inv;
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                let v = &c * dc;
                rem[k - d + j] -= v;
            }
            quot[k - d] = c;
        }
        rem.truncate(d);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Inverse of `self` modulo `modulus`, if they are coprime.
    pub fn inverse_mod(&self, modulus: &Poly) -> Option<Poly> {
        // extended Euclid tracking only the coefficient of `self`
        let (mut r0, mut r1) = (modulus.clone(), self.div_rem(modulus).1);
        let (mut s0, mut s1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = &s0 - &(&q * &s1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if r0.degree() != Some(0) {
            return None;
        }
        let inv_lead = r0.coeffs[0].recip();
        Some(s0.scale(&inv_lead).div_rem(modulus).1)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| match (self.coeffs.get(k), rhs.coeffs.get(k)) {
                    (Some(a), Some(b)) => a + b,
                    (Some(a), None) | (None, Some(a)) => a.clone(),
                    (None, None) => unreachable!(),
                })
                .collect(),
        )
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = k == 0 || !abs.is_one();
            if show_coeff {
                write!(f, "{abs}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// The `t`-th cyclotomic polynomial, obtained by dividing `x^t - 1` by
/// `Φ_d` for every proper divisor `d` of `t`.
pub fn cyclotomic_polynomial(t: u32) -> Poly {
    assert!(t >= 1, "cyclotomic index must be positive");
    let mut p = &Poly::monomial(t as usize, Rational::one()) - &Poly::one();
    for d in divisors(t) {
        if d < t {
            let (q, r) = p.div_rem(&cyclotomic_polynomial(d));
            debug_assert!(r.is_zero());
            p = q;
        }
    }
    p
}

pub fn euler_phi(t: u32) -> u32 {
    (1..=t).filter(|k| k.gcd(&t) == 1).count() as u32
}

/// Arithmetic context for `Q(ζ_t) = Q[x]/Φ_t(x)`.
#[derive(Debug)]
pub struct CycloRing {
    t: u32,
    modulus: Poly,
    degree: usize,
    /// `ζ^k` reduced, for `0 <= k < t`.
    powers: Vec<Vec<Rational>>,
}

impl CycloRing {
    pub fn new(t: u32) -> Arc<Self> {
        let modulus = cyclotomic_polynomial(t);
        let degree = modulus.degree().unwrap();
        let mut ring = CycloRing { t, modulus, degree, powers: Vec::new() };
        let powers = (0..t)
            .map(|k| {
                let mut v = vec![Rational::zero(); (k as usize + 1).max(degree)];
                v[k as usize] = Rational::one();
                ring.reduce(v)
            })
            .collect();
        ring.powers = powers;
        Arc::new(ring)
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Reduces a coefficient vector of any length modulo the monic `Φ_t`.
    fn reduce(&self, mut v: Vec<Rational>) -> Vec<Rational> {
        let d = self.degree;
        let phi = self.modulus.coeffs();
        for k in (d..v.len()).rev() {
            if v[k].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut v[k]);
            for j in 0..d {
                if !phi[j].is_zero() {
                    let prod = &c * &phi[j];
                    v[k - d + j] -= prod;
                }
            }
        }
        v.resize(d, Rational::zero());
        v
    }

    fn zeta_pow(&self, k: i64) -> Vec<Rational> {
        self.powers[k.rem_euclid(self.t as i64) as usize].clone()
    }
}

/// Element of `Q(ζ_t)`: `coeffs[j]` multiplies `ζ^j`, `coeffs.len() == φ(t)`.
#[derive(Clone)]
pub struct CycloElem {
    ring: Arc<CycloRing>,
    coeffs: Vec<Rational>,
}

impl CycloElem {
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn ring(&self) -> &Arc<CycloRing> {
        &self.ring
    }
}

impl PartialEq for CycloElem {
    fn eq(&self, other: &Self) -> bool {
        self.ring.t == other.ring.t && self.coeffs == other.coeffs
    }
}

impl Eq for CycloElem {}

impl Hash for CycloElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ring.t.hash(state);
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclo{}{}", self.ring.t, format_coeff_list(&self.coeffs))
    }
}

fn format_coeff_list(coeffs: &[Rational]) -> String {
    let parts: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

/// A field element in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(Rational),
    /// Never rational: at least one coefficient above degree zero is nonzero.
    Cyc(CycloElem),
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Cyc(c) => write!(f, "{c:?}"),
        }
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rat(Rational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Rat(rat(n))
    }

    pub fn from_cyclo(ring: &Arc<CycloRing>, mut coeffs: Vec<Rational>) -> Self {
        if coeffs.len() != ring.degree {
            coeffs = ring.reduce(coeffs);
        }
        if coeffs[1..].iter().all(Zero::is_zero) {
            Scalar::Rat(coeffs.swap_remove(0))
        } else {
            Scalar::Cyc(CycloElem { ring: ring.clone(), coeffs })
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_one())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Cyc(_) => None,
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        match self {
            Scalar::Rat(r) if r.is_zero() => Err(Error::DivisionByZero),
            Scalar::Rat(r) => Ok(Scalar::Rat(r.recip())),
            Scalar::Cyc(c) => {
                let inv = Poly::new(c.coeffs.clone())
                    .inverse_mod(&c.ring.modulus)
                    .ok_or(Error::DivisionByZero)?;
                Ok(Scalar::from_cyclo(&c.ring, padded(inv.coeffs(), c.ring.degree)))
            }
        }
    }

    pub fn pow(&self, k: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

fn padded(c: &[Rational], len: usize) -> Vec<Rational> {
    let mut v = c.to_vec();
    v.resize(len.max(c.len()), Rational::zero());
    v
}

fn add_scalar(a: &Scalar, b: &Scalar, negate_b: bool) -> Scalar {
    match (a, b) {
        (Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(if negate_b { x - y } else { x + y }),
        (Scalar::Cyc(x), Scalar::Rat(y)) => {
            let mut coeffs = x.coeffs.clone();
            if negate_b {
                coeffs[0] -= y;
            } else {
                coeffs[0] += y;
            }
            Scalar::Cyc(CycloElem { ring: x.ring.clone(), coeffs })
        }
        (Scalar::Rat(x), Scalar::Cyc(y)) => {
            let mut coeffs: Vec<Rational> =
                if negate_b { y.coeffs.iter().map(|c| -c).collect() } else { y.coeffs.clone() };
            coeffs[0] += x;
            Scalar::Cyc(CycloElem { ring: y.ring.clone(), coeffs })
        }
        (Scalar::Cyc(x), Scalar::Cyc(y)) => {
            assert_eq!(x.ring.t, y.ring.t, "mixing cyclotomic fields");
            let coeffs = x
                .coeffs
                .iter()
                .zip(&y.coeffs)
                .map(|(p, q)| if negate_b { p - q } else { p + q })
                .collect();
            Scalar::from_cyclo(&x.ring, coeffs)
        }
    }
}

fn mul_scalar(a: &Scalar, b: &Scalar) -> Scalar {
    match (a, b) {
        (Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
        (Scalar::Cyc(c), Scalar::Rat(r)) | (Scalar::Rat(r), Scalar::Cyc(c)) => {
            if r.is_zero() {
                return Scalar::zero();
            }
            Scalar::Cyc(CycloElem { ring: c.ring.clone(), coeffs: c.coeffs.iter().map(|v| v * r).collect() })
        }
        (Scalar::Cyc(x), Scalar::Cyc(y)) => {
            assert_eq!(x.ring.t, y.ring.t, "mixing cyclotomic fields");
            let d = x.ring.degree;
            let mut prod = vec![Rational::zero(); 2 * d - 1];
            for (i, p) in x.coeffs.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                for (j, q) in y.coeffs.iter().enumerate() {
                    if !q.is_zero() {
                        prod[i + j] += p * q;
                    }
                }
            }
            Scalar::from_cyclo(&x.ring, x.ring.reduce(prod))
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        add_scalar(self, rhs, false)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        add_scalar(self, rhs, true)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        mul_scalar(self, rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Cyc(c) => Scalar::Cyc(CycloElem {
                ring: c.ring.clone(),
                coeffs: c.coeffs.iter().map(|v| -v).collect(),
            }),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Rat(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

/// The field that all scalars of one computation live in.
#[derive(Clone, Debug)]
pub enum ScalarField {
    /// `Q` with a fixed rational `q0 ∉ {0, 1, -1}`.
    GenericQ { q: Rational },
    /// `Q(ζ_t)` with `q = ζ_t`, `t >= 3`.
    Cyclotomic { ring: Arc<CycloRing> },
}

impl ScalarField {
    pub fn generic(q: Rational) -> Result<Self> {
        if q.is_zero() || q.abs().is_one() {
            return Err(Error::InvalidField(format!("q = {q} is zero or a root of unity")));
        }
        Ok(ScalarField::GenericQ { q })
    }

    pub fn cyclotomic(t: u32) -> Result<Self> {
        if t < 3 {
            return Err(Error::InvalidField(format!("root of unity order t = {t} must be at least 3")));
        }
        Ok(ScalarField::Cyclotomic { ring: CycloRing::new(t) })
    }

    pub fn t(&self) -> Option<u32> {
        match self {
            ScalarField::GenericQ { .. } => None,
            ScalarField::Cyclotomic { ring } => Some(ring.t),
        }
    }

    pub fn q0(&self) -> Option<&Rational> {
        match self {
            ScalarField::GenericQ { q } => Some(q),
            ScalarField::Cyclotomic { .. } => None,
        }
    }

    /// Dimension of the field over `Q`.
    pub fn degree(&self) -> usize {
        match self {
            ScalarField::GenericQ { .. } => 1,
            ScalarField::Cyclotomic { ring } => ring.degree,
        }
    }

    /// `q^k`; negative `k` allowed.
    pub fn qpow(&self, k: i64) -> Scalar {
        match self {
            ScalarField::GenericQ { q } => {
                let e = k.unsigned_abs();
                let base = if k < 0 { q.recip() } else { q.clone() };
                Scalar::Rat(num_traits::pow::pow(base, e as usize))
            }
            ScalarField::Cyclotomic { ring } => Scalar::from_cyclo(ring, ring.zeta_pow(k)),
        }
    }

    /// The generator `ζ_t` (cyclotomic) or `q0` (generic).
    pub fn q(&self) -> Scalar {
        self.qpow(1)
    }

    /// Coordinates over `Q`, of length [`ScalarField::degree`].
    pub fn coefficients(&self, s: &Scalar) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.degree()];
        match s {
            Scalar::Rat(r) => out[0] = r.clone(),
            Scalar::Cyc(c) => out.clone_from_slice(&c.coeffs),
        }
        out
    }

    pub fn from_coefficients(&self, coeffs: Vec<Rational>) -> Result<Scalar> {
        if coeffs.len() != self.degree() {
            return Err(Error::Parse(format!(
                "expected {} coefficients, got {}",
                self.degree(),
                coeffs.len()
            )));
        }
        Ok(match self {
            ScalarField::GenericQ { .. } => Scalar::Rat(coeffs.into_iter().next().unwrap()),
            ScalarField::Cyclotomic { ring } => Scalar::from_cyclo(ring, coeffs),
        })
    }

    /// `"p/q"` in the generic field, `"[c0, c1, ...]"` in the cyclotomic field.
    pub fn format(&self, s: &Scalar) -> String {
        match self {
            ScalarField::GenericQ { .. } => match s {
                Scalar::Rat(r) => r.to_string(),
                Scalar::Cyc(c) => format_coeff_list(&c.coeffs),
            },
            ScalarField::Cyclotomic { .. } => format_coeff_list(&self.coefficients(s)),
        }
    }

    /// Inverse of [`ScalarField::format`]. A bare rational is accepted in
    /// either field.
    pub fn parse(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let coeffs = inner
                .split(',')
                .map(parse_rational)
                .collect::<Result<Vec<_>>>()?;
            return self.from_coefficients(coeffs);
        }
        Ok(Scalar::Rat(parse_rational(s)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cyc(t: u32) -> ScalarField {
        ScalarField::cyclotomic(t).unwrap()
    }

    #[test]
    fn cyclotomic_polynomial_small_cases() {
        assert_eq!(cyclotomic_polynomial(1), Poly::from_ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(3), Poly::from_ints(&[1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(4), Poly::from_ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), Poly::from_ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(6).to_string(), "x^2 - x + 1");
    }

    #[test]
    fn cyclotomic_polynomial_has_totient_degree() {
        for t in 1..=30 {
            assert_eq!(cyclotomic_polynomial(t).degree(), Some(euler_phi(t) as usize), "t={t}");
        }
    }

    #[test]
    fn qpow_examples() {
        let g = ScalarField::generic(rat(2)).unwrap();
        assert_eq!(g.qpow(-2), Scalar::Rat(rat_frac(1, 4)));

        let f4 = cyc(4);
        assert_eq!(f4.qpow(6), Scalar::int(-1));
        assert_eq!(f4.qpow(6), f4.qpow(2));

        let f3 = cyc(3);
        let expected = f3.parse("[-1, -1]").unwrap();
        assert_eq!(f3.qpow(-1), expected);
        assert_eq!(f3.qpow(2), expected);
    }

    #[test]
    fn field_op_examples() {
        let f3 = cyc(3);
        let z = f3.q();
        let one = Scalar::one();
        let a = &one - &z;
        let b = &one - &(&z * &z);
        assert_eq!(&a * &b, Scalar::int(3));

        let x = Scalar::Rat(rat_frac(-3, 7));
        assert_eq!(x.inv().unwrap(), Scalar::Rat(rat_frac(-7, 3)));

        let s = &(&one + &z) + &(&z * &z);
        assert!(s.is_zero());
        assert_eq!(s.inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn cyclotomic_inverse() {
        for t in 3..=12 {
            let f = cyc(t);
            let a = &f.q() - &Scalar::int(2);
            let inv = a.inv().unwrap();
            assert!((&a * &inv).is_one(), "t={t}");
        }
    }

    #[test]
    fn primitivity() {
        for t in 3..=12u32 {
            let f = cyc(t);
            assert!(f.qpow(t as i64).is_one());
            for k in 1..t as i64 {
                assert!(!f.qpow(k).is_one(), "t={t} k={k}");
            }
        }
    }

    #[test]
    fn generic_injectivity_window() {
        for q in [rat(2), rat_frac(3, 2), rat(-2)] {
            let f = ScalarField::generic(q).unwrap();
            let powers: Vec<Scalar> = (-200..=200).map(|k| f.qpow(k)).collect();
            let distinct: std::collections::HashSet<_> = powers.iter().collect();
            assert_eq!(distinct.len(), powers.len());
        }
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(ScalarField::generic(rat(1)).is_err());
        assert!(ScalarField::generic(rat(-1)).is_err());
        assert!(ScalarField::generic(rat(0)).is_err());
        assert!(ScalarField::cyclotomic(2).is_err());
    }

    #[test]
    fn format_and_parse() {
        let g = ScalarField::generic(rat(2)).unwrap();
        assert_eq!(g.format(&Scalar::Rat(rat_frac(6, -4))), "-3/2");
        assert_eq!(g.format(&Scalar::int(5)), "5");
        assert_eq!(g.parse("-3/2").unwrap(), Scalar::Rat(rat_frac(-3, 2)));

        let f = cyc(5);
        let z = f.q();
        assert_eq!(f.format(&z), "[0, 1, 0, 0]");
        assert_eq!(f.format(&Scalar::int(2)), "[2, 0, 0, 0]");
        assert_eq!(f.parse("[0, 1, 0, 0]").unwrap(), z);
        assert!(f.parse("[1, 2]").is_err());
        assert!(g.parse("1/0").is_err());
    }

    fn small_cyclo() -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(-5i64..=5, 4)
    }

    proptest! {
        #[test]
        fn cyclotomic_field_axioms(a in small_cyclo(), b in small_cyclo(), c in small_cyclo(), t in prop::sample::select(vec![5u32, 8, 10, 12])) {
            let f = cyc(t);
            let mk = |v: &[i64]| f.from_coefficients(v.iter().map(|&x| rat(x)).collect()).unwrap();
            let (a, b, c) = (mk(&a), mk(&b), mk(&c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            if !a.is_zero() {
                prop_assert!((&a * &a.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn rational_field_axioms(n in -50i64..50, d in 1i64..50, m in -50i64..50) {
            let a = Scalar::Rat(rat_frac(n, d));
            let b = Scalar::int(m);
            prop_assert_eq!(&(&a + &b) * &a, &(&a * &a) + &(&b * &a));
            if !a.is_zero() {
                prop_assert!((&a * &a.inv().unwrap()).is_one());
            }
        }
    }
}
