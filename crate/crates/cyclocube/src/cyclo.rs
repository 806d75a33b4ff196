//! Exact arithmetic in the cyclotomic field Q(w_m).
//!
//! A value is stored as its canonical residue modulo the m-th cyclotomic
//! polynomial Phi_m: a vector of phi(m) rational coefficients over the power
//! basis 1, w, ..., w^{phi(m)-1}. Canonical storage makes equality a
//! coefficient comparison, so zero tests (and with them every rank, support
//! and weight-equality decision downstream) are exact.
//!
//! The complex embedding used by [`CycNum::to_complex`] sends w to
//! exp(-2*pi*i/m), so the j-th root w^j is exp(-2*pi*i*j/m). Conjugation is
//! the field automorphism w^j -> w^{m-j} and does not depend on that choice
//! of embedding.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// An integer polynomial in one variable, stored by ascending power with no
/// trailing zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycPoly {
    coeffs: Vec<BigInt>,
}

impl CycPoly {
    fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        CycPoly { coeffs }
    }

    /// x^m - 1.
    fn x_pow_minus_one(m: u32) -> Self {
        let mut coeffs = vec![BigInt::zero(); m as usize + 1];
        coeffs[0] = -BigInt::one();
        coeffs[m as usize] = BigInt::one();
        CycPoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients by ascending power.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Quotient by a monic divisor; panics if the division leaves a
    /// remainder. Only used internally, where divisibility is guaranteed.
    fn div_exact(&self, divisor: &CycPoly) -> CycPoly {
        assert!(divisor.coeffs.last().is_some_and(|c| c.is_one()));
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        let nd = self.degree();
        assert!(nd >= dd);
        let mut quot = vec![BigInt::zero(); nd - dd + 1];
        for i in (dd..=nd).rev() {
            let c = std::mem::replace(&mut rem[i], BigInt::zero());
            if c.is_zero() {
                continue;
            }
            for (j, djc) in divisor.coeffs.iter().enumerate().take(dd) {
                rem[i - dd + j] -= &c * djc;
            }
            quot[i - dd] = c;
        }
        assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
        CycPoly::from_coeffs(quot)
    }
}

static PHI_TABLE: OnceLock<RwLock<HashMap<u32, Arc<CycPoly>>>> = OnceLock::new();

fn phi_table() -> &'static RwLock<HashMap<u32, Arc<CycPoly>>> {
    PHI_TABLE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The m-th cyclotomic polynomial Phi_m, computed by dividing x^m - 1 by the
/// Phi_d of all proper divisors d of m. Results are memoized behind a
/// read-mostly lock, so repeated lookups are cheap and thread-safe.
///
/// Panics if `m == 0`.
pub fn cyclotomic_poly(m: u32) -> Arc<CycPoly> {
    assert!(m >= 1, "cyclotomic polynomial requires m >= 1");
    if let Some(p) = phi_table().read().expect("phi table poisoned").get(&m) {
        return Arc::clone(p);
    }
    let mut num = CycPoly::x_pow_minus_one(m);
    for d in 1..m {
        if m.is_multiple_of(d) {
            num = num.div_exact(&cyclotomic_poly(d));
        }
    }
    let poly = Arc::new(num);
    phi_table()
        .write()
        .expect("phi table poisoned")
        .entry(m)
        .or_insert_with(|| Arc::clone(&poly));
    poly
}

/// Euler's totient phi(m), read off as the degree of Phi_m.
pub fn phi(m: u32) -> usize {
    cyclotomic_poly(m).degree()
}

/// An element of Q(w_m) in canonical form: phi(m) rational coefficients over
/// the power basis of w = w_1. The modulus m is part of the value's identity;
/// values with different moduli never compare equal and mixing them in
/// arithmetic is an error.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycNum {
    m: u32,
    coeffs: Vec<BigRational>,
}

/// Reduce a coefficient vector modulo Phi_m and trim to length phi(m).
fn reduce_mod_phi(mut coeffs: Vec<BigRational>, m: u32) -> Vec<BigRational> {
    let phi_poly = cyclotomic_poly(m);
    let deg = phi_poly.degree();
    if coeffs.len() > deg {
        for i in (deg..coeffs.len()).rev() {
            let c = std::mem::replace(&mut coeffs[i], BigRational::zero());
            if c.is_zero() {
                continue;
            }
            for (j, pj) in phi_poly.coeffs().iter().enumerate().take(deg) {
                let delta = &c * BigRational::from(pj.clone());
                coeffs[i - deg + j] -= delta;
            }
        }
    }
    coeffs.resize(deg, BigRational::zero());
    coeffs
}

impl CycNum {
    /// Zero in Q(w_m).
    pub fn zero(m: u32) -> Self {
        assert!(m >= 1);
        CycNum {
            m,
            coeffs: vec![BigRational::zero(); phi(m)],
        }
    }

    /// One in Q(w_m).
    pub fn one(m: u32) -> Self {
        Self::from_rational(m, BigRational::one())
    }

    /// Embed a rational number. The constant slot is canonical in every
    /// modulus since phi(m) >= 1.
    pub fn from_rational(m: u32, r: BigRational) -> Self {
        let mut v = CycNum::zero(m);
        v.coeffs[0] = r;
        v
    }

    /// Embed an integer.
    pub fn from_integer(m: u32, i: i64) -> Self {
        Self::from_rational(m, BigRational::from(BigInt::from(i)))
    }

    /// The canonical form of w^j in Q(w_m). The exponent is taken modulo m.
    pub fn root_power(m: u32, j: u32) -> Self {
        assert!(m >= 1);
        let j = (j % m) as usize;
        let mut coeffs = vec![BigRational::zero(); j + 1];
        coeffs[j] = BigRational::one();
        CycNum {
            m,
            coeffs: reduce_mod_phi(coeffs, m),
        }
    }

    pub fn modulus(&self) -> u32 {
        self.m
    }

    /// Coefficients over the power basis, length phi(m).
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// True when the value lies in Q (only the constant coefficient may be
    /// nonzero) and equals the given rational.
    pub fn eq_rational(&self, r: &BigRational) -> bool {
        self.coeffs[0] == *r && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    fn check_same_modulus(&self, other: &CycNum) -> Result<()> {
        if self.m == other.m {
            Ok(())
        } else {
            Err(Error::ModulusMismatch(self.m, other.m))
        }
    }

    pub fn try_add(&self, other: &CycNum) -> Result<CycNum> {
        self.check_same_modulus(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CycNum { m: self.m, coeffs })
    }

    pub fn try_sub(&self, other: &CycNum) -> Result<CycNum> {
        self.check_same_modulus(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CycNum { m: self.m, coeffs })
    }

    pub fn try_mul(&self, other: &CycNum) -> Result<CycNum> {
        self.check_same_modulus(other)?;
        let n = self.coeffs.len();
        let mut conv = vec![BigRational::zero(); 2 * n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                conv[i + j] += a * b;
            }
        }
        Ok(CycNum {
            m: self.m,
            coeffs: reduce_mod_phi(conv, self.m),
        })
    }

    /// Multiply by a rational scalar.
    pub fn scaled(&self, r: &BigRational) -> CycNum {
        CycNum {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Complex conjugation: the automorphism sending w^j to w^{m-j}.
    pub fn conj(&self) -> CycNum {
        let mut acc = CycNum::zero(self.m);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let power = (self.m - (j as u32 % self.m)) % self.m;
            acc += CycNum::root_power(self.m, power).scaled(c);
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm on the
    /// representative polynomial and Phi_m. Fails on zero.
    pub fn inv(&self) -> Result<CycNum> {
        if self.is_zero() {
            return Err(Error::DivisionByZero(self.m));
        }
        let phi_poly = cyclotomic_poly(self.m);
        let modulus: Vec<BigRational> = phi_poly
            .coeffs()
            .iter()
            .map(|c| BigRational::from(c.clone()))
            .collect();
        // Invariant: r_i = s_i * self (mod Phi_m).
        let mut r0 = modulus;
        let mut s0: Vec<BigRational> = vec![];
        let mut r1 = poly_trim(self.coeffs.clone());
        let mut s1 = vec![BigRational::one()];
        while !r1.is_empty() {
            let (q, rem) = poly_divmod(&r0, &r1);
            let s_next = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s_next;
        }
        // Phi_m is irreducible over Q, so the gcd is a nonzero constant.
        debug_assert_eq!(r0.len(), 1);
        let c = r0[0].clone();
        let inv_c = BigRational::one() / c;
        let coeffs = s0.into_iter().map(|x| x * &inv_c).collect();
        Ok(CycNum {
            m: self.m,
            coeffs: reduce_mod_phi(coeffs, self.m),
        })
    }

    pub fn try_div(&self, other: &CycNum) -> Result<CycNum> {
        self.try_mul(&other.inv()?)
    }

    /// Numerical embedding at w = exp(-2*pi*i/m).
    pub fn to_complex(&self) -> Complex64 {
        let theta = -2.0 * std::f64::consts::PI / self.m as f64;
        let w = Complex64::new(theta.cos(), theta.sin());
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * w + Complex64::new(rational_to_f64(c), 0.0);
        }
        acc
    }

    /// Parse the canonical rendering produced by `Display`, e.g.
    /// `(1/8)+(1/8)w` or `-(1/2)w^2`. Powers up to m are accepted and
    /// reduced. Whitespace is ignored.
    pub fn parse(s: &str, m: u32) -> Result<CycNum> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "0" {
            return Ok(CycNum::zero(m));
        }
        let bytes = compact.as_bytes();
        let mut pos = 0usize;
        let mut acc = CycNum::zero(m);
        let bad = |what: &str| Error::Parse(format!("{what} in exact value {s:?}"));
        while pos < bytes.len() {
            let mut negative = false;
            match bytes[pos] {
                b'+' => pos += 1,
                b'-' => {
                    negative = true;
                    pos += 1;
                }
                _ if pos == 0 => {}
                _ => return Err(bad("expected sign")),
            }
            if pos >= bytes.len() || bytes[pos] != b'(' {
                return Err(bad("expected '('"));
            }
            let close = compact[pos..]
                .find(')')
                .map(|o| pos + o)
                .ok_or_else(|| bad("unclosed '('"))?;
            let body = &compact[pos + 1..close];
            let coeff = parse_rational(body)
                .ok_or_else(|| bad("malformed rational coefficient"))?;
            pos = close + 1;
            let mut power = 0u32;
            if pos < bytes.len() && bytes[pos] == b'w' {
                pos += 1;
                power = 1;
                if pos < bytes.len() && bytes[pos] == b'^' {
                    pos += 1;
                    let end = compact[pos..]
                        .find(|c: char| !c.is_ascii_digit())
                        .map(|o| pos + o)
                        .unwrap_or(compact.len());
                    if end == pos {
                        return Err(bad("missing exponent after '^'"));
                    }
                    power = compact[pos..end]
                        .parse::<u32>()
                        .map_err(|_| bad("exponent out of range"))?;
                    pos = end;
                }
            }
            let coeff = if negative { -coeff } else { coeff };
            acc += CycNum::root_power(m, power % m).scaled(&coeff);
        }
        Ok(acc)
    }
}

/// Parse "a" or "a/b" into a rational; also used for mass strings in measure
/// files.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let n: BigInt = num.parse().ok()?;
    match den {
        None => Some(BigRational::from(n)),
        Some(d) => {
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

// Dense rational polynomial helpers for the extended Euclidean algorithm.
// Vectors are by ascending power with no trailing zeros; empty means zero.

fn poly_trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    poly_trim(out)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly_trim(out)
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut rem = a.to_vec();
    if a.len() < b.len() {
        return (vec![], poly_trim(rem));
    }
    let mut quot = vec![BigRational::zero(); a.len() - b.len() + 1];
    let lead = b.last().unwrap();
    for i in (b.len() - 1..a.len()).rev() {
        let c = &rem[i] / lead;
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            let delta = &c * bj;
            rem[i - (b.len() - 1) + j] -= delta;
        }
        quot[i - (b.len() - 1)] = c;
    }
    (poly_trim(quot), poly_trim(rem))
}

macro_rules! forward_ref_binop {
    ($trait:ident, $method:ident, $delegate:ident) => {
        impl $trait for &CycNum {
            type Output = CycNum;
            fn $method(self, rhs: &CycNum) -> CycNum {
                self.$delegate(rhs)
                    .expect("modulus mismatch; use the try_* methods for fallible arithmetic")
            }
        }

        impl $trait for CycNum {
            type Output = CycNum;
            fn $method(self, rhs: CycNum) -> CycNum {
                (&self).$method(&rhs)
            }
        }

        impl $trait<&CycNum> for CycNum {
            type Output = CycNum;
            fn $method(self, rhs: &CycNum) -> CycNum {
                (&self).$method(rhs)
            }
        }
    };
}

forward_ref_binop!(Add, add, try_add);
forward_ref_binop!(Sub, sub, try_sub);
forward_ref_binop!(Mul, mul, try_mul);

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

impl AddAssign<CycNum> for CycNum {
    fn add_assign(&mut self, rhs: CycNum) {
        *self = &*self + &rhs;
    }
}

impl fmt::Display for CycNum {
    /// Canonical rendering over the power basis: `(1/8)+(1/8)w`, `-(1/2)w^2`,
    /// `0`. Integer coefficients drop the denominator: `(2)w`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match (wrote, c.cmp(&BigRational::zero())) {
                (false, Ordering::Less) => write!(f, "-")?,
                (false, _) => {}
                (true, Ordering::Less) => write!(f, "-")?,
                (true, _) => write!(f, "+")?,
            }
            let a = c.abs();
            if a.denom().is_one() {
                write!(f, "({})", a.numer())?;
            } else {
                write!(f, "({}/{})", a.numer(), a.denom())?;
            }
            match j {
                0 => {}
                1 => write!(f, "w")?,
                _ => write!(f, "w^{j}")?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}
