//! Exact arithmetic in cyclotomic fields Q(zeta_n).
//!
//! Elements are stored in the power basis 1, zeta, ..., zeta^(phi(n)-1) of
//! Q[x]/(Phi_n(x)) with exact rational coefficients, so equality, inner
//! products and indicator sums are decided with zero tolerance. Values of
//! different ambient orders compare by embedding into the lcm order.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num::{BigInt, BigRational, One, Signed, Zero};
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Largest permitted ambient order.
pub const ORDER_BOUND: u64 = 1 << 16;

fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Euler phi.
fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Per-order reduction data: the monic cyclotomic polynomial Phi_n and the
/// basis expansion of every power zeta^k, 0 <= k < n.
struct OrderData {
    phi: usize,
    /// Coefficients of Phi_n except the leading 1 (degree phi).
    min_poly_tail: Vec<BigInt>,
    /// zeta^k in the power basis, one row of length phi per k in 0..n.
    zeta_pow: Vec<Vec<Rat>>,
}

static ORDER_CACHE: Lazy<Mutex<HashMap<u32, Arc<OrderData>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Integer polynomial product.
fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Exact division of integer polynomials (remainder must vanish).
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    assert!(lead.is_one(), "divisor must be monic");
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        let qi = i - dd;
        quot[qi] = c.clone();
        for (j, dj) in den.iter().enumerate() {
            rem[qi + j] -= &c * dj;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "division not exact");
    quot
}

/// Phi_n(x) = (x^n - 1) / prod_{d | n, d < n} Phi_d(x), computed recursively.
fn cyclotomic_poly(n: u64, memo: &mut HashMap<u64, Vec<BigInt>>) -> Vec<BigInt> {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    let mut den = vec![BigInt::one()];
    for d in 1..n {
        if n % d == 0 {
            den = poly_mul(&den, &cyclotomic_poly(d, memo));
        }
    }
    let p = poly_div_exact(&num, &den);
    memo.insert(n, p.clone());
    p
}

fn order_data(n: u32) -> Arc<OrderData> {
    let mut cache = ORDER_CACHE.lock().unwrap();
    if let Some(d) = cache.get(&n) {
        return d.clone();
    }
    let mut memo = HashMap::new();
    let poly = cyclotomic_poly(n as u64, &mut memo);
    let phi = poly.len() - 1;
    debug_assert_eq!(phi as u64, euler_phi(n as u64));
    let min_poly_tail: Vec<BigInt> = poly[..phi].to_vec();
    // zeta^k rows: start from zeta^0 and repeatedly multiply by zeta,
    // rewriting zeta^phi = -tail.
    let mut zeta_pow = Vec::with_capacity(n as usize);
    let mut row = vec![Rat::zero(); phi];
    row[0] = Rat::one();
    zeta_pow.push(row.clone());
    for _ in 1..n {
        let top = row[phi - 1].clone();
        for i in (1..phi).rev() {
            row[i] = row[i - 1].clone();
        }
        row[0] = Rat::zero();
        if !top.is_zero() {
            for i in 0..phi {
                row[i] -= &top * Rat::from_integer(min_poly_tail[i].clone());
            }
        }
        zeta_pow.push(row.clone());
    }
    let data = Arc::new(OrderData {
        phi,
        min_poly_tail,
        zeta_pow,
    });
    cache.insert(n, data.clone());
    data
}

/// An exact element of Q(zeta_n).
#[derive(Clone)]
pub struct Cyclo {
    order: u32,
    /// Power-basis coefficients, length phi(order).
    coeffs: Vec<Rat>,
}

impl Cyclo {
    fn check_order(n: u64) -> Result<u32> {
        if n == 0 || n > ORDER_BOUND {
            return Err(Error::OrderOverflow(n, ORDER_BOUND));
        }
        Ok(n as u32)
    }

    pub fn zero() -> Self {
        Cyclo {
            order: 1,
            coeffs: vec![Rat::zero()],
        }
    }

    pub fn one() -> Self {
        Cyclo::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        Cyclo {
            order: 1,
            coeffs: vec![r],
        }
    }

    pub fn from_int(n: i64) -> Self {
        Cyclo::from_rat(rat(n))
    }

    /// zeta_n^k.
    pub fn root_of_unity(n: u64, k: i64) -> Result<Self> {
        let order = Self::check_order(n)?;
        let data = order_data(order);
        let k = k.rem_euclid(n as i64) as usize;
        Ok(Cyclo {
            order,
            coeffs: data.zeta_pow[k].clone(),
        })
    }

    /// Sum of mult_j * zeta_n^j.
    pub fn from_root_combination(n: u64, terms: &[(usize, i64)]) -> Result<Self> {
        let order = Self::check_order(n)?;
        let data = order_data(order);
        let mut coeffs = vec![Rat::zero(); data.phi];
        for &(j, m) in terms {
            if m == 0 {
                continue;
            }
            let row = &data.zeta_pow[j % n as usize];
            let mr = rat(m);
            for i in 0..data.phi {
                coeffs[i] += &mr * &row[i];
            }
        }
        Ok(Cyclo { order, coeffs })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Rational part if the value is rational, else None.
    pub fn as_rational(&self) -> Option<Rat> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        let r = self.as_rational()?;
        if r.denom().is_one() {
            Some(r.numer().clone())
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().map(|r| r.is_one()).unwrap_or(false)
    }

    /// Embed into Q(zeta_m) for order | m.
    pub fn lift_to(&self, m: u32) -> Result<Cyclo> {
        if m == self.order {
            return Ok(self.clone());
        }
        assert_eq!(m % self.order, 0, "target order must be a multiple");
        Self::check_order(m as u64)?;
        let data = order_data(m);
        let step = (m / self.order) as usize;
        let mut coeffs = vec![Rat::zero(); data.phi];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &data.zeta_pow[(j * step) % m as usize];
            for i in 0..data.phi {
                coeffs[i] += c * &row[i];
            }
        }
        Ok(Cyclo { order: m, coeffs })
    }

    fn common_order(&self, other: &Cyclo) -> Result<(Cyclo, Cyclo, u32)> {
        let n = num::integer::lcm(self.order as u64, other.order as u64);
        let n = Self::check_order(n)?;
        Ok((self.lift_to(n)?, other.lift_to(n)?, n))
    }

    /// Galois action zeta -> zeta^k for gcd(k, order) = 1.
    pub fn galois(&self, k: u64) -> Cyclo {
        let n = self.order as u64;
        let k = k % n;
        assert_eq!(num::integer::gcd(k, n), 1, "galois exponent must be coprime");
        let data = order_data(self.order);
        let mut coeffs = vec![Rat::zero(); data.phi];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &data.zeta_pow[(j as u64 * k % n) as usize];
            for i in 0..data.phi {
                coeffs[i] += c * &row[i];
            }
        }
        Cyclo {
            order: self.order,
            coeffs,
        }
    }

    /// Complex conjugation (zeta -> zeta^{-1}).
    pub fn conj(&self) -> Cyclo {
        if self.order == 1 {
            return self.clone();
        }
        self.galois(self.order as u64 - 1)
    }

    pub fn scale(&self, r: &Rat) -> Cyclo {
        Cyclo {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in Q[x]
    /// against Phi_n, which is irreducible over Q.
    pub fn inverse(&self) -> Result<Cyclo> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Cyclo::from_rat(r.recip()));
        }
        let data = order_data(self.order);
        // r0 = Phi_n, r1 = self (as rational polys).
        let mut r0: Vec<Rat> = data
            .min_poly_tail
            .iter()
            .map(|c| Rat::from_integer(c.clone()))
            .chain(std::iter::once(Rat::one()))
            .collect();
        let mut r1 = self.coeffs.clone();
        trim(&mut r1);
        let mut s0: Vec<Rat> = vec![];
        let mut s1: Vec<Rat> = vec![Rat::one()];
        while !r1.is_empty() {
            let (q, r) = rat_poly_divmod(&r0, &r1);
            let s = rat_poly_sub(&s0, &rat_poly_mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 is now a nonzero constant gcd; inverse = s0 / r0.
        debug_assert_eq!(r0.len(), 1);
        let c = r0[0].recip();
        let mut coeffs = vec![Rat::zero(); data.phi];
        for (i, v) in s0.iter().enumerate() {
            coeffs[i] = v * &c;
        }
        Ok(Cyclo {
            order: self.order,
            coeffs,
        })
    }

    pub fn div(&self, other: &Cyclo) -> Result<Cyclo> {
        let (a, b, _) = self.common_order(other)?;
        Ok(&a * &b.inverse()?)
    }

    /// Deterministic total order used for canonical sorting of character
    /// rows: compare coefficient vectors after lifting to a common order,
    /// larger leading coefficient first.
    pub fn sort_cmp(&self, other: &Cyclo) -> Ordering {
        let (a, b, _) = self.common_order(other).expect("order bound");
        for (x, y) in a.coeffs.iter().zip(b.coeffs.iter()) {
            match x.cmp(y) {
                Ordering::Equal => continue,
                ord => return ord.reverse(),
            }
        }
        Ordering::Equal
    }
}

fn trim(p: &mut Vec<Rat>) {
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

fn rat_poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    trim(&mut out);
    out
}

fn rat_poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len().max(b.len())];
    for (i, v) in a.iter().enumerate() {
        out[i] += v;
    }
    for (i, v) in b.iter().enumerate() {
        out[i] -= v;
    }
    trim(&mut out);
    out
}

fn rat_poly_divmod(num: &[Rat], den: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    if rem.len() <= dd {
        return (vec![], rem);
    }
    let mut quot = vec![Rat::zero(); rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = &rem[i] / &lead;
        if c.is_zero() {
            continue;
        }
        let qi = i - dd;
        quot[qi] = c.clone();
        for (j, dj) in den.iter().enumerate() {
            let t = &c * dj;
            rem[qi + j] -= t;
        }
    }
    trim(&mut rem);
    trim(&mut quot);
    (quot, rem)
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b, _) = self.common_order(other).expect("order bound");
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyclo {}

impl Add for &Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: &Cyclo) -> Cyclo {
        let (mut a, b, _) = self.common_order(rhs).expect("order bound");
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x += y;
        }
        a
    }
}

impl Sub for &Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: &Cyclo) -> Cyclo {
        let (mut a, b, _) = self.common_order(rhs).expect("order bound");
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x -= y;
        }
        a
    }
}

impl Neg for &Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: &Cyclo) -> Cyclo {
        // Fast paths for rational factors keep hot loops cheap.
        if let Some(r) = self.as_rational() {
            if self.order == 1 || rhs.order % self.order == 0 {
                return rhs.scale(&r);
            }
        }
        if let Some(r) = rhs.as_rational() {
            if rhs.order == 1 || self.order % rhs.order == 0 {
                return self.scale(&r);
            }
        }
        let (a, b, n) = self.common_order(rhs).expect("order bound");
        let data = order_data(n);
        let phi = data.phi;
        // Convolve, then rewrite powers >= phi using the cached rows.
        let mut conv = vec![Rat::zero(); 2 * phi - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                conv[i + j] += x * y;
            }
        }
        let mut coeffs: Vec<Rat> = conv[..phi].to_vec();
        for k in phi..conv.len() {
            if conv[k].is_zero() {
                continue;
            }
            let row = &data.zeta_pow[k % n as usize];
            for i in 0..phi {
                coeffs[i] += &conv[k] * &row[i];
            }
        }
        Cyclo { order: n, coeffs }
    }
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if j == 0 {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                if j == 1 {
                    write!(f, "z{}", self.order)?;
                } else {
                    write!(f, "z{}^{}", self.order, j)?;
                }
            }
        }
        Ok(())
    }
}

/// JSON form: ambient order plus "p/q" strings per basis coefficient.
#[derive(Serialize, Deserialize)]
struct CycloRepr {
    order: u32,
    coeffs: Vec<String>,
}

impl Serialize for Cyclo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycloRepr {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cyclo {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CycloRepr::deserialize(d)?;
        let phi = euler_phi(repr.order as u64) as usize;
        if repr.coeffs.len() != phi {
            return Err(serde::de::Error::custom("wrong basis length"));
        }
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| s.parse::<Rat>().map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Cyclo {
            order: repr.order,
            coeffs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeta(n: u64, k: i64) -> Cyclo {
        Cyclo::root_of_unity(n, k).unwrap()
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = zeta(4, 1);
        assert_eq!(&i * &i, Cyclo::from_int(-1));
    }

    #[test]
    fn primitive_cube_roots_sum_to_minus_one() {
        let w = zeta(3, 1);
        let w2 = zeta(3, 2);
        assert_eq!(&w + &w2, Cyclo::from_int(-1));
    }

    #[test]
    fn equality_across_orders() {
        assert_eq!(zeta(6, 2), zeta(3, 1));
        assert_ne!(zeta(6, 1), zeta(3, 1));
        assert_eq!(zeta(8, 2), zeta(4, 1));
    }

    #[test]
    fn rational_round_trip() {
        let r: Rat = "7/3".parse().unwrap();
        let c = Cyclo::from_rat(r.clone());
        assert_eq!(c.as_rational(), Some(r));
    }

    #[test]
    fn conjugation_involution_and_fixes_rationals() {
        let x = &zeta(8, 1) + &zeta(8, 3).scale(&"2/5".parse().unwrap());
        assert_eq!(x.conj().conj(), x);
        let r = Cyclo::from_rat("9/4".parse().unwrap());
        assert_eq!(r.conj(), r);
    }

    #[test]
    fn division_and_errors() {
        let x = &zeta(5, 1) + &Cyclo::from_int(3);
        let inv = x.inverse().unwrap();
        assert_eq!(&x * &inv, Cyclo::one());
        assert_eq!(Cyclo::zero().inverse(), Err(Error::DivisionByZero));
        assert!(matches!(
            Cyclo::root_of_unity(ORDER_BOUND + 1, 1),
            Err(Error::OrderOverflow(..))
        ));
    }

    #[test]
    fn galois_permutes_roots_and_fixes_rationals() {
        for n in [5u64, 8, 12] {
            for k in 1..n {
                if num::integer::gcd(k, n) != 1 {
                    continue;
                }
                assert_eq!(zeta(n, 1).galois(k), zeta(n, k as i64));
                let r = Cyclo::from_rat("3/7".parse().unwrap());
                assert_eq!(r.lift_to(n as u32).unwrap().galois(k), r);
            }
        }
    }

    #[test]
    fn serde_round_trip() {
        let x = &zeta(12, 5) - &Cyclo::from_rat("2/3".parse().unwrap());
        let json = serde_json::to_string(&x).unwrap();
        let back: Cyclo = serde_json::from_str(&json).unwrap();
        assert_eq!(x, back);
    }
}
