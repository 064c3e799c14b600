//! Exact arithmetic in Q(zeta_7), its Galois group, and relative traces.
//!
//! Elements are stored in the power basis {1, z, ..., z^5} of Q[z]/(Phi_7),
//! Phi_7(z) = z^6 + z^5 + ... + 1, so z^6 = -(1 + z + ... + z^5) is applied
//! eagerly and equality is coefficientwise.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat_i64(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Element of Q(zeta_7) as c0 + c1*z + ... + c5*z^5 with z a primitive
/// 7th root of unity (the paper's rho).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycScalar {
    c: [Rat; 6],
}

impl CycScalar {
    pub fn zero() -> Self {
        CycScalar {
            c: std::array::from_fn(|_| Rat::zero()),
        }
    }

    pub fn one() -> Self {
        Self::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        let mut s = Self::zero();
        s.c[0] = r;
        s
    }

    pub fn from_i64(n: i64) -> Self {
        Self::from_rat(rat_i64(n))
    }

    /// rho
    pub fn rho() -> Self {
        Self::rho_pow(1)
    }

    /// rho^k for any integer k, in canonical form.
    pub fn rho_pow(k: i64) -> Self {
        let k = k.rem_euclid(7) as usize;
        let mut v: [Rat; 7] = std::array::from_fn(|_| Rat::zero());
        v[k] = Rat::one();
        Self::from_pow7(v)
    }

    /// sqrt(-7) represented as 1 + 2(rho + rho^2 + rho^4).
    pub fn sqrt_minus7() -> Self {
        let mut s = Self::one();
        for k in [1, 2, 4] {
            s.c[k] = rat_i64(2);
        }
        s
    }

    /// Collapse a vector of coefficients of 1, z, ..., z^6 (z^7 = 1 already
    /// folded) to the canonical 6-coefficient form.
    fn from_pow7(v: [Rat; 7]) -> Self {
        let mut c: [Rat; 6] = std::array::from_fn(|_| Rat::zero());
        for i in 0..6 {
            c[i] = &v[i] - &v[6];
        }
        CycScalar { c }
    }

    pub fn coeff(&self, i: usize) -> &Rat {
        &self.c[i]
    }

    pub fn coeffs(&self) -> &[Rat; 6] {
        &self.c
    }

    pub fn from_coeffs(c: [Rat; 6]) -> Self {
        CycScalar { c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(|x| x.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.c[1..].iter().all(|x| x.is_zero())
    }

    /// The rational part, i.e. the full value when `is_rational`.
    pub fn rational_part(&self) -> &Rat {
        &self.c[0]
    }

    pub fn scale(&self, r: &Rat) -> Self {
        CycScalar {
            c: std::array::from_fn(|i| &self.c[i] * r),
        }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        // Convolve mod z^7 - 1, then canonicalize. Exponents i+j land in
        // 0..=10 and fold back by 7.
        let mut v: [Rat; 7] = std::array::from_fn(|_| Rat::zero());
        for i in 0..6 {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..6 {
                if other.c[j].is_zero() {
                    continue;
                }
                let k = (i + j) % 7;
                v[k] = &v[k] + &(&self.c[i] * &other.c[j]);
            }
        }
        Self::from_pow7(v)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in Q[z]
    /// against Phi_7.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // Represent self as a polynomial of degree <= 5.
        let a: Vec<Rat> = self.c.to_vec();
        let phi: Vec<Rat> = vec![Rat::one(); 7];
        let (g, s) = ext_gcd_mod(&a, &phi);
        // g is a nonzero constant since Phi_7 is irreducible over Q.
        debug_assert!(g.len() == 1 && !g[0].is_zero());
        let ginv = Rat::one() / &g[0];
        let mut c: [Rat; 6] = std::array::from_fn(|_| Rat::zero());
        for (i, coeff) in s.iter().enumerate() {
            c[i] = coeff * &ginv;
        }
        Ok(CycScalar { c })
    }

    pub fn div_ref(&self, other: &Self) -> Result<Self> {
        Ok(self.mul_ref(&other.inverse()?))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    /// Apply sigma^k, the Galois map sending rho to rho^(3^k).
    pub fn galois(&self, g: GaloisElem) -> Self {
        let m = g.rho_exponent_multiplier();
        let mut v: [Rat; 7] = std::array::from_fn(|_| Rat::zero());
        for i in 0..6 {
            if self.c[i].is_zero() {
                continue;
            }
            let k = (i * m) % 7;
            v[k] = &v[k] + &self.c[i];
        }
        Self::from_pow7(v)
    }

    /// Complex conjugation; coincides with sigma^3 since sigma^3(rho) = rho^6.
    pub fn conj(&self) -> Self {
        self.galois(GaloisElem::new(3))
    }

    /// Sum of g(self) over the subgroup.
    pub fn relative_trace(&self, subgroup: Subgroup) -> Self {
        let mut acc = Self::zero();
        for g in subgroup.elements() {
            acc = &acc + &self.galois(g);
        }
        acc
    }

    /// True iff fixed by the Galois subgroup cutting out the given level.
    pub fn in_subfield(&self, level: FieldLevel) -> bool {
        match level {
            FieldLevel::Q => self.galois(GaloisElem::new(1)) == *self,
            FieldLevel::QSqrtMinus7 => self.galois(GaloisElem::new(2)) == *self,
            FieldLevel::Q7 => true,
        }
    }

    /// Text form over symbol `r`, e.g. `1/2 - 3*r^2`.
    pub fn to_text(&self) -> String {
        format!("{}", self)
    }

    pub fn parse(input: &str) -> Result<Self> {
        crate::expr::parse_scalar(input)
    }
}

fn trim_poly(v: &mut Vec<Rat>) {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
}

/// Extended Euclid: returns (g, s) with s*a = g (mod m), g the gcd.
fn ext_gcd_mod(a: &[Rat], m: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut r0: Vec<Rat> = m.to_vec();
    let mut r1: Vec<Rat> = a.to_vec();
    trim_poly(&mut r0);
    trim_poly(&mut r1);
    let mut s0: Vec<Rat> = vec![];
    let mut s1: Vec<Rat> = vec![Rat::one()];
    while !r1.is_empty() {
        let (q, rem) = poly_divmod(&r0, &r1);
        let s_next = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = r1;
        r1 = rem;
        s0 = s1;
        s1 = s_next;
    }
    (r0, s0)
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(ai * bj);
        }
    }
    trim_poly(&mut out);
    out
}

fn poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len().max(b.len())];
    for (i, ai) in a.iter().enumerate() {
        out[i] = ai.clone();
    }
    for (i, bi) in b.iter().enumerate() {
        out[i] = &out[i] - bi;
    }
    trim_poly(&mut out);
    out
}

fn poly_divmod(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut rem = a.to_vec();
    if a.len() < b.len() {
        return (vec![], rem);
    }
    let mut quo = vec![Rat::zero(); a.len() - b.len() + 1];
    let lead = b.last().unwrap();
    while rem.len() >= b.len() {
        let d = rem.len() - b.len();
        let q = rem.last().unwrap() / lead;
        quo[d] = q.clone();
        for (i, bi) in b.iter().enumerate() {
            rem[d + i] = &rem[d + i] - &(&q * bi);
        }
        trim_poly(&mut rem);
        if rem.is_empty() {
            break;
        }
        if rem.len() < b.len() {
            break;
        }
    }
    (quo, rem)
}

impl Add for &CycScalar {
    type Output = CycScalar;
    fn add(self, rhs: &CycScalar) -> CycScalar {
        CycScalar {
            c: std::array::from_fn(|i| &self.c[i] + &rhs.c[i]),
        }
    }
}

impl Sub for &CycScalar {
    type Output = CycScalar;
    fn sub(self, rhs: &CycScalar) -> CycScalar {
        CycScalar {
            c: std::array::from_fn(|i| &self.c[i] - &rhs.c[i]),
        }
    }
}

impl Mul for &CycScalar {
    type Output = CycScalar;
    fn mul(self, rhs: &CycScalar) -> CycScalar {
        self.mul_ref(rhs)
    }
}

impl Neg for &CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        CycScalar {
            c: std::array::from_fn(|i| -self.c[i].clone()),
        }
    }
}

impl fmt::Display for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_coeff = abs.is_one() && i > 0;
            if !unit_coeff {
                write!(f, "{}", abs)?;
            }
            if i > 0 {
                if !unit_coeff {
                    write!(f, "*")?;
                }
                if i == 1 {
                    write!(f, "r")?;
                } else {
                    write!(f, "r^{}", i)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycScalar({})", self)
    }
}

impl Serialize for CycScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = self.c.iter().map(|r| r.to_string()).collect();
        strs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CycScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let strs: Vec<String> = Vec::deserialize(deserializer)?;
        if strs.len() != 6 {
            return Err(D::Error::custom("expected 6 coefficients"));
        }
        let mut c: [Rat; 6] = std::array::from_fn(|_| Rat::zero());
        for (i, s) in strs.iter().enumerate() {
            c[i] = s
                .parse::<Rat>()
                .map_err(|e| D::Error::custom(format!("bad rational `{}`: {}", s, e)))?;
        }
        Ok(CycScalar { c })
    }
}

/// sigma^k in Gal(Q(rho)/Q) = <sigma> with sigma(rho) = rho^3.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct GaloisElem {
    k: u8,
}

impl GaloisElem {
    pub fn new(k: i64) -> Self {
        GaloisElem {
            k: k.rem_euclid(6) as u8,
        }
    }

    pub fn identity() -> Self {
        GaloisElem { k: 0 }
    }

    /// Complex conjugation, sigma^3.
    pub fn conjugation() -> Self {
        GaloisElem { k: 3 }
    }

    pub fn exponent(&self) -> u8 {
        self.k
    }

    pub fn is_identity(&self) -> bool {
        self.k == 0
    }

    pub fn compose(&self, other: GaloisElem) -> Self {
        GaloisElem {
            k: (self.k + other.k) % 6,
        }
    }

    pub fn inverse(&self) -> Self {
        GaloisElem { k: (6 - self.k) % 6 }
    }

    /// sigma^k sends rho^i to rho^(i * 3^k mod 7).
    pub fn rho_exponent_multiplier(&self) -> usize {
        let mut m = 1usize;
        for _ in 0..self.k {
            m = (m * 3) % 7;
        }
        m
    }

    pub fn all() -> [GaloisElem; 6] {
        std::array::from_fn(|k| GaloisElem { k: k as u8 })
    }
}

impl fmt::Display for GaloisElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.k {
            0 => write!(f, "e"),
            1 => write!(f, "s"),
            k => write!(f, "s^{}", k),
        }
    }
}

/// The three subgroups the descent uses: {e}, N = <sigma^2> and the full group.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Subgroup {
    Trivial,
    N,
    Full,
}

impl Subgroup {
    pub fn elements(self) -> Vec<GaloisElem> {
        match self {
            Subgroup::Trivial => vec![GaloisElem::identity()],
            Subgroup::N => vec![GaloisElem::new(0), GaloisElem::new(2), GaloisElem::new(4)],
            Subgroup::Full => GaloisElem::all().to_vec(),
        }
    }

    /// Classify a set of elements as one of the supported subgroups.
    pub fn from_elements(elems: &[GaloisElem]) -> Result<Self> {
        let mut ks: Vec<u8> = elems.iter().map(|g| g.exponent()).collect();
        ks.sort_unstable();
        ks.dedup();
        match ks.as_slice() {
            [0] => Ok(Subgroup::Trivial),
            [0, 2, 4] => Ok(Subgroup::N),
            [0, 1, 2, 3, 4, 5] => Ok(Subgroup::Full),
            _ => Err(Error::NotSubgroup),
        }
    }

    /// The field level fixed by this subgroup.
    pub fn fixed_level(self) -> FieldLevel {
        match self {
            Subgroup::Trivial => FieldLevel::Q7,
            Subgroup::N => FieldLevel::QSqrtMinus7,
            Subgroup::Full => FieldLevel::Q,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum FieldLevel {
    #[serde(rename = "Q")]
    Q,
    #[serde(rename = "Qsqrt-7")]
    QSqrtMinus7,
    #[serde(rename = "Q7")]
    Q7,
}

/// Arithmetic entry point matching the operation table: one of add, sub,
/// mul, div on scalars.
pub fn cyc_arith(a: &CycScalar, b: &CycScalar, op: ArithOp) -> Result<CycScalar> {
    match op {
        ArithOp::Add => Ok(a + b),
        ArithOp::Sub => Ok(a - b),
        ArithOp::Mul => Ok(a * b),
        ArithOp::Div => a.div_ref(b),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s() -> CycScalar {
        // rho + rho^2 + rho^4
        &(&CycScalar::rho_pow(1) + &CycScalar::rho_pow(2)) + &CycScalar::rho_pow(4)
    }

    #[test]
    fn rho_seventh_power_is_one() {
        // zeta * zeta^6 (canonical) = 1
        let z6 = CycScalar::rho_pow(6);
        let prod = &CycScalar::rho() * &z6;
        assert!(prod.is_one());
    }

    #[test]
    fn phi7_relation() {
        // 1 + zeta + ... + zeta^5 added to canonical zeta^6 gives 0
        let mut sum = CycScalar::zero();
        for k in 0..=5 {
            sum = &sum + &CycScalar::rho_pow(k);
        }
        let total = &sum + &CycScalar::rho_pow(6);
        assert!(total.is_zero());
    }

    #[test]
    fn inverse_of_rho_minus_one() {
        let a = &CycScalar::rho() - &CycScalar::one();
        let inv = a.inverse().unwrap();
        assert!((&inv * &a).is_one());
    }

    #[test]
    fn galois_action_on_rho() {
        let sigma = GaloisElem::new(1);
        assert_eq!(CycScalar::rho().galois(sigma), CycScalar::rho_pow(3));
        let sigma3 = GaloisElem::new(3);
        assert_eq!(CycScalar::rho().galois(sigma3), CycScalar::rho_pow(6));
        // sigma^6 = identity on a sample value
        let a = &CycScalar::rho_pow(2) + &CycScalar::from_rat(rat_frac(5, 3));
        assert_eq!(a.galois(GaloisElem::new(6)), a);
    }

    #[test]
    fn full_trace_of_rho() {
        let t = CycScalar::rho().relative_trace(Subgroup::Full);
        assert_eq!(t, CycScalar::from_i64(-1));
    }

    #[test]
    fn n_trace_of_rho() {
        let t = CycScalar::rho().relative_trace(Subgroup::N);
        assert_eq!(t, s());
    }

    #[test]
    fn trivial_trace_is_identity() {
        let a = &CycScalar::rho_pow(3) - &CycScalar::from_rat(rat_frac(2, 7));
        assert_eq!(a.relative_trace(Subgroup::Trivial), a);
    }

    #[test]
    fn subfield_membership() {
        assert!(s().in_subfield(FieldLevel::QSqrtMinus7));
        assert!(!CycScalar::rho().in_subfield(FieldLevel::QSqrtMinus7));
        assert!(!s().in_subfield(FieldLevel::Q));
        // (2s+1)^2 = -7, a rational
        let sq = CycScalar::sqrt_minus7().pow(2);
        assert!(sq.in_subfield(FieldLevel::Q));
        assert_eq!(sq, CycScalar::from_i64(-7));
    }

    #[test]
    fn subgroup_classification() {
        assert_eq!(
            Subgroup::from_elements(&[GaloisElem::new(0), GaloisElem::new(4), GaloisElem::new(2)])
                .unwrap(),
            Subgroup::N
        );
        assert!(Subgroup::from_elements(&[GaloisElem::new(1)]).is_err());
        assert!(Subgroup::from_elements(&[GaloisElem::new(0), GaloisElem::new(3)]).is_err());
    }

    #[test]
    fn display_round_trip() {
        let a = CycScalar::from_coeffs([
            rat_frac(1, 2),
            rat_i64(0),
            rat_i64(-3),
            rat_i64(0),
            rat_i64(1),
            rat_frac(-2, 5),
        ]);
        assert_eq!(a.to_text(), "1/2 - 3*r^2 + r^4 - 2/5*r^5");
    }

    #[test]
    fn serde_round_trip() {
        let a = &CycScalar::rho_pow(5) - &CycScalar::from_rat(rat_frac(7, 3));
        let json = serde_json::to_string(&a).unwrap();
        let b: CycScalar = serde_json::from_str(&json).unwrap();
        assert_eq!(a, b);
    }
}
