//! Dense univariate polynomials and rational functions over Q(zeta_7).
//!
//! Rational functions are kept in canonical form: gcd(num, den) = 1 and the
//! denominator monic, so equality is plain coefficient comparison.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::cyclotomic::{CycScalar, GaloisElem};
use crate::error::{Error, Result};

/// Hard cap on intermediate degrees; everything in this artifact stays far
/// below (the heaviest object is degree 18 before clearing).
pub const DEGREE_LIMIT: usize = 4096;

#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    /// coeffs[i] is the coefficient of x^i; no trailing zeros.
    coeffs: Vec<CycScalar>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(CycScalar::one())
    }

    pub fn constant(c: CycScalar) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            UniPoly { coeffs: vec![c] }
        }
    }

    pub fn x() -> Self {
        UniPoly {
            coeffs: vec![CycScalar::zero(), CycScalar::one()],
        }
    }

    pub fn from_coeffs(mut coeffs: Vec<CycScalar>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    /// (x - root)
    pub fn linear_root(root: &CycScalar) -> Self {
        UniPoly {
            coeffs: vec![-root, CycScalar::one()],
        }
    }

    pub fn coeffs(&self) -> &[CycScalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> CycScalar {
        self.coeffs.get(i).cloned().unwrap_or_else(CycScalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> CycScalar {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(CycScalar::zero)
    }

    fn check_degree(d: usize) -> Result<()> {
        if d > DEGREE_LIMIT {
            Err(Error::DegreeLimit {
                degree: d,
                limit: DEGREE_LIMIT,
            })
        } else {
            Ok(())
        }
    }

    pub fn try_mul(&self, rhs: &UniPoly) -> Result<UniPoly> {
        if self.is_zero() || rhs.is_zero() {
            return Ok(Self::zero());
        }
        Self::check_degree(self.degree() + rhs.degree())?;
        let mut out = vec![CycScalar::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = &out[i + j] + &a.mul_ref(b);
            }
        }
        Ok(Self::from_coeffs(out))
    }

    pub fn scale(&self, c: &CycScalar) -> UniPoly {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|a| a.mul_ref(c)).collect())
    }

    pub fn pow(&self, e: u32) -> Result<UniPoly> {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Euclidean division: self = q * d + r with deg r < deg d.
    pub fn div_rem(&self, d: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.degree() < d.degree() || self.is_zero() {
            return Ok((Self::zero(), self.clone()));
        }
        let lead_inv = d.leading().inverse()?;
        let mut rem = self.coeffs.clone();
        let mut quo = vec![CycScalar::zero(); self.degree() - d.degree() + 1];
        while rem.len() >= d.coeffs.len() && !rem.is_empty() {
            let q = rem.last().unwrap().mul_ref(&lead_inv);
            let shift = rem.len() - d.coeffs.len();
            quo[shift] = q.clone();
            for (i, dc) in d.coeffs.iter().enumerate() {
                let t = q.mul_ref(dc);
                rem[shift + i] = &rem[shift + i] - &t;
            }
            while rem.last().map_or(false, |c| c.is_zero()) {
                rem.pop();
            }
        }
        Ok((Self::from_coeffs(quo), Self::from_coeffs(rem)))
    }

    /// Monic gcd via the subresultant pseudo-remainder sequence over
    /// Z[zeta_7], which keeps coefficient growth polynomial where the naive
    /// Euclid over Q explodes.
    pub fn gcd(&self, other: &UniPoly) -> Result<UniPoly> {
        if self.is_zero() {
            if other.is_zero() {
                return Ok(UniPoly::zero());
            }
            let inv = other.leading().inverse()?;
            return Ok(other.scale(&inv));
        }
        if other.is_zero() {
            let inv = self.leading().inverse()?;
            return Ok(self.scale(&inv));
        }
        if self.is_constant() || other.is_constant() {
            return Ok(UniPoly::one());
        }
        let mut a = self.primitive_integral();
        let mut b = other.primitive_integral();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        let mut g = CycScalar::one();
        let mut h = CycScalar::one();
        let result = loop {
            let delta = (a.degree() - b.degree()) as u32;
            let r = a.pseudo_rem(&b)?;
            if r.is_zero() {
                break b;
            }
            if r.is_constant() {
                return Ok(UniPoly::one());
            }
            // The subresultant divisor g*h^delta divides exactly.
            let divisor = g.mul_ref(&h.pow(delta));
            let dinv = divisor.inverse()?;
            let next = r.scale(&dinv);
            a = b;
            b = next;
            g = a.leading();
            h = if delta == 0 {
                h
            } else {
                g.pow(delta).div_ref(&h.pow(delta - 1))?
            };
        };
        let result = result.primitive_integral();
        let inv = result.leading().inverse()?;
        Ok(result.scale(&inv))
    }

    /// Clear coordinate denominators and divide out the integer content,
    /// leaving coefficients in Z[zeta_7] with content 1.
    fn primitive_integral(&self) -> UniPoly {
        use num::{BigInt, One as _, Signed, Zero as _};
        if self.is_zero() {
            return UniPoly::zero();
        }
        let mut den_lcm = BigInt::one();
        for c in &self.coeffs {
            for r in c.coeffs() {
                if !r.is_zero() {
                    den_lcm = num::integer::lcm(den_lcm, r.denom().abs());
                }
            }
        }
        let mut num_gcd = BigInt::zero();
        let scaled: Vec<CycScalar> = self
            .coeffs
            .iter()
            .map(|c| c.scale(&crate::cyclotomic::Rat::from_integer(den_lcm.clone())))
            .collect();
        for c in &scaled {
            for r in c.coeffs() {
                if !r.is_zero() {
                    num_gcd = num::integer::gcd(num_gcd, r.numer().abs());
                }
            }
        }
        if num_gcd.is_zero() || num_gcd.is_one() {
            return UniPoly::from_coeffs(scaled);
        }
        let inv = crate::cyclotomic::Rat::new(BigInt::one(), num_gcd);
        UniPoly::from_coeffs(scaled.iter().map(|c| c.scale(&inv)).collect())
    }

    /// Pseudo-remainder: the remainder of lc(b)^(deg a - deg b + 1) * a by b,
    /// computed with ring operations only.
    fn pseudo_rem(&self, b: &UniPoly) -> Result<UniPoly> {
        let mut rem = self.coeffs.clone();
        let db = b.degree();
        let lead = b.leading();
        while rem.len() > db {
            // rem = lc(b) * rem - lc(rem) * x^shift * b kills the lead term.
            let q = rem.last().unwrap().clone();
            let shift = rem.len() - 1 - db;
            for c in rem.iter_mut() {
                *c = c.mul_ref(&lead);
            }
            for (i, bc) in b.coeffs.iter().enumerate() {
                let prod = q.mul_ref(bc);
                rem[shift + i] = &rem[shift + i] - &prod;
            }
            while rem.last().map_or(false, |c| c.is_zero()) {
                rem.pop();
            }
        }
        Ok(UniPoly::from_coeffs(rem))
    }

    pub fn galois_twist(&self, g: GaloisElem) -> UniPoly {
        Self::from_coeffs(self.coeffs.iter().map(|c| c.galois(g)).collect())
    }

    pub fn eval(&self, x: &CycScalar) -> CycScalar {
        let mut acc = CycScalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = &acc.mul_ref(x) + c;
        }
        acc
    }

    pub fn display_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let coeff_txt = c.to_text().replace('r', "rho");
            let needs_paren = coeff_txt.contains(' ');
            let coeff_part = if needs_paren {
                format!("({})", coeff_txt)
            } else {
                coeff_txt
            };
            let term = if i == 0 {
                coeff_part
            } else {
                let var_part = if i == 1 {
                    var.to_string()
                } else {
                    format!("{}^{}", var, i)
                };
                if c.is_one() {
                    var_part
                } else {
                    format!("{}*{}", coeff_part, var_part)
                }
            };
            parts.push(term);
        }
        parts.join(" + ")
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i);
            let b = rhs.coeffs.get(i);
            out.push(match (a, b) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => CycScalar::zero(),
            });
        }
        UniPoly::from_coeffs(out)
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        self + &(-rhs)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        self.try_mul(rhs).expect("degree limit exceeded")
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with("x"))
    }
}

/// Rational function num/den in one variable, den monic and coprime to num.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: UniPoly,
    den: UniPoly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc {
            num: UniPoly::zero(),
            den: UniPoly::one(),
        }
    }

    pub fn one() -> Self {
        RatFunc {
            num: UniPoly::one(),
            den: UniPoly::one(),
        }
    }

    pub fn constant(c: CycScalar) -> Self {
        RatFunc {
            num: UniPoly::constant(c),
            den: UniPoly::one(),
        }
    }

    pub fn x() -> Self {
        RatFunc {
            num: UniPoly::x(),
            den: UniPoly::one(),
        }
    }

    pub fn from_poly(p: UniPoly) -> Self {
        RatFunc {
            num: p,
            den: UniPoly::one(),
        }
    }

    pub fn new(num: UniPoly, den: UniPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut r = RatFunc { num, den };
        r.normalize()?;
        Ok(r)
    }

    fn normalize(&mut self) -> Result<()> {
        if self.num.is_zero() {
            self.den = UniPoly::one();
            return Ok(());
        }
        let g = self.num.gcd(&self.den)?;
        if !g.is_one() {
            self.num = self.num.div_rem(&g)?.0;
            self.den = self.den.div_rem(&g)?.0;
        }
        let lead = self.den.leading();
        if !lead.is_one() {
            let inv = lead.inverse()?;
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
        Ok(())
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    /// Addition with the denominator-gcd trick: write den_a = g*da',
    /// den_b = g*db'; only the g part can be shared with the new numerator,
    /// so one small gcd replaces one large one.
    fn add_signed(&self, rhs: &RatFunc, negate: bool) -> Result<RatFunc> {
        if self.den == rhs.den {
            let num = if negate {
                &self.num - &rhs.num
            } else {
                &self.num + &rhs.num
            };
            if self.den.is_one() {
                return Ok(RatFunc {
                    num,
                    den: UniPoly::one(),
                });
            }
            return RatFunc::new(num, self.den.clone());
        }
        let g = self.den.gcd(&rhs.den)?;
        if g.is_one() {
            let rn = rhs.num.try_mul(&self.den)?;
            let num = if negate {
                &self.num.try_mul(&rhs.den)? - &rn
            } else {
                &self.num.try_mul(&rhs.den)? + &rn
            };
            let den = self.den.try_mul(&rhs.den)?;
            // Coprime denominators: the result is already reduced.
            return Ok(RatFunc { num, den });
        }
        let da = self.den.div_rem(&g)?.0;
        let db = rhs.den.div_rem(&g)?.0;
        let rn = rhs.num.try_mul(&da)?;
        let mut num = if negate {
            &self.num.try_mul(&db)? - &rn
        } else {
            &self.num.try_mul(&db)? + &rn
        };
        // Only g can still divide num.
        let h = num.gcd(&g)?;
        let mut den = self.den.try_mul(&db)?;
        if !h.is_one() {
            num = num.div_rem(&h)?.0;
            den = den.div_rem(&h)?.0;
        }
        let lead = den.leading();
        if !lead.is_one() {
            let inv = lead.inverse()?;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(RatFunc { num, den })
    }

    pub fn try_add(&self, rhs: &RatFunc) -> Result<RatFunc> {
        self.add_signed(rhs, false)
    }

    pub fn try_sub(&self, rhs: &RatFunc) -> Result<RatFunc> {
        self.add_signed(rhs, true)
    }

    /// Multiplication with cross-reduction, so the final form needs no gcd.
    pub fn try_mul(&self, rhs: &RatFunc) -> Result<RatFunc> {
        if self.is_zero() || rhs.is_zero() {
            return Ok(RatFunc::zero());
        }
        let g1 = self.num.gcd(&rhs.den)?;
        let g2 = rhs.num.gcd(&self.den)?;
        let n1 = if g1.is_one() {
            self.num.clone()
        } else {
            self.num.div_rem(&g1)?.0
        };
        let d2 = if g1.is_one() {
            rhs.den.clone()
        } else {
            rhs.den.div_rem(&g1)?.0
        };
        let n2 = if g2.is_one() {
            rhs.num.clone()
        } else {
            rhs.num.div_rem(&g2)?.0
        };
        let d1 = if g2.is_one() {
            self.den.clone()
        } else {
            self.den.div_rem(&g2)?.0
        };
        let mut num = n1.try_mul(&n2)?;
        let mut den = d1.try_mul(&d2)?;
        let lead = den.leading();
        if !lead.is_one() {
            let inv = lead.inverse()?;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(RatFunc { num, den })
    }

    pub fn try_div(&self, rhs: &RatFunc) -> Result<RatFunc> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.try_mul(&rhs.inverse()?)
    }

    pub fn neg_ref(&self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn inverse(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, c: &CycScalar) -> RatFunc {
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, e: u32) -> Result<RatFunc> {
        Ok(RatFunc {
            num: self.num.pow(e)?,
            den: self.den.pow(e)?,
        })
    }

    pub fn galois_twist(&self, g: GaloisElem) -> RatFunc {
        // Twisting preserves coprimality and we re-normalize the monic lead.
        let mut r = RatFunc {
            num: self.num.galois_twist(g),
            den: self.den.galois_twist(g),
        };
        r.normalize().expect("twist preserves nonzero denominator");
        r
    }

    /// Exact evaluation; errors on a pole.
    pub fn eval(&self, x: &CycScalar) -> Result<CycScalar> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::Pole);
        }
        self.num.eval(x).div_ref(&d)
    }

    pub fn display_with(&self, var: &str) -> String {
        if self.den.is_one() {
            self.num.display_with(var)
        } else {
            format!(
                "({})/({})",
                self.num.display_with(var),
                self.den.display_with(var)
            )
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::rat_i64;

    fn rho(k: i64) -> CycScalar {
        CycScalar::rho_pow(k)
    }

    #[test]
    fn quadratic_product_matches_hand_expansion() {
        // (x - rho^4)(x - rho^5) = x^2 - (rho^4 + rho^5) x + rho^2
        let p = UniPoly::linear_root(&rho(4)).try_mul(&UniPoly::linear_root(&rho(5))).unwrap();
        assert_eq!(p.coeff(2), CycScalar::one());
        assert_eq!(p.coeff(1), -&(&rho(4) + &rho(5)));
        assert_eq!(p.coeff(0), rho(2));
    }

    #[test]
    fn mul_by_one_is_identity() {
        let p = UniPoly::from_coeffs(vec![rho(1), rho(3), CycScalar::from_i64(2)]);
        let q = p.try_mul(&UniPoly::one()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn gcd_reduction() {
        // (x^2 - 1)/(x - 1) normalizes to x + 1
        let num = &UniPoly::linear_root(&CycScalar::one())
            .try_mul(&UniPoly::linear_root(&CycScalar::from_i64(-1)))
            .unwrap();
        let den = UniPoly::linear_root(&CycScalar::one());
        let r = RatFunc::new(num.clone(), den).unwrap();
        assert!(r.is_polynomial());
        assert_eq!(r.num().coeff(1), CycScalar::one());
        assert_eq!(r.num().coeff(0), CycScalar::one());
    }

    #[test]
    fn monic_denominator() {
        // x / (2x + 2) -> (1/2 x)/(x + 1)
        let r = RatFunc::new(
            UniPoly::x(),
            UniPoly::from_coeffs(vec![CycScalar::from_i64(2), CycScalar::from_i64(2)]),
        )
        .unwrap();
        assert_eq!(r.den().leading(), CycScalar::one());
        assert_eq!(
            r.num().coeff(1),
            CycScalar::from_rat(crate::cyclotomic::rat_frac(1, 2))
        );
    }

    #[test]
    fn evaluation_and_poles() {
        let r = RatFunc::new(UniPoly::one(), UniPoly::linear_root(&rho(1))).unwrap();
        assert!(r.eval(&rho(1)).is_err());
        assert!(r.eval(&rho(2)).is_ok());
    }

    #[test]
    fn seventh_cyclotomic_vanishes_at_rho() {
        // (x^7 - 1)/(x - 1) at rho is 0
        let mut coeffs = vec![CycScalar::from_i64(-1)];
        coeffs.extend(std::iter::repeat(CycScalar::zero()).take(6));
        coeffs.push(CycScalar::one());
        let x7m1 = UniPoly::from_coeffs(coeffs);
        let r = RatFunc::new(x7m1, UniPoly::linear_root(&CycScalar::one())).unwrap();
        assert!(r.eval(&rho(1)).unwrap().is_zero());
    }

    #[test]
    fn degree_guardrail() {
        let p = UniPoly::x().pow(3000).unwrap();
        assert!(p.try_mul(&p).is_err());
        assert_eq!(p.degree(), 3000);
    }

    #[test]
    fn scale_by_i64_zero(){
        let p = UniPoly::x();
        assert!(p.scale(&CycScalar::zero()).is_zero());
        let _ = rat_i64(0);
    }
}
