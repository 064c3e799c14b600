//! Function-field algebra of Macbeath-type curves.
//!
//! A curve in this family lives in C^4 with coordinates (x, y1, y2, y4) and
//! three quartic relations y_i^2 = f_i(x) whose roots are 7th roots of unity.
//! Its function field is an 8-dimensional algebra over Q(zeta_7)(x) with
//! basis y1^a y2^b y4^c, (a,b,c) in {0,1}^3; elements are reduced to that
//! normal form eagerly, which makes equality of birational maps decidable.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::cyclotomic::{CycScalar, GaloisElem};
use crate::error::{Error, Result};
use crate::expr::{EvalContext, Expr};
use crate::poly::{RatFunc, UniPoly};

pub const CURVE_VARS: [&str; 4] = ["x", "y1", "y2", "y4"];

/// Branch data: lambda_j = rho^(j-1) (j = 1..7) and three 4-subsets giving
/// the quartics f_1, f_2, f_4 of the defining relations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CurveSpec {
    /// 0-based indices into the lambda list; lambda index j holds rho^j.
    quartics: [[usize; 4]; 3],
}

impl CurveSpec {
    /// Macbeath's model: y1^2 = (x-1)(x-rho^3)(x-rho^5)(x-rho^6),
    /// y2^2 = (x-rho^2)(x-rho^4)(x-rho^5)(x-rho^6),
    /// y4^2 = (x-rho)(x-rho^3)(x-rho^4)(x-rho^5).
    pub fn macbeath_x() -> Arc<CurveSpec> {
        Arc::new(CurveSpec {
            quartics: [[0, 3, 5, 6], [2, 4, 5, 6], [1, 3, 4, 5]],
        })
    }

    pub fn from_root_exponents(quartics: [[usize; 4]; 3]) -> Result<Arc<CurveSpec>> {
        for q in &quartics {
            let mut s = q.to_vec();
            s.sort_unstable();
            s.dedup();
            if s.len() != 4 || s.iter().any(|&i| i > 6) {
                return Err(Error::Inconsistent(
                    "quartic must have 4 distinct root exponents in 0..=6".into(),
                ));
            }
        }
        Ok(Arc::new(CurveSpec { quartics }))
    }

    /// Root exponents (powers of rho) of quartic i, sorted.
    pub fn quartic_exponents(&self, i: usize) -> [usize; 4] {
        let mut q = self.quartics[i];
        q.sort_unstable();
        q
    }

    pub fn lambda(j: usize) -> CycScalar {
        CycScalar::rho_pow(j as i64)
    }

    /// The quartic f_i as a univariate polynomial in x.
    pub fn quartic_poly(&self, i: usize) -> UniPoly {
        let mut p = UniPoly::one();
        for &j in &self.quartics[i] {
            p = p
                .try_mul(&UniPoly::linear_root(&Self::lambda(j)))
                .expect("quartic degree");
        }
        p
    }

    /// The Galois twist: every branch value rho^j becomes rho^(3^k j).
    pub fn galois_twist(&self, g: GaloisElem) -> Arc<CurveSpec> {
        let m = g.rho_exponent_multiplier();
        let map = |j: usize| (j * m) % 7;
        let mut quartics = self.quartics;
        for q in quartics.iter_mut() {
            for j in q.iter_mut() {
                *j = map(*j);
            }
            q.sort_unstable();
        }
        Arc::new(CurveSpec { quartics })
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "X[{:?},{:?},{:?}]",
            self.quartics[0], self.quartics[1], self.quartics[2]
        )
    }
}

/// Element of the function field, 8 rational-function coefficients indexed
/// by the bits of the monomial y1^a y2^b y4^c (bit 0 = y1, 1 = y2, 2 = y4).
#[derive(Clone, PartialEq, Eq)]
pub struct CurveElement {
    spec: Arc<CurveSpec>,
    c: Vec<RatFunc>,
}

impl CurveElement {
    pub fn zero(spec: &Arc<CurveSpec>) -> Self {
        CurveElement {
            spec: spec.clone(),
            c: vec![RatFunc::zero(); 8],
        }
    }

    pub fn one(spec: &Arc<CurveSpec>) -> Self {
        Self::scalar(spec, RatFunc::one())
    }

    pub fn scalar(spec: &Arc<CurveSpec>, r: RatFunc) -> Self {
        let mut e = Self::zero(spec);
        e.c[0] = r;
        e
    }

    pub fn constant(spec: &Arc<CurveSpec>, c: CycScalar) -> Self {
        Self::scalar(spec, RatFunc::constant(c))
    }

    pub fn x(spec: &Arc<CurveSpec>) -> Self {
        Self::scalar(spec, RatFunc::x())
    }

    /// y1, y2 or y4 for i = 0, 1, 2.
    pub fn generator(spec: &Arc<CurveSpec>, i: usize) -> Self {
        let mut e = Self::zero(spec);
        e.c[1 << i] = RatFunc::one();
        e
    }

    pub fn spec(&self) -> &Arc<CurveSpec> {
        &self.spec
    }

    pub fn coeff(&self, idx: usize) -> &RatFunc {
        &self.c[idx]
    }

    pub fn coeffs(&self) -> &[RatFunc] {
        &self.c
    }

    pub fn from_coeffs(spec: &Arc<CurveSpec>, c: Vec<RatFunc>) -> Self {
        assert_eq!(c.len(), 8);
        CurveElement {
            spec: spec.clone(),
            c,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|r| r.is_zero())
    }

    pub fn is_scalar(&self) -> bool {
        self.c[1..].iter().all(|r| r.is_zero())
    }

    /// The (0,0,0) component; the full value when `is_scalar`.
    pub fn scalar_part(&self) -> &RatFunc {
        &self.c[0]
    }

    fn check_spec(&self, other: &CurveElement) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, other: &CurveElement) -> Result<CurveElement> {
        self.check_spec(other)?;
        let mut c = Vec::with_capacity(8);
        for i in 0..8 {
            c.push(self.c[i].try_add(&other.c[i])?);
        }
        Ok(CurveElement {
            spec: self.spec.clone(),
            c,
        })
    }

    pub fn try_sub(&self, other: &CurveElement) -> Result<CurveElement> {
        self.check_spec(other)?;
        let mut c = Vec::with_capacity(8);
        for i in 0..8 {
            c.push(self.c[i].try_sub(&other.c[i])?);
        }
        Ok(CurveElement {
            spec: self.spec.clone(),
            c,
        })
    }

    pub fn neg_ref(&self) -> CurveElement {
        CurveElement {
            spec: self.spec.clone(),
            c: self.c.iter().map(|r| r.neg_ref()).collect(),
        }
    }

    pub fn try_mul(&self, other: &CurveElement) -> Result<CurveElement> {
        self.check_spec(other)?;
        let mut out = Self::zero(&self.spec);
        // Quartic reductions y_i^2 -> f_i(x), cached as RatFuncs.
        let f: [RatFunc; 3] =
            std::array::from_fn(|i| RatFunc::from_poly(self.spec.quartic_poly(i)));
        for m1 in 0..8usize {
            if self.c[m1].is_zero() {
                continue;
            }
            for m2 in 0..8usize {
                if other.c[m2].is_zero() {
                    continue;
                }
                let mut term = self.c[m1].try_mul(&other.c[m2])?;
                let shared = m1 & m2;
                for i in 0..3 {
                    if shared & (1 << i) != 0 {
                        term = term.try_mul(&f[i])?;
                    }
                }
                let idx = m1 ^ m2;
                out.c[idx] = out.c[idx].try_add(&term)?;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<CurveElement> {
        let mut acc = Self::one(&self.spec);
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

    /// Flip the signs of the chosen generators (bit i set flips y_{index i}).
    pub fn sign_conjugate(&self, signs: usize) -> CurveElement {
        let mut c = Vec::with_capacity(8);
        for (m, r) in self.c.iter().enumerate() {
            if (m & signs).count_ones() % 2 == 1 {
                c.push(r.neg_ref());
            } else {
                c.push(r.clone());
            }
        }
        CurveElement {
            spec: self.spec.clone(),
            c,
        }
    }

    /// Norm to the rational-function field: product of the 8 sign conjugates.
    /// Always lands in the scalar slot.
    pub fn norm(&self) -> Result<RatFunc> {
        let mut prod = self.clone();
        for signs in 1..8usize {
            prod = prod.try_mul(&self.sign_conjugate(signs))?;
        }
        if !prod.is_scalar() {
            return Err(Error::ZeroDivisor(
                "norm did not reduce to the scalar slot".into(),
            ));
        }
        Ok(prod.scalar_part().clone())
    }

    /// Inverse via the sign-conjugate norm; verifies a * a^-1 = 1.
    pub fn inverse(&self) -> Result<CurveElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // Fast path for scalars.
        if self.is_scalar() {
            let mut out = Self::zero(&self.spec);
            out.c[0] = self.c[0].inverse()?;
            return Ok(out);
        }
        let mut cofactor = Self::one(&self.spec);
        let mut norm = self.clone();
        for signs in 1..8usize {
            cofactor = cofactor.try_mul(&self.sign_conjugate(signs))?;
        }
        norm = norm.try_mul(&cofactor)?;
        if !norm.is_scalar() {
            return Err(Error::ZeroDivisor("norm not scalar".into()));
        }
        let n = norm.scalar_part();
        if n.is_zero() {
            return Err(Error::ZeroDivisor(
                "nonzero element has zero norm".into(),
            ));
        }
        let ninv = n.inverse()?;
        let inv = cofactor.scale_ratfunc(&ninv)?;
        let check = self.try_mul(&inv)?;
        if !check.is_one() {
            return Err(Error::ZeroDivisor("a * a^-1 != 1".into()));
        }
        Ok(inv)
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(|r| r.is_zero())
    }

    pub fn try_div(&self, other: &CurveElement) -> Result<CurveElement> {
        self.try_mul(&other.inverse()?)
    }

    pub fn scale_ratfunc(&self, r: &RatFunc) -> Result<CurveElement> {
        let mut c = Vec::with_capacity(8);
        for i in 0..8 {
            c.push(self.c[i].try_mul(r)?);
        }
        Ok(CurveElement {
            spec: self.spec.clone(),
            c,
        })
    }

    /// Coefficientwise Galois twist; the result lives on the twisted curve.
    pub fn galois_twist(&self, g: GaloisElem) -> CurveElement {
        CurveElement {
            spec: self.spec.galois_twist(g),
            c: self.c.iter().map(|r| r.galois_twist(g)).collect(),
        }
    }

    /// Numeric evaluation at a point (x, y1, y2, y4).
    pub fn eval_complex(&self, pt: &[num::complex::Complex64; 4]) -> num::complex::Complex64 {
        use num::complex::Complex64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, r) in self.c.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            let mut mono = Complex64::new(1.0, 0.0);
            for i in 0..3 {
                if m & (1 << i) != 0 {
                    mono *= pt[i + 1];
                }
            }
            acc += crate::numeric::eval_ratfunc(r, pt[0]) * mono;
        }
        acc
    }
}

impl fmt::Debug for CurveElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = ["1", "y1", "y2", "y1*y2", "y4", "y1*y4", "y2*y4", "y1*y2*y4"];
        let mut first = true;
        for (m, r) in self.c.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m == 0 {
                write!(f, "{}", r.display_with("x"))?;
            } else {
                write!(f, "({})*{}", r.display_with("x"), names[m])?;
            }
        }
        Ok(())
    }
}

/// Evaluation of expressions in (x, y1, y2, y4) or arbitrary bound names
/// into a curve's function field.
pub struct CurveEval<'a> {
    pub spec: &'a Arc<CurveSpec>,
    pub bindings: BTreeMap<String, CurveElement>,
}

impl<'a> CurveEval<'a> {
    /// Bind the four coordinate generators of the curve itself.
    pub fn generators(spec: &'a Arc<CurveSpec>) -> Self {
        let mut bindings = BTreeMap::new();
        bindings.insert("x".to_string(), CurveElement::x(spec));
        bindings.insert("y1".to_string(), CurveElement::generator(spec, 0));
        bindings.insert("y2".to_string(), CurveElement::generator(spec, 1));
        bindings.insert("y4".to_string(), CurveElement::generator(spec, 2));
        CurveEval { spec, bindings }
    }

    pub fn with_bindings(
        spec: &'a Arc<CurveSpec>,
        bindings: BTreeMap<String, CurveElement>,
    ) -> Self {
        CurveEval { spec, bindings }
    }
}

impl<'a> EvalContext for CurveEval<'a> {
    type Value = CurveElement;

    fn constant(&self, c: &CycScalar) -> Result<CurveElement> {
        Ok(CurveElement::constant(self.spec, c.clone()))
    }

    fn var(&self, name: &str) -> Result<CurveElement> {
        self.bindings
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnboundVar(name.to_string()))
    }

    fn add(&self, a: &CurveElement, b: &CurveElement) -> Result<CurveElement> {
        a.try_add(b)
    }

    fn sub(&self, a: &CurveElement, b: &CurveElement) -> Result<CurveElement> {
        a.try_sub(b)
    }

    fn mul(&self, a: &CurveElement, b: &CurveElement) -> Result<CurveElement> {
        a.try_mul(b)
    }

    fn div(&self, a: &CurveElement, b: &CurveElement) -> Result<CurveElement> {
        a.try_div(b)
    }
}

/// Interpret a coordinate expression on a curve: bottom-up evaluation with
/// the four generators bound.
pub fn interpret(expr: &Expr, spec: &Arc<CurveSpec>) -> Result<CurveElement> {
    expr.eval(&CurveEval::generators(spec))
}

pub fn interpret_str(text: &str, spec: &Arc<CurveSpec>) -> Result<CurveElement> {
    interpret(&Expr::parse(text)?, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x_spec() -> Arc<CurveSpec> {
        CurveSpec::macbeath_x()
    }

    #[test]
    fn y1_squared_reduces_to_quartic() {
        let spec = x_spec();
        let y1 = CurveElement::generator(&spec, 0);
        let sq = y1.try_mul(&y1).unwrap();
        assert!(sq.is_scalar());
        assert_eq!(*sq.scalar_part(), RatFunc::from_poly(spec.quartic_poly(0)));
    }

    #[test]
    fn mixed_monomial_reduction() {
        // (y1*y2)*(y1*y4) = f1(x) * y2*y4
        let spec = x_spec();
        let a = interpret_str("y1*y2", &spec).unwrap();
        let b = interpret_str("y1*y4", &spec).unwrap();
        let prod = a.try_mul(&b).unwrap();
        let expected = interpret_str("y2*y4", &spec)
            .unwrap()
            .scale_ratfunc(&RatFunc::from_poly(spec.quartic_poly(0)))
            .unwrap();
        assert_eq!(prod, expected);
    }

    #[test]
    fn mul_identity() {
        let spec = x_spec();
        let a = interpret_str("y1*y2/(x - rho) + x^2", &spec).unwrap();
        let one = CurveElement::one(&spec);
        assert_eq!(a.try_mul(&one).unwrap(), a);
    }

    #[test]
    fn inverse_of_x() {
        let spec = x_spec();
        let inv = CurveElement::x(&spec).inverse().unwrap();
        assert!(inv.is_scalar());
        assert_eq!(
            *inv.scalar_part(),
            RatFunc::new(UniPoly::one(), UniPoly::x()).unwrap()
        );
    }

    #[test]
    fn inverse_of_y1() {
        // 1/y1 = y1/f1(x)
        let spec = x_spec();
        let y1 = CurveElement::generator(&spec, 0);
        let inv = y1.inverse().unwrap();
        let expected = y1
            .scale_ratfunc(
                &RatFunc::from_poly(spec.quartic_poly(0)).inverse().unwrap(),
            )
            .unwrap();
        assert_eq!(inv, expected);
        assert!(y1.try_mul(&inv).unwrap().is_one());
    }

    #[test]
    fn inverse_of_scalar_quadratic() {
        let spec = x_spec();
        let q = interpret_str("(x - rho^4)*(x - rho^5)", &spec).unwrap();
        let inv = q.inverse().unwrap();
        assert!(inv.is_scalar());
        assert!(q.try_mul(&inv).unwrap().is_one());
    }

    #[test]
    fn inverse_of_generic_element() {
        let spec = x_spec();
        let a = interpret_str("y1 + x*y2*y4 + 3", &spec).unwrap();
        let inv = a.inverse().unwrap();
        assert!(a.try_mul(&inv).unwrap().is_one());
    }

    #[test]
    fn interpret_paper_map_components() {
        // rho^2*y2/x^2 has a single (0,1,0) coefficient
        let spec = x_spec();
        let e = interpret_str("rho^2*y2/x^2", &spec).unwrap();
        for (m, c) in e.coeffs().iter().enumerate() {
            if m == 2 {
                assert!(!c.is_zero());
            } else {
                assert!(c.is_zero(), "unexpected component {}", m);
            }
        }
        // y2*y4/((x-rho^4)*(x-rho^5)) sits in the (0,1,1) slot
        let e2 = interpret_str("y2*y4/((x - rho^4)*(x - rho^5))", &spec).unwrap();
        assert!(!e2.coeff(6).is_zero());
        assert!(e2.coeff(0).is_zero());
    }

    #[test]
    fn zero_division_rejected() {
        let spec = x_spec();
        let z = CurveElement::zero(&spec);
        assert!(z.inverse().is_err());
        assert!(CurveElement::one(&spec).try_div(&z).is_err());
    }

    #[test]
    fn spec_mismatch_rejected() {
        let spec = x_spec();
        let twisted = spec.galois_twist(GaloisElem::new(1));
        let a = CurveElement::x(&spec);
        let b = CurveElement::x(&twisted);
        assert!(a.try_add(&b).is_err());
    }

    #[test]
    fn galois_twist_of_spec_permutes_roots() {
        let spec = x_spec();
        let t = spec.galois_twist(GaloisElem::new(1));
        // f1 = {0,3,5,6} -> {0, 9 mod 7 = 2, 15 mod 7 = 1, 18 mod 7 = 4}
        assert_eq!(t.quartic_exponents(0), [0, 1, 2, 4]);
    }
}
