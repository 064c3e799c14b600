//! Multivariate polynomials over Q(zeta_7) with named variables and a fixed
//! graded-lexicographic term order, so printed and serialized forms are
//! byte-stable across runs.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{CycScalar, GaloisElem, Rat, Subgroup};
use crate::error::{Error, Result};
use crate::expr::{EvalContext, Expr};

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Mono(pub Vec<u16>);

impl Mono {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Mono, CycScalar>,
}

impl MultiPoly {
    pub fn zero(vars: &[&str]) -> Self {
        MultiPoly {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn zero_owned(vars: Vec<String>) -> Self {
        MultiPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[&str], c: CycScalar) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Mono(vec![0; p.vars.len()]), c);
        }
        p
    }

    pub fn var(vars: &[&str], name: &str) -> Result<Self> {
        let mut p = Self::zero(vars);
        let idx = p
            .vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnboundVar(name.to_string()))?;
        let mut exp = vec![0u16; p.vars.len()];
        exp[idx] = 1;
        p.terms.insert(Mono(exp), CycScalar::one());
        Ok(p)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &CycScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &[u16]) -> CycScalar {
        self.terms
            .get(&Mono(exp.to_vec()))
            .cloned()
            .unwrap_or_else(CycScalar::zero)
    }

    pub fn add_term(&mut self, exp: Vec<u16>, c: CycScalar) {
        assert_eq!(exp.len(), self.vars.len(), "exponent arity");
        let m = Mono(exp);
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = &*o.get() + &c;
                if v.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
        }
    }

    fn check_vars(&self, other: &MultiPoly) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::VarMismatch(format!(
                "{:?} vs {:?}",
                self.vars, other.vars
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms.iter() {
            out.add_term(m.0.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms.iter() {
            out.add_term(m.0.clone(), -c);
        }
        Ok(out)
    }

    pub fn neg_ref(&self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn try_mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_vars(other)?;
        let mut out = Self::zero_owned(self.vars.clone());
        for (m1, c1) in self.terms.iter() {
            for (m2, c2) in other.terms.iter() {
                out.add_term(m1.mul(m2).0, c1.mul_ref(c2));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &CycScalar) -> MultiPoly {
        if c.is_zero() {
            return Self::zero_owned(self.vars.clone());
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a.mul_ref(c)))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Result<MultiPoly> {
        let mut acc = Self::constant(
            &self.vars.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
            CycScalar::one(),
        );
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

    /// Total degree of the polynomial (0 for the zero polynomial).
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, var: &str) -> u16 {
        let Some(idx) = self.vars.iter().position(|v| v == var) else {
            return 0;
        };
        self.terms.keys().map(|m| m.0[idx]).max().unwrap_or(0)
    }

    /// Apply a Galois element to every coefficient.
    pub fn galois_twist(&self, g: GaloisElem) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.galois(g)))
                .collect(),
        }
    }

    /// Tr(a * self) over the subgroup: sum of g(a) * self^g.
    pub fn trace(&self, a: &CycScalar, subgroup: Subgroup) -> MultiPoly {
        let mut acc = Self::zero_owned(self.vars.clone());
        for g in subgroup.elements() {
            let twisted = self.galois_twist(g).scale(&a.galois(g));
            acc = acc.try_add(&twisted).expect("same vars");
        }
        acc
    }

    /// Rename/permute variables: `perm[i]` is the new index of variable i.
    pub fn permute_vars(&self, perm: &[usize]) -> MultiPoly {
        assert_eq!(perm.len(), self.vars.len());
        let mut out = Self::zero_owned(self.vars.clone());
        for (m, c) in self.terms.iter() {
            let mut exp = vec![0u16; self.vars.len()];
            for (i, &e) in m.0.iter().enumerate() {
                exp[perm[i]] += e;
            }
            out.add_term(exp, c.clone());
        }
        out
    }

    /// Exact evaluation at a scalar point.
    pub fn eval_scalar(&self, point: &BTreeMap<String, CycScalar>) -> Result<CycScalar> {
        let mut acc = CycScalar::zero();
        for (m, c) in self.terms.iter() {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    let v = point
                        .get(&self.vars[i])
                        .ok_or_else(|| Error::UnboundVar(self.vars[i].clone()))?;
                    t = t.mul_ref(&v.pow(e as u32));
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Evaluate into an arbitrary algebra with cached variable powers.
    pub fn eval_in<C: EvalContext>(&self, ctx: &C) -> Result<C::Value> {
        // Cache powers per variable up to the max exponent used.
        let n = self.vars.len();
        let mut max_exp = vec![0u16; n];
        for m in self.terms.keys() {
            for i in 0..n {
                max_exp[i] = max_exp[i].max(m.0[i]);
            }
        }
        let mut powers: Vec<Vec<C::Value>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut col = Vec::new();
            if max_exp[i] > 0 {
                let v = ctx.var(&self.vars[i])?;
                col.push(v.clone());
                for _ in 1..max_exp[i] {
                    let last = col.last().unwrap();
                    col.push(ctx.mul(last, &v)?);
                }
            }
            powers.push(col);
        }
        let mut acc = ctx.constant(&CycScalar::zero())?;
        for (m, c) in self.terms.iter() {
            let mut t = ctx.constant(c)?;
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = ctx.mul(&t, &powers[i][(e - 1) as usize])?;
                }
            }
            acc = ctx.add(&acc, &t)?;
        }
        Ok(acc)
    }

    /// Substitute variables by polynomials over a possibly different ring.
    pub fn substitute(&self, bindings: &BTreeMap<String, MultiPoly>) -> Result<MultiPoly> {
        let mut target_vars: Option<Vec<String>> = None;
        for v in &self.vars {
            if self.degree_in(v) > 0 && !bindings.contains_key(v) {
                return Err(Error::UnboundVar(v.clone()));
            }
            if let Some(b) = bindings.get(v) {
                match &target_vars {
                    None => target_vars = Some(b.vars.clone()),
                    Some(tv) => {
                        if tv != &b.vars {
                            return Err(Error::VarMismatch(
                                "bindings use different variable sets".into(),
                            ));
                        }
                    }
                }
            }
        }
        let tv = target_vars.unwrap_or_else(|| self.vars.clone());
        let ctx = PolyEval {
            bindings,
            vars: tv.clone(),
        };
        self.eval_in(&ctx)
    }

    /// Remove the rational content (gcd of numerators / lcm of denominators
    /// over all 6 coordinates of all coefficients).
    pub fn remove_content(&self) -> MultiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            for r in c.coeffs() {
                if r.is_zero() {
                    continue;
                }
                num_gcd = num::integer::gcd(num_gcd.clone(), r.numer().abs());
                den_lcm = num::integer::lcm(den_lcm.clone(), r.denom().abs());
            }
        }
        if num_gcd.is_zero() {
            return self.clone();
        }
        let content = BigRational::new(num_gcd, den_lcm);
        let inv: Rat = content.recip();
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.scale(&inv)))
                .collect(),
        }
    }

    /// Content removal plus deterministic sign: the coefficient of the
    /// graded-lex smallest monomial gets a positive first nonzero coordinate.
    pub fn normalize_content_sign(&self) -> MultiPoly {
        let p = self.remove_content();
        if p.is_zero() {
            return p;
        }
        let (_, c) = p.terms.iter().next().unwrap();
        let flip = c
            .coeffs()
            .iter()
            .find(|r| !r.is_zero())
            .map(|r| r.is_negative())
            .unwrap_or(false);
        if flip {
            p.neg_ref()
        } else {
            p
        }
    }

    pub fn to_expr(&self) -> Expr {
        let mut acc: Option<Expr> = None;
        for (m, c) in self.terms.iter() {
            let mut term = Expr::constant(c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    let v = Expr::var(&self.vars[i]);
                    let p = if e == 1 { v } else { Expr::pow(v, e as u32) };
                    term = Expr::mul(term, p);
                }
            }
            acc = Some(match acc {
                None => term,
                Some(a) => Expr::add(a, term),
            });
        }
        acc.unwrap_or_else(|| Expr::int(0))
    }

    /// Parse from an expression over the given variables.
    pub fn from_expr(e: &Expr, vars: &[&str]) -> Result<MultiPoly> {
        let ctx = ExprPolyCtx {
            vars: vars.iter().map(|s| s.to_string()).collect(),
        };
        e.eval(&ctx)
    }

    pub fn parse(input: &str, vars: &[&str]) -> Result<MultiPoly> {
        Self::from_expr(&Expr::parse(input)?, vars)
    }
}

struct PolyEval<'a> {
    bindings: &'a BTreeMap<String, MultiPoly>,
    vars: Vec<String>,
}

impl<'a> EvalContext for PolyEval<'a> {
    type Value = MultiPoly;

    fn constant(&self, c: &CycScalar) -> Result<MultiPoly> {
        Ok(MultiPoly::constant(
            &self.vars.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
            c.clone(),
        ))
    }

    fn var(&self, name: &str) -> Result<MultiPoly> {
        self.bindings
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnboundVar(name.to_string()))
    }

    fn add(&self, a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly> {
        a.try_add(b)
    }

    fn sub(&self, a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly> {
        a.try_sub(b)
    }

    fn mul(&self, a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly> {
        a.try_mul(b)
    }

    fn div(&self, _a: &MultiPoly, _b: &MultiPoly) -> Result<MultiPoly> {
        Err(Error::Unsupported(
            "division inside polynomial substitution".into(),
        ))
    }
}

struct ExprPolyCtx {
    vars: Vec<String>,
}

impl EvalContext for ExprPolyCtx {
    type Value = MultiPoly;

    fn constant(&self, c: &CycScalar) -> Result<MultiPoly> {
        Ok(MultiPoly::constant(
            &self.vars.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
            c.clone(),
        ))
    }

    fn var(&self, name: &str) -> Result<MultiPoly> {
        MultiPoly::var(
            &self.vars.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
            name,
        )
    }

    fn add(&self, a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly> {
        a.try_add(b)
    }

    fn sub(&self, a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly> {
        a.try_sub(b)
    }

    fn mul(&self, a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly> {
        a.try_mul(b)
    }

    fn div(&self, a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly> {
        // Only scalar division appears in polynomial text (e.g. t1/3).
        if b.total_degree() == 0 && !b.is_zero() {
            let c = b.coeff(&vec![0u16; b.vars.len()]);
            Ok(a.scale(&c.inverse()?))
        } else {
            Err(Error::Unsupported("polynomial division in text".into()))
        }
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff_txt = c.to_text().replace('r', "rho");
            let is_const_term = m.total_degree() == 0;
            if is_const_term {
                if coeff_txt.contains(' ') {
                    write!(f, "({})", coeff_txt)?;
                } else {
                    write!(f, "{}", coeff_txt)?;
                }
                continue;
            }
            let mut wrote_coeff = false;
            if !c.is_one() {
                if coeff_txt.contains(' ') {
                    write!(f, "({})", coeff_txt)?;
                } else {
                    write!(f, "{}", coeff_txt)?;
                }
                wrote_coeff = true;
            }
            let mut first_var = !wrote_coeff;
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first_var {
                    write!(f, "*")?;
                }
                first_var = false;
                if e == 1 {
                    write!(f, "{}", self.vars[i])?;
                } else {
                    write!(f, "{}^{}", self.vars[i], e)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Serialized polynomial: `{vars, terms: [{exp, coeff}]}`.
#[derive(Serialize, Deserialize)]
pub struct MultiPolyJson {
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u16>,
    pub coeff: CycScalar,
}

impl MultiPoly {
    pub fn to_json(&self) -> MultiPolyJson {
        MultiPolyJson {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson {
                    exp: m.0.clone(),
                    coeff: c.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &MultiPolyJson) -> Result<MultiPoly> {
        let mut p = MultiPoly::zero_owned(j.vars.clone());
        for t in &j.terms {
            if t.exp.len() != j.vars.len() {
                return Err(Error::VarMismatch("exponent arity in JSON".into()));
            }
            p.add_term(t.exp.clone(), t.coeff.clone());
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TV: &[&str] = &["t1", "t2", "t3"];

    fn poly(s: &str) -> MultiPoly {
        MultiPoly::parse(s, TV).unwrap()
    }

    #[test]
    fn grlex_ordering_is_stable() {
        let p = poly("t3 + t1*t2 + t1^2 + 1 + t2");
        let monos: Vec<Vec<u16>> = p.terms().map(|(m, _)| m.0.clone()).collect();
        assert_eq!(
            monos,
            vec![
                vec![0, 0, 0],
                vec![0, 0, 1],
                vec![0, 1, 0],
                vec![1, 1, 0],
                vec![2, 0, 0],
            ]
        );
    }

    #[test]
    fn substitution_identity() {
        // t3 -> t2 in (t3 - t2) gives 0
        let p = poly("t3 - t2");
        let mut b = BTreeMap::new();
        b.insert("t3".to_string(), poly("t2"));
        b.insert("t2".to_string(), poly("t2"));
        b.insert("t1".to_string(), poly("t1"));
        assert!(p.substitute(&b).unwrap().is_zero());
    }

    #[test]
    fn scalar_substitution_scaling() {
        // t1 -> t1/3 in t1^2 gives t1^2/9
        let p = poly("t1^2");
        let mut b = BTreeMap::new();
        b.insert("t1".to_string(), poly("t1/3"));
        let q = p.substitute(&b).unwrap();
        assert_eq!(q, poly("t1^2/9"));
    }

    #[test]
    fn twist_commutes_with_mul() {
        let a = poly("(1 + rho)*t1 + rho^3*t2^2");
        let b = poly("t3 - rho^5");
        let g = GaloisElem::new(1);
        let lhs = a.try_mul(&b).unwrap().galois_twist(g);
        let rhs = a.galois_twist(g).try_mul(&b.galois_twist(g)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn trace_of_rational_poly_over_n() {
        let p = poly("t1 + 2*t2");
        let t = p.trace(&CycScalar::one(), Subgroup::N);
        assert_eq!(t, poly("3*t1 + 6*t2"));
    }

    #[test]
    fn trace_of_rho_constant_full() {
        let one = MultiPoly::constant(TV, CycScalar::one());
        let t = one.trace(&CycScalar::rho(), Subgroup::Full);
        assert_eq!(t, MultiPoly::constant(TV, CycScalar::from_i64(-1)));
    }

    #[test]
    fn trace_output_subgroup_invariant() {
        let p = poly("rho*t1^2 + (rho^2 + rho^5)*t2*t3");
        let t = p.trace(&CycScalar::rho_pow(2), Subgroup::N);
        assert_eq!(t.galois_twist(GaloisElem::new(2)), t);
        for (_, c) in t.terms() {
            assert!(c.in_subfield(crate::cyclotomic::FieldLevel::QSqrtMinus7));
        }
    }

    #[test]
    fn content_sign_normalization() {
        let p = poly("-6*t1 - 9*t2^2");
        let n = p.normalize_content_sign();
        assert_eq!(n, poly("2*t1 + 3*t2^2"));
    }

    #[test]
    fn json_round_trip() {
        let p = poly("(1/2 - rho)*t1^3 + 4*t3");
        let json = serde_json::to_string(&p.to_json()).unwrap();
        let back: MultiPolyJson = serde_json::from_str(&json).unwrap();
        assert_eq!(MultiPoly::from_json(&back).unwrap(), p);
    }

    #[test]
    fn display_round_trip() {
        let p = poly("(1 - rho)*t1^2*t3 + 2*t2 - 7");
        let q = MultiPoly::parse(&p.to_string(), TV).unwrap();
        assert_eq!(p, q);
    }
}
