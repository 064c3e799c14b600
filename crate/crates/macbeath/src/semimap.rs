//! Rational coordinate maps with an optional Galois/conjugation twist on
//! the input point, modelling both the Weil-datum isomorphisms f_sigma^j
//! and anticonformal maps like J uniformly.
//!
//! A map A paired with twist g acts as p -> A(kappa_g(p)). Composition obeys
//! (A o kappa_g) o (B o kappa_h) = (A o B^g) o kappa_{gh}, where B^g twists
//! the coefficients of B.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curve::{interpret, CurveElement, CurveEval, CurveSpec, CURVE_VARS};
use crate::cyclotomic::GaloisElem;
use crate::error::{Error, Result};
use crate::expr::Expr;

/// Domain or codomain of a map: a curve of the Macbeath family, or a plain
/// affine space with named coordinates.
#[derive(Clone, PartialEq, Debug)]
pub enum Space {
    Curve(Arc<CurveSpec>),
    Affine(Vec<String>),
}

impl Space {
    pub fn coordinate_names(&self) -> Vec<String> {
        match self {
            Space::Curve(_) => CURVE_VARS.iter().map(|s| s.to_string()).collect(),
            Space::Affine(names) => names.clone(),
        }
    }

    pub fn galois_twist(&self, g: GaloisElem) -> Space {
        match self {
            Space::Curve(spec) => Space::Curve(spec.galois_twist(g)),
            Space::Affine(names) => Space::Affine(names.clone()),
        }
    }
}

#[derive(Clone)]
pub struct SemiMap {
    pub name: String,
    pub twist: GaloisElem,
    pub domain: Space,
    pub codomain: Space,
    pub components: Vec<Expr>,
}

impl SemiMap {
    pub fn new(
        name: &str,
        twist: GaloisElem,
        domain: Space,
        codomain: Space,
        components: Vec<Expr>,
    ) -> Result<Self> {
        let want = codomain.coordinate_names().len();
        if components.len() != want {
            return Err(Error::ComposeMismatch(format!(
                "map {} has {} components, codomain wants {}",
                name,
                components.len(),
                want
            )));
        }
        Ok(SemiMap {
            name: name.to_string(),
            twist,
            domain,
            codomain,
            components,
        })
    }

    pub fn rational(name: &str, domain: Space, codomain: Space, exprs: &[&str]) -> Result<Self> {
        let components = exprs
            .iter()
            .map(|s| Expr::parse(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, GaloisElem::identity(), domain, codomain, components)
    }

    pub fn identity_on(space: &Space) -> Self {
        let components = space
            .coordinate_names()
            .iter()
            .map(|n| Expr::var(n))
            .collect();
        SemiMap {
            name: "id".to_string(),
            twist: GaloisElem::identity(),
            domain: space.clone(),
            codomain: space.clone(),
            components,
        }
    }

    /// Pure coordinatewise conjugation of an affine space.
    pub fn conjugation_on(space: &Space) -> Self {
        let components = space
            .coordinate_names()
            .iter()
            .map(|n| Expr::var(n))
            .collect();
        SemiMap {
            name: "conj".to_string(),
            twist: GaloisElem::conjugation(),
            domain: space.clone(),
            codomain: space.galois_twist(GaloisElem::conjugation()),
            components,
        }
    }

    pub fn is_twisted(&self) -> bool {
        !self.twist.is_identity()
    }

    /// Coefficient twist: f^g with every constant moved through g and the
    /// spaces twisted accordingly.
    pub fn galois_twist(&self, g: GaloisElem) -> SemiMap {
        SemiMap {
            name: if g.is_identity() {
                self.name.clone()
            } else {
                format!("{}^{}", self.name, g)
            },
            twist: self.twist,
            domain: self.domain.galois_twist(g),
            codomain: self.codomain.galois_twist(g),
            components: self
                .components
                .iter()
                .map(|e| e.galois_twist(g))
                .collect(),
        }
    }

    /// outer o self (apply self first). Twist-aware symbolic substitution.
    pub fn then(&self, outer: &SemiMap) -> Result<SemiMap> {
        if self.codomain != outer.domain {
            return Err(Error::ComposeMismatch(format!(
                "codomain of {} does not match domain of {}",
                self.name, outer.name
            )));
        }
        let inner_names = self.domain.coordinate_names();
        let outer_names = outer.domain.coordinate_names();
        let mut map = BTreeMap::new();
        for (i, n) in outer_names.iter().enumerate() {
            map.insert(n.clone(), self.components[i].galois_twist(outer.twist));
        }
        let components = outer
            .components
            .iter()
            .map(|e| e.substitute(&map))
            .collect::<Vec<_>>();
        // Components of the composite read the inner domain's coordinates.
        let _ = inner_names;
        Ok(SemiMap {
            name: format!("{}∘{}", outer.name, self.name),
            twist: outer.twist.compose(self.twist),
            domain: self.domain.clone(),
            codomain: outer.codomain.clone(),
            components,
        })
    }

    /// Normal form on a curve domain: the components interpreted in the
    /// function field of domain^twist (where the expressions live after the
    /// point twist).
    pub fn normal_form(&self) -> Result<Vec<CurveElement>> {
        let Space::Curve(spec) = &self.domain else {
            return Err(Error::Unsupported(
                "normal form needs a curve domain".into(),
            ));
        };
        let twisted = spec.galois_twist(self.twist);
        self.components
            .iter()
            .map(|e| interpret(e, &twisted))
            .collect()
    }

    /// Exact map equality on a common curve domain.
    pub fn equals(&self, other: &SemiMap) -> Result<bool> {
        if self.twist != other.twist
            || self.domain != other.domain
            || self.codomain.coordinate_names().len() != other.codomain.coordinate_names().len()
        {
            return Ok(false);
        }
        Ok(self.normal_form()? == other.normal_form()?)
    }

    /// Substitute the map's components at given function-field values of its
    /// domain coordinates (the values first moved through the twist).
    pub fn pull_through(&self, inputs: &[CurveElement]) -> Result<Vec<CurveElement>> {
        let names = self.domain.coordinate_names();
        if names.len() != inputs.len() {
            return Err(Error::ComposeMismatch(format!(
                "{} inputs for map {} with {} coordinates",
                inputs.len(),
                self.name,
                names.len()
            )));
        }
        let mut bindings = BTreeMap::new();
        let mut spec: Option<Arc<CurveSpec>> = None;
        for (n, v) in names.iter().zip(inputs.iter()) {
            let tv = if self.twist.is_identity() {
                v.clone()
            } else {
                v.galois_twist(self.twist)
            };
            spec = Some(tv.spec().clone());
            bindings.insert(n.clone(), tv);
        }
        let spec = spec.ok_or_else(|| Error::Unsupported("map with no coordinates".into()))?;
        let ctx = CurveEval::with_bindings(&spec, bindings);
        self.components.iter().map(|e| e.eval(&ctx)).collect()
    }

    /// Substitute the defining relations of the codomain curve at the map's
    /// components, reduced in the function field of domain^twist. Returns
    /// the three residuals; the map is well defined iff all are zero.
    pub fn curve_residuals(&self) -> Result<Vec<CurveElement>> {
        let Space::Curve(cod) = &self.codomain else {
            return Err(Error::Unsupported(
                "curve preservation needs a curve codomain".into(),
            ));
        };
        let nf = self.normal_form()?;
        let mut residuals = Vec::with_capacity(3);
        for i in 0..3 {
            // y_i^2 - f_i(x) with the map's components substituted.
            let y = &nf[i + 1];
            let quartic = cod.quartic_poly(i);
            let mut fx = CurveElement::constant(y.spec(), crate::cyclotomic::CycScalar::zero());
            for (d, c) in quartic.coeffs().iter().enumerate() {
                let xp = nf[0].pow(d as u32)?;
                fx = fx.try_add(
                    &xp.scale_ratfunc(&crate::poly::RatFunc::constant(c.clone()))?,
                )?;
            }
            residuals.push(y.try_mul(y)?.try_sub(&fx)?);
        }
        Ok(residuals)
    }

    pub fn preserves_curve(&self) -> Result<(bool, Vec<CurveElement>)> {
        let residuals = self.curve_residuals()?;
        Ok((residuals.iter().all(|r| r.is_zero()), residuals))
    }

    /// Smallest k in 1..=maxorder with self^k = id, if any. Powers are
    /// iterated on normal forms, not expression trees.
    pub fn order(&self, maxorder: u32) -> Result<Option<u32>> {
        let id = SemiMap::identity_on(&self.domain).normal_form()?;
        let mut nf = self.normal_form()?;
        let mut twist = self.twist;
        for k in 1..=maxorder {
            if twist.is_identity() && nf == id {
                return Ok(Some(k));
            }
            if k < maxorder {
                nf = self.pull_through(&nf)?;
                twist = self.twist.compose(twist);
            }
        }
        Ok(None)
    }

    pub fn to_json(&self) -> SemiMapJson {
        SemiMapJson {
            twist: if self.twist == GaloisElem::conjugation() {
                "conj".to_string()
            } else {
                format!("sigma^{}", self.twist.exponent())
            },
            components: self.components.iter().map(|e| e.to_string()).collect(),
        }
    }
}

impl fmt::Debug for SemiMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: twist {} [", self.name, self.twist)?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
pub struct SemiMapJson {
    pub twist: String,
    pub components: Vec<String>,
}

impl SemiMapJson {
    pub fn parse_twist(&self) -> Result<GaloisElem> {
        if self.twist == "conj" {
            return Ok(GaloisElem::conjugation());
        }
        if let Some(k) = self.twist.strip_prefix("sigma^") {
            let k: i64 = k
                .parse()
                .map_err(|_| Error::Parse(format!("bad twist `{}`", self.twist)))?;
            return Ok(GaloisElem::new(k));
        }
        Err(Error::Parse(format!("bad twist `{}`", self.twist)))
    }
}

/// j o b o j^-1 = b^k, resolved by exhaustive normal-form comparison.
/// Requires j to be an involution (all conjugators here are).
pub fn resolve_conjugation_relation(
    j: &SemiMap,
    b: &SemiMap,
    maxorder: u32,
) -> Result<Option<u32>> {
    let jj = j.then(j)?;
    let id = SemiMap::identity_on(&j.domain);
    if !(jj.twist.is_identity() && jj.normal_form()? == id.normal_form()?) {
        return Err(Error::Unsupported(
            "conjugator is not an involution; inverse unavailable".into(),
        ));
    }
    // j o b o j (apply j, then b, then j).
    let conjugated = j.then(b)?.then(j)?;
    let conj_nf = conjugated.normal_form()?;
    let mut nf = b.normal_form()?;
    let mut twist = b.twist;
    for k in 1..=maxorder {
        if twist == conjugated.twist && nf == conj_nf {
            return Ok(Some(k));
        }
        if k < maxorder {
            nf = b.pull_through(&nf)?;
            twist = b.twist.compose(twist);
        }
    }
    Ok(None)
}

/// The standard maps on Macbeath's model.
pub mod maps {
    use super::*;

    pub fn x_space() -> Space {
        Space::Curve(CurveSpec::macbeath_x())
    }

    /// Sign-flip automorphisms A_1, A_2, A_3.
    pub fn a(i: usize) -> SemiMap {
        let comps = match i {
            1 => ["x", "-y1", "y2", "y4"],
            2 => ["x", "y1", "-y2", "y4"],
            3 => ["x", "y1", "y2", "-y4"],
            _ => panic!("A_i with i in 1..=3"),
        };
        SemiMap::rational(&format!("A{}", i), x_space(), x_space(), &comps).unwrap()
    }

    /// The order-7 automorphism B.
    pub fn b() -> SemiMap {
        SemiMap::rational(
            "B",
            x_space(),
            x_space(),
            &[
                "rho*x",
                "rho^2*y2",
                "rho^2*y4",
                "rho^2*y1*y2/((x - rho^5)*(x - rho^6))",
            ],
        )
        .unwrap()
    }

    /// The anticonformal involution J.
    pub fn j() -> SemiMap {
        let mut m = SemiMap::rational(
            "J",
            x_space(),
            x_space(),
            &["1/x", "y1/x^2", "rho^5*y2/x^2", "rho^3*y4/x^2"],
        )
        .unwrap();
        m.twist = GaloisElem::conjugation();
        m
    }

    /// The Weil datum map f_sigma^k : X -> X^(sigma^k), straight from the
    /// displayed table.
    pub fn f_sigma(k: u8) -> SemiMap {
        let comps: [&str; 4] = match k {
            0 => ["x", "y1", "y2", "y4"],
            1 => [
                "1/x",
                "y1/x^2",
                "rho*y2*y4/(x^2*(x - rho^4)*(x - rho^5))",
                "rho^2*y2/x^2",
            ],
            2 => ["x", "y1", "y4", "y2*y4/((x - rho^4)*(x - rho^5))"],
            3 => ["1/x", "y1/x^2", "rho^2*y2/x^2", "rho^4*y4/x^2"],
            4 => ["x", "y1", "y2*y4/((x - rho^4)*(x - rho^5))", "y2"],
            5 => [
                "1/x",
                "y1/x^2",
                "rho^4*y4/x^2",
                "rho*y2*y4/(x^2*(x - rho^4)*(x - rho^5))",
            ],
            _ => panic!("f_sigma^k with k mod 6"),
        };
        let spec = CurveSpec::macbeath_x();
        let cod = Space::Curve(spec.galois_twist(GaloisElem::new(k as i64)));
        SemiMap::rational(&format!("f_s{}", k), x_space(), cod, &comps).unwrap()
    }

    /// The dessin map beta = x^7 to the line.
    pub fn beta() -> SemiMap {
        SemiMap::rational(
            "beta",
            x_space(),
            Space::Affine(vec!["z".to_string()]),
            &["x^7"],
        )
        .unwrap()
    }

    /// delta = 1/x^7, the chiral partner.
    pub fn delta() -> SemiMap {
        SemiMap::rational(
            "delta",
            x_space(),
            Space::Affine(vec!["z".to_string()]),
            &["1/x^7"],
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::maps::*;
    use super::*;

    #[test]
    fn sign_flips_preserve_curve() {
        for i in 1..=3 {
            let (ok, _) = a(i).preserves_curve().unwrap();
            assert!(ok, "A{} must preserve the relations", i);
        }
    }

    #[test]
    fn b_preserves_curve_and_has_order_7() {
        let b = b();
        let (ok, res) = b.preserves_curve().unwrap();
        assert!(ok, "residuals: {:?}", res);
        assert_eq!(b.order(7).unwrap(), Some(7));
    }

    #[test]
    fn wrong_map_fails_with_nonzero_residual() {
        // sending y1 -> y2 only hits the wrong quartic
        let m = SemiMap::rational("bad", x_space(), x_space(), &["x", "y2", "y2", "y4"]).unwrap();
        let (ok, res) = m.preserves_curve().unwrap();
        assert!(!ok);
        assert!(res.iter().any(|r| !r.is_zero()));
    }

    #[test]
    fn j_is_an_involution() {
        let j = j();
        let (ok, _) = j.preserves_curve().unwrap();
        assert!(ok, "J must be well defined");
        let jj = j.then(&j).unwrap();
        assert!(jj.twist.is_identity());
        let id = SemiMap::identity_on(&x_space());
        assert_eq!(jj.normal_form().unwrap(), id.normal_form().unwrap());
    }

    #[test]
    fn j_fixes_sign_flips_under_conjugation() {
        let j = j();
        for i in 1..=3 {
            let k = resolve_conjugation_relation(&j, &a(i), 2).unwrap();
            assert_eq!(k, Some(1), "J A{} J^-1 = A{}", i, i);
        }
    }

    #[test]
    fn j_b_conjugation_relation() {
        // The ambiguous commutation statement resolves to k = 1.
        let k = resolve_conjugation_relation(&j(), &b(), 7).unwrap();
        assert_eq!(k, Some(1));
    }

    #[test]
    fn beta_invariant_under_b() {
        let composite = b().then(&beta()).unwrap();
        assert!(composite.equals(&beta()).unwrap());
    }

    #[test]
    fn delta_is_conj_after_beta_after_j() {
        // C o beta o J with C(z) = conj(z) equals delta = 1/x^7.
        let line = Space::Affine(vec!["z".to_string()]);
        let c = SemiMap::conjugation_on(&line);
        let composite = j().then(&beta()).unwrap().then(&c).unwrap();
        assert!(composite.twist.is_identity());
        assert_eq!(
            composite.normal_form().unwrap(),
            delta().normal_form().unwrap()
        );
    }

    #[test]
    fn listed_weil_maps_preserve_their_twisted_curves() {
        for k in 0..6u8 {
            let (ok, res) = f_sigma(k).preserves_curve().unwrap();
            assert!(ok, "f_sigma^{} residuals: {:?}", k, res);
        }
    }

    #[test]
    fn composition_respects_identity() {
        let b = b();
        let id = SemiMap::identity_on(&x_space());
        let m = id.then(&b).unwrap();
        assert!(m.equals(&b).unwrap());
        let m2 = b.then(&id).unwrap();
        assert!(m2.equals(&b).unwrap());
    }

    #[test]
    fn json_twist_round_trip() {
        let j = j();
        let json = j.to_json();
        assert_eq!(json.twist, "conj");
        assert_eq!(json.parse_twist().unwrap(), GaloisElem::conjugation());
        let b = b().to_json();
        assert_eq!(b.twist, "sigma^0");
        assert_eq!(b.parse_twist().unwrap(), GaloisElem::identity());
    }
}
