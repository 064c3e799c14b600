//! Floating-point cross-check harness: the complex embedding of Q(zeta_7),
//! point sampling on the curve with all sign branches, and tolerance-based
//! residual verification mirroring every exact claim.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num::complex::Complex64;
use num::ToPrimitive;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cyclotomic::{CycScalar, Rat};
use crate::curve::CurveSpec;
use crate::error::{Error, Result};
use crate::expr::{EvalContext, Expr};
use crate::poly::{RatFunc, UniPoly};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_POINT_COUNT: usize = 20;

/// zeta_7 = e^(2 pi i / 7).
pub fn zeta() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / 7.0)
}

fn rat_to_f64(r: &Rat) -> f64 {
    // Exact conversion is fine at the sizes appearing here; fall back to
    // a quotient of f64s for very large entries.
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Evaluate the basis expansion at zeta.
pub fn embed(a: &CycScalar) -> Complex64 {
    let z = zeta();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut zk = Complex64::new(1.0, 0.0);
    for i in 0..6 {
        acc += rat_to_f64(a.coeff(i)) * zk;
        zk *= z;
    }
    acc
}

pub fn eval_unipoly(p: &UniPoly, x: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in p.coeffs().iter().rev() {
        acc = acc * x + embed(c);
    }
    acc
}

pub fn eval_ratfunc(r: &RatFunc, x: Complex64) -> Complex64 {
    eval_unipoly(r.num(), x) / eval_unipoly(r.den(), x)
}

/// A sampled point of the curve with its three square-root sign bits.
#[derive(Clone, Debug)]
pub struct EmbeddedPoint {
    pub coords: [Complex64; 4],
    pub branch: u8,
    /// The exact rational x the point was sampled from.
    pub x_exact: Rat,
}

impl EmbeddedPoint {
    /// Max residual of the three defining relations, relative to the
    /// magnitude of the quartic values.
    pub fn relation_residual(&self, spec: &Arc<CurveSpec>) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            let f = eval_unipoly(&spec.quartic_poly(i), self.coords[0]);
            let y = self.coords[i + 1];
            let resid = (y * y - f).norm() / f.norm().max(1.0);
            worst = worst.max(resid);
        }
        worst
    }
}

/// Deterministic sampler: random rational x (branch values rejected), the
/// principal square roots of the three quartics, and all 8 sign branches.
pub fn sample_points(
    spec: &Arc<CurveSpec>,
    count: usize,
    seed: u64,
) -> Vec<EmbeddedPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count * 8);
    let mut found = 0usize;
    while found < count {
        let p: i64 = rng.gen_range(-40..=40);
        let q: i64 = rng.gen_range(1..=9);
        let x_exact = Rat::new(p.into(), q.into());
        let x = Complex64::new(rat_to_f64(&x_exact), 0.0);
        // Reject x too close to a branch value (quartic root).
        let mut ok = true;
        let mut roots = [Complex64::new(0.0, 0.0); 3];
        for i in 0..3 {
            let f = eval_unipoly(&spec.quartic_poly(i), x);
            if f.norm() < 1e-6 {
                ok = false;
                break;
            }
            roots[i] = f.sqrt();
        }
        if !ok {
            continue;
        }
        found += 1;
        for branch in 0u8..8 {
            let mut coords = [x, roots[0], roots[1], roots[2]];
            for i in 0..3 {
                if branch & (1 << i) != 0 {
                    coords[i + 1] = -coords[i + 1];
                }
            }
            out.push(EmbeddedPoint {
                coords,
                branch,
                x_exact: x_exact.clone(),
            });
        }
    }
    out
}

/// Complex evaluation context for expressions.
pub struct ComplexEval {
    pub bindings: BTreeMap<String, Complex64>,
}

impl EvalContext for ComplexEval {
    type Value = Complex64;

    fn constant(&self, c: &CycScalar) -> Result<Complex64> {
        Ok(embed(c))
    }

    fn var(&self, name: &str) -> Result<Complex64> {
        self.bindings
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnboundVar(name.to_string()))
    }

    fn add(&self, a: &Complex64, b: &Complex64) -> Result<Complex64> {
        Ok(a + b)
    }

    fn sub(&self, a: &Complex64, b: &Complex64) -> Result<Complex64> {
        Ok(a - b)
    }

    fn mul(&self, a: &Complex64, b: &Complex64) -> Result<Complex64> {
        Ok(a * b)
    }

    fn div(&self, a: &Complex64, b: &Complex64) -> Result<Complex64> {
        if b.norm() == 0.0 {
            return Err(Error::Pole);
        }
        Ok(a / b)
    }
}

pub fn eval_expr_at(expr: &Expr, bindings: BTreeMap<String, Complex64>) -> Result<Complex64> {
    expr.eval(&ComplexEval { bindings })
}

pub fn curve_bindings(pt: &EmbeddedPoint) -> BTreeMap<String, Complex64> {
    let mut m = BTreeMap::new();
    for (i, name) in crate::curve::CURVE_VARS.iter().enumerate() {
        m.insert(name.to_string(), pt.coords[i]);
    }
    m
}

/// Outcome of one numeric claim, mirroring an exact identity.
#[derive(Clone, Debug, Serialize)]
pub struct NumericCheck {
    pub id: String,
    pub max_residual: f64,
    pub points: usize,
    pub skipped_poles: usize,
    pub tolerance: f64,
    pub pass: bool,
}

pub struct ResidualAccumulator {
    pub max_residual: f64,
    pub points: usize,
    pub skipped_poles: usize,
}

impl ResidualAccumulator {
    pub fn new() -> Self {
        ResidualAccumulator {
            max_residual: 0.0,
            points: 0,
            skipped_poles: 0,
        }
    }

    pub fn record(&mut self, r: Result<f64>) {
        match r {
            Ok(v) => {
                self.points += 1;
                if v.is_finite() {
                    self.max_residual = self.max_residual.max(v);
                } else {
                    self.max_residual = f64::INFINITY;
                }
            }
            Err(Error::Pole) => self.skipped_poles += 1,
            Err(_) => self.max_residual = f64::INFINITY,
        }
    }

    pub fn finish(self, id: &str, tolerance: f64) -> NumericCheck {
        NumericCheck {
            id: id.to_string(),
            max_residual: self.max_residual,
            points: self.points,
            skipped_poles: self.skipped_poles,
            tolerance,
            pass: self.points > 0 && self.max_residual < tolerance,
        }
    }
}

/// Relative difference |a - b| / max(1, |a|, |b|).
pub fn rel_diff(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_of_rho() {
        let r = embed(&CycScalar::rho());
        assert!((r.norm() - 1.0).abs() < 1e-12);
        assert!((r - zeta()).norm() < 1e-12);
    }

    #[test]
    fn quadratic_subfield_value() {
        // rho + rho^2 + rho^4 = (-1 + i sqrt(7)) / 2, a root of z^2 + z + 2
        let s = &(&CycScalar::rho_pow(1) + &CycScalar::rho_pow(2)) + &CycScalar::rho_pow(4);
        let v = embed(&s);
        let expected = Complex64::new(-0.5, (7.0f64).sqrt() / 2.0);
        assert!((v - expected).norm() < 1e-12);
        // minimal polynomial check
        assert!((v * v + v + Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn trace_embedding() {
        let t = CycScalar::rho().relative_trace(crate::cyclotomic::Subgroup::Full);
        assert!((embed(&t) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn samples_satisfy_relations() {
        let spec = CurveSpec::macbeath_x();
        let pts = sample_points(&spec, 5, 0);
        assert_eq!(pts.len(), 40);
        for p in &pts {
            assert!(p.relation_residual(&spec) < 1e-10);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = CurveSpec::macbeath_x();
        let a = sample_points(&spec, 7, 42);
        let b = sample_points(&spec, 7, 42);
        for (p, q) in a.iter().zip(b.iter()) {
            assert_eq!(p.x_exact, q.x_exact);
            assert_eq!(p.branch, q.branch);
            assert_eq!(p.coords[1], q.coords[1]);
        }
    }

    #[test]
    fn branch_collapse_at_x_equal_one_still_valid() {
        // x = 1 zeroes the first quartic; the point is still on the curve.
        let spec = CurveSpec::macbeath_x();
        let x = Complex64::new(1.0, 0.0);
        let y1 = eval_unipoly(&spec.quartic_poly(0), x).sqrt();
        assert!(y1.norm() < 1e-12);
        let y2 = eval_unipoly(&spec.quartic_poly(1), x).sqrt();
        let y4 = eval_unipoly(&spec.quartic_poly(2), x).sqrt();
        let pt = EmbeddedPoint {
            coords: [x, y1, y2, y4],
            branch: 0,
            x_exact: Rat::from_integer(1.into()),
        };
        assert!(pt.relation_residual(&spec) < 1e-10);
    }
}
