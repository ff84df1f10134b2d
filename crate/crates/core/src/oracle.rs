//! Sampling test for coderivative membership.
//!
//! `x* ∈ D̂*P_C(x̄)(y*)` holds iff
//!
//! ```text
//! limsup_{u → x̄} [⟨x*, u − x̄⟩ − ⟨y*, P(u) − P(x̄)⟩] / (‖u − x̄‖ + ‖P(u) − P(x̄)‖) ≤ 0.
//! ```
//!
//! The oracle evaluates the quotient on shrinking spheres around `x̄` along
//! seeded random directions and a fixed list of structured directions. It
//! never consults the closed forms. A positive quotient that persists at the
//! two smallest radii falsifies membership; anything else is evidence only.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::coverage::{touch, Op};
use crate::decomposition::Anchor;
use crate::error::{Error, Result};
use crate::projections::{project_unchecked, ConvexSet};
use crate::space::{Dual, LpSpace, Primal};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub radii: Vec<f64>,
    pub directions_per_radius: usize,
    pub seed: u64,
    pub reject_threshold: f64,
    pub accept_threshold: f64,
    pub structured_probes: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            radii: (1..=5).map(|k| 10f64.powi(-k)).collect(),
            directions_per_radius: 256,
            seed: 0,
            reject_threshold: 1e-2,
            accept_threshold: 1e-3,
            structured_probes: true,
        }
    }
}

impl OracleConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.radii.is_empty() {
            return Err(Error::InvalidConfig("no radii".into()));
        }
        if self.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidConfig("radii must be positive".into()));
        }
        if self.radii.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidConfig("radii must be strictly decreasing".into()));
        }
        let positive = |t: f64| t.is_finite() && t > 0.0;
        if !positive(self.reject_threshold) || !positive(self.accept_threshold) {
            return Err(Error::InvalidConfig("thresholds must be positive".into()));
        }
        if self.reject_threshold <= self.accept_threshold {
            return Err(Error::InvalidConfig(
                "reject threshold must exceed accept threshold".into(),
            ));
        }
        if self.directions_per_radius == 0 && !self.structured_probes {
            return Err(Error::InvalidConfig("no probe directions".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleVerdict {
    RejectedWithWitness {
        u: Primal,
        quotient: f64,
        /// Label of the probe direction that produced the witness.
        probe: String,
        max_quotient_per_radius: Vec<f64>,
    },
    NotRejected {
        max_quotient_per_radius: Vec<f64>,
    },
}

impl OracleVerdict {
    pub fn is_rejected(&self) -> bool {
        matches!(self, Self::RejectedWithWitness { .. })
    }

    pub fn max_quotient_per_radius(&self) -> &[f64] {
        match self {
            Self::RejectedWithWitness {
                max_quotient_per_radius,
                ..
            }
            | Self::NotRejected {
                max_quotient_per_radius,
            } => max_quotient_per_radius,
        }
    }

    /// Largest quotient seen at the smallest radius.
    pub fn final_max(&self) -> f64 {
        *self.max_quotient_per_radius().last().expect("at least one radius")
    }

    /// Not rejected and the final maximum is at most the accept threshold.
    pub fn supports_membership(&self, cfg: &OracleConfig) -> bool {
        !self.is_rejected() && self.final_max() <= cfg.accept_threshold
    }
}

/// Both denominators of the sampled quotient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuotientDetail {
    /// Quotient with denominator `‖u − x̄‖ + ‖P(u) − P(x̄)‖`.
    pub sum: f64,
    /// Quotient with denominator `√(‖u − x̄‖² + ‖P(u) − P(x̄)‖²)`.
    pub euclid: f64,
    /// `euclid / sum`, which lies in `[1, √2]` whenever the numerator is
    /// nonzero.
    pub ratio: f64,
}

struct Evaluator<'a> {
    space: &'a LpSpace,
    set: &'a ConvexSet,
    xbar: &'a Primal,
    pxbar: Primal,
    xs: &'a Dual,
    ys: &'a Dual,
}

impl<'a> Evaluator<'a> {
    fn new(space: &'a LpSpace, set: &'a ConvexSet, xbar: &'a Primal, xs: &'a Dual, ys: &'a Dual) -> Self {
        Self {
            space,
            set,
            xbar,
            pxbar: project_unchecked(space, set, xbar),
            xs,
            ys,
        }
    }

    fn detail(&self, u: &Primal) -> Result<QuotientDetail> {
        let du = u - self.xbar;
        let dp = &project_unchecked(self.space, self.set, u) - &self.pxbar;
        let a = self.space.raw_norm(du.coords());
        let b = self.space.raw_norm(dp.coords());
        if a + b <= self.space.theta_threshold() {
            return Err(Error::Degenerate("u must differ from the base point"));
        }
        let num = self.space.dot(self.xs, &du) - self.space.dot(self.ys, &dp);
        let sum = num / (a + b);
        let euclid = num / a.hypot(b);
        let ratio = if num == 0.0 { 1.0 } else { euclid / sum };
        Ok(QuotientDetail { sum, euclid, ratio })
    }
}

fn check_inputs(space: &LpSpace, set: &ConvexSet, xbar: &Primal, xs: &Dual, ys: &Dual) -> Result<()> {
    space.check_len(xbar.len())?;
    space.check_len(xs.len())?;
    space.check_len(ys.len())?;
    set.validate(space)
}

/// The defining quotient at a single point `u`.
pub fn coderiv_quotient(
    space: &LpSpace,
    set: &ConvexSet,
    xbar: &Primal,
    xs: &Dual,
    ys: &Dual,
    u: &Primal,
) -> Result<f64> {
    Ok(quotient_detail(space, set, xbar, xs, ys, u)?.sum)
}

/// The quotient under both equivalent product norms.
pub fn quotient_detail(
    space: &LpSpace,
    set: &ConvexSet,
    xbar: &Primal,
    xs: &Dual,
    ys: &Dual,
    u: &Primal,
) -> Result<QuotientDetail> {
    touch(Op::CoderivQuotient);
    check_inputs(space, set, xbar, xs, ys)?;
    space.check_len(u.len())?;
    Evaluator::new(space, set, xbar, xs, ys).detail(u)
}

fn push(out: &mut Vec<(String, Primal)>, space: &LpSpace, label: String, v: Primal) {
    let norm = space.raw_norm(v.coords());
    if norm > space.theta_threshold() && norm.is_finite() {
        out.push((label, v.scale(1.0 / norm)));
    }
}

/// Fixed, input-derived probe directions (unit norm, labelled), in a
/// deterministic order.
///
/// Bases are `x̄`, `J*(y*)`, `J*(x*)`, `J*(x* − y*)`, `J*(o*(y*))`,
/// `J*(o*(x*))`, their masked and unmasked parts and their positive and
/// negative parts, and the coordinate directions. For the ball and the
/// cylinder every non-coordinate base `v` is also lifted to `v ± α x̄_M` with
/// `α` large enough that the lifted direction leaves, respectively enters,
/// the set. Every direction appears with both signs.
pub fn structured_probes(space: &LpSpace, set: &ConvexSet, xbar: &Primal, xs: &Dual, ys: &Dual) -> Vec<(String, Primal)> {
    let n = space.dim();
    let mut bases: Vec<(String, Primal)> = vec![
        ("x".into(), xbar.clone()),
        ("J*(y*)".into(), space.duality_map_inv(ys)),
        ("J*(x*)".into(), space.duality_map_inv(xs)),
        ("J*(x*-y*)".into(), space.duality_map_inv(&(xs - ys))),
    ];
    if let Ok(anchor) = Anchor::new(space, xbar.clone()) {
        bases.push(("J*(o*(y*))".into(), space.duality_map_inv(&anchor.o_star(ys))));
        bases.push(("J*(o*(x*))".into(), space.duality_map_inv(&anchor.o_star(xs))));
    }
    let mask = set.radial_mask(n).or_else(|| match set {
        ConvexSet::CoordSubspace { mask } => Some(mask.clone()),
        _ => None,
    });
    let mut variants = Vec::new();
    for (label, v) in &bases {
        variants.push((label.clone(), v.clone()));
        if let Some(m) = mask.as_ref().filter(|m| !m.is_full()) {
            variants.push((format!("{label}_M"), m.apply(v)));
            variants.push((format!("{label}_M'"), m.complement().apply(v)));
        }
        variants.push((format!("{label}+"), v.positive_part()));
        variants.push((format!("{label}-"), v.negative_part()));
    }

    let mut unit = Vec::new();
    for (label, v) in variants {
        push(&mut unit, space, label, v);
    }
    if let Some(m) = set.radial_mask(n) {
        let a = m.apply(xbar);
        let an = space.raw_norm(a.coords());
        if an > space.theta_threshold() {
            let ja = space.duality_map(&a);
            let lifted: Vec<_> = unit
                .iter()
                .flat_map(|(label, v)| {
                    let alpha = space.dot(&ja, v).abs() / (an * an) + 0.1 / an;
                    [
                        (format!("{label}^up"), v.axpy(alpha, &a)),
                        (format!("{label}^down"), v.axpy(-alpha, &a)),
                    ]
                })
                .collect();
            for (label, v) in lifted {
                push(&mut unit, space, label, v);
            }
        }
    }
    for i in 0..n {
        push(&mut unit, space, format!("e{i}"), Primal::basis(n, i));
    }
    unit.into_iter()
        .flat_map(|(label, v)| {
            let neg = -&v;
            [(format!("+{label}"), v), (format!("-{label}"), neg)]
        })
        .collect()
}

/// Seeded random unit direction for `(radius index, direction index)`; each
/// pair owns an independent ChaCha substream so the draw does not depend on
/// evaluation order.
pub fn random_direction(space: &LpSpace, seed: u64, radius_index: usize, direction_index: usize) -> Primal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((radius_index as u64) << 32) | direction_index as u64);
    loop {
        let g: Vec<f64> = (0..space.dim()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = space.raw_norm(&g);
        if norm > space.theta_threshold() {
            return Primal::new(g).scale(1.0 / norm);
        }
    }
}

/// Samples the quotient over shrinking spheres around `x̄` and decides
/// whether `x* ∈ D̂*P_C(x̄)(y*)` can be rejected.
pub fn test_membership(
    space: &LpSpace,
    set: &ConvexSet,
    xbar: &Primal,
    xs: &Dual,
    ys: &Dual,
    cfg: &OracleConfig,
) -> Result<OracleVerdict> {
    touch(Op::TestMembership);
    check_inputs(space, set, xbar, xs, ys)?;
    cfg.validate()?;
    let eval = Evaluator::new(space, set, xbar, xs, ys);
    let probes = if cfg.structured_probes {
        structured_probes(space, set, xbar, xs, ys)
    } else {
        Vec::new()
    };

    let mut maxima = Vec::with_capacity(cfg.radii.len());
    let mut best_at_radius = Vec::with_capacity(cfg.radii.len());
    for (k, &rho) in cfg.radii.iter().enumerate() {
        let mut best: Option<(f64, Primal, String)> = None;
        let mut consider = |label: &dyn Fn() -> String, d: &Primal| -> Result<()> {
            let u = xbar.axpy(rho, d);
            let q = eval.detail(&u)?.sum;
            if best.as_ref().is_none_or(|(b, _, _)| q > *b) {
                best = Some((q, u, label()));
            }
            Ok(())
        };
        for (label, d) in &probes {
            consider(&|| label.clone(), d)?;
        }
        for j in 0..cfg.directions_per_radius {
            let d = random_direction(space, cfg.seed, k, j);
            consider(&|| format!("random[{k},{j}]"), &d)?;
        }
        let best = best.expect("at least one probe");
        maxima.push(best.0);
        best_at_radius.push(best);
    }

    let tail = &maxima[maxima.len().saturating_sub(2)..];
    if tail.iter().all(|&m| m >= cfg.reject_threshold) {
        let (quotient, u, probe) = best_at_radius.pop().expect("at least one radius");
        Ok(OracleVerdict::RejectedWithWitness {
            u,
            quotient,
            probe,
            max_quotient_per_radius: maxima,
        })
    } else {
        Ok(OracleVerdict::NotRejected {
            max_quotient_per_radius: maxima,
        })
    }
}

/// Whether the sequence is non-increasing up to `allowed` inversions.
pub fn nonincreasing_trend(values: &[f64], allowed: usize) -> bool {
    values.windows(2).filter(|w| w[1] > w[0] + 1e-12).count() <= allowed
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(v: &[f64]) -> Primal {
        Primal::new(v.to_vec())
    }

    fn d(v: &[f64]) -> Dual {
        Dual::new(v.to_vec())
    }

    #[test]
    fn config_validation() {
        assert!(OracleConfig::default().validate().is_ok());
        let bad = |f: fn(&mut OracleConfig)| {
            let mut c = OracleConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.radii = vec![1e-3, 1e-2]));
        assert!(bad(|c| c.radii.clear()));
        assert!(bad(|c| c.reject_threshold = 1e-4));
        assert!(bad(|c| c.accept_threshold = 0.0));
        assert!(bad(|c| {
            c.directions_per_radius = 0;
            c.structured_probes = false
        }));
    }

    #[test]
    fn quotient_examples() {
        let s = LpSpace::new(2, 2.0).unwrap();
        let ball = ConvexSet::ball(1.0).unwrap();
        let z = s.zero_dual();
        let q = coderiv_quotient(&s, &ball, &p(&[1.0, 0.0]), &z, &z, &p(&[1.3, -0.2])).unwrap();
        assert_eq!(q, 0.0);

        let xs = d(&[2.0, -1.0]);
        let q = coderiv_quotient(&s, &ball, &p(&[0.2, 0.1]), &xs, &xs, &p(&[0.21, 0.09])).unwrap();
        assert!(q.abs() < 1e-15);

        let t = 1e-3;
        let det = quotient_detail(&s, &ball, &p(&[1.0, 0.0]), &z, &d(&[0.0, 1.0]), &p(&[1.0, t])).unwrap();
        let pu = t / (1.0f64 + t * t).sqrt();
        let moved = ((1.0 / (1.0f64 + t * t).sqrt() - 1.0).powi(2) + pu * pu).sqrt();
        assert_relative_eq!(det.sum, -pu / (t + moved), epsilon = 1e-12);
        assert_relative_eq!(det.sum, -0.5, epsilon = 1e-3);
        assert!(det.ratio >= 1.0 && det.ratio <= std::f64::consts::SQRT_2 + 1e-12);

        assert!(coderiv_quotient(&s, &ball, &p(&[1.0, 0.0]), &z, &z, &p(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn interior_singleton_and_perturbation() {
        let s = LpSpace::new(3, 3.0).unwrap();
        let ball = ConvexSet::ball(1.0).unwrap();
        let xbar = p(&[0.2, -0.1, 0.3]);
        let ys = d(&[0.5, 1.0, -2.0]);
        let cfg = OracleConfig::with_seed(7);
        let v = test_membership(&s, &ball, &xbar, &ys, &ys, &cfg).unwrap();
        assert!(v.supports_membership(&cfg), "{v:?}");

        let xs = d(&[0.6, 1.0, -2.0]);
        let v = test_membership(&s, &ball, &xbar, &xs, &ys, &cfg).unwrap();
        assert!(v.is_rejected());
    }

    #[test]
    fn empty_fiber_rejected() {
        let s = LpSpace::new(2, 2.0).unwrap();
        let ball = ConvexSet::ball(1.0).unwrap();
        let xbar = p(&[1.0, 0.0]);
        let ys = s.duality_map(&xbar);
        for xs in [s.zero_dual(), d(&[1.0, 0.0]), d(&[0.3, -2.0]), d(&[-5.0, 1.0])] {
            let v = test_membership(&s, &ball, &xbar, &xs, &ys, &OracleConfig::default()).unwrap();
            let OracleVerdict::RejectedWithWitness { u, quotient, .. } = v else {
                panic!("expected rejection for {xs:?}")
            };
            let again = coderiv_quotient(&s, &ball, &xbar, &xs, &ys, &u).unwrap();
            assert_eq!(again, quotient);
            assert!(quotient >= 1e-2);
        }
    }

    #[test]
    fn deterministic_directions() {
        let s = LpSpace::new(4, 1.5).unwrap();
        assert_eq!(random_direction(&s, 3, 1, 2), random_direction(&s, 3, 1, 2));
        assert_ne!(random_direction(&s, 3, 1, 2), random_direction(&s, 3, 2, 1));
        assert_relative_eq!(s.norm(&random_direction(&s, 9, 0, 0)), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn trend() {
        assert!(nonincreasing_trend(&[3.0, 2.0, 1.0], 0));
        assert!(nonincreasing_trend(&[3.0, 2.0, 2.5, 1.0], 1));
        assert!(!nonincreasing_trend(&[1.0, 2.0, 1.0, 3.0], 1));
    }
}
