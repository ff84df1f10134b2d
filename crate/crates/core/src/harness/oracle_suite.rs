//! Internal consistency of the limsup oracle.

use rand::Rng;

use super::{Ctx, Regime, SetKind};
use crate::coderivative::coderivative;
use crate::error::Result;
use crate::oracle::{nonincreasing_trend, quotient_detail, random_direction, test_membership, OracleVerdict};
use crate::projections::random_dual;
use crate::space::Dual;

/// Non-increasing positive parts of the per-radius maxima, up to one
/// inversion; nonpositive maxima all count as zero.
/// Quotients below this are rounding noise around an exact zero.
const NOISE_FLOOR: f64 = 1e-9;

fn positive_trend(v: &OracleVerdict) -> bool {
    let pos: Vec<f64> = v
        .max_quotient_per_radius()
        .iter()
        .map(|m| if *m <= NOISE_FLOOR { 0.0 } else { *m })
        .collect();
    nonincreasing_trend(&pos, 1)
}

fn concat(parts: &[&[f64]]) -> Vec<f64> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

pub(super) fn run(ctx: &mut Ctx) -> Result<()> {
    denominators(ctx)?;
    determinism(ctx)?;
    examples(ctx)
}

fn denominators(ctx: &mut Ctx) -> Result<()> {
    let mut t = ctx.checks(
        "denominator-equivalence",
        "sum and euclidean product-norm quotients share sign and differ by a factor in [1, sqrt 2]",
    );
    let mut rng = ctx.rng("denominators");
    let bound = std::f64::consts::SQRT_2 + 1e-12;
    for (k, kind) in [SetKind::Ball, SetKind::Cylinder, SetKind::Cone].into_iter().enumerate() {
        for i in 0..ctx.spec.samples.derivative_points {
            let regime = [Regime::Boundary, Regime::Exterior][i % 2];
            let inst = ctx.instance(kind, regime, i)?;
            let (space, set, x) = (&inst.space, &inst.set, &inst.point);
            let xs = random_dual(space, &mut rng);
            let ys = random_dual(space, &mut rng);
            let rho = 10f64.powf(rng.random_range(-5.0..-1.0));
            let u = x.axpy(rho, &random_direction(space, rng.random(), k, i));
            let d = quotient_detail(space, set, x, &xs, &ys, &u)?;
            let ok = if d.sum == 0.0 {
                d.euclid == 0.0
            } else {
                d.sum.signum() == d.euclid.signum() && d.ratio >= 1.0 - 1e-12 && d.ratio <= bound
            };
            t.metric_max("max_ratio", d.ratio);
            t.check(ok, || concat(&[x.coords(), xs.coords(), ys.coords(), u.coords()]));
        }
    }
    ctx.push(t);
    Ok(())
}

fn determinism(ctx: &mut Ctx) -> Result<()> {
    let mut t = ctx.checks(
        "determinism",
        "identical inputs and seed give identical verdicts and witnesses",
    );
    let mut rng = ctx.rng("determinism");
    for i in 0..ctx.spec.samples.oracle_points {
        let kind = [SetKind::Ball, SetKind::Cylinder, SetKind::Cone][i % 3];
        let inst = ctx.instance(kind, Regime::Boundary, i)?;
        let (space, set, x) = (&inst.space, &inst.set, &inst.point);
        let xs = random_dual(space, &mut rng);
        let ys = random_dual(space, &mut rng);
        let cfg = ctx.oracle(&format!("determinism/{i}"));
        let a = test_membership(space, set, x, &xs, &ys, &cfg)?;
        let b = test_membership(space, set, x, &xs, &ys, &cfg)?;
        t.check(a == b, || x.coords().to_vec());
    }
    ctx.push(t);
    Ok(())
}

fn examples(ctx: &mut Ctx) -> Result<()> {
    let mut member = ctx.checks(
        "interior-adjoint-accepted",
        "inside the ball x* = y* passes with a non-increasing maximum per radius",
    );
    let mut perturbed = ctx.checks(
        "interior-perturbation-rejected",
        "inside the ball x* = y* + 0.1 e_k is rejected along e_k",
    );
    let mut sphere = ctx.checks(
        "sphere-members-trend",
        "at sphere points theta* over -cJ(x) passes with a non-increasing maximum per radius",
    );
    let mut empty = ctx.checks(
        "sphere-duality-image-rejected",
        "at sphere points every x* over J(x) is rejected",
    );
    let mut rng = ctx.rng("examples");
    for i in 0..ctx.spec.samples.oracle_points {
        let inst = ctx.instance(SetKind::Ball, Regime::Interior, i)?;
        let (space, set, x) = (&inst.space, &inst.set, &inst.point);
        let n = space.dim();
        let ys = random_dual(space, &mut rng);
        let cfg = ctx.oracle(&format!("examples/interior/{i}"));
        let w = || concat(&[x.coords(), ys.coords()]);
        let xs = coderivative(space, set, x, &ys)?.singleton().cloned().unwrap_or_else(|| space.zero_dual());
        let v = test_membership(space, set, x, &xs, &ys, &cfg)?;
        member.check(
            v.supports_membership(&cfg) && positive_trend(&v),
            w,
        );
        let k = rng.random_range(0..n);
        let shifted = &xs + &Dual::basis(n, k).scale(0.1);
        let v = test_membership(space, set, x, &shifted, &ys, &cfg)?;
        let along = match &v {
            OracleVerdict::RejectedWithWitness { u, .. } => {
                let d = u - x;
                let top = (0..n).max_by(|&a, &b| d.coords()[a].abs().total_cmp(&d.coords()[b].abs()));
                top == Some(k)
            }
            OracleVerdict::NotRejected { .. } => false,
        };
        perturbed.check(v.is_rejected() && along, w);

        let inst = ctx.instance(SetKind::Ball, Regime::Boundary, i)?;
        let (space, set, x) = (&inst.space, &inst.set, &inst.point);
        let jx = space.duality_map(x);
        let c = rng.random_range(0.5..2.0);
        let cfg = ctx.oracle(&format!("examples/sphere/{i}"));
        let v = test_membership(space, set, x, &space.zero_dual(), &jx.scale(-c), &cfg)?;
        sphere.check(
            v.supports_membership(&cfg) && positive_trend(&v),
            || x.coords().to_vec(),
        );
        let xs = random_dual(space, &mut rng);
        let v = test_membership(space, set, x, &xs, &jx, &cfg)?;
        empty.check(v.is_rejected(), || concat(&[x.coords(), xs.coords()]));
    }
    for t in [member, perturbed, sphere, empty] {
        ctx.push(t);
    }
    Ok(())
}
