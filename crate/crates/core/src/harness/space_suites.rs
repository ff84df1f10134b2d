//! Duality-mapping identities and semi-orthogonal decompositions.

use rand::Rng;

use super::instance::spread_point;
use super::Ctx;
use crate::decomposition::{Anchor, DEFAULT_O_TOL};
use crate::error::Result;
use crate::oracle::nonincreasing_trend;
use crate::projections::{random_dual, random_point};
use crate::space::{Dual, LpSpace, Primal};

fn concat(parts: &[&[f64]]) -> Vec<f64> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

/// Standard normal point rescaled by `10^U(-1, 1)`.
fn scaled_point<R: Rng>(space: &LpSpace, rng: &mut R) -> Primal {
    let s = 10f64.powf(rng.random_range(-1.0..1.0));
    random_point(space, rng).scale(s)
}

fn unit(space: &LpSpace, x: &Primal) -> Primal {
    x.scale(1.0 / space.norm(x))
}

pub(super) fn space_identities(ctx: &mut Ctx) -> Result<()> {
    let space = ctx.space.clone();
    let count = ctx.spec.samples.points;

    let mut pairing = ctx.tally("pairing-identity", "<J(x), x> = |x|^2", 1e-9);
    let mut dual_norm = ctx.tally("dual-norm-identity", "|J(x)|_q = |x|_p", 1e-9);
    let mut inverse = ctx.tally("inverse-primal", "J*(J(x)) = x", 1e-8);
    let mut inverse_dual = ctx.tally("inverse-dual", "J(J*(x*)) = x*", 1e-8);
    let mut parity = ctx.tally("parity-homogeneity", "J(-x) = -J(x) and J(cx) = cJ(x) for c > 0", 1e-12);
    let mut rng = ctx.rng("points");
    for _ in 0..count {
        let x = scaled_point(&space, &mut rng);
        let nx = space.norm(&x);
        let jx = space.duality_map(&x);
        let w = || x.coords().to_vec();
        pairing.le((space.pair(&jx, &x)? - nx * nx).abs() / nx.powi(2).max(1.0), w);
        dual_norm.le((space.dual_norm(&jx) - nx).abs() / nx.max(1.0), w);
        let back = space.duality_map_inv(&jx);
        inverse.le(space.norm(&(&back - &x)) / nx.max(1.0), w);

        let neg = space.duality_map(&-&x);
        let c = rng.random_range(0.1..10.0);
        let scaled = space.duality_map(&x.scale(c));
        let scale = space.dual_norm(&jx).max(1.0);
        let err = space
            .dual_norm(&(&neg + &jx))
            .max(space.dual_norm(&(&scaled - &jx.scale(c))) / c);
        parity.le(err / scale, w);

        let xs = random_dual(&space, &mut rng).scale(10f64.powf(rng.random_range(-1.0..1.0)));
        let nxs = space.dual_norm(&xs);
        let back = space.duality_map(&space.duality_map_inv(&xs));
        inverse_dual.le(space.dual_norm(&(&back - &xs)) / nxs.max(1.0), || xs.coords().to_vec());
    }
    for t in [pairing, dual_norm, inverse, inverse_dual, parity] {
        ctx.push(t);
    }

    let mut upper = ctx.tally("two-sided-inequality-upper", "2<J(y), x - y> <= |x|^2 - |y|^2", 1e-9);
    let mut lower = ctx.tally("two-sided-inequality-lower", "|x|^2 - |y|^2 <= 2<J(x), x - y>", 1e-9);
    let mut rng = ctx.rng("pairs");
    for _ in 0..count {
        let x = random_point(&space, &mut rng);
        let y = random_point(&space, &mut rng);
        let d = &x - &y;
        let gap = space.norm(&x).powi(2) - space.norm(&y).powi(2);
        let w = || concat(&[x.coords(), y.coords()]);
        upper.le(2.0 * space.pair(&space.duality_map(&y), &d)? - gap, w);
        lower.le(gap - 2.0 * space.pair(&space.duality_map(&x), &d)?, w);
    }
    ctx.push(upper);
    ctx.push(lower);

    // Forward differences of the norm along unit pairs, away from the
    // coordinate hyperplanes where the norm is not twice differentiable.
    let mut limit = ctx.tally(
        "smoothness-limit",
        "(|x + ty| - |x|)/t -> <J(x), y>/|x| as t -> 0+",
        1e-4,
    );
    let mut order = ctx.checks("smoothness-order", "forward difference of the norm converges with order >= 1 in t");
    let mut rng = ctx.rng("smoothness");
    for _ in 0..ctx.spec.samples.derivative_points {
        let x = unit(&space, &spread_point(&space, 0.1, &mut rng));
        let y = unit(&space, &random_point(&space, &mut rng));
        let psi = space.smoothness(&x, &y)?;
        let nx = space.norm(&x);
        let err = |t: f64| ((space.norm(&x.axpy(t, &y)) - nx) / t - psi).abs();
        let w = || concat(&[x.coords(), y.coords()]);
        let (e3, e5) = (err(1e-3), err(1e-5));
        limit.le(e5, w);
        if e3 > 1e-6 {
            let observed = (e3 / e5).log10() / 2.0;
            order.metric_min("min_observed_order", observed);
            order.check(observed >= 0.9, w);
        } else {
            order.check(true, w);
        }
    }
    ctx.push(limit);
    ctx.push(order);
    Ok(())
}

pub(super) fn decomposition(ctx: &mut Ctx) -> Result<()> {
    let space = ctx.space.clone();
    let s = &ctx.spec.samples;
    let (count, anchors) = (s.points, s.derivative_points);

    let mut recompose = ctx.tally("recomposition", "x = a(x) x + o(x)", 1e-12);
    let mut recompose_dual = ctx.tally("dual-recomposition", "x* = a*(x*) J(x) + o*(x*)", 1e-12);
    let mut orth = ctx.checks("orthogonality", "<J(x), o(x)> = 0 and <o*(x*), x> = 0");
    let mut linear = ctx.tally("linearity", "a, o, a*, o* are linear", 1e-10);
    let mut rng = ctx.rng("recomposition");
    let xbar = spread_point(&space, 0.05, &mut rng);
    let anchor = Anchor::new(&space, xbar.clone())?;
    orth.check(!anchor.in_o(&xbar, DEFAULT_O_TOL), || xbar.coords().to_vec());
    for _ in 0..count {
        let x = scaled_point(&space, &mut rng);
        let y = scaled_point(&space, &mut rng);
        let xs = random_dual(&space, &mut rng);
        let ys = random_dual(&space, &mut rng);
        let nx = space.norm(&x);
        let w = || x.coords().to_vec();

        let o = anchor.o_part(&x);
        let back = &xbar.scale(anchor.a_coef(&x)) + &o;
        recompose.le(space.norm(&(&back - &x)) / nx.max(1.0), w);
        let os = anchor.o_star(&xs);
        let back = &anchor.xbar_star().scale(anchor.a_star(&xs)) + &os;
        recompose_dual.le(space.dual_norm(&(&back - &xs)) / space.dual_norm(&xs).max(1.0), w);

        orth.check(anchor.in_o(&o, DEFAULT_O_TOL), w);
        let scale = (space.dual_norm(&os) * space.norm(&xbar)).max(1.0);
        orth.check(space.pair(&os, &xbar)?.abs() <= ctx.tol(1e-9) * scale, w);

        let (a, b) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let comb = &x.scale(a) + &y.scale(b);
        let comb_s: Dual = &xs.scale(a) + &ys.scale(b);
        let scale = (a.abs() * nx + b.abs() * space.norm(&y)).max(1.0);
        let scale_s = (a.abs() * space.dual_norm(&xs) + b.abs() * space.dual_norm(&ys)).max(1.0);
        let e_a = (anchor.a_coef(&comb) - a * anchor.a_coef(&x) - b * anchor.a_coef(&y)).abs() * anchor.norm();
        let e_o = space.norm(&(&anchor.o_part(&comb) - &(&o.scale(a) + &anchor.o_part(&y).scale(b))));
        let e_as =
            (anchor.a_star(&comb_s) - a * anchor.a_star(&xs) - b * anchor.a_star(&ys)).abs() * anchor.norm();
        let e_os = space.dual_norm(&(&anchor.o_star(&comb_s) - &(&os.scale(a) + &anchor.o_star(&ys).scale(b))));
        linear.le(((e_a + e_o) / scale).max((e_as + e_os) / scale_s), w);
    }
    for t in [recompose, recompose_dual, orth, linear] {
        ctx.push(t);
    }

    let mut conv = ctx.checks(
        "norm-convergence",
        "u -> x in norm iff a(u) -> 1 and o(u) -> 0",
    );
    let mut small_o = ctx.checks(
        "small-o-ratio",
        "(|x + v| - |x|)/|v| decreases to 0 for v in O(x), final value <= 1e-3 at |v| = 1e-6",
    );
    let mut rng = ctx.rng("anchors");
    for _ in 0..anchors {
        let xbar = spread_point(&space, 0.05, &mut rng);
        let anchor = Anchor::new(&space, xbar.clone())?;
        let nbar = anchor.norm();
        let z = random_point(&space, &mut rng);
        let oz = anchor.o_part(&z);
        let v = oz.scale(1.0 / space.norm(&oz));
        let w = || concat(&[xbar.coords(), v.coords()]);

        let mut a_err = Vec::new();
        let mut o_norm = Vec::new();
        for k in 1..=8 {
            let u = xbar.axpy(10f64.powi(-k), &z);
            a_err.push((anchor.a_coef(&u) - 1.0).abs());
            o_norm.push(space.norm(&anchor.o_part(&u)));
        }
        let converse = (1..=8).all(|k| {
            let h = 10f64.powi(-k);
            let u = &xbar.scale(1.0 + h) + &v.scale(h);
            space.norm(&(&u - &xbar)) <= h * (nbar + 1.0) * (1.0 + 1e-12)
        });
        conv.check(
            a_err[7] <= 1e-6
                && o_norm[7] <= 1e-6 * space.norm(&z).max(1.0)
                && nonincreasing_trend(&a_err, 1)
                && nonincreasing_trend(&o_norm, 0)
                && converse,
            w,
        );

        small_o.check(anchor.in_o(&v, DEFAULT_O_TOL), w);
        let ratios: Vec<f64> = (1..=6)
            .map(|k| {
                let h = 10f64.powi(-k);
                (space.norm(&xbar.axpy(h, &v)) - nbar) / h
            })
            .collect();
        let last = ratios[5];
        small_o.metric_max("max_final_ratio", last);
        small_o.check(nonincreasing_trend(&ratios, 1) && last <= 1e-3, w);
    }
    ctx.push(conv);
    ctx.push(small_o);
    Ok(())
}
