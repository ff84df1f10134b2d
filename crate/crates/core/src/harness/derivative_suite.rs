//! Fréchet derivatives against finite differences, up/down classification
//! and nonsmoothness witnesses.

use rand::Rng;

use super::{Ctx, Regime, SetKind};
use crate::decomposition::Anchor;
use crate::error::{Error, Result};
use crate::projections::random_point;
use crate::smooth::{
    central_difference, classify_direction, frechet_apply, gateaux_fd, nonsmoothness_witness, FdSchedule,
};
use crate::space::Primal;

fn concat(parts: &[&[f64]]) -> Vec<f64> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

pub(super) fn run(ctx: &mut Ctx) -> Result<()> {
    for kind in [SetKind::Ball, SetKind::Cylinder] {
        frechet(ctx, kind)?;
        directions(ctx, kind)?;
    }
    cone_gateaux(ctx)?;
    subspace_gateaux(ctx)?;
    witnesses(ctx)
}

fn frechet(ctx: &mut Ctx, kind: SetKind) -> Result<()> {
    let name = kind.name();
    let sched = FdSchedule::default();
    let s = &ctx.spec.samples;
    let (points, dirs) = (s.derivative_points, s.directions_per_point);
    let mut fd = ctx.tally(
        &format!("{name}/frechet-vs-gateaux"),
        "forward differences converge to the closed-form derivative off the boundary",
        1e-4,
    );
    let mut central = ctx.tally(
        &format!("{name}/frechet-vs-central"),
        "central differences agree with the closed-form derivative off the boundary",
        1e-4,
    );
    let mut linear = ctx.tally(&format!("{name}/linearity"), "P'(x) is linear", 1e-10);
    let mut annihilate = ctx.tally(
        &format!("{name}/annihilation"),
        "outside, P'(x)(x) = x restricted to the complement of the mask",
        1e-10,
    );
    let mut range = (kind == SetKind::Ball).then(|| {
        ctx.tally(
            "ball/range",
            "outside the ball, <J(x), P'(x)(v)> = 0",
            1e-9,
        )
    });
    let mut boundary = ctx.checks(
        &format!("{name}/no-frechet-on-boundary"),
        "the projection has no Fréchet derivative at boundary points",
    );
    let mut rng = ctx.rng(&format!("frechet/{name}"));
    for regime in [Regime::Interior, Regime::Exterior] {
        for i in 0..points {
            let inst = ctx.instance(kind, regime, i)?;
            let (space, set, x) = (&inst.space, &inst.set, &inst.point);
            for _ in 0..dirs {
                let v = random_point(space, &mut rng);
                let nv = space.norm(&v);
                let w = || concat(&[x.coords(), v.coords()]);
                let exact = frechet_apply(space, set, x, &v)?;
                let est = gateaux_fd(space, set, x, &v, &sched)?;
                fd.le(space.norm(&(&exact - &est.value)) / nv.max(1.0), w);
                let c = central_difference(space, set, x, &v, 1e-5)?;
                central.le(space.norm(&(&exact - &c)) / nv.max(1.0), w);

                let u = random_point(space, &mut rng);
                let (a, b) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
                let lhs = frechet_apply(space, set, x, &(&v.scale(a) + &u.scale(b)))?;
                let rhs = &exact.scale(a) + &frechet_apply(space, set, x, &u)?.scale(b);
                let scale = (a.abs() * nv + b.abs() * space.norm(&u)).max(1.0);
                linear.le(space.norm(&(&lhs - &rhs)) / scale, w);

                if let (Some(t), Regime::Exterior) = (range.as_mut(), regime) {
                    let jx = space.duality_map(x);
                    let scale = (space.dual_norm(&jx) * space.norm(&exact)).max(1.0);
                    t.le(space.pair(&jx, &exact)?.abs() / scale, w);
                }
            }
            if regime == Regime::Exterior {
                let mask = set.radial_mask(space.dim()).expect("radial set");
                let got = frechet_apply(space, set, x, x)?;
                let want = mask.complement().apply(x);
                annihilate.le(space.norm(&(&got - &want)) / space.norm(x).max(1.0), || x.coords().to_vec());
            }
        }
    }
    for i in 0..points.min(20) {
        let inst = ctx.instance(kind, Regime::Boundary, i)?;
        let v = random_point(&inst.space, &mut rng);
        let res = frechet_apply(&inst.space, &inst.set, &inst.point, &v);
        boundary.check(res == Err(Error::NoFrechetDerivative), || inst.point.coords().to_vec());
    }
    ctx.push(fd);
    ctx.push(central);
    ctx.push(linear);
    ctx.push(annihilate);
    if let Some(t) = range {
        ctx.push(t);
    }
    ctx.push(boundary);
    Ok(())
}

fn directions(ctx: &mut Ctx, kind: SetKind) -> Result<()> {
    let name = kind.name();
    let sched = FdSchedule::default();
    let mut t = ctx.checks(
        &format!("{name}/direction-consistency"),
        "the up/down decision matches |(x + tv)_M| against r along the step schedule",
    );
    let mut rng = ctx.rng(&format!("directions/{name}"));
    let pairs = ctx.spec.samples.direction_pairs;
    let mut unresolved = 0usize;
    let mut exits = 0usize;
    for k in 0..pairs {
        let inst = ctx.instance(kind, Regime::Boundary, k / 10)?;
        let (space, set, xbar) = (&inst.space, &inst.set, &inst.point);
        let mask = set.radial_mask(space.dim()).expect("radial set");
        let xm = mask.apply(xbar);
        let g = random_point(space, &mut rng);
        let v = match k % 5 {
            // nearly tangent to the sphere through x_M
            3 => {
                let anchor = Anchor::new(space, xm.clone())?;
                let o = mask.apply(&anchor.o_part(&mask.apply(&g)));
                let eps = if rng.random_bool(0.5) { 1e-3 } else { -1e-3 };
                o.axpy(eps, &xm)
            }
            // off the mask only
            4 if !mask.is_full() => mask.complement().apply(&g),
            _ => g,
        };
        if space.is_theta(&v) {
            continue;
        }
        let class = classify_direction(space, set, xbar, &v, &sched)?;
        match class.sampled_agrees {
            Some(ok) => t.check(ok, || concat(&[xbar.coords(), v.coords()])),
            None => {
                unresolved += 1;
                t.check(space.is_theta(&mask.apply(&v)), || concat(&[xbar.coords(), v.coords()]));
            }
        }
        exits += class.leading_exits;
    }
    t.metric("unresolved", unresolved as f64);
    t.metric("leading_exits", exits as f64);
    ctx.push(t);
    Ok(())
}

fn cone_gateaux(ctx: &mut Ctx) -> Result<()> {
    let sched = FdSchedule::default();
    let mut t = ctx.tally(
        "cone/gateaux-formula",
        "P'(f)(v)_s = v_s if f_s > 0, 0 if f_s < 0, max(v_s, 0) if f_s = 0",
        1e-8,
    );
    let mut rng = ctx.rng("gateaux/cone");
    for i in 0..ctx.spec.samples.derivative_points {
        let inst = ctx.instance(SetKind::Cone, Regime::Boundary, i)?;
        let (space, set, f) = (&inst.space, &inst.set, &inst.point);
        for _ in 0..ctx.spec.samples.directions_per_point {
            let v = random_point(space, &mut rng);
            let want = Primal::new(
                f.iter()
                    .zip(v.iter())
                    .map(|(&fs, &vs)| match fs.partial_cmp(&0.0) {
                        Some(std::cmp::Ordering::Greater) => vs,
                        Some(std::cmp::Ordering::Less) => 0.0,
                        _ => vs.max(0.0),
                    })
                    .collect(),
            );
            let est = gateaux_fd(space, set, f, &v, &sched)?;
            t.le(est.value.max_abs_diff(&want), || concat(&[f.coords(), v.coords()]));
        }
    }
    ctx.push(t);
    Ok(())
}

fn subspace_gateaux(ctx: &mut Ctx) -> Result<()> {
    let sched = FdSchedule::default();
    let mut t = ctx.tally("subspace/gateaux-linear", "P'(x)(v) = v restricted to the mask", 1e-8);
    let mut rng = ctx.rng("gateaux/subspace");
    for i in 0..ctx.spec.samples.derivative_points {
        let inst = ctx.instance(SetKind::Subspace, Regime::Exterior, i)?;
        let (space, set, x) = (&inst.space, &inst.set, &inst.point);
        let v = random_point(space, &mut rng);
        let est = gateaux_fd(space, set, x, &v, &sched)?;
        let mask = match set {
            crate::projections::ConvexSet::CoordSubspace { mask } => mask,
            _ => unreachable!("subspace instance"),
        };
        t.le(est.value.max_abs_diff(&mask.apply(&v)), || concat(&[x.coords(), v.coords()]));
    }
    ctx.push(t);
    Ok(())
}

fn witnesses(ctx: &mut Ctx) -> Result<()> {
    let sched = FdSchedule::default();
    for kind in [SetKind::Ball, SetKind::Cylinder, SetKind::Cone] {
        let mut t = ctx.checks(
            &format!("{}/nonsmoothness-witness", kind.name()),
            "at boundary points some v has |P'(v) + P'(-v)| >= 0.1 |v|",
        );
        for i in 0..ctx.spec.samples.witness_points {
            let inst = ctx.instance(kind, Regime::Boundary, i)?;
            match nonsmoothness_witness(&inst.space, &inst.set, &inst.point, &sched) {
                Ok(w) => {
                    t.metric_min("min_defect", w.defect);
                    t.check(w.defect >= 0.1, || inst.point.coords().to_vec());
                }
                Err(Error::WitnessNotFound(best)) => {
                    t.metric_min("min_defect", best);
                    t.check(false, || inst.point.coords().to_vec());
                }
                Err(e) => return Err(e),
            }
        }
        ctx.push(t);
    }
    Ok(())
}
