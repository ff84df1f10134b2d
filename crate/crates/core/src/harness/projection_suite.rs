//! Projection optimality, idempotence, and the structural identities of the
//! cone and subspace projections; also checks the instance generator.

use rand::Rng;

use super::{Ctx, Regime, SetKind};
use crate::error::Result;
use crate::projections::{
    classify_region, mask_restrict, mask_restrict_dual, neg_part, pos_part, project, random_point,
    sample_member, variational_residual, ConvexSet, Region, DEFAULT_BAND,
};
use crate::space::Primal;

fn concat(parts: &[&[f64]]) -> Vec<f64> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

pub(super) fn run(ctx: &mut Ctx) -> Result<()> {
    instances(ctx)?;
    for kind in SetKind::ALL {
        optimality(ctx, kind)?;
    }
    cone_identities(ctx)?;
    subspace_identities(ctx)?;
    Ok(())
}

fn instances(ctx: &mut Ctx) -> Result<()> {
    let r = ctx.spec.r;
    let mut t = ctx.checks(
        "instances/regimes",
        "generated points lie in the requested region; boundary points are exact",
    );
    for i in 0..ctx.spec.samples.witness_points {
        for kind in [SetKind::Ball, SetKind::Cylinder] {
            for regime in [Regime::Interior, Regime::Boundary, Regime::Exterior] {
                let inst = ctx.instance(kind, regime, i)?;
                let mask = inst.set.radial_mask(inst.space.dim()).expect("radial set");
                let nm = inst.space.norm(&mask_restrict(&inst.point, &mask)?);
                let tag = classify_region(&inst.space, &inst.set, &inst.point, DEFAULT_BAND)?;
                let ok = match regime {
                    Regime::Interior => tag.region == Region::Interior,
                    Regime::Boundary => tag.region == Region::Boundary && (nm - r).abs() <= 1e-14 * r,
                    Regime::Exterior => tag.region == Region::Exterior && nm > r + 0.1,
                };
                t.check(ok, || inst.point.coords().to_vec());
            }
        }
        let f = ctx.instance(SetKind::Cone, Regime::Boundary, i)?.point;
        t.check(
            f.iter().any(|&v| v == 0.0) && f.iter().any(|&v| v > 0.0),
            || f.coords().to_vec(),
        );
        let again = ctx.instance(SetKind::Cone, Regime::Boundary, i)?.point;
        t.check(again == f, || f.coords().to_vec());
    }
    ctx.push(t);
    Ok(())
}

fn optimality(ctx: &mut Ctx, kind: SetKind) -> Result<()> {
    let name = kind.name();
    let s = &ctx.spec.samples;
    let (points, competitors) = (s.projection_points, s.competitors);
    let mut minimal = ctx.tally(
        &format!("{name}/distance-minimality"),
        "|x - P(x)| <= |x - z| for feasible z",
        1e-9,
    );
    let mut residual = ctx.tally(
        &format!("{name}/variational-residual"),
        "<J(x - P(x)), P(x) - z> >= 0 for feasible z",
        1e-8,
    );
    let mut wrong = ctx.checks(
        &format!("{name}/residual-detects-wrong-projection"),
        "<J(x - u), u - P(x)> < 0 for feasible u != P(x)",
    );
    let mut fixed = ctx.tally(
        &format!("{name}/idempotence"),
        "P(P(x)) = P(x) and P(z) = z for feasible z",
        1e-12,
    );
    let mut nonexp = (ctx.spec.p == 2.0).then(|| {
        ctx.tally(
            &format!("{name}/nonexpansive"),
            "|P(x) - P(y)| <= |x - y| when p = 2",
            1e-12,
        )
    });
    let mut rng = ctx.rng(&format!("competitors/{name}"));
    for i in 0..points {
        let inst = ctx.instance(kind, Regime::Exterior, i)?;
        let (space, set, x) = (&inst.space, &inst.set, &inst.point);
        let u = project(space, set, x)?;
        let d = space.norm(&(x - &u));
        let zs: Vec<Primal> = (0..competitors)
            .map(|j| {
                if j % 2 == 0 {
                    sample_member(space, set, &mut rng)
                } else {
                    let g = random_point(space, &mut rng).scale(1e-3);
                    project(space, set, &(&u + &g)).expect("valid instance")
                }
            })
            .collect();
        for z in &zs {
            minimal.le(d - space.norm(&(x - z)), || concat(&[x.coords(), z.coords()]));
        }
        residual.le(-variational_residual(space, set, x, &u, &zs)?, || x.coords().to_vec());

        let z0 = &zs[0];
        if space.norm(&(z0 - &u)) > 1e-6 {
            let res = variational_residual(space, set, x, z0, std::slice::from_ref(&u))?;
            wrong.check(res < 0.0, || concat(&[x.coords(), z0.coords()]));
        }

        let scale = space.norm(&u).max(1.0);
        fixed.le(space.norm(&(&project(space, set, &u)? - &u)) / scale, || x.coords().to_vec());
        for z in zs.iter().take(10) {
            let pz = project(space, set, z)?;
            fixed.le(space.norm(&(&pz - z)) / space.norm(z).max(1.0), || z.coords().to_vec());
        }

        if let Some(t) = nonexp.as_mut() {
            let y = x + &random_point(space, &mut rng);
            let py = project(space, set, &y)?;
            t.le(
                space.norm(&(&u - &py)) - space.norm(&(x - &y)),
                || concat(&[x.coords(), y.coords()]),
            );
        }
    }
    for t in [minimal, residual, wrong, fixed] {
        ctx.push(t);
    }
    if let Some(t) = nonexp {
        ctx.push(t);
    }
    Ok(())
}

fn cone_identities(ctx: &mut Ctx) -> Result<()> {
    let space = ctx.space.clone();
    let cone = ConvexSet::PositiveCone;
    let mut rng = ctx.rng("cone");
    let mut neg = ctx.checks("cone/negative-to-origin", "P(f) = 0 for f in -K");
    let mut homog = ctx.tally("cone/positive-homogeneity", "P(cf) = cP(f) for c > 0", 1e-12);
    let mut additive = ctx.tally("cone/additivity-on-cone", "P(f + g) = P(f) + P(g) for f, g in K", 1e-12);
    let mut split = ctx.checks("cone/positive-negative-split", "P(f) = f+ and f = P(f) + f-");
    let mut dual_pos = ctx.tally(
        "cone/duality-map-positive-part",
        "J(f)+ = (|f+|/|f|)^(p-2) J(f+)",
        1e-9,
    );
    let mut dual_neg = ctx.tally(
        "cone/duality-map-negative-part",
        "J(f)- = (|f-|/|f|)^(p-2) J(f-)",
        1e-9,
    );
    let mut pairings = ctx.tally(
        "cone/part-pairings",
        "<J(f), f+> = |f+|^p/|f|^(p-2) and <J(f), f-> = |f-|^p/|f|^(p-2)",
        1e-9,
    );
    let p = space.p();
    for _ in 0..ctx.spec.samples.points / 4 {
        let f = random_point(&space, &mut rng);
        let w = || f.coords().to_vec();

        let minus = f.map(|v| -v.abs());
        neg.check(project(&space, &cone, &minus)?.iter().all(|&v| v == 0.0), w);

        let c = rng.random_range(0.01..100.0);
        let pf = project(&space, &cone, &f)?;
        let err = space.norm(&(&project(&space, &cone, &f.scale(c))? - &pf.scale(c)));
        homog.le(err / (c * space.norm(&pf)).max(1.0), w);

        let (a, b) = (f.map(f64::abs), random_point(&space, &mut rng).map(f64::abs));
        let err = space.norm(&(&project(&space, &cone, &(&a + &b))? - &(&project(&space, &cone, &a)? + &project(&space, &cone, &b)?)));
        additive.le(err / space.norm(&(&a + &b)).max(1.0), w);

        let (fp, fm) = (pos_part(&f), neg_part(&f));
        split.check(pf == fp && &pf + &fm == f, w);

        if fp.iter().all(|&v| v == 0.0) || fm.iter().all(|&v| v == 0.0) {
            continue;
        }
        let nf = space.norm(&f);
        let (nfp, nfm) = (space.norm(&fp), space.norm(&fm));
        let jf = space.duality_map(&f);
        let scale = space.dual_norm(&jf).max(1.0);
        let expect = space.duality_map(&fp).scale((nfp / nf).powf(p - 2.0));
        dual_pos.le(space.dual_norm(&(&jf.positive_part() - &expect)) / scale, w);
        let expect = space.duality_map(&fm).scale((nfm / nf).powf(p - 2.0));
        dual_neg.le(space.dual_norm(&(&jf.negative_part() - &expect)) / scale, w);
        let rel = |got: f64, want: f64| (got - want).abs() / want.abs().max(1.0);
        pairings.le(
            rel(space.pair(&jf, &fp)?, nfp.powf(p) / nf.powf(p - 2.0))
                .max(rel(space.pair(&jf, &fm)?, nfm.powf(p) / nf.powf(p - 2.0))),
            w,
        );
    }
    for t in [neg, homog, additive, split, dual_pos, dual_neg, pairings] {
        ctx.push(t);
    }
    Ok(())
}

fn subspace_identities(ctx: &mut Ctx) -> Result<()> {
    let mut linear = ctx.tally(
        "subspace/affine-identity",
        "P(ax + by) = aP(x) + by for y in the subspace",
        1e-12,
    );
    let mut orth = ctx.tally(
        "subspace/residual-annihilates",
        "<J(x - P(x)), z> = 0 for z in the subspace",
        1e-9,
    );
    let mut rng = ctx.rng("subspace");
    for i in 0..ctx.spec.samples.projection_points {
        let inst = ctx.instance(SetKind::Subspace, Regime::Exterior, i)?;
        let (space, set, x) = (&inst.space, &inst.set, &inst.point);
        let ConvexSet::CoordSubspace { mask } = set else {
            unreachable!("subspace instance")
        };
        let y = mask_restrict(&random_point(space, &mut rng), mask)?;
        let (a, b) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let lhs = project(space, set, &(&x.scale(a) + &y.scale(b)))?;
        let rhs = &project(space, set, x)?.scale(a) + &y.scale(b);
        let scale = (a.abs() * space.norm(x) + b.abs() * space.norm(&y)).max(1.0);
        linear.le(space.norm(&(&lhs - &rhs)) / scale, || x.coords().to_vec());

        let u = project(space, set, x)?;
        let j = space.duality_map(&(x - &u));
        let j_on_mask = mask_restrict_dual(&j, mask)?;
        let scale = space.dual_norm(&j).max(1.0);
        for i in mask.indices() {
            let e = Primal::basis(space.dim(), i);
            orth.le(space.pair(&j, &e)?.abs() / scale, || x.coords().to_vec());
        }
        orth.le(space.dual_norm(&j_on_mask) / scale, || x.coords().to_vec());
    }
    ctx.push(linear);
    ctx.push(orth);
    Ok(())
}
