//! Closed-form coderivatives against the adjoint identity, finite
//! differences and the sampling oracle.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::report::Tally;
use super::{Ctx, Instance, Regime, SetKind};
use crate::coderivative::{
    coderiv_ball, coderiv_cylinder, coderivative, cone_interval_at_origin, cone_jf_member, cone_theta_member,
    fd_adjoint, interval_contains, sphere_theta_member, CoderivResult, Verdict,
};
use crate::decomposition::Anchor;
use crate::error::{Error, Result};
use crate::oracle::{coderiv_quotient, test_membership, OracleConfig, OracleVerdict};
use crate::projections::{random_dual, random_point, ConvexSet, Mask};
use crate::smooth::frechet_apply;
use crate::space::{Dual, LpSpace, Primal};

fn concat(parts: &[&[f64]]) -> Vec<f64> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

/// Whether the oracle outcome matches an analytic verdict; `None` for
/// `Undetermined`.
fn agrees(verdict: Verdict, oracle: &OracleVerdict, cfg: &OracleConfig) -> Option<bool> {
    match verdict {
        Verdict::Member => Some(oracle.supports_membership(cfg)),
        Verdict::NotMember => Some(match oracle {
            OracleVerdict::RejectedWithWitness { quotient, .. } => *quotient >= cfg.reject_threshold,
            OracleVerdict::NotRejected { .. } => false,
        }),
        Verdict::Undetermined => None,
    }
}

fn record(t: &mut Tally, verdict: Verdict, oracle: &OracleVerdict, cfg: &OracleConfig, w: impl FnOnce() -> Vec<f64>) {
    if verdict == Verdict::Member {
        t.metric_max("max_final_quotient_members", oracle.final_max());
    }
    match agrees(verdict, oracle, cfg) {
        Some(ok) => t.check(ok, w),
        None => t.undetermined(),
    }
}

/// Distance between `ŷ` and `−Ĵ(x)` after normalization.
fn alignment(space: &LpSpace, x: &Primal, y: &Dual) -> f64 {
    let jx = space.duality_map(x);
    let a = y.scale(1.0 / space.dual_norm(y));
    let b = jx.scale(1.0 / space.dual_norm(&jx));
    space.dual_norm(&(&a + &b))
}

/// `φ_s = U_s ψ_s` with independent uniform `U_s ∈ [0, 1)`.
fn scaled_down(psi: &Dual, rng: &mut ChaCha8Rng) -> Dual {
    Dual::new(psi.iter().map(|v| v * rng.random::<f64>()).collect())
}

fn unit_dual(space: &LpSpace, y: &Dual) -> Dual {
    y.scale(1.0 / space.dual_norm(y))
}

pub(super) fn ball(ctx: &mut Ctx) -> Result<()> {
    adjoint_checks(ctx, SetKind::Ball)?;
    singleton_soundness(ctx, SetKind::Ball)?;
    sphere_grid(ctx)?;
    empty_fiber(ctx, SetKind::Ball)?;
    nonlinearity(ctx)
}

pub(super) fn cylinder(ctx: &mut Ctx) -> Result<()> {
    adjoint_checks(ctx, SetKind::Cylinder)?;
    singleton_soundness(ctx, SetKind::Cylinder)?;
    cylinder_grid(ctx)?;
    empty_fiber(ctx, SetKind::Cylinder)?;
    ball_consistency(ctx)?;
    exterior_duality_image(ctx)
}

fn adjoint_checks(ctx: &mut Ctx, kind: SetKind) -> Result<()> {
    let name = kind.name();
    let s = &ctx.spec.samples;
    let (points, pairs) = (s.derivative_points, s.directions_per_point);
    let mut adjoint = ctx.tally(
        &format!("{name}/adjoint-identity"),
        "off the boundary the coderivative is the adjoint of the derivative: <D*(y*), v> = <y*, P'(v)>",
        1e-8,
    );
    let mut fd = ctx.tally(
        &format!("{name}/fd-adjoint"),
        "off the boundary the coderivative equals the transposed finite-difference Jacobian",
        1e-4,
    );
    let mut rng = ctx.rng(&format!("adjoint/{name}"));
    for regime in [Regime::Interior, Regime::Exterior] {
        for i in 0..points {
            let inst = ctx.instance(kind, regime, i)?;
            let (space, set, x) = (&inst.space, &inst.set, &inst.point);
            for _ in 0..pairs {
                let ys = random_dual(space, &mut rng);
                let v = random_point(space, &mut rng);
                let w = || concat(&[x.coords(), ys.coords(), v.coords()]);
                let res = coderivative(space, set, x, &ys)?;
                let Some(sing) = res.singleton() else {
                    adjoint.check(false, w);
                    continue;
                };
                let lhs = space.pair(sing, &v)?;
                let rhs = space.pair(&ys, &frechet_apply(space, set, x, &v)?)?;
                let scale = (space.dual_norm(&ys) * space.norm(&v)).max(1.0);
                adjoint.le((lhs - rhs).abs() / scale, w);
                let approx = fd_adjoint(space, set, x, &ys, 1e-5)?;
                fd.le(space.dual_norm(&(sing - &approx)) / space.dual_norm(&ys).max(1.0), w);
            }
        }
    }
    ctx.push(adjoint);
    ctx.push(fd);
    Ok(())
}

fn singleton_soundness(ctx: &mut Ctx, kind: SetKind) -> Result<()> {
    let name = kind.name();
    let mut sound = ctx.checks(
        &format!("{name}/singleton-soundness"),
        "every closed-form singleton passes the limsup oracle",
    );
    let mut perturbed = ctx.checks(
        &format!("{name}/perturbed-singleton-rejected"),
        "a singleton shifted by 0.1 in one coordinate is rejected",
    );
    let mut rng = ctx.rng(&format!("soundness/{name}"));
    for regime in [Regime::Interior, Regime::Exterior, Regime::Boundary] {
        for i in 0..ctx.spec.samples.oracle_points {
            let inst = ctx.instance(kind, regime, i)?;
            let (space, set, x) = (&inst.space, &inst.set, &inst.point);
            let ys = if regime == Regime::Boundary {
                space.zero_dual()
            } else {
                random_dual(space, &mut rng)
            };
            let w = || concat(&[x.coords(), ys.coords()]);
            let res = coderivative(space, set, x, &ys)?;
            let Some(xs) = res.singleton() else {
                sound.check(false, w);
                continue;
            };
            let cfg = ctx.oracle(&format!("soundness/{name}/{}/{i}", regime.name()));
            let verdict = test_membership(space, set, x, xs, &ys, &cfg)?;
            sound.metric_max("max_final_quotient", verdict.final_max());
            sound.check(verdict.supports_membership(&cfg), w);

            let k = rng.random_range(0..space.dim());
            let shifted = xs + &Dual::basis(space.dim(), k).scale(0.1);
            let verdict = test_membership(space, set, x, &shifted, &ys, &cfg)?;
            perturbed.check(verdict.is_rejected(), w);
        }
    }
    ctx.push(sound);
    ctx.push(perturbed);
    Ok(())
}

/// Query type for the constructed sphere and cylinder grids.
#[derive(Clone, Copy, PartialEq)]
enum Query {
    Member,
    Orthogonal,
    Oblique,
    Positive,
    Tail,
}

/// Constructs `y*` of the given type at `x̄` for the radial set with `mask`.
/// Orthogonal and oblique queries need `|M| ≥ 2` and tail queries need a
/// proper mask; otherwise the other kind is substituted. Returns the query
/// actually built.
fn radial_query(
    space: &LpSpace,
    mask: &Mask,
    xbar: &Primal,
    q: Query,
    rng: &mut ChaCha8Rng,
) -> Result<(Query, Dual)> {
    let q = match q {
        Query::Orthogonal | Query::Oblique if mask.count() < 2 => Query::Tail,
        Query::Tail if mask.is_full() => Query::Oblique,
        q => q,
    };
    let xm = mask.apply(xbar);
    let jm = unit_dual(space, &space.duality_map(&xm));
    let anchor = Anchor::new(space, xm.clone())?;
    let orth = |rng: &mut ChaCha8Rng| -> Dual {
        loop {
            let o = mask.apply_dual(&anchor.o_star(&mask.apply_dual(&random_dual(space, rng))));
            if space.dual_norm(&o) > 1e-3 {
                return unit_dual(space, &o);
            }
        }
    };
    let c = rng.random_range(0.5..2.0);
    let ys = match q {
        Query::Member => jm.scale(-c),
        Query::Orthogonal => orth(rng).scale(c),
        Query::Oblique => {
            let eps = rng.random_range(0.2..0.6);
            &jm.scale(-c) + &orth(rng).scale(eps * c)
        }
        Query::Positive => jm.scale(rng.random_range(1.5..3.0)),
        Query::Tail => {
            let tail = mask.complement().apply_dual(&random_dual(space, rng));
            let tail = unit_dual(space, &tail).scale(rng.random_range(0.3..1.0) * c);
            &jm.scale(-c) + &tail
        }
    };
    Ok((q, ys))
}

fn sphere_grid(ctx: &mut Ctx) -> Result<()> {
    let mut grid = ctx.checks(
        "ball/sphere-grid",
        "theta*-membership at sphere points: -J*(y*) is an up direction and <y*, x> = -r|y*|_q, matched by the oracle",
    );
    let mut holder = ctx.tally(
        "ball/holder-certificate",
        "members satisfy y* = -c J(x) for some c > 0",
        1e-8,
    );
    let mut expected = ctx.checks("ball/sphere-grid-construction", "constructed queries receive their intended verdict");
    let hilbert = ctx.spec.p == 2.0;
    let mut iff = hilbert.then(|| {
        ctx.checks(
            "ball/hilbert-iff",
            "p = 2: theta* is a member iff o(y) = 0 and <y, x> < 0",
        )
    });
    let mut rng = ctx.rng("sphere-grid");
    let kinds = [Query::Member, Query::Orthogonal, Query::Oblique, Query::Positive];
    for i in 0..ctx.spec.samples.membership_cases {
        let inst = ctx.instance(SetKind::Ball, Regime::Boundary, i)?;
        let (space, set, x) = (&inst.space, &inst.set, &inst.point);
        let r = ctx.spec.r;
        let q = kinds[i % kinds.len()];
        let (q, ys) = radial_query(space, &Mask::full(space.dim()), x, q, &mut rng)?;
        let w = || concat(&[x.coords(), ys.coords()]);
        let res = sphere_theta_member(space, r, x, &ys)?;
        let verdict = res.verdict().expect("membership result");
        let via_dispatch = coderiv_ball(space, r, x, &ys)?.verdict();
        expected.check(via_dispatch == Some(verdict), w);
        let intended = if q == Query::Member { Verdict::Member } else { Verdict::NotMember };
        expected.check(verdict == intended, w);

        let cfg = ctx.oracle(&format!("sphere-grid/{i}"));
        let oracle = test_membership(space, set, x, &space.zero_dual(), &ys, &cfg)?;
        record(&mut grid, verdict, &oracle, &cfg, w);

        if verdict == Verdict::Member {
            holder.le(alignment(space, x, &ys), w);
        }
        if let Some(t) = iff.as_mut() {
            let y = Primal::new(ys.coords().to_vec());
            let anchor = Anchor::new(space, x.clone())?;
            let o = anchor.o_part(&y);
            let pairing = space.pair(&ys, x)?;
            let predicted = space.norm(&o) <= 1e-9 * space.norm(&y) && pairing < 0.0;
            t.check(predicted == (verdict == Verdict::Member), w);
        }
    }
    if holder.is_empty() {
        holder.le(0.0, Vec::new);
    }
    ctx.push(grid);
    ctx.push(holder);
    ctx.push(expected);
    if let Some(t) = iff {
        ctx.push(t);
    }
    Ok(())
}

fn cylinder_grid(ctx: &mut Ctx) -> Result<()> {
    let mut grid = ctx.checks(
        "cylinder/iff-grid",
        "theta*-membership at cylinder boundary points: y*_M' = 0, -J*(y*)_M not down, <y*_M, x_M> = -r|y*_M|_q; matched by the oracle",
    );
    let mut holder = ctx.tally(
        "cylinder/holder-certificate",
        "members satisfy y*_M = -c J(x_M) for some c > 0",
        1e-8,
    );
    let mut expected = ctx.checks(
        "cylinder/iff-grid-construction",
        "constructed queries receive their intended verdict",
    );
    let mut full_mask: Option<Tally> = None;
    let mut rng = ctx.rng("cylinder-grid");
    let kinds = [Query::Member, Query::Orthogonal, Query::Oblique, Query::Positive, Query::Tail];
    for i in 0..ctx.spec.samples.cylinder_cases {
        let inst = ctx.instance(SetKind::Cylinder, Regime::Boundary, i)?;
        let (space, set, x) = (&inst.space, &inst.set, &inst.point);
        let r = ctx.spec.r;
        let mask = set.radial_mask(space.dim()).expect("cylinder");
        let (q, ys) = radial_query(space, &mask, x, kinds[i % kinds.len()], &mut rng)?;
        let w = || concat(&[x.coords(), ys.coords()]);
        let verdict = coderiv_cylinder(space, r, &mask, x, &ys)?.verdict().expect("membership result");
        let intended = if q == Query::Member { Verdict::Member } else { Verdict::NotMember };
        expected.check(verdict == intended, w);

        let cfg = ctx.oracle(&format!("cylinder-grid/{i}"));
        let oracle = test_membership(space, set, x, &space.zero_dual(), &ys, &cfg)?;
        record(&mut grid, verdict, &oracle, &cfg, w);
        if verdict == Verdict::Member {
            holder.le(alignment(space, &mask.apply(x), &mask.apply_dual(&ys)), w);
        }
        if mask.is_full() {
            let t = full_mask.get_or_insert_with(|| {
                ctx.checks(
                    "cylinder/full-mask-grid-matches-ball",
                    "with every coordinate masked the cylinder verdict equals the ball verdict",
                )
            });
            let ball = coderiv_ball(space, r, x, &ys)?.verdict();
            t.check(ball == Some(verdict), w);
        }
    }
    if holder.is_empty() {
        holder.le(0.0, Vec::new);
    }
    ctx.push(grid);
    ctx.push(holder);
    ctx.push(expected);
    if let Some(t) = full_mask {
        ctx.push(t);
    }
    Ok(())
}

fn empty_fiber(ctx: &mut Ctx, kind: SetKind) -> Result<()> {
    let name = kind.name();
    let mut empty = ctx.checks(
        &format!("{name}/empty-fiber"),
        "at boundary points the fiber over J(x) is empty: every x* is rejected above c/(6r)",
    );
    let mut radial = ctx.checks(
        &format!("{name}/empty-fiber-radial-probe"),
        "one of u = x + t x_M, u = x - t x_M gives a quotient >= c/(3r) with c = <J(x), x_M>, for every x*",
    );
    let mut rng = ctx.rng(&format!("empty-fiber/{name}"));
    let s = &ctx.spec.samples;
    let (points, candidates) = (s.empty_fiber_points, s.empty_fiber_candidates);
    for i in 0..points {
        let inst = ctx.instance(kind, Regime::Boundary, i)?;
        let (space, set, x) = (&inst.space, &inst.set, &inst.point);
        let jx = space.duality_map(x);
        let res = coderivative(space, set, x, &jx)?;
        empty.check(res == CoderivResult::Empty, || x.coords().to_vec());
        let r = set.radius().expect("radial set");
        let xm = set.radial_mask(space.dim()).expect("radial set").apply(x);
        let bound = space.pair(&jx, &xm)? / (3.0 * r);
        for j in 0..candidates {
            let xs = match j {
                0 => space.zero_dual(),
                1 => jx.clone(),
                _ => {
                    let g = random_dual(space, &mut rng);
                    unit_dual(space, &g).scale(rng.random_range(0.0..2.0) * space.dual_norm(&jx))
                }
            };
            let w = || concat(&[x.coords(), xs.coords()]);
            let mut cfg = ctx.oracle(&format!("empty-fiber/{name}/{i}/{j}"));
            cfg.reject_threshold = cfg.reject_threshold.min(0.5 * bound);
            cfg.accept_threshold = cfg.accept_threshold.min(0.1 * cfg.reject_threshold);
            empty.metric_min("min_reject_threshold", cfg.reject_threshold);
            let verdict = test_membership(space, set, x, &xs, &jx, &cfg)?;
            empty.check(verdict.is_rejected(), w);
            let mut worst = f64::INFINITY;
            for t in [1e-3, 1e-4, 1e-5] {
                let up = coderiv_quotient(space, set, x, &xs, &jx, &x.axpy(t, &xm))?;
                let down = coderiv_quotient(space, set, x, &xs, &jx, &x.axpy(-t, &xm))?;
                worst = worst.min(up.max(down));
            }
            radial.metric_min("min_radial_quotient", worst);
            radial.metric_min("min_ratio_to_bound", worst / bound);
            radial.check(bound > 0.0 && worst >= 0.9 * bound, w);
        }
    }
    ctx.push(empty);
    ctx.push(radial);
    Ok(())
}

fn nonlinearity(ctx: &mut Ctx) -> Result<()> {
    let mut t = ctx.checks(
        "ball/nonlinearity-triple",
        "the coderivative is not linear: theta* lies over -J(x) and -2J(x) but the fiber over J(x) is empty",
    );
    let inst = ctx.instance(SetKind::Ball, Regime::Boundary, 0)?;
    let (space, set, x) = (&inst.space, &inst.set, &inst.point);
    let r = ctx.spec.r;
    let jx = space.duality_map(x);
    let w = || x.coords().to_vec();
    let y1 = -&jx;
    let y2 = jx.scale(-2.0);
    for (k, y) in [&y1, &y2].into_iter().enumerate() {
        let verdict = sphere_theta_member(space, r, x, y)?.verdict();
        t.check(verdict == Some(Verdict::Member), w);
        let cfg = ctx.oracle(&format!("nonlinearity/{k}"));
        let oracle = test_membership(space, set, x, &space.zero_dual(), y, &cfg)?;
        t.check(oracle.supports_membership(&cfg), w);
    }
    t.check(coderiv_ball(space, r, x, &jx)? == CoderivResult::Empty, w);
    let cfg = ctx.oracle("nonlinearity/2");
    let oracle = test_membership(space, set, x, &space.zero_dual(), &jx, &cfg)?;
    t.check(oracle.is_rejected(), w);
    ctx.push(t);
    Ok(())
}

fn same_result(space: &LpSpace, a: &CoderivResult, b: &CoderivResult) -> bool {
    match (a, b) {
        (CoderivResult::Singleton { value: u }, CoderivResult::Singleton { value: v }) => {
            space.dual_norm(&(u - v)) <= 1e-12 * space.dual_norm(u).max(1.0)
        }
        (CoderivResult::Empty, CoderivResult::Empty) => true,
        (CoderivResult::ThetaMembership { verdict: u, .. }, CoderivResult::ThetaMembership { verdict: v, .. }) => u == v,
        _ => false,
    }
}

fn ball_consistency(ctx: &mut Ctx) -> Result<()> {
    let mut t = ctx.checks(
        "cylinder/full-mask-matches-ball",
        "the cylinder over all coordinates has the coderivative of the ball in every regime",
    );
    let mut rng = ctx.rng("consistency");
    let regimes = [Regime::Interior, Regime::Boundary, Regime::Exterior];
    let queries = [Query::Member, Query::Orthogonal, Query::Oblique, Query::Positive];
    let r = ctx.spec.r;
    for i in 0..ctx.spec.samples.consistency_queries {
        let regime = regimes[i % 3];
        let inst: Instance = ctx.instance(SetKind::Ball, regime, i)?;
        let (space, x) = (&inst.space, &inst.point);
        let full = Mask::full(space.dim());
        let ys = match i % 6 {
            0 => random_dual(space, &mut rng),
            1 => space.duality_map(x),
            2 => space.zero_dual(),
            k => radial_query(space, &full, x, queries[k - 2], &mut rng)?.1,
        };
        let a = coderiv_ball(space, r, x, &ys)?;
        let b = coderiv_cylinder(space, r, &full, x, &ys)?;
        t.check(same_result(space, &a, &b), || concat(&[x.coords(), ys.coords()]));
    }
    ctx.push(t);
    Ok(())
}

fn exterior_duality_image(ctx: &mut Ctx) -> Result<()> {
    let mut t = ctx.tally(
        "cylinder/exterior-duality-image",
        "outside the cylinder the coderivative maps J(x) to J(x) restricted to the complement of the mask",
        1e-10,
    );
    for i in 0..ctx.spec.samples.derivative_points {
        let inst = ctx.instance(SetKind::Cylinder, Regime::Exterior, i)?;
        let (space, set, x) = (&inst.space, &inst.set, &inst.point);
        let mask = set.radial_mask(space.dim()).expect("cylinder");
        let jx = space.duality_map(x);
        let res = coderivative(space, set, x, &jx)?;
        let want = mask.complement().apply_dual(&jx);
        let err = match res.singleton() {
            Some(v) => space.dual_norm(&(v - &want)) / space.dual_norm(&jx).max(1.0),
            None => f64::INFINITY,
        };
        t.le(err, || x.coords().to_vec());
    }
    ctx.push(t);
    Ok(())
}

pub(super) fn cone(ctx: &mut Ctx) -> Result<()> {
    let cone = ConvexSet::PositiveCone;
    let s = ctx.spec.samples.clone();

    // theta* query
    let mut theta = ctx.checks(
        "cone/theta-query",
        "the fiber over theta* is {theta*}: theta* passes the oracle and random x* are rejected",
    );
    let mut rng = ctx.rng("theta-query");
    for i in 0..s.cone_points {
        let regime = [Regime::Interior, Regime::Boundary, Regime::Exterior][i % 3];
        let inst = ctx.instance(SetKind::Cone, regime, i)?;
        let (space, f) = (&inst.space, &inst.point);
        let w = || f.coords().to_vec();
        let zero = space.zero_dual();
        let res = coderivative(space, &cone, f, &zero)?;
        theta.check(res == CoderivResult::Singleton { value: zero.clone() }, w);
        let cfg = ctx.oracle(&format!("theta-query/{i}"));
        theta.check(test_membership(space, &cone, f, &zero, &zero, &cfg)?.supports_membership(&cfg), w);
        let xs = unit_dual(space, &random_dual(space, &mut rng));
        theta.check(test_membership(space, &cone, f, &xs, &zero, &cfg)?.is_rejected(), w);
    }
    ctx.push(theta);

    // theta*-membership grid
    let mut grid = ctx.checks(
        "cone/theta-membership-grid",
        "theta* lies over phi iff phi vanishes where f > 0 and phi >= 0 where f = 0; matched by the oracle",
    );
    let mut expected = ctx.checks(
        "cone/theta-membership-construction",
        "constructed queries receive their intended verdict, including f in -K with phi in K (member) and f in K with phi = J(f) (not a member)",
    );
    let mut rng = ctx.rng("cone-grid");
    for i in 0..s.cone_cases {
        let inst = ctx.instance(SetKind::Cone, Regime::Boundary, i)?;
        let space = &inst.space;
        let n = space.dim();
        let g = random_dual(space, &mut rng);
        let (f, phi, intended) = match i % 5 {
            0 => {
                let f = inst.point.map(|v| -v.abs());
                (f, g.map(f64::abs), Verdict::Member)
            }
            1 => {
                let f = inst.point.map(f64::abs);
                let phi = space.duality_map(&f);
                (f, phi, Verdict::NotMember)
            }
            k => {
                let f = inst.point.clone();
                let mut phi: Vec<f64> = f
                    .iter()
                    .zip(g.iter())
                    .map(|(&fs, &gs)| match fs.partial_cmp(&0.0) {
                        Some(std::cmp::Ordering::Greater) => 0.0,
                        Some(std::cmp::Ordering::Less) => gs,
                        _ => gs.abs(),
                    })
                    .collect();
                let pick = |pred: &dyn Fn(f64) -> bool, rng: &mut ChaCha8Rng| {
                    let idx: Vec<usize> = (0..n).filter(|&s| pred(f[s])).collect();
                    (!idx.is_empty()).then(|| idx[rng.random_range(0..idx.len())])
                };
                let intended = match k {
                    3 => {
                        let s = pick(&|v| v > 0.0, &mut rng).expect("boundary instances have a positive coordinate");
                        let mag = 0.2 + rng.random::<f64>();
                        phi[s] = if rng.random_bool(0.5) { mag } else { -mag };
                        Verdict::NotMember
                    }
                    4 => {
                        let s = pick(&|v| v == 0.0, &mut rng).expect("boundary instances have a zero coordinate");
                        phi[s] = -(0.2 + rng.random::<f64>());
                        Verdict::NotMember
                    }
                    _ => {
                        if let Some(s) = pick(&|v| v < 0.0, &mut rng) {
                            phi[s] = -(0.2 + rng.random::<f64>());
                        }
                        Verdict::Member
                    }
                };
                (f, Dual::new(phi), intended)
            }
        };
        let w = || concat(&[f.coords(), phi.coords()]);
        let verdict = coderivative(space, &cone, &f, &phi)?.verdict();
        let direct = cone_theta_member(space, &f, &phi)?.verdict();
        expected.check(verdict == Some(intended) && direct == verdict, w);
        let cfg = ctx.oracle(&format!("cone-grid/{i}"));
        let oracle = test_membership(space, &cone, &f, &space.zero_dual(), &phi, &cfg)?;
        record(&mut grid, direct.unwrap_or(Verdict::Undetermined), &oracle, &cfg, w);
    }
    ctx.push(grid);
    ctx.push(expected);

    // J(f) over J(f)
    let mut jf = ctx.checks(
        "cone/duality-image-member",
        "J(f) lies over J(f) for every f in K",
    );
    for i in 0..s.cone_points {
        let inst = ctx.instance(SetKind::Cone, Regime::Boundary, i)?;
        let space = &inst.space;
        let f = inst.point.map(f64::abs);
        let w = || f.coords().to_vec();
        let j = space.duality_map(&f);
        jf.check(cone_jf_member(space, &f)?.verdict() == Some(Verdict::Member), w);
        let cfg = ctx.oracle(&format!("jf/{i}"));
        jf.check(test_membership(space, &cone, &f, &j, &j, &cfg)?.supports_membership(&cfg), w);
    }
    let inst = ctx.instance(SetKind::Cone, Regime::Exterior, 0)?;
    jf.check(
        matches!(cone_jf_member(&inst.space, &inst.point), Err(Error::Precondition(_))),
        || inst.point.coords().to_vec(),
    );
    ctx.push(jf);

    // order interval at the origin
    let mut inside = ctx.checks(
        "cone/interval-inside",
        "at the origin every phi in [theta*, psi] lies over psi",
    );
    let mut outside = ctx.checks(
        "cone/interval-outside",
        "at the origin phi below theta* or above psi in some coordinate is rejected",
    );
    let space = ctx.space.clone();
    let n = space.dim();
    let origin = space.zero();
    let mut rng = ctx.rng("interval");
    for i in 0..s.cone_points {
        let psi = random_dual(&space, &mut rng).map(|v| v.abs() + 0.05);
        let interval = cone_interval_at_origin(&space, &psi)?;
        let w = || psi.coords().to_vec();
        inside.check(coderivative(&space, &cone, &origin, &psi)? == interval, w);
        let CoderivResult::OrderInterval { lo, hi } = &interval else {
            inside.check(false, w);
            continue;
        };
        let mut cand = vec![scaled_down(&psi, &mut rng)];
        if i == 0 {
            cand.push(space.zero_dual());
            cand.push(psi.clone());
        }
        for (k, phi) in cand.iter().enumerate() {
            let w = || concat(&[psi.coords(), phi.coords()]);
            inside.check(interval_contains(&space, lo, hi, phi)?, w);
            let cfg = ctx.oracle(&format!("interval/{i}/in/{k}"));
            inside.check(test_membership(&space, &cone, &origin, phi, &psi, &cfg)?.supports_membership(&cfg), w);
        }
        for case in 0..2 {
            let mut phi = scaled_down(&psi, &mut rng).into_coords();
            let s = rng.random_range(0..n);
            let mag = 0.2 + rng.random::<f64>();
            phi[s] = if case == 0 { -mag } else { psi.coords()[s] + mag };
            let phi = Dual::new(phi);
            let w = || concat(&[psi.coords(), phi.coords()]);
            outside.check(!interval_contains(&space, lo, hi, &phi)?, w);
            let cfg = ctx.oracle(&format!("interval/{i}/out/{case}"));
            outside.check(test_membership(&space, &cone, &origin, &phi, &psi, &cfg)?.is_rejected(), w);
        }
    }
    ctx.push(inside);
    ctx.push(outside);
    Ok(())
}
