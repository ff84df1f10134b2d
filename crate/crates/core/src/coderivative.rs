//! Closed-form Fréchet coderivatives `D̂*P_C(x̄)(y*)` of the projections.
//!
//! Off the boundary the projection is Fréchet differentiable and the
//! coderivative is the singleton adjoint of the derivative. On the boundary
//! only three queries have closed answers: `y* = θ*` (singleton `θ*`),
//! `y* = J(x̄)` (empty) and whether `θ*` belongs to the fiber.

use serde::{Deserialize, Serialize};

use crate::coverage::{touch, Op};
use crate::decomposition::Anchor;
use crate::error::{Error, Result};
use crate::projections::{classify_region, ConvexSet, Mask, Region, DEFAULT_BAND};
use crate::smooth::{self, classify_direction, Direction, FdSchedule};
use crate::space::{Dual, LpSpace, Primal};

/// Relative tolerance of the Hölder equality `⟨y*_M, x̄_M⟩ = −r‖y*_M‖_q`.
pub const EQUALITY_TOL: f64 = 1e-9;

/// Relative tolerance for recognising the special queries `θ*` and `J(x̄)`.
pub const QUERY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Member,
    NotMember,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub name: String,
    pub holds: bool,
    pub slack: f64,
}

impl ConditionReport {
    fn new(name: &str, holds: bool, slack: f64) -> Self {
        Self {
            name: name.to_owned(),
            holds,
            slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoderivResult {
    Singleton { value: Dual },
    Empty,
    /// Whether `θ*` belongs to the fiber over `y*`.
    ThetaMembership {
        verdict: Verdict,
        certificates: Vec<ConditionReport>,
    },
    OrderInterval { lo: Dual, hi: Dual },
}

impl CoderivResult {
    pub fn singleton(&self) -> Option<&Dual> {
        match self {
            Self::Singleton { value } => Some(value),
            _ => None,
        }
    }

    pub fn verdict(&self) -> Option<Verdict> {
        match self {
            Self::ThetaMembership { verdict, .. } => Some(*verdict),
            _ => None,
        }
    }

    pub fn certificate(&self, name: &str) -> Option<&ConditionReport> {
        match self {
            Self::ThetaMembership { certificates, .. } => certificates.iter().find(|c| c.name == name),
            _ => None,
        }
    }
}

fn near(space: &LpSpace, a: &Dual, b: &Dual, scale: f64) -> bool {
    space.raw_dual_norm((a - b).coords()) <= QUERY_TOL * scale.max(1.0)
}

/// `(r/‖x̄_M‖)(y*_M − ⟨y*_M, x̄_M⟩/‖x̄_M‖² J(x̄_M)) + y*_M̄`, the adjoint of the
/// exterior derivative.
fn exterior_adjoint(space: &LpSpace, r: f64, mask: &Mask, xbar: &Primal, ys: &Dual) -> Dual {
    let xm = mask.apply(xbar);
    let ym = mask.apply_dual(ys);
    let nm = space.norm(&xm);
    let a = space.dot(&ym, &xm) / (nm * nm);
    let tangential = ym.axpy(-a, &space.duality_map(&xm)).scale(r / nm);
    &tangential + &mask.complement().apply_dual(ys)
}

fn radial_coderiv(
    space: &LpSpace,
    set: &ConvexSet,
    r: f64,
    mask: &Mask,
    xbar: &Primal,
    ys: &Dual,
) -> Result<CoderivResult> {
    space.check_len(xbar.len())?;
    space.check_len(ys.len())?;
    Ok(match classify_region(space, set, xbar, DEFAULT_BAND)?.region {
        Region::Interior => CoderivResult::Singleton { value: ys.clone() },
        Region::Exterior => CoderivResult::Singleton {
            value: exterior_adjoint(space, r, mask, xbar, ys),
        },
        Region::Boundary => {
            let jx = space.duality_map(xbar);
            if space.is_theta_dual(ys) {
                CoderivResult::Singleton {
                    value: space.zero_dual(),
                }
            } else if near(space, ys, &jx, space.norm(xbar)) {
                CoderivResult::Empty
            } else if mask.is_full() {
                sphere_membership(space, r, xbar, ys)?
            } else {
                cylinder_membership(space, r, mask, xbar, ys)?
            }
        }
    })
}

/// Coderivative of the projection onto the ball `rB` at `x̄`.
pub fn coderiv_ball(space: &LpSpace, r: f64, xbar: &Primal, ys: &Dual) -> Result<CoderivResult> {
    touch(Op::CoderivBall);
    let set = ConvexSet::ball(r)?;
    radial_coderiv(space, &set, r, &Mask::full(space.dim()), xbar, ys)
}

/// Coderivative of the projection onto the cylinder `rC_M` at `x̄`.
pub fn coderiv_cylinder(space: &LpSpace, r: f64, mask: &Mask, xbar: &Primal, ys: &Dual) -> Result<CoderivResult> {
    touch(Op::CoderivCylinder);
    let set = ConvexSet::cylinder(r, mask.clone())?;
    set.validate(space)?;
    radial_coderiv(space, &set, r, mask, xbar, ys)
}

/// Hölder equality certificate: `y*_M` is a negative multiple of `J(x̄_M)`,
/// measured as the distance between the normalized vectors.
fn holder_alignment(space: &LpSpace, xm: &Primal, ym: &Dual) -> ConditionReport {
    let ny = space.raw_dual_norm(ym.coords());
    let slack = if ny <= space.theta_threshold() {
        f64::INFINITY
    } else {
        let jx = space.duality_map(xm);
        let nx = space.norm(xm);
        space.raw_dual_norm((&ym.scale(1.0 / ny) + &jx.scale(1.0 / nx)).coords())
    };
    ConditionReport::new("y*_M = -c J(x_M), c > 0", slack <= 1e-8, slack)
}

fn equality_condition(space: &LpSpace, r: f64, xm: &Primal, ym: &Dual) -> (ConditionReport, f64) {
    let ny = space.raw_dual_norm(ym.coords());
    let slack = space.dot(ym, xm) + r * ny;
    let holds = ny > space.theta_threshold() && slack.abs() <= EQUALITY_TOL * r * ny;
    (ConditionReport::new("<y*_M, x_M> = -r |y*_M|_q", holds, slack), ny)
}

fn radial_direction(space: &LpSpace, set: &ConvexSet, xbar: &Primal, v: &Primal) -> Result<(Direction, f64)> {
    let c = classify_direction(space, set, xbar, v, &FdSchedule::default())?;
    Ok((c.direction, c.slope))
}

/// Whether `θ*` belongs to `D̂*P_{rB}(x̄)(y*)` at a sphere point.
///
/// In ℓ_p the answer is exactly: `−J*(y*)` is an up direction and
/// `⟨y*, x̄⟩ = −r‖y*‖_q`. The certificates also report the weaker necessary
/// and sufficient conditions that hold in any uniformly smooth space.
pub fn sphere_theta_member(space: &LpSpace, r: f64, xbar: &Primal, ys: &Dual) -> Result<CoderivResult> {
    touch(Op::SphereThetaMember);
    space.check_len(xbar.len())?;
    space.check_len(ys.len())?;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidRadius(r));
    }
    let gap = space.norm(xbar) - r;
    if gap.abs() > DEFAULT_BAND * r {
        return Err(Error::NotOnBoundary(gap));
    }
    if space.is_theta_dual(ys) {
        return Err(Error::Degenerate("query must be nonzero"));
    }
    sphere_membership(space, r, xbar, ys)
}

fn sphere_membership(space: &LpSpace, r: f64, xbar: &Primal, ys: &Dual) -> Result<CoderivResult> {
    let set = ConvexSet::ball(r)?;
    let anchor = Anchor::new(space, xbar.clone())?;
    let mut certs = Vec::new();

    let (direction, slope) = radial_direction(space, &set, xbar, &-&space.duality_map_inv(ys))?;
    let up = direction == Direction::Up;
    certs.push(ConditionReport::new("-J*(y*) is an up direction", up, slope));
    let (equality, ny) = equality_condition(space, r, xbar, ys);
    let equal = equality.holds;
    certs.push(equality);
    certs.push(holder_alignment(space, xbar, ys));

    // Necessary conditions valid in any uniformly smooth space.
    let pairing = space.dot(ys, xbar);
    let scale = r * ny;
    certs.push(ConditionReport::new(
        "<y*, x> <= 0",
        pairing <= EQUALITY_TOL * scale,
        pairing,
    ));
    let os = anchor.o_star(ys);
    let os_norm = space.raw_dual_norm(os.coords());
    let os_vanishes = os_norm <= EQUALITY_TOL * ny;
    let jos = space.duality_map_inv(&os);
    let (not_up, os_slope) = if os_vanishes {
        (true, 0.0)
    } else {
        let (d, s) = radial_direction(space, &set, xbar, &-&jos)?;
        (d != Direction::Up, s)
    };
    certs.push(ConditionReport::new("-J*(o*(y*)) is not an up direction", not_up, os_slope));
    let jos_norm = space.raw_norm(jos.coords());
    let curvature = if os_vanishes {
        0.0
    } else {
        pairing / (r * r) * space.dot(anchor.xbar_star(), &jos) + jos_norm * jos_norm
    };
    certs.push(ConditionReport::new(
        "<y*, x>/r^2 <J(x), J*(o*(y*))> + |J*(o*(y*))|^2 <= 0",
        curvature <= EQUALITY_TOL * ny * ny.max(1.0),
        curvature,
    ));

    // Sufficient condition valid in any uniformly smooth space.
    certs.push(ConditionReport::new(
        "o*(y*) = 0 and <y*, x> < 0",
        os_vanishes && pairing < 0.0,
        os_norm,
    ));

    if space.p() == 2.0 {
        // y, viewed as a primal vector, is a negative multiple of x̄.
        let y = Primal::new(ys.coords().to_vec());
        let o = anchor.o_part(&y);
        let o_norm = space.raw_norm(o.coords());
        certs.push(ConditionReport::new(
            "hilbert: y = <y, x>/|x|^2 x and <y, x> < 0",
            o_norm <= EQUALITY_TOL * ny && pairing < 0.0,
            o_norm,
        ));
    }

    let flat = slope.abs() <= 1e-12 * ny;
    let verdict = match (up, equal) {
        (true, true) if flat => Verdict::Undetermined,
        (true, true) => Verdict::Member,
        _ => Verdict::NotMember,
    };
    Ok(CoderivResult::ThetaMembership {
        verdict,
        certificates: certs,
    })
}

fn cylinder_membership(space: &LpSpace, r: f64, mask: &Mask, xbar: &Primal, ys: &Dual) -> Result<CoderivResult> {
    let set = ConvexSet::cylinder(r, mask.clone())?;
    let xm = mask.apply(xbar);
    let ym = mask.apply_dual(ys);
    let ny = space.raw_dual_norm(ys.coords());
    let mut certs = Vec::new();

    let tail = space.raw_dual_norm(mask.complement().apply_dual(ys).coords());
    let tail_vanishes = tail <= EQUALITY_TOL * ny;
    certs.push(ConditionReport::new("y*_M' = 0", tail_vanishes, tail));

    let v = mask.apply(&-&space.duality_map_inv(ys));
    let (direction, slope) = radial_direction(space, &set, xbar, &v)?;
    let not_down = direction != Direction::Down;
    certs.push(ConditionReport::new("-J*(y*)_M is not a down direction", not_down, slope));

    let (equality, nym) = equality_condition(space, r, &xm, &ym);
    let equal = equality.holds;
    certs.push(equality);
    certs.push(holder_alignment(space, &xm, &ym));

    let flat = slope.abs() <= 1e-12 * nym;
    let verdict = match (tail_vanishes, not_down, equal) {
        (true, true, true) if flat => Verdict::Undetermined,
        (true, true, true) => Verdict::Member,
        _ => Verdict::NotMember,
    };
    Ok(CoderivResult::ThetaMembership {
        verdict,
        certificates: certs,
    })
}

fn is_zero(space: &LpSpace, v: f64) -> bool {
    v.abs() <= space.theta_threshold()
}

/// Whether `θ*` belongs to `D̂*P_{K}(f)(φ)` for the positive cone.
///
/// A coordinate `s` violates membership when `φ_s ≠ 0` and `f_s > 0`, or when
/// `φ_s < 0` and `f_s = 0`. Coordinates with `f_s < 0` are locally projected
/// to zero and impose nothing in a finite atomic measure space; the
/// diffuse-measure condition `φ_s < 0, f_s ≤ 0` is reported as a separate
/// certificate.
pub fn cone_theta_member(space: &LpSpace, f: &Primal, phi: &Dual) -> Result<CoderivResult> {
    touch(Op::ConeThetaMember);
    space.check_len(f.len())?;
    space.check_len(phi.len())?;
    let mut active = Vec::new();
    let mut touching = Vec::new();
    let mut diffuse = Vec::new();
    for (s, (&fs, &ps)) in f.iter().zip(phi.iter()).enumerate() {
        let phi_zero = is_zero(space, ps);
        let f_zero = is_zero(space, fs);
        if !phi_zero && fs > 0.0 && !f_zero {
            active.push(s);
        }
        if !phi_zero && ps < 0.0 && f_zero {
            touching.push(s);
        }
        if !phi_zero && ps < 0.0 && (fs <= 0.0 || f_zero) {
            diffuse.push(s);
        }
    }
    let describe = |name: &str, idx: &[usize]| {
        let listed = idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        ConditionReport::new(&format!("{name} [{listed}]"), idx.is_empty(), idx.len() as f64)
    };
    let certificates = vec![
        describe("no coordinate with phi != 0 and f > 0", &active),
        describe("no coordinate with phi < 0 and f = 0", &touching),
        describe("diffuse measure: no coordinate with phi < 0 and f <= 0", &diffuse),
    ];
    let verdict = if active.is_empty() && touching.is_empty() {
        Verdict::Member
    } else {
        Verdict::NotMember
    };
    Ok(CoderivResult::ThetaMembership { verdict, certificates })
}

fn in_positive_cone(space: &LpSpace, coords: &[f64]) -> bool {
    coords.iter().all(|&v| v >= -space.theta_threshold())
}

/// `J(f) ∈ D̂*P_K(f)(J(f))` for every `f` in the cone.
pub fn cone_jf_member(space: &LpSpace, f: &Primal) -> Result<CoderivResult> {
    touch(Op::ConeJfMember);
    space.check_len(f.len())?;
    if !in_positive_cone(space, f.coords()) {
        return Err(Error::Precondition("f must lie in the positive cone".into()));
    }
    Ok(CoderivResult::ThetaMembership {
        verdict: Verdict::Member,
        certificates: vec![ConditionReport::new("f in K_p", true, 0.0)],
    })
}

/// `D̂*P_K(θ)(ψ) = [θ*, ψ]` for `ψ` in the dual cone.
pub fn cone_interval_at_origin(space: &LpSpace, psi: &Dual) -> Result<CoderivResult> {
    touch(Op::ConeIntervalAtOrigin);
    space.check_len(psi.len())?;
    if !in_positive_cone(space, psi.coords()) {
        return Err(Error::Precondition("psi must lie in the dual positive cone".into()));
    }
    Ok(CoderivResult::OrderInterval {
        lo: space.zero_dual(),
        hi: psi.clone(),
    })
}

/// Componentwise `lo ≤ φ ≤ hi` up to the θ-threshold.
pub fn interval_contains(space: &LpSpace, lo: &Dual, hi: &Dual, phi: &Dual) -> Result<bool> {
    touch(Op::IntervalContains);
    space.check_len(lo.len())?;
    space.check_len(hi.len())?;
    space.check_len(phi.len())?;
    let thr = space.theta_threshold();
    Ok(phi
        .iter()
        .zip(lo.iter().zip(hi.iter()))
        .all(|(&v, (&a, &b))| v >= a - thr && v <= b + thr))
}

/// Dispatches to the closed form for any supported set.
///
/// For the cone: the `θ*` query is the singleton `θ*`, at `f = θ` a query in
/// the dual cone yields the order interval, and every other query reports
/// `θ*`-membership. The subspace projection is linear, so its coderivative
/// is the singleton `y*_M`.
pub fn coderivative(space: &LpSpace, set: &ConvexSet, xbar: &Primal, ys: &Dual) -> Result<CoderivResult> {
    set.validate(space)?;
    match set {
        ConvexSet::Ball { radius } => coderiv_ball(space, *radius, xbar, ys),
        ConvexSet::Cylinder { radius, mask } => coderiv_cylinder(space, *radius, mask, xbar, ys),
        ConvexSet::CoordSubspace { mask } => {
            space.check_len(xbar.len())?;
            space.check_len(ys.len())?;
            Ok(CoderivResult::Singleton {
                value: mask.apply_dual(ys),
            })
        }
        ConvexSet::PositiveCone => {
            space.check_len(xbar.len())?;
            if space.is_theta_dual(ys) {
                Ok(CoderivResult::Singleton {
                    value: space.zero_dual(),
                })
            } else if space.is_theta(xbar) && in_positive_cone(space, ys.coords()) {
                cone_interval_at_origin(space, ys)
            } else {
                cone_theta_member(space, xbar, ys)
            }
        }
    }
}

/// Adjoint action of the central finite-difference Jacobian of the
/// projection: the dual `x*` with `⟨x*, v⟩ = ⟨y*, Jac·v⟩` for all `v`.
pub fn fd_adjoint(space: &LpSpace, set: &ConvexSet, x: &Primal, ys: &Dual, h: f64) -> Result<Dual> {
    space.check_len(ys.len())?;
    let columns = smooth::fd_jacobian(space, set, x, h)?;
    Ok(Dual::new(
        columns
            .iter()
            .zip(space.weights())
            .map(|(col, w)| space.dot(ys, col) / w)
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Primal {
        Primal::new(v.to_vec())
    }

    fn d(v: &[f64]) -> Dual {
        Dual::new(v.to_vec())
    }

    #[test]
    fn ball_off_boundary() {
        let s = LpSpace::new(2, 2.0).unwrap();
        let ys = d(&[7.0, -3.0]);
        let res = coderiv_ball(&s, 1.0, &p(&[0.1, 0.2]), &ys).unwrap();
        assert_eq!(res.singleton(), Some(&ys));

        let xbar = p(&[2.0, 0.0]);
        let res = coderiv_ball(&s, 1.0, &xbar, &d(&[0.0, 1.0])).unwrap();
        assert!(res.singleton().unwrap().max_abs_diff(&d(&[0.0, 0.5])) < 1e-15);
        let fd = fd_adjoint(&s, &ConvexSet::ball(1.0).unwrap(), &xbar, &d(&[0.0, 1.0]), 1e-5).unwrap();
        assert!(fd.max_abs_diff(&d(&[0.0, 0.5])) < 1e-8);

        let s3 = LpSpace::new(3, 3.0).unwrap();
        let xbar = p(&[2.0, -1.0, 0.5]);
        let res = coderiv_ball(&s3, 1.0, &xbar, &s3.duality_map(&xbar)).unwrap();
        assert!(s3.dual_norm(res.singleton().unwrap()) < 1e-14);

        // y* ⊥ x̄
        let ys = d(&[0.0, 1.0, 2.0]);
        let res = coderiv_ball(&s3, 1.0, &xbar, &ys).unwrap();
        let expected = ys.scale(1.0 / s3.norm(&xbar));
        assert!(res.singleton().unwrap().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn ball_boundary_queries() {
        let s = LpSpace::new(2, 2.0).unwrap();
        let xbar = p(&[1.0, 0.0]);
        assert_eq!(
            coderiv_ball(&s, 1.0, &xbar, &s.zero_dual()).unwrap().singleton(),
            Some(&s.zero_dual())
        );
        assert_eq!(coderiv_ball(&s, 1.0, &xbar, &d(&[1.0, 0.0])).unwrap(), CoderivResult::Empty);
        let member = sphere_theta_member(&s, 1.0, &xbar, &d(&[-1.0, 0.0])).unwrap();
        assert_eq!(member.verdict(), Some(Verdict::Member));
        assert!(member.certificate("hilbert: y = <y, x>/|x|^2 x and <y, x> < 0").unwrap().holds);
        let not = sphere_theta_member(&s, 1.0, &xbar, &d(&[0.0, 1.0])).unwrap();
        assert_eq!(not.verdict(), Some(Verdict::NotMember));
        assert!(!not.certificate("hilbert: y = <y, x>/|x|^2 x and <y, x> < 0").unwrap().holds);

        let s3 = LpSpace::new(2, 3.0).unwrap();
        let res = sphere_theta_member(&s3, 1.0, &xbar, &d(&[-0.5, 0.0])).unwrap();
        assert_eq!(res.verdict(), Some(Verdict::Member));
        assert!(res.certificate("y*_M = -c J(x_M), c > 0").unwrap().holds);

        assert!(matches!(
            sphere_theta_member(&s, 1.0, &p(&[0.5, 0.0]), &d(&[-1.0, 0.0])),
            Err(Error::NotOnBoundary(_))
        ));
    }

    #[test]
    fn positive_alignment_is_not_member() {
        let s = LpSpace::new(3, 1.5).unwrap();
        let xbar = p(&[0.6, -0.3, 0.2]);
        let r = s.norm(&xbar);
        let res = sphere_theta_member(&s, r, &xbar, &s.duality_map(&xbar).scale(2.0)).unwrap();
        assert_eq!(res.verdict(), Some(Verdict::NotMember));
        assert!(!res.certificate("<y*, x> <= 0").unwrap().holds);
    }

    #[test]
    fn cylinder_examples() {
        let s = LpSpace::new(3, 2.0).unwrap();
        let mask = Mask::from_indices(3, &[0, 1]).unwrap();
        let xbar = p(&[3.0, 4.0, 7.0]);
        let res = coderiv_cylinder(&s, 1.0, &mask, &xbar, &d(&[0.0, 0.0, 5.0])).unwrap();
        assert_eq!(res.singleton(), Some(&d(&[0.0, 0.0, 5.0])));

        let s3 = LpSpace::new(3, 3.0).unwrap();
        let jx = s3.duality_map(&xbar);
        let res = coderiv_cylinder(&s3, 1.0, &mask, &xbar, &jx).unwrap();
        let expected = mask.complement().apply_dual(&jx);
        assert!(res.singleton().unwrap().max_abs_diff(&expected) < 1e-14);

        let xbar = p(&[0.6, 0.8, 2.0]);
        let res = coderiv_cylinder(&s, 1.0, &mask, &xbar, &mask.apply_dual(&-&s.duality_map(&xbar))).unwrap();
        assert_eq!(res.verdict(), Some(Verdict::Member));
        let res = coderiv_cylinder(&s, 1.0, &mask, &xbar, &s.duality_map(&xbar)).unwrap();
        assert_eq!(res, CoderivResult::Empty);
        // nonzero tail breaks membership
        let res = coderiv_cylinder(&s, 1.0, &mask, &xbar, &d(&[-0.6, -0.8, 0.1])).unwrap();
        assert_eq!(res.verdict(), Some(Verdict::NotMember));
        assert!(!res.certificate("y*_M' = 0").unwrap().holds);
    }

    #[test]
    fn full_mask_cylinder_matches_ball() {
        let s = LpSpace::new(3, 3.0).unwrap();
        let full = Mask::full(3);
        let xbar = p(&[0.5, -0.7, 0.2]);
        let r = s.norm(&xbar);
        for ys in [d(&[-0.1, 0.3, 0.2]), s.duality_map(&xbar).scale(-2.0), d(&[1.0, 0.0, 0.0])] {
            for x in [xbar.clone(), xbar.scale(0.5), xbar.scale(2.0)] {
                let a = coderiv_ball(&s, r, &x, &ys).unwrap();
                let b = coderiv_cylinder(&s, r, &full, &x, &ys).unwrap();
                assert_eq!(a.verdict(), b.verdict());
                assert_eq!(a.singleton(), b.singleton());
            }
        }
    }

    #[test]
    fn cone_examples() {
        let s = LpSpace::new(2, 3.0).unwrap();
        let v = |f: &[f64], phi: &[f64]| cone_theta_member(&s, &p(f), &d(phi)).unwrap().verdict().unwrap();
        assert_eq!(v(&[-1.0, -2.0], &[1.0, 0.0]), Verdict::Member);
        let f = p(&[1.0, 0.0]);
        assert_eq!(
            cone_theta_member(&s, &f, &s.duality_map(&f)).unwrap().verdict(),
            Some(Verdict::NotMember)
        );
        assert_eq!(v(&[-1.0, 2.0], &[0.0, 1.0]), Verdict::NotMember);
        assert_eq!(v(&[0.0, 2.0], &[-1.0, 0.0]), Verdict::NotMember);
        // strictly negative coordinates are locally inert
        let res = cone_theta_member(&s, &p(&[-1.0, 2.0]), &d(&[-1.0, 0.0])).unwrap();
        assert_eq!(res.verdict(), Some(Verdict::Member));
        let diffuse = res
            .certificate("diffuse measure: no coordinate with phi < 0 and f <= 0 [0]")
            .unwrap();
        assert!(!diffuse.holds);

        assert_eq!(cone_jf_member(&s, &p(&[1.0, 2.0])).unwrap().verdict(), Some(Verdict::Member));
        assert_eq!(cone_jf_member(&s, &s.zero()).unwrap().verdict(), Some(Verdict::Member));
        assert!(cone_jf_member(&s, &p(&[1.0, -1.0])).is_err());
    }

    #[test]
    fn cone_interval() {
        let s = LpSpace::new(2, 3.0).unwrap();
        let psi = d(&[1.0, 2.0]);
        let res = cone_interval_at_origin(&s, &psi).unwrap();
        let CoderivResult::OrderInterval { lo, hi } = res else {
            panic!("expected an interval")
        };
        assert_eq!(lo, s.zero_dual());
        assert_eq!(hi, psi);
        assert!(interval_contains(&s, &lo, &hi, &d(&[0.5, 2.0])).unwrap());
        assert!(!interval_contains(&s, &lo, &hi, &d(&[-0.1, 1.0])).unwrap());
        assert!(!interval_contains(&s, &lo, &hi, &d(&[1.5, 1.0])).unwrap());
        assert!(cone_interval_at_origin(&s, &d(&[1.0, -1.0])).is_err());
        let degenerate = cone_interval_at_origin(&s, &s.zero_dual()).unwrap();
        assert_eq!(
            degenerate,
            CoderivResult::OrderInterval {
                lo: s.zero_dual(),
                hi: s.zero_dual()
            }
        );
    }
}
