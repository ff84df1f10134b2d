//! First-order calculus of the projections: closed-form Fréchet
//! derivatives off the boundary, one-sided finite-difference estimates of
//! directional derivatives, up/down classification of boundary directions
//! and nonsmoothness witnesses at boundary points.

use serde::{Deserialize, Serialize};

use crate::coverage::{touch, Op};
use crate::error::{Error, Result};
use crate::projections::{classify_region, project_unchecked, ConvexSet, Mask, Region, DEFAULT_BAND};
use crate::space::{LpSpace, Primal};

/// Decreasing finite-difference steps plus the convergence tolerance used by
/// the diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdSchedule {
    steps: Vec<f64>,
    tol: f64,
}

impl FdSchedule {
    pub fn new(steps: Vec<f64>, tol: f64) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidConfig("empty step schedule".into()));
        }
        if steps.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidConfig("steps must be positive".into()));
        }
        if steps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidConfig("steps must be strictly decreasing".into()));
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        Ok(Self { steps, tol })
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }
}

impl Default for FdSchedule {
    /// `1e-2, 1e-3, …, 1e-6` with tolerance `1e-4`.
    fn default() -> Self {
        Self {
            steps: (2..=6).map(|k| 10f64.powi(-k)).collect(),
            tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// The masked norm exceeds `r` for all small `t > 0`.
    Up,
    /// The masked norm stays within `r` for all small `t > 0`.
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionClass {
    pub direction: Direction,
    /// `Ψ(x̄_M, v_M)`
    pub slope: f64,
    /// Whether direct evaluation of `‖(x̄ + t v)_M‖` along the schedule is
    /// consistent with the analytic decision; `None` when no step resolves
    /// the difference from `r`.
    ///
    /// `t ↦ ‖(x̄ + t v)_M‖` is convex, so a `Down` direction may leave the set
    /// again at large steps. Consistency therefore means: `Up` is sampled at
    /// every resolvable step for `Up`, and for `Down` the samples read
    /// `Up, …, Up, Down, …, Down` in order of decreasing step with at least
    /// one `Down`.
    pub sampled_agrees: Option<bool>,
    /// Number of large steps sampled as `Up` before the first `Down` sample
    /// of a `Down` direction.
    pub leading_exits: usize,
}

fn radial_parts(space: &LpSpace, set: &ConvexSet) -> Result<(f64, Mask)> {
    set.validate(space)?;
    match (set.radius(), set.radial_mask(space.dim())) {
        (Some(r), Some(m)) => Ok((r, m)),
        _ => Err(Error::Unsupported(match set {
            ConvexSet::PositiveCone => "the positive cone",
            _ => "coordinate subspaces",
        })),
    }
}

fn require_boundary(space: &LpSpace, set: &ConvexSet, xbar: &Primal, r: f64, mask: &Mask) -> Result<()> {
    let tag = classify_region(space, set, xbar, DEFAULT_BAND)?;
    if tag.region != Region::Boundary {
        let gap = space.norm(&mask.apply(xbar)) - r;
        return Err(Error::NotOnBoundary(gap));
    }
    Ok(())
}

/// Decides whether `v` points out of (`Up`) or stays within (`Down`) the
/// ball or cylinder at the boundary point `x̄`.
///
/// The first-order slope `Ψ(x̄_M, v_M)` decides when nonzero. A zero slope
/// with `v_M ≠ θ` is `Up`: the norm is strictly convex, so the supporting
/// hyperplane touches the ball only at `x̄_M`. `v_M = θ` keeps the masked
/// norm at exactly `r`, hence `Down`.
pub fn classify_direction(
    space: &LpSpace,
    set: &ConvexSet,
    xbar: &Primal,
    v: &Primal,
    sched: &FdSchedule,
) -> Result<DirectionClass> {
    touch(Op::ClassifyDirection);
    space.check_len(xbar.len())?;
    space.check_len(v.len())?;
    let (r, mask) = radial_parts(space, set)?;
    require_boundary(space, set, xbar, r, &mask)?;
    if matches!(set, ConvexSet::Ball { .. }) && space.is_theta(v) {
        return Err(Error::Degenerate("direction must be nonzero for a ball"));
    }

    let vm = mask.apply(v);
    let xm = mask.apply(xbar);
    let (direction, slope) = if space.is_theta(&vm) {
        (Direction::Down, 0.0)
    } else {
        let slope = space.smoothness(&xm, &vm)?;
        let flat = slope.abs() <= 1e-12 * space.raw_norm(vm.coords());
        let dir = if flat || slope > 0.0 {
            Direction::Up
        } else {
            Direction::Down
        };
        (dir, slope)
    };

    let resolution = 64.0 * f64::EPSILON * r;
    let samples: Vec<Direction> = sched
        .steps()
        .iter()
        .filter_map(|&t| {
            let gap = space.raw_norm(mask.apply(&xbar.axpy(t, v)).coords()) - r;
            (gap.abs() > resolution).then_some(if gap > 0.0 { Direction::Up } else { Direction::Down })
        })
        .collect();
    let leading_exits = match direction {
        Direction::Up => 0,
        Direction::Down => samples.iter().take_while(|d| **d == Direction::Up).count(),
    };
    let consistent = match direction {
        Direction::Up => samples.iter().all(|d| *d == Direction::Up),
        Direction::Down => {
            leading_exits < samples.len() && samples[leading_exits..].iter().all(|d| *d == Direction::Down)
        }
    };
    Ok(DirectionClass {
        direction,
        slope,
        sampled_agrees: (!samples.is_empty()).then_some(consistent),
        leading_exits,
    })
}

/// Fréchet derivative of the ball or cylinder projection at a non-boundary
/// point applied to `v`: the identity inside, and outside
/// `(r/‖x̄_M‖)(v_M − ⟨J(x̄_M), v_M⟩/‖x̄_M‖² x̄_M) + v_M̄`.
pub fn frechet_apply(space: &LpSpace, set: &ConvexSet, xbar: &Primal, v: &Primal) -> Result<Primal> {
    touch(Op::FrechetApply);
    space.check_len(xbar.len())?;
    space.check_len(v.len())?;
    let (r, mask) = radial_parts(space, set)?;
    match classify_region(space, set, xbar, DEFAULT_BAND)?.region {
        Region::Interior => Ok(v.clone()),
        Region::Boundary => Err(Error::NoFrechetDerivative),
        Region::Exterior => {
            let xm = mask.apply(xbar);
            let vm = mask.apply(v);
            let nm = space.norm(&xm);
            let jxm = space.duality_map(&xm);
            let a = space.dot(&jxm, &vm) / (nm * nm);
            let tangential = vm.axpy(-a, &xm).scale(r / nm);
            Ok(&tangential + &mask.complement().apply(v))
        }
    }
}

/// One-sided finite-difference estimate of the directional derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdEstimate {
    /// Forward difference at the smallest step.
    pub value: Primal,
    /// Distance between the estimates at the two smallest steps.
    pub diagnostic: f64,
    pub converged: bool,
}

/// Forward differences `(P(x + t v) − P(x)) / t` along the schedule.
/// Convergence is declared when the last two estimates differ by at most
/// `10 · tol · max(1, ‖v‖)`.
pub fn gateaux_fd(
    space: &LpSpace,
    set: &ConvexSet,
    x: &Primal,
    v: &Primal,
    sched: &FdSchedule,
) -> Result<FdEstimate> {
    touch(Op::GateauxFd);
    space.check_len(x.len())?;
    space.check_len(v.len())?;
    set.validate(space)?;
    if space.is_theta(v) {
        return Err(Error::Degenerate("direction must be nonzero"));
    }
    let px = project_unchecked(space, set, x);
    let estimates: Vec<Primal> = sched
        .steps()
        .iter()
        .map(|&t| (&project_unchecked(space, set, &x.axpy(t, v)) - &px).scale(1.0 / t))
        .collect();
    let value = estimates.last().cloned().expect("schedule is nonempty");
    let diagnostic = match estimates.len() {
        1 => 0.0,
        k => space.raw_norm((&estimates[k - 1] - &estimates[k - 2]).coords()),
    };
    let scale = space.raw_norm(v.coords()).max(1.0);
    Ok(FdEstimate {
        value,
        diagnostic,
        converged: diagnostic <= 10.0 * sched.tol() * scale,
    })
}

/// Central difference `(P(x + h v) − P(x − h v)) / 2h`; only meaningful
/// where the projection is differentiable.
pub fn central_difference(space: &LpSpace, set: &ConvexSet, x: &Primal, v: &Primal, h: f64) -> Result<Primal> {
    space.check_len(x.len())?;
    space.check_len(v.len())?;
    set.validate(space)?;
    let plus = project_unchecked(space, set, &x.axpy(h, v));
    let minus = project_unchecked(space, set, &x.axpy(-h, v));
    Ok((&plus - &minus).scale(0.5 / h))
}

/// Columns `∂P/∂e_j` of the central finite-difference Jacobian.
pub fn fd_jacobian(space: &LpSpace, set: &ConvexSet, x: &Primal, h: f64) -> Result<Vec<Primal>> {
    (0..space.dim())
        .map(|j| central_difference(space, set, x, &Primal::basis(space.dim(), j), h))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonsmoothnessWitness {
    /// Unit-norm probe direction.
    pub direction: Primal,
    /// `‖P'(x̄)(v) + P'(x̄)(−v)‖`
    pub defect: f64,
    pub forward: Primal,
    pub backward: Primal,
}

/// Searches a fixed probe list for a direction whose one-sided derivatives
/// violate odd symmetry, `‖P'(v) + P'(−v)‖ ≥ 0.1 ‖v‖`; no linear derivative
/// can exist at such a point.
///
/// Probes, in order: the masked radial part `x̄_M`, `x̄`, then the coordinate
/// directions and their masked restrictions. The first probe that meets the
/// threshold is returned.
pub fn nonsmoothness_witness(
    space: &LpSpace,
    set: &ConvexSet,
    xbar: &Primal,
    sched: &FdSchedule,
) -> Result<NonsmoothnessWitness> {
    touch(Op::NonsmoothnessWitness);
    space.check_len(xbar.len())?;
    set.validate(space)?;
    let n = space.dim();
    let mut probes = Vec::new();
    match set {
        ConvexSet::Ball { .. } | ConvexSet::Cylinder { .. } => {
            let (r, mask) = radial_parts(space, set)?;
            require_boundary(space, set, xbar, r, &mask)?;
            probes.push(mask.apply(xbar));
            probes.push(xbar.clone());
            for i in 0..n {
                let e = Primal::basis(n, i);
                probes.push(mask.apply(&e));
                probes.push(e);
            }
        }
        ConvexSet::PositiveCone => {
            let thr = space.theta_threshold();
            if !xbar.iter().any(|v| v.abs() <= thr) {
                return Err(Error::Precondition(
                    "cone witness needs a zero coordinate".into(),
                ));
            }
            probes.push(xbar.clone());
            probes.extend((0..n).map(|i| Primal::basis(n, i)));
        }
        ConvexSet::CoordSubspace { .. } => {
            return Err(Error::Unsupported("coordinate subspaces (the projection is linear)"))
        }
    }

    let mut best = 0.0_f64;
    for probe in probes {
        let norm = space.raw_norm(probe.coords());
        if norm <= space.theta_threshold() {
            continue;
        }
        let v = probe.scale(1.0 / norm);
        let forward = gateaux_fd(space, set, xbar, &v, sched)?.value;
        let backward = gateaux_fd(space, set, xbar, &-&v, sched)?.value;
        let defect = space.raw_norm((&forward + &backward).coords());
        if defect >= 0.1 {
            return Ok(NonsmoothnessWitness {
                direction: v,
                defect,
                forward,
                backward,
            });
        }
        best = best.max(defect);
    }
    Err(Error::WitnessNotFound(best))
}
