//! Closed convex sets with closed-form metric projections.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::coverage::{touch, Op};
use crate::error::{Error, Result};
use crate::space::{Dual, LpSpace, Primal};

/// Default boundary band, relative to the radius.
pub const DEFAULT_BAND: f64 = 1e-9;

/// Membership slack used when checking that a point lies in a set.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// A subset of the coordinate indices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MaskRepr", into = "MaskRepr")]
pub struct Mask {
    members: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct MaskRepr {
    n: usize,
    indices: Vec<usize>,
}

impl TryFrom<MaskRepr> for Mask {
    type Error = Error;
    fn try_from(r: MaskRepr) -> Result<Self> {
        Mask::from_indices(r.n, &r.indices)
    }
}

impl From<Mask> for MaskRepr {
    fn from(m: Mask) -> Self {
        MaskRepr {
            n: m.dim(),
            indices: m.indices().collect(),
        }
    }
}

impl Mask {
    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut members = vec![false; n];
        for &i in indices {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            members[i] = true;
        }
        Ok(Self { members })
    }

    pub fn from_bools(members: Vec<bool>) -> Self {
        Self { members }
    }

    pub fn full(n: usize) -> Self {
        Self {
            members: vec![true; n],
        }
    }

    pub fn empty(n: usize) -> Self {
        Self {
            members: vec![false; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.members.len()
    }

    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.get(i).copied().unwrap_or(false)
    }

    pub fn is_full(&self) -> bool {
        self.members.iter().all(|&b| b)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn complement(&self) -> Self {
        Self {
            members: self.members.iter().map(|b| !b).collect(),
        }
    }

    fn keep(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.members)
            .map(|(&v, &m)| if m { v } else { 0.0 })
            .collect()
    }

    /// `x_M`; caller guarantees matching dimension.
    pub fn apply(&self, x: &Primal) -> Primal {
        debug_assert_eq!(x.len(), self.dim());
        Primal::new(self.keep(x.coords()))
    }

    /// `x*_M`; caller guarantees matching dimension.
    pub fn apply_dual(&self, x: &Dual) -> Dual {
        debug_assert_eq!(x.len(), self.dim());
        Dual::new(self.keep(x.coords()))
    }
}

fn check_mask(space: &LpSpace, mask: &Mask) -> Result<()> {
    if mask.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: mask.dim(),
        });
    }
    Ok(())
}

/// `x_M`: zero outside the mask.
pub fn mask_restrict(x: &Primal, mask: &Mask) -> Result<Primal> {
    touch(Op::MaskRestrict);
    if x.len() != mask.dim() {
        return Err(Error::DimensionMismatch {
            expected: mask.dim(),
            found: x.len(),
        });
    }
    Ok(mask.apply(x))
}

/// Dual counterpart of [`mask_restrict`].
pub fn mask_restrict_dual(x: &Dual, mask: &Mask) -> Result<Dual> {
    touch(Op::MaskRestrict);
    if x.len() != mask.dim() {
        return Err(Error::DimensionMismatch {
            expected: mask.dim(),
            found: x.len(),
        });
    }
    Ok(mask.apply_dual(x))
}

/// `f⁺`
pub fn pos_part(f: &Primal) -> Primal {
    touch(Op::PosPart);
    f.positive_part()
}

/// `f⁻`
pub fn neg_part(f: &Primal) -> Primal {
    touch(Op::NegPart);
    f.negative_part()
}

/// The supported closed convex sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexSet {
    /// `rB`
    Ball { radius: f64 },
    /// `rC_M = {x : ‖x_M‖ ≤ r}`
    Cylinder { radius: f64, mask: Mask },
    /// `{x : x_i = 0 for i ∉ M}`
    CoordSubspace { mask: Mask },
    /// Componentwise nonnegative points.
    PositiveCone,
}

impl ConvexSet {
    pub fn ball(radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(Self::Ball { radius })
    }

    pub fn cylinder(radius: f64, mask: Mask) -> Result<Self> {
        check_radius(radius)?;
        if mask.count() == 0 {
            return Err(Error::EmptyMask);
        }
        Ok(Self::Cylinder { radius, mask })
    }

    pub fn subspace(mask: Mask) -> Self {
        Self::CoordSubspace { mask }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Ball { .. } => "ball",
            Self::Cylinder { .. } => "cylinder",
            Self::CoordSubspace { .. } => "subspace",
            Self::PositiveCone => "cone",
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match self {
            Self::Ball { radius } | Self::Cylinder { radius, .. } => Some(*radius),
            _ => None,
        }
    }

    /// The mask `M` governing the radial part; the full index set for a ball.
    pub fn radial_mask(&self, n: usize) -> Option<Mask> {
        match self {
            Self::Ball { .. } => Some(Mask::full(n)),
            Self::Cylinder { mask, .. } => Some(mask.clone()),
            _ => None,
        }
    }

    /// Checks dimension compatibility with `space`.
    pub fn validate(&self, space: &LpSpace) -> Result<()> {
        match self {
            Self::Ball { radius } => check_radius(*radius),
            Self::Cylinder { radius, mask } => {
                check_radius(*radius)?;
                check_mask(space, mask)?;
                if mask.count() == 0 {
                    return Err(Error::EmptyMask);
                }
                Ok(())
            }
            Self::CoordSubspace { mask } => check_mask(space, mask),
            Self::PositiveCone => Ok(()),
        }
    }

    /// Whether `x` lies in the set, up to a relative slack `tol`.
    pub fn contains(&self, space: &LpSpace, x: &Primal, tol: f64) -> bool {
        let scale = space.raw_norm(x.coords()).max(1.0);
        match self {
            Self::Ball { radius } => space.raw_norm(x.coords()) <= radius * (1.0 + tol),
            Self::Cylinder { radius, mask } => {
                space.raw_norm(mask.apply(x).coords()) <= radius * (1.0 + tol)
            }
            Self::CoordSubspace { mask } => x
                .iter()
                .enumerate()
                .all(|(i, v)| mask.contains(i) || v.abs() <= tol * scale),
            Self::PositiveCone => x.iter().all(|&v| v >= -tol * scale),
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidRadius(r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionTag {
    pub region: Region,
    /// Relative band used for the classification.
    pub band: f64,
}

/// Interior / boundary / exterior classification of `x` relative to a ball
/// or cylinder, comparing `‖x_M‖` with `r` inside a band of `band · r`.
pub fn classify_region(
    space: &LpSpace,
    set: &ConvexSet,
    x: &Primal,
    band: f64,
) -> Result<RegionTag> {
    touch(Op::ClassifyRegion);
    space.check_len(x.len())?;
    let (radius, masked_norm) = match set {
        ConvexSet::Ball { radius } => (*radius, space.raw_norm(x.coords())),
        ConvexSet::Cylinder { radius, mask } => {
            check_mask(space, mask)?;
            (*radius, space.raw_norm(mask.apply(x).coords()))
        }
        ConvexSet::CoordSubspace { .. } => return Err(Error::Unsupported("coordinate subspaces")),
        ConvexSet::PositiveCone => return Err(Error::Unsupported("the positive cone")),
    };
    let gap = masked_norm - radius;
    let region = if gap.abs() <= band * radius {
        Region::Boundary
    } else if gap < 0.0 {
        Region::Interior
    } else {
        Region::Exterior
    };
    Ok(RegionTag { region, band })
}

/// Metric projection onto `set`.
pub fn project(space: &LpSpace, set: &ConvexSet, x: &Primal) -> Result<Primal> {
    space.check_len(x.len())?;
    set.validate(space)?;
    Ok(project_unchecked(space, set, x))
}

pub(crate) fn project_unchecked(space: &LpSpace, set: &ConvexSet, x: &Primal) -> Primal {
    touch(Op::Project);
    match set {
        ConvexSet::Ball { radius } => {
            let nx = space.raw_norm(x.coords());
            if nx <= *radius {
                x.clone()
            } else {
                x.scale(radius / nx)
            }
        }
        ConvexSet::Cylinder { radius, mask } => {
            let xm = mask.apply(x);
            let nm = space.raw_norm(xm.coords());
            if nm <= *radius {
                x.clone()
            } else {
                let s = radius / nm;
                Primal::new(
                    x.iter()
                        .enumerate()
                        .map(|(i, &v)| if mask.contains(i) { s * v } else { v })
                        .collect(),
                )
            }
        }
        ConvexSet::CoordSubspace { mask } => mask.apply(x),
        ConvexSet::PositiveCone => x.positive_part(),
    }
}

/// `min_z ⟨J(x − u), u − z⟩` over the supplied feasible samples. A negative
/// value certifies that `u` is not the projection of `x`; an empty sample
/// list yields `+∞`.
pub fn variational_residual(
    space: &LpSpace,
    set: &ConvexSet,
    x: &Primal,
    u: &Primal,
    z_samples: &[Primal],
) -> Result<f64> {
    touch(Op::VariationalResidual);
    space.check_len(x.len())?;
    space.check_len(u.len())?;
    set.validate(space)?;
    let j = space.duality_map(&(x - u));
    let mut best = f64::INFINITY;
    for (index, z) in z_samples.iter().enumerate() {
        space.check_len(z.len())?;
        if !set.contains(space, z, MEMBERSHIP_TOL) {
            return Err(Error::OutsideSet { index });
        }
        best = best.min(space.dot(&j, &(u - z)));
    }
    Ok(best)
}

/// Random point of `space` with standard normal coordinates.
pub fn random_point<R: Rng + ?Sized>(space: &LpSpace, rng: &mut R) -> Primal {
    Primal::new((0..space.dim()).map(|_| rng.sample(StandardNormal)).collect())
}

/// Random dual point with standard normal coordinates.
pub fn random_dual<R: Rng + ?Sized>(space: &LpSpace, rng: &mut R) -> Dual {
    Dual::new((0..space.dim()).map(|_| rng.sample(StandardNormal)).collect())
}

/// Random feasible point of `set`: ball samples use a random direction with
/// radius drawn uniformly in `[0, r]`; cylinders add a free unmasked tail;
/// cone samples are componentwise absolute values; subspace samples are
/// masked normals.
pub fn sample_member<R: Rng + ?Sized>(space: &LpSpace, set: &ConvexSet, rng: &mut R) -> Primal {
    let g = random_point(space, rng);
    match set {
        ConvexSet::Ball { radius } => {
            let ng = space.raw_norm(g.coords()).max(f64::MIN_POSITIVE);
            g.scale(radius * rng.random::<f64>() / ng)
        }
        ConvexSet::Cylinder { radius, mask } => {
            let gm = mask.apply(&g);
            let ng = space.raw_norm(gm.coords()).max(f64::MIN_POSITIVE);
            let s = radius * rng.random::<f64>() / ng;
            Primal::new(
                g.iter()
                    .enumerate()
                    .map(|(i, &v)| if mask.contains(i) { s * v } else { 3.0 * v })
                    .collect(),
            )
        }
        ConvexSet::CoordSubspace { mask } => mask.apply(&g),
        ConvexSet::PositiveCone => g.map(f64::abs),
    }
}
