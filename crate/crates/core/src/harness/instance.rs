//! Deterministic test-instance generation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coverage::{touch, Op};
use crate::error::{Error, Result};
use crate::projections::{random_point, ConvexSet, Mask};
use crate::space::{LpSpace, Primal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    Ball,
    Cylinder,
    Subspace,
    Cone,
}

impl SetKind {
    pub const ALL: [SetKind; 4] = [SetKind::Ball, SetKind::Cylinder, SetKind::Subspace, SetKind::Cone];

    pub fn name(self) -> &'static str {
        match self {
            SetKind::Ball => "ball",
            SetKind::Cylinder => "cylinder",
            SetKind::Subspace => "subspace",
            SetKind::Cone => "cone",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Interior,
    Boundary,
    Exterior,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Interior => "interior",
            Regime::Boundary => "boundary",
            Regime::Exterior => "exterior",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightsMode {
    /// All weights equal to one.
    Unit,
    /// Weights drawn uniformly from `[0.5, 2]`.
    Random,
}

/// Parameters shared by every generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceParams {
    pub n: usize,
    pub p: f64,
    pub weights: WeightsMode,
    pub r: f64,
    pub mask_density: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub space: LpSpace,
    pub set: ConvexSet,
    pub point: Primal,
}

/// 64-bit FNV-1a, used to derive independent seeds from labels.
pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Generator seeded by `seed` and a label, so unrelated draws never share a
/// stream.
pub fn labelled_rng(seed: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(label.as_bytes()))
}

/// The space described by `params`; random weights depend only on `seed`.
pub fn build_space(params: &InstanceParams, seed: u64) -> Result<LpSpace> {
    match params.weights {
        WeightsMode::Unit => LpSpace::new(params.n, params.p),
        WeightsMode::Random => {
            let mut rng = labelled_rng(seed, "weights");
            let w = (0..params.n).map(|_| rng.random_range(0.5..=2.0)).collect();
            LpSpace::with_weights(params.p, w)
        }
    }
}

/// Mask with `max(1, round(density · n))` members chosen at random.
pub fn random_mask<R: Rng + ?Sized>(n: usize, density: f64, rng: &mut R) -> Result<Mask> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidConfig(format!("mask density {density} outside (0, 1]")));
    }
    let k = ((density * n as f64).round() as usize).clamp(1, n);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx.truncate(k);
    Mask::from_indices(n, &idx)
}

/// Normal coordinates pushed away from zero: `|x_s| ≥ floor`.
pub(crate) fn spread_point<R: Rng + ?Sized>(space: &LpSpace, floor: f64, rng: &mut R) -> Primal {
    random_point(space, rng).map(|v| v + floor.copysign(v))
}

/// Rescales `x` so that the masked part has norm `target`.
fn with_masked_norm(space: &LpSpace, mask: &Mask, x: &Primal, target: f64) -> Primal {
    let nm = space.norm(&mask.apply(x));
    let s = target / nm;
    Primal::new(
        x.iter()
            .enumerate()
            .map(|(i, &v)| if mask.contains(i) { v * s } else { v })
            .collect(),
    )
}

/// Draws a set of the given kind and a point in the given regime.
///
/// Ball and cylinder: interior points have masked norm in `[0.05 r, 0.95 r]`,
/// boundary points are scaled so the masked norm equals `r` to rounding, and
/// exterior points have masked norm in `[r + 0.1, 3r + 0.1]`. The cylinder
/// tail has standard normal coordinates. Cone: interior points are strictly
/// positive, boundary points have at least one zero and one positive
/// coordinate, exterior points have at least one negative coordinate.
/// Subspace: boundary and interior points lie in the subspace, exterior
/// points do not.
pub fn gen_instance(params: &InstanceParams, kind: SetKind, regime: Regime, seed: u64) -> Result<Instance> {
    touch(Op::GenInstance);
    let space = build_space(params, seed)?;
    let mut rng = labelled_rng(seed, &format!("instance/{}/{}", kind.name(), regime.name()));
    let n = params.n;
    let r = params.r;
    let (set, point) = match kind {
        SetKind::Ball | SetKind::Cylinder => {
            let (set, mask) = if kind == SetKind::Ball {
                (ConvexSet::ball(r)?, Mask::full(n))
            } else {
                let mask = random_mask(n, params.mask_density, &mut rng)?;
                (ConvexSet::cylinder(r, mask.clone())?, mask)
            };
            let x = spread_point(&space, 0.05, &mut rng);
            let target = match regime {
                Regime::Interior => r * rng.random_range(0.05..0.95),
                Regime::Boundary => r,
                Regime::Exterior => r + 0.1 + 2.0 * r * rng.random::<f64>(),
            };
            (set, with_masked_norm(&space, &mask, &x, target))
        }
        SetKind::Subspace => {
            let mask = random_mask(n, params.mask_density, &mut rng)?;
            let x = spread_point(&space, 0.05, &mut rng);
            let x = match regime {
                Regime::Interior | Regime::Boundary => mask.apply(&x),
                Regime::Exterior => x,
            };
            (ConvexSet::subspace(mask), x)
        }
        SetKind::Cone => {
            let x = spread_point(&space, 0.05, &mut rng).map(f64::abs);
            let mut c = x.into_coords();
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            match regime {
                Regime::Interior => {}
                Regime::Boundary => {
                    // keep idx[0] positive; zero idx[1..1+z]; flip some of the rest
                    if n >= 2 {
                        let zeros = rng.random_range(1..n);
                        for &i in &idx[1..=zeros] {
                            c[i] = 0.0;
                        }
                        for &i in &idx[1 + zeros..] {
                            if rng.random_bool(0.5) {
                                c[i] = -c[i];
                            }
                        }
                    }
                }
                Regime::Exterior => {
                    c[idx[0]] = -c[idx[0]];
                    for &i in &idx[1..] {
                        if rng.random_bool(0.5) {
                            c[i] = -c[i];
                        }
                    }
                }
            }
            (ConvexSet::PositiveCone, Primal::new(c))
        }
    };
    Ok(Instance { space, set, point })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projections::{classify_region, Region, DEFAULT_BAND};

    fn params(n: usize) -> InstanceParams {
        InstanceParams {
            n,
            p: 3.0,
            weights: WeightsMode::Random,
            r: 1.5,
            mask_density: 0.5,
        }
    }

    #[test]
    fn boundary_is_exact() {
        for seed in 0..50 {
            let inst = gen_instance(&params(8), SetKind::Ball, Regime::Boundary, seed).unwrap();
            assert!((inst.space.norm(&inst.point) - 1.5).abs() <= 1e-14 * 1.5);
            let inst = gen_instance(&params(8), SetKind::Cylinder, Regime::Boundary, seed).unwrap();
            let tag = classify_region(&inst.space, &inst.set, &inst.point, DEFAULT_BAND).unwrap();
            assert_eq!(tag.region, Region::Boundary);
        }
    }

    #[test]
    fn regimes_hold() {
        for seed in 0..50 {
            let inst = gen_instance(&params(8), SetKind::Cylinder, Regime::Exterior, seed).unwrap();
            let mask = inst.set.radial_mask(8).unwrap();
            assert!(inst.space.norm(&mask.apply(&inst.point)) > 1.6);
            let inst = gen_instance(&params(8), SetKind::Ball, Regime::Interior, seed).unwrap();
            assert!(inst.space.norm(&inst.point) < 1.5);
            let inst = gen_instance(&params(5), SetKind::Cone, Regime::Boundary, seed).unwrap();
            assert!(inst.point.iter().any(|&v| v == 0.0));
            assert!(inst.point.iter().any(|&v| v > 0.0));
            let inst = gen_instance(&params(5), SetKind::Cone, Regime::Exterior, seed).unwrap();
            assert!(inst.point.iter().any(|&v| v < 0.0));
        }
    }

    #[test]
    fn deterministic() {
        let a = gen_instance(&params(6), SetKind::Cylinder, Regime::Boundary, 7).unwrap();
        let b = gen_instance(&params(6), SetKind::Cylinder, Regime::Boundary, 7).unwrap();
        assert_eq!(a, b);
        let c = gen_instance(&params(6), SetKind::Cylinder, Regime::Boundary, 8).unwrap();
        assert_ne!(a.point, c.point);
    }
}
