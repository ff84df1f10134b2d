//! Per-thread call counters for the public operations.
//!
//! The harness resets the counters before a suite and snapshots them
//! afterwards, so a report can show which operations a run exercised.
//! Counters are thread-local: concurrent suites on other threads do not
//! leak into each other's reports.

use std::cell::RefCell;
use std::collections::BTreeMap;

macro_rules! ops {
    ($($variant:ident => $name:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Op { $($variant),* }

        impl Op {
            pub const ALL: &'static [Op] = &[$(Op::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $(Op::$variant => $name),* }
            }
        }
    };
}

ops! {
    NormPrimal => "norm_primal",
    NormDual => "norm_dual",
    Pair => "pair",
    DualityMap => "duality_map",
    DualityMapInv => "duality_map_inv",
    Smoothness => "smoothness",
    ACoef => "a_coef",
    OPart => "o_part",
    AStar => "a_star",
    OStar => "o_star",
    InO => "in_O",
    MaskRestrict => "mask_restrict",
    PosPart => "pos_part",
    NegPart => "neg_part",
    ClassifyRegion => "classify_region",
    Project => "project",
    VariationalResidual => "variational_residual",
    ClassifyDirection => "classify_direction",
    FrechetApply => "frechet_apply",
    GateauxFd => "gateaux_fd",
    NonsmoothnessWitness => "nonsmoothness_witness",
    CoderivBall => "coderiv_ball",
    SphereThetaMember => "sphere_theta_member",
    CoderivCylinder => "coderiv_cylinder",
    ConeThetaMember => "cone_theta_member",
    ConeJfMember => "cone_jf_member",
    ConeIntervalAtOrigin => "cone_interval_at_origin",
    IntervalContains => "interval_contains",
    CoderivQuotient => "coderiv_quotient",
    TestMembership => "test_membership",
    RunSuite => "run_suite",
    GenInstance => "gen_instance",
}

thread_local! {
    static COUNTS: RefCell<BTreeMap<Op, u64>> = const { RefCell::new(BTreeMap::new()) };
}

#[inline]
pub(crate) fn touch(op: Op) {
    COUNTS.with(|c| *c.borrow_mut().entry(op).or_insert(0) += 1);
}

pub fn reset() {
    COUNTS.with(|c| c.borrow_mut().clear());
}

/// Counts per operation name for the current thread, including zeros.
pub fn snapshot() -> BTreeMap<&'static str, u64> {
    COUNTS.with(|c| {
        let c = c.borrow();
        Op::ALL
            .iter()
            .map(|op| (op.name(), c.get(op).copied().unwrap_or(0)))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_reset_and_accumulate() {
        reset();
        touch(Op::Pair);
        touch(Op::Pair);
        let snap = snapshot();
        assert_eq!(snap["pair"], 2);
        assert_eq!(snap["project"], 0);
        assert_eq!(snap.len(), Op::ALL.len());
        reset();
        assert_eq!(snapshot()["pair"], 0);
    }
}
