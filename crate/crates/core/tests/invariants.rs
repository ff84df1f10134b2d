use proptest::prelude::*;

use projcalc::coderivative::coderivative;
use projcalc::decomposition::Anchor;
use projcalc::harness::report::format_f64;
use projcalc::projections::{project, sample_member, variational_residual, ConvexSet, Mask};
use projcalc::smooth::frechet_apply;
use projcalc::{LpSpace, Primal};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn space_and_point() -> impl Strategy<Value = (LpSpace, Vec<f64>)> {
    (1usize..7, 1.2f64..8.0).prop_flat_map(|(n, p)| {
        (
            prop::collection::vec(0.25f64..4.0, n),
            prop::collection::vec(-5.0f64..5.0, n),
        )
            .prop_map(move |(w, x)| (LpSpace::with_weights(p, w).unwrap(), x))
    })
}

fn set_for(n: usize, kind: u8, r: f64, bits: u32) -> ConvexSet {
    let mut members: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
    members[0] = true;
    let mask = Mask::from_bools(members);
    match kind % 4 {
        0 => ConvexSet::ball(r).unwrap(),
        1 => ConvexSet::cylinder(r, mask).unwrap(),
        2 => ConvexSet::subspace(mask),
        _ => ConvexSet::PositiveCone,
    }
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn duality_map_is_inverted((space, x) in space_and_point()) {
        let x = space.primal(x).unwrap();
        let jx = space.duality_map(&x);
        let back = space.duality_map_inv(&jx);
        prop_assert!(close(back.coords(), x.coords(), 1e-10));
        let nx = space.norm(&x);
        prop_assert!((space.dual_norm(&jx) - nx).abs() <= 1e-12 * (1.0 + nx));
        prop_assert!((space.pair(&jx, &x).unwrap() - nx * nx).abs() <= 1e-11 * (1.0 + nx * nx));
    }

    #[test]
    fn projection_is_feasible_and_idempotent(
        (space, x) in space_and_point(),
        kind in 0u8..4,
        r in 0.1f64..3.0,
        bits in any::<u32>(),
    ) {
        let set = set_for(space.dim(), kind, r, bits);
        let x = space.primal(x).unwrap();
        let px = project(&space, &set, &x).unwrap();
        prop_assert!(set.contains(&space, &px, 1e-9));
        let ppx = project(&space, &set, &px).unwrap();
        prop_assert!(close(ppx.coords(), px.coords(), 1e-12));
    }

    #[test]
    fn projection_beats_feasible_samples(
        (space, x) in space_and_point(),
        kind in 0u8..4,
        r in 0.1f64..3.0,
        bits in any::<u32>(),
        seed in any::<u64>(),
    ) {
        let set = set_for(space.dim(), kind, r, bits);
        let x = space.primal(x).unwrap();
        let px = project(&space, &set, &x).unwrap();
        let d = space.norm(&(&x - &px));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zs: Vec<Primal> = (0..32).map(|_| sample_member(&space, &set, &mut rng)).collect();
        for z in &zs {
            prop_assert!(d <= space.norm(&(&x - z)) + 1e-10 * (1.0 + d));
        }
        let res = variational_residual(&space, &set, &x, &px, &zs).unwrap();
        let scale = d.powf(space.p() - 1.0) * zs.iter().map(|z| space.norm(&(&px - z))).fold(1.0, f64::max);
        prop_assert!(res >= -1e-9 * scale.max(1.0));
    }

    #[test]
    fn cone_projection_is_positive_part((space, x) in space_and_point()) {
        let f = space.primal(x).unwrap();
        let pf = project(&space, &ConvexSet::PositiveCone, &f).unwrap();
        prop_assert_eq!(&pf, &f.positive_part());
        let sum = &f.positive_part() + &f.negative_part();
        prop_assert_eq!(sum.coords(), f.coords());
        prop_assert!(f.negative_part().iter().all(|v| *v <= 0.0));
    }

    #[test]
    fn anchor_recomposes(
        (space, x) in space_and_point(),
        y in prop::collection::vec(-5.0f64..5.0, 6),
    ) {
        let xbar = space.primal(x).unwrap();
        prop_assume!(space.norm(&xbar) > 1e-3);
        let y = space.primal(y[..space.dim()].to_vec()).unwrap();
        let anchor = Anchor::new(&space, xbar.clone()).unwrap();
        let o = anchor.o_part(&y);
        let back = o.axpy(anchor.a_coef(&y), &xbar);
        prop_assert!(close(back.coords(), y.coords(), 1e-10));
        prop_assert!(anchor.in_o(&o, 1e-9));
        let ys = space.duality_map(&y);
        let os = anchor.o_star(&ys);
        prop_assert!(space.pair(&os, &xbar).unwrap().abs() <= 1e-9 * (1.0 + space.norm(&xbar) * space.dual_norm(&ys)));
    }

    #[test]
    fn ball_derivative_kills_radial_direction(
        (space, x) in space_and_point(),
        r in 0.1f64..2.0,
    ) {
        let x = space.primal(x).unwrap();
        let nx = space.norm(&x);
        prop_assume!(nx > r * 1.01);
        let ball = ConvexSet::ball(r).unwrap();
        let d = frechet_apply(&space, &ball, &x, &x).unwrap();
        prop_assert!(space.norm(&d) <= 1e-10 * nx);
    }

    #[test]
    fn interior_coderivative_is_identity(
        (space, x) in space_and_point(),
        ys in prop::collection::vec(-5.0f64..5.0, 6),
    ) {
        let x = space.primal(x).unwrap();
        let r = space.norm(&x) * 2.0 + 0.1;
        let ys = space.dual(ys[..space.dim()].to_vec()).unwrap();
        let res = coderivative(&space, &ConvexSet::ball(r).unwrap(), &x, &ys).unwrap();
        prop_assert_eq!(res.singleton(), Some(&ys));
    }

    #[test]
    fn report_floats_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let s = format_f64(v);
        prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
    }
}
