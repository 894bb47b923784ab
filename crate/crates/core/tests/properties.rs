//! Cross-module invariants over parameter grids.

use memwalk_core::engine::{
    ensemble_positions, geometric_checkpoints, simulate, Observer, SeedSpec, TwoChannel, Urn,
};
use memwalk_core::stats::suites::{midpoint_grid, run_suite, Scale, Suite};
use memwalk_core::stats::{ode_integrate, ode_start_grid, BranchAssignment};
use memwalk_core::theory::{drift, exponent_y, fixed_points, gamma_p, p3, speed_c, P1, P2};
use memwalk_core::{Branch, MemoryParam, SimplexPoint};

fn mp(p: f64) -> MemoryParam {
    MemoryParam::new(p).unwrap()
}

#[test]
fn no_zeros_besides_the_returned_ones() {
    for p in midpoint_grid(0.0, 1.0, 200) {
        let p = mp(p);
        let zeros = fixed_points(p).unwrap().locations();
        for z in &zeros {
            assert!(drift(p, z).iter().all(|h| h.abs() < 1e-12));
        }
        for i in 0..=50 {
            for j in 0..=(50 - i) {
                let x = SimplexPoint::new(i as f64 / 50.0, j as f64 / 50.0).unwrap();
                if zeros.iter().any(|z| z.distance(&x) < 1e-6) {
                    continue;
                }
                let h = drift(p, &x);
                assert!(h[0] != 0.0 || h[1] != 0.0, "p={p}: unexpected zero at {x:?}");
            }
        }
    }
}

#[test]
fn y_limits_at_the_thresholds() {
    let y = |p: f64| exponent_y(mp(p)).unwrap();
    assert!((y(P1 + 1e-4) - 0.5).abs() < 1e-3);
    assert!((y(p3() - 1e-4) - 0.5).abs() < 1e-3);
    assert!(y(P2 - 1e-4) < 1e-3 && y(P2 + 1e-4) < 1e-3);
}

#[test]
fn speed_is_small_just_above_seven_eighths() {
    assert!(speed_c(mp(P2 + 1e-4)).unwrap() < 0.05);
    let g = gamma_p(mp(0.93)).unwrap();
    assert!((g.x1 - g.x2 - speed_c(mp(0.93)).unwrap()).abs() < 1e-12);
}

#[test]
fn flow_stays_in_the_simplex() {
    for p in [0.1, 0.5, P1, 0.8, 0.9, p3(), 0.99] {
        for x0 in ode_start_grid(8) {
            ode_integrate(mp(p), x0, 60.0, 0.01, usize::MAX).unwrap();
        }
    }
}

#[derive(Default)]
struct UnitMoves {
    last: Option<(u64, i64)>,
}

impl Observer for UnitMoves {
    fn observe(&mut self, n: u64, s: i64) {
        if let Some((m, t)) = self.last {
            assert_eq!(n, m + 1);
            assert!((s - t).abs() <= 1);
        }
        self.last = Some((n, s));
    }
}

#[test]
fn unit_moves_and_growing_counts() {
    let seed = SeedSpec::new(4);
    for p in [0.3, 0.8, 0.97] {
        let cps = geometric_checkpoints(2, 4096);
        for r in 0..20 {
            let mut obs = UnitMoves::default();
            let t = simulate(&TwoChannel::new(mp(p)), 4096, &cps, &mut seed.replica_rng(r), &mut obs).unwrap();
            for w in t.points.windows(2) {
                assert!((0..3).all(|k| w[0].counts[k] <= w[1].counts[k]));
            }
            let mut obs = UnitMoves::default();
            simulate(&Urn { p: mp(p) }, 4096, &cps, &mut seed.replica_rng(r), &mut obs).unwrap();
        }
    }
}

#[test]
fn branch_assignment_is_a_function_of_the_final_sign() {
    let p = mp(0.93);
    let ens = ensemble_positions(&TwoChannel::new(p), 2000, &[2000], 300, &SeedSpec::new(8)).unwrap();
    let finals = ens.last_column();
    let a = BranchAssignment::from_final_positions(p, &finals).unwrap();
    let b = BranchAssignment::from_final_positions(p, &finals).unwrap();
    assert_eq!(a.branches, b.branches);
    assert_eq!(a.excluded, finals.iter().filter(|&&s| s == 0).count());
    for (s, br) in finals.iter().zip(&a.branches) {
        assert_eq!(*br, Branch::from_position(*s));
    }
}

#[test]
fn suites_are_deterministic() {
    let scale = Scale {
        clt_n: 500,
        clt_replicas: 200,
        qsl_n: 2_000,
        qsl_replicas: 10,
        ..Scale::default()
    };
    let a = run_suite(Suite::Diffusive, &scale, &SeedSpec::new(1)).unwrap();
    let b = run_suite(Suite::Diffusive, &scale, &SeedSpec::new(1)).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}
