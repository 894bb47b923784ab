//! Acceptance criteria A1–A14 at desk scale. Each test prints one line
//! `A<k> PASS|FAIL <rows>` and fails when any of its rows fails.

use std::time::Instant;

use memwalk_core::engine::SeedSpec;
use memwalk_core::stats::suites::{
    ballistic_run, critical_variance, diffusive_clt, eigen_check, erw_baseline, increment_identity_check,
    ode_basin_check, pathwise_checks, sampler_check, superdiffusive_exponents, urn_check, variance_constant_check,
    zero_set_check, Scale,
};
use memwalk_core::stats::{
    all_passed, BallisticTolerance, CltTolerance, Provenance, StatsError, SuperdiffusiveTolerance, Verdict,
    VerificationReport,
};
use memwalk_core::MemoryParam;

const MASTER_SEED: u64 = 20_240_917;

fn seed(label: u64) -> SeedSpec {
    SeedSpec::new(MASTER_SEED).derive(label)
}

fn mp(p: f64) -> MemoryParam {
    MemoryParam::new(p).unwrap()
}

fn verdict(id: &str, rows: Result<Vec<VerificationReport>, StatsError>) {
    let rows = rows.unwrap_or_else(|e| panic!("{id} ERROR {e}"));
    let ok = all_passed(&rows);
    let detail = rows
        .iter()
        .map(|r| match r.verdict {
            Verdict::Diagnostic => format!("{} = {:.6e} (diagnostic)", r.name, r.estimate),
            _ => format!("{} = {:.6e} vs {:.6e} ± {:.3e} {}", r.name, r.estimate, r.theory, r.tolerance, r.verdict.as_str()),
        })
        .collect::<Vec<_>>()
        .join("; ");
    println!("{id} {} {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{id} failed: {rows:#?}");
}

#[test]
fn a01_zero_set() {
    let start = Instant::now();
    let mut rows = zero_set_check(200);
    let elapsed = start.elapsed().as_secs_f64();
    if let Ok(r) = rows.as_mut() {
        r.push(VerificationReport::check("zeros.elapsed_s", 2.5, elapsed, f64::NAN, 2.5, Provenance::default()));
    }
    verdict("A1", rows);
}

#[test]
fn a02_eigen_structure() {
    verdict("A2", eigen_check(200, 50));
}

#[test]
fn a03_lyapunov_vs_quadrature() {
    verdict("A3", variance_constant_check(20));
}

#[test]
fn a04_increment_identities() {
    verdict("A4", increment_identity_check());
}

#[test]
fn a05_diffusive_clt_half() {
    let s = Scale::default();
    verdict("A5", diffusive_clt(mp(0.5), s.clt_n, s.clt_replicas, &seed(5), &CltTolerance::default()));
}

#[test]
fn a06_diffusive_clt_point_six() {
    let s = Scale::default();
    let rows = diffusive_clt(mp(0.6), s.clt_n, s.clt_replicas, &seed(6), &CltTolerance::default())
        .map(|rows| rows.into_iter().filter(|r| r.name == "clt.variance").collect());
    verdict("A6", rows);
}

#[test]
fn a07_superdiffusive_exponents() {
    let s = Scale::default();
    verdict(
        "A7",
        superdiffusive_exponents(
            mp(0.8),
            s.superdiffusive_exponents,
            s.superdiffusive_replicas,
            &seed(7),
            &SuperdiffusiveTolerance::default(),
        ),
    );
}

#[test]
fn a08_ballistic() {
    let s = Scale::default();
    verdict(
        "A8",
        ballistic_run(mp(0.95), s.ballistic_n, s.ballistic_replicas, &seed(8), &BallisticTolerance::default(), 0.05),
    );
}

#[test]
fn a09_critical_variance() {
    let s = Scale::default();
    verdict("A9", critical_variance(MemoryParam::p1(), s.critical_n, s.critical_replicas, &seed(9), 0.35));
}

#[test]
fn a10_quadratic_strong_law() {
    let s = Scale::default();
    verdict("A10", pathwise_checks(mp(0.5), s.qsl_n, s.qsl_replicas, &seed(10), 0.15));
}

#[test]
fn a11_sampler_equivalence() {
    let s = Scale::default();
    verdict("A11", sampler_check(s.sampler_pairs, s.sampler_draws, &seed(11)));
}

#[test]
fn a12_urn_embedding() {
    let s = Scale::default();
    verdict("A12", urn_check(&[0.5, 0.8, 0.95], s.urn_n, s.urn_replicas, &seed(12)));
}

#[test]
fn a13_ode_basins() {
    let s = Scale::default();
    let rows = [0.6, 0.95]
        .into_iter()
        .map(|p| {
            ode_basin_check(mp(p), s.ode_grid, s.ode_t, s.ode_dt).map(|rows| {
                rows.into_iter()
                    .map(|mut r| {
                        r.name = format!("p={p}.{}", r.name);
                        r
                    })
                    .collect::<Vec<_>>()
            })
        })
        .collect::<Result<Vec<_>, _>>()
        .map(|v| v.into_iter().flatten().collect());
    verdict("A13", rows);
}

#[test]
fn a14_classical_walk_baseline() {
    let s = Scale::default();
    verdict("A14", erw_baseline(mp(0.6), s.erw_max_exponent, s.erw_replicas, &seed(14), 1.0, 0.05));
}
