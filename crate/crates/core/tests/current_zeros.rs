mod common;

use common::*;
use weq_core::arrival::arrival_distribution;
use weq_core::one_body::TwoBodySystem;
use weq_core::StatisticsKind::{BoseEinstein, FermiDirac, MaxwellBoltzmann};
use weq_core::{QuadraturePolicy, Scenario, StatisticsKind, TwoBodyConfig, NEUTRON_MASS};

fn dense_sign_changes(system: &TwoBodySystem, end: f64, n: usize) -> Vec<f64> {
    let h = end / n as f64;
    let mut out = Vec::new();
    let mut prev = system.j1(0.0, h).unwrap();
    for i in 2..=n {
        let t = i as f64 * h;
        let j = system.j1(0.0, t).unwrap();
        if j * prev < 0.0 {
            out.push(t - 0.5 * h);
        }
        if j != 0.0 {
            prev = j;
        }
    }
    out
}

fn reversing(stats: StatisticsKind, scenario: Scenario) -> TwoBodyConfig {
    // b starts below the detector moving up, a comes down onto it
    TwoBodyConfig::new(
        packet(10.0, -2.0),
        packet(-3.0, 3.0),
        stats,
        scenario,
        NEUTRON_MASS,
    )
    .unwrap()
}

#[test]
fn located_zeros_match_a_dense_scan() {
    for scenario in [fall(), Scenario::FreeEvolution] {
        for stats in [BoseEinstein, FermiDirac, MaxwellBoltzmann] {
            for (c, reverses) in [
                (table_config(10.0, stats, scenario), false),
                (reversing(stats, scenario), true),
            ] {
                check(&c, reverses);
            }
        }
    }
}

fn check(c: &TwoBodyConfig, reverses: bool) {
    let r = arrival_distribution(c, 0.0, &QuadraturePolicy::default()).unwrap();
    let n = 100_000;
    let scan = dense_sign_changes(&TwoBodySystem::new(*c).unwrap(), r.cutoff_time, n);
    assert_eq!(
        r.current_zeros.len(),
        scan.len(),
        "{c:?}: {:?} vs {scan:?}",
        r.current_zeros
    );
    assert_eq!(!scan.is_empty(), reverses, "{c:?}");
    let h = r.cutoff_time / n as f64;
    for (a, b) in r.current_zeros.iter().zip(&scan) {
        assert!((a - b).abs() <= h, "{a} vs {b}");
    }
}
