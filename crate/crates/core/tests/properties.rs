mod common;

use common::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use weq_core::arrival::{mean_arrival_time, single_packet_arrival};
use weq_core::one_body::TwoBodySystem;
use weq_core::wavepacket::{normalization, overlap};
use weq_core::StatisticsKind::{BoseEinstein, FermiDirac, MaxwellBoltzmann};
use weq_core::{one_body, QuadraturePolicy, Scenario, TwoBodyConfig, NEUTRON_MASS};

fn config_strategy() -> impl Strategy<Value = TwoBodyConfig> {
    any::<u64>().prop_map(|seed| random_config(&mut StdRng::seed_from_u64(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn density_is_normalized(c in config_strategy()) {
        for f in [0.0, 1.0, 3.0] {
            let norm = density_integral(&c, f * c.time_scale());
            prop_assert!((norm - 1.0).abs() < 1e-8, "t = {f} t_s: {norm}");
        }
    }

    #[test]
    fn continuity_holds(c in config_strategy(), u in 0.1..3.0f64, s in -3.0..3.0f64) {
        let t = u * probe_time_scale(&c);
        let (lo, hi, _) = window(&c, t, 0.0);
        let reach = window(&c, t, 1.0).1 - hi;
        let z = 0.5 * (lo + hi) + s * (0.5 * (hi - lo) + reach);
        let (r, scale) = continuity_residual(&c, z, t);
        prop_assert!(r <= 1e-6 * scale, "{r} vs {scale}");
    }

    #[test]
    fn overlap_is_time_invariant(c in config_strategy()) {
        let exact = overlap(&c.packet_a, &c.packet_b, c.scenario);
        for f in [0.0, 1.0, 2.0] {
            let d = (grid_overlap(&c, f * c.time_scale()) - exact).norm();
            prop_assert!(d < 1e-6, "t = {f} t_s: {d}");
        }
    }

    #[test]
    fn exchange_symmetry(c in config_strategy(), u in 0.0..2.0f64, s in 0.0..1.0f64) {
        let t = u * c.time_scale();
        let (lo, hi, _) = window(&c, t, 3.0);
        let z = lo + s * (hi - lo);
        let (p, q) = (TwoBodySystem::new(c).unwrap(), TwoBodySystem::new(c.swapped()).unwrap());
        let (r1, r2) = (p.rho1(z, t).unwrap(), q.rho1(z, t).unwrap());
        let (j1, j2) = (p.j1(z, t).unwrap(), q.j1(z, t).unwrap());
        prop_assert!((r1 - r2).abs() <= 1e-13 * r1.abs());
        prop_assert!((j1 - j2).abs() <= 1e-13 * j1.abs());
    }

    #[test]
    fn gravity_leaves_overlap_and_spread_untouched(
        za in 8.5..14.0f64,
        g_lo in 0.5..2.0f64,
        g_hi in 50.0..200.0f64,
        u in 0.0..3.0f64,
    ) {
        let at = |g: f64| {
            let c = TwoBodyConfig::new(
                packet(za, 0.0),
                packet(8.0, 0.0),
                BoseEinstein,
                Scenario::FreeFall { g },
                NEUTRON_MASS,
            )
            .unwrap();
            let s = overlap(&c.packet_a, &c.packet_b, c.scenario);
            let mut bits = vec![s.re.to_bits(), s.im.to_bits()];
            for stats in [BoseEinstein, FermiDirac] {
                bits.push(normalization(&c.packet_a, &c.packet_b, stats, c.scenario).unwrap().to_bits());
                bits.push(one_body::position_spread(&c.with_statistics(stats), u * t_ref()).unwrap().to_bits());
            }
            bits
        };
        prop_assert_eq!(at(g_lo), at(g_hi));
    }

    #[test]
    fn distinguishable_limit(u in 0.0..2.0f64, s in 0.0..1.0f64, free in any::<bool>()) {
        let scenario = if free { Scenario::FreeEvolution } else { fall() };
        let mb = table_config(58.0, MaxwellBoltzmann, scenario);
        let t = u * t_ref();
        let (lo, hi, _) = window(&mb, t, 4.0);
        let z = lo + s * (hi - lo);
        let reference = TwoBodySystem::new(mb).unwrap();
        let peak = reference.rho1(window(&mb, t, 0.0).2[0], t).unwrap();
        for stats in [BoseEinstein, FermiDirac] {
            let q = TwoBodySystem::new(mb.with_statistics(stats)).unwrap();
            let dr = (q.rho1(z, t).unwrap() - reference.rho1(z, t).unwrap()).abs();
            let dj = (q.j1(z, t).unwrap() - reference.j1(z, t).unwrap()).abs();
            prop_assert!(dr <= 1e-8 * peak);
            prop_assert!(dj <= 1e-8 * peak * SIGMA0 / t_ref());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn mb_time_is_the_single_packet_average(za in 9.0..14.0f64, zb in 3.0..8.0f64) {
        let c = TwoBodyConfig::new(packet(za, 0.0), packet(zb, 0.0), MaxwellBoltzmann, fall(), NEUTRON_MASS)
            .unwrap();
        let policy = QuadraturePolicy::default();
        let a = single_packet_arrival(&c.packet_a, c.mass, c.scenario, 0.0, &policy).unwrap();
        let b = single_packet_arrival(&c.packet_b, c.mass, c.scenario, 0.0, &policy).unwrap();
        prop_assume!((a.norm_integral - b.norm_integral).abs() < 1e-6);
        let mb = mean_arrival_time(&c, 0.0, &policy).unwrap();
        let avg = 0.5 * (a.mean_time + b.mean_time);
        prop_assert!((mb - avg).abs() < 1e-5 * t_ref(), "{}", (mb - avg) / t_ref());
    }

    #[test]
    fn mean_time_is_label_blind(za in 9.0..14.0f64, stats in 0..3usize, free in any::<bool>()) {
        let scenario = if free { Scenario::FreeEvolution } else { fall() };
        let c = table_config(za, weq_core::StatisticsKind::ALL[stats], scenario);
        let policy = QuadraturePolicy::default();
        let t1 = mean_arrival_time(&c, 0.0, &policy).unwrap();
        let t2 = mean_arrival_time(&c.swapped(), 0.0, &policy).unwrap();
        prop_assert!((t1 - t2).abs() < 1e-9 * t1);
    }
}
