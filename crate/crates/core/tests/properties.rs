use ecotone::diagnostics::{lip_seminorm, mollify, worst_lyapunov_growth};
use ecotone::dynamics::{simulate, step, Probes, StepperConfig};
use ecotone::equilibria::{partition_equilibrium, EquilibriumOptions, OdeRootSet, Partition};
use ecotone::experiments::{random_smooth_field, random_smooth_state};
use ecotone::model::{validate_assumptions, FieldState, Grid, NonlinearitySpec, SystemParams};
use ecotone::perturbation::{perturbation_report, ForcedOdeProblem};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn catalog(bistable: bool) -> NonlinearitySpec<f64> {
    if bistable {
        NonlinearitySpec::bistable_cubic()
    } else {
        NonlinearitySpec::monotone_cubic()
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn sup(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quadrature_exact_for_constants_and_linear(extent in 0.1f64..10.0, n in 3usize..300, a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let g = Grid::interval(extent, n).unwrap();
        let one = g.integrate(&vec![1.0; n]);
        prop_assert!((one - extent).abs() <= 1e-12 * extent);
        let lin = g.integrate(&g.sample(|x| a + b * x[0]));
        let exact = a * extent + 0.5 * b * extent * extent;
        prop_assert!((lin - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
    }

    #[test]
    fn quadrature_measure_2d(lx in 0.1f64..5.0, ly in 0.1f64..5.0, nx in 3usize..40, ny in 3usize..40) {
        let g = Grid::rectangle([lx, ly], [nx, ny]).unwrap();
        let one = g.integrate(&vec![1.0; nx * ny]);
        prop_assert!((one - lx * ly).abs() <= 1e-12 * lx * ly);
    }

    #[test]
    fn assumptions_pass_on_subintervals(r in 1.0f64..20.0, lo_frac in 0.0f64..0.9, width_frac in 0.05f64..1.0, bistable: bool) {
        let spec = catalog(bistable);
        let full = validate_assumptions(&spec, (-r, r), 1000).unwrap();
        prop_assume!(full.all_passed());
        let lo = -r + lo_frac * 2.0 * r;
        let hi = (lo + width_frac * 2.0 * r).min(r);
        prop_assume!(hi > lo);
        prop_assert!(validate_assumptions(&spec, (lo, hi), 1000).unwrap().all_passed());
    }

    #[test]
    fn seminorm_antimonotone_and_bounded(seed in 0u64..1000, n in 11usize..120, f1 in 1.0f64..5.0, f2 in 1.0f64..5.0) {
        let g = Grid::interval(1.0, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..n).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect();
        let dx = g.spacing()[0];
        let (h1, h2) = (dx * f1.min(f2), dx * f1.max(f2));
        let s1 = lip_seminorm(&v, &g, h1).unwrap();
        let s2 = lip_seminorm(&v, &g, h2).unwrap();
        prop_assert!(s1 >= s2);
        prop_assert!(s1 <= 2.0 * sup(&v) / h1 + 1e-12);
    }

    #[test]
    fn mollifier_within_covering_bound(seed in 0u64..1000, modes in 1usize..8, hcells in 2usize..20) {
        let g = Grid::interval(1.0, 201).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_smooth_field(&g, &mut rng, modes, 2.0);
        let h = hcells as f64 * g.spacing()[0];
        let r = sup(&v) + lip_seminorm(&v, &g, h).unwrap();
        let m = mollify(&v, &g, h).unwrap();
        prop_assert!(sup_diff(&m, &v) <= r * h);
    }

    #[test]
    fn heat_substep_contracts(seed in 0u64..1000, dt in 1e-3f64..0.5, alpha in 0.0f64..1.0, bistable: bool) {
        let g = Grid::interval(1.0, 41).unwrap();
        let p = SystemParams::new(alpha, catalog(bistable), g.clone()).unwrap();
        let s0 = random_smooth_state(&g, seed, 6, 2.0);
        let s1 = step(&s0, &p, &StepperConfig::new(dt)).unwrap();
        prop_assert!(sup(&s1.w) <= (sup(&s0.w) + dt * sup(&s1.v)) / (1.0 + dt) + 1e-13);
    }

    #[test]
    fn one_dimensional_runs_are_bit_identical(seed in 0u64..1000, bistable: bool) {
        let g = Grid::interval(1.0, 33).unwrap();
        let p = SystemParams::new(0.3, catalog(bistable), g.clone()).unwrap();
        let s0 = random_smooth_state(&g, seed, 4, 1.0);
        let cfg = StepperConfig::new(1e-2).with_stride(10);
        let a = simulate(&s0, &p, &cfg, 1.0, &Probes::default()).unwrap();
        let b = simulate(&s0, &p, &cfg, 1.0, &Probes::default()).unwrap();
        prop_assert_eq!(a.final_state, b.final_state);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn continuity_in_initial_data(seed in 0u64..1000, bistable: bool, alpha in 0.0f64..1.0) {
        let g = Grid::interval(1.0, 65).unwrap();
        let p = SystemParams::new(alpha, catalog(bistable), g.clone()).unwrap();
        let s0 = random_smooth_state(&g, seed, 4, 1.5);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut bump = |x: &[f64]| -> Vec<f64> { x.iter().map(|&a| a + rand::Rng::gen_range(&mut rng, -1e-6..1e-6)).collect() };
        let s1 = FieldState::new(0.0, bump(&s0.v), bump(&s0.vt), bump(&s0.w));
        let cfg = StepperConfig::new(1e-3).with_stride(1000);
        let a = simulate(&s0, &p, &cfg, 1.0, &Probes::default()).unwrap().final_state;
        let b = simulate(&s1, &p, &cfg, 1.0, &Probes::default()).unwrap().final_state;
        let gap = sup_diff(&a.v, &b.v).max(sup_diff(&a.vt, &b.vt)).max(sup_diff(&a.w, &b.w));
        prop_assert!(gap <= 1e-3, "gap {}", gap);
    }

    #[test]
    fn lyapunov_decreases_and_integrals_grow(seed in 0u64..1000, bistable: bool, alpha in 0.0f64..1.0) {
        let g = Grid::interval(1.0, 65).unwrap();
        let p = SystemParams::new(alpha, catalog(bistable), g.clone()).unwrap();
        let s0 = random_smooth_state(&g, seed, 4, 1.5);
        let rec = simulate(&s0, &p, &StepperConfig::new(1e-3), 2.0, &Probes::default()).unwrap();
        prop_assert!(worst_lyapunov_growth(&rec) <= 1e-2);
        for pair in rec.samples.windows(2) {
            prop_assert!(pair[1].diss_l2 >= pair[0].diss_l2);
            prop_assert!(pair[1].diss_l1 >= pair[0].diss_l1);
        }
    }

    #[test]
    fn partition_equilibria_are_scheme_fixed_points(alpha in 0.0f64..0.05, cut in 0.2f64..0.8) {
        let p = SystemParams::new(alpha, NonlinearitySpec::bistable_cubic(), Grid::interval(1.0, 81).unwrap()).unwrap();
        let roots = OdeRootSet::of_spec(&p.nonlinearity, (-2.0, 2.0), 400).unwrap();
        let part = Partition::from_fn(&p.grid, 3, |x| if x[0] < cut { 0 } else { 2 }).unwrap();
        let opts = EquilibriumOptions::default();
        let eq = partition_equilibrium(&part, &roots, &p, &opts).unwrap();
        let s0 = eq.to_state();
        let s1 = step(&s0, &p, &StepperConfig::new(1e-3)).unwrap();
        let defect = sup_diff(&s1.v, &s0.v).max(sup(&s1.vt)).max(sup_diff(&s1.w, &s0.w));
        prop_assert!(defect <= 10.0 * opts.residual_tolerance, "defect {}", defect);
    }

    #[test]
    fn segmentation_covers_horizon(amp in 0.0f64..0.1, start in -1.5f64..1.5, horizon in 10.0f64..60.0) {
        let p = ForcedOdeProblem::double_well(amp, 1.0, start, horizon);
        let r = perturbation_report(&p, 1e-2, 0.1).unwrap();
        prop_assert!(r.int_du >= 0.0 && r.int_dh >= 0.0);
        prop_assert!((r.segments[0].start - 0.0).abs() < 1e-12);
        prop_assert!((r.segments.last().unwrap().end - horizon).abs() < 1e-9);
        for pair in r.segments.windows(2) {
            prop_assert!(pair[0].end == pair[1].start && pair[0].start < pair[0].end);
        }
    }

    #[test]
    fn halving_forcing_halves_its_variation(amp in 0.001f64..0.2, omega in 0.1f64..3.0) {
        let p = ForcedOdeProblem::double_well(amp, omega, 0.5, 50.0);
        let full = perturbation_report(&p, 1e-2, 0.1).unwrap();
        let half = perturbation_report(&p.scaled_forcing(0.5), 1e-2, 0.1).unwrap();
        prop_assert!((half.int_dh - 0.5 * full.int_dh).abs() <= 1e-12 * full.int_dh);
    }
}
