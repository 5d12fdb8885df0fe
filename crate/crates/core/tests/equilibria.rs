use ecotone::dynamics::{step, StepperConfig};
use ecotone::equilibria::*;
use ecotone::model::{AssumptionConstants, Grid, NonlinearitySpec, Polynomial, SystemParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bistable(alpha: f64, n: usize) -> SystemParams<f64> {
    SystemParams::new(alpha, NonlinearitySpec::bistable_cubic(), Grid::interval(1.0, n).unwrap()).unwrap()
}

fn monotone(alpha: f64, n: usize) -> SystemParams<f64> {
    SystemParams::new(alpha, NonlinearitySpec::monotone_cubic(), Grid::interval(1.0, n).unwrap()).unwrap()
}

fn bistable_roots() -> OdeRootSet<f64> {
    OdeRootSet::of_spec(&NonlinearitySpec::bistable_cubic(), (-2.0, 2.0), 400).unwrap()
}

fn split(p: &SystemParams<f64>) -> Partition {
    Partition::from_fn(&p.grid, 3, |x| if x[0] < 0.5 { 0 } else { 2 }).unwrap()
}

fn fixed_point_defect(eq: &EquilibriumSolution<f64>, p: &SystemParams<f64>) -> f64 {
    let s0 = eq.to_state();
    let s1 = step(&s0, p, &StepperConfig::new(1e-3)).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..s0.v.len() {
        worst = worst.max((s1.v[k] - s0.v[k]).abs()).max(s1.vt[k].abs()).max((s1.w[k] - s0.w[k]).abs());
    }
    worst
}

#[test]
fn monotone_equilibrium_is_zero() {
    let p = monotone(0.5, 129);
    let eq = solve_monotone_equilibrium(&p, &[0.3; 129], &EquilibriumOptions::default()).unwrap();
    assert!(eq.w0.iter().chain(&eq.v0).all(|x| x.abs() < 1e-12));
    assert!(eq.residual <= 1e-10);
    // Spectrum 1 − 0.5/(1 + λ_k): the constant mode gives exactly 0.5.
    assert!((eq.margin.unwrap() - 0.5).abs() < 1e-9);
    assert!(fixed_point_defect(&eq, &p) <= 1e-9);
}

#[test]
fn monotone_decoupled() {
    let p = monotone(0.0, 65);
    let eq = solve_monotone_equilibrium(&p, &[1.0; 65], &EquilibriumOptions::default()).unwrap();
    assert!(eq.w0.iter().all(|x| x.abs() < 1e-12));
}

#[test]
fn monotone_with_offset_source() {
    // f(v) = v + v³ − 1 has a non-trivial equilibrium.
    let mut spec = NonlinearitySpec::<f64>::polynomial(
        "shifted monotone",
        Polynomial::new(vec![-1.0, 1.0, 0.0, 1.0]),
        Polynomial::constant(1.0),
        AssumptionConstants { damping_floor: 1.0, slope_floor: 0.0, growth_coefficient: 0.5, growth_excess: 2.0, dissipation_offset: 2.0 },
    );
    spec.label = "shifted".into();
    let p = SystemParams::new(0.5, spec, Grid::rectangle([1.0, 1.0], [17, 17]).unwrap()).unwrap();
    let eq = solve_monotone_equilibrium(&p, &vec![0.0; 289], &EquilibriumOptions::default()).unwrap();
    assert!(eq.residual <= 1e-10, "{}", eq.residual);
    assert!(equilibrium_residual(&eq.v0, &p).unwrap() <= 1e-10);
    assert!(fixed_point_defect(&eq, &p) <= 1e-9);
    let inv = MonotoneInverse::with_default_range(&p.nonlinearity).unwrap();
    let a = hyperbolicity_margin(&eq, &p).unwrap().sigma_min;
    let b = hyperbolicity_margin_monotone(&eq, &p, &inv).unwrap().sigma_min;
    assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
}

#[test]
fn monotone_refuses_bistable() {
    let p = bistable(0.1, 33);
    assert!(matches!(
        solve_monotone_equilibrium(&p, &[0.0; 33], &EquilibriumOptions::default()),
        Err(ecotone::Error::Domain(_))
    ));
}

#[test]
fn residual_of_profiles() {
    let p = bistable(0.01, 101);
    let prof = split(&p).profile(&bistable_roots());
    let r = equilibrium_residual(&prof, &p).unwrap();
    assert!(r <= 0.01 * 1.0 + 1e-15);
    let r1 = equilibrium_residual(&[1.0; 101], &bistable(0.2, 101)).unwrap();
    assert!((r1 - 0.2).abs() < 1e-13);
}

#[test]
fn trivial_partition() {
    let p = bistable(0.01, 101);
    let part = Partition::new(vec![2; 101], 3).unwrap();
    let eq = partition_equilibrium(&part, &bistable_roots(), &p, &EquilibriumOptions::default()).unwrap();
    let c = 1.01f64.sqrt();
    assert!(eq.v0.iter().all(|v| (v - c).abs() < 1e-12));
    assert!((eq.correction_norm.unwrap() - (c - 1.0)).abs() < 1e-12);
}

#[test]
fn two_part_split() {
    let p = bistable(0.01, 201);
    let eq = partition_equilibrium(&split(&p), &bistable_roots(), &p, &EquilibriumOptions::default()).unwrap();
    assert!(eq.residual <= 1e-10);
    let theta = eq.correction_norm.unwrap();
    assert!(theta > 0.0 && theta <= 2.0 * 0.01, "{theta}");
    assert!(eq.v0[99] < -0.9 && eq.v0[100] > 0.9);
    assert!(fixed_point_defect(&eq, &p) <= 1e-9);
    assert!(eq.is_hyperbolic(1e-6));
}

#[test]
fn decoupled_partition_is_exact() {
    let p = bistable(0.0, 51);
    let eq = partition_equilibrium(&split(&p), &bistable_roots(), &p, &EquilibriumOptions::default()).unwrap();
    assert_eq!(eq.correction_norm, Some(0.0));
}

#[test]
fn partition_preconditions() {
    let roots = bistable_roots();
    let p = bistable(0.2, 51);
    assert!(matches!(
        partition_equilibrium(&split(&p), &roots, &p, &EquilibriumOptions::default()),
        Err(ecotone::Error::Domain(_))
    ));
    let flat = OdeRootSet::of_spec(
        &NonlinearitySpec::polynomial(
            "square",
            Polynomial::new(vec![0.0, 0.0, 1.0]),
            Polynomial::constant(1.0),
            AssumptionConstants { damping_floor: 1.0, slope_floor: 0.0, growth_coefficient: 0.0, growth_excess: 0.0, dissipation_offset: 0.0 },
        ),
        (-1.0, 1.0),
        100,
    )
    .unwrap();
    let q = bistable(0.01, 51);
    let part = Partition::new(vec![0; 51], 1).unwrap();
    assert!(matches!(partition_equilibrium(&part, &flat, &q, &EquilibriumOptions::default()), Err(ecotone::Error::Domain(_))));
}

#[test]
fn newton_neighbourhood_uniqueness() {
    let p = bistable(0.01, 201);
    let roots = bistable_roots();
    let part = split(&p);
    let opts = EquilibriumOptions::default();
    let a = partition_equilibrium(&part, &roots, &p, &opts).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let start: Vec<f64> = part.profile(&roots).iter().map(|v| v + rng.gen_range(-0.01..0.01)).collect();
    let b = partition_equilibrium_from(&part, &roots, &p, &opts, &start).unwrap();
    let d = a.v0.iter().zip(&b.v0).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    assert!(d <= 1e-9, "{d}");
}

#[test]
fn correction_scales_linearly_in_alpha() {
    let roots = bistable_roots();
    let ratios: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
        .iter()
        .map(|&a| {
            let p = bistable(a, 257);
            let eq = partition_equilibrium(&split(&p), &roots, &p, &EquilibriumOptions::default()).unwrap();
            eq.correction_norm.unwrap() / a
        })
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
    assert!(hi / lo <= 1.25, "{ratios:?}");
}

fn companion() -> (f64, f64) {
    // v̄ = √1.2 is a constant equilibrium at α = 0.2; ṽ is the other
    // increasing-branch preimage of f(v̄), a root of v² + v̄v + 0.2.
    let vbar = 1.2f64.sqrt();
    let vtilde = (-vbar - (vbar * vbar - 0.8).sqrt()) / 2.0;
    (vbar, vtilde)
}

#[test]
fn near_homogeneous_empty_set() {
    let (vbar, vtilde) = companion();
    let p = bistable(0.2, 101);
    let eq = near_homogeneous_equilibrium(vbar, vtilde, &[false; 101], &p, &EquilibriumOptions::default()).unwrap();
    assert!(eq.correction_norm.unwrap() < 1e-12);
    assert!(eq.v0.iter().all(|v| (v - vbar).abs() < 1e-12));
}

#[test]
fn near_homogeneous_single_cell_and_scaling() {
    let (vbar, vtilde) = companion();
    assert!(((vtilde.powi(3) - vtilde) - (vbar.powi(3) - vbar)).abs() < 1e-14);
    let run = |n: usize| {
        let p = bistable(0.2, n);
        let mut mask = vec![false; n];
        mask[(n - 1) / 2] = true;
        let measure = p.grid.masked_measure(&mask);
        let eq = near_homogeneous_equilibrium(vbar, vtilde, &mask, &p, &EquilibriumOptions::default()).unwrap();
        assert!(eq.residual <= 1e-10);
        assert!(fixed_point_defect(&eq, &p) <= 1e-9);
        (measure, eq.correction_norm.unwrap())
    };
    let (m1, c1) = run(101);
    let (m2, c2) = run(201);
    assert!((m1 - 0.01).abs() < 1e-14 && (m2 - 0.005).abs() < 1e-14);
    assert!(c1 <= m1.sqrt() && c1 > 0.0);
    // The square-root bound allows a factor 1/√2; the one-dimensional
    // Green's function is bounded, so the observed factor is close to 1/2.
    let ratio = c2 / c1;
    assert!(ratio <= 0.5f64.sqrt() + 0.02, "ratio {ratio}");
}

#[test]
fn near_homogeneous_preconditions() {
    let (vbar, vtilde) = companion();
    let p = bistable(0.2, 101);
    let mut big = vec![false; 101];
    big[..10].iter_mut().for_each(|m| *m = true);
    assert!(matches!(
        near_homogeneous_equilibrium(vbar, vtilde, &big, &p, &EquilibriumOptions::default()),
        Err(ecotone::Error::Domain(_))
    ));
    assert!(near_homogeneous_equilibrium(1.0, -1.0, &[false; 101], &p, &EquilibriumOptions::default()).is_err());

    // f(v) = v³ + v/2 with α = 1/2: the constant mode of the linearization at 0 is singular.
    let spec = NonlinearitySpec::polynomial(
        "degenerate",
        Polynomial::new(vec![0.0, 0.5, 0.0, 1.0]),
        Polynomial::constant(1.0),
        AssumptionConstants { damping_floor: 1.0, slope_floor: 0.0, growth_coefficient: 0.5, growth_excess: 2.0, dissipation_offset: 0.0 },
    );
    let q = SystemParams::new(0.5, spec, Grid::interval(1.0, 101).unwrap()).unwrap();
    let mut one = vec![false; 101];
    one[50] = true;
    assert!(matches!(
        near_homogeneous_equilibrium(0.0, 0.0, &one, &q, &EquilibriumOptions::default()),
        Err(ecotone::Error::Domain(_))
    ));
}

#[test]
fn margin_examples() {
    let p = monotone(0.5, 101);
    let h = margin_at(&[0.0; 101], &p).unwrap();
    assert!(h.sigma_min >= 0.5 - 1e-10);
    let q = bistable(0.0, 101);
    let h = margin_at(&[1.0; 101], &q).unwrap();
    assert!((h.sigma_min - 2.0).abs() < 1e-12);
    let h = margin_at(&[0.0; 101], &q).unwrap();
    assert!((h.sigma_min - 1.0).abs() < 1e-12 && h.eigenvalue < 0.0);
    assert!(h.is_hyperbolic(1e-6));
}

#[test]
fn margin_matches_spectrum_2d() {
    // Constant mode: 1 − 0.5/1; the margin is that minimum.
    let p = SystemParams::<f64>::new(0.5, NonlinearitySpec::monotone_cubic(), Grid::rectangle([1.0, 2.0], [9, 13]).unwrap()).unwrap();
    let h = margin_at(&vec![0.0; 117], &p).unwrap();
    assert!((h.sigma_min - 0.5).abs() < 1e-9);
}
