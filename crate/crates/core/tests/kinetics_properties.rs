use proptest::prelude::*;
use pumpsim_core::atomic::{dark_state_index, Sublevel, NUM_STATES};
use pumpsim_core::constants::AtomConstants;
use pumpsim_core::kinetics::{
    integrate_rk4, uniform_f4, BeamSpec, PumpingSetup, RateMatrix, Transition,
};

fn transitions() -> impl Strategy<Value = Transition> {
    prop::sample::select(Transition::all().collect::<Vec<_>>())
}

fn beam() -> impl Strategy<Value = BeamSpec> {
    (transitions(), 0.001..2.0f64, -3.0..3.0f64, 0.0..0.3f64)
        .prop_map(|(t, i, d, a)| BeamSpec::new(t, i, d, a).unwrap())
}

fn population() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, NUM_STATES).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn population_is_conserved_and_nonnegative(
        beams in prop::collection::vec(beam(), 1..4),
        n0 in population(),
        t_us in 0.1..50.0f64,
    ) {
        let c = AtomConstants::cesium_d2();
        let r = RateMatrix::assemble(&beams, &c).unwrap();
        let traj = integrate_rk4(&r, &n0, 0.01 / c.gamma(), t_us * 1e-6, 500).unwrap();
        for p in &traj.populations {
            let total: f64 = p.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-9, "total {}", total);
            prop_assert!(p.iter().all(|&x| x >= -1e-12));
        }
        let photons = &traj.scattered_photons;
        prop_assert!(photons.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn generator_columns_sum_to_zero(beams in prop::collection::vec(beam(), 0..4)) {
        let r = RateMatrix::assemble(&beams, &AtomConstants::cesium_d2()).unwrap();
        let scale = r.max_abs().max(1.0);
        for s in r.column_sums() {
            prop_assert!(s.abs() <= 1e-12 * scale);
        }
    }
}

#[test]
fn dark_state_is_fixed_point_of_pruned_pi_pumping() {
    let setup = PumpingSetup::polarizer_with_repumper(-0.5, 0.0)
        .unwrap()
        .pruned(Some(1e-3));
    let r = setup.rate_matrix().unwrap();
    let mut dark = vec![0.0; NUM_STATES];
    dark[dark_state_index()] = 1.0;
    let flow = r.stimulated_generator() * nalgebra::DVector::from_vec(dark.clone());
    assert_eq!(flow.norm(), 0.0);
    let traj = setup.run(&dark, 2e-3, 1e-3).unwrap();
    let last = traj.last().unwrap();
    assert!((last[dark_state_index()] - 1.0).abs() < 1e-12);
}

#[test]
fn pi_pumping_preserves_reflection_symmetry() {
    let setup = PumpingSetup::polarizer_with_repumper(-0.5, 0.0).unwrap();
    let traj = setup.run(&uniform_f4(), 3e-3, 1e-4).unwrap();
    for p in &traj.populations {
        for s in pumpsim_core::atomic::enumerate_states() {
            let mirror = Sublevel { m: -s.m, ..*s };
            let (a, b) = (p[s.index().unwrap()], p[mirror.index().unwrap()]);
            assert!((a - b).abs() < 1e-9, "{s}: {a} vs {b}");
        }
    }
}

#[test]
fn step_halving_shows_fourth_order() {
    let c = AtomConstants::cesium_d2();
    let beams = vec![
        BeamSpec::new(Transition::new(4, 4).unwrap(), 5.0, -0.5, 0.05).unwrap(),
        BeamSpec::new(Transition::new(3, 4).unwrap(), 5.0, 0.0, 0.05).unwrap(),
    ];
    let r = RateMatrix::assemble(&beams, &c).unwrap();
    let t_end = 9.6 / c.gamma();
    let final_state = |gdt: f64| {
        let traj = integrate_rk4(&r, &uniform_f4(), gdt / c.gamma(), t_end, u64::MAX).unwrap();
        traj.last().unwrap().to_vec()
    };
    let runs: Vec<Vec<f64>> = [0.06, 0.03, 0.015, 0.0075]
        .iter()
        .map(|&g| final_state(g))
        .collect();
    let diff = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    let d: Vec<f64> = runs.windows(2).map(|w| diff(&w[0], &w[1])).collect();
    // Least-squares slope of log2 d against −log2 dt.
    let xs = [0.0, 1.0, 2.0];
    let ys: Vec<f64> = d.iter().map(|v| v.log2()).collect();
    let (mx, my) = (1.0, ys.iter().sum::<f64>() / 3.0);
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
    assert!(-slope >= 3.5, "order {} from {d:?}", -slope);
}

#[test]
fn steady_state_fraction_nonincreasing_in_alpha() {
    let mut last = f64::INFINITY;
    for alpha in [0.0, 0.005, 0.013, 0.05, 0.1] {
        let setup = PumpingSetup::polarizer_with_repumper(-0.5, alpha).unwrap();
        let traj = setup.sample_at(&uniform_f4(), &[20e-3]).unwrap();
        let f = traj.m0_fraction()[0];
        assert!(f <= last + 1e-12, "alpha {alpha}: {f} > {last}");
        last = f;
    }
}

#[test]
fn reduced_equation_set_size() {
    let full = PumpingSetup::polarizer_with_repumper(-0.5, 0.013).unwrap();
    assert_eq!(full.rate_matrix().unwrap().active_count(), 43);
    let pruned = full.pruned(Some(1e-3)).rate_matrix().unwrap();
    assert_eq!(pruned.active_count(), 25);
}
