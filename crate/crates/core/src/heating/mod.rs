//! Recoil heating from the fluorescence cycles spent while pumping.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};
use rayon::prelude::*;

use crate::atomic::Sublevel;
use crate::error::{invalid, Result};
use crate::kinetics::{single_sublevel, uniform_f4, PumpingSetup};

/// Dark-state fraction at which cycles are counted.
pub const DEFAULT_CYCLE_THRESHOLD: f64 = 0.95;
pub const DEFAULT_CYCLE_T_END: f64 = 20e-3;
pub const DEFAULT_SAMPLES: usize = 100_000;
const CYCLE_SAMPLES: f64 = 20_000.0;

pub type Vec3 = [f64; 3];

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Beam axes of the heating calculation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoilGeometry {
    pub pb_axis: Vec3,
    pub detection_axis: Vec3,
    /// Absorption kicks take a random sign along `pb_axis`.
    pub backreflected: bool,
    /// Include the absorption kick at all.
    pub absorption: bool,
}

impl Default for RecoilGeometry {
    /// Raman axis along the bias field (x); polarizing beam orthogonal to it,
    /// at 45° to the horizontal.
    fn default() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            pb_axis: [0.0, s, s],
            detection_axis: [1.0, 0.0, 0.0],
            backreflected: true,
            absorption: true,
        }
    }
}

impl RecoilGeometry {
    pub fn new(pb_axis: Vec3, detection_axis: Vec3, backreflected: bool) -> Result<Self> {
        let g = Self {
            pb_axis,
            detection_axis,
            backreflected,
            absorption: true,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn emission_only(mut self) -> Self {
        self.absorption = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, axis) in [
            ("pb_axis", &self.pb_axis),
            ("detection_axis", &self.detection_axis),
        ] {
            if (norm(axis) - 1.0).abs() > 1e-12 {
                return Err(invalid(
                    name,
                    format!("must be a unit vector, |v| = {}", norm(axis)),
                ));
            }
        }
        Ok(())
    }
}

/// Photons scattered by one pumping run before the dark-state fraction first
/// reaches the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleRun {
    pub photons: f64,
    /// Crossing time, `None` when the threshold was not reached by t_end.
    pub time: Option<f64>,
}

impl CycleRun {
    pub fn reached(&self) -> bool {
        self.time.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleCounts {
    pub threshold: f64,
    /// Runs started in (g,4,m), m = −4..=4.
    pub per_sublevel: [CycleRun; 9],
    /// Run started with 1/9 in each F=4 sublevel.
    pub uniform: CycleRun,
}

impl CycleCounts {
    pub fn sublevel(&self, m: i32) -> Result<&CycleRun> {
        if !(-4..=4).contains(&m) {
            return Err(invalid("m", format!("must lie in -4..=4, got {m}")));
        }
        Ok(&self.per_sublevel[(m + 4) as usize])
    }

    /// Average of the per-sublevel counts.
    pub fn sublevel_mean(&self) -> f64 {
        self.per_sublevel.iter().map(|r| r.photons).sum::<f64>() / 9.0
    }

    pub fn all_reached(&self) -> bool {
        self.uniform.reached() && self.per_sublevel.iter().all(CycleRun::reached)
    }
}

fn cycle_run(setup: &PumpingSetup, n0: &[f64], threshold: f64, t_end: f64) -> Result<CycleRun> {
    let traj = setup.run(n0, t_end, t_end / CYCLE_SAMPLES)?;
    Ok(match traj.crossing(threshold) {
        Some((t, photons)) => CycleRun {
            photons,
            time: Some(t),
        },
        None => {
            log::warn!("dark fraction {threshold} not reached by {t_end} s");
            CycleRun {
                photons: *traj.scattered_photons.last().unwrap_or(&0.0),
                time: None,
            }
        }
    })
}

/// Expected fluorescence cycles to reach `threshold` dark-state fraction from
/// each F=4 sublevel and from the uniform mixture.
pub fn expected_cycles(setup: &PumpingSetup, threshold: f64, t_end: f64) -> Result<CycleCounts> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(invalid(
            "threshold",
            format!("must lie in (0, 1), got {threshold}"),
        ));
    }
    if !(t_end > 0.0) {
        return Err(invalid("t_end", format!("must be > 0, got {t_end}")));
    }
    let runs: Vec<CycleRun> = (-4..=4)
        .into_par_iter()
        .map(|m| {
            cycle_run(
                setup,
                &single_sublevel(Sublevel::ground(4, m))?,
                threshold,
                t_end,
            )
        })
        .collect::<Result<_>>()?;
    Ok(CycleCounts {
        threshold,
        per_sublevel: runs.try_into().expect("nine sublevels"),
        uniform: cycle_run(setup, &uniform_f4(), threshold, t_end)?,
    })
}

/// Monte Carlo recoil walk.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatingResult {
    pub mean_cycles: f64,
    /// rms of the accumulated velocity along the detection axis (v_r).
    pub delta_vrms_axis: f64,
    /// Standard error of `delta_vrms_axis`.
    pub standard_error: f64,
    pub samples: usize,
    pub seed: u64,
    /// Final velocity of each trajectory (v_r).
    pub velocities: Vec<Vec3>,
}

impl HeatingResult {
    /// rms projection on `axis`, with its standard error.
    pub fn rms_along(&self, axis: &Vec3) -> (f64, f64) {
        rms_with_error(self.velocities.iter().map(|v| dot(v, axis)))
    }

    pub fn projections(&self, axis: &Vec3) -> Vec<f64> {
        self.velocities.iter().map(|v| dot(v, axis)).collect()
    }
}

/// rms of the values and its delta-method standard error.
fn rms_with_error(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut n, mut s2, mut s4) = (0.0, 0.0, 0.0);
    for v in values {
        let q = v * v;
        n += 1.0;
        s2 += q;
        s4 += q * q;
    }
    if n == 0.0 {
        return (0.0, 0.0);
    }
    let ms = s2 / n;
    let rms = ms.sqrt();
    if rms == 0.0 {
        return (0.0, 0.0);
    }
    let var_q = (s4 / n - ms * ms).max(0.0) * n / (n - 1.0).max(1.0);
    (rms, (var_q / n).sqrt() / (2.0 * rms))
}

fn trajectory_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn walk(cycles: u64, geometry: &RecoilGeometry, rng: &mut ChaCha8Rng) -> Vec3 {
    let mut v = [0.0; 3];
    for _ in 0..cycles {
        if geometry.absorption {
            let sign = if geometry.backreflected && rng.random::<bool>() {
                -1.0
            } else {
                1.0
            };
            for (vi, a) in v.iter_mut().zip(&geometry.pb_axis) {
                *vi += sign * a;
            }
        }
        let e: [f64; 3] = UnitSphere.sample(rng);
        for (vi, ei) in v.iter_mut().zip(&e) {
            *vi += ei;
        }
    }
    v
}

fn run_walks<F>(
    geometry: &RecoilGeometry,
    samples: usize,
    seed: u64,
    cycles_for: F,
) -> Result<HeatingResult>
where
    F: Fn(&mut ChaCha8Rng) -> u64 + Sync,
{
    if samples == 0 {
        return Err(invalid("samples", "must be >= 1"));
    }
    geometry.validate()?;
    let runs: Vec<(u64, Vec3)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(seed, i);
            let n = cycles_for(&mut rng);
            (n, walk(n, geometry, &mut rng))
        })
        .collect();
    let mean_cycles = runs.iter().map(|r| r.0 as f64).sum::<f64>() / samples as f64;
    let velocities: Vec<Vec3> = runs.into_iter().map(|r| r.1).collect();
    let (delta_vrms_axis, standard_error) =
        rms_with_error(velocities.iter().map(|v| dot(v, &geometry.detection_axis)));
    Ok(HeatingResult {
        mean_cycles,
        delta_vrms_axis,
        standard_error,
        samples,
        seed,
        velocities,
    })
}

/// Every trajectory scatters exactly `cycles` photons.
pub fn recoil_walk(
    cycles: u64,
    geometry: &RecoilGeometry,
    samples: usize,
    seed: u64,
) -> Result<HeatingResult> {
    run_walks(geometry, samples, seed, |_| cycles)
}

/// Integer count with expectation `x`.
fn stochastic_round(x: f64, rng: &mut ChaCha8Rng) -> u64 {
    let floor = x.floor();
    floor as u64 + u64::from(rng.random::<f64>() < x - floor)
}

/// Each trajectory starts in a uniformly drawn F=4 sublevel and scatters that
/// sublevel's expected cycle count, stochastically rounded.
pub fn recoil_walk_from_counts(
    counts: &CycleCounts,
    geometry: &RecoilGeometry,
    samples: usize,
    seed: u64,
) -> Result<HeatingResult> {
    let expected: Vec<f64> = counts.per_sublevel.iter().map(|r| r.photons).collect();
    run_walks(geometry, samples, seed, |rng| {
        let m = rng.random_range(0..expected.len());
        stochastic_round(expected[m], rng)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatingOptions {
    pub threshold: f64,
    pub t_end: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for HeatingOptions {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_CYCLE_THRESHOLD,
            t_end: DEFAULT_CYCLE_T_END,
            samples: DEFAULT_SAMPLES,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatingSummary {
    pub initial_vrms: f64,
    pub cycles: CycleCounts,
    pub walk: HeatingResult,
    pub delta_vrms: f64,
    /// √(initial² + delta²).
    pub final_vrms_quadrature: f64,
    /// initial + delta.
    pub final_vrms_additive: f64,
}

pub fn heating_summary(
    initial_vrms: f64,
    setup: &PumpingSetup,
    geometry: &RecoilGeometry,
    options: &HeatingOptions,
) -> Result<HeatingSummary> {
    if !(initial_vrms >= 0.0) {
        return Err(invalid(
            "initial_vrms",
            format!("must be >= 0, got {initial_vrms}"),
        ));
    }
    let cycles = expected_cycles(setup, options.threshold, options.t_end)?;
    let walk = recoil_walk_from_counts(&cycles, geometry, options.samples, options.seed)?;
    let delta = walk.delta_vrms_axis;
    Ok(HeatingSummary {
        initial_vrms,
        final_vrms_quadrature: initial_vrms.hypot(delta),
        final_vrms_additive: initial_vrms + delta,
        delta_vrms: delta,
        cycles,
        walk,
    })
}

/// Histogram of `values` with `bins` equal bins spanning ±`half_range`,
/// as (bin centre, count).
pub fn histogram(values: &[f64], bins: usize, half_range: f64) -> Vec<(f64, usize)> {
    if bins == 0 || !(half_range > 0.0) {
        return Vec::new();
    }
    let width = 2.0 * half_range / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let k = ((v + half_range) / width).floor();
        if k >= 0.0 && (k as usize) < bins {
            counts[k as usize] += 1;
        }
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (-half_range + (i as f64 + 0.5) * width, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_geometry_is_orthogonal_unit() {
        let g = RecoilGeometry::default();
        g.validate().unwrap();
        assert_eq!(dot(&g.pb_axis, &g.detection_axis), 0.0);
        assert!(RecoilGeometry::new([1.0, 1.0, 0.0], [1.0, 0.0, 0.0], true).is_err());
    }

    #[test]
    fn zero_cycles_no_heating() {
        let r = recoil_walk(0, &RecoilGeometry::default(), 100, 1).unwrap();
        assert_eq!(r.delta_vrms_axis, 0.0);
        assert_eq!(r.mean_cycles, 0.0);
        assert!(recoil_walk(3, &RecoilGeometry::default(), 0, 1).is_err());
    }

    #[test]
    fn emission_only_matches_closed_form() {
        let g = RecoilGeometry::default().emission_only();
        let r = recoil_walk(12, &g, 100_000, 7).unwrap();
        let expected = (12.0_f64 / 3.0).sqrt();
        assert!((r.delta_vrms_axis - expected).abs() / expected < 0.02);
        assert!(r.standard_error / r.delta_vrms_axis < 0.01);
    }

    #[test]
    fn orthogonal_backreflected_absorption_is_invisible() {
        let r = recoil_walk(12, &RecoilGeometry::default(), 100_000, 8).unwrap();
        let expected = 2.0;
        assert!((r.delta_vrms_axis - expected).abs() / expected < 0.02);
        // Along the beam itself absorption adds N in quadrature.
        let (along_pb, _) = r.rms_along(&RecoilGeometry::default().pb_axis);
        assert!((along_pb - 4.0).abs() / 4.0 < 0.02, "{along_pb}");
    }

    #[test]
    fn seed_determinism() {
        let g = RecoilGeometry::default();
        let a = recoil_walk(5, &g, 1000, 42).unwrap();
        let b = recoil_walk(5, &g, 1000, 42).unwrap();
        let c = recoil_walk(5, &g, 1000, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.delta_vrms_axis, c.delta_vrms_axis);
    }

    #[test]
    fn stochastic_rounding_keeps_mean() {
        let mut rng = trajectory_rng(1, 0);
        let n = 200_000;
        let total: u64 = (0..n).map(|_| stochastic_round(2.3, &mut rng)).sum();
        assert!((total as f64 / n as f64 - 2.3).abs() < 0.005);
        assert_eq!(stochastic_round(4.0, &mut rng), 4);
    }

    #[test]
    fn rms_error_of_constant() {
        let (r, e) = rms_with_error([2.0, -2.0, 2.0].into_iter());
        assert!((r - 2.0).abs() < 1e-15);
        assert_eq!(e, 0.0);
    }

    #[test]
    fn histogram_bins() {
        let h = histogram(&[-0.9, -0.1, 0.1, 0.2, 5.0], 2, 1.0);
        assert_eq!(h, vec![(-0.5, 2), (0.5, 2)]);
        assert!(histogram(&[1.0], 0, 1.0).is_empty());
    }

    #[test]
    fn cycle_counts_order_and_dark_start() {
        let setup = PumpingSetup::polarizer_with_repumper(-0.5, 0.0)
            .unwrap()
            .pruned(Some(1e-3));
        let c = expected_cycles(&setup, 0.95, 20e-3).unwrap();
        assert!(c.all_reached());
        assert_eq!(c.sublevel(0).unwrap().photons, 0.0);
        assert!(c.sublevel(4).unwrap().photons > c.sublevel(1).unwrap().photons);
        assert!(c.sublevel(-4).unwrap().photons > c.sublevel(-1).unwrap().photons);
        assert!(c.sublevel(5).is_err());
        assert!(expected_cycles(&setup, 1.0, 1e-3).is_err());
    }

    #[test]
    fn unreached_threshold_reports_photons_at_end() {
        let setup = PumpingSetup::polarizer_with_repumper(-0.5, 0.1).unwrap();
        let c = expected_cycles(&setup, 0.95, 1e-3).unwrap();
        assert!(!c.uniform.reached());
        assert!(c.uniform.photons > 0.0);
    }
}
