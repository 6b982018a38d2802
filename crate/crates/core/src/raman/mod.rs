//! Stimulated Raman spectra of the ground hyperfine transition.
//!
//! Copropagating beams are Doppler free and resolve the Zeeman lines, so the
//! spectrum reads sublevel populations. Counterpropagating beams add a Doppler
//! shift 2kv and map the velocity distribution onto the detuning axis.

mod gaussian_fit;
mod spectrum;

pub use gaussian_fit::{fit_gaussian, gaussian, GaussianFit};
pub use spectrum::{detuning_grid, Spectrum};

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::atomic::{raman_line_offset, Sublevel, ZeemanParams, NUM_STATES};
use crate::constants::{AtomConstants, BOLTZMANN};
use crate::error::{invalid, Result};

/// FWHM·τ of a square π pulse.
pub const PI_PULSE_FWHM_TAU: f64 = 0.799;

/// Standard-normal quadrature half-width, in σ.
const QUADRATURE_SIGMAS: f64 = 6.0;
const MIN_QUADRATURE_POINTS: usize = 201;
const MAX_QUADRATURE_POINTS: usize = 400_001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Copropagating,
    Counterpropagating,
}

impl std::str::FromStr for Geometry {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "copropagating" | "co" => Ok(Geometry::Copropagating),
            "counterpropagating" | "counter" => Ok(Geometry::Counterpropagating),
            other => Err(invalid("geometry", format!("unknown geometry `{other}`"))),
        }
    }
}

/// Square Raman pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanPulse {
    /// τ (s)
    pub duration_s: f64,
    /// Two-photon Rabi frequency Ω (rad/s).
    pub rabi_rad_s: f64,
    pub geometry: Geometry,
}

impl RamanPulse {
    pub fn new(duration_s: f64, rabi_rad_s: f64, geometry: Geometry) -> Result<Self> {
        if !(duration_s > 0.0) || !duration_s.is_finite() {
            return Err(invalid("tau_s", format!("must be > 0, got {duration_s}")));
        }
        if !(rabi_rad_s >= 0.0) || !rabi_rad_s.is_finite() {
            return Err(invalid(
                "rabi_rad_s",
                format!("must be >= 0, got {rabi_rad_s}"),
            ));
        }
        Ok(Self {
            duration_s,
            rabi_rad_s,
            geometry,
        })
    }

    /// Ωτ = π.
    pub fn pi_pulse(duration_s: f64, geometry: Geometry) -> Result<Self> {
        Self::new(duration_s, PI / duration_s, geometry)
    }

    /// Rough Fourier width of the line (Hz), used to size quadrature grids.
    fn fourier_width_hz(&self) -> f64 {
        let from_tau = PI_PULSE_FWHM_TAU / self.duration_s;
        let from_rabi = self.rabi_rad_s / (2.0 * PI);
        from_tau.max(from_rabi)
    }
}

/// Square-pulse two-level transfer probability at two-photon detuning
/// `delta_hz`: Ω²/(Ω²+δ²) sin²(√(Ω²+δ²) τ/2).
pub fn rabi_lineshape(delta_hz: f64, pulse: &RamanPulse) -> f64 {
    let omega2 = pulse.rabi_rad_s * pulse.rabi_rad_s;
    let d = 2.0 * PI * delta_hz;
    let gen2 = omega2 + d * d;
    if gen2 == 0.0 {
        return 0.0;
    }
    let s = (gen2.sqrt() * pulse.duration_s / 2.0).sin();
    omega2 / gen2 * s * s
}

/// Gaussian velocity distribution in units of the recoil velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityDistribution {
    pub sigma_vr: f64,
    pub mean_vr: f64,
}

impl VelocityDistribution {
    pub fn gaussian(sigma_vr: f64, mean_vr: f64) -> Result<Self> {
        if !(sigma_vr >= 0.0) || !sigma_vr.is_finite() {
            return Err(invalid("sigma_vr", format!("must be >= 0, got {sigma_vr}")));
        }
        Ok(Self { sigma_vr, mean_vr })
    }
}

/// Zeeman line positions, per-line coupling weights and field noise of the
/// σ⁺σ⁺ Raman ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct RamanLines {
    pub zeeman: ZeemanParams,
    /// Relative two-photon coupling of the lines m = −3..=3.
    pub coupling: [f64; 7],
    /// rms magnetic-field fluctuation (G); smears the m ≠ 0 lines.
    pub field_rms_gauss: f64,
}

impl RamanLines {
    pub fn new(zeeman: ZeemanParams) -> Self {
        Self {
            zeeman,
            coupling: [1.0; 7],
            field_rms_gauss: 0.0,
        }
    }

    pub fn with_field_noise(mut self, rms_gauss: f64) -> Self {
        self.field_rms_gauss = rms_gauss;
        self
    }

    /// (offset Hz, Gaussian σ Hz from field noise, weight) for each line.
    fn lines(&self, populations: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
        if populations.len() != NUM_STATES {
            return Err(invalid(
                "populations",
                format!("expected {NUM_STATES} values"),
            ));
        }
        if populations.iter().any(|p| !(*p >= 0.0)) {
            return Err(invalid("populations", "must be nonnegative"));
        }
        let per_gauss = self.zeeman.hz_per_m_per_gauss();
        (-3..=3)
            .map(|m| {
                let pop = populations[Sublevel::ground(4, m).index().unwrap()];
                let offset = raman_line_offset(m, &self.zeeman)?;
                let sigma = (m as f64 * per_gauss * self.field_rms_gauss).abs();
                Ok((offset, sigma, pop * self.coupling[(m + 3) as usize]))
            })
            .collect()
    }
}

/// Gaussian quadrature nodes and normalized weights over μ ± 6σ (composite
/// Simpson), resolving features of width `resolve`.
fn gaussian_nodes(mean: f64, sigma: f64, resolve: f64) -> Vec<(f64, f64)> {
    let span = 2.0 * QUADRATURE_SIGMAS * sigma;
    let wanted = (span / (resolve / 6.0)).ceil() as usize + 1;
    let mut n = wanted.clamp(MIN_QUADRATURE_POINTS, MAX_QUADRATURE_POINTS);
    if n.is_multiple_of(2) {
        n += 1;
    }
    let h = span / (n - 1) as f64;
    let mut nodes: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = mean - QUADRATURE_SIGMAS * sigma + i as f64 * h;
            let z = (x - mean) / sigma;
            let simpson = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            (x, simpson * (-0.5 * z * z).exp())
        })
        .collect();
    let total: f64 = nodes.iter().map(|n| n.1).sum();
    nodes.iter_mut().for_each(|n| n.1 /= total);
    nodes
}

/// One Rabi line centred at `center` and smeared by a Gaussian of `sigma` Hz.
fn smeared_line(
    delta: f64,
    center: f64,
    sigma: f64,
    nodes: Option<&[(f64, f64)]>,
    pulse: &RamanPulse,
) -> f64 {
    match nodes {
        Some(nodes) if sigma > 0.0 => nodes
            .iter()
            .map(|&(x, w)| w * rabi_lineshape(delta - center - x, pulse))
            .sum(),
        _ => rabi_lineshape(delta - center, pulse),
    }
}

/// Centre, smearing sigma, weight, quadrature nodes.
type PreparedLine = (f64, f64, f64, Option<Vec<(f64, f64)>>);

fn synthesize(lines: &[(f64, f64, f64)], pulse: &RamanPulse, grid: &[f64]) -> Result<Spectrum> {
    let resolve = pulse.fourier_width_hz();
    let prepared: Vec<PreparedLine> = lines
        .iter()
        .filter(|l| l.2 > 0.0)
        .map(|&(c, s, w)| (c, s, w, (s > 0.0).then(|| gaussian_nodes(0.0, s, resolve))))
        .collect();
    let signal: Vec<f64> = grid
        .par_iter()
        .map(|&d| {
            prepared
                .iter()
                .map(|(c, s, w, nodes)| w * smeared_line(d, *c, *s, nodes.as_deref(), pulse))
                .sum()
        })
        .collect();
    Spectrum::new(grid.to_vec(), signal)
}

/// Σ_m N(g,4,m) · P(δ − offset_m) over the seven σ⁺σ⁺ lines.
pub fn synth_copropagating(
    populations: &[f64],
    lines: &RamanLines,
    pulse: &RamanPulse,
    grid: &[f64],
) -> Result<Spectrum> {
    if pulse.geometry != Geometry::Copropagating {
        return Err(invalid(
            "geometry",
            "copropagating synthesis needs a copropagating pulse",
        ));
    }
    synthesize(&lines.lines(populations)?, pulse, grid)
}

/// Two-photon Doppler shift (Hz) of an atom moving at `v_vr` recoil
/// velocities along the Raman axis.
pub fn doppler_shift(v_vr: f64, geometry: Geometry, constants: &AtomConstants) -> f64 {
    match geometry {
        Geometry::Copropagating => 0.0,
        Geometry::Counterpropagating => v_vr * constants.doppler_hz_per_recoil(),
    }
}

/// Copropagating composite line convolved with the Doppler-mapped velocity
/// distribution.
pub fn synth_counterpropagating(
    populations: &[f64],
    lines: &RamanLines,
    velocities: &VelocityDistribution,
    pulse: &RamanPulse,
    grid: &[f64],
    constants: &AtomConstants,
) -> Result<Spectrum> {
    if pulse.geometry != Geometry::Counterpropagating {
        return Err(invalid(
            "geometry",
            "counterpropagating synthesis needs a counterpropagating pulse",
        ));
    }
    if !(velocities.sigma_vr >= 0.0) {
        return Err(invalid("sigma_vr", "must be >= 0"));
    }
    let shift = doppler_shift(velocities.mean_vr, pulse.geometry, constants);
    let doppler_sigma = doppler_shift(velocities.sigma_vr, pulse.geometry, constants);
    // Independent Gaussian smearings add in quadrature.
    let combined: Vec<(f64, f64, f64)> = lines
        .lines(populations)?
        .into_iter()
        .map(|(c, s, w)| (c + shift, s.hypot(doppler_sigma), w))
        .collect();
    synthesize(&combined, pulse, grid)
}

/// Velocity resolution corresponding to a counterpropagating line width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityResolution {
    pub recoil_units: f64,
    pub meters_per_second: f64,
}

pub fn velocity_resolution(fwhm_hz: f64, constants: &AtomConstants) -> Result<VelocityResolution> {
    if !(fwhm_hz > 0.0) {
        return Err(invalid("fwhm", format!("must be > 0, got {fwhm_hz}")));
    }
    let recoil_units = fwhm_hz / constants.doppler_hz_per_recoil();
    Ok(VelocityResolution {
        recoil_units,
        meters_per_second: recoil_units * constants.recoil_velocity(),
    })
}

/// T = M σ_v² / k_B for σ_v in recoil units.
pub fn temperature_from_sigma(sigma_vr: f64, constants: &AtomConstants) -> f64 {
    let v = sigma_vr * constants.recoil_velocity();
    constants.mass_kg * v * v / BOLTZMANN
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::uniform_f4;

    fn dark() -> Vec<f64> {
        crate::kinetics::single_sublevel(Sublevel::ground(4, 0)).unwrap()
    }

    /// Bisection on the analytic lineshape for the half-maximum point.
    fn half_width_oracle(pulse: &RamanPulse) -> f64 {
        let peak = rabi_lineshape(0.0, pulse);
        let (mut lo, mut hi) = (0.0, 0.6 / pulse.duration_s);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if rabi_lineshape(mid, pulse) > 0.5 * peak {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn pi_pulse_on_resonance_is_complete() {
        let p = RamanPulse::pi_pulse(7e-3, Geometry::Copropagating).unwrap();
        assert!((rabi_lineshape(0.0, &p) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lineshape_even_and_bounded() {
        let p = RamanPulse::new(3e-3, 1700.0, Geometry::Copropagating).unwrap();
        for i in 0..500 {
            let d = i as f64 * 3.7;
            let a = rabi_lineshape(d, &p);
            assert_eq!(a, rabi_lineshape(-d, &p));
            assert!((0.0..=1.0).contains(&a));
        }
    }

    #[test]
    fn pi_pulse_fourier_product() {
        for tau in [1e-3, 7e-3, 20e-3] {
            let p = RamanPulse::pi_pulse(tau, Geometry::Copropagating).unwrap();
            let fwhm = 2.0 * half_width_oracle(&p);
            assert!((fwhm * tau - 0.799).abs() < 0.005, "{}", fwhm * tau);
        }
    }

    #[test]
    fn polarized_population_gives_single_centred_line() {
        let p = RamanPulse::pi_pulse(7e-3, Geometry::Copropagating).unwrap();
        let lines = RamanLines::new(ZeemanParams::cesium(0.01));
        let grid = detuning_grid(20_000.0, 5.0).unwrap();
        let s = synth_copropagating(&dark(), &lines, &p, &grid).unwrap();
        let (imax, _) = s.peak().unwrap();
        assert_eq!(s.detunings[imax], 0.0);
        assert!((s.signal[imax] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn line_areas_follow_populations() {
        let p = RamanPulse::pi_pulse(7e-3, Geometry::Copropagating).unwrap();
        let lines = RamanLines::new(ZeemanParams::cesium(0.05));
        let mut pops = vec![0.0; NUM_STATES];
        pops[Sublevel::ground(4, 1).index().unwrap()] = 2.0 / 3.0;
        pops[Sublevel::ground(4, -2).index().unwrap()] = 1.0 / 3.0;
        let off1 = raman_line_offset(1, &lines.zeeman).unwrap();
        let off2 = raman_line_offset(-2, &lines.zeeman).unwrap();
        let area = |center: f64| {
            let grid: Vec<f64> = (-20_000..=20_000)
                .map(|i| center + i as f64 * 0.25)
                .collect();
            let s = synth_copropagating(&pops, &lines, &p, &grid).unwrap();
            s.area()
        };
        let ratio = area(off1) / area(off2);
        assert!((ratio - 2.0).abs() < 1e-3, "{ratio}");
    }

    #[test]
    fn zero_field_lines_collapse_to_single_fourier_line() {
        let p = RamanPulse::pi_pulse(7e-3, Geometry::Copropagating).unwrap();
        let lines = RamanLines::new(ZeemanParams::cesium(0.0));
        let grid = detuning_grid(1000.0, 0.5).unwrap();
        let mixed = synth_copropagating(&uniform_f4(), &lines, &p, &grid).unwrap();
        let single = synth_copropagating(&dark(), &lines, &p, &grid).unwrap();
        let a = mixed.fwhm().unwrap();
        let b = single.fwhm().unwrap();
        assert!((a - b).abs() < 1e-9 * b);
    }

    #[test]
    fn copropagating_rejects_counter_pulse() {
        let p = RamanPulse::pi_pulse(7e-3, Geometry::Counterpropagating).unwrap();
        let lines = RamanLines::new(ZeemanParams::default());
        assert!(synth_copropagating(&dark(), &lines, &p, &[0.0, 1.0]).is_err());
        let vd = VelocityDistribution::gaussian(1.0, 0.0).unwrap();
        let co = RamanPulse::pi_pulse(7e-3, Geometry::Copropagating).unwrap();
        assert!(synth_counterpropagating(
            &dark(),
            &lines,
            &vd,
            &co,
            &[0.0, 1.0],
            &AtomConstants::default()
        )
        .is_err());
        assert!(VelocityDistribution::gaussian(-1.0, 0.0).is_err());
    }

    #[test]
    fn field_noise_leaves_m0_line_alone() {
        let p = RamanPulse::pi_pulse(7e-3, Geometry::Copropagating).unwrap();
        let quiet = RamanLines::new(ZeemanParams::cesium(0.01));
        let noisy = quiet.clone().with_field_noise(300e-6);
        let grid = detuning_grid(2000.0, 1.0).unwrap();
        let a = synth_copropagating(&dark(), &quiet, &p, &grid).unwrap();
        let b = synth_copropagating(&dark(), &noisy, &p, &grid).unwrap();
        assert_eq!(a, b);
        let mut m1 = vec![0.0; NUM_STATES];
        m1[Sublevel::ground(4, 1).index().unwrap()] = 1.0;
        let off = raman_line_offset(1, &quiet.zeeman).unwrap();
        let g: Vec<f64> = (-4000..=4000).map(|i| off + i as f64).collect();
        let wa = synth_copropagating(&m1, &quiet, &p, &g)
            .unwrap()
            .fwhm()
            .unwrap();
        let wb = synth_copropagating(&m1, &noisy, &p, &g)
            .unwrap()
            .fwhm()
            .unwrap();
        assert!(wb > 2.0 * wa);
    }

    #[test]
    fn doppler_factor() {
        let c = AtomConstants::cesium_d2();
        let d = doppler_shift(1.0, Geometry::Counterpropagating, &c);
        assert!((d - 8272.0).abs() < 1.0, "{d}");
        assert!((d - 8270.0).abs() / 8270.0 < 1e-3);
        assert_eq!(doppler_shift(0.0, Geometry::Counterpropagating, &c), 0.0);
        assert_eq!(doppler_shift(3.0, Geometry::Copropagating, &c), 0.0);
        let a = doppler_shift(2.5, Geometry::Counterpropagating, &c);
        assert!((a - 2.5 * d).abs() < 1e-9);
    }

    #[test]
    fn velocity_resolution_values() {
        let c = AtomConstants::cesium_d2();
        let r = velocity_resolution(160.0, &c).unwrap();
        assert!((r.recoil_units - 0.0193).abs() < 5e-5, "{}", r.recoil_units);
        assert!((r.meters_per_second * 1e6 - 68.0).abs() < 0.5);
        let one = velocity_resolution(c.doppler_hz_per_recoil(), &c).unwrap();
        assert!((one.recoil_units - 1.0).abs() < 1e-15);
        assert!(velocity_resolution(0.0, &c).is_err());
        assert!((3500.0_f64 / 160.0 - 21.9).abs() < 0.05);
    }

    #[test]
    fn temperatures() {
        let c = AtomConstants::cesium_d2();
        let t4 = temperature_from_sigma(4.0, &c) * 1e6;
        let t48 = temperature_from_sigma(4.8, &c) * 1e6;
        assert!((t4 - 3.2).abs() / 3.2 < 0.03, "{t4}");
        assert!((t48 - 4.6).abs() / 4.6 < 0.03, "{t48}");
    }

    #[test]
    fn zero_width_velocity_distribution_is_copropagating_line() {
        let c = AtomConstants::cesium_d2();
        let lines = RamanLines::new(ZeemanParams::default());
        let co = RamanPulse::pi_pulse(7e-3, Geometry::Copropagating).unwrap();
        let counter = RamanPulse::pi_pulse(7e-3, Geometry::Counterpropagating).unwrap();
        let grid = detuning_grid(500.0, 1.0).unwrap();
        let a = synth_copropagating(&dark(), &lines, &co, &grid).unwrap();
        let vd = VelocityDistribution::gaussian(0.0, 0.0).unwrap();
        let b = synth_counterpropagating(&dark(), &lines, &vd, &counter, &grid, &c).unwrap();
        assert_eq!(a.signal, b.signal);
        let tiny = VelocityDistribution::gaussian(1e-4, 0.0).unwrap();
        let s = synth_counterpropagating(&dark(), &lines, &tiny, &counter, &grid, &c).unwrap();
        let (wa, wb) = (a.fwhm().unwrap(), s.fwhm().unwrap());
        assert!((wb - wa).abs() / wa < 1e-3, "{wa} {wb}");
    }

    #[test]
    fn quadrature_nodes_are_normalized() {
        let nodes = gaussian_nodes(1.0, 2.0, 0.5);
        assert!(nodes.len() >= MIN_QUADRATURE_POINTS && nodes.len() % 2 == 1);
        let total: f64 = nodes.iter().map(|n| n.1).sum();
        assert!((total - 1.0).abs() < 1e-14);
        let mean: f64 = nodes.iter().map(|n| n.0 * n.1).sum();
        let var: f64 = nodes.iter().map(|n| (n.0 - mean).powi(2) * n.1).sum();
        assert!((mean - 1.0).abs() < 1e-12);
        assert!((var.sqrt() - 2.0).abs() < 1e-6);
    }
}
