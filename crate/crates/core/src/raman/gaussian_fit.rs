use nalgebra::{Matrix3, Vector3};

use super::{temperature_from_sigma, Spectrum};
use crate::constants::AtomConstants;
use crate::error::{invalid, Result};

const MAX_ITERATIONS: usize = 500;
const STEP_TOLERANCE: f64 = 1e-8;

/// A exp(−(x−c)²/(2s²)).
pub fn gaussian(x: f64, amplitude: f64, center: f64, sigma: f64) -> f64 {
    let z = (x - center) / sigma;
    amplitude * (-0.5 * z * z).exp()
}

/// Least-squares Gaussian fitted to a spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFit {
    pub amplitude: f64,
    pub center_hz: f64,
    pub sigma_hz: f64,
    pub rms_residual: f64,
    pub iterations: usize,
    /// `false` when the iteration budget ran out; the fields then hold the
    /// best parameters found.
    pub converged: bool,
}

impl GaussianFit {
    pub fn fwhm_hz(&self) -> f64 {
        2.0 * (2.0 * std::f64::consts::LN_2).sqrt() * self.sigma_hz
    }

    /// Velocity σ in recoil units for a counterpropagating spectrum.
    pub fn sigma_vr(&self, constants: &AtomConstants) -> f64 {
        self.sigma_hz / constants.doppler_hz_per_recoil()
    }

    pub fn temperature_k(&self, constants: &AtomConstants) -> f64 {
        temperature_from_sigma(self.sigma_vr(constants), constants)
    }
}

struct Problem<'a> {
    u: Vec<f64>,
    y: &'a [f64],
}

impl Problem<'_> {
    fn sse(&self, p: &Vector3<f64>) -> f64 {
        self.u
            .iter()
            .zip(self.y)
            .map(|(&u, &y)| (y - gaussian(u, p[0], p[1], p[2])).powi(2))
            .sum()
    }

    /// JᵀJ and Jᵀr of the model at `p`.
    fn normal_equations(&self, p: &Vector3<f64>) -> (Matrix3<f64>, Vector3<f64>) {
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for (&u, &y) in self.u.iter().zip(self.y) {
            let z = (u - p[1]) / p[2];
            let e = (-0.5 * z * z).exp();
            let j = Vector3::new(e, p[0] * e * z / p[2], p[0] * e * z * z / p[2]);
            jtj += j * j.transpose();
            jtr += j * (y - p[0] * e);
        }
        (jtj, jtr)
    }
}

fn initial_guess(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let spectrum = Spectrum::new(x.to_vec(), y.to_vec()).unwrap_or_default();
    let (imax, peak) = spectrum.peak().unwrap_or((0, 1.0));
    let sigma = spectrum
        .fwhm()
        .map(|w| w / 2.354_820_045)
        .filter(|s| *s > 0.0)
        .unwrap_or_else(|| (x[x.len() - 1] - x[0]).abs() / 6.0);
    (peak, x[imax], sigma)
}

/// Levenberg–Marquardt fit of A exp(−(x−c)²/(2s²)).
///
/// Coordinates are centred and scaled on the initial guess. Convergence means
/// every parameter moved by less than 1e-8 relative in the last accepted step.
pub fn fit_gaussian(spectrum: &Spectrum) -> Result<GaussianFit> {
    let (x, y) = (&spectrum.detunings, &spectrum.signal);
    if x.len() != y.len() || x.len() < 4 {
        return Err(invalid("spectrum", "need at least four points"));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(invalid("spectrum", "non-finite values"));
    }
    let (a0, c0, s0) = initial_guess(x, y);
    if !(s0 > 0.0) || !(a0 > 0.0) {
        return Err(invalid("spectrum", "no positive peak to fit"));
    }
    let problem = Problem {
        u: x.iter().map(|&v| (v - c0) / s0).collect(),
        y,
    };
    let mut p = Vector3::new(a0, 0.0, 1.0);
    let mut sse = problem.sse(&p);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (jtj, jtr) = problem.normal_equations(&p);
        if jtr.amax() <= 1e-14 * (1.0 + sse) {
            converged = true;
            break;
        }
        let mut accepted = false;
        while lambda < 1e16 {
            let mut damped = jtj;
            for i in 0..3 {
                damped[(i, i)] *= 1.0 + lambda;
            }
            let Some(step) = damped.lu().solve(&jtr) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial = p + step;
            trial[2] = trial[2].abs();
            let trial_sse = problem.sse(&trial);
            if trial_sse.is_finite() && trial_sse <= sse {
                let moved = (0..3)
                    .map(|i| step[i].abs() / p[i].abs().max(1e-12))
                    .fold(0.0, f64::max);
                p = trial;
                sse = trial_sse;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                converged = moved < STEP_TOLERANCE;
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // No descent direction left at working precision.
            converged = true;
            break;
        }
        if converged {
            break;
        }
    }

    Ok(GaussianFit {
        amplitude: p[0],
        center_hz: c0 + p[1] * s0,
        sigma_hz: p[2] * s0,
        rms_residual: (sse / x.len() as f64).sqrt(),
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    fn synthetic(a: f64, c: f64, s: f64) -> Spectrum {
        let x: Vec<f64> = (-400..=400).map(|i| i as f64 * 250.0).collect();
        let y = x.iter().map(|&v| gaussian(v, a, c, s)).collect();
        Spectrum::new(x, y).unwrap()
    }

    #[test]
    fn recovers_exact_gaussian() {
        let fit = fit_gaussian(&synthetic(0.7, 1234.0, 33_000.0)).unwrap();
        assert!(fit.converged);
        assert!((fit.amplitude - 0.7).abs() < 1e-9);
        assert!((fit.center_hz - 1234.0).abs() < 1e-5);
        assert!((fit.sigma_hz - 33_000.0).abs() < 1e-5);
        assert!(fit.rms_residual < 1e-10);
    }

    #[test]
    fn recovers_noisy_gaussian() {
        let clean = synthetic(1.0, -5000.0, 40_000.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let noise = Normal::new(0.0, 0.01).unwrap();
        let y = clean
            .signal
            .iter()
            .map(|v| v + noise.sample(&mut rng))
            .collect();
        let fit = fit_gaussian(&Spectrum::new(clean.detunings.clone(), y).unwrap()).unwrap();
        assert!(fit.converged);
        assert!((fit.sigma_hz - 40_000.0).abs() / 40_000.0 < 0.01);
        assert!((fit.rms_residual - 0.01).abs() < 0.002);
    }

    #[test]
    fn derived_quantities() {
        let c = AtomConstants::cesium_d2();
        let fit = GaussianFit {
            amplitude: 1.0,
            center_hz: 0.0,
            sigma_hz: 4.0 * c.doppler_hz_per_recoil(),
            rms_residual: 0.0,
            iterations: 1,
            converged: true,
        };
        assert!((fit.sigma_vr(&c) - 4.0).abs() < 1e-12);
        assert!((fit.temperature_k(&c) * 1e6 - 3.18).abs() < 0.02);
        assert!((fit.fwhm_hz() / fit.sigma_hz - 2.354_820_045).abs() < 1e-9);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(fit_gaussian(&Spectrum::new(vec![0.0, 1.0], vec![1.0, 0.0]).unwrap()).is_err());
        let flat = Spectrum::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0; 4]).unwrap();
        assert!(fit_gaussian(&flat).is_err());
    }
}
