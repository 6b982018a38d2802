//! Physical constants and cesium D2-line data.
//!
//! SI values are the 2019 CODATA exact definitions unless noted. Cesium data
//! follow the standard D. A. Steck "Cesium D Line Data" compilation.

use std::f64::consts::PI;

/// Planck constant (J s), exact.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Speed of light (m/s), exact.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Boltzmann constant (J/K), exact.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Atomic mass unit (kg), CODATA 2018.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Bohr magneton over Planck constant (Hz/G), CODATA 2018.
pub const BOHR_MAGNETON_HZ_PER_GAUSS: f64 = 1.399_624_493_61e6;

/// Cs-133 atomic mass (u).
pub const CESIUM_MASS_AMU: f64 = 132.905_451_961;
/// D2 natural linewidth Γ/2π (Hz).
pub const CESIUM_GAMMA_HZ: f64 = 5.22e6;
/// Pumping and Raman laser wavelength (m).
pub const CESIUM_WAVELENGTH_M: f64 = 852e-9;
/// Default laser linewidth Δ_L/2π (Hz).
pub const DEFAULT_LASER_LINEWIDTH_HZ: f64 = 1.0e6;

/// 6S1/2 ground hyperfine splitting F=3 ↔ F=4 (Hz), exact by SI second definition.
pub const GROUND_SPLITTING_HZ: f64 = 9_192_631_770.0;
/// 6P3/2 excited hyperfine splitting F'=2 ↔ F'=3 (Hz). F'=2 is outside the state space.
pub const EXCITED_SPLITTING_2_3_HZ: f64 = 151.2e6;
/// 6P3/2 excited hyperfine splitting F'=3 ↔ F'=4 (Hz).
pub const EXCITED_SPLITTING_3_4_HZ: f64 = 201.2e6;
/// 6P3/2 excited hyperfine splitting F'=4 ↔ F'=5 (Hz).
pub const EXCITED_SPLITTING_4_5_HZ: f64 = 251.0e6;

/// First-order Landé factor of the F=3 ground level.
pub const LANDE_G3: f64 = -0.25;
/// First-order Landé factor of the F=4 ground level.
pub const LANDE_G4: f64 = 0.25;

/// Bundle of the constants that the kinetics and spectroscopy code depend on.
///
/// Everything else (h, c, k_B) is fixed; these can be overridden from a
/// scenario file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomConstants {
    /// Natural linewidth Γ/2π (Hz).
    pub gamma_hz: f64,
    /// Laser wavelength λ_L (m).
    pub wavelength_m: f64,
    /// Atomic mass (kg).
    pub mass_kg: f64,
}

impl Default for AtomConstants {
    fn default() -> Self {
        Self::cesium_d2()
    }
}

impl AtomConstants {
    pub fn cesium_d2() -> Self {
        Self {
            gamma_hz: CESIUM_GAMMA_HZ,
            wavelength_m: CESIUM_WAVELENGTH_M,
            mass_kg: CESIUM_MASS_AMU * ATOMIC_MASS_UNIT,
        }
    }

    /// Γ in rad/s.
    pub fn gamma(&self) -> f64 {
        2.0 * PI * self.gamma_hz
    }

    /// Saturation intensity I_s = π h c Γ / (3 λ³) in W/m².
    pub fn saturation_intensity(&self) -> f64 {
        PI * PLANCK * SPEED_OF_LIGHT * self.gamma() / (3.0 * self.wavelength_m.powi(3))
    }

    /// Single-photon recoil velocity ħk/M (m/s).
    pub fn recoil_velocity(&self) -> f64 {
        PLANCK / (self.wavelength_m * self.mass_kg)
    }

    /// Counterpropagating two-photon Doppler shift per recoil velocity (Hz).
    ///
    /// A velocity v shifts the Raman resonance by 2 k v / 2π = 2 v / λ.
    pub fn doppler_hz_per_recoil(&self) -> f64 {
        2.0 * self.recoil_velocity() / self.wavelength_m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturation_intensity_matches_quoted_value() {
        let is = AtomConstants::cesium_d2().saturation_intensity();
        assert!((is - 11.0).abs() < 0.1, "I_s = {is}");
    }

    #[test]
    fn recoil_velocity_and_doppler_factor() {
        let c = AtomConstants::cesium_d2();
        assert!((c.recoil_velocity() - 3.524e-3).abs() < 1e-6);
        assert!((c.doppler_hz_per_recoil() - 8272.0).abs() < 1.0);
    }
}
