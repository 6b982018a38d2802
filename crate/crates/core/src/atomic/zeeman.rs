use crate::constants::{BOHR_MAGNETON_HZ_PER_GAUSS, LANDE_G3, LANDE_G4};
use crate::error::{Error, Result};

/// First-order ground-state Zeeman parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeemanParams {
    pub g3: f64,
    pub g4: f64,
    /// Bias field along the quantization axis (G).
    pub bias_gauss: f64,
}

impl ZeemanParams {
    pub fn cesium(bias_gauss: f64) -> Self {
        Self {
            g3: LANDE_G3,
            g4: LANDE_G4,
            bias_gauss,
        }
    }

    /// Line shift per unit m per gauss (Hz/G).
    pub fn hz_per_m_per_gauss(&self) -> f64 {
        (self.g4 - self.g3) * BOHR_MAGNETON_HZ_PER_GAUSS
    }
}

impl Default for ZeemanParams {
    fn default() -> Self {
        Self::cesium(0.0)
    }
}

/// Position of the σ⁺σ⁺ Raman line g,F=3,m ↔ g,F=4,m relative to the
/// field-free resonance (Hz).
pub fn raman_line_offset(m: i32, params: &ZeemanParams) -> Result<f64> {
    if m.abs() > 3 {
        return Err(Error::RamanLineOutOfRange(m.abs()));
    }
    Ok(m as f64 * params.hz_per_m_per_gauss() * params.bias_gauss)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_zero_is_field_insensitive() {
        for b in [0.0, 0.1, 3.0, -2.0] {
            assert_eq!(raman_line_offset(0, &ZeemanParams::cesium(b)).unwrap(), 0.0);
        }
    }

    #[test]
    fn antisymmetric_in_m() {
        let p = ZeemanParams::cesium(0.37);
        for m in 1..=3 {
            let plus = raman_line_offset(m, &p).unwrap();
            let minus = raman_line_offset(-m, &p).unwrap();
            assert_eq!(plus, -minus);
        }
    }

    #[test]
    fn hundred_milligauss_line_position() {
        // (1/2) * 1.39962 MHz/G * 0.1 G
        let off = raman_line_offset(1, &ZeemanParams::cesium(0.100)).unwrap();
        assert!((off - 69_981.2).abs() < 0.1, "{off}");
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(raman_line_offset(4, &ZeemanParams::default()).is_err());
        assert!(raman_line_offset(-4, &ZeemanParams::default()).is_err());
    }
}
