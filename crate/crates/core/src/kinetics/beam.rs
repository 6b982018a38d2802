use std::fmt;
use std::str::FromStr;

use crate::constants::{
    AtomConstants, DEFAULT_LASER_LINEWIDTH_HZ, EXCITED_SPLITTING_3_4_HZ, EXCITED_SPLITTING_4_5_HZ,
    GROUND_SPLITTING_HZ,
};
use crate::error::{invalid, Error, Result};

/// A hyperfine transition F → F' within the modeled state space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    ground_f: i32,
    excited_f: i32,
}

impl Transition {
    pub fn new(ground_f: i32, excited_f: i32) -> Result<Self> {
        let known = matches!(ground_f, 3 | 4) && matches!(excited_f, 3..=5);
        if !known || (ground_f - excited_f).abs() > 1 {
            return Err(Error::UnknownTransition {
                ground: ground_f,
                excited: excited_f,
            });
        }
        Ok(Self {
            ground_f,
            excited_f,
        })
    }

    pub fn ground_f(&self) -> i32 {
        self.ground_f
    }

    pub fn excited_f(&self) -> i32 {
        self.excited_f
    }

    /// Every dipole-allowed F → F' pair of the state space.
    pub fn all() -> impl Iterator<Item = Transition> {
        [(3, 3), (3, 4), (4, 3), (4, 4), (4, 5)]
            .into_iter()
            .map(|(g, e)| Transition {
                ground_f: g,
                excited_f: e,
            })
    }

    /// Optical frequency relative to the F=4 → F'=5 cycling line (Hz).
    pub fn frequency_offset_hz(&self) -> f64 {
        let excited = match self.excited_f {
            5 => 0.0,
            4 => -EXCITED_SPLITTING_4_5_HZ,
            3 => -EXCITED_SPLITTING_4_5_HZ - EXCITED_SPLITTING_3_4_HZ,
            _ => unreachable!("validated on construction"),
        };
        let ground = match self.ground_f {
            4 => 0.0,
            3 => -GROUND_SPLITTING_HZ,
            _ => unreachable!("validated on construction"),
        };
        excited - ground
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}'", self.ground_f, self.excited_f)
    }
}

impl FromStr for Transition {
    type Err = Error;

    /// Accepts `4->4'`, `4->4`, `4-4'` or `4,4`.
    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '\'')
            .collect();
        let parts: Vec<&str> = cleaned
            .split(['-', '>', ','])
            .filter(|p| !p.is_empty())
            .collect();
        let parse = |p: &str| {
            p.parse::<i32>()
                .map_err(|_| invalid("target", format!("cannot parse `{s}`")))
        };
        match parts.as_slice() {
            [g, e] => Transition::new(parse(g)?, parse(e)?),
            _ => Err(invalid("target", format!("expected `F->F'`, got `{s}`"))),
        }
    }
}

/// Intensity fractions in the σ⁻, π and σ⁺ components of a beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationWeights {
    pub minus: f64,
    pub pi: f64,
    pub plus: f64,
}

impl PolarizationWeights {
    pub const PURE_PI: Self = Self {
        minus: 0.0,
        pi: 1.0,
        plus: 0.0,
    };

    pub fn new(minus: f64, pi: f64, plus: f64) -> Result<Self> {
        if [minus, pi, plus].iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(invalid(
                "pol_weights",
                "weights must be finite and nonnegative",
            ));
        }
        if (minus + pi + plus - 1.0).abs() > 1e-12 {
            return Err(invalid(
                "pol_weights",
                format!("sum {} != 1", minus + pi + plus),
            ));
        }
        Ok(Self { minus, pi, plus })
    }

    /// ε_q² for q = m' − m ∈ {−1, 0, +1}.
    pub fn for_q(&self, q: i32) -> f64 {
        match q {
            -1 => self.minus,
            0 => self.pi,
            1 => self.plus,
            _ => 0.0,
        }
    }
}

/// Intensity fractions of the field (ε₀ + α ε₊ + α ε₋)/√(1+2α²).
pub fn polarization_weights(alpha: f64) -> Result<PolarizationWeights> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(invalid("alpha", format!("must be >= 0, got {alpha}")));
    }
    let a2 = alpha * alpha;
    let norm = 1.0 + 2.0 * a2;
    Ok(PolarizationWeights {
        minus: a2 / norm,
        pi: 1.0 / norm,
        plus: a2 / norm,
    })
}

/// One light field driving the atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSpec {
    pub target: Transition,
    /// I / I_s
    pub intensity_ratio: f64,
    /// ω_L − ω_target in units of Γ.
    pub detuning_gamma: f64,
    /// Laser linewidth Δ_L/2π (Hz).
    pub linewidth_hz: f64,
    pub polarization: PolarizationWeights,
}

impl BeamSpec {
    pub fn new(
        target: Transition,
        intensity_ratio: f64,
        detuning_gamma: f64,
        alpha: f64,
    ) -> Result<Self> {
        let beam = Self {
            target,
            intensity_ratio,
            detuning_gamma,
            linewidth_hz: DEFAULT_LASER_LINEWIDTH_HZ,
            polarization: polarization_weights(alpha)?,
        };
        beam.validate()?;
        Ok(beam)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.intensity_ratio.is_finite() || self.intensity_ratio < 0.0 {
            return Err(invalid(
                "intensity_ratio",
                format!("must be >= 0, got {}", self.intensity_ratio),
            ));
        }
        if !self.linewidth_hz.is_finite() || self.linewidth_hz <= 0.0 {
            return Err(invalid(
                "linewidth",
                format!("must be > 0, got {}", self.linewidth_hz),
            ));
        }
        if !self.detuning_gamma.is_finite() {
            return Err(invalid("detuning_gamma", "must be finite"));
        }
        PolarizationWeights::new(
            self.polarization.minus,
            self.polarization.pi,
            self.polarization.plus,
        )?;
        Ok(())
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        self.polarization = polarization_weights(alpha)?;
        Ok(self)
    }

    pub fn with_intensity(mut self, intensity_ratio: f64) -> Self {
        self.intensity_ratio = intensity_ratio;
        self
    }

    /// Laser frequency relative to the F=4 → F'=5 line (Hz).
    pub fn laser_offset_hz(&self, constants: &AtomConstants) -> f64 {
        self.target.frequency_offset_hz() + self.detuning_gamma * constants.gamma_hz
    }
}

/// μ(μ+1)(Δ² + (μ−1)²) / ((Δ² + μ² − 1)² + 4Δ²).
///
/// The point μ = 1, Δ = 0 is a removable 0/0 whose limit is μ/(μ+1).
pub fn chi_raw(mu: f64, delta: f64) -> f64 {
    if delta.abs() < 1e-9 && (mu - 1.0).abs() < 1e-9 {
        return mu / (mu + 1.0);
    }
    let d2 = delta * delta;
    let num = mu * (mu + 1.0) * (d2 + (mu - 1.0).powi(2));
    let den = (d2 + mu * mu - 1.0).powi(2) + 4.0 * d2;
    num / den
}

/// Relative excitation probability of `transition` by `beam`.
///
/// Uses μ = Δ_L/Γ and Δ = 2(ω_transition − ω_L)/Γ.
pub fn chi(transition: Transition, beam: &BeamSpec, constants: &AtomConstants) -> f64 {
    let mu = beam.linewidth_hz / constants.gamma_hz;
    let delta = 2.0 * (transition.frequency_offset_hz() - beam.laser_offset_hz(constants))
        / constants.gamma_hz;
    chi_raw(mu, delta)
}

/// Stimulated rate between a ground and an excited sublevel (s⁻¹),
/// (Γ/2)(Γ/Δ_L)(I/I_s) χ a ε_q², identical for absorption and stimulated
/// emission.
pub fn stimulated_rate(
    chi: f64,
    branching: f64,
    q: i32,
    beam: &BeamSpec,
    constants: &AtomConstants,
) -> f64 {
    let gamma = constants.gamma();
    let linewidth = 2.0 * std::f64::consts::PI * beam.linewidth_hz;
    0.5 * gamma
        * (gamma / linewidth)
        * beam.intensity_ratio
        * chi
        * branching
        * beam.polarization.for_q(q)
}

/// The same rate written with SI intensity: (3/2)(λ³/πhc)(I/Δ_L) χ a Γ ε_q².
pub fn stimulated_rate_si(
    intensity_w_m2: f64,
    chi: f64,
    branching: f64,
    eps_q2: f64,
    linewidth_rad_s: f64,
    constants: &AtomConstants,
) -> f64 {
    use crate::constants::{PLANCK, SPEED_OF_LIGHT};
    let lambda3 = constants.wavelength_m.powi(3);
    1.5 * lambda3 / (std::f64::consts::PI * PLANCK * SPEED_OF_LIGHT)
        * (intensity_w_m2 / linewidth_rad_s)
        * chi
        * branching
        * constants.gamma()
        * eps_q2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_pure_pi_at_zero() {
        assert_eq!(
            polarization_weights(0.0).unwrap(),
            PolarizationWeights::PURE_PI
        );
    }

    #[test]
    fn weights_at_reference_alpha() {
        // α² = 1.69e-4; 1.69e-4 / 1.000338 and 1 / 1.000338
        let w = polarization_weights(0.013).unwrap();
        assert!((w.plus - 1.689_429e-4).abs() < 1e-9);
        assert_eq!(w.plus, w.minus);
        assert!((w.pi - 0.999_662_1).abs() < 1e-7);
    }

    #[test]
    fn weights_reject_negative() {
        assert!(polarization_weights(-0.1).is_err());
        assert!(polarization_weights(f64::NAN).is_err());
    }

    #[test]
    fn chi_on_resonance_closed_form() {
        let mu = 0.2;
        assert!((chi_raw(mu, 0.0) - mu / (mu + 1.0)).abs() < 1e-15);
        assert!((chi_raw(0.2, 0.0) - 0.166_666_666_666_666_7).abs() < 1e-15);
    }

    #[test]
    fn chi_at_default_linewidth() {
        let c = AtomConstants::cesium_d2();
        let beam = BeamSpec::new(Transition::new(4, 4).unwrap(), 1.0, 0.0, 0.0).unwrap();
        let v = chi(beam.target, &beam, &c);
        assert!((v - 0.1608).abs() < 5e-5, "{v}");
    }

    #[test]
    fn chi_vanishes_far_off_resonance() {
        assert!(chi_raw(0.19, 1e6) < 1e-12);
        assert!(chi_raw(0.19, -1e6) < 1e-12);
    }

    #[test]
    fn chi_removable_singularity() {
        assert_eq!(chi_raw(1.0, 0.0), 0.5);
        let near = chi_raw(1.0 + 1e-6, 1e-6);
        assert!((near - 0.5).abs() < 1e-5);
    }

    #[test]
    fn transition_parsing() {
        assert_eq!(
            "4->4'".parse::<Transition>().unwrap(),
            Transition::new(4, 4).unwrap()
        );
        assert_eq!(
            "3-4".parse::<Transition>().unwrap(),
            Transition::new(3, 4).unwrap()
        );
        assert!("3->5'".parse::<Transition>().is_err());
        assert!("4->2'".parse::<Transition>().is_err());
        assert!("x".parse::<Transition>().is_err());
    }

    #[test]
    fn two_rate_forms_agree() {
        let c = AtomConstants::cesium_d2();
        let beam = BeamSpec::new(Transition::new(4, 4).unwrap(), 0.019, -0.5, 0.013).unwrap();
        let x = chi(beam.target, &beam, &c);
        let a = 0.2917;
        let lw = 2.0 * std::f64::consts::PI * beam.linewidth_hz;
        for q in [-1, 0, 1] {
            let w1 = stimulated_rate(x, a, q, &beam, &c);
            let w2 = stimulated_rate_si(
                beam.intensity_ratio * c.saturation_intensity(),
                x,
                a,
                beam.polarization.for_q(q),
                lw,
                &c,
            );
            assert!(((w1 - w2) / w1).abs() < 1e-12);
        }
    }

    #[test]
    fn rate_linear_in_intensity_and_zero_when_forbidden() {
        let c = AtomConstants::cesium_d2();
        let beam = BeamSpec::new(Transition::new(4, 4).unwrap(), 0.019, 0.0, 0.0).unwrap();
        let w1 = stimulated_rate(0.1, 0.3, 0, &beam, &c);
        let w2 = stimulated_rate(0.1, 0.3, 0, &beam.clone().with_intensity(0.038), &c);
        assert_eq!(w2, 2.0 * w1);
        assert_eq!(stimulated_rate(0.1, 0.0, 0, &beam, &c), 0.0);
        assert_eq!(stimulated_rate(0.1, 0.3, 1, &beam, &c), 0.0);
    }
}
