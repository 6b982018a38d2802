//! Fixed-step classical RK4 for the population equations.
//!
//! The generator is constant, so one RK4 step is the linear map
//! P = I + hA + (hA)²/2 + (hA)³/6 + (hA)⁴/24 applied to the state. The state is
//! augmented with the cumulative photon count, whose derivative Γ·Σ N_excited
//! is one more row of A; the photon integral therefore uses the same RK4
//! quadrature as the populations. Long stretches are advanced with the binary
//! powers P, P², P⁴, …, which is the same arithmetic map as repeated stepping.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use super::matrix::RateMatrix;
use crate::atomic::{dark_state_index, enumerate_states, NUM_GROUND, NUM_STATES};
use crate::error::{invalid, Error, Result};

/// Upper bound on dt·max|R|.
pub const STABILITY_LIMIT: f64 = 0.1;

const AUGMENTED: usize = NUM_STATES + 1;
const PHOTONS: usize = NUM_STATES;
const MAX_DOUBLINGS: usize = 64;

fn augmented_generator(matrix: &RateMatrix) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(AUGMENTED, AUGMENTED);
    a.view_mut((0, 0), (NUM_STATES, NUM_STATES))
        .copy_from(matrix.generator());
    for e in NUM_GROUND..NUM_STATES {
        a[(PHOTONS, e)] = matrix.gamma();
    }
    a
}

/// Population columns of every power of the step map sum to exactly 1;
/// squaring doubles the rounding drift, so it is folded back into the
/// diagonal after each product.
fn restore_column_sums(p: &mut DMatrix<f64>) {
    for j in 0..NUM_STATES {
        let off: f64 = (0..NUM_STATES).filter(|&i| i != j).map(|i| p[(i, j)]).sum();
        p[(j, j)] = 1.0 - off;
    }
}

/// RK4 one-step map and its binary powers for a fixed generator and step.
#[derive(Debug, Clone)]
pub struct Rk4Propagator {
    dt: f64,
    generator: DMatrix<f64>,
    powers: Vec<DMatrix<f64>>,
}

impl Rk4Propagator {
    pub fn new(matrix: &RateMatrix, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(invalid("dt", format!("must be > 0, got {dt}")));
        }
        let product = dt * matrix.max_abs();
        if product > STABILITY_LIMIT {
            return Err(Error::UnstableStep {
                product,
                limit: STABILITY_LIMIT,
            });
        }
        let generator = augmented_generator(matrix);
        let ha = &generator * dt;
        let ha2 = &ha * &ha;
        let ha3 = &ha2 * &ha;
        let ha4 = &ha3 * &ha;
        let mut step =
            DMatrix::identity(AUGMENTED, AUGMENTED) + &ha + ha2 / 2.0 + ha3 / 6.0 + ha4 / 24.0;
        restore_column_sums(&mut step);
        Ok(Self {
            dt,
            generator,
            powers: vec![step],
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn power(&mut self, k: usize) -> &DMatrix<f64> {
        while self.powers.len() <= k {
            let last = self.powers.last().unwrap();
            let mut next = last * last;
            restore_column_sums(&mut next);
            self.powers.push(next);
        }
        &self.powers[k]
    }

    /// Advance an augmented state by `steps` RK4 steps.
    fn advance(&mut self, state: &mut DVector<f64>, steps: u64) {
        let mut remaining = steps;
        let mut k = 0;
        while remaining > 0 {
            assert!(k < MAX_DOUBLINGS);
            if remaining & 1 == 1 {
                *state = self.power(k) * &*state;
            }
            remaining >>= 1;
            k += 1;
        }
    }

    /// One textbook RK4 step with explicit stage evaluations, for checking the
    /// one-step map.
    pub fn explicit_step(&self, state: &[f64]) -> Vec<f64> {
        let y = DVector::from_column_slice(state);
        let h = self.dt;
        let f = |v: &DVector<f64>| &self.generator * v;
        let k1 = f(&y);
        let k2 = f(&(&y + &k1 * (h / 2.0)));
        let k3 = f(&(&y + &k2 * (h / 2.0)));
        let k4 = f(&(&y + &k3 * h));
        let next = &y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        next.as_slice().to_vec()
    }

    pub fn map_step(&self, state: &[f64]) -> Vec<f64> {
        let y = DVector::from_column_slice(state);
        (&self.powers[0] * y).as_slice().to_vec()
    }

    /// Populations and photon counts at each of the requested step indices
    /// (nondecreasing).
    pub fn sample_at_steps(&mut self, n0: &[f64], steps: &[u64]) -> Result<PopulationTrajectory> {
        validate_initial(n0)?;
        let mut state = DVector::zeros(AUGMENTED);
        state.as_mut_slice()[..NUM_STATES].copy_from_slice(n0);

        let mut traj = PopulationTrajectory::with_capacity(steps.len());
        let mut current = 0u64;
        for &s in steps {
            if s < current {
                return Err(invalid("steps", "sample steps must be nondecreasing"));
            }
            self.advance(&mut state, s - current);
            current = s;
            traj.push(s as f64 * self.dt, &state);
        }
        Ok(traj)
    }
}

fn validate_initial(n0: &[f64]) -> Result<()> {
    if n0.len() != NUM_STATES {
        return Err(invalid(
            "n0",
            format!("expected {NUM_STATES} populations, got {}", n0.len()),
        ));
    }
    if n0.iter().any(|&v| !v.is_finite() || v < 0.0) {
        return Err(invalid("n0", "initial populations must be nonnegative"));
    }
    let total: f64 = n0.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(invalid(
            "n0",
            format!("initial populations sum to {total}, not 1"),
        ));
    }
    Ok(())
}

/// Time series of the 43 populations and the cumulative scattered photons.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PopulationTrajectory {
    pub times: Vec<f64>,
    pub populations: Vec<Vec<f64>>,
    pub scattered_photons: Vec<f64>,
}

/// Negative round-off larger than this is reported instead of clipped.
const CLIP_TOLERANCE: f64 = 1e-12;

impl PopulationTrajectory {
    fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            populations: Vec::with_capacity(n),
            scattered_photons: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, t: f64, state: &DVector<f64>) {
        let mut pops = state.as_slice()[..NUM_STATES].to_vec();
        for (i, p) in pops.iter_mut().enumerate() {
            if *p < 0.0 {
                if *p >= -CLIP_TOLERANCE {
                    log::trace!("clipping population {i} = {p:e} at t = {t:e}");
                    *p = 0.0;
                } else {
                    log::warn!("population {i} = {p:e} at t = {t:e} below clip tolerance");
                }
            }
        }
        self.times.push(t);
        self.populations.push(pops);
        self.scattered_photons.push(state[PHOTONS]);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.populations.last().map(|p| p.as_slice())
    }

    /// Population of (g,4,0) relative to all ground-state atoms.
    pub fn m0_fraction(&self) -> Vec<f64> {
        self.populations
            .iter()
            .map(|p| ground_fraction(p, dark_state_index()))
            .collect()
    }

    /// Fraction of ground-state atoms in `index` at every sample.
    pub fn ground_fraction_of(&self, index: usize) -> Vec<f64> {
        self.populations
            .iter()
            .map(|p| ground_fraction(p, index))
            .collect()
    }

    /// Header plus one row per sample, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_s");
        for s in enumerate_states() {
            write!(out, ", n_{}", s.label()).unwrap();
        }
        out.push_str(", scattered_photons\n");
        for ((t, pops), ph) in self
            .times
            .iter()
            .zip(&self.populations)
            .zip(&self.scattered_photons)
        {
            write!(out, "{t:.16e}").unwrap();
            for p in pops {
                write!(out, ", {p:.16e}").unwrap();
            }
            writeln!(out, ", {ph:.16e}").unwrap();
        }
        out
    }
}

pub fn ground_fraction(populations: &[f64], index: usize) -> f64 {
    let ground: f64 = populations[..NUM_GROUND].iter().sum();
    if ground > 0.0 {
        populations[index] / ground
    } else {
        0.0
    }
}

/// Integrate from `n0` over [0, t_end] with step `dt`, recording every
/// `sample_every` steps and at the final step.
pub fn integrate_rk4(
    matrix: &RateMatrix,
    n0: &[f64],
    dt: f64,
    t_end: f64,
    sample_every: u64,
) -> Result<PopulationTrajectory> {
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(invalid("t_end", format!("must be >= 0, got {t_end}")));
    }
    if sample_every == 0 {
        return Err(invalid("sample_every", "must be >= 1"));
    }
    let mut prop = Rk4Propagator::new(matrix, dt)?;
    let total = (t_end / dt).round() as u64;
    let mut steps: Vec<u64> = (0..=total).step_by(sample_every as usize).collect();
    if *steps.last().unwrap() != total {
        steps.push(total);
    }
    prop.sample_at_steps(n0, &steps)
}

/// Step count closest to time `t` for step `dt`.
pub fn step_index(t: f64, dt: f64) -> u64 {
    (t / dt).round().max(0.0) as u64
}
