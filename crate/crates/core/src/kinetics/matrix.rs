use std::collections::BTreeSet;

use nalgebra::DMatrix;

use super::beam::{chi, stimulated_rate, BeamSpec, Transition};
use crate::atomic::{
    enumerate_states, excited_states, ground_states, BranchingTable, NUM_GROUND, NUM_STATES,
};
use crate::constants::AtomConstants;
use crate::error::{invalid, Result};

/// One stimulated coupling g ↔ e contributed by one beam.
#[derive(Debug, Clone, PartialEq)]
pub struct StimulatedTerm {
    pub beam: usize,
    pub transition: Transition,
    pub ground: usize,
    pub excited: usize,
    pub chi: f64,
    pub rate: f64,
}

/// Linear generator R with dN/dt = R N over the 43 sublevel populations.
///
/// Column i holds the flows out of sublevel i; columns sum to zero.
#[derive(Debug, Clone)]
pub struct RateMatrix {
    generator: DMatrix<f64>,
    terms: Vec<StimulatedTerm>,
    gamma: f64,
}

fn add_stimulated(generator: &mut DMatrix<f64>, g: usize, e: usize, w: f64) {
    generator[(e, g)] += w;
    generator[(g, g)] -= w;
    generator[(g, e)] += w;
    generator[(e, e)] -= w;
}

fn spontaneous_generator(gamma: f64) -> DMatrix<f64> {
    let table = BranchingTable::get();
    let mut r = DMatrix::zeros(NUM_STATES, NUM_STATES);
    for k in 0..excited_states().len() {
        let e = NUM_GROUND + k;
        for (g, a) in table.row(k).iter().enumerate() {
            r[(g, e)] += gamma * a;
        }
        r[(e, e)] -= gamma;
    }
    r
}

impl RateMatrix {
    /// Spontaneous decay plus every stimulated coupling of every beam on every
    /// dipole-allowed hyperfine transition.
    pub fn assemble(beams: &[BeamSpec], constants: &AtomConstants) -> Result<Self> {
        for b in beams {
            b.validate()?;
        }
        let table = BranchingTable::get();
        let mut terms = Vec::new();
        for (bi, beam) in beams.iter().enumerate() {
            for transition in Transition::all() {
                let x = chi(transition, beam, constants);
                for (g, gs) in ground_states().iter().enumerate() {
                    if gs.f != transition.ground_f() {
                        continue;
                    }
                    for (k, es) in excited_states().iter().enumerate() {
                        if es.f != transition.excited_f() || (es.m - gs.m).abs() > 1 {
                            continue;
                        }
                        let a = table.by_index(k, g);
                        let rate = stimulated_rate(x, a, es.m - gs.m, beam, constants);
                        if rate > 0.0 {
                            terms.push(StimulatedTerm {
                                beam: bi,
                                transition,
                                ground: g,
                                excited: NUM_GROUND + k,
                                chi: x,
                                rate,
                            });
                        }
                    }
                }
            }
        }
        Ok(Self::from_terms(terms, constants.gamma()))
    }

    fn from_terms(terms: Vec<StimulatedTerm>, gamma: f64) -> Self {
        let mut generator = spontaneous_generator(gamma);
        for t in &terms {
            add_stimulated(&mut generator, t.ground, t.excited, t.rate);
        }
        Self {
            generator,
            terms,
            gamma,
        }
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    pub fn stimulated_terms(&self) -> &[StimulatedTerm] {
        &self.terms
    }

    /// Natural decay rate Γ (rad/s) used for the spontaneous part.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn max_abs(&self) -> f64 {
        self.generator.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Stimulated-only generator, for inspecting what the light alone couples.
    pub fn stimulated_generator(&self) -> DMatrix<f64> {
        let mut r = DMatrix::zeros(NUM_STATES, NUM_STATES);
        for t in &self.terms {
            add_stimulated(&mut r, t.ground, t.excited, t.rate);
        }
        r
    }

    /// Sublevels touched by at least one stimulated term.
    pub fn active_sublevels(&self) -> BTreeSet<usize> {
        self.terms
            .iter()
            .flat_map(|t| [t.ground, t.excited])
            .collect()
    }

    pub fn active_count(&self) -> usize {
        self.active_sublevels().len()
    }

    /// Largest χ among the stimulated terms, 0 when there is no light.
    pub fn max_chi(&self) -> f64 {
        self.terms.iter().fold(0.0_f64, |m, t| m.max(t.chi))
    }

    /// Drop stimulated terms whose χ falls below `threshold` × max χ.
    ///
    /// Returns the reduced matrix and the number of sublevels still coupled by
    /// light. Spontaneous decay is never pruned.
    pub fn prune(&self, threshold: f64) -> Result<(RateMatrix, usize)> {
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(invalid(
                "prune_threshold",
                format!("must lie in (0, 1], got {threshold}"),
            ));
        }
        let cutoff = threshold * self.max_chi();
        let kept: Vec<StimulatedTerm> = self
            .terms
            .iter()
            .filter(|t| t.chi >= cutoff)
            .cloned()
            .collect();
        let pruned = Self::from_terms(kept, self.gamma);
        let active = pruned.active_count();
        Ok((pruned, active))
    }

    /// Column sums, which vanish for a conserving generator.
    pub fn column_sums(&self) -> Vec<f64> {
        (0..NUM_STATES)
            .map(|j| self.generator.column(j).sum())
            .collect()
    }

    /// dN/dt for a population vector.
    pub fn apply(&self, populations: &[f64]) -> Vec<f64> {
        let n = nalgebra::DVector::from_column_slice(populations);
        (&self.generator * n).as_slice().to_vec()
    }
}

/// Labels of the active sublevels, for reports.
pub fn active_labels(matrix: &RateMatrix) -> Vec<String> {
    let states = enumerate_states();
    matrix
        .active_sublevels()
        .into_iter()
        .map(|i| states[i].label())
        .collect()
}
