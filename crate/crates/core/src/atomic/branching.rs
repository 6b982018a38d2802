use std::fmt::Write as _;
use std::sync::OnceLock;

use super::wigner::{six_j, three_j};
use super::{excited_states, ground_states, Sublevel, NUM_GROUND};
use crate::error::{Error, Result};

// Doubled angular momenta of the Cs D2 line: J = 1/2, J' = 3/2, I = 7/2.
const TWO_J_GROUND: i32 = 1;
const TWO_J_EXCITED: i32 = 3;
const TWO_I: i32 = 7;

/// Spontaneous-emission branching ratios a(e,F',m' → g,F,m).
///
/// Rows are excited sublevels and columns ground sublevels, both in canonical
/// order. Each row sums to one.
#[derive(Debug, Clone)]
pub struct BranchingTable {
    rows: Vec<[f64; NUM_GROUND]>,
}

/// Unnormalized relative line strength between two sublevels:
/// (2J'+1)(2F+1)(2F'+1) {J J' 1; F' F I}² (F 1 F'; m q −m')².
fn line_strength(excited: &Sublevel, ground: &Sublevel) -> f64 {
    let q = excited.m - ground.m;
    if q.abs() > 1 || (excited.f - ground.f).abs() > 1 {
        return 0.0;
    }
    let sj = six_j(
        TWO_J_GROUND,
        TWO_J_EXCITED,
        2,
        2 * excited.f,
        2 * ground.f,
        TWO_I,
    );
    let tj = three_j(
        2 * ground.f,
        2,
        2 * excited.f,
        2 * ground.m,
        2 * q,
        -2 * excited.m,
    );
    ((TWO_J_EXCITED + 1) * (2 * ground.f + 1) * (2 * excited.f + 1)) as f64 * (sj * tj).powi(2)
}

impl BranchingTable {
    fn compute() -> Self {
        let rows = excited_states()
            .iter()
            .map(|e| {
                let mut row = [0.0; NUM_GROUND];
                for (j, g) in ground_states().iter().enumerate() {
                    row[j] = line_strength(e, g);
                }
                let total: f64 = row.iter().sum();
                row.iter_mut().for_each(|a| *a /= total);
                row
            })
            .collect();
        Self { rows }
    }

    /// Shared table, computed on first use.
    pub fn get() -> &'static BranchingTable {
        static TABLE: OnceLock<BranchingTable> = OnceLock::new();
        TABLE.get_or_init(Self::compute)
    }

    /// Row of branching ratios for excited index `k` (0-based within the excited manifold).
    pub fn row(&self, k: usize) -> &[f64; NUM_GROUND] {
        &self.rows[k]
    }

    /// a(e → g) by manifold-local indices.
    pub fn by_index(&self, excited: usize, ground: usize) -> f64 {
        self.rows[excited][ground]
    }

    pub fn ratio(&self, from: &Sublevel, to: &Sublevel) -> Result<f64> {
        if !from.is_excited() {
            return Err(Error::WrongManifold {
                expected: "excited",
                got: *from,
            });
        }
        if !to.is_ground() {
            return Err(Error::WrongManifold {
                expected: "ground",
                got: *to,
            });
        }
        let e = from.try_index()? - NUM_GROUND;
        let g = to.try_index()?;
        Ok(self.rows[e][g])
    }

    /// One row per excited sublevel, header row with ground labels.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("excited");
        for g in ground_states() {
            write!(out, ", {}", g.label()).unwrap();
        }
        out.push('\n');
        for (e, row) in excited_states().iter().zip(&self.rows) {
            out.push_str(&e.label());
            for a in row {
                write!(out, ", {a:.17e}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// a(e,F',m' → g,F,m) from the shared table.
pub fn branching_ratio(from: &Sublevel, to: &Sublevel) -> Result<f64> {
    BranchingTable::get().ratio(from, to)
}
