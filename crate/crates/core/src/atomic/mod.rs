//! Cesium D2 sublevel state space, spontaneous-emission branching ratios and
//! ground-state Zeeman line positions.

mod branching;
pub mod wigner;
mod zeeman;

use std::fmt;
use std::sync::OnceLock;

pub use branching::{branching_ratio, BranchingTable};
pub use zeeman::{raman_line_offset, ZeemanParams};

use crate::error::{Error, Result};

/// Hyperfine levels present in the model, per manifold.
pub const GROUND_F: [i32; 2] = [3, 4];
pub const EXCITED_F: [i32; 3] = [3, 4, 5];

pub const NUM_STATES: usize = 43;
pub const NUM_GROUND: usize = 16;
pub const NUM_EXCITED: usize = 27;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Manifold {
    /// 6S1/2
    Ground,
    /// 6P3/2
    Excited,
}

impl Manifold {
    fn tag(self) -> char {
        match self {
            Manifold::Ground => 'g',
            Manifold::Excited => 'e',
        }
    }

    fn levels(self) -> &'static [i32] {
        match self {
            Manifold::Ground => &GROUND_F,
            Manifold::Excited => &EXCITED_F,
        }
    }
}

/// One Zeeman sublevel {s, F, m_F}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sublevel {
    pub manifold: Manifold,
    pub f: i32,
    pub m: i32,
}

impl Sublevel {
    pub const fn ground(f: i32, m: i32) -> Self {
        Self {
            manifold: Manifold::Ground,
            f,
            m,
        }
    }

    pub const fn excited(f: i32, m: i32) -> Self {
        Self {
            manifold: Manifold::Excited,
            f,
            m,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.manifold == Manifold::Ground
    }

    pub fn is_excited(&self) -> bool {
        self.manifold == Manifold::Excited
    }

    /// Dense index into population vectors, or `None` outside the state space.
    pub fn index(&self) -> Option<usize> {
        if self.m.abs() > self.f {
            return None;
        }
        let mut offset = match self.manifold {
            Manifold::Ground => 0,
            Manifold::Excited => NUM_GROUND,
        };
        for &f in self.manifold.levels() {
            if f == self.f {
                return Some(offset + (self.m + f) as usize);
            }
            offset += (2 * f + 1) as usize;
        }
        None
    }

    pub fn try_index(&self) -> Result<usize> {
        self.index().ok_or(Error::UnknownSublevel(*self))
    }

    /// Short label used in CSV headers, e.g. `g4_m0` or `e5_m-5`.
    pub fn label(&self) -> String {
        format!("{}{}_m{}", self.manifold.tag(), self.f, self.m)
    }
}

impl std::str::FromStr for Sublevel {
    type Err = Error;

    /// Inverse of [`Sublevel::label`]; the sublevel must exist.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            crate::error::invalid(
                "sublevel",
                format!("cannot parse `{s}`, expected e.g. `g4_m0`"),
            )
        };
        let (head, m) = s.trim().split_once("_m").ok_or_else(bad)?;
        let mut chars = head.chars();
        let manifold = match chars.next() {
            Some('g') => Manifold::Ground,
            Some('e') => Manifold::Excited,
            _ => return Err(bad()),
        };
        let f: i32 = chars.as_str().parse().map_err(|_| bad())?;
        let m: i32 = m.parse().map_err(|_| bad())?;
        let level = Sublevel { manifold, f, m };
        level.try_index()?;
        Ok(level)
    }
}

impl fmt::Display for Sublevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},F={},m={})", self.manifold.tag(), self.f, self.m)
    }
}

/// Canonical ordering: ground F=3, F=4, then excited F'=3, 4, 5, each with
/// m_F ascending.
pub fn enumerate_states() -> &'static [Sublevel] {
    static STATES: OnceLock<Vec<Sublevel>> = OnceLock::new();
    STATES.get_or_init(|| {
        let mut v = Vec::with_capacity(NUM_STATES);
        for manifold in [Manifold::Ground, Manifold::Excited] {
            for &f in manifold.levels() {
                for m in -f..=f {
                    v.push(Sublevel { manifold, f, m });
                }
            }
        }
        v
    })
}

pub fn ground_states() -> &'static [Sublevel] {
    &enumerate_states()[..NUM_GROUND]
}

pub fn excited_states() -> &'static [Sublevel] {
    &enumerate_states()[NUM_GROUND..]
}

/// Index of the magnetically insensitive target sublevel (g, F=4, m=0).
pub fn dark_state_index() -> usize {
    Sublevel::ground(4, 0).index().unwrap()
}
