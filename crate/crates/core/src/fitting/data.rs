use std::path::Path;

use crate::atomic::Sublevel;
use crate::error::{Error, Result};

/// Observed population fraction of one ground sublevel over time.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSeries {
    pub level: Sublevel,
    pub times: Vec<f64>,
    /// Population of `level` over all ground-state atoms.
    pub fractions: Vec<f64>,
    pub weights: Option<Vec<f64>>,
}

impl ObservationSeries {
    pub fn new(
        level: Sublevel,
        times: Vec<f64>,
        fractions: Vec<f64>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::Data(format!("{level}: {msg}")));
        if !level.is_ground() || level.try_index().is_err() {
            return bad("observable must be a ground sublevel".into());
        }
        if times.is_empty() {
            return bad("empty series".into());
        }
        if times.len() != fractions.len() {
            return bad("times and fractions differ in length".into());
        }
        if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
            return bad("times must be finite and nonnegative".into());
        }
        if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
            return bad(format!("times not strictly increasing at point {}", i + 2));
        }
        if let Some(i) = fractions.iter().position(|f| !(0.0..=1.0).contains(f)) {
            return bad(format!(
                "fraction {} at point {} outside [0, 1]",
                fractions[i],
                i + 1
            ));
        }
        if let Some(w) = &weights {
            if w.len() != times.len() {
                return bad("weights and times differ in length".into());
            }
            if w.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                return bad("weights must be finite and nonnegative".into());
            }
        }
        Ok(Self {
            level,
            times,
            fractions,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }

    /// Parse `time_s, fraction[, weight]` rows. Blank lines and `#` comments
    /// are skipped; a header row starting with a letter is allowed first.
    pub fn parse(text: &str, level: Sublevel, source: &str) -> Result<Self> {
        let mut times = Vec::new();
        let mut fractions = Vec::new();
        let mut weights = Vec::new();
        let mut weighted: Option<bool> = None;
        let mut seen_data = false;
        for (lineno, raw) in text.lines().enumerate() {
            let at = |msg: &str| Error::Data(format!("{source}:{}: {msg}", lineno + 1));
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if !seen_data && line.starts_with(|c: char| c.is_ascii_alphabetic()) {
                continue;
            }
            seen_data = true;
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if !(2..=3).contains(&fields.len()) {
                return Err(at(&format!(
                    "expected 2 or 3 fields, found {}",
                    fields.len()
                )));
            }
            let num = |s: &str, what: &str| {
                s.parse::<f64>()
                    .map_err(|_| at(&format!("invalid {what} `{s}`")))
            };
            times.push(num(fields[0], "time")?);
            fractions.push(num(fields[1], "fraction")?);
            let has_weight = fields.len() == 3;
            match weighted {
                None => weighted = Some(has_weight),
                Some(w) if w != has_weight => return Err(at("inconsistent number of fields")),
                _ => {}
            }
            if has_weight {
                weights.push(num(fields[2], "weight")?);
            }
        }
        Self::new(
            level,
            times,
            fractions,
            weighted.unwrap_or(false).then_some(weights),
        )
        .map_err(|e| Error::Data(format!("{source}: {e}")))
    }

    pub fn load(path: &Path, level: Sublevel) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        Self::parse(&text, level, &path.display().to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const M0: Sublevel = Sublevel::ground(4, 0);

    #[test]
    fn parses_comments_header_and_weights() {
        let text = "# run 3\ntime_s, fraction, weight\n0.0, 0.11, 1\n\n1e-4, 0.2, 0.5 # late\n";
        let s = ObservationSeries::parse(text, M0, "a.csv").unwrap();
        assert_eq!(s.times, vec![0.0, 1e-4]);
        assert_eq!(s.weights, Some(vec![1.0, 0.5]));
        assert_eq!(s.weight(1), 0.5);
    }

    #[test]
    fn unweighted_defaults_to_one() {
        let s = ObservationSeries::parse("0,0.1\n1,0.2\n", M0, "x").unwrap();
        assert!(s.weights.is_none());
        assert_eq!(s.weight(0), 1.0);
    }

    #[test]
    fn errors_name_file_and_line() {
        let e = ObservationSeries::parse("0,0.1\n1,abc\n", M0, "obs.csv").unwrap_err();
        assert!(e.to_string().contains("obs.csv:2"), "{e}");
        let e = ObservationSeries::parse("0,0.1\n1,0.2,3\n", M0, "obs.csv").unwrap_err();
        assert!(e.to_string().contains("obs.csv:2"), "{e}");
    }

    #[test]
    fn invariants_enforced() {
        assert!(ObservationSeries::parse("", M0, "e").is_err());
        assert!(ObservationSeries::parse("1,0.1\n0,0.2\n", M0, "e").is_err());
        assert!(ObservationSeries::parse("0,1.2\n", M0, "e").is_err());
        assert!(
            ObservationSeries::new(Sublevel::excited(5, 0), vec![0.0], vec![0.1], None).is_err()
        );
        assert!(ObservationSeries::new(M0, vec![0.0], vec![0.1], Some(vec![-1.0])).is_err());
    }
}
