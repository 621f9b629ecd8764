use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Category `(W_i, Z_j)`, both 1-based: `i` indexes the Friedrichs-angle bin,
/// `j` the normalized-gap bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub primary: usize,
    pub secondary: usize,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{}Z{}", self.primary, self.secondary)
    }
}

impl FromStr for Cell {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("invalid cell {s:?}, expected e.g. W4Z1"));
        let rest = s.trim().strip_prefix('W').ok_or_else(bad)?;
        let (i, j) = rest.split_once('Z').ok_or_else(bad)?;
        Ok(Self { primary: i.parse().map_err(|_| bad())?, secondary: j.parse().map_err(|_| bad())? })
    }
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Experiment layout. Every field has a default, so `{}` is a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CategoryGrid {
    /// Half-open Friedrichs-angle intervals `[lo, hi)`, ascending.
    pub primary_bins: Vec<(f64, f64)>,
    /// Number of equal normalized-gap bins over `[0, 1)`.
    pub secondary_bins: usize,
    pub ambient_dim: usize,
    pub pairs_per_cell: usize,
    pub starts_per_pair: usize,
    pub start_norm: f64,
    pub eps: f64,
    pub max_iter: usize,
    /// Restricts the run to these cells; all cells when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<Cell>>,
}

impl Default for CategoryGrid {
    fn default() -> Self {
        Self {
            primary_bins: vec![(0.0, 0.05), (0.05, 0.1), (0.1, 0.5), (0.5, 1.0)],
            secondary_bins: 5,
            ambient_dim: 30,
            pairs_per_cell: 3,
            starts_per_pair: 5,
            start_norm: 10.0,
            eps: 0.01,
            max_iter: 100_000,
            cells: None,
        }
    }
}

impl CategoryGrid {
    /// Full-size layout: `n = 100`, 5 pairs × 10 starts per cell.
    pub fn full_scale() -> Self {
        Self { ambient_dim: 100, pairs_per_cell: 5, starts_per_pair: 10, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.primary_bins.is_empty() {
            return bad("primary_bins is empty".into());
        }
        let mut prev_hi = 0.0;
        for (k, &(lo, hi)) in self.primary_bins.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi && hi <= FRAC_PI_2) {
                return bad(format!("primary bin {} = [{lo}, {hi}) is not inside [0, π/2]", k + 1));
            }
            if k > 0 && lo < prev_hi {
                return bad(format!("primary bin {} overlaps or precedes its predecessor", k + 1));
            }
            prev_hi = hi;
        }
        for (name, count) in [
            ("secondary_bins", self.secondary_bins),
            ("pairs_per_cell", self.pairs_per_cell),
            ("starts_per_pair", self.starts_per_pair),
            ("max_iter", self.max_iter),
        ] {
            if count == 0 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        if self.ambient_dim < 6 {
            return bad(format!("ambient_dim {} is too small; sampling needs n ≥ 6", self.ambient_dim));
        }
        if !(self.start_norm > 0.0 && self.start_norm.is_finite()) {
            return bad(format!("start_norm must be positive, got {}", self.start_norm));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if let Some(cells) = &self.cells {
            if cells.is_empty() {
                return bad("cells filter is empty".into());
            }
            for c in cells {
                if !(1..=self.primary_bins.len()).contains(&c.primary)
                    || !(1..=self.secondary_bins).contains(&c.secondary)
                {
                    return bad(format!("cell {c} is outside the grid"));
                }
            }
        }
        Ok(())
    }

    /// Cells to run, in (primary, secondary) order.
    pub fn selected_cells(&self) -> Vec<Cell> {
        match &self.cells {
            Some(cells) => {
                let mut cells = cells.clone();
                cells.sort();
                cells.dedup();
                cells
            }
            None => (1..=self.primary_bins.len())
                .flat_map(|primary| (1..=self.secondary_bins).map(move |secondary| Cell { primary, secondary }))
                .collect(),
        }
    }

    pub fn primary_bin(&self, cell: Cell) -> (f64, f64) {
        self.primary_bins[cell.primary - 1]
    }

    /// Normalized-gap interval `[(j-1)/k, j/k)`.
    pub fn gap_bin(&self, cell: Cell) -> (f64, f64) {
        let k = self.secondary_bins as f64;
        ((cell.secondary - 1) as f64 / k, cell.secondary as f64 / k)
    }

    /// Category of measured angles, if any.
    pub fn classify(&self, theta_f: f64, theta_p: f64) -> Option<Cell> {
        if !(theta_p > theta_f) {
            return None;
        }
        let primary = self.primary_bins.iter().position(|&(lo, hi)| lo <= theta_f && theta_f < hi)? + 1;
        let gap = normalized_gap(theta_f, theta_p);
        let secondary = (gap * self.secondary_bins as f64).floor() as usize + 1;
        (secondary <= self.secondary_bins).then_some(Cell { primary, secondary })
    }
}

/// `(θ_p - θ_F) / (π/2 - θ_F)`.
pub(crate) fn normalized_gap(theta_f: f64, theta_p: f64) -> f64 {
    (theta_p - theta_f) / (FRAC_PI_2 - theta_f)
}
