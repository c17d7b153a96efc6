//! Per-iteration run traces.

use std::fmt::Write as _;

/// CSV header written by [`RunTrace::to_csv`].
pub const TRACE_CSV_HEADER: &str = "iteration,energy,committed,changed";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    /// Augmented energy after the iteration.
    pub energy: f64,
    pub committed: usize,
    pub changed: usize,
}

/// Row 0 is the starting state; row `k` follows iteration `k`.
///
/// Only iterations that changed something get a row, apart from row 0.
/// `steps` counts every executed iteration, including the final one that
/// detected convergence.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace {
    pub rows: Vec<TraceRow>,
    pub steps: usize,
}

impl RunTrace {
    pub fn starting_at(energy: f64, committed: usize) -> Self {
        Self {
            rows: vec![TraceRow {
                iteration: 0,
                energy,
                committed,
                changed: 0,
            }],
            steps: 0,
        }
    }

    pub fn push(&mut self, energy: f64, committed: usize, changed: usize) {
        let iteration = self.rows.len();
        self.rows.push(TraceRow {
            iteration,
            energy,
            committed,
            changed,
        });
    }

    /// Number of iterations recorded after the starting row.
    pub fn iterations(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn final_energy(&self) -> Option<f64> {
        self.rows.last().map(|r| r.energy)
    }

    /// Energies use the shortest decimal that round-trips.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * (self.rows.len() + 1));
        out.push_str(TRACE_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.iteration, r.energy, r.committed, r.changed);
        }
        out
    }
}
