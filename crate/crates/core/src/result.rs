//! Solver output shared by the annealer, the dual baseline and the
//! brute-force oracle.

use std::io::Write;

use crate::capacity::FeasibilityReport;
use crate::error::Result;
use crate::model::PowerVector;

/// One annealing step as recorded in the iteration trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    /// Temperature-step index t.
    pub iter: usize,
    /// Temperature at this step.
    pub temperature: f64,
    /// Capacity of the current solution after the step.
    pub capacity: f64,
    /// Whether the candidate of this step was accepted.
    pub accepted: bool,
}

/// Final allocation with its objective value, constraint report and
/// bookkeeping counters.
///
/// `evals` counts each solver's dominant unit of work: candidate
/// allocations evaluated for the annealer and the brute-force oracle,
/// per-subcarrier closed-form water-fill evaluations for the dual solver.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationResult {
    pub powers: PowerVector,
    /// Total spectral efficiency of `powers` in bits/s/Hz.
    pub capacity: f64,
    pub feasibility: FeasibilityReport,
    /// Iteration trace; empty for the non-iterative solvers.
    pub trace: Vec<TracePoint>,
    pub evals: u64,
    /// Dual solver only: whether the inner interference fixed point
    /// converged at the returned multipliers.
    pub fixed_point_converged: Option<bool>,
    /// Dual solver only: the (mu, lambda) pair behind the allocation.
    pub multipliers: Option<(f64, f64)>,
}

impl AllocationResult {
    /// Write the iteration trace as CSV with columns
    /// `t,temperature,energy,capacity,accepted` (energy = -capacity).
    pub fn write_trace_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "t,temperature,energy,capacity,accepted")?;
        for p in &self.trace {
            writeln!(
                w,
                "{},{},{},{},{}",
                p.iter, p.temperature, -p.capacity, p.capacity, p.accepted as u8
            )?;
        }
        Ok(())
    }
}
