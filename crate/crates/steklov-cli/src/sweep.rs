//! Offset sweeps: one converged solve per grid point, bounds and the
//! eigenvalue derivative alongside, deterministic CSV output.

use rayon::prelude::*;
use std::io::{self, Write};

use steklov_core::analysis::{bounds_report, shape_derivative};
use steklov_core::spectral::{finite_section, smallest_eigpair, solve_first_eigenvalue};
use steklov_core::{eigenfunction, Annulus, Error};

use crate::format::sig12;

/// CSV header, fixed by contract.
pub const CSV_HEADER: &str =
    "r1,r2,t,t_frac,n_final,sigma,last_delta,upper_M,concentric,liminf_lower,dsigma_dt";

/// Grid description of a sweep over `t/(r2 - r1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub r1: f64,
    pub r2: f64,
    pub t_frac_start: f64,
    pub t_frac_end: f64,
    pub steps: usize,
    pub tol: f64,
    pub n_max: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.r1.is_finite() && self.r2.is_finite() && 0.0 < self.r1 && self.r1 < self.r2) {
            return Err(format!("invalid radii r1={}, r2={}", self.r1, self.r2));
        }
        if !(0.0 <= self.t_frac_start
            && self.t_frac_start <= self.t_frac_end
            && self.t_frac_end < 1.0)
        {
            return Err(format!(
                "offset fractions must satisfy 0 <= start <= end < 1, got [{}, {}]",
                self.t_frac_start, self.t_frac_end
            ));
        }
        if self.steps == 0 {
            return Err("steps must be at least 1".to_string());
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(format!("tolerance must be positive, got {}", self.tol));
        }
        Ok(())
    }

    /// Evenly spaced offset fractions, ascending.
    pub fn grid(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.t_frac_start];
        }
        let span = self.t_frac_end - self.t_frac_start;
        (0..self.steps)
            .map(|i| self.t_frac_start + span * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

/// One solved grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub r1: f64,
    pub r2: f64,
    pub t: f64,
    pub t_frac: f64,
    pub n_final: usize,
    pub sigma: f64,
    pub last_delta: f64,
    pub upper_m: f64,
    pub concentric: f64,
    pub liminf_lower: f64,
    pub dsigma_dt: f64,
}

/// Solves one grid point: converged eigenvalue, bounds, derivative.
pub fn compute_row(spec: &SweepSpec, t_frac: f64) -> Result<SweepRow, Error> {
    let t = t_frac * (spec.r2 - spec.r1);
    let annulus = Annulus::new(spec.r1, spec.r2, t)?;
    let bounds = bounds_report(&annulus);
    let converged = solve_first_eigenvalue(&annulus, spec.tol, spec.n_max)?;
    let (last_delta, dsigma_dt) = if annulus.is_concentric() {
        // The eigenvalue is even in the offset, so its derivative vanishes
        // at the symmetric configuration.
        (0.0, 0.0)
    } else {
        let frame = annulus.bipolar_frame()?;
        let eig = smallest_eigpair(&finite_section(&frame, converged.n_final))?;
        let series = eigenfunction::series_from_eigvec(&frame, &eig)?.normalize()?;
        let delta = converged
            .history
            .last()
            .and_then(|step| step.delta)
            .unwrap_or(0.0);
        (delta, shape_derivative(&series)?)
    };
    Ok(SweepRow {
        r1: spec.r1,
        r2: spec.r2,
        t,
        t_frac,
        n_final: converged.n_final,
        sigma: converged.sigma,
        last_delta,
        upper_m: bounds.upper_m,
        concentric: bounds.concentric,
        liminf_lower: bounds.liminf_lower,
        dsigma_dt,
    })
}

/// Runs the sweep, optionally across the rayon worker pool. Results come
/// back in grid order either way.
pub fn run(spec: &SweepSpec, parallel: bool) -> Vec<(f64, Result<SweepRow, Error>)> {
    let grid = spec.grid();
    if parallel {
        grid.par_iter()
            .map(|&frac| (frac, compute_row(spec, frac)))
            .collect()
    } else {
        grid.iter()
            .map(|&frac| (frac, compute_row(spec, frac)))
            .collect()
    }
}

/// Serializes one row with the fixed 12-significant-digit format.
pub fn csv_line(row: &SweepRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        sig12(row.r1),
        sig12(row.r2),
        sig12(row.t),
        sig12(row.t_frac),
        row.n_final,
        sig12(row.sigma),
        sig12(row.last_delta),
        sig12(row.upper_m),
        sig12(row.concentric),
        sig12(row.liminf_lower),
        sig12(row.dsigma_dt),
    )
}

/// Writes header plus rows with `\n` endings.
pub fn write_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> io::Result<()> {
    out.write_all(CSV_HEADER.as_bytes())?;
    out.write_all(b"\n")?;
    for row in rows {
        out.write_all(csv_line(row).as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Number of adjacent pairs where sigma fails to decrease.
pub fn adjacent_increases(rows: &[SweepRow]) -> usize {
    rows.windows(2)
        .filter(|pair| pair[1].sigma >= pair[0].sigma)
        .count()
}
