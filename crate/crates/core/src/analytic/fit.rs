//! Least-squares fit of `log N ≈ α log X + (b - 1) log log X + c`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::census::CountRow;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitReport {
    pub alpha_hat: f64,
    pub b_hat: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Fits `(X, N)` pairs; points with `N = 0` or `X ≤ e` are skipped.
pub fn fit_exponents(table: &[(f64, f64)]) -> Result<FitReport> {
    let pts: Vec<(f64, f64)> = table
        .iter()
        .copied()
        .filter(|&(x, n)| n > 0.0 && x > std::f64::consts::E)
        .collect();
    if pts.len() < 5 {
        return Err(Error::InvalidInput(format!(
            "need at least 5 grid points with N > 0 and X > e, got {}",
            pts.len()
        )));
    }
    let rows = pts.len();
    let design = DMatrix::from_fn(rows, 3, |i, j| {
        let lx = pts[i].0.ln();
        match j {
            0 => lx,
            1 => lx.ln(),
            _ => 1.0,
        }
    });
    let rhs = DVector::from_iterator(rows, pts.iter().map(|p| p.1.ln()));
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= smax * 1e-12 {
        return Err(Error::InvalidInput("degenerate grid".into()));
    }
    let sol = svd
        .solve(&rhs, 1e-12 * smax)
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(FitReport {
        alpha_hat: sol[0],
        b_hat: sol[1] + 1.0,
        intercept: sol[2],
        points: rows,
    })
}

/// Fits the total or the skew column of a count table.
pub fn fit_count_table(table: &[CountRow], skew: bool) -> Result<FitReport> {
    let pts: Vec<(f64, f64)> = table
        .iter()
        .map(|r| {
            let x = r.x.to_string().parse::<f64>().unwrap_or(f64::INFINITY);
            (x, if skew { r.skew } else { r.total } as f64)
        })
        .collect();
    fit_exponents(&pts)
}
