//! Lagged Poincaré plot descriptors.

use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::sqrt;

use crate::error::{Error, Result, Warning};
use crate::stats::{pearson, sd, trapezoid, var};

pub const MAX_LAG: usize = 10;
pub const CURVES: [&str; 6] = ["SD1", "SD2", "SD12", "rho", "P_surf", "SDRR"];
pub const AUC_NAMES: [&str; 6] = ["AUC_SD1", "AUC_SD2", "AUC_SD12", "AUC_rho_RR", "AUC_P_surf", "AUC_SDRR"];

/// Descriptors of the cloud `(x_i, x_{i+m})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagDescriptors {
    pub sd1: f64,
    pub sd2: f64,
    pub sd12: f64,
    pub rho: f64,
    pub surface: f64,
    /// Standard deviation of the `x_i` taking part at this lag.
    pub sdrr: f64,
}

pub fn lag_descriptors(x: &[f64], m: usize, warnings: &mut Vec<Warning>) -> LagDescriptors {
    let n = x.len() - m;
    let a = &x[..n];
    let b = &x[m..];
    let diff: Vec<f64> = a.iter().zip(b).map(|(u, v)| v - u).collect();
    let sum: Vec<f64> = a.iter().zip(b).map(|(u, v)| v + u).collect();
    let sd1 = sqrt(var(&diff) / 2.0);
    let sd2 = sqrt(var(&sum) / 2.0);
    let sd12 = if sd2 > 0.0 {
        sd1 / sd2
    } else {
        warnings.push(Warning::new("lagged_poincare", "SD2 is zero; SD12 set to 0"));
        0.0
    };
    let rho = pearson(a, b).unwrap_or_else(|| {
        warnings.push(Warning::new("lagged_poincare", "zero variance; rho set to 0"));
        0.0
    });
    LagDescriptors { sd1, sd2, sd12, rho, surface: PI * sd1 * sd2, sdrr: sd(a) }
}

/// 60 per-lag values (each curve over lags 1..10) followed by the 6 areas.
pub fn lagged_poincare(x: &[f64], warnings: &mut Vec<Warning>) -> Result<Vec<f64>> {
    if x.len() < 2 * MAX_LAG {
        return Err(Error::InsufficientData { what: "lagged Poincare (intervals)", needed: 2 * MAX_LAG, got: x.len() });
    }
    let mut local = Vec::new();
    let lags: Vec<LagDescriptors> = (1..=MAX_LAG).map(|m| lag_descriptors(x, m, &mut local)).collect();
    if !local.is_empty() {
        // one message per window is enough
        warnings.push(local.swap_remove(0));
    }
    let curves: [Vec<f64>; 6] = [
        lags.iter().map(|d| d.sd1).collect(),
        lags.iter().map(|d| d.sd2).collect(),
        lags.iter().map(|d| d.sd12).collect(),
        lags.iter().map(|d| d.rho).collect(),
        lags.iter().map(|d| d.surface).collect(),
        lags.iter().map(|d| d.sdrr).collect(),
    ];
    let mut out: Vec<f64> = curves.iter().flatten().copied().collect();
    for c in &curves {
        out.push(trapezoid(c, 1.0));
    }
    Ok(out)
}
