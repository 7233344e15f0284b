//! Least-angle regression path, recorded as variable entry order.

use alloc::vec;
use alloc::vec::Vec;
use libm::sqrt;

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

/// Entry events of one path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    /// Column indices in order of entry.
    pub order: Vec<usize>,
    /// True if the path ended (saturation or exact fit) before the dummy budget was used.
    pub exhausted: bool,
}

/// Runs LARS on `x` (centred columns) and `y` until `stop_count` columns with
/// index `>= first_dummy` have entered, or the path ends.
///
/// The first entrant maximizes `|xⱼᵀy|`; later entrants are the first to
/// reach equal correlation along the equiangular direction. Exact ties go to
/// the lowest column index. Columns that would make the active Gram matrix
/// singular are skipped for the rest of the path.
pub fn lars_path(x: &Matrix, y: &[f64], first_dummy: usize, stop_count: usize) -> Result<PathRecord> {
    let n = x.nrows();
    let p = x.ncols();
    if y.iter().all(|v| *v == y[0]) {
        return Err(Error::DegenerateSignal("constant response: no path to follow"));
    }
    let mut c = x.tmatvec(y);
    let mut state: Vec<u8> = (0..p).map(|j| if dot(x.col(j), x.col(j)) > 0.0 { 0 } else { 2 }).collect(); // 0 free, 1 active, 2 skipped
    let mut active: Vec<usize> = Vec::new();
    let mut signs: Vec<f64> = Vec::new();
    let cap = n.min(p);
    let mut chol = vec![0.0; cap * cap]; // lower factor, row-major with stride `cap`
    let mut order = Vec::new();
    let mut dummies = 0usize;
    let max_active = n.saturating_sub(1).min(p);

    let mut next = argmax_abs(&c, &state);
    let mut big_c = match next {
        Some(j) => c[j].abs(),
        None => return Ok(PathRecord { order, exhausted: true }),
    };
    loop {
        // admit the pending entrant unless it is collinear with the active set
        if let Some(j) = next.take() {
            let s = if c[j] >= 0.0 { 1.0 } else { -1.0 };
            let k = active.len();
            let xj = x.col(j);
            let mut row: Vec<f64> = active.iter().zip(&signs).map(|(&a, &sa)| s * sa * dot(x.col(a), xj)).collect();
            // forward substitution for the new row of the factor
            for i in 0..k {
                let mut v = row[i];
                for m in 0..i {
                    v -= chol[i * cap + m] * row[m];
                }
                row[i] = v / chol[i * cap + i];
            }
            let gjj = dot(xj, xj);
            let d = gjj - row.iter().map(|v| v * v).sum::<f64>();
            if d <= 1e-10 * gjj || k >= cap {
                state[j] = 2;
            } else {
                for (m, v) in row.iter().enumerate() {
                    chol[k * cap + m] = *v;
                }
                chol[k * cap + k] = sqrt(d);
                active.push(j);
                signs.push(s);
                state[j] = 1;
                order.push(j);
                if j >= first_dummy {
                    dummies += 1;
                    if dummies >= stop_count {
                        return Ok(PathRecord { order, exhausted: false });
                    }
                }
            }
        }
        if active.is_empty() {
            next = argmax_abs(&c, &state);
            match next {
                Some(j) => {
                    big_c = c[j].abs();
                    continue;
                }
                None => return Ok(PathRecord { order, exhausted: true }),
            }
        }
        if active.len() >= max_active || big_c <= 1e-12 {
            return Ok(PathRecord { order, exhausted: true });
        }
        // equiangular direction: G w = 1
        let k = active.len();
        let mut w = vec![1.0; k];
        for i in 0..k {
            let mut v = w[i];
            for m in 0..i {
                v -= chol[i * cap + m] * w[m];
            }
            w[i] = v / chol[i * cap + i];
        }
        for i in (0..k).rev() {
            let mut v = w[i];
            for m in i + 1..k {
                v -= chol[m * cap + i] * w[m];
            }
            w[i] = v / chol[i * cap + i];
        }
        let a_norm = 1.0 / sqrt(w.iter().sum::<f64>());
        let mut u = vec![0.0; n];
        for ((&j, &s), wi) in active.iter().zip(&signs).zip(&w) {
            let coef = s * wi * a_norm;
            for (ui, xv) in u.iter_mut().zip(x.col(j)) {
                *ui += coef * xv;
            }
        }
        let mut gamma = big_c / a_norm;
        let mut entrant = None;
        let mut a = vec![0.0; p];
        for j in 0..p {
            if state[j] != 0 {
                continue;
            }
            let aj = dot(x.col(j), &u);
            a[j] = aj;
            for g in [(big_c - c[j]) / (a_norm - aj), (big_c + c[j]) / (a_norm + aj)] {
                if g > 1e-12 && g < gamma {
                    gamma = g;
                    entrant = Some(j);
                }
            }
        }
        for j in 0..p {
            if state[j] == 0 {
                c[j] -= gamma * a[j];
            }
        }
        for (&j, &s) in active.iter().zip(&signs) {
            c[j] = s * (big_c - gamma * a_norm);
        }
        big_c -= gamma * a_norm;
        match entrant {
            Some(j) => next = Some(j),
            None => return Ok(PathRecord { order, exhausted: true }),
        }
    }
}

fn argmax_abs(c: &[f64], state: &[u8]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (j, v) in c.iter().enumerate() {
        if state[j] == 0 && best.is_none_or(|b| v.abs() > c[b].abs()) {
            best = Some(j);
        }
    }
    best
}
