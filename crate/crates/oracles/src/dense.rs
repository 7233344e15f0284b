//! Dense-matrix references for the mixed model.

/// Dense Gauss-Jordan inverse and log-determinant of an SPD matrix.
pub fn inverse_logdet(a: &[Vec<f64>]) -> (Vec<Vec<f64>>, f64) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut logdet = 0.0;
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, piv);
        inv.swap(c, piv);
        let d = m[c][c];
        logdet += d.abs().ln();
        for j in 0..n {
            m[c][j] /= d;
            inv[c][j] /= d;
        }
        for i in 0..n {
            if i != c {
                let f = m[i][c];
                if f != 0.0 {
                    for j in 0..n {
                        m[i][j] -= f * m[c][j];
                        inv[i][j] -= f * inv[c][j];
                    }
                }
            }
        }
    }
    (inv, logdet)
}

/// Brute-force REML deviance from dense matrices: returns (deviance, β, σ²).
pub fn reml_deviance(y: &[f64], x: &[Vec<f64>], groups: &[usize], lambda: f64) -> (f64, Vec<f64>, f64) {
    let n = y.len();
    let p = x.len();
    let v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as u8 as f64 + if groups[i] == groups[j] { lambda } else { 0.0 }).collect())
        .collect();
    let (vi, logdet_v) = inverse_logdet(&v);
    let vix: Vec<Vec<f64>> =
        x.iter().map(|c| (0..n).map(|i| (0..n).map(|j| vi[i][j] * c[j]).sum()).collect()).collect();
    let a: Vec<Vec<f64>> =
        (0..p).map(|r| (0..p).map(|c| (0..n).map(|i| x[r][i] * vix[c][i]).sum()).collect()).collect();
    let b: Vec<f64> = (0..p).map(|r| (0..n).map(|i| vix[r][i] * y[i]).sum()).collect();
    let (ai, logdet_a) = inverse_logdet(&a);
    let beta: Vec<f64> = (0..p).map(|r| (0..p).map(|c| ai[r][c] * b[c]).sum()).collect();
    let r: Vec<f64> = (0..n).map(|i| y[i] - (0..p).map(|c| x[c][i] * beta[c]).sum::<f64>()).collect();
    let rss: f64 = (0..n).map(|i| (0..n).map(|j| r[i] * vi[i][j] * r[j]).sum::<f64>()).sum();
    let dof = (n - p) as f64;
    let s2 = rss / dof;
    (dof * (1.0 + (2.0 * std::f64::consts::PI * s2).ln()) + logdet_v + logdet_a, beta, s2)
}

/// Least squares via the normal equations.
pub fn ols(cols: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let p = cols.len();
    let a: Vec<Vec<f64>> =
        (0..p).map(|r| (0..p).map(|c| cols[r].iter().zip(&cols[c]).map(|(a, b)| a * b).sum()).collect()).collect();
    let (ai, _) = inverse_logdet(&a);
    let b: Vec<f64> = (0..p).map(|r| cols[r].iter().zip(y).map(|(a, b)| a * b).sum()).collect();
    (0..p).map(|r| (0..p).map(|c| ai[r][c] * b[c]).sum()).collect()
}
