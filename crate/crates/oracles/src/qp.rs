//! Dense convex reference for the electrodermal decomposition.

/// Optimal objective of the decomposition QP with the driver expressed
/// through the inverse AR filter. Variables are (q0, q1, p_2.., drift,
/// spline) with p >= 0, solved by accelerated projected gradient with
/// adaptive restart after diagonal rescaling. `ar` holds the AR(2)
/// coefficients `[a0, a1, a2]` of the impulse response.
pub fn cvxeda_objective(y: &[f64], ar: [f64; 3], spline: &[Vec<f64>], alpha: f64, gamma: f64, iters: usize) -> f64 {
    let n = y.len();
    let mut border: Vec<Vec<f64>> = vec![vec![1.0; n], (1..=n).map(|i| i as f64 / n as f64).collect()];
    border.extend(spline.iter().cloned());
    let k = border.len();
    let nv = n + k;
    // columns of F: q = T z for the first n variables, then M q; border columns as is
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(nv);
    for j in 0..n {
        let mut q = vec![0.0; n];
        for i in 0..n {
            q[i] = if i < 2 {
                if i == j {
                    1.0
                } else {
                    0.0
                }
            } else {
                let pi = if i == j { 1.0 } else { 0.0 };
                (pi - ar[1] * q[i - 1] - ar[2] * q[i - 2]) / ar[0]
            };
        }
        let mut mq = vec![0.0; n];
        for i in 2..n {
            mq[i] = q[i] + 2.0 * q[i - 1] + q[i - 2];
        }
        cols.push(mq);
    }
    cols.extend(border);
    let ridge = |j: usize| if j >= n + 2 { gamma } else { 0.0 };
    let scale: Vec<f64> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| 1.0 / (c.iter().map(|v| v * v).sum::<f64>() + ridge(j)).sqrt().max(1e-300))
        .collect();
    for (c, s) in cols.iter_mut().zip(&scale) {
        for v in c.iter_mut() {
            *v *= s;
        }
    }
    let lin = |j: usize| if (2..n).contains(&j) { alpha * scale[j] } else { 0.0 };
    let fx = |z: &[f64]| -> Vec<f64> {
        let mut r = vec![0.0; n];
        for (c, zj) in cols.iter().zip(z) {
            if *zj != 0.0 {
                for (ri, ci) in r.iter_mut().zip(c) {
                    *ri += zj * ci;
                }
            }
        }
        r
    };
    let grad = |z: &[f64]| -> Vec<f64> {
        let mut r = fx(z);
        for (ri, yi) in r.iter_mut().zip(y) {
            *ri -= yi;
        }
        (0..nv)
            .map(|j| {
                cols[j].iter().zip(&r).map(|(a, b)| a * b).sum::<f64>() + ridge(j) * scale[j] * scale[j] * z[j] + lin(j)
            })
            .collect()
    };
    let objective = |z: &[f64]| -> f64 {
        let r = fx(z);
        0.5 * r.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
            + (0..nv).map(|j| lin(j) * z[j] + 0.5 * ridge(j) * scale[j] * scale[j] * z[j] * z[j]).sum::<f64>()
    };
    // Lipschitz constant by power iteration on the Hessian
    let mut v = vec![1.0; nv];
    let mut lip = 0.0;
    for _ in 0..200 {
        let fv = fx(&v);
        let hv: Vec<f64> = (0..nv)
            .map(|j| cols[j].iter().zip(&fv).map(|(a, b)| a * b).sum::<f64>() + ridge(j) * scale[j] * scale[j] * v[j])
            .collect();
        lip = hv.iter().map(|x| x * x).sum::<f64>().sqrt();
        v = hv.iter().map(|x| x / lip).collect();
    }
    let step = 1.0 / (1.01 * lip);
    let project = |z: &mut [f64]| {
        for zj in z[2..n].iter_mut() {
            *zj = zj.max(0.0);
        }
    };
    let mut x = vec![0.0; nv];
    let mut yk = x.clone();
    let mut t = 1.0f64;
    let mut best = objective(&x);
    for _ in 0..iters {
        let g = grad(&yk);
        let mut xn: Vec<f64> = yk.iter().zip(&g).map(|(a, b)| a - step * b).collect();
        project(&mut xn);
        let tn = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let fn_ = objective(&xn);
        if fn_ > best {
            // adaptive restart
            t = 1.0;
            yk = x.clone();
            continue;
        }
        best = fn_;
        yk = xn.iter().zip(&x).map(|(a, b)| a + (t - 1.0) / tn * (a - b)).collect();
        x = xn;
        t = tn;
    }
    best + 0.0 * lip
}
