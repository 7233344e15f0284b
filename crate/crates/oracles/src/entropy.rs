/// Matching template pairs `(B, A)` for lengths `m` and `m + 1`, counted
/// over every pair with nested loops.
pub fn sample_entropy_counts(x: &[f64], m: usize, r: f64) -> (u64, u64) {
    let n = x.len();
    let matches = |len: usize| -> u64 {
        let mut c = 0;
        for i in 0..n - m {
            for j in 0..n - m {
                if i >= j {
                    continue;
                }
                if (0..len).all(|k| (x[i + k] - x[j + k]).abs() <= r) {
                    c += 1;
                }
            }
        }
        c
    };
    (matches(m), matches(m + 1))
}

/// `None` when either match count is zero.
pub fn sample_entropy(x: &[f64], m: usize, r: f64) -> Option<f64> {
    let (b, a) = sample_entropy_counts(x, m, r);
    if a == 0 || b == 0 {
        None
    } else {
        Some(-(a as f64 / b as f64).ln())
    }
}

pub fn sample_sd(x: &[f64]) -> f64 {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}
