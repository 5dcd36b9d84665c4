//! Sample statistics for Monte-Carlo estimates.

/// z-value for a two-sided 95% normal interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Mean and 95% half-width from a sample of observations.
pub fn mean_ci95(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, f64::INFINITY);
    }
    let mean = crate::numeric::pairwise_sum(values) / n as f64;
    if n == 1 {
        return (mean, f64::INFINITY);
    }
    let ss: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = crate::numeric::pairwise_sum(&ss) / (n - 1) as f64;
    (mean, Z95 * (var / n as f64).sqrt())
}
