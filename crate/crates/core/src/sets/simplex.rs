//! Sort-and-threshold projection onto the scaled simplex `{w >= 0, sum w = radius}`.

/// Projects `values` onto `{w >= 0, sum(w) = radius}`.
///
/// Entries are shifted by their maximum before thresholding so that the
/// running sums stay on the scale of `radius` even when the input is huge.
/// The shift is exact for every entry that ends up in the support.
pub(crate) fn project_scaled_simplex(values: &[f64], radius: f64) -> Vec<f64> {
    debug_assert!(!values.is_empty() && radius > 0.0);
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = values.iter().map(|v| v - top).collect();

    let mut sorted = shifted.clone();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));

    let mut cumulative = 0.0;
    let mut threshold = sorted[0] - radius;
    for (j, &value) in sorted.iter().enumerate() {
        cumulative += value;
        let candidate = (cumulative - radius) / (j + 1) as f64;
        if value - candidate > 0.0 {
            threshold = candidate;
        } else {
            break;
        }
    }
    shifted.iter().map(|v| (v - threshold).max(0.0)).collect()
}
