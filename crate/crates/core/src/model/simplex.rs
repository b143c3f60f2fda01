/// Euclidean projection onto `{w : w >= 0, Σw = 1}` by sorting and
/// thresholding.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    assert!(!v.is_empty(), "projection of an empty vector");
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    let mut w: Vec<f64> = v.iter().map(|&x| (x - theta).max(0.0)).collect();
    // Renormalize away the rounding left by the threshold.
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= sum);
    w
}
