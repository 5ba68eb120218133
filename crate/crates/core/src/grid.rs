//! Sample grids for inequality scans.

/// `n` points strictly inside `(lo, hi)`, clustered near both endpoints.
///
/// Half the points are uniform; a quarter on each side approach the endpoint
/// geometrically, down to an offset of `1e-6 * (hi - lo)`. Output is sorted.
pub fn clustered(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(hi > lo, "empty interval [{lo}, {hi}]");
    let w = hi - lo;
    let n_edge = n / 4;
    let n_mid = n - 2 * n_edge;
    let mut pts = Vec::with_capacity(n);
    for i in 0..n_mid {
        pts.push(lo + w * (i as f64 + 0.5) / n_mid as f64);
    }
    let (d_min, d_max) = (1e-6f64, 0.1f64);
    for i in 0..n_edge {
        let s = if n_edge > 1 {
            i as f64 / (n_edge - 1) as f64
        } else {
            0.0
        };
        let off = w * d_min * (d_max / d_min).powf(s);
        pts.push(lo + off);
        pts.push(hi - off);
    }
    pts.sort_by(f64::total_cmp);
    pts
}

/// `n` points on `[lo, hi]`, endpoints included.
pub fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}
