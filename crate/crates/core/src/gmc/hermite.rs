/// `H_k(x; σ)` with `H_{k+1} = x H_k − k σ H_{k−1}`, `σ` the variance.
///
/// These are the monic polynomials orthogonal under `N(0, σ)`, with
/// generating function `Σ t^k/k! H_k(x; σ) = e^{t x − σ t²/2}`.
pub fn hermite(k: usize, x: f64, sigma: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if k == 0 {
        return prev;
    }
    for j in 1..k {
        let next = x * cur - j as f64 * sigma * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Partial sum `Σ_{k ≤ kmax} β^k/k! H_k(x; σ)`.
pub fn hermite_series(kmax: usize, beta: f64, x: f64, sigma: f64) -> f64 {
    let mut acc = 0.0;
    let mut coef = 1.0;
    let (mut prev, mut cur) = (1.0, x);
    for k in 0..=kmax {
        let hk = if k == 0 { 1.0 } else { cur };
        if k >= 1 {
            coef *= beta / k as f64;
        }
        acc += coef * hk;
        if k >= 1 {
            let next = x * cur - k as f64 * sigma * prev;
            prev = cur;
            cur = next;
        }
    }
    acc
}
