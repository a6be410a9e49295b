//! Reference sampler for the GUE Tracy-Widom law via the tridiagonal
//! random-matrix model: standard-normal diagonal, off-diagonal entries
//! chi-distributed with linearly decreasing parameter (the square root of
//! a Gamma(N - k, 1) variable). The largest eigenvalue is extracted by
//! bisection on the Sturm sign-change count and recentred as
//! `(lambda_max - 2 sqrt(N)) N^(1/6)`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};

/// Number of eigenvalues of the symmetric tridiagonal matrix strictly
/// below `x`, by the classic Sturm sequence recurrence.
fn count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0usize;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let denom = if q == 0.0 { 1e-300 } else { q };
        q = diag[i] - x - off[i - 1] * off[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn largest_eigenvalue(diag: &[f64], off: &[f64]) -> f64 {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = off.get(i).copied().unwrap_or(0.0).abs()
            + if i > 0 { off[i - 1].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let tol = 1e-11 * hi.abs().max(1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if count_below(diag, off, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `m` samples of the centred, scaled largest eigenvalue of the
/// `matrix_dim`-dimensional tridiagonal ensemble whose limit law is GUE
/// Tracy-Widom. Deterministic in `seed`.
pub fn tw_reference_sample(m: usize, matrix_dim: usize, seed: u64) -> Result<Vec<f64>> {
    if m == 0 || matrix_dim < 2 {
        return Err(Error::InvalidParameter(
            "need m >= 1 samples and matrix_dim >= 2".into(),
        ));
    }
    let n = matrix_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = 2.0 * (n as f64).sqrt();
    let spread = (n as f64).powf(1.0 / 6.0);

    let gammas: Vec<Gamma<f64>> = (1..n)
        .map(|k| Gamma::new((n - k) as f64, 1.0).expect("valid gamma shape"))
        .collect();

    let mut out = Vec::with_capacity(m);
    let mut diag = vec![0.0f64; n];
    let mut off = vec![0.0f64; n - 1];
    for _ in 0..m {
        for d in diag.iter_mut() {
            *d = rng.sample(StandardNormal);
        }
        for (e, g) in off.iter_mut().zip(&gammas) {
            *e = g.sample(&mut rng).sqrt();
        }
        out.push((largest_eigenvalue(&diag, &off) - center) * spread);
    }
    Ok(out)
}
