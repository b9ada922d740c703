//! Finite-difference derivatives on arbitrary grids.

use crate::error::{Error, Result};

/// Weights `c` with `f'(x0) ≈ Σ c[i] f(xs[i])`, by Fornberg's recursion.
pub fn first_derivative_weights(x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    // c[j][k]: weight of node j for derivative k.
    let mut c = vec![[0.0_f64; 2]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|w| w[1]).collect()
}

/// First derivative of sampled data at every node, using centered stencils
/// of up to `width` points (shifted inward at the ends).
pub fn derivative(xs: &[f64], ys: &[f64], width: usize) -> Result<Vec<f64>> {
    let n = xs.len();
    if n < 3 || ys.len() != n {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: n.min(ys.len()),
        });
    }
    if let Some(i) = xs.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::NonMonotoneGrid { index: i + 1 });
    }
    let w = width.clamp(3, n);
    let half = w / 2;
    Ok((0..n)
        .map(|i| {
            let start = i.saturating_sub(half).min(n - w);
            let nodes = &xs[start..start + w];
            first_derivative_weights(xs[i], nodes)
                .iter()
                .zip(&ys[start..start + w])
                .map(|(c, y)| c * y)
                .sum()
        })
        .collect())
}
