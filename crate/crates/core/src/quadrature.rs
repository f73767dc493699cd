//! Gauss-Legendre quadrature nodes and weights.

use crate::legendre::legendre;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Exact for polynomials of degree <= 2n-1. Nodes are found by Newton
/// iteration from the standard Chebyshev-based initial guesses; for the
/// modest n used here (tens of points) this converges in a handful of
/// steps to machine precision.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let p = legendre(n as u32, x);
            let pm1 = legendre(n as u32 - 1, x);
            // derivative: (x^2 - 1) L_n' = n (x L_n - L_{n-1})
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    // Newton starts at the positive end; store ascending for readability.
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}
