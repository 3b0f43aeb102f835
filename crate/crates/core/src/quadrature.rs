//! Gauss-Legendre rules and local polynomial weights.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Newton on P_n starting from the Chebyshev-like guess
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Lagrange basis values at `s` for integer nodes `offsets`.
pub fn lagrange_basis(offsets: &[i32], s: f64) -> Vec<f64> {
    offsets
        .iter()
        .map(|&a| {
            offsets
                .iter()
                .filter(|&&b| b != a)
                .map(|&b| (s - b as f64) / (a - b) as f64)
                .product()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre_unit(6);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        for deg in 0..12 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            assert!((q - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn lagrange_partition_of_unity() {
        let offs = [-2, -1, 0, 1, 2, 3];
        for s in [0.0, 0.3, 0.77, 1.0] {
            let b = lagrange_basis(&offs, s);
            assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
        let b = lagrange_basis(&offs, 1.0);
        assert!((b[3] - 1.0).abs() < 1e-15);
    }
}
