//! Annulus Green's functions against a finite-difference Laplace solve.
//!
//! The regular part `h(z) = g(z, w) - ln|z - w|` is harmonic with boundary
//! values `-ln|ζ - w|`. In log-polar coordinates `s = ln r` the Laplacian is
//! `r⁻²(∂²_s + ∂²_θ)`, so each angular Fourier mode satisfies
//! `h_k'' = k² h_k`, discretized with second-order differences in `s`.

mod common;

use std::f64::consts::PI;

use bergkern::potential::GreensEvaluator;
use bergkern::{Complex64, PlanarDomain};
use common::c;

const GRID: usize = 161;

/// `h` on the `GRID × GRID` log-polar grid, indexed `[radial][angular]`.
fn fd_regular_part(center: Complex64, inner: f64, outer: f64, w: Complex64) -> Vec<Vec<f64>> {
    let n = GRID;
    let (s0, s1) = (inner.ln(), outer.ln());
    let ds = (s1 - s0) / (n - 1) as f64;
    let theta = |j: usize| 2.0 * PI * j as f64 / n as f64;
    let data = |r: f64| -> Vec<f64> {
        (0..n)
            .map(|j| -(center + Complex64::from_polar(r, theta(j)) - w).norm().ln())
            .collect()
    };
    let dft = |v: &[f64]| -> Vec<Complex64> {
        (0..n)
            .map(|k| {
                v.iter()
                    .enumerate()
                    .map(|(j, x)| x * Complex64::from_polar(1.0, -theta(j) * k as f64))
                    .sum::<Complex64>()
            })
            .collect()
    };
    let (lo, hi) = (dft(&data(inner)), dft(&data(outer)));

    // modes[k][i]: Fourier coefficient k at radial node i
    let mut modes = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for k in 0..n {
        let freq = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        let diag = -2.0 - freq * freq * ds * ds;
        // Thomas algorithm on interior nodes 1..n-1 with unit off-diagonals
        let m = n - 2;
        let mut cp = vec![0.0; m];
        let mut dp = vec![Complex64::new(0.0, 0.0); m];
        for i in 0..m {
            let mut rhs = Complex64::new(0.0, 0.0);
            if i == 0 {
                rhs -= lo[k];
            }
            if i == m - 1 {
                rhs -= hi[k];
            }
            let prev_c = if i == 0 { 0.0 } else { cp[i - 1] };
            let prev_d = if i == 0 { Complex64::new(0.0, 0.0) } else { dp[i - 1] };
            let denom = diag - prev_c;
            cp[i] = 1.0 / denom;
            dp[i] = (rhs - prev_d) / denom;
        }
        let col = &mut modes[k];
        col[0] = lo[k];
        col[n - 1] = hi[k];
        let mut next = Complex64::new(0.0, 0.0);
        for i in (0..m).rev() {
            let x = dp[i] - cp[i] * next;
            col[i + 1] = x;
            next = x;
        }
    }

    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n)
                        .map(|k| modes[k][i] * Complex64::from_polar(1.0, theta(j) * k as f64))
                        .sum::<Complex64>()
                        .re
                        / n as f64
                })
                .collect()
        })
        .collect()
}

fn compare(center: Complex64, inner: f64, outer: f64, w: Complex64) -> f64 {
    let domain = PlanarDomain::annulus(center, inner, outer).unwrap();
    let evaluator = GreensEvaluator::new(&domain).unwrap();
    let h = fd_regular_part(center, inner, outer, w);
    let ds = (outer.ln() - inner.ln()) / (GRID - 1) as f64;
    let mut worst: f64 = 0.0;
    for i in (8..GRID - 8).step_by(8) {
        let r = (inner.ln() + ds * i as f64).exp();
        for j in (0..GRID).step_by(7) {
            let z = center + Complex64::from_polar(r, 2.0 * PI * j as f64 / GRID as f64);
            if (z - w).norm() < 0.05 {
                continue;
            }
            let exact = evaluator.green(z, w).unwrap() - (z - w).norm().ln();
            worst = worst.max((exact - h[i][j]).abs());
        }
    }
    worst
}

#[test]
fn centered_annulus_matches_fd_solve() {
    for w in [c(0.75, 0.0), c(-0.3, 0.6), c(0.1, -0.55)] {
        let err = compare(c(0.0, 0.0), 0.5, 1.0, w);
        assert!(err < 1e-4, "w = {w}: {err:e}");
    }
}

#[test]
fn shifted_annulus_matches_fd_solve() {
    let center = c(0.2, -0.1);
    for w in [center + c(1.0, 0.3), center + c(-0.2, -0.8)] {
        let err = compare(center, 0.6, 1.5, w);
        assert!(err < 1e-4, "w = {w}: {err:e}");
    }
}
