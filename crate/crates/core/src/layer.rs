//! Flattened boundary samples and a double-layer Dirichlet solver for
//! multiply connected domains.
//!
//! The harmonic function is represented as
//! `u(z) = Re (1/2πi) ∮ μ(ζ) dζ/(ζ - z) + Σ_k A_k ln|z - p_k|`
//! with one logarithm per hole (`p_k` inside hole `k`) and
//! `A_k = ∫_{Γ_k} μ ds`. Substituting `A_k` gives a second-kind equation
//! without the null space that constant densities on holes would otherwise
//! create.

use std::f64::consts::PI;
use std::ops::Range;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Orientation, PlanarDomain};

/// All trapezoid nodes of a domain, concatenated in curve order.
#[derive(Debug, Clone)]
pub(crate) struct BoundaryNodes {
    pub z: Vec<Complex64>,
    pub dz: Vec<Complex64>,
    pub d2z: Vec<Complex64>,
    /// Trapezoid weight `1/M` of the node's curve.
    pub weight: Vec<f64>,
    pub ranges: Vec<Range<usize>>,
    pub outer: Vec<bool>,
}

impl BoundaryNodes {
    pub fn new(domain: &PlanarDomain) -> Self {
        let mut nodes = BoundaryNodes {
            z: vec![],
            dz: vec![],
            d2z: vec![],
            weight: vec![],
            ranges: vec![],
            outer: vec![],
        };
        for curve in domain.curves() {
            let start = nodes.z.len();
            let w = curve.rule().weight();
            for n in curve.nodes() {
                nodes.z.push(n.z);
                nodes.dz.push(n.dz);
                nodes.d2z.push(n.d2z);
                nodes.weight.push(w);
            }
            nodes.ranges.push(start..nodes.z.len());
            nodes.outer.push(curve.orientation() == Orientation::Positive);
        }
        nodes
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    /// Arc-length weight `|z'(t)|/M`.
    pub fn ds(&self, i: usize) -> f64 {
        self.dz[i].norm() * self.weight[i]
    }

    /// Barycentric Cauchy interpolation of boundary values of a function
    /// holomorphic in the domain; accurate up to the boundary.
    pub fn cauchy_interpolate(&self, values: &[Complex64], z: Complex64) -> Complex64 {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        for i in 0..self.len() {
            let diff = self.z[i] - z;
            if diff.norm() == 0.0 {
                return values[i];
            }
            let c = self.dz[i] * self.weight[i] / diff;
            num += values[i] * c;
            den += c;
        }
        num / den
    }
}

pub(crate) struct DirichletSolver {
    nodes: Arc<BoundaryNodes>,
    holes: Vec<Complex64>,
    matrix: DMatrix<f64>,
    lu: nalgebra::linalg::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

#[derive(Debug, Clone)]
pub(crate) struct LayerPotential {
    nodes: Arc<BoundaryNodes>,
    logs: Vec<(Complex64, f64)>,
    trace: Vec<f64>,
    limit: Vec<Complex64>,
    limit_derivative: Vec<Complex64>,
}

impl DirichletSolver {
    pub fn new(domain: &PlanarDomain) -> Result<Self> {
        let nodes = Arc::new(BoundaryNodes::new(domain));
        let holes = domain.hole_points();
        let n = nodes.len();
        let mut matrix = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let k = if i == j {
                    (nodes.d2z[i] / (2.0 * nodes.dz[i])).im
                } else {
                    (nodes.dz[j] / (nodes.z[j] - nodes.z[i])).im
                };
                matrix[(i, j)] = k * nodes.weight[j] / (2.0 * PI);
            }
            matrix[(i, i)] += 0.5;
        }
        for (k, &p) in holes.iter().enumerate() {
            let range = nodes.ranges[k].clone();
            for i in 0..n {
                let log = (nodes.z[i] - p).norm().ln();
                for j in range.clone() {
                    matrix[(i, j)] += log * nodes.ds(j);
                }
            }
        }
        let lu = matrix.clone().lu();
        if !lu.is_invertible() {
            return Err(Error::SolverFailure {
                what: "double-layer Dirichlet solve",
                nodes: n,
                detail: "singular system matrix".to_string(),
            });
        }
        Ok(DirichletSolver {
            nodes,
            holes,
            matrix,
            lu,
        })
    }

    pub fn nodes(&self) -> &Arc<BoundaryNodes> {
        &self.nodes
    }

    /// Solves for the given boundary values, one per node.
    pub fn solve(&self, data: &[f64]) -> Result<LayerPotential> {
        let rhs = DVector::from_column_slice(data);
        let mu = self.lu.solve(&rhs).ok_or_else(|| Error::SolverFailure {
            what: "double-layer Dirichlet solve",
            nodes: self.nodes.len(),
            detail: "LU back-substitution failed".to_string(),
        })?;
        let trace = (&self.matrix * &mu).iter().cloned().collect();
        let logs = self
            .holes
            .iter()
            .enumerate()
            .map(|(k, &p)| {
                let a: f64 = self.nodes.ranges[k].clone().map(|j| mu[j] * self.nodes.ds(j)).sum();
                (p, a)
            })
            .collect();
        let mu: Vec<f64> = mu.iter().cloned().collect();
        let limit = cauchy_boundary_limit(&self.nodes, &mu);
        let limit_derivative = derivative_along_curves(&self.nodes, &limit)
            .iter()
            .zip(&self.nodes.dz)
            .map(|(d, dz)| d / dz)
            .collect();
        Ok(LayerPotential {
            limit_derivative,
            nodes: self.nodes.clone(),
            limit,
            logs,
            trace,
        })
    }
}

/// `dμ/dt` on one periodic curve by trigonometric interpolation.
fn periodic_derivative(values: &[Complex64]) -> Vec<Complex64> {
    let m = values.len();
    let half = m / 2;
    let coefficients: Vec<Complex64> = (0..m)
        .map(|k| {
            values
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (k * j) as f64 / m as f64))
                .sum::<Complex64>()
                / m as f64
        })
        .collect();
    (0..m)
        .map(|j| {
            let mut d = Complex64::new(0.0, 0.0);
            for (k, c) in coefficients.iter().enumerate() {
                // the Nyquist mode has no well-defined derivative
                if 2 * k == m {
                    continue;
                }
                let freq = if k <= half { k as f64 } else { k as f64 - m as f64 };
                d += c
                    * Complex64::new(0.0, 2.0 * PI * freq)
                    * Complex64::from_polar(1.0, 2.0 * PI * (k * j) as f64 / m as f64);
            }
            d
        })
        .collect()
}

fn derivative_along_curves(nodes: &BoundaryNodes, values: &[Complex64]) -> Vec<Complex64> {
    let mut derivative = vec![Complex64::new(0.0, 0.0); nodes.len()];
    for range in &nodes.ranges {
        let d = periodic_derivative(&values[range.clone()]);
        derivative[range.clone()].copy_from_slice(&d);
    }
    derivative
}

/// Interior boundary limit of `Φ(z) = (1/2πi) ∮ μ dζ/(ζ - z)` at every
/// node. Subtracting `μ_i` leaves a smooth periodic integrand whose diagonal
/// value is `μ'(t_i)`; the subtracted part integrates to `μ_i` because the
/// total boundary winds once around every interior point.
fn cauchy_boundary_limit(nodes: &BoundaryNodes, mu: &[f64]) -> Vec<Complex64> {
    let mu_c: Vec<Complex64> = mu.iter().map(|&m| Complex64::new(m, 0.0)).collect();
    let derivative = derivative_along_curves(nodes, &mu_c);
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    (0..nodes.len())
        .map(|i| {
            let mut sum = derivative[i] * nodes.weight[i];
            for j in 0..nodes.len() {
                if j != i {
                    sum += (mu[j] - mu[i]) * nodes.dz[j] * nodes.weight[j] / (nodes.z[j] - nodes.z[i]);
                }
            }
            mu[i] + sum / two_pi_i
        })
        .collect()
}

impl LayerPotential {
    /// Interior value. The holomorphic part is evaluated by barycentric
    /// Cauchy interpolation of its boundary limits, which stays accurate up
    /// to the boundary.
    pub fn value(&self, z: Complex64) -> f64 {
        self.nodes.cauchy_interpolate(&self.limit, z).re
            + self.logs.iter().map(|(p, a)| a * (z - p).norm().ln()).sum::<f64>()
    }

    /// `2 ∂u/∂z`, holomorphic in the domain. `Φ'` is interpolated from its
    /// boundary values `(dΦ/dt)/(dz/dt)`.
    pub fn complex_derivative(&self, z: Complex64) -> Complex64 {
        self.nodes.cauchy_interpolate(&self.limit_derivative, z)
            + self
                .logs
                .iter()
                .map(|(p, a)| *a / (z - p))
                .sum::<Complex64>()
    }

    /// Boundary limit of the representation at every node.
    pub fn trace(&self) -> &[f64] {
        &self.trace
    }
}
