//! Szegő kernel, harmonic measures and the Bergman–Szegő identity
//! `K(z, a) = 4π S(z, a)² + Σ_j λ_j F_j(z)`.
//!
//! `S(·, a)` is computed from the Kerzman–Stein equation
//! `S_a + A S_a = C_a` on the boundary, where
//! `A(z, w) = conj(H(w, z)) - H(z, w)`, `H(z, w) = T(w) / (2πi (w - z))` and
//! `C_a(z) = conj(H(a, z))`. The kernel `A` is smooth on smooth curves, so
//! the trapezoid Nyström discretization converges spectrally. Interior values
//! come from barycentric Cauchy interpolation of the boundary values.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Dyn};
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bergman::OrthonormalBasis;
use crate::error::{Error, Result};
use crate::geometry::{DomainKind, Membership, PlanarDomain};
use crate::layer::{BoundaryNodes, DirichletSolver, LayerPotential};

/// Fraction of the spine-to-boundary distance at which the zero-counting
/// contour sits.
pub const CONTOUR_FRACTION: f64 = 0.95;
/// Relative perturbation of the contour when a zero lies too close to it.
pub const CONTOUR_PERTURBATION: f64 = 0.02;
/// `min |S| / max |S|` on the contour below which a zero is considered to be
/// on it.
pub const CONTOUR_ZERO_THRESHOLD: f64 = 1e-6;

fn cauchy_kernel_conj(tangent: Complex64, z: Complex64, a: Complex64) -> Complex64 {
    (tangent / (Complex64::new(0.0, 2.0 * PI) * (z - a))).conj()
}

fn require_smooth(domain: &PlanarDomain) -> Result<()> {
    if let DomainKind::PuncturedDisk { .. } = domain.kind() {
        return Err(Error::Unsupported(
            "the Szegő kernel needs a smooth boundary; punctures are not boundary curves"
                .to_string(),
        ));
    }
    Ok(())
}

fn require_interior(domain: &PlanarDomain, a: Complex64) -> Result<()> {
    match domain.contains(a) {
        Membership::Inside => Ok(()),
        Membership::Boundary => Err(Error::BoundaryAmbiguous(a)),
        Membership::Outside => Err(Error::NotInterior(a)),
    }
}

/// Boundary values of `C_a(z) = conj(T(z) / (2πi (z - a)))`.
#[derive(Debug, Clone)]
pub struct CauchyDensity {
    pub a: Complex64,
    pub values: Vec<Complex64>,
}

/// Factored Nyström system for one domain; solve once per base point.
pub struct SzegoSolver {
    domain: PlanarDomain,
    nodes: Arc<BoundaryNodes>,
    tangents: Vec<Complex64>,
    lu: nalgebra::linalg::LU<Complex64, Dyn, Dyn>,
}

/// `S(·, a)`: boundary values and an interior evaluator.
#[derive(Debug, Clone)]
pub struct SzegoSolution {
    a: Complex64,
    density: CauchyDensity,
    values: Vec<Complex64>,
    nodes: Arc<BoundaryNodes>,
}

impl SzegoSolver {
    pub fn new(domain: &PlanarDomain) -> Result<Self> {
        require_smooth(domain)?;
        let nodes = Arc::new(BoundaryNodes::new(domain));
        let n = nodes.len();
        let tangents: Vec<Complex64> = nodes.dz.iter().map(|d| d / d.norm()).collect();
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let mut matrix = DMatrix::<Complex64>::identity(n, n);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = nodes.z[j] - nodes.z[i];
                let h_ij = tangents[j] / (two_pi_i * d);
                let h_ji = tangents[i] / (two_pi_i * -d);
                matrix[(i, j)] += (h_ji.conj() - h_ij) * nodes.ds(j);
            }
        }
        let lu = matrix.lu();
        if !lu.is_invertible() {
            return Err(Error::SolverFailure {
                what: "Kerzman–Stein Nyström solve",
                nodes: n,
                detail: "singular system matrix".to_string(),
            });
        }
        Ok(SzegoSolver {
            domain: domain.clone(),
            nodes,
            tangents,
            lu,
        })
    }

    pub fn domain(&self) -> &PlanarDomain {
        &self.domain
    }

    /// Total number of boundary nodes.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn cauchy_density(&self, a: Complex64) -> CauchyDensity {
        let values = (0..self.nodes.len())
            .map(|i| cauchy_kernel_conj(self.tangents[i], self.nodes.z[i], a))
            .collect();
        CauchyDensity { a, values }
    }

    pub fn solve(&self, a: Complex64) -> Result<SzegoSolution> {
        require_interior(&self.domain, a)?;
        let density = self.cauchy_density(a);
        let rhs = DVector::from_column_slice(&density.values);
        let solution = self.lu.solve(&rhs).ok_or_else(|| Error::SolverFailure {
            what: "Kerzman–Stein Nyström solve",
            nodes: self.nodes.len(),
            detail: "LU back-substitution failed".to_string(),
        })?;
        let values: Vec<Complex64> = solution.iter().cloned().collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::SolverFailure {
                what: "Kerzman–Stein Nyström solve",
                nodes: self.nodes.len(),
                detail: "non-finite boundary values".to_string(),
            });
        }
        Ok(SzegoSolution {
            a,
            density,
            values,
            nodes: self.nodes.clone(),
        })
    }
}

impl SzegoSolution {
    pub fn base_point(&self) -> Complex64 {
        self.a
    }

    pub fn density(&self) -> &CauchyDensity {
        &self.density
    }

    /// `S(z_i, a)` at the boundary nodes.
    pub fn boundary_values(&self) -> &[Complex64] {
        &self.values
    }

    /// `S(z, a)` for `z` in the closed domain.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.nodes.cauchy_interpolate(&self.values, z)
    }

    /// `S(a, a)`, real and positive.
    pub fn diagonal(&self) -> f64 {
        self.eval(self.a).re
    }
}

/// Solves for `S(·, a)` on a fresh discretization of `domain`.
pub fn szego_kernel(domain: &PlanarDomain, a: Complex64) -> Result<SzegoSolution> {
    SzegoSolver::new(domain)?.solve(a)
}

/// Outcome of the argument-principle count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroCount {
    pub zeros: usize,
    /// Raw winding sum before rounding.
    pub winding: f64,
    /// Contour position actually used, as a fraction of the spine distance.
    pub contour_fraction: f64,
    pub samples_per_curve: usize,
}

/// Distance from each boundary curve to the domain's spine: half the gap to
/// the nearest other curve, or the inradius for simply connected domains,
/// capped so the inward offset curve stays free of self-intersections.
fn spine_distances(domain: &PlanarDomain) -> Vec<f64> {
    let curves = domain.curves();
    curves
        .iter()
        .enumerate()
        .map(|(k, curve)| {
            let mut clearance = if curves.len() == 1 {
                domain.inradius()
            } else {
                let gap = curve
                    .nodes()
                    .iter()
                    .flat_map(|n| {
                        curves
                            .iter()
                            .enumerate()
                            .filter(move |(m, _)| *m != k)
                            .map(move |(_, other)| other.min_distance(n.z))
                    })
                    .fold(f64::INFINITY, f64::min);
                gap / 2.0
            };
            for n in curve.nodes() {
                let curvature = (n.dz.conj() * n.d2z).im / n.dz.norm().powi(3);
                if curvature > 0.0 {
                    clearance = clearance.min(1.0 / curvature);
                }
            }
            clearance
        })
        .collect()
}

/// Winding of `S(·, a)` around contours offset inward from every boundary
/// curve, each traversed with the curve's orientation.
fn count_on_contours(
    domain: &PlanarDomain,
    solution: &SzegoSolution,
    fraction: f64,
) -> Result<Option<ZeroCount>> {
    let spine = spine_distances(domain);
    let mut samples = 4 * domain.nodes_per_curve().max(128);
    loop {
        let mut winding = 0.0;
        let mut max_step: f64 = 0.0;
        let mut min_mod = f64::INFINITY;
        let mut max_mod: f64 = 0.0;
        for (curve, &clearance) in domain.curves().iter().zip(&spine) {
            let offset = (1.0 - fraction) * clearance;
            let point = |i: usize| {
                let (z, dz, _) = curve.eval(i as f64 / samples as f64);
                z + Complex64::new(0.0, offset) * dz / dz.norm()
            };
            let values: Vec<Complex64> = (0..samples).map(|i| solution.eval(point(i))).collect();
            for i in 0..samples {
                let v = values[i];
                let next = values[(i + 1) % samples];
                let step = (next / v).arg();
                winding += step;
                max_step = max_step.max(step.abs());
                min_mod = min_mod.min(v.norm());
                max_mod = max_mod.max(v.norm());
            }
        }
        if !(min_mod.is_finite() && max_mod > 0.0) {
            return Err(Error::NumericalFailure(
                "non-finite Szegő values on the counting contour".to_string(),
            ));
        }
        if min_mod < CONTOUR_ZERO_THRESHOLD * max_mod {
            return Ok(None);
        }
        if max_step <= PI / 4.0 || samples >= 1 << 15 {
            let turns = winding / (2.0 * PI);
            if (turns - turns.round()).abs() > 0.1 || turns.round() < 0.0 {
                return Err(Error::NumericalFailure(format!(
                    "argument-principle sum {turns} is not a nonnegative integer"
                )));
            }
            return Ok(Some(ZeroCount {
                zeros: turns.round() as usize,
                winding: turns,
                contour_fraction: fraction,
                samples_per_curve: samples,
            }));
        }
        samples *= 2;
    }
}

/// Number of zeros of `S(·, a)` in the domain, counted with multiplicity.
pub fn zero_count(domain: &PlanarDomain, solution: &SzegoSolution) -> Result<ZeroCount> {
    let base = CONTOUR_FRACTION;
    let candidates = [
        base,
        base * (1.0 - CONTOUR_PERTURBATION),
        base * (1.0 + CONTOUR_PERTURBATION).min(0.999),
    ];
    for fraction in candidates {
        if let Some(count) = count_on_contours(domain, solution, fraction)? {
            return Ok(count);
        }
        log::warn!("zero of S(·, a) near the counting contour at fraction {fraction}; perturbing");
    }
    Err(Error::NumericalFailure(format!(
        "S(·, {}) keeps vanishing on perturbed counting contours",
        solution.base_point()
    )))
}

pub fn szego_zero_count(domain: &PlanarDomain, a: Complex64) -> Result<ZeroCount> {
    let solution = szego_kernel(domain, a)?;
    zero_count(domain, &solution)
}

#[derive(Debug, Clone)]
enum Representation {
    /// `ω = ln(|z - c|/R) / ln(ρ/R)`.
    Annulus {
        center: Complex64,
        inner: f64,
        outer: f64,
    },
    Layer(LayerPotential),
}

/// Harmonic measure `ω_j` of hole `j` (1 on that hole, 0 on every other
/// boundary curve) together with `F_j = 2 ∂ω_j/∂z`.
#[derive(Debug, Clone)]
pub struct HarmonicMeasureField {
    hole: usize,
    nodes: Arc<BoundaryNodes>,
    repr: Representation,
}

impl HarmonicMeasureField {
    pub fn hole(&self) -> usize {
        self.hole
    }

    pub fn omega(&self, z: Complex64) -> f64 {
        match &self.repr {
            Representation::Annulus {
                center,
                inner,
                outer,
            } => ((z - center).norm() / outer).ln() / (inner / outer).ln(),
            Representation::Layer(potential) => potential.value(z),
        }
    }

    pub fn f_field(&self, z: Complex64) -> Complex64 {
        match &self.repr {
            Representation::Annulus {
                center,
                inner,
                outer,
            } => 1.0 / ((z - center) * (inner / outer).ln()),
            Representation::Layer(potential) => potential.complex_derivative(z),
        }
    }

    /// `ω_j` at every boundary node, as the boundary limit of the
    /// representation.
    pub fn boundary_trace(&self) -> Vec<f64> {
        match &self.repr {
            Representation::Annulus { .. } => self.nodes.z.iter().map(|&z| self.omega(z)).collect(),
            Representation::Layer(potential) => potential.trace().to_vec(),
        }
    }

    /// Largest deviation of the boundary trace from the prescribed 0/1 data.
    pub fn boundary_error(&self) -> f64 {
        let trace = self.boundary_trace();
        let mut error: f64 = 0.0;
        for (k, range) in self.nodes.ranges.iter().enumerate() {
            let target = if k == self.hole { 1.0 } else { 0.0 };
            for i in range.clone() {
                error = error.max((trace[i] - target).abs());
            }
        }
        error
    }
}

/// Dirichlet solver reused across all holes of a domain.
pub struct HarmonicMeasures {
    fields: Vec<HarmonicMeasureField>,
}

impl HarmonicMeasures {
    pub fn new(domain: &PlanarDomain) -> Result<Self> {
        require_smooth(domain)?;
        let holes = domain.holes().len();
        if let DomainKind::Annulus {
            center,
            inner,
            outer,
        } = *domain.kind()
        {
            let nodes = Arc::new(BoundaryNodes::new(domain));
            return Ok(HarmonicMeasures {
                fields: vec![HarmonicMeasureField {
                    hole: 0,
                    nodes,
                    repr: Representation::Annulus {
                        center,
                        inner,
                        outer,
                    },
                }],
            });
        }
        if holes == 0 {
            return Ok(HarmonicMeasures { fields: vec![] });
        }
        let solver = DirichletSolver::new(domain)?;
        let nodes = solver.nodes().clone();
        let fields = (0..holes)
            .map(|j| {
                let data: Vec<f64> = nodes
                    .ranges
                    .iter()
                    .enumerate()
                    .flat_map(|(k, r)| std::iter::repeat_n(if k == j { 1.0 } else { 0.0 }, r.len()))
                    .collect();
                Ok(HarmonicMeasureField {
                    hole: j,
                    nodes: nodes.clone(),
                    repr: Representation::Layer(solver.solve(&data)?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HarmonicMeasures { fields })
    }

    pub fn fields(&self) -> &[HarmonicMeasureField] {
        &self.fields
    }
}

/// `ω_j` for hole `j` (0-based, in the order the holes were given).
pub fn harmonic_measure(domain: &PlanarDomain, j: usize) -> Result<HarmonicMeasureField> {
    let holes = domain.holes().len();
    if holes == 0 {
        return Err(Error::InvalidInput(
            "harmonic measures need at least one hole".to_string(),
        ));
    }
    if j >= holes {
        return Err(Error::InvalidInput(format!(
            "hole index {j} out of range (domain has {holes} holes)"
        )));
    }
    Ok(HarmonicMeasures::new(domain)?.fields.swap_remove(j))
}

/// `(1/v) ∫_Ω F_j dv`, reduced by Stokes to `(i/v) ∮ ω_j dz̄` over the whole
/// boundary, where only the closed curve of hole `j` carries nonzero data.
pub fn field_mean(domain: &PlanarDomain, field: &HarmonicMeasureField) -> Complex64 {
    let nodes = &field.nodes;
    let trace = field.boundary_trace();
    let integral: Complex64 = (0..nodes.len())
        .map(|i| trace[i] * nodes.dz[i].conj() * nodes.weight[i])
        .sum();
    Complex64::new(0.0, 1.0) * integral / domain.area()
}

pub fn f_field_mean(domain: &PlanarDomain, j: usize) -> Result<Complex64> {
    Ok(field_mean(domain, &harmonic_measure(domain, j)?))
}

/// Sample counts and placement for the Bergman–Szegő fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Fit points; at least `10(n-1)` are always used.
    pub fit_points: usize,
    pub holdout_points: usize,
    /// Minimum distance of sample points from the boundary, as a fraction
    /// of the inradius.
    pub clearance: f64,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            fit_points: 40,
            holdout_points: 40,
            clearance: 0.3,
            seed: 20_240_501,
        }
    }
}

/// Fitted `λ_j` for one base point.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchCoefficients {
    pub a: Complex64,
    pub lambdas: Vec<Complex64>,
    /// Max residual over the fit points.
    pub fit_residual: f64,
    /// Max residual over held-out points.
    pub holdout_residual: f64,
    /// Smallest over largest singular value of the `F_j` sample matrix.
    pub singular_ratio: f64,
}

/// Ratio below which the `F_j` sample matrix counts as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

fn sample_interior(domain: &PlanarDomain, count: usize, clearance: f64, rng: &mut ChaCha8Rng) -> Result<Vec<Complex64>> {
    let (x0, x1, y0, y1) = domain.bounding_box();
    let min_distance = clearance * domain.inradius();
    let mut points = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while points.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(Error::InvalidInput(format!(
                "could not place {count} sample points at distance ≥ {min_distance} from the boundary"
            )));
        }
        let z = Complex64::new(rng.random_range(x0..x1), rng.random_range(y0..y1));
        if domain.contains(z) == Membership::Inside && domain.boundary_distance(z) >= min_distance {
            points.push(z);
        }
    }
    Ok(points)
}

/// Least-squares fit of `K(z, a) - 4π S(z, a)²` by the `F_j`, with a
/// held-out residual.
pub fn fit_with(
    basis: &OrthonormalBasis,
    solver: &SzegoSolver,
    measures: &HarmonicMeasures,
    a: Complex64,
    options: &FitOptions,
) -> Result<MatchCoefficients> {
    let domain = solver.domain();
    let solution = solver.solve(a)?;
    let fields = measures.fields();
    let m = fields.len();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let fit = sample_interior(domain, options.fit_points.max(10 * m), options.clearance, &mut rng)?;
    let holdout = sample_interior(domain, options.holdout_points, options.clearance, &mut rng)?;
    let target = |z: Complex64| basis.kernel(z, a) - 4.0 * PI * solution.eval(z).powi(2);
    let design = |z: Complex64, j: usize| fields[j].f_field(z);

    let (lambdas, singular_ratio) = if m == 0 {
        (vec![], 1.0)
    } else {
        let matrix = DMatrix::from_fn(fit.len(), m, |i, j| design(fit[i], j));
        let rhs = DVector::from_iterator(fit.len(), fit.iter().map(|&z| target(z)));
        let svd = matrix.svd(true, true);
        let max = svd.singular_values.max();
        let min = svd.singular_values.min();
        let ratio = if max > 0.0 { min / max } else { 0.0 };
        if ratio < RANK_TOLERANCE {
            return Err(Error::RankDeficient { ratio });
        }
        let lambdas = svd
            .solve(&rhs, RANK_TOLERANCE * max)
            .map_err(|e| Error::NumericalFailure(e.to_string()))?;
        (lambdas.iter().cloned().collect::<Vec<_>>(), ratio)
    };
    let residual = |z: Complex64| {
        let correction: Complex64 = lambdas.iter().enumerate().map(|(j, l)| l * design(z, j)).sum();
        (target(z) - correction).norm()
    };
    let fit_residual = fit.iter().map(|&z| residual(z)).fold(0.0, f64::max);
    let holdout_residual = holdout.iter().map(|&z| residual(z)).fold(0.0, f64::max);
    Ok(MatchCoefficients {
        a,
        lambdas,
        fit_residual,
        holdout_residual,
        singular_ratio,
    })
}

pub fn bergman_szego_fit(domain: &PlanarDomain, a: Complex64, basis: &OrthonormalBasis) -> Result<MatchCoefficients> {
    let solver = SzegoSolver::new(domain)?;
    let measures = HarmonicMeasures::new(domain)?;
    fit_with(basis, &solver, &measures, a, &FitOptions::default())
}
