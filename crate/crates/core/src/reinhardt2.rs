//! The complete Reinhardt domain `Ω = {|z₁|⁴ + |z₁|² + |z₂|² < 1}` in `ℂ²`:
//! volume, monomial norms, `K(0, 0) = 1/v(Ω)`, strong convexity of the
//! boundary and the obstruction to a biholomorphism with the unit ball.
//!
//! Every integral reduces to the radial integral
//! `I(p, q) = ∫₀^{t*} t^p (1 - t - t²)^{q+1} dt` through
//! `‖z₁^p z₂^q‖² = π²/(q+1) · I(p, q)`. The functions take a
//! [`ReinhardtProfile2`] so the unit ball (`p(t) = t`) can serve as a
//! reference.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::ReinhardtProfile2;
use crate::quadrature::{reinhardt_radial_integral, reinhardt_radial_integral_exact};

pub const DEFAULT_TABLE_SIZE: usize = 8;
/// `|ρ(x)|` above this means the point is not on the boundary.
pub const BOUNDARY_TOLERANCE: f64 = 1e-10;
pub const THETA_GRID: usize = 36;
/// Oscillation below this certifies `a₃ = 0`.
pub const OSCILLATION_TOLERANCE: f64 = 1e-12;

/// `v(Ω) = π² I(0, 0)` by adaptive quadrature.
pub fn volume(profile: &ReinhardtProfile2) -> f64 {
    PI * PI * reinhardt_radial_integral(profile, 0, 0)
}

/// `‖z₁^p z₂^q‖²` by adaptive quadrature.
pub fn monomial_norm(profile: &ReinhardtProfile2, p: u32, q: u32) -> f64 {
    PI * PI / (q as f64 + 1.0) * reinhardt_radial_integral(profile, p, q)
}

/// `‖z₁^p z₂^q‖²` for `0 ≤ p, q ≤ N`, from the closed-form Beta sums.
/// Deliberately independent of [`volume`].
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialNormTable {
    size: usize,
    norms: Vec<f64>,
}

impl MonomialNormTable {
    pub fn new(profile: &ReinhardtProfile2, size: usize) -> Self {
        let n = size + 1;
        let norms = (0..n * n)
            .map(|k| {
                let (p, q) = ((k / n) as u32, (k % n) as u32);
                PI * PI / (q as f64 + 1.0) * reinhardt_radial_integral_exact(profile, p, q)
            })
            .collect();
        MonomialNormTable { size, norms }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, p: usize, q: usize) -> Option<f64> {
        (p <= self.size && q <= self.size).then(|| self.norms[p * (self.size + 1) + q])
    }

    /// Entries strictly decrease in each index up to `limit`.
    pub fn strictly_decreasing(&self, limit: usize) -> bool {
        let limit = limit.min(self.size);
        (0..=limit).all(|p| {
            (0..=limit).all(|q| {
                let v = self.get(p, q).unwrap();
                v > 0.0
                    && (p == limit || self.get(p + 1, q).unwrap() < v)
                    && (q == limit || self.get(p, q + 1).unwrap() < v)
            })
        })
    }

    /// Truncated series `Σ (z₁ w̄₁)^p (z₂ w̄₂)^q / ‖z₁^p z₂^q‖²`.
    pub fn kernel(&self, z: (Complex64, Complex64), w: (Complex64, Complex64)) -> Complex64 {
        let a = z.0 * w.0.conj();
        let b = z.1 * w.1.conj();
        let mut total = Complex64::new(0.0, 0.0);
        for p in 0..=self.size {
            for q in 0..=self.size {
                total += a.powu(p as u32) * b.powu(q as u32) / self.get(p, q).unwrap();
            }
        }
        total
    }
}

/// `K(0, 0)` from the monomial series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOrigin {
    pub value: f64,
    /// Number of series terms that are nonzero at the origin (only the
    /// constant term).
    pub contributing_terms: usize,
}

pub fn kernel_origin(table: &MonomialNormTable) -> KernelOrigin {
    let origin = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let mut contributing_terms = 0;
    for p in 0..=table.size() {
        for q in 0..=table.size() {
            // 0^0 = 1; every other monomial vanishes at the origin
            if origin.0.powu(p as u32) * origin.1.powu(q as u32) != Complex64::new(0.0, 0.0) {
                contributing_terms += 1;
            }
        }
    }
    KernelOrigin {
        value: table.kernel(origin, origin).re,
        contributing_terms,
    }
}

/// `ρ(x) = u² + u + x₃² + x₄² - 1` with `u = x₁² + x₂²`, in the real
/// coordinates `z₁ = x₁ + i x₂`, `z₂ = x₃ + i x₄`.
pub fn defining_function(x: [f64; 4]) -> f64 {
    let u = x[0] * x[0] + x[1] * x[1];
    u * u + u + x[2] * x[2] + x[3] * x[3] - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianReport {
    pub point: [f64; 4],
    pub hessian: Matrix4<f64>,
    pub min_eigenvalue: f64,
}

/// Real Hessian of `ρ` at a boundary point. It is block diagonal: the
/// `z₁` block `[[2(2u+1) + 8x₁², 8x₁x₂], [8x₁x₂, 2(2u+1) + 8x₂²]]` and `2I`
/// for `z₂`.
pub fn hessian_report(x: [f64; 4]) -> Result<HessianReport> {
    let r = defining_function(x);
    if r.abs() > BOUNDARY_TOLERANCE {
        return Err(Error::InvalidInput(format!(
            "point {x:?} is not on the boundary (ρ = {r:e})"
        )));
    }
    let u = x[0] * x[0] + x[1] * x[1];
    let d = 2.0 * (2.0 * u + 1.0);
    let block = Matrix2::new(d + 8.0 * x[0] * x[0], 8.0 * x[0] * x[1], 8.0 * x[0] * x[1], d + 8.0 * x[1] * x[1]);
    let mut hessian = Matrix4::zeros();
    hessian.fixed_view_mut::<2, 2>(0, 0).copy_from(&block);
    hessian[(2, 2)] = 2.0;
    hessian[(3, 3)] = 2.0;
    let min_eigenvalue = hessian.symmetric_eigenvalues().min();
    Ok(HessianReport {
        point: x,
        hessian,
        min_eigenvalue,
    })
}

pub fn hessian_min_eig(x: [f64; 4]) -> Result<f64> {
    Ok(hessian_report(x)?.min_eigenvalue)
}

/// Boundary points hit by rays in uniformly random directions of `ℝ⁴`.
pub fn sample_boundary(count: usize, seed: u64) -> Vec<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        // uniform direction on S³ by rejection from the cube
        let d: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n2: f64 = d.iter().map(|v| v * v).sum();
        if !(1e-6..=1.0).contains(&n2) {
            continue;
        }
        let a = (d[0] * d[0] + d[1] * d[1]) / n2;
        let b = (d[2] * d[2] + d[3] * d[3]) / n2;
        // ρ(s·d̂) = a²s⁴ + (a + b)s² - 1 = 0, with a + b = 1
        let s2 = 2.0 / ((a + b) + ((a + b) * (a + b) + 4.0 * a * a).sqrt());
        let s = (s2 / n2).sqrt();
        points.push(d.map(|v| v * s));
    }
    points
}

/// `F(z) = (a₁z₁ + a₂z₂, a₃z₁ + a₄z₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMapCandidate {
    pub a1: Complex64,
    pub a2: Complex64,
    pub a3: Complex64,
    pub a4: Complex64,
}

impl LinearMapCandidate {
    /// The normalization `F(0, 1) = (0, 1)`, i.e. `a₂ = 0`, `a₄ = 1`.
    pub fn normalized(a1: Complex64, a3: Complex64) -> Self {
        LinearMapCandidate {
            a1,
            a2: Complex64::new(0.0, 0.0),
            a3,
            a4: Complex64::new(1.0, 0.0),
        }
    }

    pub fn apply(&self, z1: Complex64, z2: Complex64) -> (Complex64, Complex64) {
        (self.a1 * z1 + self.a2 * z2, self.a3 * z1 + self.a4 * z2)
    }
}

/// `ρ(F(1/√2, e^{iθ}/√2))`, zero when the ball's boundary point lands on
/// `bΩ`.
pub fn circle_constraint_residual(a1: Complex64, a3: Complex64, theta: f64) -> f64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (w1, w2) = LinearMapCandidate::normalized(a1, a3)
        .apply(Complex64::new(s, 0.0), Complex64::from_polar(s, theta));
    let t = w1.norm_sqr();
    t * t + t + w2.norm_sqr() - 1.0
}

/// The constraint sampled on a `θ` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleCertificate {
    pub residuals: Vec<f64>,
    pub mean: f64,
    /// `max - min` over the grid; `2|a₃|` whenever the grid contains the
    /// extremal angles.
    pub oscillation: f64,
}

impl CircleCertificate {
    /// The constraint is independent of `θ`, which forces `a₃ = 0`.
    pub fn forces_a3_zero(&self) -> bool {
        self.oscillation < OSCILLATION_TOLERANCE
    }
}

pub fn circle_certificate(a1: Complex64, a3: Complex64, grid: usize) -> CircleCertificate {
    let residuals: Vec<f64> = (0..grid)
        .map(|k| circle_constraint_residual(a1, a3, 2.0 * PI * k as f64 / grid as f64))
        .collect();
    let max = residuals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = residuals.iter().cloned().fold(f64::INFINITY, f64::min);
    CircleCertificate {
        mean: residuals.iter().sum::<f64>() / grid as f64,
        oscillation: max - min,
        residuals,
    }
}

/// Positive roots `x = |a₁|²` of the two boundary conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstructionRoots {
    /// `x² + 2x - 2 = 0`, from `(1/√2, e^{iθ}/√2) ↦ bΩ` with `a₃ = 0`.
    pub circle: f64,
    /// `x² + x - 1 = 0`, from `(1, 0) ↦ bΩ`.
    pub axis: f64,
    pub difference: f64,
}

/// Positive root of `x² + bx - c` for `b, c > 0`, in the cancellation-free
/// form.
fn positive_root(b: f64, c: f64) -> f64 {
    2.0 * c / (b + (b * b + 4.0 * c).sqrt())
}

pub fn obstruction_roots() -> ObstructionRoots {
    let circle = positive_root(2.0, 2.0);
    let axis = positive_root(1.0, 1.0);
    ObstructionRoots {
        circle,
        axis,
        difference: (circle - axis).abs(),
    }
}

/// Statistical estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub value: Complex64,
    /// Standard errors of the real and imaginary parts.
    pub std_error: (f64, f64),
    pub samples: usize,
}

impl MonteCarloEstimate {
    /// Both components within `k` standard errors of zero.
    pub fn consistent_with_zero(&self, k: f64) -> bool {
        self.value.re.abs() < k * self.std_error.0 && self.value.im.abs() < k * self.std_error.1
    }
}

/// `⟨z₁, z₂⟩ = ∫_Ω z₁ conj(z₂) dv` by uniform sampling of the bounding box.
pub fn monte_carlo_inner_product(profile: &ReinhardtProfile2, samples: usize, seed: u64) -> MonteCarloEstimate {
    let r1 = profile.cutoff().sqrt();
    let box_volume = (2.0 * r1).powi(2) * 4.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (Complex64::new(0.0, 0.0), (0.0, 0.0));
    for _ in 0..samples {
        let z1 = Complex64::new(rng.random_range(-r1..r1), rng.random_range(-r1..r1));
        let z2 = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if profile.contains(z1, z2) {
            let v = z1 * z2.conj() * box_volume;
            sum += v;
            sum_sq.0 += v.re * v.re;
            sum_sq.1 += v.im * v.im;
        }
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = |sq: f64, m: f64| (sq / n - m * m).max(0.0) / (n - 1.0);
    MonteCarloEstimate {
        value: mean,
        std_error: (var(sum_sq.0, mean.re).sqrt(), var(sum_sq.1, mean.im).sqrt()),
        samples,
    }
}

/// Summary of the obstruction argument.
#[derive(Debug, Clone, PartialEq)]
pub struct ReinhardtReport {
    pub volume: f64,
    pub kernel_origin: f64,
    pub min_hessian_eigenvalue: f64,
    pub boundary_samples: usize,
    pub roots: ObstructionRoots,
    pub biholomorphic_to_ball: bool,
}

impl ReinhardtReport {
    pub fn verdict(&self) -> &'static str {
        if self.biholomorphic_to_ball {
            "biholomorphic to the ball"
        } else {
            "not biholomorphic to the ball"
        }
    }
}

impl fmt::Display for ReinhardtReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain: |z1|^4 + |z1|^2 + |z2|^2 < 1")?;
        writeln!(f, "volume: {:.10}", self.volume)?;
        writeln!(f, "K(0,0): {:.10}", self.kernel_origin)?;
        writeln!(
            f,
            "min Hessian eigenvalue over {} boundary points: {:.12}",
            self.boundary_samples, self.min_hessian_eigenvalue
        )?;
        writeln!(f, "|a1|^2 from the circle condition: {:.10}", self.roots.circle)?;
        writeln!(f, "|a1|^2 from the axis condition: {:.10}", self.roots.axis)?;
        writeln!(f, "root difference: {:.10}", self.roots.difference)?;
        write!(f, "verdict: {}", self.verdict())
    }
}

pub fn report(boundary_samples: usize, seed: u64) -> Result<ReinhardtReport> {
    let profile = ReinhardtProfile2::quartic();
    let table = MonomialNormTable::new(&profile, DEFAULT_TABLE_SIZE);
    let min_hessian_eigenvalue = sample_boundary(boundary_samples, seed)
        .into_iter()
        .map(hessian_min_eig)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let roots = obstruction_roots();
    Ok(ReinhardtReport {
        volume: volume(&profile),
        kernel_origin: kernel_origin(&table).value,
        min_hessian_eigenvalue,
        boundary_samples,
        roots,
        // a biholomorphism would need one |a₁|² solving both conditions
        biholomorphic_to_ball: roots.difference < 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t_star() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    #[test]
    fn volume_examples() {
        let quartic = ReinhardtProfile2::quartic();
        let t = t_star();
        let closed = PI * PI * (t - t * t / 2.0 - t.powi(3) / 3.0);
        // π²(t* - t*²/2 - t*³/3)
        assert!((volume(&quartic) - 3.438_191_746).abs() < 1e-9);
        assert!((volume(&quartic) - closed).abs() < 1e-12 * closed);
        let ball = volume(&ReinhardtProfile2::ball());
        assert!((ball - PI * PI / 2.0).abs() < 1e-12);
        assert!(volume(&quartic) < ball);
    }

    #[test]
    fn norm_examples() {
        let quartic = ReinhardtProfile2::quartic();
        let table = MonomialNormTable::new(&quartic, DEFAULT_TABLE_SIZE);
        let t = t_star();
        let i10 = t * t / 2.0 - t.powi(3) / 3.0 - t.powi(4) / 4.0;
        assert!((table.get(0, 0).unwrap() - volume(&quartic)).abs() < 1e-12);
        assert!((table.get(1, 0).unwrap() - PI * PI * i10).abs() < 1e-12);
        assert!((monomial_norm(&quartic, 1, 0) - PI * PI * i10).abs() < 1e-12);
        assert!(table.strictly_decreasing(6));
        assert!(table.get(9, 0).is_none());
    }

    #[test]
    fn norms_match_polar_integration_of_the_ball() {
        // ball: ‖z₁^p z₂^q‖² = π² p! q! / (p + q + 2)!
        let ball = MonomialNormTable::new(&ReinhardtProfile2::ball(), 6);
        let fact = |n: u32| (1..=n).map(|k| k as f64).product::<f64>();
        for p in 0..=6u32 {
            for q in 0..=6u32 {
                let exact = PI * PI * fact(p) * fact(q) / fact(p + q + 2);
                let got = ball.get(p as usize, q as usize).unwrap();
                assert!((got - exact).abs() < 1e-12 * exact, "{p},{q}");
            }
        }
    }

    #[test]
    fn kernel_origin_examples() {
        let quartic = ReinhardtProfile2::quartic();
        let k = kernel_origin(&MonomialNormTable::new(&quartic, DEFAULT_TABLE_SIZE));
        assert_eq!(k.contributing_terms, 1);
        assert!((k.value - 0.290_850_561_5).abs() < 1e-9);
        assert!((k.value * volume(&quartic) - 1.0).abs() < 1e-12);
        let ball = kernel_origin(&MonomialNormTable::new(&ReinhardtProfile2::ball(), 4));
        assert!((ball.value - 2.0 / (PI * PI)).abs() < 1e-12);
    }

    #[test]
    fn orthogonality_by_monte_carlo() {
        let estimate = monte_carlo_inner_product(&ReinhardtProfile2::quartic(), 1_000_000, 17);
        assert!(estimate.consistent_with_zero(3.0), "{estimate:?}");
        assert!(estimate.std_error.0 > 0.0);
    }

    #[test]
    fn hessian_examples() {
        assert!((hessian_min_eig([0.0, 0.0, 1.0, 0.0]).unwrap() - 2.0).abs() < 1e-15);
        let t = t_star();
        let report = hessian_report([t.sqrt(), 0.0, 0.0, 0.0]).unwrap();
        assert!((report.min_eigenvalue - 2.0).abs() < 1e-12);
        let mut eig: Vec<f64> = report.hessian.symmetric_eigenvalues().iter().cloned().collect();
        eig.sort_by(f64::total_cmp);
        assert!((eig[2] - 4.472_136_0).abs() < 1e-7);
        assert!((eig[3] - 9.416_407_9).abs() < 1e-7);
        assert!(hessian_min_eig([0.5, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let h = 1e-4;
        for x in sample_boundary(20, 3) {
            let report = hessian_report(x).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    let shifted = |di: f64, dj: f64| {
                        let mut y = x;
                        y[i] += di;
                        y[j] += dj;
                        defining_function(y)
                    };
                    let fd = (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (4.0 * h * h);
                    assert!((fd - report.hessian[(i, j)]).abs() < 1e-5, "{i},{j}");
                }
            }
        }
    }

    #[test]
    fn strong_convexity_on_sampled_boundary() {
        let points = sample_boundary(10_000, 1);
        let min = points.iter().map(|&x| hessian_min_eig(x).unwrap()).fold(f64::INFINITY, f64::min);
        assert!((min - 2.0).abs() < 1e-9);
        assert!(min >= 2.0 - 1e-9);
    }

    #[test]
    fn circle_constraint_examples() {
        let a1 = Complex64::from_polar((3f64.sqrt() - 1.0).sqrt(), 0.4);
        let zero = Complex64::new(0.0, 0.0);
        for k in 0..8 {
            assert!(circle_constraint_residual(a1, zero, k as f64).abs() < 1e-12);
        }
        let cert = circle_certificate(a1, zero, THETA_GRID);
        assert!(cert.forces_a3_zero());
        for a3 in [Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.3)] {
            let cert = circle_certificate(a1, a3, THETA_GRID);
            assert!(!cert.forces_a3_zero());
            assert!((cert.oscillation - 2.0 * a3.norm()).abs() < 1e-12);
        }
        // a₃ = 0 gives zero oscillation for any a₁
        for r in [0.1, 0.5, 0.9] {
            assert!(circle_certificate(Complex64::new(r, 0.2), zero, THETA_GRID).forces_a3_zero());
        }
    }

    #[test]
    fn matches_the_displayed_constraint() {
        // |a₁|⁴/4 + |a₁|²/2 + |a₃|²/2 + Re(a₃ e^{-iθ}) + 1/2 - 1
        let a1 = Complex64::new(0.3, -0.7);
        let a3 = Complex64::new(0.2, 0.1);
        for k in 0..12 {
            let theta = k as f64 * 0.5;
            let t = a1.norm_sqr();
            let display = t * t / 4.0 + t / 2.0 + a3.norm_sqr() / 2.0
                + (a3 * Complex64::from_polar(1.0, -theta)).re
                + 0.5
                - 1.0;
            assert!((circle_constraint_residual(a1, a3, theta) - display).abs() < 1e-14);
        }
    }

    #[test]
    fn obstruction_examples() {
        let roots = obstruction_roots();
        assert!((roots.circle - (3f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!((roots.axis - t_star()).abs() < 1e-15);
        assert!((roots.difference - 0.114_016_8).abs() < 1e-7);
        assert!(roots.difference > 0.1);
        assert!((roots.circle.powi(2) + 2.0 * roots.circle - 2.0).abs() < 1e-15);
        assert!((roots.axis.powi(2) + roots.axis - 1.0).abs() < 1e-15);
    }

    #[test]
    fn summary_report() {
        let r = report(1000, 5).unwrap();
        assert_eq!(r.verdict(), "not biholomorphic to the ball");
        let text = r.to_string();
        assert!(text.contains("verdict: not biholomorphic to the ball"));
        assert!(text.contains("volume: 3.43819"));
    }
}
