//! Boundary quadrature on periodic curves, area moments by Stokes reduction,
//! and the radial integrals behind the Reinhardt monomial norms.
//!
//! Area integrals of `f ḡ` with `f, g` holomorphic are never computed on a
//! 2-D grid. Instead `∫_Ω f ḡ dA = (1/2i) ∮ f H dz` for any `H` with
//! `∂H/∂z̄ = ḡ` that is smooth on the closure of the domain, and the
//! boundary integral is done with the periodic trapezoid rule, which is
//! spectrally accurate on analytic curves.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{CurveNode, DomainKind, PlanarDomain, ReinhardtProfile2};

/// Equispaced trapezoid rule on a closed curve; every node has weight `1/M`.
#[derive(Debug, Clone, Default)]
pub struct QuadratureRule {
    nodes: Vec<CurveNode>,
    weight: f64,
}

impl QuadratureRule {
    pub fn new(nodes: Vec<CurveNode>) -> Self {
        let weight = 1.0 / nodes.len() as f64;
        QuadratureRule { nodes, weight }
    }

    pub fn nodes(&self) -> &[CurveNode] {
        &self.nodes
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∮ f(z) dz`.
    pub fn integrate_dz<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes.iter().map(|n| f(n.z) * n.dz).sum::<Complex64>() * self.weight
    }

    /// `∮ f(z) dz̄`.
    pub fn integrate_dzbar<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes.iter().map(|n| f(n.z) * n.dz.conj()).sum::<Complex64>() * self.weight
    }

    /// `∮ f(z) ds` against arc length.
    pub fn integrate_ds<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes.iter().map(|n| f(n.z) * n.dz.norm()).sum::<Complex64>() * self.weight
    }

    pub fn length(&self) -> f64 {
        self.integrate_ds(|_| Complex64::new(1.0, 0.0)).re
    }
}

/// The holomorphic function `(z - center)^power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedPower {
    pub center: Complex64,
    pub power: i32,
}

impl ShiftedPower {
    pub fn new(center: Complex64, power: i32) -> Self {
        ShiftedPower { center, power }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (z - self.center).powi(self.power)
    }

    /// A function `H` with `∂H/∂z̄ = conj(self)` that is smooth wherever
    /// `self` is; the `power = -1` case uses `ln|z - c|²` instead of a
    /// multivalued logarithm.
    fn conj_antiderivative(&self, z: Complex64) -> Complex64 {
        let w = z - self.center;
        if self.power == -1 {
            Complex64::new(w.norm_sqr().ln(), 0.0)
        } else {
            let k = self.power + 1;
            w.conj().powi(k) / k as f64
        }
    }

    fn check_integrable(&self, domain: &PlanarDomain) -> Result<()> {
        if self.power >= 0 {
            return Ok(());
        }
        let singular_inside =
            domain.encloses(self.center) || domain.boundary_distance(self.center) < 1e-8;
        if singular_inside {
            Err(Error::NotIntegrable(format!(
                "(z - {})^{}",
                self.center, self.power
            )))
        } else {
            Ok(())
        }
    }
}

/// `⟨f, g⟩ = ∫_Ω f ḡ dA` by Stokes reduction.
pub fn inner_product(domain: &PlanarDomain, f: &ShiftedPower, g: &ShiftedPower) -> Result<Complex64> {
    f.check_integrable(domain)?;
    g.check_integrable(domain)?;
    Ok(inner_product_unchecked(domain, f, g))
}

pub(crate) fn inner_product_unchecked(
    domain: &PlanarDomain,
    f: &ShiftedPower,
    g: &ShiftedPower,
) -> Complex64 {
    let total: Complex64 = domain
        .curves()
        .iter()
        .map(|c| c.rule().integrate_dz(|z| f.eval(z) * g.conj_antiderivative(z)))
        .sum();
    total / Complex64::new(0.0, 2.0)
}

/// `∫_Ω z^j z̄^k dA`. Negative exponents are allowed only when the origin
/// lies outside the closed domain; `k = -1` goes through the logarithmic
/// antiderivative.
pub fn area_moment(domain: &PlanarDomain, j: i32, k: i32) -> Result<Complex64> {
    let origin = Complex64::new(0.0, 0.0);
    inner_product(domain, &ShiftedPower::new(origin, j), &ShiftedPower::new(origin, k))
}

/// Closed form of `‖(z - c)^k‖²` on an annulus centered at `c`.
pub fn laurent_norm(domain: &PlanarDomain, k: i32) -> Result<f64> {
    match *domain.kind() {
        DomainKind::Annulus { inner, outer, .. } => Ok(if k == -1 {
            2.0 * PI * (outer / inner).ln()
        } else {
            let e = 2 * k + 2;
            PI * (outer.powi(e) - inner.powi(e)) / (k + 1) as f64
        }),
        _ => Err(Error::Unsupported(
            "Laurent norms are defined for annuli only".to_string(),
        )),
    }
}

/// Panel order of the composite Gauss–Legendre rule.
const GAUSS_ORDER: usize = 10;
/// Successive composite estimates must agree to this relative tolerance.
const RADIAL_TOLERANCE: f64 = 1e-13;
const MAX_HALVINGS: u32 = 16;

/// `∫₀^b f` by composite Gauss–Legendre panels, halving every panel until two
/// successive estimates agree.
pub fn adaptive_gauss<F: Fn(f64) -> f64>(f: F, b: f64) -> f64 {
    let rule = GaussLegendre::new(NonZeroUsize::new(GAUSS_ORDER).unwrap());
    let composite = |panels: usize| {
        let h = b / panels as f64;
        (0..panels)
            .map(|p| rule.integrate(p as f64 * h, (p + 1) as f64 * h, &f))
            .sum::<f64>()
    };
    let mut panels = 1;
    let mut previous = composite(panels);
    for _ in 0..MAX_HALVINGS {
        panels *= 2;
        let current = composite(panels);
        if (current - previous).abs() <= RADIAL_TOLERANCE * current.abs() {
            return current;
        }
        previous = current;
    }
    log::warn!("adaptive Gauss quadrature stopped at {panels} panels");
    previous
}

/// `I(p, q) = ∫₀^{t*} t^p (1 - p(t))^{q+1} dt` for the given profile.
pub fn reinhardt_radial_integral(profile: &ReinhardtProfile2, p: u32, q: u32) -> f64 {
    let cutoff = profile.cutoff();
    adaptive_gauss(
        |t| t.powi(p as i32) * (1.0 - profile.p(t)).max(0.0).powi(q as i32 + 1),
        cutoff,
    )
}

/// `B(m, n) = (m-1)!(n-1)!/(m+n-1)!` for positive integers.
fn beta(m: u32, n: u32) -> f64 {
    (1..m).fold(1.0 / n as f64, |acc, k| acc * k as f64 / (n + k) as f64)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// The same integral in closed form. Factoring
/// `1 - at - bt² = b(t* - t)(t + r)` and substituting `t = t* x` turns it
/// into a sum of Beta integrals with positive coefficients,
/// `b^{q+1} t*^{p+q+2} Σ_j C(q+1, j) r^{q+1-j} t*^j B(p+j+1, q+2)`, so no
/// cancellation occurs. Independent of [`reinhardt_radial_integral`].
pub fn reinhardt_radial_integral_exact(profile: &ReinhardtProfile2, p: u32, q: u32) -> f64 {
    let (a, b) = (profile.linear, profile.quadratic);
    let t = profile.cutoff();
    let scale = t.powi((p + q + 2) as i32);
    if b == 0.0 {
        return a.powi(q as i32 + 1) * scale * beta(p + 1, q + 2);
    }
    let r = t + a / b;
    let sum: f64 = (0..=q + 1)
        .map(|j| binomial(q + 1, j) * r.powi((q + 1 - j) as i32) * t.powi(j as i32) * beta(p + j + 1, q + 2))
        .sum();
    b.powi(q as i32 + 1) * scale * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CurveShape;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Polar oracle for ∫ z^j z̄^k over ρ < |z| < R (ρ = 0 for a disk).
    fn polar_moment(inner: f64, outer: f64, j: i32, k: i32) -> Complex64 {
        if j != k {
            return c(0.0, 0.0);
        }
        let e = j + k + 2;
        if e == 0 {
            c(TAU * (outer / inner).ln(), 0.0)
        } else {
            c(TAU * (outer.powi(e) - inner.powi(e)) / e as f64, 0.0)
        }
    }

    #[test]
    fn moment_examples() {
        let disk = PlanarDomain::unit_disk();
        assert!((area_moment(&disk, 0, 0).unwrap() - c(PI, 0.0)).norm() < 1e-12);
        assert!((area_moment(&disk, 1, 1).unwrap() - c(PI / 2.0, 0.0)).norm() < 1e-12);
        assert!(area_moment(&disk, 1, 0).unwrap().norm() < 1e-14);
        // z^{-1} is not square-integrable near the origin of the disk
        assert!(area_moment(&disk, -1, 0).is_err());
        assert!(area_moment(&disk, 0, -1).is_err());
    }

    #[test]
    fn moments_match_polar_oracle() {
        let disk = PlanarDomain::unit_disk();
        let ann = PlanarDomain::annulus(c(0.0, 0.0), 0.5, 1.0).unwrap();
        for j in 0..=6 {
            for k in 0..=6 {
                let d = area_moment(&disk, j, k).unwrap();
                assert!((d - polar_moment(0.0, 1.0, j, k)).norm() < 1e-10, "disk {j},{k}");
            }
        }
        for j in -6..=6 {
            for k in -6..=6 {
                let a = area_moment(&ann, j, k).unwrap();
                assert!((a - polar_moment(0.5, 1.0, j, k)).norm() < 1e-10, "annulus {j},{k}");
            }
        }
    }

    #[test]
    fn moments_are_hermitian() {
        let dom = PlanarDomain::smooth(
            CurveShape::Ellipse {
                center: c(0.1, 0.0),
                semi_major: 1.2,
                semi_minor: 0.9,
                angle: 0.3,
            },
            vec![],
        )
        .unwrap();
        for j in 0..=8 {
            for k in 0..=8 {
                let a = area_moment(&dom, j, k).unwrap();
                let b = area_moment(&dom, k, j).unwrap();
                assert!((a - b.conj()).norm() < 1e-12, "{j},{k}");
            }
        }
    }

    #[test]
    fn trapezoid_self_convergence() {
        let coarse = PlanarDomain::annulus_with_nodes(c(0.0, 0.0), 0.5, 1.0, Some(256)).unwrap();
        let fine = coarse.with_nodes(512).unwrap();
        for (j, k) in [(0, 0), (3, 3), (-2, -2), (2, -1), (5, 1)] {
            let a = area_moment(&coarse, j, k).unwrap();
            let b = area_moment(&fine, j, k).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rule_reproduces_circle_length() {
        let d = PlanarDomain::disk(c(0.3, -0.2), 1.7).unwrap();
        assert!((d.outer().rule().length() - TAU * 1.7).abs() < 1e-10);
    }

    #[test]
    fn laurent_norm_examples() {
        let ann = PlanarDomain::annulus(c(0.0, 0.0), 0.5, 1.0).unwrap();
        assert!((laurent_norm(&ann, 0).unwrap() - 0.75 * PI).abs() < 1e-12);
        // radial oracle: 2π ∫_{1/2}^1 r^{-1} dr
        assert!((laurent_norm(&ann, -1).unwrap() - 4.355_172_180_607_204).abs() < 1e-12);
        assert!((laurent_norm(&ann, 1).unwrap() - PI * (1.0 - 0.0625) / 2.0).abs() < 1e-12);
        for k in -8..=8 {
            let stokes = area_moment(&ann, k, k).unwrap();
            assert!((stokes.re - laurent_norm(&ann, k).unwrap()).abs() < 1e-9 * stokes.re);
        }
        assert!(laurent_norm(&PlanarDomain::unit_disk(), 0).is_err());
    }

    #[test]
    fn radial_integral_examples() {
        let prof = ReinhardtProfile2::quartic();
        let t = prof.cutoff();
        let i00 = t - t * t / 2.0 - t.powi(3) / 3.0;
        let i10 = t * t / 2.0 - t.powi(3) / 3.0 - t.powi(4) / 4.0;
        assert!((i00 - 0.348_361_7).abs() < 1e-7);
        assert!((i10 - 0.075_819_2).abs() < 1e-7);
        assert!((reinhardt_radial_integral(&prof, 0, 0) - i00).abs() < 1e-12 * i00);
        assert!((reinhardt_radial_integral(&prof, 1, 0) - i10).abs() < 1e-12 * i10);
        let mut prev = f64::INFINITY;
        for q in 0..=6 {
            let v = reinhardt_radial_integral(&prof, 0, q);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn radial_integral_two_routes_agree() {
        for prof in [ReinhardtProfile2::quartic(), ReinhardtProfile2::ball()] {
            for p in 0..=8 {
                for q in 0..=8 {
                    let a = reinhardt_radial_integral(&prof, p, q);
                    let b = reinhardt_radial_integral_exact(&prof, p, q);
                    assert!((a - b).abs() <= 1e-12 * b.abs(), "{p},{q}: {a} vs {b}");
                }
            }
        }
    }
}
