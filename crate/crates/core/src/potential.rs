//! Green's functions, Robin constants, the Suita inequality
//! `π K(z, z) ≥ e^{2λ(z)}` and volumes of the sublevel sets
//! `Ω_τ = {z : g(z, z₀) < τ}`.
//!
//! Green's functions are negative, vanish on the boundary and split as
//! `g(z, w) = ln|z - w| + h(z, w)` with `h` harmonic. Disks and annuli use
//! closed forms (the annulus through a truncated product), other smooth
//! domains solve a Dirichlet problem for `h(·, w)` with data `-ln|ζ - w|`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bergman::OrthonormalBasis;
use crate::error::{Error, Result};
use crate::geometry::{DomainKind, Membership, PlanarDomain};
use crate::layer::{DirichletSolver, LayerPotential};

/// `z` and `w` closer than this are rejected by [`green`].
pub const POLE_PROXIMITY: f64 = 1e-10;
/// Largest spread of the per-angle Robin extrapolations.
pub const ROBIN_SPREAD_TOLERANCE: f64 = 1e-6;
/// Largest offset `ε` used by the extrapolated Robin constant; the others
/// are `ε/2` and `ε/4`.
pub const ROBIN_OFFSET: f64 = 1e-3;
/// Tolerance of the Suita inequality.
pub const SUITA_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_RAYS: usize = 720;
/// Radial samples per ray used to bracket the level crossing.
const RAY_SAMPLES: usize = 64;

enum Representation {
    Disk {
        center: Complex64,
        radius: f64,
    },
    /// Normalized to `q < |ζ| < 1` with `ζ = (z - c)/R`.
    Annulus {
        center: Complex64,
        outer: f64,
        q: f64,
        terms: usize,
    },
    Layer(DirichletSolver),
}

/// Green's function of a fixed domain.
pub struct GreensEvaluator {
    domain: PlanarDomain,
    repr: Representation,
}

/// Green's function with a fixed pole; holds the solved regular part on
/// general domains.
pub struct PoleGreen<'a> {
    evaluator: &'a GreensEvaluator,
    w: Complex64,
    layer: Option<LayerPotential>,
}

/// Product `(1 - x) Π_{k=1}^{K} (1 - q^{2k} x)(1 - q^{2k}/x)`.
fn annulus_product(x: Complex64, q: f64, terms: usize) -> Complex64 {
    let mut value = 1.0 - x;
    let mut qk = 1.0;
    for _ in 0..terms {
        qk *= q * q;
        value *= (1.0 - qk * x) * (1.0 - qk / x);
    }
    value
}

/// `Σ_k ln|(1 - q^{2k} x)(1 - q^{2k}/x)|`, the product without its first
/// factor.
fn annulus_tail(x: Complex64, q: f64, terms: usize) -> f64 {
    let mut total = 0.0;
    let mut qk = 1.0;
    for _ in 0..terms {
        qk *= q * q;
        total += ((1.0 - qk * x) * (1.0 - qk / x)).norm().ln();
    }
    total
}

impl GreensEvaluator {
    pub fn new(domain: &PlanarDomain) -> Result<Self> {
        let repr = match *domain.kind() {
            DomainKind::Disk { center, radius } | DomainKind::PuncturedDisk { center, radius, .. } => {
                // finite point sets are polar, so the disk's Green function
                // serves the punctured disk unchanged
                Representation::Disk { center, radius }
            }
            DomainKind::Annulus {
                center,
                inner,
                outer,
            } => {
                let q = inner / outer;
                let terms = (1e-14f64.ln() / (2.0 * q.ln())).floor() as usize + 1;
                Representation::Annulus {
                    center,
                    outer,
                    q,
                    terms,
                }
            }
            DomainKind::SmoothMultiplyConnected => Representation::Layer(DirichletSolver::new(domain)?),
        };
        Ok(GreensEvaluator {
            domain: domain.clone(),
            repr,
        })
    }

    pub fn domain(&self) -> &PlanarDomain {
        &self.domain
    }

    /// Number of product factors used for an annulus.
    pub fn product_terms(&self) -> Option<usize> {
        match self.repr {
            Representation::Annulus { terms, .. } => Some(terms),
            _ => None,
        }
    }

    fn require_interior(&self, z: Complex64) -> Result<()> {
        match self.domain.contains(z) {
            Membership::Inside => Ok(()),
            Membership::Boundary => Err(Error::BoundaryAmbiguous(z)),
            Membership::Outside => Err(Error::NotInterior(z)),
        }
    }

    pub fn with_pole(&self, w: Complex64) -> Result<PoleGreen<'_>> {
        self.require_interior(w)?;
        let layer = match &self.repr {
            Representation::Layer(solver) => {
                let nodes = solver.nodes();
                let data: Vec<f64> = nodes.z.iter().map(|z| -(z - w).norm().ln()).collect();
                Some(solver.solve(&data)?)
            }
            _ => None,
        };
        Ok(PoleGreen {
            evaluator: self,
            w,
            layer,
        })
    }

    pub fn green(&self, z: Complex64, w: Complex64) -> Result<f64> {
        self.with_pole(w)?.green(z)
    }

    pub fn regular_part(&self, z: Complex64, w: Complex64) -> Result<f64> {
        self.require_interior(z)?;
        Ok(self.with_pole(w)?.regular_part(z))
    }
}

impl PoleGreen<'_> {
    pub fn pole(&self) -> Complex64 {
        self.w
    }

    /// `h(z, w) = g(z, w) - ln|z - w|`, harmonic in `z` on the closed
    /// domain.
    pub fn regular_part(&self, z: Complex64) -> f64 {
        let w = self.w;
        match &self.evaluator.repr {
            Representation::Disk { center, radius } => {
                radius.ln() - (radius * radius - (z - center) * (w - center).conj()).norm().ln()
            }
            Representation::Annulus {
                center,
                outer,
                q,
                terms,
            } => {
                let zn = (z - center) / outer;
                let wn = (w - center) / outer;
                annulus_tail(zn / wn, *q, *terms) - annulus_product(zn * wn.conj(), *q, *terms).norm().ln()
                    - wn.norm().ln() * zn.norm().ln() / q.ln()
                    - outer.ln()
            }
            Representation::Layer(_) => self.layer.as_ref().expect("solved at construction").value(z),
        }
    }

    /// Green's function without membership checks, for points already known
    /// to be interior.
    fn green_unchecked(&self, z: Complex64) -> f64 {
        (z - self.w).norm().ln() + self.regular_part(z)
    }

    pub fn green(&self, z: Complex64) -> Result<f64> {
        let distance = (z - self.w).norm();
        if distance < POLE_PROXIMITY {
            return Err(Error::PoleProximity {
                z,
                w: self.w,
                distance,
            });
        }
        self.evaluator.require_interior(z)?;
        Ok(self.green_unchecked(z))
    }
}

pub fn green(domain: &PlanarDomain, z: Complex64, w: Complex64) -> Result<f64> {
    GreensEvaluator::new(domain)?.green(z, w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RobinMethod {
    ClosedForm,
    /// Richardson extrapolation over four directions; `spread` is the
    /// largest deviation of a single direction from the mean.
    Extrapolated { spread: f64 },
}

/// `λ(z₀) = lim_{z→z₀} g(z, z₀) - ln|z - z₀|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobinValue {
    pub z0: Complex64,
    pub lambda: f64,
    pub method: RobinMethod,
}

/// Closed form for disks and annuli, extrapolation otherwise.
pub fn robin(domain: &PlanarDomain, z0: Complex64) -> Result<RobinValue> {
    let evaluator = GreensEvaluator::new(domain)?;
    match evaluator.repr {
        Representation::Layer(_) => robin_extrapolated(&evaluator, z0),
        _ => Ok(RobinValue {
            z0,
            lambda: evaluator.with_pole(z0)?.regular_part(z0),
            method: RobinMethod::ClosedForm,
        }),
    }
}

/// `(8 f(ε/4) - 6 f(ε/2) + f(ε)) / 3` with `f(ε) = g(z₀ + ε e^{iθ}, z₀) - ln ε`,
/// averaged over `θ ∈ {0, π/2, π, 3π/2}`. Each direction is accurate to
/// `O(ε³)`, so the spread bounds the error of the mean.
pub fn robin_extrapolated(evaluator: &GreensEvaluator, z0: Complex64) -> Result<RobinValue> {
    let pole = evaluator.with_pole(z0)?;
    let eps = ROBIN_OFFSET;
    let estimates = (0..4)
        .map(|k| {
            let dir = Complex64::from_polar(1.0, k as f64 * PI / 2.0);
            let f = |e: f64| -> Result<f64> { Ok(pole.green(z0 + e * dir)? - e.ln()) };
            Ok((8.0 * f(eps / 4.0)? - 6.0 * f(eps / 2.0)? + f(eps)?) / 3.0)
        })
        .collect::<Result<Vec<f64>>>()?;
    let lambda = estimates.iter().sum::<f64>() / 4.0;
    let spread = estimates.iter().map(|e| (e - lambda).abs()).fold(0.0, f64::max);
    if spread > ROBIN_SPREAD_TOLERANCE {
        return Err(Error::NumericalFailure(format!(
            "Robin extrapolation at {z0} disagrees across directions by {spread:e}"
        )));
    }
    Ok(RobinValue {
        z0,
        lambda,
        method: RobinMethod::Extrapolated { spread },
    })
}

/// `π K(z, z) - e^{2λ(z)}`, non-negative by the Suita inequality.
pub fn suita_margin(domain: &PlanarDomain, basis: &OrthonormalBasis, z: Complex64) -> Result<f64> {
    if domain.contains(z) != Membership::Inside {
        return Err(Error::NotInterior(z));
    }
    if domain.boundary_distance(z) < basis.guard_band() {
        return Err(Error::InvalidInput(format!(
            "{z} lies in the kernel guard band (width {:e})",
            basis.guard_band()
        )));
    }
    let lambda = robin(domain, z)?.lambda;
    let margin = PI * basis.kernel(z, z).re - (2.0 * lambda).exp();
    if margin < -SUITA_TOLERANCE {
        return Err(Error::NumericalFailure(format!(
            "Suita margin {margin:e} at {z} is negative beyond tolerance"
        )));
    }
    Ok(margin)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SublevelEntry {
    pub tau: f64,
    pub volume: f64,
    /// `e^{2τ} / v(Ω_τ)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SublevelProfile {
    pub z0: Complex64,
    /// Sorted by increasing `τ`.
    pub entries: Vec<SublevelEntry>,
    /// Levels whose sublevel set was not star-shaped about `z₀` along the
    /// sampled rays.
    pub dropped: Vec<f64>,
}

impl SublevelProfile {
    /// True when the ratio does not increase with `τ` beyond `tolerance` per
    /// step.
    pub fn ratio_non_increasing(&self, tolerance: f64) -> bool {
        self.entries
            .windows(2)
            .all(|w| w[1].ratio <= w[0].ratio + tolerance)
    }

    pub fn volumes_increasing(&self) -> bool {
        self.entries.windows(2).all(|w| w[1].volume > w[0].volume)
    }

    /// `|v(Ω_τ) e^{-2(τ - λ)}/π - 1|` for the entry at `tau`.
    pub fn sandwich_deviation(&self, tau: f64, lambda: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.tau == tau)
            .map(|e| (e.volume * (-2.0 * (e.tau - lambda)).exp() / PI - 1.0).abs())
    }
}

/// Radius at which `g` reaches `tau` along one ray, or `None` when the
/// sublevel set is not a single segment on that ray.
fn ray_crossing(pole: &PoleGreen<'_>, domain: &PlanarDomain, dir: Complex64, tau: f64) -> Option<f64> {
    let z0 = pole.pole();
    // walk to the boundary to find the usable length of the ray
    let mut reach = domain.boundary_distance(z0);
    let step = reach / 16.0;
    while domain.contains(z0 + (reach + step) * dir) == Membership::Inside {
        reach += step;
    }
    let radii: Vec<f64> = (1..=RAY_SAMPLES)
        .map(|j| reach * j as f64 / (RAY_SAMPLES as f64 + 1.0))
        .collect();
    let values: Vec<f64> = radii.iter().map(|&r| pole.green_unchecked(z0 + r * dir)).collect();
    let first = values.iter().position(|&g| g >= tau)?;
    if values[first..].iter().any(|&g| g < tau) {
        return None;
    }
    let (mut lo, mut hi) = if first == 0 { (0.0, radii[0]) } else { (radii[first - 1], radii[first]) };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mid > 0.0 && pole.green_unchecked(z0 + mid * dir) < tau {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

pub fn sublevel_profile_with(
    evaluator: &GreensEvaluator,
    z0: Complex64,
    taus: &[f64],
    rays: usize,
) -> Result<SublevelProfile> {
    if let Some(t) = taus.iter().find(|t| !(**t < 0.0)) {
        return Err(Error::InvalidInput(format!("sublevel τ must be negative, got {t}")));
    }
    let pole = evaluator.with_pole(z0)?;
    let domain = evaluator.domain();
    let mut sorted = taus.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut entries = vec![];
    let mut dropped = vec![];
    for tau in sorted {
        let radii: Vec<Option<f64>> = (0..rays)
            .into_par_iter()
            .map(|k| {
                let dir = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / rays as f64);
                ray_crossing(&pole, domain, dir, tau)
            })
            .collect();
        if radii.iter().any(Option::is_none) {
            log::warn!("sublevel set at τ = {tau} is not star-shaped about {z0}; dropped");
            dropped.push(tau);
            continue;
        }
        let volume = radii.iter().map(|r| 0.5 * r.unwrap().powi(2)).sum::<f64>() * 2.0 * PI / rays as f64;
        entries.push(SublevelEntry {
            tau,
            volume,
            ratio: (2.0 * tau).exp() / volume,
        });
    }
    Ok(SublevelProfile { z0, entries, dropped })
}

pub fn sublevel_profile(domain: &PlanarDomain, z0: Complex64, taus: &[f64]) -> Result<SublevelProfile> {
    sublevel_profile_with(&GreensEvaluator::new(domain)?, z0, taus, DEFAULT_RAYS)
}
