//! Decides whether a bounded planar domain is a disk minus a polar set.
//!
//! A domain is minimal at `z₀` iff `K(z₀, z₀) = 1/v(Ω)`, equivalently iff the
//! kernel row `K(·, z₀)` is the constant `1/v(Ω)`; the only such domains are
//! disks centered at `z₀` with finitely many (more generally, polar) points
//! removed. The classifier scans `K(z, z)v(Ω) - 1` on a grid, refines the
//! minimizer and cross-checks the constant-row criterion.

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bergman::{default_basis, OrthonormalBasis, DEFAULT_DEGREE};
use crate::error::{Error, Result};
use crate::geometry::{Membership, PlanarDomain};

/// `K·v - 1` at or below this counts as minimal.
pub const MINIMALITY_THRESHOLD: f64 = 1e-4;
/// `max |K(z, z₀) - 1/v|` below this counts as a constant kernel row.
pub const CONSTANCY_THRESHOLD: f64 = 1e-4;
pub const DEFAULT_GRID: usize = 51;
/// Smallest step of the argmin refinement.
pub const REFINE_STEP: f64 = 1e-8;
/// Number of sample points for the constant-row check.
pub const CONSTANCY_SAMPLES: usize = 20;
const CONSTANCY_SEED: u64 = 0x5eed;
/// Grid margins closer than this (relative) are treated as ties.
const TIE_TOLERANCE: f64 = 1e-12;

/// Minimum of `K(z, z)v(Ω) - 1` over the admissible grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimalScan {
    pub margin: f64,
    pub argmin: Complex64,
    pub grid: usize,
    /// Grid points inside the domain and outside the guard band.
    pub admissible: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// `Ω = D(center, radius) \ P` with `P` a possibly empty polar set.
    DiskMinusPolar { center: Complex64, radius: f64 },
    NotMinimal { margin: f64, argmin: Complex64 },
    /// `v(Ω) = ∞`: the domain is `ℂ \ P` with `P` polar, by label only.
    InfiniteVolumeCase { label: String },
    /// Margin and kernel-row criteria disagree, which the theory forbids;
    /// signals numerical trouble.
    InconsistentEvidence { margin: f64, constancy: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    pub grid: usize,
    pub scan_margin: f64,
    pub scan_argmin: Complex64,
    /// Minimizer after local refinement and its margin.
    pub refined: Complex64,
    pub refined_margin: f64,
    pub constancy: f64,
    pub volume: f64,
    pub margin_threshold: f64,
    pub constancy_threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationVerdict {
    pub verdict: Verdict,
    pub evidence: Option<Evidence>,
}

impl ClassificationVerdict {
    /// Whether the two minimality criteria agree.
    pub fn consistent(&self) -> bool {
        match &self.evidence {
            Some(e) => {
                (e.refined_margin <= e.margin_threshold) == (e.constancy < e.constancy_threshold)
            }
            None => true,
        }
    }
}

fn margin_at(basis: &OrthonormalBasis, z: Complex64) -> f64 {
    basis.kernel(z, z).re * basis.volume() - 1.0
}

fn admissible(domain: &PlanarDomain, basis: &OrthonormalBasis, z: Complex64) -> bool {
    domain.contains(z) == Membership::Inside && domain.boundary_distance(z) >= basis.guard_band()
}

/// `(min K(z, z)v - 1, argmin)` over a `grid × grid` lattice spanning the
/// bounding box. Ties go to the point closest to the centroid of the
/// admissible points, then to the smallest `(re, im)`.
pub fn minimal_scan(domain: &PlanarDomain, basis: &OrthonormalBasis, grid: usize) -> Result<MinimalScan> {
    if grid < 2 {
        return Err(Error::InvalidInput(format!("grid resolution {grid} is below 2")));
    }
    let (x0, x1, y0, y1) = domain.bounding_box();
    let at = |i: usize, j: usize| {
        Complex64::new(
            x0 + (x1 - x0) * i as f64 / (grid - 1) as f64,
            y0 + (y1 - y0) * j as f64 / (grid - 1) as f64,
        )
    };
    // row-major order, preserved by the indexed parallel collect
    let values: Vec<Option<(Complex64, f64)>> = (0..grid * grid)
        .into_par_iter()
        .map(|k| {
            let z = at(k % grid, k / grid);
            admissible(domain, basis, z).then(|| (z, margin_at(basis, z)))
        })
        .collect();
    let points: Vec<(Complex64, f64)> = values.into_iter().flatten().collect();
    if points.is_empty() {
        return Err(Error::InvalidInput(
            "no grid point lies inside the domain outside the guard band".to_string(),
        ));
    }
    let centroid = points.iter().map(|p| p.0).sum::<Complex64>() / points.len() as f64;
    let min = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let tie = TIE_TOLERANCE * min.abs().max(1.0);
    let (argmin, _) = points
        .iter()
        .filter(|p| p.1 <= min + tie)
        .min_by(|a, b| {
            (a.0 - centroid)
                .norm()
                .total_cmp(&(b.0 - centroid).norm())
                .then(a.0.re.total_cmp(&b.0.re))
                .then(a.0.im.total_cmp(&b.0.im))
        })
        .copied()
        .expect("nonempty");
    Ok(MinimalScan {
        margin: margin_at(basis, argmin),
        argmin,
        grid,
        admissible: points.len(),
    })
}

/// Coordinate descent on `K(z, z)v - 1` from `start`, halving the step down
/// to [`REFINE_STEP`].
pub fn refine_minimum(basis: &OrthonormalBasis, start: Complex64, step: f64) -> (Complex64, f64) {
    let domain = basis.domain();
    let mut z = start;
    let mut value = margin_at(basis, z);
    let mut h = step;
    let directions = [
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, -1.0),
    ];
    while h >= REFINE_STEP {
        let mut moved = false;
        for d in directions {
            let candidate = z + h * d;
            if !admissible(domain, basis, candidate) {
                continue;
            }
            let v = margin_at(basis, candidate);
            if v < value {
                z = candidate;
                value = v;
                moved = true;
            }
        }
        if !moved {
            h /= 2.0;
        }
    }
    (z, value)
}

/// `max |K(z, z₀) - 1/v(Ω)|` over the samples.
pub fn kernel_row_constancy(basis: &OrthonormalBasis, z0: Complex64, samples: &[Complex64]) -> f64 {
    let target = 1.0 / basis.volume();
    samples
        .iter()
        .map(|&z| (basis.kernel(z, z0) - target).norm())
        .fold(0.0, f64::max)
}

/// `|∫_Ω K(w, z₀) dv(w) - 1|`, evaluated from moments.
pub fn mean_one_check(basis: &OrthonormalBasis, z0: Complex64) -> Result<f64> {
    if basis.domain().contains(z0) != Membership::Inside {
        return Err(Error::NotInterior(z0));
    }
    Ok((basis.mean_value_integral(z0)? - 1.0).norm())
}

/// Deterministic interior samples outside the guard band.
pub fn constancy_samples(basis: &OrthonormalBasis, count: usize) -> Vec<Complex64> {
    let domain = basis.domain();
    let (x0, x1, y0, y1) = domain.bounding_box();
    let mut rng = ChaCha8Rng::seed_from_u64(CONSTANCY_SEED);
    let mut samples = Vec::with_capacity(count);
    let mut attempts = 0;
    while samples.len() < count && attempts < 10_000 * count.max(1) {
        attempts += 1;
        let z = Complex64::new(rng.random_range(x0..=x1), rng.random_range(y0..=y1));
        if admissible(domain, basis, z) {
            samples.push(z);
        }
    }
    samples
}

/// Classification with an explicit basis and grid.
pub fn classify_with(basis: &OrthonormalBasis, grid: usize) -> Result<ClassificationVerdict> {
    let domain = basis.domain();
    let scan = minimal_scan(domain, basis, grid)?;
    let (x0, x1, _, _) = domain.bounding_box();
    let spacing = (x1 - x0) / (grid - 1) as f64;
    let (refined, refined_margin) = refine_minimum(basis, scan.argmin, spacing);
    let samples = constancy_samples(basis, CONSTANCY_SAMPLES);
    let constancy = kernel_row_constancy(basis, refined, &samples);
    let volume = basis.volume();
    let evidence = Evidence {
        grid,
        scan_margin: scan.margin,
        scan_argmin: scan.argmin,
        refined,
        refined_margin,
        constancy,
        volume,
        margin_threshold: MINIMALITY_THRESHOLD,
        constancy_threshold: CONSTANCY_THRESHOLD,
    };
    let minimal = refined_margin <= MINIMALITY_THRESHOLD;
    let constant = constancy < CONSTANCY_THRESHOLD;
    let verdict = match (minimal, constant) {
        (true, true) => Verdict::DiskMinusPolar {
            center: refined,
            radius: (volume / std::f64::consts::PI).sqrt(),
        },
        (false, false) => Verdict::NotMinimal {
            margin: refined_margin,
            argmin: refined,
        },
        _ => {
            log::warn!(
                "minimality margin {refined_margin:e} and kernel-row constancy {constancy:e} disagree"
            );
            Verdict::InconsistentEvidence {
                margin: refined_margin,
                constancy,
            }
        }
    };
    Ok(ClassificationVerdict {
        verdict,
        evidence: Some(evidence),
    })
}

/// Classification with the default basis and grid.
pub fn classify(domain: &PlanarDomain) -> Result<ClassificationVerdict> {
    let basis = default_basis(domain, DEFAULT_DEGREE)?;
    classify_with(&basis, DEFAULT_GRID)
}

/// Verdict for a domain declared to have infinite volume. No numerics are
/// possible there; whether the complement is polar is taken on trust.
pub fn classify_unbounded() -> ClassificationVerdict {
    ClassificationVerdict {
        verdict: Verdict::InfiniteVolumeCase {
            label: "v(Ω) = ∞: Ω = ℂ \\ P with P a possibly empty polar set".to_string(),
        },
        evidence: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_domains::{c, triply_connected};
    use std::f64::consts::PI;

    fn disk_verdict(v: &ClassificationVerdict) -> (Complex64, f64) {
        match v.verdict {
            Verdict::DiskMinusPolar { center, radius } => (center, radius),
            ref other => panic!("expected a disk verdict, got {other:?}"),
        }
    }

    #[test]
    fn disk_scan_finds_center() {
        let disk = PlanarDomain::unit_disk();
        let basis = default_basis(&disk, 30).unwrap();
        let scan = minimal_scan(&disk, &basis, 51).unwrap();
        assert!(scan.margin.abs() < 1e-10);
        assert!(scan.argmin.norm() < 1e-12);

        let shifted = PlanarDomain::disk(c(1.0, 2.0), 1.5).unwrap();
        let basis = default_basis(&shifted, 30).unwrap();
        let scan = minimal_scan(&shifted, &basis, 51).unwrap();
        assert!(scan.margin.abs() < 1e-10);
        assert!((scan.argmin - c(1.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn annulus_scan_lands_on_the_middle_circle() {
        let ann = PlanarDomain::annulus(c(0.0, 0.0), 0.5, 1.0).unwrap();
        let basis = default_basis(&ann, 30).unwrap();
        let scan = minimal_scan(&ann, &basis, 51).unwrap();
        assert!(scan.margin > 1e-3);
        assert!((scan.argmin.norm() - 0.5f64.sqrt()).abs() < 0.05, "{}", scan.argmin);
    }

    #[test]
    fn empty_grid_is_rejected() {
        let disk = PlanarDomain::unit_disk();
        let basis = default_basis(&disk, 10).unwrap().with_guard_fraction(2.0);
        assert!(minimal_scan(&disk, &basis, 51).is_err());
    }

    #[test]
    fn constancy_examples() {
        let disk = PlanarDomain::unit_disk();
        let basis = default_basis(&disk, 30).unwrap();
        let samples = constancy_samples(&basis, 20);
        assert_eq!(samples.len(), 20);
        assert!(kernel_row_constancy(&basis, c(0.0, 0.0), &samples) < 1e-10);

        let ann = PlanarDomain::annulus(c(0.0, 0.0), 0.5, 1.0).unwrap();
        let basis = default_basis(&ann, 30).unwrap();
        let samples = constancy_samples(&basis, 20);
        assert!(kernel_row_constancy(&basis, c(0.5f64.sqrt(), 0.0), &samples) > 1e-3);

        let punctured = PlanarDomain::punctured_disk(c(0.0, 0.0), 1.0, vec![c(0.3, 0.0)]).unwrap();
        let basis = default_basis(&punctured, 30).unwrap();
        let samples = constancy_samples(&basis, 20);
        assert!(kernel_row_constancy(&basis, c(0.0, 0.0), &samples) < 1e-10);
    }

    #[test]
    fn mean_one_examples() {
        let disk = PlanarDomain::unit_disk();
        assert!(mean_one_check(&default_basis(&disk, 30).unwrap(), c(0.0, 0.0)).unwrap() < 1e-12);
        let ann = PlanarDomain::annulus(c(0.0, 0.0), 0.5, 1.0).unwrap();
        assert!(mean_one_check(&default_basis(&ann, 30).unwrap(), c(0.7, 0.0)).unwrap() < 1e-10);
        let shifted = PlanarDomain::disk(c(1.0, 2.0), 1.5).unwrap();
        assert!(mean_one_check(&default_basis(&shifted, 30).unwrap(), c(1.3, 2.1)).unwrap() < 1e-10);
        let domain = triply_connected();
        let basis = default_basis(&domain, 30).unwrap();
        for z0 in [c(0.0, 0.6), c(-0.1, -0.6), c(0.75, -0.3)] {
            assert!(mean_one_check(&basis, z0).unwrap() < 1e-10);
        }
        assert!(mean_one_check(&basis, c(-0.45, 0.0)).is_err());
    }

    #[test]
    fn classify_examples() {
        let disk = classify(&PlanarDomain::unit_disk()).unwrap();
        let (center, radius) = disk_verdict(&disk);
        assert!(center.norm() < 1e-3 && (radius - 1.0).abs() < 1e-3);
        assert!(disk.consistent());

        let punctured =
            PlanarDomain::punctured_disk(c(0.0, 0.0), 1.0, vec![c(0.3, 0.0), c(0.0, -0.2)]).unwrap();
        let verdict = classify(&punctured).unwrap();
        assert_eq!(disk_verdict(&verdict), disk_verdict(&disk));

        let ann = classify(&PlanarDomain::annulus(c(0.0, 0.0), 0.5, 1.0).unwrap()).unwrap();
        match ann.verdict {
            Verdict::NotMinimal { margin, .. } => assert!(margin > 1e-3),
            ref other => panic!("{other:?}"),
        }
        assert!(ann.consistent());
    }

    #[test]
    fn verdict_radius_follows_volume() {
        let disk = PlanarDomain::disk(c(0.0, 0.0), 1.3).unwrap();
        let verdict = classify(&disk).unwrap();
        let (_, radius) = disk_verdict(&verdict);
        assert!((radius - (disk.area() / PI).sqrt()).abs() < 1e-3 * radius);
    }

    #[test]
    fn rigid_motions_move_the_verdict() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..5 {
            let center = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let r = rng.random_range(0.5..2.5);
            let verdict = classify(&PlanarDomain::disk(center, r).unwrap()).unwrap();
            let (found, radius) = disk_verdict(&verdict);
            assert!((found - center).norm() < 1e-3, "{found} vs {center}");
            assert!((radius - r).abs() < 1e-3);
        }
    }

    #[test]
    fn punctures_do_not_change_the_verdict() {
        let center = c(0.2, -0.3);
        let plain = classify(&PlanarDomain::disk(center, 0.8).unwrap()).unwrap();
        let punctures = vec![c(0.3, -0.3), c(0.0, 0.0), c(0.2, 0.2), c(-0.3, -0.5), c(0.5, -0.1)];
        for k in 1..=5 {
            let d = PlanarDomain::punctured_disk(center, 0.8, punctures[..k].to_vec()).unwrap();
            assert_eq!(classify(&d).unwrap().verdict, plain.verdict);
        }
    }

    #[test]
    fn triply_connected_domain_is_not_minimal() {
        let verdict = classify(&triply_connected()).unwrap();
        assert!(matches!(verdict.verdict, Verdict::NotMinimal { .. }), "{verdict:?}");
        assert!(verdict.consistent());
    }

    #[test]
    fn unbounded_label() {
        let v = classify_unbounded();
        assert!(matches!(v.verdict, Verdict::InfiniteVolumeCase { .. }));
        assert!(v.evidence.is_none());
    }
}
