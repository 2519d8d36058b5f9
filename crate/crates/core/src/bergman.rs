//! Orthonormal bases of the Bergman space and the kernel series
//! `K(z, w) = Σ φ_j(z) conj(φ_j(w))`.
//!
//! A dictionary of holomorphic functions `(z - c)^m` is orthonormalized
//! through a Cholesky factorization of its Gram matrix, whose entries come
//! from boundary moments (see [`crate::quadrature`]). The constant function is
//! always the first dictionary element, so `φ₀ = v(Ω)^{-1/2}` and every
//! truncated kernel satisfies `K_N(z, z) ≥ 1 / v(Ω)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{DomainKind, Membership, PlanarDomain};
use crate::quadrature::{inner_product, ShiftedPower};

pub const DEFAULT_DEGREE: usize = 30;
/// Largest accepted condition number of the Jacobi-scaled Gram matrix.
pub const MAX_CONDITION: f64 = 1e12;
/// Evaluation guard band as a fraction of the inradius.
pub const DEFAULT_GUARD_FRACTION: f64 = 0.1;
/// `K(z,z)·v - 1` below `-MARGIN_TOLERANCE` contradicts the volume inequality.
pub const MARGIN_TOLERANCE: f64 = 1e-8;

/// Ordered list of dictionary functions `(z - c)^m`, constant first.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisDictionary {
    terms: Vec<ShiftedPower>,
    max_degree: usize,
}

impl BasisDictionary {
    /// `(z - c)^j`, `j = 0..=degree`.
    pub fn monomials(center: Complex64, degree: usize) -> Self {
        BasisDictionary {
            terms: (0..=degree as i32)
                .map(|j| ShiftedPower::new(center, j))
                .collect(),
            max_degree: degree,
        }
    }

    /// `(z - c)^k` for `|k| ≤ degree`, ordered `0, 1, -1, 2, -2, …`.
    pub fn laurent(center: Complex64, degree: usize) -> Self {
        let mut terms = vec![ShiftedPower::new(center, 0)];
        for k in 1..=degree as i32 {
            terms.push(ShiftedPower::new(center, k));
            terms.push(ShiftedPower::new(center, -k));
        }
        BasisDictionary {
            terms,
            max_degree: degree,
        }
    }

    /// Monomials about `center` interleaved, degree by degree, with
    /// `(z - p)^{-m}` for every pole `p`, `m ≤ pole_degree`.
    pub fn with_poles(
        center: Complex64,
        poles: &[Complex64],
        degree: usize,
        pole_degree: usize,
    ) -> Self {
        let mut terms = vec![ShiftedPower::new(center, 0)];
        for d in 1..=degree.max(pole_degree) as i32 {
            if d as usize <= degree {
                terms.push(ShiftedPower::new(center, d));
            }
            if d as usize <= pole_degree {
                terms.extend(poles.iter().map(|&p| ShiftedPower::new(p, -d)));
            }
        }
        BasisDictionary {
            terms,
            max_degree: degree.max(pole_degree),
        }
    }

    /// The default dictionary for a domain: monomials on simply connected
    /// domains, Laurent monomials on annuli, and monomials plus poles at the
    /// hole centers otherwise.
    pub fn for_domain(domain: &PlanarDomain, degree: usize) -> Self {
        let center = domain.expansion_center();
        match domain.kind() {
            DomainKind::Disk { .. } | DomainKind::PuncturedDisk { .. } => {
                Self::monomials(center, degree)
            }
            DomainKind::Annulus { .. } => Self::laurent(center, degree),
            DomainKind::SmoothMultiplyConnected if domain.connectivity() == 1 => {
                Self::monomials(center, degree)
            }
            DomainKind::SmoothMultiplyConnected => {
                Self::with_poles(center, &domain.hole_points(), degree, degree / 2)
            }
        }
    }

    pub fn terms(&self) -> &[ShiftedPower] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    fn truncated(&self, keep: usize) -> Self {
        let terms = self.terms[..keep].to_vec();
        let max_degree = terms.iter().map(|t| t.power.unsigned_abs() as usize).max().unwrap_or(0);
        BasisDictionary { terms, max_degree }
    }

    fn eval(&self, z: Complex64) -> DVector<Complex64> {
        DVector::from_iterator(self.terms.len(), self.terms.iter().map(|t| t.eval(z)))
    }
}

/// Finite combination `Σ c_k (z - center_k)^{m_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPolynomial {
    pub terms: Vec<(Complex64, ShiftedPower)>,
}

impl LaurentPolynomial {
    pub fn constant(value: Complex64) -> Self {
        LaurentPolynomial {
            terms: vec![(value, ShiftedPower::new(Complex64::new(0.0, 0.0), 0))],
        }
    }

    pub fn monomial(coefficient: Complex64, center: Complex64, power: i32) -> Self {
        LaurentPolynomial {
            terms: vec![(coefficient, ShiftedPower::new(center, power))],
        }
    }

    /// `Σ_k coefficients[k] · z^k`.
    pub fn polynomial(coefficients: &[Complex64]) -> Self {
        let origin = Complex64::new(0.0, 0.0);
        LaurentPolynomial {
            terms: coefficients
                .iter()
                .enumerate()
                .map(|(k, &c)| (c, ShiftedPower::new(origin, k as i32)))
                .collect(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms.iter().map(|(c, t)| c * t.eval(z)).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub requested: usize,
    pub kept: usize,
    /// Condition number of the full scaled Gram matrix that was rejected.
    pub condition: f64,
}

/// Orthonormalized dictionary: `φ_j = Σ_k C[j,k] d_k` with `C` lower
/// triangular, so `φ₀` is the normalized constant.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    domain: PlanarDomain,
    dictionary: BasisDictionary,
    coefficients: DMatrix<Complex64>,
    condition: f64,
    truncation: Option<Truncation>,
    volume: f64,
    guard_band: f64,
}

/// A kernel value with the truncation degree that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub z: Complex64,
    pub w: Complex64,
    pub value: Complex64,
    pub degree: usize,
    /// Present when `z` or `w` lies in the boundary guard band; holds an
    /// estimate of the series truncation error there.
    pub band_warning: Option<f64>,
}

/// Result of checking the reproducing property on a test function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reproduction {
    pub residual: f64,
    /// False when the test function is not in the span of the basis, in
    /// which case a nonzero residual is expected.
    pub in_span: bool,
}

fn gram_matrix(domain: &PlanarDomain, dictionary: &BasisDictionary) -> Result<DMatrix<Complex64>> {
    let n = dictionary.len();
    let mut gram = DMatrix::zeros(n, n);
    for (i, f) in dictionary.terms().iter().enumerate() {
        for (j, g) in dictionary.terms().iter().enumerate().skip(i) {
            let value = inner_product(domain, f, g)?;
            gram[(i, j)] = value;
            gram[(j, i)] = value.conj();
        }
    }
    Ok(gram)
}

fn condition_number(matrix: &DMatrix<Complex64>) -> f64 {
    let eig = matrix.clone().symmetric_eigenvalues();
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn leading_block(matrix: &DMatrix<Complex64>, k: usize) -> DMatrix<Complex64> {
    matrix.view((0, 0), (k, k)).into_owned()
}

/// Builds the orthonormal basis. Ill-conditioned dictionaries are cut back
/// to the largest leading block whose scaled Gram matrix has condition
/// number at most [`MAX_CONDITION`]; the cut is recorded in
/// [`OrthonormalBasis::truncation`] and logged.
pub fn orthonormalize(domain: &PlanarDomain, dictionary: BasisDictionary) -> Result<OrthonormalBasis> {
    if dictionary.is_empty() || dictionary.terms()[0].power != 0 {
        return Err(Error::InvalidInput(
            "dictionary must start with the constant function".to_string(),
        ));
    }
    let gram = gram_matrix(domain, &dictionary)?;
    let n = dictionary.len();
    let scale = DVector::from_iterator(n, (0..n).map(|i| 1.0 / gram[(i, i)].re.sqrt()));
    let mut scaled = gram.clone();
    for i in 0..n {
        for j in 0..n {
            scaled[(i, j)] *= scale[i] * scale[j];
        }
    }

    let full_condition = condition_number(&scaled);
    let (keep, condition, truncation) = if full_condition <= MAX_CONDITION {
        (n, full_condition, None)
    } else {
        // Leading-block condition numbers are non-decreasing (interlacing).
        let (mut lo, mut hi) = (1, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if condition_number(&leading_block(&scaled, mid)) <= MAX_CONDITION {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let cond = condition_number(&leading_block(&scaled, lo));
        log::warn!(
            "Gram condition number {full_condition:.3e} exceeds {MAX_CONDITION:e}; \
             basis truncated from {n} to {lo} functions"
        );
        (
            lo,
            cond,
            Some(Truncation {
                requested: n,
                kept: lo,
                condition: full_condition,
            }),
        )
    };

    let block = leading_block(&scaled, keep);
    let chol = nalgebra::linalg::Cholesky::new(block).ok_or_else(|| Error::SolverFailure {
        what: "Gram Cholesky factorization",
        nodes: domain.nodes_per_curve(),
        detail: format!("scaled Gram of {keep} functions is not positive definite"),
    })?;
    let diag = DMatrix::from_diagonal(&scale.rows(0, keep).map(|s| Complex64::new(s, 0.0)));
    let coefficients = chol
        .l()
        .solve_lower_triangular(&diag)
        .ok_or_else(|| Error::NumericalFailure("singular Cholesky factor".to_string()))?;

    Ok(OrthonormalBasis {
        domain: domain.clone(),
        dictionary: dictionary.truncated(keep),
        coefficients,
        condition,
        truncation,
        volume: domain.area(),
        guard_band: DEFAULT_GUARD_FRACTION * domain.inradius(),
    })
}

/// Orthonormal basis from the default dictionary of the domain.
pub fn default_basis(domain: &PlanarDomain, degree: usize) -> Result<OrthonormalBasis> {
    orthonormalize(domain, BasisDictionary::for_domain(domain, degree))
}

impl OrthonormalBasis {
    pub fn domain(&self) -> &PlanarDomain {
        &self.domain
    }

    pub fn dictionary(&self) -> &BasisDictionary {
        &self.dictionary
    }

    pub fn coefficients(&self) -> &DMatrix<Complex64> {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.dictionary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dictionary.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.dictionary.max_degree()
    }

    pub fn gram_condition(&self) -> f64 {
        self.condition
    }

    pub fn truncation(&self) -> Option<&Truncation> {
        self.truncation.as_ref()
    }

    /// `v(Ω)`, as used for the normalization of `φ₀`.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn guard_band(&self) -> f64 {
        self.guard_band
    }

    pub fn with_guard_fraction(mut self, fraction: f64) -> Self {
        self.guard_band = fraction * self.domain.inradius();
        self
    }

    /// `(φ_0(z), …, φ_{N-1}(z))`.
    pub fn eval(&self, z: Complex64) -> DVector<Complex64> {
        &self.coefficients * self.dictionary.eval(z)
    }

    /// Truncated series `Σ φ_j(z) conj(φ_j(w))`.
    pub fn kernel(&self, z: Complex64, w: Complex64) -> Complex64 {
        let pz = self.eval(z);
        if z == w {
            return Complex64::new(pz.iter().map(|p| p.norm_sqr()).sum(), 0.0);
        }
        let pw = self.eval(w);
        pz.iter().zip(pw.iter()).map(|(a, b)| a * b.conj()).sum()
    }

    /// Kernel value with a guard-band diagnostic.
    pub fn kernel_value(&self, z: Complex64, w: Complex64) -> KernelValue {
        let value = self.kernel(z, w);
        let in_band = |p: Complex64| self.domain.boundary_distance(p) < self.guard_band;
        let band_warning = if in_band(z) || in_band(w) {
            let estimate = self.tail_estimate(z, w);
            log::warn!(
                "kernel evaluated in the boundary band at ({z}, {w}); truncation error ≈ {estimate:.2e}"
            );
            Some(estimate)
        } else {
            None
        };
        KernelValue {
            z,
            w,
            value,
            degree: self.degree(),
            band_warning,
        }
    }

    /// Geometric extrapolation of the last two degree blocks of the series.
    fn tail_estimate(&self, z: Complex64, w: Complex64) -> f64 {
        let pz = self.eval(z);
        let pw = self.eval(w);
        let top = self.degree();
        let block = |d: usize| -> f64 {
            self.dictionary
                .terms()
                .iter()
                .enumerate()
                .filter(|(_, t)| t.power.unsigned_abs() as usize == d)
                .map(|(j, _)| (pz[j] * pw[j].conj()).norm())
                .sum()
        };
        let last = block(top);
        let previous = if top > 0 { block(top - 1) } else { 0.0 };
        if previous > 0.0 && last < previous {
            let ratio = last / previous;
            last * ratio / (1.0 - ratio)
        } else {
            last
        }
    }

    /// `⟨f, φ_j⟩` for every basis function.
    fn projections(&self, f: &LaurentPolynomial) -> Result<DVector<Complex64>> {
        let mut against_dictionary = DVector::zeros(self.len());
        for (k, d) in self.dictionary.terms().iter().enumerate() {
            for (c, t) in &f.terms {
                against_dictionary[k] += c * inner_product(&self.domain, t, d)?;
            }
        }
        Ok(self.coefficients.conjugate() * against_dictionary)
    }

    /// `∫_Ω f(w) K(z, w) dv(w)` evaluated from moments.
    pub fn reproduce(&self, f: &LaurentPolynomial, z: Complex64) -> Result<Complex64> {
        let proj = self.projections(f)?;
        Ok(self.eval(z).iter().zip(proj.iter()).map(|(p, c)| p * c).sum())
    }

    /// `|f(z) - ∫_Ω f(w) K(z, w) dv(w)|`.
    pub fn reproduce_residual(&self, f: &LaurentPolynomial, z: Complex64) -> Result<Reproduction> {
        let residual = (f.eval(z) - self.reproduce(f, z)?).norm();
        let in_span = f.terms.iter().all(|(_, t)| self.spans(t));
        Ok(Reproduction { residual, in_span })
    }

    fn spans(&self, t: &ShiftedPower) -> bool {
        let terms = self.dictionary.terms();
        if t.power < 0 {
            return terms
                .iter()
                .any(|d| d.power == t.power && (d.center - t.center).norm() < 1e-14);
        }
        // A polynomial of degree m lies in the span of 1, (z-c), …, (z-c)^m.
        terms.iter().any(|d| {
            (0..=t.power).all(|m| {
                m == 0 || terms.iter().any(|e| e.power == m && e.center == d.center)
            })
        })
    }

    /// `∫_Ω K(w, z₀) dv(w)`, which equals 1 for every domain and base point.
    pub fn mean_value_integral(&self, z0: Complex64) -> Result<Complex64> {
        Ok(self.reproduce(&LaurentPolynomial::constant(Complex64::new(1.0, 0.0)), z0)?.conj())
    }

    /// `K(z, z)·v(Ω) - 1`, which the volume inequality keeps non-negative.
    pub fn minimality_margin(&self, z: Complex64) -> Result<f64> {
        if self.domain.contains(z) != Membership::Inside {
            return Err(Error::NotInterior(z));
        }
        let margin = self.kernel(z, z).re * self.volume - 1.0;
        if margin < -MARGIN_TOLERANCE {
            return Err(Error::NumericalFailure(format!(
                "K(z,z)·v - 1 = {margin:e} < 0 at z = {z}: volume inequality violated"
            )));
        }
        Ok(margin)
    }
}

/// `max |K_{D(0,1)}(z, w) - c·K_{D(0,|c|)}(cz, cw)·c̄|` over a 5×5 grid of
/// interior pairs, for the linear map `z ↦ cz`.
pub fn transformation_residual(c: Complex64) -> Result<f64> {
    if c.norm() == 0.0 {
        return Err(Error::InvalidInput("scale factor must be nonzero".to_string()));
    }
    let origin = Complex64::new(0.0, 0.0);
    let unit = default_basis(&PlanarDomain::disk(origin, 1.0)?, 20)?;
    let image = default_basis(&PlanarDomain::disk(origin, c.norm())?, 20)?;
    let grid: Vec<Complex64> = (0..5)
        .flat_map(|i| (0..5).map(move |j| Complex64::new(-0.5 + 0.25 * i as f64, -0.5 + 0.25 * j as f64)))
        .collect();
    let mut worst: f64 = 0.0;
    for &z in &grid {
        for &w in &grid {
            let lhs = unit.kernel(z, w);
            let rhs = c * image.kernel(c * z, c * w) * c.conj();
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}
