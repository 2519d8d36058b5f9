//! Planar domains bounded by smooth closed curves, and the two-variable
//! Reinhardt profile `{ p(|z₁|²) + |z₂|² < 1 }`.
//!
//! Every bounded domain carries its boundary as an ordered list of
//! [`BoundaryCurve`]s, holes first and the outer curve last. Outer curves run
//! counterclockwise and holes clockwise, so that the domain always lies to the
//! left of the boundary and a single sum over all components gives the
//! Stokes/Cauchy integrals.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;

/// Default number of trapezoid nodes per boundary component.
pub const DEFAULT_NODES: usize = 256;
/// Upper bound for the self-convergent node doubling.
pub const MAX_NODES: usize = 8192;
/// Stokes-area change below which node doubling stops.
pub const AREA_CONVERGENCE: f64 = 1e-12;
/// Points closer than this to a boundary sample are reported as ambiguous.
pub const BOUNDARY_BAND: f64 = 1e-10;
/// Smallest admissible speed |z'(t)| of a boundary parametrization.
pub const MIN_SPEED: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Counterclockwise; used for the outer boundary.
    Positive,
    /// Clockwise; used for holes.
    Negative,
}

/// Named parametric families for boundary curves. Each is parametrized
/// counterclockwise by `θ = 2πt`, `t ∈ [0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveShape {
    Circle {
        center: Complex64,
        radius: f64,
    },
    Ellipse {
        center: Complex64,
        semi_major: f64,
        semi_minor: f64,
        angle: f64,
    },
    /// Polar curve `r(θ) = radius · (1 + amplitude · cos(lobes · θ))`.
    Starlike {
        center: Complex64,
        radius: f64,
        amplitude: f64,
        lobes: u32,
    },
}

impl CurveShape {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            CurveShape::Circle { radius, .. } => radius > 0.0 && radius.is_finite(),
            CurveShape::Ellipse {
                semi_major,
                semi_minor,
                angle,
                ..
            } => semi_major > 0.0 && semi_minor > 0.0 && angle.is_finite(),
            CurveShape::Starlike {
                radius, amplitude, ..
            } => radius > 0.0 && amplitude.abs() < 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid curve parameters: {self:?}")))
        }
    }

    /// The point the family is built around; always enclosed by the curve.
    pub fn center(&self) -> Complex64 {
        match *self {
            CurveShape::Circle { center, .. }
            | CurveShape::Ellipse { center, .. }
            | CurveShape::Starlike { center, .. } => center,
        }
    }

    /// Returns `(z, dz/dt, d²z/dt²)` at parameter `t` (counterclockwise).
    pub fn eval(&self, t: f64) -> (Complex64, Complex64, Complex64) {
        let th = TAU * t;
        let e = Complex64::from_polar(1.0, th);
        let i = Complex64::i();
        match *self {
            CurveShape::Circle { center, radius } => (
                center + radius * e,
                TAU * i * radius * e,
                -(TAU * TAU) * radius * e,
            ),
            CurveShape::Ellipse {
                center,
                semi_major,
                semi_minor,
                angle,
            } => {
                let rot = Complex64::from_polar(1.0, angle);
                let (s, c) = th.sin_cos();
                (
                    center + rot * Complex64::new(semi_major * c, semi_minor * s),
                    rot * TAU * Complex64::new(-semi_major * s, semi_minor * c),
                    rot * (TAU * TAU) * Complex64::new(-semi_major * c, -semi_minor * s),
                )
            }
            CurveShape::Starlike {
                center,
                radius,
                amplitude,
                lobes,
            } => {
                let k = lobes as f64;
                let (s, c) = (k * th).sin_cos();
                let r = radius * (1.0 + amplitude * c);
                let dr = -radius * amplitude * k * s;
                let d2r = -radius * amplitude * k * k * c;
                (
                    center + r * e,
                    TAU * Complex64::new(dr, r) * e,
                    (TAU * TAU) * Complex64::new(d2r - r, 2.0 * dr) * e,
                )
            }
        }
    }
}

/// One sample of a boundary parametrization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveNode {
    pub t: f64,
    pub z: Complex64,
    /// Velocity `z'(t)`.
    pub dz: Complex64,
    /// Acceleration `z''(t)`.
    pub d2z: Complex64,
}

/// A smooth closed boundary component together with its cached trapezoid
/// samples.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    shape: CurveShape,
    orientation: Orientation,
    rule: QuadratureRule,
}

impl BoundaryCurve {
    pub fn new(shape: CurveShape, orientation: Orientation, nodes: usize) -> Result<Self> {
        shape.validate()?;
        if nodes < 8 {
            return Err(Error::InvalidInput(format!(
                "at least 8 boundary nodes required, got {nodes}"
            )));
        }
        let mut curve = BoundaryCurve {
            shape,
            orientation,
            rule: QuadratureRule::default(),
        };
        let samples = (0..nodes)
            .map(|i| curve.node(i as f64 / nodes as f64))
            .collect::<Vec<_>>();
        for node in &samples {
            let speed = node.dz.norm();
            if speed < MIN_SPEED {
                return Err(Error::DegenerateCurve { t: node.t, speed });
            }
        }
        let (z0, ..) = curve.eval(0.0);
        let (z1, ..) = curve.eval(1.0);
        if (z0 - z1).norm() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "curve {:?} is not closed: |z(0) - z(1)| = {:e}",
                curve.shape,
                (z0 - z1).norm()
            )));
        }
        curve.rule = QuadratureRule::new(samples);
        Ok(curve)
    }

    pub fn shape(&self) -> &CurveShape {
        &self.shape
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn nodes(&self) -> &[CurveNode] {
        self.rule.nodes()
    }

    /// Evaluates the oriented parametrization at `t`.
    pub fn eval(&self, t: f64) -> (Complex64, Complex64, Complex64) {
        match self.orientation {
            Orientation::Positive => self.shape.eval(t),
            Orientation::Negative => {
                let (z, dz, d2z) = self.shape.eval(1.0 - t);
                (z, -dz, d2z)
            }
        }
    }

    pub fn node(&self, t: f64) -> CurveNode {
        let (z, dz, d2z) = self.eval(t);
        CurveNode { t, z, dz, d2z }
    }

    pub fn unit_tangent(&self, t: f64) -> Result<Complex64> {
        let (_, dz, _) = self.eval(t);
        let speed = dz.norm();
        if speed < MIN_SPEED {
            return Err(Error::DegenerateCurve { t, speed });
        }
        Ok(dz / speed)
    }

    /// Winding number of the sampled polygon around `z`.
    pub fn winding_number(&self, z: Complex64) -> i32 {
        let nodes = self.nodes();
        let mut total = 0.0;
        for (k, node) in nodes.iter().enumerate() {
            let next = nodes[(k + 1) % nodes.len()].z;
            total += ((next - z) / (node.z - z)).arg();
        }
        (total / TAU).round() as i32
    }

    pub fn min_distance(&self, z: Complex64) -> f64 {
        self.nodes()
            .iter()
            .map(|n| (n.z - z).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Which analytic family a domain belongs to. The boundary curves are always
/// present; the kind only unlocks closed forms.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    Disk {
        center: Complex64,
        radius: f64,
    },
    Annulus {
        center: Complex64,
        inner: f64,
        outer: f64,
    },
    /// A disk minus finitely many interior points. The punctures are polar,
    /// hence invisible to every area integral.
    PuncturedDisk {
        center: Complex64,
        radius: f64,
        punctures: Vec<Complex64>,
    },
    SmoothMultiplyConnected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside,
    /// Within [`BOUNDARY_BAND`] of the boundary (or of a puncture).
    Boundary,
}

#[derive(Debug, Clone)]
pub struct PlanarDomain {
    kind: DomainKind,
    curves: Vec<BoundaryCurve>,
    nodes: usize,
    area: f64,
    inradius: f64,
}

impl PlanarDomain {
    pub fn disk(center: Complex64, radius: f64) -> Result<Self> {
        Self::disk_with_nodes(center, radius, None)
    }

    pub fn disk_with_nodes(center: Complex64, radius: f64, nodes: Option<usize>) -> Result<Self> {
        Self::build(
            DomainKind::Disk { center, radius },
            vec![],
            CurveShape::Circle { center, radius },
            nodes,
        )
    }

    pub fn unit_disk() -> Self {
        Self::disk(Complex64::new(0.0, 0.0), 1.0).expect("unit disk is valid")
    }

    pub fn annulus(center: Complex64, inner: f64, outer: f64) -> Result<Self> {
        Self::annulus_with_nodes(center, inner, outer, None)
    }

    pub fn annulus_with_nodes(
        center: Complex64,
        inner: f64,
        outer: f64,
        nodes: Option<usize>,
    ) -> Result<Self> {
        if !(inner > 0.0 && inner < outer) {
            return Err(Error::InvalidInput(format!(
                "annulus radii must satisfy 0 < inner < outer, got {inner}, {outer}"
            )));
        }
        Self::build(
            DomainKind::Annulus {
                center,
                inner,
                outer,
            },
            vec![CurveShape::Circle {
                center,
                radius: inner,
            }],
            CurveShape::Circle {
                center,
                radius: outer,
            },
            nodes,
        )
    }

    pub fn punctured_disk(center: Complex64, radius: f64, punctures: Vec<Complex64>) -> Result<Self> {
        Self::punctured_disk_with_nodes(center, radius, punctures, None)
    }

    pub fn punctured_disk_with_nodes(
        center: Complex64,
        radius: f64,
        punctures: Vec<Complex64>,
        nodes: Option<usize>,
    ) -> Result<Self> {
        for (k, p) in punctures.iter().enumerate() {
            if (p - center).norm() >= radius - BOUNDARY_BAND {
                return Err(Error::InvalidInput(format!(
                    "puncture {p} does not lie strictly inside the disk"
                )));
            }
            if punctures[..k].iter().any(|q| (q - p).norm() < BOUNDARY_BAND) {
                return Err(Error::InvalidInput(format!("duplicate puncture {p}")));
            }
        }
        Self::build(
            DomainKind::PuncturedDisk {
                center,
                radius,
                punctures,
            },
            vec![],
            CurveShape::Circle { center, radius },
            nodes,
        )
    }

    /// A domain bounded by `outer` with the given holes removed.
    pub fn smooth(outer: CurveShape, holes: Vec<CurveShape>) -> Result<Self> {
        Self::smooth_with_nodes(outer, holes, None)
    }

    pub fn smooth_with_nodes(
        outer: CurveShape,
        holes: Vec<CurveShape>,
        nodes: Option<usize>,
    ) -> Result<Self> {
        Self::build(DomainKind::SmoothMultiplyConnected, holes, outer, nodes)
    }

    /// With `nodes = None` the node count starts at [`DEFAULT_NODES`] and
    /// doubles until the Stokes area is self-converged.
    fn build(
        kind: DomainKind,
        holes: Vec<CurveShape>,
        outer: CurveShape,
        nodes: Option<usize>,
    ) -> Result<Self> {
        let assemble = |m: usize| -> Result<PlanarDomain> {
            let mut curves = holes
                .iter()
                .map(|h| BoundaryCurve::new(h.clone(), Orientation::Negative, m))
                .collect::<Result<Vec<_>>>()?;
            curves.push(BoundaryCurve::new(outer.clone(), Orientation::Positive, m)?);
            let area = stokes_area(&curves);
            Ok(PlanarDomain {
                kind: kind.clone(),
                curves,
                nodes: m,
                area,
                inradius: 0.0,
            })
        };

        let mut domain = match nodes {
            Some(m) => assemble(m)?,
            None => {
                let mut m = DEFAULT_NODES;
                let mut current = assemble(m)?;
                loop {
                    if 2 * m > MAX_NODES {
                        log::warn!("Stokes area not converged at {m} nodes");
                        break current;
                    }
                    let refined = assemble(2 * m)?;
                    if (refined.area - current.area).abs() < AREA_CONVERGENCE * current.area.max(1.0)
                    {
                        break current;
                    }
                    current = refined;
                    m *= 2;
                }
            }
        };
        domain.check_topology()?;
        if domain.area <= 0.0 || !domain.area.is_finite() {
            return Err(Error::InvalidInput(format!(
                "domain has non-positive area {}",
                domain.area
            )));
        }
        domain.inradius = domain.compute_inradius();
        Ok(domain)
    }

    fn check_topology(&self) -> Result<()> {
        let outer = self.outer();
        let holes = self.holes();
        for (k, hole) in holes.iter().enumerate() {
            if hole.nodes().iter().any(|n| outer.winding_number(n.z) != 1) {
                return Err(Error::InvalidInput(format!(
                    "hole {k} is not contained in the outer boundary"
                )));
            }
            for (l, other) in holes.iter().enumerate() {
                if l != k && other.winding_number(hole.shape().center()) != 0 {
                    return Err(Error::InvalidInput(format!("holes {k} and {l} are nested")));
                }
            }
        }
        for (k, a) in self.curves.iter().enumerate() {
            for b in &self.curves[k + 1..] {
                let gap = a
                    .nodes()
                    .iter()
                    .map(|n| b.min_distance(n.z))
                    .fold(f64::INFINITY, f64::min);
                if gap <= BOUNDARY_BAND {
                    return Err(Error::InvalidInput(
                        "boundary components intersect".to_string(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn compute_inradius(&self) -> f64 {
        match self.kind {
            DomainKind::Disk { radius, .. } | DomainKind::PuncturedDisk { radius, .. } => radius,
            DomainKind::Annulus { inner, outer, .. } => 0.5 * (outer - inner),
            DomainKind::SmoothMultiplyConnected => {
                let (x0, x1, y0, y1) = self.bounding_box();
                let res = 81;
                let mut best: f64 = 0.0;
                for i in 0..res {
                    for j in 0..res {
                        let z = Complex64::new(
                            x0 + (x1 - x0) * i as f64 / (res - 1) as f64,
                            y0 + (y1 - y0) * j as f64 / (res - 1) as f64,
                        );
                        if self.total_winding(z) == 1 {
                            best = best.max(self.boundary_distance(z));
                        }
                    }
                }
                best
            }
        }
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn curves(&self) -> &[BoundaryCurve] {
        &self.curves
    }

    pub fn outer(&self) -> &BoundaryCurve {
        self.curves.last().expect("domain has an outer boundary")
    }

    pub fn holes(&self) -> &[BoundaryCurve] {
        &self.curves[..self.curves.len() - 1]
    }

    /// Number of boundary curves; punctures do not count.
    pub fn connectivity(&self) -> usize {
        self.curves.len()
    }

    pub fn nodes_per_curve(&self) -> usize {
        self.nodes
    }

    /// Rebuilds the same domain with a fixed node count.
    pub fn with_nodes(&self, nodes: usize) -> Result<Self> {
        let holes = self.holes().iter().map(|c| c.shape().clone()).collect();
        Self::build(self.kind.clone(), holes, self.outer().shape().clone(), Some(nodes))
    }

    pub fn punctures(&self) -> &[Complex64] {
        match &self.kind {
            DomainKind::PuncturedDisk { punctures, .. } => punctures,
            _ => &[],
        }
    }

    /// Centers of the hole curves; each lies strictly inside its hole.
    pub fn hole_points(&self) -> Vec<Complex64> {
        self.holes().iter().map(|c| c.shape().center()).collect()
    }

    /// Natural expansion point for monomial dictionaries.
    pub fn expansion_center(&self) -> Complex64 {
        match self.kind {
            DomainKind::Disk { center, .. }
            | DomainKind::Annulus { center, .. }
            | DomainKind::PuncturedDisk { center, .. } => center,
            DomainKind::SmoothMultiplyConnected => self.outer().shape().center(),
        }
    }

    /// Area `v(Ω) = (1/2i) ∮ z̄ dz` over the oriented boundary.
    pub fn area(&self) -> f64 {
        self.area
    }

    /// Area from the textbook formula, where one exists.
    pub fn analytic_area(&self) -> Option<f64> {
        match self.kind {
            DomainKind::Disk { radius, .. } | DomainKind::PuncturedDisk { radius, .. } => {
                Some(PI * radius * radius)
            }
            DomainKind::Annulus { inner, outer, .. } => Some(PI * (outer * outer - inner * inner)),
            DomainKind::SmoothMultiplyConnected => None,
        }
    }

    pub fn inradius(&self) -> f64 {
        self.inradius
    }

    pub fn unit_tangent(&self, component: usize, t: f64) -> Result<Complex64> {
        self.curves
            .get(component)
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "component {component} out of range (domain has {})",
                    self.curves.len()
                ))
            })?
            .unit_tangent(t)
    }

    fn total_winding(&self, z: Complex64) -> i32 {
        self.curves.iter().map(|c| c.winding_number(z)).sum()
    }

    /// Tri-state membership test. Punctures are excluded from the domain.
    pub fn contains(&self, z: Complex64) -> Membership {
        if self.punctures().iter().any(|p| (p - z).norm() < BOUNDARY_BAND) {
            return Membership::Boundary;
        }
        let inside_curves = match self.kind {
            DomainKind::Disk { center, radius } | DomainKind::PuncturedDisk { center, radius, .. } => {
                let r = (z - center).norm();
                if (r - radius).abs() < BOUNDARY_BAND {
                    return Membership::Boundary;
                }
                r < radius
            }
            DomainKind::Annulus {
                center,
                inner,
                outer,
            } => {
                let r = (z - center).norm();
                if (r - inner).abs() < BOUNDARY_BAND || (r - outer).abs() < BOUNDARY_BAND {
                    return Membership::Boundary;
                }
                inner < r && r < outer
            }
            DomainKind::SmoothMultiplyConnected => {
                if self.curves.iter().any(|c| c.min_distance(z) < BOUNDARY_BAND) {
                    return Membership::Boundary;
                }
                self.total_winding(z) == 1
            }
        };
        if inside_curves {
            Membership::Inside
        } else {
            Membership::Outside
        }
    }

    /// True iff `z` lies strictly inside the region bounded by the curves,
    /// punctures included.
    pub fn encloses(&self, z: Complex64) -> bool {
        match self.kind {
            DomainKind::Disk { center, radius } | DomainKind::PuncturedDisk { center, radius, .. } => {
                (z - center).norm() < radius
            }
            DomainKind::Annulus {
                center,
                inner,
                outer,
            } => {
                let r = (z - center).norm();
                inner < r && r < outer
            }
            DomainKind::SmoothMultiplyConnected => self.total_winding(z) == 1,
        }
    }

    /// Distance to the boundary curves (punctures are ignored). Exact for
    /// disks and annuli, sample-based otherwise.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        match self.kind {
            DomainKind::Disk { center, radius } | DomainKind::PuncturedDisk { center, radius, .. } => {
                (radius - (z - center).norm()).abs()
            }
            DomainKind::Annulus {
                center,
                inner,
                outer,
            } => {
                let r = (z - center).norm();
                (r - inner).abs().min((outer - r).abs())
            }
            DomainKind::SmoothMultiplyConnected => self
                .curves
                .iter()
                .map(|c| c.min_distance(z))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// `(re_min, re_max, im_min, im_max)` of the outer boundary.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match self.kind {
            DomainKind::Disk { center, radius }
            | DomainKind::PuncturedDisk { center, radius, .. }
            | DomainKind::Annulus {
                center,
                outer: radius,
                ..
            } => (
                center.re - radius,
                center.re + radius,
                center.im - radius,
                center.im + radius,
            ),
            DomainKind::SmoothMultiplyConnected => {
                let nodes = self.outer().nodes();
                let fold = |f: fn(&CurveNode) -> f64, init: f64, g: fn(f64, f64) -> f64| {
                    nodes.iter().map(f).fold(init, g)
                };
                (
                    fold(|n| n.z.re, f64::INFINITY, f64::min),
                    fold(|n| n.z.re, f64::NEG_INFINITY, f64::max),
                    fold(|n| n.z.im, f64::INFINITY, f64::min),
                    fold(|n| n.z.im, f64::NEG_INFINITY, f64::max),
                )
            }
        }
    }
}

fn stokes_area(curves: &[BoundaryCurve]) -> f64 {
    let total: Complex64 = curves
        .iter()
        .map(|c| c.rule().integrate_dz(|z| z.conj()))
        .sum();
    (total / Complex64::new(0.0, 2.0)).re
}

/// Profile of the complete Reinhardt domain
/// `{ (z₁, z₂) : a|z₁|² + b|z₁|⁴ + |z₂|² < 1 }` in `C²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReinhardtProfile2 {
    /// Coefficient `a` of `t = |z₁|²`.
    pub linear: f64,
    /// Coefficient `b` of `t²`.
    pub quadratic: f64,
}

impl ReinhardtProfile2 {
    /// `|z₁|⁴ + |z₁|² + |z₂|² < 1`.
    pub fn quartic() -> Self {
        ReinhardtProfile2 {
            linear: 1.0,
            quadratic: 1.0,
        }
    }

    /// The unit ball `|z₁|² + |z₂|² < 1`.
    pub fn ball() -> Self {
        ReinhardtProfile2 {
            linear: 1.0,
            quadratic: 0.0,
        }
    }

    pub fn new(linear: f64, quadratic: f64) -> Result<Self> {
        if linear < 0.0 || quadratic < 0.0 || linear + quadratic <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "profile coefficients must be non-negative and not both zero, got {linear}, {quadratic}"
            )));
        }
        Ok(ReinhardtProfile2 { linear, quadratic })
    }

    pub fn p(&self, t: f64) -> f64 {
        self.linear * t + self.quadratic * t * t
    }

    /// Positive root of `p(t) = 1`, the largest admissible `|z₁|²`.
    pub fn cutoff(&self) -> f64 {
        let (a, b) = (self.linear, self.quadratic);
        if b == 0.0 {
            1.0 / a
        } else {
            // Stable form of (-a + sqrt(a² + 4b)) / 2b.
            2.0 / (a + (a * a + 4.0 * b).sqrt())
        }
    }

    /// Defining function `p(|z₁|²) + |z₂|² - 1`.
    pub fn defining_function(&self, z1: Complex64, z2: Complex64) -> f64 {
        self.p(z1.norm_sqr()) + z2.norm_sqr() - 1.0
    }

    pub fn contains(&self, z1: Complex64, z2: Complex64) -> bool {
        self.defining_function(z1, z2) < 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unit_tangent_examples() {
        let disk = PlanarDomain::unit_disk();
        let t0 = disk.unit_tangent(0, 0.0).unwrap();
        assert!((t0 - c(0.0, 1.0)).norm() < 1e-14);
        let tq = disk.unit_tangent(0, 0.25).unwrap();
        assert!((tq - c(-1.0, 0.0)).norm() < 1e-14);
        let big = PlanarDomain::disk(c(0.0, 0.0), 2.0).unwrap();
        assert!((big.unit_tangent(0, 0.0).unwrap() - c(0.0, 1.0)).norm() < 1e-14);
        assert!(disk.unit_tangent(3, 0.0).is_err());
    }

    #[test]
    fn hole_tangent_runs_clockwise() {
        let ann = PlanarDomain::annulus(c(0.0, 0.0), 0.5, 1.0).unwrap();
        // Inner circle at z = 0.5 must point downwards (clockwise).
        let t = ann.unit_tangent(0, 0.0).unwrap();
        assert!((ann.curves()[0].node(0.0).z - c(0.5, 0.0)).norm() < 1e-14);
        assert!((t - c(0.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn tangent_has_unit_modulus_at_every_node() {
        let dom = PlanarDomain::smooth(
            CurveShape::Starlike {
                center: c(0.1, 0.0),
                radius: 1.0,
                amplitude: 0.2,
                lobes: 3,
            },
            vec![CurveShape::Ellipse {
                center: c(0.2, 0.1),
                semi_major: 0.2,
                semi_minor: 0.1,
                angle: 0.4,
            }],
        )
        .unwrap();
        for (k, curve) in dom.curves().iter().enumerate() {
            for node in curve.nodes() {
                let t = dom.unit_tangent(k, node.t).unwrap();
                assert!((t.norm() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn degenerate_parameters_rejected() {
        assert!(PlanarDomain::disk(c(0.0, 0.0), 0.0).is_err());
        assert!(PlanarDomain::annulus(c(0.0, 0.0), 1.0, 0.5).is_err());
        assert!(PlanarDomain::punctured_disk(c(0.0, 0.0), 1.0, vec![c(1.5, 0.0)]).is_err());
        assert!(
            PlanarDomain::punctured_disk(c(0.0, 0.0), 1.0, vec![c(0.3, 0.0), c(0.3, 0.0)]).is_err()
        );
        let crossing = PlanarDomain::smooth(
            CurveShape::Circle {
                center: c(0.0, 0.0),
                radius: 1.0,
            },
            vec![CurveShape::Circle {
                center: c(0.9, 0.0),
                radius: 0.3,
            }],
        );
        assert!(crossing.is_err());
    }

    #[test]
    fn areas() {
        let disk = PlanarDomain::unit_disk();
        assert!((disk.area() - PI).abs() < 1e-10);
        let ann = PlanarDomain::annulus(c(0.0, 0.0), 0.5, 1.0).unwrap();
        assert!((ann.area() - 0.75 * PI).abs() < 1e-10);
        let punct = PlanarDomain::punctured_disk(c(0.0, 0.0), 1.0, vec![c(0.3, 0.0)]).unwrap();
        assert!((punct.area() - PI).abs() < 1e-10);
        let off = PlanarDomain::annulus(c(1.0, -2.0), 0.3, 1.7).unwrap();
        assert!((off.area() - off.analytic_area().unwrap()).abs() < 1e-10);
        assert_eq!(disk.nodes_per_curve(), DEFAULT_NODES);
    }

    #[test]
    fn membership_examples() {
        let disk = PlanarDomain::unit_disk();
        assert_eq!(disk.contains(c(0.0, 0.0)), Membership::Inside);
        assert_eq!(disk.contains(c(1.0, 0.0)), Membership::Boundary);
        let ann = PlanarDomain::annulus(c(0.0, 0.0), 0.5, 1.0).unwrap();
        assert_eq!(ann.contains(c(0.0, 0.0)), Membership::Outside);
        let punct = PlanarDomain::punctured_disk(c(0.0, 0.0), 1.0, vec![c(0.3, 0.0)]).unwrap();
        assert_eq!(punct.contains(c(0.3, 0.0)), Membership::Boundary);
        assert_ne!(punct.contains(c(0.3, 0.0)), Membership::Inside);
        assert_eq!(punct.contains(c(0.0, 0.0)), Membership::Inside);
    }

    #[test]
    fn membership_matches_analytic_rule_on_grid() {
        let ann = PlanarDomain::annulus(c(0.0, 0.0), 0.5, 1.0).unwrap();
        let disk = PlanarDomain::unit_disk();
        let smooth_ann = PlanarDomain::smooth(
            CurveShape::Circle {
                center: c(0.0, 0.0),
                radius: 1.0,
            },
            vec![CurveShape::Circle {
                center: c(0.0, 0.0),
                radius: 0.5,
            }],
        )
        .unwrap();
        for i in 0..101 {
            for j in 0..101 {
                let z = c(-1.1 + 2.2 * i as f64 / 100.0, -1.1 + 2.2 * j as f64 / 100.0);
                let r = z.norm();
                let in_disk = r < 1.0;
                let in_ann = 0.5 < r && r < 1.0;
                if (r - 1.0).abs() > 1e-9 {
                    assert_eq!(disk.contains(z) == Membership::Inside, in_disk, "{z}");
                }
                if (r - 1.0).abs() > 1e-9 && (r - 0.5).abs() > 1e-9 {
                    assert_eq!(ann.contains(z) == Membership::Inside, in_ann, "{z}");
                }
                // Winding numbers of the sampled polygon only match the
                // analytic rule outside the chord sagitta.
                if (r - 1.0).abs() > 1e-3 && (r - 0.5).abs() > 1e-3 {
                    assert_eq!(smooth_ann.contains(z) == Membership::Inside, in_ann, "{z}");
                }
            }
        }
    }

    #[test]
    fn reinhardt_cutoff() {
        let prof = ReinhardtProfile2::quartic();
        let t = prof.cutoff();
        assert!(t > 0.0 && t < 1.0);
        assert!((prof.p(t) - 1.0).abs() < 1e-12);
        assert!((t - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        assert_eq!(ReinhardtProfile2::ball().cutoff(), 1.0);
    }
}
