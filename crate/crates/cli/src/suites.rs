//! The verification suites behind each subcommand. Every check becomes one
//! report row; numerical errors from the library become failing rows, while
//! specs that do not fit the command are rejected up front.

use std::f64::consts::PI;

use bergkern::bergman::{default_basis, OrthonormalBasis, MAX_CONDITION};
use bergkern::geometry::ReinhardtProfile2;
use bergkern::potential::{robin, robin_extrapolated, suita_margin, sublevel_profile, GreensEvaluator, RobinMethod};
use bergkern::reinhardt2::{
    circle_certificate, kernel_origin, monte_carlo_inner_product, obstruction_roots, report as reinhardt_report,
    volume, MonomialNormTable, DEFAULT_TABLE_SIZE, THETA_GRID,
};
use bergkern::rigidity::{classify_unbounded, classify_with, mean_one_check, minimal_scan, Verdict};
use bergkern::szego::{f_field_mean, fit_with, zero_count, FitOptions, HarmonicMeasures, SzegoSolver};
use bergkern::{Complex64, Membership, PlanarDomain};

use crate::report::{cnum, num, Provenance, Report, Row};
use crate::spec::{DomainSpec, SpecFile, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Area,
    Bergman,
    Suita,
    Szego,
    Classify,
    Sublevel,
    Reinhardt,
    All,
}

/// Rejected before any computation; maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct InvalidInput(pub String);

const DEFAULT_POINTS: usize = 5;
const MONTE_CARLO_SAMPLES: usize = 200_000;

struct Planar<'a> {
    spec: &'a SpecFile,
    domain: PlanarDomain,
    tol: Tolerances,
    points: Vec<Complex64>,
    basis: Option<Result<OrthonormalBasis, String>>,
}

fn row(check: &str, inputs: String, value: String, reference: String, provenance: Provenance, tol: String, pass: bool) -> Row {
    Row {
        check: check.to_string(),
        inputs,
        value,
        reference,
        provenance,
        tol,
        pass,
    }
}

fn error_row(check: &str, inputs: String, error: impl std::fmt::Display) -> Row {
    row(
        check,
        inputs,
        format!("error: {error}"),
        "-".to_string(),
        Provenance::SelfConsistency,
        "-".to_string(),
        false,
    )
}

pub fn build_domain(spec: &SpecFile) -> Result<Option<PlanarDomain>, InvalidInput> {
    let nodes = spec.settings.nodes;
    let domain = match &spec.domain {
        DomainSpec::Disk { center, radius } => PlanarDomain::disk_with_nodes(*center, *radius, nodes),
        DomainSpec::Annulus { center, inner, outer } => {
            PlanarDomain::annulus_with_nodes(*center, *inner, *outer, nodes)
        }
        DomainSpec::PuncturedDisk {
            center,
            radius,
            punctures,
        } => PlanarDomain::punctured_disk_with_nodes(*center, *radius, punctures.clone(), nodes),
        DomainSpec::Smooth { boundary, holes } => PlanarDomain::smooth_with_nodes(boundary.clone(), holes.clone(), nodes),
        DomainSpec::Reinhardt2 | DomainSpec::Unbounded { .. } => return Ok(None),
    };
    domain
        .map(Some)
        .map_err(|e| InvalidInput(format!("invalid domain: {e}")))
}

/// Well separated interior points: farthest-point sampling among lattice
/// points at least 0.7 of the maximal depth away from the boundary.
pub fn default_points(domain: &PlanarDomain, count: usize) -> Vec<Complex64> {
    let (x0, x1, y0, y1) = domain.bounding_box();
    let n = 41;
    let mut candidates = vec![];
    for j in 0..n {
        for i in 0..n {
            let z = Complex64::new(
                x0 + (x1 - x0) * (i as f64 + 0.5) / n as f64,
                y0 + (y1 - y0) * (j as f64 + 0.5) / n as f64,
            );
            if domain.contains(z) == Membership::Inside {
                candidates.push((z, domain.boundary_distance(z)));
            }
        }
    }
    let depth = candidates.iter().map(|c| c.1).fold(0.0, f64::max);
    candidates.retain(|c| c.1 >= 0.7 * depth);
    let mut chosen: Vec<Complex64> = vec![];
    while chosen.len() < count && chosen.len() < candidates.len() {
        let score = |z: Complex64| -> f64 {
            if chosen.is_empty() {
                domain.boundary_distance(z)
            } else {
                chosen.iter().map(|p| (p - z).norm()).fold(f64::INFINITY, f64::min)
            }
        };
        let mut best = candidates[0].0;
        let mut best_score = score(best);
        for &(z, _) in &candidates[1..] {
            let s = score(z);
            if s > best_score {
                best = z;
                best_score = s;
            }
        }
        chosen.push(best);
    }
    chosen
}

fn applicable(command: Command, spec: &DomainSpec) -> bool {
    use Command::*;
    match spec {
        DomainSpec::Reinhardt2 => matches!(command, Reinhardt | All),
        DomainSpec::Unbounded { .. } => matches!(command, Classify | All),
        DomainSpec::PuncturedDisk { .. } => !matches!(command, Reinhardt | Szego),
        _ => command != Reinhardt,
    }
}

pub fn run(command: Command, spec: &SpecFile) -> Result<Report, InvalidInput> {
    if !applicable(command, &spec.domain) {
        return Err(InvalidInput(format!(
            "command `{}` does not apply to kind `{}`",
            format!("{command:?}").to_lowercase(),
            spec.domain.kind_name()
        )));
    }
    let mut report = Report::default();
    let tol = spec.settings.tolerances();
    match &spec.domain {
        DomainSpec::Reinhardt2 => reinhardt(spec, &tol, &mut report),
        DomainSpec::Unbounded { label } => {
            let verdict = classify_unbounded();
            let value = match &verdict.verdict {
                Verdict::InfiniteVolumeCase { .. } => format!("InfiniteVolumeCase ({label})"),
                other => format!("{other:?}"),
            };
            let pass = matches!(verdict.verdict, Verdict::InfiniteVolumeCase { .. });
            report.push(row(
                "classify_verdict",
                format!("kind=unbounded label={label}"),
                value,
                "InfiniteVolumeCase".to_string(),
                Provenance::Theorem,
                "-".to_string(),
                pass,
            ));
        }
        _ => {
            let domain = build_domain(spec)?.expect("planar kind");
            let points = match &spec.settings.points {
                Some(points) => points.clone(),
                None => default_points(&domain, DEFAULT_POINTS),
            };
            for &z in points.iter().chain(spec.settings.z0.iter()) {
                if domain.contains(z) != Membership::Inside {
                    return Err(InvalidInput(format!("point {} is not inside the domain", cnum(z))));
                }
            }
            if points.is_empty() {
                return Err(InvalidInput("no interior evaluation points".to_string()));
            }
            let mut ctx = Planar {
                spec,
                domain,
                tol,
                points,
                basis: None,
            };
            let all = command == Command::All;
            if all || command == Command::Area {
                ctx.area(&mut report);
            }
            if all || command == Command::Bergman {
                ctx.bergman(&mut report);
            }
            if all || command == Command::Suita {
                ctx.suita(&mut report);
            }
            if (all && applicable(Command::Szego, &spec.domain)) || command == Command::Szego {
                ctx.szego(&mut report);
            }
            if all || command == Command::Classify {
                ctx.classify(&mut report);
            }
            if all || command == Command::Sublevel {
                ctx.sublevel(&mut report);
            }
        }
    }
    Ok(report)
}

/// `K(z, w)` of `D(c, R)`.
fn disk_bergman(center: Complex64, radius: f64, z: Complex64, w: Complex64) -> Complex64 {
    let r2 = radius * radius;
    r2 / (PI * (r2 - (z - center) * (w - center).conj()).powi(2))
}

/// `K(z, w)` of `{ρ < |z - c| < R}` from its Laurent series.
fn annulus_bergman(center: Complex64, inner: f64, outer: f64, z: Complex64, w: Complex64) -> Complex64 {
    let x = (z - center) * (w - center).conj();
    let q2 = (inner / outer).powi(2);
    let (r2, rho2) = (outer * outer, inner * inner);
    let mut sum = 1.0 / (2.0 * PI * (outer / inner).ln() * x);
    let (up, down) = (x / r2, rho2 / x);
    let (mut pu, mut pd) = (Complex64::new(1.0, 0.0), down * down);
    for n in 0..20_000 {
        let m = n as f64;
        // n ≥ 0 and n = -(n + 2)
        let a = (m + 1.0) * pu / (PI * r2 * (1.0 - q2.powi(n + 1)));
        let b = (m + 1.0) * pd / (PI * rho2 * (1.0 - q2.powi(n + 1)));
        sum += a + b;
        if a.norm() + b.norm() < 1e-18 * sum.norm() {
            break;
        }
        pu *= up;
        pd *= down;
    }
    sum
}

/// `S(z, a)` of `{ρ < |z - c| < R}` from its series.
fn annulus_szego(center: Complex64, inner: f64, outer: f64, z: Complex64, a: Complex64) -> Complex64 {
    let q = inner / outer;
    let x = (z - center) * (a - center).conj() / (outer * outer);
    let y = q * q / x;
    let mut sum = Complex64::new(0.0, 0.0);
    let (mut px, mut py) = (Complex64::new(1.0, 0.0), y);
    for k in 0..20_000 {
        let a_k = px / (2.0 * PI * (1.0 + q.powi(2 * k + 1)));
        let b_k = py / (2.0 * PI * q * (1.0 + q.powi(2 * k + 1)));
        sum += a_k + b_k;
        if a_k.norm() + b_k.norm() < 1e-18 * sum.norm() {
            break;
        }
        px *= x;
        py *= y;
    }
    sum / outer
}

fn pairs(points: &[Complex64]) -> Vec<(Complex64, Complex64)> {
    points
        .iter()
        .flat_map(|&z| points.iter().map(move |&w| (z, w)))
        .collect()
}

impl Planar<'_> {
    fn nodes_label(&self) -> String {
        format!("M={}", self.domain.nodes_per_curve())
    }

    fn basis_label(&self) -> String {
        format!("N={} M={}", self.spec.settings.degree, self.domain.nodes_per_curve())
    }

    fn basis(&mut self) -> Result<&OrthonormalBasis, String> {
        if self.basis.is_none() {
            let guard = self.spec.settings.guard;
            let basis = default_basis(&self.domain, self.spec.settings.degree)
                .map(|b| if let Some(g) = guard { b.with_guard_fraction(g) } else { b })
                .map_err(|e| e.to_string());
            self.basis = Some(basis);
        }
        self.basis.as_ref().unwrap().as_ref().map_err(Clone::clone)
    }

    fn area(&self, report: &mut Report) {
        let area = self.domain.area();
        match self.domain.analytic_area() {
            Some(exact) => report.push(row(
                "area",
                self.nodes_label(),
                num(area),
                num(exact),
                Provenance::ClosedForm,
                num(self.tol.area),
                (area - exact).abs() < self.tol.area,
            )),
            None => {
                let m = self.domain.nodes_per_curve();
                match self.domain.with_nodes(2 * m) {
                    Ok(finer) => report.push(row(
                        "area",
                        format!("M={m} vs M={}", 2 * m),
                        num(area),
                        num(finer.area()),
                        Provenance::SelfConsistency,
                        num(self.tol.area),
                        (area - finer.area()).abs() < self.tol.area,
                    )),
                    Err(e) => report.push(error_row("area", self.nodes_label(), &e)),
                }
            }
        }
    }

    fn bergman(&mut self, report: &mut Report) {
        let label = self.basis_label();
        let basis = match self.basis() {
            Ok(b) => b.clone(),
            Err(e) => return report.push(error_row("bergman_basis", label, &e)),
        };
        let tol = self.tol.clone();
        let value = match basis.truncation() {
            Some(t) => format!("{} of {} terms, truncated (condition {:.3e})", t.kept, t.requested, t.condition),
            None => format!("{} terms, condition {:.3e}", basis.len(), basis.gram_condition()),
        };
        report.push(row(
            "bergman_basis",
            label.clone(),
            value,
            format!("condition <= {MAX_CONDITION:.0e}"),
            Provenance::SelfConsistency,
            "-".to_string(),
            basis.gram_condition() <= MAX_CONDITION,
        ));

        let closed_form = match &self.spec.domain {
            DomainSpec::Disk { center, radius } | DomainSpec::PuncturedDisk { center, radius, .. } => {
                let (c, r) = (*center, *radius);
                Some(Box::new(move |z, w| disk_bergman(c, r, z, w)) as Box<dyn Fn(Complex64, Complex64) -> Complex64>)
            }
            DomainSpec::Annulus { center, inner, outer } => {
                let (c, i, o) = (*center, *inner, *outer);
                Some(Box::new(move |z, w| annulus_bergman(c, i, o, z, w)) as Box<dyn Fn(Complex64, Complex64) -> Complex64>)
            }
            _ => None,
        };
        let pairs = pairs(&self.points);
        if let Some(exact) = closed_form {
            let worst = pairs
                .iter()
                .map(|&(z, w)| (basis.kernel(z, w) - exact(z, w)).norm())
                .fold(0.0, f64::max);
            report.push(row(
                "bergman_kernel",
                format!("{label} pairs={}", pairs.len()),
                num(worst),
                "0".to_string(),
                Provenance::ClosedForm,
                num(tol.kernel),
                worst < tol.kernel,
            ));
        }
        let worst = pairs
            .iter()
            .map(|&(z, w)| {
                let k = basis.kernel(z, w);
                (k - basis.kernel(w, z).conj()).norm() / k.norm().max(1.0)
            })
            .fold(0.0, f64::max);
        report.push(row(
            "bergman_hermitian",
            format!("{label} pairs={}", pairs.len()),
            num(worst),
            "0".to_string(),
            Provenance::SelfConsistency,
            num(tol.symmetry),
            worst < tol.symmetry,
        ));
        let grid = self.spec.settings.grid;
        match minimal_scan(&self.domain, &basis, grid) {
            Ok(scan) => report.push(row(
                "volume_inequality",
                format!("{label} grid={grid} admissible={}", scan.admissible),
                num(scan.margin),
                ">= 0".to_string(),
                Provenance::Theorem,
                num(tol.margin),
                scan.margin >= -tol.margin,
            )),
            Err(e) => report.push(error_row("volume_inequality", label.clone(), &e)),
        }
        for &z in &self.points {
            let inputs = format!("{label} z0={}", cnum(z));
            match mean_one_check(&basis, z) {
                Ok(r) => report.push(row(
                    "mean_value",
                    inputs,
                    num(r),
                    "0".to_string(),
                    Provenance::Theorem,
                    num(tol.mean),
                    r < tol.mean,
                )),
                Err(e) => report.push(error_row("mean_value", inputs, &e)),
            }
        }
    }

    fn suita(&mut self, report: &mut Report) {
        let label = self.basis_label();
        let basis = match self.basis() {
            Ok(b) => b.clone(),
            Err(e) => return report.push(error_row("suita_margin", label, &e)),
        };
        let tol = self.tol.clone();
        let disk_like = matches!(self.spec.domain, DomainSpec::Disk { .. } | DomainSpec::PuncturedDisk { .. });
        for &z in &self.points {
            let inputs = format!("{label} z={}", cnum(z));
            match suita_margin(&self.domain, &basis, z) {
                Ok(m) if disk_like => report.push(row(
                    "suita_margin",
                    inputs,
                    num(m),
                    "0 (disk equality)".to_string(),
                    Provenance::Theorem,
                    num(tol.suita),
                    m.abs() < tol.suita,
                )),
                Ok(m) => report.push(row(
                    "suita_margin",
                    inputs,
                    num(m),
                    ">= 0".to_string(),
                    Provenance::Theorem,
                    num(tol.suita),
                    m >= -tol.suita,
                )),
                Err(e) => report.push(error_row("suita_margin", inputs, &e)),
            }
        }
        let evaluator = match GreensEvaluator::new(&self.domain) {
            Ok(e) => e,
            Err(e) => return report.push(error_row("robin", self.nodes_label(), &e)),
        };
        for &z in &self.points {
            let inputs = format!("z0={}", cnum(z));
            let closed = match robin(&self.domain, z) {
                Ok(r) => r,
                Err(e) => {
                    report.push(error_row("robin", inputs, &e));
                    continue;
                }
            };
            match closed.method {
                RobinMethod::ClosedForm => match robin_extrapolated(&evaluator, z) {
                    Ok(ext) => report.push(row(
                        "robin_extrapolated",
                        inputs,
                        num(ext.lambda),
                        num(closed.lambda),
                        Provenance::ClosedForm,
                        num(tol.robin),
                        (ext.lambda - closed.lambda).abs() < tol.robin,
                    )),
                    Err(e) => report.push(error_row("robin_extrapolated", inputs, &e)),
                },
                RobinMethod::Extrapolated { spread } => report.push(row(
                    "robin_direction_spread",
                    format!("{inputs} lambda={}", num(closed.lambda)),
                    num(spread),
                    "0".to_string(),
                    Provenance::SelfConsistency,
                    num(tol.robin),
                    spread < tol.robin,
                )),
            }
        }
    }

    fn szego(&mut self, report: &mut Report) {
        let label = self.nodes_label();
        let tol = self.tol.clone();
        let solver = match SzegoSolver::new(&self.domain) {
            Ok(s) => s,
            Err(e) => return report.push(error_row("szego", label, &e)),
        };
        let mut solutions = vec![];
        for &a in &self.points {
            match solver.solve(a) {
                Ok(s) => solutions.push(s),
                Err(e) => return report.push(error_row("szego", format!("{label} a={}", cnum(a)), &e)),
            }
        }
        let exact: Option<Box<dyn Fn(Complex64, Complex64) -> Complex64>> = match &self.spec.domain {
            DomainSpec::Disk { center, radius } => {
                let (c, r) = (*center, *radius);
                Some(Box::new(move |z, a| {
                    1.0 / (2.0 * PI * r * (1.0 - (z - c) * (a - c).conj() / (r * r)))
                }))
            }
            DomainSpec::Annulus { center, inner, outer } => {
                let (c, i, o) = (*center, *inner, *outer);
                Some(Box::new(move |z, a| annulus_szego(c, i, o, z, a)))
            }
            _ => None,
        };
        let count = solutions.len() * solutions.len();
        if let Some(exact) = exact {
            let worst = solutions
                .iter()
                .flat_map(|s| self.points.iter().map(move |&z| (s, z)))
                .map(|(s, z)| (s.eval(z) - exact(z, s.base_point())).norm())
                .fold(0.0, f64::max);
            report.push(row(
                "szego_kernel",
                format!("{label} pairs={count}"),
                num(worst),
                "0".to_string(),
                Provenance::ClosedForm,
                num(tol.szego),
                worst < tol.szego,
            ));
        }
        let mut worst: f64 = 0.0;
        for (i, s) in solutions.iter().enumerate() {
            for (j, t) in solutions.iter().enumerate() {
                let (zi, zj) = (self.points[i], self.points[j]);
                worst = worst.max((t.eval(zi) - s.eval(zj).conj()).norm());
            }
        }
        report.push(row(
            "szego_conjugate_symmetry",
            format!("{label} pairs={count}"),
            num(worst),
            "0".to_string(),
            Provenance::SelfConsistency,
            num(tol.szego),
            worst < tol.szego,
        ));
        let least = solutions.iter().map(|s| s.diagonal()).fold(f64::INFINITY, f64::min);
        report.push(row(
            "szego_diagonal",
            format!("{label} points={}", solutions.len()),
            num(least),
            "> 0".to_string(),
            Provenance::Theorem,
            "-".to_string(),
            least > 0.0,
        ));
        let holes = self.domain.holes().len();
        for s in &solutions {
            let inputs = format!("{label} a={}", cnum(s.base_point()));
            match zero_count(&self.domain, s) {
                Ok(count) => report.push(row(
                    "szego_zero_count",
                    inputs,
                    format!("{} (winding {:.6})", count.zeros, count.winding),
                    holes.to_string(),
                    Provenance::Theorem,
                    "0".to_string(),
                    count.zeros == holes,
                )),
                Err(e) => report.push(error_row("szego_zero_count", inputs, &e)),
            }
        }
        for j in 0..holes {
            let inputs = format!("{label} hole={j}");
            match f_field_mean(&self.domain, j) {
                Ok(mean) => report.push(row(
                    "f_field_mean",
                    inputs,
                    num(mean.norm()),
                    "0".to_string(),
                    Provenance::Theorem,
                    num(tol.field_mean),
                    mean.norm() < tol.field_mean,
                )),
                Err(e) => report.push(error_row("f_field_mean", inputs, &e)),
            }
        }
        let basis_label = self.basis_label();
        let basis = match self.basis() {
            Ok(b) => b.clone(),
            Err(e) => return report.push(error_row("bergman_szego_fit", basis_label, &e)),
        };
        let measures = match HarmonicMeasures::new(&self.domain) {
            Ok(m) => m,
            Err(e) => return report.push(error_row("bergman_szego_fit", basis_label, &e)),
        };
        let options = FitOptions {
            seed: self.spec.settings.seed,
            ..FitOptions::default()
        };
        for &a in &self.points {
            let inputs = format!("{basis_label} a={} seed={}", cnum(a), options.seed);
            match fit_with(&basis, &solver, &measures, a, &options) {
                Ok(fit) => report.push(row(
                    "bergman_szego_fit",
                    inputs,
                    num(fit.holdout_residual),
                    "0".to_string(),
                    Provenance::Theorem,
                    num(tol.fit),
                    fit.holdout_residual < tol.fit,
                )),
                Err(e) => report.push(error_row("bergman_szego_fit", inputs, &e)),
            }
        }
    }

    fn classify(&mut self, report: &mut Report) {
        let label = format!("{} grid={}", self.basis_label(), self.spec.settings.grid);
        let grid = self.spec.settings.grid;
        let basis = match self.basis() {
            Ok(b) => b.clone(),
            Err(e) => return report.push(error_row("classify_verdict", label, &e)),
        };
        let verdict = match classify_with(&basis, grid) {
            Ok(v) => v,
            Err(e) => return report.push(error_row("classify_verdict", label, &e)),
        };
        let tol = self.tol.classify;
        let value = match &verdict.verdict {
            Verdict::DiskMinusPolar { center, radius } => {
                format!("DiskMinusPolar center={} radius={:.6}", cnum(*center), radius)
            }
            Verdict::NotMinimal { margin, argmin } => {
                format!("NotMinimal margin={} argmin={}", num(*margin), cnum(*argmin))
            }
            other => format!("{other:?}"),
        };
        let (reference, pass) = match (&self.spec.domain, &verdict.verdict) {
            (
                DomainSpec::Disk { center, radius } | DomainSpec::PuncturedDisk { center, radius, .. },
                found,
            ) => {
                let reference = format!("DiskMinusPolar center={} radius={:.6}", cnum(*center), radius);
                let pass = match found {
                    Verdict::DiskMinusPolar { center: c, radius: r } => {
                        (c - center).norm() < tol && (r - radius).abs() < tol
                    }
                    _ => false,
                };
                (reference, pass)
            }
            (_, found) => (
                format!("NotMinimal margin>{}", num(tol)),
                matches!(found, Verdict::NotMinimal { margin, .. } if *margin > tol),
            ),
        };
        report.push(row(
            "classify_verdict",
            label.clone(),
            value,
            reference,
            Provenance::Theorem,
            num(tol),
            pass,
        ));
        if let Some(e) = &verdict.evidence {
            report.push(row(
                "minimality_biconditional",
                label,
                format!("margin={} row_deviation={}", num(e.refined_margin), num(e.constancy)),
                format!(
                    "margin<={} iff row_deviation<{}",
                    num(e.margin_threshold),
                    num(e.constancy_threshold)
                ),
                Provenance::Theorem,
                "-".to_string(),
                verdict.consistent(),
            ));
        }
    }

    fn sublevel(&mut self, report: &mut Report) {
        let tol = self.tol.clone();
        let disk = match &self.spec.domain {
            DomainSpec::Disk { center, radius } | DomainSpec::PuncturedDisk { center, radius, .. } => {
                Some((*center, *radius))
            }
            _ => None,
        };
        let z0 = self.spec.settings.z0.unwrap_or_else(|| match disk {
            Some((c, _)) if self.domain.contains(c) == Membership::Inside => c,
            _ => self.points[0],
        });
        let taus = &self.spec.settings.taus;
        let inputs = format!(
            "z0={} taus={}",
            cnum(z0),
            taus.iter().map(|t| format!("{t}")).collect::<Vec<_>>().join(",")
        );
        let profile = match sublevel_profile(&self.domain, z0, taus) {
            Ok(p) => p,
            Err(e) => return report.push(error_row("sublevel_profile", inputs, &e)),
        };
        report.push(row(
            "sublevel_levels",
            inputs.clone(),
            format!("{} measured, {} dropped", profile.entries.len(), profile.dropped.len()),
            format!("{} measured", taus.len()),
            Provenance::SelfConsistency,
            "-".to_string(),
            profile.dropped.is_empty(),
        ));
        let worst_step = profile
            .entries
            .windows(2)
            .map(|w| w[1].ratio - w[0].ratio)
            .fold(f64::NEG_INFINITY, f64::max);
        report.push(row(
            "sublevel_ratio_monotone",
            inputs.clone(),
            num(worst_step),
            "<= 0".to_string(),
            Provenance::Theorem,
            num(tol.sublevel),
            profile.ratio_non_increasing(tol.sublevel),
        ));
        report.push(row(
            "sublevel_volume_monotone",
            inputs.clone(),
            profile.volumes_increasing().to_string(),
            "true".to_string(),
            Provenance::Theorem,
            "-".to_string(),
            profile.volumes_increasing(),
        ));
        if let Some((c, r)) = disk {
            if z0 == c {
                let target = 1.0 / (PI * r * r);
                let worst = profile
                    .entries
                    .iter()
                    .map(|e| (e.ratio - target).abs())
                    .fold(0.0, f64::max);
                report.push(row(
                    "sublevel_ratio_disk",
                    inputs.clone(),
                    num(worst),
                    format!("ratio = {}", num(target)),
                    Provenance::ClosedForm,
                    num(tol.ratio),
                    worst < tol.ratio,
                ));
            }
        }
        let Some(deepest) = profile.entries.first() else {
            return;
        };
        match robin(&self.domain, z0) {
            Ok(lambda) => {
                let dev = profile.sandwich_deviation(deepest.tau, lambda.lambda).unwrap_or(f64::INFINITY);
                report.push(row(
                    "sublevel_sandwich",
                    format!("z0={} tau={} lambda={}", cnum(z0), deepest.tau, num(lambda.lambda)),
                    num(dev),
                    "0".to_string(),
                    Provenance::Theorem,
                    num(tol.sandwich),
                    dev <= tol.sandwich,
                ));
            }
            Err(e) => report.push(error_row("sublevel_sandwich", inputs, &e)),
        }
    }
}

fn reinhardt(spec: &SpecFile, tol: &Tolerances, report: &mut Report) {
    let t = tol.reinhardt;
    let profile = ReinhardtProfile2::quartic();
    let adaptive = volume(&profile);
    let table = MonomialNormTable::new(&profile, DEFAULT_TABLE_SIZE);
    let exact = table.get(0, 0).expect("table has the constant term");
    let ts = profile.cutoff();
    let closed = PI * PI * (ts - ts * ts / 2.0 - ts.powi(3) / 3.0);
    let label = "|z1|^4+|z1|^2+|z2|^2<1".to_string();
    let mut push = |check: &str, inputs: String, value: f64, reference: f64, provenance: Provenance| {
        report.push(row(
            check,
            inputs,
            num(value),
            num(reference),
            provenance,
            num(t),
            (value - reference).abs() < t,
        ));
    };
    push("reinhardt_volume", label.clone(), adaptive, closed, Provenance::ClosedForm);
    push("reinhardt_volume_routes", "adaptive vs Beta sums".to_string(), adaptive, exact, Provenance::SelfConsistency);
    let k00 = kernel_origin(&table).value;
    push("reinhardt_kernel_origin", "K(0,0)*v".to_string(), k00 * adaptive, 1.0, Provenance::ClosedForm);

    let samples = spec.settings.boundary_samples;
    let seed = spec.settings.seed;
    let summary = match reinhardt_report(samples, seed) {
        Ok(s) => s,
        Err(e) => {
            return report.push(error_row("reinhardt_hessian", format!("samples={samples} seed={seed}"), &e));
        }
    };
    let mut push = |check: &str, inputs: String, value: f64, reference: f64, provenance: Provenance| {
        report.push(row(
            check,
            inputs,
            num(value),
            num(reference),
            provenance,
            num(t),
            (value - reference).abs() < t,
        ));
    };
    push(
        "reinhardt_min_hessian_eigenvalue",
        format!("samples={samples} seed={seed}"),
        summary.min_hessian_eigenvalue,
        2.0,
        Provenance::ClosedForm,
    );
    let roots = obstruction_roots();
    let (sqrt3, golden) = (3f64.sqrt() - 1.0, (5f64.sqrt() - 1.0) / 2.0);
    push("obstruction_root_circle", "x^2+2x-2=0".to_string(), roots.circle, sqrt3, Provenance::ClosedForm);
    push("obstruction_root_axis", "x^2+x-1=0".to_string(), roots.axis, golden, Provenance::ClosedForm);
    push(
        "obstruction_root_difference",
        "circle - axis".to_string(),
        roots.difference,
        sqrt3 - golden,
        Provenance::ClosedForm,
    );

    let a1 = Complex64::new(roots.circle.sqrt(), 0.0);
    let flat = circle_certificate(a1, Complex64::new(0.0, 0.0), THETA_GRID);
    report.push(row(
        "circle_certificate_flat",
        format!("a3=0 grid={THETA_GRID}"),
        num(flat.oscillation),
        "0".to_string(),
        Provenance::SelfConsistency,
        num(t),
        flat.forces_a3_zero() && flat.oscillation < t,
    ));
    let a3 = Complex64::new(0.05, 0.0);
    let bumpy = circle_certificate(a1, a3, THETA_GRID);
    report.push(row(
        "circle_certificate_detects_a3",
        format!("a3={} grid={THETA_GRID}", cnum(a3)),
        num(bumpy.oscillation),
        num(2.0 * a3.norm()),
        Provenance::ClosedForm,
        num(t),
        !bumpy.forces_a3_zero() && (bumpy.oscillation - 2.0 * a3.norm()).abs() < t,
    ));
    let mc = monte_carlo_inner_product(&profile, MONTE_CARLO_SAMPLES, seed);
    report.push(row(
        "monomial_orthogonality",
        format!("<z1,z2> samples={MONTE_CARLO_SAMPLES} seed={seed}"),
        cnum(mc.value),
        format!("0 within 4 standard errors ({:.3e}, {:.3e})", mc.std_error.0, mc.std_error.1),
        Provenance::Theorem,
        "4 sigma".to_string(),
        mc.consistent_with_zero(4.0),
    ));
    report.push(row(
        "reinhardt_verdict",
        label,
        summary.verdict().to_string(),
        "not biholomorphic to the ball".to_string(),
        Provenance::Theorem,
        "-".to_string(),
        !summary.biholomorphic_to_ball,
    ));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn annulus_series_match_the_library() {
        let domain = PlanarDomain::annulus(c(0.2, -0.1), 0.6, 1.5).unwrap();
        let basis = default_basis(&domain, 60).unwrap();
        let solver = SzegoSolver::new(&domain).unwrap();
        let (z, w) = (c(1.1, 0.4), c(-0.6, -0.7));
        let k = annulus_bergman(c(0.2, -0.1), 0.6, 1.5, z, w);
        assert!((basis.kernel(z, w) - k).norm() < 1e-8 * k.norm());
        let s = annulus_szego(c(0.2, -0.1), 0.6, 1.5, z, w);
        assert!((solver.solve(w).unwrap().eval(z) - s).norm() < 1e-9 * s.norm());
    }

    #[test]
    fn default_points_are_interior_and_distinct() {
        let domain = PlanarDomain::annulus(c(0.0, 0.0), 0.5, 1.0).unwrap();
        let points = default_points(&domain, 5);
        assert_eq!(points.len(), 5);
        for (i, &p) in points.iter().enumerate() {
            assert_eq!(domain.contains(p), Membership::Inside);
            assert!(domain.boundary_distance(p) >= 0.17);
            for &q in &points[..i] {
                assert!((p - q).norm() > 0.1);
            }
        }
        let disk = PlanarDomain::unit_disk();
        assert!(default_points(&disk, 1)[0].norm() < 1e-12);
    }

    #[test]
    fn commands_are_checked_against_the_kind() {
        let reinhardt = parse("kind = reinhardt2\n").unwrap();
        assert!(run(Command::Area, &reinhardt).is_err());
        let punctured = parse("kind = punctured_disk\nradius = 1\npunctures = 0.3\n").unwrap();
        assert!(run(Command::Szego, &punctured).is_err());
        let disk = parse("kind = disk\nradius = 1\npoints = 2\n").unwrap();
        assert!(run(Command::Area, &disk).is_err());
    }

    #[test]
    fn unbounded_domains_are_labelled() {
        let spec = parse("kind = unbounded\nlabel = C minus {0}\n").unwrap();
        let report = run(Command::Classify, &spec).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert!(report.rows[0].pass);
        assert!(report.rows[0].value.starts_with("InfiniteVolumeCase"));
    }
}
