//! Line-oriented domain spec files.
//!
//! ```text
//! # unit disk with one puncture
//! kind = punctured_disk
//! center = 0
//! radius = 1
//! punctures = 0.3+0.2i
//! ```
//!
//! Complex values are written `re+imi` (`0.5`, `-2i`, `1e-3-0.25i`). Lists
//! are comma separated. Smooth domains take one `boundary` curve and any
//! number of `hole` lines, each `circle <center> <radius>`,
//! `ellipse <center> <semi_major> <semi_minor> <angle>` or
//! `starlike <center> <radius> <amplitude> <lobes>`.

use std::collections::BTreeMap;
use std::fmt;

use bergkern::{Complex64, CurveShape};

#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl SpecError {
    fn at(line: usize, field: &str, message: impl Into<String>) -> Self {
        SpecError {
            line: Some(line),
            field: Some(field.to_string()),
            message: message.into(),
        }
    }

    pub fn general(message: impl Into<String>) -> Self {
        SpecError {
            line: None,
            field: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.field) {
            (Some(line), Some(field)) => write!(f, "line {line}, field `{field}`: {}", self.message),
            (Some(line), None) => write!(f, "line {line}: {}", self.message),
            (None, Some(field)) => write!(f, "field `{field}`: {}", self.message),
            (None, None) => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for SpecError {}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Disk {
        center: Complex64,
        radius: f64,
    },
    Annulus {
        center: Complex64,
        inner: f64,
        outer: f64,
    },
    PuncturedDisk {
        center: Complex64,
        radius: f64,
        punctures: Vec<Complex64>,
    },
    Smooth {
        boundary: CurveShape,
        holes: Vec<CurveShape>,
    },
    Reinhardt2,
    Unbounded {
        label: String,
    },
}

impl DomainSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            DomainSpec::Disk { .. } => "disk",
            DomainSpec::Annulus { .. } => "annulus",
            DomainSpec::PuncturedDisk { .. } => "punctured_disk",
            DomainSpec::Smooth { .. } => "smooth",
            DomainSpec::Reinhardt2 => "reinhardt2",
            DomainSpec::Unbounded { .. } => "unbounded",
        }
    }
}

/// Check tolerances. Every value is multiplied by `tol_scale` before use.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub area: f64,
    pub kernel: f64,
    pub symmetry: f64,
    pub margin: f64,
    pub mean: f64,
    pub suita: f64,
    pub robin: f64,
    pub szego: f64,
    pub fit: f64,
    pub field_mean: f64,
    pub classify: f64,
    pub sublevel: f64,
    pub ratio: f64,
    pub sandwich: f64,
    pub reinhardt: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            area: 1e-10,
            kernel: 1e-6,
            symmetry: 1e-12,
            margin: 1e-8,
            mean: 1e-10,
            suita: 1e-6,
            robin: 1e-6,
            szego: 1e-8,
            fit: 1e-5,
            field_mean: 1e-8,
            classify: 1e-3,
            sublevel: 1e-9,
            ratio: 1e-6,
            sandwich: 0.02,
            reinhardt: 1e-9,
        }
    }
}

impl Tolerances {
    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "tol_area" => &mut self.area,
            "tol_kernel" => &mut self.kernel,
            "tol_symmetry" => &mut self.symmetry,
            "tol_margin" => &mut self.margin,
            "tol_mean" => &mut self.mean,
            "tol_suita" => &mut self.suita,
            "tol_robin" => &mut self.robin,
            "tol_szego" => &mut self.szego,
            "tol_fit" => &mut self.fit,
            "tol_field_mean" => &mut self.field_mean,
            "tol_classify" => &mut self.classify,
            "tol_sublevel" => &mut self.sublevel,
            "tol_ratio" => &mut self.ratio,
            "tol_sandwich" => &mut self.sandwich,
            "tol_reinhardt" => &mut self.reinhardt,
            _ => return None,
        })
    }

    pub fn scaled(&self, s: f64) -> Tolerances {
        Tolerances {
            area: self.area * s,
            kernel: self.kernel * s,
            symmetry: self.symmetry * s,
            margin: self.margin * s,
            mean: self.mean * s,
            suita: self.suita * s,
            robin: self.robin * s,
            szego: self.szego * s,
            fit: self.fit * s,
            field_mean: self.field_mean * s,
            classify: self.classify * s,
            sublevel: self.sublevel * s,
            ratio: self.ratio * s,
            sandwich: self.sandwich * s,
            reinhardt: self.reinhardt * s,
        }
    }
}

/// Solver settings; `None` means the library default.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub degree: usize,
    pub nodes: Option<usize>,
    pub grid: usize,
    pub guard: Option<f64>,
    pub seed: u64,
    pub boundary_samples: usize,
    pub points: Option<Vec<Complex64>>,
    pub z0: Option<Complex64>,
    pub taus: Vec<f64>,
    pub tol_scale: f64,
    pub tolerances: Tolerances,
}

pub const DEFAULT_DEGREE: usize = 48;

impl Default for Settings {
    fn default() -> Self {
        Settings {
            degree: DEFAULT_DEGREE,
            nodes: None,
            grid: bergkern::rigidity::DEFAULT_GRID,
            guard: None,
            seed: 20_240_501,
            boundary_samples: 10_000,
            points: None,
            z0: None,
            taus: (1..=8).map(|k| -0.5 * k as f64).collect(),
            tol_scale: 1.0,
            tolerances: Tolerances::default(),
        }
    }
}

impl Settings {
    pub fn tolerances(&self) -> Tolerances {
        self.tolerances.scaled(self.tol_scale)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecFile {
    pub domain: DomainSpec,
    pub settings: Settings,
}

const GEOMETRY_KEYS: [(&str, &[&str]); 6] = [
    ("disk", &["center", "radius"]),
    ("annulus", &["center", "inner", "outer"]),
    ("punctured_disk", &["center", "radius", "punctures"]),
    ("smooth", &["boundary", "hole"]),
    ("reinhardt2", &[]),
    ("unbounded", &["label"]),
];

const SETTING_KEYS: [&str; 10] = [
    "degree",
    "nodes",
    "grid",
    "guard",
    "seed",
    "boundary_samples",
    "points",
    "z0",
    "taus",
    "tol_scale",
];

/// One `key = value` line.
#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s = text.trim();
    let err = || format!("`{text}` is not a complex number of the form re+imi");
    if s.is_empty() || s.contains(char::is_whitespace) {
        return Err(err());
    }
    let real = |t: &str| -> Result<f64, String> {
        let v: f64 = t.parse().map_err(|_| err())?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(err())
        }
    };
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(real(s)?, 0.0));
    };
    // split at the last sign that is neither leading nor an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> Result<f64, String> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => real(t),
        }
    };
    match split {
        Some(k) => Ok(Complex64::new(real(&body[..k])?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

fn parse_list<T>(text: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    text.split(',').map(|t| item(t.trim())).collect()
}

fn parse_real(text: &str) -> Result<f64, String> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("`{text}` is not a finite real number"))
}

fn parse_positive(text: &str) -> Result<f64, String> {
    let v = parse_real(text)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got {v}"))
    }
}

fn parse_count(text: &str) -> Result<usize, String> {
    match text.trim().parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("`{text}` is not a positive integer")),
    }
}

pub fn parse_shape(text: &str) -> Result<CurveShape, String> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let arity = |n: usize| -> Result<(), String> {
        if tokens.len() == n + 1 {
            Ok(())
        } else {
            Err(format!("`{}` takes {n} parameters, got {}", tokens[0], tokens.len() - 1))
        }
    };
    let shape = match tokens.first().copied() {
        Some("circle") => {
            arity(2)?;
            CurveShape::Circle {
                center: parse_complex(tokens[1])?,
                radius: parse_positive(tokens[2])?,
            }
        }
        Some("ellipse") => {
            arity(4)?;
            CurveShape::Ellipse {
                center: parse_complex(tokens[1])?,
                semi_major: parse_positive(tokens[2])?,
                semi_minor: parse_positive(tokens[3])?,
                angle: parse_real(tokens[4])?,
            }
        }
        Some("starlike") => {
            arity(4)?;
            CurveShape::Starlike {
                center: parse_complex(tokens[1])?,
                radius: parse_positive(tokens[2])?,
                amplitude: parse_real(tokens[3])?,
                lobes: tokens[4]
                    .parse()
                    .map_err(|_| format!("`{}` is not a lobe count", tokens[4]))?,
            }
        }
        Some(other) => return Err(format!("unknown curve `{other}` (circle, ellipse or starlike)")),
        None => return Err("empty curve description".to_string()),
    };
    Ok(shape)
}

pub fn parse(text: &str) -> Result<SpecFile, SpecError> {
    let mut entries: BTreeMap<String, Vec<Entry>> = BTreeMap::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(SpecError {
                line: Some(line),
                field: None,
                message: format!("expected `key = value`, got `{content}`"),
            });
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(SpecError {
                line: Some(line),
                field: None,
                message: "missing key".to_string(),
            });
        }
        let value = value.trim();
        if value.is_empty() {
            return Err(SpecError::at(line, key, "missing value"));
        }
        let list = entries.entry(key.to_string()).or_default();
        if !list.is_empty() && key != "hole" {
            return Err(SpecError::at(
                line,
                key,
                format!("duplicate key (first set on line {})", list[0].line),
            ));
        }
        list.push(Entry {
            line,
            value: value.to_string(),
        });
    }

    let kind_entry = entries
        .get("kind")
        .map(|e| e[0].clone())
        .ok_or_else(|| SpecError::general("missing required key `kind`"))?;
    let Some((kind, geometry_keys)) = GEOMETRY_KEYS
        .iter()
        .find(|(k, _)| *k == kind_entry.value)
        .copied()
    else {
        return Err(SpecError::at(
            kind_entry.line,
            "kind",
            format!(
                "unknown kind `{}` (disk, annulus, punctured_disk, smooth, reinhardt2, unbounded)",
                kind_entry.value
            ),
        ));
    };

    let mut tolerances = Tolerances::default();
    for (key, list) in &entries {
        let known = key == "kind"
            || geometry_keys.contains(&key.as_str())
            || SETTING_KEYS.contains(&key.as_str())
            || tolerances.slot(key).is_some();
        if !known {
            return Err(SpecError::at(list[0].line, key, format!("unknown key for kind `{kind}`")));
        }
    }

    let get = |key: &str| entries.get(key).map(|e| &e[0]);
    let required_real = |key: &str| -> Result<f64, SpecError> {
        field(&entries, key, parse_positive)?.ok_or_else(|| SpecError {
            line: None,
            field: Some(key.to_string()),
            message: format!("required for kind `{kind}`"),
        })
    };
    let center = || -> Result<Complex64, SpecError> {
        Ok(get("center")
            .map(|e| parse_complex(&e.value).map_err(|m| SpecError::at(e.line, "center", m)))
            .transpose()?
            .unwrap_or(Complex64::new(0.0, 0.0)))
    };

    let domain = match kind {
        "disk" => DomainSpec::Disk {
            center: center()?,
            radius: required_real("radius")?,
        },
        "annulus" => {
            let (inner, outer) = (required_real("inner")?, required_real("outer")?);
            if inner >= outer {
                return Err(SpecError::at(get("inner").unwrap().line, "inner", "must be smaller than `outer`"));
            }
            DomainSpec::Annulus {
                center: center()?,
                inner,
                outer,
            }
        }
        "punctured_disk" => DomainSpec::PuncturedDisk {
            center: center()?,
            radius: required_real("radius")?,
            punctures: get("punctures")
                .map(|e| parse_list(&e.value, parse_complex).map_err(|m| SpecError::at(e.line, "punctures", m)))
                .transpose()?
                .unwrap_or_default(),
        },
        "smooth" => {
            let boundary = get("boundary").ok_or_else(|| SpecError {
                line: None,
                field: Some("boundary".to_string()),
                message: "required for kind `smooth`".to_string(),
            })?;
            let boundary = parse_shape(&boundary.value).map_err(|m| SpecError::at(boundary.line, "boundary", m))?;
            let holes = entries
                .get("hole")
                .map(|list| {
                    list.iter()
                        .map(|e| parse_shape(&e.value).map_err(|m| SpecError::at(e.line, "hole", m)))
                        .collect::<Result<Vec<_>, _>>()
                })
                .transpose()?
                .unwrap_or_default();
            DomainSpec::Smooth { boundary, holes }
        }
        "reinhardt2" => DomainSpec::Reinhardt2,
        _ => DomainSpec::Unbounded {
            label: get("label")
                .map(|e| e.value.clone())
                .unwrap_or_else(|| "C minus a polar set".to_string()),
        },
    };

    let mut settings = Settings::default();
    if let Some(v) = field(&entries, "degree", parse_count)? {
        settings.degree = v;
    }
    settings.nodes = field(&entries, "nodes", parse_count)?;
    if let Some(v) = field(&entries, "grid", parse_count)? {
        settings.grid = v;
    }
    settings.guard = field(&entries, "guard", |t| {
        let v = parse_real(t)?;
        if (0.0..1.0).contains(&v) {
            Ok(v)
        } else {
            Err(format!("guard fraction must lie in [0, 1), got {v}"))
        }
    })?;
    if let Some(v) = field(&entries, "seed", |t| t.parse::<u64>().map_err(|_| format!("`{t}` is not a seed")))? {
        settings.seed = v;
    }
    if let Some(v) = field(&entries, "boundary_samples", parse_count)? {
        settings.boundary_samples = v;
    }
    settings.points = field(&entries, "points", |t| parse_list(t, parse_complex))?;
    settings.z0 = field(&entries, "z0", parse_complex)?;
    if let Some(v) = field(&entries, "taus", |t| {
        let taus = parse_list(t, parse_real)?;
        if taus.iter().all(|&x| x < 0.0) {
            Ok(taus)
        } else {
            Err("sublevel levels must be negative".to_string())
        }
    })? {
        settings.taus = v;
    }
    if let Some(v) = field(&entries, "tol_scale", parse_non_negative)? {
        settings.tol_scale = v;
    }
    for (key, list) in &entries {
        if let Some(slot) = tolerances.slot(key) {
            *slot = parse_non_negative(&list[0].value).map_err(|m| SpecError::at(list[0].line, key, m))?;
        }
    }
    settings.tolerances = tolerances;
    Ok(SpecFile { domain, settings })
}

fn field<T>(
    entries: &BTreeMap<String, Vec<Entry>>,
    key: &str,
    f: impl Fn(&str) -> Result<T, String>,
) -> Result<Option<T>, SpecError> {
    entries
        .get(key)
        .map(|e| f(&e[0].value).map_err(|m| SpecError::at(e[0].line, key, m)))
        .transpose()
}

pub fn parse_non_negative(text: &str) -> Result<f64, String> {
    let v = parse_real(text)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a non-negative number, got {v}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_grammar() {
        assert_eq!(parse_complex("0.5").unwrap(), c(0.5, 0.0));
        assert_eq!(parse_complex("-0.45").unwrap(), c(-0.45, 0.0));
        assert_eq!(parse_complex("0.3+0.2i").unwrap(), c(0.3, 0.2));
        assert_eq!(parse_complex("-0.1-0.4i").unwrap(), c(-0.1, -0.4));
        assert_eq!(parse_complex("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1+i").unwrap(), c(1.0, 1.0));
        assert_eq!(parse_complex("1e-3-2.5e+1i").unwrap(), c(1e-3, -25.0));
        assert_eq!(parse_complex("-1e-3i").unwrap(), c(0.0, -1e-3));
        for bad in ["", "i i", "0.3 + 0.2i", "abc", "1+2j", "nan", "1++2i", "0.1,0.2"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn disk_with_comments_and_overrides() {
        let spec = parse(
            "# unit disk\nkind = disk   # trailing comment\nradius = 1\ncenter = 0.1-0.2i\n\ndegree = 20\ntol_kernel = 1e-7\ntol_scale = 2\n",
        )
        .unwrap();
        assert_eq!(
            spec.domain,
            DomainSpec::Disk {
                center: c(0.1, -0.2),
                radius: 1.0
            }
        );
        assert_eq!(spec.settings.degree, 20);
        assert_eq!(spec.settings.tolerances().kernel, 2e-7);
        assert_eq!(spec.settings.tolerances().mean, 2e-10);
    }

    #[test]
    fn smooth_domain_with_holes() {
        let spec = parse(
            "kind = smooth\nboundary = ellipse 0 1.2 1.0 0.2\nhole = circle -0.45 0.18\nhole = circle 0.4+0.15i 0.15\n",
        )
        .unwrap();
        match spec.domain {
            DomainSpec::Smooth { boundary, holes } => {
                assert!(matches!(boundary, CurveShape::Ellipse { .. }));
                assert_eq!(holes.len(), 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn punctures_and_points_are_lists() {
        let spec = parse("kind = punctured_disk\nradius = 1\npunctures = 0.3+0.2i, -0.5i\npoints = 0, 0.5\n").unwrap();
        match &spec.domain {
            DomainSpec::PuncturedDisk { punctures, .. } => assert_eq!(punctures, &vec![c(0.3, 0.2), c(0.0, -0.5)]),
            other => panic!("{other:?}"),
        }
        assert_eq!(spec.settings.points, Some(vec![c(0.0, 0.0), c(0.5, 0.0)]));
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let err = parse("kind = disk\nradius = 1\ncolour = red\n").unwrap_err();
        assert_eq!((err.line, err.field.as_deref()), (Some(3), Some("colour")));

        let err = parse("kind = annulus\ninner = 0.5\nouter = 0.5\n").unwrap_err();
        assert_eq!(err.field.as_deref(), Some("inner"));

        let err = parse("kind = disk\nradius = -1\n").unwrap_err();
        assert_eq!((err.line, err.field.as_deref()), (Some(2), Some("radius")));

        let err = parse("kind = disk\nradius = 1\nradius = 2\n").unwrap_err();
        assert_eq!(err.line, Some(3));

        let err = parse("kind = disk\nradius 1\n").unwrap_err();
        assert_eq!(err.line, Some(2));

        assert!(parse("radius = 1\n").is_err());
        assert!(parse("kind = torus\n").is_err());
        assert!(parse("kind = disk\n").is_err());
        // geometry keys are checked against the kind
        assert!(parse("kind = disk\nradius = 1\ninner = 0.5\n").is_err());
        assert!(parse("kind = disk\nradius = 1\ntaus = -1, 0.5\n").is_err());
        assert!(parse("kind = disk\nradius = 1\ntol_scale = -1\n").is_err());
        assert!(parse("kind = smooth\nboundary = circle 0\n").is_err());
    }

    #[test]
    fn display_includes_location() {
        let err = parse("kind = disk\nradius = x\n").unwrap_err();
        assert!(err.to_string().starts_with("line 2, field `radius`"));
    }
}
