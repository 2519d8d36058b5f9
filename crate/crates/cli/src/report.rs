//! Report rows and their two renderings: tab-separated machine rows and a
//! plain-text summary built from the same rows.

use std::fmt::{self, Write as _};

use bergkern::Complex64;

/// Where a reference value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// A statement of the underlying theory (inequality, rigidity, counts).
    Theorem,
    ClosedForm,
    SelfConsistency,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Theorem => "theorem",
            Provenance::ClosedForm => "closed-form",
            Provenance::SelfConsistency => "self-consistency",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub check: String,
    pub inputs: String,
    pub value: String,
    pub reference: String,
    pub provenance: Provenance,
    pub tol: String,
    pub pass: bool,
}

pub const HEADER: &str = "check\tinputs\tvalue\treference\tprovenance\ttol\tstatus";

pub fn num(x: f64) -> String {
    format!("{x:.10e}")
}

pub fn cnum(z: Complex64) -> String {
    let im = if z.im.is_sign_negative() {
        format!("-{:.6}", -z.im)
    } else {
        format!("+{:.6}", z.im)
    };
    format!("{:.6}{im}i", z.re)
}

fn clean(field: &str) -> String {
    field.replace(['\t', '\n'], " ")
}

impl Row {
    pub fn tsv(&self) -> String {
        [
            clean(&self.check),
            clean(&self.inputs),
            clean(&self.value),
            clean(&self.reference),
            self.provenance.to_string(),
            clean(&self.tol),
            if self.pass { "pass" } else { "fail" }.to_string(),
        ]
        .join("\t")
    }
}

#[derive(Debug, Default)]
pub struct Report {
    pub rows: Vec<Row>,
}

impl Report {
    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    pub fn tsv(&self) -> String {
        let mut out = String::from(HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.tsv());
            out.push('\n');
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{} {} [{}] value {} reference {} ({}, tol {})",
                if row.pass { "PASS" } else { "FAIL" },
                row.check,
                row.inputs,
                row.value,
                row.reference,
                row.provenance,
                row.tol
            );
        }
        let _ = writeln!(out, "{} checks, {} failed", self.rows.len(), self.failures());
        out
    }
}
