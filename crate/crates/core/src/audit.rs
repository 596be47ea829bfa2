//! Comparison of the published parameter tables for `M₁` and `N₁` against the
//! coefficient map assembled from the per-block integrals.

use serde::Serialize;

use crate::perturbation::{coefficient_map, PARAM_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    /// Coefficient of `Im(a⁺) - Im(a⁻)`.
    Im,
    /// Coefficient of `Re(a⁺) + Re(a⁻)`, in units of `π`.
    Re,
}

/// One printed term: parameter index, block `(k, l)`, part and coefficient.
type Printed = (usize, usize, usize, Part, f64);

use Part::{Im, Re};

/// The published tables, transcribed term by term (`Re` entries in units of `π`).
const PRINTED: &[Printed] = &[
    // a
    (0, 0, 0, Im, 1.0),
    (0, 0, 1, Im, -1.0),
    (0, 1, 1, Im, 1.0),
    (0, 0, 2, Im, 1.0),
    (0, 1, 2, Im, -1.0),
    (0, 2, 2, Im, 5.0),
    (0, 0, 3, Im, -1.0),
    (0, 1, 3, Im, 1.0),
    (0, 2, 3, Im, -5.0),
    (0, 3, 3, Im, 5.0),
    // b
    (1, 0, 0, Re, -1.0),
    (1, 1, 1, Re, 1.0),
    (1, 0, 2, Re, 1.0),
    (1, 2, 2, Re, -1.0),
    (1, 0, 3, Re, -2.0),
    (1, 1, 3, Re, -1.0),
    (1, 3, 3, Re, 1.0),
    // c
    (2, 0, 0, Im, -1.0),
    (2, 0, 1, Im, -1.0),
    (2, 1, 1, Im, 1.0),
    (2, 0, 2, Im, -1.0),
    (2, 1, 2, Im, 1.0),
    (2, 2, 2, Im, -5.0),
    (2, 1, 3, Im, 1.0),
    (2, 2, 3, Im, -5.0),
    (2, 3, 3, Im, 5.0),
    // d
    (3, 1, 1, Re, -1.0),
    (3, 1, 2, Re, -1.0),
    (3, 2, 2, Re, 2.0),
    (3, 1, 3, Re, -1.0),
    (3, 2, 3, Re, 2.0),
    (3, 3, 3, Re, -3.0),
    // alpha
    (4, 1, 1, Im, -2.0),
    (4, 1, 3, Im, -2.0),
    (4, 2, 3, Im, 4.0),
    (4, 3, 3, Im, -6.0),
    // beta
    (5, 1, 2, Im, -2.0),
    (5, 2, 2, Im, 4.0),
    // gamma
    (6, 0, 3, Im, -1.0),
    (6, 1, 3, Im, 1.0),
    (6, 2, 3, Im, -1.0),
    (6, 3, 3, Im, 1.0),
    // kappa
    (7, 1, 2, Re, -2.0),
    (7, 2, 2, Re, 4.0),
    // rho
    (8, 0, 3, Re, 4.0),
    (8, 1, 3, Re, 4.0),
    (8, 2, 3, Re, -4.0),
    (8, 3, 3, Re, 4.0),
];

const GAMMA: usize = 6;
const TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct AuditEntry {
    pub param: &'static str,
    pub k: usize,
    pub l: usize,
    pub part: Part,
    pub printed: f64,
    pub derived: f64,
}

impl AuditEntry {
    pub fn matches(&self) -> bool {
        (self.printed - self.derived).abs() <= TOL
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub entries: Vec<AuditEntry>,
    /// `derived / printed`, when it is the same for every `γ` term.
    pub gamma_ratio: Option<f64>,
    /// Entries outside the `γ` column that disagree.
    pub mismatches: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn others_match(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn printed_value(p: usize, k: usize, l: usize, part: Part) -> f64 {
    PRINTED
        .iter()
        .find(|&&(q, kk, ll, pp, _)| q == p && kk == k && ll == l && pp == part)
        .map_or(0.0, |t| t.4)
}

pub fn audit_remarks() -> AuditReport {
    let mut entries = Vec::new();
    for row in coefficient_map() {
        for (part, col, unit) in [(Im, &row.im, 1.0), (Re, &row.re, std::f64::consts::PI)] {
            for (p, &name) in PARAM_NAMES.iter().enumerate() {
                let derived = col[p] / unit;
                let printed = printed_value(p, row.k, row.l, part);
                if derived != 0.0 || printed != 0.0 {
                    entries.push(AuditEntry { param: name, k: row.k, l: row.l, part, printed, derived });
                }
            }
        }
    }
    let gamma: Vec<&AuditEntry> = entries.iter().filter(|e| e.param == PARAM_NAMES[GAMMA]).collect();
    let gamma_ratio = gamma.first().and_then(|first| {
        if first.printed == 0.0 {
            return None;
        }
        let ratio = first.derived / first.printed;
        gamma
            .iter()
            .all(|e| e.printed != 0.0 && (e.derived / e.printed - ratio).abs() <= TOL)
            .then_some(ratio)
    });
    let mismatches = entries.iter().filter(|e| e.param != PARAM_NAMES[GAMMA] && !e.matches()).cloned().collect();
    AuditReport { entries, gamma_ratio, mismatches }
}

/// Human-readable summary lines.
pub fn render(report: &AuditReport) -> Vec<String> {
    let mut out = Vec::new();
    match report.gamma_ratio {
        Some(r) => out.push(format!(
            "gamma column: every printed term is {r} times smaller than the block integrals give (normalization discrepancy {r})"
        )),
        None => out.push("gamma column: no uniform ratio to the block integrals".into()),
    }
    if report.mismatches.is_empty() {
        out.push(format!("all other entries match the block integrals to {TOL:e}"));
    } else {
        for e in &report.mismatches {
            let part = match e.part {
                Im => "Im",
                Re => "pi*Re",
            };
            out.push(format!(
                "mismatch: {} coefficient of {part}(a_{{{},{}}}): printed {}, block integrals {}",
                e.param, e.k, e.l, e.printed, e.derived
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_ratio_is_minus_eight() {
        assert_eq!(audit_remarks().gamma_ratio, Some(-8.0));
    }

    #[test]
    fn only_the_c_row_differs() {
        let rep = audit_remarks();
        assert_eq!(rep.mismatches.len(), 1);
        let e = &rep.mismatches[0];
        assert_eq!((e.param, e.k, e.l, e.part), ("c", 0, 3, Im));
        assert_eq!((e.printed, e.derived), (0.0, -1.0));
    }

    #[test]
    fn every_printed_term_is_compared() {
        let rep = audit_remarks();
        for &(p, k, l, part, v) in PRINTED {
            assert!(rep.entries.iter().any(|e| e.param == PARAM_NAMES[p] && e.k == k && e.l == l && e.part == part && e.printed == v));
        }
    }
}
