//! Verification reports: fixed `key = value` text plus a CSV of sweep rows.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub tol: f64,
    /// Offending vertex or face, when there is one.
    pub worst: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub level: u32,
    pub h: f64,
    pub eigen_residual: f64,
    pub interior_residual: f64,
    pub min_omega: f64,
    pub min_contact: f64,
    pub seam_worst: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    /// Run metadata and construction parameters, in insertion order.
    pub meta: Vec<(String, String)>,
    pub checks: Vec<CheckRecord>,
    pub eigen_residual: f64,
    /// Residual restricted to vertices outside the seam strip.
    pub interior_residual: f64,
    /// Residual restricted to the seam strip.
    pub seam_residual: f64,
    /// Largest residual density `|r_v| / M_v` in the seam strip.
    pub seam_worst: f64,
    /// Relative residual on collar vertices whose whole stencil has
    /// `|s| ≤ ε`.
    pub linear_residual: f64,
    /// Minimum of the density `Ω/ω`.
    pub min_omega: f64,
    pub min_contact: f64,
    pub sweep: Vec<SweepRow>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }

    pub fn push_meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(s, "{k} = {v}");
        }
        for c in &self.checks {
            let _ = writeln!(s, "check.{}.pass = {}", c.name, c.pass);
            let _ = writeln!(s, "check.{}.value = {:.16e}", c.name, c.value);
            let _ = writeln!(s, "check.{}.tol = {:.16e}", c.name, c.tol);
            if let Some(w) = c.worst {
                let _ = writeln!(s, "check.{}.worst = {w}", c.name);
            }
            if !c.detail.is_empty() {
                let _ = writeln!(s, "check.{}.detail = {}", c.name, c.detail);
            }
        }
        let summary = [
            ("eigen_residual", self.eigen_residual),
            ("interior_residual", self.interior_residual),
            ("seam_residual", self.seam_residual),
            ("seam_worst", self.seam_worst),
            ("linear_residual", self.linear_residual),
            ("min_Omega", self.min_omega),
            ("min_contact", self.min_contact),
        ];
        for (k, v) in summary {
            let _ = writeln!(s, "summary.{k} = {v:.16e}");
        }
        for (i, r) in self.sweep.iter().enumerate() {
            let _ = writeln!(
                s,
                "sweep.row.{i} = {} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
                r.level, r.h, r.eigen_residual, r.min_omega, r.min_contact, r.seam_worst
            );
        }
        let _ = writeln!(s, "all_pass = {}", self.all_pass());
        s
    }

    pub fn sweep_csv(&self) -> String {
        let mut s = String::from("level,h,eigen_residual,interior_residual,min_Omega,min_contact,seam_worst\n");
        for r in &self.sweep {
            let _ = writeln!(
                s,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.level, r.h, r.eigen_residual, r.interior_residual, r.min_omega, r.min_contact, r.seam_worst
            );
        }
        s
    }

    /// Reads back the text form. Only check records, summary values and
    /// metadata are recovered; sweep rows are kept as metadata lines.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut r = VerificationReport::default();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let (k, v) = t
                .split_once(" = ")
                .ok_or_else(|| format!("line {line_no}: expected 'key = value'"))?;
            let num = || v.parse::<f64>().map_err(|_| format!("line {line_no}: bad number '{v}'"));
            if let Some(rest) = k.strip_prefix("check.") {
                let (name, field) = rest
                    .rsplit_once('.')
                    .ok_or_else(|| format!("line {line_no}: bad check key '{k}'"))?;
                if r.checks.last().is_none_or(|c| c.name != name) {
                    r.checks.push(CheckRecord {
                        name: name.to_string(),
                        pass: false,
                        value: f64::NAN,
                        tol: f64::NAN,
                        worst: None,
                        detail: String::new(),
                    });
                }
                let c = r.checks.last_mut().expect("pushed");
                match field {
                    "pass" => c.pass = v == "true",
                    "value" => c.value = num()?,
                    "tol" => c.tol = num()?,
                    "worst" => c.worst = v.parse().ok(),
                    "detail" => c.detail = v.to_string(),
                    _ => return Err(format!("line {line_no}: unknown check field '{field}'")),
                }
            } else if let Some(name) = k.strip_prefix("summary.") {
                let x = num()?;
                match name {
                    "eigen_residual" => r.eigen_residual = x,
                    "interior_residual" => r.interior_residual = x,
                    "seam_residual" => r.seam_residual = x,
                    "seam_worst" => r.seam_worst = x,
                    "linear_residual" => r.linear_residual = x,
                    "min_Omega" => r.min_omega = x,
                    "min_contact" => r.min_contact = x,
                    _ => return Err(format!("line {line_no}: unknown summary key '{name}'")),
                }
            } else if k == "all_pass" {
                continue;
            } else {
                r.meta.push((k.to_string(), v.to_string()));
            }
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip_keeps_checks() {
        let mut r = VerificationReport::default();
        r.push_meta("run.level", 1);
        r.checks.push(CheckRecord {
            name: "positivity".into(),
            pass: true,
            value: 0.25,
            tol: 0.0,
            worst: Some(3),
            detail: "min density".into(),
        });
        r.eigen_residual = 0.03;
        let back = VerificationReport::parse(&r.to_text()).unwrap();
        assert_eq!(back.checks, r.checks);
        assert_eq!(back.eigen_residual, 0.03);
        assert_eq!(back.meta[0], ("run.level".to_string(), "1".to_string()));
    }

    #[test]
    fn csv_has_one_line_per_row() {
        let mut r = VerificationReport::default();
        for level in 0..3 {
            r.sweep.push(SweepRow {
                level,
                h: 1.0,
                eigen_residual: 0.1,
                interior_residual: 0.1,
                min_omega: 1.0,
                min_contact: 1.0,
                seam_worst: 0.0,
            });
        }
        assert_eq!(r.sweep_csv().lines().count(), 4);
    }
}
