use crate::construct::{construct, ConstructionParams};
use crate::error::{ConstructError, MeshError};
use crate::mesh::LabeledSurfaceMesh;
use crate::verify::checks::{verify, VerifyOptions};
use crate::verify::report::{CheckRecord, SweepRow, VerificationReport};
use crate::Scalar;

/// Fraction of the coarsest level's `min Ω` and `min contact` that every
/// finer level must keep.
pub const FLOOR_FRACTION: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    /// Full report of every level, in order.
    pub reports: Vec<VerificationReport>,
}

impl SweepOutcome {
    /// Vacuously true for fewer than two rows.
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].eigen_residual < w[0].eigen_residual)
    }

    /// Every level keeps `min Ω` and `min contact` above
    /// [`FLOOR_FRACTION`] of the first level's values.
    pub fn bounded_below(&self) -> bool {
        let Some(first) = self.rows.first() else { return true };
        self.rows.iter().all(|r| {
            r.min_omega >= FLOOR_FRACTION * first.min_omega && r.min_contact >= FLOOR_FRACTION * first.min_contact
        })
    }

    /// Empirical orders `log(r_k / r_{k+1}) / log(h_k / h_{k+1})` of the
    /// given residual column.
    pub fn orders(&self, pick: impl Fn(&SweepRow) -> f64) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| (pick(&w[0]) / pick(&w[1])).ln() / (w[0].h / w[1].h).ln())
            .collect()
    }

    /// Report of the finest level with the sweep rows and the two sweep
    /// checks appended.
    pub fn into_report(mut self) -> VerificationReport {
        let decreasing = self.strictly_decreasing();
        let bounded = self.bounded_below();
        let worst_row = self.rows.windows(2).position(|w| w[1].eigen_residual >= w[0].eigen_residual);
        let ratio = self
            .rows
            .windows(2)
            .map(|w| w[1].eigen_residual / w[0].eigen_residual)
            .fold(0.0, f64::max);
        let floor_ratio = self.rows.first().map_or(1.0, |f| {
            self.rows
                .iter()
                .map(|r| (r.min_omega / f.min_omega).min(r.min_contact / f.min_contact))
                .fold(f64::INFINITY, f64::min)
        });
        let mut report = self.reports.pop().unwrap_or_default();
        report.checks.push(CheckRecord {
            name: "sweep_decreasing".into(),
            pass: decreasing,
            value: ratio,
            tol: 1.0,
            worst: worst_row.map(|k| k + 1),
            detail: "largest residual ratio between consecutive levels".into(),
        });
        report.checks.push(CheckRecord {
            name: "sweep_floor".into(),
            pass: bounded,
            value: floor_ratio,
            tol: FLOOR_FRACTION,
            worst: None,
            detail: "smallest min_Omega / min_contact ratio to the first level".into(),
        });
        report.sweep = self.rows;
        report
    }
}

/// Mesh spacing of a labeled mesh: the edge length along the rings of its
/// first collar, which halves per level.
pub fn mesh_spacing<T: Scalar>(mesh: &LabeledSurfaceMesh<T>) -> f64 {
    mesh.collars()
        .first()
        .map(|c| c.spacing.to_f64().unwrap_or(f64::NAN))
        .unwrap_or(f64::NAN)
}

/// Runs build → construct → verify for each level. `build` produces the
/// mesh of a level; `options` supplies the verification options (the
/// level is overwritten).
pub fn convergence_sweep<T: Scalar>(
    levels: impl IntoIterator<Item = u32>,
    build: impl Fn(u32) -> Result<LabeledSurfaceMesh<T>, MeshError>,
    params: &ConstructionParams<T>,
    options: VerifyOptions,
) -> Result<SweepOutcome, ConstructError> {
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for level in levels {
        let mesh = build(level)?;
        let result = construct(&mesh, params)?;
        let report = verify(&mesh, &result, VerifyOptions { level, ..options })?;
        rows.push(SweepRow {
            level,
            h: mesh_spacing(&mesh),
            eigen_residual: report.eigen_residual,
            interior_residual: report.interior_residual,
            min_omega: report.min_omega,
            min_contact: report.min_contact,
            seam_worst: report.seam_worst,
        });
        reports.push(report);
    }
    Ok(SweepOutcome { rows, reports })
}
