//! Files of a run directory.

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use nodaldiv::construct::{CircleSlope, Parameters};
use nodaldiv::dec::{read_field, write_face_field, write_vertex_field, Cochain};
use nodaldiv::mesh::{load_mesh, save_mesh, CircleId, Side};
use nodaldiv::{textconf, Construction, Mesh, MeshError};

use crate::error::CliError;

pub const MESH: &str = "mesh.off";
pub const PARAMS: &str = "params.txt";
pub const REPORT: &str = "report.txt";
pub const SWEEP_CSV: &str = "sweep.csv";
pub const RESIDUAL: &str = "residual.txt";

const VERTEX_FIELDS: [&str; 3] = ["F.txt", "u.txt", "lapF.txt"];
const FACE_FIELDS: [&str; 2] = ["omega.txt", "Omega.txt"];

pub fn create(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))
}

pub fn write_text(path: PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(&path, text).map_err(|e| CliError::Io(path, e))
}

fn writer(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(path.to_path_buf(), e))
}

pub fn write_mesh(dir: &Path, mesh: &Mesh) -> Result<PathBuf, CliError> {
    let path = dir.join(MESH);
    save_mesh(mesh, &path)?;
    Ok(path)
}

pub fn write_vertex(path: PathBuf, values: &[f64]) -> Result<(), CliError> {
    write_vertex_field(values, writer(&path)?).map_err(|e| CliError::Io(path, e))
}

fn write_face(path: PathBuf, values: &[f64]) -> Result<(), CliError> {
    write_face_field(values, writer(&path)?).map_err(|e| CliError::Io(path, e))
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Minus => "minus",
        Side::Plus => "plus",
    }
}

pub fn params_text(p: &Parameters<f64>, level: u32) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "level = {level}");
    let _ = writeln!(s, "C = {:.16e}", p.c);
    let _ = writeln!(s, "epsilon = {:.16e}", p.epsilon);
    let _ = writeln!(s, "sigma = {:.16e}", p.sigma);
    let _ = writeln!(s, "rho0 = {:.16e}", p.rho0);
    let _ = writeln!(s, "margin = {:.16e}", p.margin);
    for r in &p.rejected_rho0 {
        let _ = writeln!(s, "rejected_rho0 = {r:.16e}");
    }
    for a in &p.slopes {
        let _ = writeln!(s, "A.{}.{} = {:.16e}", a.circle, side_name(a.side), a.a);
    }
    s
}

fn parse_params(text: &str) -> Result<(Parameters<f64>, u32), String> {
    let sections = textconf::parse(text).map_err(|e| e.to_string())?;
    let mut p = Parameters {
        slopes: Vec::new(),
        c: f64::NAN,
        epsilon: f64::NAN,
        sigma: f64::NAN,
        rho0: f64::NAN,
        margin: f64::NAN,
        rejected_rho0: Vec::new(),
    };
    let mut level = 0;
    for sec in &sections {
        if !sec.name.is_empty() {
            return Err(format!("line {}: unexpected section", sec.line));
        }
        for e in &sec.entries {
            let bad = || format!("line {}: bad value for {}", e.line, e.key);
            let num = || e.value.parse::<f64>().map_err(|_| bad());
            match e.key.as_str() {
                "level" => level = e.value.parse().map_err(|_| bad())?,
                "C" => p.c = num()?,
                "epsilon" => p.epsilon = num()?,
                "sigma" => p.sigma = num()?,
                "rho0" => p.rho0 = num()?,
                "margin" => p.margin = num()?,
                "rejected_rho0" => p.rejected_rho0.push(num()?),
                k => {
                    let rest = k.strip_prefix("A.").ok_or_else(|| format!("line {}: unknown key {k}", e.line))?;
                    let (c, side) = rest.split_once('.').ok_or_else(bad)?;
                    let circle = c.strip_prefix('c').and_then(|n| n.parse().ok()).ok_or_else(bad)?;
                    let side = match side {
                        "minus" => Side::Minus,
                        "plus" => Side::Plus,
                        _ => return Err(bad()),
                    };
                    p.slopes.push(CircleSlope { circle: CircleId(circle), side, a: num()? });
                }
            }
        }
    }
    if [p.c, p.epsilon, p.sigma, p.rho0, p.margin].iter().any(|x| x.is_nan()) {
        return Err("missing one of C, epsilon, sigma, rho0, margin".into());
    }
    Ok((p, level))
}

/// Writes the mesh, the five fields and the parameters.
pub fn save_construction(dir: &Path, mesh: &Mesh, r: &Construction, level: u32) -> Result<(), CliError> {
    write_mesh(dir, mesh)?;
    let vertex = [r.f.values(), r.u.values(), r.lap_f.values()];
    for (name, values) in VERTEX_FIELDS.iter().zip(vertex) {
        write_vertex(dir.join(name), values)?;
    }
    let face = [r.omega_ref.values(), r.omega.values()];
    for (name, values) in FACE_FIELDS.iter().zip(face) {
        write_face(dir.join(name), values)?;
    }
    write_text(dir.join(PARAMS), &params_text(&r.params, level))
}

fn load_field(dir: &Path, name: &str, faces: bool) -> Result<Vec<f64>, CliError> {
    let path = dir.join(name);
    let file = File::open(&path).map_err(|e| CliError::Io(path.clone(), e))?;
    let field = read_field::<f64, _>(file).map_err(|e| match e {
        MeshError::Parse { line, msg } => {
            CliError::Config(format!("{}: line {line}: {msg}", path.display()))
        }
        other => other.into(),
    })?;
    if field.faces != faces {
        let want = if faces { "face" } else { "vertex" };
        return Err(CliError::Config(format!("{}: expected a {want} field", path.display())));
    }
    Ok(field.values)
}

/// Loads a run directory written by [`save_construction`]. Per-face term
/// splits are not stored and come back empty.
pub fn load_construction(dir: &Path) -> Result<(Mesh, Construction, u32), CliError> {
    let mesh: Mesh = load_mesh(dir.join(MESH))?;
    let path = dir.join(PARAMS);
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io(path.clone(), e))?;
    let (params, level) = parse_params(&text).map_err(|m| CliError::Config(format!("{}: {m}", path.display())))?;
    let [f, u, lap] = VERTEX_FIELDS.map(|n| load_field(dir, n, false));
    let [omega_ref, omega] = FACE_FIELDS.map(|n| load_field(dir, n, true));
    let result = Construction {
        f: Cochain::primal(0, f?)?,
        u: Cochain::primal(0, u?)?,
        lap_f: Cochain::dual(2, lap?)?,
        omega_ref: Cochain::primal(2, omega_ref?)?,
        omega: Cochain::primal(2, omega?)?,
        grad_term: Vec::new(),
        cot_term: Vec::new(),
        params,
        profiles: Vec::new(),
    };
    Ok((mesh, result, level))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nodaldiv::construct::{construct, ConstructionParams};
    use nodaldiv::mesh::generate_preset;

    #[test]
    fn construction_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let mesh: Mesh = generate_preset("sphere-equator", 0).unwrap();
        let r = construct(&mesh, &ConstructionParams::default()).unwrap();
        save_construction(dir.path(), &mesh, &r, 0).unwrap();
        let (m2, r2, level) = load_construction(dir.path()).unwrap();
        assert_eq!(level, 0);
        assert_eq!(m2.labels(), mesh.labels());
        assert_eq!(r2.f, r.f);
        assert_eq!(r2.u, r.u);
        assert_eq!(r2.omega, r.omega);
        assert_eq!(r2.lap_f, r.lap_f);
        assert_eq!(r2.params, r.params);
    }

    #[test]
    fn params_need_every_scalar() {
        assert!(parse_params("C = 1\n").is_err());
        assert!(parse_params("A.x.minus = 1\n").is_err());
    }
}
