use super::spec::{build_from_spec, CircleSpec, PieceSpec, SurfaceSpec};
use super::{CircleId, LabeledSurfaceMesh};
use crate::error::MeshError;
use crate::Scalar;

pub const PRESETS: [&str; 4] = [
    "sphere-equator",
    "sphere-two-circles",
    "torus-two-meridians",
    "genus2-separating",
];

fn piece(genus: u32, circles: &[u32]) -> PieceSpec {
    PieceSpec {
        genus,
        boundary: circles.iter().map(|&c| CircleId(c)).collect(),
    }
}

impl SurfaceSpec {
    /// Spec of a named preset with 32-vertex circles and 8 collar rings.
    pub fn preset(name: &str, level: u32) -> Result<Self, MeshError> {
        let (minus, plus, ids): (Vec<PieceSpec>, Vec<PieceSpec>, &[u32]) = match name {
            "sphere-equator" => (vec![piece(0, &[1])], vec![piece(0, &[1])], &[1]),
            "sphere-two-circles" => (
                vec![piece(0, &[1, 2])],
                vec![piece(0, &[1]), piece(0, &[2])],
                &[1, 2],
            ),
            "torus-two-meridians" => (vec![piece(0, &[1, 2])], vec![piece(0, &[1, 2])], &[1, 2]),
            "genus2-separating" => (vec![piece(1, &[1])], vec![piece(1, &[1])], &[1]),
            other => return Err(MeshError::UnknownPreset(other.to_string())),
        };
        Ok(SurfaceSpec {
            minus,
            plus,
            circles: ids
                .iter()
                .map(|&i| CircleSpec {
                    id: CircleId(i),
                    vertices: 32,
                })
                .collect(),
            collar_rings: 8,
            level,
        })
    }
}

pub fn generate_preset<T: Scalar>(name: &str, level: u32) -> Result<LabeledSurfaceMesh<T>, MeshError> {
    build_from_spec(&SurfaceSpec::preset(name, level)?)
}
