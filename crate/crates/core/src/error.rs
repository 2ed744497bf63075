use thiserror::Error;

use crate::mesh::CircleId;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("not a closed manifold: edge ({0}, {1}) has {2} incident faces")]
    NotClosed(usize, usize, usize),
    #[error("inconsistent orientation across edge ({0}, {1})")]
    Orientation(usize, usize),
    #[error("non-manifold vertex {0}")]
    NonManifoldVertex(usize),
    #[error("mesh is not connected")]
    Disconnected,
    #[error("face {face} violates the strict triangle inequality")]
    TriangleInequality { face: usize },
    #[error("missing or nonpositive length for edge ({0}, {1})")]
    EdgeLength(usize, usize),
    #[error("face {face} references vertex {vertex} out of range")]
    VertexIndex { face: usize, vertex: usize },
    #[error("collar coordinate not monotone along collar of circle {circle}: {detail}")]
    CollarNotMonotone { circle: CircleId, detail: String },
    #[error("collar of circle {circle} is not a cylinder: {detail}")]
    CollarNotCylinder { circle: CircleId, detail: String },
    #[error("collar of circle {circle} is not flat at face {face}")]
    CollarNotFlat { circle: CircleId, face: usize },
    #[error("labels: {0}")]
    Labels(String),
    #[error("euler characteristic {total} differs from the sum over regions {sum}")]
    EulerMismatch { total: i64, sum: i64 },
    #[error("invalid surface spec: {0}")]
    Spec(String),
    #[error("circle {circle}: {detail}")]
    CirclePairing { circle: CircleId, detail: String },
    #[error("vertex count mismatch at circle {circle}: {detail}")]
    VertexCountMismatch { circle: CircleId, detail: String },
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("level {level} exceeds the memory budget ({vertices} vertices estimated)")]
    LevelTooLarge { level: u32, vertices: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, PartialEq)]
pub enum DecError {
    #[error("exterior derivative of a degree {0} cochain is not defined on a surface")]
    DegreeTooHigh(usize),
    #[error("cochain of degree {degree} ({kind}) has {got} values, mesh needs {want}")]
    Length {
        degree: usize,
        kind: &'static str,
        got: usize,
        want: usize,
    },
    #[error("expected a {want} cochain")]
    Kind { want: &'static str },
    #[error("face {0} is degenerate (zero area)")]
    DegenerateFace(usize),
    #[error("area form is not positive on face {face} (value {value:e})")]
    NonPositiveArea { face: usize, value: f64 },
    #[error("zero vector")]
    ZeroVector,
    #[error(transparent)]
    Solver(#[from] crate::sparse::NotConverged),
}

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Dec(#[from] DecError),
    #[error("piece has no boundary vertices")]
    NoBoundary,
    #[error("interior vertex {0} is not connected to the boundary; system is singular")]
    Singular(usize),
    #[error("discrete maximum principle fails at vertex {vertex} (f = {value:e})")]
    MaximumPrinciple { vertex: usize, value: f64 },
    #[error("circle {0} is not on the boundary of this piece")]
    NotOnBoundary(CircleId),
    #[error("profile slope A = {0} outside (0, 1/2)")]
    SlopeOutOfRange(f64),
    #[error("no blend center satisfies the normalization for A = {a} (width shrunk to {width})")]
    ProfileInfeasible { a: f64, width: f64 },
    #[error("slope matching failed after {retries} halvings of rho0 (last rho0 = {rho0}, A = {a})")]
    RetriesExhausted { retries: usize, rho0: f64, a: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("Omega is not positive on face {face}: grad term {grad:e}, cot term {cot:e}")]
    NonPositiveOmega { face: usize, grad: f64, cot: f64 },
    #[error("seam smoothing broke the sign pattern at vertex {0}")]
    SmoothingBrokeSigns(usize),
}
