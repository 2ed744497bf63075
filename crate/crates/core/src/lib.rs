//! Nodal sets that realize prescribed dividing curves.
//!
//! Given a closed surface split as `S- ∪ [-1,1]×Γ ∪ S+`, this crate builds a
//! triangulated model, constructs `F` with `F = C·s` near `Γ`, sets
//! `u = sin F` and an area form `Ω` such that `d(du∘j) = uΩ` holds
//! discretely, and checks the resulting properties.
//!
//! Pipeline: [`mesh`] → [`dec`] → [`construct`] → [`verify`].

pub mod construct;
pub mod dec;
pub mod error;
pub mod mesh;
pub mod scalar;
pub mod sparse;
pub mod textconf;
pub mod verify;

pub use error::{ConstructError, DecError, MeshError};
pub use scalar::Scalar;

/// Double precision aliases used by the command line tool.
pub type Mesh = mesh::LabeledSurfaceMesh<f64>;
pub type Tri = mesh::TriMesh<f64>;
pub type Field = dec::Cochain<f64>;
pub type Operators = dec::OperatorBundle<f64>;
pub type Profile = construct::ConvexProfile<f64>;
pub type Construction = construct::ConstructionResult<f64>;
pub type Report = verify::VerificationReport;
