//! The construction: Poisson solves on the pieces, convex profiles on the
//! collars, global scaling of `F`, then `u = sin F` and `Ω`.

mod assemble;
mod poisson;
mod profile;

pub use assemble::{
    assemble_f, compute_u_omega, construct, lap_density, CircleSlope, ConstructionParams,
    ConstructionResult, Parameters, PartialConstruction,
};
pub use poisson::{derive_slope, normal_derivative, solve_subharmonic, Piece, SOLVER_TOLERANCE};
pub use profile::{
    gauss_legendre, normalization_integral, ConvexProfile, ProfileCertificate, DEFAULT_WIDTH,
    SAMPLES,
};
