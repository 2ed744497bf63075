//! Discrete exterior calculus on triangle meshes.
//!
//! Sign conventions, fixed once:
//!
//! * `j` is the +90° rotation for the mesh orientation, so on a collar with
//!   `ds∧dt > 0` we have `ds∘j = -dt` and `dt∘j = ds`.
//! * The dual edge `e*` is `e` rotated by +90°. A dual 1-cochain stores the
//!   value on `e*`.
//! * `du∘j = -⋆du`, realized by [`rotate_j`] as `-w_e·(du)_e` with the
//!   cotangent weight `w_e`.
//! * The dual derivative on dual 1-cochains is `-d0ᵀ`, hence
//!   `d(rotate_j(du))_v = (K u)_v` with `K = d0ᵀ W d0`, and the continuum
//!   identity `d(du∘j) = uΩ` becomes `K u = M_Ω u`.

mod cochain;
mod field;
mod ops;
mod spectrum;

pub use cochain::{d, incidence_product, Cochain, Kind};
pub use field::{read_field, write_face_field, write_vertex_field, FieldFile};
pub use ops::{
    assemble_pencil, eigen_residual, face_dirichlet_energy, grad_norm_sq, rotate_j,
    weighted_residuals, OperatorBundle,
};
pub use spectrum::smallest_nonzero_eigenvalue;
