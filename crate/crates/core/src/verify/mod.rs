//! Discrete checks of every property the construction claims, plus
//! refinement sweeps.
//!
//! | check | predicate |
//! |---|---|
//! | `nodal_set` | `u = 0` on Γ, `u < 0` on the minus side, `u > 0` on the plus side, sign changes only across Γ |
//! | `positivity` | `min Ω/ω > 0` |
//! | `contact_condition` | `u² + |du|² > 0`, and `≥ C²cos²(Cε)` near Γ |
//! | `eigen_identity` | `‖Ku − M_Ω u‖ / ‖M_Ω u‖ ≤ tol(level)` |
//! | `lemma_i` | `max |F| < π/2` |
//! | `lemma_ii` | sign pattern of `F`, `|dF| > 0` on collars |
//! | `lemma_iii`, `lemma_iv` | `F` weakly sub/superharmonic per side, strictly off the collars |
//! | `lemma_v` | `F = Cs`, `ΔF = 0` on `|s| < ε`, collars flat |
//! | `adaptedness` | `⋆α = dα` on sampled faces up to the face's own 2-D defect |

mod checks;
pub mod faults;
mod report;
mod sweep;

pub use checks::*;
pub use report::{CheckRecord, SweepRow, VerificationReport};
pub use sweep::*;
