//! Two-level atom in a lossy cavity driven by broadband squeezed vacuum.
//!
//! The crate assembles the Lindblad generator of the atom–cavity system,
//! solves for its steady state or integrates it in time, and extracts the
//! field and atom observables used to detect the atom: photon statistics,
//! the pair amplitude ⟨aa⟩, the excited-state population and the Wigner
//! function of the cavity field.
//!
//! All rates are in units of the cavity damping κ and ħ = 1.

pub mod error;
pub mod lindblad;
pub mod observables;
pub mod ops;
pub mod solvers;
pub mod sweep;

pub use error::{Error, Result};
pub use lindblad::{SqueezedBath, Superoperator, SystemParams};
pub use ops::{Level, Operator, Space, SpaceDims, C64};
pub use solvers::{DensityMatrix, TailReport, TruncationPolicy};
