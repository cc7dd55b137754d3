pub mod complex;
pub mod context;
pub mod error;
pub mod json;
pub mod padic;
mod residue;
pub mod verify;
pub mod witt;

pub use complex::{diff, lambda, module_action, teich_relation_check, E1Element, EElement};
pub use context::RingContext;
pub use error::{Error, Result};
pub use json::Json;
pub use padic::PadicElement;
pub use witt::{teich_coefficients, GhostVector, K0Decomposition, VDecomposition, WittVector};
