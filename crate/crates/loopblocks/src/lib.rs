//! Block structure of loop-symmetric states in finite-group lattice gauge theory.

pub mod blocks;
pub mod caps;
pub mod double;
pub mod error;
pub mod gauge;
pub mod group;
pub mod lattice;
pub mod rep;
pub mod tolerance;
pub mod topology;
pub mod verify;

pub use caps::Caps;
pub use error::{LoopError, Result};
pub use group::FiniteGroup;
pub use rep::CharacterTable;
