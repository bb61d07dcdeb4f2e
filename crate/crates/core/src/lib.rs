//! Exact construction of cofibrantly generated natural weak factorisation
//! systems over finite base categories by the algebraic small object argument.

pub mod algebra;
pub mod arrows;
pub mod corpus;
pub mod error;
pub mod fincat;
pub mod freeseq;
pub mod monoidal_laws;
pub mod onestep;
pub mod oracles;
pub mod presets;

pub use error::{Error, Result};
