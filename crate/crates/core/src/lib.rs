//! Mutually unbiased product-basis pairs in dimension six.
//!
//! * [`linalg`]: small dense complex matrices, tolerances, the matrix text format.
//! * [`bases`]: Heisenberg–Weyl eigenbases, product bases, MU predicates.
//! * [`families`]: the four families P0–P3 of MU product pairs.
//! * [`equivalence`]: elementary moves, replayable scripts, reductions to the
//!   Fourier family and to Tao's matrix, Haagerup fingerprints.
//! * [`search`]: numerical search for vectors unbiased to a pair and for
//!   extension bases.
//! * [`io`]: JSON formats shared by the CLI.

pub mod bases;
pub mod cli;
pub mod equivalence;
pub mod error;
pub mod families;
pub mod io;
pub mod linalg;
pub mod search;

pub use bases::{Basis, MuPair, MuReport, PhaseWitness, ProductLabel};
pub use error::{Error, Result};
pub use families::{FamilyId, FamilyParams};
pub use linalg::{CMatrix, Complex64, StateVector, Tolerance};
