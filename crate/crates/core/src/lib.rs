//! Simulation and verification of two-state quantum cloning machines.
//!
//! * [`linalg`]: state vectors, small unitaries, gate application and
//!   projective measurement.
//! * [`bounds`]: closed-form fidelity and success-probability limits, and a
//!   direct-search oracle for the fidelity optimum.
//! * [`gates`]: distinguishability transfer, state separation and
//!   single-qubit transform gates, with CNOT-level decompositions.
//! * [`networks`]: exact, approximate and hybrid cloning networks and their
//!   exact simulation.
//! * [`verify`]: grid checks of all of the above, used by `cloneforge verify`.

pub mod bounds;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod networks;
pub mod verify;

pub use bounds::CloningProblem;
pub use error::{Error, Result};
pub use linalg::{Outcome, StateVector, Unitary};
pub use networks::{CloneReport, CloningMode};
