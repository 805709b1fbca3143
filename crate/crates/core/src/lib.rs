//! GBDT Darboux transformations for first-order spectral systems.
//!
//! The crate implements the generalized Bäcklund-Darboux transformation
//! (GBDT) for Hamiltonian, Shin-Zettl and Sturm-Liouville systems with a
//! linear spectral parameter, together with the induced Möbius
//! transformation of Weyl-Titchmarsh functions, explicit solutions of
//! dynamical symplectic systems and two-way diffusion equations, and the
//! closed-form machinery of the indefinite sign-weight model case.
//!
//! Module map:
//!
//! * [`matcore`] — dense complex linear algebra kernel;
//! * [`systems`] — coefficient fields and the four system dialects;
//! * [`gbdt`] — parameter triples, propagation, Darboux matrices and
//!   transformed coefficients;
//! * [`weyl`] — fundamental solutions, Weyl disks and Möbius maps;
//! * [`dynamics`] — explicit dynamical solutions, energies, two-way
//!   diffusion;
//! * [`model_indef`] — the indefinite sign-weight model case in closed form.
//!
//! All public values are plain immutable data; every operation is a pure
//! function of its inputs, so values can be freely shared across threads.

pub mod dynamics;
pub mod error;
pub mod gbdt;
pub mod matcore;
pub mod model_indef;
pub mod systems;
pub mod weyl;

pub use error::{Error, Result};
pub use matcore::ComplexMatrix;
