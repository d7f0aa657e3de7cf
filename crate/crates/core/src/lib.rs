//! Finite-dimensional pure-state toolkit for checking whether hypothetical
//! quantum machines (wishful cloners, strong cloners, deleters) respect
//! no-signalling and entanglement conservation.
//!
//! Everything is generic over the real scalar (`f64` or `f32`); the aliases
//! below fix it to `f64` or `f32`.

pub mod conservation;
pub mod error;
pub mod machines;
pub mod nosignal;
pub mod sampling;
pub mod scalar;
pub mod states;
pub mod tensor;

pub use error::{Error, Result};
pub use machines::{
    apply_branchwise, apply_linear, apply_termwise, check_consistency, check_consistency_with,
    extend_to_isometry, ConsistencyReport, Layout, LinearMachine, MachineMode, MachineSpec,
};
pub use scalar::{Real, Tolerances};
pub use states::{qubit_basis, singlet, BasisPair, StateFamily};
pub use tensor::{DensityMatrix, Ket, Matrix, Spectrum, Subsystem, SubsystemSignature};

pub use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type C32 = Complex<f32>;
pub type Ket64 = Ket<f64>;
pub type Ket32 = Ket<f32>;
pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type DensityMatrix32 = DensityMatrix<f32>;
pub type MachineSpec64 = MachineSpec<f64>;
pub type MachineSpec32 = MachineSpec<f32>;
pub type StateFamily64 = StateFamily<f64>;
pub type StateFamily32 = StateFamily<f32>;
pub type BasisPair64 = BasisPair<f64>;
pub type BasisPair32 = BasisPair<f32>;
