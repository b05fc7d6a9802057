//! Numerical laboratory for ε-dependent bosonic quantization on truncated Fock spaces.
//!
//! The Fock space over C^d is truncated at total occupation `n_max`; every
//! identity is asserted on blocks far enough from the cut that truncation
//! cannot reach them.

pub mod bec;
pub mod combinatorics;
pub mod dynamics;
pub mod dyson;
pub mod error;
pub mod fock;
pub mod io;
pub mod ladder;
pub mod operator;
pub mod quantization;
pub mod special;
pub mod stats;
pub mod symbol;
pub mod wick;
pub mod wigner;

pub use num_complex::Complex64;
pub use nalgebra;

pub type C64 = Complex64;

pub use error::{Error, Result};
pub use fock::{coherent_state, hermite_state, make_space, FockSpace, FockVector, SparseState};
pub use dynamics::{hartree_flow, hepp_approximation, propagate, HartreeTrajectory, ModelSpec};
pub use dyson::{dyson_expansion, dyson_matrix_element, dyson_symbol, DysonSymbol};
pub use ladder::{gauge_rotation, ladder_operators, weyl_apply, weyl_operator};
pub use operator::{BlockOperator, DenseOperator, SparseOperator};
pub use quantization::TrigSymbol;
pub use symbol::{GradedSymbol, PolySymbol};
pub use wick::{wick_product, wick_quantize};
pub use wigner::{char_function, compare_limit, CharReport, DensityState, LimitChar, StateFamily};
pub use bec::BecParams;
