//! Fourier analysis and a pseudorandom generator for width-3 read-once
//! oblivious branching programs.

pub mod analysis;
pub mod bits;
pub mod bp;
pub mod error;
pub mod fourier;
pub mod matrix;
pub mod prg;
pub mod samplers;

pub use bits::{select, BitSubset};
pub use bp::{BranchingProgram, Layer, LayerClass};
pub use error::{Error, Result};
pub use matrix::Mat;
