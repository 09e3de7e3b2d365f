//! The recursive pseudorandom generator and its test harness.

pub mod fool;
pub mod generate;
pub mod params;

pub use fool::{fool_test, FoolMode, FoolReport};
pub use generate::{generate, Branch, LevelRecord, Prg, PrgTrace};
pub use params::{derive_params, derive_scaled, seed_length, LevelPlan, Mode, Overrides, PrgParams};
