//! Seeded small-bias and limited-independence samplers.

pub mod chernoff;
pub mod gf;
pub mod kwise;
pub mod seed;
pub mod smallbias;

pub use chernoff::{chernoff_bound, chernoff_check, BitSampler, ChernoffReport, ConstantBits, UniformBits};
pub use gf::{gf_mul, gf_pow, Field};
pub use kwise::{almost_kwise_sample, verify_kwise, AlmostKWiseSpec, InnerSource, KwiseReport};
pub use seed::SeedSource;
pub use smallbias::{exact_bias, smallbias_sample, SmallBiasSpec};
