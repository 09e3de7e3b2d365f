//! Structural procedures on width-3 programs.

pub mod bottleneck;
pub mod chunks;
pub mod interwoven;
pub mod charge;
pub mod collision;
pub mod ensemble;
pub mod first_order;
pub mod growth;
pub mod sumproduct;
pub mod tribes;

pub use bottleneck::{bottleneck_frequency, bottleneck_scan, BottleneckFrequency, BottleneckReport};
pub use chunks::{chunk_decompose, interwoven_groups, nonregular_layers, ChunkDecomposition, ChunkRule, InterwovenGroups};
pub use interwoven::{interwoven_mass_check, InterwovenReport};
pub use charge::{charge_partition, ChargeProfile};
pub use sumproduct::{sum_product_decompose, Factor, SumProductForm, Term, DEFAULT_MIN_LAMBDA};
pub use collision::{acceptance_probabilities, collision_flip};
pub use ensemble::{filter_lambda, generate_batch, instance_rng, lemma_p, EnsembleKind, EnsembleSpec};
pub use first_order::{first_order_mass, nonregular_weight, xi_bounds, FirstOrderReport, WeightReport};
pub use growth::{growth_report, GrowthReport, GrowthRow, PROVEN_C};
pub use tribes::{tribes_damped, tribes_lower, tribes_oracle, tribes_spectrum};
