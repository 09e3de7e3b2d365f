//! Read-once oblivious branching programs.

pub mod families;
pub mod format;
pub mod layer;
pub mod program;
pub mod restrict;

pub use families::{make_family, FamilySpec};
pub use format::{parse_bp, serialize_bp};
pub use layer::{classify_layer, Layer, LayerClass};
pub use program::{permute_bits, BranchingProgram};
pub use restrict::{expand_free, prune_unreachable, restrict_fixed};
