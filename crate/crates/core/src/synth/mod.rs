//! Synthetic ground truth: random binary vessel trees and noisy oriented samples of them.

mod sampler;
mod tree;

pub use sampler::{sample_centerline, SamplerConfig};
pub use tree::{generate_tree, generate_tree_with, GroundTruthTree, TreeGenConfig};
