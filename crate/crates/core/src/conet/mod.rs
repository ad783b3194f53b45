//! Co-commenting user network and leaning homophily.

mod analysis;
mod graph;

pub use analysis::{
    export_top_edges, joint_density, leaning_assortativity, neighbor_mean_leaning, shuffled_assortativity,
    AssortativityResult, Edge, JointDensity, NeighborLeanings,
};
pub use graph::{build_cocomment_graph, build_cocomment_graph_capped, CoCommentGraph, GraphMode};
