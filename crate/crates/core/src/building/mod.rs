//! Lattice model of the building of `SL_n` (`n = 2, 3`) over
//! `k' = Q_p(sqrt p)` and over `k = Q_p`.

pub mod descent;
pub mod flow;
pub mod graph;
pub mod lattice;
pub mod quad;

pub use descent::{base_building_image, barb_search, barb_search_cached, barb_search_from, in_base_image, BarbReport, BaseImage};
pub use flow::{boundary_flow, barb_lattice, FlowReport, BARB_FLOW_LAMBDA};
pub use graph::{bfs_layers, bfs_layers_cached, LayerStore, NoStore, graph_distance, neighbors, standard_chamber};
pub use lattice::{adjacent, divisor_distance, elementary_divisors, Lattice, LatticeClass, Ring, VertexClass};
pub use quad::QuadElt;
