//! Tower graphs of chain-recurrent classes of the logistic map
//! `l_mu(x) = mu * x * (1 - x)` on `[0, 1]`.
//!
//! The chain-recurrent set of a unimodal interval map splits into finitely or
//! countably many closed invariant classes (nodes): repelling periodic orbits,
//! repelling Cantor sets, and a single attracting class at the bottom. Ordered
//! by their distance from the critical point the nodes form a chain, and the
//! graph with an edge between every ordered pair is the tower of the map.
//!
//! The crate computes this structure directly from the map:
//!
//! * [`map`]: the base map and renormalized views `l^s` restricted to an
//!   interval around the critical point;
//! * [`periodic`]: periodic orbit scanning and classification, window birth
//!   (saddle-node) and window end (crisis) parameter solvers;
//! * [`trapping`]: cyclic trapping regions in the maximal convention, region
//!   verification, escape times;
//! * [`tower`]: the level-by-level tower builder, witness orbits, DOT/JSON
//!   serialization;
//! * [`oracle`]: a brute-force epsilon-chain oracle on a uniform grid
//!   (Tarjan condensation) for cross-validating towers;
//! * [`render`]: parameter sweeps, PPM bifurcation diagrams with node
//!   overlays, CSV mark export.

pub mod error;
pub mod interval;
pub mod map;
pub mod numfmt;
pub mod oracle;
pub mod periodic;
pub mod render;
pub mod tol;
pub mod tower;
pub mod trapping;

pub use error::{Error, Result};
pub use interval::Interval;
pub use map::MapView;
pub use oracle::{build_grid_graph, compare_with_tower, condense, GridMap, GridSystem};
pub use periodic::{find_periodic_orbits, solve_crisis, solve_window_birth, PeriodicOrbit};
pub use render::{sweep, write_csv, write_ppm, MarkKind, RenderOptions, SweepColumn};
pub use tower::{build_tower, edge_witness, serialize_tower, Tower, TowerFormat, TowerOptions};
pub use trapping::{build_cyclic_region, escape_time, verify_region, CyclicTrappingRegion};
