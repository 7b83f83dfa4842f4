//! Single-source shortest paths on 4-connected weighted lattices, such as
//! images with brightness-difference edge costs.
//!
//! The main solver ([`sweep`]) alternates column-wise and row-wise relaxation
//! sweeps over pre-laid-out cost buffers. Every sweep touches memory
//! sequentially and splits into independent per-column work, and the
//! distances it holds after any iteration are valid upper bounds, so a run
//! can be cut short for an approximate answer. [`oracle`] provides exact
//! references (binary-heap Dijkstra, exhaustive enumeration, and a
//! minimum-turn search) and [`analysis`] compares the two.
//!
//! ```
//! use anydijkstra::{costs, sweep, GridDims, NodeCoord};
//!
//! let dims = GridDims::new(32, 32).unwrap();
//! let lattice = costs::random_lattice(dims, costs::RngSpec::uniform(7));
//! let result = sweep::solve(&lattice, NodeCoord::new(0, 0), None).unwrap();
//! assert!(result.converged);
//! let exact = anydijkstra::oracle::dijkstra_reference(&lattice, NodeCoord::new(0, 0)).unwrap();
//! let err = anydijkstra::analysis::error_vs_oracle(&result.bed, &exact).unwrap();
//! assert_eq!(err.mismatched, 0);
//! ```

pub mod analysis;
pub mod costs;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod pgm;
pub mod raster;
pub mod rng;
pub mod sweep;
mod transpose;

pub use error::{Error, Result};
pub use lattice::{linear_index, to_coords, Axis, Grid, GridDims, Lattice, NodeCoord};
pub use sweep::{SolveResult, Solver, SolverOptions, SolverState};
