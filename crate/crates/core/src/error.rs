use thiserror::Error;

use crate::lattice::{GridDims, NodeCoord};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimensions {height}x{width}: both must be at least 1")]
    EmptyDims { height: usize, width: usize },

    #[error("lattice with {nodes} nodes exceeds the supported maximum of {max}")]
    TooManyNodes { nodes: usize, max: usize },

    #[error("{matrix} cost matrix has shape mismatch: expected {expected}, got {actual}")]
    Shape {
        matrix: &'static str,
        expected: String,
        actual: String,
    },

    #[error("{matrix} cost at ({row},{col}) is {value}; edge costs must be finite and non-negative")]
    InvalidCost {
        matrix: &'static str,
        row: usize,
        col: usize,
        value: f64,
    },

    #[error("node ({}, {}) is outside a {}x{} lattice", .coord.row, .coord.col, .dims.height, .dims.width)]
    OutOfBounds { coord: NodeCoord, dims: GridDims },

    #[error("linear index {index} is outside a lattice of {nodes} nodes")]
    IndexOutOfBounds { index: usize, nodes: usize },

    #[error("brute-force enumeration supports at most {max} nodes, lattice has {nodes}")]
    TooLargeForBruteForce { nodes: usize, max: usize },

    #[error("node ({}, {}) has not been reached", .0.row, .0.col)]
    Unreachable(NodeCoord),

    #[error("predecessor trace from ({}, {}) is corrupt: {reason}", .target.row, .target.col)]
    CorruptPredecessors { target: NodeCoord, reason: String },

    #[error("field dimensions differ: {left:?} vs {right:?}")]
    DimsMismatch { left: GridDims, right: GridDims },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("failed to build worker pool: {0}")]
    ThreadPool(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
