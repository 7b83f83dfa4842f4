//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Fields cross the boundary as flat row-major `Float64Array`s; unreached
//! nodes are `Infinity`. Everything runs on the sequential solver.

use anydijkstra::analysis::{convergence_trace_with, extract_path};
use anydijkstra::costs::{image_to_costs, random_lattice, RngSpec};
use anydijkstra::oracle::dijkstra_reference;
use anydijkstra::pgm::load_pgm;
use anydijkstra::{GridDims, Lattice, NodeCoord, Solver, SolverOptions};
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
pub struct Demo {
    lattice: Lattice,
    solver: Solver,
    last_k: usize,
    last_converged: bool,
}

impl Demo {
    fn with_lattice(lattice: Lattice) -> Self {
        Self {
            lattice,
            solver: Solver::new(SolverOptions::sequential()).expect("sequential solver needs no pool"),
            last_k: 0,
            last_converged: false,
        }
    }

    pub fn try_random(height: usize, width: usize, seed: u64) -> Result<Demo, String> {
        let dims = GridDims::new(height, width).map_err(|e| e.to_string())?;
        Ok(Self::with_lattice(random_lattice(dims, RngSpec::uniform(seed))))
    }

    pub fn try_from_pgm(bytes: &[u8]) -> Result<Demo, String> {
        let img = load_pgm(bytes).map_err(|e| e.to_string())?;
        Ok(Self::with_lattice(image_to_costs(&img)))
    }

    fn coord(&self, row: usize, col: usize) -> Result<NodeCoord, String> {
        let c = NodeCoord::new(row, col);
        if self.lattice.dims().contains(c) {
            Ok(c)
        } else {
            Err(format!("({row}, {col}) is outside the lattice"))
        }
    }

    pub fn try_solve(&mut self, row: usize, col: usize, max_iters: Option<usize>) -> Result<Vec<f64>, String> {
        let source = self.coord(row, col)?;
        let solver = Solver::new(SolverOptions {
            max_iterations: max_iters,
            ..*self.solver.options()
        })
        .map_err(|e| e.to_string())?;
        let r = solver.solve(&self.lattice, source, None).map_err(|e| e.to_string())?;
        self.last_k = r.k_iterations;
        self.last_converged = r.converged;
        Ok(r.bed.to_row_major())
    }

    pub fn try_error_trace(&self, row: usize, col: usize) -> Result<Vec<f64>, String> {
        let source = self.coord(row, col)?;
        let exact = dijkstra_reference(&self.lattice, source).map_err(|e| e.to_string())?;
        let (trace, _) = convergence_trace_with(&self.solver, &self.lattice, source, &exact, |_, _| {})
            .map_err(|e| e.to_string())?;
        Ok(trace.iter().map(|t| t.error.l1).collect())
    }

    pub fn try_path(
        &self,
        source: (usize, usize),
        target: (usize, usize),
        max_iters: Option<usize>,
    ) -> Result<Vec<u32>, String> {
        let (s, t) = (self.coord(source.0, source.1)?, self.coord(target.0, target.1)?);
        let solver = Solver::new(SolverOptions {
            max_iterations: max_iters,
            ..*self.solver.options()
        })
        .map_err(|e| e.to_string())?;
        let r = solver.solve(&self.lattice, s, None).map_err(|e| e.to_string())?;
        match extract_path(&r, s, t, &self.lattice) {
            Ok(p) => Ok(p.nodes.iter().flat_map(|n| [n.row as u32, n.col as u32]).collect()),
            Err(anydijkstra::Error::Unreachable(_)) => Ok(Vec::new()),
            Err(e) => Err(e.to_string()),
        }
    }
}

#[wasm_bindgen]
impl Demo {
    /// Seeded random lattice with uniform `[0, 1)` edge costs.
    pub fn random(height: usize, width: usize, seed: u64) -> Result<Demo, JsError> {
        Self::try_random(height, width, seed).map_err(|e| JsError::new(&e))
    }

    /// Lattice from PGM bytes; edge cost = brightness difference.
    #[wasm_bindgen(js_name = fromPgm)]
    pub fn from_pgm(bytes: &[u8]) -> Result<Demo, JsError> {
        Self::try_from_pgm(bytes).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.lattice.height()
    }

    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.lattice.width()
    }

    /// Iterations used by the last `solve`.
    #[wasm_bindgen(getter, js_name = lastIterations)]
    pub fn last_iterations(&self) -> usize {
        self.last_k
    }

    #[wasm_bindgen(getter, js_name = lastConverged)]
    pub fn last_converged(&self) -> bool {
        self.last_converged
    }

    /// Distances after at most `max_iters` iterations (all when omitted).
    pub fn solve(&mut self, row: usize, col: usize, max_iters: Option<usize>) -> Result<Vec<f64>, JsError> {
        self.try_solve(row, col, max_iters).map_err(|e| JsError::new(&e))
    }

    /// L1 error against exact Dijkstra after each iteration.
    #[wasm_bindgen(js_name = errorTrace)]
    pub fn error_trace(&self, row: usize, col: usize) -> Result<Vec<f64>, JsError> {
        self.try_error_trace(row, col).map_err(|e| JsError::new(&e))
    }

    /// Flat `[r0, c0, r1, c1, ...]` from source to target; empty when the
    /// target is not reached within `max_iters`.
    pub fn path(
        &self,
        source_row: usize,
        source_col: usize,
        target_row: usize,
        target_col: usize,
        max_iters: Option<usize>,
    ) -> Result<Vec<u32>, JsError> {
        self.try_path((source_row, source_col), (target_row, target_col), max_iters)
            .map_err(|e| JsError::new(&e))
    }
}
