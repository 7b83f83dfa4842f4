//! Paths, turn counts, error metrics and convergence traces.

use std::time::Duration;

use crate::error::{Error, Result};
use crate::lattice::{Grid, GridDims, Lattice, NodeCoord};
use crate::oracle::{dijkstra_reference, ExactResult};
use crate::pgm::GrayImage;
use crate::sweep::{DistanceView, SolveResult, Solver, SolverOptions, NO_PRED};

/// Anything holding a distance field and a predecessor field.
pub trait ShortestPathField {
    fn distances(&self) -> &Grid<f64>;
    fn predecessors(&self) -> &Grid<u32>;
}

impl ShortestPathField for SolveResult {
    fn distances(&self) -> &Grid<f64> {
        &self.bed
    }

    fn predecessors(&self) -> &Grid<u32> {
        &self.pred
    }
}

impl ShortestPathField for ExactResult {
    fn distances(&self) -> &Grid<f64> {
        &self.dist
    }

    fn predecessors(&self) -> &Grid<u32> {
        &self.pred
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub nodes: Vec<NodeCoord>,
    pub cost: f64,
    pub turns: usize,
}

/// Number of places where consecutive edges switch between vertical and
/// horizontal.
pub fn count_turns(nodes: &[NodeCoord]) -> usize {
    let vertical: Vec<bool> = nodes.windows(2).map(|w| w[0].col == w[1].col).collect();
    vertical.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Follows predecessors from `target` back to `source`. The returned cost is
/// re-summed from the lattice, source first; once converged it equals the
/// distance at `target`, before that it may be lower.
pub fn extract_path<F: ShortestPathField + ?Sized>(
    field: &F,
    source: NodeCoord,
    target: NodeCoord,
    lattice: &Lattice,
) -> Result<Path> {
    let dims = lattice.dims();
    for c in [source, target] {
        if !dims.contains(c) {
            return Err(Error::OutOfBounds { coord: c, dims });
        }
    }
    let (dist, pred) = (field.distances(), field.predecessors());
    if dist.dims() != dims || pred.dims() != dims {
        return Err(Error::DimsMismatch {
            left: dist.dims(),
            right: dims,
        });
    }
    if !dist.get(target).is_finite() {
        return Err(Error::Unreachable(target));
    }
    let corrupt = |reason: String| Error::CorruptPredecessors { target, reason };

    let mut nodes = vec![target];
    let mut cur = target;
    while cur != source {
        if nodes.len() > dims.node_count() {
            return Err(corrupt("trace longer than the node count".into()));
        }
        let p = *pred.get(cur);
        if p == NO_PRED || p as usize >= dims.node_count() {
            return Err(corrupt(format!("({}, {}) has no valid predecessor", cur.row, cur.col)));
        }
        let prev = dims.coord_of(p as usize);
        if !prev.is_adjacent(cur) {
            return Err(corrupt(format!(
                "({}, {}) points at non-neighbor ({}, {})",
                cur.row, cur.col, prev.row, prev.col
            )));
        }
        nodes.push(prev);
        cur = prev;
    }
    nodes.reverse();

    let cost = nodes
        .windows(2)
        .map(|w| lattice.edge_cost(w[0], w[1]).expect("adjacent nodes"))
        .fold(0.0, |acc, w| acc + w);
    let turns = count_turns(&nodes);
    Ok(Path { nodes, cost, turns })
}

/// Tolerance used to call a node mismatched.
pub fn within_tolerance(approx: f64, exact: f64) -> bool {
    (approx - exact).abs() <= 1e-9 * (1.0 + exact.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorReport {
    pub l1: f64,
    pub linf: f64,
    pub mismatched: usize,
}

/// Unreached approximate entries count as an error of the full exact distance.
pub fn error_vs_oracle(approx: &Grid<f64>, exact: &ExactResult) -> Result<ErrorReport> {
    if approx.dims() != exact.dims() {
        return Err(Error::DimsMismatch {
            left: approx.dims(),
            right: exact.dims(),
        });
    }
    Ok(error_of(approx.as_slice(), exact.dist.as_slice()))
}

fn error_of(approx: &[f64], exact: &[f64]) -> ErrorReport {
    let mut report = ErrorReport::default();
    for (&a, &e) in approx.iter().zip(exact) {
        if !e.is_finite() {
            continue;
        }
        let (diff, bad) = if a.is_finite() {
            let d = (a - e).abs();
            (d, !within_tolerance(a, e))
        } else {
            (e, true)
        };
        report.l1 += diff;
        report.linf = report.linf.max(diff);
        report.mismatched += usize::from(bad);
    }
    report
}

/// Min-max normalizes the finite distances onto `0..=maxval`; unreached
/// nodes map to `maxval`.
pub fn distance_image(field: &Grid<f64>, maxval: u16) -> GrayImage {
    let finite = || field.as_slice().iter().copied().filter(|d| d.is_finite());
    let lo = finite().fold(f64::INFINITY, f64::min);
    let hi = finite().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let scale = |d: f64| -> u16 {
        if !d.is_finite() {
            maxval
        } else if span > 0.0 {
            ((d - lo) / span * f64::from(maxval)).round() as u16
        } else {
            0
        }
    };
    let pixels = field.to_row_major().into_iter().map(scale).collect();
    GrayImage::new(field.dims(), maxval, pixels).expect("scaled pixels are within maxval")
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub iteration: usize,
    pub error: ErrorReport,
    pub updates: usize,
    pub wall_time: Duration,
}

/// Solves to convergence, recording the error against heap Dijkstra after
/// every iteration.
pub fn convergence_trace(lattice: &Lattice, source: NodeCoord) -> Result<Vec<TraceEntry>> {
    let solver = Solver::new(SolverOptions::default())?;
    let exact = dijkstra_reference(lattice, source)?;
    let (trace, _) = convergence_trace_with(&solver, lattice, source, &exact, |_, _| {})?;
    Ok(trace)
}

/// Like [`convergence_trace`] with a caller-chosen solver and oracle result.
/// `on_entry` also sees the distance field of each iteration.
pub fn convergence_trace_with(
    solver: &Solver,
    lattice: &Lattice,
    source: NodeCoord,
    exact: &ExactResult,
    mut on_entry: impl FnMut(&TraceEntry, DistanceView<'_>),
) -> Result<(Vec<TraceEntry>, SolveResult)> {
    let dims: GridDims = lattice.dims();
    if exact.dims() != dims {
        return Err(Error::DimsMismatch {
            left: exact.dims(),
            right: dims,
        });
    }
    let mut trace = Vec::new();
    let mut observer = |report: &crate::sweep::IterationReport, view: DistanceView<'_>| {
        let entry = TraceEntry {
            iteration: report.iteration,
            error: error_of(view.as_slice(), exact.dist.as_slice()),
            updates: report.updates(),
            wall_time: report.wall_time,
        };
        on_entry(&entry, view);
        trace.push(entry);
        std::ops::ControlFlow::Continue(())
    };
    let result = solver.solve(lattice, source, Some(&mut observer))?;
    Ok((trace, result))
}
