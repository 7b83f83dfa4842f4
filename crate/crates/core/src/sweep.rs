//! The anytime sweep solver.
//!
//! Each iteration relaxes every column of the lattice independently (a
//! vertical sweep), transposes the distance, predecessor and update fields,
//! relaxes every column of the transposed lattice (a horizontal sweep) and
//! transposes back. Inside a sweep a column only reads and writes its own
//! slice of the fields and its own run of edge costs, so columns can be
//! processed on any number of workers with bitwise-identical results.
//!
//! Layout: in [`Orientation::Vertical`] the fields are column-major (slot `k`
//! holds linear index `k`); in [`Orientation::Horizontal`] they are
//! row-major. The explicit transposition keeps both sweeps sequential in
//! memory. Predecessors always hold column-major linear indices of the
//! original lattice, whatever the current layout.
//!
//! The solver stops after the first full iteration that improves nothing.
//! Stopping earlier (an iteration cap or an observer returning
//! [`ControlFlow::Break`]) yields upper bounds on every reached node.

use std::ops::ControlFlow;
use std::time::Duration;

use crate::error::Result;
use crate::lattice::{linear_index, Grid, GridDims, Lattice, NodeCoord};
use crate::transpose::transpose_into;

/// Predecessor sentinel for nodes that have not been reached.
pub const NO_PRED: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Vertical,
    Horizontal,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::Vertical => Orientation::Horizontal,
            Orientation::Horizontal => Orientation::Vertical,
        }
    }
}

/// Maps a position inside a column to the original lattice's linear index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnIndexing {
    pub base: usize,
    pub step: usize,
}

impl ColumnIndexing {
    #[inline]
    pub fn index(&self, position: usize) -> u32 {
        (self.base + position * self.step) as u32
    }
}

/// Relaxes one column in place: a downward pass then an upward pass, each
/// taking `min(bed[x], bed[neighbor] + edge)` and recording the neighbor on
/// strict improvement. Afterwards every entry equals the cheapest
/// within-column path from any entry of the input. `upd` is expected to be
/// clear on entry; it is set for every improved node. Returns the number of
/// distinct nodes improved.
pub fn relax_column(bed: &mut [f64], pred: &mut [u32], upd: &mut [bool], edges: &[f64], at: ColumnIndexing) -> usize {
    let len = bed.len();
    debug_assert_eq!(pred.len(), len);
    debug_assert_eq!(upd.len(), len);
    debug_assert_eq!(edges.len(), len.saturating_sub(1));
    let mut updated = 0;

    let mut carry = bed[0];
    for x in 1..len {
        let c = carry + edges[x - 1];
        if c < bed[x] {
            bed[x] = c;
            pred[x] = at.index(x - 1);
            if !upd[x] {
                upd[x] = true;
                updated += 1;
            }
        }
        carry = bed[x];
    }

    let mut carry = bed[len - 1];
    for x in (0..len - 1).rev() {
        let c = carry + edges[x];
        if c < bed[x] {
            bed[x] = c;
            pred[x] = at.index(x + 1);
            if !upd[x] {
                upd[x] = true;
                updated += 1;
            }
        }
        carry = bed[x];
    }
    updated
}

#[derive(Debug, Clone)]
pub struct SolverState {
    dims: GridDims,
    orientation: Orientation,
    bed: Vec<f64>,
    pred: Vec<u32>,
    upd: Vec<bool>,
    iteration: usize,
    last_iteration_updates: Option<usize>,
    // Sweeps run so far; skipping needs one full pass per orientation first.
    sweeps: usize,
    scratch_bed: Vec<f64>,
    scratch_pred: Vec<u32>,
    scratch_upd: Vec<bool>,
}

/// Fresh state: only `source` is reached, at distance zero, and it is its own
/// predecessor.
pub fn init_state(lattice: &Lattice, source: NodeCoord) -> Result<SolverState> {
    let dims = lattice.dims();
    let s = linear_index(source, dims)?;
    let n = dims.node_count();
    let mut bed = vec![f64::INFINITY; n];
    let mut pred = vec![NO_PRED; n];
    let mut upd = vec![false; n];
    bed[s] = 0.0;
    pred[s] = s as u32;
    upd[s] = true;
    Ok(SolverState {
        dims,
        orientation: Orientation::Vertical,
        bed,
        pred,
        upd,
        iteration: 0,
        last_iteration_updates: None,
        sweeps: 0,
        scratch_bed: vec![0.0; n],
        scratch_pred: vec![0; n],
        scratch_upd: vec![false; n],
    })
}

impl SolverState {
    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Completed full iterations.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Updates made by the last full iteration, if any has run.
    pub fn last_iteration_updates(&self) -> Option<usize> {
        self.last_iteration_updates
    }

    /// True once a full iteration improved nothing. A single-node lattice is
    /// converged from the start.
    pub fn is_converged(&self) -> bool {
        self.dims.node_count() == 1 || self.last_iteration_updates == Some(0)
    }

    fn slot(&self, coord: NodeCoord) -> usize {
        assert!(self.dims.contains(coord), "{coord:?} outside {:?}", self.dims);
        match self.orientation {
            Orientation::Vertical => coord.col * self.dims.height + coord.row,
            Orientation::Horizontal => coord.row * self.dims.width + coord.col,
        }
    }

    pub fn distance(&self, coord: NodeCoord) -> f64 {
        self.bed[self.slot(coord)]
    }

    pub fn predecessor(&self, coord: NodeCoord) -> Option<NodeCoord> {
        let p = self.pred[self.slot(coord)];
        (p != NO_PRED).then(|| self.dims.coord_of(p as usize))
    }

    /// Whether `coord` improved during the most recent sweep.
    pub fn updated(&self, coord: NodeCoord) -> bool {
        self.upd[self.slot(coord)]
    }

    fn to_grid<T: Copy>(&self, field: &[T]) -> Grid<T> {
        match self.orientation {
            Orientation::Vertical => Grid::from_column_major(self.dims, field.to_vec()),
            Orientation::Horizontal => Grid::from_row_major(self.dims, field),
        }
    }

    pub fn bed_grid(&self) -> Grid<f64> {
        self.to_grid(&self.bed)
    }

    pub fn pred_grid(&self) -> Grid<u32> {
        self.to_grid(&self.pred)
    }

    pub fn upd_grid(&self) -> Grid<bool> {
        self.to_grid(&self.upd)
    }

    /// Per-column summary of the update mask for the current orientation.
    pub fn col_dirty(&self) -> Vec<bool> {
        let len = self.column_len();
        self.upd.chunks(len).map(|c| c.iter().any(|&u| u)).collect()
    }

    fn column_len(&self) -> usize {
        match self.orientation {
            Orientation::Vertical => self.dims.height,
            Orientation::Horizontal => self.dims.width,
        }
    }

    fn column_count(&self) -> usize {
        match self.orientation {
            Orientation::Vertical => self.dims.width,
            Orientation::Horizontal => self.dims.height,
        }
    }
}

/// Read-only distances handed to an observer after each full iteration.
/// Column-major, like [`Grid`].
#[derive(Debug, Clone, Copy)]
pub struct DistanceView<'a> {
    dims: GridDims,
    data: &'a [f64],
}

impl<'a> DistanceView<'a> {
    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn get(&self, coord: NodeCoord) -> f64 {
        assert!(self.dims.contains(coord));
        self.data[self.dims.index_of(coord)]
    }

    pub fn as_slice(&self) -> &'a [f64] {
        self.data
    }

    pub fn to_grid(&self) -> Grid<f64> {
        Grid::from_column_major(self.dims, self.data.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub iteration: usize,
    pub updates_vertical: usize,
    pub updates_horizontal: usize,
    pub wall_time: Duration,
}

impl IterationReport {
    pub fn updates(&self) -> usize {
        self.updates_vertical + self.updates_horizontal
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub bed: Grid<f64>,
    pub pred: Grid<u32>,
    pub k_iterations: usize,
    pub reports: Vec<IterationReport>,
    pub converged: bool,
}

impl SolveResult {
    pub fn dims(&self) -> GridDims {
        self.bed.dims()
    }

    pub fn distance(&self, coord: NodeCoord) -> f64 {
        *self.bed.get(coord)
    }

    pub fn predecessor(&self, coord: NodeCoord) -> Option<NodeCoord> {
        let p = *self.pred.get(coord);
        (p != NO_PRED).then(|| self.dims().coord_of(p as usize))
    }

    pub fn total_updates(&self) -> usize {
        self.reports.iter().map(IterationReport::updates).sum()
    }

    pub fn wall_time(&self) -> Duration {
        self.reports.iter().map(|r| r.wall_time).sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolverOptions {
    /// Worker count. `None` uses the global pool, `Some(1)` runs strictly on
    /// the calling thread.
    pub threads: Option<usize>,
    /// Skip columns whose update mask is empty. Such a column is already a
    /// fixpoint of [`relax_column`], so results are unchanged.
    pub skip_clean_columns: bool,
    /// Full iterations to run at most. Defaults to `H*W + 1`; zero returns
    /// the initial state.
    pub max_iterations: Option<usize>,
}

impl SolverOptions {
    pub fn sequential() -> Self {
        Self {
            threads: Some(1),
            ..Self::default()
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn with_max_iterations(mut self, max: usize) -> Self {
        self.max_iterations = Some(max);
        self
    }

    pub fn with_skip_clean_columns(mut self, skip: bool) -> Self {
        self.skip_clean_columns = skip;
        self
    }
}

enum Executor {
    Sequential,
    #[cfg(feature = "parallel")]
    Global,
    #[cfg(feature = "parallel")]
    Pool(rayon::ThreadPool),
}

impl Executor {
    fn new(threads: Option<usize>) -> Result<Self> {
        #[cfg(feature = "parallel")]
        {
            match threads {
                Some(1) => Ok(Executor::Sequential),
                None | Some(0) => Ok(Executor::Global),
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map(Executor::Pool)
                    .map_err(|e| crate::Error::ThreadPool(e.to_string())),
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = threads;
            Ok(Executor::Sequential)
        }
    }

    fn install<R: Send>(&self, f: impl FnOnce(bool) -> R + Send) -> R {
        match self {
            Executor::Sequential => f(false),
            #[cfg(feature = "parallel")]
            Executor::Global => f(true),
            #[cfg(feature = "parallel")]
            Executor::Pool(pool) => pool.install(|| f(true)),
        }
    }
}

pub type Observer<'o> = dyn FnMut(&IterationReport, DistanceView<'_>) -> ControlFlow<()> + 'o;

pub struct Solver {
    options: SolverOptions,
    executor: Executor,
}

impl std::fmt::Debug for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver").field("options", &self.options).finish()
    }
}

impl Solver {
    pub fn new(options: SolverOptions) -> Result<Self> {
        let executor = Executor::new(options.threads)?;
        Ok(Self { options, executor })
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    /// Relaxes every column of the current orientation, then flips the
    /// orientation. Afterwards `upd` marks exactly the nodes improved by this
    /// sweep. Returns the number of improved nodes.
    pub fn sweep(&self, state: &mut SolverState, lattice: &Lattice) -> usize {
        assert_eq!(state.dims, lattice.dims(), "state belongs to a different lattice");
        let len = state.column_len();
        let columns = state.column_count();
        let (edges, step) = match state.orientation {
            Orientation::Vertical => (lattice.vertical_buffer(), 1),
            Orientation::Horizontal => (lattice.horizontal_buffer(), state.dims.height),
        };
        let indexing = |c: usize| match state.orientation {
            Orientation::Vertical => ColumnIndexing { base: c * len, step },
            Orientation::Horizontal => ColumnIndexing { base: c, step },
        };
        let skip_clean = self.options.skip_clean_columns && state.sweeps >= 2;

        let updates = if len == 1 {
            state.upd.fill(false);
            0
        } else {
            let SolverState { bed, pred, upd, .. } = state;
            let column = |c: usize, bed: &mut [f64], pred: &mut [u32], upd: &mut [bool]| {
                let dirty = upd.iter().any(|&u| u);
                upd.fill(false);
                if skip_clean && !dirty {
                    return 0;
                }
                let e = &edges[c * (len - 1)..(c + 1) * (len - 1)];
                relax_column(bed, pred, upd, e, indexing(c))
            };
            self.executor.install(|parallel| {
                if parallel {
                    par_columns(bed, pred, upd, len, &column)
                } else {
                    bed.chunks_mut(len)
                        .zip(pred.chunks_mut(len))
                        .zip(upd.chunks_mut(len))
                        .enumerate()
                        .map(|(c, ((b, p), u))| column(c, b, p, u))
                        .sum()
                }
            })
        };

        self.flip(state, columns, len);
        state.sweeps += 1;
        updates
    }

    fn flip(&self, state: &mut SolverState, rows: usize, cols: usize) {
        let SolverState {
            bed,
            pred,
            upd,
            scratch_bed,
            scratch_pred,
            scratch_upd,
            ..
        } = state;
        self.executor.install(|parallel| {
            if parallel {
                #[cfg(feature = "parallel")]
                {
                    use crate::transpose::par_transpose_into;
                    par_transpose_into(bed, rows, cols, scratch_bed);
                    par_transpose_into(pred, rows, cols, scratch_pred);
                    par_transpose_into(upd, rows, cols, scratch_upd);
                    return;
                }
            }
            transpose_into(bed, rows, cols, scratch_bed);
            transpose_into(pred, rows, cols, scratch_pred);
            transpose_into(upd, rows, cols, scratch_upd);
        });
        std::mem::swap(&mut state.bed, &mut state.scratch_bed);
        std::mem::swap(&mut state.pred, &mut state.scratch_pred);
        std::mem::swap(&mut state.upd, &mut state.scratch_upd);
        state.orientation = state.orientation.flipped();
    }

    /// Two sweeps starting from the current orientation (vertical then
    /// horizontal for any state driven only through `iterate`).
    pub fn iterate(&self, state: &mut SolverState, lattice: &Lattice) -> IterationReport {
        let start = clock::now();
        let mut counts = [0usize; 2];
        for _ in 0..2 {
            let slot = match state.orientation {
                Orientation::Vertical => 0,
                Orientation::Horizontal => 1,
            };
            counts[slot] = self.sweep(state, lattice);
        }
        state.iteration += 1;
        let updates = counts[0] + counts[1];
        state.last_iteration_updates = Some(updates);
        IterationReport {
            iteration: state.iteration,
            updates_vertical: counts[0],
            updates_horizontal: counts[1],
            wall_time: clock::elapsed(start),
        }
    }

    /// Iterates until a full iteration makes no update, the iteration cap is
    /// hit, or the observer breaks. The observer runs on the calling thread
    /// after each iteration.
    pub fn solve(
        &self,
        lattice: &Lattice,
        source: NodeCoord,
        mut observer: Option<&mut Observer<'_>>,
    ) -> Result<SolveResult> {
        let mut state = init_state(lattice, source)?;
        let cap = self.options.max_iterations.unwrap_or(lattice.node_count() + 1);
        let mut reports = Vec::new();
        while state.iteration < cap {
            let report = self.iterate(&mut state, lattice);
            let quiet = report.updates() == 0;
            let flow = match observer.as_mut() {
                Some(obs) => obs(
                    &report,
                    DistanceView {
                        dims: state.dims,
                        data: &state.bed,
                    },
                ),
                None => ControlFlow::Continue(()),
            };
            reports.push(report);
            if quiet || flow.is_break() {
                break;
            }
        }
        let converged = state.is_converged();
        debug_assert_eq!(state.orientation, Orientation::Vertical);
        Ok(SolveResult {
            k_iterations: state.iteration,
            converged,
            reports,
            bed: Grid::from_column_major(state.dims, state.bed),
            pred: Grid::from_column_major(state.dims, state.pred),
        })
    }
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new(SolverOptions::default()).expect("default solver")
    }
}

#[cfg(feature = "parallel")]
fn par_columns<F>(bed: &mut [f64], pred: &mut [u32], upd: &mut [bool], len: usize, column: &F) -> usize
where
    F: Fn(usize, &mut [f64], &mut [u32], &mut [bool]) -> usize + Sync,
{
    use rayon::prelude::*;

    // Small columns are batched so each task touches a few KiB.
    let min_len = (2048 / len).max(1);
    bed.par_chunks_mut(len)
        .zip(pred.par_chunks_mut(len))
        .zip(upd.par_chunks_mut(len))
        .enumerate()
        .with_min_len(min_len)
        .map(|(c, ((b, p), u))| column(c, b, p, u))
        .sum()
}

#[cfg(not(feature = "parallel"))]
fn par_columns<F>(_: &mut [f64], _: &mut [u32], _: &mut [bool], _: usize, _: &F) -> usize
where
    F: Fn(usize, &mut [f64], &mut [u32], &mut [bool]) -> usize + Sync,
{
    unreachable!("sequential executor never requests parallel columns")
}

/// One vertical-then-horizontal sweep pair with the default solver.
pub fn iterate(state: &mut SolverState, lattice: &Lattice) -> IterationReport {
    Solver::default().iterate(state, lattice)
}

/// Solves with default options and an optional iteration cap.
pub fn solve(lattice: &Lattice, source: NodeCoord, max_iterations: Option<usize>) -> Result<SolveResult> {
    let options = SolverOptions {
        max_iterations,
        ..SolverOptions::default()
    };
    Solver::new(options)?.solve(lattice, source, None)
}

mod clock {
    use std::time::Duration;

    #[cfg(not(target_arch = "wasm32"))]
    pub(super) type Stamp = Option<std::time::Instant>;
    #[cfg(target_arch = "wasm32")]
    pub(super) type Stamp = Option<()>;

    #[cfg(not(target_arch = "wasm32"))]
    pub(super) fn now() -> Stamp {
        Some(std::time::Instant::now())
    }

    // std::time::Instant panics on wasm32-unknown-unknown.
    #[cfg(target_arch = "wasm32")]
    pub(super) fn now() -> Stamp {
        None
    }

    #[cfg(not(target_arch = "wasm32"))]
    pub(super) fn elapsed(start: Stamp) -> Duration {
        start.map(|s| s.elapsed()).unwrap_or_default()
    }

    #[cfg(target_arch = "wasm32")]
    pub(super) fn elapsed(_: Stamp) -> Duration {
        Duration::ZERO
    }
}
