//! Ground-truth solvers the sweep solver is checked against.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::lattice::{linear_index, Axis, Grid, GridDims, Lattice, NodeCoord};
use crate::sweep::NO_PRED;

/// Exhaustive enumeration is limited to lattices of this many nodes.
pub const BRUTE_FORCE_MAX_NODES: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub dist: Grid<f64>,
    pub pred: Grid<u32>,
}

impl ExactResult {
    pub fn dims(&self) -> GridDims {
        self.dist.dims()
    }

    pub fn distance(&self, coord: NodeCoord) -> f64 {
        *self.dist.get(coord)
    }

    pub fn predecessor(&self, coord: NodeCoord) -> Option<NodeCoord> {
        let p = *self.pred.get(coord);
        (p != NO_PRED).then(|| self.dims().coord_of(p as usize))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TurnAnnotatedResult {
    pub dist: Grid<f64>,
    /// Fewest axis changes over all minimum-cost paths.
    pub min_turns: Grid<u32>,
}

/// Min-heap entry: smaller key first, then smaller node index.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry<K> {
    key: K,
    node: usize,
}

trait HeapKey: Copy + PartialEq {
    fn cmp_key(&self, other: &Self) -> Ordering;
}

impl HeapKey for f64 {
    fn cmp_key(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
}

impl HeapKey for (f64, u32) {
    fn cmp_key(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

impl<K: HeapKey> Eq for Entry<K> {}

impl<K: HeapKey> PartialOrd for Entry<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<K: HeapKey> Ord for Entry<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.cmp_key(&self.key).then_with(|| other.node.cmp(&self.node))
    }
}

/// Binary-heap Dijkstra with lazy deletion of stale entries.
pub fn dijkstra_reference(lattice: &Lattice, source: NodeCoord) -> Result<ExactResult> {
    let dims = lattice.dims();
    let s = linear_index(source, dims)?;
    let n = dims.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![NO_PRED; n];
    let mut done = vec![false; n];
    dist[s] = 0.0;
    pred[s] = s as u32;

    let mut heap = BinaryHeap::new();
    heap.push(Entry { key: 0.0, node: s });
    while let Some(Entry { key, node }) = heap.pop() {
        if done[node] || key > dist[node] {
            continue;
        }
        done[node] = true;
        for (next, w, _) in lattice.neighbors(dims.coord_of(node)) {
            let v = dims.index_of(next);
            let c = key + w;
            if c < dist[v] {
                dist[v] = c;
                pred[v] = node as u32;
                heap.push(Entry { key: c, node: v });
            }
        }
    }
    Ok(ExactResult {
        dist: Grid::from_column_major(dims, dist),
        pred: Grid::from_column_major(dims, pred),
    })
}

/// Cheapest path cost from `source` to `target` over all simple paths.
pub fn brute_force_distance(lattice: &Lattice, source: NodeCoord, target: NodeCoord) -> Result<f64> {
    let all = brute_force_distances(lattice, source)?;
    let t = linear_index(target, lattice.dims())?;
    Ok(all.as_slice()[t])
}

/// Like [`brute_force_distance`] for every target at once.
pub fn brute_force_distances(lattice: &Lattice, source: NodeCoord) -> Result<Grid<f64>> {
    let dims = lattice.dims();
    let n = dims.node_count();
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(Error::TooLargeForBruteForce {
            nodes: n,
            max: BRUTE_FORCE_MAX_NODES,
        });
    }
    let s = linear_index(source, dims)?;
    let mut best = vec![f64::INFINITY; n];
    let mut on_path = vec![false; n];

    fn walk(lattice: &Lattice, node: usize, cost: f64, on_path: &mut [bool], best: &mut [f64]) {
        let dims = lattice.dims();
        best[node] = best[node].min(cost);
        on_path[node] = true;
        for (next, w, _) in lattice.neighbors(dims.coord_of(node)) {
            let v = dims.index_of(next);
            if !on_path[v] {
                walk(lattice, v, cost + w, on_path, best);
            }
        }
        on_path[node] = false;
    }

    walk(lattice, s, 0.0, &mut on_path, &mut best);
    Ok(Grid::from_column_major(dims, best))
}

/// Dijkstra over `(node, incoming axis)` states ordered by `(cost, turns)`.
pub fn min_turn_oracle(lattice: &Lattice, source: NodeCoord) -> Result<TurnAnnotatedResult> {
    const NONE: usize = 0;
    fn axis_slot(a: Axis) -> usize {
        match a {
            Axis::Vertical => 1,
            Axis::Horizontal => 2,
        }
    }

    let dims = lattice.dims();
    let s = linear_index(source, dims)?;
    let n = dims.node_count();
    let mut key = vec![(f64::INFINITY, u32::MAX); 3 * n];
    let mut done = vec![false; 3 * n];
    key[3 * s + NONE] = (0.0, 0);

    let mut heap = BinaryHeap::new();
    heap.push(Entry {
        key: (0.0, 0u32),
        node: 3 * s + NONE,
    });
    while let Some(Entry { key: k, node: state }) = heap.pop() {
        if done[state] {
            continue;
        }
        done[state] = true;
        let (node, incoming) = (state / 3, state % 3);
        for (next, w, axis) in lattice.neighbors(dims.coord_of(node)) {
            let slot = axis_slot(axis);
            let turns = k.1 + u32::from(incoming != NONE && incoming != slot);
            let cand = (k.0 + w, turns);
            let target = 3 * dims.index_of(next) + slot;
            if cand.cmp_key(&key[target]) == Ordering::Less {
                key[target] = cand;
                heap.push(Entry {
                    key: cand,
                    node: target,
                });
            }
        }
    }

    let mut dist = Vec::with_capacity(n);
    let mut min_turns = Vec::with_capacity(n);
    for v in 0..n {
        let best = key[3 * v..3 * v + 3]
            .iter()
            .copied()
            .min_by(|a, b| a.cmp_key(b))
            .expect("three states per node");
        dist.push(best.0);
        min_turns.push(best.1);
    }
    Ok(TurnAnnotatedResult {
        dist: Grid::from_column_major(dims, dist),
        min_turns: Grid::from_column_major(dims, min_turns),
    })
}
