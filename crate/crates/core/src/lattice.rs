//! 4-connected weighted lattices.
//!
//! Nodes are addressed either by a [`NodeCoord`] (0-based row and column) or by
//! a column-major linear index `col * height + row`. The 1-based form of the
//! same formula, `(s_j - 1) * H + s_i`, is the usual Matlab convention; every
//! API here is 0-based.
//!
//! Edge costs are held in two buffers, each laid out so that a relaxation
//! sweep along its axis reads it sequentially:
//!
//! * vertical edges are stored column by column (`(H-1)` entries per column),
//! * horizontal edges are stored row by row (`(W-1)` entries per row).
//!
//! With that layout the transposed lattice's vertical buffer is exactly the
//! original horizontal buffer and vice versa, so [`Lattice::transposed`] only
//! swaps two shared pointers.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported node count; predecessor fields store indices as `u32`.
pub const MAX_NODES: usize = u32::MAX as usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridDims {
    pub height: usize,
    pub width: usize,
}

impl GridDims {
    pub fn new(height: usize, width: usize) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::EmptyDims { height, width });
        }
        let nodes = height
            .checked_mul(width)
            .filter(|&n| n <= MAX_NODES)
            .ok_or(Error::TooManyNodes {
                nodes: height.saturating_mul(width),
                max: MAX_NODES,
            })?;
        debug_assert!(nodes >= 1);
        Ok(Self { height, width })
    }

    pub fn node_count(&self) -> usize {
        self.height * self.width
    }

    pub fn contains(&self, coord: NodeCoord) -> bool {
        coord.row < self.height && coord.col < self.width
    }

    pub fn transposed(&self) -> Self {
        Self {
            height: self.width,
            width: self.height,
        }
    }

    /// Column-major index without bounds checking.
    #[inline]
    pub fn index_of(&self, coord: NodeCoord) -> usize {
        coord.col * self.height + coord.row
    }

    #[inline]
    pub fn coord_of(&self, index: usize) -> NodeCoord {
        NodeCoord {
            row: index % self.height,
            col: index / self.height,
        }
    }

    /// All coordinates in column-major order.
    pub fn coords(&self) -> impl Iterator<Item = NodeCoord> + '_ {
        (0..self.node_count()).map(move |k| self.coord_of(k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeCoord {
    pub row: usize,
    pub col: usize,
}

impl NodeCoord {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    pub fn transposed(self) -> Self {
        Self {
            row: self.col,
            col: self.row,
        }
    }

    pub fn is_adjacent(self, other: NodeCoord) -> bool {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col) == 1
    }
}

/// Checked column-major index of `coord`.
pub fn linear_index(coord: NodeCoord, dims: GridDims) -> Result<usize> {
    if !dims.contains(coord) {
        return Err(Error::OutOfBounds { coord, dims });
    }
    Ok(dims.index_of(coord))
}

/// Inverse of [`linear_index`].
pub fn to_coords(index: usize, dims: GridDims) -> Result<NodeCoord> {
    let nodes = dims.node_count();
    if index >= nodes {
        return Err(Error::IndexOutOfBounds { index, nodes });
    }
    Ok(dims.coord_of(index))
}

/// A dense `H x W` field stored column-major, so that `as_slice()[k]` is the
/// value at linear index `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    dims: GridDims,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn filled(dims: GridDims, value: T) -> Self {
        Self {
            dims,
            data: vec![value; dims.node_count()],
        }
    }
}

impl<T> Grid<T> {
    /// Wraps a column-major buffer. Panics if the length does not match.
    pub fn from_column_major(dims: GridDims, data: Vec<T>) -> Self {
        assert_eq!(data.len(), dims.node_count(), "grid buffer length");
        Self { dims, data }
    }

    pub fn from_fn(dims: GridDims, mut f: impl FnMut(NodeCoord) -> T) -> Self {
        let data = dims.coords().map(&mut f).collect();
        Self { dims, data }
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn get(&self, coord: NodeCoord) -> &T {
        assert!(self.dims.contains(coord), "{coord:?} outside {:?}", self.dims);
        &self.data[self.dims.index_of(coord)]
    }

    pub fn get_mut(&mut self, coord: NodeCoord) -> &mut T {
        assert!(self.dims.contains(coord), "{coord:?} outside {:?}", self.dims);
        let k = self.dims.index_of(coord);
        &mut self.data[k]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid {
            dims: self.dims,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Copy> Grid<T> {
    pub fn to_row_major(&self) -> Vec<T> {
        let GridDims { height, width } = self.dims;
        let mut out = Vec::with_capacity(self.data.len());
        for i in 0..height {
            out.extend((0..width).map(|j| self.data[j * height + i]));
        }
        out
    }

    pub fn from_row_major(dims: GridDims, row_major: &[T]) -> Self {
        assert_eq!(row_major.len(), dims.node_count(), "grid buffer length");
        Self::from_fn(dims, |c| row_major[c.row * dims.width + c.col])
    }
}

/// Axis of a lattice edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Vertical,
    Horizontal,
}

#[derive(Debug, Clone)]
pub struct Lattice {
    dims: GridDims,
    /// Vertical edge costs, column-contiguous: `vert[j * (H-1) + i]` joins `(i,j)` and `(i+1,j)`.
    vert: Arc<[f64]>,
    /// Horizontal edge costs, row-contiguous: `horiz[i * (W-1) + j]` joins `(i,j)` and `(i,j+1)`.
    horiz: Arc<[f64]>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims && self.vert[..] == other.vert[..] && self.horiz[..] == other.horiz[..]
    }
}

impl Lattice {
    /// Builds a lattice from row-major cost matrices: `vcost` is `(H-1) x W`,
    /// `hcost` is `H x (W-1)`.
    pub fn new(dims: GridDims, vcost: &[f64], hcost: &[f64]) -> Result<Self> {
        let GridDims { height, width } = dims;
        GridDims::new(height, width)?;
        let (vr, vc) = (height - 1, width);
        let (hr, hc) = (height, width - 1);
        if vcost.len() != vr * vc {
            return Err(Error::Shape {
                matrix: "vertical",
                expected: format!("{vr}x{vc}"),
                actual: format!("{} entries", vcost.len()),
            });
        }
        if hcost.len() != hr * hc {
            return Err(Error::Shape {
                matrix: "horizontal",
                expected: format!("{hr}x{hc}"),
                actual: format!("{} entries", hcost.len()),
            });
        }
        check_costs("vertical", vcost, vc)?;
        check_costs("horizontal", hcost, hc)?;

        let mut vert = vec![0.0; vcost.len()];
        for i in 0..vr {
            for j in 0..vc {
                vert[j * vr + i] = vcost[i * vc + j];
            }
        }
        Ok(Self {
            dims,
            vert: vert.into(),
            horiz: hcost.into(),
        })
    }

    /// Builds a lattice from nested rows. When `W == 1` the horizontal matrix
    /// may be given either as `H` empty rows or as no rows at all.
    pub fn from_rows(dims: GridDims, vcost: &[Vec<f64>], hcost: &[Vec<f64>]) -> Result<Self> {
        let flat_v = flatten("vertical", vcost, dims.height.saturating_sub(1), dims.width)?;
        let flat_h = if dims.width == 1 && hcost.is_empty() {
            Vec::new()
        } else {
            flatten("horizontal", hcost, dims.height, dims.width.saturating_sub(1))?
        };
        Self::new(dims, &flat_v, &flat_h)
    }

    pub fn from_fn(
        dims: GridDims,
        mut vertical: impl FnMut(usize, usize) -> f64,
        mut horizontal: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let GridDims { height, width } = GridDims::new(dims.height, dims.width)?;
        let mut v = Vec::with_capacity((height - 1) * width);
        for i in 0..height - 1 {
            for j in 0..width {
                v.push(vertical(i, j));
            }
        }
        let mut h = Vec::with_capacity(height * (width - 1));
        for i in 0..height {
            for j in 0..width - 1 {
                h.push(horizontal(i, j));
            }
        }
        Self::new(dims, &v, &h)
    }

    /// Every edge costs `cost`.
    pub fn uniform(dims: GridDims, cost: f64) -> Result<Self> {
        Self::from_fn(dims, |_, _| cost, |_, _| cost)
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn height(&self) -> usize {
        self.dims.height
    }

    pub fn width(&self) -> usize {
        self.dims.width
    }

    pub fn node_count(&self) -> usize {
        self.dims.node_count()
    }

    /// Cost of the edge between `(i,j)` and `(i+1,j)`.
    #[inline]
    pub fn vcost(&self, i: usize, j: usize) -> f64 {
        assert!(i + 1 < self.dims.height && j < self.dims.width);
        self.vert[j * (self.dims.height - 1) + i]
    }

    /// Cost of the edge between `(i,j)` and `(i,j+1)`.
    #[inline]
    pub fn hcost(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.dims.height && j + 1 < self.dims.width);
        self.horiz[i * (self.dims.width - 1) + j]
    }

    /// Vertical cost of the transposed lattice, `tvcost(j, i) == hcost(i, j)`.
    pub fn tvcost(&self, j: usize, i: usize) -> f64 {
        self.hcost(i, j)
    }

    /// Horizontal cost of the transposed lattice, `thcost(j, i) == vcost(i, j)`.
    pub fn thcost(&self, j: usize, i: usize) -> f64 {
        self.vcost(i, j)
    }

    /// Vertical edges of column `j`, top to bottom (`H-1` entries).
    #[inline]
    pub fn column_edges(&self, j: usize) -> &[f64] {
        let l = self.dims.height - 1;
        &self.vert[j * l..(j + 1) * l]
    }

    /// Horizontal edges of row `i`, left to right (`W-1` entries).
    #[inline]
    pub fn row_edges(&self, i: usize) -> &[f64] {
        let l = self.dims.width - 1;
        &self.horiz[i * l..(i + 1) * l]
    }

    /// Vertical costs as a row-major `(H-1) x W` matrix.
    pub fn vcost_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dims.height - 1)
            .map(|i| (0..self.dims.width).map(|j| self.vcost(i, j)).collect())
            .collect()
    }

    /// Horizontal costs as a row-major `H x (W-1)` matrix.
    pub fn hcost_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dims.height).map(|i| self.row_edges(i).to_vec()).collect()
    }

    /// The same graph with rows and columns exchanged. Shares the cost buffers.
    pub fn transposed(&self) -> Lattice {
        Lattice {
            dims: self.dims.transposed(),
            vert: Arc::clone(&self.horiz),
            horiz: Arc::clone(&self.vert),
        }
    }

    /// Cost of the edge joining `a` and `b`, or `None` if they are not 4-adjacent.
    pub fn edge_cost(&self, a: NodeCoord, b: NodeCoord) -> Option<f64> {
        if !self.dims.contains(a) || !self.dims.contains(b) || !a.is_adjacent(b) {
            return None;
        }
        if a.col == b.col {
            Some(self.vcost(a.row.min(b.row), a.col))
        } else {
            Some(self.hcost(a.row, a.col.min(b.col)))
        }
    }

    /// Up to four `(neighbor, cost, axis)` triples, in the order up, down, left, right.
    pub fn neighbors(&self, c: NodeCoord) -> impl Iterator<Item = (NodeCoord, f64, Axis)> + '_ {
        let GridDims { height, width } = self.dims;
        let up = (c.row > 0).then(|| {
            (
                NodeCoord::new(c.row - 1, c.col),
                self.vcost(c.row - 1, c.col),
                Axis::Vertical,
            )
        });
        let down = (c.row + 1 < height).then(|| {
            (
                NodeCoord::new(c.row + 1, c.col),
                self.vcost(c.row, c.col),
                Axis::Vertical,
            )
        });
        let left = (c.col > 0).then(|| {
            (
                NodeCoord::new(c.row, c.col - 1),
                self.hcost(c.row, c.col - 1),
                Axis::Horizontal,
            )
        });
        let right = (c.col + 1 < width).then(|| {
            (
                NodeCoord::new(c.row, c.col + 1),
                self.hcost(c.row, c.col),
                Axis::Horizontal,
            )
        });
        [up, down, left, right].into_iter().flatten()
    }

    /// Raw column-contiguous vertical buffer (`W` runs of `H-1`).
    pub(crate) fn vertical_buffer(&self) -> &[f64] {
        &self.vert
    }

    /// Raw row-contiguous horizontal buffer (`H` runs of `W-1`).
    pub(crate) fn horizontal_buffer(&self) -> &[f64] {
        &self.horiz
    }
}

fn check_costs(matrix: &'static str, values: &[f64], cols: usize) -> Result<()> {
    match values.iter().position(|c| !(c.is_finite() && *c >= 0.0)) {
        Some(k) => Err(Error::InvalidCost {
            matrix,
            row: k / cols,
            col: k % cols,
            value: values[k],
        }),
        None => Ok(()),
    }
}

fn flatten(matrix: &'static str, rows: &[Vec<f64>], nrows: usize, ncols: usize) -> Result<Vec<f64>> {
    let bad = rows.len() != nrows || rows.iter().any(|r| r.len() != ncols);
    if bad {
        let actual = match rows.first() {
            Some(r) => format!("{}x{}", rows.len(), r.len()),
            None => "0 rows".to_string(),
        };
        return Err(Error::Shape {
            matrix,
            expected: format!("{nrows}x{ncols}"),
            actual,
        });
    }
    Ok(rows.concat())
}
