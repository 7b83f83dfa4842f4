//! Blocked out-of-place transpose used to flip the solver fields between the
//! vertical and horizontal sweep layouts.

const BLOCK: usize = 16;

/// `src` is `rows x cols` row-major; writes its `cols x rows` transpose into `dst`.
pub(crate) fn transpose_into<T: Copy>(src: &[T], rows: usize, cols: usize, dst: &mut [T]) {
    debug_assert_eq!(src.len(), rows * cols);
    debug_assert_eq!(dst.len(), rows * cols);
    transpose_band(src, rows, cols, 0, dst);
}

/// Fills the destination rows `first..first + band.len() / rows` (source columns).
fn transpose_band<T: Copy>(src: &[T], rows: usize, cols: usize, first: usize, band: &mut [T]) {
    if rows == 0 {
        return;
    }
    // Destination-contiguous inner loop; reading along source columns is
    // cheaper than writing along them, notably for power-of-two strides.
    let band_rows = band.len() / rows;
    for c0 in (0..band_rows).step_by(BLOCK) {
        let c1 = (c0 + BLOCK).min(band_rows);
        for r0 in (0..rows).step_by(BLOCK) {
            let r1 = (r0 + BLOCK).min(rows);
            for c in c0..c1 {
                let dst_row = &mut band[c * rows..(c + 1) * rows];
                for r in r0..r1 {
                    dst_row[r] = src[r * cols + first + c];
                }
            }
        }
    }
}

#[cfg(feature = "parallel")]
pub(crate) fn par_transpose_into<T: Copy + Send + Sync>(src: &[T], rows: usize, cols: usize, dst: &mut [T]) {
    use rayon::prelude::*;

    debug_assert_eq!(src.len(), rows * cols);
    debug_assert_eq!(dst.len(), rows * cols);
    if rows == 0 || cols == 0 {
        return;
    }
    dst.par_chunks_mut(BLOCK * rows)
        .enumerate()
        .for_each(|(k, band)| transpose_band(src, rows, cols, k * BLOCK, band));
}
