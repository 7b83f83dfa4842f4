//! Lattice builders: image gradients and seeded random weights.

use crate::lattice::{GridDims, Lattice};
use crate::pgm::GrayImage;
use crate::rng::SplitMix64;

/// Each edge costs the absolute brightness difference of the two pixels it
/// joins. Raw intensities, no normalization; flat regions cost zero.
pub fn image_to_costs(img: &GrayImage) -> Lattice {
    Lattice::from_fn(
        img.dims(),
        |i, j| f64::from(img.get(i + 1, j).abs_diff(img.get(i, j))),
        |i, j| f64::from(img.get(i, j + 1).abs_diff(img.get(i, j))),
    )
    .expect("image gradients are finite and non-negative")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Distribution {
    /// Uniform on `[0, 1)`.
    #[default]
    UniformUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngSpec {
    pub seed: u64,
    pub distribution: Distribution,
}

impl RngSpec {
    pub fn uniform(seed: u64) -> Self {
        Self {
            seed,
            distribution: Distribution::UniformUnit,
        }
    }
}

/// Draws the `(H-1) x W` vertical costs, then the `H x (W-1)` horizontal
/// costs, each in row-major order, from one SplitMix64 stream.
pub fn random_lattice(dims: GridDims, rng: RngSpec) -> Lattice {
    let mut gen = SplitMix64::new(rng.seed);
    let Distribution::UniformUnit = rng.distribution;
    let v: Vec<f64> = (0..(dims.height - 1) * dims.width).map(|_| gen.next_f64()).collect();
    let h: Vec<f64> = (0..dims.height * (dims.width - 1)).map(|_| gen.next_f64()).collect();
    Lattice::new(dims, &v, &h).expect("uniform draws are valid costs")
}
