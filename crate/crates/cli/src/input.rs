use std::path::{Path, PathBuf};

use anydijkstra::costs::{image_to_costs, random_lattice, RngSpec};
use anydijkstra::pgm::load_pgm;
use anydijkstra::{GridDims, Lattice, NodeCoord};
use clap::Args;

/// Where the lattice comes from. Exactly one source must be given.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false, id = "lattice")]
pub struct LatticeSource {
    /// Grayscale PGM (P2 or P5); edge cost = |brightness difference|.
    #[arg(long, value_name = "PGM")]
    pub input: Option<PathBuf>,
    /// Seeded random lattice with uniform [0, 1) costs, e.g. 100x100.
    #[arg(long, value_name = "HxW", value_parser = parse_dims, requires = "seed")]
    pub random: Option<GridDims>,
    /// Unit-cost lattice, e.g. 8x8.
    #[arg(long, value_name = "HxW", value_parser = parse_dims)]
    pub unit: Option<GridDims>,
    /// Plain-text cost file (see README).
    #[arg(long, value_name = "FILE")]
    pub costs: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct LatticeArgs {
    #[command(flatten)]
    pub source: LatticeSource,
    /// Seed for `--random`.
    #[arg(long, value_name = "S")]
    pub seed: Option<u64>,
}

impl LatticeArgs {
    pub fn load(&self) -> Result<Lattice, String> {
        let LatticeArgs { source: src, seed } = self;
        let LatticeSource {
            input,
            random,
            unit,
            costs,
        } = src;
        if let Some(path) = input {
            let bytes = read(path)?;
            let img = load_pgm(&bytes).map_err(|e| format!("{}: {e}", path.display()))?;
            Ok(image_to_costs(&img))
        } else if let Some(dims) = random {
            Ok(random_lattice(*dims, RngSpec::uniform(seed.unwrap_or_default())))
        } else if let Some(dims) = unit {
            Lattice::uniform(*dims, 1.0).map_err(|e| e.to_string())
        } else if let Some(path) = costs {
            let text = String::from_utf8(read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
            parse_costs(&text).map_err(|e| format!("{}: {e}", path.display()))
        } else {
            Err("no lattice source given".into())
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn parse_dims(s: &str) -> Result<GridDims, String> {
    let (h, w) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected HxW, got {s:?}"))?;
    let h = h.trim().parse().map_err(|_| format!("bad height in {s:?}"))?;
    let w = w.trim().parse().map_err(|_| format!("bad width in {s:?}"))?;
    GridDims::new(h, w).map_err(|e| e.to_string())
}

pub fn parse_coord(s: &str) -> Result<NodeCoord, String> {
    let (r, c) = s.split_once(',').ok_or_else(|| format!("expected R,C, got {s:?}"))?;
    let r = r.trim().parse().map_err(|_| format!("bad row in {s:?}"))?;
    let c = c.trim().parse().map_err(|_| format!("bad column in {s:?}"))?;
    Ok(NodeCoord::new(r, c))
}

/// `H W`, then `H-1` lines of `W` vertical costs, then `H` lines of `W-1`
/// horizontal costs. Blank lines and `#` comments are ignored.
pub fn parse_costs(text: &str) -> Result<Lattice, String> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let numbers = |(n, line): (usize, &str)| -> Result<Vec<f64>, String> {
        line.split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| format!("line {n}: bad number {t:?}")))
            .collect()
    };
    let (n, header) = lines.next().ok_or("empty cost file")?;
    let hw: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| format!("line {n}: bad dimension {t:?}")))
        .collect::<Result<_, String>>()?;
    let [h, w] = hw[..] else {
        return Err(format!("line {n}: expected `H W`"));
    };
    let dims = GridDims::new(h, w).map_err(|e| e.to_string())?;
    let mut take = |rows: usize, what: &str| -> Result<Vec<Vec<f64>>, String> {
        (0..rows)
            .map(|k| {
                lines
                    .next()
                    .ok_or_else(|| format!("missing {what} row {k}"))
                    .and_then(numbers)
            })
            .collect()
    };
    let v = take(h - 1, "vertical")?;
    // A single column has no horizontal edges, hence no rows to read.
    let hc = if w == 1 { Vec::new() } else { take(h, "horizontal")? };
    if let Some((n, _)) = lines.next() {
        return Err(format!("line {n}: trailing data"));
    }
    Lattice::from_rows(dims, &v, &hc).map_err(|e| e.to_string())
}
