//! `anydijkstra`: solve, compare, trace, path and bench on 4-connected lattices.
//!
//! Coordinates are 0-based `R,C` (row, column). Exit codes: 0 ok, 1 mismatch
//! against the exact oracle, 2 usage or input error, 3 stopped at
//! `--max-iters` before convergence, 4 target unreachable.

mod input;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anydijkstra::analysis::{
    convergence_trace_with, distance_image, error_vs_oracle, extract_path, ErrorReport, TraceEntry,
};
use anydijkstra::costs::{random_lattice, RngSpec};
use anydijkstra::oracle::dijkstra_reference;
use anydijkstra::pgm::write_pgm;
use anydijkstra::raster::{encode_distances, encode_predecessors};
use anydijkstra::{Error, GridDims, Lattice, NodeCoord, SolveResult, Solver, SolverOptions};
use clap::{Args, Parser, Subcommand};

use input::{parse_coord, LatticeArgs};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_ANYTIME: u8 = 3;
const EXIT_UNREACHABLE: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "anydijkstra",
    version,
    about = "Anytime sweep shortest paths on 4-connected lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve from one source and write the distance field.
    Solve(SolveArgs),
    /// Solve and compare against heap Dijkstra; exit 1 on any mismatch.
    Compare(CompareArgs),
    /// Per-iteration error against heap Dijkstra as CSV.
    Trace(TraceArgs),
    /// Print the path from the source to a target.
    Path(PathArgs),
    /// Time the sweep solver against heap Dijkstra on random lattices.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    lattice: LatticeArgs,
    /// Source node, 0-based.
    #[arg(long, value_name = "R,C", value_parser = parse_coord)]
    source: NodeCoord,
    /// Stop after this many iterations even if not converged.
    #[arg(long, value_name = "N")]
    max_iters: Option<usize>,
    /// Worker threads; all cores when omitted.
    #[arg(long, value_name = "T")]
    threads: Option<usize>,
}

impl RunArgs {
    fn solver(&self) -> Result<Solver, Failure> {
        let options = SolverOptions {
            threads: self.threads,
            max_iterations: self.max_iters,
            ..SolverOptions::default()
        };
        Ok(Solver::new(options)?)
    }

    fn load(&self) -> Result<Lattice, Failure> {
        let lattice = self.lattice.load().map_err(Failure::usage)?;
        check_in_bounds(self.source, lattice.dims())?;
        Ok(lattice)
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Distance raster output (ANYDIST1).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Predecessor raster output (ANYPRED1).
    #[arg(long, value_name = "FILE")]
    pred: Option<PathBuf>,
    /// Per-iteration error CSV; runs heap Dijkstra as the reference.
    #[arg(long, value_name = "CSV")]
    trace: Option<PathBuf>,
    /// 16-bit PGM of the distances, min-max normalized.
    #[arg(long, value_name = "PGM")]
    viz: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct TraceArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_name = "CSV")]
    out_csv: PathBuf,
    /// Writes `iter_NNNN.anyd` after every iteration.
    #[arg(long, value_name = "DIR")]
    snapshots_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PathArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_name = "R,C", value_parser = parse_coord)]
    target: NodeCoord,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Square lattice sides.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    seeds: Vec<u64>,
    /// Worker counts for the sweep solver; 0 means all cores.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    threads: Vec<usize>,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    repeats: u32,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Unreachable(_) => EXIT_UNREACHABLE,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn check_in_bounds(c: NodeCoord, dims: GridDims) -> Result<(), Failure> {
    if dims.contains(c) {
        Ok(())
    } else {
        Err(Error::OutOfBounds { coord: c, dims }.into())
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn anytime_code(result: &SolveResult) -> u8 {
    if result.converged {
        0
    } else {
        EXIT_ANYTIME
    }
}

fn trace_csv(trace: &[TraceEntry]) -> String {
    let mut csv = String::from("iteration,updates,l1,linf,mismatched,wall_ms\n");
    for t in trace {
        let e = &t.error;
        writeln!(
            csv,
            "{},{},{},{},{},{:.3}",
            t.iteration,
            t.updates,
            e.l1,
            e.linf,
            e.mismatched,
            ms(t.wall_time)
        )
        .unwrap();
    }
    csv
}

fn report_line(r: &ErrorReport) -> String {
    format!("l1={} linf={} mismatched={}", r.l1, r.linf, r.mismatched)
}

fn cmd_solve(args: &SolveArgs) -> Result<u8, Failure> {
    let lattice = args.run.load()?;
    let solver = args.run.solver()?;
    let source = args.run.source;
    let result = match &args.trace {
        Some(path) => {
            let exact = dijkstra_reference(&lattice, source)?;
            let (trace, result) = convergence_trace_with(&solver, &lattice, source, &exact, |_, _| {})?;
            write_file(path, trace_csv(&trace).as_bytes())?;
            result
        }
        None => solver.solve(&lattice, source, None)?,
    };
    if let Some(path) = &args.out {
        write_file(path, &encode_distances(&result.bed))?;
    }
    if let Some(path) = &args.pred {
        write_file(path, &encode_predecessors(&result.pred))?;
    }
    if let Some(path) = &args.viz {
        write_file(path, &write_pgm(&distance_image(&result.bed, u16::MAX), true))?;
    }
    println!(
        "converged={} K={} updates_total={} wall_ms={:.3}",
        result.converged,
        result.k_iterations,
        result.total_updates(),
        ms(result.wall_time())
    );
    Ok(anytime_code(&result))
}

fn cmd_compare(args: &CompareArgs) -> Result<u8, Failure> {
    let lattice = args.run.load()?;
    let result = args.run.solver()?.solve(&lattice, args.run.source, None)?;
    let exact = dijkstra_reference(&lattice, args.run.source)?;
    let report = error_vs_oracle(&result.bed, &exact)?;
    println!(
        "{} K={} converged={}",
        report_line(&report),
        result.k_iterations,
        result.converged
    );
    Ok(if report.mismatched == 0 { 0 } else { EXIT_MISMATCH })
}

fn cmd_trace(args: &TraceArgs) -> Result<u8, Failure> {
    let lattice = args.run.load()?;
    let solver = args.run.solver()?;
    if let Some(dir) = &args.snapshots_dir {
        std::fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
    }
    let exact = dijkstra_reference(&lattice, args.run.source)?;
    let mut write_error = None;
    let (trace, result) = convergence_trace_with(&solver, &lattice, args.run.source, &exact, |entry, view| {
        if let (Some(dir), None) = (&args.snapshots_dir, &write_error) {
            let path = dir.join(format!("iter_{:04}.anyd", entry.iteration));
            write_error = write_file(&path, &encode_distances(&view.to_grid())).err();
        }
    })?;
    if let Some(e) = write_error {
        return Err(e);
    }
    write_file(&args.out_csv, trace_csv(&trace).as_bytes())?;
    let last = trace.last().map(|t| report_line(&t.error)).unwrap_or_default();
    println!("iterations={} converged={} {last}", trace.len(), result.converged);
    Ok(anytime_code(&result))
}

fn cmd_path(args: &PathArgs) -> Result<u8, Failure> {
    let lattice = args.run.load()?;
    check_in_bounds(args.target, lattice.dims())?;
    let result = args.run.solver()?.solve(&lattice, args.run.source, None)?;
    let path = extract_path(&result, args.run.source, args.target, &lattice)?;
    let mut out = format!("cost={} turns={}\n", path.cost, path.turns);
    for n in &path.nodes {
        writeln!(out, "{},{}", n.row, n.col).unwrap();
    }
    print!("{out}");
    Ok(anytime_code(&result))
}

fn median(mut samples: Vec<Duration>) -> Duration {
    samples.sort();
    let n = samples.len();
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        (samples[n / 2 - 1] + samples[n / 2]) / 2
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<u8, Failure> {
    println!("size,seed,threads,algo,k_iterations,wall_ms");
    for &size in &args.sizes {
        let dims = GridDims::new(size, size)?;
        for &seed in &args.seeds {
            let lattice = random_lattice(dims, RngSpec::uniform(seed));
            let source = NodeCoord::new(0, 0);
            for &threads in &args.threads {
                let solver = Solver::new(SolverOptions::default().with_threads(threads))?;
                let mut k = 0;
                let mut walls = Vec::new();
                for _ in 0..args.repeats {
                    let r = solver.solve(&lattice, source, None)?;
                    k = r.k_iterations;
                    walls.push(r.wall_time());
                }
                println!("{size},{seed},{threads},sweep,{k},{:.3}", ms(median(walls)));
            }
            let walls = (0..args.repeats)
                .map(|_| {
                    let start = Instant::now();
                    dijkstra_reference(&lattice, source).map(|_| start.elapsed())
                })
                .collect::<Result<Vec<_>, _>>()?;
            println!("{size},{seed},1,heap,,{:.3}", ms(median(walls)));
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Trace(a) => cmd_trace(a),
        Command::Path(a) => cmd_path(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
