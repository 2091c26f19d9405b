//! Command-line surface: argument parsing and the three subcommands.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fastkde::bench::bench_sweep;
use fastkde::{BandwidthMatrix, EstimateConfig, Method, Prepared, SampleMatrix, DEFAULT_TAU};
use ndarray::Array2;

use crate::bandwidth::rule_of_thumb_bandwidth;
use crate::datasets::Dataset;
use crate::error::Failure;
use crate::io::{
    density_to_csv, density_to_json, load_bandwidth_file, load_samples, parse_bandwidth, Delimiter, DensityRecord,
};

/// Relative discrepancy at which two methods are considered to agree.
pub const AGREEMENT_GATE: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "fastkde", version, about = "Binned multivariate kernel density estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one method on a grid and write the density.
    Estimate(EstimateArgs),
    /// Evaluate two methods on the same grid and report their discrepancy.
    Compare(CompareArgs),
    /// Time methods across a sweep of grid sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BandwidthRule {
    /// `n^{-2/(d+4)}` times the sample covariance.
    NormalScale,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Sample file (delimited numeric rows, optional header).
    #[arg(value_name = "FILE")]
    pub input_pos: Option<PathBuf>,
    /// Sample file; alternative to the positional argument.
    #[arg(long, conflicts_with = "input_pos")]
    pub input: Option<PathBuf>,
    /// Field delimiter for the sample file; auto-detected when omitted.
    #[arg(long)]
    pub delimiter: Option<char>,
    /// Bundled synthetic dataset used when no input file is given.
    #[arg(long, default_value = "bimodal")]
    pub dataset: Dataset,
    /// Seed for the synthetic dataset.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Size of the synthetic dataset.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Inline bandwidth matrix, rows separated by `;` (e.g. "1,0.8;0.8,1").
    #[arg(long, group = "bw", allow_hyphen_values = true)]
    pub bandwidth: Option<String>,
    /// File holding d rows of d numbers.
    #[arg(long, group = "bw")]
    pub bandwidth_file: Option<PathBuf>,
    /// Bandwidth selection rule; the default when no matrix is given.
    #[arg(long, group = "bw", value_enum)]
    pub bandwidth_rule: Option<BandwidthRule>,
    /// Grid nodes per dimension; a single value applies to every dimension.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub grid: Option<Vec<i64>>,
    /// Effective-support factor.
    #[arg(long, default_value_t = DEFAULT_TAU, allow_hyphen_values = true)]
    pub tau: f64,
    /// Per-dimension widening of the data range (default tau·sqrt(H_kk)).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub extension: Option<Vec<f64>>,
    /// Use the full kernel support L_k = M_k − 1 instead of truncating.
    #[arg(long)]
    pub full_support: bool,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value = "fft-corrected")]
    pub method: Method,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output path; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: Common,
    /// Exactly two methods: candidate,reference.
    #[arg(long, value_delimiter = ',', default_value = "fft-corrected,binned-direct")]
    pub methods: Vec<Method>,
    /// Write the report as JSON to this path as well.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_delimiter = ',', default_value = "binned-direct,fft-wand,fft-corrected")]
    pub methods: Vec<Method>,
    /// Nodes per dimension for each sweep step (square grids).
    #[arg(long, value_delimiter = ',', default_value = "32,64,128")]
    pub sweep: Vec<usize>,
    /// Timed repetitions per method; the fastest is reported.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
}

/// Everything a subcommand needs after input, bandwidth and grid resolution.
pub struct Resolved {
    pub data: SampleMatrix<f64>,
    pub h: BandwidthMatrix<f64>,
    pub config: EstimateConfig<f64>,
}

impl Common {
    pub fn resolve(&self) -> Result<Resolved, Failure> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Failure::config("parse-config", format!("tau must be positive, got {}", self.tau)));
        }
        let data = match self.input.as_ref().or(self.input_pos.as_ref()) {
            Some(path) => {
                let delimiter = self.delimiter.map_or(Delimiter::Auto, Delimiter::Char);
                load_samples(path, delimiter).map_err(|e| Failure::input("load-input", e))?
            }
            None => {
                if self.n == 0 {
                    return Err(Failure::config("parse-config", "--n must be at least 1"));
                }
                self.dataset.generate(self.n, self.seed)
            }
        };
        let d = data.dim();

        let h = if let Some(spec) = &self.bandwidth {
            let m = parse_bandwidth(spec).map_err(|e| Failure::config("bandwidth", e))?;
            spd(m)?
        } else if let Some(path) = &self.bandwidth_file {
            let m = load_bandwidth_file(path).map_err(|e| Failure::config("bandwidth", e))?;
            spd(m)?
        } else {
            rule_of_thumb_bandwidth(&data).map_err(|e| Failure::input("bandwidth", e))?
        };
        if h.dim() != d {
            return Err(Failure::config(
                "bandwidth",
                format!("bandwidth is {0}x{0} but the data have {d} columns", h.dim()),
            ));
        }

        let sizes = grid_sizes(self.grid.as_deref(), d)?;
        let extension = match &self.extension {
            Some(ext) if ext.len() == 1 => Some(vec![ext[0]; d]),
            Some(ext) if ext.len() == d => Some(ext.clone()),
            Some(ext) => {
                return Err(Failure::config(
                    "parse-config",
                    format!("--extension has {} values for {d} dimensions", ext.len()),
                ))
            }
            None => None,
        };
        let config = EstimateConfig {
            sizes,
            tau: self.tau,
            extension,
            full_support: self.full_support,
        };
        Ok(Resolved { data, h, config })
    }
}

fn spd(m: Array2<f64>) -> Result<BandwidthMatrix<f64>, Failure> {
    BandwidthMatrix::new(m.view()).map_err(|e| Failure::from_kde("bandwidth", e))
}

fn grid_sizes(grid: Option<&[i64]>, d: usize) -> Result<Vec<usize>, Failure> {
    let raw = match grid {
        None => vec![64; d],
        Some([m]) => vec![*m; d],
        Some(g) if g.len() == d => g.to_vec(),
        Some(g) => {
            return Err(Failure::config(
                "parse-config",
                format!("--grid has {} values for {d} dimensions", g.len()),
            ))
        }
    };
    raw.iter()
        .enumerate()
        .map(|(k, &m)| {
            if m < 2 {
                Err(Failure::config(
                    "grid",
                    format!("grid size {m} in dimension {k} is below 2"),
                ))
            } else {
                Ok(m as usize)
            }
        })
        .collect()
}

/// Discrepancy between two methods evaluated on the same prepared grid.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CompareReport {
    pub candidate: String,
    pub reference: String,
    pub sizes: Vec<usize>,
    pub support: Vec<usize>,
    pub max_abs: f64,
    pub reference_max: f64,
    pub relative_max: f64,
    pub gate: f64,
    pub within_gate: bool,
}

pub fn compare(resolved: &Resolved, candidate: Method, reference: Method) -> Result<CompareReport, Failure> {
    let Resolved { data, h, config } = resolved;
    let prepared = Prepared::new(data, h, config).map_err(|e| Failure::from_kde("grid", e))?;
    let a = prepared.run(candidate, data, h).map_err(|e| Failure::from_kde("estimate", e))?;
    let b = prepared.run(reference, data, h).map_err(|e| Failure::from_kde("estimate", e))?;
    let max_abs = a.max_abs_diff(&b).map_err(|e| Failure::from_kde("compare", e))?;
    let reference_max = b.max_value();
    let relative_max = if reference_max > 0.0 { max_abs / reference_max } else { max_abs };
    Ok(CompareReport {
        candidate: candidate.name().into(),
        reference: reference.name().into(),
        sizes: config.sizes.clone(),
        support: prepared.kernel.support().to_vec(),
        max_abs,
        reference_max,
        relative_max,
        gate: AGREEMENT_GATE,
        within_gate: relative_max <= AGREEMENT_GATE,
    })
}

impl CompareReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "candidate     {}", self.candidate).unwrap();
        writeln!(s, "reference     {}", self.reference).unwrap();
        writeln!(s, "grid          {:?}  support {:?}", self.sizes, self.support).unwrap();
        writeln!(s, "max_abs       {:.6e}", self.max_abs).unwrap();
        writeln!(s, "reference_max {:.6e}", self.reference_max).unwrap();
        writeln!(s, "relative_max  {:.6e}", self.relative_max).unwrap();
        let verdict = if self.within_gate { "agree" } else { "DIFFER" };
        writeln!(s, "verdict       {verdict} (gate {:.0e})", self.gate).unwrap();
        s
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::input("write-output", format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Estimate(args) => {
            let resolved = args.common.resolve()?;
            let Resolved { data, h, config } = &resolved;
            let prepared = Prepared::new(data, h, config).map_err(|e| Failure::from_kde("grid", e))?;
            let density = prepared
                .run(args.method, data, h)
                .map_err(|e| Failure::from_kde("estimate", e))?;
            let text = match args.format {
                Format::Json => density_to_json(&DensityRecord::new(&density, config.tau, h.entries(), data.n())),
                Format::Csv => density_to_csv(&density),
            };
            write_output(args.output.as_ref(), &text)
        }
        Command::Compare(args) => {
            let [candidate, reference] = args.methods[..] else {
                return Err(Failure::config(
                    "parse-config",
                    format!("--methods needs exactly two methods, got {}", args.methods.len()),
                ));
            };
            let report = compare(&args.common.resolve()?, candidate, reference)?;
            print!("{}", report.to_text());
            if let Some(path) = &args.output {
                let json = serde_json::to_string_pretty(&report).expect("report is plain data");
                write_output(Some(path), &(json + "\n"))?;
            }
            Ok(())
        }
        Command::Bench(args) => {
            let resolved = args.common.resolve()?;
            let d = resolved.data.dim();
            if args.sweep.iter().any(|&m| m < 2) {
                return Err(Failure::config("grid", "every --sweep size must be at least 2"));
            }
            let sizes: Vec<Vec<usize>> = args.sweep.iter().map(|&m| vec![m; d]).collect();
            let rows = bench_sweep(
                &resolved.data,
                &resolved.h,
                &resolved.config,
                &sizes,
                &args.methods,
                args.repeats,
            )
            .map_err(|e| Failure::from_kde("bench", e))?;
            println!("{:<16} {:<16} {:<14} {:>12}", "grid", "support", "method", "seconds");
            for row in rows {
                println!(
                    "{:<16} {:<16} {:<14} {:>12.6}",
                    format!("{:?}", row.sizes),
                    format!("{:?}", row.support),
                    row.method.name(),
                    row.elapsed.as_secs_f64()
                );
            }
            Ok(())
        }
    }
}
