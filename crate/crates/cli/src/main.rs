//! `smrt`: phantoms, forward data, range checks and reconstructions from the
//! command line. Every output file records the producing command and config.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use smrt_core::forward::forward_transform;
use smrt_core::grid::CenterGrid;
use smrt_core::invert::{compare_fields, series_inversion, time_reversal, SeriesOptions, TimeReversalOptions};
use smrt_core::io::{
    boundary_from_file, boundary_to_file, field_from_file, field_to_csv, field_to_file, parse_phantom,
    phantom_to_string, read_file, report_to_file, write_file, Provenance, RunConfig, SmrtFile, PHANTOM_MAGIC,
};
use smrt_core::phantom::{preset, project_to_harmonics_with, random_phantom, Phantom, PolarField, PRESETS};
use smrt_core::range::{
    harmonic_decompose, perturb_at_zero, perturb_bump, range_report, synthesize_boundary, HarmonicSpectrum,
};
use smrt_core::selftest::{format_table, selftest};

/// Exit status of `check` when any condition fails.
const EXIT_OUT_OF_RANGE: u8 = 2;

/// Exit status for malformed input or failed runs.
const EXIT_ERROR: u8 = 1;

/// Bumps drawn by `phantom --random` when no count is given.
const DEFAULT_RANDOM_BUMPS: usize = 4;

/// Points per side of the CSV resampling.
const CSV_SIDE: usize = 201;

#[derive(Parser, Debug)]
#[command(name = "smrt", version, about = "Spherical mean transform with centers on the unit sphere")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalArgs {
    /// Run configuration file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Spatial dimension, 2 or 3.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Largest harmonic degree.
    #[arg(long, global = true)]
    mmax: Option<usize>,
    /// Largest moment order.
    #[arg(long, global = true)]
    kmax: Option<usize>,
    /// Bessel zeros per order.
    #[arg(long, global = true)]
    zeros: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Writes a phantom file from a preset or a seeded random draw.
    Phantom {
        /// Preset name (three-bumps, radial, off-center).
        #[arg(long, conflicts_with = "random")]
        preset: Option<String>,
        /// Number of random bumps, drawn with the config seed.
        #[arg(long)]
        random: Option<usize>,
        /// Output phantom file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Samples the spherical mean transform of a phantom on the center grid.
    Forward {
        /// Phantom file.
        phantom: PathBuf,
        /// Adds a perturbation to one channel: `bump:m=..,l=..,amp=..,t0=..,width=..`
        /// or `zero:m=..,l=..,j=..,amp=..`.
        #[arg(long)]
        perturb: Option<String>,
        /// Output boundary data file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluates the range conditions; exits 0 when all pass and 2 otherwise.
    Check {
        /// Boundary data file.
        boundary: PathBuf,
        /// Also writes the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstructs the harmonic coefficients of the source.
    Invert {
        /// Boundary data file.
        boundary: PathBuf,
        /// Reconstruction method.
        #[arg(long, value_enum, default_value_t = Method::Series)]
        method: Method,
        /// Output field file.
        #[arg(long)]
        out: PathBuf,
        /// Also writes an `x,y,value` resampling of the result.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Compares two fields; either may be a phantom file, projected onto the other's grid.
    Compare {
        /// Field or phantom file.
        a: PathBuf,
        /// Field or phantom file.
        b: PathBuf,
    },
    /// Runs the invariant suite and prints a conformance table.
    Selftest,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Method {
    Series,
    Timereversal,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command_line = std::iter::once("smrt".to_string()).chain(std::env::args().skip(1)).collect::<Vec<_>>().join(" ");
    match run(cli, &command_line) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn load_config(g: &GlobalArgs, file_dim: Option<usize>) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            RunConfig::parse(&text).with_context(|| format!("config {}", p.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(d) = file_dim.or(g.dim) {
        cfg.dim = d;
    }
    if let Some(m) = g.mmax {
        cfg.m_max = m;
    }
    if let Some(k) = g.kmax {
        cfg.k_max = k;
    }
    if let Some(z) = g.zeros {
        cfg.zeros = z;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn provenance(cfg: &RunConfig, command_line: &str) -> Provenance {
    Provenance { command: command_line.to_string(), config_hash: cfg.hash(), config: cfg.entries() }
}

fn read_smrt(path: &Path) -> Result<SmrtFile> {
    read_file(path).with_context(|| format!("reading {}", path.display()))
}

fn read_phantom(path: &Path) -> Result<Phantom> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_phantom(&text).with_context(|| format!("phantom file {}", path.display()))
}

fn run(cli: Cli, command_line: &str) -> Result<u8> {
    let g = &cli.global;
    match cli.command {
        Command::Phantom { preset: name, random, out } => {
            let cfg = load_config(g, None)?;
            let ph = match (name, random) {
                (Some(name), _) => preset(&name, cfg.dim)?,
                (None, Some(k)) => random_phantom(cfg.dim, k, cfg.seed)?,
                (None, None) => random_phantom(cfg.dim, DEFAULT_RANDOM_BUMPS, cfg.seed)?,
            };
            std::fs::write(&out, phantom_to_string(&ph)).with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {} ({} bumps, dim {}; presets: {})", out.display(), ph.bumps.len(), ph.n, PRESETS.join(", "));
            Ok(0)
        }
        Command::Forward { phantom, perturb, out } => {
            let ph = read_phantom(&phantom)?;
            let cfg = load_config(g, Some(ph.n))?;
            let centers = match ph.n {
                2 => CenterGrid::circle(cfg.n_theta)?,
                _ => CenterGrid::sphere(cfg.n_polar, cfg.n_az)?,
            };
            let mut data = forward_transform(&ph, &centers, cfg.t_grid()?)?;
            if let Some(spec) = perturb {
                let base = harmonic_decompose(&data, cfg.m_max)?;
                let mut delta = base.scaled(0.0);
                apply_perturbation(&mut delta, &spec)?;
                let extra = synthesize_boundary(&delta, &data.centers)?;
                data.values.iter_mut().zip(&extra.values).for_each(|(a, b)| *a += b);
            }
            write_file(&out, &boundary_to_file(&data, &provenance(&cfg, command_line)))?;
            println!("wrote {} ({} centers × {} times)", out.display(), data.centers.len(), data.t_grid.len);
            Ok(0)
        }
        Command::Check { boundary, out } => {
            let file = read_smrt(&boundary)?;
            let data = boundary_from_file(&file).with_context(|| format!("boundary file {}", boundary.display()))?;
            let cfg = load_config(g, Some(data.n))?;
            let report = range_report(&data, &cfg.range_config())?;
            print!("{}", report.to_table());
            if let Some(out) = out {
                write_file(&out, &report_to_file(&report, &provenance(&cfg, command_line)))?;
            }
            Ok(if report.all_pass() { 0 } else { EXIT_OUT_OF_RANGE })
        }
        Command::Invert { boundary, method, out, csv } => {
            let file = read_smrt(&boundary)?;
            let data = boundary_from_file(&file).with_context(|| format!("boundary file {}", boundary.display()))?;
            let cfg = load_config(g, Some(data.n))?;
            let spec = harmonic_decompose(&data, cfg.m_max)?;
            let field = match method {
                Method::Series => {
                    let mut opts = SeriesOptions::new(cfg.n_r)?;
                    opts.panel_nodes = cfg.panel_nodes;
                    opts.panel_width = cfg.panel_width;
                    let (field, diag) = series_inversion(&spec, &opts)?;
                    if !diag.flagged.is_empty() {
                        let list: Vec<String> = diag.flagged.iter().map(|(m, l)| format!("m={m} l={l}")).collect();
                        eprintln!("warning: denominator floor reached in {}", list.join(", "));
                    }
                    field
                }
                Method::Timereversal => {
                    let opts = TimeReversalOptions { h_r: cfg.h_r, h_t: cfg.h_t, epsilon: cfg.epsilon };
                    time_reversal(&spec, opts)?.0
                }
            };
            write_file(&out, &field_to_file(&field, &provenance(&cfg, command_line)))?;
            if let Some(csv) = csv {
                std::fs::write(&csv, field_to_csv(&field, CSV_SIDE))
                    .with_context(|| format!("writing {}", csv.display()))?;
            }
            println!("wrote {} (m_max {}, {} radii)", out.display(), field.m_max, field.r_grid.len);
            Ok(0)
        }
        Command::Compare { a, b } => {
            let (fa, fb) = load_pair(&a, &b)?;
            let c = compare_fields(&fa, &fb)?;
            println!("{:<14} {:>12}", "metric", "value");
            println!("{:<14} {:>12.4e}", "relative_l2", c.relative_l2);
            println!("{:<14} {:>12.4e}", "relative_linf", c.relative_linf);
            for (m, l, d) in c.channels.iter().filter(|(_, _, d)| *d > 0.0) {
                println!("{:<14} {:>12.4e}", format!("channel {m},{l}"), d);
            }
            Ok(0)
        }
        Command::Selftest => {
            let rows = selftest()?;
            print!("{}", format_table(&rows));
            Ok(if rows.iter().all(|r| r.pass()) { 0 } else { EXIT_OUT_OF_RANGE })
        }
    }
}

fn is_phantom_file(path: &Path) -> Result<bool> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.lines().next().is_some_and(|l| l.trim() == PHANTOM_MAGIC))
}

fn read_field(path: &Path) -> Result<PolarField> {
    field_from_file(&read_smrt(path)?).with_context(|| format!("field file {}", path.display()))
}

/// Loads two fields; a phantom file is projected onto the other field's grid.
fn load_pair(a: &Path, b: &Path) -> Result<(PolarField, PolarField)> {
    let project = |ph: &Phantom, like: &PolarField| -> Result<PolarField> {
        let quad = smrt_core::phantom::default_projection_grid(ph.n, like.m_max)?;
        Ok(project_to_harmonics_with(ph, like.m_max, like.r_grid, &quad)?)
    };
    match (is_phantom_file(a)?, is_phantom_file(b)?) {
        (false, false) => Ok((read_field(a)?, read_field(b)?)),
        (true, false) => {
            let fb = read_field(b)?;
            Ok((project(&read_phantom(a)?, &fb)?, fb))
        }
        (false, true) => {
            let fa = read_field(a)?;
            let fb = project(&read_phantom(b)?, &fa)?;
            Ok((fa, fb))
        }
        (true, true) => bail!("at least one of the compared files must be a field"),
    }
}

/// Parses `kind:key=value,...` and adds the perturbation to `spec`.
fn apply_perturbation(spec: &mut HarmonicSpectrum, text: &str) -> Result<()> {
    let (kind, rest) = text.split_once(':').context("perturbation must look like `kind:key=value,...`")?;
    let mut fields = std::collections::BTreeMap::new();
    for part in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = part.split_once('=').with_context(|| format!("perturbation field `{part}` lacks `=`"))?;
        let v: f64 = v.trim().parse().with_context(|| format!("perturbation field `{k}`: bad number `{v}`"))?;
        fields.insert(k.trim().to_string(), v);
    }
    let get = |k: &str| fields.get(k).copied().with_context(|| format!("perturbation needs `{k}`"));
    let index = |k: &str| -> Result<usize> {
        let v = get(k)?;
        if v < 0.0 || v.fract() != 0.0 {
            bail!("perturbation field `{k}` must be a non-negative integer");
        }
        Ok(v as usize)
    };
    let allowed: &[&str] = match kind {
        "bump" => &["m", "l", "amp", "t0", "width"],
        "zero" => &["m", "l", "j", "amp"],
        other => bail!("unknown perturbation kind `{other}` (expected bump or zero)"),
    };
    if let Some(k) = fields.keys().find(|k| !allowed.contains(&k.as_str())) {
        bail!("unknown perturbation field `{k}`");
    }
    match kind {
        "bump" => perturb_bump(spec, index("m")?, index("l")?, get("amp")?, get("t0")?, get("width")?)?,
        _ => {
            perturb_at_zero(spec, index("m")?, index("l")?, index("j")?, get("amp")?)?;
        }
    }
    Ok(())
}
