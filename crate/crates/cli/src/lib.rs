//! The `sgrow` command line, callable in-process.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sgrow::baselines::{ff_generate, spa_generate, FFConfig, SPAConfig};
use sgrow::io::{read_dataset, write_records, write_stream, ReadOptions};
use sgrow::report::{analyze_stream, burst_histogram, read_report_csv};
use sgrow::sgrow::{Generator, SGrowConfig, SlideMode};
use sgrow::StreamLog;

const CHECKPOINT_EVERY: usize = 100_000;

/// Streaming bipartite graph generation and butterfly analytics.
#[derive(Debug, Parser)]
#[command(name = "sgrow", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a stream.
    #[command(subcommand)]
    Generate(Generate),
    /// Per-snapshot butterfly and strength-mixing report as CSV.
    Analyze(AnalyzeArgs),
    /// Frequency of each burst size, largest first.
    BurstStats(BurstStatsArgs),
}

#[derive(Debug, Subcommand)]
enum Generate {
    /// sGrow streaming growth model.
    Sgrow(SgrowArgs),
    /// One-level Forest Fire baseline.
    Ff(FfArgs),
    /// Strength-preferential attachment baseline.
    Spa(SpaArgs),
}

#[derive(Debug, Args)]
struct SgrowArgs {
    /// Initial graph G0 as an edge-list stream.
    #[arg(long)]
    g0: PathBuf,
    /// Use only the first N records of the G0 file.
    #[arg(long, value_name = "N")]
    g0_prefix: Option<usize>,
    #[arg(long, default_value_t = 0.3)]
    rho: f64,
    /// Exclusive bound on new edges per step.
    #[arg(long = "M", default_value_t = 50)]
    max_batch: u32,
    #[arg(long, default_value_t = 5)]
    beta: u64,
    #[arg(long, default_value_t = 1)]
    lmin: u32,
    #[arg(long, default_value_t = 2)]
    lmax: u32,
    /// Stream length, G0 included.
    #[arg(long)]
    target: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "literal")]
    slide_mode: SlideArg,
    /// Disable neighbor copying in burst addition.
    #[arg(long)]
    no_copy_step: bool,
    /// Switch to the parameters in --switch-config once the stream reaches N records.
    #[arg(long, value_name = "N", requires = "switch_config")]
    switch_at: Option<usize>,
    /// TOML file overriding any of rho, M, beta, l_min, l_max, copy_step, slide_mode.
    #[arg(long, value_name = "FILE", requires = "switch_at")]
    switch_config: Option<PathBuf>,
    /// Output path; `.gz` compresses. Standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum SlideArg {
    Literal,
    Textual,
}

impl From<SlideArg> for SlideMode {
    fn from(s: SlideArg) -> Self {
        match s {
            SlideArg::Literal => SlideMode::Literal,
            SlideArg::Textual => SlideMode::Textual,
        }
    }
}

#[derive(Debug, Args)]
struct FfArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    pb: f64,
    #[arg(long)]
    steps: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SpaArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    steps: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    file: PathBuf,
    /// Number of evenly spaced snapshots.
    #[arg(long, default_value_t = 20)]
    k: usize,
    /// Restrict the timeline to the first N bursts.
    #[arg(long, value_name = "N")]
    max_bursts: Option<usize>,
    /// Round fractional ratings and map 0 to 1.
    #[arg(long)]
    rescale: bool,
    /// Reference report; adds MAE of r_s and f1..f4.
    #[arg(long = "ref", value_name = "CSV")]
    reference: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BurstStatsArgs {
    file: PathBuf,
    #[arg(long)]
    rescale: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_stream(stream: &StreamLog, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => write_stream(stream, p)?,
        None => write_records(stream, BufWriter::new(io::stdout().lock()))?,
    }
    Ok(())
}

fn read_input(path: &Path, rescale: bool) -> Result<StreamLog> {
    let opts = ReadOptions {
        rescale,
        ..ReadOptions::default()
    };
    Ok(read_dataset(path, opts)?.stream)
}

/// Overlays the keys of a TOML table onto `base`.
fn switched_config(base: &SGrowConfig, path: &Path) -> Result<SGrowConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let overrides: toml::Table = text
        .parse()
        .with_context(|| format!("{}: invalid TOML", path.display()))?;
    for key in ["seed", "target"] {
        if overrides.contains_key(key) {
            bail!("{}: `{key}` cannot change mid-stream", path.display());
        }
    }
    let mut merged = toml::Table::try_from(base).context("serializing configuration")?;
    merged.extend(overrides);
    let cfg: SGrowConfig = merged
        .try_into()
        .with_context(|| format!("{}: invalid switch configuration", path.display()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn generate_sgrow(a: &SgrowArgs) -> Result<()> {
    let mut g0 = read_input(&a.g0, false)?;
    if let Some(n) = a.g0_prefix {
        g0 = g0.take_prefix(n)?;
    }
    let config = SGrowConfig {
        rho: a.rho,
        max_batch: a.max_batch,
        beta: a.beta,
        l_min: a.lmin,
        l_max: a.lmax,
        copy_step: !a.no_copy_step,
        target: a.target,
        seed: a.seed,
        slide_mode: a.slide_mode.into(),
    };
    let switch = match (&a.switch_at, &a.switch_config) {
        (Some(at), Some(path)) => Some((*at, switched_config(&config, path)?)),
        _ => None,
    };
    let mut gen = Generator::new(&g0, config)?;
    let start = Instant::now();
    let mut next_mark = CHECKPOINT_EVERY;
    let mut switch = switch;
    while gen.stream().len() < a.target {
        if let Some((at, _)) = &switch {
            if gen.stream().len() >= *at {
                let (_, cfg) = switch.take().expect("checked");
                log::info!("switching parameters at {} records", gen.stream().len());
                gen.set_config(cfg)?;
            }
        }
        gen.step()?;
        while gen.stream().len() >= next_mark && next_mark <= a.target {
            eprintln!("sgrs={next_mark} elapsed_s={:.3}", start.elapsed().as_secs_f64());
            next_mark += CHECKPOINT_EVERY;
        }
    }
    let mut stream = gen.into_stream();
    stream.truncate(a.target);
    eprintln!(
        "done sgrs={} elapsed_s={:.3}",
        stream.len(),
        start.elapsed().as_secs_f64()
    );
    emit_stream(&stream, a.out.as_deref())
}

fn generate_baseline(stream: impl FnOnce() -> sgrow::Result<StreamLog>, out: Option<&Path>) -> Result<()> {
    let start = Instant::now();
    let stream = stream()?;
    eprintln!(
        "done sgrs={} elapsed_s={:.3}",
        stream.len(),
        start.elapsed().as_secs_f64()
    );
    emit_stream(&stream, out)
}

fn analyze(a: &AnalyzeArgs) -> Result<()> {
    let stream = read_input(&a.file, a.rescale)?;
    let mut report = analyze_stream(&stream, a.k, a.max_bursts)?;
    if let Some(path) = &a.reference {
        let file = File::open(path).map_err(|e| sgrow::Error::Io {
            path: path.clone(),
            source: e,
        })?;
        let reference = read_report_csv(file)?;
        report.compare_to(&reference)?;
    }
    report.write_csv(open_out(a.out.as_deref())?)?;
    Ok(())
}

fn burst_stats(a: &BurstStatsArgs) -> Result<()> {
    let stream = read_input(&a.file, a.rescale)?;
    let mut w = csv::Writer::from_writer(open_out(a.out.as_deref())?);
    w.write_record(["size", "frequency"])?;
    for (size, freq) in burst_histogram(&stream) {
        w.write_record([size.to_string(), freq.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Command::Generate(Generate::Sgrow(a)) => generate_sgrow(&a),
        Command::Generate(Generate::Ff(a)) => {
            let cfg = FFConfig {
                p: a.p,
                p_b: a.pb,
                n_steps: a.steps,
                seed: a.seed,
            };
            generate_baseline(|| ff_generate(&cfg), a.out.as_deref())
        }
        Command::Generate(Generate::Spa(a)) => {
            let cfg = SPAConfig {
                m: a.m,
                n_steps: a.steps,
                seed: a.seed,
            };
            generate_baseline(|| spa_generate(&cfg), a.out.as_deref())
        }
        Command::Analyze(a) => analyze(&a),
        Command::BurstStats(a) => burst_stats(&a),
    }
}

/// 2 for environment failures, 1 for bad input or arguments.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<sgrow::Error>() {
            return if e.is_io() { 2 } else { 1 };
        }
        if cause.downcast_ref::<io::Error>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<csv::Error>() {
            return if e.is_io_error() { 2 } else { 1 };
        }
    }
    1
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn run_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toml_file(text: &str) -> tempfile::NamedTempFile {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), text).unwrap();
        f
    }

    #[test]
    fn switch_overlays_only_given_keys() {
        let base = SGrowConfig::preset("S-Ciao").unwrap();
        let f = toml_file("rho = 0.9\nslide_mode = \"textual\"\n");
        let cfg = switched_config(&base, f.path()).unwrap();
        assert_eq!(cfg.rho, 0.9);
        assert_eq!(cfg.slide_mode, SlideMode::Textual);
        assert_eq!(
            (cfg.max_batch, cfg.beta, cfg.seed),
            (base.max_batch, base.beta, base.seed)
        );
    }

    #[test]
    fn switch_rejects_fixed_and_unknown_keys() {
        let base = SGrowConfig::default();
        for text in ["seed = 3\n", "target = 10\n", "gamma = 1\n", "rho = 2.0\n", "rho = \n"] {
            assert!(switched_config(&base, toml_file(text).path()).is_err(), "{text}");
        }
    }

    #[test]
    fn exit_codes_follow_the_error_kind() {
        let io = anyhow::Error::new(io::Error::other("disk")).context("writing");
        assert_eq!(exit_code(&io), 2);
        assert_eq!(exit_code(&anyhow::anyhow!("bad flag")), 1);
        let parse = sgrow::io::parse_stream(&b"0 0 7 1\n"[..], ReadOptions::default()).unwrap_err();
        assert_eq!(exit_code(&anyhow::Error::new(parse)), 1);
    }
}
