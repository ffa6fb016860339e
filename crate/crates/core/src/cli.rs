//! The `wac` command line: `check`, `extract`, `infer` and `serve`.

use std::ffi::OsString;
use std::io::Write;
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use walkdir::WalkDir;

use crate::conformance::{render_json, render_text, sort_diagnostics, CheckConfig, Diagnostic, SymbolicSegmentPolicy};
use crate::inference::{emit_spec_text, infer_specs, parse_log, InferenceConfig};
use crate::pipeline::{check_source, extract_source, AnalysisOptions};
use crate::service::{serve, ServiceState};
use crate::spec_model::SpecDatabase;
use crate::string_flow::Limits;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "wac", version, about = "Check web API requests in JavaScript against API specifications")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExtractFormat {
    Json,
}

#[derive(Debug, clap::Args)]
pub struct AnalysisArgs {
    /// Let a trailing symbolic path segment stand for several segments.
    #[arg(long)]
    pub symbolic_multiseg: bool,
    /// Nested calls analyzed with their actual arguments.
    #[arg(long, value_name = "K", default_value_t = Limits::default().max_depth)]
    pub max_call_depth: usize,
}

impl AnalysisArgs {
    fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            limits: Limits {
                max_depth: self.max_call_depth,
                ..Limits::default()
            },
            check: CheckConfig {
                symbolic_segment_policy: if self.symbolic_multiseg {
                    SymbolicSegmentPolicy::MultiSegment
                } else {
                    SymbolicSegmentPolicy::OneSegmentNoSlash
                },
                ..CheckConfig::default()
            },
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the requests in JavaScript files against specifications.
    Check {
        /// Files or directories (searched for *.js).
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long, env = "WAC_SPEC_DIR")]
        spec_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Print the requests found in JavaScript files.
    Extract {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = ExtractFormat::Json)]
        format: ExtractFormat,
        #[arg(long, value_name = "K", default_value_t = Limits::default().max_depth)]
        max_call_depth: usize,
    },
    /// Infer one specification per host from a JSON Lines request log.
    Infer {
        #[arg(long)]
        log: PathBuf,
        /// Output directory.
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = InferenceConfig::default().collapse_threshold as u64,
              value_parser = clap::value_parser!(u64).range(2..))]
        collapse_threshold: u64,
    },
    /// Serve `POST /v1/check` and `GET /v1/health`.
    Serve {
        #[arg(long, default_value_t = 7878)]
        port: u16,
        #[arg(long, env = "WAC_SPEC_DIR")]
        spec_dir: PathBuf,
        /// Address to listen on. Anything but loopback exposes submitted code.
        #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
        bind: IpAddr,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
}

/// Expands directories into their `*.js` files. The result is sorted.
pub fn collect_sources(paths: &[PathBuf]) -> std::io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            for entry in WalkDir::new(p) {
                let entry = entry.map_err(std::io::Error::other)?;
                if entry.file_type().is_file() && entry.path().extension().is_some_and(|e| e == "js") {
                    out.push(entry.into_path());
                }
            }
        } else if p.is_file() {
            out.push(p.clone());
        } else {
            return Err(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("{}: no such file or directory", p.display()),
            ));
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn load_specs(dir: &Path, err: &mut dyn Write) -> Result<SpecDatabase, String> {
    let report = SpecDatabase::load_dir(dir).map_err(|e| format!("cannot read spec directory {}: {e}", dir.display()))?;
    for (path, msg) in &report.failures {
        let _ = writeln!(err, "warning: skipping spec {}: {msg}", path.display());
    }
    if report.database.is_empty() {
        return Err(format!("no loadable specifications in {}", dir.display()));
    }
    Ok(report.database)
}

fn read_sources(paths: &[PathBuf]) -> Result<Vec<(String, String)>, String> {
    let files = collect_sources(paths).map_err(|e| e.to_string())?;
    files
        .into_iter()
        .map(|f| {
            let text = std::fs::read_to_string(&f).map_err(|e| format!("{}: {e}", f.display()))?;
            Ok((f.display().to_string(), text))
        })
        .collect()
}

/// Runs the command line with explicit output streams and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILURE
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let io = |e: std::io::Error| e.to_string();
    match command {
        Command::Check {
            paths,
            spec_dir,
            format,
            analysis,
        } => {
            let db = load_specs(&spec_dir, err)?;
            let sources = read_sources(&paths)?;
            let opts = analysis.options();
            let mut diags: Vec<Diagnostic> = sources
                .iter()
                .flat_map(|(name, text)| check_source(text, name, &db, &opts))
                .collect();
            sort_diagnostics(&mut diags);
            let rendered = match format {
                Format::Text => render_text(&diags),
                Format::Json => render_json(&diags),
            };
            out.write_all(rendered.as_bytes()).map_err(io)?;
            Ok(if diags.iter().any(Diagnostic::is_error) { EXIT_FINDINGS } else { EXIT_OK })
        }
        Command::Extract {
            paths,
            format: ExtractFormat::Json,
            max_call_depth,
        } => {
            let sources = read_sources(&paths)?;
            let limits = Limits {
                max_depth: max_call_depth,
                ..Limits::default()
            };
            let mut records = Vec::new();
            for (name, text) in &sources {
                let report = extract_source(text, name, &limits);
                for w in &report.warnings {
                    writeln!(err, "{w}").map_err(io)?;
                }
                records.extend(report.requests.iter().map(|r| r.to_json()));
            }
            let mut text = serde_json::to_string_pretty(&records).map_err(|e| e.to_string())?;
            text.push('\n');
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Infer {
            log,
            out: out_dir,
            collapse_threshold,
        } => {
            let text = std::fs::read_to_string(&log).map_err(|e| format!("{}: {e}", log.display()))?;
            let (observations, skipped) = parse_log(&text);
            for s in &skipped {
                writeln!(err, "{}:{}: skipped: {}", log.display(), s.line, s.reason).map_err(io)?;
            }
            if observations.is_empty() {
                return Err(format!("{}: no usable observations", log.display()));
            }
            let cfg = InferenceConfig {
                collapse_threshold: collapse_threshold as usize,
                ..InferenceConfig::default()
            };
            std::fs::create_dir_all(&out_dir).map_err(|e| format!("{}: {e}", out_dir.display()))?;
            for spec in infer_specs(&observations, &cfg) {
                let path = out_dir.join(format!("{}.json", spec.id));
                std::fs::write(&path, emit_spec_text(&spec)).map_err(|e| format!("{}: {e}", path.display()))?;
                writeln!(out, "{}", path.display()).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Serve {
            port,
            spec_dir,
            bind,
            analysis,
        } => {
            let db = load_specs(&spec_dir, err)?;
            let state = ServiceState::new(db, analysis.options());
            let runtime = tokio::runtime::Runtime::new().map_err(io)?;
            runtime
                .block_on(serve(SocketAddr::new(bind, port), state))
                .map_err(|e| format!("cannot serve on {bind}:{port}: {e}"))?;
            Ok(EXIT_OK)
        }
    }
}
