//! `caustica` command-line tool: validate, analyse and render scene files.

pub mod analysis;
pub mod scalar;
pub mod schema;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::schema::{check_lambda, load_scene, scene_error_diagnostic, Diagnostic, LoadedScene};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

pub const THREADS_ENV: &str = "CAUSTICA_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "caustica",
    version,
    about = "Wigner caustics, affine equidistants and string-art scenes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a scene file: schema, curve validity, references.
    Validate { file: PathBuf },
    /// Branches, cusps, CSS poles and theorem checks for every curve, as JSON.
    Analyze {
        file: PathBuf,
        /// λ values (decimals or fractions like 10/28); overrides the scene file.
        #[arg(long = "lambda", num_args = 1.., value_parser = scalar::parse_scalar)]
        lambda: Vec<f64>,
        /// Parallel-pair grid for parametric curves.
        #[arg(long, value_parser = clap::value_parser!(u32).range(256..))]
        grid: Option<u32>,
    },
    /// Render the scene to SVG; the render report is printed and written next to it.
    Render {
        file: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
}

/// Reads `CAUSTICA_THREADS` (0 or unset = one thread per core) and sizes the
/// global worker pool.
pub fn configure_threads() -> Result<(), String> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("{THREADS_ENV} must be a non-negative integer, got '{v}'"))?,
        Err(_) => 0,
    };
    // A pool that already exists (tests, embedding) is kept as is.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

fn report_diagnostics(file: &Path, diagnostics: &[Diagnostic], err: &mut dyn Write) {
    for d in diagnostics {
        let _ = writeln!(err, "error: {}: {d}", file.display());
    }
}

fn load(file: &Path, err: &mut dyn Write) -> Result<(Vec<u8>, LoadedScene), i32> {
    let bytes = std::fs::read(file).map_err(|e| {
        let _ = writeln!(err, "error: cannot read {}: {e}", file.display());
        EXIT_RUNTIME
    })?;
    let loaded = load_scene(&bytes).map_err(|diagnostics| {
        report_diagnostics(file, &diagnostics, err);
        EXIT_INVALID
    })?;
    Ok((bytes, loaded))
}

fn validate(file: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match load(file, err) {
        Ok((_, loaded)) => {
            let s = &loaded.scene;
            let _ = writeln!(
                out,
                "ok: {} curve(s), {} famil{}, {} overlay(s)",
                s.curves.len(),
                s.families.len(),
                if s.families.len() == 1 { "y" } else { "ies" },
                s.overlays.len()
            );
            EXIT_OK
        }
        Err(code) => code,
    }
}

fn analyze(
    file: &Path,
    lambdas: Vec<f64>,
    grid: Option<u32>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let (bytes, mut loaded) = match load(file, err) {
        Ok(v) => v,
        Err(code) => return code,
    };
    if !lambdas.is_empty() {
        let bad: Vec<Diagnostic> = lambdas
            .iter()
            .filter_map(|&l| check_lambda(l).err())
            .map(|message| Diagnostic {
                path: "--lambda".into(),
                message,
            })
            .collect();
        if !bad.is_empty() {
            report_diagnostics(file, &bad, err);
            return EXIT_INVALID;
        }
        loaded.analysis.lambdas = lambdas;
    }
    if let Some(g) = grid {
        loaded.analysis.grid = g as usize;
    }
    let report = analysis::analyze(&loaded, &bytes);
    match serde_json::to_string_pretty(&report) {
        Ok(json) => {
            let _ = writeln!(out, "{json}");
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: cannot serialize report: {e}");
            EXIT_RUNTIME
        }
    }
}

fn write_atomically(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        std::fs::set_permissions(tmp.path(), std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// `out.svg` → `out.report.json`.
pub fn report_path(svg: &Path) -> PathBuf {
    svg.with_extension("report.json")
}

fn render(file: &Path, output: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (_, loaded) = match load(file, err) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let (svg, report) = match caustica::render_svg(&loaded.scene) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(
                err,
                "error: {}: {}",
                file.display(),
                scene_error_diagnostic(&e)
            );
            return EXIT_RUNTIME;
        }
    };
    let json = serde_json::to_string_pretty(&report).expect("render report serializes");
    let written = write_atomically(output, svg.as_bytes())
        .and_then(|()| write_atomically(&report_path(output), format!("{json}\n").as_bytes()));
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write {}: {e}", output.display());
        return EXIT_RUNTIME;
    }
    for f in &report.families {
        let _ = writeln!(
            out,
            "family {}: {:?} {} lines ({} skipped, {} outside window)",
            f.index, f.kind, f.lines, f.skipped, f.outside
        );
    }
    let _ = writeln!(out, "wrote {}", output.display());
    EXIT_OK
}

/// Runs the tool on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    if let Err(msg) = configure_threads() {
        let _ = writeln!(err, "error: {msg}");
        return EXIT_USAGE;
    }
    match cli.command {
        Command::Validate { file } => validate(&file, out, err),
        Command::Analyze { file, lambda, grid } => analyze(&file, lambda, grid, out, err),
        Command::Render { file, output } => render(&file, &output, out, err),
    }
}
