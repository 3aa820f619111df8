//! `rklab` — command-line front end for the radial Kähler metric laboratory.
//!
//! Subcommands: `analyze` (full report for one profile), `reproduce` (the
//! built-in families' threshold table), `sweep` (parameter grids to CSV),
//! `verify` (invariant suites with JUnit XML output).
//!
//! Exit codes: 0 ok, 1 verification failure, 2 usage/config error,
//! 3 internal error.

mod config;
mod report;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use radial_kahler::table;
use radial_kahler::verify::{self, Level};

use config::Config;

#[derive(Debug)]
pub struct CliError {
    code: u8,
    kind: &'static str,
    message: String,
}

impl CliError {
    pub fn config(msg: &str) -> Self {
        CliError {
            code: 2,
            kind: "config",
            message: msg.to_string(),
        }
    }

    pub fn module(e: radial_kahler::Error) -> Self {
        CliError {
            code: 2,
            kind: "module",
            message: e.to_string(),
        }
    }

    pub fn internal(msg: &str) -> Self {
        CliError {
            code: 3,
            kind: "internal",
            message: msg.to_string(),
        }
    }

    fn print(&self) {
        let obj = serde_json::json!({
            "error": { "kind": self.kind, "message": self.message }
        });
        println!("{obj}");
    }
}

#[derive(Parser)]
#[command(name = "rklab", version, about = "Radial Kähler metric laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
    Md,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VerifyLevel {
    Fast,
    Full,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analyze one profile: report.json plus curve CSVs.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Recompute the example families' threshold table.
    Reproduce {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
    },
    /// Sweep a parameter grid; one CSV row per grid point.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Run the invariant suites; exit 1 on any failure.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        level: VerifyLevel,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            e.print();
            ExitCode::from(e.code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    match cli.cmd {
        Cmd::Analyze {
            config,
            out,
            format,
        } => cmd_analyze(&config, &out, format),
        Cmd::Reproduce { out, format } => cmd_reproduce(&out, format),
        Cmd::Sweep {
            config,
            out,
            threads,
        } => cmd_sweep(&config, &out, threads),
        Cmd::Verify { level, out } => cmd_verify(level, &out),
    }
}

fn cmd_analyze(config: &PathBuf, out: &PathBuf, format: Format) -> Result<u8, CliError> {
    let cfg = Config::load(config)?;
    let report = report::analyze(&cfg)?;
    let path = report::write_outputs(&report, out)?;
    match format {
        Format::Json => {
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::internal(&e.to_string()))?;
            println!("{json}");
        }
        Format::Md | Format::Csv => {
            println!("report written to {}", path.display());
        }
    }
    Ok(0)
}

fn cmd_reproduce(out: &PathBuf, format: Format) -> Result<u8, CliError> {
    let rows = table::reproduce_table(radial_kahler::quadrature::DEFAULT_TOL)
        .map_err(CliError::module)?;
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::internal(&format!("cannot create {}: {e}", out.display())))?;
    let json =
        serde_json::to_string_pretty(&rows).map_err(|e| CliError::internal(&e.to_string()))?;
    std::fs::write(out.join("reproduce.json"), &json)
        .map_err(|e| CliError::internal(&e.to_string()))?;
    match format {
        Format::Json => println!("{json}"),
        _ => {
            println!("| family | claim | witness | outcome | result |");
            println!("|---|---|---|---|---|");
            for r in &rows {
                println!(
                    "| {} | {} | {} | {} | {} |",
                    r.family,
                    r.claim,
                    r.witness,
                    r.outcome,
                    if r.pass { "PASS" } else { "FAIL" }
                );
            }
            let failed = rows.iter().filter(|r| !r.pass).count();
            println!();
            println!("{} rows, {} failed", rows.len(), failed);
        }
    }
    Ok(0)
}

fn cmd_sweep(config: &PathBuf, out: &PathBuf, threads: usize) -> Result<u8, CliError> {
    let cfg = Config::load(config)?;
    let csv = sweep::run_sweep(&cfg, threads)?;
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::internal(&format!("cannot create {}: {e}", out.display())))?;
    let path = out.join("sweep.csv");
    std::fs::write(&path, &csv).map_err(|e| CliError::internal(&e.to_string()))?;
    print!("{csv}");
    Ok(0)
}

fn cmd_verify(level: VerifyLevel, out: &PathBuf) -> Result<u8, CliError> {
    let level = match level {
        VerifyLevel::Fast => Level::Fast,
        VerifyLevel::Full => Level::Full,
    };
    let results = verify::run(level);
    let failures = results.iter().filter(|c| !c.passed).count();
    for c in &results {
        println!(
            "{} {:>8.3}s  {}  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.seconds,
            c.name,
            c.details
        );
    }
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::internal(&format!("cannot create {}: {e}", out.display())))?;
    let xml = junit_xml(&results);
    std::fs::write(out.join("junit.xml"), xml).map_err(|e| CliError::internal(&e.to_string()))?;
    println!(
        "{} checks, {} failed; junit report at {}",
        results.len(),
        failures,
        out.join("junit.xml").display()
    );
    Ok(if failures == 0 { 0 } else { 1 })
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn junit_xml(results: &[verify::CheckResult]) -> String {
    let failures = results.iter().filter(|c| !c.passed).count();
    let total_time: f64 = results.iter().map(|c| c.seconds).sum();
    let mut xml = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    xml.push_str(&format!(
        "<testsuites tests=\"{}\" failures=\"{failures}\" time=\"{total_time:.3}\">\n",
        results.len()
    ));
    xml.push_str(&format!(
        "  <testsuite name=\"radial-kahler-invariants\" tests=\"{}\" failures=\"{failures}\" time=\"{total_time:.3}\">\n",
        results.len()
    ));
    for c in results {
        if c.passed {
            xml.push_str(&format!(
                "    <testcase name=\"{}\" time=\"{:.3}\"/>\n",
                xml_escape(&c.name),
                c.seconds
            ));
        } else {
            xml.push_str(&format!(
                "    <testcase name=\"{}\" time=\"{:.3}\"><failure message=\"{}\"/></testcase>\n",
                xml_escape(&c.name),
                c.seconds,
                xml_escape(&c.details)
            ));
        }
    }
    xml.push_str("  </testsuite>\n</testsuites>\n");
    xml
}
