//! `barycd`: one JSON report on stdout per invocation, diagnostics on stderr.
//!
//! Exit codes: 0 pass or success, 1 inequality refuted, 2 error or
//! degenerate instance.

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use barycd_core::io::parse_caps;
use clap::error::ErrorKind;
use clap::Parser;
use serde_json::{json, Value};

use args::Cli;
use commands::{error_kind, run, Context};

const SCHEMA: &str = "1";

fn emit(report: &Value) {
    let text = serde_json::to_string_pretty(report).expect("reports serialize");
    // A closed pipe downstream is not our error.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn fail(command: &[String], kind: &str, message: String) -> ExitCode {
    emit(&json!({
        "schema": SCHEMA,
        "command": command,
        "error": { "kind": kind, "message": message },
    }));
    ExitCode::from(2)
}

fn configure_threads() {
    let Ok(v) = std::env::var("BARYCD_THREADS") else {
        return;
    };
    match v.parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("warning: cannot size the thread pool: {e}");
            }
        }
        _ => eprintln!("warning: ignoring BARYCD_THREADS={v:?}"),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let command: Vec<String> = argv.iter().skip(1).cloned().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&command, "usage", e.to_string().trim_end().to_string()),
    };
    let caps = match cli.caps.as_deref().map(parse_caps).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => return fail(&command, "usage", e.to_string()),
    };
    configure_threads();
    let ctx = Context { caps, seed: cli.seed };
    let start = Instant::now();
    match run(&cli.command, &ctx) {
        Ok(out) => {
            let mut config = json!({ "seed": cli.seed, "caps": caps });
            if let (Value::Object(a), Value::Object(b)) = (&mut config, out.config) {
                a.extend(b);
            }
            let mut report = json!({
                "schema": SCHEMA,
                "command": command,
                "config": config,
                "payload": out.payload,
            });
            if cli.timing {
                report["timing"] = json!({ "elapsed_ms": start.elapsed().as_secs_f64() * 1e3 });
            }
            emit(&report);
            ExitCode::from(out.exit as u8)
        }
        Err(e) => fail(&command, error_kind(&e), e.to_string()),
    }
}
