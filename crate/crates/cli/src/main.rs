//! `elemfac`: command-line front end. Every command writes one JSON document
//! to standard output.
//!
//! Exit codes: 0 success, 2 precondition or input error, 3 verification
//! failure, 4 I/O error.

mod commands;
mod options;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use elemfac::{Error, Execution};
use serde_json::{json, Map, Value};

use commands::{dispatch, Context};
use options::{echo, merge, Command};

#[derive(Debug, Parser)]
#[command(name = "elemfac", version, about = "Elementary factorizations in SL2(C)")]
struct Cli {
    /// JSON file with options for the command, either a plain option map or
    /// `{"name": <command>, "options": {..}}`. Command-line options win.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Use floating-point scalars instead of exact Gaussian rationals.
    #[arg(long, global = true)]
    approx: bool,
    /// Run batch checks on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

const EXIT_PRECONDITION: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;
const EXIT_IO: u8 = 4;

enum Failure {
    Io(String),
    Input(String),
    Lib(Error),
}

impl Failure {
    fn code(&self) -> &str {
        match self {
            Failure::Io(_) => "IO",
            Failure::Input(_) => "SCHEMA",
            Failure::Lib(e) => e.code(),
        }
    }

    fn exit(&self) -> u8 {
        match self {
            Failure::Io(_) => EXIT_IO,
            Failure::Input(_) => EXIT_PRECONDITION,
            Failure::Lib(Error::Verification { .. }) => EXIT_VERIFICATION,
            Failure::Lib(_) => EXIT_PRECONDITION,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(m) | Failure::Input(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

/// Settings read from `--input`: the option map plus any global values.
struct FileInput {
    options: Map<String, Value>,
    seed: Option<u64>,
    approx: Option<bool>,
}

fn read_input(path: &PathBuf, command: &str) -> Result<FileInput, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let Value::Object(mut map) = value else {
        return Err(Failure::Input("input must be a JSON object".into()));
    };
    if let Some(name) = map.remove("name") {
        if name != command {
            return Err(Failure::Input(format!("input is for command {name}, not {command:?}")));
        }
        map = match map.remove("options") {
            Some(Value::Object(o)) => o,
            None => Map::new(),
            Some(_) => return Err(Failure::Input("\"options\" must be an object".into())),
        };
    }
    let seed = match map.remove("seed") {
        None => None,
        Some(v) => Some(v.as_u64().ok_or_else(|| Failure::Input("seed must be a non-negative integer".into()))?),
    };
    let approx = match map.remove("approx") {
        None => None,
        Some(v) => Some(v.as_bool().ok_or_else(|| Failure::Input("approx must be a boolean".into()))?),
    };
    Ok(FileInput { options: map, seed, approx })
}

/// Applies file options to the parsed command, validating the merged map.
fn with_file_options(cmd: Command, file: Option<&Map<String, Value>>) -> Result<Command, Failure> {
    macro_rules! merged {
        ($variant:ident, $o:expr) => {
            Command::$variant(merge($o, file).map_err(|e| Failure::Input(e))?)
        };
    }
    Ok(match &cmd {
        Command::Expand(o) => merged!(Expand, o),
        Command::Jacobian(o) => merged!(Jacobian, o),
        Command::LemmaCheck(o) => merged!(LemmaCheck, o),
        Command::FiberSolve(o) => merged!(FiberSolve, o),
        Command::FactorConst(o) => merged!(FactorConst, o),
        Command::Pad(o) => merged!(Pad, o),
        Command::Cohn(o) => merged!(Cohn, o),
        Command::Winding(o) => merged!(Winding, o),
        Command::Certificate(o) => merged!(Certificate, o),
        Command::Bound(o) => merged!(Bound, o),
        Command::VerifySuite(o) => merged!(VerifySuite, o),
    })
}

fn options_echo(cmd: &Command) -> Value {
    match cmd {
        Command::Expand(o) => echo(o),
        Command::Jacobian(o) => echo(o),
        Command::LemmaCheck(o) => echo(o),
        Command::FiberSolve(o) => echo(o),
        Command::FactorConst(o) => echo(o),
        Command::Pad(o) => echo(o),
        Command::Cohn(o) => echo(o),
        Command::Winding(o) => echo(o),
        Command::Certificate(o) => echo(o),
        Command::Bound(o) => echo(o),
        Command::VerifySuite(o) => echo(o),
    }
}

fn run(cli: Cli) -> (Value, u8) {
    let start = Instant::now();
    let name = cli.command.name();
    let mut echo_cmd = json!({"name": name});
    let result = (|| -> Result<(Value, u8), Failure> {
        let file = cli.input.as_ref().map(|p| read_input(p, name)).transpose()?;
        let cmd = with_file_options(cli.command.clone(), file.as_ref().map(|f| &f.options))?;
        let seed = cli.seed.or(file.as_ref().and_then(|f| f.seed)).unwrap_or(0);
        let approx = cli.approx || file.as_ref().and_then(|f| f.approx).unwrap_or(false);
        echo_cmd = json!({"name": name, "options": options_echo(&cmd), "seed": seed, "approx": approx});
        let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
        let out = dispatch(&cmd, &Context { seed, approx, exec }).map_err(Failure::Lib)?;
        let mut doc = match out.body {
            Value::Object(m) => m,
            other => Map::from_iter([("result".to_string(), other)]),
        };
        doc.insert("exact".into(), json!(out.exact));
        doc.insert("verified".into(), json!(out.verified));
        let code = if out.verified { 0 } else { EXIT_VERIFICATION };
        Ok((Value::Object(doc), code))
    })();
    let (mut doc, code) = match result {
        Ok(ok) => ok,
        Err(f) => (json!({"error": {"code": f.code(), "message": f.message()}}), f.exit()),
    };
    doc["command"] = echo_cmd;
    let total_ms = start.elapsed().as_secs_f64() * 1e3;
    match doc.get_mut("timing") {
        Some(Value::Object(t)) => {
            t.insert("total_ms".into(), json!(total_ms));
        }
        _ => doc["timing"] = json!({"total_ms": total_ms}),
    }
    (doc, code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.kind() == clap::error::ErrorKind::DisplayHelp || e.kind() == clap::error::ErrorKind::DisplayVersion => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let doc = json!({"error": {"code": "USAGE", "message": e.to_string()}});
            let _ = writeln!(std::io::stdout().lock(), "{doc}");
            return ExitCode::from(EXIT_PRECONDITION);
        }
    };
    let (doc, code) = run(cli);
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap_or_default()).is_err() {
        return ExitCode::from(EXIT_IO);
    }
    ExitCode::from(code)
}
