mod render;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use autofill_core::filling::FillingError;
use autofill_core::form::{parse_form_spec, validate_spec_consistency, FillStatus, FormSpec};
use autofill_core::{Mode, VertexId, VertexSet};
use autofill_service::payload::{self, to_json};
use clap::{Args, Parser, Subcommand};

/// Decide which form fields suffice to autofill the rest, and fill them.
#[derive(Parser)]
#[command(name = "autofill", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural analysis of the spec's dependency graph.
    Analyze {
        spec: PathBuf,
        /// Enumerate every minimal filling set (forms of at most 12 fields).
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        json: bool,
    },
    /// Whether the provided fields determine every other field.
    Check(Selection),
    /// Additional fields that would complete the provided ones.
    Suggest(Selection),
    /// Autofill a record from the given values.
    Fill {
        spec: PathBuf,
        /// A provided value, as FIELD=VALUE; repeatable.
        #[arg(long = "set", value_name = "FIELD=VALUE", value_parser = parse_assignment)]
        values: Vec<(VertexId, String)>,
        #[arg(long)]
        json: bool,
    },
    /// Serve the HTTP API for the spec.
    Serve {
        spec: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Directory of static UI assets served beside the API.
        #[arg(long = "static", value_name = "DIR")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Selection {
    spec: PathBuf,
    /// Comma-separated field ids the user supplies.
    #[arg(long, value_delimiter = ',')]
    provided: Vec<VertexId>,
    /// Determination mode for every rule; defaults to each rule's own mode.
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    json: bool,
}

fn parse_assignment(text: &str) -> Result<(VertexId, String), String> {
    match text.split_once('=') {
        Some((id, value)) if !id.is_empty() => Ok((VertexId::from(id), value.to_owned())),
        _ => Err(format!("expected FIELD=VALUE, got `{text}`")),
    }
}

/// Process exit statuses.
#[derive(Clone, Copy)]
enum Status {
    Ok = 0,
    Negative = 1,
    BadInput = 2,
    TooLarge = 3,
    BindFailed = 4,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(s as u8)
    }
}

fn fail(status: Status, message: impl std::fmt::Display) -> Status {
    eprintln!("error: {message}");
    status
}

fn load(path: &Path) -> Result<FormSpec, Status> {
    let bytes = std::fs::read(path)
        .map_err(|e| fail(Status::BadInput, format_args!("cannot read {}: {e}", path.display())))?;
    parse_form_spec(&bytes).map_err(|e| fail(Status::BadInput, format_args!("{}: {e}", path.display())))
}

fn verdict(positive: bool) -> Status {
    if positive {
        Status::Ok
    } else {
        Status::Negative
    }
}

fn analyze(spec: &FormSpec, exact: bool, json: bool) -> Status {
    match validate_spec_consistency(spec, exact) {
        Ok(report) => {
            if json {
                println!("{}", to_json(&report));
            } else {
                print!("{}", render::analysis(&report));
            }
            Status::Ok
        }
        Err(e @ FillingError::TooLarge { .. }) => fail(Status::TooLarge, e),
        Err(e) => fail(Status::BadInput, e),
    }
}

fn check(spec: &FormSpec, sel: &Selection) -> Status {
    match payload::check(spec, &sel.provided, sel.mode) {
        Ok(result) => {
            if sel.json {
                println!("{}", to_json(&result));
            } else {
                print!("{}", render::check(&result, sel.mode));
            }
            verdict(result.filling)
        }
        Err(e) => fail(Status::BadInput, e),
    }
}

fn suggest_cmd(spec: &FormSpec, sel: &Selection) -> Status {
    match payload::check(spec, &sel.provided, sel.mode) {
        Ok(result) => {
            if sel.json {
                let body: BTreeMap<&str, &VertexSet> = [("suggestions", &result.suggestions)].into();
                println!("{}", to_json(&body));
            } else {
                print!("{}", render::suggestions(&result.suggestions));
            }
            verdict(result.filling)
        }
        Err(e) => fail(Status::BadInput, e),
    }
}

fn fill(spec: &FormSpec, values: &[(VertexId, String)], json: bool) -> Status {
    match payload::fill_text(spec, values) {
        Ok(report) => {
            if json {
                println!("{}", to_json(&report));
            } else {
                print!("{}", render::fill(spec, &report));
            }
            verdict(report.status == FillStatus::Filled)
        }
        Err(e) => fail(Status::BadInput, e),
    }
}

fn serve(spec: FormSpec, host: &str, port: u16, static_dir: Option<&Path>) -> Status {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .init();
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => return fail(Status::BindFailed, e),
    };
    runtime.block_on(async {
        let listener = match tokio::net::TcpListener::bind((host, port)).await {
            Ok(l) => l,
            Err(e) => return fail(Status::BindFailed, format_args!("cannot bind {host}:{port}: {e}")),
        };
        let app = match static_dir {
            Some(dir) => autofill_service::router_with_static(spec, dir),
            None => autofill_service::router(spec),
        };
        match autofill_service::serve(listener, app).await {
            Ok(()) => Status::Ok,
            Err(e) => fail(Status::BindFailed, e),
        }
    })
}

fn run(cli: Cli) -> Status {
    let spec_path = match &cli.command {
        Command::Analyze { spec, .. } | Command::Fill { spec, .. } | Command::Serve { spec, .. } => spec,
        Command::Check(sel) | Command::Suggest(sel) => &sel.spec,
    };
    let spec = match load(spec_path) {
        Ok(spec) => spec,
        Err(status) => return status,
    };
    match &cli.command {
        Command::Analyze { exact, json, .. } => analyze(&spec, *exact, *json),
        Command::Check(sel) => check(&spec, sel),
        Command::Suggest(sel) => suggest_cmd(&spec, sel),
        Command::Fill { values, json, .. } => fill(&spec, values, *json),
        Command::Serve { host, port, static_dir, .. } => serve(spec, host, *port, static_dir.as_deref()),
    }
}

fn main() -> ExitCode {
    run(Cli::parse()).into()
}
