use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};

use qjudge_core::eval::report_json;
use qjudge_core::Verdict;
use qjudge_refine::log::{load_sessions, SessionLog};
use qjudge_refine::session::{DEFAULT_MAX_ROUNDS, MAX_ROUNDS_LIMIT};
use qjudge_refine::{compute_metrics, run_session_with, GeneratorSpec};
use qjudge_server::adapter::AdapterClient;
use qjudge_server::{Engine, Language, ServiceConfig, ServiceError};

#[derive(Parser)]
#[command(
    name = "qjudge",
    version,
    about = "Evaluate quantum state-preparation programs"
)]
struct Cli {
    /// TOML configuration file; QJUDGE_* environment variables override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Problem bank directory.
    #[arg(long, global = true)]
    bank: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum LanguageArg {
    Qasm,
    QiskitPython,
}

impl From<LanguageArg> for Language {
    fn from(l: LanguageArg) -> Self {
        match l {
            LanguageArg::Qasm => Language::Qasm,
            LanguageArg::QiskitPython => Language::QiskitPython,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one submission; exits 0 on AC and 1 otherwise.
    Evaluate {
        problem_id: String,
        file: PathBuf,
        #[arg(long, value_enum, default_value = "qasm")]
        language: LanguageArg,
        /// Adapter command line for Python submissions.
        #[arg(long)]
        adapter: Option<String>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        bind: Option<String>,
    },
    /// Run a refinement session and write its log.
    Refine {
        problem_id: String,
        /// scripted:<file-or-dir>, command:<program and args>, or http:<url>
        #[arg(long)]
        generator: String,
        #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..=MAX_ROUNDS_LIMIT as u64))]
        max_rounds: usize,
        #[arg(long, default_value = "sessions")]
        log_dir: PathBuf,
        #[arg(long, value_enum, default_value = "qasm")]
        language: LanguageArg,
        #[arg(long)]
        adapter: Option<String>,
    },
    /// Summarize the session logs in a directory.
    Metrics {
        session_dir: PathBuf,
        /// Round to report categories at; defaults to the largest round budget.
        #[arg(long, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
        round: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<ServiceError> for Failure {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::UnknownProblem(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn load_config(cli: &Cli) -> Result<ServiceConfig, Failure> {
    let base = match &cli.config {
        Some(path) => ServiceConfig::from_file(path).map_err(|e| Failure::Usage(e.to_string()))?,
        None => ServiceConfig::default(),
    };
    let mut config = base.with_env().map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(bank) = &cli.bank {
        config.bank = bank.clone();
    }
    Ok(config)
}

fn engine(config: &ServiceConfig, adapter: Option<&str>) -> Result<Engine, Failure> {
    let mut engine = Engine::from_config(config).map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(line) = adapter {
        engine.adapter = AdapterClient::from_command_line(line, config.timeout());
    }
    Ok(engine)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let config = load_config(&cli)?;
    match cli.command {
        Cmd::Evaluate {
            problem_id,
            file,
            language,
            adapter,
        } => {
            let engine = engine(&config, adapter.as_deref())?;
            let problem = engine.problem(&problem_id)?;
            let source = read(&file)?;
            let report = engine.evaluate_source(problem, language.into(), &source)?;
            println!("{}", report_json(&report));
            eprintln!("verdict: {}", report.verdict);
            eprintln!("{}", report.diagnostic);
            Ok(if report.verdict == Verdict::AC {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Serve { port, bind } => {
            let mut config = config;
            config.port = port.unwrap_or(config.port);
            config.bind = bind.unwrap_or(config.bind);
            let engine = Arc::new(engine(&config, None)?);
            let addr: SocketAddr = format!("{}:{}", config.bind, config.port)
                .parse()
                .map_err(|e| Failure::Usage(format!("bad bind address: {e}")))?;
            let runtime =
                tokio::runtime::Runtime::new().map_err(|e| Failure::Runtime(e.to_string()))?;
            runtime.block_on(async {
                let count = engine.bank.len();
                let (local, server) =
                    qjudge_server::http::spawn(engine, config.shared_secret.clone(), addr)
                        .await
                        .map_err(|e| Failure::Runtime(format!("cannot bind {addr}: {e}")))?;
                eprintln!("serving {count} problems on http://{local}");
                tokio::select! {
                    result = server => match result {
                        Ok(Ok(())) => Ok(ExitCode::SUCCESS),
                        Ok(Err(e)) => Err(Failure::Runtime(e.to_string())),
                        Err(e) => Err(Failure::Runtime(e.to_string())),
                    },
                    _ = tokio::signal::ctrl_c() => Ok(ExitCode::SUCCESS),
                }
            })
        }
        Cmd::Refine {
            problem_id,
            generator,
            max_rounds,
            log_dir,
            language,
            adapter,
        } => {
            let engine = engine(&config, adapter.as_deref())?;
            let problem = engine.problem(&problem_id)?;
            let spec: GeneratorSpec = generator
                .parse()
                .map_err(|e: qjudge_refine::GeneratorError| Failure::Usage(e.to_string()))?;
            let mut generator = spec.build().map_err(|e| Failure::Usage(e.to_string()))?;
            let mut log = SessionLog::create_in(&log_dir, &problem.id)
                .map_err(|e| Failure::Runtime(e.to_string()))?;
            let mut log_error = None;
            let session = run_session_with(
                problem,
                generator.as_mut(),
                max_rounds,
                |source| match engine.evaluate_source(problem, language.into(), source) {
                    Ok(report) => report,
                    Err(e) => qjudge_core::EvaluationReport::runtime_error(e.to_string()),
                },
                |event| {
                    if let Err(e) = log.append(event) {
                        log_error.get_or_insert(e);
                    }
                },
            );
            if let Some(e) = log_error {
                return Err(Failure::Runtime(e.to_string()));
            }
            for attempt in &session.attempts {
                println!("round {}: {}", attempt.round, attempt.report.verdict);
            }
            if let Some(e) = &session.generator_error {
                println!("generator failed: {e}");
            }
            println!(
                "outcome: {}",
                serde_json::to_string(&session.outcome)
                    .unwrap_or_default()
                    .trim_matches('"')
            );
            println!("log: {}", log.path().display());
            Ok(if session.solved_at().is_some() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Metrics {
            session_dir,
            round,
            json,
        } => {
            let sessions =
                load_sessions(&session_dir).map_err(|e| Failure::Usage(e.to_string()))?;
            let round =
                round.unwrap_or_else(|| sessions.iter().map(|s| s.max_rounds).max().unwrap_or(1));
            let table =
                compute_metrics(&sessions, round).map_err(|e| Failure::Usage(e.to_string()))?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&table).expect("table serializes")
                );
            } else {
                println!("{table}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            if !e.to_string().contains("Usage:") {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}\n\n{}", Cli::command().render_usage());
            ExitCode::from(2)
        }
        Err(Failure::Runtime(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
