use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use chrono::{NaiveDate, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use market_entry_core::{
    interpret, recommend, value_anc, value_dcf, Adjustment, DcfParams, FinancialStatements,
    RatingCategory, RatingsDataset, ValuationMethod,
};
use market_entry_service::api::{self, AppState};
use market_entry_service::scenario::{compare_methods, evaluate_scenario, Scenario, ScenarioDraft};
use market_entry_service::store::{StatementsSummary, Store};
use market_entry_service::{output, ServiceError};
use rust_decimal::Decimal;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "market-entry",
    version,
    about = "Market-entry risk indicator and strategy recommendation"
)]
struct Cli {
    /// Directory holding scenarios, statements and evaluation records.
    #[arg(
        long,
        global = true,
        env = "MARKET_ENTRY_DATA_DIR",
        default_value = "market-entry-data"
    )]
    data_dir: PathBuf,

    #[arg(long, global = true, env = "MARKET_ENTRY_LOG", default_value = "info")]
    log_level: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum Output {
    #[default]
    Table,
    Json,
}

#[derive(Args)]
struct OutputArg {
    #[arg(long, value_enum, default_value_t)]
    output: Output,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a statements file (CSV or JSON) and store it in the data directory.
    Ingest {
        file: PathBuf,
        /// Only validate; do not store.
        #[arg(long)]
        dry_run: bool,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Value a company.
    #[command(subcommand)]
    Value(ValueCommand),
    /// Evaluate a scenario (stored id or JSON file).
    Evaluate {
        #[arg(long)]
        scenario: String,
        /// Statements file, overriding the scenario's `statements_id`.
        #[arg(long)]
        statements: Option<PathBuf>,
        /// Evaluate with this method instead of the scenario's chosen one.
        #[arg(long)]
        method: Option<ValuationMethod>,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Map an I* value to the strategy grid.
    Recommend {
        #[arg(long, allow_hyphen_values = true)]
        istar: f64,
        /// Country rating N, for the extra reading of the extreme bands.
        #[arg(long)]
        rating: Option<f64>,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Compare I* across all valuation methods a scenario can evaluate.
    Compare {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        statements: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Show the dynamics of selected statement items.
    Dynamics {
        file: PathBuf,
        #[arg(required = true)]
        items: Vec<String>,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Show the bundled rating history of a country.
    Ratings {
        country: String,
        category: RatingCategory,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long, env = "MARKET_ENTRY_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "MARKET_ENTRY_BIND", default_value = "127.0.0.1")]
        bind: String,
    },
}

#[derive(Subcommand)]
enum ValueCommand {
    /// Adjusted net assets from a balance sheet.
    Anc {
        #[arg(long)]
        statements: PathBuf,
        #[arg(long)]
        period: NaiveDate,
        /// JSON list of adjustments.
        #[arg(long)]
        adjustments: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Discounted cash flow with a Gordon-Shapiro residual.
    Dcf {
        /// Net cash flow of the reference year.
        #[arg(long, allow_hyphen_values = true)]
        cashflow: Decimal,
        #[arg(long)]
        discount_rate: f64,
        #[arg(long, allow_hyphen_values = true)]
        growth: f64,
        #[arg(long, allow_hyphen_values = true)]
        horizon: i32,
        #[command(flatten)]
        out: OutputArg,
    },
}

fn emit<T: Serialize>(
    out: Output,
    value: &T,
    table: impl FnOnce(&T) -> String,
) -> anyhow::Result<()> {
    match out {
        Output::Json => println!("{}", serde_json::to_string_pretty(value)?),
        Output::Table => print!("{}", table(value)),
    }
    Ok(())
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Resolves `--scenario` as a file path first, then as a stored id.
fn load_scenario(cli: &Cli, arg: &str) -> anyhow::Result<(Scenario, bool)> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = read_text(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        if value.get("scenario_id").is_some() {
            return Ok((serde_json::from_value(value)?, false));
        }
        let draft: ScenarioDraft = serde_json::from_value(value)?;
        draft.validate()?;
        let now = Utc::now();
        let scenario = Scenario {
            scenario_id: path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("file")
                .to_string(),
            version: 1,
            created_at: now,
            updated_at: now,
            draft,
        };
        return Ok((scenario, false));
    }
    let store = Store::open(&cli.data_dir)?;
    Ok((store.get_scenario(arg)?, true))
}

fn load_statements(
    cli: &Cli,
    scenario: &Scenario,
    file: Option<&Path>,
) -> anyhow::Result<Option<FinancialStatements>> {
    if let Some(file) = file {
        return Ok(Some(FinancialStatements::ingest(file)?));
    }
    match scenario.draft.statements_id.as_deref() {
        Some(id) => Ok(Some(Store::open(&cli.data_dir)?.get_statements(id)?)),
        None => Ok(None),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Ingest { file, dry_run, out } => {
            let statements = FinancialStatements::ingest(file)?;
            let summary = if *dry_run {
                StatementsSummary::new(String::new(), &statements)
            } else {
                Store::open(&cli.data_dir)?.put_statements(&statements)?
            };
            emit(out.output, &summary, output::statements_summary)
        }
        Command::Value(ValueCommand::Anc {
            statements,
            period,
            adjustments,
            out,
        }) => {
            let st = FinancialStatements::ingest(statements)?;
            let adjustments = match adjustments {
                Some(p) => Adjustment::list_from_json(&read_text(p)?)?,
                None => Vec::new(),
            };
            let v = value_anc(&st, *period, &adjustments)?;
            emit(out.output, &v, |v| {
                let mut s = String::new();
                output::valuation(&mut s, v);
                s
            })
        }
        Command::Value(ValueCommand::Dcf {
            cashflow,
            discount_rate,
            growth,
            horizon,
            out,
        }) => {
            let v = value_dcf(&DcfParams {
                reference_net_cashflow: *cashflow,
                discount_rate: *discount_rate,
                perpetual_growth: *growth,
                horizon_years: *horizon,
            })?;
            emit(out.output, &v, |v| {
                let mut s = String::new();
                output::valuation(&mut s, v);
                s
            })
        }
        Command::Evaluate {
            scenario,
            statements,
            method,
            out,
        } => {
            let (mut scenario, stored) = load_scenario(&cli, scenario)?;
            let record = if stored && method.is_none() && statements.is_none() {
                Store::open(&cli.data_dir)?.evaluate(&scenario.scenario_id)?
            } else {
                if let Some(m) = method {
                    scenario.draft.chosen_method = *m;
                }
                let st = load_statements(&cli, &scenario, statements.as_deref())?;
                evaluate_scenario(&scenario, st.as_ref(), Utc::now())?
            };
            emit(out.output, &record, output::evaluation)
        }
        Command::Recommend { istar, rating, out } => {
            let mut band = recommend(*istar)?;
            band.special_note = rating.and_then(|n| interpret(*istar, n));
            emit(out.output, &band, |b| {
                let mut s = String::new();
                output::band(&mut s, b);
                s
            })
        }
        Command::Compare {
            scenario,
            statements,
            out,
        } => {
            let (scenario, _) = load_scenario(&cli, scenario)?;
            let st = load_statements(&cli, &scenario, statements.as_deref())?;
            let cmp = compare_methods(&scenario.draft, st.as_ref())?;
            emit(out.output, &cmp, output::comparison)
        }
        Command::Dynamics { file, items, out } => {
            let st = FinancialStatements::ingest(file)?;
            let series = market_entry_core::dynamics(&st, items)?;
            emit(out.output, &series, |s| output::dynamics(s))
        }
        Command::Ratings {
            country,
            category,
            out,
        } => {
            let ds = RatingsDataset::bundled();
            let events = ds.rating_history(country, *category)?.to_vec();
            emit(out.output, &events, |e| output::rating_events(e))
        }
        Command::Serve { port, bind } => {
            let store = Store::open(&cli.data_dir)?;
            let state = Arc::new(AppState {
                store,
                ratings: RatingsDataset::bundled(),
            });
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async move {
                let listener = tokio::net::TcpListener::bind((bind.as_str(), *port)).await?;
                tracing::info!(addr = %listener.local_addr()?, data_dir = %cli.data_dir.display(), "listening");
                axum::serve(listener, api::router(state))
                    .with_graceful_shutdown(async {
                        let _ = tokio::signal::ctrl_c().await;
                    })
                    .await?;
                anyhow::Ok(())
            })
        }
    }
}

fn main() {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_new(&cli.log_level)
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .init();

    if let Err(err) = run(cli) {
        let (code, field) = match err.downcast_ref::<ServiceError>() {
            Some(e) => (e.code(), e.field()),
            None => match err.downcast_ref::<market_entry_core::EntryError>() {
                Some(e) => (e.code(), e.field()),
                None => ("ERROR", None),
            },
        };
        match field {
            Some(f) => eprintln!("error [{code}] ({f}): {err:#}"),
            None => eprintln!("error [{code}]: {err:#}"),
        }
        std::process::exit(1);
    }
}
