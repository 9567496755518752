//! Command-line front end.
//!
//! Exit codes: 0 success, 2 input or configuration error (including a plan
//! that fails validation), 3 capability refusal (instance beyond the exact
//! solver's limits), 1 anything else.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use freightplan::core::generator::{generate, GenConfig, Scenario};
use freightplan::core::heuristic::{FallbackDeparture, HeuristicConfig};
use freightplan::core::milp::{build_model, DeadlineMode, InTransitMode, VariantConfig};
use freightplan::core::{validate_plan, Instance};
use freightplan::report::{compare, solve, suite, relative_error, RunReport, SolveError, SolveOptions, SolverKind};
use freightplan::{json, lp, mipstart, mps, provenance, tables};

#[derive(Parser)]
#[command(name = "freightplan", version, about = "Inbound freight shipment planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance.
    Gen {
        #[command(flatten)]
        gen: GenFlags,
        /// Instance JSON to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an instance and write the plan and a run report.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "heuristic")]
        solver: SolverKind,
        /// Plan JSON to write.
        #[arg(long)]
        out: PathBuf,
        /// Run report JSON; defaults to the plan path with `.report.json`.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Cost breakdown CSV.
        #[arg(long)]
        cost_csv: Option<PathBuf>,
        /// Also run the oracle and record the heuristic's error.
        #[arg(long)]
        reference: bool,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Check a plan against an instance.
    Validate {
        instance: PathBuf,
        plan: PathBuf,
        /// Violations CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Heuristic against oracle on one instance, as CSV.
    Compare {
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// One order book under all three scenarios, as CSV.
    Suite {
        #[command(flatten)]
        gen: GenFlags,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Write the integer program as LP or fixed MPS.
    Export {
        instance: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        variant: VariantFlags,
        /// Plan to encode as a MIP start.
        #[arg(long, requires = "start_out")]
        mip_start: Option<PathBuf>,
        #[arg(long, requires = "mip_start")]
        start_out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GenFlags {
    /// Base configuration, JSON or TOML by extension; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    products: Option<u32>,
    #[arg(long)]
    months: Option<u32>,
    #[arg(long)]
    weeks: Option<u32>,
    #[arg(long)]
    destinations: Option<u32>,
    #[arg(long, value_parser = parse_scenario)]
    scenario: Option<Scenario>,
    #[arg(long)]
    dwell: Option<u32>,
    #[arg(long)]
    lead: Option<u32>,
    #[arg(long)]
    port_cap: Option<u32>,
    #[arg(long)]
    fcl_slots: Option<u32>,
}

#[derive(Args)]
struct RunFlags {
    /// Knapsack worker threads; output does not depend on it.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_enum, default_value = "latest")]
    fallback: Fallback,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fallback {
    Latest,
    Earliest,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Lp,
    Mps,
}

#[derive(Clone, Copy, ValueEnum)]
enum Deadline {
    Strict,
    Penalized,
    ServiceLevel,
}

#[derive(Clone, Copy, ValueEnum)]
enum InTransit {
    Original,
    Inventory,
}

#[derive(Args)]
struct VariantFlags {
    #[arg(long, value_enum, default_value = "strict")]
    deadline: Deadline,
    /// Cents per week early.
    #[arg(long, default_value_t = 1)]
    early_weight: u64,
    /// Cents per week late.
    #[arg(long, default_value_t = 1)]
    late_weight: u64,
    /// Most weeks any order may be late (service-level).
    #[arg(long)]
    gamma: Option<u32>,
    /// Largest share of late orders (service-level).
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, value_enum, default_value = "inventory")]
    in_transit: InTransit,
    /// Book lower-numbered FCL units first.
    #[arg(long)]
    symmetry: bool,
    #[arg(long)]
    big_m: Option<u64>,
    /// Keep variables and orders that cannot meet their deadlines.
    #[arg(long)]
    keep_hopeless: bool,
}

enum Failure {
    Input(String),
    Refusal(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Other(_) => 1,
            Failure::Input(_) => 2,
            Failure::Refusal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Refusal(m) | Failure::Other(m) => m,
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        if e.is_refusal() {
            Failure::Refusal(e.to_string())
        } else {
            match e {
                SolveError::Generator(_) => Failure::Input(e.to_string()),
                SolveError::Heuristic(freightplan::core::heuristic::HeuristicError::Instance(_))
                | SolveError::Oracle(freightplan::core::oracle::OracleError::Instance(_)) => Failure::Input(e.to_string()),
                _ => Failure::Other(e.to_string()),
            }
        }
    }
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    s.parse().map_err(|e| format!("{e:?}"))
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<(Instance, Vec<u8>), Failure> {
    let bytes = read(path)?;
    let inst = json::read_instance(&bytes).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok((inst, bytes))
}

fn gen_config(flags: &GenFlags) -> Result<GenConfig, Failure> {
    let mut cfg = match &flags.config {
        None => GenConfig::default(),
        Some(path) => {
            let text = String::from_utf8(read(path)?).map_err(|e| Failure::Input(e.to_string()))?;
            let parsed = if path.extension().is_some_and(|e| e == "toml") {
                toml::from_str(&text).map_err(|e| e.to_string())
            } else {
                serde_json::from_str(&text).map_err(|e| e.to_string())
            };
            parsed.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
        }
    };
    let set = |dst: &mut u32, v: Option<u32>| {
        if let Some(v) = v {
            *dst = v;
        }
    };
    if let Some(seed) = flags.seed {
        cfg.seed = seed;
    }
    set(&mut cfg.n_products, flags.products);
    set(&mut cfg.horizon_months, flags.months);
    set(&mut cfg.n_destinations, flags.destinations);
    set(&mut cfg.dwell_limit, flags.dwell);
    set(&mut cfg.booking_lead, flags.lead);
    set(&mut cfg.port_cap, flags.port_cap);
    if flags.weeks.is_some() {
        cfg.horizon_weeks = flags.weeks;
    }
    if flags.fcl_slots.is_some() {
        cfg.fcl_slots = flags.fcl_slots;
    }
    if let Some(s) = flags.scenario {
        cfg.scenario = s;
    }
    cfg.validate().map_err(|e| Failure::Input(e.to_string()))?;
    Ok(cfg)
}

fn solve_options(run: &RunFlags) -> SolveOptions {
    let fallback_departure = match run.fallback {
        Fallback::Latest => FallbackDeparture::Latest,
        Fallback::Earliest => FallbackDeparture::Earliest,
    };
    SolveOptions { threads: run.threads, heuristic: HeuristicConfig { fallback_departure }, ..Default::default() }
}

fn variant(flags: &VariantFlags) -> Result<VariantConfig, Failure> {
    let (early_weight, late_weight) = (flags.early_weight, flags.late_weight);
    let deadline = match flags.deadline {
        Deadline::Strict => DeadlineMode::Strict,
        Deadline::Penalized => DeadlineMode::Penalized { early_weight, late_weight },
        Deadline::ServiceLevel => {
            let kappa = flags.kappa.ok_or_else(|| Failure::Input("service-level mode needs --kappa".into()))?;
            DeadlineMode::ServiceLevel { gamma: flags.gamma, kappa, early_weight, late_weight }
        }
    };
    let in_transit = match flags.in_transit {
        InTransit::Original => InTransitMode::Original,
        InTransit::Inventory => InTransitMode::Inventory,
    };
    Ok(VariantConfig { deadline, in_transit, symmetry_breaking: flags.symmetry, big_m: flags.big_m, elide_hopeless: !flags.keep_hopeless })
}

fn sidecar(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".names.csv");
    PathBuf::from(name)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen { gen, out } => {
            let cfg = gen_config(&gen)?;
            let inst = generate(&cfg).map_err(|e| Failure::Input(e.to_string()))?;
            write(&out, &json::to_string(&inst))?;
            eprintln!("{} orders, {} weeks, {} edges", inst.orders.len(), inst.horizon_weeks, inst.network.edges.len());
        }
        Command::Solve { instance, solver, out, report, cost_csv, reference, run } => {
            let (inst, bytes) = load_instance(&instance)?;
            let opts = solve_options(&run);
            let sol = solve(&inst, solver, &opts)?;
            let prov = provenance(&bytes);
            let mut rep = RunReport::new(&inst, prov.input_digest.clone(), &sol);
            if reference && solver == SolverKind::Heuristic {
                let exact = solve(&inst, SolverKind::Oracle, &opts)?;
                rep.heuristic_error = relative_error(sol.cost.total_cents, exact.cost.total_cents);
            }
            let mut plan = sol.plan.clone();
            plan.provenance = Some(prov);
            write(&out, &json::to_string(&plan))?;
            let report_path = report.unwrap_or_else(|| out.with_extension("report.json"));
            write(&report_path, &json::to_string(&rep))?;
            if let Some(path) = cost_csv {
                write(&path, &tables::cost_csv([(solver.name(), &sol.cost)]))?;
            }
            eprintln!("{}: total {} cents, {} bookings, {} ms", solver.name(), sol.cost.total_cents, rep.bookings, rep.wall_ms);
        }
        Command::Validate { instance, plan, csv } => {
            let (inst, _) = load_instance(&instance)?;
            let plan_bytes = read(&plan)?;
            let plan = json::read_plan(&plan_bytes).map_err(|e| Failure::Input(e.to_string()))?;
            let report = validate_plan(&inst, &plan).map_err(|e| Failure::Input(e.to_string()))?;
            if let Some(path) = csv {
                write(&path, &tables::violations_csv(&report))?;
            }
            print!("{}", json::to_string(&report));
            if !report.is_feasible() {
                return Err(Failure::Input(format!("{} violations", report.violations.len())));
            }
        }
        Command::Compare { instance, out, run } => {
            let (inst, _) = load_instance(&instance)?;
            let rows = compare(&inst, &solve_options(&run))?;
            write(&out, &tables::compare_csv(&rows))?;
        }
        Command::Suite { gen, out, run } => {
            let cfg = gen_config(&gen)?;
            let rows = suite(&cfg, &solve_options(&run))?;
            write(&out, &tables::suite_csv(&rows))?;
        }
        Command::Export { instance, format, out, variant: flags, mip_start, start_out } => {
            let (inst, bytes) = load_instance(&instance)?;
            let prov = provenance(&bytes);
            let built = build_model(&inst, &variant(&flags)?).map_err(|e| Failure::Input(e.to_string()))?;
            let names = match format {
                Format::Lp => {
                    write(&out, &lp::write_lp(&built.model, Some(&prov)))?;
                    None
                }
                Format::Mps => {
                    let m = mps::write_mps(&built.model, Some(&prov)).map_err(|e| Failure::Other(e.to_string()))?;
                    write(&out, &m.text)?;
                    write(&sidecar(&out), &m.names.to_csv().map_err(|e| Failure::Other(e.to_string()))?)?;
                    Some(m.names)
                }
            };
            if let (Some(plan_path), Some(start_path)) = (mip_start, start_out) {
                let plan = json::read_plan(&read(&plan_path)?).map_err(|e| Failure::Input(e.to_string()))?;
                let text = mipstart::write_mip_start(&built, &inst, &plan, names.as_ref(), Some(&prov))
                    .map_err(|e| Failure::Input(e.to_string()))?;
                write(&start_path, &text)?;
            }
            if !built.excluded_orders.is_empty() {
                eprintln!("left out {} orders without a feasible route", built.excluded_orders.len());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
