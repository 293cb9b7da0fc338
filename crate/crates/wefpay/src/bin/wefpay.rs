//! Command-line front end: check, optimize, search, transform, bound
//! checking, and fixture generation over JSON instance files.
//!
//! Exit codes: 0 for a computed positive result, 1 for a computed negative
//! verdict (envy found, infeasible allocation, violated precondition or
//! bound), 2 for anything that prevented computing (usage, unreadable or
//! invalid files, capacity guards).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use wefpay::envy_graph;
use wefpay::fixtures::{self, WeightMode};
use wefpay::io::{self, Document};
use wefpay::model::{
    check_wef, decimal_approx, parse_rational, Allocation, PaymentVector, Rational,
};
use wefpay::optimize::{self, ObjectiveKind, OptimizeError};
use wefpay::transforms::{self, TransformError};

#[derive(Parser)]
#[command(
    name = "wefpay",
    version,
    about = "Exact computations for weighted envy-free allocations with payments",
    after_help = objective_catalog()
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check weighted envy-freeness of payments for the file's allocation
    Check {
        /// Instance file (JSON)
        file: PathBuf,
        /// Payments to check instead of the file's, e.g. "15,-15"
        #[arg(long, value_name = "LIST")]
        payments: Option<String>,
    },
    /// Compute the minimal subsidy vector for the file's allocation
    Subsidy {
        /// Instance file (JSON)
        file: PathBuf,
        /// Emit a JSON report instead of text
        #[arg(long)]
        json: bool,
    },
    /// Optimize a payment objective on the file's allocation
    Opt {
        /// Instance file (JSON)
        file: PathBuf,
        /// Objective name; see the catalog below
        #[arg(long, value_parser = parse_objective_arg)]
        objective: ObjectiveKind,
        /// Emit a JSON report instead of text
        #[arg(long)]
        json: bool,
    },
    /// Exhaustively search all allocations for the best objective value
    Search {
        /// Instance file (JSON)
        file: PathBuf,
        /// Objective name; see the catalog below
        #[arg(long, value_parser = parse_objective_arg)]
        objective: ObjectiveKind,
        /// Emit a JSON report instead of text
        #[arg(long)]
        json: bool,
    },
    /// Apply a payment transform to the file's payments
    Transform {
        /// Instance file (JSON); must carry an allocation
        file: PathBuf,
        /// Which transform to apply
        #[arg(long)]
        kind: TransformKind,
        /// Amount per unit entitlement to subtract (slide only)
        #[arg(long, value_name = "RATIONAL")]
        z: Option<String>,
        /// Payments to transform instead of the file's, e.g. "15,-15"
        #[arg(long, value_name = "LIST")]
        payments: Option<String>,
    },
    /// Evaluate the provable bounds between optima on the file's allocation
    Bounds {
        /// Instance file (JSON); must carry an allocation
        file: PathBuf,
    },
    /// Generate an instance file from a named family
    Gen {
        /// Family: two-agent-transfer, single-prize, weighted-prize,
        /// missing-one, half-prizes, inflated-prizes, or random
        #[arg(long)]
        family: String,
        /// Number of agents
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Number of items (random family)
        #[arg(long, default_value_t = 4)]
        m: usize,
        /// Amount parameter T (prize families)
        #[arg(long, value_name = "RATIONAL", default_value = "6")]
        t: String,
        /// Entitlements for weighted-prize, e.g. "1,2,3"
        #[arg(long, value_name = "LIST")]
        weights: Option<String>,
        /// Seed (random family)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest item value (random family)
        #[arg(long, default_value_t = 12)]
        max_value: u64,
        /// Entitlement mode (random family)
        #[arg(long, value_enum, default_value = "equal")]
        weight_mode: WeightModeArg,
        /// Write to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TransformKind {
    /// Subtract z * w_i from every payment
    Slide,
    /// Slide to total zero
    Balance,
    /// Slide a subsidy vector until some entry is zero
    Normalize,
    /// Slide a balanced vector to the smallest subsidy vector
    ToSubsidy,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WeightModeArg {
    Equal,
    IntegerRange,
}

impl From<WeightModeArg> for WeightMode {
    fn from(mode: WeightModeArg) -> WeightMode {
        match mode {
            WeightModeArg::Equal => WeightMode::Equal,
            WeightModeArg::IntegerRange => WeightMode::IntegerRange,
        }
    }
}

fn objective_catalog() -> String {
    let mut text = String::from("Objectives:\n");
    for objective in ObjectiveKind::ALL {
        let _ = writeln!(text, "  {:<7} {}", objective.name(), objective.describe());
    }
    text.pop();
    text
}

fn parse_objective_arg(s: &str) -> Result<ObjectiveKind, String> {
    s.parse().map_err(|e: optimize::UnknownObjective| e.to_string())
}

/// A failure with the exit code it maps to.
struct CmdError {
    code: u8,
    message: String,
}

/// Could not compute: usage or input problems.
fn usage(message: impl Into<String>) -> CmdError {
    CmdError { code: 2, message: message.into() }
}

/// Computed a negative verdict.
fn negative(message: impl Into<String>) -> CmdError {
    CmdError { code: 1, message: message.into() }
}

impl From<io::IoError> for CmdError {
    fn from(e: io::IoError) -> Self {
        usage(e.to_string())
    }
}

impl From<OptimizeError> for CmdError {
    fn from(e: OptimizeError) -> Self {
        match e {
            OptimizeError::Infeasible(_) | OptimizeError::NoFeasibleAllocation => {
                negative(e.to_string())
            }
            OptimizeError::Model(_) | OptimizeError::SearchSpaceTooLarge { .. } => {
                usage(e.to_string())
            }
        }
    }
}

impl From<envy_graph::EnvyGraphError> for CmdError {
    fn from(e: envy_graph::EnvyGraphError) -> Self {
        match e {
            envy_graph::EnvyGraphError::Infeasible(_) => negative(e.to_string()),
            envy_graph::EnvyGraphError::Model(_) => usage(e.to_string()),
        }
    }
}

impl From<TransformError> for CmdError {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::NotASubsidy { .. } | TransformError::NotBalanced { .. } => {
                negative(e.to_string())
            }
            TransformError::Model(_) => usage(e.to_string()),
        }
    }
}

impl From<fixtures::FixtureError> for CmdError {
    fn from(e: fixtures::FixtureError) -> Self {
        usage(e.to_string())
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Negative verdicts already said everything on stdout and
            // carry an empty message.
            if !e.message.is_empty() {
                eprintln!("error: {}", e.message);
            }
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CmdError> {
    match cli.command {
        Command::Check { file, payments } => cmd_check(&file, payments.as_deref()),
        Command::Subsidy { file, json } => cmd_subsidy(&file, json),
        Command::Opt { file, objective, json } => cmd_opt(&file, objective, json),
        Command::Search { file, objective, json } => cmd_search(&file, objective, json),
        Command::Transform { file, kind, z, payments } => {
            cmd_transform(&file, kind, z.as_deref(), payments.as_deref())
        }
        Command::Bounds { file } => cmd_bounds(&file),
        Command::Gen { family, n, m, t, weights, seed, max_value, weight_mode, out } => {
            cmd_gen(&family, n, m, &t, weights.as_deref(), seed, max_value, weight_mode, out)
        }
    }
}

fn load_document(path: &PathBuf) -> Result<Document, CmdError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {}", path.display(), e)))?;
    Ok(Document::parse(&text)?)
}

fn require_allocation(doc: &Document) -> Result<&Allocation, CmdError> {
    doc.allocation
        .as_ref()
        .ok_or_else(|| usage("the instance file has no \"allocation\" field"))
}

/// The file's payments, overridden by a `--payments` list when given.
fn resolve_payments(
    doc: &Document,
    flag: Option<&str>,
) -> Result<PaymentVector, CmdError> {
    match flag {
        Some(list) => Ok(PaymentVector::new(parse_rational_list(list)?)),
        None => doc.payments.clone().ok_or_else(|| {
            usage("no payments: add a \"payments\" field or pass --payments")
        }),
    }
}

fn parse_rational_list(list: &str) -> Result<Vec<Rational>, CmdError> {
    list.split(',')
        .map(|part| {
            parse_rational(part.trim()).map_err(|e| usage(format!("in \"{}\": {}", list, e)))
        })
        .collect()
}

fn parse_rational_flag(name: &str, value: &str) -> Result<Rational, CmdError> {
    parse_rational(value.trim()).map_err(|e| usage(format!("--{}: {}", name, e)))
}

/// `"12"`, or `"25/2 (~12.5)"` when the value is not an integer.
fn fmt_scalar(r: &Rational) -> String {
    if r.is_integer() {
        r.to_string()
    } else {
        format!("{} (~{})", r, decimal_approx(r))
    }
}

fn fmt_owner_list(owners: &[usize]) -> String {
    let parts: Vec<String> = owners.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("reports always serialize"));
}

fn cmd_check(file: &PathBuf, payments_flag: Option<&str>) -> Result<(), CmdError> {
    let doc = load_document(file)?;
    let allocation = require_allocation(&doc)?;
    let payments = resolve_payments(&doc, payments_flag)?;
    let check = check_wef(&doc.instance, allocation, &payments)
        .map_err(|e| usage(e.to_string()))?;
    println!("wef: {}", yes_no(check.is_wef()));
    if let Some(witness) = check.witness() {
        println!("witness: {}", witness);
    }
    println!("classification: {}", payments.classify());
    if check.is_wef() {
        Ok(())
    } else {
        Err(CmdError { code: 1, message: String::new() })
    }
}

fn cmd_subsidy(file: &PathBuf, json: bool) -> Result<(), CmdError> {
    let doc = load_document(file)?;
    let allocation = require_allocation(&doc)?;
    let subsidy = envy_graph::minimal_subsidy(&doc.instance, allocation)?;
    if json {
        print_json(&io::payments_report(&subsidy));
    } else {
        println!("payments: {}", subsidy);
        println!("total: {}", fmt_scalar(&subsidy.total()));
    }
    Ok(())
}

fn cmd_opt(file: &PathBuf, objective: ObjectiveKind, json: bool) -> Result<(), CmdError> {
    let doc = load_document(file)?;
    let allocation = require_allocation(&doc)?;
    let optimum = optimize::opt_for_allocation(&doc.instance, allocation, objective)?;
    if json {
        print_json(&io::opt_report(objective, &optimum));
    } else {
        println!("objective: {}", objective);
        println!("optimum: {}", fmt_scalar(&optimum.value));
        println!("payments: {}", optimum.payments);
        println!("classification: {}", optimum.payments.classify());
    }
    Ok(())
}

fn cmd_search(file: &PathBuf, objective: ObjectiveKind, json: bool) -> Result<(), CmdError> {
    let doc = load_document(file)?;
    let outcome = optimize::search_allocations(&doc.instance, objective)?;
    if json {
        print_json(&io::search_report(objective, &outcome));
    } else {
        println!("objective: {}", objective);
        println!("optimum: {}", fmt_scalar(&outcome.optimum.value));
        println!("allocation: {}", fmt_owner_list(outcome.allocation.owners()));
        println!("payments: {}", outcome.optimum.payments);
        println!("classification: {}", outcome.optimum.payments.classify());
    }
    Ok(())
}

fn cmd_transform(
    file: &PathBuf,
    kind: TransformKind,
    z_flag: Option<&str>,
    payments_flag: Option<&str>,
) -> Result<(), CmdError> {
    let doc = load_document(file)?;
    let allocation = require_allocation(&doc)?;
    let payments = resolve_payments(&doc, payments_flag)?;
    let (name, transformed, total_subsidy) = match kind {
        TransformKind::Slide => {
            let z = z_flag.ok_or_else(|| usage("--kind slide needs --z"))?;
            let z = parse_rational_flag("z", z)?;
            ("slide", transforms::slide(&doc.instance, &payments, &z)?, None)
        }
        TransformKind::Balance => {
            ("balance", transforms::balance(&doc.instance, &payments)?, None)
        }
        TransformKind::Normalize => {
            ("normalize", transforms::normalize_subsidy(&doc.instance, &payments)?, None)
        }
        TransformKind::ToSubsidy => {
            let (subsidy, total) = transforms::balanced_to_subsidy(&doc.instance, &payments)?;
            ("to-subsidy", subsidy, Some(total))
        }
    };
    let check = check_wef(&doc.instance, allocation, &transformed)
        .map_err(|e| usage(e.to_string()))?;
    println!("transform: {}", name);
    println!("payments: {}", transformed);
    println!("classification: {}", transformed.classify());
    if let Some(total) = &total_subsidy {
        println!("total subsidy: {}", fmt_scalar(total));
    }
    println!("wef: {}", yes_no(check.is_wef()));
    Ok(())
}

fn cmd_bounds(file: &PathBuf) -> Result<(), CmdError> {
    let doc = load_document(file)?;
    let allocation = require_allocation(&doc)?;
    let report = optimize::check_bounds(&doc.instance, allocation)?;
    for row in &report.rows {
        println!(
            "{}: lhs={} rhs={} holds={} tight={}",
            row.name,
            fmt_scalar(&row.lhs),
            fmt_scalar(&row.rhs),
            yes_no(row.holds()),
            yes_no(row.tight())
        );
    }
    println!("all hold: {}", yes_no(report.all_hold()));
    if report.all_hold() {
        Ok(())
    } else {
        Err(CmdError { code: 1, message: String::new() })
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    family: &str,
    n: usize,
    m: usize,
    t: &str,
    weights: Option<&str>,
    seed: u64,
    max_value: u64,
    weight_mode: WeightModeArg,
    out: Option<PathBuf>,
) -> Result<(), CmdError> {
    let amount = parse_rational_flag("t", t)?;
    let document = if family == "random" {
        let (instance, allocation) =
            fixtures::gen_random_pair(seed, n, m, max_value, weight_mode.into())?;
        Document::new(instance, Some(allocation), None, BTreeMap::new())?
    } else {
        let fixture = match family {
            "two-agent-transfer" => fixtures::two_agent_transfer(),
            "single-prize" => fixtures::single_prize(n, &amount)?,
            "weighted-prize" => {
                let weights = weights
                    .ok_or_else(|| usage("the weighted-prize family needs --weights"))?;
                fixtures::weighted_prize(&parse_rational_list(weights)?, &amount)?
            }
            "missing-one" => fixtures::missing_one(n, &amount)?,
            "half-prizes" => fixtures::half_prizes(n, &amount)?,
            "inflated-prizes" => fixtures::inflated_prizes(n, &amount)?,
            other => {
                return Err(usage(format!(
                    "unknown family \"{}\": expected two-agent-transfer, single-prize, \
                     weighted-prize, missing-one, half-prizes, inflated-prizes, or random",
                    other
                )))
            }
        };
        let expected = fixture
            .expectations
            .iter()
            .map(|e| (e.key(), e.value().clone()))
            .collect();
        Document::new(fixture.instance, Some(fixture.allocation), None, expected)?
    };
    let text = document.to_json_string();
    match out {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| usage(format!("cannot write {}: {}", path.display(), e)))?,
        None => print!("{}", text),
    }
    Ok(())
}
