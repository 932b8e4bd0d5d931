use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use amm_core::arbitrage::{solve_constant_product, solve_generic, ArbitrageProblem};
use amm_core::concurrency::{check_reorder_soundness, ReorderError};
use amm_core::dsl::{self, TraceFile};
use amm_core::economics::{gain, global_net_worth};
use amm_core::io::{solution_json, StateDoc};
use amm_core::swap_rate::certify;
use amm_core::{approx_eq, Machine, Pair, PropertyCheckConfig, State, Symbol, Token};
use clap::{Args, Parser, Subcommand};

mod format;
mod rate;

use format::g6;
use rate::{parse_rate, DynRate};

#[derive(Parser)]
#[command(
    name = "amm",
    version,
    about = "Replay and analyse AMM transaction traces"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a trace and print every state and the per-user gains.
    Run(RunArgs),
    /// Replay a trace, checking supply, net worth and non-depletion at each step.
    Check(TraceArgs),
    /// Certify the properties of a swap rate by seeded sampling.
    Props(PropsArgs),
    /// Solve the single-swap arbitrage problem on a JSON state.
    Arb(ArbArgs),
    /// Check that every reordering of concurrent transactions reaches the same state.
    Reorder(ReorderArgs),
    /// Validate a trace file or a JSON state without running anything.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct TraceArgs {
    trace: PathBuf,
    #[arg(long, default_value = "constprod")]
    swaprate: String,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    trace: TraceArgs,
    /// One JSON state document per line: the initial state, then one per step.
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Pool reserves after each step.
    #[arg(long)]
    csv: bool,
    /// Pool reported by --csv. Needed when the trace touches more than one pool.
    #[arg(long, num_args = 2, value_names = ["T0", "T1"])]
    pair: Option<Vec<String>>,
}

#[derive(Args)]
struct PropsArgs {
    #[arg(long, default_value = "constprod")]
    swaprate: String,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ArbArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long)]
    user: String,
    /// Tokens of the pool to trade against. The solver picks the direction.
    #[arg(long, num_args = 2, value_names = ["T_IN", "T_OUT"])]
    pair: Vec<String>,
    #[arg(long, default_value = "constprod")]
    swaprate: String,
}

#[derive(Args)]
struct ReorderArgs {
    #[command(flatten)]
    trace: TraceArgs,
    /// Maximum number of permutations to explore.
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
}

#[derive(Args)]
struct ValidateArgs {
    /// A trace file, or a state document when the name ends in `.json`.
    file: PathBuf,
}

/// A failure with its exit code.
#[derive(Debug)]
enum Failure {
    /// Unreadable or malformed input, bad flags.
    Input(String),
    /// A transaction was not enabled.
    Rejected(String),
    /// A checked property did not hold.
    Invariant(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Rejected(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Rejected(m) | Failure::Invariant(m) => m,
        }
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Command::Run(a) => run(&a),
        Command::Check(a) => check(&a),
        Command::Props(a) => props(&a),
        Command::Arb(a) => arb(&a),
        Command::Reorder(a) => reorder(&a),
        Command::Validate(a) => validate(&a),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_trace(path: &Path) -> Result<TraceFile, Failure> {
    let text = read(path)?;
    dsl::parse(&text).map_err(|errs| {
        let lines: Vec<String> = errs
            .iter()
            .map(|e| format!("{}:{e}", path.display()))
            .collect();
        Failure::Input(lines.join("\n"))
    })
}

fn machine(spec: &str) -> Result<Machine<f64, DynRate>, Failure> {
    parse_rate(spec).map(Machine::new).map_err(Failure::Input)
}

fn initial(tf: &TraceFile) -> Result<State<f64>, Failure> {
    let s = tf.initial_state();
    if s.is_initial() {
        Ok(s)
    } else {
        Err(Failure::Invariant(
            "initial wallets may only hold atomic tokens".into(),
        ))
    }
}

fn replay(
    m: &Machine<f64, DynRate>,
    s: &State<f64>,
    tf: &TraceFile,
) -> Result<Vec<State<f64>>, Failure> {
    m.run(s, &tf.transactions).map_err(|h| {
        Failure::Rejected(format!(
            "step {} ({}) rejected: {}",
            h.index + 1,
            tf.transactions[h.index],
            h.reason
        ))
    })
}

fn run(a: &RunArgs) -> Outcome {
    let tf = load_trace(&a.trace.trace)?;
    let m = machine(&a.trace.swaprate)?;
    let s0 = initial(&tf)?;
    let states = replay(&m, &s0, &tf)?;
    if a.csv {
        return csv(&tf, &states, a.pair.as_deref());
    }
    let oracle = tf.oracle().map_err(|e| Failure::Input(e.to_string()))?;
    let mut out = String::new();
    if a.json {
        for s in &states {
            let doc = StateDoc::from_state(s, &oracle).to_json();
            writeln!(out, "{doc}").unwrap();
        }
        return Ok(out);
    }
    for (i, s) in states.iter().enumerate() {
        if i == 0 {
            writeln!(out, "initial").unwrap();
        } else {
            writeln!(out, "step {i}: {}", tf.transactions[i - 1]).unwrap();
        }
        out.push_str(&format::state(s));
    }
    writeln!(out, "gains").unwrap();
    for u in s0.users() {
        match gain(&m, &s0, &oracle, u, &tf.transactions) {
            Ok(g) => writeln!(out, "  {u}: {}", g6(g.value)).unwrap(),
            Err(e) => writeln!(out, "  {u}: unavailable ({e})").unwrap(),
        }
    }
    Ok(out)
}

fn csv(tf: &TraceFile, states: &[State<f64>], pair: Option<&[String]>) -> Outcome {
    let pair = match pair {
        Some([a, b]) => {
            let a = Symbol::new(a).map_err(|e| Failure::Input(e.to_string()))?;
            let b = Symbol::new(b).map_err(|e| Failure::Input(e.to_string()))?;
            Pair::distinct(a, b).map_err(|e| Failure::Input(e.to_string()))?
        }
        _ => {
            let mut pairs: Vec<Pair> = tf.transactions.iter().map(|t| t.pair()).collect();
            pairs.sort();
            pairs.dedup();
            match pairs.as_slice() {
                [p] => p.clone(),
                [] => {
                    return Err(Failure::Input(
                        "the trace touches no pool; pass --pair".into(),
                    ))
                }
                _ => {
                    return Err(Failure::Input(
                        "the trace touches several pools; pass --pair".into(),
                    ))
                }
            }
        }
    };
    let mut out = format!("step,r_{},r_{}\n", pair.first(), pair.second());
    for (i, s) in states.iter().enumerate() {
        let [r0, r1] = s.pool(&pair).map_or([0.0, 0.0], |p| p.reserves);
        writeln!(out, "{i},{r0},{r1}").unwrap();
    }
    Ok(out)
}

fn check(a: &TraceArgs) -> Outcome {
    let tf = load_trace(&a.trace)?;
    let m = machine(&a.swaprate)?;
    let s0 = initial(&tf)?;
    let states = replay(&m, &s0, &tf)?;
    let oracle = tf.oracle().map_err(|e| Failure::Input(e.to_string()))?;
    let tol = 1e-9;

    let atoms: Vec<Token> = s0.atomic_tokens().into_iter().map(Token::from).collect();
    let supply0: Vec<f64> = atoms.iter().map(|t| s0.supply(t)).collect();
    let worth0 = global_net_worth(&s0, &oracle);
    let mut out = String::new();
    if let Err(e) = &worth0 {
        writeln!(out, "note: net worth not checked ({e})").unwrap();
    }

    let mut problems = Vec::new();
    for (i, s) in states.iter().enumerate() {
        for v in s.validate() {
            problems.push(format!("step {i}: {v}"));
        }
        for (t, v0) in atoms.iter().zip(&supply0) {
            let v = s.supply(t);
            if !approx_eq(&v, v0, &tol) {
                problems.push(format!("step {i}: supply of {t} is {v}, expected {v0}"));
            }
        }
        for p in &s.pools {
            if p.reserves.iter().any(|r| *r <= 0.0) {
                problems.push(format!("step {i}: pool {} is depleted", p.pair));
            }
        }
        if let Ok(w0) = &worth0 {
            match global_net_worth(s, &oracle) {
                Ok(w) if approx_eq(&w, w0, &tol) => {}
                Ok(w) => problems.push(format!("step {i}: net worth is {w}, expected {w0}")),
                Err(e) => problems.push(format!("step {i}: {e}")),
            }
        }
    }
    if !problems.is_empty() {
        return Err(Failure::Invariant(problems.join("\n")));
    }
    writeln!(out, "ok: {} steps checked", tf.transactions.len()).unwrap();
    Ok(out)
}

fn props(a: &PropsArgs) -> Outcome {
    if a.samples == 0 {
        return Err(Failure::Input("--samples must be positive".into()));
    }
    let f = parse_rate(&a.swaprate).map_err(Failure::Input)?;
    let cfg = PropertyCheckConfig::default()
        .with_samples(a.samples)
        .with_seed(a.seed);
    let report = certify::<f64, _>(&*f, &cfg);
    Ok(format!("{:#}\n", report.to_json()))
}

fn arb(a: &ArbArgs) -> Outcome {
    let doc = StateDoc::parse(&read(&a.state)?).map_err(|e| Failure::Input(e.to_string()))?;
    let (s, oracle) = doc.to_state().map_err(|e| Failure::Input(e.to_string()))?;
    let bad = s.validate();
    if !bad.is_empty() {
        let lines: Vec<String> = bad.iter().map(ToString::to_string).collect();
        return Err(Failure::Invariant(lines.join("\n")));
    }
    let u = amm_core::UserId::new(&a.user).map_err(|e| Failure::Input(e.to_string()))?;
    let [t0, t1] = a.pair.as_slice() else {
        return Err(Failure::Input("--pair takes two tokens".into()));
    };
    let t0 = Symbol::new(t0).map_err(|e| Failure::Input(e.to_string()))?;
    let t1 = Symbol::new(t1).map_err(|e| Failure::Input(e.to_string()))?;
    let pair = Pair::distinct(t0, t1).map_err(|e| Failure::Input(e.to_string()))?;
    let pool = s
        .pool(&pair)
        .cloned()
        .ok_or_else(|| Failure::Input(format!("no pool for {pair}")))?;
    let balance = s.wallet(&u).map(|w| w.balance.clone()).unwrap_or_default();
    let problem = ArbitrageProblem::new(pool, oracle, u, balance)
        .map_err(|e| Failure::Input(e.to_string()))?;
    let tol = 1e-12;
    let sol = if a.swaprate == "constprod" {
        solve_constant_product(&problem, tol)
    } else {
        let f = parse_rate(&a.swaprate).map_err(Failure::Input)?;
        solve_generic(&problem, &f, tol)
    }
    .map_err(|e| Failure::Input(e.to_string()))?;
    Ok(format!("{}\n", solution_json(&sol)))
}

fn reorder(a: &ReorderArgs) -> Outcome {
    let tf = load_trace(&a.trace.trace)?;
    let m = machine(&a.trace.swaprate)?;
    let s0 = initial(&tf)?;
    match check_reorder_soundness(&m, &s0, &tf.transactions, &1e-9, a.budget) {
        Ok(r) => Ok(format!(
            "ok: {} permutations explored, {} enabled, {} not enabled{}\n",
            r.explored,
            r.enabled,
            r.skipped,
            if r.complete {
                ""
            } else {
                " (budget exhausted)"
            }
        )),
        Err(ReorderError::NotEnabled { index, reason }) => Err(Failure::Rejected(format!(
            "step {} ({}) rejected: {reason}",
            index + 1,
            tf.transactions[index]
        ))),
        Err(e @ ReorderError::Counterexample { .. }) => Err(Failure::Invariant(e.to_string())),
    }
}

fn validate(a: &ValidateArgs) -> Outcome {
    let text = read(&a.file)?;
    if a.file.extension().is_some_and(|e| e == "json") {
        let doc = StateDoc::parse(&text).map_err(|e| Failure::Input(e.to_string()))?;
        let (s, _) = doc.to_state().map_err(|e| Failure::Input(e.to_string()))?;
        let bad = s.validate();
        if !bad.is_empty() {
            let lines: Vec<String> = bad.iter().map(ToString::to_string).collect();
            return Err(Failure::Invariant(lines.join("\n")));
        }
        return Ok("ok: valid state\n".into());
    }
    let tf = load_trace(&a.file)?;
    initial(&tf)?;
    tf.oracle().map_err(|e| Failure::Input(e.to_string()))?;
    Ok(format!(
        "ok: {} prices, {} wallets, {} transactions\n",
        tf.prices.len(),
        tf.wallets.len(),
        tf.transactions.len()
    ))
}
