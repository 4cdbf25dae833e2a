//! `quiddity`: exact counts of η-product relations over Z/N from the command
//! line.
//!
//! Exit codes: 0 on success, 1 on a usage or parameter error, 2 when engines
//! disagree under `--engine all`.

mod report;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use quiddity::engine::{self, Engine};
use quiddity::recursions::{pi_class_recursive, Classes};
use quiddity::verification::{self, VerifyConfig, SUITES};
use quiddity::{Error, Mat2, RingCtx, Sign};

use report::{Output, Report, Row};

#[derive(Parser, Debug)]
#[command(name = "quiddity", version, about = "Exact counts of eta-product relations and quiddity cycles over Z/N")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count length-n sequences whose bracket is ±Id (or a given target).
    Count(CountArgs),
    /// σ_n(ℓ) over Z/p^r: sequences of ideal entries with bracket λ_z, ν_p(z - (-1)^{n/2}) = ℓ.
    Sigma(SigmaArgs),
    /// π_{u,n}: sequences with bracket A and second entry u, for every u.
    Pi(PiArgs),
    /// τ_n: the sum of π_{u,n} over units u.
    Tau(TauArgs),
    /// Run the cross-checking suites.
    Verify(VerifyArgs),
    /// Emit a grid of counts over a range of lengths.
    Table(TableArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EngineChoice {
    Formula,
    Recursion,
    Oracle,
    All,
}

#[derive(Args, Debug)]
struct RingArgs {
    #[arg(long, conflicts_with_all = ["p", "r"])]
    modulus: Option<u64>,
    #[arg(long, requires = "r")]
    p: Option<u64>,
    #[arg(long, requires = "p")]
    r: Option<u32>,
}

#[derive(Args, Debug)]
struct LengthArgs {
    #[arg(long, conflicts_with_all = ["n_min", "n_max"])]
    n: Option<usize>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, value_enum)]
    engine: Option<EngineChoice>,
    #[arg(long, value_enum, default_value = "plain")]
    output: Output,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[command(flatten)]
    ring: RingArgs,
    #[command(flatten)]
    len: LengthArgs,
    /// +1 or -1; both signs when neither this nor --target is given.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "target")]
    epsilon: Option<i64>,
    /// Target matrix as a,b,c,d (row major).
    #[arg(long, allow_hyphen_values = true)]
    target: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SigmaArgs {
    #[command(flatten)]
    ring: RingArgs,
    #[command(flatten)]
    len: LengthArgs,
    /// Valuation level in [1, r]; every level when omitted.
    #[arg(long)]
    ell: Option<u32>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct PiArgs {
    #[command(flatten)]
    ring: RingArgs,
    #[command(flatten)]
    len: LengthArgs,
    #[arg(long, allow_negative_numbers = true, conflicts_with = "target")]
    epsilon: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    target: Option<String>,
    /// Aggregate over residue classes (target ±Id, p >= 5).
    #[arg(long)]
    classes: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct TauArgs {
    #[command(flatten)]
    ring: RingArgs,
    #[command(flatten)]
    len: LengthArgs,
    #[arg(long, allow_negative_numbers = true, conflicts_with = "target")]
    epsilon: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    target: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite to run (repeatable); every suite when omitted.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
    suite: Vec<String>,
    #[arg(long, default_value_t = VerifyConfig::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = VerifyConfig::default().reduction_samples)]
    samples: usize,
    #[arg(long, default_value_t = VerifyConfig::default().identity_samples)]
    identity_samples: usize,
    #[arg(long, value_enum, default_value = "plain")]
    output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TableKind {
    Quiddity,
    Sigma,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[arg(value_enum)]
    kind: TableKind,
    #[command(flatten)]
    ring: RingArgs,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: usize,
    #[command(flatten)]
    common: Common,
}

/// Failure modes mapped onto exit codes.
#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] Error),
    #[error("engines disagree at {0}")]
    Disagreement(String),
    #[error(transparent)]
    Io(#[from] anyhow::Error),
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli.command, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Disagreement(msg)) => {
            let _ = out.flush();
            eprintln!("error: engines disagree at {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command, out: &mut impl Write) -> Outcome<()> {
    let (report, output, disagreement) = match command {
        Command::Verify(args) => return verify(args, out),
        Command::Count(args) => count(args)?,
        Command::Sigma(args) => sigma(args)?,
        Command::Pi(args) => pi(args)?,
        Command::Tau(args) => tau(args)?,
        Command::Table(args) => table(args)?,
    };
    report.write(output, out)?;
    match disagreement {
        Some(msg) => Err(Failure::Disagreement(msg)),
        None => Ok(()),
    }
}

type Built = (Report, Output, Option<String>);

// ---- parameter parsing ----

fn ring_of(args: &RingArgs) -> Outcome<RingCtx> {
    match (args.modulus, args.p, args.r) {
        (Some(m), _, _) => Ok(RingCtx::new(m)?),
        (None, Some(p), Some(r)) => Ok(RingCtx::prime_power(p, r)?),
        _ => Err(usage("give --modulus, or --p and --r")),
    }
}

fn echo_ring(report: &mut Report, ring: &RingCtx) {
    report.param("modulus", ring.modulus());
    if let Some((p, r)) = ring.prime_power_parts() {
        report.param("p", p);
        report.param("r", r);
    }
}

fn lengths(args: &LengthArgs, default_min: usize) -> Outcome<Vec<usize>> {
    let ns: Vec<usize> = match (args.n, args.n_min, args.n_max) {
        (Some(n), _, _) => vec![n],
        (None, lo, Some(hi)) => (lo.unwrap_or(default_min)..=hi).collect(),
        (None, Some(lo), None) => vec![lo],
        (None, None, None) => return Err(usage("give --n, or --n-min/--n-max")),
    };
    if ns.is_empty() {
        return Err(usage("empty length range"));
    }
    if ns[0] == 0 {
        return Err(usage("n must be at least 1"));
    }
    Ok(ns)
}

fn echo_lengths(report: &mut Report, ns: &[usize]) {
    if ns.len() == 1 {
        report.param("n", ns[0]);
    } else {
        report.param("n_min", ns[0]);
        report.param("n_max", *ns.last().expect("non-empty"));
    }
}

fn sign_of(eps: i64) -> Outcome<Sign> {
    Sign::from_i64(eps).ok_or_else(|| usage(format!("epsilon must be +1 or -1, got {eps}")))
}

fn parse_target(ring: &RingCtx, text: &str) -> Outcome<Mat2> {
    let parts: Vec<i64> = text
        .split(',')
        .map(|s| s.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| usage(format!("target must be four integers a,b,c,d, got {text:?}")))?;
    let entries: [i64; 4] = parts
        .try_into()
        .map_err(|_| usage(format!("target must be four integers a,b,c,d, got {text:?}")))?;
    let target = Mat2::from_i64(ring, entries);
    if target.det() != ring.one() {
        return Err(usage(format!(
            "target {target} has determinant {} mod {}, not 1",
            target.det(),
            ring.modulus()
        )));
    }
    Ok(target)
}

/// Either a sign (the target ±Id) or an explicit matrix.
#[derive(Clone, Copy, Debug)]
enum Goal {
    Sign(Sign),
    Target(Mat2),
}

impl Goal {
    fn matrix(self, ring: &RingCtx) -> Mat2 {
        match self {
            Goal::Sign(s) => Mat2::signed_identity(ring, s),
            Goal::Target(m) => m,
        }
    }
}

fn goals(ring: &RingCtx, eps: Option<i64>, target: Option<&str>, report: &mut Report) -> Outcome<Vec<Goal>> {
    match (eps, target) {
        (Some(e), _) => {
            let s = sign_of(e)?;
            report.param("epsilon", s.as_i64());
            Ok(vec![Goal::Sign(s)])
        }
        (None, Some(t)) => {
            let m = parse_target(ring, t)?;
            report.param("target", json!(m.entries()));
            Ok(vec![Goal::Target(m)])
        }
        (None, None) => Ok(vec![Goal::Sign(Sign::Plus), Goal::Sign(Sign::Minus)]),
    }
}

fn goal_key(goal: Goal) -> String {
    match goal {
        Goal::Sign(s) => format!("eps={s}"),
        Goal::Target(_) => "count".to_owned(),
    }
}

// ---- engine comparison ----

fn engines_for(choice: EngineChoice) -> Vec<Engine> {
    match choice {
        EngineChoice::Formula => vec![Engine::Formula],
        EngineChoice::Recursion => vec![Engine::Recursion],
        EngineChoice::Oracle => vec![Engine::Oracle],
        EngineChoice::All => Engine::ALL.to_vec(),
    }
}

type Cells = Vec<(String, BigUint)>;

/// Runs `compute` for each length under every selected engine and assembles
/// rows. Under `all`, an engine that does not cover the parameters is skipped
/// with a note on stderr; at least two engines must remain.
fn compare(
    report: &mut Report,
    choice: EngineChoice,
    ns: &[usize],
    mut compute: impl FnMut(Engine, usize) -> quiddity::Result<Cells>,
) -> Outcome<Option<String>> {
    report.param("engine", format!("{choice:?}").to_lowercase());
    let all = choice == EngineChoice::All;
    let mut results: Vec<(Engine, Vec<Cells>)> = Vec::new();
    for engine in engines_for(choice) {
        let cells: quiddity::Result<Vec<Cells>> = ns.iter().map(|&n| compute(engine, n)).collect();
        match cells {
            Ok(c) => results.push((engine, c)),
            Err(e @ (Error::Unsupported(_) | Error::UseEvenLengthTheorem { .. } | Error::BudgetExceeded { .. }))
                if all =>
            {
                eprintln!("note: skipping the {engine} engine: {e}");
            }
            Err(e) => return Err(e.into()),
        }
    }
    if all && results.len() < 2 {
        return Err(usage("--engine all needs at least two engines that cover these parameters"));
    }
    let engine_label = results.iter().map(|(e, _)| e.name()).collect::<Vec<_>>().join(",");

    let mut disagreement = None;
    for (i, &n) in ns.iter().enumerate() {
        let (_, first) = &results[0];
        let base = &first[i];
        let mut agree = true;
        for (engine, cells) in &results[1..] {
            for ((key, a), (_, b)) in base.iter().zip(&cells[i]) {
                if a != b {
                    agree = false;
                    disagreement.get_or_insert_with(|| {
                        format!("n = {n}, {key}: {} = {a}, {engine} = {b}", results[0].0)
                    });
                }
            }
        }
        report.rows.push(Row {
            n,
            values: base.clone(),
            engine: engine_label.clone(),
            agree,
        });
    }
    Ok(disagreement)
}

// ---- commands ----

fn count(args: CountArgs) -> Outcome<Built> {
    let mut report = Report::default();
    report.param("command", "count");
    let ring = ring_of(&args.ring)?;
    echo_ring(&mut report, &ring);
    let ns = lengths(&args.len, 1)?;
    echo_lengths(&mut report, &ns);
    let goals = goals(&ring, args.epsilon, args.target.as_deref(), &mut report)?;
    let choice = args.common.engine.unwrap_or(match goals[0] {
        Goal::Target(m) if ![Sign::Plus, Sign::Minus].iter().any(|&s| m == Mat2::signed_identity(&ring, s)) => {
            EngineChoice::Recursion
        }
        _ => EngineChoice::Formula,
    });
    report.param("output", format!("{:?}", args.common.output).to_lowercase());
    let d = compare(&mut report, choice, &ns, |engine, n| {
        goals
            .iter()
            .map(|&g| Ok((goal_key(g), engine::count_target(&ring, n, &g.matrix(&ring), engine)?)))
            .collect()
    })?;
    Ok((report, args.common.output, d))
}

fn prime_power_of(ring: &RingCtx) -> Outcome<(u64, u32)> {
    ring.prime_power_parts()
        .ok_or_else(|| Failure::Library(Error::NotPrimePower(ring.modulus())))
}

fn sigma_report(
    ring: &RingCtx,
    ns: Vec<usize>,
    ell: Option<u32>,
    choice: EngineChoice,
    output: Output,
    command: &str,
) -> Outcome<Built> {
    let mut report = Report::default();
    report.param("command", command);
    echo_ring(&mut report, ring);
    let (p, r) = prime_power_of(ring)?;
    let ns: Vec<usize> = if ns.len() == 1 {
        if ns[0] % 2 == 1 {
            return Err(usage(format!("σ_n is defined for even n, got n = {}", ns[0])));
        }
        ns
    } else {
        ns.into_iter().filter(|n| n % 2 == 0).collect()
    };
    if ns.is_empty() {
        return Err(usage("the length range contains no even n"));
    }
    echo_lengths(&mut report, &ns);
    let ells: Vec<u32> = match ell {
        Some(l) if l == 0 || l > r => return Err(usage(format!("ell must lie in [1, {r}], got {l}"))),
        Some(l) => {
            report.param("ell", l);
            vec![l]
        }
        None => (1..=r).collect(),
    };
    report.param("output", format!("{output:?}").to_lowercase());
    let d = compare(&mut report, choice, &ns, |engine, n| {
        ells.iter()
            .map(|&l| Ok((format!("ell={l}"), engine::sigma(p, r, n, l, engine)?)))
            .collect()
    })?;
    Ok((report, output, d))
}

fn sigma(args: SigmaArgs) -> Outcome<Built> {
    let ring = ring_of(&args.ring)?;
    let ns = lengths(&args.len, 2)?;
    let choice = args.common.engine.unwrap_or(EngineChoice::Formula);
    sigma_report(&ring, ns, args.ell, choice, args.common.output, "sigma")
}

fn pi(args: PiArgs) -> Outcome<Built> {
    let mut report = Report::default();
    report.param("command", "pi");
    let ring = ring_of(&args.ring)?;
    echo_ring(&mut report, &ring);
    prime_power_of(&ring)?;
    let ns = lengths(&args.len, 3)?;
    if ns[0] < 3 {
        return Err(usage(format!("π_n needs n >= 3, got n = {}", ns[0])));
    }
    echo_lengths(&mut report, &ns);
    let goal = match goals(&ring, args.epsilon, args.target.as_deref(), &mut report)?.as_slice() {
        [g] => *g,
        _ => return Err(usage("give --epsilon or --target")),
    };
    let choice = args.common.engine.unwrap_or(EngineChoice::Recursion);
    report.param("output", format!("{:?}", args.common.output).to_lowercase());
    let target = goal.matrix(&ring);

    let d = if args.classes {
        report.param("classes", true);
        let Goal::Sign(sign) = goal else {
            return Err(usage("--classes needs --epsilon: class values hold for the targets ±Id only"));
        };
        let classes = Classes::new(&ring)?;
        let n_max = *ns.last().expect("non-empty");
        let mut by_class = None;
        compare(&mut report, choice, &ns, |engine, n| match engine {
            Engine::Formula => Err(Error::Unsupported("there is no closed formula for π".into())),
            Engine::Recursion => {
                if by_class.is_none() {
                    by_class = Some(pi_class_recursive(&ring, sign, n_max.max(4))?);
                }
                let row = &by_class.as_ref().expect("computed")[n - 3];
                Ok(row.iter().map(|(c, v)| (c.to_string(), v.clone())).collect())
            }
            Engine::Oracle => {
                let row = engine::pi(&ring, &target, n, engine)?;
                Ok(classes
                    .ids()
                    .into_iter()
                    .map(|c| {
                        let total: BigUint = ring
                            .elements()
                            .filter(|&x| classes.class_of(x) == c)
                            .map(|x| &row[x.value() as usize])
                            .sum();
                        (c.to_string(), total)
                    })
                    .collect())
            }
        })?
    } else {
        compare(&mut report, choice, &ns, |engine, n| {
            let row = engine::pi(&ring, &target, n, engine)?;
            Ok(row.into_iter().enumerate().map(|(u, v)| (format!("u={u}"), v)).collect())
        })?
    };
    Ok((report, args.common.output, d))
}

fn tau(args: TauArgs) -> Outcome<Built> {
    let mut report = Report::default();
    report.param("command", "tau");
    let ring = ring_of(&args.ring)?;
    echo_ring(&mut report, &ring);
    prime_power_of(&ring)?;
    let ns = lengths(&args.len, 3)?;
    if ns[0] < 3 {
        return Err(usage(format!("τ_n needs n >= 3, got n = {}", ns[0])));
    }
    echo_lengths(&mut report, &ns);
    let goal = match goals(&ring, args.epsilon, args.target.as_deref(), &mut report)?.as_slice() {
        [g] => *g,
        _ => return Err(usage("give --epsilon or --target")),
    };
    let choice = args.common.engine.unwrap_or(EngineChoice::Recursion);
    report.param("output", format!("{:?}", args.common.output).to_lowercase());
    let target = goal.matrix(&ring);
    let d = compare(&mut report, choice, &ns, |engine, n| {
        Ok(vec![("tau".to_owned(), engine::tau(&ring, &target, n, engine)?)])
    })?;
    Ok((report, args.common.output, d))
}

fn table(args: TableArgs) -> Outcome<Built> {
    let ring = ring_of(&args.ring)?;
    let output = args.common.output;
    match args.kind {
        TableKind::Quiddity => count(CountArgs {
            ring: RingArgs {
                modulus: Some(ring.modulus()),
                p: None,
                r: None,
            },
            len: LengthArgs {
                n: None,
                n_min: Some(args.n_min.unwrap_or(1)),
                n_max: Some(args.n_max),
            },
            epsilon: None,
            target: None,
            common: args.common,
        })
        .map(|(mut report, _, d)| {
            report.param("command", "table");
            report.param("table", "quiddity");
            (report, output, d)
        }),
        TableKind::Sigma => {
            let lo = args.n_min.unwrap_or(2);
            if lo == 0 || lo > args.n_max {
                return Err(usage("empty length range"));
            }
            let choice = args.common.engine.unwrap_or(EngineChoice::Formula);
            let (mut report, output, d) =
                sigma_report(&ring, (lo..=args.n_max).collect(), None, choice, output, "table")?;
            report.param("table", "sigma");
            Ok((report, output, d))
        }
    }
}

fn verify(args: VerifyArgs, out: &mut impl Write) -> Outcome<()> {
    let cfg = VerifyConfig {
        seed: args.seed,
        reduction_samples: args.samples,
        identity_samples: args.identity_samples,
    };
    let names: Vec<&str> = if args.suite.is_empty() {
        SUITES.to_vec()
    } else {
        args.suite.iter().map(String::as_str).collect()
    };
    let mut reports = Vec::new();
    for name in names {
        let report = verification::run_suite(name, &cfg).expect("validated suite name")?;
        reports.push(report);
    }
    let write = |out: &mut dyn Write| -> anyhow::Result<()> {
        match args.output {
            Output::Plain => {
                for r in &reports {
                    writeln!(out, "{r}")?;
                }
            }
            Output::Json => {
                let suites: Vec<Value> = reports
                    .iter()
                    .map(|r| json!({"name": r.name, "checks": r.checks, "passed": r.passed(), "mismatch": r.mismatch}))
                    .collect();
                let doc = json!({
                    "params": {"command": "verify", "seed": cfg.seed, "samples": cfg.reduction_samples,
                               "identity_samples": cfg.identity_samples},
                    "suites": suites,
                });
                serde_json::to_writer_pretty(&mut *out, &doc)?;
                writeln!(out)?;
            }
            Output::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(["suite", "checks", "passed", "mismatch"])?;
                for r in &reports {
                    w.write_record([
                        r.name.to_owned(),
                        r.checks.to_string(),
                        r.passed().to_string(),
                        r.mismatch.clone().unwrap_or_default(),
                    ])?;
                }
                w.flush()?;
            }
        }
        Ok(())
    };
    write(out)?;
    match reports.iter().find(|r| !r.passed()) {
        Some(r) => Err(Failure::Disagreement(format!(
            "suite {}: {}",
            r.name,
            r.mismatch.as_deref().unwrap_or_default()
        ))),
        None => Ok(()),
    }
}
