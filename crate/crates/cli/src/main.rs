use std::io::Read;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use witt_lab::verify::{self, Mutation, RunOptions, TrialPlan};
use witt_lab::{
    diff, teich_coefficients, E1Element, Error, Json, PadicElement, RingContext, WittVector,
};

#[derive(Parser)]
#[command(
    name = "witt-lab",
    version,
    about = "Witt vectors and the de Rham-Witt complex E_n over W(k)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a Witt vector as sum of s_phi(a_i) V^i(1).
    Decompose(InArg),
    /// Coefficients of the Teichmuller lift [a] in W_n.
    Teich {
        #[command(flatten)]
        ring: RingArgs,
        /// Integer, coefficient list such as [1,2], or element JSON.
        #[arg(long)]
        a: String,
        #[arg(long)]
        n: usize,
    },
    /// The differential d: W_n -> E_n^1.
    Diff(InArg),
    /// Apply F, V or R to a degree-0 (Witt) or degree-1 (E1) element.
    Apply {
        #[arg(long, value_enum)]
        map: MapArg,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
        deg: u8,
        #[command(flatten)]
        input: InArg,
    },
    /// Decompose an element of ker(W_n(A) -> W_n(A/p^m)).
    K0 {
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        input: InArg,
    },
    /// Run the law suite and print a report.
    Verify(VerifyArgs),
    /// Check the Frobenius congruence for one element and index.
    Congruence(CongruenceArgs),
}

#[derive(Args)]
struct InArg {
    /// File path, inline JSON, or - for standard input.
    #[arg(long = "in")]
    input: String,
}

#[derive(Args)]
struct RingArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    d: usize,
    /// Monic defining polynomial, constant term first, e.g. 1,0,1 or [1,0,1].
    #[arg(long)]
    f: Option<String>,
    #[arg(long = "M")]
    m: u32,
}

#[derive(Args)]
struct VerifyArgs {
    /// Plan JSON file, or - for standard input.
    #[arg(long)]
    plan: Option<String>,
    /// The default grid.
    #[arg(long, conflicts_with = "plan", required_unless_present = "plan")]
    default: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Seeded bug to inject.
    #[arg(long, value_parser = parse_mutation)]
    mutate: Option<Mutation>,
    /// Report 0 milliseconds everywhere so output is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct CongruenceArgs {
    /// Reproduce the p = 2 counterexample a = 2, i = 1.
    #[arg(long, conflicts_with_all = ["p", "d", "f", "m", "a", "i"])]
    p2_counterexample: bool,
    #[arg(long, required_unless_present = "p2_counterexample")]
    p: Option<u64>,
    #[arg(long, required_unless_present = "p2_counterexample")]
    d: Option<usize>,
    #[arg(long)]
    f: Option<String>,
    /// Working precision; defaults to 2i + 4.
    #[arg(long = "M")]
    m: Option<u32>,
    #[arg(long, required_unless_present = "p2_counterexample")]
    a: Option<String>,
    #[arg(long, required_unless_present = "p2_counterexample")]
    i: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapArg {
    #[value(name = "F")]
    F,
    #[value(name = "V")]
    V,
    #[value(name = "R")]
    R,
}

fn parse_mutation(s: &str) -> Result<Mutation, String> {
    s.parse::<Mutation>().map_err(|e| e.to_string())
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotInKernel(_) => 1,
            Error::PrecisionUnderflow(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        kind: "Usage".into(),
        message: message.into(),
    }
}

/// Standard output and exit code of a successful run.
struct Output {
    json: Value,
    code: u8,
}

impl Output {
    fn ok(json: Value) -> Self {
        Output { json, code: 0 }
    }
}

fn read_input(arg: &str) -> Result<Value, Failure> {
    let text = if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| usage(format!("stdin: {e}")))?;
        s
    } else if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| usage(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::from(Error::Malformed(e.to_string())))
}

fn parse_ints(s: &str) -> Result<Vec<i64>, Failure> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| usage(format!("not an integer list: {s:?}")))
        })
        .collect()
}

fn ring(p: u64, d: usize, f: Option<&str>, m: u32) -> Result<Arc<RingContext>, Failure> {
    Ok(match f {
        Some(f) => RingContext::new(p, d, parse_ints(f)?, m)?,
        None => RingContext::with_default_polynomial(p, d, m)?,
    })
}

/// `--a` as an integer, a coefficient list, or element JSON in `ctx`.
fn element(ctx: &Arc<RingContext>, a: &str) -> Result<PadicElement, Failure> {
    let t = a.trim();
    if t.starts_with('{') {
        let x = PadicElement::from_json_str(t)?;
        let c = x.context();
        if (c.p(), c.degree(), c.polynomial(), c.precision())
            != (ctx.p(), ctx.degree(), ctx.polynomial(), ctx.precision())
        {
            return Err(Error::ContextMismatch.into());
        }
        return Ok(x);
    }
    if t.starts_with('[') {
        return Ok(PadicElement::new(ctx, parse_ints(t)?, ctx.precision())?);
    }
    let k: BigInt = t
        .parse()
        .map_err(|_| usage(format!("not an element: {a:?}")))?;
    Ok(PadicElement::from_int(ctx, k))
}

fn run(cli: Cli) -> Result<Output, Failure> {
    match cli.command {
        Command::Decompose(InArg { input }) => {
            let x = WittVector::from_json(&read_input(&input)?)?;
            Ok(Output::ok(x.v_decompose()?.to_json()))
        }
        Command::Teich { ring: r, a, n } => {
            let ctx = ring(r.p, r.d, r.f.as_deref(), r.m)?;
            Ok(Output::ok(
                teich_coefficients(&element(&ctx, &a)?, n)?.to_json(),
            ))
        }
        Command::Diff(InArg { input }) => {
            let x = WittVector::from_json(&read_input(&input)?)?;
            Ok(Output::ok(diff(&x)?.to_json()))
        }
        Command::Apply { map, deg, input } => {
            let v = read_input(&input.input)?;
            let out = if deg == 0 {
                let x = WittVector::from_json(&v)?;
                match map {
                    MapArg::F => x.frobenius()?,
                    MapArg::V => x.verschiebung(),
                    MapArg::R => x.restrict()?,
                }
                .to_json()
            } else {
                let xi = E1Element::from_json(&v)?;
                match map {
                    MapArg::F => xi.frobenius()?,
                    MapArg::V => xi.verschiebung()?,
                    MapArg::R => xi.restrict()?,
                }
                .to_json()
            };
            Ok(Output::ok(out))
        }
        Command::K0 { m, input } => {
            let x = WittVector::from_json(&read_input(&input.input)?)?;
            Ok(Output::ok(x.k0_decompose(m)?.to_json()))
        }
        Command::Verify(args) => run_verify(args),
        Command::Congruence(args) => run_congruence(args),
    }
}

fn run_verify(args: VerifyArgs) -> Result<Output, Failure> {
    let mut plan = match &args.plan {
        Some(path) => {
            let v = read_input(path)?;
            TrialPlan::from_json_str(&v.to_string())?
        }
        None => TrialPlan::default_plan(0),
    };
    if let Some(seed) = args.seed {
        plan.seed = seed;
    }
    let threads = match std::env::var("WITT_LAB_THREADS") {
        Ok(s) if !s.trim().is_empty() => Some(
            s.trim()
                .parse::<usize>()
                .map_err(|_| usage(format!("WITT_LAB_THREADS={s:?} is not a count")))?,
        ),
        _ => None,
    };
    let opts = RunOptions {
        mutation: args.mutate,
        threads,
        timing: !args.no_timing,
    };
    let report = verify::check_axioms(&plan, &opts)?;
    let code = match report.status.as_str() {
        "pass" => 0,
        "fail" => 1,
        _ => 3,
    };
    let json = serde_json::to_value(&report).map_err(|e| usage(e.to_string()))?;
    Ok(Output { json, code })
}

fn run_congruence(args: CongruenceArgs) -> Result<Output, Failure> {
    if args.p2_counterexample {
        let fails = verify::check_p2_counterexample()?;
        return Ok(Output::ok(json!({ "holds": !fails })));
    }
    let (p, d, a, i) = (
        args.p.unwrap(),
        args.d.unwrap(),
        args.a.unwrap(),
        args.i.unwrap(),
    );
    let m = args.m.unwrap_or(2 * i + 4);
    let ctx = ring(p, d, args.f.as_deref(), m)?;
    let holds = verify::check_congruence(&element(&ctx, &a)?, i)?;
    Ok(Output {
        json: json!({ "holds": holds }),
        code: if holds { 0 } else { 1 },
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind::*;
            if matches!(
                e.kind(),
                DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let _ = e.print();
                return ExitCode::from(if e.kind() == DisplayHelpOnMissingArgumentOrSubcommand {
                    2
                } else {
                    0
                });
            }
            let text = e.to_string();
            let message: Vec<&str> = text
                .lines()
                .take_while(|l| !l.trim().is_empty())
                .map(str::trim)
                .collect();
            let message = message.join(" ");
            eprintln!(
                "{}",
                json!({ "error": "Usage", "message": message.trim_start_matches("error: ") })
            );
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(out) => {
            println!("{}", out.json);
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("{}", json!({ "error": f.kind, "message": f.message }));
            ExitCode::from(f.code)
        }
    }
}
