use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use quadcycles::dynamics::{classify_capped, QuadParam, DEFAULT_ITERATION_CAP};
use quadcycles::laws::{run_all, LawId, LawStatus};
use quadcycles::numbers::parse_rational;
use quadcycles::search::{run_search, write_csv, write_ndjson, SearchConfig};
use quadcycles::solver::solve_capped;
use quadcycles::zieve::{parse_poly, period_mod, zieve_check, PadicPoly, DEFAULT_PRECISION};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_LAW_FAIL: u8 = 2;
const EXIT_FPS_CANDIDATE: u8 = 3;

#[derive(Parser)]
#[command(name = "quadcycles", version, about = "Rational cycles of x^2 - c: solver, law audits, p-adic period checks, and parameter sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Trace the orbit of a starting point and print its classification.
    Orbit(OrbitArgs),
    /// Compute all rational periodic and preperiodic points for one c.
    Solve(SolveArgs),
    /// Run every applicable law checker against one c.
    Laws(SolveArgs),
    /// Sweep c = a/d^2 families, checking laws and hunting long cycles.
    Search(SearchArgs),
    /// Finite-precision p-adic period-theorem check for one polynomial.
    Zieve(ZieveArgs),
}

#[derive(Args)]
struct OrbitArgs {
    #[arg(long = "c")]
    c: String,
    #[arg(long = "x")]
    x: String,
    #[arg(long, default_value_t = DEFAULT_ITERATION_CAP)]
    max_iter: u64,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "c")]
    c: String,
    #[arg(long, default_value_t = DEFAULT_ITERATION_CAP)]
    max_iter: u64,
}

#[derive(Args)]
struct SearchArgs {
    /// Comma-separated denominators d (c = a/d^2).
    #[arg(long = "d", value_delimiter = ',', required = true)]
    d: Vec<u64>,
    #[arg(long)]
    a_min: i64,
    #[arg(long)]
    a_max: i64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output path; stdout when omitted. Escalations go to <out>.escalation.json.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, default_value_t = DEFAULT_ITERATION_CAP)]
    max_iter: u64,
    /// Skip the law suite (cycle-length escalation still applies).
    #[arg(long)]
    no_laws: bool,
    /// Accepted for config compatibility; all computation is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ZieveArgs {
    /// Polynomial in t, e.g. "t^2+t-1".
    #[arg(long)]
    poly: String,
    #[arg(long = "p")]
    p: u64,
    #[arg(long)]
    alpha: i64,
    /// Claimed exact period; computed at working precision when omitted.
    #[arg(long = "n")]
    n: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: u32,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version are successful exits; everything else is usage.
            let _ = e.print();
            return if e.exit_code() == 0 {
                ExitCode::from(EXIT_OK)
            } else {
                ExitCode::from(EXIT_USAGE)
            };
        }
    };
    let result = match cli.command {
        Command::Orbit(args) => cmd_orbit(args),
        Command::Solve(args) => cmd_solve(args, false),
        Command::Laws(args) => cmd_solve(args, true),
        Command::Search(args) => cmd_search(args),
        Command::Zieve(args) => cmd_zieve(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn cmd_orbit(args: OrbitArgs) -> quadcycles::Result<u8> {
    let c = QuadParam::new(parse_rational(&args.c)?)?;
    let x = parse_rational(&args.x)?;
    let orbit = classify_capped(&c, &x, args.max_iter)?;
    let payload = serde_json::json!({
        "c": args.c,
        "x": quadcycles::numbers::format_rational(&x),
        "kind": format!("{:?}", orbit.kind),
        "certificate": format!("{:?}", orbit.certificate),
        "trajectory": orbit
            .trajectory
            .iter()
            .map(quadcycles::numbers::format_rational)
            .collect::<Vec<_>>(),
    });
    println!("{payload:#}");
    Ok(EXIT_OK)
}

fn cmd_solve(args: SolveArgs, laws_only: bool) -> quadcycles::Result<u8> {
    let c = parse_rational(&args.c)?;
    let ps = solve_capped(&c, args.max_iter)?;
    let reports = run_all(&ps);
    if !laws_only {
        println!("{}", ps.to_json_string());
    }
    let mut any_fail = false;
    let mut fps_fail = false;
    for report in &reports {
        println!("{}", report.to_json_string());
        if report.status == LawStatus::Fail {
            any_fail = true;
            if report.law_id == LawId::FpsConjecture {
                fps_fail = true;
            }
        }
    }
    Ok(if fps_fail {
        EXIT_FPS_CANDIDATE
    } else if any_fail {
        EXIT_LAW_FAIL
    } else {
        EXIT_OK
    })
}

fn io_err(e: impl std::fmt::Display) -> quadcycles::Error {
    quadcycles::Error::Io(std::io::Error::other(e.to_string()))
}

fn cmd_search(args: SearchArgs) -> quadcycles::Result<u8> {
    let _ = args.seed;
    if args.jobs == 0 {
        return Err(quadcycles::Error::Argument("--jobs must be >= 1".into()));
    }
    let cfg = SearchConfig {
        d_values: args.d,
        a_min: args.a_min,
        a_max: args.a_max,
        laws_enabled: !args.no_laws,
        jobs: args.jobs,
        max_iter: args.max_iter,
    };
    let outcome = run_search(&cfg)?;

    let mut sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(File::create(path).map_err(io_err)?),
        None => Box::new(io::stdout().lock()),
    };
    match args.format {
        Format::Json => write_ndjson(&mut sink, &outcome.records)?,
        Format::Csv => write_csv(&mut sink, &outcome.records)?,
    }
    sink.flush().map_err(io_err)?;
    drop(sink);

    eprintln!(
        "{}",
        serde_json::to_string_pretty(&outcome.summary).map_err(io_err)?
    );

    if !outcome.escalations.is_empty() {
        let esc_path = match &args.out {
            Some(path) => format!("{path}.escalation.json"),
            None => "escalation.json".to_string(),
        };
        let mut f = File::create(&esc_path).map_err(io_err)?;
        let body = serde_json::to_string_pretty(&outcome.escalations).map_err(io_err)?;
        writeln!(f, "{body}").map_err(io_err)?;
        eprintln!("escalations written to {esc_path}");
    }

    let fps = outcome
        .records
        .iter()
        .any(|r| r.cycle_lengths.iter().any(|&l| l >= 4));
    let law_fail = outcome.records.iter().any(|r| !r.laws_failed.is_empty());
    Ok(if fps {
        EXIT_FPS_CANDIDATE
    } else if law_fail {
        EXIT_LAW_FAIL
    } else {
        EXIT_OK
    })
}

fn cmd_zieve(args: ZieveArgs) -> quadcycles::Result<u8> {
    let coeffs = parse_poly(&args.poly)?;
    let g = PadicPoly::new(coeffs, args.p, args.precision)?;
    let alpha = BigInt::from(args.alpha);
    let n = match args.n {
        Some(n) => n,
        None => period_mod(&g, &alpha, g.precision())?,
    };
    let data = zieve_check(&g, &alpha, n)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&data).map_err(io_err)?
    );
    Ok(if data.consistent { EXIT_OK } else { EXIT_LAW_FAIL })
}
