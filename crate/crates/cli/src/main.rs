use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use skb_core::basis::{lambda_cardinality, lambda_set};
use skb_core::cost::{cost, legendre_phi0_star, pairing_bracket, phi0};
use skb_core::rational::{parse_rational, to_canonical, Rational};
use skb_core::sections::{certified_valuation_profile, chart_expand};
use skb_core::verify::verify_degree;
use skb_core::{
    BasisDescriptor, BuildError, Builder, CertificationError, VerifyError, VerifyOptions,
};

const MARGIN_ENV: &str = "SKB_TRUNC_MARGIN";

#[derive(Parser, Debug)]
#[command(
    name = "skb",
    version,
    about = "Build and certify valuatively independent section bases"
)]
struct Cli {
    /// Added to the default truncation degree 4d. Overrides SKB_TRUNC_MARGIN.
    #[arg(long, global = true, allow_negative_numbers = true)]
    truncation_margin: Option<i64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Evaluate the cost c(t, t∨) with its floor indices.
    Cost {
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        t: Rational,
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        tv: Rational,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate Φ0(t).
    Phi0 {
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        t: Rational,
    },
    /// Evaluate the Legendre transform Φ0*(t∨).
    Legendre {
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        tv: Rational,
    },
    /// Evaluate the pairing [t, t∨].
    Pairing {
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        t: Rational,
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        tv: Rational,
    },
    /// List the bad terms of S(a, b) for a > b ≥ 1.
    Lambda {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long)]
        json: bool,
    },
    /// Build the basis of a given degree and write it as JSON.
    Build {
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the chart expansion of S(a, b) on an edge up to total degree D.
    Expand(SeriesArgs),
    /// Certified valuation profile of S(a, b) on an edge, reading to degree D.
    Val(SeriesArgs),
    /// Verify a basis, given as a file or built from a degree.
    Verify {
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        degree: Option<u32>,
        #[arg(long)]
        file: Option<PathBuf>,
        /// Write the certificate here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the cost on a rectangular grid as CSV rows t,tv,cost.
    SampleCost {
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        t_min: Rational,
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        t_max: Rational,
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        tv_min: Rational,
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        tv_max: Rational,
        #[arg(long, value_parser = rational_arg)]
        step: Rational,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct SeriesArgs {
    #[arg(long)]
    a: u32,
    #[arg(long)]
    b: u32,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..3))]
    edge: u8,
    #[arg(long = "D")]
    d: u32,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Verification(String),
    Certification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Verification(_) => 1,
            Self::Certification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Usage(m) | Self::Verification(m) | Self::Certification(m) => m,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::Usage(e.to_string())
    }
}

fn margin(cli: &Cli) -> Result<i64, Failure> {
    if let Some(m) = cli.truncation_margin {
        return Ok(m);
    }
    match std::env::var(MARGIN_ENV) {
        Ok(raw) => raw.trim().parse::<u32>().map(i64::from).map_err(|_| {
            Failure::Usage(format!("{MARGIN_ENV} must be an integer >= 0, got `{raw}`"))
        }),
        Err(_) => Ok(0),
    }
}

fn build_failure(e: BuildError, margin: i64) -> Failure {
    match e {
        BuildError::Certification { a, b, source } => {
            let hint = match source.required_trunc() {
                Some(req) => req as i64 - 4 * (a + b) as i64,
                None => margin + 4,
            }
            .max(margin + 1);
            Failure::Certification(format!(
                "could not certify S({a}, {b}): {source}; try --truncation-margin {hint}"
            ))
        }
        e @ (BuildError::ZeroDegree
        | BuildError::NotAboveDiagonal { .. }
        | BuildError::NotMixed { .. }
        | BuildError::NotInLambda { .. }) => Failure::Usage(e.to_string()),
        other => Failure::Verification(format!("construction failed: {other}")),
    }
}

fn verify_failure(e: VerifyError, margin: i64) -> Failure {
    match e {
        VerifyError::Build(b) => build_failure(b, margin),
        e @ VerifyError::Certification { .. } => {
            Failure::Certification(format!("{e}; try --truncation-margin {}", margin + 4))
        }
        other => Failure::Usage(other.to_string()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn check_ab(a: u32, b: u32) -> Result<(), Failure> {
    if a + b == 0 {
        return Err(Failure::Usage("need a > 0 or b > 0".into()));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let margin = margin(cli)?;
    match &cli.command {
        Command::Cost { t, tv, json } => {
            let c = cost(t, tv);
            if *json {
                emit(None, &to_json(&c))?;
            } else {
                println!(
                    "{}\nk = {}, l = {}, m = {}",
                    to_canonical(&c.value),
                    c.k,
                    c.l,
                    c.m
                );
            }
        }
        Command::Phi0 { t } => println!("{}", to_canonical(&phi0(t))),
        Command::Legendre { tv } => println!("{}", to_canonical(&legendre_phi0_star(tv))),
        Command::Pairing { t, tv } => println!("{}", to_canonical(&pairing_bracket(t, tv))),
        Command::Lambda { a, b, json } => {
            let (a, b) = (*a, *b);
            let entries = lambda_set(a, b).map_err(|e| Failure::Usage(e.to_string()))?;
            let card = lambda_cardinality(a, b).map_err(|e| Failure::Usage(e.to_string()))?;
            if *json {
                emit(None, &to_json(&entries))?;
            } else {
                let list: Vec<String> = entries
                    .iter()
                    .map(|e| format!("({}, {})", e.m, e.s))
                    .collect();
                println!("[{}]", list.join(", "));
                let status = if entries.len() == card {
                    "ok"
                } else {
                    "MISMATCH"
                };
                println!(
                    "cardinality {} vs (b + gcd(a-1, b) - gcd(a, b) - 1)/2 = {card}: {status}",
                    entries.len()
                );
                if a % b == 0 {
                    println!("note: a multiple of b");
                }
            }
        }
        Command::Build { degree, out } => {
            let basis = Builder::with_margin(margin)
                .build_basis(*degree)
                .map_err(|e| build_failure(e, margin))?;
            emit(out.as_deref(), &to_json(&basis))?;
        }
        Command::Expand(args) => {
            check_ab(args.a, args.b)?;
            let s = Builder::with_margin(margin)
                .build_s(args.a, args.b)
                .map_err(|e| build_failure(e, margin))?;
            let series =
                chart_expand(&s, args.edge, args.d).map_err(|e| Failure::Usage(e.to_string()))?;
            println!("{series}");
        }
        Command::Val(args) => {
            check_ab(args.a, args.b)?;
            let s = Builder::with_margin(margin)
                .build_s(args.a, args.b)
                .map_err(|e| build_failure(e, margin))?;
            let profile = certified_valuation_profile(&s, args.edge, args.d).map_err(|e| {
                let hint = match e.required_trunc() {
                    Some(req) => format!("; rerun with --D {req}"),
                    None => String::new(),
                };
                match e {
                    CertificationError::ZeroSection => Failure::Usage(e.to_string()),
                    _ => Failure::Certification(format!("{e}{hint}")),
                }
            })?;
            emit(None, &to_json(&profile))?;
        }
        Command::Verify { degree, file, out } => {
            let opts = VerifyOptions::with_margin(margin);
            let cert = match (degree, file) {
                (Some(d), _) => verify_degree(*d, &opts),
                (None, Some(path)) => {
                    let text = fs::read_to_string(path)?;
                    let basis: BasisDescriptor = serde_json::from_str(&text)
                        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                    skb_core::verify_theorem(&basis, &opts)
                }
                (None, None) => unreachable!("clap requires one of them"),
            }
            .map_err(|e| verify_failure(e, margin))?;
            emit(out.as_deref(), &to_json(&cert))?;
            if !cert.verdict {
                let mut msg = format!("degree {}: verification failed", cert.degree);
                if !cert.leading_ok {
                    msg.push_str("\n  leading form s_m = σ_m + t·s'_m violated");
                }
                for c in &cert.counterexamples {
                    let _ = write!(
                        msg,
                        "\n  section {:?} edge {} differs on [{}, {}]: expected {}, got {}",
                        (c.m.edge, c.m.a, c.m.b),
                        c.edge,
                        to_canonical(&c.r_lo),
                        to_canonical(&c.r_hi),
                        serde_json::to_string(&c.expected).expect("serializable"),
                        serde_json::to_string(&c.actual).expect("serializable"),
                    );
                }
                if !cert.independence_ok {
                    msg.push_str("\n  repeated slopes on a generic subinterval");
                }
                return Err(Failure::Verification(msg));
            }
            eprintln!(
                "degree {}: {} sections verified on all edges; independence certified",
                cert.degree,
                cert.sections.len()
            );
        }
        Command::SampleCost {
            t_min,
            t_max,
            tv_min,
            tv_max,
            step,
            out,
        } => {
            if *step <= Rational::from_integer(0.into()) {
                return Err(Failure::Usage("--step must be positive".into()));
            }
            let mut csv = String::from("t,tv,cost\n");
            let mut t = t_min.clone();
            while t <= *t_max {
                let mut tv = tv_min.clone();
                while tv <= *tv_max {
                    let c = cost(&t, &tv);
                    let _ = writeln!(
                        csv,
                        "{},{},{}",
                        to_canonical(&t),
                        to_canonical(&tv),
                        to_canonical(&c.value)
                    );
                    tv += step;
                }
                t += step;
            }
            emit(out.as_deref(), &csv)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
