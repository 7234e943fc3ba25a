use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use alpha_harmonic::constants::{self, ConstantKind};
use alpha_harmonic::extension::partials;
use alpha_harmonic::harness::{self, SweepConfig, TheoremId};
use alpha_harmonic::{AlphaParam, BoundaryFunction, DiskPoint, Error, LebesgueExponent, QuadratureSpec};

#[derive(Parser)]
#[command(name = "ahx", version, about = "alpha-harmonic extensions, sharp constants and inequality checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate u and its first-order partials at one point.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        boundary: String,
        /// r,theta
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Print a constant, or its supremum when --r is omitted.
    Constants {
        #[arg(long)]
        kind: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        r: Option<f64>,
    },
    /// Run a verification sweep and write CSV (and optionally JSON).
    Verify {
        /// Restrict to one theorem; defaults to the config's list.
        #[arg(long)]
        theorem: Option<String>,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write FILE.json next to the CSV.
        #[arg(long)]
        json: bool,
    },
    /// Normalized extremal ratios against their target constant.
    Sharpness {
        #[arg(long)]
        kind: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value = "2")]
        p: String,
        /// Comma-separated list.
        #[arg(long, default_value = "0.9,0.99,0.999")]
        rho: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_p(s: &str) -> Result<LebesgueExponent, Error> {
    let p = match s.trim() {
        "inf" | "infinity" => f64::INFINITY,
        t => t.parse::<f64>().map_err(|_| Error::Parse {
            token: t.into(),
            message: "not a number".into(),
        })?,
    };
    LebesgueExponent::new(p)
}

fn usage(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn numeric(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_non_convergence() { 3 } else { 2 })
}

fn run() -> Result<ExitCode, ExitCode> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Eval { alpha, boundary, point, tol } => {
            let a = AlphaParam::new(alpha).map_err(usage)?;
            let f = BoundaryFunction::parse(&boundary).map_err(usage)?;
            let (r, th) = point
                .split_once(',')
                .and_then(|(r, t)| Some((r.trim().parse::<f64>().ok()?, t.trim().parse::<f64>().ok()?)))
                .ok_or_else(|| usage(Error::Parse { token: point.clone(), message: "expected R,THETA".into() }))?;
            let z = DiskPoint::new(r, th).map_err(usage)?;
            let spec = QuadratureSpec::with_tol(tol).map_err(|e| usage(e.into()))?;
            let p = partials(&a, &f, &z, &spec).map_err(numeric)?;
            for (name, v) in [("u", p.u), ("u_r", p.u_r), ("u_theta", p.u_theta), ("u_z", p.u_z), ("u_zbar", p.u_zbar)] {
                println!("{name:8} {:+.15e} {:+.15e}i", v.re, v.im);
            }
            println!("nodes    {}", p.nodes);
        }
        Cmd::Constants { kind, alpha, p, r } => {
            let kind = ConstantKind::parse(&kind).map_err(usage)?;
            let a = AlphaParam::new(alpha).map_err(usage)?;
            let p = p.as_deref().map(parse_p).transpose().map_err(usage)?;
            let spec = QuadratureSpec::default();
            let v = constants::constant(kind, &a, p.as_ref(), r, &spec).map_err(numeric)?;
            println!("{}", serde_json::to_string_pretty(&v).map_err(|e| usage(e.into()))?);
        }
        Cmd::Verify { theorem, config, out, json } => {
            let mut cfg = SweepConfig::from_file(&config).map_err(usage)?;
            if let Some(t) = theorem {
                cfg.theorems = vec![TheoremId::parse(&t).map_err(usage)?];
            }
            let report = harness::run_sweep(&cfg).map_err(numeric)?;
            let file = File::create(&out).map_err(|e| usage(e.into()))?;
            harness::write_csv(&report.records, BufWriter::new(file)).map_err(usage)?;
            if json {
                let path = out.with_extension("json");
                let file = File::create(&path).map_err(|e| usage(e.into()))?;
                harness::write_json(&report.records, BufWriter::new(file)).map_err(usage)?;
            }
            let failed: Vec<_> = report.failures().collect();
            eprintln!("{} records, {} failed, {} non-converged", report.records.len(), failed.len(), report.non_converged);
            for r in failed {
                eprintln!("FAIL {} alpha={} p={:?} r={:?} {} lhs={} rhs={} {}", r.theorem, r.alpha, r.p, r.r, r.boundary, r.lhs, r.rhs, r.notes);
            }
            return Ok(ExitCode::from(report.exit_code() as u8));
        }
        Cmd::Sharpness { kind, alpha, p, rho, out } => {
            let kind = ConstantKind::parse(&kind).map_err(usage)?;
            let a = AlphaParam::new(alpha).map_err(usage)?;
            let p = parse_p(&p).map_err(usage)?;
            let rhos = rho
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| usage(Error::Parse { token: rho.clone(), message: "expected a comma-separated list".into() }))?;
            let rows = harness::sharpness_study(kind, &a, &p, &rhos, &QuadratureSpec::default()).map_err(numeric)?;
            match out {
                Some(path) => {
                    let file = File::create(&path).map_err(|e| usage(e.into()))?;
                    harness::write_sharpness_csv(&rows, BufWriter::new(file)).map_err(usage)?;
                }
                None => harness::write_sharpness_csv(&rows, io::stdout()).map_err(usage)?,
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run() {
        Ok(c) | Err(c) => c,
    }
}
