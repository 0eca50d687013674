use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use sw_asymptotics::diophantine::{witness_search, witness_search_pair};
use sw_asymptotics::{QParam, Scalar};
use swasym_cli::report::{summary_json, write_pairs_csv, write_rows, write_witnesses_csv};
use swasym_cli::{
    canonical, canonical_all, parse_complex, run_sweep, write_report, EvalArgs, EvalRecord, EvaluatorRegistry,
    Format, PochLength, SweepConfig,
};

/// `1/3`, `0.25` or a token expression, as a float.
fn fraction(s: &str) -> Result<f64, String> {
    s.parse::<Scalar>().map(|x| x.value()).map_err(|e| e.to_string())
}

#[derive(Parser)]
#[command(name = "swasym", version, about = "Stieltjes-Wigert Plancherel-Rotach asymptotics: evaluation and verification sweeps")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one special function and print {value_re, value_im, tail_bound}.
    Eval(EvalCmd),
    /// List approximation witnesses as CSV.
    Witness(WitnessCmd),
    /// Verify one regime over a sweep; exit 0 iff the bound holds past some n_min.
    Verify(Box<VerifyCmd>),
    /// Verify several regimes, one report pair per case.
    Sweep(SweepCmd),
}

#[derive(Args)]
struct ZArgs {
    /// Complex argument, e.g. `1+0.5i`.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["z_re", "z_im"])]
    z: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    z_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    z_im: Option<f64>,
}

impl ZArgs {
    fn get(&self) -> Result<Option<Complex64>> {
        if let Some(s) = &self.z {
            return parse_complex(s).map(Some);
        }
        match (self.z_re, self.z_im) {
            (None, None) => Ok(None),
            (re, im) => Ok(Some(Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0)))),
        }
    }
}

#[derive(Args)]
struct EvalCmd {
    /// One of Aq, Bq, theta_series, theta_product, qpoch.
    function: String,
    #[arg(long)]
    q: f64,
    #[command(flatten)]
    z: ZArgs,
    /// Pochhammer base point.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Pochhammer length: integer or `inf`.
    #[arg(long)]
    n: Option<PochLength>,
    #[arg(long, default_value_t = 1e-15)]
    tol: f64,
}

#[derive(Args)]
struct WitnessCmd {
    #[arg(long, allow_hyphen_values = true)]
    theta: Scalar,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    beta: Scalar,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long)]
    nmax: u64,
    /// Second target for simultaneous witnesses.
    #[arg(long, allow_hyphen_values = true, requires = "beta2")]
    theta2: Option<Scalar>,
    #[arg(long, allow_hyphen_values = true, requires = "theta2")]
    beta2: Option<Scalar>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyCmd {
    /// JSON file with SweepConfig fields.
    #[arg(long, conflicts_with = "canonical")]
    config: Option<PathBuf>,
    /// Start from the built-in reference sweep of --case.
    #[arg(long)]
    canonical: bool,
    #[arg(long = "case")]
    case_id: Option<u8>,
    #[arg(long)]
    q: Option<f64>,
    #[command(flatten)]
    z: ZArgs,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<Scalar>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<Scalar>,
    #[arg(long, value_parser = fraction)]
    lambda: Option<f64>,
    #[arg(long, value_parser = fraction)]
    lambda1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<Scalar>,
    #[arg(long, allow_hyphen_values = true)]
    beta1: Option<Scalar>,
    #[arg(long, allow_hyphen_values = true)]
    beta2: Option<Scalar>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    nmin: Option<u64>,
    #[arg(long)]
    nmax: Option<u64>,
    #[arg(long)]
    nstep: Option<u64>,
    /// Rows file; the summary goes beside it as `<stem>.summary.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

impl VerifyCmd {
    fn config(&self) -> Result<SweepConfig> {
        let mut cfg = if let Some(path) = &self.config {
            SweepConfig::from_json_file(path)?
        } else if self.canonical {
            let id = self.case_id.ok_or_else(|| anyhow!("--canonical needs --case"))?;
            canonical(id).ok_or_else(|| anyhow!("no case {id}; cases are 1 to 7"))?
        } else {
            let need = |name: &str| anyhow!("--{name} is required without --config or --canonical");
            let z = self.z.get()?.ok_or_else(|| need("z"))?;
            let nmin = self.nmin.unwrap_or(1);
            SweepConfig::new(
                self.case_id.ok_or_else(|| need("case"))?,
                self.q.ok_or_else(|| need("q"))?,
                z,
                self.tau.clone().ok_or_else(|| need("tau"))?,
                self.theta.clone().ok_or_else(|| need("theta"))?,
                nmin,
                self.nmax.ok_or_else(|| need("nmax"))?,
            )
        };
        if self.config.is_some() || self.canonical {
            if let Some(id) = self.case_id {
                if id != cfg.case_id {
                    bail!("--case {id} disagrees with configured case {}", cfg.case_id);
                }
            }
            if let Some(q) = self.q {
                cfg.q = q;
            }
            if let Some(z) = self.z.get()? {
                (cfg.z_re, cfg.z_im) = (z.re, z.im);
            }
            if let Some(t) = &self.tau {
                cfg.tau = t.clone();
            }
            if let Some(t) = &self.theta {
                cfg.theta = t.clone();
            }
            if let Some(n) = self.nmin {
                cfg.n_min = n;
            }
            if let Some(n) = self.nmax {
                cfg.n_max = n;
            }
        }
        macro_rules! overlay {
            ($($field:ident <- $flag:expr),* $(,)?) => {
                $(if let Some(v) = $flag.clone() { cfg.$field = Some(v); })*
            };
        }
        overlay!(
            lambda <- self.lambda,
            lambda1 <- self.lambda1,
            beta <- self.beta,
            beta1 <- self.beta1,
            beta2 <- self.beta2,
            rho <- self.rho,
            n_step <- self.nstep,
            out <- self.out,
        );
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(j) = self.jobs {
            cfg.jobs = j;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct SweepCmd {
    /// JSON file holding an array of SweepConfig records.
    #[arg(long, conflicts_with = "canonical", required_unless_present = "canonical")]
    config: Option<PathBuf>,
    /// All seven built-in reference sweeps.
    #[arg(long)]
    canonical: bool,
    /// Directory for `case<N>.csv` / `case<N>.summary.json`.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    jobs: Option<usize>,
}

fn eval(cmd: &EvalCmd) -> Result<ExitCode> {
    let f = EvaluatorRegistry::standard().get(&cmd.function)?;
    let args = EvalArgs {
        q: QParam::new(cmd.q)?,
        z: cmd.z.get()?,
        a: cmd.a.as_deref().map(parse_complex).transpose()?,
        n: cmd.n,
        tol: cmd.tol,
    };
    let record = EvalRecord::from(f.eval(&args)?);
    println!("{}", serde_json::to_string(&record)?);
    Ok(ExitCode::SUCCESS)
}

fn witness(cmd: &WitnessCmd) -> Result<ExitCode> {
    let mut buf = Vec::new();
    match (&cmd.theta2, &cmd.beta2) {
        (Some(t2), Some(b2)) => {
            let ws = witness_search_pair(&cmd.theta, t2, &cmd.beta, b2, cmd.rho, cmd.nmax)?;
            write_pairs_csv(&ws, &mut buf)?;
        }
        _ => {
            let ws = witness_search(&cmd.theta, &cmd.beta, cmd.rho, cmd.nmax)?;
            write_witnesses_csv(&ws, &mut buf)?;
        }
    }
    match &cmd.out {
        Some(p) => std::fs::write(p, &buf).with_context(|| format!("writing {}", p.display()))?,
        None => io::stdout().write_all(&buf)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn verify(cmd: &VerifyCmd) -> Result<ExitCode> {
    let cfg = cmd.config()?;
    let report = run_sweep(&cfg)?;
    let summary = summary_json(&report.summary)?;
    match &cfg.out {
        Some(path) => {
            write_report(&report, cfg.format, path)?;
            print!("{summary}");
        }
        None => {
            write_rows(&report.rows, cfg.format, io::stdout().lock())?;
            eprint!("{summary}");
        }
    }
    Ok(status(report.summary.all_within_after_n_min))
}

fn sweep(cmd: &SweepCmd) -> Result<ExitCode> {
    let configs = match &cmd.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<Vec<SweepConfig>>(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => canonical_all(),
    };
    let mut all_ok = true;
    for mut cfg in configs {
        if let Some(f) = cmd.format {
            cfg.format = f;
        }
        if let Some(j) = cmd.jobs {
            cfg.jobs = j;
        }
        let ext = match cfg.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        let path = cmd.out_dir.join(format!("case{}.{ext}", cfg.case_id));
        let report = run_sweep(&cfg).with_context(|| format!("case {}", cfg.case_id))?;
        write_report(&report, cfg.format, &path)?;
        let s = &report.summary;
        let n_min = s.n_min_within.map_or("none".to_string(), |n| n.to_string());
        println!(
            "case {}: rows={} n_min_within={} max_err_at_tail={:.3e} ok={}",
            s.case,
            report.rows.len(),
            n_min,
            s.max_err_at_tail,
            s.all_within_after_n_min
        );
        all_ok &= s.all_within_after_n_min;
    }
    Ok(status(all_ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Command::Eval(c) => eval(c),
        Command::Witness(c) => witness(c),
        Command::Verify(c) => verify(c),
        Command::Sweep(c) => sweep(c),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
