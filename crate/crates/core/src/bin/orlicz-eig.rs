use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use orlicz_eig::config::{parse_domain, parse_list, ExperimentConfig};
use orlicz_eig::eigensolver::{
    bbm_check, default_init, minimize_first, p2_matrix_oracle, second_upper_bound, stability_sweep, BAR_QUAD_TOL,
};
use orlicz_eig::props::{run_suite, SuiteOptions};
use orlicz_eig::report::{bar_csv, bar_table, emit, json_record};
use orlicz_eig::young::{bar_transform, check_inequalities};
use orlicz_eig::{Error, FunctionalContext, NodalField, Result};

const AFTER_HELP: &str = "\
CSV columns:
  eig, eig2      x,u               (eigenfunction at the mesh nodes)
  sweep          s,lambda,mu,residual,iterations
  bbm            s,seminorm,modular,target_seminorm,target_modular
  barg           t,G,G_bar,ratio

Exit codes: 0 success, 1 numerical failure, 2 configuration error.
ORLICZ_EIG_THREADS caps the worker threads.";

#[derive(Parser)]
#[command(name = "orlicz-eig", version, about = "Eigenvalues of the fractional g-Laplacian on an interval", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Growth exponents, structural flags and the inequality suite of a Young function
    ValidateYoung(Common),
    /// First eigenpair
    Eig(Common),
    /// Upper bound for the second eigenvalue
    Eig2(Common),
    /// First eigenvalues along s and the local limit problem
    Sweep(Common),
    /// Fractional seminorms of sin(pi x) against their local limit
    Bbm(Common),
    /// Tabulated limit Young function
    Barg(Common),
    /// Dense eigensolve for G = t^2/2
    OracleP2(Common),
    /// Full invariant suite on small meshes
    Props(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// Young function, e.g. power:2, powerlog:2, powersum:2,1,4,1
    #[arg(long)]
    young: Option<String>,
    /// Fractional order in (0, 1]
    #[arg(long)]
    s: Option<f64>,
    /// Comma-separated increasing orders in (0, 1)
    #[arg(long)]
    s_list: Option<String>,
    /// Number of elements
    #[arg(long)]
    n: Option<usize>,
    /// Interval endpoints a,b
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
    /// Luxemburg tolerance
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative gap accepted by sweep and bbm
    #[arg(long)]
    gap_tol: Option<f64>,
    /// Dimension of the limit transform
    #[arg(long)]
    n_dim: Option<usize>,
    /// Flat key = value configuration file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Emit CSV instead of JSON
    #[arg(long, conflicts_with = "json")]
    csv: bool,
    /// Emit JSON (default)
    #[arg(long)]
    json: bool,
    /// Print per-iteration diagnostics on stderr
    #[arg(long)]
    verbose: bool,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                ExperimentConfig::parse_str(&text)?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(v) = &self.young {
            cfg.young = v.clone();
        }
        if let Some(v) = self.s {
            cfg.s = v;
        }
        if let Some(v) = &self.s_list {
            cfg.s_list = parse_list("s_list", v)?;
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = &self.domain {
            cfg.domain = parse_domain(v)?;
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
            cfg.solver.seed = v;
        }
        if let Some(v) = &self.out {
            cfg.out = Some(v.clone());
        }
        if let Some(v) = self.gap_tol {
            cfg.gap_tol = v;
        }
        if let Some(v) = self.n_dim {
            cfg.n_dim = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Output of one command and whether it counts as success.
struct Outcome {
    text: String,
    ok: bool,
}

fn json_or_csv<T: Serialize>(name: &str, args: &Common, cfg: &ExperimentConfig, result: &T, csv: impl FnOnce() -> String) -> Result<String> {
    if args.csv {
        Ok(csv())
    } else {
        json_record(name, cfg, result)
    }
}

fn context(cfg: &ExperimentConfig, verbose: bool) -> Result<FunctionalContext> {
    let mut ctx = FunctionalContext::new(cfg.young_function()?, cfg.s, cfg.mesh()?, cfg.quadrature, cfg.tol)?;
    ctx.set_verbose(verbose);
    Ok(ctx)
}

fn run(command: &Command) -> Result<Outcome> {
    let (name, args) = match command {
        Command::ValidateYoung(a) => ("validate-young", a),
        Command::Eig(a) => ("eig", a),
        Command::Eig2(a) => ("eig2", a),
        Command::Sweep(a) => ("sweep", a),
        Command::Bbm(a) => ("bbm", a),
        Command::Barg(a) => ("barg", a),
        Command::OracleP2(a) => ("oracle-p2", a),
        Command::Props(a) => ("props", a),
    };
    let cfg = args.resolve()?;
    match command {
        Command::ValidateYoung(_) => {
            let y = cfg.young_function()?;
            let report = check_inequalities(&y, 100_000, cfg.seed)?;
            let text = json_or_csv(name, args, &cfg, &report, || {
                let mut s = String::from("check,samples,violations,worst_margin\n");
                for c in &report.checks {
                    s.push_str(&format!("{},{},{},{}\n", c.name, c.samples, c.violations, c.worst_margin));
                }
                s
            })?;
            Ok(Outcome { text, ok: report.passed() })
        }
        Command::Eig(_) => {
            let ctx = context(&cfg, args.verbose)?;
            let pair = minimize_first(&ctx, &default_init(ctx.mesh()), &cfg.solver)?;
            let text = json_or_csv(name, args, &cfg, &pair, || pair.field.to_csv())?;
            Ok(Outcome { text, ok: pair.converged })
        }
        Command::Eig2(_) => {
            let ctx = context(&cfg, args.verbose)?;
            let first = minimize_first(&ctx, &default_init(ctx.mesh()), &cfg.solver)?;
            let second = second_upper_bound(&ctx, &first, &cfg.solver)?;
            #[derive(Serialize)]
            struct Eig2<'a> {
                lambda1: f64,
                first_converged: bool,
                second: &'a orlicz_eig::EigenPair,
            }
            let result = Eig2 { lambda1: first.lambda, first_converged: first.converged, second: &second };
            let text = json_or_csv(name, args, &cfg, &result, || second.field.to_csv())?;
            Ok(Outcome { text, ok: first.converged })
        }
        Command::Sweep(_) => {
            let y = cfg.young_function()?;
            let r = stability_sweep(&y, &cfg.s_list, cfg.mesh()?, cfg.quadrature, cfg.tol, &cfg.solver)?;
            let ok = r.relative_gap.map_or(true, |g| g <= cfg.gap_tol);
            let text = json_or_csv(name, args, &cfg, &r, || r.to_csv())?;
            Ok(Outcome { text, ok })
        }
        Command::Bbm(_) => {
            let y = cfg.young_function()?;
            let mesh = cfg.mesh()?;
            let len = mesh.b - mesh.a;
            let u = NodalField::interpolate(|x| (std::f64::consts::PI * (x - mesh.a) / len).sin(), mesh)?;
            let table = bbm_check(&y, &u, &cfg.s_list, &cfg.quadrature, cfg.tol)?;
            let text = json_or_csv(name, args, &cfg, &table, || table.to_csv())?;
            Ok(Outcome { text, ok: table.gap <= cfg.gap_tol })
        }
        Command::Barg(_) => {
            let y = cfg.young_function()?;
            let bar = bar_transform(&y, cfg.n_dim, BAR_QUAD_TOL)?;
            let rows = bar_table(&y, &bar, 50);
            let text = json_or_csv(name, args, &cfg, &rows, || bar_csv(&rows))?;
            Ok(Outcome { text, ok: true })
        }
        Command::OracleP2(_) => {
            let ctx = context(&cfg, false)?;
            let o = p2_matrix_oracle(&ctx)?;
            let text = json_or_csv(name, args, &cfg, &o, || {
                format!("k,lambda\n1,{}\n2,{}\n", o.lambda1, o.lambda2)
            })?;
            Ok(Outcome { text, ok: true })
        }
        Command::Props(_) => {
            let opts = SuiteOptions { seed: cfg.seed, ..Default::default() };
            let report = run_suite(&opts)?;
            let text = json_or_csv(name, args, &cfg, &report, || {
                let mut s = String::from("check,passed,detail\n");
                for c in &report.checks {
                    s.push_str(&format!("{},{},\"{}\"\n", c.name, c.passed, c.detail));
                }
                s
            })?;
            Ok(Outcome { text, ok: report.passed() })
        }
    }
    .and_then(|outcome| {
        emit(cfg.out.as_deref(), &outcome.text)?;
        Ok(outcome)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    orlicz_eig::init_thread_pool();
    match run(&cli.command) {
        Ok(o) if o.ok => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}
