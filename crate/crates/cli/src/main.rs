mod run;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lowdeg::advantage::AdvantageMethod;
use lowdeg::basis::SignalScale;
use lowdeg::config::{Command, ExperimentConfig, ModelKind, SCHEMA_VERSION};
use lowdeg::exact::Number;
use lowdeg::models::{ModelParams, RemovalPolicy};
use lowdeg::reduction::EstimatorKind;
use serde_json::json;

const THREADS_ENV: &str = "LOWDEG_THREADS";

#[derive(Parser)]
#[command(
    name = "lowdeg",
    version,
    about = "Low-degree advantage experiments on random graph models"
)]
struct Cli {
    /// Worker threads; defaults to all cores. 1 gives a fully sequential run.
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,
    /// Output path: a directory for `sample`, a CSV file for `bounds-audit`,
    /// a JSON file otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Default)]
struct ParamArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    /// Degree budget.
    #[arg(long = "D")]
    degree: Option<usize>,
    /// Cycle-length constant.
    #[arg(long = "N")]
    cycle_len: Option<usize>,
}

impl ParamArgs {
    fn build(&self) -> lowdeg::Result<ModelParams> {
        let n = self.n.ok_or_else(|| lowdeg::Error::Parse("--n is required".into()))?;
        let num = |s: &Option<String>| s.as_deref().map(Number::parse).transpose();
        let mut m = ModelParams::new(n);
        m.p = num(&self.p)?;
        m.s = num(&self.s)?;
        m.q = num(&self.q)?;
        m.rho = num(&self.rho)?;
        m.lambda = num(&self.lambda)?;
        m.k = self.k;
        m.eps = num(&self.eps)?;
        m.delta = num(&self.delta)?;
        m.degree = self.degree;
        m.cycle_len = self.cycle_len;
        m.validate()?;
        Ok(m)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw graphs from a model.
    Sample {
        #[arg(long)]
        model: ModelKind,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// Only remove edges from listed subgraphs that are still intact.
        #[arg(long)]
        skip_broken: bool,
    },
    /// Low-degree advantage by exhaustive enumeration.
    Adv {
        #[arg(long)]
        model: ModelKind,
        #[command(flatten)]
        params: ParamArgs,
        /// Condition on the hidden permutation, e.g. "pi(1)=1" (1-based).
        #[arg(long)]
        condition: Option<String>,
        #[arg(long, value_parser = parse_method)]
        method: Option<AdvantageMethod>,
        #[arg(long)]
        exact: bool,
    },
    /// Advantage of an M-coordinate hidden-sample problem.
    Hidden {
        #[arg(long = "M")]
        m: usize,
        #[arg(long)]
        base_spec: PathBuf,
        #[arg(long = "D")]
        degree: Option<usize>,
        #[arg(long)]
        exact: bool,
    },
    /// Table of dual coefficients and the norm of the dual vector.
    Xi {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        asymptotic: bool,
    },
    /// Residuals of the dual linear system and the duality comparison.
    DualCheck {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        asymptotic: bool,
    },
    /// Numeric audits of the enumeration and moment bounds.
    BoundsAudit {
        #[arg(long)]
        suite: lowdeg::bounds::AuditSuite,
        /// JSON file with model parameters.
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        slack: Option<f64>,
    },
    /// Matching estimators turned into one-sided tests.
    Reduce {
        #[arg(long)]
        estimator: EstimatorKind,
        #[arg(long, default_value = "corr-er")]
        model: ModelKind,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 0.5)]
        lambda_mix: f64,
        #[arg(long, default_value_t = 0.5)]
        c: f64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        near_one: Option<f64>,
        #[arg(long)]
        bounded_below: Option<f64>,
    },
    /// Rooted tree counts and the Otter constant estimate.
    Otter {
        #[arg(long, default_value_t = 30)]
        max_n: usize,
    },
    /// Runs the built-in invariant checks.
    Verify,
    /// Runs an experiment described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_method(s: &str) -> Result<AdvantageMethod, String> {
    match s {
        "product" | "product-basis" | "product_basis" => Ok(AdvantageMethod::ProductBasis),
        "gram-schmidt" | "gram_schmidt" => Ok(AdvantageMethod::GramSchmidt),
        "rayleigh" => Ok(AdvantageMethod::Rayleigh),
        other => Err(format!("unknown method {other}")),
    }
}

fn scale(asymptotic: bool) -> SignalScale {
    if asymptotic {
        SignalScale::Asymptotic
    } else {
        SignalScale::Exact
    }
}

fn to_config(cmd: Cmd, out: Option<PathBuf>) -> Result<ExperimentConfig, run::Failure> {
    let usage = run::Failure::usage;
    let mut cfg = match cmd {
        Cmd::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| usage(format!("cannot read {}: {e}", config.display())))?;
            let mut cfg = ExperimentConfig::from_json(&text).map_err(|e| usage(e.to_string()))?;
            if out.is_some() {
                cfg.output = out;
            }
            return Ok(cfg);
        }
        Cmd::Sample {
            model,
            params,
            seed,
            trials,
            skip_broken,
        } => {
            let mut c = ExperimentConfig::new(Command::Sample);
            c.model = Some(model);
            c.params = Some(params.build().map_err(|e| usage(e.to_string()))?);
            c.seed = seed;
            c.trials = trials;
            if skip_broken {
                c.flags.removal = RemovalPolicy::SkipBroken;
            }
            c
        }
        Cmd::Adv {
            model,
            params,
            condition,
            method,
            exact,
        } => {
            let mut c = ExperimentConfig::new(Command::Adv);
            c.model = Some(model);
            c.params = Some(params.build().map_err(|e| usage(e.to_string()))?);
            c.flags.condition = condition;
            c.flags.method = method;
            c.flags.exact = exact;
            c
        }
        Cmd::Hidden {
            m,
            base_spec,
            degree,
            exact,
        } => {
            let mut c = ExperimentConfig::new(Command::Hidden);
            c.flags.m = Some(m);
            c.flags.base_spec = Some(base_spec);
            c.flags.exact = exact;
            c.flags.degree = degree;
            c
        }
        Cmd::Xi {
            params,
            exact,
            asymptotic,
        } => dual_config(Command::Xi, &params, exact, asymptotic)?,
        Cmd::DualCheck {
            params,
            exact,
            asymptotic,
        } => dual_config(Command::DualCheck, &params, exact, asymptotic)?,
        Cmd::BoundsAudit { suite, params, slack } => {
            let text = std::fs::read_to_string(&params)
                .map_err(|e| usage(format!("cannot read {}: {e}", params.display())))?;
            let p: ModelParams = serde_json::from_str(&text).map_err(|e| usage(format!("params file: {e}")))?;
            p.validate().map_err(|e| usage(e.to_string()))?;
            let mut c = ExperimentConfig::new(Command::BoundsAudit);
            c.params = Some(p);
            c.flags.suite = Some(suite);
            if let Some(s) = slack {
                c.slack = s;
            }
            c
        }
        Cmd::Reduce {
            estimator,
            model,
            params,
            lambda_mix,
            c,
            trials,
            seed,
            near_one,
            bounded_below,
        } => {
            if model != ModelKind::CorrEr {
                return Err(usage("reduce supports --model corr-er only".into()));
            }
            let mut cfg = ExperimentConfig::new(Command::Reduce);
            cfg.model = Some(model);
            cfg.params = Some(params.build().map_err(|e| usage(e.to_string()))?);
            cfg.flags.estimator = Some(estimator);
            cfg.flags.lambda_mix = Some(lambda_mix);
            cfg.flags.c = Some(c);
            cfg.trials = trials;
            cfg.seed = seed;
            if let Some(x) = near_one {
                cfg.thresholds.near_one = x;
            }
            if let Some(x) = bounded_below {
                cfg.thresholds.bounded_below = x;
            }
            cfg
        }
        Cmd::Otter { max_n } => {
            let mut c = ExperimentConfig::new(Command::Otter);
            c.flags.max_n = Some(max_n);
            c
        }
        Cmd::Verify => ExperimentConfig::new(Command::Verify),
    };
    cfg.output = out;
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn dual_config(
    command: Command,
    params: &ParamArgs,
    exact: bool,
    asymptotic: bool,
) -> Result<ExperimentConfig, run::Failure> {
    let mut c = ExperimentConfig::new(command);
    c.params = Some(params.build().map_err(|e| run::Failure::usage(e.to_string()))?);
    c.flags.exact = exact;
    c.flags.scale = scale(asymptotic);
    Ok(c)
}

fn emit_error(f: &run::Failure) -> ExitCode {
    let body = json!({
        "schema_version": SCHEMA_VERSION,
        "error": { "kind": f.kind, "message": f.message },
    });
    eprintln!("{body}");
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return emit_error(&run::Failure::usage(e.to_string().trim_end().to_string())),
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            return emit_error(&run::Failure::usage("--threads must be positive".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            return emit_error(&run::Failure::usage(e.to_string()));
        }
    }
    let cfg = match to_config(cli.cmd, cli.out) {
        Ok(c) => c,
        Err(f) => return emit_error(&f),
    };
    match run::run(&cfg) {
        Ok(passed) => {
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => emit_error(&f),
    }
}
