//! `mogalign`: command-line driver for the mixture alignment experiments.
//!
//! Exit codes: 0 success, 1 usage error, 2 diverged or failed run, 3 I/O error.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mogalign_core::metrics::DEFAULT_METRIC_SAMPLES;
use mogalign_core::numerics::{central_differences, max_relative_error};
use mogalign_core::svg::{density_svg, emit_boxplot, scatter_svg, write_svg};
use mogalign_core::sweep::run_sweep_with_progress;
use mogalign_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "mogalign",
    version,
    about = "Distill/align pipeline experiments on Gaussian mixtures"
)]
struct Cli {
    /// Random seed (overrides the config's seed where it has one).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Config as inline JSON or a path to a JSON file. Field names follow
    /// the config structs of the chosen command.
    #[arg(long, global = true, value_name = "JSON")]
    config: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit the high-recall model to ground-truth samples (writes sft.json).
    Sft {
        #[arg(long)]
        components: Option<usize>,
        #[arg(long)]
        iterations: Option<usize>,
    },
    /// Distil a teacher into fewer components (writes kd.json).
    Kd {
        #[arg(long)]
        teacher: PathBuf,
        #[arg(long, default_value_t = 4)]
        n_final: usize,
        #[arg(long, default_value_t = distill::KD_TEMPER)]
        temper: f64,
    },
    /// Align a model against a frozen reference (writes aligned.json and
    /// train_log.csv). The reference defaults to the initial model.
    Align {
        #[arg(long)]
        init: PathBuf,
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long)]
        algorithm: Option<Algorithm>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        iterations: Option<usize>,
    },
    /// Run one full KA or AK pipeline and write every stage's artifacts.
    Pipeline {
        #[arg(long)]
        variant: Option<Variant>,
        #[arg(long)]
        algorithm: Option<Algorithm>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        n_final: Option<usize>,
    },
    /// Multi-seed sweep of both variants (writes results.csv, summary.json,
    /// comparison.json).
    Sweep {
        #[arg(long)]
        algorithm: Option<Algorithm>,
        /// Grid preset; ignored when --config is given.
        #[arg(long, value_enum, default_value_t = Preset::Beta)]
        preset: Preset,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Summaries and AK-minus-KA deltas from a results.csv.
    Report {
        #[arg(long)]
        results: PathBuf,
    },
    /// Render an SVG figure.
    Plot {
        #[arg(long, value_enum)]
        kind: PlotChoice,
        /// results.csv for box plots.
        #[arg(long)]
        results: Option<PathBuf>,
        /// Metric for box plots; all four when omitted.
        #[arg(long)]
        metric: Option<Metric>,
        /// Model JSON files for scatter and density plots.
        #[arg(long = "model")]
        models: Vec<PathBuf>,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
    /// Compare analytic gradients against finite differences on random
    /// instances.
    CheckGrad {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 1e-5)]
        h: f64,
        #[arg(long, default_value_t = 1e-5)]
        tolerance: f64,
    },
    /// Sampling-trap and gradient-starvation diagnostics for a high-recall
    /// teacher and its distilled reference (fitted from --seed when not given).
    DiagnoseTrap {
        #[arg(long)]
        teacher: Option<PathBuf>,
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        n_final: usize,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    Beta,
    Iterations,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PlotChoice {
    Boxplot,
    Scatter,
    Density,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failed(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Failed(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidParameter(_) | Error::InvalidArgument(_) => CliError::Usage(msg),
            Error::Diverged { .. } => CliError::Failed(msg),
            Error::Io { .. } | Error::Json { .. } | Error::Csv { .. } => CliError::Io(msg),
        }
    }
}

impl From<PipelineFailure> for CliError {
    fn from(f: PipelineFailure) -> Self {
        let msg = f.to_string();
        match CliError::from(f.source) {
            CliError::Usage(_) => CliError::Usage(msg),
            CliError::Failed(_) => CliError::Failed(msg),
            CliError::Io(_) => CliError::Io(msg),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn load_config<T: DeserializeOwned + Default>(raw: Option<&str>) -> CliResult<T> {
    let Some(raw) = raw else {
        return Ok(T::default());
    };
    let text = if raw.trim_start().starts_with('{') {
        raw.to_string()
    } else {
        std::fs::read_to_string(raw)
            .map_err(|e| CliError::Io(format!("reading config {raw}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config: {e}")))
}

fn out_dir(cli_out: &Option<PathBuf>, default: &str) -> CliResult<PathBuf> {
    let dir = cli_out.clone().unwrap_or_else(|| PathBuf::from(default));
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
    Ok(dir)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult {
    let text = serde_json::to_string_pretty(value).expect("serializable value");
    std::fs::write(path, text + "\n")
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

/// A closed stdout (e.g. piped into `head`) is not an error.
fn print_json<T: Serialize>(value: &T) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value).expect("serializable value");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn evaluate(model: &MoGParams, seed: u64) -> CliResult<MetricsReport> {
    let gt = GroundTruthSpec::default();
    Ok(evaluate_metrics(
        model,
        &gt.ground_truth(),
        &gt.target(),
        &RewardSpec::default(),
        DEFAULT_METRIC_SAMPLES,
        &mut ChaCha8Rng::seed_from_u64(seed),
    )?)
}

fn run(cli: Cli) -> CliResult {
    let seed = cli.seed.unwrap_or(0);
    let config = cli.config.as_deref();
    match cli.command {
        Command::Sft {
            components,
            iterations,
        } => {
            let mut cfg: FitConfig = load_config(config)?;
            cfg.temper = 1.0;
            if let Some(k) = components {
                cfg.n_components = k;
            }
            if let Some(it) = iterations {
                cfg.iterations = it;
            }
            let model = fit_mle(
                &make_ground_truth(),
                &cfg,
                &mut ChaCha8Rng::seed_from_u64(seed),
            )?;
            let path = out_dir(&cli.out, ".")?.join("sft.json");
            model.save_json(&path)?;
            print_json(&evaluate(&model, seed)?);
            eprintln!("wrote {}", path.display());
        }
        Command::Kd {
            teacher,
            n_final,
            temper,
        } => {
            let base: FitConfig = load_config(config)?;
            let cfg = distill::kd_config(n_final, temper, &base);
            let teacher = MoGParams::load_json(&teacher)?;
            let model = fit_mle(&teacher, &cfg, &mut ChaCha8Rng::seed_from_u64(seed))?;
            let path = out_dir(&cli.out, ".")?.join("kd.json");
            model.save_json(&path)?;
            print_json(&evaluate(&model, seed)?);
            eprintln!("wrote {}", path.display());
        }
        Command::Align {
            init,
            reference,
            algorithm,
            beta,
            iterations,
        } => {
            let mut cfg: AlignConfig = load_config(config)?;
            if let Some(a) = algorithm {
                let keep = config.is_some();
                cfg = AlignConfig {
                    algorithm: a,
                    iterations: if keep {
                        cfg.iterations
                    } else {
                        a.default_iterations()
                    },
                    ..cfg
                };
            }
            if let Some(b) = beta {
                cfg.beta = b;
            }
            if let Some(it) = iterations {
                cfg.iterations = it;
            }
            let init_model = MoGParams::load_json(&init)?;
            let reference = match reference {
                Some(p) => MoGParams::load_json(&p)?,
                None => init_model.clone(),
            };
            let (model, log) = align(
                &init_model,
                &reference,
                &RewardSpec::default(),
                &cfg,
                &mut ChaCha8Rng::seed_from_u64(seed),
            )?;
            let dir = out_dir(&cli.out, ".")?;
            model.save_json(&dir.join("aligned.json"))?;
            log.save_csv(&dir.join("train_log.csv"))?;
            print_json(&evaluate(&model, seed)?);
            eprintln!("wrote {}", dir.join("aligned.json").display());
        }
        Command::Pipeline {
            variant,
            algorithm,
            beta,
            iterations,
            n_final,
        } => {
            let mut cfg: PipelineConfig = load_config(config)?;
            if let Some(v) = variant {
                cfg.variant = v;
            }
            if let Some(a) = algorithm {
                cfg.align.algorithm = a;
                if iterations.is_none() && config.is_none() {
                    cfg.align.iterations = a.default_iterations();
                }
            }
            if let Some(b) = beta {
                cfg.align.beta = b;
            }
            if let Some(it) = iterations {
                cfg.align.iterations = it;
            }
            if let Some(k) = n_final {
                cfg.n_final = k;
            }
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let run = run_pipeline(&cfg)?;
            let dir = out_dir(&cli.out, "run")?;
            run.write_artifacts(&dir)?;
            print_json(&run.metrics);
            eprintln!("wrote artifacts to {}", dir.display());
        }
        Command::Sweep {
            algorithm,
            preset,
            trials,
        } => {
            let mut spec: SweepSpec = match config {
                Some(_) => load_config(config)?,
                None => {
                    let alg = algorithm.unwrap_or(Algorithm::Ppo);
                    match preset {
                        Preset::Beta => SweepSpec::beta_sweep(alg),
                        Preset::Iterations => SweepSpec::iteration_sweep(alg),
                    }
                }
            };
            if let (Some(a), Some(_)) = (algorithm, config) {
                spec.algorithm = a;
            }
            if let Some(n) = trials {
                spec.n_trials = n;
            }
            if let Some(s) = cli.seed {
                spec.seed = s;
            }
            if let Some(dir) = &cli.out {
                spec.out_dir = dir.clone();
            }
            let result = run_sweep_with_progress(&spec, |done, total| {
                eprintln!("{done}/{total} runs");
            })?;
            let files = emit_report(&result, &spec.out_dir)?;
            let failed = result.rows.iter().filter(|r| r.failed).count();
            eprintln!(
                "{} runs ({failed} failed); wrote {}, {}, {}",
                result.rows.len(),
                files.results_csv.display(),
                files.summary_json.display(),
                files.comparison_json.display()
            );
        }
        Command::Report { results } => {
            let result = SweepResult::load_csv(&results)?;
            let default = results.parent().unwrap_or(Path::new("."));
            let dir = match &cli.out {
                Some(_) => out_dir(&cli.out, ".")?,
                None => default.to_path_buf(),
            };
            let summary = report::summarize(&result)?;
            let comparison = report::compare(&result)?;
            write_json(&dir.join("summary.json"), &summary)?;
            write_json(&dir.join("comparison.json"), &comparison)?;
            print_json(&comparison);
        }
        Command::Plot {
            kind,
            results,
            metric,
            models,
            samples,
        } => {
            let dir = out_dir(&cli.out, ".")?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            match kind {
                PlotChoice::Boxplot => {
                    let results =
                        results.ok_or_else(|| CliError::Usage("boxplot needs --results".into()))?;
                    let result = SweepResult::load_csv(&results)?;
                    let metrics = metric
                        .map(|m| vec![m])
                        .unwrap_or_else(|| Metric::ALL.to_vec());
                    for m in metrics {
                        let path = dir.join(format!("boxplot_{m}.svg"));
                        emit_boxplot(&result, m, &path)?;
                        eprintln!("wrote {}", path.display());
                    }
                }
                PlotChoice::Scatter | PlotChoice::Density => {
                    if models.is_empty() {
                        return Err(CliError::Usage(
                            "scatter and density plots need at least one --model".into(),
                        ));
                    }
                    let loaded = models
                        .iter()
                        .map(|p| {
                            let label = p
                                .file_stem()
                                .map(|s| s.to_string_lossy().into_owned())
                                .unwrap_or_default();
                            Ok((label, MoGParams::load_json(p)?))
                        })
                        .collect::<Result<Vec<_>, Error>>()?;
                    let (name, svg) = match kind {
                        PlotChoice::Scatter => {
                            ("scatter.svg", scatter_svg(&loaded, samples, &mut rng)?)
                        }
                        _ => (
                            "density.svg",
                            density_svg(&loaded, &RewardSpec::default(), samples, 40, &mut rng)?,
                        ),
                    };
                    let path = dir.join(name);
                    write_svg(&path, &svg)?;
                    eprintln!("wrote {}", path.display());
                }
            }
        }
        Command::CheckGrad {
            instances,
            h,
            tolerance,
        } => {
            let audit = check_gradients(instances, h, seed)?;
            print_json(&audit);
            if audit.density_worst >= tolerance || audit.dpo_worst >= tolerance {
                return Err(CliError::Failed(format!(
                    "gradient check above tolerance {tolerance:e}"
                )));
            }
        }
        Command::DiagnoseTrap {
            teacher,
            reference,
            n_final,
            beta,
            samples,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let teacher = match teacher {
                Some(p) => MoGParams::load_json(&p)?,
                None => run_sft(&mut rng)?,
            };
            let reference = match reference {
                Some(p) => MoGParams::load_json(&p)?,
                None => run_kd(&teacher, n_final, &mut rng)?,
            };
            let diag = diagnose(&teacher, &reference, beta, samples, seed)?;
            let path = out_dir(&cli.out, ".")?.join("trap.json");
            write_json(&path, &diag)?;
            print_json(&diag);
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct GradientAudit {
    instances: usize,
    h: f64,
    density_worst: f64,
    dpo_worst: f64,
}

fn random_model(k: usize, rng: &mut ChaCha8Rng) -> Result<MoGParams, Error> {
    MoGParams::new(
        (0..k).map(|_| rng.random_range(-0.5..0.5)).collect(),
        (0..k)
            .map(|_| Point2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect(),
        (0..k).map(|_| rng.random_range(-0.4..0.3)).collect(),
    )
}

fn check_gradients(instances: usize, h: f64, seed: u64) -> CliResult<GradientAudit> {
    if instances == 0 {
        return Err(CliError::Usage("--instances must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = RewardSpec::default();
    let mut density_worst = 0.0f64;
    let mut dpo_worst = 0.0f64;
    for _ in 0..instances {
        let k = rng.random_range(1..=4);
        let model = random_model(k, &mut rng)?;
        let p = Point2::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        density_worst = density_worst.max(finite_diff_check(&model, &p, h)?);

        let reference = random_model(k, &mut rng)?;
        let flat: Vec<f64> = reference
            .to_flat()
            .iter()
            .map(|v| v + rng.random_range(-0.2..0.2))
            .collect();
        let policy = MoGParams::from_flat(k, &flat)?;
        let pts = sample(&policy, 1.0, 16, &mut rng)?;
        let pairs: Vec<_> = pts.chunks(2).map(|c| prefer(c[0], c[1], &spec)).collect();
        let (_, grad) = dpo_loss(&policy, &reference, &pairs, 1.0)?;
        let numeric = central_differences(&flat, h, |x| {
            Ok(dpo_loss(&MoGParams::from_flat(k, x)?, &reference, &pairs, 1.0)?.0)
        })?;
        dpo_worst = dpo_worst.max(max_relative_error(&grad.to_flat(), &numeric));
    }
    Ok(GradientAudit {
        instances,
        h,
        density_worst,
        dpo_worst,
    })
}

#[derive(Serialize)]
struct ModelTrap {
    log_density_at_target: f64,
    high_reward_fraction: f64,
}

#[derive(Serialize)]
struct TrapDiagnosis {
    teacher: ModelTrap,
    reference: ModelTrap,
    /// Teacher over reference high-reward fraction.
    fraction_ratio: f64,
    /// DPO pair with the target centre beating the reference's heaviest
    /// mode, under a policy indifferent between the two points.
    starvation: Starvation,
}

fn diagnose(
    teacher: &MoGParams,
    reference: &MoGParams,
    beta: f64,
    samples: usize,
    seed: u64,
) -> CliResult<TrapDiagnosis> {
    let spec = RewardSpec::default();
    let target = GroundTruthSpec::default().target_center();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut trap = |m: &MoGParams| -> CliResult<ModelTrap> {
        Ok(ModelTrap {
            log_density_at_target: log_density(m, &target),
            high_reward_fraction: high_reward_fraction(m, &spec, 0.9, samples, &mut rng)?,
        })
    };
    let t = trap(teacher)?;
    let r = trap(reference)?;
    let heaviest = reference
        .weights()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| reference.means()[k])
        .expect("models have at least one component");
    let pair = PreferencePair {
        winner: target,
        loser: heaviest,
    };
    let midpoint = Point2::new((target.x + heaviest.x) / 2.0, (target.y + heaviest.y) / 2.0);
    let indifferent = MoGParams::uniform(vec![midpoint], 1.0)?;
    let starvation = starvation_factor(reference, &indifferent, &pair, beta)?;
    Ok(TrapDiagnosis {
        fraction_ratio: t.high_reward_fraction / r.high_reward_fraction,
        teacher: t,
        reference: r,
        starvation,
    })
}
