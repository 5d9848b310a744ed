//! Declarative experiment runner: each experiment reads one JSON config and
//! writes CSV/JSON artifacts under `<out>/<experiment>/<id>/`.

mod config;

use std::fmt;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use config::{
    AblationConfig, DatasetConfig, EvalSplit, Experiment, ExperimentConfig, HypervolumeConfig, MlpPmlConfig,
    ObjectiveConfig, SubspaceEvalConfig, ToyBaselineConfig, ToySweepConfig,
};

use crate::ensemble::{ParameterMatrix, ParameterVector};
use crate::error::{Error, Result};
use crate::io::{atomic_write, write_json};
use crate::metrics::{
    evaluate_subspace, hypervolume, hypervolume_monte_carlo, oracle_front_toy, read_front_csv, spearman,
    toy_reference, write_front_csv, Direction, FrontSample, HypervolumeSpec,
};
use crate::objectives::{MlpObjective, Objective, ToyConfig, ToyObjective, VectorLoss, TOY_INITS};
use crate::simplex::make_grid;
use crate::trainer::{mgda2_combine, run_baseline, run_pml, Balancing, BaselineMethod, TrainerConfig};

/// Why an experiment did not complete; decides the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// The config could not be read, parsed or validated.
    Config(Error),
    /// Training, evaluation or file output failed.
    Runtime(Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "config error: {e}"),
            Failure::Runtime(e) => write!(f, "runtime error: {e}"),
        }
    }
}

impl std::error::Error for Failure {}

/// Output root when neither the config nor the command line names one.
pub const DEFAULT_OUT: &str = "runs";

/// Where an experiment wrote its files and what it has to say.
#[derive(Debug, Clone)]
pub struct Report {
    pub dir: PathBuf,
    pub lines: Vec<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'static str,
    config: &'a ExperimentConfig,
}

/// Runs `config` with up to `jobs` worker threads (all cores when `None`).
pub fn run(config: ExperimentConfig, jobs: Option<usize>) -> Result<Report, Failure> {
    config.validate().map_err(Failure::Config)?;
    let config = config.resolved();
    let out = config.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let dir = out.join(config.experiment.name());
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(Failure::Config(Error::invalid("--jobs must be at least 1")));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Failure::Runtime(Error::invalid(format!("thread pool: {e}"))))?;
    let lines = pool
        .install(|| dispatch(&config, &dir))
        .map_err(Failure::Runtime)?;

    let mut recorded = config.clone();
    recorded.out = None;
    write_json(
        &dir.join("manifest.json"),
        &Manifest {
            version: env!("CARGO_PKG_VERSION"),
            config: &recorded,
        },
    )
    .map_err(Failure::Runtime)?;
    Ok(Report { dir, lines })
}

fn dispatch(config: &ExperimentConfig, dir: &Path) -> Result<Vec<String>> {
    match &config.experiment {
        Experiment::ToySweep(c) => {
            let s = toy_sweep(c, dir)?;
            Ok(vec![format!(
                "{}/{} pairs reach oracle ratio >= {} (median {:.4}); worst pair {}",
                s.recovered,
                s.pairs.len(),
                s.ratio_threshold,
                s.median_ratio,
                s.worst_pair
            )])
        }
        Experiment::ToyBaseline(c) => {
            let s = toy_baseline(c, dir)?;
            Ok(s.runs
                .iter()
                .map(|r| format!("{}: min-norm {:.3e}, drift {:.3e}", r.id, r.min_norm, r.final_drift))
                .collect())
        }
        Experiment::MlpPml(c) => {
            let s = mlp_pml(c, config.seed, dir)?;
            Ok(vec![format!(
                "rho(alpha_1, loss_1) {:.4}, rho(alpha_1, loss_2) {:.4}, accuracy HV {:.4}{}",
                s.spearman_task1,
                s.spearman_task2,
                s.accuracy_hypervolume,
                s.ls.as_ref()
                    .map(|l| format!(", LS accuracy HV {:.4}", l.accuracy_hypervolume))
                    .unwrap_or_default()
            )])
        }
        Experiment::AblationGrid(c) => {
            let t = ablation_grid(c, config.seed, dir)?;
            Ok(t.rows
                .iter()
                .map(|r| format!("W={} lambda={}: mean {:.4} max {:.4} std {:.4}", r.window, r.lambda, r.mean, r.max, r.std))
                .collect())
        }
        Experiment::SubspaceEval(c) => {
            let s = subspace_eval(c, config.seed, dir)?;
            let mut lines = vec![format!("{} points written", s.points)];
            if let Some(hv) = s.hypervolume {
                lines.push(format!("hypervolume {hv}"));
            }
            Ok(lines)
        }
        Experiment::Hypervolume(c) => {
            let r = hypervolume_of_file(c, dir)?;
            let mut lines = vec![format!("{}", r.hypervolume.map_or(f64::NAN, |v| v))];
            if let Some(mc) = r.monte_carlo {
                lines.push(format!("monte carlo {} +- {}", mc.value, mc.std_error));
            }
            Ok(lines)
        }
    }
}

fn toy_members(pair: [usize; 2]) -> Result<ParameterMatrix> {
    ParameterMatrix::from_rows(pair.iter().map(|&i| TOY_INITS[i].to_vec()).collect())
}

fn save_theta(path: &Path, theta: &ParameterMatrix) -> Result<()> {
    atomic_write(path, &theta.to_bytes())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairResult {
    pub id: String,
    pub init: [usize; 2],
    pub initial_losses: Vec<VectorLoss>,
    pub initial_loss_sum: f64,
    pub final_members: Vec<Vec<f64>>,
    pub hypervolume: f64,
    pub oracle_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToySweepSummary {
    pub scale_c: f64,
    pub balancing: Balancing,
    pub reference: Vec<f64>,
    pub oracle_points: usize,
    pub oracle_hypervolume: f64,
    pub ratio_threshold: f64,
    /// Pairs whose oracle ratio reaches the threshold.
    pub recovered: usize,
    pub median_ratio: f64,
    /// Pair with the largest summed initial losses.
    pub worst_pair: String,
    pub pairs: Vec<PairResult>,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Trains one ensemble per init pair on the toy problem and compares each
/// final segment against the grid oracle front.
pub fn toy_sweep(cfg: &ToySweepConfig, dir: &Path) -> Result<ToySweepSummary> {
    let toy = ToyConfig::new(cfg.toy.scale_c)?;
    let objective = ToyObjective::new(toy);
    let reference = toy_reference(&toy)?;
    let spec = HypervolumeSpec::minimize(reference.clone());
    let oracle = oracle_front_toy(&toy, cfg.oracle_resolution)?;
    let oracle_hv = hypervolume(&oracle, &spec)?;
    write_front_csv(&dir.join("oracle_front.csv"), &oracle, 2)?;
    let grid = make_grid(2, cfg.segment_points)?;

    let pairs: Vec<PairResult> = cfg
        .pairs()
        .par_iter()
        .map(|&pair| {
            let id = format!("pair-{}-{}", pair[0], pair[1]);
            let theta = toy_members(pair)?;
            let initial_losses = theta.rows().map(|r| objective.loss(r)).collect::<Result<Vec<_>>>()?;
            let run = run_pml(&objective, theta, &cfg.trainer)?;
            let front = evaluate_subspace(&run.theta, &grid, &objective)?;
            let hv = hypervolume(&front, &spec)?;
            let pair_dir = dir.join(&id);
            save_theta(&pair_dir.join("theta.bin"), &run.theta)?;
            write_front_csv(&pair_dir.join("front.csv"), &front, 2)?;
            atomic_write(&pair_dir.join("trajectory.csv"), run.trajectory.to_csv(2)?.as_bytes())?;
            Ok(PairResult {
                id,
                init: pair,
                initial_loss_sum: initial_losses.iter().flat_map(|l| l.iter()).sum(),
                initial_losses,
                final_members: run.theta.rows().map(<[f64]>::to_vec).collect(),
                hypervolume: hv,
                oracle_ratio: hv / oracle_hv,
            })
        })
        .collect::<Result<_>>()?;

    let ratios: Vec<f64> = pairs.iter().map(|p| p.oracle_ratio).collect();
    let worst = pairs
        .iter()
        .fold(None::<&PairResult>, |best, p| match best {
            Some(b) if b.initial_loss_sum >= p.initial_loss_sum => Some(b),
            _ => Some(p),
        })
        .map(|p| p.id.clone())
        .unwrap_or_default();
    let summary = ToySweepSummary {
        scale_c: toy.scale_c,
        balancing: cfg.trainer.balancing,
        reference,
        oracle_points: oracle.len(),
        oracle_hypervolume: oracle_hv,
        ratio_threshold: cfg.ratio_threshold,
        recovered: ratios.iter().filter(|r| **r >= cfg.ratio_threshold).count(),
        median_ratio: median(&ratios),
        worst_pair: worst,
        pairs,
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineResult {
    pub id: String,
    pub method: BaselineMethod,
    pub init: usize,
    pub final_theta: Vec<f64>,
    pub final_loss: VectorLoss,
    /// Largest per-task loss change over the last step.
    pub final_drift: f64,
    /// Norm of the minimum-norm convex combination of the two task
    /// gradients at the final point.
    pub min_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToyBaselineSummary {
    pub scale_c: f64,
    pub runs: Vec<BaselineResult>,
}

fn method_name(m: BaselineMethod) -> &'static str {
    match m {
        BaselineMethod::Ls => "ls",
        BaselineMethod::Mgda2 => "mgda2",
        BaselineMethod::PcGrad => "pcgrad",
    }
}

/// Runs every selected baseline from every selected toy init.
pub fn toy_baseline(cfg: &ToyBaselineConfig, dir: &Path) -> Result<ToyBaselineSummary> {
    let toy = ToyConfig::new(cfg.toy.scale_c)?;
    let objective = ToyObjective::new(toy);
    let jobs: Vec<(BaselineMethod, usize)> = cfg
        .methods
        .iter()
        .flat_map(|&m| cfg.inits().into_iter().map(move |i| (m, i)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(method, init)| {
            let id = format!("{}-init-{init}", method_name(method));
            let run = run_baseline(
                &objective,
                ParameterVector::new(TOY_INITS[init].to_vec())?,
                method,
                &cfg.trainer,
            )?;
            let (_, grad) = objective.loss_and_grad(&run.theta)?;
            let (_, d) = mgda2_combine(grad.row(0), grad.row(1))?;
            atomic_write(&dir.join(&id).join("trajectory.csv"), run.trajectory.to_csv(2)?.as_bytes())?;
            Ok(BaselineResult {
                id,
                method,
                init,
                final_theta: run.theta.to_vec(),
                final_loss: run.final_loss,
                final_drift: run.final_drift,
                min_norm: d.iter().map(|v| v * v).sum::<f64>().sqrt(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = ToyBaselineSummary {
        scale_c: toy.scale_c,
        runs,
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentPoint {
    pub alpha: Vec<f64>,
    pub losses: Vec<f64>,
    pub accuracy: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LsComparison {
    pub losses: Vec<f64>,
    pub accuracy: Vec<f64>,
    pub accuracy_hypervolume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MlpSummary {
    pub seed: u64,
    pub eval: EvalSplit,
    pub params: usize,
    pub points: Vec<SegmentPoint>,
    /// Rank correlation between the first weighting coordinate and each task loss.
    pub spearman_task1: f64,
    pub spearman_task2: f64,
    /// Hypervolume of the segment's accuracies with the origin as reference.
    pub accuracy_hypervolume: f64,
    pub ls: Option<LsComparison>,
}

fn accuracy_spec() -> HypervolumeSpec {
    HypervolumeSpec::maximize(vec![0.0, 0.0])
}

/// Trains an ensemble of two MLPs on the synthetic two-task dataset and
/// evaluates the segment between them.
pub fn mlp_pml(cfg: &MlpPmlConfig, seed: u64, dir: &Path) -> Result<MlpSummary> {
    let (train, eval) = cfg.dataset.objectives(&cfg.hidden, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta = ParameterMatrix::init_with(2, &mut rng, |r| train.spec.init_params(r))?;
    let ls_init = ParameterVector::new(train.spec.init_params(&mut rng))?;
    let mut trainer = cfg.trainer.clone();
    trainer.seed = seed;

    let run = run_pml(&train, theta, &trainer)?;
    let grid = make_grid(2, cfg.segment_points)?;
    let front = evaluate_subspace(&run.theta, &grid, &eval)?;
    let points = segment_points(&run.theta, &front, &eval)?;
    let alpha1: Vec<f64> = points.iter().map(|p| p.alpha[0]).collect();
    let task = |t: usize| points.iter().map(|p| p.losses[t]).collect::<Vec<_>>();
    let accuracy_front: Vec<FrontSample> = points
        .iter()
        .map(|p| Ok(FrontSample::oracle(VectorLoss::new(p.accuracy.clone())?)))
        .collect::<Result<_>>()?;

    let ls = if cfg.ls_baseline {
        let base = run_baseline(&train, ls_init, BaselineMethod::Ls, &trainer)?;
        let accuracy = eval.accuracy(&base.theta)?;
        let hv = hypervolume(&[FrontSample::oracle(VectorLoss::new(accuracy.clone())?)], &accuracy_spec())?;
        Some(LsComparison {
            losses: eval.loss(&base.theta)?.to_vec(),
            accuracy,
            accuracy_hypervolume: hv,
        })
    } else {
        None
    };

    let seed_dir = dir.join(format!("seed-{seed}"));
    save_theta(&seed_dir.join("theta.bin"), &run.theta)?;
    write_front_csv(&seed_dir.join("front.csv"), &front, 2)?;
    atomic_write(&seed_dir.join("trajectory.csv"), run.trajectory.to_csv(2)?.as_bytes())?;
    let summary = MlpSummary {
        seed,
        eval: cfg.dataset.eval,
        params: train.spec.param_count(),
        spearman_task1: spearman(&alpha1, &task(0))?,
        spearman_task2: spearman(&alpha1, &task(1))?,
        accuracy_hypervolume: hypervolume(&accuracy_front, &accuracy_spec())?,
        points,
        ls,
    };
    write_json(&seed_dir.join("summary.json"), &summary)?;
    Ok(summary)
}

fn segment_points(theta: &ParameterMatrix, front: &[FrontSample], eval: &MlpObjective) -> Result<Vec<SegmentPoint>> {
    front
        .iter()
        .map(|s| {
            let a = s.weighting.as_ref().expect("subspace samples carry weightings");
            Ok(SegmentPoint {
                alpha: a.to_vec(),
                losses: s.losses.to_vec(),
                accuracy: eval.accuracy(&theta.interpolate(a)?)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    pub window: usize,
    pub lambda: f64,
    pub seeds: Vec<f64>,
    pub mean: f64,
    pub max: f64,
    /// Population standard deviation over seeds.
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationTable {
    pub direction: Direction,
    pub reference: Vec<f64>,
    pub rows: Vec<AblationRow>,
}

impl AblationTable {
    /// Columns `W,lambda,Seed-0..,Mean HV,Max HV,std`.
    pub fn to_csv(&self) -> Result<String> {
        let seeds = self.rows.first().map_or(0, |r| r.seeds.len());
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["W".to_string(), "lambda".to_string()];
        header.extend((0..seeds).map(|k| format!("Seed-{k}")));
        header.extend(["Mean HV".to_string(), "Max HV".to_string(), "std".to_string()]);
        w.write_record(&header)?;
        for r in &self.rows {
            let mut row = vec![r.window.to_string(), crate::io::fmt_f64(r.lambda)];
            row.extend(r.seeds.iter().map(|v| crate::io::fmt_f64(*v)));
            row.extend([r.mean, r.max, r.std].map(crate::io::fmt_f64));
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("ascii csv"))
    }
}

/// Mean, maximum and population standard deviation.
pub fn mean_max_std(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, max, var.sqrt())
}

enum Built {
    Toy(ToyObjective),
    Mlp { train: MlpObjective, eval: MlpObjective },
}

impl Built {
    fn new(objective: &ObjectiveConfig, seed: u64) -> Result<Self> {
        Ok(match objective {
            ObjectiveConfig::Toy { toy } => Built::Toy(ToyObjective::new(ToyConfig::new(toy.scale_c)?)),
            ObjectiveConfig::Mlp { dataset, hidden } => {
                let (train, eval) = dataset.objectives(hidden, seed)?;
                Built::Mlp { train, eval }
            }
        })
    }

    fn train(&self) -> &dyn Objective {
        match self {
            Built::Toy(t) => t,
            Built::Mlp { train, .. } => train,
        }
    }

    fn eval(&self) -> &dyn Objective {
        match self {
            Built::Toy(t) => t,
            Built::Mlp { eval, .. } => eval,
        }
    }

    /// Hypervolume spec of the front this objective is judged by.
    fn spec(&self) -> Result<HypervolumeSpec> {
        match self {
            Built::Toy(t) => Ok(HypervolumeSpec::minimize(toy_reference(&t.config)?)),
            Built::Mlp { .. } => Ok(accuracy_spec()),
        }
    }

    /// Front used for the hypervolume: losses for the toy, accuracies for the MLP.
    fn scored_front(&self, theta: &ParameterMatrix, front: &[FrontSample]) -> Result<Vec<FrontSample>> {
        match self {
            Built::Toy(_) => Ok(front.to_vec()),
            Built::Mlp { eval, .. } => front
                .iter()
                .map(|s| {
                    let a = s.weighting.clone().expect("subspace samples carry weightings");
                    let acc = eval.accuracy(&theta.interpolate(&a)?)?;
                    Ok(FrontSample::new(a, VectorLoss::new(acc)?))
                })
                .collect(),
        }
    }
}

/// Runs every `(W, λ)` cell for every seed and tabulates the hypervolumes.
pub fn ablation_grid(cfg: &AblationConfig, seed: u64, dir: &Path) -> Result<AblationTable> {
    let cells = cfg.cells();
    let grid = make_grid(2, cfg.segment_points())?;
    let runs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.seeds).map(move |k| (c, k)))
        .collect();
    let reference_spec = Built::new(&cfg.objective, seed)?.spec()?;

    let hvs: Vec<f64> = runs
        .par_iter()
        .map(|&(c, k)| {
            let (window, lambda) = cells[c];
            let run_seed = seed.wrapping_add(k as u64);
            let built = Built::new(&cfg.objective, run_seed)?;
            let theta = match (&built, cfg.pair) {
                (Built::Toy(_), Some(pair)) => toy_members(pair)?,
                (Built::Mlp { train, .. }, _) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
                    ParameterMatrix::init_with(2, &mut rng, |r| train.spec.init_params(r))?
                }
                (Built::Toy(_), None) => return Err(Error::invalid("toy ablation needs a `pair`")),
            };
            let trainer = TrainerConfig {
                window,
                lambda,
                seed: run_seed,
                ..cfg.trainer.clone()
            };
            let run = run_pml(built.train(), theta, &trainer)?;
            let front = evaluate_subspace(&run.theta, &grid, built.eval())?;
            let scored = built.scored_front(&run.theta, &front)?;
            let run_dir = dir.join(cell_id(window, lambda)).join(format!("seed-{k}"));
            write_front_csv(&run_dir.join("front.csv"), &front, 2)?;
            hypervolume(&scored, &built.spec()?)
        })
        .collect::<Result<_>>()?;

    let rows = cells
        .iter()
        .enumerate()
        .map(|(c, &(window, lambda))| {
            let seeds = hvs[c * cfg.seeds..(c + 1) * cfg.seeds].to_vec();
            let (mean, max, std) = mean_max_std(&seeds);
            AblationRow {
                window,
                lambda,
                seeds,
                mean,
                max,
                std,
            }
        })
        .collect();
    let table = AblationTable {
        direction: reference_spec.direction,
        reference: reference_spec.reference,
        rows,
    };
    atomic_write(&dir.join("table.csv"), table.to_csv()?.as_bytes())?;
    write_json(&dir.join("table.json"), &table)?;
    Ok(table)
}

fn cell_id(window: usize, lambda: f64) -> String {
    format!("w{window}-lambda{lambda}")
}

fn file_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubspaceSummary {
    pub checkpoint: PathBuf,
    pub members: usize,
    pub points: usize,
    pub hypervolume: Option<f64>,
}

/// Evaluates a saved ensemble on a simplex grid.
pub fn subspace_eval(cfg: &SubspaceEvalConfig, seed: u64, dir: &Path) -> Result<SubspaceSummary> {
    let theta = ParameterMatrix::load(&cfg.checkpoint)?;
    let built = Built::new(&cfg.objective, seed)?;
    let grid = make_grid(theta.members(), cfg.resolution)?;
    let front = evaluate_subspace(&theta, &grid, built.eval())?;
    let hv = cfg
        .reference
        .as_ref()
        .map(|r| {
            hypervolume(
                &front,
                &HypervolumeSpec {
                    reference: r.clone(),
                    direction: cfg.direction,
                },
            )
        })
        .transpose()?;
    let out = dir.join(file_id(&cfg.checkpoint));
    write_front_csv(&out.join("front.csv"), &front, theta.members())?;
    let summary = SubspaceSummary {
        checkpoint: cfg.checkpoint.clone(),
        members: theta.members(),
        points: front.len(),
        hypervolume: hv,
    };
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloResult {
    pub value: f64,
    pub std_error: f64,
    pub draws: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypervolumeResult {
    pub front: PathBuf,
    pub points: usize,
    pub spec: HypervolumeSpec,
    /// Exact value; absent beyond three objectives.
    pub hypervolume: Option<f64>,
    pub monte_carlo: Option<MonteCarloResult>,
}

/// Hypervolume of a front CSV.
pub fn hypervolume_of_file(cfg: &HypervolumeConfig, dir: &Path) -> Result<HypervolumeResult> {
    let front = read_front_csv(&cfg.front)?;
    let spec = HypervolumeSpec {
        reference: cfg.reference.clone(),
        direction: cfg.direction,
    };
    let exact = match hypervolume(&front, &spec) {
        Ok(v) => Some(v),
        Err(Error::Unsupported(_)) if cfg.monte_carlo_draws.is_some() => None,
        Err(e) => return Err(e),
    };
    let monte_carlo = cfg
        .monte_carlo_draws
        .map(|draws| {
            hypervolume_monte_carlo(&front, &spec, draws, 0).map(|e| MonteCarloResult {
                value: e.value,
                std_error: e.std_error,
                draws,
            })
        })
        .transpose()?;
    let result = HypervolumeResult {
        front: cfg.front.clone(),
        points: front.len(),
        spec,
        hypervolume: exact,
        monte_carlo,
    };
    write_json(&dir.join(file_id(&cfg.front)).join("result.json"), &result)?;
    Ok(result)
}
