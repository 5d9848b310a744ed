use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::Direction;
use crate::objectives::{make_synthetic_dataset, MlpObjective, MlpSpec, SyntheticDataset, ToyConfig, TOY_INITS};
use crate::trainer::{BaselineMethod, TrainerConfig};

/// One experiment run, as read from a JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub experiment: Experiment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    ToySweep(ToySweepConfig),
    ToyBaseline(ToyBaselineConfig),
    MlpPml(MlpPmlConfig),
    AblationGrid(AblationConfig),
    SubspaceEval(SubspaceEvalConfig),
    Hypervolume(HypervolumeConfig),
}

impl Experiment {
    /// Name used for the subcommand and the output directory.
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::ToySweep(_) => "toy-sweep",
            Experiment::ToyBaseline(_) => "toy-baseline",
            Experiment::MlpPml(_) => "mlp-pml",
            Experiment::AblationGrid(_) => "ablation-grid",
            Experiment::SubspaceEval(_) => "subspace-eval",
            Experiment::Hypervolume(_) => "hypervolume",
        }
    }
}

fn segment_101() -> usize {
    101
}
fn segment_11() -> usize {
    11
}
fn oracle_1201() -> usize {
    1201
}
fn threshold_095() -> f64 {
    0.95
}
fn all_methods() -> Vec<BaselineMethod> {
    vec![BaselineMethod::Ls, BaselineMethod::Mgda2, BaselineMethod::PcGrad]
}
fn hidden_16() -> Vec<usize> {
    vec![16]
}
fn yes() -> bool {
    true
}
fn three() -> usize {
    3
}
fn windows() -> Vec<usize> {
    vec![2, 3, 4, 5]
}
fn lambdas() -> Vec<f64> {
    vec![0.0, 2.0, 5.0, 10.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToySweepConfig {
    #[serde(default)]
    pub toy: ToyConfig,
    pub trainer: TrainerConfig,
    /// Ordered pairs of indices into the five standard inits; all 25 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[usize; 2]>>,
    #[serde(default = "segment_101")]
    pub segment_points: usize,
    #[serde(default = "oracle_1201")]
    pub oracle_resolution: usize,
    /// Oracle ratio counted as a recovered front in the summary.
    #[serde(default = "threshold_095")]
    pub ratio_threshold: f64,
}

impl ToySweepConfig {
    pub fn pairs(&self) -> Vec<[usize; 2]> {
        self.pairs
            .clone()
            .unwrap_or_else(|| (0..TOY_INITS.len()).flat_map(|i| (0..TOY_INITS.len()).map(move |j| [i, j])).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyBaselineConfig {
    #[serde(default)]
    pub toy: ToyConfig,
    pub trainer: TrainerConfig,
    #[serde(default = "all_methods")]
    pub methods: Vec<BaselineMethod>,
    /// Indices into the five standard inits; all of them when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inits: Option<Vec<usize>>,
}

impl ToyBaselineConfig {
    pub fn inits(&self) -> Vec<usize> {
        self.inits.clone().unwrap_or_else(|| (0..TOY_INITS.len()).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalSplit {
    /// The samples the ensemble was trained on.
    #[default]
    Train,
    /// A fresh draw from the same distribution.
    Test,
}

fn samples_4000() -> usize {
    4000
}
fn noise_01() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub conflict_angle: f64,
    #[serde(default = "samples_4000")]
    pub samples: usize,
    #[serde(default = "noise_01")]
    pub noise_std: f64,
    #[serde(default)]
    pub eval: EvalSplit,
}

impl DatasetConfig {
    /// Offset between the training seed and the test-split seed.
    pub const TEST_SEED_OFFSET: u64 = 0x7E57;

    pub fn train(&self, seed: u64) -> Result<SyntheticDataset> {
        make_synthetic_dataset(self.conflict_angle, self.samples, self.noise_std, seed)
    }

    pub fn eval(&self, seed: u64) -> Result<SyntheticDataset> {
        match self.eval {
            EvalSplit::Train => self.train(seed),
            EvalSplit::Test => make_synthetic_dataset(
                self.conflict_angle,
                self.samples,
                self.noise_std,
                seed.wrapping_add(Self::TEST_SEED_OFFSET),
            ),
        }
    }

    /// Training and evaluation objectives for an MLP with the given hidden widths.
    pub fn objectives(&self, hidden: &[usize], seed: u64) -> Result<(MlpObjective, MlpObjective)> {
        let spec = MlpSpec::new(2, hidden.to_vec(), 2)?;
        Ok((
            MlpObjective::new(spec.clone(), self.train(seed)?)?,
            MlpObjective::new(spec, self.eval(seed)?)?,
        ))
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&self.conflict_angle) {
            return Err(Error::invalid("conflict_angle must lie in [0, pi/2]"));
        }
        if self.samples == 0 {
            return Err(Error::invalid("dataset needs at least one sample"));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(Error::invalid("noise_std must be finite and >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpPmlConfig {
    pub dataset: DatasetConfig,
    #[serde(default = "hidden_16")]
    pub hidden: Vec<usize>,
    pub trainer: TrainerConfig,
    #[serde(default = "segment_11")]
    pub segment_points: usize,
    /// Also train a single linear-scalarization model for comparison.
    #[serde(default = "yes")]
    pub ls_baseline: bool,
}

/// Objective an ablation or subspace evaluation runs on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ObjectiveConfig {
    Toy {
        #[serde(default)]
        toy: ToyConfig,
    },
    Mlp {
        dataset: DatasetConfig,
        #[serde(default = "hidden_16")]
        hidden: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AblationConfig {
    pub objective: ObjectiveConfig,
    pub trainer: TrainerConfig,
    /// Toy member inits as indices into the five standard inits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<[usize; 2]>,
    #[serde(default = "three")]
    pub seeds: usize,
    #[serde(default = "windows")]
    pub windows: Vec<usize>,
    #[serde(default = "lambdas")]
    pub lambdas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segment_points: Option<usize>,
}

impl AblationConfig {
    /// `(W, λ)` cells: the base case `(1, 0)` followed by the full grid.
    pub fn cells(&self) -> Vec<(usize, f64)> {
        let mut cells = vec![(1, 0.0)];
        for &w in &self.windows {
            for &l in &self.lambdas {
                cells.push((w, l));
            }
        }
        cells
    }

    pub fn segment_points(&self) -> usize {
        self.segment_points.unwrap_or(match self.objective {
            ObjectiveConfig::Toy { .. } => 101,
            ObjectiveConfig::Mlp { .. } => 11,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceEvalConfig {
    pub checkpoint: PathBuf,
    pub objective: ObjectiveConfig,
    #[serde(default = "segment_101")]
    pub resolution: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Vec<f64>>,
    #[serde(default)]
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypervolumeConfig {
    pub front: PathBuf,
    pub reference: Vec<f64>,
    #[serde(default)]
    pub direction: Direction,
    /// Also report a Monte-Carlo estimate with this many draws.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monte_carlo_draws: Option<u64>,
}

fn check_init(i: usize) -> Result<()> {
    if i >= TOY_INITS.len() {
        return Err(Error::invalid(format!(
            "init index {i} out of range (there are {})",
            TOY_INITS.len()
        )));
    }
    Ok(())
}

fn check_segment(points: usize) -> Result<()> {
    if points < 2 {
        return Err(Error::invalid("segment needs at least 2 points"));
    }
    Ok(())
}

fn check_objective(objective: &ObjectiveConfig) -> Result<()> {
    match objective {
        ObjectiveConfig::Toy { toy } => ToyConfig::new(toy.scale_c).map(|_| ()),
        ObjectiveConfig::Mlp { dataset, hidden } => {
            dataset.validate()?;
            MlpSpec::new(2, hidden.clone(), 2).map(|_| ())
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Copies the top-level seed into the trainer settings.
    pub fn resolved(mut self) -> Self {
        let seed = self.seed;
        match &mut self.experiment {
            Experiment::ToySweep(c) => c.trainer.seed = seed,
            Experiment::ToyBaseline(c) => c.trainer.seed = seed,
            Experiment::MlpPml(c) => c.trainer.seed = seed,
            Experiment::AblationGrid(c) => c.trainer.seed = seed,
            Experiment::SubspaceEval(_) | Experiment::Hypervolume(_) => {}
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        match &self.experiment {
            Experiment::ToySweep(c) => {
                ToyConfig::new(c.toy.scale_c)?;
                c.trainer.validate()?;
                check_segment(c.segment_points)?;
                if c.oracle_resolution < crate::metrics::MIN_ORACLE_RESOLUTION {
                    return Err(Error::invalid("oracle_resolution must be at least 100"));
                }
                let pairs = c.pairs();
                if pairs.is_empty() {
                    return Err(Error::invalid("no init pairs selected"));
                }
                pairs.iter().flatten().try_for_each(|&i| check_init(i))
            }
            Experiment::ToyBaseline(c) => {
                ToyConfig::new(c.toy.scale_c)?;
                c.trainer.validate()?;
                if c.methods.is_empty() {
                    return Err(Error::invalid("no baseline methods selected"));
                }
                c.inits().into_iter().try_for_each(check_init)
            }
            Experiment::MlpPml(c) => {
                c.dataset.validate()?;
                MlpSpec::new(2, c.hidden.clone(), 2)?;
                c.trainer.validate()?;
                check_segment(c.segment_points)
            }
            Experiment::AblationGrid(c) => {
                check_objective(&c.objective)?;
                c.trainer.validate()?;
                check_segment(c.segment_points())?;
                if c.seeds == 0 {
                    return Err(Error::invalid("ablation needs at least one seed"));
                }
                if c.windows.contains(&0) {
                    return Err(Error::invalid("windows must be at least 1"));
                }
                if c.lambdas.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
                    return Err(Error::invalid("lambdas must be finite and >= 0"));
                }
                match (&c.objective, c.pair) {
                    (ObjectiveConfig::Toy { .. }, None) => Err(Error::invalid("toy ablation needs a `pair`")),
                    (ObjectiveConfig::Toy { .. }, Some(p)) => p.iter().try_for_each(|&i| check_init(i)),
                    (ObjectiveConfig::Mlp { .. }, Some(_)) => Err(Error::invalid("`pair` only applies to the toy")),
                    (ObjectiveConfig::Mlp { .. }, None) => Ok(()),
                }
            }
            Experiment::SubspaceEval(c) => {
                check_objective(&c.objective)?;
                check_segment(c.resolution)?;
                if let Some(r) = &c.reference {
                    if r.len() != 2 || r.iter().any(|v| !v.is_finite()) {
                        return Err(Error::invalid("reference must be two finite numbers"));
                    }
                }
                Ok(())
            }
            Experiment::Hypervolume(c) => {
                if c.reference.is_empty() || c.reference.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid("reference must be non-empty and finite"));
                }
                if c.monte_carlo_draws == Some(0) {
                    return Err(Error::invalid("monte_carlo_draws must be positive"));
                }
                Ok(())
            }
        }
    }
}
