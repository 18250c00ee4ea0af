//! TOML experiment configs. Every table rejects unknown keys; semantic
//! checks that span several fields live in the `validate` methods.

use std::path::{Path, PathBuf};

use qmlkit::autodiff::OptimizerKind;
use qmlkit::federated::Weighting;
use qmlkit::models::reservoir::ReadoutLoss;
use qmlkit::nn::Activation;
use qmlkit::qas::{BuilderAgentConfig, DiffQasConfig, EvoConfig};
use qmlkit::rl::agent::AgentConfig;
use qmlkit::{build_layered, Circuit, Encoding, Entangler, Observable, Op};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Problems found by validation, each tagged with the dotted key path.
#[derive(Debug, Default)]
pub struct Issues(pub Vec<(String, String)>);

impl Issues {
    pub fn push(&mut self, path: &str, message: impl Into<String>) {
        self.0.push((path.to_string(), message.into()));
    }

    fn check(&mut self, ok: bool, path: &str, message: impl Into<String>) {
        if !ok {
            self.push(path, message);
        }
    }

    fn positive(&mut self, value: usize, path: &str) {
        self.check(value > 0, path, "must be at least 1");
    }

    fn positive_f(&mut self, value: f64, path: &str) {
        self.check(value > 0.0 && value.is_finite(), path, format!("must be a positive number, got {value}"));
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Parses `text`, reporting the key path of the first offending value.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, String> {
    let de = toml::Deserializer::parse(text).map_err(|e| e.to_string().trim_end().to_string())?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let line = inner.span().map(|s| text[..s.start].lines().count().max(1));
        let at = match (path.as_str(), line) {
            (".", Some(l)) => format!("line {l}"),
            (".", None) => "top level".to_string(),
            (p, Some(l)) => format!("{p} (line {l})"),
            (p, None) => p.to_string(),
        };
        format!("{at}: {}", inner.message())
    })
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|m| CliError::Config(format!("{}: {m}", path.display())))
}

fn resolve(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

fn default_half_width() -> f64 {
    0.5
}

fn default_encoding() -> Encoding {
    Encoding::HadamardAngle
}

fn default_entangler() -> Entangler {
    Entangler::Ring
}

/// A layered circuit: encoding, `n_layers` of rotations plus entangler,
/// Pauli-Z readout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayeredSpec {
    pub n_qubits: usize,
    #[serde(default)]
    pub input_dim: usize,
    pub n_layers: usize,
    #[serde(default = "default_encoding")]
    pub encoding: Encoding,
    #[serde(default = "default_entangler")]
    pub entangler: Entangler,
    /// Qubits measured in Z, in output order; every qubit when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout: Option<Vec<usize>>,
}

impl LayeredSpec {
    /// Number of measured outputs: the readout qubits, or every qubit.
    pub fn n_outputs(&self) -> usize {
        self.readout.as_ref().map_or(self.n_qubits, Vec::len)
    }

    pub fn validate(&self, at: &str, issues: &mut Issues) {
        issues.check(
            (1..=16).contains(&self.n_qubits),
            &format!("{at}.n_qubits"),
            format!("must lie in 1..=16, got {}", self.n_qubits),
        );
        issues.check(
            self.input_dim <= self.n_qubits,
            &format!("{at}.input_dim"),
            format!("{} inputs do not fit on {} qubits", self.input_dim, self.n_qubits),
        );
        if let Some(r) = &self.readout {
            issues.check(!r.is_empty(), &format!("{at}.readout"), "needs at least one qubit");
            if let Some(q) = r.iter().find(|&&q| q >= self.n_qubits) {
                issues.push(&format!("{at}.readout"), format!("qubit {q} out of range for {} qubits", self.n_qubits));
            }
        }
    }

    pub fn build(&self) -> Result<Circuit, CliError> {
        let mut c = build_layered(self.n_qubits, self.input_dim, self.n_layers, self.encoding, self.entangler)?;
        if let Some(r) = &self.readout {
            c.set_observables(r.iter().map(|&q| Observable::z(q)).collect())?;
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSpec {
    pub epochs: usize,
    pub lr: f64,
    #[serde(default = "default_optimizer")]
    pub optimizer: OptimizerKind,
    #[serde(default = "default_half_width")]
    pub init_half_width: f64,
}

fn default_optimizer() -> OptimizerKind {
    OptimizerKind::Adam
}

impl TrainSpec {
    fn validate(&self, at: &str, issues: &mut Issues) {
        issues.positive(self.epochs, &format!("{at}.epochs"));
        issues.positive_f(self.lr, &format!("{at}.lr"));
        issues.check(self.init_half_width >= 0.0, &format!("{at}.init_half_width"), "must be >= 0");
    }
}

/// Labelled data for the supervised commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DataSpec {
    /// The four XOR points with 0/1 targets.
    Xor,
    /// Points in `[-1, 1]^2` labelled by the sign of `x0 + x1`, kept at
    /// least `margin` from the boundary.
    Separable { n: usize, margin: f64 },
    /// Numeric CSV with a header row; the last `n_targets` columns are targets.
    Csv {
        path: PathBuf,
        #[serde(default = "one")]
        n_targets: usize,
    },
}

fn one() -> usize {
    1
}

impl DataSpec {
    fn validate(&self, at: &str, issues: &mut Issues) {
        match self {
            DataSpec::Xor => {}
            DataSpec::Separable { n, margin } => {
                issues.positive(*n, &format!("{at}.n"));
                issues.check(
                    (0.0..1.0).contains(margin),
                    &format!("{at}.margin"),
                    format!("must lie in [0, 1), got {margin}"),
                );
            }
            DataSpec::Csv { path, n_targets } => {
                issues.positive(*n_targets, &format!("{at}.n_targets"));
                issues.check(path.exists(), &format!("{at}.path"), format!("{} does not exist", path.display()));
            }
        }
    }

    fn resolve(&mut self, base: &Path) {
        if let DataSpec::Csv { path, .. } = self {
            resolve(base, path);
        }
    }

    /// Input width the data will have, when known without reading files.
    fn input_dim(&self) -> Option<usize> {
        match self {
            DataSpec::Xor | DataSpec::Separable { .. } => Some(2),
            DataSpec::Csv { .. } => None,
        }
    }
}

/// `exp(-decay t) sin(omega t)` sampled every `dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SineSpec {
    pub length: usize,
    pub dt: f64,
    pub omega: f64,
    pub decay: f64,
    pub window: usize,
}

impl SineSpec {
    fn validate(&self, at: &str, issues: &mut Issues) {
        issues.positive(self.window, &format!("{at}.window"));
        issues.check(
            self.length > self.window,
            &format!("{at}.length"),
            format!("must exceed the window ({}) to give any samples", self.window),
        );
        issues.positive_f(self.dt, &format!("{at}.dt"));
        issues.check(self.decay >= 0.0, &format!("{at}.decay"), "must be >= 0");
    }
}

/// The four gate circuits of a QLSTM cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub hidden_dim: usize,
    #[serde(default = "default_half_width")]
    pub init_half_width: f64,
}

impl CellSpec {
    fn validate(&self, at: &str, input_dim: usize, issues: &mut Issues) {
        issues.positive(self.hidden_dim, &format!("{at}.hidden_dim"));
        issues.check(
            self.hidden_dim + input_dim <= self.n_qubits,
            &format!("{at}.n_qubits"),
            format!(
                "{} qubits cannot encode hidden_dim + input_dim = {}",
                self.n_qubits,
                self.hidden_dim + input_dim
            ),
        );
        issues.check(self.n_qubits <= 16, &format!("{at}.n_qubits"), "must be at most 16");
    }

    pub fn shape(&self, input_dim: usize) -> qmlkit::models::qlstm::QlstmShape {
        qmlkit::models::qlstm::QlstmShape {
            n_qubits: self.n_qubits,
            n_layers: self.n_layers,
            hidden_dim: self.hidden_dim,
            input_dim,
        }
    }
}

/// Common to every experiment: master seed and output directory.
pub trait Experiment: Serialize + DeserializeOwned {
    const NAME: &'static str;
    fn seed_mut(&mut self) -> &mut u64;
    fn out(&self) -> Option<&Path>;
    fn validate(&self, issues: &mut Issues);
    /// Makes relative file references relative to the config's directory.
    fn resolve_paths(&mut self, _base: &Path) {}
}

macro_rules! experiment {
    ($ty:ty, $name:literal, |$s:ident, $issues:ident| $body:block) => {
        experiment!($ty, $name, |$s, $issues| $body, |_s, _base| {});
    };
    ($ty:ty, $name:literal, |$s:ident, $issues:ident| $body:block, |$r:ident, $base:ident| $resolve:block) => {
        impl Experiment for $ty {
            const NAME: &'static str = $name;
            fn seed_mut(&mut self) -> &mut u64 {
                &mut self.seed
            }
            fn out(&self) -> Option<&Path> {
                self.out.as_deref()
            }
            fn validate(&self, $issues: &mut Issues) {
                let $s = self;
                $body
            }
            #[allow(unused_variables)]
            fn resolve_paths(&mut self, $base: &Path) {
                let $r = self;
                $resolve
            }
        }
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainVqcConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub circuit: LayeredSpec,
    pub data: DataSpec,
    pub train: TrainSpec,
}

experiment!(
    TrainVqcConfig,
    "train-vqc",
    |s, issues| {
        s.circuit.validate("circuit", issues);
        s.data.validate("data", issues);
        s.train.validate("train", issues);
        if let Some(d) = s.data.input_dim() {
            issues.check(
                s.circuit.input_dim == d,
                "circuit.input_dim",
                format!("data has {d} features, circuit encodes {}", s.circuit.input_dim),
            );
        }
    },
    |s, base| { s.data.resolve(base) }
);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainQlstmConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub cell: CellSpec,
    pub data: SineSpec,
    /// Optimizer steps (full batch over all windows).
    pub steps: usize,
    pub lr: f64,
    #[serde(default = "default_optimizer")]
    pub optimizer: OptimizerKind,
}

experiment!(TrainQlstmConfig, "train-qlstm", |s, issues| {
    s.cell.validate("cell", 1, issues);
    s.data.validate("data", issues);
    issues.positive(s.steps, "steps");
    issues.positive_f(s.lr, "lr");
});

/// What the reservoir readout learns from each window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReservoirTask {
    /// The next value (squared error).
    NextValue,
    /// Whether the next value is larger than the last one (cross-entropy).
    Direction,
}

impl ReservoirTask {
    pub fn loss(self) -> ReadoutLoss {
        match self {
            ReservoirTask::NextValue => ReadoutLoss::Mse,
            ReservoirTask::Direction => ReadoutLoss::Logistic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainReservoirConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub cell: CellSpec,
    pub data: SineSpec,
    pub task: ReservoirTask,
    pub epochs: usize,
    pub lr: f64,
}

experiment!(TrainReservoirConfig, "train-reservoir", |s, issues| {
    s.cell.validate("cell", 1, issues);
    s.data.validate("data", issues);
    issues.positive(s.epochs, "epochs");
    issues.positive_f(s.lr, "lr");
});

/// Episodes of one-step-ahead tracking on phase-shifted damped sines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpisodeSpec {
    pub episodes: usize,
    pub length: usize,
    pub dt: f64,
    pub omega: f64,
    pub decay: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainQfwpConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Fast network; one input (the observation), one output.
    pub fast: LayeredSpec,
    pub slow_hidden: usize,
    #[serde(default = "default_slow_half_width")]
    pub slow_half_width: f64,
    pub data: EpisodeSpec,
    pub steps: usize,
    pub lr: f64,
}

fn default_slow_half_width() -> f64 {
    0.3
}

experiment!(TrainQfwpConfig, "train-qfwp", |s, issues| {
    s.fast.validate("fast", issues);
    issues.check(s.fast.input_dim == 1, "fast.input_dim", "the tracking task feeds one value per step");
    issues.check(
        s.fast.n_outputs() == 1,
        "fast.readout",
        "the tracking task needs exactly one output; set readout = [0]",
    );
    issues.positive(s.slow_hidden, "slow_hidden");
    issues.positive(s.data.episodes, "data.episodes");
    issues.check(s.data.length >= 2, "data.length", "episodes need at least two samples");
    issues.positive(s.steps, "steps");
    issues.positive_f(s.lr, "lr");
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetSpec {
    pub sizes: Vec<usize>,
    #[serde(default = "default_hidden")]
    pub hidden: Activation,
    #[serde(default = "default_output")]
    pub output: Activation,
}

fn default_hidden() -> Activation {
    Activation::Tanh
}

fn default_output() -> Activation {
    Activation::Identity
}

impl NetSpec {
    /// Weight count of the network, `None` when the layer list is unusable.
    pub fn n_weights(&self) -> Option<usize> {
        if self.sizes.len() < 2 || self.sizes.contains(&0) {
            return None;
        }
        Some(self.sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompressorSpec {
    /// Defaults to the smallest register whose basis covers every weight.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_qubits: Option<usize>,
    pub n_layers: usize,
    #[serde(default = "default_entangler")]
    pub entangler: Entangler,
    /// Initial angles are uniform in +-init_half_width.
    #[serde(default = "default_pi")]
    pub init_half_width: f64,
}

fn default_pi() -> f64 {
    std::f64::consts::PI
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QtCompressConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub net: NetSpec,
    pub compressor: CompressorSpec,
    pub data: DataSpec,
    pub epochs: usize,
    pub lr: f64,
    /// Also train the network's weights directly, as a representability check.
    #[serde(default)]
    pub baseline: bool,
}

experiment!(
    QtCompressConfig,
    "qt-compress",
    |s, issues| {
        match s.net.n_weights() {
            None => issues.push("net.sizes", "needs at least two non-zero layer widths"),
            Some(m) => {
                if let Some(n) = s.compressor.n_qubits {
                    issues.check(
                        n >= 1 && n <= 16 && (1usize << n) >= m,
                        "compressor.n_qubits",
                        format!("capacity error: {m} weights need at least 2^N >= {m}, got N = {n}"),
                    );
                }
            }
        }
        if let (Some(d), Some(&w)) = (s.data.input_dim(), s.net.sizes.first()) {
            issues.check(w == d, "net.sizes", format!("data has {d} features, the input layer has {w}"));
        }
        s.data.validate("data", issues);
        issues.positive(s.epochs, "epochs");
        issues.positive_f(s.lr, "lr");
    },
    |s, base| { s.data.resolve(base) }
);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LakeSpec {
    /// Rows of `S`, `F`, `H`, `G`.
    pub map: Vec<String>,
    pub step_limit: usize,
    #[serde(default)]
    pub slippery: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QrlConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub env: LakeSpec,
    #[serde(default)]
    pub agent: AgentConfig,
    pub episodes: usize,
    #[serde(default = "one")]
    pub eval_episodes: usize,
}

impl LakeSpec {
    pub fn build(&self) -> Result<qmlkit::rl::GridEnv, qmlkit::Error> {
        let rows: Vec<&str> = self.map.iter().map(String::as_str).collect();
        let mut env = qmlkit::rl::GridEnv::from_map(&rows, self.step_limit)?;
        env.slippery = self.slippery;
        Ok(env)
    }
}

experiment!(QrlConfig, "qrl", |s, issues| {
    match s.env.build() {
        Ok(env) => issues.check(
            env.n_states() <= 1 << 16,
            "env.map",
            "too many cells to basis-encode on 16 qubits",
        ),
        Err(e) => issues.push("env", e.to_string()),
    }
    let a = &s.agent;
    issues.positive(a.batch_size, "agent.batch_size");
    issues.check(a.buffer_capacity >= a.batch_size, "agent.buffer_capacity", "must hold at least one batch");
    issues.positive(a.target_period, "agent.target_period");
    issues.check((0.0..=1.0).contains(&a.gamma), "agent.gamma", "must lie in [0, 1]");
    issues.positive_f(a.lr, "agent.lr");
    for (v, k) in [(a.epsilon_start, "agent.epsilon_start"), (a.epsilon_end, "agent.epsilon_end")] {
        issues.check((0.0..=1.0).contains(&v), k, "must lie in [0, 1]");
    }
    issues.positive(s.episodes, "episodes");
    issues.positive(s.eval_episodes, "eval_episodes");
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FedSimConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub circuit: LayeredSpec,
    #[serde(default = "default_half_width")]
    pub init_half_width: f64,
    /// Training points, split into contiguous disjoint shards.
    pub n_train: usize,
    pub n_eval: usize,
    pub margin: f64,
    pub clients: usize,
    pub rounds: usize,
    pub local_epochs: usize,
    pub lr: f64,
    #[serde(default = "default_optimizer")]
    pub optimizer: OptimizerKind,
    #[serde(default)]
    pub weighting: Weighting,
}

experiment!(FedSimConfig, "fed-sim", |s, issues| {
    s.circuit.validate("circuit", issues);
    issues.check(s.circuit.input_dim == 2, "circuit.input_dim", "the separable dataset has 2 features");
    issues.check(s.circuit.n_outputs() == 1, "circuit.readout", "labels are scalar; set readout = [0]");
    issues.positive(s.clients, "clients");
    issues.check(s.n_train >= s.clients, "n_train", format!("{} points cannot fill {} shards", s.n_train, s.clients));
    issues.positive(s.n_eval, "n_eval");
    issues.check((0.0..1.0).contains(&s.margin), "margin", "must lie in [0, 1)");
    issues.positive(s.rounds, "rounds");
    issues.positive_f(s.lr, "lr");
});

/// Target state for fidelity search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetSpec {
    /// `(|00> + |11>)/sqrt 2`.
    Bell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QasEvoConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub target: TargetSpec,
    /// Slots in the genome; each offers the eight two-qubit Bell blocks.
    pub depth: usize,
    #[serde(default)]
    pub depth_penalty: f64,
    pub search: EvoSearch,
    /// Also score every genome and report the exhaustive optimum.
    #[serde(default)]
    pub brute_force: bool,
}

/// [`EvoConfig`] without the seed, which comes from the top level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvoSearch {
    pub population: usize,
    pub generations: usize,
    pub mutation_rate: f64,
    #[serde(default = "yes")]
    pub elitism: bool,
}

fn yes() -> bool {
    true
}

impl QasEvoConfig {
    pub fn evo(&self) -> EvoConfig {
        EvoConfig {
            population: self.search.population,
            generations: self.search.generations,
            mutation_rate: self.search.mutation_rate,
            elitism: self.search.elitism,
            seed: self.seed,
        }
    }
}

experiment!(QasEvoConfig, "qas-evo", |s, issues| {
    issues.positive(s.depth, "depth");
    issues.check(s.depth <= 20, "depth", "at most 20 slots");
    issues.check(s.depth_penalty >= 0.0, "depth_penalty", "must be >= 0");
    issues.check(s.search.population >= 2, "search.population", "must be at least 2");
    issues.positive(s.search.generations, "search.generations");
    issues.check((0.0..=1.0).contains(&s.search.mutation_rate), "search.mutation_rate", "must lie in [0, 1]");
    issues.check(!s.brute_force || s.depth <= 6, "brute_force", "exhaustive scoring is limited to depth <= 6");
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QasRlConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub target: TargetSpec,
    pub budget: usize,
    /// Fixed gates the agent may place; the four Bell actions when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actions: Option<Vec<Op>>,
    pub agent: BuilderSearch,
}

/// [`BuilderAgentConfig`] without the seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuilderSearch {
    pub episodes: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub anneal_fraction: f64,
}

impl QasRlConfig {
    pub fn agent(&self) -> BuilderAgentConfig {
        let a = self.agent;
        BuilderAgentConfig {
            episodes: a.episodes,
            alpha: a.alpha,
            gamma: a.gamma,
            epsilon_start: a.epsilon_start,
            epsilon_end: a.epsilon_end,
            anneal_fraction: a.anneal_fraction,
            seed: self.seed,
        }
    }
}

experiment!(QasRlConfig, "qas-rl", |s, issues| {
    issues.positive(s.budget, "budget");
    issues.positive(s.agent.episodes, "agent.episodes");
    issues.check((0.0..=1.0).contains(&s.agent.alpha), "agent.alpha", "must lie in [0, 1]");
    issues.check((0.0..=1.0).contains(&s.agent.gamma), "agent.gamma", "must lie in [0, 1]");
    if let Some(a) = &s.actions {
        issues.check(!a.is_empty(), "actions", "needs at least one gate");
    }
});

/// Regression of `cos x` on evenly spaced points of `[-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosineSpec {
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QasDiffConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub data: CosineSpec,
    pub candidates: Vec<LayeredSpec>,
    pub epochs: usize,
    pub lr: f64,
    pub logit_lr: f64,
    #[serde(default = "default_half_width")]
    pub init_half_width: f64,
}

impl QasDiffConfig {
    pub fn diff(&self) -> DiffQasConfig {
        DiffQasConfig {
            epochs: self.epochs,
            lr: self.lr,
            logit_lr: self.logit_lr,
            init_half_width: self.init_half_width,
            seed: self.seed,
        }
    }
}

experiment!(QasDiffConfig, "qas-diff", |s, issues| {
    issues.positive(s.data.n_points, "data.n_points");
    issues.check(!s.candidates.is_empty(), "candidates", "needs at least one candidate");
    for (j, c) in s.candidates.iter().enumerate() {
        let at = format!("candidates[{j}]");
        c.validate(&at, issues);
        issues.check(c.input_dim == 1, &format!("{at}.input_dim"), "the cosine task has one input");
        issues.check(
            c.n_outputs() == 1,
            &format!("{at}.readout"),
            "the cosine task needs exactly one output",
        );
    }
    issues.positive(s.epochs, "epochs");
    issues.positive_f(s.lr, "lr");
    issues.positive_f(s.logit_lr, "logit_lr");
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Circuit document (JSON, version 1).
    pub circuit: PathBuf,
    #[serde(default)]
    pub inputs: Vec<f64>,
    #[serde(default)]
    pub params: Vec<f64>,
    /// Measurement shots to sample; none when zero.
    #[serde(default)]
    pub shots: u64,
}

experiment!(
    SimulateConfig,
    "simulate",
    |s, issues| {
        let text = match std::fs::read_to_string(&s.circuit) {
            Ok(t) => t,
            Err(e) => return issues.push("circuit", format!("cannot read {}: {e}", s.circuit.display())),
        };
        match Circuit::from_json(&text) {
            Err(e) => issues.push("circuit", e.to_string()),
            Ok(c) => {
                issues.check(
                    s.inputs.len() == c.input_dim(),
                    "inputs",
                    format!("circuit takes {} inputs, {} given", c.input_dim(), s.inputs.len()),
                );
                issues.check(
                    s.params.len() == c.n_params(),
                    "params",
                    format!("circuit has {} parameters, {} given", c.n_params(), s.params.len()),
                );
            }
        }
    },
    |s, base| { resolve(base, &mut s.circuit) }
);
