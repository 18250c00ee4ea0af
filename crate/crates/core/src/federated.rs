//! In-process federated training: clients fit copies of a global model on
//! their own shards and a central step averages the returned parameters.
//!
//! Only parameter vectors cross the [`Client`] boundary, so a networked
//! transport could stand in for [`LocalClient`] without touching the round
//! logic.

use serde::{Deserialize, Serialize};

use crate::autodiff::{Optimizer, OptimizerKind};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::models::vqc::{dataset_loss, train_epoch, VqcModel};
use crate::par::par_map;

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Element-wise weighted mean of client parameter vectors.
///
/// Each slot is summed in a canonical order (products sorted by value), so
/// the result does not depend on client order, and a slot on which every
/// client agrees comes back bit-exact.
pub fn fed_avg(params: &[Vec<f64>], weights: &[f64]) -> Result<Vec<f64>> {
    let Some(first) = params.first() else {
        return Err(Error::Empty("no client parameters to aggregate".into()));
    };
    if weights.len() != params.len() {
        return Err(Error::Shape(format!(
            "{} weights for {} clients",
            weights.len(),
            params.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
        return Err(Error::Config(format!(
            "aggregation weight {w} is not a finite non-negative number"
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::Config(format!(
            "aggregation weights sum to {total}, expected 1"
        )));
    }
    if let Some((k, p)) = params
        .iter()
        .enumerate()
        .find(|(_, p)| p.len() != first.len())
    {
        return Err(Error::Shape(format!(
            "client {k} sent {} parameters, client 0 sent {}",
            p.len(),
            first.len()
        )));
    }

    let mut terms = Vec::with_capacity(params.len());
    Ok((0..first.len())
        .map(|i| {
            let v0 = first[i];
            if params.iter().all(|p| p[i].to_bits() == v0.to_bits()) {
                return v0;
            }
            terms.clear();
            terms.extend(params.iter().zip(weights).map(|(p, w)| p[i] * w));
            terms.sort_by(f64::total_cmp);
            terms.iter().sum()
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    #[default]
    Uniform,
    ShardSize,
}

impl Weighting {
    fn weights(self, sizes: &[usize]) -> Vec<f64> {
        match self {
            Weighting::Uniform => vec![1.0 / sizes.len() as f64; sizes.len()],
            Weighting::ShardSize => {
                let total: usize = sizes.iter().sum();
                sizes.iter().map(|&n| n as f64 / total as f64).collect()
            }
        }
    }
}

/// Local training budget handed to every client in a round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalTraining {
    pub epochs: usize,
    pub lr: f64,
    pub optimizer: OptimizerKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClientUpdate {
    pub client: usize,
    pub params: Vec<f64>,
    /// Training loss before the last local step.
    pub loss: f64,
    pub n_samples: usize,
}

pub trait Client: Sync {
    fn id(&self) -> usize;

    /// Trains a copy of `global`; `None` means the client sat this round out.
    fn train(&self, global: &VqcModel, budget: &LocalTraining) -> Result<Option<ClientUpdate>>;
}

/// A client holding its shard in memory. Local optimizer state starts
/// fresh every round; only `theta` is trained and exchanged.
#[derive(Debug, Clone)]
pub struct LocalClient {
    pub id: usize,
    pub shard: Dataset,
}

impl Client for LocalClient {
    fn id(&self) -> usize {
        self.id
    }

    fn train(&self, global: &VqcModel, budget: &LocalTraining) -> Result<Option<ClientUpdate>> {
        if self.shard.is_empty() {
            return Ok(None);
        }
        let mut model = global.clone();
        let mut opt = Optimizer::new(budget.optimizer, budget.lr, model.theta.len());
        let mut loss = f64::NAN;
        for _ in 0..budget.epochs {
            loss = train_epoch(&mut model, &self.shard, &mut opt)?;
        }
        if budget.epochs == 0 {
            loss = dataset_loss(&model, &self.shard)?;
        }
        Ok(Some(ClientUpdate {
            client: self.id,
            params: model.theta,
            loss,
            n_samples: self.shard.len(),
        }))
    }
}

#[derive(Debug, Clone)]
pub struct RoundResult {
    pub global: VqcModel,
    pub updates: Vec<ClientUpdate>,
    pub warnings: Vec<String>,
}

/// One round: broadcast, local training (in parallel), aggregation.
pub fn fed_round<C: Client>(
    global: &VqcModel,
    clients: &[C],
    budget: &LocalTraining,
    weighting: Weighting,
) -> Result<RoundResult> {
    if clients.is_empty() {
        return Err(Error::InvalidCount(
            "a round needs at least one client".into(),
        ));
    }
    let results = par_map(clients, |c| c.train(global, budget));
    let mut updates = Vec::new();
    let mut warnings = Vec::new();
    for (client, res) in clients.iter().zip(results) {
        match res? {
            Some(u) => updates.push(u),
            None => warnings.push(format!("client {} skipped: empty shard", client.id())),
        }
    }
    if updates.is_empty() {
        return Err(Error::Empty("every client skipped the round".into()));
    }
    let sizes: Vec<usize> = updates.iter().map(|u| u.n_samples).collect();
    let params: Vec<Vec<f64>> = updates.iter().map(|u| u.params.clone()).collect();
    let mut next = global.clone();
    next.theta = fed_avg(&params, &weighting.weights(&sizes))?;
    Ok(RoundResult {
        global: next,
        updates,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FedConfig {
    pub rounds: usize,
    pub local: LocalTraining,
    #[serde(default)]
    pub weighting: Weighting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundLog {
    pub round: usize,
    pub eval_loss: f64,
    /// `(client, loss)` for clients that trained this round.
    pub client_losses: Vec<(usize, f64)>,
    pub warnings: Vec<String>,
}

/// Runs `config.rounds` rounds. The log starts with round 0, the untrained
/// global model's loss on `eval`. `on_round` sees each new global model.
pub fn simulate<C, F>(
    init: VqcModel,
    clients: &[C],
    eval: &Dataset,
    config: &FedConfig,
    mut on_round: F,
) -> Result<(VqcModel, Vec<RoundLog>)>
where
    C: Client,
    F: FnMut(&RoundLog, &VqcModel) -> Result<()>,
{
    let mut global = init;
    let first = RoundLog {
        round: 0,
        eval_loss: dataset_loss(&global, eval)?,
        client_losses: vec![],
        warnings: vec![],
    };
    on_round(&first, &global)?;
    let mut log = vec![first];
    for round in 1..=config.rounds {
        let res = fed_round(&global, clients, &config.local, config.weighting)?;
        global = res.global;
        let entry = RoundLog {
            round,
            eval_loss: dataset_loss(&global, eval)?,
            client_losses: res.updates.iter().map(|u| (u.client, u.loss)).collect(),
            warnings: res.warnings,
        };
        on_round(&entry, &global)?;
        log.push(entry);
    }
    Ok((global, log))
}
