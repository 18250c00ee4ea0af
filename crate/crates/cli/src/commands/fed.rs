use qmlkit::data::separable_2d;
use qmlkit::federated::{simulate, FedConfig, LocalClient, LocalTraining};
use qmlkit::models::VqcModel;
use qmlkit::rng::stream;
use serde_json::json;

use super::Checkpoint;
use crate::config::{Experiment, FedSimConfig};
use crate::error::CliError;
use crate::output::{f, RunDir};

pub fn fed_sim(cfg: &FedSimConfig, dir: &mut RunDir) -> Result<(), CliError> {
    let mut rng = stream(cfg.seed, &[0]);
    let train = separable_2d(cfg.n_train, cfg.margin, &mut rng);
    let eval = separable_2d(cfg.n_eval, cfg.margin, &mut rng);
    let clients: Vec<LocalClient> = train
        .shards(cfg.clients)
        .into_iter()
        .enumerate()
        .map(|(id, shard)| LocalClient { id, shard })
        .collect();
    let init = VqcModel::random(cfg.circuit.build()?, &mut stream(cfg.seed, &[1]), cfg.init_half_width);
    let fed = FedConfig {
        rounds: cfg.rounds,
        local: LocalTraining { epochs: cfg.local_epochs, lr: cfg.lr, optimizer: cfg.optimizer },
        weighting: cfg.weighting,
    };

    let mut globals = Vec::with_capacity(cfg.rounds + 1);
    let (_, log) = simulate(init, &clients, &eval, &fed, |_, global| {
        globals.push(global.clone());
        Ok(())
    })?;

    let mut rounds_csv = dir.csv("rounds", &["round", "client", "loss"])?;
    let mut eval_csv = dir.csv("eval", &["round", "eval_loss"])?;
    for (r, global) in log.iter().zip(&globals) {
        for (client, loss) in &r.client_losses {
            rounds_csv.write_record([r.round.to_string(), client.to_string(), f(*loss)])?;
        }
        eval_csv.write_record([r.round.to_string(), f(r.eval_loss)])?;
        for w in &r.warnings {
            eprintln!("warning: round {}: {w}", r.round);
        }
        dir.event(json!({"event": "round", "round": r.round, "eval_loss": r.eval_loss, "warnings": r.warnings}))?;
        let name = format!("round-{:03}", r.round);
        dir.checkpoint(&name, &Checkpoint::new(FedSimConfig::NAME, cfg.seed, global))?;
    }
    rounds_csv.flush().map_err(csv::Error::from)?;
    eval_csv.flush().map_err(csv::Error::from)?;
    let (first, last) = (log[0].eval_loss, log[log.len() - 1].eval_loss);
    dir.event(json!({"event": "done", "initial_eval_loss": first, "final_eval_loss": last}))?;
    println!("eval loss {first:.6} -> {last:.6} over {} rounds", cfg.rounds);
    Ok(())
}
