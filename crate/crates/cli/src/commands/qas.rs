use std::f64::consts::PI;

use qmlkit::data::Dataset;
use qmlkit::qas::{
    bell_actions, bell_library, bell_target, brute_force, diffqas_train, evolve, qas_rl_train, BuilderEnv, QasTask,
};
use qmlkit::{Circuit, Statevector};
use serde_json::json;

use super::Checkpoint;
use crate::config::{Experiment, QasDiffConfig, QasEvoConfig, QasRlConfig, TargetSpec};
use crate::error::CliError;
use crate::output::{f, RunDir};

fn target_state(t: &TargetSpec) -> Statevector {
    match t {
        TargetSpec::Bell => bell_target(),
    }
}

fn export(dir: &RunDir, circuit: &Circuit) -> Result<(), CliError> {
    dir.write_text("best_circuit.json", &(circuit.to_json() + "\n"))?;
    Ok(())
}

pub fn qas_evo(cfg: &QasEvoConfig, dir: &mut RunDir) -> Result<(), CliError> {
    let library = bell_library(cfg.depth);
    let target = target_state(&cfg.target);
    let task = QasTask { depth_penalty: cfg.depth_penalty, seed: cfg.seed, ..QasTask::fidelity(target.clone()) };
    let res = evolve(&library, &task, &cfg.evo())?;

    let mut csv = dir.csv("generations", &["generation", "best_fitness", "mean_fitness", "best_ever", "best_genome"])?;
    for g in &res.history {
        csv.write_record([
            g.generation.to_string(),
            f(g.best_fitness),
            f(g.mean_fitness),
            f(g.best_ever),
            g.best_genome.to_string(),
        ])?;
        dir.event(json!({
            "event": "generation",
            "generation": g.generation,
            "best": g.best_ever,
            "genome": g.best_genome.to_string(),
        }))?;
    }
    csv.flush().map_err(csv::Error::from)?;

    let best = library.decode(&res.best)?;
    export(dir, &best)?;
    let fidelity = target.fidelity(&best.state(&[], &[])?)?;
    dir.event(json!({
        "event": "done",
        "best_genome": res.best.to_string(),
        "best_fitness": res.best_fitness,
        "fidelity": fidelity,
        "evaluations": res.evaluations,
        "circuit": best,
    }))?;
    println!(
        "best genome {} fitness {:.6} fidelity {fidelity:.6} ({} evaluations)",
        res.best, res.best_fitness, res.evaluations
    );
    if cfg.brute_force {
        let (g, score) = brute_force(&library, &task)?;
        dir.event(json!({"event": "brute_force", "genome": g.to_string(), "fitness": score}))?;
        println!("exhaustive optimum {g} fitness {score:.6}");
    }
    Ok(())
}

pub fn qas_rl(cfg: &QasRlConfig, dir: &mut RunDir) -> Result<(), CliError> {
    let actions = cfg.actions.clone().unwrap_or_else(bell_actions);
    let env = BuilderEnv::new(target_state(&cfg.target), actions, cfg.budget)?;
    let res = qas_rl_train(&env, &cfg.agent())?;

    let mut csv = dir.csv("episodes", &["episode", "reward", "best_reward"])?;
    let mut best = f64::NEG_INFINITY;
    for (episode, &r) in res.rewards.iter().enumerate() {
        if r > best {
            best = r;
            dir.event(json!({"event": "improved", "episode": episode, "reward": r}))?;
        }
        csv.write_record([episode.to_string(), f(r), f(best)])?;
    }
    csv.flush().map_err(csv::Error::from)?;

    export(dir, &res.best_circuit)?;
    dir.event(json!({"event": "done", "best_reward": res.best_reward, "circuit": res.best_circuit}))?;
    let gates: Vec<String> = res.best_ops.iter().map(|op| format!("{}{:?}", op.kind.name(), op.targets)).collect();
    println!("best fidelity {:.6} with [{}]", res.best_reward, gates.join(", "));
    Ok(())
}

/// `n` midpoints of equal bins over `[-pi, pi]`, labelled `cos x`.
pub fn cosine_data(n: usize) -> Dataset {
    let xs: Vec<f64> = (0..n).map(|i| -PI + (i as f64 + 0.5) * 2.0 * PI / n as f64).collect();
    Dataset { inputs: xs.iter().map(|&x| vec![x]).collect(), targets: xs.iter().map(|x| vec![x.cos()]).collect() }
}

pub fn qas_diff(cfg: &QasDiffConfig, dir: &mut RunDir) -> Result<(), CliError> {
    let data = cosine_data(cfg.data.n_points);
    let candidates = cfg.candidates.iter().map(|c| c.build()).collect::<Result<Vec<_>, _>>()?;
    let res = diffqas_train(&candidates, &data, &cfg.diff())?;

    let mut header = vec!["epoch".to_string(), "loss".to_string()];
    header.extend((0..candidates.len()).map(|j| format!("w{j}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = dir.csv("epochs", &header)?;
    for e in &res.history {
        let mut row = vec![e.epoch.to_string(), f(e.loss)];
        row.extend(e.weights.iter().map(|w| f(*w)));
        csv.write_record(&row)?;
    }
    csv.flush().map_err(csv::Error::from)?;

    export(dir, &candidates[res.selected])?;
    dir.checkpoint("ensemble", &Checkpoint::new(QasDiffConfig::NAME, cfg.seed, &res))?;
    dir.event(json!({"event": "done", "selected": res.selected, "weights": res.weights}))?;
    let w: Vec<String> = res.weights.iter().map(|w| format!("{w:.4}")).collect();
    println!("selected candidate {} with weights [{}]", res.selected, w.join(", "));
    Ok(())
}
