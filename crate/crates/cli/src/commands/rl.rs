use qmlkit::rl::agent::{train_qrl, QAgent};
use qmlkit::rng::stream;
use serde_json::json;

use super::Checkpoint;
use crate::config::{Experiment, QrlConfig};
use crate::error::CliError;
use crate::output::{f, RunDir};

pub fn qrl(cfg: &QrlConfig, dir: &mut RunDir) -> Result<(), CliError> {
    let mut env = cfg.env.build()?;
    let mut agent = QAgent::new(env.n_states(), cfg.agent, &mut stream(cfg.seed, &[0]))?;
    let log = train_qrl(&mut env, &mut agent, cfg.episodes, cfg.seed)?;
    let mut csv = dir.csv("episodes", &["episode", "return", "length", "epsilon"])?;
    for e in &log {
        csv.write_record([e.episode.to_string(), f(e.ret), e.length.to_string(), f(e.epsilon)])?;
    }
    csv.flush().map_err(csv::Error::from)?;

    let eval = cfg.env.build()?;
    let greedy = agent.greedy_return(&eval, cfg.eval_episodes, &mut stream(cfg.seed, &[4]))?;
    let solved = !eval.slippery && agent.greedy_solves(&eval)?;
    dir.checkpoint("agent", &Checkpoint::new(QrlConfig::NAME, cfg.seed, &agent.model))?;
    dir.event(json!({
        "event": "done",
        "episodes": log.len(),
        "updates": agent.updates(),
        "greedy_return": greedy,
        "solved": solved,
    }))?;
    println!("greedy return {greedy:.3} over {} evaluation episodes; solved: {solved}", cfg.eval_episodes);
    Ok(())
}
