//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
//!
//! Criteria 1-10 exercise the library against the dense reference
//! implementations in `core/tests/common/oracle.rs`; 11 drives the binary.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qmlkit::autodiff::{param_shift_grad, Optimizer, OptimizerKind};
use qmlkit::data::{damped_sine, next_step_windows, separable_2d, xor, Dataset};
use qmlkit::federated::{fed_avg, simulate, FedConfig, LocalClient, LocalTraining, Weighting};
use qmlkit::models::qlstm::{train_windows, window_loss, QlstmRegressor, QlstmShape, QlstmState};
use qmlkit::models::qt::{compressor_qubits, net_loss_grad, qt_loss_grad, qt_train, qubits_for_weights, QtCompressor};
use qmlkit::models::vqc::{dataset_loss, VqcModel};
use qmlkit::models::Qlstm;
use qmlkit::nn::{Activation, Mlp};
use qmlkit::qas::{
    bell_actions, bell_library, bell_target, brute_force, diffqas_forward, diffqas_train, evolve, qas_rl_train,
    BuilderAgentConfig, BuilderEnv, DiffQasConfig, EvoConfig, QasTask,
};
use qmlkit::rl::agent::{train_qrl, AgentConfig, QAgent};
use qmlkit::rl::GridEnv;
use qmlkit::rng::{rng_from_seed, stream, uniform_vec};
use qmlkit::{build_layered, Circuit, Encoding, Entangler, Observable, Op};
use rand::Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn dense_expect(c: &Circuit, x: &[f64], theta: &[f64], obs: &Observable) -> f64 {
    let m = oracle::pauli_string_matrix(obs.factors(), c.n_qubits());
    oracle::dense_expectation(&oracle::dense_state(c, x, theta), &m).re
}

fn c1_simulator() -> Check {
    let mut rng = rng_from_seed(1001);
    let mut worst = 0.0f64;
    for trial in 0..200 {
        let n = rng.gen_range(1..=6);
        let depth = rng.gen_range(1..=30);
        let c = oracle::random_circuit(n, depth, 2, 3, &mut rng);
        let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let theta: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let fast = c.state(&x, &theta).map_err(|e| e.to_string())?;
        let slow = oracle::dense_state(&c, &x, &theta);
        for (a, b) in fast.amplitudes().iter().zip(&slow) {
            let (dr, di) = ((a.re - b.re).abs(), (a.im - b.im).abs());
            worst = worst.max(dr).max(di);
            ensure(dr <= 1e-10 && di <= 1e-10, format!("circuit {trial} (n={n}, depth={depth}): {a} vs {b}"))?;
        }
    }
    Ok(format!("200 circuits, max deviation {worst:.1e}"))
}

fn c2_gradients() -> Check {
    let mut rng = rng_from_seed(1002);
    let mut worst = 0.0f64;
    let h = 1e-5;
    for trial in 0..50 {
        let n = rng.gen_range(1..=8);
        let depth = rng.gen_range(1..=25);
        let c = oracle::random_circuit(n, depth, 1, 4, &mut rng);
        let x = [rng.gen_range(-2.0..2.0)];
        let theta: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let obs = Observable::new(oracle::random_pauli_string(n, &mut rng)).map_err(|e| e.to_string())?;
        let slot = rng.gen_range(0..4);
        let ps = param_shift_grad(&c, &x, &theta, &obs, slot).map_err(|e| e.to_string())?;
        let mut t = theta.clone();
        t[slot] += h;
        let plus = dense_expect(&c, &x, &t, &obs);
        t[slot] -= 2.0 * h;
        let fd = (plus - dense_expect(&c, &x, &t, &obs)) / (2.0 * h);
        worst = worst.max((ps - fd).abs());
        ensure((ps - fd).abs() <= 1e-6, format!("triple {trial} (n={n}): shift {ps} vs difference {fd}"))?;
    }
    Ok(format!("50 triples, max deviation {worst:.1e}"))
}

fn c3_qlstm_cell() -> Check {
    let shape = QlstmShape { n_qubits: 3, n_layers: 1, hidden_dim: 2, input_dim: 1 };
    let cell = Qlstm::new(shape, &mut rng_from_seed(0), 1.0).map_err(|e| e.to_string())?;
    let mut rng = rng_from_seed(1003);
    let mut worst = 0.0f64;
    for k in 0..100 {
        // stub network g: a_g = W_g v + b_g
        let w: Vec<f64> = (0..4 * 2 * 3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let b: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let stub = |g: usize, v: &[f64]| -> Vec<f64> {
            (0..2).map(|o| (0..3).map(|i| w[(g * 2 + o) * 3 + i] * v[i]).sum::<f64>() + b[g * 2 + o]).collect()
        };
        let prev = QlstmState {
            h: vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
            c: vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)],
        };
        let x = [rng.gen_range(-2.0..2.0)];
        let (next, _) = cell.step_with(&x, &prev, |g, v| Ok(stub(g, v))).map_err(|e| e.to_string())?;
        let v = [prev.h[0], prev.h[1], x[0]];
        let (h, c) = oracle::lstm_cell(&stub(0, &v), &stub(1, &v), &stub(2, &v), &stub(3, &v), &prev.c);
        for i in 0..2 {
            let d = (next.h[i] - h[i]).abs().max((next.c[i] - c[i]).abs());
            worst = worst.max(d);
            ensure(d <= 1e-12, format!("stub instance {k}: deviation {d:e}"))?;
        }
    }

    let model = QlstmRegressor::new(shape, 1, &mut rng_from_seed(1004), 1.5).map_err(|e| e.to_string())?;
    let seq = vec![vec![0.3], vec![-0.8], vec![1.2], vec![0.1]];
    let targets = vec![Some(vec![0.2]), Some(vec![-0.1]), Some(vec![-0.4]), Some(vec![0.5])];
    let (_, grad) = model.bptt_grad(&seq, &targets).map_err(|e| e.to_string())?;
    let grad = grad.flatten();
    let p0 = model.params();
    let mut worst_bptt = 0.0f64;
    for k in 0..p0.len() {
        let loss_at = |delta: f64| {
            let mut m = model.clone();
            let mut p = p0.clone();
            p[k] += delta;
            m.set_params(&p).unwrap();
            m.loss(&seq, &targets).unwrap()
        };
        let fd = (loss_at(1e-5) - loss_at(-1e-5)) / 2e-5;
        worst_bptt = worst_bptt.max((grad[k] - fd).abs());
        ensure((grad[k] - fd).abs() <= 1e-4, format!("BPTT parameter {k}: {} vs {fd}", grad[k]))?;
    }
    Ok(format!(
        "100 stub cells max deviation {worst:.1e}; BPTT over {} parameters max deviation {worst_bptt:.1e}",
        p0.len()
    ))
}

fn c4_qlstm_learning() -> Check {
    let windows = next_step_windows(&damped_sine(28, 0.5, 1.0, 0.05), 4);
    let shape = QlstmShape { n_qubits: 4, n_layers: 2, hidden_dim: 3, input_dim: 1 };
    let mut finals = Vec::new();
    for seed in 0..5 {
        let mut model = QlstmRegressor::new(shape, 1, &mut stream(seed, &[0]), 0.5).map_err(|e| e.to_string())?;
        let mut opt = Optimizer::adam(0.1, model.n_params());
        train_windows(&mut model, &windows, 300, &mut opt).map_err(|e| e.to_string())?;
        finals.push(window_loss(&model, &windows).map_err(|e| e.to_string())?);
    }
    let ok = finals.iter().filter(|&&l| l < 1e-2).count();
    let shown: Vec<String> = finals.iter().map(|l| format!("{l:.4}")).collect();
    let msg = format!("{ok}/5 seeds below 1e-2 after 300 steps, MSE [{}]", shown.join(", "));
    ensure(ok >= 4, msg.clone())?;
    Ok(msg)
}

fn c5_quantum_train() -> Check {
    for m in 1..=64usize {
        // ceil(log2 m) by repeated doubling
        let (mut n, mut cap) = (0, 1usize);
        while cap < m {
            cap *= 2;
            n += 1;
        }
        ensure(qubits_for_weights(m) == n, format!("M={m}: got {} qubits, expected {n}", qubits_for_weights(m)))?;
        ensure(compressor_qubits(m) == n.max(1), format!("M={m}: compressor uses {}", compressor_qubits(m)))?;
    }

    let net = Mlp::new(vec![2, 4, 1], Activation::Tanh, Activation::Identity).map_err(|e| e.to_string())?;
    ensure(net.n_weights() == 17, format!("2-4-1 net has {} weights", net.n_weights()))?;
    let data = xor();

    // representability: the net itself can fit XOR
    let mut w = uniform_vec(&mut stream(0, &[2]), 17, 1.0);
    let mut opt = Optimizer::adam(0.05, 17);
    for _ in 0..500 {
        let (_, g) = net_loss_grad(&net, &w, &data).map_err(|e| e.to_string())?;
        opt.step(&mut w, &g).map_err(|e| e.to_string())?;
    }
    let direct = net_loss_grad(&net, &w, &data).map_err(|e| e.to_string())?.0;
    ensure(direct < 0.1, format!("direct training only reaches {direct}"))?;

    let n = compressor_qubits(17);
    ensure(n == 5, format!("17 weights need {n} qubits"))?;
    let c = build_layered(n, 0, 4, Encoding::Angle, Entangler::Ring).map_err(|e| e.to_string())?;
    let theta = uniform_vec(&mut stream(0, &[1]), c.n_params(), std::f64::consts::PI);
    let mut comp = QtCompressor::new(c, theta, 17).map_err(|e| e.to_string())?;
    let mut opt = Optimizer::adam(0.05, comp.params().len());
    qt_train(&mut comp, &net, &data, 500, &mut opt).map_err(|e| e.to_string())?;
    let loss = qt_loss_grad(&comp, &net, &data).map_err(|e| e.to_string())?.0;
    ensure(loss < 0.1, format!("QT loss {loss}"))?;
    Ok(format!("N=ceil(log2 M) for M in 1..=64; direct loss {direct:.1e}; QT (N=5) loss {loss:.1e}"))
}

const LAKE: [&str; 4] = ["SFFF", "FHFH", "FFFH", "HFFG"];

fn c6_qrl() -> Check {
    let lake = oracle::Lake::new(&LAKE);
    let q = oracle::tabular_q(&lake, 3000, 0.9, 0.5, 20, &mut rng_from_seed(0));
    ensure(oracle::greedy_reaches_goal(&lake, &q, 20), "tabular oracle does not solve the lake")?;

    let mut solved = 0;
    for seed in 0..5u64 {
        let mut env = GridEnv::frozen_lake_4x4();
        let mut agent = QAgent::new(16, AgentConfig::default(), &mut stream(seed, &[0])).map_err(|e| e.to_string())?;
        train_qrl(&mut env, &mut agent, 1500, seed).map_err(|e| e.to_string())?;
        let eval = GridEnv::frozen_lake_4x4();
        let rate = agent.greedy_return(&eval, 5, &mut stream(seed, &[4])).map_err(|e| e.to_string())?;
        if rate == 1.0 && agent.greedy_solves(&eval).map_err(|e| e.to_string())? {
            solved += 1;
        }
    }
    let msg = format!("tabular oracle solves the lake; {solved}/5 seeds greedy success 1.0 after 1500 episodes");
    ensure(solved >= 4, msg.clone())?;
    Ok(msg)
}

/// Perceptron with bias; returns true once an epoch makes no mistakes.
fn perceptron_separates(data: &Dataset) -> bool {
    let mut w = [0.0f64; 3];
    for _ in 0..1000 {
        let mut mistakes = 0;
        for (x, y) in data.inputs.iter().zip(&data.targets) {
            let s = w[0] * x[0] + w[1] * x[1] + w[2];
            if s * y[0] <= 0.0 {
                w[0] += y[0] * x[0];
                w[1] += y[0] * x[1];
                w[2] += y[0];
                mistakes += 1;
            }
        }
        if mistakes == 0 {
            return true;
        }
    }
    false
}

fn c7_federated() -> Check {
    let mut rng = rng_from_seed(1007);
    for k in 1..=5 {
        let params: Vec<Vec<f64>> = (0..k).map(|_| (0..6).map(|_| rng.gen_range(-5.0..5.0)).collect()).collect();
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|r| r / total).collect();

        let same = vec![params[0].clone(); k];
        ensure(fed_avg(&same, &weights).map_err(|e| e.to_string())? == params[0], format!("identity law, {k} clients"))?;

        let base = fed_avg(&params, &weights).map_err(|e| e.to_string())?;
        for shift in 1..k {
            let idx: Vec<usize> = (0..k).map(|i| (i + shift) % k).collect();
            let pp: Vec<Vec<f64>> = idx.iter().map(|&i| params[i].clone()).collect();
            let pw: Vec<f64> = idx.iter().map(|&i| weights[i]).collect();
            ensure(fed_avg(&pp, &pw).map_err(|e| e.to_string())? == base, format!("permutation law, {k} clients"))?;
        }
        let rev: Vec<Vec<f64>> = params.iter().rev().cloned().collect();
        let rw: Vec<f64> = weights.iter().rev().cloned().collect();
        ensure(fed_avg(&rev, &rw).map_err(|e| e.to_string())? == base, format!("reversal, {k} clients"))?;
    }

    let mut rng = stream(0, &[0]);
    let train = separable_2d(40, 0.1, &mut rng);
    let eval = separable_2d(40, 0.1, &mut rng);
    let mut all = train.clone();
    all.inputs.extend(eval.inputs.iter().cloned());
    all.targets.extend(eval.targets.iter().cloned());
    ensure(perceptron_separates(&all), "dataset is not linearly separable")?;

    let mut c = build_layered(2, 2, 2, Encoding::Angle, Entangler::Chain).map_err(|e| e.to_string())?;
    c.set_observables(vec![Observable::z(0)]).map_err(|e| e.to_string())?;
    let init = VqcModel::random(c, &mut stream(0, &[1]), 0.5);
    let clients: Vec<LocalClient> =
        train.shards(4).into_iter().enumerate().map(|(id, shard)| LocalClient { id, shard }).collect();
    ensure(clients.iter().all(|c| !c.shard.is_empty()), "empty shard")?;
    let cfg = FedConfig {
        rounds: 20,
        local: LocalTraining { epochs: 2, lr: 0.05, optimizer: OptimizerKind::Adam },
        weighting: Weighting::Uniform,
    };
    let (global, log) = simulate(init, &clients, &eval, &cfg, |_, _| Ok(())).map_err(|e| e.to_string())?;
    let (first, last) = (log[0].eval_loss, log[20].eval_loss);
    ensure(log.len() == 21, format!("{} round logs", log.len()))?;
    ensure(dataset_loss(&global, &eval).map_err(|e| e.to_string())? == last, "log disagrees with the returned model")?;
    ensure(last < first, format!("eval loss {first} -> {last}"))?;
    Ok(format!("identity and permutation exact for 1..=5 clients; eval loss {first:.4} -> {last:.4} over 20 rounds"))
}

fn bell_amplitudes() -> [Complex64; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    [Complex64::new(h, 0.0), z, z, Complex64::new(h, 0.0)]
}

fn oracle_bell_fidelity(ops: &[Op]) -> f64 {
    let c = Circuit::from_parts(2, 0, 0, ops.to_vec(), Observable::z_each(2)).unwrap();
    let psi = oracle::dense_state(&c, &[], &[]);
    bell_amplitudes().iter().zip(&psi).map(|(t, p)| t.conj() * p).sum::<Complex64>().norm_sqr()
}

fn c8_evolutionary() -> Check {
    let lib = bell_library(3);
    let task = QasTask { depth_penalty: 0.01, ..QasTask::fidelity(bell_target()) };
    let genomes = lib.enumerate();
    ensure(genomes.len() <= 512, format!("{} genomes", genomes.len()))?;
    let mut optimum = f64::MIN;
    for g in &genomes {
        let c = lib.decode(g).map_err(|e| e.to_string())?;
        let depth = g.0.iter().filter(|&&b| b != 0).count();
        optimum = optimum.max(oracle_bell_fidelity(c.ops()) - 0.01 * depth as f64);
    }
    let (_, lib_best) = brute_force(&lib, &task).map_err(|e| e.to_string())?;
    ensure((lib_best - optimum).abs() < 1e-12, format!("library brute force {lib_best} vs oracle {optimum}"))?;

    let mut hits = 0;
    for seed in 0..10 {
        let cfg = EvoConfig { population: 20, generations: 30, seed, ..Default::default() };
        let res = evolve(&lib, &task, &cfg).map_err(|e| e.to_string())?;
        if (res.best_fitness - optimum).abs() < 1e-12 {
            hits += 1;
        }
    }
    let msg = format!("{} genomes, optimum {optimum:.4}; found in {hits}/10 seeds", genomes.len());
    ensure(hits >= 9, msg.clone())?;
    Ok(msg)
}

fn c9_rl_qas() -> Check {
    let actions = bell_actions();
    ensure(actions.len() == 4, format!("{} actions", actions.len()))?;
    let mut optimum = 0.0f64;
    for code in 0..64 {
        let ops: Vec<Op> = [code / 16, (code / 4) % 4, code % 4].iter().map(|&a| actions[a].clone()).collect();
        optimum = optimum.max(oracle_bell_fidelity(&ops));
    }
    ensure(optimum >= 0.99, format!("brute force optimum {optimum}"))?;

    let env = BuilderEnv::new(bell_target(), actions, 3).map_err(|e| e.to_string())?;
    let mut hits = 0;
    for seed in 0..5 {
        let res = qas_rl_train(&env, &BuilderAgentConfig { episodes: 500, seed, ..Default::default() })
            .map_err(|e| e.to_string())?;
        ensure(res.rewards.len() == 500, format!("{} episodes", res.rewards.len()))?;
        let fid = oracle_bell_fidelity(&res.best_ops);
        ensure((fid - res.best_reward).abs() < 1e-12, format!("reported {} vs oracle {fid}", res.best_reward))?;
        if fid >= 0.99 {
            hits += 1;
        }
    }
    let msg = format!("brute-force optimum {optimum:.4}; fidelity >= 0.99 in {hits}/5 seeds");
    ensure(hits >= 4, msg.clone())?;
    Ok(msg)
}

fn c10_diffqas() -> Check {
    let mut rng = rng_from_seed(1010);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let candidates: Vec<Circuit> = (0..4)
            .map(|_| {
                let mut c = oracle::random_circuit(3, 15, 2, 3, &mut rng);
                let obs = (0..2).map(|_| Observable::new(oracle::random_pauli_string(3, &mut rng)).unwrap()).collect();
                c.set_observables(obs).unwrap();
                c
            })
            .collect();
        let thetas: Vec<Vec<f64>> = (0..4).map(|_| (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect()).collect();
        let logits: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let z: f64 = logits.iter().map(|l| l.exp()).sum();
        let mut want = [0.0; 2];
        for (j, c) in candidates.iter().enumerate() {
            for (o, obs) in c.observables().iter().enumerate() {
                want[o] += logits[j].exp() / z * dense_expect(c, &x, &thetas[j], obs);
            }
        }
        let got = diffqas_forward(&candidates, &x, &thetas, &logits).map_err(|e| e.to_string())?;
        for o in 0..2 {
            worst = worst.max((got[o] - want[o]).abs());
            ensure((got[o] - want[o]).abs() <= 1e-12, format!("ensemble {} vs weighted sum {}", got[o], want[o]))?;
        }
    }

    // cos x on [-pi, pi]: RY encoding can represent it, RZ on |0> cannot
    let n = 16;
    let xs: Vec<f64> = (0..n).map(|i| -std::f64::consts::PI + (i as f64 + 0.5) * std::f64::consts::TAU / n as f64).collect();
    let data = Dataset {
        inputs: xs.iter().map(|&x| vec![x]).collect(),
        targets: xs.iter().map(|x| vec![x.cos()]).collect(),
    };
    let weak = build_layered(1, 1, 1, Encoding::AngleZ, Entangler::None).map_err(|e| e.to_string())?;
    let strong = build_layered(1, 1, 1, Encoding::Angle, Entangler::None).map_err(|e| e.to_string())?;
    let alone = |c: &Circuit| -> Result<f64, String> {
        let r = diffqas_train(std::slice::from_ref(c), &data, &DiffQasConfig::default()).map_err(|e| e.to_string())?;
        Ok(r.history.last().unwrap().loss)
    };
    let (lw, ls) = (alone(&weak)?, alone(&strong)?);
    ensure(ls < lw, format!("strong candidate alone {ls} is not better than weak {lw}"))?;

    let mut hits = 0;
    for seed in 0..5 {
        let cfg = DiffQasConfig { seed, ..Default::default() };
        let res = diffqas_train(&[weak.clone(), strong.clone()], &data, &cfg).map_err(|e| e.to_string())?;
        if res.selected == 1 {
            hits += 1;
        }
    }
    let msg = format!(
        "weighted sum max deviation {worst:.1e}; alone: weak {lw:.3}, strong {ls:.1e}; strong selected in {hits}/5 seeds"
    );
    ensure(hits >= 4, msg.clone())?;
    Ok(msg)
}

fn read_tree(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in fs::read_dir(&dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn c11_reproducibility() -> Check {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut names: Vec<PathBuf> = fs::read_dir(&configs)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    names.sort();
    ensure(names.len() == 11, format!("{} shipped configs", names.len()))?;
    let mut files = 0;
    for cfg in &names {
        let stem = cfg.file_stem().unwrap().to_str().unwrap();
        let cmd = if stem.starts_with("simulate") { "simulate" } else { stem };
        let runs: Vec<(&str, &str)> = vec![("a", "1"), ("b", "1"), ("c", "4")];
        let mut trees = Vec::new();
        for (tag, threads) in runs {
            let out = tmp.path().join(format!("{stem}-{tag}"));
            let o = Command::new(env!("CARGO_BIN_EXE_qmlkit"))
                .args([cmd, "--config", cfg.to_str().unwrap(), "--threads", threads, "--out", out.to_str().unwrap()])
                .env_remove("QMLKIT_OUT")
                .output()
                .map_err(|e| e.to_string())?;
            ensure(o.status.success(), format!("{stem}: {}", String::from_utf8_lossy(&o.stderr)))?;
            trees.push(read_tree(&out));
        }
        ensure(trees[0].iter().any(|(p, _)| p.starts_with("metrics")), format!("{stem}: no metrics"))?;
        ensure(trees[0] == trees[1], format!("{stem}: repeated run differs"))?;
        ensure(trees[0] == trees[2], format!("{stem}: --threads 4 differs from --threads 1"))?;
        files += trees[0].len();
    }
    Ok(format!("11 commands x (threads 1, 1, 4): {files} files byte-identical"))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Check,
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { id: 1, name: "simulator oracle equivalence", limit: secs(30), run: c1_simulator },
        Criterion { id: 2, name: "parameter-shift gradients", limit: secs(60), run: c2_gradients },
        Criterion { id: 3, name: "QLSTM cell and BPTT", limit: secs(120), run: c3_qlstm_cell },
        Criterion { id: 4, name: "QLSTM learning", limit: secs(600), run: c4_qlstm_learning },
        Criterion { id: 5, name: "Quantum-Train", limit: secs(600), run: c5_quantum_train },
        Criterion { id: 6, name: "QRL frozen lake", limit: secs(900), run: c6_qrl },
        Criterion { id: 7, name: "federated averaging", limit: secs(600), run: c7_federated },
        Criterion { id: 8, name: "evolutionary QAS", limit: secs(300), run: c8_evolutionary },
        Criterion { id: 9, name: "RL-QAS", limit: secs(300), run: c9_rl_qas },
        Criterion { id: 10, name: "DiffQAS", limit: secs(600), run: c10_diffqas },
        Criterion { id: 11, name: "CLI reproducibility", limit: None, run: c11_reproducibility },
    ];
    // keep panics from individual criteria off the report
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        let result = match (result, c.limit) {
            (Ok(msg), Some(limit)) if took > limit => Err(format!("{msg}; exceeded {}s", limit.as_secs())),
            (r, _) => r,
        };
        let budget = c.limit.map_or(String::new(), |l| format!(" / {}s", l.as_secs()));
        let (tag, msg) = match result {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("{tag} {:>2} {} ({:.1}s{budget}): {msg}", c.id, c.name, took.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
