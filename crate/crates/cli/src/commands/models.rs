use qmlkit::autodiff::Optimizer;
use qmlkit::data::{damped_sine, next_step_windows};
use qmlkit::models::qfwp;
use qmlkit::models::qlstm::{train_windows, window_loss, QlstmRegressor};
use qmlkit::models::qt::{compressor_qubits, net_loss_grad, qt_train, QtCompressor};
use qmlkit::models::reservoir::QlstmReservoir;
use qmlkit::models::vqc::{dataset_loss, sign_accuracy, train_epoch, VqcModel};
use qmlkit::models::QfwpModel;
use qmlkit::nn::Mlp;
use qmlkit::rng::{derive_seed, stream, uniform_vec};
use qmlkit::{build_layered, Encoding};
use serde_json::json;

use super::{load_data, Checkpoint};
use crate::config::{
    Experiment, ReservoirTask, TrainQfwpConfig, TrainQlstmConfig, TrainReservoirConfig, TrainVqcConfig,
    QtCompressConfig,
};
use crate::error::CliError;
use crate::output::{f, RunDir};

pub fn train_vqc(cfg: &TrainVqcConfig, dir: &mut RunDir) -> Result<(), CliError> {
    let data = load_data(&cfg.data, &mut stream(cfg.seed, &[0]))?;
    let circuit = cfg.circuit.build()?;
    if data.inputs[0].len() != circuit.input_dim() {
        return Err(CliError::Config(format!(
            "data has {} features, circuit.input_dim is {}",
            data.inputs[0].len(),
            circuit.input_dim()
        )));
    }
    if data.targets[0].len() != circuit.observables().len() {
        return Err(CliError::Config(format!(
            "data has {} target columns, circuit.readout measures {} qubits",
            data.targets[0].len(),
            circuit.observables().len()
        )));
    }
    let mut model = VqcModel::random(circuit, &mut stream(cfg.seed, &[1]), cfg.train.init_half_width);
    let mut opt = Optimizer::new(cfg.train.optimizer, cfg.train.lr, model.theta.len());
    let mut csv = dir.csv("train", &["epoch", "loss", "accuracy"])?;
    csv.write_record(["0", &f(dataset_loss(&model, &data)?), &f(sign_accuracy(&model, &data)?)])?;
    for epoch in 1..=cfg.train.epochs {
        train_epoch(&mut model, &data, &mut opt)?;
        let loss = dataset_loss(&model, &data)?;
        csv.write_record([&epoch.to_string(), &f(loss), &f(sign_accuracy(&model, &data)?)])?;
    }
    csv.flush().map_err(csv::Error::from)?;
    let loss = dataset_loss(&model, &data)?;
    let acc = sign_accuracy(&model, &data)?;
    dir.checkpoint("model", &Checkpoint::new(TrainVqcConfig::NAME, cfg.seed, &model))?;
    dir.event(json!({"event": "done", "loss": loss, "accuracy": acc}))?;
    println!("final loss {loss:.6}, sign accuracy {acc:.3}");
    Ok(())
}

pub fn train_qlstm(cfg: &TrainQlstmConfig, dir: &mut RunDir) -> Result<(), CliError> {
    let d = cfg.data;
    let windows = next_step_windows(&damped_sine(d.length, d.dt, d.omega, d.decay), d.window);
    let mut model =
        QlstmRegressor::new(cfg.cell.shape(1), 1, &mut stream(cfg.seed, &[0]), cfg.cell.init_half_width)?;
    let mut opt = Optimizer::new(cfg.optimizer, cfg.lr, model.n_params());
    let log = train_windows(&mut model, &windows, cfg.steps, &mut opt)?;
    let last = window_loss(&model, &windows)?;
    let mut csv = dir.csv("train", &["step", "loss"])?;
    for (step, loss) in log.iter().chain([&last]).enumerate() {
        csv.write_record([step.to_string(), f(*loss)])?;
    }
    csv.flush().map_err(csv::Error::from)?;
    dir.checkpoint("model", &Checkpoint::new(TrainQlstmConfig::NAME, cfg.seed, &model))?;
    dir.event(json!({"event": "done", "windows": windows.len(), "mse": last}))?;
    println!("{} windows, final train MSE {last:.6}", windows.len());
    Ok(())
}

pub fn train_reservoir(cfg: &TrainReservoirConfig, dir: &mut RunDir) -> Result<(), CliError> {
    let d = cfg.data;
    let windows = next_step_windows(&damped_sine(d.length, d.dt, d.omega, d.decay), d.window);
    let mut model = QlstmReservoir::from_seed(
        cfg.cell.shape(1),
        1,
        derive_seed(cfg.seed, &[0]),
        cfg.cell.init_half_width,
    )?;
    let sequences: Vec<Vec<Vec<f64>>> = windows.iter().map(|w| w.inputs.clone()).collect();
    let targets: Vec<Vec<f64>> = windows
        .iter()
        .map(|w| match cfg.task {
            ReservoirTask::NextValue => w.target.clone(),
            ReservoirTask::Direction => {
                let last = w.inputs.last().expect("non-empty window")[0];
                vec![if w.target[0] > last { 1.0 } else { 0.0 }]
            }
        })
        .collect();
    let features = model.features(&sequences)?;
    let mut opt = Optimizer::adam(cfg.lr, model.readout.len());
    let log = model.train_readout(&features, &targets, cfg.task.loss(), cfg.epochs, &mut opt)?;
    let mut csv = dir.csv("train", &["epoch", "loss"])?;
    for (epoch, loss) in log.iter().enumerate() {
        csv.write_record([epoch.to_string(), f(*loss)])?;
    }
    csv.flush().map_err(csv::Error::from)?;
    let last = *log.last().expect("epochs >= 1");
    dir.checkpoint("model", &Checkpoint::new(TrainReservoirConfig::NAME, cfg.seed, &model))?;
    let mut done = json!({"event": "done", "windows": windows.len(), "loss": last});
    print!("{} windows, readout loss {last:.6} (before the last step)", windows.len());
    if cfg.task == ReservoirTask::Direction {
        // Logit > 0 predicts "rises".
        let mut hits = 0;
        for (h, y) in features.iter().zip(&targets) {
            hits += usize::from((model.readout_linear(h)?[0] > 0.0) == (y[0] > 0.5));
        }
        let acc = hits as f64 / targets.len() as f64;
        done["accuracy"] = json!(acc);
        print!(", accuracy {acc:.3}");
    }
    println!();
    dir.event(done)?;
    Ok(())
}

/// Episode `e` tracks a damped sine shifted by `2 pi e / episodes`.
fn qfwp_episodes(cfg: &TrainQfwpConfig) -> Vec<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let d = cfg.data;
    (0..d.episodes)
        .map(|e| {
            let phase = std::f64::consts::TAU * e as f64 / d.episodes as f64;
            let x: Vec<f64> = (0..=d.length)
                .map(|i| {
                    let t = i as f64 * d.dt;
                    (-d.decay * t).exp() * (d.omega * t + phase).sin()
                })
                .collect();
            let obs = x[..d.length].iter().map(|v| vec![*v]).collect();
            let targets = x[1..].iter().map(|v| vec![*v]).collect();
            (obs, targets)
        })
        .collect()
}

pub fn train_qfwp(cfg: &TrainQfwpConfig, dir: &mut RunDir) -> Result<(), CliError> {
    let episodes = qfwp_episodes(cfg);
    let fast = VqcModel::random(cfg.fast.build()?, &mut stream(cfg.seed, &[1]), 0.5);
    let mut model = QfwpModel::new(fast, cfg.slow_hidden, &mut stream(cfg.seed, &[2]), cfg.slow_half_width)?;
    let mut opt = Optimizer::adam(cfg.lr, model.slow_weights.len());
    let log = qfwp::train_qfwp(&mut model, &episodes, cfg.steps, &mut opt)?;
    let mut csv = dir.csv("train", &["step", "loss"])?;
    for (step, loss) in log.iter().enumerate() {
        csv.write_record([step.to_string(), f(*loss)])?;
    }
    csv.flush().map_err(csv::Error::from)?;
    let last = *log.last().expect("steps >= 1");
    dir.checkpoint("model", &Checkpoint::new(TrainQfwpConfig::NAME, cfg.seed, &model))?;
    dir.event(json!({"event": "done", "episodes": episodes.len(), "loss": last}))?;
    println!("{} episodes, mean episode loss {:.6} -> {last:.6}", episodes.len(), log[0]);
    Ok(())
}

pub fn qt_compress(cfg: &QtCompressConfig, dir: &mut RunDir) -> Result<(), CliError> {
    let data = load_data(&cfg.data, &mut stream(cfg.seed, &[0]))?;
    let net = Mlp::new(cfg.net.sizes.clone(), cfg.net.hidden, cfg.net.output)?;
    let m = net.n_weights();
    let n = cfg.compressor.n_qubits.unwrap_or_else(|| compressor_qubits(m));
    let circuit = build_layered(n, 0, cfg.compressor.n_layers, Encoding::Angle, cfg.compressor.entangler)?;
    let theta = uniform_vec(&mut stream(cfg.seed, &[1]), circuit.n_params(), cfg.compressor.init_half_width);
    let mut comp = QtCompressor::new(circuit, theta, m)?;
    let n_trainable = comp.params().len();
    let mut opt = Optimizer::adam(cfg.lr, n_trainable);
    let log = qt_train(&mut comp, &net, &data, cfg.epochs, &mut opt)?;
    let mut csv = dir.csv("train", &["epoch", "loss"])?;
    for (epoch, loss) in log.iter().enumerate() {
        csv.write_record([epoch.to_string(), f(*loss)])?;
    }
    csv.flush().map_err(csv::Error::from)?;
    let last = *log.last().expect("epochs >= 1");
    dir.event(json!({
        "event": "compressed",
        "weights": m,
        "qubits": n,
        "trainable": n_trainable,
        "loss": last,
    }))?;
    println!("{m} weights from {n} qubits ({n_trainable} trainable), loss {last:.6}");

    if cfg.baseline {
        let mut w = uniform_vec(&mut stream(cfg.seed, &[2]), m, 1.0);
        let mut opt = Optimizer::adam(cfg.lr, m);
        let mut csv = dir.csv("baseline", &["epoch", "loss"])?;
        let mut loss = 0.0;
        for epoch in 0..cfg.epochs {
            let (l, g) = net_loss_grad(&net, &w, &data)?;
            loss = l;
            csv.write_record([epoch.to_string(), f(l)])?;
            opt.step(&mut w, &g)?;
        }
        csv.flush().map_err(csv::Error::from)?;
        dir.event(json!({"event": "baseline", "loss": loss}))?;
        println!("direct training of all {m} weights: loss {loss:.6}");
    }

    #[derive(serde::Serialize)]
    struct QtState<'a> {
        compressor: &'a QtCompressor,
        net: &'a Mlp,
        weights: Vec<f64>,
    }
    let state = QtState { compressor: &comp, net: &net, weights: comp.generate_weights()? };
    dir.checkpoint("model", &Checkpoint::new(QtCompressConfig::NAME, cfg.seed, &state))?;
    Ok(())
}
