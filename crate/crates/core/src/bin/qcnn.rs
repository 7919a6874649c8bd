use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use qcnn::baseline::classical_train;
use qcnn::config::{env_seed, load_params, save_params, RunConfigFile};
use qcnn::dataset::{class_balance, gen_dataset, load_dataset, save_dataset, LabeledImage, VALID_SIDES};
use qcnn::network::{conv_feature_map, init_params};
use qcnn::pgm::GrayImage;
use qcnn::training::{evaluate, train_from, EvalMode, GradMethod, MeasureMode, UpdateStrategy};
use qcnn::{Architecture, DatasetSource, Error, InitScheme, TrainConfig};

#[derive(Parser)]
#[command(
    name = "qcnn",
    version,
    about = "Quantum convolutional network simulation and training"
)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labelled flat/noisy image dataset as CSV.
    Gen {
        #[arg(long, value_parser = parse_side)]
        side: usize,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a network; writes the loss curve, parameters and log.
    Train(TrainArgs),
    /// Report MSE and accuracy of saved parameters on a dataset.
    Eval {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Defaults to the architecture matching the dataset's image side.
        #[arg(long)]
        arch: Option<Architecture>,
        #[arg(long, default_value = "end-to-end")]
        measure: MeasureMode,
        #[arg(long = "eval-mode", default_value = "exact")]
        eval_mode: EvalMode,
        #[arg(long, default_value_t = 1000)]
        shots: u64,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Apply the 2x2 kernel circuit to every window of a PGM image.
    Featmap {
        #[arg(long = "in")]
        input: PathBuf,
        /// Four kernel angles, one per line.
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the classical single-kernel baseline on 2x2 images.
    Baseline {
        #[arg(long, default_value_t = 500)]
        epochs: usize,
        #[arg(long = "batch", default_value_t = 1000)]
        batch_size: usize,
        #[arg(long = "lr", default_value_t = 1e-7)]
        learning_rate: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long = "curve-out", default_value = "baseline_curve.csv")]
        curve_out: PathBuf,
    },
}

#[derive(Args)]
struct TrainArgs {
    /// Flat TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    arch: Option<Architecture>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long = "batch")]
    batch_size: Option<usize>,
    #[arg(long = "lr", allow_hyphen_values = true)]
    learning_rate: Option<f64>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long = "grad")]
    grad_method: Option<GradMethod>,
    #[arg(long = "measure")]
    measure_mode: Option<MeasureMode>,
    #[arg(long = "update")]
    update_strategy: Option<UpdateStrategy>,
    #[arg(long = "eval-mode")]
    eval_mode: Option<EvalMode>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    init: Option<InitScheme>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fixed training set CSV.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Generate a fixed training set of this size instead of fresh batches.
    #[arg(long = "dataset-size")]
    dataset_size: Option<usize>,
    #[arg(long = "curve-out")]
    curve_out: Option<PathBuf>,
    #[arg(long = "params-out")]
    params_out: Option<PathBuf>,
    #[arg(long = "log-out")]
    log_out: Option<PathBuf>,
    /// Most simultaneously active wires in the density-matrix simulator.
    #[arg(long = "width-cap")]
    width_cap: Option<usize>,
}

fn parse_side(s: &str) -> Result<usize, String> {
    let valid = || format!("valid sides are {VALID_SIDES:?}");
    let side: usize = s.parse().map_err(|_| format!("`{s}` is not a number; {}", valid()))?;
    if VALID_SIDES.contains(&side) {
        Ok(side)
    } else {
        Err(format!("side {side} unsupported; {}", valid()))
    }
}

fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> qcnn::Result<u64> {
    match flag.or(file) {
        Some(s) => Ok(s),
        None => env_seed(),
    }
}

fn write_text(path: &Path, text: &str) -> qcnn::Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn cmd_gen(side: usize, count: usize, seed: Option<u64>, out: &Path) -> qcnn::Result<()> {
    let data = gen_dataset(count, side, resolve_seed(seed, None)?)?;
    save_dataset(&data, out)?;
    println!(
        "wrote {} samples ({side}x{side}) to {}, fraction labelled 1: {:.4}",
        data.len(),
        out.display(),
        class_balance(&data)
    );
    Ok(())
}

fn cmd_train(args: TrainArgs) -> qcnn::Result<()> {
    let file = match &args.config {
        Some(p) => RunConfigFile::load(p)?,
        None => RunConfigFile::default(),
    };
    let mut cfg = TrainConfig::default();
    file.apply(&mut cfg)?;
    cfg.seed = resolve_seed(args.seed, file.seed)?;
    if let Some(v) = args.arch {
        cfg.arch = v;
    }
    cfg.epochs = args.epochs.unwrap_or(cfg.epochs);
    cfg.batch_size = args.batch_size.unwrap_or(cfg.batch_size);
    cfg.learning_rate = args.learning_rate.unwrap_or(cfg.learning_rate);
    cfg.shots = args.shots.unwrap_or(cfg.shots);
    cfg.grad_method = args.grad_method.unwrap_or(cfg.grad_method);
    cfg.measure_mode = args.measure_mode.unwrap_or(cfg.measure_mode);
    cfg.update_strategy = args.update_strategy.unwrap_or(cfg.update_strategy);
    cfg.eval_mode = args.eval_mode.unwrap_or(cfg.eval_mode);
    cfg.threshold = args.threshold.unwrap_or(cfg.threshold);
    cfg.init = args.init.unwrap_or(cfg.init);
    cfg.width_cap = args.width_cap.unwrap_or(cfg.width_cap);
    cfg.validate()?;
    if let Some(jobs) = file.jobs {
        if jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }

    let data_path = args.data.or(file.data);
    let dataset_size = args.dataset_size.or(file.dataset_size);
    let source = match (data_path, dataset_size) {
        (Some(p), _) => {
            let data = load_dataset(&p)?;
            check_sides(&data, cfg.arch)?;
            DatasetSource::Fixed(data)
        }
        (None, Some(n)) => DatasetSource::Fixed(gen_dataset(n, cfg.arch.side(), cfg.seed)?),
        (None, None) => DatasetSource::Fresh { seed: cfg.seed },
    };
    let curve_out = args.curve_out.or(file.curve_out).unwrap_or_else(|| "curve.csv".into());
    let params_out = args
        .params_out
        .or(file.params_out)
        .unwrap_or_else(|| "params.txt".into());
    let log_out = args.log_out.or(file.log_out).unwrap_or_else(|| "train.log".into());

    let started = Instant::now();
    let mut log = format!(
        "arch={} epochs={} batch={} lr={:e} grad={} measure={} update={} eval={} shots={} seed={}\n",
        cfg.arch,
        cfg.epochs,
        cfg.batch_size,
        cfg.learning_rate,
        cfg.grad_method,
        cfg.measure_mode,
        cfg.update_strategy,
        cfg.eval_mode,
        cfg.shots,
        cfg.seed
    );
    let init = init_params(cfg.arch, cfg.seed, cfg.init);
    let out = train_from(&cfg, &source, init, |rec| {
        log::info!("{}", rec.log_line());
        log.push_str(&rec.log_line());
        log.push('\n');
    })?;
    out.curve.save_csv(&curve_out)?;
    save_params(&out.params, &params_out)?;
    write_text(&log_out, &log)?;

    println!("final mse: {:.9}", out.curve.last().unwrap_or(f64::NAN));
    println!("circuit evaluations: {}", out.curve.total_evals());
    println!("wall-clock: {:.3} s", started.elapsed().as_secs_f64());
    println!(
        "wrote {}, {}, {}",
        curve_out.display(),
        params_out.display(),
        log_out.display()
    );
    Ok(())
}

fn check_sides(data: &[LabeledImage], arch: Architecture) -> qcnn::Result<()> {
    match data.iter().find(|s| s.side() != arch.side()) {
        Some(s) => Err(Error::InvalidArgument(format!(
            "{arch} takes {0}x{0} images, dataset has {1}x{1}",
            arch.side(),
            s.side()
        ))),
        None => Ok(()),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    params: &Path,
    data: &Path,
    arch: Option<Architecture>,
    measure: MeasureMode,
    eval_mode: EvalMode,
    shots: u64,
    threshold: f64,
    seed: Option<u64>,
) -> qcnn::Result<()> {
    let data = load_dataset(data)?;
    if data.is_empty() {
        return Err(Error::InvalidArgument("dataset is empty".into()));
    }
    let arch = match arch {
        Some(a) => a,
        None => Architecture::for_side(data[0].side())?,
    };
    check_sides(&data, arch)?;
    let cfg = TrainConfig {
        arch,
        measure_mode: measure,
        eval_mode,
        shots,
        threshold,
        seed: resolve_seed(seed, None)?,
        ..Default::default()
    };
    cfg.validate()?;
    let params = load_params(params, arch)?;
    let report = evaluate(&cfg, &params, &data)?;
    println!("samples: {}", report.samples);
    println!("mse: {:.9}", report.mse);
    println!("accuracy: {:.6}", report.accuracy);
    Ok(())
}

fn cmd_featmap(input: &Path, params: &Path, out: &Path) -> qcnn::Result<()> {
    let img = GrayImage::load(input)?;
    let kernel = load_params(params, Architecture::Conv)?;
    let probs = conv_feature_map(&img, kernel.layer(0))?;
    let map = GrayImage::from_probabilities(img.width() / 2, img.height() / 2, &probs)?;
    map.save(out)?;
    println!(
        "{}x{} -> {}x{} feature map written to {}",
        img.width(),
        img.height(),
        map.width(),
        map.height(),
        out.display()
    );
    Ok(())
}

fn cmd_baseline(
    epochs: usize,
    batch_size: usize,
    learning_rate: f64,
    seed: Option<u64>,
    data: Option<PathBuf>,
    curve_out: &Path,
) -> qcnn::Result<()> {
    let cfg = TrainConfig {
        epochs,
        batch_size,
        learning_rate,
        seed: resolve_seed(seed, None)?,
        ..Default::default()
    };
    let source = match data {
        Some(p) => {
            let d = load_dataset(&p)?;
            check_sides(&d, Architecture::Conv)?;
            DatasetSource::Fixed(d)
        }
        None => DatasetSource::Fresh { seed: cfg.seed },
    };
    let started = Instant::now();
    let out = classical_train(&cfg, &source)?;
    out.curve.save_csv(curve_out)?;
    println!("final mse: {:.9}", out.curve.last().unwrap_or(f64::NAN));
    println!("kernel: {:?}", out.kernel.to_flat());
    println!("wall-clock: {:.3} s", started.elapsed().as_secs_f64());
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ResourceLimit { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .expect("global thread pool is configured once");
    }
    let result = match cli.cmd {
        Command::Gen { side, count, seed, out } => cmd_gen(side, count, seed, &out),
        Command::Train(args) => cmd_train(args),
        Command::Eval {
            params,
            data,
            arch,
            measure,
            eval_mode,
            shots,
            threshold,
            seed,
        } => cmd_eval(&params, &data, arch, measure, eval_mode, shots, threshold, seed),
        Command::Featmap { input, params, out } => cmd_featmap(&input, &params, &out),
        Command::Baseline {
            epochs,
            batch_size,
            learning_rate,
            seed,
            data,
            curve_out,
        } => cmd_baseline(epochs, batch_size, learning_rate, seed, data, &curve_out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
