//! Acceptance suite. Each criterion prints one `PASS`/`FAIL` line; the
//! process exits nonzero if any criterion fails.
//!
//! ```bash
//! cargo test -p qcnn --test acceptance
//! ```

mod common;

use std::fs;
use std::panic;
use std::path::Path;
use std::process::Command;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcnn::baseline::classical_train;
use qcnn::dataset::gen_dataset;
use qcnn::encoding::AngleImage;
use qcnn::network::init_params;
use qcnn::sim::gates::unitarity_defect;
use qcnn::sim::{
    fixed_gate_matrix, frontier_run, pure_run, rotation_matrix, AngleSource, CircuitPlan, GateKind, GateOp, PureState,
};
use qcnn::training::{
    train, DatasetSource, Evaluator, GradMethod, Loss, LossCurve, MeasureMode, TrainConfig, UpdateStrategy,
};
use qcnn::{build_plan, Architecture, InitScheme};

static ANY_FAILED: AtomicBool = AtomicBool::new(false);

const SEEDS: [u64; 4] = [1, 2, 3, 4];

fn report(id: u32, pass: bool, detail: String) {
    println!("criterion {id}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    if !pass {
        ANY_FAILED.store(true, Ordering::SeqCst);
    }
}

fn random_gate(rng: &mut ChaCha8Rng, n: usize) -> GateOp {
    loop {
        let kind = GateKind::ALL[rng.random_range(0..5)];
        let a = rng.random_range(0..n);
        let t = rng.random_range(-10.0..10.0);
        match kind {
            GateKind::Rx => return GateOp::rx(a, AngleSource::Constant(t)),
            GateKind::Ry => return GateOp::ry(a, AngleSource::Constant(t)),
            _ if n > 1 => {
                let b = (a + rng.random_range(1..n)) % n;
                return GateOp::fixed(kind, a, b);
            }
            _ => {}
        }
    }
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> PureState {
    let v: Vec<Complex64> = (0..1 << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    PureState::from_amplitudes(v.into_iter().map(|c| c / norm).collect()).unwrap()
}

fn criterion_1_gate_level_correctness() {
    let started = Instant::now();
    let mut worst_unitary: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for kind in GateKind::ALL {
        if kind.is_rotation() {
            for _ in 0..200 {
                let m = rotation_matrix(kind, rng.random_range(-20.0..20.0)).unwrap();
                worst_unitary = worst_unitary.max(unitarity_defect(&m));
            }
        } else {
            worst_unitary = worst_unitary.max(unitarity_defect(&fixed_gate_matrix(kind).unwrap()));
        }
    }
    let mut worst_norm: f64 = 0.0;
    for _ in 0..10_000 {
        let n = rng.random_range(1..=5);
        let mut st = random_state(&mut rng, n);
        let g = random_gate(&mut rng, n);
        let angle = match g.angle {
            AngleSource::Constant(t) => t,
            _ => 0.0,
        };
        st.apply(g.kind, g.wires(), angle).unwrap();
        worst_norm = worst_norm.max((st.norm_sqr() - 1.0).abs());
    }
    let took = started.elapsed();
    report(
        1,
        worst_unitary <= 1e-10 && worst_norm <= 1e-10 && took < Duration::from_secs(5),
        format!("max |U^dag U - I| = {worst_unitary:.1e}, max norm drift = {worst_norm:.1e} over 1e4 applications, {took:.2?} (budget 5 s)"),
    );
}

fn hand_built_4x4() -> Vec<GateOp> {
    let mut g: Vec<GateOp> = (0..16).map(|k| GateOp::ry(k, AngleSource::Data(k))).collect();
    for [a, b, c, d] in [[0, 1, 4, 5], [2, 3, 6, 7], [8, 9, 12, 13], [10, 11, 14, 15]] {
        for (w, i) in [(a, 0), (b, 1), (c, 2), (d, 3)] {
            g.push(GateOp::rx(w, AngleSource::Param { layer: 0, index: i }));
        }
        for (t, c) in [(a, b), (c, d), (a, c)] {
            g.push(GateOp::fixed(GateKind::PaperCz, t, c));
            g.push(GateOp::fixed(GateKind::PaperCy, t, c));
        }
    }
    g.push(GateOp::fixed(GateKind::PaperCx, 0, 2));
    g.push(GateOp::fixed(GateKind::PaperCx, 8, 10));
    g.push(GateOp::fixed(GateKind::PaperCx, 0, 8));
    g
}

fn criterion_2_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_random: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=10);
        let len = rng.random_range(0..=40);
        let gates = (0..len).map(|_| random_gate(&mut rng, n)).collect();
        let plan = CircuitPlan::new(n, gates, rng.random_range(0..n), vec![]).unwrap();
        let angles = plan.resolve(&[]).unwrap();
        worst_random =
            worst_random.max((frontier_run(&plan, &angles).unwrap() - pure_run(&plan, &angles).unwrap()).abs());
    }

    let mut worst_fig: f64 = 0.0;
    let zero = AngleImage::from_pixels(4, 4, &[0; 16]).unwrap();
    let drawn = CircuitPlan::new(16, hand_built_4x4(), 0, zero.angles().to_vec()).unwrap();
    let oracle = pure_run(&drawn, &drawn.resolve(&[0.0; 4]).unwrap()).unwrap();
    let net = build_plan(Architecture::ConvPoolPool, &zero).unwrap();
    let front = frontier_run(net.plan(), &net.plan().resolve(&[0.0; 4]).unwrap()).unwrap();
    worst_fig = worst_fig.max((front - oracle).abs());
    for k in 0..20u64 {
        let px: Vec<u8> = (0..16).map(|_| rng.random()).collect();
        let img = AngleImage::from_pixels(4, 4, &px).unwrap();
        let theta = init_params(Architecture::ConvPoolPool, k, InitScheme::Uniform).flat();
        let drawn = CircuitPlan::new(16, hand_built_4x4(), 0, img.angles().to_vec()).unwrap();
        let oracle = pure_run(&drawn, &drawn.resolve(&theta).unwrap()).unwrap();
        let net = build_plan(Architecture::ConvPoolPool, &img).unwrap();
        let front = frontier_run(net.plan(), &net.plan().resolve(&theta).unwrap()).unwrap();
        worst_fig = worst_fig.max((front - oracle).abs());
    }
    let took = started.elapsed();
    report(
        2,
        worst_random <= 1e-9 && worst_fig <= 1e-9 && took < Duration::from_secs(60),
        format!(
            "1000 random plans: max diff {worst_random:.1e}; 16-wire conv-pool-pool (zero case + 20 random): max diff {worst_fig:.1e}; {took:.2?} (budget 60 s)"
        ),
    );
}

fn criterion_3_parameter_shift_validity() {
    let started = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    for arch in [
        Architecture::Conv,
        Architecture::ConvPoolPool,
        Architecture::ConvPoolConvPool,
    ] {
        let r = common::worst_gradient_ratio(arch, MeasureMode::EndToEnd, Loss::Circuit, 50, 2);
        pass &= r <= 1.0;
        parts.push(format!("{arch} worst error/tolerance {r:.3}"));
    }
    let took = started.elapsed();
    pass &= took < Duration::from_secs(300);
    report(
        3,
        pass,
        format!(
            "h={:e}, rel tol {:e}, 50 draws each: {}; {took:.2?} (budget 5 min)",
            common::FD_STEP,
            common::FD_REL_TOL,
            parts.join(", ")
        ),
    );
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn criterion_4_headline_numbers() {
    let started = Instant::now();
    let mut quantum = Vec::new();
    let mut classical = Vec::new();
    let mut slowest = Duration::ZERO;
    for seed in SEEDS {
        let cfg = TrainConfig {
            seed,
            ..Default::default()
        };
        let src = DatasetSource::Fresh { seed };
        let t = Instant::now();
        quantum.push(train(&cfg, &src).unwrap().curve.last().unwrap());
        slowest = slowest.max(t.elapsed());
        classical.push(classical_train(&cfg, &src).unwrap().curve.last().unwrap());
    }
    let took = started.elapsed();
    let q_hits = quantum.iter().filter(|&&m| within(m, 0.231, 0.02)).count();
    let c_hits = classical.iter().filter(|&&m| within(m, 0.255, 0.03)).count();
    let speedup = (4.0 * 3600.0 + 37.0 * 60.0) / slowest.as_secs_f64();
    let fmt = |v: &[f64]| v.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>().join(" ");
    report(
        4,
        q_hits >= 3 && c_hits >= 3 && took < Duration::from_secs(600) && speedup >= 25.0,
        format!(
            "quantum final MSE [{}] {q_hits}/4 in 0.231±0.02; classical [{}] {c_hits}/4 in 0.255±0.03; {took:.1?} total (budget 10 min), speedup {speedup:.0}x per quantum run",
            fmt(&quantum),
            fmt(&classical)
        ),
    );
}

fn criterion_5_curve_shape() {
    let mut settle = Vec::new();
    let mut sensitive = Vec::new();
    for seed in SEEDS {
        let data = DatasetSource::Fixed(gen_dataset(1000, 2, seed).unwrap());
        let shift = train(
            &TrainConfig {
                seed,
                ..Default::default()
            },
            &data,
        )
        .unwrap()
        .curve;
        settle.push(shift.last().unwrap() < shift.first().unwrap());
        let sigmoid = |lr: f64| {
            let cfg = TrainConfig {
                seed,
                learning_rate: lr,
                grad_method: GradMethod::Sigmoid,
                ..Default::default()
            };
            train(&cfg, &data).unwrap().curve.spread()
        };
        let (hi, lo) = (sigmoid(1e-6), sigmoid(1e-8));
        sensitive.push((hi > lo, hi, lo));
    }
    let a = settle.iter().filter(|&&b| b).count();
    let b = sensitive.iter().filter(|s| s.0).count();
    let spreads: Vec<String> = sensitive.iter().map(|s| format!("{:.2e}/{:.2e}", s.1, s.2)).collect();
    report(
        5,
        a >= 3 && b >= 3,
        format!(
            "shift epoch-500 < epoch-1 on {a}/4 seeds; sigmoid spread lr 1e-6 > lr 1e-8 on {b}/4 seeds ({})",
            spreads.join(", ")
        ),
    );
}

fn criterion_6_deep_network_at_desk_scale() {
    let mut parts = Vec::new();
    let mut pass = true;
    for update_strategy in [UpdateStrategy::Simultaneous, UpdateStrategy::LayerWise] {
        let cfg = TrainConfig {
            arch: Architecture::ConvPoolConvPool,
            epochs: 20,
            batch_size: 100,
            update_strategy,
            seed: 6,
            ..Default::default()
        };
        let t = Instant::now();
        let curve = train(&cfg, &DatasetSource::Fresh { seed: 6 }).unwrap().curve;
        let took = t.elapsed();
        let ok = curve.records.len() == 20 && took < Duration::from_secs(1800);
        pass &= ok;
        parts.push(format!(
            "{update_strategy}: {} epochs in {took:.1?}, {} evaluations",
            curve.records.len(),
            curve.total_evals()
        ));
    }
    report(6, pass, format!("{} (budget 30 min each)", parts.join("; ")));
}

fn criterion_7_intermediate_measurement() {
    let dir = tempfile::tempdir().unwrap();
    let mut parts = Vec::new();
    let mut pass = true;
    for measure_mode in [MeasureMode::EndToEnd, MeasureMode::Intermediate] {
        let cfg = TrainConfig {
            arch: Architecture::ConvPoolPool,
            epochs: 50,
            batch_size: 200,
            measure_mode,
            seed: 7,
            ..Default::default()
        };
        let t = Instant::now();
        let curve = train(&cfg, &DatasetSource::Fresh { seed: 7 }).unwrap().curve;
        let path = dir.path().join(format!("{measure_mode}.csv"));
        curve.save_csv(&path).unwrap();
        let back = LossCurve::parse_csv(&fs::read_to_string(&path).unwrap(), &path).unwrap();
        pass &= back.records.len() == 50;
        parts.push(format!(
            "{measure_mode}: {} rows in {:.1?}",
            back.records.len(),
            t.elapsed()
        ));
    }

    let mut worst: f64 = 0.0;
    let e2e = Evaluator::default();
    let inter = Evaluator {
        measure: MeasureMode::Intermediate,
        ..Default::default()
    };
    for (k, s) in gen_dataset(200, 2, 7).unwrap().iter().enumerate() {
        let net = build_plan(Architecture::Conv, &s.angle_image()).unwrap();
        let params = init_params(Architecture::Conv, k as u64, InitScheme::Uniform);
        let a = e2e.forward(&net, &params, None, 0).unwrap().p1;
        let b = inter.forward(&net, &params, None, 0).unwrap().p1;
        worst = worst.max((a - b).abs());
    }
    pass &= worst <= 1e-9;
    report(
        7,
        pass,
        format!(
            "{}; conv intermediate vs end-to-end max diff {worst:.1e} over 200 samples",
            parts.join(", ")
        ),
    );
}

fn run_cli(dir: &Path, args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_qcnn"))
        .current_dir(dir)
        .env_remove("QCNN_SEED")
        .args(args)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn criterion_8_determinism() {
    let runs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    for dir in &runs {
        let d = dir.path();
        run_cli(
            d,
            &[
                "gen", "--side", "4", "--count", "300", "--seed", "8", "--out", "data.csv",
            ],
        );
        run_cli(
            d,
            &[
                "train",
                "--arch",
                "conv-pool-pool",
                "--epochs",
                "5",
                "--batch",
                "60",
                "--lr",
                "0.05",
                "--data",
                "data.csv",
                "--seed",
                "8",
            ],
        );
        run_cli(
            d,
            &[
                "train",
                "--arch",
                "conv",
                "--epochs",
                "5",
                "--batch",
                "50",
                "--eval-mode",
                "sampled",
                "--seed",
                "8",
                "--curve-out",
                "sampled_curve.csv",
                "--params-out",
                "sampled_params.txt",
            ],
        );
        run_cli(d, &["baseline", "--epochs", "50", "--batch", "100", "--seed", "8"]);
    }
    let files = [
        "data.csv",
        "curve.csv",
        "params.txt",
        "sampled_curve.csv",
        "sampled_params.txt",
        "baseline_curve.csv",
    ];
    let same: Vec<bool> = files
        .iter()
        .map(|f| fs::read(runs[0].path().join(f)).unwrap() == fs::read(runs[1].path().join(f)).unwrap())
        .collect();
    let n = same.iter().filter(|&&b| b).count();
    report(
        8,
        n == files.len(),
        format!(
            "{n}/{} output files byte-identical across repeated runs ({})",
            files.len(),
            files.join(", ")
        ),
    );
}

fn main() {
    let criteria: [(u32, fn()); 8] = [
        (1, criterion_1_gate_level_correctness),
        (2, criterion_2_oracle_equivalence),
        (3, criterion_3_parameter_shift_validity),
        (4, criterion_4_headline_numbers),
        (5, criterion_5_curve_shape),
        (6, criterion_6_deep_network_at_desk_scale),
        (7, criterion_7_intermediate_measurement),
        (8, criterion_8_determinism),
    ];
    for (id, run) in criteria {
        if panic::catch_unwind(run).is_err() {
            report(id, false, "panicked".into());
        }
    }
    if ANY_FAILED.load(Ordering::SeqCst) {
        std::process::exit(1);
    }
}
