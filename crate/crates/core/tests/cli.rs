use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use graphfill::commands::{self, EvalRecord};
use graphfill::config::RunConfig;
use graphfill::io::{read_matrix, read_row};
use graphfill::solver::{initialize, theta_bound, x_update};
use graphfill::{solve, Mask, SolverConfig, Termination};

fn graphfill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphfill"))
        .args(args)
        .output()
        .expect("spawn graphfill")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("run.cfg");
    fs::write(&path, body).unwrap();
    path
}

const TINY: &str = "n = 8\nt = 30\nclusters = 2\np_within = 0.8\np_between = 0.15\nseed = 3\nsampling_rate = 0.7\nmax_iters = 40\n";

#[test]
fn missing_input_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope").join("Y.csv");
    let out = graphfill(&[
        "learn",
        "--y",
        p(&missing),
        "--mask",
        p(&missing),
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(p(&missing)));

    let out = graphfill(&[
        "eval",
        "--truth",
        p(&dir.path().join("a")),
        "--est",
        p(&dir.path().join("b")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("L_true.csv"));
}

#[test]
fn bad_config_and_bad_arguments_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n = 8\nlearning_rate = 3\n");
    let out = graphfill(&["synth", "--config", p(&cfg), "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("learning_rate"));

    assert_eq!(graphfill(&["synth"]).status.code(), Some(2));
    assert_eq!(graphfill(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn disconnected_generation_exits_with_model_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "n = 6\nt = 5\nclusters = 2\np_within = 0\np_between = 0\n",
    );
    let out = graphfill(&[
        "synth",
        "--config",
        p(&cfg),
        "--out",
        p(&dir.path().join("o")),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn synth_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), TINY);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let res = graphfill(&["synth", "--config", p(&cfg), "--out", p(out)]);
        assert!(
            res.status.success(),
            "{}",
            String::from_utf8_lossy(&res.stderr)
        );
    }
    for name in [
        "w_true.csv",
        "L_true.csv",
        "X_true.csv",
        "M.csv",
        "Y.csv",
        "manifest.txt",
    ] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn synth_full_rate_writes_y_equal_to_truth() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "n = 4\nt = 4\nclusters = 2\np_within = 1\np_between = 1\nsampling_rate = 1\n",
    );
    let out = dir.path().join("o");
    assert!(graphfill(&["synth", "--config", p(&cfg), "--out", p(&out)])
        .status
        .success());
    assert_eq!(
        read_matrix(&out.join("Y.csv")).unwrap(),
        read_matrix(&out.join("X_true.csv")).unwrap()
    );
}

#[test]
fn manifest_reruns_the_same_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), TINY);
    let a = dir.path().join("a");
    assert!(graphfill(&["synth", "--config", p(&cfg), "--out", p(&a)])
        .status
        .success());
    let b = dir.path().join("b");
    let manifest = a.join("manifest.txt");
    assert!(
        graphfill(&["synth", "--config", p(&manifest), "--out", p(&b)])
            .status
            .success()
    );
    for name in ["L_true.csv", "X_true.csv", "M.csv", "Y.csv"] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn learn_output_reloads_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(dir.path(), TINY);
    let truth = dir.path().join("truth");
    let est = dir.path().join("est");
    assert!(
        graphfill(&["synth", "--config", p(&cfg_path), "--out", p(&truth)])
            .status
            .success()
    );
    let res = graphfill(&[
        "learn",
        "--y",
        p(&truth.join("Y.csv")),
        "--mask",
        p(&truth.join("M.csv")),
        "--config",
        p(&cfg_path),
        "--out",
        p(&est),
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );

    let y = read_matrix(&truth.join("Y.csv")).unwrap();
    let mask = Mask::new(read_matrix(&truth.join("M.csv")).unwrap()).unwrap();
    let cfg = RunConfig::load(&cfg_path).unwrap();
    let direct = solve(&y, &mask, &cfg.solver(y.ncols())).unwrap();
    assert_eq!(read_matrix(&est.join("X_hat.csv")).unwrap(), direct.x_hat);
    assert_eq!(
        &read_matrix(&est.join("L_hat.csv")).unwrap(),
        direct.l_hat.matrix()
    );
    assert_eq!(
        read_row(&est.join("w_hat.csv")).unwrap(),
        direct.w_hat.as_slice()
    );

    let trace = fs::read_to_string(est.join("trace.csv")).unwrap();
    let values: Vec<f64> = trace
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values, direct.objective_trace);

    let manifest = fs::read_to_string(est.join("manifest.txt")).unwrap();
    assert!(manifest.contains(&format!("# termination: {}", direct.termination.as_str())));
    assert!(manifest.contains(&format!("# iterations: {}", direct.iterations)));

    let out = graphfill(&["eval", "--truth", p(&truth), "--est", p(&est)]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with(EvalRecord::HEADER));
    assert_eq!(stdout, fs::read_to_string(est.join("metrics.csv")).unwrap());
}

#[test]
fn learn_applies_default_hyperparameters() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), TINY);
    let truth = dir.path().join("truth");
    assert!(
        graphfill(&["synth", "--config", p(&cfg), "--out", p(&truth)])
            .status
            .success()
    );
    let cfg = write_config(dir.path(), "max_iters = 2\n");
    let est = dir.path().join("est");
    let res = graphfill(&[
        "learn",
        "--y",
        p(&truth.join("Y.csv")),
        "--mask",
        p(&truth.join("M.csv")),
        "--config",
        p(&cfg),
        "--out",
        p(&est),
    ]);
    assert!(res.status.success());
    let m = RunConfig::load(&est.join("manifest.txt")).unwrap();
    // T = 30
    let hp = m.hyperparams(30);
    assert_eq!(hp.alpha, 0.02);
    assert!((hp.beta - 0.6).abs() < 1e-15);
    assert!((hp.gamma - 0.06).abs() < 1e-15);
    assert_eq!(hp.tau, 100.0);
}

#[test]
fn learn_with_full_mask_and_loose_tolerance_takes_one_step() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(
        dir.path(),
        &format!("{TINY}rel_tol = 1e6\n").replace("sampling_rate = 0.7", "sampling_rate = 1"),
    );
    let truth = dir.path().join("truth");
    let est = dir.path().join("est");
    assert!(
        graphfill(&["synth", "--config", p(&cfg_path), "--out", p(&truth)])
            .status
            .success()
    );
    let res = graphfill(&[
        "learn",
        "--y",
        p(&truth.join("Y.csv")),
        "--mask",
        p(&truth.join("M.csv")),
        "--config",
        p(&cfg_path),
        "--out",
        p(&est),
    ]);
    assert!(res.status.success());
    let manifest = fs::read_to_string(est.join("manifest.txt")).unwrap();
    assert!(manifest.contains("# iterations: 1"));
    assert!(manifest.contains("# termination: converged"));

    // with every entry observed the only pull away from Y is the smoothing step
    let y = read_matrix(&truth.join("Y.csv")).unwrap();
    let mask = Mask::ones(y.nrows(), y.ncols());
    let cfg = SolverConfig::defaults_for(y.ncols());
    let (x0, w0) = initialize(&y, &mask, &cfg).unwrap();
    let theta = theta_bound(&w0, cfg.hp.alpha, cfg.theta_slack);
    let expected = x_update(&x0, &w0, &y, &mask, cfg.hp.alpha, theta);
    let x_hat = read_matrix(&est.join("X_hat.csv")).unwrap();
    assert_eq!(x_hat, expected);
    println!(
        "relative move away from Y: {:.3e}",
        (&x_hat - &y).norm() / y.norm()
    );
}

#[test]
fn eval_of_zero_fill_reports_masked_energy() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &TINY.replace("sampling_rate = 0.7", "sampling_rate = 0.5"),
    );
    let truth = dir.path().join("truth");
    assert!(
        graphfill(&["synth", "--config", p(&cfg), "--out", p(&truth)])
            .status
            .success()
    );
    let est = dir.path().join("est");
    fs::create_dir(&est).unwrap();
    fs::copy(truth.join("Y.csv"), est.join("X_hat.csv")).unwrap();
    fs::copy(truth.join("L_true.csv"), est.join("L_hat.csv")).unwrap();
    let rec = commands::eval(&truth, &est, 1e-4).unwrap();

    let x = read_matrix(&truth.join("X_true.csv")).unwrap();
    let m = read_matrix(&truth.join("M.csv")).unwrap();
    let masked: f64 = x
        .column_iter()
        .zip(m.column_iter())
        .map(|(xc, mc)| xc.component_mul(&mc.map(|v| 1.0 - v)).norm_squared() / xc.norm_squared())
        .sum::<f64>()
        / x.ncols() as f64;
    println!(
        "zero-fill nmse {:.4}, masked energy fraction {masked:.4}",
        rec.signal.nmse
    );
    assert!((rec.signal.nmse - masked).abs() < 1e-12);
    assert_eq!(rec.graph.rel_err, 0.0);
    assert_eq!(rec.graph.f_score, 1.0);
}

#[test]
fn sweep_report_is_rate_major_and_worker_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!("{TINY}rates = 0.5, 0.7, 0.9\nseeds = 0..5\nmax_iters = 10\n")
            .replace("max_iters = 40\n", ""),
    );
    let serial = dir.path().join("serial.csv");
    let parallel = dir.path().join("parallel.csv");
    assert!(
        graphfill(&["sweep", "--config", p(&cfg), "--out", p(&serial)])
            .status
            .success()
    );
    assert!(graphfill(&[
        "sweep",
        "--config",
        p(&cfg),
        "--out",
        p(&parallel),
        "--workers",
        "4"
    ])
    .status
    .success());

    let strip = |path: &Path| -> Vec<String> {
        let text = fs::read_to_string(path).unwrap();
        let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
        let wall = header.iter().position(|h| *h == "wall_ms").unwrap();
        text.lines()
            .map(|l| {
                l.split(',')
                    .enumerate()
                    .filter(|(i, _)| *i != wall)
                    .map(|(_, v)| v)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect()
    };
    let (a, b) = (strip(&serial), strip(&parallel));
    assert_eq!(a.len(), 16);
    assert_eq!(a, b);
    let rates: Vec<&str> = a[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(&rates[..5], &["0.5"; 5]);
    assert_eq!(&rates[10..], &["0.9"; 5]);
    assert!(commands::sweep_manifest_path(&serial).exists());
}

#[test]
fn full_data_sweep_matches_direct_graph_learning() {
    let mut cfg = RunConfig::parse(TINY).unwrap();
    cfg.rates = vec![1.0];
    cfg.seeds = vec![3];
    let recs = commands::sweep(&cfg, 1).unwrap();
    let cell = recs[0].outcome.as_ref().unwrap();

    let gt = graphfill::synth::generate_ground_truth(&cfg.synth(3, 1.0)).unwrap();
    assert_eq!(gt.mask, Mask::ones(8, 30));
    let res = solve(&gt.x_true, &gt.mask, &cfg.solver(30)).unwrap();
    let l_hat = graphfill::metrics::rescale_trace_to_n(&res.l_hat).unwrap();
    let direct = graphfill::metrics::graph_metrics(&gt.l_true, &l_hat, cfg.edge_threshold).unwrap();
    assert_eq!(cell.graph, direct);
    assert_eq!(cell.termination, Termination::MaxIters.as_str());
}
