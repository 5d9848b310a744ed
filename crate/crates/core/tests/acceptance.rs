//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Pass criterion numbers as arguments to run a subset, e.g.
//! `cargo test --test acceptance -- 3 4`.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use pareto_manifold::experiments::{
    ablation_grid, mean_max_std, mlp_pml, run, toy_baseline, toy_sweep, Experiment, ExperimentConfig,
};
use pareto_manifold::metrics::hypervolume_monte_carlo;
use pareto_manifold::objectives::ToyConfig;
use pareto_manifold::trainer::{
    build_multiforward_graph, pcgrad_combine, regularization, BaselineMethod, GraphMode,
};
use pareto_manifold::{
    hypervolume, sample_dirichlet, DirichletParams, FrontSample, HypervolumeSpec, VectorGradient, VectorLoss,
    Weighting,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn experiment(json: &str) -> Experiment {
    ExperimentConfig::from_json(json)
        .expect("acceptance config")
        .resolved()
        .experiment
}

fn scratch() -> TempDir {
    TempDir::new().expect("temp dir")
}

fn sweep_json(c: f64, balancing: &str) -> String {
    format!(
        r#"{{"seed": 0, "experiment": {{"kind": "toy-sweep", "toy": {{"scale_c": {c}}},
            "trainer": {{"iterations": 50000, "learning_rate": 0.002, "balancing": "{balancing}", "log_every": 1000}}}}}}"#
    )
}

fn criterion_1() -> Outcome {
    let Experiment::ToySweep(cfg) = experiment(&sweep_json(1.0, "none")) else { unreachable!() };
    let tmp = scratch();
    let s = toy_sweep(&cfg, tmp.path()).expect("sweep");
    outcome(
        s.recovered >= 21,
        format!(
            "{}/25 pairs reach HV ratio >= {} (need 21), median ratio {:.4}",
            s.recovered, s.ratio_threshold, s.median_ratio
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut stats = BTreeMap::new();
    for balancing in ["none", "loss", "gradient"] {
        let Experiment::ToySweep(cfg) = experiment(&sweep_json(0.1, balancing)) else { unreachable!() };
        let tmp = scratch();
        let s = toy_sweep(&cfg, tmp.path()).expect("sweep");
        let count = |t: f64| s.pairs.iter().filter(|p| p.oracle_ratio >= t).count();
        stats.insert(balancing, (s.median_ratio, count(0.95), count(0.90)));
    }
    let (none, loss, grad) = (stats["none"], stats["loss"], stats["gradient"]);
    let ordered = none.0 < loss.0;
    let loss_ok = loss.1 >= 20;
    let grad_ok = grad.2 >= 20;
    outcome(
        ordered && loss_ok && grad_ok,
        format!(
            "median none {:.4} < loss {:.4}: {ordered}; loss >= 0.95 on {}/25 (need 20): {loss_ok}; \
             gradient >= 0.90 on {}/25 (need 20): {grad_ok}",
            none.0, loss.0, loss.1, grad.2
        ),
    )
}

fn random_front(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> Vec<FrontSample> {
    (0..n)
        .map(|_| {
            let l = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
            FrontSample::oracle(VectorLoss::new(l).unwrap())
        })
        .collect()
}

/// Dominated volume of a union of boxes `[p, r]` by inclusion-exclusion.
fn inclusion_exclusion(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let n = points.len();
    let mut total = 0.0;
    for mask in 1u32..(1 << n) {
        let mut corner = vec![f64::NEG_INFINITY; reference.len()];
        for (i, p) in points.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for (c, &x) in corner.iter_mut().zip(p) {
                    *c = c.max(x);
                }
            }
        }
        let vol: f64 = corner.iter().zip(reference).map(|(c, r)| (r - c).max(0.0)).product();
        total += if mask.count_ones() % 2 == 1 { vol } else { -vol };
    }
    total
}

fn criterion_3() -> Outcome {
    let demo: Vec<FrontSample> = [[0.2, 0.5], [0.5, 0.2]]
        .iter()
        .map(|p| FrontSample::oracle(VectorLoss::new(p.to_vec()).unwrap()))
        .collect();
    let demo_hv = hypervolume(&demo, &HypervolumeSpec::minimize(vec![1.0, 1.0])).unwrap();
    let demo_ok = (demo_hv - 0.55).abs() <= 1e-12;

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_z: f64 = 0.0;
    for k in 0..50 {
        let n = rng.random_range(1..12);
        let front = random_front(&mut rng, 2, n);
        let spec = HypervolumeSpec::minimize(vec![1.0, 1.0]);
        let exact = hypervolume(&front, &spec).unwrap();
        let mc = hypervolume_monte_carlo(&front, &spec, 1_000_000, k).unwrap();
        worst_z = worst_z.max((mc.value - exact).abs() / mc.std_error.max(f64::MIN_POSITIVE));
    }
    let mc2_ok = worst_z <= 3.0;

    let mut worst_ie: f64 = 0.0;
    let mut worst_z3: f64 = 0.0;
    for k in 0..20 {
        let n = rng.random_range(1..10);
        let front = random_front(&mut rng, 3, n);
        let spec = HypervolumeSpec::minimize(vec![1.0, 1.0, 1.0]);
        let exact = hypervolume(&front, &spec).unwrap();
        let pts: Vec<Vec<f64>> = front.iter().map(|s| s.losses.as_slice().to_vec()).collect();
        worst_ie = worst_ie.max((exact - inclusion_exclusion(&pts, &spec.reference)).abs());
        let mc = hypervolume_monte_carlo(&front, &spec, 1_000_000, 100 + k).unwrap();
        worst_z3 = worst_z3.max((mc.value - exact).abs() / mc.std_error.max(f64::MIN_POSITIVE));
    }
    let ie_ok = worst_ie <= 1e-12;
    let mc3_ok = worst_z3 <= 3.0;
    outcome(
        demo_ok && mc2_ok && ie_ok && mc3_ok,
        format!(
            "demo HV {demo_hv}; 50 2-D fronts worst |MC - exact| = {worst_z:.2} SE; \
             3-D exact vs inclusion-exclusion max error {worst_ie:.1e}, worst MC gap {worst_z3:.2} SE"
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut consistent_max: f64 = 0.0;
    for _ in 0..200 {
        let tasks = rng.random_range(2..5);
        let window = rng.random_range(2..7);
        let nodes: Vec<Weighting> = (0..window)
            .map(|_| sample_dirichlet(&DirichletParams::symmetric(1.0, tasks).unwrap(), &mut rng))
            .collect();
        let offset: Vec<f64> = (0..tasks).map(|_| rng.random_range(-3.0..3.0)).collect();
        let losses: Vec<VectorLoss> = nodes
            .iter()
            .map(|a| VectorLoss::new(a.as_slice().iter().zip(&offset).map(|(x, c)| c - x).collect()).unwrap())
            .collect();
        for mode in [GraphMode::Lex, GraphMode::Full] {
            let graph = build_multiforward_graph(&nodes, mode).unwrap();
            consistent_max = consistent_max.max(regularization(&graph, &losses).unwrap().abs());
        }
    }
    let zero_ok = consistent_max == 0.0;

    // Two nodes, two tasks: one edge per task. Only task 0 is out of order.
    let nodes = vec![
        Weighting::new(vec![0.3, 0.7]).unwrap(),
        Weighting::new(vec![0.6, 0.4]).unwrap(),
    ];
    let graph = build_multiforward_graph(&nodes, GraphMode::Lex).unwrap();
    let gap = 0.37;
    let losses = vec![
        VectorLoss::new(vec![1.0, 0.5]).unwrap(),
        VectorLoss::new(vec![1.0 + gap, 0.9]).unwrap(),
    ];
    let r = regularization(&graph, &losses).unwrap();
    let gap_ok = (r - gap).abs() <= 1e-12;

    let mut edges_ok = true;
    for window in 2..=6 {
        for tasks in 2..=4 {
            let nodes: Vec<Weighting> = (0..window)
                .map(|_| sample_dirichlet(&DirichletParams::symmetric(1.0, tasks).unwrap(), &mut rng))
                .collect();
            let graph = build_multiforward_graph(&nodes, GraphMode::Lex).unwrap();
            edges_ok &= (0..tasks).all(|t| graph.edges(t).len() == window - 1);
        }
    }
    outcome(
        zero_ok && gap_ok && edges_ok,
        format!(
            "order-consistent max |R| = {consistent_max:e}; single violation R = {r} (gap {gap}); \
             lex graph has W-1 edges per task for W in 2..6: {edges_ok}"
        ),
    )
}

fn criterion_5() -> Outcome {
    let toy1 = common::toy_gradient_error(&ToyConfig::new(1.0).unwrap(), 100, 11);
    let toy01 = common::toy_gradient_error(&ToyConfig::new(0.1).unwrap(), 100, 11);
    let mlp = common::mlp_gradient_error(10, 2);
    let (step, penalized) = common::step_gradient_error(21);
    let toy_ok = toy1 <= 1e-5 && toy01 <= 1e-5;
    let mlp_ok = mlp <= 1e-4 && step <= 1e-4 && penalized;
    outcome(
        toy_ok && mlp_ok,
        format!(
            "toy rel err {toy1:.1e} (c=1), {toy01:.1e} (c=0.1) vs 1e-5; MLP {mlp:.1e}, full step {step:.1e} vs 1e-4; \
             penalty active: {penalized}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let Experiment::ToyBaseline(cfg) = experiment(
        r#"{"seed": 0, "experiment": {"kind": "toy-baseline",
            "trainer": {"iterations": 50000, "learning_rate": 0.002, "log_every": 1000}}}"#,
    ) else {
        unreachable!()
    };
    let tmp = scratch();
    let s = toy_baseline(&cfg, tmp.path()).expect("baselines");
    let runs = |m: BaselineMethod| s.runs.iter().filter(move |r| r.method == m);
    let mgda_worst = runs(BaselineMethod::Mgda2).map(|r| r.min_norm).fold(0.0, f64::max);
    let ls_worst = runs(BaselineMethod::Ls).map(|r| r.final_drift).fold(0.0, f64::max);
    let ls_bad: Vec<String> = runs(BaselineMethod::Ls)
        .filter(|r| !(r.final_drift < 1e-6))
        .map(|r| format!("init {} drift {:.1e}", r.init, r.final_drift))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut untouched = true;
    let mut tried = 0;
    while tried < 500 {
        let dim = rng.random_range(2..8);
        let rows: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let dot: f64 = rows[0].iter().zip(&rows[1]).map(|(a, b)| a * b).sum();
        if dot < 0.0 {
            continue;
        }
        let g = VectorGradient::from_rows(rows.clone()).unwrap();
        untouched &= pcgrad_combine(&g, &mut rng) == rows;
        tried += 1;
    }

    let mgda_ok = mgda_worst <= 1e-3;
    let ls_ok = ls_bad.is_empty();
    outcome(
        mgda_ok && untouched && ls_ok,
        format!(
            "MGDA2 worst min-norm {mgda_worst:.1e} (<= 1e-3); PCGrad leaves 500 non-conflicting pairs unchanged: \
             {untouched}; LS worst final drift {ls_worst:.1e} (< 1e-6){}",
            if ls_bad.is_empty() {
                String::new()
            } else {
                format!(", over at {}", ls_bad.join(", "))
            }
        ),
    )
}

fn criterion_7() -> Outcome {
    let Experiment::MlpPml(cfg) = experiment(
        r#"{"seed": 0, "experiment": {"kind": "mlp-pml",
            "dataset": {"conflict_angle": 1.0471975511965976, "samples": 4000},
            "hidden": [16],
            "trainer": {"iterations": 5000, "learning_rate": 0.001, "lr_scale_by_members": true,
                        "window": 3, "lambda": 5.0, "log_every": 0}}}"#,
    ) else {
        unreachable!()
    };
    let tmp = scratch();
    let mut pass = true;
    let mut parts = Vec::new();
    for seed in 0..3 {
        let s = mlp_pml(&cfg, seed, tmp.path()).expect("mlp run");
        let ls_hv = s.ls.as_ref().map_or(f64::NAN, |l| l.accuracy_hypervolume);
        let ok = s.spearman_task1 <= -0.9 && s.spearman_task2 >= 0.9 && s.accuracy_hypervolume >= ls_hv;
        pass &= ok;
        parts.push(format!(
            "seed {seed}: rho {:.3}/{:.3}, HV {:.4} vs LS {:.4}",
            s.spearman_task1, s.spearman_task2, s.accuracy_hypervolume, ls_hv
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_8() -> Outcome {
    let Experiment::AblationGrid(cfg) = experiment(
        r#"{"seed": 0, "experiment": {"kind": "ablation-grid", "objective": {"kind": "toy"}, "pair": [0, 2],
            "seeds": 3, "trainer": {"iterations": 5000, "learning_rate": 0.002, "log_every": 0}}}"#,
    ) else {
        unreachable!()
    };
    let tmp = scratch();
    let table = ablation_grid(&cfg, 0, tmp.path()).expect("ablation");
    let expected = cfg.cells();
    let cells_ok = table.rows.len() == 17
        && table.rows.iter().zip(&expected).all(|(r, &(w, l))| r.window == w && r.lambda == l)
        && table.rows[0].window == 1
        && table.rows[0].lambda == 0.0;

    let mut stats_err: f64 = 0.0;
    for row in &table.rows {
        let n = row.seeds.len() as f64;
        let mean = row.seeds.iter().sum::<f64>() / n;
        let var = row.seeds.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let max = row.seeds.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        stats_err = stats_err
            .max((row.mean - mean).abs())
            .max((row.max - max).abs())
            .max((row.std - var.sqrt()).abs());
    }
    let seeds_ok = table.rows.iter().all(|r| r.seeds.len() == 3);
    let (m, _, s) = mean_max_std(&[0.9205, 0.9083, 0.9100]);
    let known_ok = (s - 0.0054).abs() < 5e-5 && (m - 0.9129).abs() < 5e-5;

    let csv = fs::read_to_string(tmp.path().join("table.csv")).unwrap_or_default();
    let header_ok = csv.lines().next() == Some("W,lambda,Seed-0,Seed-1,Seed-2,Mean HV,Max HV,std")
        && csv.lines().count() == 18;
    outcome(
        cells_ok && seeds_ok && stats_err <= 1e-12 && known_ok && header_ok,
        format!(
            "17 cells in order: {cells_ok}; 3 seeds per cell: {seeds_ok}; mean/max/std vs two-pass max error \
             {stats_err:.1e}; (0.9205, 0.9083, 0.9100) std {s:.4}; CSV layout: {header_ok}"
        ),
    )
}

fn snapshot(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn criterion_9() -> Outcome {
    let configs = [
        r#"{"seed": 5, "experiment": {"kind": "toy-sweep", "toy": {"scale_c": 0.1},
            "trainer": {"iterations": 2000, "learning_rate": 0.002, "window": 3, "lambda": 2.0,
                        "balancing": "loss", "log_every": 100},
            "pairs": [[0, 2], [1, 4], [3, 3]], "segment_points": 51, "oracle_resolution": 200}}"#,
        r#"{"seed": 5, "experiment": {"kind": "mlp-pml",
            "dataset": {"conflict_angle": 1.0471975511965976, "samples": 400},
            "trainer": {"iterations": 200, "learning_rate": 0.001, "window": 3, "lambda": 5.0, "log_every": 20}}}"#,
        r#"{"seed": 5, "experiment": {"kind": "ablation-grid", "objective": {"kind": "toy"}, "pair": [0, 4],
            "seeds": 2, "segment_points": 21, "trainer": {"iterations": 300, "learning_rate": 0.002, "log_every": 50}}}"#,
    ];
    let tmp = scratch();
    let mut pass = true;
    let mut parts = Vec::new();
    for json in configs {
        let mut files = Vec::new();
        for (run_id, jobs) in [("a", 1), ("b", 2)] {
            let mut cfg = ExperimentConfig::from_json(json).expect("config");
            let name = cfg.experiment.name();
            cfg.out = Some(tmp.path().join(run_id));
            let report = run(cfg, Some(jobs)).expect("run");
            files.push((name, snapshot(&report.dir)));
        }
        let (name, a) = &files[0];
        let same = !a.is_empty() && *a == files[1].1;
        pass &= same;
        parts.push(format!("{name}: {} files identical: {same}", a.len()));
    }
    outcome(pass, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (n, check) in criteria {
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        println!(
            "criterion {n} {} ({:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
