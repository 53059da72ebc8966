//! End-to-end acceptance run: prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.
//!
//! Large-scale criteria share one random 20-regular graph on 2·10⁵ vertices
//! and two 20-trial sweeps (p = 1.2/d and p = 0.8/d) run through the harness.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use ndperc_core::census::{count_trees_bruteforce, tree_count_lower_bound};
use ndperc_core::generators::{
    blowup, clique_union, complete_graph, cycle_graph, hypercube, petersen_graph, random_regular,
};
use ndperc_core::harness::records::RecordFile;
use ndperc_core::harness::sweep::{explore, load_graph, trial_seed};
use ndperc_core::harness::{read_records, run_sweep, ExperimentConfig};
use ndperc_core::percolation::components_oracle;
use ndperc_core::rng::{chacha, derive_seed, Purpose};
use ndperc_core::spectral::{certify, compute_spectrum_with, dense_eigenvalues, Method, SpectralOptions};
use ndperc_core::theory::{predict, series_tree_edge_mass, series_tree_mass, solve_x, solve_y};
use ndperc_core::verify::{
    check_blowup_pairs, check_degree_outliers, check_expansion_sets, check_expansion_window, check_mixing,
    random_half_set,
};
use ndperc_core::{PercolationSample, RegularGraph, VertexSet};

const N: usize = 200_000;
const D: usize = 20;
const EPSILON: f64 = 0.2;
const ALPHA: f64 = 0.1;
const TRIALS: usize = 20;
const MASTER_SEED: u64 = 20_240_601;

// pinned tolerances
const ROOT_TOL: f64 = 1e-10;
const SERIES_TOL: f64 = 1e-8;
const CHI2_LEVEL: f64 = 1e-3;
const L1_REL: f64 = 0.10;
const L1_WINDOW_RATE: f64 = 0.80;
const SUB_MAX: f64 = 921.0;
const SUB_MEDIAN_MAX: f64 = 200.0;
const L2_RATE: f64 = 0.95;
const T1_TARGET: f64 = 3614.0;
const T1_REL: f64 = 0.10;
const T2_TARGET: f64 = 653.0;
const T2_REL: f64 = 0.15;
const ZP_TARGET: f64 = 7200.0;
const ZP_REL: f64 = 0.05;
const E_L1_TARGET: f64 = 3808.0;
const E_L1_REL: f64 = 0.10;
const L1_TARGET: f64 = 3764.0;
const CYCLE_MIN: f64 = 4.0;
const SPECTRAL_AGREE: f64 = 1e-7;
const CLOSED_FORM_TOL: f64 = 1e-8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

fn rel(measured: f64, target: f64) -> f64 {
    (measured - target) / target
}

fn sweep_config(out: &Path, regime: &str, workers: usize) -> ExperimentConfig {
    let map: BTreeMap<String, String> = [
        ("family", "random_regular".to_string()),
        ("n", N.to_string()),
        ("d", D.to_string()),
        ("epsilon", EPSILON.to_string()),
        ("alpha", ALPHA.to_string()),
        ("regime", regime.to_string()),
        ("seed", MASTER_SEED.to_string()),
        ("trials", TRIALS.to_string()),
        ("checkers", "none".to_string()),
        ("spectrum", "false".to_string()),
        ("workers", workers.to_string()),
        ("out", out.display().to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    ExperimentConfig::from_map(map).expect("acceptance config")
}

fn theory_exactness() -> Outcome {
    let mut worst_root: f64 = 0.0;
    let mut worst_series: f64 = 0.0;
    for i in 1..=100 {
        let eps = 0.005 * i as f64;
        let (x, y) = (solve_x(eps).unwrap(), solve_y(eps).unwrap());
        worst_root = worst_root.max((x + y - (1.0 + eps)).abs());
        let trees = series_tree_mass(eps, 1e-14).unwrap().value;
        let edges = series_tree_edge_mass(eps, 1e-14).unwrap().value;
        worst_series = worst_series
            .max((trees - y / (1.0 + eps)).abs())
            .max((edges - y * y / 2.0).abs());
    }
    outcome(
        worst_root <= ROOT_TOL && worst_series <= SERIES_TOL,
        format!("max |x+y-(1+ε)| = {worst_root:.1e}, max series error = {worst_series:.1e}"),
    )
}

fn dfs_oracle() -> Outcome {
    let graphs: Vec<(&str, RegularGraph)> = vec![
        ("K4", complete_graph(4).unwrap()),
        ("Q4", hypercube(4).unwrap()),
        ("clique_union", clique_union(1000, 9).unwrap()),
        ("random_regular", random_regular(10_000, D, MASTER_SEED).unwrap()),
    ];
    let mut mismatches = Vec::new();
    let mut runs = 0;
    for (name, g) in &graphs {
        for seed in 0..100u64 {
            let p = if g.n() > 1000 {
                (1.0 + EPSILON) / g.d() as f64
            } else {
                (seed % 10 + 1) as f64 / 10.0
            };
            let (_, trace, sample) = explore(g, trial_seed(MASTER_SEED, seed as usize), p).unwrap();
            runs += 1;
            if trace.partition() != components_oracle(g, &sample) {
                mismatches.push(format!("{name}/{seed}"));
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("{} of {runs} runs differ {:?}", mismatches.len(), mismatches),
    )
}

fn dfs_distribution() -> Outcome {
    const RUNS: usize = 20_000;
    let g = hypercube(5).unwrap();
    let p = 0.3;
    let mut hits = vec![0usize; g.n()];
    for r in 0..RUNS {
        let (_, trace, _) = explore(&g, trial_seed(MASTER_SEED ^ 0x3, r), p).unwrap();
        for v in trace.accepted_set().iter() {
            hits[v as usize] += 1;
        }
    }
    let (mean, var) = (RUNS as f64 * p, RUNS as f64 * p * (1.0 - p));
    let stat: f64 = hits.iter().map(|&h| (h as f64 - mean).powi(2) / var).sum();
    let p_value = 1.0 - ChiSquared::new(g.n() as f64).unwrap().cdf(stat);
    outcome(
        p_value >= CHI2_LEVEL,
        format!(
            "χ² = {stat:.2} on {} dof, p-value = {p_value:.4} (level {CHI2_LEVEL})",
            g.n()
        ),
    )
}

struct SweepData {
    l1: Vec<f64>,
    l2: Vec<f64>,
    t1: Vec<f64>,
    t2: Vec<f64>,
    zp: Vec<f64>,
    e_l1: Vec<f64>,
    cycle: Vec<f64>,
    witnesses_valid: bool,
}

fn sweep_data(file: &RecordFile) -> SweepData {
    let col = |f: &dyn Fn(&ndperc_core::harness::TrialRecord) -> usize| -> Vec<f64> {
        file.trials.iter().map(|t| f(t) as f64).collect()
    };
    SweepData {
        l1: col(&|t| t.census.l1),
        l2: col(&|t| t.census.l2),
        t1: col(&|t| t.census.tree_counts[0]),
        t2: col(&|t| t.census.tree_counts[1]),
        zp: col(&|t| t.census.edges_total),
        e_l1: col(&|t| t.census.e_l1),
        cycle: col(&|t| t.census.longest_cycle_lb),
        witnesses_valid: file.trials.iter().all(|t| t.cycle_witness_valid == Some(true)),
    }
}

fn estimate(label: &str, values: &[f64], target: f64, tol: f64) -> (bool, String) {
    let m = median(&mut values.to_vec());
    let r = rel(m, target);
    (
        r.abs() <= tol,
        format!(
            "{label} median {m:.0} vs {target:.0} ({:+.1}%, tol {:.0}%)",
            100.0 * r,
            100.0 * tol
        ),
    )
}

fn giant_size(s: &SweepData) -> Outcome {
    let (ok, text) = estimate("|L1|", &s.l1, L1_TARGET, L1_REL);
    let window = 7.0 * ALPHA * N as f64 / D as f64;
    let hits = s.l1.iter().filter(|&&l| (l - L1_TARGET).abs() <= window).count();
    let rate = hits as f64 / s.l1.len() as f64;
    let (lo, hi) =
        s.l1.iter()
            .fold((f64::MAX, f64::MIN), |(a, b), &l| (a.min(l), b.max(l)));
    outcome(
        ok && rate >= L1_WINDOW_RATE,
        format!(
            "{text}; within ±7αn/d = ±{window:.0} in {hits}/{} trials (need {:.0}%); range [{lo:.0}, {hi:.0}]",
            s.l1.len(),
            100.0 * L1_WINDOW_RATE
        ),
    )
}

fn subcritical(file: &RecordFile) -> Outcome {
    let mut l1: Vec<f64> = file.trials.iter().map(|t| t.census.l1 as f64).collect();
    let max = l1.iter().cloned().fold(0.0, f64::max);
    let m = median(&mut l1);
    let cap = file.header.prediction.subcritical_bound;
    outcome(
        max <= SUB_MAX && max <= cap && m <= SUB_MEDIAN_MAX,
        format!("largest component max {max:.0} (cap {cap:.1}), median {m:.1} (need ≤ {SUB_MEDIAN_MAX:.0})"),
    )
}

fn uniqueness_and_trees(s: &SweepData) -> Outcome {
    let bound = 15.0 * ALPHA * N as f64 / D as f64;
    let hits = s.l2.iter().filter(|&&l| l <= bound).count();
    let rate = hits as f64 / s.l2.len() as f64;
    let (t1_ok, t1) = estimate("T1", &s.t1, T1_TARGET, T1_REL);
    let (t2_ok, t2) = estimate("T2", &s.t2, T2_TARGET, T2_REL);
    let l2_max = s.l2.iter().cloned().fold(0.0, f64::max);
    outcome(
        rate >= L2_RATE && t1_ok && t2_ok,
        format!(
            "L2 ≤ {bound:.0} in {hits}/{} trials (max {l2_max:.0}); {t1}; {t2}",
            s.l2.len()
        ),
    )
}

fn edges(s: &SweepData) -> Outcome {
    let (zp_ok, zp) = estimate("Zp", &s.zp, ZP_TARGET, ZP_REL);
    let (e_ok, e) = estimate("e(L1)", &s.e_l1, E_L1_TARGET, E_L1_REL);
    outcome(zp_ok && e_ok, format!("{zp}; {e}"))
}

fn long_cycle(s: &SweepData, file: &RecordFile) -> Outcome {
    let hits = s.cycle.iter().filter(|&&c| c >= CYCLE_MIN).count();
    let m = median(&mut s.cycle.clone());
    let strong = 0.5 * file.header.prediction.x * N as f64 / D as f64;
    let strong_hits = s.cycle.iter().filter(|&&c| c >= strong).count();
    outcome(
        hits == s.cycle.len() && s.witnesses_valid,
        format!(
            "bound ≥ {CYCLE_MIN:.0} in {hits}/{} trials, witnesses valid: {}; median {m:.0}; ≥ 0.5·x·n/d = {strong:.0} in {strong_hits}/{}",
            s.cycle.len(),
            s.witnesses_valid,
            s.cycle.len()
        ),
    )
}

fn mixing(g: &RegularGraph, report: &ndperc_core::SpectrumReport) -> Outcome {
    let pairs = check_mixing(g, report, 1000, derive_seed(MASTER_SEED, 0, Purpose::Pairs)).unwrap();
    let mut outlier_violations = 0;
    let mut worst_outliers: f64 = 0.0;
    for i in 0..20 {
        let b = random_half_set(g.n(), derive_seed(MASTER_SEED, i, Purpose::HalfSets));
        let rep = check_degree_outliers(g, report, &b, 0.5).unwrap();
        outlier_violations += rep.violation_count;
        worst_outliers = worst_outliers.max(rep.statistic.unwrap_or(0.0));
    }
    outcome(
        pairs.violation_count == 0 && outlier_violations == 0,
        format!(
            "{} violations in {} pairs (worst gap/bound {:.3}); {outlier_violations} violations on 20 half sets (largest outlier set {worst_outliers:.0})",
            pairs.violation_count,
            pairs.instances_checked,
            pairs.statistic.unwrap_or(0.0)
        ),
    )
}

fn expansion(g: &RegularGraph) -> Outcome {
    let everything = PercolationSample::from_set(1.0, 0, VertexSet::full(g.n())).unwrap();
    let (mut checked, mut violations) = (0, 0);
    let mut worst: f64 = 0.0;
    for s in 0..20 {
        let seed = derive_seed(MASTER_SEED, s, Purpose::Subsets);
        let rep = check_expansion_window(g, &everything, ALPHA, 1000, seed, 0.0).unwrap();
        checked += rep.instances_checked;
        violations += rep.violation_count;
        worst = worst.max(rep.statistic.unwrap_or(0.0));
    }

    // blow-up of a random 10-regular graph: unions of whole blocks expand by
    // at most |S|·d/2, well below the window
    let base = random_regular(N / 2, D / 2, MASTER_SEED).unwrap();
    let h = blowup(&base, 2).unwrap();
    let mut rng = chacha(derive_seed(MASTER_SEED, 1, Purpose::Subsets));
    let lo = (ALPHA * N as f64 / D as f64).ceil() as usize;
    let hi = N / (3 * D);
    let mut sets = Vec::new();
    for _ in 0..20 {
        let blocks = rand::Rng::gen_range(&mut rng, lo / 2..=hi / 2);
        let chosen = rand::seq::index::sample(&mut rng, N / 2, blocks);
        let mut s = VertexSet::new(N);
        for b in chosen.iter() {
            s.insert(2 * b as u32);
            s.insert(2 * b as u32 + 1);
        }
        sets.push(s);
    }
    let blowup_violations: usize = sets
        .iter()
        .map(|s| check_blowup_pairs(&h, 2, s).unwrap().violation_count)
        .sum();
    let under = check_expansion_sets(&h, &sets, ALPHA, true).unwrap().violation_count;
    outcome(
        violations == 0 && blowup_violations == 0,
        format!(
            "{violations} violations in {checked} subsets (worst relative deviation {worst:.3}); blow-up: {} of {} sets exceed |S|d/2, {under} fall outside the window",
            blowup_violations,
            sets.len()
        ),
    )
}

fn tree_bound() -> Outcome {
    let graphs = [
        ("K4", complete_graph(4).unwrap()),
        ("Petersen", petersen_graph()),
        ("Q4", hypercube(4).unwrap()),
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, g) in &graphs {
        let counts: Vec<String> = (1..g.d())
            .map(|k| {
                let count = count_trees_bruteforce(g, k).unwrap();
                let bound = tree_count_lower_bound(g.n(), g.d(), k);
                ok &= count as f64 >= bound;
                format!("k={k}: {count} ≥ {bound:.1}")
            })
            .collect();
        lines.push(format!("{name} [{}]", counts.join(", ")));
    }
    outcome(ok, lines.join("; "))
}

fn spectra() -> Outcome {
    let mut worst_agree: f64 = 0.0;
    for (n, d) in [(2000, 20), (1000, 10), (500, 3)] {
        let g = random_regular(n, d, MASTER_SEED).unwrap();
        let dense = compute_spectrum_with(
            &g,
            &SpectralOptions {
                method: Some(Method::Dense),
                ..SpectralOptions::default()
            },
        )
        .unwrap();
        let iter = compute_spectrum_with(
            &g,
            &SpectralOptions {
                method: Some(Method::Iterative),
                ..SpectralOptions::default()
            },
        )
        .unwrap();
        worst_agree = worst_agree
            .max((dense.lambda2 - iter.lambda2).abs())
            .max((dense.lambda_n - iter.lambda_n).abs());
    }
    let closed: [(&str, RegularGraph, Vec<f64>); 4] = [
        ("K4", complete_graph(4).unwrap(), vec![3.0, -1.0, -1.0, -1.0]),
        ("C6", cycle_graph(6).unwrap(), vec![2.0, 1.0, 1.0, -1.0, -1.0, -2.0]),
        ("Petersen", petersen_graph(), {
            let mut v = vec![3.0];
            v.extend([1.0; 5]);
            v.extend([-2.0; 4]);
            v
        }),
        ("Q4", hypercube(4).unwrap(), {
            // eigenvalue 4 − 2j with multiplicity C(4, j)
            let mut v = Vec::new();
            for (j, mult) in [1, 4, 6, 4, 1].into_iter().enumerate() {
                v.extend(std::iter::repeat_n(4.0 - 2.0 * j as f64, mult));
            }
            v
        }),
    ];
    let mut worst_closed: f64 = 0.0;
    for (_, g, expected) in &closed {
        let mut got = dense_eigenvalues(g).unwrap();
        got.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in got.iter().zip(expected) {
            worst_closed = worst_closed.max((a - b).abs());
        }
    }
    outcome(
        worst_agree <= SPECTRAL_AGREE && worst_closed <= CLOSED_FORM_TOL,
        format!("dense vs iterative max gap {worst_agree:.1e}; closed forms max error {worst_closed:.1e}"),
    )
}

fn report(index: usize, name: &str, start: Instant, o: &Outcome, all: &mut bool) {
    *all &= o.pass;
    println!(
        "{} {index:>2} {name}: {} [{:.1} s]",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        start.elapsed().as_secs_f64()
    );
}

fn main() -> ExitCode {
    let mut all = true;
    let dir = tempfile::tempdir().expect("temp dir");
    let prediction = predict(N, D, EPSILON, ALPHA, 10).unwrap();
    println!(
        "acceptance: n = {N}, d = {D}, ε = {EPSILON}, α = {ALPHA}, {TRIALS} trials; x·n/d = {:.1}, T1 = {:.1}, T2 = {:.1}",
        prediction.l1_pred, prediction.t_k_pred[0], prediction.t_k_pred[1]
    );

    let t = Instant::now();
    report(1, "theory exactness", t, &theory_exactness(), &mut all);
    let t = Instant::now();
    report(2, "exploration vs union-find", t, &dfs_oracle(), &mut all);
    let t = Instant::now();
    report(3, "acceptance distribution", t, &dfs_distribution(), &mut all);

    let t = Instant::now();
    let super_out = dir.path().join("super.jsonl");
    let super_cfg = sweep_config(&super_out, "super", 1);
    run_sweep(&super_cfg).expect("supercritical sweep");
    let super_file = read_records(&super_out).expect("supercritical records");
    let data = sweep_data(&super_file);
    report(4, "giant size", t, &giant_size(&data), &mut all);

    let t = Instant::now();
    let sub_out = dir.path().join("sub.jsonl");
    run_sweep(&sweep_config(&sub_out, "sub", 1)).expect("subcritical sweep");
    report(
        5,
        "subcritical components",
        t,
        &subcritical(&read_records(&sub_out).unwrap()),
        &mut all,
    );

    let t = Instant::now();
    report(
        6,
        "giant uniqueness and isolated trees",
        t,
        &uniqueness_and_trees(&data),
        &mut all,
    );
    report(7, "induced and giant edges", t, &edges(&data), &mut all);
    report(8, "long cycle", t, &long_cycle(&data, &super_file), &mut all);

    let t = Instant::now();
    let (g, _) = load_graph(&super_cfg).expect("acceptance graph");
    let cert = certify(&g, ALPHA, 1e-8).expect("spectrum of the acceptance graph");
    println!(
        "     certified λ = {:.6} (residual {:.1e}), λ/d = {:.4}, δ(α) = {:.1e}, admissible: {} [{:.1} s]",
        cert.report.lambda,
        cert.report.residual2.max(cert.report.residual_n),
        cert.report.ratio,
        cert.delta,
        cert.admissible,
        t.elapsed().as_secs_f64()
    );
    let t = Instant::now();
    report(9, "mixing and degree outliers", t, &mixing(&g, &cert.report), &mut all);
    let t = Instant::now();
    report(10, "expansion window and blow-up", t, &expansion(&g), &mut all);
    drop(g);

    let t = Instant::now();
    report(11, "tree count bound", t, &tree_bound(), &mut all);
    let t = Instant::now();
    report(12, "spectral paths", t, &spectra(), &mut all);

    let t = Instant::now();
    let parallel_out = dir.path().join("super8.jsonl");
    run_sweep(&sweep_config(&parallel_out, "super", 8)).expect("8-worker sweep");
    let same = std::fs::read(&super_out).unwrap() == std::fs::read(&parallel_out).unwrap()
        && std::fs::read(super_out.with_extension("csv")).unwrap()
            == std::fs::read(parallel_out.with_extension("csv")).unwrap();
    report(
        13,
        "determinism",
        t,
        &outcome(same, format!("1-worker and 8-worker record files identical: {same}")),
        &mut all,
    );

    println!(
        "acceptance: {}",
        if all { "all criteria pass" } else { "some criteria fail" }
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
