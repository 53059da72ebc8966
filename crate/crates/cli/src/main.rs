use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Arg, ArgAction, ArgMatches, Command};

use ndperc_core::census::take_census;
use ndperc_core::graph::write_graph;
use ndperc_core::harness::config::{self, ExperimentConfig, KEYS};
use ndperc_core::harness::sweep::{explore, load_graph, trial_seed};
use ndperc_core::harness::{compare, render_table, run_sweep, Prepared};
use ndperc_core::spectral::{certify_report, compute_spectrum_with, delta_of_alpha, Method, SpectralOptions};
use ndperc_core::theory::{predict, series_tree_edge_mass, series_tree_mass};
use ndperc_core::verify::CHECKER_IDS;

/// Exit status for runs whose checks or comparisons failed.
const FAILED: u8 = 1;
/// Exit status for errors (bad input, I/O, incomplete records).
const ERROR: u8 = 2;

fn with_keys(cmd: Command) -> Command {
    let cmd = cmd.arg(
        Arg::new("config")
            .long("config")
            .value_name("FILE")
            .help("key = value configuration file; flags override its entries"),
    );
    KEYS.iter().fold(cmd, |cmd, key| {
        cmd.arg(
            Arg::new(*key)
                .long(*key)
                .value_name("VALUE")
                .help_heading("Configuration keys"),
        )
    })
}

fn cli() -> Command {
    Command::new("ndperc")
        .about("Site percolation experiments on pseudo-random regular graphs")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(with_keys(
            Command::new("generate").about("Generate a graph and write it in the ndl-graph format"),
        ))
        .subcommand(
            with_keys(Command::new("spectrum").about("Extreme nontrivial eigenvalues and certification of λ/d")).arg(
                Arg::new("method")
                    .long("method")
                    .value_parser(["auto", "dense", "iterative"])
                    .default_value("auto"),
            ),
        )
        .subcommand(
            with_keys(Command::new("percolate").about("Run one seeded exploration and print its census")).arg(
                Arg::new("witness")
                    .long("witness")
                    .value_name("FILE")
                    .help("write the longest-cycle witness here"),
            ),
        )
        .subcommand(with_keys(Command::new("sweep").about(
            "Run a seeded multi-trial sweep; --seed, --trials and --out are required",
        )))
        .subcommand(with_keys(
            Command::new("verify").about("Run structural checkers and print their reports"),
        ))
        .subcommand(with_keys(
            Command::new("theory").about("Print the theoretical predictions"),
        ))
        .subcommand(
            Command::new("compare")
                .about("Compare a complete record file against its predictions")
                .arg(Arg::new("records").required(true).value_name("RECORDS"))
                .arg(Arg::new("json").long("json").action(ArgAction::SetTrue)),
        )
}

fn key_map(m: &ArgMatches) -> Result<BTreeMap<String, String>> {
    let mut map = match m.get_one::<String>("config") {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            config::parse_pairs(&text)?
        }
        None => BTreeMap::new(),
    };
    for key in KEYS {
        if let Some(v) = m.get_one::<String>(key) {
            map.insert(key.to_string(), v.clone());
        }
    }
    Ok(map)
}

/// Config for single-shot commands: seed 0 and one trial unless given.
fn adhoc_config(m: &ArgMatches) -> Result<ExperimentConfig> {
    let mut map = key_map(m)?;
    map.entry("seed".into()).or_insert_with(|| "0".into());
    map.entry("trials".into()).or_insert_with(|| "1".into());
    Ok(ExperimentConfig::from_map(map)?)
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn cmd_generate(m: &ArgMatches) -> Result<ExitCode> {
    let cfg = adhoc_config(m)?;
    let Some(out) = &cfg.out else {
        bail!("generate needs --out <graph file>");
    };
    let (g, info) = load_graph(&cfg)?;
    write_graph(out, &g)?;
    print_json(&info)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_spectrum(m: &ArgMatches) -> Result<ExitCode> {
    let cfg = adhoc_config(m)?;
    let (g, _) = load_graph(&cfg)?;
    let method = match m.get_one::<String>("method").map(String::as_str) {
        Some("dense") => Some(Method::Dense),
        Some("iterative") => Some(Method::Iterative),
        _ => None,
    };
    let opts = SpectralOptions {
        tol: cfg.spectrum_tol,
        method,
        ..SpectralOptions::default()
    };
    let report = compute_spectrum_with(&g, &opts)?;
    print_json(&certify_report(report, delta_of_alpha(cfg.alpha)?))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_percolate(m: &ArgMatches) -> Result<ExitCode> {
    let cfg = adhoc_config(m)?;
    let (g, _) = load_graph(&cfg)?;
    let p = cfg.p(g.d());
    let (_, trace, sample) = explore(&g, trial_seed(cfg.seed, 0), p)?;
    let census = take_census(&g, &sample, cfg.k_max)?;
    if let Some(path) = m.get_one::<String>("witness") {
        let text = match &census.cycle {
            Some(w) => serde_json::to_string(w)?,
            None => "null".to_string(),
        };
        std::fs::write(path, text + "\n").with_context(|| format!("writing {path}"))?;
    }
    print_json(&serde_json::json!({
        "p": p,
        "dfs": trace.summary(),
        "census": census.summary(),
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(m: &ArgMatches) -> Result<ExitCode> {
    for key in ["seed", "trials", "out"] {
        if m.get_one::<String>(key).is_none() {
            bail!("sweep requires --{key}");
        }
    }
    let cfg = ExperimentConfig::from_map(key_map(m)?)?;
    let outcome = run_sweep(&cfg)?;
    if outcome.resumed_trials > 0 {
        eprintln!("resumed {} completed trials", outcome.resumed_trials);
    }
    print!("{}", render_table(&outcome.summary));
    Ok(if outcome.summary.all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(FAILED)
    })
}

fn cmd_verify(m: &ArgMatches) -> Result<ExitCode> {
    let mut map = key_map(m)?;
    map.entry("checkers".into()).or_insert_with(|| CHECKER_IDS.join(","));
    map.entry("seed".into()).or_insert_with(|| "0".into());
    map.entry("trials".into()).or_insert_with(|| "1".into());
    let cfg = ExperimentConfig::from_map(map)?;
    let prepared = Prepared::new(&cfg)?;
    let mut ok = true;
    for i in 0..cfg.trials {
        let record = prepared.trial(&cfg, i)?;
        for check in &record.checks {
            let expected = check.report.as_ref().is_some_and(|r| r.expected_violation);
            ok &= expected || check.passed();
            print_json(&serde_json::json!({ "trial": i, "check": check }))?;
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(FAILED) })
}

fn cmd_theory(m: &ArgMatches) -> Result<ExitCode> {
    let map = key_map(m)?;
    let get = |k: &str, default: &str| map.get(k).cloned().unwrap_or_else(|| default.to_string());
    let n: usize = get("n", "200000").parse().context("n")?;
    let d: usize = get("d", "20").parse().context("d")?;
    let epsilon: f64 = get("epsilon", "0.2").parse().context("epsilon")?;
    let alpha: f64 = get("alpha", "0.1").parse().context("alpha")?;
    let k_max = match map.get("k_max") {
        Some(k) => k.parse().context("k_max")?,
        None => ndperc_core::theory::default_k_max(alpha),
    };
    let prediction = predict(n, d, epsilon, alpha, k_max)?;
    let tree = series_tree_mass(epsilon, 1e-12)?;
    let edges = series_tree_edge_mass(epsilon, 1e-12)?;
    print_json(&serde_json::json!({
        "prediction": prediction,
        "series": {
            "tree_mass": tree.value,
            "tree_mass_closed_form": prediction.y / (1.0 + epsilon),
            "tree_edge_mass": edges.value,
            "tree_edge_mass_closed_form": prediction.y * prediction.y / 2.0,
        },
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_compare(m: &ArgMatches) -> Result<ExitCode> {
    let path = PathBuf::from(m.get_one::<String>("records").expect("required"));
    let summary = compare(&path)?;
    if m.get_flag("json") {
        print_json(&summary)?;
    } else {
        print!("{}", render_table(&summary));
    }
    Ok(if summary.all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(FAILED)
    })
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let result = match matches.subcommand() {
        Some(("generate", m)) => cmd_generate(m),
        Some(("spectrum", m)) => cmd_spectrum(m),
        Some(("percolate", m)) => cmd_percolate(m),
        Some(("sweep", m)) => cmd_sweep(m),
        Some(("verify", m)) => cmd_verify(m),
        Some(("theory", m)) => cmd_theory(m),
        Some(("compare", m)) => cmd_compare(m),
        _ => unreachable!("subcommand is required"),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(ERROR)
        }
    }
}
