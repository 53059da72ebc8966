//! Seeded, parallel, resumable sweeps.
//!
//! Every trial is a pure function of the config, the master seed and its
//! index. Trials run on a worker pool in fixed-size chunks and each chunk is
//! written in index order before the next starts, so the record file does
//! not depend on the number of workers and a killed run leaves a valid
//! prefix behind.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::census::{take_census, validate_cycle};
use crate::error::{Error, Result};
use crate::generators::{generate, GenSpec};
use crate::graph::{read_graph, RegularGraph};
use crate::harness::compare::{summarize, summary_csv, Criteria};
use crate::harness::config::{ExperimentConfig, GraphSource, Regime};
use crate::harness::records::{CheckEntry, GraphInfo, Header, Record, Summary, TrialRecord, FORMAT_VERSION};
use crate::percolation::{components_oracle, run_dfs, CoinStream, DfsTrace, PercolationSample, Priority};
use crate::rng::{derive_seed, Purpose};
use crate::spectral::{certify_report, compute_spectrum, delta_of_alpha, SpectrumReport};
use crate::theory::{predict, TheoryPrediction};
use crate::verify::{self, GiantExpansionParams, StreamMode, StreamParams};

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub summary: Summary,
    /// Trials taken over from an interrupted earlier run.
    pub resumed_trials: usize,
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    graph: &'a RegularGraph,
    spectrum: Option<&'a SpectrumReport>,
    prediction: &'a TheoryPrediction,
    p: f64,
}

pub fn load_graph(cfg: &ExperimentConfig) -> Result<(RegularGraph, GraphInfo)> {
    let (g, spec, path) = match &cfg.graph {
        GraphSource::Generated(spec) => (generate(spec)?, Some(spec.clone()), None),
        GraphSource::File(p) => (read_graph(p)?, None, Some(p.display().to_string())),
    };
    let info = GraphInfo {
        family: spec.as_ref().map_or("file", GenSpec::family_name).to_string(),
        n: g.n(),
        d: g.d(),
        edges: g.edge_total(),
        spec,
        path,
    };
    Ok((g, info))
}

/// Everything trials share: the graph, its spectrum and the prediction.
pub struct Prepared {
    pub graph: RegularGraph,
    pub info: GraphInfo,
    pub spectrum: Option<SpectrumReport>,
    pub spectrum_error: Option<String>,
    pub prediction: TheoryPrediction,
    pub p: f64,
}

impl Prepared {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let (graph, info) = load_graph(cfg)?;
        let p = cfg.p(graph.d());
        let prediction = predict(graph.n(), graph.d(), cfg.epsilon, cfg.alpha, cfg.k_max)?;
        let (spectrum, spectrum_error) = if cfg.spectrum && !cfg.regen_per_trial {
            match compute_spectrum(&graph, cfg.spectrum_tol) {
                Ok(r) => (Some(r), None),
                Err(e @ Error::Convergence { .. }) => (None, Some(e.to_string())),
                Err(e) => return Err(e),
            }
        } else {
            (None, None)
        };
        Ok(Self {
            graph,
            info,
            spectrum,
            spectrum_error,
            prediction,
            p,
        })
    }

    pub fn header(&self, cfg: &ExperimentConfig) -> Result<Header> {
        let certificate = match &self.spectrum {
            Some(r) => Some(certify_report(r.clone(), delta_of_alpha(cfg.alpha)?)),
            None => None,
        };
        Ok(Header {
            version: FORMAT_VERSION,
            config: cfg.recorded(),
            graph: self.info.clone(),
            p: self.p,
            spectrum: self.spectrum.clone(),
            certificate,
            spectrum_error: self.spectrum_error.clone(),
            prediction: self.prediction.clone(),
        })
    }

    /// Runs trial `index`: exploration, census, oracle comparison, checkers.
    pub fn trial(&self, cfg: &ExperimentConfig, index: usize) -> Result<TrialRecord> {
        let ctx = Context {
            cfg,
            graph: &self.graph,
            spectrum: self.spectrum.as_ref(),
            prediction: &self.prediction,
            p: self.p,
        };
        run_trial(&ctx, index)
    }
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutcome> {
    let out_path = cfg
        .out
        .clone()
        .ok_or_else(|| Error::Config("a sweep needs out = <record file>".into()))?;
    let csv_path = cfg.csv.clone().unwrap_or_else(|| out_path.with_extension("csv"));
    let prepared = Prepared::new(cfg)?;
    let header = Record::Header(Box::new(prepared.header(cfg)?)).to_line()?;

    let kept = if cfg.resume {
        resumable_prefix(cfg, &out_path, &header)?
    } else {
        Vec::new()
    };
    let resumed_trials = kept.len();
    let mut out = BufWriter::new(File::create(&out_path)?);
    writeln!(out, "{header}")?;
    let mut trials: Vec<TrialRecord> = Vec::with_capacity(cfg.trials);
    for (line, record) in kept {
        writeln!(out, "{line}")?;
        trials.push(record);
    }
    out.flush()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let chunk = (cfg.workers * 4).max(1);
    let mut next = resumed_trials;
    while next < cfg.trials {
        let end = (next + chunk).min(cfg.trials);
        let results: Vec<Result<TrialRecord>> =
            pool.install(|| (next..end).into_par_iter().map(|i| prepared.trial(cfg, i)).collect());
        for r in results {
            let record = r?;
            writeln!(out, "{}", Record::Trial(Box::new(record.clone())).to_line()?)?;
            trials.push(record);
        }
        out.flush()?;
        next = end;
    }

    let summary = summarize(
        &trials,
        &Criteria {
            regime: cfg.regime,
            prediction: &prepared.prediction,
            tolerances: &cfg.tolerances,
            rates: &cfg.rates,
        },
    );
    writeln!(out, "{}", Record::Summary(Box::new(summary.clone())).to_line()?)?;
    writeln!(out, "{}", Record::End { trials: trials.len() }.to_line()?)?;
    out.flush()?;
    std::fs::write(&csv_path, summary_csv(&summary))?;
    Ok(SweepOutcome {
        summary,
        resumed_trials,
    })
}

/// Exploration for the trial with seed `trial_seed`: the coin stream, the
/// trace and the accepted set.
pub fn explore(g: &RegularGraph, trial_seed: u64, p: f64) -> Result<(CoinStream, DfsTrace, PercolationSample)> {
    let coin_seed = derive_seed(trial_seed, 0, Purpose::Coins);
    let mut coins = CoinStream::new(coin_seed, p)?;
    let trace = run_dfs(g, &mut coins, &Priority::Identity)?;
    let sample = trace.to_sample(p, coin_seed)?;
    Ok((coins, trace, sample))
}

/// Seed of trial `index` under master seed `master`.
pub fn trial_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, index as u64, Purpose::Trial)
}

/// Trial lines of an earlier run with the same header, up to the first
/// damaged line. A complete earlier run is taken over whole.
fn resumable_prefix(cfg: &ExperimentConfig, path: &Path, header: &str) -> Result<Vec<(String, TrialRecord)>> {
    let Ok(file) = File::open(path) else {
        return Ok(Vec::new());
    };
    let mut lines = BufReader::new(file).lines();
    match lines.next() {
        Some(Ok(first)) if first == header => {}
        Some(_) => {
            return Err(Error::Config(format!(
                "{} was written with a different configuration; refusing to resume",
                path.display()
            )))
        }
        None => return Ok(Vec::new()),
    }
    let mut kept = Vec::new();
    for line in lines {
        let Ok(line) = line else { break };
        match serde_json::from_str::<Record>(&line) {
            Ok(Record::Trial(t)) if t.trial == kept.len() && t.trial < cfg.trials => kept.push((line, *t)),
            _ => break,
        }
    }
    Ok(kept)
}

fn run_trial(ctx: &Context<'_>, index: usize) -> Result<TrialRecord> {
    let start = Instant::now();
    let cfg = ctx.cfg;
    let seed = trial_seed(cfg.seed, index);

    let regenerated;
    let mut own_spectrum = None;
    let mut graph_seed = None;
    let g: &RegularGraph = match (&cfg.graph, cfg.regen_per_trial) {
        (GraphSource::Generated(spec), true) => {
            let gs = derive_seed(seed, 0, Purpose::Graph);
            graph_seed = Some(gs);
            regenerated = generate(&spec.with_seed(gs))?;
            if cfg.spectrum {
                own_spectrum = Some(compute_spectrum(&regenerated, cfg.spectrum_tol)?);
            }
            &regenerated
        }
        _ => ctx.graph,
    };
    let spectrum = own_spectrum.as_ref().or(ctx.spectrum);

    let (coins, trace, sample) = explore(g, seed, ctx.p)?;
    let census = take_census(g, &sample, cfg.k_max)?;
    let oracle_agrees = trace.partition() == components_oracle(g, &sample);
    let conserved = census.retained == trace.s_count && census.is_conserved();
    let cycle_witness_valid = census.cycle.as_ref().map(|w| validate_cycle(g, &sample, w));

    let mut checks = Vec::new();
    for id in &cfg.checkers {
        if let Some(outcome) = run_checker(ctx, id, g, spectrum, &sample, &census, &coins, seed) {
            checks.push(match outcome {
                Ok(report) => CheckEntry {
                    checker: id.clone(),
                    report: Some(report),
                    error: None,
                },
                Err(e) => CheckEntry {
                    checker: id.clone(),
                    report: None,
                    error: Some(e.to_string()),
                },
            });
        }
    }

    Ok(TrialRecord {
        trial: index,
        seed,
        graph_seed,
        spectrum: own_spectrum,
        census: census.summary(),
        dfs: trace.summary(),
        oracle_agrees,
        conserved,
        cycle_witness_valid,
        checks,
        wall_ms: cfg.record_timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

#[allow(clippy::too_many_arguments)]
fn run_checker(
    ctx: &Context<'_>,
    id: &str,
    g: &RegularGraph,
    spectrum: Option<&SpectrumReport>,
    sample: &PercolationSample,
    census: &crate::census::ComponentCensus,
    coins: &CoinStream,
    seed: u64,
) -> Option<Result<verify::ViolationReport>> {
    let cfg = ctx.cfg;
    let need_spectrum = || spectrum.ok_or_else(|| Error::Precondition("no certified spectrum for this graph".into()));
    let outcome = match id {
        verify::STREAM => {
            let mode = match cfg.regime {
                Regime::Sub => StreamMode::Sub,
                Regime::Super => StreamMode::Super,
            };
            let params = StreamParams {
                c: cfg.stream_c,
                ..StreamParams::new(cfg.epsilon, g.d(), mode)
            };
            verify::check_stream_properties(&coins.prefix(g.n()), &params)
        }
        verify::MIXING => need_spectrum()
            .and_then(|r| verify::check_mixing(g, r, cfg.mixing_pairs, derive_seed(seed, 0, Purpose::Pairs))),
        verify::DEGREE_OUTLIERS => need_spectrum().and_then(|r| {
            let b = verify::random_half_set(g.n(), derive_seed(seed, 0, Purpose::HalfSets));
            verify::check_degree_outliers(g, r, &b, cfg.outlier_alpha)
        }),
        verify::EXPANSION_WINDOW => verify::check_expansion_window(
            g,
            sample,
            cfg.expansion_alpha,
            cfg.expansion_subsets,
            derive_seed(seed, 0, Purpose::Subsets),
            cfg.expansion_threshold,
        ),
        verify::GIANT_EXPANSION => {
            if cfg.regime != Regime::Super {
                return None;
            }
            let params = GiantExpansionParams {
                alpha: cfg.giant_alpha,
                x: ctx.prediction.x,
                samples: cfg.giant_samples,
                beta_test: cfg.beta_test,
                seed: derive_seed(seed, 0, Purpose::Giant),
            };
            verify::check_giant_expansion(g, sample, census, &params)
        }
        verify::BLOWUP => match &cfg.graph {
            GraphSource::Generated(GenSpec::Blowup { factor, .. }) => {
                verify::full_blocks(g, *factor, sample).and_then(|s| verify::check_blowup_pairs(g, *factor, &s))
            }
            _ => return None,
        },
        other => Err(Error::Config(format!("unknown checker {other:?}"))),
    };
    Some(outcome)
}
