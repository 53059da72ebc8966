//! Theory-versus-measurement summaries.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::harness::config::Regime;
use crate::harness::records::{read_records, CompareRow, RowKind, Stats, Summary, TrialRecord};
use crate::theory::TheoryPrediction;
use crate::verify::CHECKER_IDS;

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn stats(values: &[f64]) -> Option<Stats> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(Stats {
        count: v.len(),
        median: quantile(&v, 0.5),
        q05: quantile(&v, 0.05),
        q95: quantile(&v, 0.95),
        mean: v.iter().sum::<f64>() / v.len() as f64,
        min: v[0],
        max: v[v.len() - 1],
    })
}

/// Per-trial metric values by name.
pub fn metric_series(trials: &[TrialRecord]) -> BTreeMap<String, Vec<f64>> {
    let mut m: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for t in trials {
        let c = &t.census;
        let mut put = |k: &str, v: usize| m.entry(k.to_string()).or_default().push(v as f64);
        put("l1", c.l1);
        put("l2", c.l2);
        put("e_l1", c.e_l1);
        put("zp", c.edges_total);
        put("retained", c.retained);
        put("components", c.components);
        put("cycle_lb", c.longest_cycle_lb);
        put("straggler_vertices", c.straggler_vertices);
        for (k, &count) in c.tree_counts.iter().enumerate().take(2) {
            put(&format!("t{}", k + 1), count);
        }
    }
    m
}

/// What a summary is judged against.
#[derive(Debug, Clone)]
pub struct Criteria<'a> {
    pub regime: Regime,
    pub prediction: &'a TheoryPrediction,
    pub tolerances: &'a BTreeMap<String, f64>,
    pub rates: &'a BTreeMap<String, f64>,
}

fn rate_of(trials: &[TrialRecord], ok: impl Fn(&TrialRecord) -> bool) -> f64 {
    trials.iter().filter(|t| ok(t)).count() as f64 / trials.len() as f64
}

pub fn summarize(trials: &[TrialRecord], criteria: &Criteria<'_>) -> Summary {
    let series = metric_series(trials);
    let metrics: BTreeMap<String, Stats> = series
        .iter()
        .filter_map(|(k, v)| stats(v).map(|s| (k.clone(), s)))
        .collect();
    let pred = criteria.prediction;
    let w = pred.windows;
    let mut rows = Vec::new();

    let mut estimate = |metric: &str, claim: &str, target: f64, bound_tol: Option<f64>, admissible: Option<bool>| {
        let (Some(s), Some(&tol)) = (metrics.get(metric), criteria.tolerances.get(metric)) else {
            return;
        };
        let gap = (s.median - target).abs();
        rows.push(CompareRow {
            metric: metric.into(),
            claim: claim.into(),
            kind: RowKind::Estimate,
            measured: s.median,
            target,
            bound_tol,
            configured_tol: tol,
            pass: gap <= tol * target && bound_tol.is_none_or(|p| gap <= p),
            admissible,
        });
    };
    if criteria.regime == Regime::Super {
        estimate("l1", "giant size", pred.l1_pred, Some(pred.l1_tol), Some(w.giant_size));
        estimate(
            "e_l1",
            "giant edges",
            pred.e_l1_pred,
            Some(pred.e_l1_tol),
            Some(w.giant_edges),
        );
        estimate("zp", "induced edges", pred.zp_pred, Some(pred.zp_tol), None);
        for k in 1..=2 {
            if let Some(&t) = pred.t_k_pred.get(k - 1) {
                estimate(&format!("t{k}"), "isolated trees", t, None, Some(w.uniqueness));
            }
        }
    }

    let mut bound =
        |metric: &str, claim: &str, target: f64, rate_key: &str, ok: &dyn Fn(&TrialRecord) -> bool, admissible| {
            let Some(&rate) = criteria.rates.get(rate_key) else {
                return;
            };
            let measured = rate_of(trials, ok);
            rows.push(CompareRow {
                metric: metric.into(),
                claim: claim.into(),
                kind: RowKind::Bound,
                measured,
                target,
                bound_tol: None,
                configured_tol: rate,
                pass: measured >= rate,
                admissible,
            });
        };
    match criteria.regime {
        Regime::Super => {
            let (lo, hi) = (pred.l1_pred - pred.l1_tol, pred.l1_pred + pred.l1_tol);
            bound(
                "l1_window",
                "giant size window",
                pred.l1_tol,
                "l1_window",
                &|t| (lo..=hi).contains(&(t.census.l1 as f64)),
                Some(w.giant_size),
            );
            bound(
                "l2",
                "giant uniqueness",
                pred.straggler_bound,
                "l2",
                &|t| t.census.l2 as f64 <= pred.straggler_bound,
                Some(w.uniqueness),
            );
            bound(
                "cycle_lb",
                "long cycle",
                pred.cycle_bound,
                "cycle",
                &|t| t.census.longest_cycle_lb as f64 >= pred.cycle_bound && t.cycle_witness_valid != Some(false),
                Some(w.long_cycle),
            );
        }
        Regime::Sub => bound(
            "l1",
            "subcritical component size",
            pred.subcritical_bound,
            "subcritical",
            &|t| t.census.l1 as f64 <= pred.subcritical_bound,
            None,
        ),
    }

    for id in CHECKER_IDS {
        let ran: Vec<&TrialRecord> = trials
            .iter()
            .filter(|t| t.checks.iter().any(|c| c.checker == id))
            .collect();
        if ran.is_empty() {
            continue;
        }
        let passed = ran
            .iter()
            .filter(|t| t.checks.iter().filter(|c| c.checker == id).all(|c| c.passed()))
            .count();
        let rate = criteria.rates.get(id).copied().unwrap_or(1.0);
        let measured = passed as f64 / ran.len() as f64;
        rows.push(CompareRow {
            metric: id.to_string(),
            claim: format!("{id} checker"),
            kind: RowKind::Checker,
            measured,
            target: 1.0,
            bound_tol: None,
            configured_tol: rate,
            pass: measured >= rate,
            admissible: None,
        });
    }

    rows.push(CompareRow {
        metric: "oracle".into(),
        claim: "exploration matches union-find".into(),
        kind: RowKind::Checker,
        measured: rate_of(trials, |t| t.oracle_agrees && t.conserved),
        target: 1.0,
        bound_tol: None,
        configured_tol: 1.0,
        pass: trials.iter().all(|t| t.oracle_agrees && t.conserved),
        admissible: None,
    });

    Summary {
        trials: trials.len(),
        all_pass: rows.iter().all(|r| r.pass),
        metrics,
        rows,
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV table: one row per metric with its statistics, then one row per
/// comparison.
pub fn summary_csv(summary: &Summary) -> String {
    let mut out =
        String::from("name,kind,claim,median,q05,q95,mean,min,max,measured,target,bound_tol,configured_tol,pass\n");
    for (name, s) in &summary.metrics {
        let _ = writeln!(
            out,
            "{name},metric,,{},{},{},{},{},{},,,,,",
            s.median, s.q05, s.q95, s.mean, s.min, s.max
        );
    }
    for r in &summary.rows {
        let kind = match r.kind {
            RowKind::Estimate => "estimate",
            RowKind::Bound => "bound",
            RowKind::Checker => "checker",
        };
        let _ = writeln!(
            out,
            "{},{kind},{},,,,,,,{},{},{},{},{}",
            r.metric,
            r.claim,
            r.measured,
            r.target,
            opt(r.bound_tol),
            r.configured_tol,
            r.pass
        );
    }
    out
}

/// Recomputes the comparison table from a complete record file.
pub fn compare(path: impl AsRef<Path>) -> Result<Summary> {
    let file = read_records(path)?;
    let cfg = crate::harness::config::ExperimentConfig::from_map(file.header.config.clone())?;
    Ok(summarize(
        &file.trials,
        &Criteria {
            regime: cfg.regime,
            prediction: &file.header.prediction,
            tolerances: &cfg.tolerances,
            rates: &cfg.rates,
        },
    ))
}

/// Fixed-width text rendering of the comparison rows.
pub fn render_table(summary: &Summary) -> String {
    let mut out = format!(
        "{:<18} {:<32} {:>12} {:>12} {:>10} {:>8} {:>10} {:>5}\n",
        "metric", "claim", "measured", "target", "bound_tol", "cfg_tol", "admissible", "pass"
    );
    for r in &summary.rows {
        let _ = writeln!(
            out,
            "{:<18} {:<32} {:>12.4} {:>12.4} {:>10} {:>8} {:>10} {:>5}",
            r.metric,
            r.claim,
            r.measured,
            r.target,
            r.bound_tol.map(|p| format!("{p:.1}")).unwrap_or_else(|| "-".into()),
            r.configured_tol,
            r.admissible.map(|a| a.to_string()).unwrap_or_else(|| "-".into()),
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    out
}
