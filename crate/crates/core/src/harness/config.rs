//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::GenSpec;
use crate::rng::{derive_seed, Purpose};
use crate::theory::default_k_max;
use crate::verify::CHECKER_IDS;

/// Every recognised key. Each one doubles as a command-line flag.
pub const KEYS: &[&str] = &[
    "family",
    "n",
    "d",
    "graph_seed",
    "factor",
    "base_family",
    "base_n",
    "base_d",
    "graph",
    "epsilon",
    "alpha",
    "regime",
    "p",
    "trials",
    "seed",
    "k_max",
    "checkers",
    "tol.l1",
    "tol.e_l1",
    "tol.zp",
    "tol.t1",
    "tol.t2",
    "rate.l1_window",
    "rate.l2",
    "rate.cycle",
    "rate.subcritical",
    "rate.mixing",
    "rate.degree_outliers",
    "rate.expansion_window",
    "rate.stream",
    "rate.giant_expansion",
    "rate.blowup",
    "out",
    "csv",
    "workers",
    "spectrum",
    "spectrum_tol",
    "regen_per_trial",
    "resume",
    "record_timing",
    "mixing_pairs",
    "outlier_alpha",
    "expansion_alpha",
    "expansion_subsets",
    "expansion_threshold",
    "giant_alpha",
    "giant_samples",
    "beta_test",
    "stream_c",
];

/// Keys that change how a sweep runs but not what it records.
pub const EXECUTION_KEYS: &[&str] = &["out", "csv", "workers", "resume"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Sub,
    Super,
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sub" => Ok(Regime::Sub),
            "super" => Ok(Regime::Super),
            other => Err(Error::Config(format!("regime must be sub or super, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    Generated(GenSpec),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub epsilon: f64,
    pub alpha: f64,
    pub regime: Regime,
    pub p_override: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub k_max: usize,
    pub checkers: Vec<String>,
    /// Relative tolerances per estimated metric.
    pub tolerances: BTreeMap<String, f64>,
    /// Required success rates for bounds and checkers.
    pub rates: BTreeMap<String, f64>,
    /// Record file; required by sweeps.
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub workers: usize,
    pub spectrum: bool,
    pub spectrum_tol: f64,
    pub regen_per_trial: bool,
    pub resume: bool,
    pub record_timing: bool,
    pub mixing_pairs: usize,
    pub outlier_alpha: f64,
    pub expansion_alpha: f64,
    pub expansion_subsets: usize,
    pub expansion_threshold: f64,
    pub giant_alpha: f64,
    pub giant_samples: usize,
    pub beta_test: f64,
    pub stream_c: f64,
    raw: BTreeMap<String, String>,
}

fn defaults() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("family", "random_regular"),
        ("epsilon", "0.2"),
        ("alpha", "0.1"),
        ("regime", "super"),
        ("checkers", "stream"),
        ("tol.l1", "0.10"),
        ("tol.e_l1", "0.10"),
        ("tol.zp", "0.05"),
        ("tol.t1", "0.10"),
        ("tol.t2", "0.15"),
        ("rate.l1_window", "0.8"),
        ("rate.l2", "0.95"),
        ("rate.cycle", "1"),
        ("rate.subcritical", "1"),
        ("rate.mixing", "1"),
        ("rate.degree_outliers", "1"),
        ("rate.expansion_window", "1"),
        ("rate.stream", "0.95"),
        ("rate.giant_expansion", "0.95"),
        ("rate.blowup", "1"),
        ("workers", "1"),
        ("spectrum", "true"),
        ("spectrum_tol", "1e-8"),
        ("regen_per_trial", "false"),
        ("resume", "false"),
        ("record_timing", "false"),
        ("mixing_pairs", "50"),
        ("outlier_alpha", "0.5"),
        ("expansion_subsets", "100"),
        ("expansion_threshold", "0"),
        ("giant_alpha", "0.01"),
        ("giant_samples", "200"),
        ("beta_test", "0.01"),
        ("stream_c", "1"),
    ])
}

/// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected key = value, got {line:?}"),
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("unknown key {key:?}"),
            });
        }
        if map.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("duplicate key {key:?}"),
            });
        }
    }
    Ok(map)
}

/// Reads a config file (if any) and applies overrides on top.
pub fn load(path: Option<&Path>, overrides: &BTreeMap<String, String>) -> Result<ExperimentConfig> {
    let mut map = match path {
        Some(p) => parse_pairs(&std::fs::read_to_string(p)?)?,
        None => BTreeMap::new(),
    };
    for (k, v) in overrides {
        if !KEYS.contains(&k.as_str()) {
            return Err(Error::Config(format!("unknown key {k:?}")));
        }
        map.insert(k.clone(), v.clone());
    }
    ExperimentConfig::from_map(map)
}

struct Reader {
    map: BTreeMap<String, String>,
}

impl Reader {
    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn req<T: FromStr>(&self, key: &str) -> Result<T> {
        let v = self
            .get(key)
            .ok_or_else(|| Error::Config(format!("missing required key {key:?}")))?;
        v.parse()
            .map_err(|_| Error::Config(format!("{key} = {v:?} is not a valid value")))
    }

    fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(_) => self.req(key).map(Some),
        }
    }

    fn positive(&self, key: &str) -> Result<f64> {
        let v: f64 = self.req(key)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Config(format!("{key} must be positive, got {v}")));
        }
        Ok(v)
    }

    fn rate(&self, key: &str) -> Result<f64> {
        let v: f64 = self.req(key)?;
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Config(format!("{key} must lie in [0, 1], got {v}")));
        }
        Ok(v)
    }
}

fn family_spec(r: &Reader, prefix: &str, family: &str, seed: u64) -> Result<GenSpec> {
    let key = |k: &str| format!("{prefix}{k}");
    let n: usize = r.req(&key("n"))?;
    let d: usize = r.req(&key("d"))?;
    match family {
        "random_regular" => Ok(GenSpec::RandomRegular { n, d, seed }),
        "hypercube" => Ok(GenSpec::Hypercube { n, d }),
        "clique_union" => Ok(GenSpec::CliqueUnion { n, d }),
        other => Err(Error::Config(format!("unknown family {other:?}"))),
    }
}

impl ExperimentConfig {
    pub fn from_map(mut map: BTreeMap<String, String>) -> Result<Self> {
        // A graph path on its own selects the file source.
        if map.contains_key("graph") && !map.contains_key("family") {
            map.insert("family".into(), "file".into());
        }
        for (k, v) in defaults() {
            map.entry(k.to_string()).or_insert_with(|| v.to_string());
        }
        let r = Reader { map };

        let seed: u64 = r.req("seed")?;
        let trials: usize = r.req("trials")?;
        if trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        let graph_seed: u64 = r
            .opt("graph_seed")?
            .unwrap_or_else(|| derive_seed(seed, 0, Purpose::Graph));
        let family = r.get("family").unwrap_or_default().to_string();
        let graph = match family.as_str() {
            "file" => GraphSource::File(PathBuf::from(
                r.get("graph")
                    .ok_or_else(|| Error::Config("family = file needs graph = <path>".into()))?,
            )),
            "blowup" => {
                let base_family = r.get("base_family").unwrap_or("random_regular").to_string();
                let base = family_spec(&r, "base_", &base_family, graph_seed)?;
                let factor: usize = r.req("factor")?;
                GraphSource::Generated(GenSpec::Blowup {
                    base: Box::new(base),
                    factor,
                })
            }
            other => GraphSource::Generated(family_spec(&r, "", other, graph_seed)?),
        };
        if let GraphSource::Generated(spec) = &graph {
            spec.validate()?;
        }

        let epsilon = r.positive("epsilon")?;
        if epsilon > 1.0 {
            return Err(Error::Config(format!("epsilon must lie in (0, 1], got {epsilon}")));
        }
        let alpha = r.rate("alpha")?;
        if alpha == 0.0 {
            return Err(Error::Config("alpha must be positive".into()));
        }
        let p_override: Option<f64> = r.opt("p")?;
        if let Some(p) = p_override {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("p must lie in [0, 1], got {p}")));
            }
        }
        let k_max = r.opt("k_max")?.unwrap_or_else(|| default_k_max(alpha));
        if k_max == 0 {
            return Err(Error::Config("k_max must be at least 1".into()));
        }
        let checkers: Vec<String> = r
            .get("checkers")
            .unwrap_or_default()
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty() && *s != "none")
            .map(String::from)
            .collect();
        for c in &checkers {
            if !CHECKER_IDS.contains(&c.as_str()) {
                return Err(Error::Config(format!("unknown checker {c:?}")));
            }
        }
        let mut tolerances = BTreeMap::new();
        let mut rates = BTreeMap::new();
        for key in KEYS {
            if let Some(metric) = key.strip_prefix("tol.") {
                tolerances.insert(metric.to_string(), r.positive(key)?);
            } else if let Some(name) = key.strip_prefix("rate.") {
                rates.insert(name.to_string(), r.rate(key)?);
            }
        }
        let out = r.get("out").map(PathBuf::from);
        let csv = r
            .get("csv")
            .map(PathBuf::from)
            .or_else(|| out.as_ref().map(|o| o.with_extension("csv")));
        let workers: usize = r.req("workers")?;
        if workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        let opt_alpha = |key: &str| -> Result<f64> {
            match r.get(key) {
                Some(_) => r.rate(key),
                None => Ok(alpha),
            }
        };

        Ok(Self {
            graph,
            epsilon,
            alpha,
            regime: r.req("regime")?,
            p_override,
            trials,
            seed,
            k_max,
            checkers,
            tolerances,
            rates,
            out,
            csv,
            workers,
            spectrum: r.req("spectrum")?,
            spectrum_tol: r.positive("spectrum_tol")?,
            regen_per_trial: r.req("regen_per_trial")?,
            resume: r.req("resume")?,
            record_timing: r.req("record_timing")?,
            mixing_pairs: r.req("mixing_pairs")?,
            outlier_alpha: r.positive("outlier_alpha")?,
            expansion_alpha: opt_alpha("expansion_alpha")?,
            expansion_subsets: r.req("expansion_subsets")?,
            expansion_threshold: r.rate("expansion_threshold")?,
            giant_alpha: r.rate("giant_alpha")?,
            giant_samples: r.req("giant_samples")?,
            beta_test: r.positive("beta_test")?,
            stream_c: r.positive("stream_c")?,
            raw: r.map,
        })
    }

    /// Site retention probability: `(1∓ε)/d` unless overridden.
    pub fn p(&self, d: usize) -> f64 {
        self.p_override.unwrap_or(match self.regime {
            Regime::Sub => (1.0 - self.epsilon) / d as f64,
            Regime::Super => (1.0 + self.epsilon) / d as f64,
        })
    }

    pub fn has_checker(&self, id: &str) -> bool {
        self.checkers.iter().any(|c| c == id)
    }

    /// Resolved settings that determine the records, as written to the header.
    pub fn recorded(&self) -> BTreeMap<String, String> {
        self.raw
            .iter()
            .filter(|(k, _)| !EXECUTION_KEYS.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    /// The same config with execution-only keys replaced.
    pub fn with_execution(&self, out: &Path, workers: usize) -> Result<Self> {
        let mut raw = self.raw.clone();
        raw.insert("out".into(), out.display().to_string());
        raw.remove("csv");
        raw.insert("workers".into(), workers.to_string());
        Self::from_map(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> BTreeMap<String, String> {
        parse_pairs("n = 1000\nd = 10\nseed = 3\ntrials = 2\nout = /tmp/x.jsonl\n").unwrap()
    }

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_map(base()).unwrap();
        assert_eq!(c.regime, Regime::Super);
        assert!((c.p(10) - 0.12).abs() < 1e-15);
        assert_eq!(c.k_max, 10);
        assert_eq!(c.csv, Some(PathBuf::from("/tmp/x.csv")));
        assert_eq!(c.checkers, vec!["stream".to_string()]);
        assert_eq!(c.tolerances["l1"], 0.10);
        assert!(!c.recorded().contains_key("out"));
    }

    #[test]
    fn comments_and_errors() {
        let m = parse_pairs("# header\n\nn = 5 # five\n").unwrap();
        assert_eq!(m["n"], "5");
        assert!(matches!(parse_pairs("n 5"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_pairs("x = 1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_pairs("n = 1\nn = 2"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn invalid_values_rejected() {
        for (k, v) in [
            ("trials", "0"),
            ("regime", "critical"),
            ("checkers", "bogus"),
            ("tol.l1", "-1"),
            ("epsilon", "2"),
            ("family", "torus"),
        ] {
            let mut m = base();
            m.insert(k.into(), v.into());
            assert!(ExperimentConfig::from_map(m).is_err(), "{k} = {v}");
        }
        let mut m = base();
        m.remove("seed");
        assert!(ExperimentConfig::from_map(m).is_err());
    }

    #[test]
    fn blowup_family() {
        let mut m = base();
        m.insert("family".into(), "blowup".into());
        m.insert("base_n".into(), "100".into());
        m.insert("base_d".into(), "6".into());
        m.insert("factor".into(), "2".into());
        let c = ExperimentConfig::from_map(m).unwrap();
        match c.graph {
            GraphSource::Generated(spec) => assert_eq!(spec.dims(), (200, 12)),
            _ => panic!(),
        }
    }
}
