//! Closed-form predictions for supercritical and subcritical site percolation
//! with `p = (1 ± ε)/d` on an `n`-vertex `d`-regular graph.
//!
//! * `x` solves `x = (1+ε)(1 − e^{−x})`; the giant has about `x·n/d` vertices.
//! * `y` solves `y·e^{−y} = (1+ε)·e^{−(1+ε)}` with `y ∈ (0, 1)`; `x = 1 + ε − y`.
//! * Isolated `k`-trees number about `(n/d)·k^{k−2}(1+ε)^k e^{−(1+ε)k}/k!`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Residual target for both root solvers.
pub const ROOT_TOL: f64 = 1e-12;

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "epsilon",
            value: epsilon,
            domain: "(0, 1]",
        })
    }
}

/// `f(x) = x − (1+ε)(1 − e^{−x})`, written with `expm1` for small `x`.
pub fn giant_equation_residual(epsilon: f64, x: f64) -> f64 {
    x + (1.0 + epsilon) * (-x).exp_m1()
}

/// `g(y) = y·e^{−y} − (1+ε)·e^{−(1+ε)}`.
pub fn dual_equation_residual(epsilon: f64, y: f64) -> f64 {
    let c = 1.0 + epsilon;
    y * (-y).exp() - c * (-c).exp()
}

/// Bisects an increasing function's sign change on `[lo, hi]` down to
/// adjacent floating point numbers.
fn bisect_increasing(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// The positive root `x` of `x = (1+ε)(1 − e^{−x})`.
///
/// `f` is negative on `(0, ln(1+ε)]` and increasing beyond it. The root lies
/// below 1 only for `ε < 1/(1 − e^{−1}) − 1 ≈ 0.582`; in general it lies in
/// `(ln(1+ε), 1+ε)` because `x = 1 + ε − y` with `y ∈ (0, 1)`.
pub fn solve_x(epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let lo = epsilon.ln_1p();
    let hi = if giant_equation_residual(epsilon, 1.0) > 0.0 {
        1.0
    } else {
        1.0 + epsilon
    };
    let x = bisect_increasing(lo, hi, |x| giant_equation_residual(epsilon, x));
    debug_assert!(giant_equation_residual(epsilon, x).abs() <= ROOT_TOL);
    Ok(x)
}

/// The root `y ∈ (0, 1)` of `y·e^{−y} = (1+ε)·e^{−(1+ε)}`.
pub fn solve_y(epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let y = bisect_increasing(0.0, 1.0, |y| dual_equation_residual(epsilon, y));
    debug_assert!(dual_equation_residual(epsilon, y).abs() <= ROOT_TOL);
    Ok(y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSum {
    pub value: f64,
    /// Upper bound on the truncated tail.
    pub error_bound: f64,
    pub terms: usize,
}

/// Sums a positive series from its first term and consecutive log-ratios
/// `ln(a_{k+1}/a_k)`, stopping once a term drops below `tol`.
///
/// Accumulating log-ratios keeps every term accurate even when `k^k/k!`
/// would overflow. Term ratios of both tree series increase towards
/// `c·e^{1−c}` with `c = 1+ε`, so the tail after the last summed term `t` is
/// at most `t·r/(1 − r)` with `r = c·e^{1−c}`.
fn sum_ratio_series(
    epsilon: f64,
    tol: f64,
    first_k: usize,
    ln_first: f64,
    ln_ratio: impl Fn(f64) -> f64,
) -> Result<SeriesSum> {
    check_epsilon(epsilon)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain {
            name: "tol",
            value: tol,
            domain: "(0, ∞)",
        });
    }
    let c = 1.0 + epsilon;
    let ratio_bound = c * (1.0 - c).exp();
    let mut ln_term = ln_first;
    let mut value = 0.0;
    let mut compensation = 0.0;
    let mut k = first_k;
    let mut terms = 0usize;
    loop {
        let term = ln_term.exp();
        terms += 1;
        // Kahan summation: small ε needs millions of terms
        let y = term - compensation;
        let t = value + y;
        compensation = (t - value) - y;
        value = t;
        if term < tol {
            let error_bound = term * ratio_bound / (1.0 - ratio_bound);
            return Ok(SeriesSum {
                value,
                error_bound,
                terms,
            });
        }
        ln_term += ln_ratio(k as f64);
        k += 1;
    }
}

/// `Σ_{k≥1} k^{k−1}/k! · (1+ε)^{k−1} e^{−(1+ε)k}`, which equals `y/(1+ε)`.
pub fn series_tree_mass(epsilon: f64, tol: f64) -> Result<SeriesSum> {
    let c = 1.0 + epsilon;
    let ln_q = c.ln() - c;
    // a_1 = e^{−c}; a_{k+1}/a_k = c·e^{−c}·(1 + 1/k)^{k−1}
    sum_ratio_series(epsilon, tol, 1, -c, |k| ln_q + (k - 1.0) * (1.0 / k).ln_1p())
}

/// `Σ_{k≥1} (k−1)k^{k−2}/k! · ((1+ε)e^{−(1+ε)})^k`, which equals `y²/2`.
pub fn series_tree_edge_mass(epsilon: f64, tol: f64) -> Result<SeriesSum> {
    let c = 1.0 + epsilon;
    let ln_q = c.ln() - c;
    // the k = 1 term vanishes; b_2 = q²/2 and
    // b_{k+1}/b_k = q·k/(k−1)·(1 + 1/k)^{k−2}
    sum_ratio_series(epsilon, tol, 2, 2.0 * ln_q - 2f64.ln(), |k| {
        ln_q + (k / (k - 1.0)).ln() + (k - 2.0) * (1.0 / k).ln_1p()
    })
}

/// Expected number of isolated `k`-vertex trees divided by `n/d`.
pub fn tree_density(epsilon: f64, k: usize) -> f64 {
    let c = 1.0 + epsilon;
    let kf = k as f64;
    let ln_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
    ((kf - 2.0) * kf.ln() + kf * c.ln() - c * kf - ln_fact).exp()
}

/// Whether `α` lies in the window each result assumes. The spectral
/// condition `λ/d ≤ δ(α)` is certified separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaWindows {
    /// `2√(d/n) < α < ε²` (giant size, giant expansion).
    pub giant_size: bool,
    /// `2/ln(n/d) < α < ε⁴` (uniqueness and isolated trees).
    pub uniqueness: bool,
    /// `2/ln(n/d) < α < ε⁸` (edges of the giant).
    pub giant_edges: bool,
    /// `2√(d/n) < α < ε³` (long cycle).
    pub long_cycle: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryPrediction {
    pub n: usize,
    pub d: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub x: f64,
    pub y: f64,
    /// `x·n/d`.
    pub l1_pred: f64,
    /// `7αn/d`.
    pub l1_tol: f64,
    /// `((1+ε)² − (1+ε−x)²)·n/(2d)`.
    pub e_l1_pred: f64,
    /// `8α^{1/4}·n/d`.
    pub e_l1_tol: f64,
    /// `(1+ε)²·n/(2d)`.
    pub zp_pred: f64,
    /// `2(np)^{2/3}` with `p = (1+ε)/d`.
    pub zp_tol: f64,
    /// `(1+ε−x)²·n/(2d)`: edges in small isolated trees.
    pub zp_smalltrees_pred: f64,
    /// `(4/ε²)·ln(n/d)`: component size cap below criticality.
    pub subcritical_bound: f64,
    /// Index `k−1` holds the isolated `k`-tree prediction.
    pub t_k_pred: Vec<f64>,
    /// `15αn/d`.
    pub straggler_bound: f64,
    /// `ε²n/(100d)`.
    pub cycle_bound: f64,
    /// Giant is operationalized as `L₁ ≥ (x/2)·n/d`.
    pub giant_threshold: f64,
    pub windows: AlphaWindows,
}

pub fn predict(n: usize, d: usize, epsilon: f64, alpha: f64, k_max: usize) -> Result<TheoryPrediction> {
    check_epsilon(epsilon)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain {
            name: "alpha",
            value: alpha,
            domain: "(0, 1]",
        });
    }
    if n == 0 || d == 0 || d >= n {
        return Err(Error::InvalidInput(format!("need 0 < d < n, got n={n}, d={d}")));
    }
    let x = solve_x(epsilon)?;
    let y = solve_y(epsilon)?;
    let c = 1.0 + epsilon;
    let scale = n as f64 / d as f64;
    let ln_scale = scale.ln();
    let np = n as f64 * c / d as f64;
    let sqrt_window = 2.0 * (d as f64 / n as f64).sqrt();
    let log_window = 2.0 / ln_scale;
    Ok(TheoryPrediction {
        n,
        d,
        epsilon,
        alpha,
        x,
        y,
        l1_pred: x * scale,
        l1_tol: 7.0 * alpha * scale,
        e_l1_pred: (c * c - (c - x).powi(2)) * scale / 2.0,
        e_l1_tol: 8.0 * alpha.powf(0.25) * scale,
        zp_pred: c * c * scale / 2.0,
        zp_tol: 2.0 * np.powf(2.0 / 3.0),
        zp_smalltrees_pred: (c - x).powi(2) * scale / 2.0,
        subcritical_bound: 4.0 / (epsilon * epsilon) * ln_scale,
        t_k_pred: (1..=k_max).map(|k| scale * tree_density(epsilon, k)).collect(),
        straggler_bound: 15.0 * alpha * scale,
        cycle_bound: epsilon * epsilon * scale / 100.0,
        giant_threshold: 0.5 * x * scale,
        windows: AlphaWindows {
            giant_size: sqrt_window < alpha && alpha < epsilon.powi(2),
            uniqueness: log_window < alpha && alpha < epsilon.powi(4),
            giant_edges: log_window < alpha && alpha < epsilon.powi(8),
            long_cycle: sqrt_window < alpha && alpha < epsilon.powi(3),
        },
    })
}

/// `⌊1/α⌋`, at least 1.
pub fn default_k_max(alpha: f64) -> usize {
    ((1.0 / alpha).floor() as usize).max(1)
}
