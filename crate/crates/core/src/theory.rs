//! Executable checks for the analysis behind the solvers: the recovery
//! condition for the automatic step size under Gaussian designs, the two
//! concentration inequalities it rests on, and the convergence-rate
//! certificates for all three algorithms.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::float;
use crate::matrix::Matrix;
use crate::objective::{f_value, grad_bound, lipschitz_bound, GradEstimator, Problem};
use crate::rng::{gaussian_matrix, substream};
use crate::solver::{Algorithm, IterRecord, Trace, ZRecord};
use crate::spectral::FactoredIterate;
use crate::svd::singular_values;

/// Which side of the bound the empirical frequency must fall on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum BoundDirection {
    /// Empirical probability must reach at least the bound (minus margin).
    Lower,
    /// Empirical probability must stay at most the bound (plus margin).
    Upper,
}

/// Outcome of one Monte Carlo comparison against a closed-form bound.
/// `margin` is three binomial standard errors at the bound; `vacuous`
/// marks bounds outside [0, 1], which any sample satisfies.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MonteCarloReport {
    pub name: &'static str,
    pub trials: usize,
    pub successes: usize,
    pub empirical_probability: f64,
    pub theoretical_bound: f64,
    pub direction: BoundDirection,
    pub margin: f64,
    pub vacuous: bool,
    pub passed: bool,
    pub parameters: String,
    pub seed: u64,
}

fn finish_report(
    name: &'static str,
    trials: usize,
    successes: usize,
    bound: f64,
    direction: BoundDirection,
    parameters: String,
    seed: u64,
) -> MonteCarloReport {
    let empirical = successes as f64 / trials as f64;
    let vacuous = match direction {
        BoundDirection::Lower => bound < 0.0,
        BoundDirection::Upper => bound >= 1.0,
    };
    let clamped = bound.clamp(0.0, 1.0);
    let margin = 3.0 * float::sqrt(clamped * (1.0 - clamped) / trials as f64);
    let passed = vacuous
        || match direction {
            BoundDirection::Lower => empirical >= bound - margin,
            BoundDirection::Upper => empirical <= bound + margin,
        };
    MonteCarloReport {
        name,
        trials,
        successes,
        empirical_probability: empirical,
        theoretical_bound: bound,
        direction,
        margin,
        vacuous,
        passed,
        parameters,
        seed,
    }
}

/// Extreme singular values of a rescaled Gaussian matrix against their
/// exponential tail bounds, plus the expectation sandwich
/// 1 − √(n/m) ≤ E σ_min ≤ E σ_max ≤ 1 + √(n/m).
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SpectrumTailReport {
    pub upper: MonteCarloReport,
    pub lower: MonteCarloReport,
    pub mean_sigma_max: f64,
    pub mean_sigma_min: f64,
    pub sandwich_low: f64,
    pub sandwich_high: f64,
    /// Three standard errors of the worse-estimated mean.
    pub mean_margin: f64,
    pub means_within_sandwich: bool,
}

impl SpectrumTailReport {
    pub fn passed(&self) -> bool {
        self.upper.passed && self.lower.passed && self.means_within_sandwich
    }
}

/// One convergence-rate certificate over the stabilized tail of a trace.
/// `margin_series[i]` is bound − gap at the i-th checked iteration;
/// `violations` lists iterations whose margin fell below −slack, so
/// `violations` is empty exactly when every margin is ≥ −slack.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RateBoundReport {
    /// First iteration from which the certificate is asserted.
    pub t0: usize,
    /// The constant in front of the decay profile.
    pub bound_constant: f64,
    pub violations: Vec<usize>,
    pub margin_series: Vec<f64>,
    pub slack: f64,
}

impl RateBoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Smallest number of columns n for which the recovery analysis applies:
/// the least integer with √n ≥ √d + a + √((d + 2√(d·a) + 2a)(x0 + λ·s)/λ).
pub fn theorem1_required_n(
    d: usize,
    a: f64,
    lambda: f64,
    x0: f64,
    s_card: usize,
) -> Result<usize, Error> {
    if d == 0 {
        return Err(Error::InvalidParameter { what: "design row count d must be positive" });
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter { what: "tail parameter a must be positive and finite" });
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter { what: "lambda must be positive and finite" });
    }
    if !(x0 >= 0.0) || !x0.is_finite() {
        return Err(Error::InvalidParameter { what: "initial objective x0 must be nonnegative and finite" });
    }
    let d_f = d as f64;
    let inner = (d_f + 2.0 * float::sqrt(d_f * a) + 2.0 * a) * (x0 + lambda * s_card as f64) / lambda;
    let root = float::sqrt(d_f) + a + float::sqrt(inner);
    let mut n = (float::floor(root * root) as i64 - 2).max(1) as usize;
    while float::sqrt(n as f64) < root {
        n += 1;
    }
    Ok(n)
}

/// One draw of the recovery experiment: sample a d×n standard Gaussian
/// design and report whether the automatic step size is limited by the
/// curvature rather than the gradient bound, i.e. G² ≤ 2λL.
pub fn theorem1_trial<R: rand::Rng>(
    d: usize,
    n: usize,
    lambda: f64,
    y: &Matrix,
    x0: &FactoredIterate,
    rng: &mut R,
) -> Result<bool, Error> {
    let design = gaussian_matrix(rng, d, n, 1.0);
    let p = Problem::new(y.clone(), design, lambda)?;
    let l = lipschitz_bound(&p)?;
    let g = grad_bound(&p, x0, GradEstimator::ColumnNorm)?;
    Ok(g * g <= 2.0 * lambda * l)
}

/// Monte Carlo estimate of the recovery probability at the smallest column
/// count the analysis covers, compared against 1 − e^{−a²/2} − n·e^{−a}.
/// Requires the rank-zero start the analysis is stated for, so the initial
/// objective is ‖Y‖²_F regardless of the design draw.
pub fn theorem1_montecarlo(
    d: usize,
    a: f64,
    lambda: f64,
    y: &Matrix,
    x0: &FactoredIterate,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloReport, Error> {
    if trials < 100 {
        return Err(Error::InvalidParameter { what: "monte carlo needs at least 100 trials" });
    }
    if !x0.is_zero() {
        return Err(Error::InvalidParameter {
            what: "recovery experiment requires a rank-zero start",
        });
    }
    if y.rows() != d {
        return Err(Error::ShapeMismatch {
            what: "observations for recovery experiment",
            expected: (d, y.cols()),
            got: y.shape(),
        });
    }
    let mut x0_energy = 0.0;
    for v in y.data() {
        x0_energy += v * v;
    }
    let n = theorem1_required_n(d, a, lambda, x0_energy, 0)?;
    if x0.shape() != (n, y.cols()) {
        return Err(Error::ShapeMismatch {
            what: "start shape for recovery experiment (rows must be the required n)",
            expected: (n, y.cols()),
            got: x0.shape(),
        });
    }
    let mut successes = 0usize;
    for trial in 0..trials {
        let mut rng = substream(seed, "thm1-trial", trial as u64);
        if theorem1_trial(d, n, lambda, y, x0, &mut rng)? {
            successes += 1;
        }
    }
    let bound = 1.0 - float::exp(-a * a / 2.0) - n as f64 * float::exp(-a);
    let parameters = format!(
        "d={d} a={a} lambda={lambda} x0={x0_energy} s_card=0 n={n} k={}",
        y.cols()
    );
    Ok(finish_report(
        "recovery-step-size",
        trials,
        successes,
        bound,
        BoundDirection::Lower,
        parameters,
        seed,
    ))
}

/// Tail of a weighted chi-square sum: for positive weights a_i and
/// independent standard normals Y_i,
/// P(Σ a_i (Y_i² − 1) ≥ 2‖a‖₂√t + 2‖a‖_∞ t) ≤ e^{−t}.
pub fn laurent_massart_check(
    a_vec: &[f64],
    t: f64,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloReport, Error> {
    if a_vec.is_empty() {
        return Err(Error::InvalidParameter { what: "weight vector must be nonempty" });
    }
    if a_vec.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParameter { what: "weights must be positive and finite" });
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter { what: "tail parameter t must be positive and finite" });
    }
    if trials < 100 {
        return Err(Error::InvalidParameter { what: "monte carlo needs at least 100 trials" });
    }
    let norm2 = float::sqrt(a_vec.iter().map(|v| v * v).sum());
    let max_abs = a_vec.iter().fold(0.0f64, |m, &v| m.max(v));
    let threshold = 2.0 * norm2 * float::sqrt(t) + 2.0 * max_abs * t;
    let mut successes = 0usize;
    for trial in 0..trials {
        let mut rng = substream(seed, "lm-trial", trial as u64);
        let mut z = 0.0;
        for &a in a_vec {
            let y: f64 = rand::Rng::sample(&mut rng, rand_distr::StandardNormal);
            z += a * (y * y - 1.0);
        }
        if z >= threshold {
            successes += 1;
        }
    }
    let parameters = format!("len={} t={t} threshold={threshold}", a_vec.len());
    Ok(finish_report(
        "weighted-chi-square-tail",
        trials,
        successes,
        float::exp(-t),
        BoundDirection::Upper,
        parameters,
        seed,
    ))
}

/// Extreme singular values of an m×n matrix with i.i.d. N(0, 1/m) entries:
/// P(σ_max ≥ 1 + √(n/m) + t) and P(σ_min ≤ 1 − √(n/m) − t) are each below
/// e^{−mt²/2}, and the means sit inside 1 ± √(n/m).
pub fn davidson_szarek_check(
    m: usize,
    n: usize,
    trials: usize,
    t: f64,
    seed: u64,
) -> Result<SpectrumTailReport, Error> {
    if n == 0 || m < n {
        return Err(Error::InvalidParameter { what: "spectrum check needs m >= n >= 1" });
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter { what: "tail parameter t must be positive and finite" });
    }
    if trials < 100 {
        return Err(Error::InvalidParameter { what: "monte carlo needs at least 100 trials" });
    }
    let ratio = float::sqrt(n as f64 / m as f64);
    let hi_threshold = 1.0 + ratio + t;
    let lo_threshold = 1.0 - ratio - t;
    let scale = 1.0 / float::sqrt(m as f64);
    let (mut hi_hits, mut lo_hits) = (0usize, 0usize);
    let (mut sum_hi, mut sumsq_hi) = (0.0f64, 0.0f64);
    let (mut sum_lo, mut sumsq_lo) = (0.0f64, 0.0f64);
    for trial in 0..trials {
        let mut rng = substream(seed, "ds-trial", trial as u64);
        let a = gaussian_matrix(&mut rng, m, n, scale);
        let sv = singular_values(&a)?;
        let (s_max, s_min) = (sv[0], sv[n - 1]);
        if s_max >= hi_threshold {
            hi_hits += 1;
        }
        if s_min <= lo_threshold {
            lo_hits += 1;
        }
        sum_hi += s_max;
        sumsq_hi += s_max * s_max;
        sum_lo += s_min;
        sumsq_lo += s_min * s_min;
    }
    let bound = float::exp(-(m as f64) * t * t / 2.0);
    let tf = trials as f64;
    let (mean_hi, mean_lo) = (sum_hi / tf, sum_lo / tf);
    let var_hi = (sumsq_hi / tf - mean_hi * mean_hi).max(0.0);
    let var_lo = (sumsq_lo / tf - mean_lo * mean_lo).max(0.0);
    let mean_margin = 3.0 * float::sqrt(var_hi.max(var_lo) / tf);
    let (sandwich_low, sandwich_high) = (1.0 - ratio, 1.0 + ratio);
    let means_within_sandwich = mean_hi >= sandwich_low - mean_margin
        && mean_hi <= sandwich_high + mean_margin
        && mean_lo >= sandwich_low - mean_margin
        && mean_lo <= sandwich_high + mean_margin;
    let parameters = format!("m={m} n={n} t={t}");
    Ok(SpectrumTailReport {
        upper: finish_report(
            "spectrum-upper-tail",
            trials,
            hi_hits,
            bound,
            BoundDirection::Upper,
            parameters.clone(),
            seed,
        ),
        lower: finish_report(
            "spectrum-lower-tail",
            trials,
            lo_hits,
            bound,
            BoundDirection::Upper,
            parameters,
            seed,
        ),
        mean_sigma_max: mean_hi,
        mean_sigma_min: mean_lo,
        sandwich_low,
        sandwich_high,
        mean_margin,
        means_within_sandwich,
    })
}

/// First iteration from which the support sizes are constant: one past the
/// last change, or the first recorded iteration if none changed.
fn stabilization_onset(sizes: &[(usize, usize)]) -> usize {
    let mut last_change = None;
    for w in sizes.windows(2) {
        if w[1].1 != w[0].1 {
            last_change = Some(w[1].0);
        }
    }
    match last_change {
        Some(t) => t + 1,
        None => sizes[0].0,
    }
}

fn record_sizes(records: &[IterRecord]) -> Vec<(usize, usize)> {
    records.iter().map(|r| (r.iter, r.support_size)).collect()
}

fn z_sizes(z_records: &[ZRecord]) -> Vec<(usize, usize)> {
    z_records.iter().map(|r| (r.iter, r.rank)).collect()
}

struct TailSetup<'a> {
    records: &'a [IterRecord],
    log: &'a crate::solver::IterateLog,
    t0: usize,
    f_star: f64,
    slack: f64,
}

fn tail_setup<'a>(
    p: &Problem,
    trace: &'a Trace,
    x_star: &FactoredIterate,
    s: f64,
    expected_algorithm: Algorithm,
    t0: usize,
) -> Result<TailSetup<'a>, Error> {
    if trace.config.algorithm != expected_algorithm {
        return Err(Error::InvalidParameter {
            what: "rate certificate applied to a trace from a different algorithm",
        });
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter { what: "step size must be positive and finite" });
    }
    let records = trace.records.as_slice();
    if records.is_empty() {
        return Err(Error::InsufficientData { what: String::from("trace has no records") });
    }
    let log = trace.iterates.as_ref().ok_or_else(|| Error::InsufficientData {
        what: String::from("rate certificates need a trace recorded with iterate snapshots"),
    })?;
    let last_iter = records[records.len() - 1].iter;
    if t0 + 1 > last_iter {
        return Err(Error::InsufficientData {
            what: format!("no stabilized tail: support last changed too close to the end (t0={t0}, last iteration {last_iter})"),
        });
    }
    let stabilized = records[records.len() - 1].support_size;
    if x_star.rank() != stabilized {
        return Err(Error::InsufficientData {
            what: format!(
                "reference solution support {} does not match the stabilized support {stabilized}",
                x_star.rank()
            ),
        });
    }
    let f_star = f_value(p, x_star)?;
    let slack = 1e-8 * 1.0f64.max(records[0].objective);
    Ok(TailSetup { records, log, t0, f_star, slack })
}

fn record_index(records: &[IterRecord], iter: usize) -> Result<usize, Error> {
    records
        .iter()
        .position(|r| r.iter == iter)
        .ok_or(Error::InsufficientData { what: String::from("iteration missing from trace") })
}

/// Checks margins of `gap(m+1) ≤ rhs(m)` for every recorded m ≥ t0.
fn sweep_tail(
    setup: &TailSetup<'_>,
    bound_constant: f64,
    rhs: impl Fn(usize) -> f64,
) -> RateBoundReport {
    let mut violations = Vec::new();
    let mut margin_series = Vec::new();
    for rec in setup.records.iter().filter(|r| r.iter >= setup.t0 + 1) {
        let m = rec.iter - 1;
        let margin = rhs(m) - (rec.objective - setup.f_star);
        margin_series.push(margin);
        if margin < -setup.slack {
            violations.push(rec.iter);
        }
    }
    RateBoundReport {
        t0: setup.t0,
        bound_constant,
        violations,
        margin_series,
        slack: setup.slack,
    }
}

/// Plain proximal gradient rate: once the support has stabilized at t0,
/// F(X^{m+1}) − F(X*) ≤ ‖X^{t0} − X*‖²_F / (2s(m − t0 + 1)) for all m ≥ t0.
pub fn rate_bound_pgd(
    p: &Problem,
    trace: &Trace,
    x_star: &FactoredIterate,
    s: f64,
) -> Result<RateBoundReport, Error> {
    let t0 = stabilization_onset(&record_sizes(&trace.records));
    let setup = tail_setup(p, trace, x_star, s, Algorithm::Pgd, t0)?;
    let x_t0 = &setup.log.x[record_index(setup.records, t0)?];
    let diff = x_t0.sub(&x_star.reconstruct()).frobenius_norm();
    let c = diff * diff / (2.0 * s);
    Ok(sweep_tail(&setup, c, |m| c / (m - t0 + 1) as f64))
}

/// Momentum scalar and iterate entering the accelerated certificates at
/// t0 − 1. When t0 is the first recorded iteration those are the initial
/// α⁰ and the start X⁰, which the first record equals by construction.
fn accel_anchor<'a>(setup: &'a TailSetup<'_>, trace: &Trace) -> Result<(f64, &'a Matrix), Error> {
    let first = setup.records[0].iter;
    if setup.t0 == first {
        Ok((trace.config.alpha0, &setup.log.x[0]))
    } else {
        let idx = record_index(setup.records, setup.t0 - 1)?;
        let alpha = setup.records[idx].alpha.ok_or(Error::InsufficientData {
            what: String::from("trace carries no momentum scalars"),
        })?;
        Ok((alpha, &setup.log.x[idx]))
    }
}

fn accel_constant(
    setup: &TailSetup<'_>,
    alpha_prev: f64,
    x_prev: &Matrix,
    pivot: &Matrix,
    x_star_dense: &Matrix,
    f_at_t0: f64,
    s: f64,
) -> f64 {
    let a = x_prev
        .scale(alpha_prev - 1.0)
        .add_scaled(pivot, -alpha_prev)
        .add(x_star_dense);
    let norm = a.frobenius_norm();
    norm * norm / (2.0 * s) + alpha_prev * alpha_prev * (f_at_t0 - setup.f_star)
}

/// Non-monotone accelerated rate: for m ≥ t0,
/// F(X^{m+1}) − F(X*) ≤ 4/(m+1)² · [‖(α−1)X^{t0−1} − αX^{t0} + X*‖²_F/(2s)
/// + α²(F(X^{t0}) − F(X*))] with α = α^{t0−1}.
pub fn rate_bound_apg(
    p: &Problem,
    trace: &Trace,
    x_star: &FactoredIterate,
    s: f64,
) -> Result<RateBoundReport, Error> {
    let t0 = stabilization_onset(&record_sizes(&trace.records));
    let setup = tail_setup(p, trace, x_star, s, Algorithm::ApgNonmonotone, t0)?;
    let (alpha_prev, x_prev) = accel_anchor(&setup, trace)?;
    let x_t0 = &setup.log.x[record_index(setup.records, t0)?];
    let f_at_t0 = setup.records[record_index(setup.records, t0)?].objective;
    let v = accel_constant(&setup, alpha_prev, x_prev, x_t0, &x_star.reconstruct(), f_at_t0, s);
    Ok(sweep_tail(&setup, v, |m| 4.0 * v / float::sq((m + 1) as f64)))
}

/// Monotone accelerated rate: same decay profile, with the candidate
/// iterate Z^{t0} replacing X^{t0} inside the quadratic term and t0 taken
/// past the stabilization of both the accepted and candidate sequences.
pub fn rate_bound_apg_monotone(
    p: &Problem,
    trace: &Trace,
    x_star: &FactoredIterate,
    s: f64,
) -> Result<RateBoundReport, Error> {
    if trace.z_records.is_empty() {
        return Err(Error::InsufficientData {
            what: String::from("monotone certificate needs candidate records"),
        });
    }
    let t0_x = stabilization_onset(&record_sizes(&trace.records));
    let t0_z = stabilization_onset(&z_sizes(&trace.z_records));
    let t0 = t0_x.max(t0_z);
    let setup = tail_setup(p, trace, x_star, s, Algorithm::ApgMonotone, t0)?;
    let z_log = setup.log.z.as_ref().ok_or_else(|| Error::InsufficientData {
        what: String::from("monotone certificate needs candidate iterate snapshots"),
    })?;
    let z_last = trace.z_records[trace.z_records.len() - 1].rank;
    if z_last != x_star.rank() {
        return Err(Error::InsufficientData {
            what: format!(
                "candidate support {z_last} does not match the reference solution support {}",
                x_star.rank()
            ),
        });
    }
    let (alpha_prev, x_prev) = accel_anchor(&setup, trace)?;
    let z_idx = trace
        .z_records
        .iter()
        .position(|r| r.iter == t0)
        .ok_or(Error::InsufficientData { what: String::from("iteration missing from candidate records") })?;
    let z_t0 = &z_log[z_idx];
    let f_at_t0 = setup.records[record_index(setup.records, t0)?].objective;
    let w = accel_constant(&setup, alpha_prev, x_prev, z_t0, &x_star.reconstruct(), f_at_t0, s);
    Ok(sweep_tail(&setup, w, |m| 4.0 * w / float::sq((m + 1) as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{default_x0, step_size_auto};
    use crate::solver::{solve, SolverConfig, Termination};

    #[test]
    fn required_n_matches_hand_computed_cases() {
        assert_eq!(theorem1_required_n(1, 1.0, 1.0, 0.0, 0).unwrap(), 4);
        assert_eq!(theorem1_required_n(4, 10.0, 1.0, 25.0, 0).unwrap(), 1787);
    }

    #[test]
    fn required_n_is_monotone_in_each_parameter() {
        let base = theorem1_required_n(2, 3.0, 1.0, 4.0, 0).unwrap();
        assert!(theorem1_required_n(5, 3.0, 1.0, 4.0, 0).unwrap() >= base);
        assert!(theorem1_required_n(2, 6.0, 1.0, 4.0, 0).unwrap() >= base);
        assert!(theorem1_required_n(2, 3.0, 1.0, 9.0, 0).unwrap() >= base);
        assert!(theorem1_required_n(2, 3.0, 1.0, 4.0, 3).unwrap() >= base);
        assert!(theorem1_required_n(2, 3.0, 4.0, 4.0, 0).unwrap() <= base);
    }

    #[test]
    fn required_n_rejects_bad_parameters() {
        assert!(theorem1_required_n(0, 1.0, 1.0, 0.0, 0).is_err());
        assert!(theorem1_required_n(2, 0.0, 1.0, 0.0, 0).is_err());
        assert!(theorem1_required_n(2, 1.0, -1.0, 0.0, 0).is_err());
        assert!(theorem1_required_n(2, 1.0, 1.0, f64::NAN, 0).is_err());
    }

    #[test]
    fn trial_success_equals_curvature_limited_auto_step() {
        let y = Matrix::from_vec(2, 1, alloc::vec![3.0, 4.0]).unwrap();
        let x0 = FactoredIterate::zero(30, 1);
        for trial in 0..40u64 {
            let mut rng = substream(7, "trial-eq", trial);
            let succeeded = theorem1_trial(2, 30, 1.5, &y, &x0, &mut rng).unwrap();
            let mut rng = substream(7, "trial-eq", trial);
            let design = gaussian_matrix(&mut rng, 2, 30, 1.0);
            let p = Problem::new(y.clone(), design, 1.5).unwrap();
            let plan = step_size_auto(&p, &x0, GradEstimator::ColumnNorm).unwrap();
            assert_eq!(succeeded, plan.s == 1.0 / plan.l, "trial {trial}");
        }
    }

    #[test]
    fn recovery_montecarlo_beats_its_bound_at_the_required_n() {
        let y = Matrix::from_vec(2, 1, alloc::vec![1.0, 0.0]).unwrap();
        let n = theorem1_required_n(2, 5.0, 1.0, 1.0, 0).unwrap();
        let x0 = FactoredIterate::zero(n, 1);
        let report = theorem1_montecarlo(2, 5.0, 1.0, &y, &x0, 200, 11).unwrap();
        assert!(!report.vacuous);
        assert!(report.theoretical_bound > 0.2 && report.theoretical_bound < 0.25);
        assert!(report.passed, "empirical {} bound {}", report.empirical_probability, report.theoretical_bound);
        assert_eq!(report.direction, BoundDirection::Lower);
    }

    #[test]
    fn recovery_montecarlo_flags_vacuous_bounds() {
        let y = Matrix::from_vec(2, 1, alloc::vec![1.0, 0.0]).unwrap();
        let n = theorem1_required_n(2, 1.0, 1.0, 1.0, 0).unwrap();
        let x0 = FactoredIterate::zero(n, 1);
        let report = theorem1_montecarlo(2, 1.0, 1.0, &y, &x0, 100, 3).unwrap();
        assert!(report.theoretical_bound < 0.0);
        assert!(report.vacuous && report.passed);
    }

    #[test]
    fn recovery_montecarlo_rejects_nonzero_start() {
        let y = Matrix::from_vec(2, 1, alloc::vec![1.0, 0.0]).unwrap();
        let x0 = FactoredIterate::from_matrix(&Matrix::diag(&[2.0])).unwrap();
        assert!(matches!(
            theorem1_montecarlo(2, 5.0, 1.0, &y, &x0, 100, 3),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn recovery_montecarlo_is_deterministic_in_the_seed() {
        let y = Matrix::from_vec(1, 1, alloc::vec![0.5]).unwrap();
        let n = theorem1_required_n(1, 2.0, 1.0, 0.25, 0).unwrap();
        let x0 = FactoredIterate::zero(n, 1);
        let a = theorem1_montecarlo(1, 2.0, 1.0, &y, &x0, 150, 42).unwrap();
        let b = theorem1_montecarlo(1, 2.0, 1.0, &y, &x0, 150, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn chi_square_tail_stays_below_its_bound() {
        let report = laurent_massart_check(&[1.0; 5], 1.0, 2000, 19).unwrap();
        assert!((report.theoretical_bound - (-1.0f64).exp()).abs() < 1e-15);
        assert!(report.passed, "empirical {}", report.empirical_probability);
        assert!(!report.vacuous);
        assert_eq!(report.direction, BoundDirection::Upper);
    }

    #[test]
    fn chi_square_deep_tail_is_never_hit() {
        let report = laurent_massart_check(&[1.0, 2.0, 0.5], 25.0, 500, 23).unwrap();
        assert_eq!(report.successes, 0);
        assert!(report.passed);
    }

    // Abramowitz–Stegun 7.1.26 rational approximation, |error| ≤ 1.5e−7.
    fn erfc(x: f64) -> f64 {
        let t = 1.0 / (1.0 + 0.3275911 * x);
        let poly = t
            * (0.254829592
                + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
        poly * (-x * x).exp()
    }

    #[test]
    fn chi_square_event_frequency_matches_the_normal_tail() {
        // One weight: the event a(Y²−1) ≥ 2√t + 2t is |Y| ≥ √(1 + 2√t + 2t),
        // whose exact probability is erfc of that over √2.
        let t = 0.25;
        let report = laurent_massart_check(&[1.0], t, 20_000, 29).unwrap();
        let cut = (1.0 + 2.0 * t.sqrt() + 2.0 * t).sqrt();
        let exact = erfc(cut / 2.0f64.sqrt());
        let sigma = (exact * (1.0 - exact) / 20_000.0).sqrt();
        let dev = (report.empirical_probability - exact).abs();
        assert!(dev <= 4.0 * sigma, "dev {dev} vs 4σ {}", 4.0 * sigma);
    }

    #[test]
    fn laurent_massart_rejects_bad_inputs() {
        assert!(laurent_massart_check(&[], 1.0, 200, 1).is_err());
        assert!(laurent_massart_check(&[1.0, -1.0], 1.0, 200, 1).is_err());
        assert!(laurent_massart_check(&[1.0], 0.0, 200, 1).is_err());
        assert!(laurent_massart_check(&[1.0], 1.0, 50, 1).is_err());
    }

    #[test]
    fn spectrum_tails_and_means_behave() {
        let report = davidson_szarek_check(50, 5, 300, 0.3, 31).unwrap();
        assert!(report.passed(), "{report:?}");
        let expected = (-50.0f64 * 0.09 / 2.0).exp();
        assert!((report.upper.theoretical_bound - expected).abs() < 1e-15);
        assert!((report.sandwich_high - (1.0 + (0.1f64).sqrt())).abs() < 1e-15);
        assert!(report.mean_sigma_max > report.mean_sigma_min);
    }

    #[test]
    fn spectrum_check_rejects_wide_shapes() {
        assert!(matches!(
            davidson_szarek_check(3, 5, 200, 0.1, 1),
            Err(Error::InvalidParameter { .. })
        ));
    }

    fn rate_problem(seed: u64) -> (Problem, FactoredIterate) {
        let d = gaussian_matrix(&mut substream(seed, "rate-d", 0), 6, 5, 1.0);
        let a = gaussian_matrix(&mut substream(seed, "rate-a", 0), 5, 2, 1.0);
        let b = gaussian_matrix(&mut substream(seed, "rate-b", 0), 4, 2, 1.0);
        let noise = gaussian_matrix(&mut substream(seed, "rate-e", 0), 6, 4, 0.05);
        let y = d.matmul(&a.matmul(&b.transpose())).add(&noise);
        let p = Problem::new(y, d, 2.0).unwrap();
        let x0 = default_x0(&p).unwrap();
        (p, x0)
    }

    fn converged_trace(seed: u64, algorithm: Algorithm) -> (Problem, Trace) {
        let (p, x0) = rate_problem(seed);
        let plan = step_size_auto(&p, &x0, GradEstimator::ColumnNorm).unwrap();
        let mut cfg = SolverConfig::new(algorithm, plan, &p);
        cfg.max_iters = 20_000;
        cfg.tol = 1e-11;
        cfg.record_iterates = true;
        let (_, trace) = solve(&p, &x0, &cfg).unwrap();
        assert_eq!(trace.terminated_by, Termination::Tolerance);
        (p, trace)
    }

    #[test]
    fn pgd_rate_certificate_holds_on_a_converged_run() {
        let (p, trace) = converged_trace(41, Algorithm::Pgd);
        let s = trace.config.plan.s;
        let x_star = trace.final_iterate.clone();
        let report = rate_bound_pgd(&p, &trace, &x_star, s).unwrap();
        assert!(report.passed(), "violations {:?}", report.violations);
        assert!(!report.margin_series.is_empty());
        assert!(report.bound_constant >= 0.0);
    }

    #[test]
    fn accelerated_rate_certificate_holds_on_a_converged_run() {
        let (p, trace) = converged_trace(42, Algorithm::ApgNonmonotone);
        let s = trace.config.plan.s;
        let x_star = trace.final_iterate.clone();
        let report = rate_bound_apg(&p, &trace, &x_star, s).unwrap();
        assert!(report.passed(), "violations {:?}", report.violations);
        assert!(!report.margin_series.is_empty());
    }

    #[test]
    fn monotone_rate_certificate_holds_on_a_converged_run() {
        let (p, trace) = converged_trace(43, Algorithm::ApgMonotone);
        let s = trace.config.plan.s;
        let x_star = trace.final_iterate.clone();
        let report = rate_bound_apg_monotone(&p, &trace, &x_star, s).unwrap();
        assert!(report.passed(), "violations {:?}", report.violations);
        assert!(!report.margin_series.is_empty());
    }

    #[test]
    fn rate_certificates_need_iterate_snapshots() {
        let (p, x0) = rate_problem(44);
        let plan = step_size_auto(&p, &x0, GradEstimator::ColumnNorm).unwrap();
        let mut cfg = SolverConfig::new(Algorithm::Pgd, plan, &p);
        cfg.max_iters = 500;
        let (_, trace) = solve(&p, &x0, &cfg).unwrap();
        let x_star = trace.final_iterate.clone();
        assert!(matches!(
            rate_bound_pgd(&p, &trace, &x_star, plan.s),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn rate_certificates_reject_traces_from_other_algorithms() {
        let (p, trace) = converged_trace(45, Algorithm::ApgNonmonotone);
        let x_star = trace.final_iterate.clone();
        assert!(matches!(
            rate_bound_pgd(&p, &trace, &x_star, trace.config.plan.s),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn mismatched_reference_support_is_insufficient_data() {
        let (p, trace) = converged_trace(46, Algorithm::Pgd);
        let wrong = FactoredIterate::zero(5, 4);
        match rate_bound_pgd(&p, &trace, &wrong, trace.config.plan.s) {
            Err(Error::InsufficientData { .. }) => {}
            other => panic!("expected insufficient data, got {other:?}"),
        }
    }

    #[test]
    fn corrupted_step_size_exposes_violations() {
        // A deliberately huge s shrinks the bound constant to almost nothing;
        // on a truncated run whose objective is still well above the limit,
        // the checker must flag the early tail iterations.
        let (p, x0) = rate_problem(47);
        let plan = step_size_auto(&p, &x0, GradEstimator::ColumnNorm).unwrap();
        let mut cfg = SolverConfig::new(Algorithm::Pgd, plan, &p);
        cfg.max_iters = 20_000;
        cfg.tol = 1e-11;
        cfg.record_iterates = true;
        let (_, full) = solve(&p, &x0, &cfg).unwrap();
        let x_star = full.final_iterate.clone();

        let t0 = stabilization_onset(&record_sizes(&full.records));
        let mut short_cfg = cfg;
        short_cfg.max_iters = t0 + 5;
        short_cfg.tol = 1e-300;
        let (_, short) = solve(&p, &x0, &short_cfg).unwrap();
        let honest = rate_bound_pgd(&p, &short, &x_star, plan.s).unwrap();
        assert!(honest.passed());
        let corrupted = rate_bound_pgd(&p, &short, &x_star, plan.s * 1e9).unwrap();
        assert!(!corrupted.violations.is_empty());
    }

    #[test]
    fn accelerated_bound_decays_at_the_exact_square_ratio() {
        let v = 3.7;
        let rhs = |m: usize| 4.0 * v / ((m + 1) as f64 * (m + 1) as f64);
        let (m1, m2) = (9usize, 29usize);
        let ratio = rhs(m1) / rhs(m2);
        let expected = ((m2 + 1) as f64 / (m1 + 1) as f64).powi(2);
        assert!((ratio - expected).abs() <= 1e-12 * expected);
    }
}
