//! Independent verification oracles: a brute-force prox by rank search, a
//! Weyl inequality checker, trace segmentation by support, and the lemma
//! checks for support shrinkage and sufficient decrease. None of these call
//! the operators they validate.

use alloc::vec::Vec;

use crate::error::Error;
use crate::matrix::Matrix;
use crate::objective::{g_grad, g_value, Problem};
use crate::rng::substream;
use crate::solver::Trace;
use crate::spectral::FactoredIterate;
use crate::svd;

/// A maximal run of consecutive iterations sharing one support size.
/// The final segment of a trace is open-ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SupportSegment {
    pub support_size: usize,
    pub start_iter: usize,
    /// Inclusive end; None marks the open-ended last segment.
    pub end_iter: Option<usize>,
}

/// Violations found by the support-shrinkage check; empty means the lemma
/// held. Entries are the iterations whose support grew over their
/// predecessor.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ShrinkageReport {
    pub violations: Vec<usize>,
    /// Candidate-sequence violations (monotone accelerated variant only).
    pub z_violations: Vec<usize>,
}

impl ShrinkageReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.z_violations.is_empty()
    }
}

/// Violations of the per-step decrease inequality
/// F(X^{t+1}) ≤ F(X^t) − (1/(2s) − L/2)·‖X^{t+1}−X^t‖²_F.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DecreaseReport {
    /// Iterations whose record violated the inequality beyond the slack.
    pub violations: Vec<usize>,
    /// Absolute slack used: 1e−8·max(1, F at the first record).
    pub slack: f64,
    /// The coefficient 1/(2s) − L/2 in front of the squared step.
    pub coefficient: f64,
}

impl DecreaseReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustive prox for the rank penalty: for every rank r the best
/// approximation costs λ·s·r + ½·Σ_{i>r} σ_i², and the cheapest rank wins,
/// ties toward smaller r. Uses only the SVD and scalar arithmetic.
pub fn prox_rank_bruteforce(m: &Matrix, lambda_s: f64) -> Result<FactoredIterate, Error> {
    if !(lambda_s > 0.0) || !lambda_s.is_finite() {
        return Err(Error::InvalidParameter {
            what: "prox weight lambda*s must be positive and finite",
        });
    }
    let f = svd::svd(m)?;
    let p = f.sigma().len();
    let mut best_r = 0usize;
    let mut best_cost = f64::INFINITY;
    for r in 0..=p {
        let tail: f64 = f.sigma()[r..].iter().map(|s| s * s).sum();
        let cost = lambda_s * r as f64 + 0.5 * tail;
        if cost < best_cost {
            best_cost = cost;
            best_r = r;
        }
    }
    Ok(FactoredIterate::from_factors(&f, best_r))
}

/// σ_{i+j−1}(A+B) ≤ σ_i(A) + σ_j(B), indices 1-based, with a relative
/// tolerance scaled by the largest singular values involved.
pub fn weyl_verify(a: &Matrix, b: &Matrix, i: usize, j: usize) -> Result<bool, Error> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            what: "weyl operands",
            expected: a.shape(),
            got: b.shape(),
        });
    }
    let p = a.rows().min(a.cols());
    if i < 1 || j < 1 || i + j - 1 > p {
        return Err(Error::OutOfRange {
            what: "weyl singular value index i+j-1",
            value: i + j - 1,
            max: p,
        });
    }
    let sa = svd::singular_values(a)?;
    let sb = svd::singular_values(b)?;
    let ssum = svd::singular_values(&a.add(b))?;
    let tol = 1e-10 * (sa[0] + sb[0]);
    Ok(ssum[i + j - 2] <= sa[i - 1] + sb[j - 1] + tol)
}

/// Groups a trace into segments of constant support size and verifies the
/// segment structure: sizes strictly decrease across segments, segments
/// partition the iteration range, and only the last is open-ended. A
/// support that grows anywhere is a property violation.
pub fn segment_trace(trace: &Trace) -> Result<Vec<SupportSegment>, Error> {
    let records = &trace.records;
    if records.is_empty() {
        return Err(Error::InsufficientData {
            what: alloc::string::String::from("trace has no records"),
        });
    }
    let mut segments: Vec<SupportSegment> = Vec::new();
    let mut current = SupportSegment {
        support_size: records[0].support_size,
        start_iter: records[0].iter,
        end_iter: None,
    };
    for w in records.windows(2) {
        let (prev, next) = (&w[0], &w[1]);
        if next.support_size > prev.support_size {
            return Err(Error::PropertyViolation {
                what: "support grew between iterations",
                iter: next.iter,
            });
        }
        if next.support_size < prev.support_size {
            current.end_iter = Some(prev.iter);
            segments.push(current);
            current = SupportSegment {
                support_size: next.support_size,
                start_iter: next.iter,
                end_iter: None,
            };
        }
    }
    segments.push(current);
    Ok(segments)
}

/// Lists every iteration whose support grew over its predecessor, for both
/// the main sequence and (when present) the candidate sequence.
pub fn check_support_shrinkage(trace: &Trace) -> ShrinkageReport {
    let mut report = ShrinkageReport::default();
    for w in trace.records.windows(2) {
        if w[1].support_size > w[0].support_size {
            report.violations.push(w[1].iter);
        }
    }
    for w in trace.z_records.windows(2) {
        if w[1].rank > w[0].rank {
            report.z_violations.push(w[1].iter);
        }
    }
    report
}

/// Checks F(X^{t+1}) ≤ F(X^t) − (1/(2s) − L/2)·‖X^{t+1}−X^t‖²_F on every
/// consecutive record pair, allowing 1e−8·max(1, F at start) slack.
/// Meaningful for the schemes with a per-step decrease guarantee; the
/// non-monotone accelerated scheme has none and should be skipped by the
/// caller.
pub fn check_sufficient_decrease(trace: &Trace, s: f64, l: f64) -> DecreaseReport {
    let coefficient = 1.0 / (2.0 * s) - l / 2.0;
    let f0 = trace.records.first().map_or(0.0, |r| r.objective);
    let slack = 1e-8 * 1.0f64.max(f0);
    let mut violations = Vec::new();
    for w in trace.records.windows(2) {
        let allowed = w[0].objective - coefficient * w[1].step_norm * w[1].step_norm + slack;
        if w[1].objective > allowed {
            violations.push(w[1].iter);
        }
    }
    DecreaseReport { violations, slack, coefficient }
}

/// Lists iterations where the objective rose by more than `slack`.
pub fn check_monotonicity(trace: &Trace, slack: f64) -> Vec<usize> {
    let mut violations = Vec::new();
    for w in trace.records.windows(2) {
        if w[1].objective > w[0].objective + slack {
            violations.push(w[1].iter);
        }
    }
    violations
}

/// Central-difference gradient check: max entrywise deviation between the
/// analytic gradient and finite differences, divided by max(1, ‖∇g‖_F).
/// All entries are probed when there are at most 64; otherwise a fixed
/// 64-entry subset chosen by an internal seed.
pub fn grad_fd_check(p: &Problem, x: &Matrix, h: f64) -> Result<f64, Error> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter {
            what: "finite-difference step must be positive and finite",
        });
    }
    let grad = g_grad(p, x)?;
    let (n, k) = x.shape();
    let total = n * k;
    let entries: Vec<usize> = if total <= 64 {
        (0..total).collect()
    } else {
        let mut rng = substream(0xFD, "grad-fd-subset", 0);
        let mut chosen = Vec::with_capacity(64);
        while chosen.len() < 64 {
            let idx = (rand::RngCore::next_u64(&mut rng) % total as u64) as usize;
            if !chosen.contains(&idx) {
                chosen.push(idx);
            }
        }
        chosen
    };
    let mut worst = 0.0f64;
    for idx in entries {
        let (i, j) = (idx / k, idx % k);
        let mut xp = x.clone();
        xp.set(i, j, x.get(i, j) + h);
        let mut xm = x.clone();
        xm.set(i, j, x.get(i, j) - h);
        let fd = (g_value(p, &xp)? - g_value(p, &xm)?) / (2.0 * h);
        worst = worst.max(crate::float::abs(fd - grad.get(i, j)));
    }
    Ok(worst / 1.0f64.max(grad.frobenius_norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{default_x0, step_size_auto, GradEstimator};
    use crate::rng::gaussian_matrix;
    use crate::solver::{solve, Algorithm, SolverConfig};
    use crate::spectral::hard_threshold;

    fn synthetic(seed: u64, lambda: f64) -> (Problem, FactoredIterate) {
        let d = gaussian_matrix(&mut substream(seed, "oracle-d", 0), 6, 5, 1.0);
        let a = gaussian_matrix(&mut substream(seed, "oracle-a", 0), 5, 2, 1.0);
        let b = gaussian_matrix(&mut substream(seed, "oracle-b", 0), 4, 2, 1.0);
        let noise = gaussian_matrix(&mut substream(seed, "oracle-e", 0), 6, 4, 0.05);
        let y = d.matmul(&a.matmul(&b.transpose())).add(&noise);
        let p = Problem::new(y, d, lambda).unwrap();
        let x0 = default_x0(&p).unwrap();
        (p, x0)
    }

    fn solved_trace(seed: u64, algorithm: Algorithm) -> (Problem, Trace) {
        let (p, x0) = synthetic(seed, 2.0);
        let plan = step_size_auto(&p, &x0, GradEstimator::ColumnNorm).unwrap();
        let mut cfg = SolverConfig::new(algorithm, plan, &p);
        cfg.max_iters = 200;
        let (_, trace) = solve(&p, &x0, &cfg).unwrap();
        (p, trace)
    }

    #[test]
    fn bruteforce_prox_picks_the_cheapest_rank() {
        // Costs for diag(3,1,0.5) at λs=2: 5.125, 2.625, 4.125, 6 → rank 1.
        let m = Matrix::diag(&[3.0, 1.0, 0.5]);
        let f = prox_rank_bruteforce(&m, 2.0).unwrap();
        assert_eq!(f.rank(), 1);
        let back = f.reconstruct();
        assert!(back.sub(&Matrix::diag(&[3.0, 0.0, 0.0])).frobenius_norm() <= 1e-12);
    }

    #[test]
    fn bruteforce_prox_zero_matrix_is_rank_zero() {
        let f = prox_rank_bruteforce(&Matrix::zeros(3, 2), 0.5).unwrap();
        assert_eq!(f.rank(), 0);
    }

    #[test]
    fn bruteforce_prox_tie_drops_the_value() {
        // σ = sqrt(2λs) makes keep and drop cost the same; smaller rank wins,
        // matching the thresholding tie rule.
        let lambda_s = 0.5f64;
        let sigma = (2.0 * lambda_s).sqrt();
        let m = Matrix::diag(&[sigma]);
        let f = prox_rank_bruteforce(&m, lambda_s).unwrap();
        assert_eq!(f.rank(), 0);
        let t = hard_threshold(&m, sigma).unwrap();
        assert_eq!(t.rank(), 0);
    }

    #[test]
    fn bruteforce_prox_matches_thresholding_on_seeded_matrices() {
        for seed in 0..50u64 {
            let rows = 2 + (seed % 7) as usize;
            let cols = 2 + (seed % 5) as usize;
            let m = gaussian_matrix(&mut substream(seed, "prox-eq", 0), rows, cols, 1.0);
            for lambda_s in [0.01f64, 0.1, 1.0, 5.0] {
                let theta = (2.0 * lambda_s).sqrt();
                let via_threshold = hard_threshold(&m, theta).unwrap();
                let via_search = prox_rank_bruteforce(&m, lambda_s).unwrap();
                assert_eq!(via_threshold.rank(), via_search.rank(), "seed {seed} λs {lambda_s}");
                let diff = via_threshold
                    .reconstruct()
                    .sub(&via_search.reconstruct())
                    .frobenius_norm();
                assert!(diff <= 1e-9, "seed {seed} λs {lambda_s}: {diff}");
            }
        }
    }

    #[test]
    fn weyl_holds_on_hand_cases() {
        let i2 = Matrix::identity(2);
        assert!(weyl_verify(&i2, &i2, 1, 1).unwrap());
        let a = Matrix::diag(&[1.0, 0.0]);
        let b = Matrix::diag(&[0.0, 1.0]);
        assert!(weyl_verify(&a, &b, 1, 2).unwrap());
    }

    #[test]
    fn weyl_rejects_bad_indices_and_shapes() {
        let i2 = Matrix::identity(2);
        assert!(matches!(
            weyl_verify(&i2, &i2, 2, 2),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            weyl_verify(&i2, &i2, 0, 1),
            Err(Error::OutOfRange { .. })
        ));
        let i3 = Matrix::identity(3);
        assert!(matches!(
            weyl_verify(&i2, &i3, 1, 1),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn weyl_holds_on_sampled_pairs() {
        for seed in 0..200u64 {
            let rows = 2 + (seed % 4) as usize;
            let cols = 2 + (seed % 3) as usize;
            let a = gaussian_matrix(&mut substream(seed, "weyl-a", 0), rows, cols, 1.0);
            let b = gaussian_matrix(&mut substream(seed, "weyl-b", 0), rows, cols, 1.0);
            let p = rows.min(cols);
            for i in 1..=p {
                for j in 1..=p {
                    if i + j - 1 <= p {
                        assert!(weyl_verify(&a, &b, i, j).unwrap(), "seed {seed} i={i} j={j}");
                    }
                }
            }
        }
    }

    fn trace_with_ranks(ranks: &[usize]) -> Trace {
        let (p, x0) = synthetic(1, 2.0);
        let plan = step_size_auto(&p, &x0, GradEstimator::ColumnNorm).unwrap();
        let cfg = SolverConfig::new(Algorithm::Pgd, plan, &p);
        let records = ranks
            .iter()
            .enumerate()
            .map(|(t, &r)| crate::solver::IterRecord {
                iter: t,
                objective: 1.0 + r as f64,
                g_part: 1.0,
                rank: r,
                support_size: r,
                step_norm: 0.0,
                fixpoint_residual: 1.0,
                alpha: None,
                z_accepted: None,
            })
            .collect();
        Trace {
            records,
            z_records: alloc::vec::Vec::new(),
            terminated_by: crate::solver::Termination::MaxIters,
            final_iterate: x0,
            config: cfg,
            grad_bound_violations: alloc::vec::Vec::new(),
            iterates: None,
        }
    }

    #[test]
    fn segments_group_by_support_size() {
        let trace = trace_with_ranks(&[3, 3, 2, 1, 1, 1]);
        let segments = segment_trace(&trace).unwrap();
        assert_eq!(
            segments,
            alloc::vec![
                SupportSegment { support_size: 3, start_iter: 0, end_iter: Some(1) },
                SupportSegment { support_size: 2, start_iter: 2, end_iter: Some(2) },
                SupportSegment { support_size: 1, start_iter: 3, end_iter: None },
            ]
        );
    }

    #[test]
    fn constant_rank_trace_is_one_segment() {
        let trace = trace_with_ranks(&[2, 2, 2, 2]);
        let segments = segment_trace(&trace).unwrap();
        assert_eq!(segments.len(), 1);
        assert_eq!(segments[0].end_iter, None);
    }

    #[test]
    fn growing_support_is_a_property_violation() {
        let trace = trace_with_ranks(&[2, 1, 3]);
        match segment_trace(&trace) {
            Err(Error::PropertyViolation { iter, .. }) => assert_eq!(iter, 2),
            other => panic!("expected property violation, got {other:?}"),
        }
        let report = check_support_shrinkage(&trace);
        assert_eq!(report.violations, alloc::vec![2]);
    }

    #[test]
    fn solver_traces_segment_cleanly_and_shrink() {
        for algorithm in [Algorithm::Pgd, Algorithm::ApgNonmonotone, Algorithm::ApgMonotone] {
            let (_, trace) = solved_trace(5, algorithm);
            let segments = segment_trace(&trace).unwrap();
            assert!(segments.len() <= trace.records[0].support_size + 1);
            assert!(check_support_shrinkage(&trace).passed());
        }
    }

    #[test]
    fn pgd_satisfies_sufficient_decrease() {
        let (_, trace) = solved_trace(6, Algorithm::Pgd);
        let report = check_sufficient_decrease(&trace, trace.config.plan.s, trace.config.plan.l);
        assert!(report.passed(), "violations at {:?}", report.violations);
        assert!(report.coefficient > 0.0);
    }

    #[test]
    fn decrease_check_flags_constructed_violation() {
        let mut trace = trace_with_ranks(&[2, 2, 2]);
        trace.records[1].objective = trace.records[0].objective + 1.0;
        trace.records[1].step_norm = 0.1;
        let report = check_sufficient_decrease(&trace, 0.1, 2.0);
        assert_eq!(report.violations, alloc::vec![1]);
        assert!(check_monotonicity(&trace, 1e-12).contains(&1));
    }

    #[test]
    fn fd_gradient_matches_on_identity_case() {
        let p = Problem::new(Matrix::zeros(2, 2), Matrix::identity(2), 1.0).unwrap();
        let err = grad_fd_check(&p, &Matrix::identity(2), 1e-5).unwrap();
        assert!(err <= 1e-8, "{err}");
    }

    #[test]
    fn fd_gradient_matches_on_seeded_problems() {
        for seed in 0..20u64 {
            let (p, _) = synthetic(seed, 1.0);
            let x = gaussian_matrix(&mut substream(seed, "fd-x", 0), 5, 4, 1.0);
            // The loss is quadratic in X, so central differences are exact up
            // to rounding at any step width.
            for h in [1e-7, 1e-5, 1e-1] {
                let err = grad_fd_check(&p, &x, h).unwrap();
                assert!(err <= 1e-6, "seed {seed} h {h}: {err}");
            }
        }
    }

    #[test]
    fn fd_check_uses_subset_on_large_problems() {
        let d = gaussian_matrix(&mut substream(30, "fd-big-d", 0), 12, 10, 1.0);
        let y = gaussian_matrix(&mut substream(30, "fd-big-y", 0), 12, 9, 1.0);
        let p = Problem::new(y, d, 1.0).unwrap();
        let x = gaussian_matrix(&mut substream(30, "fd-big-x", 0), 10, 9, 1.0);
        let err = grad_fd_check(&p, &x, 1e-5).unwrap();
        assert!(err <= 1e-6, "{err}");
    }
}
