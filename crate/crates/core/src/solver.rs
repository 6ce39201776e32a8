//! The three iteration schemes: proximal gradient descent, non-monotone
//! accelerated proximal gradient with support projection, and its monotone
//! variant with an objective acceptance test.

use alloc::vec::Vec;

use crate::error::Error;
use crate::float;
use crate::matrix::Matrix;
use crate::objective::{g_grad, g_value, Problem, StepSizePlan};
use crate::spectral::{hard_threshold, spectral_norm, support_project, FactoredIterate};

/// Which iteration scheme to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    /// Plain proximal gradient descent.
    Pgd,
    /// Accelerated proximal gradient, non-monotone, with support projection.
    ApgNonmonotone,
    /// Accelerated proximal gradient with monotone acceptance test.
    ApgMonotone,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Pgd => "pgd",
            Algorithm::ApgNonmonotone => "apg-nm",
            Algorithm::ApgMonotone => "apg-m",
        }
    }
}

impl core::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Solve parameters. `tol` is the fixed-point residual threshold; the loop
/// stops when the residual falls to it or the iterate index reaches
/// `max_iters`.
#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub plan: StepSizePlan,
    pub max_iters: usize,
    pub tol: f64,
    /// Initial momentum scalar α⁰ for the accelerated methods.
    pub alpha0: f64,
    /// Keep dense iterate snapshots in the trace (needed by the
    /// convergence-rate certificates, off by default for memory).
    pub record_iterates: bool,
}

pub const DEFAULT_MAX_ITERS: usize = 10_000;

/// Default residual threshold 1e−9·max(1, ‖Y‖_F).
pub fn default_tol(p: &Problem) -> f64 {
    1e-9 * 1.0f64.max(p.y().frobenius_norm())
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm, plan: StepSizePlan, p: &Problem) -> Self {
        SolverConfig {
            algorithm,
            plan,
            max_iters: DEFAULT_MAX_ITERS,
            tol: default_tol(p),
            alpha0: 1.0,
            record_iterates: false,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.max_iters < 1 {
            return Err(Error::InvalidParameter { what: "max_iters must be at least 1" });
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidParameter { what: "tol must be positive and finite" });
        }
        if !(self.alpha0 >= 1.0) || !self.alpha0.is_finite() {
            return Err(Error::InvalidParameter { what: "alpha0 must be at least 1" });
        }
        if !(self.plan.s > 0.0) || !self.plan.s.is_finite() {
            return Err(Error::InvalidParameter { what: "step size must be positive and finite" });
        }
        Ok(())
    }
}

/// One row of a solve trace, describing the iterate X^t.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterRecord {
    pub iter: usize,
    /// F(X^t) = g(X^t) + λ·rank(X^t).
    pub objective: f64,
    /// g(X^t).
    pub g_part: f64,
    pub rank: usize,
    /// Equal to rank: supports are descending-order prefixes.
    pub support_size: usize,
    /// ‖X^t − X^{t−1}‖_F; zero on the first record.
    pub step_norm: f64,
    /// ‖X^t − prox step from X^t‖_F, the stopping quantity.
    pub fixpoint_residual: f64,
    /// α^t; None for plain proximal gradient descent.
    pub alpha: Option<f64>,
    /// Monotone variant only: whether this iterate accepted its candidate.
    pub z_accepted: Option<bool>,
}

/// Candidate-sequence row of the monotone variant: F(Z^t) and rank(Z^t).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZRecord {
    pub iter: usize,
    pub objective: f64,
    pub rank: usize,
}

/// Why a solve stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Tolerance,
    MaxIters,
}

/// Dense iterate snapshots, aligned one-to-one with the trace records.
#[derive(Clone, Debug)]
pub struct IterateLog {
    pub x: Vec<Matrix>,
    /// Monotone variant only: candidate iterates Z^t.
    pub z: Option<Vec<Matrix>>,
}

/// Full account of a solve.
#[derive(Clone, Debug)]
pub struct Trace {
    pub records: Vec<IterRecord>,
    /// Monotone variant only: the candidate sequence, aligned with records.
    pub z_records: Vec<ZRecord>,
    pub terminated_by: Termination,
    pub final_iterate: FactoredIterate,
    pub config: SolverConfig,
    /// Iterations where σ_max(∇g at the prox argument) exceeded plan.g,
    /// i.e. the iterate left the sublevel set the step size was sized for.
    pub grad_bound_violations: Vec<usize>,
    pub iterates: Option<IterateLog>,
}

/// α^{t+1} = (√(1 + 4α²) + 1)/2. Satisfies (α')² − α' = α².
pub fn alpha_next(alpha: f64) -> f64 {
    (float::sqrt(1.0 + 4.0 * alpha * alpha) + 1.0) / 2.0
}

/// One prox step: T_θ(X − s·∇g(X)) with θ = √(2λs).
pub fn pgd_step(p: &Problem, x: &FactoredIterate, s: f64) -> Result<FactoredIterate, Error> {
    pgd_step_dense(p, &x.reconstruct(), s)
}

fn pgd_step_dense(p: &Problem, x: &Matrix, s: f64) -> Result<FactoredIterate, Error> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameter { what: "step size must be positive" });
    }
    let grad = g_grad(p, x)?;
    let theta = float::sqrt(2.0 * p.lambda() * s);
    hard_threshold(&x.add_scaled(&grad, -s), theta)
}

/// ‖X − prox step from X‖_F: zero exactly at critical points, the stopping
/// quantity for every scheme.
pub fn fixpoint_residual(p: &Problem, x: &FactoredIterate, s: f64) -> Result<f64, Error> {
    let dense = x.reconstruct();
    fixpoint_residual_dense(p, &dense, s)
}

fn fixpoint_residual_dense(p: &Problem, x: &Matrix, s: f64) -> Result<f64, Error> {
    let next = pgd_step_dense(p, x, s)?;
    Ok(x.sub(&next.reconstruct()).frobenius_norm())
}

/// Dispatches on `cfg.algorithm`.
pub fn solve(
    p: &Problem,
    x0: &FactoredIterate,
    cfg: &SolverConfig,
) -> Result<(FactoredIterate, Trace), Error> {
    match cfg.algorithm {
        Algorithm::Pgd => solve_pgd(p, x0, cfg),
        Algorithm::ApgNonmonotone => solve_apg_nonmonotone(p, x0, cfg),
        Algorithm::ApgMonotone => solve_apg_monotone(p, x0, cfg),
    }
}

struct RunState<'a> {
    p: &'a Problem,
    cfg: &'a SolverConfig,
    theta: f64,
    records: Vec<IterRecord>,
    z_records: Vec<ZRecord>,
    violations: Vec<usize>,
    x_log: Vec<Matrix>,
    z_log: Vec<Matrix>,
}

impl<'a> RunState<'a> {
    fn new(p: &'a Problem, cfg: &'a SolverConfig) -> Self {
        RunState {
            p,
            cfg,
            theta: float::sqrt(2.0 * p.lambda() * cfg.plan.s),
            records: Vec::new(),
            z_records: Vec::new(),
            violations: Vec::new(),
            x_log: Vec::new(),
            z_log: Vec::new(),
        }
    }

    fn push_record(
        &mut self,
        iter: usize,
        g_part: f64,
        rank: usize,
        step_norm: f64,
        fixpoint_residual: f64,
        alpha: Option<f64>,
        z_accepted: Option<bool>,
        x_dense: &Matrix,
    ) {
        self.records.push(IterRecord {
            iter,
            objective: g_part + self.p.lambda() * rank as f64,
            g_part,
            rank,
            support_size: rank,
            step_norm,
            fixpoint_residual,
            alpha,
            z_accepted,
        });
        if self.cfg.record_iterates {
            self.x_log.push(x_dense.clone());
        }
    }

    fn note_grad_norm(&mut self, iter: usize, grad: &Matrix) -> Result<(), Error> {
        let smax = spectral_norm(grad)?;
        if smax > self.cfg.plan.g {
            self.violations.push(iter);
        }
        Ok(())
    }

    fn finish(
        self,
        terminated_by: Termination,
        final_iterate: FactoredIterate,
        with_z: bool,
    ) -> Trace {
        let iterates = if self.cfg.record_iterates {
            Some(IterateLog {
                x: self.x_log,
                z: if with_z { Some(self.z_log) } else { None },
            })
        } else {
            None
        };
        Trace {
            records: self.records,
            z_records: self.z_records,
            terminated_by,
            final_iterate,
            config: *self.cfg,
            grad_bound_violations: self.violations,
            iterates,
        }
    }
}

fn check_inputs(p: &Problem, x0: &FactoredIterate, cfg: &SolverConfig) -> Result<(), Error> {
    cfg.validate()?;
    if x0.shape() != p.x_shape() {
        return Err(Error::ShapeMismatch {
            what: "initial iterate",
            expected: p.x_shape(),
            got: x0.shape(),
        });
    }
    Ok(())
}

/// Plain proximal gradient descent. Records X⁰ as row 0 and every step
/// after it; stops when the fixed-point residual reaches `cfg.tol` or the
/// iterate index reaches `cfg.max_iters`.
pub fn solve_pgd(
    p: &Problem,
    x0: &FactoredIterate,
    cfg: &SolverConfig,
) -> Result<(FactoredIterate, Trace), Error> {
    check_inputs(p, x0, cfg)?;
    let s = cfg.plan.s;
    let mut st = RunState::new(p, cfg);

    let mut x = x0.clone();
    let mut x_dense = x.reconstruct();
    let mut g_cur = g_value(p, &x_dense)?;

    // The prox step from X^t is both the residual at X^t and the next
    // iterate, so each loop turn computes it once.
    let mut t = 0usize;
    loop {
        let grad = g_grad(p, &x_dense)?;
        st.note_grad_norm(t, &grad)?;
        let next = hard_threshold(&x_dense.add_scaled(&grad, -s), st.theta)?;
        let next_dense = next.reconstruct();
        let residual = x_dense.sub(&next_dense).frobenius_norm();

        let step_norm = if t == 0 {
            0.0
        } else {
            // Step into X^t was the previous turn's prox move; for plain
            // descent it equals the previous residual.
            st.records[t - 1].fixpoint_residual
        };
        st.push_record(t, g_cur, x.rank(), step_norm, residual, None, None, &x_dense);

        if residual <= cfg.tol {
            return Ok((x.clone(), st.finish(Termination::Tolerance, x, false)));
        }
        if t >= cfg.max_iters {
            return Ok((x.clone(), st.finish(Termination::MaxIters, x, false)));
        }
        x = next;
        x_dense = next_dense;
        g_cur = g_value(p, &x_dense)?;
        t += 1;
    }
}

/// Non-monotone accelerated scheme: momentum extrapolation, projection onto
/// the current support, then a prox step. Records start at iterate 1
/// (X¹ = X⁰).
pub fn solve_apg_nonmonotone(
    p: &Problem,
    x0: &FactoredIterate,
    cfg: &SolverConfig,
) -> Result<(FactoredIterate, Trace), Error> {
    check_inputs(p, x0, cfg)?;
    let s = cfg.plan.s;
    let mut st = RunState::new(p, cfg);

    let mut x_prev_dense = x0.reconstruct();
    let mut x = x0.clone();
    let mut x_dense = x_prev_dense.clone();
    let mut g_cur = g_value(p, &x_dense)?;
    let mut alpha_prev = cfg.alpha0;
    let mut alpha_cur = alpha_next(alpha_prev);

    let mut residual = fixpoint_residual_dense(p, &x_dense, s)?;
    st.push_record(1, g_cur, x.rank(), 0.0, residual, Some(alpha_cur), None, &x_dense);
    if residual <= cfg.tol {
        return Ok((x.clone(), st.finish(Termination::Tolerance, x, false)));
    }

    let mut t = 1usize;
    while t < cfg.max_iters {
        // U^t = X^t + ((α^{t−1}−1)/α^t)(X^t − X^{t−1}).
        let coeff = (alpha_prev - 1.0) / alpha_cur;
        let u = x_dense.add_scaled(&x_dense.sub(&x_prev_dense), coeff);
        let v = support_project(&u, x.rank())?;
        let v_dense = v.reconstruct();
        let grad = g_grad(p, &v_dense)?;
        st.note_grad_norm(t, &grad)?;
        let next = hard_threshold(&v_dense.add_scaled(&grad, -s), st.theta)?;
        let next_dense = next.reconstruct();

        let step_norm = next_dense.sub(&x_dense).frobenius_norm();
        residual = fixpoint_residual_dense(p, &next_dense, s)?;
        let alpha_after = alpha_next(alpha_cur);
        g_cur = g_value(p, &next_dense)?;
        st.push_record(
            t + 1,
            g_cur,
            next.rank(),
            step_norm,
            residual,
            Some(alpha_after),
            None,
            &next_dense,
        );

        x_prev_dense = x_dense;
        x = next;
        x_dense = next_dense;
        alpha_prev = alpha_cur;
        alpha_cur = alpha_after;

        if residual <= cfg.tol {
            return Ok((x.clone(), st.finish(Termination::Tolerance, x, false)));
        }
        t += 1;
    }
    Ok((x.clone(), st.finish(Termination::MaxIters, x, false)))
}

/// Monotone accelerated scheme: same extrapolation plus a candidate
/// sequence Z, accepted only when it does not increase the objective.
pub fn solve_apg_monotone(
    p: &Problem,
    x0: &FactoredIterate,
    cfg: &SolverConfig,
) -> Result<(FactoredIterate, Trace), Error> {
    check_inputs(p, x0, cfg)?;
    let s = cfg.plan.s;
    let mut st = RunState::new(p, cfg);

    let mut x_prev_dense = x0.reconstruct();
    let mut x = x0.clone();
    let mut x_dense = x_prev_dense.clone();
    let mut z = x0.clone();
    let mut z_dense = x_prev_dense.clone();
    let mut g_cur = g_value(p, &x_dense)?;
    let mut f_cur = g_cur + p.lambda() * x.rank() as f64;
    let mut alpha_prev = cfg.alpha0;
    let mut alpha_cur = alpha_next(alpha_prev);

    let mut residual = fixpoint_residual_dense(p, &x_dense, s)?;
    st.push_record(1, g_cur, x.rank(), 0.0, residual, Some(alpha_cur), None, &x_dense);
    st.z_records.push(ZRecord { iter: 1, objective: f_cur, rank: z.rank() });
    if cfg.record_iterates {
        st.z_log.push(z_dense.clone());
    }
    if residual <= cfg.tol {
        return Ok((x.clone(), st.finish(Termination::Tolerance, x, true)));
    }

    let mut t = 1usize;
    while t < cfg.max_iters {
        // U^t = X^t + ((α^{t−1}−1)/α^t)(X^t − X^{t−1})
        //           + ((α^t−1)/α^t)(Z^t − X^t).
        let c1 = (alpha_prev - 1.0) / alpha_cur;
        let c2 = (alpha_cur - 1.0) / alpha_cur;
        let u = x_dense
            .add_scaled(&x_dense.sub(&x_prev_dense), c1)
            .add_scaled(&z_dense.sub(&x_dense), c2);
        let v = support_project(&u, z.rank())?;
        let v_dense = v.reconstruct();
        let grad = g_grad(p, &v_dense)?;
        st.note_grad_norm(t, &grad)?;
        let z_next = hard_threshold(&v_dense.add_scaled(&grad, -s), st.theta)?;
        let z_next_dense = z_next.reconstruct();

        let g_z = g_value(p, &z_next_dense)?;
        let f_z = g_z + p.lambda() * z_next.rank() as f64;
        let accepted = f_z <= f_cur;

        let alpha_after = alpha_next(alpha_cur);
        st.z_records.push(ZRecord { iter: t + 1, objective: f_z, rank: z_next.rank() });
        if cfg.record_iterates {
            st.z_log.push(z_next_dense.clone());
        }

        x_prev_dense = x_dense.clone();
        if accepted {
            x = z_next.clone();
            x_dense = z_next_dense.clone();
            g_cur = g_z;
            f_cur = f_z;
            residual = fixpoint_residual_dense(p, &x_dense, s)?;
        }
        // A rejected candidate keeps X^{t+1} = X^t, so the residual and
        // objective carry over unchanged.
        let step_norm = x_dense.sub(&x_prev_dense).frobenius_norm();
        st.push_record(
            t + 1,
            g_cur,
            x.rank(),
            step_norm,
            residual,
            Some(alpha_after),
            Some(accepted),
            &x_dense,
        );

        z = z_next;
        z_dense = z_next_dense;
        alpha_prev = alpha_cur;
        alpha_cur = alpha_after;

        if residual <= cfg.tol {
            return Ok((x.clone(), st.finish(Termination::Tolerance, x, true)));
        }
        t += 1;
    }
    Ok((x.clone(), st.finish(Termination::MaxIters, x, true)))
}
