//! The synth, solve, and compare commands.

use std::fs;
use std::path::Path;

use rankprox_core::rng::{gaussian_matrix, substream};
use rankprox_core::{
    default_x0, solve, step_size_auto, step_size_manual, Algorithm, GradEstimator, Matrix,
    SolverConfig, Termination,
};

use crate::bundle::{load_bundle, save_bundle};
use crate::csvio;
use crate::error::CliError;
use crate::svg::{objective_chart, Series};
use crate::tracefile;

#[derive(Clone, Copy)]
pub struct SynthParams {
    pub d: usize,
    pub n: usize,
    pub k: usize,
    pub true_rank: usize,
    pub noise_sigma: f64,
    pub lambda: f64,
    pub seed: u64,
}

/// Samples a bundle's matrices in a fixed order (design, then the two
/// ground-truth factors, then noise) from one substream of the seed.
pub fn synth_matrices(params: &SynthParams) -> Result<(Matrix, Matrix, Matrix), CliError> {
    if params.d == 0 || params.n == 0 || params.k == 0 {
        return Err(CliError::Invalid("dimensions must be positive".into()));
    }
    if params.true_rank > params.n.min(params.k) {
        return Err(CliError::Invalid(format!(
            "true_rank {} exceeds min(n, k) = {}",
            params.true_rank,
            params.n.min(params.k)
        )));
    }
    if !(params.noise_sigma >= 0.0) || !params.noise_sigma.is_finite() {
        return Err(CliError::Invalid("noise_sigma must be nonnegative and finite".into()));
    }
    if !(params.lambda > 0.0) || !params.lambda.is_finite() {
        return Err(CliError::Invalid("lambda must be positive and finite".into()));
    }
    let mut rng = substream(params.seed, "synth", 0);
    let design = gaussian_matrix(&mut rng, params.d, params.n, 1.0);
    let x_true = if params.true_rank == 0 {
        Matrix::zeros(params.n, params.k)
    } else {
        let a = gaussian_matrix(&mut rng, params.n, params.true_rank, 1.0);
        let b = gaussian_matrix(&mut rng, params.k, params.true_rank, 1.0);
        a.matmul(&b.transpose())
    };
    let mut y = design.matmul(&x_true);
    if params.noise_sigma > 0.0 {
        y = y.add(&gaussian_matrix(&mut rng, params.d, params.k, params.noise_sigma));
    }
    Ok((design, x_true, y))
}

pub fn cmd_synth(params: &SynthParams, out_path: &Path) -> Result<(), CliError> {
    let (design, x_true, y) = synth_matrices(params)?;
    save_bundle(out_path, params.lambda, &y, &design, Some(&x_true), params.seed)?;
    println!(
        "wrote {} d={} n={} k={} true_rank={} noise_sigma={} lambda={} seed={}",
        out_path.display(),
        params.d,
        params.n,
        params.k,
        params.true_rank,
        params.noise_sigma,
        params.lambda,
        params.seed
    );
    Ok(())
}

fn termination_name(t: Termination) -> &'static str {
    match t {
        Termination::Tolerance => "tolerance",
        Termination::MaxIters => "max-iters",
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_solve(
    problem_path: &Path,
    algo: Algorithm,
    step: Option<f64>,
    max_iters: Option<usize>,
    tol: Option<f64>,
    trace_out: Option<&Path>,
    x_out: Option<&Path>,
) -> Result<(), CliError> {
    let bundle = load_bundle(problem_path)?;
    let p = &bundle.problem;
    let x0 = default_x0(p)?;
    let plan = match step {
        None => step_size_auto(p, &x0, GradEstimator::ColumnNorm)?,
        Some(s) => step_size_manual(p, &x0, s, GradEstimator::ColumnNorm)?,
    };
    let mut cfg = SolverConfig::new(algo, plan, p);
    if let Some(m) = max_iters {
        cfg.max_iters = m;
    }
    if let Some(t) = tol {
        cfg.tol = t;
    }
    let (x, trace) = solve(p, &x0, &cfg)?;
    if let Some(path) = trace_out {
        tracefile::write_trace(path, &trace)?;
    }
    if let Some(path) = x_out {
        csvio::write_matrix(path, &x.reconstruct())?;
    }
    let last = trace.records.last().expect("trace always has records");
    println!(
        "algo={} objective={} rank={} iters={} terminated={}",
        algo.name(),
        last.objective,
        x.rank(),
        last.iter,
        termination_name(trace.terminated_by)
    );
    Ok(())
}

const COMPARE_COLORS: [&str; 3] = ["#1f77b4", "#ff7f0e", "#2ca02c"];

pub fn cmd_compare(problem_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let bundle = load_bundle(problem_path)?;
    let p = &bundle.problem;
    let x0 = default_x0(p)?;
    let plan = step_size_auto(p, &x0, GradEstimator::ColumnNorm)?;
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;

    let algos = [Algorithm::Pgd, Algorithm::ApgNonmonotone, Algorithm::ApgMonotone];
    let mut combined = String::from("algo,iter,objective,rank\n");
    let mut series = Vec::new();
    let mut finals = Vec::new();
    for (algo, color) in algos.into_iter().zip(COMPARE_COLORS) {
        let cfg = SolverConfig::new(algo, plan, p);
        let (x, trace) = solve(p, &x0, &cfg)?;
        tracefile::write_trace(&out_dir.join(format!("{}.trace.csv", algo.name())), &trace)?;
        for r in &trace.records {
            combined.push_str(&format!("{},{},{},{}\n", algo.name(), r.iter, r.objective, r.rank));
        }
        series.push(Series {
            name: algo.name(),
            color,
            points: trace.records.iter().map(|r| (r.iter, r.objective)).collect(),
        });
        let last = *trace.records.last().expect("trace always has records");
        println!(
            "algo={} objective={} rank={} iters={} terminated={}",
            algo.name(),
            last.objective,
            x.rank(),
            last.iter,
            termination_name(trace.terminated_by)
        );
        finals.push(last.objective);
    }
    let combined_path = out_dir.join("combined.csv");
    fs::write(&combined_path, combined).map_err(|e| CliError::io(&combined_path, e))?;
    let svg_path = out_dir.join("objective.svg");
    fs::write(&svg_path, objective_chart(&series)).map_err(|e| CliError::io(&svg_path, e))?;

    let spread = finals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - finals.iter().cloned().fold(f64::INFINITY, f64::min);
    println!(
        "final objective spread {} (within 1e-6: {})",
        spread,
        if spread <= 1e-6 { "yes" } else { "no" }
    );
    println!("wrote 5 files to {}", out_dir.display());
    Ok(())
}
