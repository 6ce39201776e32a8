//! The rank-regularized least-squares objective F(X) = ‖Y − DX‖²_F + λ·rank(X),
//! its gradient, the Lipschitz and gradient-norm bounds, and the step-size rule.

use crate::error::Error;
use crate::matrix::Matrix;
use crate::spectral::{spectral_norm, FactoredIterate};

/// Problem data: observations Y (d×k), dictionary D (d×n), weight λ > 0.
/// The unknown X is n×k.
#[derive(Clone, Debug)]
pub struct Problem {
    y: Matrix,
    d: Matrix,
    lambda: f64,
}

impl Problem {
    pub fn new(y: Matrix, d: Matrix, lambda: f64) -> Result<Self, Error> {
        if y.rows() != d.rows() {
            return Err(Error::ShapeMismatch {
                what: "observation and dictionary row counts",
                expected: (d.rows(), y.cols()),
                got: (y.rows(), y.cols()),
            });
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter {
                what: "lambda must be positive and finite",
            });
        }
        Ok(Problem { y, d, lambda })
    }

    pub fn y(&self) -> &Matrix {
        &self.y
    }

    pub fn d(&self) -> &Matrix {
        &self.d
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Shape (n, k) of the unknown.
    pub fn x_shape(&self) -> (usize, usize) {
        (self.d.cols(), self.y.cols())
    }

    fn check_x_shape(&self, x: &Matrix, what: &'static str) -> Result<(), Error> {
        if x.shape() != self.x_shape() {
            return Err(Error::ShapeMismatch {
                what,
                expected: self.x_shape(),
                got: x.shape(),
            });
        }
        Ok(())
    }
}

/// Minimal interface for the smooth part g of the objective. Only the
/// squared loss ships; the solvers are written against these three entries.
pub trait SmoothLoss {
    fn value(&self, p: &Problem, x: &Matrix) -> Result<f64, Error>;
    fn grad(&self, p: &Problem, x: &Matrix) -> Result<Matrix, Error>;
    fn lipschitz_bound(&self, p: &Problem) -> Result<f64, Error>;
}

/// g(X) = ‖Y − DX‖²_F.
#[derive(Clone, Copy, Debug, Default)]
pub struct SquaredLoss;

impl SmoothLoss for SquaredLoss {
    fn value(&self, p: &Problem, x: &Matrix) -> Result<f64, Error> {
        p.check_x_shape(x, "loss argument")?;
        let r = p.y.sub(&p.d.matmul(x));
        let n = r.frobenius_norm();
        Ok(n * n)
    }

    fn grad(&self, p: &Problem, x: &Matrix) -> Result<Matrix, Error> {
        p.check_x_shape(x, "gradient argument")?;
        let r = p.d.matmul(x).sub(&p.y);
        Ok(p.d.transpose().matmul(&r).scale(2.0))
    }

    fn lipschitz_bound(&self, p: &Problem) -> Result<f64, Error> {
        let smax = spectral_norm(&p.d)?;
        if smax == 0.0 {
            return Err(Error::DegenerateProblem {
                what: "dictionary is all zero",
            });
        }
        Ok(2.0 * smax * smax)
    }
}

/// ‖Y − DX‖²_F.
pub fn g_value(p: &Problem, x: &Matrix) -> Result<f64, Error> {
    SquaredLoss.value(p, x)
}

/// ∇g(X) = 2·Dᵀ(DX − Y), shape n×k.
pub fn g_grad(p: &Problem, x: &Matrix) -> Result<Matrix, Error> {
    SquaredLoss.grad(p, x)
}

/// F(X) = g(X) + λ·rank(X).
pub fn f_value(p: &Problem, x: &FactoredIterate) -> Result<f64, Error> {
    let dense = x.reconstruct();
    p.check_x_shape(&dense, "objective argument")?;
    Ok(g_value(p, &dense)? + p.lambda * x.rank() as f64)
}

/// L = 2·σ_max(D)²: ‖∇g(X₁) − ∇g(X₂)‖_F ≤ L·‖X₁ − X₂‖_F everywhere.
pub fn lipschitz_bound(p: &Problem) -> Result<f64, Error> {
    SquaredLoss.lipschitz_bound(p)
}

/// Which norm of D feeds the gradient bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GradEstimator {
    /// G = 2·max_col‖D·,ᵢ‖₂·√F(X⁰): the sharper bound, default.
    #[default]
    ColumnNorm,
    /// G = 2·σ_max(D)·√F(X⁰): conservative.
    SpectralNorm,
}

/// Bound on σ_max(∇g(X)) over the sublevel set {X : F(X) ≤ F(X⁰)}.
pub fn grad_bound(p: &Problem, x0: &FactoredIterate, estimator: GradEstimator) -> Result<f64, Error> {
    let f0 = f_value(p, x0)?;
    let d_norm = match estimator {
        GradEstimator::ColumnNorm => p.d.max_column_norm(),
        GradEstimator::SpectralNorm => spectral_norm(&p.d)?,
    };
    Ok(2.0 * d_norm * float_sqrt(f0))
}

fn float_sqrt(x: f64) -> f64 {
    crate::float::sqrt(x)
}

/// How the step size was chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepMode {
    Auto,
    Manual,
}

/// The step size together with the bounds that justified it.
#[derive(Clone, Copy, Debug)]
pub struct StepSizePlan {
    /// Lipschitz bound L = 2σ_max(D)².
    pub l: f64,
    /// Gradient bound G on the initial sublevel set.
    pub g: f64,
    /// Chosen step size, always > 0.
    pub s: f64,
    pub mode: StepMode,
    pub estimator: GradEstimator,
    /// Whether s ≤ min(2λ/G², 1/L); true by construction in auto mode.
    pub within_lemma_bound: bool,
}

/// s = min(2λ/G², 1/L) with the bounds computed from the problem.
pub fn step_size_auto(
    p: &Problem,
    x0: &FactoredIterate,
    estimator: GradEstimator,
) -> Result<StepSizePlan, Error> {
    let l = lipschitz_bound(p)?;
    let g = grad_bound(p, x0, estimator)?;
    if g == 0.0 {
        return Err(Error::DegenerateProblem {
            what: "gradient bound is zero, objective already stationary",
        });
    }
    let s = (2.0 * p.lambda / (g * g)).min(1.0 / l);
    Ok(StepSizePlan {
        l,
        g,
        s,
        mode: StepMode::Auto,
        estimator,
        within_lemma_bound: true,
    })
}

/// Records a user-chosen step size, flagging whether it satisfies the
/// s ≤ min(2λ/G², 1/L) condition the decrease guarantees assume.
pub fn step_size_manual(
    p: &Problem,
    x0: &FactoredIterate,
    s: f64,
    estimator: GradEstimator,
) -> Result<StepSizePlan, Error> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter {
            what: "manual step size must be positive and finite",
        });
    }
    let l = lipschitz_bound(p)?;
    let g = grad_bound(p, x0, estimator)?;
    let cap = if g == 0.0 {
        1.0 / l
    } else {
        (2.0 * p.lambda / (g * g)).min(1.0 / l)
    };
    Ok(StepSizePlan {
        l,
        g,
        s,
        mode: StepMode::Manual,
        estimator,
        within_lemma_bound: s <= cap,
    })
}

/// Default starting point X⁰ = DᵀY / σ_max(D)², in factored form.
pub fn default_x0(p: &Problem) -> Result<FactoredIterate, Error> {
    let smax = spectral_norm(&p.d)?;
    if smax == 0.0 {
        return Err(Error::DegenerateProblem {
            what: "dictionary is all zero",
        });
    }
    let x0 = p.d.transpose().matmul(&p.y).scale(1.0 / (smax * smax));
    FactoredIterate::from_matrix(&x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svd;
    use alloc::vec::Vec;

    fn lcg_stream(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let x = ((state >> 11) as f64) / ((1u64 << 53) as f64);
            2.0 * x - 1.0
        }
    }

    fn lcg_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut next = lcg_stream(seed);
        let data: Vec<f64> = (0..rows * cols).map(|_| next()).collect();
        Matrix::from_vec(rows, cols, data).unwrap()
    }

    fn toy_problem(d_rows: usize, n: usize, k: usize, lambda: f64, seed: u64) -> Problem {
        let d = lcg_matrix(d_rows, n, seed);
        let y = lcg_matrix(d_rows, k, seed.wrapping_add(1));
        Problem::new(y, d, lambda).unwrap()
    }

    #[test]
    fn problem_validates_shapes_and_lambda() {
        let d = Matrix::identity(2);
        let y = Matrix::zeros(3, 2);
        assert!(matches!(
            Problem::new(y, d.clone(), 1.0),
            Err(Error::ShapeMismatch { .. })
        ));
        let y = Matrix::zeros(2, 2);
        assert!(matches!(
            Problem::new(y.clone(), d.clone(), 0.0),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(Problem::new(y, d, 1.0).is_ok());
    }

    #[test]
    fn g_value_identity_dictionary() {
        let p = Problem::new(Matrix::zeros(2, 2), Matrix::identity(2), 1.0).unwrap();
        let g = g_value(&p, &Matrix::identity(2)).unwrap();
        assert!((g - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn g_value_zero_at_exact_fit() {
        let d = lcg_matrix(4, 3, 41);
        let x = lcg_matrix(3, 2, 42);
        let y = d.matmul(&x);
        let p = Problem::new(y, d, 1.0).unwrap();
        assert!(g_value(&p, &x).unwrap() <= 1e-24);
    }

    #[test]
    fn g_value_matches_entrywise_recomputation() {
        let p = toy_problem(5, 4, 3, 1.0, 43);
        let x = lcg_matrix(4, 3, 44);
        let fast = g_value(&p, &x).unwrap();
        let mut slow = 0.0;
        for i in 0..5 {
            for j in 0..3 {
                let mut dx = 0.0;
                for l in 0..4 {
                    dx += p.d().get(i, l) * x.get(l, j);
                }
                let r = p.y().get(i, j) - dx;
                slow += r * r;
            }
        }
        assert!((fast - slow).abs() <= 1e-12 * slow.max(1.0));
    }

    #[test]
    fn grad_identity_dictionary_is_twice_x() {
        let p = Problem::new(Matrix::zeros(3, 2), Matrix::identity(3), 1.0).unwrap();
        let x = lcg_matrix(3, 2, 45);
        let g = g_grad(&p, &x).unwrap();
        assert!(g.sub(&x.scale(2.0)).frobenius_norm() <= 1e-12);
    }

    #[test]
    fn grad_vanishes_at_exact_fit() {
        let d = lcg_matrix(4, 3, 46);
        let x = lcg_matrix(3, 2, 47);
        let p = Problem::new(d.matmul(&x), d, 1.0).unwrap();
        assert!(g_grad(&p, &x).unwrap().frobenius_norm() <= 1e-12);
    }

    #[test]
    fn grad_matches_central_differences() {
        let p = toy_problem(5, 4, 3, 1.0, 48);
        let x = lcg_matrix(4, 3, 49);
        let g = g_grad(&p, &x).unwrap();
        let h = 1e-5;
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..3 {
                let mut xp = x.clone();
                xp.set(i, j, x.get(i, j) + h);
                let mut xm = x.clone();
                xm.set(i, j, x.get(i, j) - h);
                let fd = (g_value(&p, &xp).unwrap() - g_value(&p, &xm).unwrap()) / (2.0 * h);
                worst = worst.max((fd - g.get(i, j)).abs());
            }
        }
        assert!(worst / g.frobenius_norm().max(1.0) <= 1e-6, "{worst}");
    }

    #[test]
    fn f_value_adds_rank_penalty() {
        let p = Problem::new(Matrix::zeros(2, 2), Matrix::identity(2), 1.0).unwrap();
        let x = FactoredIterate::from_matrix(&Matrix::identity(2)).unwrap();
        assert!((f_value(&p, &x).unwrap() - 4.0).abs() <= 1e-12);
    }

    #[test]
    fn f_value_of_zero_iterate_is_observation_energy() {
        let p = toy_problem(4, 3, 2, 0.7, 50);
        let z = FactoredIterate::zero(3, 2);
        let expected = p.y().frobenius_norm().powi(2);
        assert!((f_value(&p, &z).unwrap() - expected).abs() <= 1e-12 * expected.max(1.0));
    }

    #[test]
    fn lipschitz_identity_and_scaled_identity() {
        let p = Problem::new(Matrix::zeros(2, 1), Matrix::identity(2), 1.0).unwrap();
        assert!((lipschitz_bound(&p).unwrap() - 2.0).abs() <= 1e-12);
        let p2 = Problem::new(Matrix::zeros(2, 1), Matrix::identity(2).scale(2.0), 1.0).unwrap();
        assert!((lipschitz_bound(&p2).unwrap() - 8.0).abs() <= 1e-11);
    }

    #[test]
    fn lipschitz_rejects_zero_dictionary() {
        let p = Problem::new(Matrix::zeros(2, 1), Matrix::zeros(2, 2), 1.0).unwrap();
        assert!(matches!(
            lipschitz_bound(&p),
            Err(Error::DegenerateProblem { .. })
        ));
    }

    #[test]
    fn lipschitz_bounds_gradient_differences() {
        let p = toy_problem(5, 4, 3, 1.0, 51);
        let l = lipschitz_bound(&p).unwrap();
        let mut next = lcg_stream(52);
        for _ in 0..1000 {
            let x1 = {
                let data: Vec<f64> = (0..12).map(|_| 3.0 * next()).collect();
                Matrix::from_vec(4, 3, data).unwrap()
            };
            let x2 = {
                let data: Vec<f64> = (0..12).map(|_| 3.0 * next()).collect();
                Matrix::from_vec(4, 3, data).unwrap()
            };
            let dg = g_grad(&p, &x1)
                .unwrap()
                .sub(&g_grad(&p, &x2).unwrap())
                .frobenius_norm();
            let dx = x1.sub(&x2).frobenius_norm();
            assert!(dg <= l * dx * (1.0 + 1e-12), "{dg} > {l}*{dx}");
        }
    }

    #[test]
    fn grad_bound_direct_substitution() {
        // Max column norm 1, F(X0) = ‖Y‖² = 1, rank 0: G = 2.
        let mut y = Matrix::zeros(2, 1);
        y.set(0, 0, 1.0);
        let p = Problem::new(y, Matrix::identity(2), 3.0).unwrap();
        let x0 = FactoredIterate::zero(2, 1);
        let g = grad_bound(&p, &x0, GradEstimator::ColumnNorm).unwrap();
        assert!((g - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn zero_observations_give_zero_bound_and_auto_mode_rejects() {
        let p = Problem::new(Matrix::zeros(2, 1), Matrix::identity(2), 1.0).unwrap();
        let x0 = FactoredIterate::zero(2, 1);
        assert_eq!(grad_bound(&p, &x0, GradEstimator::ColumnNorm).unwrap(), 0.0);
        assert!(matches!(
            step_size_auto(&p, &x0, GradEstimator::ColumnNorm),
            Err(Error::DegenerateProblem { .. })
        ));
    }

    #[test]
    fn spectral_estimator_dominates_column_estimator() {
        // σ_max(D) ≥ every column norm, so the spectral bound is looser.
        for seed in 60..70u64 {
            let p = toy_problem(5, 4, 3, 1.0, seed);
            let x0 = default_x0(&p).unwrap();
            let gc = grad_bound(&p, &x0, GradEstimator::ColumnNorm).unwrap();
            let gs = grad_bound(&p, &x0, GradEstimator::SpectralNorm).unwrap();
            assert!(gs >= gc - 1e-12);
        }
    }

    #[test]
    fn step_size_auto_known_values() {
        // L = 2, G = 2, λ = 1: s = min(0.5, 0.5).
        let mut y = Matrix::zeros(2, 1);
        y.set(0, 0, 1.0);
        let p = Problem::new(y, Matrix::identity(2), 1.0).unwrap();
        let x0 = FactoredIterate::zero(2, 1);
        let plan = step_size_auto(&p, &x0, GradEstimator::ColumnNorm).unwrap();
        assert!((plan.s - 0.5).abs() <= 1e-12);
        assert_eq!(plan.mode, StepMode::Auto);
        assert!(plan.within_lemma_bound);

        // L = 4, G = 2, λ = 1: s = min(0.5, 0.25) = 0.25.
        let mut y = Matrix::zeros(2, 1);
        y.set(0, 0, core::f64::consts::FRAC_1_SQRT_2);
        let d = Matrix::identity(2).scale(core::f64::consts::SQRT_2);
        let p = Problem::new(y, d, 1.0).unwrap();
        let x0 = FactoredIterate::zero(2, 1);
        let plan = step_size_auto(&p, &x0, GradEstimator::ColumnNorm).unwrap();
        assert!((plan.l - 4.0).abs() <= 1e-12);
        assert!((plan.g - 2.0).abs() <= 1e-12);
        assert!((plan.s - 0.25).abs() <= 1e-12);
    }

    #[test]
    fn step_size_auto_is_exactly_the_formula() {
        for seed in 70..90u64 {
            let p = toy_problem(5, 4, 3, 0.8, seed);
            let x0 = default_x0(&p).unwrap();
            let plan = step_size_auto(&p, &x0, GradEstimator::ColumnNorm).unwrap();
            let expect = (2.0 * p.lambda() / (plan.g * plan.g)).min(1.0 / plan.l);
            assert_eq!(plan.s, expect);
            assert!(plan.s > 0.0);
            assert!(plan.s * plan.g * plan.g <= 2.0 * p.lambda() * (1.0 + 1e-12));
            assert!(plan.s * plan.l <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn step_size_manual_flags_oversized_steps() {
        let p = toy_problem(5, 4, 3, 0.8, 91);
        let x0 = default_x0(&p).unwrap();
        let auto = step_size_auto(&p, &x0, GradEstimator::ColumnNorm).unwrap();
        let ok = step_size_manual(&p, &x0, auto.s / 2.0, GradEstimator::ColumnNorm).unwrap();
        assert!(ok.within_lemma_bound);
        assert_eq!(ok.mode, StepMode::Manual);
        let big = step_size_manual(&p, &x0, auto.s * 10.0, GradEstimator::ColumnNorm).unwrap();
        assert!(!big.within_lemma_bound);
        assert!(matches!(
            step_size_manual(&p, &x0, 0.0, GradEstimator::ColumnNorm),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn g_is_convex_along_segments() {
        let p = toy_problem(5, 4, 3, 1.0, 92);
        let mut next = lcg_stream(93);
        for _ in 0..200 {
            let x1 = {
                let data: Vec<f64> = (0..12).map(|_| 2.0 * next()).collect();
                Matrix::from_vec(4, 3, data).unwrap()
            };
            let x2 = {
                let data: Vec<f64> = (0..12).map(|_| 2.0 * next()).collect();
                Matrix::from_vec(4, 3, data).unwrap()
            };
            let theta = 0.5 * (next() + 1.0);
            let mix = x1.scale(theta).add(&x2.scale(1.0 - theta));
            let lhs = g_value(&p, &mix).unwrap();
            let rhs = theta * g_value(&p, &x1).unwrap() + (1.0 - theta) * g_value(&p, &x2).unwrap();
            assert!(lhs <= rhs + 1e-10, "{lhs} > {rhs}");
        }
    }

    #[test]
    fn default_x0_has_expected_dense_form() {
        let p = toy_problem(5, 4, 3, 1.0, 94);
        let x0 = default_x0(&p).unwrap();
        let smax = spectral_norm(p.d()).unwrap();
        let expect = p.d().transpose().matmul(p.y()).scale(1.0 / (smax * smax));
        assert!(x0.reconstruct().sub(&expect).frobenius_norm() <= 1e-10);
        assert_eq!(x0.shape(), (4, 3));
    }

    #[test]
    fn grad_bound_holds_on_sampled_sublevel_set() {
        // 500 points with F(X) ≤ F(X⁰), drawn along the segment toward the
        // unpenalized least-squares solution plus shrinking perturbations.
        let p = toy_problem(6, 4, 3, 1.0, 95);
        let x0 = default_x0(&p).unwrap();
        let g_bound = grad_bound(&p, &x0, GradEstimator::ColumnNorm).unwrap();
        let f0 = f_value(&p, &x0).unwrap();

        let f = svd::svd(p.d()).unwrap();
        let mut pinv = Matrix::zeros(4, 6);
        for i in 0..4 {
            for j in 0..6 {
                let mut s = 0.0;
                for l in 0..f.sigma().len() {
                    if f.sigma()[l] > 1e-12 {
                        s += f.v().get(i, l) / f.sigma()[l] * f.u().get(j, l);
                    }
                }
                pinv.set(i, j, s);
            }
        }
        let x_ls = pinv.matmul(p.y());
        let x0_dense = x0.reconstruct();

        let f_of = |m: &Matrix| -> f64 {
            g_value(&p, m).unwrap()
                + p.lambda()
                    * svd::singular_values(m)
                        .unwrap()
                        .iter()
                        .filter(|&&s| s > 1e-12)
                        .count() as f64
        };

        let mut next = lcg_stream(96);
        let mut accepted = 0usize;
        while accepted < 500 {
            let theta = 0.5 * (next() + 1.0);
            let base = x0_dense.scale(1.0 - theta).add(&x_ls.scale(theta));
            let noise = {
                let data: Vec<f64> = (0..12).map(|_| next()).collect();
                Matrix::from_vec(4, 3, data).unwrap()
            };
            let mut delta = 0.1;
            let mut x = None;
            while delta >= 1e-12 {
                let cand = base.add(&noise.scale(delta));
                if f_of(&cand) <= f0 {
                    x = Some(cand);
                    break;
                }
                delta /= 2.0;
            }
            let x = match x {
                Some(x) => x,
                None if f_of(&base) <= f0 => base,
                None => continue,
            };
            let grad = g_grad(&p, &x).unwrap();
            let smax = spectral_norm(&grad).unwrap();
            assert!(smax <= g_bound * (1.0 + 1e-10), "{smax} > {g_bound}");
            accepted += 1;
        }
    }
}
