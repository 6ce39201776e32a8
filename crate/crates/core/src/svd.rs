//! Dense singular value decomposition.
//!
//! Householder bidiagonalization followed by Golub-Kahan implicit-shift QR
//! iteration. Factors are thin: for an m×n input, U is m×p and V is n×p
//! with p = min(m, n). A values-only entry point skips all vector
//! accumulation, which matters for the Monte Carlo sweeps over thousands of
//! random matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::float;
use crate::matrix::Matrix;

/// Thin SVD triple: `original = U · diag(sigma) · Vᵀ`.
///
/// `sigma` is nonnegative and sorted descending. U and V have orthonormal
/// columns; the sign of each column pair is arbitrary but deterministic for
/// a given input.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    u: Matrix,
    sigma: Vec<f64>,
    v: Matrix,
}

impl SvdFactors {
    pub fn u(&self) -> &Matrix {
        &self.u
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn v(&self) -> &Matrix {
        &self.v
    }

    /// `U · diag(sigma) · Vᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let m = self.u.rows();
        let n = self.v.rows();
        let p = self.sigma.len();
        let mut out = Matrix::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..p {
                    s += self.u.get(i, l) * self.sigma[l] * self.v.get(j, l);
                }
                out.set(i, j, s);
            }
        }
        out
    }

    /// Worst deviation of UᵀU and VᵀV from the identity, in max norm.
    pub fn orthonormality_residual(&self) -> f64 {
        fn gram_residual(m: &Matrix) -> f64 {
            let p = m.cols();
            let mut worst = 0.0f64;
            for a in 0..p {
                for b in 0..p {
                    let mut s = 0.0;
                    for i in 0..m.rows() {
                        s += m.get(i, a) * m.get(i, b);
                    }
                    let target = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max(float::abs(s - target));
                }
            }
            worst
        }
        gram_residual(&self.u).max(gram_residual(&self.v))
    }

    /// `‖U·diag(sigma)·Vᵀ − original‖_F`.
    pub fn reconstruction_residual(&self, original: &Matrix) -> f64 {
        self.reconstruct().sub(original).frobenius_norm()
    }
}

/// Full thin SVD. Errors on non-finite input.
pub fn svd(m: &Matrix) -> Result<SvdFactors, Error> {
    if !m.is_finite() {
        return Err(Error::NonFinite { what: "svd input" });
    }
    if m.rows() >= m.cols() {
        factor_tall(m)
    } else {
        // M = (Mᵀ)ᵀ = (U'ΣV'ᵀ)ᵀ = V'ΣU'ᵀ: swap the factors.
        let f = factor_tall(&m.transpose())?;
        Ok(SvdFactors {
            u: f.v,
            sigma: f.sigma,
            v: f.u,
        })
    }
}

/// Singular values only (descending), skipping vector accumulation.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>, Error> {
    if !m.is_finite() {
        return Err(Error::NonFinite { what: "svd input" });
    }
    let work = if m.rows() >= m.cols() {
        m.clone()
    } else {
        m.transpose()
    };
    let (rows, cols) = work.shape();
    let mut a = work.data().to_vec();
    let mut d = vec![0.0; cols];
    let mut e = vec![0.0; cols.saturating_sub(1)];
    let mut taul = vec![0.0; cols];
    let mut taur = vec![0.0; cols];
    bidiagonalize(&mut a, rows, cols, &mut d, &mut e, &mut taul, &mut taur);
    bidiagonal_qr(&mut d, &mut e, None, None)?;
    Ok(d)
}

fn factor_tall(m: &Matrix) -> Result<SvdFactors, Error> {
    let (rows, cols) = m.shape();
    debug_assert!(rows >= cols);
    let mut a = m.data().to_vec();
    let mut d = vec![0.0; cols];
    let mut e = vec![0.0; cols.saturating_sub(1)];
    let mut taul = vec![0.0; cols];
    let mut taur = vec![0.0; cols];
    bidiagonalize(&mut a, rows, cols, &mut d, &mut e, &mut taul, &mut taur);
    let mut u = accumulate_left(&a, rows, cols, &taul);
    let mut v = accumulate_right(&a, cols, &taur);
    bidiagonal_qr(&mut d, &mut e, Some(&mut u), Some(&mut v))?;
    Ok(SvdFactors { u, sigma: d, v })
}

/// Householder reflector for x = a[range]: returns (beta, tau) and stores the
/// reflector tail (v normalized to v₀ = 1) back into the tail positions.
/// H = I − tau·v·vᵀ maps x to beta·e₁.
struct Reflector {
    beta: f64,
    tau: f64,
}

fn make_reflector(head: f64, tail_norm_sq: f64) -> Reflector {
    let norm_sq = head * head + tail_norm_sq;
    if norm_sq == 0.0 {
        return Reflector { beta: 0.0, tau: 0.0 };
    }
    let norm = float::sqrt(norm_sq);
    let sigma = if head == 0.0 {
        norm
    } else {
        float::copysign(norm, head)
    };
    let v0 = head + sigma;
    Reflector {
        beta: -sigma,
        tau: v0 / sigma,
    }
}

/// Reduces a (rows×cols, rows ≥ cols) to upper bidiagonal form.
///
/// On return `d`/`e` hold the diagonal and superdiagonal; the reflector
/// tails are stored in `a` below the diagonal (left reflectors, columns) and
/// right of the superdiagonal (right reflectors, rows), scaled so the
/// leading component is an implicit 1; `taul`/`taur` hold the scalars.
fn bidiagonalize(
    a: &mut [f64],
    rows: usize,
    cols: usize,
    d: &mut [f64],
    e: &mut [f64],
    taul: &mut [f64],
    taur: &mut [f64],
) {
    let at = |i: usize, j: usize| i * cols + j;
    for k in 0..cols {
        // Left reflector zeroing a[k+1.., k].
        let mut tail_sq = 0.0;
        for i in k + 1..rows {
            tail_sq += a[at(i, k)] * a[at(i, k)];
        }
        let head = a[at(k, k)];
        let r = make_reflector(head, tail_sq);
        taul[k] = r.tau;
        d[k] = if r.tau == 0.0 { head } else { r.beta };
        if r.tau != 0.0 {
            let v0 = head - r.beta;
            for i in k + 1..rows {
                a[at(i, k)] /= v0;
            }
            // Apply H to the trailing columns.
            for j in k + 1..cols {
                let mut dot = a[at(k, j)];
                for i in k + 1..rows {
                    dot += a[at(i, k)] * a[at(i, j)];
                }
                dot *= r.tau;
                a[at(k, j)] -= dot;
                for i in k + 1..rows {
                    let vi = a[at(i, k)];
                    a[at(i, j)] -= dot * vi;
                }
            }
        }

        // Right reflector zeroing a[k, k+2..].
        if k + 2 < cols {
            let mut tail_sq = 0.0;
            for j in k + 2..cols {
                tail_sq += a[at(k, j)] * a[at(k, j)];
            }
            let head = a[at(k, k + 1)];
            let r = make_reflector(head, tail_sq);
            taur[k] = r.tau;
            e[k] = if r.tau == 0.0 { head } else { r.beta };
            if r.tau != 0.0 {
                let v0 = head - r.beta;
                for j in k + 2..cols {
                    a[at(k, j)] /= v0;
                }
                // Apply H from the right to the trailing rows.
                for i in k + 1..rows {
                    let mut dot = a[at(i, k + 1)];
                    for j in k + 2..cols {
                        dot += a[at(i, j)] * a[at(k, j)];
                    }
                    dot *= r.tau;
                    a[at(i, k + 1)] -= dot;
                    for j in k + 2..cols {
                        let vj = a[at(k, j)];
                        a[at(i, j)] -= dot * vj;
                    }
                }
            }
        } else if k + 1 < cols {
            e[k] = a[at(k, k + 1)];
        }
    }
}

/// U = H₀·H₁·…·H_{cols−1}·I_{rows×cols}, accumulated backward so the thin
/// slice never widens.
fn accumulate_left(a: &[f64], rows: usize, cols: usize, taul: &[f64]) -> Matrix {
    let at = |i: usize, j: usize| i * cols + j;
    let mut u = Matrix::zeros(rows, cols);
    for i in 0..cols {
        u.set(i, i, 1.0);
    }
    for k in (0..cols).rev() {
        let tau = taul[k];
        if tau == 0.0 {
            continue;
        }
        for c in 0..cols {
            let mut dot = u.get(k, c);
            for i in k + 1..rows {
                dot += a[at(i, k)] * u.get(i, c);
            }
            dot *= tau;
            u.set(k, c, u.get(k, c) - dot);
            for i in k + 1..rows {
                let vi = a[at(i, k)];
                u.set(i, c, u.get(i, c) - dot * vi);
            }
        }
    }
    u
}

/// V = H'₀·H'₁·…·I_{cols×cols} from the right-reflector tails.
fn accumulate_right(a: &[f64], cols: usize, taur: &[f64]) -> Matrix {
    let at = |i: usize, j: usize| i * cols + j;
    let mut v = Matrix::identity(cols);
    if cols < 3 {
        return v;
    }
    for k in (0..cols - 2).rev() {
        let tau = taur[k];
        if tau == 0.0 {
            continue;
        }
        // Reflector components live at positions k+1 (implicit 1) and k+2..
        for c in 0..cols {
            let mut dot = v.get(k + 1, c);
            for j in k + 2..cols {
                dot += a[at(k, j)] * v.get(j, c);
            }
            dot *= tau;
            v.set(k + 1, c, v.get(k + 1, c) - dot);
            for j in k + 2..cols {
                let vj = a[at(k, j)];
                v.set(j, c, v.get(j, c) - dot * vj);
            }
        }
    }
    v
}

/// Rotation (c, s) with c·f + s·g = r ≥ ±‖(f,g)‖ and −s·f + c·g = 0.
fn givens(f: f64, g: f64) -> (f64, f64) {
    if g == 0.0 {
        (1.0, 0.0)
    } else if f == 0.0 {
        (0.0, 1.0)
    } else {
        let r = float::hypot(f, g);
        (f / r, g / r)
    }
}

/// Mix columns (i, j) of `m`: new_i = c·old_i + s·old_j, new_j = c·old_j − s·old_i.
fn rotate_columns(m: &mut Matrix, i: usize, j: usize, c: f64, s: f64) {
    for row in 0..m.rows() {
        let xi = m.get(row, i);
        let xj = m.get(row, j);
        m.set(row, i, c * xi + s * xj);
        m.set(row, j, c * xj - s * xi);
    }
}

/// Implicit-shift QR on the bidiagonal (d, e); rotations accumulate into the
/// optional factors. On return d holds nonnegative singular values sorted
/// descending.
fn bidiagonal_qr(
    d: &mut [f64],
    e: &mut [f64],
    mut u: Option<&mut Matrix>,
    mut v: Option<&mut Matrix>,
) -> Result<(), Error> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    if n == 1 {
        if d[0] < 0.0 {
            d[0] = -d[0];
            if let Some(u) = u.as_deref_mut() {
                for row in 0..u.rows() {
                    let x = u.get(row, 0);
                    u.set(row, 0, -x);
                }
            }
        }
        return Ok(());
    }

    let eps = f64::EPSILON;
    let mut anorm = 0.0f64;
    for i in 0..n {
        let off = if i + 1 < n { float::abs(e[i]) } else { 0.0 };
        anorm = anorm.max(float::abs(d[i]) + off);
    }
    if anorm == 0.0 {
        return Ok(());
    }
    let tiny = eps * anorm;

    let max_sweeps = 100 * n;
    let mut sweeps = 0usize;
    let mut hi = n - 1;

    while hi > 0 {
        // Deflate converged trailing entries.
        if float::abs(e[hi - 1]) <= eps * (float::abs(d[hi - 1]) + float::abs(d[hi])) {
            e[hi - 1] = 0.0;
            hi -= 1;
            continue;
        }

        // Find the start of the unreduced block.
        let mut lo = hi - 1;
        while lo > 0 {
            if float::abs(e[lo - 1]) <= eps * (float::abs(d[lo - 1]) + float::abs(d[lo])) {
                e[lo - 1] = 0.0;
                break;
            }
            lo -= 1;
        }

        sweeps += 1;
        if sweeps > max_sweeps {
            return Err(Error::NumericalFailure {
                what: "bidiagonal qr iteration budget exhausted",
            });
        }

        // A negligible diagonal entry stalls the shifted sweep; chase its
        // superdiagonal off the bottom with left rotations first.
        let mut chased = false;
        for idx in lo..hi {
            if float::abs(d[idx]) <= tiny {
                d[idx] = 0.0;
                let mut z = e[idx];
                e[idx] = 0.0;
                for j in idx + 1..=hi {
                    let (c, s) = givens(d[j], z);
                    d[j] = c * d[j] + s * z;
                    if j < hi {
                        z = -s * e[j];
                        e[j] *= c;
                    }
                    if let Some(u) = u.as_deref_mut() {
                        rotate_columns(u, j, idx, c, s);
                    }
                }
                chased = true;
                break;
            }
        }
        if chased {
            continue;
        }

        // Wilkinson shift from the trailing 2×2 of BᵀB.
        let d_hi = d[hi];
        let d_hi1 = d[hi - 1];
        let e_hi1 = e[hi - 1];
        let e_hi2 = if hi >= lo + 2 { e[hi - 2] } else { 0.0 };
        let t11 = d_hi1 * d_hi1 + e_hi2 * e_hi2;
        let t12 = d_hi1 * e_hi1;
        let t22 = d_hi * d_hi + e_hi1 * e_hi1;
        let half_gap = (t11 - t22) / 2.0;
        let denom = half_gap + float::copysign(float::hypot(half_gap, t12), half_gap);
        let mu = if denom == 0.0 { t22 } else { t22 - t12 * t12 / denom };

        // Implicit QR chase down the block.
        let mut x = d[lo] * d[lo] - mu;
        let mut z = d[lo] * e[lo];
        for k in lo..hi {
            let (c, s) = givens(x, z);
            if k > lo {
                e[k - 1] = c * x + s * z;
            }
            let dk = d[k];
            let ek = e[k];
            let dk1 = d[k + 1];
            d[k] = c * dk + s * ek;
            e[k] = c * ek - s * dk;
            let bulge = s * dk1;
            d[k + 1] = c * dk1;
            if let Some(v) = v.as_deref_mut() {
                rotate_columns(v, k, k + 1, c, s);
            }

            let (c2, s2) = givens(d[k], bulge);
            d[k] = c2 * d[k] + s2 * bulge;
            let old_ek = e[k];
            let old_dk1 = d[k + 1];
            e[k] = c2 * old_ek + s2 * old_dk1;
            d[k + 1] = c2 * old_dk1 - s2 * old_ek;
            if k + 1 < hi {
                let old_ek1 = e[k + 1];
                x = e[k];
                z = s2 * old_ek1;
                e[k + 1] = c2 * old_ek1;
            }
            if let Some(u) = u.as_deref_mut() {
                rotate_columns(u, k, k + 1, c2, s2);
            }
        }
    }

    // Sign-fix into nonnegative singular values.
    for i in 0..n {
        if d[i] < 0.0 {
            d[i] = -d[i];
            if let Some(u) = u.as_deref_mut() {
                for row in 0..u.rows() {
                    let x = u.get(row, i);
                    u.set(row, i, -x);
                }
            }
        }
    }

    // Selection sort descending, permuting factor columns alongside.
    for i in 0..n {
        let mut max_idx = i;
        for j in i + 1..n {
            if d[j] > d[max_idx] {
                max_idx = j;
            }
        }
        if max_idx != i {
            d.swap(i, max_idx);
            if let Some(u) = u.as_deref_mut() {
                for row in 0..u.rows() {
                    let a = u.get(row, i);
                    let b = u.get(row, max_idx);
                    u.set(row, i, b);
                    u.set(row, max_idx, a);
                }
            }
            if let Some(v) = v.as_deref_mut() {
                for row in 0..v.rows() {
                    let a = v.get(row, i);
                    let b = v.get(row, max_idx);
                    v.set(row, i, b);
                    v.set(row, max_idx, a);
                }
            }
        }
    }

    Ok(())
}
