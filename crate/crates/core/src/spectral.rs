//! Spectral operators on iterates: hard thresholding of singular values,
//! support projection, and the factored iterate representation they produce.

use alloc::vec::Vec;

use crate::error::Error;
use crate::matrix::Matrix;
use crate::svd::{self, SvdFactors};

/// Truncated SVD representation of a solver iterate.
///
/// Stores only the strictly positive singular values and their subspaces,
/// so the support (the set of positions with nonzero singular value) is
/// exact by construction: always the prefix {0, …, rank−1} in descending
/// order, with no floating-point zeros kept around. Rank 0 is valid and
/// denotes the zero matrix of the given shape.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredIterate {
    rows: usize,
    cols: usize,
    /// rows × rank, row-major: left singular vectors of the kept values.
    u: Vec<f64>,
    /// Strictly positive, descending.
    sigma: Vec<f64>,
    /// cols × rank, row-major: right singular vectors of the kept values.
    v: Vec<f64>,
}

impl FactoredIterate {
    /// The zero iterate of the given shape (rank 0).
    pub fn zero(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "iterate dimensions must be positive");
        FactoredIterate {
            rows,
            cols,
            u: Vec::new(),
            sigma: Vec::new(),
            v: Vec::new(),
        }
    }

    /// Keeps the first `keep` singular triples of a decomposition, dropping
    /// exact zeros among them so the stored values stay strictly positive.
    pub fn from_factors(f: &SvdFactors, keep: usize) -> Self {
        let rows = f.u().rows();
        let cols = f.v().rows();
        let mut rank = keep.min(f.sigma().len());
        while rank > 0 && f.sigma()[rank - 1] <= 0.0 {
            rank -= 1;
        }
        let mut u = Vec::with_capacity(rows * rank);
        for i in 0..rows {
            for l in 0..rank {
                u.push(f.u().get(i, l));
            }
        }
        let mut v = Vec::with_capacity(cols * rank);
        for j in 0..cols {
            for l in 0..rank {
                v.push(f.v().get(j, l));
            }
        }
        FactoredIterate {
            rows,
            cols,
            u,
            sigma: f.sigma()[..rank].to_vec(),
            v,
        }
    }

    /// Factored form of a dense matrix, keeping every positive singular value.
    pub fn from_matrix(m: &Matrix) -> Result<Self, Error> {
        let f = svd::svd(m)?;
        let keep = f.sigma().len();
        Ok(Self::from_factors(&f, keep))
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn is_zero(&self) -> bool {
        self.sigma.is_empty()
    }

    /// Dense form U·diag(sigma)·Vᵀ; rank 0 yields the zero matrix.
    pub fn reconstruct(&self) -> Matrix {
        let r = self.rank();
        let mut out = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let mut s = 0.0;
                for l in 0..r {
                    s += self.u[i * r + l] * self.sigma[l] * self.v[j * r + l];
                }
                out.set(i, j, s);
            }
        }
        out
    }
}

/// Singular value hard thresholding: keeps the triples with σ strictly
/// above `theta`, zeroing the rest. A value exactly equal to the threshold
/// is zeroed.
pub fn hard_threshold(m: &Matrix, theta: f64) -> Result<FactoredIterate, Error> {
    if !(theta >= 0.0) {
        return Err(Error::InvalidParameter {
            what: "hard_threshold requires theta >= 0",
        });
    }
    let f = svd::svd(m)?;
    let keep = f.sigma().iter().take_while(|&&s| s > theta).count();
    Ok(FactoredIterate::from_factors(&f, keep))
}

/// Support projection: keeps the singular values at positions 0..r (the
/// support of a reference iterate, always a descending-order prefix) and
/// zeroes the rest. Equals the best rank-r approximation in Frobenius norm.
pub fn support_project(m: &Matrix, r: usize) -> Result<FactoredIterate, Error> {
    let max = m.rows().min(m.cols());
    if r > max {
        return Err(Error::OutOfRange {
            what: "support_project rank",
            value: r,
            max,
        });
    }
    let f = svd::svd(m)?;
    Ok(FactoredIterate::from_factors(&f, r))
}

/// Largest singular value.
pub fn spectral_norm(m: &Matrix) -> Result<f64, Error> {
    let vals = svd::singular_values(m)?;
    Ok(vals.first().copied().unwrap_or(0.0))
}
