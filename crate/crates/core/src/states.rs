//! Block-tridiagonal Gaussian state sampler.
//!
//! The full conditional of the non-centered states β̃_0..β̃_T is
//! N(Ω⁻¹c, Ω⁻¹) with a block-tridiagonal precision Ω. It is factorized as
//! Ω = LLᵀ with `L` block lower-bidiagonal, which gives the mean and a draw in
//! a single forward/backward sweep whose cost is linear in T.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{backward_solve, cholesky, dot, forward_solve, spd_inverse, Matrix};
use crate::real::Real;

/// Block-tridiagonal precision and right-hand side `c` of a Gaussian
/// full conditional over `n_blocks` vectors of size `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionSystem<T> {
    /// Ω_00..Ω_TT.
    pub diag_blocks: Vec<Matrix<T>>,
    /// `off_blocks[t-1]` is Ω_{t−1,t}, t = 1..T.
    pub off_blocks: Vec<Matrix<T>>,
    pub c: Vec<Vec<T>>,
}

impl<T: Real> PrecisionSystem<T> {
    pub fn new(diag_blocks: Vec<Matrix<T>>, off_blocks: Vec<Matrix<T>>, c: Vec<Vec<T>>) -> Result<Self> {
        let n = diag_blocks.len();
        let d = diag_blocks.first().map_or(0, Matrix::rows);
        let shapes_ok = n > 0
            && off_blocks.len() + 1 == n
            && c.len() == n
            && diag_blocks.iter().chain(&off_blocks).all(|b| b.rows() == d && b.cols() == d)
            && c.iter().all(|v| v.len() == d);
        if !shapes_ok {
            return Err(Error::DimensionMismatch(
                "precision system blocks have inconsistent shapes".into(),
            ));
        }
        Ok(Self {
            diag_blocks,
            off_blocks,
            c,
        })
    }

    pub fn n_blocks(&self) -> usize {
        self.diag_blocks.len()
    }

    pub fn block_dim(&self) -> usize {
        self.diag_blocks[0].rows()
    }

    /// The full `(n·d)×(n·d)` precision matrix.
    pub fn assemble(&self) -> Matrix<T> {
        let (n, d) = (self.n_blocks(), self.block_dim());
        let mut full = Matrix::zeros(n * d, n * d);
        for t in 0..n {
            for i in 0..d {
                for j in 0..d {
                    full[(t * d + i, t * d + j)] = self.diag_blocks[t][(i, j)];
                    if t > 0 {
                        let v = self.off_blocks[t - 1][(i, j)];
                        full[((t - 1) * d + i, t * d + j)] = v;
                        full[(t * d + j, (t - 1) * d + i)] = v;
                    }
                }
            }
        }
        full
    }

    /// Stacked right-hand side.
    pub fn assemble_rhs(&self) -> Vec<T> {
        self.c.iter().flatten().copied().collect()
    }
}

/// Builds the precision system of the TVP state full conditional.
///
/// With y*_t = y_t − x_tβ and F_t = x_t Diag(√θ):
/// Ω_00 = 2I, Ω_tt = F_tᵀF_t/σ²_t + 2I (1 ≤ t < T), Ω_TT = F_TᵀF_T/σ²_T + I,
/// Ω_{t−1,t} = −I, c_0 = 0, c_t = F_tᵀ y*_t / σ²_t.
pub fn build_precision<T: Real>(
    y: &[T],
    x: &Matrix<T>,
    beta_mean: &[T],
    theta_sr: &[T],
    sigma2_t: &[T],
) -> Result<PrecisionSystem<T>> {
    let (n, d) = (y.len(), x.cols());
    if x.rows() != n || beta_mean.len() != d || theta_sr.len() != d || sigma2_t.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "build_precision: y {n}, x {}x{d}, beta {}, theta_sr {}, sigma2 {}",
            x.rows(),
            beta_mean.len(),
            theta_sr.len(),
            sigma2_t.len()
        )));
    }
    let two = T::lit(2.0);
    let mut diag = Vec::with_capacity(n + 1);
    let mut c = Vec::with_capacity(n + 1);
    diag.push(Matrix::scaled_identity(d, two));
    c.push(vec![T::zero(); d]);
    let mut f = vec![T::zero(); d];
    for t in 0..n {
        let xt = x.row(t);
        for j in 0..d {
            f[j] = xt[j] * theta_sr[j];
        }
        let ystar = y[t] - dot(xt, beta_mean);
        let inv_s2 = T::one() / sigma2_t[t];
        let prior = if t + 1 == n { T::one() } else { two };
        let mut block = Matrix::scaled_identity(d, prior);
        for i in 0..d {
            for j in 0..d {
                block[(i, j)] += f[i] * f[j] * inv_s2;
            }
        }
        diag.push(block);
        c.push(f.iter().map(|&fi| fi * ystar * inv_s2).collect());
    }
    let off = vec![Matrix::scaled_identity(d, -T::one()); n];
    PrecisionSystem::new(diag, off, c)
}

/// Block Cholesky factor Ω = LLᵀ: lower-triangular diagonal blocks `L_t` and
/// sub-diagonal blocks `B_t = L_{t,t−1}`.
#[derive(Debug, Clone)]
pub struct BlockCholesky<T> {
    pub diag: Vec<Matrix<T>>,
    /// `sub[t-1]` is the block in row `t`, column `t−1`.
    pub sub: Vec<Matrix<T>>,
}

impl<T: Real> BlockCholesky<T> {
    pub fn factor(sys: &PrecisionSystem<T>) -> Result<Self> {
        let n = sys.n_blocks();
        let d = sys.block_dim();
        let mut diag = Vec::with_capacity(n);
        let mut sub = Vec::with_capacity(n.saturating_sub(1));
        diag.push(cholesky(&sys.diag_blocks[0], 0)?);
        for t in 1..n {
            // B_t L_{t−1}ᵀ = Ω_{t,t−1} = Ω_{t−1,t}ᵀ, solved row by row
            let lower = sys.off_blocks[t - 1].transpose();
            let mut b = Matrix::zeros(d, d);
            for i in 0..d {
                let row = forward_solve(&diag[t - 1], lower.row(i));
                b.row_mut(i).copy_from_slice(&row);
            }
            let schur = sys.diag_blocks[t].sub(&b.matmul(&b.transpose()));
            diag.push(cholesky(&schur, t)?);
            sub.push(b);
        }
        Ok(Self { diag, sub })
    }

    /// Solves `L z = c`.
    pub fn forward(&self, c: &[Vec<T>]) -> Vec<Vec<T>> {
        let mut z: Vec<Vec<T>> = Vec::with_capacity(c.len());
        for (t, ct) in c.iter().enumerate() {
            let rhs = if t == 0 {
                ct.clone()
            } else {
                let bz = self.sub[t - 1].matvec(&z[t - 1]);
                ct.iter().zip(bz).map(|(&a, b)| a - b).collect()
            };
            z.push(forward_solve(&self.diag[t], &rhs));
        }
        z
    }

    /// Solves `Lᵀ x = z`.
    pub fn backward(&self, z: &[Vec<T>]) -> Vec<Vec<T>> {
        let n = z.len();
        let mut x: Vec<Vec<T>> = vec![Vec::new(); n];
        for t in (0..n).rev() {
            let rhs = if t + 1 == n {
                z[t].clone()
            } else {
                let bx = self.sub[t].tr_matvec(&x[t + 1]);
                z[t].iter().zip(bx).map(|(&a, b)| a - b).collect()
            };
            x[t] = backward_solve(&self.diag[t], &rhs);
        }
        x
    }

    /// Dense `L` for testing.
    pub fn assemble(&self) -> Matrix<T> {
        let n = self.diag.len();
        let d = self.diag[0].rows();
        let mut l = Matrix::zeros(n * d, n * d);
        for t in 0..n {
            for i in 0..d {
                for j in 0..d {
                    l[(t * d + i, t * d + j)] = self.diag[t][(i, j)];
                    if t > 0 {
                        l[(t * d + i, (t - 1) * d + j)] = self.sub[t - 1][(i, j)];
                    }
                }
            }
        }
        l
    }
}

/// Posterior mean Ω⁻¹c, blockwise.
pub fn posterior_mean<T: Real>(sys: &PrecisionSystem<T>) -> Result<Vec<Vec<T>>> {
    let chol = BlockCholesky::factor(sys)?;
    Ok(chol.backward(&chol.forward(&sys.c)))
}

/// Exact draw from N(Ω⁻¹c, Ω⁻¹), returned as an `n_blocks × d` matrix.
pub fn sample_states<T, R>(rng: &mut R, sys: &PrecisionSystem<T>) -> Result<Matrix<T>>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let chol = BlockCholesky::factor(sys)?;
    let mut z = chol.forward(&sys.c);
    for zt in &mut z {
        for v in zt.iter_mut() {
            *v += StandardNormal.sample(rng);
        }
    }
    let x = chol.backward(&z);
    let d = sys.block_dim();
    Matrix::from_row_major(x.len(), d, x.into_iter().flatten().collect())
}

/// Forward moment recursion over the leading blocks 0..=`upto`:
/// Σ_0 = Ω_00⁻¹, m_0 = Σ_0 c_0,
/// Σ_t = (Ω_tt − Ω_{t−1,t}ᵀ Σ_{t−1} Ω_{t−1,t})⁻¹, m_t = Σ_t (c_t − Ω_{t−1,t}ᵀ m_{t−1}).
///
/// (m_t, Σ_t) are the mean and covariance of block `t` under the Gaussian
/// whose precision is the leading `(t+1)`-block principal submatrix of Ω.
pub fn filter_moments<T: Real>(sys: &PrecisionSystem<T>, upto: usize) -> Result<(Vec<T>, Matrix<T>)> {
    if upto >= sys.n_blocks() {
        return Err(Error::DimensionMismatch(format!(
            "filter_moments: time index {upto} beyond last block {}",
            sys.n_blocks() - 1
        )));
    }
    let mut sigma = spd_inverse(&sys.diag_blocks[0], 0)?;
    let mut m = sigma.matvec(&sys.c[0]);
    for t in 1..=upto {
        let off = &sys.off_blocks[t - 1];
        let prec = sys.diag_blocks[t].sub(&off.transpose().matmul(&sigma).matmul(off));
        sigma = spd_inverse(&prec, t)?;
        let om = off.tr_matvec(&m);
        let rhs: Vec<T> = sys.c[t].iter().zip(om).map(|(&c, o)| c - o).collect();
        m = sigma.matvec(&rhs);
    }
    Ok((m, sigma))
}
