//! Dense primal-dual interior-point method for small block-diagonal SDPs.
//!
//! Standard form:
//!
//! ```text
//! min ⟨C, X⟩  s.t.  ⟨A_m, X⟩ = b_m,  X ⪰ 0
//! max bᵀy    s.t.  Z = C − Σ y_m A_m ⪰ 0
//! ```
//!
//! `X` and `Z` are block diagonal; nonnegative scalars are 1×1 blocks. The
//! search direction is HKM with a Mehrotra predictor-corrector, started from
//! an infeasible interior point.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};

/// One block of a block-sparse symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockEntry {
    pub block: usize,
    pub mat: DMatrix<f64>,
}

impl BlockEntry {
    pub fn new(block: usize, mat: DMatrix<f64>) -> Self {
        Self { block, mat }
    }

    pub fn scalar(block: usize, value: f64) -> Self {
        Self {
            block,
            mat: DMatrix::from_element(1, 1, value),
        }
    }
}

pub type SparseBlocks = Vec<BlockEntry>;

#[derive(Clone, Debug, PartialEq)]
pub struct StandardSdp {
    pub sizes: Vec<usize>,
    pub c: SparseBlocks,
    pub a: Vec<SparseBlocks>,
    pub b: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IpmOptions {
    /// Target for relative gap and scaled infeasibilities.
    pub tol: f64,
    /// Accept a stalled run whose residuals are below this level.
    pub accept_tol: f64,
    pub max_iters: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
}

impl Default for IpmOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            accept_tol: 1e-8,
            max_iters: 150,
            step_fraction: 0.98,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IpmStatus {
    Optimal,
    /// Stalled before `tol` but within `accept_tol`.
    NearOptimal,
}

#[derive(Clone, Debug)]
pub struct IpmSolution {
    pub x: Vec<DMatrix<f64>>,
    pub y: DVector<f64>,
    pub z: Vec<DMatrix<f64>>,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub rel_gap: f64,
    pub primal_infeas: f64,
    pub dual_infeas: f64,
    pub iterations: usize,
    pub status: IpmStatus,
}

fn frob_dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn sparse_dot(a: &SparseBlocks, x: &[DMatrix<f64>]) -> f64 {
    a.iter().map(|e| frob_dot(&e.mat, &x[e.block])).sum()
}

fn blocks_dot(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| frob_dot(x, y)).sum()
}

fn blocks_norm(a: &[DMatrix<f64>]) -> f64 {
    blocks_dot(a, a).sqrt()
}

fn sparse_norm(a: &SparseBlocks) -> f64 {
    a.iter().map(|e| e.mat.norm_squared()).sum::<f64>().sqrt()
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

impl StandardSdp {
    pub fn n_constraints(&self) -> usize {
        self.b.len()
    }

    pub fn total_dim(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.len() != self.b.len() {
            return Err(Error::Dimension(format!(
                "{} constraint matrices for {} right-hand sides",
                self.a.len(),
                self.b.len()
            )));
        }
        let check = |e: &BlockEntry| -> Result<()> {
            let n = *self
                .sizes
                .get(e.block)
                .ok_or_else(|| Error::Dimension(format!("block index {} out of range", e.block)))?;
            if e.mat.shape() != (n, n) {
                return Err(Error::Dimension(format!(
                    "block {} expects {n}x{n}, got {:?}",
                    e.block,
                    e.mat.shape()
                )));
            }
            let asym = (&e.mat - e.mat.transpose()).amax();
            if asym > 1e-12 * e.mat.amax().max(1.0) {
                return Err(Error::InvalidInput(format!(
                    "block {} is not symmetric",
                    e.block
                )));
            }
            Ok(())
        };
        self.c.iter().try_for_each(check)?;
        self.a.iter().flatten().try_for_each(check)
    }

    fn dense(&self, sparse: &SparseBlocks) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for e in sparse {
            out[e.block] += &e.mat;
        }
        out
    }

    fn apply(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|a| sparse_dot(a, x)))
    }

    fn adjoint(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for (a, &ym) in self.a.iter().zip(y.iter()) {
            for e in a {
                out[e.block] += &e.mat * ym;
            }
        }
        out
    }
}

fn inverse_spd(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let ch = Cholesky::new(m.clone())?;
    let mut inv = ch.inverse();
    symmetrize(&mut inv);
    Some(inv)
}

/// Largest step `α ≤ 1/fraction` keeping `X + α ΔX ⪰ 0`, scaled by `fraction`.
fn step_length(x: &[DMatrix<f64>], dx: &[DMatrix<f64>], fraction: f64) -> f64 {
    let mut alpha_max = f64::INFINITY;
    for (xb, db) in x.iter().zip(dx) {
        if xb.nrows() == 1 {
            if db[(0, 0)] < 0.0 {
                alpha_max = alpha_max.min(-xb[(0, 0)] / db[(0, 0)]);
            }
            continue;
        }
        let Some(ch) = Cholesky::new(xb.clone()) else {
            return 0.0;
        };
        let l = ch.l();
        let linv = l
            .clone()
            .solve_lower_triangular(&DMatrix::identity(l.nrows(), l.nrows()))
            .unwrap_or_else(|| DMatrix::identity(l.nrows(), l.nrows()));
        let mut s = &linv * db * linv.transpose();
        symmetrize(&mut s);
        let min = s.symmetric_eigenvalues().min();
        if min < 0.0 {
            alpha_max = alpha_max.min(-1.0 / min);
        }
    }
    (fraction * alpha_max).min(1.0)
}

fn initial_point(p: &StandardSdp) -> (Vec<DMatrix<f64>>, DVector<f64>, Vec<DMatrix<f64>>) {
    let n = p.total_dim() as f64;
    let mut zeta = n.sqrt().max(10.0);
    let mut eta = n.sqrt().max(10.0);
    for (a, &b) in p.a.iter().zip(&p.b) {
        let na = sparse_norm(a);
        zeta = zeta.max((1.0 + b.abs()) / (1.0 + na));
        eta = eta.max(na);
    }
    eta = eta.max(sparse_norm(&p.c));
    let x = p
        .sizes
        .iter()
        .map(|&k| DMatrix::identity(k, k) * zeta)
        .collect();
    let z = p
        .sizes
        .iter()
        .map(|&k| DMatrix::identity(k, k) * eta)
        .collect();
    (x, DVector::zeros(p.b.len()), z)
}

/// Solves a standard-form SDP.
pub fn solve(p: &StandardSdp, opts: &IpmOptions) -> Result<IpmSolution> {
    p.validate()?;
    let m = p.n_constraints();
    let n = p.total_dim() as f64;
    let c = p.dense(&p.c);
    let b = DVector::from_vec(p.b.clone());
    let b_norm = b.norm();
    let c_norm = blocks_norm(&c);
    let (mut x, mut y, mut z) = initial_point(p);

    let mut best: Option<(f64, IpmSolution)> = None;
    for iter in 0..=opts.max_iters {
        let ax = p.apply(&x);
        let rp = &b - &ax;
        let aty = p.adjoint(&y);
        let rd: Vec<DMatrix<f64>> = c
            .iter()
            .zip(&aty)
            .zip(&z)
            .map(|((cb, ab), zb)| cb - ab - zb)
            .collect();
        let pobj = blocks_dot(&c, &x);
        let dobj = b.dot(&y);
        let xz = blocks_dot(&x, &z);
        let rel_gap = xz.max((pobj - dobj).abs()) / (1.0 + pobj.abs() + dobj.abs());
        let pinf = rp.norm() / (1.0 + b_norm);
        let dinf = blocks_norm(&rd) / (1.0 + c_norm);
        let merit = rel_gap.max(pinf).max(dinf);
        let snapshot = |status| IpmSolution {
            x: x.clone(),
            y: y.clone(),
            z: z.clone(),
            primal_obj: pobj,
            dual_obj: dobj,
            rel_gap,
            primal_infeas: pinf,
            dual_infeas: dinf,
            iterations: iter,
            status,
        };
        if merit <= opts.tol {
            return Ok(snapshot(IpmStatus::Optimal));
        }
        if best.as_ref().is_none_or(|(bm, _)| merit < *bm) {
            best = Some((merit, snapshot(IpmStatus::NearOptimal)));
        }
        if y.amax() > 1e12 {
            return Err(Error::Sdp(
                "dual iterates diverge: primal problem appears infeasible".into(),
            ));
        }
        if x.iter().map(|xb| xb.trace()).sum::<f64>() > 1e12 {
            return Err(Error::Sdp(
                "primal iterates diverge: dual problem appears infeasible".into(),
            ));
        }
        if iter == opts.max_iters {
            break;
        }

        let mu = xz / n;
        let zinv: Option<Vec<DMatrix<f64>>> = z.iter().map(inverse_spd).collect();
        let Some(zinv) = zinv else { break };

        // Schur complement M_mj = ⟨A_m, X A_j Z^{-1}⟩.
        let mut schur = DMatrix::zeros(m, m);
        for (j, aj) in p.a.iter().enumerate() {
            let mut g: Vec<Option<DMatrix<f64>>> = vec![None; p.sizes.len()];
            for e in aj {
                let prod = &x[e.block] * &e.mat * &zinv[e.block];
                match &mut g[e.block] {
                    Some(acc) => *acc += prod,
                    slot => *slot = Some(prod),
                }
            }
            for (mi, am) in p.a.iter().enumerate() {
                schur[(mi, j)] = am
                    .iter()
                    .filter_map(|e| g[e.block].as_ref().map(|gb| frob_dot(&e.mat, gb)))
                    .sum();
            }
        }
        let schur_t = schur.transpose();
        schur = (schur + schur_t) * 0.5;
        let chol = match Cholesky::new(schur.clone()) {
            Some(ch) => ch,
            None => {
                let reg = 1e-14 * schur.diagonal().amax().max(1e-300);
                match Cholesky::new(schur + DMatrix::identity(m, m) * reg) {
                    Some(ch) => ch,
                    None => break,
                }
            }
        };
        // X Rd Z^{-1} enters every right-hand side.
        let x_rd_zinv: Vec<DMatrix<f64>> = x
            .iter()
            .zip(&rd)
            .zip(&zinv)
            .map(|((xb, rb), zi)| xb * rb * zi)
            .collect();
        let a_xrdz = p.apply(&x_rd_zinv);

        let direction = |k: &[DMatrix<f64>]| {
            let rhs = &rp - p.apply(k) + &a_xrdz;
            let dy = chol.solve(&rhs);
            let atdy = p.adjoint(&dy);
            let dz: Vec<DMatrix<f64>> = rd.iter().zip(&atdy).map(|(r, a)| r - a).collect();
            let dx: Vec<DMatrix<f64>> = k
                .iter()
                .zip(&x)
                .zip(&dz)
                .zip(&zinv)
                .map(|(((kb, xb), dzb), zi)| {
                    let mut d = kb - xb * dzb * zi;
                    symmetrize(&mut d);
                    d
                })
                .collect();
            (dx, dy, dz)
        };

        // Predictor: affine-scaling direction.
        let k_aff: Vec<DMatrix<f64>> = x.iter().map(|xb| -xb).collect();
        let (dx_a, _, dz_a) = direction(&k_aff);
        let ap = step_length(&x, &dx_a, 1.0);
        let ad = step_length(&z, &dz_a, 1.0);
        let mu_aff = x
            .iter()
            .zip(&dx_a)
            .zip(z.iter().zip(&dz_a))
            .map(|((xb, dxb), (zb, dzb))| frob_dot(&(xb + dxb * ap), &(zb + dzb * ad)))
            .sum::<f64>()
            / n;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector with second-order term.
        let k_corr: Vec<DMatrix<f64>> = x
            .iter()
            .zip(&dx_a)
            .zip(&dz_a)
            .zip(&zinv)
            .map(|(((xb, dxb), dzb), zi)| {
                let dim = xb.nrows();
                (DMatrix::identity(dim, dim) * (sigma * mu) - dxb * dzb) * zi - xb
            })
            .collect();
        let (dx, dy, dz) = direction(&k_corr);
        let ap = step_length(&x, &dx, opts.step_fraction);
        let ad = step_length(&z, &dz, opts.step_fraction);
        if ap < 1e-12 && ad < 1e-12 {
            break;
        }
        for (xb, dxb) in x.iter_mut().zip(&dx) {
            *xb += dxb * ap;
            symmetrize(xb);
        }
        y += dy * ad;
        for (zb, dzb) in z.iter_mut().zip(&dz) {
            *zb += dzb * ad;
            symmetrize(zb);
        }
    }
    match best {
        Some((merit, sol)) if merit <= opts.accept_tol => Ok(sol),
        Some((merit, _)) => Err(Error::Sdp(format!(
            "interior-point method stalled at residual {merit:e}"
        ))),
        None => Err(Error::Sdp("interior-point method made no progress".into())),
    }
}
