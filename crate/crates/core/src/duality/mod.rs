//! Dual-function machinery for the joint beamforming problems.
//!
//! For a multiplier `β ≥ 0` on the power budget, the inner problem
//!
//! ```text
//! g(β) = min Σ_i w_i^H (βI − G) w_i   s.t.  SINR_i ≥ γ_i
//! ```
//!
//! is solved through its virtual uplink: single-antenna transmitters with
//! powers `λ_i` and an `M`-antenna receiver whose noise covariance is the
//! (possibly indefinite) matrix `βI − G`. The uplink powers are the fixed
//! point of `λ_i = γ_i / (h_i Z_i† h_i^H)` with
//! `Z_i = Σ_{k≠i} λ_k h_k^H h_k + βI − G`, the MMSE receivers give the
//! downlink beam directions and a linear power-control solve gives their
//! powers.
//!
//! When `β ≥ ξ_E` every `Z_i` is PSD and the iteration runs from any start.
//! Below `ξ_E` the iteration starts from a feasible uplink point and is
//! guarded by a PSD test on every `Z_i`; a failing guard certifies
//! `g(β) = −∞`.

mod solve;

pub use solve::{classify_region, SolvePair};

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, row_dot, spectral_radius, CVector, HermitianMatrix, C64};
use crate::model::{energy_matrix, Scenario};

/// Numerical controls for the fixed-point and bisection loops.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Fixed-point stopping accuracy, relative to the scale of each `λ_i`.
    pub fp_tol: f64,
    /// Bisection stops when the bracket width is at most `bisect_tol · hi`.
    pub bisect_tol: f64,
    /// PSD tolerance, relative to the scale of the tested matrix.
    pub psd_tol: f64,
    pub max_fp_iters: usize,
    pub max_bisect_iters: usize,
    pub bracket_growth: f64,
    /// Maximum number of uniform inflations of an `algorithm2` start point.
    pub max_inflations: usize,
    /// Keep the λ sequence of every `algorithm2` run.
    pub record_history: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            fp_tol: 1e-9,
            bisect_tol: 1e-7,
            psd_tol: 1e-9,
            max_fp_iters: 10_000,
            max_bisect_iters: 200,
            bracket_growth: 2.0,
            max_inflations: 40,
            record_history: false,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.fp_tol, self.bisect_tol, self.psd_tol]
            .iter()
            .all(|&v| v > 0.0 && v.is_finite());
        if !positive || self.max_fp_iters == 0 || self.max_bisect_iters == 0 {
            return Err(Error::InvalidInput(
                "solver options must be positive".into(),
            ));
        }
        if !(self.bracket_growth > 1.0) {
            return Err(Error::InvalidInput("bracket growth must exceed 1".into()));
        }
        Ok(())
    }
}

/// Uplink powers and unit-norm MMSE receivers at a given `β`.
#[derive(Clone, Debug)]
pub struct UplinkState {
    pub beta: f64,
    pub lambdas: Vec<f64>,
    pub receivers: Vec<CVector>,
}

/// Linear system `(I − D) p = u` tying downlink powers to fixed beam
/// directions with every SINR constraint tight.
#[derive(Clone, Debug)]
pub struct PowerCouplingSystem {
    pub d: DMatrix<f64>,
    pub u: DVector<f64>,
}

impl PowerCouplingSystem {
    pub fn build(directions: &[CVector], s: &Scenario) -> Result<Self> {
        let k = s.k_i();
        if directions.len() != k {
            return Err(Error::Dimension(format!(
                "{} beam directions for {k} users",
                directions.len()
            )));
        }
        let mut d = DMatrix::zeros(k, k);
        let mut u = DVector::zeros(k);
        for i in 0..k {
            let own = row_dot(&s.h[i], &directions[i]).norm_sqr();
            if own == 0.0 {
                return Err(Error::Infeasible(format!(
                    "direction of user {i} is orthogonal to its channel"
                )));
            }
            for kk in 0..k {
                if kk != i {
                    d[(i, kk)] = s.gamma[i] * row_dot(&s.h[i], &directions[kk]).norm_sqr() / own;
                }
            }
            u[i] = s.gamma[i] * s.sigma2[i] / own;
        }
        Ok(Self { d, u })
    }

    pub fn spectral_radius(&self) -> f64 {
        spectral_radius(&self.d)
    }

    /// Minimal powers `p = (I − D)^{-1} u`; fails unless `ρ(D) < 1`.
    pub fn solve(&self) -> Result<Vec<f64>> {
        let k = self.u.len();
        if k == 0 {
            return Ok(Vec::new());
        }
        let rho = self.spectral_radius();
        if !(rho < 1.0) {
            return Err(Error::Mapping(rho));
        }
        let a = DMatrix::identity(k, k) - &self.d;
        let p = a.lu().solve(&self.u).ok_or(Error::Mapping(rho))?;
        if p.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::Mapping(rho));
        }
        Ok(p.iter().copied().collect())
    }
}

/// Downlink powers for the given receive directions (uplink-to-downlink map).
pub fn downlink_power_map(receivers: &[CVector], s: &Scenario) -> Result<Vec<f64>> {
    PowerCouplingSystem::build(receivers, s)?.solve()
}

/// Solution of the inner problem at a fixed `β` when `g(β)` is finite.
#[derive(Clone, Debug)]
pub struct InnerSolution {
    pub beams: Vec<CVector>,
    pub state: UplinkState,
    pub iterations: usize,
    /// Downlink weighted power `Σ w^H (βI − G) w`.
    pub g_value: f64,
    /// Uplink objective `Σ λ_i σ_i²`.
    pub uplink_value: f64,
    /// λ iterates including the start point, when recording is enabled.
    pub history: Vec<Vec<f64>>,
}

impl InnerSolution {
    pub fn beam_power(&self) -> f64 {
        self.beams.iter().map(|w| w.norm_squared()).sum()
    }
}

/// Outcome of `algorithm2`.
#[derive(Clone, Debug)]
pub enum InnerOutcome {
    Bounded(InnerSolution),
    /// The PSD guard fired: `g(β) = −∞`.
    Unbounded {
        beta: f64,
        lambdas: Vec<f64>,
        user: usize,
        iterations: usize,
        history: Vec<Vec<f64>>,
    },
}

impl InnerOutcome {
    pub fn bounded(&self) -> Option<&InnerSolution> {
        match self {
            InnerOutcome::Bounded(sol) => Some(sol),
            InnerOutcome::Unbounded { .. } => None,
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            InnerOutcome::Bounded(sol) => sol.iterations,
            InnerOutcome::Unbounded { iterations, .. } => *iterations,
        }
    }
}

/// Value of a dual function at one `β`.
#[derive(Clone, Debug)]
pub struct DualEval {
    pub beta: f64,
    /// `f(β)`, `+∞` when `g(β) = −∞` (or below `ξ_E` for the Type II dual).
    pub value: f64,
    pub g_value: f64,
    /// `υ(β) = P − Σ ‖w_i‖²` when the value is finite.
    pub subgradient: Option<f64>,
    pub beams: Option<Vec<CVector>>,
    pub lambdas: Option<Vec<f64>>,
    pub iterations: usize,
}

impl DualEval {
    pub fn is_infinite(&self) -> bool {
        self.value == f64::INFINITY
    }

    fn infinite(beta: f64, iterations: usize) -> Self {
        Self {
            beta,
            value: f64::INFINITY,
            g_value: f64::NEG_INFINITY,
            subgradient: None,
            beams: None,
            lambdas: None,
            iterations,
        }
    }

    fn from_inner(beta: f64, power: f64, sol: &InnerSolution) -> Self {
        Self {
            beta,
            value: beta * power - sol.g_value,
            g_value: sol.g_value,
            subgradient: Some(power - sol.beam_power()),
            beams: Some(sol.beams.clone()),
            lambdas: Some(sol.state.lambdas.clone()),
            iterations: sol.iterations,
        }
    }
}

struct FixedPoint {
    lambdas: Vec<f64>,
    iterations: usize,
    history: Vec<Vec<f64>>,
}

enum FixedPointEnd {
    Converged(FixedPoint),
    Guard { user: usize, run: FixedPoint },
}

/// Cholesky factor of `z` if every pivot is real and positive.
///
/// nalgebra's complex factorization takes square roots of negative pivots
/// without failing, so definiteness is read off the diagonal of the factor.
fn real_pivot_cholesky(z: &HermitianMatrix) -> Option<Cholesky<C64, nalgebra::Dyn>> {
    let ch = Cholesky::new(z.matrix().clone())?;
    let l = ch.l_dirty();
    let ok = (0..l.nrows()).all(|k| {
        let d = l[(k, k)];
        d.re > 0.0 && d.im.abs() <= 1e-12 * d.re && d.re.is_finite()
    });
    ok.then_some(ch)
}

/// One scenario's dual problem: energy matrix, channel outer products and
/// solver options.
#[derive(Clone, Debug)]
pub struct DualProblem<'a> {
    s: &'a Scenario,
    g: HermitianMatrix,
    xi: f64,
    v_e: CVector,
    /// Columns `h_i^H` (conjugated rows).
    hc: Vec<CVector>,
    /// `‖h_i‖²`.
    hnorm2: Vec<f64>,
    opts: SolverOptions,
    /// Divergence cap factor for infeasibility detection, when set.
    divergence_cap: Option<f64>,
}

impl<'a> DualProblem<'a> {
    pub fn new(s: &'a Scenario, opts: SolverOptions) -> Result<Self> {
        s.validate()?;
        opts.validate()?;
        let e = energy_matrix(s)?;
        Ok(Self::with_energy(s, e.g, e.xi, e.v, opts))
    }

    /// Plain sum-power minimization: `G = 0` and `β = 1`.
    pub fn min_power(s: &'a Scenario, opts: SolverOptions) -> Result<Self> {
        s.validate()?;
        opts.validate()?;
        let mut v = CVector::zeros(s.m);
        v[0] = C64::new(1.0, 0.0);
        let mut p = Self::with_energy(s, HermitianMatrix::zeros(s.m), 0.0, v, opts);
        p.divergence_cap = Some(1e12);
        Ok(p)
    }

    fn with_energy(
        s: &'a Scenario,
        g: HermitianMatrix,
        xi: f64,
        v_e: CVector,
        opts: SolverOptions,
    ) -> Self {
        Self {
            hc: s.h.iter().map(|h| h.conjugate()).collect(),
            hnorm2: s.h.iter().map(|h| h.norm_squared()).collect(),
            s,
            g,
            xi,
            v_e,
            opts,
            divergence_cap: None,
        }
    }

    pub fn scenario(&self) -> &Scenario {
        self.s
    }

    pub fn options(&self) -> &SolverOptions {
        &self.opts
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn v_e(&self) -> &CVector {
        &self.v_e
    }

    pub fn energy(&self) -> &HermitianMatrix {
        &self.g
    }

    /// `Z_i = Σ_{k≠i} λ_k h_k^H h_k + βI − G`.
    pub fn z_matrix(&self, lambdas: &[f64], beta: f64, i: usize) -> HermitianMatrix {
        let mut z = self.g.scaled(-1.0);
        z.add_identity(beta);
        for (k, &lk) in lambdas.iter().enumerate() {
            if k != i && lk != 0.0 {
                z.add_outer(&self.hc[k], lk);
            }
        }
        z
    }

    fn z_scale(&self, lambdas: &[f64], beta: f64, i: usize) -> f64 {
        let interf: f64 = lambdas
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(k, &l)| l.abs() * self.hnorm2[k])
            .sum();
        (beta.abs() + self.xi + interf).max(f64::MIN_POSITIVE)
    }

    fn lambda_ref(&self, i: usize) -> f64 {
        let scale = if self.xi > 0.0 { 2.0 * self.xi } else { 1.0 };
        self.s.gamma[i] * scale / self.hnorm2[i].max(f64::MIN_POSITIVE)
    }

    /// One coordinate of the fixed-point map with its MMSE receiver.
    ///
    /// Returns `NonPsdNoise` when `Z_i` fails the PSD test.
    pub fn m_i(&self, lambdas: &[f64], beta: f64, i: usize) -> Result<(f64, CVector)> {
        let z = self.z_matrix(lambdas, beta, i);
        let b = &self.hc[i];
        let gamma = self.s.gamma[i];
        if let Some(ch) = real_pivot_cholesky(&z) {
            let x = ch.solve(b);
            let q = b.dotc(&x).re;
            if q > 0.0 && q.is_finite() {
                let n = x.norm();
                return Ok((gamma / q, x / C64::new(n, 0.0)));
            }
        }
        // Singular or indefinite: decide on the spectrum.
        let scale = self.z_scale(lambdas, beta, i);
        let eig = hermitian_eig(&z)?;
        let min_eig = eig.min_value();
        if min_eig < -self.opts.psd_tol * scale {
            return Err(Error::NonPsdNoise { user: i, min_eig });
        }
        let thr = self.opts.psd_tol * scale;
        let m = self.s.m;
        let mut null_part = CVector::zeros(m);
        let mut range_part = CVector::zeros(m);
        let mut q = 0.0;
        for k in 0..m {
            let v = eig.vector(k);
            let c = v.dotc(b);
            if eig.values[k] > thr {
                q += c.norm_sqr() / eig.values[k];
                range_part += &v * (c / eig.values[k]);
            } else {
                null_part += &v * c;
            }
        }
        let bnorm = b.norm();
        let nn = null_part.norm();
        if nn > 1e-9 * bnorm {
            // h_i^H leaves the range of Z_i: the Rayleigh quotient reaches 0.
            return Ok((0.0, null_part / C64::new(nn, 0.0)));
        }
        if q <= 0.0 {
            return Err(Error::RankDeficient(format!(
                "channel of user {i} has no component in the range of its noise matrix"
            )));
        }
        let n = range_part.norm();
        Ok((gamma / q, range_part / C64::new(n, 0.0)))
    }

    pub fn fixed_point_map(&self, lambdas: &[f64], beta: f64) -> Result<Vec<f64>> {
        self.check_lambdas(lambdas)?;
        (0..self.s.k_i())
            .map(|i| self.m_i(lambdas, beta, i).map(|(m, _)| m))
            .collect()
    }

    pub fn mmse_receivers(&self, lambdas: &[f64], beta: f64) -> Result<Vec<CVector>> {
        self.check_lambdas(lambdas)?;
        (0..self.s.k_i())
            .map(|i| self.m_i(lambdas, beta, i).map(|(_, w)| w))
            .collect()
    }

    fn check_lambdas(&self, lambdas: &[f64]) -> Result<()> {
        if lambdas.len() != self.s.k_i() {
            return Err(Error::Dimension(format!(
                "{} uplink powers for {} users",
                lambdas.len(),
                self.s.k_i()
            )));
        }
        if lambdas.iter().any(|&l| !(l >= 0.0) || !l.is_finite()) {
            return Err(Error::InvalidInput(
                "uplink powers must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    fn iterate(&self, beta: f64, start: Vec<f64>, guard: bool) -> Result<FixedPointEnd> {
        let k = self.s.k_i();
        let record = self.opts.record_history;
        let mut lam = start;
        let mut history = if record {
            vec![lam.clone()]
        } else {
            Vec::new()
        };
        let mut first: Option<Vec<f64>> = None;
        for n in 1..=self.opts.max_fp_iters {
            let mut next = vec![0.0; k];
            for (i, slot) in next.iter_mut().enumerate() {
                match self.m_i(&lam, beta, i) {
                    Ok((m, _)) => *slot = m,
                    Err(Error::NonPsdNoise { user, .. }) if guard => {
                        return Ok(FixedPointEnd::Guard {
                            user,
                            run: FixedPoint {
                                lambdas: lam,
                                iterations: n - 1,
                                history,
                            },
                        });
                    }
                    Err(e) => return Err(e),
                }
            }
            let converged = (0..k).all(|i| {
                let scale = next[i].abs().max(self.lambda_ref(i));
                (next[i] - lam[i]).abs() <= self.opts.fp_tol * scale
            });
            if let Some(cap) = self.divergence_cap {
                let base = first.get_or_insert_with(|| next.clone());
                if next
                    .iter()
                    .zip(base.iter())
                    .any(|(&l, &b0)| l > cap * b0.max(f64::MIN_POSITIVE))
                {
                    return Err(Error::Infeasible(
                        "uplink powers diverge: SINR targets unreachable at any power".into(),
                    ));
                }
            }
            lam = next;
            if record {
                history.push(lam.clone());
            }
            if converged {
                return Ok(FixedPointEnd::Converged(FixedPoint {
                    lambdas: lam,
                    iterations: n,
                    history,
                }));
            }
        }
        Err(Error::Convergence {
            what: "uplink fixed-point iteration",
            iterations: self.opts.max_fp_iters,
        })
    }

    /// Steps d)-e): receivers at the converged powers and the downlink map.
    fn finish(&self, beta: f64, fp: FixedPoint) -> Result<InnerSolution> {
        let receivers = self.mmse_receivers(&fp.lambdas, beta)?;
        let p = downlink_power_map(&receivers, self.s)?;
        let beams: Vec<CVector> = receivers
            .iter()
            .zip(&p)
            .map(|(w, &pi)| w * C64::new(pi.sqrt(), 0.0))
            .collect();
        let mut shifted = self.g.scaled(-1.0);
        shifted.add_identity(beta);
        let g_value = beams.iter().map(|w| shifted.quad_form(w)).sum();
        let uplink_value = fp
            .lambdas
            .iter()
            .zip(&self.s.sigma2)
            .map(|(l, s2)| l * s2)
            .sum();
        Ok(InnerSolution {
            beams,
            state: UplinkState {
                beta,
                lambdas: fp.lambdas,
                receivers,
            },
            iterations: fp.iterations,
            g_value,
            uplink_value,
            history: fp.history,
        })
    }

    /// The inner problem for `β ≥ ξ_E`.
    pub fn algorithm1(&self, beta: f64, start: Option<&[f64]>) -> Result<InnerSolution> {
        let tol = self.opts.psd_tol * (self.xi + beta.abs()).max(f64::MIN_POSITIVE);
        if beta < self.xi - tol {
            return Err(Error::InvalidInput(format!(
                "algorithm1 needs beta >= xi_E ({beta:e} < {:e})",
                self.xi
            )));
        }
        let start = match start {
            Some(l) => {
                self.check_lambdas(l)?;
                l.to_vec()
            }
            None => vec![0.0; self.s.k_i()],
        };
        match self.iterate(beta, start, false)? {
            FixedPointEnd::Converged(fp) => self.finish(beta, fp),
            FixedPointEnd::Guard { .. } => unreachable!("guard disabled"),
        }
    }

    /// Uplink optimum exactly at `β = ξ_E`, reached from above.
    ///
    /// At `ξ_E` the zero vector is a spurious fixed point, so the iteration
    /// starts from the optimum at `2 ξ_E`, a supersolution.
    ///
    /// On the OeBF boundary `Σ γ_i/(1+γ_i) = 1` the optimum at `ξ_E` is not
    /// attained: the iteration creeps towards zero while the beam power
    /// diverges as `β ↓ ξ_E`. When it stalls, `β = ξ_E (1 + δ)` is tried for
    /// `δ = 10⁻², 10⁻⁴, ...` down to `bisect_tol`, each run warm-started from
    /// the last. The ladder stops early once the beam power exceeds the
    /// budget, which already certifies `υ(ξ_E) < 0`. The returned
    /// `state.beta` records the point actually used.
    pub fn solve_at_xi(&self) -> Result<(InnerSolution, InnerSolution)> {
        let above = self.algorithm1(2.0 * self.xi, None)?;
        match self.algorithm1(self.xi, Some(&above.state.lambdas)) {
            Err(Error::Convergence { .. }) => {}
            other => return Ok((other?, above)),
        }
        let mut best: Option<InnerSolution> = None;
        let mut delta: f64 = 1e-2;
        loop {
            let delta_now = delta.max(self.opts.bisect_tol);
            let warm = best.as_ref().unwrap_or(&above).state.lambdas.clone();
            match self.algorithm1(self.xi * (1.0 + delta_now), Some(&warm)) {
                Ok(sol) => {
                    let over = sol.beam_power() > self.s.power;
                    best = Some(sol);
                    if over || delta_now <= self.opts.bisect_tol {
                        break;
                    }
                }
                Err(e @ Error::Convergence { .. }) => match best {
                    Some(_) => break,
                    None => return Err(e),
                },
                Err(e) => return Err(e),
            }
            delta *= 1e-2;
        }
        Ok((best.expect("ladder ran"), above))
    }

    /// A feasible uplink start for `β < ξ_E`: the optimum at `ξ_E`.
    pub fn init_lambda(&self, beta: f64) -> Result<Vec<f64>> {
        if beta >= self.xi {
            return Err(Error::InvalidInput(
                "initial point is only needed below xi_E".into(),
            ));
        }
        Ok(self.solve_at_xi()?.0.state.lambdas)
    }

    /// The inner problem for `0 ≤ β < ξ_E` from a feasible
    /// uplink point.
    pub fn algorithm2(&self, beta: f64, lambdas0: &[f64]) -> Result<InnerOutcome> {
        self.check_lambdas(lambdas0)?;
        if beta < 0.0 {
            return Err(Error::InvalidInput("beta must be nonnegative".into()));
        }
        let mut start = lambdas0.to_vec();
        // A start failing the guard is inflated before the guard is trusted.
        for _ in 0..self.opts.max_inflations {
            let passes = (0..self.s.k_i())
                .all(|i| !matches!(self.m_i(&start, beta, i), Err(Error::NonPsdNoise { .. })));
            if passes {
                break;
            }
            start
                .iter_mut()
                .for_each(|l| *l *= self.opts.bracket_growth);
        }
        match self.iterate(beta, start, true)? {
            FixedPointEnd::Converged(fp) => {
                // The guard must also hold at the converged point.
                for i in 0..self.s.k_i() {
                    if let Err(Error::NonPsdNoise { user, .. }) = self.m_i(&fp.lambdas, beta, i) {
                        return Ok(InnerOutcome::Unbounded {
                            beta,
                            lambdas: fp.lambdas,
                            user,
                            iterations: fp.iterations,
                            history: fp.history,
                        });
                    }
                }
                Ok(InnerOutcome::Bounded(self.finish(beta, fp)?))
            }
            FixedPointEnd::Guard { user, run } => Ok(InnerOutcome::Unbounded {
                beta,
                lambdas: run.lambdas,
                user,
                iterations: run.iterations,
                history: run.history,
            }),
        }
    }

    /// The inner problem at any `β ≥ 0`, warm-started from `warm` when given.
    ///
    /// Below `ξ_E`, `warm` must be feasible for the uplink problem; the
    /// optimum at any larger `β` qualifies.
    pub fn inner(&self, beta: f64, warm: Option<&[f64]>) -> Result<InnerOutcome> {
        if beta >= self.xi {
            let start_owned;
            let start = if beta <= self.xi * (1.0 + 1e-12) && self.xi > 0.0 {
                match warm {
                    Some(w) => Some(w),
                    None => {
                        start_owned = self.algorithm1(2.0 * self.xi, None)?.state.lambdas;
                        Some(start_owned.as_slice())
                    }
                }
            } else {
                warm
            };
            return self.algorithm1(beta, start).map(InnerOutcome::Bounded);
        }
        let start = match warm {
            Some(w) => w.to_vec(),
            None => self.init_lambda(beta)?,
        };
        self.algorithm2(beta, &start)
    }

    /// Type I dual function `f1(β) = βP − g(β)`.
    pub fn f1(&self, beta: f64) -> Result<DualEval> {
        self.f1_from(beta, None)
    }

    pub fn f1_from(&self, beta: f64, warm: Option<&[f64]>) -> Result<DualEval> {
        if !(beta >= 0.0) {
            return Err(Error::InvalidInput("beta must be nonnegative".into()));
        }
        Ok(match self.inner(beta, warm)? {
            InnerOutcome::Bounded(sol) => DualEval::from_inner(beta, self.s.power, &sol),
            InnerOutcome::Unbounded { iterations, .. } => DualEval::infinite(beta, iterations),
        })
    }

    /// Type II dual function: `+∞` below `ξ_E`, equal to `f1` above.
    pub fn f2(&self, beta: f64) -> Result<DualEval> {
        if !(beta >= 0.0) {
            return Err(Error::InvalidInput("beta must be nonnegative".into()));
        }
        if beta < self.xi {
            return Ok(DualEval::infinite(beta, 0));
        }
        self.f1(beta)
    }
}
