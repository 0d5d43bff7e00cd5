//! Learning of nonnegative input elasticities from multi-input production.
//!
//! Each firm observes s = sigma * eps + sum_j phi * beta*_j ln y_j with regressors
//! z_j = phi ln y_j and computes the MAP of a zero-truncated Gaussian prior, i.e. the
//! nonnegative quadratic program min 1/2 b'Hb - b'β over β >= 0.

use crate::error::{ensure, Error, Result};
use crate::model::LearningMode;
use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Largest dimension solved by exhaustive enumeration of candidate active sets.
pub const ENUMERATION_MAX_N: usize = 12;
/// The maintained inverse is recomputed by direct factorization after this many rank-one steps.
pub const REFRESH_EVERY: usize = 64;

/// Parameters of the input-output learning problem for all firms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElasticityParams {
    /// True elasticity factors, row i for firm i.
    pub beta_star: Vec<Vec<f64>>,
    /// Prior locations, row i for firm i.
    pub beta0: Vec<Vec<f64>>,
    /// Material intensity in [0, 1].
    pub phi: f64,
    pub m: Vec<f64>,
    pub sigma: Vec<f64>,
    pub tau: Vec<f64>,
}

impl ElasticityParams {
    pub fn n(&self) -> usize {
        self.beta_star.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        ensure(n >= 1, || "at least one firm required".into())?;
        ensure((0.0..=1.0).contains(&self.phi), || format!("phi must lie in [0,1], got {}", self.phi))?;
        ensure(
            self.beta0.len() == n && self.m.len() == n && self.sigma.len() == n && self.tau.len() == n,
            || "per-firm vectors must have one entry per firm".into(),
        )?;
        for i in 0..n {
            ensure(self.beta_star[i].len() == n && self.beta0[i].len() == n, || {
                format!("row {i} must have {n} entries")
            })?;
            ensure(
                self.beta_star[i].iter().chain(&self.beta0[i]).all(|v| v.is_finite() && *v >= 0.0),
                || format!("row {i}: elasticities must be finite and >= 0"),
            )?;
            ensure(self.sigma[i] > 0.0 && self.sigma[i].is_finite(), || {
                format!("firm {i}: sigma must be positive")
            })?;
            ensure(self.tau[i] > 0.0 && self.tau[i].is_finite(), || {
                format!("firm {i}: tau must be positive")
            })?;
        }
        Ok(())
    }

    /// View of firm i's learning parameters.
    pub fn firm(&self, i: usize) -> FirmPrior {
        FirmPrior {
            beta0: DVector::from_column_slice(&self.beta0[i]),
            beta_star: DVector::from_column_slice(&self.beta_star[i]),
            sigma: self.sigma[i],
            tau: self.tau[i],
        }
    }
}

/// Learning parameters of a single firm.
#[derive(Debug, Clone, PartialEq)]
pub struct FirmPrior {
    pub beta0: DVector<f64>,
    pub beta_star: DVector<f64>,
    pub sigma: f64,
    pub tau: f64,
}

impl FirmPrior {
    pub fn gamma(&self) -> f64 {
        (self.tau / self.sigma).powi(2)
    }
}

/// Regressors z_j = phi ln y_j and signal s = sigma eps + sum_j phi beta*_j ln y_j.
pub fn build_signal(
    y_row: &[f64],
    l: f64,
    phi: f64,
    eps: f64,
    sigma: f64,
    beta_star: &[f64],
) -> Result<(f64, DVector<f64>)> {
    ensure(y_row.iter().all(|y| *y > 0.0 && y.is_finite()), || "inputs must be positive".into())?;
    ensure(l > 0.0, || "labor must be positive".into())?;
    ensure(y_row.len() == beta_star.len(), || "dimension mismatch".into())?;
    let z = DVector::from_iterator(y_row.len(), y_row.iter().map(|y| phi * y.ln()));
    let s = sigma * eps + z.iter().zip(beta_star).map(|(zj, b)| zj * b).sum::<f64>();
    Ok((s, z))
}

/// Per-firm MAP state.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticityState {
    /// Current MAP estimate, zero outside the active set.
    pub beta: DVector<f64>,
    /// Precision matrix H.
    pub h: DMatrix<f64>,
    /// Maintained inverse of H.
    pub h_inv: DMatrix<f64>,
    /// Linear term b.
    pub b: DVector<f64>,
    /// Indices with strictly positive estimate, ascending.
    pub active_set: Vec<usize>,
    /// Observations absorbed.
    pub t: usize,
    rank_one_steps: usize,
}

impl ElasticityState {
    /// Prior state: H = I / tau^2, b = beta0 / tau^2, beta = beta0.
    pub fn new(prior: &FirmPrior) -> Self {
        let n = prior.beta0.len();
        let p = 1.0 / (prior.tau * prior.tau);
        let beta = prior.beta0.clone();
        Self {
            active_set: support(&beta),
            beta,
            h: DMatrix::identity(n, n) * p,
            h_inv: DMatrix::identity(n, n) * (prior.tau * prior.tau),
            b: &prior.beta0 * p,
            t: 0,
            rank_one_steps: 0,
        }
    }

    /// Negative log-posterior up to a constant: 1/2 b'Hb - b'β.
    pub fn objective(&self, beta: &DVector<f64>) -> f64 {
        quad_objective(&self.h, &self.b, beta)
    }

    /// Inverse of H restricted to the active set, by direct factorization.
    pub fn active_inverse(&self) -> Option<DMatrix<f64>> {
        let hs = submatrix(&self.h, &self.active_set);
        Cholesky::new(hs).map(|c| c.inverse())
    }

    /// Largest KKT violation of the current estimate (0 when optimal).
    pub fn kkt_violation(&self) -> f64 {
        kkt_violation(&self.h, &self.b, &self.beta)
    }
}

fn support(beta: &DVector<f64>) -> Vec<usize> {
    beta.iter().enumerate().filter(|(_, v)| **v > 0.0).map(|(i, _)| i).collect()
}

fn submatrix(h: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| h[(idx[r], idx[c])])
}

fn subvector(b: &DVector<f64>, idx: &[usize]) -> DVector<f64> {
    DVector::from_iterator(idx.len(), idx.iter().map(|&i| b[i]))
}

fn quad_objective(h: &DMatrix<f64>, b: &DVector<f64>, beta: &DVector<f64>) -> f64 {
    0.5 * beta.dot(&(h * beta)) - b.dot(beta)
}

/// max over coordinates of the KKT residual: |grad| on the support, max(0, -grad) off it.
pub fn kkt_violation(h: &DMatrix<f64>, b: &DVector<f64>, beta: &DVector<f64>) -> f64 {
    let grad = h * beta - b;
    let mut worst = 0.0f64;
    for j in 0..beta.len() {
        let v = if beta[j] > 0.0 { grad[j].abs() } else { (-grad[j]).max(0.0) };
        worst = worst.max(v);
        if beta[j] < 0.0 {
            worst = f64::INFINITY;
        }
    }
    worst
}

/// H^-1 after adding z z' / sigma^2: H^-1 - u u' / (sigma^2 kappa), u = H^-1 z,
/// kappa = 1 + z' H^-1 z / sigma^2.
pub fn sherman_morrison_step(h_inv: &DMatrix<f64>, z: &DVector<f64>, sigma: f64) -> Result<DMatrix<f64>> {
    let u = h_inv * z;
    let s2 = sigma * sigma;
    let kappa = 1.0 + z.dot(&u) / s2;
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::Numerical(format!("Sherman-Morrison denominator {kappa}")));
    }
    Ok(h_inv - (&u * u.transpose()) / (s2 * kappa))
}

fn cholesky_solve(h: &DMatrix<f64>, b: &DVector<f64>, idx: &[usize]) -> Option<DVector<f64>> {
    let chol = Cholesky::new(submatrix(h, idx))?;
    Some(chol.solve(&subvector(b, idx)))
}

fn embed(n: usize, idx: &[usize], x: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(n);
    for (k, &i) in idx.iter().enumerate() {
        out[i] = x[k];
    }
    out
}

/// Nonnegative MAP by enumeration of all index sets U with H_UU^-1 b_U > 0, keeping the one
/// with the largest posterior (lexicographically smallest set among exact ties).
pub fn solve_enumeration(h: &DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, Vec<usize>)> {
    let n = b.len();
    ensure(n <= 30, || "enumeration limited to n <= 30".into())?;
    let mut best = (DVector::zeros(n), Vec::new(), 0.0f64);
    let mut sets: Vec<Vec<usize>> = (1u64..(1u64 << n))
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    sets.sort();
    for idx in sets {
        let Some(x) = cholesky_solve(h, b, &idx) else {
            return Err(Error::Numerical(format!("singular precision block {idx:?}")));
        };
        if x.iter().all(|v| *v > 0.0) {
            let beta = embed(n, &idx, &x);
            let obj = quad_objective(h, b, &beta);
            if obj < best.2 || (obj == best.2 && idx < best.1 && !best.1.is_empty()) {
                best = (beta, idx, obj);
            }
        }
    }
    Ok((best.0, best.1))
}

/// Nonnegative MAP by a primal active-set method (Lawson-Hanson style), warm-started from `start`.
pub fn solve_active_set(
    h: &DMatrix<f64>,
    b: &DVector<f64>,
    start: &[usize],
) -> Result<(DVector<f64>, Vec<usize>)> {
    let n = b.len();
    let tol = 1e-13 * (1.0 + b.amax()) * (1.0 + h.amax());
    let mut passive: Vec<usize> = Vec::new();
    let mut beta = DVector::zeros(n);
    // warm start: accept the starting set if its solution is feasible
    if !start.is_empty() {
        if let Some(x) = cholesky_solve(h, b, start) {
            if x.iter().all(|v| *v > 0.0) {
                passive = start.to_vec();
                beta = embed(n, &passive, &x);
            }
        }
    }
    for _outer in 0..(10 * n + 10) {
        let grad = b - h * &beta;
        let cand = (0..n)
            .filter(|j| !passive.contains(j))
            .max_by(|&a, &c| grad[a].total_cmp(&grad[c]));
        match cand {
            Some(j) if grad[j] > tol => passive.push(j),
            _ => {
                passive.sort();
                return Ok((beta, passive));
            }
        }
        passive.sort();
        for _inner in 0..(10 * n + 10) {
            let x = cholesky_solve(h, b, &passive)
                .ok_or_else(|| Error::Numerical("singular precision block".into()))?;
            if x.iter().all(|v| *v > 0.0) {
                beta = embed(n, &passive, &x);
                break;
            }
            let mut alpha = 1.0f64;
            for (k, &i) in passive.iter().enumerate() {
                if x[k] <= 0.0 {
                    let a = beta[i] / (beta[i] - x[k]);
                    alpha = alpha.min(a);
                }
            }
            let target = embed(n, &passive, &x);
            beta = &beta + (target - &beta) * alpha;
            passive.retain(|&i| beta[i] > 1e-15);
            for j in 0..n {
                if !passive.contains(&j) {
                    beta[j] = 0.0;
                }
            }
        }
    }
    Err(Error::Numerical("active-set iteration limit reached".into()))
}

/// Nonnegative MAP for the current (H, b): enumeration up to dimension 12, active-set beyond.
pub fn solve_nonneg_map(
    h: &DMatrix<f64>,
    b: &DVector<f64>,
    warm: &[usize],
) -> Result<(DVector<f64>, Vec<usize>)> {
    if b.len() <= ENUMERATION_MAX_N {
        solve_enumeration(h, b)
    } else {
        solve_active_set(h, b, warm)
    }
}

/// Absorbs one observation and recomputes the MAP.
pub fn hd_map_update(
    state: &ElasticityState,
    z: &DVector<f64>,
    s: f64,
    prior: &FirmPrior,
    memory: LearningMode,
) -> Result<ElasticityState> {
    let n = prior.beta0.len();
    ensure(z.len() == n, || "regressor dimension mismatch".into())?;
    ensure(z.iter().all(|v| v.is_finite()) && s.is_finite(), || "non-finite observation".into())?;
    let s2 = prior.sigma * prior.sigma;
    let t2 = prior.tau * prior.tau;
    let zz = z * z.transpose() / s2;
    let (h, b, h_inv, steps) = match memory {
        LearningMode::PD => {
            let h = &state.h + &zz;
            let b = &state.b + z * (s / s2);
            let steps = state.rank_one_steps + 1;
            let h_inv = if steps % REFRESH_EVERY == 0 {
                Cholesky::new(h.clone())
                    .ok_or_else(|| Error::Numerical("precision matrix lost definiteness".into()))?
                    .inverse()
            } else {
                sherman_morrison_step(&state.h_inv, z, prior.sigma)?
            };
            (h, b, h_inv, steps)
        }
        LearningMode::PI => {
            let h = DMatrix::identity(n, n) / t2 + &zz;
            let b = &state.beta / t2 + z * (s / s2);
            let h_inv = sherman_morrison_step(&(DMatrix::identity(n, n) * t2), z, prior.sigma)?;
            (h, b, h_inv, 1)
        }
    };
    let (beta, active_set) = solve_nonneg_map(&h, &b, &state.active_set)?;
    Ok(ElasticityState {
        beta,
        h,
        h_inv,
        b,
        active_set,
        t: state.t + 1,
        rank_one_steps: steps,
    })
}

/// One row of the small-gamma / small-phi diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitCheckRow {
    pub gamma: f64,
    pub phi: f64,
    /// max |H^-1 - tau^2 I|.
    pub deviation: f64,
    /// max |beta_asym - beta_map| with beta_asym = beta0 + gamma sum s z.
    pub asymptotic_gap: f64,
}

/// Evaluates the distance of H^-1 from tau^2 I and of the first-order form beta0 + gamma sum s z
/// from the exact path-dependent MAP, for each (gamma, phi) pair on fixed data.
///
/// `log_inputs[l]` holds ln y(l); `eps[l]` the standard-normal shock of observation l. Gamma is
/// varied through sigma = tau / sqrt(gamma); gamma = 0 means an uninformative likelihood.
pub fn limit_diagonal_check(
    prior: &FirmPrior,
    log_inputs: &[Vec<f64>],
    eps: &[f64],
    cells: &[(f64, f64)],
) -> Result<Vec<LimitCheckRow>> {
    ensure(log_inputs.len() == eps.len(), || "one shock per observation".into())?;
    let n = prior.beta0.len();
    let tau = prior.tau;
    let t2 = tau * tau;
    let mut rows = Vec::with_capacity(cells.len());
    for &(gamma, phi) in cells {
        ensure(gamma >= 0.0 && (0.0..=1.0).contains(&phi), || "invalid gamma/phi".into())?;
        let mut h = DMatrix::identity(n, n) / t2;
        let mut b = &prior.beta0 / t2;
        let mut sz = DVector::zeros(n);
        if gamma > 0.0 {
            let sigma = tau / gamma.sqrt();
            for (ly, e) in log_inputs.iter().zip(eps) {
                let z = DVector::from_iterator(n, ly.iter().map(|v| phi * v));
                let s = sigma * e + z.dot(&prior.beta_star);
                h += &z * z.transpose() / (sigma * sigma);
                b += &z * (s / (sigma * sigma));
                sz += &z * s;
            }
        }
        let h_inv = Cholesky::new(h.clone())
            .ok_or_else(|| Error::Numerical("precision matrix not positive definite".into()))?
            .inverse();
        let deviation = (h_inv - DMatrix::identity(n, n) * t2).amax();
        let (map, _) = solve_nonneg_map(&h, &b, &[])?;
        let asym = &prior.beta0 + sz * gamma;
        rows.push(LimitCheckRow {
            gamma,
            phi,
            deviation,
            asymptotic_gap: (asym - map).amax(),
        });
    }
    Ok(rows)
}

/// Configuration of an elasticity-learning run on exogenous input paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HighDimConfig {
    pub params: ElasticityParams,
    pub horizon: usize,
    pub memory: LearningMode,
    pub seed: u64,
    /// ln y_ij(t) is drawn uniformly on [log_input_lo, log_input_hi].
    #[serde(default = "default_log_lo")]
    pub log_input_lo: f64,
    #[serde(default = "default_log_hi")]
    pub log_input_hi: f64,
}

fn default_log_lo() -> f64 {
    0.0
}

fn default_log_hi() -> f64 {
    2.0
}

impl HighDimConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: HighDimConfig = serde_json::from_str(text).map_err(|e| {
            Error::Config(format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        ensure(self.horizon >= 1, || "horizon must be positive".into())?;
        ensure(
            self.log_input_lo.is_finite() && self.log_input_hi.is_finite() && self.log_input_lo <= self.log_input_hi,
            || "log-input range must be finite and ordered".into(),
        )
    }
}

/// One firm's estimate after period t.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HighDimRecord {
    pub t: usize,
    pub firm: usize,
    pub beta: Vec<f64>,
    pub active: usize,
    pub kkt: f64,
}

/// Simulates every firm's learning on random log-uniform input paths.
///
/// Input draws use the `Inputs` lane (sector = firm, replication = input index) and signal
/// shocks the `Signal` lane, so the two sources never share a stream.
pub fn simulate_elasticity_learning(cfg: &HighDimConfig) -> Result<Vec<HighDimRecord>> {
    use crate::model::{Lane, ShockStream};
    cfg.validate()?;
    let n = cfg.params.n();
    let mut out = Vec::with_capacity(n * cfg.horizon);
    let mut firms: Vec<(FirmPrior, ElasticityState, ShockStream, Vec<ShockStream>)> = (0..n)
        .map(|i| {
            let prior = cfg.params.firm(i);
            let st = ElasticityState::new(&prior);
            let sig = ShockStream::with_lane(cfg.seed, Lane::Signal, i, 0);
            let inp = (0..n).map(|j| ShockStream::with_lane(cfg.seed, Lane::Inputs, i, j)).collect();
            (prior, st, sig, inp)
        })
        .collect();
    let span = cfg.log_input_hi - cfg.log_input_lo;
    for t in 1..=cfg.horizon {
        for (i, (prior, st, sig, inp)) in firms.iter_mut().enumerate() {
            let k = (t - 1) as u64;
            let y: Vec<f64> = inp.iter_mut().map(|s| (cfg.log_input_lo + span * s.uniform(k)).exp()).collect();
            let eps = sig.std_normal(k);
            let (s, z) = build_signal(&y, 1.0, cfg.params.phi, eps, prior.sigma, prior.beta_star.as_slice())?;
            *st = hd_map_update(st, &z, s, prior, cfg.memory)
                .map_err(|e| Error::Period { period: t, source: Box::new(e) })?;
            out.push(HighDimRecord {
                t,
                firm: i,
                beta: st.beta.iter().copied().collect(),
                active: st.active_set.len(),
                kkt: st.kkt_violation(),
            });
        }
    }
    Ok(out)
}
