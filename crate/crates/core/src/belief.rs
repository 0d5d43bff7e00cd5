//! MAP belief updates for the returns-to-scale parameter.

use crate::error::{ensure, Result};
use crate::model::{LearningMode, SectorParams};
use crate::normal;

/// A firm's current MAP estimate and sufficient statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeliefState {
    /// Current MAP estimate, truncated at zero but not clamped.
    pub zeta: f64,
    pub mode: LearningMode,
    /// Running sum of z * s (path-dependent only).
    pub pd_sum_zs: f64,
    /// Running sum of z^2 (path-dependent only).
    pub pd_sum_zz: f64,
    /// Number of absorbed observations.
    pub history_len: usize,
}

impl BeliefState {
    /// Prior state with zeta = zeta0.
    pub fn new(params: &SectorParams, mode: LearningMode) -> Self {
        Self {
            zeta: params.zeta0,
            mode,
            pd_sum_zs: 0.0,
            pd_sum_zz: 0.0,
            history_len: 0,
        }
    }

    /// Clamped belief used for input decisions.
    pub fn zeta_hat(&self, params: &SectorParams) -> f64 {
        clamp_belief(self.zeta, params)
    }

    /// Untruncated path-dependent location (zeta0 + gamma * sum zs) / (1 + gamma * sum zz).
    pub fn pd_location(&self, params: &SectorParams) -> f64 {
        pd_location(params, self.pd_sum_zs, self.pd_sum_zz)
    }
}

/// max(lo, min(hi, zeta)).
pub fn clamp_belief(zeta: f64, params: &SectorParams) -> f64 {
    zeta.min(params.zeta_hi).max(params.zeta_lo)
}

/// Observation pair z = ln l, s = ln x - m from levels.
pub fn observation(l: f64, x: f64, m: f64) -> (f64, f64) {
    (l.ln(), x.ln() - m)
}

fn check_obs(z: f64, s: f64) -> Result<()> {
    ensure(!z.is_nan() && z != f64::INFINITY, || format!("invalid log-labor {z}"))?;
    ensure(s.is_finite() || z == f64::NEG_INFINITY, || format!("invalid signal {s}"))?;
    Ok(())
}

fn pd_location(params: &SectorParams, sum_zs: f64, sum_zz: f64) -> f64 {
    let g = params.gamma();
    if g.is_finite() {
        (params.zeta0 + g * sum_zs) / (1.0 + g * sum_zz)
    } else if sum_zz > 0.0 {
        sum_zs / sum_zz
    } else {
        params.zeta0
    }
}

fn pi_location(params: &SectorParams, zeta: f64, z: f64, s: f64) -> f64 {
    let g = params.gamma();
    if g.is_finite() {
        (zeta + g * z * s) / (1.0 + g * z * z)
    } else if z != 0.0 {
        s / z
    } else {
        zeta
    }
}

/// Path-dependent update. `z = -inf` (zero labor) leaves the state unchanged.
pub fn pd_update(state: &BeliefState, z: f64, s: f64, params: &SectorParams) -> Result<BeliefState> {
    ensure(state.mode == LearningMode::PD, || "pd_update on a PI state".into())?;
    check_obs(z, s)?;
    if z == f64::NEG_INFINITY {
        return Ok(*state);
    }
    let sum_zs = state.pd_sum_zs + z * s;
    let sum_zz = state.pd_sum_zz + z * z;
    Ok(BeliefState {
        zeta: pd_location(params, sum_zs, sum_zz).max(0.0),
        mode: LearningMode::PD,
        pd_sum_zs: sum_zs,
        pd_sum_zz: sum_zz,
        history_len: state.history_len + 1,
    })
}

/// Path-independent update. `z = -inf` (zero labor) leaves the state unchanged.
pub fn pi_update(state: &BeliefState, z: f64, s: f64, params: &SectorParams) -> Result<BeliefState> {
    ensure(state.mode == LearningMode::PI, || "pi_update on a PD state".into())?;
    check_obs(z, s)?;
    if z == f64::NEG_INFINITY {
        return Ok(*state);
    }
    Ok(BeliefState {
        zeta: pi_location(params, state.zeta, z, s).max(0.0),
        history_len: state.history_len + 1,
        ..*state
    })
}

/// Dispatches on the state's learning mode.
pub fn update(state: &BeliefState, z: f64, s: f64, params: &SectorParams) -> Result<BeliefState> {
    match state.mode {
        LearningMode::PD => pd_update(state, z, s, params),
        LearningMode::PI => pi_update(state, z, s, params),
    }
}

/// Weights of the common convex-combination form of both updates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnifiedWeights {
    /// Weight on the previous estimate, in (0, 1].
    pub a: f64,
    /// Centre of the effective noise, zeta_star.
    pub center: f64,
    /// Effective noise standard deviation sigma / |A(u) + B(u, w)|.
    pub noise_sd: f64,
    /// A(u) = ln E[eta^alpha] / (1 - u).
    pub a_val: f64,
    /// B(u, w) = ln(u / w) / ((1 - u) * alpha).
    pub b_val: f64,
}

/// A(u) = ln E[eta^alpha] / (1 - u).
pub fn unified_a(params: &SectorParams, alpha: f64, u: f64) -> f64 {
    params.eta_moment(alpha).ln() / (1.0 - u)
}

/// B(u, w) = ln(u / w) / ((1 - u) * alpha).
pub fn unified_b(u: f64, w: f64, alpha: f64) -> f64 {
    (u / w).ln() / ((1.0 - u) * alpha)
}

impl UnifiedWeights {
    /// Weights for one step given the actual regressor `z` of this period.
    ///
    /// `prev_sum_zz` is the path-dependent sum of squared regressors before this period
    /// (ignored for PI). `u` is the clamped belief and `w` the wage of the period; they only
    /// enter the reported A, B and noise scale.
    pub fn new(
        mode: LearningMode,
        params: &SectorParams,
        prev_sum_zz: f64,
        z: f64,
        u: f64,
        w: f64,
        alpha: f64,
    ) -> Self {
        let g = params.gamma();
        let a = if z == 0.0 {
            1.0
        } else {
            match mode {
                LearningMode::PD => {
                    (1.0 + g * prev_sum_zz) / (1.0 + g * (prev_sum_zz + z * z))
                }
                LearningMode::PI => 1.0 / (1.0 + g * z * z),
            }
        };
        let a_val = unified_a(params, alpha, u);
        let b_val = unified_b(u, w, alpha);
        Self {
            a,
            center: params.zeta_star,
            noise_sd: params.sigma / (a_val + b_val).abs(),
            a_val,
            b_val,
        }
    }
}

/// (a * zeta_t + (1 - a) * eps_star)^+.
pub fn unified_step(zeta_t: f64, weights: &UnifiedWeights, eps_star: f64) -> Result<f64> {
    ensure(weights.a > 0.0 && weights.a <= 1.0, || {
        format!("weight a = {} outside (0, 1]", weights.a)
    })?;
    if weights.a == 1.0 {
        return Ok(zeta_t.max(0.0));
    }
    Ok((weights.a * zeta_t + (1.0 - weights.a) * eps_star).max(0.0))
}

/// Probability that the path-dependent estimate falls to or below `lower_bound` given the
/// regressor history, with signal noise eps ~ Normal(m, sigma^2):
/// 1 - F((sigma^2 (zeta0 - lb) + tau^2 (zeta_star - lb) sum z^2 + m tau^2 sum z)
///        / (sigma tau^2 sqrt(sum z^2))).
///
/// With no informative history the estimate equals the prior location and the mass of the
/// zero-truncated prior below `lower_bound` is returned.
pub fn rule_of_thumb_probability(
    params: &SectorParams,
    z_history: &[f64],
    lower_bound: f64,
) -> Result<f64> {
    ensure(z_history.iter().all(|z| z.is_finite()), || "non-finite history".into())?;
    let sum_z: f64 = z_history.iter().sum();
    let sum_zz: f64 = z_history.iter().map(|z| z * z).sum();
    let (sigma, tau) = (params.sigma, params.tau);
    if sum_zz == 0.0 {
        let f0 = normal::cdf(-params.zeta0 / tau);
        let mass = (normal::cdf((lower_bound - params.zeta0) / tau) - f0) / (1.0 - f0);
        return Ok(mass.clamp(0.0, 1.0));
    }
    let num = sigma * sigma * (params.zeta0 - lower_bound)
        + tau * tau * (params.zeta_star - lower_bound) * sum_zz
        + params.m * tau * tau * sum_z;
    let den = sigma * tau * tau * sum_zz.sqrt();
    if den == 0.0 {
        return Ok(if num > 0.0 { 0.0 } else { 1.0 });
    }
    Ok(1.0 - normal::cdf(num / den))
}
