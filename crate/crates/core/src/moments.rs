//! Closed-form expectation, variance and mode of the next MAP estimate, limit analysis,
//! the deterministic mode recursion and mean-field input paths.

use crate::belief::{self, BeliefState};
use crate::equilibrium::{clear_period, Supply};
use crate::error::{Error, Result};
use crate::model::{mean_productivity, EconomyConfig, ShockDraw, SectorParams};
use crate::normal;
use std::f64::consts::PI;

/// How the shocks behind a path-dependent history combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseModel {
    /// Independent shocks per period: scale gamma * sigma * sqrt(sum z^2) / (1 + gamma sum z^2).
    #[default]
    Independent,
    /// One shock shared by all periods: scale gamma * sigma * sum z / (1 + gamma sum z^2).
    Common,
}

/// Moments of the next MAP estimate (v + phi * e)^+ with e standard normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub expectation: f64,
    pub second_moment: f64,
    pub variance: f64,
    pub mode: f64,
    /// Location of the untruncated Gaussian.
    pub vbar: f64,
    /// Scale of the untruncated Gaussian (signed as computed).
    pub phibar: f64,
    /// 1 - F(-|v/phi|).
    pub big_f: f64,
    /// f(-|v/phi|).
    pub small_f: f64,
}

fn truncation_factors(v: f64, phi: f64) -> (f64, f64) {
    if phi == 0.0 {
        return (if v > 0.0 { 1.0 } else { 0.0 }, 0.0);
    }
    let r = v / phi.abs();
    (normal::cdf(r), normal::pdf(r))
}

/// True when the continuous peak dominates the atom at zero:
/// 1 / (|phi| sqrt(2 pi)) >= F(-|v/phi|).
pub fn peak_dominates(v: f64, phi: f64) -> bool {
    if phi == 0.0 {
        return true;
    }
    let phi = phi.abs();
    phi * (2.0 * PI).sqrt() * normal::cdf(-(v / phi).abs()) <= 1.0
}

/// Moments of (v + phi e)^+ for any real location v.
pub fn truncated_report(v: f64, phi: f64) -> MomentReport {
    let (big_f, small_f) = truncation_factors(v, phi);
    let a = phi.abs();
    let expectation = v * big_f + a * small_f;
    let second_moment = (v * v + a * a) * big_f + v * a * small_f;
    MomentReport {
        expectation,
        second_moment,
        variance: second_moment - expectation * expectation,
        mode: if v > 0.0 && peak_dominates(v, phi) { v } else { 0.0 },
        vbar: v,
        phibar: phi,
        big_f,
        small_f,
    }
}

/// (vbar, phibar) of the path-dependent estimate after absorbing `z_history`.
pub fn pd_location_scale(z_history: &[f64], params: &SectorParams, noise: NoiseModel) -> (f64, f64) {
    let z1: f64 = z_history.iter().sum();
    let z2: f64 = z_history.iter().map(|z| z * z).sum();
    let g = params.gamma();
    if !g.is_finite() {
        return if z2 > 0.0 { (params.zeta_star, 0.0) } else { (params.zeta0, 0.0) };
    }
    let den = 1.0 + g * z2;
    let v = (params.zeta0 + g * params.zeta_star * z2) / den;
    let phi = match noise {
        NoiseModel::Independent => g * params.sigma * z2.sqrt() / den,
        NoiseModel::Common => g * params.sigma * z1 / den,
    };
    (v, phi)
}

/// Moments of the path-dependent estimate after the history, with independent shocks.
pub fn pd_moments(z_history: &[f64], params: &SectorParams) -> MomentReport {
    pd_moments_with(z_history, params, NoiseModel::Independent)
}

pub fn pd_moments_with(z_history: &[f64], params: &SectorParams, noise: NoiseModel) -> MomentReport {
    let (v, phi) = pd_location_scale(z_history, params, noise);
    truncated_report(v, phi)
}

/// Mode of the path-dependent estimate: vbar when the peak dominates, else 0.
pub fn pd_mode(z_history: &[f64], params: &SectorParams) -> f64 {
    pd_moments(z_history, params).mode
}

pub fn pd_mode_with(z_history: &[f64], params: &SectorParams, noise: NoiseModel) -> f64 {
    pd_moments_with(z_history, params, noise).mode
}

/// (vbar, phibar) of the path-independent estimate from zeta_t and one regressor.
pub fn pi_location_scale(zeta_t: f64, z: f64, params: &SectorParams) -> (f64, f64) {
    let g = params.gamma();
    if !g.is_finite() {
        return if z != 0.0 { (params.zeta_star, 0.0) } else { (zeta_t, 0.0) };
    }
    let den = 1.0 + g * z * z;
    ((zeta_t + g * params.zeta_star * z * z) / den, g * params.sigma * z / den)
}

pub fn pi_moments(zeta_t: f64, z: f64, params: &SectorParams) -> MomentReport {
    let (v, phi) = pi_location_scale(zeta_t, z, params);
    truncated_report(v, phi)
}

pub fn pi_mode(zeta_t: f64, z: f64, params: &SectorParams) -> f64 {
    pi_moments(zeta_t, z, params).mode
}

/// Limit of a running sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Limit {
    Finite(f64),
    PosInf,
    NegInf,
}

impl Limit {
    fn is_infinite(self) -> bool {
        !matches!(self, Limit::Finite(_))
    }
}

/// Caller-stated limits of the regressor sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitDescriptor {
    /// Limit of sum z.
    pub z1_limit: Limit,
    /// Limit of sum z^2 (finite value >= 0 or PosInf).
    pub z2_limit: Limit,
    /// Limit of (zeta0 + gamma zeta_star sum z^2) / (gamma sigma sum z), when both sums diverge.
    pub ratio_limit: Option<Limit>,
    /// Limit of |sum z| / sum z^2, needed when `ratio_limit` is finite.
    pub abs_z1_over_z2: Option<f64>,
}

/// Finite limit value or divergence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitValue {
    Finite(f64),
    PosInf,
}

/// Case label (1 to 5) and limit of the path-dependent expected belief.
pub fn pd_limit_expectation(desc: &LimitDescriptor, params: &SectorParams) -> Result<(u8, LimitValue)> {
    let bad = |m: &str| Err(Error::InvalidInput(format!("inconsistent limit descriptor: {m}")));
    let g = params.gamma();
    let (zs, z0, sigma) = (params.zeta_star, params.zeta0, params.sigma);
    match (desc.z1_limit, desc.z2_limit) {
        (_, Limit::NegInf) => bad("sum of squares cannot diverge to -inf"),
        (_, Limit::Finite(l2)) if l2 < 0.0 => bad("sum of squares must be >= 0"),
        (Limit::Finite(l1), Limit::Finite(l2)) => {
            if l1 == 0.0 {
                return Ok((2, LimitValue::Finite((z0 + g * zs * l2) / (1.0 + g * l2))));
            }
            let den = 1.0 + g * l2;
            let v = (z0 + g * zs * l2) / den;
            let phi = g * sigma * l1 / den;
            let (big_g, small_g) = truncation_factors(v, phi);
            let val = ((z0 + g * zs * l2) * big_g + sigma * g * l1.abs() * small_g) / den;
            Ok((2, LimitValue::Finite(val)))
        }
        (Limit::Finite(_), Limit::PosInf) => Ok((3, LimitValue::Finite(zs))),
        (z1, Limit::Finite(_)) if z1.is_infinite() => Ok((4, LimitValue::PosInf)),
        (_, Limit::PosInf) => match desc.ratio_limit {
            Some(Limit::Finite(l)) => {
                let Some(k) = desc.abs_z1_over_z2 else {
                    return bad("case 1 needs the limit of |sum z| / sum z^2");
                };
                let l = l.abs();
                Ok((1, LimitValue::Finite(zs * (1.0 - normal::cdf(-l)) + sigma * normal::pdf(-l) * k)))
            }
            Some(_) => Ok((5, LimitValue::Finite(zs))),
            None => bad("both sums diverge but the ratio limit is missing"),
        },
        _ => bad("unsupported combination"),
    }
}

/// Limit behaviour of labor input for the path-independent limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LaborLimit {
    Finite(f64),
    Diverges,
}

/// Path-independent limit of the expected belief. When labor tends to 1 the partial product
/// over the supplied history is used.
pub fn pi_limit_expectation(l_limit: LaborLimit, z_history: &[f64], params: &SectorParams) -> f64 {
    match l_limit {
        LaborLimit::Finite(l) if l == 1.0 => {
            let g = params.gamma();
            let prod: f64 = z_history.iter().map(|z| 1.0 + g * z * z).product();
            params.zeta_star + (params.zeta0 - params.zeta_star) / prod
        }
        _ => params.zeta_star,
    }
}

/// One step of the deterministic path-independent mode recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSequenceState {
    /// Whether the period keeps the mode away from zero.
    pub psi_membership: bool,
    /// Mode after the step.
    pub current_vbar: f64,
}

/// Iterates v(t+1) = 1[t] (v(t) + gamma zeta_star z(t)^2) / (1 + gamma z(t)^2) from v(0) = zeta0.
pub fn mode_sequence_pi(z_schedule: &[f64], params: &SectorParams) -> Vec<ModeSequenceState> {
    let mut v = params.zeta0;
    z_schedule
        .iter()
        .map(|&z| {
            let (vv, phi) = pi_location_scale(v, z, params);
            let member = peak_dominates(vv, phi);
            v = if member { vv } else { 0.0 };
            ModeSequenceState { psi_membership: member, current_vbar: v }
        })
        .collect()
}

/// Product-sum form of the mode recursion given the membership indicators:
/// prod_s a_s * v(0) + zeta_star * sum_h gamma z_h^2 prod_{s >= h} a_s, a_s = 1[s] / (1 + gamma z_s^2).
pub fn mode_closed_form(z_schedule: &[f64], membership: &[bool], params: &SectorParams) -> f64 {
    let g = params.gamma();
    let a: Vec<f64> = z_schedule
        .iter()
        .zip(membership)
        .map(|(z, &m)| if m { 1.0 / (1.0 + g * z * z) } else { 0.0 })
        .collect();
    let t = a.len();
    let mut total = params.zeta0 * a.iter().product::<f64>();
    for h in 0..t {
        let tail: f64 = a[h..].iter().product();
        total += params.zeta_star * g * z_schedule[h] * z_schedule[h] * tail;
    }
    total
}

/// Deterministic path obtained by replacing every shock with its mean.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldPath {
    /// z[i][t-1] = ln l_i(t).
    pub z: Vec<Vec<f64>>,
    /// zeta[i][t-1] = belief used at period t (before the update).
    pub zeta: Vec<Vec<f64>>,
    pub wage: Vec<f64>,
}

impl MeanFieldPath {
    /// Running sums (sum z, sum z^2) for sector i after each period.
    pub fn running_sums(&self, i: usize) -> Vec<(f64, f64)> {
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        self.z[i]
            .iter()
            .map(|z| {
                s1 += z;
                s2 += z * z;
                (s1, s2)
            })
            .collect()
    }

    /// Path-dependent expected belief after each period for sector i.
    pub fn pd_expectations(&self, i: usize, params: &SectorParams) -> Vec<f64> {
        (1..=self.z[i].len())
            .map(|t| pd_moments(&self.z[i][..t], params).expectation)
            .collect()
    }
}

/// Runs the decision-estimation loop with every shock replaced by its mean q.
pub fn mean_field_labor_path(config: &EconomyConfig) -> Result<MeanFieldPath> {
    config.validate()?;
    let n = config.n_sectors();
    let mut states: Vec<BeliefState> = config
        .sectors
        .iter()
        .map(|p| BeliefState::new(p, config.learning_mode))
        .collect();
    let shocks: Vec<ShockDraw> = config
        .sectors
        .iter()
        .map(|p| ShockDraw::from_eps(mean_productivity(p).ln()))
        .collect();
    let mut path = MeanFieldPath {
        z: vec![Vec::with_capacity(config.horizon); n],
        zeta: vec![Vec::with_capacity(config.horizon); n],
        wage: Vec::with_capacity(config.horizon),
    };
    for t in 1..=config.horizon {
        let beliefs: Vec<f64> = states
            .iter()
            .zip(&config.sectors)
            .map(|(s, p)| s.zeta_hat(p))
            .collect();
        let supply = match config.endogenous_labor {
            Some(e) => Supply::Endogenous { r: e.r },
            None => Supply::Exogenous { delta: config.delta(t) },
        };
        let out = clear_period(&config.sectors, &beliefs, &shocks, supply, config.l0_at(t), config.alpha)
            .map_err(|e| Error::Period { period: t, source: Box::new(e) })?;
        path.wage.push(out.w);
        for i in 0..n {
            let p = &config.sectors[i];
            let (z, s) = belief::observation(out.labor[i], out.output[i], p.m);
            path.z[i].push(z);
            path.zeta[i].push(states[i].zeta);
            states[i] = belief::update(&states[i], z, s, p)?;
        }
    }
    Ok(path)
}

/// Diagnostic guess of the limit descriptor from a finite path: a running sum is treated as
/// divergent when the log-log slope of its magnitude over the last 20% of the horizon exceeds
/// `slope_tol`. Finite data cannot certify limits; not used for acceptance decisions.
pub fn classify_limit_heuristic(z: &[f64], params: &SectorParams, slope_tol: f64) -> LimitDescriptor {
    let t = z.len();
    let mut s1 = Vec::with_capacity(t);
    let mut s2 = Vec::with_capacity(t);
    let (mut a, mut b) = (0.0, 0.0);
    for v in z {
        a += v;
        b += v * v;
        s1.push(a);
        s2.push(b);
    }
    let start = (t as f64 * 0.8) as usize;
    let slope = |s: &[f64]| -> f64 {
        let pts: Vec<(f64, f64)> = (start.max(1)..t)
            .filter(|&k| s[k].abs() > 0.0)
            .map(|k| (((k + 1) as f64).ln(), s[k].abs().ln()))
            .collect();
        if pts.len() < 2 {
            return 0.0;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    };
    let last1 = s1.last().copied().unwrap_or(0.0);
    let last2 = s2.last().copied().unwrap_or(0.0);
    let z1_limit = if slope(&s1) > slope_tol {
        if last1 > 0.0 { Limit::PosInf } else { Limit::NegInf }
    } else {
        Limit::Finite(last1)
    };
    let z2_limit = if slope(&s2) > slope_tol { Limit::PosInf } else { Limit::Finite(last2) };
    let (ratio_limit, abs_z1_over_z2) = if z1_limit.is_infinite() && z2_limit.is_infinite() {
        let g = params.gamma();
        let ratio: Vec<f64> = s1
            .iter()
            .zip(&s2)
            .map(|(a, b)| (params.zeta0 + g * params.zeta_star * b) / (g * params.sigma * a))
            .collect();
        let r = if slope(&ratio) > slope_tol {
            Limit::PosInf
        } else {
            Limit::Finite(*ratio.last().unwrap())
        };
        (Some(r), Some(last1.abs() / last2))
    } else {
        (None, None)
    };
    LimitDescriptor { z1_limit, z2_limit, ratio_limit, abs_z1_over_z2 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(gamma: f64, sigma: f64, zeta0: f64) -> SectorParams {
        SectorParams::new(0.5, 0.0, sigma, sigma * gamma.sqrt(), zeta0)
    }

    #[test]
    fn common_shock_cancels() {
        let p = params(1.0, 0.1, 0.1);
        let r = pd_moments_with(&[1.0, -1.0], &p, NoiseModel::Common);
        assert_eq!(r.phibar, 0.0);
        assert!((r.expectation - 1.1 / 3.0).abs() < 1e-15);
        assert_eq!(r.variance, 0.0);
        assert_eq!(r.mode, r.vbar);
    }

    #[test]
    fn prior_dominates_small_gamma() {
        let p = params(1e-12, 0.1, 0.3);
        let r = pd_moments(&[1.0, 2.0, 0.5], &p);
        assert!((r.expectation - 0.3).abs() < 1e-9);
    }

    #[test]
    fn pi_zero_regressor() {
        let p = params(1.0, 0.1, 0.1);
        let r = pi_moments(0.37, 0.0, &p);
        assert_eq!(r.expectation, 0.37);
        assert_eq!(r.variance, 0.0);
        assert_eq!(r.mode, 0.37);
    }

    #[test]
    fn mode_branches() {
        let p = params(1.0, 1e-6, 0.1);
        assert_eq!(pd_mode(&[1.0, 1.0], &p), pd_moments(&[1.0, 1.0], &p).vbar);
        // very noisy signal, location near zero
        let r = truncated_report(1e-3, 10.0);
        assert_eq!(r.mode, 0.0);
    }

    #[test]
    fn limit_cases() {
        let p = params(1.0, 0.1, 0.1);
        let d3 = LimitDescriptor {
            z1_limit: Limit::Finite(2.0),
            z2_limit: Limit::PosInf,
            ratio_limit: None,
            abs_z1_over_z2: None,
        };
        assert_eq!(pd_limit_expectation(&d3, &p).unwrap(), (3, LimitValue::Finite(0.5)));
        let d2 = LimitDescriptor { z1_limit: Limit::Finite(0.0), z2_limit: Limit::Finite(2.0), ..d3 };
        let (c, v) = pd_limit_expectation(&d2, &p).unwrap();
        assert_eq!(c, 2);
        assert_eq!(v, LimitValue::Finite(1.1 / 3.0));
        let d4 = LimitDescriptor { z1_limit: Limit::PosInf, z2_limit: Limit::Finite(2.0), ..d3 };
        assert_eq!(pd_limit_expectation(&d4, &p).unwrap(), (4, LimitValue::PosInf));
        let d5 = LimitDescriptor {
            z1_limit: Limit::PosInf,
            z2_limit: Limit::PosInf,
            ratio_limit: Some(Limit::PosInf),
            abs_z1_over_z2: None,
        };
        assert_eq!(pd_limit_expectation(&d5, &p).unwrap(), (5, LimitValue::Finite(0.5)));
        let d1 = LimitDescriptor { ratio_limit: Some(Limit::Finite(1.0)), ..d5 };
        assert!(pd_limit_expectation(&d1, &p).is_err());
        let d1 = LimitDescriptor { abs_z1_over_z2: Some(0.5), ..d1 };
        let (c, v) = pd_limit_expectation(&d1, &p).unwrap();
        let expect = 0.5 * (1.0 - normal::cdf(-1.0)) + 0.1 * normal::pdf(-1.0) * 0.5;
        assert_eq!((c, v), (1, LimitValue::Finite(expect)));
    }

    #[test]
    fn pi_limits() {
        let p = params(1.0, 0.1, 0.1);
        assert_eq!(pi_limit_expectation(LaborLimit::Finite(2.0), &[], &p), 0.5);
        assert!((pi_limit_expectation(LaborLimit::Finite(1.0), &[0.0; 5], &p) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn mode_sequence_geometric() {
        let p = params(1.0, 1e-4, 0.1);
        let seq = mode_sequence_pi(&[1.0; 10], &p);
        let mut gap = 0.4;
        for s in &seq {
            assert!(s.psi_membership);
            gap *= 0.5;
            assert!((0.5 - s.current_vbar - gap).abs() < 1e-12);
        }
    }
}
