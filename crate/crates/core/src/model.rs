//! Domain types, configuration, log-normal shock utilities and reproducible shock streams.

use crate::error::{ensure, Error, Result};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_ZETA_LO: f64 = 0.05;
pub const DEFAULT_ZETA_HI: f64 = 0.95;

fn default_zeta_lo() -> f64 {
    DEFAULT_ZETA_LO
}

fn default_zeta_hi() -> f64 {
    DEFAULT_ZETA_HI
}

/// Parameters of one production sector: true returns to scale, shock law, prior and clamp bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorParams {
    pub zeta_star: f64,
    pub m: f64,
    pub sigma: f64,
    pub tau: f64,
    pub zeta0: f64,
    #[serde(default = "default_zeta_lo")]
    pub zeta_lo: f64,
    #[serde(default = "default_zeta_hi")]
    pub zeta_hi: f64,
}

impl SectorParams {
    /// Sector with default clamp bounds.
    pub fn new(zeta_star: f64, m: f64, sigma: f64, tau: f64, zeta0: f64) -> Self {
        Self {
            zeta_star,
            m,
            sigma,
            tau,
            zeta0,
            zeta_lo: DEFAULT_ZETA_LO,
            zeta_hi: DEFAULT_ZETA_HI,
        }
    }

    /// Signal-to-noise ratio (tau/sigma)^2. Infinite when sigma = 0.
    pub fn gamma(&self) -> f64 {
        if self.sigma == 0.0 {
            f64::INFINITY
        } else {
            (self.tau / self.sigma).powi(2)
        }
    }

    /// Checks the documented invariants. `sigma = 0` is accepted as the deterministic-shock case.
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.zeta_star,
            self.m,
            self.sigma,
            self.tau,
            self.zeta0,
            self.zeta_lo,
            self.zeta_hi,
        ];
        ensure(all.iter().all(|v| v.is_finite()), || {
            format!("non-finite sector parameter in {self:?}")
        })?;
        ensure(
            0.0 < self.zeta_lo
                && self.zeta_lo <= self.zeta_star
                && self.zeta_star <= self.zeta_hi
                && self.zeta_hi < 1.0,
            || {
                format!(
                    "need 0 < zeta_lo <= zeta_star <= zeta_hi < 1, got {} / {} / {}",
                    self.zeta_lo, self.zeta_star, self.zeta_hi
                )
            },
        )?;
        ensure(self.sigma >= 0.0, || format!("sigma must be >= 0, got {}", self.sigma))?;
        ensure(self.tau > 0.0, || format!("tau must be > 0, got {}", self.tau))?;
        ensure(self.zeta0 >= 0.0, || format!("zeta0 must be >= 0, got {}", self.zeta0))?;
        Ok(())
    }

    /// E[eta^alpha] under this sector's shock law.
    pub fn eta_moment(&self, alpha: f64) -> f64 {
        (alpha * self.m + 0.5 * alpha * alpha * self.sigma * self.sigma).exp()
    }
}

/// Learning rule used by every firm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LearningMode {
    /// Path-dependent: full history, fixed prior.
    PD,
    /// Path-independent: last observation, prior re-centred on the previous estimate.
    PI,
}

/// A per-period schedule indexed by t = 1..=T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Schedule {
    Constant(f64),
    /// value(t) = start + growth * (t - 1)
    LinearGrowth { start: f64, growth: f64 },
    /// value(t) = values[t - 1]
    Explicit(Vec<f64>),
}

impl Schedule {
    /// Value at period `t` (1-based).
    pub fn at(&self, t: usize) -> f64 {
        debug_assert!(t >= 1);
        match self {
            Schedule::Constant(v) => *v,
            Schedule::LinearGrowth { start, growth } => start + growth * (t as f64 - 1.0),
            Schedule::Explicit(v) => v[t - 1],
        }
    }

    fn validate(&self, name: &str, horizon: usize) -> Result<()> {
        match self {
            Schedule::Explicit(v) => ensure(v.len() >= horizon, || {
                format!("{name}: explicit schedule has {} entries, horizon is {horizon}", v.len())
            })?,
            Schedule::Constant(v) => ensure(v.is_finite(), || format!("{name}: non-finite"))?,
            Schedule::LinearGrowth { start, growth } => {
                ensure(start.is_finite() && growth.is_finite(), || {
                    format!("{name}: non-finite")
                })?
            }
        }
        for t in 1..=horizon {
            let v = self.at(t);
            ensure(v.is_finite() && v >= 0.0, || {
                format!("{name}: value {v} at t={t} must be finite and >= 0")
            })?;
        }
        Ok(())
    }
}

/// Disutility exponent for endogenous labor supply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndogenousLabor {
    pub r: f64,
}

/// Full economy configuration, loadable from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomyConfig {
    pub alpha: f64,
    pub sectors: Vec<SectorParams>,
    pub horizon: usize,
    /// Total labor supply delta(t). Required unless `endogenous_labor` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labor_supply: Option<Schedule>,
    /// Sector-0 labor l0(t). Defaults to 0.1 * delta(t), or 0 under endogenous labor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l0: Option<Schedule>,
    pub learning_mode: LearningMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endogenous_labor: Option<EndogenousLabor>,
    pub seed: u64,
}

impl EconomyConfig {
    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: EconomyConfig = serde_json::from_str(text).map_err(|e| {
            Error::Config(format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.alpha > 0.0 && self.alpha < 1.0, || {
            format!("alpha must lie in (0,1), got {}", self.alpha)
        })?;
        ensure(!self.sectors.is_empty(), || "at least one sector required".into())?;
        ensure(self.horizon >= 1, || "horizon must be positive".into())?;
        for (i, s) in self.sectors.iter().enumerate() {
            s.validate()
                .map_err(|e| Error::InvalidInput(format!("sector {i}: {e}")))?;
        }
        if let Some(l0) = &self.l0 {
            l0.validate("l0", self.horizon)?;
        }
        match (&self.endogenous_labor, &self.labor_supply) {
            (Some(e), supply) => {
                ensure(e.r > 1.0 && e.r.is_finite(), || {
                    format!("endogenous_labor.r must exceed 1, got {}", e.r)
                })?;
                if let Some(s) = supply {
                    s.validate("labor_supply", self.horizon)?;
                }
            }
            (None, None) => {
                return Err(Error::InvalidInput(
                    "labor_supply is required when endogenous_labor is absent".into(),
                ))
            }
            (None, Some(s)) => {
                s.validate("labor_supply", self.horizon)?;
                for t in 1..=self.horizon {
                    let target = self.delta(t) - self.l0_at(t);
                    ensure(target > 0.0, || {
                        format!("delta(t) - l0(t) must be > 0, got {target} at t={t}")
                    })?;
                }
            }
        }
        Ok(())
    }

    /// Exogenous labor supply at period t (NaN under endogenous labor without a schedule).
    pub fn delta(&self, t: usize) -> f64 {
        self.labor_supply.as_ref().map_or(f64::NAN, |s| s.at(t))
    }

    /// Sector-0 labor at period t.
    pub fn l0_at(&self, t: usize) -> f64 {
        match (&self.l0, &self.endogenous_labor) {
            (Some(s), _) => s.at(t),
            (None, Some(_)) => 0.0,
            (None, None) => 0.1 * self.delta(t),
        }
    }

    pub fn n_sectors(&self) -> usize {
        self.sectors.len()
    }
}

/// One realized productivity shock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockDraw {
    pub eta: f64,
    pub eps: f64,
}

impl ShockDraw {
    pub fn from_eps(eps: f64) -> Self {
        Self { eta: eps.exp(), eps }
    }
}

/// E[eta^a] for ln eta ~ Normal(m, sigma^2).
pub fn lognormal_moment(m: f64, sigma: f64, a: f64) -> Result<f64> {
    ensure(m.is_finite() && sigma.is_finite() && a.is_finite(), || {
        format!("non-finite input m={m} sigma={sigma} a={a}")
    })?;
    ensure(sigma >= 0.0, || format!("sigma must be >= 0, got {sigma}"))?;
    Ok((a * m + 0.5 * a * a * sigma * sigma).exp())
}

/// Mean productivity q = exp(m + sigma^2 / 2).
pub fn mean_productivity(params: &SectorParams) -> f64 {
    (params.m + 0.5 * params.sigma * params.sigma).exp()
}

/// Independent random-number lanes so different uses never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Lane {
    Production = 0,
    Inputs = 1,
    Signal = 2,
    Auxiliary = 3,
}

const SECTOR_BITS: u32 = 20;
const REP_BITS: u32 = 36;

/// Counter-based standard-normal stream keyed by (seed, lane, sector, replication).
///
/// Draw `k` is a pure function of the key and `k`: ChaCha8 keyed by the seed, with the
/// stream id encoding (lane, sector, replication) and the block counter encoding `k`.
#[derive(Clone)]
pub struct ShockStream {
    rng: ChaCha8Rng,
}

impl ShockStream {
    pub fn new(seed: u64, sector: usize, replication: usize) -> Self {
        Self::with_lane(seed, Lane::Production, sector, replication)
    }

    pub fn with_lane(seed: u64, lane: Lane, sector: usize, replication: usize) -> Self {
        assert!((sector as u64) < (1 << SECTOR_BITS), "sector index too large");
        assert!((replication as u64) < (1 << REP_BITS), "replication index too large");
        let stream = ((lane as u64) << (SECTOR_BITS + REP_BITS))
            | ((sector as u64) << REP_BITS)
            | replication as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    fn uniform_open(x: u64) -> f64 {
        ((x >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw number `k` (Box-Muller, cosine branch, 4 words per draw).
    pub fn std_normal(&mut self, k: u64) -> f64 {
        self.rng.set_word_pos(4 * k as u128);
        let u1 = Self::uniform_open(self.rng.next_u64());
        let u2 = Self::uniform_open(self.rng.next_u64());
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Uniform draw on (0,1) at counter `k` (shares the counter space of `std_normal`).
    pub fn uniform(&mut self, k: u64) -> f64 {
        self.rng.set_word_pos(4 * k as u128);
        Self::uniform_open(self.rng.next_u64())
    }

    /// Shock draw `k` with eps ~ Normal(m, sigma^2).
    pub fn draw(&mut self, k: u64, m: f64, sigma: f64) -> ShockDraw {
        ShockDraw::from_eps(m + sigma * self.std_normal(k))
    }

    /// The first `len` draws for the given law.
    pub fn draws(&mut self, len: usize, m: f64, sigma: f64) -> Vec<ShockDraw> {
        (0..len as u64).map(|k| self.draw(k, m, sigma)).collect()
    }
}

/// Deterministic sequence of draws for a (seed, sector, replication) triple.
pub fn shock_stream(
    seed: u64,
    sector: usize,
    replication: usize,
    m: f64,
    sigma: f64,
) -> impl Iterator<Item = ShockDraw> {
    let mut s = ShockStream::new(seed, sector, replication);
    (0u64..).map(move |k| s.draw(k, m, sigma))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lognormal_examples() {
        assert_eq!(lognormal_moment(0.0, 0.0, 0.5).unwrap(), 1.0);
        assert!((lognormal_moment(0.0, 1.0, 1.0).unwrap() - 1.6487212707001282).abs() < 1e-15);
        assert!((lognormal_moment(0.0, 0.1, 0.5).unwrap() - 1.0012507815756226).abs() < 1e-15);
        assert!(lognormal_moment(f64::NAN, 1.0, 1.0).is_err());
        assert!(lognormal_moment(0.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn mean_productivity_examples() {
        let mut p = SectorParams::new(0.5, 0.0, 0.0, 0.1, 0.1);
        assert_eq!(mean_productivity(&p), 1.0);
        p.sigma = 1.0;
        assert!((mean_productivity(&p) - 1.6487212707001282).abs() < 1e-15);
        p.sigma = 0.0;
        p.m = 1.0;
        assert!((mean_productivity(&p) - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn stream_is_order_independent() {
        let mut a = ShockStream::new(1, 0, 0);
        let forward: Vec<f64> = (0..50).map(|k| a.std_normal(k)).collect();
        let mut b = ShockStream::new(1, 0, 0);
        let backward: Vec<f64> = (0..50).rev().map(|k| b.std_normal(k)).collect();
        let backward: Vec<f64> = backward.into_iter().rev().collect();
        assert_eq!(forward, backward);
        let other: Vec<f64> = shock_stream(1, 0, 1, 0.0, 1.0).take(50).map(|d| d.eps).collect();
        assert_ne!(forward, other);
    }

    #[test]
    fn draw_is_consistent() {
        let d = ShockStream::new(9, 2, 3).draw(5, 0.3, 0.2);
        assert_eq!(d.eta, d.eps.exp());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let text = r#"{"alpha":0.5,"sectors":[{"zeta_star":0.5,"m":0,"sigma":0.1,"tau":0.1,"zeta0":0.1}],
            "horizon":10,"labor_supply":{"constant":10},"learning_mode":"PD","seed":1,"bogus":3}"#;
        let err = EconomyConfig::from_json(text).unwrap_err();
        assert!(err.is_config());
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn config_defaults() {
        let text = r#"{"alpha":0.5,"sectors":[{"zeta_star":0.5,"m":0,"sigma":0.1,"tau":0.1,"zeta0":0.1}],
            "horizon":10,"labor_supply":{"linear_growth":{"start":11,"growth":1}},"learning_mode":"PI","seed":1}"#;
        let cfg = EconomyConfig::from_json(text).unwrap();
        assert_eq!(cfg.sectors[0].zeta_lo, 0.05);
        assert_eq!(cfg.sectors[0].zeta_hi, 0.95);
        assert_eq!(cfg.delta(3), 13.0);
        assert!((cfg.l0_at(3) - 1.3).abs() < 1e-15);
        let back = EconomyConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }
}
