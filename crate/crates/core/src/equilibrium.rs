//! Per-period market clearing: labor demand, wage determination, prices, profits, GDP.

use crate::error::{ensure, Error, Result};
use crate::model::{ShockDraw, SectorParams};

/// Maximum number of doubling/halving steps when bracketing the wage.
pub const MAX_EXPANSIONS: usize = 200;
/// Relative bracket width at which bisection may stop.
pub const BISECTION_RTOL: f64 = 1e-12;
/// Residual tolerance factor: |L(w) - target| <= RESIDUAL_TOL * max(1, target).
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Labor demand l = chi * w^kappa for every sector.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandCoefficients {
    /// kappa_i = -1 / (1 - zeta_hat_i * alpha)
    pub kappa: Vec<f64>,
    /// chi_i = (E[eta_i^alpha] * zeta_hat_i)^(-kappa_i)
    pub chi: Vec<f64>,
    ln_chi: Vec<f64>,
}

impl DemandCoefficients {
    pub fn new(params: &[SectorParams], beliefs: &[f64], alpha: f64) -> Result<Self> {
        ensure(params.len() == beliefs.len(), || {
            format!("{} sectors but {} beliefs", params.len(), beliefs.len())
        })?;
        let mut kappa = Vec::with_capacity(params.len());
        let mut ln_chi = Vec::with_capacity(params.len());
        for (p, &z) in params.iter().zip(beliefs) {
            ensure(z > 0.0 && z * alpha < 1.0 && z.is_finite(), || {
                format!("belief {z} outside (0, 1/alpha)")
            })?;
            let k = -1.0 / (1.0 - z * alpha);
            kappa.push(k);
            ln_chi.push(-k * (p.eta_moment(alpha) * z).ln());
        }
        let chi = ln_chi.iter().map(|c| c.exp()).collect();
        Ok(Self { kappa, chi, ln_chi })
    }

    /// Per-sector demand at wage w.
    pub fn demand(&self, i: usize, w: f64) -> f64 {
        (self.ln_chi[i] + self.kappa[i] * w.ln()).exp()
    }

    /// Aggregate demand L(w).
    pub fn aggregate(&self, w: f64) -> f64 {
        let lw = w.ln();
        self.ln_chi
            .iter()
            .zip(&self.kappa)
            .map(|(c, k)| (c + k * lw).exp())
            .sum()
    }

    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
    }
}

/// l = (E[eta^alpha] * zeta_hat / w)^(1 / (1 - zeta_hat * alpha)).
pub fn labor_demand(params: &SectorParams, zeta_hat: f64, alpha: f64, w: f64) -> Result<f64> {
    ensure(w > 0.0 && w.is_finite(), || format!("wage must be positive, got {w}"))?;
    ensure(
        zeta_hat >= params.zeta_lo && zeta_hat <= params.zeta_hi,
        || format!("belief {zeta_hat} outside clamp bounds"),
    )?;
    let base = params.eta_moment(alpha) * zeta_hat / w;
    Ok(base.powf(1.0 / (1.0 - zeta_hat * alpha)))
}

/// L(w) = sum of sector labor demands.
pub fn aggregate_labor_demand(
    beliefs: &[f64],
    params: &[SectorParams],
    alpha: f64,
    w: f64,
) -> Result<f64> {
    ensure(params.len() == beliefs.len(), || "length mismatch".into())?;
    let mut total = 0.0;
    for (p, &z) in params.iter().zip(beliefs) {
        total += labor_demand(p, z, alpha, w)?;
    }
    Ok(total)
}

/// Root of a monotone function together with the final bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WageSolution {
    pub w: f64,
    /// Bracket endpoints; the function changes sign between them.
    pub lo: f64,
    pub hi: f64,
    /// Signed residual at `w`.
    pub residual: f64,
}

/// Finds the root of `f`, increasing in w, by doubling/halving from w = 1 then bisection.
fn increasing_root(f: impl Fn(f64) -> f64, tol: f64) -> Result<WageSolution> {
    let eval = |w: f64| -> Result<f64> {
        let v = f(w);
        if v.is_nan() {
            Err(Error::Bracket(format!("non-finite residual at w={w}")))
        } else {
            Ok(v)
        }
    };
    let (mut lo, mut hi);
    let f1 = eval(1.0)?;
    if f1 == 0.0 {
        return Ok(WageSolution { w: 1.0, lo: 1.0, hi: 1.0, residual: 0.0 });
    }
    if f1 < 0.0 {
        lo = 1.0;
        hi = 2.0;
        let mut n = 0;
        while eval(hi)? < 0.0 {
            lo = hi;
            hi *= 2.0;
            n += 1;
            if n >= MAX_EXPANSIONS || !hi.is_finite() {
                return Err(Error::Bracket(format!("no sign change below w={hi}")));
            }
        }
    } else {
        hi = 1.0;
        lo = 0.5;
        let mut n = 0;
        while eval(lo)? > 0.0 {
            hi = lo;
            lo *= 0.5;
            n += 1;
            if n >= MAX_EXPANSIONS || lo == 0.0 {
                return Err(Error::Bracket(format!("no sign change above w={lo}")));
            }
        }
    }
    let mut w = 0.5 * (lo + hi);
    let mut r = eval(w)?;
    loop {
        if r == 0.0 {
            return Ok(WageSolution { w, lo: w, hi: w, residual: 0.0 });
        }
        if r < 0.0 {
            lo = w;
        } else {
            hi = w;
        }
        let next = 0.5 * (lo + hi);
        let narrow = hi - lo <= BISECTION_RTOL * hi;
        if (narrow && r.abs() <= tol) || next == lo || next == hi {
            break;
        }
        w = next;
        r = eval(w)?;
    }
    if r.abs() > tol {
        return Err(Error::Numerical(format!(
            "wage residual {r:e} exceeds tolerance {tol:e} at w={w}"
        )));
    }
    Ok(WageSolution { w, lo, hi, residual: r })
}

/// Unique wage with L(w) = target.
pub fn solve_wage(
    beliefs: &[f64],
    params: &[SectorParams],
    alpha: f64,
    target: f64,
) -> Result<WageSolution> {
    ensure(target > 0.0 && target.is_finite(), || {
        format!("labor target must be positive, got {target}")
    })?;
    let coef = DemandCoefficients::new(params, beliefs, alpha)?;
    solve_wage_with(&coef, target)
}

/// Same as [`solve_wage`] with precomputed demand coefficients.
pub fn solve_wage_with(coef: &DemandCoefficients, target: f64) -> Result<WageSolution> {
    ensure(target > 0.0 && target.is_finite(), || {
        format!("labor target must be positive, got {target}")
    })?;
    let tol = RESIDUAL_TOL * target.max(1.0);
    // target - L(w) is increasing in w
    let mut sol = increasing_root(|w| target - coef.aggregate(w), tol)?;
    sol.residual = coef.aggregate(sol.w) - target;
    Ok(sol)
}

/// Labor supply delta*(w) = (w / r)^(1 / (r - 1)).
pub fn labor_supply_endogenous(w: f64, r: f64) -> f64 {
    (w / r).powf(1.0 / (r - 1.0))
}

/// Wage and supply under endogenous labor: root of (w/r)^(1/(r-1)) - l0 - L(w).
pub fn solve_wage_endogenous(
    beliefs: &[f64],
    params: &[SectorParams],
    alpha: f64,
    r: f64,
    l0: f64,
) -> Result<(WageSolution, f64)> {
    ensure(r > 1.0 && r.is_finite(), || format!("r must exceed 1, got {r}"))?;
    ensure(l0 >= 0.0 && l0.is_finite(), || format!("l0 must be >= 0, got {l0}"))?;
    let coef = DemandCoefficients::new(params, beliefs, alpha)?;
    solve_wage_endogenous_with(&coef, r, l0)
}

pub fn solve_wage_endogenous_with(
    coef: &DemandCoefficients,
    r: f64,
    l0: f64,
) -> Result<(WageSolution, f64)> {
    let g = |w: f64| labor_supply_endogenous(w, r) - l0 - coef.aggregate(w);
    // tolerance is checked against the realized supply below
    let mut sol = increasing_root(g, f64::INFINITY)?;
    // refine until the residual criterion is met or the bracket collapses
    let delta = labor_supply_endogenous(sol.w, r);
    let tol = RESIDUAL_TOL * delta.max(1.0);
    if sol.residual.abs() > tol {
        sol = increasing_root(g, tol)?;
    }
    sol.residual = g(sol.w);
    Ok((sol, labor_supply_endogenous(sol.w, r)))
}

/// How total labor supply is determined in a period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Supply {
    Exogenous { delta: f64 },
    Endogenous { r: f64 },
}

/// Full equilibrium of one period.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumOutcome {
    pub w: f64,
    pub labor: Vec<f64>,
    pub prices: Vec<f64>,
    pub output: Vec<f64>,
    pub profit: Vec<f64>,
    pub profit0: f64,
    /// Numeraire consumption (budget residual), equal to l0 at equilibrium.
    pub consumption0: f64,
    pub delta: f64,
    pub l0: f64,
    pub gdp: f64,
    pub labor_share: f64,
    /// Signed market-clearing residual of the wage solve.
    pub residual: f64,
}

/// Clears one period: solves the wage, then production, prices, profits, GDP and labor share.
pub fn clear_period(
    params: &[SectorParams],
    beliefs: &[f64],
    shocks: &[ShockDraw],
    supply: Supply,
    l0: f64,
    alpha: f64,
) -> Result<EquilibriumOutcome> {
    ensure(shocks.len() == params.len(), || "one shock per sector required".into())?;
    let coef = DemandCoefficients::new(params, beliefs, alpha)?;
    let (sol, delta) = match supply {
        Supply::Exogenous { delta } => (solve_wage_with(&coef, delta - l0)?, delta),
        Supply::Endogenous { r } => {
            ensure(r > 1.0, || format!("r must exceed 1, got {r}"))?;
            solve_wage_endogenous_with(&coef, r, l0)?
        }
    };
    let w = sol.w;
    let n = params.len();
    let mut labor = Vec::with_capacity(n);
    let mut output = Vec::with_capacity(n);
    let mut prices = Vec::with_capacity(n);
    let mut profit = Vec::with_capacity(n);
    for (i, p) in params.iter().enumerate() {
        let l = coef.demand(i, w);
        let x = shocks[i].eta * l.powf(p.zeta_star);
        let price = x.powf(alpha - 1.0);
        labor.push(l);
        output.push(x);
        prices.push(price);
        profit.push(price * x - w * l);
    }
    let profit0 = l0 * (1.0 - w);
    let gdp = w * delta + profit0 + profit.iter().sum::<f64>();
    let revenue: f64 = prices.iter().zip(&output).map(|(p, x)| p * x).sum();
    Ok(EquilibriumOutcome {
        w,
        labor,
        prices,
        output,
        profit,
        profit0,
        consumption0: gdp - revenue,
        delta,
        l0,
        gdp,
        labor_share: w * delta / gdp,
        residual: sol.residual,
    })
}

/// Belief thresholds guaranteeing lambda_min <= l_i and l_i <= lambda_max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaborThresholds {
    /// zeta_hat_i at or above this implies l_i >= lambda_min.
    pub lower: f64,
    /// zeta_hat_i at or below this implies l_i <= lambda_max.
    pub upper: f64,
}

/// Per-sector thresholds built from the current demand coefficients.
pub fn labor_bounds_thresholds(
    params: &[SectorParams],
    beliefs: &[f64],
    alpha: f64,
    delta: f64,
    l0: f64,
    lambda_min: f64,
    lambda_max: f64,
) -> Result<Vec<LaborThresholds>> {
    ensure(lambda_min > 0.0 && lambda_max > 0.0, || "lambda bounds must be positive".into())?;
    ensure(delta - l0 > 0.0, || "delta - l0 must be positive".into())?;
    let coef = DemandCoefficients::new(params, beliefs, alpha)?;
    let n = params.len() as f64;
    let cand: Vec<f64> = (0..params.len())
        .map(|j| ((delta - l0) / (n * coef.chi[j])).powf(1.0 / coef.kappa[j]))
        .collect();
    let w_hi = cand.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w_lo = cand.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(params
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let e = p.eta_moment(alpha);
            let k = coef.kappa[i];
            LaborThresholds {
                lower: w_hi / e * lambda_min.powf(-1.0 / k),
                upper: w_lo / e * lambda_max.powf(-1.0 / k),
            }
        })
        .collect())
}
