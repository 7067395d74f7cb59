//! Proximity-force estimates for two inclined cylinders of equal radius.
//!
//! Zero-temperature results are in units of `hbar c`, classical ones in
//! `k_B T`; lengths in the unit of `R`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::engine::Regime;
use crate::error::{domain, Error, Result};
use crate::quad::{integrate_with_breaks, QuadOptions};

/// Riemann zeta(3).
pub const ZETA3: f64 = 1.202_056_903_159_594_3;

/// Gap above which the first-order gradient correction is flagged as unreliable.
pub const GRADIENT_VALIDITY: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PfaConfig {
    pub d: f64,
    pub r: f64,
    pub theta: f64,
    pub regime: Regime,
}

impl PfaConfig {
    /// `d > 2R`, `theta` in `[0, pi/2]` (`theta = 0` only makes sense for the
    /// small-gap limit, which then diverges), and no finite-temperature regime.
    pub fn new(d: f64, r: f64, theta: f64, regime: Regime) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return domain(format!("radius must be positive, got {r}"));
        }
        if !(d > 2.0 * r && d.is_finite()) {
            return domain(format!("need a positive gap, got d = {d}, R = {r}"));
        }
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return domain(format!("inclination must lie in [0, pi/2], got {theta}"));
        }
        if regime == Regime::FiniteT {
            return Err(Error::Config(
                "proximity-force estimates exist for zero_t and classical only".into(),
            ));
        }
        Ok(Self {
            d,
            r,
            theta,
            regime,
        })
    }

    /// Surface gap `l = d - 2R`.
    pub fn gap(&self) -> f64 {
        self.d - 2.0 * self.r
    }

    pub fn gap_ratio(&self) -> f64 {
        self.gap() / self.r
    }

    fn sin_theta(&self) -> Result<f64> {
        if self.theta <= 0.0 {
            return domain(
                "parallel cylinders have an infinite proximity-force energy; use pfa_parallel",
            );
        }
        Ok(self.theta.sin())
    }

    /// Exponent of the plate energy density in the gap and its prefactor.
    fn plate_law(&self) -> (i32, f64) {
        match self.regime {
            Regime::Classical => (2, ZETA3 / (8.0 * PI)),
            _ => (3, PI * PI / 720.0),
        }
    }
}

/// Local surface distance above the point `(u, v)` of the overlap parallelogram.
pub fn local_gap(u: f64, v: f64, cfg: &PfaConfig) -> Result<f64> {
    let s = cfg.sin_theta()?;
    let edge = 2.0 * cfg.r / s;
    let tol = 1e-12 * edge;
    if !(-tol..=edge + tol).contains(&u) || !(-tol..=edge + tol).contains(&v) {
        return domain(format!(
            "({u}, {v}) lies outside the parallelogram of edge {edge}"
        ));
    }
    let root = |w: f64| {
        let x = w * s - cfg.r;
        (cfg.r * cfg.r - x * x).max(0.0).sqrt()
    };
    Ok(cfg.d - root(u) - root(v))
}

/// Proximity-force energy from the full overlap region.
pub fn pfa_exact(cfg: &PfaConfig) -> Result<f64> {
    let s = cfg.sin_theta()?;
    let lambda = cfg.gap_ratio();
    let (p, pref) = cfg.plate_law();
    // With s = sqrt(R/l) sin(phi) the root terms become cos(phi) and the
    // integrand is smooth; its peak has width sqrt(l/R) around phi = 0.
    let width = lambda.sqrt();
    let breaks: Vec<f64> = [1.0, 4.0, 16.0]
        .iter()
        .map(|c| c * width)
        .filter(|&x| x < FRAC_PI_2)
        .collect();
    let inner_opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-11,
        max_intervals: 2000,
    };
    let mut failure = None;
    let inner = |phi: f64| -> f64 {
        let a = lambda + 2.0 - phi.cos();
        let r = integrate_with_breaks(
            |psi| psi.cos() * (a - psi.cos()).powi(-p),
            0.0,
            FRAC_PI_2,
            &breaks,
            inner_opts,
        );
        match r {
            Ok(r) => phi.cos() * r.value,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let outer = integrate_with_breaks(
        inner,
        0.0,
        FRAC_PI_2,
        &breaks,
        QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-10,
            max_intervals: 2000,
        },
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let st_integral = 4.0 / lambda * outer.value;
    let scale = match cfg.regime {
        Regime::Classical => lambda,
        _ => lambda / cfg.r,
    };
    Ok(-pref / s * scale * st_integral)
}

/// Small-gap limit of `pfa_exact`.
pub fn pfa_limit(cfg: &PfaConfig) -> f64 {
    let s = cfg.theta.sin();
    if s <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let l = cfg.gap();
    match cfg.regime {
        Regime::Classical => -ZETA3 / 4.0 * cfg.r / (s * l),
        _ => -PI.powi(3) / 720.0 * cfg.r / (s * l * l),
    }
}

/// Parallel cylinders of length `len`; `theta` is ignored.
pub fn pfa_parallel(cfg: &PfaConfig, len: f64) -> Result<f64> {
    if !(len > 0.0) {
        return domain(format!("length must be positive, got {len}"));
    }
    let (l, r) = (cfg.gap(), cfg.r);
    Ok(match cfg.regime {
        Regime::Classical => -ZETA3 / 16.0 * len * (r / l.powi(3)).sqrt(),
        _ => -PI.powi(3) / 1920.0 * len * (r / l.powi(5)).sqrt(),
    })
}

/// Two spheres of radius `r` at surface gap `l`, zero temperature.
pub fn pfa_spheres(l: f64, r: f64) -> Result<f64> {
    if !(l > 0.0 && r > 0.0) {
        return domain(format!(
            "need positive gap and radius, got l = {l}, R = {r}"
        ));
    }
    Ok(-PI.powi(3) * r / (1440.0 * l * l))
}

/// First-order gradient-expansion coefficient `(10/pi^2 - 7/24) / 2`.
pub fn gradient_coefficient() -> f64 {
    0.5 * (10.0 / (PI * PI) - 7.0 / 24.0)
}

/// `1 - gradient_coefficient() * l/R`.
pub fn gradient_factor(gap_ratio: f64) -> f64 {
    1.0 - gradient_coefficient() * gap_ratio
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientExpansion {
    pub value: f64,
    pub factor: f64,
    /// `Some` when `l/R` exceeds `GRADIENT_VALIDITY`.
    pub validity_note: Option<String>,
}

/// Zero-temperature small-gap energy with its first curvature correction.
pub fn gradient_expansion(cfg: &PfaConfig) -> Result<GradientExpansion> {
    cfg.sin_theta()?;
    let ratio = cfg.gap_ratio();
    let zero_t = PfaConfig {
        regime: Regime::ZeroT,
        ..*cfg
    };
    let factor = gradient_factor(ratio);
    let validity_note = (ratio > GRADIENT_VALIDITY)
        .then(|| format!("l/R = {ratio:.3} exceeds {GRADIENT_VALIDITY}; higher-order curvature terms are unknown"));
    Ok(GradientExpansion {
        value: pfa_limit(&zero_t) * factor,
        factor,
        validity_note,
    })
}
