//! Leading large-distance asymptotics for equal radii `R`, and the angular
//! amplitude Ω(θ) of the electromagnetic zero-temperature energy.
//!
//! Zero-temperature energies are in units of `hbar c`/length, classical ones
//! in `k_B T`; lengths in the same unit as `d` and `R`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::engine::{Field, Regime};
use crate::error::{domain, Result};
use crate::quad::{gauss_legendre_on, integrate_with_breaks, QuadOptions};
use crate::scatter::Boundary;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticResult {
    pub field: Field,
    pub regime: Regime,
    pub value: f64,
    pub validity_note: String,
}

/// Classical Dirichlet force (`-dE/dd`) and energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalPair {
    pub force: f64,
    pub energy: f64,
    pub validity_note: String,
}

fn check_theta(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < PI) {
        return domain(format!("inclination must lie in (0, pi), got {theta}"));
    }
    Ok(theta.sin())
}

fn check_ratio(d: f64, r: f64, min_ratio: f64) -> Result<f64> {
    if !(r > 0.0 && d.is_finite()) || d <= min_ratio * r {
        return domain(format!("need d > {min_ratio} R, got d = {d}, R = {r}"));
    }
    Ok(d / r)
}

fn log_note(ratio: f64) -> String {
    let l = ratio.ln();
    if l < 3.0 {
        format!("ln(d/R) = {l:.3}: leading order in 1/ln(d/R), corrections are of relative order 1/ln(d/R) and large here")
    } else {
        format!(
            "ln(d/R) = {l:.3}: leading order in 1/ln(d/R), relative corrections of order {:.2}",
            1.0 / l
        )
    }
}

fn power_note(ratio: f64) -> String {
    format!(
        "d/R = {ratio:.4}: leading order in R/d, relative corrections of order (R/d)^2 = {:.1e}",
        ratio.powi(-2)
    )
}

/// `-1 / (8 d sin(theta) ln^2(d/R))`.
pub fn dirichlet_zero_t(d: f64, r: f64, theta: f64) -> Result<AsymptoticResult> {
    let s = check_theta(theta)?;
    let ratio = check_ratio(d, r, 1.0)?;
    let l = ratio.ln();
    Ok(AsymptoticResult {
        field: Field::Dirichlet,
        regime: Regime::ZeroT,
        value: -1.0 / (8.0 * d * s * l * l),
        validity_note: log_note(ratio),
    })
}

/// `F = -pi / (4 d sin(theta) ln^2(d/R))`, `E = -pi / (4 sin(theta) ln(d/R))`.
pub fn dirichlet_classical(d: f64, r: f64, theta: f64) -> Result<ClassicalPair> {
    let s = check_theta(theta)?;
    let ratio = check_ratio(d, r, 1.0)?;
    let l = ratio.ln();
    Ok(ClassicalPair {
        force: -PI / (4.0 * d * s * l * l),
        energy: -PI / (4.0 * s * l),
        validity_note: log_note(ratio),
    })
}

/// `-R^4 (167 + cos 2theta) / (320 d^5 sin(theta))`.
pub fn neumann_zero_t(d: f64, r: f64, theta: f64) -> Result<AsymptoticResult> {
    let s = check_theta(theta)?;
    let ratio = check_ratio(d, r, 2.0)?;
    Ok(AsymptoticResult {
        field: Field::Neumann,
        regime: Regime::ZeroT,
        value: -r.powi(4) * (167.0 + (2.0 * theta).cos()) / (320.0 * d.powi(5) * s),
        validity_note: power_note(ratio),
    })
}

/// `-3 pi R^4 (98 + cos 2theta) / (1024 d^4 sin(theta))`.
pub fn neumann_classical(d: f64, r: f64, theta: f64) -> Result<AsymptoticResult> {
    let s = check_theta(theta)?;
    let ratio = check_ratio(d, r, 2.0)?;
    Ok(AsymptoticResult {
        field: Field::Neumann,
        regime: Regime::Classical,
        value: -3.0 * PI * r.powi(4) * (98.0 + (2.0 * theta).cos()) / (1024.0 * d.powi(4) * s),
        validity_note: power_note(ratio),
    })
}

/// `Omega(theta)` times the Dirichlet zero-temperature asymptote.
pub fn em_zero_t(d: f64, r: f64, theta: f64) -> Result<AsymptoticResult> {
    let dirichlet = dirichlet_zero_t(d, r, theta)?;
    Ok(AsymptoticResult {
        field: Field::Em,
        regime: Regime::ZeroT,
        value: omega(theta)? * dirichlet.value,
        validity_note: dirichlet.validity_note,
    })
}

/// The classical electromagnetic asymptote coincides with the Dirichlet one.
pub fn em_classical(d: f64, r: f64, theta: f64) -> Result<ClassicalPair> {
    dirichlet_classical(d, r, theta)
}

/// Zero-temperature Dirichlet energy of parallel cylinders of length `len`,
/// `-len / (8 pi d^2 ln^2(d/R))`.
pub fn dirichlet_parallel_zero_t(d: f64, r: f64, len: f64) -> Result<f64> {
    let l = check_ratio(d, r, 1.0)?.ln();
    Ok(-len / (8.0 * PI * d * d * l * l))
}

/// Length of parallel cylinders with the same leading energy as the
/// inclined pair. Infinite at `theta = 0`, where the cylinders are parallel.
pub fn effective_length(boundary: Boundary, d: f64, theta: f64) -> Result<f64> {
    if !(d > 0.0) {
        return domain(format!("distance must be positive, got {d}"));
    }
    if theta == 0.0 {
        return Ok(f64::INFINITY);
    }
    let s = check_theta(theta)?;
    Ok(match boundary {
        Boundary::Dirichlet => PI * d / s,
        Boundary::Neumann => 3.0 * PI * d / (8.0 * s),
    })
}

fn omega_integrand(cos_t: f64, sin_t: f64, vartheta: f64, phi: f64) -> f64 {
    let (sv, cv) = vartheta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let num = cos_t * sv + cv * sp * sin_t;
    let b = cv * sin_t + sv * sp * cos_t;
    let den = cp * cp * sv * sv + b * b;
    if den == 0.0 {
        return 0.0;
    }
    sv * num * num / den
}

/// Ω(θ) with a target absolute accuracy `tol`.
pub fn omega_with_tolerance(theta: f64, tol: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return domain(format!(
            "Omega is defined for theta in [0, pi], got {theta}"
        ));
    }
    let (sin_t, cos_t) = theta.sin_cos();
    // The integrand depends on phi only through sin(phi) and cos^2(phi), so
    // the phi range folds onto [-pi/2, pi/2]; the denominator vanishes only at
    // the endpoints (phi = pi/2, vartheta = pi - theta) and
    // (phi = -pi/2, vartheta = theta), where the integrand stays bounded.
    let inner_opts = QuadOptions {
        abs_tol: 0.05 * tol,
        rel_tol: 0.0,
        max_intervals: 4000,
    };
    let inner = |vartheta: f64| -> Result<f64> {
        let r = integrate_with_breaks(
            |phi| omega_integrand(cos_t, sin_t, vartheta, phi),
            -FRAC_PI_2,
            FRAC_PI_2,
            &[0.0],
            inner_opts,
        )?;
        Ok(2.0 * r.value)
    };
    let mut failure = None;
    let outer_opts = QuadOptions {
        abs_tol: 2.0 * PI * tol,
        rel_tol: 0.0,
        max_intervals: 4000,
    };
    let outer = integrate_with_breaks(
        |v| match inner(v) {
            Ok(x) => x,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        PI,
        &[theta, PI - theta, FRAC_PI_2],
        outer_opts,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(outer.value / (4.0 * PI))
}

/// Ω(θ) to about `1e-9` absolute.
pub fn omega(theta: f64) -> Result<f64> {
    omega_with_tolerance(theta, 1e-9)
}

/// Fourier cosine coefficients `[Omega_0, Omega_2, ..., Omega_{2 n_coeff}]`
/// of Ω, computed from quadrature over `omega`.
pub fn omega_fourier(n_coeff: usize) -> Result<Vec<f64>> {
    if n_coeff > 8 {
        return domain(format!(
            "at most 8 coefficients beyond Omega_0 are supported, got {n_coeff}"
        ));
    }
    // Ω(θ) = Ω(π - θ); the only non-smooth point on [0, π/2] is θ = 0
    // (a θ² ln θ term), so panels are graded geometrically toward it.
    let mut edges = vec![0.0];
    edges.extend((0..=12).rev().map(|k| FRAC_PI_2 * 0.5f64.powi(k)));
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for e in edges.windows(2) {
        let (x, w) = gauss_legendre_on(12, e[0], e[1]);
        nodes.extend(x);
        weights.extend(w);
    }
    let values = nodes
        .iter()
        .map(|&t| omega_with_tolerance(t, 1e-10))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..=n_coeff)
        .map(|n| {
            let integral: f64 = nodes
                .iter()
                .zip(&weights)
                .zip(&values)
                .map(|((t, w), v)| w * v * (2.0 * n as f64 * t).cos())
                .sum();
            let norm = if n == 0 { 1.0 } else { 2.0 };
            norm * 2.0 * integral / PI
        })
        .collect())
}
