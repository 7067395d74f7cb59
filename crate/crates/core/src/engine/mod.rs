//! Round-trip assembly, log-determinants and the energy/force functionals.
//!
//! Zero temperature: `E = (1/2pi) int_0^inf dkappa log det(I - N(kappa))`.
//! Finite temperature: `E = T sum'_n log det(I - N(2 pi n T))`, the `n = 0`
//! term weighted by one half. Classical limit: only the `n = 0` term.
//! For Dirichlet and electromagnetic fields `N(0)` is not trace class, so the
//! classical energy is obtained by integrating the force inward from a large
//! distance where the closed-form asymptote takes over.

mod assembly;
mod energy;
mod grid;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use assembly::{assemble_roundtrip, logdet_one_minus, RoundTrip};
pub use energy::{
    energy_classical, energy_finite_t, energy_zero_t, force_classical, logdet_at,
    multiple_scattering_energy, torque, ClassicalOptions,
};
pub use grid::{default_kz_scale, make_kz_grid, make_kz_grid_with, KzGrid, KzMap};

/// Smallest inclination accepted by the inclined-cylinder engine.
pub const THETA_MIN: f64 = PI / 36.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Dirichlet,
    Neumann,
    Em,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Dirichlet => "dirichlet",
            Field::Neumann => "neumann",
            Field::Em => "em",
        }
    }

    /// Number of polarizations.
    pub fn blocks(self) -> usize {
        if self == Field::Em {
            2
        } else {
            1
        }
    }
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Field {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" | "d" => Ok(Field::Dirichlet),
            "neumann" | "n" => Ok(Field::Neumann),
            "em" | "electromagnetic" => Ok(Field::Em),
            other => Err(Error::Config(format!("unknown field '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    ZeroT,
    FiniteT,
    Classical,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::ZeroT => "zero_t",
            Regime::FiniteT => "finite_t",
            Regime::Classical => "classical",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zero_t" | "zerot" | "zero" => Ok(Regime::ZeroT),
            "finite_t" | "finitet" | "finite" => Ok(Regime::FiniteT),
            "classical" | "high_t" => Ok(Regime::Classical),
            other => Err(Error::Config(format!("unknown regime '{other}'"))),
        }
    }
}

/// Two cylinders: axes separated by `d` along `y`, the second rotated by
/// `theta` about `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub d: f64,
    pub theta: f64,
    pub r1: f64,
    pub r2: f64,
}

impl Geometry {
    /// Validates `d > r1 + r2` and `theta` in `[THETA_MIN, pi - THETA_MIN]`.
    /// Angles beyond `pi/2` are the mirror configurations.
    pub fn new(d: f64, theta: f64, r1: f64, r2: f64) -> Result<Self> {
        if !(r1 > 0.0 && r2 > 0.0 && r1.is_finite() && r2.is_finite()) {
            return Err(Error::Domain(format!(
                "radii must be positive, got {r1}, {r2}"
            )));
        }
        if !(d.is_finite() && d > r1 + r2) {
            return Err(Error::Domain(format!(
                "cylinders overlap or touch: d = {d}, R1 + R2 = {}",
                r1 + r2
            )));
        }
        if !(THETA_MIN..=PI - THETA_MIN).contains(&theta) {
            return Err(Error::Domain(format!(
                "inclination {theta} outside [{THETA_MIN}, pi - {THETA_MIN}]; use the parallel-cylinder closed forms"
            )));
        }
        Ok(Self { d, theta, r1, r2 })
    }

    pub fn equal_radii(d: f64, theta: f64, r: f64) -> Result<Self> {
        Self::new(d, theta, r, r)
    }

    /// Surface-to-surface distance.
    pub fn gap(&self) -> f64 {
        self.d - self.r1 - self.r2
    }

    pub fn with_d(&self, d: f64) -> Result<Self> {
        Self::new(d, self.theta, self.r1, self.r2)
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.d, theta, self.r1, self.r2)
    }

    pub fn swapped(&self) -> Self {
        Self {
            r1: self.r2,
            r2: self.r1,
            ..*self
        }
    }
}

/// Discretization and refinement settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Numerics {
    /// Partial waves `|n| <= n_max`.
    pub n_max: u32,
    /// `k_z` nodes per partial wave; even, at least 8.
    pub n_k: usize,
    /// Gauss-Legendre nodes of the frequency integral.
    pub n_kappa: usize,
    /// Relative change accepted between successive refinements.
    pub rel_tol: f64,
    /// When set, `n_max`, `n_k` and `n_kappa` are doubled until converged.
    pub refine: bool,
    pub max_doublings: u32,
    /// Fixed `k_z` map scale; `None` uses `max(kappa, 2/d)`.
    pub kz_scale: Option<f64>,
    pub kz_map: KzMap,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            n_max: 3,
            n_k: 64,
            n_kappa: 40,
            rel_tol: 1e-4,
            refine: false,
            max_doublings: 4,
            kz_scale: None,
            kz_map: KzMap::Cubic,
        }
    }
}

impl Numerics {
    pub fn fixed(n_max: u32, n_k: usize, n_kappa: usize) -> Self {
        Self {
            n_max,
            n_k,
            n_kappa,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_k < 8 || !self.n_k.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "n_k must be even and at least 8, got {}",
                self.n_k
            )));
        }
        if self.n_kappa == 0 {
            return Err(Error::Config("n_kappa must be positive".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::Config(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if let Some(s) = self.kz_scale {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Config(format!("kz_scale must be positive, got {s}")));
            }
        }
        Ok(())
    }

    fn doubled(&self) -> Self {
        Self {
            n_max: (2 * self.n_max).max(1),
            n_k: 2 * self.n_k,
            n_kappa: 2 * self.n_kappa,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Energy,
    Force,
    Torque,
}

/// An energy (units `hbar c / R1` at zero temperature, `k_B T` classically),
/// a force (per unit length, same energy units over `R1`) or a torque.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyResult {
    pub value: f64,
    pub quantity: Quantity,
    pub field: Field,
    pub regime: Regime,
    pub n_max: u32,
    pub n_k: usize,
    pub kappa_nodes: usize,
    /// Change over the last refinement step, when refinement ran.
    pub est_error: Option<f64>,
    pub units: String,
}

impl EnergyResult {
    pub(crate) fn new(
        value: f64,
        quantity: Quantity,
        field: Field,
        regime: Regime,
        num: &Numerics,
        kappa_nodes: usize,
    ) -> Self {
        let base = match regime {
            Regime::Classical => "k_B T",
            Regime::ZeroT | Regime::FiniteT => "hbar c / R1",
        };
        let units = match quantity {
            Quantity::Energy | Quantity::Torque => base.to_string(),
            Quantity::Force => format!("{base} / R1"),
        };
        Self {
            value,
            quantity,
            field,
            regime,
            n_max: num.n_max,
            n_k: num.n_k,
            kappa_nodes,
            est_error: None,
            units,
        }
    }
}
