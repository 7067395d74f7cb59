//! Cylinder T-matrices for Dirichlet, Neumann and perfect-metal boundaries.
//!
//! A cylinder's T-matrix is diagonal in `(n, k_z)` and depends on `k_z` only
//! through `p = sqrt(kappa^2 + k_z^2)`. The magnitudes grow like `e^{2 pR}`,
//! so the engine works with [`log_amplitude`] and folds the exponential into
//! the translation kernels.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::specfun::{bessel_deriv_scaled, bessel_i_scaled, bessel_k_scaled, BesselKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Boundary {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TAmplitude {
    pub boundary: Boundary,
    pub n: i32,
    pub p: f64,
    pub radius: f64,
    pub value: f64,
}

impl TAmplitude {
    pub fn new(boundary: Boundary, n: i32, p: f64, radius: f64) -> Result<Self> {
        let value = match boundary {
            Boundary::Dirichlet => t_dirichlet(n, p, radius)?,
            Boundary::Neumann => t_neumann(n, p, radius)?,
        };
        Ok(Self {
            boundary,
            n,
            p,
            radius,
            value,
        })
    }
}

/// Sign and natural log of `|T|` at `z = pR`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogAmplitude {
    pub sign: f64,
    pub ln_abs: f64,
}

impl LogAmplitude {
    pub fn value(&self) -> f64 {
        self.sign * self.ln_abs.exp()
    }
}

fn check_z(p: f64, radius: f64) -> Result<f64> {
    let z = p * radius;
    if !(z > 0.0 && z.is_finite()) {
        return domain(format!(
            "pR must be positive and finite, got p={p}, R={radius}"
        ));
    }
    Ok(z)
}

pub fn log_amplitude(boundary: Boundary, n: i32, p: f64, radius: f64) -> Result<LogAmplitude> {
    let z = check_z(p, radius)?;
    // scaled functions: I = e^{z} I_hat, K = e^{-z} K_hat
    let (sign, ratio) = match boundary {
        Boundary::Dirichlet => (-1.0, bessel_i_scaled(n, z)? / bessel_k_scaled(n, z)?),
        Boundary::Neumann => (
            1.0,
            -bessel_deriv_scaled(BesselKind::I, n, z)? / bessel_deriv_scaled(BesselKind::K, n, z)?,
        ),
    };
    Ok(LogAmplitude {
        sign,
        ln_abs: ratio.ln() + 2.0 * z,
    })
}

/// `-I_n(pR) / K_n(pR)`.
pub fn t_dirichlet(n: i32, p: f64, radius: f64) -> Result<f64> {
    let z = check_z(p, radius)?;
    let ratio = bessel_i_scaled(n, z)? / bessel_k_scaled(n, z)?;
    Ok(-ratio * (2.0 * z).exp())
}

/// `-I'_n(pR) / K'_n(pR)`.
pub fn t_neumann(n: i32, p: f64, radius: f64) -> Result<f64> {
    let z = check_z(p, radius)?;
    let ratio =
        bessel_deriv_scaled(BesselKind::I, n, z)? / bessel_deriv_scaled(BesselKind::K, n, z)?;
    Ok(-ratio * (2.0 * z).exp())
}

/// Perfect-metal T-matrix `diag(T^D, T^N)` in `[E, M]` order.
pub fn t_em_block(n: i32, p: f64, radius: f64) -> Result<[[f64; 2]; 2]> {
    Ok([
        [t_dirichlet(n, p, radius)?, 0.0],
        [0.0, t_neumann(n, p, radius)?],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn reference_values() {
        // mpmath, 30 digits
        assert!(
            rel(
                t_dirichlet(0, 1.0, 1e-4).unwrap(),
                -0.107_223_981_005_508_53
            ) < 1e-13
        );
        assert!(rel(t_neumann(0, 2.0, 1.0).unwrap(), 11.372_586_609_248_592) < 1e-13);
        let table = [
            (0, 0.5, -1.150_434_260_652_99, 0.155_691_803_515_709_87),
            (1, 3.0, -98.449_242_284_056_297, 74.036_444_432_779_412),
            (
                2,
                0.01,
                -6.250_208_317_331_624_7e-10,
                6.250_104_186_574_022_6e-10,
            ),
            (
                3,
                40.0,
                -1.417_165_167_162_042_4e34,
                1.382_455_468_881_239_2e34,
            ),
            (
                3,
                1e-6,
                -2.604_166_666_667_154_2e-39,
                2.604_166_666_667_045_7e-39,
            ),
        ];
        for (n, z, d, nm) in table {
            assert!(
                rel(t_dirichlet(n, 1.0, z).unwrap(), d) < 1e-12,
                "D n={n} z={z}"
            );
            assert!(
                rel(t_neumann(n, 1.0, z).unwrap(), nm) < 1e-12,
                "N n={n} z={z}"
            );
        }
    }

    #[test]
    fn large_argument_is_finite_in_log_form() {
        let t = log_amplitude(Boundary::Dirichlet, 0, 1.0, 50.0).unwrap();
        assert_eq!(t.sign, -1.0);
        assert!((t.ln_abs - (100.0 - std::f64::consts::PI.ln())).abs() < 0.01);
        let t = log_amplitude(Boundary::Neumann, 2, 1.0, 600.0).unwrap();
        assert!(t.ln_abs.is_finite() && t.ln_abs > 1100.0);
    }

    #[test]
    fn small_radius_behavior() {
        let z = 1e-6f64;
        assert!((t_dirichlet(0, 1.0, z).unwrap() * z.ln() - 1.0).abs() < 0.05);
        for n in [-1, 0, 1] {
            assert!((t_neumann(n, 1.0, z).unwrap() / (z * z) - 0.5).abs() < 1e-3);
        }
        let ratio = t_dirichlet(1, 1.0, 0.02).unwrap() / t_dirichlet(1, 1.0, 0.01).unwrap();
        assert!((ratio - 4.0).abs() < 0.04);
        let t = t_neumann(0, 1.0, 0.01).unwrap();
        assert!((t - 5.0e-5).abs() < 5.0e-5 * 1e-3);
    }

    #[test]
    fn em_block_is_diagonal() {
        let b = t_em_block(0, 1.0, 0.5).unwrap();
        assert_eq!(b[0][1], 0.0);
        assert_eq!(b[1][0], 0.0);
        assert_eq!(b[0][0], t_dirichlet(0, 1.0, 0.5).unwrap());
        let b = t_em_block(2, 1.0, 0.5).unwrap();
        assert_eq!(b[1][1], t_neumann(2, 1.0, 0.5).unwrap());
    }

    #[test]
    fn rejects_nonpositive_argument() {
        assert!(t_dirichlet(0, 0.0, 1.0).is_err());
        assert!(t_neumann(0, 1.0, -1.0).is_err());
        assert!(TAmplitude::new(Boundary::Neumann, 0, f64::NAN, 1.0).is_err());
    }
}
