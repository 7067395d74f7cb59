//! Translation kernels between two cylindrical frames.
//!
//! The primed frame is `x' = R_theta x + d y_hat`, with `R_theta` a rotation
//! by `theta` about `y`. An outgoing wave `K_n'(rho' p') e^{i n' phi'} e^{i k'_z z'}`
//! is expanded in regular waves `I_n(rho p) e^{i n phi} e^{i k_z z}` of the
//! unprimed frame, integrated over `k_z` and summed over `n`. The kernels
//! returned here omit the `2 pi / L` normalization of a formal cylinder
//! length, which cancels in every round trip.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Outgoing waves of the primed frame in regular waves of the unprimed one.
    Forward,
    /// The inverse rotation and translation.
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameTransform {
    pub d: f64,
    pub theta: f64,
    pub direction: Direction,
}

impl FrameTransform {
    /// Accepts `d > 0` and `theta` strictly inside `(0, pi)`.
    pub fn new(d: f64, theta: f64, direction: Direction) -> Result<Self> {
        if !(d.is_finite() && d > 0.0) {
            return domain(format!(
                "axis distance must be positive and finite, got {d}"
            ));
        }
        if !(theta > 0.0 && theta < PI) {
            return domain(format!("inclination must lie in (0, pi), got {theta}"));
        }
        Ok(Self {
            d,
            theta,
            direction,
        })
    }

    fn check(&self) -> Result<()> {
        Self::new(self.d, self.theta, self.direction).map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarKernelArgs {
    pub n_out: i32,
    pub kz_out: f64,
    pub n_in: i32,
    pub kz_in: f64,
    pub kappa: f64,
}

/// Wavevector components shared by all kernels for one `(k'_z, k_z)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    pub p_in: f64,
    pub p_out: f64,
    pub kx_in: f64,
    pub kx_out: f64,
    pub xi_in: f64,
    pub xi_out: f64,
    /// `sqrt(k'_x^2 + p'^2)`, the decay rate in `d`.
    pub q: f64,
}

impl Kinematics {
    pub fn new(kz_out: f64, kz_in: f64, kappa: f64, theta: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return domain(format!(
                "imaginary frequency must be finite and non-negative, got {kappa}"
            ));
        }
        let (s, c) = theta.sin_cos();
        let p_in = kappa.hypot(kz_in);
        let p_out = kappa.hypot(kz_out);
        if !(p_in > 0.0 && p_out > 0.0) {
            return domain("p = sqrt(kappa^2 + k_z^2) vanishes; kappa = k_z = 0 is excluded");
        }
        let kx_in = (c * kz_in - kz_out) / s;
        let kx_out = (kz_in - c * kz_out) / s;
        Ok(Self {
            p_in,
            p_out,
            kx_in,
            kx_out,
            xi_in: kx_in / p_in,
            xi_out: kx_out / p_out,
            q: kx_out.hypot(p_out),
        })
    }
}

/// `xi - sqrt(xi^2 + 1)`, always negative; evaluated without cancellation.
pub fn branch_factor(xi: f64) -> f64 {
    let r = xi.hypot(1.0);
    if xi > 0.0 {
        -1.0 / (xi + r)
    } else {
        xi - r
    }
}

/// `x^n` by repeated multiplication, negative `n` through `1/x`.
pub(crate) fn int_pow(x: f64, n: i32) -> f64 {
    let base = if n < 0 { 1.0 / x } else { x };
    (0..n.unsigned_abs()).fold(1.0, |acc, _| acc * base)
}

/// `(-i)^m`.
pub(crate) fn minus_i_pow(m: i32) -> Complex64 {
    match m.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Index-dependent part `(-i)^{n+n'} g(xi')^{n'} g(xi)^{-n}` times the
/// direction parity.
pub(crate) fn angular_factor(
    n_out: i32,
    n_in: i32,
    kin: &Kinematics,
    direction: Direction,
) -> Complex64 {
    let mut v = minus_i_pow(n_in + n_out)
        * int_pow(branch_factor(kin.xi_out), n_out)
        * int_pow(branch_factor(kin.xi_in), -n_in);
    if direction == Direction::Inverse && (n_in + n_out).rem_euclid(2) == 1 {
        v = -v;
    }
    v
}

fn kinematics(args: &ScalarKernelArgs, xform: &FrameTransform) -> Result<Kinematics> {
    xform.check()?;
    Kinematics::new(args.kz_out, args.kz_in, args.kappa, xform.theta)
}

/// Scalar translation kernel `u_{n' n}(k'_z, k_z)`.
pub fn scalar_translation(args: ScalarKernelArgs, xform: FrameTransform) -> Result<Complex64> {
    let kin = kinematics(&args, &xform)?;
    let radial = (-xform.d * kin.q).exp() / (2.0 * kin.q * xform.theta.sin());
    Ok(angular_factor(args.n_out, args.n_in, &kin, xform.direction) * radial)
}

/// `d`-derivative of [`scalar_translation`]; only the exponential depends on `d`.
pub fn scalar_translation_dderiv(
    args: ScalarKernelArgs,
    xform: FrameTransform,
) -> Result<Complex64> {
    let kin = kinematics(&args, &xform)?;
    Ok(-kin.q * scalar_translation(args, xform)?)
}

/// Relative residual of the index-shift relations
/// `U_{n', n+1} = -i g(xi)^{-1} U_{n', n}` and `U_{n', n-1} = i g(xi) U_{n', n}`;
/// the larger of the two is returned.
pub fn index_shift_check(args: ScalarKernelArgs, xform: FrameTransform) -> Result<f64> {
    let kin = kinematics(&args, &xform)?;
    let g = branch_factor(kin.xi_in);
    let base = scalar_translation(args, xform)?;
    if base.norm() == 0.0 {
        return Ok(0.0);
    }
    let up = scalar_translation(
        ScalarKernelArgs {
            n_in: args.n_in + 1,
            ..args
        },
        xform,
    )?;
    let down = scalar_translation(
        ScalarKernelArgs {
            n_in: args.n_in - 1,
            ..args
        },
        xform,
    )?;
    let i = Complex64::new(0.0, 1.0);
    let r_up = (up - (-i) / g * base).norm() / base.norm();
    let r_down = (down - i * g * base).norm() / base.norm();
    Ok(r_up.max(r_down))
}

/// 2x2 polarization block over `[M, N]` waves: entry `[a][b]` couples the
/// outgoing `a`-wave of the primed frame to the regular `b`-wave.
pub type PolBlock = [[Complex64; 2]; 2];

/// Geometric polarization factors `[[C, S], [-S, C]]` with
/// `C = (p/p')(cos - sin (k_z/p) xi)` and `S = (p/p') sin (kappa/p) sqrt(1 + xi^2)`.
pub(crate) fn polarization_factors(
    kin: &Kinematics,
    kz_out: f64,
    kz_in: f64,
    kappa: f64,
    theta: f64,
) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    let denom = kin.p_in * kin.p_out;
    let diag = (c * kappa * kappa + kz_in * kz_out) / denom;
    let off = s * kappa * kin.kx_in.hypot(kin.p_in) / denom;
    (diag, off)
}

pub fn em_translation_block(args: ScalarKernelArgs, xform: FrameTransform) -> Result<PolBlock> {
    let kin = kinematics(&args, &xform)?;
    let u = scalar_translation(args, xform)?;
    let (diag, off) = polarization_factors(&kin, args.kz_out, args.kz_in, args.kappa, xform.theta);
    Ok([[u * diag, u * off], [-u * off, u * diag]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_with_breaks, QuadOptions};
    use crate::specfun::{bessel_i, bessel_k};
    use std::f64::consts::FRAC_PI_2;

    fn args(n_out: i32, kz_out: f64, n_in: i32, kz_in: f64, kappa: f64) -> ScalarKernelArgs {
        ScalarKernelArgs {
            n_out,
            kz_out,
            n_in,
            kz_in,
            kappa,
        }
    }

    fn fwd(d: f64, theta: f64) -> FrameTransform {
        FrameTransform::new(d, theta, Direction::Forward).unwrap()
    }

    #[test]
    fn perpendicular_substitution_values() {
        let e = (-2.0f64).exp() / 2.0;
        let u = scalar_translation(args(0, 0.0, 0, 0.0, 1.0), fwd(2.0, FRAC_PI_2)).unwrap();
        assert!((u - Complex64::new(e, 0.0)).norm() < 1e-16);
        let u = scalar_translation(args(0, 0.0, 1, 0.0, 1.0), fwd(2.0, FRAC_PI_2)).unwrap();
        assert!((u - Complex64::new(0.0, e)).norm() < 1e-16);
        let du = scalar_translation_dderiv(args(0, 0.0, 0, 0.0, 1.0), fwd(2.0, FRAC_PI_2)).unwrap();
        assert!((du + e).norm() < 1e-16);
    }

    #[test]
    fn dderiv_matches_finite_difference() {
        let a = args(1, 0.4, -2, -0.3, 0.7);
        let h = 1e-5;
        let d = 2.5;
        let plus = scalar_translation(a, fwd(d + h, 1.1)).unwrap();
        let minus = scalar_translation(a, fwd(d - h, 1.1)).unwrap();
        let fd = (plus - minus) / (2.0 * h);
        let exact = scalar_translation_dderiv(a, fwd(d, 1.1)).unwrap();
        assert!((fd - exact).norm() / exact.norm() < 1e-8);
    }

    #[test]
    fn index_shift_examples() {
        let x = fwd(2.0, PI / 4.0);
        assert!(index_shift_check(args(0, -0.2, 0, 0.5, 1.0), x).unwrap() <= 1e-13);
        assert!(index_shift_check(args(2, -0.2, -1, 0.5, 1.0), x).unwrap() <= 1e-13);
    }

    #[test]
    fn branch_factor_is_accurate_for_large_xi() {
        let xi = 1e8;
        let g = branch_factor(xi);
        assert!((g * 2.0 * xi + 1.0).abs() < 1e-12);
        assert!(branch_factor(-3.0) < 0.0);
        assert!((branch_factor(0.0) + 1.0).abs() == 0.0);
    }

    #[test]
    fn em_block_limits() {
        let x = fwd(2.0, FRAC_PI_2);
        let b = em_translation_block(args(0, 0.0, 0, 0.0, 1.0), x).unwrap();
        let u = scalar_translation(args(0, 0.0, 0, 0.0, 1.0), x).unwrap();
        assert!(b[0][0].norm() < 1e-17 && b[1][1].norm() < 1e-17);
        assert!((b[0][1] - u).norm() < 1e-17);
        assert!((b[1][0] + u).norm() < 1e-17);

        // static limit: no polarization mixing, diagonal factor sign(k_z k'_z)
        for (kzo, kzi) in [(0.3, 0.8), (-0.5, 0.2), (1.3, -2.0)] {
            let a = args(1, kzo, 0, kzi, 0.0);
            let x = fwd(3.0, 0.9);
            let b = em_translation_block(a, x).unwrap();
            let u = scalar_translation(a, x).unwrap();
            let sign = (kzo * kzi).signum();
            assert_eq!(b[0][1], Complex64::new(0.0, 0.0));
            assert_eq!(b[1][0], Complex64::new(0.0, 0.0));
            assert!((b[0][0] - sign * u).norm() <= 1e-15 * u.norm());
            assert!((b[1][1] - sign * u).norm() <= 1e-15 * u.norm());
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(FrameTransform::new(1.0, 0.0, Direction::Forward).is_err());
        assert!(FrameTransform::new(-1.0, 1.0, Direction::Forward).is_err());
        assert!(scalar_translation(args(0, 0.0, 0, 0.0, 0.0), fwd(1.0, 1.0)).is_err());
    }

    /// Expanding the outgoing wave of the primed frame in regular waves of the
    /// unprimed frame must reproduce it at points near the unprimed axis.
    #[test]
    fn reconstructs_outgoing_wave() {
        let (kz_out, kappa, d, theta): (f64, f64, f64, f64) = (0.3, 1.0, 3.0, PI / 3.0);
        let (s, c) = theta.sin_cos();
        let xform = fwd(d, theta);
        let opts = QuadOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_intervals: 4000,
        };
        // the integrand lives on |k_z| of order one; seed panels there
        let breaks = [
            -20.0, -8.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 20.0,
        ];
        for (x, y, z) in [
            (0.3, 0.2, 0.1),
            (-0.5, 0.1, 0.4),
            (0.2, -0.6, -0.3),
            (0.0, 0.0, 0.0),
            (0.7, 0.3, 1.0),
        ] {
            for n_out in [0, 1, -2] {
                let xp = [c * x + s * z, y + d, -s * x + c * z];
                let rho_p = xp[0].hypot(xp[1]);
                let phi_p = xp[1].atan2(xp[0]);
                let p_out = kappa.hypot(kz_out);
                let lhs = bessel_k(n_out, rho_p * p_out).unwrap()
                    * Complex64::from_polar(1.0, n_out as f64 * phi_p + kz_out * xp[2]);
                let rho = x.hypot(y);
                let phi = y.atan2(x);
                let mut rhs = Complex64::new(0.0, 0.0);
                for n in -14..=14 {
                    let term = |kz: f64| {
                        let u =
                            scalar_translation(args(n_out, kz_out, n, kz, kappa), xform).unwrap();
                        u * bessel_i(n, rho * kappa.hypot(kz)).unwrap()
                            * Complex64::from_polar(1.0, n as f64 * phi + kz * z)
                    };
                    let re = integrate_with_breaks(|k| term(k).re, -60.0, 60.0, &breaks, opts)
                        .unwrap()
                        .value;
                    let im = integrate_with_breaks(|k| term(k).im, -60.0, 60.0, &breaks, opts)
                        .unwrap()
                        .value;
                    rhs += Complex64::new(re, im);
                }
                let rel = (lhs - rhs).norm() / lhs.norm();
                assert!(rel < 1e-6, "point ({x},{y},{z}) n'={n_out}: {rel:e}");
            }
        }
    }
}
