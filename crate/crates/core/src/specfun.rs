//! Modified Bessel functions of integer order for real, non-negative arguments.
//!
//! `K_0`, `K_1` come from their power series for `x <= 2` and from Steed's
//! continued fraction (Temme's CF2) above; higher orders follow by upward
//! recurrence, which is stable for `K`. `I_n` uses its power series for small
//! arguments, Miller's downward recurrence normalized by
//! `e^x = I_0 + 2 sum_{k>=1} I_k` at intermediate arguments, and the Hankel
//! expansion at large arguments. The Miller normalization yields
//! `e^{-x} I_n(x)` directly, so the scaled forms never overflow.

use crate::error::{domain, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const EPS: f64 = 1e-17;
const SERIES_LIMIT_I: f64 = 15.0;

/// Which Bessel function a derivative refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    I,
    K,
}

/// Values and derivatives of `I_n` and `K_n` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub order: i32,
    pub argument: f64,
    pub value_i: f64,
    pub value_k: f64,
    pub dvalue_i: f64,
    pub dvalue_k: f64,
}

impl BesselEval {
    pub fn new(order: i32, argument: f64) -> Result<Self> {
        check_k_argument(argument)?;
        Ok(Self {
            order,
            argument,
            value_i: bessel_i(order, argument)?,
            value_k: bessel_k(order, argument)?,
            dvalue_i: bessel_deriv(BesselKind::I, order, argument)?,
            dvalue_k: bessel_deriv(BesselKind::K, order, argument)?,
        })
    }

    /// `I_n K'_n - I'_n K_n`, which equals `-1/x`.
    pub fn wronskian(&self) -> f64 {
        self.value_i * self.dvalue_k - self.dvalue_i * self.value_k
    }
}

fn check_i_argument(x: f64) -> Result<()> {
    if !x.is_finite() {
        return domain(format!("Bessel argument must be finite, got {x}"));
    }
    if x < 0.0 {
        return domain(format!("Bessel argument must be non-negative, got {x}"));
    }
    Ok(())
}

fn check_k_argument(x: f64) -> Result<()> {
    if !x.is_finite() {
        return domain(format!("Bessel argument must be finite, got {x}"));
    }
    if x <= 0.0 {
        return domain(format!("K_n diverges at x <= 0, got {x}"));
    }
    Ok(())
}

/// `I_n(x)`. Overflows to infinity beyond `x ~ 709`; use [`bessel_i_scaled`] there.
pub fn bessel_i(n: i32, x: f64) -> Result<f64> {
    check_i_argument(x)?;
    let n = n.unsigned_abs();
    if x <= SERIES_LIMIT_I {
        return Ok(i_series(n, x));
    }
    Ok(i_scaled_unchecked(n, x) * x.exp())
}

/// `e^{-x} I_n(x)`.
pub fn bessel_i_scaled(n: i32, x: f64) -> Result<f64> {
    check_i_argument(x)?;
    Ok(i_scaled_unchecked(n.unsigned_abs(), x))
}

/// `K_n(x)` for `x > 0`.
pub fn bessel_k(n: i32, x: f64) -> Result<f64> {
    check_k_argument(x)?;
    let n = n.unsigned_abs();
    if x <= 2.0 {
        let (k0, k1) = k01_series(x);
        return Ok(k_upward(n, x, k0, k1));
    }
    Ok(k_scaled_unchecked(n, x) * (-x).exp())
}

/// `e^{x} K_n(x)` for `x > 0`.
pub fn bessel_k_scaled(n: i32, x: f64) -> Result<f64> {
    check_k_argument(x)?;
    Ok(k_scaled_unchecked(n.unsigned_abs(), x))
}

/// `I'_n(x)` or `K'_n(x)` from the order recurrences
/// `I'_n = (I_{n-1} + I_{n+1})/2`, `K'_n = -(K_{n-1} + K_{n+1})/2`.
pub fn bessel_deriv(kind: BesselKind, n: i32, x: f64) -> Result<f64> {
    match kind {
        BesselKind::I => Ok(0.5 * (bessel_i(n - 1, x)? + bessel_i(n + 1, x)?)),
        BesselKind::K => Ok(-0.5 * (bessel_k(n - 1, x)? + bessel_k(n + 1, x)?)),
    }
}

/// Scaled derivative: `e^{-x} I'_n(x)` or `e^{x} K'_n(x)`.
pub fn bessel_deriv_scaled(kind: BesselKind, n: i32, x: f64) -> Result<f64> {
    match kind {
        BesselKind::I => Ok(0.5 * (bessel_i_scaled(n - 1, x)? + bessel_i_scaled(n + 1, x)?)),
        BesselKind::K => Ok(-0.5 * (bessel_k_scaled(n - 1, x)? + bessel_k_scaled(n + 1, x)?)),
    }
}

fn i_scaled_unchecked(n: u32, x: f64) -> f64 {
    if x <= SERIES_LIMIT_I {
        i_series(n, x) * (-x).exp()
    } else if x >= hankel_threshold(n) {
        i_scaled_hankel(n, x)
    } else {
        i_scaled_miller(n, x)
    }
}

fn k_scaled_unchecked(n: u32, x: f64) -> f64 {
    let (k0, k1) = if x <= 2.0 {
        let (k0, k1) = k01_series(x);
        let e = x.exp();
        (k0 * e, k1 * e)
    } else {
        k01_scaled_cf2(x)
    };
    k_upward(n, x, k0, k1)
}

fn i_series(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    let mut lead = 1.0;
    for j in 1..=n {
        lead *= half / j as f64;
    }
    let y = half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= y / (k * (k + n as f64));
        sum += term;
        if term < EPS * sum {
            break;
        }
        k += 1.0;
    }
    lead * sum
}

fn hankel_threshold(n: u32) -> f64 {
    let nf = n as f64;
    (50.0f64).max(nf * nf)
}

/// Hankel expansion of `e^{-x} I_n(x)`; the `e^{-2x}` companion series is dropped.
fn i_scaled_hankel(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n as f64) * (n as f64);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= -(mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() > prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if term.abs() < EPS * sum.abs() {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}

/// Miller's algorithm with the normalization `sum_k eps_k I_k(x) = e^x`.
fn i_scaled_miller(n: u32, x: f64) -> f64 {
    let top = (n as f64).max(x);
    let start = (top + 20.0 + (50.0 * top).sqrt()) as u32 + 1;
    let mut above = 0.0f64;
    let mut current = 1e-300f64;
    let mut sum = 0.0f64;
    let mut target = 0.0f64;
    for k in (1..=start).rev() {
        // current = f_k, above = f_{k+1}
        if k == n {
            target = current;
        }
        sum += 2.0 * current;
        let below = above + (2.0 * k as f64 / x) * current;
        above = current;
        current = below;
        if current > 1e250 {
            above *= 1e-250;
            current *= 1e-250;
            sum *= 1e-250;
            target *= 1e-250;
        }
    }
    // current = f_0
    if n == 0 {
        target = current;
    }
    sum += current;
    target / sum
}

fn k01_series(x: f64) -> (f64, f64) {
    let half = 0.5 * x;
    let y = half * half;
    let log_term = half.ln() + EULER_GAMMA;
    // K_0 = -(ln(x/2) + gamma) I_0 + sum_k y^k/(k!)^2 H_k
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut tail0 = 0.0;
    let mut harmonic = 0.0;
    let mut k = 1.0;
    loop {
        term *= y / (k * k);
        harmonic += 1.0 / k;
        i0 += term;
        tail0 += term * harmonic;
        if term * harmonic.max(1.0) < EPS * i0.max(tail0.abs()) {
            break;
        }
        k += 1.0;
    }
    let k0 = -log_term * i0 + tail0;

    // K_1 = 1/x + ln(x/2) I_1 - (x/4) sum_k [psi(k+1) + psi(k+2)] y^k / (k!(k+1)!)
    let mut term = 1.0; // y^k/(k!(k+1)!)
    let mut psi1 = -EULER_GAMMA; // psi(k+1)
    let mut psi2 = 1.0 - EULER_GAMMA; // psi(k+2)
    let mut i1_sum = 1.0;
    let mut psi_sum = psi1 + psi2;
    let mut k = 1.0;
    loop {
        term *= y / (k * (k + 1.0));
        psi1 += 1.0 / k;
        psi2 += 1.0 / (k + 1.0);
        i1_sum += term;
        psi_sum += term * (psi1 + psi2);
        if term * (psi1 + psi2).abs().max(1.0) < EPS * psi_sum.abs().max(i1_sum) {
            break;
        }
        k += 1.0;
    }
    let i1 = half * i1_sum;
    let k1 = 1.0 / x + half.ln() * i1 - 0.25 * x * psi_sum;
    (k0, k1)
}

/// Steed's continued fraction for `e^x K_0(x)`, `e^x K_1(x)`, valid for `x >= 2`.
fn k01_scaled_cf2(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

fn k_upward(n: u32, x: f64, k0: f64, k1: f64) -> f64 {
    match n {
        0 => k0,
        1 => k1,
        _ => {
            let (mut prev, mut cur) = (k0, k1);
            for j in 1..n {
                let next = prev + (2.0 * j as f64 / x) * cur;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}
