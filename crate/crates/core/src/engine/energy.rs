use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::assembly::{assemble_factors, grid_for, logdet_matrix};
use super::{EnergyResult, Field, Geometry, Numerics, Quantity, Regime, THETA_MIN};
use crate::asympt;
use crate::error::{Error, Result};
use crate::linalg::Lu;
use crate::quad::{gauss_legendre, gauss_legendre_on};

/// Evaluates `f` on every point, spreading the points over the available
/// cores. Results keep the input order.
pub(crate) fn par_map<F>(points: &[f64], f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(points.len());
    if workers <= 1 {
        return points.iter().map(|&x| f(x)).collect();
    }
    let mut out = vec![Ok(0.0); points.len()];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                scope.spawn(move || {
                    points
                        .iter()
                        .enumerate()
                        .skip(w)
                        .step_by(workers)
                        .map(|(i, &x)| (i, f(x)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("worker panicked") {
                out[i] = r;
            }
        }
    });
    out.into_iter().collect()
}

/// `log det(I - N(kappa))` on the grid selected by `num`.
pub fn logdet_at(kappa: f64, geom: &Geometry, field: Field, num: &Numerics) -> Result<f64> {
    let grid = grid_for(kappa, geom, num)?;
    let f = assemble_factors(kappa, geom, field, num.n_max, &grid)?;
    logdet_matrix(&f.product())
}

/// Frequency nodes `kappa = s / ((1 - s) d)` with Gauss-Legendre `s` on `(0, 1)`.
fn kappa_rule(n: usize, d: f64) -> (Vec<f64>, Vec<f64>) {
    let (s, w) = gauss_legendre_on(n, 0.0, 1.0);
    let kappa = s.iter().map(|s| s / ((1.0 - s) * d)).collect();
    let weights = s
        .iter()
        .zip(&w)
        .map(|(s, w)| w / ((1.0 - s) * (1.0 - s) * d))
        .collect();
    (kappa, weights)
}

/// Runs `eval` at `num`, then (if requested) at successively doubled grids
/// until the relative change drops below `rel_tol`.
fn refine<F>(num: &Numerics, eval: F) -> Result<(f64, Option<f64>, Numerics)>
where
    F: Fn(&Numerics) -> Result<f64>,
{
    num.validate()?;
    let mut current = *num;
    let mut value = eval(&current)?;
    if !num.refine {
        return Ok((value, None, current));
    }
    let mut history = vec![value];
    for _ in 0..num.max_doublings {
        let next = current.doubled();
        let v = eval(&next)?;
        let change = (v - value).abs();
        history.push(v);
        current = next;
        value = v;
        if change <= num.rel_tol * v.abs() {
            return Ok((value, Some(change), current));
        }
    }
    Err(Error::Convergence {
        steps: num.max_doublings,
        diagnostics: format!(
            "values {history:?}, last grid n_max = {}, n_k = {}, n_kappa = {}, tolerance {}",
            current.n_max, current.n_k, current.n_kappa, num.rel_tol
        ),
    })
}

/// Zero-temperature energy `(1/2pi) int_0^inf dkappa log det(I - N)` in
/// units of `hbar c / R1` (for `R1 = 1`).
pub fn energy_zero_t(geom: &Geometry, field: Field, num: &Numerics) -> Result<EnergyResult> {
    let (value, est, used) = refine(num, |n| {
        let (kappa, w) = kappa_rule(n.n_kappa, geom.d);
        let ld = par_map(&kappa, |k| logdet_at(k, geom, field, n))?;
        Ok(ld.iter().zip(&w).map(|(l, w)| l * w).sum::<f64>() / (2.0 * PI))
    })?;
    let mut r = EnergyResult::new(
        value,
        Quantity::Energy,
        field,
        Regime::ZeroT,
        &used,
        used.n_kappa,
    );
    r.est_error = est;
    Ok(r)
}

/// Truncated multiple-scattering series
/// `-(1/2pi) sum_{p <= p_max} (1/p) int dkappa Tr N^p` at zero temperature.
/// `est_error` holds the magnitude of the last term.
pub fn multiple_scattering_energy(
    geom: &Geometry,
    field: Field,
    p_max: usize,
    num: &Numerics,
) -> Result<EnergyResult> {
    num.validate()?;
    if p_max == 0 {
        return Err(Error::Config("p_max must be at least 1".into()));
    }
    let (kappa, w) = kappa_rule(num.n_kappa, geom.d);
    let mut terms = vec![0.0; p_max];
    for (&k, &wk) in kappa.iter().zip(&w) {
        let grid = grid_for(k, geom, num)?;
        let f = assemble_factors(k, geom, field, num.n_max, &grid)?;
        terms[0] += wk * f.a.trace_of_product(&f.b).re;
        if p_max > 1 {
            let n = f.product();
            let mut power = n.clone();
            for (p, term) in terms.iter_mut().enumerate().skip(1) {
                if p + 1 == p_max {
                    *term += wk * power.trace_of_product(&n).re;
                } else {
                    power = power.matmul(&n);
                    *term += wk * power.trace().re;
                }
            }
        }
    }
    let mut total = 0.0;
    let mut last = 0.0;
    for (i, t) in terms.iter().enumerate() {
        let p = (i + 1) as f64;
        let contribution = -t / (p * 2.0 * PI);
        if i > 0 && contribution.abs() >= last {
            return Err(Error::Divergence { order: i + 1 });
        }
        last = contribution.abs();
        total += contribution;
    }
    let mut r = EnergyResult::new(
        total,
        Quantity::Energy,
        field,
        Regime::ZeroT,
        num,
        num.n_kappa,
    );
    r.est_error = Some(last);
    Ok(r)
}

fn non_trace_class(field: Field) -> Error {
    Error::NonTraceClass {
        field: field.name().to_string(),
    }
}

/// Matsubara sum `T sum'_n log det(I - N(2 pi n T))`, `temperature` in units
/// of `hbar c / (k_B R1)`. Terms are added until one falls below
/// `1e-8 |total|` or `max_terms` terms were used.
pub fn energy_finite_t(
    geom: &Geometry,
    field: Field,
    temperature: f64,
    num: &Numerics,
    max_terms: usize,
) -> Result<EnergyResult> {
    num.validate()?;
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::Domain(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    if field != Field::Neumann {
        return Err(non_trace_class(field));
    }
    let mut total = 0.5 * logdet_at(0.0, geom, field, num)?;
    let mut used = 1;
    // batches keep the worker pool busy while still stopping early
    let batch = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .max(1);
    'outer: while used < max_terms {
        let upto = (used + batch).min(max_terms);
        let kappas: Vec<f64> = (used..upto)
            .map(|n| 2.0 * PI * n as f64 * temperature)
            .collect();
        let terms = par_map(&kappas, |k| logdet_at(k, geom, field, num))?;
        for t in terms {
            total += t;
            used += 1;
            if t.abs() < 1e-8 * total.abs() {
                break 'outer;
            }
        }
    }
    Ok(EnergyResult::new(
        temperature * total,
        Quantity::Energy,
        field,
        Regime::FiniteT,
        num,
        used,
    ))
}

/// Classical force per `k_B T`, `F = -dE/dd = (1/2) Tr[(I - N)^{-1} dN/dd]` at
/// `kappa = 0`. Negative values are attractive.
pub fn force_classical(geom: &Geometry, field: Field, num: &Numerics) -> Result<EnergyResult> {
    num.validate()?;
    let value = classical_force_value(geom, field, num)?;
    Ok(EnergyResult::new(
        value,
        Quantity::Force,
        field,
        Regime::Classical,
        num,
        1,
    ))
}

fn classical_force_value(geom: &Geometry, field: Field, num: &Numerics) -> Result<f64> {
    let grid = grid_for(0.0, geom, num)?;
    let f = assemble_factors(0.0, geom, field, num.n_max, &grid)?;
    let (da, db) = f.d_derivatives();
    let n = f.product();
    let mut dn = da.matmul(&f.b);
    let second = f.a.matmul(&db);
    for (x, y) in dn.as_mut_slice().iter_mut().zip(second.as_slice()) {
        *x += y;
    }
    let lu = Lu::factor(n.one_minus())?;
    super::assembly::classify_log_det(lu.log_det())?;
    lu.solve_in_place(&mut dn);
    Ok(0.5 * dn.trace().re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassicalOptions {
    /// Distance where the force integral hands over to the asymptotic energy.
    pub d_max: f64,
    /// Width of the Gauss-Legendre panels in `ln(gap)`.
    pub panel_width: f64,
    pub nodes_per_panel: usize,
}

impl Default for ClassicalOptions {
    fn default() -> Self {
        Self {
            d_max: 1e4,
            panel_width: 1.0,
            nodes_per_panel: 8,
        }
    }
}

/// Dirichlet classical energy from the force, `E(d) = E_asym(d_max) + int_d^{d_max} F`.
fn dirichlet_energy_from_force(
    geom: &Geometry,
    num: &Numerics,
    opts: &ClassicalOptions,
) -> Result<f64> {
    let rsum = geom.r1 + geom.r2;
    if !(opts.d_max > geom.d) {
        return Err(Error::Config(format!(
            "d_max = {} must exceed d = {}",
            opts.d_max, geom.d
        )));
    }
    if !(opts.panel_width > 0.0) || opts.nodes_per_panel == 0 {
        return Err(Error::Config(
            "force-integration panels must be non-empty".into(),
        ));
    }
    let (u0, u1) = ((geom.d - rsum).ln(), (opts.d_max - rsum).ln());
    let panels = ((u1 - u0) / opts.panel_width).ceil().max(1.0) as usize;
    let h = (u1 - u0) / panels as f64;
    let (t, w) = gauss_legendre(opts.nodes_per_panel);
    let mut nodes = Vec::with_capacity(panels * t.len());
    let mut weights = Vec::with_capacity(panels * t.len());
    for p in 0..panels {
        let a = u0 + p as f64 * h;
        for (ti, wi) in t.iter().zip(&w) {
            let u = a + 0.5 * h * (ti + 1.0);
            let gap = u.exp();
            nodes.push(gap + rsum);
            weights.push(0.5 * h * wi * gap);
        }
    }
    let forces = par_map(&nodes, |d| {
        classical_force_value(&geom.with_d(d)?, Field::Dirichlet, num)
    })?;
    let integral: f64 = forces.iter().zip(&weights).map(|(f, w)| f * w).sum();
    let r_eff = (geom.r1 * geom.r2).sqrt();
    let tail = asympt::dirichlet_classical(opts.d_max, r_eff, geom.theta)?.energy;
    Ok(tail + integral)
}

/// Classical energy per `k_B T`. Neumann uses `(1/2) log det(I - N(0))`
/// directly; Dirichlet integrates the force; the electromagnetic energy is
/// the sum of the two because the polarizations decouple at `kappa = 0`.
pub fn energy_classical(
    geom: &Geometry,
    field: Field,
    num: &Numerics,
    opts: &ClassicalOptions,
) -> Result<EnergyResult> {
    let (value, est, used) = refine(num, |n| match field {
        Field::Neumann => Ok(0.5 * logdet_at(0.0, geom, Field::Neumann, n)?),
        Field::Dirichlet => dirichlet_energy_from_force(geom, n, opts),
        Field::Em => Ok(0.5 * logdet_at(0.0, geom, Field::Neumann, n)?
            + dirichlet_energy_from_force(geom, n, opts)?),
    })?;
    let mut r = EnergyResult::new(value, Quantity::Energy, field, Regime::Classical, &used, 1);
    r.est_error = est;
    Ok(r)
}

/// Torque `-dE/dtheta` by central differences with steps `1e-3` and `5e-4`,
/// combined by one Richardson step.
pub fn torque(
    geom: &Geometry,
    field: Field,
    regime: Regime,
    num: &Numerics,
) -> Result<EnergyResult> {
    const STEP: f64 = 1e-3;
    if geom.theta - STEP < THETA_MIN || geom.theta + STEP > PI - THETA_MIN {
        return Err(Error::Domain(format!(
            "theta = {} too close to the edge of the differencing range",
            geom.theta
        )));
    }
    let energy = |theta: f64| -> Result<f64> {
        let g = geom.with_theta(theta)?;
        let plain = Numerics {
            refine: false,
            ..*num
        };
        match regime {
            Regime::ZeroT => Ok(energy_zero_t(&g, field, &plain)?.value),
            Regime::Classical => {
                Ok(energy_classical(&g, field, &plain, &ClassicalOptions::default())?.value)
            }
            Regime::FiniteT => Err(Error::Config(
                "torque is available for zero_t and classical regimes".into(),
            )),
        }
    };
    let central = |h: f64| -> Result<f64> {
        Ok(-(energy(geom.theta + h)? - energy(geom.theta - h)?) / (2.0 * h))
    };
    let coarse = central(STEP)?;
    let fine = central(0.5 * STEP)?;
    let value = (4.0 * fine - coarse) / 3.0;
    let kappa_nodes = if regime == Regime::ZeroT {
        num.n_kappa
    } else {
        1
    };
    let mut r = EnergyResult::new(value, Quantity::Torque, field, regime, num, kappa_nodes);
    r.est_error = Some((fine - coarse).abs() / 3.0);
    Ok(r)
}
