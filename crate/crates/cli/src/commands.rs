use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use inclined_casimir::engine::{
    energy_classical, energy_finite_t, energy_zero_t, force_classical, torque, ClassicalOptions,
    THETA_MIN,
};
use inclined_casimir::pfa::{self, PfaConfig};
use inclined_casimir::{asympt, EnergyResult, Field, Geometry, Regime};
use serde::Serialize;

use crate::config::{RunConfig, FIGURE_MIN_D};
use crate::error::{CliError, Result};
use crate::table::{point_cells, sweep_table, Cell, SweepRow, Table, POINT_HEADER};
use crate::Command;

/// Convergence metadata written to the `.meta.json` sidecar. Contains no
/// timestamps so that repeated runs give identical files.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: RunConfig,
    /// One entry per numerically evaluated point, in row order.
    pub results: Vec<EnergyResult>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Output {
    pub table: Table,
    pub meta: Meta,
}

pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Output> {
    let mut results = Vec::new();
    let mut notes = Vec::new();
    let table = match command {
        Command::Energy | Command::Force | Command::Torque => {
            let res = point(command, cfg)?;
            let mut t = Table::new(&POINT_HEADER);
            t.push(point_cells(
                &res,
                cfg.require_d()?,
                cfg.theta,
                cfg.r1,
                cfg.r2,
            ));
            results.push(res);
            t
        }
        Command::Sweep => {
            let rs = r_grid(cfg, 9)?;
            let (rows, res, n) = sweep(&rs, &[cfg.theta], cfg)?;
            results = res;
            notes = n;
            sweep_table(&rows, cfg.units)
        }
        Command::Figure { which } => {
            let (rows, res, n) = figure(*which, cfg)?;
            results = res;
            notes = n;
            sweep_table(&rows, cfg.units)
        }
        Command::Omega { fourier } => omega_table(*fourier, cfg)?,
        Command::Pfa => pfa_table(cfg, &mut notes)?,
    };
    notes.dedup();
    let meta = Meta {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: command.name(),
        config: cfg.clone(),
        results,
        notes,
    };
    Ok(Output { table, meta })
}

/// Writes the table to `cfg.output` (plus sidecar) or to stdout.
pub fn emit(out: &Output, cfg: &RunConfig) -> Result<()> {
    match &cfg.output {
        Some(path) => {
            let mut buf = Vec::new();
            out.table.write(cfg.format, &mut buf)?;
            std::fs::write(path, &buf).map_err(|e| CliError::io(path, e))?;
            let meta =
                serde_json::to_vec_pretty(&out.meta).map_err(|e| CliError::Write(e.to_string()))?;
            let side = sidecar_path(path);
            std::fs::write(&side, meta).map_err(|e| CliError::io(side, e))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            out.table.write(cfg.format, &mut lock)
        }
    }
}

/// `out.csv` -> `out.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

fn point(command: &Command, cfg: &RunConfig) -> Result<EnergyResult> {
    let geom = Geometry::new(cfg.require_d()?, cfg.theta, cfg.r1, cfg.r2)?;
    match command {
        Command::Energy => energy(&geom, cfg),
        Command::Force => {
            if cfg.regime != Regime::Classical {
                return Err(CliError::usage(
                    "the force is computed in the classical regime only; pass --regime classical",
                ));
            }
            Ok(force_classical(&geom, cfg.field, &cfg.numerics)?)
        }
        _ => Ok(torque(&geom, cfg.field, cfg.regime, &cfg.numerics)?),
    }
}

fn energy(geom: &Geometry, cfg: &RunConfig) -> Result<EnergyResult> {
    Ok(match cfg.regime {
        Regime::ZeroT => energy_zero_t(geom, cfg.field, &cfg.numerics)?,
        Regime::Classical => {
            energy_classical(geom, cfg.field, &cfg.numerics, &ClassicalOptions::default())?
        }
        Regime::FiniteT => {
            let t = cfg
                .temperature
                .ok_or_else(|| CliError::usage("finite_t needs --temperature"))?;
            energy_finite_t(geom, cfg.field, t, &cfg.numerics, cfg.matsubara_terms)?
        }
    })
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn r_grid(cfg: &RunConfig, default_points: usize) -> Result<Vec<f64>> {
    let rs = match &cfg.r {
        Some(rs) => rs.clone(),
        None => linspace(cfg.r_min, cfg.r_max, cfg.points.unwrap_or(default_points)),
    };
    if rs.is_empty() {
        return Err(CliError::usage("empty r list"));
    }
    for &r in &rs {
        if !(r > 0.0 && FIGURE_MIN_D * r <= 1.0) {
            return Err(inclined_casimir::Error::Domain(format!(
                "r = {r} outside (0, 1/{FIGURE_MIN_D}]; separations below d = {FIGURE_MIN_D} R are not supported"
            ))
            .into());
        }
    }
    Ok(rs)
}

/// Runs `f` over `items` on `jobs` threads; results keep the input order.
pub fn ordered_map<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..jobs.min(items.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                *slots[i].lock().unwrap_or_else(|e| e.into_inner()) = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| {
            m.into_inner()
                .unwrap_or_else(|e| e.into_inner())
                .expect("every slot is filled")
        })
        .collect()
}

fn asymptote(field: Field, regime: Regime, d: f64, r: f64, theta: f64) -> Result<Option<f64>> {
    use Field::*;
    Ok(Some(match (field, regime) {
        (Dirichlet, Regime::ZeroT) => asympt::dirichlet_zero_t(d, r, theta)?.value,
        (Neumann, Regime::ZeroT) => asympt::neumann_zero_t(d, r, theta)?.value,
        (Em, Regime::ZeroT) => asympt::em_zero_t(d, r, theta)?.value,
        (Dirichlet, Regime::Classical) => asympt::dirichlet_classical(d, r, theta)?.energy,
        (Neumann, Regime::Classical) => asympt::neumann_classical(d, r, theta)?.value,
        (Em, Regime::Classical) => asympt::em_classical(d, r, theta)?.energy,
        (_, Regime::FiniteT) => return Ok(None),
    }))
}

/// PFA depends on the inclination only through `sin(theta)`, so angles past
/// `pi/2` are folded back.
fn pfa_config(d: f64, r: f64, theta: f64, regime: Regime) -> Result<PfaConfig> {
    let folded = if theta > FRAC_PI_2 { PI - theta } else { theta };
    Ok(PfaConfig::new(d, r, folded, regime)?)
}

fn sweep_point(
    r: f64,
    theta: f64,
    cfg: &RunConfig,
) -> Result<(SweepRow, EnergyResult, Option<String>)> {
    let radius = cfg.equal_radii()?;
    let d = radius / r;
    let res = energy(&Geometry::equal_radii(d, theta, radius)?, cfg)?;
    let (e_pfa, e_gradexp, note) = if cfg.regime == Regime::FiniteT {
        (None, None, None)
    } else {
        let pc = pfa_config(d, radius, theta, cfg.regime)?;
        let grad = (cfg.regime == Regime::ZeroT)
            .then(|| pfa::gradient_expansion(&pc))
            .transpose()?;
        let note = grad.as_ref().and_then(|g| g.validity_note.clone());
        (Some(pfa::pfa_limit(&pc)), grad.map(|g| g.value), note)
    };
    let row = SweepRow {
        r,
        theta,
        e_num: Some(res.value),
        e_pfa,
        e_asym: asymptote(cfg.field, cfg.regime, d, radius, theta)?,
        e_gradexp,
        ratio_num_pfa: e_pfa.map(|p| res.value / p),
        omega_ratio: None,
    };
    Ok((row, res, note))
}

type SweepOutput = (Vec<SweepRow>, Vec<EnergyResult>, Vec<String>);

/// Evaluates every `(r, theta)` pair, `r` outermost.
fn sweep(rs: &[f64], thetas: &[f64], cfg: &RunConfig) -> Result<SweepOutput> {
    let pairs: Vec<(f64, f64)> = rs
        .iter()
        .flat_map(|&r| thetas.iter().map(move |&t| (r, t)))
        .collect();
    let outcomes = ordered_map(&pairs, cfg.jobs, |&(r, t)| sweep_point(r, t, cfg));
    let mut rows = Vec::with_capacity(pairs.len());
    let mut results = Vec::with_capacity(pairs.len());
    let mut notes = Vec::new();
    for o in outcomes {
        let (row, res, note) = o?;
        rows.push(row);
        results.push(res);
        notes.extend(note);
    }
    Ok((rows, results, notes))
}

fn figure(which: u8, cfg: &RunConfig) -> Result<SweepOutput> {
    match which {
        2 | 3 => {
            let theta = if which == 2 { FRAC_PI_2 } else { FRAC_PI_4 };
            sweep(&r_grid(cfg, 9)?, &[theta], cfg)
        }
        4 => {
            let rs = match &cfg.r {
                Some(_) => r_grid(cfg, 4)?,
                None => vec![0.01, 0.1, 0.2, 0.3],
            };
            let mut thetas = cfg
                .thetas
                .clone()
                .unwrap_or_else(|| linspace(THETA_MIN, FRAC_PI_2, cfg.points.unwrap_or(10)));
            if !thetas.contains(&FRAC_PI_2) {
                thetas.push(FRAC_PI_2);
            }
            thetas.sort_by(f64::total_cmp);
            thetas.dedup();
            let (mut rows, results, notes) = sweep(&rs, &thetas, cfg)?;
            for block in rows.chunks_mut(thetas.len()) {
                let reference = block
                    .iter()
                    .find(|row| row.theta == FRAC_PI_2)
                    .and_then(|row| row.e_num);
                for row in block.iter_mut() {
                    row.omega_ratio = match (row.e_num, reference) {
                        (Some(e), Some(e_ref)) => Some(e * row.theta.sin() / e_ref),
                        _ => None,
                    };
                }
            }
            Ok((rows, results, notes))
        }
        _ => Err(CliError::usage(format!(
            "unknown figure {which}; expected 2, 3 or 4"
        ))),
    }
}

fn omega_table(fourier: Option<usize>, cfg: &RunConfig) -> Result<Table> {
    if let Some(n) = fourier {
        let mut t = Table::new(&["index", "coefficient"]);
        for (k, c) in asympt::omega_fourier(n)?.into_iter().enumerate() {
            t.push(vec![Cell::Int(2 * k as u64), Cell::Real(Some(c))]);
        }
        return Ok(t);
    }
    let thetas = cfg
        .thetas
        .clone()
        .unwrap_or_else(|| linspace(0.0, FRAC_PI_2, cfg.points.unwrap_or(19)));
    let mut t = Table::new(&["theta", "omega"]);
    for theta in thetas {
        t.push(vec![
            Cell::Real(Some(theta)),
            Cell::Real(Some(asympt::omega(theta)?)),
        ]);
    }
    Ok(t)
}

fn pfa_table(cfg: &RunConfig, notes: &mut Vec<String>) -> Result<Table> {
    let radius = cfg.equal_radii()?;
    let pc = pfa_config(cfg.require_d()?, radius, cfg.theta, cfg.regime)?;
    let exact = pfa::pfa_exact(&pc)?;
    let limit = pfa::pfa_limit(&pc);
    let grad = (cfg.regime == Regime::ZeroT)
        .then(|| pfa::gradient_expansion(&pc))
        .transpose()?;
    if let Some(note) = grad.as_ref().and_then(|g| g.validity_note.clone()) {
        notes.push(note);
    }
    let mut t = Table::new(&[
        "d",
        "theta",
        "r",
        "regime",
        "l_over_r",
        "pfa_exact",
        "pfa_limit",
        "ratio_exact_limit",
        "E_gradexp",
    ]);
    t.push(vec![
        Cell::Real(Some(pc.d)),
        Cell::Real(Some(cfg.theta)),
        Cell::Real(Some(radius)),
        Cell::Text(cfg.regime.to_string()),
        Cell::Real(Some(pc.gap_ratio())),
        Cell::Real(Some(exact)),
        Cell::Real(Some(limit)),
        Cell::Real(Some(exact / limit)),
        Cell::Real(grad.map(|g| g.value)),
    ]);
    Ok(t)
}
