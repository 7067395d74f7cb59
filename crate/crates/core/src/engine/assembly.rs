//! Nyström discretization of the round-trip operator.
//!
//! Row/column index `(pol, n, k)` flattened as `(pol * (2 n_max + 1) + n + n_max) * N_k + k`.
//! Electromagnetic polarization 0 is the M wave (Neumann amplitude), 1 the
//! N wave (Dirichlet amplitude). This is the only place that mapping lives.
//!
//! With `W[a][b]` the translation kernel from outgoing waves `b` of cylinder 2
//! to regular waves `a` of cylinder 1, carrying `sqrt(w_a w_b)` and
//! `sqrt(|T1_a| |T2_b|)`, the round trip is `N = A B` with
//! `A = sgn(T1) W` and `B = sgn(T2) S W^T S`, where `S` is the inverse-transform
//! parity `(-1)^n` (times `-1` on N waves). `N` is similar to `T1 U12 T2 U21`.

use num_complex::Complex64;

use super::grid::{default_kz_scale, make_kz_grid_with, KzGrid};
use super::{Field, Geometry, Numerics};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Lu};
use crate::scatter::{log_amplitude, Boundary};
use crate::waves::{branch_factor, minus_i_pow, polarization_factors, Kinematics};

#[derive(Debug, Clone)]
pub struct RoundTrip {
    pub kappa: f64,
    pub field: Field,
    pub geometry: Geometry,
    pub n_max: u32,
    pub grid: KzGrid,
    pub matrix: CMatrix,
}

impl RoundTrip {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// The two half round trips and the decay rates `q` of every `W` entry.
pub(crate) struct Factors {
    pub a: CMatrix,
    pub b: CMatrix,
    /// `q[a * dim + b]` for the entry `W[a][b]`.
    pub q: Vec<f64>,
}

impl Factors {
    pub fn product(&self) -> CMatrix {
        self.a.matmul(&self.b)
    }

    /// `dA/dd` and `dB/dd`; only the factor `exp(-d q)` depends on `d`.
    pub fn d_derivatives(&self) -> (CMatrix, CMatrix) {
        let n = self.a.rows();
        let mut da = self.a.clone();
        let mut db = self.b.clone();
        for i in 0..n {
            for j in 0..n {
                da[(i, j)] *= -self.q[i * n + j];
                db[(j, i)] *= -self.q[i * n + j];
            }
        }
        (da, db)
    }
}

fn boundary_of(field: Field, pol: usize) -> Boundary {
    match (field, pol) {
        (Field::Dirichlet, _) => Boundary::Dirichlet,
        (Field::Neumann, _) => Boundary::Neumann,
        (Field::Em, 0) => Boundary::Neumann,
        (Field::Em, _) => Boundary::Dirichlet,
    }
}

/// Per-index sign and `ln |T|` for one cylinder.
fn amplitudes(
    field: Field,
    n_max: i32,
    grid: &KzGrid,
    kappa: f64,
    radius: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut sign = Vec::new();
    let mut ln_abs = Vec::new();
    for pol in 0..field.blocks() {
        let boundary = boundary_of(field, pol);
        for n in -n_max..=n_max {
            for &k in &grid.nodes {
                let t = log_amplitude(boundary, n, kappa.hypot(k), radius)?;
                sign.push(t.sign);
                ln_abs.push(t.ln_abs);
            }
        }
    }
    Ok((sign, ln_abs))
}

pub(crate) fn assemble_factors(
    kappa: f64,
    geom: &Geometry,
    field: Field,
    n_max: u32,
    grid: &KzGrid,
) -> Result<Factors> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::Domain(format!(
            "imaginary frequency must be non-negative, got {kappa}"
        )));
    }
    let nm = n_max as i32;
    let nn = 2 * n_max as usize + 1;
    let nk = grid.len();
    let blocks = field.blocks();
    let dim = blocks * nn * nk;
    let (sign1, ln1) = amplitudes(field, nm, grid, kappa, geom.r1)?;
    let (sign2, ln2) = amplitudes(field, nm, grid, kappa, geom.r2)?;
    let sin_t = geom.theta.sin();

    let mut w = CMatrix::zeros(dim, dim);
    let mut q = vec![0.0; dim * dim];
    let mut pow_in = vec![0.0; nn];
    let mut pow_out = vec![0.0; nn];
    for ka in 0..nk {
        for kb in 0..nk {
            let (kz_in, kz_out) = (grid.nodes[ka], grid.nodes[kb]);
            let kin = Kinematics::new(kz_out, kz_in, kappa, geom.theta)?;
            let radial = (grid.weights[ka] * grid.weights[kb]).sqrt() / (2.0 * kin.q * sin_t);
            let (g_in, g_out) = (branch_factor(kin.xi_in), branch_factor(kin.xi_out));
            for (idx, n) in (-nm..=nm).enumerate() {
                // g_in^{-n} and g_out^{n}
                pow_in[idx] = crate::waves::int_pow(g_in, -n);
                pow_out[idx] = crate::waves::int_pow(g_out, n);
            }
            let pol = if blocks == 2 {
                let (c, x) = polarization_factors(&kin, kz_out, kz_in, kappa, geom.theta);
                // rows: regular polarization, columns: outgoing polarization
                [[c, -x], [x, c]]
            } else {
                [[1.0, 0.0], [0.0, 0.0]]
            };
            for ia in 0..nn {
                for ib in 0..nn {
                    let na = ia as i32 - nm;
                    let nb = ib as i32 - nm;
                    let phase = minus_i_pow(na + nb) * (pow_in[ia] * pow_out[ib] * radial);
                    for alpha in 0..blocks {
                        let row = (alpha * nn + ia) * nk + ka;
                        for beta in 0..blocks {
                            let col = (beta * nn + ib) * nk + kb;
                            let scale = (-geom.d * kin.q + 0.5 * (ln1[row] + ln2[col])).exp();
                            w[(row, col)] = phase * (pol[alpha][beta] * scale);
                            q[row * dim + col] = kin.q;
                        }
                    }
                }
            }
        }
    }

    let parity: Vec<f64> = (0..dim)
        .map(|i| {
            let pol = i / (nn * nk);
            let n = ((i / nk) % nn) as i32 - nm;
            let s = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            if pol == 1 {
                -s
            } else {
                s
            }
        })
        .collect();
    let mut b = w.transpose();
    let row_scale: Vec<f64> = parity.iter().zip(&sign2).map(|(p, s)| p * s).collect();
    b.scale_rows(&row_scale);
    b.scale_cols(&parity);
    let mut a = w;
    a.scale_rows(&sign1);
    Ok(Factors { a, b, q })
}

/// Builds `N(kappa)` on the given `k_z` grid.
pub fn assemble_roundtrip(
    kappa: f64,
    geom: &Geometry,
    field: Field,
    n_max: u32,
    grid: &KzGrid,
) -> Result<RoundTrip> {
    let f = assemble_factors(kappa, geom, field, n_max, grid)?;
    Ok(RoundTrip {
        kappa,
        field,
        geometry: *geom,
        n_max,
        grid: grid.clone(),
        matrix: f.product(),
    })
}

/// Grid for one frequency under the given numerics.
pub(crate) fn grid_for(kappa: f64, geom: &Geometry, num: &Numerics) -> Result<KzGrid> {
    make_kz_grid_with(
        num.n_k,
        num.kz_scale
            .unwrap_or_else(|| default_kz_scale(kappa, geom.d)),
        num.kz_map,
    )
}

/// Tolerated imaginary part of `log det(I - N)`.
const IMAG_TOL: f64 = 1e-8;

pub(crate) fn classify_log_det(ld: Complex64) -> Result<f64> {
    if !ld.re.is_finite() {
        return Err(Error::Proximity("log det(I - N) is not finite".into()));
    }
    if (ld.im.abs() - std::f64::consts::PI).abs() < 1e-6 {
        return Err(Error::Proximity(
            "det(I - N) < 0: round trip has an eigenvalue beyond 1; geometry too close or discretization insufficient"
                .into(),
        ));
    }
    if ld.im.abs() >= IMAG_TOL {
        return Err(Error::Assembly { imag: ld.im });
    }
    Ok(ld.re)
}

/// Below this Frobenius norm `log det(I - N)` is summed as `-sum_p Tr N^p / p`;
/// the LU route would lose everything below `1e-16` to rounding in `I - N`.
const SERIES_NORM: f64 = 1e-3;

pub(crate) fn logdet_matrix(n: &CMatrix) -> Result<f64> {
    let norm = n
        .as_slice()
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if norm >= SERIES_NORM {
        return classify_log_det(Lu::factor(n.one_minus())?.log_det());
    }
    // |Tr N^p| <= norm^p, so the neglected tail is below norm^(p+1) / (1 - norm)
    let mut sum = -n.trace();
    let mut power = n.clone();
    let mut bound = norm;
    let mut p = 1.0;
    while bound * norm > 1e-17 * sum.norm() {
        power = power.matmul(n);
        p += 1.0;
        bound *= norm;
        sum -= power.trace() / p;
    }
    classify_log_det(sum)
}

/// `log det(I - N)`, real by construction.
pub fn logdet_one_minus(rt: &RoundTrip) -> Result<f64> {
    logdet_matrix(&rt.matrix)
}
