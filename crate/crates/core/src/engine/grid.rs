use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

/// Quadrature rule for the axial wavenumber on the whole real line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KzGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub map_scale: f64,
}

impl KzGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&k, &w)| w * f(k))
            .sum()
    }
}

/// `k_z` scale used when none is configured: the kernels decay like
/// `exp(-d sqrt(kappa^2 + k_z^2))`.
pub fn default_kz_scale(kappa: f64, d: f64) -> f64 {
    kappa.max(2.0 / d)
}

/// Map from Gauss-Legendre nodes `t` on `(-1, 1)` to `k_z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KzMap {
    /// `k = scale t / (1 - t^2)`.
    Linear,
    /// `k = scale t^3 / (1 - t^2)`. Clusters nodes at `k_z = 0`, where the
    /// Dirichlet `n = 0` amplitude behaves like `1 / ln|k_z|` once `kappa`
    /// is small and the linear map converges only algebraically.
    #[default]
    Cubic,
}

/// Linear-map grid, see [`make_kz_grid_with`].
pub fn make_kz_grid(n_k: usize, map_scale: f64) -> Result<KzGrid> {
    make_kz_grid_with(n_k, map_scale, KzMap::Linear)
}

/// Gauss-Legendre rule on the whole line through `map`. An even node count
/// keeps `k_z = 0` off the grid.
pub fn make_kz_grid_with(n_k: usize, map_scale: f64, map: KzMap) -> Result<KzGrid> {
    if n_k < 8 || !n_k.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "k_z grid needs an even node count of at least 8, got {n_k}"
        )));
    }
    if !(map_scale > 0.0 && map_scale.is_finite()) {
        return Err(Error::Config(format!(
            "k_z map scale must be positive, got {map_scale}"
        )));
    }
    let (t, w) = gauss_legendre(n_k);
    let mut nodes = Vec::with_capacity(n_k);
    let mut weights = Vec::with_capacity(n_k);
    for (&t, &w) in t.iter().zip(&w) {
        let t2 = t * t;
        let s = 1.0 - t2;
        let (k, jac) = match map {
            KzMap::Linear => (t / s, (1.0 + t2) / (s * s)),
            KzMap::Cubic => (t * t2 / s, t2 * (3.0 - t2) / (s * s)),
        };
        nodes.push(map_scale * k);
        weights.push(w * map_scale * jac);
    }
    Ok(KzGrid {
        nodes,
        weights,
        map_scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadOptions};

    #[test]
    fn gaussian_integral() {
        // 48 nodes reach only 2e-8 with this map; 64 nodes reach 1e-10
        let g = make_kz_grid(64, 1.0).unwrap();
        let v = g.integrate(|k| (-k * k).exp());
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-10, "{v}");
    }

    #[test]
    fn kernel_shaped_integral() {
        let f = |k: f64| {
            let q = (1.0 + k * k).sqrt();
            (-2.0 * q).exp() / (2.0 * q)
        };
        let g = make_kz_grid(64, 1.0).unwrap();
        let cubic = make_kz_grid_with(64, 1.0, KzMap::Cubic).unwrap();
        let oracle = 2.0
            * integrate(
                f,
                0.0,
                40.0,
                QuadOptions {
                    abs_tol: 1e-15,
                    rel_tol: 1e-14,
                    max_intervals: 500,
                },
            )
            .unwrap()
            .value;
        // K_0(2) = oracle by the integral representation
        assert!((oracle - 0.113_893_872_749_533_44).abs() < 1e-13);
        assert!((g.integrate(f) - oracle).abs() < 1e-9);
        assert!((cubic.integrate(f) - oracle).abs() < 1e-9);
    }

    #[test]
    fn logarithmic_cusp_at_origin() {
        let f = |k: f64| (-k * k).exp() / (3.0 + k.abs().ln().powi(2)).sqrt();
        let opts = QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-13,
            max_intervals: 2000,
        };
        let oracle = 2.0 * integrate(f, 0.0, 10.0, opts).unwrap().value;
        let cubic = make_kz_grid_with(64, 1.0, KzMap::Cubic).unwrap();
        assert!(
            (cubic.integrate(f) - oracle).abs() < 1e-6 * oracle,
            "{} vs {oracle}",
            cubic.integrate(f)
        );
        let linear = make_kz_grid(64, 1.0).unwrap();
        assert!((linear.integrate(f) - oracle).abs() > 1e-4 * oracle);
    }

    #[test]
    fn symmetric_nodes_and_positive_weights() {
        for map in [KzMap::Linear, KzMap::Cubic] {
            let g = make_kz_grid_with(32, 0.3, map).unwrap();
            for i in 0..32 {
                assert_eq!(g.nodes[i], -g.nodes[31 - i]);
                assert!(g.weights[i] > 0.0);
                assert_ne!(g.nodes[i], 0.0);
            }
        }
        assert!(make_kz_grid(31, 1.0).is_err());
        assert!(make_kz_grid(6, 1.0).is_err());
        assert!(make_kz_grid(8, 0.0).is_err());
    }
}
