//! Configurations up to translation and positive scaling.
//!
//! The quotient `N` is identified with the unit sphere inside the subspace
//! `{p_n = 0}` via `pi = sigma . tau`:
//!
//! - `tau` moves the last vertex to the origin,
//! - `sigma` scales to unit Euclidean norm over all `3n` coordinates.
//!
//! A tangent vector `v` at `p` is carried to `T_{pi(p)} N` by the differential
//! of `pi`: subtract the last component from every component, remove the
//! radial part along `tau(p)` and divide by `|tau(p)|`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{Configuration, TangentField};

pub const DEFAULT_COLLINEAR_TOL: f64 = 1e-9;

/// `(p_1 - p_n, ..., p_{n-1} - p_n, 0)`.
pub fn tau(p: &Configuration) -> Configuration {
    let last = p[p.len() - 1];
    let mut out = p.translated(&-last);
    // exact zero, not last - last rounding
    let n = out.len();
    out[n - 1] = nalgebra::Vector3::zeros();
    out
}

/// `p / |p|` over all `3n` coordinates.
pub fn sigma(p: &Configuration) -> Result<Configuration> {
    let norm = p.norm();
    if norm == 0.0 {
        return Err(Error::DegenerateConfiguration);
    }
    Ok(p.scaled(1.0 / norm))
}

/// Projection `M -> N`.
pub fn pi(p: &Configuration) -> Result<Configuration> {
    sigma(&tau(p))
}

/// Differential of `pi` at `p` applied to `v`.
///
/// For `p` on `N` the result satisfies `<w, p> = 0` and `w_n = 0`.
pub fn push_tangent(p: &Configuration, v: &TangentField) -> Result<TangentField> {
    let q = tau(p);
    let q_norm = q.norm();
    if q_norm == 0.0 {
        return Err(Error::DegenerateConfiguration);
    }
    let u = tau(v);
    let radial = u.dot(&q) / (q_norm * q_norm);
    Ok(u.add_scaled(-radial, &q).scaled(1.0 / q_norm))
}

/// `v / sqrt(|v|)`, with `0 -> 0`.
pub fn psi(v: &TangentField) -> TangentField {
    let norm = v.norm();
    if norm == 0.0 {
        v.clone()
    } else {
        v.scaled(1.0 / norm.sqrt())
    }
}

/// Singular values of the centered `n x 3` point matrix, descending.
pub fn centered_singular_values(p: &Configuration) -> [f64; 3] {
    let c = p.centroid();
    let m = DMatrix::from_fn(p.len(), 3, |i, j| p[i][j] - c[j]);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.resize(3, 0.0);
    s.sort_by(|a, b| b.total_cmp(a));
    [s[0], s[1], s[2]]
}

/// True iff the second singular value of the centered points is below
/// `tol` times the largest. A fully degenerate configuration counts as collinear.
pub fn is_collinear(p: &Configuration, tol: f64) -> bool {
    let [s0, s1, _] = centered_singular_values(p);
    s0 == 0.0 || s1 < tol * s0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;
    use approx::assert_relative_eq;

    fn sample() -> Configuration {
        Configuration::from_rows(&[
            [0.3, -1.1, 0.4],
            [1.7, 0.2, -0.6],
            [-0.8, 0.9, 1.3],
            [0.1, 0.5, -1.2],
        ])
        .unwrap()
    }

    #[test]
    fn tau_examples() {
        let p = Configuration::from_rows(&[[1., 1., 1.], [2., 2., 2.]]).unwrap();
        let expected = Configuration::from_rows(&[[-1., -1., -1.], [0., 0., 0.]]).unwrap();
        assert_eq!(tau(&p), expected);
        assert_eq!(tau(&expected), expected);

        let q = sample();
        let shifted = q.translated(&Vec3::new(3.5, -2.0, 7.25));
        assert!(tau(&q).max_abs_diff(&tau(&shifted)) < 1e-14);
    }

    #[test]
    fn sigma_examples() {
        let p = Configuration::from_rows(&[[3., 0., 0.], [0., 4., 0.]]).unwrap();
        let s = sigma(&p).unwrap();
        assert_relative_eq!(s[0].x, 0.6);
        assert_relative_eq!(s[1].y, 0.8);
        assert!(sigma(&s).unwrap().max_abs_diff(&s) < 1e-16);
        assert!(sigma(&p.scaled(7.5)).unwrap().max_abs_diff(&s) < 1e-15);
        assert!(matches!(
            sigma(&Configuration::zeros(3)),
            Err(Error::DegenerateConfiguration)
        ));
    }

    #[test]
    fn pi_examples() {
        let p = sample();
        let q = p.scaled(2.0).translated(&Vec3::new(-1.0, 0.5, 2.0));
        let on_n = pi(&p).unwrap();
        assert!(on_n.max_abs_diff(&pi(&q).unwrap()) < 1e-14);
        assert!(pi(&on_n).unwrap().max_abs_diff(&on_n) < 1e-15);
        assert_relative_eq!(on_n.norm(), 1.0, epsilon = 1e-15);
        assert_eq!(on_n[3], Vec3::zeros());

        let same = Configuration::from_rows(&[[1., 2., 3.]; 4]).unwrap();
        assert!(matches!(pi(&same), Err(Error::DegenerateConfiguration)));
    }

    #[test]
    fn push_tangent_kills_radial_and_translation() {
        let p = pi(&sample()).unwrap();
        let radial = push_tangent(&p, &p.scaled(2.5)).unwrap();
        assert!(radial.norm() < 1e-15);

        let constant = Configuration::from_rows(&[[0.3, -0.2, 0.9]; 4]).unwrap();
        assert!(push_tangent(&p, &constant).unwrap().norm() < 1e-15);

        let v = Configuration::from_rows(&[
            [1.0, 2.0, -0.5],
            [0.2, -1.3, 0.7],
            [-0.4, 0.1, 0.3],
            [0.9, 0.6, -1.1],
        ])
        .unwrap();
        let w = push_tangent(&p, &v).unwrap();
        assert!(w.dot(&p).abs() < 1e-15);
        assert_eq!(w[3], Vec3::zeros());
    }

    #[test]
    fn psi_examples() {
        let v = Configuration::from_rows(&[[4., 0., 0.], [0., 0., 0.]]).unwrap();
        let expected = Configuration::from_rows(&[[2., 0., 0.], [0., 0., 0.]]).unwrap();
        assert_eq!(psi(&v), expected);
        assert_eq!(psi(&Configuration::zeros(3)), Configuration::zeros(3));

        let w = sample();
        let t = 1.7;
        assert!(psi(&w.scaled(t * t)).max_abs_diff(&psi(&w).scaled(t)) < 1e-14);
        assert_relative_eq!(psi(&w).norm(), w.norm().sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn collinearity() {
        let line = Configuration::from_rows(&[[0., 0., 0.], [1., 0., 0.], [2.5, 0., 0.], [-3., 0., 0.]])
            .unwrap();
        assert!(is_collinear(&line, DEFAULT_COLLINEAR_TOL));

        let s3 = 3f64.sqrt();
        let regular = Configuration::from_rows(&[
            [0., 0., 0.],
            [1., 0., 0.],
            [0.5, s3 / 2., 0.],
            [0.5, s3 / 6., (2f64 / 3.).sqrt()],
        ])
        .unwrap();
        assert!(!is_collinear(&regular, DEFAULT_COLLINEAR_TOL));

        // perturbation 1e-12 off a unit-scale line: second singular value ~1e-12
        let mut nearly = line.clone();
        nearly[1].y += 1e-12;
        nearly[2].z -= 1e-12;
        let [s0, s1, _] = centered_singular_values(&nearly);
        assert!(s1 / s0 < 1e-11);
        assert!(is_collinear(&nearly, 1e-9));
    }
}
