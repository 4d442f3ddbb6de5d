//! Cross-product chains, signed tetrahedron volume and the configuration type.
//!
//! For an ordered loop of points `p_1, ..., p_k` the chain sum
//!
//! ```text
//! nu(1, ..., k) = p_1 x p_2 + p_2 x p_3 + ... + p_k x p_1
//! ```
//!
//! is invariant under cyclic shifts, decomposes into the fan
//! `sum_j nu(1, j, j+1)`, and for a planar convex loop has norm equal to twice
//! the enclosed area. All closed-form element fields are built from it.

use std::ops::{Index, IndexMut};

use nalgebra::{DVector, Matrix3};

use crate::error::{Error, Result};

/// A point or tangent direction in 3-space.
pub type Vec3 = nalgebra::Vector3<f64>;

#[inline]
pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    a.cross(b)
}

/// Cyclic cross-product chain over 1-based `indices`.
///
/// Repeated indices are allowed; only the range is checked.
pub fn nu(points: &[Vec3], indices: &[usize]) -> Result<Vec3> {
    if indices.len() < 3 {
        return Err(Error::ChainTooShort(indices.len()));
    }
    if let Some(&index) = indices.iter().find(|&&i| i == 0 || i > points.len()) {
        return Err(Error::InvalidIndex {
            index,
            len: points.len(),
        });
    }
    Ok(chain(points, indices))
}

/// Unchecked chain sum; callers guarantee the 1-based indices are in range.
pub(crate) fn chain(points: &[Vec3], indices: &[usize]) -> Vec3 {
    let k = indices.len();
    (0..k).fold(Vec3::zeros(), |acc, j| {
        let a = &points[indices[j] - 1];
        let b = &points[indices[(j + 1) % k] - 1];
        acc + a.cross(b)
    })
}

/// Signed volume `((p2 - p1) x (p3 - p1)) . (p4 - p1) / 6`.
pub fn tet_signed_volume(p1: &Vec3, p2: &Vec3, p3: &Vec3, p4: &Vec3) -> f64 {
    (p2 - p1).cross(&(p3 - p1)).dot(&(p4 - p1)) / 6.0
}

/// An ordered tuple of vertex positions, i.e. a point of `R^{3n}`.
///
/// The same type carries per-vertex tangent vectors ([`TangentField`]); the
/// tangent space of `R^{3n}` is canonically `R^{3n}` itself.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    points: Vec<Vec3>,
}

/// Per-vertex 3-vectors attached to a configuration.
pub type TangentField = Configuration;

impl Configuration {
    /// Validates `n >= 2` and finite coordinates.
    pub fn new(points: Vec<Vec3>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewPoints(points.len()));
        }
        if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(Self { points })
    }

    pub fn from_rows(rows: &[[f64; 3]]) -> Result<Self> {
        Self::new(rows.iter().map(|r| Vec3::new(r[0], r[1], r[2])).collect())
    }

    pub(crate) fn from_points_unchecked(points: Vec<Vec3>) -> Self {
        Self { points }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            points: vec![Vec3::zeros(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn points_mut(&mut self) -> &mut [Vec3] {
        &mut self.points
    }

    pub fn into_points(self) -> Vec<Vec3> {
        self.points
    }

    pub fn is_finite(&self) -> bool {
        self.points.iter().all(|p| p.iter().all(|c| c.is_finite()))
    }

    /// Euclidean inner product over all `3n` coordinates.
    pub fn dot(&self, other: &Self) -> f64 {
        self.points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| a.dot(b))
            .sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_points_unchecked(self.points.iter().map(|p| p * factor).collect())
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, factor: f64, other: &Self) -> Self {
        Self::from_points_unchecked(
            self.points
                .iter()
                .zip(&other.points)
                .map(|(a, b)| a + b * factor)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(-1.0, other)
    }

    pub fn translated(&self, offset: &Vec3) -> Self {
        Self::from_points_unchecked(self.points.iter().map(|p| p + offset).collect())
    }

    /// Applies `rotation` to every point.
    pub fn rotated(&self, rotation: &Matrix3<f64>) -> Self {
        Self::from_points_unchecked(self.points.iter().map(|p| rotation * p).collect())
    }

    /// Sum of all vertex vectors.
    pub fn vector_sum(&self) -> Vec3 {
        self.points.iter().sum()
    }

    pub fn centroid(&self) -> Vec3 {
        self.vector_sum() / self.points.len() as f64
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| (a - b).amax())
            .fold(0.0, f64::max)
    }

    /// Picks the vertices at the given 1-based indices, in order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self::from_points_unchecked(indices.iter().map(|&i| self.points[i - 1]).collect())
    }

    /// Flattens to `(x_1, y_1, z_1, x_2, ...)`.
    pub fn to_flat(&self) -> DVector<f64> {
        DVector::from_iterator(3 * self.len(), self.points.iter().flat_map(|p| p.iter().copied()))
    }

    pub fn from_flat(flat: &DVector<f64>) -> Self {
        assert_eq!(flat.len() % 3, 0, "flat configuration length must be a multiple of 3");
        Self::from_points_unchecked(
            flat.as_slice()
                .chunks_exact(3)
                .map(|c| Vec3::new(c[0], c[1], c[2]))
                .collect(),
        )
    }
}

impl Index<usize> for Configuration {
    type Output = Vec3;

    fn index(&self, i: usize) -> &Vec3 {
        &self.points[i]
    }
}

impl IndexMut<usize> for Configuration {
    fn index_mut(&mut self, i: usize) -> &mut Vec3 {
        &mut self.points[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    #[test]
    fn cross_examples() {
        assert_eq!(cross(&v(1., 0., 0.), &v(0., 1., 0.)), v(0., 0., 1.));
        assert_eq!(cross(&v(1., 2., 3.), &v(1., 2., 3.)), Vec3::zeros());
        assert_eq!(cross(&v(0., 0., 2.), &v(3., 0., 0.)), v(0., 6., 0.));
    }

    #[test]
    fn nu_of_unit_square_is_twice_area() {
        let sq = [v(0., 0., 0.), v(1., 0., 0.), v(1., 1., 0.), v(0., 1., 0.)];
        assert_eq!(nu(&sq, &[1, 2, 3, 4]).unwrap(), v(0., 0., 2.));
    }

    #[test]
    fn nu_is_cyclic() {
        let pts = [v(0.3, -1.2, 0.7), v(2.0, 0.1, -0.4), v(-0.9, 0.8, 1.5)];
        assert_eq!(nu(&pts, &[1, 2, 3]).unwrap(), nu(&pts, &[2, 3, 1]).unwrap());
    }

    #[test]
    fn nu_of_collinear_points_through_origin_vanishes() {
        let d = v(1., -2., 0.5);
        let pts = [d * 0.5, d * -1.0, d * 3.0, d * 2.0];
        assert_eq!(nu(&pts, &[1, 2, 3, 4]).unwrap(), Vec3::zeros());
    }

    #[test]
    fn nu_accepts_repeated_indices() {
        let pts = [v(1., 0., 0.), v(0., 1., 0.), v(0., 0., 1.)];
        // p1 x p2 + p2 x p1 + p1 x p3 + p3 x p1 = 0
        assert_eq!(nu(&pts, &[1, 2, 1, 3]).unwrap(), Vec3::zeros());
    }

    #[test]
    fn nu_rejects_bad_indices() {
        let pts = [v(1., 0., 0.), v(0., 1., 0.), v(0., 0., 1.)];
        assert!(matches!(
            nu(&pts, &[1, 2, 4]),
            Err(Error::InvalidIndex { index: 4, len: 3 })
        ));
        assert!(matches!(
            nu(&pts, &[0, 1, 2]),
            Err(Error::InvalidIndex { index: 0, .. })
        ));
        assert!(matches!(nu(&pts, &[1, 2]), Err(Error::ChainTooShort(2))));
    }

    #[test]
    fn tet_volume_examples() {
        let o = v(0., 0., 0.);
        let (e1, e2, e3) = (v(1., 0., 0.), v(0., 1., 0.), v(0., 0., 1.));
        assert_relative_eq!(tet_signed_volume(&o, &e1, &e2, &e3), 1.0 / 6.0);
        assert_relative_eq!(tet_signed_volume(&o, &e1, &e3, &e2), -1.0 / 6.0);

        let s3 = 3f64.sqrt();
        let regular = tet_signed_volume(
            &o,
            &e1,
            &v(0.5, s3 / 2.0, 0.),
            &v(0.5, s3 / 6.0, (2.0f64 / 3.0).sqrt()),
        );
        assert_relative_eq!(regular, 0.117_851_130_197_757_9, epsilon = 1e-15);
        assert_relative_eq!(regular, 2f64.sqrt() / 12.0, epsilon = 1e-15);
    }

    #[test]
    fn configuration_rejects_bad_input() {
        assert!(matches!(
            Configuration::from_rows(&[[0., 0., 0.]]),
            Err(Error::TooFewPoints(1))
        ));
        assert!(matches!(
            Configuration::from_rows(&[[0., 0., 0.], [f64::NAN, 0., 0.]]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn flat_round_trip() {
        let c = Configuration::from_rows(&[[1., 2., 3.], [4., 5., 6.]]).unwrap();
        let flat = c.to_flat();
        assert_eq!(flat.as_slice(), &[1., 2., 3., 4., 5., 6.]);
        assert_eq!(Configuration::from_flat(&flat), c);
    }
}
