//! Linearization spectra of the pushed-forward fields.
//!
//! At a zero `p` of the quotient field `Y = D(pi)(X)` the Jacobian of `Y`
//! (taken over all `3n` ambient coordinates by central differences) is the
//! linearization of the flow. Its eigenvalues are real for gradient fields and
//! coincide with the Hessian eigenvalues of the restricted mean volume; the
//! translation, scaling and rotation directions contribute zeros.
//!
//! The Jacobian is not symmetric in these coordinates (moving the last vertex
//! to the origin is not an orthogonal projection), so eigenvalues come from a
//! general nonsymmetric solver. Whether `X` itself is a gradient field is
//! checked separately via the symmetry of its ambient Jacobian.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::elements::{check_size, field, ElementKind, FieldVariant};
use crate::error::{Error, Result};
use crate::geometry::{Configuration, TangentField};
use crate::parallel::map_indexed;
use crate::quotient::{is_collinear, pi, push_tangent, DEFAULT_COLLINEAR_TOL};

pub const JACOBIAN_STEP: f64 = 1e-5;
/// Eigenvalues closer than this are grouped into one multiplicity.
pub const GROUPING_TOL: f64 = 1e-4;
/// `|value|` below this counts as a zero eigenvalue.
pub const ZERO_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenGroup {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Nonzero eigenvalue groups, ascending.
    pub eigenvalues: Vec<EigenGroup>,
    pub zero_count: usize,
    /// `|J - J^T| / |J|` of the ambient Jacobian of the unpushed field.
    pub asymmetry: f64,
    /// Largest imaginary part among the computed eigenvalues.
    pub max_imaginary: f64,
    /// All real parts, ascending.
    pub values: Vec<f64>,
}

impl Spectrum {
    pub fn positive_count(&self) -> usize {
        self.values.iter().filter(|&&v| v > ZERO_TOL).count()
    }

    pub fn negative_count(&self) -> usize {
        self.values.iter().filter(|&&v| v < -ZERO_TOL).count()
    }
}

/// Central-difference Jacobian of a per-vertex map, columns in coordinate order.
pub fn central_jacobian<F>(p: &Configuration, step: f64, map: F) -> Result<DMatrix<f64>>
where
    F: Fn(&Configuration) -> Result<TangentField> + Sync + Send,
{
    let base = p.to_flat();
    let dim = base.len();
    let columns = map_indexed(dim, |j| -> Result<Vec<f64>> {
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[j] += step;
        minus[j] -= step;
        let fp = map(&Configuration::from_flat(&plus))?.to_flat();
        let fm = map(&Configuration::from_flat(&minus))?.to_flat();
        Ok(((fp - fm) / (2.0 * step)).as_slice().to_vec())
    });
    let mut jac = DMatrix::zeros(dim, dim);
    for (j, column) in columns.into_iter().enumerate() {
        let column = column?;
        for (i, value) in column.into_iter().enumerate() {
            jac[(i, j)] = value;
        }
    }
    if jac.iter().all(|v| v.is_finite()) {
        Ok(jac)
    } else {
        Err(Error::NonFiniteJacobian)
    }
}

/// `D(pi)_p (X_p)`, tangent to `N` at `pi(p)`.
pub fn pushed_field(kind: ElementKind, variant: FieldVariant, p: &Configuration) -> Result<TangentField> {
    push_tangent(p, &field(kind, variant, p)?)
}

pub fn asymmetry_ratio(jac: &DMatrix<f64>) -> f64 {
    let norm = jac.norm();
    if norm == 0.0 {
        0.0
    } else {
        (jac - jac.transpose()).norm() / norm
    }
}

/// Asymmetry of the ambient Jacobian of the field; near zero iff the field
/// is locally a gradient.
pub fn field_asymmetry(kind: ElementKind, variant: FieldVariant, p: &Configuration) -> Result<f64> {
    let jac = central_jacobian(p, JACOBIAN_STEP, |q| field(kind, variant, q))?;
    Ok(asymmetry_ratio(&jac))
}

/// Groups sorted values whose distance to the group's first member is within `tol`.
pub fn group_eigenvalues(sorted: &[f64], tol: f64) -> Vec<EigenGroup> {
    let mut groups: Vec<(f64, Vec<f64>)> = Vec::new();
    for &v in sorted {
        match groups.last_mut() {
            Some((first, members)) if (v - *first).abs() <= tol => members.push(v),
            _ => groups.push((v, vec![v])),
        }
    }
    groups
        .into_iter()
        .map(|(_, members)| EigenGroup {
            value: members.iter().sum::<f64>() / members.len() as f64,
            multiplicity: members.len(),
        })
        .collect()
}

/// Spectrum of the linearized quotient flow at `p` (expected on `N`).
pub fn hessian_spectrum(kind: ElementKind, variant: FieldVariant, p: &Configuration) -> Result<Spectrum> {
    check_size(kind, p)?;
    let jac = central_jacobian(p, JACOBIAN_STEP, |q| pushed_field(kind, variant, q))?;
    // the last vertex's rows vanish, so the spectrum is that of the leading
    // block plus three zeros
    let m = jac.nrows() - 3;
    let block = faer::Mat::<f64>::from_fn(m, m, |i, j| jac[(i, j)]);
    let eigen = block.eigenvalues().map_err(|_| Error::EigenSolver)?;
    let max_imaginary = eigen.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    let mut values: Vec<f64> = eigen.iter().map(|z| z.re).chain([0.0; 3]).collect();
    values.sort_by(f64::total_cmp);

    let zero_count = values.iter().filter(|v| v.abs() < ZERO_TOL).count();
    let nonzero: Vec<f64> = values.iter().copied().filter(|v| v.abs() >= ZERO_TOL).collect();
    Ok(Spectrum {
        eigenvalues: group_eigenvalues(&nonzero, GROUPING_TOL),
        zero_count,
        asymmetry: field_asymmetry(kind, variant, p)?,
        max_imaginary,
        values,
    })
}

/// `(positive, negative)` eigenvalue counts at a collinear tetrahedron.
pub fn collinear_signature(p: &Configuration) -> Result<(usize, usize)> {
    if p.len() != ElementKind::Tetrahedron.vertex_count() {
        return Err(Error::NotTetrahedron("collinear_signature"));
    }
    if !is_collinear(p, DEFAULT_COLLINEAR_TOL) {
        return Err(Error::NotCollinear);
    }
    let q = pi(p)?;
    let s = hessian_spectrum(ElementKind::Tetrahedron, FieldVariant::MeanVolumeGradient, &q)?;
    Ok((s.positive_count(), s.negative_count()))
}
