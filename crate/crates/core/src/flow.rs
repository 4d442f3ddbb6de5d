//! Singularities of the quotient fields and the discretized flow on `N`.
//!
//! A configuration `p` on `N` is a zero of the pushed-forward field exactly
//! when `tau(X_p) = lambda p` for some scalar `lambda`. Nonzero `lambda` marks
//! an optimal shape whose orientation is the sign of `lambda`; `lambda = 0`
//! marks a level-0 singularity.
//!
//! `f` is not monotone along the pushed flow: `tau` subtracts the last
//! vertex's component of the gradient, so `D(pi)(X)` is not the gradient of
//! `f` restricted to `N`, and `<grad f, D(pi)(X)>` can be negative away from
//! the singularities. The integrator therefore halves the step only on
//! overshoot, i.e. when `f` drops although the first-order change predicts
//! an increase.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::elements::{check_size, f_value, field, ElementKind, FieldVariant};
use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::quotient::{is_collinear, pi, psi, push_tangent, tau, DEFAULT_COLLINEAR_TOL};
use crate::spectral::hessian_spectrum;

/// `|lambda|` below this on a singular configuration means level 0.
pub const LEVEL0_LAMBDA_TOL: f64 = 1e-8;

/// Relative round-off band below which an f decrease is not treated as one.
const MONOTONE_SLACK: f64 = 1e-14;

const MAX_HALVINGS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Psi,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowSettings {
    pub step: f64,
    pub max_iters: usize,
    /// Residual threshold for convergence.
    pub tol: f64,
    pub normalization: Normalization,
}

impl Default for FlowSettings {
    fn default() -> Self {
        Self {
            step: 0.05,
            max_iters: 100_000,
            tol: 1e-10,
            normalization: Normalization::Psi,
        }
    }
}

impl FlowSettings {
    /// Warns when `step` times the stiffest linearization mode at the
    /// reference optimum reaches the explicit-Euler stability limit of 2.
    pub fn stability_warning(&self, kind: ElementKind, variant: FieldVariant) -> Option<String> {
        let reference = kind.reference_shape(variant).and_then(|r| pi(&r)).ok()?;
        let spectrum = hessian_spectrum(kind, variant, &reference).ok()?;
        let stiffest = spectrum.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let bound = match self.normalization {
            Normalization::None => stiffest,
            Normalization::Psi => {
                let x = field(kind, variant, &reference).ok()?;
                stiffest / x.norm().sqrt()
            }
        };
        (self.step * bound >= 2.0).then(|| {
            format!(
                "step {} times spectral bound {:.4} is {:.3} >= 2; the explicit update may oscillate",
                self.step,
                bound,
                self.step * bound
            )
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub residual: f64,
    pub lambda: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityKind {
    OptimalPositive,
    OptimalNegative,
    Level0Singular,
    Nonsingular,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityClass {
    #[serde(rename = "class")]
    pub kind: SingularityKind,
    pub lambda: f64,
    pub residual: f64,
}

/// `lambda = <tau(X_p), p>` and `|tau(X_p) - lambda p|` for `p` on `N`.
pub fn singularity_residual(
    kind: ElementKind,
    variant: FieldVariant,
    p: &Configuration,
) -> Result<Residual> {
    let x = tau(&field(kind, variant, p)?);
    let lambda = x.dot(p);
    let residual = x.add_scaled(-lambda, p).norm();
    Ok(Residual { residual, lambda })
}

/// Classifies `pi(p)`; `p` may be any representative of its class.
pub fn classify(
    kind: ElementKind,
    variant: FieldVariant,
    p: &Configuration,
    tol: f64,
) -> Result<SingularityClass> {
    check_size(kind, p)?;
    let q = pi(p)?;
    let Residual { residual, lambda } = singularity_residual(kind, variant, &q)?;
    let singular = residual < tol;
    let class = if !singular {
        SingularityKind::Nonsingular
    } else if lambda.abs() < LEVEL0_LAMBDA_TOL || is_collinear(&q, DEFAULT_COLLINEAR_TOL) {
        SingularityKind::Level0Singular
    } else if lambda > 0.0 {
        SingularityKind::OptimalPositive
    } else {
        SingularityKind::OptimalNegative
    };
    Ok(SingularityClass {
        kind: class,
        lambda,
        residual,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub iteration: usize,
    pub p: Configuration,
    pub f: f64,
    pub residual: f64,
    pub lambda: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStatus {
    Converged,
    MaxIterations,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub rows: Vec<TrajectoryRow>,
    pub status: FlowStatus,
    /// Number of step halvings triggered by overshoot.
    pub halvings: usize,
    /// Accepted steps along which the first-order change of `f` was negative.
    pub descent_steps: usize,
    /// Step size of the last accepted step.
    pub final_step: f64,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectoryRow {
        self.rows.last().expect("a trajectory has at least its start row")
    }

    pub fn iterations(&self) -> usize {
        self.last().iteration
    }

    /// CSV with header `iteration,f,residual,lambda,edge_spread`.
    pub fn write_csv<W: Write>(&self, kind: ElementKind, mut out: W) -> std::io::Result<()> {
        writeln!(out, "iteration,f,residual,lambda,edge_spread")?;
        for row in &self.rows {
            let spread = shape_metrics(kind, &row.p).map(|m| m.edge_spread).unwrap_or(f64::NAN);
            writeln!(
                out,
                "{},{},{},{},{}",
                row.iteration,
                fmt17(row.f),
                fmt17(row.residual),
                fmt17(row.lambda),
                fmt17(spread)
            )?;
        }
        Ok(())
    }
}

/// 17 significant digits, locale independent.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn direction(
    kind: ElementKind,
    variant: FieldVariant,
    p: &Configuration,
    normalization: Normalization,
) -> Result<Configuration> {
    let x = field(kind, variant, p)?;
    let x = match normalization {
        Normalization::Psi => psi(&x),
        Normalization::None => x,
    };
    push_tangent(p, &x)
}

/// Explicit Euler on `N`: `p <- pi(p + step * D(pi)(X or Psi(X)))`.
///
/// An overshooting step is retried with half the step size; every iteration
/// starts again from `settings.step`.
pub fn integrate(
    kind: ElementKind,
    variant: FieldVariant,
    p0: &Configuration,
    settings: &FlowSettings,
) -> Result<Trajectory> {
    check_size(kind, p0)?;
    let mut p = pi(p0)?;
    let mut step = settings.step;
    let mut halvings = 0;
    let mut descent_steps = 0;
    let mut rows = Vec::new();

    let mut f = f_value(kind, variant, &p)?;
    for iteration in 0..=settings.max_iters {
        let Residual { residual, lambda } = singularity_residual(kind, variant, &p)?;
        if !(f.is_finite() && residual.is_finite()) {
            return Err(Error::Divergence { iteration });
        }
        rows.push(TrajectoryRow {
            iteration,
            p: p.clone(),
            f,
            residual,
            lambda,
        });
        if residual < settings.tol {
            return Ok(Trajectory {
                rows,
                status: FlowStatus::Converged,
                halvings,
                descent_steps,
                final_step: step,
            });
        }
        if iteration == settings.max_iters {
            break;
        }

        let v = direction(kind, variant, &p, settings.normalization)?;
        // grad f = 3 X for gradient fields
        let ascending = field(kind, variant, &p)?.dot(&v) >= 0.0;
        if !ascending {
            descent_steps += 1;
        }
        let mut attempts = 0;
        step = settings.step;
        loop {
            let candidate = p.add_scaled(step, &v);
            if !candidate.is_finite() {
                return Err(Error::Divergence { iteration });
            }
            let next = pi(&candidate).map_err(|_| Error::Divergence { iteration })?;
            let f_next = f_value(kind, variant, &next)?;
            if !f_next.is_finite() {
                return Err(Error::Divergence { iteration });
            }
            if !ascending || f_next >= f - MONOTONE_SLACK * f.abs().max(1.0) {
                p = next;
                f = f_next;
                break;
            }
            attempts += 1;
            halvings += 1;
            step *= 0.5;
            if attempts > MAX_HALVINGS {
                return Err(Error::Divergence { iteration });
            }
        }
    }
    Ok(Trajectory {
        rows,
        status: FlowStatus::MaxIterations,
        halvings,
        descent_steps,
        final_step: step,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeMetrics {
    pub edge_length_min: f64,
    pub edge_length_max: f64,
    /// `(max - min) / max` over the canonical edges.
    pub edge_spread: f64,
    /// Largest distance of a quad's fourth vertex from the plane of the other
    /// three, relative to the longest edge.
    pub face_planarity_max_deviation: f64,
    /// Sign of the mean volume: -1, 0 or 1.
    pub orientation_sign: i8,
}

pub fn shape_metrics(kind: ElementKind, p: &Configuration) -> Result<ShapeMetrics> {
    check_size(kind, p)?;
    let pts = p.points();
    let lengths: Vec<f64> = kind
        .edges()
        .iter()
        .map(|&[a, b]| (pts[a - 1] - pts[b - 1]).norm())
        .collect();
    let min = lengths.iter().copied().fold(f64::INFINITY, f64::min);
    let max = lengths.iter().copied().fold(0.0, f64::max);
    let spread = if max > 0.0 { (max - min) / max } else { 0.0 };

    let planarity = kind
        .quad_faces()
        .iter()
        .map(|&[a, b, c, d]| {
            let (a, b, c, d) = (pts[a - 1], pts[b - 1], pts[c - 1], pts[d - 1]);
            let normal = (b - a).cross(&(c - a));
            let n = normal.norm();
            if n == 0.0 || max == 0.0 {
                0.0
            } else {
                (d - a).dot(&normal).abs() / n / max
            }
        })
        .fold(0.0, f64::max);

    let volume = crate::elements::mean_volume(kind, p)?;
    let orientation_sign = if volume > 0.0 {
        1
    } else if volume < 0.0 {
        -1
    } else {
        0
    };
    Ok(ShapeMetrics {
        edge_length_min: min,
        edge_length_max: max,
        edge_spread: spread,
        face_planarity_max_deviation: planarity,
        orientation_sign,
    })
}
