//! Shared-vertex polyhedral meshes, quality and smoothing.
//!
//! Smoothing is the averaged global step: every element contributes its own
//! mean-volume gradient field (optionally `Psi`-normalized), each vertex
//! receives the mean of the contributions of the elements containing it, and
//! free vertices move by `step` times that mean. Meshes stay in ambient space;
//! there is no projection of the whole node vector onto the sphere.

use std::collections::BTreeSet;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::elements::{field, mean_volume, ElementKind, FieldVariant};
use crate::error::{Error, Result};
use crate::flow::{fmt17, FlowSettings, FlowStatus, Normalization};
use crate::geometry::{Configuration, Vec3};
use crate::parallel::map_indexed;
use crate::quotient::{pi, psi};

/// Iterations over which the minimum quality must improve by `quality_tol`.
pub const STAGNATION_WINDOW: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Element {
    #[serde(rename = "type")]
    pub kind: ElementKind,
    /// 0-based vertex indices in the kind's canonical order.
    pub nodes: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct MeshFile {
    vertices: Vec<[f64; 3]>,
    elements: Vec<Element>,
    #[serde(default)]
    fixed: BTreeSet<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    vertices: Vec<Vec3>,
    elements: Vec<Element>,
    fixed: BTreeSet<usize>,
}

impl Mesh {
    pub fn new(vertices: Vec<Vec3>, elements: Vec<Element>, fixed: BTreeSet<usize>) -> Result<Self> {
        let mesh = Self {
            vertices,
            elements,
            fixed,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.vertices.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
        }
        for (i, e) in self.elements.iter().enumerate() {
            if e.nodes.len() != e.kind.vertex_count() {
                return Err(Error::InvalidMesh(format!(
                    "element {i}: {} needs {} nodes, got {}",
                    e.kind,
                    e.kind.vertex_count(),
                    e.nodes.len()
                )));
            }
            if let Some(&bad) = e.nodes.iter().find(|&&k| k >= n) {
                return Err(Error::InvalidMesh(format!(
                    "element {i}: node {bad} out of range for {n} vertices"
                )));
            }
            let distinct: BTreeSet<_> = e.nodes.iter().collect();
            if distinct.len() != e.nodes.len() {
                return Err(Error::InvalidMesh(format!("element {i}: repeated node")));
            }
        }
        if let Some(&bad) = self.fixed.iter().find(|&&k| k >= n) {
            return Err(Error::InvalidMesh(format!(
                "fixed vertex {bad} out of range for {n} vertices"
            )));
        }
        Ok(())
    }

    /// A single element over its own vertices, numbered `0..n`.
    pub fn single(kind: ElementKind, p: &Configuration) -> Result<Self> {
        let element = Element {
            kind,
            nodes: (0..p.len()).collect(),
        };
        Self::new(p.points().to_vec(), vec![element], BTreeSet::new())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MeshFile = serde_json::from_str(text)?;
        Self::new(
            file.vertices.iter().map(|v| Vec3::new(v[0], v[1], v[2])).collect(),
            file.elements,
            file.fixed,
        )
    }

    pub fn to_json(&self) -> String {
        let file = MeshFile {
            vertices: self.vertices.iter().map(|v| [v.x, v.y, v.z]).collect(),
            elements: self.elements.clone(),
            fixed: self.fixed.clone(),
        };
        serde_json::to_string_pretty(&file).expect("mesh serialization cannot fail")
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn fixed(&self) -> &BTreeSet<usize> {
        &self.fixed
    }

    /// Same topology, new positions.
    pub fn with_vertices(&self, vertices: Vec<Vec3>) -> Result<Self> {
        if vertices.len() != self.vertices.len() {
            return Err(Error::InvalidMesh(format!(
                "expected {} vertices, got {}",
                self.vertices.len(),
                vertices.len()
            )));
        }
        Self::new(vertices, self.elements.clone(), self.fixed.clone())
    }

    pub fn with_fixed(&self, fixed: BTreeSet<usize>) -> Result<Self> {
        Self::new(self.vertices.clone(), self.elements.clone(), fixed)
    }

    pub fn element_configuration(&self, index: usize) -> Configuration {
        let e = &self.elements[index];
        Configuration::from_points_unchecked(e.nodes.iter().map(|&k| self.vertices[k]).collect())
    }

    /// All vertices as one configuration.
    pub fn configuration(&self) -> Configuration {
        Configuration::from_points_unchecked(self.vertices.clone())
    }

    pub fn is_finite(&self) -> bool {
        self.vertices.iter().all(|v| v.iter().all(|c| c.is_finite()))
    }
}

/// Sum of the element mean volumes.
pub fn mesh_mean_volume(m: &Mesh) -> f64 {
    (0..m.elements.len())
        .map(|i| mean_volume(m.elements[i].kind, &m.element_configuration(i)).expect("validated"))
        .sum()
}

/// Mesh mean volume after projecting the full node vector onto the sphere.
pub fn mesh_mean_volume_on_sphere(m: &Mesh) -> Result<f64> {
    let projected = pi(&m.configuration())?;
    Ok(mesh_mean_volume(&m.with_vertices(projected.into_points())?))
}

/// Averaged per-vertex shift, before the step size is applied.
pub fn averaged_shift(m: &Mesh, normalization: Normalization) -> Vec<Vec3> {
    let fields = map_indexed(m.elements.len(), |i| {
        let x = field(
            m.elements[i].kind,
            FieldVariant::MeanVolumeGradient,
            &m.element_configuration(i),
        )
        .expect("validated");
        match normalization {
            Normalization::Psi => psi(&x),
            Normalization::None => x,
        }
    });
    let mut shift = vec![Vec3::zeros(); m.vertices.len()];
    let mut count = vec![0usize; m.vertices.len()];
    for (e, x) in m.elements.iter().zip(&fields) {
        for (&k, v) in e.nodes.iter().zip(x.points()) {
            shift[k] += v;
            count[k] += 1;
        }
    }
    for (s, &c) in shift.iter_mut().zip(&count) {
        if c > 0 {
            *s /= c as f64;
        }
    }
    shift
}

/// One averaged step; fixed vertices are copied unchanged.
pub fn smooth_step(m: &Mesh, settings: &FlowSettings) -> Mesh {
    let shift = averaged_shift(m, settings.normalization);
    let vertices = m
        .vertices
        .iter()
        .zip(&shift)
        .enumerate()
        .map(|(k, (v, s))| if m.fixed.contains(&k) { *v } else { v + s * settings.step })
        .collect();
    Mesh {
        vertices,
        elements: m.elements.clone(),
        fixed: m.fixed.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    /// Per-element `q`, 1 at the optimal shape, `<= 0` when degenerate or inverted.
    pub qualities: Vec<f64>,
    pub mesh_mean_volume: f64,
    pub min_q: f64,
    pub mean_q: f64,
    pub max_q: f64,
    pub inverted_count: usize,
}

/// `q` of one element; a configuration with all points coincident gets 0.
pub fn element_quality(kind: ElementKind, p: &Configuration) -> f64 {
    match pi(p) {
        Ok(q) => mean_volume(kind, &q).expect("size checked by caller") / kind.max_mean_volume_on_sphere(),
        Err(_) => 0.0,
    }
}

pub fn quality_report(m: &Mesh) -> QualityReport {
    let qualities: Vec<f64> = (0..m.elements.len())
        .map(|i| element_quality(m.elements[i].kind, &m.element_configuration(i)))
        .collect();
    let (min_q, max_q, mean_q) = if qualities.is_empty() {
        (0.0, 0.0, 0.0)
    } else {
        (
            qualities.iter().copied().fold(f64::INFINITY, f64::min),
            qualities.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            qualities.iter().sum::<f64>() / qualities.len() as f64,
        )
    };
    QualityReport {
        inverted_count: qualities.iter().filter(|&&q| q <= 0.0).count(),
        qualities,
        mesh_mean_volume: mesh_mean_volume(m),
        min_q,
        mean_q,
        max_q,
    }
}

/// One row per element: `index,type,q`.
pub fn write_quality_csv<W: Write>(m: &Mesh, report: &QualityReport, mut out: W) -> std::io::Result<()> {
    writeln!(out, "index,type,q")?;
    for (i, (e, q)) in m.elements.iter().zip(&report.qualities).enumerate() {
        writeln!(out, "{i},{},{}", e.kind, fmt17(*q))?;
    }
    Ok(())
}

/// One row per iteration: `iter,mesh_mean_volume,min_q,mean_q,inverted_count`.
pub fn write_history_csv<W: Write>(history: &[QualityReport], mut out: W) -> std::io::Result<()> {
    writeln!(out, "iter,mesh_mean_volume,min_q,mean_q,inverted_count")?;
    for (i, r) in history.iter().enumerate() {
        writeln!(
            out,
            "{i},{},{},{},{}",
            fmt17(r.mesh_mean_volume),
            fmt17(r.min_q),
            fmt17(r.mean_q),
            r.inverted_count
        )?;
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct SmoothOutcome {
    pub mesh: Mesh,
    /// Report before the first step, then one per step.
    pub history: Vec<QualityReport>,
    pub status: FlowStatus,
    pub warnings: Vec<String>,
}

impl SmoothOutcome {
    pub fn iterations(&self) -> usize {
        self.history.len() - 1
    }
}

/// Repeats [`smooth_step`] until the minimum quality gains less than
/// `quality_tol` over [`STAGNATION_WINDOW`] steps, or `max_iters` is reached.
pub fn smooth(m: &Mesh, settings: &FlowSettings, max_iters: usize, quality_tol: f64) -> Result<SmoothOutcome> {
    let mut history = vec![quality_report(m)];
    if m.fixed.len() >= m.vertices.len() {
        return Ok(SmoothOutcome {
            mesh: m.clone(),
            history,
            status: FlowStatus::Converged,
            warnings: vec!["every vertex is fixed; mesh left unchanged".into()],
        });
    }
    let mut mesh = m.clone();
    for iteration in 1..=max_iters {
        mesh = smooth_step(&mesh, settings);
        if !mesh.is_finite() {
            return Err(Error::Divergence { iteration });
        }
        history.push(quality_report(&mesh));
        if iteration >= STAGNATION_WINDOW
            && history[iteration].min_q - history[iteration - STAGNATION_WINDOW].min_q < quality_tol
        {
            return Ok(SmoothOutcome {
                mesh,
                history,
                status: FlowStatus::Converged,
                warnings: Vec::new(),
            });
        }
    }
    Ok(SmoothOutcome {
        mesh,
        history,
        status: FlowStatus::MaxIterations,
        warnings: Vec::new(),
    })
}
