//! Element kinds, triangulation tables, mean volume and closed-form fields.
//!
//! Canonical vertex numbering (1-based):
//!
//! - tetrahedron: `1, 2, 3` positively oriented seen from `4`
//! - pyramid: base cycle `1, 2, 3, 4`, apex `5`
//! - prism: bottom triangle `1, 2, 3`, top `4, 5, 6`, vertex `i + 3` above `i`
//! - hexahedron: bottom face `1, 2, 3, 4`, top `5, 6, 7, 8`, vertex `i + 4` above `i`
//! - octahedron: poles `1` and `6`, equator cycle `2, 3, 4, 5`
//!
//! The mean-volume gradient field of every kind equals `6 * grad(mean_volume)`,
//! i.e. the triangulation average of the tetrahedron face-normal field.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{chain, tet_signed_volume, Configuration, TangentField, Vec3};
use crate::quotient::pi;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Tetrahedron,
    Pyramid,
    Prism,
    Hexahedron,
    Octahedron,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldVariant {
    MeanVolumeGradient,
    /// The simplified non-averaged fields for prisms and hexahedra.
    YVariant,
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for FieldVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldVariant::MeanVolumeGradient => "mean_volume_gradient",
            FieldVariant::YVariant => "y_variant",
        })
    }
}

impl std::str::FromStr for ElementKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ElementKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown element type `{s}`"))
    }
}

/// Tetrahedra of one triangulation, as 1-based positively oriented 4-tuples.
pub type Triangulation = &'static [[usize; 4]];

struct Term {
    coef: f64,
    chain: &'static [usize],
}

const fn t(coef: f64, chain: &'static [usize]) -> Term {
    Term { coef, chain }
}

type FieldTable = &'static [&'static [Term]];

static TET_FIELD: FieldTable = &[
    &[t(1.0, &[4, 3, 2])],
    &[t(1.0, &[4, 1, 3])],
    &[t(1.0, &[4, 2, 1])],
    &[t(1.0, &[1, 2, 3])],
];

static PYRAMID_FIELD: FieldTable = &[
    &[t(0.5, &[5, 4, 2]), t(0.5, &[5, 4, 3, 2])],
    &[t(0.5, &[5, 1, 3]), t(0.5, &[5, 1, 4, 3])],
    &[t(0.5, &[5, 2, 4]), t(0.5, &[5, 2, 1, 4])],
    &[t(0.5, &[5, 3, 1]), t(0.5, &[5, 3, 2, 1])],
    &[t(1.0, &[1, 2, 3, 4])],
];

static PRISM_FIELD: FieldTable = &[
    &[t(0.5, &[3, 2, 4]), t(0.5, &[2, 5, 4, 6, 3])],
    &[t(0.5, &[1, 3, 5]), t(0.5, &[3, 6, 5, 4, 1])],
    &[t(0.5, &[2, 1, 6]), t(0.5, &[1, 4, 6, 5, 2])],
    &[t(0.5, &[5, 6, 1]), t(0.5, &[6, 3, 1, 2, 5])],
    &[t(0.5, &[6, 4, 2]), t(0.5, &[4, 1, 2, 3, 6])],
    &[t(0.5, &[4, 5, 3]), t(0.5, &[5, 2, 3, 1, 4])],
];

static PRISM_Y_FIELD: FieldTable = &[
    &[t(1.0, &[3, 2, 5, 4, 6])],
    &[t(1.0, &[1, 3, 6, 5, 4])],
    &[t(1.0, &[2, 1, 4, 6, 5])],
    &[t(1.0, &[5, 6, 3, 1, 2])],
    &[t(1.0, &[6, 4, 1, 2, 3])],
    &[t(1.0, &[4, 5, 2, 3, 1])],
];

static HEXAHEDRON_FIELD: FieldTable = &[
    &[t(0.5, &[2, 5, 4]), t(0.5, &[6, 5, 8, 4, 3, 2])],
    &[t(0.5, &[3, 6, 1]), t(0.5, &[7, 6, 5, 1, 4, 3])],
    &[t(0.5, &[4, 7, 2]), t(0.5, &[8, 7, 6, 2, 1, 4])],
    &[t(0.5, &[1, 8, 3]), t(0.5, &[5, 8, 7, 3, 2, 1])],
    &[t(0.5, &[1, 6, 8]), t(0.5, &[6, 7, 8, 4, 1, 2])],
    &[t(0.5, &[2, 7, 5]), t(0.5, &[7, 8, 5, 1, 2, 3])],
    &[t(0.5, &[3, 8, 6]), t(0.5, &[8, 5, 6, 2, 3, 4])],
    &[t(0.5, &[4, 5, 7]), t(0.5, &[5, 6, 7, 3, 4, 1])],
];

static HEXAHEDRON_Y_FIELD: FieldTable = &[
    &[t(0.5, &[3, 6, 8]), t(0.5, &[2, 5, 4]), t(0.5, &[6, 5, 8, 4, 3, 2])],
    &[t(0.5, &[4, 7, 5]), t(0.5, &[3, 6, 1]), t(0.5, &[7, 6, 5, 1, 4, 3])],
    &[t(0.5, &[1, 8, 6]), t(0.5, &[4, 7, 2]), t(0.5, &[8, 7, 6, 2, 1, 4])],
    &[t(0.5, &[2, 5, 7]), t(0.5, &[1, 8, 3]), t(0.5, &[5, 8, 7, 3, 2, 1])],
    &[t(0.5, &[2, 7, 4]), t(0.5, &[1, 6, 8]), t(0.5, &[6, 7, 8, 4, 1, 2])],
    &[t(0.5, &[3, 8, 1]), t(0.5, &[2, 7, 5]), t(0.5, &[7, 8, 5, 1, 2, 3])],
    &[t(0.5, &[4, 5, 2]), t(0.5, &[3, 8, 6]), t(0.5, &[8, 5, 6, 2, 3, 4])],
    &[t(0.5, &[1, 6, 3]), t(0.5, &[4, 5, 7]), t(0.5, &[5, 6, 7, 3, 4, 1])],
];

// Link normals. Every octahedron triangulation gives the same field, so no
// averaging prefactor appears.
static OCTAHEDRON_FIELD: FieldTable = &[
    &[t(1.0, &[2, 3, 4, 5])],
    &[t(1.0, &[1, 5, 6, 3])],
    &[t(1.0, &[1, 2, 6, 4])],
    &[t(1.0, &[1, 3, 6, 5])],
    &[t(1.0, &[1, 4, 6, 2])],
    &[t(1.0, &[2, 5, 4, 3])],
];

static TET_TRIANGULATIONS: &[Triangulation] = &[&[[1, 2, 3, 4]]];

static PYRAMID_TRIANGULATIONS: &[Triangulation] =
    &[&[[1, 2, 3, 5], [1, 3, 4, 5]], &[[1, 2, 4, 5], [2, 3, 4, 5]]];

static PRISM_TRIANGULATIONS: &[Triangulation] = &[
    &[[1, 2, 3, 4], [2, 3, 4, 5], [3, 4, 5, 6]],
    &[[1, 2, 3, 4], [2, 3, 4, 6], [2, 4, 5, 6]],
    &[[1, 2, 3, 5], [1, 3, 4, 5], [3, 4, 5, 6]],
    &[[1, 2, 3, 5], [1, 3, 6, 5], [1, 4, 5, 6]],
    &[[1, 2, 3, 6], [1, 2, 6, 4], [2, 4, 5, 6]],
    &[[1, 2, 3, 6], [1, 2, 6, 5], [1, 4, 5, 6]],
];

// The two corner-cutting 5-tet triangulations, swapped by the cube's symmetries.
static HEXAHEDRON_TRIANGULATIONS: &[Triangulation] = &[
    &[[1, 2, 3, 6], [1, 3, 4, 8], [1, 3, 8, 6], [1, 5, 6, 8], [3, 6, 7, 8]],
    &[[1, 2, 4, 5], [2, 3, 4, 7], [2, 4, 5, 7], [2, 5, 6, 7], [4, 5, 7, 8]],
];

// One triangulation per inner diagonal: 2-4, 3-5, 1-6.
static OCTAHEDRON_TRIANGULATIONS: &[Triangulation] = &[
    &[[1, 2, 4, 3], [1, 2, 5, 4], [2, 3, 6, 4], [2, 4, 6, 5]],
    &[[1, 2, 5, 3], [1, 3, 5, 4], [2, 3, 6, 5], [3, 4, 6, 5]],
    &[[1, 2, 6, 3], [1, 2, 5, 6], [1, 3, 6, 4], [1, 4, 6, 5]],
];

const S3: f64 = 1.732_050_807_568_877_2;

impl ElementKind {
    pub const ALL: [ElementKind; 5] = [
        ElementKind::Tetrahedron,
        ElementKind::Pyramid,
        ElementKind::Prism,
        ElementKind::Hexahedron,
        ElementKind::Octahedron,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ElementKind::Tetrahedron => "tetrahedron",
            ElementKind::Pyramid => "pyramid",
            ElementKind::Prism => "prism",
            ElementKind::Hexahedron => "hexahedron",
            ElementKind::Octahedron => "octahedron",
        }
    }

    pub fn vertex_count(self) -> usize {
        match self {
            ElementKind::Tetrahedron => 4,
            ElementKind::Pyramid => 5,
            ElementKind::Prism | ElementKind::Octahedron => 6,
            ElementKind::Hexahedron => 8,
        }
    }

    pub fn supports(self, variant: FieldVariant) -> bool {
        match variant {
            FieldVariant::MeanVolumeGradient => true,
            FieldVariant::YVariant => {
                matches!(self, ElementKind::Prism | ElementKind::Hexahedron)
            }
        }
    }

    pub fn triangulations(self) -> &'static [Triangulation] {
        match self {
            ElementKind::Tetrahedron => TET_TRIANGULATIONS,
            ElementKind::Pyramid => PYRAMID_TRIANGULATIONS,
            ElementKind::Prism => PRISM_TRIANGULATIONS,
            ElementKind::Hexahedron => HEXAHEDRON_TRIANGULATIONS,
            ElementKind::Octahedron => OCTAHEDRON_TRIANGULATIONS,
        }
    }

    /// Canonical edge set, 1-based.
    pub fn edges(self) -> &'static [[usize; 2]] {
        match self {
            ElementKind::Tetrahedron => &[[1, 2], [1, 3], [1, 4], [2, 3], [2, 4], [3, 4]],
            ElementKind::Pyramid => &[
                [1, 2], [2, 3], [3, 4], [4, 1],
                [1, 5], [2, 5], [3, 5], [4, 5],
            ],
            ElementKind::Prism => &[
                [1, 2], [2, 3], [3, 1],
                [4, 5], [5, 6], [6, 4],
                [1, 4], [2, 5], [3, 6],
            ],
            ElementKind::Hexahedron => &[
                [1, 2], [2, 3], [3, 4], [4, 1],
                [5, 6], [6, 7], [7, 8], [8, 5],
                [1, 5], [2, 6], [3, 7], [4, 8],
            ],
            ElementKind::Octahedron => &[
                [1, 2], [1, 3], [1, 4], [1, 5],
                [6, 2], [6, 3], [6, 4], [6, 5],
                [2, 3], [3, 4], [4, 5], [5, 2],
            ],
        }
    }

    /// Quadrilateral faces, 1-based; the only faces that can fail to be planar.
    pub fn quad_faces(self) -> &'static [[usize; 4]] {
        match self {
            ElementKind::Tetrahedron | ElementKind::Octahedron => &[],
            ElementKind::Pyramid => &[[1, 2, 3, 4]],
            ElementKind::Prism => &[[1, 2, 5, 4], [2, 3, 6, 5], [3, 1, 4, 6]],
            ElementKind::Hexahedron => &[
                [1, 2, 3, 4],
                [5, 6, 7, 8],
                [1, 2, 6, 5],
                [2, 3, 7, 6],
                [3, 4, 8, 7],
                [4, 1, 5, 8],
            ],
        }
    }

    /// Positively oriented optimal shape for `variant`.
    ///
    /// Tetrahedron: regular with unit edges. Pyramid: 2x2 square base with the
    /// apex at height `sqrt(5)`. Prism: equilateral base of side 2 with height
    /// `2 sqrt(2/3)` for the mean-volume gradient and `sqrt(2)` for the
    /// Y-variant. Hexahedron: unit cube. Octahedron: regular, poles on the z-axis.
    pub fn reference_shape(self, variant: FieldVariant) -> Result<Configuration> {
        check_variant(self, variant)?;
        let rows: Vec<[f64; 3]> = match self {
            ElementKind::Tetrahedron => vec![
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [0.5, S3 / 2.0, 0.0],
                [0.5, S3 / 6.0, (2.0f64 / 3.0).sqrt()],
            ],
            ElementKind::Pyramid => vec![
                [0.0, 0.0, 0.0],
                [2.0, 0.0, 0.0],
                [2.0, 2.0, 0.0],
                [0.0, 2.0, 0.0],
                [1.0, 1.0, 5f64.sqrt()],
            ],
            ElementKind::Prism => {
                let h = match variant {
                    FieldVariant::MeanVolumeGradient => (8.0f64 / 3.0).sqrt(),
                    FieldVariant::YVariant => 2f64.sqrt(),
                };
                vec![
                    [0.0, 0.0, 0.0],
                    [2.0, 0.0, 0.0],
                    [1.0, S3, 0.0],
                    [0.0, 0.0, h],
                    [2.0, 0.0, h],
                    [1.0, S3, h],
                ]
            }
            ElementKind::Hexahedron => vec![
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [1.0, 1.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [1.0, 0.0, 1.0],
                [1.0, 1.0, 1.0],
                [0.0, 1.0, 1.0],
            ],
            ElementKind::Octahedron => vec![
                [0.0, 0.0, 1.0],
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [-1.0, 0.0, 0.0],
                [0.0, -1.0, 0.0],
                [0.0, 0.0, -1.0],
            ],
        };
        Configuration::from_rows(&rows)
    }

    /// [`reference_shape`](Self::reference_shape) reflected through `z = 0`.
    pub fn mirrored_reference_shape(self, variant: FieldVariant) -> Result<Configuration> {
        let mut p = self.reference_shape(variant)?;
        for v in p.points_mut() {
            v.z = -v.z;
        }
        Ok(p)
    }

    /// Maximum of the mean volume on the sphere, attained at `pi` of the
    /// reference shape. Normalizes element quality to 1 at the optimum.
    pub fn max_mean_volume_on_sphere(self) -> f64 {
        static TABLE: OnceLock<[f64; 5]> = OnceLock::new();
        let table = TABLE.get_or_init(|| {
            ElementKind::ALL.map(|k| {
                let p = k
                    .reference_shape(FieldVariant::MeanVolumeGradient)
                    .and_then(|r| pi(&r))
                    .expect("reference shapes are valid");
                mean_volume(k, &p).expect("sizes match")
            })
        });
        table[self as usize]
    }
}

pub fn check_variant(kind: ElementKind, variant: FieldVariant) -> Result<()> {
    if kind.supports(variant) {
        Ok(())
    } else {
        Err(Error::InvalidVariant { kind, variant })
    }
}

pub(crate) fn check_size(kind: ElementKind, p: &Configuration) -> Result<()> {
    if p.len() == kind.vertex_count() {
        Ok(())
    } else {
        Err(Error::SizeMismatch {
            kind,
            expected: kind.vertex_count(),
            found: p.len(),
        })
    }
}

fn table(kind: ElementKind, variant: FieldVariant) -> FieldTable {
    match (kind, variant) {
        (ElementKind::Tetrahedron, _) => TET_FIELD,
        (ElementKind::Pyramid, _) => PYRAMID_FIELD,
        (ElementKind::Prism, FieldVariant::MeanVolumeGradient) => PRISM_FIELD,
        (ElementKind::Prism, FieldVariant::YVariant) => PRISM_Y_FIELD,
        (ElementKind::Hexahedron, FieldVariant::MeanVolumeGradient) => HEXAHEDRON_FIELD,
        (ElementKind::Hexahedron, FieldVariant::YVariant) => HEXAHEDRON_Y_FIELD,
        (ElementKind::Octahedron, _) => OCTAHEDRON_FIELD,
    }
}

/// Summed tetrahedron volume of one triangulation.
pub fn triangulation_volume(triangulation: Triangulation, p: &Configuration) -> f64 {
    let pts = p.points();
    triangulation
        .iter()
        .map(|&[a, b, c, d]| tet_signed_volume(&pts[a - 1], &pts[b - 1], &pts[c - 1], &pts[d - 1]))
        .sum()
}

/// Average over the kind's triangulation set of the summed tet volumes.
pub fn mean_volume(kind: ElementKind, p: &Configuration) -> Result<f64> {
    check_size(kind, p)?;
    let tris = kind.triangulations();
    Ok(tris.iter().map(|t| triangulation_volume(t, p)).sum::<f64>() / tris.len() as f64)
}

/// Closed-form field of `kind` and `variant` at `p`.
pub fn field(kind: ElementKind, variant: FieldVariant, p: &Configuration) -> Result<TangentField> {
    check_variant(kind, variant)?;
    check_size(kind, p)?;
    let pts = p.points();
    let out = table(kind, variant)
        .iter()
        .map(|terms| {
            terms
                .iter()
                .fold(Vec3::zeros(), |acc, term| acc + chain(pts, term.chain) * term.coef)
        })
        .collect();
    Ok(Configuration::from_points_unchecked(out))
}

/// Face-normal field of a single tetrahedron.
pub fn tet_field(p1: &Vec3, p2: &Vec3, p3: &Vec3, p4: &Vec3) -> [Vec3; 4] {
    let pts = [*p1, *p2, *p3, *p4];
    [
        chain(&pts, &[4, 3, 2]),
        chain(&pts, &[4, 1, 3]),
        chain(&pts, &[4, 2, 1]),
        chain(&pts, &[1, 2, 3]),
    ]
}

/// Triangulation average of scattered tetrahedron fields.
pub fn field_from_triangulations(kind: ElementKind, p: &Configuration) -> Result<TangentField> {
    check_size(kind, p)?;
    let tris = kind.triangulations();
    let pts = p.points();
    let mut out = vec![Vec3::zeros(); p.len()];
    for tri in tris {
        for &[a, b, c, d] in tri.iter() {
            let f = tet_field(&pts[a - 1], &pts[b - 1], &pts[c - 1], &pts[d - 1]);
            for (slot, v) in [a, b, c, d].into_iter().zip(f) {
                out[slot - 1] += v;
            }
        }
    }
    let scale = 1.0 / tris.len() as f64;
    Ok(Configuration::from_points_unchecked(
        out.into_iter().map(|v| v * scale).collect(),
    ))
}

/// `f^X(p) = X_p . p`.
pub fn f_value(kind: ElementKind, variant: FieldVariant, p: &Configuration) -> Result<f64> {
    Ok(field(kind, variant, p)?.dot(p))
}
