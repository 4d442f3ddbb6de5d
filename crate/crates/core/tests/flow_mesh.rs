use std::collections::BTreeSet;

use polyflow::elements::{f_value, field};
use polyflow::flow::{classify, integrate, FlowStatus};
use polyflow::mesh::{mesh_mean_volume, smooth, smooth_step, Element};
use polyflow::quotient::{pi, push_tangent};
use polyflow::sampling::{random_configuration, UniformSampler};
use polyflow::{Configuration, ElementKind, FieldVariant, FlowSettings, Mesh, Normalization, SingularityKind, Vec3};

const GRAD: FieldVariant = FieldVariant::MeanVolumeGradient;

fn positive_seeds(kind: ElementKind, count: usize) -> Vec<Configuration> {
    (0u64..)
        .map(|seed| random_configuration(kind, GRAD, seed).unwrap())
        .filter(|p| f_value(kind, GRAD, &pi(p).unwrap()).unwrap() > 0.0)
        .take(count)
        .collect()
}

fn distances(p: &Configuration) -> Vec<f64> {
    let pts = p.points();
    let mut d = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d.push((pts[i] - pts[j]).norm());
        }
    }
    d
}

#[test]
fn ascending_steps_never_lose_mean_volume() {
    for kind in ElementKind::ALL {
        for p0 in positive_seeds(kind, 5) {
            let settings = FlowSettings {
                max_iters: 400,
                ..FlowSettings::default()
            };
            let t = integrate(kind, GRAD, &p0, &settings).unwrap();
            for pair in t.rows.windows(2) {
                let x = field(kind, GRAD, &pair[0].p).unwrap();
                if x.dot(&push_tangent(&pair[0].p, &x).unwrap()) >= 0.0 {
                    assert!(pair[1].f >= pair[0].f - 1e-13, "{kind} at {}", pair[0].iteration);
                }
            }
        }
    }
}

#[test]
fn positive_trajectories_stay_positive() {
    for kind in ElementKind::ALL {
        for p0 in positive_seeds(kind, 5) {
            let t = integrate(kind, GRAD, &p0, &FlowSettings::default()).unwrap();
            assert!(t.rows.iter().all(|r| r.f > 0.0), "{kind}");
        }
    }
}

#[test]
fn trajectory_ignores_translation_and_scale_of_start() {
    let c = Vec3::new(0.7, -2.0, 5.5);
    for kind in ElementKind::ALL {
        let p0 = random_configuration(kind, GRAD, 3).unwrap();
        let moved = p0.scaled(3.0).translated(&c);
        let settings = FlowSettings {
            max_iters: 50,
            ..FlowSettings::default()
        };
        let a = integrate(kind, GRAD, &p0, &settings).unwrap();
        let b = integrate(kind, GRAD, &moved, &settings).unwrap();
        assert_eq!(a.rows.len(), b.rows.len());
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert!(x.p.max_abs_diff(&y.p) < 1e-12, "{kind} at {}", x.iteration);
        }
    }
}

#[test]
fn normalizations_reach_congruent_tetrahedra() {
    for p0 in positive_seeds(ElementKind::Tetrahedron, 5) {
        let run = |normalization| {
            let settings = FlowSettings {
                normalization,
                ..FlowSettings::default()
            };
            integrate(ElementKind::Tetrahedron, GRAD, &p0, &settings).unwrap()
        };
        let a = run(Normalization::Psi);
        let b = run(Normalization::None);
        assert_eq!(a.status, FlowStatus::Converged);
        assert_eq!(b.status, FlowStatus::Converged);
        let (da, db) = (distances(&a.last().p), distances(&b.last().p));
        for (x, y) in da.iter().zip(&db) {
            assert!((x - y).abs() < 1e-6);
        }
    }
}

fn cube_mesh(sampler: &mut UniformSampler, amplitude: f64) -> Mesh {
    let rows = ElementKind::Hexahedron.reference_shape(GRAD).unwrap();
    let vertices = rows.points().iter().map(|v| v + sampler.cube_point() * amplitude).collect();
    let element = Element {
        kind: ElementKind::Hexahedron,
        nodes: (0..8).collect(),
    };
    Mesh::new(vertices, vec![element], BTreeSet::new()).unwrap()
}

#[test]
fn perturbed_cube_smooths_to_high_quality() {
    let mut sampler = UniformSampler::new(11);
    let settings = FlowSettings {
        step: 0.05,
        ..FlowSettings::default()
    };
    for _ in 0..3 {
        let m = cube_mesh(&mut sampler, 0.1);
        let out = smooth(&m, &settings, 10_000, 0.0).unwrap();
        assert!(out.history.last().unwrap().min_q >= 0.99, "{}", out.history.last().unwrap().min_q);
    }
}

#[test]
fn mesh_mean_volume_adds_over_disjoint_parts() {
    let mut sampler = UniformSampler::new(5);
    let a = cube_mesh(&mut sampler, 0.2);
    let b = cube_mesh(&mut sampler, 0.2);
    let offset = Vec3::new(4.0, 0.0, 0.0);
    let vertices = a.vertices().iter().copied().chain(b.vertices().iter().map(|v| v + offset)).collect();
    let elements = vec![
        a.elements()[0].clone(),
        Element {
            kind: ElementKind::Hexahedron,
            nodes: (8..16).collect(),
        },
    ];
    let union = Mesh::new(vertices, elements, BTreeSet::new()).unwrap();
    assert!((mesh_mean_volume(&union) - mesh_mean_volume(&a) - mesh_mean_volume(&b)).abs() < 1e-12);

    // the parts share no vertex, so one step moves each as if alone
    let settings = FlowSettings::default();
    let stepped = smooth_step(&union, &settings);
    let (sa, sb) = (smooth_step(&a, &settings), smooth_step(&b, &settings));
    for (k, v) in stepped.vertices().iter().enumerate() {
        let expected = if k < 8 { sa.vertices()[k] } else { sb.vertices()[k - 8] + offset };
        assert!((v - expected).norm() < 1e-12);
    }
}

#[test]
fn fixed_vertices_are_bitwise_unchanged() {
    let mut sampler = UniformSampler::new(9);
    let m = cube_mesh(&mut sampler, 0.15).with_fixed(BTreeSet::from([0, 3, 6])).unwrap();
    let out = smooth(&m, &FlowSettings::default(), 200, 0.0).unwrap();
    for k in [0, 3, 6] {
        for c in 0..3 {
            assert_eq!(out.mesh.vertices()[k][c].to_bits(), m.vertices()[k][c].to_bits());
        }
    }
    assert!(out.mesh.vertices()[1] != m.vertices()[1]);
}

#[test]
fn smoothed_single_element_agrees_with_quotient_flow() {
    for kind in [ElementKind::Tetrahedron, ElementKind::Octahedron] {
        let p0 = positive_seeds(kind, 1).remove(0);
        let m = Mesh::single(kind, &p0).unwrap();
        let settings = FlowSettings {
            step: 0.01,
            ..FlowSettings::default()
        };
        // a negative tolerance never stagnates
        let out = smooth(&m, &settings, 20_000, -1.0).unwrap();
        let c = classify(kind, GRAD, &out.mesh.configuration(), 1e-6).unwrap();
        let t = integrate(kind, GRAD, &p0, &FlowSettings::default()).unwrap();
        let d = classify(kind, GRAD, &t.last().p, 1e-6).unwrap();
        assert_eq!(c.kind, SingularityKind::OptimalPositive, "{kind}: {c:?}");
        assert_eq!(c.kind, d.kind);
        assert!((c.lambda - d.lambda).abs() < 1e-6);
    }
}
