use nalgebra::Point3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use soapfilm::analytics::{skew_faceted_area, steiner_section_length};
use soapfilm::flow::{
    flow_step, mesh_area, minimize, nw_distance, section_length, triple_edge_angles, FlowError,
    FlowParams,
};
use soapfilm::geometry::{
    build_competitor_mesh, build_cone_mesh, build_cylinder_mesh, build_skew_mesh, make_config,
};
use soapfilm::mesh::{Constraint, FilmMesh, Segment};

const TAU: f64 = 0.267_949_192_431_122_7;

/// Catenoid through two unit rings at distance `sep`, by bisection on the
/// neck radius and Simpson quadrature of the area of revolution.
fn catenoid_area(sep: f64) -> f64 {
    let d = 0.5 * sep;
    let f = |c: f64| c * (d / c).cosh() - 1.0;
    let (mut lo, mut hi) = (0.7, 1.0);
    assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    let g = |z: f64| 2.0 * std::f64::consts::PI * c * (z / c).cosh().powi(2);
    let n = 2000;
    let dz = sep / n as f64;
    let mut sum = g(-d) + g(d);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * g(-d + k as f64 * dz);
    }
    sum * dz / 3.0
}

#[test]
fn catenoid_oracle_value() {
    let a = catenoid_area(0.8);
    // closed form pi c (sep + c sinh(sep / c)) with c = 0.910738
    let c: f64 = 0.910_737_994_273_782_5;
    let closed = std::f64::consts::PI * c * (0.8 + c * (0.8 / c).sinh());
    assert!((a - closed).abs() < 1e-9, "{a} vs {closed}");
}

#[test]
fn catenoid_flow_matches_oracle() {
    let mut m = build_cylinder_mesh(1.0, 0.8, 32, 8);
    let report = minimize(&mut m, &FlowParams::default(), None).unwrap();
    let want = catenoid_area(0.8);
    assert!(report.converged);
    assert!((report.final_area - want).abs() < 0.01 * want, "{} vs {want}", report.final_area);
}

#[test]
fn long_cylinder_pinches_off() {
    let mut m = build_cylinder_mesh(1.0, 2.0, 32, 16);
    let r = minimize(&mut m, &FlowParams::default(), None);
    assert!(matches!(r, Err(FlowError::TopologyChange { .. })), "{r:?}");
}

#[test]
fn skew_film_area_in_bracket() {
    let h = 3.5;
    let cfg = make_config(h, TAU / 100.0, None).unwrap();
    let mut m = build_skew_mesh(&cfg, 0.1).unwrap();
    let start = skew_faceted_area(h);
    assert!((mesh_area(&m).unwrap() - start).abs() < 1e-9);

    let mut first = m.clone();
    let info = flow_step(&mut first, &FlowParams::default()).unwrap();
    assert!(info.area_after < info.area_before);

    let report = minimize(&mut m, &FlowParams::default(), None).unwrap();
    assert!(report.final_area >= 7.0 && report.final_area < start, "{}", report.final_area);
    let tol = 1e-12 * report.initial_area;
    assert!(report.area_history.windows(2).all(|w| w[1] <= w[0] + tol));
    for (v, c) in m.constraints.iter().enumerate() {
        if let Constraint::OnSegment(k) = c {
            assert!(m.segments[*k].distance(&m.vertices[v]) < 1e-12 * h);
        }
    }
}

fn planar_hexagon() -> FilmMesh {
    let mut m = FilmMesh::new(Vec::new());
    let c = m.push_vertex(Point3::new(0.2, -0.1, 0.56), Constraint::Free);
    let ring: Vec<usize> = (0..6)
        .map(|k| {
            let a = k as f64 * std::f64::consts::FRAC_PI_3;
            m.push_vertex(Point3::new(a.cos(), 0.5 * a.sin(), 0.5 + 0.3 * a.cos()), Constraint::Pinned)
        })
        .collect();
    for k in 0..6 {
        m.push_triangle([c, ring[k], ring[(k + 1) % 6]], None);
    }
    m.refine(0.15);
    m
}

#[test]
fn planar_film_is_a_fixed_point() {
    let mut m = planar_hexagon();
    let before = m.clone();
    let a0 = mesh_area(&m).unwrap();
    let params = FlowParams {
        smoothing: 0.0,
        ..FlowParams::default()
    };
    for _ in 0..20 {
        flow_step(&mut m, &params).unwrap();
    }
    let drift = m
        .vertices
        .iter()
        .zip(&before.vertices)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    // every vertex stays in the plane of the boundary
    let n = (before.vertices[2] - before.vertices[1]).cross(&(before.vertices[3] - before.vertices[1]));
    let off = m
        .vertices
        .iter()
        .map(|p| (p - before.vertices[1]).dot(&n).abs() / n.norm())
        .fold(0.0, f64::max);
    assert!(off < 1e-12, "{off}");
    assert!(drift < 1e-12, "{drift}");
    assert!((mesh_area(&m).unwrap() - a0).abs() < 1e-12);
}

#[test]
fn refinement_keeps_mesh_valid() {
    let cfg = make_config(2.5, 0.05, Some(TAU)).unwrap();
    let mut m = build_competitor_mesh(&cfg, 0.3).unwrap();
    let a = mesh_area(&m).unwrap();
    m.refine(0.1);
    m.validate(2.5).unwrap();
    assert!((mesh_area(&m).unwrap() - a).abs() < 1e-9);
    assert!(m.longest_edge() <= 0.1);
}

#[test]
fn faceted_competitor_sections() {
    let h = 3.0;
    let s = 0.02;
    let cfg = make_config(h, s, Some(TAU)).unwrap();
    let m = build_competitor_mesh(&cfg, 0.2).unwrap();
    for k in 1..10 {
        let t = s + (TAU - s) * k as f64 / 10.0;
        for t in [t, -t] {
            let want = 2.0 * (1.0 + t.abs());
            assert!((section_length(&m, h, t) - want).abs() < 1e-9, "t={t}");
        }
    }
    assert_eq!(section_length(&m, h, 1.0), 0.0);
    assert_eq!(section_length(&m, h, -1.5), 0.0);
}

#[test]
fn wire_distance_of_initial_films() {
    let cfg = make_config(3.5, TAU / 100.0, Some(TAU)).unwrap();
    let w = cfg.wires();
    let comp = build_competitor_mesh(&cfg, 0.2).unwrap();
    assert!(nw_distance(&comp, &w) > 0.0);
    // the flat crescents of the cone contain the wires
    let cone = build_cone_mesh(&cfg, 0.2).unwrap();
    assert_eq!(nw_distance(&cone, &w), 0.0);
}

fn symmetric() -> FlowParams {
    FlowParams {
        symmetrize: true,
        ..FlowParams::default()
    }
}

#[test]
fn converged_cone_sections_beat_steiner() {
    let h = 3.5;
    let cfg = make_config(h, TAU / 100.0, None).unwrap();
    let mut m = build_cone_mesh(&cfg, 0.2).unwrap();
    let report = minimize(&mut m, &symmetric(), None).unwrap();
    assert!(report.converged);
    for k in 0..50 {
        let t = -0.98 + 1.96 * k as f64 / 49.0;
        let len = section_length(&m, h, t);
        assert!(len >= steiner_section_length(t) * 0.98, "t={t} len={len}");
    }
}

#[test]
fn converged_competitor_triple_angles() {
    let cfg = make_config(3.5, TAU / 100.0, Some(TAU)).unwrap();
    let mut m = build_competitor_mesh(&cfg, 0.2).unwrap();
    let report = minimize(&mut m, &symmetric(), Some(&cfg.wires())).unwrap();
    assert!(report.converged);
    assert!(report.min_wire_distance.unwrap() > 0.0);
    let mut dev: Vec<f64> = triple_edge_angles(&m)
        .iter()
        .map(|a| a.iter().map(|x| (x - 120.0).abs()).fold(0.0, f64::max))
        .collect();
    dev.sort_by(f64::total_cmp);
    assert!(!dev.is_empty());
    assert!(dev[dev.len() / 2] < 5.0, "{dev:?}");
}

/// A bumpy grid over the unit square with sliding sides and pinned corners.
fn random_grid(rng: &mut ChaCha8Rng) -> FilmMesh {
    let corners = [
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(1.0, 1.0, 0.0),
        Point3::new(0.0, 1.0, 0.0),
    ];
    let segments = (0..4)
        .map(|k| Segment {
            name: format!("side{k}"),
            a: corners[k],
            b: corners[(k + 1) % 4],
        })
        .collect();
    let mut m = FilmMesh::new(segments);
    let n = rng.gen_range(3..8);
    let amp = rng.gen_range(0.0..0.4);
    let mut idx = vec![vec![0; n + 1]; n + 1];
    for (i, row) in idx.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let (x, y) = (i as f64 / n as f64, j as f64 / n as f64);
            let edge_i = i == 0 || i == n;
            let edge_j = j == 0 || j == n;
            let (p, c) = if edge_i && edge_j {
                (Point3::new(x, y, 0.0), Constraint::Pinned)
            } else if edge_i || edge_j {
                let k = match (i, j) {
                    (_, 0) => 0,
                    (i, _) if i == n => 1,
                    (_, j) if j == n => 2,
                    _ => 3,
                };
                (Point3::new(x, y, 0.0), Constraint::OnSegment(k))
            } else {
                let jitter = 0.2 / n as f64;
                let p = Point3::new(
                    x + rng.gen_range(-jitter..jitter),
                    y + rng.gen_range(-jitter..jitter),
                    rng.gen_range(-amp..=amp),
                );
                (p, Constraint::Free)
            };
            *slot = m.push_vertex(p, c);
        }
    }
    for i in 0..n {
        for j in 0..n {
            let (a, b, c, d) = (idx[i][j], idx[i + 1][j], idx[i + 1][j + 1], idx[i][j + 1]);
            if rng.gen_bool(0.5) {
                m.push_triangle([a, b, c], None);
                m.push_triangle([a, c, d], None);
            } else {
                m.push_triangle([a, b, d], None);
                m.push_triangle([b, c, d], None);
            }
        }
    }
    m
}

fn random_competitor(rng: &mut ChaCha8Rng) -> FilmMesh {
    let h = rng.gen_range(1.0..4.0);
    let cfg = make_config(h, 0.02, Some(TAU)).unwrap();
    let mut m = build_competitor_mesh(&cfg, 0.6).unwrap();
    for v in 0..m.vertices.len() {
        if m.constraints[v] == Constraint::Free {
            for k in 0..3 {
                m.vertices[v][k] += rng.gen_range(-0.01..0.01);
            }
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn flow_steps_never_increase_area(
        seed in any::<u64>(),
        step in 0.01f64..0.5,
        viscosity in 0.0f64..1.0,
        smoothing in 0.0f64..1.0,
        normal_only in any::<bool>(),
        triple in any::<bool>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = if triple { random_competitor(&mut rng) } else { random_grid(&mut rng) };
        let scale = m.vertices.iter().map(|p| p.coords.amax()).fold(1.0, f64::max);
        let params = FlowParams { step, viscosity, smoothing, normal_only, ..FlowParams::default() };
        for _ in 0..20 {
            let before = mesh_area(&m).unwrap();
            match flow_step(&mut m, &params) {
                Ok(info) => {
                    prop_assert_eq!(info.area_before, before);
                    prop_assert!(info.area_after <= before * (1.0 + 1e-12));
                    prop_assert!((mesh_area(&m).unwrap() - info.area_after).abs() <= 1e-12 * before);
                }
                Err(FlowError::StalledStep { .. }) => {
                    prop_assert!((mesh_area(&m).unwrap() - before).abs() <= 1e-12 * before);
                }
                Err(e) => prop_assert!(false, "{}", e),
            }
            for (v, c) in m.constraints.iter().enumerate() {
                if let Constraint::OnSegment(k) = c {
                    prop_assert!(m.segments[*k].distance(&m.vertices[v]) <= 1e-12 * scale);
                }
            }
        }
    }
}
