use nalgebra::{Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use soapfilm::covers::enumerate_valid_covers;
use soapfilm::geometry::{build_competitor_mesh, build_skew_mesh, make_config, WedgeConfig};
use soapfilm::group::{edge_loop_word, monodromy_of_word, ArcId, CoverSpec, Generator, Perm3};
use soapfilm::mesh::Piece;
use soapfilm::monodromy::{
    arc_meridian, check_local_triviality, circle_loop, label_surface, wetting_check,
    LabeledSurface, LoopPolyline, MonodromyError,
};

type P3 = Point3<f64>;

fn competitor_with(h: f64, s: f64, tau: f64, spec: &CoverSpec) -> (WedgeConfig, LabeledSurface) {
    let cfg = make_config(h, s, Some(tau)).unwrap();
    let mesh = build_competitor_mesh(&cfg, 0.3).unwrap();
    let ls = label_surface(&mesh, &cfg, spec).unwrap();
    (cfg, ls)
}

fn competitor(h: f64, s: f64, tau: f64) -> (WedgeConfig, LabeledSurface) {
    competitor_with(h, s, tau, &CoverSpec::canonical())
}

#[test]
fn meridians_match_tabulated_words() {
    let spec = CoverSpec::canonical();
    for (h, s, tau) in [(4.0, 0.1, 0.4), (16.0, 0.05, 0.3), (1.5, 0.3, 0.5)] {
        let (cfg, ls) = competitor(h, s, tau);
        for arc in ArcId::TABULATED {
            let lp = arc_meridian(&cfg, ls.basepoint(), arc);
            let got = ls.loop_permutation(&lp).unwrap();
            let want = monodromy_of_word(&edge_loop_word(arc).unwrap(), &spec);
            assert_eq!(got, want, "h={h} {arc}");
        }
    }
}

#[test]
fn valid_covers_label_iff_b_and_d_trivial() {
    let cfg = make_config(4.0, 0.1, Some(0.4)).unwrap();
    let mesh = build_competitor_mesh(&cfg, 0.4).unwrap();
    let mut labelled = 0;
    for spec in enumerate_valid_covers() {
        let trivial = spec.get(Generator::B).is_identity() && spec.get(Generator::D).is_identity();
        match label_surface(&mesh, &cfg, &spec) {
            Ok(ls) => {
                assert!(trivial);
                labelled += 1;
                assert!(check_local_triviality(&ls).unwrap().ok());
                for arc in ArcId::TABULATED {
                    let got = ls.loop_permutation(&arc_meridian(&cfg, ls.basepoint(), arc)).unwrap();
                    assert_eq!(got, monodromy_of_word(&edge_loop_word(arc).unwrap(), &spec));
                }
            }
            Err(MonodromyError::Inconsistent { .. }) => assert!(!trivial),
            Err(e) => panic!("{e}"),
        }
    }
    assert_eq!(labelled, 4);
}

#[test]
fn local_triviality_detects_a_bad_label() {
    let (_, ls) = competitor(4.0, 0.1, 0.4);
    let report = check_local_triviality(&ls).unwrap();
    assert!(report.ok());
    assert!(report.checked > 1000);
    assert_ne!(ls.labels.left_crescent, Perm3::C123);
    let broken = ls.relabel(Piece::LeftCrescent, Perm3::C123);
    let report = check_local_triviality(&broken).unwrap();
    assert!(!report.ok());
    assert!(report
        .failures
        .iter()
        .all(|f| f.pieces.iter().any(|p| p == &Piece::LeftCrescent.name())));
}

#[test]
fn elementary_loops() {
    let (cfg, ls) = competitor(4.0, 0.1, 0.4);
    // through the square and back
    let through = circle_loop(P3::new(0.0, 0.0, 0.1), Vector3::z(), Vector3::x(), 0.2, 12);
    assert_eq!(ls.loop_permutation(&LoopPolyline::closed(through)).unwrap(), Perm3::IDENTITY);
    let far = circle_loop(P3::new(0.0, 30.0, 0.0), Vector3::x(), Vector3::y(), 1.0, 12);
    assert_eq!(ls.loop_permutation(&LoopPolyline::closed(far)).unwrap(), Perm3::IDENTITY);

    let l1 = ls.loop_permutation(&arc_meridian(&cfg, ls.basepoint(), ArcId::L { edge: 1, piece: 1 }));
    assert!(l1.unwrap().is_derangement());

    let sh = cfg.s * cfg.h;
    let around_c1 = circle_loop(P3::new(-sh, 0.0, 0.05), Vector3::z(), Vector3::y(), 0.05, 12);
    let p = ls.loop_permutation(&LoopPolyline::anchored(ls.basepoint(), &around_c1)).unwrap();
    assert_eq!(p, Perm3::T23);
}

fn random_loop(rng: &mut ChaCha8Rng, h: f64) -> Vec<P3> {
    let n = rng.gen_range(3..8);
    (0..n)
        .map(|_| {
            P3::new(
                rng.gen_range(-1.3 * h..1.3 * h),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.5..1.5),
            )
        })
        .collect()
}

#[test]
fn loop_permutation_is_homotopy_invariant() {
    let (_, ls) = competitor(4.0, 0.1, 0.4);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut nontrivial = 0;
    for _ in 0..100 {
        let pts = random_loop(&mut rng, 4.0);
        let base = ls.loop_permutation(&LoopPolyline::anchored(ls.basepoint(), &pts)).unwrap();
        nontrivial += usize::from(!base.is_identity());
        let shift = Vector3::new(rng.gen(), rng.gen(), rng.gen()) * 1e-5;
        let mut moved: Vec<P3> = pts.iter().map(|p| p + shift).collect();
        // a midpoint nudged off the segment
        let m = P3::from((moved[0].coords + moved[1].coords) / 2.0) + Vector3::new(0.0, 1e-6, -1e-6);
        moved.insert(1, m);
        let again = ls.loop_permutation(&LoopPolyline::anchored(ls.basepoint(), &moved)).unwrap();
        assert_eq!(base, again);
        // rotating the start point conjugates the free loop
        let mut rotated = pts.clone();
        rotated.rotate_left(1);
        let free_a = ls.loop_permutation(&LoopPolyline::closed(pts.clone())).unwrap();
        let free_b = ls.loop_permutation(&LoopPolyline::closed(rotated)).unwrap();
        assert!(Perm3::ALL.iter().any(|&g| free_a.conjugate_by(g) == free_b));
    }
    assert!(nontrivial > 10);
}

#[test]
fn u_is_well_defined_and_fibers_are_full() {
    let (cfg, ls) = competitor(4.0, 0.1, 0.4);
    let c_loop = arc_meridian(&cfg, ls.basepoint(), ArcId::L { edge: 1, piece: 1 });
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let path = random_loop(&mut rng, 4.0);
        let u = ls.u_trace(&path).unwrap();
        let shifted: Vec<P3> = path.iter().map(|p| p + Vector3::new(2e-6, -1e-6, 3e-6)).collect();
        let end = *path.last().unwrap();
        let mut nudged = shifted;
        *nudged.last_mut().unwrap() = end;
        assert_eq!(ls.u_trace(&nudged).unwrap(), u);

        let mut sheets = Vec::new();
        for k in 0..3 {
            let mut full: Vec<P3> = Vec::new();
            for _ in 0..k {
                full.extend_from_slice(&c_loop.points[1..]);
            }
            full.extend_from_slice(&path);
            sheets.push(ls.u_trace(&full).unwrap());
        }
        let mut sorted = sheets.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 2, 3]);
        assert_eq!(sheets.iter().filter(|&&s| s == 1).count(), 1);
    }
}

#[test]
fn faceted_competitor_is_wetted() {
    let (cfg, ls) = competitor(16.0, 0.05, 0.3);
    let report = wetting_check(&ls, &cfg).unwrap();
    assert!(report.p1_ok && report.p2_ok);
    assert!(report.far_loop_fixes_sheet1);
    assert_eq!(report.p1.len(), 4 * 9 * 3);
}

#[test]
fn skew_film_leaves_short_edges_dry() {
    let cfg = make_config(3.5, 0.1, None).unwrap();
    let mesh = build_skew_mesh(&cfg, 0.3).unwrap();
    let ls = label_surface(&mesh, &cfg, &CoverSpec::canonical()).unwrap();
    assert!(ls.disks.is_empty());
    assert!(check_local_triviality(&ls).unwrap().ok());
    let report = wetting_check(&ls, &cfg).unwrap();
    assert!(report.p1_ok);
    assert!(!report.p2_ok);
    assert!(report.p2.iter().all(|s| s.perm.is_identity()));
}

#[test]
fn canonical_piece_labels() {
    let (_, ls) = competitor(4.0, 0.1, 0.4);
    let l = ls.labels;
    // front to back through the left crescent, top to bottom through the right
    assert_eq!(l.left_crescent, Perm3::C132);
    assert_eq!(l.right_crescent.inverse(), Perm3::C123);
    assert_eq!(l.disk1, Perm3::T23);
    assert_eq!(l.disk2, Perm3::T23);
    // across a disk the sheet labels differ by the disk's transposition
    assert_eq!(l.front, l.main.conjugate_by(Perm3::T23));
    assert_eq!(l.top, l.main.conjugate_by(Perm3::T23));
}

#[test]
fn u_trace_examples() {
    let (cfg, ls) = competitor(4.0, 0.1, 0.4);
    let h = cfg.h;
    let outside = [P3::new(3.0 * h, 20.0, 5.0), P3::new(-3.0 * h, -20.0, -5.0)];
    assert_eq!(ls.u_trace(&outside).unwrap(), 1);
    // in through the front face of the central slab
    let x0 = -0.5 * h * 0.4;
    let inside = [P3::new(x0, -5.0, 0.05), P3::new(x0, -0.1, 0.05)];
    assert_ne!(ls.u_trace(&inside).unwrap(), 1);

    // paths whose difference bounds a flat triangle missing the frame and wires
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let target = P3::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
        let via = P3::new(-target.x, target.y, target.z);
        assert_eq!(ls.u_trace(&[target]).unwrap(), ls.u_trace(&[via, target]).unwrap());
    }
}
