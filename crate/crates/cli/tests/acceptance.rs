//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use soapfilm::analytics::{
    comparison_margin, competitor_central_area, cone_central_lower_bound, crossover_h,
    min_f_lower_bound, section_lower_bound, skew_faceted_area, STEINER_SWITCH,
};
use soapfilm::flow::{flow_step, mesh_area, minimize, FlowError, FlowParams};
use soapfilm::geometry::{
    build_competitor_mesh, build_cone_mesh, build_cylinder_mesh, build_skew_mesh, make_config,
    DEFAULT_RESOLUTION,
};
use soapfilm::group::{
    edge_loop_word, in_h, monodromy_of_word, parse_word, q_project, ArcId, CoverSpec, NormalForm,
    Perm3,
};
use soapfilm::mesh::{Constraint, FilmMesh};
use soapfilm::monodromy::{arc_meridian, check_local_triviality, label_surface, wetting_check};
use soapfilm_cli::{run_compare, run_enumerate};

const TAU: f64 = 2.0 - 1.732_050_807_568_877_2;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cover_enumeration() -> Outcome {
    let start = Instant::now();
    let report = run_enumerate(false);
    let elapsed = start.elapsed();
    let moving = |p: Perm3| p != Perm3::IDENTITY && p != Perm3::T23;
    let shapes = report.covers.iter().all(|c| {
        c.a == Perm3::T23
            && c.e == Perm3::T23
            && [Perm3::IDENTITY, Perm3::T23].contains(&c.b)
            && [Perm3::IDENTITY, Perm3::T23].contains(&c.d)
            && moving(c.c)
    });
    let canonical = report.covers.iter().any(|c| c.canonical);
    let alternative = report.covers.iter().any(|c| c.alternative);
    check(
        report.count == 16 && shapes && canonical && alternative && elapsed < Duration::from_secs(1),
        format!("{} covers, shapes ok {shapes}, canonical {canonical}, alternative {alternative}, {elapsed:?}", report.count),
    )
}

fn normal_form() -> Outcome {
    let w = parse_word("ad'ca'c'").unwrap();
    let nf = q_project(&w);
    let a = in_h(&parse_word("a").unwrap());
    let cac = in_h(&parse_word("cac'").unwrap());
    check(
        nf == NormalForm { alpha: 0, gamma: 1 } && !in_h(&w) && a && !cac,
        format!("q(ad'ca'c') = ({}, {}), in_H {} / a {a} / cac' {cac}", nf.alpha, nf.gamma, in_h(&w)),
    )
}

fn central_area_numbers() -> Outcome {
    let comp = competitor_central_area(16.0, TAU);
    let cone = cone_central_lower_bound(16.0, TAU);
    check(
        (comp - 22.456).abs() <= 1e-3 && (cone - 22.585).abs() <= 1e-3,
        format!("competitor {comp:.6}, cone bound {cone:.6}"),
    )
}

/// Midpoint rule on the pieces where the section bound is linear in `|t|`.
fn coarea_integral(h: f64, s: f64) -> f64 {
    let mut knots = vec![0.0, s, STEINER_SWITCH, 1.0];
    knots.sort_by(f64::total_cmp);
    let half: f64 = knots
        .windows(2)
        .map(|w| (w[1] - w[0]) * section_lower_bound(0.5 * (w[0] + w[1]), s))
        .sum();
    2.0 * h * half
}

fn lower_bound_limits() -> Outcome {
    let r3 = 3f64.sqrt();
    let mut worst_limit: f64 = 0.0;
    for h in [0.5, 3.5, 16.0, 100.0] {
        let lo = min_f_lower_bound(h, 1e-12);
        let hi = min_f_lower_bound(h, 1.0 - 1e-12);
        worst_limit = worst_limit
            .max((lo - 2.0 * h * (4.0 - r3)).abs() / lo)
            .max((hi - 2.0 * h).abs() / hi);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_integral: f64 = 0.0;
    for _ in 0..100 {
        let h = rng.gen_range(0.1..100.0);
        let s = rng.gen_range(1e-6..1.0 - 1e-6);
        let closed = min_f_lower_bound(h, s);
        worst_integral = worst_integral.max((coarea_integral(h, s) - closed).abs() / closed);
    }
    check(
        worst_limit <= 1e-9 && worst_integral <= 1e-9,
        format!("limit rel err {worst_limit:.2e}, coarea rel err {worst_integral:.2e}"),
    )
}

fn crossover() -> Outcome {
    let hc = crossover_h(TAU).map_err(|e| e.to_string())?;
    let m16 = comparison_margin(16.0, TAU);
    let bracket = comparison_margin(hc - 1e-9, TAU) < 0.0 && comparison_margin(hc + 1e-9, TAU) > 0.0;
    check(
        hc > 15.0 && hc < 16.0 && m16 > 0.0 && bracket,
        format!("crossover h = {hc:.9}, margin(16) = {m16:.6}, sign change within 1e-9 {bracket}"),
    )
}

fn catenoid_oracle(sep: f64) -> f64 {
    let d = 0.5 * sep;
    let f = |c: f64| c * (d / c).cosh() - 1.0;
    let (mut lo, mut hi) = (0.7, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    let g = |z: f64| 2.0 * PI * c * (z / c).cosh().powi(2);
    let n = 2000;
    let dz = sep / n as f64;
    let mut sum = g(-d) + g(d);
    for k in 1..n {
        sum += if k % 2 == 1 { 4.0 } else { 2.0 } * g(-d + k as f64 * dz);
    }
    sum * dz / 3.0
}

fn flow_oracle() -> Outcome {
    let start = Instant::now();
    let sep = 0.8;
    let around = (2.0 * PI / DEFAULT_RESOLUTION).ceil() as usize;
    let along = (sep / DEFAULT_RESOLUTION).ceil() as usize;
    let mut m = build_cylinder_mesh(1.0, sep, around, along);
    let report = minimize(&mut m, &FlowParams::default(), None).map_err(|e| e.to_string())?;
    let want = catenoid_oracle(sep);
    let rel = (report.final_area - want).abs() / want;
    let elapsed = start.elapsed();
    check(
        rel < 0.01 && elapsed < Duration::from_secs(60),
        format!("{around}x{along} mesh: {:.5} vs oracle {want:.5} (rel {rel:.2e}), {elapsed:.1?}", report.final_area),
    )
}

fn skew_film() -> Outcome {
    let start = Instant::now();
    let cfg = make_config(3.5, TAU / 100.0, None).unwrap();
    let mut m = build_skew_mesh(&cfg, DEFAULT_RESOLUTION).map_err(|e| e.to_string())?;
    let report = minimize(&mut m, &FlowParams::default(), None).map_err(|e| e.to_string())?;
    let faceted = skew_faceted_area(3.5);
    let elapsed = start.elapsed();
    check(
        report.final_area >= 7.0
            && report.final_area < report.initial_area
            && (report.initial_area - faceted).abs() < 1e-9
            && elapsed < Duration::from_secs(120),
        format!("{:.5} -> {:.5} in [7, {faceted:.4}], {elapsed:.1?}", report.initial_area, report.final_area),
    )
}

fn qualitative_crossover() -> Outcome {
    let start = Instant::now();
    let params = FlowParams {
        symmetrize: true,
        ..FlowParams::default()
    };
    let rows = run_compare(&[3.5, 4.0], TAU / 100.0, TAU, &[0.14, 0.1], &params).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut parts = Vec::new();
    for r in &rows {
        let sign_ok = match r.difference {
            Some(d) if r.h < 3.75 => d > 0.0,
            Some(d) => d < 0.0,
            None => false,
        };
        let nw_ok = r.competitor_nw.is_some_and(|d| d > 0.0);
        ok &= sign_ok && nw_ok && r.error.is_none();
        parts.push(format!(
            "h={} res={}: comp {:.4} cone {:.4} nw {:.4}",
            r.h,
            r.resolution,
            r.competitor_area.unwrap_or(f64::NAN),
            r.cone_area.unwrap_or(f64::NAN),
            r.competitor_nw.unwrap_or(f64::NAN)
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(30 * 60);
    check(ok, format!("{}; {elapsed:.0?}", parts.join("; ")))
}

fn wetting() -> Outcome {
    let cfg = make_config(16.0, TAU / 100.0, Some(TAU)).unwrap();
    let mut m = build_competitor_mesh(&cfg, 0.6).map_err(|e| e.to_string())?;
    let params = FlowParams {
        symmetrize: true,
        ..FlowParams::default()
    };
    let flow = minimize(&mut m, &params, Some(&cfg.wires())).map_err(|e| e.to_string())?;
    let ls = label_surface(&m, &cfg, &CoverSpec::canonical()).map_err(|e| e.to_string())?;
    let trivial = check_local_triviality(&ls).map_err(|e| e.to_string())?;
    let report = wetting_check(&ls, &cfg).map_err(|e| e.to_string())?;
    let max_p2 = report.p2.iter().map(|s| s.radius).fold(0.0, f64::max) / report.delta;
    check(
        flow.converged && trivial.ok() && report.p1_ok && report.p2_ok && report.far_loop_fixes_sheet1,
        format!(
            "area {:.4}, {} strata trivial {}, P1 {} ({} loops), P2 {} ({} loops, radii to {max_p2:.1} delta), far loop fixes sheet 1 {}",
            flow.final_area,
            trivial.checked,
            trivial.ok(),
            report.p1_ok,
            report.p1.len(),
            report.p2_ok,
            report.p2.len(),
            report.far_loop_fixes_sheet1
        ),
    )
}

fn word_consistency() -> Outcome {
    let spec = CoverSpec::canonical();
    let mut mismatches = Vec::new();
    for (h, s, tau) in [(4.0, 0.1, 0.4), (16.0, TAU / 100.0, TAU)] {
        let cfg = make_config(h, s, Some(tau)).unwrap();
        let mesh = build_competitor_mesh(&cfg, 0.3).map_err(|e| e.to_string())?;
        let ls = label_surface(&mesh, &cfg, &spec).map_err(|e| e.to_string())?;
        for arc in ArcId::TABULATED {
            let got = ls
                .loop_permutation(&arc_meridian(&cfg, ls.basepoint(), arc))
                .map_err(|e| e.to_string())?;
            let want = monodromy_of_word(&edge_loop_word(arc).unwrap(), &spec);
            if got != want {
                mismatches.push(format!("h={h} {arc}: {got} vs {want}"));
            }
        }
    }
    check(
        mismatches.is_empty(),
        format!("{} arcs at 2 configurations, mismatches {:?}", ArcId::TABULATED.len(), mismatches),
    )
}

fn random_mesh(rng: &mut ChaCha8Rng) -> FilmMesh {
    let h = rng.gen_range(1.0..4.0);
    let cfg = make_config(h, 0.02, Some(TAU)).unwrap();
    let mut m = match rng.gen_range(0..4) {
        0 => build_competitor_mesh(&cfg, 0.6).unwrap(),
        1 => build_cone_mesh(&cfg, 0.6).unwrap(),
        2 => build_skew_mesh(&cfg, 0.6).unwrap(),
        _ => build_cylinder_mesh(1.0, rng.gen_range(0.5..1.2), 16, 5),
    };
    let noise = rng.gen_range(0.0..0.02);
    for v in 0..m.vertices.len() {
        if m.constraints[v] == Constraint::Free {
            for k in 0..3 {
                m.vertices[v][k] += rng.gen_range(-noise..=noise);
            }
        }
    }
    m
}

fn flow_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut steps, mut stalled, mut worst): (usize, usize, f64) = (0, 0, f64::NEG_INFINITY);
    for _ in 0..50 {
        let mut m = random_mesh(&mut rng);
        let params = FlowParams {
            step: rng.gen_range(0.01..0.5),
            viscosity: rng.gen_range(0.0..1.0),
            smoothing: rng.gen_range(0.0..1.0),
            normal_only: rng.gen_bool(0.5),
            ..FlowParams::default()
        };
        for _ in 0..20 {
            let before = mesh_area(&m).map_err(|e| e.to_string())?;
            match flow_step(&mut m, &params) {
                Ok(_) | Err(FlowError::StalledStep { .. }) => {}
                Err(e) => return Err(e.to_string()),
            }
            let after = mesh_area(&m).map_err(|e| e.to_string())?;
            worst = worst.max((after - before) / before);
            steps += 1;
            stalled += usize::from(after == before);
        }
    }
    check(
        steps == 1000 && worst <= 1e-12,
        format!("{steps} steps ({stalled} without progress), max relative increase {worst:.2e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("cover enumeration", cover_enumeration),
        ("normal form", normal_form),
        ("central area numbers", central_area_numbers),
        ("lower-bound limits", lower_bound_limits),
        ("crossover bisection", crossover),
        ("catenoid flow oracle", flow_oracle),
        ("skew film bracket", skew_film),
        ("qualitative crossover", qualitative_crossover),
        ("wetting at h=16", wetting),
        ("monodromy-word consistency", word_consistency),
        ("flow monotonicity", flow_monotonicity),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
