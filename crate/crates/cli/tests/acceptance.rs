//! Acceptance criteria, one PASS/FAIL line each.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use linefield::analysis::{
    annular_norms, characteristic_constancy, classify_domain, extended_div_l2_squared, gradient_recovery_general,
    hole_windings, kinetic_field, chord_sign_changes, directions, lift, potential, propagation_check,
    recovery_determinant, uniqueness_probe, verify_solution, FailureReason, FieldSource, Status,
    VerificationReport, VerifyOptions,
};
use linefield::geometry::{ClosedCurve, DomainSpec, Vec2};
use linefield::grid::{divergence_tensor, rasterize, DivergenceMode, Lattice, RasterGrid, ScalarField};
use linefield::patterns::{
    constant_field, exact_tubular_solution, grain_boundary_field, projection_entries, uturn_field, vortex_field,
    LineField, PatternSpec,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn annulus() -> DomainSpec {
    DomainSpec::tubular(ClosedCurve::circle(Vec2::ZERO, 1.0).unwrap(), 0.4).unwrap()
}

fn disk(r: f64) -> DomainSpec {
    DomainSpec::raw(ClosedCurve::circle(Vec2::ZERO, r).unwrap(), vec![])
}

fn stadium() -> DomainSpec {
    let r = 0.6;
    let mut pts = Vec::new();
    for k in 0..60 {
        let t = -PI / 2.0 + PI * k as f64 / 60.0;
        pts.push(Vec2::new(0.6 + r * t.cos(), r * t.sin()));
    }
    for k in 0..24 {
        pts.push(Vec2::new(0.6 - 1.2 * k as f64 / 24.0, r));
    }
    for k in 0..60 {
        let t = PI / 2.0 + PI * k as f64 / 60.0;
        pts.push(Vec2::new(-0.6 + r * t.cos(), r * t.sin()));
    }
    for k in 0..24 {
        pts.push(Vec2::new(-0.6 + 1.2 * k as f64 / 24.0, -r));
    }
    DomainSpec::raw(ClosedCurve::polyline(&pts).unwrap(), vec![])
}

/// Band around the ellipse with semi-axes 1.2 and 1 whose outer half-width
/// `0.3(1 + 0.1 cos 2u)` varies by 10% and whose inner half-width is 0.3.
fn variable_tube() -> DomainSpec {
    let n = 720;
    let (mut outer, mut inner) = (Vec::new(), Vec::new());
    for k in 0..n {
        let u = 2.0 * PI * k as f64 / n as f64;
        let p = Vec2::new(1.2 * u.cos(), u.sin());
        let t = Vec2::new(-1.2 * u.sin(), u.cos()).normalized();
        let normal = Vec2::new(t.y, -t.x);
        outer.push(p + normal * (0.3 * (1.0 + 0.1 * (2.0 * u).cos())));
        inner.push(p - normal * 0.3);
    }
    DomainSpec::raw(
        ClosedCurve::polyline(&outer).unwrap(),
        vec![ClosedCurve::polyline(&inner).unwrap()],
    )
}

fn verify_exact(h: f64, levels: &[f64]) -> VerificationReport {
    verify_solution(
        FieldSource::Analytic {
            pattern: &PatternSpec::Tubular,
            domain: &annulus(),
            h_levels: levels,
        },
        &VerifyOptions::default(),
    )
    .unwrap_or_else(|e| panic!("verification at h = {h}: {e}"))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("annulus.json"),
        r#"{"curve": {"type": "circle", "center": [0, 0], "radius": 1}, "delta": 0.4}"#,
    )
    .unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_linefield"))
        .current_dir(dir.path())
        .args(["solve", "--domain", "annulus.json", "--h", "0.00390625", "--out", "f.csv", "--report", "r.json"])
        .status()
        .unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let report: VerificationReport =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    let all_pass = report.conditions.iter().all(|(_, c)| c.status == Status::Pass);
    let fine = &report.norms;
    let coarse = verify_exact(1.0 / 128.0, &[1.0 / 128.0]).norms;
    let h = fine.h;
    let res_ratio = coarse.residual_max / fine.residual_max;
    let trace_ratio = coarse.trace_max / fine.trace_max;
    let pass = status.code() == Some(0)
        && all_pass
        && fine.residual_max <= 5.0 * h
        && fine.trace_max <= 5.0 * h
        && res_ratio >= 1.7
        && trace_ratio >= 1.7
        && elapsed <= 10.0;
    outcome(
        pass,
        format!(
            "all conditions pass: {all_pass}; max|P div P| {:.3e}, max|Pn| {:.3e} (5h = {:.3e}); halving ratios {res_ratio:.2}, {trace_ratio:.2}; solve {elapsed:.1}s",
            fine.residual_max,
            fine.trace_max,
            5.0 * h
        ),
    )
}

fn criterion_2() -> Outcome {
    let spec = annulus();
    let grid = rasterize(&spec, 1.0 / 256.0).unwrap();
    let field = exact_tubular_solution(&spec, &grid).unwrap();
    let value = extended_div_l2_squared(&field, &grid).unwrap();
    let oracle = 2.0 * PI * (7.0f64 / 3.0).ln();
    let rel = (value / oracle - 1.0).abs();
    outcome(rel <= 0.02, format!("||div P||^2 = {value:.4} vs 2 pi ln(7/3) = {oracle:.4}, rel. error {:.2}%", 100.0 * rel))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let spec = disk(1.05);
    let grid = rasterize(&spec, 1.0 / 256.0).unwrap();
    let field = vortex_field(&grid, Vec2::ZERO, 1.0).unwrap().forget_orientation();
    let table = annular_norms(&field, Vec2::ZERO, 1.0, 2.0, &[0.2, 0.1, 0.05, 0.025]).unwrap();
    let slope = table.log_slope.unwrap();
    let slope_ok = (slope / (2.0 * PI) - 1.0).abs() <= 0.05;

    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("disk.json"),
        r#"{"curve": {"type": "circle", "center": [0, 0], "radius": 1}, "mode": "raw"}"#,
    )
    .unwrap();
    let bin = env!("CARGO_BIN_EXE_linefield");
    let made = Command::new(bin)
        .current_dir(dir.path())
        .args(["pattern", "--name", "vortex", "--h", "0.015625", "--out", "v.csv"])
        .output()
        .unwrap();
    let verify = Command::new(bin)
        .current_dir(dir.path())
        .args(["verify", "--field", "v.csv", "--domain", "disk.json", "--refine", "3", "--report", "r.json"])
        .output()
        .unwrap();
    let report: VerificationReport =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    let cites = report.conditions.divergence_l2.status == Status::Fail
        && report.verdict.reasons.iter().any(|r| r.contains("L2 growth"));
    let elapsed = start.elapsed().as_secs_f64();
    let pass = slope_ok && made.status.success() && verify.status.code() == Some(1) && cites && elapsed <= 30.0;
    outcome(
        pass,
        format!(
            "slope {slope:.4} vs 2 pi = {:.4}; verify --refine 3 exit {:?}, L2 growth {:.1}% per halving; {elapsed:.1}s",
            2.0 * PI,
            verify.status.code(),
            100.0 * report.norms.growth_per_halving.unwrap_or(f64::NAN)
        ),
    )
}

/// Hausdorff distance between the unit circle and the closed polygon through `pts`.
fn hausdorff_to_unit_circle(pts: &[Vec2]) -> f64 {
    let to_circle = pts.iter().map(|p| (p.norm() - 1.0).abs()).fold(0.0, f64::max);
    let seg_dist = |q: Vec2, a: Vec2, b: Vec2| {
        let d = b - a;
        let t = ((q - a).dot(d) / d.dot(d)).clamp(0.0, 1.0);
        (a + d * t).distance(q)
    };
    let to_polygon = (0..4096)
        .map(|k| {
            let q = Vec2::from_angle(2.0 * PI * k as f64 / 4096.0);
            (0..pts.len())
                .map(|i| seg_dist(q, pts[i], pts[(i + 1) % pts.len()]))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    to_circle.max(to_polygon)
}

fn classify(spec: &DomainSpec, h: f64) -> (linefield::analysis::TubularityVerdict, f64) {
    let start = Instant::now();
    let grid = rasterize(spec, h).unwrap();
    let v = classify_domain(spec, &grid, 256).unwrap();
    (v, start.elapsed().as_secs_f64())
}

fn criterion_4() -> Outcome {
    let h = 1.0 / 256.0;
    let (ann, t_ann) = classify(&annulus(), h);
    let delta = ann.delta.unwrap_or(f64::NAN);
    let haus = ann.gamma.as_deref().map_or(f64::INFINITY, hausdorff_to_unit_circle);
    let ann_ok = ann.is_tubular
        && (ann.t_stats.mean - 0.8).abs() <= 1e-3
        && (delta - 0.4).abs() <= 1e-3
        && haus <= 1e-3;
    let (dk, t_disk) = classify(&disk(1.0), h);
    let (st, t_st) = classify(&stadium(), h);
    let st_witness = st.reasons.iter().any(|r| matches!(r, FailureReason::ClassA { .. }));
    let (vt, t_vt) = classify(&variable_tube(), h);
    let vt_cv = vt.reasons.iter().any(|r| matches!(r, FailureReason::NonConstantT { .. }));
    let slowest = t_ann.max(t_disk).max(t_st).max(t_vt);
    let pass = ann_ok && !dk.is_tubular && !st.is_tubular && st_witness && !vt.is_tubular && vt_cv && vt.t_stats.cv > 0.02 && slowest <= 10.0;
    outcome(
        pass,
        format!(
            "annulus mean T {:.5}, delta {delta:.5}, Hausdorff {haus:.2e}; disk tubular {}; stadium tubular {} (class-A witness {st_witness}); variable tube tubular {} (CV {:.2}%); slowest {slowest:.1}s",
            ann.t_stats.mean,
            dk.is_tubular,
            st.is_tubular,
            vt.is_tubular,
            100.0 * vt.t_stats.cv
        ),
    )
}

fn criterion_5() -> Outcome {
    let h = 1.0 / 64.0;
    let d = disk(1.0);
    let dgrid = rasterize(&d, h).unwrap();
    let spec = annulus();
    let agrid = rasterize(&spec, h).unwrap();
    let lifts = |f: &LineField| lift(f).map(|r| r.is_orientable()).unwrap_or(false);
    let constant = lifts(&constant_field(&dgrid, 0.3));
    let grain = lifts(&grain_boundary_field(&dgrid, 0.0, PI / 3.0, Vec2::ZERO, Vec2::new(0.0, 1.0)).unwrap());
    let solution = lifts(&exact_tubular_solution(&spec, &agrid).unwrap());
    let uturn = lift(&uturn_field(&dgrid, Vec2::ZERO)).unwrap();
    let w_half = uturn.witness().map_or(f64::NAN, |w| w.winding);
    let vortex = vortex_field(&dgrid, Vec2::ZERO, 1.0).unwrap().forget_orientation();
    let holes = hole_windings(&vortex);
    let w_one = holes.first().map_or(f64::NAN, |d| d.charge);
    let pass = constant
        && grain
        && solution
        && !uturn.is_orientable()
        && (w_half.abs() - 0.5).abs() <= 1e-9
        && holes.len() == 1
        && (w_one - 1.0).abs() <= 1e-9;
    outcome(
        pass,
        format!(
            "lift constant {constant}, grain {grain}, annulus solution {solution}; U-turn witness winding {w_half}; vortex loop winding {w_one}"
        ),
    )
}

/// Largest error of the recovered `∇a` against the exact gradient for `θ = kx·x + ky·y`.
fn recovery_error(h: f64, kx: f64, ky: f64) -> f64 {
    let n = (1.0 / h).round() as usize;
    let lat = Lattice::new(Vec2::ZERO, h, n, n).unwrap();
    let grid = RasterGrid::from_mask(lat, &vec![true; lat.len()]).unwrap();
    let field = LineField::from_fn(*grid.lattice(), grid.inside_mask(), |p| kx * p.x + ky * p.y);
    let p = field.to_tensor();
    let div = divergence_tensor(&p, DivergenceMode::Interior).unwrap();
    let r = p.apply(&div);
    let mask = vec![true; lat.len()];
    let scalar = |f: &dyn Fn(usize) -> f64| ScalarField::new(lat, mask.clone(), (0..lat.len()).map(f).collect()).unwrap();
    let a = scalar(&|i| field.abc(i)[0]);
    let b = scalar(&|i| field.abc(i)[1]);
    let f = scalar(&|i| div.value(i)[0]);
    let g = scalar(&|i| div.value(i)[1]);
    let r1 = scalar(&|i| r.value(i)[0]);
    let r2 = scalar(&|i| r.value(i)[1]);
    let (a1, a2) = gradient_recovery_general(&a, &b, &f, &g, Some((&r1, &r2))).unwrap();
    (0..lat.len())
        .map(|i| {
            let t = field.theta(i);
            // a = cos²θ, ∇a = −sin 2θ ∇θ
            let s = -(2.0 * t).sin();
            (a1.value(i) - s * kx).abs().max((a2.value(i) - s * ky).abs())
        })
        .fold(0.0, f64::max)
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let worst = (0..10_000)
        .map(|_| {
            let [a, b, _] = projection_entries(rng.gen_range(0.0..PI));
            (recovery_determinant(a, b) - 0.25).abs()
        })
        .fold(0.0, f64::max);
    let mut orders = Vec::new();
    for (kx, ky) in [(1.0, 0.0), (1.0, 0.5)] {
        let errs: Vec<f64> = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0].iter().map(|&h| recovery_error(h, kx, ky)).collect();
        for w in errs.windows(2) {
            orders.push((w[0] / w[1]).log2());
        }
    }
    let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(
        worst <= 1e-12 && min_order >= 1.8,
        format!("determinant defect {worst:.1e} over 10^4 samples; recovery orders {:?}", orders.iter().map(|o| format!("{o:.2}")).collect::<Vec<_>>()),
    )
}

fn criterion_7() -> Outcome {
    let spec = annulus();
    let grid = rasterize(&spec, 1.0 / 128.0).unwrap();
    let m = lift(&exact_tubular_solution(&spec, &grid).unwrap()).unwrap().oriented().cloned().unwrap();
    let report = characteristic_constancy(&m, 16, 64).unwrap();
    let annulus_ok = report.passes() && report.directions.iter().all(|d| d.chords.len() >= 64);

    let dgrid = rasterize(&disk(1.0), 1.0 / 128.0).unwrap();
    let (point, dir) = (Vec2::ZERO, Vec2::new(0.0, 1.0));
    let grain = grain_boundary_field(&dgrid, 0.0, PI / 3.0, point, dir).unwrap();
    let gm = lift(&grain).unwrap().oriented().cloned().unwrap();
    let lat = *gm.lattice();
    let side = |p: Vec2| dir.cross(p - point);
    let (ml, mr) = {
        let pick = |x: f64| gm.m(lat.cell_containing(Vec2::new(x, 0.3)).unwrap());
        (pick(-0.5), pick(0.5))
    };
    let (mut crossing, mut flagged) = (0usize, 0usize);
    for xi in directions(16) {
        // χ jumps across the interface only where the two orientations disagree on ξ
        if ml.dot(xi) * mr.dot(xi) >= 0.0 {
            continue;
        }
        let chi = kinetic_field(&gm, xi).unwrap();
        for c in chord_sign_changes(&chi, 64).chords {
            if side(c.start) * side(c.end) < 0.0 && side(c.start).abs() > 2.0 * lat.h && side(c.end).abs() > 2.0 * lat.h {
                crossing += 1;
                if c.sign_changes >= 1 {
                    flagged += 1;
                }
            }
        }
    }
    outcome(
        annulus_ok && crossing > 0 && flagged == crossing,
        format!(
            "annulus: {} chords, max sign changes {}; grain: {flagged}/{crossing} interface-crossing chords change sign",
            report.chord_count(),
            report.max_sign_changes()
        ),
    )
}

fn criterion_8() -> Outcome {
    let spec = annulus();
    let h = 1.0 / 128.0;
    let grid = rasterize(&spec, h).unwrap();
    let field = exact_tubular_solution(&spec, &grid).unwrap();
    let defined: Vec<usize> = (0..grid.lattice().len()).filter(|&i| field.is_defined(i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let cell = defined[rng.gen_range(0..defined.len())];
        let r = propagation_check(&field, cell).unwrap();
        worst = worst.max(r.variation);
    }
    let u = uniqueness_probe(&spec, &grid, 4).unwrap();
    outcome(
        worst <= 5.0 * h && u.all_orientable && u.max_distance <= 5.0 * h,
        format!("max variation {worst:.2e}, seed disagreement {:.2e} (5h = {:.2e})", u.max_distance, 5.0 * h),
    )
}

fn criterion_9() -> Outcome {
    let spec = annulus();
    let h = 1.0 / 256.0;
    let grid = rasterize(&spec, h).unwrap();
    let m = lift(&exact_tubular_solution(&spec, &grid).unwrap()).unwrap().oriented().cloned().unwrap();
    let pot = potential(&m, &grid).unwrap();
    let worst_std = pot.boundary.iter().map(|b| b.std).fold(0.0, f64::max);
    let gap = pot.gaps().first().copied().unwrap_or(f64::NAN);
    let t = classify_domain(&spec, &grid, 256).unwrap().t_stats.mean;
    outcome(
        worst_std <= 5.0 * h && (gap.abs() - 0.8).abs() <= 0.01 && (gap.abs() - t).abs() <= 0.01,
        format!("boundary std {worst_std:.2e} (5h = {:.2e}); |gap| {:.4}, mean T {t:.4}", 5.0 * h, gap.abs()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("exact-solution verification", criterion_1),
        ("L2 norm of div P on the annulus", criterion_2),
        ("vortex exclusion", criterion_3),
        ("tubularity classification", criterion_4),
        ("orientability suite", criterion_5),
        ("projection algebra and gradient recovery", criterion_6),
        ("kinetic characteristics", criterion_7),
        ("propagation and uniqueness", criterion_8),
        ("potential constants", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {} {name}: {} ({})", k + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
