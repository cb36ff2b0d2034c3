//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line
//! with its measured error and runtime; the test fails if any criterion does.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use twomm::cli::{fermion_suite, schur_suite};
use twomm::engines::*;
use twomm::fermion::Variant;
use twomm::measures::*;
use twomm::schur::TimeSequence;

struct Verdict {
    pass: bool,
    detail: String,
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn k1(x: f64) -> TimeSequence<Complex64> {
    TimeSequence::single(1, c(x))
}

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn worst(errors: &[(String, f64)]) -> (f64, String) {
    errors.iter().fold(
        (0.0, String::new()),
        |(w, l), (label, e)| if *e > w { (*e, label.clone()) } else { (w, l) },
    )
}

fn within(errors: Vec<(String, f64)>, tol: f64) -> twomm::Result<Verdict> {
    let (e, label) = worst(&errors);
    Ok(Verdict {
        pass: e <= tol,
        detail: format!("{} comparisons, worst {e:.3e} ({label}), tol {tol:e}", errors.len()),
    })
}

fn gaussian_cross_engine() -> twomm::Result<Verdict> {
    let g = MeasureSpec::gaussian(0.5);
    let none = DeformationParams::none();
    let closed = [c(2.0 * PI / 0.75f64.sqrt()), c(8.0 * PI * PI * 0.5 / (0.75 * 0.75))];
    let mut errors = Vec::new();
    for size in 1..=2 {
        let w = bimoment_window(&g, Rect::square(0, size - 1), &none, &quad())?;
        let d = direct_z(&g, &none, size, &quad())?.value;
        let p = permutation_z(&w, size, 0, 0)?.value;
        let a = andreief_z(&w, size, 0, 0)?.value;
        let z = closed[size as usize - 1];
        for (label, x, y) in [
            ("direct/permutation", d, p),
            ("direct/andreief", d, a),
            ("permutation/andreief", p, a),
        ] {
            errors.push((format!("N={size} {label}"), relative_difference(x, y)));
        }
        for (label, x) in [("direct", d), ("permutation", p), ("andreief", a)] {
            errors.push((format!("N={size} {label}/closed form"), relative_difference(x, z)));
        }
    }
    within(errors, 1e-8)
}

fn deformed_double_series() -> twomm::Result<Verdict> {
    let opts = SeriesOptions {
        truncation: 8,
        tol: None,
    };
    let mut errors = Vec::new();
    let g = MeasureSpec::gaussian(0.5);
    let gd = DeformationParams {
        t1: k1(0.1),
        t2: k1(0.05),
        ..Default::default()
    };
    let (z, _) = double_series_z(Variant::PlusPlus, &g, &gd, 2, &opts, &quad())?;
    let a = andreief_for(&g, &gd, 2, &quad())?;
    errors.push(("gaussian ++".to_string(), relative_difference(z.value, a.value)));
    let circle = MeasureSpec::circle(RSequence::Exponential { scale: 1.0 });
    let cd = DeformationParams {
        t1: k1(0.1),
        t2: k1(0.05),
        tbar1: k1(0.05),
        tbar2: k1(0.05),
        ..Default::default()
    };
    let a = andreief_for(&circle, &cd, 2, &quad())?;
    for v in [Variant::PlusMinus, Variant::MinusPlus, Variant::MinusMinus] {
        let (z, _) = double_series_z(v, &circle, &cd, 2, &opts, &quad())?;
        errors.push((format!("circle {}", v.tag()), relative_difference(z.value, a.value)));
    }
    within(errors, 1e-6)
}

fn quadruple_series() -> twomm::Result<Verdict> {
    let circle = MeasureSpec::circle(RSequence::Exponential { scale: 1.0 });
    let d = DeformationParams {
        t1: k1(0.05),
        t2: k1(0.05),
        tbar1: k1(0.05),
        tbar2: k1(0.05),
        ..Default::default()
    };
    let (z, _) = quadruple_series_z(
        &circle,
        &d,
        1,
        &SeriesOptions {
            truncation: 4,
            tol: None,
        },
        &quad(),
    )?;
    let a = andreief_for(&circle, &d, 1, &quad())?;
    within(vec![("circle N=1".into(), relative_difference(z.value, a.value))], 1e-6)
}

fn summarize(checks: Vec<twomm::cli::Check>) -> twomm::Result<Verdict> {
    let failed: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
    let mut detail = format!("{} exact identities, {} failed", checks.len(), failed.len());
    if let Some(f) = failed.first() {
        detail += &format!(" (first: {}: {})", f.label, f.detail);
    }
    Ok(Verdict {
        pass: failed.is_empty(),
        detail,
    })
}

fn fermionic_oracle() -> twomm::Result<Verdict> {
    summarize(fermion_suite(3, 5))
}

fn symmetric_functions() -> twomm::Result<Verdict> {
    summarize(schur_suite(6, 4))
}

fn character_coupling() -> twomm::Result<Verdict> {
    let iz = RSequence::Exponential { scale: 1.0 };
    let k = coupling_kernel_check(&iz, &[0.3, 0.1], &[0.2, -0.1], 12)?;
    let poch = RSequence::Pochhammer { z: 0.7, shift: -2.0 };
    let samples = [
        ([0.3, 0.1], [0.2, -0.1]),
        ([0.5, -0.4], [0.25, 0.6]),
        ([-0.2, 0.7], [0.9, 0.1]),
    ];
    let mut values = Vec::new();
    for (x, y) in samples {
        values.push(coupling_kernel_check(&poch, &x, &y, 6)?);
    }
    let spread = values
        .iter()
        .map(|v| (v.kernel - values[0].kernel).abs())
        .fold(0.0, f64::max);
    let series_gap = values.iter().map(|v| v.residual).fold(0.0, f64::max);
    Ok(Verdict {
        pass: k.residual < 1e-10 && spread < 1e-10 && series_gap < 1e-10,
        detail: format!(
            "r=1/j residual {:.3e}; a=0 kernel {} with spread {spread:.3e}, series gap {series_gap:.3e}",
            k.residual, values[0].kernel
        ),
    })
}

fn radial_reduction() -> twomm::Result<Verdict> {
    let radial = MeasureSpec::RadialPlanar { potential: vec![-1.0] };
    let mut errors = Vec::new();
    for (t1, t2) in [(0.1, 0.05), (-0.08, 0.1), (0.0, 0.0)] {
        let d = DeformationParams {
            t1: k1(t1),
            t2: k1(t2),
            ..Default::default()
        };
        let z = radial_series_z(
            &[-1.0],
            &d,
            1,
            &SeriesOptions {
                truncation: 6,
                tol: None,
            },
        )?;
        let direct = direct_z(&radial, &d, 1, &quad())?;
        errors.push((format!("t=({t1},{t2})"), relative_difference(z.value, direct.value)));
    }
    within(errors, 1e-6)
}

fn tau_normalisation() -> twomm::Result<Verdict> {
    let circle = MeasureSpec::circle(RSequence::Exponential { scale: 1.0 });
    let d = DeformationParams {
        t1: k1(0.1),
        t2: k1(0.07),
        tbar1: k1(0.05),
        tbar2: k1(-0.06),
        ..Default::default()
    };
    let a = tau_from_series(
        &circle,
        &d,
        1,
        &SeriesOptions {
            truncation: 14,
            tol: None,
        },
        &quad(),
    )?;
    let b = tau_from_andreief(&circle, &d, 1, &quad())?;
    within(vec![("circle N=1".into(), relative_difference(a, b))], 1e-8)
}

type Criterion = (&'static str, fn() -> twomm::Result<Verdict>, Duration);

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 8] = [
        (
            "1 gaussian cross-engine agreement",
            gaussian_cross_engine,
            Duration::from_secs(60),
        ),
        (
            "2 deformed double-series agreement",
            deformed_double_series,
            Duration::from_secs(300),
        ),
        (
            "3 quadruple-series agreement",
            quadruple_series,
            Duration::from_secs(300),
        ),
        (
            "4 fermionic oracle identities",
            fermionic_oracle,
            Duration::from_secs(600),
        ),
        (
            "5 symmetric-function identities",
            symmetric_functions,
            Duration::from_secs(300),
        ),
        (
            "6 character-coupling kernel",
            character_coupling,
            Duration::from_secs(30),
        ),
        (
            "7 radial normal-matrix reduction",
            radial_reduction,
            Duration::from_secs(60),
        ),
        (
            "8 tau normalisation consistency",
            tau_normalisation,
            Duration::from_secs(600),
        ),
    ];
    let mut failures = Vec::new();
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let verdict = run().unwrap_or_else(|e| Verdict {
            pass: false,
            detail: format!("error {}: {e}", e.tag()),
        });
        let elapsed = start.elapsed();
        let pass = verdict.pass && elapsed <= budget;
        println!(
            "criterion {name}: {} ({}; {:.2}s of {}s)",
            if pass { "PASS" } else { "FAIL" },
            verdict.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if !pass {
            failures.push(name);
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
