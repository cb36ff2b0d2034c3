//! τ-function normalisation by two routes, and a job run through the CLI layer.

use num_complex::Complex64;
use twomm::cli::{evaluate, JobConfig};
use twomm::engines::{tau_from_andreief, tau_from_series, SeriesOptions};
use twomm::measures::{DeformationParams, MeasureSpec, QuadratureSpec, RSequence};
use twomm::schur::TimeSequence;

fn main() -> twomm::Result<()> {
    let spec = MeasureSpec::circle(RSequence::Exponential { scale: 1.0 });
    let k1 = |x: f64| TimeSequence::single(1, Complex64::new(x, 0.0));
    let d = DeformationParams {
        t1: k1(0.1),
        t2: k1(0.07),
        tbar1: k1(0.05),
        tbar2: k1(-0.06),
        ..Default::default()
    };
    let quad = QuadratureSpec::default();
    for n in 1..=3 {
        let a = tau_from_series(
            &spec,
            &d,
            n,
            &SeriesOptions {
                truncation: 10,
                tol: None,
            },
            &quad,
        )?;
        let b = tau_from_andreief(&spec, &d, n, &quad)?;
        println!("N={n}: series route {a:.14}  determinant route {b:.14}");
    }
    let job = JobConfig::from_json(
        r#"{"measure": {"kind": "gaussian_coupled", "c": 0.5}, "engine": "double_series++", "N": 2, "d": 6,
            "deform": {"t1": [0.1], "t2": [0.05]}}"#,
    )?;
    let (z, _) = evaluate(&job)?;
    println!("{}", serde_json::to_string_pretty(&z).unwrap());
    Ok(())
}
