//! The four double-Schur expansions and the quadruple expansion on a circle
//! measure, against the deformed determinant.

use num_complex::Complex64;
use twomm::engines::{andreief_for, double_series_z, quadruple_series_z, SeriesOptions};
use twomm::fermion::Variant;
use twomm::measures::{DeformationParams, MeasureSpec, QuadratureSpec, RSequence};
use twomm::schur::TimeSequence;

fn main() -> twomm::Result<()> {
    let spec = MeasureSpec::circle(RSequence::Exponential { scale: 1.0 });
    let k1 = |x: f64| TimeSequence::single(1, Complex64::new(x, 0.0));
    let d = DeformationParams {
        t1: k1(0.1),
        t2: k1(0.05),
        tbar1: k1(0.05),
        tbar2: k1(-0.04),
        n: 1,
        m: 0,
    };
    let quad = QuadratureSpec::default();
    let opts = SeriesOptions {
        truncation: 8,
        tol: None,
    };
    for n in 1..=3 {
        let reference = andreief_for(&spec, &d, n, &quad)?.value;
        println!("N={n} determinant {reference:.12}");
        for v in Variant::ALL {
            let (z, table) = double_series_z(v, &spec, &d, n, &opts, &quad)?;
            println!(
                "  {:<16} {:.12}  terms {:>5}  outer shell {:.1e}",
                z.engine,
                z.value,
                table.series.len(),
                z.error_estimate.unwrap()
            );
        }
        let (z, _) = quadruple_series_z(
            &spec,
            &d,
            n,
            &SeriesOptions {
                truncation: 4,
                tol: None,
            },
            &quad,
        )?;
        println!(
            "  {:<16} {:.12}  outer shell {:.1e}",
            z.engine,
            z.value,
            z.error_estimate.unwrap()
        );
    }
    Ok(())
}
