//! Planar radial measure: series over the diagonal terms against polar quadrature.

use num_complex::Complex64;
use twomm::engines::{direct_z, radial_series_z, SeriesOptions};
use twomm::measures::{DeformationParams, MeasureSpec, QuadratureSpec};
use twomm::schur::TimeSequence;

fn main() -> twomm::Result<()> {
    let potential = vec![-1.0];
    let spec = MeasureSpec::RadialPlanar {
        potential: potential.clone(),
    };
    let quad = QuadratureSpec::default();
    for (t1, t2, n, m) in [(0.1, 0.05, 0, 0), (0.1, 0.08, 1, 0), (-0.05, 0.1, 0, 1)] {
        let d = DeformationParams {
            t1: TimeSequence::single(1, Complex64::new(t1, 0.0)),
            t2: TimeSequence::single(1, Complex64::new(t2, 0.0)),
            n,
            m,
            ..Default::default()
        };
        let series = radial_series_z(
            &potential,
            &d,
            1,
            &SeriesOptions {
                truncation: 6,
                tol: None,
            },
        )?;
        let direct = direct_z(&spec, &d, 1, &quad)?;
        println!(
            "t=({t1},{t2}) n={n} m={m}: series {:.14} direct {:.14}",
            series.value.re, direct.value.re
        );
    }
    Ok(())
}
