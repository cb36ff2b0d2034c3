//! Z_N for the coupled gaussian by quadrature, permutations, the determinant
//! and exact rationals.

use twomm::engines::{andreief_z, direct_z, exact_z, permutation_z};
use twomm::measures::{bimoment_window, exact_window, DeformationParams, MeasureSpec, QuadratureSpec, Rect};

fn main() -> twomm::Result<()> {
    let g = MeasureSpec::gaussian(0.5);
    let none = DeformationParams::none();
    let quad = QuadratureSpec::default();
    let w = bimoment_window(&g, Rect::square(0, 3), &none, &quad)?;
    let exact = exact_window(&g, Rect::square(0, 3))?;
    for n in 1..=4 {
        let direct = if n <= 2 {
            format!("{:.15e}", direct_z(&g, &none, n, &quad)?.value.re)
        } else {
            "-".into()
        };
        let e = exact_z("andreief", &exact, n, 0, 0)?.exact.unwrap();
        println!(
            "N={n}: direct {direct}  permutation {:.15e}  determinant {:.15e}  exact ({})^{}·{}",
            permutation_z(&w, n, 0, 0)?.value.re,
            andreief_z(&w, n, 0, 0)?.value.re,
            e.prefactor,
            e.power,
            e.rational
        );
    }
    Ok(())
}
