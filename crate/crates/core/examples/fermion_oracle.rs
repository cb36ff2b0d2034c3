//! Vacuum expectation values in the Fock-space model against Schur products.

use twomm::fermion::{schur_product_vev, single_component_check, vandermonde_closed_form, vandermonde_vev, Variant};
use twomm::partitions::Partition;
use twomm::scalar::q;

fn main() {
    let l = Partition::new(vec![2, 1]);
    let m = Partition::new(vec![1]);
    for which in 1..=4 {
        let c = single_component_check(which, &l, 2).unwrap();
        println!(
            "{}: {} [{}]",
            c.label,
            c.oracle,
            if c.holds() { "ok" } else { "MISMATCH" }
        );
    }
    for v in Variant::ALL {
        let c = schur_product_vev(v, 2, &l, &m).unwrap();
        println!(
            "{}: {} [{}]",
            c.label,
            c.oracle,
            if c.holds() { "ok" } else { "MISMATCH" }
        );
    }
    let (x, y) = (vec![q(1, 2), q(3, 1)], vec![q(-2, 5), q(1, 7)]);
    println!(
        "charged-vacuum vev, N=2, n=1, m=2: {} (closed form {})",
        vandermonde_vev(&x, &y, 1, 2).unwrap(),
        vandermonde_closed_form(&x, &y, 1, 2)
    );
}
