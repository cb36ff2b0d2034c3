//! Schur functions in times and in variables, and the Littlewood–Richardson rule.

use twomm::partitions::Partition;
use twomm::scalar::q;
use twomm::schur::{cauchy_truncated, power_sum_times, schur_bialternant, schur_in_times, schur_product, TimeSequence};

fn main() {
    let x = vec![q(1, 2), q(-1, 3), q(2, 1)];
    let t = power_sum_times(&x, 6, false).unwrap();
    for p in ["2+1", "3", "1+1+1", "3+2+1"] {
        let l: Partition = p.parse().unwrap();
        println!(
            "s_{l}: bialternant {} | Jacobi–Trudy {}",
            schur_bialternant(&l, &x).unwrap(),
            schur_in_times(&l, &t)
        );
    }
    let (lhs, rhs) = cauchy_truncated(
        &TimeSequence::new(vec![q(1, 3), q(1, 5)]),
        &TimeSequence::new(vec![q(2, 7), q(-1, 2)]),
        6,
    );
    println!("Cauchy kernel to weight 6: {lhs} = {rhs}");
    let prod = schur_product(&Partition::new(vec![2, 1]), &Partition::new(vec![2, 1]));
    println!("s_21 · s_21 =");
    print!("{}", prod.to_csv());
}
