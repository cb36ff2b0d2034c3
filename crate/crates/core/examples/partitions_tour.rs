//! Partitions, conjugates, Frobenius coordinates and shifted labels.

use twomm::partitions::{enumerate, Partition};

fn main() {
    let p: Partition = "4+2+1".parse().unwrap();
    println!("λ = {p}, |λ| = {}, ℓ(λ) = {}", p.weight(), p.len());
    println!("conjugate      {}", p.conjugate());
    println!("frobenius      {}", p.frobenius());
    println!("labels (N=4)   {:?}", p.shifted_labels(4).unwrap());
    println!("tilde (N=3)    {}", p.tilde(3).unwrap());
    println!("hook at (0,0)  {}", p.hook(0, 0));
    for d in 0..=6 {
        println!("partitions with |λ| ≤ {d}, ℓ ≤ 3: {}", enumerate(d, 3).count());
    }
}
