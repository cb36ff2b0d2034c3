//! Character expansion of a determinantal coupling kernel.

use twomm::engines::coupling_kernel_check;
use twomm::measures::RSequence;

fn main() -> twomm::Result<()> {
    let (x, y) = ([0.3, 0.1], [0.2, -0.1]);
    let iz = RSequence::Exponential { scale: 1.0 };
    for d in [2, 4, 8, 12] {
        let k = coupling_kernel_check(&iz, &x, &y, d)?;
        println!(
            "r(j)=1/j d={d:>2}: series {:.15} kernel {:.15} residual {:.1e}",
            k.series, k.kernel, k.residual
        );
    }
    // z(j - 2)/j for N = 2: contents ≥ 2 vanish, so the kernel is constant
    let flat = RSequence::Pochhammer { z: 0.7, shift: -2.0 };
    for (x, y) in [([0.3, 0.1], [0.2, -0.1]), ([0.9, -0.5], [0.4, 0.6])] {
        let k = coupling_kernel_check(&flat, &x, &y, 6)?;
        println!("decoupled x={x:?} y={y:?}: kernel {:.15}", k.kernel);
    }
    Ok(())
}
