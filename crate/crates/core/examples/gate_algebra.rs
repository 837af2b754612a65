//! Single-qubit algebra: ZYZ angles, the ABC triple and principal roots.

use mcu_qft::algebra::{abc_decompose, identity_battery, root, zyz_decompose};
use mcu_qft::linalg::Unitary2;
use mcu_qft::sample::random_u2;

fn main() {
    let u = random_u2(3);
    let z = zyz_decompose(&u);
    println!("zyz: delta {:.4} alpha {:.4} theta {:.4} beta {:.4}", z.delta, z.alpha, z.theta, z.beta);
    println!("rebuilt error {:.2e}", z.reconstruct().max_abs_diff(&u));

    let (delta, t) = abc_decompose(&u);
    let abc = t.a.mul(&t.b).mul(&t.c);
    let axbxc = t.a.mul(&Unitary2::x()).mul(&t.b).mul(&Unitary2::x()).mul(&t.c).with_phase(delta);
    println!(
        "ABC = I error {:.2e}, e^(i delta) AXBXC = U error {:.2e}",
        abc.max_abs_diff(&Unitary2::identity()),
        axbxc.max_abs_diff(&u)
    );

    for m in 1..=5 {
        let r = root(&u, m);
        println!("root m={m}: r^{} error {:.2e}", 1 << (m - 1), r.pow(1 << (m - 1)).max_abs_diff(&u));
    }

    for (name, dev) in identity_battery() {
        println!("{name}: {dev:.2e}");
    }
}
