//! The QFT increment on its own: every basis state moves to the next one.

use mcu_qft::synthesis::build_increment;
use mcu_qft::verify::{apply_statevector, StateVector};

fn main() {
    let k = 3;
    let c = build_increment(k);
    for i in 0..1usize << k {
        let out = apply_statevector(&c, &StateVector::basis(k, i)).unwrap();
        let (j, amp) = out.amps.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap();
        println!("|{i:03b}> -> |{j:03b}>  |amp| {:.6}", amp.norm());
    }
}
