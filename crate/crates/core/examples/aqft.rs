//! Approximate QFT: dropping the smallest controlled roots trades accuracy for
//! gates.

use mcu_qft::circuit::count_gates;
use mcu_qft::sample::random_u2;
use mcu_qft::synthesis::{synthesize, Method, SynthConfig};
use mcu_qft::verify::circuit_unitary;

fn main() {
    let n = 8;
    let u = random_u2(12);
    let cfg = SynthConfig::new(Method::McuMod, n, u);
    let exact = circuit_unitary(&synthesize(&cfg).unwrap()).unwrap();
    for m in 1..=n as u32 {
        let c = synthesize(&cfg.with_aqft(m)).unwrap();
        let k = count_gates(&c);
        let err = circuit_unitary(&c).unwrap().max_abs_diff(&exact);
        println!("cutoff {m}: cp {:3} cu2 {:2} max error {err:.3e}", k.cp, k.cu2);
    }
}
