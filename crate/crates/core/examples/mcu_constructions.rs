//! The three multi-controlled-U constructions side by side on one random gate.

use mcu_qft::circuit::{count_gates, schedule_slots};
use mcu_qft::sample::random_u2;
use mcu_qft::synthesis::{synthesize, Method, SynthConfig};
use mcu_qft::verify::verify_mcu;

fn main() {
    let u = random_u2(42);
    let n = 6;
    for method in [Method::McuMod, Method::McuZyz, Method::Ldd] {
        let c = synthesize(&SynthConfig::new(method, n, u)).unwrap();
        let v = verify_mcu(&c, &u, 1e-9).unwrap();
        let k = count_gates(&c);
        println!(
            "{method:8} slots {:3}  h {:3} cp {:3} cu2 {:2} crx {:3} cx {}  deviation {:.1e}",
            schedule_slots(&c).abstract_slots,
            k.h,
            k.cp,
            k.cu2,
            k.crx,
            k.cx,
            v.max_deviation
        );
    }
}
