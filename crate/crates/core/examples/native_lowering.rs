//! Lowers to {Rz, SX, X, CX} and checks the result keeps the unitary up to the
//! tracked global phase.

use mcu_qft::linalg::cis;
use mcu_qft::sample::random_u2;
use mcu_qft::synthesis::{synthesize, Method, SynthConfig};
use mcu_qft::transpile::{lower_to_ngs, native_metrics};
use mcu_qft::verify::circuit_unitary;

fn main() {
    let u = random_u2(5);
    for method in [Method::McuMod, Method::McuZyz, Method::Ldd] {
        let c = synthesize(&SynthConfig::new(method, 5, u)).unwrap();
        let nc = lower_to_ngs(&c);
        assert!(nc.is_native());
        let m = native_metrics(&nc);
        let err = circuit_unitary(&nc.circuit)
            .unwrap()
            .scale(cis(nc.global_phase))
            .max_abs_diff(&circuit_unitary(&c).unwrap());
        println!(
            "{method:8} depth {:4} cx {:4} rz {:4} sx {:3} x {:2}  phase {:+.4}  error {err:.1e}",
            m.depth, m.cx, m.rz, m.sx, m.x, nc.global_phase
        );
    }
}
