//! Routing onto a line of qubits: swap counts and a statevector check through
//! the final wire permutation.

use mcu_qft::sample::random_u2;
use mcu_qft::synthesis::{synthesize, Method, SynthConfig};
use mcu_qft::transpile::{compile, native_metrics, Architecture};
use mcu_qft::verify::verify_mcu_sampled_permuted;

fn main() {
    let u = random_u2(8);
    for n in [5, 8, 11] {
        let c = synthesize(&SynthConfig::new(Method::McuMod, n, u)).unwrap();
        let fc = compile(&c, Architecture::Fc);
        let lnn = compile(&c, Architecture::Lnn);
        let lo = (1usize << (n - 1)) - 1;
        let inputs = [0, 1, lo, (1 << n) - 1, lo - 1];
        let dev = verify_mcu_sampled_permuted(&lnn.abstract_circuit, &u, &inputs, Some(&lnn.final_perm)).unwrap();
        println!(
            "n={n:2} swaps {:4}  native depth fc {:4} lnn {:5}  final perm {:?}  deviation {dev:.1e}",
            lnn.swaps,
            native_metrics(&fc.native).depth,
            native_metrics(&lnn.native).depth,
            lnn.final_perm
        );
    }
}
