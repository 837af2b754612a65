//! Beyond dense-unitary sizes: statevector checks on selected basis inputs,
//! including the two states the target gate mixes.

use mcu_qft::sample::random_u2;
use mcu_qft::synthesis::{synthesize, Method, SynthConfig};
use mcu_qft::verify::verify_mcu_sampled;

fn main() {
    let u = random_u2(77);
    for n in [12, 14, 16] {
        let c = synthesize(&SynthConfig::new(Method::McuZyz, n, u)).unwrap();
        let lo = (1usize << (n - 1)) - 1;
        let hi = (1usize << n) - 1;
        let inputs = [lo, hi, 0, 1, lo - 1, hi - 1, 12345 % hi];
        let dev = verify_mcu_sampled(&c, &u, &inputs).unwrap();
        println!("n={n}: {} gates, worst deviation {dev:.2e}", c.len());
    }
}
