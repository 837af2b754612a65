//! Runs every rewrite pass on a few circuits and reports what changed.

use mcu_qft::optimizer::{run_pass, PASS_NAMES};
use mcu_qft::sample::random_u2;
use mcu_qft::synthesis::{synthesize, Method, SynthConfig};

fn main() {
    let u = random_u2(1);
    let inputs = [
        ("mcx raw", synthesize(&SynthConfig::mcx(6).unoptimized()).unwrap()),
        ("mcu-mod", synthesize(&SynthConfig::new(Method::McuMod, 6, u)).unwrap()),
        ("ldd", synthesize(&SynthConfig::new(Method::Ldd, 6, u)).unwrap()),
    ];
    for (label, c) in &inputs {
        println!("{label}:");
        for pass in PASS_NAMES {
            let (_, r) = run_pass(pass, c).unwrap();
            if r.refused {
                println!("  {pass:20} refused");
            } else {
                println!(
                    "  {pass:20} gates {:4} -> {:4}  slots {:3} -> {:3}",
                    r.gates_before, r.gates_after, r.slots_before, r.slots_after
                );
            }
        }
    }
}
