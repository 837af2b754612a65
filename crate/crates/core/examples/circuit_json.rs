//! Circuits serialise to a small JSON form and read back unchanged.

use mcu_qft::circuit::Circuit;
use mcu_qft::linalg::Unitary2;
use mcu_qft::synthesis::{synthesize, Method, SynthConfig};

fn main() {
    let c = synthesize(&SynthConfig::new(Method::McuMod, 3, Unitary2::h())).unwrap();
    let json = c.to_json();
    println!("{json}");
    let back = Circuit::from_json(&json).unwrap();
    assert_eq!(back.gates.len(), c.gates.len());
    eprintln!("round trip ok: {} gates on {} wires", back.len(), back.n);
}
