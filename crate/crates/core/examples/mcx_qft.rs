//! Multi-controlled X built from a QFT increment/decrement pair, before and
//! after merging the phase columns.

use mcu_qft::circuit::{count_gates, schedule_slots};
use mcu_qft::linalg::Unitary2;
use mcu_qft::synthesis::{synthesize, SynthConfig};
use mcu_qft::verify::verify_mcu;

fn main() {
    println!("{:>3} {:>10} {:>13} {:>8}", "n", "raw slots", "merged slots", "gates");
    for n in 3..=8 {
        let raw = synthesize(&SynthConfig::mcx(n).unoptimized()).unwrap();
        let merged = synthesize(&SynthConfig::mcx(n)).unwrap();
        let v = verify_mcu(&merged, &Unitary2::x(), 1e-9).unwrap();
        assert!(v.pass);
        println!(
            "{n:>3} {:>10} {:>13} {:>8}",
            schedule_slots(&raw).abstract_slots,
            schedule_slots(&merged).abstract_slots,
            count_gates(&merged).total()
        );
    }
}
