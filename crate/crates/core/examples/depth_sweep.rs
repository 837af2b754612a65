//! Native depth against the closed forms, as a CSV on stdout.

use mcu_qft::sample::random_u2;
use mcu_qft::synthesis::{Method, SynthConfig};
use mcu_qft::transpile::{measure, Architecture, CSV_COLUMNS};

fn main() {
    let u = random_u2(0);
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record(CSV_COLUMNS).unwrap();
    for n in 4..=12 {
        for method in [Method::McuMod, Method::McuZyz, Method::Ldd] {
            for arch in [Architecture::Fc, Architecture::Lnn] {
                let r = measure(&SynthConfig::new(method, n, u), arch).unwrap();
                w.write_record(r.csv_record()).unwrap();
            }
        }
    }
    w.flush().unwrap();
}
