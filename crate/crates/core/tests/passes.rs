//! Rewrite passes keep the unitary (up to their reported phase) and are
//! idempotent.

use mcu_qft::linalg::cis;
use mcu_qft::optimizer::{self, run_pass, structurally_equal, OptError, PASS_NAMES};
use mcu_qft::sample::random_u2;
use mcu_qft::synthesis::{synthesize, Method, SynthConfig};
use mcu_qft::verify::circuit_unitary;

#[test]
fn every_pass_on_every_method() {
    let u = random_u2(21);
    for n in 3..=7 {
        let mut inputs = vec![synthesize(&SynthConfig::mcx(n).unoptimized()).unwrap()];
        for m in [Method::McuMod, Method::McuZyz, Method::Ldd] {
            inputs.push(synthesize(&SynthConfig::new(m, n, u).unoptimized()).unwrap());
        }
        for c in &inputs {
            let before = circuit_unitary(c).unwrap();
            for pass in PASS_NAMES {
                let (out, rep) = run_pass(pass, c).unwrap();
                if rep.refused {
                    assert_eq!(&out, c);
                    continue;
                }
                let after = circuit_unitary(&out).unwrap().scale(cis(rep.phase_shift));
                assert!(before.max_abs_diff(&after) < 1e-9, "{pass} n={n}");
                assert_eq!(run_pass(pass, &out).unwrap().0.gates, out.gates, "{pass} not idempotent");
            }
        }
    }
}

#[test]
fn merge_turns_raw_mcx_into_merged() {
    for n in 3..=9 {
        let raw = synthesize(&SynthConfig::mcx(n).unoptimized()).unwrap();
        let merged = synthesize(&SynthConfig::mcx(n)).unwrap();
        let (out, rep) = run_pass("merge_phase_columns", &raw).unwrap();
        assert_eq!(rep.slots_before - rep.slots_after, 8);
        assert!(structurally_equal(&out, &merged, 1e-12), "n={n}");
    }
}

#[test]
fn ldd_returns_to_crz_form() {
    let u = random_u2(22);
    for n in 3..=9 {
        let ldd = synthesize(&SynthConfig::new(Method::Ldd, n, u)).unwrap();
        let (back, rep) = optimizer::ldd_to_qft(&ldd);
        assert!(!rep.refused);
        let reference = optimizer::cp_to_crz(&synthesize(&SynthConfig::new(Method::McuMod, n, u)).unwrap()).0;
        assert!(structurally_equal(&back, &reference, 1e-12), "n={n}");
    }
}

#[test]
fn unknown_pass_is_an_error() {
    let c = synthesize(&SynthConfig::mcx(3)).unwrap();
    assert!(matches!(run_pass("fold_everything", &c), Err(OptError::UnknownPass(_))));
}
