//! Every construction against a multi-controlled-U matrix built here from the
//! definition, independent of the library's own oracle.

use mcu_qft::circuit::Circuit;
use mcu_qft::linalg::{CMatrix, Unitary2};
use mcu_qft::sample::{random_batch, random_u2};
use mcu_qft::synthesis::{build_decrement, build_increment, synthesize, LadderSide, Method, SynthConfig};
use mcu_qft::verify::{apply_statevector, circuit_unitary, compare, StateVector};
use num_complex::Complex64;

/// Identity except on the two states with every control set, where the
/// target (the top bit) sees `u`.
fn reference(u: &Unitary2, n: usize) -> CMatrix {
    let dim = 1 << n;
    let mut m = CMatrix::identity(dim);
    let lo = (1 << (n - 1)) - 1;
    let hi = dim - 1;
    let e = u.entries();
    m.set(lo, lo, e[0]);
    m.set(lo, hi, e[1]);
    m.set(hi, lo, e[2]);
    m.set(hi, hi, e[3]);
    m
}

fn check(c: &Circuit, u: &Unitary2) {
    let v = compare(&circuit_unitary(c).unwrap(), &reference(u, c.n), 1e-9).unwrap();
    assert!(v.pass, "deviation {:.3e}", v.max_deviation);
}

#[test]
fn mcu_methods_match_reference() {
    for (k, u) in random_batch(31, 6).iter().enumerate() {
        for method in [Method::McuMod, Method::McuZyz, Method::Ldd] {
            for n in method.min_n()..=7 {
                let side = [LadderSide::Plus, LadderSide::Minus, LadderSide::Split][k % 3];
                check(&synthesize(&SynthConfig::new(method, n, *u).with_ladder(side)).unwrap(), u);
            }
        }
    }
}

#[test]
fn mcx_raw_and_merged_match_reference() {
    for n in 2..=8 {
        check(&synthesize(&SynthConfig::mcx(n)).unwrap(), &Unitary2::x());
        check(&synthesize(&SynthConfig::mcx(n).unoptimized()).unwrap(), &Unitary2::x());
    }
}

#[test]
fn named_targets() {
    for u in [Unitary2::x(), Unitary2::y(), Unitary2::z(), Unitary2::h(), Unitary2::s(), Unitary2::t(), Unitary2::sx()]
    {
        for method in [Method::McuMod, Method::McuZyz, Method::Ldd] {
            check(&synthesize(&SynthConfig::new(method, 5, u)).unwrap(), &u);
        }
    }
}

#[test]
fn global_phase_of_u_is_kept() {
    let u = Unitary2::identity().with_phase(0.7);
    for method in [Method::McuMod, Method::McuZyz, Method::Ldd] {
        check(&synthesize(&SynthConfig::new(method, 4, u)).unwrap(), &u);
    }
}

#[test]
fn increment_walks_the_basis() {
    // |101> -> |110>, reading wire 1 as the low bit
    let c = build_increment(3);
    let out = apply_statevector(&c, &StateVector::basis(3, 0b101)).unwrap();
    assert!((out.amps[0b110].norm() - 1.0).abs() < 1e-12);
    for k in 2..=5 {
        let inc = circuit_unitary(&build_increment(k)).unwrap();
        let dec = circuit_unitary(&build_decrement(k)).unwrap();
        let dim = 1 << k;
        for i in 0..dim {
            assert!((inc.get((i + 1) % dim, i).norm() - 1.0).abs() < 1e-12);
            assert!((dec.get((i + dim - 1) % dim, i).norm() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn twelve_qubits_by_statevector() {
    let n = 12;
    let u = random_u2(12);
    let e = u.entries();
    let lo = (1 << (n - 1)) - 1;
    let hi = (1 << n) - 1;
    for method in [Method::McuMod, Method::McuZyz, Method::Ldd] {
        let c = synthesize(&SynthConfig::new(method, n, u)).unwrap();
        // the global phase is fixed by an untouched input
        let probe = apply_statevector(&c, &StateVector::basis(n, 5)).unwrap();
        let phase = probe.amps[5] / probe.amps[5].norm();
        let expect = |idx: usize| -> Vec<(usize, Complex64)> {
            match idx {
                i if i == lo => vec![(lo, e[0]), (hi, e[2])],
                i if i == hi => vec![(lo, e[1]), (hi, e[3])],
                i => vec![(i, Complex64::new(1.0, 0.0))],
            }
        };
        for idx in [0, 1, 77, lo - 1, lo, hi - 1, hi] {
            let out = apply_statevector(&c, &StateVector::basis(n, idx)).unwrap();
            for (j, a) in expect(idx) {
                assert!((out.amps[j] - phase * a).norm() < 1e-9, "{method} input {idx} amp {j}");
            }
            assert!((out.norm() - 1.0).abs() < 1e-10);
        }
    }
}
