//! Ground truth: the MCU oracle matrix, dense circuit unitaries and a
//! statevector simulator for widths past the dense cap.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::linalg::{cis, equal_up_to_global_phase, CMatrix, LinalgError, Unitary2};

/// Widest circuit we build a dense unitary for.
pub const UNITARY_WIDTH_CAP: usize = 12;
/// Widest statevector we simulate.
pub const STATE_WIDTH_CAP: usize = 22;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("width {n} exceeds the dense cap of {cap}; use statevector checks instead")]
    TooWide { n: usize, cap: usize },
    #[error("width mismatch: circuit {circuit}, state {state}")]
    WidthMismatch { circuit: usize, state: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Identity except on `|0 1..1>` and `|1 1..1>`, where `u` acts on wire `n`.
pub fn mcu_oracle(u: &Unitary2, n: usize) -> CMatrix {
    assert!(n >= 2, "need at least one control");
    let dim = 1usize << n;
    let mut m = CMatrix::identity(dim);
    let lo = (1usize << (n - 1)) - 1;
    let hi = dim - 1;
    let e = u.entries();
    m.set(lo, lo, e[0]);
    m.set(lo, hi, e[1]);
    m.set(hi, lo, e[2]);
    m.set(hi, hi, e[3]);
    m
}

/// Applies one gate to every length-`row_len` row of `data`, treating row
/// index as the basis index. `row_len == 1` is a statevector; `row_len == dim`
/// left-multiplies a row-major matrix.
fn apply_rows(data: &mut [C64], row_len: usize, g: &Gate) {
    let tb = 1usize << (g.target - 1);
    let rows = data.len() / row_len;
    if let GateKind::Swap = g.kind {
        let ob = 1usize << (g.control.expect("swap operand") - 1);
        for i in 0..rows {
            if i & tb != 0 && i & ob == 0 {
                let j = (i & !tb) | ob;
                let (lo, hi) = (i.min(j), i.max(j));
                let (a, b) = data.split_at_mut(hi * row_len);
                a[lo * row_len..(lo + 1) * row_len].swap_with_slice(&mut b[..row_len]);
            }
        }
        return;
    }
    let u = g.kind.target_matrix().expect("single-qubit part").entries();
    let cb = g.control.map(|c| 1usize << (c - 1)).unwrap_or(0);
    let diag = u[1].norm_sqr() == 0.0 && u[2].norm_sqr() == 0.0;
    for i in 0..rows {
        if i & tb != 0 || i & cb != cb {
            continue;
        }
        let j = i | tb;
        let (a, b) = data.split_at_mut(j * row_len);
        let r0 = &mut a[i * row_len..(i + 1) * row_len];
        let r1 = &mut b[..row_len];
        if diag {
            if u[0] != C64::new(1.0, 0.0) {
                r0.iter_mut().for_each(|x| *x *= u[0]);
            }
            r1.iter_mut().for_each(|x| *x *= u[3]);
        } else {
            for (x, y) in r0.iter_mut().zip(r1.iter_mut()) {
                let (p, q) = (*x, *y);
                *x = u[0] * p + u[1] * q;
                *y = u[2] * p + u[3] * q;
            }
        }
    }
}

pub fn circuit_unitary(c: &Circuit) -> Result<CMatrix, VerifyError> {
    circuit_unitary_capped(c, UNITARY_WIDTH_CAP)
}

pub fn circuit_unitary_capped(c: &Circuit, cap: usize) -> Result<CMatrix, VerifyError> {
    if c.n > cap {
        return Err(VerifyError::TooWide { n: c.n, cap });
    }
    let dim = 1usize << c.n;
    let mut m = CMatrix::identity(dim);
    for g in &c.gates {
        apply_rows(m.data_mut(), dim, g);
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub n: usize,
    pub amps: Vec<C64>,
}

impl StateVector {
    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        StateVector { n, amps }
    }

    /// Basis state from wire values, `bits[w-1]` is wire `w`.
    pub fn from_bits(bits: &[u8]) -> Self {
        let idx = bits.iter().enumerate().map(|(w, &b)| (b as usize & 1) << w).sum();
        Self::basis(bits.len(), idx)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max_k |a_k - e^{i phi} b_k|` minimized over the phase read from the
    /// largest entry of `other`.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> f64 {
        let (k, bk) = other.amps.iter().enumerate().max_by(|x, y| x.1.norm().total_cmp(&y.1.norm())).expect("nonempty");
        let w = if self.amps[k].norm() > 0.0 { cis((self.amps[k] / bk).arg()) } else { C64::new(1.0, 0.0) };
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - w * b).norm()).fold(0.0, f64::max)
    }
}

pub fn apply_statevector(c: &Circuit, s: &StateVector) -> Result<StateVector, VerifyError> {
    if c.n != s.n {
        return Err(VerifyError::WidthMismatch { circuit: c.n, state: s.n });
    }
    if c.n > STATE_WIDTH_CAP {
        return Err(VerifyError::TooWide { n: c.n, cap: STATE_WIDTH_CAP });
    }
    let mut out = s.clone();
    for g in &c.gates {
        apply_rows(&mut out.amps, 1, g);
    }
    Ok(out)
}

/// Relabels rows so that physical wire `perm[l-1]` is read back as logical
/// wire `l` (`perm` is 1-based).
pub fn unpermute_rows(m: &CMatrix, perm: &[usize]) -> CMatrix {
    let n = perm.len();
    let dim = 1usize << n;
    let mut out = CMatrix::zeros(dim, m.cols());
    for phys in 0..dim {
        let mut logical = 0usize;
        for (l, &p) in perm.iter().enumerate() {
            if phys & (1 << (p - 1)) != 0 {
                logical |= 1 << l;
            }
        }
        for j in 0..m.cols() {
            out.set(logical, j, m.get(phys, j));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub pass: bool,
    /// `min over phase of ||U - e^{i phi} oracle||_max`, phase from the
    /// largest oracle entry.
    pub max_deviation: f64,
    pub global_phase: f64,
}

pub fn compare(actual: &CMatrix, oracle: &CMatrix, tol: f64) -> Result<Verdict, VerifyError> {
    let phase = equal_up_to_global_phase(actual, oracle, f64::INFINITY)?.unwrap_or(0.0);
    let dev = actual.max_abs_diff(&oracle.scale(cis(phase)));
    Ok(Verdict { pass: dev <= tol, max_deviation: dev, global_phase: phase })
}

/// Dense check of `c` against the MCU oracle for `u`.
pub fn verify_mcu(c: &Circuit, u: &Unitary2, tol: f64) -> Result<Verdict, VerifyError> {
    compare(&circuit_unitary(c)?, &mcu_oracle(u, c.n), tol)
}

/// Moves the amplitude of each physical basis state to the logical index it
/// encodes, with `perm` as in [`unpermute_rows`].
pub fn unpermute_state(s: &StateVector, perm: &[usize]) -> StateVector {
    let m = CMatrix::from_vec(s.amps.len(), 1, s.amps.clone());
    StateVector { n: s.n, amps: unpermute_rows(&m, perm).data().to_vec() }
}

/// Statevector check of `c` against the MCU oracle on the given basis inputs,
/// fanned out over threads. One global phase, read from the first input, is
/// shared by all of them.
pub fn verify_mcu_sampled(c: &Circuit, u: &Unitary2, inputs: &[usize]) -> Result<f64, VerifyError> {
    verify_mcu_sampled_permuted(c, u, inputs, None)
}

/// As [`verify_mcu_sampled`], reading outputs through a final wire
/// permutation (a routed circuit).
pub fn verify_mcu_sampled_permuted(
    c: &Circuit,
    u: &Unitary2,
    inputs: &[usize],
    perm: Option<&[usize]>,
) -> Result<f64, VerifyError> {
    let n = c.n;
    let e = u.entries();
    let lo = (1usize << (n - 1)) - 1;
    let hi = (1usize << n) - 1;
    let expected = |idx: usize| {
        let mut s = StateVector::basis(n, idx);
        if idx == lo || idx == hi {
            let col = usize::from(idx == hi);
            s.amps[idx] = C64::new(0.0, 0.0);
            s.amps[lo] = e[col];
            s.amps[hi] = e[2 + col];
        }
        s
    };
    let outs: Result<Vec<StateVector>, VerifyError> = inputs
        .par_iter()
        .map(|&idx| {
            let out = apply_statevector(c, &StateVector::basis(n, idx))?;
            Ok(match perm {
                Some(p) => unpermute_state(&out, p),
                None => out,
            })
        })
        .collect();
    let outs = outs?;
    let Some(first) = outs.first() else { return Ok(0.0) };
    let exp0 = expected(inputs[0]);
    let k = (0..exp0.amps.len()).max_by(|&a, &b| exp0.amps[a].norm().total_cmp(&exp0.amps[b].norm())).unwrap();
    let w = cis((first.amps[k] / exp0.amps[k]).arg());
    Ok(outs
        .iter()
        .zip(inputs)
        .map(|(o, &idx)| {
            let x = expected(idx);
            o.amps.iter().zip(&x.amps).map(|(a, b)| (a - w * b).norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;

    #[test]
    fn oracle_x_n2_is_cx() {
        let m = mcu_oracle(&Unitary2::x(), 2);
        let mut c = Circuit::new(2);
        c.push(Gate::cx(1, 2));
        assert_eq!(circuit_unitary(&c).unwrap(), m);
    }

    #[test]
    fn oracle_x_n3_swaps_3_and_7() {
        let m = mcu_oracle(&Unitary2::x(), 3);
        for i in 0..8 {
            for j in 0..8 {
                let swapped = |k: usize| match k {
                    3 => 7,
                    7 => 3,
                    k => k,
                };
                let v = if swapped(i) == j { 1.0 } else { 0.0 };
                assert_eq!(m.get(i, j), C64::new(v, 0.0));
            }
        }
    }

    #[test]
    fn oracle_identity() {
        assert_eq!(mcu_oracle(&Unitary2::identity(), 4), CMatrix::identity(16));
    }

    #[test]
    fn empty_circuit_is_identity() {
        assert_eq!(circuit_unitary(&Circuit::new(3)).unwrap(), CMatrix::identity(8));
    }

    #[test]
    fn wire_one_is_least_significant() {
        let mut c = Circuit::new(2);
        c.push(Gate::h(1));
        let expect = kron(&CMatrix::identity(2), &Unitary2::h().to_cmatrix()).unwrap();
        assert!(circuit_unitary(&c).unwrap().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn swap_exchanges_wires() {
        let mut c = Circuit::new(3);
        c.push(Gate::swap(1, 3));
        let out = apply_statevector(&c, &StateVector::from_bits(&[1, 0, 0])).unwrap();
        assert_eq!(out, StateVector::from_bits(&[0, 0, 1]));
    }

    #[test]
    fn width_checks() {
        assert!(matches!(circuit_unitary(&Circuit::new(13)), Err(VerifyError::TooWide { .. })));
        assert!(matches!(
            apply_statevector(&Circuit::new(3), &StateVector::basis(2, 0)),
            Err(VerifyError::WidthMismatch { .. })
        ));
    }

    #[test]
    fn unpermute_inverts_swap() {
        let mut c = Circuit::new(3);
        c.push(Gate::swap(1, 2));
        let m = circuit_unitary(&c).unwrap();
        // after the swap logical 1 lives on physical 2 and vice versa
        let back = unpermute_rows(&m, &[2, 1, 3]);
        assert!(back.max_abs_diff(&CMatrix::identity(8)) < 1e-15);
    }
}
