//! Rewrite passes over annotated circuits.
//!
//! Every pass returns the new circuit and a [`PassReport`]. The reported
//! `phase_shift` satisfies `U_before = e^{i phase_shift} U_after`; all the
//! rewrites here happen to be exact, so it stays zero, but callers should not
//! rely on that.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{schedule_slots, Block, Circuit, Gate, GateKind, MINUS_BLOCK, PLUS_BLOCK};
use crate::linalg::{wrap_angle, Unitary2};
use crate::synthesis::LadderSide;

const ANGLE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PassReport {
    pub pass: String,
    pub gates_before: usize,
    pub gates_after: usize,
    pub slots_before: usize,
    pub slots_after: usize,
    pub phase_shift: f64,
    /// Set when the input did not have the shape the pass needs; the circuit
    /// is then returned unchanged.
    pub refused: bool,
}

impl PassReport {
    fn new(pass: &str, before: &Circuit, after: &Circuit, refused: bool) -> Self {
        PassReport {
            pass: pass.to_string(),
            gates_before: before.len(),
            gates_after: after.len(),
            slots_before: schedule_slots(before).abstract_slots,
            slots_after: schedule_slots(after).abstract_slots,
            phase_shift: 0.0,
            refused,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum OptError {
    #[error("unknown pass `{0}`")]
    UnknownPass(String),
}

/// Replaces each gate by zero or more gates, carrying block spans along.
pub fn rewrite(c: &Circuit, mut f: impl FnMut(usize, &Gate) -> Vec<Gate>) -> Circuit {
    let mut gates = Vec::with_capacity(c.len());
    let mut offsets = Vec::with_capacity(c.len() + 1);
    for (i, g) in c.gates.iter().enumerate() {
        offsets.push(gates.len());
        gates.extend(f(i, g));
    }
    offsets.push(gates.len());
    let blocks = c.blocks.iter().map(|b| Block { start: offsets[b.start], end: offsets[b.end], ..b.clone() }).collect();
    Circuit { n: c.n, gates, blocks }
}

/// Inserts `gs` at sequence position `at`, outside any block that starts or
/// ends there.
pub fn insert_gates(c: &Circuit, at: usize, gs: &[Gate]) -> Circuit {
    let mut out = c.clone();
    out.gates.splice(at..at, gs.iter().copied());
    for b in &mut out.blocks {
        if b.start >= at {
            b.start += gs.len();
        }
        if b.end > at {
            b.end += gs.len();
        }
    }
    out
}

fn prev_on_wire(gs: &[Option<Gate>], i: usize, w: usize) -> Option<usize> {
    (0..i).rev().find(|&j| gs[j].is_some_and(|g| g.touches(w)))
}

fn next_on_wire(gs: &[Option<Gate>], i: usize, w: usize) -> Option<usize> {
    (i + 1..gs.len()).find(|&j| gs[j].is_some_and(|g| g.touches(w)))
}

fn from_slots(c: &Circuit, slots: &[Option<Gate>]) -> Circuit {
    rewrite(c, |i, _| slots[i].into_iter().collect())
}

fn is_pi(g: f64) -> bool {
    (g.abs() - PI).abs() < ANGLE_TOL
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < ANGLE_TOL
}

fn controlled_from_one(g: &Gate, t: usize) -> bool {
    g.control == Some(1) && g.target == t && matches!(g.kind, GateKind::CP(_) | GateKind::CU2(_))
}

/// Merges one wire's column gate with the C(1)-t gates on either side of it.
fn merge_wire(slots: &mut [Option<Gate>], b: &Block, t: usize, sign: f64, flip: usize) -> bool {
    let cols: Vec<usize> = (b.start..b.end)
        .filter(|&j| {
            slots[j].is_some_and(|g| {
                g.target == t && g.control.is_none() && matches!(g.kind, GateKind::P(_) | GateKind::U2(_))
            })
        })
        .collect();
    let [ci] = cols[..] else { return false };
    let (Some(bi), Some(ai)) = (prev_on_wire(slots, ci, t), next_on_wire(slots, ci, t)) else { return false };
    if bi < b.start || ai >= b.end || !(bi < flip && flip < ai) {
        return false;
    }
    let (before, col, after) = (slots[bi].unwrap(), slots[ci].unwrap(), slots[ai].unwrap());
    if !controlled_from_one(&before, t) || !controlled_from_one(&after, t) {
        return false;
    }
    let root = before.root_index().map(|m| m.saturating_sub(1).max(1));
    let merged_kind = match (before.kind, col.kind, after.kind) {
        (GateKind::CP(gb), GateKind::P(gc), GateKind::CP(ga)) => {
            let ok = if sign > 0.0 { close(gc, gb) && close(ga, -gb) } else { close(gc, -gb) && close(ga, -gb) };
            if !ok {
                return false;
            }
            GateKind::CP(if sign > 0.0 { 2.0 * gb } else { 2.0 * ga })
        }
        (GateKind::CU2(vb), GateKind::U2(vc), GateKind::CU2(va)) => {
            let tol = 1e-10;
            let ok = if sign > 0.0 {
                vc.max_abs_diff(&vb) < tol && va.max_abs_diff(&vb.adjoint()) < tol
            } else {
                vc.max_abs_diff(&vb.adjoint()) < tol && va.max_abs_diff(&vb.adjoint()) < tol
            };
            if !ok {
                return false;
            }
            GateKind::CU2(if sign > 0.0 { vb.mul(&vb) } else { va.mul(&va) })
        }
        _ => return false,
    };
    let keep = if sign > 0.0 { bi } else { ai };
    let drop = if sign > 0.0 { ai } else { bi };
    slots[keep] = Some(Gate { kind: merged_kind, root, ..before });
    slots[ci] = None;
    slots[drop] = None;
    true
}

fn wire_one_flip(slots: &[Option<Gate>], b: &Block) -> Option<usize> {
    (b.start..b.end).find(|&j| {
        slots[j].is_some_and(|g| g.target == 1 && g.control.is_none() && matches!(g.kind, GateKind::P(a) if is_pi(a)))
    })
}

fn cancel_adjacent_x(slots: &mut [Option<Gate>]) -> bool {
    let mut changed = false;
    for i in 0..slots.len() {
        let Some(g) = slots[i] else { continue };
        if g.kind != GateKind::X {
            continue;
        }
        if let Some(j) = next_on_wire(slots, i, g.target) {
            if slots[j].is_some_and(|h| h.kind == GateKind::X) {
                slots[i] = None;
                slots[j] = None;
                changed = true;
            }
        }
    }
    changed
}

/// Absorbs the phase columns of the +1/-1 blocks into the neighbouring
/// controlled gates from wire 1, turns `H Z H` on wire 1 into `X`, and
/// cancels the resulting back-to-back `X` pairs.
pub fn merge_phase_columns(c: &Circuit) -> (Circuit, PassReport) {
    let shift_blocks: Vec<&Block> = c.blocks.iter().filter(|b| b.name == PLUS_BLOCK || b.name == MINUS_BLOCK).collect();
    if shift_blocks.is_empty() {
        return (c.clone(), PassReport::new("merge_phase_columns", c, c, true));
    }
    let mut slots: Vec<Option<Gate>> = c.gates.iter().copied().map(Some).collect();
    for b in shift_blocks {
        let sign = if b.name == PLUS_BLOCK { 1.0 } else { -1.0 };
        let Some(flip) = wire_one_flip(&slots, b) else { continue };
        for t in 2..=b.wires {
            merge_wire(&mut slots, b, t, sign, flip);
        }
        let around = (prev_on_wire(&slots, flip, 1), next_on_wire(&slots, flip, 1));
        if let (Some(h0), Some(h1)) = around {
            let is_h = |j: usize| slots[j].is_some_and(|g| g.kind == GateKind::H) && j >= b.start && j < b.end;
            if is_h(h0) && is_h(h1) {
                slots[h0] = None;
                slots[h1] = None;
                slots[flip] = Some(Gate { root: None, ..Gate::x(1) });
            }
        }
    }
    cancel_adjacent_x(&mut slots);
    let out = from_slots(c, &slots);
    let report = PassReport::new("merge_phase_columns", c, &out, false);
    (out, report)
}

/// `H(t) CZ(c, t) H(t)` with nothing else on `t` in between becomes `CX(c, t)`.
pub fn collapse_cz(c: &Circuit) -> (Circuit, PassReport) {
    let mut slots: Vec<Option<Gate>> = c.gates.iter().copied().map(Some).collect();
    for i in 0..slots.len() {
        let Some(g) = slots[i] else { continue };
        let GateKind::CP(a) = g.kind else { continue };
        if !is_pi(a) {
            continue;
        }
        let t = g.target;
        let (Some(h0), Some(h1)) = (prev_on_wire(&slots, i, t), next_on_wire(&slots, i, t)) else { continue };
        let is_h = |j: usize| slots[j].is_some_and(|x| x.kind == GateKind::H);
        if is_h(h0) && is_h(h1) {
            slots[h0] = None;
            slots[h1] = None;
            slots[i] = Some(Gate { kind: GateKind::CX, root: Some(1), ..g });
        }
    }
    let out = from_slots(c, &slots);
    let report = PassReport::new("collapse_cz", c, &out, false);
    (out, report)
}

/// `CP(g) = CRz(g) (P(g/2) on the control)`. The control-side phase is dropped
/// for gates whose target lies inside the -1 block: across a matched +1/-1
/// pair those phases cancel wire by wire.
pub fn cp_to_crz(c: &Circuit) -> (Circuit, PassReport) {
    let paired_width = match (c.block(PLUS_BLOCK), c.block(MINUS_BLOCK)) {
        (Some(_), Some(m)) => m.wires,
        _ => 0,
    };
    let out = rewrite(c, |_, g| match g.kind {
        GateKind::CP(a) => {
            let ctl = g.control.expect("cp control");
            let crz = Gate { kind: GateKind::CRz(a), ..*g };
            if g.target <= paired_width {
                vec![crz]
            } else {
                vec![Gate::p(ctl, a / 2.0), crz]
            }
        }
        _ => vec![*g],
    });
    let report = PassReport::new("cp_to_crz", c, &out, false);
    (out, report)
}

/// Phase gates that multiply the state by `e^{i delta}` exactly when wires
/// `1..n-1` are all `|1>`, built from the bit flips of the +1/-1 blocks.
///
/// On wire `j >= 2` the pair `P(+-delta/2^(n-j))` brackets the block; wire 1
/// gets a single `P(delta/2^(n-2))` outside the blocks, which also absorbs the
/// global phase the pairs would otherwise leave behind.
pub fn insert_phase_ladder(c: &Circuit, delta: f64, side: LadderSide) -> Circuit {
    if delta.abs() < 1e-15 || side == LadderSide::Split {
        if side == LadderSide::Split {
            let half = insert_phase_ladder(c, delta / 2.0, LadderSide::Plus);
            return insert_phase_ladder(&half, delta / 2.0, LadderSide::Minus);
        }
        return c.clone();
    }
    let (Some(plus), Some(minus)) = (c.block(PLUS_BLOCK).cloned(), c.block(MINUS_BLOCK).cloned()) else {
        return c.clone();
    };
    let n = c.n;
    let phi = |j: usize| delta / 2f64.powi((n - j) as i32);
    let one = Gate::p(1, 2.0 * phi(1));
    let pairs = |s: f64| -> Vec<Gate> { (2..n).rev().map(|j| Gate::p(j, s * phi(j))).collect() };
    match side {
        LadderSide::Plus => {
            let c = insert_gates(c, plus.end, &pairs(-1.0));
            let mut head = vec![one];
            head.extend(pairs(1.0));
            insert_gates(&c, plus.start, &head)
        }
        _ => {
            let mut tail = pairs(1.0);
            tail.push(one);
            let c = insert_gates(c, minus.end, &tail);
            insert_gates(&c, minus.start, &pairs(-1.0))
        }
    }
}

fn is_crx_flip(g: &Gate) -> bool {
    matches!(g.kind, GateKind::CRx(a) if is_pi(a))
}

fn is_crx_run(g: &Gate) -> bool {
    matches!(g.kind, GateKind::CRx(_)) && !is_crx_flip(g)
}

/// Rewrites the C-Rx form back to C-Rz: `CRx(+-pi)` becomes `CX` (the two
/// `-+i` control phases cancel between the blocks) and every run of C-Rx
/// gates on one target is conjugated by a single pair of Hadamards.
pub fn ldd_to_qft(c: &Circuit) -> (Circuit, PassReport) {
    let has_crx = c.gates.iter().any(|g| matches!(g.kind, GateKind::CRx(_)));
    let has_cp = c.gates.iter().any(|g| matches!(g.kind, GateKind::CP(_)));
    if !has_crx || has_cp {
        return (c.clone(), PassReport::new("ldd_to_qft", c, c, true));
    }
    let slots: Vec<Option<Gate>> = c.gates.iter().copied().map(Some).collect();
    let in_run = |j: Option<usize>, t: usize| j.and_then(|j| slots[j]).is_some_and(|g| is_crx_run(&g) && g.target == t);
    let out = rewrite(c, |i, g| {
        if is_crx_flip(g) {
            return vec![Gate { kind: GateKind::CX, ..*g }];
        }
        let GateKind::CRx(a) = g.kind else { return vec![*g] };
        let t = g.target;
        let mut v = Vec::with_capacity(3);
        if !in_run(prev_on_wire(&slots, i, t), t) {
            v.push(Gate::h(t));
        }
        v.push(Gate { kind: GateKind::CRz(a), ..*g });
        if !in_run(next_on_wire(&slots, i, t), t) {
            v.push(Gate::h(t));
        }
        v
    });
    let report = PassReport::new("ldd_to_qft", c, &out, false);
    (out, report)
}

/// Deletes `CX(c, t) CX(c, t)` when nothing touches `c` or `t` in between.
pub fn cancel_cx_pairs(c: &Circuit) -> (Circuit, PassReport) {
    let mut live = vec![true; c.len()];
    let mut stacks: Vec<Vec<usize>> = vec![Vec::new(); c.n + 1];
    for (i, g) in c.gates.iter().enumerate() {
        if g.kind == GateKind::CX {
            let ctl = g.control.expect("cx control");
            let (a, b) = (stacks[ctl].last().copied(), stacks[g.target].last().copied());
            if let (Some(j), Some(k)) = (a, b) {
                let h = &c.gates[j];
                if j == k && h.kind == GateKind::CX && h.control == g.control && h.target == g.target {
                    live[j] = false;
                    live[i] = false;
                    stacks[ctl].pop();
                    stacks[g.target].pop();
                    continue;
                }
            }
        }
        for w in g.wires() {
            stacks[w].push(i);
        }
    }
    let out = rewrite(c, |i, g| if live[i] { vec![*g] } else { vec![] });
    let report = PassReport::new("cancel_cx_pairs", c, &out, false);
    (out, report)
}

pub const PASS_NAMES: [&str; 5] = ["merge_phase_columns", "collapse_cz", "cp_to_crz", "ldd_to_qft", "cancel_cx_pairs"];

pub fn run_pass(name: &str, c: &Circuit) -> Result<(Circuit, PassReport), OptError> {
    Ok(match name {
        "merge_phase_columns" | "merge" => merge_phase_columns(c),
        "collapse_cz" => collapse_cz(c),
        "cp_to_crz" => cp_to_crz(c),
        "ldd_to_qft" => ldd_to_qft(c),
        "cancel_cx_pairs" | "cancel_cx" => cancel_cx_pairs(c),
        other => return Err(OptError::UnknownPass(other.to_string())),
    })
}

fn same_kind(a: &GateKind, b: &GateKind, tol: f64) -> bool {
    let ang = |x: f64, y: f64| (wrap_angle(x) - wrap_angle(y)).abs() < tol || (wrap_angle(x - y)).abs() < tol;
    let mat = |u: &Unitary2, v: &Unitary2| u.max_abs_diff(v) < tol;
    match (a, b) {
        (GateKind::U2(u), GateKind::U2(v)) | (GateKind::CU2(u), GateKind::CU2(v)) => mat(u, v),
        _ if std::mem::discriminant(a) == std::mem::discriminant(b) => match (a.angle(), b.angle()) {
            (Some(x), Some(y)) => ang(x, y),
            (None, None) => true,
            _ => false,
        },
        _ => false,
    }
}

/// Same gate sequence up to angle representatives on `(-pi, pi]` and
/// floating-point noise in matrix payloads.
pub fn structurally_equal(a: &Circuit, b: &Circuit, tol: f64) -> bool {
    a.n == b.n
        && a.len() == b.len()
        && a.gates
            .iter()
            .zip(&b.gates)
            .all(|(x, y)| x.target == y.target && x.control == y.control && same_kind(&x.kind, &y.kind, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::count_gates;
    use crate::synthesis::{build_increment, synthesize, Method, SynthConfig};
    use crate::verify::{apply_statevector, circuit_unitary, StateVector};

    #[test]
    fn standalone_cp_keeps_its_correction() {
        let mut c = Circuit::new(2);
        c.push(Gate::cp(1, 2, PI / 2.0));
        let (out, _) = cp_to_crz(&c);
        assert_eq!(out.gates.len(), 2);
        assert_eq!((out.gates[0].kind, out.gates[0].target), (GateKind::P(PI / 4.0), 1));
        assert_eq!(out.gates[1].kind, GateKind::CRz(PI / 2.0));
        let d = circuit_unitary(&c).unwrap().max_abs_diff(&circuit_unitary(&out).unwrap());
        assert!(d < 1e-15);
    }

    #[test]
    fn cx_pair_cancels() {
        let mut c = Circuit::new(2);
        c.extend([Gate::cx(1, 2), Gate::cx(1, 2)]);
        assert!(cancel_cx_pairs(&c).0.is_empty());
    }

    #[test]
    fn cx_pair_blocked_by_rz_on_control() {
        let mut c = Circuit::new(2);
        c.extend([Gate::cx(1, 2), Gate::rz(1, 0.2), Gate::cx(1, 2)]);
        assert_eq!(cancel_cx_pairs(&c).0.gates, c.gates);
    }

    #[test]
    fn cx_chain_cancels_fully() {
        let mut c = Circuit::new(3);
        c.extend([Gate::cx(1, 2), Gate::cx(2, 3), Gate::cx(2, 3), Gate::cx(1, 2)]);
        assert!(cancel_cx_pairs(&c).0.is_empty());
    }

    #[test]
    fn opposite_orientation_does_not_cancel() {
        let mut c = Circuit::new(2);
        c.extend([Gate::cx(1, 2), Gate::cx(2, 1)]);
        assert_eq!(cancel_cx_pairs(&c).0.len(), 2);
    }

    #[test]
    fn merge_refuses_without_blocks() {
        let mut c = Circuit::new(2);
        c.push(Gate::h(1));
        let (out, rep) = merge_phase_columns(&c);
        assert!(rep.refused);
        assert_eq!(out, c);
    }

    #[test]
    fn merge_is_idempotent_on_mcx() {
        let raw = synthesize(&SynthConfig::mcx(5).unoptimized()).unwrap();
        let (once, r1) = merge_phase_columns(&raw);
        assert!(r1.gates_after < r1.gates_before);
        let (twice, r2) = merge_phase_columns(&once);
        assert_eq!(once, twice);
        assert_eq!(r2.gates_before, r2.gates_after);
    }

    #[test]
    fn ladder_zero_is_noop() {
        let c = synthesize(&SynthConfig::mcx(4)).unwrap();
        assert_eq!(insert_phase_ladder(&c, 0.0, LadderSide::Plus), c);
    }

    #[test]
    fn ladder_phases_all_ones_controls() {
        let base = synthesize(&SynthConfig::mcx(3)).unwrap();
        let with = insert_phase_ladder(&base, PI / 2.0, LadderSide::Plus);
        for idx in 0..8usize {
            let a = apply_statevector(&base, &StateVector::basis(3, idx)).unwrap();
            let b = apply_statevector(&with, &StateVector::basis(3, idx)).unwrap();
            let factor = if idx & 0b011 == 0b011 { num_complex::Complex64::new(0.0, 1.0) } else { 1.0.into() };
            let d = a.amps.iter().zip(&b.amps).map(|(x, y)| (x * factor - y).norm()).fold(0.0, f64::max);
            assert!(d < 1e-12, "basis {idx}: {d:e}");
        }
    }

    #[test]
    fn unknown_pass_is_an_error() {
        assert!(run_pass("nope", &Circuit::new(1)).is_err());
    }

    #[test]
    fn ldd_refuses_plain_circuit() {
        let c = build_increment(3);
        assert!(ldd_to_qft(&c).1.refused);
    }

    #[test]
    fn ldd_round_trip_counts() {
        let ldd = synthesize(&SynthConfig::new(Method::Ldd, 5, Unitary2::ry(0.4))).unwrap();
        let back = ldd_to_qft(&ldd).0;
        let k = count_gates(&back);
        assert_eq!((k.h, k.crz, k.cx, k.crx), (8, 16, 2, 0));
    }
}
