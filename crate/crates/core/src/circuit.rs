//! Gate and circuit representation.
//!
//! Wires are 1-based and wire 1 is the least significant qubit, so a basis
//! index `a` has bit `w - 1` equal to the value on wire `w`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{c, Unitary2};

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("gate {index}: wire {wire} outside 1..={n}")]
    WireOutOfRange { index: usize, wire: usize, n: usize },
    #[error("gate {index}: control equals target")]
    ControlIsTarget { index: usize },
    #[error("gate {index}: {kind} needs {expect} control")]
    ControlArity { index: usize, kind: &'static str, expect: &'static str },
    #[error("gate {index}: non-finite parameter")]
    NonFinite { index: usize },
    #[error("unknown gate kind `{0}`")]
    UnknownKind(String),
    #[error("gate kind `{kind}` expects {expect} params, got {got}")]
    ParamCount { kind: String, expect: usize, got: usize },
    #[error("invalid unitary payload: {0}")]
    BadUnitary(#[from] crate::linalg::LinalgError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    H,
    X,
    SX,
    SXdg,
    Rz(f64),
    Ry(f64),
    Rx(f64),
    P(f64),
    U2(Unitary2),
    CX,
    CP(f64),
    CRz(f64),
    CRx(f64),
    CU2(Unitary2),
    Swap,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::SX => "sx",
            GateKind::SXdg => "sxdg",
            GateKind::Rz(_) => "rz",
            GateKind::Ry(_) => "ry",
            GateKind::Rx(_) => "rx",
            GateKind::P(_) => "p",
            GateKind::U2(_) => "u2",
            GateKind::CX => "cx",
            GateKind::CP(_) => "cp",
            GateKind::CRz(_) => "crz",
            GateKind::CRx(_) => "crx",
            GateKind::CU2(_) => "cu2",
            GateKind::Swap => "swap",
        }
    }

    /// Kinds that carry a control wire (SWAP stores its second operand there).
    pub fn is_two_qubit(&self) -> bool {
        matches!(
            self,
            GateKind::CX | GateKind::CP(_) | GateKind::CRz(_) | GateKind::CRx(_) | GateKind::CU2(_) | GateKind::Swap
        )
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateKind::Rz(g) | GateKind::Ry(g) | GateKind::Rx(g) | GateKind::P(g) => Some(g),
            GateKind::CP(g) | GateKind::CRz(g) | GateKind::CRx(g) => Some(g),
            _ => None,
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match self {
            GateKind::U2(u) | GateKind::CU2(u) => u.entries().iter().flat_map(|z| [z.re, z.im]).collect(),
            k => k.angle().into_iter().collect(),
        }
    }

    pub fn adjoint(&self) -> GateKind {
        match *self {
            GateKind::SX => GateKind::SXdg,
            GateKind::SXdg => GateKind::SX,
            GateKind::Rz(g) => GateKind::Rz(-g),
            GateKind::Ry(g) => GateKind::Ry(-g),
            GateKind::Rx(g) => GateKind::Rx(-g),
            GateKind::P(g) => GateKind::P(-g),
            GateKind::U2(u) => GateKind::U2(u.adjoint()),
            GateKind::CP(g) => GateKind::CP(-g),
            GateKind::CRz(g) => GateKind::CRz(-g),
            GateKind::CRx(g) => GateKind::CRx(-g),
            GateKind::CU2(u) => GateKind::CU2(u.adjoint()),
            k => k,
        }
    }

    /// The single-qubit operator applied to the target (conditionally, for
    /// controlled kinds). `None` for SWAP.
    pub fn target_matrix(&self) -> Option<Unitary2> {
        Some(match *self {
            GateKind::H => Unitary2::h(),
            GateKind::X | GateKind::CX => Unitary2::x(),
            GateKind::SX => Unitary2::sx(),
            GateKind::SXdg => Unitary2::sxdg(),
            GateKind::Rz(g) | GateKind::CRz(g) => Unitary2::rz(g),
            GateKind::Ry(g) => Unitary2::ry(g),
            GateKind::Rx(g) | GateKind::CRx(g) => Unitary2::rx(g),
            GateKind::P(g) | GateKind::CP(g) => Unitary2::p(g),
            GateKind::U2(u) | GateKind::CU2(u) => u,
            GateKind::Swap => return None,
        })
    }

    fn from_record(kind: &str, p: &[f64]) -> Result<GateKind, CircuitError> {
        let want = |n: usize| -> Result<(), CircuitError> {
            if p.len() == n {
                Ok(())
            } else {
                Err(CircuitError::ParamCount { kind: kind.to_string(), expect: n, got: p.len() })
            }
        };
        let unitary = || -> Result<Unitary2, CircuitError> {
            want(8)?;
            Ok(Unitary2::new([c(p[0], p[1]), c(p[2], p[3]), c(p[4], p[5]), c(p[6], p[7])])?)
        };
        Ok(match kind {
            "h" => want(0).map(|_| GateKind::H)?,
            "x" => want(0).map(|_| GateKind::X)?,
            "sx" => want(0).map(|_| GateKind::SX)?,
            "sxdg" => want(0).map(|_| GateKind::SXdg)?,
            "cx" => want(0).map(|_| GateKind::CX)?,
            "swap" => want(0).map(|_| GateKind::Swap)?,
            "rz" => want(1).map(|_| GateKind::Rz(p[0]))?,
            "ry" => want(1).map(|_| GateKind::Ry(p[0]))?,
            "rx" => want(1).map(|_| GateKind::Rx(p[0]))?,
            "p" => want(1).map(|_| GateKind::P(p[0]))?,
            "cp" => want(1).map(|_| GateKind::CP(p[0]))?,
            "crz" => want(1).map(|_| GateKind::CRz(p[0]))?,
            "crx" => want(1).map(|_| GateKind::CRx(p[0]))?,
            "u2" => GateKind::U2(unitary()?),
            "cu2" => GateKind::CU2(unitary()?),
            other => return Err(CircuitError::UnknownKind(other.to_string())),
        })
    }
}

/// Root index implied by a controlled-phase angle `+-pi / 2^(m-1)`.
pub fn root_index_from_angle(g: f64) -> Option<u32> {
    let a = g.abs();
    if a < 1e-300 {
        return None;
    }
    let k = (PI / a).log2();
    let r = k.round();
    if (k - r).abs() < 1e-9 && r >= 0.0 {
        Some(r as u32 + 1)
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
    /// Root index `m` of a `U^{1/2^(m-1)}`-type gate, used by AQFT truncation.
    pub root: Option<u32>,
    /// Set on a P that shares the time slot of the CU2 immediately after it.
    pub paired: bool,
}

impl Gate {
    pub fn new(kind: GateKind, target: usize, control: Option<usize>) -> Self {
        Gate { kind, target, control, root: None, paired: false }
    }

    pub fn single(kind: GateKind, target: usize) -> Self {
        Self::new(kind, target, None)
    }

    pub fn controlled(kind: GateKind, control: usize, target: usize) -> Self {
        Self::new(kind, target, Some(control))
    }

    pub fn h(t: usize) -> Self {
        Self::single(GateKind::H, t)
    }

    pub fn x(t: usize) -> Self {
        Self::single(GateKind::X, t)
    }

    pub fn p(t: usize, g: f64) -> Self {
        Self::single(GateKind::P(g), t)
    }

    pub fn rz(t: usize, g: f64) -> Self {
        Self::single(GateKind::Rz(g), t)
    }

    pub fn u2(t: usize, u: Unitary2) -> Self {
        Self::single(GateKind::U2(u), t)
    }

    pub fn cx(c: usize, t: usize) -> Self {
        Self::controlled(GateKind::CX, c, t)
    }

    pub fn cp(c: usize, t: usize, g: f64) -> Self {
        Self::controlled(GateKind::CP(g), c, t)
    }

    pub fn crz(c: usize, t: usize, g: f64) -> Self {
        Self::controlled(GateKind::CRz(g), c, t)
    }

    pub fn crx(c: usize, t: usize, g: f64) -> Self {
        Self::controlled(GateKind::CRx(g), c, t)
    }

    pub fn cu2(c: usize, t: usize, u: Unitary2) -> Self {
        Self::controlled(GateKind::CU2(u), c, t)
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::new(GateKind::Swap, a, Some(b))
    }

    pub fn with_root(mut self, m: u32) -> Self {
        self.root = Some(m);
        self
    }

    pub fn wires(&self) -> impl Iterator<Item = usize> {
        std::iter::once(self.target).chain(self.control)
    }

    pub fn touches(&self, w: usize) -> bool {
        self.target == w || self.control == Some(w)
    }

    pub fn adjoint(&self) -> Gate {
        Gate { kind: self.kind.adjoint(), ..*self }
    }

    /// Root index, explicit or inferred from a controlled-phase angle.
    pub fn root_index(&self) -> Option<u32> {
        self.root.or_else(|| match self.kind {
            GateKind::CP(g) | GateKind::CRz(g) | GateKind::CRx(g) => root_index_from_angle(g),
            _ => None,
        })
    }
}

/// A named span of gates, `start..end` in sequence order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub name: String,
    pub start: usize,
    pub end: usize,
    /// Number of low wires the block acts on (`1..=wires`).
    pub wires: usize,
}

pub const PLUS_BLOCK: &str = "+1";
pub const MINUS_BLOCK: &str = "-1";

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n: usize,
    pub gates: Vec<Gate>,
    pub blocks: Vec<Block>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit { n, gates: Vec::new(), blocks: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: Gate) {
        debug_assert!(g.wires().all(|w| w >= 1 && w <= self.n), "wire out of range: {g:?}");
        self.gates.push(g);
    }

    pub fn extend(&mut self, gs: impl IntoIterator<Item = Gate>) {
        for g in gs {
            self.push(g);
        }
    }

    /// Appends `other`, shifting its block annotations.
    pub fn append(&mut self, other: &Circuit) {
        let off = self.gates.len();
        self.extend(other.gates.iter().copied());
        self.blocks.extend(other.blocks.iter().map(|b| Block { start: b.start + off, end: b.end + off, ..b.clone() }));
    }

    pub fn mark_block(&mut self, name: &str, wires: usize, start: usize) {
        self.blocks.push(Block { name: name.to_string(), start, end: self.gates.len(), wires });
    }

    pub fn block(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name == name)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        for (index, g) in self.gates.iter().enumerate() {
            for wire in g.wires() {
                if wire == 0 || wire > self.n {
                    return Err(CircuitError::WireOutOfRange { index, wire, n: self.n });
                }
            }
            match (g.kind.is_two_qubit(), g.control) {
                (true, None) => {
                    return Err(CircuitError::ControlArity { index, kind: g.kind.name(), expect: "exactly one" })
                }
                (false, Some(_)) => {
                    return Err(CircuitError::ControlArity { index, kind: g.kind.name(), expect: "no" })
                }
                (true, Some(ctl)) if ctl == g.target => return Err(CircuitError::ControlIsTarget { index }),
                _ => {}
            }
            if g.kind.params().iter().any(|p| !p.is_finite()) {
                return Err(CircuitError::NonFinite { index });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let rec = CircuitRecord {
            n: self.n,
            gates: self
                .gates
                .iter()
                .map(|g| GateRecord {
                    kind: g.kind.name().to_string(),
                    params: g.kind.params(),
                    target: g.target,
                    control: g.control,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&rec).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Circuit, CircuitError> {
        let rec: CircuitRecord = serde_json::from_str(s)?;
        let mut c = Circuit::new(rec.n);
        for g in rec.gates {
            let kind = GateKind::from_record(&g.kind, &g.params)?;
            c.gates.push(Gate::new(kind, g.target, g.control));
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Serialize, Deserialize)]
struct GateRecord {
    kind: String,
    params: Vec<f64>,
    target: usize,
    control: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct CircuitRecord {
    n: usize,
    gates: Vec<GateRecord>,
}

/// ASAP slot assignment, 1-based per gate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub slots: Vec<usize>,
    pub abstract_slots: usize,
}

fn pairs_with_next(c: &Circuit, i: usize) -> bool {
    let g = &c.gates[i];
    if !g.paired || !matches!(g.kind, GateKind::P(_)) {
        return false;
    }
    matches!(c.gates.get(i + 1), Some(n) if matches!(n.kind, GateKind::CU2(_)) && n.control == Some(g.target))
}

/// Greedy as-soon-as-possible scheduling over wire occupancy.
pub fn schedule_slots(c: &Circuit) -> Schedule {
    let mut last = vec![0usize; c.n + 1];
    let mut slots = vec![0usize; c.gates.len()];
    let mut depth = 0;
    let mut i = 0;
    while i < c.gates.len() {
        let group = if pairs_with_next(c, i) { i..i + 2 } else { i..i + 1 };
        let s = 1 + c.gates[group.clone()].iter().flat_map(|g| g.wires()).map(|w| last[w]).max().unwrap_or(0);
        for k in group.clone() {
            slots[k] = s;
            for w in c.gates[k].wires() {
                last[w] = s;
            }
        }
        depth = depth.max(s);
        i = group.end;
    }
    Schedule { slots, abstract_slots: depth }
}

/// Per-class gate tally.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub h: usize,
    pub x: usize,
    /// SX and SXdg.
    pub sx: usize,
    pub rz: usize,
    pub p: usize,
    /// Rx, Ry and general single-qubit U2.
    pub rot: usize,
    pub cx: usize,
    pub cp: usize,
    pub crz: usize,
    pub crx: usize,
    pub cu2: usize,
    pub swap: usize,
}

impl GateCounts {
    pub fn total(&self) -> usize {
        self.h
            + self.x
            + self.sx
            + self.rz
            + self.p
            + self.rot
            + self.cx
            + self.cp
            + self.crz
            + self.crx
            + self.cu2
            + self.swap
    }
}

pub fn count_gates(c: &Circuit) -> GateCounts {
    let mut k = GateCounts::default();
    for g in &c.gates {
        match g.kind {
            GateKind::H => k.h += 1,
            GateKind::X => k.x += 1,
            GateKind::SX | GateKind::SXdg => k.sx += 1,
            GateKind::Rz(_) => k.rz += 1,
            GateKind::P(_) => k.p += 1,
            GateKind::Rx(_) | GateKind::Ry(_) | GateKind::U2(_) => k.rot += 1,
            GateKind::CX => k.cx += 1,
            GateKind::CP(_) => k.cp += 1,
            GateKind::CRz(_) => k.crz += 1,
            GateKind::CRx(_) => k.crx += 1,
            GateKind::CU2(_) => k.cu2 += 1,
            GateKind::Swap => k.swap += 1,
        }
    }
    k
}

/// Reversed sequence of adjoints. A paired P stays in front of its CU2.
pub fn inverse(c: &Circuit) -> Circuit {
    let len = c.gates.len();
    let mut gates: Vec<Gate> = c.gates.iter().rev().map(Gate::adjoint).collect();
    let mut i = 0;
    while i + 1 < len {
        // reversed: [cu2, p] where p was paired with the cu2
        let orig_p = len - 1 - (i + 1);
        if pairs_with_next(c, orig_p) {
            gates.swap(i, i + 1);
            i += 2;
        } else {
            i += 1;
        }
    }
    let blocks = c.blocks.iter().rev().map(|b| Block { start: len - b.end, end: len - b.start, ..b.clone() }).collect();
    Circuit { n: c.n, gates, blocks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disjoint_gates_share_a_slot() {
        let mut c = Circuit::new(2);
        c.extend([Gate::h(1), Gate::h(2)]);
        assert_eq!(schedule_slots(&c).abstract_slots, 1);
    }

    #[test]
    fn chain_is_sequential() {
        let mut c = Circuit::new(2);
        c.extend([Gate::h(1), Gate::cx(1, 2), Gate::h(2)]);
        let s = schedule_slots(&c);
        assert_eq!(s.slots, vec![1, 2, 3]);
        assert_eq!(s.abstract_slots, 3);
    }

    #[test]
    fn paired_phase_shares_cu2_slot() {
        let mut c = Circuit::new(3);
        let mut p = Gate::p(1, 0.3);
        p.paired = true;
        c.extend([Gate::h(1), p, Gate::cu2(1, 3, Unitary2::x())]);
        let s = schedule_slots(&c);
        assert_eq!(s.slots, vec![1, 2, 2]);
        // unpaired P takes its own slot
        c.gates[1].paired = false;
        assert_eq!(schedule_slots(&c).slots, vec![1, 2, 3]);
    }

    #[test]
    fn empty_counts_are_zero() {
        assert_eq!(count_gates(&Circuit::new(3)), GateCounts::default());
    }

    #[test]
    fn cx_is_self_inverse() {
        let mut c = Circuit::new(2);
        c.push(Gate::cx(1, 2));
        assert_eq!(inverse(&c).gates, c.gates);
    }

    #[test]
    fn inverse_keeps_pair_order() {
        let mut c = Circuit::new(2);
        let mut p = Gate::p(1, 0.3);
        p.paired = true;
        c.extend([p, Gate::cu2(1, 2, Unitary2::s())]);
        let inv = inverse(&c);
        assert!(matches!(inv.gates[0].kind, GateKind::P(g) if g == -0.3));
        assert!(matches!(inv.gates[1].kind, GateKind::CU2(_)));
        assert_eq!(schedule_slots(&inv).abstract_slots, 1);
    }

    #[test]
    fn validate_catches_bad_wires() {
        let mut c = Circuit::new(2);
        c.gates.push(Gate::cx(2, 2));
        assert!(matches!(c.validate(), Err(CircuitError::ControlIsTarget { .. })));
        let mut c = Circuit::new(2);
        c.gates.push(Gate::h(3));
        assert!(matches!(c.validate(), Err(CircuitError::WireOutOfRange { .. })));
        let mut c = Circuit::new(2);
        c.gates.push(Gate::new(GateKind::H, 1, Some(2)));
        assert!(matches!(c.validate(), Err(CircuitError::ControlArity { .. })));
    }

    #[test]
    fn json_roundtrip() {
        let mut c = Circuit::new(3);
        c.extend([Gate::h(1), Gate::cp(1, 3, 0.25), Gate::cu2(2, 3, Unitary2::sx()), Gate::swap(1, 2)]);
        let s = c.to_json();
        assert!(s.contains("\"kind\": \"cp\"") && s.contains("\"control\": null"));
        let back = Circuit::from_json(&s).unwrap();
        assert_eq!(back.gates, c.gates);
    }

    #[test]
    fn json_rejects_unknown_kind() {
        let s = r#"{"n":1,"gates":[{"kind":"foo","params":[],"target":1,"control":null}]}"#;
        assert!(matches!(Circuit::from_json(s), Err(CircuitError::UnknownKind(_))));
    }

    #[test]
    fn root_index_inference() {
        assert_eq!(root_index_from_angle(PI), Some(1));
        assert_eq!(root_index_from_angle(-PI / 4.0), Some(3));
        assert_eq!(root_index_from_angle(0.3), None);
    }
}
