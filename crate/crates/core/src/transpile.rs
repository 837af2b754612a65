//! Routing onto a line of qubits and lowering to the native set
//! `{CX, Rz, SX, X}`, plus depth and count metrics of the result.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{abc_decompose, zyz_decompose};
use crate::circuit::{schedule_slots, Circuit, Gate, GateKind};
use crate::formulas;
use crate::linalg::Unitary2;
use crate::optimizer::cancel_cx_pairs;
use crate::synthesis::{synthesize, Method, SynthConfig, SynthError};

/// Rz angles closer to zero than this are dropped.
const RZ_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    /// Fully connected: any pair of wires may interact.
    #[default]
    Fc,
    /// Linear nearest neighbour, chain order = wire order.
    Lnn,
}

impl Architecture {
    pub fn as_str(&self) -> &'static str {
        match self {
            Architecture::Fc => "fc",
            Architecture::Lnn => "lnn",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("unknown architecture `{0}` (expected fc or lnn)")]
pub struct UnknownArchitecture(pub String);

impl FromStr for Architecture {
    type Err = UnknownArchitecture;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fc" => Ok(Architecture::Fc),
            "lnn" => Ok(Architecture::Lnn),
            _ => Err(UnknownArchitecture(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Routed {
    pub circuit: Circuit,
    /// `final_perm[l - 1]` is the physical wire holding logical wire `l` at
    /// the end of the circuit.
    pub final_perm: Vec<usize>,
    pub swaps: usize,
}

fn commutes(a: &Gate, b: &Gate) -> bool {
    let (Some(u), Some(v)) = (a.kind.target_matrix(), b.kind.target_matrix()) else { return false };
    u.mul(&v).max_abs_diff(&v.mul(&u)) < 1e-12
}

/// Length of the run at `i` of controlled gates on one target whose target
/// parts commute pairwise, so they may be applied in any order.
fn fan_len(gates: &[Gate], i: usize) -> usize {
    let g = &gates[i];
    if g.control.is_none() || g.kind == GateKind::Swap {
        return 1;
    }
    let mut j = i + 1;
    while j < gates.len() {
        let h = &gates[j];
        let fits = h.control.is_some()
            && h.kind != GateKind::Swap
            && h.target == g.target
            && gates[i..j].iter().all(|x| x.control != h.control && commutes(x, h));
        if !fits {
            break;
        }
        j += 1;
    }
    j - i
}

struct Layout {
    /// pos[l] = physical wire of logical l, at[p] = logical on physical p
    pos: Vec<usize>,
    at: Vec<usize>,
    out: Circuit,
    swaps: usize,
}

impl Layout {
    /// Walks logical `mover` along the line until it neighbours `fixed`.
    fn bring(&mut self, mover: usize, fixed: usize) {
        let pf = self.pos[fixed];
        let mut pm = self.pos[mover];
        while pm.abs_diff(pf) > 1 {
            let step = if pf > pm { pm + 1 } else { pm - 1 };
            self.out.push(Gate::swap(pm, step));
            self.swaps += 1;
            let (a, b) = (self.at[pm], self.at[step]);
            self.at.swap(pm, step);
            self.pos[a] = step;
            self.pos[b] = pm;
            pm = step;
        }
    }

    fn emit(&mut self, g: &Gate) {
        let control = g.control.map(|c| self.pos[c]);
        self.out.push(Gate { target: self.pos[g.target], control, ..*g });
    }
}

/// Inserts adjacent SWAPs so every two-qubit gate acts on neighbouring wires.
///
/// One endpoint is walked toward the other and the resulting permutation is
/// carried forward instead of being undone. A fan of commuting gates on one
/// target is reordered by control position and served by sweeping the target
/// along the line; otherwise the control moves.
pub fn route_lnn(c: &Circuit) -> Routed {
    let n = c.n;
    let mut lay = Layout { pos: (0..=n).collect(), at: (0..=n).collect(), out: Circuit::new(n), swaps: 0 };
    let mut i = 0;
    while i < c.len() {
        let len = fan_len(&c.gates, i);
        let fan = &c.gates[i..i + len];
        i += len;
        let g = &fan[0];
        let Some(ctl) = g.control else {
            lay.emit(g);
            continue;
        };
        if len == 1 {
            lay.bring(ctl, g.target);
            lay.emit(g);
            continue;
        }
        // nearest controls first on the lower side, then the upper side
        let pt = lay.pos[g.target];
        let mut order: Vec<&Gate> = fan.iter().collect();
        order.sort_by_key(|h| {
            let p = lay.pos[h.control.expect("fan control")];
            if p < pt {
                (0, pt - p)
            } else {
                (1, p - pt)
            }
        });
        for h in order {
            lay.bring(h.target, h.control.expect("fan control"));
            lay.emit(h);
        }
    }
    Routed { circuit: lay.out, final_perm: lay.pos[1..].to_vec(), swaps: lay.swaps }
}

/// A circuit over `{CX, Rz, SX, SXdg, X}` with the phase it dropped:
/// `source = e^{i global_phase} native`.
#[derive(Clone, Debug, PartialEq)]
pub struct NativeCircuit {
    pub circuit: Circuit,
    pub global_phase: f64,
}

impl NativeCircuit {
    pub fn is_native(&self) -> bool {
        self.circuit
            .gates
            .iter()
            .all(|g| matches!(g.kind, GateKind::CX | GateKind::Rz(_) | GateKind::SX | GateKind::SXdg | GateKind::X))
    }
}

struct Lowering {
    gates: Vec<Gate>,
    phase: f64,
}

impl Lowering {
    fn rz(&mut self, w: usize, a: f64) {
        self.gates.push(Gate::rz(w, a));
    }

    fn cx(&mut self, c: usize, t: usize) {
        self.gates.push(Gate::cx(c, t));
    }

    fn sx(&mut self, w: usize) {
        self.gates.push(Gate::single(GateKind::SX, w));
    }

    /// `Rz SX Rz SX Rz`, or one Rz when `u` is diagonal.
    fn one_qubit(&mut self, w: usize, u: &Unitary2) {
        let z = zyz_decompose(u);
        if z.theta.abs() < RZ_EPS {
            self.rz(w, z.alpha + z.beta);
            self.phase += z.delta;
            return;
        }
        let seq = [
            Gate::rz(w, z.beta),
            Gate::single(GateKind::SX, w),
            Gate::rz(w, z.theta + PI),
            Gate::single(GateKind::SX, w),
            Gate::rz(w, z.alpha + PI),
        ];
        let native = seq.iter().fold(Unitary2::identity(), |acc, g| g.kind.target_matrix().expect("1q").mul(&acc));
        self.phase += phase_between(u, &native);
        self.gates.extend(seq);
    }

    /// `CRz(g) = CX Rz(-g/2) CX Rz(g/2)` on the target, exactly.
    fn crz(&mut self, c: usize, t: usize, g: f64) {
        self.cx(c, t);
        self.rz(t, -g / 2.0);
        self.cx(c, t);
        self.rz(t, g / 2.0);
    }

    /// Two-CX form `C, CX, B, CX, A` plus the control phase.
    fn controlled(&mut self, c: usize, t: usize, v: &Unitary2) {
        let (delta, abc) = abc_decompose(v);
        self.one_qubit(t, &abc.c);
        self.cx(c, t);
        self.one_qubit(t, &abc.b);
        self.cx(c, t);
        self.one_qubit(t, &abc.a);
        self.rz(c, delta);
        self.phase += delta / 2.0;
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.cx(a, b);
        self.cx(b, a);
        self.cx(a, b);
    }

    fn gate(&mut self, g: &Gate, swap_first: Option<usize>) {
        let t = g.target;
        match g.kind {
            GateKind::H => {
                self.rz(t, PI / 2.0);
                self.sx(t);
                self.rz(t, PI / 2.0);
                self.phase += PI / 4.0;
            }
            GateKind::X | GateKind::SX | GateKind::SXdg | GateKind::Rz(_) => self.gates.push(Gate::single(g.kind, t)),
            GateKind::P(a) => {
                self.rz(t, a);
                self.phase += a / 2.0;
            }
            GateKind::Ry(_) | GateKind::Rx(_) | GateKind::U2(_) => {
                self.one_qubit(t, &g.kind.target_matrix().expect("1q"));
            }
            GateKind::CX => self.cx(g.control.expect("control"), t),
            GateKind::CP(a) => {
                let c = g.control.expect("control");
                self.crz(c, t, a);
                self.rz(c, a / 2.0);
                self.phase += a / 4.0;
            }
            GateKind::CRz(a) => self.crz(g.control.expect("control"), t, a),
            GateKind::CRx(_) | GateKind::CU2(_) => {
                let v = g.kind.target_matrix().expect("controlled part");
                self.controlled(g.control.expect("control"), t, &v);
            }
            GateKind::Swap => {
                let o = g.control.expect("swap operand");
                // end on the orientation the next gate on this pair starts with
                match swap_first {
                    Some(c) if c == o => self.swap(o, t),
                    _ => self.swap(t, o),
                }
            }
        }
    }
}

/// `phi` with `a = e^{i phi} b`, read off the overlap `tr(b^dag a)`.
fn phase_between(a: &Unitary2, b: &Unitary2) -> f64 {
    let (x, y) = (a.entries(), b.entries());
    x.iter().zip(&y).map(|(p, q)| q.conj() * p).sum::<C64>().arg()
}

/// Which wire the first CX of `g`'s lowering is controlled on, if `g` is a
/// two-qubit gate that starts with a CX.
fn leading_cx_control(g: &Gate) -> Option<usize> {
    match g.kind {
        GateKind::CX | GateKind::CP(_) | GateKind::CRz(_) => g.control,
        _ => None,
    }
}

fn swap_orientation(c: &Circuit, i: usize) -> Option<usize> {
    let s = &c.gates[i];
    let (a, b) = (s.target, s.control?);
    let next = c.gates[i + 1..].iter().find(|g| g.touches(a) || g.touches(b))?;
    let same_pair = next.control.is_some() && next.touches(a) && next.touches(b);
    if same_pair {
        leading_cx_control(next)
    } else {
        None
    }
}

/// Rewrites every gate into native ones, then merges runs of Rz on a wire,
/// cancels back-to-back CX pairs and repeats until nothing changes.
pub fn lower_to_ngs(c: &Circuit) -> NativeCircuit {
    let mut low = Lowering { gates: Vec::with_capacity(c.len() * 5), phase: 0.0 };
    for (i, g) in c.gates.iter().enumerate() {
        let orient = if g.kind == GateKind::Swap { swap_orientation(c, i) } else { None };
        low.gate(g, orient);
    }
    let mut nc =
        NativeCircuit { circuit: Circuit { n: c.n, gates: low.gates, blocks: Vec::new() }, global_phase: low.phase };
    loop {
        let before = nc.circuit.len();
        merge_rz(&mut nc);
        nc.circuit = cancel_cx_pairs(&nc.circuit).0;
        if nc.circuit.len() == before {
            break;
        }
    }
    nc.global_phase = wrap(nc.global_phase);
    nc
}

fn wrap(x: f64) -> f64 {
    crate::linalg::wrap_angle(x)
}

/// Sums consecutive Rz on each wire, folds angles into `(-pi, pi]` (each
/// `2 pi` is a sign, moved into the global phase) and drops zero rotations.
pub fn merge_rz(nc: &mut NativeCircuit) {
    let c = &nc.circuit;
    let mut gates: Vec<Option<Gate>> = Vec::with_capacity(c.len());
    let mut last: Vec<Option<usize>> = vec![None; c.n + 1];
    for g in &c.gates {
        if let GateKind::Rz(a) = g.kind {
            if let Some(j) = last[g.target] {
                if let Some(Gate { kind: GateKind::Rz(b), .. }) = gates[j] {
                    gates[j] = Some(Gate::rz(g.target, a + b));
                    continue;
                }
            }
        }
        for w in g.wires() {
            last[w] = Some(gates.len());
        }
        gates.push(Some(*g));
    }
    let mut phase = 0.0;
    let out: Vec<Gate> = gates
        .into_iter()
        .flatten()
        .filter_map(|g| match g.kind {
            GateKind::Rz(a) => {
                let k = ((a + PI) / (2.0 * PI)).ceil() - 1.0;
                let r = a - 2.0 * PI * k;
                phase += k * PI;
                (r.abs() > RZ_EPS).then(|| Gate::rz(g.target, r))
            }
            _ => Some(g),
        })
        .collect();
    nc.circuit.gates = out;
    nc.global_phase += phase;
}

/// Per-kind tally and ASAP depth of a native circuit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NativeMetrics {
    pub depth: usize,
    pub cx: usize,
    pub rz: usize,
    /// SX and SXdg.
    pub sx: usize,
    pub x: usize,
    pub total: usize,
}

pub fn native_metrics(nc: &NativeCircuit) -> NativeMetrics {
    let mut m = NativeMetrics { depth: schedule_slots(&nc.circuit).abstract_slots, ..Default::default() };
    for g in &nc.circuit.gates {
        match g.kind {
            GateKind::CX => m.cx += 1,
            GateKind::Rz(_) => m.rz += 1,
            GateKind::SX | GateKind::SXdg => m.sx += 1,
            GateKind::X => m.x += 1,
            _ => {}
        }
    }
    m.total = nc.circuit.len();
    m
}

/// Everything the architecture step produces for one abstract circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct Compiled {
    /// Abstract circuit after routing (unchanged on FC).
    pub abstract_circuit: Circuit,
    pub native: NativeCircuit,
    /// Logical-to-physical wires at the end; the identity on FC.
    pub final_perm: Vec<usize>,
    pub swaps: usize,
}

pub fn compile(c: &Circuit, arch: Architecture) -> Compiled {
    let (abstract_circuit, final_perm, swaps) = match arch {
        Architecture::Fc => (c.clone(), (1..=c.n).collect(), 0),
        Architecture::Lnn => {
            let r = route_lnn(c);
            (r.circuit, r.final_perm, r.swaps)
        }
    };
    let native = lower_to_ngs(&abstract_circuit);
    Compiled { abstract_circuit, native, final_perm, swaps }
}

/// One row of the metrics table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    pub n: usize,
    pub method: Method,
    pub arch: Architecture,
    pub aqft_cutoff: Option<u32>,
    pub abstract_slots: usize,
    pub native_depth: usize,
    pub cx: usize,
    pub rz: usize,
    pub sx: usize,
    pub x: usize,
    pub swap_inserted: usize,
    /// Predicted native depth, when a closed form exists for this row.
    pub paper_depth_formula: Option<i64>,
    /// `(measured - predicted) / predicted`.
    pub deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra: Option<ReportExtra>,
}

/// Fields that only appear in JSON output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportExtra {
    pub native_total: usize,
    pub global_phase: f64,
    /// LNN only: routed slots minus FC slots.
    pub lnn_extra_slots: Option<i64>,
    /// LNN only: the line slot formula read as an addition to FC...
    pub lnn_slots_formula_additional: Option<i64>,
    /// ...and read as the absolute slot count.
    pub lnn_slots_formula_absolute: Option<i64>,
    pub cx_formula: Option<i64>,
    pub swap_formula: Option<i64>,
}

/// The CSV column order.
pub const CSV_COLUMNS: [&str; 13] = [
    "n",
    "method",
    "arch",
    "aqft_cutoff",
    "abstract_slots",
    "native_depth",
    "cx",
    "rz",
    "sx",
    "x",
    "swap_inserted",
    "paper_depth_formula",
    "deviation",
];

impl MetricsReport {
    pub fn csv_record(&self) -> Vec<String> {
        let opt = |v: Option<String>| v.unwrap_or_default();
        vec![
            self.n.to_string(),
            self.method.to_string(),
            self.arch.to_string(),
            opt(self.aqft_cutoff.map(|m| m.to_string())),
            self.abstract_slots.to_string(),
            self.native_depth.to_string(),
            self.cx.to_string(),
            self.rz.to_string(),
            self.sx.to_string(),
            self.x.to_string(),
            self.swap_inserted.to_string(),
            opt(self.paper_depth_formula.map(|v| v.to_string())),
            opt(self.deviation.map(|d| format!("{d:.6}"))),
        ]
    }
}

/// Synthesizes `cfg`, compiles it for `arch` and measures the result.
pub fn measure(cfg: &SynthConfig, arch: Architecture) -> Result<MetricsReport, SynthError> {
    let c = synthesize(cfg)?;
    Ok(measure_circuit(&c, cfg, arch))
}

/// Measures an already synthesized circuit; `cfg` only labels the row and
/// selects the prediction to compare against.
pub fn measure_circuit(c: &Circuit, cfg: &SynthConfig, arch: Architecture) -> MetricsReport {
    let fc_slots = schedule_slots(c).abstract_slots;
    let compiled = compile(c, arch);
    let nm = native_metrics(&compiled.native);
    let lnn = arch == Architecture::Lnn;
    let full = cfg.aqft_cutoff.is_none_or(|m| m as usize >= cfg.n);
    let predicted = formulas::native_depth(cfg.method, cfg.n, lnn).filter(|_| full);
    let deviation = predicted.map(|p| (nm.depth as f64 - p as f64) / p as f64);
    let abstract_slots = schedule_slots(&compiled.abstract_circuit).abstract_slots;
    let overhead = formulas::lnn_overhead(cfg.method, cfg.n).filter(|_| lnn);
    let fc_pred = formulas::native_fc(cfg.method, cfg.n).filter(|_| full);
    let fc_abstract = formulas::abstract_slots(cfg.method, cfg.n);
    let extra = ReportExtra {
        native_total: nm.total,
        global_phase: compiled.native.global_phase,
        lnn_extra_slots: lnn.then_some(abstract_slots as i64 - fc_slots as i64),
        lnn_slots_formula_additional: overhead.map(|o| o.slots),
        lnn_slots_formula_absolute: overhead.and(fc_abstract).map(|s| s + overhead.map_or(0, |o| o.slots)),
        cx_formula: fc_pred.map(|p| p.cx + overhead.map_or(0, |o| o.cx)),
        swap_formula: overhead.map(|o| o.swaps),
    };
    MetricsReport {
        n: cfg.n,
        method: cfg.method,
        arch,
        aqft_cutoff: cfg.aqft_cutoff,
        abstract_slots,
        native_depth: nm.depth,
        cx: nm.cx,
        rz: nm.rz,
        sx: nm.sx,
        x: nm.x,
        swap_inserted: compiled.swaps,
        paper_depth_formula: predicted,
        deviation,
        extra: Some(extra),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cis;
    use crate::verify::{circuit_unitary, unpermute_rows};

    fn native_matches(c: &Circuit) -> f64 {
        let nc = lower_to_ngs(c);
        assert!(nc.is_native());
        let src = circuit_unitary(c).unwrap();
        let got = circuit_unitary(&nc.circuit).unwrap().scale(cis(nc.global_phase));
        src.max_abs_diff(&got)
    }

    #[test]
    fn hadamard_is_three_gates() {
        let mut c = Circuit::new(1);
        c.push(Gate::h(1));
        let nc = lower_to_ngs(&c);
        assert_eq!(nc.circuit.len(), 3);
        assert!((nc.global_phase - PI / 4.0).abs() < 1e-15);
        assert!(native_matches(&c) < 1e-15);
    }

    #[test]
    fn cp_is_five_gates_depth_four() {
        let mut c = Circuit::new(2);
        c.push(Gate::cp(1, 2, PI / 2.0));
        let nc = lower_to_ngs(&c);
        let m = native_metrics(&nc);
        assert_eq!((m.total, m.depth, m.cx), (5, 4, 2));
        assert!(native_matches(&c) < 1e-14);
    }

    #[test]
    fn generic_controlled_at_most_fourteen() {
        let v = Unitary2::rz(0.3).mul(&Unitary2::ry(1.2)).mul(&Unitary2::rz(-0.8)).with_phase(0.5);
        let mut c = Circuit::new(2);
        c.push(Gate::cu2(2, 1, v));
        let m = native_metrics(&lower_to_ngs(&c));
        assert!(m.total <= 14, "{m:?}");
        assert_eq!((m.cx, m.sx), (2, 4));
        assert!(native_matches(&c) < 1e-13);
    }

    #[test]
    fn single_qubit_kinds_lower_exactly() {
        let mut c = Circuit::new(1);
        c.extend([
            Gate::single(GateKind::Ry(0.7), 1),
            Gate::single(GateKind::Rx(-2.1), 1),
            Gate::u2(1, Unitary2::t()),
            Gate::x(1),
            Gate::p(1, 3.0),
        ]);
        assert!(native_matches(&c) < 1e-13);
    }

    #[test]
    fn swap_is_three_cx() {
        let mut c = Circuit::new(2);
        c.push(Gate::swap(1, 2));
        let m = native_metrics(&lower_to_ngs(&c));
        assert_eq!((m.cx, m.total), (3, 3));
        assert!(native_matches(&c) < 1e-15);
    }

    #[test]
    fn swap_then_cp_on_same_pair_cancels_a_cx() {
        let mut c = Circuit::new(2);
        c.extend([Gate::swap(1, 2), Gate::cp(2, 1, 0.4)]);
        let m = native_metrics(&lower_to_ngs(&c));
        assert_eq!(m.cx, 3);
        assert!(native_matches(&c) < 1e-14);
    }

    #[test]
    fn rz_merge_and_wrap() {
        let mut c = Circuit::new(1);
        c.extend([Gate::rz(1, 3.0), Gate::rz(1, 3.0), Gate::rz(1, -6.0)]);
        let nc = lower_to_ngs(&c);
        assert!(nc.circuit.is_empty());
        assert!(native_matches(&c) < 1e-15);
    }

    #[test]
    fn empty_metrics_are_zero() {
        let m = native_metrics(&lower_to_ngs(&Circuit::new(3)));
        assert_eq!(m, NativeMetrics::default());
    }

    #[test]
    fn adjacent_only_circuit_routes_unchanged() {
        let mut c = Circuit::new(3);
        c.extend([Gate::cx(1, 2), Gate::cp(3, 2, 0.1), Gate::h(3)]);
        let r = route_lnn(&c);
        assert_eq!((r.swaps, r.final_perm.clone()), (0, vec![1, 2, 3]));
        assert_eq!(r.circuit.gates, c.gates);
    }

    #[test]
    fn routing_preserves_unitary_up_to_permutation() {
        let mut c = Circuit::new(4);
        c.extend([Gate::cp(1, 4, 0.3), Gate::h(2), Gate::cx(4, 1), Gate::cu2(2, 4, Unitary2::sx())]);
        let r = route_lnn(&c);
        assert!(r.swaps > 0);
        for g in &r.circuit.gates {
            if let Some(ctl) = g.control {
                assert_eq!(ctl.abs_diff(g.target), 1);
            }
        }
        let m = unpermute_rows(&circuit_unitary(&r.circuit).unwrap(), &r.final_perm);
        assert!(m.max_abs_diff(&circuit_unitary(&c).unwrap()) < 1e-14);
    }

    #[test]
    fn architecture_parses() {
        assert_eq!("LNN".parse::<Architecture>().unwrap(), Architecture::Lnn);
        assert!("ring".parse::<Architecture>().is_err());
    }
}
