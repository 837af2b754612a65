//! Circuit builders: QFT, increment/decrement, the QFT-based MCX and the
//! three MCU constructions (target substitution, ZYZ, and the C-Rx reference
//! circuit), plus AQFT truncation.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{abc_decompose, root, split_phase};
use crate::circuit::{Circuit, Gate, GateKind, MINUS_BLOCK, PLUS_BLOCK};
use crate::linalg::Unitary2;
use crate::optimizer;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "mcx-qft")]
    McxQft,
    #[serde(rename = "mcu-mod")]
    McuMod,
    #[serde(rename = "mcu-zyz")]
    McuZyz,
    #[serde(rename = "ldd")]
    Ldd,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::McxQft, Method::McuMod, Method::McuZyz, Method::Ldd];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::McxQft => "mcx-qft",
            Method::McuMod => "mcu-mod",
            Method::McuZyz => "mcu-zyz",
            Method::Ldd => "ldd",
        }
    }

    pub fn min_n(&self) -> usize {
        match self {
            Method::Ldd => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Method {
    type Err = SynthError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| SynthError::UnknownMethod(s.to_string()))
    }
}

/// Where the controlled-phase correction for `U = e^{i delta} S` lives.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum LadderSide {
    /// Around the +1 block. For `mcu-mod` this is folded into the CU2 roots.
    #[default]
    Plus,
    /// Around the -1 block.
    Minus,
    /// Half of `delta` on each side.
    Split,
}

impl LadderSide {
    /// Share of delta carried by the plus side and the minus side.
    pub fn weights(&self) -> (f64, f64) {
        match self {
            LadderSide::Plus => (1.0, 0.0),
            LadderSide::Minus => (0.0, 1.0),
            LadderSide::Split => (0.5, 0.5),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("{method} needs n >= {min}, got {n}")]
    TooFewQubits { method: Method, n: usize, min: usize },
    #[error("aqft cutoff {m} outside 1..={n}")]
    BadCutoff { m: u32, n: usize },
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthConfig {
    pub method: Method,
    pub n: usize,
    /// Ignored by `mcx-qft`.
    pub u: Unitary2,
    pub aqft_cutoff: Option<u32>,
    /// Merge the phase columns into neighbouring controlled gates.
    pub optimize: bool,
    pub ladder: LadderSide,
}

impl SynthConfig {
    pub fn new(method: Method, n: usize, u: Unitary2) -> Self {
        SynthConfig { method, n, u, aqft_cutoff: None, optimize: true, ladder: LadderSide::Plus }
    }

    pub fn mcx(n: usize) -> Self {
        Self::new(Method::McxQft, n, Unitary2::x())
    }

    pub fn unoptimized(mut self) -> Self {
        self.optimize = false;
        self
    }

    pub fn with_aqft(mut self, m: u32) -> Self {
        self.aqft_cutoff = Some(m);
        self
    }

    pub fn with_ladder(mut self, side: LadderSide) -> Self {
        self.ladder = side;
        self
    }

    fn validate(&self) -> Result<(), SynthError> {
        let min = self.method.min_n();
        if self.n < min {
            return Err(SynthError::TooFewQubits { method: self.method, n: self.n, min });
        }
        if let Some(m) = self.aqft_cutoff {
            if m < 1 || m as usize > self.n {
                return Err(SynthError::BadCutoff { m, n: self.n });
            }
        }
        Ok(())
    }
}

/// `ceil(log2 n)`, the default AQFT cutoff.
pub fn default_aqft_cutoff(n: usize) -> u32 {
    (usize::BITS - (n.max(1) - 1).leading_zeros()).max(1)
}

fn angle(k: usize) -> f64 {
    PI / 2f64.powi(k as i32)
}

/// Target-wire substitution: `V_m` replaces `Z^{1/2^(m-1)}` on the top wire.
type RootFamily<'a> = &'a dyn Fn(u32) -> Unitary2;

fn qft_into(c: &mut Circuit, k: usize, sub: Option<RootFamily>) {
    for t in (1..=k).rev() {
        let on_target = sub.filter(|_| t == k);
        if on_target.is_none() {
            c.push(Gate::h(t));
        }
        for ctl in (1..t).rev() {
            let m = (t - ctl + 1) as u32;
            c.push(match on_target {
                Some(f) => Gate::cu2(ctl, t, f(m)).with_root(m),
                None => Gate::cp(ctl, t, angle(t - ctl)).with_root(m),
            });
        }
    }
}

fn qft_dagger_into(c: &mut Circuit, k: usize, sub: Option<RootFamily>) {
    for t in 1..=k {
        let on_target = sub.filter(|_| t == k);
        for ctl in 1..t {
            let m = (t - ctl + 1) as u32;
            c.push(match on_target {
                Some(f) => Gate::cu2(ctl, t, f(m).adjoint()).with_root(m),
                None => Gate::cp(ctl, t, -angle(t - ctl)).with_root(m),
            });
        }
        if on_target.is_none() {
            c.push(Gate::h(t));
        }
    }
}

/// QFT, phase column, inverse QFT on wires `1..=k`, recorded as a block.
fn shift_block(c: &mut Circuit, name: &str, k: usize, sign: f64, sub: Option<RootFamily>) {
    let start = c.len();
    qft_into(c, k, sub);
    for j in (1..=k).rev() {
        let m = j as u32;
        match sub.filter(|_| j == k) {
            Some(f) => c.push(Gate::u2(j, f(m)).with_root(m)),
            None => c.push(Gate::p(j, sign * angle(j - 1)).with_root(m)),
        }
    }
    qft_dagger_into(c, k, sub);
    c.mark_block(name, k, start);
}

/// QFT on `k` wires without the final bit reversal.
pub fn build_qft(k: usize) -> Circuit {
    let mut c = Circuit::new(k);
    qft_into(&mut c, k, None);
    c
}

/// `|a> -> |a + 1 mod 2^k>`.
pub fn build_increment(k: usize) -> Circuit {
    let mut c = Circuit::new(k);
    shift_block(&mut c, PLUS_BLOCK, k, 1.0, None);
    c
}

/// `|a> -> |a - 1 mod 2^k>`.
pub fn build_decrement(k: usize) -> Circuit {
    let mut c = Circuit::new(k);
    shift_block(&mut c, MINUS_BLOCK, k, -1.0, None);
    c
}

fn merge(c: Circuit, collapse: bool) -> Circuit {
    let (c, _) = optimizer::merge_phase_columns(&c);
    if collapse {
        optimizer::collapse_cz(&c).0
    } else {
        c
    }
}

/// Increment on all `n` wires followed by decrement on the low `n - 1`.
pub fn build_mcx_qft(cfg: &SynthConfig) -> Result<Circuit, SynthError> {
    cfg.validate()?;
    let n = cfg.n;
    let mut c = Circuit::new(n);
    shift_block(&mut c, PLUS_BLOCK, n, 1.0, None);
    shift_block(&mut c, MINUS_BLOCK, n - 1, -1.0, None);
    Ok(if cfg.optimize { merge(c, false) } else { c })
}

/// MCX skeleton with the target's Z-roots replaced by roots of `U` and the
/// target Hadamards removed.
pub fn build_mcu_mod(cfg: &SynthConfig) -> Result<Circuit, SynthError> {
    cfg.validate()?;
    let n = cfg.n;
    let (delta, s) = split_phase(&cfg.u);
    let (w_plus, w_minus) = cfg.ladder.weights();
    // the plus-side share of the phase rides on the CU2 roots themselves
    let family = move |m: u32| root(&s, m).with_phase(delta * w_plus / 2f64.powi(m as i32 - 1));
    let mut c = Circuit::new(n);
    shift_block(&mut c, PLUS_BLOCK, n, 1.0, Some(&family));
    shift_block(&mut c, MINUS_BLOCK, n - 1, -1.0, None);
    let c = if cfg.optimize { merge(c, true) } else { c };
    Ok(optimizer::insert_phase_ladder(&c, delta * w_minus, LadderSide::Minus))
}

/// `C`, +1 mod 2^n, `B`, -1 mod 2^n, `A` with `ABC = I` and
/// `U = e^{i delta} A X B X C`; the phase comes from a ladder on the controls.
pub fn build_mcu_zyz(cfg: &SynthConfig) -> Result<Circuit, SynthError> {
    cfg.validate()?;
    let n = cfg.n;
    let (delta, abc) = abc_decompose(&cfg.u);
    let mut c = Circuit::new(n);
    c.push(Gate::u2(n, abc.c));
    shift_block(&mut c, PLUS_BLOCK, n, 1.0, None);
    c.push(Gate::u2(n, abc.b));
    shift_block(&mut c, MINUS_BLOCK, n, -1.0, None);
    c.push(Gate::u2(n, abc.a));
    let c = if cfg.optimize { merge(c, true) } else { c };
    let (w_plus, w_minus) = cfg.ladder.weights();
    let c = optimizer::insert_phase_ladder(&c, delta * w_plus, LadderSide::Plus);
    Ok(optimizer::insert_phase_ladder(&c, delta * w_minus, LadderSide::Minus))
}

/// The C-Rx form of `mcu-mod`: every control-wire Hadamard bracket is folded
/// into its C-Rz gates (turning them into C-Rx) and the two CX become
/// C-Rx(+-pi).
pub fn build_ldd(cfg: &SynthConfig) -> Result<Circuit, SynthError> {
    cfg.validate()?;
    let base = build_mcu_mod(&SynthConfig { method: Method::McuMod, aqft_cutoff: None, optimize: true, ..*cfg })?;
    let (crz, _) = optimizer::cp_to_crz(&base);
    let minus = crz.block(MINUS_BLOCK).map(|b| b.start..b.end);
    let n = cfg.n;
    let c = optimizer::rewrite(&crz, |i, g| match g.kind {
        GateKind::H if g.target >= 3 && g.target < n => vec![],
        GateKind::CRz(a) if g.target >= 3 => vec![Gate { kind: GateKind::CRx(a), ..*g }],
        GateKind::CX => {
            let sign = if minus.as_ref().is_some_and(|r| r.contains(&i)) { -1.0 } else { 1.0 };
            vec![Gate::crx(g.control.expect("cx control"), g.target, sign * PI).with_root(1)]
        }
        _ => vec![*g],
    });
    Ok(c)
}

/// Drops controlled gates whose root index exceeds `m_max`.
pub fn apply_aqft(c: &Circuit, m_max: u32) -> Circuit {
    optimizer::rewrite(c, |_, g| {
        let truncatable = matches!(g.kind, GateKind::CP(_) | GateKind::CRz(_) | GateKind::CRx(_) | GateKind::CU2(_));
        match g.root_index() {
            Some(m) if truncatable && m > m_max => vec![],
            _ => vec![*g],
        }
    })
}

/// Splits every CU2 into its control phase and a special-unitary CU2,
/// pairing the two for slot scheduling.
pub fn unfold_cu2_phases(c: &Circuit) -> Circuit {
    optimizer::rewrite(c, |_, g| match g.kind {
        GateKind::CU2(v) => {
            let (phi, s) = split_phase(&v);
            let ctl = g.control.expect("cu2 control");
            if phi == 0.0 {
                return vec![*g];
            }
            let mut p = Gate::p(ctl, phi);
            p.paired = true;
            vec![p, Gate { kind: GateKind::CU2(s), ..*g }]
        }
        _ => vec![*g],
    })
}

pub fn synthesize(cfg: &SynthConfig) -> Result<Circuit, SynthError> {
    let c = match cfg.method {
        Method::McxQft => build_mcx_qft(cfg)?,
        Method::McuMod => build_mcu_mod(cfg)?,
        Method::McuZyz => build_mcu_zyz(cfg)?,
        Method::Ldd => build_ldd(cfg)?,
    };
    Ok(match cfg.aqft_cutoff {
        Some(m) => apply_aqft(&c, m),
        None => c,
    })
}

/// The operator the circuit for `cfg` is meant to implement on its target.
pub fn target_unitary(cfg: &SynthConfig) -> Unitary2 {
    match cfg.method {
        Method::McxQft => Unitary2::x(),
        _ => cfg.u,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{count_gates, schedule_slots};
    use crate::linalg::CMatrix;
    use crate::verify::{circuit_unitary, verify_mcu};

    #[test]
    fn qft1_is_h() {
        assert_eq!(build_qft(1).gates, vec![Gate::h(1)]);
    }

    #[test]
    fn qft2_layout() {
        let g = build_qft(2).gates;
        assert_eq!(g.len(), 3);
        assert_eq!((g[0].kind, g[0].target), (GateKind::H, 2));
        assert_eq!((g[1].kind, g[1].control, g[1].target), (GateKind::CP(PI / 2.0), Some(1), 2));
        assert_eq!((g[2].kind, g[2].target), (GateKind::H, 1));
    }

    fn cyclic(k: usize, step: isize) -> CMatrix {
        let dim = 1usize << k;
        let mut m = CMatrix::zeros(dim, dim);
        for a in 0..dim {
            let b = (a as isize + step).rem_euclid(dim as isize) as usize;
            m.set(b, a, num_complex::Complex64::new(1.0, 0.0));
        }
        m
    }

    #[test]
    fn increment_is_cyclic_shift() {
        for k in 1..=5 {
            let u = circuit_unitary(&build_increment(k)).unwrap();
            assert!(u.max_abs_diff(&cyclic(k, 1)) < 1e-10, "k={k}");
            let d = circuit_unitary(&build_decrement(k)).unwrap();
            assert!(d.max_abs_diff(&cyclic(k, -1)) < 1e-10, "k={k}");
        }
    }

    #[test]
    fn cutoff_is_ceil_log2() {
        let got: Vec<u32> = (1..=9).map(default_aqft_cutoff).collect();
        assert_eq!(got, vec![1, 1, 2, 2, 3, 3, 3, 3, 4]);
    }

    #[test]
    fn small_n_rejected() {
        let cfg = SynthConfig::new(Method::Ldd, 2, Unitary2::x());
        assert!(matches!(synthesize(&cfg), Err(SynthError::TooFewQubits { .. })));
        let cfg = SynthConfig::mcx(4).with_aqft(5);
        assert!(matches!(synthesize(&cfg), Err(SynthError::BadCutoff { .. })));
    }

    #[test]
    fn mcx_n2_is_cx() {
        for opt in [false, true] {
            let mut cfg = SynthConfig::mcx(2);
            cfg.optimize = opt;
            assert!(verify_mcu(&synthesize(&cfg).unwrap(), &Unitary2::x(), 1e-9).unwrap().pass);
        }
    }

    #[test]
    fn mod_n2_is_single_cu2() {
        let u = Unitary2::h().with_phase(0.4);
        let c = synthesize(&SynthConfig::new(Method::McuMod, 2, u)).unwrap();
        assert_eq!(c.len(), 1);
        assert!(matches!(c.gates[0].kind, GateKind::CU2(_)));
        assert!(verify_mcu(&c, &u, 1e-12).unwrap().pass);
    }

    #[test]
    fn mod_counts_at_five() {
        let c = synthesize(&SynthConfig::new(Method::McuMod, 5, Unitary2::x())).unwrap();
        let k = count_gates(&c);
        assert_eq!((k.h, k.cp, k.cu2, k.cx), (8, 16, 7, 2));
        assert_eq!(schedule_slots(&c).abstract_slots, 22);
    }

    #[test]
    fn unfolded_phases_keep_slots_and_unitary() {
        let u = Unitary2::ry(0.7).with_phase(1.1);
        let c = synthesize(&SynthConfig::new(Method::McuMod, 5, u)).unwrap();
        let unf = unfold_cu2_phases(&c);
        assert_eq!(count_gates(&unf).p, 7);
        assert_eq!(schedule_slots(&unf).abstract_slots, schedule_slots(&c).abstract_slots);
        assert!(verify_mcu(&unf, &u, 1e-10).unwrap().pass);
    }

    #[test]
    fn ldd_has_no_interior_hadamards() {
        let c = synthesize(&SynthConfig::new(Method::Ldd, 5, Unitary2::ry(0.3))).unwrap();
        assert_eq!(count_gates(&c).h, 0);
    }
}
