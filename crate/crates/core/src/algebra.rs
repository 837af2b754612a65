//! Single-qubit decompositions (ZYZ, ABC), principal matrix roots and a small
//! battery of gate identities checked as dense matrices.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{eig2, kron, wrap_angle, CMatrix, Unitary2};

/// `U = e^{i delta} Rz(alpha) Ry(theta) Rz(beta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZyzAngles {
    pub delta: f64,
    pub alpha: f64,
    pub theta: f64,
    pub beta: f64,
}

impl ZyzAngles {
    pub fn reconstruct(&self) -> Unitary2 {
        Unitary2::rz(self.alpha).mul(&Unitary2::ry(self.theta)).mul(&Unitary2::rz(self.beta)).with_phase(self.delta)
    }
}

const DEGENERATE: f64 = 1e-14;

pub fn zyz_decompose(u: &Unitary2) -> ZyzAngles {
    let delta = wrap_angle(u.det().arg() / 2.0);
    let v = u.with_phase(-delta).entries();
    let (c0, s0) = (v[0].norm(), v[2].norm());
    if s0 <= DEGENERATE {
        return ZyzAngles { delta, alpha: 2.0 * v[3].arg(), theta: 0.0, beta: 0.0 };
    }
    if c0 <= DEGENERATE {
        return ZyzAngles { delta, alpha: 0.0, theta: PI, beta: -2.0 * v[2].arg() };
    }
    let theta = 2.0 * s0.atan2(c0);
    let (p11, p10) = (v[3].arg(), v[2].arg());
    ZyzAngles { delta, alpha: p11 + p10, theta, beta: p11 - p10 }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbcTriple {
    pub a: Unitary2,
    pub b: Unitary2,
    pub c: Unitary2,
}

/// `U = e^{i delta} A X B X C` with `ABC = I`.
pub fn abc_decompose(u: &Unitary2) -> (f64, AbcTriple) {
    let z = zyz_decompose(u);
    (z.delta, abc_from_zyz(&z))
}

pub fn abc_from_zyz(z: &ZyzAngles) -> AbcTriple {
    AbcTriple {
        a: Unitary2::rz(z.alpha).mul(&Unitary2::ry(z.theta / 2.0)),
        b: Unitary2::ry(-z.theta / 2.0).mul(&Unitary2::rz(-(z.alpha + z.beta) / 2.0)),
        c: Unitary2::rz((z.beta - z.alpha) / 2.0),
    }
}

/// Principal `2^(m-1)`-th root: eigenphases on `(-pi, pi]` divided by `2^(m-1)`.
pub fn root(u: &Unitary2, m: u32) -> Unitary2 {
    assert!(m >= 1, "root index starts at 1");
    if m == 1 {
        return *u;
    }
    let k = 2f64.powi(m as i32 - 1);
    eig2(u).rebuild_with(|l| l / k)
}

/// Splits `u = e^{i delta} s` with `s` special unitary, using the ZYZ phase.
pub fn split_phase(u: &Unitary2) -> (f64, Unitary2) {
    let delta = zyz_decompose(u).delta;
    (delta, u.with_phase(-delta))
}

/// Root family with the global phase carried separately:
/// `e^{i delta / 2^(m-1)} root(S, m)`.
pub fn folded_root(u: &Unitary2, m: u32) -> Unitary2 {
    let (delta, s) = split_phase(u);
    root(&s, m).with_phase(delta / 2f64.powi(m as i32 - 1))
}

fn embed_controlled(u: &Unitary2) -> CMatrix {
    // control is the high bit of a 2-qubit index (control (x) target)
    let mut m = CMatrix::identity(4);
    let e = u.entries();
    m.set(2, 2, e[0]);
    m.set(2, 3, e[1]);
    m.set(3, 2, e[2]);
    m.set(3, 3, e[3]);
    m
}

fn cx4() -> CMatrix {
    embed_controlled(&Unitary2::x())
}

fn on_control(u: &Unitary2) -> CMatrix {
    kron(&u.to_cmatrix(), &CMatrix::identity(2)).expect("4x4")
}

fn on_target(u: &Unitary2) -> CMatrix {
    kron(&CMatrix::identity(2), &u.to_cmatrix()).expect("4x4")
}

fn prod(ms: &[CMatrix]) -> CMatrix {
    ms.iter().skip(1).fold(ms[0].clone(), |acc, m| acc.matmul(m).expect("square"))
}

fn random_unitary(rng: &mut ChaCha8Rng) -> Unitary2 {
    let z = ZyzAngles {
        delta: rng.gen_range(-PI..PI),
        alpha: rng.gen_range(-PI..PI),
        theta: rng.gen_range(0.0..PI),
        beta: rng.gen_range(-PI..PI),
    };
    z.reconstruct()
}

/// Evaluates the named identities at `draws` random parameter values each and
/// reports the largest deviation seen per identity.
pub fn identity_battery_with(draws: usize, seed: u64) -> Vec<(String, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = vec![0.0f64; 7];
    for _ in 0..draws.max(1) {
        let m: u32 = rng.gen_range(1..=12);
        let d: f64 = rng.gen_range(-2.0 * PI..2.0 * PI);
        let g: f64 = rng.gen_range(-2.0 * PI..2.0 * PI);

        // R_m is the 2^(m-1)-th principal root of Z
        let rm = Unitary2::p(PI / 2f64.powi(m as i32 - 1));
        worst[0] = worst[0].max(rm.max_abs_diff(&root(&Unitary2::z(), m)));

        // controlled R_m via CRz and a phase on the control
        let half = PI / 2f64.powi(m as i32);
        let lhs = embed_controlled(&Unitary2::p(2.0 * half));
        let via_cx = prod(&[
            on_target(&Unitary2::rz(half)),
            cx4(),
            on_target(&Unitary2::rz(-half)),
            cx4(),
            on_control(&Unitary2::p(half)),
        ]);
        let via_crz = embed_controlled(&Unitary2::rz(2.0 * half)).matmul(&on_control(&Unitary2::p(half))).unwrap();
        worst[1] = worst[1].max(lhs.max_abs_diff(&via_cx)).max(lhs.max_abs_diff(&via_crz));

        // X P(-d/2) X P(d/2) = Rz(d) = e^{-i d/2} P(d)
        let x = Unitary2::x();
        let l5 = x.mul(&Unitary2::p(-d / 2.0)).mul(&x).mul(&Unitary2::p(d / 2.0));
        let rz = Unitary2::rz(d);
        worst[2] = worst[2].max(l5.max_abs_diff(&rz)).max(rz.max_abs_diff(&Unitary2::p(d).with_phase(-d / 2.0)));

        // P(d/2) X P(-d/2) X = Rz(d)
        let l6 = Unitary2::p(d / 2.0).mul(&x).mul(&Unitary2::p(-d / 2.0)).mul(&x);
        worst[3] = worst[3].max(l6.max_abs_diff(&rz));

        // C-U(2)^{1/2^(m-1)} = C-S^{1/2^(m-1)} (P(delta/2^(m-1)) (x) I)
        let u = random_unitary(&mut rng);
        let (delta, s) = split_phase(&u);
        let k = 2f64.powi(m as i32 - 1);
        let lhs = embed_controlled(&folded_root(&u, m));
        let rhs = embed_controlled(&root(&s, m)).matmul(&on_control(&Unitary2::p(delta / k))).unwrap();
        worst[4] = worst[4].max(lhs.max_abs_diff(&rhs));

        // HZH = X
        let h = Unitary2::h();
        worst[5] = worst[5].max(h.mul(&Unitary2::z()).mul(&h).max_abs_diff(&x));

        // H Rx(g) H = Rz(g)
        worst[6] = worst[6].max(h.mul(&Unitary2::rx(g)).mul(&h).max_abs_diff(&Unitary2::rz(g)));
    }
    let names = [
        "qft-phase-root",
        "controlled-phase-via-crz",
        "phase-kickback-x-first",
        "phase-kickback-p-first",
        "controlled-u2-root-phase-split",
        "hzh-is-x",
        "h-rx-h-is-rz",
    ];
    names.iter().map(|s| s.to_string()).zip(worst).collect()
}

/// The battery at 100 draws with a fixed seed.
pub fn identity_battery() -> Vec<(String, f64)> {
    identity_battery_with(100, 0x5eed)
}
