//! Seeded single-qubit gates for experiments: Euler angles are `pi p / q`
//! with small integers, and near-trivial draws are rejected.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::ZyzAngles;
use crate::linalg::{cis, Unitary2};

/// Numerators are drawn from `-MAX_NUM..=MAX_NUM`, denominators from `1..=MAX_DEN`.
pub const MAX_NUM: i32 = 16;
pub const MAX_DEN: i32 = 16;
/// Distance (up to global phase) below which a draw counts as trivial.
pub const TRIVIAL_TOL: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum SampleError {
    #[error("unknown gate name `{0}` (expected one of I, X, Y, Z, H, S, T, SX)")]
    UnknownGate(String),
    #[error("expected four comma-separated angles d,a,t,b, got `{0}`")]
    BadAngles(String),
}

/// `min over phi` of `max |u - e^{i phi} v|`, with the phase taken from the
/// overlap of the two matrices.
pub fn phase_distance(u: &Unitary2, v: &Unitary2) -> f64 {
    let (a, b) = (u.entries(), v.entries());
    let overlap: num_complex::Complex64 = a.iter().zip(&b).map(|(x, y)| y.conj() * x).sum();
    let w = cis(overlap.arg());
    a.iter().zip(&b).map(|(x, y)| (x - w * y).norm()).fold(0.0, f64::max)
}

/// Within [`TRIVIAL_TOL`] of `I`, `X` or `Z` up to global phase.
pub fn is_trivial(u: &Unitary2) -> bool {
    [Unitary2::identity(), Unitary2::x(), Unitary2::z()].iter().any(|g| phase_distance(u, g) < TRIVIAL_TOL)
}

fn rational_angle(rng: &mut ChaCha8Rng) -> f64 {
    let p = rng.gen_range(-MAX_NUM..=MAX_NUM);
    let q = rng.gen_range(1..=MAX_DEN);
    PI * p as f64 / q as f64
}

/// Draws ZYZ angles (with the phase) until the gate is non-trivial.
pub fn random_angles(rng: &mut ChaCha8Rng, with_phase: bool) -> ZyzAngles {
    loop {
        let delta = if with_phase { rational_angle(rng) } else { 0.0 };
        let z = ZyzAngles { delta, alpha: rational_angle(rng), theta: rational_angle(rng), beta: rational_angle(rng) };
        if !is_trivial(&z.reconstruct()) {
            return z;
        }
    }
}

/// A random `U(2)` gate for `seed`.
pub fn random_u2(seed: u64) -> Unitary2 {
    random_angles(&mut ChaCha8Rng::seed_from_u64(seed), true).reconstruct()
}

/// A random `SU(2)` gate for `seed`.
pub fn random_su2(seed: u64) -> Unitary2 {
    random_angles(&mut ChaCha8Rng::seed_from_u64(seed), false).reconstruct()
}

/// `count` random `U(2)` gates from one stream.
pub fn random_batch(seed: u64, count: usize) -> Vec<Unitary2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_angles(&mut rng, true).reconstruct()).collect()
}

pub fn named_gate(name: &str) -> Result<Unitary2, SampleError> {
    Ok(match name.to_ascii_uppercase().as_str() {
        "I" => Unitary2::identity(),
        "X" => Unitary2::x(),
        "Y" => Unitary2::y(),
        "Z" => Unitary2::z(),
        "H" => Unitary2::h(),
        "S" => Unitary2::s(),
        "T" => Unitary2::t(),
        "SX" => Unitary2::sx(),
        _ => return Err(SampleError::UnknownGate(name.to_string())),
    })
}

/// Parses `d,a,t,b` as `e^{i d} Rz(a) Ry(t) Rz(b)`.
pub fn parse_angles(s: &str) -> Result<Unitary2, SampleError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| SampleError::BadAngles(s.to_string()))?;
    let [delta, alpha, theta, beta] = v[..] else { return Err(SampleError::BadAngles(s.to_string())) };
    Ok(ZyzAngles { delta, alpha, theta, beta }.reconstruct())
}
