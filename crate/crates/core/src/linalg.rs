//! Dense complex matrices, 2x2 unitaries and the equivalence predicates used
//! by every other module.
//!
//! Storage is row-major `Vec<Complex64>`. Nothing here is clever; the largest
//! matrices we ever build are `2^12 x 2^12`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use thiserror::Error;

/// Default tolerance for predicates such as unitarity checks.
pub const TOL: f64 = 1e-10;
/// Tolerance for algebraic identities evaluated in floating point.
pub const TOL_IDENTITY: f64 = 1e-12;
/// Default row cap for dense builds (`2^12`).
pub const DIM_CAP: usize = 1 << 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension {dim} exceeds the configured cap of {cap}")]
    Dimension { dim: usize, cap: usize },
    #[error("shape mismatch: {0}x{1} vs {2}x{3}")]
    Shape(usize, usize, usize, usize),
    #[error("reference matrix has no nonzero entry")]
    ZeroReference,
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `e^{i phi}`.
pub fn cis(phi: f64) -> C64 {
    C64::from_polar(1.0, phi)
}

/// Maps an angle onto the principal branch `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        assert_eq!(rows * cols, data.len(), "entry count must equal rows*cols");
        CMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_vec(rows, cols, vec![C64::new(0.0, 0.0); rows * cols])
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape(self.rows, self.cols, other.rows, other.cols));
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// Max-norm distance `max |a_ij - b_ij|`. Panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `||M^dagger M - I||_max`.
    pub fn unitarity_deviation(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let p = self.adjoint().matmul(self).expect("square");
        p.max_abs_diff(&CMatrix::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }
}

/// Kronecker product with the default dimension cap.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, LinalgError> {
    kron_capped(a, b, DIM_CAP)
}

pub fn kron_capped(a: &CMatrix, b: &CMatrix, cap: usize) -> Result<CMatrix, LinalgError> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    if rows > cap || cols > cap {
        return Err(LinalgError::Dimension { dim: rows.max(cols), cap });
    }
    let mut out = CMatrix::zeros(rows, cols);
    for ai in 0..a.rows {
        for aj in 0..a.cols {
            let x = a.get(ai, aj);
            for bi in 0..b.rows {
                for bj in 0..b.cols {
                    out.data[(ai * b.rows + bi) * cols + aj * b.cols + bj] = x * b.get(bi, bj);
                }
            }
        }
    }
    Ok(out)
}

/// Returns `Some(phi)` when `a = e^{i phi} b` entrywise within `tol`.
///
/// The phase is read off the largest-magnitude entry of `b`.
pub fn equal_up_to_global_phase(a: &CMatrix, b: &CMatrix, tol: f64) -> Result<Option<f64>, LinalgError> {
    if (a.rows, a.cols) != (b.rows, b.cols) {
        return Err(LinalgError::Shape(a.rows, a.cols, b.rows, b.cols));
    }
    let (k, bk) = b.data.iter().enumerate().max_by(|x, y| x.1.norm().total_cmp(&y.1.norm())).expect("nonempty");
    if bk.norm() == 0.0 {
        return Err(LinalgError::ZeroReference);
    }
    let ratio = a.data[k] / bk;
    if ratio.norm() < 1e-300 {
        return Ok(None);
    }
    let phi = ratio.arg();
    let w = cis(phi);
    let dev = a.data.iter().zip(&b.data).map(|(x, y)| (x - w * y).norm()).fold(0.0, f64::max);
    Ok(if dev <= tol { Some(phi) } else { None })
}

/// A certified 2x2 unitary, row-major `[m00, m01, m10, m11]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2 {
    m: [C64; 4],
}

impl Unitary2 {
    pub fn new(m: [C64; 4]) -> Result<Self, LinalgError> {
        let u = Unitary2 { m };
        let dev = u.unitarity_deviation();
        if dev > TOL {
            return Err(LinalgError::NotUnitary(dev));
        }
        Ok(u)
    }

    /// Skips the certificate; only for matrices unitary by construction.
    pub(crate) fn raw(m: [C64; 4]) -> Self {
        Unitary2 { m }
    }

    pub fn from_cmatrix(m: &CMatrix) -> Result<Self, LinalgError> {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(LinalgError::Shape(m.rows(), m.cols(), 2, 2));
        }
        Self::new([m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1)])
    }

    pub fn to_cmatrix(&self) -> CMatrix {
        CMatrix::from_vec(2, 2, self.m.to_vec())
    }

    pub fn entries(&self) -> [C64; 4] {
        self.m
    }

    pub fn identity() -> Self {
        Self::raw([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
    }

    pub fn x() -> Self {
        Self::raw([c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    pub fn y() -> Self {
        Self::raw([c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
    }

    pub fn z() -> Self {
        Self::raw([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
    }

    pub fn h() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::raw([c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])
    }

    pub fn s() -> Self {
        Self::p(PI / 2.0)
    }

    pub fn t() -> Self {
        Self::p(PI / 4.0)
    }

    pub fn sx() -> Self {
        Self::raw([c(0.5, 0.5), c(0.5, -0.5), c(0.5, -0.5), c(0.5, 0.5)])
    }

    pub fn sxdg() -> Self {
        Self::sx().adjoint()
    }

    /// `diag(e^{-i g/2}, e^{i g/2})`.
    pub fn rz(g: f64) -> Self {
        Self::raw([cis(-g / 2.0), c(0.0, 0.0), c(0.0, 0.0), cis(g / 2.0)])
    }

    pub fn ry(t: f64) -> Self {
        let (s, co) = (t / 2.0).sin_cos();
        Self::raw([c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
    }

    pub fn rx(t: f64) -> Self {
        let (s, co) = (t / 2.0).sin_cos();
        Self::raw([c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)])
    }

    /// `diag(1, e^{i g})`.
    pub fn p(g: f64) -> Self {
        Self::raw([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), cis(g)])
    }

    pub fn mul(&self, o: &Unitary2) -> Unitary2 {
        let a = &self.m;
        let b = &o.m;
        Self::raw([
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ])
    }

    pub fn adjoint(&self) -> Unitary2 {
        let a = &self.m;
        Self::raw([a[0].conj(), a[2].conj(), a[1].conj(), a[3].conj()])
    }

    pub fn det(&self) -> C64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    /// `e^{i phi} U`.
    pub fn with_phase(&self, phi: f64) -> Unitary2 {
        let w = cis(phi);
        Self::raw(self.m.map(|v| v * w))
    }

    pub fn pow(&self, k: u32) -> Unitary2 {
        let mut out = Self::identity();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn max_abs_diff(&self, o: &Unitary2) -> f64 {
        self.m.iter().zip(&o.m).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn unitarity_deviation(&self) -> f64 {
        self.adjoint().mul(self).max_abs_diff(&Self::identity())
    }

    /// Global-phase-insensitive comparison.
    pub fn equiv(&self, o: &Unitary2, tol: f64) -> bool {
        equal_up_to_global_phase(&self.to_cmatrix(), &o.to_cmatrix(), tol).map(|p| p.is_some()).unwrap_or(false)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.m[1].norm() <= tol && self.m[2].norm() <= tol
    }
}

/// Spectral decomposition of a 2x2 unitary.
#[derive(Clone, Copy, Debug)]
pub struct Eig2 {
    /// Eigenphases on `(-pi, pi]`.
    pub phases: [f64; 2],
    /// Orthonormal eigenvectors, `vectors[k]` belongs to `phases[k]`.
    pub vectors: [[C64; 2]; 2],
}

impl Eig2 {
    /// `V diag(e^{i f(l1)}, e^{i f(l2)}) V^dagger`.
    pub fn rebuild_with(&self, f: impl Fn(f64) -> f64) -> Unitary2 {
        let mut m = [c(0.0, 0.0); 4];
        for k in 0..2 {
            let w = cis(f(self.phases[k]));
            let v = self.vectors[k];
            for i in 0..2 {
                for j in 0..2 {
                    m[i * 2 + j] += w * v[i] * v[j].conj();
                }
            }
        }
        Unitary2::raw(m)
    }

    pub fn rebuild(&self) -> Unitary2 {
        self.rebuild_with(|l| l)
    }
}

fn normalize_vec(v: [C64; 2]) -> [C64; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let mut v = [v[0] / n, v[1] / n];
    // fix the free phase so the first significant component is real positive
    let lead = if v[0].norm() > 1e-12 { v[0] } else { v[1] };
    let ph = cis(-lead.arg());
    v[0] *= ph;
    v[1] *= ph;
    v
}

fn rayleigh_phase(u: &Unitary2, v: &[C64; 2]) -> f64 {
    let m = u.entries();
    let uv0 = m[0] * v[0] + m[1] * v[1];
    let uv1 = m[2] * v[0] + m[3] * v[1];
    wrap_angle((v[0].conj() * uv0 + v[1].conj() * uv1).arg())
}

/// Eigendecomposition of a 2x2 unitary.
pub fn eig2(u: &Unitary2) -> Eig2 {
    let m = u.entries();
    if u.is_diagonal(1e-14) {
        let e0 = [c(1.0, 0.0), c(0.0, 0.0)];
        let e1 = [c(0.0, 0.0), c(1.0, 0.0)];
        return Eig2 { phases: [wrap_angle(m[0].arg()), wrap_angle(m[3].arg())], vectors: [e0, e1] };
    }
    let tr = m[0] + m[3];
    let disc = (tr * tr - 4.0 * u.det()).sqrt();
    let lam = (tr + disc) / 2.0;
    let v1 = if m[1].norm() >= m[2].norm() { [m[1], lam - m[0]] } else { [lam - m[3], m[2]] };
    let v1 = normalize_vec(v1);
    let v2 = normalize_vec([-v1[1].conj(), v1[0].conj()]);
    Eig2 { phases: [rayleigh_phase(u, &v1), rayleigh_phase(u, &v2)], vectors: [v1, v2] }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(u: Unitary2) -> CMatrix {
        u.to_cmatrix()
    }

    #[test]
    fn kron_of_identities() {
        let i4 = kron(&CMatrix::identity(2), &CMatrix::identity(2)).unwrap();
        assert_eq!(i4, CMatrix::identity(4));
    }

    #[test]
    fn kron_zz_is_diagonal() {
        let zz = kron(&m2(Unitary2::z()), &m2(Unitary2::z())).unwrap();
        let expect = [1.0, -1.0, -1.0, 1.0];
        for (i, e) in expect.iter().enumerate() {
            for j in 0..4 {
                let v = if i == j { *e } else { 0.0 };
                assert_eq!(zz.get(i, j), c(v, 0.0));
            }
        }
    }

    #[test]
    fn kron_matches_index_formula() {
        let a = m2(Unitary2::x());
        let b = m2(Unitary2::h());
        let k = kron(&a, &b).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(k.get(i, j), a.get(i / 2, j / 2) * b.get(i % 2, j % 2));
            }
        }
    }

    #[test]
    fn kron_respects_cap() {
        let a = CMatrix::identity(64);
        assert!(matches!(kron_capped(&a, &a, 1024), Err(LinalgError::Dimension { .. })));
    }

    #[test]
    fn global_phase_detects_i() {
        let x = m2(Unitary2::x());
        let ix = x.scale(c(0.0, 1.0));
        let phi = equal_up_to_global_phase(&ix, &x, TOL).unwrap().unwrap();
        assert!((phi - PI / 2.0).abs() < 1e-15);
        assert!(equal_up_to_global_phase(&x, &m2(Unitary2::z()), TOL).unwrap().is_none());
    }

    #[test]
    fn global_phase_errors() {
        assert!(equal_up_to_global_phase(&CMatrix::identity(2), &CMatrix::identity(4), TOL).is_err());
        assert_eq!(
            equal_up_to_global_phase(&CMatrix::identity(2), &CMatrix::zeros(2, 2), TOL),
            Err(LinalgError::ZeroReference)
        );
    }

    #[test]
    fn eig_of_z_and_x() {
        let e = eig2(&Unitary2::z());
        assert_eq!(e.phases, [0.0, PI]);
        let e = eig2(&Unitary2::x());
        let mut ph = e.phases;
        ph.sort_by(f64::total_cmp);
        assert!(ph[0].abs() < 1e-15 && (ph[1] - PI).abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = e.vectors[e.phases.iter().position(|p| p.abs() < 1e-9).unwrap()];
        let minus = e.vectors[e.phases.iter().position(|p| p.abs() > 1.0).unwrap()];
        assert!((plus[0] - c(s, 0.0)).norm() < 1e-15 && (plus[1] - c(s, 0.0)).norm() < 1e-15);
        assert!((minus[0] - c(s, 0.0)).norm() < 1e-15 && (minus[1] - c(-s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn unitary2_rejects_non_unitary() {
        assert!(Unitary2::new([c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap_angle(-PI), PI);
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }
}
