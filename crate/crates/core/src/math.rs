//! Complex matrix helpers shared by gates, simulators and the compiler.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Tolerance used for global-phase-insensitive matrix equality.
pub const PHASE_EQ_TOL: f64 = 1e-9;

/// `max |U†U − I|` over all entries.
pub fn unitarity_deviation(m: &Matrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let prod = m.adjoint() * m;
    let n = m.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            let target = if r == c { ONE } else { ZERO };
            worst = worst.max((prod[(r, c)] - target).norm());
        }
    }
    worst
}

pub fn is_unitary(m: &Matrix, tol: f64) -> bool {
    unitarity_deviation(m) <= tol
}

/// Divides `m` by the phase of its largest-magnitude entry (first one in
/// column-major order on ties).
pub fn phase_normalized(m: &Matrix) -> Matrix {
    let mut best = ZERO;
    let mut best_norm = -1.0;
    for v in m.iter() {
        let n = v.norm();
        if n > best_norm + 1e-12 {
            best_norm = n;
            best = *v;
        }
    }
    if best_norm <= 0.0 {
        return m.clone();
    }
    let phase = best / best.norm();
    m.map(|v| v / phase)
}

/// Entrywise max distance between `a` and `b` after removing the best-fit
/// global phase. Uses the overlap `tr(a†b)` for the phase, which is stable
/// even when several entries share the largest magnitude.
pub fn phase_distance(a: &Matrix, b: &Matrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 1e-300 { overlap / overlap.norm() } else { ONE };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x * phase - y).norm())
        .fold(0.0, f64::max)
}

/// Global-phase-insensitive equality: both sides are normalized by the phase
/// of their largest entry and compared entrywise. Falls back to the overlap
/// phase when the largest entry is ambiguous.
pub fn equal_up_to_phase(a: &Matrix, b: &Matrix, tol: f64) -> bool {
    if a.shape() != b.shape() {
        return false;
    }
    let na = phase_normalized(a);
    let nb = phase_normalized(b);
    let direct = na.iter().zip(nb.iter()).all(|(x, y)| (x - y).norm() <= tol);
    direct || phase_distance(a, b) <= tol
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    Matrix::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

/// Standard-normal sample via Box–Muller.
fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Haar-random `d × d` unitary (QR of a complex Ginibre matrix with the
/// diagonal phases of R folded back into Q).
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix {
    let z = Matrix::from_fn(d, d, |_, _| C64::new(gaussian(rng), gaussian(rng)));
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..d {
        let diag = r[(c, c)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { ONE };
        for row in 0..d {
            q[(row, c)] *= phase;
        }
    }
    q
}

/// Random normalized complex vector of length `n`.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..n).map(|_| C64::new(gaussian(rng), gaussian(rng))).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    v
}
