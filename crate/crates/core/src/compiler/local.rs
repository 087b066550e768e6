//! Two-level (Givens) factorization of single-qudit unitaries.

use std::f64::consts::PI;

use super::{Rotation, RotationOp};
use crate::error::{Error, Result};
use crate::math::{unitarity_deviation, Matrix, C64};

/// Input unitarity tolerance.
pub const UNITARY_TOL: f64 = 1e-10;
/// Entries below this magnitude count as already nulled.
pub const NULL_TOL: f64 = 1e-14;
/// Rotation angles below this magnitude are dropped.
pub const ANGLE_TOL: f64 = 1e-13;

/// `(θ, φ)` such that `rxy(θ, φ)` on the pair `(a, b)` zeroes `b`.
pub(crate) fn givens(a: C64, b: C64) -> Option<(f64, f64)> {
    if b.norm() < NULL_TOL {
        return None;
    }
    let theta = 2.0 * b.norm().atan2(a.norm());
    let alpha = if a.norm() < NULL_TOL { 0.0 } else { a.arg() };
    Some((theta, b.arg() - alpha - PI / 2.0))
}

/// Applies `rxy(θ, φ)` on rows `(i, j)` of `m`.
pub(crate) fn rotate_rows(m: &mut Matrix, i: usize, j: usize, theta: f64, phi: f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    let mi = C64::new(0.0, -1.0);
    let top = mi * C64::from_polar(s, -phi);
    let bottom = mi * C64::from_polar(s, phi);
    for col in 0..m.ncols() {
        let (x, y) = (m[(i, col)], m[(j, col)]);
        m[(i, col)] = x * c + top * y;
        m[(j, col)] = bottom * x + y * c;
    }
}

/// Maps an angle into `(−2π, 2π]`; `rz` and `rxy` have period 4π.
pub(crate) fn wrap4pi(theta: f64) -> f64 {
    let t = theta.rem_euclid(4.0 * PI);
    if t > 2.0 * PI {
        t - 4.0 * PI
    } else {
        t
    }
}

/// Adjacent-level `rz` chain `(k, θ_k)` realizing `diag(e^{iδ_m})` up to a
/// global phase.
pub(crate) fn phase_chain(phases: &[f64]) -> Vec<(usize, f64)> {
    let n = phases.len();
    let mean = phases.iter().sum::<f64>() / n as f64;
    let mut acc = 0.0;
    let mut out = Vec::new();
    for (k, p) in phases.iter().enumerate().take(n.saturating_sub(1)) {
        acc += p - mean;
        let theta = wrap4pi(-2.0 * acc);
        if theta.abs() > ANGLE_TOL {
            out.push((k, theta));
        }
    }
    out
}

pub(crate) fn check_unitary(u: &Matrix) -> Result<()> {
    if u.nrows() != u.ncols() {
        return Err(Error::Compile(format!("matrix is {}×{}, expected square", u.nrows(), u.ncols())));
    }
    let dev = unitarity_deviation(u);
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation: dev });
    }
    Ok(())
}

/// Eliminations `(r−1, r, θ, φ)` in application order plus the phases of the
/// resulting diagonal.
pub(crate) fn eliminate(u: &Matrix) -> (Vec<(usize, usize, f64, f64)>, Vec<f64>) {
    let d = u.nrows();
    let mut m = u.clone();
    let mut steps = Vec::new();
    for c in 0..d {
        for r in (c + 1..d).rev() {
            if let Some((theta, phi)) = givens(m[(r - 1, c)], m[(r, c)]) {
                rotate_rows(&mut m, r - 1, r, theta, phi);
                steps.push((r - 1, r, theta, phi));
            }
        }
    }
    let phases = (0..d).map(|k| m[(k, k)].arg()).collect();
    (steps, phases)
}

/// Factors `u` into `rxy`/`rz` rotations on adjacent levels of line 0, in
/// circuit order.
pub fn decompose_local_qr(u: &Matrix) -> Result<Vec<RotationOp>> {
    check_unitary(u)?;
    let (steps, phases) = eliminate(u);
    let mut ops: Vec<RotationOp> = phase_chain(&phases)
        .into_iter()
        .map(|(k, theta)| RotationOp::local(0, k, k + 1, Rotation::Z { theta }))
        .collect();
    for &(l1, l2, theta, phi) in steps.iter().rev() {
        ops.push(RotationOp::local(0, l1, l2, Rotation::Xy { theta: -theta, phi }));
    }
    Ok(ops)
}
