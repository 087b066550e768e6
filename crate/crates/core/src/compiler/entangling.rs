//! Two-level factorization of two-qudit unitaries into crot and pswap.

use super::local::{check_unitary, eliminate, phase_chain};
use super::{Rotation, RotationOp};
use crate::error::{Error, Result};
use crate::math::Matrix;

/// Factors `u` over dims `(d1, d2)` (line 0 most significant) in circuit
/// order. Adjacent composite pairs that share a digit become crot, all
/// others pswap; the diagonal becomes controlled `rz` chains.
pub fn decompose_entangling_qr(u: &Matrix, dims: (usize, usize)) -> Result<Vec<RotationOp>> {
    check_unitary(u)?;
    let (d1, d2) = dims;
    if d1 < 2 || d2 < 2 || u.nrows() != d1 * d2 {
        return Err(Error::DimensionMismatch { expected: d1 * d2, found: u.nrows() });
    }
    let (steps, phases) = eliminate(u);
    let mut ops = Vec::new();
    // Relative block phases go onto column 0 through a Z chain on line 0
    // controlled by line 1 at level 0; each block's remainder then sums to
    // the same value and is realized by a Z chain on line 1 controlled by
    // line 0.
    let means: Vec<f64> = (0..d1).map(|i| phases[i * d2..(i + 1) * d2].iter().sum::<f64>() / d2 as f64).collect();
    let mean = means.iter().sum::<f64>() / d1 as f64;
    let lifted: Vec<f64> = means.iter().map(|m| m * d2 as f64).collect();
    for (k, theta) in phase_chain(&lifted) {
        ops.push(RotationOp::Crot { control: 1, control_level: 0, target: 0, l1: k, l2: k + 1, rot: Rotation::Z { theta } });
    }
    for i in 0..d1 {
        let mut row = phases[i * d2..(i + 1) * d2].to_vec();
        row[0] -= d2 as f64 * (means[i] - mean);
        for (k, theta) in phase_chain(&row) {
            ops.push(RotationOp::Crot {
                control: 0,
                control_level: i,
                target: 1,
                l1: k,
                l2: k + 1,
                rot: Rotation::Z { theta },
            });
        }
    }
    for &(r1, r2, theta, phi) in steps.iter().rev() {
        let a = [r1 / d2, r1 % d2];
        let b = [r2 / d2, r2 % d2];
        let rot = Rotation::Xy { theta: -theta, phi };
        ops.push(if a[0] == b[0] {
            RotationOp::Crot { control: 0, control_level: a[0], target: 1, l1: a[1], l2: b[1], rot }
        } else if a[1] == b[1] {
            RotationOp::Crot { control: 1, control_level: a[1], target: 0, l1: a[0], l2: b[0], rot }
        } else {
            RotationOp::Pswap { a, b, theta: -theta, phi }
        });
    }
    Ok(ops)
}
