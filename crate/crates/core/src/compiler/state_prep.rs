//! State preparation by a mixed-radix tree of controlled rotations.
//!
//! For qudit `k` and every prefix of digits on qudits `0..k`, a cascade of
//! `rxy` rotations controlled on that prefix moves `|0⟩` onto the
//! conditional distribution of qudit `k`. Intermediate qudits use the square
//! roots of the marginal masses; the last qudit carries the full complex
//! amplitudes, and an `rz` fixes each branch's phase.

use std::collections::BTreeMap;

use super::local::{givens, rotate_rows, ANGLE_TOL};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{ControlSpec, GateKind, GateSpec};
use crate::math::{Matrix, C64, ZERO};
use crate::radix::index_to_digits;
use crate::sim::StateVector;

/// Input norm tolerance.
pub const TARGET_NORM_TOL: f64 = 1e-10;

/// Rotations `(l1, l2, θ, φ)` in circuit order plus the `rz(0, 1)` angle
/// that together map `|0⟩` onto `c` (unit norm).
fn cascade(c: &[C64]) -> (f64, Vec<(usize, usize, f64, f64)>) {
    let d = c.len();
    let mut v = Matrix::from_fn(d, 1, |r, _| c[r]);
    let mut steps = Vec::new();
    for r in (1..d).rev() {
        if let Some((theta, phi)) = givens(v[(r - 1, 0)], v[(r, 0)]) {
            rotate_rows(&mut v, r - 1, r, theta, phi);
            steps.push((r - 1, r, theta, phi));
        }
    }
    let alpha = v[(0, 0)].arg();
    let ops = steps.into_iter().rev().map(|(a, b, t, p)| (a, b, -t, p)).collect();
    (-2.0 * alpha, ops)
}

/// Circuit preparing `target` from `|0…0⟩` with fidelity at least `1 − ε`.
/// Prefixes whose probability mass is below `ε / B`, where `B` counts the
/// non-empty prefixes over all lengths, are dropped.
pub fn prepare_state(target: &StateVector, epsilon: f64) -> Result<Circuit> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::Compile(format!("approximation budget {epsilon} is outside [0, 1)")));
    }
    let norm = target.norm_sqr();
    if (norm - 1.0).abs() > TARGET_NORM_TOL {
        return Err(Error::Unnormalized { norm_sq: norm });
    }
    let dims = target.dims().to_vec();
    let n = dims.len();
    let digits: Vec<Vec<usize>> = (0..target.len()).map(|i| index_to_digits(i, &dims)).collect();

    // Masses of every prefix, by length.
    let mut mass: Vec<BTreeMap<Vec<usize>, f64>> = vec![BTreeMap::new(); n + 1];
    for (i, a) in target.amps().iter().enumerate() {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        for len in 1..=n {
            *mass[len].entry(digits[i][..len].to_vec()).or_default() += p;
        }
    }
    let mut amps: Vec<C64> = target.amps().to_vec();
    if epsilon > 0.0 {
        let branches: usize = mass.iter().map(|m| m.len()).sum();
        let cut = epsilon / branches as f64;
        for (i, a) in amps.iter_mut().enumerate() {
            if (1..=n).any(|len| mass[len].get(&digits[i][..len]).is_some_and(|&m| m < cut)) {
                *a = ZERO;
            }
        }
        let kept: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if kept == 0.0 {
            return Err(Error::Compile("pruning removed the whole state".into()));
        }
        let s = kept.sqrt();
        amps.iter_mut().for_each(|a| *a /= s);
        for m in mass.iter_mut() {
            m.clear();
        }
        for (i, a) in amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            for len in 1..=n {
                *mass[len].entry(digits[i][..len].to_vec()).or_default() += p;
            }
        }
    }
    mass[0].insert(Vec::new(), 1.0);
    let index: BTreeMap<Vec<usize>, C64> =
        amps.iter().enumerate().filter(|(_, a)| a.norm_sqr() > 0.0).map(|(i, a)| (digits[i].clone(), *a)).collect();

    let mut circuit = Circuit::with_dims(&dims)?;
    for k in 0..n {
        for (prefix, &pm) in &mass[k] {
            let d = dims[k];
            let cond: Vec<C64> = (0..d)
                .map(|v| {
                    let mut key = prefix.clone();
                    key.push(v);
                    if k + 1 == n {
                        index.get(&key).copied().unwrap_or(ZERO) / pm.sqrt()
                    } else {
                        C64::new((mass[k + 1].get(&key).copied().unwrap_or(0.0) / pm).sqrt(), 0.0)
                    }
                })
                .collect();
            let (phase, steps) = cascade(&cond);
            let controls: Vec<(usize, usize)> = prefix.iter().copied().enumerate().collect();
            let push = |c: &mut Circuit, kind: GateKind| -> Result<()> {
                let g = if controls.is_empty() {
                    GateSpec::new(kind, vec![k])
                } else {
                    GateSpec::controlled(kind, vec![k], ControlSpec::new(controls.clone()))
                };
                c.push_gate(g)
            };
            if phase.abs() > ANGLE_TOL {
                push(&mut circuit, GateKind::Rz { l1: 0, l2: 1, theta: phase })?;
            }
            for (l1, l2, theta, phi) in steps {
                push(&mut circuit, GateKind::Rxy { l1, l2, theta, phi })?;
            }
        }
    }
    Ok(circuit)
}
