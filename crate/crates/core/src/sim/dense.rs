//! Dense mixed-radix state vectors.
//!
//! Gates are applied fiber by fiber: for every assignment of the non-target
//! digits (with control digits pinned to their levels) the `m` amplitudes of
//! the target subspace are gathered, multiplied by the `m × m` target matrix
//! and scattered back. The full `D × D` matrix is never formed.

use rayon::prelude::*;

use super::{shot_uniform, Counts, QuditState};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::GateSpec;
use crate::math::{C64, ONE, ZERO};
use crate::qasm::format_float;
use crate::radix::{check_dims, format_digits, index_to_digits, strides, total_dim};

/// Amplitudes below this magnitude are left out of state dumps.
pub const DUMP_CUTOFF: f64 = 1e-14;
/// Sampling refuses states whose squared norm is further than this from 1.
pub const SAMPLE_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩`. Fails when `Π d_i` does not fit in memory addressing.
    pub fn zero(dims: &[usize]) -> Result<Self> {
        let mut s = Self::zeros(dims)?;
        s.amps[0] = ONE;
        Ok(s)
    }

    fn zeros(dims: &[usize]) -> Result<Self> {
        check_dims(dims)?;
        let d = total_dim(dims).ok_or(Error::DimensionOverflow)?;
        if d > (1usize << 40) {
            return Err(Error::DimensionCap { dim: d, cap: 1usize << 40 });
        }
        Ok(StateVector { dims: dims.to_vec(), amps: vec![ZERO; d] })
    }

    /// Computational basis state for the given digits.
    pub fn basis(dims: &[usize], digits: &[usize]) -> Result<Self> {
        let mut s = Self::zeros(dims)?;
        let idx = crate::radix::radix_index(digits, dims)?;
        s.amps[idx] = ONE;
        Ok(s)
    }

    /// Wraps raw amplitudes; only the length is checked.
    pub fn from_amps(dims: &[usize], amps: Vec<C64>) -> Result<Self> {
        check_dims(dims)?;
        let d = total_dim(dims).ok_or(Error::DimensionOverflow)?;
        if amps.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: amps.len() });
        }
        Ok(StateVector { dims: dims.to_vec(), amps })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn amp(&self, digits: &[usize]) -> Result<C64> {
        Ok(self.amps[crate::radix::radix_index(digits, &self.dims)?])
    }

    /// Applies `gate` in place.
    pub fn apply_gate(&mut self, gate: &GateSpec) -> Result<()> {
        gate.validate(&self.dims)?;
        let m = gate.target_matrix(&self.dims)?;
        apply_kernel(&mut self.amps, &self.dims, gate, &m);
        Ok(())
    }

    /// By-value form of [`StateVector::apply_gate`].
    pub fn with_gate(mut self, gate: &GateSpec) -> Result<Self> {
        self.apply_gate(gate)?;
        Ok(self)
    }

    /// Maximum componentwise distance to `other`.
    pub fn max_diff(&self, other: &StateVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Basis index selected by the uniform draw `u` (inverse CDF in index order).
    pub fn outcome_index(&self, cdf: &[f64], u: f64) -> usize {
        let total = *cdf.last().unwrap_or(&0.0);
        let target = u * total;
        let idx = cdf.partition_point(|&c| c <= target);
        if idx < cdf.len() {
            idx
        } else {
            // rounding pushed the draw past the last boundary
            self.amps.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0)
        }
    }

    fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.amps
            .iter()
            .map(|a| {
                acc += a.norm_sqr();
                acc
            })
            .collect()
    }

    fn check_sampleable(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > SAMPLE_NORM_TOL {
            return Err(Error::Unnormalized { norm_sq: n });
        }
        Ok(())
    }

    /// `shots` i.i.d. outcomes; shot `k` uses [`shot_uniform`]`(seed, k)`.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<Counts> {
        if shots == 0 {
            return Err(Error::InvalidCircuit("shots must be at least 1".into()));
        }
        self.check_sampleable()?;
        let cdf = self.cdf();
        let hist = (0..shots)
            .into_par_iter()
            .fold(std::collections::HashMap::<usize, u64>::new, |mut h, shot| {
                *h.entry(self.outcome_index(&cdf, shot_uniform(seed, shot))).or_default() += 1;
                h
            })
            .reduce(std::collections::HashMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_default() += v;
                }
                a
            });
        let mut counts = Counts::new();
        for (idx, n) in hist {
            counts.record_n(index_to_digits(idx, &self.dims), n);
        }
        Ok(counts)
    }

    /// One `digits<TAB>re<TAB>im` line per amplitude with magnitude ≥ [`DUMP_CUTOFF`].
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() < DUMP_CUTOFF {
                continue;
            }
            out.push_str(&format_digits(&index_to_digits(i, &self.dims)));
            out.push('\t');
            out.push_str(&format_float(a.re));
            out.push('\t');
            out.push_str(&format_float(a.im));
            out.push('\n');
        }
        out
    }
}

/// Applies the target matrix `m` of `gate` to `amps` over mixed-radix fibers.
pub(crate) fn apply_kernel(amps: &mut [C64], dims: &[usize], gate: &GateSpec, m: &crate::math::Matrix) {
    let stride = strides(dims);
    let targets = &gate.lines;
    let tdims: Vec<usize> = targets.iter().map(|&l| dims[l]).collect();
    let size = m.nrows();
    let offsets: Vec<usize> = (0..size)
        .map(|k| {
            index_to_digits(k, &tdims)
                .iter()
                .zip(targets)
                .map(|(&v, &l)| v * stride[l])
                .sum()
        })
        .collect();
    let mut pinned = vec![false; dims.len()];
    let mut base0 = 0usize;
    for &l in targets {
        pinned[l] = true;
    }
    if let Some(ctl) = &gate.control {
        for &(l, v) in &ctl.controls {
            pinned[l] = true;
            base0 += v * stride[l];
        }
    }
    let free: Vec<usize> = (0..dims.len()).filter(|&l| !pinned[l]).collect();
    let mut counter = vec![0usize; free.len()];
    let mut gathered = vec![ZERO; size];
    let mut result = vec![ZERO; size];
    let mut base = base0;
    loop {
        for (k, &off) in offsets.iter().enumerate() {
            gathered[k] = amps[base + off];
        }
        for (r, out) in result.iter_mut().enumerate() {
            let mut acc = ZERO;
            for (c, g) in gathered.iter().enumerate() {
                acc += m[(r, c)] * g;
            }
            *out = acc;
        }
        for (k, &off) in offsets.iter().enumerate() {
            amps[base + off] = result[k];
        }
        // advance the mixed-radix counter over free lines, least significant last
        let mut pos = free.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            let line = free[pos];
            counter[pos] += 1;
            base += stride[line];
            if counter[pos] < dims[line] {
                break;
            }
            base -= counter[pos] * stride[line];
            counter[pos] = 0;
        }
    }
}

/// Final state of `circuit`; measurements are ignored.
pub fn simulate(circuit: &Circuit) -> Result<StateVector> {
    let mut state = StateVector::initial(circuit)?;
    for g in circuit.gates() {
        state.apply_gate(g)?;
    }
    Ok(state)
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.dims != b.dims {
        return Err(Error::InvalidDims(format!("fidelity between dims {:?} and {:?}", a.dims, b.dims)));
    }
    let overlap: C64 = a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum();
    Ok(overlap.norm_sqr().min(1.0))
}

impl QuditState for StateVector {
    fn initial(circuit: &Circuit) -> Result<Self> {
        match circuit.initial_state() {
            Some(amps) => StateVector::from_amps(circuit.dims(), amps.to_vec()),
            None => StateVector::zero(circuit.dims()),
        }
    }

    fn apply(&mut self, gate: &GateSpec) -> Result<()> {
        self.apply_gate(gate)
    }

    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn outcomes(&self, uniforms: &[f64]) -> Result<Vec<Vec<usize>>> {
        self.check_sampleable()?;
        let cdf = self.cdf();
        Ok(uniforms
            .iter()
            .map(|&u| index_to_digits(self.outcome_index(&cdf, u), &self.dims))
            .collect())
    }
}
