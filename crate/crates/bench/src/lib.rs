//! Workload builders shared by the benchmarks under `benches/`.

use ditkit_core::{Circuit, GateKind};

/// `h` on the first qudit, then a `csum` ladder: the GHZ state over `dims`.
pub fn ghz(dims: &[usize]) -> Circuit {
    let mut c = Circuit::with_dims(dims).unwrap();
    c.gate(GateKind::H, &[0]).unwrap();
    for q in 1..dims.len() {
        c.gate(GateKind::Csum, &[q - 1, q]).unwrap();
    }
    c
}

/// `layers` rounds of `h`, a subspace rotation and a `csum` brick pattern.
pub fn layered(dims: &[usize], layers: usize) -> Circuit {
    let n = dims.len();
    let mut c = Circuit::with_dims(dims).unwrap();
    for layer in 0..layers {
        for q in 0..n {
            c.gate(GateKind::H, &[q]).unwrap();
            let theta = 0.3 + 0.17 * (layer * n + q) as f64;
            c.gate(GateKind::Rxy { l1: 0, l2: dims[q] - 1, theta, phi: 0.4 }, &[q]).unwrap();
        }
        for q in (layer % 2..n.saturating_sub(1)).step_by(2) {
            c.gate(GateKind::Csum, &[q, q + 1]).unwrap();
        }
    }
    c
}
