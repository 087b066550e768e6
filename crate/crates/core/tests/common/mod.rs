//! Reference implementations used as oracles by the integration tests.
//! They are written directly from the gate definitions and share no code
//! with the library's matrix builders.
#![allow(dead_code)]

use std::f64::consts::PI;

use ditkit_core::compiler::{Rotation, RotationOp};
use ditkit_core::{Circuit, GateKind, C64, Matrix};
use rand::Rng;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

pub fn index(ds: &[usize], dims: &[usize]) -> usize {
    ds.iter().zip(dims).fold(0, |acc, (&v, &d)| acc * d + v)
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.nrows();
    let m = b.ncols();
    Matrix::from_fn(n, m, |r, col| (0..a.ncols()).map(|k| a[(r, k)] * b[(k, col)]).sum())
}

/// Two-level block on `(i, j)` of a `d`-dimensional identity.
pub fn two_level(d: usize, i: usize, j: usize, block: [[C64; 2]; 2]) -> Matrix {
    let mut m = Matrix::identity(d, d);
    m[(i, i)] = block[0][0];
    m[(i, j)] = block[0][1];
    m[(j, i)] = block[1][0];
    m[(j, j)] = block[1][1];
    m
}

pub fn rxy_block(theta: f64, phi: f64) -> [[C64; 2]; 2] {
    let (s, co) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    [
        [c(co, 0.0), c(0.0, -1.0) * C64::from_polar(s, -phi)],
        [c(0.0, -1.0) * C64::from_polar(s, phi), c(co, 0.0)],
    ]
}

pub fn rz_block(theta: f64) -> [[C64; 2]; 2] {
    [[C64::from_polar(1.0, -theta / 2.0), c(0.0, 0.0)], [c(0.0, 0.0), C64::from_polar(1.0, theta / 2.0)]]
}

fn rot_block(rot: Rotation) -> [[C64; 2]; 2] {
    match rot {
        Rotation::Xy { theta, phi } => rxy_block(theta, phi),
        Rotation::Z { theta } => rz_block(theta),
    }
}

/// Full-space matrix of a rotation op over `dims` (operands `0, 1`).
pub fn op_matrix(op: &RotationOp, dims: &[usize]) -> Matrix {
    let n: usize = dims.iter().product();
    let mut m = Matrix::identity(n, n);
    let set = |m: &mut Matrix, a: usize, b: usize, blk: [[C64; 2]; 2]| {
        m[(a, a)] = blk[0][0];
        m[(a, b)] = blk[0][1];
        m[(b, a)] = blk[1][0];
        m[(b, b)] = blk[1][1];
    };
    match *op {
        RotationOp::Local { line, l1, l2, rot } => {
            for idx in 0..n {
                let ds = digits(idx, dims);
                if ds[line] == l1 {
                    let mut other = ds.clone();
                    other[line] = l2;
                    set(&mut m, idx, index(&other, dims), rot_block(rot));
                }
            }
        }
        RotationOp::Crot { control, control_level, target, l1, l2, rot } => {
            for idx in 0..n {
                let ds = digits(idx, dims);
                if ds[target] == l1 && ds[control] == control_level {
                    let mut other = ds.clone();
                    other[target] = l2;
                    set(&mut m, idx, index(&other, dims), rot_block(rot));
                }
            }
        }
        RotationOp::Pswap { a, b, theta, phi } => {
            set(&mut m, index(&a, dims), index(&b, dims), rxy_block(theta, phi));
        }
    }
    m
}

/// Product of ops, first op applied first.
pub fn ops_product(ops: &[RotationOp], dims: &[usize]) -> Matrix {
    let n: usize = dims.iter().product();
    ops.iter().fold(Matrix::identity(n, n), |acc, op| matmul(&op_matrix(op, dims), &acc))
}

/// `max |a − e^{iα} b|` with `α` fixed by the largest entry of `a`.
pub fn phase_diff(a: &Matrix, b: &Matrix) -> f64 {
    let (mut best, mut pos) = (0.0, (0, 0));
    for r in 0..a.nrows() {
        for col in 0..a.ncols() {
            if a[(r, col)].norm() > best {
                best = a[(r, col)].norm();
                pos = (r, col);
            }
        }
    }
    if b[pos].norm() < 1e-12 {
        return f64::INFINITY;
    }
    let ph = a[pos] / b[pos];
    let ph = ph / ph.norm();
    let mut worst: f64 = 0.0;
    for r in 0..a.nrows() {
        for col in 0..a.ncols() {
            worst = worst.max((a[(r, col)] - ph * b[(r, col)]).norm());
        }
    }
    worst
}

/// Haar-random unitary: Gaussian matrix, Gram–Schmidt on the columns.
pub fn haar<R: Rng>(d: usize, rng: &mut R) -> Matrix {
    let mut gauss = || {
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random();
        let r = (-2.0 * u1.ln()).sqrt();
        c(r * (2.0 * PI * u2).cos(), r * (2.0 * PI * u2).sin())
    };
    let mut m = Matrix::from_fn(d, d, |_, _| gauss());
    for j in 0..d {
        for k in 0..j {
            let proj: C64 = (0..d).map(|r| m[(r, k)].conj() * m[(r, j)]).sum();
            for r in 0..d {
                let v = m[(r, k)];
                m[(r, j)] -= proj * v;
            }
        }
        let norm = (0..d).map(|r| m[(r, j)].norm_sqr()).sum::<f64>().sqrt();
        for r in 0..d {
            m[(r, j)] /= norm;
        }
    }
    m
}

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// `|⟨a|b⟩|²`.
pub fn state_fidelity(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm_sqr()
}

/// Independent state-vector simulation by digit enumeration.
pub fn reference_state(circuit: &Circuit) -> Vec<C64> {
    let dims = circuit.dims().to_vec();
    let n: usize = dims.iter().product();
    let mut psi = match circuit.initial_state() {
        Some(a) => a.to_vec(),
        None => {
            let mut v = vec![c(0.0, 0.0); n];
            v[0] = c(1.0, 0.0);
            v
        }
    };
    for g in circuit.gates() {
        let ops = g.operand_lines();
        let odims: Vec<usize> = ops.iter().map(|&l| dims[l]).collect();
        let local = reference_gate(&g.kind, &g.lines.iter().map(|&l| dims[l]).collect::<Vec<_>>());
        let ctl: Vec<(usize, usize)> = g.control.as_ref().map(|c| c.controls.clone()).unwrap_or_default();
        let mut out = vec![c(0.0, 0.0); n];
        for (idx, amp) in psi.iter().enumerate() {
            if amp.norm() == 0.0 {
                continue;
            }
            let ds = digits(idx, &dims);
            if !ctl.iter().all(|&(l, v)| ds[l] == v) {
                out[idx] += amp;
                continue;
            }
            let tdims: Vec<usize> = g.lines.iter().map(|&l| dims[l]).collect();
            let col = index(&g.lines.iter().map(|&l| ds[l]).collect::<Vec<_>>(), &tdims);
            for row in 0..local.nrows() {
                let e = local[(row, col)];
                if e.norm() == 0.0 {
                    continue;
                }
                let mut nd = ds.clone();
                for (k, v) in digits(row, &tdims).into_iter().enumerate() {
                    nd[g.lines[k]] = v;
                }
                out[index(&nd, &dims)] += e * amp;
            }
        }
        let _ = odims;
        psi = out;
    }
    psi
}

/// Gate matrices built from their definitions.
pub fn reference_gate(kind: &GateKind, dims: &[usize]) -> Matrix {
    let n: usize = dims.iter().product();
    let d = dims[0];
    let w = |k: usize, d: usize| C64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64);
    match kind {
        GateKind::X => Matrix::from_fn(d, d, |r, col| if r == (col + 1) % d { c(1.0, 0.0) } else { c(0.0, 0.0) }),
        GateKind::Z => Matrix::from_fn(d, d, |r, col| if r == col { w(r, d) } else { c(0.0, 0.0) }),
        GateKind::S => Matrix::from_fn(d, d, |r, col| {
            if r == col {
                C64::from_polar(1.0, PI * (r * r) as f64 / d as f64)
            } else {
                c(0.0, 0.0)
            }
        }),
        GateKind::H => Matrix::from_fn(d, d, |r, col| w(r * col % d, d) / (d as f64).sqrt()),
        GateKind::Rxy { l1, l2, theta, phi } => two_level(d, *l1, *l2, rxy_block(*theta, *phi)),
        GateKind::Rz { l1, l2, theta } => two_level(d, *l1, *l2, rz_block(*theta)),
        GateKind::Csum => Matrix::from_fn(n, n, |r, col| {
            let (ci, ti) = (col / dims[1], col % dims[1]);
            if r == ci * dims[1] + (ti + ci) % dims[1] {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        }),
        GateKind::Pswap { a, b, theta, phi } => two_level(n, index(a, dims), index(b, dims), rxy_block(*theta, *phi)),
        GateKind::Cu(m) => (**m).clone(),
        GateKind::Ls { theta } => {
            let jz = |d: usize, j: usize| (d as f64 - 1.0) / 2.0 - j as f64;
            Matrix::from_fn(n, n, |r, col| {
                if r == col {
                    C64::from_polar(1.0, -theta * jz(dims[0], r / dims[1]) * jz(dims[1], r % dims[1]))
                } else {
                    c(0.0, 0.0)
                }
            })
        }
        GateKind::Ms { theta } => {
            let jx = |d: usize| {
                Matrix::from_fn(d, d, |r, col| {
                    let k = r.min(col);
                    if r.abs_diff(col) == 1 {
                        c((((k + 1) * (d - 1 - k)) as f64).sqrt(), 0.0)
                    } else {
                        c(0.0, 0.0)
                    }
                })
            };
            let a = jx(dims[0]).kronecker(&Matrix::identity(dims[1], dims[1]))
                + Matrix::identity(dims[0], dims[0]).kronecker(&jx(dims[1]));
            let gen = matmul(&a, &a) * c(0.0, -theta / 4.0);
            expm(&gen)
        }
    }
}

/// Matrix exponential by scaling and squaring with a Taylor series.
pub fn expm(a: &Matrix) -> Matrix {
    let n = a.nrows();
    let norm: f64 = a.iter().map(|x| x.norm()).sum();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale /= 2.0;
        squarings += 1;
    }
    let b = a * c(scale, 0.0);
    let mut term = Matrix::identity(n, n);
    let mut sum = Matrix::identity(n, n);
    for k in 1..30 {
        term = matmul(&term, &b) * c(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum);
    }
    sum
}

/// Full unitary by applying [`reference_state`] to each basis vector.
pub fn reference_unitary(circuit: &Circuit) -> Matrix {
    let n = circuit.total_dim().unwrap();
    let mut m = Matrix::zeros(n, n);
    for col in 0..n {
        let mut probe = circuit.without_measurements();
        let mut e = vec![c(0.0, 0.0); n];
        e[col] = c(1.0, 0.0);
        probe.set_initial_state(e).unwrap();
        for (r, v) in reference_state(&probe).into_iter().enumerate() {
            m[(r, col)] = v;
        }
    }
    m
}
