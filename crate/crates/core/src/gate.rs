//! The supported gate set and its dimension-aware matrix realization.
//!
//! Conventions for gates whose matrices are not fixed by the qubit case:
//!
//! * `x`, `z`: shift and clock, `X|j⟩ = |j+1 mod d⟩`, `Z|j⟩ = ω^j|j⟩`, `ω = e^{2πi/d}`.
//! * `h`: discrete Fourier transform, `H[j,k] = ω^{jk}/√d`.
//! * `s`: `diag(e^{iπ j²/d})`, which is `diag(1, i)` for a qubit.
//! * `rxy(l1, l2, θ, φ)`: `[[cos θ/2, −i e^{−iφ} sin θ/2], [−i e^{iφ} sin θ/2, cos θ/2]]`
//!   on levels `l1 < l2`, identity elsewhere.
//! * `rz(l1, l2, θ)`: `e^{−iθ/2}` on `l1`, `e^{iθ/2}` on `l2`.
//! * `csum`: `|c, t⟩ → |c, (t + c) mod d_t⟩`; the first operand is the control.
//! * `ms(θ)`: `exp(−i θ/4 (J_x⊗1 + 1⊗J_x)²)` with `J_x[j, j+1] = √((j+1)(d−1−j))`.
//! * `ls(θ)`: `exp(−i θ J_z⊗J_z)` with `J_z = diag((d−1)/2 − j)`.
//! * `pswap(a1, a2, b1, b2, θ, φ)`: the `rxy` block on the composite basis pair
//!   `|a1,a2⟩, |b1,b2⟩` of two qudits, identity elsewhere.
//! * `cu`: a user-supplied unitary over all of its operand qudits.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::math::{is_unitary, unitarity_deviation, Matrix, C64, I, ONE, ZERO};
use crate::radix::total_dim;

/// Tolerance for accepting a user-supplied `cu` matrix.
pub const CU_UNITARY_TOL: f64 = 1e-10;

/// Names accepted by the parser and the noise model.
pub const GATE_NAMES: &[&str] = &["x", "z", "s", "h", "rxy", "rz", "csum", "ms", "ls", "pswap", "cu"];

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    X,
    Z,
    S,
    H,
    Rxy { l1: usize, l2: usize, theta: f64, phi: f64 },
    Rz { l1: usize, l2: usize, theta: f64 },
    Csum,
    Ms { theta: f64 },
    Ls { theta: f64 },
    Pswap { a: [usize; 2], b: [usize; 2], theta: f64, phi: f64 },
    Cu(Arc<Matrix>),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::H => "h",
            GateKind::Rxy { .. } => "rxy",
            GateKind::Rz { .. } => "rz",
            GateKind::Csum => "csum",
            GateKind::Ms { .. } => "ms",
            GateKind::Ls { .. } => "ls",
            GateKind::Pswap { .. } => "pswap",
            GateKind::Cu(_) => "cu",
        }
    }

    /// Number of target qudits, `None` for `cu` (any count).
    pub fn arity(&self) -> Option<usize> {
        match self {
            GateKind::X | GateKind::Z | GateKind::S | GateKind::H => Some(1),
            GateKind::Rxy { .. } | GateKind::Rz { .. } => Some(1),
            GateKind::Csum | GateKind::Ms { .. } | GateKind::Ls { .. } | GateKind::Pswap { .. } => {
                Some(2)
            }
            GateKind::Cu(_) => None,
        }
    }

    /// Acts on a two-level subspace of a single qudit.
    pub fn is_subspace(&self) -> bool {
        matches!(self, GateKind::Rxy { .. } | GateKind::Rz { .. })
    }

    /// Positional parameters in DITQASM order. Level indices are exact small
    /// integers stored as `f64`.
    pub fn params(&self) -> Vec<f64> {
        match self {
            GateKind::Rxy { l1, l2, theta, phi } => vec![*l1 as f64, *l2 as f64, *theta, *phi],
            GateKind::Rz { l1, l2, theta } => vec![*l1 as f64, *l2 as f64, *theta],
            GateKind::Ms { theta } | GateKind::Ls { theta } => vec![*theta],
            GateKind::Pswap { a, b, theta, phi } => {
                vec![a[0] as f64, a[1] as f64, b[0] as f64, b[1] as f64, *theta, *phi]
            }
            GateKind::Cu(m) => m.transpose().iter().flat_map(|v| [v.re, v.im]).collect(),
            _ => Vec::new(),
        }
    }

    /// Number of leading parameters that are level indices.
    pub fn level_param_count(&self) -> usize {
        match self {
            GateKind::Rxy { .. } | GateKind::Rz { .. } => 2,
            GateKind::Pswap { .. } => 4,
            _ => 0,
        }
    }

    /// Builds a gate from its name and numeric parameters. `target_dims` is
    /// needed only to size a `cu` matrix (stored row-major as re/im pairs).
    pub fn from_name(name: &str, params: &[f64], target_dims: &[usize]) -> Result<GateKind> {
        let expect = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidGate(format!(
                    "{name} takes {n} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let level = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 && v < 1e9 {
                Ok(v as usize)
            } else {
                Err(Error::InvalidGate(format!("level index {v} of {name} is not a non-negative integer")))
            }
        };
        Ok(match name {
            "x" | "z" | "s" | "h" | "csum" => {
                expect(0)?;
                match name {
                    "x" => GateKind::X,
                    "z" => GateKind::Z,
                    "s" => GateKind::S,
                    "h" => GateKind::H,
                    _ => GateKind::Csum,
                }
            }
            "rxy" => {
                expect(4)?;
                GateKind::Rxy { l1: level(params[0])?, l2: level(params[1])?, theta: params[2], phi: params[3] }
            }
            "rz" => {
                expect(3)?;
                GateKind::Rz { l1: level(params[0])?, l2: level(params[1])?, theta: params[2] }
            }
            "ms" => {
                expect(1)?;
                GateKind::Ms { theta: params[0] }
            }
            "ls" => {
                expect(1)?;
                GateKind::Ls { theta: params[0] }
            }
            "pswap" => {
                expect(6)?;
                GateKind::Pswap {
                    a: [level(params[0])?, level(params[1])?],
                    b: [level(params[2])?, level(params[3])?],
                    theta: params[4],
                    phi: params[5],
                }
            }
            "cu" => {
                let n = total_dim(target_dims).ok_or(Error::DimensionOverflow)?;
                expect(2 * n * n)?;
                let m = DMatrix::from_fn(n, n, |r, c| {
                    let k = 2 * (r * n + c);
                    C64::new(params[k], params[k + 1])
                });
                GateKind::Cu(Arc::new(m))
            }
            other => return Err(Error::InvalidGate(format!("unknown gate `{other}`"))),
        })
    }
}

/// Control condition: every listed `(line, level)` pair must hold.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ControlSpec {
    pub controls: Vec<(usize, usize)>,
}

impl ControlSpec {
    pub fn new(controls: Vec<(usize, usize)>) -> Self {
        ControlSpec { controls }
    }

    pub fn lines(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().map(|&(l, _)| l)
    }

    pub fn levels(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().map(|&(_, v)| v)
    }
}

/// A gate applied to concrete qudit lines, optionally controlled.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub lines: Vec<usize>,
    pub control: Option<ControlSpec>,
}

impl GateSpec {
    pub fn new(kind: GateKind, lines: Vec<usize>) -> Self {
        GateSpec { kind, lines, control: None }
    }

    pub fn controlled(kind: GateKind, lines: Vec<usize>, control: ControlSpec) -> Self {
        let control = if control.controls.is_empty() { None } else { Some(control) };
        GateSpec { kind, lines, control }
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Name used for counts and native-set lookup: a gate with one control
    /// and an `rxy`/`rz` target is a `crot`.
    pub fn native_name(&self) -> String {
        match &self.control {
            None => self.name().to_string(),
            Some(ctl) if ctl.controls.len() == 1 && matches!(self.kind, GateKind::Rxy { .. } | GateKind::Rz { .. }) => {
                "crot".to_string()
            }
            Some(ctl) => format!("c{}-{}", ctl.controls.len(), self.name()),
        }
    }

    pub fn control_lines(&self) -> Vec<usize> {
        self.control.as_ref().map(|c| c.lines().collect()).unwrap_or_default()
    }

    /// Controls first, then targets. This is the qudit order of [`GateSpec::full_matrix`].
    pub fn operand_lines(&self) -> Vec<usize> {
        let mut out = self.control_lines();
        out.extend_from_slice(&self.lines);
        out
    }

    pub fn num_operands(&self) -> usize {
        self.lines.len() + self.control.as_ref().map_or(0, |c| c.controls.len())
    }

    /// Checks the gate against the dimensions of the whole circuit.
    pub fn validate(&self, dims: &[usize]) -> Result<()> {
        let n = dims.len();
        let name = self.name();
        if self.lines.is_empty() {
            return Err(Error::InvalidGate(format!("{name} has no target qudits")));
        }
        if let Some(arity) = self.kind.arity() {
            if self.lines.len() != arity {
                return Err(Error::InvalidGate(format!(
                    "{name} acts on {arity} qudit(s), got {}",
                    self.lines.len()
                )));
            }
        }
        let operands = self.operand_lines();
        for &l in &operands {
            if l >= n {
                return Err(Error::LineOutOfRange { line: l, count: n });
            }
        }
        for (i, a) in operands.iter().enumerate() {
            if operands[i + 1..].contains(a) {
                return Err(Error::InvalidGate(format!("{name} uses qudit line {a} more than once")));
            }
        }
        if let Some(ctl) = &self.control {
            for &(line, level) in &ctl.controls {
                if level >= dims[line] {
                    return Err(Error::InvalidGate(format!(
                        "control level {level} ≥ dimension {} of line {line}",
                        dims[line]
                    )));
                }
            }
        }
        let target_dims: Vec<usize> = self.lines.iter().map(|&l| dims[l]).collect();
        check_kind(&self.kind, &target_dims)
    }

    /// Matrix of the gate on its target lines only.
    pub fn target_matrix(&self, dims: &[usize]) -> Result<Matrix> {
        let target_dims: Vec<usize> = self.lines.iter().map(|&l| dims[l]).collect();
        gate_matrix(&self.kind, &target_dims)
    }

    /// Matrix over [`GateSpec::operand_lines`] including the control block structure.
    pub fn full_matrix(&self, dims: &[usize]) -> Result<Matrix> {
        let base = self.target_matrix(dims)?;
        match &self.control {
            None => Ok(base),
            Some(ctl) => {
                let cdims: Vec<usize> = ctl.lines().map(|l| dims[l]).collect();
                let levels: Vec<usize> = ctl.levels().collect();
                controlled_matrix(&base, &cdims, &levels)
            }
        }
    }
}

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        if !matches!(self.kind, GateKind::Cu(_)) {
            let p = self.kind.params();
            if !p.is_empty() {
                let p: Vec<String> = p.iter().map(|v| format!("{v}")).collect();
                write!(f, "({})", p.join(", "))?;
            }
        }
        write!(f, " {:?}", self.lines)?;
        if let Some(c) = &self.control {
            write!(f, " ctl {:?}", c.controls)?;
        }
        Ok(())
    }
}

fn check_kind(kind: &GateKind, dims: &[usize]) -> Result<()> {
    let name = kind.name();
    match kind {
        GateKind::Rxy { l1, l2, .. } | GateKind::Rz { l1, l2, .. } => {
            let d = dims[0];
            if l2 >= &d {
                return Err(Error::InvalidGate(format!("subspace level {l2} ≥ dimension {d}")));
            }
            if l1 >= l2 {
                return Err(Error::InvalidGate(format!("{name} needs l1 < l2, got ({l1}, {l2})")));
            }
        }
        GateKind::Pswap { a, b, .. } => {
            for (k, &d) in dims.iter().enumerate() {
                for v in [a[k], b[k]] {
                    if v >= d {
                        return Err(Error::InvalidGate(format!(
                            "pswap level {v} ≥ dimension {d} of operand {k}"
                        )));
                    }
                }
            }
            if (a[0], a[1]) >= (b[0], b[1]) {
                return Err(Error::InvalidGate("pswap needs pair a before pair b".into()));
            }
        }
        GateKind::Cu(m) => {
            let n = total_dim(dims).ok_or(Error::DimensionOverflow)?;
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.nrows() });
            }
            if !is_unitary(m, CU_UNITARY_TOL) {
                return Err(Error::NotUnitary { deviation: unitarity_deviation(m) });
            }
        }
        _ => {}
    }
    Ok(())
}

fn omega(d: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI / d as f64)
}

pub fn pauli_x(d: usize) -> Matrix {
    Matrix::from_fn(d, d, |r, c| if r == (c + 1) % d { ONE } else { ZERO })
}

pub fn pauli_z(d: usize) -> Matrix {
    let w = omega(d);
    Matrix::from_fn(d, d, |r, c| if r == c { w.powu(r as u32) } else { ZERO })
}

/// Two-level X on levels `(l1, l2)` (swap), identity elsewhere.
pub fn subspace_x(d: usize, l1: usize, l2: usize) -> Matrix {
    let mut m = Matrix::identity(d, d);
    m[(l1, l1)] = ZERO;
    m[(l2, l2)] = ZERO;
    m[(l1, l2)] = ONE;
    m[(l2, l1)] = ONE;
    m
}

/// Two-level Z on levels `(l1, l2)`: `−1` on `l2`, identity elsewhere.
pub fn subspace_z(d: usize, l2: usize) -> Matrix {
    let mut m = Matrix::identity(d, d);
    m[(l2, l2)] = -ONE;
    m
}

/// The 2×2 block of `rxy(θ, φ)`.
pub fn rxy_block(theta: f64, phi: f64) -> [[C64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), -I * C64::from_polar(s, -phi)],
        [-I * C64::from_polar(s, phi), C64::new(c, 0.0)],
    ]
}

fn embed_two_level(d: usize, i: usize, j: usize, block: [[C64; 2]; 2]) -> Matrix {
    let mut m = Matrix::identity(d, d);
    m[(i, i)] = block[0][0];
    m[(i, j)] = block[0][1];
    m[(j, i)] = block[1][0];
    m[(j, j)] = block[1][1];
    m
}

fn spin_x(d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |r, c| {
        if c == r + 1 {
            (((r + 1) * (d - 1 - r)) as f64).sqrt()
        } else if r == c + 1 {
            (((c + 1) * (d - 1 - c)) as f64).sqrt()
        } else {
            0.0
        }
    })
}

fn spin_z(d: usize, j: usize) -> f64 {
    (d as f64 - 1.0) / 2.0 - j as f64
}

fn ms_matrix(d1: usize, d2: usize, theta: f64) -> Matrix {
    let id1 = DMatrix::<f64>::identity(d1, d1);
    let id2 = DMatrix::<f64>::identity(d2, d2);
    let a = spin_x(d1).kronecker(&id2) + id1.kronecker(&spin_x(d2));
    let eig = a.symmetric_eigen();
    let n = d1 * d2;
    let v = eig.eigenvectors;
    let phases: Vec<C64> = eig
        .eigenvalues
        .iter()
        .map(|&lambda| C64::from_polar(1.0, -theta / 4.0 * lambda * lambda))
        .collect();
    Matrix::from_fn(n, n, |r, c| {
        (0..n).map(|k| phases[k] * (v[(r, k)] * v[(c, k)])).sum()
    })
}

fn ls_matrix(d1: usize, d2: usize, theta: f64) -> Matrix {
    let n = d1 * d2;
    Matrix::from_fn(n, n, |r, c| {
        if r == c {
            C64::from_polar(1.0, -theta * spin_z(d1, r / d2) * spin_z(d2, r % d2))
        } else {
            ZERO
        }
    })
}

/// Unitary of `kind` on target qudits with the given dimensions (first
/// target most significant).
pub fn gate_matrix(kind: &GateKind, dims: &[usize]) -> Result<Matrix> {
    if let Some(arity) = kind.arity() {
        if dims.len() != arity {
            return Err(Error::DimensionMismatch { expected: arity, found: dims.len() });
        }
    }
    check_kind(kind, dims)?;
    Ok(match kind {
        GateKind::X => pauli_x(dims[0]),
        GateKind::Z => pauli_z(dims[0]),
        GateKind::S => {
            let d = dims[0];
            Matrix::from_fn(d, d, |r, c| {
                if r == c {
                    C64::from_polar(1.0, PI * (r * r) as f64 / d as f64)
                } else {
                    ZERO
                }
            })
        }
        GateKind::H => {
            let d = dims[0];
            let w = omega(d);
            let norm = 1.0 / (d as f64).sqrt();
            Matrix::from_fn(d, d, |r, c| w.powu(((r * c) % d) as u32) * norm)
        }
        GateKind::Rxy { l1, l2, theta, phi } => embed_two_level(dims[0], *l1, *l2, rxy_block(*theta, *phi)),
        GateKind::Rz { l1, l2, theta } => {
            let mut m = Matrix::identity(dims[0], dims[0]);
            m[(*l1, *l1)] = C64::from_polar(1.0, -theta / 2.0);
            m[(*l2, *l2)] = C64::from_polar(1.0, theta / 2.0);
            m
        }
        GateKind::Csum => {
            let (dc, dt) = (dims[0], dims[1]);
            let n = dc * dt;
            let mut m = Matrix::zeros(n, n);
            for c in 0..dc {
                for t in 0..dt {
                    m[(c * dt + (t + c) % dt, c * dt + t)] = ONE;
                }
            }
            m
        }
        GateKind::Ms { theta } => ms_matrix(dims[0], dims[1], *theta),
        GateKind::Ls { theta } => ls_matrix(dims[0], dims[1], *theta),
        GateKind::Pswap { a, b, theta, phi } => {
            let d2 = dims[1];
            embed_two_level(dims[0] * d2, a[0] * d2 + a[1], b[0] * d2 + b[1], rxy_block(*theta, *phi))
        }
        GateKind::Cu(m) => (**m).clone(),
    })
}

/// Block matrix over `controls ++ target` that acts as `base` when every
/// control qudit holds its level and as the identity otherwise.
pub fn controlled_matrix(base: &Matrix, control_dims: &[usize], levels: &[usize]) -> Result<Matrix> {
    if control_dims.len() != levels.len() {
        return Err(Error::DimensionMismatch { expected: control_dims.len(), found: levels.len() });
    }
    for (k, (&d, &v)) in control_dims.iter().zip(levels).enumerate() {
        if v >= d {
            return Err(Error::DigitOutOfRange { qudit: k, digit: v, dim: d });
        }
    }
    if !base.is_square() {
        return Err(Error::DimensionMismatch { expected: base.nrows(), found: base.ncols() });
    }
    let block = base.nrows();
    let cdim = total_dim(control_dims).ok_or(Error::DimensionOverflow)?;
    let active = crate::radix::radix_index(levels, control_dims)?;
    let n = cdim * block;
    let mut m = Matrix::identity(n, n);
    let off = active * block;
    for r in 0..block {
        for c in 0..block {
            m[(off + r, off + c)] = base[(r, c)];
        }
    }
    Ok(m)
}
