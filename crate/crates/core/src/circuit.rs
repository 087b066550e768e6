//! Register model and circuit IR.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gate::{ControlSpec, GateKind, GateSpec};
use crate::math::{Matrix, C64, ZERO};
use crate::radix::{self, check_dims, total_dim};

/// Default cap on the total dimension accepted by [`Circuit::unitary`].
pub const DEFAULT_UNITARY_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumRegister {
    pub name: String,
    pub dims: Vec<usize>,
}

impl QuantumRegister {
    pub fn size(&self) -> usize {
        self.dims.len()
    }
}

/// Integer-valued classical cells; each holds a measured digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicRegister {
    pub name: String,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    Gate(GateSpec),
    Measure { line: usize, creg: usize, cell: usize },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Circuit {
    qregs: Vec<QuantumRegister>,
    cregs: Vec<ClassicRegister>,
    instructions: Vec<Instruction>,
    dims: Vec<usize>,
    initial_state: Option<Vec<C64>>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    /// Circuit with a single quantum register named `q`.
    pub fn with_dims(dims: &[usize]) -> Result<Self> {
        let mut c = Circuit::new();
        if !dims.is_empty() {
            c.add_qreg("q", dims)?;
        }
        Ok(c)
    }

    /// Declares a quantum register and returns the global line of its first qudit.
    pub fn add_qreg(&mut self, name: &str, dims: &[usize]) -> Result<usize> {
        if dims.is_empty() {
            return Err(Error::InvalidCircuit(format!("register `{name}` has no qudits")));
        }
        check_dims(dims)?;
        self.check_fresh_name(name)?;
        if self.initial_state.is_some() {
            return Err(Error::InvalidCircuit("registers cannot be added after the initial state".into()));
        }
        let first = self.dims.len();
        self.qregs.push(QuantumRegister { name: name.to_string(), dims: dims.to_vec() });
        self.dims.extend_from_slice(dims);
        Ok(first)
    }

    pub fn add_creg(&mut self, name: &str, size: usize) -> Result<usize> {
        if size == 0 {
            return Err(Error::InvalidCircuit(format!("classical register `{name}` has size 0")));
        }
        self.check_fresh_name(name)?;
        self.cregs.push(ClassicRegister { name: name.to_string(), size });
        Ok(self.cregs.len() - 1)
    }

    fn check_fresh_name(&self, name: &str) -> Result<()> {
        let taken = self.qregs.iter().any(|r| r.name == name) || self.cregs.iter().any(|r| r.name == name);
        if taken {
            Err(Error::InvalidCircuit(format!("register `{name}` is already declared")))
        } else {
            Ok(())
        }
    }

    pub fn qregs(&self) -> &[QuantumRegister] {
        &self.qregs
    }

    pub fn cregs(&self) -> &[ClassicRegister] {
        &self.cregs
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    /// Per-qudit dimensions in global line order.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_qudits(&self) -> usize {
        self.dims.len()
    }

    /// `Π d_i`, `None` if it overflows `usize`.
    pub fn total_dim(&self) -> Option<usize> {
        total_dim(&self.dims)
    }

    pub fn initial_state(&self) -> Option<&[C64]> {
        self.initial_state.as_deref()
    }

    pub fn set_initial_state(&mut self, amps: Vec<C64>) -> Result<()> {
        let d = self.total_dim().ok_or(Error::DimensionOverflow)?;
        if amps.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: amps.len() });
        }
        self.initial_state = Some(amps);
        Ok(())
    }

    pub fn clear_initial_state(&mut self) {
        self.initial_state = None;
    }

    /// Resolves `register[index]` to a global qudit line.
    pub fn line_of(&self, register: &str, index: usize) -> Option<usize> {
        let mut base = 0;
        for r in &self.qregs {
            if r.name == register {
                return (index < r.size()).then_some(base + index);
            }
            base += r.size();
        }
        None
    }

    /// Inverse of [`Circuit::line_of`]: `(register index, offset)`.
    pub fn register_of(&self, line: usize) -> Option<(usize, usize)> {
        let mut base = 0;
        for (i, r) in self.qregs.iter().enumerate() {
            if line < base + r.size() {
                return Some((i, line - base));
            }
            base += r.size();
        }
        None
    }

    pub fn creg_index(&self, name: &str) -> Option<usize> {
        self.cregs.iter().position(|r| r.name == name)
    }

    fn measured_lines(&self) -> impl Iterator<Item = usize> + '_ {
        self.instructions.iter().filter_map(|i| match i {
            Instruction::Measure { line, .. } => Some(*line),
            _ => None,
        })
    }

    /// Appends a gate after validating it against the registers and the
    /// terminal-measurement rule.
    pub fn push_gate(&mut self, gate: GateSpec) -> Result<()> {
        gate.validate(&self.dims)?;
        let operands = gate.operand_lines();
        if let Some(l) = self.measured_lines().find(|l| operands.contains(l)) {
            return Err(Error::InvalidCircuit(format!(
                "gate {} touches qudit line {l} after it was measured",
                gate.name()
            )));
        }
        self.instructions.push(Instruction::Gate(gate));
        Ok(())
    }

    pub fn push_measure(&mut self, line: usize, creg: usize, cell: usize) -> Result<()> {
        if line >= self.dims.len() {
            return Err(Error::LineOutOfRange { line, count: self.dims.len() });
        }
        let reg = self
            .cregs
            .get(creg)
            .ok_or_else(|| Error::InvalidCircuit(format!("classical register #{creg} does not exist")))?;
        if cell >= reg.size {
            return Err(Error::InvalidCircuit(format!(
                "classical cell {}[{cell}] out of range (size {})",
                reg.name, reg.size
            )));
        }
        self.instructions.push(Instruction::Measure { line, creg, cell });
        Ok(())
    }

    pub fn push(&mut self, inst: Instruction) -> Result<()> {
        match inst {
            Instruction::Gate(g) => self.push_gate(g),
            Instruction::Measure { line, creg, cell } => self.push_measure(line, creg, cell),
        }
    }

    /// Convenience builder for an uncontrolled gate.
    pub fn gate(&mut self, kind: GateKind, lines: &[usize]) -> Result<&mut Self> {
        self.push_gate(GateSpec::new(kind, lines.to_vec()))?;
        Ok(self)
    }

    /// Convenience builder for a controlled gate.
    pub fn controlled_gate(&mut self, kind: GateKind, lines: &[usize], controls: &[(usize, usize)]) -> Result<&mut Self> {
        self.push_gate(GateSpec::controlled(kind, lines.to_vec(), ControlSpec::new(controls.to_vec())))?;
        Ok(self)
    }

    pub fn gates(&self) -> impl Iterator<Item = &GateSpec> + '_ {
        self.instructions.iter().filter_map(|i| match i {
            Instruction::Gate(g) => Some(g),
            _ => None,
        })
    }

    pub fn has_measurements(&self) -> bool {
        self.measured_lines().next().is_some()
    }

    /// Same registers and initial state, no instructions.
    pub fn empty_like(&self) -> Circuit {
        Circuit {
            qregs: self.qregs.clone(),
            cregs: self.cregs.clone(),
            instructions: Vec::new(),
            dims: self.dims.clone(),
            initial_state: self.initial_state.clone(),
        }
    }

    /// Copy of this circuit with measurements dropped.
    pub fn without_measurements(&self) -> Circuit {
        let mut out = self.empty_like();
        out.instructions = self.gates().cloned().map(Instruction::Gate).collect();
        out
    }

    /// Appends every instruction of `other`, which must have the same qudit dimensions.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.dims != self.dims {
            return Err(Error::InvalidCircuit("cannot append circuits over different qudits".into()));
        }
        for inst in &other.instructions {
            self.push(inst.clone())?;
        }
        Ok(())
    }

    /// Full unitary with the default dimension cap.
    pub fn unitary(&self) -> Result<Matrix> {
        circuit_unitary(self, DEFAULT_UNITARY_CAP)
    }

    pub fn stats(&self) -> CircuitStats {
        circuit_stats(self)
    }
}

/// Embeds a gate's operand matrix into the full space by explicit digit
/// enumeration and returns `E · acc`. Only rows of `E` that share the
/// non-operand digits with a column are non-zero, so the product is formed
/// row by row over those `m` columns.
fn apply_embedded(acc: &Matrix, gate: &GateSpec, dims: &[usize]) -> Result<Matrix> {
    let operands = gate.operand_lines();
    let local = gate.full_matrix(dims)?;
    let odims: Vec<usize> = operands.iter().map(|&l| dims[l]).collect();
    let m = local.nrows();
    let d = acc.nrows();
    let mut out = Matrix::zeros(d, acc.ncols());
    for row in 0..d {
        let digits = radix::index_to_digits(row, dims);
        let local_row = radix::radix_index(&operands.iter().map(|&l| digits[l]).collect::<Vec<_>>(), &odims)?;
        for local_col in 0..m {
            let e = local[(local_row, local_col)];
            if e == ZERO {
                continue;
            }
            let mut col_digits = digits.clone();
            for (k, v) in radix::index_to_digits(local_col, &odims).into_iter().enumerate() {
                col_digits[operands[k]] = v;
            }
            let col = radix::radix_index(&col_digits, dims)?;
            for j in 0..acc.ncols() {
                out[(row, j)] += e * acc[(col, j)];
            }
        }
    }
    Ok(out)
}

/// Product of all gates on the full space; later gates multiply from the left.
pub fn circuit_unitary(circuit: &Circuit, cap: usize) -> Result<Matrix> {
    if circuit.has_measurements() {
        return Err(Error::MeasurementPresent);
    }
    let d = circuit.total_dim().ok_or(Error::DimensionOverflow)?;
    if d > cap {
        return Err(Error::DimensionCap { dim: d, cap });
    }
    let mut u = Matrix::identity(d, d);
    for g in circuit.gates() {
        u = apply_embedded(&u, g, circuit.dims())?;
    }
    Ok(u)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CircuitStats {
    pub gate_counts: BTreeMap<String, usize>,
    pub gates: usize,
    pub entangling: usize,
    pub measurements: usize,
    pub depth: usize,
    pub qudits: usize,
    /// `None` when `Π d_i` overflows.
    pub total_dim: Option<usize>,
}

/// Depth counts gates only: each gate starts after the latest gate on any of
/// its operand lines (controls included).
pub fn circuit_stats(circuit: &Circuit) -> CircuitStats {
    let mut stats = CircuitStats {
        qudits: circuit.num_qudits(),
        total_dim: if circuit.num_qudits() == 0 { Some(0) } else { circuit.total_dim() },
        ..Default::default()
    };
    let mut level = vec![0usize; circuit.num_qudits()];
    for inst in circuit.instructions() {
        match inst {
            Instruction::Gate(g) => {
                stats.gates += 1;
                *stats.gate_counts.entry(g.native_name()).or_default() += 1;
                let ops = g.operand_lines();
                if ops.len() >= 2 {
                    stats.entangling += 1;
                }
                let start = ops.iter().map(|&l| level[l]).max().unwrap_or(0) + 1;
                for l in ops {
                    level[l] = start;
                }
                stats.depth = stats.depth.max(start);
            }
            Instruction::Measure { .. } => stats.measurements += 1,
        }
    }
    stats
}
