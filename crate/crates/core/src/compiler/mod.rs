//! Pass-based compilation into two-level rotations.
//!
//! Local passes rewrite single-qudit gates as `rxy`/`rz` sequences, entangling
//! passes rewrite two-qudit gates as controlled rotations (`crot`) and
//! partial swaps (`pswap`). The physical variants additionally route every
//! rotation onto the energy-level graphs of a device.

mod entangling;
mod local;
mod routing;
mod state_prep;

use std::fmt;
use std::str::FromStr;

pub use crate::device::EnergyLevelGraph;
pub use entangling::decompose_entangling_qr;
pub use local::decompose_local_qr;
pub use routing::{route_ops, route_physical};
pub use state_prep::prepare_state;

use crate::circuit::{Circuit, CircuitStats, Instruction};
use crate::device::Device;
use crate::error::{Error, Result};
use crate::gate::{ControlSpec, GateKind, GateSpec};
use crate::math::Matrix;

/// Message carried by the error for gates on more than two qudits.
pub const MULTI_BODY_MESSAGE: &str = "Multi-body gate compilation will be supported in future releases";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rotation {
    Xy { theta: f64, phi: f64 },
    Z { theta: f64 },
}

impl Rotation {
    fn kind(self, l1: usize, l2: usize) -> GateKind {
        match self {
            Rotation::Xy { theta, phi } => GateKind::Rxy { l1, l2, theta, phi },
            Rotation::Z { theta } => GateKind::Rz { l1, l2, theta },
        }
    }
}

/// A two-level rotation on operands numbered `0` and `1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RotationOp {
    /// `rxy`/`rz` on levels `(l1, l2)` of one operand.
    Local { line: usize, l1: usize, l2: usize, rot: Rotation },
    /// Rotation on target levels `(l1, l2)` when `control` is at `control_level`.
    Crot { control: usize, control_level: usize, target: usize, l1: usize, l2: usize, rot: Rotation },
    /// Rotation coupling composite basis states `a` and `b` of operands (0, 1).
    Pswap { a: [usize; 2], b: [usize; 2], theta: f64, phi: f64 },
}

impl RotationOp {
    pub fn local(line: usize, l1: usize, l2: usize, rot: Rotation) -> Self {
        RotationOp::Local { line, l1, l2, rot }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RotationOp::Local { rot: Rotation::Xy { .. }, .. } => "rxy",
            RotationOp::Local { rot: Rotation::Z { .. }, .. } => "rz",
            RotationOp::Crot { .. } => "crot",
            RotationOp::Pswap { .. } => "pswap",
        }
    }

    /// Gate on the circuit lines that operands `0, 1` stand for.
    pub fn to_gate(&self, lines: &[usize]) -> GateSpec {
        match *self {
            RotationOp::Local { line, l1, l2, rot } => GateSpec::new(rot.kind(l1, l2), vec![lines[line]]),
            RotationOp::Crot { control, control_level, target, l1, l2, rot } => GateSpec::controlled(
                rot.kind(l1, l2),
                vec![lines[target]],
                ControlSpec::new(vec![(lines[control], control_level)]),
            ),
            RotationOp::Pswap { a, b, theta, phi } => {
                GateSpec::new(GateKind::Pswap { a, b, theta, phi }, vec![lines[0], lines[1]])
            }
        }
    }

    /// Reads a crot, pswap or uncontrolled `rxy`/`rz` back from a gate whose
    /// operands are `lines`.
    pub fn from_gate(gate: &GateSpec, lines: &[usize]) -> Option<Self> {
        let pos = |l: usize| lines.iter().position(|&x| x == l);
        let (l1, l2, rot) = match gate.kind {
            GateKind::Rxy { l1, l2, theta, phi } => (l1, l2, Rotation::Xy { theta, phi }),
            GateKind::Rz { l1, l2, theta } => (l1, l2, Rotation::Z { theta }),
            GateKind::Pswap { a, b, theta, phi } if gate.control.is_none() => {
                return (pos(gate.lines[0])? == 0 && pos(gate.lines[1])? == 1)
                    .then_some(RotationOp::Pswap { a, b, theta, phi });
            }
            _ => return None,
        };
        let target = pos(gate.lines[0])?;
        match &gate.control {
            None => Some(RotationOp::Local { line: target, l1, l2, rot }),
            Some(ctl) if ctl.controls.len() == 1 => {
                let (cl, level) = ctl.controls[0];
                Some(RotationOp::Crot { control: pos(cl)?, control_level: level, target, l1, l2, rot })
            }
            Some(_) => None,
        }
    }
}

/// Circuit over `dims` applying `ops` on lines `0..dims.len()`.
pub fn ops_circuit(ops: &[RotationOp], dims: &[usize]) -> Result<Circuit> {
    let lines: Vec<usize> = (0..dims.len()).collect();
    let mut c = Circuit::with_dims(dims)?;
    for op in ops {
        c.push_gate(op.to_gate(&lines))?;
    }
    Ok(c)
}

/// Unitary of `ops` over `dims`, first op applied first.
pub fn ops_unitary(ops: &[RotationOp], dims: &[usize]) -> Result<Matrix> {
    ops_circuit(ops, dims)?.unitary()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PassName {
    LogLocQRPass,
    PhyLocQRPass,
    LogEntQRPass,
    PhyEntQRPass,
    StatePrepPass,
}

impl PassName {
    pub const ALL: [PassName; 5] = [
        PassName::LogLocQRPass,
        PassName::PhyLocQRPass,
        PassName::LogEntQRPass,
        PassName::PhyEntQRPass,
        PassName::StatePrepPass,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PassName::LogLocQRPass => "LogLocQRPass",
            PassName::PhyLocQRPass => "PhyLocQRPass",
            PassName::LogEntQRPass => "LogEntQRPass",
            PassName::PhyEntQRPass => "PhyEntQRPass",
            PassName::StatePrepPass => "StatePrepPass",
        }
    }

    pub fn is_physical(self) -> bool {
        matches!(self, PassName::PhyLocQRPass | PassName::PhyEntQRPass)
    }
}

impl FromStr for PassName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PassName::ALL.into_iter().find(|p| p.as_str() == s).ok_or_else(|| {
            let names: Vec<&str> = PassName::ALL.iter().map(|p| p.as_str()).collect();
            Error::Unsupported(format!("unknown pass `{s}` (expected one of {})", names.join(", ")))
        })
    }
}

impl fmt::Display for PassName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parses a comma-separated pass list.
pub fn parse_passes(list: &str) -> Result<Vec<PassName>> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::parse).collect()
}

/// Level graphs of the device qudits that the circuit's qudits occupy.
fn device_graphs(circuit: &Circuit, device: &Device) -> Result<Vec<EnergyLevelGraph>> {
    let dims = circuit.dims();
    if dims.len() > device.qudits.len() {
        return Err(Error::Compile(format!(
            "circuit has {} qudits, device {} has {}",
            dims.len(),
            device.name,
            device.qudits.len()
        )));
    }
    dims.iter()
        .enumerate()
        .map(|(q, &d)| {
            let dev = device.qudits[q].dim();
            if d > dev {
                return Err(Error::Compile(format!("qudit {q} has dimension {d}, device qudit has {dev}")));
            }
            device.level_graph(q, d)
        })
        .collect()
}

struct Target<'a> {
    device: &'a Device,
    graphs: Vec<EnergyLevelGraph>,
}

fn emit(out: &mut Circuit, ops: &[RotationOp], lines: &[usize]) -> Result<()> {
    for op in ops {
        out.push_gate(op.to_gate(lines))?;
    }
    Ok(())
}

fn route(ops: Vec<RotationOp>, lines: &[usize], phys: Option<&Target>) -> Result<Vec<RotationOp>> {
    match phys {
        None => Ok(ops),
        Some(t) => {
            let graphs: Vec<EnergyLevelGraph> = lines.iter().map(|&l| t.graphs[l].clone()).collect();
            route_ops(&ops, &graphs)
        }
    }
}

fn local_pass(circuit: &Circuit, phys: Option<&Target>) -> Result<Circuit> {
    let mut out = circuit.empty_like();
    for inst in circuit.instructions() {
        match inst {
            Instruction::Gate(g) if g.control.is_none() && g.lines.len() == 1 => {
                let lines = [g.lines[0]];
                let ops = match RotationOp::from_gate(g, &lines) {
                    Some(op) => vec![op],
                    None => decompose_local_qr(&g.target_matrix(circuit.dims())?)?,
                };
                emit(&mut out, &route(ops, &lines, phys)?, &lines)?;
            }
            other => out.push(other.clone())?,
        }
    }
    Ok(out)
}

fn entangling_pass(circuit: &Circuit, phys: Option<&Target>) -> Result<Circuit> {
    let mut out = circuit.empty_like();
    let dims = circuit.dims();
    for inst in circuit.instructions() {
        match inst {
            Instruction::Gate(g) if g.num_operands() == 2 => {
                let lines = g.operand_lines();
                if let Some(t) = phys {
                    if !t.device.is_coupled(lines[0], lines[1]) {
                        return Err(Error::Compile(format!(
                            "{} acts on qudits {} and {}, which device {} does not couple",
                            g.name(),
                            lines[0],
                            lines[1],
                            t.device.name
                        )));
                    }
                }
                let ops = match RotationOp::from_gate(g, &lines) {
                    Some(op) => vec![op],
                    None => decompose_entangling_qr(&g.full_matrix(dims)?, (dims[lines[0]], dims[lines[1]]))?,
                };
                emit(&mut out, &route(ops, &lines, phys)?, &lines)?;
            }
            other => out.push(other.clone())?,
        }
    }
    Ok(out)
}

fn state_prep_pass(circuit: &Circuit) -> Result<Circuit> {
    let Some(amps) = circuit.initial_state() else {
        return Ok(circuit.clone());
    };
    let target = crate::sim::StateVector::from_amps(circuit.dims(), amps.to_vec())?;
    let prep = prepare_state(&target, 0.0)?;
    let mut out = circuit.empty_like();
    out.clear_initial_state();
    for g in prep.gates() {
        out.push_gate(g.clone())?;
    }
    for inst in circuit.instructions() {
        out.push(inst.clone())?;
    }
    Ok(out)
}

/// Applies `passes` in order. Physical passes need `device`; every gate must
/// touch at most two qudits once any rewriting pass is requested.
pub fn compile(circuit: &Circuit, device: Option<&Device>, passes: &[PassName]) -> Result<Circuit> {
    if passes.is_empty() {
        return Ok(circuit.clone());
    }
    if let Some(p) = passes.iter().find(|p| p.is_physical()) {
        if device.is_none() {
            return Err(Error::Compile(format!("{p} needs a device")));
        }
    }
    if let Some(g) = circuit.gates().find(|g| g.num_operands() > 2) {
        return Err(Error::Unsupported(format!(
            "{MULTI_BODY_MESSAGE}: `{}` acts on {} qudits",
            g.name(),
            g.num_operands()
        )));
    }
    let target = match device {
        Some(d) if passes.iter().any(|p| p.is_physical()) => {
            Some(Target { device: d, graphs: device_graphs(circuit, d)? })
        }
        _ => None,
    };
    let mut current = circuit.clone();
    for pass in passes {
        current = match pass {
            PassName::LogLocQRPass => local_pass(&current, None)?,
            PassName::PhyLocQRPass => local_pass(&current, target.as_ref())?,
            PassName::LogEntQRPass => entangling_pass(&current, None)?,
            PassName::PhyEntQRPass => entangling_pass(&current, target.as_ref())?,
            PassName::StatePrepPass => state_prep_pass(&current)?,
        };
    }
    Ok(current)
}

/// Before/after statistics of a compilation.
#[derive(Debug, Clone, PartialEq)]
pub struct CompileReport {
    pub before: CircuitStats,
    pub after: CircuitStats,
    /// Sum of `ln f` over gates of the output whose fidelity the device
    /// declares: level edges for `rxy`/`rz`, couplings for two-qudit gates.
    pub expected_log_fidelity: f64,
}

fn gate_log_fidelity(gate: &GateSpec, device: &Device) -> f64 {
    let ops = gate.operand_lines();
    if ops.len() == 2 {
        return device.coupling_fidelity(ops[0], ops[1]).map_or(0.0, f64::ln);
    }
    match gate.kind {
        GateKind::Rxy { l1, l2, .. } | GateKind::Rz { l1, l2, .. } if ops.len() == 1 => device
            .qudits
            .get(gate.lines[0])
            .and_then(|g| g.fidelity(l1, l2))
            .map_or(0.0, f64::ln),
        _ => 0.0,
    }
}

pub fn compile_report(before: &Circuit, after: &Circuit, device: Option<&Device>) -> CompileReport {
    let expected_log_fidelity = device.map_or(0.0, |d| after.gates().map(|g| gate_log_fidelity(g, d)).sum());
    CompileReport { before: before.stats(), after: after.stats(), expected_log_fidelity }
}

impl fmt::Display for CompileReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, s) in [("before", &self.before), ("after", &self.after)] {
            writeln!(f, "{label}.gates\t{}", s.gates)?;
            writeln!(f, "{label}.entangling\t{}", s.entangling)?;
            writeln!(f, "{label}.depth\t{}", s.depth)?;
            for (name, n) in &s.gate_counts {
                writeln!(f, "{label}.count.{name}\t{n}")?;
            }
        }
        writeln!(f, "expected_log_fidelity\t{}", self.expected_log_fidelity)
    }
}
