//! Placing two-level rotations onto energy-level graph edges.
//!
//! A rotation on a non-adjacent pair `(l1, l2)` is conjugated by π-rotations
//! that carry `l2` along the cheapest path until it sits next to `l1`. Each
//! π-rotation `rxy(π, 0)` swaps two levels with a factor `−i`, which is
//! absorbed into the phase of the routed rotation.

use std::f64::consts::FRAC_PI_2;

use super::{Rotation, RotationOp};
use crate::device::EnergyLevelGraph;
use crate::error::{Error, Result};

struct Move {
    /// π-rotation pairs in application order.
    swaps: Vec<(usize, usize)>,
    /// Level now adjacent to the fixed level.
    landed: usize,
    /// Argument of the accumulated swap phase on the moved level.
    gamma: f64,
}

fn plan(graph: &EnergyLevelGraph, fixed: usize, moving: usize) -> Result<Move> {
    if fixed >= graph.dim() || moving >= graph.dim() {
        return Err(Error::Compile(format!(
            "level {} out of range for dimension {}",
            fixed.max(moving),
            graph.dim()
        )));
    }
    if graph.has_edge(fixed, moving) {
        return Ok(Move { swaps: Vec::new(), landed: moving, gamma: 0.0 });
    }
    let path = graph.shortest_path(fixed, moving)?;
    let m = path.len() - 1;
    let swaps = (1..m).rev().map(|k| (path[k].min(path[k + 1]), path[k].max(path[k + 1]))).collect();
    Ok(Move { swaps, landed: path[1], gamma: -((m - 1) as f64) * FRAC_PI_2 })
}

fn pi_rotations(line: usize, swaps: &[(usize, usize)], sign: f64) -> impl Iterator<Item = RotationOp> + '_ {
    swaps
        .iter()
        .map(move |&(i, j)| RotationOp::local(line, i, j, Rotation::Xy { theta: sign * std::f64::consts::PI, phi: 0.0 }))
}

fn conjugated(out: &mut Vec<RotationOp>, moves: &[(usize, &Move)], op: RotationOp) {
    for (line, mv) in moves {
        out.extend(pi_rotations(*line, &mv.swaps, 1.0));
    }
    out.push(op);
    for (line, mv) in moves.iter().rev() {
        let undo: Vec<(usize, usize)> = mv.swaps.iter().rev().copied().collect();
        out.extend(pi_rotations(*line, &undo, -1.0));
    }
}

/// Rotation on `(fixed, landed)` equivalent to `rot` on `(l1, l2)`.
fn moved_rotation(rot: Rotation, gamma: f64, flipped: bool) -> Rotation {
    match rot {
        Rotation::Xy { theta, phi } => {
            let p = phi + gamma;
            Rotation::Xy { theta, phi: if flipped { -p } else { p } }
        }
        Rotation::Z { theta } => Rotation::Z { theta: if flipped { -theta } else { theta } },
    }
}

fn route_one(op: &RotationOp, graphs: &[EnergyLevelGraph], out: &mut Vec<RotationOp>) -> Result<()> {
    let graph = |line: usize| {
        graphs.get(line).ok_or_else(|| Error::Compile(format!("no level graph for operand {line}")))
    };
    match *op {
        RotationOp::Local { line, l1, l2, rot } => {
            let mv = plan(graph(line)?, l1, l2)?;
            let (a, b) = (l1.min(mv.landed), l1.max(mv.landed));
            let rot = moved_rotation(rot, mv.gamma, mv.landed < l1);
            conjugated(out, &[(line, &mv)], RotationOp::local(line, a, b, rot));
        }
        RotationOp::Crot { control, control_level, target, l1, l2, rot } => {
            let mv = plan(graph(target)?, l1, l2)?;
            let (a, b) = (l1.min(mv.landed), l1.max(mv.landed));
            let rot = moved_rotation(rot, mv.gamma, mv.landed < l1);
            let routed = RotationOp::Crot { control, control_level, target, l1: a, l2: b, rot };
            conjugated(out, &[(target, &mv)], routed);
        }
        RotationOp::Pswap { a, b, theta, phi } => {
            let mut moves = Vec::new();
            let mut landed = b;
            let mut gamma = 0.0;
            for k in 0..2 {
                if a[k] != b[k] {
                    let mv = plan(graph(k)?, a[k], b[k])?;
                    landed[k] = mv.landed;
                    gamma += mv.gamma;
                    moves.push((k, mv));
                }
            }
            let p = phi + gamma;
            let routed = if landed < a {
                RotationOp::Pswap { a: landed, b: a, theta, phi: -p }
            } else {
                RotationOp::Pswap { a, b: landed, theta, phi: p }
            };
            let refs: Vec<(usize, &Move)> = moves.iter().map(|(k, m)| (*k, m)).collect();
            conjugated(out, &refs, routed);
        }
    }
    Ok(())
}

/// Routes ops whose operand `k` lives on `graphs[k]`.
pub fn route_ops(ops: &[RotationOp], graphs: &[EnergyLevelGraph]) -> Result<Vec<RotationOp>> {
    let mut out = Vec::with_capacity(ops.len());
    for op in ops {
        route_one(op, graphs, &mut out)?;
    }
    Ok(out)
}

/// Routes single-qudit rotations (operand 0) onto `graph`.
pub fn route_physical(ops: &[RotationOp], graph: &EnergyLevelGraph) -> Result<Vec<RotationOp>> {
    if let Some(op) = ops.iter().find(|op| !matches!(op, RotationOp::Local { line: 0, .. })) {
        return Err(Error::Compile(format!("route_physical expects single-qudit rotations, got {op:?}")));
    }
    route_ops(ops, std::slice::from_ref(graph))
}
