//! Device descriptions: per-qudit energy-level graphs, couplings between
//! qudits and the native gate set, plus circuit validation against them.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::GateKind;
use crate::noise::{NoiseFile, NoiseModel};

/// Current device file schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// Devices shipped with the library, addressable by name.
pub const BUNDLED_DEVICES: &[(&str, &str)] =
    &[("faketraps2six", include_str!("../devices/faketraps2six.json"))];

/// Drivable level pairs of one qudit with their fidelities.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLevelGraph {
    dim: usize,
    edges: Vec<(usize, usize, f64)>,
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem {
    cost: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.total_cmp(&self.cost).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl EnergyLevelGraph {
    /// Validated graph; edges are stored with `i < j`.
    pub fn new(dim: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Device(format!("level graph dimension {dim} < 2")));
        }
        let mut seen = BTreeSet::new();
        let mut stored = Vec::with_capacity(edges.len());
        for &(i, j, f) in edges {
            if i >= dim || j >= dim {
                return Err(Error::Device(format!("level edge ({i}, {j}) out of range for dimension {dim}")));
            }
            if i == j {
                return Err(Error::Device(format!("level edge ({i}, {j}) is a self loop")));
            }
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::Device(format!("fidelity {f} of level edge ({i}, {j}) is outside (0, 1]")));
            }
            let (a, b) = (i.min(j), i.max(j));
            if !seen.insert((a, b)) {
                return Err(Error::Device(format!("duplicate level edge ({a}, {b})")));
            }
            stored.push((a, b, f));
        }
        let g = EnergyLevelGraph { dim, edges: stored };
        if !g.is_connected() {
            return Err(Error::Device(format!("level graph of dimension {dim} is disconnected")));
        }
        Ok(g)
    }

    /// Path 0–1–…–(d−1) with uniform fidelity.
    pub fn path(dim: usize, fidelity: f64) -> Result<Self> {
        let edges: Vec<_> = (1..dim).map(|j| (j - 1, j, fidelity)).collect();
        Self::new(dim, &edges)
    }

    /// Star centred on level `center`.
    pub fn star(dim: usize, center: usize, fidelity: f64) -> Result<Self> {
        let edges: Vec<_> = (0..dim).filter(|&j| j != center).map(|j| (center, j, fidelity)).collect();
        Self::new(dim, &edges)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn fidelity(&self, i: usize, j: usize) -> Option<f64> {
        let (a, b) = (i.min(j), i.max(j));
        self.edges.iter().find(|e| e.0 == a && e.1 == b).map(|e| e.2)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.fidelity(i, j).is_some()
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.edges.iter().filter_map(move |&(a, b, f)| {
            if a == v {
                Some((b, f))
            } else if b == v {
                Some((a, f))
            } else {
                None
            }
        })
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.dim];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for (w, _) in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Subgraph on levels `0..dim`, used when a smaller qudit occupies the
    /// lowest levels of this one.
    pub fn induced(&self, dim: usize) -> Result<Self> {
        if dim > self.dim {
            return Err(Error::Device(format!("dimension {dim} exceeds level graph dimension {}", self.dim)));
        }
        if dim == self.dim {
            return Ok(self.clone());
        }
        let edges: Vec<_> = self.edges.iter().copied().filter(|e| e.1 < dim).collect();
        Self::new(dim, &edges)
            .map_err(|_| Error::Device(format!("levels 0..{dim} do not form a connected subgraph")))
    }

    /// Minimum-cost level path from `from` to `to` with edge cost
    /// `−ln fidelity`. Ties prefer smaller level indices.
    pub fn shortest_path(&self, from: usize, to: usize) -> Result<Vec<usize>> {
        if from >= self.dim || to >= self.dim {
            return Err(Error::Compile(format!("level {} out of range for dimension {}", from.max(to), self.dim)));
        }
        let mut dist = vec![f64::INFINITY; self.dim];
        let mut prev = vec![usize::MAX; self.dim];
        let mut heap = BinaryHeap::new();
        dist[from] = 0.0;
        heap.push(HeapItem { cost: 0.0, node: from });
        while let Some(HeapItem { cost, node }) = heap.pop() {
            if cost > dist[node] {
                continue;
            }
            if node == to {
                break;
            }
            let mut next: Vec<(usize, f64)> = self.neighbors(node).collect();
            next.sort_by_key(|n| n.0);
            for (w, f) in next {
                let c = cost - f.ln();
                if c < dist[w] || (c == dist[w] && node < prev[w]) {
                    dist[w] = c;
                    prev[w] = node;
                    heap.push(HeapItem { cost: c, node: w });
                }
            }
        }
        if dist[to].is_infinite() {
            return Err(Error::Compile(format!("no level path between {from} and {to}")));
        }
        let mut path = vec![to];
        let mut v = to;
        while v != from {
            v = prev[v];
            path.push(v);
        }
        path.reverse();
        Ok(path)
    }
}

#[derive(Debug, Clone)]
pub struct Device {
    pub name: String,
    pub qudits: Vec<EnergyLevelGraph>,
    pub couplings: Vec<(usize, usize, f64)>,
    pub native_gates: Vec<String>,
    pub noise: Option<NoiseModel>,
}

#[derive(Serialize, Deserialize)]
struct QuditEntry {
    dim: usize,
    level_edges: Vec<(usize, usize, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeviceFile {
    schema_version: u32,
    name: String,
    qudits: Vec<QuditEntry>,
    couplings: Vec<(usize, usize, f64)>,
    native_gates: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise: Option<NoiseFile>,
}

/// Gate names a device may declare native.
pub const NATIVE_GATE_NAMES: &[&str] = &["x", "z", "s", "h", "rxy", "rz", "csum", "ms", "ls", "pswap", "cu", "crot"];

impl Device {
    pub fn new(
        name: &str,
        qudits: Vec<EnergyLevelGraph>,
        couplings: Vec<(usize, usize, f64)>,
        native_gates: Vec<String>,
        noise: Option<NoiseModel>,
    ) -> Result<Self> {
        let n = qudits.len();
        if n == 0 {
            return Err(Error::Device("device has no qudits".into()));
        }
        let mut seen = BTreeSet::new();
        let mut pairs = Vec::with_capacity(couplings.len());
        for (a, b, f) in couplings {
            if a >= n || b >= n || a == b {
                return Err(Error::Device(format!("coupling ({a}, {b}) does not name two distinct qudits of {n}")));
            }
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::Device(format!("fidelity {f} of coupling ({a}, {b}) is outside (0, 1]")));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(Error::Device(format!("duplicate coupling ({}, {})", key.0, key.1)));
            }
            pairs.push((key.0, key.1, f));
        }
        for g in &native_gates {
            if !NATIVE_GATE_NAMES.contains(&g.as_str()) {
                return Err(Error::Device(format!("unknown native gate `{g}`")));
            }
        }
        Ok(Device { name: name.to_string(), qudits, couplings: pairs, native_gates, noise })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.qudits.iter().map(|g| g.dim()).collect()
    }

    pub fn coupling_fidelity(&self, a: usize, b: usize) -> Option<f64> {
        let key = (a.min(b), a.max(b));
        self.couplings.iter().find(|c| (c.0, c.1) == key).map(|c| c.2)
    }

    pub fn is_coupled(&self, a: usize, b: usize) -> bool {
        self.coupling_fidelity(a, b).is_some()
    }

    pub fn is_native(&self, name: &str) -> bool {
        self.native_gates.iter().any(|g| g == name)
    }

    /// Level graph for a circuit qudit of dimension `dim` placed on device
    /// qudit `q`.
    pub fn level_graph(&self, q: usize, dim: usize) -> Result<EnergyLevelGraph> {
        let g = self
            .qudits
            .get(q)
            .ok_or_else(|| Error::Device(format!("device {} has no qudit {q}", self.name)))?;
        g.induced(dim)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DeviceFile =
            serde_json::from_str(text).map_err(|e| Error::Device(format!("invalid device file: {e}")))?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::Device(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        let qudits = file
            .qudits
            .iter()
            .enumerate()
            .map(|(k, q)| {
                EnergyLevelGraph::new(q.dim, &q.level_edges).map_err(|e| Error::Device(format!("qudit {k}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let noise = file.noise.as_ref().map(NoiseModel::from_file).transpose()?;
        Device::new(&file.name, qudits, file.couplings, file.native_gates, noise)
    }

    pub fn to_json(&self) -> String {
        let file = DeviceFile {
            schema_version: SCHEMA_VERSION,
            name: self.name.clone(),
            qudits: self
                .qudits
                .iter()
                .map(|g| QuditEntry { dim: g.dim(), level_edges: g.edges().to_vec() })
                .collect(),
            couplings: self.couplings.clone(),
            native_gates: self.native_gates.clone(),
            noise: self.noise.as_ref().map(NoiseModel::to_file),
        };
        serde_json::to_string_pretty(&file).expect("device serializes")
    }

    /// One of [`BUNDLED_DEVICES`].
    pub fn bundled(name: &str) -> Result<Self> {
        let (_, text) = BUNDLED_DEVICES
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::Device(format!("no bundled device named `{name}`")))?;
        Self::from_json(text)
    }
}

impl PartialEq for Device {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.qudits == other.qudits
            && self.couplings == other.couplings
            && self.native_gates == other.native_gates
            && self.noise == other.noise
    }
}

pub fn load_device(path: &Path) -> Result<Device> {
    let text = std::fs::read_to_string(path)?;
    Device::from_json(&text)
}

pub fn save_device(device: &Device, path: &Path) -> Result<()> {
    std::fs::write(path, device.to_json())?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TooManyQudits { circuit: usize, device: usize },
    Dimension { qudit: usize, circuit_dim: usize, device_dim: usize },
    Uncoupled { gate_index: usize, a: usize, b: usize },
    TooManyOperands { gate_index: usize, operands: usize },
    NonNative { gate_index: usize, name: String },
    LevelEdge { gate_index: usize, qudit: usize, l1: usize, l2: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooManyQudits { circuit, device } => {
                write!(f, "circuit uses {circuit} qudits, device has {device}")
            }
            Violation::Dimension { qudit, circuit_dim, device_dim } => {
                write!(f, "qudit {qudit}: circuit dimension {circuit_dim} exceeds device dimension {device_dim}")
            }
            Violation::Uncoupled { gate_index, a, b } => {
                write!(f, "gate {gate_index}: qudits {a} and {b} are not coupled")
            }
            Violation::TooManyOperands { gate_index, operands } => {
                write!(f, "gate {gate_index}: {operands} operand qudits, device gates act on at most 2")
            }
            Violation::NonNative { gate_index, name } => write!(f, "gate {gate_index}: `{name}` is not native"),
            Violation::LevelEdge { gate_index, qudit, l1, l2 } => {
                write!(f, "gate {gate_index}: levels ({l1}, {l2}) of qudit {qudit} are not a level-graph edge")
            }
        }
    }
}

/// Everything that keeps `circuit` from running as-is on `device`.
pub fn validate_circuit(circuit: &Circuit, device: &Device) -> Vec<Violation> {
    let mut out = Vec::new();
    let dims = circuit.dims();
    if dims.len() > device.qudits.len() {
        out.push(Violation::TooManyQudits { circuit: dims.len(), device: device.qudits.len() });
    }
    for (q, (&d, g)) in dims.iter().zip(&device.qudits).enumerate() {
        if d > g.dim() {
            out.push(Violation::Dimension { qudit: q, circuit_dim: d, device_dim: g.dim() });
        }
    }
    let on_device = |q: usize| q < device.qudits.len();
    for (i, gate) in circuit.gates().enumerate() {
        let operands = gate.operand_lines();
        if operands.len() > 2 {
            out.push(Violation::TooManyOperands { gate_index: i, operands: operands.len() });
        } else if operands.len() == 2 {
            let (a, b) = (operands[0], operands[1]);
            if on_device(a) && on_device(b) && !device.is_coupled(a, b) {
                out.push(Violation::Uncoupled { gate_index: i, a: a.min(b), b: a.max(b) });
            }
        }
        let name = gate.native_name();
        if !device.is_native(&name) {
            out.push(Violation::NonNative { gate_index: i, name });
        }
        let mut check = |q: usize, l1: usize, l2: usize| {
            if on_device(q) && !device.qudits[q].has_edge(l1, l2) {
                out.push(Violation::LevelEdge { gate_index: i, qudit: q, l1, l2 });
            }
        };
        match gate.kind {
            GateKind::Rxy { l1, l2, .. } | GateKind::Rz { l1, l2, .. } => check(gate.lines[0], l1, l2),
            GateKind::Pswap { a, b, .. } => {
                for k in 0..2 {
                    if a[k] != b[k] {
                        check(gate.lines[k], a[k].min(b[k]), a[k].max(b[k]));
                    }
                }
            }
            _ => {}
        }
    }
    out
}
