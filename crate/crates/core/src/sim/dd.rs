//! Edge-weighted decision diagrams with per-qudit arity.
//!
//! A node at level `k` has exactly `dims[k]` weighted successors; level `n`
//! is the terminal. Nodes are normalized so that the successor weight vector
//! has unit max-norm and its first non-zero entry is real positive; the
//! factor removed is pushed onto the incoming edge. Nodes with the same level
//! and the same (snapped) successor weights and children are shared through a
//! unique table, which makes the diagram of a state canonical.
//!
//! Gates are applied directly on the diagram. The recursion walks the levels
//! carrying a list of `(column index, input edge)` terms for the target
//! digits seen so far; below the last operand level the terms are combined
//! with the gate's matrix elements by diagram addition. Control levels act as
//! filters: a branch whose control digit does not match continues as the
//! identity.

use std::collections::HashMap;

use super::{Counts, QuditState, shot_uniform};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::GateSpec;
use crate::math::{Matrix, C64, ONE, ZERO};
use crate::radix::{check_dims, format_digits, total_dim};
use crate::qasm::format_float;
use crate::sim::dense::{StateVector, DUMP_CUTOFF};

/// Componentwise tolerance for identifying two weights.
pub const WEIGHT_TOL: f64 = 1e-12;
/// Unique-table size that triggers a mark-and-sweep collection.
pub const DEFAULT_GC_THRESHOLD: usize = 1_000_000;
/// Input norm tolerance for [`DdPackage::from_vector`].
pub const INPUT_NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub const TERMINAL: NodeId = NodeId(0);

    pub fn is_terminal(self) -> bool {
        self == NodeId::TERMINAL
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub weight: C64,
    pub node: NodeId,
}

impl Edge {
    pub const ZERO: Edge = Edge { weight: ZERO, node: NodeId::TERMINAL };

    pub fn terminal(weight: C64) -> Edge {
        Edge { weight, node: NodeId::TERMINAL }
    }

    pub fn is_zero(&self) -> bool {
        self.weight == ZERO
    }
}

#[derive(Debug, Clone)]
struct Node {
    level: usize,
    edges: Vec<Edge>,
    live: bool,
}

/// Canonical store for snapped weights. Values are bucketed on a grid of
/// width [`WEIGHT_TOL`]; lookups probe the neighbouring buckets so any value
/// within tolerance of a stored one maps to it.
#[derive(Debug, Default)]
struct ComplexTable {
    values: Vec<C64>,
    buckets: HashMap<(i64, i64), Vec<u32>>,
}

impl ComplexTable {
    fn new() -> Self {
        let mut t = ComplexTable::default();
        t.intern(ZERO);
        t.intern(ONE);
        t
    }

    fn bucket(x: f64) -> i64 {
        (x / WEIGHT_TOL).floor() as i64
    }

    /// Returns the id and canonical value for `c`.
    fn intern(&mut self, c: C64) -> (u32, C64) {
        let (br, bi) = (Self::bucket(c.re), Self::bucket(c.im));
        for dr in -1..=1 {
            for di in -1..=1 {
                if let Some(ids) = self.buckets.get(&(br + dr, bi + di)) {
                    for &id in ids {
                        let v = self.values[id as usize];
                        if (v.re - c.re).abs() <= WEIGHT_TOL && (v.im - c.im).abs() <= WEIGHT_TOL {
                            return (id, v);
                        }
                    }
                }
            }
        }
        let id = self.values.len() as u32;
        self.values.push(c);
        self.buckets.entry((br, bi)).or_default().push(id);
        (id, c)
    }
}

type UniqueKey = (usize, Vec<(u32, NodeId)>);

/// Node storage, unique table and weight table for one worker.
#[derive(Debug)]
pub struct DdPackage {
    dims: Vec<usize>,
    nodes: Vec<Node>,
    free: Vec<u32>,
    unique: HashMap<UniqueKey, NodeId>,
    weights: ComplexTable,
    gc_threshold: usize,
}

fn quant(x: f64) -> u64 {
    (x / WEIGHT_TOL).round().to_bits()
}

fn ratio_key(r: C64) -> (u64, u64) {
    (quant(r.re), quant(r.im))
}

struct GatePlan {
    /// Per level: `None` (untouched), `Some(Role)`.
    roles: Vec<Option<Role>>,
    last_level: usize,
    matrix: Matrix,
}

#[derive(Clone, Copy)]
enum Role {
    Target { stride: usize },
    Control { level: usize },
}

type ApplyKey = (usize, usize, bool, Vec<(usize, NodeId, u64, u64)>);

impl DdPackage {
    pub fn new(dims: &[usize]) -> Result<Self> {
        check_dims(dims)?;
        if dims.is_empty() {
            return Err(Error::InvalidDims("a decision diagram needs at least one qudit".into()));
        }
        let terminal = Node { level: dims.len(), edges: Vec::new(), live: true };
        Ok(DdPackage {
            dims: dims.to_vec(),
            nodes: vec![terminal],
            free: Vec::new(),
            unique: HashMap::new(),
            weights: ComplexTable::new(),
            gc_threshold: DEFAULT_GC_THRESHOLD,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn set_gc_threshold(&mut self, threshold: usize) {
        self.gc_threshold = threshold;
    }

    /// Number of nodes currently held in the unique table.
    pub fn table_size(&self) -> usize {
        self.unique.len()
    }

    fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn level_of(&self, id: NodeId) -> usize {
        self.node(id).level
    }

    /// Successor edges of a non-terminal node.
    pub fn successors(&self, id: NodeId) -> &[Edge] {
        &self.node(id).edges
    }

    /// Builds the normalized, shared node for `edges` at `level` and returns
    /// the edge pointing to it with the extracted factor.
    pub fn make_node(&mut self, level: usize, mut edges: Vec<Edge>) -> Edge {
        debug_assert_eq!(edges.len(), self.dims[level]);
        let mut max = 0.0f64;
        let mut first = None;
        for (i, e) in edges.iter().enumerate() {
            let n = e.weight.norm();
            if n > WEIGHT_TOL && first.is_none() {
                first = Some(i);
            }
            max = max.max(n);
        }
        let Some(first) = first else {
            return Edge::ZERO;
        };
        let w = edges[first].weight;
        let factor = w / w.norm() * max;
        let mut key_edges = Vec::with_capacity(edges.len());
        for (i, e) in edges.iter_mut().enumerate() {
            let scaled = if i == first { C64::new(w.norm() / max, 0.0) } else { e.weight / factor };
            let (id, snapped) = self.weights.intern(scaled);
            if id == 0 {
                *e = Edge::ZERO;
            } else {
                e.weight = snapped;
            }
            key_edges.push((id, e.node));
        }
        let key = (level, key_edges);
        if let Some(&id) = self.unique.get(&key) {
            return Edge { weight: factor, node: id };
        }
        let node = Node { level, edges, live: true };
        let id = match self.free.pop() {
            Some(slot) => {
                self.nodes[slot as usize] = node;
                NodeId(slot)
            }
            None => {
                self.nodes.push(node);
                NodeId((self.nodes.len() - 1) as u32)
            }
        };
        self.unique.insert(key, id);
        Edge { weight: factor, node: id }
    }

    /// Diagram of `|digits⟩`.
    pub fn basis_state(&mut self, digits: &[usize]) -> Result<Edge> {
        crate::radix::radix_index(digits, &self.dims).or_else(|e| match e {
            Error::DimensionOverflow => Ok(0),
            other => Err(other),
        })?;
        let mut edge = Edge::terminal(ONE);
        for level in (0..self.dims.len()).rev() {
            let mut edges = vec![Edge::ZERO; self.dims[level]];
            edges[digits[level]] = edge;
            edge = self.make_node(level, edges);
        }
        Ok(edge)
    }

    /// Canonical diagram of a normalized amplitude vector.
    pub fn from_vector(&mut self, amps: &[C64]) -> Result<Edge> {
        let d = total_dim(&self.dims).ok_or(Error::DimensionOverflow)?;
        if amps.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: amps.len() });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > INPUT_NORM_TOL {
            return Err(Error::Unnormalized { norm_sq: norm });
        }
        Ok(self.build(0, amps))
    }

    fn build(&mut self, level: usize, amps: &[C64]) -> Edge {
        if level == self.dims.len() {
            return Edge::terminal(amps[0]);
        }
        let d = self.dims[level];
        let chunk = amps.len() / d;
        let edges: Vec<Edge> = (0..d).map(|v| self.build(level + 1, &amps[v * chunk..(v + 1) * chunk])).collect();
        self.make_node(level, edges)
    }

    /// Expands a diagram to its amplitude vector.
    pub fn to_vector(&self, edge: Edge) -> Result<Vec<C64>> {
        let d = total_dim(&self.dims).ok_or(Error::DimensionOverflow)?;
        if d > (1usize << 32) {
            return Err(Error::DimensionCap { dim: d, cap: 1usize << 32 });
        }
        let mut out = vec![ZERO; d];
        if !edge.is_zero() {
            self.expand(edge.node, edge.weight, 0, d, &mut out);
        }
        Ok(out)
    }

    fn expand(&self, node: NodeId, weight: C64, offset: usize, span: usize, out: &mut [C64]) {
        if node.is_terminal() {
            out[offset] = weight;
            return;
        }
        let n = self.node(node);
        let chunk = span / n.edges.len();
        for (v, e) in n.edges.iter().enumerate() {
            if !e.is_zero() {
                self.expand(e.node, weight * e.weight, offset + v * chunk, chunk, out);
            }
        }
    }

    /// Distinct non-terminal nodes reachable from `edge`.
    pub fn node_count(&self, edge: Edge) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![edge.node];
        while let Some(id) = stack.pop() {
            if id.is_terminal() || !seen.insert(id) {
                continue;
            }
            stack.extend(self.node(id).edges.iter().filter(|e| !e.is_zero()).map(|e| e.node));
        }
        seen.len()
    }

    /// `e1 + e2` for edges rooted at the same level.
    pub fn add(&mut self, e1: Edge, e2: Edge) -> Edge {
        let mut cache = HashMap::new();
        self.add_cached(e1, e2, &mut cache)
    }

    fn add_cached(&mut self, e1: Edge, e2: Edge, cache: &mut HashMap<(NodeId, NodeId, u64, u64), Edge>) -> Edge {
        if e1.is_zero() {
            return e2;
        }
        if e2.is_zero() {
            return e1;
        }
        if e1.node == e2.node {
            let w = e1.weight + e2.weight;
            if w.norm() <= WEIGHT_TOL * e1.weight.norm().max(e2.weight.norm()) {
                return Edge::ZERO;
            }
            return Edge { weight: w, node: e1.node };
        }
        let ratio = e2.weight / e1.weight;
        let (qr, qi) = ratio_key(ratio);
        let key = (e1.node, e2.node, qr, qi);
        if let Some(hit) = cache.get(&key) {
            return Edge { weight: hit.weight * e1.weight, node: hit.node };
        }
        let level = self.node(e1.node).level;
        let a = self.node(e1.node).edges.clone();
        let b = self.node(e2.node).edges.clone();
        let children: Vec<Edge> = a
            .iter()
            .zip(&b)
            .map(|(x, y)| {
                let x = Edge { weight: x.weight, node: x.node };
                let y = Edge { weight: y.weight * ratio, node: y.node };
                self.add_cached(x, y, cache)
            })
            .collect();
        let unit = self.make_node(level, children);
        cache.insert(key, unit);
        Edge { weight: unit.weight * e1.weight, node: unit.node }
    }

    /// Applies `gate` to the state `edge` and returns the new root edge.
    pub fn apply_gate(&mut self, edge: Edge, gate: &GateSpec) -> Result<Edge> {
        gate.validate(&self.dims)?;
        let matrix = gate.target_matrix(&self.dims)?;
        let n = self.dims.len();
        let mut roles = vec![None; n];
        let tdims: Vec<usize> = gate.lines.iter().map(|&l| self.dims[l]).collect();
        let tstrides = crate::radix::strides(&tdims);
        for (k, &l) in gate.lines.iter().enumerate() {
            roles[l] = Some(Role::Target { stride: tstrides[k] });
        }
        if let Some(ctl) = &gate.control {
            for &(l, v) in &ctl.controls {
                roles[l] = Some(Role::Control { level: v });
            }
        }
        let last_level = gate.operand_lines().into_iter().max().unwrap_or(0);
        let plan = GatePlan { roles, last_level, matrix };
        if edge.is_zero() {
            return Ok(Edge::ZERO);
        }
        let mut cache = HashMap::new();
        let mut add_cache = HashMap::new();
        let unit = self.apply_rec(&plan, 0, 0, true, vec![(0, Edge { weight: ONE, node: edge.node })], &mut cache, &mut add_cache);
        let out = Edge { weight: unit.weight * edge.weight, node: unit.node };
        if self.unique.len() > self.gc_threshold {
            self.collect(&[out]);
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn apply_rec(
        &mut self,
        plan: &GatePlan,
        level: usize,
        row: usize,
        active: bool,
        terms: Vec<(usize, Edge)>,
        cache: &mut HashMap<ApplyKey, Edge>,
        add_cache: &mut HashMap<(NodeId, NodeId, u64, u64), Edge>,
    ) -> Edge {
        let terms: Vec<(usize, Edge)> = terms.into_iter().filter(|(_, e)| !e.is_zero()).collect();
        if terms.is_empty() {
            return Edge::ZERO;
        }
        if level > plan.last_level {
            let mut acc = Edge::ZERO;
            for (col, e) in terms {
                let coef = if active {
                    plan.matrix[(row, col)]
                } else if col == row {
                    ONE
                } else {
                    ZERO
                };
                if coef == ZERO {
                    continue;
                }
                let scaled = Edge { weight: e.weight * coef, node: e.node };
                acc = self.add_cached(acc, scaled, add_cache);
            }
            return acc;
        }
        let w0 = terms[0].1.weight;
        let key: ApplyKey = (
            level,
            row,
            active,
            terms
                .iter()
                .map(|(c, e)| {
                    let (qr, qi) = ratio_key(e.weight / w0);
                    (*c, e.node, qr, qi)
                })
                .collect(),
        );
        if let Some(hit) = cache.get(&key) {
            return Edge { weight: hit.weight * w0, node: hit.node };
        }
        let normalized: Vec<(usize, Edge)> =
            terms.iter().map(|(c, e)| (*c, Edge { weight: e.weight / w0, node: e.node })).collect();
        let d = self.dims[level];
        let child = |pkg: &Self, e: &Edge, v: usize| -> Edge {
            let c = pkg.node(e.node).edges[v];
            if c.is_zero() {
                Edge::ZERO
            } else {
                Edge { weight: e.weight * c.weight, node: c.node }
            }
        };
        let mut children = Vec::with_capacity(d);
        for v in 0..d {
            let edge = match plan.roles[level] {
                None => {
                    let next: Vec<(usize, Edge)> = normalized.iter().map(|(c, e)| (*c, child(self, e, v))).collect();
                    self.apply_rec(plan, level + 1, row, active, next, cache, add_cache)
                }
                Some(Role::Control { level: want }) => {
                    let next: Vec<(usize, Edge)> = normalized
                        .iter()
                        .filter(|(c, _)| active && v == want || *c == row)
                        .map(|(c, e)| (*c, child(self, e, v)))
                        .collect();
                    self.apply_rec(plan, level + 1, row, active && v == want, next, cache, add_cache)
                }
                Some(Role::Target { stride }) => {
                    let next_row = row + v * stride;
                    let next: Vec<(usize, Edge)> = if active {
                        normalized
                            .iter()
                            .flat_map(|(c, e)| (0..d).map(move |u| (c + u * stride, *e, u)))
                            .map(|(c, e, u)| (c, child(self, &e, u)))
                            .collect()
                    } else {
                        normalized.iter().map(|(c, e)| (c + v * stride, child(self, e, v))).collect()
                    };
                    self.apply_rec(plan, level + 1, next_row, active, next, cache, add_cache)
                }
            };
            children.push(edge);
        }
        let unit = self.make_node(level, children);
        cache.insert(key, unit);
        Edge { weight: unit.weight * w0, node: unit.node }
    }

    /// Mark-and-sweep: keeps only nodes reachable from `roots`.
    pub fn collect(&mut self, roots: &[Edge]) {
        for n in self.nodes.iter_mut().skip(1) {
            n.live = false;
        }
        let mut stack: Vec<NodeId> = roots.iter().map(|e| e.node).collect();
        while let Some(id) = stack.pop() {
            if id.is_terminal() || self.nodes[id.index()].live {
                continue;
            }
            self.nodes[id.index()].live = true;
            stack.extend(self.nodes[id.index()].edges.iter().map(|e| e.node));
        }
        let free = &mut self.free;
        let nodes = &self.nodes;
        self.unique.retain(|_, id| {
            let keep = nodes[id.index()].live;
            if !keep {
                free.push(id.0);
            }
            keep
        });
        for &slot in self.free.iter() {
            self.nodes[slot as usize].edges = Vec::new();
        }
    }

    /// Squared norm of the sub-diagram below every node reachable from `edge`.
    fn subtree_norms(&self, edge: Edge) -> HashMap<NodeId, f64> {
        fn visit(pkg: &DdPackage, id: NodeId, memo: &mut HashMap<NodeId, f64>) -> f64 {
            if id.is_terminal() {
                return 1.0;
            }
            if let Some(&v) = memo.get(&id) {
                return v;
            }
            let edges = pkg.node(id).edges.clone();
            let v = edges
                .iter()
                .filter(|e| !e.is_zero())
                .map(|e| e.weight.norm_sqr() * visit(pkg, e.node, memo))
                .sum();
            memo.insert(id, v);
            v
        }
        let mut memo = HashMap::new();
        visit(self, edge.node, &mut memo);
        memo
    }

    /// Outcome for the uniform `u`, walking top-down and rescaling `u`
    /// inside the chosen branch. Equivalent to inverse-CDF sampling over the
    /// basis index order.
    fn outcome(&self, edge: Edge, norms: &HashMap<NodeId, f64>, mut u: f64) -> Vec<usize> {
        let mut digits = Vec::with_capacity(self.dims.len());
        let mut id = edge.node;
        while !id.is_terminal() {
            let edges = &self.node(id).edges;
            let probs: Vec<f64> = edges
                .iter()
                .map(|e| if e.is_zero() { 0.0 } else { e.weight.norm_sqr() * norms.get(&e.node).copied().unwrap_or(1.0) })
                .collect();
            let total: f64 = probs.iter().sum();
            let target = u * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (v, &p) in probs.iter().enumerate() {
                if p > 0.0 && acc + p > target {
                    pick = Some(v);
                    u = ((target - acc) / p).clamp(0.0, 1.0 - f64::EPSILON);
                    break;
                }
                acc += p;
            }
            let v = pick.unwrap_or_else(|| {
                u = 1.0 - f64::EPSILON;
                probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
            });
            digits.push(v);
            id = edges[v].node;
        }
        digits
    }

    /// Nonzero amplitudes below `edge` in basis order, as digit strings.
    pub fn nonzero_amplitudes(&self, edge: Edge, cutoff: f64) -> Vec<(Vec<usize>, C64)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        if !edge.is_zero() {
            self.collect_paths(edge.node, edge.weight, cutoff, &mut path, &mut out);
        }
        out
    }

    fn collect_paths(&self, node: NodeId, weight: C64, cutoff: f64, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, C64)>) {
        if node.is_terminal() {
            if weight.norm() >= cutoff {
                out.push((path.clone(), weight));
            }
            return;
        }
        for (v, e) in self.node(node).edges.iter().enumerate() {
            if !e.is_zero() {
                path.push(v);
                self.collect_paths(e.node, weight * e.weight, cutoff, path, out);
                path.pop();
            }
        }
    }

    /// Human-readable adjacency listing, one node per line.
    pub fn dump(&self, edge: Edge) -> String {
        let mut out = format!("root w=({:.6},{:.6}) -> n{}\n", edge.weight.re, edge.weight.im, edge.node.0);
        let mut seen = std::collections::BTreeSet::new();
        let mut stack = vec![edge.node];
        while let Some(id) = stack.pop() {
            if id.is_terminal() || !seen.insert(id) {
                continue;
            }
            let n = self.node(id);
            let parts: Vec<String> = n
                .edges
                .iter()
                .map(|e| {
                    if e.is_zero() {
                        "0".to_string()
                    } else {
                        format!("({:.6},{:.6})->n{}", e.weight.re, e.weight.im, e.node.0)
                    }
                })
                .collect();
            out.push_str(&format!("n{} level={} [{}]\n", id.0, n.level, parts.join(" ")));
            stack.extend(n.edges.iter().map(|e| e.node));
        }
        out
    }
}

/// A state held as a decision diagram together with its own package.
#[derive(Debug)]
pub struct DdState {
    pkg: DdPackage,
    root: Edge,
}

impl Clone for DdState {
    fn clone(&self) -> Self {
        // Rebuild a compact package holding only the live diagram.
        let mut pkg = DdPackage {
            dims: self.pkg.dims.clone(),
            nodes: self.pkg.nodes.clone(),
            free: self.pkg.free.clone(),
            unique: self.pkg.unique.clone(),
            weights: ComplexTable { values: self.pkg.weights.values.clone(), buckets: self.pkg.weights.buckets.clone() },
            gc_threshold: self.pkg.gc_threshold,
        };
        pkg.collect(&[self.root]);
        DdState { pkg, root: self.root }
    }
}

impl DdState {
    /// `|0…0⟩` on `dims`; works for dimensions far beyond dense reach.
    pub fn zero(dims: &[usize]) -> Result<Self> {
        let mut pkg = DdPackage::new(dims)?;
        let root = pkg.basis_state(&vec![0; dims.len()])?;
        Ok(DdState { pkg, root })
    }

    pub fn from_vector(state: &StateVector) -> Result<Self> {
        let mut pkg = DdPackage::new(state.dims())?;
        let root = pkg.from_vector(state.amps())?;
        Ok(DdState { pkg, root })
    }

    pub fn to_state_vector(&self) -> Result<StateVector> {
        StateVector::from_amps(&self.pkg.dims, self.pkg.to_vector(self.root)?)
    }

    pub fn root(&self) -> Edge {
        self.root
    }

    pub fn package(&self) -> &DdPackage {
        &self.pkg
    }

    pub fn dims(&self) -> &[usize] {
        &self.pkg.dims
    }

    pub fn node_count(&self) -> usize {
        self.pkg.node_count(self.root)
    }

    pub fn apply_gate(&mut self, gate: &GateSpec) -> Result<()> {
        self.root = self.pkg.apply_gate(self.root, gate)?;
        Ok(())
    }

    pub fn norm_sqr(&self) -> f64 {
        let norms = self.pkg.subtree_norms(self.root);
        self.root.weight.norm_sqr() * norms.get(&self.root.node).copied().unwrap_or(1.0)
    }

    /// Amplitude of one basis state without expanding the diagram.
    pub fn amplitude(&self, digits: &[usize]) -> C64 {
        let mut w = self.root.weight;
        let mut id = self.root.node;
        for &v in digits {
            if id.is_terminal() || w == ZERO {
                break;
            }
            let e = self.pkg.node(id).edges[v];
            w *= e.weight;
            id = e.node;
        }
        w
    }

    /// `shots` outcomes, shot `k` driven by [`shot_uniform`]`(seed, k)`.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<Counts> {
        if shots == 0 {
            return Err(Error::InvalidCircuit("shots must be at least 1".into()));
        }
        let uniforms: Vec<f64> = (0..shots).map(|s| shot_uniform(seed, s)).collect();
        let mut counts = Counts::new();
        for o in self.outcomes(&uniforms)? {
            counts.record(o);
        }
        Ok(counts)
    }

    pub fn dump(&self) -> String {
        self.pkg.dump(self.root)
    }

    /// Same `digits<TAB>re<TAB>im` listing as [`StateVector::dump`], without
    /// expanding the full vector.
    pub fn dump_amplitudes(&self) -> String {
        let mut out = String::new();
        for (digits, a) in self.pkg.nonzero_amplitudes(self.root, DUMP_CUTOFF) {
            out.push_str(&format_digits(&digits));
            out.push('\t');
            out.push_str(&format_float(a.re));
            out.push('\t');
            out.push_str(&format_float(a.im));
            out.push('\n');
        }
        out
    }

    /// Simulates the gates of `circuit` from its initial state.
    pub fn simulate(circuit: &Circuit) -> Result<Self> {
        let mut s = Self::initial(circuit)?;
        for g in circuit.gates() {
            s.apply_gate(g)?;
        }
        Ok(s)
    }
}

impl QuditState for DdState {
    fn initial(circuit: &Circuit) -> Result<Self> {
        match circuit.initial_state() {
            Some(amps) => {
                let mut pkg = DdPackage::new(circuit.dims())?;
                let root = pkg.from_vector(amps)?;
                Ok(DdState { pkg, root })
            }
            None => DdState::zero(circuit.dims()),
        }
    }

    fn apply(&mut self, gate: &GateSpec) -> Result<()> {
        self.apply_gate(gate)
    }

    fn dims(&self) -> &[usize] {
        &self.pkg.dims
    }

    fn outcomes(&self, uniforms: &[f64]) -> Result<Vec<Vec<usize>>> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > super::dense::SAMPLE_NORM_TOL {
            return Err(Error::Unnormalized { norm_sq: norm });
        }
        let norms = self.pkg.subtree_norms(self.root);
        Ok(uniforms.iter().map(|&u| self.pkg.outcome(self.root, &norms, u)).collect())
    }
}

/// Formats an outcome the way counts keys are printed.
pub fn outcome_key(digits: &[usize]) -> String {
    format_digits(digits)
}
