//! Stochastic X/Z error injection and shot-based noisy execution.
//!
//! After every gate that has a model entry, each affected qudit draws two
//! coins: an X error with probability `prob_x`, then a Z error with
//! probability `prob_z`. Subspace gates (rxy, rz) receive errors restricted
//! to their two levels; every other gate receives the full shift and clock
//! operators. Shots are executed by grouping identical error traces, so a
//! trace is simulated once no matter how many shots share it.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{subspace_x, subspace_z, GateKind, GateSpec, GATE_NAMES};
use crate::sim::{shot_rng, shot_uniform, Backend, Counts, DdState, QuditState, StateVector};

/// Error probabilities, in the order `(prob_x, prob_z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Noise {
    pub prob_x: f64,
    pub prob_z: f64,
}

impl Noise {
    pub fn new(prob_x: f64, prob_z: f64) -> Result<Self> {
        for (name, p) in [("prob_x", prob_x), ("prob_z", prob_z)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Noise(format!("{name} = {p} is outside [0, 1]")));
            }
        }
        Ok(Noise { prob_x, prob_z })
    }
}

/// Which operands of a multi-qudit gate receive errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Target,
    Controls,
    #[default]
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseEntry {
    pub noise: Noise,
    pub policy: Policy,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NoiseModel {
    entries: BTreeMap<String, NoiseEntry>,
}

#[derive(Serialize, Deserialize)]
struct FileEntry {
    gate: String,
    prob_x: f64,
    prob_z: f64,
    #[serde(default)]
    policy: Policy,
}

/// On-disk form: `{"entries": [{gate, prob_x, prob_z, policy}]}`.
#[derive(Serialize, Deserialize)]
pub struct NoiseFile {
    entries: Vec<FileEntry>,
}

fn check_name(name: &str) -> Result<()> {
    if GATE_NAMES.contains(&name) {
        Ok(())
    } else {
        Err(Error::Noise(format!("unknown gate name `{name}`")))
    }
}

impl NoiseModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `noise` for every listed gate with the default policy.
    /// Later registrations replace earlier ones for the same gate.
    pub fn add_quantum_error_locally(&mut self, noise: Noise, gate_names: &[&str]) -> Result<&mut Self> {
        self.add_with_policy(noise, gate_names, Policy::All)
    }

    pub fn add_with_policy(&mut self, noise: Noise, gate_names: &[&str], policy: Policy) -> Result<&mut Self> {
        Noise::new(noise.prob_x, noise.prob_z)?;
        for name in gate_names {
            check_name(name)?;
        }
        for name in gate_names {
            self.entries.insert(name.to_string(), NoiseEntry { noise, policy });
        }
        Ok(self)
    }

    pub fn get(&self, gate: &str) -> Option<&NoiseEntry> {
        self.entries.get(gate)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &NoiseEntry)> + '_ {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn to_file(&self) -> NoiseFile {
        NoiseFile {
            entries: self
                .entries
                .iter()
                .map(|(gate, e)| FileEntry {
                    gate: gate.clone(),
                    prob_x: e.noise.prob_x,
                    prob_z: e.noise.prob_z,
                    policy: e.policy,
                })
                .collect(),
        }
    }

    pub fn from_file(file: &NoiseFile) -> Result<Self> {
        let mut model = NoiseModel::new();
        for e in &file.entries {
            model.add_with_policy(Noise::new(e.prob_x, e.prob_z)?, &[e.gate.as_str()], e.policy)?;
        }
        Ok(model)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: NoiseFile = serde_json::from_str(text).map_err(|e| Error::Noise(format!("invalid noise file: {e}")))?;
        Self::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("noise model serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ErrorKind {
    X,
    Z,
}

/// One injected error: after gate `gate_index` (counted over gates only),
/// on `qudit`. `levels` is set for subspace errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ErrorEvent {
    pub gate_index: usize,
    pub qudit: usize,
    pub kind: ErrorKind,
    pub levels: Option<(usize, usize)>,
}

impl ErrorEvent {
    /// The operator this event appends.
    pub fn gate(&self, dims: &[usize]) -> GateSpec {
        let d = dims[self.qudit];
        let kind = match (self.kind, self.levels) {
            (ErrorKind::X, None) => GateKind::X,
            (ErrorKind::Z, None) => GateKind::Z,
            (ErrorKind::X, Some((l1, l2))) => GateKind::Cu(Arc::new(subspace_x(d, l1, l2))),
            (ErrorKind::Z, Some((_, l2))) => GateKind::Cu(Arc::new(subspace_z(d, l2))),
        };
        GateSpec::new(kind, vec![self.qudit])
    }
}

fn affected(gate: &GateSpec, policy: Policy) -> Vec<usize> {
    let (controls, targets): (Vec<usize>, Vec<usize>) = match (&gate.kind, &gate.control) {
        (GateKind::Csum, None) => (vec![gate.lines[0]], vec![gate.lines[1]]),
        _ => (gate.control_lines(), gate.lines.clone()),
    };
    match policy {
        Policy::Target => targets,
        Policy::Controls => controls,
        Policy::All => gate.operand_lines(),
    }
}

fn subspace_levels(gate: &GateSpec, qudit: usize) -> Option<(usize, usize)> {
    if !gate.lines.contains(&qudit) {
        return None;
    }
    match gate.kind {
        GateKind::Rxy { l1, l2, .. } | GateKind::Rz { l1, l2, .. } => Some((l1, l2)),
        _ => None,
    }
}

/// The error events shot `shot` injects under `model`.
pub fn noisy_shot_trace(circuit: &Circuit, model: &NoiseModel, seed: u64, shot: u64) -> Vec<ErrorEvent> {
    let mut rng = shot_rng(seed, shot);
    let mut events = Vec::new();
    for (i, gate) in circuit.gates().enumerate() {
        let Some(entry) = model.get(gate.name()) else {
            continue;
        };
        for q in affected(gate, entry.policy) {
            let levels = subspace_levels(gate, q);
            let x = rng.random::<f64>() < entry.noise.prob_x;
            let z = rng.random::<f64>() < entry.noise.prob_z;
            if x {
                events.push(ErrorEvent { gate_index: i, qudit: q, kind: ErrorKind::X, levels });
            }
            if z {
                events.push(ErrorEvent { gate_index: i, qudit: q, kind: ErrorKind::Z, levels });
            }
        }
    }
    events
}

/// Final state of `circuit` with `trace` injected.
pub fn replay<S: QuditState>(circuit: &Circuit, trace: &[ErrorEvent]) -> Result<S> {
    let mut state = S::initial(circuit)?;
    let mut next = 0;
    for (i, gate) in circuit.gates().enumerate() {
        state.apply(gate)?;
        while next < trace.len() && trace[next].gate_index == i {
            state.apply(&trace[next].gate(circuit.dims()))?;
            next += 1;
        }
    }
    Ok(state)
}

/// Execution settings for [`run_noisy_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

/// Noisy shot execution with default options.
pub fn run_noisy(circuit: &Circuit, model: &NoiseModel, shots: u64, seed: u64, backend: Backend) -> Result<Counts> {
    run_noisy_with(circuit, model, shots, seed, backend, RunOptions::default())
}

pub fn run_noisy_with(
    circuit: &Circuit,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
    backend: Backend,
    options: RunOptions,
) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::Noise("shots must be at least 1".into()));
    }
    for (name, _) in model.iter() {
        check_name(name)?;
    }
    let work = || match backend {
        Backend::Dense => run_shots::<StateVector>(circuit, model, shots, seed),
        Backend::Dd => run_shots::<DdState>(circuit, model, shots, seed),
    };
    match options.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Noise(format!("thread pool: {e}")))?;
            pool.install(work)
        }
        None => work(),
    }
}

fn run_shots<S: QuditState>(circuit: &Circuit, model: &NoiseModel, shots: u64, seed: u64) -> Result<Counts> {
    let traces: Vec<Vec<ErrorEvent>> =
        (0..shots).into_par_iter().map(|s| noisy_shot_trace(circuit, model, seed, s)).collect();
    let mut groups: HashMap<Vec<ErrorEvent>, Vec<u64>> = HashMap::new();
    for (s, t) in traces.into_iter().enumerate() {
        groups.entry(t).or_default().push(s as u64);
    }
    let mut groups: Vec<(Vec<ErrorEvent>, Vec<u64>)> = groups.into_iter().collect();
    groups.sort();
    let partial: Vec<Result<Counts>> = groups
        .par_iter()
        .map(|(trace, shot_ids)| {
            let state: S = replay(circuit, trace)?;
            let uniforms: Vec<f64> = shot_ids.iter().map(|&s| shot_uniform(seed, s)).collect();
            let mut counts = Counts::new();
            for o in state.outcomes(&uniforms)? {
                counts.record(o);
            }
            Ok(counts)
        })
        .collect();
    let mut counts = Counts::new();
    for c in partial {
        counts.merge(c?);
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::simulate;

    fn x_circuit() -> Circuit {
        let mut c = Circuit::with_dims(&[3]).unwrap();
        c.gate(GateKind::X, &[0]).unwrap();
        c
    }

    fn model(px: f64, pz: f64, names: &[&str]) -> NoiseModel {
        let mut m = NoiseModel::new();
        m.add_quantum_error_locally(Noise::new(px, pz).unwrap(), names).unwrap();
        m
    }

    #[test]
    fn registration() {
        let mut m = NoiseModel::new();
        m.add_quantum_error_locally(Noise::new(0.01, 0.001).unwrap(), &["h", "rxy", "s", "x", "z"]).unwrap();
        assert_eq!(m.len(), 5);
        m.add_quantum_error_locally(Noise::new(0.018, 0.002).unwrap(), &["rz"]).unwrap();
        assert_eq!(m.get("rz").unwrap().noise, Noise { prob_x: 0.018, prob_z: 0.002 });
        m.add_quantum_error_locally(Noise::new(0.5, 0.0).unwrap(), &["x"]).unwrap();
        assert_eq!(m.get("x").unwrap().noise.prob_x, 0.5);
        assert!(m.add_quantum_error_locally(Noise::new(0.1, 0.0).unwrap(), &["cx"]).is_err());
        assert!(Noise::new(1.5, 0.0).is_err());
    }

    #[test]
    fn certain_x_error_shifts_twice() {
        let m = model(1.0, 0.0, &["x"]);
        for backend in [Backend::Dense, Backend::Dd] {
            let c = run_noisy(&x_circuit(), &m, 37, 5, backend).unwrap();
            assert_eq!(c.get("2"), 37);
        }
    }

    #[test]
    fn zero_noise_matches_noiseless_sampling() {
        let mut c = Circuit::with_dims(&[3, 2]).unwrap();
        c.gate(GateKind::H, &[0]).unwrap().gate(GateKind::Csum, &[0, 1]).unwrap();
        let m = model(0.0, 0.0, &["h", "csum"]);
        let noisy = run_noisy(&c, &m, 500, 11, Backend::Dense).unwrap();
        assert_eq!(noisy, simulate(&c).unwrap().sample(500, 11).unwrap());
        assert!(noisy_shot_trace(&c, &m, 11, 3).is_empty());
    }

    #[test]
    fn binomial_error_rate() {
        let m = model(0.1, 0.0, &["x"]);
        let c = run_noisy(&x_circuit(), &m, 10_000, 0, Backend::Dense).unwrap();
        let frac = c.get("2") as f64 / 1e4;
        assert!((frac - 0.1).abs() <= 0.009, "{frac}");
    }

    #[test]
    fn traces_replay_and_are_stable() {
        let mut c = Circuit::with_dims(&[3]).unwrap();
        for _ in 0..3 {
            c.gate(GateKind::X, &[0]).unwrap();
        }
        let m = model(1.0, 0.0, &["x"]);
        let t = noisy_shot_trace(&c, &m, 1, 2);
        assert_eq!(t.len(), 3);
        assert!(t.iter().all(|e| e.kind == ErrorKind::X));
        assert_eq!(t, noisy_shot_trace(&c, &m, 1, 2));
        let s: StateVector = replay(&c, &t).unwrap();
        assert!((s.amp(&[0]).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subspace_errors_stay_in_subspace() {
        let mut c = Circuit::with_dims(&[4]).unwrap();
        c.gate(GateKind::Rxy { l1: 1, l2: 3, theta: 0.7, phi: 0.2 }, &[0]).unwrap();
        let mut init = vec![crate::math::ZERO; 4];
        init[1] = crate::math::ONE;
        c.set_initial_state(init).unwrap();
        let m = model(1.0, 1.0, &["rxy"]);
        let t = noisy_shot_trace(&c, &m, 0, 0);
        assert_eq!(t.len(), 2);
        assert!(t.iter().all(|e| e.levels == Some((1, 3))));
        let s: StateVector = replay(&c, &t).unwrap();
        assert!(s.amps()[0].norm() < 1e-15 && s.amps()[2].norm() < 1e-15);
    }

    #[test]
    fn policies_select_operands() {
        let mut c = Circuit::with_dims(&[3, 3]).unwrap();
        c.gate(GateKind::Csum, &[0, 1]).unwrap();
        let ones = Noise::new(1.0, 0.0).unwrap();
        let qudits = |p| {
            let mut m = NoiseModel::new();
            m.add_with_policy(ones, &["csum"], p).unwrap();
            noisy_shot_trace(&c, &m, 0, 0).iter().map(|e| e.qudit).collect::<Vec<_>>()
        };
        assert_eq!(qudits(Policy::All), vec![0, 1]);
        assert_eq!(qudits(Policy::Target), vec![1]);
        assert_eq!(qudits(Policy::Controls), vec![0]);
    }

    #[test]
    fn backends_and_threads_agree() {
        let mut c = Circuit::with_dims(&[3, 3]).unwrap();
        c.gate(GateKind::H, &[0]).unwrap().gate(GateKind::Csum, &[0, 1]).unwrap();
        let m = model(0.2, 0.1, &["h", "csum"]);
        let a = run_noisy_with(&c, &m, 2000, 9, Backend::Dense, RunOptions { threads: Some(1) }).unwrap();
        let b = run_noisy_with(&c, &m, 2000, 9, Backend::Dd, RunOptions { threads: Some(4) }).unwrap();
        let d = run_noisy(&c, &m, 2000, 9, Backend::Dense).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, d);
    }

    #[test]
    fn json_roundtrip() {
        let m = model(0.01, 0.002, &["rz", "csum"]);
        assert_eq!(NoiseModel::from_json(&m.to_json()).unwrap(), m);
        let parsed = NoiseModel::from_json(r#"{"entries":[{"gate":"x","prob_x":0.1,"prob_z":0}]}"#).unwrap();
        assert_eq!(parsed.get("x").unwrap().policy, Policy::All);
        assert!(NoiseModel::from_json(r#"{"entries":[{"gate":"y","prob_x":0.1,"prob_z":0}]}"#).is_err());
        assert!(NoiseModel::from_json("nope").is_err());
    }

    #[test]
    fn zero_shots_rejected() {
        assert!(run_noisy(&x_circuit(), &NoiseModel::new(), 0, 0, Backend::Dense).is_err());
    }
}
