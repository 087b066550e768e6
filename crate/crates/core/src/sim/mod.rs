//! Simulation backends and the pieces they share: measurement counts and the
//! counter-based per-shot randomness.

pub mod dd;
pub mod dense;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::GateSpec;
use crate::radix::format_digits;

pub use dd::{DdPackage, DdState, Edge, NodeId};
pub use dense::{fidelity, simulate, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Dense,
    Dd,
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Backend::Dense),
            "dd" => Ok(Backend::Dd),
            other => Err(Error::Unsupported(format!("unknown backend `{other}` (expected dense or dd)"))),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Dense => "dense",
            Backend::Dd => "dd",
        })
    }
}

/// Histogram of measured digit strings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Counts {
    counts: BTreeMap<Vec<usize>, u64>,
    shots: u64,
}

impl Counts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, outcome: Vec<usize>) {
        self.record_n(outcome, 1);
    }

    pub fn record_n(&mut self, outcome: Vec<usize>, n: u64) {
        *self.counts.entry(outcome).or_default() += n;
        self.shots += n;
    }

    pub fn merge(&mut self, other: Counts) {
        for (k, v) in other.counts {
            self.record_n(k, v);
        }
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    /// Count for an outcome written as `"2,0,1"`.
    pub fn get(&self, key: &str) -> u64 {
        let digits: std::result::Result<Vec<usize>, _> = key.split(',').map(|p| p.trim().parse()).collect();
        digits.ok().and_then(|d| self.counts.get(&d).copied()).unwrap_or(0)
    }

    pub fn get_digits(&self, digits: &[usize]) -> u64 {
        self.counts.get(digits).copied().unwrap_or(0)
    }

    /// Outcomes in lexicographic digit order.
    pub fn iter(&self) -> impl Iterator<Item = (&[usize], u64)> + '_ {
        self.counts.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Outcome keys as comma-joined strings.
    pub fn keys(&self) -> Vec<String> {
        self.counts.keys().map(|k| format_digits(k)).collect()
    }

    /// One `digits<TAB>count` line per outcome.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.counts {
            out.push_str(&format_digits(k));
            out.push('\t');
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// `mix(seed, shot, stream)`: independent 64-bit seed per shot and stream.
pub fn shot_seed(seed: u64, shot: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(shot)) ^ stream.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

/// Stream used for measurement draws.
pub const MEASURE_STREAM: u64 = 0;
/// Stream used for noise coin flips.
pub const NOISE_STREAM: u64 = 1;

/// Uniform in `[0, 1)` used to pick the measurement outcome of a shot. It
/// depends only on `(seed, shot)`, so outcomes are independent of how shots
/// are scheduled across threads.
pub fn shot_uniform(seed: u64, shot: u64) -> f64 {
    (shot_seed(seed, shot, MEASURE_STREAM) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Generator for the noise coins of one shot.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(shot_seed(seed, shot, NOISE_STREAM))
}

/// Common surface of the two state representations, used by the shot engine.
pub trait QuditState: Sized + Clone + Send + Sync {
    /// Initial state of `circuit` (its explicit initial state, or `|0…0⟩`).
    fn initial(circuit: &Circuit) -> Result<Self>;

    fn apply(&mut self, gate: &GateSpec) -> Result<()>;

    fn dims(&self) -> &[usize];

    /// Maps a uniform draw to a basis outcome by inverse CDF in index order.
    fn outcomes(&self, uniforms: &[f64]) -> Result<Vec<Vec<usize>>>;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_bookkeeping() {
        let mut c = Counts::new();
        c.record(vec![0, 1]);
        c.record(vec![2, 10]);
        c.record(vec![0, 1]);
        assert_eq!(c.shots(), 3);
        assert_eq!(c.get("0,1"), 2);
        assert_eq!(c.get("2,10"), 1);
        assert_eq!(c.get("garbage"), 0);
        assert_eq!(c.to_tsv(), "0,1\t2\n2,10\t1\n");
    }

    #[test]
    fn shot_uniforms_are_stable_and_distinct() {
        assert_eq!(shot_uniform(5, 17), shot_uniform(5, 17));
        assert_ne!(shot_uniform(5, 17), shot_uniform(5, 18));
        assert_ne!(shot_uniform(5, 17), shot_uniform(6, 17));
        let u: Vec<f64> = (0..1000).map(|s| shot_uniform(0, s)).collect();
        assert!(u.iter().all(|&x| (0.0..1.0).contains(&x)));
        let mean = u.iter().sum::<f64>() / 1000.0;
        assert!((mean - 0.5).abs() < 0.05);
    }

    #[test]
    fn backend_names() {
        assert_eq!("dd".parse::<Backend>().unwrap(), Backend::Dd);
        assert!("tn".parse::<Backend>().is_err());
    }
}
