use rustc_hash::FxHashMap;
use std::ops::Range;

use serde::Serialize;

use super::{Electron, Space, Spin};
use crate::error::{Error, Result};

/// Default limit on the number of basis states.
pub const DEFAULT_DIM_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    pub electron: Electron,
    /// Level indices `k_j = l_j + I₀`.
    pub config: Box<[u8]>,
}

impl BasisState {
    pub fn new(electron: Electron, config: impl Into<Box<[u8]>>) -> Self {
        BasisState {
            electron,
            config: config.into(),
        }
    }

    /// Nuclear excitation count `Σ_j k_j`.
    pub fn excitation(&self) -> usize {
        self.config.iter().map(|&k| k as usize).sum()
    }
}

/// A contiguous block of basis states sharing `n` and the electron spin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sector {
    pub n: i64,
    pub electron: Electron,
    pub start: usize,
    pub len: usize,
}

impl Sector {
    pub fn range(&self) -> Range<usize> {
        self.start..self.start + self.len
    }
}

/// Basis of `V_n` (or a direct sum of consecutive `V_n`).
///
/// Ordering: sectors by increasing `n`; inside each `n` the up-electron block
/// `V_{n+}` precedes `V_{n-}`; inside a block configurations run in
/// descending lexicographic order of `(k_1, …, k_N)`.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    n_sites: usize,
    spin: Spin,
    n_lo: i64,
    n_hi: i64,
    states: Vec<BasisState>,
    index: FxHashMap<BasisState, usize>,
    sectors: Vec<Sector>,
}

/// Basis of a single invariant subspace `V_n`, `0 <= n <= 2 N I₀ - 1`.
pub fn enumerate_subspace(n_sites: usize, spin: Spin, n: i64) -> Result<SubspaceBasis> {
    enumerate_subspace_capped(n_sites, spin, n, DEFAULT_DIM_CAP)
}

pub fn enumerate_subspace_capped(n_sites: usize, spin: Spin, n: i64, cap: usize) -> Result<SubspaceBasis> {
    let top = 2 * n_sites as i64 * spin.twice() as i64 / 2;
    if n < 0 || n > top - 1 {
        return Err(Error::invalid(format!(
            "excitation number n = {n} outside 0..={} for N = {n_sites}, I0 = {spin}",
            top - 1
        )));
    }
    SubspaceBasis::build(n_sites, spin, n, n, cap)
}

/// Direct sum `V_{n_lo} ⊕ … ⊕ V_{n_hi}`. Here `n = -1` (the single state
/// `|↓⟩|G⟩`) and `n = 2 N I₀` (the single state `|↑⟩` with all nuclei raised)
/// are allowed, so towers can include the saturated states.
pub fn enumerate_direct_sum(n_sites: usize, spin: Spin, n_lo: i64, n_hi: i64) -> Result<SubspaceBasis> {
    let top = n_sites as i64 * spin.twice() as i64;
    if n_lo < -1 || n_hi > top || n_lo > n_hi {
        return Err(Error::invalid(format!(
            "sector range {n_lo}..={n_hi} outside -1..={top}"
        )));
    }
    SubspaceBasis::build(n_sites, spin, n_lo, n_hi, DEFAULT_DIM_CAP)
}

impl SubspaceBasis {
    fn build(n_sites: usize, spin: Spin, n_lo: i64, n_hi: i64, cap: usize) -> Result<Self> {
        if n_sites < 1 {
            return Err(Error::invalid("need at least one nuclear site"));
        }
        let mut required: u128 = 0;
        for n in n_lo..=n_hi {
            for exc in [n, n + 1] {
                if exc >= 0 {
                    required += count_configs(n_sites, spin, exc as usize);
                }
            }
        }
        if required > cap as u128 {
            return Err(Error::Resource {
                what: "subspace basis",
                required: usize::try_from(required).unwrap_or(usize::MAX),
                cap,
            });
        }
        let mut states = Vec::with_capacity(required as usize);
        let mut sectors = Vec::new();
        for n in n_lo..=n_hi {
            for (electron, exc) in [(Electron::Up, n), (Electron::Down, n + 1)] {
                let start = states.len();
                if exc >= 0 {
                    for config in configs_with_sum(n_sites, spin, exc as usize) {
                        states.push(BasisState { electron, config });
                    }
                }
                sectors.push(Sector {
                    n,
                    electron,
                    start,
                    len: states.len() - start,
                });
            }
        }
        let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(SubspaceBasis {
            n_sites,
            spin,
            n_lo,
            n_hi,
            states,
            index,
            sectors,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    /// Inclusive range of excitation numbers covered.
    pub fn n_range(&self) -> (i64, i64) {
        (self.n_lo, self.n_hi)
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn space(&self) -> Space {
        Space::Spin {
            n_sites: self.n_sites,
            spin_twice: self.spin.twice(),
            n_lo: self.n_lo,
            n_hi: self.n_hi,
        }
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &BasisState {
        &self.states[i]
    }

    pub fn index_of(&self, s: &BasisState) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn sector(&self, n: i64, electron: Electron) -> Option<&Sector> {
        self.sectors.iter().find(|s| s.n == n && s.electron == electron)
    }

    /// `m_n = -N I₀ + 1/2 + n`, the `J_z` label of `V_n` with a spin-1/2 electron.
    pub fn m_n(&self, n: i64) -> f64 {
        -(self.n_sites as f64) * self.spin.value() + 0.5 + n as f64
    }

    /// Index of `|e⟩ ⊗ |G⟩`, if that state lies in the basis.
    pub fn ground_index(&self, electron: Electron) -> Option<usize> {
        self.index_of(&BasisState::new(electron, vec![0u8; self.n_sites]))
    }

    /// JSON list of `{"electron": "up"|"down", "l": [l_1, …, l_N]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let list: Vec<serde_json::Value> = self
            .states
            .iter()
            .map(|s| {
                serde_json::json!({
                    "electron": s.electron,
                    "l": s.config.iter().map(|&k| self.spin.m_of_level(k)).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::Value::Array(list)
    }
}

/// Number of configurations of `n_sites` levels in `0..=2I₀` with sum `total`.
pub(crate) fn count_configs(n_sites: usize, spin: Spin, total: usize) -> u128 {
    let kmax = spin.max_level() as usize;
    if total > n_sites * kmax {
        return 0;
    }
    let mut ways = vec![0u128; total + 1];
    ways[0] = 1;
    for _ in 0..n_sites {
        let mut next = vec![0u128; total + 1];
        for (s, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for k in 0..=kmax.min(total - s) {
                next[s + k] = next[s + k].saturating_add(w);
            }
        }
        ways = next;
    }
    ways[total]
}

fn configs_with_sum(n_sites: usize, spin: Spin, total: usize) -> Vec<Box<[u8]>> {
    fn recurse(site: usize, remaining: usize, kmax: usize, cur: &mut Vec<u8>, out: &mut Vec<Box<[u8]>>) {
        let sites_left = cur.len() - site;
        if sites_left == 0 {
            if remaining == 0 {
                out.push(cur.clone().into_boxed_slice());
            }
            return;
        }
        // The remaining sites after this one can absorb at most (sites_left - 1) * kmax.
        let tail_cap = (sites_left - 1) * kmax;
        let hi = kmax.min(remaining);
        let lo = remaining.saturating_sub(tail_cap);
        for k in (lo..=hi).rev() {
            cur[site] = k as u8;
            recurse(site + 1, remaining - k, kmax, cur, out);
        }
        cur[site] = 0;
    }
    let kmax = spin.max_level() as usize;
    let mut out = Vec::new();
    if total <= n_sites * kmax {
        let mut cur = vec![0u8; n_sites];
        recurse(0, total, kmax, &mut cur, &mut out);
    }
    out
}
