//! Invariant subspaces of fixed total `J_z` and exact operators on them.
//!
//! The electron is a spin-1/2 with `σ_z = ±1` on `|↑⟩`, `|↓⟩` and Pauli
//! ladder operators `σ_± = (σ_x ± iσ_y)/2`. Nuclear ladder operators use the
//! standard convention `I_± = I_x ± iI_y`.
//!
//! A nuclear configuration is stored as level indices `k_j = l_j + I₀` in
//! `0..=2I₀`, so `Σ k_j` counts nuclear excitations above the polarized state
//! `|G⟩ = ∏_j |−I₀⟩_j`. The subspace `V_n` holds the up-electron states with
//! `n` nuclear excitations and the down-electron states with `n + 1`.

mod basis;
mod collective;
mod expr;
mod operator;

pub use basis::{
    enumerate_direct_sum, enumerate_subspace, enumerate_subspace_capped, BasisState, Sector, SubspaceBasis,
    DEFAULT_DIM_CAP,
};
pub(crate) use collective::collective_weights;
pub use collective::{
    bmode_fock_state, bmode_power, collective_b, collective_b_expr, collective_c, commutator_defect,
    commutator_expectation, sum_rule, DefectEstimate, NuclearState, SumRule,
};
pub use expr::{
    build_operator, build_operator_with, ladder_matrix_element, ladder_matrix_element_with, BuildMode,
    LadderConvention, LadderDirection, OpExpr, SiteOp,
};
pub use operator::{Space, SparseOperator, StateVector};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A nuclear spin size `I₀ ∈ {1/2, 1, 3/2, …}` stored as `2 I₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub const HALF: Spin = Spin { twice: 1 };

    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(Error::invalid("nuclear spin must be at least 1/2"));
        }
        Ok(Spin { twice })
    }

    pub fn from_f64(v: f64) -> Result<Self> {
        let t = 2.0 * v;
        if !(t.is_finite() && t >= 1.0 && (t - t.round()).abs() < 1e-9 && t < u32::MAX as f64) {
            return Err(Error::invalid(format!("{v} is not a positive half-integer spin")));
        }
        Spin::from_twice(t.round() as u32)
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// Number of `I_z` levels, `2 I₀ + 1`.
    pub fn levels(self) -> usize {
        self.twice as usize + 1
    }

    /// The largest level index `2 I₀`.
    pub fn max_level(self) -> u8 {
        u8::try_from(self.twice).expect("spins above 127 are not supported")
    }

    /// `m = k - I₀` for level index `k`.
    pub fn m_of_level(self, k: u8) -> f64 {
        k as f64 - self.value()
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for Spin {
    type Err = Error;

    /// Accepts `"1/2"`, `"3/2"`, `"0.5"`, `"1"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| Error::invalid(format!("bad spin `{s}`")))?;
            return match den.trim() {
                "2" => Spin::from_twice(num),
                "1" => Spin::from_twice(2 * num),
                _ => Err(Error::invalid(format!("bad spin `{s}`"))),
            };
        }
        let v: f64 = s.parse().map_err(|_| Error::invalid(format!("bad spin `{s}`")))?;
        Spin::from_f64(v)
    }
}

impl Serialize for Spin {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Spin {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Spin::from_f64(v).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Electron {
    Up,
    Down,
}

impl Electron {
    /// Eigenvalue of `σ_z`.
    pub fn sigma_z(self) -> f64 {
        match self {
            Electron::Up => 1.0,
            Electron::Down => -1.0,
        }
    }

    pub fn flipped(self) -> Electron {
        match self {
            Electron::Up => Electron::Down,
            Electron::Down => Electron::Up,
        }
    }
}
