//! The hyperfine Hamiltonian, its `H_R + H_S + H_p` decomposition and the
//! effective Jaynes–Cummings model of the electron and the collective mode.
//!
//! Every `σ_z` that multiplies an energy enters as the electron spin
//! `S_z = σ_z / 2`:
//!
//! ```text
//! H = Ω_z S_z + ω_z Σ_j I_z^(j) + S_z Σ_j g_j I_z^(j) + ½ Σ_j g_j (σ_+ I_-^(j) + σ_- I_+^(j))
//! ```
//!
//! With that reading the composite energies `μ_g(n)`, `μ_f(n)` agree with
//! the diagonal of `H_S`, and the resonance `Ω_z = ω_z + N ḡ I₀` makes `H_S`
//! a multiple of the identity on every `V_n`.

use serde::{Deserialize, Serialize};

use crate::couplings::CouplingProfile;
use crate::error::{Error, Result};
use crate::fockspace::{
    build_operator, collective_b_expr, Electron, OpExpr, SiteOp, Space, SparseOperator, Spin, SubspaceBasis,
};

/// Relative tolerance of the resonance flag.
const RESONANCE_TOL: f64 = 1e-12;

/// Tolerance of the build-time check `H = H_R + H_S + H_p`, relative to the
/// largest matrix entry.
const CLOSURE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelParamsWire", into = "ModelParamsWire")]
pub struct ModelParams {
    spin: Spin,
    omega_z: f64,
    big_omega_z: f64,
    profile: CouplingProfile,
    resonant: bool,
    rabi: f64,
}

#[derive(Serialize, Deserialize)]
struct ModelParamsWire {
    #[serde(rename = "N")]
    n_sites: usize,
    #[serde(rename = "I0")]
    spin: Spin,
    omega_z: f64,
    #[serde(rename = "Omega_z")]
    big_omega_z: f64,
    profile: CouplingProfile,
    resonant: bool,
    #[serde(rename = "Omega")]
    rabi: f64,
}

impl TryFrom<ModelParamsWire> for ModelParams {
    type Error = Error;

    fn try_from(w: ModelParamsWire) -> Result<Self> {
        if w.n_sites != w.profile.n_sites() {
            return Err(Error::invalid(format!(
                "N = {} but the profile has {} couplings",
                w.n_sites,
                w.profile.n_sites()
            )));
        }
        let p = ModelParams::new(w.profile, w.spin, w.omega_z, w.big_omega_z)?;
        if w.resonant && !p.resonant {
            return Err(Error::invalid("`resonant` is set but Omega_z violates the resonance condition"));
        }
        Ok(p)
    }
}

impl From<ModelParams> for ModelParamsWire {
    fn from(p: ModelParams) -> Self {
        ModelParamsWire {
            n_sites: p.n_sites(),
            spin: p.spin,
            omega_z: p.omega_z,
            big_omega_z: p.big_omega_z,
            rabi: p.rabi,
            resonant: p.resonant,
            profile: p.profile,
        }
    }
}

impl ModelParams {
    /// `omega_z` is the nuclear and `big_omega_z` the electron Larmor
    /// frequency. The resonance flag is derived from them.
    pub fn new(profile: CouplingProfile, spin: Spin, omega_z: f64, big_omega_z: f64) -> Result<Self> {
        if !omega_z.is_finite() || !big_omega_z.is_finite() {
            return Err(Error::invalid("Larmor frequencies must be finite"));
        }
        let rabi = rabi_of(&profile, spin);
        let mut p = ModelParams {
            spin,
            omega_z,
            big_omega_z,
            profile,
            resonant: false,
            rabi,
        };
        let target = p.resonant_big_omega_z();
        p.resonant = (big_omega_z - target).abs() <= RESONANCE_TOL * target.abs().max(1.0);
        Ok(p)
    }

    /// Parameters with `Ω_z` already on resonance.
    pub fn resonant(profile: CouplingProfile, spin: Spin, omega_z: f64) -> Result<Self> {
        let p = ModelParams::new(profile, spin, omega_z, 0.0)?;
        Ok(tune_resonance(&p))
    }

    pub fn n_sites(&self) -> usize {
        self.profile.n_sites()
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn omega_z(&self) -> f64 {
        self.omega_z
    }

    pub fn big_omega_z(&self) -> f64 {
        self.big_omega_z
    }

    pub fn profile(&self) -> &CouplingProfile {
        &self.profile
    }

    pub fn is_resonant(&self) -> bool {
        self.resonant
    }

    /// Cached collective Rabi frequency `Ω`.
    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    /// `ω_z + N ḡ I₀`.
    pub fn resonant_big_omega_z(&self) -> f64 {
        self.omega_z + self.n_sites() as f64 * self.profile.mean() * self.spin.value()
    }

    /// `μ_g(n) - μ_f(n)`; independent of `n`.
    pub fn detuning(&self) -> f64 {
        self.mu_g(0) - self.mu_f(0)
    }

    /// Energy of the up-electron states of `V_n` under `H_S`:
    /// `Ω_z/2 + ω_z (m_n - 1/2) - N ḡ I₀ / 2`.
    pub fn mu_g(&self, n: i64) -> f64 {
        let c = self.n_sites() as f64 * self.profile.mean() * self.spin.value();
        self.big_omega_z / 2.0 + self.omega_z * (self.m_n(n) - 0.5) - c / 2.0
    }

    /// Energy of the down-electron states of `V_n` under `H_S`:
    /// `-Ω_z/2 + ω_z (m_n + 1/2) + N ḡ I₀ / 2`.
    pub fn mu_f(&self, n: i64) -> f64 {
        let c = self.n_sites() as f64 * self.profile.mean() * self.spin.value();
        -self.big_omega_z / 2.0 + self.omega_z * (self.m_n(n) + 0.5) + c / 2.0
    }

    /// `m_n = -N I₀ + 1/2 + n`.
    pub fn m_n(&self, n: i64) -> f64 {
        -(self.n_sites() as f64) * self.spin.value() + 0.5 + n as f64
    }

    fn check_basis(&self, basis: &SubspaceBasis) -> Result<()> {
        if basis.n_sites() != self.n_sites() || basis.spin() != self.spin {
            return Err(Error::invalid(format!(
                "basis (N = {}, I0 = {}) does not match the model (N = {}, I0 = {})",
                basis.n_sites(),
                basis.spin(),
                self.n_sites(),
                self.spin
            )));
        }
        Ok(())
    }
}

fn rabi_of(p: &CouplingProfile, spin: Spin) -> f64 {
    (spin.value() * p.sum_sq() / 2.0).sqrt()
}

/// `Ω = sqrt(I₀ Σ_j g_j² / 2)`, recomputed from the profile.
pub fn rabi_frequency(params: &ModelParams) -> f64 {
    rabi_of(&params.profile, params.spin)
}

/// Sets `Ω_z = ω_z + N ḡ I₀`, which degenerates `μ_g(n)` and `μ_f(n)`.
pub fn tune_resonance(params: &ModelParams) -> ModelParams {
    let mut p = params.clone();
    p.big_omega_z = p.resonant_big_omega_z();
    p.resonant = true;
    p
}

/// The full Hamiltonian and its pieces on one basis.
#[derive(Debug, Clone)]
pub struct HamiltonianParts {
    /// `H` as written, term by term.
    pub full: SparseOperator,
    /// `H_R = Ω (σ_+ B + σ_- B†)`.
    pub exchange_collective: SparseOperator,
    /// `H_S`, diagonal with `μ_g(n)` on up and `μ_f(n)` on down states.
    pub larmor: SparseOperator,
    /// `H_p = S_z Σ_j g_j (I_z^(j) + I₀)`.
    pub inhomogeneity: SparseOperator,
    /// `H_s = ½ Σ_j g_j (σ_+ I_-^(j) + σ_- I_+^(j))`.
    pub exchange: SparseOperator,
    /// `max |H - (H_R + H_S + H_p)|`.
    pub closure_error: f64,
}

fn half_sigma_z() -> OpExpr {
    OpExpr::SigmaZ.scaled(0.5)
}

/// Term-by-term expression of `H`.
pub fn full_hamiltonian_expr(params: &ModelParams) -> OpExpr {
    let n = params.n_sites();
    let g = params.profile.g().to_vec();
    OpExpr::Sum(vec![
        half_sigma_z().scaled(params.big_omega_z),
        OpExpr::Weighted(SiteOp::Z, vec![params.omega_z; n]),
        half_sigma_z().times(OpExpr::Weighted(SiteOp::Z, g)),
        exchange_expr(params),
    ])
}

/// `½ Σ_j g_j (σ_+ I_-^(j) + σ_- I_+^(j))`.
pub fn exchange_expr(params: &ModelParams) -> OpExpr {
    let half_g: Vec<f64> = params.profile.g().iter().map(|g| g / 2.0).collect();
    OpExpr::Sum(vec![
        OpExpr::SigmaPlus.times(OpExpr::Weighted(SiteOp::Minus, half_g.clone())),
        OpExpr::SigmaMinus.times(OpExpr::Weighted(SiteOp::Plus, half_g)),
    ])
}

/// `Ω (σ_+ B + σ_- B†)` with `B` the normalized collective mode.
pub fn collective_exchange_expr(params: &ModelParams) -> OpExpr {
    let b = collective_b_expr(&params.profile, params.spin);
    let bd = b.dagger();
    OpExpr::Sum(vec![OpExpr::SigmaPlus.times(b), OpExpr::SigmaMinus.times(bd)]).scaled(params.rabi)
}

/// `H_s` on `basis`.
pub fn build_hs(params: &ModelParams, basis: &SubspaceBasis) -> Result<SparseOperator> {
    params.check_basis(basis)?;
    build_operator(basis, &exchange_expr(params))
}

/// The full `H` on `basis`.
pub fn build_full(params: &ModelParams, basis: &SubspaceBasis) -> Result<SparseOperator> {
    params.check_basis(basis)?;
    build_operator(basis, &full_hamiltonian_expr(params))
}

/// Builds `H` and all parts, checking `H = H_R + H_S + H_p` on the way.
///
/// `H_S` and `H_p` are assembled from their closed-form diagonals and `H` from
/// the term-by-term expression, so the closure check compares independent
/// constructions.
pub fn build_parts(params: &ModelParams, basis: &SubspaceBasis) -> Result<HamiltonianParts> {
    params.check_basis(basis)?;
    let full = build_operator(basis, &full_hamiltonian_expr(params))?;
    let exchange_collective = build_operator(basis, &collective_exchange_expr(params))?;
    let exchange = build_operator(basis, &exchange_expr(params))?;

    let sectors = basis.sectors();
    let mut larmor_diag = vec![0.0; basis.dim()];
    for s in sectors {
        let mu = match s.electron {
            Electron::Up => params.mu_g(s.n),
            Electron::Down => params.mu_f(s.n),
        };
        larmor_diag[s.range()].fill(mu);
    }
    let larmor = SparseOperator::diagonal(basis.space(), &larmor_diag);

    let inhomogeneity = build_inhomogeneity(params, basis)?;

    let sum = exchange_collective.add(&larmor)?.add(&inhomogeneity)?;
    let closure_error = full.max_abs_diff(&sum)?;
    if closure_error > CLOSURE_TOL * full.max_abs().max(1.0) {
        return Err(Error::Internal(format!(
            "H differs from H_R + H_S + H_p by {closure_error:e}"
        )));
    }
    Ok(HamiltonianParts {
        full,
        exchange_collective,
        larmor,
        inhomogeneity,
        exchange,
        closure_error,
    })
}

/// `H_p = S_z Σ_j g_j (I_z^(j) + I₀)` alone, diagonal in the spin basis.
pub fn build_inhomogeneity(params: &ModelParams, basis: &SubspaceBasis) -> Result<SparseOperator> {
    params.check_basis(basis)?;
    let g = params.profile.g();
    let diag: Vec<f64> = basis
        .states()
        .iter()
        .map(|s| {
            let m: f64 = s.config.iter().zip(g).map(|(&k, gj)| gj * k as f64).sum();
            0.5 * s.electron.sigma_z() * m
        })
        .collect();
    Ok(SparseOperator::diagonal(basis.space(), &diag))
}

/// Position of `|e, m⟩` in the ideal boson space: `2m` for up, `2m + 1` for down.
pub fn boson_index(electron: Electron, m: usize) -> usize {
    2 * m + usize::from(electron == Electron::Down)
}

/// `H_c = Ω (σ_+ b + σ_- b†) + ω_z (b†b + S_z - 1/2)` on `|e⟩ ⊗ |m⟩`,
/// `m <= m_max`, with exact bosonic elements `sqrt(m + 1)`.
///
/// The block `{|↑, m⟩, |↓, m + 1⟩}` sits at energy `m ω_z` and `|↓, 0⟩` at
/// `-ω_z`. The coupling out of `|↑, m_max⟩` is truncated.
pub fn build_effective_hc(params: &ModelParams, m_max: usize) -> Result<SparseOperator> {
    if m_max < 1 {
        return Err(Error::invalid("boson truncation m_max must be at least 1"));
    }
    if !params.resonant {
        return Err(Error::invalid("the effective model needs resonance-tuned parameters"));
    }
    let space = Space::Boson { m_max };
    let dim = 2 * (m_max + 1);
    let w = params.omega_z;
    let omega = params.rabi;
    let mut entries = Vec::with_capacity(3 * dim);
    for m in 0..=m_max {
        let up = boson_index(Electron::Up, m);
        let down = boson_index(Electron::Down, m);
        entries.push((up, up, w * m as f64));
        entries.push((down, down, w * (m as f64 - 1.0)));
        if m < m_max {
            let partner = boson_index(Electron::Down, m + 1);
            let c = omega * ((m + 1) as f64).sqrt();
            entries.push((up, partner, c));
            entries.push((partner, up, c));
        }
    }
    SparseOperator::from_real_triplets(space, dim, entries)
}
