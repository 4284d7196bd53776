//! Writing an electron qubit into the collective nuclear mode and reading it
//! back.
//!
//! In the ideal boson model the pair `{|↑, m⟩, |↓, m + 1⟩}` evolves under the
//! block `U_m(t)` and the dark state `|↓, 0⟩` only picks up the phase
//! `e^{iω_z t}`. At `t = π/(2Ω)` the `m = 0` block swaps completely, giving
//!
//! ```text
//! (α|↑⟩ + β|↓⟩) ⊗ |G⟩  →  |↓⟩ ⊗ (β|G₁⟩ - iα e^{-iω_z t}|G₂⟩) = |↓⟩ ⊗ W(α|G₁⟩ + β|G₂⟩)
//! ```
//!
//! up to a global phase, with `|G₁⟩ = |G⟩` and `|G₂⟩ = B†|G⟩`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockspace::{enumerate_direct_sum, Electron, NuclearState, Space, StateVector, SubspaceBasis};
use crate::hamiltonian::{boson_index, build_full, build_hs, ModelParams};
use crate::spectra::{normalized_bmode, Eigendecomposition};

const NORM_TOL: f64 = 1e-12;

pub type Block = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl QubitState {
    /// Requires `|α|² + |β|² = 1` to 1e-12.
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!("qubit norm² is {n}, expected 1")));
        }
        Ok(QubitState { alpha, beta })
    }

    pub fn normalized(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Degenerate("qubit amplitudes are zero or not finite".into()));
        }
        Ok(QubitState {
            alpha: alpha / n,
            beta: beta / n,
        })
    }

    pub fn up() -> Self {
        QubitState {
            alpha: c(1.0, 0.0),
            beta: c(0.0, 0.0),
        }
    }

    pub fn down() -> Self {
        QubitState {
            alpha: c(0.0, 0.0),
            beta: c(1.0, 0.0),
        }
    }

    /// Uniform on the Bloch sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let cos_theta: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let half = cos_theta.acos() / 2.0;
        QubitState {
            alpha: c(half.cos(), 0.0),
            beta: Complex64::from_polar(half.sin(), phi),
        }
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &QubitState) -> f64 {
        (self.alpha.conj() * other.alpha + self.beta.conj() * other.beta).norm()
    }
}

/// Write time `π/(2Ω)`.
pub fn write_time(params: &ModelParams) -> f64 {
    FRAC_PI_2 / params.rabi()
}

/// `U_m(t) = e^{-iω_z m t} [[cos Ω_m t, -i sin Ω_m t], [-i sin Ω_m t, cos Ω_m t]]`
/// on `(|↑, m⟩, |↓, m + 1⟩)`, `Ω_m = sqrt(m + 1) Ω`.
pub fn um_block(params: &ModelParams, m: usize, t: f64) -> Block {
    let om = ((m + 1) as f64).sqrt() * params.rabi();
    let phase = Complex64::from_polar(1.0, -params.omega_z() * m as f64 * t);
    let (s, co) = (om * t).sin_cos();
    let diag = phase * co;
    let off = phase * c(0.0, -s);
    [[diag, off], [off, diag]]
}

/// Effective-model evolution of `(α|↑⟩ + β|↓⟩) ⊗ |m⟩_b` on the boson space
/// truncated at `m + 1` quanta.
///
/// The α branch lives in block `m`, the β branch in block `m - 1`, or in the
/// dark state when `m = 0`.
pub fn effective_evolve(params: &ModelParams, qubit: &QubitState, m: i64, t: f64) -> Result<StateVector> {
    let m = usize::try_from(m).map_err(|_| Error::invalid(format!("memory occupation {m} is negative")))?;
    let m_max = m + 1;
    let mut amps = vec![c(0.0, 0.0); 2 * (m_max + 1)];
    let u = um_block(params, m, t);
    amps[boson_index(Electron::Up, m)] += u[0][0] * qubit.alpha;
    amps[boson_index(Electron::Down, m + 1)] += u[1][0] * qubit.alpha;
    if m == 0 {
        amps[boson_index(Electron::Down, 0)] += Complex64::from_polar(1.0, params.omega_z() * t) * qubit.beta;
    } else {
        let v = um_block(params, m - 1, t);
        amps[boson_index(Electron::Up, m - 1)] += v[0][1] * qubit.beta;
        amps[boson_index(Electron::Down, m)] += v[1][1] * qubit.beta;
    }
    Ok(StateVector::new(Space::Boson { m_max }, amps))
}

/// `W` as a matrix on `(|G₁⟩, |G₂⟩)` coefficients: `(α, β) ↦ (β, -iα e^{-iω_z t})`.
pub fn write_map(params: &ModelParams, t: f64) -> Block {
    let ph = c(0.0, -1.0) * Complex64::from_polar(1.0, -params.omega_z() * t);
    [[c(0.0, 0.0), c(1.0, 0.0)], [ph, c(0.0, 0.0)]]
}

fn apply(b: &Block, v: [Complex64; 2]) -> [Complex64; 2] {
    [b[0][0] * v[0] + b[0][1] * v[1], b[1][0] * v[0] + b[1][1] * v[1]]
}

fn adjoint(b: &Block) -> Block {
    [[b[0][0].conj(), b[1][0].conj()], [b[0][1].conj(), b[1][1].conj()]]
}

fn overlap2(a: [Complex64; 2], b: [Complex64; 2]) -> f64 {
    (a[0].conj() * b[0] + a[1].conj() * b[1]).norm()
}

/// Outcome of the write protocol in the effective model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorageResult {
    pub qubit: QubitState,
    pub t: f64,
    pub omega: f64,
    pub omega_z: f64,
    /// Amplitudes on `|↑,0⟩, |↓,0⟩, |↑,1⟩, |↓,1⟩`.
    pub final_state: Vec<Complex64>,
    /// Electron density matrix in `(|↑⟩, |↓⟩)`.
    pub electron_rho: Block,
    /// Memory density matrix in `(|G₁⟩, |G₂⟩)`.
    pub memory_rho: Block,
    /// Weight of `|↓⟩` after the write.
    pub down_probability: f64,
    /// `|⟨W(α, β)|m⟩|` with `m` the normalized `|↓⟩`-projected memory.
    pub write_fidelity: f64,
    /// `|⟨(α, β)|W⁻¹ m⟩|`.
    pub decode_fidelity: f64,
}

/// Runs the write at `t = π/(2Ω)` in the effective model.
pub fn write_qubit(params: &ModelParams, qubit: &QubitState) -> Result<StorageResult> {
    if !params.is_resonant() {
        return Err(Error::invalid("the storage protocol needs resonance-tuned parameters"));
    }
    let t = write_time(params);
    let state = effective_evolve(params, qubit, 0, t)?;
    let a = state.amplitudes();
    let amp = |e, m| a[boson_index(e, m)];
    let mut electron_rho = [[c(0.0, 0.0); 2]; 2];
    let mut memory_rho = [[c(0.0, 0.0); 2]; 2];
    let es = [Electron::Up, Electron::Down];
    for (i, &ei) in es.iter().enumerate() {
        for (j, &ej) in es.iter().enumerate() {
            electron_rho[i][j] = (0..2).map(|m| amp(ei, m) * amp(ej, m).conj()).sum();
        }
    }
    for (mi, row) in memory_rho.iter_mut().enumerate() {
        for (mj, cell) in row.iter_mut().enumerate() {
            *cell = es.iter().map(|&e| amp(e, mi) * amp(e, mj).conj()).sum();
        }
    }
    let projected = [amp(Electron::Down, 0), amp(Electron::Down, 1)];
    let down_probability = projected[0].norm_sqr() + projected[1].norm_sqr();
    let (write_fidelity, decode_fidelity) = memory_fidelities(params, qubit, projected, t)?;
    Ok(StorageResult {
        qubit: *qubit,
        t,
        omega: params.rabi(),
        omega_z: params.omega_z(),
        final_state: a.to_vec(),
        electron_rho,
        memory_rho,
        down_probability,
        write_fidelity,
        decode_fidelity,
    })
}

fn memory_fidelities(params: &ModelParams, qubit: &QubitState, mem: [Complex64; 2], t: f64) -> Result<(f64, f64)> {
    let n = (mem[0].norm_sqr() + mem[1].norm_sqr()).sqrt();
    if !(n > 0.0) {
        return Ok((0.0, 0.0));
    }
    let mem = [mem[0] / n, mem[1] / n];
    let w = write_map(params, t);
    let input = [qubit.alpha, qubit.beta];
    let target = apply(&w, input);
    let decoded = apply(&adjoint(&w), mem);
    Ok((overlap2(target, mem), overlap2(input, decoded)))
}

/// Which Hamiltonian drives [`exact_evolve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Drive {
    /// The exchange term `H_s` only.
    Exchange,
    /// The full `H`, including `H_S` and `H_p`.
    Full,
}

/// Cached eigendecomposition of `H_s` or `H` on a basis, for evolving many
/// states or times.
#[derive(Debug, Clone)]
pub struct Propagator {
    evd: Eigendecomposition,
    dim: usize,
    space: Space,
}

impl Propagator {
    pub fn new(params: &ModelParams, basis: &SubspaceBasis, drive: Drive) -> Result<Self> {
        let h = match drive {
            Drive::Exchange => build_hs(params, basis)?,
            Drive::Full => build_full(params, basis)?,
        };
        Ok(Propagator {
            evd: Eigendecomposition::new(&h)?,
            dim: basis.dim(),
            space: basis.space(),
        })
    }

    pub fn evolve(&self, v: &StateVector, t: f64) -> Result<StateVector> {
        if v.dim() != self.dim || v.space() != self.space {
            return Err(Error::invalid("state does not belong to the propagator's basis"));
        }
        Ok(StateVector::new(self.space, self.evd.evolve(v.amplitudes(), t)))
    }
}

/// `exp(-iHt) v` by full diagonalization of `H_s` or `H` on `basis`.
pub fn exact_evolve(
    params: &ModelParams,
    basis: &SubspaceBasis,
    initial: &StateVector,
    t: f64,
    drive: Drive,
) -> Result<StateVector> {
    Propagator::new(params, basis, drive)?.evolve(initial, t)
}

/// Write protocol on the spin ensemble, compared with the ideal map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactStorage {
    pub n_sites: usize,
    pub t: f64,
    pub down_probability: f64,
    /// `|⟨W(α, β)|m⟩|` with `m` the normalized `|↓⟩`-projected memory, read in
    /// the `{|G₁⟩, |G₂⟩}` frame.
    pub write_fidelity: f64,
    pub decode_fidelity: f64,
    /// `1 - |⟨ideal|final⟩|` for the full electron-memory state.
    pub overlap_infidelity: f64,
    /// Trace distance `sqrt(1 - |⟨ideal|final⟩|²)` between the final state and
    /// `|↓⟩ ⊗ W(α|G₁⟩ + β|G₂⟩)`.
    pub state_error: f64,
}

/// Evolves `(α|↑⟩ + β|↓⟩) ⊗ |G⟩` on the spin tower `V_{-1} ⊕ V_0` for
/// `t = π/(2Ω)`.
pub fn exact_write(params: &ModelParams, qubit: &QubitState, drive: Drive) -> Result<ExactStorage> {
    if !params.is_resonant() {
        return Err(Error::invalid("the storage protocol needs resonance-tuned parameters"));
    }
    let n = params.n_sites();
    let spin = params.spin();
    let basis = enumerate_direct_sum(n, spin, -1, 0)?;
    let t = write_time(params);
    let ground = NuclearState::ground(n, spin);
    let mut init = ground.scaled(qubit.alpha).embed(&basis, Electron::Up)?;
    ground.scaled(qubit.beta).embed_into(&basis, Electron::Down, &mut init)?;
    let fin = exact_evolve(params, &basis, &init, t, drive)?;

    let g1 = ground.embed(&basis, Electron::Down)?;
    let g2 = normalized_bmode(params, 1)?.embed(&basis, Electron::Down)?;
    let w = write_map(params, t);
    let target = apply(&w, [qubit.alpha, qubit.beta]);
    let ideal = g1.scaled(target[0]).add(&g2.scaled(target[1]))?;

    let down_probability: f64 = basis
        .states()
        .iter()
        .zip(fin.amplitudes())
        .filter(|(s, _)| s.electron == Electron::Down)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let mem = [g1.inner(&fin), g2.inner(&fin)];
    let (mut write_fidelity, mut decode_fidelity) = memory_fidelities(params, qubit, mem, t)?;
    // Weight of the projected memory that falls outside {G₁, G₂}.
    let inside = mem[0].norm_sqr() + mem[1].norm_sqr();
    if down_probability > 0.0 {
        let keep = (inside / down_probability).sqrt();
        write_fidelity *= keep;
        decode_fidelity *= keep;
    }
    let ov = ideal.inner(&fin).norm().min(1.0);
    Ok(ExactStorage {
        n_sites: n,
        t,
        down_probability,
        write_fidelity,
        decode_fidelity,
        overlap_infidelity: 1.0 - ov,
        state_error: (1.0 - ov * ov).max(0.0).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub m: usize,
    /// `|⟨ideal|actual⟩|`.
    pub fidelity: f64,
    /// Weight left on `|↑⟩`.
    pub leakage: f64,
    /// Trace distance `sqrt(1 - fidelity²)`.
    pub deviation: f64,
}

/// Deviation of the effective evolution with `m` quanta already in memory
/// from the `m = 0` protocol.
///
/// The reference for occupation `m` is the `m = 0` evolution carried over
/// to the shifted ladder: the amplitudes of `|↑,0⟩`, `|↓,1⟩`, `|↓,0⟩` are
/// placed on `|↑,m⟩`, `|↓,m+1⟩`, `|↓,m⟩`.
pub fn storage_error_sweep(
    params: &ModelParams,
    qubit: &QubitState,
    m_list: &[usize],
    t_grid: &[f64],
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(m_list.len() * t_grid.len());
    for &m in m_list {
        for &t in t_grid {
            let reference = effective_evolve(params, qubit, 0, t)?;
            let r = reference.amplitudes();
            let actual = effective_evolve(params, qubit, m as i64, t)?;
            let a = actual.amplitudes();
            let pairs = [
                (r[boson_index(Electron::Up, 0)], a[boson_index(Electron::Up, m)]),
                (r[boson_index(Electron::Down, 1)], a[boson_index(Electron::Down, m + 1)]),
                (r[boson_index(Electron::Down, 0)], a[boson_index(Electron::Down, m)]),
            ];
            let fidelity = pairs.iter().map(|(x, y)| x.conj() * y).sum::<Complex64>().norm().min(1.0);
            let leakage = (0..=m + 1).map(|k| a[boson_index(Electron::Up, k)].norm_sqr()).sum();
            rows.push(SweepRow {
                t,
                m,
                fidelity,
                leakage,
                deviation: (1.0 - fidelity * fidelity).max(0.0).sqrt(),
            });
        }
    }
    Ok(rows)
}

/// CSV with columns `t,m,fidelity,leakage,deviation`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut t = crate::io::CsvTable::new(&["t", "m", "fidelity", "leakage", "deviation"]);
    for r in rows {
        t.push_row([
            crate::io::fmt_f64(r.t),
            r.m.to_string(),
            crate::io::fmt_f64(r.fidelity),
            crate::io::fmt_f64(r.leakage),
            crate::io::fmt_f64(r.deviation),
        ]);
    }
    t.finish()
}
