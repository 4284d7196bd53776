use std::collections::BTreeMap;

use rustc_hash::FxHashMap;

use num_complex::Complex64;

use super::expr::level_coefficient;
use super::{
    build_operator_with, BasisState, BuildMode, Electron, LadderConvention, LadderDirection, OpExpr, SiteOp,
    SparseOperator, Spin, StateVector, SubspaceBasis,
};
use crate::couplings::{CouplingProfile, ModeBasis};
use crate::error::{Error, Result};

/// Excited sites of a configuration as `(site, level)` pairs with
/// `level > 0`, sorted by site.
type Excitations = Box<[(u32, u8)]>;

fn excitations_of(config: &[u8]) -> Excitations {
    config
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(j, &k)| (j as u32, k))
        .collect()
}

/// Copy of `key` with the level of `site` replaced.
fn with_level(key: &[(u32, u8)], site: u32, level: u8) -> Excitations {
    let mut out = Vec::with_capacity(key.len() + 1);
    let mut placed = false;
    for &(j, k) in key {
        if j == site {
            placed = true;
            if level > 0 {
                out.push((j, level));
            }
            continue;
        }
        if !placed && j > site {
            placed = true;
            if level > 0 {
                out.push((site, level));
            }
        }
        out.push((j, k));
    }
    if !placed && level > 0 {
        out.push((site, level));
    }
    out.into_boxed_slice()
}

/// Nuclear-only state as a sparse map from configuration to amplitude.
///
/// The electron is a spectator for every collective operator, so Fock states
/// and commutator expectations are computed here and embedded afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct NuclearState {
    spin: Spin,
    n_sites: usize,
    amps: BTreeMap<Excitations, Complex64>,
}

impl NuclearState {
    /// The polarized state `|G⟩ = ∏ |−I₀⟩`.
    pub fn ground(n_sites: usize, spin: Spin) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(Excitations::default(), Complex64::new(1.0, 0.0));
        NuclearState { spin, n_sites, amps }
    }

    /// Electron-`e` component of a state on `basis`.
    pub fn component(basis: &SubspaceBasis, v: &StateVector, electron: Electron) -> Self {
        let amps = basis
            .states()
            .iter()
            .zip(v.amplitudes())
            .filter(|(s, a)| s.electron == electron && a.norm_sqr() > 0.0)
            .map(|(s, a)| (excitations_of(&s.config), *a))
            .collect();
        NuclearState {
            spin: basis.spin(),
            n_sites: basis.n_sites(),
            amps,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.values().all(|a| a.norm_sqr() == 0.0)
    }

    /// Amplitudes keyed by their excited `(site, level)` pairs.
    pub fn amplitudes(&self) -> impl Iterator<Item = (&[(u32, u8)], Complex64)> {
        self.amps.iter().map(|(c, a)| (&**c, *a))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        NuclearState {
            spin: self.spin,
            n_sites: self.n_sites,
            amps: self.amps.iter().map(|(k, a)| (k.clone(), a * c)).collect(),
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &NuclearState) -> Complex64 {
        self.amps
            .iter()
            .filter_map(|(k, a)| other.amps.get(k).map(|b| a.conj() * b))
            .sum()
    }

    /// `Σ_j w_j I_±^(j)` applied to the state.
    pub fn apply_weighted(&self, w: &[f64], direction: LadderDirection, conv: LadderConvention) -> Self {
        let factor = match conv {
            LadderConvention::Standard => 1.0,
            LadderConvention::HalfFactor => 0.5,
        };
        let mut out: FxHashMap<Excitations, Complex64> = FxHashMap::default();
        let mut levels = vec![0u8; self.n_sites];
        for (key, a) in &self.amps {
            for &(j, k) in key.iter() {
                levels[j as usize] = k;
            }
            for (j, &wj) in w.iter().enumerate() {
                let k = levels[j];
                let c = level_coefficient(self.spin, k, direction);
                if c == 0.0 || wj == 0.0 {
                    continue;
                }
                let next = match direction {
                    LadderDirection::Raise => k + 1,
                    LadderDirection::Lower => k - 1,
                };
                *out.entry(with_level(key, j as u32, next)).or_default() += a * (wj * c * factor);
            }
            for &(j, _) in key.iter() {
                levels[j as usize] = 0;
            }
        }
        NuclearState {
            spin: self.spin,
            n_sites: self.n_sites,
            amps: out.into_iter().filter(|(_, a)| a.norm_sqr() > 0.0).collect(),
        }
    }

    /// `⟨Σ_j w_j (I_z^(j) + I₀)⟩` without normalization.
    pub fn weighted_excitation(&self, w: &[f64]) -> f64 {
        self.amps
            .iter()
            .map(|(c, a)| a.norm_sqr() * c.iter().map(|&(j, k)| w[j as usize] * k as f64).sum::<f64>())
            .sum()
    }

    /// Largest nuclear excitation count carrying weight.
    pub fn max_excitation(&self) -> usize {
        self.amps
            .iter()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(c, _)| c.iter().map(|&(_, k)| k as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Places `|e⟩ ⊗ self` on `basis`; every configuration must be present.
    pub fn embed(&self, basis: &SubspaceBasis, electron: Electron) -> Result<StateVector> {
        let mut v = StateVector::zeros(basis.space(), basis.dim());
        self.embed_into(basis, electron, &mut v)?;
        Ok(v)
    }

    /// Adds `|e⟩ ⊗ self` into `v`.
    pub fn embed_into(&self, basis: &SubspaceBasis, electron: Electron, v: &mut StateVector) -> Result<()> {
        if basis.n_sites() != self.n_sites || basis.spin() != self.spin {
            return Err(Error::invalid("nuclear state and basis disagree on N or I0"));
        }
        let mut probe = BasisState::new(electron, vec![0u8; self.n_sites]);
        for (key, a) in &self.amps {
            for &(j, k) in key.iter() {
                probe.config[j as usize] = k;
            }
            let i = basis.index_of(&probe).ok_or_else(|| {
                Error::invalid(format!(
                    "state with electron {electron:?} and {} excitations is not in the basis",
                    probe.excitation()
                ))
            })?;
            v.amplitudes_mut()[i] += a;
            for &(j, _) in key.iter() {
                probe.config[j as usize] = 0;
            }
        }
        Ok(())
    }
}

/// Normalized collective weights `w / sqrt(2 I₀ Σ w_j²)`.
pub(crate) fn collective_weights(w: &[f64], spin: Spin) -> Result<Vec<f64>> {
    let s: f64 = w.iter().map(|x| x * x).sum();
    if !(s > 0.0) {
        return Err(Error::invalid("collective mode needs a nonzero weight vector"));
    }
    let norm = (2.0 * spin.value() * s).sqrt();
    Ok(w.iter().map(|x| x / norm).collect())
}

fn check_profile(basis: &SubspaceBasis, n: usize) -> Result<()> {
    if basis.n_sites() != n {
        return Err(Error::invalid(format!(
            "profile has N = {n} but basis has N = {}",
            basis.n_sites()
        )));
    }
    Ok(())
}

/// Expression for `B = Σ_i g_i I_-^(i) / sqrt(2 I₀ Σ_j g_j²)`.
pub fn collective_b_expr(p: &CouplingProfile, spin: Spin) -> OpExpr {
    OpExpr::Weighted(SiteOp::Minus, collective_weights(p.g(), spin).expect("profiles are positive"))
}

/// `B` (electron identity) compressed onto `basis`: `P B P`.
///
/// `B` lowers the nuclear excitation by one, so on a direct sum of sectors it
/// is exact for every state whose image stays inside; images below the
/// lowest sector are dropped. Use a tower starting at `n = -1` to keep it
/// exact.
pub fn collective_b(basis: &SubspaceBasis, p: &CouplingProfile) -> Result<SparseOperator> {
    check_profile(basis, p.n_sites())?;
    build_operator_with(basis, &collective_b_expr(p, basis.spin()), LadderConvention::Standard, BuildMode::Project)
}

/// Auxiliary mode `C_k = Σ_i h_i^[k] I_-^(i) / sqrt(2 I₀ Σ_j (h_j^[k])²)`,
/// `2 <= k <= N`, compressed onto `basis` like [`collective_b`].
pub fn collective_c(basis: &SubspaceBasis, modes: &ModeBasis, k: usize) -> Result<SparseOperator> {
    let n = basis.n_sites();
    if modes.len() != n {
        return Err(Error::invalid(format!("mode basis has {} vectors for N = {n}", modes.len())));
    }
    if !(2..=n).contains(&k) {
        return Err(Error::invalid(format!("auxiliary mode index k = {k} outside 2..={n}")));
    }
    let h = modes.mode(k).expect("index checked");
    let expr = OpExpr::Weighted(SiteOp::Minus, collective_weights(h, basis.spin())?);
    build_operator_with(basis, &expr, LadderConvention::Standard, BuildMode::Project)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectEstimate {
    /// `F = ⟨Σ_j g_j² (I_z^(j) + I₀)⟩ / (I₀ Σ_j g_j²)`, so `⟨[B, B†]⟩ = 1 - F`.
    pub value: f64,
    /// `g_max² n_eff / (mean(g²) I₀ N)`.
    pub bound: f64,
    /// Largest nuclear excitation present in the state.
    pub n_eff: usize,
}

/// Commutator defect of a normalized state and its a-priori bound.
pub fn commutator_defect(basis: &SubspaceBasis, p: &CouplingProfile, v: &StateVector) -> Result<DefectEstimate> {
    check_profile(basis, p.n_sites())?;
    if v.dim() != basis.dim() {
        return Err(Error::invalid("state does not belong to the basis"));
    }
    let i0 = basis.spin().value();
    let g2: Vec<f64> = p.g().iter().map(|x| x * x).collect();
    let mut num = 0.0;
    let mut n_eff = 0;
    for (s, a) in basis.states().iter().zip(v.amplitudes()) {
        let w = a.norm_sqr();
        if w == 0.0 {
            continue;
        }
        num += w * s.config.iter().zip(&g2).map(|(&k, g)| g * k as f64).sum::<f64>();
        n_eff = n_eff.max(s.excitation());
    }
    let value = num / (i0 * p.sum_sq());
    let bound = p.max_sq() * n_eff as f64 / (p.mean_sq() * i0 * p.n_sites() as f64);
    Ok(DefectEstimate { value, bound, n_eff })
}

/// `⟨v|[B, B†]|v⟩ = ‖B†v‖² - ‖Bv‖²`, evaluated on the nuclear factor of each
/// electron component so that no truncation enters.
pub fn commutator_expectation(
    basis: &SubspaceBasis,
    p: &CouplingProfile,
    v: &StateVector,
    conv: LadderConvention,
) -> Result<f64> {
    check_profile(basis, p.n_sites())?;
    let w = collective_weights(p.g(), basis.spin())?;
    let mut total = 0.0;
    for e in [Electron::Up, Electron::Down] {
        let psi = NuclearState::component(basis, v, e);
        let raised = psi.apply_weighted(&w, LadderDirection::Raise, conv);
        let lowered = psi.apply_weighted(&w, LadderDirection::Lower, conv);
        total += raised.norm_sqr() - lowered.norm_sqr();
    }
    Ok(total)
}

/// Both sides of the mode sum rule on a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumRule {
    /// `⟨B†B + Σ_k C_k†C_k⟩`.
    pub occupation: f64,
    /// `⟨Σ_j (I_z^(j) + I₀)⟩`.
    pub excitation: f64,
}

/// Evaluates the mode sum rule using every row of `modes` (row 0 is the
/// `B` mode) on a normalized state of `basis`.
pub fn sum_rule(basis: &SubspaceBasis, modes: &ModeBasis, v: &StateVector) -> Result<SumRule> {
    check_profile(basis, modes.len())?;
    if v.dim() != basis.dim() {
        return Err(Error::invalid("state does not belong to the basis"));
    }
    let ones = vec![1.0; basis.n_sites()];
    let weights = modes
        .vectors()
        .iter()
        .map(|h| collective_weights(h, basis.spin()))
        .collect::<Result<Vec<_>>>()?;
    let (mut occupation, mut excitation) = (0.0, 0.0);
    for e in [Electron::Up, Electron::Down] {
        let psi = NuclearState::component(basis, v, e);
        excitation += psi.weighted_excitation(&ones);
        for w in &weights {
            occupation += psi.apply_weighted(w, LadderDirection::Lower, LadderConvention::Standard).norm_sqr();
        }
    }
    Ok(SumRule { occupation, excitation })
}

/// `(B†)^m |G⟩` as a nuclear state, unnormalized.
pub fn bmode_power(p: &CouplingProfile, spin: Spin, m: usize) -> NuclearState {
    let w = collective_weights(p.g(), spin).expect("profiles are positive");
    let mut psi = NuclearState::ground(p.n_sites(), spin);
    for _ in 0..m {
        psi = psi.apply_weighted(&w, LadderDirection::Raise, LadderConvention::Standard);
    }
    psi
}

/// Normalized `|e⟩ ⊗ (B†)^m|G⟩` on `basis` and the relative deviation of
/// `‖(B†)^m|G⟩‖²` from the bosonic value `m!`.
pub fn bmode_fock_state(
    basis: &SubspaceBasis,
    p: &CouplingProfile,
    m: usize,
    electron: Electron,
) -> Result<(StateVector, f64)> {
    check_profile(basis, p.n_sites())?;
    let psi = bmode_power(p, basis.spin(), m);
    let norm_sq = psi.norm_sqr();
    if norm_sq < 1e-300 {
        return Err(Error::Degenerate(format!(
            "(B†)^{m}|G⟩ vanishes: {m} quanta exceed the ensemble capacity"
        )));
    }
    let factorial: f64 = (1..=m).map(|i| i as f64).product();
    let defect = (norm_sq - factorial).abs() / factorial;
    let v = psi.scaled(Complex64::new(1.0 / norm_sq.sqrt(), 0.0)).embed(basis, electron)?;
    Ok((v, defect))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couplings::{generate_profile, gram_schmidt_modes, permutation_mode, ProfileKind, ProfileSpec};
    use crate::fockspace::{enumerate_direct_sum, enumerate_subspace};

    fn hom(n: usize) -> CouplingProfile {
        CouplingProfile::homogeneous(n, 1.0).unwrap()
    }

    #[test]
    fn b_annihilates_ground_state() {
        let p = hom(3);
        let b_tower = enumerate_direct_sum(3, Spin::HALF, -1, 1).unwrap();
        let b = collective_b(&b_tower, &p).unwrap();
        for e in [Electron::Up, Electron::Down] {
            let g = StateVector::basis(b_tower.space(), b_tower.dim(), b_tower.ground_index(e).unwrap());
            assert_eq!(b.apply(&g).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn b_dagger_on_ground_is_symmetric_flip() {
        let n = 5;
        let p = hom(n);
        let basis = enumerate_direct_sum(n, Spin::HALF, -1, 1).unwrap();
        let bd = collective_b(&basis, &p).unwrap().adjoint();
        let g = StateVector::basis(basis.space(), basis.dim(), basis.ground_index(Electron::Down).unwrap());
        let v = bd.apply(&g).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-15);
        let amp = 1.0 / (n as f64).sqrt();
        for (s, a) in basis.states().iter().zip(v.amplitudes()) {
            let want = if s.electron == Electron::Down && s.excitation() == 1 { amp } else { 0.0 };
            assert!((a.re - want).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn ground_commutator_is_one() {
        let p = generate_profile(&ProfileSpec::Uniform { low: 0.2, high: 3.0 }, 6, 9).unwrap();
        for twice in 1..=3 {
            let spin = Spin::from_twice(twice).unwrap();
            let basis = enumerate_direct_sum(6, spin, -1, 0).unwrap();
            let g = StateVector::basis(basis.space(), basis.dim(), basis.ground_index(Electron::Up).unwrap());
            let c = commutator_expectation(&basis, &p, &g, LadderConvention::Standard).unwrap();
            assert!((c - 1.0).abs() < 1e-14);
            // Matrix route: ⟨G|B B†|G⟩ - ⟨G|B† B|G⟩ with B built on a tower
            // that contains the image of B†.
            let tower = enumerate_direct_sum(6, spin, -1, 1).unwrap();
            let b = collective_b(&tower, &p).unwrap();
            let comm = b.commutator(&b.adjoint()).unwrap();
            let g = StateVector::basis(tower.space(), tower.dim(), tower.ground_index(Electron::Up).unwrap());
            assert!((comm.expectation(&g).unwrap().re - 1.0).abs() < 1e-14);
            assert_eq!(commutator_defect(&tower, &p, &g).unwrap().value, 0.0);
        }
    }

    #[test]
    fn defect_single_flip() {
        let basis = enumerate_subspace(4, Spin::HALF, 1).unwrap();
        let p = hom(4);
        let v = NuclearState::ground(4, Spin::HALF)
            .apply_weighted(&[1.0, 0.0, 0.0, 0.0], LadderDirection::Raise, LadderConvention::Standard)
            .embed(&basis, Electron::Up)
            .unwrap();
        let d = commutator_defect(&basis, &p, &v).unwrap();
        assert!((d.value - 0.5).abs() < 1e-15);
        assert_eq!(d.n_eff, 1);
        assert!((d.bound - 0.5).abs() < 1e-15);
        let c = commutator_expectation(&basis, &p, &v, LadderConvention::Standard).unwrap();
        assert!((c - (1.0 - d.value)).abs() < 1e-14);
    }

    #[test]
    fn aux_mode_commutators_on_ground() {
        let p = generate_profile(&ProfileSpec::gaussian(5, 3.0), 5, 0).unwrap();
        let modes = gram_schmidt_modes(&p).unwrap();
        let tower = enumerate_direct_sum(5, Spin::HALF, -1, 1).unwrap();
        let b = collective_b(&tower, &p).unwrap();
        let g = StateVector::basis(tower.space(), tower.dim(), tower.ground_index(Electron::Up).unwrap());
        for k in 2..=5 {
            let c = collective_c(&tower, &modes, k).unwrap();
            let cb = c.commutator(&b.adjoint()).unwrap().expectation(&g).unwrap();
            let cc = c.commutator(&c.adjoint()).unwrap().expectation(&g).unwrap();
            assert!(cb.norm() < 1e-14, "k = {k}: {cb}");
            assert!((cc.re - 1.0).abs() < 1e-14);
        }
        assert!(collective_c(&tower, &modes, 1).is_err());
        assert!(collective_c(&tower, &modes, 6).is_err());
    }

    #[test]
    fn mirrored_mode_state_orthogonal_to_b_state() {
        let p = hom(4);
        let h = permutation_mode(&p).unwrap();
        let hp = CouplingProfile::new(vec![1.0; 4], ProfileKind::Custom).unwrap();
        let w = collective_weights(&h, Spin::HALF).unwrap();
        let c_state = NuclearState::ground(4, Spin::HALF).apply_weighted(&w, LadderDirection::Raise, LadderConvention::Standard);
        let b_state = bmode_power(&hp, Spin::HALF, 1);
        assert!(c_state.inner(&b_state).norm() < 1e-14);
        assert!((c_state.norm_sqr() - 1.0).abs() < 1e-14);
    }

    /// Expands `(B†)²|G⟩` by hand over the six two-flip states of four spins.
    #[test]
    fn two_quanta_norm_defect() {
        let p = hom(4);
        let basis = enumerate_subspace(4, Spin::HALF, 2).unwrap();
        // Each unordered pair {i, j} is reached twice (i then j, j then i),
        // each time with amplitude (1/2)·(1/2) for N = 4, I₀ = 1/2.
        let pair_amp: f64 = 2.0 * 0.25;
        let brute_norm_sq = 6.0 * pair_amp * pair_amp;
        assert!((brute_norm_sq - 1.5).abs() < 1e-15);
        let (v, defect) = bmode_fock_state(&basis, &p, 2, Electron::Up).unwrap();
        assert!((defect - (2.0 - brute_norm_sq).abs() / 2.0).abs() < 1e-15);
        assert!((defect - 0.25).abs() < 1e-15);
        assert!((v.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fock_state_edges() {
        let p = hom(3);
        let b0 = enumerate_subspace(3, Spin::HALF, 0).unwrap();
        let (g, d0) = bmode_fock_state(&b0, &p, 0, Electron::Up).unwrap();
        assert_eq!(d0, 0.0);
        assert_eq!(g.amplitudes()[b0.ground_index(Electron::Up).unwrap()], Complex64::new(1.0, 0.0));
        let (_, d1) = bmode_fock_state(&b0, &p, 1, Electron::Down).unwrap();
        assert!(d1 < 1e-15);
        let full = enumerate_direct_sum(3, Spin::HALF, -1, 3).unwrap();
        assert!(matches!(
            bmode_fock_state(&full, &p, 4, Electron::Up),
            Err(Error::Degenerate(_))
        ));
        // Right excitation count but wrong electron sector.
        assert!(bmode_fock_state(&b0, &p, 1, Electron::Up).is_err());
    }
}
