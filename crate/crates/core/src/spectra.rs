//! Exact and effective spectra and how closely they agree.

use faer::{c64, Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::couplings::ModeBasis;
use crate::error::{Error, Result};
use crate::fockspace::{
    bmode_power, collective_weights, Electron, LadderConvention, LadderDirection, NuclearState, SparseOperator,
    StateVector, SubspaceBasis,
};
use crate::hamiltonian::ModelParams;

/// Largest operator handed to the dense eigensolver by default.
pub const DEFAULT_DENSE_CAP: usize = 5000;

/// Largest analytic multiset materialized by [`effective_spectrum`].
const ANALYTIC_CAP: u128 = 10_000_000;

/// Relative gap below which eigenvalues count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Default clustering gap for [`compare_spectra`], as a fraction of `Ω`.
pub const DEFAULT_CLUSTER_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumSource {
    Exact,
    Effective,
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub center: f64,
    pub count: usize,
    /// `max - min` of the member eigenvalues.
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    clusters: Vec<Cluster>,
    source: SpectrumSource,
    cluster_tol: f64,
    /// Constant shift removed from the eigenvalues (`n ω_z` for the analytic
    /// effective spectrum, 0 otherwise).
    offset: f64,
}

impl Spectrum {
    /// Sorts `eigenvalues` and groups neighbours closer than `cluster_tol`.
    pub fn new(mut eigenvalues: Vec<f64>, source: SpectrumSource, cluster_tol: f64) -> Result<Self> {
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("eigenvalues must be finite"));
        }
        eigenvalues.sort_by(f64::total_cmp);
        let clusters = cluster(&eigenvalues, cluster_tol);
        Ok(Spectrum {
            eigenvalues,
            clusters,
            source,
            cluster_tol,
            offset: 0.0,
        })
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn source(&self) -> SpectrumSource {
        self.source
    }

    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn recluster(&self, cluster_tol: f64) -> Spectrum {
        Spectrum {
            clusters: cluster(&self.eigenvalues, cluster_tol),
            cluster_tol,
            ..self.clone()
        }
    }

    /// CSV with columns `index,eigenvalue`.
    pub fn to_csv(&self) -> String {
        let mut t = crate::io::CsvTable::new(&["index", "eigenvalue"]);
        for (i, v) in self.eigenvalues.iter().enumerate() {
            t.push_row([i.to_string(), crate::io::fmt_f64(*v)]);
        }
        t.finish()
    }
}

fn cluster(sorted: &[f64], tol: f64) -> Vec<Cluster> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > tol {
            if i > start {
                let members = &sorted[start..i];
                out.push(Cluster {
                    center: members.iter().sum::<f64>() / members.len() as f64,
                    count: members.len(),
                    spread: members[members.len() - 1] - members[0],
                });
            }
            start = i;
        }
    }
    out
}

fn check_dense(op: &SparseOperator, cap: usize) -> Result<()> {
    if !op.is_hermitian() {
        return Err(Error::invalid(format!(
            "eigensolve needs a hermitian operator (max |A - A†| = {:e})",
            op.hermiticity_error()
        )));
    }
    if op.dim() > cap {
        return Err(Error::Resource {
            what: "dense eigensolver dimension",
            required: op.dim(),
            cap,
        });
    }
    if op.dim() == 0 {
        return Err(Error::invalid("cannot diagonalize an empty operator"));
    }
    Ok(())
}

fn dense_real(op: &SparseOperator) -> Mat<f64> {
    let mut m = Mat::<f64>::zeros(op.dim(), op.dim());
    for (r, c, v) in op.triplets() {
        m[(r, c)] = v.re;
    }
    m
}

fn dense_complex(op: &SparseOperator) -> Mat<c64> {
    let mut m = Mat::<c64>::zeros(op.dim(), op.dim());
    for (r, c, v) in op.triplets() {
        m[(r, c)] = v;
    }
    m
}

fn evd_error(e: impl std::fmt::Debug) -> Error {
    Error::Internal(format!("eigensolver failed: {e:?}"))
}

/// All eigenvalues of a hermitian operator, clustered at the degeneracy
/// threshold relative to the spectral radius.
pub fn eigensolve(op: &SparseOperator) -> Result<Spectrum> {
    eigensolve_capped(op, DEFAULT_DENSE_CAP)
}

pub fn eigensolve_capped(op: &SparseOperator, cap: usize) -> Result<Spectrum> {
    check_dense(op, cap)?;
    let values = if op.is_real() {
        dense_real(op).self_adjoint_eigenvalues(Side::Lower).map_err(evd_error)?
    } else {
        dense_complex(op).self_adjoint_eigenvalues(Side::Lower).map_err(evd_error)?
    };
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    Spectrum::new(values, SpectrumSource::Exact, DEGENERACY_TOL * scale)
}

/// Full eigendecomposition `A = U diag(λ) U†`.
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    values: Vec<f64>,
    vectors: Mat<c64>,
    norm: f64,
}

impl Eigendecomposition {
    pub fn new(op: &SparseOperator) -> Result<Self> {
        Self::new_capped(op, DEFAULT_DENSE_CAP)
    }

    pub fn new_capped(op: &SparseOperator, cap: usize) -> Result<Self> {
        check_dense(op, cap)?;
        let n = op.dim();
        let (values, vectors) = if op.is_real() {
            let evd = dense_real(op).self_adjoint_eigen(Side::Lower).map_err(evd_error)?;
            let s = evd.S().column_vector();
            let values: Vec<f64> = (0..n).map(|i| s[i]).collect();
            let u = evd.U();
            (values, Mat::<c64>::from_fn(n, n, |i, j| c64::new(u[(i, j)], 0.0)))
        } else {
            let evd = dense_complex(op).self_adjoint_eigen(Side::Lower).map_err(evd_error)?;
            let s = evd.S().column_vector();
            let values: Vec<f64> = (0..n).map(|i| s[i].re).collect();
            (values, evd.U().to_owned())
        };
        let norm = op.max_abs();
        let out = Eigendecomposition { values, vectors, norm };
        let res = out.max_residual(op);
        if res > 1e-10 * norm.max(1.0) * (n as f64).sqrt() {
            return Err(Error::Tolerance(format!("eigenpair residual {res:e} too large")));
        }
        Ok(out)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Eigenvector `j` as amplitudes in the operator's basis.
    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.vectors[(i, j)]).collect()
    }

    /// `max_j ‖A v_j - λ_j v_j‖`.
    pub fn max_residual(&self, op: &SparseOperator) -> f64 {
        (0..self.dim())
            .map(|j| {
                let v = self.vector(j);
                let av = op.matvec(&v);
                av.iter()
                    .zip(&v)
                    .map(|(a, x)| (a - x * self.values[j]).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Largest entry of the decomposed operator.
    pub fn operator_norm_hint(&self) -> f64 {
        self.norm
    }

    /// `exp(-i A t) v`.
    pub fn evolve(&self, v: &[Complex64], t: f64) -> Vec<Complex64> {
        let n = self.dim();
        let mut coeff = vec![Complex64::new(0.0, 0.0); n];
        for (j, c) in coeff.iter_mut().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for (i, x) in v.iter().enumerate() {
                s += self.vectors[(i, j)].conj() * x;
            }
            *c = s * Complex64::from_polar(1.0, -self.values[j] * t);
        }
        (0..n)
            .map(|i| (0..n).map(|j| self.vectors[(i, j)] * coeff[j]).sum())
            .collect()
    }
}

/// `C(k + r - 1, r - 1)`: ways to place `k` quanta in `r` modes.
fn compositions(k: u64, modes: u64) -> u128 {
    if modes == 0 {
        return u128::from(k == 0);
    }
    let (mut num, mut acc) = (k as u128 + modes as u128 - 1, 1u128);
    let r = (modes - 1).min(k) as u128;
    for i in 1..=r {
        acc = acc * num / i;
        num -= 1;
    }
    acc
}

/// Analytic spectrum of `H_c - n ω_z` on the `n`-excitation sector of the
/// ideal boson model with `N - 1` auxiliary modes.
///
/// For every `m` in `0..=n` the pair `±Ω sqrt(m + 1)` appears once per
/// placement of the remaining `n - m` quanta in the auxiliary modes; dark
/// states with `n + 1` auxiliary quanta give the zeros.
pub fn effective_spectrum(params: &ModelParams, n: usize) -> Result<Spectrum> {
    if !params.is_resonant() {
        return Err(Error::invalid("the effective spectrum needs resonance-tuned parameters"));
    }
    let aux = params.n_sites() as u64 - 1;
    let omega = params.rabi();
    let mut total: u128 = compositions(n as u64 + 1, aux);
    for m in 0..=n {
        total += 2 * compositions((n - m) as u64, aux);
    }
    if total > ANALYTIC_CAP {
        return Err(Error::Resource {
            what: "analytic spectrum size",
            required: usize::try_from(total).unwrap_or(usize::MAX),
            cap: ANALYTIC_CAP as usize,
        });
    }
    let mut values = Vec::with_capacity(total as usize);
    values.extend(std::iter::repeat(0.0).take(compositions(n as u64 + 1, aux) as usize));
    for m in 0..=n {
        let e = omega * ((m + 1) as f64).sqrt();
        let mult = compositions((n - m) as u64, aux) as usize;
        values.extend(std::iter::repeat(e).take(mult));
        values.extend(std::iter::repeat(-e).take(mult));
    }
    Ok(Spectrum::new(values, SpectrumSource::Analytic, DEGENERACY_TOL * omega)?
        .with_offset(n as f64 * params.omega_z()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterMatch {
    pub a: Cluster,
    pub b: Cluster,
    /// `|Δcenter| / Ω`.
    pub abs_deviation: f64,
    /// `|Δcenter| / max(|center_b|, Ω)`.
    pub rel_deviation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnmatchedCluster {
    pub cluster: Cluster,
    /// `|center - nearest center on the other side| / Ω`.
    pub nearest_abs_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumComparison {
    pub omega: f64,
    pub cluster_tol: f64,
    pub matched: Vec<ClusterMatch>,
    pub unmatched_a: Vec<UnmatchedCluster>,
    pub unmatched_b: Vec<UnmatchedCluster>,
    pub max_rel_deviation: f64,
    /// Largest `|Δcenter| / Ω` over matched and unmatched clusters.
    pub max_abs_deviation: f64,
    pub dim_a: usize,
    pub dim_b: usize,
    /// Eigenvalues not accounted for by a same-size partner cluster.
    pub unmatched_dimension: usize,
}

/// Clusters both spectra at `cluster_tol`, pairs clusters greedily by
/// nearest center (each cluster used at most once) and reports deviations in
/// units of `omega`.
pub fn compare_spectra(a: &Spectrum, b: &Spectrum, omega: f64, cluster_tol: f64) -> Result<SpectrumComparison> {
    if a.dim() == 0 || b.dim() == 0 {
        return Err(Error::invalid("cannot compare empty spectra"));
    }
    if !(omega > 0.0 && cluster_tol >= 0.0) {
        return Err(Error::invalid("omega must be positive and cluster_tol non-negative"));
    }
    let ca = cluster(&a.eigenvalues, cluster_tol);
    let cb = cluster(&b.eigenvalues, cluster_tol);
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(ca.len() * cb.len());
    for (i, x) in ca.iter().enumerate() {
        for (j, y) in cb.iter().enumerate() {
            pairs.push(((x.center - y.center).abs(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
    let (mut used_a, mut used_b) = (vec![false; ca.len()], vec![false; cb.len()]);
    let mut matched = Vec::new();
    for (d, i, j) in pairs {
        if used_a[i] || used_b[j] {
            continue;
        }
        used_a[i] = true;
        used_b[j] = true;
        matched.push(ClusterMatch {
            a: ca[i],
            b: cb[j],
            abs_deviation: d / omega,
            rel_deviation: d / cb[j].center.abs().max(omega),
        });
    }
    matched.sort_by(|p, q| p.a.center.total_cmp(&q.a.center));
    let nearest = |c: &Cluster, others: &[Cluster]| {
        others.iter().map(|o| (o.center - c.center).abs()).fold(f64::INFINITY, f64::min) / omega
    };
    let unmatched_a: Vec<UnmatchedCluster> = ca
        .iter()
        .zip(&used_a)
        .filter(|(_, u)| !**u)
        .map(|(c, _)| UnmatchedCluster {
            cluster: *c,
            nearest_abs_deviation: nearest(c, &cb),
        })
        .collect();
    let unmatched_b: Vec<UnmatchedCluster> = cb
        .iter()
        .zip(&used_b)
        .filter(|(_, u)| !**u)
        .map(|(c, _)| UnmatchedCluster {
            cluster: *c,
            nearest_abs_deviation: nearest(c, &ca),
        })
        .collect();
    let max_rel_deviation = matched.iter().map(|m| m.rel_deviation).fold(0.0, f64::max);
    let max_abs_deviation = matched
        .iter()
        .map(|m| m.abs_deviation)
        .chain(unmatched_a.iter().chain(&unmatched_b).map(|u| u.nearest_abs_deviation))
        .fold(0.0, f64::max);
    let unmatched_dimension = matched.iter().map(|m| m.a.count.abs_diff(m.b.count)).sum::<usize>()
        + unmatched_a.iter().chain(&unmatched_b).map(|u| u.cluster.count).sum::<usize>();
    Ok(SpectrumComparison {
        omega,
        cluster_tol,
        matched,
        unmatched_a,
        unmatched_b,
        max_rel_deviation,
        max_abs_deviation,
        dim_a: a.dim(),
        dim_b: b.dim(),
        unmatched_dimension,
    })
}

/// Sign of the dressed pair `(|↑⟩ ± |↓⟩ B†/sqrt(m+1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

/// Ideal-model eigenstate `(|↑⟩ ± |↓⟩ B†/sqrt(m+1)) ⊗ (B†)^m ∏_k (C_k†)^{m_k} |G⟩`
/// placed on a spin basis.
///
/// `aux` lists `(k, m_k)` with `2 <= k <= N`. Each electron component is
/// normalized separately, so the hardcore deviation of the spin operators
/// from true bosons does not unbalance the superposition.
pub fn effective_eigenstate(
    params: &ModelParams,
    basis: &SubspaceBasis,
    modes: &ModeBasis,
    m: usize,
    aux: &[(usize, usize)],
    branch: Branch,
) -> Result<StateVector> {
    let spin = params.spin();
    let mut psi = NuclearState::ground(params.n_sites(), spin);
    for &(k, count) in aux {
        let h = modes
            .mode(k)
            .filter(|_| k >= 2)
            .ok_or_else(|| Error::invalid(format!("auxiliary mode index {k} outside 2..={}", modes.len())))?;
        let w = collective_weights(h, spin)?;
        for _ in 0..count {
            psi = psi.apply_weighted(&w, LadderDirection::Raise, LadderConvention::Standard);
        }
    }
    let bw = collective_weights(params.profile().g(), spin)?;
    for _ in 0..m {
        psi = psi.apply_weighted(&bw, LadderDirection::Raise, LadderConvention::Standard);
    }
    let down = psi.apply_weighted(&bw, LadderDirection::Raise, LadderConvention::Standard);
    let (nu, nd) = (psi.norm_sqr(), down.norm_sqr());
    if nu < 1e-300 || nd < 1e-300 {
        return Err(Error::Degenerate("requested excitations exceed the ensemble capacity".into()));
    }
    let sign = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
    };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = psi.scaled(Complex64::new(h / nu.sqrt(), 0.0)).embed(basis, Electron::Up)?;
    down.scaled(Complex64::new(sign * h / nd.sqrt(), 0.0))
        .embed_into(basis, Electron::Down, &mut v)?;
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationEstimate {
    /// `⟨ψ|H_p|ψ⟩`.
    pub shift: f64,
    /// `ΔE = Ω sqrt(m + 1)`.
    pub gap: f64,
    /// `|⟨ψ|H_p|ψ⟩| / ΔE`.
    pub ratio: f64,
    /// First-order estimate `n ḡ / 4` of the shift.
    pub shift_estimate: f64,
    /// `sqrt(n / N)`.
    pub scaling: f64,
}

/// First-order effect of `H_p` on a state of the single sector `V_n`,
/// relative to the level spacing of the `m` ladder.
pub fn perturbation_ratio(
    params: &ModelParams,
    basis: &SubspaceBasis,
    state: &StateVector,
    m: usize,
) -> Result<PerturbationEstimate> {
    PerturbationProbe::new(params, basis)?.estimate(state, m)
}

/// `H_p` on one sector, built once for many probe states.
#[derive(Debug, Clone)]
pub struct PerturbationProbe {
    hp: SparseOperator,
    n: i64,
    n_sites: usize,
    rabi: f64,
    mean_g: f64,
}

impl PerturbationProbe {
    pub fn new(params: &ModelParams, basis: &SubspaceBasis) -> Result<Self> {
        let (n_lo, n_hi) = basis.n_range();
        if n_lo != n_hi {
            return Err(Error::invalid("perturbation ratio needs a single-sector basis"));
        }
        Ok(PerturbationProbe {
            hp: crate::hamiltonian::build_inhomogeneity(params, basis)?,
            n: n_lo,
            n_sites: params.n_sites(),
            rabi: params.rabi(),
            mean_g: params.profile().mean(),
        })
    }

    pub fn estimate(&self, state: &StateVector, m: usize) -> Result<PerturbationEstimate> {
        let shift = self.hp.expectation(state)?.re / state.norm_sqr();
        let gap = self.rabi * ((m + 1) as f64).sqrt();
        if !(gap > 0.0) {
            return Err(Error::Degenerate("zero level spacing".into()));
        }
        let n = self.n as f64;
        Ok(PerturbationEstimate {
            shift,
            gap,
            ratio: shift.abs() / gap,
            shift_estimate: n * self.mean_g / 4.0,
            scaling: (n / self.n_sites as f64).sqrt(),
        })
    }
}

/// `(B†)^m |G⟩` normalized, as used for memory Fock states.
pub(crate) fn normalized_bmode(params: &ModelParams, m: usize) -> Result<NuclearState> {
    let psi = bmode_power(params.profile(), params.spin(), m);
    let n = psi.norm_sqr();
    if n < 1e-300 {
        return Err(Error::Degenerate(format!("(B†)^{m}|G⟩ vanishes")));
    }
    Ok(psi.scaled(Complex64::new(1.0 / n.sqrt(), 0.0)))
}
