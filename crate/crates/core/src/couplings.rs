//! Hyperfine coupling profiles `{g_j}` and the mode vectors built from them.
//!
//! A profile is the list of electron-nucleus contact couplings, one per
//! nuclear site, in units of a reference coupling `g₀ = 1`. Two scale-free
//! statistics decide whether the collective operator `B` is close to a
//! boson: the peak ratio `max(g²)/mean(g²)` and the relative mean absolute
//! deviation `mean|g² - mean(g²)| / mean(g²)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bound on resampling attempts for a single non-positive random coupling.
const MAX_RESAMPLE: usize = 64;

/// Candidates whose residual norm falls below this after projection are
/// treated as linearly dependent during Gram-Schmidt completion.
const DEPENDENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Homogeneous,
    Gaussian,
    Uniform,
    Custom,
    #[serde(rename = "preset_counterexample_1")]
    Counterexample1,
    #[serde(rename = "preset_counterexample_2")]
    Counterexample2,
}

impl ProfileKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProfileKind::Homogeneous => "homogeneous",
            ProfileKind::Gaussian => "gaussian",
            ProfileKind::Uniform => "uniform",
            ProfileKind::Custom => "custom",
            ProfileKind::Counterexample1 => "preset_counterexample_1",
            ProfileKind::Counterexample2 => "preset_counterexample_2",
        }
    }
}

/// Recipe for a coupling profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    Homogeneous {
        g: f64,
    },
    /// `g_j = amplitude * exp(-(j - center)² / (2 width²))` over the 0-based
    /// site index, optionally multiplied by `1 + jitter * u` with `u` uniform
    /// in `[-1, 1)` drawn from the seed.
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
        #[serde(default)]
        jitter: f64,
    },
    /// Independent draws from `[low, high)`.
    Uniform {
        low: f64,
        high: f64,
    },
    Custom {
        values: Vec<f64>,
    },
    /// `(g, …, g, 10 g)`: violates the peak condition, passes the deviation one.
    #[serde(rename = "preset_counterexample_1")]
    Counterexample1 {
        g: f64,
    },
    /// First half `g`, second half `3 g`: passes the peak condition only.
    #[serde(rename = "preset_counterexample_2")]
    Counterexample2 {
        g: f64,
    },
}

impl ProfileSpec {
    pub fn kind(&self) -> ProfileKind {
        match self {
            ProfileSpec::Homogeneous { .. } => ProfileKind::Homogeneous,
            ProfileSpec::Gaussian { .. } => ProfileKind::Gaussian,
            ProfileSpec::Uniform { .. } => ProfileKind::Uniform,
            ProfileSpec::Custom { .. } => ProfileKind::Custom,
            ProfileSpec::Counterexample1 { .. } => ProfileKind::Counterexample1,
            ProfileSpec::Counterexample2 { .. } => ProfileKind::Counterexample2,
        }
    }

    /// Gaussian envelope centred on the ensemble with the given width.
    pub fn gaussian(n_sites: usize, width: f64) -> Self {
        ProfileSpec::Gaussian {
            amplitude: 1.0,
            center: (n_sites as f64 - 1.0) / 2.0,
            width,
            jitter: 0.0,
        }
    }

    fn uses_rng(&self) -> bool {
        match self {
            ProfileSpec::Uniform { .. } => true,
            ProfileSpec::Gaussian { jitter, .. } => *jitter > 0.0,
            _ => false,
        }
    }
}

/// The couplings `{g_j}` with cached first and second moments.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingProfile {
    g: Vec<f64>,
    kind: ProfileKind,
    seed: Option<u64>,
    mean: f64,
    mean_sq: f64,
}

#[derive(Serialize, Deserialize)]
struct ProfileWire {
    #[serde(rename = "N")]
    n: usize,
    g: Vec<f64>,
    kind: ProfileKind,
    seed: Option<u64>,
}

impl Serialize for CouplingProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ProfileWire {
            n: self.g.len(),
            g: self.g.clone(),
            kind: self.kind,
            seed: self.seed,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CouplingProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = ProfileWire::deserialize(d)?;
        if wire.n != wire.g.len() {
            return Err(serde::de::Error::custom(format!(
                "N = {} but {} couplings given",
                wire.n,
                wire.g.len()
            )));
        }
        let mut p = CouplingProfile::new(wire.g, wire.kind).map_err(serde::de::Error::custom)?;
        p.seed = wire.seed;
        Ok(p)
    }
}

impl CouplingProfile {
    /// Wraps explicit couplings. Requires `N >= 2` and every `g_j > 0`.
    pub fn new(g: Vec<f64>, kind: ProfileKind) -> Result<Self> {
        if g.len() < 2 {
            return Err(Error::invalid(format!(
                "a profile needs at least 2 sites, got {}",
                g.len()
            )));
        }
        if let Some((j, v)) = g.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::invalid(format!("coupling g[{j}] = {v} is not positive")));
        }
        let n = g.len() as f64;
        let mean = g.iter().sum::<f64>() / n;
        let mean_sq = g.iter().map(|v| v * v).sum::<f64>() / n;
        Ok(CouplingProfile {
            g,
            kind,
            seed: None,
            mean,
            mean_sq,
        })
    }

    pub fn homogeneous(n_sites: usize, g: f64) -> Result<Self> {
        generate_profile(&ProfileSpec::Homogeneous { g }, n_sites, 0)
    }

    pub fn n_sites(&self) -> usize {
        self.g.len()
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// `ḡ = Σ g_j / N`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `mean(g²) = Σ g_j² / N`.
    pub fn mean_sq(&self) -> f64 {
        self.mean_sq
    }

    pub fn sum_sq(&self) -> f64 {
        self.mean_sq * self.g.len() as f64
    }

    pub fn max_sq(&self) -> f64 {
        self.g.iter().fold(0.0_f64, |m, v| m.max(v * v))
    }

    /// Multiplies every coupling by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let mut p = CouplingProfile::new(self.g.iter().map(|v| v * c).collect(), self.kind)?;
        p.seed = self.seed;
        Ok(p)
    }

    /// Recomputes the moments from scratch.
    pub fn recompute_moments(&self) -> (f64, f64) {
        let n = self.g.len() as f64;
        (
            self.g.iter().sum::<f64>() / n,
            self.g.iter().map(|v| v * v).sum::<f64>() / n,
        )
    }

    /// CSV with columns `j,g_j` (1-based site index).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,g_j\n");
        for (j, v) in self.g.iter().enumerate() {
            out.push_str(&format!("{},{}\n", j + 1, crate::io::fmt_f64(*v)));
        }
        out
    }
}

pub fn generate_profile(spec: &ProfileSpec, n_sites: usize, seed: u64) -> Result<CouplingProfile> {
    if n_sites < 2 {
        return Err(Error::invalid(format!("N must be at least 2, got {n_sites}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: Vec<f64> = match spec {
        ProfileSpec::Homogeneous { g } => {
            check_positive("g", *g)?;
            vec![*g; n_sites]
        }
        ProfileSpec::Gaussian {
            amplitude,
            center,
            width,
            jitter,
        } => {
            check_positive("amplitude", *amplitude)?;
            check_positive("width", *width)?;
            if !center.is_finite() {
                return Err(Error::invalid("gaussian center must be finite"));
            }
            if !(0.0..1.0).contains(jitter) {
                return Err(Error::invalid(format!("jitter must lie in [0, 1), got {jitter}")));
            }
            let mut out = Vec::with_capacity(n_sites);
            for j in 0..n_sites {
                let x = j as f64 - center;
                let envelope = amplitude * (-x * x / (2.0 * width * width)).exp();
                let value = if *jitter > 0.0 {
                    draw_positive(&mut rng, j, |r| envelope * (1.0 + jitter * r.random_range(-1.0..1.0)))?
                } else {
                    envelope
                };
                out.push(value);
            }
            out
        }
        ProfileSpec::Uniform { low, high } => {
            if !(low.is_finite() && high.is_finite() && *low >= 0.0 && high > low) {
                return Err(Error::invalid(format!(
                    "uniform range needs 0 <= low < high, got [{low}, {high})"
                )));
            }
            let mut out = Vec::with_capacity(n_sites);
            for j in 0..n_sites {
                out.push(draw_positive(&mut rng, j, |r| r.random_range(*low..*high))?);
            }
            out
        }
        ProfileSpec::Custom { values } => {
            if values.len() != n_sites {
                return Err(Error::invalid(format!(
                    "custom profile has {} values but N = {n_sites}",
                    values.len()
                )));
            }
            values.clone()
        }
        ProfileSpec::Counterexample1 { g } => {
            check_positive("g", *g)?;
            let mut out = vec![*g; n_sites];
            out[n_sites - 1] = 10.0 * g;
            out
        }
        ProfileSpec::Counterexample2 { g } => {
            check_positive("g", *g)?;
            if n_sites % 2 != 0 {
                return Err(Error::invalid(format!(
                    "the half-and-half preset needs even N, got {n_sites}"
                )));
            }
            (0..n_sites)
                .map(|j| if j < n_sites / 2 { *g } else { 3.0 * g })
                .collect()
        }
    };
    let mut profile = CouplingProfile::new(g, spec.kind())?;
    profile.seed = spec.uses_rng().then_some(seed);
    Ok(profile)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive, got {v}")))
    }
}

fn draw_positive(
    rng: &mut ChaCha8Rng,
    site: usize,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> f64,
) -> Result<f64> {
    for _ in 0..MAX_RESAMPLE {
        let v = draw(rng);
        if v > 0.0 {
            return Ok(v);
        }
    }
    Err(Error::invalid(format!(
        "site {site}: no positive coupling after {MAX_RESAMPLE} draws"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityThresholds {
    /// Peak condition passes when `max(g²)/mean(g²) <= max_ratio`.
    pub max_ratio: f64,
    /// Deviation condition passes when `mean|g² - mean(g²)|/mean(g²) <= deviation_ratio`.
    pub deviation_ratio: f64,
}

impl Default for HomogeneityThresholds {
    fn default() -> Self {
        HomogeneityThresholds {
            max_ratio: 2.0,
            deviation_ratio: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    pub mean_sq: f64,
    pub max_sq: f64,
    /// `mean|g_j² - mean(g²)|`.
    pub abs_dev: f64,
    pub ratio_max: f64,
    pub ratio_dev: f64,
    pub max_condition_ok: bool,
    pub deviation_condition_ok: bool,
    pub thresholds: HomogeneityThresholds,
}

impl HomogeneityReport {
    pub fn both_ok(&self) -> bool {
        self.max_condition_ok && self.deviation_condition_ok
    }
}

pub fn homogeneity_metrics(p: &CouplingProfile, thresholds: HomogeneityThresholds) -> HomogeneityReport {
    homogeneity_of_weights(p.g(), thresholds)
}

/// Same statistics for an arbitrary weight vector (signs are irrelevant since
/// only `w_j²` enters). Used for the auxiliary mode vectors.
pub fn homogeneity_of_weights(w: &[f64], thresholds: HomogeneityThresholds) -> HomogeneityReport {
    let n = w.len() as f64;
    let sq: Vec<f64> = w.iter().map(|v| v * v).collect();
    let max_sq = sq.iter().cloned().fold(0.0, f64::max);
    let min_sq = sq.iter().cloned().fold(f64::INFINITY, f64::min);
    // Equal entries must give exactly zero spread, which summation does not.
    let (mean_sq, abs_dev) = if min_sq == max_sq {
        (max_sq, 0.0)
    } else {
        let mean_sq = sq.iter().sum::<f64>() / n;
        (mean_sq, sq.iter().map(|s| (s - mean_sq).abs()).sum::<f64>() / n)
    };
    // max >= mean holds exactly, but the mean carries round-off.
    let ratio_max = (max_sq / mean_sq).max(1.0);
    let ratio_dev = abs_dev / mean_sq;
    HomogeneityReport {
        mean_sq,
        max_sq,
        abs_dev,
        ratio_max,
        ratio_dev,
        max_condition_ok: ratio_max <= thresholds.max_ratio,
        deviation_condition_ok: ratio_dev <= thresholds.deviation_ratio,
        thresholds,
    }
}

/// `N` orthonormal vectors; row 0 is `g/‖g‖` (the `B` mode), rows `1..N`
/// define the auxiliary modes `C_2 … C_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeBasis {
    vectors: Vec<Vec<f64>>,
}

impl ModeBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Mode vector `h^[k]` with the 1-based `k` used for `C_k` (`k = 1` is `B`).
    pub fn mode(&self, k: usize) -> Option<&[f64]> {
        k.checked_sub(1).and_then(|i| self.vectors.get(i)).map(Vec::as_slice)
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(a, b) - target).abs());
            }
        }
        worst
    }
}

/// Orthonormal completion of `g/‖g‖` by Gram-Schmidt over the canonical unit
/// vectors `e_1, e_2, …`, skipping candidates that are numerically dependent.
///
/// Each candidate is projected twice (classical Gram-Schmidt with one
/// reorthogonalization pass), which keeps the Gram matrix at round-off level.
pub fn gram_schmidt_modes(p: &CouplingProfile) -> Result<ModeBasis> {
    let n = p.n_sites();
    let norm = dot(p.g(), p.g()).sqrt();
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    vectors.push(p.g().iter().map(|v| v / norm).collect());

    for axis in 0..n {
        if vectors.len() == n {
            break;
        }
        let mut cand = vec![0.0; n];
        cand[axis] = 1.0;
        for _ in 0..2 {
            for q in &vectors {
                let c = dot(q, &cand);
                cand.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
            }
        }
        let r = dot(&cand, &cand).sqrt();
        if r < DEPENDENCE_TOL {
            continue;
        }
        cand.iter_mut().for_each(|x| *x /= r);
        vectors.push(cand);
    }
    if vectors.len() != n {
        return Err(Error::Internal(format!(
            "Gram-Schmidt completion produced {} of {n} vectors",
            vectors.len()
        )));
    }
    Ok(ModeBasis { vectors })
}

/// Mirrored, sign-flipped copy of the couplings:
/// `h_i = g_{N+1-i}` and `h_{N+1-i} = -g_i` for `i <= N/2` (1-based), so
/// that `Σ g_i h_i = 0` term by term.
pub fn permutation_mode(p: &CouplingProfile) -> Result<Vec<f64>> {
    let n = p.n_sites();
    if n % 2 != 0 {
        return Err(Error::Unsupported(format!(
            "the mirrored-pair mode needs even N, got {n}; use gram_schmidt_modes"
        )));
    }
    let g = p.g();
    let mut h = vec![0.0; n];
    for i in 0..n / 2 {
        let partner = n - 1 - i;
        h[i] = g[partner];
        h[partner] = -g[i];
    }
    Ok(h)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(n: usize, width: f64) -> CouplingProfile {
        generate_profile(&ProfileSpec::gaussian(n, width), n, 42).unwrap()
    }

    #[test]
    fn homogeneous_profile() {
        let p = CouplingProfile::homogeneous(4, 1.0).unwrap();
        assert_eq!(p.g(), &[1.0, 1.0, 1.0, 1.0]);
        let r = homogeneity_metrics(&p, HomogeneityThresholds::default());
        assert_eq!(r.ratio_max, 1.0);
        assert_eq!(r.ratio_dev, 0.0);
        assert!(r.both_ok());
    }

    #[test]
    fn counterexample_one() {
        let p = generate_profile(&ProfileSpec::Counterexample1 { g: 1.0 }, 10_000, 0).unwrap();
        assert!((p.mean_sq() - 1.0099).abs() < 1e-12);
        assert_eq!(p.max_sq(), 100.0);
        let r = homogeneity_metrics(&p, HomogeneityThresholds::default());
        // Closed forms for (1, …, 1, 10) with N sites.
        let n = 10_000.0;
        let mean = (n - 1.0 + 100.0) / n;
        let abs_dev = ((n - 1.0) * (mean - 1.0) + (100.0 - mean)) / n;
        assert!((r.ratio_max - 100.0 / mean).abs() < 1e-12);
        assert!((r.abs_dev - abs_dev).abs() < 1e-12);
        assert!((r.ratio_dev - abs_dev / mean).abs() < 1e-12);
        assert!(!r.max_condition_ok);
        assert!(r.deviation_condition_ok);
    }

    #[test]
    fn counterexample_two() {
        let p = generate_profile(&ProfileSpec::Counterexample2 { g: 1.0 }, 100, 0).unwrap();
        let r = homogeneity_metrics(&p, HomogeneityThresholds::default());
        assert_eq!(r.mean_sq, 5.0);
        assert_eq!(r.max_sq, 9.0);
        assert_eq!(r.abs_dev, 4.0);
        assert!((r.ratio_max - 1.8).abs() < 1e-15);
        assert!((r.ratio_dev - 0.8).abs() < 1e-15);
        assert!(r.max_condition_ok);
        assert!(!r.deviation_condition_ok);
        assert!(generate_profile(&ProfileSpec::Counterexample2 { g: 1.0 }, 7, 0).is_err());
    }

    #[test]
    fn gaussian_width_controls_homogeneity() {
        // Width N/4 is far too narrow for either condition.
        let narrow = homogeneity_metrics(&gaussian(80, 20.0), HomogeneityThresholds::default());
        assert!(narrow.ratio_max > 2.0, "{narrow:?}");
        assert!(narrow.ratio_dev > 0.5, "{narrow:?}");
        assert!(!narrow.max_condition_ok && !narrow.deviation_condition_ok);

        let wide = homogeneity_metrics(&gaussian(80, 80.0), HomogeneityThresholds::default());
        assert!(wide.both_ok(), "{wide:?}");
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let spec = ProfileSpec::Uniform { low: 0.5, high: 1.5 };
        let a = generate_profile(&spec, 50, 7).unwrap();
        let b = generate_profile(&spec, 50, 7).unwrap();
        let c = generate_profile(&spec, 50, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.seed(), Some(7));
        assert!(a.g().iter().all(|&v| (0.5..1.5).contains(&v)));
    }

    #[test]
    fn invalid_arguments() {
        assert!(CouplingProfile::homogeneous(1, 1.0).is_err());
        assert!(CouplingProfile::homogeneous(3, 0.0).is_err());
        assert!(generate_profile(
            &ProfileSpec::Gaussian {
                amplitude: 1.0,
                center: 0.0,
                width: -1.0,
                jitter: 0.0
            },
            4,
            0
        )
        .is_err());
        assert!(CouplingProfile::new(vec![1.0, -2.0], ProfileKind::Custom).is_err());
        assert!(generate_profile(&ProfileSpec::Custom { values: vec![1.0] }, 2, 0).is_err());
    }

    #[test]
    fn two_site_modes() {
        let p = CouplingProfile::homogeneous(2, 1.0).unwrap();
        let m = gram_schmidt_modes(&p).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h1 = m.mode(1).unwrap();
        let h2 = m.mode(2).unwrap();
        assert!((h1[0] - s).abs() < 1e-15 && (h1[1] - s).abs() < 1e-15);
        assert!((h2[0] - s).abs() < 1e-15 && (h2[1] + s).abs() < 1e-15);
    }

    #[test]
    fn auxiliary_modes_orthogonal_to_couplings() {
        let p = gaussian(6, 2.0);
        let m = gram_schmidt_modes(&p).unwrap();
        let gnorm = dot(p.g(), p.g()).sqrt();
        for k in 2..=6 {
            assert!(dot(m.mode(k).unwrap(), p.g()).abs() < 1e-12 * gnorm);
        }
        assert!(m.orthonormality_error() < 1e-12);
        assert!(m.mode(0).is_none() && m.mode(7).is_none());
    }

    #[test]
    fn mirrored_mode() {
        let p = CouplingProfile::new(vec![1.0, 2.0, 3.0, 4.0], ProfileKind::Custom).unwrap();
        let h = permutation_mode(&p).unwrap();
        assert_eq!(h, vec![4.0, 3.0, -2.0, -1.0]);
        assert_eq!(dot(&h, p.g()), 0.0);

        let hom = CouplingProfile::homogeneous(4, 1.0).unwrap();
        assert_eq!(permutation_mode(&hom).unwrap(), vec![1.0, 1.0, -1.0, -1.0]);

        let odd = CouplingProfile::homogeneous(5, 1.0).unwrap();
        assert!(matches!(permutation_mode(&odd), Err(Error::Unsupported(_))));
    }

    #[test]
    fn mirrored_mode_of_wide_gaussian() {
        let p = gaussian(80, 80.0);
        let h = permutation_mode(&p).unwrap();
        let gnorm = dot(p.g(), p.g()).sqrt();
        assert!(dot(&h, p.g()).abs() < 1e-12 * gnorm * gnorm);
        assert!(homogeneity_of_weights(&h, HomogeneityThresholds::default()).both_ok());
    }

    #[test]
    fn json_and_csv() {
        let p = generate_profile(&ProfileSpec::Uniform { low: 1.0, high: 2.0 }, 3, 11).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"N\":3") && s.contains("\"kind\":\"uniform\"") && s.contains("\"seed\":11"));
        let back: CouplingProfile = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<CouplingProfile>(r#"{"N":3,"g":[1,2],"kind":"custom","seed":null}"#).is_err());
        let csv = p.to_csv();
        assert!(csv.starts_with("j,g_j\n1,"));
        assert_eq!(csv.lines().count(), 4);
    }
}
