//! Thermal dephasing of the stored qubit by the `N - 1` auxiliary modes.
//!
//! In the quasi-homogeneous limit each auxiliary mode shifts the memory by
//! `g/2` per quantum, and a thermal population with `q = e^{-x}`,
//! `x = ω_z / k_B T`, gives the per-mode factor
//!
//! ```text
//! d e^{-iθ} = (1 - q) Σ_n q^n e^{-ignt},   d = (e^x - 1) / sqrt(e^{2x} - 2e^x cos gt + 1)
//! ```
//!
//! and the decoherence factor `D = d^{N-1}`. The `g B†B σ_z / 2` term is not
//! included; it only adds a deterministic phase.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::QubitState;
use crate::error::{Error, Result};

/// Temperature as `x = ω_z / k_B T`, or the zero-temperature limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Temperature {
    Ratio(f64),
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams {
    #[serde(rename = "N")]
    pub n_sites: usize,
    pub g: f64,
    pub temperature: Temperature,
}

impl ThermalParams {
    pub fn from_ratio(n_sites: usize, g: f64, x: f64) -> Result<Self> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::invalid(format!(
                "x = omega_z / k_B T must be positive and finite, got {x}"
            )));
        }
        Self::checked(n_sites, g, Temperature::Ratio(x))
    }

    /// `k_b_t = 0` selects the zero-temperature limit.
    pub fn from_temperature(n_sites: usize, g: f64, omega_z: f64, k_b_t: f64) -> Result<Self> {
        if k_b_t < 0.0 || !k_b_t.is_finite() {
            return Err(Error::invalid("negative temperature is not supported"));
        }
        if k_b_t == 0.0 {
            return Self::checked(n_sites, g, Temperature::Zero);
        }
        Self::from_ratio(n_sites, g, omega_z / k_b_t)
    }

    pub fn zero_temperature(n_sites: usize, g: f64) -> Result<Self> {
        Self::checked(n_sites, g, Temperature::Zero)
    }

    fn checked(n_sites: usize, g: f64, temperature: Temperature) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::invalid("need N >= 2"));
        }
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::invalid("coupling g must be positive"));
        }
        Ok(ThermalParams {
            n_sites,
            g,
            temperature,
        })
    }

    pub fn aux_modes(&self) -> i32 {
        i32::try_from(self.n_sites - 1).expect("mode count fits in i32")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoherencePoint {
    pub d: f64,
    #[serde(rename = "D")]
    pub big_d: f64,
    pub theta: f64,
}

/// `d`, `D = d^{N-1}` and `θ = arctan(sin gt / (e^x - cos gt))`.
///
/// The denominator `e^x - cos gt` is positive for `x > 0`, so the arctangent
/// stays on one branch and `(N - 1)θ` is continuous in `t`.
pub fn decoherence_factor(p: &ThermalParams, t: f64) -> Result<DecoherencePoint> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("time must be non-negative"));
    }
    let x = match p.temperature {
        Temperature::Zero => {
            return Ok(DecoherencePoint {
                d: 1.0,
                big_d: limit_zero_temperature(p, t),
                theta: 0.0,
            })
        }
        Temperature::Ratio(x) if x > 0.0 => x,
        Temperature::Ratio(x) => return Err(Error::invalid(format!("x = {x} must be positive"))),
    };
    let (s, cth) = (p.g * t).sin_cos();
    // Divide through by e^x so large x does not overflow.
    let q = (-x).exp();
    let num = -(-x).exp_m1();
    let den = (1.0 - 2.0 * q * cth + q * q).sqrt();
    let d = (num / den).min(1.0);
    let theta = (q * s).atan2(1.0 - q * cth);
    Ok(DecoherencePoint {
        d,
        big_d: d.powi(p.aux_modes()),
        theta,
    })
}

/// `D → 1` as `T → 0`: the off-diagonal element keeps its initial value.
pub fn limit_zero_temperature(p: &ThermalParams, t: f64) -> f64 {
    debug_assert!({
        let cold = ThermalParams {
            temperature: Temperature::Ratio(50.0),
            ..*p
        };
        decoherence_factor(&cold, t).map_or(true, |pt| pt.big_d > 1.0 - 1e-12)
    });
    1.0
}

/// `ρ_S(t)_01 = α* β D e^{i(N-1)θ}`.
pub fn offdiagonal_element(p: &ThermalParams, qubit: &QubitState, t: f64) -> Result<Complex64> {
    let pt = decoherence_factor(p, t)?;
    let phase = Complex64::from_polar(1.0, p.aux_modes() as f64 * pt.theta);
    Ok(qubit.alpha.conj() * qubit.beta * pt.big_d * phase)
}

/// `f^{N-1}` with `f = (1 - q) Σ_{n <= n_max} q^n e^{-ignt}` summed term by
/// term. Equals `D e^{-i(N-1)θ}`.
pub fn thermal_sum_oracle(p: &ThermalParams, t: f64, n_max: usize) -> Result<Complex64> {
    let q = match p.temperature {
        Temperature::Zero => 0.0,
        Temperature::Ratio(x) => (-x).exp(),
    };
    let tail = q.powf(n_max as f64 + 1.0);
    if tail >= 1e-14 {
        return Err(Error::Tolerance(format!(
            "thermal tail q^(n_max+1) = {tail:e} exceeds 1e-14; raise n_max"
        )));
    }
    let step = Complex64::from_polar(q, -p.g * t);
    let mut term = Complex64::new(1.0, 0.0);
    let mut f = Complex64::new(0.0, 0.0);
    for _ in 0..=n_max {
        f += term;
        term *= step;
    }
    Ok((f * (1.0 - q)).powi(p.aux_modes()))
}

/// Smallest `n_max` whose tail satisfies [`thermal_sum_oracle`].
pub fn oracle_terms(p: &ThermalParams) -> usize {
    match p.temperature {
        Temperature::Zero => 0,
        Temperature::Ratio(x) => (14.0 * std::f64::consts::LN_10 / x).ceil() as usize + 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub x: f64,
    pub gt: f64,
    pub d: f64,
    pub theta: f64,
    #[serde(rename = "D")]
    pub big_d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceCurve {
    #[serde(rename = "N")]
    pub n_sites: usize,
    pub g: f64,
    pub points: Vec<SurfacePoint>,
}

impl DecoherenceCurve {
    /// CSV with columns `x,gt,d,theta,D`.
    pub fn to_csv(&self) -> String {
        let mut t = crate::io::CsvTable::new(&["x", "gt", "d", "theta", "D"]);
        for p in &self.points {
            t.push_reals(&[p.x, p.gt, p.d, p.theta, p.big_d]);
        }
        t.finish()
    }
}

/// Ensemble size of the default surface.
pub const DEFAULT_SURFACE_SITES: usize = 20;

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()
}

/// `D(x, gt)` on a `steps.0 × steps.1` grid over `x_range × gt_range`.
pub fn surface_grid(
    n_sites: usize,
    g: f64,
    x_range: (f64, f64),
    gt_range: (f64, f64),
    steps: (usize, usize),
) -> Result<DecoherenceCurve> {
    if !(x_range.0 > 0.0 && x_range.1 >= x_range.0 && gt_range.0 >= 0.0 && gt_range.1 >= gt_range.0) {
        return Err(Error::invalid("surface ranges must be positive and ordered"));
    }
    if steps.0 == 0 || steps.1 == 0 {
        return Err(Error::invalid("surface needs at least one step per axis"));
    }
    let mut points = Vec::with_capacity(steps.0 * steps.1);
    for x in linspace(x_range.0, x_range.1, steps.0) {
        let p = ThermalParams::from_ratio(n_sites, g, x)?;
        for gt in linspace(gt_range.0, gt_range.1, steps.1) {
            let pt = decoherence_factor(&p, gt / g)?;
            points.push(SurfacePoint {
                x,
                gt,
                d: pt.d,
                theta: pt.theta,
                big_d: pt.big_d,
            });
        }
    }
    Ok(DecoherenceCurve { n_sites, g, points })
}
