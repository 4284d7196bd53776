//! Browser bindings for three interactive views: the thermal decoherence
//! surface, the write protocol with an occupied memory, and the exact versus
//! effective spectrum on `V_1`.
//!
//! The plain functions return `nucmem_core::Result` so they can be tested
//! natively; the `#[wasm_bindgen]` wrappers turn errors into JS exceptions.

use nucmem_core::couplings::{generate_profile, homogeneity_metrics, HomogeneityThresholds, ProfileSpec};
use nucmem_core::decoherence::surface_grid;
use nucmem_core::dynamics::{exact_write, storage_error_sweep, write_qubit, write_time, Drive, QubitState};
use nucmem_core::fockspace::{enumerate_subspace, Spin};
use nucmem_core::hamiltonian::{build_hs, ModelParams};
use nucmem_core::spectra::{compare_spectra, effective_spectrum, eigensolve_capped};
use nucmem_core::{Complex64, Error, Result};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest ensemble for the in-browser spectrum; `V_1` has `N(N+1)/2` states.
pub const MAX_SPECTRUM_SITES: usize = 48;

/// Largest ensemble for the exact write, which diagonalizes `2N + 1` states.
pub const MAX_EXACT_WRITE_SITES: usize = 400;

/// `D(x, gt)` on an `nx × nt` grid over `[x_lo, x_hi] × [0, gt_max]`,
/// row-major in `x`.
pub fn surface(n_sites: usize, g: f64, x_lo: f64, x_hi: f64, gt_max: f64, nx: usize, nt: usize) -> Result<Vec<f64>> {
    let curve = surface_grid(n_sites, g, (x_lo, x_hi), (0.0, gt_max), (nx, nt))?;
    Ok(curve.points.iter().map(|p| p.big_d).collect())
}

/// Write protocol for `cos(θ/2)|↑⟩ + e^{iφ} sin(θ/2)|↓⟩` on a homogeneous
/// ensemble, plus the sweep over memory occupations `0..=m_max` on
/// `[0, 2 t_w]`. Returns JSON.
pub fn storage(n_sites: usize, theta: f64, phi: f64, m_max: usize, steps: usize) -> Result<String> {
    if steps < 2 {
        return Err(Error::InvalidArgument("need at least two time steps".into()));
    }
    let profile = generate_profile(&ProfileSpec::Homogeneous { g: 1.0 }, n_sites, 0)?;
    let params = ModelParams::resonant(profile, Spin::HALF, 0.5)?;
    let (s, c) = (theta / 2.0).sin_cos();
    let qubit = QubitState::normalized(Complex64::new(c, 0.0), Complex64::from_polar(s, phi))?;
    let tw = write_time(&params);
    let effective = write_qubit(&params, &qubit)?;
    let exact = if n_sites <= MAX_EXACT_WRITE_SITES {
        Some(exact_write(&params, &qubit, Drive::Full)?)
    } else {
        None
    };
    let grid: Vec<f64> = (0..steps).map(|i| 2.0 * tw * i as f64 / (steps - 1) as f64).collect();
    let m_list: Vec<usize> = (0..=m_max).collect();
    let rows = storage_error_sweep(&params, &qubit, &m_list, &grid)?;
    let curves: Vec<_> = m_list
        .iter()
        .map(|&m| {
            let mine: Vec<_> = rows.iter().filter(|r| r.m == m).collect();
            json!({
                "m": m,
                "deviation": mine.iter().map(|r| r.deviation).collect::<Vec<_>>(),
                "leakage": mine.iter().map(|r| r.leakage).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(json!({
        "write_time": tw,
        "omega": params.rabi(),
        "t": grid,
        "decode_fidelity": effective.decode_fidelity,
        "down_probability": effective.down_probability,
        "exact_state_error": exact.map(|e| e.state_error),
        "exact_down_probability": exact.map(|e| e.down_probability),
        "curves": curves,
    })
    .to_string())
}

/// Exact `H_s` eigenvalues on `V_1` next to the effective ladder, for a
/// gaussian profile of the given width (`width <= 0` selects homogeneous).
/// Returns JSON.
pub fn spectrum(n_sites: usize, width: f64) -> Result<String> {
    if n_sites > MAX_SPECTRUM_SITES {
        return Err(Error::Resource {
            what: "sites for the in-browser spectrum",
            required: n_sites,
            cap: MAX_SPECTRUM_SITES,
        });
    }
    let spec = if width > 0.0 {
        ProfileSpec::gaussian(n_sites, width)
    } else {
        ProfileSpec::Homogeneous { g: 1.0 }
    };
    let profile = generate_profile(&spec, n_sites, 0)?;
    let report = homogeneity_metrics(&profile, HomogeneityThresholds::default());
    let params = ModelParams::resonant(profile, Spin::HALF, 0.5)?;
    let basis = enumerate_subspace(n_sites, Spin::HALF, 1)?;
    let exact = eigensolve_capped(&build_hs(&params, &basis)?, basis.dim())?;
    let effective = effective_spectrum(&params, 1)?;
    let omega = params.rabi();
    let cmp = compare_spectra(&exact, &effective, omega, 0.05 * omega)?;
    Ok(json!({
        "omega": omega,
        "exact": exact.eigenvalues(),
        "effective": effective.eigenvalues(),
        "max_abs_deviation": cmp.max_abs_deviation,
        "bound": (1.0 / n_sites as f64).sqrt(),
        "ratio_max": report.ratio_max,
        "ratio_dev": report.ratio_dev,
    })
    .to_string())
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = decoherenceSurface)]
pub fn decoherence_surface_js(
    n_sites: usize,
    g: f64,
    x_lo: f64,
    x_hi: f64,
    gt_max: f64,
    nx: usize,
    nt: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    surface(n_sites, g, x_lo, x_hi, gt_max, nx, nt).map_err(js)
}

#[wasm_bindgen(js_name = storageRun)]
pub fn storage_js(n_sites: usize, theta: f64, phi: f64, m_max: usize, steps: usize) -> std::result::Result<String, JsError> {
    storage(n_sites, theta, phi, m_max, steps).map_err(js)
}

#[wasm_bindgen(js_name = spectrumCompare)]
pub fn spectrum_js(n_sites: usize, width: f64) -> std::result::Result<String, JsError> {
    spectrum(n_sites, width).map_err(js)
}
