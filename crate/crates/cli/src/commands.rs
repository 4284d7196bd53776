use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use nucmem_core::couplings::{
    generate_profile, gram_schmidt_modes, homogeneity_metrics, homogeneity_of_weights, permutation_mode, ProfileKind,
    ProfileSpec,
};
use nucmem_core::decoherence::{decoherence_factor, surface_grid, DecoherenceCurve, ThermalParams};
use nucmem_core::dynamics::{exact_write, storage_error_sweep, sweep_csv, write_qubit, write_time, Drive, QubitState};
use nucmem_core::fockspace::{enumerate_subspace, LadderConvention, Spin};
use nucmem_core::hamiltonian::{build_hs, ModelParams};
use nucmem_core::io::{fmt_f64, CsvTable};
use nucmem_core::spectra::{
    compare_spectra, effective_spectrum, eigensolve_capped, DEFAULT_CLUSTER_FRACTION, DEFAULT_DENSE_CAP,
};
use nucmem_core::verify::{run_suite, VerifyConfig};
use nucmem_core::Complex64;
use serde_json::json;

use crate::config::{Experiment, QubitSpec, RunConfig};
use crate::error::CliError;
use crate::output::{commit, Artifacts, Manifest};
use crate::{ProfileChoice, SystemArgs};

pub const DEFAULT_QUBIT: QubitSpec = QubitSpec {
    theta: PI / 3.0,
    phi: PI / 4.0,
};

const DEFAULT_OMEGA_Z: f64 = 0.5;

fn default_sites(exp: Experiment) -> usize {
    match exp {
        Experiment::Storage => 25,
        Experiment::Decoherence => nucmem_core::decoherence::DEFAULT_SURFACE_SITES,
        Experiment::Verify => VerifyConfig::default().n_sites,
        _ => 80,
    }
}

fn default_kind(exp: Experiment) -> ProfileKind {
    match exp {
        Experiment::Storage => ProfileKind::Homogeneous,
        _ => ProfileKind::Gaussian,
    }
}

fn default_spec(kind: ProfileKind, n_sites: usize) -> ProfileSpec {
    match kind {
        ProfileKind::Homogeneous => ProfileSpec::Homogeneous { g: 1.0 },
        ProfileKind::Uniform => ProfileSpec::Uniform { low: 0.5, high: 1.5 },
        ProfileKind::Counterexample1 => ProfileSpec::Counterexample1 { g: 1.0 },
        ProfileKind::Counterexample2 => ProfileSpec::Counterexample2 { g: 1.0 },
        ProfileKind::Gaussian | ProfileKind::Custom => ProfileSpec::gaussian(n_sites, n_sites as f64),
    }
}

/// Merges the profile flags into the configured profile. Shape flags without
/// `--profile` edit the configured (or default) family in place.
pub fn apply_profile_flags(cfg: &mut RunConfig, a: &SystemArgs, exp: Experiment) -> Result<(), CliError> {
    let shape = [a.g, a.width, a.center, a.jitter, a.low, a.high];
    if a.profile.is_none() && shape.iter().all(Option::is_none) {
        return Ok(());
    }
    let n_sites = cfg.n_sites.unwrap_or(default_sites(exp));
    let kind = match a.profile {
        Some(ProfileChoice::Homogeneous) => ProfileKind::Homogeneous,
        Some(ProfileChoice::Gaussian) => ProfileKind::Gaussian,
        Some(ProfileChoice::Uniform) => ProfileKind::Uniform,
        Some(ProfileChoice::Counterexample1) => ProfileKind::Counterexample1,
        Some(ProfileChoice::Counterexample2) => ProfileKind::Counterexample2,
        None => cfg.profile.as_ref().map_or(default_kind(exp), ProfileSpec::kind),
    };
    let mut spec = match &cfg.profile {
        Some(p) if p.kind() == kind => p.clone(),
        _ => default_spec(kind, n_sites),
    };
    let unused = |flag: &str| CliError::config("profile", format!("--{flag} does not apply to a {} profile", kind.as_str()));
    match &mut spec {
        ProfileSpec::Homogeneous { g } | ProfileSpec::Counterexample1 { g } | ProfileSpec::Counterexample2 { g } => {
            for (v, flag) in [(a.width, "width"), (a.center, "center"), (a.jitter, "jitter"), (a.low, "low"), (a.high, "high")] {
                if v.is_some() {
                    return Err(unused(flag));
                }
            }
            if let Some(v) = a.g {
                *g = v;
            }
        }
        ProfileSpec::Gaussian {
            amplitude,
            center,
            width,
            jitter,
        } => {
            for (v, flag) in [(a.low, "low"), (a.high, "high")] {
                if v.is_some() {
                    return Err(unused(flag));
                }
            }
            if let Some(v) = a.g {
                *amplitude = v;
            }
            if let Some(v) = a.width {
                *width = v;
            }
            if let Some(v) = a.center {
                *center = v;
            }
            if let Some(v) = a.jitter {
                *jitter = v;
            }
        }
        ProfileSpec::Uniform { low, high } => {
            for (v, flag) in [(a.g, "g"), (a.width, "width"), (a.center, "center"), (a.jitter, "jitter")] {
                if v.is_some() {
                    return Err(unused(flag));
                }
            }
            if let Some(v) = a.low {
                *low = v;
            }
            if let Some(v) = a.high {
                *high = v;
            }
        }
        ProfileSpec::Custom { .. } => {
            return Err(CliError::config("profile", "a custom profile cannot be edited from the command line"))
        }
    }
    cfg.profile = Some(spec);
    Ok(())
}

fn spin_of(cfg: &RunConfig) -> Result<Spin, CliError> {
    let v = cfg.spin.unwrap_or(0.5);
    Spin::from_f64(v).map_err(|e| CliError::config("I0", e.to_string()))
}

/// Fills the model fields of `cfg` with their defaults and builds the model.
fn resolve_model(cfg: &mut RunConfig, exp: Experiment) -> Result<ModelParams, CliError> {
    let n_sites = *cfg.n_sites.get_or_insert(default_sites(exp));
    let spin = spin_of(cfg)?;
    cfg.spin = Some(spin.value());
    let seed = *cfg.seed.get_or_insert(0);
    let omega_z = *cfg.omega_z.get_or_insert(DEFAULT_OMEGA_Z);
    let spec = cfg
        .profile
        .get_or_insert_with(|| default_spec(default_kind(exp), n_sites))
        .clone();
    let profile = generate_profile(&spec, n_sites, seed)?;
    let params = match cfg.big_omega_z {
        Some(big) => ModelParams::new(profile, spin, omega_z, big)?,
        None => ModelParams::resonant(profile, spin, omega_z)?,
    };
    cfg.big_omega_z = Some(params.big_omega_z());
    Ok(params)
}

fn model_summary(params: &ModelParams) -> serde_json::Value {
    json!({
        "N": params.n_sites(),
        "I0": params.spin().value(),
        "omega_z": params.omega_z(),
        "Omega_z": params.big_omega_z(),
        "Omega": params.rabi(),
        "resonant": params.is_resonant(),
        "detuning": params.detuning(),
        "profile_kind": params.profile().kind(),
        "mean_g": params.profile().mean(),
        "mean_g_sq": params.profile().mean_sq(),
    })
}

pub fn dispatch(exp: Experiment, cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    let started = Instant::now();
    let mut cfg = cfg.clone();
    let mut art = Artifacts::new();
    let mut notes = Vec::new();
    let parameters = match exp {
        Experiment::Couplings => couplings(&mut cfg, &mut art)?,
        Experiment::Modes => modes(&mut cfg, &mut art)?,
        Experiment::Spectrum => spectrum(&mut cfg, &mut art)?,
        Experiment::Storage => storage(&mut cfg, &mut art)?,
        Experiment::Decoherence => {
            notes.push(
                "the coupling term g B†B σ_z/2 is omitted from the decoherence model; it only adds a phase \
                 exp(∓i g t B†B/2) to the off-diagonal element and leaves |ρ_↑↓| unchanged",
            );
            decoherence(&mut cfg, &mut art)?
        }
        Experiment::Verify => return verify(&mut cfg, &mut art, dir, started),
    };
    let names: Vec<String> = art.names().map(str::to_string).collect();
    commit(
        dir,
        art,
        Manifest {
            experiment: exp,
            config: &cfg,
            parameters,
            notes,
            started,
        },
    )?;
    println!("{}: wrote {} to {}", exp.as_str(), names.join(", "), dir.display());
    Ok(())
}

fn couplings(cfg: &mut RunConfig, art: &mut Artifacts) -> Result<serde_json::Value, CliError> {
    let params = resolve_model(cfg, Experiment::Couplings)?;
    let thresholds = *cfg.thresholds.get_or_insert_with(Default::default);
    let profile = params.profile();
    let report = homogeneity_metrics(profile, thresholds);
    art.text("profile.csv", profile.to_csv());
    art.json(
        "homogeneity.json",
        &json!({
            "N": profile.n_sites(),
            "kind": profile.kind(),
            "seed": profile.seed(),
            "report": report,
        }),
    )?;
    Ok(model_summary(&params))
}

fn modes(cfg: &mut RunConfig, art: &mut Artifacts) -> Result<serde_json::Value, CliError> {
    let params = resolve_model(cfg, Experiment::Modes)?;
    let thresholds = *cfg.thresholds.get_or_insert_with(Default::default);
    let profile = params.profile();
    let basis = gram_schmidt_modes(profile)?;
    let mut csv = CsvTable::new(&["k", "j", "h"]);
    for (k, v) in basis.vectors().iter().enumerate() {
        for (j, h) in v.iter().enumerate() {
            csv.push_row([(k + 1).to_string(), (j + 1).to_string(), fmt_f64(*h)]);
        }
    }
    art.text("modes.csv", csv.finish());

    let per_mode: Vec<_> = basis
        .vectors()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, v)| {
            let r = homogeneity_of_weights(v, thresholds);
            json!({ "k": k + 1, "ratio_max": r.ratio_max, "ratio_dev": r.ratio_dev, "both_ok": r.both_ok() })
        })
        .collect();
    let permutation = match permutation_mode(profile) {
        Ok(h) => {
            let dot: f64 = h.iter().zip(profile.g()).map(|(a, b)| a * b).sum();
            json!({ "h": h, "g_dot_h": dot, "report": homogeneity_of_weights(&h, thresholds) })
        }
        Err(e) => json!({ "unavailable": e.to_string() }),
    };
    art.json(
        "modes.json",
        &json!({
            "N": profile.n_sites(),
            "orthonormality_error": basis.orthonormality_error(),
            "auxiliary_modes": per_mode,
            "permutation_mode": permutation,
        }),
    )?;
    Ok(model_summary(&params))
}

fn spectrum(cfg: &mut RunConfig, art: &mut Artifacts) -> Result<serde_json::Value, CliError> {
    let params = resolve_model(cfg, Experiment::Spectrum)?;
    let n = *cfg.n.get_or_insert(1);
    if n < 0 {
        return Err(CliError::config("n", "the effective comparison needs n >= 0"));
    }
    let fraction = *cfg.cluster_fraction.get_or_insert(DEFAULT_CLUSTER_FRACTION);
    let cap = *cfg.dense_cap.get_or_insert(DEFAULT_DENSE_CAP);
    let export = *cfg.export_matrix.get_or_insert(false);
    let thresholds = *cfg.thresholds.get_or_insert_with(Default::default);

    let basis = enumerate_subspace(params.n_sites(), params.spin(), n)?;
    let hs = build_hs(&params, &basis)?;
    let exact = eigensolve_capped(&hs, cap)?;
    let effective = effective_spectrum(&params, n as usize)?;
    let omega = params.rabi();
    let cmp = compare_spectra(&exact, &effective, omega, fraction * omega)?;

    art.text("spectrum_exact.csv", exact.to_csv());
    art.text("spectrum_effective.csv", effective.to_csv());
    art.json(
        "comparison.json",
        &json!({
            "n": n,
            "N": params.n_sites(),
            "I0": params.spin().value(),
            "Omega": omega,
            "sqrt_n_over_N": (n.max(1) as f64 / params.n_sites() as f64).sqrt(),
            "homogeneity": homogeneity_metrics(params.profile(), thresholds),
            "comparison": cmp,
        }),
    )?;
    if export {
        art.text("hs_triplets.txt", hs.to_triplet_text());
        art.json("basis.json", &basis.to_json())?;
    }
    let mut summary = model_summary(&params);
    summary["basis_dim"] = json!(basis.dim());
    Ok(summary)
}

fn qubit_state(q: QubitSpec) -> Result<QubitState, CliError> {
    let (s, c) = (q.theta / 2.0).sin_cos();
    QubitState::normalized(Complex64::new(c, 0.0), Complex64::from_polar(s, q.phi))
        .map_err(|e| CliError::config("qubit", e.to_string()))
}

fn storage(cfg: &mut RunConfig, art: &mut Artifacts) -> Result<serde_json::Value, CliError> {
    let params = resolve_model(cfg, Experiment::Storage)?;
    let qubit = qubit_state(*cfg.qubit.get_or_insert(DEFAULT_QUBIT))?;
    let m_list = cfg.m_list.get_or_insert_with(|| vec![0, 1, 2]).clone();
    let t_max = *cfg.t_max.get_or_insert(1.0);
    let steps = *cfg.t_steps.get_or_insert(101);
    let exact = *cfg.exact.get_or_insert(true);
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(CliError::config("t_max", "must be a non-negative number"));
    }
    if steps == 0 {
        return Err(CliError::config("t_steps", "must be at least 1"));
    }

    let tw = write_time(&params);
    let effective = write_qubit(&params, &qubit)?;
    let (full, exchange) = if exact {
        (
            Some(exact_write(&params, &qubit, Drive::Full)?),
            Some(exact_write(&params, &qubit, Drive::Exchange)?),
        )
    } else {
        (None, None)
    };
    let grid = linspace(0.0, t_max * tw, steps);
    let rows = storage_error_sweep(&params, &qubit, &m_list, &grid)?;

    art.json(
        "storage.json",
        &json!({
            "write_time": tw,
            "qubit": qubit,
            "effective": effective,
            "exact_full": full,
            "exact_exchange": exchange,
        }),
    )?;
    art.text("sweep.csv", sweep_csv(&rows));
    let mut summary = model_summary(&params);
    summary["write_time"] = json!(tw);
    summary["t_grid"] = json!({ "start": 0.0, "end": t_max * tw, "steps": steps });
    Ok(summary)
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()
}

fn decoherence(cfg: &mut RunConfig, art: &mut Artifacts) -> Result<serde_json::Value, CliError> {
    let n_sites = *cfg.n_sites.get_or_insert(default_sites(Experiment::Decoherence));
    let g = *cfg.g.get_or_insert(1.0);
    let [nx, nt] = *cfg.grid.get_or_insert([100, 100]);
    let gt = *cfg.gt_range.get_or_insert([0.0, 4.0 * PI]);

    let (csv, axis) = if let Some(kbt) = cfg.kbt_range {
        let omega_z = *cfg.omega_z.get_or_insert(1.0);
        if !(kbt[0] >= 0.0 && kbt[1] >= kbt[0]) {
            return Err(CliError::config("kbt_range", "must be non-negative and ordered"));
        }
        if nx == 0 || nt == 0 {
            return Err(CliError::config("grid", "needs at least one step per axis"));
        }
        if !(gt[0] >= 0.0 && gt[1] >= gt[0]) {
            return Err(CliError::config("gt_range", "must be non-negative and ordered"));
        }
        let mut t = CsvTable::new(&["kbt", "gt", "d", "theta", "D"]);
        for temp in linspace(kbt[0], kbt[1], nx) {
            let p = ThermalParams::from_temperature(n_sites, g, omega_z, temp)?;
            for gtv in linspace(gt[0], gt[1], nt) {
                let pt = decoherence_factor(&p, gtv / g)?;
                t.push_reals(&[temp, gtv, pt.d, pt.theta, pt.big_d]);
            }
        }
        (t.finish(), "kbt")
    } else {
        let x = *cfg.x_range.get_or_insert([0.1, 10.0]);
        let curve: DecoherenceCurve = surface_grid(n_sites, g, (x[0], x[1]), (gt[0], gt[1]), (nx, nt))
            .map_err(|e| match e {
                nucmem_core::Error::InvalidArgument(m) => CliError::config("x_range", m),
                other => other.into(),
            })?;
        (curve.to_csv(), "x")
    };
    art.text("surface.csv", csv);
    Ok(json!({
        "N": n_sites,
        "g": g,
        "aux_modes": n_sites - 1,
        "temperature_axis": axis,
        "grid": [nx, nt],
    }))
}

fn verify(cfg: &mut RunConfig, art: &mut Artifacts, dir: &Path, started: Instant) -> Result<(), CliError> {
    let defaults = VerifyConfig::default();
    let vc = VerifyConfig {
        n_sites: *cfg.n_sites.get_or_insert(defaults.n_sites),
        spin: spin_of(cfg)?,
        seed: *cfg.seed.get_or_insert(defaults.seed),
        convention: *cfg.convention.get_or_insert(LadderConvention::Standard),
    };
    cfg.spin = Some(vc.spin.value());
    let results = run_suite(&vc)?;
    let failed = results.iter().filter(|r| !r.passed).count();
    for r in &results {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    println!("verify: {} of {} checks passed", results.len() - failed, results.len());
    art.json("verify.json", &json!({ "config": vc, "failed": failed, "checks": results }))?;
    commit(
        dir,
        std::mem::replace(art, Artifacts::new()),
        Manifest {
            experiment: Experiment::Verify,
            config: cfg,
            parameters: json!({ "N": vc.n_sites, "I0": vc.spin.value(), "seed": vc.seed }),
            notes: Vec::new(),
            started,
        },
    )?;
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} verification check(s) failed")));
    }
    Ok(())
}
