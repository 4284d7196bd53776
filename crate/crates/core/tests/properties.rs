use std::f64::consts::TAU;

use nucmem_core::couplings::{
    gram_schmidt_modes, homogeneity_metrics, permutation_mode, CouplingProfile, HomogeneityThresholds, ProfileKind,
};
use nucmem_core::decoherence::{decoherence_factor, oracle_terms, thermal_sum_oracle, ThermalParams};
use nucmem_core::dynamics::{um_block, write_qubit, Drive, Propagator, QubitState};
use nucmem_core::fockspace::{
    commutator_defect, commutator_expectation, enumerate_direct_sum, enumerate_subspace, Electron, LadderConvention,
    Spin, StateVector, SubspaceBasis,
};
use nucmem_core::hamiltonian::{build_full, build_hs, build_parts, ModelParams};
use nucmem_core::spectra::eigensolve;
use nucmem_core::Complex64;
use proptest::prelude::*;

fn couplings(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    n.prop_flat_map(|n| prop::collection::vec(0.1f64..3.0, n))
}

fn spin() -> impl Strategy<Value = Spin> {
    (1u32..=3).prop_map(|t| Spin::from_twice(t).unwrap())
}

fn state_on(basis: &SubspaceBasis, raw: &[(f64, f64)]) -> StateVector {
    let amps = (0..basis.dim())
        .map(|i| {
            let (re, im) = raw[i % raw.len()];
            Complex64::new(re + 0.01 * i as f64, im)
        })
        .collect();
    StateVector::new(basis.space(), amps).normalized().unwrap()
}

fn amplitudes() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..16)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ratio_max_at_least_one(g in couplings(2..=40)) {
        let p = CouplingProfile::new(g.clone(), ProfileKind::Custom).unwrap();
        let r = homogeneity_metrics(&p, HomogeneityThresholds::default());
        prop_assert!(r.ratio_max >= 1.0);
        prop_assert!(r.ratio_dev >= 0.0);
        let all_equal = g.iter().all(|v| *v == g[0]);
        prop_assert_eq!(r.ratio_dev == 0.0, all_equal);
    }

    #[test]
    fn equal_couplings_are_homogeneous(n in 2usize..100, g in 0.01f64..10.0) {
        let r = homogeneity_metrics(&CouplingProfile::new(vec![g; n], ProfileKind::Custom).unwrap(), HomogeneityThresholds::default());
        prop_assert_eq!(r.ratio_max, 1.0);
        prop_assert_eq!(r.ratio_dev, 0.0);
    }

    #[test]
    fn metrics_are_scale_free(g in couplings(2..=40), c in 0.01f64..100.0) {
        let p = CouplingProfile::new(g, ProfileKind::Custom).unwrap();
        let thr = HomogeneityThresholds::default();
        let a = homogeneity_metrics(&p, thr);
        let b = homogeneity_metrics(&p.scaled(c).unwrap(), thr);
        prop_assert!((a.ratio_max - b.ratio_max).abs() <= 1e-12 * a.ratio_max);
        prop_assert!((a.ratio_dev - b.ratio_dev).abs() <= 1e-12);
    }

    #[test]
    fn gram_schmidt_is_orthonormal(g in couplings(2..=64)) {
        let p = CouplingProfile::new(g, ProfileKind::Custom).unwrap();
        let modes = gram_schmidt_modes(&p).unwrap();
        prop_assert_eq!(modes.len(), p.n_sites());
        prop_assert!(modes.orthonormality_error() < 1e-12);
    }

    #[test]
    fn permutation_mode_is_orthogonal(half in couplings(1..=32)) {
        let mut g = half.clone();
        g.extend(half.iter().rev().map(|v| v * 1.7));
        let p = CouplingProfile::new(g, ProfileKind::Custom).unwrap();
        let h = permutation_mode(&p).unwrap();
        let dot: f64 = h.iter().zip(p.g()).map(|(a, b)| a * b).sum();
        prop_assert!(dot.abs() <= 1e-12 * p.sum_sq());
    }

    #[test]
    fn homogeneous_commutator_is_boson_limit(n in 2usize..=8, s in spin(), k in 0i64..=2, raw in amplitudes(), e_up in any::<bool>()) {
        prop_assume!(k < n as i64 * s.twice() as i64 - 1);
        let basis = enumerate_subspace(n, s, k).unwrap();
        let e = if e_up { Electron::Up } else { Electron::Down };
        let range = basis.sector(k, e).unwrap().range();
        let mut v = StateVector::zeros(basis.space(), basis.dim());
        for (i, idx) in range.enumerate() {
            let (re, im) = raw[i % raw.len()];
            v.amplitudes_mut()[idx] = Complex64::new(re + 0.01 * i as f64, im);
        }
        let v = v.normalized().unwrap();
        let p = CouplingProfile::homogeneous(n, 1.3).unwrap();
        let flips = if e_up { k } else { k + 1 };
        let want = 1.0 - flips as f64 / (n as f64 * s.value());
        let c = commutator_expectation(&basis, &p, &v, LadderConvention::Standard).unwrap();
        prop_assert!((c - want).abs() < 1e-12, "{} vs {}", c, want);
    }

    #[test]
    fn commutator_defect_respects_bound(g in couplings(2..=8), s in spin(), k in 0i64..=2, raw in amplitudes()) {
        let n = g.len();
        prop_assume!(k < n as i64 * s.twice() as i64);
        let p = CouplingProfile::new(g, ProfileKind::Custom).unwrap();
        let basis = enumerate_subspace(n, s, k).unwrap();
        let v = state_on(&basis, &raw);
        let d = commutator_defect(&basis, &p, &v).unwrap();
        prop_assert!(d.value <= d.bound * (1.0 + 1e-12) + 1e-15);
        let c = commutator_expectation(&basis, &p, &v, LadderConvention::Standard).unwrap();
        prop_assert!((c - (1.0 - d.value)).abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_closure_and_hermiticity(g in couplings(2..=6), s in prop_oneof![Just(Spin::HALF), Just(Spin::from_twice(2).unwrap())], k in 0i64..=2, wz in 0.05f64..2.0) {
        let n = g.len();
        prop_assume!(k < n as i64 * s.twice() as i64);
        let params = ModelParams::resonant(CouplingProfile::new(g, ProfileKind::Custom).unwrap(), s, wz).unwrap();
        let basis = enumerate_subspace(n, s, k).unwrap();
        let parts = build_parts(&params, &basis).unwrap();
        prop_assert!(parts.closure_error < 1e-13 * parts.full.max_abs().max(1.0));
        for op in [&parts.full, &parts.exchange, &parts.exchange_collective, &parts.larmor, &parts.inhomogeneity] {
            prop_assert!(op.hermiticity_error() < 1e-14);
        }
        let d = parts.larmor.diag();
        prop_assert!(d.iter().all(|x| (x.re - d[0].re).abs() < 1e-12));
    }

    #[test]
    fn full_hamiltonian_conserves_jz(g in couplings(2..=5), wz in 0.05f64..2.0, big in 0.0f64..10.0) {
        let n = g.len();
        let p = CouplingProfile::new(g, ProfileKind::Custom).unwrap();
        let params = ModelParams::new(p, Spin::HALF, wz, big).unwrap();
        let tower = enumerate_direct_sum(n, Spin::HALF, 0, 1).unwrap();
        let h = build_full(&params, &tower).unwrap();
        let sector = |i: usize| {
            let s = tower.state(i);
            s.excitation() as i64 - i64::from(s.electron == Electron::Down)
        };
        for (r, c, _) in h.triplets() {
            prop_assert_eq!(sector(r), sector(c));
        }
    }

    #[test]
    fn v0_spectrum_is_exact(g in couplings(2..=40), s in spin()) {
        let n = g.len();
        let params = ModelParams::resonant(CouplingProfile::new(g, ProfileKind::Custom).unwrap(), s, 0.3).unwrap();
        let sp = eigensolve(&build_hs(&params, &enumerate_subspace(n, s, 0).unwrap()).unwrap()).unwrap();
        let om = params.rabi();
        let ev = sp.eigenvalues();
        let last = ev.len() - 1;
        prop_assert!((ev[0] + om).abs() <= 1e-10 * om);
        prop_assert!((ev[last] - om).abs() <= 1e-10 * om);
        prop_assert!(ev[1..last].iter().all(|v| v.abs() <= 1e-10 * om));
    }

    #[test]
    fn exchange_spectrum_symmetric_and_traced(g in couplings(2..=6), s in spin(), k in 0i64..=2) {
        let n = g.len();
        prop_assume!(k < n as i64 * s.twice() as i64);
        let params = ModelParams::resonant(CouplingProfile::new(g, ProfileKind::Custom).unwrap(), s, 0.3).unwrap();
        let hs = build_hs(&params, &enumerate_subspace(n, s, k).unwrap()).unwrap();
        let sp = eigensolve(&hs).unwrap();
        let ev = sp.eigenvalues();
        let scale = ev.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        for (a, b) in ev.iter().zip(ev.iter().rev()) {
            prop_assert!((a + b).abs() <= 1e-10 * scale);
        }
        prop_assert!((ev.iter().sum::<f64>() - hs.trace().re).abs() <= 1e-9 * scale);
    }

    #[test]
    fn exact_evolution_is_unitary(g in couplings(2..=5), raw in amplitudes(), t in 0.0f64..50.0) {
        let n = g.len();
        let params = ModelParams::resonant(CouplingProfile::new(g, ProfileKind::Custom).unwrap(), Spin::HALF, 0.4).unwrap();
        let basis = enumerate_subspace(n, Spin::HALF, 1).unwrap();
        let prop = Propagator::new(&params, &basis, Drive::Full).unwrap();
        let v = state_on(&basis, &raw);
        prop_assert!((prop.evolve(&v, t).unwrap().norm() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn um_blocks_are_periodic(m in 0usize..6, t in 0.0f64..20.0, wz in 0.0f64..2.0) {
        let params = ModelParams::resonant(CouplingProfile::homogeneous(9, 1.0).unwrap(), Spin::HALF, wz).unwrap();
        let om_m = ((m + 1) as f64).sqrt() * params.rabi();
        let period = TAU / om_m;
        let a = um_block(&params, m, t);
        let b = um_block(&params, m, t + period);
        let ph = Complex64::from_polar(1.0, -wz * m as f64 * period);
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((b[i][j] - ph * a[i][j]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn effective_protocol_decodes(theta in 0.0f64..std::f64::consts::PI, phi in 0.0f64..TAU, n in 2usize..50) {
        let params = ModelParams::resonant(CouplingProfile::homogeneous(n, 0.8).unwrap(), Spin::HALF, 0.3).unwrap();
        let q = QubitState::new(
            Complex64::new((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), phi),
        ).unwrap();
        let r = write_qubit(&params, &q).unwrap();
        prop_assert!((r.decode_fidelity - 1.0).abs() < 1e-12);
        prop_assert!((r.write_fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decoherence_factor_shape(x in 0.01f64..40.0, gt in 0.0f64..30.0, n in 2usize..200) {
        let p = ThermalParams::from_ratio(n, 1.0, x).unwrap();
        let a = decoherence_factor(&p, gt).unwrap();
        prop_assert!((0.0..=1.0).contains(&a.d));
        let b = decoherence_factor(&p, gt + TAU).unwrap();
        prop_assert!((a.big_d - b.big_d).abs() <= 1e-12 * a.big_d.max(1e-300) + 1e-300);
        let wider = decoherence_factor(&ThermalParams::from_ratio(n + 1, 1.0, x).unwrap(), gt).unwrap();
        prop_assert!(wider.big_d <= a.big_d);
    }

    #[test]
    fn oracle_matches_closed_form(x in 0.05f64..20.0, gt in 0.0f64..13.0, n in 2usize..40) {
        let p = ThermalParams::from_ratio(n, 1.0, x).unwrap();
        let pt = decoherence_factor(&p, gt).unwrap();
        let f = thermal_sum_oracle(&p, gt, oracle_terms(&p)).unwrap();
        let want = Complex64::from_polar(pt.big_d, -(p.aux_modes() as f64) * pt.theta);
        prop_assert!((f - want).norm() < 1e-10);
    }
}
