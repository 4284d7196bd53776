use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BasisState, Electron, SparseOperator, Spin, SubspaceBasis};
use crate::error::{Error, Result};

/// Normalization of the nuclear ladder operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderConvention {
    /// `I_± = I_x ± iI_y`, matrix elements `sqrt(I₀(I₀+1) - m(m±1))`.
    #[default]
    Standard,
    /// `I_± = (I_x ± iI_y)/2`: every element halved. Kept only so the
    /// invariant suite can show that the commutator identity detects it.
    HalfFactor,
}

impl LadderConvention {
    fn factor(self) -> f64 {
        match self {
            LadderConvention::Standard => 1.0,
            LadderConvention::HalfFactor => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderDirection {
    Raise,
    Lower,
}

/// `⟨m±1| I_± |m⟩` in the standard convention.
pub fn ladder_matrix_element(spin: Spin, m: f64, direction: LadderDirection) -> Result<f64> {
    ladder_matrix_element_with(spin, m, direction, LadderConvention::Standard)
}

pub fn ladder_matrix_element_with(
    spin: Spin,
    m: f64,
    direction: LadderDirection,
    convention: LadderConvention,
) -> Result<f64> {
    let i0 = spin.value();
    let k = m + i0;
    if !(k >= -1e-9 && k <= 2.0 * i0 + 1e-9 && (k - k.round()).abs() < 1e-9) {
        return Err(Error::invalid(format!("m = {m} is not a level of spin {spin}")));
    }
    let target = match direction {
        LadderDirection::Raise => m + 1.0,
        LadderDirection::Lower => m - 1.0,
    };
    if target.abs() > i0 + 1e-9 {
        return Err(Error::invalid(format!(
            "{direction:?} from m = {m} leaves the spin-{spin} multiplet"
        )));
    }
    Ok(level_coefficient(spin, k.round() as u8, direction) * convention.factor())
}

/// Standard ladder coefficient from level index `k`, zero at the edges.
pub(crate) fn level_coefficient(spin: Spin, k: u8, direction: LadderDirection) -> f64 {
    let i0 = spin.value();
    let m = spin.m_of_level(k);
    match direction {
        LadderDirection::Raise if k < spin.max_level() => (i0 * (i0 + 1.0) - m * (m + 1.0)).sqrt(),
        LadderDirection::Lower if k > 0 => (i0 * (i0 + 1.0) - m * (m - 1.0)).sqrt(),
        _ => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteOp {
    Z,
    Plus,
    Minus,
}

/// Operator expression over the electron and nuclear spin operators.
///
/// Site indices are 0-based. `Product` applies its factors right to left,
/// like the written operator product.
#[derive(Debug, Clone, PartialEq)]
pub enum OpExpr {
    Identity,
    SigmaZ,
    SigmaPlus,
    SigmaMinus,
    Site(SiteOp, usize),
    /// `Σ_j w_j X^(j)`.
    Weighted(SiteOp, Vec<f64>),
    Scaled(Complex64, Box<OpExpr>),
    Sum(Vec<OpExpr>),
    Product(Vec<OpExpr>),
}

impl OpExpr {
    pub fn iz(site: usize) -> OpExpr {
        OpExpr::Site(SiteOp::Z, site)
    }

    pub fn iplus(site: usize) -> OpExpr {
        OpExpr::Site(SiteOp::Plus, site)
    }

    pub fn iminus(site: usize) -> OpExpr {
        OpExpr::Site(SiteOp::Minus, site)
    }

    pub fn scaled(self, c: f64) -> OpExpr {
        OpExpr::Scaled(Complex64::new(c, 0.0), Box::new(self))
    }

    pub fn times(self, rhs: OpExpr) -> OpExpr {
        OpExpr::Product(vec![self, rhs])
    }

    pub fn plus(self, rhs: OpExpr) -> OpExpr {
        match self {
            OpExpr::Sum(mut terms) => {
                terms.push(rhs);
                OpExpr::Sum(terms)
            }
            lhs => OpExpr::Sum(vec![lhs, rhs]),
        }
    }

    /// Adjoint expression.
    pub fn dagger(&self) -> OpExpr {
        match self {
            OpExpr::Identity | OpExpr::SigmaZ => self.clone(),
            OpExpr::SigmaPlus => OpExpr::SigmaMinus,
            OpExpr::SigmaMinus => OpExpr::SigmaPlus,
            OpExpr::Site(op, j) => OpExpr::Site(op.dagger(), *j),
            OpExpr::Weighted(op, w) => OpExpr::Weighted(op.dagger(), w.clone()),
            OpExpr::Scaled(c, e) => OpExpr::Scaled(c.conj(), Box::new(e.dagger())),
            OpExpr::Sum(terms) => OpExpr::Sum(terms.iter().map(OpExpr::dagger).collect()),
            OpExpr::Product(factors) => OpExpr::Product(factors.iter().rev().map(OpExpr::dagger).collect()),
        }
    }

    fn apply(&self, spin: Spin, conv: LadderConvention, input: Vec<(BasisState, Complex64)>) -> Vec<(BasisState, Complex64)> {
        match self {
            OpExpr::Identity => input,
            OpExpr::SigmaZ => input
                .into_iter()
                .map(|(s, a)| {
                    let z = s.electron.sigma_z();
                    (s, a * z)
                })
                .collect(),
            OpExpr::SigmaPlus | OpExpr::SigmaMinus => {
                let from = if *self == OpExpr::SigmaPlus { Electron::Down } else { Electron::Up };
                input
                    .into_iter()
                    .filter(|(s, _)| s.electron == from)
                    .map(|(mut s, a)| {
                        s.electron = from.flipped();
                        (s, a)
                    })
                    .collect()
            }
            OpExpr::Site(op, j) => input
                .into_iter()
                .filter_map(|(s, a)| site_action(spin, conv, *op, *j, 1.0, s).map(|(s2, c)| (s2, a * c)))
                .collect(),
            OpExpr::Weighted(SiteOp::Z, w) => input
                .into_iter()
                .map(|(s, a)| {
                    let z: f64 = s.config.iter().zip(w).map(|(&k, wj)| wj * spin.m_of_level(k)).sum();
                    (s, a * z)
                })
                .collect(),
            OpExpr::Weighted(op, w) => {
                let mut out = Vec::new();
                for (s, a) in input {
                    for (j, &wj) in w.iter().enumerate() {
                        if wj == 0.0 {
                            continue;
                        }
                        if let Some((s2, c)) = site_action(spin, conv, *op, j, wj, s.clone()) {
                            out.push((s2, a * c));
                        }
                    }
                }
                out
            }
            OpExpr::Scaled(c, e) => e
                .apply(spin, conv, input)
                .into_iter()
                .map(|(s, a)| (s, a * c))
                .collect(),
            OpExpr::Sum(terms) => {
                let mut out = Vec::new();
                for t in terms {
                    out.extend(t.apply(spin, conv, input.clone()));
                }
                out
            }
            OpExpr::Product(factors) => {
                let mut cur = input;
                for f in factors.iter().rev() {
                    cur = f.apply(spin, conv, cur);
                    if cur.is_empty() {
                        break;
                    }
                }
                cur
            }
        }
    }
}

impl SiteOp {
    fn dagger(self) -> SiteOp {
        match self {
            SiteOp::Z => SiteOp::Z,
            SiteOp::Plus => SiteOp::Minus,
            SiteOp::Minus => SiteOp::Plus,
        }
    }
}

fn site_action(
    spin: Spin,
    conv: LadderConvention,
    op: SiteOp,
    j: usize,
    weight: f64,
    mut s: BasisState,
) -> Option<(BasisState, Complex64)> {
    let k = *s.config.get(j)?;
    let (coef, new_k) = match op {
        SiteOp::Z => (spin.m_of_level(k), k),
        SiteOp::Plus => (level_coefficient(spin, k, LadderDirection::Raise) * conv.factor(), k.wrapping_add(1)),
        SiteOp::Minus => (level_coefficient(spin, k, LadderDirection::Lower) * conv.factor(), k.wrapping_sub(1)),
    };
    if coef == 0.0 {
        return None;
    }
    s.config[j] = new_k;
    Some((s, Complex64::new(coef * weight, 0.0)))
}

impl fmt::Display for SiteOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SiteOp::Z => "I_z",
            SiteOp::Plus => "I_+",
            SiteOp::Minus => "I_-",
        })
    }
}

impl fmt::Display for OpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpExpr::Identity => f.write_str("1"),
            OpExpr::SigmaZ => f.write_str("σ_z"),
            OpExpr::SigmaPlus => f.write_str("σ_+"),
            OpExpr::SigmaMinus => f.write_str("σ_-"),
            OpExpr::Site(op, j) => write!(f, "{op}({})", j + 1),
            OpExpr::Weighted(op, _) => write!(f, "Σ_j w_j {op}(j)"),
            OpExpr::Scaled(c, e) => {
                if c.im == 0.0 {
                    write!(f, "{}·{e}", c.re)
                } else {
                    write!(f, "({c})·{e}")
                }
            }
            OpExpr::Sum(terms) => {
                f.write_str("(")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
            OpExpr::Product(factors) => {
                for (i, t) in factors.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{t}")?;
                }
                Ok(())
            }
        }
    }
}

/// What to do with images that leave the basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BuildMode {
    /// Any nonzero image outside the basis is an error.
    #[default]
    Strict,
    /// Drop images outside the basis (builds `P A P`).
    Project,
}

/// Exact matrix of `expr` on `basis`; errors if a term leaves the subspace.
pub fn build_operator(basis: &SubspaceBasis, expr: &OpExpr) -> Result<SparseOperator> {
    build_operator_with(basis, expr, LadderConvention::Standard, BuildMode::Strict)
}

pub fn build_operator_with(
    basis: &SubspaceBasis,
    expr: &OpExpr,
    conv: LadderConvention,
    mode: BuildMode,
) -> Result<SparseOperator> {
    let top_terms: Vec<&OpExpr> = match expr {
        OpExpr::Sum(terms) => terms.iter().collect(),
        e => vec![e],
    };
    for t in &top_terms {
        check_sites(t, basis.n_sites())?;
    }
    let spin = basis.spin();
    let mut entries = Vec::new();
    for (col, state) in basis.states().iter().enumerate() {
        let mut acc: HashMap<usize, Complex64> = HashMap::new();
        for term in &top_terms {
            for (image, amp) in term.apply(spin, conv, vec![(state.clone(), Complex64::new(1.0, 0.0))]) {
                match basis.index_of(&image) {
                    Some(row) => *acc.entry(row).or_default() += amp,
                    None if mode == BuildMode::Project => {}
                    None => {
                        if amp.norm() > 0.0 {
                            return Err(Error::SubspaceViolation { term: term.to_string() });
                        }
                    }
                }
            }
        }
        entries.extend(acc.into_iter().map(|(row, v)| (row, col, v)));
    }
    SparseOperator::from_triplets(basis.space(), basis.dim(), entries)
}

fn check_sites(expr: &OpExpr, n_sites: usize) -> Result<()> {
    match expr {
        OpExpr::Site(_, j) if *j >= n_sites => Err(Error::invalid(format!(
            "site {} out of range for N = {n_sites}",
            j + 1
        ))),
        OpExpr::Weighted(_, w) if w.len() != n_sites => Err(Error::invalid(format!(
            "{} weights for N = {n_sites}",
            w.len()
        ))),
        OpExpr::Scaled(_, e) => check_sites(e, n_sites),
        OpExpr::Sum(v) | OpExpr::Product(v) => v.iter().try_for_each(|e| check_sites(e, n_sites)),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockspace::{enumerate_direct_sum, enumerate_subspace};

    fn re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn ladder_elements() {
        let half = Spin::HALF;
        let one = Spin::from_twice(2).unwrap();
        let three_half = Spin::from_twice(3).unwrap();
        assert_eq!(ladder_matrix_element(half, -0.5, LadderDirection::Raise).unwrap(), 1.0);
        assert!((ladder_matrix_element(one, -1.0, LadderDirection::Raise).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((ladder_matrix_element(three_half, 0.5, LadderDirection::Raise).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        assert!(ladder_matrix_element(half, 0.5, LadderDirection::Raise).is_err());
        assert!(ladder_matrix_element(half, 0.25, LadderDirection::Lower).is_err());
        assert!(ladder_matrix_element(one, 2.0, LadderDirection::Lower).is_err());
        assert_eq!(
            ladder_matrix_element_with(half, -0.5, LadderDirection::Raise, LadderConvention::HalfFactor).unwrap(),
            0.5
        );
    }

    /// Explicit spin-3/2 matrices: `I_+ = I_x + iI_y` built from the
    /// standard `I_x`, `I_y` given entrywise.
    #[test]
    fn spin_three_half_against_explicit_matrices() {
        let s3 = 3f64.sqrt();
        // Basis ordered m = 3/2, 1/2, -1/2, -3/2.
        let ix = [[0.0, s3 / 2.0, 0.0, 0.0], [s3 / 2.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, s3 / 2.0], [0.0, 0.0, s3 / 2.0, 0.0]];
        // I_y = -i * [[0, s3/2, 0, 0], [-s3/2, 0, 1, 0], [0, -1, 0, s3/2], [0, 0, -s3/2, 0]]
        let iy_over_minus_i = [[0.0, s3 / 2.0, 0.0, 0.0], [-s3 / 2.0, 0.0, 1.0, 0.0], [0.0, -1.0, 0.0, s3 / 2.0], [0.0, 0.0, -s3 / 2.0, 0.0]];
        // I_+ = I_x + i I_y = I_x + iy_over_minus_i (since i * -i = 1).
        let ms = [1.5, 0.5, -0.5, -1.5];
        let spin = Spin::from_twice(3).unwrap();
        for col in 1..4 {
            let row = col - 1;
            let explicit = ix[row][col] + iy_over_minus_i[row][col];
            let formula = ladder_matrix_element(spin, ms[col], LadderDirection::Raise).unwrap();
            assert!((explicit - formula).abs() < 1e-14, "m = {}", ms[col]);
        }
    }

    #[test]
    fn diagonal_operators() {
        let b = enumerate_subspace(2, Spin::HALF, 0).unwrap();
        let sz = build_operator(&b, &OpExpr::SigmaZ).unwrap();
        assert_eq!(sz.diag(), vec![re(1.0), re(-1.0), re(-1.0)]);
        let iz = build_operator(&b, &OpExpr::iz(0).plus(OpExpr::iz(1))).unwrap();
        assert_eq!(iz.diag(), vec![re(-1.0), re(0.0), re(0.0)]);
        assert!(sz.is_hermitian() && iz.is_hermitian());
    }

    #[test]
    fn flip_flop_on_first_site() {
        let b = enumerate_subspace(2, Spin::HALF, 0).unwrap();
        let e = OpExpr::SigmaPlus.times(OpExpr::iminus(0)).plus(OpExpr::SigmaMinus.times(OpExpr::iplus(0)));
        let a = build_operator(&b, &e).unwrap();
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(0, 1), re(1.0));
        assert_eq!(a.get(1, 0), re(1.0));
        assert!(a.is_hermitian());
    }

    #[test]
    fn subspace_violation_names_term() {
        let b = enumerate_subspace(2, Spin::HALF, 0).unwrap();
        match build_operator(&b, &OpExpr::SigmaZ.plus(OpExpr::SigmaPlus)) {
            Err(Error::SubspaceViolation { term }) => assert_eq!(term, "σ_+"),
            other => panic!("expected violation, got {other:?}"),
        }
        let projected = build_operator_with(&b, &OpExpr::SigmaPlus, LadderConvention::Standard, BuildMode::Project).unwrap();
        assert_eq!(projected.nnz(), 0);
        assert!(build_operator(&b, &OpExpr::iz(5)).is_err());
    }

    #[test]
    fn dagger_matches_adjoint() {
        let b = enumerate_direct_sum(3, Spin::from_twice(2).unwrap(), -1, 3).unwrap();
        let e = OpExpr::SigmaPlus
            .times(OpExpr::Weighted(SiteOp::Minus, vec![0.3, 1.0, 2.0]))
            .plus(OpExpr::iz(1).times(OpExpr::iplus(1)).scaled(0.5));
        let a = build_operator_with(&b, &e, LadderConvention::Standard, BuildMode::Project).unwrap();
        let ad = build_operator_with(&b, &e.dagger(), LadderConvention::Standard, BuildMode::Project).unwrap();
        assert!(a.adjoint().max_abs_diff(&ad).unwrap() < 1e-15);
    }

    #[test]
    fn spin_commutation_relation() {
        // [I_+, I_-] = 2 I_z on every site, checked on a full tower.
        for twice in 1..=3 {
            let spin = Spin::from_twice(twice).unwrap();
            let b = enumerate_direct_sum(2, spin, -1, 2 * twice as i64).unwrap();
            let p = build_operator_with(&b, &OpExpr::iplus(0), LadderConvention::Standard, BuildMode::Project).unwrap();
            let m = build_operator_with(&b, &OpExpr::iminus(0), LadderConvention::Standard, BuildMode::Project).unwrap();
            let z = build_operator(&b, &OpExpr::iz(0).scaled(2.0)).unwrap();
            assert!(p.commutator(&m).unwrap().max_abs_diff(&z).unwrap() < 1e-13);
        }
    }
}
