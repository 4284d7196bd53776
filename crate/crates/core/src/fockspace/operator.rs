use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifies the Hilbert space an operator or state is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Space {
    /// Electron ⊗ nuclear spins, sectors `n_lo..=n_hi`.
    Spin {
        n_sites: usize,
        spin_twice: u32,
        n_lo: i64,
        n_hi: i64,
    },
    /// Electron ⊗ ideal boson truncated at `m_max` quanta.
    Boson { m_max: usize },
}

/// Tolerance behind the `hermitian` flag, relative to the largest entry.
const HERMITIAN_TOL: f64 = 1e-14;

/// Square sparse matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    space: Space,
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
    hermitian: bool,
}

impl SparseOperator {
    /// Sums duplicate entries and drops exact zeros.
    pub fn from_triplets<I>(space: Space, dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut rows: Vec<BTreeMap<usize, Complex64>> = vec![BTreeMap::new(); dim];
        for (r, c, v) in entries {
            if r >= dim || c >= dim {
                return Err(Error::invalid(format!("entry ({r}, {c}) outside a {dim}x{dim} operator")));
            }
            *rows[r].entry(c).or_default() += v;
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if v != Complex64::new(0.0, 0.0) {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        let mut op = SparseOperator {
            space,
            dim,
            row_ptr,
            cols,
            vals,
            hermitian: false,
        };
        op.hermitian = op.hermiticity_error() <= HERMITIAN_TOL * op.max_abs().max(1.0);
        Ok(op)
    }

    pub fn from_real_triplets<I>(space: Space, dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        Self::from_triplets(space, dim, entries.into_iter().map(|(r, c, v)| (r, c, Complex64::new(v, 0.0))))
    }

    pub fn zeros(space: Space, dim: usize) -> Self {
        Self::from_triplets(space, dim, std::iter::empty()).expect("empty operator is valid")
    }

    pub fn diagonal(space: Space, diag: &[f64]) -> Self {
        Self::from_real_triplets(space, diag.len(), diag.iter().enumerate().map(|(i, v)| (i, i, *v)))
            .expect("diagonal entries are in range")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// True when `A = A†` to within `1e-14` of the largest entry.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_real(&self) -> bool {
        self.vals.iter().all(|v| v.im == 0.0)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |p| (r, self.cols[p], self.vals[p]))
        })
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |p| (self.cols[p], self.vals[p]))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let span = &self.cols[self.row_ptr[r]..self.row_ptr[r + 1]];
        match span.binary_search(&c) {
            Ok(p) => self.vals[self.row_ptr[r] + p],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> Complex64 {
        self.diag().into_iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |A - A†|`.
    pub fn hermiticity_error(&self) -> f64 {
        self.triplets()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn adjoint(&self) -> SparseOperator {
        Self::from_triplets(self.space, self.dim, self.triplets().map(|(r, c, v)| (c, r, v.conj())))
            .expect("transposed entries stay in range")
    }

    fn check_same(&self, other: &SparseOperator) -> Result<()> {
        if self.space != other.space || self.dim != other.dim {
            return Err(Error::invalid(format!(
                "operators live on different spaces ({:?} vs {:?})",
                self.space, other.space
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.check_same(other)?;
        Self::from_triplets(self.space, self.dim, self.triplets().chain(other.triplets()))
    }

    pub fn sub(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    pub fn scaled(&self, c: Complex64) -> SparseOperator {
        Self::from_triplets(self.space, self.dim, self.triplets().map(|(r, col, v)| (r, col, v * c)))
            .expect("scaling keeps entries in range")
    }

    /// Matrix product `self · other`.
    pub fn matmul(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.check_same(other)?;
        let mut entries = Vec::new();
        for r in 0..self.dim {
            let mut acc: BTreeMap<usize, Complex64> = BTreeMap::new();
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    *acc.entry(c).or_default() += a * b;
                }
            }
            entries.extend(acc.into_iter().map(|(c, v)| (r, c, v)));
        }
        Self::from_triplets(self.space, self.dim, entries)
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &SparseOperator) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim, "vector length does not match operator");
        (0..self.dim).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if v.space() != self.space || v.dim() != self.dim {
            return Err(Error::invalid("state and operator live on different spaces"));
        }
        Ok(StateVector {
            space: self.space,
            amps: self.matvec(v.amplitudes()),
        })
    }

    /// `⟨v|A|v⟩`.
    pub fn expectation(&self, v: &StateVector) -> Result<Complex64> {
        let av = self.apply(v)?;
        Ok(v.inner(&av))
    }

    /// Row-major dense copy of the real part; `None` if any entry is complex.
    pub fn to_dense_real(&self) -> Option<Vec<f64>> {
        if !self.is_real() {
            return None;
        }
        let mut out = vec![0.0; self.dim * self.dim];
        for (r, c, v) in self.triplets() {
            out[r * self.dim + c] = v.re;
        }
        Some(out)
    }

    /// One `row col re im` line per stored entry, 0-based indices.
    pub fn to_triplet_text(&self) -> String {
        let mut out = format!("# dim {} nnz {}\n", self.dim, self.nnz());
        for (r, c, v) in self.triplets() {
            crate::io::push_line(
                &mut out,
                format_args!("{r} {c} {} {}", crate::io::fmt_f64(v.re), crate::io::fmt_f64(v.im)),
            );
        }
        out
    }

    /// Parses the format written by [`SparseOperator::to_triplet_text`].
    pub fn from_triplet_text(space: Space, text: &str) -> Result<Self> {
        let mut dim = None;
        let mut entries = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix('#') {
                let mut it = rest.split_whitespace();
                if it.next() == Some("dim") {
                    dim = it.next().and_then(|d| d.parse().ok());
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::invalid(format!("malformed triplet line `{line}`"));
            if parts.len() != 4 {
                return Err(bad());
            }
            let r: usize = parts[0].parse().map_err(|_| bad())?;
            let c: usize = parts[1].parse().map_err(|_| bad())?;
            let re: f64 = parts[2].parse().map_err(|_| bad())?;
            let im: f64 = parts[3].parse().map_err(|_| bad())?;
            entries.push((r, c, Complex64::new(re, im)));
        }
        let dim = dim.ok_or_else(|| Error::invalid("missing `# dim` header"))?;
        Self::from_triplets(space, dim, entries)
    }
}

/// Amplitudes over the states of a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: Space,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(space: Space, amps: Vec<Complex64>) -> Self {
        StateVector { space, amps }
    }

    pub fn zeros(space: Space, dim: usize) -> Self {
        StateVector {
            space,
            amps: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    /// The `i`-th basis vector.
    pub fn basis(space: Space, dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(space, dim);
        v.amps[i] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Scaled to unit norm; errors on the zero vector.
    pub fn normalized(&self) -> Result<StateVector> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::Degenerate("cannot normalize the zero vector".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, c: Complex64) -> StateVector {
        StateVector {
            space: self.space,
            amps: self.amps.iter().map(|a| a * c).collect(),
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product of vectors with different lengths");
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn add(&self, other: &StateVector) -> Result<StateVector> {
        if self.space != other.space || self.dim() != other.dim() {
            return Err(Error::invalid("states live on different spaces"));
        }
        Ok(StateVector {
            space: self.space,
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect(),
        })
    }

    /// `max_i |self_i - other_i|`.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
