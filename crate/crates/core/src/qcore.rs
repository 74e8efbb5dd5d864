//! Complex linear algebra for finite-dimensional quantum states.
//!
//! States live in dimension 2 (one spin) or 4 (two spins). A pure state is a
//! normalized vector of complex amplitudes whose squared magnitudes are
//! outcome probabilities; a density matrix encodes a statistical mixture of
//! pure states. Two pure states are physically identical when they differ
//! only by a global phase factor, so the module offers both component-wise
//! and phase-insensitive comparison.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QmError, Result};

/// Complex probability amplitude with direct `re`/`im` field access.
pub type ComplexAmp = Complex64;

/// Tolerance for normalization checks on states and density matrices.
pub const EPS_NORM: f64 = 1e-9;

/// Floor applied to density-matrix eigenvalues in positivity checks.
pub const EPS_PSD: f64 = 1e-9;

/// Magnitude below which an amplitude vector counts as zero.
pub const EPS_ZERO: f64 = 1e-12;

fn dim_supported(dim: usize) -> bool {
    dim == 2 || dim == 4
}

/// Normalized pure state `|psi> = sum_i C_i |i>` over the computational basis.
///
/// For one spin, index 0 is `|+z>` and index 1 is `|-z>`. Two-spin states use
/// the row-major pair ordering `(++, +-, -+, --)` for spins (A, B).
///
/// Serializes as `{"dim": n, "amps": [[re, im], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "PureStateWire", into = "PureStateWire")]
pub struct PureState {
    amps: Vec<ComplexAmp>,
}

impl PureState {
    /// Builds a state from amplitudes that must already be normalized.
    pub fn new(amps: Vec<ComplexAmp>) -> Result<Self> {
        if !dim_supported(amps.len()) {
            return Err(QmError::UnsupportedDimension(amps.len()));
        }
        let norm_sqr: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > EPS_NORM {
            return Err(QmError::NotNormalized { norm_sqr });
        }
        Ok(Self { amps })
    }

    /// Computational basis state `|index>` of the given dimension.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if !dim_supported(dim) {
            return Err(QmError::UnsupportedDimension(dim));
        }
        if index >= dim {
            return Err(QmError::IndexOutOfRange { index, dim });
        }
        let mut amps = vec![ComplexAmp::new(0.0, 0.0); dim];
        amps[index] = ComplexAmp::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub(crate) fn from_amps_unchecked(amps: Vec<ComplexAmp>) -> Self {
        Self { amps }
    }

    /// Number of amplitudes (2 or 4).
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Amplitudes in computational-basis order.
    pub fn amps(&self) -> &[ComplexAmp] {
        &self.amps
    }

    /// Sum of squared amplitude magnitudes.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PureStateWire {
    dim: usize,
    amps: Vec<[f64; 2]>,
}

impl TryFrom<PureStateWire> for PureState {
    type Error = QmError;

    fn try_from(wire: PureStateWire) -> Result<Self> {
        if wire.amps.len() != wire.dim {
            return Err(QmError::DimensionMismatch {
                expected: wire.dim,
                got: wire.amps.len(),
            });
        }
        Self::new(
            wire.amps
                .into_iter()
                .map(|[re, im]| ComplexAmp::new(re, im))
                .collect(),
        )
    }
}

impl From<PureState> for PureStateWire {
    fn from(state: PureState) -> Self {
        Self {
            dim: state.dim(),
            amps: state.amps.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

/// Inner product `<phi|psi> = sum_i conj(D_i) C_i`.
pub fn inner_product(phi: &PureState, psi: &PureState) -> Result<ComplexAmp> {
    if phi.dim() != psi.dim() {
        return Err(QmError::DimensionMismatch {
            expected: phi.dim(),
            got: psi.dim(),
        });
    }
    Ok(phi
        .amps
        .iter()
        .zip(&psi.amps)
        .map(|(d, c)| d.conj() * c)
        .sum())
}

/// Expansion coefficient `C_j = <j|psi>` in the computational basis.
pub fn expansion_coefficient(psi: &PureState, basis_index: usize) -> Result<ComplexAmp> {
    if basis_index >= psi.dim() {
        return Err(QmError::IndexOutOfRange {
            index: basis_index,
            dim: psi.dim(),
        });
    }
    Ok(psi.amps[basis_index])
}

/// Scales a raw amplitude vector to unit norm, preserving its direction.
pub fn normalize(raw_amps: &[ComplexAmp]) -> Result<PureState> {
    if !dim_supported(raw_amps.len()) {
        return Err(QmError::UnsupportedDimension(raw_amps.len()));
    }
    let norm: f64 = raw_amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if !norm.is_finite() || norm < EPS_ZERO {
        return Err(QmError::ZeroVector);
    }
    let inv = 1.0 / norm;
    Ok(PureState::from_amps_unchecked(
        raw_amps.iter().map(|c| c * inv).collect(),
    ))
}

/// Tensor product of two one-spin states in the ordering `(00, 01, 10, 11)`.
pub fn tensor_product(a: &PureState, b: &PureState) -> Result<PureState> {
    for factor in [a, b] {
        if factor.dim() != 2 {
            return Err(QmError::DimensionMismatch {
                expected: 2,
                got: factor.dim(),
            });
        }
    }
    let mut amps = Vec::with_capacity(4);
    for i in 0..2 {
        for j in 0..2 {
            amps.push(a.amps[i] * b.amps[j]);
        }
    }
    Ok(PureState::from_amps_unchecked(amps))
}

/// Tests physical equality of two states up to a global phase factor.
///
/// Distinct from component-wise equality: `c|psi>` with `|c| = 1` passes for
/// any phase `c`.
pub fn phase_equal(a: &PureState, b: &PureState, tol: f64) -> bool {
    if a.dim() != b.dim() {
        return false;
    }
    match inner_product(a, b) {
        Ok(ip) => (ip.norm() - 1.0).abs() <= tol,
        Err(_) => false,
    }
}

/// Hermitian, unit-trace, positive-semidefinite matrix `rho`.
///
/// Positivity is decided through the characteristic polynomial: all
/// eigenvalues must be at least `-EPS_PSD`.
///
/// Serializes as `{"dim": n, "entries": [[[re, im], ...], ...]}` (row-major).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "DensityMatrixWire", into = "DensityMatrixWire")]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<ComplexAmp>,
}

impl DensityMatrix {
    /// Validates and builds a density matrix from row-major entry rows.
    pub fn from_rows(rows: &[Vec<ComplexAmp>]) -> Result<Self> {
        let dim = rows.len();
        if !dim_supported(dim) {
            return Err(QmError::UnsupportedDimension(dim));
        }
        for row in rows {
            if row.len() != dim {
                return Err(QmError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
        }
        let matrix = Self {
            dim,
            entries: rows.iter().flatten().copied().collect(),
        };
        matrix.validate()?;
        Ok(matrix)
    }

    fn validate(&self) -> Result<()> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                if (self.entry(i, j) - self.entry(j, i).conj()).norm() > EPS_NORM {
                    return Err(QmError::NotHermitian);
                }
            }
        }
        let trace = self.trace();
        if (trace.re - 1.0).abs() > EPS_NORM || trace.im.abs() > EPS_NORM {
            return Err(QmError::BadTrace { trace: trace.re });
        }
        if !psd_within(self.dim, &self.entries, EPS_PSD) {
            return Err(QmError::NotPositive);
        }
        Ok(())
    }

    /// Matrix dimension (2 or 4).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at row `i`, column `j`. Panics if an index is out of range.
    pub fn entry(&self, i: usize, j: usize) -> ComplexAmp {
        assert!(i < self.dim && j < self.dim, "entry index out of range");
        self.entries[i * self.dim + j]
    }

    /// Entries as row vectors.
    pub fn rows(&self) -> Vec<Vec<ComplexAmp>> {
        (0..self.dim)
            .map(|i| self.entries[i * self.dim..(i + 1) * self.dim].to_vec())
            .collect()
    }

    /// Matrix trace.
    pub fn trace(&self) -> ComplexAmp {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    /// Eigenvalues in ascending order, computed from the closed-form
    /// characteristic polynomial.
    ///
    /// Simple eigenvalues are accurate to machine precision; an eigenvalue of
    /// multiplicity `m` is resolved only to roughly `1e-16^(1/m)`, the
    /// intrinsic sensitivity of polynomial roots. Positivity checks do not
    /// depend on this resolution.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let coeffs = char_poly(self.dim, &self.entries);
        match self.dim {
            2 => quadratic_roots(coeffs[0], coeffs[1]).to_vec(),
            _ => quartic_roots(coeffs[0], coeffs[1], coeffs[2], coeffs[3]).to_vec(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityMatrixWire {
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<DensityMatrixWire> for DensityMatrix {
    type Error = QmError;

    fn try_from(wire: DensityMatrixWire) -> Result<Self> {
        if wire.entries.len() != wire.dim {
            return Err(QmError::DimensionMismatch {
                expected: wire.dim,
                got: wire.entries.len(),
            });
        }
        let rows: Vec<Vec<ComplexAmp>> = wire
            .entries
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|[re, im]| ComplexAmp::new(re, im))
                    .collect()
            })
            .collect();
        Self::from_rows(&rows)
    }
}

impl From<DensityMatrix> for DensityMatrixWire {
    fn from(matrix: DensityMatrix) -> Self {
        Self {
            dim: matrix.dim,
            entries: matrix
                .rows()
                .into_iter()
                .map(|row| row.into_iter().map(|c| [c.re, c.im]).collect())
                .collect(),
        }
    }
}

/// Projector `|psi><psi|` as a density matrix.
pub fn pure_to_density(psi: &PureState) -> DensityMatrix {
    let dim = psi.dim();
    let mut entries = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            entries.push(psi.amps[i] * psi.amps[j].conj());
        }
    }
    let matrix = DensityMatrix { dim, entries };
    debug_assert!(matrix.validate().is_ok());
    matrix
}

/// Statistical mixture `rho = sum_k w_k |psi_k><psi_k|`.
pub fn mix(states: &[PureState], weights: &[f64]) -> Result<DensityMatrix> {
    if states.is_empty() {
        return Err(QmError::InvalidArgument("mix of zero states".into()));
    }
    if states.len() != weights.len() {
        return Err(QmError::DimensionMismatch {
            expected: states.len(),
            got: weights.len(),
        });
    }
    let dim = states[0].dim();
    for state in states {
        if state.dim() != dim {
            return Err(QmError::DimensionMismatch {
                expected: dim,
                got: state.dim(),
            });
        }
    }
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || (sum - 1.0).abs() > EPS_NORM {
        return Err(QmError::InvalidWeights { sum });
    }
    let mut entries = vec![ComplexAmp::new(0.0, 0.0); dim * dim];
    for (state, weight) in states.iter().zip(weights) {
        for i in 0..dim {
            for j in 0..dim {
                entries[i * dim + j] += state.amps[i] * state.amps[j].conj() * *weight;
            }
        }
    }
    let matrix = DensityMatrix { dim, entries };
    debug_assert!(matrix.validate().is_ok());
    Ok(matrix)
}

/// Purity `trace(rho^2)`, between `1/dim` (maximally mixed) and 1 (pure).
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.entries.iter().map(|c| c.norm_sqr()).sum()
}

/// Expectation `<psi|rho|psi>` of a density matrix in a pure state.
pub fn density_expectation(rho: &DensityMatrix, psi: &PureState) -> Result<f64> {
    if rho.dim() != psi.dim() {
        return Err(QmError::DimensionMismatch {
            expected: rho.dim(),
            got: psi.dim(),
        });
    }
    let mut acc = ComplexAmp::new(0.0, 0.0);
    for i in 0..rho.dim() {
        for j in 0..rho.dim() {
            acc += psi.amps[i].conj() * rho.entry(i, j) * psi.amps[j];
        }
    }
    Ok(acc.re)
}

fn mat_mul(dim: usize, a: &[ComplexAmp], b: &[ComplexAmp]) -> Vec<ComplexAmp> {
    let mut out = vec![ComplexAmp::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            for j in 0..dim {
                out[i * dim + j] += aik * b[k * dim + j];
            }
        }
    }
    out
}

fn mat_trace(dim: usize, m: &[ComplexAmp]) -> ComplexAmp {
    (0..dim).map(|i| m[i * dim + i]).sum()
}

/// Monic characteristic polynomial coefficients `[a_{n-1}, ..., a_0]` of a
/// Hermitian matrix, via the Faddeev-LeVerrier recurrence.
fn char_poly(dim: usize, m: &[ComplexAmp]) -> Vec<f64> {
    let mut prod = vec![ComplexAmp::new(0.0, 0.0); dim * dim];
    let mut coeff = 1.0;
    let mut coeffs = Vec::with_capacity(dim);
    for k in 1..=dim {
        let mut mk = prod.clone();
        for i in 0..dim {
            mk[i * dim + i] += coeff;
        }
        prod = mat_mul(dim, m, &mk);
        coeff = -mat_trace(dim, &prod).re / k as f64;
        coeffs.push(coeff);
    }
    coeffs
}

/// Real roots of `x^2 + b x + c`, ascending, with a clamped discriminant.
fn quadratic_roots(b: f64, c: f64) -> [f64; 2] {
    let half = -b / 2.0;
    let disc = (half * half - c).max(0.0).sqrt();
    [half - disc, half + disc]
}

/// Real roots of `x^3 + b x^2 + c x + d` when all roots are known real,
/// by the trigonometric method.
fn cubic_roots(b: f64, c: f64, d: f64) -> [f64; 3] {
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let shift = -b / 3.0;
    let m = 2.0 * (-p / 3.0).max(0.0).sqrt();
    if m == 0.0 {
        return [shift; 3];
    }
    let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let mut roots = [0.0; 3];
    for (k, root) in roots.iter_mut().enumerate() {
        *root = shift + m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
    }
    roots
}

/// Real roots of `x^4 + a3 x^3 + a2 x^2 + a1 x + a0` when all roots are known
/// real, by resolvent-cubic factorization into two quadratics.
fn quartic_roots(a3: f64, a2: f64, a1: f64, a0: f64) -> [f64; 4] {
    let e = a3 / 4.0;
    let p = a2 - 6.0 * e * e;
    let q = a1 - 2.0 * a2 * e + 8.0 * e * e * e;
    let r = a0 - a1 * e + a2 * e * e - 3.0 * e * e * e * e;
    let resolvent = cubic_roots(p, (2.0 * p * p - 8.0 * r) / 8.0, -q * q / 8.0);
    let m = resolvent[0].max(resolvent[1]).max(resolvent[2]);
    let scale = 1.0_f64.max(p.abs()).max(r.abs().sqrt());
    let mut ys = [0.0; 4];
    if m <= 1e-14 * scale {
        let disc = (p * p / 4.0 - r).max(0.0).sqrt();
        let ya = (-p / 2.0 + disc).max(0.0).sqrt();
        let yb = (-p / 2.0 - disc).max(0.0).sqrt();
        ys = [ya, -ya, yb, -yb];
    } else {
        let s = (2.0 * m).sqrt();
        let t = q / (2.0 * s);
        for (half, sgn) in [1.0_f64, -1.0].iter().enumerate() {
            let bq = sgn * s;
            let cq = p / 2.0 + m - sgn * t;
            let disc = (bq * bq - 4.0 * cq).max(0.0).sqrt();
            ys[2 * half] = (-bq + disc) / 2.0;
            ys[2 * half + 1] = (-bq - disc) / 2.0;
        }
    }
    let mut roots = ys.map(|y| y - e);
    for x in roots.iter_mut() {
        let der = ((4.0 * *x + 3.0 * a3) * *x + 2.0 * a2) * *x + a1;
        if der.abs() > 1e-8 {
            let val = (((*x + a3) * *x + a2) * *x + a1) * *x + a0;
            *x -= val / der;
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Decides whether all eigenvalues of a Hermitian matrix are at least `-eps`.
///
/// Works on the characteristic polynomial of the shifted matrix `m + eps*I`:
/// a real-rooted monic polynomial has all roots nonnegative exactly when all
/// of its sign-adjusted coefficients (the elementary symmetric functions of
/// the roots) are nonnegative. This stays sharp at the tolerance boundary
/// even for repeated eigenvalues, where extracted roots lose accuracy.
fn psd_within(dim: usize, entries: &[ComplexAmp], eps: f64) -> bool {
    let mut shifted = entries.to_vec();
    for i in 0..dim {
        shifted[i * dim + i] += eps;
    }
    let coeffs = char_poly(dim, &shifted);
    let trace: f64 = (0..dim).map(|i| shifted[i * dim + i].re).sum();
    let slack = 1e-13 * trace.abs().max(1.0);
    coeffs.iter().enumerate().all(|(idx, a)| {
        let elementary = if idx % 2 == 0 { -a } else { *a };
        elementary >= -slack
    })
}
