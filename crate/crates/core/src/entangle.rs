//! Two-spin states, factorizability, and the singlet's joint statistics.
//!
//! A two-spin state is stored as four amplitudes over the product basis
//! built from a reference direction per spin, in the fixed ordering
//! `(++, +-, -+, --)`. A state that cannot be written as a tensor product of
//! one-spin states is entangled; the singlet is the extreme case, showing
//! perfect anticorrelation along every common measurement direction.

use serde::{Deserialize, Serialize};

use crate::error::{QmError, Result};
use crate::qcore::{
    inner_product, normalize, tensor_product, ComplexAmp, PureState, EPS_NORM, EPS_ZERO,
};
use crate::spin::{basis_pair, Direction};

/// Sign label for a spin-component outcome, `+` first in every ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    /// Spin along the direction.
    #[serde(rename = "+")]
    Plus,
    /// Spin against the direction.
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    /// Both signs, `+` first.
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    /// The sign as a factor, `+1` or `-1`.
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// The opposite sign.
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// `"+"` or `"-"`.
    pub fn label(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }

    /// 0 for `+`, 1 for `-`; the index of this sign in every table.
    pub fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }
}

/// Normalized state of two spins over the product basis of two reference
/// directions, amplitudes ordered `(++, +-, -+, --)` for spins (A, B).
///
/// Serializes as `{"amps": [[re, im] x4], "e_a": ..., "e_b": ...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "TwoSpinWire", into = "TwoSpinWire")]
pub struct TwoSpinState {
    amps: [ComplexAmp; 4],
    e_a: Direction,
    e_b: Direction,
}

impl TwoSpinState {
    /// Amplitudes in the fixed `(++, +-, -+, --)` ordering.
    pub fn amps(&self) -> &[ComplexAmp; 4] {
        &self.amps
    }

    /// Reference direction for spin A.
    pub fn e_a(&self) -> &Direction {
        &self.e_a
    }

    /// Reference direction for spin B.
    pub fn e_b(&self) -> &Direction {
        &self.e_b
    }

    /// The state as a dim-4 vector over the computational z-product basis.
    pub fn computational_amps(&self) -> PureState {
        let (a_plus, a_minus) = basis_pair(&self.e_a);
        let (b_plus, b_minus) = basis_pair(&self.e_b);
        let mut total = vec![ComplexAmp::new(0.0, 0.0); 4];
        let pairs = [
            (&a_plus, &b_plus),
            (&a_plus, &b_minus),
            (&a_minus, &b_plus),
            (&a_minus, &b_minus),
        ];
        for (alpha, (fa, fb)) in self.amps.iter().zip(pairs) {
            let product = tensor_product(fa, fb).expect("factors are dim 2");
            for (slot, amp) in total.iter_mut().zip(product.amps()) {
                *slot += alpha * amp;
            }
        }
        PureState::from_amps_unchecked(total)
    }

    /// The same physical state re-expanded over the product basis of two new
    /// reference directions. Unitary: amplitudes change, the norm does not.
    pub fn reexpress(&self, f_a: Direction, f_b: Direction) -> TwoSpinState {
        let psi = self.computational_amps();
        let (a_plus, a_minus) = basis_pair(&f_a);
        let (b_plus, b_minus) = basis_pair(&f_b);
        let pairs = [
            (&a_plus, &b_plus),
            (&a_plus, &b_minus),
            (&a_minus, &b_plus),
            (&a_minus, &b_minus),
        ];
        let mut amps = [ComplexAmp::new(0.0, 0.0); 4];
        for (slot, (fa, fb)) in amps.iter_mut().zip(pairs) {
            let target = tensor_product(fa, fb).expect("factors are dim 2");
            *slot = inner_product(&target, &psi).expect("dims are 4");
        }
        TwoSpinState {
            amps,
            e_a: f_a,
            e_b: f_b,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoSpinWire {
    amps: Vec<[f64; 2]>,
    e_a: Direction,
    e_b: Direction,
}

impl TryFrom<TwoSpinWire> for TwoSpinState {
    type Error = QmError;

    fn try_from(wire: TwoSpinWire) -> Result<Self> {
        if wire.amps.len() != 4 {
            return Err(QmError::DimensionMismatch {
                expected: 4,
                got: wire.amps.len(),
            });
        }
        let mut amps = [ComplexAmp::new(0.0, 0.0); 4];
        for (slot, [re, im]) in amps.iter_mut().zip(wire.amps) {
            *slot = ComplexAmp::new(re, im);
        }
        let norm_sqr: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > EPS_NORM {
            return Err(QmError::NotNormalized { norm_sqr });
        }
        Ok(TwoSpinState {
            amps,
            e_a: wire.e_a,
            e_b: wire.e_b,
        })
    }
}

impl From<TwoSpinState> for TwoSpinWire {
    fn from(state: TwoSpinState) -> Self {
        Self {
            amps: state.amps.iter().map(|c| [c.re, c.im]).collect(),
            e_a: state.e_a,
            e_b: state.e_b,
        }
    }
}

/// Builds a normalized two-spin state from raw amplitudes and reference
/// directions.
pub fn make_two_spin(
    alphas: [ComplexAmp; 4],
    e_a: Direction,
    e_b: Direction,
) -> Result<TwoSpinState> {
    let norm: f64 = alphas.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if !norm.is_finite() || norm < EPS_ZERO {
        return Err(QmError::ZeroVector);
    }
    let inv = 1.0 / norm;
    Ok(TwoSpinState {
        amps: alphas.map(|c| c * inv),
        e_a,
        e_b,
    })
}

/// The singlet `(|+,-> - |-,+>)/sqrt(2)` with both reference directions +z.
pub fn singlet() -> TwoSpinState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    TwoSpinState {
        amps: [
            ComplexAmp::new(0.0, 0.0),
            ComplexAmp::new(s, 0.0),
            ComplexAmp::new(-s, 0.0),
            ComplexAmp::new(0.0, 0.0),
        ],
        e_a: Direction::plus_z(),
        e_b: Direction::plus_z(),
    }
}

/// Outcome of testing a two-spin state for a tensor-product decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct FactorizationResult {
    /// Whether the state splits into a product of one-spin states.
    pub factorizable: bool,
    /// Spin-A factor when factorizable.
    pub factor_a: Option<PureState>,
    /// Spin-B factor when factorizable.
    pub factor_b: Option<PureState>,
    /// Absolute determinant of the 2x2 amplitude matrix; 0 exactly on the
    /// factorizable set, 1/2 at maximal entanglement.
    pub defect: f64,
}

fn amp_matrix_det(state: &TwoSpinState) -> ComplexAmp {
    let a = state.amps();
    a[0] * a[3] - a[1] * a[2]
}

/// Tests whether the amplitudes split as a tensor product, within `tol` on
/// the determinant of the 2x2 matrix `C[i][j]` = amplitude of `(i on A, j on
/// B)`. When they do, the factors are read off the dominant column and row.
pub fn factorize(state: &TwoSpinState, tol: f64) -> FactorizationResult {
    let defect = amp_matrix_det(state).norm().min(0.5);
    if defect > tol {
        return FactorizationResult {
            factorizable: false,
            factor_a: None,
            factor_b: None,
            defect,
        };
    }
    let a = state.amps();
    let row_norms = [
        a[0].norm_sqr() + a[1].norm_sqr(),
        a[2].norm_sqr() + a[3].norm_sqr(),
    ];
    let col_norms = [
        a[0].norm_sqr() + a[2].norm_sqr(),
        a[1].norm_sqr() + a[3].norm_sqr(),
    ];
    let row = if row_norms[0] >= row_norms[1] { 0 } else { 1 };
    let col = if col_norms[0] >= col_norms[1] { 0 } else { 1 };
    let factor_b = normalize(&[a[2 * row], a[2 * row + 1]]).expect("dominant row is nonzero");
    let factor_a = normalize(&[a[col], a[2 + col]]).expect("dominant column is nonzero");
    FactorizationResult {
        factorizable: true,
        factor_a: Some(factor_a),
        factor_b: Some(factor_b),
        defect,
    }
}

/// Entanglement score `2 |det C|`: 0 exactly when the state factorizes, 1
/// for the singlet. Equals the pure-state concurrence.
pub fn entanglement_score(state: &TwoSpinState) -> f64 {
    (2.0 * amp_matrix_det(state).norm()).clamp(0.0, 1.0)
}

/// Probability of finding singlet spins `eps_a` along `a` and `eps_b` along
/// `b`: `(1/4)(1 - eps_a eps_b a.b)`, in `[0, 1/2]`.
pub fn singlet_joint_prob(eps_a: Sign, a: &Direction, eps_b: Sign, b: &Direction) -> f64 {
    (0.25 * (1.0 - eps_a.value() * eps_b.value() * a.dot(b))).clamp(0.0, 0.5)
}

/// Probability of the joint outcome `(eps_a along a, eps_b along b)` for an
/// arbitrary two-spin state, by direct projection onto the product state.
pub fn joint_prob_general(
    state: &TwoSpinState,
    eps_a: Sign,
    a: &Direction,
    eps_b: Sign,
    b: &Direction,
) -> f64 {
    let pick = |e: &Direction, sign: Sign| {
        let (plus, minus) = basis_pair(e);
        match sign {
            Sign::Plus => plus,
            Sign::Minus => minus,
        }
    };
    let target =
        tensor_product(&pick(a, eps_a), &pick(b, eps_b)).expect("projection factors are dim 2");
    inner_product(&target, &state.computational_amps())
        .expect("dims are 4")
        .norm_sqr()
}
