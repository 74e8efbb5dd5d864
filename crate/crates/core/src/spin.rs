//! Spin-1/2 states and measurement directions on the unit sphere.
//!
//! A measurement direction is a unit vector, constructible either from
//! Cartesian components or from polar angles `theta` (from +z) and `phi`
//! (azimuth from +x). The spin state aligned with direction `(theta, phi)`
//! has amplitudes `(cos(theta/2), sin(theta/2) e^{i phi})` in the z basis.
//! Units are chosen so the measured spin component is +1/2 or -1/2.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{QmError, Result};
use crate::qcore::{inner_product, ComplexAmp, PureState, EPS_ZERO};

/// Unit vector on the sphere, fixing a spin-component measurement axis.
///
/// Serializes as `{"x": ..., "y": ..., "z": ...}`; deserializes from either
/// that form or `{"theta": ..., "phi": ...}`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(try_from = "DirectionInput", into = "DirectionXyz")]
pub struct Direction {
    x: f64,
    y: f64,
    z: f64,
}

impl Direction {
    /// Normalizes a Cartesian vector into a direction.
    pub fn from_xyz(x: f64, y: f64, z: f64) -> Result<Self> {
        let len = (x * x + y * y + z * z).sqrt();
        if !len.is_finite() || len < EPS_ZERO {
            return Err(QmError::ZeroDirection);
        }
        Ok(Self {
            x: x / len,
            y: y / len,
            z: z / len,
        })
    }

    /// Direction at polar angle `theta` in `[0, pi]` and azimuth `phi` in
    /// `[0, 2pi)`.
    pub fn from_angles(theta: f64, phi: f64) -> Result<Self> {
        check_angles(theta, phi)?;
        Ok(Self {
            x: theta.sin() * phi.cos(),
            y: theta.sin() * phi.sin(),
            z: theta.cos(),
        })
    }

    /// Unit vector along +x.
    pub fn plus_x() -> Self {
        Self { x: 1.0, y: 0.0, z: 0.0 }
    }

    /// Unit vector along +y.
    pub fn plus_y() -> Self {
        Self { x: 0.0, y: 1.0, z: 0.0 }
    }

    /// Unit vector along +z.
    pub fn plus_z() -> Self {
        Self { x: 0.0, y: 0.0, z: 1.0 }
    }

    /// X component.
    pub fn x(&self) -> f64 {
        self.x
    }

    /// Y component.
    pub fn y(&self) -> f64 {
        self.y
    }

    /// Z component.
    pub fn z(&self) -> f64 {
        self.z
    }

    /// Polar angles `(theta, phi)` with `theta` in `[0, pi]` and `phi` in
    /// `[0, 2pi)`. On the poles, where the azimuth is undefined, `phi` is 0.
    pub fn to_angles(&self) -> (f64, f64) {
        let theta = self.z.clamp(-1.0, 1.0).acos();
        if self.x.abs() <= EPS_ZERO && self.y.abs() <= EPS_ZERO {
            return (theta, 0.0);
        }
        let mut phi = self.y.atan2(self.x);
        if phi < 0.0 {
            phi += TAU;
        }
        if phi >= TAU {
            phi = 0.0;
        }
        (theta, phi)
    }

    /// Opposite direction `-e`.
    pub fn antipode(&self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Euclidean dot product with another direction.
    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Angle between two directions, in `[0, pi]`.
    pub fn angle_between(&self, other: &Self) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }
}

fn check_angles(theta: f64, phi: f64) -> Result<()> {
    if !(0.0..=PI).contains(&theta) {
        return Err(QmError::AngleOutOfRange {
            name: "theta",
            value: theta,
        });
    }
    if !(0.0..TAU).contains(&phi) {
        return Err(QmError::AngleOutOfRange {
            name: "phi",
            value: phi,
        });
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DirectionInput {
    Xyz(DirectionXyz),
    Angles(DirectionAngles),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DirectionXyz {
    x: f64,
    y: f64,
    z: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DirectionAngles {
    theta: f64,
    phi: f64,
}

impl TryFrom<DirectionInput> for Direction {
    type Error = QmError;

    fn try_from(input: DirectionInput) -> Result<Self> {
        match input {
            DirectionInput::Xyz(v) => Self::from_xyz(v.x, v.y, v.z),
            DirectionInput::Angles(a) => Self::from_angles(a.theta, a.phi),
        }
    }
}

impl From<Direction> for DirectionXyz {
    fn from(e: Direction) -> Self {
        Self {
            x: e.x,
            y: e.y,
            z: e.z,
        }
    }
}

/// Spin-up state along the direction given by polar angles: amplitudes
/// `(cos(theta/2), sin(theta/2) e^{i phi})` in the z basis.
pub fn spin_state(theta: f64, phi: f64) -> Result<PureState> {
    check_angles(theta, phi)?;
    Ok(spin_state_unchecked(theta, phi))
}

fn spin_state_unchecked(theta: f64, phi: f64) -> PureState {
    let half = theta / 2.0;
    PureState::from_amps_unchecked(vec![
        ComplexAmp::new(half.cos(), 0.0),
        ComplexAmp::from_polar(half.sin(), phi),
    ])
}

/// Orthonormal pair `(|+e>, |-e>)` of spin states along and against `e`.
///
/// The down state is the up state of the antipodal direction, so it realizes
/// `spin_state(pi - theta, phi + pi mod 2pi)` with azimuth 0 on the poles.
pub fn basis_pair(e: &Direction) -> (PureState, PureState) {
    let (theta, phi) = e.to_angles();
    let (theta_m, phi_m) = e.antipode().to_angles();
    (
        spin_state_unchecked(theta, phi),
        spin_state_unchecked(theta_m, phi_m),
    )
}

/// Probabilities `(p_plus, p_minus)` of finding the spin along or against `e`.
pub fn component_probs(psi: &PureState, e: &Direction) -> Result<(f64, f64)> {
    if psi.dim() != 2 {
        return Err(QmError::DimensionMismatch {
            expected: 2,
            got: psi.dim(),
        });
    }
    let (plus, minus) = basis_pair(e);
    let p_plus = inner_product(&plus, psi)?.norm_sqr();
    let p_minus = inner_product(&minus, psi)?.norm_sqr();
    Ok((p_plus, p_minus))
}

/// Expectation of the spin component along `e`, equal to
/// `(+1/2) p_plus + (-1/2) p_minus`.
pub fn expectation(psi: &PureState, e: &Direction) -> Result<f64> {
    let (p_plus, p_minus) = component_probs(psi, e)?;
    Ok(0.5 * p_plus - 0.5 * p_minus)
}

/// Direction along which a one-spin pure state points on the Bloch sphere.
///
/// Inverse of [`spin_state`] up to global phase: away from the poles the
/// recovered angles match the constructing ones.
pub fn bloch_direction(psi: &PureState) -> Result<Direction> {
    if psi.dim() != 2 {
        return Err(QmError::DimensionMismatch {
            expected: 2,
            got: psi.dim(),
        });
    }
    let c0 = psi.amps()[0];
    let c1 = psi.amps()[1];
    let theta = 2.0 * c1.norm().atan2(c0.norm());
    let phi = if c0.norm() <= EPS_ZERO || c1.norm() <= EPS_ZERO {
        0.0
    } else {
        let mut phi = (c1.arg() - c0.arg()) % TAU;
        if phi < 0.0 {
            phi += TAU;
        }
        if phi >= TAU {
            phi = 0.0;
        }
        phi
    };
    Direction::from_angles(theta.clamp(0.0, PI), phi)
}
