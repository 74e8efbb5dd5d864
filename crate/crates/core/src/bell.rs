//! Bell-inequality analysis: the quantum prediction, classical joint
//! distributions, and an explicit local-hidden-variable feasibility test.
//!
//! A classical model for the two-spin experiment assigns joint probabilities
//! to definite values of all three spin components on both particles at
//! once. For the singlet these assignments must be perfectly anticorrelated
//! between the particles, and on that support the pairwise combination
//! `p(+a;+b) + p(+b;+c) - p(+a;+c)` is nonnegative for every distribution.
//! The quantum expression for the same combination goes negative for some
//! direction triples, so no such classical assignment reproduces it;
//! [`lhv_feasibility`] exhibits the witness distribution or the violated
//! nonnegativity constraint explicitly.

use serde::Serialize;

use crate::entangle::{joint_prob_general, singlet, singlet_joint_prob, Sign};
use crate::error::{QmError, Result};
use crate::measure::{sample_index, RngStream};
use crate::spin::Direction;

/// Classification tolerance for Bell violations and LHV nonnegativity.
pub const TOL_BELL: f64 = 1e-9;

/// Selects one of the three measurement directions of a triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Setting {
    /// Direction `a`.
    A,
    /// Direction `b`.
    B,
    /// Direction `c`.
    C,
}

/// Three measurement directions shared by both sides of the experiment.
#[derive(Debug, Clone, Serialize)]
pub struct DirectionTriple {
    a: Direction,
    b: Direction,
    c: Direction,
}

impl DirectionTriple {
    /// Triple from three explicit directions.
    pub fn new(a: Direction, b: Direction, c: Direction) -> Self {
        Self { a, b, c }
    }

    /// Coplanar triple in the x-z plane: `a` along +z, `b` at `theta_ab`
    /// from `a`, `c` at `theta_ab + theta_bc` from `a`.
    pub fn coplanar(theta_ab: f64, theta_bc: f64) -> Result<Self> {
        for (name, value) in [("theta_ab", theta_ab), ("theta_bc", theta_bc)] {
            if !value.is_finite() || value < 0.0 {
                return Err(QmError::InvalidArgument(format!(
                    "{name} must be a nonnegative angle, got {value}"
                )));
            }
        }
        let dir = |t: f64| Direction::from_xyz(t.sin(), 0.0, t.cos());
        Ok(Self {
            a: dir(0.0)?,
            b: dir(theta_ab)?,
            c: dir(theta_ab + theta_bc)?,
        })
    }

    /// Direction `a`.
    pub fn a(&self) -> &Direction {
        &self.a
    }

    /// Direction `b`.
    pub fn b(&self) -> &Direction {
        &self.b
    }

    /// Direction `c`.
    pub fn c(&self) -> &Direction {
        &self.c
    }

    /// The direction selected by a setting.
    pub fn direction(&self, which: Setting) -> &Direction {
        match which {
            Setting::A => &self.a,
            Setting::B => &self.b,
            Setting::C => &self.c,
        }
    }

    /// Geometric angles `(theta_ab, theta_bc, theta_ac)` between the pairs.
    pub fn angles(&self) -> (f64, f64, f64) {
        (
            self.a.angle_between(&self.b),
            self.b.angle_between(&self.c),
            self.a.angle_between(&self.c),
        )
    }
}

/// Index of the deterministic configuration `(s_a, s_b, s_c; t_a, t_b, t_c)`,
/// where the `s` values are spin A's components along `a, b, c` and the `t`
/// values spin B's. `+` maps to bit 0, `-` to bit 1, `s_a` is the highest
/// bit and `t_c` the lowest.
pub fn config_index(s: [Sign; 3], t: [Sign; 3]) -> usize {
    s[0].index() << 5
        | s[1].index() << 4
        | s[2].index() << 3
        | t[0].index() << 2
        | t[1].index() << 1
        | t[2].index()
}

/// Classical joint distribution over the 64 deterministic configurations of
/// both particles' three spin components.
#[derive(Debug, Clone)]
pub struct JointDistribution {
    weights: [f64; 64],
}

impl JointDistribution {
    /// Validates nonnegativity and normalization.
    pub fn new(weights: [f64; 64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(QmError::InvalidWeights {
                sum: weights.iter().sum(),
            });
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(QmError::InvalidWeights { sum });
        }
        Ok(Self { weights })
    }

    /// All 64 configurations equally likely.
    pub fn uniform() -> Self {
        Self {
            weights: [1.0 / 64.0; 64],
        }
    }

    /// All weight on one configuration.
    pub fn point_mass(config: usize) -> Result<Self> {
        if config >= 64 {
            return Err(QmError::IndexOutOfRange {
                index: config,
                dim: 64,
            });
        }
        let mut weights = [0.0; 64];
        weights[config] = 1.0;
        Ok(Self { weights })
    }

    /// Distribution supported on the 8 anticorrelated configurations, where
    /// spin B's value is the negation of spin A's on every direction.
    ///
    /// `q[k]` weights the configuration whose spin-A values are read from
    /// the bits of `k` (`s_a` the 4s bit, `s_c` the 1s bit, 0 meaning `+`),
    /// so `k = 0` is `(+,+,+; -,-,-)` and `k = 7` is `(-,-,-; +,+,+)`.
    pub fn from_anticorrelated(q: [f64; 8]) -> Result<Self> {
        if q.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(QmError::InvalidWeights { sum: q.iter().sum() });
        }
        let sum: f64 = q.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(QmError::InvalidWeights { sum });
        }
        let mut weights = [0.0; 64];
        for (k, w) in q.iter().enumerate() {
            weights[(k << 3) | (!k & 0b111)] = *w;
        }
        Ok(Self { weights })
    }

    /// Weight of one configuration.
    pub fn weight(&self, config: usize) -> f64 {
        self.weights[config]
    }

    /// All 64 weights.
    pub fn weights(&self) -> &[f64; 64] {
        &self.weights
    }
}

fn s_bit(config: usize, which: Setting) -> usize {
    let shift = match which {
        Setting::A => 5,
        Setting::B => 4,
        Setting::C => 3,
    };
    (config >> shift) & 1
}

fn t_bit(config: usize, which: Setting) -> usize {
    let shift = match which {
        Setting::A => 2,
        Setting::B => 1,
        Setting::C => 0,
    };
    (config >> shift) & 1
}

/// Pairwise marginal `p(sign_a first; sign_b second)`: the probability that
/// spin A's component along the first direction and spin B's along the
/// second carry the given signs, summed over all unconstrained slots.
pub fn marginal_pair(
    dist: &JointDistribution,
    first: Setting,
    second: Setting,
    signs: (Sign, Sign),
) -> f64 {
    (0..64)
        .filter(|&cfg| s_bit(cfg, first) == signs.0.index() && t_bit(cfg, second) == signs.1.index())
        .map(|cfg| dist.weights[cfg])
        .sum()
}

/// The Bell combination evaluated on a distribution or on the singlet.
#[derive(Debug, Clone, Serialize)]
pub struct BellResult {
    /// Value of `p(+a;+b) + p(+b;+c) - p(+a;+c)`.
    pub lhs: f64,
    /// Whether the value is negative beyond [`TOL_BELL`].
    pub violated: bool,
    /// The directions the combination refers to.
    pub triple: DirectionTriple,
}

/// Evaluates `p(+a;+b) + p(+b;+c) - p(+a;+c)` on a classical distribution.
///
/// For every distribution supported on the anticorrelated configurations the
/// result is nonnegative; a negative quantum value therefore certifies that
/// no such classical assignment exists.
pub fn classical_bell_check(dist: &JointDistribution, t: &DirectionTriple) -> BellResult {
    let pp = (Sign::Plus, Sign::Plus);
    let lhs = marginal_pair(dist, Setting::A, Setting::B, pp)
        + marginal_pair(dist, Setting::B, Setting::C, pp)
        - marginal_pair(dist, Setting::A, Setting::C, pp);
    BellResult {
        lhs,
        violated: lhs < -TOL_BELL,
        triple: t.clone(),
    }
}

/// The quantum value of `p(+a;+b) + p(+b;+c) - p(+a;+c)` for the singlet,
/// equal to `(1/2)[sin^2(th_ab/2) + sin^2(th_bc/2) - sin^2(th_ac/2)]`.
///
/// Evaluated twice, from the joint-probability law and from the closed form;
/// the two routes must agree within 1e-12 or the call fails, since a
/// mismatch can only mean an implementation bug.
pub fn quantum_bell_lhs(t: &DirectionTriple) -> Result<f64> {
    let pp = Sign::Plus;
    let from_joint = singlet_joint_prob(pp, &t.a, pp, &t.b)
        + singlet_joint_prob(pp, &t.b, pp, &t.c)
        - singlet_joint_prob(pp, &t.a, pp, &t.c);
    let (th_ab, th_bc, th_ac) = t.angles();
    let half_sin_sqr = |th: f64| (th / 2.0).sin().powi(2);
    let closed = 0.5 * (half_sin_sqr(th_ab) + half_sin_sqr(th_bc) - half_sin_sqr(th_ac));
    let delta = (from_joint - closed).abs();
    if delta > 1e-12 {
        return Err(QmError::CrossCheck {
            what: "bell lhs dual evaluation",
            delta,
        });
    }
    Ok(closed)
}

/// Violated-constraint certificate for an infeasible direction triple.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    /// The pairwise combination the constraints force to be nonnegative.
    pub combination: String,
    /// Spin-A sign patterns of the two anticorrelated configurations whose
    /// weights must sum to the combination.
    pub forced_configs: [String; 2],
    /// The forced weight sum; negative exactly when infeasible.
    pub forced_sum: f64,
    /// Largest minimum component over all basic solutions of the system.
    pub best_vertex_min: f64,
}

/// Result of the local-hidden-variable feasibility test.
#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    /// Whether nonnegative anticorrelated weights reproduce the three
    /// pairwise quantum probabilities.
    pub feasible: bool,
    /// Witness weights over the 8 anticorrelated configurations (ordering of
    /// [`JointDistribution::from_anticorrelated`]) when feasible.
    pub weights: Option<[f64; 8]>,
    /// Violated-constraint certificate when infeasible.
    pub certificate: Option<Certificate>,
    /// The quantum value of the Bell combination for reference.
    pub quantum_lhs: f64,
}

fn solve4(a: &[[f64; 4]; 4], rhs: &[f64; 4]) -> Option<[f64; 4]> {
    let mut aug = [[0.0; 5]; 4];
    for i in 0..4 {
        aug[i][..4].copy_from_slice(&a[i]);
        aug[i][4] = rhs[i];
    }
    for col in 0..4 {
        let mut pivot = col;
        for row in col + 1..4 {
            if aug[row][col].abs() > aug[pivot][col].abs() {
                pivot = row;
            }
        }
        if aug[pivot][col].abs() < 1e-10 {
            return None;
        }
        aug.swap(col, pivot);
        for row in 0..4 {
            if row != col {
                let factor = aug[row][col] / aug[col][col];
                for j in col..5 {
                    aug[row][j] -= factor * aug[col][j];
                }
            }
        }
    }
    let mut x = [0.0; 4];
    for i in 0..4 {
        x[i] = aug[i][4] / aug[i][i];
    }
    Some(x)
}

/// Decides whether some nonnegative distribution over the 8 anticorrelated
/// configurations reproduces the singlet's three pairwise probabilities
/// `p(+a;+b)`, `p(+b;+c)`, `p(+a;+c)` for the given triple.
///
/// Solves the four-equation linear system (three pairwise targets plus
/// normalization) by enumerating every basic solution of the 8-weight
/// polytope; the verdict is INFEASIBLE exactly when the quantum Bell
/// combination is negative beyond [`TOL_BELL`]. Degenerate triples with
/// coinciding directions stay solvable.
pub fn lhv_feasibility(t: &DirectionTriple) -> Result<FeasibilityReport> {
    let quantum_lhs = quantum_bell_lhs(t)?;
    let pp = Sign::Plus;
    let alpha = singlet_joint_prob(pp, &t.a, pp, &t.b);
    let beta = singlet_joint_prob(pp, &t.b, pp, &t.c);
    let gamma = singlet_joint_prob(pp, &t.a, pp, &t.c);

    let mut rows = [[0.0_f64; 8]; 4];
    for k in 0..8 {
        let s_a = (k >> 2) & 1;
        let s_b = (k >> 1) & 1;
        let s_c = k & 1;
        rows[0][k] = 1.0;
        if s_a == 0 && s_b == 1 {
            rows[1][k] = 1.0;
        }
        if s_b == 0 && s_c == 1 {
            rows[2][k] = 1.0;
        }
        if s_a == 0 && s_c == 1 {
            rows[3][k] = 1.0;
        }
    }
    let rhs = [1.0, alpha, beta, gamma];

    let mut best_min = f64::NEG_INFINITY;
    let mut best_q = [0.0; 8];
    for i0 in 0..8 {
        for i1 in i0 + 1..8 {
            for i2 in i1 + 1..8 {
                for i3 in i2 + 1..8 {
                    let cols = [i0, i1, i2, i3];
                    let mut a = [[0.0; 4]; 4];
                    for r in 0..4 {
                        for (slot, &ci) in cols.iter().enumerate() {
                            a[r][slot] = rows[r][ci];
                        }
                    }
                    let Some(x) = solve4(&a, &rhs) else { continue };
                    let residual_ok = (0..4).all(|r| {
                        let lhs: f64 = (0..4).map(|s| a[r][s] * x[s]).sum();
                        (lhs - rhs[r]).abs() <= 1e-10
                    });
                    if !residual_ok {
                        continue;
                    }
                    let min_comp = x.iter().copied().fold(f64::INFINITY, f64::min);
                    if min_comp > best_min {
                        best_min = min_comp;
                        best_q = [0.0; 8];
                        for (slot, &ci) in cols.iter().enumerate() {
                            best_q[ci] = x[slot];
                        }
                    }
                }
            }
        }
    }

    if best_min >= -TOL_BELL {
        let mut weights = best_q.map(|w| if w <= 0.0 { 0.0 } else { w });
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        Ok(FeasibilityReport {
            feasible: true,
            weights: Some(weights),
            certificate: None,
            quantum_lhs,
        })
    } else {
        Ok(FeasibilityReport {
            feasible: false,
            weights: None,
            certificate: Some(Certificate {
                combination: "p(+a;+b) + p(+b;+c) - p(+a;+c)".into(),
                forced_configs: ["+-+".into(), "-+-".into()],
                forced_sum: alpha + beta - gamma,
                best_vertex_min: best_min,
            }),
            quantum_lhs,
        })
    }
}

/// One grid point of a coplanar Bell scan.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    /// Angle between `a` and `b`.
    pub theta_ab: f64,
    /// Angle between `b` and `c`.
    pub theta_bc: f64,
    /// Angle between `a` and `c`, the sum of the other two.
    pub theta_ac: f64,
    /// Quantum Bell combination at this point.
    pub lhs: f64,
    /// Whether the combination is negative beyond [`TOL_BELL`].
    pub violated: bool,
}

/// Full grid of a coplanar Bell scan with its minimum.
#[derive(Debug, Clone, Serialize)]
pub struct ScanResult {
    /// All grid points in row-major `(theta_ab, theta_bc)` order.
    pub rows: Vec<ScanRow>,
    /// Smallest lhs found.
    pub min_lhs: f64,
    /// `theta_ab` at the minimum.
    pub min_theta_ab: f64,
    /// `theta_bc` at the minimum.
    pub min_theta_bc: f64,
}

/// Sweeps coplanar triples over the grid `theta_ab, theta_bc = step, 2*step,
/// ... <= max_angle` and reports the Bell combination at every point plus
/// the global minimum.
pub fn bell_scan(step: f64, max_angle: f64) -> Result<ScanResult> {
    if !step.is_finite() || step <= 0.0 {
        return Err(QmError::InvalidArgument("step must be positive".into()));
    }
    if !max_angle.is_finite() || max_angle < step {
        return Err(QmError::InvalidArgument(
            "max angle must be at least one step".into(),
        ));
    }
    let steps = ((max_angle + 1e-12) / step).floor() as usize;
    let mut rows = Vec::with_capacity(steps * steps);
    let mut min_lhs = f64::INFINITY;
    let mut min_theta_ab = 0.0;
    let mut min_theta_bc = 0.0;
    for i in 1..=steps {
        let theta_ab = i as f64 * step;
        for j in 1..=steps {
            let theta_bc = j as f64 * step;
            let triple = DirectionTriple::coplanar(theta_ab, theta_bc)?;
            let lhs = quantum_bell_lhs(&triple)?;
            if lhs < min_lhs {
                min_lhs = lhs;
                min_theta_ab = theta_ab;
                min_theta_bc = theta_bc;
            }
            rows.push(ScanRow {
                theta_ab,
                theta_bc,
                theta_ac: theta_ab + theta_bc,
                lhs,
                violated: lhs < -TOL_BELL,
            });
        }
    }
    Ok(ScanResult {
        rows,
        min_lhs,
        min_theta_ab,
        min_theta_bc,
    })
}

/// CSV rendering of a scan, with header `theta_ab,theta_bc,theta_ac,lhs,violated`.
pub fn scan_csv(result: &ScanResult) -> String {
    let mut out = String::from("theta_ab,theta_bc,theta_ac,lhs,violated\n");
    for row in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            crate::jsonfmt::fmt_f64_17(row.theta_ab),
            crate::jsonfmt::fmt_f64_17(row.theta_bc),
            crate::jsonfmt::fmt_f64_17(row.theta_ac),
            crate::jsonfmt::fmt_f64_17(row.lhs),
            row.violated
        ));
    }
    out
}

/// Monte Carlo estimate of the singlet's 2x2 joint outcome table for one
/// direction pair, rows indexed by `eps_a` and columns by `eps_b`, `+`
/// before `-`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McJointEstimate {
    /// Outcome counts `N(eps_a; eps_b)`.
    pub counts: [[u64; 2]; 2],
    /// Outcome frequencies `N(eps_a; eps_b) / N`.
    pub ratios: [[f64; 2]; 2],
    /// Total samples drawn.
    pub shots: u64,
    /// Seed of the stream that produced the counts.
    pub seed: u64,
}

/// Samples `shots` joint outcomes of singlet measurements along `(a, b)`
/// from the exact four-point law, in the fixed outcome order
/// `(++, +-, -+, --)`. Zero-probability outcomes are never produced.
pub fn mc_singlet_joint(
    a: &Direction,
    b: &Direction,
    shots: u64,
    rng: &mut RngStream,
) -> Result<McJointEstimate> {
    if shots == 0 {
        return Err(QmError::InvalidArgument("shots must be at least 1".into()));
    }
    let state = singlet();
    let mut probs = [0.0; 4];
    for ea in Sign::BOTH {
        for eb in Sign::BOTH {
            probs[2 * ea.index() + eb.index()] = joint_prob_general(&state, ea, a, eb, b);
        }
    }
    let mut counts = [[0u64; 2]; 2];
    for _ in 0..shots {
        let k = sample_index(&probs, rng);
        counts[k / 2][k % 2] += 1;
    }
    let ratios = counts.map(|row| row.map(|n| n as f64 / shots as f64));
    Ok(McJointEstimate {
        counts,
        ratios,
        shots,
        seed: rng.seed(),
    })
}
