//! Discretized spacetime trajectories and the invariants computed along them.
//!
//! Everything is in natural units (`c = 1`) with one spatial dimension. A
//! [`Trajectory`] is piecewise linear: between grid nodes the particle moves
//! with constant velocity, so segment contributions are exact.
//!
//! Two invariants are available, selected by [`InvariantMode`]:
//!
//! * proper time, `m * sum(dt * sqrt(1 - v^2))`;
//! * negative action, `-sum(dt * (m v^2 / 2 - V(x_mid)))`, with the potential
//!   sampled at each segment midpoint.
//!
//! The coupling constant is not part of the invariant; it travels with the
//! [`InvariantVector`] so one invariant computation serves any coupling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sampled path `x(t)` on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    times: Vec<f64>,
    positions: Vec<f64>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, positions: Vec<f64>) -> Result<Self> {
        if times.len() != positions.len() {
            return Err(Error::LengthMismatch {
                times: times.len(),
                positions: positions.len(),
            });
        }
        if times.len() < 2 {
            return Err(Error::DegenerateGrid(times.len()));
        }
        if let Some(i) = times.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::NonIncreasingTimes(i + 1));
        }
        Ok(Self { times, positions })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn start(&self) -> (f64, f64) {
        (self.times[0], self.positions[0])
    }

    pub fn end(&self) -> (f64, f64) {
        let last = self.times.len() - 1;
        (self.times[last], self.positions[last])
    }

    /// Iterates over segments as `(dt, dx, x_mid)`.
    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.times
            .windows(2)
            .zip(self.positions.windows(2))
            .map(|(t, x)| Segment {
                dt: t[1] - t[0],
                dx: x[1] - x[0],
                midpoint: 0.5 * (x[0] + x[1]),
            })
    }

    /// Joins `self` (ending at the junction) with `next` (starting there).
    /// The junction node appears once in the result.
    pub fn concat(&self, next: &Trajectory) -> Result<Trajectory> {
        if self.end() != next.start() {
            return Err(Error::JunctionMismatch);
        }
        let mut times = self.times.clone();
        let mut positions = self.positions.clone();
        times.extend_from_slice(&next.times[1..]);
        positions.extend_from_slice(&next.positions[1..]);
        Ok(Trajectory { times, positions })
    }

    /// Splits at an interior node; both halves contain that node.
    pub fn split_at(&self, node: usize) -> Result<(Trajectory, Trajectory)> {
        if node == 0 || node + 1 >= self.len() {
            // one of the halves would have a single node
            return Err(Error::DegenerateGrid(1));
        }
        let head = Trajectory {
            times: self.times[..=node].to_vec(),
            positions: self.positions[..=node].to_vec(),
        };
        let tail = Trajectory {
            times: self.times[node..].to_vec(),
            positions: self.positions[node..].to_vec(),
        };
        Ok((head, tail))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub dt: f64,
    pub dx: f64,
    pub midpoint: f64,
}

impl Segment {
    pub fn velocity(&self) -> f64 {
        self.dx / self.dt
    }
}

/// Uniform grid from `(t0, x0)` to `(t1, x1)` with `segments + 1` nodes.
pub fn straight_line(t0: f64, x0: f64, t1: f64, x1: f64, segments: usize) -> Result<Trajectory> {
    if !(t1 > t0) {
        return Err(Error::BadInterval { start: t0, end: t1 });
    }
    let segments = segments.max(1);
    let nodes = segments + 1;
    let mut times = Vec::with_capacity(nodes);
    let mut positions = Vec::with_capacity(nodes);
    for k in 0..nodes {
        if k == segments {
            times.push(t1);
            positions.push(x1);
        } else {
            let s = k as f64 / segments as f64;
            times.push(t0 + s * (t1 - t0));
            positions.push(x0 + s * (x1 - x0));
        }
    }
    Trajectory::new(times, positions)
}

/// Which path invariant the particle carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvariantMode {
    RelativisticProperTime,
    NonrelativisticAction,
}

impl InvariantMode {
    fn name(self) -> &'static str {
        match self {
            InvariantMode::RelativisticProperTime => "relativistic-proper-time",
            InvariantMode::NonrelativisticAction => "nonrelativistic-action",
        }
    }
}

/// Polynomial potential `V(x) = sum_k c_k x^k`, serialized as the coefficient
/// list in ascending order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Potential {
    pub coefficients: Vec<f64>,
}

impl Potential {
    pub fn new(coefficients: Vec<f64>) -> Self {
        Self { coefficients }
    }

    /// `V(x) = strength * x^2`.
    pub fn quadratic(strength: f64) -> Self {
        Self::new(vec![0.0, 0.0, strength])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleParams {
    pub mass: f64,
    pub mode: InvariantMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<Potential>,
}

impl ParticleParams {
    pub fn relativistic(mass: f64) -> Result<Self> {
        Self::new(mass, InvariantMode::RelativisticProperTime, None)
    }

    pub fn nonrelativistic(mass: f64, potential: Option<Potential>) -> Result<Self> {
        Self::new(mass, InvariantMode::NonrelativisticAction, potential)
    }

    pub fn new(mass: f64, mode: InvariantMode, potential: Option<Potential>) -> Result<Self> {
        let params = Self {
            mass,
            mode,
            potential,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::NonPositiveMass(self.mass));
        }
        Ok(())
    }

    fn require(&self, mode: InvariantMode) -> Result<()> {
        self.validate()?;
        if self.mode != mode {
            return Err(Error::ModeMismatch {
                requested: mode.name(),
                configured: self.mode.name(),
            });
        }
        Ok(())
    }
}

/// `mass * sum(dt * sqrt(1 - v^2))` over piecewise-constant velocities.
pub fn proper_time_invariant(traj: &Trajectory, params: &ParticleParams) -> Result<f64> {
    params.require(InvariantMode::RelativisticProperTime)?;
    let mut total = 0.0;
    for (i, seg) in traj.segments().enumerate() {
        let v = seg.velocity();
        if !(v.abs() < 1.0) {
            return Err(Error::SuperluminalSegment {
                segment: i,
                speed: v.abs(),
            });
        }
        total += seg.dt * (1.0 - v * v).sqrt();
    }
    Ok(params.mass * total)
}

/// Negative classical action with the potential sampled at segment midpoints.
pub fn action_invariant(traj: &Trajectory, params: &ParticleParams) -> Result<f64> {
    params.require(InvariantMode::NonrelativisticAction)?;
    let potential = params.potential.as_ref();
    let action: f64 = traj
        .segments()
        .map(|seg| {
            let v = seg.velocity();
            let kinetic = 0.5 * params.mass * v * v;
            let pot = potential.map_or(0.0, |p| p.eval(seg.midpoint));
            seg.dt * (kinetic - pot)
        })
        .sum();
    Ok(-action)
}

/// Dispatches on `params.mode`.
pub fn invariant(traj: &Trajectory, params: &ParticleParams) -> Result<f64> {
    match params.mode {
        InvariantMode::RelativisticProperTime => proper_time_invariant(traj, params),
        InvariantMode::NonrelativisticAction => action_invariant(traj, params),
    }
}

/// The `n` path invariants together with the coupling `kappa`; the argument of
/// every multi-path probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantVector {
    pub phis: Vec<f64>,
    pub kappa: f64,
}

impl InvariantVector {
    pub fn new(phis: Vec<f64>, kappa: f64) -> Result<Self> {
        if phis.is_empty() {
            return Err(Error::EmptyVector);
        }
        if !kappa.is_finite() {
            return Err(Error::NonFiniteKappa(kappa));
        }
        Ok(Self { phis, kappa })
    }

    /// Invariants of several trajectories under one particle model.
    pub fn from_trajectories<'a, I>(paths: I, params: &ParticleParams, kappa: f64) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Trajectory>,
    {
        let phis = paths
            .into_iter()
            .map(|t| invariant(t, params))
            .collect::<Result<Vec<_>>>()?;
        Self::new(phis, kappa)
    }

    pub fn len(&self) -> usize {
        self.phis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phis.is_empty()
    }

    pub fn negated(&self) -> Self {
        Self {
            phis: self.phis.iter().map(|p| -p).collect(),
            kappa: self.kappa,
        }
    }

    pub fn shifted(&self, by: f64) -> Self {
        Self {
            phis: self.phis.iter().map(|p| p + by).collect(),
            kappa: self.kappa,
        }
    }
}
