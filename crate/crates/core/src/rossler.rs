//! Continuous Rössler system, integrated with fixed-step RK4. Used only to
//! produce the reference attractor the discrete map is derived from.

use crate::error::{Error, Result};
use crate::model::DEFAULT_DIVERGENCE_BOUND;

pub type Vec3 = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RosslerParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for RosslerParams {
    fn default() -> Self {
        Self { a: 0.2, b: 0.2, c: 5.7 }
    }
}

pub const DEFAULT_DT: f64 = 0.01;

pub fn rossler_derivative(state: Vec3, params: &RosslerParams) -> Vec3 {
    let [x, y, z] = state;
    [-y - z, x + params.a * y, params.b + z * (x - params.c)]
}

fn axpy(base: Vec3, scale: f64, dir: Vec3) -> Vec3 {
    [
        base[0] + scale * dir[0],
        base[1] + scale * dir[1],
        base[2] + scale * dir[2],
    ]
}

pub fn rk4_step(state: Vec3, params: &RosslerParams, dt: f64) -> Vec3 {
    let k1 = rossler_derivative(state, params);
    let k2 = rossler_derivative(axpy(state, dt / 2.0, k1), params);
    let k3 = rossler_derivative(axpy(state, dt / 2.0, k2), params);
    let k4 = rossler_derivative(axpy(state, dt, k3), params);
    let mut out = state;
    for i in 0..3 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Returns `steps + 1` points starting at `initial`.
pub fn rossler_integrate(initial: Vec3, params: &RosslerParams, dt: f64, steps: usize) -> Result<Vec<Vec3>> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::invalid("dt must be positive and finite"));
    }
    if steps == 0 {
        return Err(Error::invalid("steps must be at least 1"));
    }
    if initial.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("initial state must be finite"));
    }
    let mut points = Vec::with_capacity(steps + 1);
    points.push(initial);
    let mut state = initial;
    for step in 1..=steps {
        state = rk4_step(state, params, dt);
        if !state.iter().all(|v| v.abs() <= DEFAULT_DIVERGENCE_BOUND) {
            return Err(Error::Diverged {
                step,
                state: crate::model::NdsState::new(state[0], state[1], state[2]),
            });
        }
        points.push(state);
    }
    Ok(points)
}
