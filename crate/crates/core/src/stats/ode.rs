//! Deterministic oracles for the drift: RK4 flow and damped Newton.

use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::theory::linalg::{self, norm, Vec2};
use crate::theory::{drift_at, fixed_points, jacobian_at, MemoryParam, SimplexPoint, ZeroKind};

/// Slack on the simplex allowed along a numerical flow line.
pub const ODE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeSample {
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeTrajectory {
    pub start: SimplexPoint,
    pub samples: Vec<OdeSample>,
    pub terminal: SimplexPoint,
    pub nearest: ZeroKind,
    pub distance: f64,
}

fn rk4(p: MemoryParam, x: Vec2, dt: f64) -> Vec2 {
    let f = |y: Vec2| drift_at(p, y);
    let k1 = f(x);
    let k2 = f([x[0] + 0.5 * dt * k1[0], x[1] + 0.5 * dt * k1[1]]);
    let k3 = f([x[0] + 0.5 * dt * k2[0], x[1] + 0.5 * dt * k2[1]]);
    let k4 = f([x[0] + dt * k3[0], x[1] + dt * k3[1]]);
    [0, 1].map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Integrates `dx/dt = h_p(x)` from `x0` to `t_end` with classic RK4,
/// keeping every `sample_every`-th state (and always the last one).
pub fn ode_integrate(
    p: MemoryParam,
    x0: SimplexPoint,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<OdeTrajectory, StatsError> {
    if !x0.in_simplex(0.0) {
        return Err(StatsError::LeftSimplex { t: 0.0, x1: x0.x1, x2: x0.x2 });
    }
    if !(dt > 0.0 && t_end >= 0.0) {
        return Err(StatsError::Degenerate(format!("bad step dt = {dt}, T = {t_end}")));
    }
    let steps = (t_end / dt).round() as usize;
    let every = sample_every.max(1);
    let mut x = x0.as_vec();
    let mut samples = vec![OdeSample { t: 0.0, x1: x[0], x2: x[1] }];
    for k in 1..=steps {
        x = rk4(p, x, dt);
        let t = k as f64 * dt;
        let pt = SimplexPoint { x1: x[0], x2: x[1] };
        if !pt.in_simplex(ODE_SLACK) {
            return Err(StatsError::LeftSimplex { t, x1: x[0], x2: x[1] });
        }
        if k % every == 0 || k == steps {
            samples.push(OdeSample { t, x1: x[0], x2: x[1] });
        }
    }
    let terminal = SimplexPoint { x1: x[0], x2: x[1] };
    let zeros = fixed_points(p)?;
    let (nearest, distance) = zeros
        .reports
        .iter()
        .map(|r| (r.kind, r.location.distance(&terminal)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least two zeros");
    Ok(OdeTrajectory {
        start: x0,
        samples,
        terminal,
        nearest,
        distance,
    })
}

/// `m²` interior starts: cell centres `(a, b)` of the unit square mapped to
/// `(a(1-b), ab)`, which covers the simplex.
pub fn ode_start_grid(m: usize) -> Vec<SimplexPoint> {
    let mut out = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let a = (i as f64 + 0.5) / m as f64;
            let b = (j as f64 + 0.5) / m as f64;
            out.push(SimplexPoint { x1: a * (1.0 - b), x2: a * b });
        }
    }
    out
}

/// Off the diagonal `x₁ = x₂`, which is invariant under the flow.
pub fn is_generic_start(x: &SimplexPoint) -> bool {
    (x.x1 - x.x2).abs() > 1e-12
}

/// Newton iteration on `h_p` with step halving, from every start of an
/// `m × m` grid. Roots inside the simplex are kept, pairwise more than
/// `1e-6` apart. Starts that do not converge are dropped.
pub fn newton_fixed_points(p: MemoryParam, m: usize) -> Vec<SimplexPoint> {
    let mut roots: Vec<SimplexPoint> = Vec::new();
    for start in ode_start_grid(m) {
        let Some(r) = newton_from(p, start.as_vec()) else { continue };
        let r = SimplexPoint { x1: r[0], x2: r[1] };
        if r.in_simplex(ODE_SLACK) && roots.iter().all(|q| q.distance(&r) > 1e-6) {
            roots.push(r);
        }
    }
    roots.sort_by(|a, b| a.x1.total_cmp(&b.x1).then(a.x2.total_cmp(&b.x2)));
    roots
}

fn newton_from(p: MemoryParam, mut x: Vec2) -> Option<Vec2> {
    let mut h = drift_at(p, x);
    for _ in 0..200 {
        let r = norm(h);
        if r < 1e-15 {
            return Some(x);
        }
        let delta = linalg::solve(&jacobian_at(p, x), h).ok()?;
        let mut t = 1.0;
        loop {
            let y = [x[0] - t * delta[0], x[1] - t * delta[1]];
            let hy = drift_at(p, y);
            if norm(hy) < r || t < 1e-10 {
                let moved = t * norm(delta);
                x = y;
                h = hy;
                if moved < 1e-16 * (1.0 + norm(x)) {
                    return (norm(h) < 1e-12).then_some(x);
                }
                break;
            }
            t *= 0.5;
        }
        if !x[0].is_finite() || !x[1].is_finite() || norm(x) > 1e6 {
            return None;
        }
    }
    (norm(h) < 1e-12).then_some(x)
}
