//! Monte Carlo estimators built on the mean-value identities.
//!
//! The log weight `log(r/|x−y|)`, normalized by `ω_d r^d/d`, is a
//! probability density on the ball whose radial CDF
//! `F(s) = (s/r)^d (1 + d·log(r/s))` is known in closed form; sampling it
//! by inverse transform gives an unbiased one-step estimator of `u(x)` for
//! harmonic `u`. The same measure drives a walk-on-balls Dirichlet solver
//! (interior jumps), run side by side with classical walk-on-spheres
//! (jumps to the maximal inscribed sphere).
//!
//! Walks are independent; each draws from a counter-based stream keyed by
//! `(seed, walk index)` and the final reduction is pairwise in walk order,
//! so estimates are bit-identical across runs and thread counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Classification, ScalarField};
use crate::quadrature::{norm, pairwise_sum_by, BallSpec};
use crate::rng::CounterRng;

/// Jump radius policy for the Dirichlet solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RPolicy {
    /// Jump radius = distance to the boundary (classical).
    DistanceToBoundary,
    /// Fixed radius, clamped to the distance to the boundary.
    Fixed(f64),
}

/// Monte Carlo run parameters.
#[derive(Debug, Clone)]
pub struct WalkConfig {
    pub n_walks: usize,
    /// Boundary capture distance; `None` resolves to `1e−4·(domain radius)`.
    pub eps_shell: Option<f64>,
    pub max_steps: usize,
    pub seed: u64,
    pub r_policy: RPolicy,
}

impl WalkConfig {
    pub fn new(n_walks: usize, seed: u64) -> Self {
        WalkConfig {
            n_walks,
            eps_shell: None,
            max_steps: 10_000,
            seed,
            r_policy: RPolicy::DistanceToBoundary,
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps_shell = Some(eps);
        self
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    fn validate(&self, domain_radius: f64) -> Result<f64> {
        if self.n_walks < 1 {
            return Err(Error::Config("walk config: n_walks must be ≥ 1".into()));
        }
        if self.max_steps < 1 {
            return Err(Error::Config("walk config: max_steps must be ≥ 1".into()));
        }
        let eps = self.eps_shell.unwrap_or(1e-4 * domain_radius);
        if !eps.is_finite() || eps <= 0.0 || eps >= domain_radius {
            return Err(Error::Config(format!(
                "walk config: eps_shell must lie in (0, domain radius), got {eps}"
            )));
        }
        Ok(eps)
    }
}

/// A Monte Carlo estimate with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    /// Sample standard deviation divided by `√n_effective`.
    pub std_error: f64,
    pub n_effective: u64,
    pub walks_truncated: u64,
    pub mean_steps: f64,
}

/// Radial CDF of the normalized log weight:
/// `F(s) = (s/r)^d (1 + d·log(r/s))`, the probability that a sample from
/// the log-weighted ball measure has radius ≤ `s`.
pub fn radial_cdf(d: usize, r: f64, s: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::Domain("radial_cdf: d must be ≥ 2".into()));
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::Domain(format!("radial_cdf: radius must be positive, got {r}")));
    }
    if !(0.0..=r).contains(&s) {
        return Err(Error::Domain(format!("radial_cdf: s = {s} outside [0, {r}]")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let t = s / r;
    Ok(t.powi(d as i32) * (1.0 - d as f64 * t.ln()))
}

/// Invert the radial CDF: the radius `s ∈ [0, r]` with `F(s) = u`.
///
/// Solves `t^d(1 − d·log t) = u` by bisection-seeded Newton with a
/// bracket fallback (`F′` vanishes at `t = 1`, so bare Newton is unsafe
/// there); tolerance 1e−12 in `t = s/r`.
pub fn sample_radius(d: usize, r: f64, u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!("sample_radius: u = {u} outside [0, 1]")));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    if u == 1.0 {
        return Ok(r);
    }
    let df = d as f64;
    let g = |t: f64| t.powi(d as i32) * (1.0 - df * t.ln()) - u;

    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    for _ in 0..20 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..100 {
        let gt = g(t);
        if gt < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let slope = -df * df * t.powi(d as i32 - 1) * t.ln();
        let mut next = if slope > 0.0 { t - gt / slope } else { 0.5 * (lo + hi) };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() <= 1e-12 || hi - lo <= 1e-13 {
            return Ok(r * next);
        }
        t = next;
    }
    // F is strictly increasing on (0, 1); the bracket always converges.
    Err(Error::Internal(format!("radial inverse CDF did not converge for d={d}, u={u}")))
}

/// Uniform direction on the unit sphere `S^{d−1}`.
pub fn sample_unit_sphere(d: usize, rng: &mut CounterRng) -> Vec<f64> {
    let mut v = vec![0.0; d];
    loop {
        rng.fill_normals(&mut v);
        let n = norm(&v);
        if n > 1e-12 {
            for x in &mut v {
                *x /= n;
            }
            return v;
        }
    }
}

/// Draw an offset from the log-weighted measure on the centered ball
/// `D_r(0)`: radius by inverse transform of [`radial_cdf`], direction
/// uniform on the sphere.
pub fn sample_log_ball(d: usize, r: f64, rng: &mut CounterRng) -> Result<Vec<f64>> {
    if d < 2 {
        return Err(Error::Domain("sample_log_ball: d must be ≥ 2".into()));
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::Domain(format!("sample_log_ball: radius must be positive, got {r}")));
    }
    let s = sample_radius(d, r, rng.uniform())?;
    let mut dir = sample_unit_sphere(d, rng);
    for x in &mut dir {
        *x *= s;
    }
    Ok(dir)
}

/// Deterministic reduction of per-walk scores into an [`Estimate`].
fn reduce_walks(scores: &[(f64, u32, bool)]) -> Estimate {
    let n = scores.len() as f64;
    let value = pairwise_sum_by(scores, |s| s.0) / n;
    let variance = if scores.len() > 1 {
        (pairwise_sum_by(scores, |s| (s.0 - value) * (s.0 - value)) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Estimate {
        value,
        std_error: (variance / n).sqrt(),
        n_effective: scores.len() as u64,
        walks_truncated: scores.iter().filter(|s| s.2).count() as u64,
        mean_steps: pairwise_sum_by(scores, |s| s.1 as f64) / n,
    }
}

/// One application of the log-weighted measure: averages `u` over
/// `n_walks` samples from `sample_log_ball` translated to the ball
/// center — an unbiased estimator of `u(x)` for harmonic `u`.
pub fn estimate_onestep(
    field: &ScalarField,
    ball: &BallSpec,
    cfg: &WalkConfig,
) -> Result<Estimate> {
    if field.classification() != Classification::Harmonic {
        return Err(Error::Misuse(format!(
            "estimate_onestep requires a harmonic field, `{}` is {:?}",
            field.label(),
            field.classification()
        )));
    }
    if field.dim() != ball.dim() {
        return Err(Error::Config(format!(
            "dimension mismatch: field `{}` is {}-dimensional, ball is {}",
            field.label(),
            field.dim(),
            ball.dim()
        )));
    }
    if !field.admits_ball(ball) {
        return Err(Error::Misuse(format!(
            "ball leaves the domain of field `{}`",
            field.label()
        )));
    }
    if cfg.n_walks < 1 {
        return Err(Error::Config("estimate_onestep: n_walks must be ≥ 1".into()));
    }
    let d = ball.dim();
    let scores: Vec<(f64, u32, bool)> = (0..cfg.n_walks)
        .into_par_iter()
        .map(|i| -> Result<(f64, u32, bool)> {
            let mut rng = CounterRng::new(cfg.seed, i as u64);
            let offset = sample_log_ball(d, ball.radius(), &mut rng)?;
            let y: Vec<f64> =
                ball.center().iter().zip(&offset).map(|(c, o)| c + o).collect();
            Ok((field.evaluate(&y), 1, false))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(reduce_walks(&scores))
}

fn validate_solve_inputs(domain: &BallSpec, x: &[f64], cfg: &WalkConfig) -> Result<f64> {
    let eps = cfg.validate(domain.radius())?;
    if x.len() != domain.dim() {
        return Err(Error::Config(format!(
            "query point dimension {} ≠ domain dimension {}",
            x.len(),
            domain.dim()
        )));
    }
    if domain.boundary_distance(x) <= 0.0 {
        return Err(Error::Domain(format!("query point {x:?} is not interior to the domain")));
    }
    Ok(eps)
}

/// Walk-on-spheres Dirichlet solve on a ball domain: from the current
/// point, jump to a uniform point on the maximal inscribed sphere; within
/// `eps_shell` of the boundary, score the boundary data at the nearest
/// boundary point. Walks hitting `max_steps` are scored the same way and
/// counted in `walks_truncated` (discarding them would bias the mean).
pub fn wos_solve(
    domain: &BallSpec,
    boundary_data: &(impl Fn(&[f64]) -> f64 + Sync),
    x: &[f64],
    cfg: &WalkConfig,
) -> Result<Estimate> {
    let eps = validate_solve_inputs(domain, x, cfg)?;
    let scores = run_dirichlet_walks(domain, boundary_data, x, cfg, eps, |pos, r_jump, rng| {
        let dir = sample_unit_sphere(pos.len(), rng);
        for (p, dir_k) in pos.iter_mut().zip(&dir) {
            *p += r_jump * dir_k;
        }
        Ok(())
    })?;
    Ok(reduce_walks(&scores))
}

/// Walk-on-balls Dirichlet solve: identical contract to [`wos_solve`],
/// but each jump draws an interior point of the maximal inscribed ball
/// from the log-weighted measure. Each step is unbiased because the
/// harmonic extension satisfies `u(x) = E[u(Y)]` under that measure;
/// interior jumps are shorter, so walks take more steps on average
/// (measured, reported via `mean_steps`).
pub fn wob_solve(
    domain: &BallSpec,
    boundary_data: &(impl Fn(&[f64]) -> f64 + Sync),
    x: &[f64],
    cfg: &WalkConfig,
) -> Result<Estimate> {
    let eps = validate_solve_inputs(domain, x, cfg)?;
    let scores = run_dirichlet_walks(domain, boundary_data, x, cfg, eps, |pos, r_jump, rng| {
        let offset = sample_log_ball(pos.len(), r_jump, rng)?;
        for (p, o) in pos.iter_mut().zip(&offset) {
            *p += o;
        }
        Ok(())
    })?;
    Ok(reduce_walks(&scores))
}

fn run_dirichlet_walks(
    domain: &BallSpec,
    boundary_data: &(impl Fn(&[f64]) -> f64 + Sync),
    x: &[f64],
    cfg: &WalkConfig,
    eps: f64,
    jump: impl Fn(&mut [f64], f64, &mut CounterRng) -> Result<()> + Sync,
) -> Result<Vec<(f64, u32, bool)>> {
    (0..cfg.n_walks)
        .into_par_iter()
        .map(|i| -> Result<(f64, u32, bool)> {
            let mut rng = CounterRng::new(cfg.seed, i as u64);
            let mut pos = x.to_vec();
            let mut steps = 0u32;
            loop {
                let dist = domain.boundary_distance(&pos);
                if dist <= eps {
                    let p = domain.project_to_boundary(&pos);
                    return Ok((boundary_data(&p), steps, false));
                }
                if steps as usize >= cfg.max_steps {
                    let p = domain.project_to_boundary(&pos);
                    return Ok((boundary_data(&p), steps, true));
                }
                let r_jump = match cfg.r_policy {
                    RPolicy::DistanceToBoundary => dist,
                    RPolicy::Fixed(r) => r.min(dist),
                };
                jump(&mut pos, r_jump, &mut rng)?;
                steps += 1;
            }
        })
        .collect()
}
