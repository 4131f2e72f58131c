//! Catalog of analytic test fields with known classification.
//!
//! Harmonic families (`Δu = 0`), planar panharmonic families
//! (`Δu = μ²u`, `μ ≠ 0`), and the additive-constant counterexample
//! `e^{x₁}sin(x₂) + 3` that is harmonic and nonnegative on the unit disc.
//! Fields constructed for `d > 2` are constant in trailing coordinates,
//! which preserves harmonicity.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::BallSpec;
use crate::specfun;

type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// PDE class of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classification {
    /// `Δu = 0`.
    Harmonic,
    /// `Δu − μ²u = 0` with `μ ≠ 0`.
    Panharmonic { mu: f64 },
    /// No classification claimed.
    General,
}

impl Classification {
    /// The `μ²` coefficient entering the residual `Δu − μ²u`.
    pub fn mu_squared(&self) -> f64 {
        match self {
            Classification::Panharmonic { mu } => mu * mu,
            _ => 0.0,
        }
    }

    pub fn mu(&self) -> Option<f64> {
        match self {
            Classification::Panharmonic { mu } => Some(*mu),
            _ => None,
        }
    }
}

/// Region on which a field's guarantees (positivity, classification) hold.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainHint {
    Ball(BallSpec),
    /// `{ x : x[coord] < upper }`.
    HalfSpace { coord: usize, upper: f64 },
}

/// An evaluable scalar field `ℝ^d → ℝ` with metadata.
#[derive(Clone)]
pub struct ScalarField {
    label: String,
    dim: usize,
    classification: Classification,
    eval: EvalFn,
    laplacian: Option<EvalFn>,
    domain_hint: Option<DomainHint>,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("classification", &self.classification)
            .finish_non_exhaustive()
    }
}

impl ScalarField {
    /// Constant field `u ≡ value`.
    pub fn constant(value: f64, d: usize) -> Self {
        ScalarField {
            label: format!("const({value})"),
            dim: d,
            classification: Classification::Harmonic,
            eval: Arc::new(move |_| value),
            laplacian: Some(Arc::new(|_| 0.0)),
            domain_hint: None,
        }
    }

    /// Arbitrary field with no claimed classification.
    pub fn new_general(
        label: &str,
        d: usize,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ScalarField {
            label: label.to_string(),
            dim: d,
            classification: Classification::General,
            eval: Arc::new(eval),
            laplacian: None,
            domain_hint: None,
        }
    }

    #[inline]
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim, "field `{}` expects dimension {}", self.label, self.dim);
        (self.eval)(x)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }

    pub fn analytic_laplacian(&self, x: &[f64]) -> Option<f64> {
        self.laplacian.as_ref().map(|f| f(x))
    }

    pub fn domain_hint(&self) -> Option<&DomainHint> {
        self.domain_hint.as_ref()
    }

    /// Whether the closure of `ball` lies in the field's hinted domain
    /// (fields without a hint are valid everywhere).
    pub fn admits_ball(&self, ball: &BallSpec) -> bool {
        match &self.domain_hint {
            None => true,
            Some(DomainHint::Ball(omega)) => omega.contains_closure(ball),
            Some(DomainHint::HalfSpace { coord, upper }) => {
                ball.center()[*coord] + ball.radius() < *upper
            }
        }
    }
}

/// Construct a harmonic catalog field.
///
/// Families: `const`, `linear_x1`, `saddle` (`x₁²−x₂²`), `xy` (`x₁x₂`),
/// `re_z^n` / `im_z^n` (real/imaginary parts of `(x₁+ix₂)^n`),
/// `exp_sin` (`e^{x₁}sin x₂`), `exp_cos` (`e^{x₁}cos x₂`).
pub fn make_harmonic(family: &str, d: usize) -> Result<ScalarField> {
    if d < 2 {
        return Err(Error::Config(format!("harmonic catalog requires d ≥ 2, got {d}")));
    }
    let eval: EvalFn = match family {
        "const" => Arc::new(|_: &[f64]| 1.0),
        "linear_x1" => Arc::new(|x: &[f64]| x[0]),
        "saddle" => Arc::new(|x: &[f64]| x[0] * x[0] - x[1] * x[1]),
        "xy" => Arc::new(|x: &[f64]| x[0] * x[1]),
        "exp_sin" => Arc::new(|x: &[f64]| x[0].exp() * x[1].sin()),
        "exp_cos" => Arc::new(|x: &[f64]| x[0].exp() * x[1].cos()),
        _ => {
            if let Some(n) = family.strip_prefix("re_z^").and_then(|s| s.parse::<u32>().ok()) {
                Arc::new(move |x: &[f64]| complex_power(x[0], x[1], n).0)
            } else if let Some(n) = family.strip_prefix("im_z^").and_then(|s| s.parse::<u32>().ok())
            {
                Arc::new(move |x: &[f64]| complex_power(x[0], x[1], n).1)
            } else {
                return Err(Error::Config(format!("unknown harmonic family `{family}`")));
            }
        }
    };
    Ok(ScalarField {
        label: family.to_string(),
        dim: d,
        classification: Classification::Harmonic,
        eval,
        laplacian: Some(Arc::new(|_| 0.0)),
        domain_hint: None,
    })
}

/// `(Re, Im)` of `(x + iy)^n`.
fn complex_power(x: f64, y: f64, n: u32) -> (f64, f64) {
    let mut re = 1.0;
    let mut im = 0.0;
    for _ in 0..n {
        let nre = re * x - im * y;
        im = re * y + im * x;
        re = nre;
    }
    (re, im)
}

/// Construct a panharmonic catalog field for `μ ≠ 0`.
///
/// Families: `exp_plane` (`e^{μx₁}`, the plane wave with direction `e₁`),
/// `cosh_x1` (`cosh(μx₁)`), `radial_i0` (`I₀(μ|x|)`, plane only).
pub fn make_panharmonic(mu: f64, family: &str, d: usize) -> Result<ScalarField> {
    if mu == 0.0 || !mu.is_finite() {
        return Err(Error::Domain(format!("panharmonic fields require μ ≠ 0 finite, got {mu}")));
    }
    if d < 2 {
        return Err(Error::Config(format!("panharmonic catalog requires d ≥ 2, got {d}")));
    }
    let eval: EvalFn = match family {
        "exp_plane" => Arc::new(move |x: &[f64]| (mu * x[0]).exp()),
        "cosh_x1" => Arc::new(move |x: &[f64]| (mu * x[0]).cosh()),
        "radial_i0" => {
            if d != 2 {
                return Err(Error::Config(
                    "radial_i0 is panharmonic only in the plane; use d = 2".into(),
                ));
            }
            Arc::new(move |x: &[f64]| specfun::i0_unchecked(mu * crate::quadrature::norm(x)))
        }
        _ => return Err(Error::Config(format!("unknown panharmonic family `{family}`"))),
    };
    let classification = Classification::Panharmonic { mu };
    let mu2 = mu * mu;
    let eval_for_lap = eval.clone();
    Ok(ScalarField {
        label: family.to_string(),
        dim: d,
        classification,
        eval,
        laplacian: Some(Arc::new(move |x: &[f64]| mu2 * eval_for_lap(x))),
        domain_hint: None,
    })
}

/// Plane wave `e^{μ(x·θ)}` for a unit direction `θ` (panharmonic for any
/// direction; used by the isotropy tests).
pub fn make_plane_wave(mu: f64, theta: &[f64]) -> Result<ScalarField> {
    if mu == 0.0 || !mu.is_finite() {
        return Err(Error::Domain(format!("plane waves require μ ≠ 0 finite, got {mu}")));
    }
    let d = theta.len();
    if d < 2 {
        return Err(Error::Config("plane wave direction must have dimension ≥ 2".into()));
    }
    let nrm = crate::quadrature::norm(theta);
    if (nrm - 1.0).abs() > 1e-12 {
        return Err(Error::Config(format!("plane wave direction must be unit length, |θ| = {nrm}")));
    }
    let theta: Vec<f64> = theta.to_vec();
    let theta_lap = theta.clone();
    let mu2 = mu * mu;
    Ok(ScalarField {
        label: "exp_plane".to_string(),
        dim: d,
        classification: Classification::Panharmonic { mu },
        eval: Arc::new(move |x: &[f64]| {
            (mu * x.iter().zip(&theta).map(|(a, b)| a * b).sum::<f64>()).exp()
        }),
        laplacian: Some(Arc::new(move |x: &[f64]| {
            mu2 * (mu * x.iter().zip(&theta_lap).map(|(a, b)| a * b).sum::<f64>()).exp()
        })),
        domain_hint: None,
    })
}

/// Which variant of the counterexample field to build.
#[derive(Debug, Clone)]
pub enum CounterexampleMode {
    /// `u = e^{x₁}sin(x₂) + 3` on `Ω = D₁(0) ⊂ ℝ²`; harmonic with
    /// `u ≥ 0` on the closed disc, and the log-weighted mean equals
    /// `u(x)/2` exactly — so the strict inequality fails everywhere.
    UnitDisc,
    /// `ũ = e^{x₁}sin(x₂) − min_Ω e^{x₁}sin(x₂)` on a ball `Ω` contained
    /// in the half-space `{x₁ < c}`; same conclusion on any such domain.
    HalfSpace { c: f64, omega: BallSpec },
}

/// Build the counterexample field.
pub fn counterexample_field(mode: CounterexampleMode) -> Result<ScalarField> {
    match mode {
        CounterexampleMode::UnitDisc => Ok(ScalarField {
            label: "counterexample_disc".to_string(),
            dim: 2,
            classification: Classification::Harmonic,
            eval: Arc::new(|x: &[f64]| x[0].exp() * x[1].sin() + 3.0),
            laplacian: Some(Arc::new(|_| 0.0)),
            domain_hint: Some(DomainHint::Ball(BallSpec::unit_disc())),
        }),
        CounterexampleMode::HalfSpace { c, omega } => {
            if omega.center()[0] + omega.radius() > c {
                return Err(Error::Config(format!(
                    "domain must satisfy x₁ < {c}; ball reaches x₁ = {}",
                    omega.center()[0] + omega.radius()
                )));
            }
            let shift = min_exp_sin_on_ball(&omega);
            Ok(ScalarField {
                label: "counterexample_shifted".to_string(),
                dim: omega.dim(),
                classification: Classification::Harmonic,
                eval: Arc::new(move |x: &[f64]| x[0].exp() * x[1].sin() - shift),
                laplacian: Some(Arc::new(|_| 0.0)),
                domain_hint: Some(DomainHint::Ball(omega)),
            })
        }
    }
}

/// `min over the closed ball of e^{x₁}sin(x₂)`.
///
/// The function depends only on `(x₁, x₂)`, so the search runs over the
/// ball's projection onto that plane: dense polar grid, then pattern
/// search with shrinking steps (projected back into the disc), to ~1e−10.
fn min_exp_sin_on_ball(omega: &BallSpec) -> f64 {
    let cx = omega.center()[0];
    let cy = omega.center()[1];
    let r = omega.radius();
    let g = |x: f64, y: f64| x.exp() * y.sin();

    let mut best = (cx, cy, g(cx, cy));
    let (nr, na) = (64, 256);
    for i in 0..=nr {
        let rho = r * i as f64 / nr as f64;
        for j in 0..na {
            let th = 2.0 * std::f64::consts::PI * j as f64 / na as f64;
            let (x, y) = (cx + rho * th.cos(), cy + rho * th.sin());
            let v = g(x, y);
            if v < best.2 {
                best = (x, y, v);
            }
        }
    }

    let clamp = |x: f64, y: f64| -> (f64, f64) {
        let (dx, dy) = (x - cx, y - cy);
        let d = (dx * dx + dy * dy).sqrt();
        if d <= r {
            (x, y)
        } else {
            (cx + dx * r / d, cy + dy * r / d)
        }
    };
    let mut h = r / 16.0;
    while h > 1e-12 * r {
        let mut moved = false;
        for (sx, sy) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h), (h, h), (-h, -h), (h, -h), (-h, h)] {
            let (x, y) = clamp(best.0 + sx, best.1 + sy);
            let v = g(x, y);
            if v < best.2 {
                best = (x, y, v);
                moved = true;
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    best.2
}

/// `|x|² + offset`: strictly subharmonic (`Δu = 2d > 0`), used by the
/// exploratory margin reports. No classification is claimed.
pub fn make_quadratic(offset: f64, d: usize) -> ScalarField {
    let lap = 2.0 * d as f64;
    ScalarField {
        label: format!("radius_sq+{offset}"),
        dim: d,
        classification: Classification::General,
        eval: Arc::new(move |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>() + offset),
        laplacian: Some(Arc::new(move |_| lap)),
        domain_hint: None,
    }
}

/// Centered second-difference Laplacian minus `μ²·u(x)` (`μ = 0` for
/// non-panharmonic classes); `O(h²)` small for catalog fields.
pub fn laplacian_residual(field: &ScalarField, x: &[f64], h: f64) -> Result<f64> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::Domain(format!("laplacian_residual: step must be positive, got {h}")));
    }
    if x.len() != field.dim() {
        return Err(Error::Config(format!(
            "laplacian_residual: point dimension {} ≠ field dimension {}",
            x.len(),
            field.dim()
        )));
    }
    let mut probe = x.to_vec();
    // The whole stencil must stay inside the hinted domain.
    if let Some(hint) = field.domain_hint() {
        for i in 0..x.len() {
            for s in [-h, h] {
                probe[i] = x[i] + s;
                let inside = match hint {
                    DomainHint::Ball(omega) => omega.boundary_distance(&probe) >= 0.0,
                    DomainHint::HalfSpace { coord, upper } => probe[*coord] < *upper,
                };
                if !inside {
                    return Err(Error::Domain(format!(
                        "stencil at {x:?} with h = {h} leaves the field's domain"
                    )));
                }
            }
            probe[i] = x[i];
        }
    }

    let center = field.evaluate(x);
    let mut lap = 0.0;
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = field.evaluate(&probe);
        probe[i] = x[i] - h;
        let down = field.evaluate(&probe);
        probe[i] = x[i];
        lap += (up - 2.0 * center + down) / (h * h);
    }
    Ok(lap - field.classification().mu_squared() * center)
}

/// Labels of the harmonic catalog (the fields `harmonic_catalog` builds).
pub const HARMONIC_LABELS: [&str; 8] =
    ["const", "linear_x1", "saddle", "xy", "re_z^3", "im_z^3", "exp_sin", "exp_cos"];

/// Labels of the panharmonic catalog.
pub const PANHARMONIC_LABELS: [&str; 3] = ["exp_plane", "cosh_x1", "radial_i0"];

/// All harmonic catalog fields at dimension `d`.
pub fn harmonic_catalog(d: usize) -> Result<Vec<ScalarField>> {
    HARMONIC_LABELS.iter().map(|family| make_harmonic(family, d)).collect()
}

/// All planar panharmonic catalog fields for a given `μ`.
pub fn panharmonic_catalog(mu: f64) -> Result<Vec<ScalarField>> {
    PANHARMONIC_LABELS.iter().map(|family| make_panharmonic(mu, family, 2)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    #[test]
    fn harmonic_examples() {
        let f = make_harmonic("re_z^3", 2).unwrap();
        // x₁³ − 3x₁x₂² at (0.2, 0.1).
        assert!((f.evaluate(&[0.2, 0.1]) - 0.002).abs() < 1e-15);

        let f = make_harmonic("exp_sin", 2).unwrap();
        assert_eq!(f.evaluate(&[0.0, 0.0]), 0.0);

        let f = make_harmonic("linear_x1", 3).unwrap();
        assert_eq!(f.evaluate(&[1.0, 2.0, 3.0]), 1.0);

        assert!(make_harmonic("unknowable", 2).is_err());
        assert!(make_harmonic("exp_sin", 1).is_err());
    }

    #[test]
    fn panharmonic_examples() {
        let f = make_panharmonic(1.0, "exp_plane", 2).unwrap();
        assert_eq!(f.evaluate(&[0.0, 0.0]), 1.0);

        let f = make_panharmonic(1.0, "radial_i0", 2).unwrap();
        assert!((f.evaluate(&[1.0, 0.0]) - 1.2660658777520083).abs() < 1e-14);

        let f = make_panharmonic(2.0, "cosh_x1", 2).unwrap();
        assert!((f.evaluate(&[0.5, 0.3]) - 1.0f64.cosh()).abs() < 1e-15);

        assert!(make_panharmonic(0.0, "exp_plane", 2).is_err());
        assert!(make_panharmonic(1.0, "nope", 2).is_err());
        assert!(make_panharmonic(1.0, "radial_i0", 3).is_err());
    }

    #[test]
    fn counterexample_disc_values() {
        let u = counterexample_field(CounterexampleMode::UnitDisc).unwrap();
        assert_eq!(u.evaluate(&[0.0, 0.0]), 3.0);
        let half_pi = std::f64::consts::FRAC_PI_2;
        assert!((u.evaluate(&[0.0, half_pi]) - 4.0).abs() < 1e-15);
        assert_eq!(u.classification(), Classification::Harmonic);
    }

    #[test]
    fn counterexample_nonnegative_on_closed_disc() {
        let u = counterexample_field(CounterexampleMode::UnitDisc).unwrap();
        let n = 200;
        for i in 0..n {
            for j in 0..n {
                let x = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
                let y = -1.0 + 2.0 * j as f64 / (n - 1) as f64;
                if x * x + y * y <= 1.0 {
                    assert!(u.evaluate(&[x, y]) >= 0.0, "negative at ({x}, {y})");
                }
            }
        }
    }

    #[test]
    fn counterexample_shifted_nonnegative_and_validated() {
        let omega = BallSpec::new(vec![-1.0, 0.5], 0.8).unwrap();
        let u = counterexample_field(CounterexampleMode::HalfSpace { c: 0.0, omega: omega.clone() })
            .unwrap();
        // Nonnegative on a dense grid of Ω.
        for i in 0..200 {
            for j in 0..200 {
                let x = omega.center()[0] + omega.radius() * (-1.0 + 2.0 * i as f64 / 199.0);
                let y = omega.center()[1] + omega.radius() * (-1.0 + 2.0 * j as f64 / 199.0);
                if crate::quadrature::dist(&[x, y], omega.center()) <= omega.radius() {
                    let v = u.evaluate(&[x, y]);
                    assert!(v >= -1e-10, "negative at ({x}, {y}): {v}");
                }
            }
        }
        // e^{x₁}sin(x₂) has no interior critical points, so its minimum
        // over the closed ball sits on the boundary circle; the shift
        // should make the infimum there zero.
        let mut min = f64::INFINITY;
        for k in 0..20_000 {
            let th = 2.0 * std::f64::consts::PI * k as f64 / 20_000.0;
            let x = omega.center()[0] + omega.radius() * th.cos();
            let y = omega.center()[1] + omega.radius() * th.sin();
            let v = u.evaluate(&[x, y]);
            assert!(v >= -1e-10, "negative at ({x}, {y}): {v}");
            min = min.min(v);
        }
        assert!(min.abs() < 1e-6, "infimum over ∂Ω should be 0, got {min}");

        // Ball poking out of the half-space is rejected.
        let bad = BallSpec::new(vec![-0.5, 0.0], 0.8).unwrap();
        assert!(counterexample_field(CounterexampleMode::HalfSpace { c: 0.0, omega: bad }).is_err());
    }

    #[test]
    fn laplacian_residual_examples() {
        let saddle = make_harmonic("saddle", 2).unwrap();
        let r = laplacian_residual(&saddle, &[0.4, -0.3], 1e-3).unwrap();
        assert!(r.abs() < 1e-9, "saddle residual {r}");

        let pan = make_panharmonic(1.0, "exp_plane", 2).unwrap();
        let r = laplacian_residual(&pan, &[0.1, 0.2], 1e-3).unwrap();
        assert!(r.abs() < 1e-6, "plane wave residual {r}");

        let quad = make_quadratic(0.0, 2);
        let r = laplacian_residual(&quad, &[0.0, 0.0], 1e-3).unwrap();
        assert!((r - 4.0).abs() < 1e-9, "Δ|x|² = 4 in the plane, got {r}");

        assert!(laplacian_residual(&quad, &[0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn laplacian_residual_respects_domain_hint() {
        let u = counterexample_field(CounterexampleMode::UnitDisc).unwrap();
        assert!(laplacian_residual(&u, &[0.999999, 0.0], 1e-3).is_err());
        assert!(laplacian_residual(&u, &[0.5, 0.0], 1e-3).is_ok());
    }

    #[test]
    fn catalog_laplacian_residuals_small_at_random_points() {
        let mut rng = CounterRng::new(20240817, 0);
        let mut fields = harmonic_catalog(2).unwrap();
        fields.extend(harmonic_catalog(3).unwrap());
        for mu in [0.5, 2.0] {
            fields.extend(panharmonic_catalog(mu).unwrap());
        }
        for field in &fields {
            for _ in 0..20 {
                let x: Vec<f64> = (0..field.dim()).map(|_| rng.uniform() - 0.5).collect();
                let u = field.evaluate(&x);
                let r = laplacian_residual(field, &x, 1e-4).unwrap();
                assert!(
                    r.abs() <= 1e-5 * (1.0 + u.abs()),
                    "field {} residual {r} at {x:?}",
                    field.label()
                );
                if let Some(lap) = field.analytic_laplacian(&x) {
                    let fd = r + field.classification().mu_squared() * u;
                    assert!(
                        (fd - lap).abs() <= 1e-5 * (1.0 + lap.abs()),
                        "analytic Laplacian mismatch for {}",
                        field.label()
                    );
                }
            }
        }
    }

    #[test]
    fn plane_wave_rotation_isotropy() {
        // e^{μ(x·θ)} evaluated at x equals e^{μ(Rx·Rθ)} for a rotation R.
        let mu = 1.3;
        let alpha = 0.7_f64;
        let (sin_a, cos_a) = alpha.sin_cos();
        let rotate = |v: &[f64]| vec![cos_a * v[0] - sin_a * v[1], sin_a * v[0] + cos_a * v[1]];

        let theta = [0.6, 0.8];
        let wave = make_plane_wave(mu, &theta).unwrap();
        let wave_rot = make_plane_wave(mu, &rotate(&theta)).unwrap();
        for x in [[0.2, -0.4], [1.0, 0.5], [-0.3, -0.1]] {
            let lhs = wave.evaluate(&x);
            let rhs = wave_rot.evaluate(&rotate(&x));
            assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs());
        }

        assert!(make_plane_wave(1.0, &[0.5, 0.5]).is_err());
    }
}
