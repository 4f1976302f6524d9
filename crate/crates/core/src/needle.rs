//! One-dimensional calculus on needle densities.
//!
//! A needle is a transport ray parametrised by arclength with the crossing
//! point of the surface at `0`, carrying a density `h > 0` on its open
//! interval. The checks here are brute-force grid verifications of the
//! concavity-type inequalities such densities satisfy under `CD(K, N)`:
//!
//! * [`check_cd_density`]: `h^{1/(N-1)}` is `σ`-concave along every segment.
//! * [`sturm_bound_check`]: a `κ`-concave `u` lies below its tangent
//!   `κ`-trigonometric comparison function.
//! * [`density_ratio_check`]: `h(r)/h(0) ≤ J_{H,K,N}(r)` with `H = d⁺ log h(0)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{param, Error, Result};
use crate::ext::ExtReal;
use crate::model1d::{self, CurvatureDimension, JacobianParams};
use crate::quad::{self, Tolerance};

/// Relative slack used by every inequality check in this module.
pub const INEQUALITY_SLACK: f64 = 1e-9;

/// Which one-sided limit to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Plus,
    Minus,
}

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type LogDerivative = Arc<dyn Fn(f64, Side) -> f64 + Send + Sync>;

/// A positive density on `[a, b]`, with a cached uniform sample grid.
#[derive(Clone)]
pub struct DensityProfile {
    a: f64,
    b: f64,
    eval: Eval,
    log_derivative: Option<LogDerivative>,
    samples: Vec<f64>,
}

impl fmt::Debug for DensityProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityProfile")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("samples", &self.samples.len())
            .field("closed_form_derivative", &self.log_derivative.is_some())
            .finish()
    }
}

impl DensityProfile {
    pub const DEFAULT_SAMPLES: usize = 1024;

    pub fn new<F>(a: f64, b: f64, eval: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::with_samples(a, b, eval, Self::DEFAULT_SAMPLES)
    }

    /// Builds a profile and validates it on `samples` uniform grid points:
    /// finite and non-negative everywhere, strictly positive inside.
    pub fn with_samples<F>(a: f64, b: f64, eval: F, samples: usize) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_arc(a, b, Arc::new(eval), None, samples)
    }

    fn from_arc(
        a: f64,
        b: f64,
        eval: Eval,
        log_derivative: Option<LogDerivative>,
        samples: usize,
    ) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(param(format!(
                "density interval [{a}, {b}] must be finite with a < b"
            )));
        }
        if samples < 2 {
            return Err(param("density needs at least two samples"));
        }
        let step = (b - a) / (samples - 1) as f64;
        let values: Vec<f64> = (0..samples).map(|i| eval(a + step * i as f64)).collect();
        for (i, &v) in values.iter().enumerate() {
            let interior = i > 0 && i + 1 < samples;
            if !v.is_finite() || v < 0.0 || (interior && v <= 0.0) {
                return Err(param(format!(
                    "density must be positive inside and finite on [{a}, {b}]; got {v} at r = {}",
                    a + step * i as f64
                )));
            }
        }
        Ok(Self {
            a,
            b,
            eval,
            log_derivative,
            samples: values,
        })
    }

    /// Registers the closed-form one-sided derivative of `log h`.
    pub fn with_log_derivative<F>(mut self, derivative: F) -> Self
    where
        F: Fn(f64, Side) -> f64 + Send + Sync + 'static,
    {
        self.log_derivative = Some(Arc::new(derivative));
        self
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn has_closed_form_derivative(&self) -> bool {
        self.log_derivative.is_some()
    }

    /// Density value; zero outside `[a, b]`.
    pub fn eval(&self, r: f64) -> f64 {
        if r < self.a || r > self.b {
            0.0
        } else {
            (self.eval)(r)
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Abscissae of the sample grid.
    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let m = self.samples.len();
        let step = (self.b - self.a) / (m - 1) as f64;
        (0..m).map(move |i| self.a + step * i as f64)
    }

    /// `r ↦ h(r + offset)` on `[a - offset, b - offset]`.
    pub fn shifted(&self, offset: f64) -> Result<Self> {
        let eval = self.eval.clone();
        let deriv = self
            .log_derivative
            .clone()
            .map(|d| Arc::new(move |r: f64, side: Side| d(r + offset, side)) as LogDerivative);
        Self::from_arc(
            self.a - offset,
            self.b - offset,
            Arc::new(move |r| eval(r + offset)),
            deriv,
            self.samples.len(),
        )
    }

    /// `r ↦ factor · h(r)`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(param(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        let eval = self.eval.clone();
        Self::from_arc(
            self.a,
            self.b,
            Arc::new(move |r| factor * eval(r)),
            self.log_derivative.clone(),
            self.samples.len(),
        )
    }

    /// `r ↦ h(-r)` on `[-b, -a]`; one-sided derivatives swap sides and sign.
    pub fn reflected(&self) -> Result<Self> {
        let eval = self.eval.clone();
        let deriv = self.log_derivative.clone().map(|d| {
            Arc::new(move |r: f64, side: Side| {
                let other = match side {
                    Side::Plus => Side::Minus,
                    Side::Minus => Side::Plus,
                };
                -d(-r, other)
            }) as LogDerivative
        });
        Self::from_arc(
            -self.b,
            -self.a,
            Arc::new(move |r| eval(-r)),
            deriv,
            self.samples.len(),
        )
    }

    /// `r ↦ h(r)^p`.
    pub fn power(&self, p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(param(format!("power must be positive, got {p}")));
        }
        let eval = self.eval.clone();
        let deriv = self
            .log_derivative
            .clone()
            .map(|d| Arc::new(move |r: f64, side: Side| p * d(r, side)) as LogDerivative);
        Self::from_arc(
            self.a,
            self.b,
            Arc::new(move |r| eval(r).powf(p)),
            deriv,
            self.samples.len(),
        )
    }

    /// `∫_lo^hi h`, with the limits clipped to `[a, b]`.
    pub fn integral_over(&self, lo: f64, hi: f64) -> Result<f64> {
        let lo = lo.max(self.a);
        let hi = hi.min(self.b);
        if hi <= lo {
            return Ok(0.0);
        }
        let eval = &self.eval;
        quad::integrate(|r| eval(r), lo, hi, Tolerance::DEFAULT)
    }

    pub fn integral(&self) -> Result<f64> {
        self.integral_over(self.a, self.b)
    }
}

/// One transport ray with its base point at parameter `0`.
#[derive(Debug, Clone)]
pub struct Needle {
    profile: DensityProfile,
    weight: f64,
}

impl Needle {
    pub fn new(profile: DensityProfile, weight: f64) -> Result<Self> {
        if !(profile.a <= 0.0 && 0.0 <= profile.b) {
            return Err(Error::Domain {
                value: 0.0,
                domain: format!("needle base point in [{}, {}]", profile.a, profile.b),
            });
        }
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(param(format!(
                "needle weight must be finite and >= 0, got {weight}"
            )));
        }
        Ok(Self { profile, weight })
    }

    pub fn profile(&self) -> &DensityProfile {
        &self.profile
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// `true` when the base point is interior, i.e. the needle has two sides.
    pub fn is_regular(&self) -> bool {
        self.profile.a < 0.0 && 0.0 < self.profile.b
    }

    /// The needle seen from the complement: orientation reversed.
    pub fn reflected(&self) -> Result<Self> {
        Needle::new(self.profile.reflected()?, self.weight)
    }
}

const FD_LEVELS: usize = 8;
const DIVERGENCE_THRESHOLD: f64 = 1e8;

/// `d^±/dr log h(r)`.
///
/// Uses the profile's closed-form derivative when one is registered;
/// otherwise one-sided difference quotients with steps `h₀ 2^{-k}`,
/// `h₀ = 10⁻³ (b - a)`, combined by Richardson extrapolation. Quotients that
/// exceed `10⁸` in magnitude and are still growing at the finest step are
/// reported as `±∞`.
pub fn one_sided_log_derivative(profile: &DensityProfile, r: f64, side: Side) -> Result<ExtReal> {
    let (a, b) = (profile.a, profile.b);
    let admissible = match side {
        Side::Plus => a <= r && r < b,
        Side::Minus => a < r && r <= b,
    };
    if !admissible {
        return Err(Error::Domain {
            value: r,
            domain: match side {
                Side::Plus => format!("[{a}, {b})"),
                Side::Minus => format!("({a}, {b}]"),
            },
        });
    }
    if let Some(d) = &profile.log_derivative {
        return Ok(ExtReal::from(d(r, side)));
    }

    let h0 = profile.eval(r);
    let scale = profile.samples.iter().cloned().fold(0.0, f64::max);
    if h0 <= f64::EPSILON * scale {
        // log h = -∞ at r and finite nearby
        return Ok(match side {
            Side::Plus => ExtReal::PosInfinity,
            Side::Minus => ExtReal::NegInfinity,
        });
    }
    let log0 = h0.ln();
    let (dir, room) = match side {
        Side::Plus => (1.0, b - r),
        Side::Minus => (-1.0, r - a),
    };
    let mut step = (1e-3 * (b - a)).min(0.5 * room);
    let mut table = [[0.0f64; FD_LEVELS]; FD_LEVELS];
    let mut quotients = [0.0f64; FD_LEVELS];
    let mut best = f64::NAN;
    let mut best_err = f64::INFINITY;
    for k in 0..FD_LEVELS {
        let q = (profile.eval(r + dir * step).ln() - log0) / (dir * step);
        quotients[k] = q;
        table[k][0] = q;
        let mut factor = 1.0;
        for j in 1..=k {
            factor *= 2.0;
            table[k][j] = (factor * table[k][j - 1] - table[k - 1][j - 1]) / (factor - 1.0);
            let err = (table[k][j] - table[k][j - 1])
                .abs()
                .max((table[k][j] - table[k - 1][j - 1]).abs());
            if err < best_err {
                best_err = err;
                best = table[k][j];
            }
        }
        step *= 0.5;
    }
    let last = quotients[FD_LEVELS - 1];
    let prev = quotients[FD_LEVELS - 2];
    if !last.is_finite() || (last.abs() > DIVERGENCE_THRESHOLD && last.abs() > prev.abs()) {
        return Ok(if last > 0.0 {
            ExtReal::PosInfinity
        } else {
            ExtReal::NegInfinity
        });
    }
    Ok(ExtReal::Finite(best))
}

/// Segment and interpolation parameter where [`check_cd_density`] saw its worst case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub r0: f64,
    pub r1: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdDensityReport {
    pub pass: bool,
    /// Largest `(rhs - lhs)/lhs` over the grid; `≤ 0` means no violation.
    pub worst_violation: f64,
    pub witness: Witness,
}

/// Brute-force check that `h^{1/(N-1)}` satisfies
/// `u(γ_t) ≥ σ^{(1-t)}_{K,N-1}(θ) u(γ_0) + σ^{(t)}_{K,N-1}(θ) u(γ_1)`
/// for all pairs of `grid_size` interior midpoints and all `t = k/(grid_size-1)`.
pub fn check_cd_density(
    profile: &DensityProfile,
    cd: &CurvatureDimension,
    grid_size: usize,
) -> Result<CdDensityReport> {
    if grid_size < 3 {
        return Err(param(format!("grid_size must be >= 3, got {grid_size}")));
    }
    let exponent = 1.0 / (cd.n() - 1.0);
    let (k, n_minus_one) = (cd.k(), cd.n() - 1.0);
    let width = profile.b - profile.a;
    let points: Vec<f64> = (0..grid_size)
        .map(|i| profile.a + (i as f64 + 0.5) * width / grid_size as f64)
        .collect();
    let u: Vec<f64> = points
        .iter()
        .map(|&r| profile.eval(r).powf(exponent))
        .collect();
    let ts: Vec<f64> = (1..grid_size - 1)
        .map(|i| i as f64 / (grid_size - 1) as f64)
        .collect();

    let mut worst = f64::NEG_INFINITY;
    let mut witness = Witness {
        r0: points[0],
        r1: points[1],
        t: ts[0],
    };
    for i in 0..grid_size {
        for j in (i + 1)..grid_size {
            let (r0, r1) = (points[i], points[j]);
            let theta = r1 - r0;
            for &t in &ts {
                let lhs = profile.eval(r0 + t * theta).powf(exponent);
                let w0 = model1d::sigma(k, n_minus_one, 1.0 - t, theta)?;
                let w1 = model1d::sigma(k, n_minus_one, t, theta)?;
                let rhs = w0.scale_nonneg(u[i]).to_f64() + w1.scale_nonneg(u[j]).to_f64();
                let rel = (rhs - lhs) / lhs.max(f64::MIN_POSITIVE);
                if rel > worst {
                    worst = rel;
                    witness = Witness { r0, r1, t };
                }
            }
        }
    }
    Ok(CdDensityReport {
        pass: worst <= INEQUALITY_SLACK,
        worst_violation: worst,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SturmReport {
    pub pass: bool,
    /// Largest `u(r) - bound(r)` on the grid.
    pub max_excess: f64,
    /// Whether the comparison function stayed positive on the grid.
    pub bound_positive: bool,
}

/// Checks `u(r) ≤ u(r₀) cos_κ(r - r₀) + d⁺u(r₀) sin_κ(r - r₀)` on a grid of
/// `(r₀, b)`, together with positivity of the right side there.
pub fn sturm_bound_check(
    u: &DensityProfile,
    kappa: f64,
    r0: f64,
    grid_size: usize,
) -> Result<SturmReport> {
    if !(u.a < r0 && r0 < u.b) {
        return Err(Error::Domain {
            value: r0,
            domain: format!("({}, {})", u.a, u.b),
        });
    }
    if grid_size < 2 {
        return Err(param(format!("grid_size must be >= 2, got {grid_size}")));
    }
    let u0 = u.eval(r0);
    let slope = match one_sided_log_derivative(u, r0, Side::Plus)? {
        ExtReal::Finite(d) => d * u0,
        other => {
            return Err(Error::InfiniteCurvature(format!(
                "d⁺ log u({r0}) = {other} in the interior"
            )))
        }
    };
    let mut max_excess = f64::NEG_INFINITY;
    let mut pass = true;
    let mut bound_positive = true;
    for i in 1..grid_size {
        let r = r0 + (u.b - r0) * i as f64 / grid_size as f64;
        let (s, c) = model1d::trig_kappa(kappa, r - r0);
        let bound = u0 * c + slope * s;
        let value = u.eval(r);
        let excess = value - bound;
        max_excess = max_excess.max(excess);
        if excess > INEQUALITY_SLACK * value.abs().max(bound.abs()).max(u0) {
            pass = false;
        }
        if bound <= 0.0 {
            bound_positive = false;
        }
    }
    Ok(SturmReport {
        pass: pass && bound_positive,
        max_excess,
        bound_positive,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub pass: bool,
    /// `H = d⁺ log h(0)`, used on the outer side.
    pub h_used: f64,
    /// `d⁺ log h(-·)` at `0`, used on the inner (reflected) side.
    pub h_inner: f64,
    /// Largest `h(r)/h(0) - J(r)` over both sides.
    pub max_excess: f64,
}

fn finite_curvature(value: ExtReal, what: &str) -> Result<f64> {
    value
        .finite()
        .ok_or_else(|| Error::InfiniteCurvature(format!("{what} = {value}")))
}

fn ratio_side(
    profile: &DensityProfile,
    params: &JacobianParams,
    grid_size: usize,
    excess: &mut f64,
) -> bool {
    let h0 = profile.eval(0.0);
    let mut pass = true;
    for i in 1..grid_size {
        let r = profile.b * i as f64 / grid_size as f64;
        let ratio = profile.eval(r) / h0;
        let j = model1d::jacobian(params, r);
        let e = ratio - j;
        *excess = excess.max(e);
        if e > INEQUALITY_SLACK * ratio.max(j).max(1.0) {
            pass = false;
        }
    }
    pass
}

/// Checks `h(r)/h(0) ≤ J_{H,K,N}(r)` on `(0, b)` with `H = d⁺ log h(0)`, and
/// the mirrored statement on `(a, 0)` for the reversed needle.
pub fn density_ratio_check(
    needle: &Needle,
    cd: &CurvatureDimension,
    grid_size: usize,
) -> Result<RatioReport> {
    if !needle.is_regular() {
        return Err(Error::DegenerateSurface(format!(
            "base point at an end of [{}, {}]",
            needle.profile.a, needle.profile.b
        )));
    }
    if grid_size < 2 {
        return Err(param(format!("grid_size must be >= 2, got {grid_size}")));
    }
    let outer = finite_curvature(
        one_sided_log_derivative(&needle.profile, 0.0, Side::Plus)?,
        "d⁺ log h(0)",
    )?;
    let reflected = needle.profile.reflected()?;
    let inner = finite_curvature(
        one_sided_log_derivative(&reflected, 0.0, Side::Plus)?,
        "d⁺ log h(-·)(0)",
    )?;
    let mut max_excess = f64::NEG_INFINITY;
    let pass_out = ratio_side(
        &needle.profile,
        &JacobianParams::new(outer, *cd)?,
        grid_size,
        &mut max_excess,
    );
    let pass_in = ratio_side(
        &reflected,
        &JacobianParams::new(inner, *cd)?,
        grid_size,
        &mut max_excess,
    );
    Ok(RatioReport {
        pass: pass_out && pass_in,
        h_used: outer,
        h_inner: inner,
        max_excess,
    })
}

/// `weight · ∫_a^b h`.
pub fn needle_mass(needle: &Needle) -> Result<f64> {
    Ok(needle.weight * needle.profile.integral()?)
}

/// Density `-(log h)'(r)` of the absolutely continuous part of `Δ d_S` along
/// the needle. `side` selects the one-sided derivative where `h` has a kink.
pub fn laplacian_regular_part(needle: &Needle, r: f64, side: Side) -> Result<f64> {
    let p = &needle.profile;
    if !(p.a < r && r < p.b) {
        return Err(Error::Domain {
            value: r,
            domain: format!("({}, {})", p.a, p.b),
        });
    }
    let d = finite_curvature(one_sided_log_derivative(p, r, side)?, "(log h)'")?;
    Ok(-d)
}
