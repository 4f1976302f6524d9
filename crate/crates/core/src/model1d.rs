//! Model-space special functions.
//!
//! `sin_κ` and `cos_κ` solve `v'' + κ v = 0` with the two standard initial
//! conditions; everything else here (distortion coefficients, the Jacobian
//! function `J_{H,K,N}`, the model isoperimetric profile) is built from them
//! in closed form, with quadrature only where an antiderivative of
//! `sin_κ^{N-1}` is needed for non-integer exponents.

use std::f64::consts::PI;

use crate::error::{param, Error, Result};
use crate::ext::ExtReal;
use crate::quad::{self, Tolerance};

/// Curvature lower bound `K` and dimension upper bound `N` of a `CD(K, N)` space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureDimension {
    k: f64,
    n: f64,
}

impl CurvatureDimension {
    /// Requires `N > 1` finite and `K` finite.
    pub fn new(k: f64, n: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(param(format!("K must be finite, got {k}")));
        }
        if !n.is_finite() || n <= 1.0 {
            return Err(param(format!("N must be finite and > 1, got {n}")));
        }
        Ok(Self { k, n })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    /// `K / (N - 1)`, the curvature of the one-dimensional comparison ODE.
    pub fn kappa(&self) -> f64 {
        self.k / (self.n - 1.0)
    }

    /// Length `π_{K/(N-1)}` of the model interval (infinite unless `K > 0`).
    pub fn model_diameter(&self) -> ExtReal {
        pi_kappa(self.kappa())
    }
}

/// Mean curvature value together with the ambient `(K, N)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianParams {
    h: f64,
    cd: CurvatureDimension,
}

impl JacobianParams {
    pub fn new(h: f64, cd: CurvatureDimension) -> Result<Self> {
        if !h.is_finite() {
            return Err(Error::InfiniteCurvature(format!(
                "Jacobian needs a finite mean curvature, got {h}"
            )));
        }
        Ok(Self { h, cd })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn cd(&self) -> CurvatureDimension {
        self.cd
    }

    /// Same `(K, N)` with the mean curvature negated; `J_{-H}(r) = J_H(-r)`.
    pub fn reflected(&self) -> Self {
        Self {
            h: -self.h,
            cd: self.cd,
        }
    }

    fn slope(&self) -> f64 {
        self.h / (self.cd.n - 1.0)
    }
}

/// `(sin_κ(r), cos_κ(r))`.
pub fn trig_kappa(kappa: f64, r: f64) -> (f64, f64) {
    if kappa > 0.0 {
        let s = kappa.sqrt();
        ((s * r).sin() / s, (s * r).cos())
    } else if kappa < 0.0 {
        let s = (-kappa).sqrt();
        ((s * r).sinh() / s, (s * r).cosh())
    } else {
        (r, 1.0)
    }
}

pub fn sin_kappa(kappa: f64, r: f64) -> f64 {
    trig_kappa(kappa, r).0
}

pub fn cos_kappa(kappa: f64, r: f64) -> f64 {
    trig_kappa(kappa, r).1
}

/// Diameter of the simply connected space form of curvature `κ`.
pub fn pi_kappa(kappa: f64) -> ExtReal {
    if kappa > 0.0 {
        ExtReal::Finite(PI / kappa.sqrt())
    } else {
        ExtReal::PosInfinity
    }
}

fn check_distortion_args(t: f64, theta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain {
            value: t,
            domain: "t in [0, 1]".into(),
        });
    }
    if theta.is_nan() || theta < 0.0 {
        return Err(Error::Domain {
            value: theta,
            domain: "theta >= 0".into(),
        });
    }
    Ok(())
}

/// Distortion coefficient `σ_{K,N}^{(t)}(θ)`, defined for any `N > 0`.
///
/// Returns `+∞` once `θ` reaches the conjugate radius `π_{K/N}`.
pub fn sigma(k: f64, n: f64, t: f64, theta: f64) -> Result<ExtReal> {
    check_distortion_args(t, theta)?;
    if !(n > 0.0) || !n.is_finite() || !k.is_finite() {
        return Err(param(format!(
            "sigma needs finite K and N > 0, got ({k}, {n})"
        )));
    }
    if theta == 0.0 {
        return Ok(ExtReal::Finite(t));
    }
    let kappa = k / n;
    if let ExtReal::Finite(limit) = pi_kappa(kappa) {
        if theta >= limit {
            return Ok(ExtReal::PosInfinity);
        }
    }
    Ok(ExtReal::Finite(
        sin_kappa(kappa, t * theta) / sin_kappa(kappa, theta),
    ))
}

/// Modified distortion coefficient `τ_{K,N}^{(t)}(θ)`, defined for `N ≥ 1`.
pub fn tau(k: f64, n: f64, t: f64, theta: f64) -> Result<ExtReal> {
    check_distortion_args(t, theta)?;
    if !(n >= 1.0) || !n.is_finite() || !k.is_finite() {
        return Err(param(format!(
            "tau needs finite K and N >= 1, got ({k}, {n})"
        )));
    }
    if k > 0.0 && n == 1.0 {
        return Ok(ExtReal::PosInfinity.scale_nonneg(theta));
    }
    let weight = t.powf(1.0 / n);
    if n == 1.0 {
        // exponent 1 - 1/N vanishes; σ_{K,0} is not needed
        return Ok(ExtReal::Finite(weight));
    }
    Ok(match sigma(k, n - 1.0, t, theta)? {
        ExtReal::Finite(s) => ExtReal::Finite(weight * s.powf(1.0 - 1.0 / n)),
        inf => inf.scale_nonneg(weight),
    })
}

fn jacobian_base(p: &JacobianParams, r: f64) -> f64 {
    let (s, c) = trig_kappa(p.cd.kappa(), r);
    c + p.slope() * s
}

/// `J_{H,K,N}(r)`: the positive part of `cos_κ + H/(N-1) sin_κ`, raised to
/// `N - 1`, on the component of its support containing `0`; zero elsewhere.
pub fn jacobian(p: &JacobianParams, r: f64) -> f64 {
    let (lo, hi) = jacobian_support(p);
    if ExtReal::Finite(r) <= lo || ExtReal::Finite(r) >= hi {
        return 0.0;
    }
    jacobian_base(p, r).max(0.0).powf(p.cd.n - 1.0)
}

/// Maximal open interval around `0` on which the Jacobian's base is positive.
pub fn jacobian_support(p: &JacobianParams) -> (ExtReal, ExtReal) {
    let kappa = p.cd.kappa();
    let c = p.slope();
    if kappa > 0.0 {
        let s = kappa.sqrt();
        // cos_κ + c sin_κ = R cos(s r - φ)
        let phi = (c / s).atan();
        (
            ExtReal::Finite((phi - PI / 2.0) / s),
            ExtReal::Finite((phi + PI / 2.0) / s),
        )
    } else if kappa == 0.0 {
        if c > 0.0 {
            (ExtReal::Finite(-1.0 / c), ExtReal::PosInfinity)
        } else if c < 0.0 {
            (ExtReal::NegInfinity, ExtReal::Finite(-1.0 / c))
        } else {
            (ExtReal::NegInfinity, ExtReal::PosInfinity)
        }
    } else {
        let s = (-kappa).sqrt();
        let slope = c / s;
        // cosh x + slope·sinh x vanishes at tanh x = -1/slope when |slope| > 1
        if slope > 1.0 {
            (
                ExtReal::Finite((-1.0 / slope).atanh() / s),
                ExtReal::PosInfinity,
            )
        } else if slope < -1.0 {
            (
                ExtReal::NegInfinity,
                ExtReal::Finite((-1.0 / slope).atanh() / s),
            )
        } else {
            (ExtReal::NegInfinity, ExtReal::PosInfinity)
        }
    }
}

/// `K/(N-1) + (H/(N-1))²`, the constant value of `(f')² + κ f²` along the
/// Jacobian base `f`.
pub fn kappa_eff(p: &JacobianParams) -> f64 {
    p.cd.kappa() + p.slope().powi(2)
}

/// `∫_{lo}^{hi} J_{H,K,N}(r) dr` with the limits clipped to the support.
pub fn jacobian_integral(p: &JacobianParams, lo: f64, hi: f64, tol: Tolerance) -> Result<f64> {
    if hi <= lo {
        return Ok(0.0);
    }
    let (s_lo, s_hi) = jacobian_support(p);
    let a = match s_lo {
        ExtReal::Finite(x) => lo.max(x),
        _ => lo,
    };
    let b = match s_hi {
        ExtReal::Finite(x) => hi.min(x),
        _ => hi,
    };
    if b <= a {
        return Ok(0.0);
    }
    let exponent = p.cd.n - 1.0;
    quad::integrate(|r| jacobian_base(p, r).max(0.0).powf(exponent), a, b, tol)
}

fn require_positive_k(cd: &CurvatureDimension) -> Result<f64> {
    if cd.k > 0.0 {
        Ok(cd.kappa())
    } else {
        Err(param(format!("operation needs K > 0, got K = {}", cd.k)))
    }
}

/// `∫_0^{π_κ} sin_κ^{N-1}(r) dr` for `κ = K/(N-1) > 0`: the mass of `I_{K,N}`.
pub fn model_mass(cd: &CurvatureDimension) -> Result<f64> {
    let kappa = require_positive_k(cd)?;
    let len = PI / kappa.sqrt();
    let e = cd.n - 1.0;
    quad::integrate(
        |r| sin_kappa(kappa, r).max(0.0).powf(e),
        0.0,
        len,
        Tolerance::DEFAULT,
    )
}

/// Volume of the round `n`-sphere of curvature `κ > 0`.
pub fn sphere_volume(n: u32, kappa: f64) -> f64 {
    // vol(S⁰) = 2, vol(S¹) = 2π, vol(Sⁿ) = 2π/(n-1) · vol(Sⁿ⁻²)
    let mut unit = if n.is_multiple_of(2) { 2.0 } else { 2.0 * PI };
    let mut m = if n.is_multiple_of(2) { 0 } else { 1 };
    while m < n {
        m += 2;
        unit *= 2.0 * PI / (m as f64 - 1.0);
    }
    unit * kappa.powf(-(n as f64) / 2.0)
}

/// `∫_ℝ J_{H,K,N} = κ_eff^{(N-1)/2} ∫_0^{π_{K/(N-1)}} sin^{N-1}_{K/(N-1)}` for `K > 0`.
pub fn model_rhs_constant_h(p: &JacobianParams) -> Result<f64> {
    let mass = model_mass(&p.cd)?;
    Ok(kappa_eff(p).powf((p.cd.n - 1.0) / 2.0) * mass)
}

/// Model isoperimetric profile `I_{K,N,∞}(v)` for `K > 0`.
///
/// With `f(t) = c⁻¹ ∫_0^t sin_κ^{N-1}` the normalised model mass, the profile
/// is `f' ∘ f⁻¹`. The inverse is found by bisection because `f'` vanishes at
/// both ends of the model interval.
pub fn model_profile(cd: &CurvatureDimension, v: f64) -> Result<f64> {
    let kappa = require_positive_k(cd)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain {
            value: v,
            domain: "v in [0, 1]".into(),
        });
    }
    if v == 0.0 || v == 1.0 {
        return Ok(0.0);
    }
    let e = cd.n - 1.0;
    let density = |r: f64| sin_kappa(kappa, r).max(0.0).powf(e);
    let total = model_mass(cd)?;
    let len = PI / kappa.sqrt();

    // Use the symmetry f(len - t) = 1 - f(t) to always invert on the lower half,
    // where the cumulative integral is small and well conditioned.
    let target = v.min(1.0 - v) * total;
    let (mut lo, mut hi) = (0.0, 0.5 * len);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if quad::integrate(density, 0.0, mid, Tolerance::DEFAULT)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(density(0.5 * (lo + hi)) / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cd(k: f64, n: f64) -> CurvatureDimension {
        CurvatureDimension::new(k, n).unwrap()
    }

    fn jp(h: f64, k: f64, n: f64) -> JacobianParams {
        JacobianParams::new(h, cd(k, n)).unwrap()
    }

    #[test]
    fn trig_kappa_examples() {
        assert_eq!(trig_kappa(0.0, 5.0), (5.0, 1.0));
        let (s, c) = trig_kappa(1.0, PI / 2.0);
        assert!((s - 1.0).abs() < 1e-15 && c.abs() < 1e-15);
        let (s, c) = trig_kappa(4.0, PI / 4.0);
        assert!((s - 0.5).abs() < 1e-15 && c.abs() < 1e-15);
    }

    #[test]
    fn pythagorean_identity_on_grid() {
        for &kappa in &[-3.0, -0.5, 0.0, 0.25, 1.0, 4.0] {
            for i in -40..=40 {
                let r = i as f64 * 0.05;
                let (s, c) = trig_kappa(kappa, r);
                let lhs = c * c + kappa * s * s;
                assert!((lhs - 1.0).abs() < 1e-12, "κ={kappa} r={r}: {lhs}");
            }
        }
    }

    #[test]
    fn pi_kappa_examples() {
        assert_eq!(pi_kappa(0.0), ExtReal::PosInfinity);
        assert_eq!(pi_kappa(-1.0), ExtReal::PosInfinity);
        assert_eq!(pi_kappa(1.0), ExtReal::Finite(PI));
        assert_eq!(pi_kappa(4.0), ExtReal::Finite(PI / 2.0));
    }

    #[test]
    fn curvature_dimension_rejects_small_n() {
        assert!(CurvatureDimension::new(0.0, 1.0).is_err());
        assert!(CurvatureDimension::new(0.0, f64::INFINITY).is_err());
        assert!(CurvatureDimension::new(f64::NAN, 2.0).is_err());
        assert!(CurvatureDimension::new(-2.0, 1.5).is_ok());
    }

    #[test]
    fn sigma_examples() {
        for &t in &[0.0, 0.3, 1.0] {
            assert_eq!(sigma(3.0, 2.0, t, 0.0).unwrap(), ExtReal::Finite(t));
            assert_eq!(sigma(0.0, 2.0, t, 1.7).unwrap(), ExtReal::Finite(t));
        }
        let s = sigma(1.0, 1.0, 0.5, PI / 2.0).unwrap().finite().unwrap();
        assert!((s - (PI / 4.0).sin()).abs() < 1e-15);
    }

    #[test]
    fn sigma_is_infinite_at_conjugate_radius() {
        assert_eq!(sigma(1.0, 1.0, 0.5, PI).unwrap(), ExtReal::PosInfinity);
        assert_eq!(sigma(1.0, 1.0, 0.5, 4.0).unwrap(), ExtReal::PosInfinity);
    }

    #[test]
    fn sigma_rejects_out_of_domain() {
        assert!(matches!(
            sigma(0.0, 2.0, 1.5, 1.0),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            sigma(0.0, 2.0, -0.1, 1.0),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            sigma(0.0, 2.0, 0.5, -1.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(2.0, 1.0, 0.4, 0.3).unwrap(), ExtReal::PosInfinity);
        assert_eq!(tau(2.0, 1.0, 0.4, 0.0).unwrap(), ExtReal::ZERO);
        for &t in &[0.0, 0.25, 1.0] {
            let v = tau(0.0, 3.0, t, 2.0).unwrap().finite().unwrap();
            assert!((v - t).abs() < 1e-15);
            let v = tau(5.0, 2.5, t, 0.0).unwrap().finite().unwrap();
            assert!((v - t).abs() < 1e-15);
        }
    }

    #[test]
    fn jacobian_examples() {
        for &(h, k, n) in &[(0.3, 1.0, 2.0), (-2.0, 0.0, 3.5), (1.0, -1.0, 4.0)] {
            assert_eq!(jacobian(&jp(h, k, n), 0.0), 1.0);
        }
        for i in -10..=10 {
            assert_eq!(jacobian(&jp(0.0, 0.0, 3.0), i as f64), 1.0);
        }
        // K = 0: (1 + H r/(N-1))₊^{N-1}
        let p = jp(1.5, 0.0, 3.0);
        for &r in &[-1.0, -0.2, 0.0, 0.7, 3.0] {
            let expect = (1.0 + 1.5 * r / 2.0_f64).max(0.0).powi(2);
            assert!((jacobian(&p, r) - expect).abs() < 1e-14);
        }
        assert_eq!(jacobian(&p, -2.0), 0.0);
    }

    #[test]
    fn jacobian_matches_shifted_sine() {
        // H = (N-1) cot r0 with K = N-1 gives (sin(r0 + r)/sin r0)^{N-1}
        for &n in &[2.0, 3.0, 4.5] {
            for &r0 in &[0.3f64, 1.0, 2.5] {
                let p = jp((n - 1.0) / r0.tan(), n - 1.0, n);
                for i in 0..=40 {
                    let r = -r0 + (PI) * i as f64 / 40.0;
                    let expect = ((r0 + r).sin() / r0.sin()).max(0.0).powf(n - 1.0);
                    let got = jacobian(&p, r);
                    assert!((got - expect).abs() < 1e-12, "n={n} r0={r0} r={r}");
                }
            }
        }
    }

    #[test]
    fn jacobian_vanishes_past_first_zero() {
        // κ = 1, H = 0: support (-π/2, π/2); the (cos)₊ recurrence at 3π/2 is excluded
        let p = jp(0.0, 1.0, 2.0);
        assert_eq!(jacobian(&p, 1.6 * PI), 0.0);
        assert!(jacobian(&p, 1.4) > 0.0);
    }

    #[test]
    fn jacobian_support_examples() {
        let (lo, hi) = jacobian_support(&jp(0.0, 2.0, 3.0));
        assert!((lo.to_f64() + PI / 2.0).abs() < 1e-15);
        assert!((hi.to_f64() - PI / 2.0).abs() < 1e-15);
        assert_eq!(
            jacobian_support(&jp(0.0, 0.0, 3.0)),
            (ExtReal::NegInfinity, ExtReal::PosInfinity)
        );
        assert_eq!(
            jacobian_support(&jp(1.0, 0.0, 2.0)),
            (ExtReal::Finite(-1.0), ExtReal::PosInfinity)
        );
    }

    #[test]
    fn jacobian_support_negative_curvature() {
        // κ = -1, H/(N-1) = 2: cosh r + 2 sinh r vanishes at tanh r = -1/2
        let p = jp(2.0, -1.0, 2.0);
        let (lo, hi) = jacobian_support(&p);
        assert_eq!(hi, ExtReal::PosInfinity);
        let z = lo.to_f64();
        assert!((z.cosh() + 2.0 * z.sinh()).abs() < 1e-14);
        assert_eq!(
            jacobian_support(&jp(0.5, -1.0, 2.0)),
            (ExtReal::NegInfinity, ExtReal::PosInfinity)
        );
    }

    #[test]
    fn kappa_eff_examples() {
        assert_eq!(kappa_eff(&jp(0.0, 1.0, 2.0)), 1.0);
        assert_eq!(kappa_eff(&jp(1.0, 1.0, 2.0)), 2.0);
        assert_eq!(kappa_eff(&jp(3.0, 8.0, 5.0)), 2.5625);
    }

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume(0, 1.0) - 2.0).abs() < 1e-15);
        assert!((sphere_volume(1, 1.0) - 2.0 * PI).abs() < 1e-15);
        assert!((sphere_volume(2, 1.0) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(3, 1.0) - 2.0 * PI * PI).abs() < 1e-13);
        // radius 2 sphere: κ = 1/4, area 16π
        assert!((sphere_volume(2, 0.25) - 16.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn model_mass_matches_sphere_quotient() {
        // ∫_0^{π_κ} sin_κ^{N-1} = vol(S^N_κ)/vol(S^{N-1}_1) for integer N
        for &(k, n) in &[(1.0, 2.0), (2.0, 3.0), (6.0, 4.0), (0.5, 3.0)] {
            let c = cd(k, n);
            let m = model_mass(&c).unwrap();
            let expect = sphere_volume(n as u32, c.kappa()) / sphere_volume(n as u32 - 1, 1.0);
            assert!(
                (m - expect).abs() < 1e-10 * expect,
                "({k},{n}): {m} vs {expect}"
            );
        }
    }

    #[test]
    fn model_rhs_examples() {
        let v = model_rhs_constant_h(&jp(0.0, 1.0, 2.0)).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let v = model_rhs_constant_h(&jp(1.0, 1.0, 2.0)).unwrap();
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!(model_rhs_constant_h(&jp(1.0, 0.0, 2.0)).is_err());
    }

    #[test]
    fn model_rhs_matches_direct_quadrature() {
        for &(h, k, n) in &[
            (0.0, 1.0, 2.0),
            (1.0, 1.0, 2.0),
            (-2.0, 3.0, 4.5),
            (0.7, 0.4, 1.5),
        ] {
            let p = jp(h, k, n);
            let (lo, hi) = jacobian_support(&p);
            let direct =
                jacobian_integral(&p, lo.to_f64(), hi.to_f64(), Tolerance::DEFAULT).unwrap();
            let closed = model_rhs_constant_h(&p).unwrap();
            assert!(
                (direct - closed).abs() < 1e-9 * closed,
                "({h},{k},{n}): {direct} vs {closed}"
            );
        }
    }

    #[test]
    fn model_profile_examples() {
        let c = cd(1.0, 2.0);
        assert!((model_profile(&c, 0.5).unwrap() - 0.5).abs() < 1e-10);
        assert_eq!(model_profile(&c, 0.0).unwrap(), 0.0);
        assert_eq!(model_profile(&c, 1.0).unwrap(), 0.0);
        assert!(model_profile(&cd(0.0, 2.0), 0.5).is_err());
        assert!(model_profile(&c, 1.2).is_err());
    }

    #[test]
    fn model_profile_of_round_sphere_is_closed_form() {
        // S²: f(t) = (1 - cos t)/2, f'(t) = sin t / 2 = √(v(1-v))
        let c = cd(1.0, 2.0);
        for i in 1..20 {
            let v = i as f64 / 20.0;
            let got = model_profile(&c, v).unwrap();
            assert!((got - (v * (1.0 - v)).sqrt()).abs() < 1e-10, "v={v}");
        }
    }

    #[test]
    fn model_profile_symmetry_and_concavity() {
        for &(k, n) in &[(1.0, 2.0), (2.0, 3.0), (1.0, 4.5)] {
            let c = cd(k, n);
            let grid: Vec<f64> = (0..=50)
                .map(|i| model_profile(&c, i as f64 / 50.0).unwrap())
                .collect();
            for i in 0..=50 {
                assert!((grid[i] - grid[50 - i]).abs() < 1e-9);
            }
            for w in grid.windows(3) {
                assert!(w[0] - 2.0 * w[1] + w[2] <= 1e-9);
            }
        }
    }

    #[test]
    fn log_derivative_at_zero_is_h() {
        for &(h, k, n) in &[(0.5, 1.0, 2.0), (-1.3, 0.0, 3.0), (2.0, -1.0, 5.5)] {
            let p = jp(h, k, n);
            let step = 1e-7;
            let fd = (jacobian(&p, step).ln() - jacobian(&p, 0.0).ln()) / step;
            assert!((fd - h).abs() < 1e-5, "({h},{k},{n}): {fd}");
        }
    }

    #[test]
    fn stated_k_monotonicity_fails_for_positive_r() {
        // Increasing K shrinks J on r > 0; see model1d property tests for the true directions.
        assert!(jacobian(&jp(0.0, 0.0, 2.0), 0.5) > jacobian(&jp(0.0, 1.0, 2.0), 0.5));
    }

    proptest! {
        #[test]
        fn jacobian_nondecreasing_in_h(
            h in -5.0..5.0f64, dh in 0.0..3.0f64, k in -3.0..3.0f64,
            n in 1.1..8.0f64, r in 0.0..3.0f64,
        ) {
            let a = jacobian(&jp(h, k, n), r);
            let b = jacobian(&jp(h + dh, k, n), r);
            prop_assert!(b >= a - 1e-12 * a.max(1.0));
        }

        #[test]
        fn jacobian_nonincreasing_in_k(
            h in -5.0..5.0f64, k in -3.0..3.0f64, dk in 0.0..3.0f64,
            n in 1.1..8.0f64, r in 0.0..3.0f64,
        ) {
            let a = jacobian(&jp(h, k, n), r);
            let b = jacobian(&jp(h, k + dk, n), r);
            prop_assert!(b <= a + 1e-12 * a.max(1.0));
        }

        #[test]
        fn jacobian_nondecreasing_in_n(
            h in -5.0..5.0f64, k in -3.0..3.0f64,
            n in 1.1..8.0f64, dn in 0.0..4.0f64, r in 0.0..3.0f64,
        ) {
            let a = jacobian(&jp(h, k, n), r);
            let b = jacobian(&jp(h, k, n + dn), r);
            prop_assert!(b >= a - 1e-12 * a.max(1.0));
        }

        #[test]
        fn reflection_identity(h in -5.0..5.0f64, k in -3.0..3.0f64, n in 1.1..8.0f64, r in -3.0..3.0f64) {
            let p = jp(h, k, n);
            let a = jacobian(&p.reflected(), r);
            let b = jacobian(&p, -r);
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }
}
