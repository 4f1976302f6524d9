//! Heintze–Karcher bounds, their closed-form corollaries, the Lévy–Gromov
//! comparison, and rigidity detection.

use std::fmt;

use crate::error::{param, Error, Result};
use crate::ext::ExtReal;
use crate::geometry::{self, NeedleDecomposition, TubeSide};
use crate::model1d::{self, JacobianParams};
use crate::needle::{self, Needle, INEQUALITY_SLACK};
use crate::quad::Tolerance;

/// Relative tolerance below which a gap counts as equality.
pub const DEFAULT_EQUALITY_TOLERANCE: f64 = 1e-8;

/// Which bound a report evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statement {
    /// `m(S_t^+) ≤ ∫∫_0^t J_{H⁺}`.
    HkOuter,
    /// `m(X) ≤ ∫∫_{[-D,D]} J_H`.
    HkFull,
    /// `m(X) ≤ m_S(S) ∫_{[-D,D]} J_{H0}` for `H ≤ H0`.
    ConstantH,
    /// `m(X) ≤ diam · m_S(S)` for `K ≥ 0`, `H⁺ ≤ 0` and `H⁻ ≤ 0`.
    Diameter,
    /// `m(X) ≤ ∫_0^{π_κ} sin_κ^{N-1} · ∫ κ_eff^{(N-1)/2} dm_S` for `K > 0`.
    PositiveK,
    /// The `K > 0` bound with the model mass written as a sphere volume ratio.
    SphereVolume,
}

impl Statement {
    pub fn tag(self) -> &'static str {
        match self {
            Statement::HkOuter => "hk-outer",
            Statement::HkFull => "hk-full",
            Statement::ConstantH => "corollary-constant-h",
            Statement::Diameter => "corollary-diameter",
            Statement::PositiveK => "corollary-positive-k",
            Statement::SphereVolume => "corollary-sphere-volume",
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeedleContribution {
    pub h_plus: f64,
    pub h_minus: f64,
    /// Curvature the bound was evaluated with.
    pub h: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `h(r) = h(0) J(r)` on the grid points the bound covers.
    pub profile_match: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HKReport {
    pub statement: Statement,
    /// Tube radius for [`Statement::HkOuter`].
    pub t: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub relative_gap: f64,
    pub equality: bool,
    pub per_needle: Vec<NeedleContribution>,
}

impl HKReport {
    fn finish(
        statement: Statement,
        t: Option<f64>,
        lhs: f64,
        rhs: f64,
        per_needle: Vec<NeedleContribution>,
        tolerance: f64,
    ) -> Result<Self> {
        let gap = rhs - lhs;
        if gap < -INEQUALITY_SLACK * rhs.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::Defect {
                statement: statement.tag().into(),
                lhs,
                rhs,
            });
        }
        let relative_gap = if rhs > 0.0 { gap / rhs } else { gap };
        Ok(HKReport {
            statement,
            t,
            lhs,
            rhs,
            gap,
            relative_gap,
            equality: relative_gap.abs() < tolerance,
            per_needle,
        })
    }
}

fn jp(h: f64, dec: &NeedleDecomposition) -> Result<JacobianParams> {
    JacobianParams::new(h, dec.cd)
}

/// `h(r) = h(0) J(r)` within `tol` (relative to `max h`) on grid points in `[lo, hi]`.
fn profile_matches(n: &Needle, p: &JacobianParams, lo: f64, hi: f64, tol: f64) -> bool {
    let profile = n.profile();
    let h0 = profile.eval(0.0);
    let scale = profile.samples().iter().copied().fold(h0, f64::max);
    profile
        .grid()
        .filter(|&r| lo <= r && r <= hi)
        .all(|r| (profile.eval(r) - h0 * model1d::jacobian(p, r)).abs() <= tol * scale)
}

/// Outer bound: `m(S_t^+) ≤ Σ weight·h(0)·∫_0^t J_{H⁺}`.
pub fn hk_outer(dec: &NeedleDecomposition, t: f64) -> Result<HKReport> {
    hk_outer_with(dec, t, DEFAULT_EQUALITY_TOLERANCE)
}

pub fn hk_outer_with(dec: &NeedleDecomposition, t: f64, tolerance: f64) -> Result<HKReport> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(param(format!("tube radius must be positive, got {t}")));
    }
    let lhs = geometry::tube_volume(dec, t, TubeSide::Outer)?;
    let mut rhs = 0.0;
    let mut per_needle = Vec::with_capacity(dec.needles.len());
    for (n, c) in dec.needles.iter().zip(&dec.curvature) {
        let p = jp(c.plus, dec)?;
        let h0 = n.profile().eval(0.0);
        let r = n.weight() * h0 * model1d::jacobian_integral(&p, 0.0, t, Tolerance::DEFAULT)?;
        let top = t.min(n.profile().b());
        per_needle.push(NeedleContribution {
            h_plus: c.plus,
            h_minus: c.minus,
            h: c.plus,
            lhs: n.weight() * n.profile().integral_over(0.0, top)?,
            rhs: r,
            profile_match: profile_matches(n, &p, 0.0, top, tolerance),
        });
        rhs += r;
    }
    HKReport::finish(Statement::HkOuter, Some(t), lhs, rhs, per_needle, tolerance)
}

/// `weight·h(0)·∫_{-D}^{D} J_H`, the inner half taken as `∫_0^D J_{-H}`.
fn full_contribution(dec: &NeedleDecomposition, n: &Needle, h: f64) -> Result<f64> {
    let p = jp(h, dec)?;
    let d = dec.diameter;
    let outer = model1d::jacobian_integral(&p, 0.0, d, Tolerance::DEFAULT)?;
    let inner = model1d::jacobian_integral(&p.reflected(), 0.0, d, Tolerance::DEFAULT)?;
    Ok(n.weight() * n.profile().eval(0.0) * (outer + inner))
}

/// Right-hand side of the full bound with per-needle curvatures replaced by `hs`.
pub fn full_rhs_with_curvatures(dec: &NeedleDecomposition, hs: &[f64]) -> Result<f64> {
    if hs.len() != dec.needles.len() {
        return Err(param(format!(
            "expected {} curvatures, got {}",
            dec.needles.len(),
            hs.len()
        )));
    }
    let mut rhs = 0.0;
    for (n, &h) in dec.needles.iter().zip(hs) {
        rhs += full_contribution(dec, n, h)?;
    }
    Ok(rhs)
}

/// Full bound: `m(X) ≤ Σ weight·h(0)·∫_{-D}^{D} J_H`.
pub fn hk_full(dec: &NeedleDecomposition) -> Result<HKReport> {
    hk_full_with(dec, DEFAULT_EQUALITY_TOLERANCE)
}

pub fn hk_full_with(dec: &NeedleDecomposition, tolerance: f64) -> Result<HKReport> {
    let mut rhs = 0.0;
    let mut per_needle = Vec::with_capacity(dec.needles.len());
    for (n, c) in dec.needles.iter().zip(&dec.curvature) {
        let r = full_contribution(dec, n, c.h)?;
        let p = jp(c.h, dec)?;
        per_needle.push(NeedleContribution {
            h_plus: c.plus,
            h_minus: c.minus,
            h: c.h,
            lhs: needle::needle_mass(n)?,
            rhs: r,
            profile_match: profile_matches(n, &p, n.profile().a(), n.profile().b(), tolerance),
        });
        rhs += r;
    }
    HKReport::finish(
        Statement::HkFull,
        None,
        dec.total_mass,
        rhs,
        per_needle,
        tolerance,
    )
}

/// One corollary of the full bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Branch {
    ConstantH(f64),
    Diameter,
    PositiveK,
    SphereVolume,
}

fn contributions<F>(
    dec: &NeedleDecomposition,
    mut rhs_of: F,
) -> Result<(f64, Vec<NeedleContribution>)>
where
    F: FnMut(&Needle, f64) -> Result<f64>,
{
    let mut rhs = 0.0;
    let mut per_needle = Vec::with_capacity(dec.needles.len());
    for (n, c) in dec.needles.iter().zip(&dec.curvature) {
        let r = rhs_of(n, c.h)?;
        let p = jp(c.h, dec)?;
        per_needle.push(NeedleContribution {
            h_plus: c.plus,
            h_minus: c.minus,
            h: c.h,
            lhs: needle::needle_mass(n)?,
            rhs: r,
            profile_match: profile_matches(
                n,
                &p,
                n.profile().a(),
                n.profile().b(),
                DEFAULT_EQUALITY_TOLERANCE,
            ),
        });
        rhs += r;
    }
    Ok((rhs, per_needle))
}

fn max_curvature(dec: &NeedleDecomposition) -> f64 {
    dec.curvature
        .iter()
        .map(|c| c.h)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Evaluates one corollary bound, checking its hypotheses first.
pub fn closed_form_bound(dec: &NeedleDecomposition, branch: Branch) -> Result<HKReport> {
    closed_form_bound_with(dec, branch, DEFAULT_EQUALITY_TOLERANCE)
}

pub fn closed_form_bound_with(
    dec: &NeedleDecomposition,
    branch: Branch,
    tolerance: f64,
) -> Result<HKReport> {
    let cd = dec.cd;
    let h_max = max_curvature(dec);
    let (statement, (rhs, per_needle)) = match branch {
        Branch::ConstantH(h0) => {
            if !h0.is_finite() {
                return Err(param(format!("H0 must be finite, got {h0}")));
            }
            if h_max > h0 + INEQUALITY_SLACK * h0.abs().max(1.0) {
                return Err(Error::Precondition(format!(
                    "mean curvature {h_max} exceeds H0 = {h0}"
                )));
            }
            let per_unit = full_contribution_unit(dec, h0)?;
            (
                Statement::ConstantH,
                contributions(dec, |n, _| {
                    Ok(n.weight() * n.profile().eval(0.0) * per_unit)
                })?,
            )
        }
        Branch::Diameter => {
            if cd.k() < 0.0 {
                return Err(Error::Precondition(format!(
                    "diameter bound needs K >= 0, got K = {}",
                    cd.k()
                )));
            }
            // Both sides of the proof need J ≤ 1 on r > 0, so both one-sided
            // curvatures must be non-positive.
            let one_sided = dec
                .curvature
                .iter()
                .map(|c| c.plus.max(c.minus))
                .fold(f64::NEG_INFINITY, f64::max);
            if one_sided > INEQUALITY_SLACK {
                return Err(Error::Precondition(format!(
                    "diameter bound needs H⁺ <= 0 and H⁻ <= 0, got max {one_sided}"
                )));
            }
            let d = dec.diameter;
            (
                Statement::Diameter,
                contributions(dec, |n, _| Ok(d * n.weight() * n.profile().eval(0.0)))?,
            )
        }
        Branch::PositiveK | Branch::SphereVolume => {
            if cd.k() <= 0.0 {
                return Err(Error::Precondition(format!(
                    "positive-curvature bound needs K > 0, got K = {}",
                    cd.k()
                )));
            }
            let (statement, mass) = if branch == Branch::PositiveK {
                (Statement::PositiveK, model1d::model_mass(&cd)?)
            } else {
                let n = cd.n();
                if n.fract() != 0.0 || n > u32::MAX as f64 {
                    return Err(Error::Precondition(format!(
                        "sphere-volume form needs integer N, got N = {n}"
                    )));
                }
                let n = n as u32;
                (
                    Statement::SphereVolume,
                    model1d::sphere_volume(n, cd.kappa()) / model1d::sphere_volume(n - 1, 1.0),
                )
            };
            let e = (cd.n() - 1.0) / 2.0;
            (
                statement,
                contributions(dec, |n, h| {
                    let k = model1d::kappa_eff(&jp(h, dec)?);
                    Ok(mass * n.weight() * n.profile().eval(0.0) * k.powf(e))
                })?,
            )
        }
    };
    HKReport::finish(statement, None, dec.total_mass, rhs, per_needle, tolerance)
}

fn full_contribution_unit(dec: &NeedleDecomposition, h: f64) -> Result<f64> {
    let p = jp(h, dec)?;
    let d = dec.diameter;
    model1d::jacobian_integral(&p, -d, d, Tolerance::DEFAULT)
}

/// Every corollary whose hypotheses hold. The constant-curvature bound is
/// included only when `h0` is given, and then its hypothesis is enforced.
pub fn closed_form_bounds(dec: &NeedleDecomposition, h0: Option<f64>) -> Result<Vec<HKReport>> {
    closed_form_bounds_with(dec, h0, DEFAULT_EQUALITY_TOLERANCE)
}

pub fn closed_form_bounds_with(
    dec: &NeedleDecomposition,
    h0: Option<f64>,
    tolerance: f64,
) -> Result<Vec<HKReport>> {
    let mut out = Vec::new();
    if let Some(h0) = h0 {
        out.push(closed_form_bound_with(
            dec,
            Branch::ConstantH(h0),
            tolerance,
        )?);
    }
    for branch in [Branch::Diameter, Branch::PositiveK, Branch::SphereVolume] {
        match closed_form_bound_with(dec, branch, tolerance) {
            Ok(r) => out.push(r),
            Err(Error::Precondition(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevyGromovReport {
    /// `m̄⁺(Ω)`: outer Minkowski content over total mass.
    pub content: f64,
    /// `m(Ω)/m(X)`.
    pub volume_fraction: f64,
    /// `I_{K,N,∞}(m(Ω)/m(X))`.
    pub profile_value: f64,
    pub pass: bool,
    pub equality: bool,
}

/// Compares the normalised perimeter of `Ω` with the model profile.
pub fn levy_gromov_check(dec: &NeedleDecomposition) -> Result<LevyGromovReport> {
    levy_gromov_check_with(
        dec,
        &geometry::default_epsilons(),
        DEFAULT_EQUALITY_TOLERANCE,
    )
}

pub fn levy_gromov_check_with(
    dec: &NeedleDecomposition,
    epsilons: &[f64],
    tolerance: f64,
) -> Result<LevyGromovReport> {
    if dec.cd.k() <= 0.0 {
        return Err(param(format!(
            "Lévy–Gromov comparison needs K > 0, got K = {}",
            dec.cd.k()
        )));
    }
    let total = dec.total_mass;
    let content = geometry::minkowski_content_of(dec, epsilons)? / total;
    let inside = geometry::tube_volume(dec, dec.diameter, TubeSide::Inner)?;
    let volume_fraction = (inside / total).clamp(0.0, 1.0);
    let profile_value = model1d::model_profile(&dec.cd, volume_fraction)?;
    Ok(LevyGromovReport {
        content,
        volume_fraction,
        profile_value,
        pass: content >= profile_value - INEQUALITY_SLACK,
        equality: (content - profile_value).abs()
            <= tolerance * profile_value.max(f64::MIN_POSITIVE),
    })
}

/// Which rigidity condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RigidityFailure {
    /// The full bound is not attained.
    Gap,
    /// A needle density is not a multiple of the model Jacobian.
    Profile,
    /// A needle does not span the whole support of its Jacobian.
    Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidityReport {
    pub rigid: bool,
    pub gap: f64,
    pub relative_gap: f64,
    pub per_needle_match: Vec<bool>,
    pub per_needle_span: Vec<bool>,
    pub failures: Vec<RigidityFailure>,
}

/// Detects the equality case of the full bound.
pub fn equality_detect(dec: &NeedleDecomposition, tolerance: f64) -> Result<RigidityReport> {
    if dec.cd.k() <= 0.0 {
        return Err(param(format!(
            "rigidity detection needs K > 0, got K = {}",
            dec.cd.k()
        )));
    }
    if !(tolerance > 0.0) {
        return Err(param(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let full = hk_full_with(dec, tolerance)?;
    let per_needle_match: Vec<bool> = full.per_needle.iter().map(|c| c.profile_match).collect();
    let mut per_needle_span = Vec::with_capacity(dec.needles.len());
    for (n, c) in dec.needles.iter().zip(&dec.curvature) {
        let (lo, hi) = model1d::jacobian_support(&jp(c.h, dec)?);
        let close = |end: ExtReal, x: f64| match end {
            ExtReal::Finite(e) => (e - x).abs() <= tolerance * dec.diameter,
            _ => false,
        };
        per_needle_span.push(close(lo, n.profile().a()) && close(hi, n.profile().b()));
    }
    let mut failures = Vec::new();
    if full.relative_gap.abs() >= tolerance {
        failures.push(RigidityFailure::Gap);
    }
    if per_needle_match.iter().any(|m| !m) {
        failures.push(RigidityFailure::Profile);
    }
    if per_needle_span.iter().any(|m| !m) {
        failures.push(RigidityFailure::Span);
    }
    Ok(RigidityReport {
        rigid: failures.is_empty(),
        gap: full.gap,
        relative_gap: full.relative_gap,
        per_needle_match,
        per_needle_span,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{decompose, GeometrySpec, SurfaceSpec};
    use crate::model1d::CurvatureDimension;
    use crate::needle::DensityProfile;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn sphere(r0: f64) -> NeedleDecomposition {
        decompose(
            &GeometrySpec::round_sphere(2, 1.0).unwrap(),
            &SurfaceSpec::GeodesicSphere { r0 },
        )
        .unwrap()
    }

    fn model(k: f64, n: f64, r0: f64) -> NeedleDecomposition {
        let cd = CurvatureDimension::new(k, n).unwrap();
        decompose(
            &GeometrySpec::model_interval(cd).unwrap(),
            &SurfaceSpec::LevelPoint { r0 },
        )
        .unwrap()
    }

    fn truncated(delta: f64) -> NeedleDecomposition {
        let cd = CurvatureDimension::new(1.0, 2.0).unwrap();
        let g = GeometrySpec::truncated_model_interval(cd, PI - delta).unwrap();
        decompose(&g, &SurfaceSpec::LevelPoint { r0: PI / 2.0 }).unwrap()
    }

    #[test]
    fn outer_bound_on_the_equator() {
        let r = hk_outer(&sphere(PI / 2.0), PI / 4.0).unwrap();
        let expect = 2.0 * PI * (PI / 4.0).sin();
        assert!(rel(r.lhs, expect) < 1e-12 && rel(r.rhs, expect) < 1e-12);
        assert!(r.equality);
        assert!(r.per_needle.iter().all(|c| c.profile_match));
        assert_eq!(r.t, Some(PI / 4.0));
    }

    #[test]
    fn outer_bound_on_a_ball_shell() {
        let dec = decompose(
            &GeometrySpec::euclidean_ball(3, 1.0).unwrap(),
            &SurfaceSpec::GeodesicSphere { r0: 0.5 },
        )
        .unwrap();
        let r = hk_outer(&dec, 0.25).unwrap();
        let expect = 4.0 * PI / 3.0 * (0.75f64.powi(3) - 0.125);
        assert!(rel(r.lhs, expect) < 1e-12 && rel(r.rhs, expect) < 1e-12);
        assert!(r.equality);
    }

    #[test]
    fn outer_bound_first_order() {
        let dec = sphere(1.0);
        let t = 1e-6;
        let r = hk_outer(&dec, t).unwrap();
        assert!(rel(r.lhs / t, dec.surface_total) < 1e-5);
        assert!(rel(r.rhs / t, dec.surface_total) < 1e-5);
    }

    #[test]
    fn full_bound_examples() {
        let r = hk_full(&sphere(PI / 2.0)).unwrap();
        assert!(rel(r.lhs, 4.0 * PI) < 1e-12 && rel(r.rhs, 4.0 * PI) < 1e-10);
        assert!(r.equality);

        let r = hk_full(&truncated(0.1)).unwrap();
        assert!(rel(r.lhs, 1.0 + 0.1f64.cos()) < 1e-12);
        assert!(rel(r.rhs, 2.0) < 1e-10);
        assert!(r.gap > 0.004 && !r.equality);
    }

    #[test]
    fn outer_bound_is_monotone_in_curvature() {
        let dec = sphere(1.0);
        let n = &dec.needles[0];
        let mut last = 0.0;
        for i in 0..20 {
            let h = -3.0 + 0.3 * i as f64;
            let p = JacobianParams::new(h, dec.cd).unwrap();
            let rhs = n.weight()
                * n.profile().eval(0.0)
                * model1d::jacobian_integral(&p, 0.0, 1.0, Tolerance::DEFAULT).unwrap();
            assert!(rhs >= last * (1.0 - 1e-12));
            last = rhs;
        }
    }

    #[test]
    fn full_bound_is_even_in_curvature() {
        let dec = sphere(1.0);
        for &h in &[0.3, 1.0, 4.0] {
            let up = full_rhs_with_curvatures(&dec, &[h]).unwrap();
            let down = full_rhs_with_curvatures(&dec, &[-h]).unwrap();
            assert!(rel(up, down) < 1e-10);
            let closed = dec.surface_total * 2.0 * (1.0 + h * h).sqrt();
            assert!(rel(up, closed) < 1e-10);
        }
    }

    #[test]
    fn corollaries() {
        let dec = sphere(PI / 2.0);
        let r = closed_form_bound(&dec, Branch::SphereVolume).unwrap();
        assert!(rel(r.rhs, 4.0 * PI) < 1e-12 && r.equality);
        let r = closed_form_bound(&dec, Branch::PositiveK).unwrap();
        assert!(rel(r.rhs, 4.0 * PI) < 1e-10 && r.equality);

        let dec = decompose(
            &GeometrySpec::euclidean_ball(3, 1.0).unwrap(),
            &SurfaceSpec::GeodesicSphere { r0: 0.5 },
        )
        .unwrap();
        assert!(matches!(
            closed_form_bound(&dec, Branch::Diameter),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            closed_form_bound(&dec, Branch::PositiveK),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            closed_form_bound(&dec, Branch::ConstantH(3.0)),
            Err(Error::Precondition(_))
        ));

        let dec = model(1.0, 2.0, PI / 2.0);
        let r = closed_form_bound(&dec, Branch::ConstantH(0.0)).unwrap();
        assert!(rel(r.rhs, 2.0) < 1e-10 && r.equality);
        let all = closed_form_bounds(&dec, Some(0.0)).unwrap();
        let tags: Vec<_> = all.iter().map(|r| r.statement).collect();
        assert_eq!(
            tags,
            [
                Statement::ConstantH,
                Statement::Diameter,
                Statement::PositiveK,
                Statement::SphereVolume
            ]
        );
        let d = &all[1];
        assert!(rel(d.rhs, PI) < 1e-12 && d.gap > 0.0);
    }

    #[test]
    fn sphere_volume_form_needs_integer_dimension() {
        let dec = model(1.0, 4.5, 1.0);
        assert!(matches!(
            closed_form_bound(&dec, Branch::SphereVolume),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn positive_k_corollary_matches_full_bound() {
        for &(k, n) in &[(1.0, 2.0), (2.0, 3.0), (1.0, 4.5)] {
            for &r0 in &[0.4, 1.0] {
                let dec = model(k, n, r0);
                let full = hk_full(&dec).unwrap();
                let c = closed_form_bound(&dec, Branch::PositiveK).unwrap();
                assert!(rel(c.rhs, full.rhs) < 1e-9, "({k},{n}) r0={r0}");
            }
        }
    }

    #[test]
    fn levy_gromov_examples() {
        let r = levy_gromov_check(&sphere(PI / 2.0)).unwrap();
        assert!((r.content - 0.5).abs() < 1e-9 && (r.profile_value - 0.5).abs() < 1e-10);
        assert!(r.pass && r.equality);

        let r = levy_gromov_check(&model(1.0, 2.0, PI / 2.0)).unwrap();
        assert!((r.content - 0.5).abs() < 1e-9 && r.equality);

        let r = levy_gromov_check(&sphere(PI / 4.0)).unwrap();
        let expect = (PI / 4.0).sin() / 2.0;
        assert!(rel(r.content, expect) < 1e-8 && rel(r.profile_value, expect) < 1e-8);
        assert!(r.pass && r.equality);

        let dec = decompose(
            &GeometrySpec::euclidean_ball(3, 1.0).unwrap(),
            &SurfaceSpec::GeodesicSphere { r0: 0.5 },
        )
        .unwrap();
        assert!(matches!(levy_gromov_check(&dec), Err(Error::Parameter(_))));
    }

    #[test]
    fn rigidity_examples() {
        for &r0 in &[0.3, 1.0, PI / 2.0, 2.5] {
            let r = equality_detect(&sphere(r0), DEFAULT_EQUALITY_TOLERANCE).unwrap();
            assert!(r.rigid, "r0 = {r0}: {r:?}");
        }
        let cd = CurvatureDimension::new(1.0, 3.0).unwrap();
        let dec = decompose(
            &GeometrySpec::spherical_suspension(cd, 2.5).unwrap(),
            &SurfaceSpec::GeodesicSphere { r0: 0.8 },
        )
        .unwrap();
        assert!(equality_detect(&dec, 1e-8).unwrap().rigid);

        let r = equality_detect(&truncated(0.1), 1e-8).unwrap();
        assert!(!r.rigid && r.gap > 0.0);
        assert!(r.failures.contains(&RigidityFailure::Span));
        assert!(r.failures.contains(&RigidityFailure::Gap));
        assert_eq!(r.per_needle_match, [true]);
    }

    #[test]
    fn rigidity_flags_a_non_model_profile() {
        // sin(r) + 0.05 sin(2r)² stays CD-like near the base but is not a J profile
        let cd = CurvatureDimension::new(1.0, 2.0).unwrap();
        let density =
            DensityProfile::new(0.0, PI, |r: f64| r.sin() * (1.0 + 0.05 * r.sin().powi(2)))
                .unwrap();
        let g = GeometrySpec::weighted_interval(PI, density, cd).unwrap();
        let dec = decompose(&g, &SurfaceSpec::LevelPoint { r0: 1.0 }).unwrap();
        let r = equality_detect(&dec, 1e-8).unwrap();
        assert!(!r.rigid);
        assert!(r.failures.contains(&RigidityFailure::Profile));
    }

    #[test]
    fn rigidity_requires_positive_k() {
        let dec = decompose(
            &GeometrySpec::euclidean_ball(2, 1.0).unwrap(),
            &SurfaceSpec::GeodesicSphere { r0: 0.5 },
        )
        .unwrap();
        assert!(matches!(
            equality_detect(&dec, 1e-8),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn defect_is_raised_on_a_negative_gap() {
        let err = HKReport::finish(Statement::HkFull, None, 2.0, 1.0, vec![], 1e-8).unwrap_err();
        assert!(matches!(err, Error::Defect { .. }));
    }
}
