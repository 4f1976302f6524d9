//! Model metric measure spaces and their needle decompositions.
//!
//! Every geometry here is rotationally symmetric about a pole, and every
//! surface is a distance sphere about that pole. The transport rays of the
//! signed distance are then the radial geodesics, all congruent, so the
//! quotient collapses to a single representative needle whose weight carries
//! the full quotient mass. Needle densities are stored as probability
//! densities; the normaliser lives in the weight.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{param, Error, Result};
use crate::ext::ExtReal;
use crate::model1d::{self, CurvatureDimension};
use crate::needle::{self, one_sided_log_derivative, DensityProfile, Needle, Side};

#[derive(Clone)]
pub enum GeometrySpec {
    /// `([0, length], density dr)` satisfying `CD(K, N)`.
    WeightedInterval {
        length: f64,
        density: DensityProfile,
        cd: CurvatureDimension,
    },
    /// Round `n`-sphere of the given radius with its Riemannian volume.
    RoundSphere { n: u32, radius: f64 },
    /// Closed Euclidean `n`-ball with Lebesgue measure.
    EuclideanBall { n: u32, radius: f64 },
    /// `I_{K,N} ×_{sin_κ}^{N-1} Y` with `Y` reduced to its total measure.
    SphericalSuspension {
        cd: CurvatureDimension,
        base_volume: f64,
    },
}

impl fmt::Debug for GeometrySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometrySpec::WeightedInterval { length, cd, .. } => f
                .debug_struct("WeightedInterval")
                .field("length", length)
                .field("cd", cd)
                .finish_non_exhaustive(),
            GeometrySpec::RoundSphere { n, radius } => f
                .debug_struct("RoundSphere")
                .field("n", n)
                .field("radius", radius)
                .finish(),
            GeometrySpec::EuclideanBall { n, radius } => f
                .debug_struct("EuclideanBall")
                .field("n", n)
                .field("radius", radius)
                .finish(),
            GeometrySpec::SphericalSuspension { cd, base_volume } => f
                .debug_struct("SphericalSuspension")
                .field("cd", cd)
                .field("base_volume", base_volume)
                .finish(),
        }
    }
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(param(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

fn model_density(cd: CurvatureDimension, offset: f64) -> impl Fn(f64) -> f64 + Send + Sync + Clone {
    let kappa = cd.kappa();
    let e = cd.n() - 1.0;
    move |r: f64| model1d::sin_kappa(kappa, offset + r).max(0.0).powf(e)
}

fn model_log_derivative(
    cd: CurvatureDimension,
    offset: f64,
) -> impl Fn(f64, Side) -> f64 + Send + Sync {
    let kappa = cd.kappa();
    let e = cd.n() - 1.0;
    move |r: f64, _| {
        let (s, c) = model1d::trig_kappa(kappa, offset + r);
        e * c / s
    }
}

impl GeometrySpec {
    pub fn weighted_interval(
        length: f64,
        density: DensityProfile,
        cd: CurvatureDimension,
    ) -> Result<Self> {
        positive("interval length", length)?;
        if density.a() != 0.0 || (density.b() - length).abs() > 1e-12 * length {
            return Err(param(format!(
                "density must live on [0, {length}], got [{}, {}]",
                density.a(),
                density.b()
            )));
        }
        Ok(GeometrySpec::WeightedInterval {
            length,
            density,
            cd,
        })
    }

    /// The model space `I_{K,N} = ([0, π_{K/(N-1)}], sin_{K/(N-1)}^{N-1} dr)`.
    pub fn model_interval(cd: CurvatureDimension) -> Result<Self> {
        let length = cd
            .model_diameter()
            .finite()
            .ok_or_else(|| param(format!("model interval needs K > 0, got K = {}", cd.k())))?;
        Self::truncated_model_interval(cd, length)
    }

    /// `([0, length], sin_{K/(N-1)}^{N-1} dr)` for `length ≤ π_{K/(N-1)}`.
    pub fn truncated_model_interval(cd: CurvatureDimension, length: f64) -> Result<Self> {
        positive("interval length", length)?;
        if let ExtReal::Finite(full) = cd.model_diameter() {
            if length > full * (1.0 + 1e-12) {
                return Err(param(format!(
                    "interval length {length} exceeds the model diameter {full}"
                )));
            }
        }
        let density = DensityProfile::new(0.0, length, model_density(cd, 0.0))?
            .with_log_derivative(model_log_derivative(cd, 0.0));
        Self::weighted_interval(length, density, cd)
    }

    pub fn round_sphere(n: u32, radius: f64) -> Result<Self> {
        if n < 2 {
            return Err(param(format!("round sphere needs n >= 2, got {n}")));
        }
        positive("sphere radius", radius)?;
        Ok(GeometrySpec::RoundSphere { n, radius })
    }

    pub fn euclidean_ball(n: u32, radius: f64) -> Result<Self> {
        if n < 2 {
            return Err(param(format!("Euclidean ball needs n >= 2, got {n}")));
        }
        positive("ball radius", radius)?;
        Ok(GeometrySpec::EuclideanBall { n, radius })
    }

    pub fn spherical_suspension(cd: CurvatureDimension, base_volume: f64) -> Result<Self> {
        if cd.k() <= 0.0 {
            return Err(param(format!(
                "spherical suspension needs K > 0, got K = {}",
                cd.k()
            )));
        }
        positive("base volume", base_volume)?;
        Ok(GeometrySpec::SphericalSuspension { cd, base_volume })
    }

    pub fn cd(&self) -> CurvatureDimension {
        match self {
            GeometrySpec::WeightedInterval { cd, .. } => *cd,
            GeometrySpec::RoundSphere { n, radius } => {
                let n = *n as f64;
                CurvatureDimension::new((n - 1.0) / (radius * radius), n).expect("n >= 2")
            }
            GeometrySpec::EuclideanBall { n, .. } => {
                CurvatureDimension::new(0.0, *n as f64).expect("n >= 2")
            }
            GeometrySpec::SphericalSuspension { cd, .. } => *cd,
        }
    }

    /// Range `[0, end]` of the radial coordinate (distance from the pole).
    pub fn radial_range(&self) -> (f64, f64) {
        let end = match self {
            GeometrySpec::WeightedInterval { length, .. } => *length,
            GeometrySpec::RoundSphere { radius, .. } => PI * radius,
            GeometrySpec::EuclideanBall { radius, .. } => *radius,
            GeometrySpec::SphericalSuspension { cd, .. } => cd.model_diameter().to_f64(),
        };
        (0.0, end)
    }

    /// `diam_X` in closed form.
    pub fn diameter(&self) -> f64 {
        match self {
            GeometrySpec::EuclideanBall { radius, .. } => 2.0 * radius,
            _ => self.radial_range().1,
        }
    }

    /// `m(X)`, by closed form where one exists.
    pub fn total_mass(&self) -> Result<f64> {
        match self {
            GeometrySpec::WeightedInterval { density, .. } => density.integral(),
            GeometrySpec::RoundSphere { n, radius } => {
                Ok(model1d::sphere_volume(*n, 1.0 / (radius * radius)))
            }
            GeometrySpec::EuclideanBall { n, radius } => {
                Ok(model1d::sphere_volume(n - 1, 1.0) * radius.powi(*n as i32) / *n as f64)
            }
            GeometrySpec::SphericalSuspension { cd, base_volume } => {
                Ok(base_volume * model1d::model_mass(cd)?)
            }
        }
    }
}

/// The surface `S = ∂Ω`, given by its radial position `r0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceSpec {
    /// `S = {r0}` and `Ω = [0, r0]` in a weighted interval.
    LevelPoint { r0: f64 },
    /// Distance sphere of radius `r0` about the pole; `Ω` is the closed ball.
    GeodesicSphere { r0: f64 },
}

impl SurfaceSpec {
    pub fn r0(&self) -> f64 {
        match self {
            SurfaceSpec::LevelPoint { r0 } | SurfaceSpec::GeodesicSphere { r0 } => *r0,
        }
    }

    /// Checks the surface kind matches the geometry and that `S` stays off
    /// the pole and the boundary.
    pub fn validate(&self, geom: &GeometrySpec) -> Result<()> {
        let kind_ok = matches!(
            (self, geom),
            (
                SurfaceSpec::LevelPoint { .. },
                GeometrySpec::WeightedInterval { .. }
            ) | (
                SurfaceSpec::GeodesicSphere { .. },
                GeometrySpec::RoundSphere { .. }
            ) | (
                SurfaceSpec::GeodesicSphere { .. },
                GeometrySpec::EuclideanBall { .. }
            ) | (
                SurfaceSpec::GeodesicSphere { .. },
                GeometrySpec::SphericalSuspension { .. }
            )
        );
        if !kind_ok {
            return Err(param(format!(
                "surface {self:?} does not apply to {geom:?}"
            )));
        }
        let r0 = self.r0();
        let (lo, hi) = geom.radial_range();
        if !r0.is_finite() {
            return Err(param(format!("surface radius must be finite, got {r0}")));
        }
        if r0 <= lo {
            return Err(Error::DegenerateSurface(format!(
                "surface touches pole (r0 = {r0} <= {lo})"
            )));
        }
        if r0 >= hi {
            return Err(Error::DegenerateSurface(format!(
                "surface touches the far end of the radial range (r0 = {r0} >= {hi})"
            )));
        }
        Ok(())
    }
}

/// `d_S(x)` for a point at radial coordinate `x`.
pub fn signed_distance(geom: &GeometrySpec, surf: &SurfaceSpec, x: f64) -> Result<f64> {
    let (lo, hi) = geom.radial_range();
    if !(lo <= x && x <= hi) {
        return Err(Error::Domain {
            value: x,
            domain: format!("radial coordinate in [{lo}, {hi}]"),
        });
    }
    Ok(x - surf.r0())
}

/// One-sided mean curvatures of the surface along one needle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCurvature {
    /// Outer: `d⁺/dr log h(0)`.
    pub plus: f64,
    /// Inner: the outer curvature seen from the complement, `d⁺/dr log h(-·)(0)`.
    pub minus: f64,
    /// `max(H⁺, -H⁻)`.
    pub h: f64,
}

#[derive(Debug, Clone)]
pub struct NeedleDecomposition {
    pub needles: Vec<Needle>,
    /// `m(X)` from the geometry's closed form, independent of the needles.
    pub total_mass: f64,
    pub diameter: f64,
    pub cd: CurvatureDimension,
    /// `m_S(S) = Σ weight · h(0)`.
    pub surface_total: f64,
    pub curvature: Vec<MeanCurvature>,
}

fn finite(value: ExtReal, what: &str) -> Result<f64> {
    value
        .finite()
        .ok_or_else(|| Error::InfiniteCurvature(format!("{what} = {value}")))
}

/// Mean curvature `(H⁺, H⁻, H)` for every needle of `needles`.
pub fn mean_curvature_of(needles: &[Needle]) -> Result<Vec<MeanCurvature>> {
    needles
        .iter()
        .map(|n| {
            if !n.is_regular() {
                return Err(Error::DegenerateSurface(format!(
                    "needle [{}, {}] has its base at an end",
                    n.profile().a(),
                    n.profile().b()
                )));
            }
            let plus = finite(
                one_sided_log_derivative(n.profile(), 0.0, Side::Plus)?,
                "H⁺",
            )?;
            let minus = -finite(
                one_sided_log_derivative(n.profile(), 0.0, Side::Minus)?,
                "d⁻ log h(0)",
            )?;
            Ok(MeanCurvature {
                plus,
                minus,
                h: plus.max(-minus),
            })
        })
        .collect()
}

/// Recomputes the per-needle mean curvatures of a decomposition.
pub fn mean_curvature_field(dec: &NeedleDecomposition) -> Result<Vec<MeanCurvature>> {
    mean_curvature_of(&dec.needles)
}

/// Builds the closed-form needle decomposition of `geom` along `d_S`.
pub fn decompose(geom: &GeometrySpec, surf: &SurfaceSpec) -> Result<NeedleDecomposition> {
    surf.validate(geom)?;
    let r0 = surf.r0();
    let total_mass = geom.total_mass()?;
    let (profile, weight) = match geom {
        GeometrySpec::WeightedInterval { density, .. } => {
            let mass = density.integral()?;
            (density.shifted(r0)?.scaled(1.0 / mass)?, mass)
        }
        GeometrySpec::RoundSphere { n, radius } => {
            let (n, radius) = (*n, *radius);
            let e = n as f64 - 1.0;
            let kappa = 1.0 / (radius * radius);
            // ∫_0^{πR} sin_κ^{n-1} = vol(Sⁿ_κ) / vol(S^{n-1}_1)
            let norm = model1d::sphere_volume(n, kappa) / model1d::sphere_volume(n - 1, 1.0);
            let p = DensityProfile::new(-r0, PI * radius - r0, move |r: f64| {
                model1d::sin_kappa(kappa, r0 + r).max(0.0).powf(e) / norm
            })?
            .with_log_derivative(move |r, _| {
                e * ((r0 + r) / radius).cos() / ((r0 + r) / radius).sin() / radius
            });
            (p, total_mass)
        }
        GeometrySpec::EuclideanBall { n, radius } => {
            let e = *n as f64 - 1.0;
            let norm = radius.powi(*n as i32) / *n as f64;
            let p = DensityProfile::new(-r0, radius - r0, move |r: f64| {
                (r0 + r).max(0.0).powf(e) / norm
            })?
            .with_log_derivative(move |r, _| e / (r0 + r));
            (p, total_mass)
        }
        GeometrySpec::SphericalSuspension { cd, base_volume } => {
            let mass = model1d::model_mass(cd)?;
            let len = cd.model_diameter().to_f64();
            let density = model_density(*cd, r0);
            let p = DensityProfile::new(-r0, len - r0, move |r| density(r) / mass)?
                .with_log_derivative(model_log_derivative(*cd, r0));
            (p, base_volume * mass)
        }
    };
    let needles = vec![Needle::new(profile, weight)?];
    let curvature = mean_curvature_of(&needles)?;
    let surface_total = needles
        .iter()
        .map(|n| n.weight() * n.profile().eval(0.0))
        .sum();
    Ok(NeedleDecomposition {
        needles,
        total_mass,
        diameter: geom.diameter(),
        cd: geom.cd(),
        surface_total,
        curvature,
    })
}

/// Which side of `S` a tube grows into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TubeSide {
    Outer,
    Inner,
}

/// `m(S_t^+)` (outer) or `m(S_t^-)` (inner), summed over needles.
pub fn tube_volume(dec: &NeedleDecomposition, t: f64, side: TubeSide) -> Result<f64> {
    if !(t > 0.0) {
        return Err(param(format!("tube radius must be positive, got {t}")));
    }
    let mut total = 0.0;
    for n in &dec.needles {
        let p = n.profile();
        let part = match side {
            TubeSide::Outer => p.integral_over(0.0, t.min(p.b()))?,
            TubeSide::Inner => p.integral_over(p.a().max(-t), 0.0)?,
        };
        total += n.weight() * part;
    }
    Ok(total)
}

/// Default `ε` schedule for [`minkowski_content`]: `10⁻² · 2^{-k}`, `k = 0..6`.
pub fn default_epsilons() -> Vec<f64> {
    (0..6).map(|k| 1e-2 * 0.5f64.powi(k)).collect()
}

/// Outer Minkowski content `lim m(S_ε^+)/ε` estimated from a decreasing
/// schedule by quadratic extrapolation to `ε = 0` through the last three
/// quotients.
pub fn minkowski_content_of(dec: &NeedleDecomposition, epsilons: &[f64]) -> Result<f64> {
    if epsilons.len() < 3 {
        return Err(Error::Schedule(format!(
            "need at least 3 epsilons, got {}",
            epsilons.len()
        )));
    }
    if epsilons.iter().any(|&e| !(e > 0.0 && e.is_finite()))
        || epsilons.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::Schedule(
            "epsilons must be positive and strictly decreasing".into(),
        ));
    }
    let tail = &epsilons[epsilons.len() - 3..];
    let mut quotients = [0.0; 3];
    for (q, &e) in quotients.iter_mut().zip(tail) {
        *q = tube_volume(dec, e, TubeSide::Outer)? / e;
    }
    // Lagrange interpolation through (ε_i, q_i), evaluated at 0.
    let mut value = 0.0;
    for i in 0..3 {
        let mut basis = 1.0;
        for j in 0..3 {
            if i != j {
                basis *= tail[j] / (tail[j] - tail[i]);
            }
        }
        value += basis * quotients[i];
    }
    Ok(value)
}

pub fn minkowski_content(geom: &GeometrySpec, surf: &SurfaceSpec, epsilons: &[f64]) -> Result<f64> {
    minkowski_content_of(&decompose(geom, surf)?, epsilons)
}

/// `Σ needle_mass`, the mass recovered from the disintegration.
pub fn disintegrated_mass(dec: &NeedleDecomposition) -> Result<f64> {
    dec.needles.iter().map(needle::needle_mass).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cd(k: f64, n: f64) -> CurvatureDimension {
        CurvatureDimension::new(k, n).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn signed_distance_examples() {
        let ball = GeometrySpec::euclidean_ball(3, 1.0).unwrap();
        let s = SurfaceSpec::GeodesicSphere { r0: 0.5 };
        assert_eq!(signed_distance(&ball, &s, 0.75).unwrap(), 0.25);
        assert_eq!(signed_distance(&ball, &s, 0.5).unwrap(), 0.0);
        assert!(signed_distance(&ball, &s, 0.25).unwrap() < 0.0);
        assert!(signed_distance(&ball, &s, 1.5).is_err());

        let sphere = GeometrySpec::round_sphere(2, 1.0).unwrap();
        let eq = SurfaceSpec::GeodesicSphere { r0: PI / 2.0 };
        assert!((signed_distance(&sphere, &eq, PI).unwrap() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn model_interval_decomposition() {
        let g = GeometrySpec::model_interval(cd(1.0, 2.0)).unwrap();
        let dec = decompose(&g, &SurfaceSpec::LevelPoint { r0: PI / 2.0 }).unwrap();
        assert_eq!(dec.needles.len(), 1);
        let p = dec.needles[0].profile();
        assert!((p.a() + PI / 2.0).abs() < 1e-15 && (p.b() - PI / 2.0).abs() < 1e-15);
        assert!(rel(dec.total_mass, 2.0) < 1e-12);
        assert!(rel(dec.surface_total, 1.0) < 1e-12);
        assert!(dec.curvature[0].h.abs() < 1e-12);
    }

    #[test]
    fn ball_decomposition() {
        let g = GeometrySpec::euclidean_ball(3, 1.0).unwrap();
        let dec = decompose(&g, &SurfaceSpec::GeodesicSphere { r0: 0.5 }).unwrap();
        assert!(rel(dec.surface_total, PI) < 1e-13);
        assert!(rel(dec.curvature[0].plus, 4.0) < 1e-13);
        assert!(rel(dec.curvature[0].h, 4.0) < 1e-13);
        assert!(rel(dec.total_mass, 4.0 * PI / 3.0) < 1e-14);
        assert_eq!(dec.diameter, 2.0);
    }

    #[test]
    fn sphere_equator_decomposition() {
        let g = GeometrySpec::round_sphere(2, 1.0).unwrap();
        let dec = decompose(&g, &SurfaceSpec::GeodesicSphere { r0: PI / 2.0 }).unwrap();
        assert!(rel(dec.total_mass, 4.0 * PI) < 1e-14);
        assert!(rel(dec.surface_total, 2.0 * PI) < 1e-14);
        assert!(dec.curvature[0].h.abs() < 1e-12);
        assert!(rel(dec.diameter, PI) < 1e-15);
    }

    #[test]
    fn mean_curvature_examples() {
        for &(n, rho) in &[(2u32, 0.3), (3, 0.5), (5, 0.8)] {
            let g = GeometrySpec::euclidean_ball(n, 1.0).unwrap();
            let dec = decompose(&g, &SurfaceSpec::GeodesicSphere { r0: rho }).unwrap();
            let h = mean_curvature_field(&dec).unwrap()[0];
            let expect = (n as f64 - 1.0) / rho;
            assert!(rel(h.plus, expect) < 1e-13);
            // smooth density: H⁻ = -H⁺
            assert!(rel(h.minus, -expect) < 1e-13);
            assert!(rel(h.h, expect) < 1e-13);
        }
        let g = GeometrySpec::model_interval(cd(1.0, 2.0)).unwrap();
        let dec = decompose(&g, &SurfaceSpec::LevelPoint { r0: PI / 4.0 }).unwrap();
        assert!(rel(dec.curvature[0].h, 1.0) < 1e-12);
    }

    #[test]
    fn surfaces_beyond_the_equator_have_negative_curvature() {
        let g = GeometrySpec::round_sphere(2, 1.0).unwrap();
        let dec = decompose(&g, &SurfaceSpec::GeodesicSphere { r0: 2.0 * PI / 3.0 }).unwrap();
        let h = dec.curvature[0];
        assert!(rel(h.h, 1.0 / (2.0 * PI / 3.0).tan()) < 1e-12);
        assert!(h.h < 0.0);
    }

    #[test]
    fn degenerate_surfaces_are_rejected() {
        let g = GeometrySpec::round_sphere(2, 1.0).unwrap();
        let err = decompose(&g, &SurfaceSpec::GeodesicSphere { r0: 0.0 }).unwrap_err();
        assert!(matches!(err, Error::DegenerateSurface(ref m) if m.contains("pole")));
        assert!(matches!(
            decompose(&g, &SurfaceSpec::GeodesicSphere { r0: PI }),
            Err(Error::DegenerateSurface(_))
        ));
        let b = GeometrySpec::euclidean_ball(3, 1.0).unwrap();
        assert!(matches!(
            decompose(&b, &SurfaceSpec::GeodesicSphere { r0: 1.0 }),
            Err(Error::DegenerateSurface(_))
        ));
        assert!(decompose(&b, &SurfaceSpec::LevelPoint { r0: 0.5 }).is_err());
    }

    #[test]
    fn constructor_validation() {
        assert!(GeometrySpec::euclidean_ball(1, 1.0).is_err());
        assert!(GeometrySpec::round_sphere(2, 0.0).is_err());
        assert!(GeometrySpec::spherical_suspension(cd(0.0, 3.0), 1.0).is_err());
        assert!(GeometrySpec::model_interval(cd(-1.0, 3.0)).is_err());
        assert!(GeometrySpec::truncated_model_interval(cd(1.0, 2.0), 4.0).is_err());
    }

    #[test]
    fn round_sphere_reports_consistent_cd() {
        let g = GeometrySpec::round_sphere(4, 2.0).unwrap();
        assert_eq!(g.cd(), cd(3.0 / 4.0, 4.0));
    }

    #[test]
    fn disintegration_is_consistent() {
        let cases = [
            (
                GeometrySpec::round_sphere(2, 1.0).unwrap(),
                SurfaceSpec::GeodesicSphere { r0: 0.4 },
            ),
            (
                GeometrySpec::round_sphere(5, 2.5).unwrap(),
                SurfaceSpec::GeodesicSphere { r0: 3.0 },
            ),
            (
                GeometrySpec::euclidean_ball(4, 2.0).unwrap(),
                SurfaceSpec::GeodesicSphere { r0: 0.7 },
            ),
            (
                GeometrySpec::spherical_suspension(cd(1.0, 3.0), 2.5).unwrap(),
                SurfaceSpec::GeodesicSphere { r0: 1.0 },
            ),
            (
                GeometrySpec::model_interval(cd(1.0, 4.5)).unwrap(),
                SurfaceSpec::LevelPoint { r0: 2.0 },
            ),
        ];
        for (g, s) in &cases {
            let dec = decompose(g, s).unwrap();
            let m = disintegrated_mass(&dec).unwrap();
            assert!(
                rel(m, dec.total_mass) < 1e-9,
                "{g:?}: {m} vs {}",
                dec.total_mass
            );
        }
    }

    #[test]
    fn tube_volume_examples() {
        let g = GeometrySpec::round_sphere(2, 1.0).unwrap();
        let dec = decompose(&g, &SurfaceSpec::GeodesicSphere { r0: PI / 2.0 }).unwrap();
        for &t in &[0.1, 0.7, PI / 2.0] {
            let v = tube_volume(&dec, t, TubeSide::Outer).unwrap();
            assert!(rel(v, 2.0 * PI * t.sin()) < 1e-12);
        }
        let out = tube_volume(&dec, dec.diameter, TubeSide::Outer).unwrap();
        let inn = tube_volume(&dec, dec.diameter, TubeSide::Inner).unwrap();
        assert!(rel(out + inn, dec.total_mass) < 1e-12);

        let b = GeometrySpec::euclidean_ball(3, 1.0).unwrap();
        let dec = decompose(&b, &SurfaceSpec::GeodesicSphere { r0: 0.5 }).unwrap();
        let v = tube_volume(&dec, 0.5, TubeSide::Outer).unwrap();
        assert!(rel(v, 7.0 * PI / 6.0) < 1e-12);
        assert!(tube_volume(&dec, 0.0, TubeSide::Outer).is_err());
    }

    #[test]
    fn tube_volume_is_monotone() {
        let b = GeometrySpec::euclidean_ball(4, 1.0).unwrap();
        let dec = decompose(&b, &SurfaceSpec::GeodesicSphere { r0: 0.3 }).unwrap();
        for side in [TubeSide::Outer, TubeSide::Inner] {
            let vals: Vec<f64> = (1..=30)
                .map(|i| tube_volume(&dec, i as f64 * 0.05, side).unwrap())
                .collect();
            assert!(vals.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn minkowski_examples() {
        let eps = default_epsilons();
        let b = GeometrySpec::euclidean_ball(3, 1.0).unwrap();
        for &rho in &[0.25, 0.5, 0.75] {
            let m = minkowski_content(&b, &SurfaceSpec::GeodesicSphere { r0: rho }, &eps).unwrap();
            assert!(rel(m, 4.0 * PI * rho * rho) < 1e-6);
        }
        let s = GeometrySpec::round_sphere(2, 1.0).unwrap();
        let m = minkowski_content(&s, &SurfaceSpec::GeodesicSphere { r0: PI / 2.0 }, &eps).unwrap();
        assert!(rel(m, 2.0 * PI) < 1e-6);
        let i = GeometrySpec::model_interval(cd(1.0, 2.0)).unwrap();
        let m = minkowski_content(&i, &SurfaceSpec::LevelPoint { r0: PI / 2.0 }, &eps).unwrap();
        assert!(rel(m, 1.0) < 1e-6);
    }

    #[test]
    fn minkowski_schedule_errors() {
        let s = GeometrySpec::round_sphere(2, 1.0).unwrap();
        let surf = SurfaceSpec::GeodesicSphere { r0: 1.0 };
        assert!(matches!(
            minkowski_content(&s, &surf, &[0.1, 0.05]),
            Err(Error::Schedule(_))
        ));
        assert!(matches!(
            minkowski_content(&s, &surf, &[0.1, 0.2, 0.05]),
            Err(Error::Schedule(_))
        ));
    }

    #[test]
    fn euclidean_laplacian_is_classical() {
        let n = 4u32;
        let b = GeometrySpec::euclidean_ball(n, 1.0).unwrap();
        let rho = 0.4;
        let dec = decompose(&b, &SurfaceSpec::GeodesicSphere { r0: rho }).unwrap();
        for i in 1..20 {
            let r = -rho + (1.0) * i as f64 / 20.0;
            let got = needle::laplacian_regular_part(&dec.needles[0], r, Side::Plus).unwrap();
            let radius = rho + r;
            assert!(rel(-got, (n as f64 - 1.0) / radius) < 1e-12);
        }
    }

    #[test]
    fn produced_needles_are_cd() {
        let cases = [
            (
                GeometrySpec::round_sphere(3, 1.0).unwrap(),
                SurfaceSpec::GeodesicSphere { r0: 1.0 },
            ),
            (
                GeometrySpec::euclidean_ball(3, 1.0).unwrap(),
                SurfaceSpec::GeodesicSphere { r0: 0.5 },
            ),
            (
                GeometrySpec::model_interval(cd(1.0, 4.5)).unwrap(),
                SurfaceSpec::LevelPoint { r0: 1.0 },
            ),
        ];
        for (g, s) in &cases {
            let dec = decompose(g, s).unwrap();
            for n in &dec.needles {
                let rep = needle::check_cd_density(n.profile(), &dec.cd, 24).unwrap();
                assert!(rep.pass, "{g:?}: {rep:?}");
            }
        }
    }
}
