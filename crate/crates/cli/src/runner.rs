use std::fmt::Write as _;

use needlecomp::geometry::{self, NeedleDecomposition};
use needlecomp::hk::{self, HKReport, RigidityReport};
use needlecomp::model1d::{self, JacobianParams};
use needlecomp::needle;
use needlecomp::Error;

use crate::config::{Check, Expectation, ExperimentConfig};

/// One CSV line. Empty cells are `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row {
    pub statement: String,
    pub t: Option<f64>,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub gap: Option<f64>,
    pub relative_gap: Option<f64>,
    pub equality: Option<bool>,
    pub h_plus: Option<f64>,
    pub h_minus: Option<f64>,
    pub h: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub check: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub rows: Vec<Row>,
    pub report: String,
    pub series: Vec<Series>,
    pub failures: Vec<Failure>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// An operation error, tagged with the check that raised it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("check {check}: {source}")]
pub struct RunError {
    pub check: String,
    pub source: Error,
}

fn tagged<T>(check: &str, r: needlecomp::Result<T>) -> Result<T, RunError> {
    r.map_err(|source| RunError {
        check: check.to_owned(),
        source,
    })
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    dec: NeedleDecomposition,
    out: Outcome,
}

impl Runner<'_> {
    fn fail(&mut self, check: &str, reason: impl Into<String>) {
        self.out.failures.push(Failure {
            check: check.to_owned(),
            reason: reason.into(),
        });
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.out.report.push_str(text.as_ref());
        self.out.report.push('\n');
    }

    /// Theorem-mandated report: a defect becomes a failure, other errors abort.
    fn bound(
        &mut self,
        check: &str,
        r: needlecomp::Result<HKReport>,
    ) -> Result<Option<HKReport>, RunError> {
        match r {
            Ok(r) => Ok(Some(r)),
            Err(Error::Defect {
                statement,
                lhs,
                rhs,
            }) => {
                self.fail(check, format!("{statement}: lhs {lhs} > rhs {rhs}"));
                Ok(None)
            }
            Err(e) => tagged(check, Err(e)),
        }
    }

    fn push_hk(&mut self, r: &HKReport) {
        let tag = r.statement.tag();
        for (i, c) in r.per_needle.iter().enumerate() {
            let gap = c.rhs - c.lhs;
            self.out.rows.push(Row {
                statement: format!("{tag}/needle-{i}"),
                t: r.t,
                lhs: Some(c.lhs),
                rhs: Some(c.rhs),
                gap: Some(gap),
                relative_gap: Some(if c.rhs > 0.0 { gap / c.rhs } else { gap }),
                equality: Some(c.profile_match),
                h_plus: Some(c.h_plus),
                h_minus: Some(c.h_minus),
                h: Some(c.h),
            });
        }
        self.out.rows.push(Row {
            statement: tag.to_owned(),
            t: r.t,
            lhs: Some(r.lhs),
            rhs: Some(r.rhs),
            gap: Some(r.gap),
            relative_gap: Some(r.relative_gap),
            equality: Some(r.equality),
            ..Row::default()
        });
        let t = r.t.map(|t| format!(" t={t}")).unwrap_or_default();
        self.line(format!(
            "{tag}{t}: lhs={} rhs={} gap={} relative_gap={} equality={}",
            r.lhs, r.rhs, r.gap, r.relative_gap, r.equality
        ));
    }

    fn needle_check(&mut self, check: Check) -> Result<(), RunError> {
        let name = check.name();
        let cd = self.dec.cd;
        let grid = self.cfg.grid;
        for (i, n) in self.dec.needles.clone().iter().enumerate() {
            let (pass, excess, row_h) = match check {
                Check::CdDensity => {
                    let r = tagged(name, needle::check_cd_density(n.profile(), &cd, grid))?;
                    (r.pass, r.worst_violation, None)
                }
                Check::Sturm => {
                    let u = tagged(name, n.profile().power(1.0 / (cd.n() - 1.0)))?;
                    let r = tagged(name, needle::sturm_bound_check(&u, cd.kappa(), 0.0, grid))?;
                    (r.pass, r.max_excess, None)
                }
                _ => {
                    let r = tagged(name, needle::density_ratio_check(n, &cd, grid))?;
                    (r.pass, r.max_excess, Some((r.h_used, -r.h_inner)))
                }
            };
            self.out.rows.push(Row {
                statement: format!("{name}/needle-{i}"),
                lhs: Some(excess),
                rhs: Some(0.0),
                gap: Some(-excess),
                h_plus: row_h.map(|h| h.0),
                h_minus: row_h.map(|h| h.1),
                ..Row::default()
            });
            self.line(format!("{name} needle {i}: pass={pass} excess={excess}"));
            if !pass {
                self.fail(name, format!("needle {i}: excess {excess}"));
            }
        }
        Ok(())
    }

    fn hk_outer(&mut self) -> Result<(), RunError> {
        let name = Check::HkOuter.name();
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        for &t in &self.cfg.t_values {
            let r = hk::hk_outer_with(&self.dec, t, self.cfg.tolerance);
            if let Some(r) = self.bound(name, r)? {
                lhs.push((t, r.lhs));
                rhs.push((t, r.rhs));
                self.push_hk(&r);
            }
        }
        if !lhs.is_empty() {
            self.out.series.push(Series {
                name: "hk-outer.lhs".into(),
                points: lhs,
            });
            self.out.series.push(Series {
                name: "hk-outer.rhs".into(),
                points: rhs,
            });
        }
        Ok(())
    }

    fn hk_full(&mut self) -> Result<Option<HKReport>, RunError> {
        let r = hk::hk_full_with(&self.dec, self.cfg.tolerance);
        let r = self.bound(Check::HkFull.name(), r)?;
        if let Some(r) = &r {
            self.push_hk(r);
        }
        Ok(r)
    }

    fn corollaries(&mut self) -> Result<(), RunError> {
        let name = Check::Corollaries.name();
        let reports = tagged(
            name,
            match hk::closed_form_bounds_with(&self.dec, self.cfg.h0, self.cfg.tolerance) {
                Err(Error::Defect {
                    statement,
                    lhs,
                    rhs,
                }) => {
                    self.fail(name, format!("{statement}: lhs {lhs} > rhs {rhs}"));
                    Ok(Vec::new())
                }
                other => other,
            },
        )?;
        if reports.is_empty() {
            self.line("corollaries: none applicable");
        }
        for r in &reports {
            self.push_hk(r);
        }
        Ok(())
    }

    fn levy_gromov(&mut self) -> Result<(), RunError> {
        let name = Check::LevyGromov.name();
        let eps = self.epsilons();
        let r = tagged(
            name,
            hk::levy_gromov_check_with(&self.dec, &eps, self.cfg.tolerance),
        )?;
        let gap = r.content - r.profile_value;
        self.out.rows.push(Row {
            statement: name.into(),
            lhs: Some(r.profile_value),
            rhs: Some(r.content),
            gap: Some(gap),
            relative_gap: Some(gap / r.content),
            equality: Some(r.equality),
            ..Row::default()
        });
        self.line(format!(
            "{name}: content={} profile={} volume_fraction={} pass={} equality={}",
            r.content, r.profile_value, r.volume_fraction, r.pass, r.equality
        ));
        if !r.pass {
            self.fail(
                name,
                format!("content {} below profile {}", r.content, r.profile_value),
            );
        }
        Ok(())
    }

    fn rigidity(&mut self) -> Result<RigidityReport, RunError> {
        let name = Check::Rigidity.name();
        let r = tagged(name, hk::equality_detect(&self.dec, self.cfg.tolerance))?;
        let failed: Vec<_> = r
            .failures
            .iter()
            .map(|f| format!("{f:?}").to_lowercase())
            .collect();
        self.out.rows.push(Row {
            statement: name.into(),
            lhs: Some(self.dec.total_mass),
            rhs: Some(self.dec.total_mass + r.gap),
            gap: Some(r.gap),
            relative_gap: Some(r.relative_gap),
            equality: Some(r.rigid),
            ..Row::default()
        });
        let why = if failed.is_empty() {
            String::new()
        } else {
            format!(" failed={}", failed.join(","))
        };
        self.line(format!("{name}: rigid={}{why}", r.rigid));
        Ok(r)
    }

    fn minkowski(&mut self) -> Result<(), RunError> {
        let name = Check::Minkowski.name();
        let eps = self.epsilons();
        let m = tagged(name, geometry::minkowski_content_of(&self.dec, &eps))?;
        let s = self.dec.surface_total;
        let rel = (s - m) / s;
        self.out.rows.push(Row {
            statement: name.into(),
            lhs: Some(m),
            rhs: Some(s),
            gap: Some(s - m),
            relative_gap: Some(rel),
            equality: Some(rel.abs() < self.cfg.tolerance.max(1e-6)),
            ..Row::default()
        });
        self.line(format!(
            "{name}: content={m} surface_total={s} relative_gap={rel}"
        ));
        Ok(())
    }

    fn epsilons(&self) -> Vec<f64> {
        self.cfg
            .epsilons
            .clone()
            .unwrap_or_else(geometry::default_epsilons)
    }

    fn profile_series(&mut self) -> Result<(), RunError> {
        for (i, (n, c)) in self.dec.needles.iter().zip(&self.dec.curvature).enumerate() {
            let p = tagged("plot", JacobianParams::new(c.h, self.dec.cd))?;
            let profile = n.profile();
            let h0 = profile.eval(0.0);
            let (a, b) = (profile.a(), profile.b());
            let xs: Vec<f64> = (0..=128).map(|k| a + (b - a) * k as f64 / 128.0).collect();
            self.out.series.push(Series {
                name: format!("needle-{i}.density"),
                points: xs.iter().map(|&r| (r, profile.eval(r))).collect(),
            });
            self.out.series.push(Series {
                name: format!("needle-{i}.model"),
                points: xs
                    .iter()
                    .map(|&r| (r, h0 * model1d::jacobian(&p, r)))
                    .collect(),
            });
        }
        Ok(())
    }
}

/// Executes every requested check, then the `expect` assertions.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let dec = tagged(
        "decompose",
        geometry::decompose(&cfg.geometry, &cfg.surface),
    )?;
    let mut runner = Runner {
        cfg,
        dec,
        out: Outcome::default(),
    };
    let d = &runner.dec;
    let mut header = String::new();
    let _ = write!(
        header,
        "geometry: {:?}\nsurface: r0={}\ntotal_mass={} surface_total={} diameter={}",
        cfg.geometry,
        cfg.surface.r0(),
        d.total_mass,
        d.surface_total,
        d.diameter
    );
    for (i, c) in d.curvature.iter().enumerate() {
        let _ = write!(
            header,
            "\nneedle {i}: H+={} H-={} H={}",
            c.plus, c.minus, c.h
        );
    }
    runner.line(header);

    let mut full = None;
    let mut rigidity = None;
    for &check in &cfg.checks {
        match check {
            Check::CdDensity | Check::Sturm | Check::Ratio => runner.needle_check(check)?,
            Check::HkOuter => runner.hk_outer()?,
            Check::HkFull => full = runner.hk_full()?,
            Check::Corollaries => runner.corollaries()?,
            Check::LevyGromov => runner.levy_gromov()?,
            Check::Rigidity => rigidity = Some(runner.rigidity()?),
            Check::Minkowski => runner.minkowski()?,
        }
    }
    runner.profile_series()?;

    for &e in &cfg.expect {
        let got = match e {
            Expectation::Rigid | Expectation::NotRigid => {
                if rigidity.is_none() {
                    rigidity = Some(runner.rigidity()?);
                }
                let rigid = rigidity.as_ref().map(|r| r.rigid);
                rigid == Some(e == Expectation::Rigid)
            }
            Expectation::Equality | Expectation::Strict => {
                if full.is_none() {
                    full = runner.hk_full()?;
                }
                match &full {
                    Some(r) => r.equality == (e == Expectation::Equality),
                    None => false,
                }
            }
        };
        if !got {
            runner.fail("expect", format!("expected {}", e.name()));
        }
    }

    let passed = runner.out.passed();
    runner.out.rows.push(Row {
        statement: "run".into(),
        equality: Some(passed),
        ..Row::default()
    });
    for f in runner.out.failures.clone() {
        runner.line(format!("FAIL {}: {}", f.check, f.reason));
    }
    runner.line(if passed {
        "status: pass"
    } else {
        "status: fail"
    });
    Ok(runner.out)
}
