//! Piecewise-linear radial profiles `f: [0, R] → ℝ`, values in 2π-units.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PLProfile {
    points: Vec<(Scalar, Scalar)>,
}

/// Validated constructor: domain checks plus the slope condition.
pub fn make_profile(points: &[(Scalar, Scalar)], radius: &Scalar) -> Result<PLProfile> {
    let f = PLProfile::from_points(points.to_vec())?;
    if f.radius() != radius {
        return Err(Error::DomainError(format!(
            "last breakpoint r = {} does not reach R = {}",
            f.radius(),
            radius
        )));
    }
    f.check_slope_condition()?;
    Ok(f)
}

impl PLProfile {
    /// Builds a profile without checking the slope condition. Breakpoints
    /// must start at r = 0 and be strictly increasing.
    pub fn from_points(points: Vec<(Scalar, Scalar)>) -> Result<PLProfile> {
        if points.len() < 2 {
            return Err(Error::DomainError("need at least two breakpoints".into()));
        }
        if !points[0].0.is_zero() {
            return Err(Error::DomainError(format!("first breakpoint at r = {}, not 0", points[0].0)));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::DomainError(format!(
                    "breakpoints not strictly increasing at r = {}",
                    w[1].0
                )));
            }
        }
        Ok(PLProfile { points })
    }

    /// The constant zero profile on `[0, R]`.
    pub fn zero(radius: &Scalar) -> PLProfile {
        PLProfile { points: vec![(Scalar::zero(), Scalar::zero()), (radius.clone(), Scalar::zero())] }
    }

    pub fn points(&self) -> &[(Scalar, Scalar)] {
        &self.points
    }

    pub fn radius(&self) -> &Scalar {
        &self.points.last().unwrap().0
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = &Scalar> {
        self.points.iter().map(|p| &p.0)
    }

    /// Segment slopes, left to right.
    pub fn slopes(&self) -> Vec<Scalar> {
        self.points
            .windows(2)
            .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0))
            .collect()
    }

    pub fn value_at(&self, r: &Scalar) -> Scalar {
        let pts = &self.points;
        if r <= &pts[0].0 {
            return pts[0].1.clone();
        }
        if r >= self.radius() {
            return pts.last().unwrap().1.clone();
        }
        let i = pts.partition_point(|p| &p.0 <= r);
        let (r0, v0) = &pts[i - 1];
        let (r1, v1) = &pts[i];
        if r == r0 {
            return v0.clone();
        }
        v0 + (v1 - v0) * ((r - r0) / (r1 - r0))
    }

    pub fn is_zero(&self) -> bool {
        self.points.iter().all(|p| p.1.is_zero())
    }

    /// No slope is an integer and the slope into r = R has |s| < 1.
    pub fn check_slope_condition(&self) -> Result<()> {
        let slopes = self.slopes();
        for (i, s) in slopes.iter().enumerate() {
            if s.is_integer() {
                return Err(Error::SlopeConditionViolation {
                    segment: i,
                    detail: format!("slope {s} is an integer"),
                });
            }
        }
        let last = slopes.last().unwrap();
        if last.abs() >= Scalar::one() {
            return Err(Error::SlopeConditionViolation {
                segment: slopes.len() - 1,
                detail: format!("final slope {last} has |s| >= 1"),
            });
        }
        Ok(())
    }

    pub fn satisfies_slope_condition(&self) -> bool {
        self.check_slope_condition().is_ok()
    }

    pub fn max_value(&self) -> Scalar {
        self.points.iter().map(|p| p.1.clone()).max().unwrap()
    }

    pub fn min_value(&self) -> Scalar {
        self.points.iter().map(|p| p.1.clone()).min().unwrap()
    }

    /// `a·f`.
    pub fn scale(&self, a: &Scalar) -> PLProfile {
        PLProfile { points: self.points.iter().map(|(r, v)| (r.clone(), a * v)).collect() }
    }

    /// Text form: header `R=p/q`, then one `r v` line per breakpoint.
    pub fn to_text(&self) -> String {
        let mut out = format!("R={}\n", self.radius());
        for (r, v) in &self.points {
            writeln!(out, "{r} {v}").unwrap();
        }
        out
    }

    /// Parses [`PLProfile::to_text`] output and validates the slope condition.
    pub fn parse_text(text: &str) -> Result<PLProfile> {
        let mut radius = None;
        let mut points = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("R=") {
                radius = Some(rest.parse::<Scalar>()?);
                continue;
            }
            let mut it = line.split_whitespace();
            let (Some(r), Some(v), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::Parse(format!("expected `r v`, got {line:?}")));
            };
            points.push((r.parse()?, v.parse()?));
        }
        let radius = radius.ok_or_else(|| Error::Parse("missing `R=` header".into()))?;
        make_profile(&points, &radius)
    }
}

fn same_domain(f: &PLProfile, g: &PLProfile) -> Result<()> {
    if f.radius() != g.radius() {
        return Err(Error::DomainMismatch(format!("R = {} vs R = {}", f.radius(), g.radius())));
    }
    Ok(())
}

/// Pointwise `Σ cᵢ·fᵢ` on the union of breakpoints. The slope condition is not
/// re-checked.
pub fn linear_combine(coeffs: &[Scalar], profiles: &[PLProfile]) -> Result<PLProfile> {
    if coeffs.len() != profiles.len() || profiles.is_empty() {
        return Err(Error::DomainMismatch(format!(
            "{} coefficients for {} profiles",
            coeffs.len(),
            profiles.len()
        )));
    }
    for g in &profiles[1..] {
        same_domain(&profiles[0], g)?;
    }
    let mut rs: Vec<Scalar> = profiles.iter().flat_map(|f| f.breakpoints().cloned()).collect();
    rs.sort();
    rs.dedup();
    let points = rs
        .into_iter()
        .map(|r| {
            let v = coeffs
                .iter()
                .zip(profiles)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, f)| c * f.value_at(&r))
                .sum();
            (r, v)
        })
        .collect();
    PLProfile::from_points(points)
}

/// Exact `‖f − g‖_∞`; the difference is PL so the max sits on a breakpoint.
pub fn sup_distance(f: &PLProfile, g: &PLProfile) -> Result<Scalar> {
    same_domain(f, g)?;
    let d = linear_combine(&[Scalar::one(), -Scalar::one()], &[f.clone(), g.clone()])?;
    Ok(d.points.iter().map(|p| p.1.abs()).max().unwrap())
}

/// `max f − min f`.
pub fn oscillation(f: &PLProfile) -> Scalar {
    f.max_value() - f.min_value()
}
