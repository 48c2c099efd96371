//! The generator family behind the embedding, its generic perturbations,
//! and the constants of the Hofer-distance estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::homotopy::CaseData;
use crate::params::ManifoldParams;
use crate::profile::{linear_combine, oscillation, PLProfile};
use crate::scalar::{Quantity, Scalar};
use crate::spectrum::has_distinct_kink_actions;

/// Landmarks of one generator: its support interval, the three kinks and
/// the width of the flat neighbourhoods at the ends of the support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Landmarks {
    pub interval: (Scalar, Scalar),
    pub r1: Scalar,
    pub r2: Scalar,
    pub r3: Scalar,
    pub u_width: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorFamily {
    pub epsilon: Scalar,
    pub radius: Scalar,
    pub profiles: Vec<PLProfile>,
    pub landmarks: Vec<Landmarks>,
}

impl GeneratorFamily {
    pub fn count(&self) -> usize {
        self.profiles.len()
    }
}

/// `I_i = [R − ε + ε/2^i, R − ε + ε/2^(i−1)]`, `i ≥ 1`.
pub fn support_interval(radius: &Scalar, eps: &Scalar, i: usize) -> (Scalar, Scalar) {
    let base = radius - eps;
    let two = Scalar::from_int(2);
    let lo = &base + eps / two.pow(i as u32);
    let hi = &base + eps / two.pow(i as u32 - 1);
    (lo, hi)
}

fn generator(radius: &Scalar, eps: &Scalar, i: usize) -> (PLProfile, Landmarks) {
    let (left, right) = support_interval(radius, eps, i);
    let len = &right - &left;
    let r2 = (&left + &right) / Scalar::from_int(2);
    let w = &len / Scalar::from_int(20);
    let r = radius;
    // Shrink the spread until every slope is a non-integer.
    let mut j = 0;
    let (r1, r3) = loop {
        let spread = &len / Scalar::from_int(10) * Scalar::new(1000 - j, 1000);
        let (r1, r3) = (&r2 - &spread, &r2 + &spread);
        let rise = r / (&r1 - (&left + &w));
        let steep = r / &spread;
        if !rise.is_integer() && !steep.is_integer() {
            break (r1, r3);
        }
        j += 1;
    };
    let zero = Scalar::zero();
    let mut pts = vec![
        (zero.clone(), zero.clone()),
        (left.clone(), zero.clone()),
        (&left + &w, zero.clone()),
        (r1.clone(), r.clone()),
        (r2.clone(), zero.clone()),
        (r3.clone(), r.clone()),
        (&right - &w, zero.clone()),
        (right.clone(), zero.clone()),
    ];
    if &right != r {
        pts.push((r.clone(), zero.clone()));
    }
    let f = PLProfile::from_points(pts).expect("landmarks increase inside the support");
    (f, Landmarks { interval: (left, right), r1, r2, r3, u_width: w })
}

pub fn build_generators(p: &ManifoldParams, eps: &Scalar, m: usize) -> Result<GeneratorFamily> {
    let r = &p.radius;
    if !eps.is_positive() || eps >= r {
        return Err(Error::ParameterError(format!("epsilon = {eps} must lie in (0, R = {r})")));
    }
    if m == 0 {
        return Err(Error::ParameterError("at least one generator is required".into()));
    }
    let (profiles, landmarks) = (1..=m).map(|i| generator(r, eps, i)).unzip();
    Ok(GeneratorFamily { epsilon: eps.clone(), radius: r.clone(), profiles, landmarks })
}

/// A point of `ℝ ⊕ [0,1]^∞`: optional `a₀` and finitely many `aᵢ ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct EmbeddingPoint {
    pub a0: Option<Scalar>,
    pub coefficients: Vec<Scalar>,
}

impl EmbeddingPoint {
    pub fn new(a0: Option<Scalar>, coefficients: Vec<Scalar>) -> Result<EmbeddingPoint> {
        if let Some(bad) = coefficients.iter().find(|c| c.is_negative() || **c > Scalar::one()) {
            return Err(Error::ParameterError(format!("coefficient {bad} outside [0, 1]")));
        }
        Ok(EmbeddingPoint { a0, coefficients })
    }

    /// Coefficientwise `self − other` for `i ≥ 1`.
    pub fn minus(&self, other: &EmbeddingPoint) -> Vec<Scalar> {
        let n = self.coefficients.len().max(other.coefficients.len());
        let get = |v: &[Scalar], i: usize| v.get(i).cloned().unwrap_or_else(Scalar::zero);
        (0..n).map(|i| get(&self.coefficients, i) - get(&other.coefficients, i)).collect()
    }
}

pub fn sup_norm(v: &[Scalar]) -> Scalar {
    v.iter().map(Scalar::abs).max().unwrap_or_else(Scalar::zero)
}

/// `Σ cᵢ fᵢ` for arbitrary rational coefficients.
pub fn combine(coeffs: &[Scalar], fam: &GeneratorFamily) -> Result<PLProfile> {
    let support = coeffs.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1);
    if support > fam.count() {
        return Err(Error::SupportError(format!(
            "coefficient {support} is non-zero but the family has {} generators",
            fam.count()
        )));
    }
    if support == 0 {
        return Ok(PLProfile::zero(&fam.radius));
    }
    linear_combine(&coeffs[..support], &fam.profiles[..support])
}

pub fn phi_profile(a: &EmbeddingPoint, fam: &GeneratorFamily) -> Result<PLProfile> {
    combine(&a.coefficients, fam)
}

const PRIMES: [i64; 12] = [1009, 1013, 1019, 1021, 1031, 1033, 1039, 1049, 1051, 1061, 1063, 1069];
const ATTEMPTS: u64 = 16;

/// Moves every non-pinned breakpoint down by a small rational with a prime
/// denominator until the slope condition holds and kink actions are
/// distinct. Breakpoint radii never move.
pub fn perturb_to_generic(
    f: &PLProfile,
    p: &ManifoldParams,
    eps: &Scalar,
    pinned: &[(Scalar, Scalar)],
    seed: u64,
) -> Result<PLProfile> {
    for (r, v) in pinned {
        if !f.points().iter().any(|(x, y)| x == r && y == v) {
            return Err(Error::CannotPerturb(format!("pinned point ({r}, {v}) is not a breakpoint of f")));
        }
    }
    if f.satisfies_slope_condition() && has_distinct_kink_actions(f, p).distinct {
        return Ok(f.clone());
    }
    let free: Vec<bool> = f.points().iter().map(|(r, _)| !pinned.iter().any(|(x, _)| x == r)).collect();
    if !free.contains(&true) {
        return Err(Error::CannotPerturb("every breakpoint is pinned".into()));
    }
    let min_gap = f.points().windows(2).map(|w| &w[1].0 - &w[0].0).min().unwrap();
    let cap = (eps / Scalar::from_int(8)).min(min_gap / Scalar::from_int(4));
    let mut fallback = None;
    for attempt in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let pts: Vec<(Scalar, Scalar)> = f
            .points()
            .iter()
            .zip(&free)
            .map(|((r, v), &is_free)| {
                if !is_free {
                    return (r.clone(), v.clone());
                }
                let q = PRIMES[rng.gen_range(0..PRIMES.len())];
                let eta = &cap * Scalar::new(rng.gen_range(1..q), q);
                (r.clone(), v - eta)
            })
            .collect();
        let g = PLProfile::from_points(pts)?;
        if !g.satisfies_slope_condition() {
            continue;
        }
        if has_distinct_kink_actions(&g, p).distinct {
            return Ok(g);
        }
        fallback.get_or_insert(g);
    }
    fallback.ok_or_else(|| {
        Error::CannotPerturb(format!("no slope-admissible perturbation found in {ATTEMPTS} attempts"))
    })
}

impl CaseData {
    /// Case data for `Σ aᵢ fᵢ`: picks k with |a_k| maximal, flips signs so
    /// a_k > 0, raises a_k to 1, perturbs with the landmarks of f_k pinned,
    /// and bends the end segments to slopes m₀ < 0 < m₁.
    pub fn from_embedding(fam: &GeneratorFamily, a: &[Scalar], p: &ManifoldParams, seed: u64) -> Result<(CaseData, usize)> {
        let k = max_index(a).ok_or(Error::AllZero)?;
        let sign = if a[k].is_negative() { -Scalar::one() } else { Scalar::one() };
        let mut b: Vec<Scalar> = a.iter().map(|x| &sign * x).collect();
        b[k] = Scalar::one();
        if b.iter().any(|x| x.abs() > Scalar::one()) {
            return Err(Error::ParameterError("coefficients must lie in [-1, 1]".into()));
        }
        let f = combine(&b, fam)?;
        let lm = &fam.landmarks[k];
        let r = &fam.radius;
        let eps = &fam.epsilon;
        let pins = [(lm.r1.clone(), r.clone()), (lm.r2.clone(), Scalar::zero()), (lm.r3.clone(), r.clone())];
        let g = perturb_to_generic(&f, p, eps, &pins, seed)?;
        let m0 = -(eps / (Scalar::from_int(8) * &lm.r1));
        let m1 = eps / (Scalar::from_int(8) * r);
        let mut pts = g.points().to_vec();
        let last = pts.len() - 1;
        pts[0].1 = &pts[1].1 - &m0 * &pts[1].0;
        pts[last].1 = &pts[last - 1].1 + &m1 * (r - &pts[last - 1].0);
        let g = PLProfile::from_points(pts)?;
        // The clamp line must end below g on both outer regions.
        let mut depth = r.clone();
        for (x, v) in g.points() {
            let need = if x <= &lm.r1 {
                Some(&m0 * (x - &lm.r1) - v)
            } else if x >= &lm.r3 {
                Some(&m1 * (x - &lm.r3) - v)
            } else {
                None
            };
            if let Some(need) = need {
                if need >= depth {
                    depth = need + eps;
                }
            }
        }
        let data = CaseData {
            r1: lm.r1.clone(),
            r2: lm.r2.clone(),
            r3: lm.r3.clone(),
            m0,
            m1,
            radius: r.clone(),
            epsilon: eps.clone(),
            g,
            clamp_depth: depth,
        };
        data.check()?;
        Ok((data, k))
    }
}

/// First index of maximal absolute value, if any entry is non-zero.
pub fn max_index(a: &[Scalar]) -> Option<usize> {
    let m = sup_norm(a);
    if m.is_zero() {
        return None;
    }
    a.iter().position(|x| x.abs() == m)
}

/// Lower and upper Hofer-distance estimates, and the exact oscillation of
/// the difference profile. Values in the `2π·a + b` form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem1Bounds {
    pub lower: Quantity,
    pub upper: Quantity,
    pub oscillation: Quantity,
}

/// `(4π + 7)ε`.
pub fn correction(eps: &Scalar) -> Quantity {
    Quantity::new(Scalar::from_int(2) * eps, Scalar::from_int(7) * eps)
}

pub fn theorem1_bounds(
    a: &EmbeddingPoint,
    b: &EmbeddingPoint,
    p: &ManifoldParams,
    eps: &Scalar,
    fam: &GeneratorFamily,
) -> Result<Theorem1Bounds> {
    let d = b.minus(a);
    let norm = sup_norm(&d);
    let r = &p.radius;
    let lower = (Quantity::normalized(r * &norm) - correction(eps)).clamp_nonnegative();
    let upper = Quantity::normalized(Scalar::from_int(2) * r * &norm);
    let osc = oscillation(&combine(&d, fam)?);
    Ok(Theorem1Bounds { lower, upper, oscillation: Quantity::normalized(osc) })
}

/// `∫_B ω^n` for the ball of capacity 2πR, as the coefficient of `(2π)^n`.
pub fn ball_volume(n: i64, radius: &Scalar) -> Scalar {
    radius.pow(n as u32)
}

/// The auxiliary profile: plateau R on `[0, R − 4ε]`, zero at `R − 3ε`,
/// peak R at `R − 2ε`, zero on `[R − ε − δ, R]`. Slopes are left as given
/// by these landmarks.
pub fn f0_profile(p: &ManifoldParams, eps: &Scalar, delta: &Scalar) -> Result<PLProfile> {
    let r = &p.radius;
    if !eps.is_positive() || Scalar::from_int(4) * eps >= *r {
        return Err(Error::ParameterError(format!("need 0 < 4ε < R, got ε = {eps}, R = {r}")));
    }
    if !delta.is_positive() || delta >= eps {
        return Err(Error::ParameterError(format!("need 0 < δ < ε, got δ = {delta}")));
    }
    let e = |k: i64| r - Scalar::from_int(k) * eps;
    let zero = Scalar::zero();
    PLProfile::from_points(vec![
        (zero.clone(), r.clone()),
        (e(4), r.clone()),
        (e(3), zero.clone()),
        (e(2), r.clone()),
        (e(1) - delta, zero.clone()),
        (r.clone(), zero),
    ])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem2Constants {
    pub c: Quantity,
    pub lower_bound: Quantity,
}

/// `vol_m` is `Vol(M)` as the coefficient of `(2π)^n`.
pub fn theorem2_constants(
    p: &ManifoldParams,
    eps: &Scalar,
    vol_m: &Scalar,
    a: &EmbeddingPoint,
) -> Result<Theorem2Constants> {
    let r = &p.radius;
    let ball = ball_volume(p.n, r);
    if vol_m <= &ball {
        return Err(Error::VolumeError(format!("Vol(M) = (2π)^{}·{vol_m} does not exceed the ball volume", p.n)));
    }
    let inner_r = r - Scalar::from_int(4) * eps;
    if !inner_r.is_positive() {
        return Err(Error::ParameterError(format!("need 4ε < R, got ε = {eps}")));
    }
    // 2πR·Vol(B)/Vol(M) = 2π·R·ball/vol_m, the (2π)^n factors cancel.
    let c = Quantity::new(r * &ball / vol_m, -eps.clone());
    let inner = ball_volume(p.n, &inner_r);
    let shell = &ball - &inner;
    let mut top = sup_norm(&a.coefficients);
    if let Some(a0) = &a.a0 {
        top = top.max(a0.abs());
    }
    let main = Quantity::normalized(r * &inner / vol_m * &top);
    let loss = correction(eps).max(Quantity::normalized(r * &shell / vol_m));
    Ok(Theorem2Constants { c, lower_bound: main - loss })
}
