//! Indexed action spectra of PL profiles: kinks, Conley-Zehnder degrees,
//! recapping, and the distinct-kink-actions predicate.

use std::collections::HashMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::params::ManifoldParams;
use crate::profile::PLProfile;
use crate::scalar::{gcd, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    /// Valley: left slope below right slope.
    Up,
    /// Peak: left slope above right slope.
    Down,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kink {
    pub r: Scalar,
    pub value: Scalar,
    pub left_slope: Scalar,
    pub right_slope: Scalar,
    pub orientation: Orientation,
    pub crossed_levels: Vec<i64>,
}

/// Integers strictly between `a` and `b`.
pub fn crossed_levels(a: &Scalar, b: &Scalar) -> Vec<i64> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let first = lo.floor_i64() + 1;
    let last = hi.ceil_i64() - 1;
    (first..=last).collect()
}

pub fn classify_kinks(f: &PLProfile) -> Vec<Kink> {
    let slopes = f.slopes();
    let pts = f.points();
    let mut out = Vec::new();
    for i in 1..pts.len() - 1 {
        let (left, right) = (&slopes[i - 1], &slopes[i]);
        if left == right {
            continue;
        }
        out.push(Kink {
            r: pts[i].0.clone(),
            value: pts[i].1.clone(),
            left_slope: left.clone(),
            right_slope: right.clone(),
            orientation: if left > right { Orientation::Down } else { Orientation::Up },
            crossed_levels: crossed_levels(left, right),
        });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionSource {
    KinkDown { r: Scalar, l: i64 },
    KinkUp { r: Scalar, l: i64 },
    YIntercept { l: i64 },
    Exterior { j: i64 },
}

impl ActionSource {
    pub fn to_json(&self) -> Value {
        match self {
            ActionSource::KinkDown { r, l } => json!({"kind": "KinkDown", "r": r.to_string(), "l": l}),
            ActionSource::KinkUp { r, l } => json!({"kind": "KinkUp", "r": r.to_string(), "l": l}),
            ActionSource::YIntercept { l } => json!({"kind": "YIntercept", "l": l}),
            ActionSource::Exterior { j } => json!({"kind": "Exterior", "j": j}),
        }
    }
}

/// Which family of base degrees a source belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SourceKind {
    KinkDown,
    KinkUp,
    YIntercept,
    Exterior,
}

/// Base degrees before recapping. For kinks the level `l` enters, for
/// exterior points `l` is the Morse index `j`.
pub fn base_degrees(kind: SourceKind, l: i64, n: i64) -> Vec<i64> {
    match kind {
        SourceKind::KinkDown => vec![-2 * l * n + n, -2 * l * n - n + 1],
        SourceKind::KinkUp => vec![-2 * l * n + n - 1, -2 * l * n - n],
        SourceKind::YIntercept => vec![-2 * l * n - n],
        SourceKind::Exterior => vec![l - n],
    }
}

/// The recapping index `k` with `base + 2Nk = d`, if one exists.
pub fn recap_index(base_degree: i64, d: i64, p: &ManifoldParams) -> Option<i64> {
    let diff = d - base_degree;
    if p.chern == 0 {
        return (diff == 0).then_some(0);
    }
    let step = 2 * p.chern;
    (diff % step == 0).then_some(diff / step)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexedAction {
    pub value: Scalar,
    pub degree: i64,
    pub source: ActionSource,
    pub k: i64,
}

impl IndexedAction {
    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value.to_string(),
            "degree": self.degree,
            "source": self.source.to_json(),
            "k": self.k,
        })
    }
}

/// All indexed actions of degree exactly `d`, sorted by (value, degree,
/// source, k). Equal values from different sources are kept separately.
pub fn enumerate_spectrum(f: &PLProfile, p: &ManifoldParams, d: i64) -> Vec<IndexedAction> {
    let shift = p.recap_shift();
    let mut out = Vec::new();
    let mut push = |value: Scalar, base: i64, source: ActionSource| {
        if let Some(k) = recap_index(base, d, p) {
            out.push(IndexedAction { value: value + Scalar::from_int(k) * &shift, degree: d, source, k });
        }
    };
    for kink in classify_kinks(f) {
        let kind = match kink.orientation {
            Orientation::Down => SourceKind::KinkDown,
            Orientation::Up => SourceKind::KinkUp,
        };
        for &l in &kink.crossed_levels {
            let base_value = -(Scalar::from_int(l) * &kink.r) + &kink.value;
            for base in base_degrees(kind, l, p.n) {
                let source = match kind {
                    SourceKind::KinkDown => ActionSource::KinkDown { r: kink.r.clone(), l },
                    _ => ActionSource::KinkUp { r: kink.r.clone(), l },
                };
                push(base_value.clone(), base, source);
            }
        }
    }
    let s0 = &f.slopes()[0];
    if !s0.is_integer() {
        let l = s0.floor_i64();
        push(f.points()[0].1.clone(), base_degrees(SourceKind::YIntercept, l, p.n)[0], ActionSource::YIntercept { l });
    }
    let f_r = f.points().last().unwrap().1.clone();
    for &j in &p.exterior_morse_indices {
        push(f_r.clone(), j - p.n, ActionSource::Exterior { j });
    }
    out.sort();
    out
}

pub fn spectrum_to_json(actions: &[IndexedAction]) -> Value {
    Value::Array(actions.iter().map(IndexedAction::to_json).collect())
}

/// Which base-degree equation `−2ln + c + 2Nk = d` to solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeVariant {
    /// Concave-down kink, `c = n`.
    DownUpper,
    /// Concave-down kink, `c = −n + 1`.
    DownLower,
    /// Concave-up kink, `c = n − 1`.
    UpUpper,
    /// Concave-up kink or y-intercept, `c = −n`.
    UpLower,
}

impl DegreeVariant {
    fn offset(self, n: i64) -> i64 {
        match self {
            DegreeVariant::DownUpper => n,
            DegreeVariant::DownLower => -n + 1,
            DegreeVariant::UpUpper => n - 1,
            DegreeVariant::UpLower => -n,
        }
    }
}

/// Integer solutions `l = l0 + l_step·z`, `k = k0 + k_step·z`, z ∈ ℤ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeFamily {
    pub d: i64,
    pub l0: i64,
    pub l_step: i64,
    pub k0: i64,
    pub k_step: i64,
}

impl DegreeFamily {
    pub fn at(&self, z: i64) -> (i64, i64) {
        (self.l0 + self.l_step * z, self.k0 + self.k_step * z)
    }

    /// Solutions for z in `range` whose `l` passes `admissible`.
    pub fn solutions(
        &self,
        range: std::ops::RangeInclusive<i64>,
        admissible: impl Fn(i64) -> bool,
    ) -> Vec<(i64, i64, i64)> {
        range
            .filter_map(|z| {
                let (l, k) = self.at(z);
                admissible(l).then_some((z, l, k))
            })
            .collect()
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Solves `−2ln + c + 2Nk = target` over the integers, with `D = gcd(2n, 2N)`.
/// The particular solution is normalized so `0 ≤ k0 < 2n/D`.
pub fn solve_degree_parametrization(
    target: i64,
    p: &ManifoldParams,
    variant: DegreeVariant,
) -> Result<DegreeFamily> {
    if p.chern == 0 {
        return Err(Error::NoSolution("N = 0 has no recapping family".into()));
    }
    let (a, b) = (2 * p.n, 2 * p.chern);
    let rhs = target - variant.offset(p.n);
    let d = gcd(a, b);
    if rhs % d != 0 {
        return Err(Error::NoSolution(format!("gcd(2n, 2N) = {d} does not divide {rhs}")));
    }
    // a·x + b·k = rhs with x = −l.
    let (_, u, v) = ext_gcd(a, b);
    let scale = rhs / d;
    let (x0, k0) = (u * scale, v * scale);
    let (x_step, k_step) = (-(b / d), a / d);
    let shift = k0.div_euclid(k_step);
    let (x0, k0) = (x0 - shift * x_step, k0 - shift * k_step);
    Ok(DegreeFamily { d, l0: -x0, l_step: -x_step, k0, k_step })
}

/// A pair of kink triples, or a kink triple and an endpoint, with equal action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KinkCollision {
    KinkKink { a: (Scalar, i64, i64), b: (Scalar, i64, i64) },
    KinkYIntercept { kink: (Scalar, i64, i64), k: i64 },
    KinkExterior { kink: (Scalar, i64, i64), k: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistinctKinkReport {
    pub distinct: bool,
    pub witness: Option<KinkCollision>,
}

/// Distinct-kink-actions check. With `σγ̂ ≠ 0` two base values collide for
/// some recappings iff they differ by a multiple of `σγ̂`; otherwise only
/// exact equality matters. `N = 0` is treated like `γ̂ = 0`.
pub fn has_distinct_kink_actions(f: &PLProfile, p: &ManifoldParams) -> DistinctKinkReport {
    let shift = p.recap_shift();
    // k' with a = b + k'·shift, if any.
    let hit = |a: &Scalar, b: &Scalar| -> Option<i64> {
        let diff = a - b;
        if shift.is_zero() {
            diff.is_zero().then_some(0)
        } else {
            (&diff / &shift).to_i64_exact()
        }
    };
    let mut triples = Vec::new();
    for kink in classify_kinks(f) {
        for &l in &kink.crossed_levels {
            triples.push((kink.r.clone(), l, -(Scalar::from_int(l) * &kink.r) + &kink.value));
        }
    }
    // Values collide iff they agree modulo the shift, so group by residue.
    let period = shift.abs();
    let residue = |v: &Scalar| -> Scalar {
        if period.is_zero() {
            v.clone()
        } else {
            v - Scalar::from_bigint((v / &period).floor_big()) * &period
        }
    };
    let residues: Vec<Scalar> = triples.iter().map(|t| residue(&t.2)).collect();
    let mut groups: HashMap<&Scalar, Vec<usize>> = HashMap::new();
    for (i, res) in residues.iter().enumerate() {
        groups.entry(res).or_default().push(i);
    }
    let fail = |w| DistinctKinkReport { distinct: false, witness: Some(w) };
    let f0 = &f.points()[0].1;
    let f_r = &f.points().last().unwrap().1;
    for (i, (r, l, v)) in triples.iter().enumerate() {
        let group = &groups[&residues[i]];
        if let Some(&j) = group.iter().find(|&&j| j > i) {
            let (r2, l2, v2) = &triples[j];
            let k = hit(v, v2).expect("same residue");
            return fail(KinkCollision::KinkKink { a: (r.clone(), *l, 0), b: (r2.clone(), *l2, k) });
        }
        if let Some(k) = hit(v, f0) {
            return fail(KinkCollision::KinkYIntercept { kink: (r.clone(), *l, 0), k });
        }
        if let Some(k) = hit(v, f_r) {
            return fail(KinkCollision::KinkExterior { kink: (r.clone(), *l, 0), k });
        }
    }
    DistinctKinkReport { distinct: true, witness: None }
}
