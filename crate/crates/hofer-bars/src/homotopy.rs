//! PL homotopies whose breakpoints move affinely in time, the action tracks
//! they carry, and exact event detection.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::params::ManifoldParams;
use crate::profile::PLProfile;
use crate::scalar::Scalar;
use crate::spectrum::{base_degrees, classify_kinks, crossed_levels, recap_index, ActionSource, SourceKind};

/// `c0 + c1·t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Affine {
    pub c0: Scalar,
    pub c1: Scalar,
}

impl Affine {
    pub fn new(c0: Scalar, c1: Scalar) -> Affine {
        Affine { c0, c1 }
    }

    pub fn constant(c: Scalar) -> Affine {
        Affine { c0: c, c1: Scalar::zero() }
    }

    pub fn eval(&self, t: &Scalar) -> Scalar {
        &self.c0 + &self.c1 * t
    }

    pub fn add(&self, o: &Affine) -> Affine {
        Affine::new(&self.c0 + &o.c0, &self.c1 + &o.c1)
    }

    pub fn sub(&self, o: &Affine) -> Affine {
        Affine::new(&self.c0 - &o.c0, &self.c1 - &o.c1)
    }

    pub fn scale(&self, a: &Scalar) -> Affine {
        Affine::new(a * &self.c0, a * &self.c1)
    }

    pub fn shift(&self, a: &Scalar) -> Affine {
        Affine::new(&self.c0 + a, self.c1.clone())
    }

    pub fn is_constant(&self) -> bool {
        self.c1.is_zero()
    }

    /// The unique zero, if the function is not constant.
    pub fn root(&self) -> Option<Scalar> {
        (!self.c1.is_zero()).then(|| -(&self.c0 / &self.c1))
    }
}

/// How two affine tracks meet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Meeting {
    Never,
    Always,
    At(Scalar),
}

pub fn meeting(a: &Affine, b: &Affine) -> Meeting {
    let d = a.sub(b);
    if d.c1.is_zero() {
        if d.c0.is_zero() {
            Meeting::Always
        } else {
            Meeting::Never
        }
    } else {
        Meeting::At(d.root().unwrap())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffinePoint {
    pub r: Affine,
    pub v: Affine,
}

impl AffinePoint {
    pub fn fixed(r: Scalar, v: Scalar) -> AffinePoint {
        AffinePoint { r: Affine::constant(r), v: Affine::constant(v) }
    }
}

/// A time window on which every breakpoint is affine in t.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubLeg {
    pub t0: Scalar,
    pub t1: Scalar,
    pub points: Vec<AffinePoint>,
}

impl SubLeg {
    /// Segment slope numerators/denominators: `Δv(t)` and `Δr(t)`.
    fn segments(&self) -> Vec<(Affine, Affine)> {
        self.points.windows(2).map(|w| (w[1].v.sub(&w[0].v), w[1].r.sub(&w[0].r))).collect()
    }

    /// Times in the open window where some segment slope is an integer,
    /// with the segment index and level.
    pub fn slope_events(&self) -> Vec<(Scalar, usize, i64)> {
        let mut out = Vec::new();
        for (i, (dv, dr)) in self.segments().iter().enumerate() {
            // Slope at an end of the window; a degenerate segment takes the
            // limit, which is finite only if both differences vanish.
            let slope_at = |t: &Scalar| -> Option<Scalar> {
                let den = dr.eval(t);
                if !den.is_zero() {
                    return Some(dv.eval(t) / den);
                }
                if dv.eval(t).is_zero() && !dr.c1.is_zero() {
                    return Some(&dv.c1 / &dr.c1);
                }
                None
            };
            // Segments that collapse at an end with unbounded slope do not
            // occur in the constructed homotopies.
            let (Some(a), Some(b)) = (slope_at(&self.t0), slope_at(&self.t1)) else {
                continue;
            };
            for l in crossed_levels(&a, &b) {
                // Δv(t) = l·Δr(t)
                let eq = dv.sub(&dr.scale(&Scalar::from_int(l)));
                if let Some(t) = eq.root() {
                    if t > self.t0 && t < self.t1 {
                        out.push((t, i, l));
                    }
                }
            }
        }
        out.sort();
        out
    }

    fn profile_at(&self, t: &Scalar) -> PLProfile {
        let mut pts: Vec<(Scalar, Scalar)> = Vec::with_capacity(self.points.len());
        for p in &self.points {
            let r = p.r.eval(t);
            if pts.last().is_some_and(|(last, _)| *last == r) {
                continue;
            }
            pts.push((r, p.v.eval(t)));
        }
        PLProfile::from_points(pts).expect("breakpoint order preserved on the window")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    Case1,
    Case2,
    Case3,
    Case4,
    Case5,
}

impl CaseTag {
    /// Cases whose first homotopy moves the left kink toward r₁.
    pub fn moves_left(self) -> bool {
        matches!(self, CaseTag::Case1 | CaseTag::Case2 | CaseTag::Case4)
    }

    pub fn number(self) -> u8 {
        match self {
            CaseTag::Case1 => 1,
            CaseTag::Case2 => 2,
            CaseTag::Case3 => 3,
            CaseTag::Case4 => 4,
            CaseTag::Case5 => 5,
        }
    }

    pub fn from_number(k: u8) -> Option<CaseTag> {
        Some(match k {
            1 => CaseTag::Case1,
            2 => CaseTag::Case2,
            3 => CaseTag::Case3,
            4 => CaseTag::Case4,
            5 => CaseTag::Case5,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LegKind {
    Fold { kink_index: usize },
    Line1 { case: CaseTag },
    Line2 { case: CaseTag },
    StraightLine,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyLeg {
    pub kind: LegKind,
    pieces: Vec<SubLeg>,
    /// `(time, r)` where the clamp line passes a breakpoint of the target.
    absorbed: Vec<(Scalar, Scalar)>,
}

impl HomotopyLeg {
    pub fn new(kind: LegKind, pieces: Vec<SubLeg>, absorbed: Vec<(Scalar, Scalar)>) -> HomotopyLeg {
        HomotopyLeg { kind, pieces, absorbed }
    }

    /// Straight line `(1−t)·f + t·g` on the union of breakpoints.
    pub fn straight_line(kind: LegKind, f: &PLProfile, g: &PLProfile) -> Result<HomotopyLeg> {
        if f.radius() != g.radius() {
            return Err(Error::DomainMismatch(format!("R = {} vs R = {}", f.radius(), g.radius())));
        }
        let mut rs: Vec<Scalar> = f.breakpoints().chain(g.breakpoints()).cloned().collect();
        rs.sort();
        rs.dedup();
        let points = rs
            .into_iter()
            .map(|r| {
                let (a, b) = (f.value_at(&r), g.value_at(&r));
                let slope = &b - &a;
                AffinePoint { r: Affine::constant(r), v: Affine::new(a, slope) }
            })
            .collect();
        Ok(HomotopyLeg::new(kind, vec![SubLeg { t0: Scalar::zero(), t1: Scalar::one(), points }], vec![]))
    }

    pub fn pieces(&self) -> &[SubLeg] {
        &self.pieces
    }

    pub fn absorptions(&self) -> &[(Scalar, Scalar)] {
        &self.absorbed
    }

    pub fn t_start(&self) -> &Scalar {
        &self.pieces[0].t0
    }

    pub fn t_end(&self) -> &Scalar {
        &self.pieces.last().unwrap().t1
    }

    fn piece_for(&self, t: &Scalar) -> &SubLeg {
        // Left limits at window boundaries.
        self.pieces.iter().find(|p| t <= &p.t1).unwrap_or_else(|| self.pieces.last().unwrap())
    }

    /// The profile at time t. At a boundary between windows the earlier
    /// window is used; coincident breakpoints are merged.
    pub fn profile_at(&self, t: &Scalar) -> PLProfile {
        self.piece_for(t).profile_at(t)
    }

    /// Restriction to `[ta, tb]` keeping absolute times.
    pub fn restrict(&self, ta: &Scalar, tb: &Scalar) -> HomotopyLeg {
        let pieces = self
            .pieces
            .iter()
            .filter(|p| &p.t1 > ta && &p.t0 < tb)
            .map(|p| SubLeg { t0: p.t0.clone().max(ta.clone()), t1: p.t1.clone().min(tb.clone()), points: p.points.clone() })
            .collect();
        let absorbed = self.absorbed.iter().filter(|(t, _)| t > ta && t < tb).cloned().collect();
        HomotopyLeg::new(self.kind.clone(), pieces, absorbed)
    }
}

/// Data for the two case homotopies: landmarks r₁ < r₂ < r₃ < R, end slopes
/// m₀ < 0 < m₁, the construction ε, the target profile g, and the depth H
/// of the clamp line (the line ends at height −H).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseData {
    pub r1: Scalar,
    pub r2: Scalar,
    pub r3: Scalar,
    pub m0: Scalar,
    pub m1: Scalar,
    pub radius: Scalar,
    pub epsilon: Scalar,
    pub g: PLProfile,
    pub clamp_depth: Scalar,
}

impl CaseData {
    pub fn delta1(&self) -> Scalar {
        &self.radius - &self.r1
    }

    pub fn delta2(&self) -> Scalar {
        &self.radius - &self.r2
    }

    pub fn delta3(&self) -> Scalar {
        &self.radius - &self.r3
    }

    /// The common endpoint of the two homotopies: g on [r₁, r₃], extended
    /// linearly with slopes m₀ and m₁.
    pub fn g1(&self) -> PLProfile {
        let r = &self.radius;
        let mut pts = vec![(Scalar::zero(), r - &self.m0 * &self.r1)];
        pts.extend(self.g.points().iter().filter(|(x, _)| x >= &self.r1 && x <= &self.r3).cloned());
        pts.push((r.clone(), r + &self.m1 * self.delta3()));
        PLProfile::from_points(pts).expect("landmarks are interior and increasing")
    }

    /// Structural checks shared by every case.
    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::CaseMismatch(m));
        let r = &self.radius;
        if self.g.radius() != r {
            return bad(format!("profile radius {} differs from R = {r}", self.g.radius()));
        }
        if !(Scalar::zero() < self.r1 && self.r1 < self.r2 && self.r2 < self.r3 && &self.r3 < r) {
            return bad("landmarks must satisfy 0 < r1 < r2 < r3 < R".into());
        }
        if !(self.m0.is_negative() && self.m0 > -Scalar::one()) {
            return bad(format!("m0 = {} must lie in (-1, 0)", self.m0));
        }
        if !(self.m1.is_positive() && self.m1 < Scalar::one()) {
            return bad(format!("m1 = {} must lie in (0, 1)", self.m1));
        }
        if self.g.value_at(&self.r1) != *r || self.g.value_at(&self.r3) != *r || !self.g.value_at(&self.r2).is_zero() {
            return bad("g must take the values R, 0, R at r1, r2, r3".into());
        }
        let on = |x: &Scalar| self.g.breakpoints().any(|b| b == x);
        if !(on(&self.r1) && on(&self.r2) && on(&self.r3)) {
            return bad("no kink of g at the landmarks".into());
        }
        if self.g.breakpoints().any(|b| (b > &self.r1 && b < &self.r2) || (b > &self.r2 && b < &self.r3)) {
            return bad("g must be linear between the landmarks".into());
        }
        // g lies under the clamp line at the start and above it at the end.
        let h = &self.clamp_depth;
        for (b, v) in self.g.points() {
            let region = if b <= &self.r1 {
                Some((&self.m0, &self.r1))
            } else if b >= &self.r3 {
                Some((&self.m1, &self.r3))
            } else {
                None
            };
            if let Some((m, anchor)) = region {
                let base = m * (b - anchor);
                if v > &(&base + r) {
                    return bad(format!("g exceeds the clamp line at r = {b}"));
                }
                if v <= &(&base - h) {
                    return bad(format!("clamp depth {h} does not clear g at r = {b}"));
                }
            }
        }
        Ok(())
    }
}

fn line_value(m: &Scalar, anchor: &Scalar, r: &Affine, h0: &Affine) -> Affine {
    r.shift(&-anchor).scale(m).add(h0)
}

/// One side of the clamp `max{m(r − anchor) + H₀(t), g}` over the g
/// breakpoints `pts` (left to right), evaluated structurally at `tm`.
fn clamp_side(pts: &[(Scalar, Scalar)], m: &Scalar, anchor: &Scalar, h0: &Affine, tm: &Scalar) -> Vec<AffinePoint> {
    let line_at = |b: &Scalar| m * (b - anchor) + h0.eval(tm);
    let above: Vec<bool> = pts.iter().map(|(b, v)| v > &line_at(b)).collect();
    let mut out = Vec::new();
    let last = pts.len() - 1;
    for i in 0..pts.len() {
        if i > 0 && above[i - 1] != above[i] {
            let (b0, v0) = &pts[i - 1];
            let (b1, v1) = &pts[i];
            let s = (v1 - v0) / (b1 - b0);
            // m(r − anchor) + H₀(t) = v0 + s(r − b0)
            let num = Affine::constant(v0 - &s * b0 + m * anchor).sub(h0);
            let r = num.scale(&(m - &s).recip());
            let v = line_value(m, anchor, &r, h0);
            out.push(AffinePoint { r, v });
        }
        let (b, v) = &pts[i];
        if above[i] {
            out.push(AffinePoint::fixed(b.clone(), v.clone()));
        } else if i == 0 || i == last {
            let r = Affine::constant(b.clone());
            let v = line_value(m, anchor, &r, h0);
            out.push(AffinePoint { r, v });
        }
    }
    out
}

/// The two homotopies of a case: h¹ from its moving-kink start to g₁, then
/// the descending clamp h² from g₁ to g, split where the clamp line passes
/// breakpoints of g.
pub fn case_homotopies(case: CaseTag, data: &CaseData) -> Result<(HomotopyLeg, HomotopyLeg)> {
    data.check()?;
    let d = data;
    let rr = &d.radius;
    let zero = Scalar::zero();
    let h1_points = if case.moves_left() {
        let rt = Affine::new(d.r2.clone(), &d.r1 - &d.r2);
        vec![
            AffinePoint { r: Affine::constant(zero.clone()), v: rt.scale(&-d.m0.clone()).add(&Affine::new(zero.clone(), rr.clone())) },
            AffinePoint { r: rt, v: Affine::new(zero.clone(), rr.clone()) },
            AffinePoint::fixed(d.r2.clone(), zero.clone()),
            AffinePoint::fixed(d.r3.clone(), rr.clone()),
            AffinePoint::fixed(rr.clone(), rr + &d.m1 * d.delta3()),
        ]
    } else {
        let rt = Affine::new(d.r2.clone(), &d.r3 - &d.r2);
        let end = Affine::constant(rr.clone()).sub(&rt).scale(&d.m1).add(&Affine::new(zero.clone(), rr.clone()));
        vec![
            AffinePoint::fixed(zero.clone(), rr - &d.m0 * &d.r1),
            AffinePoint::fixed(d.r1.clone(), rr.clone()),
            AffinePoint::fixed(d.r2.clone(), zero.clone()),
            AffinePoint { r: rt, v: Affine::new(zero.clone(), rr.clone()) },
            AffinePoint { r: Affine::constant(rr.clone()), v: end },
        ]
    };
    let h1 = HomotopyLeg::new(
        LegKind::Line1 { case },
        vec![SubLeg { t0: zero.clone(), t1: Scalar::one(), points: h1_points }],
        vec![],
    );

    // H₀(t) = R − (R + H)t
    let h0 = Affine::new(rr.clone(), -(rr + &d.clamp_depth));
    let left: Vec<_> = d.g.points().iter().filter(|(b, _)| b <= &d.r1).cloned().collect();
    let middle: Vec<_> = d.g.points().iter().filter(|(b, _)| b > &d.r1 && b < &d.r3).cloned().collect();
    let right: Vec<_> = d.g.points().iter().filter(|(b, _)| b >= &d.r3).cloned().collect();
    let mut absorbed = Vec::new();
    for (pts, m, anchor) in [(&left, &d.m0, &d.r1), (&right, &d.m1, &d.r3)] {
        for (b, v) in pts.iter() {
            // m(b − anchor) + H₀(t) = v
            let eq = Affine::constant(m * (b - anchor) - v).add(&h0);
            if let Some(t) = eq.root() {
                if t.is_positive() && t < Scalar::one() {
                    absorbed.push((t, b.clone()));
                }
            }
        }
    }
    absorbed.sort();
    let mut cuts: Vec<Scalar> = absorbed.iter().map(|(t, _)| t.clone()).collect();
    cuts.dedup();
    let mut bounds = vec![zero.clone()];
    bounds.extend(cuts);
    bounds.push(Scalar::one());
    let mut pieces = Vec::new();
    for w in bounds.windows(2) {
        let tm = (&w[0] + &w[1]) / Scalar::from_int(2);
        let mut points = clamp_side(&left, &d.m0, &d.r1, &h0, &tm);
        points.extend(middle.iter().map(|(b, v)| AffinePoint::fixed(b.clone(), v.clone())));
        points.extend(clamp_side(&right, &d.m1, &d.r3, &h0, &tm));
        pieces.push(SubLeg { t0: w[0].clone(), t1: w[1].clone(), points });
    }
    let h2 = HomotopyLeg::new(LegKind::Line2 { case }, pieces, absorbed);
    Ok((h1, h2))
}

/// Folding homotopy from the zero profile to f: kinks are unfolded from R
/// inward through the profiles gᵢ (f on [rᵢ, R], extended left of rᵢ with
/// the slope just right of rᵢ), then a final leg restores the y-intercept
/// segment.
pub fn fold_homotopy(f: &PLProfile) -> Vec<HomotopyLeg> {
    if f.is_zero() {
        return vec![];
    }
    let mut kinks = classify_kinks(f);
    kinks.reverse();
    let mut prev = PLProfile::zero(f.radius());
    let mut legs = Vec::new();
    for (i, kink) in kinks.iter().enumerate() {
        let m = &kink.right_slope;
        let mut pts = vec![(Scalar::zero(), &kink.value - m * &kink.r)];
        pts.extend(f.points().iter().filter(|(r, _)| r >= &kink.r).cloned());
        let gi = PLProfile::from_points(pts).expect("kink is interior");
        legs.push(HomotopyLeg::straight_line(LegKind::Fold { kink_index: i }, &prev, &gi).unwrap());
        prev = gi;
    }
    legs.push(HomotopyLeg::straight_line(LegKind::StraightLine, &prev, f).unwrap());
    legs
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrackSource {
    KinkDown { r: Affine, l: i64 },
    KinkUp { r: Affine, l: i64 },
    YIntercept { l: i64 },
    Exterior { j: i64 },
}

impl TrackSource {
    pub fn kind(&self) -> SourceKind {
        match self {
            TrackSource::KinkDown { .. } => SourceKind::KinkDown,
            TrackSource::KinkUp { .. } => SourceKind::KinkUp,
            TrackSource::YIntercept { .. } => SourceKind::YIntercept,
            TrackSource::Exterior { .. } => SourceKind::Exterior,
        }
    }

    pub fn r(&self) -> Option<&Affine> {
        match self {
            TrackSource::KinkDown { r, .. } | TrackSource::KinkUp { r, .. } => Some(r),
            _ => None,
        }
    }

    pub fn level(&self) -> i64 {
        match self {
            TrackSource::KinkDown { l, .. } | TrackSource::KinkUp { l, .. } | TrackSource::YIntercept { l } => *l,
            TrackSource::Exterior { j } => *j,
        }
    }

    pub fn at(&self, t: &Scalar) -> ActionSource {
        match self {
            TrackSource::KinkDown { r, l } => ActionSource::KinkDown { r: r.eval(t), l: *l },
            TrackSource::KinkUp { r, l } => ActionSource::KinkUp { r: r.eval(t), l: *l },
            TrackSource::YIntercept { l } => ActionSource::YIntercept { l: *l },
            TrackSource::Exterior { j } => ActionSource::Exterior { j: *j },
        }
    }
}

/// An action followed through a time window on which its degree is fixed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActionTrack {
    pub id: usize,
    pub source: TrackSource,
    pub k: i64,
    pub degree: i64,
    pub value: Affine,
    pub live: (Scalar, Scalar),
}

impl ActionTrack {
    pub fn describe(&self) -> String {
        let src = match &self.source {
            TrackSource::KinkDown { r, l } => format!("KinkDown(r={}+{}t, l={l})", r.c0, r.c1),
            TrackSource::KinkUp { r, l } => format!("KinkUp(r={}+{}t, l={l})", r.c0, r.c1),
            TrackSource::YIntercept { l } => format!("YIntercept(l={l})"),
            TrackSource::Exterior { j } => format!("Exterior(j={j})"),
        };
        format!("{src} k={} deg={}", self.k, self.degree)
    }

    /// Same action on the neighbouring window: same kind, level, recapping
    /// and degree, with matching position and value at time `t`.
    pub fn continues(&self, other: &ActionTrack, t: &Scalar) -> bool {
        self.source.kind() == other.source.kind()
            && self.source.level() == other.source.level()
            && self.k == other.k
            && self.degree == other.degree
            && self.value.eval(t) == other.value.eval(t)
            && self.source.r().map(|r| r.eval(t)) == other.source.r().map(|r| r.eval(t))
    }
}

/// Windows between slope events, per sub-leg: `(t0, t1, sub-leg index)`.
pub fn track_windows(leg: &HomotopyLeg) -> Vec<(Scalar, Scalar, usize)> {
    let mut out = Vec::new();
    for (pi, piece) in leg.pieces.iter().enumerate() {
        let mut cuts: Vec<Scalar> = piece.slope_events().into_iter().map(|e| e.0).collect();
        cuts.dedup();
        let mut b = vec![piece.t0.clone()];
        b.extend(cuts);
        b.push(piece.t1.clone());
        for w in b.windows(2) {
            out.push((w[0].clone(), w[1].clone(), pi));
        }
    }
    out
}

fn window_tracks(
    piece: &SubLeg,
    a: &Scalar,
    b: &Scalar,
    p: &ManifoldParams,
    degrees: &[i64],
    out: &mut Vec<ActionTrack>,
) {
    let tm = (a + b) / Scalar::from_int(2);
    let pts = &piece.points;
    let slopes: Vec<Scalar> = pts
        .windows(2)
        .map(|w| (w[1].v.eval(&tm) - w[0].v.eval(&tm)) / (w[1].r.eval(&tm) - w[0].r.eval(&tm)))
        .collect();
    let shift = p.recap_shift();
    let live = (a.clone(), b.clone());
    let mut push = |source: TrackSource, base_value: Affine, base: i64| {
        for &d in degrees {
            if let Some(k) = recap_index(base, d, p) {
                out.push(ActionTrack {
                    id: 0,
                    source: source.clone(),
                    k,
                    degree: d,
                    value: base_value.shift(&(Scalar::from_int(k) * &shift)),
                    live: live.clone(),
                });
            }
        }
    };
    for j in 1..pts.len() - 1 {
        let (left, right) = (&slopes[j - 1], &slopes[j]);
        if left == right {
            continue;
        }
        let kind = if left > right { SourceKind::KinkDown } else { SourceKind::KinkUp };
        for l in crossed_levels(left, right) {
            let value = pts[j].v.sub(&pts[j].r.scale(&Scalar::from_int(l)));
            let source = if kind == SourceKind::KinkDown {
                TrackSource::KinkDown { r: pts[j].r.clone(), l }
            } else {
                TrackSource::KinkUp { r: pts[j].r.clone(), l }
            };
            for base in base_degrees(kind, l, p.n) {
                push(source.clone(), value.clone(), base);
            }
        }
    }
    let s0 = &slopes[0];
    if !s0.is_integer() {
        let l = s0.floor_i64();
        push(TrackSource::YIntercept { l }, pts[0].v.clone(), base_degrees(SourceKind::YIntercept, l, p.n)[0]);
    }
    let last = pts.last().unwrap().v.clone();
    for &j in &p.exterior_morse_indices {
        push(TrackSource::Exterior { j }, last.clone(), j - p.n);
    }
}

/// Every action track of the requested degrees, window by window.
pub fn track_actions(leg: &HomotopyLeg, p: &ManifoldParams, degrees: &[i64]) -> Vec<ActionTrack> {
    let mut out = Vec::new();
    for (a, b, pi) in track_windows(leg) {
        window_tracks(&leg.pieces[pi], &a, &b, p, degrees, &mut out);
    }
    for (i, t) in out.iter_mut().enumerate() {
        t.id = i;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    LegBoundary,
    KinkAbsorbed { r: Scalar },
    SlopeHitsInteger { segment: usize, level: i64 },
    Collision { degree: i64, a: usize, b: usize, degenerate: bool },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::LegBoundary => "LegBoundary",
            EventKind::KinkAbsorbed { .. } => "KinkAbsorbed",
            EventKind::SlopeHitsInteger { .. } => "SlopeHitsInteger",
            EventKind::Collision { .. } => "Collision",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Event {
    pub time: Scalar,
    pub kind: EventKind,
}

impl Event {
    pub fn to_json(&self) -> Value {
        let details = match &self.kind {
            EventKind::LegBoundary => json!({}),
            EventKind::KinkAbsorbed { r } => json!({"r": r.to_string()}),
            EventKind::SlopeHitsInteger { segment, level } => json!({"segment": segment, "level": level}),
            EventKind::Collision { degree, a, b, degenerate } => {
                json!({"degree": degree, "a": a, "b": b, "degenerate": degenerate})
            }
        };
        json!({"t": self.time.to_string(), "kind": self.kind.name(), "details": details})
    }
}

/// When two tracks meet inside their common window `(lo, hi]`; identical
/// tracks are reported once at `lo`.
pub fn track_meeting(a: &ActionTrack, b: &ActionTrack) -> Option<(Scalar, bool)> {
    let lo = a.live.0.clone().max(b.live.0.clone());
    let hi = a.live.1.clone().min(b.live.1.clone());
    if lo >= hi {
        return None;
    }
    match meeting(&a.value, &b.value) {
        Meeting::Never => None,
        Meeting::Always => Some((lo, true)),
        Meeting::At(t) => (t > lo && t <= hi).then_some((t, false)),
    }
}

/// Meetings among tracks sharing the window `(lo, hi]`: pairs whose order
/// at `lo` (ties broken by rate) is inverted or tied at `hi`.
fn window_meetings<'a>(
    group: &[&'a ActionTrack],
    lo: &Scalar,
    hi: &Scalar,
) -> Vec<(&'a ActionTrack, &'a ActionTrack, Scalar, bool)> {
    let mut start: Vec<(Scalar, &Scalar, Scalar, &'a ActionTrack)> =
        group.iter().map(|t| (t.value.eval(lo), &t.value.c1, t.value.eval(hi), *t)).collect();
    start.sort_by(|a, b| (&a.0, a.1, a.3.id).cmp(&(&b.0, b.1, b.3.id)));
    let mut out = Vec::new();
    // Earlier tracks kept sorted by their value at `hi`.
    let mut seen: Vec<(&Scalar, &'a ActionTrack)> = Vec::with_capacity(start.len());
    for (_, _, end, b) in &start {
        let pos = seen.partition_point(|(v, _)| *v < end);
        for (_, a) in &seen[pos..] {
            if a.value == b.value {
                out.push((*a, *b, lo.clone(), true));
            } else if let Meeting::At(t) = meeting(&a.value, &b.value) {
                out.push((*a, *b, t, false));
            }
        }
        seen.insert(pos, (end, *b));
    }
    out
}

/// All events of a leg in `(time, kind, …)` order: boundaries, slope
/// events, absorptions, and pairwise collisions of equal-degree tracks.
pub fn detect_events(leg: &HomotopyLeg, tracks: &[ActionTrack]) -> Vec<Event> {
    let mut out = vec![
        Event { time: leg.t_start().clone(), kind: EventKind::LegBoundary },
        Event { time: leg.t_end().clone(), kind: EventKind::LegBoundary },
    ];
    for piece in &leg.pieces {
        for (time, segment, level) in piece.slope_events() {
            out.push(Event { time, kind: EventKind::SlopeHitsInteger { segment, level } });
        }
    }
    for (time, r) in &leg.absorbed {
        out.push(Event { time: time.clone(), kind: EventKind::KinkAbsorbed { r: r.clone() } });
    }
    let mut groups: BTreeMap<(i64, &Scalar, &Scalar), Vec<&ActionTrack>> = BTreeMap::new();
    for t in tracks {
        groups.entry((t.degree, &t.live.0, &t.live.1)).or_default().push(t);
    }
    let mut collide = |a: &ActionTrack, b: &ActionTrack, time: Scalar, degenerate: bool| {
        let (x, y) = (a.id.min(b.id), a.id.max(b.id));
        out.push(Event { time, kind: EventKind::Collision { degree: a.degree, a: x, b: y, degenerate } });
    };
    let keys: Vec<_> = groups.keys().cloned().collect();
    for (gi, key) in keys.iter().enumerate() {
        let group = &groups[key];
        for (a, b, time, degenerate) in window_meetings(group, key.1, key.2) {
            collide(a, b, time, degenerate);
        }
        // Tracks from other windows that overlap this one in time.
        for other in &keys[gi + 1..] {
            if other.0 != key.0 || other.1 >= key.2 {
                break;
            }
            for a in group {
                for b in &groups[other] {
                    if let Some((time, degenerate)) = track_meeting(a, b) {
                        collide(a, b, time, degenerate);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{make_profile, sup_distance};
    use crate::spectrum::enumerate_spectrum;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    fn tent() -> PLProfile {
        make_profile(&[(s("0"), s("0")), (s("1/2"), s("1/4")), (s("1"), s("0"))], &s("1")).unwrap()
    }

    /// Landmarks of the first generator for R = 9/10, ε = 1/20, with g
    /// flattened to small negative values away from the tent.
    pub(crate) fn sample_data() -> CaseData {
        let r = s("9/10");
        let pts = vec![
            (s("0"), s("-1/1000")),
            (s("8755/10000"), s("-1/1000")),
            (s("8765/10000"), s("-1/1000")),
            (s("8850/10000"), r.clone()),
            (s("8875/10000"), s("0")),
            (s("8900/10000"), r.clone()),
            (s("8985/10000"), s("-1/1000")),
            (s("8995/10000"), s("-1/1000")),
            (r.clone(), s("-1/1000")),
        ];
        CaseData {
            r1: s("885/1000"),
            r2: s("8875/10000"),
            r3: s("89/100"),
            m0: -(s("1/20") / (s("8") * s("885/1000"))),
            m1: s("1/20") / (s("8") * r.clone()),
            radius: r.clone(),
            epsilon: s("1/20"),
            g: PLProfile::from_points(pts).unwrap(),
            clamp_depth: r,
        }
    }

    #[test]
    fn affine_meetings() {
        let a = Affine::new(s("1"), s("2"));
        assert_eq!(meeting(&a, &Affine::constant(s("2"))), Meeting::At(s("1/2")));
        assert_eq!(meeting(&a, &a.clone()), Meeting::Always);
        assert_eq!(meeting(&Affine::constant(s("1")), &Affine::constant(s("2"))), Meeting::Never);
    }

    #[test]
    fn fold_leg_counts() {
        assert!(fold_homotopy(&PLProfile::zero(&s("1"))).is_empty());
        assert_eq!(fold_homotopy(&tent()).len(), 2);
        let three = make_profile(
            &[(s("0"), s("0")), (s("1/4"), s("1/8")), (s("1/2"), s("1/16")), (s("3/4"), s("1/5")), (s("1"), s("0"))],
            &s("1"),
        )
        .unwrap();
        let legs = fold_homotopy(&three);
        assert_eq!(legs.len(), 4);
        assert!(sup_distance(&legs[3].profile_at(&s("1")), &three).unwrap().is_zero());
        assert!(legs[0].profile_at(&s("0")).is_zero());
        for w in legs.windows(2) {
            assert!(sup_distance(&w[0].profile_at(&s("1")), &w[1].profile_at(&s("0"))).unwrap().is_zero());
        }
    }

    #[test]
    fn case_one_first_homotopy() {
        let d = sample_data();
        let (h1, h2) = case_homotopies(CaseTag::Case1, &d).unwrap();
        let end = h1.profile_at(&s("1"));
        assert_eq!(end, d.g1());
        // the moving kink ends at r1
        assert_eq!(end.value_at(&d.r1), d.radius);
        assert_eq!(h2.profile_at(&s("0")), d.g1());
        assert_eq!(h2.profile_at(&s("1")), d.g);
        assert!(!h2.absorptions().is_empty());
    }

    #[test]
    fn case_three_first_homotopy() {
        let d = sample_data();
        let (h1, h2) = case_homotopies(CaseTag::Case3, &d).unwrap();
        let start = h1.profile_at(&s("0"));
        assert_eq!(start.value_at(&d.r2), Scalar::zero());
        assert_eq!(h1.profile_at(&s("1")), d.g1());
        assert_eq!(h2.profile_at(&s("1")), d.g);
    }

    #[test]
    fn clamp_profiles_are_continuous_and_below_line() {
        let d = sample_data();
        let (_, h2) = case_homotopies(CaseTag::Case1, &d).unwrap();
        for i in 0..=40 {
            let t = Scalar::new(i, 40);
            let prof = h2.profile_at(&t);
            let h0 = &d.radius - (&d.radius + &d.clamp_depth) * &t;
            for (r, v) in d.g.points() {
                let got = prof.value_at(r);
                assert!(got >= *v);
                if r <= &d.r1 {
                    let line = &d.m0 * (r - &d.r1) + &h0;
                    assert_eq!(got, v.clone().max(line));
                }
            }
        }
    }

    #[test]
    fn tracks_match_spectrum() {
        let d = sample_data();
        let p = ManifoldParams::sphere(s("9/10")).unwrap();
        let (h1, h2) = case_homotopies(CaseTag::Case1, &d).unwrap();
        for leg in [&h1, &h2] {
            let tracks = track_actions(leg, &p, &[1, 2]);
            for (a, b, _) in track_windows(leg) {
                let tm = (&a * Scalar::from_int(2) + &b) / Scalar::from_int(3);
                let prof = leg.profile_at(&tm);
                for deg in [1, 2] {
                    let mut want: Vec<Scalar> = enumerate_spectrum(&prof, &p, deg).into_iter().map(|x| x.value).collect();
                    let mut got: Vec<Scalar> = tracks
                        .iter()
                        .filter(|t| t.degree == deg && t.live.0 == a && t.live.1 == b)
                        .map(|t| t.value.eval(&tm))
                        .collect();
                    want.sort();
                    got.sort();
                    assert_eq!(got, want);
                }
            }
        }
    }

    #[test]
    fn track_formulas_case_one() {
        let d = sample_data();
        let p = ManifoldParams::sphere(s("9/10")).unwrap();
        let (h1, _) = case_homotopies(CaseTag::Case1, &d).unwrap();
        let tracks = track_actions(&h1, &p, &[1, 2]);
        let rt = Affine::new(d.r2.clone(), &d.r1 - &d.r2);
        let rt_plus = rt.add(&Affine::new(Scalar::zero(), d.radius.clone()));
        assert!(tracks.iter().any(|t| t.degree == 2 && t.k == 0 && t.value == rt_plus));
        let y = rt.scale(&-d.m0.clone()).add(&Affine::new(Scalar::zero(), d.radius.clone()));
        assert!(tracks.iter().any(|t| t.degree == 1 && matches!(t.source, TrackSource::YIntercept { .. }) && t.value == y));
        assert!(tracks.iter().any(|t| t.degree == 1 && t.k == 0 && t.value == Affine::constant(d.r2.clone())));
    }

    #[test]
    fn events_examples() {
        let leg = HomotopyLeg::straight_line(LegKind::StraightLine, &tent(), &tent()).unwrap();
        let p = ManifoldParams::new(1, 0, Scalar::zero(), 0, s("1"), vec![0]).unwrap();
        let tracks = track_actions(&leg, &p, &[0]);
        let ev = detect_events(&leg, &tracks);
        assert_eq!(ev.iter().filter(|e| e.kind == EventKind::LegBoundary).count(), 2);
        assert_eq!(ev.len(), 2);

        // two constant equal tracks: one degenerate collision
        let mk = |id| ActionTrack {
            id,
            source: TrackSource::Exterior { j: 0 },
            k: 0,
            degree: 0,
            value: Affine::constant(s("1/3")),
            live: (s("0"), s("1")),
        };
        let ev = detect_events(&leg, &[mk(0), mk(1)]);
        let col: Vec<_> = ev.iter().filter(|e| matches!(e.kind, EventKind::Collision { .. })).collect();
        assert_eq!(col.len(), 1);
        assert!(matches!(col[0].kind, EventKind::Collision { degenerate: true, .. }));
    }

    #[test]
    fn overtaking_time_is_exact() {
        let d = sample_data();
        let p = ManifoldParams::sphere(s("9/10")).unwrap();
        let (h1, _) = case_homotopies(CaseTag::Case1, &d).unwrap();
        let tracks = track_actions(&h1, &p, &[1]);
        let y = tracks.iter().find(|t| matches!(t.source, TrackSource::YIntercept { .. })).unwrap();
        let c = tracks.iter().find(|t| t.value == Affine::constant(d.r2.clone())).unwrap();
        let ev = detect_events(&h1, &tracks);
        let hit = ev
            .iter()
            .find(|e| matches!(e.kind, EventKind::Collision { a, b, .. } if (a, b) == (c.id.min(y.id), c.id.max(y.id))))
            .unwrap();
        // R t − m₀ r(t) = r₂
        let t = &hit.time;
        let rt = &d.r2 + (&d.r1 - &d.r2) * t;
        assert_eq!(&d.radius * t - &d.m0 * rt, d.r2);
    }

    #[test]
    fn restriction_reproduces_events() {
        let d = sample_data();
        let p = ManifoldParams::sphere(s("9/10")).unwrap();
        let (_, h2) = case_homotopies(CaseTag::Case1, &d).unwrap();
        let (ta, tb) = (s("1/5"), s("3/5"));
        let full: Vec<Scalar> = detect_events(&h2, &track_actions(&h2, &p, &[1]))
            .into_iter()
            .filter(|e| !matches!(e.kind, EventKind::LegBoundary) && e.time > ta && e.time < tb)
            .map(|e| e.time)
            .collect();
        let sub = h2.restrict(&ta, &tb);
        let part: Vec<Scalar> = detect_events(&sub, &track_actions(&sub, &p, &[1]))
            .into_iter()
            .filter(|e| !matches!(e.kind, EventKind::LegBoundary) && e.time > ta && e.time < tb)
            .map(|e| e.time)
            .collect();
        assert_eq!(full, part);
    }

    proptest::proptest! {
        #[test]
        fn sweep_matches_pairwise(raw in proptest::collection::vec((-4i64..4, -3i64..3, 0usize..3), 1..25)) {
            let windows = [(s("0"), s("1")), (s("0"), s("1/2")), (s("1/2"), s("1"))];
            let tracks: Vec<ActionTrack> = raw
                .iter()
                .enumerate()
                .map(|(id, &(c0, c1, w))| ActionTrack {
                    id,
                    source: TrackSource::Exterior { j: 0 },
                    k: 0,
                    degree: 0,
                    value: Affine::new(Scalar::new(c0, 2), Scalar::from_int(c1)),
                    live: windows[w].clone(),
                })
                .collect();
            let leg = HomotopyLeg::straight_line(LegKind::StraightLine, &tent(), &tent()).unwrap();
            let got: Vec<Event> = detect_events(&leg, &tracks)
                .into_iter()
                .filter(|e| matches!(e.kind, EventKind::Collision { .. }))
                .collect();
            let mut want = Vec::new();
            for (i, a) in tracks.iter().enumerate() {
                for b in &tracks[i + 1..] {
                    if let Some((time, degenerate)) = track_meeting(a, b) {
                        want.push(Event { time, kind: EventKind::Collision { degree: 0, a: a.id, b: b.id, degenerate } });
                    }
                }
            }
            want.sort();
            proptest::prop_assert_eq!(got, want);
        }
    }
}
