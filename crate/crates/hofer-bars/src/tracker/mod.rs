//! Bar continuation along the case homotopies.
//!
//! One bar is certified per run. Its endpoints are followed as action
//! tracks; every collision involving an endpoint is resolved by a named
//! rule or the run stops with [`Error::RuleConflict`].

mod bounds;

use std::collections::HashSet;

use serde_json::{json, Value};

use crate::barcodes::Bar;
use crate::embedding::{max_index, GeneratorFamily};
use crate::error::{Error, Result};
use crate::homotopy::{
    case_homotopies, fold_homotopy, Affine, meeting, track_actions, ActionTrack, CaseData, CaseTag, Event, EventKind, Meeting,
};
use crate::params::ManifoldParams;
use crate::profile::PLProfile;
use crate::scalar::{ExtendedScalar, Quantity, Scalar};
use crate::spectrum::SourceKind;

pub use bounds::{verify_case_bounds, BoundCheck};

pub fn dispatch_case(p: &ManifoldParams) -> CaseTag {
    if p.chern == 0 {
        return CaseTag::Case2;
    }
    match p.lambda_sign {
        1 if Scalar::from_int(p.n) * &p.gamma_hat >= Scalar::from_int(p.chern) * &p.radius => CaseTag::Case1,
        1 => CaseTag::Case3,
        -1 => CaseTag::Case4,
        _ => CaseTag::Case5,
    }
}

/// n for Cases 1, 2, 4 and −3n for Cases 3, 5.
pub fn tracked_degree(case: CaseTag, n: i64) -> i64 {
    if case.moves_left() {
        n
    } else {
        -3 * n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Inception,
    ConcaveUpExclusion,
    MixedDegreeCrossing,
    Exchange,
    RightFixed,
    ExteriorOvertake,
    LeftNonIncreasing,
    AxiomRule,
    Continuation,
    Handoff,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Inception => "Inception",
            Rule::ConcaveUpExclusion => "ConcaveUpExclusion",
            Rule::MixedDegreeCrossing => "MixedDegreeCrossing",
            Rule::Exchange => "Exchange",
            Rule::RightFixed => "RightFixed",
            Rule::ExteriorOvertake => "ExteriorOvertake",
            Rule::LeftNonIncreasing => "LeftNonIncreasing",
            Rule::AxiomRule => "AxiomRule",
            Rule::Continuation => "Continuation",
            Rule::Handoff => "Handoff",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoggedEvent {
    /// 1 for h¹, 2 for h², fold legs count from 1.
    pub leg: usize,
    pub event: Event,
    pub rule: Rule,
    pub detail: String,
    /// Source kind of the right endpoint when the rule fired.
    pub right_source: SourceKind,
    pub right_value: Scalar,
    /// Left endpoint at the event; on leg 2 only an upper bound.
    pub left_value: Option<Scalar>,
}

impl LoggedEvent {
    pub fn to_json(&self) -> Value {
        json!({
            "leg": self.leg,
            "event": self.event.to_json(),
            "rule": self.rule.name(),
            "detail": self.detail,
            "rightSource": format!("{:?}", self.right_source),
            "rightValue": self.right_value.to_string(),
            "leftValue": self.left_value.as_ref().map(Scalar::to_string),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Exchanged,
    NotExchanged,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarCertificate {
    pub case: CaseTag,
    pub tracked_degree: i64,
    /// The certified bar of g₁, the end of h¹.
    pub final_bar: Bar,
    pub branch: Branch,
    /// Right endpoint of the bar of g after h²; its left endpoint is at
    /// most `final_bar.left`.
    pub clamp_right: Scalar,
    pub lower_bound: Quantity,
    pub events: Vec<LoggedEvent>,
    pub applied_theorems: Vec<String>,
    pub flags: Vec<String>,
}

impl BarCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "case": self.case.number(),
            "trackedDegree": self.tracked_degree,
            "finalBar": {"left": self.final_bar.left.to_string(), "right": self.final_bar.right.to_string()},
            "branch": format!("{:?}", self.branch),
            "clampBar": {"leftAtMost": self.final_bar.left.to_string(), "right": self.clamp_right.to_string()},
            "lowerBound": {
                "twoPi": self.lower_bound.two_pi.to_string(),
                "raw": self.lower_bound.raw.to_string(),
                "decimal": self.lower_bound.to_decimal(20),
            },
            "eventLog": self.events.iter().map(LoggedEvent::to_json).collect::<Vec<_>>(),
            "appliedTheorems": self.applied_theorems,
            "flags": self.flags,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Line,
    Clamp,
    Fold,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Role {
    Right,
    Left,
}

/// Tracks grouped by their common live window, in time order.
fn windows(tracks: &[ActionTrack]) -> Vec<(Scalar, Scalar, Vec<&ActionTrack>)> {
    let mut out: Vec<(Scalar, Scalar, Vec<&ActionTrack>)> = Vec::new();
    for t in tracks {
        match out.last_mut() {
            Some((a, b, v)) if *a == t.live.0 && *b == t.live.1 => v.push(t),
            _ => out.push((t.live.0.clone(), t.live.1.clone(), vec![t])),
        }
    }
    out
}

/// The same action seen from two tracks at (possibly different) times.
fn same_action(a: &ActionTrack, ta: &Scalar, b: &ActionTrack, tb: &Scalar) -> bool {
    a.source.kind() == b.source.kind()
        && a.source.level() == b.source.level()
        && a.k == b.k
        && a.degree == b.degree
        && a.value.eval(ta) == b.value.eval(tb)
        && a.source.r().map(|r| r.eval(ta)) == b.source.r().map(|r| r.eval(tb))
}

fn conflict(t: &Scalar, detail: String) -> Error {
    Error::RuleConflict { time: t.to_string(), detail }
}

struct Run {
    case: CaseTag,
    d: i64,
    mode: Mode,
    leg: usize,
    log: Vec<LoggedEvent>,
    flags: Vec<String>,
    seen_degenerate: HashSet<String>,
    exchanged: bool,
    overtaken: bool,
    left_now: Option<Affine>,
}

impl Run {
    fn new(case: CaseTag, d: i64, mode: Mode) -> Run {
        Run {
            case,
            d,
            mode,
            leg: 1,
            log: Vec::new(),
            flags: Vec::new(),
            seen_degenerate: HashSet::new(),
            exchanged: false,
            overtaken: false,
            left_now: None,
        }
    }

    fn note(&mut self, t: &Scalar, kind: EventKind, rule: Rule, detail: String, right: &ActionTrack) {
        self.log.push(LoggedEvent {
            leg: self.leg,
            event: Event { time: t.clone(), kind },
            rule,
            detail,
            right_source: right.source.kind(),
            right_value: right.value.eval(t),
            left_value: self.left_now.as_ref().map(|a| a.eval(t)),
        });
    }

    fn collision(&mut self, t: &Scalar, a: &ActionTrack, b: &ActionTrack, degenerate: bool, rule: Rule, right: &ActionTrack) {
        let kind = EventKind::Collision { degree: b.degree, a: a.id, b: b.id, degenerate };
        let detail = format!("{} meets {}", a.describe(), b.describe());
        self.note(t, kind, rule, detail, right);
    }

    /// A track identical to an endpoint on the whole window.
    fn degenerate(&mut self, lo: &Scalar, role: Role, end: &ActionTrack, x: &ActionTrack, right: &ActionTrack) -> Result<()> {
        let key = format!("{:?}|{}|{}", role, x.describe(), end.describe());
        let rule = match role {
            Role::Right if x.degree == self.d && self.case == CaseTag::Case5 => Rule::AxiomRule,
            Role::Left if x.degree == self.d + 1 => Rule::MixedDegreeCrossing,
            _ => return Err(conflict(lo, format!("{} coincides with endpoint {}", x.describe(), end.describe()))),
        };
        if self.seen_degenerate.insert(key) {
            if rule == Rule::AxiomRule {
                self.flags.push(format!("coincident degree {} track {} never taken as a partner", x.degree, x.describe()));
            }
            self.collision(lo, end, x, true, rule, right);
        }
        Ok(())
    }

    fn right_meets(&mut self, t: &Scalar, right: &ActionTrack, x: &ActionTrack) -> Result<()> {
        if x.degree != self.d + 1 {
            self.collision(t, right, x, false, Rule::MixedDegreeCrossing, right);
            return Ok(());
        }
        let rule = match (self.mode, x.source.kind()) {
            (_, SourceKind::KinkUp) => Rule::ConcaveUpExclusion,
            (Mode::Clamp, SourceKind::Exterior) if self.case == CaseTag::Case5 => {
                self.overtaken = true;
                Rule::ExteriorOvertake
            }
            _ => return Err(conflict(t, format!("{} meets right endpoint {}", x.describe(), right.describe()))),
        };
        self.collision(t, right, x, false, rule, right);
        Ok(())
    }

    fn exchange_partner(&self, x: &ActionTrack) -> bool {
        match self.mode {
            Mode::Line if self.case.moves_left() => x.source.kind() == SourceKind::YIntercept,
            Mode::Line => x.source.kind() == SourceKind::KinkDown && !x.source.r().unwrap().is_constant(),
            Mode::Fold => x.source.kind() == SourceKind::YIntercept,
            Mode::Clamp => false,
        }
    }

    /// Returns the new left endpoint on an exchange.
    fn left_meets(&mut self, t: &Scalar, left: &ActionTrack, x: &ActionTrack, right: &ActionTrack) -> Result<bool> {
        if x.degree != self.d {
            self.collision(t, left, x, false, Rule::MixedDegreeCrossing, right);
            return Ok(false);
        }
        if x.value.c1 > left.value.c1 && self.exchange_partner(x) {
            self.exchanged = true;
            self.collision(t, left, x, false, Rule::Exchange, right);
            return Ok(true);
        }
        Err(conflict(t, format!("{} meets left endpoint {}", x.describe(), left.describe())))
    }

    /// Follows the endpoints through one window `(lo, hi]`.
    fn window(
        &mut self,
        lo: &Scalar,
        hi: &Scalar,
        tracks: &[&ActionTrack],
        right: &mut ActionTrack,
        left: &mut Option<ActionTrack>,
    ) -> Result<()> {
        for x in tracks {
            if x.id == right.id || left.as_ref().is_some_and(|l| l.id == x.id) {
                continue;
            }
            if self.mode == Mode::Clamp && x.degree == self.d && x.value.c1.is_positive() {
                return Err(conflict(lo, format!("{} increases during the clamp", x.describe())));
            }
            if x.value == right.value {
                let r = right.clone();
                self.degenerate(lo, Role::Right, &r, x, &r)?;
            }
            if let Some(l) = left.clone() {
                if x.value == l.value {
                    self.degenerate(lo, Role::Left, &l, x, right)?;
                }
            }
        }
        let mut now = lo.clone();
        loop {
            if let Some(l) = left.as_ref() {
                match meeting(&l.value, &right.value) {
                    Meeting::Always => return Err(conflict(&now, "bar endpoints coincide".into())),
                    Meeting::At(t) if t > now && &t <= hi => {
                        return Err(conflict(&t, format!("bar collapses: {} meets {}", l.describe(), right.describe())))
                    }
                    _ => {}
                }
            }
            let mut hits: Vec<(Scalar, Role, usize)> = Vec::new();
            for (i, x) in tracks.iter().enumerate() {
                if x.id == right.id || left.as_ref().is_some_and(|l| l.id == x.id) {
                    continue;
                }
                if let Meeting::At(t) = meeting(&right.value, &x.value) {
                    if t > now && &t <= hi {
                        hits.push((t, Role::Right, i));
                    }
                }
                if let Some(l) = left.as_ref() {
                    if let Meeting::At(t) = meeting(&l.value, &x.value) {
                        if t > now && &t <= hi {
                            hits.push((t, Role::Left, i));
                        }
                    }
                }
            }
            let Some(t) = hits.iter().map(|h| h.0.clone()).min() else { break };
            hits.retain(|h| h.0 == t);
            hits.sort_by(|a, b| (a.1, tracks[a.2].degree, &tracks[a.2].source, tracks[a.2].k).cmp(&(
                b.1,
                tracks[b.2].degree,
                &tracks[b.2].source,
                tracks[b.2].k,
            )));
            let mut swapped = false;
            for (_, role, i) in hits {
                let x = tracks[i];
                match role {
                    Role::Right => self.right_meets(&t, right, x)?,
                    Role::Left if !swapped => {
                        let l = left.clone().expect("left hits need a left endpoint");
                        if self.left_meets(&t, &l, x, right)? {
                            *left = Some(x.clone());
                            self.left_now = Some(x.value.clone());
                            swapped = true;
                        }
                    }
                    Role::Left => {}
                }
            }
            now = t;
        }
        Ok(())
    }

    /// The track of `next` carrying the action of `prev` across a window
    /// boundary.
    fn reidentify(
        &mut self,
        prev: &ActionTrack,
        tp: &Scalar,
        next: &[&ActionTrack],
        tn: &Scalar,
        right: Option<&ActionTrack>,
    ) -> Result<ActionTrack> {
        if let Some(x) = next.iter().find(|x| same_action(prev, tp, x, tn)) {
            return Ok((*x).clone());
        }
        let v = prev.value.eval(tp);
        let cands: Vec<&&ActionTrack> =
            next.iter().filter(|x| x.degree == prev.degree && x.value.eval(tn) == v).collect();
        if cands.len() != 1 {
            return Err(conflict(tn, format!("{} has {} successors", prev.describe(), cands.len())));
        }
        let x = (*cands[0]).clone();
        let detail = format!("{} continues as {}", prev.describe(), x.describe());
        let r = right.cloned().unwrap_or_else(|| x.clone());
        self.note(tn, EventKind::LegBoundary, Rule::Handoff, detail, &r);
        Ok(x)
    }

    /// Runs a list of windows starting from the given endpoints.
    fn follow(
        &mut self,
        wins: &[(Scalar, Scalar, Vec<&ActionTrack>)],
        mut right: ActionTrack,
        mut left: Option<ActionTrack>,
    ) -> Result<(ActionTrack, Option<ActionTrack>)> {
        for (wi, (lo, hi, tracks)) in wins.iter().enumerate() {
            if wi > 0 {
                right = self.reidentify(&right, lo, tracks, lo, None)?;
                if let Some(l) = left.take() {
                    left = Some(self.reidentify(&l, lo, tracks, lo, Some(&right))?);
                }
            }
            if let Some(l) = &left {
                self.left_now = Some(l.value.clone());
            }
            self.window(lo, hi, tracks, &mut right, &mut left)?;
        }
        Ok((right, left))
    }
}

fn check_case_data(case: CaseTag, p: &ManifoldParams, data: &CaseData) -> Result<()> {
    if data.radius != p.radius {
        return Err(Error::CaseMismatch(format!("data radius {} differs from R = {}", data.radius, p.radius)));
    }
    if matches!(case, CaseTag::Case3) && Scalar::from_int(p.n) * &p.gamma_hat >= Scalar::from_int(p.chern) * &data.r1 {
        return Err(Error::CaseMismatch("Case 3 needs nγ̂ < N·r₁".into()));
    }
    data.check()
}

/// Picks the inception pair on the first window of h¹: the moving
/// concave-down track of degree d+1 with k = 0 and the concave-up r₂ track
/// of degree d with the same value at t = 0.
fn inception(case: CaseTag, d: i64, data: &CaseData, tracks: &[&ActionTrack]) -> Result<(ActionTrack, ActionTrack)> {
    let l = if case.moves_left() { -1 } else { 1 };
    let zero = Scalar::zero();
    let right = tracks
        .iter()
        .find(|x| {
            matches!(&x.source, crate::homotopy::TrackSource::KinkDown { r, l: lv } if !r.is_constant() && *lv == l)
                && x.k == 0
                && x.degree == d + 1
        })
        .ok_or_else(|| Error::CaseMismatch("no moving concave-down track of degree d+1".into()))?;
    let v0 = right.value.eval(&zero);
    let left = tracks
        .iter()
        .find(|x| {
            matches!(&x.source, crate::homotopy::TrackSource::KinkUp { r, l: lv } if r.is_constant() && r.c0 == data.r2 && *lv == l)
                && x.k == 0
                && x.degree == d
                && x.value.eval(&zero) == v0
        })
        .ok_or_else(|| Error::CaseMismatch("no concave-up r₂ track pairs with the inception track".into()))?;
    Ok(((*right).clone(), (*left).clone()))
}

pub fn run_certificate(p: &ManifoldParams, data: &CaseData) -> Result<BarCertificate> {
    let case = dispatch_case(p);
    check_case_data(case, p, data)?;
    let d = tracked_degree(case, p.n);
    let (h1, h2) = case_homotopies(case, data)?;
    let degrees = [d, d + 1];
    let mut run = Run::new(case, d, Mode::Line);

    let t1 = track_actions(&h1, p, &degrees);
    let w1 = windows(&t1);
    let first = &w1.first().ok_or_else(|| Error::CaseMismatch("h¹ has no windows".into()))?.2;
    let (right, left) = inception(case, d, data, first)?;
    run.left_now = Some(left.value.clone());
    let zero = Scalar::zero();
    let v0 = right.value.eval(&zero);
    run.note(&zero, EventKind::LegBoundary, Rule::Inception, format!("{} paired with {}", right.describe(), left.describe()), &right);
    for x in first {
        if x.id == right.id || x.id == left.id || x.value == right.value || x.value.eval(&zero) != v0 {
            continue;
        }
        if x.degree == d + 1 && x.source.kind() == SourceKind::KinkUp {
            run.collision(&zero, &right, x, false, Rule::ConcaveUpExclusion, &right);
        } else {
            return Err(conflict(&zero, format!("{} starts at the inception value", x.describe())));
        }
    }
    let (right, left) = run.follow(&w1, right, Some(left))?;
    let left = left.expect("h¹ keeps a left endpoint");
    let one = Scalar::one();
    let bar_left = left.value.eval(&one);
    let bar_right = right.value.eval(&one);
    let final_bar = Bar::new(bar_left.clone(), ExtendedScalar::Finite(bar_right.clone()))
        .map_err(|_| conflict(&one, "certified bar is empty".into()))?;
    run.note(&one, EventKind::LegBoundary, Rule::Continuation, format!("bar [{bar_left}, {bar_right}) at g₁"), &right);

    run.leg = 2;
    run.mode = Mode::Clamp;
    run.left_now = Some(Affine::constant(bar_left.clone()));
    let t2 = track_actions(&h2, p, &degrees);
    let w2 = windows(&t2);
    let start = &w2.first().ok_or_else(|| Error::CaseMismatch("h² has no windows".into()))?.2;
    let right = run.reidentify(&right, &one, start, &zero, None)?;
    run.note(&zero, EventKind::LegBoundary, Rule::RightFixed, format!("{} held fixed", right.describe()), &right);
    let (right, _) = run.follow(&w2, right, None)?;
    let clamp_right = right.value.eval(&one);
    if clamp_right != bar_right && !run.overtaken {
        return Err(conflict(&one, format!("right endpoint moved from {bar_right} to {clamp_right}")));
    }
    run.note(&one, EventKind::LegBoundary, Rule::LeftNonIncreasing, format!("left endpoint at most {bar_left}"), &right);

    let len = certified_length(case, data);
    let lower_bound = Quantity::new(len, -(Scalar::from_int(7) * &data.epsilon));
    let mut theorems = vec![
        "concave-down inception".to_string(),
        "concave-up exclusion".to_string(),
        "ε-matching continuity of barcodes".to_string(),
        "straight-line homotopy estimate".to_string(),
    ];
    if run.exchanged {
        theorems.insert(1, "interval-counting exchange".to_string());
    }
    Ok(BarCertificate {
        case,
        tracked_degree: d,
        final_bar,
        branch: if run.exchanged { Branch::Exchanged } else { Branch::NotExchanged },
        clamp_right,
        lower_bound,
        events: run.log,
        applied_theorems: theorems,
        flags: run.flags,
    })
}

/// Length guaranteed for the bar of g over both branches, 2π-units.
fn certified_length(case: CaseTag, data: &CaseData) -> Scalar {
    let r = &data.radius;
    match case {
        CaseTag::Case3 => &data.r2 - data.delta3(),
        CaseTag::Case5 => (&data.r2 - data.delta3()).min(r - Scalar::from_int(2) * data.delta3()),
        _ => {
            let c0 = data.r2.clone().max(r - &data.m0 * &data.r1);
            &data.r1 + r - c0
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthBound {
    /// `2πR·max|aᵢ| − (4π+7)ε`.
    pub bound: Quantity,
    pub k: usize,
    pub certificate: BarCertificate,
}

/// Certifies the unit case with `a_k` raised to 1, then applies the
/// straight-line correction `2πR(1 − |a_k|)`.
pub fn boundary_depth_lower_bound(
    a: &[Scalar],
    fam: &GeneratorFamily,
    p: &ManifoldParams,
    seed: u64,
) -> Result<DepthBound> {
    let k = max_index(a).ok_or(Error::AllZero)?;
    let (data, _) = CaseData::from_embedding(fam, a, p, seed)?;
    let cert = run_certificate(p, &data)?;
    let eps = &fam.epsilon;
    let two = Scalar::from_int(2);
    let seven = Scalar::from_int(7);
    let unit = Quantity::new(&p.radius - &two * eps, -(&seven * eps));
    if cert.lower_bound < unit {
        return Err(conflict(&Scalar::one(), format!("certified bound {} below the unit bound", cert.lower_bound)));
    }
    let bound = Quantity::new(&p.radius * a[k].abs() - &two * eps, -(&seven * eps));
    Ok(DepthBound { bound, k, certificate: cert })
}

/// One pairing followed along a fold leg.
#[derive(Clone, Debug, PartialEq)]
pub struct FoldRun {
    pub leg: usize,
    pub born: Scalar,
    pub events: Vec<LoggedEvent>,
    pub outcome: Result<()>,
}

/// Pairs every concave-down degree-(d+1) track born inside a fold leg
/// with an equal-valued degree-d track and follows the pair to the end of
/// the leg with the same rules as h¹.
pub fn fold_certificates(f: &PLProfile, p: &ManifoldParams, d: i64) -> Vec<FoldRun> {
    let mut out = Vec::new();
    for (li, leg) in fold_homotopy(f).iter().enumerate() {
        let tracks = track_actions(leg, p, &[d, d + 1]);
        let wins = windows(&tracks);
        for wi in 1..wins.len() {
            let (lo, _, now) = &wins[wi];
            let before = &wins[wi - 1].2;
            for right in now.iter().filter(|x| x.degree == d + 1 && x.source.kind() == SourceKind::KinkDown) {
                if before.iter().any(|y| same_action(y, lo, right, lo)) {
                    continue;
                }
                let v = right.value.eval(lo);
                let partner = now
                    .iter()
                    .filter(|x| x.degree == d && x.value.eval(lo) == v)
                    .min_by_key(|x| x.source.kind() != SourceKind::YIntercept);
                let Some(left) = partner else { continue };
                let case = CaseTag::Case1;
                let mut run = Run::new(case, d, Mode::Fold);
                run.leg = li + 1;
                run.left_now = Some(left.value.clone());
                run.note(lo, EventKind::LegBoundary, Rule::Inception, format!("{} paired with {}", right.describe(), left.describe()), right);
                let outcome = run.follow(&wins[wi..], (*right).clone(), Some((*left).clone())).map(|_| ());
                out.push(FoldRun { leg: li + 1, born: lo.clone(), events: run.log, outcome });
            }
        }
    }
    out
}
