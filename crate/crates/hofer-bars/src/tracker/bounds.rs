//! The labelled action families of h¹ and their asserted bounds.

use std::cmp::Ordering;

use crate::error::Result;
use crate::homotopy::{case_homotopies, CaseData, CaseTag};
use crate::params::ManifoldParams;
use crate::scalar::{gcd, Quantity, Scalar};
use crate::spectrum::{enumerate_spectrum, ActionSource, IndexedAction};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCheck {
    pub label: String,
    pub holds: bool,
    /// Range of the checked values, or the checked quantity.
    pub value: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    Moving,
    R1,
    R2,
    R3,
    Y,
    Ext,
    Other,
}

struct Ctx<'a> {
    p: &'a ManifoldParams,
    t: Scalar,
    rt: Scalar,
    /// D = gcd(2n, 2N), or 2n when N = 0.
    dd: i64,
    sigma_gamma: Scalar,
    acts: Vec<(Class, IndexedAction)>,
}

impl Ctx<'_> {
    /// `z = kD/2n` when integral.
    fn z(&self, k: i64) -> Option<i64> {
        let num = k * self.dd;
        (num % (2 * self.p.n) == 0).then(|| num / (2 * self.p.n))
    }

    /// `base + (2/D)·z·(nσγ̂ − Nρ)`.
    fn formula(&self, base: &Scalar, z: i64, rho: &Scalar) -> Scalar {
        let inner = Scalar::from_int(self.p.n) * &self.sigma_gamma - Scalar::from_int(self.p.chern) * rho;
        base + Scalar::new(2 * z, self.dd) * inner
    }

    fn select(&self, class: Class, degree: i64) -> Vec<&IndexedAction> {
        self.acts.iter().filter(|(c, a)| *c == class && a.degree == degree).map(|(_, a)| a).collect()
    }
}

fn span(acts: &[&IndexedAction]) -> String {
    match (acts.iter().map(|a| &a.value).min(), acts.iter().map(|a| &a.value).max()) {
        (Some(lo), Some(hi)) if lo == hi => lo.to_string(),
        (Some(lo), Some(hi)) => format!("{lo}..{hi}"),
        _ => "none".to_string(),
    }
}

/// A parametrized family: every action matches the formula with an
/// admissible z and satisfies `bound`; optionally z = 0 must occur.
#[allow(clippy::too_many_arguments)]
fn family(
    cx: &Ctx,
    label: &str,
    class: Class,
    degree: i64,
    base: &Scalar,
    rho: &Scalar,
    z_ok: impl Fn(i64) -> bool,
    bound: impl Fn(&Scalar) -> bool,
    need_z0: bool,
) -> BoundCheck {
    let acts = cx.select(class, degree);
    let fits = acts.iter().all(|a| match cx.z(a.k) {
        Some(z) => z_ok(z) && a.value == cx.formula(base, z, rho) && bound(&a.value),
        None => false,
    });
    let z0 = !need_z0 || acts.iter().any(|a| a.k == 0 && &a.value == base);
    BoundCheck { label: label.to_string(), holds: fits && z0, value: span(&acts) }
}

fn values(cx: &Ctx, label: &str, class: Class, degree: i64, ok: impl Fn(&Scalar) -> bool) -> BoundCheck {
    let acts = cx.select(class, degree);
    BoundCheck { label: label.to_string(), holds: acts.iter().all(|a| ok(&a.value)), value: span(&acts) }
}

fn classify(src: &ActionSource, rt: &Scalar, data: &CaseData) -> Class {
    match src {
        ActionSource::KinkDown { r, .. } | ActionSource::KinkUp { r, .. } => {
            if r == rt {
                Class::Moving
            } else if r == &data.r1 {
                Class::R1
            } else if r == &data.r2 {
                Class::R2
            } else if r == &data.r3 {
                Class::R3
            } else {
                Class::Other
            }
        }
        ActionSource::YIntercept { .. } => Class::Y,
        ActionSource::Exterior { .. } => Class::Ext,
    }
}

/// Evaluates every labelled family of the case at time t of h¹.
pub fn verify_case_bounds(case: CaseTag, data: &CaseData, p: &ManifoldParams, t: &Scalar) -> Result<Vec<BoundCheck>> {
    let (h1, _) = case_homotopies(case, data)?;
    let prof = h1.profile_at(t);
    let left_moving = case.moves_left();
    let rt = if left_moving {
        &data.r2 + (&data.r1 - &data.r2) * t
    } else {
        &data.r2 + (&data.r3 - &data.r2) * t
    };
    let d = if left_moving { p.n } else { -3 * p.n };
    let dd = if p.chern == 0 { 2 * p.n } else { gcd(2 * p.n, 2 * p.chern) };
    let mut acts = Vec::new();
    for deg in [d, d + 1] {
        for a in enumerate_spectrum(&prof, p, deg) {
            acts.push((classify(&a.source, &rt, data), a));
        }
    }
    let cx = Ctx { p, t: t.clone(), rt, dd, sigma_gamma: p.recap_shift(), acts };
    let mut out = vec![BoundCheck {
        label: "sources".into(),
        holds: cx.acts.iter().all(|(c, _)| *c != Class::Other),
        value: format!("{} actions", cx.acts.len()),
    }];
    if left_moving {
        out.extend(moving_left_checks(case, &cx, data, d));
    } else {
        out.extend(moving_right_checks(case, &cx, data, d));
    }
    Ok(out)
}

/// Labels A (Cases 1, 2) and C (Case 4).
fn moving_left_checks(case: CaseTag, cx: &Ctx, data: &CaseData, d: i64) -> Vec<BoundCheck> {
    let (rr, t, rt) = (&data.radius, &cx.t, &cx.rt);
    let two = Scalar::from_int(2);
    let d3 = data.delta3();
    let tag = if case == CaseTag::Case4 { "C" } else { "A" };
    let lab = |i: u8| format!("{tag}{i}");
    let c = case == CaseTag::Case4;
    let zero = Scalar::zero();
    let mut out = Vec::new();

    let base1 = &two * rr - &d3;
    out.push(family(cx, &lab(1), Class::R3, d + 1, &base1, &data.r3, |z| z > 0, |v| {
        if c { v < &zero } else { v >= &(&two * rr) }
    }, false));
    out.push(family(cx, &lab(2), Class::R3, d, rr, &data.r3, |z| z > 0, |v| if c { v < &zero } else { v > rr }, false));

    // The moving kink: z = 0 is the right endpoint and differs from every
    // other degree d+1 action except the concave-up ones at r₂.
    let right = rt + rr * t;
    let mut a3 = family(cx, &lab(3), Class::Moving, d + 1, &right, rt, |z| z <= 0, |_| true, true);
    let clash = cx
        .acts
        .iter()
        .filter(|(cl, a)| a.degree == d + 1 && a.value == right && !(*cl == Class::Moving && a.k == 0))
        .any(|(cl, _)| *cl != Class::R2);
    a3.holds &= !clash;
    out.push(a3);

    let base4 = rr * t;
    let floor4 = &base4 + &two * rr;
    out.push(family(cx, &lab(4), Class::Moving, d, &base4, rt, |z| z < 0, |v| {
        if c { v >= &floor4 } else { v <= &data.r2 }
    }, false));
    out.push(family(cx, &lab(5), Class::R2, d, &data.r2, &data.r2, |_| true, |_| true, true));

    let y = rr * t - &data.m0 * rt;
    let ys = cx.select(Class::Y, d);
    let gap = -(&data.m0 * &data.r1);
    let small = Quantity::new(gap.clone(), -data.epsilon.clone()).signum() == Ordering::Less;
    out.push(BoundCheck {
        label: lab(6),
        holds: ys.iter().any(|a| a.k == 0 && a.value == y) && gap.is_positive() && small,
        value: format!("{} (−m₀r₁ = {gap})", span(&ys)),
    });

    let ext = rr + &data.m1 * &d3;
    if c {
        let low = &ext - &two * rr;
        out.push(values(cx, &lab(7), Class::Ext, d, |v| (v == &ext || v <= &low) && v != &data.r2 && v != &y));
        out.push(values(cx, &lab(8), Class::Ext, d + 1, |v| v <= &low && v < &right));
    } else {
        out.push(values(cx, &lab(7), Class::Ext, d, |v| v >= rr));
        let g = &cx.p.gamma_hat;
        let floor8 = rr + g;
        let mut a8 = values(cx, &lab(8), Class::Ext, d + 1, |v| v >= &floor8);
        if !g.is_zero() {
            a8.holds &= floor8 >= Scalar::from_int(3) * rr;
        }
        out.push(a8);
    }
    out
}

/// Labels B (Case 3) and D (Case 5).
fn moving_right_checks(case: CaseTag, cx: &Ctx, data: &CaseData, d: i64) -> Vec<BoundCheck> {
    let (rr, t, rt) = (&data.radius, &cx.t, &cx.rt);
    let two = Scalar::from_int(2);
    let (d1, d3) = (data.delta1(), data.delta3());
    let five = case == CaseTag::Case5;
    let tag = if five { "D" } else { "B" };
    let lab = |i: u8| format!("{tag}{i}");
    let mut out = Vec::new();

    let b1 = cx.select(Class::R1, d + 1);
    out.push(family(cx, &lab(1), Class::R1, d + 1, &d1, &data.r1, |z| z < 0, |v| v > &d1, false));
    let floor2 = -rr.clone() + &two * &d1;
    out.push(family(cx, &lab(2), Class::R1, d, &floor2, &data.r1, |z| z < 0, |v| v >= &floor2, false));

    let right = rr * t - rt;
    let mut b3 = family(cx, &lab(3), Class::Moving, d + 1, &right, rt, |z| z >= 0, |_| true, true);
    b3.holds &= b1.iter().all(|a| d3 < a.value);
    out.push(b3);

    let base4 = rr * t - &two * rt;
    let zmin = if five { -1 } else { 0 };
    out.push(family(cx, &lab(4), Class::Moving, d, &base4, rt, |z| z >= zmin, |v| five || v <= &base4, false));
    if !five {
        // z = −1 would need 2N = D.
        out.push(BoundCheck {
            label: "B4z".into(),
            holds: 2 * cx.p.chern != cx.dd,
            value: format!("2N = {}, D = {}", 2 * cx.p.chern, cx.dd),
        });
    }

    let left = -data.r2.clone();
    let b2 = cx.select(Class::R1, d);
    let mut b5 = family(cx, &lab(5), Class::R2, d, &left, &data.r2, |_| true, |_| true, true);
    if !five {
        b5.holds &= left < floor2 && b2.iter().all(|a| left < a.value);
    }
    out.push(b5);

    let y0 = rr - &data.m0 * &data.r1;
    let g = &cx.p.gamma_hat;
    let ext = rr * t + &data.m1 * (rr - rt);
    if five {
        out.push(values(cx, &lab(6), Class::Y, d, |v| v == &y0));
        out.push(values(cx, &lab(7), Class::Ext, d, |v| v == &ext));
        out.push(values(cx, &lab(8), Class::Ext, d + 1, |v| v == &ext));
    } else {
        let cap = &y0 - g;
        let mut b6 = values(cx, &lab(6), Class::Y, d, |v| v <= &cap);
        let below = -rr.clone() - &data.m0 * &data.r1;
        b6.holds &= cap <= below && below < left;
        out.push(b6);
        let cap7 = &ext - g;
        out.push(values(cx, &lab(7), Class::Ext, d, |v| v <= &cap7 && v < &left));
        out.push(values(cx, &lab(8), Class::Ext, d + 1, |v| v <= &cap7 && v < &right));
    }
    out
}
