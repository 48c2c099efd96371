#![allow(dead_code)]

use hofer_bars::embedding::{build_generators, GeneratorFamily};
use hofer_bars::homotopy::{CaseData, CaseTag};
use hofer_bars::{make_profile, ManifoldParams, PLProfile, Scalar};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn s(x: &str) -> Scalar {
    x.parse().unwrap()
}

pub fn q(n: i64, d: i64) -> Scalar {
    Scalar::new(n, d)
}

/// A rational in `[lo, hi]` with denominator `den`.
pub fn rand_rational(rng: &mut ChaCha8Rng, lo: &Scalar, hi: &Scalar, den: i64) -> Scalar {
    let k = rng.gen_range(0..=den);
    lo + (hi - lo) * Scalar::new(k, den)
}

/// Random profile on `[0, R]` satisfying the slope condition.
pub fn rand_profile(rng: &mut ChaCha8Rng, radius: &Scalar) -> PLProfile {
    loop {
        let k = rng.gen_range(1..=5);
        let mut xs: Vec<i64> = (1..100).collect::<Vec<_>>();
        xs.shuffle(rng);
        let mut cuts: Vec<i64> = xs[..k].to_vec();
        cuts.sort();
        let mut pts = vec![(Scalar::zero(), q(rng.gen_range(-300..300), 97))];
        for c in cuts {
            pts.push((radius * q(c, 100), q(rng.gen_range(-300..300), 97)));
        }
        let last = pts.last().unwrap().1.clone();
        pts.push((radius.clone(), &last + q(rng.gen_range(-9..=9), 1000)));
        if let Ok(f) = make_profile(&pts, radius) {
            return f;
        }
    }
}

pub fn rand_exterior(rng: &mut ChaCha8Rng, n: i64) -> Vec<i64> {
    let mut v = vec![0];
    for j in 1..2 * n {
        if rng.gen_bool(0.4) {
            v.push(j);
        }
    }
    v
}

/// Random admissible parameters, epsilon and case data for a case.
pub fn rand_case(rng: &mut ChaCha8Rng, case: CaseTag) -> (ManifoldParams, GeneratorFamily, CaseData) {
    loop {
        let radius = q(rng.gen_range(50..=100), 100);
        let eps = &radius / Scalar::from_int(rng.gen_range(16..=30));
        let n = match case {
            CaseTag::Case3 => 1,
            _ => rng.gen_range(1..=3),
        };
        let ext = rand_exterior(rng, n);
        let probe = ManifoldParams::new(n, 0, Scalar::zero(), 1, radius.clone(), ext.clone()).unwrap();
        let fam = build_generators(&probe, &eps, 1).unwrap();
        let r1 = fam.landmarks[0].r1.clone();
        let two_r = Scalar::from_int(2) * &radius;
        let (chern, gamma, sign) = match case {
            CaseTag::Case1 => {
                let chern = rng.gen_range(1..=4);
                let need = two_r.clone().max(Scalar::from_int(chern) * &radius / Scalar::from_int(n));
                (chern, &need + rand_rational(rng, &Scalar::zero(), &Scalar::one(), 8), 1)
            }
            CaseTag::Case2 => (0, Scalar::zero(), rng.gen_range(-1..=1)),
            CaseTag::Case3 => {
                let chern = rng.gen_range(3..=5);
                let top = Scalar::from_int(chern) * &r1 / Scalar::from_int(n);
                let g = rand_rational(rng, &two_r, &top, 64);
                if g >= top {
                    continue;
                }
                (chern, g, 1)
            }
            CaseTag::Case4 => (rng.gen_range(1..=4), &two_r + rand_rational(rng, &Scalar::zero(), &Scalar::one(), 8), -1),
            CaseTag::Case5 => (rng.gen_range(1..=4), Scalar::zero(), 0),
        };
        let p = ManifoldParams::new(n, chern, gamma, sign, radius, ext).unwrap();
        let seed = rng.gen();
        match CaseData::from_embedding(&fam, &[Scalar::one()], &p, seed) {
            Ok((data, _)) => return (p, fam, data),
            Err(_) => continue,
        }
    }
}
