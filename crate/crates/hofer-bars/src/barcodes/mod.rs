//! Barcodes, ε-matchings, exact bottleneck distance and boundary depth.

mod export;
mod reduce;

use std::collections::BTreeMap;

pub use export::{barcode_from_json, barcode_to_json, barcode_to_svg, barcodes_to_svg};
pub use reduce::{reduce_filtered_complex, Field, FilteredComplex, Generator};

use crate::error::{Error, Result};
use crate::scalar::{ExtendedScalar, Scalar};

/// A half-open bar `[left, right)` with `left < right`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bar {
    pub left: Scalar,
    pub right: ExtendedScalar,
}

impl Bar {
    pub fn new(left: Scalar, right: ExtendedScalar) -> Result<Bar> {
        if let ExtendedScalar::Finite(r) = &right {
            if r <= &left {
                return Err(Error::DomainError(format!("empty bar [{left}, {r})")));
            }
        }
        Ok(Bar { left, right })
    }

    pub fn finite(left: Scalar, right: Scalar) -> Result<Bar> {
        Bar::new(left, ExtendedScalar::Finite(right))
    }

    pub fn infinite(left: Scalar) -> Bar {
        Bar { left, right: ExtendedScalar::Infinity }
    }

    /// Length, `None` for infinite bars.
    pub fn length(&self) -> Option<Scalar> {
        self.right.finite().map(|r| r - &self.left)
    }

    pub fn is_infinite(&self) -> bool {
        self.right.is_infinite()
    }
}

/// Multiset of bars in one degree, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Barcode {
    pub degree: i64,
    bars: Vec<Bar>,
}

impl Barcode {
    pub fn new(degree: i64, mut bars: Vec<Bar>) -> Barcode {
        bars.sort();
        Barcode { degree, bars }
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    /// Multiplicity of each distinct bar.
    pub fn multiplicities(&self) -> Vec<(Bar, usize)> {
        let mut out: Vec<(Bar, usize)> = Vec::new();
        for b in &self.bars {
            match out.last_mut() {
                Some((last, m)) if last == b => *m += 1,
                _ => out.push((b.clone(), 1)),
            }
        }
        out
    }
}

/// A partial injection from bar indices of one barcode into another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub epsilon: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingReport {
    pub valid: bool,
    pub violations: Vec<String>,
}

fn is_short(bar: &Bar, eps: &Scalar) -> bool {
    match bar.length() {
        Some(len) => len <= Scalar::from_int(2) * eps,
        None => false,
    }
}

/// Checks the ε-matching conditions with strict endpoint inequalities.
pub fn verify_matching(m: &Matching, b: &Barcode, c: &Barcode) -> Result<MatchingReport> {
    if b.degree != c.degree {
        return Err(Error::DegreeMismatch(b.degree, c.degree));
    }
    let eps = &m.epsilon;
    let mut violations = Vec::new();
    let mut used_b = vec![false; b.len()];
    let mut used_c = vec![false; c.len()];
    for &(i, j) in &m.pairs {
        if i >= b.len() || j >= c.len() {
            violations.push(format!("pair ({i}, {j}) out of range"));
            continue;
        }
        if used_b[i] || used_c[j] {
            violations.push(format!("pair ({i}, {j}) reuses a bar"));
        }
        used_b[i] = true;
        used_c[j] = true;
        let (x, y) = (&b.bars[i], &c.bars[j]);
        if (&x.left - &y.left).abs() >= *eps {
            violations.push(format!("left endpoints of pair ({i}, {j}) differ by at least ε"));
        }
        match (&x.right, &y.right) {
            (ExtendedScalar::Infinity, ExtendedScalar::Infinity) => {}
            (ExtendedScalar::Finite(p), ExtendedScalar::Finite(q)) => {
                if (p - q).abs() >= *eps {
                    violations.push(format!("right endpoints of pair ({i}, {j}) differ by at least ε"));
                }
            }
            _ => violations.push(format!("pair ({i}, {j}) mixes a finite and an infinite bar")),
        }
    }
    for (i, bar) in b.bars.iter().enumerate() {
        if !used_b[i] && !is_short(bar, eps) {
            violations.push(format!("bar {i} of the first barcode is long and unmatched"));
        }
    }
    for (j, bar) in c.bars.iter().enumerate() {
        if !used_c[j] && !is_short(bar, eps) {
            violations.push(format!("bar {j} of the second barcode is long and unmatched"));
        }
    }
    Ok(MatchingReport { valid: violations.is_empty(), violations })
}

/// Cost of pairing two bars: the larger endpoint displacement.
fn pair_cost(x: &Bar, y: &Bar) -> Option<Scalar> {
    let dl = (&x.left - &y.left).abs();
    match (&x.right, &y.right) {
        (ExtendedScalar::Infinity, ExtendedScalar::Infinity) => Some(dl),
        (ExtendedScalar::Finite(p), ExtendedScalar::Finite(q)) => Some(dl.max((p - q).abs())),
        _ => None,
    }
}

fn half_length(x: &Bar) -> Option<Scalar> {
    x.length().map(|l| l / Scalar::from_int(2))
}

/// Kuhn's augmenting-path matching; true when every left vertex is matched.
fn has_perfect_matching(adj: &[Vec<usize>], right_size: usize) -> bool {
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if owner[v].is_none() || augment(owner[v].unwrap(), adj, seen, owner) {
                owner[v] = Some(u);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; right_size];
    for u in 0..adj.len() {
        let mut seen = vec![false; right_size];
        if !augment(u, adj, &mut seen, &mut owner) {
            return false;
        }
    }
    true
}

/// Whether a matching of cost at most `eps` exists (non-strict comparisons).
/// Left vertices are B followed by diagonal copies of C; right vertices are C
/// followed by diagonal copies of B.
fn feasible(b: &[Bar], c: &[Bar], eps: &Scalar) -> bool {
    let (nb, nc) = (b.len(), c.len());
    let mut adj = vec![Vec::new(); nb + nc];
    for (i, x) in b.iter().enumerate() {
        for (j, y) in c.iter().enumerate() {
            if pair_cost(x, y).is_some_and(|cost| &cost <= eps) {
                adj[i].push(j);
            }
        }
        if half_length(x).is_some_and(|h| &h <= eps) {
            adj[i].push(nc + i);
        }
    }
    for (j, y) in c.iter().enumerate() {
        if half_length(y).is_some_and(|h| &h <= eps) {
            adj[nb + j].push(j);
        }
        adj[nb + j].extend(nc..nc + nb);
    }
    has_perfect_matching(&adj, nc + nb)
}

/// Exact bottleneck distance: the least candidate value admitting a matching
/// under non-strict comparisons, which is the infimum over strict ε-matchings.
pub fn bottleneck_distance(b: &Barcode, c: &Barcode) -> Result<ExtendedScalar> {
    if b.degree != c.degree {
        return Err(Error::DegreeMismatch(b.degree, c.degree));
    }
    let inf_b = b.bars.iter().filter(|x| x.is_infinite()).count();
    let inf_c = c.bars.iter().filter(|x| x.is_infinite()).count();
    if inf_b != inf_c {
        return Ok(ExtendedScalar::Infinity);
    }
    let mut cands = vec![Scalar::zero()];
    for x in &b.bars {
        for y in &c.bars {
            if let Some(cost) = pair_cost(x, y) {
                cands.push(cost);
            }
        }
    }
    cands.extend(b.bars.iter().chain(&c.bars).filter_map(half_length));
    cands.sort();
    cands.dedup();
    // Feasibility is monotone in ε, and the largest candidate always works.
    let (mut lo, mut hi) = (0usize, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(&b.bars, &c.bars, &cands[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(ExtendedScalar::Finite(cands[lo].clone()))
}

/// Longest finite bar per degree and overall (0 when there is none).
pub fn boundary_depth(barcodes: &BTreeMap<i64, Barcode>) -> (Scalar, BTreeMap<i64, Scalar>) {
    let per_degree: BTreeMap<i64, Scalar> = barcodes
        .iter()
        .map(|(&d, bc)| (d, bc.bars.iter().filter_map(Bar::length).max().unwrap_or_else(Scalar::zero)))
        .collect();
    let beta = per_degree.values().cloned().max().unwrap_or_else(Scalar::zero);
    (beta, per_degree)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: i64) -> Scalar {
        Scalar::from_int(x)
    }

    fn fin(a: i64, b: i64) -> Bar {
        Bar::finite(s(a), s(b)).unwrap()
    }

    #[test]
    fn bar_rejects_empty() {
        assert!(Bar::finite(s(1), s(1)).is_err());
        assert!(Bar::finite(s(2), s(1)).is_err());
    }

    #[test]
    fn verify_matching_examples() {
        let b = Barcode::new(0, vec![fin(0, 10)]);
        let id = Matching { pairs: vec![(0, 0)], epsilon: Scalar::new(1, 100) };
        assert!(verify_matching(&id, &b, &b).unwrap().valid);

        let c = Barcode::new(0, vec![fin(1, 10)]);
        let m = Matching { pairs: vec![(0, 0)], epsilon: s(2) };
        assert!(verify_matching(&m, &b, &c).unwrap().valid);

        let empty = Barcode::new(0, vec![]);
        let m = Matching { pairs: vec![], epsilon: s(1) };
        let rep = verify_matching(&m, &b, &empty).unwrap();
        assert!(!rep.valid);
        assert_eq!(rep.violations.len(), 1);

        let other = Barcode::new(1, vec![]);
        assert!(matches!(verify_matching(&m, &b, &other), Err(Error::DegreeMismatch(0, 1))));
    }

    #[test]
    fn strictness_of_matching() {
        let b = Barcode::new(0, vec![fin(0, 10)]);
        let c = Barcode::new(0, vec![fin(1, 10)]);
        let m = Matching { pairs: vec![(0, 0)], epsilon: s(1) };
        assert!(!verify_matching(&m, &b, &c).unwrap().valid);
    }

    #[test]
    fn bottleneck_examples() {
        let b = Barcode::new(0, vec![fin(0, 10)]);
        let c = Barcode::new(0, vec![fin(1, 10)]);
        assert_eq!(bottleneck_distance(&b, &b).unwrap(), ExtendedScalar::Finite(s(0)));
        assert_eq!(bottleneck_distance(&b, &c).unwrap(), ExtendedScalar::Finite(s(1)));
        let short = Barcode::new(0, vec![fin(0, 2)]);
        let empty = Barcode::new(0, vec![]);
        assert_eq!(bottleneck_distance(&short, &empty).unwrap(), ExtendedScalar::Finite(s(1)));
    }

    #[test]
    fn bottleneck_infinite_bars() {
        let b = Barcode::new(0, vec![Bar::infinite(s(0))]);
        let c = Barcode::new(0, vec![Bar::infinite(s(3)), fin(0, 1)]);
        assert_eq!(bottleneck_distance(&b, &c).unwrap(), ExtendedScalar::Finite(s(3)));
        let e = Barcode::new(0, vec![]);
        assert_eq!(bottleneck_distance(&b, &e).unwrap(), ExtendedScalar::Infinity);
    }

    #[test]
    fn boundary_depth_examples() {
        let mut m = BTreeMap::new();
        m.insert(0, Barcode::new(0, vec![fin(0, 3), Bar::infinite(s(1))]));
        assert_eq!(boundary_depth(&m).0, s(3));

        let mut m = BTreeMap::new();
        m.insert(0, Barcode::new(0, vec![Bar::infinite(s(1))]));
        assert_eq!(boundary_depth(&m).0, s(0));

        let mut m = BTreeMap::new();
        m.insert(1, Barcode::new(1, vec![fin(0, 2)]));
        m.insert(-1, Barcode::new(-1, vec![fin(0, 5)]));
        let (beta, per) = boundary_depth(&m);
        assert_eq!(beta, s(5));
        assert_eq!(per[&1], s(2));
    }

    #[test]
    fn multiplicities_group_equal_bars() {
        let b = Barcode::new(0, vec![fin(0, 1), fin(0, 1), fin(0, 2)]);
        assert_eq!(b.multiplicities(), vec![(fin(0, 1), 2), (fin(0, 2), 1)]);
    }
}
