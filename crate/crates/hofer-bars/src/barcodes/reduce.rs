use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;

use super::{Bar, Barcode};
use crate::error::{Error, Result};
use crate::scalar::{ExtendedScalar, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub degree: i64,
    pub action: Scalar,
    pub label: String,
}

/// Generators with a sparse boundary: `boundary[j]` lists `(i, c)` meaning
/// `∂x_j = Σ c·x_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredComplex {
    pub generators: Vec<Generator>,
    pub boundary: Vec<Vec<(usize, Scalar)>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Field {
    #[default]
    Rational,
    Z2,
}

type Column = BTreeMap<usize, Scalar>;

fn to_field(c: &Scalar, field: Field) -> Result<Scalar> {
    match field {
        Field::Rational => Ok(c.clone()),
        Field::Z2 => {
            if c.denom().is_even() {
                return Err(Error::DomainError(format!("coefficient {c} has no image in Z/2")));
            }
            let odd = c.numer().is_odd();
            Ok(if odd { Scalar::one() } else { Scalar::zero() })
        }
    }
}

fn normalize(x: Scalar, field: Field) -> Scalar {
    match field {
        Field::Rational => x,
        Field::Z2 => {
            let v: BigInt = x.numer().mod_floor(&BigInt::from(2));
            Scalar::from_bigint(v)
        }
    }
}

/// `col += a·other`, dropping zeros.
fn axpy(col: &mut Column, a: &Scalar, other: &Column, field: Field) {
    for (i, c) in other {
        let v = normalize(col.get(i).cloned().unwrap_or_else(Scalar::zero) + a * c, field);
        if v.is_zero() {
            col.remove(i);
        } else {
            col.insert(*i, v);
        }
    }
}

impl FilteredComplex {
    pub fn new(generators: Vec<Generator>, boundary: Vec<Vec<(usize, Scalar)>>) -> FilteredComplex {
        FilteredComplex { generators, boundary }
    }

    fn columns(&self, field: Field) -> Result<Vec<Column>> {
        let mut cols = Vec::with_capacity(self.generators.len());
        for col in &self.boundary {
            let mut c = Column::new();
            for (i, v) in col {
                if *i >= self.generators.len() {
                    return Err(Error::DomainError(format!("boundary refers to generator {i}")));
                }
                let v = to_field(v, field)?;
                let sum = normalize(c.get(i).cloned().unwrap_or_else(Scalar::zero) + v, field);
                if sum.is_zero() {
                    c.remove(i);
                } else {
                    c.insert(*i, sum);
                }
            }
            cols.push(c);
        }
        Ok(cols)
    }

    /// Degree and strict-filtration checks, then `∂∘∂ = 0` over `field`.
    pub fn validate(&self, field: Field) -> Result<()> {
        if self.boundary.len() != self.generators.len() {
            return Err(Error::DomainError("one boundary column per generator required".into()));
        }
        let cols = self.columns(field)?;
        for (j, col) in cols.iter().enumerate() {
            let gj = &self.generators[j];
            for i in col.keys() {
                let gi = &self.generators[*i];
                if gi.degree != gj.degree - 1 {
                    return Err(Error::FiltrationViolation(format!(
                        "∂{} hits {} of degree {}",
                        gj.label, gi.label, gi.degree
                    )));
                }
                if gi.action >= gj.action {
                    return Err(Error::FiltrationViolation(format!(
                        "action of {} is not below action of {}",
                        gi.label, gj.label
                    )));
                }
            }
        }
        for (j, col) in cols.iter().enumerate() {
            let mut dd = Column::new();
            for (i, c) in col {
                axpy(&mut dd, c, &cols[*i], field);
            }
            if !dd.is_empty() {
                return Err(Error::NotAComplex(format!("∂∂{} ≠ 0", self.generators[j].label)));
            }
        }
        Ok(())
    }
}

/// Standard column reduction in filtration order (action, degree, index).
/// Zero-length pairs are dropped.
pub fn reduce_filtered_complex(k: &FilteredComplex, field: Field) -> Result<BTreeMap<i64, Barcode>> {
    k.validate(field)?;
    let gens = &k.generators;
    let mut order: Vec<usize> = (0..gens.len()).collect();
    order.sort_by(|&a, &b| (&gens[a].action, gens[a].degree, a).cmp(&(&gens[b].action, gens[b].degree, b)));
    let mut pos = vec![0; gens.len()];
    for (p, &g) in order.iter().enumerate() {
        pos[g] = p;
    }
    // Columns re-indexed by filtration position.
    let raw = k.columns(field)?;
    let mut cols: Vec<Column> =
        order.iter().map(|&g| raw[g].iter().map(|(i, c)| (pos[*i], c.clone())).collect()).collect();
    let mut pivot_of_low: HashMap<usize, usize> = HashMap::new();
    let mut is_low = vec![false; gens.len()];
    let mut pairs = Vec::new();
    for j in 0..cols.len() {
        while let Some((&low, cj)) = cols[j].iter().next_back() {
            let Some(&i) = pivot_of_low.get(&low) else { break };
            let factor = -(cj / &cols[i][&low]);
            let other = cols[i].clone();
            axpy(&mut cols[j], &factor, &other, field);
        }
        if let Some((&low, _)) = cols[j].iter().next_back() {
            pivot_of_low.insert(low, j);
            is_low[low] = true;
            pairs.push((low, j));
        }
    }
    let mut bars: BTreeMap<i64, Vec<Bar>> = BTreeMap::new();
    for g in gens {
        bars.entry(g.degree).or_default();
    }
    for (low, j) in pairs {
        let (a, b) = (&gens[order[low]], &gens[order[j]]);
        if a.action < b.action {
            bars.entry(a.degree).or_default().push(Bar {
                left: a.action.clone(),
                right: ExtendedScalar::Finite(b.action.clone()),
            });
        }
    }
    for p in 0..cols.len() {
        if cols[p].is_empty() && !is_low[p] {
            let g = &gens[order[p]];
            bars.entry(g.degree).or_default().push(Bar::infinite(g.action.clone()));
        }
    }
    Ok(bars.into_iter().map(|(d, b)| (d, Barcode::new(d, b))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(degree: i64, action: i64, label: &str) -> Generator {
        Generator { degree, action: Scalar::from_int(action), label: label.into() }
    }

    fn one() -> Scalar {
        Scalar::one()
    }

    #[test]
    fn single_pair() {
        let k = FilteredComplex::new(vec![g(0, 0, "x"), g(1, 3, "y")], vec![vec![], vec![(0, one())]]);
        let b = reduce_filtered_complex(&k, Field::Rational).unwrap();
        assert_eq!(b[&0].bars(), &[Bar::finite(Scalar::zero(), Scalar::from_int(3)).unwrap()]);
        assert!(b[&1].is_empty());
    }

    #[test]
    fn zero_differential() {
        let k = FilteredComplex::new(vec![g(0, 0, "a"), g(0, 1, "b")], vec![vec![], vec![]]);
        let b = reduce_filtered_complex(&k, Field::Rational).unwrap();
        assert_eq!(b[&0].bars(), &[Bar::infinite(Scalar::zero()), Bar::infinite(Scalar::one())]);
    }

    #[test]
    fn staircase() {
        let k = FilteredComplex::new(
            vec![g(0, 0, "x0"), g(0, 1, "x1"), g(1, 2, "y")],
            vec![vec![], vec![], vec![(0, one()), (1, one())]],
        );
        let b = reduce_filtered_complex(&k, Field::Rational).unwrap();
        assert_eq!(
            b[&0].bars(),
            &[Bar::infinite(Scalar::zero()), Bar::finite(Scalar::one(), Scalar::from_int(2)).unwrap()]
        );
        let b2 = reduce_filtered_complex(&k, Field::Z2).unwrap();
        assert_eq!(b, b2);
    }

    #[test]
    fn field_sensitivity() {
        // ∂y = 2x: a bar over ℚ, two infinite classes over Z/2.
        let k = FilteredComplex::new(
            vec![g(0, 0, "x"), g(1, 1, "y")],
            vec![vec![], vec![(0, Scalar::from_int(2))]],
        );
        assert_eq!(reduce_filtered_complex(&k, Field::Rational).unwrap()[&0].len(), 1);
        let z2 = reduce_filtered_complex(&k, Field::Z2).unwrap();
        assert_eq!(z2[&0].bars(), &[Bar::infinite(Scalar::zero())]);
        assert_eq!(z2[&1].bars(), &[Bar::infinite(Scalar::one())]);
    }

    #[test]
    fn rejects_bad_complexes() {
        let k = FilteredComplex::new(vec![g(0, 3, "x"), g(1, 3, "y")], vec![vec![], vec![(0, one())]]);
        assert!(matches!(reduce_filtered_complex(&k, Field::Rational), Err(Error::FiltrationViolation(_))));
        let k = FilteredComplex::new(
            vec![g(0, 0, "x"), g(1, 1, "y"), g(2, 2, "z")],
            vec![vec![], vec![(0, one())], vec![(1, one())]],
        );
        assert!(matches!(reduce_filtered_complex(&k, Field::Rational), Err(Error::NotAComplex(_))));
    }
}
