//! `key=value` scenario files.

use std::fmt::Write as _;

use hofer_bars::{Error, ManifoldParams, Result, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub params: ManifoldParams,
    pub epsilon: Scalar,
    /// Generator count; at least the number of coefficients.
    pub m: usize,
    pub coefficients: Vec<Scalar>,
    pub seed: u64,
}

fn list<T: std::str::FromStr>(v: &str) -> std::result::Result<Vec<T>, T::Err> {
    v.split(',').map(str::trim).filter(|x| !x.is_empty()).map(str::parse).collect()
}

impl Scenario {
    /// Recognised keys: `n N gamma2pi lambda_sign R exterior epsilon m a seed`.
    /// Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Scenario> {
        let mut kv = std::collections::BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", no + 1)))?;
            if kv.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(Error::Parse(format!("line {}: duplicate key {}", no + 1, k.trim())));
            }
        }
        let mut take = |k: &str| kv.remove(k);
        let need = |k: &str, v: Option<String>| v.ok_or_else(|| Error::Parse(format!("missing key {k}")));
        let int = |k: &str, v: String| v.parse::<i64>().map_err(|_| Error::Parse(format!("{k} must be an integer")));
        let n = int("n", need("n", take("n"))?)?;
        let chern = take("N").map(|v| int("N", v)).transpose()?.unwrap_or(0);
        let gamma: Scalar = take("gamma2pi").map(|v| v.parse()).transpose()?.unwrap_or_else(Scalar::zero);
        let default_sign = if gamma.is_zero() { 0 } else { 1 };
        let sign = take("lambda_sign").map(|v| int("lambda_sign", v)).transpose()?.unwrap_or(default_sign);
        let radius: Scalar = need("R", take("R"))?.parse()?;
        let exterior = match take("exterior") {
            Some(v) => list::<i64>(&v).map_err(|_| Error::Parse("exterior must list integers".into()))?,
            None => vec![0],
        };
        let epsilon: Scalar = need("epsilon", take("epsilon"))?.parse()?;
        let coefficients: Vec<Scalar> = list(&need("a", take("a"))?)?;
        let m = match take("m") {
            Some(v) => v.parse::<usize>().map_err(|_| Error::Parse("m must be a positive integer".into()))?,
            None => coefficients.len(),
        };
        let seed = match take("seed") {
            Some(v) => v.parse::<u64>().map_err(|_| Error::Parse("seed must be a non-negative integer".into()))?,
            None => 0,
        };
        if let Some(k) = kv.keys().next() {
            return Err(Error::Parse(format!("unknown key {k}")));
        }
        if m < coefficients.len() {
            return Err(Error::ParameterError(format!("m = {m} is below the {} coefficients given", coefficients.len())));
        }
        let params = ManifoldParams::new(n, chern, gamma, sign, radius, exterior)?;
        Ok(Scenario { params, epsilon, m, coefficients, seed })
    }

    pub fn to_text(&self) -> String {
        let p = &self.params;
        let join = |v: Vec<String>| v.join(", ");
        let mut out = String::new();
        writeln!(out, "n={}", p.n).unwrap();
        writeln!(out, "N={}", p.chern).unwrap();
        writeln!(out, "gamma2pi={}", p.gamma_hat).unwrap();
        writeln!(out, "lambda_sign={}", p.lambda_sign).unwrap();
        writeln!(out, "R={}", p.radius).unwrap();
        writeln!(out, "exterior={}", join(p.exterior_morse_indices.iter().map(i64::to_string).collect())).unwrap();
        writeln!(out, "epsilon={}", self.epsilon).unwrap();
        writeln!(out, "m={}", self.m).unwrap();
        writeln!(out, "a={}", join(self.coefficients.iter().map(Scalar::to_string).collect())).unwrap();
        writeln!(out, "seed={}", self.seed).unwrap();
        out
    }

    /// Coefficients padded with zeros to length m.
    pub fn padded(&self) -> Vec<Scalar> {
        let mut a = self.coefficients.clone();
        a.resize(self.m, Scalar::zero());
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const S2: &str = "# sphere\nn=1\nN=2\ngamma2pi=2\nR=9/10\nepsilon=1/20\na=1, 1/2\n";

    #[test]
    fn round_trip() {
        let sc = Scenario::parse(S2).unwrap();
        assert_eq!(sc.m, 2);
        assert_eq!(sc.params.lambda_sign, 1);
        assert_eq!(Scenario::parse(&sc.to_text()).unwrap(), sc);
    }

    #[test]
    fn rejects_unknown_and_missing_keys() {
        assert!(matches!(Scenario::parse(&format!("{S2}colour=red\n")), Err(Error::Parse(_))));
        assert!(matches!(Scenario::parse("n=1\nR=1\na=1\n"), Err(Error::Parse(_))));
        assert!(matches!(Scenario::parse(&S2.replace("gamma2pi=2", "gamma2pi=1")), Err(Error::InvalidParams(_))));
    }
}
