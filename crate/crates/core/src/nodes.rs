//! Sampling node sets `X_n` on the torus and the mesh condition.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::torus::{rational_to_f64, reduce_mod_one, Rational};
use crate::{Error, Result};

/// Sorted distinct rational points in `[0, 1)` together with the mesh
/// constant `gamma = n * min cyclic gap`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    points: Vec<Rational>,
    gamma: f64,
}

impl NodeSet {
    /// Reduces the points modulo 1, sorts them and validates distinctness.
    pub fn new(points: Vec<Rational>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidNodes("a node set needs at least one point".into()));
        }
        let mut points: Vec<Rational> = points.iter().map(reduce_mod_one).collect();
        points.sort();
        let gamma = if points.len() == 1 { 1.0 } else { mesh_gap(&points)? };
        Ok(NodeSet { points, gamma })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.points.iter().map(rational_to_f64).collect()
    }

    /// Minimal cyclic gap between consecutive points.
    pub fn min_gap(&self) -> f64 {
        self.gamma / self.len() as f64
    }

    pub fn contains(&self, q: &Rational) -> bool {
        self.points.binary_search(&reduce_mod_one(q)).is_ok()
    }

    /// Whether every point of `self` is a point of `other`.
    pub fn is_subset_of(&self, other: &NodeSet) -> bool {
        self.points.iter().all(|q| other.contains(q))
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, q) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}/{}", q.numer(), q.denom())?;
        }
        Ok(())
    }
}

impl FromStr for NodeSet {
    type Err = Error;

    /// Parses whitespace- or comma-separated `num/den` tokens (a bare integer
    /// is read as `num/1`).
    fn from_str(s: &str) -> Result<Self> {
        let mut points = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let bad = || Error::InvalidNodes(format!("malformed node token `{tok}`"));
            let (num, den) = match tok.split_once('/') {
                Some((a, b)) => (a.parse::<i64>().map_err(|_| bad())?, b.parse::<i64>().map_err(|_| bad())?),
                None => (tok.parse::<i64>().map_err(|_| bad())?, 1),
            };
            if den == 0 {
                return Err(bad());
            }
            points.push(Rational::new(num, den));
        }
        NodeSet::new(points)
    }
}

/// `n` times the minimal cyclic gap, computed exactly.
pub fn mesh_gap(points: &[Rational]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: points.len(),
        });
    }
    let mut sorted: Vec<Rational> = points.iter().map(reduce_mod_one).collect();
    sorted.sort();
    let n = sorted.len();
    let mut min_gap: Option<Rational> = None;
    for k in 0..n {
        let next = if k + 1 < n {
            sorted[k + 1]
        } else {
            sorted[0] + Rational::from_integer(1)
        };
        let gap = next - sorted[k];
        if gap == Rational::from_integer(0) {
            return Err(Error::InvalidNodes(format!(
                "duplicate point {}/{}",
                sorted[k].numer(),
                sorted[k].denom()
            )));
        }
        min_gap = Some(match min_gap {
            Some(g) if g <= gap => g,
            _ => gap,
        });
    }
    let g = min_gap.expect("at least two points") * Rational::from_integer(n as i64);
    Ok(rational_to_f64(&g))
}

/// `{k / (2n + 1) : k = 0..2n}`.
pub fn lagrange_nodes(n: usize) -> Result<NodeSet> {
    if n == 0 {
        return Err(Error::ParameterOutOfRange("lagrange_nodes needs n >= 1".into()));
    }
    let m = checked_i64(2 * n as u128 + 1)?;
    uniform_points(m)
}

/// `{k / 2^j : k = 0..2^j - 1}`.
pub fn dyadic_nodes(j: u32) -> Result<NodeSet> {
    if j == 0 {
        return Err(Error::ParameterOutOfRange("dyadic_nodes needs j >= 1".into()));
    }
    if j > 30 {
        return Err(Error::Overflow(format!("2^{j} nodes exceed the index capacity")));
    }
    uniform_points(1i64 << j)
}

/// `{k / n : k = 0..n-1}`.
pub fn uniform_nodes(n: usize) -> Result<NodeSet> {
    if n == 0 {
        return Err(Error::ParameterOutOfRange("uniform_nodes needs n >= 1".into()));
    }
    uniform_points(checked_i64(n as u128)?)
}

fn checked_i64(v: u128) -> Result<i64> {
    if v > (1u128 << 31) {
        return Err(Error::Overflow(format!("{v} nodes exceed the index capacity")));
    }
    Ok(v as i64)
}

fn uniform_points(m: i64) -> Result<NodeSet> {
    let points = (0..m).map(|k| Rational::new(k, m)).collect();
    Ok(NodeSet { points, gamma: 1.0 })
}

/// Moves every node by a pseudo-random rational offset of magnitude at most
/// `eps / n` (a fraction `eps` of the uniform spacing), then re-validates.
pub fn perturb_nodes(nodes: &NodeSet, eps: Rational, seed: u64) -> Result<NodeSet> {
    let zero = Rational::from_integer(0);
    if eps < zero || eps >= Rational::new(1, 2) {
        return Err(Error::ParameterOutOfRange(format!(
            "perturbation must satisfy 0 <= eps < 1/2, got {}/{}",
            eps.numer(),
            eps.denom()
        )));
    }
    if eps == zero {
        return Ok(nodes.clone());
    }
    const STEPS: i64 = 1024;
    let n = nodes.len() as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = nodes
        .points()
        .iter()
        .map(|q| {
            let m: i64 = rng.gen_range(-STEPS..=STEPS);
            *q + eps * Rational::new(m, STEPS * n)
        })
        .collect();
    NodeSet::new(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lagrange_nodes_small() {
        let x = lagrange_nodes(1).unwrap();
        assert_eq!(x.points(), &[Rational::new(0, 1), Rational::new(1, 3), Rational::new(2, 3)]);
        assert_eq!(x.gamma(), 1.0);
        let x = lagrange_nodes(2).unwrap();
        assert_eq!(x.len(), 5);
        assert_eq!(x.points()[4], Rational::new(4, 5));
    }

    #[test]
    fn lagrange_denominators_are_odd() {
        for n in 1..40 {
            for q in lagrange_nodes(n).unwrap().points() {
                assert_eq!((2 * n as i64 + 1) % q.denom(), 0);
                assert_eq!(q.denom() % 2, 1);
            }
        }
    }

    #[test]
    fn dyadic_small_and_nested() {
        let x = dyadic_nodes(2).unwrap();
        assert_eq!(x.to_f64(), vec![0.0, 0.25, 0.5, 0.75]);
        let x3 = dyadic_nodes(3).unwrap();
        assert!(x3.contains(&Rational::new(1, 2)));
        for l in 1..=3 {
            assert!(x3.contains(&Rational::new(1, 1 << l)));
        }
        for j in 1..=10 {
            assert!(dyadic_nodes(j).unwrap().is_subset_of(&dyadic_nodes(j + 1).unwrap()));
        }
        assert!(matches!(dyadic_nodes(40), Err(Error::Overflow(_))));
    }

    #[test]
    fn mesh_gap_examples() {
        assert_eq!(uniform_nodes(5).unwrap().gamma(), 1.0);
        let pts = [Rational::new(0, 1), Rational::new(1, 10), Rational::new(1, 2), Rational::new(3, 4)];
        assert!((mesh_gap(&pts).unwrap() - 0.4).abs() < 1e-15);
        assert!(mesh_gap(&[Rational::new(0, 1), Rational::new(0, 1)]).is_err());
        assert!(NodeSet::new(vec![Rational::new(1, 3), Rational::new(4, 3)]).is_err());
    }

    #[test]
    fn perturbation_examples() {
        let x = lagrange_nodes(8).unwrap();
        assert_eq!(perturb_nodes(&x, Rational::new(0, 1), 3).unwrap(), x);
        let y = perturb_nodes(&x, Rational::new(1, 4), 3).unwrap();
        assert!(y.gamma() >= 0.5);
        assert_eq!(perturb_nodes(&x, Rational::new(1, 4), 3).unwrap(), y);
        assert!(perturb_nodes(&x, Rational::new(1, 2), 3).is_err());
    }

    #[test]
    fn text_round_trip() {
        let x = lagrange_nodes(3).unwrap();
        let s = x.to_string();
        assert!(s.starts_with("0/1 1/7 2/7"));
        let back: NodeSet = s.parse().unwrap();
        assert_eq!(back, x);
        assert!("1/0".parse::<NodeSet>().is_err());
        assert!("a/b".parse::<NodeSet>().is_err());
    }
}
