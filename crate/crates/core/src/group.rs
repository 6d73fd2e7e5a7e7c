//! Finite abelian groups as products of cyclic factors, their elements,
//! characters, and the torus pairing.
//!
//! Elements and characters are both addressed by a mixed-radix index in
//! `[0, N)`; the first factor is the most significant digit. The dual group
//! is identified with `G` coordinate-wise, so the character with coordinates
//! `ξ` acts by `x ↦ Σ ξ_i x_i / n_i (mod 1)`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupRepr", into = "GroupRepr")]
pub struct GroupSpec {
    factors: Vec<u64>,
    strides: Vec<usize>,
    order: usize,
    /// lcm of the factors; every pairing value is a multiple of `1 / lcm`.
    lcm: u64,
    /// `lcm / n_i` per factor.
    weights: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct GroupRepr {
    factors: Vec<u64>,
}

impl TryFrom<GroupRepr> for GroupSpec {
    type Error = Error;
    fn try_from(r: GroupRepr) -> Result<Self> {
        GroupSpec::new(r.factors)
    }
}

impl From<GroupSpec> for GroupRepr {
    fn from(g: GroupSpec) -> Self {
        GroupRepr { factors: g.factors }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl GroupSpec {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("no cyclic factors".into()));
        }
        if factors.contains(&0) {
            return Err(Error::InvalidGroup("cyclic factor of order 0".into()));
        }
        let mut order: usize = 1;
        let mut lcm: u64 = 1;
        for &n in &factors {
            order = order
                .checked_mul(n as usize)
                .ok_or_else(|| Error::InvalidGroup("order overflows usize".into()))?;
            lcm = (lcm / gcd(lcm, n))
                .checked_mul(n)
                .filter(|l| *l < (1u64 << 62))
                .ok_or_else(|| Error::InvalidGroup("exponent too large".into()))?;
        }
        let mut strides = vec![1usize; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * factors[i + 1] as usize;
        }
        let weights = factors.iter().map(|&n| lcm / n).collect();
        Ok(GroupSpec { factors, strides, order, lcm, weights })
    }

    /// The cyclic group `Z_n`.
    pub fn cyclic(n: u64) -> Result<Self> {
        GroupSpec::new(vec![n])
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    /// Cardinality `N`.
    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    /// Exponent of the group; pairings live in `(1/lcm) Z / Z`.
    #[inline]
    pub fn lcm(&self) -> u64 {
        self.lcm
    }

    #[inline]
    fn is_cyclic(&self) -> bool {
        self.factors.len() == 1
    }

    pub fn element(&self, coords: &[u64]) -> Result<Element> {
        self.check_coords(coords)?;
        Ok(Element(coords.to_vec()))
    }

    pub fn character(&self, coords: &[u64]) -> Result<Character> {
        self.check_coords(coords)?;
        Ok(Character(coords.to_vec()))
    }

    /// Reduces arbitrary integer coordinates mod each factor.
    pub fn reduce(&self, coords: &[i64]) -> Result<Element> {
        if coords.len() != self.factors.len() {
            return Err(self.shape_err(coords.len()));
        }
        Ok(Element(
            coords.iter().zip(&self.factors).map(|(&c, &n)| c.rem_euclid(n as i64) as u64).collect(),
        ))
    }

    fn shape_err(&self, len: usize) -> Error {
        Error::ShapeMismatch(format!("{len} coordinates for group {self}"))
    }

    fn check_coords(&self, coords: &[u64]) -> Result<()> {
        if coords.len() != self.factors.len() {
            return Err(self.shape_err(coords.len()));
        }
        if let Some((c, n)) = coords.iter().zip(&self.factors).find(|(c, n)| c >= n) {
            return Err(Error::ShapeMismatch(format!("coordinate {c} not reduced mod {n}")));
        }
        Ok(())
    }

    pub fn index_of(&self, coords: &[u64]) -> Result<usize> {
        self.check_coords(coords)?;
        Ok(coords.iter().zip(&self.strides).map(|(&c, &s)| c as usize * s).sum())
    }

    pub fn coords_of(&self, idx: usize) -> Vec<u64> {
        debug_assert!(idx < self.order);
        self.factors.iter().zip(&self.strides).map(|(&n, &s)| ((idx / s) as u64) % n).collect()
    }

    pub fn element_at(&self, idx: usize) -> Element {
        Element(self.coords_of(idx))
    }

    pub fn character_at(&self, idx: usize) -> Character {
        Character(self.coords_of(idx))
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.order).map(|i| self.element_at(i))
    }

    /// Group law on coordinates.
    pub fn add(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check_coords(&x.0)?;
        self.check_coords(&y.0)?;
        Ok(Element(x.0.iter().zip(&y.0).zip(&self.factors).map(|((a, b), n)| (a + b) % n).collect()))
    }

    pub fn neg(&self, x: &Element) -> Result<Element> {
        self.check_coords(&x.0)?;
        Ok(Element(x.0.iter().zip(&self.factors).map(|(a, n)| (n - a) % n).collect()))
    }

    /// Group law on mixed-radix indices.
    #[inline]
    pub fn add_idx(&self, a: usize, b: usize) -> usize {
        if self.is_cyclic() {
            let s = a + b;
            return if s >= self.order { s - self.order } else { s };
        }
        let mut out = 0;
        for (&n, &s) in self.factors.iter().zip(&self.strides) {
            let n = n as usize;
            let d = (a / s) % n + (b / s) % n;
            out += if d >= n { d - n } else { d } * s;
        }
        out
    }

    #[inline]
    pub fn neg_idx(&self, a: usize) -> usize {
        if self.is_cyclic() {
            return if a == 0 { 0 } else { self.order - a };
        }
        let mut out = 0;
        for (&n, &s) in self.factors.iter().zip(&self.strides) {
            let n = n as usize;
            let d = (a / s) % n;
            out += if d == 0 { 0 } else { n - d } * s;
        }
        out
    }

    /// `a - b`.
    #[inline]
    pub fn sub_idx(&self, a: usize, b: usize) -> usize {
        if self.is_cyclic() {
            return if a >= b { a - b } else { a + self.order - b };
        }
        self.add_idx(a, self.neg_idx(b))
    }

    /// Numerator of `ξ·x` over [`GroupSpec::lcm`], in `[0, lcm)`.
    #[inline]
    pub fn pairing_num_idx(&self, xi: usize, x: usize) -> u64 {
        if self.is_cyclic() {
            let n = self.order as u64;
            return ((xi as u64 * x as u64) % n) * self.weights[0];
        }
        let mut acc = 0u64;
        for ((&n, &s), &w) in self.factors.iter().zip(&self.strides).zip(&self.weights) {
            let a = ((xi / s) as u64) % n;
            let b = ((x / s) as u64) % n;
            acc += ((a * b) % n) * w;
            if acc >= self.lcm {
                acc -= self.lcm;
            }
        }
        acc
    }

    /// Exact pairing `ξ·x ∈ R/Z`.
    pub fn pairing_exact(&self, xi: &Character, x: &Element) -> Result<TorusValue> {
        let a = self.index_of(&xi.0)?;
        let b = self.index_of(&x.0)?;
        Ok(TorusValue { num: self.pairing_num_idx(a, b), den: self.lcm })
    }

    /// `ξ·x` as a real in `[0, 1)`.
    pub fn pairing(&self, xi: &Character, x: &Element) -> Result<f64> {
        self.pairing_exact(xi, x).map(|t| t.value())
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|n| format!("Z{n}")).collect();
        f.write_str(&parts.join("x"))
    }
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupSpec({self})")
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Parses `Z6xZ4`, `Z_6 x Z_4` or `Z6×Z4`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut factors = Vec::new();
        for part in s.split(['x', 'X', '×']) {
            let p = part.trim();
            let digits = p
                .strip_prefix('Z')
                .map(|r| r.trim_start_matches('_'))
                .ok_or_else(|| Error::InvalidGroup(format!("factor {p:?} must look like Z<n>")))?;
            let n: u64 = digits
                .parse()
                .map_err(|_| Error::InvalidGroup(format!("bad cyclic order in {p:?}")))?;
            factors.push(n);
        }
        GroupSpec::new(factors)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Element(pub Vec<u64>);

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character(pub Vec<u64>);

/// An exact point `num / den` of the circle `R/Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusValue {
    pub num: u64,
    pub den: u64,
}

impl TorusValue {
    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Numerator of the distance to the nearest integer.
    pub fn norm_num(self) -> u64 {
        self.num.min(self.den - self.num)
    }

    pub fn norm(self) -> f64 {
        self.norm_num() as f64 / self.den as f64
    }
}

/// Distance from `t` to the nearest integer, in `[0, 1/2]`.
pub fn torus_norm(t: f64) -> f64 {
    let fr = t - t.floor();
    fr.min(1.0 - fr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GroupSpec {
        s.parse().unwrap()
    }

    #[test]
    fn add_examples() {
        let z6 = g("Z6");
        let r = z6.add(&Element(vec![4]), &Element(vec![5])).unwrap();
        assert_eq!(r, Element(vec![3]));
        let z64 = g("Z6xZ4");
        let r = z64.add(&Element(vec![5, 3]), &Element(vec![2, 2])).unwrap();
        assert_eq!(r, Element(vec![1, 1]));
        for x in z64.elements() {
            assert_eq!(z64.add(&x, &Element(vec![0, 0])).unwrap(), x);
        }
    }

    #[test]
    fn add_rejects_shape_mismatch() {
        let z64 = g("Z6xZ4");
        assert!(z64.add(&Element(vec![1]), &Element(vec![1, 1])).is_err());
        assert!(z64.add(&Element(vec![6, 0]), &Element(vec![1, 1])).is_err());
    }

    #[test]
    fn pairing_examples() {
        let z8 = g("Z8");
        assert_eq!(z8.pairing(&Character(vec![1]), &Element(vec![3])).unwrap(), 3.0 / 8.0);
        for x in z8.elements() {
            assert_eq!(z8.pairing(&Character(vec![0]), &x).unwrap(), 0.0);
        }
        let z64 = g("Z6xZ4");
        assert_eq!(z64.pairing(&Character(vec![1, 2]), &Element(vec![3, 1])).unwrap(), 0.0);
    }

    #[test]
    fn torus_norm_examples() {
        assert!((torus_norm(0.75) - 0.25).abs() < 1e-15);
        assert_eq!(torus_norm(0.5), 0.5);
        assert!((torus_norm(3.1) - 0.1).abs() < 1e-12);
        assert!((torus_norm(-0.2) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn index_roundtrip_and_enumeration() {
        let grp = g("Z3xZ5xZ2");
        let mut seen = std::collections::HashSet::new();
        for i in 0..grp.order() {
            let c = grp.coords_of(i);
            assert_eq!(grp.index_of(&c).unwrap(), i);
            assert!(seen.insert(c));
        }
        assert_eq!(seen.len(), 30);
    }

    #[test]
    fn index_ops_match_coordinate_ops() {
        let grp = g("Z6xZ4");
        for a in 0..grp.order() {
            for b in 0..grp.order() {
                let s = grp.add(&grp.element_at(a), &grp.element_at(b)).unwrap();
                assert_eq!(grp.add_idx(a, b), grp.index_of(&s.0).unwrap());
                assert_eq!(grp.add_idx(grp.sub_idx(a, b), b), a);
            }
            assert_eq!(grp.add_idx(a, grp.neg_idx(a)), 0);
        }
    }

    /// Homomorphism into R/Z, checked exhaustively on groups with N ≤ 10^3.
    #[test]
    fn pairing_is_bilinear() {
        for grp in [g("Z12"), g("Z6xZ4"), g("Z5xZ5"), g("Z2xZ3xZ4")] {
            let n = grp.order();
            for xi in 0..n {
                for x in 0..n {
                    for y in 0..n {
                        let lhs = grp.pairing_num_idx(xi, grp.add_idx(x, y));
                        let rhs = (grp.pairing_num_idx(xi, x) + grp.pairing_num_idx(xi, y)) % grp.lcm();
                        assert_eq!(lhs, rhs);
                    }
                    let t = TorusValue { num: grp.pairing_num_idx(xi, x), den: grp.lcm() };
                    let u = TorusValue { num: grp.pairing_num_idx(xi, grp.neg_idx(x)), den: grp.lcm() };
                    assert_eq!(t.norm_num(), u.norm_num());
                }
            }
        }
    }

    #[test]
    fn parse_and_json_forms() {
        let grp: GroupSpec = "Z_6 x Z_4".parse().unwrap();
        assert_eq!(grp.to_string(), "Z6xZ4");
        let j = serde_json::to_string(&grp).unwrap();
        assert_eq!(j, r#"{"factors":[6,4]}"#);
        let back: GroupSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(back, grp);
        assert!("Y6".parse::<GroupSpec>().is_err());
        assert!("Z0".parse::<GroupSpec>().is_err());
        assert!(serde_json::from_str::<GroupSpec>(r#"{"factors":[]}"#).is_err());
    }
}
