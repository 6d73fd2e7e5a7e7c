//! Subsets of `G` and of the plane `G×G` (or the integer grid), with the
//! base64 JSON file format shared by the library and the CLI.
//!
//! Planar points `(x, y)` are stored row-major at `x·N + y`, where `N` is the
//! side length and `x, y` are element indices of `G` (group mode) or
//! `0..N` (grid mode, no wraparound).

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::group::GroupSpec;

/// Ambient side of a set: a finite abelian group or `{0..n-1}` without wraparound.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    Group(GroupSpec),
    Grid(usize),
}

impl Shape {
    #[inline]
    pub fn side(&self) -> usize {
        match self {
            Shape::Group(g) => g.order(),
            Shape::Grid(n) => *n,
        }
    }

    pub fn group(&self) -> Option<&GroupSpec> {
        match self {
            Shape::Group(g) => Some(g),
            Shape::Grid(_) => None,
        }
    }

    pub fn require_group(&self) -> Result<&GroupSpec> {
        self.group()
            .ok_or_else(|| Error::InvalidParameter("operation needs group mode, got a grid".into()))
    }

    fn mode_str(&self) -> &'static str {
        match self {
            Shape::Group(_) => "group",
            Shape::Grid(_) => "grid",
        }
    }

    fn shape_vec(&self) -> Vec<u64> {
        match self {
            Shape::Group(g) => g.factors().to_vec(),
            Shape::Grid(n) => vec![*n as u64],
        }
    }

    fn from_parts(mode: &str, shape: &[u64]) -> Result<Shape> {
        match mode {
            "group" => Ok(Shape::Group(GroupSpec::new(shape.to_vec())?)),
            "grid" => match shape {
                [n] if *n >= 1 => Ok(Shape::Grid(*n as usize)),
                _ => Err(Error::Decode(format!("grid shape must be [n], got {shape:?}"))),
            },
            other => Err(Error::Decode(format!("unknown mode {other:?}"))),
        }
    }
}

impl From<GroupSpec> for Shape {
    fn from(g: GroupSpec) -> Self {
        Shape::Group(g)
    }
}

#[derive(Serialize, Deserialize)]
struct SetFile {
    mode: String,
    shape: Vec<u64>,
    bits: String,
}

fn encode(shape: &Shape, bits: &BitSet) -> SetFile {
    SetFile { mode: shape.mode_str().into(), shape: shape.shape_vec(), bits: B64.encode(bits.to_bytes()) }
}

fn decode(file: &SetFile, len_of: impl Fn(usize) -> usize) -> Result<(Shape, BitSet)> {
    let shape = Shape::from_parts(&file.mode, &file.shape)?;
    let bytes = B64.decode(file.bits.trim()).map_err(|e| Error::Decode(e.to_string()))?;
    let bits = BitSet::from_bytes(len_of(shape.side()), &bytes)?;
    Ok((shape, bits))
}

/// A subset of one side (of `G`, or of the grid's coordinate range).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subset {
    shape: Shape,
    bits: BitSet,
}

impl Subset {
    pub fn empty(shape: Shape) -> Self {
        let n = shape.side();
        Subset { shape, bits: BitSet::new(n) }
    }

    pub fn full(shape: Shape) -> Self {
        let n = shape.side();
        Subset { shape, bits: BitSet::full(n) }
    }

    pub fn from_bits(shape: Shape, bits: BitSet) -> Result<Self> {
        if bits.len() != shape.side() {
            return Err(Error::ShapeMismatch(format!("{} bits for side {}", bits.len(), shape.side())));
        }
        Ok(Subset { shape, bits })
    }

    pub fn from_indices(shape: Shape, idx: impl IntoIterator<Item = usize>) -> Result<Self> {
        let bits = BitSet::from_indices(shape.side(), idx)?;
        Ok(Subset { shape, bits })
    }

    pub fn from_fn(shape: Shape, f: impl FnMut(usize) -> bool) -> Self {
        let bits = BitSet::from_fn(shape.side(), f);
        Subset { shape, bits }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.bits.contains(i)
    }

    pub fn insert(&mut self, i: usize) -> bool {
        self.bits.insert(i)
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.bits.count()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter()
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        self.shape == other.shape && self.bits.is_subset(&other.bits)
    }

    pub fn intersection(&self, other: &Subset) -> Result<Subset> {
        self.same_shape(other)?;
        Ok(Subset { shape: self.shape.clone(), bits: self.bits.intersection(&other.bits) })
    }

    pub fn same_shape(&self, other: &Subset) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", self.shape, other.shape)));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&encode(&self.shape, &self.bits)).expect("set file serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: SetFile = serde_json::from_str(s).map_err(|e| Error::Decode(e.to_string()))?;
        let (shape, bits) = decode(&file, |n| n)?;
        Ok(Subset { shape, bits })
    }
}

/// A subset of `G×G` or of the `n×n` grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subset2D {
    shape: Shape,
    bits: BitSet,
}

impl Subset2D {
    pub fn empty(shape: Shape) -> Self {
        let n = shape.side();
        Subset2D { shape, bits: BitSet::new(n * n) }
    }

    pub fn full(shape: Shape) -> Self {
        let n = shape.side();
        Subset2D { shape, bits: BitSet::full(n * n) }
    }

    pub fn from_bits(shape: Shape, bits: BitSet) -> Result<Self> {
        let n = shape.side();
        if bits.len() != n * n {
            return Err(Error::ShapeMismatch(format!("{} bits for side {n}", bits.len())));
        }
        Ok(Subset2D { shape, bits })
    }

    pub fn from_fn(shape: Shape, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let n = shape.side();
        let bits = BitSet::from_fn(n * n, |i| f(i / n, i % n));
        Subset2D { shape, bits }
    }

    pub fn from_points(shape: Shape, pts: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let n = shape.side();
        let mut s = Subset2D::empty(shape);
        for (x, y) in pts {
            if x >= n || y >= n {
                return Err(Error::ShapeMismatch(format!("point ({x},{y}) outside side {n}")));
            }
            s.bits.insert(x * n + y);
        }
        Ok(s)
    }

    /// `E₁×E₂`.
    pub fn product(e1: &Subset, e2: &Subset) -> Result<Self> {
        e1.same_shape(e2)?;
        Ok(Subset2D::from_fn(e1.shape.clone(), |x, y| e1.contains(x) && e2.contains(y)))
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.shape.side()
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        let n = self.side();
        self.bits.contains(x * n + y)
    }

    pub fn insert(&mut self, x: usize, y: usize) -> bool {
        let n = self.side();
        self.bits.insert(x * n + y)
    }

    pub fn remove(&mut self, x: usize, y: usize) -> bool {
        let n = self.side();
        self.bits.remove(x * n + y)
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.bits.count()
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.side();
        self.bits.iter().map(move |i| (i / n, i % n))
    }

    pub fn is_subset(&self, other: &Subset2D) -> bool {
        self.shape == other.shape && self.bits.is_subset(&other.bits)
    }

    fn check_side(&self, e: &Subset) -> Result<()> {
        if e.shape != self.shape {
            return Err(Error::ShapeMismatch(format!("factor set {:?} vs plane {:?}", e.shape, self.shape)));
        }
        Ok(())
    }

    /// `|A ∩ (F₁×F₂)|`.
    pub fn count_in(&self, f1: &Subset, f2: &Subset) -> Result<usize> {
        self.check_side(f1)?;
        self.check_side(f2)?;
        Ok(self.points().filter(|&(x, y)| f1.contains(x) && f2.contains(y)).count())
    }

    /// Density of `A` inside `F₁×F₂`; an empty product yields an error.
    pub fn density_in(&self, f1: &Subset, f2: &Subset) -> Result<f64> {
        let size = f1.count() * f2.count();
        if size == 0 {
            return Err(Error::InvalidParameter("empty product set".into()));
        }
        Ok(self.count_in(f1, f2)? as f64 / size as f64)
    }

    pub fn within_product(&self, e1: &Subset, e2: &Subset) -> Result<()> {
        let inside = self.count_in(e1, e2)?;
        if inside != self.count() {
            return Err(Error::Containment(format!("{} points of A lie outside E1xE2", self.count() - inside)));
        }
        Ok(())
    }

    /// `A ∩ (F₁×F₂)`.
    pub fn restrict(&self, f1: &Subset, f2: &Subset) -> Result<Subset2D> {
        self.check_side(f1)?;
        self.check_side(f2)?;
        let n = self.side();
        let bits = BitSet::from_fn(n * n, |i| self.bits.contains(i) && f1.contains(i / n) && f2.contains(i % n));
        Ok(Subset2D { shape: self.shape.clone(), bits })
    }

    /// `{(y, x) : (x, y) ∈ A}`.
    pub fn transpose(&self) -> Subset2D {
        Subset2D::from_fn(self.shape.clone(), |x, y| self.contains(y, x))
    }

    /// Translate by `-t`: `{(x, y) : (x + t₁, y + t₂) ∈ A}`. Group mode only.
    pub fn translate_back(&self, t: (usize, usize)) -> Result<Subset2D> {
        let g = self.shape.require_group()?;
        Ok(Subset2D::from_fn(self.shape.clone(), |x, y| self.contains(g.add_idx(x, t.0), g.add_idx(y, t.1))))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&encode(&self.shape, &self.bits)).expect("set file serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: SetFile = serde_json::from_str(s).map_err(|e| Error::Decode(e.to_string()))?;
        let (shape, bits) = decode(&file, |n| n * n)?;
        Ok(Subset2D { shape, bits })
    }
}

macro_rules! serde_via_set_file {
    ($t:ty, $len:expr) => {
        impl Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                encode(&self.shape, &self.bits).serialize(s)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let file = SetFile::deserialize(d)?;
                let (shape, bits) = decode(&file, $len).map_err(serde::de::Error::custom)?;
                Ok(Self { shape, bits })
            }
        }
    };
}

serde_via_set_file!(Subset, |n| n);
serde_via_set_file!(Subset2D, |n| n * n);

#[derive(Serialize, Deserialize)]
struct ShapeFile {
    mode: String,
    shape: Vec<u64>,
}

impl Serialize for Shape {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ShapeFile { mode: self.mode_str().into(), shape: self.shape_vec() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Shape {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = ShapeFile::deserialize(d)?;
        Shape::from_parts(&f.mode, &f.shape).map_err(serde::de::Error::custom)
    }
}
