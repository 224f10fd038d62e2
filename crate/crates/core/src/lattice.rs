//! The Picard lattice of a del Pezzo surface over the separable closure:
//! intersection form, canonical class, and the two charts of the
//! classification (blow-ups of the plane and the quadric-product case).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which chart of the geometric classification the lattice models.
///
/// Every del Pezzo surface is geometrically either a blow-up of the plane in
/// `9 - degree` points or, in degree 8 only, a product of two lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Blowup,
    Product,
}

/// Divisor class as an integer coefficient vector in the fixed basis.
///
/// Blow-up basis: `H, E1, ..., E_{9-d}`. Product basis: the two rulings
/// `l1, l2`. All arithmetic is componentwise and exact.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivClass(pub Vec<i64>);

impl DivClass {
    pub fn zero(rank: usize) -> Self {
        DivClass(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Canonical human-readable name, e.g. `E1`, `H-E1-E2`, `2H-E1-E2-E3-E4-E5`.
    pub fn name(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        let push_term = |coeff: i64, sym: String, out: &mut String| {
            if coeff == 0 {
                return;
            }
            if coeff > 0 && !out.is_empty() {
                out.push('+');
            }
            if coeff == -1 {
                out.push('-');
            } else if coeff != 1 {
                out.push_str(&coeff.to_string());
            }
            out.push_str(&sym);
        };
        push_term(self.0[0], "H".to_string(), &mut out);
        for (i, &c) in self.0.iter().enumerate().skip(1) {
            push_term(c, format!("E{}", i), &mut out);
        }
        out
    }

    /// Parse the `name()` grammar back into a class of the given rank.
    ///
    /// For product lattices the basis symbols are `L1`, `L2` instead.
    pub fn parse(text: &str, lattice: &PicLattice) -> Result<Self> {
        let bad = |m: &str| Error::InvalidInput(format!("class `{text}`: {m}"));
        let t = text.trim();
        if t == "0" {
            return Ok(DivClass::zero(lattice.rank()));
        }
        let mut coeffs = vec![0i64; lattice.rank()];
        let mut rest = t;
        while !rest.is_empty() {
            let neg = if let Some(r) = rest.strip_prefix('-') {
                rest = r;
                true
            } else {
                rest = rest.strip_prefix('+').unwrap_or(rest);
                false
            };
            let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
            rest = &rest[digits.len()..];
            let sym: String = rest
                .chars()
                .take_while(|c| c.is_ascii_alphanumeric())
                .collect();
            rest = &rest[sym.len()..];
            let mag: i64 = if digits.is_empty() {
                1
            } else {
                digits
                    .parse()
                    .map_err(|_| bad("coefficient out of range"))?
            };
            let idx = match lattice.kind() {
                Kind::Blowup => {
                    if sym == "H" {
                        0
                    } else if let Some(n) = sym.strip_prefix('E') {
                        let n: usize = n.parse().map_err(|_| bad("bad basis symbol"))?;
                        if n == 0 || n >= lattice.rank() {
                            return Err(bad(&format!("E{n} is not in this lattice")));
                        }
                        n
                    } else {
                        return Err(bad(&format!("unknown symbol `{sym}`")));
                    }
                }
                Kind::Product => match sym.as_str() {
                    "L1" => 0,
                    "L2" => 1,
                    _ => return Err(bad(&format!("unknown symbol `{sym}`"))),
                },
            };
            coeffs[idx] += if neg { -mag } else { mag };
        }
        Ok(DivClass(coeffs))
    }
}

impl fmt::Debug for DivClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for DivClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl Add for &DivClass {
    type Output = DivClass;
    fn add(self, rhs: &DivClass) -> DivClass {
        assert_eq!(self.0.len(), rhs.0.len());
        DivClass(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &DivClass {
    type Output = DivClass;
    fn sub(self, rhs: &DivClass) -> DivClass {
        assert_eq!(self.0.len(), rhs.0.len());
        DivClass(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &DivClass {
    type Output = DivClass;
    fn neg(self) -> DivClass {
        DivClass(self.0.iter().map(|a| -a).collect())
    }
}

impl Mul<i64> for &DivClass {
    type Output = DivClass;
    fn mul(self, s: i64) -> DivClass {
        DivClass(self.0.iter().map(|a| a * s).collect())
    }
}

/// The Picard lattice `Pic` of a del Pezzo surface over the separable
/// closure, with its intersectionform and canonical class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PicLattice {
    degree: i64,
    kind: Kind,
    rank: usize,
    gram: Vec<i64>,
    canonical: DivClass,
}

impl PicLattice {
    /// Build the lattice for a surface of the given degree and kind.
    ///
    /// Blow-up kind has rank `10 - degree`, form `diag(1, -1, ..., -1)` and
    /// canonical class `-3H + sum E_i`; the product kind exists only in
    /// degree 8, with the hyperbolic form and canonical class `(-2, -2)`.
    pub fn new(degree: i64, kind: Kind) -> Result<Self> {
        if !(1..=9).contains(&degree) {
            return Err(Error::DegreeOutOfRange(degree));
        }
        match kind {
            Kind::Blowup => {
                let rank = (10 - degree) as usize;
                let mut gram = vec![0i64; rank * rank];
                for i in 0..rank {
                    gram[i * rank + i] = if i == 0 { 1 } else { -1 };
                }
                let mut canonical = vec![1i64; rank];
                canonical[0] = -3;
                Ok(PicLattice {
                    degree,
                    kind,
                    rank,
                    gram,
                    canonical: DivClass(canonical),
                })
            }
            Kind::Product => {
                if degree != 8 {
                    return Err(Error::ProductDegree(degree));
                }
                Ok(PicLattice {
                    degree,
                    kind,
                    rank: 2,
                    gram: vec![0, 1, 1, 0],
                    canonical: DivClass(vec![-2, -2]),
                })
            }
        }
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gram(&self) -> &[i64] {
        &self.gram
    }

    pub fn canonical(&self) -> &DivClass {
        &self.canonical
    }

    pub fn check_rank(&self, c: &DivClass) -> Result<()> {
        if c.rank() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: c.rank(),
            });
        }
        Ok(())
    }

    /// Intersection number `a . b`.
    pub fn pair(&self, a: &DivClass, b: &DivClass) -> Result<i64> {
        self.check_rank(a)?;
        self.check_rank(b)?;
        Ok(self.pair_raw(a, b))
    }

    /// `pair` without the rank check, for internal hot paths.
    pub(crate) fn pair_raw(&self, a: &DivClass, b: &DivClass) -> i64 {
        let r = self.rank;
        let mut acc = 0i64;
        for i in 0..r {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..r {
                let g = self.gram[i * r + j];
                if g != 0 {
                    acc += a.0[i] * g * b.0[j];
                }
            }
        }
        acc
    }

    /// Self-intersection of the canonical class; equals the degree.
    pub fn canonical_self_intersection(&self) -> i64 {
        self.pair_raw(&self.canonical, &self.canonical)
    }

    /// Render a class in this lattice's basis symbols (`H`, `E1`, ... for
    /// blow-ups; `L1`, `L2` for the product lattice).
    pub fn class_name(&self, c: &DivClass) -> String {
        match self.kind {
            Kind::Blowup => c.name(),
            Kind::Product => {
                if c.is_zero() {
                    return "0".to_string();
                }
                let mut out = String::new();
                for (i, &coeff) in c.0.iter().enumerate() {
                    if coeff == 0 {
                        continue;
                    }
                    if coeff > 0 && !out.is_empty() {
                        out.push('+');
                    }
                    if coeff == -1 {
                        out.push('-');
                    } else if coeff != 1 {
                        out.push_str(&coeff.to_string());
                    }
                    out.push_str(&format!("L{}", i + 1));
                }
                out
            }
        }
    }
}
