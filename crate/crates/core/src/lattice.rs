//! Intersection lattice of the blown-up ruled surface over a curve, and the
//! dimension counts for the linear systems living on it.
//!
//! The surface is the projectivization of a line bundle over a genus-g curve
//! with n marked fibers, blown up once for each eigenvalue block (i, j). The
//! lattice is generated by the pullback of the zero section C_0, the fiber
//! class f, and the exceptional classes Xi_{i,j}.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::partition::Partition;
use crate::scalar::Scalar;

/// A divisor class: a C_0 + b f + sum of c_{i,j} Xi_{i,j}.
#[derive(Clone, PartialEq, Eq)]
pub struct DivisorClass {
    base: Scalar,
    fiber: Scalar,
    exc: BTreeMap<(usize, usize), Scalar>,
}

impl DivisorClass {
    pub fn zero() -> Self {
        DivisorClass {
            base: Scalar::zero(),
            fiber: Scalar::zero(),
            exc: BTreeMap::new(),
        }
    }

    /// The pullback of the zero section.
    pub fn base_section() -> Self {
        DivisorClass {
            base: Scalar::one(),
            ..DivisorClass::zero()
        }
    }

    pub fn fiber() -> Self {
        DivisorClass {
            fiber: Scalar::one(),
            ..DivisorClass::zero()
        }
    }

    /// The exceptional class of the blow-up at center (i, j).
    pub fn exceptional(i: usize, j: usize) -> Self {
        let mut exc = BTreeMap::new();
        exc.insert((i, j), Scalar::one());
        DivisorClass {
            exc,
            ..DivisorClass::zero()
        }
    }

    pub fn base_coeff(&self) -> &Scalar {
        &self.base
    }

    pub fn fiber_coeff(&self) -> &Scalar {
        &self.fiber
    }

    pub fn exc_coeff(&self, i: usize, j: usize) -> Scalar {
        self.exc.get(&(i, j)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return DivisorClass::zero();
        }
        DivisorClass {
            base: &self.base * c,
            fiber: &self.fiber * c,
            exc: self.exc.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&Scalar::from_int(c))
    }

    fn prune(mut self) -> Self {
        self.exc.retain(|_, v| !v.is_zero());
        self
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;

    fn add(self, other: &DivisorClass) -> DivisorClass {
        let mut exc = self.exc.clone();
        for (k, v) in &other.exc {
            let entry = exc.entry(*k).or_insert_with(Scalar::zero);
            *entry = &*entry + v;
        }
        DivisorClass {
            base: &self.base + &other.base,
            fiber: &self.fiber + &other.fiber,
            exc,
        }
        .prune()
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;

    fn sub(self, other: &DivisorClass) -> DivisorClass {
        self + &(-other)
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;

    fn neg(self) -> DivisorClass {
        self.scale_int(-1)
    }
}

impl fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut term = |f: &mut fmt::Formatter<'_>, c: &Scalar, name: String| -> fmt::Result {
            if c.is_zero() {
                return Ok(());
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "{name}")
            } else {
                write!(f, "({c})*{name}")
            }
        };
        term(f, &self.base, "C0".into())?;
        term(f, &self.fiber, "f".into())?;
        for ((i, j), c) in &self.exc {
            term(f, c, format!("Xi({i},{j})"))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// The blown-up ruled surface: genus of the base curve and the multiplicity
/// of each blow-up center, indexed by (marked point, eigenvalue block).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceLattice {
    genus: usize,
    weights: Vec<Vec<usize>>,
    rank: usize,
}

impl SurfaceLattice {
    pub fn new(genus: usize, weights: Vec<Vec<usize>>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidInput("no marked fibers".into()));
        }
        let rank = weights[0].iter().sum::<usize>();
        for (i, w) in weights.iter().enumerate() {
            if w.is_empty() || w.contains(&0) {
                return Err(Error::InvalidInput(format!(
                    "marked fiber {i} needs positive multiplicities"
                )));
            }
            if w.iter().sum::<usize>() != rank {
                return Err(Error::InvalidInput(format!(
                    "multiplicities at fiber {i} do not sum to the common rank {rank}"
                )));
            }
        }
        if rank == 0 {
            return Err(Error::InvalidInput("rank zero".into()));
        }
        Ok(SurfaceLattice {
            genus,
            weights,
            rank,
        })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn num_points(&self) -> usize {
        self.weights.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weights(&self) -> &[Vec<usize>] {
        &self.weights
    }

    /// Self-intersection of the zero section: 2g - 2 + n.
    pub fn base_self_intersection(&self) -> i64 {
        2 * self.genus as i64 - 2 + self.num_points() as i64
    }

    /// Intersection pairing. C_0 . C_0 = 2g - 2 + n, C_0 . f = 1, f . f = 0,
    /// the exceptional classes are orthogonal to both and to each other, and
    /// Xi . Xi = -1.
    pub fn intersect(&self, x: &DivisorClass, y: &DivisorClass) -> Scalar {
        let mut out = &(&x.base * &y.base) * &Scalar::from_int(self.base_self_intersection());
        out = &out + &(&x.base * &y.fiber);
        out = &out + &(&x.fiber * &y.base);
        for (k, v) in &x.exc {
            if let Some(w) = y.exc.get(k) {
                out = &out - &(v * w);
            }
        }
        out
    }

    /// Strict transform of the fiber over marked point i: the fiber class
    /// minus every exceptional class over it.
    pub fn fiber_transform(&self, i: usize) -> DivisorClass {
        let mut out = DivisorClass::fiber();
        for j in 0..self.weights[i].len() {
            out = &out - &DivisorClass::exceptional(i, j);
        }
        out
    }

    /// The section at infinity: C_0 - (2g - 2 + n) f, disjoint from the
    /// zero section.
    pub fn infinity_section(&self) -> DivisorClass {
        &DivisorClass::base_section()
            - &DivisorClass::fiber().scale_int(self.base_self_intersection())
    }

    /// Canonical class, assembled from the vertical part: minus the strict
    /// fiber transforms and twice the section at infinity.
    pub fn canonical_class(&self) -> DivisorClass {
        let mut out = self.infinity_section().scale_int(-2);
        for i in 0..self.num_points() {
            out = &out - &self.fiber_transform(i);
        }
        out
    }

    /// Canonical class in closed form on the generators:
    /// -2 C_0 + (2(2g - 2 + n) - n) f + sum of all exceptional classes.
    pub fn canonical_class_expanded(&self) -> DivisorClass {
        let e = self.base_self_intersection();
        let n = self.num_points() as i64;
        let mut out = &DivisorClass::base_section().scale_int(-2)
            + &DivisorClass::fiber().scale_int(2 * e - n);
        for (i, w) in self.weights.iter().enumerate() {
            for j in 0..w.len() {
                out = &out + &DivisorClass::exceptional(i, j);
            }
        }
        out
    }

    /// The class of the strict transform of a degree-r spectral curve meeting
    /// each blow-up center with multiplicity exactly m_{i,j}: the unique class
    /// orthogonal to the section at infinity and to every strict fiber
    /// transform, with Xi_{i,j}-intersection m_{i,j}.
    pub fn solve_curve_class(&self) -> Result<DivisorClass> {
        let mut basis = vec![DivisorClass::base_section(), DivisorClass::fiber()];
        for (i, w) in self.weights.iter().enumerate() {
            for j in 0..w.len() {
                basis.push(DivisorClass::exceptional(i, j));
            }
        }
        let mut conditions = vec![(self.infinity_section(), Scalar::zero())];
        for i in 0..self.num_points() {
            conditions.push((self.fiber_transform(i), Scalar::zero()));
        }
        for (i, w) in self.weights.iter().enumerate() {
            for (j, &m) in w.iter().enumerate() {
                conditions.push((
                    DivisorClass::exceptional(i, j),
                    Scalar::from_int(m as i64),
                ));
            }
        }
        let rows = conditions
            .iter()
            .map(|(t, _)| basis.iter().map(|b| self.intersect(b, t)).collect())
            .collect();
        let rhs: Vec<Scalar> = conditions.into_iter().map(|(_, v)| v).collect();
        let mat = Mat::from_rows(rows)?;
        let solution = mat.solve_general(&rhs).ok_or_else(|| {
            Error::InternalDisagreement("curve class conditions are inconsistent".into())
        })?;
        let mut out = DivisorClass::zero();
        for (b, c) in basis.iter().zip(&solution) {
            out = &out + &b.scale(c);
        }
        Ok(out)
    }

    /// Expected dimension of the linear system of spectral curves with the
    /// prescribed multiplicities: 1 + r^2 (g - 1) + (n r^2 - sum m^2) / 2.
    pub fn expected_dimension(&self) -> i64 {
        let partitions = self.point_partitions();
        expected_dimension(self.genus, &partitions).expect("weights validated")
    }

    /// Same count computed through the level sums of the point partitions.
    pub fn strongly_parabolic_dimension(&self) -> i64 {
        let partitions = self.point_partitions();
        strongly_parabolic_dimension(self.genus, &partitions).expect("weights validated")
    }

    fn point_partitions(&self) -> Vec<Partition> {
        self.weights
            .iter()
            .map(|w| Partition::from_unsorted(w.clone()).expect("validated weights"))
            .collect()
    }
}

fn common_rank(partitions: &[Partition]) -> Result<usize> {
    let Some(first) = partitions.first() else {
        return Err(Error::InvalidInput("no point partitions".into()));
    };
    let r = first.size();
    if r == 0 {
        return Err(Error::InvalidInput("rank zero".into()));
    }
    if partitions.iter().any(|p| p.size() != r) {
        return Err(Error::InvalidInput(
            "point partitions have different sizes".into(),
        ));
    }
    Ok(r)
}

/// Expected dimension of the linear system attached to genus g and the given
/// point partitions: 1 + r^2 (g - 1) + (n r^2 - sum of squared parts) / 2.
pub fn expected_dimension(genus: usize, partitions: &[Partition]) -> Result<i64> {
    let r = common_rank(partitions)? as i64;
    let n = partitions.len() as i64;
    let sum_sq: i64 = partitions
        .iter()
        .flat_map(|p| p.parts())
        .map(|&m| (m * m) as i64)
        .sum();
    let g = genus as i64;
    Ok(1 + r * r * (g - 1) + (n * r * r - sum_sq) / 2)
}

/// The same dimension computed from level sums:
/// 1 + r^2 (g - 1) + n r (r + 1) / 2 - sum of level sums.
pub fn strongly_parabolic_dimension(genus: usize, partitions: &[Partition]) -> Result<i64> {
    let r = common_rank(partitions)? as i64;
    let n = partitions.len() as i64;
    let level_total: i64 = partitions.iter().map(|p| p.level_sum() as i64).sum();
    let g = genus as i64;
    Ok(1 + r * r * (g - 1) + n * r * (r + 1) / 2 - level_total)
}
