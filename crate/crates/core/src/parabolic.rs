//! Parabolic data at marked points: eigenvalue blocks with multiplicities,
//! residue compatibility, and genericity tests on eigenvalue collections.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::poly::UniPoly;
use crate::scalar::Scalar;

/// Distinct marked points in the affine chart of the projective line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Scalar>", into = "Vec<Scalar>")]
pub struct MarkedPoints(Vec<Scalar>);

impl MarkedPoints {
    pub fn new(points: Vec<Scalar>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            for q in &points[..i] {
                if p == q {
                    return Err(Error::InvalidInput(format!("repeated marked point {p}")));
                }
            }
        }
        Ok(MarkedPoints(points))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> &Scalar {
        &self.0[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Scalar> {
        self.0.iter()
    }

    /// Product over k != i of (p_i - p_k); the denominator of the residue of
    /// dx over the node polynomial at p_i, and of the Lagrange basis at p_i.
    pub fn lagrange_denominator(&self, i: usize) -> Scalar {
        let mut out = Scalar::one();
        for (k, p) in self.0.iter().enumerate() {
            if k != i {
                out = &out * &(self.get(i) - p);
            }
        }
        out
    }

    /// The monic polynomial with simple zeros at the marked points.
    pub fn node_polynomial(&self) -> UniPoly {
        let mut out = UniPoly::one();
        for p in &self.0 {
            out = out.mul(&UniPoly::from_coeffs(vec![-p.clone(), Scalar::one()]));
        }
        out
    }
}

impl TryFrom<Vec<Scalar>> for MarkedPoints {
    type Error = Error;

    fn try_from(points: Vec<Scalar>) -> Result<Self> {
        MarkedPoints::new(points)
    }
}

impl From<MarkedPoints> for Vec<Scalar> {
    fn from(m: MarkedPoints) -> Vec<Scalar> {
        m.0
    }
}

/// One eigenvalue block at a marked point: an eigenvalue with a multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub m: usize,
    pub xi: Scalar,
}

/// A distinct eigenvalue at a point together with the multiplicities of all
/// blocks carrying it, collected as a partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenvalueGroup {
    pub xi: Scalar,
    pub multiplicities: Partition,
}

impl EigenvalueGroup {
    /// Total multiplicity of the eigenvalue.
    pub fn weight(&self) -> usize {
        self.multiplicities.size()
    }
}

/// Residue data for a rank-r system on the punctured line: at each marked
/// point, eigenvalues with multiplicities summing to the common rank.
///
/// Blocks are normalized on construction: grouped by distinct eigenvalue in
/// first-appearance order, multiplicities sorted decreasingly within a group.
#[derive(Clone, PartialEq, Eq)]
pub struct ParabolicData {
    points: MarkedPoints,
    groups: Vec<Vec<EigenvalueGroup>>,
    rank: usize,
}

#[derive(Serialize, Deserialize)]
struct ParabolicRepr {
    points: Vec<Scalar>,
    blocks: Vec<Vec<Block>>,
}

impl ParabolicData {
    pub fn new(points: MarkedPoints, blocks: Vec<Vec<Block>>) -> Result<Self> {
        if points.len() != blocks.len() {
            return Err(Error::InvalidInput(format!(
                "{} marked points but {} block lists",
                points.len(),
                blocks.len()
            )));
        }
        if points.is_empty() {
            return Err(Error::InvalidInput("no marked points".into()));
        }
        let mut groups = vec![];
        let mut rank = None;
        for (i, point_blocks) in blocks.iter().enumerate() {
            let mut point_groups: Vec<(Scalar, Vec<usize>)> = vec![];
            for b in point_blocks {
                if b.m == 0 {
                    return Err(Error::InvalidInput(format!(
                        "zero multiplicity at point index {i}"
                    )));
                }
                match point_groups.iter_mut().find(|(xi, _)| *xi == b.xi) {
                    Some((_, ms)) => ms.push(b.m),
                    None => point_groups.push((b.xi.clone(), vec![b.m])),
                }
            }
            let total: usize = point_groups.iter().flat_map(|(_, ms)| ms).sum();
            match rank {
                None => rank = Some(total),
                Some(r) if r != total => {
                    return Err(Error::InvalidInput(format!(
                        "multiplicities at point index {i} sum to {total}, expected rank {r}"
                    )))
                }
                _ => {}
            }
            groups.push(
                point_groups
                    .into_iter()
                    .map(|(xi, ms)| {
                        Ok(EigenvalueGroup {
                            xi,
                            multiplicities: Partition::from_unsorted(ms)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let rank = rank.unwrap();
        if rank == 0 {
            return Err(Error::InvalidInput("rank zero".into()));
        }
        Ok(ParabolicData {
            points,
            groups,
            rank,
        })
    }

    pub fn points(&self) -> &MarkedPoints {
        &self.points
    }

    /// Number of marked points.
    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Distinct eigenvalues at point i, first-appearance order.
    pub fn eigenvalue_groups(&self, i: usize) -> &[EigenvalueGroup] {
        &self.groups[i]
    }

    /// Normalized blocks at point i: one entry per part of each group.
    pub fn blocks(&self, i: usize) -> Vec<Block> {
        self.groups[i]
            .iter()
            .flat_map(|g| {
                g.multiplicities.parts().iter().map(|&m| Block {
                    m,
                    xi: g.xi.clone(),
                })
            })
            .collect()
    }

    /// All block multiplicities at point i, in normalized block order.
    pub fn weights(&self, i: usize) -> Vec<usize> {
        self.blocks(i).iter().map(|b| b.m).collect()
    }

    /// The partition of the rank formed by all block multiplicities at point i.
    pub fn point_partition(&self, i: usize) -> Partition {
        let mut parts: Vec<usize> = self.weights(i);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(parts).expect("validated multiplicities")
    }

    /// All point partitions, one per marked point.
    pub fn point_partitions(&self) -> Vec<Partition> {
        (0..self.num_points())
            .map(|i| self.point_partition(i))
            .collect()
    }

    /// Eigenvalues at point i repeated with multiplicity, length = rank.
    pub fn eigenvalue_vector(&self, i: usize) -> Vec<Scalar> {
        let mut out = Vec::with_capacity(self.rank);
        for b in self.blocks(i) {
            out.extend(std::iter::repeat(b.xi).take(b.m));
        }
        out
    }

    /// Multiplicity-weighted sum of eigenvalue residues at the marked points:
    /// sum over points i and blocks j of m_{i,j} xi_{i,j} / prod_{k != i}(p_i - p_k).
    ///
    /// This is the total residue of the weighted trace against the frame
    /// differential; it must vanish for the trace to extend to a global
    /// section of the twisted canonical bundle.
    pub fn residue_defect(&self) -> Scalar {
        let mut total = Scalar::zero();
        for i in 0..self.num_points() {
            let denom = self.points.lagrange_denominator(i);
            let weighted: Scalar = self
                .blocks(i)
                .iter()
                .map(|b| &Scalar::from_int(b.m as i64) * &b.xi)
                .sum();
            total = &total + &(&weighted / &denom);
        }
        total
    }

    pub fn residue_condition(&self) -> bool {
        self.residue_defect().is_zero()
    }

    /// Multiplicative genericity: for every common subset size m < num_points,
    /// no choice of m eigenvalues (with multiplicity) at each point has total
    /// product 1. Errors if any eigenvalue is zero, since the data is then not
    /// a collection of invertible residues.
    pub fn is_multiplicatively_generic(&self) -> Result<bool> {
        for i in 0..self.num_points() {
            if self.groups[i].iter().any(|g| g.xi.is_zero()) {
                return Err(Error::ZeroEigenvalue);
            }
        }
        Ok(self.is_generic(true))
    }

    /// Additive genericity: for every common subset size m < num_points, no
    /// choice of m eigenvalues (with multiplicity) at each point has total
    /// sum 0.
    pub fn is_additively_generic(&self) -> bool {
        self.is_generic(false)
    }

    fn is_generic(&self, multiplicative: bool) -> bool {
        let n = self.num_points();
        let max_size = self.rank.min(n.saturating_sub(1));
        if max_size == 0 {
            return true;
        }
        let per_point: Vec<Vec<HashSet<Scalar>>> = (0..n)
            .map(|i| subset_values(&self.eigenvalue_vector(i), max_size, multiplicative))
            .collect();
        let bad = if multiplicative {
            Scalar::one()
        } else {
            Scalar::zero()
        };
        for m in 1..=max_size {
            let mut acc: HashSet<Scalar> = HashSet::new();
            acc.insert(if multiplicative {
                Scalar::one()
            } else {
                Scalar::zero()
            });
            for sets in &per_point {
                let mut next = HashSet::new();
                for a in &acc {
                    for b in &sets[m] {
                        next.insert(if multiplicative { a * b } else { a + b });
                    }
                }
                acc = next;
            }
            if acc.contains(&bad) {
                return false;
            }
        }
        true
    }
}

/// For k = 0..=max_size, the set of values of k-element sub-multisets of
/// `values` under product (multiplicative) or sum (additive).
fn subset_values(values: &[Scalar], max_size: usize, multiplicative: bool) -> Vec<HashSet<Scalar>> {
    let identity = if multiplicative {
        Scalar::one()
    } else {
        Scalar::zero()
    };
    let mut dp: Vec<HashSet<Scalar>> = vec![HashSet::new(); max_size + 1];
    dp[0].insert(identity);
    for x in values {
        for k in (1..=max_size).rev() {
            let prev: Vec<Scalar> = dp[k - 1].iter().cloned().collect();
            for v in prev {
                dp[k].insert(if multiplicative { &v * x } else { &v + x });
            }
        }
    }
    dp
}

impl fmt::Debug for ParabolicData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ParabolicData(rank {}):", self.rank)?;
        for i in 0..self.num_points() {
            write!(f, "  p_{} = {}:", i + 1, self.points.get(i))?;
            for g in &self.groups[i] {
                write!(f, " {}^{}", g.xi, g.multiplicities)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl Serialize for ParabolicData {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ParabolicRepr {
            points: self.points.0.clone(),
            blocks: (0..self.num_points()).map(|i| self.blocks(i)).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ParabolicData {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = ParabolicRepr::deserialize(de)?;
        let points = MarkedPoints::new(repr.points).map_err(serde::de::Error::custom)?;
        ParabolicData::new(points, repr.blocks).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    fn block(m: usize, xi: i64) -> Block {
        Block { m, xi: s(xi) }
    }

    fn data(points: &[i64], blocks: Vec<Vec<Block>>) -> ParabolicData {
        let pts = MarkedPoints::new(points.iter().map(|&v| s(v)).collect()).unwrap();
        ParabolicData::new(pts, blocks).unwrap()
    }

    #[test]
    fn marked_point_validation() {
        assert!(MarkedPoints::new(vec![s(0), s(1), s(0)]).is_err());
        let pts = MarkedPoints::new(vec![s(0), s(1), s(2)]).unwrap();
        assert_eq!(pts.lagrange_denominator(0), s(2));
        assert_eq!(pts.lagrange_denominator(1), s(-1));
        assert_eq!(pts.lagrange_denominator(2), s(2));
        // (x)(x-1)(x-2) = x^3 - 3x^2 + 2x
        let node = pts.node_polynomial();
        assert_eq!(node.coeff(3), Scalar::one());
        assert_eq!(node.coeff(2), s(-3));
        assert_eq!(node.coeff(1), s(2));
        assert_eq!(node.coeff(0), s(0));
    }

    #[test]
    fn construction_validation() {
        let pts = MarkedPoints::new(vec![s(0), s(1)]).unwrap();
        // inconsistent rank
        assert!(ParabolicData::new(
            pts.clone(),
            vec![vec![block(2, 1)], vec![block(1, 1)]]
        )
        .is_err());
        // zero multiplicity
        assert!(
            ParabolicData::new(pts.clone(), vec![vec![block(0, 1)], vec![block(0, 2)]]).is_err()
        );
        // mismatched lengths
        assert!(ParabolicData::new(pts, vec![vec![block(1, 1)]]).is_err());
    }

    #[test]
    fn normalization_groups_blocks() {
        let d = data(
            &[0, 1],
            vec![
                vec![block(1, 5), block(2, 7), block(2, 5)],
                vec![block(5, 3)],
            ],
        );
        assert_eq!(d.rank(), 5);
        let groups = d.eigenvalue_groups(0);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].xi, s(5));
        assert_eq!(groups[0].multiplicities.parts(), &[2, 1]);
        assert_eq!(groups[1].xi, s(7));
        assert_eq!(groups[1].multiplicities.parts(), &[2]);
        assert_eq!(d.weights(0), vec![2, 1, 2]);
        assert_eq!(d.point_partition(0).parts(), &[2, 2, 1]);
        assert_eq!(d.point_partition(1).parts(), &[5]);
        assert_eq!(
            d.eigenvalue_vector(0),
            vec![s(5), s(5), s(5), s(7), s(7)]
        );
    }

    #[test]
    fn residue_condition_cases() {
        // Points 0, 1, 2: denominators 2, -1, 2.
        // Defect = xi_0/2 - xi_1 + xi_2/2 for rank 1.
        let ok = data(&[0, 1, 2], vec![
            vec![block(1, 1)],
            vec![block(1, 1)],
            vec![block(1, 1)],
        ]);
        assert!(ok.residue_condition());
        let bad = data(&[0, 1, 2], vec![
            vec![block(1, 1)],
            vec![block(1, 2)],
            vec![block(1, 1)],
        ]);
        assert_eq!(bad.residue_defect(), s(-1));
        assert!(!bad.residue_condition());
        // Multiplicity weighting: m = 2 doubles the contribution.
        let weighted = data(&[0, 1, 2], vec![
            vec![block(2, 1)],
            vec![block(1, 1), block(1, 1)],
            vec![block(2, 1)],
        ]);
        assert!(weighted.residue_condition());
    }

    #[test]
    fn multiplicative_genericity() {
        // Rank 1, three points: the only constraint is the full product != 1.
        let fail = data(&[0, 1, 2], vec![
            vec![block(1, 2)],
            vec![block(1, 3)],
            vec![{
                Block { m: 1, xi: Scalar::ratio(1, 6) }
            }],
        ]);
        assert!(!fail.is_multiplicatively_generic().unwrap());
        let pass = data(&[0, 1, 2], vec![
            vec![block(1, 2)],
            vec![block(1, 3)],
            vec![{
                Block { m: 1, xi: Scalar::ratio(1, 7) }
            }],
        ]);
        assert!(pass.is_multiplicatively_generic().unwrap());
        // Zero eigenvalue is rejected.
        let zero = data(&[0, 1], vec![vec![block(1, 0)], vec![block(1, 1)]]);
        assert!(matches!(
            zero.is_multiplicatively_generic(),
            Err(Error::ZeroEigenvalue)
        ));
    }

    #[test]
    fn additive_genericity() {
        // 1 + 4 - 5 = 0 with subset size 1 breaks genericity.
        let fail = data(&[0, 1, 2], vec![
            vec![block(1, 1), block(1, 2)],
            vec![block(1, 3), block(1, 4)],
            vec![block(1, -5), block(1, 9)],
        ]);
        assert!(!fail.is_additively_generic());
        let pass = data(&[0, 1, 2], vec![
            vec![block(1, 1), block(1, 2)],
            vec![block(1, 3), block(1, 4)],
            vec![block(1, 10), block(1, 20)],
        ]);
        assert!(pass.is_additively_generic());
        // A single point has no valid subset size, hence is vacuously generic.
        let single = data(&[0], vec![vec![block(1, 0)]]);
        assert!(single.is_additively_generic());
    }

    #[test]
    fn serde_round_trip() {
        let d = data(&[0, 1], vec![
            vec![block(2, 5), block(1, 5)],
            vec![block(3, 4)],
        ]);
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(
            json,
            r#"{"points":["0","1"],"blocks":[[{"m":2,"xi":"5"},{"m":1,"xi":"5"}],[{"m":3,"xi":"4"}]]}"#
        );
        let back: ParabolicData = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        // Rank mismatch is rejected on deserialization.
        let bad = r#"{"points":["0","1"],"blocks":[[{"m":2,"xi":"5"}],[{"m":3,"xi":"4"}]]}"#;
        assert!(serde_json::from_str::<ParabolicData>(bad).is_err());
    }
}
