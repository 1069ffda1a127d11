//! Partitions, conjugation, and the level function that drives both the
//! dimension counts and the local vanishing conditions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition: weakly decreasing positive parts. The empty partition is allowed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidPartition("zero part".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!(
                "parts not weakly decreasing: {parts:?}"
            )));
        }
        Ok(Partition(parts))
    }

    pub fn from_unsorted(mut parts: Vec<usize>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidPartition("zero part".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(vec![])
    }

    pub fn single(part: usize) -> Result<Self> {
        Partition::new(vec![part])
    }

    /// The partition (1, 1, ..., 1) of n.
    pub fn ones(n: usize) -> Self {
        Partition(vec![1; n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Sum of the parts.
    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest part, or 0 for the empty partition.
    pub fn first(&self) -> usize {
        self.0.first().copied().unwrap_or(0)
    }

    /// Multiplicity of `part` among the parts.
    pub fn multiplicity(&self, part: usize) -> usize {
        self.0.iter().filter(|&&p| p == part).count()
    }

    /// Conjugate partition: part j of the conjugate counts parts of self that are >= j.
    pub fn conjugate(&self) -> Partition {
        let m1 = self.first();
        Partition(
            (1..=m1)
                .map(|j| self.0.iter().filter(|&&p| p >= j).count())
                .collect(),
        )
    }

    /// Multiset union: merge the parts of both partitions, sorted decreasing.
    pub fn union(&self, other: &Partition) -> Partition {
        let mut parts = self.0.clone();
        parts.extend_from_slice(&other.0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    /// The level function evaluated on 1..=size: column-by-column filling of
    /// the Young diagram. Entry mu-1 (0-based) is the level of the mu-th box.
    ///
    /// With conjugate parts n_1 >= n_2 >= ..., the vector is the concatenation
    /// over t = 1..=first() of n_t copies of t. It is weakly increasing with
    /// increments at most 1, starting at 1 (when nonempty).
    pub fn level_function(&self) -> Vec<usize> {
        let conj = self.conjugate();
        let mut out = Vec::with_capacity(self.size());
        for (t, &n_t) in conj.parts().iter().enumerate() {
            out.extend(std::iter::repeat(t + 1).take(n_t));
        }
        out
    }

    /// Level of the mu-th box, 1-based; mu must lie in 1..=size.
    pub fn level(&self, mu: usize) -> usize {
        assert!(
            mu >= 1 && mu <= self.size(),
            "level index {mu} out of range 1..={}",
            self.size()
        );
        self.level_function()[mu - 1]
    }

    /// The staircase region attached to the partition inside an r x m_1 box:
    /// all pairs (u, a) with 0 <= u < r and 0 <= a < level(r - u), taking
    /// level(0) = 0. Here r = size().
    pub fn level_domain(&self) -> Vec<(usize, usize)> {
        let r = self.size();
        let gamma = self.level_function();
        let mut out = vec![];
        for u in 0..r {
            let bound = gamma[r - u - 1];
            for a in 0..bound {
                out.push((u, a));
            }
        }
        out
    }

    /// Row a of the staircase region has this many boxes: the number of
    /// mu in 1..=size with level(mu) strictly greater than a.
    /// Returned for a = 0..first(); entry 0 equals size(), and the vector is
    /// strictly decreasing down to the count of boxes at the maximal level.
    pub fn level_row_lengths(&self) -> Vec<usize> {
        let gamma = self.level_function();
        (0..self.first())
            .map(|a| gamma.iter().filter(|&&g| g > a).count())
            .collect()
    }

    /// Sum of the level function over all boxes; equals the sum of
    /// m_j (m_j + 1) / 2 over the parts.
    pub fn level_sum(&self) -> usize {
        self.0.iter().map(|&m| m * (m + 1) / 2).sum()
    }

    /// For each part m_j, the index of the last box at level m_j in the
    /// column filling: the partial sum of the first m_j conjugate parts.
    /// At these indices the local equations degenerate to a single monomial.
    /// Returned deduplicated, increasing.
    pub fn minimal_level_indices(&self) -> Vec<usize> {
        let conj = self.conjugate();
        let mut prefix = vec![0usize];
        for &n in conj.parts() {
            prefix.push(prefix.last().unwrap() + n);
        }
        let mut out: Vec<usize> = self.0.iter().map(|&m| prefix[m]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The positions in the staircase region that detect exactness of the
    /// blow-up multiplicities: (r - mu, level(mu)) for mu ranging over the
    /// minimal level indices, with r = size().
    pub fn minimal_level_positions(&self) -> Vec<(usize, usize)> {
        let r = self.size();
        self.minimal_level_indices()
            .iter()
            .map(|&mu| (r - mu, self.level(mu)))
            .collect()
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, p) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Vec<usize> {
        p.0
    }
}

/// All partitions of n, in decreasing lexicographic order; the single
/// partition () for n = 0.
pub fn partitions_of(n: usize) -> Vec<Partition> {
    let mut out = vec![];
    let mut current = vec![];
    fn recurse(remaining: usize, max_part: usize, current: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition(current.clone()));
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            current.push(part);
            recurse(remaining - part, part, current, out);
            current.pop();
        }
    }
    recurse(n, n, &mut current, &mut out);
    out
}

/// All multisets of nonempty partitions with total size `total`, each multiset
/// sorted decreasing. Used by exhaustive sweeps over eigenvalue structures.
pub fn partition_multisets(total: usize) -> Vec<Vec<Partition>> {
    let mut out = vec![];
    let mut current: Vec<Partition> = vec![];
    fn recurse(
        remaining: usize,
        bound: &Option<Partition>,
        current: &mut Vec<Partition>,
        out: &mut Vec<Vec<Partition>>,
    ) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        for size in (1..=remaining).rev() {
            for p in partitions_of(size) {
                if let Some(b) = bound {
                    if p > *b {
                        continue;
                    }
                }
                current.push(p.clone());
                recurse(remaining - size, &Some(p), current, out);
                current.pop();
            }
        }
    }
    recurse(total, &None, &mut current, &mut out);
    out
}
