//! The genus-0 evaluation linear system: generalized Vandermonde blocks, the
//! pivot/free decomposition, Hermite lifting over the marked points, the
//! column-by-column section constructor, and the solution-space dimension.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::parabolic::{MarkedPoints, ParabolicData};
use crate::partition::Partition;
use crate::poly::{BiPoly, UniPoly};
use crate::scalar::{binom_big, factorial_big, falling_big, Scalar};

/// The c x r matrix whose row k is the k-th divided derivative in y of
/// (xi^{r-1}, xi^{r-2}, ..., xi, 1): entry (k, mu-1) = binom(r-mu, k) xi^{r-mu-k}.
pub fn vandermonde_block(xi: &Scalar, c: usize, r: usize) -> Result<Mat> {
    if c == 0 || c > r {
        return Err(Error::InvalidInput(format!(
            "block height {c} out of range 1..={r}"
        )));
    }
    let mut out = Mat::zeros(c, r);
    for k in 0..c {
        for mu in 1..=r {
            let exp = r - mu;
            if exp < k {
                continue;
            }
            let coeff = Scalar::from_bigint(binom_big(exp, k));
            out.set(k, mu - 1, &coeff * &xi.pow(exp - k));
        }
    }
    Ok(out)
}

/// The height-c right-hand column carrying the monic term: entry k is
/// -binom(r, k) xi^{r-k}, the negated k-th divided derivative of y^r at xi.
pub fn rhs_block(xi: &Scalar, c: usize, r: usize) -> Result<Vec<Scalar>> {
    if c == 0 || c > r {
        return Err(Error::InvalidInput(format!(
            "block height {c} out of range 1..={r}"
        )));
    }
    Ok((0..c)
        .map(|k| -&(&Scalar::from_bigint(binom_big(r, k)) * &xi.pow(r - k)))
        .collect())
}

/// Vertically stacked Vandermonde blocks for a list of (node, height) pairs.
/// The result has sum-of-heights rows and r columns; its maximal right-aligned
/// square submatrix is invertible exactly when the nodes are distinct.
pub fn stacked_vandermonde(pairs: &[(Scalar, usize)], r: usize) -> Result<Mat> {
    let blocks: Vec<Mat> = pairs
        .iter()
        .map(|(xi, c)| vandermonde_block(xi, *c, r))
        .collect::<Result<_>>()?;
    let refs: Vec<&Mat> = blocks.iter().collect();
    Mat::vstack(&refs)
}

/// One stacked segment of a constraint block: the eigenvalue it localizes at
/// and the number of rows it contributes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockSegment {
    pub xi: Scalar,
    pub height: usize,
}

/// The block of constraint rows with x-derivative order a at marked point i:
/// per distinct eigenvalue, the divided y-derivatives of the curve equation
/// that must vanish. Unknowns are the raw a-th derivatives of the sections at
/// the point, columns ordered by section index mu = 1..r.
#[derive(Clone, Debug, Serialize)]
pub struct ConstraintBlock {
    pub a: usize,
    pub point: usize,
    pub segments: Vec<BlockSegment>,
    pub matrix: Mat,
    pub rhs: Vec<Scalar>,
}

impl ConstraintBlock {
    /// Number of rows, written c(a, i).
    pub fn height(&self) -> usize {
        self.matrix.nrows()
    }

    /// The same rows with the divided-derivative normalization undone: row u
    /// of each eigenvalue segment is scaled by u!.
    pub fn raw_rows(&self) -> (Mat, Vec<Scalar>) {
        let mut matrix = self.matrix.clone();
        let mut rhs = self.rhs.clone();
        let mut row = 0;
        for seg in &self.segments {
            for u in 0..seg.height {
                let f = Scalar::from_bigint(factorial_big(u));
                for j in 0..matrix.ncols() {
                    let v = matrix.at(row, j) * &f;
                    matrix.set(row, j, v);
                }
                rhs[row] = &rhs[row] * &f;
                row += 1;
            }
        }
        (matrix, rhs)
    }
}

/// All constraint blocks for a parabolic datum on the line, indexed by
/// (x-derivative order a, marked point i).
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    points: MarkedPoints,
    rank: usize,
    partitions: Vec<Partition>,
    blocks: Vec<Vec<ConstraintBlock>>,
}

/// Assemble the vanishing conditions of the curve equation over the level
/// domains of the per-eigenvalue subpartitions. Block (a, i) stacks, per
/// distinct eigenvalue at point i, the Vandermonde rows of height equal to
/// row a of that eigenvalue's level domain; only the a = 0 blocks carry the
/// inhomogeneous term of the monic leading coefficient.
pub fn build_constraints(data: &ParabolicData) -> ConstraintSystem {
    let r = data.rank();
    let n = data.num_points();
    let mut blocks = vec![];
    for i in 0..n {
        let max_order = data.point_partition(i).first();
        let mut point_blocks = vec![];
        for a in 0..max_order {
            let mut segments = vec![];
            let mut mats = vec![];
            let mut rhs = vec![];
            for group in data.eigenvalue_groups(i) {
                let rows = group.multiplicities.level_row_lengths();
                let height = rows.get(a).copied().unwrap_or(0);
                if height == 0 {
                    continue;
                }
                segments.push(BlockSegment {
                    xi: group.xi.clone(),
                    height,
                });
                mats.push(vandermonde_block(&group.xi, height, r).expect("height <= r"));
                if a == 0 {
                    rhs.extend(rhs_block(&group.xi, height, r).expect("height <= r"));
                }
            }
            let refs: Vec<&Mat> = mats.iter().collect();
            let matrix = Mat::vstack(&refs).expect("uniform width");
            if a > 0 {
                rhs = vec![Scalar::zero(); matrix.nrows()];
            }
            point_blocks.push(ConstraintBlock {
                a,
                point: i,
                segments,
                matrix,
                rhs,
            });
        }
        blocks.push(point_blocks);
    }
    ConstraintSystem {
        points: data.points().clone(),
        rank: r,
        partitions: data.point_partitions(),
        blocks,
    }
}

impl ConstraintSystem {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_points(&self) -> usize {
        self.blocks.len()
    }

    pub fn points(&self) -> &MarkedPoints {
        &self.points
    }

    pub fn point_partition(&self, i: usize) -> &Partition {
        &self.partitions[i]
    }

    /// Number of x-derivative orders at point i (the largest multiplicity).
    pub fn max_order(&self, i: usize) -> usize {
        self.blocks[i].len()
    }

    pub fn block(&self, a: usize, i: usize) -> Option<&ConstraintBlock> {
        self.blocks[i].get(a)
    }

    /// Heights c(a, i) for a = 0..max_order(i).
    pub fn column_counts(&self, i: usize) -> Vec<usize> {
        self.blocks[i].iter().map(ConstraintBlock::height).collect()
    }

    pub fn total_rows(&self) -> usize {
        self.blocks
            .iter()
            .flatten()
            .map(ConstraintBlock::height)
            .sum()
    }

    /// The standard pivot/free decomposition: in block (a, i) the last
    /// c(a, i) section indices are pivots.
    pub fn pivot_free(&self) -> PivotFreeDecomposition {
        let r = self.rank;
        let mut pivot = vec![];
        let mut free = vec![];
        let mut orders = vec![];
        for (i, point_blocks) in self.blocks.iter().enumerate() {
            let mut t = vec![0usize; r];
            for block in point_blocks {
                let c = block.height();
                for mu in 1..=r {
                    if mu >= r - c + 1 {
                        pivot.push((mu, block.a, i));
                        t[mu - 1] += 1;
                    } else {
                        free.push((mu, block.a, i));
                    }
                }
            }
            orders.push(t);
        }
        PivotFreeDecomposition {
            pivot,
            free,
            orders,
        }
    }

    /// Residuals of every constraint row against a section tuple, flattened
    /// in block order.
    pub fn residuals(&self, sections: &SectionTuple) -> Vec<Scalar> {
        let mut out = vec![];
        for (i, point_blocks) in self.blocks.iter().enumerate() {
            let p = self.points.get(i);
            for block in point_blocks {
                let values: Vec<Scalar> = sections
                    .polynomials()
                    .iter()
                    .map(|s| s.raw_derivative_at(p, block.a))
                    .collect();
                let lhs = block.matrix.mul_vec(&values);
                for (l, r) in lhs.iter().zip(&block.rhs) {
                    out.push(l - r);
                }
            }
        }
        out
    }

    pub fn satisfied_by(&self, sections: &SectionTuple) -> bool {
        self.residuals(sections).iter().all(Scalar::is_zero)
    }
}

/// The index set (mu, a, i) split into pivot and free positions, with the
/// per-point pivot counts t(mu, i).
#[derive(Clone, Debug)]
pub struct PivotFreeDecomposition {
    pub pivot: Vec<(usize, usize, usize)>,
    pub free: Vec<(usize, usize, usize)>,
    orders: Vec<Vec<usize>>,
}

impl PivotFreeDecomposition {
    /// t(mu, i): the number of blocks at point i in which mu is a pivot.
    pub fn order_count(&self, mu: usize, i: usize) -> usize {
        self.orders[i][mu - 1]
    }

    pub fn order_table(&self, i: usize) -> &[usize] {
        &self.orders[i]
    }
}

/// Solve block (a, i) for its pivot values given the free values (raw a-th
/// derivatives of sections 1..r-c at the point). The a = 0 block is square
/// with no free part and determines all values at the point uniquely.
pub fn solve_block(
    sys: &ConstraintSystem,
    a: usize,
    i: usize,
    free_values: &[Scalar],
) -> Result<Vec<Scalar>> {
    let block = sys
        .block(a, i)
        .ok_or_else(|| Error::InvalidInput(format!("no block at order {a}, point {i}")))?;
    let r = sys.rank();
    let c = block.height();
    if free_values.len() != r - c {
        return Err(Error::InvalidInput(format!(
            "expected {} free values, got {}",
            r - c,
            free_values.len()
        )));
    }
    let free_cols: Vec<usize> = (0..r - c).collect();
    let pivot_cols: Vec<usize> = (r - c..r).collect();
    let a_free = block.matrix.select_columns(&free_cols);
    let a_pivot = block.matrix.select_columns(&pivot_cols);
    let shifted = a_free.mul_vec(free_values);
    let target: Vec<Scalar> = block
        .rhs
        .iter()
        .zip(&shifted)
        .map(|(b, s)| b - s)
        .collect();
    a_pivot
        .solve_square(&target)
        .map_err(|_| Error::RepeatedEigenvalues { point: i })
}

/// Defect of hitting prescribed values at the marked points by a polynomial
/// of degree at most n - 2: the top Lagrange coefficient
/// sum of values_i / prod_{k != i}(p_i - p_k).
pub fn compatibility_defect(pts: &MarkedPoints, values: &[Scalar]) -> Scalar {
    let mut out = Scalar::zero();
    for (i, v) in values.iter().enumerate() {
        out = &out + &(v / &pts.lagrange_denominator(i));
    }
    out
}

/// Interpolate a polynomial of degree at most mu (n - 2) whose raw
/// derivatives of order a at point i match targets[i][a] for the listed
/// orders. For mu = 1 the degree drops below the point count by one, so the
/// values must satisfy the compatibility identity; otherwise the prescribed
/// jets must fit into the degree bound. Free coefficients are the topmost
/// ones and are set to zero, picking the minimal-degree representative.
pub fn hermite_lift(mu: usize, pts: &MarkedPoints, targets: &[Vec<Scalar>]) -> Result<UniPoly> {
    let n = pts.len();
    if targets.len() != n {
        return Err(Error::InvalidInput(format!(
            "{} target lists for {n} points",
            targets.len()
        )));
    }
    if mu == 0 {
        return Err(Error::InvalidInput("section index starts at 1".into()));
    }
    if n < 2 {
        return Err(Error::InvalidInput(
            "interpolation needs at least 2 marked points".into(),
        ));
    }
    let total: usize = targets.iter().map(Vec::len).sum();
    if mu == 1 {
        if targets.iter().any(|t| t.len() != 1) {
            return Err(Error::InvalidInput(
                "first column prescribes exactly one value per point".into(),
            ));
        }
        let values: Vec<Scalar> = targets.iter().map(|t| t[0].clone()).collect();
        let defect = compatibility_defect(pts, &values);
        if !defect.is_zero() {
            return Err(Error::ResidueCompatibility {
                defect: defect.to_string(),
            });
        }
        // Full Lagrange interpolation; the defect is the coefficient of
        // x^{n-1}, so vanishing defect lands in degree <= n - 2.
        let mut out = UniPoly::zero();
        for (i, v) in values.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let mut basis = UniPoly::one();
            for k in 0..n {
                if k != i {
                    basis = basis.mul(&UniPoly::from_coeffs(vec![
                        -pts.get(k),
                        Scalar::one(),
                    ]));
                }
            }
            let scale = v / &pts.lagrange_denominator(i);
            out = out.add(&basis.scale(&scale));
        }
        debug_assert!(out.degree().map_or(0, |d| d) <= n.saturating_sub(2));
        return Ok(out);
    }
    let degree_bound = mu * (n - 2);
    if total > degree_bound + 1 {
        return Err(Error::TargetsExceedDegree {
            mu,
            needed: total,
            available: degree_bound + 1,
        });
    }
    let width = degree_bound + 1;
    let mut rows = vec![];
    let mut rhs = vec![];
    for (i, point_targets) in targets.iter().enumerate() {
        let p = pts.get(i);
        for (a, v) in point_targets.iter().enumerate() {
            let mut row = vec![Scalar::zero(); width];
            for (k, slot) in row.iter_mut().enumerate().skip(a) {
                *slot = &Scalar::from_bigint(falling_big(k, a)) * &p.pow(k - a);
            }
            rows.push(row);
            rhs.push(v.clone());
        }
    }
    let mat = Mat::from_rows(rows)?;
    let coeffs = mat
        .solve_general(&rhs)
        .ok_or(Error::InconsistentTargets { mu })?;
    Ok(UniPoly::from_coeffs(coeffs))
}

/// How the constructor fills constraint-free directions: identically zero,
/// or with small random integers drawn from a seeded generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreeValues {
    Zero,
    Seeded(u64),
}

/// A tuple of section polynomials (s_1, ..., s_r) with deg s_mu <= mu (n-2),
/// encoding the monic spectral equation y^r + s_1 y^{r-1} + ... + s_r.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionTuple {
    sections: Vec<UniPoly>,
}

impl SectionTuple {
    pub fn new(sections: Vec<UniPoly>) -> Self {
        SectionTuple { sections }
    }

    pub fn rank(&self) -> usize {
        self.sections.len()
    }

    pub fn polynomials(&self) -> &[UniPoly] {
        &self.sections
    }

    pub fn section(&self, mu: usize) -> &UniPoly {
        &self.sections[mu - 1]
    }

    pub fn degree_bounds_hold(&self, n: usize) -> bool {
        self.sections
            .iter()
            .enumerate()
            .all(|(k, s)| s.degree().map_or(true, |d| d <= (k + 1) * (n - 2)))
    }

    /// The monic curve equation y^r + s_1 y^{r-1} + ... + s_r.
    pub fn curve(&self) -> BiPoly {
        BiPoly::from_sections(self.sections.len(), &self.sections)
            .expect("section count matches the rank")
    }
}

/// Build a section tuple satisfying every constraint block, column by column:
/// the square order-0 blocks fix all point values; the first column is lifted
/// through the compatibility identity; each later column lifts the pivot
/// values produced by the higher-order blocks, which become solvable in
/// column order because their free positions sit strictly to the left.
pub fn construct_section(data: &ParabolicData, free: FreeValues) -> Result<SectionTuple> {
    let sys = build_constraints(data);
    let n = data.num_points();
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "section construction on the line needs at least 3 marked points, got {n}"
        )));
    }
    let r = sys.rank();
    let mut rng = match free {
        FreeValues::Zero => None,
        FreeValues::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    // Order-0 values at every point: the unique solution of the square block.
    let mut point_values = vec![];
    for i in 0..n {
        point_values.push(solve_block(&sys, 0, i, &[])?);
    }
    let decomposition = sys.pivot_free();
    let mut sections: Vec<UniPoly> = vec![];
    // Solved higher-order blocks, keyed by (a, i), holding pivot values for
    // section indices r - c + 1 ..= r.
    let mut solved: Vec<Vec<Option<Vec<Scalar>>>> =
        (0..n).map(|i| vec![None; sys.max_order(i)]).collect();
    for mu in 1..=r {
        let mut targets = vec![];
        for i in 0..n {
            let t = decomposition.order_count(mu, i);
            let mut point_targets = vec![point_values[i][mu - 1].clone()];
            for a in 1..t {
                let c = sys.block(a, i).expect("a < max order").height();
                if solved[i][a].is_none() {
                    let free_vals: Vec<Scalar> = sections
                        .iter()
                        .take(r - c)
                        .map(|s| s.raw_derivative_at(sys.points().get(i), a))
                        .collect();
                    solved[i][a] = Some(solve_block(&sys, a, i, &free_vals)?);
                }
                let pivots = solved[i][a].as_ref().unwrap();
                point_targets.push(pivots[mu - (r - c + 1)].clone());
            }
            targets.push(point_targets);
        }
        let mut s = hermite_lift(mu, sys.points(), &targets)?;
        if let Some(rng) = rng.as_mut() {
            s = s.add(&random_constraint_kernel(sys.points(), &targets, mu, rng));
        }
        sections.push(s);
    }
    Ok(SectionTuple::new(sections))
}

/// A random element of the space of degree-bounded polynomials vanishing to
/// the prescribed orders at every point: a small-integer polynomial times
/// the product of (x - p_i)^{t_i}.
fn random_constraint_kernel(
    pts: &MarkedPoints,
    targets: &[Vec<Scalar>],
    mu: usize,
    rng: &mut ChaCha8Rng,
) -> UniPoly {
    let n = pts.len();
    let total: usize = targets.iter().map(Vec::len).sum();
    let bound = mu * (n - 2);
    if total + 1 > bound + 1 {
        return UniPoly::zero();
    }
    let mut vanishing = UniPoly::one();
    for (i, t) in targets.iter().enumerate() {
        let linear = UniPoly::from_coeffs(vec![-pts.get(i), Scalar::one()]);
        vanishing = vanishing.mul(&linear.pow(t.len()));
    }
    let extra = bound - total;
    let coeffs: Vec<Scalar> = (0..=extra)
        .map(|_| Scalar::from_int(rng.gen_range(-3i64..=3)))
        .collect();
    vanishing.mul(&UniPoly::from_coeffs(coeffs))
}

/// The solution space of the full constraint system inside the space of
/// degree-bounded coefficient vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolutionSpace {
    Empty,
    Dim(usize),
}

/// Dimension of the affine space of section tuples satisfying every
/// constraint row, by pulling all rows back to the coefficient space of the
/// r degree-bounded polynomials.
pub fn solution_dimension(data: &ParabolicData) -> Result<SolutionSpace> {
    let sys = build_constraints(data);
    let n = data.num_points();
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "dimension count on the line needs at least 3 marked points, got {n}"
        )));
    }
    let r = sys.rank();
    let widths: Vec<usize> = (1..=r).map(|mu| mu * (n - 2) + 1).collect();
    let offsets: Vec<usize> = widths
        .iter()
        .scan(0, |acc, w| {
            let out = *acc;
            *acc += w;
            Some(out)
        })
        .collect();
    let ncols: usize = widths.iter().sum();
    let mut rows = vec![];
    let mut rhs = vec![];
    for i in 0..n {
        let p = sys.points().get(i);
        for block in &sys.blocks[i] {
            for row_idx in 0..block.height() {
                let mut row = vec![Scalar::zero(); ncols];
                for mu in 1..=r {
                    let weight = block.matrix.at(row_idx, mu - 1);
                    if weight.is_zero() {
                        continue;
                    }
                    for k in block.a..widths[mu - 1] {
                        let basis =
                            &Scalar::from_bigint(falling_big(k, block.a)) * &p.pow(k - block.a);
                        row[offsets[mu - 1] + k] = weight * &basis;
                    }
                }
                rows.push(row);
                rhs.push(block.rhs[row_idx].clone());
            }
        }
    }
    let mat = Mat::from_rows(rows)?;
    let mut aug = Mat::zeros(mat.nrows(), ncols + 1);
    for i in 0..mat.nrows() {
        for j in 0..ncols {
            aug.set(i, j, mat.at(i, j).clone());
        }
        aug.set(i, ncols, rhs[i].clone());
    }
    let pivots = aug.rref_in_place();
    if pivots.contains(&ncols) {
        return Ok(SolutionSpace::Empty);
    }
    Ok(SolutionSpace::Dim(ncols - pivots.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parabolic::Block;
    use crate::partition::partitions_of;
    use rand::rngs::StdRng;

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
    fn vandermonde_fixtures() {
        let xi = s(3);
        let m = vandermonde_block(&xi, 3, 6).unwrap();
        assert_eq!(
            m.row(0),
            &[s(243), s(81), s(27), s(9), s(3), s(1)]
        );
        // Row 2: (10 xi^3, 6 xi^2, 3 xi, 1, 0, 0).
        assert_eq!(m.row(2), &[s(270), s(54), s(9), s(1), s(0), s(0)]);
        let single = vandermonde_block(&xi, 1, 4).unwrap();
        assert_eq!(single.row(0), &[s(27), s(9), s(3), s(1)]);
        // At 0 each row has a lone 1 marching through the last c columns.
        let zero = vandermonde_block(&Scalar::zero(), 3, 4).unwrap();
        assert_eq!(zero.row(0), &[s(0), s(0), s(0), s(1)]);
        assert_eq!(zero.row(1), &[s(0), s(0), s(1), s(0)]);
        assert_eq!(zero.row(2), &[s(0), s(1), s(0), s(0)]);
        assert!(vandermonde_block(&xi, 7, 6).is_err());
    }

    #[test]
    fn rhs_fixtures() {
        let xi = s(2);
        let k = rhs_block(&xi, 4, 6).unwrap();
        assert_eq!(k, vec![s(-64), s(-192), s(-240), s(-160)]);
        assert_eq!(rhs_block(&Scalar::zero(), 3, 5).unwrap(), vec![s(0); 3]);
        assert_eq!(rhs_block(&xi, 1, 3).unwrap(), vec![s(-8)]);
    }

    #[test]
    fn worked_example_block_shapes() {
        // One point of rank 6 with blocks (3, xi1), (2, xi2), (1, xi1).
        let d = data(&[0], vec![vec![block(3, 1), block(2, 2), block(1, 1)]]);
        let sys = build_constraints(&d);
        assert_eq!(sys.rank(), 6);
        assert_eq!(sys.max_order(0), 3);
        assert_eq!(sys.column_counts(0), vec![6, 3, 1]);
        let b0 = sys.block(0, 0).unwrap();
        assert_eq!(b0.segments.len(), 2);
        assert_eq!(b0.segments[0].height, 4);
        assert_eq!(b0.segments[1].height, 2);
        let b1 = sys.block(1, 0).unwrap();
        assert_eq!(b1.segments[0].height, 2);
        assert_eq!(b1.segments[1].height, 1);
        assert!(b1.rhs.iter().all(Scalar::is_zero));
        let b2 = sys.block(2, 0).unwrap();
        assert_eq!(b2.segments.len(), 1);
        assert_eq!(b2.height(), 1);
        assert_eq!(
            sys.total_rows(),
            Partition::new(vec![3, 1]).unwrap().level_sum()
                + Partition::new(vec![2]).unwrap().level_sum()
        );
    }

    #[test]
    fn order_zero_solution_is_elementary_symmetric() {
        // q(p_i, y) must equal prod (y - xi_j)^{m_j}.
        let d = data(
            &[0, 1, 5],
            vec![
                vec![block(2, 3), block(1, -1)],
                vec![block(3, 2)],
                vec![block(1, 1), block(1, 2), block(1, 4)],
            ],
        );
        let sys = build_constraints(&d);
        for (i, roots) in [
            vec![s(3), s(3), s(-1)],
            vec![s(2), s(2), s(2)],
            vec![s(1), s(2), s(4)],
        ]
        .iter()
        .enumerate()
        {
            let values = solve_block(&sys, 0, i, &[]).unwrap();
            let mut product = UniPoly::one();
            for root in roots {
                product = product.mul(&UniPoly::from_coeffs(vec![-root, Scalar::one()]));
            }
            // values[mu-1] = s_mu(p_i) = coefficient of y^{r-mu}.
            for mu in 1..=3 {
                assert_eq!(values[mu - 1], product.coeff(3 - mu));
            }
        }
    }

    #[test]
    fn raw_rows_scale_by_factorials() {
        let d = data(&[0], vec![vec![block(3, 2), block(2, 5), block(1, 2)]]);
        let sys = build_constraints(&d);
        let b0 = sys.block(0, 0).unwrap();
        let (raw, raw_rhs) = b0.raw_rows();
        // Segment for xi = 2 has height 4; its row 2 is scaled by 2!, row 3 by 3!.
        for j in 0..6 {
            assert_eq!(*raw.at(0, j), *b0.matrix.at(0, j));
            assert_eq!(
                *raw.at(2, j),
                &s(2) * b0.matrix.at(2, j)
            );
            assert_eq!(
                *raw.at(3, j),
                &s(6) * b0.matrix.at(3, j)
            );
            // Second segment restarts at u = 0.
            assert_eq!(*raw.at(4, j), *b0.matrix.at(4, j));
        }
        assert_eq!(raw_rhs[3], &s(6) * &b0.rhs[3]);
        assert_eq!(raw_rhs[4], b0.rhs[4]);
    }

    #[test]
    fn stacked_invertibility_tracks_distinctness() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let r = rng.gen_range(2..=6);
            let mut remaining = r;
            let mut pairs = vec![];
            let mut used = vec![];
            while remaining > 0 {
                let c = rng.gen_range(1..=remaining);
                let xi = loop {
                    let candidate = Scalar::random_small(&mut rng);
                    if !used.contains(&candidate) {
                        break candidate;
                    }
                };
                used.push(xi.clone());
                pairs.push((xi, c));
                remaining -= c;
            }
            let m = stacked_vandermonde(&pairs, r).unwrap();
            assert!(m.is_invertible(), "distinct nodes {pairs:?}");
            if pairs.len() >= 2 {
                let mut collided = pairs.clone();
                collided[1].0 = collided[0].0.clone();
                let m = stacked_vandermonde(&collided, r).unwrap();
                assert!(!m.is_invertible(), "repeated nodes {collided:?}");
            }
        }
    }

    #[test]
    fn pivot_table_fixture() {
        let d = data(
            &[0],
            vec![vec![block(3, 1), block(2, 1), block(1, 1)]],
        );
        let sys = build_constraints(&d);
        assert_eq!(sys.column_counts(0), vec![6, 3, 1]);
        let dec = sys.pivot_free();
        assert_eq!(dec.order_table(0), &[1, 1, 1, 2, 2, 3]);
        let pivots_a1: Vec<usize> = dec
            .pivot
            .iter()
            .filter(|(_, a, _)| *a == 1)
            .map(|(mu, _, _)| *mu)
            .collect();
        assert_eq!(pivots_a1, vec![4, 5, 6]);
        let pivots_a2: Vec<usize> = dec
            .pivot
            .iter()
            .filter(|(_, a, _)| *a == 2)
            .map(|(mu, _, _)| *mu)
            .collect();
        assert_eq!(pivots_a2, vec![6]);
        assert_eq!(dec.pivot.len() + dec.free.len(), 3 * 6);
    }

    #[test]
    fn pivot_counts_equal_levels() {
        for r in 1..=5usize {
            for p in partitions_of(r) {
                let blocks: Vec<Block> = p
                    .parts()
                    .iter()
                    .map(|&m| Block { m, xi: Scalar::zero() })
                    .collect();
                let d = data(&[0], vec![blocks]);
                let sys = build_constraints(&d);
                let dec = sys.pivot_free();
                for mu in 1..=r {
                    assert_eq!(dec.order_count(mu, 0), p.level(mu), "P={p} mu={mu}");
                }
            }
        }
    }

    #[test]
    fn hermite_first_column() {
        let pts = MarkedPoints::new(vec![s(0), s(1), s(2)]).unwrap();
        let lift = hermite_lift(
            1,
            &pts,
            &[vec![s(2)], vec![s(0)], vec![s(-2)]],
        )
        .unwrap();
        assert_eq!(lift, UniPoly::from_coeffs(vec![s(2), s(-2)]));
        let bad = hermite_lift(1, &pts, &[vec![s(1)], vec![s(0)], vec![s(0)]]);
        assert!(matches!(bad, Err(Error::ResidueCompatibility { .. })));
        let zero = hermite_lift(1, &pts, &[vec![s(0)], vec![s(0)], vec![s(0)]]).unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn hermite_higher_columns() {
        let pts = MarkedPoints::new(vec![s(0), s(1), s(2)]).unwrap();
        // Three values on a degree-2 space: unique interpolant.
        let flat = hermite_lift(2, &pts, &[vec![s(1)], vec![s(1)], vec![s(1)]]).unwrap();
        assert_eq!(flat, UniPoly::constant(s(1)));
        // Derivative targets: f(0)=0, f'(0)=1, f(1)=1 on degree <= 2.
        let jet = hermite_lift(
            2,
            &pts,
            &[vec![s(0), s(1)], vec![s(1)], vec![]],
        )
        .unwrap();
        assert_eq!(jet.eval(&s(0)), s(0));
        assert_eq!(jet.raw_derivative_at(&s(0), 1), s(1));
        assert_eq!(jet.eval(&s(1)), s(1));
        assert!(jet.degree().unwrap() <= 2);
        // Minimal degree: a single value is matched by a constant.
        let minimal = hermite_lift(3, &pts, &[vec![s(7)], vec![], vec![]]).unwrap();
        assert_eq!(minimal, UniPoly::constant(s(7)));
        // Too many conditions for the degree bound.
        let over = hermite_lift(
            2,
            &pts,
            &[vec![s(0), s(0)], vec![s(0), s(0)], vec![s(0), s(0)]],
        );
        assert!(matches!(over, Err(Error::TargetsExceedDegree { .. })));
    }

    fn residue_compatible_rank2(points: &[i64; 3]) -> ParabolicData {
        // Choose xi at the last point to cancel the weighted residue sum.
        let pts: Vec<Scalar> = points.iter().map(|&v| s(v)).collect();
        let marked = MarkedPoints::new(pts).unwrap();
        let d0 = marked.lagrange_denominator(0);
        let d1 = marked.lagrange_denominator(1);
        let d2 = marked.lagrange_denominator(2);
        // Sum over points of (xi_a + xi_b)/denom = 0:
        // point 0 carries (1, 2), point 1 carries (3, 5), solve for point 2.
        let partial = &(&s(3) / &d0) + &(&s(8) / &d1);
        let needed = -&(&partial * &d2);
        let blocks = vec![
            vec![block(1, 1), block(1, 2)],
            vec![block(1, 3), block(1, 5)],
            vec![
                Block {
                    m: 1,
                    xi: &needed - &s(4),
                },
                Block { m: 1, xi: s(4) },
            ],
        ];
        ParabolicData::new(marked, blocks).unwrap()
    }

    #[test]
    fn construct_section_rank2() {
        let d = residue_compatible_rank2(&[0, 1, 2]);
        assert!(d.residue_condition());
        let sys = build_constraints(&d);
        let tuple = construct_section(&d, FreeValues::Zero).unwrap();
        assert_eq!(tuple.rank(), 2);
        assert!(tuple.degree_bounds_hold(3));
        assert!(sys.satisfied_by(&tuple));
        // A seeded run also satisfies every row exactly.
        let seeded = construct_section(&d, FreeValues::Seeded(42)).unwrap();
        assert!(sys.satisfied_by(&seeded));
    }

    #[test]
    fn construct_section_strongly_parabolic() {
        // All eigenvalues zero: sections must vanish to the level orders.
        let d = data(
            &[0, 1, 2, 3],
            vec![
                vec![block(2, 0), block(1, 0)],
                vec![block(1, 0), block(1, 0), block(1, 0)],
                vec![block(1, 0), block(1, 0), block(1, 0)],
                vec![block(1, 0), block(1, 0), block(1, 0)],
            ],
        );
        let sys = build_constraints(&d);
        for free in [FreeValues::Zero, FreeValues::Seeded(5)] {
            let tuple = construct_section(&d, free).unwrap();
            assert!(sys.satisfied_by(&tuple));
            for (i, partition) in d.point_partitions().iter().enumerate() {
                for mu in 1..=3 {
                    let need = partition.level(mu);
                    let order = tuple
                        .section(mu)
                        .order_at(d.points().get(i))
                        .unwrap_or(usize::MAX);
                    assert!(
                        order >= need,
                        "point {i}, section {mu}: order {order} < {need}"
                    );
                }
            }
        }
        // Three points of type (1, 1) leave no room at all: the zero curve.
        let rigid = data(
            &[0, 1, 2],
            vec![
                vec![block(1, 0), block(1, 0)],
                vec![block(1, 0), block(1, 0)],
                vec![block(1, 0), block(1, 0)],
            ],
        );
        let tuple = construct_section(&rigid, FreeValues::Seeded(99)).unwrap();
        assert!(tuple.polynomials().iter().all(UniPoly::is_zero));
    }

    #[test]
    fn construct_section_worked_shape() {
        // The rank-6 worked configuration at a point, padded with regular
        // points to make the line construction feasible.
        let d = data(
            &[0, 1, 2, 3, 4],
            vec![
                vec![block(3, 1), block(2, 2), block(1, 1)],
                vec![
                    block(1, 1),
                    block(1, 2),
                    block(1, 3),
                    block(1, 4),
                    block(1, 5),
                    block(1, -15),
                ],
                vec![
                    block(1, 1),
                    block(1, 2),
                    block(1, 3),
                    block(1, 4),
                    block(1, 5),
                    block(1, 6),
                ],
                vec![
                    block(1, 1),
                    block(1, 2),
                    block(1, 3),
                    block(1, 4),
                    block(1, 5),
                    block(1, 6),
                ],
                vec![
                    block(1, -35),
                    block(1, -1),
                    block(1, -2),
                    block(1, -3),
                    block(1, -4),
                    block(1, -5),
                ],
            ],
        );
        assert!(d.residue_condition());
        let tuple = construct_section(&d, FreeValues::Zero).unwrap();
        let sys = build_constraints(&d);
        assert!(sys.satisfied_by(&tuple));
    }

    #[test]
    fn dimension_fixtures() {
        let d3 = residue_compatible_rank2(&[0, 1, 2]);
        assert_eq!(solution_dimension(&d3).unwrap(), SolutionSpace::Dim(0));
        let flat = data(
            &[0, 1, 2],
            vec![
                vec![block(1, 0), block(1, 0)],
                vec![block(1, 0), block(1, 0)],
                vec![block(1, 0), block(1, 0)],
            ],
        );
        assert_eq!(solution_dimension(&flat).unwrap(), SolutionSpace::Dim(0));
        // Four points of type (1,1): dimension 1.
        let four = data(
            &[0, 1, 2, 3],
            vec![
                vec![block(1, 0), block(1, 0)],
                vec![block(1, 0), block(1, 0)],
                vec![block(1, 0), block(1, 0)],
                vec![block(1, 0), block(1, 0)],
            ],
        );
        assert_eq!(solution_dimension(&four).unwrap(), SolutionSpace::Dim(1));
        // Incompatible residues: empty solution space.
        let incompatible = data(
            &[0, 1, 2],
            vec![
                vec![block(1, 1), block(1, 1)],
                vec![block(1, 0), block(1, 0)],
                vec![block(1, 0), block(1, 0)],
            ],
        );
        assert!(!incompatible.residue_condition());
        assert_eq!(
            solution_dimension(&incompatible).unwrap(),
            SolutionSpace::Empty
        );
    }

    #[test]
    fn dimension_constant_under_scaling() {
        let base = residue_compatible_rank2(&[0, 1, 2]);
        let reference = solution_dimension(&base).unwrap();
        for lambda in [2i64, 5] {
            let scaled_blocks: Vec<Vec<Block>> = (0..3)
                .map(|i| {
                    base.blocks(i)
                        .iter()
                        .map(|b| Block {
                            m: b.m,
                            xi: &b.xi * &s(lambda),
                        })
                        .collect()
                })
                .collect();
            let scaled =
                ParabolicData::new(base.points().clone(), scaled_blocks).unwrap();
            assert!(scaled.residue_condition());
            assert_eq!(solution_dimension(&scaled).unwrap(), reference);
        }
    }

    #[test]
    fn compatibility_equals_residue_functional() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..25 {
            let pts = MarkedPoints::new(vec![s(0), s(1), s(2), s(5)]).unwrap();
            let blocks: Vec<Vec<Block>> = (0..4)
                .map(|_| {
                    vec![Block {
                        m: 1,
                        xi: Scalar::random_small(&mut rng),
                    }]
                })
                .collect();
            let d = ParabolicData::new(pts.clone(), blocks).unwrap();
            let values: Vec<Scalar> = (0..4)
                .map(|i| d.blocks(i)[0].xi.clone())
                .collect();
            assert_eq!(
                compatibility_defect(&pts, &values),
                d.residue_defect()
            );
        }
    }
}
