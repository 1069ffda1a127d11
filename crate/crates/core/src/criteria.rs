//! Numerical solvability criteria: twisted line bundle degrees, the per-level
//! vanishing condition, interpolation controllability, and the rank/dimension
//! criterion of Simpson, together with their equivalence sweep.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::{partitions_of, Partition};

/// Degree of the level-mu twist: mu (2g - 2 + n) minus the level sums of the
/// point partitions at mu.
pub fn line_bundle_degree(genus: usize, partitions: &[Partition], mu: usize) -> i64 {
    let n = partitions.len() as i64;
    let level_total: i64 = partitions.iter().map(|p| p.level(mu) as i64).sum();
    mu as i64 * (2 * genus as i64 - 2 + n) - level_total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GenusCase {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = ">=2")]
    AtLeastTwo,
}

impl GenusCase {
    fn of(genus: usize) -> Self {
        match genus {
            0 => GenusCase::Zero,
            1 => GenusCase::One,
            _ => GenusCase::AtLeastTwo,
        }
    }
}

/// One level of the vanishing criterion: the combined level sum must stay
/// strictly below the threshold mu (2g - 2 + n) - (2g - 2).
#[derive(Clone, Debug, Serialize)]
pub struct CriterionRow {
    pub mu: usize,
    pub level_sum: usize,
    pub threshold: i64,
    pub degree: i64,
    pub pass: bool,
}

/// Per-level report of the vanishing criterion. For genus 0 the row at mu
/// states level_sum < (n - 2) mu + 2; for genus 1 a row fails exactly when
/// every point partition has level mu at mu (all residues in a single block);
/// for genus 2 and up every row passes.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub genus: usize,
    pub rank: usize,
    pub num_points: usize,
    pub case: GenusCase,
    pub rows: Vec<CriterionRow>,
    pub satisfied: bool,
    pub first_failure: Option<usize>,
}

/// Evaluate the vanishing criterion for the given genus and point partitions.
/// The single inequality level_sum(mu) < mu (2g - 2 + n) - (2g - 2), checked
/// for mu = 2..=r, specializes to each genus case.
pub fn ok_condition(genus: usize, partitions: &[Partition]) -> Result<CriterionReport> {
    let Some(first) = partitions.first() else {
        return Err(Error::InvalidInput("no point partitions".into()));
    };
    let rank = first.size();
    if rank == 0 || partitions.iter().any(|p| p.size() != rank) {
        return Err(Error::InvalidInput(
            "point partitions must share a positive size".into(),
        ));
    }
    let n = partitions.len();
    let g = genus as i64;
    let mut rows = vec![];
    let mut first_failure = None;
    for mu in 2..=rank {
        let level_sum: usize = partitions.iter().map(|p| p.level(mu)).sum();
        let threshold = mu as i64 * (2 * g - 2 + n as i64) - (2 * g - 2);
        let degree = line_bundle_degree(genus, partitions, mu);
        let pass = (level_sum as i64) < threshold;
        if !pass && first_failure.is_none() {
            first_failure = Some(mu);
        }
        rows.push(CriterionRow {
            mu,
            level_sum,
            threshold,
            degree,
            pass,
        });
    }
    Ok(CriterionReport {
        genus,
        rank,
        num_points: n,
        case: GenusCase::of(genus),
        satisfied: first_failure.is_none(),
        first_failure,
        rows,
    })
}

/// Whether degree-deg_l interpolation can hit arbitrary jets of the given
/// orders at distinct points. On the line this is the exact criterion
/// deg_l - sum(orders) >= -1; on higher genus the sufficient strict
/// inequality is used.
pub fn controllability(genus: usize, deg_l: i64, orders: &[usize]) -> bool {
    let total: i64 = orders.iter().map(|&t| t as i64).sum();
    if genus == 0 {
        deg_l - total >= -1
    } else {
        controllability_strict(genus, deg_l, orders)
    }
}

/// The strict form: sum(orders) < deg_l - (2g - 2). Sufficient in every
/// genus, necessary in none.
pub fn controllability_strict(genus: usize, deg_l: i64, orders: &[usize]) -> bool {
    let total: i64 = orders.iter().map(|&t| t as i64).sum();
    total < deg_l - (2 * genus as i64 - 2)
}

/// Conjugacy class invariants read off a multiplicity partition: the class
/// dimension d = r(r+1) - 2 level_sum and the minimal rank R = r - gamma(r)
/// of the class elements after shifting by their dominant eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SimpsonInvariants {
    pub dimension: i64,
    pub min_rank: i64,
}

pub fn simpson_invariants(p: &Partition) -> SimpsonInvariants {
    let r = p.size() as i64;
    SimpsonInvariants {
        dimension: r * (r + 1) - 2 * p.level_sum() as i64,
        min_rank: r - p.level(p.size()) as i64,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RankCheck {
    pub omitted: usize,
    pub sum: i64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimpsonReport {
    pub total_dimension: i64,
    pub dimension_bound: i64,
    pub dimension_pass: bool,
    pub rank_checks: Vec<RankCheck>,
    pub satisfied: bool,
}

/// Simpson's criterion for multiplicity partitions with one regular class
/// (all multiplicities 1): the class dimensions must sum to at least
/// 2r^2 - 2, and every leave-one-out sum of minimal ranks must reach r.
pub fn simpson_criterion(partitions: &[Partition]) -> Result<SimpsonReport> {
    let Some(first) = partitions.first() else {
        return Err(Error::InvalidInput("no point partitions".into()));
    };
    let rank = first.size();
    if rank == 0 || partitions.iter().any(|p| p.size() != rank) {
        return Err(Error::InvalidInput(
            "point partitions must share a positive size".into(),
        ));
    }
    if !partitions.iter().any(|p| p.first() == 1) {
        return Err(Error::InvalidInput(
            "criterion requires one class with all multiplicities 1".into(),
        ));
    }
    let inv: Vec<SimpsonInvariants> = partitions.iter().map(simpson_invariants).collect();
    let r = rank as i64;
    let total_dimension: i64 = inv.iter().map(|v| v.dimension).sum();
    let dimension_bound = 2 * r * r - 2;
    let dimension_pass = total_dimension >= dimension_bound;
    let rank_total: i64 = inv.iter().map(|v| v.min_rank).sum();
    let rank_checks: Vec<RankCheck> = (0..partitions.len())
        .map(|i| {
            let sum = rank_total - inv[i].min_rank;
            RankCheck {
                omitted: i,
                sum,
                pass: sum >= r,
            }
        })
        .collect();
    let satisfied = dimension_pass && rank_checks.iter().all(|c| c.pass);
    Ok(SimpsonReport {
        total_dimension,
        dimension_bound,
        dimension_pass,
        rank_checks,
        satisfied,
    })
}

/// Both genus-0 criteria on one tuple of point partitions, with agreement.
#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceVerdict {
    pub ok_condition: bool,
    pub simpson: bool,
    pub equivalent: bool,
}

pub fn criteria_equivalence(partitions: &[Partition]) -> Result<EquivalenceVerdict> {
    let ok = ok_condition(0, partitions)?.satisfied;
    let simpson = simpson_criterion(partitions)?.satisfied;
    Ok(EquivalenceVerdict {
        ok_condition: ok,
        simpson,
        equivalent: ok == simpson,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepMismatch {
    pub num_points: usize,
    pub partitions: Vec<Partition>,
    pub ok_condition: bool,
    pub simpson: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepOutcome {
    pub cases: usize,
    pub mismatches: Vec<SweepMismatch>,
}

/// Exhaustively compare the two criteria on every tuple with one regular
/// class: ranks 2..=max_rank, the stated point counts, and all multisets of
/// partitions at the remaining points. Returns every disagreement found.
pub fn criteria_equivalence_sweep(max_rank: usize, point_counts: &[usize]) -> SweepOutcome {
    let mut cases = 0;
    let mut mismatches = vec![];
    for r in 2..=max_rank {
        let shapes = partitions_of(r);
        for &n in point_counts {
            if n == 0 {
                continue;
            }
            for mut tuple in multisets(&shapes, n - 1) {
                tuple.push(Partition::ones(r));
                cases += 1;
                let verdict = criteria_equivalence(&tuple).expect("regular class present");
                if !verdict.equivalent {
                    mismatches.push(SweepMismatch {
                        num_points: n,
                        partitions: tuple,
                        ok_condition: verdict.ok_condition,
                        simpson: verdict.simpson,
                    });
                }
            }
        }
    }
    SweepOutcome { cases, mismatches }
}

/// All multisets of the given size drawn from `items`, as sorted index tuples.
fn multisets<T: Clone>(items: &[T], size: usize) -> Vec<Vec<T>> {
    let mut out = vec![];
    let mut current = vec![];
    fn recurse<T: Clone>(
        items: &[T],
        size: usize,
        start: usize,
        current: &mut Vec<T>,
        out: &mut Vec<Vec<T>>,
    ) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for k in start..items.len() {
            current.push(items[k].clone());
            recurse(items, size, k, current, out);
            current.pop();
        }
    }
    recurse(items, size, 0, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn degree_fixtures() {
        let p11 = p(&[1, 1]);
        assert_eq!(line_bundle_degree(0, &[p11.clone(), p11.clone(), p11.clone()], 2), -1);
        assert_eq!(
            line_bundle_degree(0, &[p11.clone(), p11.clone(), p11.clone(), p11.clone()], 2),
            0
        );
        assert_eq!(line_bundle_degree(1, &[p11.clone()], 2), 1);
    }

    #[test]
    fn genus_zero_condition() {
        let pass = ok_condition(0, &[p(&[1, 1]), p(&[1, 1]), p(&[1, 1])]).unwrap();
        assert!(pass.satisfied);
        assert_eq!(pass.rows.len(), 1);
        assert_eq!(pass.rows[0].level_sum, 3);
        assert_eq!(pass.rows[0].threshold, 4);
        assert_eq!(pass.case, GenusCase::Zero);
        let fail = ok_condition(0, &[p(&[2]), p(&[2]), p(&[2])]).unwrap();
        assert!(!fail.satisfied);
        assert_eq!(fail.first_failure, Some(2));
        assert_eq!(fail.rows[0].level_sum, 6);
    }

    #[test]
    fn genus_one_exceptional_case() {
        // A single block of full multiplicity at every point fails.
        let fail = ok_condition(1, &[p(&[3])]).unwrap();
        assert!(!fail.satisfied);
        assert_eq!(fail.first_failure, Some(2));
        assert_eq!(fail.case, GenusCase::One);
        // One point with a split partition rescues every level.
        let pass = ok_condition(1, &[p(&[3]), p(&[2, 1])]).unwrap();
        assert!(pass.satisfied);
        // Rank 1 has no levels to check.
        assert!(ok_condition(1, &[p(&[1])]).unwrap().satisfied);
    }

    #[test]
    fn higher_genus_always_passes() {
        for g in 2..5 {
            for parts in [vec![p(&[4])], vec![p(&[2, 2]), p(&[4])]] {
                assert!(ok_condition(g, &parts).unwrap().satisfied, "g={g}");
            }
        }
    }

    #[test]
    fn controllability_cases() {
        assert!(controllability(0, 2, &[1, 1, 1]));
        assert!(!controllability(0, 1, &[1, 1, 1]));
        assert!(controllability(0, 1, &[0, 0, 0]));
        assert!(controllability(3, 10, &[]));
        // On the line the exact criterion t <= d + 1 and the strict
        // inequality t < d + 2 coincide.
        for d in -2..6i64 {
            for t in 0..8usize {
                assert_eq!(
                    controllability(0, d, &[t]),
                    controllability_strict(0, d, &[t])
                );
            }
        }
        assert!(controllability_strict(1, 4, &[1, 1, 1]));
        assert!(!controllability_strict(1, 3, &[1, 1, 1]));
        assert!(!controllability(1, 3, &[1, 1, 1]));
    }

    #[test]
    fn condition_matches_controllability_on_the_line() {
        for r in 1..=5usize {
            let shapes = partitions_of(r);
            for a in &shapes {
                for b in &shapes {
                    for n in [3usize, 4] {
                        let mut tuple = vec![a.clone(), b.clone()];
                        tuple.resize(n, Partition::ones(r));
                        let report = ok_condition(0, &tuple).unwrap();
                        let all_controllable = (2..=r).all(|mu| {
                            let orders: Vec<usize> =
                                tuple.iter().map(|q| q.level(mu)).collect();
                            controllability(0, (mu * (n - 2)) as i64, &orders)
                        });
                        assert_eq!(report.satisfied, all_controllable);
                    }
                }
            }
        }
    }

    #[test]
    fn invariant_fixtures() {
        let ones = simpson_invariants(&Partition::ones(4));
        assert_eq!(ones.dimension, 12);
        assert_eq!(ones.min_rank, 3);
        let single = simpson_invariants(&p(&[4]));
        assert_eq!(single.dimension, 0);
        assert_eq!(single.min_rank, 0);
        let mixed = simpson_invariants(&p(&[2, 1]));
        assert_eq!(mixed.dimension, 4);
        assert_eq!(mixed.min_rank, 1);
        // Closed forms: d = r^2 - sum of squares, R = r - largest part.
        for r in 1..=8usize {
            for q in partitions_of(r) {
                let inv = simpson_invariants(&q);
                let sq: i64 = q.parts().iter().map(|&m| (m * m) as i64).sum();
                assert_eq!(inv.dimension, (r * r) as i64 - sq);
                assert_eq!(inv.min_rank, (r - q.first()) as i64);
                assert_eq!(inv.dimension % 2, 0);
                assert!(inv.dimension >= 0);
                assert!(inv.dimension <= (r * r - r) as i64);
            }
        }
    }

    #[test]
    fn simpson_fixtures() {
        let ones = Partition::ones(2);
        let yes = simpson_criterion(&[ones.clone(), ones.clone(), ones.clone()]).unwrap();
        assert!(yes.satisfied);
        assert_eq!(yes.total_dimension, 6);
        assert_eq!(yes.dimension_bound, 6);
        let no = simpson_criterion(&[p(&[2]), p(&[2]), ones.clone()]).unwrap();
        assert!(!no.satisfied);
        assert_eq!(no.total_dimension, 2);
        // Rank 1 fails the leave-one-out rank sums.
        let r1 = simpson_criterion(&[p(&[1]), p(&[1]), p(&[1])]).unwrap();
        assert!(!r1.satisfied);
        assert!(r1.dimension_pass);
        // No regular class: hypothesis violated.
        assert!(simpson_criterion(&[p(&[2]), p(&[2]), p(&[2])]).is_err());
    }

    #[test]
    fn equivalence_on_small_ranks() {
        let outcome = criteria_equivalence_sweep(4, &[3, 4]);
        assert_eq!(outcome.cases, 73);
        assert!(
            outcome.mismatches.is_empty(),
            "criteria disagree on {:?}",
            outcome.mismatches[0].partitions
        );
    }

    #[test]
    fn multiset_enumeration() {
        assert_eq!(multisets(&[1, 2, 3], 2).len(), 6);
        assert_eq!(multisets(&[1, 2], 0).len(), 1);
    }
}
