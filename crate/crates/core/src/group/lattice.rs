//! Integer lattices in Hermite normal form, and exact integer rank.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// A subgroup of `Z^D` given by generators, stored as an echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    dimension: usize,
    rows: Vec<(usize, Vec<i128>)>,
}

impl Lattice {
    pub fn new<I>(dimension: usize, generators: I) -> Self
    where
        I: IntoIterator<Item = Vec<i64>>,
    {
        let mut pending: Vec<Vec<i128>> = generators
            .into_iter()
            .map(|g| {
                assert_eq!(g.len(), dimension, "generator dimension");
                g.into_iter().map(i128::from).collect()
            })
            .filter(|g: &Vec<i128>| g.iter().any(|&x| x != 0))
            .collect();
        let mut rows = Vec::new();
        for column in 0..dimension {
            loop {
                let mut nonzero: Vec<usize> = (0..pending.len())
                    .filter(|&k| pending[k][column] != 0)
                    .collect();
                if nonzero.len() <= 1 {
                    if let Some(&k) = nonzero.first() {
                        let mut pivot_row = pending.swap_remove(k);
                        if pivot_row[column] < 0 {
                            pivot_row.iter_mut().for_each(|x| *x = -*x);
                        }
                        rows.push((column, pivot_row));
                    }
                    break;
                }
                nonzero.sort_by_key(|&k| pending[k][column].abs());
                let smallest = nonzero[0];
                let pivot = pending[smallest].clone();
                for &k in &nonzero[1..] {
                    let factor = pending[k][column] / pivot[column];
                    for (x, p) in pending[k].iter_mut().zip(&pivot) {
                        *x -= factor * p;
                    }
                }
                pending.retain(|g| g.iter().any(|&x| x != 0));
            }
        }
        Self { dimension, rows }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Index in `Z^D` when the lattice has full rank.
    pub fn index(&self) -> Option<u128> {
        (self.rank() == self.dimension)
            .then(|| self.rows.iter().map(|(c, row)| row[*c] as u128).product())
    }

    pub fn contains(&self, vector: &[i64]) -> bool {
        let mut residual: Vec<i128> = vector.iter().map(|&x| i128::from(x)).collect();
        for (column, row) in &self.rows {
            let pivot = row[*column];
            if residual[*column] % pivot != 0 {
                return false;
            }
            let factor = residual[*column] / pivot;
            for (x, r) in residual.iter_mut().zip(row) {
                *x -= factor * r;
            }
        }
        residual.iter().all(|&x| x == 0)
    }
}

/// Rank over `Q` (equivalently, the size of a maximal `Z`-independent
/// subset) of the given integer rows, by fraction-free elimination.
pub fn integer_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut matrix: Vec<Vec<BigInt>> = rows.to_vec();
    let columns = matrix.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut previous_pivot = BigInt::from(1);
    for column in 0..columns {
        let Some(pivot_row) = (rank..matrix.len()).find(|&k| !matrix[k][column].is_zero()) else {
            continue;
        };
        matrix.swap(rank, pivot_row);
        let pivot = matrix[rank][column].clone();
        let (upper, lower) = matrix.split_at_mut(rank + 1);
        let top = &upper[rank];
        for row in lower {
            let lead = row[column].clone();
            for (value, above) in row[column..].iter_mut().zip(&top[column..]) {
                *value = (&pivot * &*value - &lead * above) / &previous_pivot;
            }
        }
        previous_pivot = pivot.abs();
        if previous_pivot.is_zero() {
            previous_pivot = BigInt::from(1);
        }
        rank += 1;
        if rank == matrix.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sublattice_membership() {
        let lattice = Lattice::new(2, [vec![2, 0], vec![0, 2]]);
        assert!(lattice.contains(&[2, 4]));
        assert!(!lattice.contains(&[1, 2]));
        assert_eq!(lattice.index(), Some(4));
        let skew = Lattice::new(2, [vec![1, 1], vec![1, -1]]);
        assert!(skew.contains(&[2, 0]));
        assert!(!skew.contains(&[1, 0]));
        assert_eq!(skew.index(), Some(2));
        let degenerate = Lattice::new(2, [vec![3, 6], vec![1, 2]]);
        assert_eq!(degenerate.rank(), 1);
        assert_eq!(degenerate.index(), None);
        assert!(degenerate.contains(&[-1, -2]));
    }

    #[test]
    fn rank_examples() {
        let big = |rows: &[&[i64]]| -> Vec<Vec<BigInt>> {
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect()
        };
        assert_eq!(integer_rank(&big(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(integer_rank(&big(&[&[1, 2, 3], &[0, 1, 1], &[1, 3, 4]])), 2);
        assert_eq!(integer_rank(&big(&[&[0, 0], &[0, 1]])), 1);
        assert_eq!(integer_rank(&[]), 0);
    }

    proptest! {
        #[test]
        fn generated_combinations_are_members(
            gens in prop::collection::vec(prop::collection::vec(-5i64..6, 3), 1..4),
            coeffs in prop::collection::vec(-4i64..5, 4),
        ) {
            let lattice = Lattice::new(3, gens.clone());
            let mut v = vec![0i64; 3];
            for (g, c) in gens.iter().zip(&coeffs) {
                for (x, y) in v.iter_mut().zip(g) {
                    *x += c * y;
                }
            }
            prop_assert!(lattice.contains(&v));
            let rows: Vec<Vec<BigInt>> = gens.iter().map(|g| g.iter().map(|&x| BigInt::from(x)).collect()).collect();
            prop_assert_eq!(integer_rank(&rows), lattice.rank());
        }
    }
}
