//! Dense linear algebra over small finite fields.
//!
//! Field elements are plain `u32` indices; the meaning of an index belongs to
//! the [`FieldOps`] implementation. Matrices are `Vec<Vec<u32>>` in row-major
//! order.

/// Arithmetic of a finite field whose elements are indexed `0..order`, with
/// `0` the zero and `1` the unit.
pub trait FieldOps {
    fn order(&self) -> u64;
    fn add(&self, a: u32, b: u32) -> u32;
    fn sub(&self, a: u32, b: u32) -> u32;
    fn mul(&self, a: u32, b: u32) -> u32;
    fn inv(&self, a: u32) -> u32;

    fn neg(&self, a: u32) -> u32 {
        self.sub(0, a)
    }
}

/// The prime field `F_p`, `p < 2^32`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    pub p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Self {
        PrimeField { p }
    }

    pub fn pow(&self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }
}

impl FieldOps for PrimeField {
    fn order(&self) -> u64 {
        self.p as u64
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    fn sub(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        self.pow(a, self.p as u64 - 2)
    }
}

/// Reduce `rows` in place to reduced row-echelon form, drop zero rows and
/// return the pivot columns.
pub fn rref<F: FieldOps>(f: &F, rows: &mut Vec<Vec<u32>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..ncols {
        if top == rows.len() {
            break;
        }
        let Some(found) = (top..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(top, found);
        let scale = f.inv(rows[top][col]);
        if scale != 1 {
            for x in rows[top].iter_mut() {
                *x = f.mul(*x, scale);
            }
        }
        let pivot_row = rows[top].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == top || row[col] == 0 {
                continue;
            }
            let factor = row[col];
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x = f.sub(*x, f.mul(factor, y));
            }
        }
        pivots.push(col);
        top += 1;
    }
    rows.truncate(top);
    pivots
}

pub fn rank<F: FieldOps>(f: &F, rows: &[Vec<u32>]) -> usize {
    let mut work = rows.to_vec();
    rref(f, &mut work).len()
}

/// Inverse of a square matrix, or `None` if it is singular.
pub fn invert<F: FieldOps>(f: &F, matrix: &[Vec<u32>]) -> Option<Vec<Vec<u32>>> {
    let n = matrix.len();
    let mut aug: Vec<Vec<u32>> = matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "matrix is not square");
            let mut r = row.clone();
            r.extend((0..n).map(|j| u32::from(i == j)));
            r
        })
        .collect();
    let pivots = rref(f, &mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Basis of `{x : A x = 0}` as RREF rows.
pub fn kernel<F: FieldOps>(f: &F, matrix: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let ncols = matrix.first().map_or(0, |r| r.len());
    let mut work = matrix.to_vec();
    let pivots = rref(f, &mut work);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u32; ncols];
        v[free] = 1;
        for (row, &pc) in work.iter().zip(&pivots) {
            v[pc] = f.neg(row[free]);
        }
        basis.push(v);
    }
    rref(f, &mut basis);
    basis
}

/// `A x` for a matrix and column vector.
pub fn mat_vec<F: FieldOps>(f: &F, matrix: &[Vec<u32>], x: &[u32]) -> Vec<u32> {
    matrix
        .iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_rank_f2(rows: &[Vec<u32>]) -> usize {
        // Size of the row span, counted by enumerating all combinations.
        let k = rows.len();
        let mut span = std::collections::HashSet::new();
        for mask in 0u32..(1 << k) {
            let mut v = vec![0u32; rows[0].len()];
            for (i, row) in rows.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    for (x, &y) in v.iter_mut().zip(row) {
                        *x ^= y;
                    }
                }
            }
            span.insert(v);
        }
        span.len().trailing_zeros() as usize
    }

    #[test]
    fn rank_small() {
        let f = PrimeField::new(2);
        assert_eq!(rank(&f, &[vec![1, 0], vec![0, 1]]), 2);
        assert_eq!(rank(&f, &[vec![1, 1], vec![1, 1]]), 1);
        assert_eq!(rank(&f, &[vec![0, 0]]), 0);
    }

    #[test]
    fn invert_roundtrip() {
        let f = PrimeField::new(5);
        let a = vec![vec![2, 1, 0], vec![0, 1, 4], vec![3, 0, 1]];
        let inv = invert(&f, &a).unwrap();
        for (i, row) in a.iter().enumerate() {
            for j in 0..3 {
                let col: Vec<u32> = inv.iter().map(|r| r[j]).collect();
                let dot = row
                    .iter()
                    .zip(&col)
                    .fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)));
                assert_eq!(dot, u32::from(i == j));
            }
        }
        assert!(invert(&f, &[vec![1, 2], vec![2, 4]]).is_none());
    }

    #[test]
    fn kernel_is_annihilated() {
        let f = PrimeField::new(3);
        let a = vec![vec![1, 2, 0, 1], vec![2, 1, 0, 2]];
        let ker = kernel(&f, &a);
        assert_eq!(ker.len(), 4 - rank(&f, &a));
        for v in &ker {
            assert!(mat_vec(&f, &a, v).iter().all(|&x| x == 0));
        }
    }

    proptest! {
        #[test]
        fn rank_matches_span_size(bits in proptest::collection::vec(0u32..2, 12)) {
            let rows: Vec<Vec<u32>> = bits.chunks(4).map(|c| c.to_vec()).collect();
            prop_assert_eq!(rank(&PrimeField::new(2), &rows), brute_rank_f2(&rows));
        }

        #[test]
        fn rref_is_canonical(entries in proptest::collection::vec(0u32..3, 8), mix in 1u32..3) {
            // Row operations do not change the reduced form.
            let f = PrimeField::new(3);
            let mut a: Vec<Vec<u32>> = entries.chunks(4).map(|c| c.to_vec()).collect();
            let mut b = vec![
                a[0].iter().zip(&a[1]).map(|(&x, &y)| f.add(x, f.mul(mix, y))).collect::<Vec<_>>(),
                a[1].iter().map(|&y| f.mul(mix, y)).collect(),
            ];
            let pa = rref(&f, &mut a);
            let pb = rref(&f, &mut b);
            prop_assert_eq!(pa, pb);
            prop_assert_eq!(a, b);
        }
    }
}
