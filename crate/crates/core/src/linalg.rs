//! Exact integer and rational linear algebra on small dense matrices.
//!
//! Everything here is fraction-free (Bareiss) over `BigInt`, or plain
//! Gaussian elimination over `BigRational` when a solution vector is needed.
//! The matrices this crate produces are tiny, so no attempt is made at
//! sparsity or cache friendliness.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Integer matrix stored row-major.
pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn to_big(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Runs fraction-free elimination in place and returns the rank.
///
/// After the call the first `rank` rows are in echelon form and each pivot is
/// a minor of the original matrix.
pub fn bareiss_rank_in_place(m: &mut IntMatrix) -> usize {
    let nrows = m.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = m[0].len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (head, tail) = m.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let pivot = pivot_row[c].clone();
        for row in tail.iter_mut() {
            let factor = row[c].clone();
            for j in (c + 1)..ncols {
                let v = &pivot * &row[j] - &factor * &pivot_row[j];
                // exact by Sylvester's identity
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = pivot;
        r += 1;
    }
    r
}

pub fn bareiss_rank(mut m: IntMatrix) -> usize {
    bareiss_rank_in_place(&mut m)
}

/// Determinant of a square integer matrix.
pub fn determinant(rows: &[Vec<i64>]) -> BigInt {
    let n = rows.len();
    assert!(rows.iter().all(|r| r.len() == n), "determinant of non-square matrix");
    if n == 0 {
        return BigInt::one();
    }
    let mut m = to_big(rows);
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            m.swap(p, k);
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let v = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Solves `sum_j x_j * cols[j] = target` over the rationals.
///
/// Returns `None` when the system is inconsistent. When the columns are
/// dependent, free variables are set to zero.
pub fn solve_rational(cols: &[Vec<i64>], target: &[i64]) -> Option<Vec<BigRational>> {
    let nvars = cols.len();
    let neq = target.len();
    assert!(cols.iter().all(|c| c.len() == neq));
    let q = |x: i64| BigRational::from_integer(BigInt::from(x));
    let mut a: Vec<Vec<BigRational>> = (0..neq)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..nvars).map(|j| q(cols[j][i])).collect();
            row.push(q(target[i]));
            row
        })
        .collect();

    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..nvars {
        let Some(p) = (r..neq).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x -= p * &f;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == neq {
            break;
        }
    }
    if a[r..].iter().any(|row| !row[nvars].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); nvars];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = a[i][nvars].clone();
    }
    Some(x)
}

/// Solves an integer system exactly and returns the solution only if it is integral.
pub fn solve_integer(cols: &[Vec<i64>], target: &[i64]) -> Option<Vec<i64>> {
    let x = solve_rational(cols, target)?;
    x.into_iter().map(|v| if v.is_integer() { i64::try_from(v.to_integer()).ok() } else { None }).collect()
}

pub fn is_nonnegative(x: &[BigRational]) -> bool {
    x.iter().all(|v| !v.is_negative())
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rational_rank(rows: &[Vec<i64>]) -> usize {
        if rows.is_empty() {
            return 0;
        }
        let ncols = rows[0].len();
        // rank of the column set == rank of the matrix
        let cols: Vec<Vec<i64>> = (0..ncols).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        let mut basis: Vec<Vec<i64>> = Vec::new();
        for c in cols {
            if solve_rational(&basis, &c).is_none() {
                basis.push(c);
            }
        }
        basis.len()
    }

    #[test]
    fn determinant_small() {
        assert_eq!(determinant(&[vec![-1, -1], vec![0, 1]]), BigInt::from(-1));
        assert_eq!(determinant(&[vec![2, 4], vec![1, 2]]), BigInt::zero());
        assert_eq!(determinant(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 3]]), BigInt::from(-3));
    }

    #[test]
    fn rank_with_zero_rows_and_skipped_columns() {
        let m = vec![vec![0, 0, 0, 0], vec![0, 1, 2, 3], vec![0, 2, 4, 7], vec![0, 0, 0, 0]];
        assert_eq!(bareiss_rank(to_big(&m)), 2);
        assert_eq!(rational_rank(&m), 2);
    }

    #[test]
    fn rank_matches_rational_elimination() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..300 {
            let r = rng.gen_range(1..7);
            let c = rng.gen_range(1..7);
            let m: Vec<Vec<i64>> = (0..r)
                .map(|_| (0..c).map(|_| if rng.gen_bool(0.4) { 0 } else { rng.gen_range(-9..10) }).collect())
                .collect();
            assert_eq!(bareiss_rank(to_big(&m)), rational_rank(&m), "{m:?}");
        }
    }

    #[test]
    fn solve_detects_inconsistency_and_non_integrality() {
        let cols = vec![vec![1, 0], vec![1, 0]];
        assert!(solve_rational(&cols, &[1, 1]).is_none());
        let cols = vec![vec![2, 0], vec![0, 1]];
        assert_eq!(solve_integer(&cols, &[4, 3]), Some(vec![2, 3]));
        assert_eq!(solve_integer(&cols, &[3, 3]), None);
    }
}
