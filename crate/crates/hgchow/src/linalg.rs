//! Exact integer linear algebra: solving A x = b over Z by unimodular
//! column reduction, and fraction-free determinants. Matrix sizes here are
//! small (graded pieces of polynomial rings), so clarity wins over
//! asymptotics.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Solve `A x = b` over the integers. `a` is row-major with consistent row
/// lengths. Returns one solution (free coordinates set to zero) or `None`
/// when no integral solution exists.
pub fn solve_integer(a: &[Vec<BigInt>], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let m = a.len();
    assert_eq!(b.len(), m);
    let n = if m == 0 { 0 } else { a[0].len() };
    if m == 0 {
        return Some(vec![]);
    }
    // Work on a copy; accumulate column operations in u (n x n, unimodular)
    // so that work = a * u throughout.
    let mut work: Vec<Vec<BigInt>> = a.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();

    let col_sub = |work: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, q: &BigInt| {
        for row in work.iter_mut() {
            let t = &row[src] * q;
            row[dst] -= t;
        }
        for row in u.iter_mut() {
            let t = &row[src] * q;
            row[dst] -= t;
        }
    };
    let col_swap = |work: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, i: usize, j: usize| {
        for row in work.iter_mut() {
            row.swap(i, j);
        }
        for row in u.iter_mut() {
            row.swap(i, j);
        }
    };

    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut pc = 0usize;
    for r in 0..m {
        if pc >= n {
            break;
        }
        // Reduce row r (columns >= pc) to a single nonzero entry by gcd
        // elimination among columns.
        loop {
            let mut nonzero: Vec<usize> = (pc..n).filter(|&j| !work[r][j].is_zero()).collect();
            if nonzero.len() <= 1 {
                break;
            }
            nonzero.sort_by(|&i, &j| work[r][i].abs().cmp(&work[r][j].abs()));
            // Euclidean step: shrink the second-smallest entry by the
            // smallest; iterating drives all but one entry to zero.
            let j0 = nonzero[0];
            let j1 = nonzero[1];
            let q = euclid_quotient(&work[r][j1].clone(), &work[r][j0].clone());
            col_sub(&mut work, &mut u, j1, j0, &q);
        }
        let jnz = (pc..n).find(|&j| !work[r][j].is_zero());
        if let Some(j) = jnz {
            if j != pc {
                col_swap(&mut work, &mut u, pc, j);
            }
            if work[r][pc].is_negative() {
                for row in work.iter_mut() {
                    row[pc] = -row[pc].clone();
                }
                for row in u.iter_mut() {
                    row[pc] = -row[pc].clone();
                }
            }
            pivots.push((r, pc));
            pc += 1;
        }
    }

    // Back-substitute in echelon form: each pivot row determines one y.
    let mut y = vec![BigInt::zero(); n];
    let mut res: Vec<BigInt> = b.to_vec();
    for &(r, c) in &pivots {
        let p = &work[r][c];
        let (q, rem) = res[r].div_mod_floor(p);
        if !rem.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for i in 0..m {
                let t = &work[i][c] * &q;
                res[i] -= t;
            }
            y[c] = q;
        }
    }
    if res.iter().any(|v| !v.is_zero()) {
        return None;
    }
    // x = u * y
    let mut x = vec![BigInt::zero(); n];
    for i in 0..n {
        let mut acc = BigInt::zero();
        for j in 0..n {
            if !y[j].is_zero() {
                acc += &u[i][j] * &y[j];
            }
        }
        x[i] = acc;
    }
    debug_assert!({
        let mut ok = true;
        for i in 0..m {
            let mut acc = BigInt::zero();
            for j in 0..n {
                acc += &a[i][j] * &x[j];
            }
            ok &= acc == b[i];
        }
        ok
    });
    Some(x)
}

/// Quotient for one Euclidean reduction step: chooses q so that
/// |a - q*b| <= |a| shrinks toward gcd (rounded division).
fn euclid_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    debug_assert!(!b.is_zero());
    let (q, r) = a.div_mod_floor(b);
    // Round to nearest: if 2|r| > |b| adjust by one.
    if r.abs() * 2 > b.abs() {
        if b.is_negative() {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

/// Determinant by the Bareiss fraction-free algorithm with row pivoting.
pub fn det_bareiss(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    assert!(a.iter().all(|r| r.len() == n));
    let mut m: Vec<Vec<BigInt>> = a.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero());
                m[i][j] = q;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| bi(v)).collect())
            .collect()
    }

    #[test]
    fn solves_square_system() {
        let a = mat(&[&[2, 1], &[1, 3]]);
        let b = vec![bi(5), bi(10)];
        let x = solve_integer(&a, &b).unwrap();
        assert_eq!(x, vec![bi(1), bi(3)]);
    }

    #[test]
    fn detects_non_integral() {
        let a = mat(&[&[2]]);
        assert!(solve_integer(&a, &[bi(3)]).is_none());
        assert_eq!(solve_integer(&a, &[bi(4)]).unwrap(), vec![bi(2)]);
    }

    #[test]
    fn bezout_combination() {
        // 6x + 10y = 2 has integer solutions.
        let a = mat(&[&[6, 10]]);
        let x = solve_integer(&a, &[bi(2)]).unwrap();
        assert_eq!(bi(6) * &x[0] + bi(10) * &x[1], bi(2));
        // ... but = 1 does not.
        assert!(solve_integer(&a, &[bi(1)]).is_none());
    }

    #[test]
    fn inconsistent_rows() {
        let a = mat(&[&[1, 1], &[1, 1]]);
        assert!(solve_integer(&a, &[bi(1), bi(2)]).is_none());
    }

    #[test]
    fn underdetermined_picks_solution() {
        let a = mat(&[&[1, 2, 3]]);
        let x = solve_integer(&a, &[bi(7)]).unwrap();
        assert_eq!(&x[0] + bi(2) * &x[1] + bi(3) * &x[2], bi(7));
    }

    #[test]
    fn det_small() {
        assert_eq!(det_bareiss(&mat(&[&[3]])), bi(3));
        assert_eq!(det_bareiss(&mat(&[&[1, 2], &[3, 4]])), bi(-2));
        assert_eq!(
            det_bareiss(&mat(&[&[2, 0, 1], &[1, 1, 0], &[0, 3, 1]])),
            bi(5)
        );
        assert_eq!(det_bareiss(&mat(&[&[0, 1], &[1, 0]])), bi(-1));
        assert_eq!(det_bareiss(&mat(&[&[1, 1], &[2, 2]])), bi(0));
    }
}
