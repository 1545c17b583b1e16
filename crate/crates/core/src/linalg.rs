//! Small dense linear algebra over f64: rank and underdetermined solves via
//! pivoted Gaussian elimination. Rank decisions use the threshold
//! `1e-10 * max-norm` of the input matrix.

pub(crate) const RANK_THRESHOLD_FACTOR: f64 = 1e-10;

fn max_norm(m: &[Vec<f64>]) -> f64 {
    m.iter().flatten().fold(0.0f64, |a, &v| a.max(v.abs()))
}

/// Numerical rank via row echelon with partial pivoting.
pub(crate) fn rank(mut m: Vec<Vec<f64>>) -> usize {
    if m.is_empty() || m[0].is_empty() {
        return 0;
    }
    let rows = m.len();
    let cols = m[0].len();
    let tol = RANK_THRESHOLD_FACTOR * max_norm(&m).max(1e-300);
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        // Find pivot in this column at or below `row`.
        let mut pivot = row;
        for r in (row + 1)..rows {
            if m[r][col].abs() > m[pivot][col].abs() {
                pivot = r;
            }
        }
        if row >= rows || m[pivot][col].abs() <= tol {
            continue;
        }
        m.swap(row, pivot);
        for r in (row + 1)..rows {
            let factor = m[r][col] / m[row][col];
            for c in col..cols {
                m[r][c] -= factor * m[row][c];
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Solve `A x = b` for any one solution of a (possibly underdetermined)
/// consistent system. Returns `None` when `A` does not have full row rank.
pub(crate) fn solve_any(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let rows = a.len();
    if rows == 0 {
        return Some(Vec::new());
    }
    let cols = a[0].len();
    let tol = RANK_THRESHOLD_FACTOR * max_norm(a).max(1e-300);
    // Augmented matrix.
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let mut pivot = row;
        for r in (row + 1)..rows {
            if m[r][col].abs() > m[pivot][col].abs() {
                pivot = r;
            }
        }
        if m[pivot][col].abs() <= tol {
            continue;
        }
        m.swap(row, pivot);
        for r in 0..rows {
            if r != row {
                let factor = m[r][col] / m[row][col];
                for c in col..=cols {
                    let v = m[row][c];
                    m[r][c] -= factor * v;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    if row < rows {
        // A row without a pivot: the input rows are dependent.
        return None;
    }
    let mut x = vec![0.0; cols];
    for (r, &col) in pivot_cols.iter().enumerate() {
        x[col] = m[r][cols] / m[r][col];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_basics() {
        assert_eq!(rank(vec![vec![1.0, 0.0], vec![0.0, 1.0]]), 2);
        assert_eq!(rank(vec![vec![1.0, 2.0], vec![2.0, 4.0]]), 1);
        assert_eq!(rank(vec![vec![0.0, 0.0]]), 0);
        assert_eq!(
            rank(vec![
                vec![1.0, 2.0, 3.0],
                vec![4.0, 5.0, 6.0],
                vec![7.0, 8.0, 9.0]
            ]),
            2
        );
    }

    #[test]
    fn solve_underdetermined() {
        // x + y = 1 with a free variable.
        let a = vec![vec![1.0, 1.0]];
        let x = solve_any(&a, &[1.0]).unwrap();
        assert!((x[0] + x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solve_detects_dependent_rows() {
        let a = vec![vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(solve_any(&a, &[1.0, 3.0]).is_none());
    }
}
