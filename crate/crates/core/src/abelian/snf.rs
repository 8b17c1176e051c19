//! Integer Smith normal form with unimodular transforms.
//!
//! Matrices here are tiny (a handful of rows, at most a dozen columns), so a
//! dense `Vec<Vec<i128>>` representation with textbook elimination is plenty.

pub type IntMatrix = Vec<Vec<i128>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

/// Result of `smith`: `left * input * right == diag`, with `left` and `right`
/// unimodular and the nonzero diagonal entries positive with `d[i] | d[i+1]`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub diag: Vec<i128>,
    pub rank: usize,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

struct Work {
    a: IntMatrix,
    left: IntMatrix,
    right: IntMatrix,
    rows: usize,
    cols: usize,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap(i, j);
            self.left.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for row in self.a.iter_mut() {
                row.swap(i, j);
            }
            for row in self.right.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    /// row[target] -= q * row[src]
    fn row_axpy(&mut self, target: usize, src: usize, q: i128) {
        if q == 0 {
            return;
        }
        for c in 0..self.cols {
            let v = self.a[src][c];
            self.a[target][c] -= q * v;
        }
        for c in 0..self.rows {
            let v = self.left[src][c];
            self.left[target][c] -= q * v;
        }
    }

    /// col[target] -= q * col[src]
    fn col_axpy(&mut self, target: usize, src: usize, q: i128) {
        if q == 0 {
            return;
        }
        for r in 0..self.rows {
            let v = self.a[r][src];
            self.a[r][target] -= q * v;
        }
        for r in 0..self.cols {
            let v = self.right[r][src];
            self.right[r][target] -= q * v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for v in self.a[i].iter_mut() {
            *v = -*v;
        }
        for v in self.left[i].iter_mut() {
            *v = -*v;
        }
    }

    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for r in t..self.rows {
            for c in t..self.cols {
                let v = self.a[r][c].abs();
                if v != 0 && best.is_none_or(|(br, bc)| v < self.a[br][bc].abs()) {
                    best = Some((r, c));
                }
            }
        }
        best
    }
}

pub fn smith(input: &IntMatrix, cols: usize) -> Smith {
    let rows = input.len();
    let mut w = Work {
        a: input.clone(),
        left: identity(rows),
        right: identity(cols),
        rows,
        cols,
    };
    let mut rank = 0;
    for t in 0..rows.min(cols) {
        let Some((pr, pc)) = w.min_pivot(t) else {
            break;
        };
        w.swap_rows(t, pr);
        w.swap_cols(t, pc);
        loop {
            let mut dirty = false;
            for r in t + 1..rows {
                let q = w.a[r][t].div_euclid(w.a[t][t]);
                w.row_axpy(r, t, q);
                if w.a[r][t] != 0 {
                    dirty = true;
                }
            }
            for c in t + 1..cols {
                let q = w.a[t][c].div_euclid(w.a[t][t]);
                w.col_axpy(c, t, q);
                if w.a[t][c] != 0 {
                    dirty = true;
                }
            }
            if dirty {
                // a smaller remainder now sits in row/column t; bring it to the pivot
                let (pr, pc) = w.min_pivot(t).expect("nonzero remainder");
                w.swap_rows(t, pr);
                w.swap_cols(t, pc);
                continue;
            }
            let p = w.a[t][t];
            let offender = (t + 1..rows)
                .flat_map(|r| (t + 1..cols).map(move |c| (r, c)))
                .find(|&(r, c)| w.a[r][c] % p != 0);
            match offender {
                Some((r, _)) => {
                    w.row_axpy(t, r, -1);
                }
                None => break,
            }
        }
        if w.a[t][t] < 0 {
            w.negate_row(t);
        }
        rank += 1;
    }
    let diag = (0..rows.min(cols)).map(|i| w.a[i][i]).collect();
    Smith {
        diag,
        rank,
        left: w.left,
        right: w.right,
    }
}

/// Generating set of the integer kernel `{x : m x = 0}` as columns.
pub fn integer_kernel(m: &IntMatrix, cols: usize) -> Vec<Vec<i128>> {
    let s = smith(m, cols);
    (s.rank..cols)
        .map(|j| (0..cols).map(|r| s.right[r][j]).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: IntMatrix, cols: usize) -> Smith {
        let s = smith(&m, cols);
        let prod = mat_mul(&mat_mul(&s.left, &m), &s.right);
        for (r, row) in prod.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                let expect = if r == c { s.diag[r] } else { 0 };
                assert_eq!(v, expect, "entry ({r},{c})");
            }
        }
        for w in s.diag[..s.rank].windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
        s
    }

    #[test]
    fn diagonal_2_3_becomes_1_6() {
        let s = check(vec![vec![2, 0], vec![0, 3]], 2);
        assert_eq!(s.diag, vec![1, 6]);
    }

    #[test]
    fn rank_deficient() {
        let s = check(vec![vec![2, 4, 6], vec![1, 2, 3]], 3);
        assert_eq!(s.rank, 1);
        assert_eq!(s.diag[0], 1);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = vec![vec![20, 0, 0, 100, 120, 0, 0], vec![0, 15, 0, 105, 0, 120, 0]];
        for k in integer_kernel(&m, 7) {
            for row in &m {
                assert_eq!(row.iter().zip(&k).map(|(a, b)| a * b).sum::<i128>(), 0);
            }
        }
    }
}
