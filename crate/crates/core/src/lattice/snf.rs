//! Smith normal form over ℤ with the unimodular transforms kept.
//!
//! For a square integer matrix `A` this finds unimodular `U`, `V` with
//! `U · A · V = diag(d_1, …, d_n)` and `d_i | d_{i+1}`.

#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: Vec<i64>,
    pub left: Vec<Vec<i64>>,
    pub right: Vec<Vec<i64>>,
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn smith_normal_form(matrix: &[Vec<i64>]) -> SmithForm {
    let n = matrix.len();
    let mut a: Vec<Vec<i64>> = matrix.to_vec();
    let mut u = identity(n);
    let mut v = identity(n);

    for t in 0..n {
        loop {
            // pivot: smallest nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[i][j] != 0
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break;
            };
            a.swap(t, pi);
            u.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }

            let mut dirty = false;
            for i in t + 1..n {
                let q = a[i][t].div_euclid(a[t][t]);
                if q != 0 {
                    row_sub(&mut a, i, t, q);
                    row_sub(&mut u, i, t, q);
                }
                if a[i][t] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..n {
                let q = a[t][j].div_euclid(a[t][t]);
                if q != 0 {
                    col_sub(&mut a, j, t, q);
                    col_sub(&mut v, j, t, q);
                }
                if a[t][j] != 0 {
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // pivot must divide the whole trailing block
            let p = a[t][t];
            let offender = (t + 1..n).find(|&i| (t + 1..n).any(|j| a[i][j] % p != 0));
            match offender {
                Some(i) => {
                    // fold row i into row t and retry
                    row_sub(&mut a, t, i, -1);
                    row_sub(&mut u, t, i, -1);
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for x in a[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
    }
    let diagonal = (0..n).map(|i| a[i][i]).collect();
    SmithForm {
        diagonal,
        left: u,
        right: v,
    }
}

/// row_i -= q * row_j
fn row_sub(m: &mut [Vec<i64>], i: usize, j: usize, q: i64) {
    let (ri, rj) = if i < j {
        let (lo, hi) = m.split_at_mut(j);
        (&mut lo[i], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(i);
        (&mut hi[0], &lo[j])
    };
    for (x, y) in ri.iter_mut().zip(rj.iter()) {
        *x -= q * y;
    }
}

/// col_i -= q * col_j
fn col_sub(m: &mut [Vec<i64>], i: usize, j: usize, q: i64) {
    for row in m.iter_mut() {
        row[i] -= q * row[j];
    }
}

pub fn mat_mul_int(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &[Vec<i64>]) -> Vec<i64> {
        let s = smith_normal_form(m);
        let d = mat_mul_int(&mat_mul_int(&s.left, m), &s.right);
        for (i, row) in d.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if i == j {
                    assert_eq!(x, s.diagonal[i]);
                } else {
                    assert_eq!(x, 0, "off-diagonal entry survived");
                }
            }
        }
        for w in s.diagonal.windows(2) {
            assert!(w[0] != 0 && w[1] % w[0] == 0, "divisibility chain broken: {:?}", s.diagonal);
        }
        s.diagonal
    }

    #[test]
    fn a2_has_single_factor_three() {
        assert_eq!(check(&[vec![2, -1], vec![-1, 2]]), vec![1, 3]);
        assert_eq!(check(&[vec![2, 1], vec![1, 2]]), vec![1, 3]);
    }

    #[test]
    fn divisibility_is_enforced() {
        assert_eq!(check(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
        assert_eq!(check(&[vec![4, 0, 0], vec![0, 6, 0], vec![0, 0, 10]]), vec![2, 2, 60]);
    }
}
