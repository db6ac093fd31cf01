//! Smith normal form of small integer matrices, tracking the column
//! transformation so that coordinates can be moved into the diagonal basis.

/// Result of reducing a relation matrix R (rows are relations).
#[derive(Debug, Clone)]
pub struct Smith {
    /// Diagonal entries d₁ | d₂ | … (length = number of columns; zero for free rank).
    pub diag: Vec<i128>,
    /// Unimodular V with U·R·V = diag for some unimodular U.
    pub v: Vec<Vec<i128>>,
    /// V⁻¹.
    pub v_inv: Vec<Vec<i128>>,
}

fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

/// Smith normal form with column transform. `rows` may be empty.
pub fn smith(rows: &[Vec<i128>], ncols: usize) -> Smith {
    let mut m: Vec<Vec<i128>> = rows.to_vec();
    let nrows = m.len();
    let mut v = identity(ncols);
    let mut v_inv = identity(ncols);

    let swap_cols = |m: &mut Vec<Vec<i128>>, v: &mut Vec<Vec<i128>>, vi: &mut Vec<Vec<i128>>, i: usize, j: usize| {
        if i == j {
            return;
        }
        for row in m.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
        vi.swap(i, j);
    };
    // col_j += k * col_i
    let add_col = |m: &mut Vec<Vec<i128>>, v: &mut Vec<Vec<i128>>, vi: &mut Vec<Vec<i128>>, i: usize, j: usize, k: i128| {
        if k == 0 {
            return;
        }
        for row in m.iter_mut() {
            row[j] += k * row[i];
        }
        for row in v.iter_mut() {
            row[j] += k * row[i];
        }
        let rj = vi[j].clone();
        for (x, y) in vi[i].iter_mut().zip(rj) {
            *x -= k * y;
        }
    };

    let mut t = 0;
    while t < nrows.min(ncols) {
        // pivot: smallest nonzero |entry| in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for r in t..nrows {
            for c in t..ncols {
                if m[r][c] != 0 && best.is_none_or(|(br, bc)| m[r][c].abs() < m[br][bc].abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        m.swap(t, pr);
        swap_cols(&mut m, &mut v, &mut v_inv, t, pc);
        loop {
            let p = m[t][t];
            let mut dirty = false;
            // clear column t with row operations
            for r in t + 1..nrows {
                let q = m[r][t].div_euclid(p);
                if q != 0 {
                    let rt = m[t].clone();
                    for (x, y) in m[r].iter_mut().zip(rt) {
                        *x -= q * y;
                    }
                }
                if m[r][t] != 0 {
                    dirty = true;
                }
            }
            // clear row t with column operations
            for c in t + 1..ncols {
                let q = m[t][c].div_euclid(p);
                add_col(&mut m, &mut v, &mut v_inv, t, c, -q);
                if m[t][c] != 0 {
                    dirty = true;
                }
            }
            if dirty {
                // move the smallest remainder into the pivot position and repeat
                let mut best = (t, t);
                for r in t..nrows {
                    if m[r][t] != 0 && m[r][t].abs() < m[best.0][best.1].abs() {
                        best = (r, t);
                    }
                }
                for c in t..ncols {
                    if m[t][c] != 0 && m[t][c].abs() < m[best.0][best.1].abs() {
                        best = (t, c);
                    }
                }
                m.swap(t, best.0);
                swap_cols(&mut m, &mut v, &mut v_inv, t, best.1);
                continue;
            }
            // divisibility: the pivot must divide the trailing block
            let bad = (t + 1..nrows)
                .flat_map(|r| (t + 1..ncols).map(move |c| (r, c)))
                .find(|&(r, c)| m[r][c] % p != 0);
            match bad {
                Some((r, _)) => {
                    let rr = m[r].clone();
                    for (x, y) in m[t].iter_mut().zip(rr) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        if m[t][t] < 0 {
            for row in m.iter_mut() {
                row[t] = -row[t];
            }
            for row in v.iter_mut() {
                row[t] = -row[t];
            }
            for x in v_inv[t].iter_mut() {
                *x = -*x;
            }
        }
        t += 1;
    }
    let diag = (0..ncols).map(|i| if i < nrows { m[i][i] } else { 0 }).collect();
    Smith { diag, v, v_inv }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matmul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
        let n = a.len();
        let k = b.len();
        let m = b[0].len();
        (0..n)
            .map(|i| (0..m).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect())
            .collect()
    }

    #[test]
    fn cyclic_of_order_six() {
        let s = smith(&[vec![2, 0], vec![0, 3]], 2);
        assert_eq!(s.diag, vec![1, 6]);
    }

    #[test]
    fn triangular_relations() {
        let s = smith(&[vec![4, 0, 0], vec![2, 2, 0], vec![0, 0, 3]], 3);
        let prod: i128 = s.diag.iter().product();
        assert_eq!(prod, 24);
        for w in s.diag.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
    }

    proptest! {
        #[test]
        fn transform_is_unimodular_and_chain_divides(
            entries in proptest::collection::vec(-12i128..12, 9)
        ) {
            let rows: Vec<Vec<i128>> = entries.chunks(3).map(|c| c.to_vec()).collect();
            let s = smith(&rows, 3);
            prop_assert_eq!(matmul(&s.v, &s.v_inv), identity(3));
            let nz: Vec<i128> = s.diag.iter().copied().filter(|&d| d != 0).collect();
            for w in nz.windows(2) {
                prop_assert_eq!(w[1] % w[0], 0);
            }
            // R·V has rows in the lattice spanned by the diagonal basis
            let rv = matmul(&rows, &s.v);
            for row in rv {
                for (j, x) in row.iter().enumerate() {
                    let d = s.diag[j];
                    if d == 0 {
                        prop_assert!(nz.len() < 3 || *x == 0);
                    } else {
                        prop_assert_eq!(x % d, 0);
                    }
                }
            }
            // determinant is preserved up to sign
            let det = rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
                - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
                + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]);
            let prod: i128 = s.diag.iter().product();
            prop_assert_eq!(prod, det.abs());
        }
    }
}
