//! Dense Gaussian elimination over a finite field.

use crate::gf::{FieldElement, FieldParams};

pub type Matrix = Vec<Vec<FieldElement>>;

/// Reduces `rows` to reduced row echelon form in place and returns the pivot columns.
/// Zero rows are removed.
pub fn rref(field: &FieldParams, rows: &mut Matrix) -> Vec<usize> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(found) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, found);
        let inv = field.inv(rows[r][c]).expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = field.sub(*x, field.mul(factor, y));
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank(field: &FieldParams, rows: &Matrix) -> usize {
    let mut m = rows.clone();
    rref(field, &mut m).len()
}

/// Determinant by elimination.
pub fn determinant(field: &FieldParams, square: &Matrix) -> FieldElement {
    let n = square.len();
    let mut m = square.clone();
    let mut det = FieldElement::ONE;
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return FieldElement::ZERO;
        };
        if p != c {
            m.swap(p, c);
            det = field.neg(det);
        }
        det = field.mul(det, m[c][c]);
        let inv = field.inv(m[c][c]).expect("nonzero");
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let factor = field.mul(m[i][c], inv);
            for j in c..n {
                let sub = field.mul(factor, m[c][j]);
                m[i][j] = field.sub(m[i][j], sub);
            }
        }
    }
    det
}

/// Determinant by the Leibniz permutation expansion.
pub fn determinant_leibniz(field: &FieldParams, square: &Matrix) -> FieldElement {
    let n = square.len();
    let mut acc = FieldElement::ZERO;
    for (perm, sign) in permutations(n) {
        let mut term = FieldElement::ONE;
        for (row, &col) in perm.iter().enumerate() {
            term = field.mul(term, square[row][col]);
            if term.is_zero() {
                break;
            }
        }
        acc = if sign { field.add(acc, term) } else { field.sub(acc, term) };
    }
    acc
}

/// All permutations of `0..n` with their sign (`true` for even), in Heap's order.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut even = true;
    out.push((perm.clone(), even));
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            even = !even;
            out.push((perm.clone(), even));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::prime_field;

    fn m(field: &FieldParams, rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&v| field.from_int(v)).collect()).collect()
    }

    #[test]
    fn rank_and_rref() {
        let f = prime_field(5).unwrap();
        let a = m(&f, &[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(rank(&f, &a), 2);
        let mut b = a.clone();
        assert_eq!(rref(&f, &mut b), vec![0, 1]);
        assert_eq!(b, m(&f, &[&[1, 0, 1], &[0, 1, 1]]));
    }

    #[test]
    fn determinants_agree() {
        let f = prime_field(7).unwrap();
        let a = m(&f, &[&[1, 2, 3], &[4, 5, 6], &[0, 1, 5]]);
        // 1(25-6) - 2(20-0) + 3(4-0) = -9 = 5 mod 7
        assert_eq!(determinant(&f, &a), f.from_int(-9));
        assert_eq!(determinant_leibniz(&f, &a), f.from_int(-9));
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(4).iter().filter(|(_, e)| *e).count(), 12);
        assert_eq!(subsets(5, 2).len(), 10);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
    }
}
