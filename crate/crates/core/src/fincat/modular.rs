//! Dense matrices over the prime field ℤ/q.

use serde::{Deserialize, Serialize};

/// Row-major matrix with entries in `0..q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<u32>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count does not match shape");
        Matrix { rows, cols, entries }
    }

    pub fn from_rows(rows: usize, cols: usize, data: &[Vec<u32>]) -> Option<Self> {
        if data.len() != rows || data.iter().any(|r| r.len() != cols) {
            return None;
        }
        Some(Matrix { rows, cols, entries: data.iter().flatten().copied().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn mul(&self, other: &Matrix, q: u32) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let q64 = q as u64;
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.entries[idx] = ((out.entries[idx] as u64 + a * other.get(k, j) as u64) % q64) as u32;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[u32], q: u32) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let s: u64 = self.row(r).iter().zip(v).map(|(&a, &b)| a as u64 * b as u64).sum();
                (s % q as u64) as u32
            })
            .collect()
    }

    /// Horizontal concatenation `[a | b | ...]`; all blocks share a row count.
    pub fn hconcat(rows: usize, blocks: &[&Matrix]) -> Matrix {
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, rows);
            for r in 0..rows {
                for c in 0..b.cols {
                    out.set(r, off + c, b.get(r, c));
                }
            }
            off += b.cols;
        }
        out
    }

    pub fn inverse(&self, q: u32) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug: Vec<Vec<u32>> = (0..n)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.extend((0..n).map(|c| u32::from(c == r)));
                row
            })
            .collect();
        let pivots = rref_in_place(&mut aug, n, q);
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        let data: Vec<Vec<u32>> = aug.into_iter().map(|r| r[n..].to_vec()).collect();
        Matrix::from_rows(n, n, &data)
    }

    /// A matrix `s` with `self · s = id`, when `self` has full row rank.
    pub fn right_inverse(&self, q: u32) -> Option<Matrix> {
        let (r, n) = (self.rows, self.cols);
        let mut aug: Vec<Vec<u32>> = (0..r)
            .map(|i| {
                let mut row = self.row(i).to_vec();
                row.extend((0..r).map(|c| u32::from(c == i)));
                row
            })
            .collect();
        let pivots = rref_in_place(&mut aug, n, q);
        if pivots.len() != r {
            return None;
        }
        // aug = [P·self | P] with P·self in reduced form; s0 picks pivot columns.
        let mut s0 = Matrix::zeros(n, r);
        for (i, &p) in pivots.iter().enumerate() {
            s0.set(p, i, 1);
        }
        let p_rows: Vec<Vec<u32>> = aug.iter().map(|row| row[n..].to_vec()).collect();
        let p = Matrix::from_rows(r, r, &p_rows)?;
        Some(s0.mul(&p, q))
    }
}

pub fn inv_mod(a: u32, q: u32) -> u32 {
    pow_mod(a as u64, q as u64 - 2, q as u64) as u32
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

pub fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= q as u64 {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Reduced row echelon form over ℤ/q, pivoting only in the first `ncols`
/// columns. Zero rows are dropped. Returns the pivot column of each row.
pub fn rref_in_place(rows: &mut Vec<Vec<u32>>, ncols: usize, q: u32) -> Vec<usize> {
    let q64 = q as u64;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(found) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, found);
        let inv = inv_mod(rows[r][c], q) as u64;
        for x in rows[r].iter_mut() {
            *x = ((*x as u64 * inv) % q64) as u32;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let factor = row[c] as u64;
            for (x, &p) in row.iter_mut().zip(&pivot_row) {
                *x = ((*x as u64 + q64 - (factor * p as u64) % q64) % q64) as u32;
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

/// Canonical quotient of ℤ/q^n by the span of `relations`: the projection
/// onto the non-pivot coordinates, and the section picking those coordinates.
pub fn quotient_basis(n: usize, relations: Vec<Vec<u32>>, q: u32) -> (Matrix, Matrix) {
    let mut rows = relations;
    let pivots = rref_in_place(&mut rows, n, q);
    let mut pivot_row = vec![None; n];
    for (i, &p) in pivots.iter().enumerate() {
        pivot_row[p] = Some(i);
    }
    let free: Vec<usize> = (0..n).filter(|&c| pivot_row[c].is_none()).collect();
    let mut free_index = vec![usize::MAX; n];
    for (k, &c) in free.iter().enumerate() {
        free_index[c] = k;
    }
    let m = free.len();
    let mut projection = Matrix::zeros(m, n);
    for j in 0..n {
        match pivot_row[j] {
            Some(r) => {
                for (k, &c) in free.iter().enumerate() {
                    let v = rows[r][c];
                    projection.set(k, j, (q - v) % q);
                }
            }
            None => projection.set(free_index[j], j, 1),
        }
    }
    let mut section = Matrix::zeros(n, m);
    for (k, &c) in free.iter().enumerate() {
        section.set(c, k, 1);
    }
    (projection, section)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let m = Matrix::from_rows(2, 2, &[vec![1, 2], vec![3, 4]]).unwrap();
        let inv = m.inverse(5).unwrap();
        assert_eq!(m.mul(&inv, 5), Matrix::identity(2));
        let singular = Matrix::from_rows(2, 2, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert!(singular.inverse(5).is_none());
    }

    #[test]
    fn right_inverse_of_projection() {
        let m = Matrix::from_rows(2, 3, &[vec![1, 1, 0], vec![0, 2, 1]]).unwrap();
        let s = m.right_inverse(3).unwrap();
        assert_eq!(m.mul(&s, 3), Matrix::identity(2));
    }

    #[test]
    fn quotient_kills_relations() {
        let rel = vec![vec![1, 4, 0], vec![0, 1, 1]];
        let (p, s) = quotient_basis(3, rel.clone(), 5);
        assert_eq!(p.rows(), 1);
        for r in rel {
            assert!(p.apply(&r, 5).iter().all(|&x| x == 0));
        }
        assert_eq!(p.mul(&s, 5), Matrix::identity(1));
    }

    #[test]
    fn primes() {
        let ps: Vec<u32> = (0..20).filter(|&q| is_prime(q)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }
}
