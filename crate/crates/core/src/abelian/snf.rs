//! Smith normal form over `ℤ` with arbitrary-precision entries.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A dense rectangular integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds a matrix from rows; every row must have `cols` entries.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged row {i}");
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|j| v.iter().enumerate().map(|(i, x)| x * self.get(i, j)).sum())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        for j in 0..self.cols {
            let s = self.get(src, j);
            if !s.is_zero() {
                let v = self.get(dst, j) + f * s;
                self.set(dst, j, v);
            }
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        for i in 0..self.rows {
            let s = self.get(i, src);
            if !s.is_zero() {
                let v = self.get(i, dst) + f * s;
                self.set(i, dst, v);
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }
}

impl fmt::Display for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Unimodular `P`, `Q` with `P · M · Q` diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfTransforms {
    pub left: IntMat,
    pub right: IntMat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    /// Non-zero diagonal entries `d₁ | d₂ | …`, units included.
    pub factors: Vec<BigInt>,
    /// Columns of the input; the cokernel is `ℤ^cols / row space`.
    pub cols: usize,
    pub transforms: Option<SnfTransforms>,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn cokernel_free_rank(&self) -> usize {
        self.cols - self.factors.len()
    }

    /// Factors greater than 1.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

pub fn snf(m: &IntMat) -> SnfResult {
    run(m, false)
}

pub fn snf_with_transforms(m: &IntMat) -> SnfResult {
    run(m, true)
}

fn run(m: &IntMat, track: bool) -> SnfResult {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut p = if track { IntMat::identity(rows) } else { IntMat::zeros(0, 0) };
    let mut q = if track { IntMat::identity(cols) } else { IntMat::zeros(0, 0) };
    let mut factors = Vec::new();

    let mut t = 0;
    while t < rows.min(cols) {
        // smallest non-zero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = a.get(i, j);
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap_rows(t, bi);
        a.swap_cols(t, bj);
        if track {
            p.swap_rows(t, bi);
            q.swap_cols(t, bj);
        }

        loop {
            let piv = a.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..rows {
                if !a.get(i, t).is_zero() {
                    let f = -a.get(i, t).div_floor(&piv);
                    a.add_row(i, t, &f);
                    if track {
                        p.add_row(i, t, &f);
                    }
                    clean &= a.get(i, t).is_zero();
                }
            }
            for j in t + 1..cols {
                if !a.get(t, j).is_zero() {
                    let f = -a.get(t, j).div_floor(&piv);
                    a.add_col(j, t, &f);
                    if track {
                        q.add_col(j, t, &f);
                    }
                    clean &= a.get(t, j).is_zero();
                }
            }
            if clean {
                let bad = (t + 1..rows)
                    .find(|&i| (t + 1..cols).any(|j| !a.get(i, j).is_multiple_of(&piv)));
                match bad {
                    Some(i) => {
                        a.add_row(t, i, &BigInt::one());
                        if track {
                            p.add_row(t, i, &BigInt::one());
                        }
                    }
                    None => break,
                }
                continue;
            }
            // move the smallest remaining entry of row/column t to the pivot
            let mut best = (t, t);
            for i in t + 1..rows {
                if !a.get(i, t).is_zero() && a.get(i, t).abs() < a.get(best.0, best.1).abs() {
                    best = (i, t);
                }
            }
            for j in t + 1..cols {
                if !a.get(t, j).is_zero() && a.get(t, j).abs() < a.get(best.0, best.1).abs() {
                    best = (t, j);
                }
            }
            a.swap_rows(t, best.0);
            a.swap_cols(t, best.1);
            if track {
                p.swap_rows(t, best.0);
                q.swap_cols(t, best.1);
            }
        }

        if a.get(t, t).is_negative() {
            a.negate_row(t);
            if track {
                p.negate_row(t);
            }
        }
        factors.push(a.get(t, t).clone());
        t += 1;
    }

    let transforms = track.then_some(SnfTransforms { left: p, right: q });
    SnfResult { factors, cols, transforms }
}
