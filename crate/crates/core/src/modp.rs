//! Dense linear algebra over prime fields `F_p`.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("{0} is not a prime")]
pub struct NotPrime(pub u64);

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Primes are kept below 2³¹ so products fit in `u64`.
pub fn check_prime(p: u64) -> Result<u64, NotPrime> {
    if is_prime(p) && p < (1 << 31) {
        Ok(p)
    } else {
        Err(NotPrime(p))
    }
}

pub fn reduce_i64(x: i64, p: u64) -> u32 {
    x.rem_euclid(p as i64) as u32
}

pub fn inv_mod(a: u32, p: u64) -> u32 {
    debug_assert!(a as u64 % p != 0);
    // Fermat: a^(p-2)
    pow_mod(a as u64, p - 2, p) as u32
}

pub fn pow_mod(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Row-echelon basis of a subspace of `F_p^ncols`, built incrementally.
///
/// Each row's pivot is its first non-zero column, normalized to 1; at most
/// one row per pivot column.
#[derive(Debug, Clone)]
pub struct Echelon {
    p: u64,
    ncols: usize,
    rows: Vec<Vec<u32>>,
    pivot_row: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(p: u64, ncols: usize) -> Self {
        Echelon { p, ncols, rows: Vec::new(), pivot_row: vec![None; ncols] }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_row.iter().enumerate().filter_map(|(c, r)| r.map(|_| c))
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row[col].is_some()
    }

    fn eliminate(&self, v: &mut [u32], col: usize, row: usize) {
        let p = self.p;
        let f = (p - v[col] as u64) % p;
        let r = &self.rows[row];
        for j in col..self.ncols {
            if r[j] != 0 {
                v[j] = ((v[j] as u64 + f * r[j] as u64) % p) as u32;
            }
        }
    }

    /// Reduces `v` in place against every pivot; the result has zeros in all
    /// pivot columns and is zero iff `v` lay in the span.
    pub fn reduce(&self, v: &mut [u32]) {
        for c in 0..self.ncols {
            if v[c] != 0 {
                if let Some(r) = self.pivot_row[c] {
                    self.eliminate(v, c, r);
                }
            }
        }
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut v = v.to_vec();
        for c in 0..self.ncols {
            if v[c] != 0 {
                match self.pivot_row[c] {
                    Some(r) => self.eliminate(&mut v, c, r),
                    None => return false,
                }
            }
        }
        true
    }

    /// Whether `v` lies in the span modulo the coordinates `limit..`.
    ///
    /// Since pivots are leading columns, the rows with pivot below `limit`
    /// project to a basis of the image of the span in the first `limit`
    /// coordinates.
    pub fn contains_truncated(&self, v: &[u32], limit: usize) -> bool {
        let mut v = v.to_vec();
        for c in 0..limit.min(self.ncols) {
            if v[c] != 0 {
                match self.pivot_row[c] {
                    Some(r) => self.eliminate(&mut v, c, r),
                    None => return false,
                }
            }
        }
        true
    }

    /// Adds `v` to the span; returns `false` if it was already there.
    pub fn insert(&mut self, mut v: Vec<u32>) -> bool {
        debug_assert_eq!(v.len(), self.ncols);
        for c in 0..self.ncols {
            if v[c] == 0 {
                continue;
            }
            match self.pivot_row[c] {
                Some(r) => self.eliminate(&mut v, c, r),
                None => {
                    let inv = inv_mod(v[c], self.p) as u64;
                    for x in v[c..].iter_mut() {
                        *x = (*x as u64 * inv % self.p) as u32;
                    }
                    self.pivot_row[c] = Some(self.rows.len());
                    self.rows.push(v);
                    return true;
                }
            }
        }
        false
    }

    /// Back-substitutes so every pivot column is zero outside its own row.
    pub fn into_reduced(mut self) -> Self {
        let order: Vec<(usize, usize)> =
            self.pivot_row.iter().enumerate().filter_map(|(c, r)| r.map(|r| (c, r))).collect();
        for &(c, r) in order.iter().rev() {
            let pivot = self.rows[r].clone();
            for (i, row) in self.rows.iter_mut().enumerate() {
                if i != r && row[c] != 0 {
                    let f = (self.p - row[c] as u64) % self.p;
                    for j in c..self.ncols {
                        if pivot[j] != 0 {
                            row[j] = ((row[j] as u64 + f * pivot[j] as u64) % self.p) as u32;
                        }
                    }
                }
            }
        }
        self
    }

    pub fn row_with_pivot(&self, col: usize) -> Option<&[u32]> {
        self.pivot_row[col].map(|r| self.rows[r].as_slice())
    }
}

/// Rank over `F_p` of an integer matrix given by rows.
pub fn rank_mod_p(rows: &[Vec<i64>], ncols: usize, p: u64) -> usize {
    let mut e = Echelon::new(p, ncols);
    for r in rows {
        e.insert(r.iter().map(|&x| reduce_i64(x, p)).collect());
    }
    e.rank()
}
