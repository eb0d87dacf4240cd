//! Matrix-unit combinations and sparse square blocks with generic coefficients.

use std::collections::BTreeMap;

use crate::diagram::MatrixUnit;
use crate::error::{Result, TafError};
use crate::scalar::Scalar;

/// A finite linear combination `sum c_u u` of matrix units of one level.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitCombination<T> {
    pub terms: Vec<(MatrixUnit, T)>,
}

impl<T: Scalar> UnitCombination<T> {
    pub fn new(terms: Vec<(MatrixUnit, T)>) -> Self {
        Self { terms }
    }

    pub fn unit(u: MatrixUnit) -> Self {
        Self { terms: vec![(u, T::one())] }
    }

    /// The common level of all terms; `None` for the empty combination.
    pub fn level(&self) -> Result<Option<usize>> {
        let mut level = None;
        for (u, _) in &self.terms {
            match level {
                None => level = Some(u.level),
                Some(l) if l != u.level => return Err(TafError::MixedLevels),
                _ => {}
            }
        }
        Ok(level)
    }
}

/// A square matrix stored by its nonzero entries (1-based positions).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    dim: usize,
    entries: BTreeMap<(usize, usize), T>,
}

impl<T: Scalar> SparseMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.entries.get(&(row, col)).cloned().unwrap_or_else(T::zero)
    }

    pub fn add(&mut self, row: usize, col: usize, value: T) {
        debug_assert!(row >= 1 && col >= 1 && row <= self.dim && col <= self.dim);
        let slot = self.entries.entry((row, col)).or_insert_with(T::zero);
        *slot = slot.clone() + value;
        if slot.is_zero() {
            self.entries.remove(&(row, col));
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &T)> {
        self.entries.iter()
    }

    pub fn support(&self) -> Vec<(usize, usize)> {
        self.entries.keys().copied().collect()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut by_row: BTreeMap<usize, Vec<(usize, &T)>> = BTreeMap::new();
        for (&(r, c), v) in &other.entries {
            by_row.entry(r).or_default().push((c, v));
        }
        let mut out = Self::zeros(self.dim);
        for (&(r, k), a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(c, b) in row {
                    out.add(r, c, a.clone() * b.clone());
                }
            }
        }
        out
    }

    /// All entries equal to one, at most one per row and per column.
    pub fn is_partial_permutation(&self) -> bool {
        let mut rows = vec![false; self.dim + 1];
        let mut cols = vec![false; self.dim + 1];
        for (&(r, c), v) in &self.entries {
            if !v.is_one() || rows[r] || cols[c] {
                return false;
            }
            rows[r] = true;
            cols[c] = true;
        }
        true
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.entries.keys().all(|&(r, c)| r <= c)
    }
}
