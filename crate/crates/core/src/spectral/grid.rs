use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform grid with `n` points per axis on the periodic cube `[0, 2π)³`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    n: usize,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "grid size must be even and at least 8, got {n}"
            )));
        }
        Ok(Self { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Grid spacing `2π / n`.
    #[inline]
    pub fn h(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Number of physical samples per component.
    #[inline]
    pub fn points(&self) -> usize {
        self.n * self.n * self.n
    }

    /// Number of stored wavenumbers on the halved (x) axis.
    #[inline]
    pub fn nx_half(&self) -> usize {
        self.n / 2 + 1
    }

    /// Number of stored complex coefficients per component.
    #[inline]
    pub fn spectral_len(&self) -> usize {
        self.nx_half() * self.n * self.n
    }

    /// Largest wavenumber retained by the 2/3 rule.
    #[inline]
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    #[inline]
    pub fn nyquist(&self) -> i64 {
        (self.n / 2) as i64
    }

    /// Signed wavenumber of storage index `j` on a full (y or z) axis.
    /// Wavenumbers run over `-n/2+1 ..= n/2`.
    #[inline]
    pub fn wavenumber(&self, j: usize) -> i64 {
        if j <= self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Storage index on a full axis for a signed wavenumber, if representable.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let half = self.nyquist();
        if k > half || k <= -half {
            return None;
        }
        Some(if k >= 0 { k as usize } else { (k + self.n as i64) as usize })
    }

    /// Linear index of node `(i, j, k)`, x fastest.
    #[inline]
    pub fn node(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n * (j + self.n * k)
    }

    /// Physical coordinates of linear node index `idx`.
    #[inline]
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let n = self.n;
        let h = self.h();
        [
            (idx % n) as f64 * h,
            ((idx / n) % n) as f64 * h,
            (idx / (n * n)) as f64 * h,
        ]
    }

    /// Wavevector table for the three storage axes: x (halved), y, z.
    pub fn wavenumber_tables(&self) -> (Vec<f64>, Vec<f64>) {
        let kx = (0..self.nx_half()).map(|i| i as f64).collect();
        let kf = (0..self.n).map(|j| self.wavenumber(j) as f64).collect();
        (kx, kf)
    }
}
