use num_complex::Complex64;

use super::grid::GridSpec;
use crate::error::{Error, Result};

/// Number and meaning of components carried by a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Layout {
    Scalar,
    Vector,
    /// Symmetric 3×3 tensor stored as `xx, xy, xz, yy, yz, zz`.
    SymTensor,
}

impl Layout {
    pub fn components(self) -> usize {
        match self {
            Layout::Scalar => 1,
            Layout::Vector => 3,
            Layout::SymTensor => 6,
        }
    }

    pub fn from_components(c: usize) -> Result<Self> {
        match c {
            1 => Ok(Layout::Scalar),
            3 => Ok(Layout::Vector),
            6 => Ok(Layout::SymTensor),
            _ => Err(Error::Dimension(format!("unsupported component count {c}"))),
        }
    }
}

/// Storage slot of tensor entry `(i, j)` in the symmetric layout.
#[inline]
pub const fn sym_index(i: usize, j: usize) -> usize {
    const MAP: [[usize; 3]; 3] = [[0, 1, 2], [1, 3, 4], [2, 4, 5]];
    MAP[i][j]
}

/// Expand six stored entries into a full symmetric matrix.
#[inline]
pub fn sym_to_matrix(s: &[f64; 6]) -> [[f64; 3]; 3] {
    [[s[0], s[1], s[2]], [s[1], s[3], s[4]], [s[2], s[4], s[5]]]
}

/// Samples at grid nodes, component-major, x fastest within a component.
#[derive(Clone, Debug, PartialEq)]
pub struct RealField {
    grid: GridSpec,
    layout: Layout,
    data: Vec<f64>,
}

impl RealField {
    pub fn zeros(grid: GridSpec, layout: Layout) -> Self {
        Self {
            grid,
            layout,
            data: vec![0.0; grid.points() * layout.components()],
        }
    }

    pub fn from_vec(grid: GridSpec, layout: Layout, data: Vec<f64>) -> Result<Self> {
        let expected = grid.points() * layout.components();
        if data.len() != expected {
            return Err(Error::Dimension(format!(
                "expected {expected} samples, got {}",
                data.len()
            )));
        }
        Ok(Self { grid, layout, data })
    }

    /// Sample `f(x, component)` at every node.
    pub fn from_fn(grid: GridSpec, layout: Layout, f: impl Fn([f64; 3], usize) -> f64) -> Self {
        let mut out = Self::zeros(grid, layout);
        let np = grid.points();
        for c in 0..layout.components() {
            for (idx, v) in out.data[c * np..(c + 1) * np].iter_mut().enumerate() {
                *v = f(grid.coords(idx), c);
            }
        }
        out
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn components(&self) -> usize {
        self.layout.components()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let np = self.grid.points();
        &self.data[c * np..(c + 1) * np]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let np = self.grid.points();
        &mut self.data[c * np..(c + 1) * np]
    }

    /// Value of component `c` at node `idx`.
    #[inline]
    pub fn at(&self, c: usize, idx: usize) -> f64 {
        self.data[c * self.grid.points() + idx]
    }

    /// Vector value at node `idx` (vector layout).
    #[inline]
    pub fn vec_at(&self, idx: usize) -> [f64; 3] {
        let np = self.grid.points();
        [self.data[idx], self.data[np + idx], self.data[2 * np + idx]]
    }

    /// Symmetric tensor at node `idx` as a full matrix.
    #[inline]
    pub fn tensor_at(&self, idx: usize) -> [[f64; 3]; 3] {
        let np = self.grid.points();
        let mut s = [0.0; 6];
        for (c, v) in s.iter_mut().enumerate() {
            *v = self.data[c * np + idx];
        }
        sym_to_matrix(&s)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Grid average of `f·g` summed over components.
    pub fn inner(&self, other: &RealField) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        let s: f64 = self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum();
        s / self.grid.points() as f64
    }

    pub fn add_constant(&mut self, c: f64) {
        self.data.iter_mut().for_each(|v| *v += c);
    }
}

/// Fourier coefficients of a real field in half-spectrum storage.
///
/// Per component the coefficients are laid out as `kx + (n/2+1)·(jy + n·jz)`
/// with `kx ∈ 0..=n/2` and full y/z axes. The normalisation is the mean-value
/// convention: `f(x) = Σ_k c_k e^{ik·x}`, so the zero mode is the grid mean.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    layout: Layout,
    data: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec, layout: Layout) -> Self {
        Self {
            grid,
            layout,
            data: vec![Complex64::new(0.0, 0.0); grid.spectral_len() * layout.components()],
        }
    }

    pub fn from_vec(grid: GridSpec, layout: Layout, data: Vec<Complex64>) -> Result<Self> {
        let expected = grid.spectral_len() * layout.components();
        if data.len() != expected {
            return Err(Error::Dimension(format!(
                "expected {expected} coefficients, got {}",
                data.len()
            )));
        }
        Ok(Self { grid, layout, data })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn components(&self) -> usize {
        self.layout.components()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let ns = self.grid.spectral_len();
        &self.data[c * ns..(c + 1) * ns]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let ns = self.grid.spectral_len();
        &mut self.data[c * ns..(c + 1) * ns]
    }

    /// Storage offset (within a component) of stored mode indices.
    #[inline]
    pub fn offset(&self, ix: usize, jy: usize, jz: usize) -> usize {
        ix + self.grid.nx_half() * (jy + self.grid.n() * jz)
    }

    /// Coefficient of `e^{ik·x}` for any representable wavevector, using
    /// conjugate symmetry for `kx < 0`.
    pub fn coefficient(&self, c: usize, k: [i64; 3]) -> Complex64 {
        let g = self.grid;
        let (k, conj) = if k[0] < 0 { ([-k[0], -k[1], -k[2]], true) } else { (k, false) };
        let (Some(jy), Some(jz)) = (g.index_of(k[1]), g.index_of(k[2])) else {
            return Complex64::new(0.0, 0.0);
        };
        if k[0] > g.nyquist() {
            return Complex64::new(0.0, 0.0);
        }
        let v = self.component(c)[self.offset(k[0] as usize, jy, jz)];
        if conj {
            v.conj()
        } else {
            v
        }
    }

    /// Mutable access to the stored coefficient for `kx ≥ 0`.
    pub fn coefficient_mut(&mut self, c: usize, k: [i64; 3]) -> Option<&mut Complex64> {
        let g = self.grid;
        if k[0] < 0 || k[0] > g.nyquist() {
            return None;
        }
        let jy = g.index_of(k[1])?;
        let jz = g.index_of(k[2])?;
        let off = self.offset(k[0] as usize, jy, jz);
        Some(&mut self.component_mut(c)[off])
    }

    /// Visit every stored mode as `(offset, [kx, ky, kz])`.
    pub fn for_each_mode(grid: GridSpec, mut f: impl FnMut(usize, [i64; 3])) {
        let nh = grid.nx_half();
        let n = grid.n();
        for jz in 0..n {
            let kz = grid.wavenumber(jz);
            for jy in 0..n {
                let ky = grid.wavenumber(jy);
                let base = nh * (jy + n * jz);
                for ix in 0..nh {
                    f(base + ix, [ix as i64, ky, kz]);
                }
            }
        }
    }

    /// Weight of a stored `kx` plane in full-spectrum sums.
    #[inline]
    pub fn hermitian_weight(grid: GridSpec, kx: i64) -> f64 {
        if kx == 0 || kx == grid.nyquist() {
            1.0
        } else {
            2.0
        }
    }

    /// Full-spectrum sum of `|c_k|²` over all components; by Parseval this
    /// is the grid average of `|f|²`.
    pub fn mean_square(&self) -> f64 {
        let g = self.grid;
        let ns = g.spectral_len();
        let nh = g.nx_half();
        let mut total = 0.0;
        for c in 0..self.components() {
            let comp = &self.data[c * ns..(c + 1) * ns];
            for (off, v) in comp.iter().enumerate() {
                total += Self::hermitian_weight(g, (off % nh) as i64) * v.norm_sqr();
            }
        }
        total
    }

    /// Full-spectrum inner product `Σ_k conj(a_k) b_k`, real part.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        let g = self.grid;
        let nh = g.nx_half();
        let ns = g.spectral_len();
        self.data
            .iter()
            .zip(&other.data)
            .enumerate()
            .map(|(i, (a, b))| {
                Self::hermitian_weight(g, ((i % ns) % nh) as i64) * (a.conj() * b).re
            })
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|v| *v *= s);
    }

    /// `self += s·other`.
    pub fn axpy(&mut self, s: f64, other: &SpectralField) {
        assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn check_same_shape(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid || self.layout != other.layout {
            return Err(Error::Dimension(format!(
                "fields differ: n={} {:?} vs n={} {:?}",
                self.grid.n(),
                self.layout,
                other.grid.n(),
                other.layout
            )));
        }
        Ok(())
    }
}
