//! Off-grid evaluation of spectral and grid fields.

use std::borrow::Cow;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pressure::PressurePack;
use crate::solver::GridVelocity;
use crate::spectral::{sym_index, GridSpec, Layout, RealField, SpectralField};

pub type Mat3 = [[f64; 3]; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sampling {
    /// Trilinear interpolation of grid samples.
    Trilinear,
    /// Direct evaluation of the band-limited Fourier series.
    Fourier,
}

impl Sampling {
    pub fn as_str(self) -> &'static str {
        match self {
            Sampling::Trilinear => "trilinear",
            Sampling::Fourier => "fourier",
        }
    }
}

impl fmt::Display for Sampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trilinear" => Ok(Sampling::Trilinear),
            "fourier" => Ok(Sampling::Fourier),
            other => Err(Error::Config(format!(
                "unknown sampling mode {other:?} (expected trilinear or fourier)"
            ))),
        }
    }
}

/// Value, gradient and Hessian of one scalar at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ScalarJet {
    pub value: f64,
    pub grad: [f64; 3],
    pub hess: Mat3,
}

/// Periodic trilinear stencil around a point.
#[derive(Clone, Copy, Debug)]
pub struct Stencil {
    idx: [usize; 8],
    w: [f64; 8],
}

impl Stencil {
    pub fn new(grid: GridSpec, x: [f64; 3]) -> Self {
        let n = grid.n();
        let h = grid.h();
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for a in 0..3 {
            let s = x[a].rem_euclid(2.0 * PI) / h;
            let nearest = s.round();
            // Points within round-off of a node take the nodal value.
            let (i, f) = if (s - nearest).abs() <= 1e-12 * nearest.max(1.0) {
                (nearest, 0.0)
            } else {
                (s.floor(), s - s.floor())
            };
            frac[a] = f;
            base[a] = (i as usize) % n;
        }
        let mut idx = [0usize; 8];
        let mut w = [0.0; 8];
        for corner in 0..8 {
            let mut ijk = [0usize; 3];
            let mut weight = 1.0;
            for a in 0..3 {
                let up = (corner >> a) & 1 == 1;
                ijk[a] = if up { (base[a] + 1) % n } else { base[a] };
                weight *= if up { frac[a] } else { 1.0 - frac[a] };
            }
            idx[corner] = grid.node(ijk[0], ijk[1], ijk[2]);
            w[corner] = weight;
        }
        Self { idx, w }
    }

    #[inline]
    pub fn apply(&self, f: &RealField, comp: usize) -> f64 {
        let data = f.component(comp);
        self.idx.iter().zip(&self.w).map(|(&i, &w)| w * data[i]).sum()
    }
}

pub fn trilinear(f: &RealField, comp: usize, x: [f64; 3]) -> f64 {
    Stencil::new(f.grid(), x).apply(f, comp)
}

/// Fourier coefficients restricted to the occupied band, stored with the
/// half-spectrum weights folded in.
#[derive(Clone, Debug)]
pub struct FourierField {
    grid: GridSpec,
    components: usize,
    kx: Vec<i64>,
    ky: Vec<i64>,
    kz: Vec<i64>,
    coeffs: Vec<Complex64>,
}

impl FourierField {
    pub fn new(f: &SpectralField) -> Self {
        let grid = f.grid();
        let (mut bx, mut by, mut bz) = (0i64, 0i64, 0i64);
        for c in 0..f.components() {
            let data = f.component(c);
            SpectralField::for_each_mode(grid, |off, k| {
                if data[off] != Complex64::new(0.0, 0.0) {
                    bx = bx.max(k[0]);
                    by = by.max(k[1].abs());
                    bz = bz.max(k[2].abs());
                }
            });
        }
        let band = |b: i64| -> Vec<i64> {
            (0..grid.n())
                .map(|j| grid.wavenumber(j))
                .filter(|k| k.abs() <= b)
                .collect()
        };
        let kx: Vec<i64> = (0..=bx).collect();
        let (ky, kz) = (band(by), band(bz));
        let mut coeffs = Vec::with_capacity(f.components() * kx.len() * ky.len() * kz.len());
        for c in 0..f.components() {
            for &z in &kz {
                for &y in &ky {
                    for &x in &kx {
                        let w = SpectralField::hermitian_weight(grid, x);
                        coeffs.push(f.coefficient(c, [x, y, z]) * w);
                    }
                }
            }
        }
        Self {
            grid,
            components: f.components(),
            kx,
            ky,
            kz,
            coeffs,
        }
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// Wavenumber used for differentiation; Nyquist modes have none.
    fn dk(&self, k: i64) -> f64 {
        if k.abs() == self.grid.nyquist() {
            0.0
        } else {
            k as f64
        }
    }

    /// Jets of every component at `x`; second derivatives only when
    /// `hessian` is set.
    pub fn jets(&self, x: [f64; 3], hessian: bool) -> Vec<ScalarJet> {
        let i = Complex64::i();
        let cis = |k: i64, s: f64| {
            let (sn, cs) = (k as f64 * s).sin_cos();
            Complex64::new(cs, sn)
        };
        let ex: Vec<Complex64> = self.kx.iter().map(|&k| cis(k, x[0])).collect();
        let exd: Vec<Complex64> = self
            .kx
            .iter()
            .zip(&ex)
            .map(|(&k, e)| i * self.dk(k) * e)
            .collect();
        let exdd: Vec<Complex64> = self
            .kx
            .iter()
            .zip(&ex)
            .map(|(&k, e)| -self.dk(k) * self.dk(k) * e)
            .collect();
        let ey: Vec<Complex64> = self.ky.iter().map(|&k| cis(k, x[1])).collect();
        let ez: Vec<Complex64> = self.kz.iter().map(|&k| cis(k, x[2])).collect();
        let (nx, ny) = (self.kx.len(), self.ky.len());
        let per_comp = nx * ny * self.kz.len();
        let zero = Complex64::new(0.0, 0.0);

        let mut out = Vec::with_capacity(self.components);
        for c in 0..self.components {
            let block = &self.coeffs[c * per_comp..(c + 1) * per_comp];
            let mut jet = [zero; 10];
            for (iz, &kz) in self.kz.iter().enumerate() {
                // y-sums of the x-row sums: value, x, y, xy, yy, xx.
                let mut ys = [zero; 6];
                for (iy, &ky) in self.ky.iter().enumerate() {
                    let row = &block[(iz * ny + iy) * nx..(iz * ny + iy + 1) * nx];
                    let mut a0 = zero;
                    let mut a1 = zero;
                    let mut a2 = zero;
                    for (j, r) in row.iter().enumerate() {
                        a0 += r * ex[j];
                        a1 += r * exd[j];
                        if hessian {
                            a2 += r * exdd[j];
                        }
                    }
                    let e = ey[iy];
                    let dy = i * self.dk(ky);
                    ys[0] += e * a0;
                    ys[1] += e * a1;
                    ys[2] += e * dy * a0;
                    if hessian {
                        ys[3] += e * dy * a1;
                        ys[4] += e * dy * dy * a0;
                        ys[5] += e * a2;
                    }
                }
                let e = ez[iz];
                let dz = i * self.dk(kz);
                jet[0] += e * ys[0];
                jet[1] += e * ys[1];
                jet[2] += e * ys[2];
                jet[3] += e * dz * ys[0];
                if hessian {
                    jet[4] += e * ys[5];
                    jet[5] += e * ys[3];
                    jet[6] += e * dz * ys[1];
                    jet[7] += e * ys[4];
                    jet[8] += e * dz * ys[2];
                    jet[9] += e * dz * dz * ys[0];
                }
            }
            let [v, dx, dy, dz, xx, xy, xz, yy, yz, zz] = jet.map(|z| z.re);
            out.push(ScalarJet {
                value: v,
                grad: [dx, dy, dz],
                hess: [[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]],
            });
        }
        out
    }

    pub fn value(&self, x: [f64; 3], comp: usize) -> f64 {
        self.jets(x, false)[comp].value
    }
}

/// Velocity and `grad[i][j] = ∂u_i/∂x_j` at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct VelocityJet {
    pub u: [f64; 3],
    pub grad: Mat3,
}

impl VelocityJet {
    pub fn vorticity(&self) -> [f64; 3] {
        let g = &self.grad;
        [g[2][1] - g[1][2], g[0][2] - g[2][0], g[1][0] - g[0][1]]
    }
}

/// Pressure gradient and Hessian at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PressureJet {
    pub grad: [f64; 3],
    pub hess: Mat3,
}

pub enum VelocitySampler<'a> {
    Trilinear(Cow<'a, GridVelocity>),
    Fourier(FourierField),
}

impl<'a> VelocitySampler<'a> {
    /// Sampler over `u_hat`; trilinear mode reuses `grid` when given and
    /// builds the grid fields otherwise.
    pub fn new(mode: Sampling, u_hat: &SpectralField, grid: Option<&'a GridVelocity>) -> Result<Self> {
        if u_hat.layout() != Layout::Vector {
            return Err(Error::Dimension("velocity sampler needs a vector field".into()));
        }
        Ok(match mode {
            Sampling::Fourier => VelocitySampler::Fourier(FourierField::new(u_hat)),
            Sampling::Trilinear => VelocitySampler::Trilinear(match grid {
                Some(g) => Cow::Borrowed(g),
                None => Cow::Owned(GridVelocity::from_spectral(u_hat)),
            }),
        })
    }

    pub fn mode(&self) -> Sampling {
        match self {
            VelocitySampler::Trilinear(_) => Sampling::Trilinear,
            VelocitySampler::Fourier(_) => Sampling::Fourier,
        }
    }

    pub fn jet(&self, x: [f64; 3]) -> VelocityJet {
        match self {
            VelocitySampler::Trilinear(g) => {
                let s = Stencil::new(g.u.grid(), x);
                let mut jet = VelocityJet::default();
                for i in 0..3 {
                    jet.u[i] = s.apply(&g.u, i);
                    for j in 0..3 {
                        jet.grad[i][j] = s.apply(&g.grad[j], i);
                    }
                }
                jet
            }
            VelocitySampler::Fourier(f) => {
                let jets = f.jets(x, false);
                VelocityJet {
                    u: [jets[0].value, jets[1].value, jets[2].value],
                    grad: [jets[0].grad, jets[1].grad, jets[2].grad],
                }
            }
        }
    }
}

pub enum PressureSampler<'a> {
    Trilinear(&'a PressurePack),
    Fourier(FourierField),
}

impl<'a> PressureSampler<'a> {
    pub fn new(mode: Sampling, pack: &'a PressurePack) -> Self {
        match mode {
            Sampling::Trilinear => PressureSampler::Trilinear(pack),
            Sampling::Fourier => PressureSampler::Fourier(FourierField::new(&pack.p_hat)),
        }
    }

    pub fn jet(&self, x: [f64; 3]) -> PressureJet {
        match self {
            PressureSampler::Trilinear(pack) => {
                let s = Stencil::new(pack.grad.grid(), x);
                let mut jet = PressureJet::default();
                for i in 0..3 {
                    jet.grad[i] = s.apply(&pack.grad, i);
                    for j in 0..3 {
                        jet.hess[i][j] = s.apply(&pack.hess, sym_index(i, j));
                    }
                }
                jet
            }
            PressureSampler::Fourier(f) => {
                let j = f.jets(x, true)[0];
                PressureJet {
                    grad: j.grad,
                    hess: j.hess,
                }
            }
        }
    }
}
