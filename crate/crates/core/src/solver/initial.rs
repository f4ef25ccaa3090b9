use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::spectral::{
    add_trig_term, dealias_in_place, forward, inverse, leray_project_in_place, GridSpec, Layout,
    SpectralField, Trig, TrigTerm,
};

/// Catalogue of analytic and random initial velocities.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    /// `A·(cos x sin y sin z, −sin x cos y sin z, 0)`.
    TaylorGreen { amplitude: f64 },
    /// Arnold–Beltrami–Childress flow, a steady Beltrami field with `ω = u`.
    Abc { a: f64, b: f64, c: f64 },
    /// `u = (f(y), 0, 0)` with `f(y) = Σ_m s_m sin(m y) + c_m cos(m y)`,
    /// `m = 1, 2, …` indexing the coefficient lists.
    Shear { sin: Vec<f64>, cos: Vec<f64> },
    /// Gaussian coefficients with energy spectrum `~k^{-slope}` for
    /// `0 < |k| ≤ k_max`, projected and normalised to energy `½·amplitude²`.
    RandomSolenoidal {
        amplitude: f64,
        slope: f64,
        k_max: Option<usize>,
        seed: u64,
    },
}

impl InitialCondition {
    pub fn kind(&self) -> &'static str {
        match self {
            InitialCondition::TaylorGreen { .. } => "taylor_green",
            InitialCondition::Abc { .. } => "abc",
            InitialCondition::Shear { .. } => "shear",
            InitialCondition::RandomSolenoidal { .. } => "random_solenoidal",
        }
    }
}

fn band_check(grid: GridSpec, k: i64) -> Result<()> {
    if k > grid.dealias_cutoff() {
        return Err(Error::Config(format!(
            "initial mode {k} is outside the dealiased band (|k| ≤ {}) for n={}",
            grid.dealias_cutoff(),
            grid.n()
        )));
    }
    Ok(())
}

fn from_terms(grid: GridSpec, terms: &[(usize, TrigTerm)]) -> Result<SpectralField> {
    let mut u = SpectralField::zeros(grid, Layout::Vector);
    for (comp, term) in terms {
        band_check(grid, term.max_wavenumber())?;
        add_trig_term(&mut u, *comp, term)?;
    }
    Ok(u)
}

/// Build the initial spectral velocity for `ic` on `grid`.
pub fn make_initial(ic: &InitialCondition, grid: GridSpec) -> Result<SpectralField> {
    use Trig::{Cos, Sin};
    match ic {
        InitialCondition::TaylorGreen { amplitude } => from_terms(
            grid,
            &[
                (0, TrigTerm::new(*amplitude, [(Cos, 1), (Sin, 1), (Sin, 1)])),
                (1, TrigTerm::new(-amplitude, [(Sin, 1), (Cos, 1), (Sin, 1)])),
            ],
        ),
        InitialCondition::Abc { a, b, c } => from_terms(
            grid,
            &[
                (0, TrigTerm::new(*a, [(Cos, 0), (Cos, 0), (Sin, 1)])),
                (0, TrigTerm::new(*c, [(Cos, 0), (Cos, 1), (Cos, 0)])),
                (1, TrigTerm::new(*b, [(Sin, 1), (Cos, 0), (Cos, 0)])),
                (1, TrigTerm::new(*a, [(Cos, 0), (Cos, 0), (Cos, 1)])),
                (2, TrigTerm::new(*c, [(Cos, 0), (Sin, 1), (Cos, 0)])),
                (2, TrigTerm::new(*b, [(Cos, 1), (Cos, 0), (Cos, 0)])),
            ],
        ),
        InitialCondition::Shear { sin, cos } => {
            if sin.is_empty() && cos.is_empty() {
                return Err(Error::Config("shear profile has no modes".into()));
            }
            let mut terms = Vec::new();
            for (m, s) in sin.iter().enumerate() {
                terms.push((0, TrigTerm::new(*s, [(Cos, 0), (Sin, m as i64 + 1), (Cos, 0)])));
            }
            for (m, c) in cos.iter().enumerate() {
                terms.push((0, TrigTerm::new(*c, [(Cos, 0), (Cos, m as i64 + 1), (Cos, 0)])));
            }
            from_terms(grid, &terms)
        }
        InitialCondition::RandomSolenoidal {
            amplitude,
            slope,
            k_max,
            seed,
        } => random_solenoidal(grid, *amplitude, *slope, k_max.unwrap_or(grid.n() / 4), *seed),
    }
}

fn random_solenoidal(
    grid: GridSpec,
    amplitude: f64,
    slope: f64,
    k_max: usize,
    seed: u64,
) -> Result<SpectralField> {
    if k_max == 0 {
        return Err(Error::Config("random spectrum needs k_max ≥ 1".into()));
    }
    band_check(grid, k_max as i64)?;
    if !(amplitude > 0.0) {
        return Err(Error::Config(format!("amplitude must be positive, got {amplitude}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kmax2 = (k_max * k_max) as i64;
    let ns = grid.spectral_len();
    let mut u = SpectralField::zeros(grid, Layout::Vector);
    let data = u.data_mut();
    SpectralField::for_each_mode(grid, |off, k| {
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0 || k2 > kmax2 {
            return;
        }
        // Per-mode variance ~ k^{-slope-2} gives a shell spectrum ~ k^{-slope}.
        let amp = (k2 as f64).powf(-(slope + 2.0) / 4.0);
        for c in 0..3 {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            data[c * ns + off] = Complex64::new(re, im) * amp;
        }
    });
    // Hermitian symmetrisation of the kx = 0 plane via a grid round trip.
    let mut u = forward(&inverse(&u));
    SpectralField::for_each_mode(grid, |off, k| {
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 > kmax2 {
            for c in 0..3 {
                u.data_mut()[c * ns + off] = Complex64::new(0.0, 0.0);
            }
        }
    });
    dealias_in_place(&mut u);
    leray_project_in_place(&mut u);
    let e = 0.5 * u.mean_square();
    if e == 0.0 {
        return Err(Error::Config("random spectrum produced a zero field".into()));
    }
    u.scale((0.5 * amplitude * amplitude / e).sqrt());
    Ok(u)
}
