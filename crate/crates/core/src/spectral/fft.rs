//! Three-dimensional real transforms: r2c along x, complex along y and z.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

use super::field::{RealField, SpectralField};

struct Plans {
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut rp = RealFftPlanner::<f64>::new();
            let mut cp = FftPlanner::<f64>::new();
            Arc::new(Plans {
                r2c: rp.plan_fft_forward(n),
                c2r: rp.plan_fft_inverse(n),
                fwd: cp.plan_fft_forward(n),
                inv: cp.plan_fft_inverse(n),
            })
        })
        .clone()
}

/// Complex transforms along y then z (or z then y) on one component.
fn transform_yz(fft: &dyn Fft<f64>, n: usize, data: &mut [Complex64], z_first: bool) {
    let nh = n / 2 + 1;
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];

    let y_pass = |data: &mut [Complex64], line: &mut [Complex64], scratch: &mut [Complex64]| {
        for z in 0..n {
            let slab = &mut data[z * nh * n..(z + 1) * nh * n];
            for ix in 0..nh {
                for (j, v) in line.iter_mut().enumerate() {
                    *v = slab[ix + nh * j];
                }
                fft.process_with_scratch(line, scratch);
                for (j, v) in line.iter().enumerate() {
                    slab[ix + nh * j] = *v;
                }
            }
        }
    };
    let z_pass = |data: &mut [Complex64], line: &mut [Complex64], scratch: &mut [Complex64]| {
        let plane = nh * n;
        for p in 0..plane {
            for (k, v) in line.iter_mut().enumerate() {
                *v = data[p + plane * k];
            }
            fft.process_with_scratch(line, scratch);
            for (k, v) in line.iter().enumerate() {
                data[p + plane * k] = *v;
            }
        }
    };

    if z_first {
        z_pass(data, &mut line, &mut scratch);
        y_pass(data, &mut line, &mut scratch);
    } else {
        y_pass(data, &mut line, &mut scratch);
        z_pass(data, &mut line, &mut scratch);
    }
}

fn forward_component(p: &Plans, n: usize, input: &[f64], out: &mut [Complex64]) {
    let nh = n / 2 + 1;
    let mut line = p.r2c.make_input_vec();
    let mut scratch = p.r2c.make_scratch_vec();
    for (src, dst) in input.chunks_exact(n).zip(out.chunks_exact_mut(nh)) {
        line.copy_from_slice(src);
        p.r2c
            .process_with_scratch(&mut line, dst, &mut scratch)
            .expect("r2c buffer sizes are fixed by the plan");
    }
    transform_yz(p.fwd.as_ref(), n, out, false);
    let scale = 1.0 / (n * n * n) as f64;
    out.iter_mut().for_each(|v| *v *= scale);
}

fn inverse_component(p: &Plans, n: usize, input: &[Complex64], out: &mut [f64]) {
    let nh = n / 2 + 1;
    let mut work = input.to_vec();
    transform_yz(p.inv.as_ref(), n, &mut work, true);
    let mut scratch = p.c2r.make_scratch_vec();
    for (src, dst) in work.chunks_exact_mut(nh).zip(out.chunks_exact_mut(n)) {
        // Real-signal constraint on the DC and Nyquist entries of each x line.
        src[0].im = 0.0;
        src[nh - 1].im = 0.0;
        p.c2r
            .process_with_scratch(src, dst, &mut scratch)
            .expect("c2r buffer sizes are fixed by the plan");
    }
}

/// Forward transform with mean-value normalisation.
pub fn forward(f: &RealField) -> SpectralField {
    let grid = f.grid();
    let n = grid.n();
    let p = plans(n);
    let mut out = SpectralField::zeros(grid, f.layout());
    for c in 0..f.components() {
        forward_component(&p, n, f.component(c), out.component_mut(c));
    }
    out
}

/// Inverse transform; `inverse(&forward(&f))` reproduces `f`.
pub fn inverse(fh: &SpectralField) -> RealField {
    let grid = fh.grid();
    let n = grid.n();
    let p = plans(n);
    let mut out = RealField::zeros(grid, fh.layout());
    for c in 0..fh.components() {
        inverse_component(&p, n, fh.component(c), out.component_mut(c));
    }
    out
}
