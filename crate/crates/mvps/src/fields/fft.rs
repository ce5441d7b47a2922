//! 3D complex FFT built from rustfft 1D plans.
//!
//! Row-major layout with axis 2 fastest.  Strided axes are transformed
//! through a gather/scatter scratch line.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

pub type C64 = Complex<f64>;

pub struct Fft3 {
    dims: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl Fft3 {
    pub fn new(dims: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = [
            planner.plan_fft_forward(dims[0]),
            planner.plan_fft_forward(dims[1]),
            planner.plan_fft_forward(dims[2]),
        ];
        let inverse = [
            planner.plan_fft_inverse(dims[0]),
            planner.plan_fft_inverse(dims[1]),
            planner.plan_fft_inverse(dims[2]),
        ];
        Fft3 { dims, forward, inverse }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    fn transform(&self, data: &mut [C64], inverse: bool) {
        assert_eq!(data.len(), self.len());
        let [n0, n1, n2] = self.dims;
        let plans = if inverse { &self.inverse } else { &self.forward };

        // axis 2: contiguous lines
        {
            let plan = &plans[2];
            let mut scratch = vec![C64::default(); plan.get_inplace_scratch_len()];
            for line in data.chunks_exact_mut(n2) {
                plan.process_with_scratch(line, &mut scratch);
            }
        }
        // axis 1: stride n2
        {
            let plan = &plans[1];
            let mut scratch = vec![C64::default(); plan.get_inplace_scratch_len()];
            let mut line = vec![C64::default(); n1];
            for i in 0..n0 {
                for k in 0..n2 {
                    let base = i * n1 * n2 + k;
                    for j in 0..n1 {
                        line[j] = data[base + j * n2];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for j in 0..n1 {
                        data[base + j * n2] = line[j];
                    }
                }
            }
        }
        // axis 0: stride n1 * n2
        {
            let plan = &plans[0];
            let mut scratch = vec![C64::default(); plan.get_inplace_scratch_len()];
            let mut line = vec![C64::default(); n0];
            let stride = n1 * n2;
            for jk in 0..stride {
                for i in 0..n0 {
                    line[i] = data[jk + i * stride];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for i in 0..n0 {
                    data[jk + i * stride] = line[i];
                }
            }
        }

        if inverse {
            let scale = 1.0 / self.len() as f64;
            for v in data.iter_mut() {
                *v *= scale;
            }
        }
    }

    pub fn forward(&self, data: &mut [C64]) {
        self.transform(data, false);
    }

    /// Inverse transform, normalized so that inverse(forward(x)) = x.
    pub fn inverse(&self, data: &mut [C64]) {
        self.transform(data, true);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip() {
        let fft = Fft3::new([4, 6, 8]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let orig: Vec<C64> = (0..fft.len())
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut data = orig.clone();
        fft.forward(&mut data);
        fft.inverse(&mut data);
        for (a, b) in data.iter().zip(orig.iter()) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn plane_wave_lands_on_single_mode() {
        let n = 8;
        let fft = Fft3::new([n, n, n]);
        let mut data = vec![C64::default(); fft.len()];
        // e^{2 pi i (2 i0 + 3 i1 + 5 i2)/n}
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let phase = 2.0 * std::f64::consts::PI
                        * (2.0 * i as f64 + 3.0 * j as f64 + 5.0 * k as f64)
                        / n as f64;
                    data[(i * n + j) * n + k] = C64::new(phase.cos(), phase.sin());
                }
            }
        }
        fft.forward(&mut data);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = data[(i * n + j) * n + k];
                    let expected = if (i, j, k) == (2, 3, 5) { (n * n * n) as f64 } else { 0.0 };
                    assert_abs_diff_eq!(v.re, expected, epsilon = 1e-9);
                    assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-9);
                }
            }
        }
    }
}
