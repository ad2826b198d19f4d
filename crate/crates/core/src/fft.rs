//! Radix-2 FFT on power-of-two grids, split real/imaginary storage.
//!
//! The transform order is fixed (iterative, bit-reversed, table-driven
//! twiddles), so repeated runs are bit-reproducible.

/// Precomputed twiddle tables for one transform size.
pub(crate) struct FftPlan {
    n: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl FftPlan {
    pub fn new(n: usize) -> Self {
        debug_assert!(n.is_power_of_two() && n >= 2);
        let mut cos = Vec::with_capacity(n / 2);
        let mut sin = Vec::with_capacity(n / 2);
        for k in 0..n / 2 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let (s, c) = theta.sin_cos();
            cos.push(c);
            sin.push(s);
        }
        FftPlan { n, cos, sin }
    }

    /// Unnormalized forward DFT of a real signal:
    /// `X_k = sum_j x_j exp(-2*pi*i*j*k/n)`.
    pub fn forward(&self, input: &[f64]) -> (Vec<f64>, Vec<f64>) {
        debug_assert_eq!(input.len(), self.n);
        let mut re = input.to_vec();
        let mut im = vec![0.0; self.n];
        self.transform(&mut re, &mut im, false);
        (re, im)
    }

    /// Inverse DFT, returning the real part and applying the 1/n factor.
    pub fn inverse_real(&self, re: &[f64], im: &[f64]) -> Vec<f64> {
        let mut wre = re.to_vec();
        let mut wim = im.to_vec();
        self.transform(&mut wre, &mut wim, true);
        let scale = 1.0 / self.n as f64;
        for v in wre.iter_mut() {
            *v *= scale;
        }
        wre
    }

    fn transform(&self, re: &mut [f64], im: &mut [f64], inverse: bool) {
        let n = self.n;
        // Bit-reversal permutation.
        let mut j = 0usize;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                re.swap(i, j);
                im.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            let mut base = 0;
            while base < n {
                for k in 0..half {
                    let tc = self.cos[k * stride];
                    let ts = if inverse {
                        self.sin[k * stride]
                    } else {
                        -self.sin[k * stride]
                    };
                    let a = base + k;
                    let b = a + half;
                    let xr = re[b] * tc - im[b] * ts;
                    let xi = re[b] * ts + im[b] * tc;
                    re[b] = re[a] - xr;
                    im[b] = im[a] - xi;
                    re[a] += xr;
                    im[a] += xi;
                }
                base += len;
            }
            len <<= 1;
        }
    }
}
