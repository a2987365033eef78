//! Iterative radix-2 FFT on power-of-two lengths, and its row-major
//! multi-dimensional extension. Transforms are unnormalized.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Twiddle factors and bit-reversal table for one transform length.
#[derive(Debug, Clone)]
pub struct FftPlan {
    n: usize,
    twiddles: Vec<Complex64>,
    rev: Vec<usize>,
}

impl FftPlan {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::invalid("FFT length must be a power of two"));
        }
        let twiddles = (0..n / 2)
            .map(|k| {
                let (s, c) = (-2.0 * PI * k as f64 / n as f64).sin_cos();
                Complex64::new(c, s)
            })
            .collect();
        let bits = n.trailing_zeros();
        let rev = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        Ok(FftPlan { n, twiddles, rev })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `X_k = Σ_j x_j e^{∓2πijk/n}`, the sign being `+` when `inverse`.
    pub fn process(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        assert_eq!(data.len(), n, "FFT buffer length does not match plan");
        for i in 0..n {
            let r = self.rev[i];
            if i < r {
                data.swap(i, r);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let step = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddles[k * step];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

/// One-dimensional unnormalized transform.
pub fn fft(data: &mut [Complex64], inverse: bool) -> Result<()> {
    FftPlan::new(data.len())?.process(data, inverse);
    Ok(())
}

/// Transform every axis of a row-major array of the given shape.
pub fn fft_nd(data: &mut [Complex64], shape: &[usize], inverse: bool) -> Result<()> {
    let total: usize = shape.iter().product();
    if total != data.len() {
        return Err(Error::dim("array length does not match shape"));
    }
    for axis in 0..shape.len() {
        fft_axis(data, shape, axis, inverse)?;
    }
    Ok(())
}

/// Transform along a single axis of a row-major array.
pub fn fft_axis(data: &mut [Complex64], shape: &[usize], axis: usize, inverse: bool) -> Result<()> {
    let n = shape[axis];
    let plan = FftPlan::new(n)?;
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut buf = alloc::vec![Complex64::new(0.0, 0.0); n];
    for o in 0..outer {
        for s in 0..stride {
            let base = o * n * stride + s;
            for (k, b) in buf.iter_mut().enumerate() {
                *b = data[base + k * stride];
            }
            plan.process(&mut buf, inverse);
            for (k, b) in buf.iter().enumerate() {
                data[base + k * stride] = *b;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn naive(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (j * k % n) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_direct_sum() {
        let x: Vec<Complex64> = (0..32).map(|j| Complex64::new((j as f64 * 0.37).sin(), (j as f64).cos())).collect();
        let mut y = x.clone();
        fft(&mut y, false).unwrap();
        for (a, b) in y.iter().zip(naive(&x)) {
            assert!((a - b).norm() < 1e-12);
        }
        fft(&mut y, true).unwrap();
        for (a, b) in y.iter().zip(&x) {
            assert!((a / 32.0 - b).norm() < 1e-14);
        }
    }

    #[test]
    fn two_dimensional_delta() {
        let mut x = vec![Complex64::new(0.0, 0.0); 16];
        x[0] = Complex64::new(1.0, 0.0);
        fft_nd(&mut x, &[4, 4], false).unwrap();
        assert!(x.iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(FftPlan::new(12).is_err());
    }
}
