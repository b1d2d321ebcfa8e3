//! Discrete Fourier transforms.
//!
//! The model only ever needs unnormalized forward and inverse DFTs of the
//! subcarrier count `N` and symbol count `M`; callers supply the
//! implementation. `isac-sim` plugs in rustfft.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::Complex64;

/// In-place unnormalized DFT over the whole buffer.
///
/// `forward` computes `X[k] = Σ x[n] e^{-j2πkn/L}` and `inverse` computes
/// `x[n] = Σ X[k] e^{+j2πkn/L}`, with `L = buf.len()`.
pub trait Dft {
    fn forward(&self, buf: &mut [Complex64]);
    fn inverse(&self, buf: &mut [Complex64]);
}

impl<T: Dft + ?Sized> Dft for &T {
    fn forward(&self, buf: &mut [Complex64]) {
        (**self).forward(buf)
    }

    fn inverse(&self, buf: &mut [Complex64]) {
        (**self).inverse(buf)
    }
}

/// O(L²) DFT by direct summation with an exact-index twiddle table.
///
/// Adequate for short transforms and for targets without an FFT library.
#[derive(Debug, Default, Clone, Copy)]
pub struct DirectDft;

impl DirectDft {
    fn transform(buf: &mut [Complex64], sign: f64) {
        let len = buf.len();
        if len <= 1 {
            return;
        }
        let twiddles: Vec<Complex64> = (0..len)
            .map(|k| Complex64::cis(sign * 2.0 * PI * k as f64 / len as f64))
            .collect();
        let input: Vec<Complex64> = buf.to_vec();
        for (k, out) in buf.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut idx = 0usize;
            for x in &input {
                acc += x * twiddles[idx];
                idx += k;
                if idx >= len {
                    idx -= len;
                }
            }
            *out = acc;
        }
    }
}

impl Dft for DirectDft {
    fn forward(&self, buf: &mut [Complex64]) {
        Self::transform(buf, -1.0)
    }

    fn inverse(&self, buf: &mut [Complex64]) {
        Self::transform(buf, 1.0)
    }
}

/// `e^{j2π·num/den}` with the integer phase reduced modulo `den` first.
#[inline]
pub fn unit_phase(num: i64, den: usize) -> Complex64 {
    let r = num.rem_euclid(den as i64);
    Complex64::cis(2.0 * PI * r as f64 / den as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn impulse_transforms_to_constant() {
        let mut buf = vec![Complex64::new(0.0, 0.0); 8];
        buf[0] = Complex64::new(1.0, 0.0);
        DirectDft.forward(&mut buf);
        for z in &buf {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn forward_then_inverse_scales_by_length() {
        let orig: Vec<Complex64> = (0..12)
            .map(|i| Complex64::new(i as f64 * 0.3 - 1.0, (i * i) as f64 * 0.01))
            .collect();
        let mut buf = orig.clone();
        DirectDft.forward(&mut buf);
        DirectDft.inverse(&mut buf);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a / 12.0 - b).norm() < 1e-13);
        }
    }

    #[test]
    fn single_tone_lands_in_one_bin() {
        let len = 16;
        let mut buf: Vec<Complex64> = (0..len).map(|n| unit_phase(3 * n as i64, len)).collect();
        DirectDft.forward(&mut buf);
        for (k, z) in buf.iter().enumerate() {
            let expect = if k == 3 { len as f64 } else { 0.0 };
            assert!((z.norm() - expect).abs() < 1e-12, "bin {k}: {z}");
        }
    }
}
