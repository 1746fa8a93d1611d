//! Fiber-ring convolution, homodyne readout and phase-error calibration.

use num::complex::Complex64;
use serde::Serialize;

use super::encoding::{ConvolutionKernel, PulseTrain, CALIBRATED_TERMS};
use crate::error::{Error, Result};

/// Output bins of the ring: bin d carries sum_k a_{d+1-k} c_k (v e^{i phi})^(k-1).
pub fn ring_convolve(
    train: &PulseTrain,
    kernel: &ConvolutionKernel,
    phi_ring: f64,
    visibility: f64,
) -> Vec<Complex64> {
    let step = Complex64::from_polar(visibility, phi_ring);
    let a = &train.amplitudes;
    (1..=a.len())
        .map(|d| {
            let mut factor = Complex64::new(1.0, 0.0);
            let mut sum = Complex64::new(0.0, 0.0);
            for k in 1..=d {
                sum += a[d - k] * kernel.c(k) * factor;
                factor *= step;
            }
            sum
        })
        .collect()
}

/// Amplitude of the last output bin for real pulse amplitudes `x`.
pub(crate) fn last_bin(x: &[f64], kernel: &ConvolutionKernel, step: Complex64) -> Complex64 {
    let d = x.len();
    let mut factor = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..=d {
        sum += factor * (x[d - k] * kernel.c(k));
        factor *= step;
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomodyneRecord {
    pub value: f64,
    pub phi_ring: f64,
    pub phi_lo: f64,
    pub accepted: bool,
}

/// In-phase quadrature Re(e^{-i phi_lo} amplitude), flagged rejected when
/// either phase error exceeds `threshold`.
pub fn homodyne_read(amplitude: Complex64, phi_ring: f64, phi_lo: f64, threshold: f64) -> HomodyneRecord {
    HomodyneRecord {
        value: (Complex64::from_polar(1.0, -phi_lo) * amplitude).re,
        phi_ring,
        phi_lo,
        accepted: phi_ring.abs() <= threshold && phi_lo.abs() <= threshold,
    }
}

/// Calibration readouts (h0, h1, h2) for ring phase `phi_ring` and local
/// oscillator phase `phi_lo`: h0 in the lock state, h1 with an extra quarter
/// wave on the oscillator, h2 likewise but summing only terms k >= 4.
pub fn phase_readout_forward(phi_ring: f64, phi_lo: f64, kernel: &ConvolutionKernel, scale: f64) -> (f64, f64, f64) {
    let (z, z4) = lock_sums(phi_ring, phi_lo, kernel);
    (scale * z.re, -scale * z.im, -scale * z4.im)
}

fn lock_sums(phi_ring: f64, phi_lo: f64, kernel: &ConvolutionKernel) -> (Complex64, Complex64) {
    let rot = Complex64::from_polar(1.0, -phi_lo);
    let mut z = Complex64::new(0.0, 0.0);
    let mut z4 = Complex64::new(0.0, 0.0);
    for (i, &c) in kernel.coefficients().iter().enumerate() {
        let k = (i + 1) as f64;
        let term = rot * Complex64::from_polar(c, k * phi_ring);
        z += term;
        if i >= 3 {
            z4 += term;
        }
    }
    (z, z4)
}

/// Ratios (h1/h0, h2/h0) and their Jacobian in (phi_ring, phi_lo).
fn ratios_and_jacobian(phi_ring: f64, phi_lo: f64, kernel: &ConvolutionKernel) -> ([f64; 2], [[f64; 2]; 2]) {
    let rot = Complex64::from_polar(1.0, -phi_lo);
    let mut z = Complex64::new(0.0, 0.0);
    let mut z4 = Complex64::new(0.0, 0.0);
    let mut dz = Complex64::new(0.0, 0.0);
    let mut dz4 = Complex64::new(0.0, 0.0);
    for (i, &c) in kernel.coefficients().iter().enumerate() {
        let k = (i + 1) as f64;
        let term = rot * Complex64::from_polar(c, k * phi_ring);
        let dterm = term * Complex64::new(0.0, k);
        z += term;
        dz += dterm;
        if i >= 3 {
            z4 += term;
            dz4 += dterm;
        }
    }
    // d/d(phi_lo) multiplies every term by -i.
    let mi = Complex64::new(0.0, -1.0);
    let (h0, h1, h2) = (z.re, -z.im, -z4.im);
    let (dz_lo, dz4_lo) = (mi * z, mi * z4);
    let g0 = [dz.re, dz_lo.re];
    let g1 = [-dz.im, -dz_lo.im];
    let g2 = [-dz4.im, -dz4_lo.im];
    let r = [h1 / h0, h2 / h0];
    let mut jac = [[0.0; 2]; 2];
    for v in 0..2 {
        jac[0][v] = (g1[v] * h0 - h1 * g0[v]) / (h0 * h0);
        jac[1][v] = (g2[v] * h0 - h2 * g0[v]) / (h0 * h0);
    }
    (r, jac)
}

/// Recovers (phi_ring, phi_lo) from calibration readouts by damped Newton
/// iteration from (0, 0) on the scale-free ratios h1/h0 and h2/h0.
pub fn phase_error_readout(h0: f64, h1: f64, h2: f64, kernel: &ConvolutionKernel) -> Result<(f64, f64)> {
    const MAX_ITERATIONS: usize = 100;
    if kernel.len() < CALIBRATED_TERMS {
        return Err(Error::Invalid(format!(
            "phase readout needs a kernel with at least {CALIBRATED_TERMS} terms"
        )));
    }
    if h0 == 0.0 || !h0.is_finite() {
        return Err(Error::Invalid("h0 must be finite and nonzero".into()));
    }
    let target = [h1 / h0, h2 / h0];
    let residual = |p: [f64; 2]| {
        let (r, jac) = ratios_and_jacobian(p[0], p[1], kernel);
        ([r[0] - target[0], r[1] - target[1]], jac)
    };
    let norm = |f: [f64; 2]| f[0].hypot(f[1]);

    let mut p = [0.0, 0.0];
    let (mut f, mut jac) = residual(p);
    for _ in 0..MAX_ITERATIONS {
        if norm(f) < 1e-15 {
            return Ok((p[0], p[1]));
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let step = [
            (jac[1][1] * f[0] - jac[0][1] * f[1]) / det,
            (-jac[1][0] * f[0] + jac[0][0] * f[1]) / det,
        ];
        let mut t = 1.0;
        loop {
            let q = [p[0] - t * step[0], p[1] - t * step[1]];
            let (fq, jq) = residual(q);
            if norm(fq) < norm(f) || t < 1e-6 {
                p = q;
                f = fq;
                jac = jq;
                break;
            }
            t *= 0.5;
        }
        if step[0].hypot(step[1]) * t < 1e-15 {
            return Ok((p[0], p[1]));
        }
    }
    if norm(f) < 1e-12 {
        Ok((p[0], p[1]))
    } else {
        Err(Error::Calibration(MAX_ITERATIONS))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photonics::encode_state;

    #[test]
    fn uniform_seven_bins() {
        let k = ConvolutionKernel::calibrated();
        let a = vec![1.0 / 7f64.sqrt(); 7];
        let train = encode_state(&a, 1.0, 1.0).unwrap();
        let out = ring_convolve(&train, &k, 0.0, 1.0);
        assert!((out[0].re - a[0]).abs() < 1e-15);
        assert!((out[6].re - 3.690 / 7f64.sqrt()).abs() < 1e-12);
        assert!((out[6].re - 1.3947).abs() < 1e-4);
    }

    #[test]
    fn homodyne_quadratures() {
        let r = homodyne_read(Complex64::new(2.0, 0.0), 0.0, 0.0, 0.1);
        assert_eq!(r.value, 2.0);
        let r = homodyne_read(Complex64::new(2.0, 0.0), 0.0, std::f64::consts::FRAC_PI_2, 10.0);
        assert!(r.value.abs() < 1e-15);
        let r = homodyne_read(Complex64::new(1.0, 0.0), 0.0, 8f64.to_radians(), 7.5f64.to_radians());
        assert!(!r.accepted);
    }

    #[test]
    fn readout_round_trip() {
        let k = ConvolutionKernel::calibrated();
        for (r, l) in [(0.0, 0.0), (2.0, -3.0), (-7.5, 7.5), (12.0, 0.0)] {
            let (r, l) = (f64::to_radians(r), f64::to_radians(l));
            let (h0, h1, h2) = phase_readout_forward(r, l, &k, 1.014e4);
            let (er, el) = phase_error_readout(h0, h1, h2, &k).unwrap();
            assert!((er - r).abs() < 1e-9 && (el - l).abs() < 1e-9, "{er} {el}");
        }
    }

    #[test]
    fn readout_needs_twelve_terms() {
        let k = ConvolutionKernel::new(super::super::encoding::MEASURED_KERNEL.to_vec()).unwrap();
        assert!(phase_error_readout(1.0, 0.0, 0.0, &k).is_err());
    }
}
