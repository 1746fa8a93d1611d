//! Pulse encoding, the ring kernel, subspace plans and modulation planning.

use num::complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// First calibrated ejection amplitudes of the ring, normalized to the first pulse.
pub const MEASURED_KERNEL: [f64; 7] = [1.0, 0.783, 0.606, 0.465, 0.356, 0.272, 0.208];
/// Decay ratio used to extend the measured kernel.
pub const KERNEL_DECAY: f64 = 0.783;
/// Terms needed by the phase readout.
pub const CALIBRATED_TERMS: usize = 12;

/// Ring ejection amplitudes c_1, c_2, ... with c_1 = 1 and strictly
/// decreasing magnitude.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvolutionKernel {
    coefficients: Vec<f64>,
}

impl ConvolutionKernel {
    /// Normalizes by the first entry and checks the decay.
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        let first = *coefficients
            .first()
            .ok_or_else(|| Error::Invalid("kernel needs at least one term".into()))?;
        if first == 0.0 || !first.is_finite() {
            return Err(Error::Invalid("first kernel term must be nonzero".into()));
        }
        let coefficients: Vec<f64> = coefficients.iter().map(|c| c / first).collect();
        if coefficients.windows(2).any(|w| !(w[1].abs() < w[0].abs())) {
            return Err(Error::Invalid("kernel magnitudes must strictly decrease".into()));
        }
        Ok(Self { coefficients })
    }

    /// The measured seven terms extended geometrically to twelve.
    pub fn calibrated() -> Self {
        let mut c = MEASURED_KERNEL.to_vec();
        while c.len() < CALIBRATED_TERMS {
            let last = *c.last().expect("nonempty");
            c.push(last * KERNEL_DECAY);
        }
        Self { coefficients: c }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// c_k for k >= 1; zero beyond the stored terms.
    pub fn c(&self, k: usize) -> f64 {
        self.coefficients.get(k - 1).copied().unwrap_or(0.0)
    }

    /// (c_d, ..., c_1): the first `d` terms in reversed order.
    pub fn reversed(&self, d: usize) -> Vec<f64> {
        (1..=d).rev().map(|k| self.c(k)).collect()
    }
}

/// Block sizes of the direct-sum decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubspacePlan {
    sizes: Vec<usize>,
}

impl SubspacePlan {
    pub const DEFAULT_SIZES: [usize; 6] = [7, 7, 5, 6, 6, 6];

    /// Checks that the sizes cover `dimension` and fit the kernel, including
    /// the recombination round with one pulse per block.
    pub fn new(sizes: Vec<usize>, dimension: usize, kernel: &ConvolutionKernel) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::Invalid("block sizes must be positive".into()));
        }
        let total: usize = sizes.iter().sum();
        if total != dimension {
            return Err(Error::Invalid(format!(
                "block sizes sum to {total}, expected {dimension}"
            )));
        }
        let usable = kernel.len();
        if sizes.iter().any(|&s| s > usable) || sizes.len() > usable {
            return Err(Error::Invalid(format!(
                "blocks longer than the {usable}-term kernel"
            )));
        }
        Ok(Self { sizes })
    }

    pub fn default_for(kernel: &ConvolutionKernel) -> Result<Self> {
        Self::new(Self::DEFAULT_SIZES.to_vec(), 37, kernel)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn dimension(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Index ranges of the blocks.
    pub fn ranges(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        self.sizes.iter().scan(0, |start, &s| {
            let r = *start..*start + s;
            *start += s;
            Some(r)
        })
    }
}

/// Coherent amplitudes on consecutive time bins.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseTrain {
    pub amplitudes: Vec<Complex64>,
    /// Bin width in seconds.
    pub bin_width: f64,
    /// Displacement of a unit-amplitude pulse.
    pub carrier_scale: f64,
}

/// Places alpha * a_k on bin k.
pub fn encode_state(a: &[f64], carrier_scale: f64, bin_width: f64) -> Result<PulseTrain> {
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 1.0 + 1e-9 {
        return Err(Error::Invalid(format!("state norm {norm} exceeds 1")));
    }
    if !(carrier_scale > 0.0 && bin_width > 0.0) {
        return Err(Error::Invalid("carrier scale and bin width must be positive".into()));
    }
    Ok(PulseTrain {
        amplitudes: a.iter().map(|&x| Complex64::new(carrier_scale * x, 0.0)).collect(),
        bin_width,
        carrier_scale,
    })
}

/// Result of sorting a block by descending basis magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedBlock {
    pub basis: Vec<f64>,
    pub state: Vec<f64>,
    /// `basis[m] = original[permutation[m]]`.
    pub permutation: Vec<usize>,
}

impl SortedBlock {
    /// Pulse order: the largest basis entry goes last so it meets c_1.
    pub fn time_ordered(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.state.iter().rev().copied().collect(),
            self.basis.iter().rev().copied().collect(),
        )
    }
}

/// Sorts `o` by |o| descending (ties by index) and permutes `a` alongside.
pub fn sort_basis(o: &[f64], a: &[f64]) -> Result<SortedBlock> {
    if o.len() != a.len() {
        return Err(Error::Invalid("basis and state lengths differ".into()));
    }
    let mut permutation: Vec<usize> = (0..o.len()).collect();
    permutation.sort_by(|&i, &j| o[j].abs().total_cmp(&o[i].abs()).then(i.cmp(&j)));
    Ok(SortedBlock {
        basis: permutation.iter().map(|&i| o[i]).collect(),
        state: permutation.iter().map(|&i| a[i]).collect(),
        permutation,
    })
}

/// Modulation amplitudes V_m = a_m o_m / c_{d+1-m} for pulses in time order.
/// Any |V_m| above `v_max` rejects the plan.
pub fn modulation_plan(a: &[f64], o: &[f64], kernel: &ConvolutionKernel, v_max: f64) -> Result<Vec<f64>> {
    let d = a.len();
    if o.len() != d {
        return Err(Error::Invalid("basis and state lengths differ".into()));
    }
    if d > kernel.len() {
        return Err(Error::Invalid(format!("{d} pulses exceed the {}-term kernel", kernel.len())));
    }
    let reversed = kernel.reversed(d);
    let v: Vec<f64> = (0..d).map(|m| a[m] * o[m] / reversed[m]).collect();
    if let Some((index, &value)) = v
        .iter()
        .enumerate()
        .find(|(_, x)| x.abs() > v_max * (1.0 + 1e-12))
    {
        return Err(Error::ModulationRange {
            index,
            value,
            limit: v_max,
        });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibrated_kernel() {
        let k = ConvolutionKernel::calibrated();
        assert_eq!(k.len(), 12);
        assert_eq!(k.reversed(3), vec![0.606, 0.783, 1.0]);
        assert!((k.c(8) - 0.208 * 0.783).abs() < 1e-15);
        assert_eq!(k.c(13), 0.0);
    }

    #[test]
    fn kernel_validation() {
        assert!(ConvolutionKernel::new(vec![]).is_err());
        assert!(ConvolutionKernel::new(vec![1.0, 1.0]).is_err());
        let k = ConvolutionKernel::new(vec![2.0, 1.0]).unwrap();
        assert_eq!(k.coefficients(), &[1.0, 0.5]);
    }

    #[test]
    fn sort_examples() {
        let s = sort_basis(&[0.1, -0.5, 0.3], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.basis, vec![-0.5, 0.3, 0.1]);
        assert_eq!(s.state, vec![2.0, 3.0, 1.0]);
        assert_eq!(s.permutation, vec![1, 2, 0]);
        let id = sort_basis(&[3.0, 2.0, 1.0], &[0.0; 3]).unwrap();
        assert_eq!(id.permutation, vec![0, 1, 2]);
    }

    #[test]
    fn plan_constant_when_basis_matches_kernel() {
        let k = ConvolutionKernel::calibrated();
        let o = k.reversed(5);
        let a = vec![0.2; 5];
        let v = modulation_plan(&a, &o, &k, 1.0).unwrap();
        assert!(v.iter().all(|x| (x - 0.2).abs() < 1e-15));
        assert!(matches!(
            modulation_plan(&a, &o, &k, 0.1),
            Err(Error::ModulationRange { index: 0, .. })
        ));
    }

    #[test]
    fn subspace_plan_validation() {
        let k = ConvolutionKernel::calibrated();
        let p = SubspacePlan::default_for(&k).unwrap();
        assert_eq!(p.ranges().last(), Some(31..37));
        assert!(SubspacePlan::new(vec![7, 7], 37, &k).is_err());
        assert!(SubspacePlan::new(vec![13, 24], 37, &k).is_err());
    }

    #[test]
    fn encoding() {
        let t = encode_state(&[0.6, 0.8], 10.0, 1e-9).unwrap();
        assert_eq!(t.amplitudes[1], Complex64::new(8.0, 0.0));
        assert!(encode_state(&[1.0, 0.1], 1.0, 1.0).is_err());
    }
}
