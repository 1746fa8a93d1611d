//! Adjacency spectra and strong-regularity detection.

use serde::Serialize;

use super::Graph;
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;

/// Absolute tolerance used to group numerically equal eigenvalues.
pub const CLUSTER_TOLERANCE: f64 = 1e-8;

const MAX_SPECTRUM_VERTICES: usize = 512;

/// Distinct adjacency eigenvalues (ascending) with their multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSummary {
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    /// Every eigenvalue with repetition, ascending.
    pub raw: Vec<f64>,
}

impl SpectrumSummary {
    pub fn largest(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    pub fn smallest(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn smallest_multiplicity(&self) -> usize {
        self.multiplicities[0]
    }

    /// Multiplicity of the eigenvalue within tolerance of `value`, or 0.
    pub fn multiplicity_of(&self, value: f64) -> usize {
        self.eigenvalues
            .iter()
            .zip(&self.multiplicities)
            .find(|(e, _)| (*e - value).abs() <= CLUSTER_TOLERANCE.max(1e-6))
            .map_or(0, |(_, &m)| m)
    }
}

pub fn adjacency_spectrum(g: &Graph) -> Result<SpectrumSummary> {
    if g.vertex_count() > MAX_SPECTRUM_VERTICES {
        return Err(Error::TooLarge {
            what: "adjacency spectrum",
            vertices: g.vertex_count(),
            limit: MAX_SPECTRUM_VERTICES,
        });
    }
    let raw = symmetric_eigenvalues(&g.adjacency_matrix());
    let mut eigenvalues: Vec<f64> = Vec::new();
    let mut multiplicities: Vec<usize> = Vec::new();
    let mut cluster_sum = 0.0;
    for &x in &raw {
        match eigenvalues.last_mut() {
            // Compare against the running cluster mean so long runs do not drift.
            Some(last) if (x - *last).abs() <= CLUSTER_TOLERANCE => {
                let m = multiplicities.last_mut().unwrap();
                cluster_sum += x;
                *m += 1;
                *last = cluster_sum / *m as f64;
            }
            _ => {
                eigenvalues.push(x);
                multiplicities.push(1);
                cluster_sum = x;
            }
        }
    }
    Ok(SpectrumSummary {
        eigenvalues,
        multiplicities,
        raw,
    })
}

/// Parameters of a strongly regular graph SRG(n, k, a, c).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SrgParams {
    pub n: usize,
    pub k: usize,
    pub a: usize,
    pub c: usize,
}

/// Returns the SRG parameters when `g` is strongly regular. Complete and
/// edgeless graphs are excluded since `c` (resp. `a`) is undefined for them.
pub fn is_srg(g: &Graph) -> Option<SrgParams> {
    let n = g.vertex_count();
    let k = g.regular_degree()?;
    if k == 0 || k == n - 1 {
        return None;
    }
    let mut a = None;
    let mut c = None;
    for u in 0..n {
        for v in (u + 1)..n {
            let common = g
                .neighbors(u)
                .iter()
                .filter(|&&w| g.has_edge(v, w))
                .count();
            let slot = if g.has_edge(u, v) { &mut a } else { &mut c };
            match slot {
                None => *slot = Some(common),
                Some(x) if *x != common => return None,
                _ => {}
            }
        }
    }
    Some(SrgParams {
        n,
        k,
        a: a?,
        c: c?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{named_graph, NamedGraph};

    #[test]
    fn triangle_spectrum() {
        let s = adjacency_spectrum(&named_graph(&NamedGraph::Complete(3)).unwrap()).unwrap();
        assert_eq!(s.multiplicities, vec![2, 1]);
        assert!((s.smallest() + 1.0).abs() < 1e-10);
        assert!((s.largest() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn srg_detection() {
        let p = named_graph(&NamedGraph::Petersen).unwrap();
        assert_eq!(is_srg(&p), Some(SrgParams { n: 10, k: 3, a: 0, c: 1 }));
        let path = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(is_srg(&path), None);
        assert_eq!(is_srg(&named_graph(&NamedGraph::Complete(4)).unwrap()), None);
    }
}
