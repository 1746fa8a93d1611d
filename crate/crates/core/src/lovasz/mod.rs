//! Lovász theta, Gram matrices of orthogonal representations and ray extraction.

mod exact;
mod io;
mod rays;
mod sdp;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{adjacency_spectrum, named_graph, Graph, NamedGraph};
use crate::linalg::symmetric_eigenvalues;

pub use exact::{verify_closed_form_exact, ExactCheck};
pub use io::{read_gram_csv, write_gram_csv, write_rays_csv};
pub use rays::{extract_rays, handle_probabilities, RaySet, RECONSTRUCTION_TOLERANCE};
pub use sdp::{
    default_tolerance, lovasz_theta, lovasz_theta_default, CertificateJson, ThetaCertificate,
    DEFAULT_MAX_ITERATIONS, MAX_SDP_VERTICES,
};

/// Default relative threshold for counting nonzero eigenvalues.
pub const DEFAULT_RANK_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    TraceOne,
    UnitDiagonal,
}

/// Symmetric PSD matrix with a normalization tag.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: DMatrix<f64>,
    mode: Normalization,
}

impl GramMatrix {
    /// Validates symmetry, positive semidefiniteness and the normalization.
    pub fn new(entries: DMatrix<f64>, mode: Normalization) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || entries.ncols() != n {
            return Err(Error::Invalid("Gram matrix must be square and nonempty".into()));
        }
        let asym = (&entries - entries.transpose()).abs().max();
        if asym > 1e-12 {
            return Err(Error::Invalid(format!("Gram matrix asymmetric by {asym:e}")));
        }
        let lmin = symmetric_eigenvalues(&entries)[0];
        if lmin < -1e-8 {
            return Err(Error::Invalid(format!("Gram matrix has eigenvalue {lmin:e}")));
        }
        match mode {
            Normalization::TraceOne if (entries.trace() - 1.0).abs() > 1e-10 => {
                return Err(Error::Invalid(format!("trace is {}", entries.trace())));
            }
            Normalization::UnitDiagonal if (0..n).any(|i| (entries[(i, i)] - 1.0).abs() > 1e-10) => {
                return Err(Error::Invalid("diagonal entries must equal 1".into()));
            }
            _ => {}
        }
        Ok(Self { entries, mode })
    }

    pub(crate) fn from_parts(entries: DMatrix<f64>, mode: Normalization) -> Self {
        Self { entries, mode }
    }

    pub fn order(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn mode(&self) -> Normalization {
        self.mode
    }

    /// tr(BJ) of the trace-one rescaling.
    pub fn objective(&self) -> f64 {
        self.entries.sum() / self.entries.trace()
    }

    /// Largest absolute entry over the given vertex pairs.
    pub fn max_abs_on(&self, pairs: impl IntoIterator<Item = (usize, usize)>) -> f64 {
        pairs
            .into_iter()
            .map(|(i, j)| self.entries[(i, j)].abs())
            .fold(0.0, f64::max)
    }

    pub fn to_trace_one(&self) -> GramMatrix {
        Self::from_parts(&self.entries / self.entries.trace(), Normalization::TraceOne)
    }

    /// Rescales to unit diagonal; zero diagonal entries are an error.
    pub fn to_unit_diagonal(&self) -> Result<GramMatrix> {
        let n = self.order();
        let d: Vec<f64> = (0..n).map(|i| self.entries[(i, i)]).collect();
        if let Some(i) = d.iter().position(|&x| x <= 0.0) {
            return Err(Error::Decomposition(format!("diagonal entry {i} is not positive")));
        }
        let mut m = DMatrix::from_fn(n, n, |i, j| self.entries[(i, j)] / (d[i] * d[j]).sqrt());
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        Ok(Self::from_parts(m, Normalization::UnitDiagonal))
    }
}

/// Number of eigenvalues above `relative_threshold` times the largest one.
pub fn gram_rank(b: &GramMatrix, relative_threshold: f64) -> usize {
    let values = symmetric_eigenvalues(b.entries());
    let largest = values.last().copied().unwrap_or(0.0);
    if largest <= 0.0 {
        return 0;
    }
    values.iter().filter(|&&x| x > relative_threshold * largest).count()
}

/// Hoffman ratio bound n(-tau)/(k - tau) for a k-regular graph.
pub fn hoffman_bound(g: &Graph) -> Result<f64> {
    let k = g.regular_degree().ok_or(Error::NotRegular)? as f64;
    if k == 0.0 {
        return Ok(g.vertex_count() as f64);
    }
    let tau = adjacency_spectrum(g)?.smallest();
    Ok(g.vertex_count() as f64 * (-tau) / (k - tau))
}

/// The unit-diagonal Gram matrix I + A/3 built from the Perkel adjacency matrix.
pub fn closed_form_perkel_gram() -> Result<GramMatrix> {
    let perkel = named_graph(&NamedGraph::Perkel)?;
    let m = DMatrix::identity(57, 57) + perkel.adjacency_matrix() / 3.0;
    GramMatrix::new(m, Normalization::UnitDiagonal)
}
