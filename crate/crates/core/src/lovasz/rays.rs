//! Factorization of a unit-diagonal Gram matrix into explicit rays.

use nalgebra::{DMatrix, DVector};

use super::{gram_rank, GramMatrix, Normalization, DEFAULT_RANK_THRESHOLD};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest allowed entrywise deviation between the input Gram matrix and the
/// Gram matrix of the extracted rays.
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-8;

/// Unit vectors realizing a Gram matrix, plus the handle state.
#[derive(Debug, Clone)]
pub struct RaySet {
    /// Row `k` is ray `k`.
    rays: DMatrix<f64>,
    handle: DVector<f64>,
    /// Vertices whose block was factored directly, in coordinate order.
    pub pivots: Vec<usize>,
    pub reconstruction_error: f64,
}

impl RaySet {
    /// Builds a ray set from explicit rows, checking unit norms.
    pub fn new(rays: DMatrix<f64>, handle: DVector<f64>) -> Result<Self> {
        if handle.len() != rays.ncols() {
            return Err(Error::Invalid("handle dimension differs from ray dimension".into()));
        }
        for k in 0..rays.nrows() {
            let norm = rays.row(k).norm();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(Error::Invalid(format!("ray {k} has norm {norm}")));
            }
        }
        if (handle.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::Invalid("handle is not a unit vector".into()));
        }
        Ok(Self {
            rays,
            handle,
            pivots: Vec::new(),
            reconstruction_error: 0.0,
        })
    }

    pub fn dimension(&self) -> usize {
        self.rays.ncols()
    }

    pub fn len(&self) -> usize {
        self.rays.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.nrows() == 0
    }

    pub fn ray(&self, k: usize) -> DVector<f64> {
        self.rays.row(k).transpose()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.rays
    }

    pub fn handle(&self) -> &DVector<f64> {
        &self.handle
    }

    pub fn inner(&self, i: usize, j: usize) -> f64 {
        self.rays.row(i).dot(&self.rays.row(j))
    }

    /// Largest |<r_i, r_j>| over the edges of `g`.
    pub fn max_edge_overlap(&self, g: &Graph) -> f64 {
        g.edges().map(|(i, j)| self.inner(i, j).abs()).fold(0.0, f64::max)
    }

    /// True when ray `k` is, up to sign, a standard basis vector.
    pub fn is_computational(&self, k: usize, tol: f64) -> bool {
        let row = self.rays.row(k);
        let big = row.iter().filter(|x| x.abs() > tol).count();
        big == 1 && row.iter().any(|x| (x.abs() - 1.0).abs() <= tol)
    }
}

/// Extracts rays from a unit-diagonal Gram matrix whose zero pattern matches
/// the edges of `g`. The leading r x r block is used when it is nonsingular,
/// otherwise pivots are chosen by greedy pivoted Cholesky.
pub fn extract_rays(b: &GramMatrix, g: &Graph) -> Result<RaySet> {
    if b.mode() != Normalization::UnitDiagonal {
        return Err(Error::Invalid("ray extraction needs a unit-diagonal Gram matrix".into()));
    }
    let n = b.order();
    if g.vertex_count() != n {
        return Err(Error::Invalid(format!(
            "Gram order {n} does not match graph order {}",
            g.vertex_count()
        )));
    }
    let m = b.entries();
    let r = gram_rank(b, DEFAULT_RANK_THRESHOLD);
    if r == 0 {
        return Err(Error::Decomposition("Gram matrix has rank 0".into()));
    }

    let leading: Vec<usize> = (0..r).collect();
    let (pivots, l) = match cholesky_block(m, &leading) {
        Some(l) => (leading, l),
        None => {
            let pivots = greedy_pivots(m, r)?;
            let l = cholesky_block(m, &pivots).ok_or_else(|| {
                Error::Decomposition(format!("no nonsingular {r}x{r} principal block found"))
            })?;
            (pivots, l)
        }
    };

    let mut rays = DMatrix::zeros(n, r);
    for k in 0..n {
        let rhs = DVector::from_iterator(r, pivots.iter().map(|&p| m[(p, k)]));
        let x = l
            .solve_lower_triangular(&rhs)
            .ok_or_else(|| Error::Decomposition("singular triangular factor".into()))?;
        let norm = x.norm();
        if norm == 0.0 {
            return Err(Error::Decomposition(format!("ray {k} vanished")));
        }
        rays.set_row(k, &(x / norm).transpose());
    }

    let rebuilt = &rays * rays.transpose();
    let err = (&rebuilt - m).abs().max();
    if err > RECONSTRUCTION_TOLERANCE {
        return Err(Error::Decomposition(format!(
            "reconstructed Gram deviates by {err:e} (rank {r})"
        )));
    }

    let sum: DVector<f64> = rays.row_sum().transpose();
    let handle = &sum / sum.norm();
    let mut set = RaySet::new(rays, handle)?;
    set.pivots = pivots;
    set.reconstruction_error = err;
    Ok(set)
}

/// Squared overlaps of the handle with each ray.
pub fn handle_probabilities(rs: &RaySet) -> Vec<f64> {
    (0..rs.len())
        .map(|k| rs.ray(k).dot(rs.handle()).powi(2))
        .collect()
}

/// Lower Cholesky factor of the principal submatrix on `idx`, or `None` if a
/// pivot is too small relative to the block's diagonal.
fn cholesky_block(m: &DMatrix<f64>, idx: &[usize]) -> Option<DMatrix<f64>> {
    let r = idx.len();
    let sub = DMatrix::from_fn(r, r, |i, j| m[(idx[i], idx[j])]);
    let scale = (0..r).map(|i| sub[(i, i)]).fold(0.0, f64::max);
    let mut l = DMatrix::<f64>::zeros(r, r);
    for j in 0..r {
        let d = sub[(j, j)] - (0..j).map(|k| l[(j, k)].powi(2)).sum::<f64>();
        if d <= 1e-9 * scale {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..r {
            let s = sub[(i, j)] - (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum::<f64>();
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Pivot selection: largest remaining diagonal, ties to lowest index.
fn greedy_pivots(m: &DMatrix<f64>, r: usize) -> Result<Vec<usize>> {
    let n = m.nrows();
    let mut diag: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(r);
    let mut pivots = Vec::with_capacity(r);
    let scale = diag.iter().copied().fold(0.0, f64::max);
    for _ in 0..r {
        let (p, &d) = diag
            .iter()
            .enumerate()
            .filter(|(i, _)| !pivots.contains(i))
            .fold(None, |best: Option<(usize, &f64)>, cur| match best {
                Some(b) if *b.1 >= *cur.1 => Some(b),
                _ => Some(cur),
            })
            .ok_or_else(|| Error::Decomposition("pivot budget exhausted".into()))?;
        if d <= 1e-9 * scale {
            return Err(Error::Decomposition(format!(
                "pivoted Cholesky stalled after {} pivots",
                pivots.len()
            )));
        }
        let mut col = DVector::from_fn(n, |i, _| m[(i, p)]);
        for c in &cols {
            col.axpy(-c[p], c, 1.0);
        }
        col /= d.sqrt();
        for i in 0..n {
            diag[i] -= col[i] * col[i];
        }
        cols.push(col);
        pivots.push(p);
    }
    pivots.sort_unstable();
    Ok(pivots)
}
