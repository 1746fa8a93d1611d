//! Exact rational verification of the closed-form Perkel Gram matrix.

use num::{BigRational, One, Signed, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::graph::{named_graph, Graph, NamedGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactCheck {
    pub symmetric: bool,
    pub psd: bool,
    pub rank: usize,
    /// Every entry on an edge of the Perkel complement is exactly zero.
    pub edge_zero: bool,
    /// Trace of the trace-one rescaling equals one.
    pub trace_one: bool,
    /// tr(BJ) of the trace-one rescaling, as a reduced fraction.
    pub objective: String,
    pub objective_is_three: bool,
}

impl ExactCheck {
    pub fn passed(&self) -> bool {
        self.symmetric && self.psd && self.edge_zero && self.trace_one && self.objective_is_three
    }
}

/// Verifies B = (I + A/3)/57 in exact arithmetic: feasibility for the theta
/// program of the Perkel complement, PSD with its rank, and objective 3.
pub fn verify_closed_form_exact() -> Result<ExactCheck> {
    let perkel = named_graph(&NamedGraph::Perkel)?;
    let complement = perkel.complement();
    let b = rational_gram(&perkel);
    let n = b.len();
    let scale = BigRational::from_integer(n.into());

    let symmetric = (0..n).all(|i| (0..n).all(|j| b[i][j] == b[j][i]));
    let edge_zero = complement.edges().all(|(i, j)| b[i][j].is_zero());
    let trace: BigRational = (0..n).map(|i| b[i][i].clone()).sum::<BigRational>() / &scale;
    let total: BigRational = b.iter().flatten().cloned().sum::<BigRational>() / &scale;
    let (psd, rank) = ldl_psd_rank(b);

    Ok(ExactCheck {
        symmetric,
        psd,
        rank,
        edge_zero,
        trace_one: trace.is_one(),
        objective_is_three: total == BigRational::from_integer(3.into()),
        objective: total.to_string(),
    })
}

fn rational_gram(perkel: &Graph) -> Vec<Vec<BigRational>> {
    let n = perkel.vertex_count();
    let third = BigRational::new(1.into(), 3.into());
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else if perkel.has_edge(i, j) {
                        third.clone()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Symmetric Gaussian elimination without pivoting. A symmetric matrix is PSD
/// iff every pivot is non-negative and each zero pivot has a zero column below.
/// The rank is the number of positive pivots.
fn ldl_psd_rank(mut m: Vec<Vec<BigRational>>) -> (bool, usize) {
    let n = m.len();
    let mut rank = 0;
    for k in 0..n {
        let pivot = m[k][k].clone();
        if pivot.is_negative() {
            return (false, rank);
        }
        if pivot.is_zero() {
            if (k + 1..n).any(|i| !m[i][k].is_zero()) {
                return (false, rank);
            }
            continue;
        }
        rank += 1;
        for i in (k + 1)..n {
            if m[i][k].is_zero() {
                continue;
            }
            let factor = &m[i][k] / &pivot;
            for j in (k + 1)..n {
                if m[k][j].is_zero() {
                    continue;
                }
                let delta = &factor * &m[k][j];
                m[i][j] -= delta;
            }
        }
    }
    (true, rank)
}
