//! Lovász theta by an alternating-direction augmented Lagrangian method on the
//! dual SDP, with a rigorous eigenvalue certificate for the upper bound.
//!
//! Primal: max <J, X> s.t. tr X = 1, X_ij = 0 on edges, X PSD.
//! Any edge weights y give theta <= lambda_max(J + sum_e y_e (E_ij + E_ji)).

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{GramMatrix, Normalization};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{max_eigenpair, symmetric_eigen, symmetric_eigenvalues};

pub const MAX_SDP_VERTICES: usize = 64;
pub const DEFAULT_MAX_ITERATIONS: usize = 200_000;

const MU_BALANCE: f64 = 0.5;
const MU_FACTOR: f64 = 0.7;
const MU_PATIENCE: i32 = 5;

/// Default absolute gap tolerance for a graph of the given order.
pub fn default_tolerance(n: usize) -> f64 {
    if n <= 10 {
        1e-5
    } else {
        1e-3
    }
}

/// Primal lower bound, dual upper bound and the primal witness.
#[derive(Debug, Clone)]
pub struct ThetaCertificate {
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub tolerance: f64,
    pub primal: GramMatrix,
    /// Edge weights of the dual matrix, aligned with `Graph::edges()`.
    pub dual_weights: Vec<f64>,
    pub elapsed_seconds: f64,
}

impl ThetaCertificate {
    /// Midpoint of the certified interval.
    pub fn value(&self) -> f64 {
        0.5 * (self.primal_value + self.dual_value)
    }

    /// True when `x` lies in [primal - slack, dual + slack].
    pub fn brackets(&self, x: f64, slack: f64) -> bool {
        self.primal_value - slack <= x && x <= self.dual_value + slack
    }

    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            schema_version: crate::SCHEMA_VERSION,
            primal: self.primal_value,
            dual: self.dual_value,
            gap: self.gap,
            iterations: self.iterations,
            converged: self.converged,
            tolerance: self.tolerance,
            vertices: self.primal.order(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateJson {
    pub schema_version: u32,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub tolerance: f64,
    pub vertices: usize,
}

/// Solves with the default tolerance for the graph size.
pub fn lovasz_theta_default(g: &Graph) -> Result<ThetaCertificate> {
    lovasz_theta(g, default_tolerance(g.vertex_count()), DEFAULT_MAX_ITERATIONS)
}

/// Computes theta(g) to absolute gap `tolerance`. When the iteration budget
/// runs out the best certificate found is returned with `converged = false`.
pub fn lovasz_theta(g: &Graph, tolerance: f64, max_iterations: usize) -> Result<ThetaCertificate> {
    let n = g.vertex_count();
    if n > MAX_SDP_VERTICES {
        return Err(Error::TooLarge {
            what: "Lovász theta",
            vertices: n,
            limit: MAX_SDP_VERTICES,
        });
    }
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tolerance}")));
    }
    let start = Instant::now();
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let nf = n as f64;

    if edges.is_empty() {
        // The uniform matrix attains n and the all-ones dual certifies it.
        let x = DMatrix::from_element(n, n, 1.0 / nf);
        return Ok(finish(g, x, Vec::new(), 0, tolerance, start));
    }

    let mut x = DMatrix::<f64>::identity(n, n) / nf;
    let mut s = DMatrix::<f64>::zeros(n, n);
    let mut y_edges = vec![0.0; edges.len()];
    let mut mu = nf;

    let mut best_lower = f64::NEG_INFINITY;
    let mut best_upper = f64::INFINITY;
    let mut best_x = x.clone();
    let mut best_y = y_edges.clone();
    let mut iterations = 0;
    let check_every = 10;
    let mut prev_gap = f64::INFINITY;
    let mut stalled_checks = 0;
    let mut trend: i32 = 0;

    while iterations < max_iterations {
        iterations += 1;

        // Multiplier update; the constraint operator is orthogonal so its
        // normal matrix is diagonal (n for the trace row, 2 for each edge).
        let y0 = -(mu * (x.trace() - 1.0) + s.trace() + nf) / nf;
        for (e, &(i, j)) in edges.iter().enumerate() {
            y_edges[e] = -(mu * x[(i, j)] + s[(i, j)] + 1.0);
        }

        // V = C - A*(y) - mu X with C = -J.
        let mut v = DMatrix::from_element(n, n, -1.0) - &x * mu;
        for i in 0..n {
            v[(i, i)] -= y0;
        }
        for (e, &(i, j)) in edges.iter().enumerate() {
            v[(i, j)] -= y_edges[e];
            v[(j, i)] -= y_edges[e];
        }
        let eig = symmetric_eigen(&v);
        let mut s_new = DMatrix::zeros(n, n);
        let mut x_new = DMatrix::zeros(n, n);
        for (k, &lambda) in eig.values.iter().enumerate() {
            let col = eig.vectors.column(k);
            if lambda > 0.0 {
                s_new.ger(lambda, &col, &col, 1.0);
            } else if lambda < 0.0 {
                x_new.ger(-lambda / mu, &col, &col, 1.0);
            }
        }
        s = s_new;
        x = x_new;

        if iterations % check_every == 0 || iterations == max_iterations {
            // Penalty balancing between primal and dual residuals. The penalty
            // only moves after a sustained imbalance; reacting every check
            // can lock the iteration into a cycle.
            let pinf = primal_residual(&x, &edges);
            let dinf = dual_residual(&s, y0, &y_edges, &edges, n);
            if pinf < MU_BALANCE * dinf {
                trend = trend.min(0) - 1;
            } else if pinf > dinf / MU_BALANCE {
                trend = trend.max(0) + 1;
            } else {
                trend = 0;
            }
            if trend <= -MU_PATIENCE {
                mu = (mu * MU_FACTOR).max(1e-4);
                trend = 0;
            } else if trend >= MU_PATIENCE {
                mu = (mu / MU_FACTOR).min(1e6);
                trend = 0;
            }


            let lower = primal_bound(&x, &edges);
            if lower.0 > best_lower {
                best_lower = lower.0;
                best_x = lower.1;
            }
            let upper = dual_bound(n, &edges, &y_edges);
            if upper < best_upper {
                best_upper = upper;
                best_y = y_edges.clone();
            }
            let gap = best_upper - best_lower;
            if gap <= tolerance {
                break;
            }
            if gap >= prev_gap * 0.999 {
                stalled_checks += 1;
            } else {
                stalled_checks = 0;
            }
            prev_gap = prev_gap.min(gap);
            if stalled_checks >= 200 {
                // Try to tighten the dual bound directly before giving up on progress.
                let (polished, yp) = polish_dual(n, &edges, &best_y, best_lower, 200);
                if polished < best_upper {
                    best_upper = polished;
                    best_y = yp;
                }
                stalled_checks = 0;
                if best_upper - best_lower <= tolerance {
                    break;
                }
            }
        }
    }

    if best_upper - best_lower > tolerance {
        let (polished, yp) = polish_dual(n, &edges, &best_y, best_lower, 400);
        if polished < best_upper {
            best_y = yp;
        }
    }
    Ok(finish(g, best_x, best_y, iterations, tolerance, start))
}

fn finish(
    g: &Graph,
    x: DMatrix<f64>,
    y_edges: Vec<f64>,
    iterations: usize,
    tolerance: f64,
    start: Instant,
) -> ThetaCertificate {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let primal_value = x.sum();
    let dual_value = dual_bound(g.vertex_count(), &edges, &y_edges);
    let gap = dual_value - primal_value;
    ThetaCertificate {
        primal_value,
        dual_value,
        gap,
        iterations,
        converged: gap <= tolerance,
        tolerance,
        primal: GramMatrix::from_parts(x, Normalization::TraceOne),
        dual_weights: y_edges,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    }
}

fn primal_residual(x: &DMatrix<f64>, edges: &[(usize, usize)]) -> f64 {
    let mut r = (x.trace() - 1.0).powi(2);
    for &(i, j) in edges {
        r += 2.0 * x[(i, j)].powi(2);
    }
    r.sqrt()
}

fn dual_residual(s: &DMatrix<f64>, y0: f64, y_edges: &[f64], edges: &[(usize, usize)], n: usize) -> f64 {
    // C - A*(y) - S
    let mut r = DMatrix::from_element(n, n, -1.0) - s;
    for i in 0..n {
        r[(i, i)] -= y0;
    }
    for (e, &(i, j)) in edges.iter().enumerate() {
        r[(i, j)] -= y_edges[e];
        r[(j, i)] -= y_edges[e];
    }
    r.norm() / (1.0 + n as f64)
}

/// Feasible primal point near `x`: edge entries zeroed, shifted to PSD if
/// needed, trace normalized. Returns its objective and the matrix.
fn primal_bound(x: &DMatrix<f64>, edges: &[(usize, usize)]) -> (f64, DMatrix<f64>) {
    let n = x.nrows();
    let mut b = x.clone();
    crate::linalg::symmetrize(&mut b);
    for &(i, j) in edges {
        b[(i, j)] = 0.0;
        b[(j, i)] = 0.0;
    }
    let lmin = symmetric_eigenvalues(&b)[0];
    if lmin < 0.0 {
        for i in 0..n {
            b[(i, i)] -= lmin;
        }
    }
    let t = b.trace();
    if t <= 0.0 {
        return (f64::NEG_INFINITY, b);
    }
    b /= t;
    (b.sum(), b)
}

fn dual_matrix(n: usize, edges: &[(usize, usize)], y_edges: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::from_element(n, n, 1.0);
    for (&(i, j), &y) in edges.iter().zip(y_edges) {
        m[(i, j)] += y;
        m[(j, i)] += y;
    }
    m
}

/// Rigorous upper bound: lambda_max of the all-ones matrix with free edge entries.
fn dual_bound(n: usize, edges: &[(usize, usize)], y_edges: &[f64]) -> f64 {
    if edges.is_empty() {
        return n as f64;
    }
    max_eigenpair(&dual_matrix(n, edges, y_edges)).0
}

/// Subgradient descent on lambda_max with Polyak steps aimed at `target`.
fn polish_dual(
    n: usize,
    edges: &[(usize, usize)],
    y_start: &[f64],
    target: f64,
    steps: usize,
) -> (f64, Vec<f64>) {
    let mut y = y_start.to_vec();
    let mut best = (dual_bound(n, edges, &y), y.clone());
    for _ in 0..steps {
        let (lambda, v): (f64, DVector<f64>) = max_eigenpair(&dual_matrix(n, edges, &y));
        if lambda < best.0 {
            best = (lambda, y.clone());
        }
        let grad: Vec<f64> = edges.iter().map(|&(i, j)| 2.0 * v[i] * v[j]).collect();
        let norm2: f64 = grad.iter().map(|g| g * g).sum();
        if norm2 < 1e-30 {
            break;
        }
        let step = (lambda - target).max(0.0) / norm2;
        if step == 0.0 {
            break;
        }
        for (yi, gi) in y.iter_mut().zip(&grad) {
            *yi -= step * gi;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{named_graph, NamedGraph};

    #[test]
    fn pentagon_is_sqrt5() {
        let g = named_graph(&NamedGraph::Pentagon).unwrap();
        let cert = lovasz_theta(&g, 1e-6, DEFAULT_MAX_ITERATIONS).unwrap();
        assert!(cert.converged, "{cert:?}");
        assert!(cert.brackets(5f64.sqrt(), 1e-9));
        assert!(cert.gap >= -1e-9);
    }

    #[test]
    fn complete_and_empty() {
        let k5 = named_graph(&NamedGraph::Complete(5)).unwrap();
        let cert = lovasz_theta_default(&k5).unwrap();
        assert!(cert.converged && (cert.value() - 1.0).abs() < 1e-5, "{cert:?}");
        let e6 = named_graph(&NamedGraph::Empty(6)).unwrap();
        let cert = lovasz_theta_default(&e6).unwrap();
        assert!((cert.primal_value - 6.0).abs() < 1e-12 && cert.gap.abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        let g = named_graph(&NamedGraph::Pentagon).unwrap();
        assert!(lovasz_theta(&g, 0.0, 10).is_err());
        assert!(lovasz_theta(&Graph::empty(65).unwrap(), 1e-3, 10).is_err());
    }

    #[test]
    fn unconverged_is_flagged() {
        let g = Graph::new(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (5, 6), (2, 6)]).unwrap();
        let cert = lovasz_theta(&g, 1e-14, 2).unwrap();
        assert!(!cert.converged);
        assert!(cert.primal_value <= cert.dual_value + 1e-9);
    }
}
