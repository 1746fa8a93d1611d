//! Subspace projections and the full prepare-and-measure campaign.

use nalgebra::DVector;
use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::SimConfig;
use super::encoding::{sort_basis, ConvolutionKernel, SubspacePlan};
use super::noise::NoiseModel;
use super::ring::last_bin;
use crate::contextuality::{
    defect_term, evaluate_paradox, Bounds, ContextCover, DefectMatrix, ParadoxReport,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::lovasz::RaySet;

/// Tolerance for recognizing rays that are standard basis vectors.
const COMPUTATIONAL_TOLERANCE: f64 = 1e-9;
/// Drives below this fraction of full scale are nominally dark.
const DARK_FRACTION: f64 = 1e-9;

/// Counters accumulated while measuring.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DrawStats {
    pub accepted: u64,
    pub rejected: u64,
}

impl DrawStats {
    fn merge(&mut self, other: DrawStats) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
    }
}

/// Modulation amplitudes of a block in time order, V_m = a_m o_m / c_{d+1-m}.
fn block_drive(a: &[f64], o: &[f64], kernel: &ConvolutionKernel) -> Result<Vec<f64>> {
    let sorted = sort_basis(o, a)?;
    let (a_t, o_t) = sorted.time_ordered();
    let reversed = kernel.reversed(a_t.len());
    Ok((0..a_t.len()).map(|m| a_t[m] * o_t[m] / reversed[m]).collect())
}

/// One ring run on the drive `x`. Pulses meant to be dark leak at the
/// extinction floor of `full_scale` with a random sign. Returns the in-phase
/// quadrature of the last bin.
fn ring_run<R: Rng + ?Sized>(
    x: &[f64],
    full_scale: f64,
    kernel: &ConvolutionKernel,
    noise: &NoiseModel,
    rng: &mut R,
    stats: &mut DrawStats,
) -> Result<f64> {
    let mut x = x.to_vec();
    if noise.extinction_floor > 0.0 {
        let dark = DARK_FRACTION * full_scale;
        for v in x.iter_mut().filter(|v| v.abs() <= dark) {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            *v = sign * noise.extinction_floor * full_scale;
        }
    }
    let (phi_ring, phi_lo, rejected) = noise.draw_phases(rng)?;
    stats.accepted += 1;
    stats.rejected += rejected as u64;
    let step = Complex64::from_polar(noise.visibility, phi_ring);
    let amplitude = last_bin(&x, kernel, step);
    Ok((Complex64::from_polar(1.0, -phi_lo) * amplitude).re)
}

fn peak(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |p, v| p.max(v.abs()))
}

/// Estimates <o, a> by measuring every block, then recombining the block
/// results against an all-ones basis in a second ring pass.
pub fn run_projection<R: Rng + ?Sized>(
    a: &[f64],
    o: &[f64],
    plan: &SubspacePlan,
    kernel: &ConvolutionKernel,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<f64> {
    let mut stats = DrawStats::default();
    projection(a, o, plan, kernel, noise, rng, &mut stats)
}

fn projection<R: Rng + ?Sized>(
    a: &[f64],
    o: &[f64],
    plan: &SubspacePlan,
    kernel: &ConvolutionKernel,
    noise: &NoiseModel,
    rng: &mut R,
    stats: &mut DrawStats,
) -> Result<f64> {
    if a.len() != plan.dimension() || o.len() != plan.dimension() {
        return Err(Error::Invalid(format!(
            "vectors of length {} and {} for a {}-dimensional plan",
            a.len(),
            o.len(),
            plan.dimension()
        )));
    }
    let drives = plan
        .ranges()
        .map(|r| block_drive(&a[r.clone()], &o[r], kernel))
        .collect::<Result<Vec<_>>>()?;
    // One modulator setting serves the whole measurement, so dark pulses leak
    // relative to the largest drive of any block.
    let full_scale = drives.iter().map(|x| peak(x)).fold(0.0, f64::max);
    let mut partial = Vec::with_capacity(drives.len());
    for x in &drives {
        partial.push(ring_run(x, full_scale, kernel, noise, rng, stats)?);
    }
    let ones = vec![1.0; partial.len()];
    let x = block_drive(&partial, &ones, kernel)?;
    ring_run(&x, peak(&x), kernel, noise, rng, stats)
}

/// Orthonormal basis of the full space starting with the context rays,
/// completed by Gram-Schmidt over the standard basis in index order.
pub fn complete_context_basis(rs: &RaySet, context: &[usize]) -> Result<Vec<DVector<f64>>> {
    let dim = rs.dimension();
    let mut basis: Vec<DVector<f64>> = context.iter().map(|&k| rs.ray(k)).collect();
    for i in 0..basis.len() {
        for j in 0..i {
            if basis[i].dot(&basis[j]).abs() > 1e-8 {
                return Err(Error::Invalid(format!(
                    "context rays {} and {} are not orthogonal",
                    context[j], context[i]
                )));
            }
        }
    }
    for e in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = DVector::zeros(dim);
        v[e] = 1.0;
        // Two passes keep the completion orthogonal to machine precision.
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&v);
                v.axpy(-c, q, 1.0);
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / norm);
        }
    }
    if basis.len() != dim {
        return Err(Error::Decomposition("context completion is rank deficient".into()));
    }
    Ok(basis)
}

/// Measures `state` against every vector of `basis` and normalizes the
/// squared readouts to probabilities.
fn measure_distribution<R: Rng + ?Sized>(
    state: &DVector<f64>,
    basis: &[DVector<f64>],
    plan: &SubspacePlan,
    kernel: &ConvolutionKernel,
    noise: &NoiseModel,
    rng: &mut R,
    stats: &mut DrawStats,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(basis.len());
    for b in basis {
        let est = projection(state.as_slice(), b.as_slice(), plan, kernel, noise, rng, stats)?;
        out.push(est * est);
    }
    let total: f64 = out.iter().sum();
    if total > 0.0 {
        for p in out.iter_mut() {
            *p /= total;
        }
    }
    Ok(out)
}

/// Noiseless squared projections of `state` onto the completed basis of
/// every context, without renormalization.
pub fn ideal_distributions(
    state: &DVector<f64>,
    rs: &RaySet,
    cover: &ContextCover,
    plan: &SubspacePlan,
    kernel: &ConvolutionKernel,
) -> Result<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let noise = NoiseModel::noiseless();
    cover
        .contexts()
        .iter()
        .map(|ctx| {
            complete_context_basis(rs, ctx)?
                .iter()
                .map(|b| {
                    let est = run_projection(state.as_slice(), b.as_slice(), plan, kernel, &noise, &mut rng)?;
                    Ok(est * est)
                })
                .collect()
        })
        .collect()
}

/// Per-trial summary, emitted as an optional trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialTrace {
    pub trial: usize,
    pub context_sums: Vec<f64>,
    pub probability_total: f64,
    pub defect_term: f64,
    pub mean_defect: f64,
    pub rejected_draws: u64,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: ParadoxReport,
    /// Trial-averaged defects.
    pub defects: DefectMatrix,
    /// Trial-averaged handle probabilities per ray.
    pub event_probabilities: Vec<f64>,
    pub traces: Vec<TrialTrace>,
    pub draws: DrawStats,
}

impl ExperimentOutcome {
    pub fn traces_csv(&self) -> String {
        let n = self.report.context_sums.len();
        let mut out = String::from("trial");
        for j in 1..=n {
            out.push_str(&format!(",p{j}"));
        }
        out.push_str(",total,defect_term,mean_defect,rejected_draws\n");
        for t in &self.traces {
            out.push_str(&t.trial.to_string());
            for p in &t.context_sums {
                out.push_str(&format!(",{p}"));
            }
            out.push_str(&format!(
                ",{},{},{},{}\n",
                t.probability_total, t.defect_term, t.mean_defect, t.rejected_draws
            ));
        }
        out
    }
}

struct Campaign<'a> {
    rs: &'a RaySet,
    g: &'a Graph,
    cover: &'a ContextCover,
    /// Completed orthonormal basis of every context, context rays first.
    bases: Vec<Vec<DVector<f64>>>,
    /// Context index of every ray and its position inside the context.
    position: Vec<(usize, usize)>,
    computational: Vec<bool>,
    /// (prepared ray, context) pairs holding at least one surveyed partner.
    survey: Vec<(usize, usize)>,
    cfg: &'a SimConfig,
}

struct TrialResult {
    probabilities: Vec<f64>,
    context_sums: Vec<f64>,
    defects: DefectMatrix,
    stats: DrawStats,
}

impl<'a> Campaign<'a> {
    fn new(rs: &'a RaySet, g: &'a Graph, cover: &'a ContextCover, cfg: &'a SimConfig) -> Result<Self> {
        let n = rs.len();
        if g.vertex_count() != n {
            return Err(Error::Invalid("graph and ray set sizes differ".into()));
        }
        if cfg.plan.dimension() != rs.dimension() {
            return Err(Error::Invalid(format!(
                "subspace plan covers {} dimensions, rays live in {}",
                cfg.plan.dimension(),
                rs.dimension()
            )));
        }
        let bases = cover
            .contexts()
            .iter()
            .map(|ctx| complete_context_basis(rs, ctx))
            .collect::<Result<Vec<_>>>()?;
        let mut position = vec![(usize::MAX, 0); n];
        for (j, ctx) in cover.contexts().iter().enumerate() {
            for (k, &v) in ctx.iter().enumerate() {
                position[v] = (j, k);
            }
        }
        if position.iter().any(|p| p.0 == usize::MAX) {
            return Err(Error::Invalid("context cover misses a ray".into()));
        }
        let computational: Vec<bool> = (0..n)
            .map(|k| rs.is_computational(k, COMPUTATIONAL_TOLERANCE))
            .collect();
        let mut survey = Vec::new();
        for i in (0..n).filter(|&i| !computational[i]) {
            for (j, ctx) in cover.contexts().iter().enumerate() {
                if ctx.iter().any(|&m| !computational[m] && g.has_edge(i, m)) {
                    survey.push((i, j));
                }
            }
        }
        Ok(Self {
            rs,
            g,
            cover,
            bases,
            position,
            computational,
            survey,
            cfg,
        })
    }

    fn trial(&self, trial: usize) -> Result<TrialResult> {
        let cfg = self.cfg;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(trial as u64);
        let mut stats = DrawStats::default();
        let n = self.rs.len();

        let mut probabilities = vec![0.0; n];
        let mut context_sums = Vec::with_capacity(self.cover.len());
        for (j, ctx) in self.cover.contexts().iter().enumerate() {
            let dist = measure_distribution(
                self.rs.handle(),
                &self.bases[j],
                &cfg.plan,
                &cfg.kernel,
                &cfg.noise,
                &mut rng,
                &mut stats,
            )?;
            for (k, &v) in ctx.iter().enumerate() {
                probabilities[v] = dist[k];
            }
            context_sums.push(dist[..ctx.len()].iter().sum());
        }

        let mut defects = DefectMatrix::zeros(self.g);
        for (i, k) in self.g.edges().flat_map(|(i, k)| [(i, k), (k, i)]) {
            if self.computational[i] || self.computational[k] {
                defects.exclude(i, k)?;
            }
        }
        for &(i, j) in &self.survey {
            let dist = measure_distribution(
                &self.rs.ray(i),
                &self.bases[j],
                &cfg.plan,
                &cfg.kernel,
                &cfg.noise,
                &mut rng,
                &mut stats,
            )?;
            for &m in &self.cover.contexts()[j] {
                if !self.computational[m] && self.g.has_edge(i, m) {
                    defects.set(i, m, dist[self.position[m].1])?;
                }
            }
        }
        Ok(TrialResult {
            probabilities,
            context_sums,
            defects,
            stats,
        })
    }
}

/// Runs `cfg.trials` independent trials of the campaign: the handle against
/// every context basis and each non-computational ray against the contexts
/// holding its exclusive partners. Trials use independent streams of the
/// master seed, so results do not depend on scheduling.
pub fn run_experiment(
    rs: &RaySet,
    g: &Graph,
    cover: &ContextCover,
    bounds: Bounds,
    cfg: &SimConfig,
) -> Result<ExperimentOutcome> {
    cfg.noise.validate()?;
    if cfg.trials < 2 {
        return Err(Error::Invalid("at least two trials are needed for error bars".into()));
    }
    let campaign = Campaign::new(rs, g, cover, cfg)?;
    let results: Vec<TrialResult> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| campaign.trial(t))
        .collect::<Result<Vec<_>>>()?;

    let trials = results.len() as f64;
    let n = rs.len();
    let mut draws = DrawStats::default();
    let mut event_probabilities = vec![0.0; n];
    let mut traces = Vec::with_capacity(results.len());
    let mut excess = Vec::with_capacity(results.len());
    let mut totals = Vec::with_capacity(results.len());
    let mut sums_by_context: Vec<Vec<f64>> = vec![Vec::new(); cover.len()];
    let mut terms = Vec::with_capacity(results.len());
    let mut defect_sums: std::collections::BTreeMap<(usize, usize), f64> = Default::default();

    for (t, r) in results.iter().enumerate() {
        draws.merge(r.stats);
        let total: f64 = r.probabilities.iter().sum();
        let term = defect_term(&r.probabilities, &r.defects, g);
        excess.push(total - (bounds.alpha + term));
        totals.push(total);
        terms.push(term);
        for (j, &s) in r.context_sums.iter().enumerate() {
            sums_by_context[j].push(s);
        }
        for (k, &p) in r.probabilities.iter().enumerate() {
            event_probabilities[k] += p / trials;
        }
        for (key, v) in r.defects.iter() {
            *defect_sums.entry(key).or_default() += v / trials;
        }
        traces.push(TrialTrace {
            trial: t,
            context_sums: r.context_sums.clone(),
            probability_total: total,
            defect_term: term,
            mean_defect: r.defects.surveyed_mean(),
            rejected_draws: r.stats.rejected,
        });
    }

    let mut defects = results[0].defects.clone();
    for ((i, k), v) in defect_sums {
        if defects.is_surveyed(i, k) {
            defects.set(i, k, v.clamp(0.0, 1.0))?;
        }
    }

    let mut report = evaluate_paradox(rs, cover, &event_probabilities, bounds)?;
    let (sums, errors): (Vec<f64>, Vec<f64>) = sums_by_context.iter().map(|s| mean_and_error(s)).unzip();
    report.context_sums = sums;
    report.context_sum_errors = Some(errors);
    let (total_mean, total_err) = mean_and_error(&totals);
    let (term_mean, _) = mean_and_error(&terms);
    let (excess_mean, excess_err) = mean_and_error(&excess);
    report.probability_total = total_mean;
    report.probability_total_error = Some(total_err);
    report.defect_term = term_mean;
    report.inequality_lhs = total_mean - term_mean;
    report.corrected_bound = bounds.alpha + term_mean;
    report.mean_defect = defects.surveyed_mean();
    report.surveyed_pairs = defects.surveyed_count();
    report.violation_sigmas = (excess_err > 0.0).then(|| excess_mean / excess_err);
    report.classical_violation = excess_mean > cfg.refutation_sigmas * excess_err;
    report.quantum_agreement = report
        .context_sums
        .iter()
        .all(|&p| p >= crate::contextuality::QUANTUM_AGREEMENT_THRESHOLD);

    Ok(ExperimentOutcome {
        report,
        defects,
        event_probabilities,
        traces,
        draws,
    })
}

/// Sample mean and standard error of the mean.
fn mean_and_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_projection_is_exact() {
        let kernel = ConvolutionKernel::calibrated();
        let plan = SubspacePlan::default_for(&kernel).unwrap();
        let a: Vec<f64> = (0..37).map(|i| ((i * 7 % 11) as f64 - 5.0) / 20.0).collect();
        let o: Vec<f64> = (0..37).map(|i| ((i * 5 % 13) as f64 - 6.0) / 25.0).collect();
        let exact: f64 = a.iter().zip(&o).map(|(x, y)| x * y).sum();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let est = run_projection(&a, &o, &plan, &kernel, &NoiseModel::noiseless(), &mut rng).unwrap();
        assert!((est - exact).abs() <= 1e-12 * exact.abs().max(1.0));
    }

    #[test]
    fn dimension_mismatch() {
        let kernel = ConvolutionKernel::calibrated();
        let plan = SubspacePlan::default_for(&kernel).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(run_projection(&[1.0; 5], &[1.0; 5], &plan, &kernel, &NoiseModel::noiseless(), &mut rng).is_err());
    }

    #[test]
    fn mean_and_error_basics() {
        let (m, e) = mean_and_error(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((e - 1.0).abs() < 1e-15);
    }
}
