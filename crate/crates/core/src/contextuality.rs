//! GHZ-paradox certification of exclusivity graphs, context covers, and the
//! noncontextuality inequality with exclusivity-defect compensation.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{chromatic_number, independence_number, ChromaticOutcome, Coloring, Graph, VertexSet};
use crate::lovasz::{lovasz_theta, ThetaCertificate, RaySet};

/// Weight of each one-sided term in the joint-probability estimate
/// Pr(1,1|i,j) ~ w (Pr(1|i) e_{j|i} + Pr(1|j) e_{i|j}).
pub const JOINT_ESTIMATE_WEIGHT: f64 = 0.25;

/// Smallest context sum counted as agreement with the quantum prediction.
pub const QUANTUM_AGREEMENT_THRESHOLD: f64 = 0.98;

/// Standard errors by which the probability total must exceed the corrected bound.
pub const DEFAULT_REFUTATION_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Ordered partition of the events into contexts, each a clique of the
/// exclusivity graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContextCover {
    contexts: Vec<Vec<usize>>,
}

impl ContextCover {
    /// Validates that `contexts` partition `0..g.vertex_count()` into cliques of `g`.
    pub fn new(contexts: Vec<Vec<usize>>, g: &Graph) -> Result<Self> {
        let n = g.vertex_count();
        let mut seen = vec![false; n];
        for (j, ctx) in contexts.iter().enumerate() {
            if ctx.is_empty() {
                return Err(Error::Invalid(format!("context {j} is empty")));
            }
            for &v in ctx {
                if v >= n || std::mem::replace(&mut seen[v], true) {
                    return Err(Error::Invalid(format!("vertex {v} repeated or out of range")));
                }
            }
            if !g.is_clique(ctx) {
                return Err(Error::Invalid(format!("context {j} has a compatible pair")));
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::Invalid(format!("vertex {v} is in no context")));
        }
        Ok(Self { contexts })
    }

    pub fn contexts(&self) -> &[Vec<usize>] {
        &self.contexts
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.contexts.iter().map(Vec::len).collect()
    }

    /// Position of measurement `k` of context `j` in the concatenated
    /// ordering (both 0-based).
    pub fn flat_index(&self, j: usize, k: usize) -> Option<usize> {
        (k < self.contexts.get(j)?.len())
            .then(|| self.contexts[..j].iter().map(Vec::len).sum::<usize>() + k)
    }

    /// Inverse of [`ContextCover::flat_index`].
    pub fn split_index(&self, flat: usize) -> Option<(usize, usize)> {
        let mut rest = flat;
        for (j, ctx) in self.contexts.iter().enumerate() {
            if rest < ctx.len() {
                return Some((j, rest));
            }
            rest -= ctx.len();
        }
        None
    }

    /// Vertex at `[j, k]`.
    pub fn vertex(&self, j: usize, k: usize) -> Option<usize> {
        self.contexts.get(j)?.get(k).copied()
    }
}

/// Builds `n` contexts from a proper coloring of the complement with at most
/// `n` colors. Colorings with fewer colors are refined by splitting the
/// largest class until `n` groups exist. Groups are ordered by smallest vertex.
pub fn context_cover(g: &Graph, n: usize) -> Result<ContextCover> {
    if n == 0 || n > g.vertex_count() {
        return Err(Error::Invalid(format!(
            "cannot split {} events into {n} contexts",
            g.vertex_count()
        )));
    }
    let coloring = match chromatic_number(&g.complement(), n)? {
        ChromaticOutcome::Exact(c) => c,
        ChromaticOutcome::ExceedsLimit { .. } => return Err(Error::NotColorable(n)),
    };
    ContextCover::new(refine_classes(&coloring, n), g)
}

fn refine_classes(coloring: &Coloring, n: usize) -> Vec<Vec<usize>> {
    let mut classes = coloring.classes();
    while classes.len() < n {
        let largest = (0..classes.len())
            .max_by_key(|&i| (classes[i].len(), std::cmp::Reverse(i)))
            .expect("at least one class");
        let v = classes[largest].pop().expect("largest class has two or more vertices");
        classes.push(vec![v]);
    }
    classes.sort_by_key(|c| c[0]);
    classes
}

/// Outcome of checking the three graph constants a GHZ-type paradox requires.
#[derive(Debug, Clone)]
pub struct CertificationReport {
    pub contexts: usize,
    pub independence: VertexSet,
    pub chromatic: ChromaticOutcome,
    pub theta: ThetaCertificate,
    pub alpha_ok: bool,
    pub chi_ok: bool,
    /// `None` when the theta certificate did not converge.
    pub theta_ok: Option<bool>,
    pub verdict: Verdict,
}

impl CertificationReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema_version": crate::SCHEMA_VERSION,
            "contexts": self.contexts,
            "verdict": self.verdict,
            "independence_number": self.independence.size,
            "independent_set": self.independence.vertices,
            "alpha_ok": self.alpha_ok,
            "chromatic_number_of_complement": self.chromatic.value(),
            "chi_ok": self.chi_ok,
            "coloring": match &self.chromatic {
                ChromaticOutcome::Exact(c) => Some(&c.colors),
                ChromaticOutcome::ExceedsLimit { .. } => None,
            },
            "theta": self.theta.to_json(),
            "theta_ok": self.theta_ok,
        })
    }
}

/// Certifies that `g` hosts a GHZ-type paradox with `n` contexts: the
/// independence number is n-1, theta is n and the complement is n-chromatic.
pub fn certify_ghz_graph(g: &Graph, n: usize, tolerance: f64) -> Result<CertificationReport> {
    if n < 3 {
        return Err(Error::TooFewContexts(n));
    }
    let independence = independence_number(g)?;
    let alpha_ok = independence.size == n - 1;

    let chromatic = chromatic_number(&g.complement(), n)?;
    let chi_ok = chromatic.value() == Some(n);

    let theta = lovasz_theta(g, tolerance, crate::lovasz::DEFAULT_MAX_ITERATIONS)?;
    let target = n as f64;
    let theta_ok = if theta.converged {
        Some(theta.brackets(target, tolerance))
    } else if target > theta.dual_value || target < theta.primal_value {
        // Even an unconverged certificate can exclude the target.
        Some(false)
    } else {
        None
    };

    let verdict = match (alpha_ok && chi_ok, theta_ok) {
        (false, _) | (_, Some(false)) => Verdict::Fail,
        (true, Some(true)) => Verdict::Pass,
        (true, None) => Verdict::Inconclusive,
    };
    Ok(CertificationReport {
        contexts: n,
        independence,
        chromatic,
        theta,
        alpha_ok,
        chi_ok,
        theta_ok,
        verdict,
    })
}

/// Exclusivity defects e_{j|i}: probability of outcome j when ray i was prepared,
/// stored for both orientations of every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectMatrix {
    values: BTreeMap<(usize, usize), f64>,
    surveyed: BTreeMap<(usize, usize), bool>,
}

impl DefectMatrix {
    /// All defects zero and every pair marked surveyed.
    pub fn zeros(g: &Graph) -> Self {
        Self::uniform(g, 0.0).expect("zero is a valid defect")
    }

    pub fn uniform(g: &Graph, value: f64) -> Result<Self> {
        check_unit(value)?;
        let mut values = BTreeMap::new();
        let mut surveyed = BTreeMap::new();
        for (i, j) in g.edges() {
            for key in [(i, j), (j, i)] {
                values.insert(key, value);
                surveyed.insert(key, true);
            }
        }
        Ok(Self { values, surveyed })
    }

    /// Sets e_{j|i}, where `i` is the prepared ray and `j` the measured one.
    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        check_unit(value)?;
        match self.values.get_mut(&(i, j)) {
            Some(slot) => {
                *slot = value;
                self.surveyed.insert((i, j), true);
                Ok(())
            }
            None => Err(Error::Invalid(format!("({i}, {j}) is not an exclusive pair"))),
        }
    }

    /// Marks an ordered pair as excluded from the survey with defect 0.
    pub fn exclude(&mut self, i: usize, j: usize) -> Result<()> {
        self.set(i, j, 0.0)?;
        self.surveyed.insert((i, j), false);
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values.get(&(i, j)).copied()
    }

    pub fn is_surveyed(&self, i: usize, j: usize) -> bool {
        self.surveyed.get(&(i, j)).copied().unwrap_or(false)
    }

    /// Number of ordered pairs.
    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn surveyed_count(&self) -> usize {
        self.surveyed.values().filter(|&&s| s).count()
    }

    /// Mean over all ordered pairs.
    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.values().sum::<f64>() / self.values.len() as f64
    }

    /// Mean over the surveyed ordered pairs only.
    pub fn surveyed_mean(&self) -> f64 {
        let (sum, count) = self
            .values
            .iter()
            .filter(|(k, _)| self.surveyed[k])
            .fold((0.0, 0usize), |(s, c), (_, v)| (s + v, c + 1));
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }

    /// `i,j,defect,surveyed` rows for every ordered pair.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,defect,surveyed\n");
        for (&(i, j), v) in &self.values {
            writeln!(out, "{i},{j},{v},{}", self.surveyed[&(i, j)]).expect("write to String");
        }
        out
    }
}

fn check_unit(value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Invalid(format!("defect {value} outside [0, 1]")))
    }
}

/// Compensation term: sum over edges of the estimated joint probability.
pub fn defect_term(probabilities: &[f64], defects: &DefectMatrix, g: &Graph) -> f64 {
    g.edges()
        .map(|(i, j)| {
            let eji = defects.get(i, j).unwrap_or(0.0);
            let eij = defects.get(j, i).unwrap_or(0.0);
            JOINT_ESTIMATE_WEIGHT * (probabilities[i] * eji + probabilities[j] * eij)
        })
        .sum()
}

/// Left-hand side of the exclusivity inequality: event total minus the
/// estimated joint probabilities of exclusive pairs.
pub fn csw_lhs(probabilities: &[f64], defects: &DefectMatrix, g: &Graph) -> f64 {
    probabilities.iter().sum::<f64>() - defect_term(probabilities, defects, g)
}

/// Classical bound raised by the compensation term.
pub fn corrected_classical_bound(alpha: f64, probabilities: &[f64], defects: &DefectMatrix, g: &Graph) -> f64 {
    alpha + defect_term(probabilities, defects, g)
}

/// Classical and quantum bounds of the exclusivity graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounds {
    pub alpha: f64,
    pub theta: f64,
}

/// Context sums, inequality terms and verdict flags of one campaign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParadoxReport {
    pub schema_version: u32,
    pub context_sums: Vec<f64>,
    /// Standard error of each context sum, when estimated from repeated trials.
    pub context_sum_errors: Option<Vec<f64>>,
    /// Values forced on the contexts by a noncontextual model once all but the
    /// last context sum to one.
    pub noncontextual_reference: Vec<f64>,
    pub probability_total: f64,
    pub probability_total_error: Option<f64>,
    pub inequality_lhs: f64,
    pub classical_bound: f64,
    pub corrected_bound: f64,
    pub quantum_bound: f64,
    pub defect_term: f64,
    pub mean_defect: f64,
    pub surveyed_pairs: usize,
    /// (probability_total - corrected_bound) / standard error.
    pub violation_sigmas: Option<f64>,
    pub quantum_agreement: bool,
    pub classical_violation: bool,
}

impl ParadoxReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Sums the event probabilities over each context and attaches the bounds.
/// Defects default to zero, which leaves the corrected bound at alpha.
pub fn evaluate_paradox(
    rs: &RaySet,
    cover: &ContextCover,
    probabilities: &[f64],
    bounds: Bounds,
) -> Result<ParadoxReport> {
    if probabilities.len() != rs.len() {
        return Err(Error::Invalid(format!(
            "{} probabilities for {} rays",
            probabilities.len(),
            rs.len()
        )));
    }
    let covered: usize = cover.sizes().iter().sum();
    if covered != rs.len() || cover.contexts().iter().flatten().any(|&v| v >= rs.len()) {
        return Err(Error::Invalid("context cover does not match the ray set".into()));
    }
    let context_sums: Vec<f64> = cover
        .contexts()
        .iter()
        .map(|ctx| ctx.iter().map(|&k| probabilities[k]).sum())
        .collect();
    let total: f64 = probabilities.iter().sum();
    let mut reference = vec![1.0; cover.len()];
    if let Some(last) = reference.last_mut() {
        *last = 0.0;
    }
    Ok(ParadoxReport {
        schema_version: crate::SCHEMA_VERSION,
        quantum_agreement: context_sums.iter().all(|&p| p >= QUANTUM_AGREEMENT_THRESHOLD),
        classical_violation: total > bounds.alpha,
        context_sums,
        context_sum_errors: None,
        noncontextual_reference: reference,
        probability_total: total,
        probability_total_error: None,
        inequality_lhs: total,
        classical_bound: bounds.alpha,
        corrected_bound: bounds.alpha,
        quantum_bound: bounds.theta,
        defect_term: 0.0,
        mean_defect: 0.0,
        surveyed_pairs: 0,
        violation_sigmas: None,
    })
}

/// Adds defect compensation and trial statistics to a report.
pub fn apply_defects(
    report: &mut ParadoxReport,
    probabilities: &[f64],
    defects: &DefectMatrix,
    g: &Graph,
    total_error: Option<f64>,
    refutation_sigmas: f64,
) {
    let term = defect_term(probabilities, defects, g);
    report.defect_term = term;
    report.inequality_lhs = report.probability_total - term;
    report.corrected_bound = report.classical_bound + term;
    report.mean_defect = defects.surveyed_mean();
    report.surveyed_pairs = defects.surveyed_count();
    report.probability_total_error = total_error;
    let excess = report.probability_total - report.corrected_bound;
    report.violation_sigmas = total_error.filter(|&e| e > 0.0).map(|e| excess / e);
    report.classical_violation = match total_error {
        Some(e) => excess > refutation_sigmas * e,
        None => excess > 0.0,
    };
}
