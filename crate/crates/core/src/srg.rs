//! Exhaustive parameter screen showing that no triangle-free strongly regular
//! graph hosts a three-context GHZ-type paradox.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{chromatic_number, named_graph, NamedGraph, SrgParams};
use crate::lovasz::lovasz_theta;

/// Degrees `k` in `[c, 2c + 3]` for which s = sqrt(c^2 + 4(k - c)) is an
/// integer and the chromatic bound 3 >= (2k + c + s) / (c + s), i.e. k <= c + s, holds.
pub fn feasible_k_values(c: u64) -> Vec<u64> {
    (c..=2 * c + 3)
        .filter(|&k| matches!(classify_k(c, k), KCheck::Feasible))
        .collect()
}

enum KCheck {
    Feasible,
    IrrationalRoot,
    ChromaticBound,
}

fn classify_k(c: u64, k: u64) -> KCheck {
    let disc = c * c + 4 * (k - c);
    let s = disc.isqrt();
    if s * s != disc {
        KCheck::IrrationalRoot
    } else if k > c + s {
        KCheck::ChromaticBound
    } else {
        KCheck::Feasible
    }
}

/// Restricted eigenvalues and their multiplicities for SRG parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SrgSpectrum {
    /// Non-negative restricted eigenvalue.
    pub lambda1: f64,
    /// Negative restricted eigenvalue.
    pub lambda2: f64,
    pub m1: f64,
    pub m2: f64,
    /// Both multiplicities are non-negative integers within 1e-9.
    pub feasible: bool,
}

/// Solves lambda^2 - (a - c) lambda - (k - c) = 0 and the trace conditions
/// m1 + m2 = n - 1, m1 lambda1 + m2 lambda2 + k = 0.
pub fn srg_multiplicities(p: SrgParams) -> SrgSpectrum {
    let (n, k, a, c) = (p.n as f64, p.k as f64, p.a as f64, p.c as f64);
    let b = a - c;
    let root = (b * b + 4.0 * (k - c)).sqrt();
    let lambda1 = 0.5 * (b + root);
    let lambda2 = 0.5 * (b - root);
    let m1 = ((n - 1.0) * lambda2 + k) / (lambda2 - lambda1);
    let m2 = n - 1.0 - m1;
    let integral = |m: f64| m >= -1e-9 && (m - m.round()).abs() <= 1e-9;
    SrgSpectrum {
        lambda1,
        lambda2,
        m1,
        m2,
        feasible: integral(m1) && integral(m2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Elimination {
    NonIntegerMultiplicity,
    HoffmanChiViolation,
    KNotInSet,
    BipartiteChi2,
    PetersenTheta,
    ClebschChi4,
    CountingContradiction,
}

#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    pub k: u64,
    /// Vertex count implied by (n - k - 1) c = k (k - 1), when determined.
    pub n: Option<u64>,
    pub spectrum: Option<SrgSpectrum>,
    /// `None` marks a survivor.
    pub reason: Option<Elimination>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScreenRecord {
    pub c: u64,
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScreenReport {
    pub schema_version: u32,
    pub c_max: u64,
    pub records: Vec<ScreenRecord>,
    pub survivors: usize,
    /// Theta of the Petersen complement, computed on the fixture.
    pub petersen_complement_theta: f64,
    /// Chromatic number of the Clebsch graph, computed on the fixture.
    pub clebsch_chromatic_number: usize,
}

impl ScreenReport {
    pub fn to_table(&self) -> String {
        let mut out = String::from("   c     k        n  eigenvalues        multiplicities  elimination\n");
        for rec in &self.records {
            for cand in &rec.candidates {
                let n = cand.n.map_or("-".to_string(), |n| n.to_string());
                let (eig, mult) = match cand.spectrum {
                    Some(s) => (
                        format!("{:.4}, {:.4}", s.lambda1, s.lambda2),
                        format!("{:.3}, {:.3}", s.m1, s.m2),
                    ),
                    None => ("-".into(), "-".into()),
                };
                let reason = cand
                    .reason
                    .map_or("SURVIVES".to_string(), |r| format!("{r:?}"));
                writeln!(
                    out,
                    "{:>4} {:>5} {:>8}  {:<18} {:<15} {reason}: {}",
                    rec.c, cand.k, n, eig, mult, cand.detail
                )
                .expect("write to String");
            }
        }
        writeln!(out, "survivors: {}", self.survivors).expect("write to String");
        out
    }
}

/// Runs the screen for every c in `0..=c_max`.
pub fn screen_three_context(c_max: u64) -> Result<ScreenReport> {
    if c_max < 3 {
        return Err(Error::Invalid("the screen needs c_max >= 3".into()));
    }
    let petersen = named_graph(&NamedGraph::Petersen)?;
    let theta = lovasz_theta(&petersen.complement(), 1e-6, crate::lovasz::DEFAULT_MAX_ITERATIONS)?;
    if !theta.converged {
        return Err(Error::Invalid("theta of the Petersen complement did not converge".into()));
    }
    let petersen_theta = theta.value();
    let clebsch = named_graph(&NamedGraph::Clebsch)?;
    let clebsch_chi = chromatic_number(&clebsch, 16)?
        .value()
        .expect("16 colors always suffice on 16 vertices");

    let records: Vec<ScreenRecord> = (0..=c_max)
        .map(|c| ScreenRecord {
            c,
            candidates: (c..=2 * c + 3)
                .map(|k| candidate(c, k, petersen_theta, clebsch_chi))
                .collect(),
        })
        .collect();
    let survivors = records
        .iter()
        .flat_map(|r| &r.candidates)
        .filter(|c| c.reason.is_none())
        .count();
    Ok(ScreenReport {
        schema_version: crate::SCHEMA_VERSION,
        c_max,
        records,
        survivors,
        petersen_complement_theta: petersen_theta,
        clebsch_chromatic_number: clebsch_chi,
    })
}

fn candidate(c: u64, k: u64, petersen_theta: f64, clebsch_chi: usize) -> Candidate {
    let n = implied_order(c, k);
    let spectrum = n.filter(|&n| n > k + 1).map(|n| {
        srg_multiplicities(SrgParams {
            n: n as usize,
            k: k as usize,
            a: 0,
            c: c as usize,
        })
    });
    let mut cand = Candidate {
        k,
        n,
        spectrum,
        reason: None,
        detail: String::new(),
    };
    match classify_k(c, k) {
        KCheck::IrrationalRoot => {
            cand.reason = Some(Elimination::KNotInSet);
            cand.detail = format!("c^2 + 4(k - c) = {} is not a square", c * c + 4 * (k - c));
            return cand;
        }
        KCheck::ChromaticBound => {
            cand.reason = Some(Elimination::HoffmanChiViolation);
            cand.detail = "k > c + s forces chromatic number above 3".into();
            return cand;
        }
        KCheck::Feasible => {}
    }
    if n.is_none() {
        cand.reason = Some(Elimination::KNotInSet);
        cand.detail = "k(k - 1) not divisible by c".into();
        return cand;
    }
    if k == c || c == 0 {
        cand.reason = Some(Elimination::BipartiteChi2);
        cand.detail = if c == 0 {
            format!("c = 0, k = {k}: a single edge or isolated vertex, chromatic number <= 2")
        } else {
            format!("complete bipartite K({c},{c}), chromatic number 2")
        };
        return cand;
    }
    match c {
        1 => {
            let eliminated = (petersen_theta - 3.0).abs() > 1e-4;
            cand.reason = eliminated.then_some(Elimination::PetersenTheta);
            cand.detail = format!("Petersen graph, theta of complement = {petersen_theta:.6}");
        }
        2 => {
            cand.reason = (clebsch_chi != 3).then_some(Elimination::ClebschChi4);
            cand.detail = format!("Clebsch graph, chromatic number = {clebsch_chi}");
        }
        _ => {
            // Integer form of the neighborhood-counting chain: c + 1 <= c - 1.
            let holds = c + 1 <= c - 1;
            cand.reason = (!holds).then_some(Elimination::CountingContradiction);
            let integral = cand.spectrum.is_some_and(|s| s.feasible);
            cand.detail = format!(
                "counting requires {} <= {}; multiplicities {}integral",
                c + 1,
                c - 1,
                if integral { "" } else { "non-" }
            );
        }
    }
    cand
}

/// n from (n - k - 1) c = k (k - 1); `None` when undetermined or non-integral.
fn implied_order(c: u64, k: u64) -> Option<u64> {
    if c == 0 {
        // Triangle-free with no common neighbours: disjoint edges or an isolated vertex.
        return match k {
            0 => Some(1),
            1 => Some(2),
            _ => None,
        };
    }
    let num = k * k.saturating_sub(1);
    (num % c == 0).then(|| num / c + k + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_feasible_sets() {
        assert_eq!(feasible_k_values(0), vec![0, 1]);
        assert_eq!(feasible_k_values(1), vec![1, 3]);
        assert_eq!(feasible_k_values(2), vec![2, 5]);
    }

    #[test]
    fn multiplicities_of_known_graphs() {
        let p = srg_multiplicities(SrgParams { n: 10, k: 3, a: 0, c: 1 });
        assert_eq!((p.lambda1, p.lambda2, p.m1, p.m2), (1.0, -2.0, 5.0, 4.0));
        let c = srg_multiplicities(SrgParams { n: 16, k: 5, a: 0, c: 2 });
        assert_eq!((c.lambda1, c.lambda2, c.m1, c.m2), (1.0, -3.0, 10.0, 5.0));
        let k33 = srg_multiplicities(SrgParams { n: 6, k: 3, a: 0, c: 3 });
        assert_eq!((k33.lambda1, k33.lambda2, k33.m1, k33.m2), (0.0, -3.0, 4.0, 1.0));
        assert!(k33.feasible);
    }

    #[test]
    fn orders_on_the_odd_branch() {
        for c in 1..50 {
            assert_eq!(implied_order(c, 2 * c + 1), Some(6 * c + 4));
            assert_eq!(implied_order(c, c), Some(2 * c));
        }
    }

    #[test]
    fn rejects_small_c_max() {
        assert!(screen_three_context(2).is_err());
    }
}
