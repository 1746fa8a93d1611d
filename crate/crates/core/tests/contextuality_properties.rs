mod common;

use common::graphs;
use ghz_paradox::contextuality::{
    apply_defects, certify_ghz_graph, context_cover, corrected_classical_bound, csw_lhs, defect_term,
    evaluate_paradox, Bounds, DefectMatrix, Verdict, JOINT_ESTIMATE_WEIGHT,
};
use ghz_paradox::graph::{named_graph, Graph, NamedGraph};
use ghz_paradox::lovasz::{closed_form_perkel_gram, extract_rays, handle_probabilities};
use proptest::prelude::*;

fn defects_and_probs(max_n: usize) -> impl Strategy<Value = (Graph, Vec<f64>, Vec<f64>)> {
    graphs(max_n).prop_flat_map(|g| {
        let n = g.vertex_count();
        let m = 2 * g.edge_count();
        (
            Just(g),
            proptest::collection::vec(0.0..=1.0f64, n),
            proptest::collection::vec(0.0..=1.0f64, m),
        )
    })
}

fn fill(g: &Graph, values: &[f64]) -> DefectMatrix {
    let mut d = DefectMatrix::zeros(g);
    for (k, (i, j)) in g.edges().enumerate() {
        d.set(i, j, values[2 * k]).unwrap();
        d.set(j, i, values[2 * k + 1]).unwrap();
    }
    d
}

proptest! {
    #[test]
    fn zero_defects_leave_the_sum((g, p, _) in defects_and_probs(10)) {
        let d = DefectMatrix::zeros(&g);
        prop_assert_eq!(csw_lhs(&p, &d, &g), p.iter().sum::<f64>());
        prop_assert_eq!(corrected_classical_bound(2.0, &p, &d, &g), 2.0);
    }

    #[test]
    fn raising_a_defect_is_monotone((g, p, e) in defects_and_probs(10), pick in any::<prop::sample::Index>(), bump in 0.0..=1.0f64) {
        prop_assume!(g.edge_count() > 0);
        let d = fill(&g, &e);
        let slot = pick.index(e.len());
        let mut e2 = e.clone();
        e2[slot] = (e2[slot] + bump).min(1.0);
        let d2 = fill(&g, &e2);
        prop_assert!(csw_lhs(&p, &d2, &g) <= csw_lhs(&p, &d, &g) + 1e-12);
        prop_assert!(corrected_classical_bound(2.0, &p, &d2, &g) >= corrected_classical_bound(2.0, &p, &d, &g) - 1e-12);
    }

    #[test]
    fn estimator_is_bounded((g, p, e) in defects_and_probs(10)) {
        let term = defect_term(&p, &fill(&g, &e), &g);
        prop_assert!(term >= 0.0);
        prop_assert!(term <= 2.0 * JOINT_ESTIMATE_WEIGHT * g.edge_count() as f64 + 1e-12);
    }

    #[test]
    fn covers_partition_into_cliques(g in graphs(9), extra in 0usize..3) {
        let n = g.vertex_count();
        let chi = ghz_paradox::graph::chromatic_number(&g.complement(), n).unwrap().value().unwrap();
        let target = (chi + extra).min(n);
        let cover = context_cover(&g, target).unwrap();
        prop_assert_eq!(cover.len(), target);
        let mut seen: Vec<usize> = cover.contexts().iter().flatten().copied().collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
        for ctx in cover.contexts() {
            prop_assert!(g.is_clique(ctx));
        }
    }
}

#[test]
fn estimator_maximum_on_perkel() {
    let g = named_graph(&NamedGraph::PerkelComplement).unwrap();
    let d = DefectMatrix::uniform(&g, 1.0).unwrap();
    let bound = corrected_classical_bound(2.0, &vec![1.0; 57], &d, &g);
    assert!((bound - (2.0 + 1425.0 / 2.0)).abs() < 1e-9);
}

#[test]
fn reference_summary_fixture() {
    let g = named_graph(&NamedGraph::PerkelComplement).unwrap();
    let d = DefectMatrix::uniform(&g, 0.0174).unwrap();
    let term = defect_term(&vec![1.0 / 19.0; 57], &d, &g);
    assert!((term - 0.6525).abs() < 1e-12);
    assert!((2.0 + term - 2.652).abs() < 1e-3);
}

#[test]
fn ideal_perkel_report() {
    let g = named_graph(&NamedGraph::PerkelComplement).unwrap();
    let rs = extract_rays(&closed_form_perkel_gram().unwrap(), &g).unwrap();
    let cover = context_cover(&g, 3).unwrap();
    let firsts: Vec<usize> = cover.contexts().iter().map(|c| c[0]).collect();
    assert_eq!(firsts, vec![0, 19, 38]);
    let probs = handle_probabilities(&rs);
    let mut report = evaluate_paradox(&rs, &cover, &probs, Bounds { alpha: 2.0, theta: 3.0 }).unwrap();
    assert!((report.inequality_lhs - 3.0).abs() < 1e-12);
    assert_eq!(report.noncontextual_reference, vec![1.0, 1.0, 0.0]);
    assert!(report.quantum_agreement && report.classical_violation);

    apply_defects(&mut report, &probs, &DefectMatrix::zeros(&g), &g, Some(0.01), 3.0);
    assert!((report.violation_sigmas.unwrap() - 100.0).abs() < 1e-9);
    let json: serde_json::Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
}

#[test]
fn certification_fails_on_a_wrong_context_count() {
    let g = named_graph(&NamedGraph::ShrikhandeComplement).unwrap();
    let r = certify_ghz_graph(&g, 3, 1e-5).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(!r.alpha_ok);
    let json = r.to_json();
    assert_eq!(json["verdict"], "FAIL");
}
