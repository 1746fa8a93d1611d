//! The embedded Perkel graph and its acceptance checks.

use std::sync::OnceLock;

use serde::Serialize;

use super::{adjacency_spectrum, chromatic_number, independence_number, ChromaticOutcome, Graph};
use crate::error::{Error, Result};

const PERKEL_EDGES: &str = include_str!("../../data/perkel.edges");

/// Loads the embedded edge list and accepts it only if every check passes.
pub(crate) fn perkel() -> Result<Graph> {
    static CACHE: OnceLock<std::result::Result<Graph, String>> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            let g = Graph::from_edge_list(PERKEL_EDGES).map_err(|e| e.to_string())?;
            let report = validate_perkel(&g);
            if report.passed() {
                Ok(g)
            } else {
                Err(format!("embedded Perkel data rejected: {:?}", report.failures()))
            }
        })
        .clone()
        .map_err(Error::Invalid)
}

#[derive(Debug, Clone, Serialize)]
pub struct PerkelCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<PerkelCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }
}

/// Runs the structural checks a Perkel graph must satisfy. Expensive checks
/// are skipped (and reported failed) once the vertex count is wrong.
pub fn validate_perkel(g: &Graph) -> ValidationReport {
    let mut checks = Vec::new();
    let mut add = |name, passed, detail: String| checks.push(PerkelCheck { name, passed, detail });

    let n = g.vertex_count();
    add("vertex_count", n == 57, format!("{n} vertices"));
    let degree = g.regular_degree();
    add("six_regular", degree == Some(6), format!("regular degree {degree:?}"));
    let m = g.edge_count();
    add("edge_count", m == 171, format!("{m} edges"));
    let triangles = g.triangle_count();
    add("triangle_free", triangles == 0, format!("{triangles} triangles"));

    if n != 57 {
        for name in ["three_chromatic", "smallest_eigenvalue", "complement_independence"] {
            add(name, false, "skipped: wrong vertex count".into());
        }
        return ValidationReport { checks };
    }

    match chromatic_number(g, 3) {
        Ok(ChromaticOutcome::Exact(c)) => {
            add("three_chromatic", c.color_count == 3, format!("chromatic number {}", c.color_count))
        }
        Ok(ChromaticOutcome::ExceedsLimit { .. }) => {
            add("three_chromatic", false, "not 3-colorable".into())
        }
        Err(e) => add("three_chromatic", false, e.to_string()),
    }

    match adjacency_spectrum(g) {
        Ok(s) => {
            let ok = (s.smallest() + 3.0).abs() <= 1e-8 && s.smallest_multiplicity() == 20;
            add(
                "smallest_eigenvalue",
                ok,
                format!("{:.10} with multiplicity {}", s.smallest(), s.smallest_multiplicity()),
            )
        }
        Err(e) => add("smallest_eigenvalue", false, e.to_string()),
    }

    match independence_number(&g.complement()) {
        Ok(a) => add("complement_independence", a.size == 2, format!("alpha = {}", a.size)),
        Err(e) => add("complement_independence", false, e.to_string()),
    }
    ValidationReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{named_graph, NamedGraph};

    #[test]
    fn embedded_data_passes() {
        let g = perkel().unwrap();
        let report = validate_perkel(&g);
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.checks.len(), 7);
    }

    #[test]
    fn petersen_fails_vertex_count() {
        let report = validate_perkel(&named_graph(&NamedGraph::Petersen).unwrap());
        assert!(report.failures().contains(&"vertex_count"));
    }

    #[test]
    fn deleted_edge_breaks_regularity() {
        let g = perkel().unwrap();
        let h = Graph::new(57, g.edges().skip(1)).unwrap();
        let report = validate_perkel(&h);
        assert!(report.failures().contains(&"six_regular"));
        assert!(report.failures().contains(&"edge_count"));
    }
}
