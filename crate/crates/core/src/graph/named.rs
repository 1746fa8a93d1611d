use std::fmt;
use std::str::FromStr;

use super::{perkel, Graph};
use crate::error::{Error, Result};

/// Fixture graphs addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedGraph {
    Pentagon,
    Perkel,
    PerkelComplement,
    Shrikhande,
    ShrikhandeComplement,
    Complete(usize),
    Empty(usize),
    Petersen,
    Clebsch,
}

impl NamedGraph {
    pub const FIXED: [NamedGraph; 7] = [
        Self::Pentagon,
        Self::Perkel,
        Self::PerkelComplement,
        Self::Shrikhande,
        Self::ShrikhandeComplement,
        Self::Petersen,
        Self::Clebsch,
    ];
}

impl fmt::Display for NamedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Pentagon => f.write_str("pentagon"),
            Self::Perkel => f.write_str("perkel"),
            Self::PerkelComplement => f.write_str("perkel-complement"),
            Self::Shrikhande => f.write_str("shrikhande"),
            Self::ShrikhandeComplement => f.write_str("shrikhande-complement"),
            Self::Complete(n) => write!(f, "complete-{n}"),
            Self::Empty(n) => write!(f, "empty-{n}"),
            Self::Petersen => f.write_str("petersen"),
            Self::Clebsch => f.write_str("clebsch"),
        }
    }
}

impl FromStr for NamedGraph {
    type Err = Error;

    /// Accepts `perkel_complement` or `perkel-complement`, and `complete(5)`,
    /// `complete-5` or `complete:5` for the sized families.
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        let unknown = || Error::UnknownGraph(s.to_string());
        let fixed = match key.as_str() {
            "pentagon" | "c5" => Some(Self::Pentagon),
            "perkel" => Some(Self::Perkel),
            "perkel-complement" => Some(Self::PerkelComplement),
            "shrikhande" => Some(Self::Shrikhande),
            "shrikhande-complement" => Some(Self::ShrikhandeComplement),
            "petersen" => Some(Self::Petersen),
            "clebsch" => Some(Self::Clebsch),
            _ => None,
        };
        if let Some(g) = fixed {
            return Ok(g);
        }
        for (prefix, make) in [
            ("complete", Self::Complete as fn(usize) -> Self),
            ("empty", Self::Empty as fn(usize) -> Self),
        ] {
            if let Some(rest) = key.strip_prefix(prefix) {
                let digits = rest
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .or_else(|| rest.strip_prefix('-'))
                    .or_else(|| rest.strip_prefix(':'))
                    .ok_or_else(unknown)?;
                let n: usize = digits.trim().parse().map_err(|_| unknown())?;
                if n == 0 {
                    return Err(unknown());
                }
                return Ok(make(n));
            }
        }
        Err(unknown())
    }
}

pub fn named_graph(name: &NamedGraph) -> Result<Graph> {
    let g = match *name {
        NamedGraph::Pentagon => Graph::new(5, (0..5).map(|i| (i, (i + 1) % 5)))?,
        NamedGraph::Perkel => perkel::perkel()?,
        NamedGraph::PerkelComplement => perkel::perkel()?.complement(),
        NamedGraph::Shrikhande => shrikhande()?,
        NamedGraph::ShrikhandeComplement => shrikhande()?.complement(),
        NamedGraph::Complete(n) => {
            Graph::new(n, (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))))?
        }
        NamedGraph::Empty(n) => Graph::empty(n)?,
        NamedGraph::Petersen => petersen()?,
        NamedGraph::Clebsch => clebsch()?,
    };
    Ok(g.with_name(name.to_string()))
}

/// Cayley graph on Z4 x Z4 with connection set {±(1,0), ±(0,1), ±(1,1)}.
fn shrikhande() -> Result<Graph> {
    let idx = |x: usize, y: usize| 4 * (x % 4) + (y % 4);
    let mut edges = Vec::new();
    for x in 0..4 {
        for y in 0..4 {
            for (dx, dy) in [(1, 0), (0, 1), (1, 1)] {
                edges.push((idx(x, y), idx(x + dx, y + dy)));
            }
        }
    }
    let g = Graph::new(16, edges)?;
    let params = super::is_srg(&g);
    if params
        != Some(super::SrgParams {
            n: 16,
            k: 6,
            a: 2,
            c: 2,
        })
    {
        return Err(Error::Invalid(format!(
            "Shrikhande construction produced {params:?}"
        )));
    }
    Ok(g)
}

/// Kneser graph K(5,2): 2-subsets of {0..4}, adjacent when disjoint.
fn petersen() -> Result<Graph> {
    let pairs: Vec<(usize, usize)> = (0..5)
        .flat_map(|a| ((a + 1)..5).map(move |b| (a, b)))
        .collect();
    let mut edges = Vec::new();
    for (i, p) in pairs.iter().enumerate() {
        for (j, q) in pairs.iter().enumerate().skip(i + 1) {
            if p.0 != q.0 && p.0 != q.1 && p.1 != q.0 && p.1 != q.1 {
                edges.push((i, j));
            }
        }
    }
    Graph::new(10, edges)
}

/// Folded 5-cube: 4-bit words adjacent when they differ in one bit or in all four.
fn clebsch() -> Result<Graph> {
    let mut edges = Vec::new();
    for u in 0..16usize {
        for v in (u + 1)..16 {
            if matches!(u ^ v, 1 | 2 | 4 | 8 | 15) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(16, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_names() {
        assert_eq!("perkel_complement".parse::<NamedGraph>().unwrap(), NamedGraph::PerkelComplement);
        assert_eq!("complete(5)".parse::<NamedGraph>().unwrap(), NamedGraph::Complete(5));
        assert_eq!("complete-5".parse::<NamedGraph>().unwrap(), NamedGraph::Complete(5));
        assert_eq!("empty:6".parse::<NamedGraph>().unwrap(), NamedGraph::Empty(6));
        assert!("complete(0)".parse::<NamedGraph>().is_err());
        assert!(matches!("dodecahedron".parse::<NamedGraph>(), Err(Error::UnknownGraph(_))));
        for g in NamedGraph::FIXED {
            assert_eq!(g.to_string().parse::<NamedGraph>().unwrap(), g);
        }
    }

    #[test]
    fn fixture_sizes() {
        let size = |g| {
            let g = named_graph(&g).unwrap();
            (g.vertex_count(), g.edge_count())
        };
        assert_eq!(size(NamedGraph::Pentagon), (5, 5));
        assert_eq!(size(NamedGraph::Petersen), (10, 15));
        assert_eq!(size(NamedGraph::Clebsch), (16, 40));
        assert_eq!(size(NamedGraph::Shrikhande), (16, 48));
        assert_eq!(size(NamedGraph::Complete(6)), (6, 15));
    }

    #[test]
    fn pentagon_is_self_complementary() {
        let c5 = named_graph(&NamedGraph::Pentagon).unwrap();
        // Vertex v of the complement maps to position v in [0, 2, 4, 1, 3].
        let perm = [0, 3, 1, 4, 2];
        assert_eq!(c5.complement().relabel(&perm).unwrap(), c5);
    }
}
