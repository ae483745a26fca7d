//! The classical interactive proof for graph non-isomorphism.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::MAX_GRAPH_VERTICES;
use crate::error::{Error, Result};

/// Simple undirected graph; `adj[v]` is the neighbour bitmask of `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphSpec", into = "GraphSpec")]
pub struct Graph {
    n: usize,
    adj: Vec<u16>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphSpec {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<GraphSpec> for Graph {
    type Error = Error;
    fn try_from(s: GraphSpec) -> Result<Self> {
        Graph::new(s.vertices, &s.edges)
    }
}

impl From<Graph> for GraphSpec {
    fn from(g: Graph) -> Self {
        GraphSpec { vertices: g.n, edges: g.edges() }
    }
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > MAX_GRAPH_VERTICES {
            return Err(Error::ResourceGuard(format!(
                "graph has {n} vertices, brute-force isomorphism is limited to {MAX_GRAPH_VERTICES}"
            )));
        }
        let mut adj = vec![0u16; n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Config(format!("edge ({u}, {v}) outside {n} vertices")));
            }
            if u == v {
                return Err(Error::Config(format!("self-loop at vertex {u}")));
            }
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        Ok(Self { n, adj })
    }

    pub fn cycle(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &edges)
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.adj[v].count_ones()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|u| (u + 1..self.n).filter(move |&v| self.has_edge(u, v)).map(move |v| (u, v))).collect()
    }

    /// The graph with vertex `v` renamed `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Graph {
        let mut adj = vec![0u16; self.n];
        for (u, v) in self.edges() {
            adj[perm[u]] |= 1 << perm[v];
            adj[perm[v]] |= 1 << perm[u];
        }
        Graph { n: self.n, adj }
    }

    /// Whether `perm` maps the edges of `self` exactly onto those of `other`.
    pub fn preserves_edges(&self, other: &Graph, perm: &[usize]) -> bool {
        if self.n != other.n || perm.len() != self.n {
            return false;
        }
        let mut seen = 0u16;
        for &p in perm {
            if p >= self.n || seen >> p & 1 == 1 {
                return false;
            }
            seen |= 1 << p;
        }
        self.permute(perm) == *other
    }

    /// Backtracking search for `perm` with `self.permute(perm) == other`.
    pub fn find_isomorphism(&self, other: &Graph) -> Option<Vec<usize>> {
        if self.n != other.n || self.edges().len() != other.edges().len() {
            return None;
        }
        let mut perm = vec![usize::MAX; self.n];
        let mut used = 0u16;
        self.extend(other, 0, &mut perm, &mut used).then_some(perm)
    }

    fn extend(&self, other: &Graph, u: usize, perm: &mut [usize], used: &mut u16) -> bool {
        if u == self.n {
            return true;
        }
        for t in 0..self.n {
            if *used >> t & 1 == 1 || self.degree(u) != other.degree(t) {
                continue;
            }
            if (0..u).any(|w| self.has_edge(u, w) != other.has_edge(t, perm[w])) {
                continue;
            }
            perm[u] = t;
            *used |= 1 << t;
            if self.extend(other, u + 1, perm, used) {
                return true;
            }
            *used &= !(1 << t);
        }
        perm[u] = usize::MAX;
        false
    }

    pub fn is_isomorphic(&self, other: &Graph) -> bool {
        self.find_isomorphism(other).is_some()
    }
}

fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// How Merlin answers "which graph did I permute?".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GiStrategy {
    /// Brute-force search; answers the first graph the challenge is isomorphic to.
    Honest,
    AlwaysFirst,
    RandomGuess,
    /// Brute-force search, then a coin flip when both graphs match.
    BestEffort,
}

impl GiStrategy {
    fn answer<R: Rng + ?Sized>(self, g: [&Graph; 2], challenge: &Graph, rng: &mut R) -> usize {
        match self {
            GiStrategy::AlwaysFirst => 0,
            GiStrategy::RandomGuess => rng.gen_range(0..2),
            GiStrategy::Honest => usize::from(!g[0].is_isomorphic(challenge)),
            GiStrategy::BestEffort => match (g[0].is_isomorphic(challenge), g[1].is_isomorphic(challenge)) {
                (true, false) => 0,
                (false, true) => 1,
                _ => rng.gen_range(0..2),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GiRun {
    pub convinced: bool,
    /// Whether Merlin named the right graph in each round.
    pub rounds: Vec<bool>,
}

/// `k` rounds of: Arthur permutes a random one of the two graphs, Merlin names it.
/// Arthur is convinced the graphs differ iff every answer is right.
pub fn run_gi_protocol<R: Rng + ?Sized>(g1: &Graph, g2: &Graph, merlin: GiStrategy, k: usize, rng: &mut R) -> Result<GiRun> {
    if g1.vertices() != g2.vertices() {
        return Err(Error::Config("graphs must have the same number of vertices".into()));
    }
    let g = [g1, g2];
    let rounds: Vec<bool> = (0..k)
        .map(|_| {
            let b = rng.gen_range(0..2);
            let challenge = g[b].permute(&random_permutation(g1.vertices(), rng));
            merlin.answer(g, &challenge, rng) == b
        })
        .collect();
    Ok(GiRun { convinced: rounds.iter().all(|&r| r), rounds })
}

/// Exact probability that `merlin` convinces Arthur over `k` rounds. When the graphs are
/// isomorphic the challenge carries no information about Arthur's coin.
pub fn gi_convince_probability(g1: &Graph, g2: &Graph, merlin: GiStrategy, k: usize) -> f64 {
    let informed = matches!(merlin, GiStrategy::Honest | GiStrategy::BestEffort);
    if informed && !g1.is_isomorphic(g2) {
        1.0
    } else {
        0.5f64.powi(k as i32)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BijectionRound {
    pub claimed: Vec<usize>,
    pub accepted: bool,
}

/// The isomorphic direction: Merlin sends a bijection, Arthur checks it preserves edges.
/// Without an isomorphism Merlin can only send a random permutation.
pub fn run_gi_bijection<R: Rng + ?Sized>(g1: &Graph, g2: &Graph, rng: &mut R) -> BijectionRound {
    let claimed = g1.find_isomorphism(g2).unwrap_or_else(|| random_permutation(g1.vertices(), rng));
    let accepted = g1.preserves_edges(g2, &claimed);
    BijectionRound { claimed, accepted }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;

    fn triangle_plus_point() -> Graph {
        Graph::new(4, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn path4() -> Graph {
        Graph::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap()
    }

    #[test]
    fn isomorphism_search() {
        let c4 = Graph::cycle(4).unwrap();
        let relabeled = c4.permute(&[2, 0, 3, 1]);
        let perm = c4.find_isomorphism(&relabeled).unwrap();
        assert!(c4.preserves_edges(&relabeled, &perm));
        assert!(!triangle_plus_point().is_isomorphic(&path4()));
        assert!(!c4.preserves_edges(&relabeled, &[0, 0, 1, 2]));
    }

    #[test]
    fn honest_merlin_distinguishes_non_isomorphic_graphs() {
        let mut rng = RandomStream::new(3);
        for _ in 0..50 {
            let run = run_gi_protocol(&triangle_plus_point(), &path4(), GiStrategy::Honest, 10, &mut rng).unwrap();
            assert!(run.convinced);
        }
    }

    #[test]
    fn bijection_round() {
        let mut rng = RandomStream::new(4);
        let c4 = Graph::cycle(4).unwrap();
        assert!(run_gi_bijection(&c4, &c4.permute(&[1, 3, 0, 2]), &mut rng).accepted);
        assert!(!run_gi_bijection(&triangle_plus_point(), &path4(), &mut rng).accepted);
    }

    #[test]
    fn oversized_graph_is_refused() {
        assert!(matches!(Graph::cycle(13), Err(Error::ResourceGuard(_))));
    }

    #[test]
    fn graph_json_round_trip() {
        let g = path4();
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<Graph>(&text).unwrap(), g);
    }
}
