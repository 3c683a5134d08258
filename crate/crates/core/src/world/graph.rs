use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no nodes")]
    Empty,
    #[error("node {node} lists neighbor {neighbor}, which does not exist")]
    UnknownNode { node: usize, neighbor: usize },
    #[error("edge {0} -> {1} has no reverse edge")]
    Asymmetric(usize, usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Undirected location graph. Every node is implicitly adjacent to itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct WorldGraph {
    // Sorted, without self-loops.
    neighbors: Vec<Vec<usize>>,
}

impl WorldGraph {
    /// Builds a graph from per-node neighbor lists. Self-loops and duplicates are dropped.
    pub fn from_neighbors(lists: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        if lists.is_empty() {
            return Err(GraphError::Empty);
        }
        let n = lists.len();
        let mut neighbors = Vec::with_capacity(n);
        for (node, list) in lists.iter().enumerate() {
            let mut set = BTreeSet::new();
            for &neighbor in list {
                if neighbor >= n {
                    return Err(GraphError::UnknownNode { node, neighbor });
                }
                if neighbor != node {
                    set.insert(neighbor);
                }
            }
            neighbors.push(set.into_iter().collect::<Vec<_>>());
        }
        for (node, list) in neighbors.iter().enumerate() {
            for &neighbor in list {
                if neighbors[neighbor].binary_search(&node).is_err() {
                    return Err(GraphError::Asymmetric(node, neighbor));
                }
            }
        }
        let graph = Self { neighbors };
        if !graph.is_connected() {
            log::warn!("world graph with {n} nodes is not connected");
        }
        Ok(graph)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut lists = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(GraphError::UnknownNode {
                    node: a.min(b),
                    neighbor: a.max(b),
                });
            }
            lists[a].push(b);
            lists[b].push(a);
        }
        Self::from_neighbors(lists)
    }

    /// `rows x cols` lattice with 4-neighborhood; node `r * cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let node = r * cols + c;
                if c + 1 < cols {
                    edges.push((node, node + 1));
                }
                if r + 1 < rows {
                    edges.push((node, node + cols));
                }
            }
        }
        Self::from_edges(rows * cols, &edges).expect("grid edges are valid")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges).expect("path edges are valid")
    }

    pub fn complete(n: usize) -> Self {
        let lists = (0..n)
            .map(|i| (0..n).filter(|j| *j != i).collect())
            .collect();
        Self::from_neighbors(lists).expect("complete graph is valid")
    }

    /// The shipped 15-node world: a 3 x 5 grid.
    pub fn default_world() -> Self {
        Self::grid(3, 5)
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    /// Neighbors of `node`, excluding itself.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[node]
    }

    /// Adjacency including the implied self-loop.
    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        a == b || self.neighbors[a].binary_search(&b).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(node) = stack.pop() {
            for &next in &self.neighbors[node] {
                if !seen[next] {
                    seen[next] = true;
                    stack.push(next);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Where an agent at `from` ends up after choosing move action `action`.
    pub fn move_target(&self, from: usize, action: usize) -> usize {
        if action < self.len() && self.is_adjacent(from, action) {
            action
        } else {
            from
        }
    }

    /// Parses the adjacency-list fixture format: one `node: neighbor,neighbor,...` line per node.
    ///
    /// Blank lines and `#` comments are ignored. Every node from 0 to N-1 must have a line.
    pub fn parse_fixture(text: &str) -> Result<Self, GraphError> {
        let mut entries: Vec<(usize, Vec<usize>)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| GraphError::Parse {
                line: lineno + 1,
                message,
            };
            let (node, rest) = line
                .split_once(':')
                .ok_or_else(|| parse_err("expected `node: neighbors`".into()))?;
            let node: usize = node
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("bad node id `{}`", node.trim())))?;
            let mut neighbors = Vec::new();
            for tok in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                neighbors.push(
                    tok.parse()
                        .map_err(|_| parse_err(format!("bad neighbor id `{tok}`")))?,
                );
            }
            entries.push((node, neighbors));
        }
        if entries.is_empty() {
            return Err(GraphError::Empty);
        }
        let n = entries.len();
        let mut lists: Vec<Option<Vec<usize>>> = vec![None; n];
        for (i, (node, neighbors)) in entries.into_iter().enumerate() {
            if node >= n {
                return Err(GraphError::Parse {
                    line: i + 1,
                    message: format!("node {node} out of range for {n} nodes"),
                });
            }
            if lists[node].replace(neighbors).is_some() {
                return Err(GraphError::Parse {
                    line: i + 1,
                    message: format!("node {node} listed twice"),
                });
            }
        }
        Self::from_neighbors(lists.into_iter().map(Option::unwrap_or_default).collect())
    }

    pub fn to_fixture(&self) -> String {
        let mut out = String::new();
        for (node, list) in self.neighbors.iter().enumerate() {
            let joined: Vec<String> = list.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(out, "{node}: {}", joined.join(","));
        }
        out
    }
}

impl TryFrom<Vec<Vec<usize>>> for WorldGraph {
    type Error = GraphError;

    fn try_from(lists: Vec<Vec<usize>>) -> Result<Self, Self::Error> {
        Self::from_neighbors(lists)
    }
}

impl From<WorldGraph> for Vec<Vec<usize>> {
    fn from(graph: WorldGraph) -> Self {
        graph.neighbors
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_layout() {
        let g = WorldGraph::default_world();
        assert_eq!(g.len(), 15);
        assert_eq!(g.neighbors(0), &[1, 5]);
        assert_eq!(g.neighbors(7), &[2, 6, 8, 12]);
        assert_eq!(g.neighbors(11), &[6, 10, 12]);
        assert!(g.is_connected());
    }

    #[test]
    fn fixture_round_trip() {
        let g = WorldGraph::default_world();
        let parsed = WorldGraph::parse_fixture(&g.to_fixture()).unwrap();
        assert_eq!(parsed, g);
    }

    #[test]
    fn fixture_errors() {
        assert!(matches!(
            WorldGraph::parse_fixture("0: 1\n1:\n"),
            Err(GraphError::Asymmetric(0, 1))
        ));
        assert!(matches!(
            WorldGraph::parse_fixture("0: 3\n1: 0\n"),
            Err(GraphError::UnknownNode { .. })
        ));
        assert!(matches!(
            WorldGraph::parse_fixture("0 1\n"),
            Err(GraphError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            WorldGraph::parse_fixture("# nothing\n"),
            Err(GraphError::Empty)
        ));
    }

    #[test]
    fn fixture_comments_and_self_loops() {
        let g = WorldGraph::parse_fixture("# path\n0: 0, 1\n1: 0,2\n\n2: 1\n").unwrap();
        assert_eq!(g, WorldGraph::path(3));
    }

    #[test]
    fn moves_are_reversible() {
        let g = WorldGraph::default_world();
        for a in 0..g.len() {
            for action in 0..g.len() {
                let b = g.move_target(a, action);
                assert_eq!(g.move_target(b, a), a);
            }
        }
    }

    #[test]
    fn disconnected_graph_is_allowed() {
        let g = WorldGraph::from_edges(3, &[(0, 1)]).unwrap();
        assert!(!g.is_connected());
    }
}
