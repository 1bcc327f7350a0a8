use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Simple undirected graph on vertices `0..vertex_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
    root: Option<usize>,
}

impl Graph {
    pub fn new(vertex_count: usize) -> Graph {
        Graph { vertex_count, edges: BTreeSet::new(), root: None }
    }

    pub fn from_edges(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph> {
        let mut g = Graph::new(vertex_count);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(vertex_count: usize) -> Graph {
        let mut g = Graph::new(vertex_count);
        for v in 1..vertex_count {
            for u in 0..v {
                g.edges.insert((u, v));
            }
        }
        g
    }

    pub fn cycle(vertex_count: usize) -> Graph {
        let edges = (0..vertex_count).map(|i| (i, (i + 1) % vertex_count));
        Graph::from_edges(vertex_count, edges).expect("cycle on >= 3 vertices")
    }

    pub fn path(vertex_count: usize) -> Graph {
        Graph::from_edges(vertex_count, (1..vertex_count).map(|i| (i - 1, i))).expect("valid path")
    }

    pub fn with_root(mut self, root: usize) -> Graph {
        self.root = Some(root);
        self
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u == v || u >= self.vertex_count || v >= self.vertex_count {
            return Err(Error::InvalidArguments(format!("bad edge ({u}, {v}) on {} vertices", self.vertex_count)));
        }
        if !self.edges.insert((u.min(v), u.max(v))) {
            return Err(Error::InvalidArguments(format!("duplicate edge ({u}, {v})")));
        }
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        self.edges.remove(&(u.min(v), u.max(v)))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertex_count];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    /// Connected components as a label per vertex, plus the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let adj = self.adjacency();
        let mut label = vec![usize::MAX; self.vertex_count];
        let mut count = 0;
        for s in 0..self.vertex_count {
            if label[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s] = count;
            while let Some(u) = stack.pop() {
                for &w in &adj[u] {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count <= 1 || self.components().1 == 1
    }
}
