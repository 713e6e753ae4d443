use std::cmp::Ordering;

use super::ArcLike;
use crate::scalar::Weight;

/// Rooted minimum spanning tree of the component containing the root.
#[derive(Clone, Debug, PartialEq)]
pub struct SpanningTree<W> {
    pub root: usize,
    /// Parent node and the index of the connecting edge, per node.
    pub parent: Vec<Option<(usize, usize)>>,
    pub reachable: Vec<bool>,
    pub total_weight: W,
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            Ordering::Less => self.parent[a] = b,
            Ordering::Greater => self.parent[b] = a,
            Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
        true
    }
}

/// Kruskal's algorithm over `(u, v, weight)` edges; ties prefer lower edge index. The forest
/// is then oriented away from `root`; nodes outside the root's component are unreachable.
///
/// # Panics
/// If `root >= num_nodes` or an edge endpoint is out of range.
pub fn min_spanning_tree<W: Weight, A: ArcLike<W>>(num_nodes: usize, edges: &[A], root: usize) -> SpanningTree<W> {
    assert!(root < num_nodes, "root {root} out of range for {num_nodes} nodes");
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|&a, &b| {
        edges[a].weight().partial_cmp(&edges[b].weight()).unwrap_or(Ordering::Equal).then(a.cmp(&b))
    });
    let mut uf = UnionFind::new(num_nodes);
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); num_nodes];
    for i in order {
        let (u, v) = edges[i].endpoints();
        if u != v && uf.union(u, v) {
            adj[u].push((v, i));
            adj[v].push((u, i));
        }
    }

    let mut parent = vec![None; num_nodes];
    let mut reachable = vec![false; num_nodes];
    let mut total = W::zero();
    reachable[root] = true;
    let mut stack = vec![root];
    while let Some(x) = stack.pop() {
        for &(y, e) in &adj[x] {
            if !reachable[y] {
                reachable[y] = true;
                parent[y] = Some((x, e));
                total = total + edges[e].weight();
                stack.push(y);
            }
        }
    }
    SpanningTree { root, parent, reachable, total_weight: total }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph() {
        let edges: Vec<_> = (0..4).map(|i| (i, i + 1, 1i64)).collect();
        let t = min_spanning_tree(5, &edges, 0);
        assert_eq!(t.total_weight, 4);
        for v in 1..5 {
            assert_eq!(t.parent[v].unwrap().0, v - 1);
        }
    }

    #[test]
    fn triangle() {
        let edges = vec![(0, 1, 1i64), (1, 2, 2), (0, 2, 3)];
        let t = min_spanning_tree(3, &edges, 0);
        assert_eq!(t.total_weight, 3);
        let used: Vec<_> = t.parent.iter().flatten().map(|p| p.1).collect();
        assert!(used.contains(&0) && used.contains(&1));
    }

    #[test]
    fn rerooted_at_leaf() {
        let edges = vec![(0, 1, 1.0), (1, 2, 1.0)];
        let t = min_spanning_tree(3, &edges, 2);
        assert_eq!(t.parent, vec![Some((1, 0)), Some((2, 1)), None]);
    }

    #[test]
    fn other_components_unreachable() {
        let edges = vec![(0, 1, 1.0), (2, 3, 1.0)];
        let t = min_spanning_tree(4, &edges, 0);
        assert_eq!(t.reachable, vec![true, true, false, false]);
        assert_eq!(t.total_weight, 1.0);
    }
}
