//! Minimum spanning arborescence (Chu-Liu/Edmonds with mergeable heaps).
//!
//! Incoming arcs of every (super)node live in a leftist heap with lazy weight offsets.
//! Each node greedily takes its cheapest incoming arc; when the chosen arcs close a cycle
//! the cycle is contracted by merging its heaps under a rollback union-find, and the
//! choices are unwound in reverse contraction order at the end. Runs in
//! `O(|A| log |A|)`.

use super::ArcLike;
use crate::scalar::Weight;

const NIL: u32 = u32::MAX;

struct HeapNode<W> {
    key: W,
    lazy: W,
    arc: u32,
    left: u32,
    right: u32,
    rank: u32,
}

/// Arena of leftist heaps keyed by `(reduced weight, arc index)`.
struct LeftistHeaps<W> {
    nodes: Vec<HeapNode<W>>,
}

impl<W: Weight> LeftistHeaps<W> {
    fn with_capacity(n: usize) -> Self {
        Self { nodes: Vec::with_capacity(n) }
    }

    fn singleton(&mut self, key: W, arc: u32) -> u32 {
        self.nodes.push(HeapNode { key, lazy: W::zero(), arc, left: NIL, right: NIL, rank: 1 });
        (self.nodes.len() - 1) as u32
    }

    #[inline]
    fn rank(&self, h: u32) -> u32 {
        if h == NIL {
            0
        } else {
            self.nodes[h as usize].rank
        }
    }

    #[inline]
    fn less(&self, a: u32, b: u32) -> bool {
        let (na, nb) = (&self.nodes[a as usize], &self.nodes[b as usize]);
        na.key < nb.key || (!(nb.key < na.key) && na.arc < nb.arc)
    }

    fn add(&mut self, h: u32, delta: W) {
        if h != NIL {
            let n = &mut self.nodes[h as usize];
            n.key = n.key + delta;
            n.lazy = n.lazy + delta;
        }
    }

    fn push_down(&mut self, h: u32) {
        let (lazy, l, r) = {
            let n = &self.nodes[h as usize];
            (n.lazy, n.left, n.right)
        };
        if lazy != W::zero() {
            self.add(l, lazy);
            self.add(r, lazy);
            self.nodes[h as usize].lazy = W::zero();
        }
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        let (a, b) = if self.less(b, a) { (b, a) } else { (a, b) };
        self.push_down(a);
        let right = self.nodes[a as usize].right;
        let merged = self.merge(right, b);
        let left = self.nodes[a as usize].left;
        let (l, r) = if self.rank(left) < self.rank(merged) { (merged, left) } else { (left, merged) };
        let rank = self.rank(r) + 1;
        let n = &mut self.nodes[a as usize];
        n.left = l;
        n.right = r;
        n.rank = rank;
        a
    }

    fn pop(&mut self, h: u32) -> u32 {
        self.push_down(h);
        let (l, r) = (self.nodes[h as usize].left, self.nodes[h as usize].right);
        self.merge(l, r)
    }
}

/// Union-find with union by size and undo log (no path compression).
struct RollbackUnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    history: Vec<(u32, u32)>,
}

impl RollbackUnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect(), size: vec![1; n], history: Vec::new() }
    }

    fn find(&self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            x = self.parent[x as usize];
        }
        x
    }

    fn time(&self) -> usize {
        self.history.len()
    }

    fn join(&mut self, a: u32, b: u32) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.history.push((b, a));
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
        true
    }

    fn rollback(&mut self, t: usize) {
        while self.history.len() > t {
            let (child, root) = self.history.pop().unwrap();
            self.parent[child as usize] = child;
            self.size[root as usize] -= self.size[child as usize];
        }
    }
}

/// Result of [`min_arborescence`]: for each node its chosen incoming arc (`None` for the
/// root and for nodes unreachable from it).
#[derive(Clone, Debug, PartialEq)]
pub struct Arborescence<W> {
    pub root: usize,
    pub parent_arc: Vec<Option<usize>>,
    pub reachable: Vec<bool>,
    pub total_weight: W,
}

impl<W> Arborescence<W> {
    pub fn excluded_count(&self) -> usize {
        self.reachable.iter().filter(|r| !**r).count()
    }
}

/// Minimum-weight spanning arborescence rooted at `root` over the nodes reachable from it.
///
/// `arcs` are `(from, to, weight)`; self-loops and arcs into the root are ignored.
/// Equal-cost alternatives resolve towards lower arc indices, so the result is a
/// deterministic function of the input order.
///
/// # Panics
/// If `root >= num_nodes` or an arc endpoint is out of range.
pub fn min_arborescence<W: Weight, A: ArcLike<W>>(num_nodes: usize, arcs: &[A], root: usize) -> Arborescence<W> {
    assert!(root < num_nodes, "root {root} out of range for {num_nodes} nodes");
    let reachable = reachable_from(num_nodes, arcs, root);

    // compact reachable nodes into 0..m
    let mut local = vec![u32::MAX; num_nodes];
    let mut global = Vec::new();
    for v in 0..num_nodes {
        if reachable[v] {
            local[v] = global.len() as u32;
            global.push(v);
        }
    }
    let m = global.len();
    let lroot = local[root];

    let mut heaps = LeftistHeaps::with_capacity(arcs.len());
    let mut heap = vec![NIL; m];
    for (i, a) in arcs.iter().enumerate() {
        let ((from, to), w) = (a.endpoints(), a.weight());
        if from == to || to == root || !reachable[from] || !reachable[to] {
            continue;
        }
        let node = heaps.singleton(w, i as u32);
        let t = local[to] as usize;
        heap[t] = heaps.merge(heap[t], node);
    }

    let mut uf = RollbackUnionFind::new(m);
    let mut seen = vec![u32::MAX; m];
    seen[lroot as usize] = lroot;
    let mut chosen = vec![u32::MAX; m];
    let mut path: Vec<u32> = Vec::new();
    let mut queue: Vec<u32> = Vec::new();
    let mut cycles: Vec<(u32, usize, Vec<u32>)> = Vec::new();

    let lfrom = |a: u32| local[arcs[a as usize].endpoints().0];
    let lto = |a: u32| local[arcs[a as usize].endpoints().1];

    for s in 0..m as u32 {
        let mut u = s;
        path.clear();
        queue.clear();
        while seen[u as usize] == u32::MAX {
            let h = heap[u as usize];
            assert!(h != NIL, "reachable node without incoming arcs");
            let (w, arc) = {
                let n = &heaps.nodes[h as usize];
                (n.key, n.arc)
            };
            heap[u as usize] = heaps.pop(h);
            if uf.find(lfrom(arc)) == u {
                // arc inside the contracted component
                continue;
            }
            heaps.add(heap[u as usize], W::zero() - w);
            queue.push(arc);
            path.push(u);
            seen[u as usize] = s;
            u = uf.find(lfrom(arc));
            if seen[u as usize] == s {
                let end = queue.len();
                let time = uf.time();
                let mut merged = NIL;
                let mut start = end;
                loop {
                    let w = path.pop().expect("cycle on path");
                    start -= 1;
                    merged = heaps.merge(merged, heap[w as usize]);
                    if !uf.join(u, w) {
                        break;
                    }
                }
                u = uf.find(u);
                heap[u as usize] = merged;
                seen[u as usize] = u32::MAX;
                cycles.push((u, time, queue[start..end].to_vec()));
                queue.truncate(start);
            }
        }
        for &arc in &queue {
            chosen[uf.find(lto(arc)) as usize] = arc;
        }
    }

    for (u, time, comp) in cycles.into_iter().rev() {
        uf.rollback(time);
        let incoming = chosen[u as usize];
        for arc in comp {
            chosen[uf.find(lto(arc)) as usize] = arc;
        }
        chosen[uf.find(lto(incoming)) as usize] = incoming;
    }

    let mut parent_arc = vec![None; num_nodes];
    let mut total = W::zero();
    for (l, &g) in global.iter().enumerate() {
        if l as u32 == lroot {
            continue;
        }
        let arc = chosen[l] as usize;
        parent_arc[g] = Some(arc);
        total = total + arcs[arc].weight();
    }
    Arborescence { root, parent_arc, reachable, total_weight: total }
}

fn reachable_from<W, A: ArcLike<W>>(n: usize, arcs: &[A], root: usize) -> Vec<bool> {
    let mut start = vec![0usize; n + 1];
    for a in arcs {
        start[a.endpoints().0 + 1] += 1;
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut targets = vec![0u32; arcs.len()];
    for a in arcs {
        let (from, to) = a.endpoints();
        targets[fill[from]] = to as u32;
        fill[from] += 1;
    }
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for &t in &targets[start[v]..start[v + 1]] {
            if !seen[t as usize] {
                seen[t as usize] = true;
                stack.push(t as usize);
            }
        }
    }
    seen
}
