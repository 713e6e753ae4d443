//! Static 3-D k-d tree for k-nearest-neighbour and nearest-point queries.
//!
//! Results are ordered by `(squared distance, point index)`, so queries are exactly
//! reproducible and ties resolve to the lower index.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::geometry::Point3;
use crate::scalar::Real;

const LEAF_SIZE: usize = 12;

#[derive(Debug, Clone)]
enum Node<T> {
    Leaf { start: u32, end: u32 },
    Split { axis: u8, value: T, left: u32, right: u32 },
}

#[derive(Debug, Clone)]
pub struct KdTree<T> {
    points: Vec<Point3<T>>,
    order: Vec<u32>,
    nodes: Vec<Node<T>>,
}

/// A neighbour returned by a query: squared distance and point index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor<T> {
    pub dist2: T,
    pub index: usize,
}

impl<T: Real> Neighbor<T> {
    fn cmp_key(&self, other: &Self) -> Ordering {
        self.dist2
            .partial_cmp(&other.dist2)
            .unwrap_or(Ordering::Equal)
            .then(self.index.cmp(&other.index))
    }
}

// max-heap on (dist2, index)
struct HeapItem<T>(Neighbor<T>);

impl<T: Real> PartialEq for HeapItem<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for HeapItem<T> {}
impl<T: Real> PartialOrd for HeapItem<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for HeapItem<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp_key(&other.0)
    }
}

impl<T: Real> KdTree<T> {
    pub fn new(points: &[Point3<T>]) -> Self {
        assert!(points.len() < u32::MAX as usize, "too many points for a k-d tree");
        let mut tree = Self {
            points: points.to_vec(),
            order: (0..points.len() as u32).collect(),
            nodes: Vec::new(),
        };
        if !points.is_empty() {
            let mut order = std::mem::take(&mut tree.order);
            tree.build(&mut order, 0);
            tree.order = order;
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> Point3<T> {
        self.points[i]
    }

    fn build(&mut self, idx: &mut [u32], offset: u32) -> u32 {
        let node_id = self.nodes.len() as u32;
        if idx.len() <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start: offset, end: offset + idx.len() as u32 });
            return node_id;
        }
        let (lo, hi) = self.bounds(idx);
        let extent = hi - lo;
        let axis = if extent.x >= extent.y && extent.x >= extent.z {
            0
        } else if extent.y >= extent.z {
            1
        } else {
            2
        };
        let mid = idx.len() / 2;
        let pts = &self.points;
        idx.select_nth_unstable_by(mid, |&a, &b| {
            pts[a as usize]
                .component(axis)
                .partial_cmp(&pts[b as usize].component(axis))
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        let value = self.points[idx[mid] as usize].component(axis);
        self.nodes.push(Node::Leaf { start: 0, end: 0 });
        let (l, r) = idx.split_at_mut(mid);
        let left = self.build(l, offset);
        let right = self.build(r, offset + mid as u32);
        self.nodes[node_id as usize] = Node::Split { axis: axis as u8, value, left, right };
        node_id
    }

    fn bounds(&self, idx: &[u32]) -> (Point3<T>, Point3<T>) {
        let first = self.points[idx[0] as usize];
        idx.iter().fold((first, first), |(lo, hi), &i| {
            let p = self.points[i as usize];
            (
                Point3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z)),
                Point3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z)),
            )
        })
    }

    /// The `k` nearest points to `query`, nearest first, skipping index `exclude`.
    pub fn knn(&self, query: Point3<T>, k: usize, exclude: Option<usize>) -> Vec<Neighbor<T>> {
        if k == 0 || self.is_empty() {
            return Vec::new();
        }
        let mut heap = BinaryHeap::with_capacity(k + 1);
        self.knn_rec(0, query, k, exclude, &mut heap);
        let mut out: Vec<_> = heap.into_iter().map(|h| h.0).collect();
        out.sort_by(|a, b| a.cmp_key(b));
        out
    }

    fn knn_rec(
        &self,
        node: u32,
        query: Point3<T>,
        k: usize,
        exclude: Option<usize>,
        heap: &mut BinaryHeap<HeapItem<T>>,
    ) {
        match self.nodes[node as usize] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start as usize..end as usize] {
                    let index = i as usize;
                    if Some(index) == exclude {
                        continue;
                    }
                    let cand = Neighbor { dist2: self.points[index].distance_squared(query), index };
                    if heap.len() < k {
                        heap.push(HeapItem(cand));
                    } else if let Some(top) = heap.peek() {
                        if cand.cmp_key(&top.0) == Ordering::Less {
                            heap.pop();
                            heap.push(HeapItem(cand));
                        }
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = query.component(axis as usize) - value;
                let (near, far) = if diff < T::zero() { (left, right) } else { (right, left) };
                self.knn_rec(near, query, k, exclude, heap);
                // keep equal-distance candidates reachable so ties resolve by index
                let full = heap.len() >= k;
                if !full || heap.peek().is_some_and(|top| diff * diff <= top.0.dist2) {
                    self.knn_rec(far, query, k, exclude, heap);
                }
            }
        }
    }

    /// All points within squared distance `radius2` of `query`, ordered by
    /// `(squared distance, index)`.
    pub fn within(&self, query: Point3<T>, radius2: T) -> Vec<Neighbor<T>> {
        let mut out = Vec::new();
        if !self.is_empty() {
            self.within_rec(0, query, radius2, &mut out);
        }
        out.sort_by(|a, b| a.cmp_key(b));
        out
    }

    fn within_rec(&self, node: u32, query: Point3<T>, radius2: T, out: &mut Vec<Neighbor<T>>) {
        match self.nodes[node as usize] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start as usize..end as usize] {
                    let dist2 = self.points[i as usize].distance_squared(query);
                    if dist2 <= radius2 {
                        out.push(Neighbor { dist2, index: i as usize });
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = query.component(axis as usize) - value;
                let (near, far) = if diff < T::zero() { (left, right) } else { (right, left) };
                self.within_rec(near, query, radius2, out);
                if diff * diff <= radius2 {
                    self.within_rec(far, query, radius2, out);
                }
            }
        }
    }

    /// Nearest point to `query`, ties broken by lower index.
    pub fn nearest(&self, query: Point3<T>) -> Option<Neighbor<T>> {
        self.knn(query, 1, None).into_iter().next()
    }
}
