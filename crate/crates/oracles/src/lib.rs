//! Slow, direct reference implementations. Everything here works on plain arrays and is
//! written without reference to the core library's formulas.

pub type P3 = [f64; 3];

fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: P3) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(a: f64, x: P3, y: P3) -> P3 {
    [a * x[0] + y[0], a * x[1] + y[1], a * x[2] + y[2]]
}

fn unit(a: P3) -> P3 {
    let n = norm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Circle through `p` tangent to `t` and passing through `q`, as centre, radius, the two
/// in-plane axes (`t` and the inward normal) and the swept angle to reach `q`.
/// `None` for (nearly) straight configurations.
pub struct Circle {
    pub centre: P3,
    pub radius: f64,
    pub t: P3,
    pub n: P3,
    pub sweep: f64,
}

/// Solves for the circle directly: the centre is `p + R n` with `n ⟂ t` in the plane of
/// `t` and `q - p`, and `|centre - q| = R` gives `R = |q - p|² / (2 (q - p)·n)`.
pub fn circle_through(p: P3, t: P3, q: P3) -> Option<Circle> {
    let t = unit(t);
    let c = sub(q, p);
    let perp = axpy(-dot(c, t), t, c);
    if norm(perp) < 1e-9 * norm(c) {
        return None;
    }
    let n = unit(perp);
    let radius = dot(c, c) / (2.0 * dot(c, n));
    let centre = axpy(radius, n, p);
    // position of q in the (t, n) frame around the centre
    let rel = sub(q, centre);
    let (x, y) = (dot(rel, t), -dot(rel, n));
    let mut sweep = x.atan2(y);
    if sweep < 0.0 {
        sweep += 2.0 * std::f64::consts::PI;
    }
    Some(Circle { centre, radius, t, n, sweep })
}

impl Circle {
    /// Point at angle `theta` from the start.
    pub fn at(&self, theta: f64) -> P3 {
        let (s, c) = theta.sin_cos();
        let r = self.radius;
        let p = axpy(-r * c, self.n, self.centre);
        axpy(r * s, self.t, p)
    }
}

/// Arc length by composite Gauss-Legendre quadrature of the speed `|γ'(θ)|`, with the
/// derivative itself taken by central differences of the parametrisation.
pub fn arc_length_quadrature(p: P3, t: P3, q: P3) -> f64 {
    let Some(circ) = circle_through(p, t, q) else {
        return norm(sub(q, p));
    };
    const NODES: [f64; 5] = [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
    const WEIGHTS: [f64; 5] = [0.236_926_885_056_189, 0.478_628_670_499_366, 0.568_888_888_888_889, 0.478_628_670_499_366, 0.236_926_885_056_189];
    let pieces = 64;
    let h = circ.sweep / pieces as f64;
    let eps = 1e-5 * circ.sweep.max(1e-3);
    let speed = |th: f64| norm(sub(circ.at(th + eps), circ.at(th - eps))) / (2.0 * eps);
    let mut total = 0.0;
    for i in 0..pieces {
        let mid = (i as f64 + 0.5) * h;
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            total += w * speed(mid + 0.5 * h * x) * 0.5 * h;
        }
    }
    total
}

/// Unit tangent at `q` by a one-sided second-order finite difference along the circle.
pub fn end_tangent_fd(p: P3, t: P3, q: P3) -> P3 {
    let Some(circ) = circle_through(p, t, q) else {
        return unit(sub(q, p));
    };
    let h = 1e-4 * circ.sweep.min(1.0);
    let (a, b, c) = (circ.at(circ.sweep), circ.at(circ.sweep - h), circ.at(circ.sweep - 2.0 * h));
    // 3 f(x) - 4 f(x - h) + f(x - 2h)
    unit([
        3.0 * a[0] - 4.0 * b[0] + c[0],
        3.0 * a[1] - 4.0 * b[1] + c[1],
        3.0 * a[2] - 4.0 * b[2] + c[2],
    ])
}

/// Whether the arc from `(p, tp)` to `q` arrives within `epsilon` of `tq`, using the
/// finite-difference end tangent.
pub fn is_confluent(p: P3, tp: P3, q: P3, tq: P3, epsilon: f64) -> bool {
    let c = sub(q, p);
    // start tangent pointing straight away: no finite arc
    if dot(unit(tp), unit(c)) < -1.0 + 1e-9 {
        return false;
    }
    let e = end_tangent_fd(p, tp, q);
    dot(e, unit(tq)).clamp(-1.0, 1.0).acos() <= epsilon
}

/// Minimum arborescence weight over the nodes reachable from `root`, by enumerating every
/// choice of incoming arc. Arcs are `(from, to, weight)`.
pub fn brute_arborescence(n: usize, arcs: &[(usize, usize, f64)], root: usize) -> f64 {
    let mut reach = vec![false; n];
    reach[root] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for &(u, v, _) in arcs {
            if reach[u] && !reach[v] {
                reach[v] = true;
                changed = true;
            }
        }
    }
    let targets: Vec<usize> = (0..n).filter(|&v| v != root && reach[v]).collect();
    let incoming: Vec<Vec<usize>> = targets
        .iter()
        .map(|&v| (0..arcs.len()).filter(|&i| arcs[i].1 == v && arcs[i].0 != v && reach[arcs[i].0]).collect())
        .collect();
    let mut best = f64::INFINITY;
    let mut choice = vec![0usize; targets.len()];
    loop {
        let mut parent = vec![usize::MAX; n];
        let mut w = 0.0;
        for (k, &v) in targets.iter().enumerate() {
            let a = arcs[incoming[k][choice[k]]];
            parent[v] = a.0;
            w += a.2;
        }
        let acyclic = targets.iter().all(|&v| {
            let mut x = v;
            for _ in 0..=n {
                if x == root {
                    return true;
                }
                x = parent[x];
            }
            false
        });
        if acyclic && w < best {
            best = w;
        }
        // odometer increment
        let mut k = 0;
        while k < choice.len() {
            choice[k] += 1;
            if choice[k] < incoming[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
        if k == choice.len() {
            break;
        }
    }
    if targets.is_empty() {
        0.0
    } else {
        best
    }
}

/// Minimum spanning tree weight of the component containing `root`, by exhaustive search
/// over edge subsets with union-find pruning. Edges are `(u, v, weight)`.
pub fn brute_spanning_tree(n: usize, edges: &[(usize, usize, f64)], root: usize) -> f64 {
    let mut comp = vec![false; n];
    comp[root] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for &(u, v, _) in edges {
            if comp[u] != comp[v] {
                comp[u] = true;
                comp[v] = true;
                changed = true;
            }
        }
    }
    let need = comp.iter().filter(|c| **c).count() - 1;
    let usable: Vec<(usize, usize, f64)> = edges.iter().copied().filter(|e| comp[e.0] && e.0 != e.1).collect();

    fn find(parent: &[usize], mut x: usize) -> usize {
        while parent[x] != x {
            x = parent[x];
        }
        x
    }

    fn search(edges: &[(usize, usize, f64)], at: usize, left: usize, parent: &mut Vec<usize>, w: f64, best: &mut f64) {
        if left == 0 {
            *best = best.min(w);
            return;
        }
        if edges.len() - at < left {
            return;
        }
        let (u, v, ew) = edges[at];
        let (ru, rv) = (find(parent, u), find(parent, v));
        if ru != rv {
            parent[ru] = rv;
            search(edges, at + 1, left - 1, parent, w + ew, best);
            parent[ru] = ru;
        }
        search(edges, at + 1, left, parent, w, best);
    }

    let mut best = f64::INFINITY;
    search(&usable, 0, need, &mut (0..n).collect(), 0.0, &mut best);
    best
}

/// Indices of the `k` nearest points to `points[i]` (excluding `i`), ties by index.
pub fn brute_knn(points: &[P3], i: usize, k: usize) -> Vec<usize> {
    let mut d: Vec<(f64, usize)> =
        (0..points.len()).filter(|&j| j != i).map(|j| (dot(sub(points[j], points[i]), sub(points[j], points[i])), j)).collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    d.truncate(k);
    d.into_iter().map(|x| x.1).collect()
}
