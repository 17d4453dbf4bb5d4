//! Static 3-d tree for exact nearest-neighbor queries.

use crate::geometry::{squared_distance, Point};

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Immutable kd-tree over a point set. Queries return exact squared
/// distances and break ties toward the smallest original index.
#[derive(Debug, Clone)]
pub struct KdTree {
    points: Vec<Point>,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub squared_distance: f64,
}

impl Neighbor {
    #[inline]
    fn better_than(&self, other: &Neighbor) -> bool {
        self.squared_distance < other.squared_distance
            || (self.squared_distance == other.squared_distance && self.index < other.index)
    }
}

impl KdTree {
    pub fn build(points: &[Point]) -> Self {
        let mut tree = Self {
            points: points.to_vec(),
            order: (0..points.len()).collect(),
            nodes: Vec::new(),
        };
        if !points.is_empty() {
            tree.build_node(0, points.len());
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for &i in &self.order[start..end] {
            for a in 0..3 {
                lo[a] = lo[a].min(self.points[i][a]);
                hi[a] = hi[a].max(self.points[i][a]);
            }
        }
        let axis = (0..3)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
            .unwrap();
        if hi[axis] == lo[axis] {
            // all points coincide
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let mid = start + (end - start) / 2;
        let points = &self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&i, &j| {
            points[i][axis].total_cmp(&points[j][axis])
        });
        let value = self.points[self.order[mid]][axis];
        self.nodes.push(Node::Split {
            axis,
            value,
            left: 0,
            right: 0,
        });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        if let Node::Split {
            left: l, right: r, ..
        } = &mut self.nodes[id]
        {
            *l = left;
            *r = right;
        }
        id
    }

    /// Nearest point to `query`, or `None` for an empty tree.
    pub fn nearest(&self, query: &Point) -> Option<Neighbor> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = Neighbor {
            index: usize::MAX,
            squared_distance: f64::INFINITY,
        };
        self.search_nearest(0, query, &mut best);
        Some(best)
    }

    fn search_nearest(&self, node: usize, query: &Point, best: &mut Neighbor) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let cand = Neighbor {
                        index: i,
                        squared_distance: squared_distance(query, &self.points[i]),
                    };
                    if cand.better_than(best) {
                        *best = cand;
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = query[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search_nearest(near, query, best);
                // equal bound still searched so ties resolve by index
                if diff * diff <= best.squared_distance {
                    self.search_nearest(far, query, best);
                }
            }
        }
    }

    /// The `k` nearest points ordered by (distance, index).
    pub fn k_nearest(&self, query: &Point, k: usize) -> Vec<Neighbor> {
        let mut found = Vec::with_capacity(k + 1);
        if k > 0 && !self.nodes.is_empty() {
            self.search_k(0, query, k, &mut found);
        }
        found
    }

    fn search_k(&self, node: usize, query: &Point, k: usize, found: &mut Vec<Neighbor>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let cand = Neighbor {
                        index: i,
                        squared_distance: squared_distance(query, &self.points[i]),
                    };
                    if found.len() == k && !cand.better_than(found.last().unwrap()) {
                        continue;
                    }
                    let pos = found.partition_point(|n| n.better_than(&cand));
                    found.insert(pos, cand);
                    found.truncate(k);
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = query[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search_k(near, query, k, found);
                let bound = if found.len() < k {
                    f64::INFINITY
                } else {
                    found.last().unwrap().squared_distance
                };
                if diff * diff <= bound {
                    self.search_k(far, query, k, found);
                }
            }
        }
    }
}
