//! Average-linkage (UPGMA) agglomerative clustering over a condensed
//! distance matrix, with cannot-link constraints and a flat threshold cut.
//!
//! Clusters are numbered in creation order: leaves are `0..n`, the cluster
//! produced by the `k`-th merge is `n + k`. Among equally close candidate
//! pairs the one with the lexicographically smallest `(a, b)`, `a < b`, is
//! merged first.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{FcgError, Result};

/// Distance assigned to cannot-linked pairs. Strictly above any usable cut.
pub const SENTINEL: f64 = 1.0e6;

/// Upper triangle of a symmetric `n x n` distance matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensedMatrix {
    n: usize,
    values: Vec<f64>,
}

fn condensed_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl CondensedMatrix {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != condensed_len(n) {
            return Err(FcgError::InvalidConfig(format!(
                "condensed matrix for {n} items needs {} entries, got {}",
                condensed_len(n),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(FcgError::InvalidConfig(format!(
                "distance {v} is not a finite non-negative value"
            )));
        }
        Ok(CondensedMatrix { n, values })
    }

    /// Evaluates `metric` on every pair `i < j`. Rows are computed in parallel.
    pub fn from_fn<F, E>(n: usize, metric: F) -> std::result::Result<Self, E>
    where
        F: Fn(usize, usize) -> std::result::Result<f64, E> + Sync,
        E: Send,
    {
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| ((i + 1)..n).map(|j| metric(i, j)).collect())
            .collect::<std::result::Result<_, E>>()?;
        Ok(CondensedMatrix {
            n,
            values: rows.concat(),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.values[self.index(i, j)]
        }
    }
}

/// Unordered item pairs that may never share a cluster.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    cannot_link: HashSet<(usize, usize)>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `{a, b}`. Self-pairs are ignored.
    pub fn add(&mut self, a: usize, b: usize) {
        if a != b {
            self.cannot_link.insert((a.min(b), a.max(b)));
        }
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.cannot_link.contains(&(a.min(b), a.max(b)))
    }

    pub fn len(&self) -> usize {
        self.cannot_link.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cannot_link.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cannot_link.iter().copied()
    }
}

impl FromIterator<(usize, usize)> for ConstraintSet {
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        let mut set = ConstraintSet::new();
        for (a, b) in iter {
            set.add(a, b);
        }
        set
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
}

/// Flat clustering: each cluster lists item indices ascending, clusters are
/// ordered by their smallest member.
pub type Partition = Vec<Vec<usize>>;

#[derive(Debug, Clone, Copy)]
struct Candidate {
    dist: f64,
    a: usize,
    b: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist
            .total_cmp(&other.dist)
            .then(self.a.cmp(&other.a))
            .then(self.b.cmp(&other.b))
    }
}

/// Constrained UPGMA.
///
/// Works on a dense slot matrix: a merged cluster takes over the slot of its
/// first input. Candidate pairs sit in a min-heap keyed by
/// `(distance, a, b)`; an entry is stale once either cluster id is retired.
/// Pair distances never change while both clusters exist, so staleness is
/// the only invalidation needed.
pub fn linkage(matrix: &CondensedMatrix, constraints: &ConstraintSet) -> Dendrogram {
    let n = matrix.len();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    if n < 2 {
        return Dendrogram { n, merges };
    }

    let mut dist = vec![0.0f64; n * n];
    let mut blocked = vec![false; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = matrix.get(i, j);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    for (a, b) in constraints.iter() {
        if a < n && b < n {
            blocked[a * n + b] = true;
            blocked[b * n + a] = true;
        }
    }

    // slot -> cluster id, cluster id -> slot (None once retired)
    let mut slot_id: Vec<usize> = (0..n).collect();
    let mut id_slot: Vec<Option<usize>> = (0..n).map(Some).collect();
    let mut size = vec![1usize; n];
    let mut active: Vec<usize> = (0..n).collect();

    let mut heap = BinaryHeap::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            if !blocked[i * n + j] {
                heap.push(Reverse(Candidate { dist: dist[i * n + j], a: i, b: j }));
            }
        }
    }

    while let Some(Reverse(c)) = heap.pop() {
        let (Some(sa), Some(sb)) = (id_slot[c.a], id_slot[c.b]) else {
            continue;
        };
        if c.dist >= SENTINEL {
            break;
        }
        let new_id = n + merges.len();
        let (na, nb) = (size[sa], size[sb]);
        let total = na + nb;
        merges.push(Merge { a: c.a, b: c.b, height: c.dist, size: total });

        active.retain(|&s| s != sb);
        for &m in &active {
            if m == sa {
                continue;
            }
            let d = (na as f64 * dist[sa * n + m] + nb as f64 * dist[sb * n + m]) / total as f64;
            dist[sa * n + m] = d;
            dist[m * n + sa] = d;
            let bl = blocked[sa * n + m] || blocked[sb * n + m];
            blocked[sa * n + m] = bl;
            blocked[m * n + sa] = bl;
            if !bl {
                heap.push(Reverse(Candidate { dist: d, a: slot_id[m], b: new_id }));
            }
        }
        id_slot[c.a] = None;
        id_slot[c.b] = None;
        id_slot.push(Some(sa));
        slot_id[sa] = new_id;
        size[sa] = total;
        if active.len() == 1 {
            break;
        }
    }
    Dendrogram { n, merges }
}

impl Dendrogram {
    pub fn leaves(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Applies every merge with `height <= threshold`.
    pub fn cut(&self, threshold: f64) -> Partition {
        let total = self.n + self.merges.len();
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (k, m) in self.merges.iter().enumerate() {
            if m.height <= threshold {
                let id = self.n + k;
                let ra = find(&mut parent, m.a);
                let rb = find(&mut parent, m.b);
                parent[ra] = id;
                parent[rb] = id;
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for leaf in 0..self.n {
            let root = find(&mut parent, leaf);
            groups.entry(root).or_default().push(leaf);
        }
        let mut partition: Partition = groups.into_values().collect();
        partition.sort_by_key(|c| c[0]);
        partition
    }

    /// One `merge <a> <b> <height> <size>` line per merge.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for m in &self.merges {
            let _ = writeln!(out, "merge {} {} {} {}", m.a, m.b, m.height, m.size);
        }
        out
    }
}

/// Builds the pairwise matrix with `metric`, runs [`linkage`] and cuts at
/// `threshold`.
pub fn cluster<T, F, E>(
    items: &[T],
    metric: F,
    constraints: &ConstraintSet,
    threshold: f64,
) -> std::result::Result<Partition, E>
where
    T: Sync,
    F: Fn(&T, &T) -> std::result::Result<f64, E> + Sync,
    E: Send,
{
    cluster_with_dendrogram(items, metric, constraints, threshold).map(|(p, _)| p)
}

/// [`cluster`], also returning the dendrogram it was cut from.
pub fn cluster_with_dendrogram<T, F, E>(
    items: &[T],
    metric: F,
    constraints: &ConstraintSet,
    threshold: f64,
) -> std::result::Result<(Partition, Dendrogram), E>
where
    T: Sync,
    F: Fn(&T, &T) -> std::result::Result<f64, E> + Sync,
    E: Send,
{
    let matrix = CondensedMatrix::from_fn(items.len(), |i, j| metric(&items[i], &items[j]))?;
    let dendrogram = linkage(&matrix, constraints);
    Ok((dendrogram.cut(threshold), dendrogram))
}
