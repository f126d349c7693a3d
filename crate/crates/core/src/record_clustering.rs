//! Similarity matrices and threshold-stopped single-linkage clustering.
//!
//! Clustering runs in similarity space: starting from singletons, the pair
//! of clusters with the highest inter-cluster similarity (the maximum
//! pairwise similarity between their members) is merged while that best
//! similarity is at least the stop threshold `t_e`. Merging collapses the
//! merged clusters' rows and columns of the working matrix.
//!
//! For a fixed threshold this is equivalent to taking connected components
//! of the graph whose edges are the pairs with similarity `>= t_e`;
//! [`threshold_components`] implements that route directly with a
//! union-find and serves both as a fast path and as an independent check
//! on the agglomerative procedure.

use crate::error::{Error, Result};
use rayon::prelude::*;

/// Symmetric pairwise similarity over `n` items with a unit diagonal.
///
/// Only the strict upper triangle is stored; the diagonal is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl SimilarityMatrix {
    /// Build from a scorer over item indices. The scorer is only invoked
    /// for `i < j`, so symmetry holds by construction; every returned value
    /// must lie in `[0, 1]` or the offending pair is reported.
    pub fn build<S>(n: usize, scorer: S) -> Result<Self>
    where
        S: Fn(usize, usize) -> f64 + Sync,
    {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        let entries: Vec<f64> = pairs.par_iter().map(|&(i, j)| scorer(i, j)).collect();
        for (&(i, j), &value) in pairs.iter().zip(&entries) {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Contract(format!(
                    "scorer returned {value} for pair ({i}, {j}); similarities must be in [0, 1]"
                )));
            }
        }
        Ok(SimilarityMatrix { n, entries })
    }

    pub fn from_entries(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * (n - 1) / 2 {
            return Err(Error::Contract(format!(
                "expected {} condensed entries for n = {n}, got {}",
                n * (n - 1) / 2,
                entries.len()
            )));
        }
        SimilarityMatrix::build(n, |i, j| entries[condensed_index(n, i, j)])
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Similarity of items `i` and `j`; 1 on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.n, "index out of bounds");
        if i == j {
            1.0
        } else {
            self.entries[condensed_index(self.n, i, j)]
        }
    }
}

fn condensed_index(n: usize, i: usize, j: usize) -> usize {
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    // Row lo starts after all previous rows' entries.
    lo * n - lo * (lo + 1) / 2 + (hi - lo - 1)
}

/// Pairwise similarity matrix over a slice of items.
pub fn build_similarity_matrix<T, S>(items: &[T], scorer: S) -> Result<SimilarityMatrix>
where
    T: Sync,
    S: Fn(&T, &T) -> f64 + Sync,
{
    SimilarityMatrix::build(items.len(), |i, j| scorer(&items[i], &items[j]))
}

/// A partition of item ids `0..n` into disjoint, non-empty clusters.
///
/// Normalized form: members ascending within each cluster, clusters ordered
/// by their smallest member. All constructors normalize.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    clusters: Vec<Vec<usize>>,
}

impl Clustering {
    pub fn new(mut clusters: Vec<Vec<usize>>) -> Self {
        clusters.retain(|c| !c.is_empty());
        for cluster in &mut clusters {
            cluster.sort_unstable();
        }
        clusters.sort_by_key(|c| c[0]);
        Clustering { clusters }
    }

    /// Every item its own cluster.
    pub fn singletons(n: usize) -> Self {
        Clustering {
            clusters: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn item_count(&self) -> usize {
        self.clusters.iter().map(Vec::len).sum()
    }

    /// Sorted list of every item id in the partition.
    pub fn items(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.clusters.iter().flatten().copied().collect();
        ids.sort_unstable();
        ids
    }

    /// Map from item id to the index of its cluster in `clusters()`.
    pub fn labels(&self) -> std::collections::HashMap<usize, usize> {
        let mut labels = std::collections::HashMap::new();
        for (idx, cluster) in self.clusters.iter().enumerate() {
            for &item in cluster {
                labels.insert(item, idx);
            }
        }
        labels
    }

    /// Check disjointness and coverage of `0..n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let items = self.items();
        let expect: Vec<usize> = (0..n).collect();
        if items != expect {
            return Err(Error::Contract(format!(
                "partition does not cover 0..{n} exactly: got {} item(s)",
                items.len()
            )));
        }
        Ok(())
    }

    /// True when every cluster of `self` is contained in one cluster of
    /// `coarser`.
    pub fn refines(&self, coarser: &Clustering) -> bool {
        let labels = coarser.labels();
        self.clusters.iter().all(|cluster| {
            let Some(&first) = cluster.first().and_then(|i| labels.get(i)) else {
                return false;
            };
            cluster.iter().all(|i| labels.get(i) == Some(&first))
        })
    }
}

/// One merge performed by the agglomerative loop: the record pair that
/// realized the inter-cluster maximum, and its similarity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeStep {
    pub item_a: usize,
    pub item_b: usize,
    pub similarity: f64,
}

/// Threshold-stopped single-linkage clustering.
pub fn single_linkage(matrix: &SimilarityMatrix, t_e: f64) -> Clustering {
    single_linkage_steps(matrix, t_e).0
}

/// Single linkage that also reports, in merge order, the item pair behind
/// each accepted merge. Ties on similarity pick the pair of clusters with
/// the lexicographically smallest (min id, max id), ids being each
/// cluster's smallest member.
pub fn single_linkage_steps(matrix: &SimilarityMatrix, t_e: f64) -> (Clustering, Vec<MergeStep>) {
    let n = matrix.len();
    if n == 0 {
        return (Clustering::new(Vec::new()), Vec::new());
    }

    // Slot i starts as item i. A merge keeps the slot with the smaller
    // representative, so representatives never change for surviving slots.
    let mut active: Vec<bool> = vec![true; n];
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    // Working similarities between slots and the item pair realizing each.
    let mut sim = vec![0.0_f64; n * n];
    let mut witness = vec![(0usize, 0usize); n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let s = matrix.get(i, j);
            sim[i * n + j] = s;
            sim[j * n + i] = s;
            witness[i * n + j] = (i, j);
            witness[j * n + i] = (i, j);
        }
    }

    // Per-slot best partner, kept exact: among equal similarities the
    // partner forming the smaller (min rep, max rep) pair wins.
    let mut best: Vec<Option<(usize, f64)>> = (0..n)
        .map(|i| best_partner(i, n, &active, &sim))
        .collect();

    let mut steps = Vec::new();
    loop {
        let mut chosen: Option<(usize, usize, f64)> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            if let Some((j, s)) = best[i] {
                let better = match chosen {
                    None => true,
                    Some((ci, cj, cs)) => {
                        s > cs || (s == cs && pair_key(i, j) < pair_key(ci, cj))
                    }
                };
                if better {
                    chosen = Some((i, j, s));
                }
            }
        }
        let Some((a, b, s)) = chosen else { break };
        if s < t_e {
            break;
        }

        let (keep, drop) = if a < b { (a, b) } else { (b, a) };
        steps.push(MergeStep {
            item_a: witness[keep * n + drop].0,
            item_b: witness[keep * n + drop].1,
            similarity: s,
        });

        let moved = std::mem::take(&mut members[drop]);
        members[keep].extend(moved);
        active[drop] = false;
        best[drop] = None;

        for k in 0..n {
            if !active[k] || k == keep {
                continue;
            }
            let via_keep = sim[keep * n + k];
            let via_drop = sim[drop * n + k];
            if via_drop > via_keep || (via_drop == via_keep && witness[drop * n + k] < witness[keep * n + k])
            {
                sim[keep * n + k] = via_drop;
                sim[k * n + keep] = via_drop;
                witness[keep * n + k] = witness[drop * n + k];
                witness[k * n + keep] = witness[drop * n + k];
            }
            // Slot k's best partner can only have improved toward `keep`;
            // a stale pointer at `drop` redirects there.
            let s_k = sim[k * n + keep];
            match best[k] {
                Some((j, bs)) if j == drop || j == keep => {
                    if s_k >= bs {
                        best[k] = Some((keep, s_k));
                    } else {
                        best[k] = best_partner(k, n, &active, &sim);
                    }
                }
                Some((j, bs)) => {
                    if s_k > bs || (s_k == bs && pair_key(k, keep) < pair_key(k, j)) {
                        best[k] = Some((keep, s_k));
                    }
                }
                None => best[k] = Some((keep, s_k)),
            }
        }
        best[keep] = best_partner(keep, n, &active, &sim);
    }

    let clusters: Vec<Vec<usize>> = (0..n)
        .filter(|&i| active[i])
        .map(|i| std::mem::take(&mut members[i]))
        .collect();
    (Clustering::new(clusters), steps)
}

fn pair_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn best_partner(i: usize, n: usize, active: &[bool], sim: &[f64]) -> Option<(usize, f64)> {
    let mut out: Option<(usize, f64)> = None;
    for j in 0..n {
        if j == i || !active[j] {
            continue;
        }
        let s = sim[i * n + j];
        let better = match out {
            None => true,
            Some((bj, bs)) => s > bs || (s == bs && pair_key(i, j) < pair_key(i, bj)),
        };
        if better {
            out = Some((j, s));
        }
    }
    out
}

/// Disjoint-set forest with union by size and path halving.
#[derive(Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, x: usize, y: usize) {
        let mut a = self.find(x);
        let mut b = self.find(y);
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }

    /// The partition induced by the unions performed so far.
    pub fn into_clustering(mut self) -> Clustering {
        let n = self.parent.len();
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
        for x in 0..n {
            let root = self.find(x);
            groups[root].push(x);
        }
        Clustering::new(groups)
    }
}

/// Connected components of the graph with an edge wherever similarity is
/// at least `t_e`. Agrees with [`single_linkage`] on every input.
pub fn threshold_components(matrix: &SimilarityMatrix, t_e: f64) -> Clustering {
    let n = matrix.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if matrix.get(i, j) >= t_e {
                uf.union(i, j);
            }
        }
    }
    uf.into_clustering()
}
