//! Bernoulli bonds with probabilities `ũ = 1 − e^{−u}`, the augmented set
//! `B₊`, clusters and cluster ranges.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cells::CellList;
use crate::error::{Error, Result};
use crate::particles::{distance, Configuration, Window};
use crate::potentials::DecomposedPotential;
use crate::rng::Stream;

/// Unordered index pairs `(i, j)` with `i < j` into a configuration's
/// combined particle list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BondSet {
    edges: BTreeSet<(usize, usize)>,
}

impl BondSet {
    pub fn new() -> Self {
        BondSet::default()
    }

    pub fn from_edges(edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut b = BondSet::new();
        for (i, j) in edges {
            b.insert(i, j)?;
        }
        Ok(b)
    }

    pub fn insert(&mut self, i: usize, j: usize) -> Result<bool> {
        if i == j {
            return Err(Error::InvalidBond(i, j));
        }
        Ok(self.edges.insert((i.min(j), i.max(j))))
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn is_subset(&self, other: &BondSet) -> bool {
        self.edges.is_subset(&other.edges)
    }

    /// Every index must refer to a particle of `config`.
    pub fn validate(&self, config: &Configuration) -> Result<()> {
        for &(i, j) in &self.edges {
            if j >= config.len() {
                return Err(Error::InvalidBond(i, j));
            }
        }
        Ok(())
    }
}

/// Candidate pairs within max-norm distance `cutoff`, sorted.
fn close_pairs(config: &Configuration, cutoff: f64) -> Vec<(usize, usize)> {
    let pts: Vec<[f64; 2]> = config.particles().map(|p| p.x).collect();
    let cells = CellList::from_points(cutoff.max(0.25), &pts);
    let mut out = Vec::new();
    for (i, x) in pts.iter().enumerate() {
        for j in cells.neighbours(*x) {
            if j > i {
                out.push((i, j));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Draws each bond touching `Λ_n` independently with probability `ũ`.
pub fn sample_bonds(config: &Configuration, dec: &DecomposedPotential, scope: &Window, rng: &mut Stream) -> BondSet {
    let mut b = BondSet::new();
    let cutoff = dec.smooth_range() * dec.base().norm().max_norm_ratio();
    if cutoff == 0.0 {
        return b;
    }
    for (i, j) in close_pairs(config, cutoff) {
        let (p, q) = (config.particle(i), config.particle(j));
        if !(scope.contains(p.x) || scope.contains(q.x)) {
            continue;
        }
        let prob = dec.utilde_pair(p, q);
        if prob > 0.0 && rng.gen::<f64>() < prob {
            b.edges.insert((i, j));
        }
    }
    b
}

/// `B₊ = B ∪ {pairs in K″}`.
pub fn augment_bplus(config: &Configuration, bonds: &BondSet, dec: &DecomposedPotential) -> BondSet {
    let mut b = bonds.clone();
    let pot = dec.base();
    let eps = dec.eps();
    for (i, j) in close_pairs(config, dec.c_k) {
        let (p, q) = (config.particle(i), config.particle(j));
        let r = pot.hard_core_radius(p.spin.index(), q.spin.index());
        if distance(p, q, pot.norm()) <= r + 2.0 * eps {
            b.edges.insert((i, j));
        }
    }
    b
}

/// Connected components under a bond set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterPartition {
    labels: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl ClusterPartition {
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn cluster_of(&self, i: usize) -> &[usize] {
        &self.members[self.labels[i]]
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.members
    }

    pub fn connected(&self, i: usize, j: usize) -> bool {
        self.labels[i] == self.labels[j]
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Clusters of `n` particles. Labels are numbered by smallest member.
pub fn clusters(n: usize, bonds: &BondSet) -> ClusterPartition {
    let mut uf = UnionFind::new(n);
    for (i, j) in bonds.iter() {
        uf.union(i, j);
    }
    let mut labels = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut root_label = vec![usize::MAX; n];
    for i in 0..n {
        let r = uf.find(i);
        if root_label[r] == usize::MAX {
            root_label[r] = members.len();
            members.push(Vec::new());
        }
        labels[i] = root_label[r];
        members[root_label[r]].push(i);
    }
    ClusterPartition { labels, members }
}

/// `sup{|y′| : y′ connected to Λ_{n′}}` in the max norm; `None` when no
/// particle lies in `inner`.
pub fn cluster_range(config: &Configuration, bplus: &BondSet, inner: &Window) -> Option<f64> {
    let part = clusters(config.len(), bplus);
    let mut hit = vec![false; part.clusters().len()];
    for (i, p) in config.particles().enumerate() {
        if inner.contains(p.x) {
            hit[part.label(i)] = true;
        }
    }
    config
        .particles()
        .enumerate()
        .filter(|(i, _)| hit[part.label(*i)])
        .map(|(_, p)| p.radius())
        .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))))
}

/// SHA-256 of the configuration's JSON form.
pub fn configuration_hash(config: &Configuration) -> Result<String> {
    let digest = Sha256::digest(config.to_json()?.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// On-disk bond set tied to the configuration it indexes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BondFile {
    pub configuration_hash: String,
    pub edges: Vec<(usize, usize)>,
}

impl BondFile {
    pub fn new(config: &Configuration, bonds: &BondSet) -> Result<Self> {
        Ok(BondFile { configuration_hash: configuration_hash(config)?, edges: bonds.iter().collect() })
    }

    /// Rebuilds the bond set, refusing a configuration other than the one
    /// the bonds were recorded for.
    pub fn bonds_for(&self, config: &Configuration) -> Result<BondSet> {
        let actual = configuration_hash(config)?;
        if actual != self.configuration_hash {
            return Err(Error::HashMismatch { expected: self.configuration_hash.clone(), actual });
        }
        let b = BondSet::from_edges(self.edges.iter().copied())?;
        b.validate(config)?;
        Ok(b)
    }
}
