//! Decorated marked trees: a tree, a curve class on each vertex, and marks
//! `1..=n` placed on vertices. Stability, canonical keys, enumeration of all
//! stable trees of a given class, and edge contraction.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nodalcoh::{self, DegreeTree, DegreeTreeError};
use crate::toricfan::{effective_decompositions, CurveClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Maps,
    Quasimaps,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Maps => "maps",
            Mode::Quasimaps => "quasimaps",
        })
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "maps" => Ok(Mode::Maps),
            "quasimaps" => Ok(Mode::Quasimaps),
            other => Err(format!("unknown mode `{other}` (expected maps or quasimaps)")),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error(transparent)]
    Shape(#[from] DegreeTreeError),
    #[error("mark {mark} is placed on vertex {vertex}, which does not exist")]
    MarkOutOfRange { mark: usize, vertex: usize },
    #[error("vertex classes have inconsistent lengths")]
    ClassLength,
    #[error("vertex classes sum to {found}, expected {expected}")]
    ClassSum { expected: CurveClass, found: CurveClass },
}

/// A tree with a curve class per vertex; mark `i` sits on vertex `marks[i - 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DecoratedTree {
    classes: Vec<CurveClass>,
    edges: Vec<(usize, usize)>,
    marks: Vec<usize>,
}

impl DecoratedTree {
    pub fn new(classes: Vec<CurveClass>, edges: Vec<(usize, usize)>, marks: Vec<usize>) -> Result<Self, TreeError> {
        nodalcoh::check_tree(classes.len(), &edges)?;
        if classes.iter().any(|c| c.len() != classes[0].len()) {
            return Err(TreeError::ClassLength);
        }
        if let Some((i, &v)) = marks.iter().enumerate().find(|(_, &v)| v >= classes.len()) {
            return Err(TreeError::MarkOutOfRange { mark: i + 1, vertex: v });
        }
        Ok(DecoratedTree { classes, edges, marks })
    }

    /// Like [`DecoratedTree::new`], also checking that the classes sum to `beta`.
    pub fn with_beta(
        classes: Vec<CurveClass>,
        edges: Vec<(usize, usize)>,
        marks: Vec<usize>,
        beta: &CurveClass,
    ) -> Result<Self, TreeError> {
        let t = Self::new(classes, edges, marks)?;
        let found = t.beta();
        if &found != beta {
            return Err(TreeError::ClassSum { expected: beta.clone(), found });
        }
        Ok(t)
    }

    /// A path with the given classes and no marks.
    pub fn chain(classes: Vec<CurveClass>) -> Self {
        let edges = (1..classes.len()).map(|i| (i - 1, i)).collect();
        Self::new(classes, edges, Vec::new()).expect("a path is a tree")
    }

    /// The one-vertex tree carrying every mark.
    pub fn single(beta: CurveClass, n: usize) -> Self {
        DecoratedTree { classes: vec![beta], edges: Vec::new(), marks: vec![0; n] }
    }

    pub fn with_marks(mut self, marks: Vec<usize>) -> Result<Self, TreeError> {
        if let Some((i, &v)) = marks.iter().enumerate().find(|(_, &v)| v >= self.classes.len()) {
            return Err(TreeError::MarkOutOfRange { mark: i + 1, vertex: v });
        }
        self.marks = marks;
        Ok(self)
    }

    pub fn classes(&self) -> &[CurveClass] {
        &self.classes
    }

    pub fn class(&self, v: usize) -> &CurveClass {
        &self.classes[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn marks(&self) -> &[usize] {
        &self.marks
    }

    pub fn num_vertices(&self) -> usize {
        self.classes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_marks(&self) -> usize {
        self.marks.len()
    }

    pub fn beta(&self) -> CurveClass {
        let mut s = CurveClass::zero(self.classes[0].len());
        for c in &self.classes {
            s += c;
        }
        s
    }

    pub fn valence(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// Mark labels (1-based) on vertex `v`, ascending.
    pub fn marks_at(&self, v: usize) -> Vec<usize> {
        self.marks.iter().enumerate().filter(|(_, &w)| w == v).map(|(i, _)| i + 1).collect()
    }

    pub fn special_points(&self, v: usize) -> usize {
        self.valence(v) + self.marks.iter().filter(|&&w| w == v).count()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_vertices()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Vertex classes as a sorted multiset.
    pub fn decomposition(&self) -> Vec<CurveClass> {
        let mut parts: Vec<CurveClass> = self.classes.iter().filter(|c| !c.is_zero()).cloned().collect();
        parts.sort();
        parts
    }

    pub fn num_zero_vertices(&self) -> usize {
        self.classes.iter().filter(|c| c.is_zero()).count()
    }

    /// Projects to a degree tree through `degree`, keeping vertex and edge order.
    pub fn degree_tree(&self, degree: impl Fn(&CurveClass) -> i64) -> DegreeTree {
        DegreeTree::new(self.classes.iter().map(degree).collect(), self.edges.clone())
            .expect("decorated trees are trees")
    }

    /// Contracts the edges with `contract[e] == true`.
    pub fn contract(&self, contract: &[bool]) -> DecoratedTree {
        assert_eq!(contract.len(), self.edges.len());
        let n = self.num_vertices();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if contract[e] {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut index = vec![usize::MAX; n];
        let mut classes: Vec<CurveClass> = Vec::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            if index[r] == usize::MAX {
                index[r] = classes.len();
                classes.push(CurveClass::zero(self.classes[0].len()));
            }
            index[v] = index[r];
            let i = index[v];
            classes[i] += &self.classes[v];
        }
        let edges =
            self.edges.iter().zip(contract).filter(|(_, &c)| !c).map(|(&(a, b), _)| (index[a], index[b])).collect();
        let marks = self.marks.iter().map(|&v| index[v]).collect();
        DecoratedTree { classes, edges, marks }
    }

    /// Same tree with vertices renumbered in canonical preorder.
    pub fn canonicalize(&self) -> DecoratedTree {
        let labels = self.vertex_labels();
        let adj = self.adjacency();
        let (_, root) = canonical_encoding(&adj, &labels);
        let mut order = Vec::with_capacity(self.num_vertices());
        let mut tree_edges = Vec::new();
        preorder(&adj, &labels, root, usize::MAX, &mut order, &mut tree_edges);
        let mut new_index = vec![0; self.num_vertices()];
        for (i, &v) in order.iter().enumerate() {
            new_index[v] = i;
        }
        DecoratedTree {
            classes: order.iter().map(|&v| self.classes[v].clone()).collect(),
            edges: tree_edges.iter().map(|&(a, b)| (new_index[a], new_index[b])).collect(),
            marks: self.marks.iter().map(|&v| new_index[v]).collect(),
        }
    }

    fn vertex_labels(&self) -> Vec<String> {
        (0..self.num_vertices())
            .map(|v| {
                let coords: Vec<String> = self.classes[v].coords().iter().map(i64::to_string).collect();
                let marks: Vec<String> = self.marks_at(v).iter().map(usize::to_string).collect();
                format!("{}|{}", coords.join(","), marks.join(","))
            })
            .collect()
    }
}

/// Canonical encoding of a decorated tree; equal iff isomorphic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalKey(pub String);

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn canonical_form(t: &DecoratedTree) -> CanonicalKey {
    let (s, _) = canonical_encoding(&t.adjacency(), &t.vertex_labels());
    CanonicalKey(s)
}

fn rooted_encoding(adj: &[Vec<usize>], labels: &[String], v: usize, parent: usize) -> String {
    let mut children: Vec<String> =
        adj[v].iter().filter(|&&w| w != parent).map(|&w| rooted_encoding(adj, labels, w, v)).collect();
    children.sort();
    let mut s = String::with_capacity(2 + labels[v].len() + children.iter().map(String::len).sum::<usize>());
    s.push('(');
    s.push_str(&labels[v]);
    for c in &children {
        s.push_str(c);
    }
    s.push(')');
    s
}

fn preorder(
    adj: &[Vec<usize>],
    labels: &[String],
    v: usize,
    parent: usize,
    order: &mut Vec<usize>,
    edges: &mut Vec<(usize, usize)>,
) {
    order.push(v);
    let mut children: Vec<(String, usize)> =
        adj[v].iter().filter(|&&w| w != parent).map(|&w| (rooted_encoding(adj, labels, w, v), w)).collect();
    children.sort();
    for (_, w) in children {
        edges.push((v, w));
        preorder(adj, labels, w, v, order, edges);
    }
}

/// The one or two centers of a tree, by repeated leaf removal.
fn centers(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &w in &adj[v] {
                if deg[w] > 1 {
                    deg[w] -= 1;
                    if deg[w] == 1 {
                        next.push(w);
                    }
                }
            }
            deg[v] = 0;
        }
        layer = next;
    }
    layer.sort_unstable();
    layer
}

/// Smallest rooted encoding over the centers, and the root achieving it.
fn canonical_encoding(adj: &[Vec<usize>], labels: &[String]) -> (String, usize) {
    centers(adj).into_iter().map(|c| (rooted_encoding(adj, labels, c, usize::MAX), c)).min().expect("nonempty tree")
}

pub fn is_stable(t: &DecoratedTree, mode: Mode) -> bool {
    (0..t.num_vertices()).all(|v| {
        let special = t.special_points(v);
        let maps_ok = !t.classes[v].is_zero() || special >= 3;
        match mode {
            Mode::Maps => maps_ok,
            Mode::Quasimaps => maps_ok && special >= 2,
        }
    })
}

type Shapes = Arc<Vec<Vec<(usize, usize)>>>;

/// Unlabeled tree shapes on `n` vertices, one per isomorphism class, as edge lists.
pub fn tree_shapes(n: usize) -> Shapes {
    static CACHE: OnceLock<Mutex<Vec<Shapes>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![Arc::new(Vec::new()), Arc::new(vec![Vec::new()])]));
    let mut guard = cache.lock().expect("shape cache poisoned");
    while guard.len() <= n {
        let k = guard.len();
        let prev = guard[k - 1].clone();
        let mut seen = BTreeMap::new();
        for shape in prev.iter() {
            for v in 0..k - 1 {
                let mut edges = shape.clone();
                edges.push((v, k - 1));
                let mut adj = vec![Vec::new(); k];
                for &(a, b) in &edges {
                    adj[a].push(b);
                    adj[b].push(a);
                }
                let labels = vec![String::new(); k];
                let (key, _) = canonical_encoding(&adj, &labels);
                seen.entry(key).or_insert(edges);
            }
        }
        guard.push(Arc::new(seen.into_values().collect()));
    }
    guard[n].clone()
}

/// Largest number of zero-class vertices a stable tree with `nonzero`
/// nonzero vertices and `n` marks can have.
pub fn zero_vertex_bound(nonzero: usize, n: usize) -> usize {
    (nonzero + n).saturating_sub(2)
}

/// All stable trees, up to isomorphism, whose nonzero vertex classes form
/// exactly the multiset `parts`.
pub fn enumerate_for_decomposition(parts: &[CurveClass], n: usize, mode: Mode) -> Vec<DecoratedTree> {
    let mut parts = parts.to_vec();
    parts.sort();
    let k = parts.len();
    if k == 0 {
        return Vec::new();
    }
    let rank = parts[0].len();
    let zero = CurveClass::zero(rank);
    let mut found: BTreeMap<CanonicalKey, DecoratedTree> = BTreeMap::new();

    for z in 0..=zero_vertex_bound(k, n) {
        let nv = k + z;
        if nv > 1 && z > 0 && 3 * z > 2 * (nv - 1) + n {
            // zero vertices need val + marks >= 3 and total valence is 2(nv - 1)
            continue;
        }
        for shape in tree_shapes(nv).iter() {
            let mut deg = vec![0usize; nv];
            for &(a, b) in shape {
                deg[a] += 1;
                deg[b] += 1;
            }
            for_each_mark_placement(nv, n, &mut |marks| {
                let mut special = deg.clone();
                for &v in marks {
                    special[v] += 1;
                }
                if mode == Mode::Quasimaps && special.iter().any(|&s| s < 2) {
                    return;
                }
                let eligible: Vec<usize> = (0..nv).filter(|&v| special[v] >= 3).collect();
                for_each_combination(&eligible, z, &mut |zeros| {
                    let rest: Vec<usize> = (0..nv).filter(|v| !zeros.contains(v)).collect();
                    for_each_multiset_permutation(&parts, &mut |perm| {
                        let mut classes = vec![zero.clone(); nv];
                        for (&v, c) in rest.iter().zip(perm) {
                            classes[v] = c.clone();
                        }
                        let t = DecoratedTree { classes, edges: shape.clone(), marks: marks.to_vec() };
                        debug_assert!(is_stable(&t, mode));
                        let key = canonical_form(&t);
                        found.entry(key).or_insert_with(|| t.canonicalize());
                    });
                });
            });
        }
    }
    for t in found.values() {
        assert!(
            t.num_zero_vertices() + 2 <= t.num_vertices() - t.num_zero_vertices() + n || t.num_vertices() == 1,
            "zero-vertex bound violated by {t:?}"
        );
    }
    found.into_values().collect()
}

/// All stable `beta`-decorated `n`-marked trees whose nonzero vertex classes
/// lie in `class_set`, one per isomorphism class, sorted by size then key.
pub fn enumerate_trees(
    beta: &CurveClass,
    n: usize,
    class_set: &[CurveClass],
    mode: Mode,
    max_parts: usize,
) -> Vec<DecoratedTree> {
    let decomps = effective_decompositions(beta, class_set, max_parts);
    let mut all: Vec<(usize, CanonicalKey, DecoratedTree)> = decomps
        .par_iter()
        .flat_map_iter(|parts| enumerate_for_decomposition(parts, n, mode))
        .map(|t| (t.num_vertices(), canonical_form(&t), t))
        .collect();
    all.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    all.dedup_by(|a, b| a.1 == b.1);
    all.into_iter().map(|(_, _, t)| t).collect()
}

/// Every contraction of `t` by an edge subset, including `t` and the one-vertex tree.
pub fn contraction_closure(t: &DecoratedTree) -> Vec<DecoratedTree> {
    let e = t.num_edges();
    assert!(e < 24, "contraction closure of a tree with {e} edges is too large");
    let mut out: BTreeMap<CanonicalKey, DecoratedTree> = BTreeMap::new();
    for mask in 0u32..(1 << e) {
        let subset: Vec<bool> = (0..e).map(|i| mask >> i & 1 == 1).collect();
        let c = t.contract(&subset);
        out.entry(canonical_form(&c)).or_insert_with(|| c.canonicalize());
    }
    out.into_values().collect()
}

/// Distinct trees obtained by contracting exactly one edge.
pub fn single_contractions(t: &DecoratedTree) -> Vec<DecoratedTree> {
    let e = t.num_edges();
    let mut out: BTreeMap<CanonicalKey, DecoratedTree> = BTreeMap::new();
    for i in 0..e {
        let mut subset = vec![false; e];
        subset[i] = true;
        let c = t.contract(&subset);
        out.entry(canonical_form(&c)).or_insert_with(|| c.canonicalize());
    }
    out.into_values().collect()
}

fn for_each_mark_placement(nv: usize, n: usize, f: &mut dyn FnMut(&[usize])) {
    let mut cur = vec![0usize; n];
    loop {
        f(&cur);
        let mut i = 0;
        while i < n {
            cur[i] += 1;
            if cur[i] < nv {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
        if i == n {
            return;
        }
    }
}

fn for_each_combination(items: &[usize], k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                return;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut Vec::with_capacity(k), f);
}

/// Distinct orderings of a sorted multiset.
fn for_each_multiset_permutation(sorted: &[CurveClass], f: &mut dyn FnMut(&[CurveClass])) {
    let mut counts: Vec<(CurveClass, usize)> = Vec::new();
    for c in sorted {
        match counts.last_mut() {
            Some((last, k)) if last == c => *k += 1,
            _ => counts.push((c.clone(), 1)),
        }
    }
    fn rec(
        counts: &mut [(CurveClass, usize)],
        cur: &mut Vec<CurveClass>,
        total: usize,
        f: &mut dyn FnMut(&[CurveClass]),
    ) {
        if cur.len() == total {
            f(cur);
            return;
        }
        for i in 0..counts.len() {
            if counts[i].1 == 0 {
                continue;
            }
            counts[i].1 -= 1;
            cur.push(counts[i].0.clone());
            rec(counts, cur, total, f);
            cur.pop();
            counts[i].1 += 1;
        }
    }
    rec(&mut counts, &mut Vec::with_capacity(sorted.len()), sorted.len(), f);
}

/// Groups trees by canonical key, keeping the first of each class.
pub fn dedup_trees(trees: impl IntoIterator<Item = DecoratedTree>) -> Vec<DecoratedTree> {
    let mut seen: HashMap<CanonicalKey, ()> = HashMap::new();
    trees.into_iter().filter(|t| seen.insert(canonical_form(t), ()).is_none()).collect()
}

/// Keys of a list of trees.
pub fn key_set(trees: &[DecoratedTree]) -> BTreeSet<CanonicalKey> {
    trees.iter().map(canonical_form).collect()
}
