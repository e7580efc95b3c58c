#![allow(dead_code)]

use modcomp_core::toricfan::{examples, Target};
use modcomp_core::{CurveClass, DecoratedTree, DegreeTree};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn blp2() -> Target {
    Target::from_spec(&examples::blowup_plane_spec()).unwrap()
}

pub fn p2() -> Target {
    Target::from_spec(&examples::plane_spec()).unwrap()
}

/// `a s + b e` on the blown-up plane.
pub fn c(a: i64, b: i64) -> CurveClass {
    CurveClass(vec![b, a - b])
}

pub fn s() -> CurveClass {
    c(1, 0)
}

pub fn e() -> CurveClass {
    c(0, 1)
}

pub fn l() -> CurveClass {
    c(1, 1)
}

pub fn zero() -> CurveClass {
    c(0, 0)
}

pub fn tree(classes: Vec<CurveClass>, edges: &[(usize, usize)]) -> DecoratedTree {
    DecoratedTree::new(classes, edges.to_vec(), vec![]).unwrap()
}

pub fn chain(classes: Vec<CurveClass>) -> DecoratedTree {
    DecoratedTree::chain(classes)
}

/// `x - 0` plus two more leaves on the zero vertex, with `y` attached to `x`.
fn tail_and_fork(y: CurveClass, x: CurveClass, a: CurveClass, b: CurveClass) -> DecoratedTree {
    tree(vec![y, x, zero(), a, b], &[(0, 1), (1, 2), (2, 3), (2, 4)])
}

fn forked_pair(a: CurveClass, b: CurveClass, x: CurveClass, y: CurveClass) -> DecoratedTree {
    tree(vec![a, b, zero(), zero(), x, y], &[(0, 2), (1, 2), (2, 3), (3, 4), (3, 5)])
}

/// The 24 trees of the reference table for `2l`, `n = 0`, indexed as there.
pub fn two_line_trees() -> Vec<DecoratedTree> {
    vec![
        DecoratedTree::single(c(2, 2), 0),
        chain(vec![c(2, 0), c(0, 2)]),
        chain(vec![s(), s(), c(0, 2)]),
        chain(vec![s(), c(0, 2), s()]),
        tree(vec![s(), zero(), c(0, 2), s()], &[(0, 1), (1, 2), (1, 3)]),
        chain(vec![s(), c(1, 2)]),
        chain(vec![e(), c(2, 1)]),
        chain(vec![l(), l()]),
        chain(vec![e(), e(), c(2, 0)]),
        chain(vec![e(), c(2, 0), e()]),
        tree(vec![e(), zero(), e(), c(2, 0)], &[(0, 1), (1, 2), (1, 3)]),
        chain(vec![s(), e(), l()]),
        chain(vec![s(), l(), e()]),
        chain(vec![l(), s(), e()]),
        tree(vec![s(), zero(), l(), e()], &[(0, 1), (1, 2), (1, 3)]),
        chain(vec![s(), s(), e(), e()]),
        chain(vec![s(), e(), s(), e()]),
        chain(vec![s(), e(), e(), s()]),
        tail_and_fork(s(), s(), e(), e()),
        tail_and_fork(s(), e(), s(), e()),
        tail_and_fork(e(), s(), s(), e()),
        tail_and_fork(e(), e(), s(), s()),
        forked_pair(s(), s(), e(), e()),
        forked_pair(s(), e(), s(), e()),
    ]
}

/// Trees with decomposition `(s, s, e, e)` that the reference table does not list.
pub fn two_line_extra_trees() -> Vec<DecoratedTree> {
    vec![
        chain(vec![e(), s(), s(), e()]),
        tree(vec![s(), s(), e(), e()], &[(0, 1), (0, 2), (0, 3)]),
        tree(vec![e(), s(), s(), e()], &[(0, 1), (0, 2), (0, 3)]),
        tree(vec![zero(), s(), s(), e(), e()], &[(0, 1), (0, 2), (0, 3), (0, 4)]),
    ]
}

/// The trees of the reference figure for `3l`, `n = 0`, indexed as there.
pub fn three_line_trees() -> Vec<DecoratedTree> {
    vec![
        DecoratedTree::single(c(3, 3), 0),
        chain(vec![c(3, 2), e()]),
        chain(vec![c(3, 0), c(0, 3)]),
        chain(vec![c(3, 1), c(0, 2)]),
        chain(vec![c(2, 0), c(0, 3), s()]),
        chain(vec![c(2, 0), c(0, 2), l()]),
        chain(vec![c(3, 0), c(0, 2), e()]),
        chain(vec![c(2, 0), s(), c(0, 3)]),
        chain(vec![s(), c(2, 0), c(0, 3)]),
        chain(vec![c(3, 0), e(), c(0, 2)]),
    ]
}

/// The trees of the reference figure for `2l`, `n = 2`; marks `[m1, m2]` give vertices.
pub fn two_marked_trees() -> Vec<DecoratedTree> {
    let base = chain(vec![c(2, 0), c(0, 2)]);
    let marked = |m: [usize; 2]| base.clone().with_marks(m.to_vec()).unwrap();
    vec![DecoratedTree::single(c(2, 2), 2), marked([0, 1]), marked([1, 0]), marked([1, 1]), marked([0, 0])]
}

/// Same tree with shuffled vertex labels, edge order and edge orientation.
pub fn relabel(t: &DecoratedTree, rng: &mut StdRng) -> DecoratedTree {
    let n = t.num_vertices();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut classes = vec![t.class(0).clone(); n];
    for v in 0..n {
        classes[perm[v]] = t.class(v).clone();
    }
    let mut edges: Vec<(usize, usize)> = t
        .edges()
        .iter()
        .map(|&(a, b)| if rng.gen_bool(0.5) { (perm[a], perm[b]) } else { (perm[b], perm[a]) })
        .collect();
    edges.shuffle(rng);
    let marks = t.marks().iter().map(|&v| perm[v]).collect();
    DecoratedTree::new(classes, edges, marks).unwrap()
}

/// Random tree on `n` vertices with shuffled labels and edge order.
pub fn random_tree_edges(rng: &mut StdRng, n: usize) -> Vec<(usize, usize)> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = (1..n)
        .map(|i| {
            let p = rng.gen_range(0..i);
            if rng.gen_bool(0.5) {
                (perm[i], perm[p])
            } else {
                (perm[p], perm[i])
            }
        })
        .collect();
    edges.shuffle(rng);
    edges
}

pub fn random_degree_tree(rng: &mut StdRng, max_vertices: usize, lo: i64, hi: i64) -> DegreeTree {
    let n = rng.gen_range(1..=max_vertices);
    let degrees = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
    DegreeTree::new(degrees, random_tree_edges(rng, n)).unwrap()
}

const P: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut a: u64, mut k: u64) -> u64 {
    let mut r = 1;
    while k > 0 {
        if k & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        k >>= 1;
    }
    r
}

fn rank_mod_p(mut m: Vec<Vec<u64>>) -> usize {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        let inv = powmod(m[r][c], P - 2);
        let pivot = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = mulmod(row[c], inv);
                for (x, &p) in row.iter_mut().zip(&pivot).skip(c) {
                    *x = (*x + P - mulmod(f, p)) % P;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// `h^0` by gluing sections at random node positions over a prime field.
///
/// Each vertex gets `val(v)` distinct random coordinates; a polynomial of
/// degree at most `d_v` is stored by its values at `d_v + 1` further random
/// points, so the matrix entries are Lagrange weights rather than monomials.
pub fn h0_prime_field(t: &DegreeTree, rng: &mut StdRng) -> usize {
    let n = t.num_vertices();
    let deg = t.degrees();
    let dims: Vec<usize> = deg.iter().map(|&d| if d >= 0 { d as usize + 1 } else { 0 }).collect();
    let mut offset = vec![0; n];
    let mut total = 0;
    for v in 0..n {
        offset[v] = total;
        total += dims[v];
    }
    // interpolation nodes per vertex
    let nodes: Vec<Vec<u64>> = dims.iter().map(|&k| distinct(rng, k, &[])).collect();
    let mut used: Vec<Vec<u64>> = nodes.clone();
    let mut rows = Vec::new();
    for &(a, b) in t.edges() {
        let mut row = vec![0u64; total];
        for (v, neg) in [(a, false), (b, true)] {
            let x = distinct(rng, 1, &used[v])[0];
            used[v].push(x);
            for (j, w) in lagrange_weights(&nodes[v], x).into_iter().enumerate() {
                row[offset[v] + j] = if neg { (P - w) % P } else { w };
            }
        }
        rows.push(row);
    }
    total - rank_mod_p(rows)
}

fn distinct(rng: &mut StdRng, k: usize, avoid: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(k);
    while out.len() < k {
        let x = rng.gen_range(1..P);
        if !out.contains(&x) && !avoid.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn lagrange_weights(nodes: &[u64], x: u64) -> Vec<u64> {
    (0..nodes.len())
        .map(|j| {
            let mut num = 1;
            let mut den = 1;
            for (k, &xk) in nodes.iter().enumerate() {
                if k != j {
                    num = mulmod(num, (x + P - xk) % P);
                    den = mulmod(den, (nodes[j] + P - xk) % P);
                }
            }
            mulmod(num, powmod(den, P - 2))
        })
        .collect()
}
