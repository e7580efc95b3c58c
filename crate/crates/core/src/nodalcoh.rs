//! Cohomology of line bundles on genus-0 nodal curves, computed from the
//! dual tree and the degree on each component.
//!
//! A global section is a tuple of polynomials `f_v` of degree at most `d_v`
//! (none when `d_v < 0`) that agree at every node. Node positions are fixed at
//! `x = 1, 2, ..., val(v)` on each component; the answer does not depend on
//! them.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DegreeTreeError {
    #[error("edge ({0}, {1}) references a vertex out of range")]
    VertexOutOfRange(usize, usize),
    #[error("edge ({0}, {0}) is a loop")]
    Loop(usize),
    #[error("{vertices} vertices and {edges} edges do not form a tree")]
    NotATree { vertices: usize, edges: usize },
}

/// A tree with an integer degree on each vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeTree {
    degrees: Vec<i64>,
    edges: Vec<(usize, usize)>,
}

impl DegreeTree {
    pub fn new(degrees: Vec<i64>, edges: Vec<(usize, usize)>) -> Result<Self, DegreeTreeError> {
        check_tree(degrees.len(), &edges)?;
        Ok(DegreeTree { degrees, edges })
    }

    pub fn single(degree: i64) -> Self {
        DegreeTree { degrees: vec![degree], edges: Vec::new() }
    }

    /// A path `0 - 1 - ... - (k-1)`.
    pub fn path(degrees: Vec<i64>) -> Self {
        let edges = (1..degrees.len()).map(|i| (i - 1, i)).collect();
        DegreeTree { degrees, edges }
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.degrees.len()
    }

    pub fn total_degree(&self) -> i64 {
        self.degrees.iter().sum()
    }
}

/// Checks that `edges` form a spanning tree on `n` vertices.
pub fn check_tree(n: usize, edges: &[(usize, usize)]) -> Result<(), DegreeTreeError> {
    if n == 0 || edges.len() + 1 != n {
        return Err(DegreeTreeError::NotATree { vertices: n, edges: edges.len() });
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(DegreeTreeError::VertexOutOfRange(a, b));
        }
        if a == b {
            return Err(DegreeTreeError::Loop(a));
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return Err(DegreeTreeError::NotATree { vertices: n, edges: edges.len() });
        }
        parent[ra] = rb;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyResult {
    pub h0: usize,
    pub h1: usize,
}

/// `h^0(P^1, O(d))`.
pub fn h0_line(d: i64) -> usize {
    if d >= 0 {
        (d + 1) as usize
    } else {
        0
    }
}

/// The node-matching matrix: one row per edge, one column per monomial.
/// Returns the matrix and the number of columns.
pub fn evaluation_matrix(t: &DegreeTree) -> (linalg::IntMatrix, usize) {
    let n = t.num_vertices();
    let mut offset = vec![0usize; n];
    let mut ncols = 0;
    for (off, &d) in offset.iter_mut().zip(&t.degrees) {
        *off = ncols;
        ncols += h0_line(d);
    }
    let mut seen = vec![0i64; n];
    let mut rows = Vec::with_capacity(t.edges.len());
    for &(a, b) in &t.edges {
        let mut row = vec![BigInt::from(0); ncols];
        for (v, sign) in [(a, 1i64), (b, -1i64)] {
            seen[v] += 1;
            let x = BigInt::from(seen[v]);
            let mut p = BigInt::from(sign);
            for k in 0..h0_line(t.degrees[v]) {
                row[offset[v] + k] = p.clone();
                p *= &x;
            }
        }
        rows.push(row);
    }
    (rows, ncols)
}

pub fn h0_tree(t: &DegreeTree) -> usize {
    let (m, ncols) = evaluation_matrix(t);
    ncols - linalg::bareiss_rank(m)
}

/// Panics if the Euler characteristic would force a negative `h^1`.
pub fn h1_tree(t: &DegreeTree) -> usize {
    cohomology(t).h1
}

pub fn cohomology(t: &DegreeTree) -> CohomologyResult {
    let h0 = h0_tree(t);
    let h1 = h0 as i64 - t.total_degree() - 1;
    assert!(h1 >= 0, "negative h1 ({h1}) for {t:?}: rank computation is inconsistent");
    CohomologyResult { h0, h1: h1 as usize }
}
