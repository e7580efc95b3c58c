//! Fixtures shared by the benchmarks.

use modcomp_core::toricfan::examples;
use modcomp_core::{CurveClass, DegreeTree, Target};

pub fn blowup_plane() -> Target {
    Target::from_spec(&examples::blowup_plane_spec()).expect("built-in fan is valid")
}

/// `d` times the line class on the blown-up plane.
pub fn lines(d: i64) -> CurveClass {
    CurveClass(vec![d, 0])
}

/// Caterpillar on `n` vertices with degrees cycling through -2..=3.
pub fn caterpillar(n: usize) -> DegreeTree {
    let degrees = (0..n as i64).map(|i| i % 6 - 2).collect();
    let spine = n.div_ceil(2);
    let mut edges: Vec<(usize, usize)> = (1..spine).map(|i| (i - 1, i)).collect();
    edges.extend((spine..n).map(|v| (v - spine, v)));
    DegreeTree::new(degrees, edges).expect("caterpillar is a tree")
}
