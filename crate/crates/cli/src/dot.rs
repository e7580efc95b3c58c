//! Graphviz output for single trees and for the contraction poset.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use modcomp_core::treegen::single_contractions;
use modcomp_core::{canonical_form, ClassNames, ComponentReport, DecoratedTree};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        if ch == '"' || ch == '\\' {
            out.push('\\');
        }
        out.push(ch);
    }
    out.push('"');
    out
}

/// `2s`, or `2s | {1,2}` when marks sit on the vertex.
pub fn vertex_label(t: &DecoratedTree, v: usize, names: &ClassNames) -> String {
    let class = names.format(t.class(v));
    let marks = t.marks_at(v);
    if marks.is_empty() {
        class
    } else {
        let list: Vec<String> = marks.iter().map(|m| m.to_string()).collect();
        format!("{class} | {{{}}}", list.join(","))
    }
}

/// Nonzero vertex classes in vertex order, e.g. `2s, 2e`.
pub fn decomposition_label(t: &DecoratedTree, names: &ClassNames) -> String {
    let parts: Vec<String> = t.decomposition().iter().map(|c| names.format(c)).collect();
    parts.join(", ")
}

pub fn tree_dot(name: &str, t: &DecoratedTree, names: &ClassNames) -> String {
    let mut s = format!("graph {} {{\n", quote(name));
    for v in 0..t.num_vertices() {
        writeln!(s, "  v{v} [label={}];", quote(&vertex_label(t, v, names))).unwrap();
    }
    for &(a, b) in t.edges() {
        writeln!(s, "  v{a} -- v{b};").unwrap();
    }
    s.push_str("}\n");
    s
}

/// One node per enumerated tree and an arrow `G -> G'` whenever `G'` is a
/// single-edge contraction of `G` that was also enumerated.
pub fn poset_dot(report: &ComponentReport, names: &ClassNames) -> String {
    let ids: BTreeMap<_, _> = report.trees.iter().map(|t| (t.key.clone(), t.id.as_str())).collect();
    let mut s = String::from("digraph contractions {\n");
    for t in &report.trees {
        let mut label = format!("{}: {}", t.id, decomposition_label(&t.tree, names));
        if t.component {
            label.push_str(" *");
        }
        writeln!(s, "  {} [label={}];", quote(&t.id), quote(&label)).unwrap();
    }
    for t in &report.trees {
        let targets: BTreeSet<&str> =
            single_contractions(&t.tree).iter().filter_map(|c| ids.get(&canonical_form(c)).copied()).collect();
        for id in targets {
            writeln!(s, "  {} -> {};", quote(&t.id), quote(id)).unwrap();
        }
    }
    s.push_str("}\n");
    s
}
