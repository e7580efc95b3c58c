//! Plain-text table, one row per enumerated tree.

use modcomp_core::{ClassNames, ComponentReport};

use crate::dot::decomposition_label;

const HEADER: [&str; 6] = ["id", "decomposition", "#E", "d-d0", "verdict", "component"];

pub fn rows(report: &ComponentReport, names: &ClassNames) -> Vec<[String; 6]> {
    report
        .trees
        .iter()
        .map(|t| {
            [
                t.id.clone(),
                format!("({})", decomposition_label(&t.tree, names)),
                t.num_edges.to_string(),
                t.offset.to_string(),
                t.verdict.label(),
                if t.component { "yes".into() } else { String::new() },
            ]
        })
        .collect()
}

pub fn render_table(report: &ComponentReport, names: &ClassNames) -> String {
    let body = rows(report, names);
    let mut width = HEADER.map(|h| h.chars().count());
    for row in &body {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> =
            cells.iter().zip(&width).map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count()))).collect();
        format!("{}\n", padded.join("  ").trim_end())
    };
    let mut s = line(&HEADER.map(String::from));
    for row in &body {
        s.push_str(&line(row));
    }
    s.push_str(&format!(
        "# {} beta={} n={} classes={}: {} trees, {} components, expected main dimension {}\n",
        report.mode,
        names.format(&report.beta),
        report.n,
        report.irreducible_classes,
        report.trees.len(),
        report.components.len(),
        report.main_dimension
    ));
    s
}
