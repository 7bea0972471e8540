//! Graphviz rendering of a model: vertices and edges as a digraph, each
//! 2-generator as a filled face node joined to the corners it spans.

use std::fmt::Write;
use std::path::Path;

use dihom::free_cat::FreeCategory;

use crate::Failure;

/// `v(x,y)` grid ids become fixed positions for `neato -n`.
fn grid_position(id: &str) -> Option<(i64, i64)> {
    let inner = id.strip_prefix("v(")?.strip_suffix(')')?;
    let (x, y) = inner.split_once(',')?;
    Some((x.trim().parse().ok()?, y.trim().parse().ok()?))
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn render(cat: &FreeCategory, deadlocks: &[String], unreachable: &[String]) -> String {
    const SCALE: i64 = 100;
    let mut out = String::from("digraph model {\n  node [shape=circle, fontsize=10];\n");
    for v in &cat.poly.vertices {
        let mut attrs = Vec::new();
        if deadlocks.contains(v) {
            attrs.push("style=filled, fillcolor=red".to_string());
        } else if unreachable.contains(v) {
            attrs.push("style=filled, fillcolor=orange".to_string());
        }
        if let Some((x, y)) = grid_position(v) {
            attrs.push(format!("pos=\"{},{}!\"", x * SCALE, y * SCALE));
        }
        writeln!(out, "  {} [{}];", quote(v), attrs.join(", ")).unwrap();
    }
    for e in &cat.poly.gen1 {
        writeln!(out, "  {} -> {} [label={}];", quote(&e.src), quote(&e.tgt), quote(&e.id)).unwrap();
    }
    for (k, g) in cat.poly.gen2.iter().enumerate() {
        let mut corners: Vec<usize> = Vec::new();
        for p in [&cat.gen_src[k], &cat.gen_tgt[k]] {
            for &e in p.iter() {
                corners.extend([cat.edge_src[e], cat.edge_tgt[e]]);
            }
        }
        corners.sort_unstable();
        corners.dedup();
        let pos: Vec<(i64, i64)> = corners.iter().filter_map(|&v| grid_position(&cat.poly.vertices[v])).collect();
        let mut attrs = vec![
            format!("label={}", quote(&g.id)),
            "shape=square".to_string(),
            "style=filled".to_string(),
            "fillcolor=lightgrey".to_string(),
            "color=lightgrey".to_string(),
        ];
        if pos.len() == corners.len() && !pos.is_empty() {
            let n = pos.len() as i64;
            let (x, y) = pos.iter().fold((0, 0), |(a, b), (x, y)| (a + x, b + y));
            attrs.push(format!("pos=\"{},{}!\"", x * SCALE / n, y * SCALE / n));
        }
        let face = quote(&format!("face:{}", g.id));
        writeln!(out, "  {face} [{}];", attrs.join(", ")).unwrap();
        for &v in &corners {
            writeln!(out, "  {face} -> {} [style=invis, arrowhead=none];", quote(&cat.poly.vertices[v])).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

pub fn write(path: &Path, cat: &FreeCategory, deadlocks: &[String], unreachable: &[String]) -> Result<(), Failure> {
    std::fs::write(path, render(cat, deadlocks, unreachable))
        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}
