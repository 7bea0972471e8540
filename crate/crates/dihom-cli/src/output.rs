//! Text and JSON renderings of command results.

use std::fmt::Write;

use serde_json::{json, Value};

use dihom::cube_model::CubeCell;
use dihom::cubical_sets::Model;
use dihom::free_cat::{Category, Enumerated, FreeCategory, Morphism};
use dihom::invariants::{AnalysisReport, CokernelReport, HomologyReport, Theory};
use dihom::nerve::SingularCube;

pub const SCHEMA: &str = "dihom/1";

/// A command result: the text for humans, the JSON `result` object, and
/// whether a cap cut the computation short.
pub struct Output {
    pub text: String,
    pub value: Value,
    pub caveats: Vec<String>,
    pub partial: bool,
}

impl Output {
    fn complete(text: String, value: Value) -> Output {
        Output { text, value, caveats: Vec::new(), partial: false }
    }

    fn capped(mut self, exhaustive: bool) -> Output {
        if !exhaustive {
            self.partial = true;
            self.caveats.push("enumeration truncated by --caps: results are partial".into());
        }
        self
    }

    pub fn json(&self, command: &str) -> Value {
        json!({
            "schema": SCHEMA,
            "command": command,
            "partial": self.partial,
            "caveats": self.caveats,
            "result": self.value,
        })
    }
}

fn model_type(m: &Model) -> &'static str {
    match m {
        Model::Grid(_) => "grid2",
        Model::Polygraph(_) => "polygraph2",
        Model::Cubical(_) => "cubical",
    }
}

pub fn validate(m: &Model, cat: &FreeCategory) -> Output {
    let names = |vs: Vec<usize>| vs.into_iter().map(|v| cat.poly.vertices[v].clone()).collect::<Vec<_>>();
    let (initial, fin) = (names(cat.initial_states()), names(cat.final_states()));
    let text = format!(
        "valid {} model: {} vertices, {} edges, {} squares\ninitial states: {}\nfinal states: {}\n",
        model_type(m),
        cat.num_vertices(),
        cat.num_edges(),
        cat.num_generators(),
        initial.join(", "),
        fin.join(", "),
    );
    let value = json!({
        "type": model_type(m),
        "vertices": cat.num_vertices(),
        "edges": cat.num_edges(),
        "squares": cat.num_generators(),
        "initial_states": initial,
        "final_states": fin,
    });
    Output::complete(text, value)
}

pub fn cube_cells(n: usize, cells: &[CubeCell]) -> Output {
    let mut text = format!("I^{n}: {} cells\n", cells.len());
    let mut items = Vec::new();
    for c in cells {
        let dim = c.dim().unwrap_or(0);
        writeln!(text, "{dim}  {c}").unwrap();
        items.push(json!({ "cell": c.to_string(), "dim": dim }));
    }
    Output::complete(text, json!({ "n": n, "count": cells.len(), "cells": items }))
}

pub fn paths(v: &Category, paths: &[Vec<usize>]) -> Output {
    let cat = &v.free;
    let mut text = format!("{} paths\n", paths.len());
    let mut items = Vec::new();
    for p in paths {
        let (s, t) = (&cat.poly.vertices[cat.path_source(p)], &cat.poly.vertices[cat.path_target(p)]);
        writeln!(text, "{s} -> {t}  {}", cat.format_path(p)).unwrap();
        items.push(json!({ "source": s, "target": t, "path": cat.format_path(p), "length": p.len() }));
    }
    Output::complete(text, json!({ "count": paths.len(), "paths": items }))
}

pub fn cells(v: &Category, cells: &Enumerated<Morphism>) -> Output {
    let mut counts = [0usize; 3];
    let mut text = String::new();
    let mut items = Vec::new();
    for m in &cells.items {
        counts[m.dim()] += 1;
        let name = v.free.format(m);
        writeln!(text, "{}  {name}", m.dim()).unwrap();
        items.push(json!({ "cell": name, "dim": m.dim() }));
    }
    let head = format!("{} cells ({} of dim 0, {} of dim 1, {} of dim 2)\n", cells.items.len(), counts[0], counts[1], counts[2]);
    let value = json!({ "count": cells.items.len(), "by_dim": counts, "exhaustive": cells.exhaustive, "cells": items });
    Output::complete(head + &text, value).capped(cells.exhaustive)
}

fn homology_text(r: &HomologyReport) -> String {
    let mut text = format!("H_{}^{} = {}\n", r.degree, r.theory, r.group);
    for w in &r.witnesses {
        writeln!(text, "  generator: {w}").unwrap();
    }
    text
}

pub fn homology(r: &HomologyReport) -> Output {
    Output::complete(homology_text(r), serde_json::to_value(r).expect("report serializes")).capped(r.exhaustive)
}

fn cokernel_text(r: &CokernelReport) -> String {
    let mut text = format!("coker h_{}^{} = {}\n", r.degree, sign_of(r.theory), r.group);
    for w in &r.witnesses {
        writeln!(text, "  generator: {w}").unwrap();
    }
    text
}

fn sign_of(t: Theory) -> &'static str {
    match t {
        Theory::Neg => "-",
        Theory::Pos => "+",
        Theory::Gl => "gl",
    }
}

pub fn cokernel(r: &CokernelReport) -> Output {
    Output::complete(cokernel_text(r), serde_json::to_value(r).expect("report serializes")).capped(r.exhaustive)
}

pub fn deadlocks(r: &AnalysisReport) -> Output {
    let list = |v: &[String]| if v.is_empty() { "none".to_string() } else { v.join(", ") };
    let mut text = String::new();
    writeln!(text, "initial states: {}", list(&r.initial_states)).unwrap();
    writeln!(text, "final states: {}", list(&r.final_states)).unwrap();
    writeln!(text, "deadlocks: {}", list(&r.deadlocks)).unwrap();
    writeln!(text, "unreachable: {}", list(&r.unreachable)).unwrap();
    writeln!(text, "homology of the bilocalized model:").unwrap();
    for h in &r.homology {
        text += &homology_text(h);
    }
    for c in &r.cokernels {
        text += &cokernel_text(c);
    }
    let exhaustive = r.homology.iter().all(|h| h.exhaustive) && r.cokernels.iter().all(|c| c.exhaustive);
    let mut out = Output::complete(text, serde_json::to_value(r).expect("report serializes")).capped(exhaustive);
    out.caveats.extend(r.caveats.iter().cloned());
    out
}

pub fn cubes(v: &Category, n: usize, theory: Theory, cubes: &Enumerated<SingularCube>) -> Output {
    let kind = match theory {
        Theory::Gl => "singular cubes",
        Theory::Neg => "negative corner generators",
        Theory::Pos => "positive corner generators",
    };
    let mut text = format!("{} {kind} of dimension {n}\n", cubes.items.len());
    let mut items = Vec::new();
    for x in &cubes.items {
        let s = x.format(&v.free);
        writeln!(text, "{s}").unwrap();
        items.push(Value::String(s));
    }
    let value = json!({ "n": n, "theory": theory, "count": cubes.items.len(), "exhaustive": cubes.exhaustive, "cubes": items });
    Output::complete(text, value).capped(cubes.exhaustive)
}
