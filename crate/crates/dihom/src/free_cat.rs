//! The free 2-category on a 2-polygraph: vertices, directed paths, and
//! 2-cells presented as rewriting sequences modulo interchange.
//!
//! A 2-cell is a source path and a nonempty list of steps; step `(p, g)`
//! rewrites the occurrence of `src(g)` at offset `p` of the current path into
//! `tgt(g)`. Two step lists denote the same 2-cell iff they are connected by
//! swapping adjacent steps with disjoint rewrite intervals. The stored form
//! is the greedy normal form that always emits the available step with the
//! least `(offset, generator)` key.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homology_engine::{solve_integer, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeCatError {
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown edge {0}")]
    UnknownEdge(String),
    #[error("unknown 2-generator {0}")]
    UnknownGenerator(String),
    #[error("duplicate identifier {0}")]
    DuplicateId(String),
    #[error("2-generator {0} has an empty source or target")]
    EmptyBoundary(String),
    #[error("edges of {0} are not consecutive")]
    BrokenPath(String),
    #[error("source and target of 2-generator {0} are not parallel")]
    NotParallel(String),
    #[error("the edge graph has a cycle through {}", .0.join(" -> "))]
    NotAcyclic(Vec<String>),
    #[error("morphisms are not {0}-composable")]
    NotComposable(usize),
    #[error("rewrite step {0} does not match the current path")]
    InvalidStep(usize),
    #[error("enumeration hit its caps (max_words={max_words}, max_len={max_len})")]
    CapExceeded { max_words: usize, max_len: usize },
    #[error("morphisms of different dimensions")]
    DimensionMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gen1 {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gen2 {
    pub id: String,
    pub src: Vec<String>,
    pub tgt: Vec<String>,
}

/// Generators of a 2-truncated free ω-category.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polygraph2 {
    pub vertices: Vec<String>,
    pub gen1: Vec<Gen1>,
    pub gen2: Vec<Gen2>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Step {
    pub offset: usize,
    pub gen: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TwoCell {
    pub source: Vec<usize>,
    /// Nonempty, in normal form.
    pub steps: Vec<Step>,
}

/// A cell of the free category. Paths are nonempty; the empty path at `v` is
/// `Vertex(v)`, and a 2-cell with no steps is its source path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Morphism {
    Vertex(usize),
    Path(Vec<usize>),
    TwoCell(TwoCell),
}

impl Morphism {
    pub fn dim(&self) -> usize {
        match self {
            Morphism::Vertex(_) => 0,
            Morphism::Path(_) => 1,
            Morphism::TwoCell(_) => 2,
        }
    }
}

/// Exploration limits for enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub max_words: usize,
    pub max_len: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_words: 200_000, max_len: 64 }
    }
}

/// An enumeration result; `exhaustive` is false when a cap truncated it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumerated<T> {
    pub items: Vec<T>,
    pub exhaustive: bool,
}

/// A validated polygraph with index-based adjacency.
#[derive(Debug, Clone)]
pub struct FreeCategory {
    pub poly: Polygraph2,
    pub edge_src: Vec<usize>,
    pub edge_tgt: Vec<usize>,
    pub gen_src: Vec<Vec<usize>>,
    pub gen_tgt: Vec<Vec<usize>>,
    vertex_ix: HashMap<String, usize>,
    edge_ix: HashMap<String, usize>,
    gen_ix: HashMap<String, usize>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

fn index_of(ids: impl Iterator<Item = String>) -> Result<HashMap<String, usize>, FreeCatError> {
    let mut map = HashMap::new();
    for (i, id) in ids.enumerate() {
        if map.insert(id.clone(), i).is_some() {
            return Err(FreeCatError::DuplicateId(id));
        }
    }
    Ok(map)
}

impl FreeCategory {
    pub fn new(poly: Polygraph2) -> Result<FreeCategory, FreeCatError> {
        let vertex_ix = index_of(poly.vertices.iter().cloned())?;
        let edge_ix = index_of(poly.gen1.iter().map(|e| e.id.clone()))?;
        let gen_ix = index_of(poly.gen2.iter().map(|g| g.id.clone()))?;
        let vertex = |v: &str| vertex_ix.get(v).copied().ok_or_else(|| FreeCatError::UnknownVertex(v.to_string()));
        let mut edge_src = Vec::new();
        let mut edge_tgt = Vec::new();
        for e in &poly.gen1 {
            edge_src.push(vertex(&e.src)?);
            edge_tgt.push(vertex(&e.tgt)?);
        }
        let edges = |ids: &[String]| -> Result<Vec<usize>, FreeCatError> {
            ids.iter().map(|e| edge_ix.get(e).copied().ok_or_else(|| FreeCatError::UnknownEdge(e.clone()))).collect()
        };
        let mut gen_src = Vec::new();
        let mut gen_tgt = Vec::new();
        for g in &poly.gen2 {
            let (s, t) = (edges(&g.src)?, edges(&g.tgt)?);
            if s.is_empty() || t.is_empty() {
                return Err(FreeCatError::EmptyBoundary(g.id.clone()));
            }
            for path in [&s, &t] {
                if path.windows(2).any(|w| edge_tgt[w[0]] != edge_src[w[1]]) {
                    return Err(FreeCatError::BrokenPath(g.id.clone()));
                }
            }
            let ends = |p: &Vec<usize>| (edge_src[p[0]], edge_tgt[*p.last().unwrap()]);
            if ends(&s) != ends(&t) {
                return Err(FreeCatError::NotParallel(g.id.clone()));
            }
            gen_src.push(s);
            gen_tgt.push(t);
        }
        let mut out_edges = vec![Vec::new(); poly.vertices.len()];
        let mut in_edges = vec![Vec::new(); poly.vertices.len()];
        for (e, (&s, &t)) in edge_src.iter().zip(&edge_tgt).enumerate() {
            out_edges[s].push(e);
            in_edges[t].push(e);
        }
        Ok(FreeCategory {
            poly,
            edge_src,
            edge_tgt,
            gen_src,
            gen_tgt,
            vertex_ix,
            edge_ix,
            gen_ix,
            out_edges,
            in_edges,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.poly.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.poly.gen1.len()
    }

    pub fn num_generators(&self) -> usize {
        self.poly.gen2.len()
    }

    pub fn vertex(&self, id: &str) -> Result<usize, FreeCatError> {
        self.vertex_ix.get(id).copied().ok_or_else(|| FreeCatError::UnknownVertex(id.into()))
    }

    pub fn edge(&self, id: &str) -> Result<usize, FreeCatError> {
        self.edge_ix.get(id).copied().ok_or_else(|| FreeCatError::UnknownEdge(id.into()))
    }

    pub fn generator(&self, id: &str) -> Result<usize, FreeCatError> {
        self.gen_ix.get(id).copied().ok_or_else(|| FreeCatError::UnknownGenerator(id.into()))
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    /// A path from edge names, e.g. `["u", "v"]`.
    pub fn path(&self, ids: &[&str]) -> Result<Morphism, FreeCatError> {
        let edges = ids.iter().map(|e| self.edge(e)).collect::<Result<Vec<_>, _>>()?;
        if edges.is_empty() || edges.windows(2).any(|w| self.edge_tgt[w[0]] != self.edge_src[w[1]]) {
            return Err(FreeCatError::BrokenPath(ids.join("·")));
        }
        Ok(Morphism::Path(edges))
    }

    /// The 2-cell of a single generator.
    pub fn generator_cell(&self, g: usize) -> Morphism {
        Morphism::TwoCell(TwoCell { source: self.gen_src[g].clone(), steps: vec![Step { offset: 0, gen: g }] })
    }

    pub fn named_generator(&self, id: &str) -> Result<Morphism, FreeCatError> {
        Ok(self.generator_cell(self.generator(id)?))
    }

    /// Vertices without incoming edges.
    pub fn initial_states(&self) -> Vec<usize> {
        (0..self.num_vertices()).filter(|&v| self.in_edges[v].is_empty()).collect()
    }

    /// Vertices without outgoing edges.
    pub fn final_states(&self) -> Vec<usize> {
        (0..self.num_vertices()).filter(|&v| self.out_edges[v].is_empty()).collect()
    }

    /// Fails with a witness cycle if the edge graph has one.
    pub fn check_acyclic(&self) -> Result<(), FreeCatError> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let n = self.num_vertices();
        let mut state = vec![0u8; n];
        let mut parent_edge: Vec<Option<usize>> = vec![None; n];
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
            state[root] = 1;
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if *next < self.out_edges[v].len() {
                    let e = self.out_edges[v][*next];
                    *next += 1;
                    let w = self.edge_tgt[e];
                    match state[w] {
                        0 => {
                            state[w] = 1;
                            parent_edge[w] = Some(e);
                            stack.push((w, 0));
                        }
                        1 => {
                            let mut cycle = vec![self.poly.gen1[e].id.clone()];
                            let mut cur = v;
                            while cur != w {
                                let pe = parent_edge[cur].unwrap();
                                cycle.push(self.poly.gen1[pe].id.clone());
                                cur = self.edge_src[pe];
                            }
                            cycle.reverse();
                            return Err(FreeCatError::NotAcyclic(cycle));
                        }
                        _ => {}
                    }
                } else {
                    state[v] = 2;
                    stack.pop();
                }
            }
        }
        Ok(())
    }

    pub fn path_source(&self, p: &[usize]) -> usize {
        self.edge_src[p[0]]
    }

    pub fn path_target(&self, p: &[usize]) -> usize {
        self.edge_tgt[*p.last().unwrap()]
    }

    /// Apply the steps to `source`, checking that every rewrite site matches.
    pub fn replay(&self, source: &[usize], steps: &[Step]) -> Result<Vec<usize>, FreeCatError> {
        let mut cur = source.to_vec();
        for (k, s) in steps.iter().enumerate() {
            let src = &self.gen_src[s.gen];
            if s.offset + src.len() > cur.len() || &cur[s.offset..s.offset + src.len()] != src.as_slice() {
                return Err(FreeCatError::InvalidStep(k));
            }
            cur.splice(s.offset..s.offset + src.len(), self.gen_tgt[s.gen].iter().copied());
        }
        Ok(cur)
    }

    /// `s1` then `s2` rewritten as `s2'` then `s1'` when their intervals are
    /// disjoint; `None` when they overlap.
    fn swap(&self, s1: Step, s2: Step) -> Option<(Step, Step)> {
        let (src1, tgt1) = (self.gen_src[s1.gen].len(), self.gen_tgt[s1.gen].len());
        let (src2, tgt2) = (self.gen_src[s2.gen].len(), self.gen_tgt[s2.gen].len());
        if s2.offset + src2 <= s1.offset {
            Some((s2, Step { offset: s1.offset + tgt2 - src2, gen: s1.gen }))
        } else if s2.offset >= s1.offset + tgt1 {
            Some((Step { offset: s2.offset - tgt1 + src1, gen: s2.gen }, s1))
        } else {
            None
        }
    }

    /// Moves step `k` to the front by swaps; returns it and the rest.
    fn bubble_front(&self, steps: &[Step], k: usize) -> Option<(Step, Vec<Step>)> {
        let mut moving = steps[k];
        let mut passed = Vec::with_capacity(k);
        for j in (0..k).rev() {
            let (first, second) = self.swap(steps[j], moving)?;
            moving = first;
            passed.push(second);
        }
        passed.reverse();
        passed.extend_from_slice(&steps[k + 1..]);
        Some((moving, passed))
    }

    /// Interchange normal form of a replayable step list.
    pub fn normalize(&self, steps: &[Step]) -> Vec<Step> {
        let mut rest = steps.to_vec();
        let mut out = Vec::with_capacity(rest.len());
        while !rest.is_empty() {
            let mut best: Option<(Step, Vec<Step>)> = None;
            for k in 0..rest.len() {
                if let Some((front, remaining)) = self.bubble_front(&rest, k) {
                    if best.as_ref().is_none_or(|(b, _)| front < *b) {
                        best = Some((front, remaining));
                    }
                }
            }
            let (front, remaining) = best.expect("the first step is always available");
            out.push(front);
            rest = remaining;
        }
        out
    }

    /// Builds the cell denoted by a rewriting sequence from `source`.
    pub fn two_cell(&self, source: Vec<usize>, steps: &[Step]) -> Result<Morphism, FreeCatError> {
        self.replay(&source, steps)?;
        if steps.is_empty() {
            return Ok(Morphism::Path(source));
        }
        Ok(Morphism::TwoCell(TwoCell { source, steps: self.normalize(steps) }))
    }

    /// `s_p` (`Minus`) or `t_p` (`Plus`) of a morphism.
    pub fn boundary(&self, m: &Morphism, p: usize, target: bool) -> Morphism {
        match m {
            Morphism::Vertex(_) => m.clone(),
            Morphism::Path(path) => match p {
                0 => Morphism::Vertex(if target { self.path_target(path) } else { self.path_source(path) }),
                _ => m.clone(),
            },
            Morphism::TwoCell(c) => match p {
                0 => Morphism::Vertex(if target { self.path_target(&c.source) } else { self.path_source(&c.source) }),
                1 => Morphism::Path(if target { self.replay(&c.source, &c.steps).unwrap() } else { c.source.clone() }),
                _ => m.clone(),
            },
        }
    }

    pub fn source(&self, m: &Morphism, p: usize) -> Morphism {
        self.boundary(m, p, false)
    }

    pub fn target(&self, m: &Morphism, p: usize) -> Morphism {
        self.boundary(m, p, true)
    }

    /// `a *_p b`.
    pub fn compose(&self, a: &Morphism, b: &Morphism, p: usize) -> Result<Morphism, FreeCatError> {
        if self.target(a, p) != self.source(b, p) {
            return Err(FreeCatError::NotComposable(p));
        }
        if a.dim() <= p {
            return Ok(b.clone());
        }
        if b.dim() <= p {
            return Ok(a.clone());
        }
        use Morphism::*;
        match (p, a, b) {
            (0, Path(x), Path(y)) => Ok(Path([x.as_slice(), y].concat())),
            (0, TwoCell(x), Path(y)) => {
                Ok(TwoCell(self::TwoCell { source: [x.source.as_slice(), y].concat(), steps: x.steps.clone() }))
            }
            (0, Path(x), TwoCell(y)) => {
                let steps = self.normalize(
                    &y.steps.iter().map(|s| Step { offset: s.offset + x.len(), gen: s.gen }).collect::<Vec<_>>(),
                );
                Ok(TwoCell(self::TwoCell { source: [x.as_slice(), &y.source].concat(), steps }))
            }
            (0, TwoCell(x), TwoCell(y)) => {
                let shift = self.replay(&x.source, &x.steps).unwrap().len();
                let mut steps = x.steps.clone();
                steps.extend(y.steps.iter().map(|s| Step { offset: s.offset + shift, gen: s.gen }));
                Ok(TwoCell(self::TwoCell { source: [x.source.as_slice(), &y.source].concat(), steps: self.normalize(&steps) }))
            }
            (1, TwoCell(x), TwoCell(y)) => {
                let steps = [x.steps.as_slice(), &y.steps].concat();
                Ok(TwoCell(self::TwoCell { source: x.source.clone(), steps: self.normalize(&steps) }))
            }
            _ => Err(FreeCatError::NotComposable(p)),
        }
    }

    pub fn format_path(&self, p: &[usize]) -> String {
        p.iter().map(|&e| self.poly.gen1[e].id.as_str()).collect::<Vec<_>>().join("·")
    }

    /// Single rewrite step at its site, printed as `prefix*g*suffix`.
    fn format_step(&self, path: &[usize], s: Step) -> String {
        let mut parts = Vec::new();
        if s.offset > 0 {
            parts.push(self.format_path(&path[..s.offset]));
        }
        parts.push(self.poly.gen2[s.gen].id.clone());
        let end = s.offset + self.gen_src[s.gen].len();
        if end < path.len() {
            parts.push(self.format_path(&path[end..]));
        }
        parts.join("*0")
    }

    /// Human-readable form; a 2-cell prints as the `*_1`-composite of its
    /// whiskered steps.
    pub fn format(&self, m: &Morphism) -> String {
        match m {
            Morphism::Vertex(v) => self.poly.vertices[*v].clone(),
            Morphism::Path(p) => self.format_path(p),
            Morphism::TwoCell(c) => {
                let mut cur = c.source.clone();
                let mut parts = Vec::new();
                for s in &c.steps {
                    parts.push(self.format_step(&cur, *s));
                    cur = self.replay(&cur, &[*s]).unwrap();
                }
                parts.join(" *1 ")
            }
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.offset, self.gen)
    }
}

/// A free category, possibly bilocalized to morphisms with 0-source in `I`
/// and 0-target in `F`; the 0-cells are then `I ∪ F`.
#[derive(Debug, Clone)]
pub struct Category {
    pub free: Arc<FreeCategory>,
    restriction: Option<(BTreeSet<usize>, BTreeSet<usize>)>,
}

/// Outcome of a homotopy test, with a witness `z` as a combination of
/// (n+1)-cells when one exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomotopyWitness {
    pub homotopic: bool,
    pub witness: Option<Vec<(Morphism, BigInt)>>,
}

impl Category {
    pub fn full(free: Arc<FreeCategory>) -> Category {
        Category { free, restriction: None }
    }

    pub fn from_polygraph(poly: Polygraph2) -> Result<Category, FreeCatError> {
        Ok(Category::full(Arc::new(FreeCategory::new(poly)?)))
    }

    pub fn restriction(&self) -> Option<&(BTreeSet<usize>, BTreeSet<usize>)> {
        self.restriction.as_ref()
    }

    /// `C(I, F)`; restricting an already bilocalized view intersects.
    pub fn bilocalize(&self, initial: &[usize], fin: &[usize]) -> Category {
        let mut i: BTreeSet<usize> = initial.iter().copied().collect();
        let mut f: BTreeSet<usize> = fin.iter().copied().collect();
        if let Some((i0, f0)) = &self.restriction {
            i = i.intersection(i0).copied().collect();
            f = f.intersection(f0).copied().collect();
        }
        Category { free: self.free.clone(), restriction: Some((i, f)) }
    }

    /// Bilocalization at the initial and final states of the underlying graph.
    pub fn bilocalize_states(&self) -> Category {
        self.bilocalize(&self.free.initial_states(), &self.free.final_states())
    }

    pub fn vertices(&self) -> Vec<usize> {
        match &self.restriction {
            None => (0..self.free.num_vertices()).collect(),
            Some((i, f)) => i.union(f).copied().collect(),
        }
    }

    fn allows(&self, s: usize, t: usize) -> bool {
        match &self.restriction {
            None => true,
            Some((i, f)) => i.contains(&s) && f.contains(&t),
        }
    }

    pub fn contains(&self, m: &Morphism) -> bool {
        match m {
            Morphism::Vertex(v) => self.vertices().contains(v),
            _ => {
                let s = match self.free.source(m, 0) {
                    Morphism::Vertex(v) => v,
                    _ => unreachable!(),
                };
                let t = match self.free.target(m, 0) {
                    Morphism::Vertex(v) => v,
                    _ => unreachable!(),
                };
                self.allows(s, t)
            }
        }
    }

    /// All nonempty paths of the category, optionally with fixed endpoints,
    /// sorted. Requires an acyclic edge graph.
    pub fn paths(&self, from: Option<usize>, to: Option<usize>) -> Result<Vec<Vec<usize>>, FreeCatError> {
        self.free.check_acyclic()?;
        let starts: Vec<usize> = match from {
            Some(v) => vec![v],
            None => (0..self.free.num_vertices()).collect(),
        };
        let mut out = Vec::new();
        for s in starts {
            if let Some((i, _)) = &self.restriction {
                if !i.contains(&s) {
                    continue;
                }
            }
            let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), s)];
            while let Some((path, v)) = stack.pop() {
                if !path.is_empty() && to.is_none_or(|t| t == v) && self.allows(s, v) {
                    out.push(path.clone());
                }
                for &e in self.free.out_edges(v).iter().rev() {
                    let mut next = path.clone();
                    next.push(e);
                    stack.push((next, self.free.edge_tgt[e]));
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Paths from `v` (possibly empty) and into `v`, ignoring the restriction.
    fn raw_paths_from(&self, v: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = vec![(Vec::new(), v)];
        while let Some((path, w)) = stack.pop() {
            for &e in self.free.out_edges(w) {
                let mut next = path.clone();
                next.push(e);
                stack.push((next, self.free.edge_tgt[e]));
            }
            out.push(path);
        }
        out
    }

    fn raw_paths_into(&self, v: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = vec![(Vec::new(), v)];
        while let Some((path, w)) = stack.pop() {
            for &e in self.free.in_edges(w) {
                let mut next = vec![e];
                next.extend_from_slice(&path);
                stack.push((next, self.free.edge_src[e]));
            }
            out.push(path);
        }
        out
    }

    /// The whiskered generators `p *_0 g *_0 q` lying in the category,
    /// sorted. Their boundaries span the degree-2 globular image.
    pub fn whiskered_generators(&self) -> Result<Vec<Morphism>, FreeCatError> {
        self.free.check_acyclic()?;
        let mut out = Vec::new();
        for g in 0..self.free.num_generators() {
            let (gs, gt) = (self.free.path_source(&self.free.gen_src[g]), self.free.path_target(&self.free.gen_src[g]));
            let prefixes = self.raw_paths_into(gs);
            let suffixes = self.raw_paths_from(gt);
            for p in &prefixes {
                let s = p.first().map_or(gs, |&e| self.free.edge_src[e]);
                for q in &suffixes {
                    let t = q.last().map_or(gt, |&e| self.free.edge_tgt[e]);
                    if !self.allows(s, t) {
                        continue;
                    }
                    let source = [p.as_slice(), &self.free.gen_src[g], q].concat();
                    out.push(Morphism::TwoCell(TwoCell { source, steps: vec![Step { offset: p.len(), gen: g }] }));
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Every 2-cell of the category up to the caps, one per interchange class.
    pub fn two_cells(&self, caps: Caps) -> Result<Enumerated<Morphism>, FreeCatError> {
        let free = &self.free;
        let mut exhaustive = true;
        let mut out: Vec<Morphism> = Vec::new();
        'sources: for source in self.paths(None, None)? {
            let mut seen: HashSet<Vec<Step>> = HashSet::new();
            let mut queue: VecDeque<(Vec<Step>, Vec<usize>)> = VecDeque::new();
            queue.push_back((Vec::new(), source.clone()));
            while let Some((steps, current)) = queue.pop_front() {
                let sites = self.rewrite_sites(&current);
                if steps.len() == caps.max_len {
                    if !sites.is_empty() {
                        exhaustive = false;
                    }
                    continue;
                }
                for s in sites {
                    let mut next = steps.clone();
                    next.push(s);
                    let next = free.normalize(&next);
                    if seen.insert(next.clone()) {
                        let tgt = free.replay(&source, &next).unwrap();
                        out.push(Morphism::TwoCell(TwoCell { source: source.clone(), steps: next.clone() }));
                        if out.len() >= caps.max_words {
                            exhaustive = false;
                            break 'sources;
                        }
                        queue.push_back((next, tgt));
                    }
                }
            }
        }
        out.sort();
        Ok(Enumerated { items: out, exhaustive })
    }

    /// Steps applicable to a path.
    pub fn rewrite_sites(&self, path: &[usize]) -> Vec<Step> {
        let free = &self.free;
        let mut sites = Vec::new();
        for offset in 0..path.len() {
            for g in 0..free.num_generators() {
                let src = &free.gen_src[g];
                if offset + src.len() <= path.len() && path[offset..offset + src.len()] == src[..] {
                    sites.push(Step { offset, gen: g });
                }
            }
        }
        sites
    }

    /// Whether `x ~ y`: some `z` in the free group on (n+1)-cells has
    /// `s_n z − t_n z = x − y`. Degree-2 cells are represented by whiskered
    /// generators, whose boundaries span the same lattice as those of all
    /// 2-cells (a `*_1`-composite telescopes, `*_0`-whiskering distributes).
    pub fn morphism_homotopic(&self, x: &Morphism, y: &Morphism) -> Result<HomotopyWitness, FreeCatError> {
        if x.dim() != y.dim() {
            return Err(FreeCatError::DimensionMismatch);
        }
        match x.dim() {
            0 => {
                // 1-cells between two vertices give s_0 z − t_0 z = x − y.
                if x == y {
                    return Ok(HomotopyWitness { homotopic: true, witness: Some(Vec::new()) });
                }
                let cells: Vec<Morphism> = self.paths(None, None)?.into_iter().map(Morphism::Path).collect();
                self.solve_level(&cells, 0, x, y)
            }
            1 => {
                if x == y {
                    return Ok(HomotopyWitness { homotopic: true, witness: Some(Vec::new()) });
                }
                let cells = self.whiskered_generators()?;
                self.solve_level(&cells, 1, x, y)
            }
            // A 2-truncated category has no 3-cells.
            _ => Ok(if x == y {
                HomotopyWitness { homotopic: true, witness: Some(Vec::new()) }
            } else {
                HomotopyWitness { homotopic: false, witness: None }
            }),
        }
    }

    fn solve_level(&self, cells: &[Morphism], n: usize, x: &Morphism, y: &Morphism) -> Result<HomotopyWitness, FreeCatError> {
        let mut rows: BTreeMap<Morphism, usize> = BTreeMap::new();
        for m in [x, y] {
            let k = rows.len();
            rows.entry(m.clone()).or_insert(k);
        }
        for c in cells {
            for b in [self.free.source(c, n), self.free.target(c, n)] {
                let k = rows.len();
                rows.entry(b).or_insert(k);
            }
        }
        let mut a = Matrix::zeros(rows.len(), cells.len());
        for (j, c) in cells.iter().enumerate() {
            a.add_to(rows[&self.free.source(c, n)], j, &BigInt::from(1));
            a.add_to(rows[&self.free.target(c, n)], j, &BigInt::from(-1));
        }
        let mut rhs = vec![BigInt::zero(); rows.len()];
        rhs[rows[x]] += 1;
        rhs[rows[y]] -= 1;
        Ok(match solve_integer(&a, &rhs) {
            Some(z) => HomotopyWitness {
                homotopic: true,
                witness: Some(cells.iter().cloned().zip(z).filter(|(_, c)| !c.is_zero()).collect()),
            },
            None => HomotopyWitness { homotopic: false, witness: None },
        })
    }
}
