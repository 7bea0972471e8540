//! Singular cubes `I^n → C` for `n ≤ 3` over a 2-truncated free category.
//!
//! A cube stores its value on all `3^n` faces. Faces, degeneracies and
//! connections are index substitutions on face words; functoriality is
//! checked by evaluating `s_p R(w)` and `t_p R(w)` with precomputed plans.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::cube_model::{enumerate_faces, CubeCell, FaceWord, Letter, Sign};
use crate::free_cat::{Caps, Category, Enumerated, FreeCatError, FreeCategory, Morphism};

/// Largest cube dimension handled by the evaluation plans.
pub const MAX_CUBE_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NerveError {
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("assignment is not an ω-functor at face {0}")]
    NotFunctorial(String),
    #[error("cubes are not {0}-composable")]
    NotComposable(usize),
    #[error("morphism of dimension {dim} cannot be folded into a {n}-cube")]
    DimensionTooHigh { dim: usize, n: usize },
    #[error("shell is not fillable: {0}")]
    NotFillable(String),
    #[error("top morphism does not match the shell")]
    InconsistentTop,
    #[error("shell faces ∂_{i}^{a} x_{j}^{b} and ∂_{j1}^{b} x_{i}^{a} differ", j1 = .j - 1)]
    IncompatibleShell { i: usize, j: usize, a: char, b: char },
    #[error(transparent)]
    Category(#[from] FreeCatError),
}

/// An ω-functor `I^n → C`, as its value on every face word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SingularCube {
    pub n: usize,
    /// Indexed by [`FaceWord::index`].
    pub assign: Vec<Morphism>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureMap {
    Face(usize, Sign),
    Degeneracy(usize),
    Connection(usize, Sign),
}

fn max_letter(a: Letter, b: Letter) -> Letter {
    a.max(b)
}

fn min_letter(a: Letter, b: Letter) -> Letter {
    a.min(b)
}

impl SingularCube {
    pub fn from_fn(n: usize, f: impl Fn(&FaceWord) -> Morphism) -> SingularCube {
        SingularCube { n, assign: enumerate_faces(n).iter().map(f).collect() }
    }

    /// The 0-cube at a vertex.
    pub fn point(v: usize) -> SingularCube {
        SingularCube { n: 0, assign: vec![Morphism::Vertex(v)] }
    }

    pub fn at(&self, w: &FaceWord) -> &Morphism {
        &self.assign[w.index()]
    }

    /// `x(0_n)`.
    pub fn top(&self) -> &Morphism {
        self.at(&FaceWord::top(self.n))
    }

    /// `∂_i^α x (k_1…k_{n-1}) = x(k_1…k_{i-1} α k_i…k_{n-1})`.
    pub fn face(&self, i: usize, sign: Sign) -> Result<SingularCube, NerveError> {
        if i == 0 || i > self.n {
            return Err(NerveError::IndexOutOfRange { index: i, max: self.n });
        }
        Ok(SingularCube::from_fn(self.n - 1, |w| self.at(&w.insert(i, sign.letter())).clone()))
    }

    /// `ε_i x (k_1…k_{n+1}) = x(k_1…k̂_i…k_{n+1})`.
    pub fn degeneracy(&self, i: usize) -> Result<SingularCube, NerveError> {
        if i == 0 || i > self.n + 1 {
            return Err(NerveError::IndexOutOfRange { index: i, max: self.n + 1 });
        }
        Ok(SingularCube::from_fn(self.n + 1, |w| {
            let mut v = w.0.clone();
            v.remove(i - 1);
            self.at(&FaceWord(v)).clone()
        }))
    }

    /// `Γ_i^- x` merges letters `i, i+1` by max, `Γ_i^+ x` by min.
    pub fn connection(&self, i: usize, sign: Sign) -> Result<SingularCube, NerveError> {
        if i == 0 || i > self.n {
            return Err(NerveError::IndexOutOfRange { index: i, max: self.n });
        }
        let merge = match sign {
            Sign::Minus => max_letter,
            Sign::Plus => min_letter,
        };
        Ok(SingularCube::from_fn(self.n + 1, |w| {
            let mut v = w.0.clone();
            let m = merge(v[i - 1], v[i]);
            v.remove(i);
            v[i - 1] = m;
            self.at(&FaceWord(v)).clone()
        }))
    }

    pub fn structure_map(&self, map: StructureMap) -> Result<SingularCube, NerveError> {
        match map {
            StructureMap::Face(i, s) => self.face(i, s),
            StructureMap::Degeneracy(i) => self.degeneracy(i),
            StructureMap::Connection(i, s) => self.connection(i, s),
        }
    }

    /// Thin iff the top cell has dimension below `n`.
    pub fn is_thin(&self) -> bool {
        self.top().dim() < self.n
    }

    /// Every word with a single `0` and all other letters `α` is sent to a
    /// 1-dimensional morphism.
    pub fn is_corner(&self, alpha: Sign) -> bool {
        (0..self.n).all(|k| {
            let mut v = vec![alpha.letter(); self.n];
            v[k] = Letter::Zero;
            self.at(&FaceWord(v)).dim() == 1
        })
    }

    /// Checks `s_p x(w) = x(s_p R(w))` and `t_p x(w) = x(t_p R(w))` for every face.
    pub fn check_functorial(&self, cat: &FreeCategory) -> Result<(), NerveError> {
        let table = plans(self.n);
        for (idx, w) in enumerate_faces(self.n).iter().enumerate() {
            let m = &self.assign[idx];
            if m.dim() > w.dim() {
                return Err(NerveError::NotFunctorial(w.to_string()));
            }
            for (p, (sp, tp)) in table.boundaries[idx].iter().enumerate() {
                let ok = |plan: &Plan, target: bool| {
                    run_plan(cat, self, plan).is_ok_and(|v| v == cat.boundary(m, p, target))
                };
                if !ok(sp, false) || !ok(tp, true) {
                    return Err(NerveError::NotFunctorial(w.to_string()));
                }
            }
        }
        Ok(())
    }

    /// Value of the cube on a composite cell of `I^n`.
    pub fn evaluate(&self, cat: &FreeCategory, cell: &CubeCell) -> Result<Morphism, NerveError> {
        run_plan(cat, self, &make_plan(cell))
    }

    /// Labels as `[w:value …]` over the maximal non-identity faces.
    pub fn format(&self, cat: &FreeCategory) -> String {
        if self.n == 0 {
            return cat.format(&self.assign[0]);
        }
        let parts: Vec<String> = enumerate_faces(self.n)
            .iter()
            .filter(|w| w.dim() >= 1)
            .map(|w| format!("{w}:{}", cat.format(self.at(w))))
            .collect();
        format!("[{}]", parts.join(" "))
    }
}

/// How to evaluate a cell of `I^n` under a cube assignment.
#[derive(Debug, Clone)]
enum Plan {
    Atom(usize),
    /// Start vertex then edges in order.
    Path(usize, Vec<usize>),
    /// Start vertex, source path, then `*_1`-composed whiskered faces.
    Paste(usize, Vec<usize>, Vec<(Vec<usize>, usize, Vec<usize>)>),
}

struct PlanTable {
    /// `boundaries[w][p] = (plan for s_p R(w), plan for t_p R(w))`.
    boundaries: Vec<Vec<(Plan, Plan)>>,
}

fn plans(n: usize) -> &'static PlanTable {
    static TABLES: OnceLock<Vec<PlanTable>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        (0..=MAX_CUBE_DIM)
            .map(|n| PlanTable {
                boundaries: enumerate_faces(n)
                    .iter()
                    .map(|w| {
                        let c = CubeCell::atom(w);
                        (0..w.dim()).map(|p| (make_plan(&c.source(p)), make_plan(&c.target(p)))).collect()
                    })
                    .collect(),
            })
            .collect()
    });
    &tables[n]
}

fn edge_ends(e: &FaceWord) -> (FaceWord, FaceWord) {
    let pos = e.0.iter().position(|&l| l == Letter::Zero).unwrap();
    let mut s = e.clone();
    let mut t = e.clone();
    s.0[pos] = Letter::Minus;
    t.0[pos] = Letter::Plus;
    (s, t)
}

/// Edges of a 1-cell in path order, from its 0-source.
fn ordered_edges(cell: &CubeCell) -> (FaceWord, Vec<FaceWord>) {
    let start = cell.source(0).maximal_faces().remove(0);
    let mut edges: Vec<FaceWord> = cell.faces.iter().filter(|w| w.dim() == 1).cloned().collect();
    let mut out = Vec::new();
    let mut cur = start.clone();
    while !edges.is_empty() {
        let k = edges.iter().position(|e| edge_ends(e).0 == cur).expect("1-cells are paths");
        let e = edges.remove(k);
        cur = edge_ends(&e).1;
        out.push(e);
    }
    (start, out)
}

/// `[f[a:=-], f[b:=+]]` and `[f[b:=-], f[a:=+]]` for a 2-face with zeros `a < b`.
fn square_paths(f: &FaceWord) -> (Vec<FaceWord>, Vec<FaceWord>) {
    let zeros: Vec<usize> = f.0.iter().enumerate().filter(|(_, &l)| l == Letter::Zero).map(|(i, _)| i).collect();
    let set = |pos: usize, l: Letter| {
        let mut g = f.clone();
        g.0[pos] = l;
        g
    };
    let (a, b) = (zeros[0], zeros[1]);
    (vec![set(a, Letter::Minus), set(b, Letter::Plus)], vec![set(b, Letter::Minus), set(a, Letter::Plus)])
}

fn make_plan(cell: &CubeCell) -> Plan {
    let maximal = cell.maximal_faces();
    if maximal.len() == 1 {
        return Plan::Atom(maximal[0].index());
    }
    match cell.dim() {
        Some(1) => {
            let (start, edges) = ordered_edges(cell);
            Plan::Path(start.index(), edges.iter().map(FaceWord::index).collect())
        }
        Some(2) => {
            let (start, mut path) = ordered_edges(&cell.source(1));
            let initial: Vec<usize> = path.iter().map(FaceWord::index).collect();
            let mut pending: Vec<FaceWord> = cell.faces.iter().filter(|w| w.dim() == 2).cloned().collect();
            let mut steps = Vec::new();
            while !pending.is_empty() {
                let (k, at) = pending
                    .iter()
                    .enumerate()
                    .find_map(|(k, f)| {
                        let (src, _) = square_paths(f);
                        path.windows(2).position(|win| win == src.as_slice()).map(|at| (k, at))
                    })
                    .expect("a 2-cell of I^n pastes its squares in some order");
                let f = pending.remove(k);
                let (_, tgt) = square_paths(&f);
                let prefix = path[..at].iter().map(FaceWord::index).collect();
                let suffix = path[at + 2..].iter().map(FaceWord::index).collect();
                steps.push((prefix, f.index(), suffix));
                path.splice(at..at + 2, tgt);
            }
            Plan::Paste(start.index(), initial, steps)
        }
        _ => panic!("cells of dimension ≥ 3 are atoms in the cubes handled here"),
    }
}

fn eval_path(cat: &FreeCategory, x: &SingularCube, start: usize, edges: &[usize]) -> Result<Morphism, NerveError> {
    let mut acc = x.assign[start].clone();
    for &e in edges {
        acc = cat.compose(&acc, &x.assign[e], 0).map_err(|_| NerveError::NotComposable(0))?;
    }
    Ok(acc)
}

fn run_plan(cat: &FreeCategory, x: &SingularCube, plan: &Plan) -> Result<Morphism, NerveError> {
    match plan {
        Plan::Atom(i) => Ok(x.assign[*i].clone()),
        Plan::Path(start, edges) => eval_path(cat, x, *start, edges),
        Plan::Paste(start, initial, steps) => {
            let mut acc = eval_path(cat, x, *start, initial)?;
            for (prefix, f, suffix) in steps {
                let pre = eval_path(cat, x, *start, prefix)?;
                let mut step = cat.compose(&pre, &x.assign[*f], 0).map_err(|_| NerveError::NotComposable(0))?;
                for &e in suffix {
                    step = cat.compose(&step, &x.assign[e], 0).map_err(|_| NerveError::NotComposable(0))?;
                }
                acc = cat.compose(&acc, &step, 1).map_err(|_| NerveError::NotComposable(1))?;
            }
            Ok(acc)
        }
    }
}

/// The `2(n+1)` faces `x_i^α` of a would-be `(n+1)`-cube.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shell {
    pub n: usize,
    faces: Vec<SingularCube>,
}

fn slot(i: usize, sign: Sign) -> usize {
    2 * (i - 1) + usize::from(sign == Sign::Plus)
}

impl Shell {
    /// `faces(i, α)` supplies `x_i^α` for `1 ≤ i ≤ n+1`; compatibility
    /// `∂_i^α x_j^β = ∂_{j-1}^β x_i^α` (`i < j`) is checked.
    pub fn new(n: usize, faces: impl Fn(usize, Sign) -> SingularCube) -> Result<Shell, NerveError> {
        let mut v = Vec::with_capacity(2 * (n + 1));
        for i in 1..=n + 1 {
            for s in Sign::BOTH {
                let f = faces(i, s);
                assert_eq!(f.n, n, "shell faces have the shell dimension");
                v.push(f);
            }
        }
        let shell = Shell { n, faces: v };
        shell.check_compatible()?;
        Ok(shell)
    }

    pub fn of_cube(x: &SingularCube) -> Shell {
        let n = x.n - 1;
        Shell::new(n, |i, s| x.face(i, s).unwrap()).expect("faces of a cube are compatible")
    }

    pub fn face(&self, i: usize, sign: Sign) -> &SingularCube {
        &self.faces[slot(i, sign)]
    }

    fn check_compatible(&self) -> Result<(), NerveError> {
        for i in 1..=self.n + 1 {
            for j in i + 1..=self.n + 1 {
                for a in Sign::BOTH {
                    for b in Sign::BOTH {
                        if self.face(j, b).face(i, a)? != self.face(i, a).face(j - 1, b)? {
                            return Err(NerveError::IncompatibleShell { i, j, a: a.symbol(), b: b.symbol() });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The assignment of every non-top face of the filler.
    fn boundary_cube(&self, top: Morphism) -> SingularCube {
        let n = self.n + 1;
        SingularCube::from_fn(n, |w| match w.0.iter().position(|&l| l != Letter::Zero) {
            None => top.clone(),
            Some(pos) => {
                let sign = if w.0[pos] == Letter::Minus { Sign::Minus } else { Sign::Plus };
                let mut rest = w.0.clone();
                rest.remove(pos);
                self.face(pos + 1, sign).at(&FaceWord(rest)).clone()
            }
        })
    }
}

/// The cube with faces `shell` and top `u`, checked for functoriality.
/// Unlike [`fill_shell`] this accepts any shell, e.g. one with two thick
/// source faces.
pub fn assemble(cat: &FreeCategory, shell: &Shell, u: &Morphism) -> Result<SingularCube, NerveError> {
    let x = shell.boundary_cube(u.clone());
    let n = x.n;
    for side in [false, true] {
        let c = CubeCell::atom(&FaceWord::top(n));
        let cell = if side { c.target(n - 1) } else { c.source(n - 1) };
        let v = x.evaluate(cat, &cell)?;
        if v != cat.boundary(u, n - 1, side) {
            return Err(NerveError::InconsistentTop);
        }
    }
    x.check_functorial(cat).map_err(|_| NerveError::InconsistentTop)?;
    Ok(x)
}

/// The unique filler of a fillable shell: exactly one thick face among
/// `x_i^{(-)^i}` and one among `x_i^{(-)^{i+1}}`, all others thin.
pub fn fill_shell(cat: &FreeCategory, shell: &Shell, u: &Morphism) -> Result<SingularCube, NerveError> {
    let n = shell.n;
    for (name, parity) in [("source", 0usize), ("target", 1usize)] {
        let thick: Vec<usize> = (1..=n + 1).filter(|&i| !shell.face(i, Sign::power(i + parity)).is_thin()).collect();
        if thick.len() != 1 {
            return Err(NerveError::NotFillable(format!("{} thick {name}-side faces", thick.len())));
        }
        let face = shell.face(thick[0], Sign::power(thick[0] + parity));
        if cat.boundary(u, n, parity == 1) != *face.top() {
            return Err(NerveError::InconsistentTop);
        }
    }
    assemble(cat, shell, u)
}

fn identity_cube(v: usize, n: usize) -> SingularCube {
    SingularCube::from_fn(n, |_| Morphism::Vertex(v))
}

fn vertex_of(m: &Morphism) -> usize {
    match m {
        Morphism::Vertex(v) => *v,
        _ => panic!("expected a vertex"),
    }
}

/// `x +_j y`, for cubes of dimension 1 or 2.
pub fn plus(cat: &FreeCategory, x: &SingularCube, y: &SingularCube, j: usize) -> Result<SingularCube, NerveError> {
    if x.n != y.n || j == 0 || j > x.n {
        return Err(NerveError::IndexOutOfRange { index: j, max: x.n });
    }
    if x.face(j, Sign::Plus)? != y.face(j, Sign::Minus)? {
        return Err(NerveError::NotComposable(j));
    }
    let c0 = |a: &Morphism, b: &Morphism| cat.compose(a, b, 0).map_err(|_| NerveError::NotComposable(j));
    let w = |s: &str| s.parse::<FaceWord>().unwrap();
    let z = match (x.n, j) {
        (1, 1) => {
            let top = c0(x.at(&w("0")), y.at(&w("0")))?;
            SingularCube { n: 1, assign: vec![x.at(&w("-")).clone(), top, y.at(&w("+")).clone()] }
        }
        (2, 1) => {
            let left = cat
                .compose(&c0(x.top(), y.at(&w("0+")))?, &c0(x.at(&w("0-")), y.top())?, 1)
                .map_err(|_| NerveError::NotComposable(j))?;
            let mut out = SingularCube::from_fn(2, |_| Morphism::Vertex(0));
            for word in enumerate_faces(2) {
                let s = word.to_string();
                let v = match s.as_str() {
                    "00" => left.clone(),
                    "-0" | "--" | "-+" => x.at(&word).clone(),
                    "+0" | "+-" | "++" => y.at(&word).clone(),
                    "0-" | "0+" => c0(x.at(&word), y.at(&word))?,
                    _ => unreachable!(),
                };
                out.assign[word.index()] = v;
            }
            out
        }
        (2, 2) => {
            let top = cat
                .compose(&c0(x.at(&w("-0")), y.top())?, &c0(x.top(), y.at(&w("+0")))?, 1)
                .map_err(|_| NerveError::NotComposable(j))?;
            let mut out = SingularCube::from_fn(2, |_| Morphism::Vertex(0));
            for word in enumerate_faces(2) {
                let s = word.to_string();
                let v = match s.as_str() {
                    "00" => top.clone(),
                    "0-" | "--" | "+-" => x.at(&word).clone(),
                    "0+" | "-+" | "++" => y.at(&word).clone(),
                    "-0" | "+0" => c0(x.at(&word), y.at(&word))?,
                    _ => unreachable!(),
                };
                out.assign[word.index()] = v;
            }
            out
        }
        _ => return Err(NerveError::IndexOutOfRange { index: j, max: 2 }),
    };
    z.check_functorial(cat)?;
    Ok(z)
}

fn one_cube(cat: &FreeCategory, m: &Morphism) -> SingularCube {
    SingularCube { n: 1, assign: vec![cat.source(m, 0), m.clone(), cat.target(m, 0)] }
}

/// The square with top `top` and the given values on the edge words
/// `-0`, `0+`, `0-`, `+0`, checked for functoriality.
pub fn square(cat: &FreeCategory, top: &Morphism, edges: [(&str, Morphism); 4]) -> Result<SingularCube, NerveError> {
    let mut x = SingularCube::from_fn(2, |_| Morphism::Vertex(0));
    x.assign[FaceWord::top(2).index()] = top.clone();
    for (w, m) in edges {
        let w: FaceWord = w.parse().unwrap();
        let c = one_cube(cat, &m);
        for (k, l) in Letter::ALL.iter().enumerate() {
            let mut v = w.0.clone();
            let pos = v.iter().position(|&l| l == Letter::Zero).unwrap();
            v[pos] = *l;
            x.assign[FaceWord(v).index()] = c.assign[k].clone();
        }
    }
    x.check_functorial(cat)?;
    Ok(x)
}

/// The square of a 2-generator with source `a·b` and target `c·d`:
/// `x(-0) = a`, `x(0+) = b`, `x(0-) = c`, `x(+0) = d`.
pub fn generator_square(cat: &FreeCategory, g: usize) -> Result<SingularCube, NerveError> {
    let (src, tgt) = (&cat.gen_src[g], &cat.gen_tgt[g]);
    if src.len() != 2 || tgt.len() != 2 {
        return Err(NerveError::DimensionTooHigh { dim: src.len().max(tgt.len()), n: 2 });
    }
    let e = |k: usize| Morphism::Path(vec![k]);
    square(cat, &cat.generator_cell(g), [("-0", e(src[0])), ("0+", e(src[1])), ("0-", e(tgt[0])), ("+0", e(tgt[1]))])
}

fn check_fold_dim(u: &Morphism, n: usize) -> Result<(), NerveError> {
    if u.dim() > n || n > 3 {
        return Err(NerveError::DimensionTooHigh { dim: u.dim(), n });
    }
    Ok(())
}

fn vertex_cube(cat: &FreeCategory, u: &Morphism) -> SingularCube {
    SingularCube::point(vertex_of(&cat.source(u, 0)))
}

/// `□_n^-(u)`: for `n = 2`, left face `s_1 u`, bottom face `t_1 u`, top and
/// right faces degenerate at `t_0 u`.
pub fn fold_minus(cat: &FreeCategory, u: &Morphism, n: usize) -> Result<SingularCube, NerveError> {
    check_fold_dim(u, n)?;
    match n {
        0 => Ok(vertex_cube(cat, u)),
        1 => Ok(one_cube(cat, u)),
        2 => {
            let end = cat.target(u, 0);
            square(cat, u, [("-0", cat.source(u, 1)), ("0-", cat.target(u, 1)), ("0+", end.clone()), ("+0", end)])
        }
        _ => {
            // With no 3-cells, s_2 u = t_2 u = u.
            let q = fold_minus(cat, u, 2)?;
            let end = vertex_of(&cat.target(u, 0));
            let shell = Shell::new(2, |i, s| match (i, s) {
                (1, Sign::Minus) => q.face(1, Sign::Minus).unwrap().connection(1, Sign::Minus).unwrap(),
                (2, Sign::Minus) | (3, Sign::Minus) => q.clone(),
                _ => identity_cube(end, 2),
            })?;
            assemble(cat, &shell, u)
        }
    }
}

/// `□_n^+(u)`: for `n = 2`, top face `s_1 u`, right face `t_1 u`, bottom and
/// left faces degenerate at `s_0 u`. Obtained from `□_n^-` by reversing
/// every orientation.
pub fn fold_plus(cat: &FreeCategory, u: &Morphism, n: usize) -> Result<SingularCube, NerveError> {
    check_fold_dim(u, n)?;
    match n {
        0 => Ok(vertex_cube(cat, u)),
        1 => Ok(one_cube(cat, u)),
        2 => {
            let start = cat.source(u, 0);
            square(cat, u, [("0+", cat.source(u, 1)), ("+0", cat.target(u, 1)), ("0-", start.clone()), ("-0", start)])
        }
        _ => {
            let q = fold_plus(cat, u, 2)?;
            let start = vertex_of(&cat.source(u, 0));
            let shell = Shell::new(2, |i, s| match (i, s) {
                (1, Sign::Plus) => q.face(1, Sign::Plus).unwrap().connection(1, Sign::Plus).unwrap(),
                (2, Sign::Plus) | (3, Sign::Plus) => q.clone(),
                _ => identity_cube(start, 2),
            })?;
            assemble(cat, &shell, u)
        }
    }
}

/// `□_n(u)`: the cube whose faces in directions `j ≥ 2` are degenerate;
/// for `n = 2`, `x(-0) = s_1 u`, `x(+0) = t_1 u`.
pub fn fold(cat: &FreeCategory, u: &Morphism, n: usize) -> Result<SingularCube, NerveError> {
    check_fold_dim(u, n)?;
    match n {
        0 => Ok(vertex_cube(cat, u)),
        1 => Ok(one_cube(cat, u)),
        2 => square(
            cat,
            u,
            [("-0", cat.source(u, 1)), ("+0", cat.target(u, 1)), ("0-", cat.source(u, 0)), ("0+", cat.target(u, 0))],
        ),
        _ => {
            let p = fold(cat, u, 2)?;
            let shell = Shell::new(2, |i, s| match i {
                1 => p.clone(),
                _ => p.face(i - 1, s).unwrap().degeneracy(1).unwrap(),
            })?;
            assemble(cat, &shell, u)
        }
    }
}

/// `ev_{0_n}`.
pub fn ev(x: &SingularCube) -> &Morphism {
    x.top()
}

/// All cells of a category of dimension ≤ 2, sorted by dimension then value.
pub fn cells_up_to_two(view: &Category, caps: Caps) -> Result<Enumerated<Morphism>, NerveError> {
    let mut items: Vec<Morphism> = view.vertices().into_iter().map(Morphism::Vertex).collect();
    items.extend(view.paths(None, None)?.into_iter().map(Morphism::Path));
    let two = view.two_cells(caps)?;
    items.extend(two.items);
    Ok(Enumerated { items, exhaustive: two.exhaustive })
}

fn splits(cat: &FreeCategory, m: &Morphism) -> Vec<(Morphism, Morphism)> {
    match m {
        Morphism::Vertex(_) => vec![(m.clone(), m.clone())],
        Morphism::Path(p) => (0..=p.len())
            .map(|k| {
                let left = if k == 0 { Morphism::Vertex(cat.path_source(p)) } else { Morphism::Path(p[..k].to_vec()) };
                let right =
                    if k == p.len() { Morphism::Vertex(cat.path_target(p)) } else { Morphism::Path(p[k..].to_vec()) };
                (left, right)
            })
            .collect(),
        Morphism::TwoCell(_) => unreachable!("1-sources are paths or vertices"),
    }
}

/// Every n-cube (`n ≤ 3`) all of whose values lie in the category.
pub fn all_cubes(view: &Category, n: usize, caps: Caps) -> Result<Enumerated<SingularCube>, NerveError> {
    let cat = &*view.free;
    let in_view = |x: &SingularCube| x.assign.iter().all(|m| view.contains(m));
    match n {
        0 => Ok(Enumerated {
            items: view.vertices().into_iter().map(SingularCube::point).collect(),
            exhaustive: true,
        }),
        1 => {
            let cells = cells_up_to_two(view, caps)?;
            let items = cells.items.iter().filter(|m| m.dim() <= 1).map(|m| one_cube(cat, m)).collect();
            Ok(Enumerated { items, exhaustive: true })
        }
        2 => {
            let cells = cells_up_to_two(view, caps)?;
            let mut items = Vec::new();
            for u in &cells.items {
                for (a, b) in splits(cat, &cat.source(u, 1)) {
                    for (c, d) in splits(cat, &cat.target(u, 1)) {
                        let x = square(cat, u, [("-0", a.clone()), ("0+", b.clone()), ("0-", c.clone()), ("+0", d.clone())])?;
                        if in_view(&x) {
                            items.push(x);
                        }
                    }
                }
            }
            items.sort();
            Ok(Enumerated { items, exhaustive: cells.exhaustive })
        }
        3 => {
            let squares = all_cubes(view, 2, caps)?;
            let items = three_cubes(cat, &squares.items, |_| true)?;
            Ok(Enumerated { items, exhaustive: squares.exhaustive })
        }
        _ => Err(NerveError::DimensionTooHigh { dim: n, n: 3 }),
    }
}

/// 3-cubes over a 2-truncated category: every one is thin, so it is a
/// compatible shell of squares whose two composite 2-faces
/// `s_2 R(000)` and `t_2 R(000)` evaluate to the same morphism, its top.
fn three_cubes(
    cat: &FreeCategory,
    squares: &[SingularCube],
    keep: impl Fn(&SingularCube) -> bool,
) -> Result<Vec<SingularCube>, NerveError> {
    let faces: Vec<[SingularCube; 4]> = squares
        .iter()
        .map(|q| {
            [
                q.face(1, Sign::Minus).unwrap(),
                q.face(1, Sign::Plus).unwrap(),
                q.face(2, Sign::Minus).unwrap(),
                q.face(2, Sign::Plus).unwrap(),
            ]
        })
        .collect();
    let mut by_d1: HashMap<(&SingularCube, &SingularCube), Vec<usize>> = HashMap::new();
    let mut by_d12: HashMap<[&SingularCube; 4], Vec<usize>> = HashMap::new();
    for (k, f) in faces.iter().enumerate() {
        by_d1.entry((&f[0], &f[1])).or_default().push(k);
        by_d12.entry([&f[0], &f[1], &f[2], &f[3]]).or_default().push(k);
    }
    let cube = CubeCell::atom(&FaceWord::top(3));
    let (src2, tgt2) = (cube.source(2), cube.target(2));
    let empty = Vec::new();
    let mut out = Vec::new();
    for (a1, fa) in faces.iter().enumerate() {
        for (b1, fb) in faces.iter().enumerate() {
            // x_2^β: ∂_1^α x_2^β = ∂_1^β x_1^α.
            let x2 = |beta: usize| by_d1.get(&(&fa[beta], &fb[beta])).unwrap_or(&empty);
            for &a2 in x2(0) {
                for &b2 in x2(1) {
                    // x_3^β: ∂_1^α x_3^β = ∂_2^β x_1^α and ∂_2^α x_3^β = ∂_2^β x_2^α.
                    let x3 = |beta: usize| {
                        let key = [&fa[2 + beta], &fb[2 + beta], &faces[a2][2 + beta], &faces[b2][2 + beta]];
                        by_d12.get(&key).unwrap_or(&empty)
                    };
                    for &a3 in x3(0) {
                        for &b3 in x3(1) {
                            let pick = [a1, b1, a2, b2, a3, b3];
                            let shell = Shell { n: 2, faces: pick.iter().map(|&k| squares[k].clone()).collect() };
                            let probe = shell.boundary_cube(Morphism::Vertex(0));
                            let (Ok(s), Ok(t)) = (probe.evaluate(cat, &src2), probe.evaluate(cat, &tgt2)) else {
                                continue;
                            };
                            if s != t {
                                continue;
                            }
                            let x = shell.boundary_cube(s);
                            if keep(&x) && x.check_functorial(cat).is_ok() {
                                out.push(x);
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// `(γN)_n`: cubes whose faces in direction `j ≥ 2` are `(j-1)`-fold
/// `ε_1`-degenerate; for `n = 2`, the cubes with `x(0-)`, `x(0+)` identities.
pub fn gamma_part(view: &Category, n: usize, caps: Caps) -> Result<Enumerated<SingularCube>, NerveError> {
    if n > 2 {
        return Err(NerveError::DimensionTooHigh { dim: n, n: 2 });
    }
    let all = all_cubes(view, n, caps)?;
    let items = all
        .items
        .into_iter()
        .filter(|x| {
            (2..=x.n).all(|j| {
                Sign::BOTH.iter().all(|&s| {
                    let f = x.face(j, s).unwrap();
                    f.assign.iter().all(|m| m.dim() == 0)
                })
            })
        })
        .collect();
    Ok(Enumerated { items, exhaustive: all.exhaustive })
}

/// Generators of the α-corner complex in degree `d ≤ 3`.
pub fn enumerate_corner_generators(
    view: &Category,
    alpha: Sign,
    d: usize,
    caps: Caps,
) -> Result<Enumerated<SingularCube>, NerveError> {
    let cat = &*view.free;
    match d {
        0..=2 => {
            let all = all_cubes(view, d, caps)?;
            Ok(Enumerated { items: all.items.into_iter().filter(|x| x.is_corner(alpha)).collect(), exhaustive: all.exhaustive })
        }
        3 => {
            let squares = all_cubes(view, 2, caps)?;
            let items = three_cubes(cat, &squares.items, |x| x.is_corner(alpha))?;
            Ok(Enumerated { items, exhaustive: squares.exhaustive })
        }
        _ => Err(NerveError::DimensionTooHigh { dim: d, n: 3 }),
    }
}

/// Degenerate corner cubes `Γ_i^α y` of dimension `d` (the `D^α_d` basis).
pub fn degenerate_corners(corners_below: &[SingularCube], alpha: Sign) -> BTreeSet<SingularCube> {
    let mut out = BTreeSet::new();
    for y in corners_below {
        for i in 1..=y.n {
            out.insert(y.connection(i, alpha).unwrap());
        }
    }
    out
}

/// Whether `x = Γ_i^α y` for some `i`; then `y = ∂_i^α x`.
pub fn is_degenerate_corner(x: &SingularCube, alpha: Sign) -> bool {
    (1..x.n).any(|i| x.face(i, alpha).and_then(|y| y.connection(i, alpha)).is_ok_and(|z| z == *x))
}

/// `∂^α x = Σ_i (-1)^{i+1} ∂_i^α x` as a formal sum.
pub fn corner_boundary(x: &SingularCube, alpha: Sign) -> BTreeMap<SingularCube, i64> {
    let mut out = BTreeMap::new();
    for i in 1..=x.n {
        let c = if i % 2 == 1 { 1 } else { -1 };
        *out.entry(x.face(i, alpha).unwrap()).or_insert(0) += c;
    }
    out.retain(|_, c| *c != 0);
    out
}

impl fmt::Display for StructureMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureMap::Face(i, s) => write!(f, "∂_{i}^{}", s.symbol()),
            StructureMap::Degeneracy(i) => write!(f, "ε_{i}"),
            StructureMap::Connection(i, s) => write!(f, "Γ_{i}^{}", s.symbol()),
        }
    }
}
