//! The globular complex, the negative and positive corner complexes, the
//! Hurewicz chain maps between them, homotopy of ω-functors, and the
//! deadlock report read off the cokernels of `h_1^±`.
//!
//! A complex is either built in full from an enumeration of every cell, or
//! as a presentation that is exact through degree 1: its degree-2 basis is
//! then a generating set of the boundary image (whiskered generators, plus
//! prefix or suffix squares on the corner side) instead of the whole chain
//! group. Presentations keep the bilocalized models small.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cube_model::Sign;
use crate::cubical_sets::{vertex_id, Model, ModelError};
use crate::free_cat::{Caps, Category, FreeCatError, FreeCategory, Morphism};
use crate::homology_engine::{
    cokernel_on_homology, cokernel_witnesses, homology_basis, lattice_basis, solve_integer, SparseVec, ChainComplex, ChainMap, HomologyError,
    HomologyGroup, Matrix,
};
use crate::nerve::{
    all_cubes, assemble, cells_up_to_two, corner_boundary, enumerate_corner_generators, fold, fold_minus, fold_plus,
    is_degenerate_corner, square, NerveError, Shell, SingularCube,
};

/// Highest homology degree computed for free 2-categories.
pub const MAX_DEGREE: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Category(#[from] FreeCatError),
    #[error(transparent)]
    Nerve(#[from] NerveError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("degree {0} is above the supported maximum {MAX_DEGREE}")]
    Degree(usize),
    #[error("enumeration truncated by the caps: {0}")]
    NotExhaustive(String),
    #[error("{0} is sent to a morphism of lower dimension")]
    NotNonContracting(String),
    #[error("not an ω-functor at {0}")]
    NotAFunctor(String),
    #[error("internal invariant failed: {0}")]
    Internal(String),
}

/// Which homology: globular, negative corner or positive corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Theory {
    Gl,
    Neg,
    Pos,
}

impl Theory {
    pub const ALL: [Theory; 3] = [Theory::Gl, Theory::Neg, Theory::Pos];

    pub fn alpha(self) -> Option<Sign> {
        match self {
            Theory::Gl => None,
            Theory::Neg => Some(Sign::Minus),
            Theory::Pos => Some(Sign::Plus),
        }
    }

    pub fn of_sign(alpha: Sign) -> Theory {
        match alpha {
            Sign::Minus => Theory::Neg,
            Sign::Plus => Theory::Pos,
        }
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theory::Gl => "gl",
            Theory::Neg => "neg",
            Theory::Pos => "pos",
        })
    }
}

impl FromStr for Theory {
    type Err = String;

    fn from_str(s: &str) -> Result<Theory, String> {
        match s {
            "gl" => Ok(Theory::Gl),
            "neg" | "-" => Ok(Theory::Neg),
            "pos" | "+" => Ok(Theory::Pos),
            _ => Err(format!("unknown theory {s:?} (expected gl, neg or pos)")),
        }
    }
}

fn check_degree(d: usize) -> Result<(), InvariantError> {
    if d > MAX_DEGREE {
        return Err(InvariantError::Degree(d));
    }
    Ok(())
}

/// A finite globular set with iterated sources and targets: the cells of a
/// free 2-category up to the caps, or the globe `2_p`.
#[derive(Debug, Clone)]
pub struct FiniteCategory {
    pub names: Vec<String>,
    pub dims: Vec<usize>,
    /// `bounds[x][k] = (s_k x, t_k x)` for `k < dim x`.
    bounds: Vec<Vec<(usize, usize)>>,
    free: Option<FreeCells>,
    /// False when the caps truncated the enumeration.
    pub exhaustive: bool,
}

#[derive(Debug, Clone)]
struct FreeCells {
    cat: Arc<FreeCategory>,
    morphisms: Vec<Morphism>,
    lookup: HashMap<Morphism, usize>,
}

impl FiniteCategory {
    /// `2_p`, the free ω-category on one `p`-cell `A`: the cells `s_r A` and
    /// `t_r A` for `r < p`, then `A`.
    pub fn globe(p: usize) -> FiniteCategory {
        let mut c = FiniteCategory { names: Vec::new(), dims: Vec::new(), bounds: Vec::new(), free: None, exhaustive: true };
        let lower = |r: usize| (0..r).map(|k| (2 * k, 2 * k + 1)).collect::<Vec<_>>();
        for r in 0..p {
            for side in ["s", "t"] {
                c.names.push(format!("{side}{r}A"));
                c.dims.push(r);
                c.bounds.push(lower(r));
            }
        }
        c.names.push("A".into());
        c.dims.push(p);
        c.bounds.push(lower(p));
        c
    }

    /// Every cell of the category, 2-cells up to the caps.
    pub fn of_category(view: &Category, caps: Caps) -> Result<FiniteCategory, InvariantError> {
        let cells = cells_up_to_two(view, caps)?;
        Ok(FiniteCategory::of_morphisms(view, cells.items, cells.exhaustive))
    }

    /// Vertices, paths and optionally the whiskered generators. Not closed
    /// under composition, but the boundaries of the whiskered generators
    /// span those of all 2-cells.
    fn presentation(view: &Category, with_two: bool) -> Result<FiniteCategory, InvariantError> {
        let mut cells: Vec<Morphism> = view.vertices().into_iter().map(Morphism::Vertex).collect();
        cells.extend(view.paths(None, None)?.into_iter().map(Morphism::Path));
        if with_two {
            cells.extend(view.whiskered_generators()?);
        }
        Ok(FiniteCategory::of_morphisms(view, cells, true))
    }

    fn of_morphisms(view: &Category, cells: Vec<Morphism>, exhaustive: bool) -> FiniteCategory {
        let cat = view.free.clone();
        let lookup: HashMap<Morphism, usize> = cells.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let names = cells.iter().map(|m| cat.format(m)).collect();
        let dims = cells.iter().map(Morphism::dim).collect();
        let bounds = cells
            .iter()
            .map(|m| (0..m.dim()).map(|k| (lookup[&cat.source(m, k)], lookup[&cat.target(m, k)])).collect())
            .collect();
        FiniteCategory { names, dims, bounds, free: Some(FreeCells { cat, morphisms: cells, lookup }), exhaustive }
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn top_dim(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    pub fn cells_of_dim(&self, d: usize) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.dims[x] == d).collect()
    }

    /// `s_k x`, which is `x` itself when `k ≥ dim x`.
    pub fn source(&self, x: usize, k: usize) -> usize {
        self.bounds[x].get(k).map_or(x, |b| b.0)
    }

    pub fn target(&self, x: usize, k: usize) -> usize {
        self.bounds[x].get(k).map_or(x, |b| b.1)
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn free(&self) -> Option<&Arc<FreeCategory>> {
        self.free.as_ref().map(|f| &f.cat)
    }

    pub fn morphism(&self, x: usize) -> Option<&Morphism> {
        self.free.as_ref().map(|f| &f.morphisms[x])
    }

    pub fn index_of(&self, m: &Morphism) -> Option<usize> {
        self.free.as_ref().and_then(|f| f.lookup.get(m).copied())
    }
}

fn sparse(entries: &[(usize, i64)]) -> SparseVec {
    let mut v = SparseVec::new();
    for &(i, c) in entries {
        *v.entry(i).or_insert_with(BigInt::zero) += c;
    }
    v.retain(|_, c| !c.is_zero());
    v
}

fn matrix_of(rows: usize, columns: &[SparseVec]) -> Matrix {
    let mut m = Matrix::zeros(rows, columns.len());
    for (j, v) in columns.iter().enumerate() {
        for (&i, c) in v {
            m.add_to(i, j, c);
        }
    }
    m
}

/// Labels of a degree kept only as a basis of its boundary image.
fn image_labels(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("∂{k}")).collect()
}

fn add(m: &mut Matrix, i: usize, j: usize, c: i64) {
    m.add_to(i, j, &BigInt::from(c));
}

/// The globular complex: `C_0 ⊕ C_0` in degree 0, the `n`-cells in degree
/// `n`, with `∂(x) = (s_0 x, t_0 x)` on 1-cells and `s_{n-1} − t_{n-1}` above.
#[derive(Debug, Clone)]
pub struct GlobularComplex {
    pub category: FiniteCategory,
    pub chain: ChainComplex,
    /// Cells behind the basis in each degree. Degree 0 lists each vertex
    /// once; the basis is `(v, ·)` for every listed vertex, then `(·, v)`.
    /// A degree above `exact_through` is a lattice basis with no cells.
    pub basis: Vec<Vec<usize>>,
    /// Homology is the true one in degrees up to here.
    pub exact_through: usize,
}

impl GlobularComplex {
    /// The whole complex of a finite category.
    pub fn of_finite(category: FiniteCategory) -> Result<GlobularComplex, InvariantError> {
        let top = category.top_dim();
        GlobularComplex::build(category, top, top)
    }

    /// The complex of a free 2-category, exact through degree `top`.
    /// Degrees 0 and 1 need only the paths and the whiskered generators.
    pub fn of_view(view: &Category, top: usize, caps: Caps) -> Result<GlobularComplex, InvariantError> {
        check_degree(top)?;
        match top {
            0 => GlobularComplex::build(FiniteCategory::presentation(view, false)?, 1, 0),
            1 => GlobularComplex::build(FiniteCategory::presentation(view, true)?, 2, 1),
            _ => GlobularComplex::build(FiniteCategory::of_category(view, caps)?, 2, 2),
        }
    }

    /// Degrees up to `degrees`; a degree above `exact_through` only
    /// contributes its image, kept as a lattice basis.
    fn build(category: FiniteCategory, degrees: usize, exact_through: usize) -> Result<GlobularComplex, InvariantError> {
        let mut basis: Vec<Vec<usize>> = (0..=degrees).map(|d| category.cells_of_dim(d)).collect();
        let pos: Vec<HashMap<usize, usize>> =
            basis.iter().map(|b| b.iter().enumerate().map(|(k, &x)| (x, k)).collect()).collect();
        let nv = basis[0].len();
        let mut labels = vec![basis[0]
            .iter()
            .map(|&v| format!("({},·)", category.names[v]))
            .chain(basis[0].iter().map(|&v| format!("(·,{})", category.names[v])))
            .collect::<Vec<_>>()];
        let mut boundaries = vec![Matrix::zeros(0, 2 * nv)];
        for d in 1..=degrees {
            let rows = if d == 1 { 2 * nv } else { basis[d - 1].len() };
            let mut columns: Vec<SparseVec> = basis[d]
                .iter()
                .map(|&x| {
                    let (s, t) = (category.source(x, d - 1), category.target(x, d - 1));
                    if d == 1 {
                        sparse(&[(pos[0][&s], 1), (nv + pos[0][&t], 1)])
                    } else {
                        sparse(&[(pos[d - 1][&s], 1), (pos[d - 1][&t], -1)])
                    }
                })
                .collect();
            if d > exact_through {
                columns = lattice_basis(columns);
                basis[d].clear();
                labels.push(image_labels(columns.len()));
            } else {
                labels.push(basis[d].iter().map(|&x| category.names[x].clone()).collect());
            }
            boundaries.push(matrix_of(rows, &columns));
        }
        let chain = ChainComplex::new(labels, boundaries)?;
        Ok(GlobularComplex { category, chain, basis, exact_through })
    }

    pub fn exhaustive(&self) -> bool {
        self.category.exhaustive
    }

    fn positions(&self, d: usize) -> HashMap<usize, usize> {
        self.basis.get(d).map_or_else(HashMap::new, |b| b.iter().enumerate().map(|(k, &x)| (x, k)).collect())
    }
}

/// The α-corner complex modulo the degenerate corners `Γ_i^α y`, with
/// `∂^α = Σ_i (−1)^{i+1} ∂_i^α`.
#[derive(Debug, Clone)]
pub struct CornerComplex {
    pub alpha: Sign,
    pub view: Category,
    /// Non-degenerate corner cubes behind the basis of each degree up to
    /// `exact_through`. The degree above is a bare lattice basis of the
    /// boundaries of the next cubes.
    pub cubes: Vec<Vec<SingularCube>>,
    pub chain: ChainComplex,
    pub exact_through: usize,
    pub exhaustive: bool,
}

impl CornerComplex {
    /// Exact through degree `top`. For `top ≤ 1` the cubes are the
    /// vertices, the paths and a generating set of the degree-1 boundaries;
    /// `top = 2` is [`CornerComplex::full`].
    pub fn of_view(view: &Category, alpha: Sign, top: usize, caps: Caps) -> Result<CornerComplex, InvariantError> {
        check_degree(top)?;
        if top == 2 {
            return CornerComplex::full(view, alpha, 2, caps);
        }
        let cat = &*view.free;
        let mut cubes = vec![
            view.vertices().into_iter().map(SingularCube::point).collect::<Vec<_>>(),
            view.paths(None, None)?.into_iter().map(|p| fold(cat, &Morphism::Path(p), 1)).collect::<Result<Vec<_>, _>>()?,
        ];
        if top == 1 {
            cubes.push(generating_squares(view, alpha)?);
        }
        let above = cubes.pop().expect("two degrees at least");
        CornerComplex::from_cubes(view, alpha, cubes, above, true)
    }

    /// Every non-degenerate corner cube through degree `top ≤ 2`, and the
    /// image of those of degree `top + 1`.
    pub fn full(view: &Category, alpha: Sign, top: usize, caps: Caps) -> Result<CornerComplex, InvariantError> {
        check_degree(top)?;
        let mut exhaustive = true;
        let mut cubes = Vec::new();
        for d in 0..=top + 1 {
            let e = enumerate_corner_generators(view, alpha, d, caps)?;
            exhaustive &= e.exhaustive;
            cubes.push(e.items.into_iter().filter(|x| !is_degenerate_corner(x, alpha)).collect::<Vec<_>>());
        }
        let above = cubes.pop().expect("top + 1 was enumerated");
        CornerComplex::from_cubes(view, alpha, cubes, above, exhaustive)
    }

    /// The complex on `cubes` in degrees up to `exact_through`, plus a
    /// lattice basis of the boundaries of `above` one degree higher.
    fn from_cubes(
        view: &Category,
        alpha: Sign,
        cubes: Vec<Vec<SingularCube>>,
        above: Vec<SingularCube>,
        exhaustive: bool,
    ) -> Result<CornerComplex, InvariantError> {
        let top = cubes.len() - 1;
        let mut labels = Vec::new();
        let mut boundaries = vec![Matrix::zeros(0, cubes[0].len())];
        for d in 0..=top + 1 {
            if d == 0 {
                labels.push(cubes[0].iter().map(|x| cube_label(&view.free, x)).collect());
                continue;
            }
            let pos: HashMap<&SingularCube, usize> = cubes[d - 1].iter().enumerate().map(|(k, x)| (x, k)).collect();
            let basis = if d <= top { &cubes[d] } else { &above };
            let mut columns = basis
                .iter()
                .map(|x| boundary_column(&view.free, x, alpha, &pos, exhaustive))
                .collect::<Result<Vec<_>, _>>()?;
            if d > top {
                columns = lattice_basis(columns);
                labels.push(image_labels(columns.len()));
            } else {
                labels.push(basis.iter().map(|x| cube_label(&view.free, x)).collect());
            }
            boundaries.push(matrix_of(cubes[d - 1].len(), &columns));
        }
        let chain = ChainComplex::new(labels, boundaries)?;
        Ok(CornerComplex { alpha, view: view.clone(), cubes, chain, exact_through: top, exhaustive })
    }

    pub fn position(&self, d: usize, x: &SingularCube) -> Option<usize> {
        self.cubes.get(d).and_then(|b| b.binary_search(x).ok().or_else(|| b.iter().position(|y| y == x)))
    }
}

/// `∂^α x` modulo degenerate corners, on the basis indexed by `pos`.
fn boundary_column(
    cat: &FreeCategory,
    x: &SingularCube,
    alpha: Sign,
    pos: &HashMap<&SingularCube, usize>,
    exhaustive: bool,
) -> Result<SparseVec, InvariantError> {
    let mut out = SparseVec::new();
    for (y, c) in corner_boundary(x, alpha) {
        match pos.get(&y) {
            Some(&i) => *out.entry(i).or_insert_with(BigInt::zero) += c,
            None if is_degenerate_corner(&y, alpha) => {}
            None if exhaustive => return Err(InvariantError::Internal(format!("face {} is not a basis corner", y.format(cat)))),
            None => return Err(InvariantError::NotExhaustive(format!("face {} was not enumerated", y.format(cat)))),
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

fn cube_label(cat: &FreeCategory, x: &SingularCube) -> String {
    match x.n {
        0 | 1 => cat.format(x.top()),
        _ => x.format(cat),
    }
}

/// Corner squares whose boundaries span `∂^α` of all corner squares:
/// the folds `□_2^α w` of whiskered generators, and for every split
/// `P = p·q` the square with `∂^- = p − P` (`α = -`) or `∂^+ = P − q`.
fn generating_squares(view: &Category, alpha: Sign) -> Result<Vec<SingularCube>, InvariantError> {
    let cat = &*view.free;
    let mut out = BTreeSet::new();
    for w in view.whiskered_generators()? {
        out.insert(match alpha {
            Sign::Minus => fold_minus(cat, &w, 2)?,
            Sign::Plus => fold_plus(cat, &w, 2)?,
        });
    }
    for path in view.paths(None, None)? {
        let whole = Morphism::Path(path.clone());
        for k in 1..path.len() {
            let (p, q) = (Morphism::Path(path[..k].to_vec()), Morphism::Path(path[k..].to_vec()));
            if !view.contains(&p) || !view.contains(&q) {
                continue;
            }
            let x = match alpha {
                Sign::Minus => {
                    square(cat, &whole, [("-0", p), ("0+", q), ("0-", whole.clone()), ("+0", cat.target(&whole, 0))])?
                }
                Sign::Plus => {
                    square(cat, &whole, [("-0", p), ("0+", q), ("0-", cat.source(&whole, 0)), ("+0", whole.clone())])?
                }
            };
            out.insert(x);
        }
    }
    Ok(out.into_iter().collect())
}

/// `h^α(x)` for a cell of dimension ≤ 2, with its sign: `h_1 = □_1`,
/// `h_2^- = □_2^-`, `h_2^+ = −□_2^+`.
pub fn hurewicz_image(cat: &FreeCategory, alpha: Sign, x: &Morphism) -> Result<(SingularCube, i64), InvariantError> {
    Ok(match (x.dim(), alpha) {
        (2, Sign::Minus) => (fold_minus(cat, x, 2)?, 1),
        (2, Sign::Plus) => (fold_plus(cat, x, 2)?, -1),
        (d, _) => (fold(cat, x, d)?, 1),
    })
}

/// The Hurewicz chain map `h^α : C^gl → Z ωCat(I^*, C)^α / D^α` in every
/// degree where both complexes are exact. `h_0` projects on the source copy for
/// `α = -` and on the target copy for `α = +`.
pub fn hurewicz_map(glob: &GlobularComplex, corner: &CornerComplex) -> Result<ChainMap, InvariantError> {
    let fc = &glob.category;
    let cat = match fc.free() {
        Some(c) if Arc::ptr_eq(c, &corner.view.free) => c.clone(),
        _ => return Err(InvariantError::Internal("complexes of different categories".into())),
    };
    let alpha = corner.alpha;
    let top = glob.exact_through.min(corner.exact_through);
    let mut maps = Vec::new();
    for d in 0..=top {
        let (rows, cols) = (corner.chain.size(d), glob.chain.size(d));
        let mut m = Matrix::zeros(rows, cols);
        for (j, &x) in glob.basis.get(d).map(Vec::as_slice).unwrap_or(&[]).iter().enumerate() {
            let (cube, sign) = hurewicz_image(&cat, alpha, fc.morphism(x).expect("free category"))?;
            let i = corner.position(d, &cube).ok_or_else(|| {
                let msg = format!("h({}) is not a basis corner", fc.names[x]);
                if corner.exhaustive && glob.exhaustive() {
                    InvariantError::Internal(msg)
                } else {
                    InvariantError::NotExhaustive(msg)
                }
            })?;
            let col = if d == 0 && alpha == Sign::Plus { j + glob.basis[0].len() } else { j };
            add(&mut m, i, col, sign);
        }
        maps.push(m);
    }
    Ok(ChainMap::new(glob.chain.clone(), corner.chain.clone(), maps)?)
}

/// `∂^α h(x) − h(∂^gl x)` on unreduced nerve chains, for a cell of
/// dimension 1 or 2. Its terms must all be degenerate corners.
pub fn hurewicz_defect(cat: &FreeCategory, alpha: Sign, x: &Morphism) -> Result<BTreeMap<SingularCube, i64>, InvariantError> {
    let (hx, sign) = hurewicz_image(cat, alpha, x)?;
    let mut out: BTreeMap<SingularCube, i64> = BTreeMap::new();
    for (y, c) in corner_boundary(&hx, alpha) {
        *out.entry(y).or_insert(0) += sign * c;
    }
    let lower: Vec<(SingularCube, i64)> = match x.dim() {
        1 => {
            let v = if alpha == Sign::Minus { cat.source(x, 0) } else { cat.target(x, 0) };
            vec![(hurewicz_image(cat, alpha, &v)?.0, 1)]
        }
        2 => {
            let (s, _) = hurewicz_image(cat, alpha, &cat.source(x, 1))?;
            let (t, _) = hurewicz_image(cat, alpha, &cat.target(x, 1))?;
            vec![(s, 1), (t, -1)]
        }
        d => return Err(InvariantError::Degree(d)),
    };
    for (y, c) in lower {
        *out.entry(y).or_insert(0) -= c;
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

/// The corner 3-cube with faces `□_2^-(a)`, `□_2^-(a *_1 b)`, `□_2^-(b)`
/// in directions 1, 2, 3 at `-`, constant elsewhere, and top `a *_1 b`.
/// Its negative boundary is `□_2^-(a) − □_2^-(a *_1 b) + □_2^-(b)`, so
/// `h_2^-(a *_1 b − a − b)` is a boundary.
pub fn composition_cube(cat: &FreeCategory, a: &Morphism, b: &Morphism) -> Result<SingularCube, InvariantError> {
    let ab = cat.compose(a, b, 1)?;
    let end = cat.target(a, 0);
    let konst = SingularCube::from_fn(2, |_| end.clone());
    let faces = [fold_minus(cat, a, 2)?, fold_minus(cat, &ab, 2)?, fold_minus(cat, b, 2)?];
    let shell = Shell::new(2, |i, s| if s == Sign::Minus { faces[i - 1].clone() } else { konst.clone() })?;
    Ok(assemble(cat, &shell, &ab)?)
}

fn group_json<S: Serializer>(g: &HomologyGroup, s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Json {
        text: String,
        rank: usize,
        torsion: Vec<String>,
    }
    Json { text: g.to_string(), rank: g.rank, torsion: g.torsion.iter().map(ToString::to_string).collect() }.serialize(s)
}

/// A homology group with printable cycle representatives of its generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyReport {
    pub theory: Theory,
    pub degree: usize,
    #[serde(serialize_with = "group_json")]
    pub group: HomologyGroup,
    pub witnesses: Vec<String>,
    /// False when a cap truncated an enumeration: the group is then only
    /// computed from the cells found.
    pub exhaustive: bool,
}

fn is_cycle(chain: &ChainComplex, d: usize, z: &[BigInt]) -> bool {
    chain.boundary(d).mul_vec(z).iter().all(Zero::is_zero)
}

fn homology_report(theory: Theory, chain: &ChainComplex, d: usize, exhaustive: bool) -> Result<HomologyReport, InvariantError> {
    let hb = homology_basis(chain, d)?;
    let mut witnesses = Vec::new();
    for z in &hb.generators {
        if !is_cycle(chain, d, z) {
            return Err(InvariantError::Internal(format!("H_{d} witness is not a cycle")));
        }
        witnesses.push(chain.format_chain(d, z));
    }
    Ok(HomologyReport { theory, degree: d, group: hb.group, witnesses, exhaustive })
}

/// `H_d^{gl}` for `d ≤ 2`.
pub fn globular_homology(view: &Category, d: usize, caps: Caps) -> Result<HomologyReport, InvariantError> {
    let g = GlobularComplex::of_view(view, d, caps)?;
    homology_report(Theory::Gl, &g.chain, d, g.exhaustive())
}

/// `H_d^α` for `d ≤ 2`. In degree 2 the group is exact only when the
/// degree-3 enumeration is, which the report's `exhaustive` flag records.
pub fn corner_homology(view: &Category, alpha: Sign, d: usize, caps: Caps) -> Result<HomologyReport, InvariantError> {
    let c = CornerComplex::of_view(view, alpha, d, caps)?;
    homology_report(Theory::of_sign(alpha), &c.chain, d, c.exhaustive)
}

pub fn homology(view: &Category, theory: Theory, d: usize, caps: Caps) -> Result<HomologyReport, InvariantError> {
    match theory.alpha() {
        None => globular_homology(view, d, caps),
        Some(alpha) => corner_homology(view, alpha, d, caps),
    }
}

/// `H_d^α / h^α_*(H_d^{gl})` with cycles spanning it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CokernelReport {
    pub theory: Theory,
    pub degree: usize,
    #[serde(serialize_with = "group_json")]
    pub group: HomologyGroup,
    /// Cycles of the corner complex, with their order when finite.
    pub witnesses: Vec<String>,
    pub exhaustive: bool,
}

pub fn hurewicz_cokernel(view: &Category, alpha: Sign, d: usize, caps: Caps) -> Result<CokernelReport, InvariantError> {
    let glob = GlobularComplex::of_view(view, d, caps)?;
    let corner = CornerComplex::of_view(view, alpha, d, caps)?;
    let h = hurewicz_map(&glob, &corner)?;
    let group = cokernel_on_homology(&h, d)?;
    let mut witnesses = Vec::new();
    for (z, order) in cokernel_witnesses(&h, d)? {
        if !is_cycle(&corner.chain, d, &z) {
            return Err(InvariantError::Internal("cokernel witness is not a cycle".into()));
        }
        let text = corner.chain.format_chain(d, &z);
        witnesses.push(match order {
            Some(o) => format!("{text} (order {o})"),
            None => text,
        });
    }
    let exhaustive = glob.exhaustive() && corner.exhaustive;
    Ok(CokernelReport { theory: Theory::of_sign(alpha), degree: d, group, witnesses, exhaustive })
}

/// The unreduced complex `Z ωCat(I^*, C)` of all cubes with `∂^α`, through
/// degree `top + 1 ≤ 3`, and whether its enumeration was exhaustive.
pub fn nerve_complex(view: &Category, alpha: Sign, top: usize, caps: Caps) -> Result<(ChainComplex, bool), InvariantError> {
    check_degree(top)?;
    let cat = &*view.free;
    let mut exhaustive = true;
    let mut cubes = Vec::new();
    for d in 0..=top + 1 {
        let e = all_cubes(view, d, caps)?;
        exhaustive &= e.exhaustive;
        cubes.push(e.items);
    }
    let mut labels = Vec::new();
    let mut boundaries = vec![Matrix::zeros(0, cubes[0].len())];
    for (d, basis) in cubes.iter().enumerate() {
        labels.push(basis.iter().map(|x| x.format(cat)).collect());
        if d == 0 {
            continue;
        }
        let pos: HashMap<&SingularCube, usize> = cubes[d - 1].iter().enumerate().map(|(k, x)| (x, k)).collect();
        let mut m = Matrix::zeros(cubes[d - 1].len(), basis.len());
        for (j, x) in basis.iter().enumerate() {
            for (y, c) in corner_boundary(x, alpha) {
                let i = pos.get(&y).ok_or_else(|| InvariantError::NotExhaustive(format!("face {}", y.format(cat))))?;
                add(&mut m, *i, j, c);
            }
        }
        boundaries.push(m);
    }
    Ok((ChainComplex::new(labels, boundaries)?, exhaustive))
}

/// `∂^α ε_1 x + ε_1 ∂^α x − x`, which vanishes for every cube (the last
/// term is absent in degree 0, where `∂^α ε_1 x = x`).
pub fn retraction_defect(x: &SingularCube, alpha: Sign) -> BTreeMap<SingularCube, i64> {
    let mut out: BTreeMap<SingularCube, i64> = BTreeMap::new();
    for (y, c) in corner_boundary(&x.degeneracy(1).expect("ε_1 always applies"), alpha) {
        *out.entry(y).or_insert(0) += c;
    }
    for (y, c) in corner_boundary(x, alpha) {
        *out.entry(y.degeneracy(1).expect("ε_1 always applies")).or_insert(0) += c;
    }
    *out.entry(x.clone()).or_insert(0) -= 1;
    out.retain(|_, c| *c != 0);
    out
}

/// An ω-functor between free 2-categories given on generators: vertices to
/// vertices, edges to nonempty paths, 2-generators to 2-cells or paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMap {
    pub vertices: Vec<usize>,
    pub edges: Vec<Vec<usize>>,
    pub generators: Vec<Morphism>,
}

impl GeneratorMap {
    /// From images keyed by generator id; every generator needs one.
    pub fn new(c: &FreeCategory, d: &FreeCategory, images: &[(&str, Morphism)]) -> Result<GeneratorMap, InvariantError> {
        let image = |id: &str| {
            images
                .iter()
                .find(|(k, _)| *k == id)
                .map(|(_, m)| m.clone())
                .ok_or_else(|| InvariantError::NotAFunctor(format!("{id} has no image")))
        };
        let mut f = GeneratorMap { vertices: Vec::new(), edges: Vec::new(), generators: Vec::new() };
        for v in &c.poly.vertices {
            match image(v)? {
                Morphism::Vertex(w) => f.vertices.push(w),
                _ => return Err(InvariantError::NotAFunctor(v.clone())),
            }
        }
        for (e, g) in c.poly.gen1.iter().enumerate() {
            let p = match image(&g.id)? {
                Morphism::Path(p) => p,
                Morphism::Vertex(_) => return Err(InvariantError::NotNonContracting(g.id.clone())),
                Morphism::TwoCell(_) => return Err(InvariantError::NotAFunctor(g.id.clone())),
            };
            if d.path_source(&p) != f.vertices[c.edge_src[e]] || d.path_target(&p) != f.vertices[c.edge_tgt[e]] {
                return Err(InvariantError::NotAFunctor(g.id.clone()));
            }
            f.edges.push(p);
        }
        for (k, g) in c.poly.gen2.iter().enumerate() {
            let m = image(&g.id)?;
            let src = f.apply(c, d, &Morphism::Path(c.gen_src[k].clone()))?;
            let tgt = f.apply(c, d, &Morphism::Path(c.gen_tgt[k].clone()))?;
            if m.dim() == 0 || d.source(&m, 1) != src || d.target(&m, 1) != tgt {
                return Err(InvariantError::NotAFunctor(g.id.clone()));
            }
            f.generators.push(m);
        }
        Ok(f)
    }

    /// The image of any cell, whiskering and `*_1`-composing the images of
    /// the rewriting steps of a 2-cell.
    pub fn apply(&self, c: &FreeCategory, d: &FreeCategory, m: &Morphism) -> Result<Morphism, InvariantError> {
        let path = |p: &[usize]| Morphism::Path(p.iter().flat_map(|&e| self.edges[e].iter().copied()).collect());
        let broken = |_| InvariantError::NotAFunctor(c.format(m));
        Ok(match m {
            Morphism::Vertex(v) => Morphism::Vertex(self.vertices[*v]),
            Morphism::Path(p) => path(p),
            Morphism::TwoCell(cell) => {
                let mut cur = cell.source.clone();
                let mut acc = path(&cur);
                for s in &cell.steps {
                    let end = s.offset + c.gen_src[s.gen].len();
                    let mut w = self.generators[s.gen].clone();
                    if s.offset > 0 {
                        w = d.compose(&path(&cur[..s.offset]), &w, 0).map_err(broken)?;
                    }
                    if end < cur.len() {
                        w = d.compose(&w, &path(&cur[end..]), 0).map_err(broken)?;
                    }
                    acc = d.compose(&acc, &w, 1).map_err(broken)?;
                    cur = c.replay(&cur, &[*s])?;
                }
                acc
            }
        })
    }
}

/// An ω-functor between finite categories, as the image of every cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellMap(pub Vec<usize>);

impl CellMap {
    pub fn identity(c: &FiniteCategory) -> CellMap {
        CellMap((0..c.len()).collect())
    }

    /// The functor out of `2_p` sending `A` to `image`.
    pub fn from_globe(c: &FiniteCategory, d: &FiniteCategory, image: usize) -> Result<CellMap, InvariantError> {
        let a = c.len() - 1;
        let p = c.dims[a];
        if d.dims[image] > p {
            return Err(InvariantError::NotAFunctor(c.names[a].clone()));
        }
        let images = (0..c.len())
            .map(|x| {
                let r = c.dims[x];
                if x == a {
                    image
                } else if c.source(a, r) == x {
                    d.source(image, r)
                } else {
                    d.target(image, r)
                }
            })
            .collect();
        let f = CellMap(images);
        f.check(c, d)?;
        Ok(f)
    }

    /// The functor induced on enumerated cells by a generator map.
    pub fn from_generators(c: &FiniteCategory, d: &FiniteCategory, f: &GeneratorMap) -> Result<CellMap, InvariantError> {
        let (Some(cf), Some(df)) = (c.free(), d.free()) else {
            return Err(InvariantError::Internal("generator maps need free categories".into()));
        };
        let mut images = Vec::with_capacity(c.len());
        for x in 0..c.len() {
            let m = f.apply(cf, df, c.morphism(x).unwrap())?;
            match d.index_of(&m) {
                Some(y) => images.push(y),
                None if d.exhaustive => return Err(InvariantError::NotAFunctor(c.names[x].clone())),
                None => return Err(InvariantError::NotExhaustive(format!("image of {}", c.names[x]))),
            }
        }
        let g = CellMap(images);
        g.check(c, d)?;
        Ok(g)
    }

    /// `after ∘ self`.
    pub fn then(&self, after: &CellMap) -> CellMap {
        CellMap(self.0.iter().map(|&y| after.0[y]).collect())
    }

    /// Dimensions do not grow, sources and targets are preserved, and
    /// 1-cells stay 1-dimensional.
    pub fn check(&self, c: &FiniteCategory, d: &FiniteCategory) -> Result<(), InvariantError> {
        if self.0.len() != c.len() {
            return Err(InvariantError::NotAFunctor("cell count".into()));
        }
        for x in 0..c.len() {
            let y = self.0[x];
            if d.dims[y] > c.dims[x] {
                return Err(InvariantError::NotAFunctor(c.names[x].clone()));
            }
            if c.dims[x] == 1 && d.dims[y] != 1 {
                return Err(InvariantError::NotNonContracting(c.names[x].clone()));
            }
            for k in 0..c.dims[x] {
                if self.0[c.source(x, k)] != d.source(y, k) || self.0[c.target(x, k)] != d.target(y, k) {
                    return Err(InvariantError::NotAFunctor(c.names[x].clone()));
                }
            }
        }
        Ok(())
    }
}

/// Maps `h_r : Z C_r → Z D_{r+1}` for `r ≥ 1`, as the image of each cell
/// of dimension `r ≥ 1`; absent cells map to 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FunctorHomotopy {
    pub maps: BTreeMap<usize, Vec<(usize, BigInt)>>,
}

impl FunctorHomotopy {
    pub fn format(&self, c: &FiniteCategory, d: &FiniteCategory) -> Vec<String> {
        self.maps
            .iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(&x, v)| {
                let labels: Vec<String> = v.iter().map(|(y, _)| d.names[*y].clone()).collect();
                let coeffs: Vec<BigInt> = v.iter().map(|(_, c)| c.clone()).collect();
                format!("h({}) = {}", c.names[x], crate::homology_engine::format_combination(&labels, &coeffs))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomotopyOutcome {
    pub homotopic: bool,
    pub witness: Option<FunctorHomotopy>,
}

fn check_pair(c: &FiniteCategory, d: &FiniteCategory, f: &CellMap, g: &CellMap) -> Result<(), InvariantError> {
    f.check(c, d)?;
    g.check(c, d)
}

/// `f(x) − g(x)` on `r`-cells of `D`, for an `r`-cell `x`; lower-dimensional
/// images vanish modulo `Z D_{r-1}`.
fn difference(d: &FiniteCategory, f: &CellMap, g: &CellMap, x: usize, r: usize) -> BTreeMap<usize, BigInt> {
    let mut out: BTreeMap<usize, BigInt> = BTreeMap::new();
    for (y, c) in [(f.0[x], 1), (g.0[x], -1)] {
        if d.dims[y] == r {
            *out.entry(y).or_default() += c;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Whether `h` satisfies, for every `r`-cell `x` with `r ≥ 1`,
/// `h_{r-1}(s_{r-1} − t_{r-1})(x) + (s_r − t_r) h_r(x) = f(x) − g(x)`
/// modulo `Z D_{r-1}` (exactly for `r = 1`, where `h_0 = 0`), with `f = g`
/// on 0-cells.
pub fn verify_homotopy(c: &FiniteCategory, d: &FiniteCategory, f: &CellMap, g: &CellMap, h: &FunctorHomotopy) -> bool {
    if c.cells_of_dim(0).iter().any(|&x| f.0[x] != g.0[x]) {
        return false;
    }
    let image = |x: usize| h.maps.get(&x).map(Vec::as_slice).unwrap_or(&[]);
    for (&x, v) in &h.maps {
        if c.dims[x] == 0 || v.iter().any(|(y, _)| d.dims[*y] != c.dims[x] + 1) {
            return false;
        }
    }
    for x in 0..c.len() {
        let r = c.dims[x];
        if r == 0 {
            continue;
        }
        let mut lhs: BTreeMap<usize, BigInt> = BTreeMap::new();
        if r >= 2 {
            for (z, sign) in [(c.source(x, r - 1), 1), (c.target(x, r - 1), -1)] {
                for (y, k) in image(z) {
                    *lhs.entry(*y).or_default() += k * sign;
                }
            }
        }
        for (y, k) in image(x) {
            *lhs.entry(d.source(*y, r)).or_default() += k;
            *lhs.entry(d.target(*y, r)).or_default() -= k;
        }
        lhs.retain(|_, c| !c.is_zero());
        if lhs != difference(d, f, g, x, r) {
            return false;
        }
    }
    true
}

/// Solves the homotopy equations of [`verify_homotopy`] for all `h_r`
/// at once as one integer system.
pub fn functor_homotopy_check(
    c: &FiniteCategory,
    d: &FiniteCategory,
    f: &CellMap,
    g: &CellMap,
) -> Result<HomotopyOutcome, InvariantError> {
    check_pair(c, d, f, g)?;
    if c.cells_of_dim(0).iter().any(|&x| f.0[x] != g.0[x]) {
        return Ok(HomotopyOutcome { homotopic: false, witness: None });
    }
    if f == g {
        return Ok(HomotopyOutcome { homotopic: true, witness: Some(FunctorHomotopy::default()) });
    }
    let mut vars: Vec<(usize, usize)> = Vec::new();
    let mut rows: HashMap<(usize, usize), usize> = HashMap::new();
    for x in 0..c.len() {
        let r = c.dims[x];
        if r == 0 {
            continue;
        }
        vars.extend(d.cells_of_dim(r + 1).into_iter().map(|y| (x, y)));
        for z in d.cells_of_dim(r) {
            let k = rows.len();
            rows.insert((x, z), k);
        }
    }
    let mut a = Matrix::zeros(rows.len(), vars.len());
    for (j, &(x, y)) in vars.iter().enumerate() {
        let r = c.dims[x];
        add(&mut a, rows[&(x, d.source(y, r))], j, 1);
        add(&mut a, rows[&(x, d.target(y, r))], j, -1);
        // x is s_r or t_r of the (r+1)-cells above it.
        for above in c.cells_of_dim(r + 1) {
            if c.source(above, r) == x {
                add(&mut a, rows[&(above, y)], j, 1);
            }
            if c.target(above, r) == x {
                add(&mut a, rows[&(above, y)], j, -1);
            }
        }
    }
    let mut rhs = vec![BigInt::zero(); rows.len()];
    for x in 0..c.len() {
        let r = c.dims[x];
        if r == 0 {
            continue;
        }
        for (y, k) in difference(d, f, g, x, r) {
            rhs[rows[&(x, y)]] += k;
        }
    }
    match solve_integer(&a, &rhs) {
        Some(z) => {
            let mut h = FunctorHomotopy::default();
            for (&(x, y), k) in vars.iter().zip(z) {
                if !k.is_zero() {
                    h.maps.entry(x).or_default().push((y, k));
                }
            }
            if !verify_homotopy(c, d, f, g, &h) {
                return Err(InvariantError::Internal("homotopy solution fails its equations".into()));
            }
            Ok(HomotopyOutcome { homotopic: true, witness: Some(h) })
        }
        None if d.exhaustive => Ok(HomotopyOutcome { homotopic: false, witness: None }),
        None => Err(InvariantError::NotExhaustive("no homotopy among the enumerated cells".into())),
    }
}

/// `C^gl(f)`: `(u, v) ↦ (f u, f v)` in degree 0 and `x ↦ f(x)` above when
/// `f(x)` keeps the dimension of `x`, 0 otherwise.
pub fn globular_chain_map(c: &GlobularComplex, d: &GlobularComplex, f: &CellMap) -> Result<ChainMap, InvariantError> {
    let (nc, nd) = (c.basis[0].len(), d.basis[0].len());
    let mut maps = Vec::new();
    for deg in 0..=c.exact_through {
        if deg > d.exact_through && d.chain.size(deg) > 0 {
            return Err(InvariantError::Internal(format!("target complex is not exact in degree {deg}")));
        }
        let mut m = Matrix::zeros(d.chain.size(deg), c.chain.size(deg));
        let pos = d.positions(deg);
        for (j, &x) in c.basis.get(deg).map(Vec::as_slice).unwrap_or(&[]).iter().enumerate() {
            let y = f.0[x];
            if d.category.dims[y] != deg {
                continue;
            }
            let i = *pos.get(&y).ok_or_else(|| InvariantError::NotExhaustive(format!("{} is not in the target basis", d.category.names[y])))?;
            add(&mut m, i, j, 1);
            if deg == 0 {
                add(&mut m, nd + i, nc + j, 1);
            }
        }
        maps.push(m);
    }
    Ok(ChainMap::new(c.chain.clone(), d.chain.clone(), maps)?)
}

/// The map induced on corner chains in degrees 0 and 1 by a functor between
/// free categories: `x ↦ f∘x` on vertices and on 1-cubes.
pub fn corner_chain_map(
    c: &CornerComplex,
    d: &CornerComplex,
    cells_c: &FiniteCategory,
    cells_d: &FiniteCategory,
    f: &CellMap,
) -> Result<ChainMap, InvariantError> {
    let dcat = &*d.view.free;
    let mut maps = Vec::new();
    for deg in 0..=1 {
        let mut m = Matrix::zeros(d.chain.size(deg), c.chain.size(deg));
        for (j, x) in c.cubes[deg].iter().enumerate() {
            let cell = cells_c.index_of(x.top()).ok_or_else(|| InvariantError::Internal("unknown cell".into()))?;
            let image = cells_d.morphism(f.0[cell]).ok_or_else(|| InvariantError::Internal("not a free category".into()))?;
            let y = fold(dcat, image, deg)?;
            let i = d.position(deg, &y).ok_or_else(|| InvariantError::NotAFunctor(cells_c.names[cell].clone()))?;
            add(&mut m, i, j, 1);
        }
        maps.push(m);
    }
    Ok(ChainMap::new(c.chain.clone(), d.chain.clone(), maps)?)
}

/// Deadlocks, unreachable states and the homology of the bilocalized model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub initial_states: Vec<String>,
    pub final_states: Vec<String>,
    pub intended_initial: Vec<String>,
    pub intended_final: Vec<String>,
    /// Final states that are not intended final states.
    pub deadlocks: Vec<String>,
    /// Initial states that are not intended initial states.
    pub unreachable: Vec<String>,
    /// `H^gl`, `H^-`, `H^+` in degrees 0 and 1 of the bilocalization.
    pub homology: Vec<HomologyReport>,
    /// `coker h_1^-` then `coker h_1^+` on the bilocalization.
    pub cokernels: Vec<CokernelReport>,
    pub caveats: Vec<String>,
}

/// The states a model is meant to start and end in: the lower-left and
/// upper-right corners of a grid. Other models have none by default.
pub fn intended_states(model: &Model) -> Option<(Vec<String>, Vec<String>)> {
    match model {
        Model::Grid(g) => Some((vec![vertex_id(0, 0)], vec![vertex_id(g.width as i64, g.height as i64)])),
        _ => None,
    }
}

/// Reads deadlocks and unreachable states off the edge degrees and computes
/// the cokernels of `h_1^±` that detect them. Without intended states every
/// initial and final state counts as intended.
pub fn deadlock_report(
    model: &Model,
    intended: Option<(Vec<String>, Vec<String>)>,
    caps: Caps,
) -> Result<AnalysisReport, InvariantError> {
    let cat = Arc::new(FreeCategory::new(model.to_polygraph()?)?);
    cat.check_acyclic()?;
    let names = |vs: &[usize]| vs.iter().map(|&v| cat.poly.vertices[v].clone()).collect::<Vec<_>>();
    let initial = names(&cat.initial_states());
    let fin = names(&cat.final_states());
    let mut caveats = Vec::new();
    let (intended_initial, intended_final) = match intended.or_else(|| intended_states(model)) {
        Some((i, f)) => {
            for v in i.iter().chain(&f) {
                cat.vertex(v)?;
            }
            (i, f)
        }
        None => {
            caveats.push("no intended initial or final states: every initial and final state counts as intended".into());
            (initial.clone(), fin.clone())
        }
    };
    let deadlocks = fin.iter().filter(|v| !intended_final.contains(v)).cloned().collect();
    let unreachable = initial.iter().filter(|v| !intended_initial.contains(v)).cloned().collect();
    let view = Category::full(cat).bilocalize_states();
    let mut homology_table = Vec::new();
    for theory in Theory::ALL {
        for d in 0..=1 {
            homology_table.push(homology(&view, theory, d, caps)?);
        }
    }
    let cokernels = vec![hurewicz_cokernel(&view, Sign::Minus, 1, caps)?, hurewicz_cokernel(&view, Sign::Plus, 1, caps)?];
    Ok(AnalysisReport {
        initial_states: initial,
        final_states: fin,
        intended_initial,
        intended_final,
        deadlocks,
        unreachable,
        homology: homology_table,
        cokernels,
        caveats,
    })
}
