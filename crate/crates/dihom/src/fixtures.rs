//! Small models used by the tests, the acceptance suite and the CLI examples.

use crate::cube_model::{enumerate_faces, FaceWord, Letter};
use crate::cubical_sets::{compile_to_polygraph, grid_complex, CubicalSet, GridModel, Model};
use crate::free_cat::{Category, FreeCategory, Gen1, Gen2, Morphism, Polygraph2};

use std::sync::Arc;

pub fn single_square() -> GridModel {
    GridModel::new(1, 1, vec![])
}

/// A 3×3 grid with the middle square removed.
pub fn trou() -> GridModel {
    GridModel::new(3, 3, vec![[1, 1, 2, 2]])
}

/// Labels of the drawn edges of [`trou`], as grid ids.
pub const TROU_EDGES: [(&str, &str); 15] = [
    ("u", "ey(0,0)"),
    ("v", "ex(0,1)"),
    ("w", "ey(1,1)"),
    ("x", "ex(1,2)"),
    ("y", "ey(2,2)"),
    ("z", "ex(2,3)"),
    ("a", "ey(0,1)"),
    ("b", "ex(0,2)"),
    ("c", "ex(2,2)"),
    ("d", "ey(3,2)"),
    ("e", "ex(0,0)"),
    ("f", "ex(1,0)"),
    ("g", "ex(2,0)"),
    ("h", "ey(3,0)"),
    ("i", "ey(3,1)"),
];

/// The four execution paths drawn on [`trou`].
pub const TROU_GAMMAS: [&str; 4] = ["uvwxyz", "uabxcd", "uvwxcd", "efghid"];

/// A trou path given by its letters, e.g. `"uvwxyz"`.
pub fn trou_path(cat: &FreeCategory, letters: &str) -> Morphism {
    let ids: Vec<&str> = letters
        .chars()
        .map(|c| TROU_EDGES.iter().find(|(l, _)| l.starts_with(c)).expect("known trou label").1)
        .collect();
    cat.path(&ids).expect("trou labels form paths")
}

/// The 5×5 grid with two overlapping bars removed: states `α = v(0,0)`,
/// `β = v(5,5)`, deadlock `γ = v(2,2)` and unreachable `δ = v(3,3)`.
pub fn swiss_flag() -> GridModel {
    GridModel::new(5, 5, vec![[1, 2, 4, 3], [2, 1, 3, 4]])
}

pub const SWISS_ALPHA: &str = "v(0,0)";
pub const SWISS_BETA: &str = "v(5,5)";
pub const SWISS_DEADLOCK: &str = "v(2,2)";
pub const SWISS_UNREACHABLE: &str = "v(3,3)";

pub fn grid(width: usize, height: usize) -> GridModel {
    GridModel::new(width, height, vec![])
}

/// Two squares sharing a horizontal edge, composable by `+_1`.
pub fn stacked_squares() -> GridModel {
    grid(1, 2)
}

/// Two squares sharing a vertical edge, composable by `+_2`.
pub fn side_by_side_squares() -> GridModel {
    grid(2, 1)
}

/// Three squares `A` (bottom left), `B` (above `A`), `C` (right of `B`),
/// with the drawn edge names. `y` is the edge shared by `B` and `C`.
pub fn three_squares() -> CubicalSet {
    let mut k = CubicalSet::new();
    for v in ["p00", "p10", "p01", "p11", "p21", "p02", "p12", "p22"] {
        k.add(v, 0, &[]);
    }
    let edges = [
        ("u", "p00", "p10"),
        ("v", "p10", "p11"),
        ("v'", "p00", "p01"),
        ("u'", "p01", "p11"),
        ("x'", "p01", "p02"),
        ("u''", "p02", "p12"),
        ("y", "p11", "p12"),
        ("w", "p11", "p21"),
        ("x", "p21", "p22"),
        ("w'", "p12", "p22"),
    ];
    for (e, s, t) in edges {
        k.add(e, 1, &[("1-", s), ("1+", t)]);
    }
    k.add("A", 2, &[("1-", "u"), ("2+", "v"), ("2-", "v'"), ("1+", "u'")]);
    k.add("B", 2, &[("1-", "u'"), ("2+", "y"), ("2-", "x'"), ("1+", "u''")]);
    k.add("C", 2, &[("1-", "w"), ("2+", "x"), ("2-", "y"), ("1+", "w'")]);
    k
}

fn gen1(id: &str, src: &str, tgt: &str) -> Gen1 {
    Gen1 { id: id.into(), src: src.into(), tgt: tgt.into() }
}

fn gen2(id: &str, src: &[&str], tgt: &[&str]) -> Gen2 {
    Gen2 { id: id.into(), src: src.iter().map(|s| s.to_string()).collect(), tgt: tgt.iter().map(|s| s.to_string()).collect() }
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Two parallel 1-generators `A, B: x → y`.
pub fn g1() -> Polygraph2 {
    Polygraph2 { vertices: names(&["x", "y"]), gen1: vec![gen1("A", "x", "y"), gen1("B", "x", "y")], gen2: vec![] }
}

/// Two parallel 2-generators `A, B: u ⇒ v` between parallel edges `u ≠ v`.
pub fn g2() -> Polygraph2 {
    Polygraph2 {
        vertices: names(&["x", "y"]),
        gen1: vec![gen1("u", "x", "y"), gen1("v", "x", "y")],
        gen2: vec![gen2("A", &["u"], &["v"]), gen2("B", &["u"], &["v"])],
    }
}

/// `A: u ⇒ v` on `a → b` and `B: x ⇒ y` on `b → c`, 0-composable.
pub fn two_globes() -> Polygraph2 {
    Polygraph2 {
        vertices: names(&["a", "b", "c"]),
        gen1: vec![gen1("u", "a", "b"), gen1("v", "a", "b"), gen1("x", "b", "c"), gen1("y", "b", "c")],
        gen2: vec![gen2("A", &["u"], &["v"]), gen2("B", &["x"], &["y"])],
    }
}

/// `A: a ⇒ b` and `B: b ⇒ c` on three parallel edges `p → q`, 1-composable.
pub fn composable_squares() -> Polygraph2 {
    Polygraph2 {
        vertices: names(&["p", "q"]),
        gen1: vec![gen1("a", "p", "q"), gen1("b", "p", "q"), gen1("c", "p", "q")],
        gen2: vec![gen2("A", &["a"], &["b"]), gen2("B", &["b"], &["c"])],
    }
}

/// Two corner squares sharing the edges `u`, `v` out of `p`:
/// `A: u·x ⇒ v·y` and `B: u·z ⇒ v·t`.
pub fn coin2() -> Polygraph2 {
    Polygraph2 {
        vertices: names(&["p", "q", "r", "s", "s'"]),
        gen1: vec![
            gen1("u", "p", "q"),
            gen1("v", "p", "r"),
            gen1("x", "q", "s"),
            gen1("y", "r", "s"),
            gen1("z", "q", "s'"),
            gen1("t", "r", "s'"),
        ],
        gen2: vec![gen2("A", &["u", "x"], &["v", "y"]), gen2("B", &["u", "z"], &["v", "t"])],
    }
}

/// The cubical set of faces of `I^3` other than `000`, ids being face words.
pub fn i3_skeleton() -> CubicalSet {
    let mut k = CubicalSet::new();
    for d in 0..=2 {
        for w in enumerate_faces(3).into_iter().filter(|w| w.dim() == d) {
            let zeros: Vec<usize> = (0..3).filter(|&i| w.0[i] == Letter::Zero).collect();
            let mut faces = Vec::new();
            for (k, &pos) in zeros.iter().enumerate() {
                for (sign, l) in [("-", Letter::Minus), ("+", Letter::Plus)] {
                    let mut f = w.clone();
                    f.0[pos] = l;
                    faces.push((format!("{}{sign}", k + 1), f.to_string()));
                }
            }
            let faces: Vec<(&str, &str)> = faces.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            k.add(&w.to_string(), d, &faces);
        }
    }
    k
}

/// `R(w)` of [`i3_skeleton`] as a morphism.
pub fn i3_cell(cat: &FreeCategory, w: &FaceWord) -> Morphism {
    let id = w.to_string();
    match w.dim() {
        0 => Morphism::Vertex(cat.vertex(&id).unwrap()),
        1 => cat.path(&[&id]).unwrap(),
        _ => cat.named_generator(&id).unwrap(),
    }
}

pub fn category_of(model: &Model) -> Category {
    let poly = model.to_polygraph().expect("fixture models are valid");
    Category::full(Arc::new(FreeCategory::new(poly).expect("fixture polygraphs are valid")))
}

pub fn grid_category(g: &GridModel) -> Category {
    category_of(&Model::Grid(g.clone()))
}

pub fn cubical_category(k: &CubicalSet) -> Category {
    category_of(&Model::Cubical(k.clone()))
}

pub fn polygraph_category(p: Polygraph2) -> Category {
    category_of(&Model::Polygraph(p))
}

/// Every named fixture with its model.
pub fn all_models() -> Vec<(&'static str, Model)> {
    vec![
        ("single_square", Model::Grid(single_square())),
        ("stacked_squares", Model::Grid(stacked_squares())),
        ("side_by_side_squares", Model::Grid(side_by_side_squares())),
        ("grid_2x2", Model::Grid(grid(2, 2))),
        ("trou", Model::Grid(trou())),
        ("swiss_flag", Model::Grid(swiss_flag())),
        ("three_squares", Model::Cubical(three_squares())),
        ("i3_skeleton", Model::Cubical(i3_skeleton())),
        ("g1", Model::Polygraph(g1())),
        ("g2", Model::Polygraph(g2())),
        ("two_globes", Model::Polygraph(two_globes())),
        ("composable_squares", Model::Polygraph(composable_squares())),
        ("coin2", Model::Polygraph(coin2())),
    ]
}

/// Compiles a grid, for fixtures that need the polygraph directly.
pub fn grid_polygraph(g: &GridModel) -> Polygraph2 {
    compile_to_polygraph(&grid_complex(g).unwrap()).unwrap()
}
