use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use dihom::fixtures;
use dihom::free_cat::*;
use dihom::homology_engine::{solve_integer, Matrix};
use num_bigint::BigInt;
use proptest::prelude::*;

fn grid_cat(g: &dihom::cubical_sets::GridModel) -> Category {
    fixtures::grid_category(g)
}

fn v(cat: &FreeCategory, id: &str) -> usize {
    cat.vertex(id).unwrap()
}

#[test]
fn corner_to_corner_path_counts() {
    let c = grid_cat(&fixtures::single_square());
    let f = &c.free;
    assert_eq!(c.paths(Some(v(f, "v(0,0)")), Some(v(f, "v(1,1)"))).unwrap().len(), 2);
    let c = grid_cat(&fixtures::grid(3, 3));
    let f = &c.free;
    // Monotone lattice paths: C(6,3).
    assert_eq!(c.paths(Some(v(f, "v(0,0)")), Some(v(f, "v(3,3)"))).unwrap().len(), 20);
}

#[test]
fn total_path_counts() {
    assert_eq!(grid_cat(&fixtures::single_square()).paths(None, None).unwrap().len(), 6);
    assert_eq!(grid_cat(&fixtures::trou()).paths(None, None).unwrap().len(), 210);
    assert_eq!(grid_cat(&fixtures::swiss_flag()).paths(None, None).unwrap().len(), 1484);
    assert_eq!(grid_cat(&fixtures::trou()).bilocalize_states().paths(None, None).unwrap().len(), 20);
    assert_eq!(grid_cat(&fixtures::swiss_flag()).bilocalize_states().paths(None, None).unwrap().len(), 96);
}

#[test]
fn cycles_are_rejected() {
    let p = Polygraph2 {
        vertices: vec!["a".into(), "b".into()],
        gen1: vec![
            Gen1 { id: "f".into(), src: "a".into(), tgt: "b".into() },
            Gen1 { id: "g".into(), src: "b".into(), tgt: "a".into() },
        ],
        gen2: vec![],
    };
    let c = Category::from_polygraph(p).unwrap();
    match c.paths(None, None) {
        Err(FreeCatError::NotAcyclic(cycle)) => assert_eq!(cycle.len(), 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn malformed_polygraphs_are_rejected() {
    let mut p = fixtures::g2();
    p.gen2[0].tgt = vec![];
    assert!(matches!(FreeCategory::new(p), Err(FreeCatError::EmptyBoundary(_))));
    let mut p = fixtures::g2();
    p.gen1[1].tgt = "nowhere".into();
    assert!(matches!(FreeCategory::new(p), Err(FreeCatError::UnknownVertex(_))));
    let mut p = fixtures::two_globes();
    p.gen2[0].tgt = vec!["x".into()];
    assert!(matches!(FreeCategory::new(p), Err(FreeCatError::NotParallel(_))));
}

#[test]
fn states_by_degree() {
    let c = grid_cat(&fixtures::single_square());
    assert_eq!(c.free.initial_states(), vec![v(&c.free, "v(0,0)")]);
    assert_eq!(c.free.final_states(), vec![v(&c.free, "v(1,1)")]);

    let c = grid_cat(&fixtures::trou());
    assert_eq!(c.free.initial_states(), vec![v(&c.free, "v(0,0)")]);
    assert_eq!(c.free.final_states(), vec![v(&c.free, "v(3,3)")]);

    let c = grid_cat(&fixtures::swiss_flag());
    let f = &c.free;
    let set = |ids: &[&str]| ids.iter().map(|s| v(f, s)).collect::<BTreeSet<_>>();
    let initial: BTreeSet<_> = f.initial_states().into_iter().collect();
    let fin: BTreeSet<_> = f.final_states().into_iter().collect();
    assert_eq!(initial, set(&[fixtures::SWISS_ALPHA, fixtures::SWISS_UNREACHABLE]));
    assert_eq!(fin, set(&[fixtures::SWISS_BETA, fixtures::SWISS_DEADLOCK]));
}

#[test]
fn whiskered_generator_counts() {
    let trou = grid_cat(&fixtures::trou());
    assert_eq!(trou.whiskered_generators().unwrap().len(), 128);
    assert_eq!(trou.bilocalize_states().whiskered_generators().unwrap().len(), 26);
    let swiss = grid_cat(&fixtures::swiss_flag());
    assert_eq!(swiss.whiskered_generators().unwrap().len(), 1662);
    assert_eq!(swiss.bilocalize_states().whiskered_generators().unwrap().len(), 174);
}

#[test]
fn two_cell_counts() {
    let caps = Caps::default();
    let count = |c: &Category| {
        let e = c.two_cells(caps).unwrap();
        assert!(e.exhaustive);
        e.items.len()
    };
    let single = grid_cat(&fixtures::single_square());
    assert_eq!(count(&single), 1);
    assert_eq!(count(&single.bilocalize_states()), 1);
    let trou = grid_cat(&fixtures::trou());
    assert_eq!(count(&trou), 250);
    assert_eq!(count(&trou.bilocalize_states()), 72);
    let g22 = grid_cat(&fixtures::grid(2, 2));
    assert_eq!(count(&g22), 30);
    assert_eq!(count(&g22.bilocalize_states()), 14);
}

#[test]
fn g2_has_exactly_two_two_cells() {
    let c = fixtures::polygraph_category(fixtures::g2());
    let e = c.two_cells(Caps::default()).unwrap();
    assert!(e.exhaustive);
    let a = c.free.named_generator("A").unwrap();
    let b = c.free.named_generator("B").unwrap();
    let mut expected = vec![a, b];
    expected.sort();
    assert_eq!(e.items, expected);
}

#[test]
fn caps_truncate_with_flag() {
    let c = grid_cat(&fixtures::grid(3, 3));
    let e = c.two_cells(Caps { max_words: 10, max_len: 64 }).unwrap();
    assert!(!e.exhaustive);
    assert_eq!(e.items.len(), 10);
    let e = c.two_cells(Caps { max_words: 1_000_000, max_len: 2 }).unwrap();
    assert!(!e.exhaustive);
}

#[test]
fn every_trou_corner_two_cell_joins_gamma_classes() {
    let c = grid_cat(&fixtures::trou());
    let f = &c.free;
    let (a, b) = (v(f, "v(0,0)"), v(f, "v(3,3)"));
    let gammas: Vec<Morphism> = fixtures::TROU_GAMMAS.iter().map(|g| fixtures::trou_path(f, g)).collect();
    let classes: Vec<bool> = gammas
        .iter()
        .map(|g| c.morphism_homotopic(g, &gammas[0]).unwrap().homotopic)
        .collect();
    assert_eq!(classes, vec![true, true, true, false]);
    for cell in c.two_cells(Caps::default()).unwrap().items {
        if f.source(&cell, 0) != Morphism::Vertex(a) || f.target(&cell, 0) != Morphism::Vertex(b) {
            continue;
        }
        let (s, t) = (f.source(&cell, 1), f.target(&cell, 1));
        let in_class = |p: &Morphism| gammas.iter().any(|g| c.morphism_homotopic(p, g).unwrap().homotopic);
        assert!(in_class(&s) && in_class(&t));
        assert!(c.morphism_homotopic(&s, &t).unwrap().homotopic);
    }
}

#[test]
fn trou_homotopies() {
    let c = grid_cat(&fixtures::trou());
    let f = &c.free;
    let g: Vec<Morphism> = fixtures::TROU_GAMMAS.iter().map(|s| fixtures::trou_path(f, s)).collect();
    let h = c.morphism_homotopic(&g[0], &g[1]).unwrap();
    assert!(h.homotopic);
    // The witness z satisfies (s_1 − t_1) z = γ1 − γ2.
    let mut total: HashMap<Vec<usize>, BigInt> = HashMap::new();
    for (cell, k) in h.witness.unwrap() {
        for (side, sign) in [(f.source(&cell, 1), 1), (f.target(&cell, 1), -1)] {
            let Morphism::Path(p) = side else { panic!() };
            *total.entry(p).or_default() += k.clone() * sign;
        }
    }
    total.retain(|_, k| *k != BigInt::from(0));
    let path = |m: &Morphism| match m {
        Morphism::Path(p) => p.clone(),
        _ => panic!(),
    };
    let expected: HashMap<Vec<usize>, BigInt> =
        [(path(&g[0]), BigInt::from(1)), (path(&g[1]), BigInt::from(-1))].into_iter().collect();
    assert_eq!(total, expected);

    assert!(!c.morphism_homotopic(&g[0], &g[3]).unwrap().homotopic);
    assert!(c.morphism_homotopic(&g[2], &g[1]).unwrap().homotopic);
    let r = c.morphism_homotopic(&g[3], &g[3]).unwrap();
    assert!(r.homotopic);
    assert_eq!(r.witness, Some(vec![]));
}

#[test]
fn homotopy_is_an_equivalence_on_trou_paths() {
    let c = grid_cat(&fixtures::trou()).bilocalize_states();
    let paths: Vec<Morphism> = c.paths(None, None).unwrap().into_iter().map(Morphism::Path).collect();
    let n = paths.len();
    let rel: Vec<Vec<bool>> =
        paths.iter().map(|x| paths.iter().map(|y| c.morphism_homotopic(x, y).unwrap().homotopic).collect()).collect();
    for i in 0..n {
        assert!(rel[i][i]);
        for j in 0..n {
            assert_eq!(rel[i][j], rel[j][i]);
            for k in 0..n {
                if rel[i][j] && rel[j][k] {
                    assert!(rel[i][k]);
                }
            }
        }
    }
    // Two classes: above and below the hole.
    let classes: BTreeSet<Vec<bool>> = rel.into_iter().collect();
    assert_eq!(classes.len(), 2);
}

#[test]
fn dimension_mismatch_is_an_error() {
    let c = grid_cat(&fixtures::single_square());
    let e = c.free.path(&["ex(0,0)"]).unwrap();
    assert!(matches!(c.morphism_homotopic(&e, &Morphism::Vertex(0)), Err(FreeCatError::DimensionMismatch)));
}

#[test]
fn bilocalization_filters_by_endpoints() {
    let c = grid_cat(&fixtures::trou());
    let f = &c.free;
    let (a, b) = (v(f, "v(0,0)"), v(f, "v(3,3)"));
    let bl = c.bilocalize(&[a], &[b]);
    assert_eq!(bl.paths(None, None).unwrap(), c.paths(Some(a), Some(b)).unwrap());
    assert_eq!(bl.vertices(), vec![a, b]);
    for cell in bl.two_cells(Caps::default()).unwrap().items {
        assert_eq!(f.source(&cell, 0), Morphism::Vertex(a));
        assert_eq!(f.target(&cell, 0), Morphism::Vertex(b));
    }
    let empty = c.bilocalize(&[], &[b]);
    assert!(empty.paths(None, None).unwrap().is_empty());
    assert!(empty.two_cells(Caps::default()).unwrap().items.is_empty());
    assert!(empty.whiskered_generators().unwrap().is_empty());
}

#[test]
fn swiss_bilocalization_avoids_the_deadlock() {
    let c = grid_cat(&fixtures::swiss_flag());
    let f = &c.free;
    let bl = c.bilocalize(&[v(f, fixtures::SWISS_ALPHA)], &[v(f, fixtures::SWISS_BETA)]);
    let dead = v(f, fixtures::SWISS_DEADLOCK);
    let paths = bl.paths(None, None).unwrap();
    assert!(!paths.is_empty());
    for p in paths {
        assert!(p.iter().all(|&e| f.edge_src[e] != dead && f.edge_tgt[e] != dead));
    }
}

#[test]
fn zero_composable_globes_interchange() {
    let c = fixtures::polygraph_category(fixtures::two_globes());
    let f = &c.free;
    let g = |id: &str| f.named_generator(id).unwrap();
    let p = |id: &str| f.path(&[id]).unwrap();
    let c0 = |a: &Morphism, b: &Morphism| f.compose(a, b, 0).unwrap();
    let c1 = |a: &Morphism, b: &Morphism| f.compose(a, b, 1).unwrap();
    let lhs = c1(&c0(&g("A"), &p("x")), &c0(&p("v"), &g("B")));
    let rhs = c1(&c0(&p("u"), &g("B")), &c0(&g("A"), &p("y")));
    assert_eq!(lhs, rhs);
    assert_eq!(lhs, c0(&g("A"), &g("B")));
}

#[test]
fn three_squares_pasting() {
    let c = fixtures::cubical_category(&fixtures::three_squares());
    let f = &c.free;
    let g = |id: &str| f.named_generator(id).unwrap();
    let p = |ids: &[&str]| f.path(ids).unwrap();
    let c0 = |a: &Morphism, b: &Morphism| f.compose(a, b, 0).unwrap();
    let c1 = |a: &Morphism, b: &Morphism| f.compose(a, b, 1).unwrap();
    let composite = c1(
        &c0(&c0(&g("A"), &p(&["w"])), &p(&["x"])),
        &c0(&p(&["v'"]), &c1(&c0(&p(&["u'"]), &g("C")), &c0(&g("B"), &p(&["w'"])))),
    );
    let Morphism::Path(src) = p(&["u", "v", "w", "x"]) else { panic!() };
    let step = |off: usize, id: &str| Step { offset: off, gen: f.generator(id).unwrap() };
    let acb = f.two_cell(src.clone(), &[step(0, "A"), step(2, "C"), step(1, "B")]).unwrap();
    let cab = f.two_cell(src, &[step(2, "C"), step(0, "A"), step(1, "B")]).unwrap();
    assert_eq!(composite, acb);
    assert_eq!(composite, cab);
    assert_eq!(f.target(&composite, 1), p(&["v'", "x'", "u''", "w'"]));
}

#[test]
fn units() {
    let c = fixtures::cubical_category(&fixtures::three_squares());
    let f = &c.free;
    let a = f.named_generator("A").unwrap();
    assert_eq!(f.compose(&f.source(&a, 1), &a, 1).unwrap(), a);
    assert_eq!(f.compose(&a, &f.target(&a, 1), 1).unwrap(), a);
    assert_eq!(f.compose(&f.source(&a, 0), &a, 0).unwrap(), a);
    assert!(matches!(f.compose(&a, &a, 1), Err(FreeCatError::NotComposable(1))));
}

#[test]
fn invalid_steps_are_rejected() {
    let c = grid_cat(&fixtures::single_square());
    let f = &c.free;
    let Morphism::Path(src) = f.path(&["ey(0,0)", "ex(0,1)"]).unwrap() else { panic!() };
    assert!(f.two_cell(src, &[Step { offset: 0, gen: 0 }]).is_err());
}

/// Adjacent disjoint-interval swaps, written independently of the library.
fn oracle_swaps(f: &FreeCategory, source: &[usize], word: &[Step]) -> Vec<Vec<Step>> {
    let mut out = Vec::new();
    let mut len = source.len();
    let mut lens = vec![len];
    for s in word {
        len = len + f.gen_tgt[s.gen].len() - f.gen_src[s.gen].len();
        lens.push(len);
    }
    for k in 0..word.len().saturating_sub(1) {
        let (a, b) = (word[k], word[k + 1]);
        let (sa, ta) = (f.gen_src[a.gen].len(), f.gen_tgt[a.gen].len());
        let (sb, tb) = (f.gen_src[b.gen].len(), f.gen_tgt[b.gen].len());
        let swapped = if b.offset + sb <= a.offset {
            Some([b, Step { offset: a.offset + tb - sb, gen: a.gen }])
        } else if b.offset >= a.offset + ta {
            Some([Step { offset: b.offset + sa - ta, gen: b.gen }, a])
        } else {
            None
        };
        if let Some(pair) = swapped {
            let mut w = word.to_vec();
            w[k] = pair[0];
            w[k + 1] = pair[1];
            out.push(w);
        }
    }
    out
}

fn all_words(c: &Category, source: &[usize], max: usize) -> Vec<Vec<Step>> {
    let f = &c.free;
    let mut out = vec![];
    let mut stack = vec![(Vec::<Step>::new(), source.to_vec())];
    while let Some((w, cur)) = stack.pop() {
        if !w.is_empty() {
            out.push(w.clone());
        }
        if w.len() == max {
            continue;
        }
        for s in c.rewrite_sites(&cur) {
            let mut next = w.clone();
            next.push(s);
            let path = f.replay(source, &next).unwrap();
            stack.push((next, path));
        }
    }
    out
}

#[test]
fn normal_forms_match_swap_classes() {
    let fixtures_: Vec<Category> = vec![
        grid_cat(&fixtures::grid(2, 2)),
        grid_cat(&fixtures::grid(3, 2)),
        grid_cat(&fixtures::grid(3, 3)),
        grid_cat(&fixtures::trou()),
        fixtures::cubical_category(&fixtures::three_squares()),
        fixtures::polygraph_category(fixtures::two_globes()),
        fixtures::polygraph_category(fixtures::coin2()),
    ];
    let mut checked = 0;
    for c in &fixtures_ {
        let f = &c.free;
        let sources = c.paths(None, None).unwrap();
        for src in sources.iter().filter(|p| !c.rewrite_sites(p).is_empty()) {
            let words = all_words(c, src, 6);
            // Class ids by BFS closure under oracle swaps.
            let mut class: HashMap<Vec<Step>, usize> = HashMap::new();
            let mut next_id = 0;
            for w in &words {
                if class.contains_key(w) {
                    continue;
                }
                let mut queue = VecDeque::from([w.clone()]);
                class.insert(w.clone(), next_id);
                while let Some(u) = queue.pop_front() {
                    for s in oracle_swaps(f, src, &u) {
                        if !class.contains_key(&s) {
                            class.insert(s.clone(), next_id);
                            queue.push_back(s);
                        }
                    }
                }
                next_id += 1;
            }
            let mut by_nf: HashMap<Vec<Step>, usize> = HashMap::new();
            for w in &words {
                let nf = f.normalize(w);
                let id = class[w];
                assert_eq!(*by_nf.entry(nf.clone()).or_insert(id), id, "normal form shared across classes");
                assert_eq!(class[&nf], id, "normal form leaves its class");
                checked += 1;
            }
            assert_eq!(by_nf.len(), next_id, "one normal form per class");
        }
    }
    assert!(checked > 1000);
}

fn sample_cells() -> (Arc<FreeCategory>, Vec<Morphism>) {
    let c = grid_cat(&fixtures::grid(2, 2));
    let mut cells: Vec<Morphism> = c.vertices().into_iter().map(Morphism::Vertex).collect();
    cells.extend(c.paths(None, None).unwrap().into_iter().map(Morphism::Path));
    cells.extend(c.two_cells(Caps::default()).unwrap().items);
    (c.free.clone(), cells)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn globular_composition_laws(i in 0usize..1000, j in 0usize..1000, p in 0usize..2) {
        let (f, cells) = sample_cells();
        let a = &cells[i % cells.len()];
        let b = &cells[j % cells.len()];
        if let Ok(ab) = f.compose(a, b, p) {
            prop_assert_eq!(f.source(&ab, p), f.source(a, p));
            prop_assert_eq!(f.target(&ab, p), f.target(b, p));
            for m in 0..2 {
                if m < p {
                    prop_assert_eq!(f.source(&ab, m), f.source(a, m));
                    prop_assert_eq!(f.target(&ab, m), f.target(a, m));
                } else if m > p {
                    for side in [false, true] {
                        let da = f.boundary(a, m, side);
                        let db = f.boundary(b, m, side);
                        prop_assert_eq!(f.boundary(&ab, m, side), f.compose(&da, &db, p).unwrap());
                    }
                }
            }
            prop_assert_eq!(ab.dim(), a.dim().max(b.dim()));
        }
    }

    #[test]
    fn associativity(i in 0usize..1000, j in 0usize..1000, k in 0usize..1000, p in 0usize..2) {
        let (f, cells) = sample_cells();
        let (a, b, c) = (&cells[i % cells.len()], &cells[j % cells.len()], &cells[k % cells.len()]);
        if let (Ok(ab), Ok(bc)) = (f.compose(a, b, p), f.compose(b, c, p)) {
            prop_assert_eq!(f.compose(&ab, c, p).unwrap(), f.compose(a, &bc, p).unwrap());
        }
    }

    #[test]
    fn interchange(i in 0usize..1000, j in 0usize..1000, k in 0usize..1000, l in 0usize..1000) {
        let (f, cells) = sample_cells();
        let pick = |n: usize| &cells[n % cells.len()];
        let (a, b, c, d) = (pick(i), pick(j), pick(k), pick(l));
        if let (Ok(ab), Ok(cd), Ok(ac), Ok(bd)) =
            (f.compose(a, b, 1), f.compose(c, d, 1), f.compose(a, c, 0), f.compose(b, d, 0))
        {
            prop_assert_eq!(f.compose(&ab, &cd, 0).unwrap(), f.compose(&ac, &bd, 1).unwrap());
        }
    }
}

/// Columns `s_1 z − t_1 z` over the paths of the category.
fn boundary_columns(c: &Category, cells: &[Morphism]) -> (usize, Vec<Vec<BigInt>>) {
    let paths = c.paths(None, None).unwrap();
    let index: HashMap<Vec<usize>, usize> = paths.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let f = &c.free;
    let cols = cells
        .iter()
        .map(|z| {
            let mut col = vec![BigInt::from(0); paths.len()];
            let (Morphism::Path(s), Morphism::Path(t)) = (f.source(z, 1), f.target(z, 1)) else { panic!() };
            col[index[&s]] += 1;
            col[index[&t]] -= 1;
            col
        })
        .collect();
    (paths.len(), cols)
}

fn spans_contain(rows: usize, gens: &[Vec<BigInt>], targets: &[Vec<BigInt>]) -> bool {
    let m = Matrix::from_columns(rows, gens);
    targets.iter().all(|t| solve_integer(&m, t).is_some())
}

#[test]
fn whiskered_generators_span_the_degree_one_image() {
    let models = [fixtures::single_square(), fixtures::grid(2, 2), fixtures::trou(), fixtures::grid(3, 2)];
    for g in &models {
        for c in [grid_cat(g), grid_cat(g).bilocalize_states()] {
            let all = c.two_cells(Caps::default()).unwrap();
            assert!(all.exhaustive);
            let whiskered = c.whiskered_generators().unwrap();
            let (rows, a) = boundary_columns(&c, &all.items);
            let (_, w) = boundary_columns(&c, &whiskered);
            assert!(spans_contain(rows, &a, &w));
            assert!(spans_contain(rows, &w, &a));
        }
    }
}
