use zsz_core::code::{fixtures, load_fixture, CheckType};
use zsz_core::graph::{
    ball_growth, cayley_graph, diameter, girth, greedy_coloring, qubit_adjacency, ColoringStrategy, Side, SimpleGraph,
};
use zsz_core::GroupSpec;

#[test]
fn fixture_girths() {
    for f in fixtures() {
        let code = f.build().unwrap();
        let g = qubit_adjacency(&code, CheckType::X);
        let bound = if f.q == 1 { 3 } else { 4 };
        let found = girth(&g).expect("adjacency graphs have cycles");
        assert!(found <= bound, "{}: girth {found}", f.name);
        assert!(g.max_degree() <= 15);
    }
}

#[test]
fn adjacency_matches_support_overlap() {
    let code = load_fixture("ZSZ144-3").unwrap();
    let g = qubit_adjacency(&code, CheckType::X);
    let h = &code.h_x;
    for u in 0..code.n() {
        let mut expected = Vec::new();
        for v in 0..code.n() {
            if u != v && (0..h.rows()).any(|r| h.get(r, u) && h.get(r, v)) {
                expected.push(v);
            }
        }
        assert_eq!(g.neighbors(u), expected.as_slice());
    }
}

#[test]
fn left_cayley_graphs_are_regular() {
    let s = GroupSpec::new(7, 3, 2).unwrap();
    let g = cayley_graph(&s, &[s.x(), s.y()], Side::Left).unwrap();
    let hist = g.degree_histogram();
    assert_eq!(hist.iter().filter(|&&c| c > 0).count(), 1);
    assert_eq!(g.max_degree(), 4);
}

#[test]
fn diameter_bound_small_case() {
    let s = GroupSpec::new(7, 3, 2).unwrap();
    let g = cayley_graph(&s, &[s.x(), s.y()], Side::Left).unwrap();
    let d = diameter(&g);
    assert_eq!(d.len(), 1);
    // ((q + 1) / 2 + 2) m with q = 2, m = 3.
    assert!(d[0] as f64 <= 3.5 * 3.0, "diameter {}", d[0]);
}

#[test]
fn ball_growth_monotone_and_saturates() {
    let s = GroupSpec::new(15, 4, 2).unwrap();
    let g = cayley_graph(&s, &[s.x(), s.y()], Side::Left).unwrap();
    let b = ball_growth(&g, 0, 30).unwrap();
    assert_eq!(b[0], 1);
    assert!(b.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(*b.last().unwrap(), s.order());
}

#[test]
fn colorings_are_proper_and_bounded() {
    for f in fixtures().into_iter().filter(|f| f.q != 1) {
        let code = f.build().unwrap();
        let g = qubit_adjacency(&code, CheckType::Z);
        let mut counts = Vec::new();
        for strategy in [ColoringStrategy::Sequential, ColoringStrategy::IndependentSet] {
            let c = greedy_coloring(&g, strategy, 1);
            assert!(c.is_proper(&g));
            assert!(c.count <= g.max_degree() + 1);
            // Every check support is a 6-clique.
            assert!((6..=15).contains(&c.count), "{} {strategy:?}: {}", f.name, c.count);
            counts.push(c.count);
        }
        assert!(counts.iter().any(|c| (7..=10).contains(c)), "{}: {counts:?}", f.name);
    }
}

#[test]
fn coloring_csv() {
    let g = SimpleGraph::from_edges(2, [(0, 1)]);
    let c = greedy_coloring(&g, ColoringStrategy::Sequential, 0);
    assert_eq!(c.to_csv(), "vertex,color\n0,0\n1,1\n");
}
