use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zsz_core::code::{fixtures, load_fixture, CheckType};
use zsz_core::group::{GroupElement, GroupSpec};
use zsz_core::routing::*;

fn left_perm(spec: &GroupSpec, g: GroupElement) -> Vec<usize> {
    spec.elements().map(|h| (g * h).index()).collect()
}

fn right_perm(spec: &GroupSpec, g: GroupElement) -> Vec<usize> {
    spec.elements().map(|h| (h * g).index()).collect()
}

fn ceil_log2(n: usize) -> usize {
    (usize::BITS - n.saturating_sub(1).leading_zeros()) as usize
}

/// Order of `q` modulo `ell`.
fn multiplicative_order(q: u64, ell: u64) -> u64 {
    let mut x = q % ell;
    let mut k = 1;
    while x != 1 {
        x = x * q % ell;
        k += 1;
    }
    k
}

/// Least-squares slope, intercept and R^2.
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx, sxy * sxy / (sxx * syy))
}

#[test]
fn figure_example_monomial_on_both_sides() {
    let spec = GroupSpec::new(7, 3, 2).unwrap();
    let g = spec.element(2, 1);
    let left = route_left_action(&spec, 2, 1).unwrap();
    assert_eq!(left.permutation().unwrap(), left_perm(&spec, g));
    // Columns go 0,1,2,3,4,5,6 -> 0,2,4,6,1,3,5 in two riffles, then
    // one vertical and one horizontal wrap-around shift.
    assert_eq!((left.len(), left.riffles), (10, 2));
    let right = route_right_action(&spec, 2, 1, RouteOptions::default()).unwrap();
    assert_eq!(right.permutation().unwrap(), right_perm(&spec, g));
    // Row shifts 2, 4, 1: three stages, one merge, one vertical shift.
    assert_eq!((right.len(), right.row_stages), (6, 3));
}

#[test]
fn every_fixture_monomial_matches_its_regular_permutation() {
    for f in fixtures() {
        let code = f.build().unwrap();
        let tb = code.two_block.as_ref().unwrap();
        let spec = tb.spec;
        for g in tb.a.monomials().iter().chain(tb.b.monomials()) {
            for h in [*g, g.inverse()] {
                let l = route_left_action(&spec, h.i(), h.j()).unwrap();
                assert_eq!(l.permutation().unwrap(), left_perm(&spec, h), "{} left {h}", f.name);
                let r = route_right_action(&spec, h.i(), h.j(), RouteOptions::default()).unwrap();
                assert_eq!(r.permutation().unwrap(), right_perm(&spec, h), "{} right {h}", f.name);
            }
        }
    }
}

#[test]
fn full_rounds_verify_on_every_fixture() {
    for f in fixtures() {
        let code = f.build().unwrap();
        for side in [CheckType::X, CheckType::Z] {
            let route = route_se_round(&code, side, RouteOptions::default()).unwrap();
            verify_se_round(&code, &route).unwrap_or_else(|e| panic!("{} {side:?}: {e}", f.name));
            let s = route.summary(true).unwrap();
            assert_eq!(s.cyclic_only, f.name.starts_with("BB"), "{} {side:?}", f.name);
            let spec = code.two_block.as_ref().unwrap().spec;
            assert!(s.scratch_rows <= spec.m() as usize / 2);
            assert!(s.scratch_cols <= spec.ell() as usize);
        }
    }
}

#[test]
fn x_round_ancillas_meet_their_checks() {
    let code = load_fixture("ZSZ144-3").unwrap();
    let route = route_se_round(&code, CheckType::X, RouteOptions::default()).unwrap();
    assert_eq!(route.steps.len(), 6);
    verify_se_round(&code, &route).unwrap();
    // Dropping a step breaks every check.
    let mut broken = route.clone();
    broken.steps.pop();
    assert_eq!(
        verify_se_round(&code, &broken),
        Err(RoutingError::Verification { check: 0 })
    );
}

#[test]
fn bb_rounds_are_pure_cyclic_shifts() {
    let code = load_fixture("BB144-2").unwrap();
    let route = route_se_round(&code, CheckType::X, RouteOptions::default()).unwrap();
    assert!(route.cyclic_only());
    assert!(route
        .steps
        .iter()
        .all(|s| s.forward.riffles == 0 && s.forward.len() <= 5));
}

#[test]
fn scratch_budgets_hold_for_every_element() {
    for (ell, m, q) in [(7, 3, 2), (12, 6, 5), (15, 4, 2)] {
        let spec = GroupSpec::new(ell, m, q).unwrap();
        for g in spec.elements() {
            let l = route_left_action(&spec, g.i(), g.j()).unwrap().summary().unwrap();
            assert!(
                l.scratch_cols <= ell as usize / 2 && l.scratch_rows <= m as usize / 2,
                "left {g}"
            );
            let r = route_right_action(&spec, g.i(), g.j(), RouteOptions::default())
                .unwrap()
                .summary()
                .unwrap();
            assert!(
                r.scratch_cols <= ell as usize && r.scratch_rows <= m as usize / 2,
                "right {g}"
            );
        }
    }
}

#[test]
fn every_transfer_preserves_order() {
    let code = load_fixture("ZSZ756").unwrap();
    for side in [CheckType::X, CheckType::Z] {
        let script = route_se_round(&code, side, RouteOptions::default()).unwrap().script();
        assert!(script.transfers.iter().all(GridTransfer::preserves_order));
    }
}

#[test]
fn left_action_cost_is_logarithmic_in_ell() {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (ell, m) in [(7, 3), (15, 4), (31, 5), (63, 6)] {
        let spec = GroupSpec::new(ell, m, 2).unwrap();
        let worst = spec
            .elements()
            .map(|g| route_left_action(&spec, g.i(), g.j()).unwrap().len())
            .max()
            .unwrap();
        // Three transfers per riffle plus two shifts of two transfers.
        assert!(worst <= 3 * ceil_log2(ell as usize) + 4, "ell {ell}: {worst}");
        xs.push((ell as f64).log2());
        ys.push(worst as f64);
    }
    let (slope, _, r2) = linear_fit(&xs, &ys);
    assert!(r2 >= 0.95 && slope > 0.0, "slope {slope} r2 {r2}");
}

#[test]
fn right_action_cost_is_linear_in_m() {
    let ell = 37u32;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for m in [3u32, 6, 9, 12] {
        let q = (2..ell)
            .find(|&q| multiplicative_order(q as u64, ell as u64) == m as u64)
            .unwrap();
        let spec = GroupSpec::new(ell, m, q).unwrap();
        let moves = route_right_action(&spec, 1, 0, RouteOptions::default()).unwrap().len();
        assert_eq!(moves, m as usize + 1, "m {m}");
        let selective = route_right_action(
            &spec,
            1,
            0,
            RouteOptions {
                selective_transfers: true,
            },
        )
        .unwrap();
        assert!(selective.len() <= ceil_log2(ell as usize) + 1);
        assert_eq!(selective.permutation().unwrap(), right_perm(&spec, spec.x()));
        xs.push(m as f64);
        ys.push(moves as f64);
    }
    let (slope, _, r2) = linear_fit(&xs, &ys);
    assert!(r2 >= 0.95 && slope > 0.5, "slope {slope} r2 {r2}");
}

#[test]
fn random_permutations_are_realized_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for t in 0..1000 {
        let n = 1 + t % 64;
        let mut sigma: Vec<usize> = (0..n).collect();
        sigma.shuffle(&mut rng);
        let s = permute_1d(&sigma).unwrap();
        assert!(s.riffles <= ceil_log2(n));
        assert_eq!(s.permutation().unwrap(), sigma);
        assert!(s.summary().unwrap().scratch_cols <= n / 2);
    }
}

#[test]
fn script_text_and_frames() {
    let spec = GroupSpec::new(7, 3, 2).unwrap();
    let s = route_left_action(&spec, 0, 1).unwrap();
    let text = s.to_text();
    assert_eq!(text.lines().count(), s.len());
    assert!(text.lines().all(|l| l.starts_with("move rows=")));
    let frames = s.frames().unwrap();
    assert_eq!(frames.len(), s.len() + 1);
    // Core of 3 rows plus 3 scratch rows, 14 columns each.
    assert_eq!(frames[0].lines().count(), 6);
    let json = serde_json::to_string(&s.summary().unwrap()).unwrap();
    assert!(json.contains("\"moves\""));
}

#[test]
fn non_group_codes_are_rejected() {
    let code = zsz_core::code::build_toric_4d(2).unwrap();
    assert_eq!(
        route_se_round(&code, CheckType::X, RouteOptions::default()).unwrap_err(),
        RoutingError::NotTwoBlock
    );
}

proptest! {
    #[test]
    fn riffles_match_array_manipulation(n in 2usize..40, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pos: Vec<usize> = (0..n).collect();
        pos.shuffle(&mut rng);
        let s = rand::Rng::random_range(&mut rng, 0..=n / 2);
        let mut selection = pos[..s].to_vec();
        selection.sort_unstable();
        pos.shuffle(&mut rng);
        let mut targets = pos[..s].to_vec();
        targets.sort_unstable();
        // Direct construction of the expected arrangement.
        let rest: Vec<usize> = (0..n).filter(|x| !selection.contains(x)).collect();
        let free: Vec<usize> = (0..n).filter(|x| !targets.contains(x)).collect();
        let mut expected = vec![0; n];
        for (a, t) in selection.iter().zip(&targets) {
            expected[*a] = *t;
        }
        for (a, t) in rest.iter().zip(&free) {
            expected[*a] = *t;
        }
        let script = riffle_shuffle(n, &selection, &targets).unwrap();
        prop_assert!(script.len() <= 3);
        prop_assert_eq!(script.permutation().unwrap(), expected);
    }
}
