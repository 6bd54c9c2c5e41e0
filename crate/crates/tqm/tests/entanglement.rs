use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tqm::diagram::{BraidWord, PlanarMatching};
use tqm::entangle::*;
use tqm::hilbert::*;
use tqm::NumericParams;

fn params() -> NumericParams {
    NumericParams::default()
}

fn catalan_f64(n: usize) -> f64 {
    // C_n = binom(2n, n) / (n + 1)
    (0..n).fold(1.0, |c, i| c * (2 * (2 * i + 1)) as f64 / (i + 2) as f64)
}

#[test]
fn bell_ladder_entropy_is_log2() {
    let rho = reduced_density(&ladder_state(4), &[0], &params()).unwrap();
    let s = von_neumann_entropy(&rho).unwrap();
    assert!((s - 2f64.ln()).abs() < 1e-9, "{s}");
}

#[test]
fn separable_entropy_is_zero() {
    let rho = reduced_density(&separable_caps_state(2), &[0], &params()).unwrap();
    assert!(von_neumann_entropy(&rho).unwrap().abs() < 1e-10);
}

#[test]
fn diagrammatic_partial_trace_matches_grid() {
    let p = params();
    let w = BraidWord::new(8, vec![3, -4, 5, 1]).unwrap();
    let s = ladder_state(4).apply_braid(&w, 0).unwrap();
    for keep in 0..2 {
        let a = reduced_density(&s, &[keep], &p).unwrap();
        let b = reduced_density_diagrammatic(&s, keep, &p).unwrap();
        let diff = (&a.matrix - &b.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-9, "party {keep}: {diff}");
    }
}

#[test]
fn lm_connectome_is_flat_on_catalan_subspace() {
    let p = params();
    let rho = reduced_density(&lm_connectome(2, 4).unwrap().state(), &[0], &p).unwrap();
    let ev = rho.eigenvalues();
    assert!((ev[0] - 0.5).abs() < 1e-9 && (ev[1] - 0.5).abs() < 1e-9, "{ev:?}");
    assert!(ev[2..].iter().all(|l| l.abs() < 1e-9));
    // A projector up to its trace.
    let sq = &rho.matrix * &rho.matrix * Complex64::new(2.0, 0.0);
    assert!((&sq - &rho.matrix).iter().all(|z| z.norm() < 1e-9));
}

#[test]
fn connectome_entropy_counts_lines() {
    let p = params();
    for (l, m) in [(0, 2), (2, 2), (0, 4), (2, 4), (0, 6)] {
        let c = lm_connectome(l, m).unwrap();
        let want = catalan_f64(m / 2).ln();
        let counted = connectome_entropy(&c, 0).unwrap();
        assert_eq!(counted.lines, m);
        assert!((counted.exact - want).abs() < 1e-12);
        let rho = reduced_density(&c.state(), &[0], &p).unwrap();
        let s = von_neumann_entropy(&rho).unwrap();
        assert!((s - want).abs() < 1e-8, "(l={l}, m={m}): {s} vs {want}");
    }
}

#[test]
fn qubit_ladders_have_ranks_one_and_two() {
    let p = params();
    assert_eq!(slocc_class(&separable_caps_state(2), &p).unwrap(), 1);
    assert_eq!(slocc_class(&ladder_state(4), &p).unwrap(), 2);
    let two = Connectome::new(&[4, 4], PlanarMatching::from_pairs(8, &[(0, 1), (2, 5), (3, 4), (6, 7)]).unwrap()).unwrap();
    assert_eq!(slocc_class(&two.state(), &p).unwrap(), 1);
}

fn qutrit_rank(pairs: &[(usize, usize)]) -> usize {
    let p = params();
    let s = CapBasisState::basis(PlanarMatching::from_pairs(16, pairs).unwrap())
        .with_parties(&[8, 8])
        .unwrap()
        .eval(&p);
    let q = qudit_basis(2, &p).unwrap().states;
    let grid = expand_in_bases(&s, &[q.clone(), q], &p).unwrap();
    schmidt_decompose(&grid, 1).unwrap().rank
}

#[test]
fn qutrit_ladder_ranks() {
    let full: Vec<_> = (0..8).map(|i| (i, 15 - i)).collect();
    let six = [(1, 2), (13, 14), (0, 15), (3, 12), (4, 11), (5, 10), (6, 9), (7, 8)];
    let four = [(1, 2), (3, 4), (0, 15), (5, 10), (6, 9), (7, 8), (11, 12), (13, 14)];
    assert_eq!(qutrit_rank(&full), 3);
    assert_eq!(qutrit_rank(&six), 2);
    assert_eq!(qutrit_rank(&four), 1);
}

#[test]
fn ghz_class_diagram_expansion() {
    let p = params();
    let g = tripartite_ghz_expand(&p).unwrap();
    let norm = g.get(&[0, 0, 0]);
    let want = 1.0 / (p.d * p.d - 1.0).sqrt();
    for l in g.labels() {
        let v = g.get(&l) / norm;
        let expect = match l.as_slice() {
            [0, 0, 0] => 1.0,
            [1, 1, 1] => want,
            _ => 0.0,
        };
        assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-9, "{l:?}: {v}");
    }
    let c = &tripartite_connectomes()[6];
    for party in 0..3 {
        let e = connectome_entropy(c, party).unwrap();
        assert_eq!(e.lines, 4);
        assert!((e.exact - 2f64.ln()).abs() < 1e-12);
    }
}

#[test]
fn inequalities_on_random_connectomes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for parties in [3, 4] {
        for _ in 0..1000 {
            let c = random_connectome(&mut rng, parties, 6);
            let report = check_inequalities(&c);
            assert!(report.all_hold(), "{c:?}: {:?}", report.checks);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn surgery_is_exact(seed in any::<u64>(), parties in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_connectome(&mut rng, parties, 5);
        let r = c.surgery_reduce();
        let scale = params().d.abs().powi(5);
        prop_assert!(surgery_residual(&c, &r, &params()) < 1e-9 * scale);
        prop_assert_eq!(check_inequalities(&r).all_hold(), true);
    }

    #[test]
    fn local_braids_keep_schmidt_spectrum(
        left in prop::collection::vec((1i32..4, any::<bool>()), 0..4),
        right in prop::collection::vec((5i32..8, any::<bool>()), 0..4),
        entangler in prop::collection::vec((1i32..8, any::<bool>()), 0..4),
    ) {
        let p = params();
        let letters = |v: &[(i32, bool)]| v.iter().map(|&(g, s)| if s { g } else { -g }).collect::<Vec<_>>();
        let base = ladder_state(4).apply_braid(&BraidWord::new(8, letters(&entangler)).unwrap(), 0).unwrap();
        let mut local = letters(&left);
        local.extend(letters(&right));
        let moved = base.apply_braid(&BraidWord::new(8, local).unwrap(), 0).unwrap();
        let sv = |s: &CapBasisState| {
            let g = expand_in_computational_basis(s, &p).unwrap();
            g.as_matrix(1).svd(false, false).singular_values.iter().copied().collect::<Vec<_>>()
        };
        let (a, b) = (sv(&base), sv(&moved));
        let mut a = a; let mut b = b;
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()), "{:?} vs {:?}", a, b);
        }
    }
}
