use num_complex::Complex64;
use proptest::prelude::*;
use tqm::diagram::{BraidWord, PlanarMatching};
use tqm::hilbert::*;
use tqm::rmatrix::FlatState;
use tqm::{LaurentPoly, NumericParams, RationalFunc};

fn params() -> NumericParams {
    NumericParams::default()
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

#[test]
fn chained_state_diagram_and_skein_agree() {
    let tl = chained_state();
    let skein = chained_state_from_tangle().unwrap();
    assert_eq!(tl, skein);
    assert_eq!(tl.terms().len(), 4);
}

#[test]
fn chained_state_printed_coefficients() {
    let exact = expand_qubits_exact(&chained_state()).unwrap();
    let a4 = LaurentPoly::monomial(4, 1);
    let c00 = (&a4 + &a4.mirror()).pow(2);
    let c11 = (&LaurentPoly::one() - &a4).pow(2);
    assert_eq!(exact[&vec![0, 0]], RationalFunc::from_poly(c00));
    assert!(exact[&vec![0, 1]].is_zero());
    assert!(exact[&vec![1, 0]].is_zero());
    // The |11> entry carries one factor of sqrt(d^2-1) per label, i.e. (d^2 - 1) in total.
    let d = LaurentPoly::d();
    let scaled = &c11 * &(&d.pow(2) - &LaurentPoly::one());
    assert_eq!(exact[&vec![1, 1]], RationalFunc::from_poly(scaled));
}

#[test]
fn separable_state_is_00() {
    let g = expand_in_computational_basis(&separable_caps_state(2), &params()).unwrap();
    assert!(g.get(&[0, 0]).norm() > 0.5);
    for l in [[0, 1], [1, 0], [1, 1]] {
        assert!(g.get(&l).norm() < 1e-9);
    }
}

#[test]
fn qutrit_basis_orthonormal() {
    let p = params();
    let q = qudit_basis(2, &p).unwrap();
    assert_eq!(q.states.len(), 3);
    for (i, a) in q.states.iter().enumerate() {
        for (j, b) in q.states.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!(close(overlap_numeric(a, b, &p), Complex64::new(want, 0.0), 1e-9));
        }
    }
}

#[test]
fn qubit_qudit_is_qubit_basis() {
    let p = params();
    let q = qudit_basis(1, &p).unwrap();
    let b = orthonormal_qubit_basis(&p).unwrap();
    for (x, y) in q.states.iter().zip(b.iter()) {
        assert!(close(overlap_numeric(x, y, &p), Complex64::new(1.0, 0.0), 1e-10));
    }
}

#[test]
fn gram_determinant() {
    let g = gram_matrix(4, &params()).unwrap();
    let det = &(g.gram.get(0, 0) * g.gram.get(1, 1)) - &(g.gram.get(0, 1) * g.gram.get(1, 0));
    let d = LaurentPoly::d();
    assert_eq!(det, &d.pow(2) * &(&d.pow(2) - &LaurentPoly::one()));
}

#[test]
fn dimension_is_catalan() {
    let p = params();
    for n in [2, 4, 6, 8, 10] {
        let g = gram_matrix(n, &p).unwrap();
        assert_eq!(g.numeric_rank, g.matchings.len());
    }
}

fn braid_on_ladder() -> impl Strategy<Value = BraidWord> {
    prop::collection::vec((1i32..8, any::<bool>()), 0..=6)
        .prop_map(|v| BraidWord::new(8, v.into_iter().map(|(g, s)| if s { g } else { -g }).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flat_and_diagram_paths_agree(w in braid_on_ladder()) {
        let p = params();
        let s = ladder_state(4).apply_braid(&w, 0).unwrap();
        let diagram = expand_in_computational_basis(&s, &p).unwrap();
        let flat: FlatState = flat_state(&ladder_state(4)).unwrap().apply_braid(&w).unwrap();
        let numeric = expand_flat(&flat, &[4, 4], &p).unwrap();
        for (a, b) in diagram.values.iter().zip(&numeric.values) {
            prop_assert!(close(*a, *b, 1e-9 * (1.0 + a.norm())), "{} vs {}", a, b);
        }
    }
}

#[test]
fn nested_matching_norm() {
    for n in [2, 4, 6, 8] {
        let m = CapBasisState::<RationalFunc>::basis(PlanarMatching::rainbow(n));
        let v = overlap_exact(&m, &m).unwrap();
        assert_eq!(v, RationalFunc::from_poly(LaurentPoly::d().pow(n as u32 / 2)));
    }
}
