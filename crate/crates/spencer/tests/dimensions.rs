//! Brute-force dimensions at fixed eigenvalues. Values marked "frozen" were
//! produced by an independent prime-field elimination script and pinned here.

use num_traits::Zero;
use sprayfin_spencer::ratmat::q;
use sprayfin_spencer::*;

fn frame(n: usize) -> Frame {
    Frame::new([q(3, 2), q(-5, 3), q(7, 4)][..n - 1].to_vec()).unwrap()
}

fn tableau(n: usize) -> SymbolTableau {
    SymbolTableau::new(frame(n))
}

#[test]
fn rank_sigma3_closed_form() {
    for (n, want) in [(2, 13), (3, 38), (4, 84)] {
        let tab = tableau(n);
        assert_eq!(tab.rank_sigma(3, DEFAULT_LIMIT).unwrap(), want, "n={n}");
        let dim_s3 = (2 * n) * (2 * n + 1) * (2 * n + 2) / 6;
        assert_eq!(tab.dim_g(3, DEFAULT_LIMIT).unwrap() + want, dim_s3);
    }
}

#[test]
fn dim_g3_general_formula() {
    assert_eq!(tableau(2).dim_g(3, DEFAULT_LIMIT).unwrap(), 4 + 1 + 2);
    assert_eq!(tableau(3).dim_g(3, DEFAULT_LIMIT).unwrap(), 10 + 4 + 4);
}

#[test]
fn dim_g_sequence_in_dimension_three() {
    // frozen
    let want = [11, 18, 26, 35, 45, 56];
    let tab = tableau(3);
    for (m, w) in (2..=7).zip(want) {
        assert_eq!(tab.dim_g(m, DEFAULT_LIMIT).unwrap(), w, "m={m}");
        assert_eq!(w, m * (m + 9) / 2);
    }
}

#[test]
fn symbol_kernel_vectors_satisfy_every_row() {
    let tab = SymbolTableau::completed(frame(3), vec![q(2, 1), q(-7, 3)]).unwrap();
    for m in 2..=4 {
        let (basis, _) = tab.g_basis(m, DEFAULT_LIMIT).unwrap();
        let (rows, _) = tab.rows(m);
        for v in &basis {
            assert!(rows.apply(v).is_empty());
        }
    }
}

#[test]
fn tau_kernel_is_image_of_sigma3() {
    for (n, want) in [(3, 38), (4, 84)] {
        let r = tau_nullity(&frame(n), DEFAULT_LIMIT).unwrap();
        assert_eq!(r.nullity_tau, want);
        assert_eq!(r.rank_sigma3, want);
        assert_eq!(r.composition_nonzero, 0);
    }
    assert!(matches!(tau_nullity(&frame(2), DEFAULT_LIMIT), Err(SpencerError::Invalid(_))));
}

#[test]
fn prolonged_sequence_is_exact() {
    // frozen
    let r = tau1_check(&frame(3), DEFAULT_LIMIT).unwrap();
    assert_eq!((r.domain_dim, r.sym4_dim, r.rank_sigma4, r.kernel_sigma4), (182, 126, 100, 26));
    assert_eq!((r.tau_h_extra, r.nullity_tau1), (1, 100));
    assert!(r.exact);
    assert_eq!(r.kernel_sigma4, tableau(3).dim_g(4, DEFAULT_LIMIT).unwrap());

    let r = tau1_check(&frame(4), DEFAULT_LIMIT).unwrap();
    assert_eq!((r.rank_sigma4, r.tau_h_extra, r.nullity_tau1), (271, 3, 271));
    assert_eq!(r.composition_nonzero, 0);
}

#[test]
fn spencer_cohomology_in_dimension_three() {
    let tab = tableau(3);
    let h = spencer_h(&tab, 2, DEFAULT_LIMIT).unwrap();
    assert_eq!((h.rank_delta1, h.kernel_delta2, h.dim_h), (82, 83, 1));
    for m in 3..=6 {
        let h = spencer_h(&tab, m, DEFAULT_LIMIT).unwrap();
        assert_eq!(h.rank_delta1, (5 * m * m + 53 * m + 38) / 2, "m={m}");
        assert_eq!(h.dim_h, 0, "m={m}");
        assert_eq!(h.complex_defects + h.image_defects, 0);
    }
}

#[test]
fn h22_grows_with_dimension() {
    for (n, want) in [(2, 0), (3, 1), (4, 3)] {
        let h = spencer_h(&tableau(n), 2, DEFAULT_LIMIT).unwrap();
        assert_eq!(h.dim_h, want, "n={n}");
        assert_eq!(want, (n - 1) * (n - 2) / 2);
    }
}

#[test]
fn cartan_test_on_both_tableaux() {
    let plain = tableau(3);
    let completed = SymbolTableau::completed(frame(3), vec![q(2, 1), q(-7, 3)]).unwrap();
    let adapted: Vec<usize> = (0..6).collect();

    let r = cartan_test(&completed, 3, &adapted, DEFAULT_LIMIT).unwrap();
    assert_eq!((r.dim_next, r.reduced.clone()), (20, vec![14, 5, 1, 0, 0, 0, 0]));
    assert!(r.passes);

    let r = cartan_test(&completed, 2, &adapted, DEFAULT_LIMIT).unwrap();
    assert_eq!((r.dim_next, r.reduced_sum), (14, 18));
    assert!(!r.passes);

    for k in [2, 3] {
        assert!(!cartan_test(&plain, k, &adapted, DEFAULT_LIMIT).unwrap().passes);
    }
    let reversed: Vec<usize> = (0..6).rev().collect();
    assert!(!cartan_test(&completed, 3, &reversed, DEFAULT_LIMIT).unwrap().passes);
    assert!(cartan_test(&plain, 3, &[0, 1, 2], DEFAULT_LIMIT).is_err());
}

#[test]
fn guardrail_refuses_large_matrices() {
    let err = tableau(3).dim_g(3, 50).unwrap_err();
    assert!(matches!(err, SpencerError::ResourceLimit { limit: 50, .. }));
    assert!(matches!(spencer_h(&tableau(3), 3, 100), Err(SpencerError::ResourceLimit { .. })));
}

#[test]
fn completion_weights_are_validated() {
    assert!(SymbolTableau::completed(frame(3), vec![q(1, 1)]).is_err());
    assert!(SymbolTableau::completed(frame(3), vec![q(1, 1), q(0, 1)]).is_err());
    let c = SymbolTableau::completed_random(frame(3), 4);
    assert!(c.completion.unwrap().iter().all(|w| !w.is_zero()));
}
