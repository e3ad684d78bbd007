use fermicorr::eig::{davidson_lowest, dense_lowest, DavidsonOptions};
use fermicorr::fock::enumerate_basis;
use fermicorr::hamio::{build_hubbard, hamiltonian_action};

#[test]
fn hubbard_chain_six_sites_matches_dense() {
    let ints = build_hubbard(6, 1.0, 4.0, false).unwrap();
    let basis = enumerate_basis(12, 6, Some(0)).unwrap();
    assert_eq!(basis.len(), 400);
    let ham = hamiltonian_action(&ints, basis).unwrap();
    let dense = dense_lowest(&ham).unwrap();
    let dav = davidson_lowest(&ham, None, &DavidsonOptions::default()).unwrap();
    assert!((dense.energy - dav.energy).abs() < 1e-9);
    assert!(dav.residual_norm <= 1e-9);
    let overlap: f64 = dense
        .vector
        .iter()
        .zip(&dav.vector)
        .map(|(a, b)| a.conj() * b)
        .sum::<num_complex::Complex<f64>>()
        .norm();
    assert!((overlap - 1.0).abs() < 1e-9);
    // both use the same phase convention
    let diff: f64 = dense.vector.iter().zip(&dav.vector).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(diff < 1e-8);
    for e in &dav.ritz_history {
        assert!(*e >= dav.energy - 1e-12);
    }
}

#[test]
fn davidson_matches_dense_on_every_small_hubbard_sector() {
    let mut checked = 0;
    for l in 2..=4 {
        for u in [0.0, 1.0, 4.0, 8.0] {
            for periodic in [false, true] {
                let d = 2 * l;
                for n in 1..d {
                    for sz2 in (-(n as i32)..=n as i32).step_by(2) {
                        let Ok(basis) = enumerate_basis(d, n, Some(sz2)) else { continue };
                        let ints = build_hubbard(l, 1.0, u, periodic).unwrap().with_n_elec(n).unwrap();
                        let ham = hamiltonian_action(&ints, basis).unwrap();
                        let dense = dense_lowest(&ham).unwrap();
                        let dav = davidson_lowest(&ham, None, &DavidsonOptions::default()).unwrap();
                        assert!(
                            (dense.energy - dav.energy).abs() < 1e-9,
                            "L={l} U={u} pbc={periodic} N={n} sz2={sz2}: {} vs {}",
                            dense.energy,
                            dav.energy
                        );
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 100);
}
