//! Known-answer checks runnable from the installed binary.

use fermicorr::corr::{ci_entropy, mutual_information, nonfreeness, total_orbital_correlation, OrbitalSubset};
use fermicorr::eig::{davidson_lowest, dense_lowest, DavidsonOptions};
use fermicorr::fock::{enumerate_basis, CiVector, Determinant};
use fermicorr::hamio::{build_hubbard, hamiltonian_action};
use fermicorr::rdm::{free_state_two_rdm, one_rdm, two_rdm};
use fermicorr::rot::{haar_orthogonal, minimize_total_correlation, natural_form_state, rotate_state, MinimizeOptions};
use fermicorr::{Result, C64};

use crate::error::CliError;

fn dimer_energy(u: f64) -> Result<f64> {
    let ints = build_hubbard(2, 1.0, u, false)?;
    let basis = enumerate_basis(4, 2, Some(0))?;
    Ok(dense_lowest(&hamiltonian_action(&ints, basis)?)?.energy)
}

fn bonding_state() -> Result<CiVector> {
    let basis = enumerate_basis(4, 2, Some(0))?;
    let h = C64::new(0.5, 0.0);
    CiVector::from_terms(
        basis,
        [
            (Determinant::from_modes(&[0, 1]), h),
            (Determinant::from_modes(&[0, 3]), h),
            (Determinant::from_modes(&[1, 2]), -h),
            (Determinant::from_modes(&[2, 3]), h),
        ],
    )
}

fn checks() -> Vec<(&'static str, Result<f64>, f64, f64)> {
    let bonding = bonding_state().expect("valid fixed state");
    let pair = |ssr| {
        mutual_information(&bonding, &OrbitalSubset::spatial(&[0], 4)?, &OrbitalSubset::spatial(&[1], 4)?, ssr)
    };
    vec![
        ("Hubbard dimer U=0 energy", dimer_energy(0.0), -2.0, 1e-9),
        ("Hubbard dimer U=4 energy", dimer_energy(4.0), 2.0 - 8f64.sqrt(), 1e-9),
        (
            "Hubbard L=4 U=4 Davidson vs dense",
            (|| {
                let ints = build_hubbard(4, 1.0, 4.0, false)?;
                let ham = hamiltonian_action(&ints, enumerate_basis(8, 4, Some(0))?)?;
                Ok(davidson_lowest(&ham, None, &DavidsonOptions::default())?.energy - dense_lowest(&ham)?.energy)
            })(),
            0.0,
            1e-9,
        ),
        ("bonding state nonfreeness", Ok(nonfreeness(&bonding)), 0.0, 1e-9),
        (
            "bonding state atomic-basis I_B",
            Ok(total_orbital_correlation(&bonding)),
            4.0,
            1e-9,
        ),
        ("bonding state orbital mutual information", pair(false), 4.0, 1e-9),
        ("bonding state superselected mutual information", pair(true), 3.0, 1e-9),
        (
            "free-state 2RDM of a rotated determinant",
            (|| {
                let basis = enumerate_basis(6, 3, None)?;
                let det = CiVector::basis_state(basis, Determinant::from_modes(&[0, 2, 5]))?;
                let phi = rotate_state(&det, &haar_orthogonal(6, 7)?)?;
                free_state_two_rdm(&one_rdm(&phi)).distance(&two_rdm(&phi))
            })(),
            0.0,
            1e-10,
        ),
        (
            "minimized I_B equals nonfreeness",
            (|| {
                let psi = natural_form_state(&[0.8, 0.5, 0.3])?;
                let start = rotate_state(&psi, &haar_orthogonal(6, 3)?)?;
                Ok(minimize_total_correlation(&start, &MinimizeOptions::default())?.i_min - nonfreeness(&psi))
            })(),
            0.0,
            1e-7,
        ),
        (
            "two-electron minima: I_min = 4 H_min",
            (|| {
                let psi = natural_form_state(&[0.9, 0.4])?;
                Ok(nonfreeness(&psi) - 4.0 * ci_entropy(&psi))
            })(),
            0.0,
            1e-9,
        ),
    ]
}

pub fn run() -> Result<(), CliError> {
    let mut failed = 0;
    for (name, value, expected, tol) in checks() {
        match value {
            Ok(v) if (v - expected).abs() <= tol => println!("PASS {name}: {v:.12} (expected {expected:.12})"),
            Ok(v) => {
                failed += 1;
                println!("FAIL {name}: {v:.12} (expected {expected:.12} within {tol:e})");
            }
            Err(e) => {
                failed += 1;
                println!("FAIL {name}: {e}");
            }
        }
    }
    if failed > 0 {
        return Err(CliError::Numerical(format!("{failed} self-test checks failed")));
    }
    Ok(())
}
