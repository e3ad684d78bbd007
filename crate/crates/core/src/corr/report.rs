use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{ci_entropy, mutual_information, nonfreeness_from_occupations, orbital_reduced_state, OrbitalSubset};
use crate::corr::binary_entropy;
use crate::fock::CiVector;
use crate::rdm::{natural_orbitals, one_rdm};
use crate::{par, Error, Result};

/// All correlation measures of a pure state in one basis.
///
/// Pairwise quantities are indexed by orbital: spatial orbitals (mode pairs
/// `2k, 2k+1`) when the mode count is even, single modes otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub basis_label: String,
    pub n_modes: usize,
    pub n_particles: usize,
    pub nonfreeness_bits: f64,
    pub total_orbital_correlation_bits: f64,
    pub ci_entropy_bits: f64,
    /// Descending.
    pub natural_occupations: Vec<f64>,
    pub natural_orbitals_degenerate: bool,
    /// `S(ρ_i)` for each orbital.
    pub orbital_entropies_bits: Vec<f64>,
    pub mutual_information_bits: Vec<Vec<f64>>,
    pub mutual_information_ssr_bits: Vec<Vec<f64>>,
}

fn orbital_subsets(d: usize) -> Result<Vec<OrbitalSubset>> {
    if d % 2 == 0 {
        (0..d / 2).map(|k| OrbitalSubset::spatial(&[k], d)).collect()
    } else {
        (0..d).map(|m| OrbitalSubset::new(&[m], d)).collect()
    }
}

/// Collects every measure of `psi` in its current basis.
pub fn build_report(psi: &CiVector, basis_label: &str) -> Result<CorrelationReport> {
    let gamma = one_rdm(psi);
    let no = natural_orbitals(&gamma);
    let nonfreeness = nonfreeness_from_occupations(&no.occupations);
    let i_b: f64 = gamma.diagonal().into_iter().map(binary_entropy).sum();
    let orbitals = orbital_subsets(psi.d())?;
    let k = orbitals.len();
    let entropies = par::map_range(k, |i| orbital_reduced_state(psi, &orbitals[i]).and_then(|r| r.entropy()))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let values = par::map_range(pairs.len(), |p| {
        let (i, j) = pairs[p];
        Ok((
            mutual_information(psi, &orbitals[i], &orbitals[j], false)?,
            mutual_information(psi, &orbitals[i], &orbitals[j], true)?,
        ))
    })
    .into_iter()
    .collect::<Result<Vec<(f64, f64)>>>()?;
    let mut raw = vec![vec![0.0; k]; k];
    let mut ssr = vec![vec![0.0; k]; k];
    for (&(i, j), &(r, s)) in pairs.iter().zip(&values) {
        raw[i][j] = r;
        raw[j][i] = r;
        ssr[i][j] = s;
        ssr[j][i] = s;
    }
    let report = CorrelationReport {
        basis_label: basis_label.to_string(),
        n_modes: psi.d(),
        n_particles: psi.n_particles(),
        nonfreeness_bits: nonfreeness,
        total_orbital_correlation_bits: i_b,
        ci_entropy_bits: ci_entropy(psi),
        natural_occupations: no.occupations,
        natural_orbitals_degenerate: no.degenerate,
        orbital_entropies_bits: entropies,
        mutual_information_bits: raw,
        mutual_information_ssr_bits: ssr,
    };
    report.check()?;
    Ok(report)
}

impl CorrelationReport {
    fn check(&self) -> Result<()> {
        let scalars = [self.nonfreeness_bits, self.total_orbital_correlation_bits, self.ci_entropy_bits];
        let all = scalars
            .iter()
            .chain(&self.orbital_entropies_bits)
            .chain(self.mutual_information_bits.iter().flatten())
            .chain(self.mutual_information_ssr_bits.iter().flatten());
        if all.clone().any(|&x| x < -1e-9 || !x.is_finite()) {
            return Err(Error::Numerical("negative or non-finite entropy in report".into()));
        }
        if self.total_orbital_correlation_bits < self.nonfreeness_bits - 1e-9 {
            return Err(Error::Numerical(format!(
                "orbital correlation {} below nonfreeness {}",
                self.total_orbital_correlation_bits, self.nonfreeness_bits
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Numerical(e.to_string()))
    }

    /// Pairwise matrix flattened to `i,j,mutual_information_bits,mutual_information_ssr_bits`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "i,j,mutual_information_bits,mutual_information_ssr_bits")?;
        for (i, (row, row_p)) in self.mutual_information_bits.iter().zip(&self.mutual_information_ssr_bits).enumerate() {
            for (j, (r, p)) in row.iter().zip(row_p).enumerate() {
                writeln!(w, "{i},{j},{r:.12e},{p:.12e}")?;
            }
        }
        Ok(())
    }
}
