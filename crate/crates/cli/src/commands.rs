use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use fermicorr::corr::{build_report, nonfreeness};
use fermicorr::eig::{davidson_lowest, DavidsonOptions, EigResult};
use fermicorr::fock::{enumerate_basis, read_fcivec, write_fcivec, CiVector};
use fermicorr::hamio::{build_hubbard, hamiltonian_action, parse_fcidump, MolecularIntegrals};
use fermicorr::rdm::write_occupations_csv;
use fermicorr::rot::{
    natural_basis_rotation, natural_ci_entropy, rotate_state, sample_bases as sample, SampleMode, SamplingOptions,
};

use crate::config::Provenance;
use crate::error::CliError;
use crate::svg::Scatter;
use crate::{DissociationArgs, Mode, ReportArgs, SampleArgs, SolveArgs};

pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_SCALE: f64 = 0.1;

fn required<'a, T>(v: &'a Option<T>, flag: &str) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| CliError::Input(format!("missing --{flag}")))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn read_state(path: &Path) -> Result<CiVector, CliError> {
    let f = File::open(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    read_fcivec(BufReader::new(f)).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// `dir/name.ext` → `dir/name<suffix>`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn parse_hubbard(chain: &str) -> Result<MolecularIntegrals, CliError> {
    let bad = || CliError::Input(format!("--hubbard expects L,t,U[,pbc], got {chain:?}"));
    let parts: Vec<&str> = chain.split(',').map(str::trim).collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(bad());
    }
    let sites: usize = parts[0].parse().map_err(|_| bad())?;
    let t: f64 = parts[1].parse().map_err(|_| bad())?;
    let u: f64 = parts[2].parse().map_err(|_| bad())?;
    let periodic = match parts.get(3).copied() {
        None | Some("obc") | Some("0") | Some("false") => false,
        Some("pbc") | Some("1") | Some("true") => true,
        Some(_) => return Err(bad()),
    };
    Ok(build_hubbard(sites, t, u, periodic)?)
}

fn load_hamiltonian(a: &SolveArgs) -> Result<MolecularIntegrals, CliError> {
    let ints = match (&a.fcidump, &a.hubbard) {
        (Some(path), None) => {
            parse_fcidump(&read_text(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        }
        (None, Some(chain)) => parse_hubbard(chain)?,
        (Some(_), Some(_)) => return Err(CliError::Input("give either --fcidump or --hubbard".into())),
        (None, None) => return Err(CliError::Input("missing --fcidump or --hubbard".into())),
    };
    let ints = match a.nelec {
        Some(n) => {
            let ms2 = a.sz2.unwrap_or((n % 2) as i32);
            ints.with_n_elec(n)?.with_ms2(ms2)
        }
        None => match a.sz2 {
            Some(s) => ints.with_ms2(s),
            None => ints,
        },
    };
    Ok(ints)
}

/// Lowest eigenpair in the sector of `ints`.
pub fn ground_state(ints: &MolecularIntegrals, tol: Option<f64>) -> Result<(CiVector, EigResult), CliError> {
    let basis = enumerate_basis(2 * ints.n_spatial(), ints.n_elec(), Some(ints.ms2()))?;
    if basis.is_empty() {
        return Err(CliError::Input("the requested (N, Sz) sector is empty".into()));
    }
    let ham = hamiltonian_action(ints, basis.clone())?;
    let mut opts = DavidsonOptions::default();
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(CliError::Input("--tol must be positive".into()));
        }
        opts.tol = t;
    }
    let res = davidson_lowest(&ham, None, &opts)?;
    let psi = res.to_civector(basis)?;
    Ok((psi, res))
}

pub fn solve(a: SolveArgs) -> Result<(), CliError> {
    let out = required(&a.out, "out")?.clone();
    let ints = load_hamiltonian(&a)?;
    let (psi, res) = ground_state(&ints, a.tol)?;

    let mut w = create(&out)?;
    write_fcivec(&psi, &mut w)?;
    w.flush()?;

    let prov = Provenance::new("solve", &a, !a.no_timestamp);
    let sidecar = json!({
        "provenance": prov.json(),
        "state_file": out.file_name().map(|s| s.to_string_lossy()),
        "n_spatial": ints.n_spatial(),
        "n_modes": psi.d(),
        "n_electrons": psi.n_particles(),
        "sz2": ints.ms2(),
        "dimension": psi.len(),
        "energy": res.energy,
        "residual_norm": res.residual_norm,
        "iterations": res.iterations,
        "gap": res.gap,
        "near_degenerate": res.near_degenerate,
    });
    let path = if out.extension().is_some_and(|e| e == "json") {
        sibling(&out, ".sidecar.json")
    } else {
        out.with_extension("json")
    };
    let mut w = create(&path)?;
    serde_json::to_writer_pretty(&mut w, &sidecar).map_err(|e| CliError::Input(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    println!("energy {:.12} (residual {:.2e}, dimension {})", res.energy, res.residual_norm, psi.len());
    if res.near_degenerate {
        eprintln!("warning: the lowest level is (nearly) degenerate; the stored state is one member of it");
    }
    Ok(())
}

pub fn report(a: ReportArgs) -> Result<(), CliError> {
    let state = required(&a.state, "state")?;
    let out = required(&a.out, "out")?.clone();
    let psi = read_state(state)?;

    let stored = build_report(&psi, "stored")?;
    let (rot, _) = natural_basis_rotation(&psi)?;
    let mut natural = build_report(&rotate_state(&psi, &rot)?, "natural")?;
    // Degenerate two-particle occupations leave the natural basis free to mix
    // pairs; the pair-resolved value is the minimum over that freedom.
    natural.ci_entropy_bits = natural_ci_entropy(&psi)?;

    let prov = Provenance::new("report", &a, !a.no_timestamp);
    let doc = json!({ "provenance": prov.json(), "stored": stored, "natural": natural });
    let mut w = create(&out)?;
    serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| CliError::Input(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;

    for r in [&stored, &natural] {
        let mut w = create(&sibling(&out, &format!(".{}.csv", r.basis_label)))?;
        w.write_all(prov.csv_header().as_bytes())?;
        r.write_csv(&mut w)?;
        w.flush()?;
    }
    let mut w = create(&sibling(&out, ".occupations.csv"))?;
    w.write_all(prov.csv_header().as_bytes())?;
    write_occupations_csv(&stored.natural_occupations, &mut w)?;
    w.flush()?;

    println!(
        "nonfreeness {:.9} bits, I_B stored {:.9} bits, CI entropy stored {:.9} / natural {:.9} bits",
        stored.nonfreeness_bits, stored.total_orbital_correlation_bits, stored.ci_entropy_bits, natural.ci_entropy_bits
    );
    Ok(())
}

/// `sample-bases` configuration with defaults filled in, as recorded in headers.
#[derive(Serialize)]
#[serde(rename_all = "kebab-case")]
struct SampleConfig<'a> {
    state: &'a Path,
    out: &'a Path,
    svg: Option<&'a Path>,
    n_samples: usize,
    seed: u64,
    mode: Mode,
    scale: Option<f64>,
    restricted: bool,
    no_timestamp: bool,
}

pub fn sample_bases(a: SampleArgs) -> Result<(), CliError> {
    let mode = a.mode.unwrap_or(Mode::Global);
    if mode == Mode::Global && a.scale.is_some() {
        return Err(CliError::Input("--scale only applies to --mode near-identity".into()));
    }
    let cfg = SampleConfig {
        state: required(&a.state, "state")?,
        out: required(&a.out, "out")?,
        svg: a.svg.as_deref(),
        n_samples: a.n_samples.unwrap_or(DEFAULT_SAMPLES),
        seed: a.seed.unwrap_or(0),
        mode,
        scale: (mode == Mode::NearIdentity).then(|| a.scale.unwrap_or(DEFAULT_SCALE)),
        restricted: a.restricted,
        no_timestamp: a.no_timestamp,
    };
    let psi = read_state(cfg.state)?;
    let opts = SamplingOptions {
        n_samples: cfg.n_samples,
        seed: cfg.seed,
        mode: match cfg.scale {
            Some(scale) => SampleMode::NearIdentity { scale },
            None => SampleMode::Global,
        },
        restricted: cfg.restricted,
        ci_entropy: true,
    };
    let samples = sample(&psi, &opts)?;
    let min_i = nonfreeness(&psi);
    let min_h = natural_ci_entropy(&psi)?;

    let prov = Provenance::new("sample-bases", &cfg, !cfg.no_timestamp);
    let mut w = create(cfg.out)?;
    w.write_all(prov.csv_header().as_bytes())?;
    writeln!(w, "sample_id,I_B_bits,ci_entropy_bits")?;
    for s in &samples {
        writeln!(w, "{},{:.15e},{:.15e}", s.sample_id, s.i_b_bits, s.ci_entropy_bits.unwrap_or(f64::NAN))?;
    }
    writeln!(w, "MIN_I,{min_i:.15e}")?;
    writeln!(w, "MIN_H,{min_h:.15e}")?;
    w.flush()?;

    if let Some(path) = cfg.svg {
        let points: Vec<(f64, f64)> = samples
            .iter()
            .map(|s| (s.i_b_bits, s.ci_entropy_bits.unwrap_or(f64::NAN)))
            .collect();
        let title = format!(
            "{} sampled bases, N = {}, {} modes",
            samples.len(),
            psi.n_particles(),
            psi.d()
        );
        let svg = Scatter {
            title: &title,
            x_label: "total orbital correlation I_B (bits)",
            y_label: "CI entropy H (bits)",
            points: &points,
            x_min: Some(min_i),
            y_min: Some(min_h),
            provenance: &prov.lines(),
        }
        .render();
        let mut w = create(path)?;
        w.write_all(svg.as_bytes())?;
        w.flush()?;
    }
    let violations = samples.iter().filter(|s| s.i_b_bits < min_i - 1e-9).count();
    println!("{} samples, MIN_I {min_i:.9}, MIN_H {min_h:.9}", samples.len());
    if violations > 0 {
        return Err(CliError::Numerical(format!("{violations} samples fell below the nonfreeness bound")));
    }
    Ok(())
}

/// Bond length from a file name containing `_R<value>`.
pub fn bond_length_from_name(path: &Path) -> Option<f64> {
    let name = path.file_name()?.to_str()?;
    let start = name.rfind("_R")? + 2;
    let rest = &name[start..];
    let end = rest
        .char_indices()
        .find(|&(i, c)| !(c.is_ascii_digit() || (c == '.' && rest[i + 1..].starts_with(|d: char| d.is_ascii_digit()))))
        .map_or(rest.len(), |(i, _)| i);
    rest[..end].parse().ok()
}

fn geometries(a: &DissociationArgs) -> Result<Vec<(PathBuf, f64)>, CliError> {
    match (&a.fcidump, &a.manifest) {
        (Some(pattern), None) => {
            let paths = glob::glob(pattern).map_err(|e| CliError::Input(format!("bad glob {pattern:?}: {e}")))?;
            let mut out = Vec::new();
            for p in paths {
                let p = p.map_err(|e| CliError::Input(e.to_string()))?;
                let r = bond_length_from_name(&p).ok_or_else(|| {
                    CliError::Input(format!("no `_R<value>` bond length in {}", p.display()))
                })?;
                out.push((p, r));
            }
            if out.is_empty() {
                return Err(CliError::Input(format!("no files match {pattern:?}")));
            }
            Ok(out)
        }
        (None, Some(manifest)) => {
            let dir = manifest.parent().unwrap_or(Path::new("."));
            let mut out = Vec::new();
            for (no, line) in read_text(manifest)?.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let mut f = line.split(',').map(str::trim);
                let (Some(file), Some(r)) = (f.next(), f.next()) else {
                    return Err(CliError::Input(format!("{}:{}: expected file,R", manifest.display(), no + 1)));
                };
                let r: f64 = r
                    .parse()
                    .map_err(|_| CliError::Input(format!("{}:{}: bad R {r:?}", manifest.display(), no + 1)))?;
                out.push((dir.join(file), r));
            }
            Ok(out)
        }
        (Some(_), Some(_)) => Err(CliError::Input("give either --fcidump or --manifest".into())),
        (None, None) => Err(CliError::Input("missing --fcidump glob or --manifest".into())),
    }
}

pub fn dissociation(a: DissociationArgs) -> Result<(), CliError> {
    let out = required(&a.out, "out")?.clone();
    let mut geoms = geometries(&a)?;
    geoms.sort_by(|x, y| x.1.total_cmp(&y.1));
    let mut rows = Vec::with_capacity(geoms.len());
    for (path, r) in &geoms {
        let ints =
            parse_fcidump(&read_text(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let (psi, res) = ground_state(&ints, a.tol)?;
        rows.push((*r, res.energy, nonfreeness(&psi), natural_ci_entropy(&psi)?));
    }
    let prov = Provenance::new("dissociation", &a, !a.no_timestamp);
    let mut w = create(&out)?;
    w.write_all(prov.csv_header().as_bytes())?;
    writeln!(w, "R,energy,nonfreeness_bits,ci_entropy_natural_bits")?;
    for (r, e, n, h) in &rows {
        writeln!(w, "{r},{e:.12},{n:.12e},{h:.12e}")?;
    }
    w.flush()?;
    println!("{} geometries written to {}", rows.len(), out.display());
    Ok(())
}
