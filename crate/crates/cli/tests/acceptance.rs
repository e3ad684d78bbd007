//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process exits
//! nonzero if any fails. Runs without the libtest harness so every line is shown.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fermicorr::corr::{
    correlation_function, mutual_information, nonfreeness, pure_bipartite_entanglement,
    reduced_state_ordered, total_orbital_correlation, OrbitalSubset,
};
use fermicorr::eig::{davidson_lowest, DavidsonOptions};
use fermicorr::fock::{enumerate_basis, CiVector, Determinant};
use fermicorr::hamio::{build_hubbard, hamiltonian_action, Hamiltonian};
use fermicorr::rdm::{free_state_two_rdm, one_rdm, two_rdm};
use fermicorr::rot::{
    haar_orthogonal, haar_unitary, minimize_total_correlation, minimize_total_correlation_from, natural_ci_entropy,
    natural_form_state, rotate_state, sample_bases, BasisRotation, MinimizeOptions, SampleMode, SamplingOptions,
};
use fermicorr::C64;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn lib<T>(r: fermicorr::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn h2(w: &[f64]) -> f64 {
    w.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

fn b2(x: f64) -> f64 {
    h2(&[x, 1.0 - x])
}

/// Real two-electron state with Gaussian-like amplitudes on all `d`-mode pairs.
fn random_real_pair_state(d: usize, seed: u64) -> CiVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = enumerate_basis(d, 2, None).unwrap();
    let amps: Vec<f64> = (0..basis.len()).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    CiVector::from_real(basis, &amps).unwrap().normalized().unwrap()
}

fn random_complex_state(d: usize, n: usize, seed: u64) -> CiVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = enumerate_basis(d, n, None).unwrap();
    let amps = (0..basis.len())
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    CiVector::new(basis, amps).unwrap().normalized().unwrap()
}

fn hubbard_ground_state(sites: usize, u: f64) -> Result<CiVector, String> {
    let ints = lib(build_hubbard(sites, 1.0, u, false))?;
    let basis = lib(enumerate_basis(2 * sites, ints.n_elec(), Some(ints.ms2())))?;
    let ham = lib(hamiltonian_action(&ints, basis.clone()))?;
    let res = lib(davidson_lowest(&ham, None, &DavidsonOptions::default()))?;
    lib(res.to_civector(basis))
}

fn sampling(n_samples: usize, seed: u64, mode: SampleMode, ci_entropy: bool) -> SamplingOptions {
    SamplingOptions {
        n_samples,
        seed,
        mode,
        restricted: false,
        ci_entropy,
    }
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut states: Vec<(String, CiVector)> = Vec::new();
    for s in 0..25 {
        states.push((format!("2e d=4 #{s}"), random_real_pair_state(4, 100 + s)));
        states.push((format!("2e d=6 #{s}"), random_real_pair_state(6, 200 + s)));
    }
    for sites in 2..=6 {
        for u in [0.0, 1.0, 4.0, 8.0] {
            states.push((format!("Hubbard L={sites} U={u}"), hubbard_ground_state(sites, u)?));
        }
    }
    ensure!(states.len() == 70, "expected 70 states");
    let opts = MinimizeOptions::default();
    let (mut worst_min, mut worst_random_start, mut samples, mut lowest_margin) = (0f64, 0f64, 0usize, f64::INFINITY);
    for (k, (name, psi)) in states.iter().enumerate() {
        let nf = nonfreeness(psi);
        let m = lib(minimize_total_correlation(psi, &opts))?;
        ensure!(m.converged, "{name}: minimizer did not converge");
        worst_min = worst_min.max((m.i_min - nf).abs());
        // Independent of the natural-basis initialization: start from a random basis.
        let start_basis = lib(haar_orthogonal(psi.d(), 7000 + k as u64))?;
        let r = lib(minimize_total_correlation_from(psi, &start_basis, &opts))?;
        worst_random_start = worst_random_start.max((r.i_min - nf).abs());
        for mode in [SampleMode::Global, SampleMode::NearIdentity { scale: 0.1 }] {
            let got = lib(sample_bases(psi, &sampling(10_000, k as u64, mode, false)))?;
            samples += got.len();
            for s in &got {
                lowest_margin = lowest_margin.min(s.i_b_bits - nf);
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(worst_min <= 1e-7, "|I_min - nonfreeness| reached {worst_min:.3e}");
    ensure!(
        worst_random_start <= 1e-7,
        "from random starts |I_min - nonfreeness| reached {worst_random_start:.3e}"
    );
    ensure!(lowest_margin >= -1e-9, "a sampled basis has I_B - nonfreeness = {lowest_margin:.3e}");
    ensure!(elapsed < Duration::from_secs(300), "took {elapsed:.1?}");
    Ok(format!(
        "70 states, max |I_min-N| {worst_min:.1e} (random start {worst_random_start:.1e}), \
         {samples} bases, min I_B-N {lowest_margin:.2e}, {elapsed:.1?}"
    ))
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0f64;
    for k in 0..20 {
        let w1: f64 = rng.random_range(0.02..0.98);
        let weights = [w1, 1.0 - w1];
        let p: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
        let natural = lib(natural_form_state(&p))?;
        // Store the state in a random basis so that neither minimum is read off directly.
        let psi = lib(rotate_state(&natural, &lib(haar_orthogonal(4, 900 + k))?))?;
        let min_i = lib(minimize_total_correlation(&psi, &MinimizeOptions::default()))?.i_min;
        let min_h = lib(natural_ci_entropy(&psi))?;
        let exact_h = h2(&weights);
        worst = worst.max((min_i - 4.0 * min_h).abs());
        ensure!((min_h - exact_h).abs() <= 1e-9, "set {k}: min H {min_h} vs H(|p|²) {exact_h}");
        ensure!((min_i - 4.0 * exact_h).abs() <= 1e-9, "set {k}: min I {min_i} vs 4 H(|p|²) {}", 4.0 * exact_h);
    }
    ensure!(worst <= 1e-9, "max |min I - 4 min H| = {worst:.3e}");
    Ok(format!("20 parameter sets, max |min I - 4 min H| {worst:.1e}"))
}

fn criterion_3() -> Check {
    let mut states: Vec<(String, CiVector, bool)> = Vec::new();
    for w in [[0.9, 0.1], [0.7, 0.3], [0.55, 0.45], [0.5, 0.5]] {
        let p: Vec<f64> = w.iter().map(|x: &f64| x.sqrt()).collect();
        states.push((format!("K=2 {w:?}"), lib(natural_form_state(&p))?, false));
    }
    for w in [[0.9, 0.08, 0.02], [0.6, 0.3, 0.1], [0.45, 0.35, 0.2], [1.0 / 3.0; 3]] {
        let p: Vec<f64> = w.iter().map(|x: &f64| x.sqrt()).collect();
        states.push((format!("K=3 {w:?}"), lib(natural_form_state(&p))?, true));
    }
    for s in 0..4 {
        states.push((format!("random d=4 #{s}"), random_complex_state(4, 2, 300 + s), false));
        states.push((format!("random d=6 #{s}"), random_complex_state(6, 2, 400 + s), true));
    }
    let (mut total, mut worst) = (0usize, f64::INFINITY);
    for (k, (name, psi, near_identity)) in states.iter().enumerate() {
        let h_nat = lib(natural_ci_entropy(psi))?;
        let mut modes = vec![SampleMode::Global];
        if *near_identity {
            modes.push(SampleMode::NearIdentity { scale: 0.1 });
        }
        for mode in modes {
            let got = lib(sample_bases(psi, &sampling(10_000, 30 + k as u64, mode, true)))?;
            for s in &got {
                let h = s.ci_entropy_bits.ok_or("missing CI entropy")?;
                worst = worst.min(h - h_nat);
                ensure!(h >= h_nat - 1e-12, "{name} sample {}: H {h} below natural {h_nat}", s.sample_id);
            }
            total += got.len();
        }
    }
    Ok(format!("{} states, {total} bases, min H_B - H_natural {worst:.2e}", states.len()))
}

fn bonding_state() -> CiVector {
    let basis = enumerate_basis(4, 2, Some(0)).unwrap();
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
    .unwrap()
}

fn criterion_4() -> Check {
    let psi = bonding_state();
    let a = lib(OrbitalSubset::spatial(&[0], 4))?;
    let b = lib(OrbitalSubset::spatial(&[1], 4))?;

    // Oracles straight from the four amplitudes. Every term has a distinct
    // configuration on orbital A and on orbital B, so the |c|² are the Schmidt weights.
    let terms: Vec<(u64, f64)> = psi.iter().map(|(det, c)| (det.bits(), c.norm_sqr())).filter(|t| t.1 > 0.0).collect();
    let mut a_cfg: Vec<u64> = terms.iter().map(|t| t.0 & 0b0011).collect();
    let mut b_cfg: Vec<u64> = terms.iter().map(|t| t.0 & 0b1100).collect();
    a_cfg.sort_unstable();
    a_cfg.dedup();
    b_cfg.sort_unstable();
    b_cfg.dedup();
    ensure!(a_cfg.len() == 4 && b_cfg.len() == 4, "oracle assumption broken");
    let schmidt: Vec<f64> = terms.iter().map(|t| t.1).collect();
    let e_oracle = h2(&schmidt);
    let occ = |m: u64| terms.iter().filter(|t| t.0 >> m & 1 == 1).map(|t| t.1).sum::<f64>();
    let ib_oracle: f64 = (0..4).map(|m| b2(occ(m))).sum();
    // Parity pinching keeps the even-A and odd-A halves as an incoherent mixture;
    // the pinched marginals keep the Schmidt weights.
    let even: f64 = terms.iter().filter(|t| (t.0 & 0b11).count_ones() % 2 == 0).map(|t| t.1).sum();
    let ssr_oracle = 2.0 * e_oracle - h2(&[even, 1.0 - even]);

    let e = lib(pure_bipartite_entanglement(&psi, &a))?;
    let ib = total_orbital_correlation(&psi);
    let nf = nonfreeness(&psi);
    let mi = lib(mutual_information(&psi, &a, &b, false))?;
    let mi_ssr = lib(mutual_information(&psi, &a, &b, true))?;
    // Free-state certificate: in the bonding/antibonding basis the state is one determinant.
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let u = DMatrix::from_row_slice(2, 2, &[s, s, s, -s]).map(|x| C64::new(x, 0.0));
    let rotated = lib(rotate_state(&psi, &lib(BasisRotation::restricted(&u))?))?;
    let max_weight = rotated.amplitudes().iter().map(|c| c.norm_sqr()).fold(0.0, f64::max);

    for (what, got, want) in [
        ("E", e, 2.0),
        ("E oracle", e_oracle, 2.0),
        ("I_B", ib, 4.0),
        ("I_B oracle", ib_oracle, 4.0),
        ("nonfreeness", nf, 0.0),
        ("determinant weight", max_weight, 1.0),
        ("I(A:B)", mi, 2.0 * e_oracle),
        ("I^P(A:B)", mi_ssr, 3.0),
        ("I^P oracle", ssr_oracle, 3.0),
    ] {
        ensure!((got - want).abs() <= 1e-9, "{what} = {got}, expected {want}");
    }
    Ok(format!("E {e:.9}, I_B {ib:.9}, N {nf:.1e}, I^P {mi_ssr:.9}"))
}

fn criterion_5() -> Check {
    let mut worst_wick = 0f64;
    for k in 0..50u64 {
        let (d, n) = [(4, 2), (6, 3), (8, 3), (8, 4), (10, 5)][k as usize % 5];
        let basis = lib(enumerate_basis(d, n, None))?;
        let modes: Vec<usize> = (0..n).map(|i| (2 * i + k as usize) % d).collect();
        let det = lib(CiVector::basis_state(basis, Determinant::from_modes(&modes)))?;
        let phi = lib(rotate_state(&det, &lib(haar_unitary(d, 5000 + k))?))?;
        worst_wick = worst_wick.max(lib(free_state_two_rdm(&one_rdm(&phi)).distance(&two_rdm(&phi)))?);
    }
    let mut worst_contraction = 0f64;
    for k in 0..50u64 {
        let (d, n) = [(4, 2), (6, 2), (6, 3), (8, 4), (8, 5)][k as usize % 5];
        let psi = random_complex_state(d, n, 6000 + k);
        let g = one_rdm(&psi);
        let dm = two_rdm(&psi);
        for i in 0..d {
            for j in 0..d {
                let sum: C64 = (0..d).map(|m| dm.get(i, m, j, m)).sum();
                worst_contraction = worst_contraction.max((sum - g.get(i, j) * (n as f64 - 1.0)).norm());
            }
        }
    }
    ensure!(worst_wick <= 1e-10, "Wick distance {worst_wick:.3e}");
    ensure!(worst_contraction <= 1e-9, "contraction residual {worst_contraction:.3e}");
    Ok(format!("Wick {worst_wick:.1e} over 50 determinants, contraction {worst_contraction:.1e} over 50 states"))
}

fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let m = DMatrix::from_fn(dim, dim, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0f64;
    for k in 0..1000u64 {
        let (d, n) = [(4, 2), (6, 2), (6, 3), (8, 3), (8, 4)][k as usize % 5];
        let psi = random_complex_state(d, n, 10_000 + k);
        let k_orb = d / 2;
        let orb_a = rng.random_range(0..k_orb);
        let mut orb_b = rng.random_range(0..k_orb - 1);
        if orb_b >= orb_a {
            orb_b += 1;
        }
        let modes = [2 * orb_a, 2 * orb_a + 1, 2 * orb_b, 2 * orb_b + 1];
        let rho = lib(reduced_state_ordered(&psi, &modes))?;
        let oa = random_hermitian(4, &mut rng);
        let ob = random_hermitian(4, &mut rng);
        let v = lib(correlation_function(&rho, 2, &oa, &ob))?;
        worst = worst.max(v.bound_ratio);
    }
    ensure!(worst <= 1.0 + 1e-9, "bound ratio {worst}");
    Ok(format!("1000 triples, max |C| / bound {worst:.4}"))
}

/// Lowest eigenvalue of the explicitly assembled matrix through nalgebra.
fn dense_oracle(ham: &Hamiltonian, dim: usize) -> Result<f64, String> {
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    let mut e = vec![C64::default(); dim];
    let mut col = vec![C64::default(); dim];
    for j in 0..dim {
        e[j] = C64::new(1.0, 0.0);
        ham.apply_into(&e, &mut col);
        e[j] = C64::default();
        for i in 0..dim {
            ensure!(col[i].im.abs() < 1e-14, "complex matrix element");
            m[(i, j)] = col[i].re;
        }
    }
    ensure!((&m - m.transpose()).amax() < 1e-12, "matrix is not symmetric");
    Ok(SymmetricEigen::new(m).eigenvalues.min())
}

fn criterion_7() -> Check {
    let dimer = |u: f64| -> Result<(f64, f64), String> {
        let ints = lib(build_hubbard(2, 1.0, u, false))?;
        let basis = lib(enumerate_basis(4, 2, Some(0)))?;
        let ham = lib(hamiltonian_action(&ints, basis))?;
        let dav = lib(davidson_lowest(&ham, None, &DavidsonOptions::default()))?.energy;
        Ok((dav, dense_oracle(&ham, 4)?))
    };
    let (e0, o0) = dimer(0.0)?;
    let (e4, o4) = dimer(4.0)?;
    let exact4 = 2.0 - 2.0 * 2f64.sqrt();
    for (got, want) in [(e0, -2.0), (o0, -2.0), (e4, exact4), (o4, exact4)] {
        ensure!((got - want).abs() <= 1e-9, "dimer energy {got}, expected {want}");
    }

    let (mut sectors, mut worst, mut largest) = (0usize, 0f64, 0usize);
    for sites in 2..=6usize {
        for u in [0.0, 1.0, 4.0, 8.0] {
            for periodic in [false, true] {
                if periodic && sites < 3 {
                    continue;
                }
                for n in 1..2 * sites {
                    let ints = lib(lib(build_hubbard(sites, 1.0, u, periodic))?.with_n_elec(n))?;
                    let lo = n.saturating_sub(sites);
                    let hi = n.min(sites);
                    for n_up in lo..=hi {
                        let sz2 = 2 * n_up as i32 - n as i32;
                        let basis = lib(enumerate_basis(2 * sites, n, Some(sz2)))?;
                        if basis.len() > 4096 {
                            continue;
                        }
                        let ints = ints.clone().with_ms2(sz2);
                        let ham = lib(hamiltonian_action(&ints, basis.clone()))?;
                        let dav = lib(davidson_lowest(&ham, None, &DavidsonOptions::default()))?.energy;
                        let oracle = dense_oracle(&ham, basis.len())?;
                        let diff = (dav - oracle).abs();
                        ensure!(
                            diff <= 1e-9,
                            "L={sites} U={u} pbc={periodic} N={n} 2Sz={sz2}: Davidson {dav} vs dense {oracle}"
                        );
                        worst = worst.max(diff);
                        largest = largest.max(basis.len());
                        sectors += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "dimer {e0:.12} / {e4:.12}; {sectors} Hubbard sectors up to dim {largest}, max |Davidson - dense| {worst:.1e}"
    ))
}

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_fermicorr")
}

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/h2")
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(binary()).args(args).output().map_err(|e| e.to_string())?;
    ensure!(
        out.status.success(),
        "fermicorr {args:?} exited with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(())
}

/// Ranks with ties sharing their average position.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        for &k in &idx[i..=j] {
            r[k] = (i + j) as f64 / 2.0;
        }
        i = j + 1;
    }
    r
}

fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn criterion_8(dir: &Path) -> Check {
    let start = Instant::now();
    let out = dir.join("dissociation.csv");
    let manifest = fixture_dir().join("MANIFEST");
    run_cli(&[
        "dissociation",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--no-timestamp",
    ])?;
    let elapsed = start.elapsed();
    let text = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    ensure!(
        lines.next() == Some("R,energy,nonfreeness_bits,ci_entropy_natural_bits"),
        "unexpected CSV header"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|f| f.parse::<f64>().map_err(|e| e.to_string())).collect())
        .collect::<Result<_, _>>()?;
    ensure!(rows.len() == 11, "expected 11 geometries, got {}", rows.len());
    ensure!(rows.first().unwrap()[0] == 0.5 && rows.last().unwrap()[0] == 3.0, "R range is not 0.5..3.0");
    for w in rows.windows(2) {
        ensure!(w[1][0] > w[0][0], "rows not sorted by R");
        ensure!(w[1][2] >= w[0][2], "nonfreeness decreases between R={} and R={}", w[0][0], w[1][0]);
        ensure!(w[1][3] >= w[0][3], "CI entropy decreases between R={} and R={}", w[0][0], w[1][0]);
    }
    let nf: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    let h: Vec<f64> = rows.iter().map(|r| r[3]).collect();
    let rho = spearman(&nf, &h);
    ensure!(rho == 1.0, "rank correlation {rho}");
    ensure!(elapsed < Duration::from_secs(120), "took {elapsed:.1?}");
    Ok(format!(
        "11 geometries, nonfreeness {:.4}..{:.4}, H {:.4}..{:.4}, Spearman {rho}, {elapsed:.1?}",
        nf[0], nf[10], h[0], h[10]
    ))
}

fn criterion_9(dir: &Path) -> Check {
    let mut summary = Vec::new();
    for (label, hubbard, n_samples) in [("dimer", "2,1,4", "10000"), ("L=4", "4,1,4", "2000")] {
        let state = dir.join(format!("{label}.fcivec"));
        run_cli(&["solve", "--hubbard", hubbard, "--out", state.to_str().unwrap(), "--no-timestamp"])?;
        let mut outputs = Vec::new();
        for (run, threads) in [("a", None), ("b", None), ("c", Some("1")), ("d", Some("3"))] {
            let csv = dir.join(format!("{label}_{run}.csv"));
            let svg = dir.join(format!("{label}_{run}.svg"));
            let mut args = vec![
                "sample-bases",
                "--state",
                state.to_str().unwrap(),
                "--seed",
                "42",
                "--n-samples",
                n_samples,
                "--no-timestamp",
                "--out",
                csv.to_str().unwrap(),
                "--svg",
                svg.to_str().unwrap(),
            ];
            if let Some(t) = threads {
                args.extend(["--threads", t]);
            }
            run_cli(&args)?;
            let read = |p: &Path| std::fs::read(p).map_err(|e| e.to_string());
            outputs.push((read(&csv)?, read(&svg)?));
        }
        // Output paths differ between runs and are echoed in the header; compare the rest.
        let strip = |bytes: &[u8]| -> String {
            String::from_utf8_lossy(bytes)
                .lines()
                .filter(|l| !l.contains("config: "))
                .collect::<Vec<_>>()
                .join("\n")
        };
        let reference = &outputs[0];
        for (i, o) in outputs.iter().enumerate().skip(1) {
            ensure!(strip(&o.0) == strip(&reference.0), "{label}: CSV of run {i} differs");
            ensure!(strip(&o.1) == strip(&reference.1), "{label}: SVG of run {i} differs");
        }
        let rows = String::from_utf8_lossy(&reference.0).lines().filter(|l| !l.starts_with('#')).count();
        ensure!(rows == n_samples.parse::<usize>().unwrap() + 3, "{label}: unexpected row count {rows}");
        summary.push(format!("{label} {n_samples} samples"));
    }
    // Same paths, same command: the whole file must repeat byte for byte.
    let state = dir.join("dimer.fcivec");
    let csv = dir.join("repeat.csv");
    let args = [
        "sample-bases",
        "--state",
        state.to_str().unwrap(),
        "--seed",
        "42",
        "--no-timestamp",
        "--out",
        csv.to_str().unwrap(),
    ];
    run_cli(&args)?;
    let first = std::fs::read(&csv).map_err(|e| e.to_string())?;
    run_cli(&args)?;
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "2"]);
    let second = std::fs::read(&csv).map_err(|e| e.to_string())?;
    run_cli(&threaded)?;
    let third = std::fs::read(&csv).map_err(|e| e.to_string())?;
    ensure!(first == second, "repeated run is not byte-identical");
    ensure!(first == third, "run with --threads 2 is not byte-identical");
    Ok(format!("{}; default 10^4 run byte-identical across repeats and thread counts", summary.join(", ")))
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let criteria: Vec<(&str, Box<dyn Fn() -> Check>)> = vec![
        ("minimized I_B equals nonfreeness, sampled I_B bounded by it", Box::new(criterion_1)),
        ("two-electron K=2: min I_B = 4 min H", Box::new(criterion_2)),
        ("natural-basis CI entropy below every sampled basis", Box::new(criterion_3)),
        ("bonding-state entanglement and correlation values", Box::new(criterion_4)),
        ("free-state 2RDM and contraction identity", Box::new(criterion_5)),
        ("correlation function bounded by mutual information", Box::new(criterion_6)),
        ("Hubbard dimer energies and Davidson against dense", Box::new(criterion_7)),
        ("H2 dissociation: monotone nonfreeness and CI entropy", Box::new(|| criterion_8(dir.path()))),
        ("sample-bases output is deterministic", Box::new(|| criterion_9(dir.path()))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({why})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
