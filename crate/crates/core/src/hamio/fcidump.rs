//! Molpro-style FCIDUMP files.
//!
//! A `&FCI … &END` (or `/`) namelist with `NORB`, `NELEC` and optionally `MS2` is
//! followed by records `value i j k l` with one-based orbital indices:
//! `i j k l > 0` is `(ij|kl)`, `i j 0 0` a one-body element, `i 0 0 0` an orbital
//! energy (ignored) and `0 0 0 0` the core energy. `ORBSYM`, `ISYM` and other
//! namelist fields are accepted and ignored.

use std::collections::HashMap;
use std::io::Write;

use super::integrals::{eri_index, MolecularIntegrals};
use crate::{Error, Result};

const CONFLICT_TOL: f64 = 1e-12;

fn parse_real(token: &str, line: usize) -> Result<f64> {
    let normalized: String = token
        .chars()
        .map(|c| if c == 'D' || c == 'd' { 'E' } else { c })
        .collect();
    normalized
        .parse::<f64>()
        .map_err(|_| Error::parse(line, format!("bad number {token:?}")))
}

struct Namelist {
    fields: HashMap<String, Vec<String>>,
    /// Number of lines consumed, including the terminator.
    lines: usize,
}

fn read_namelist(text: &str) -> Result<Namelist> {
    let mut body = String::new();
    let mut started = false;
    let mut consumed = 0;
    let mut terminated = false;
    for (idx, raw) in text.lines().enumerate() {
        consumed = idx + 1;
        let mut line = raw.trim();
        if !started {
            if line.is_empty() {
                continue;
            }
            let upper = line.to_ascii_uppercase();
            if !upper.starts_with("&FCI") {
                return Err(Error::parse(consumed, "expected `&FCI` namelist header"));
            }
            started = true;
            line = &line[4..];
        }
        let upper = line.to_ascii_uppercase();
        if let Some(pos) = upper.find("&END") {
            body.push_str(&line[..pos]);
            terminated = true;
            break;
        }
        if let Some(pos) = line.find('/') {
            body.push_str(&line[..pos]);
            terminated = true;
            break;
        }
        body.push_str(line);
        body.push(' ');
    }
    if !terminated {
        return Err(Error::parse(consumed.max(1), "unterminated `&FCI` namelist"));
    }
    let spaced = body.replace(',', " ").replace('=', " = ");
    let tokens: Vec<&str> = spaced.split_whitespace().collect();
    let mut fields: HashMap<String, Vec<String>> = HashMap::new();
    let mut current: Option<String> = None;
    let mut i = 0;
    while i < tokens.len() {
        if tokens.get(i + 1) == Some(&"=") {
            let key = tokens[i].to_ascii_uppercase();
            fields.insert(key.clone(), Vec::new());
            current = Some(key);
            i += 2;
            continue;
        }
        match &current {
            Some(key) if tokens[i] != "=" => {
                fields.get_mut(key).expect("inserted").push(tokens[i].to_string())
            }
            _ => return Err(Error::parse(1, format!("stray namelist token {:?}", tokens[i]))),
        }
        i += 1;
    }
    Ok(Namelist {
        fields,
        lines: consumed,
    })
}

fn namelist_int(nl: &Namelist, key: &str) -> Result<Option<i64>> {
    match nl.fields.get(key) {
        None => Ok(None),
        Some(v) if v.len() == 1 => v[0]
            .parse::<i64>()
            .map(Some)
            .map_err(|_| Error::parse(1, format!("{key} must be an integer"))),
        Some(_) => Err(Error::parse(1, format!("{key} must have exactly one value"))),
    }
}

/// Parses FCIDUMP text into [`MolecularIntegrals`].
pub fn parse_fcidump(text: &str) -> Result<MolecularIntegrals> {
    let nl = read_namelist(text)?;
    let norb = namelist_int(&nl, "NORB")?
        .ok_or_else(|| Error::parse(1, "namelist lacks NORB"))?;
    let nelec = namelist_int(&nl, "NELEC")?
        .ok_or_else(|| Error::parse(1, "namelist lacks NELEC"))?;
    let ms2 = namelist_int(&nl, "MS2")?.unwrap_or(0);
    if norb <= 0 || nelec < 0 || nelec > 2 * norb {
        return Err(Error::parse(1, format!("invalid NORB = {norb}, NELEC = {nelec}")));
    }
    let n = norb as usize;
    let mut ints = MolecularIntegrals::zeros(n, nelec as usize, ms2 as i32)
        .map_err(|e| Error::parse(1, e.to_string()))?;

    let mut seen_eri: HashMap<usize, f64> = HashMap::new();
    let mut seen_h: HashMap<(usize, usize), f64> = HashMap::new();
    let mut seen_core: Option<f64> = None;
    let conflict = |a: f64, b: f64| (a - b).abs() > CONFLICT_TOL * a.abs().max(b.abs()).max(1.0);

    for (idx, raw) in text.lines().enumerate().skip(nl.lines) {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let parts: Vec<&str> = trimmed.split_whitespace().collect();
        if parts.len() != 5 {
            return Err(Error::parse(line, "expected `value i j k l`"));
        }
        let value = parse_real(parts[0], line)?;
        let mut ijkl = [0usize; 4];
        for (slot, tok) in ijkl.iter_mut().zip(&parts[1..]) {
            let v: usize = tok
                .parse()
                .map_err(|_| Error::parse(line, format!("bad orbital index {tok:?}")))?;
            if v > n {
                return Err(Error::parse(line, format!("orbital index {v} exceeds NORB = {n}")));
            }
            *slot = v;
        }
        match ijkl {
            [0, 0, 0, 0] => {
                if let Some(prev) = seen_core {
                    if conflict(prev, value) {
                        return Err(Error::parse(line, "conflicting core energy"));
                    }
                }
                seen_core = Some(value);
                ints.set_e_core(value);
            }
            [i, 0, 0, 0] if i > 0 => {}
            [i, j, 0, 0] if i > 0 && j > 0 => {
                let key = (i.max(j) - 1, i.min(j) - 1);
                if let Some(&prev) = seen_h.get(&key) {
                    if conflict(prev, value) {
                        return Err(Error::parse(line, format!("conflicting h({i},{j})")));
                    }
                }
                seen_h.insert(key, value);
                ints.set_h(i - 1, j - 1, value);
            }
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                let key = eri_index(i - 1, j - 1, k - 1, l - 1);
                if let Some(&prev) = seen_eri.get(&key) {
                    if conflict(prev, value) {
                        return Err(Error::parse(
                            line,
                            format!("conflicting ({i}{j}|{k}{l})"),
                        ));
                    }
                }
                seen_eri.insert(key, value);
                ints.set_eri(i - 1, j - 1, k - 1, l - 1, value);
            }
            _ => {
                return Err(Error::parse(
                    line,
                    format!("unsupported index pattern {:?}", ijkl),
                ))
            }
        }
    }
    Ok(ints)
}

/// Writes the canonical integral set; zero integrals are omitted.
pub fn write_fcidump<W: Write>(ints: &MolecularIntegrals, mut w: W) -> Result<()> {
    let n = ints.n_spatial();
    writeln!(w, " &FCI NORB={n},NELEC={},MS2={},", ints.n_elec(), ints.ms2())?;
    writeln!(w, "  ORBSYM={}", vec!["1"; n].join(","))?;
    writeln!(w, "  ISYM=1,")?;
    writeln!(w, " &END")?;
    for ((i, j, k, l), v) in ints.canonical_eri() {
        if v != 0.0 {
            writeln!(w, "{v:24.17e} {:4} {:4} {:4} {:4}", i + 1, j + 1, k + 1, l + 1)?;
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = ints.h(i, j);
            if v != 0.0 {
                writeln!(w, "{v:24.17e} {:4} {:4} {:4} {:4}", i + 1, j + 1, 0, 0)?;
            }
        }
    }
    writeln!(w, "{:24.17e} {:4} {:4} {:4} {:4}", ints.e_core(), 0, 0, 0, 0)?;
    Ok(())
}
