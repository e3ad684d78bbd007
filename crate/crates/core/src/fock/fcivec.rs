//! `FCIVEC v1` text format:
//!
//! ```text
//! FCIVEC 1 d=<d> n=<N> sz2=<2Sz|none>
//! <occupation bitstring, mode 0 leftmost> <re> <im>
//! ...
//! ```
//!
//! Amplitudes with modulus below `1e-14` are omitted.

use std::io::{BufRead, Write};

use num_complex::Complex;

use super::{enumerate_basis, CiVector, Determinant};
use crate::{Error, Result};

const DROP_BELOW: f64 = 1e-14;

pub fn write_fcivec<W: Write>(psi: &CiVector, mut w: W) -> Result<()> {
    let b = psi.basis();
    let sz = b.sz_twice().map_or("none".to_string(), |s| s.to_string());
    writeln!(w, "FCIVEC 1 d={} n={} sz2={}", b.d(), b.n_particles(), sz)?;
    for (det, a) in psi.iter() {
        if a.norm() < DROP_BELOW {
            continue;
        }
        writeln!(w, "{} {:.17e} {:.17e}", det.to_bitstring(b.d()), a.re, a.im)?;
    }
    Ok(())
}

pub fn read_fcivec<R: BufRead>(r: R) -> Result<CiVector> {
    let mut lines = r.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty FCIVEC input"))?;
    let header = header?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("FCIVEC") || fields.next() != Some("1") {
        return Err(Error::parse(1, "expected header `FCIVEC 1 ...`"));
    }
    let (mut d, mut n, mut sz) = (None, None, None);
    for f in fields {
        let (key, value) = f
            .split_once('=')
            .ok_or_else(|| Error::parse(1, format!("malformed header field {f:?}")))?;
        let bad = |_| Error::parse(1, format!("malformed value in {f:?}"));
        match key {
            "d" => d = Some(value.parse::<usize>().map_err(bad)?),
            "n" => n = Some(value.parse::<usize>().map_err(bad)?),
            "sz2" => {
                sz = Some(if value == "none" {
                    None
                } else {
                    Some(value.parse::<i32>().map_err(bad)?)
                })
            }
            _ => return Err(Error::parse(1, format!("unknown header field {key:?}"))),
        }
    }
    let (Some(d), Some(n), Some(sz)) = (d, n, sz) else {
        return Err(Error::parse(1, "header needs d=, n= and sz2="));
    };
    let basis = enumerate_basis(d, n, sz)?;
    let mut psi = CiVector::zeros(basis.clone());
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::parse(lineno, "expected `<bitstring> <re> <im>`"));
        }
        let (det, len) = Determinant::parse_bitstring(parts[0])
            .map_err(|e| Error::parse(lineno, e.to_string()))?;
        if len != d {
            return Err(Error::parse(lineno, format!("bitstring has {len} modes, expected {d}")));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::parse(lineno, format!("bad number {s:?}")))
        };
        let a = Complex::new(num(parts[1])?, num(parts[2])?);
        let i = basis
            .index_of(det)
            .ok_or_else(|| Error::parse(lineno, "determinant outside the declared sector"))?;
        psi.amplitudes_mut()[i] = a;
    }
    Ok(psi)
}
