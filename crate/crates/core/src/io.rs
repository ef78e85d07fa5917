//! Plain-text formats for fields, trajectories and basis dumps, and the norm-series CSV.
//!
//! Fields are written as a header followed by one line `k1 k2 k3 comp re im` per nonzero
//! coefficient at `k = 0` or a canonical `k` (first nonzero entry positive); the remaining
//! coefficients follow from conjugate symmetry. Components are numbered from 0. Floats are
//! written with 17 significant digits.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::eigenbasis::{BasisElement, BasisKind, DivFreeBasis};
use crate::error::{Result, TorusError};
use crate::estimates::lps_norm;
use crate::galerkin::{cumulative_trapezoid, FieldTrajectory};
use crate::spectral::{div, hs_norm, l2_norm_exact, lp_norm, VectorField, WaveVector};

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_coefficients(out: &mut impl Write, u: &VectorField) -> Result<()> {
    for (c, comp) in u.components().iter().enumerate() {
        for (k, v) in comp.modes() {
            if (k.is_zero() || k.is_canonical()) && (v.re != 0.0 || v.im != 0.0) {
                writeln!(out, "{} {} {} {c} {} {}", k.0[0], k.0[1], k.0[2], fmt(v.re), fmt(v.im))?;
            }
        }
    }
    Ok(())
}

pub fn write_field(out: &mut impl Write, u: &VectorField) -> Result<()> {
    writeln!(out, "TORUSFIELD 1 {} {} 3", fmt(u.ell()), u.cutoff())?;
    write_coefficients(out, u)
}

pub fn write_trajectory(out: &mut impl Write, traj: &FieldTrajectory) -> Result<()> {
    writeln!(out, "TRAJ 1 {} {} {}", fmt(traj.ell()), traj.cutoff(), traj.len())?;
    for (i, (t, u)) in traj.times.iter().zip(&traj.fields).enumerate() {
        writeln!(out, "TIME {}", fmt(*t))?;
        write_coefficients(out, u)?;
        if let Some(rhs) = &traj.rhs {
            writeln!(out, "RHS {}", fmt(*t))?;
            write_coefficients(out, &rhs[i])?;
        }
    }
    Ok(())
}

pub fn write_basis(out: &mut impl Write, basis: &DivFreeBasis) -> Result<()> {
    let count = basis.all_elements().count();
    writeln!(out, "BASIS 1 {} {} {count}", fmt(basis.ell), basis.cutoff)?;
    for e in basis.all_elements() {
        let kind = match e.kind {
            BasisKind::Constant => "CONST",
            BasisKind::Solenoidal => "DIVFREE",
            BasisKind::Gradient => "GRAD",
        };
        writeln!(out, "ENTRY {kind} {} {}", e.m, e.j)?;
        write_coefficients(out, &e.to_field(basis.ell, basis.cutoff))?;
    }
    Ok(())
}

struct Lines<R> {
    inner: R,
    number: usize,
    peeked: Option<String>,
}

impl<R: BufRead> Lines<R> {
    fn new(inner: R) -> Self {
        Lines { inner, number: 0, peeked: None }
    }

    fn error(&self, message: impl Into<String>) -> TorusError {
        TorusError::Parse { line: self.number, message: message.into() }
    }

    fn peek(&mut self) -> Result<Option<&str>> {
        if self.peeked.is_none() {
            loop {
                let mut s = String::new();
                if self.inner.read_line(&mut s)? == 0 {
                    return Ok(None);
                }
                self.number += 1;
                let trimmed = s.trim();
                if !trimmed.is_empty() && !trimmed.starts_with('#') {
                    self.peeked = Some(trimmed.to_string());
                    break;
                }
            }
        }
        Ok(self.peeked.as_deref())
    }

    fn next(&mut self) -> Result<Option<String>> {
        self.peek()?;
        Ok(self.peeked.take())
    }

    fn expect(&mut self, what: &str) -> Result<String> {
        self.next()?.ok_or_else(|| self.error(format!("unexpected end of input, expected {what}")))
    }
}

fn parse<T: std::str::FromStr>(lines: &Lines<impl BufRead>, tok: Option<&str>, what: &str) -> Result<T> {
    tok.and_then(|t| t.parse().ok()).ok_or_else(|| lines.error(format!("expected {what}")))
}

/// Header `<tag> 1 <ell> <cutoff> <n>`.
fn header(lines: &mut Lines<impl BufRead>, tag: &str) -> Result<(f64, u32, usize)> {
    let line = lines.expect(tag)?;
    let mut it = line.split_whitespace();
    if it.next() != Some(tag) {
        return Err(lines.error(format!("expected a `{tag}` header")));
    }
    let version: u32 = parse(lines, it.next(), "format version")?;
    if version != 1 {
        return Err(lines.error(format!("unsupported format version {version}")));
    }
    let ell: f64 = parse(lines, it.next(), "period")?;
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(lines.error(format!("period must be positive, got {ell}")));
    }
    let cutoff = parse(lines, it.next(), "cutoff")?;
    let n = parse(lines, it.next(), "count")?;
    Ok((ell, cutoff, n))
}

/// Coefficient lines up to the next keyword line or the end of input.
fn read_coefficients(lines: &mut Lines<impl BufRead>, ell: f64, cutoff: u32) -> Result<VectorField> {
    let mut u = VectorField::zeros(ell, cutoff);
    while let Some(line) = lines.peek()? {
        if line.starts_with(|c: char| c.is_ascii_alphabetic()) {
            break;
        }
        let line = lines.next()?.unwrap();
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() != 6 {
            return Err(lines.error("coefficient lines hold `k1 k2 k3 comp re im`"));
        }
        let k = WaveVector::new(
            parse(lines, Some(tok[0]), "integer k1")?,
            parse(lines, Some(tok[1]), "integer k2")?,
            parse(lines, Some(tok[2]), "integer k3")?,
        );
        let comp: usize = parse(lines, Some(tok[3]), "component index")?;
        if comp > 2 {
            return Err(lines.error(format!("component {comp} out of range 0..=2")));
        }
        let c = Complex64::new(parse(lines, Some(tok[4]), "real part")?, parse(lines, Some(tok[5]), "imaginary part")?);
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(lines.error("non-finite coefficient"));
        }
        if k.shell() > cutoff {
            return Err(lines.error(format!("mode {k} lies outside the cutoff {cutoff}")));
        }
        if k.is_zero() && c.im != 0.0 {
            return Err(lines.error("the mean coefficient must be real"));
        }
        let k_can = if k.is_zero() || k.is_canonical() { k } else { k.neg() };
        let c = if k_can == k { c } else { c.conj() };
        u.component_mut(comp).set_coeff(k_can, c)?;
    }
    Ok(u)
}

pub fn read_field(input: impl BufRead) -> Result<VectorField> {
    let mut lines = Lines::new(input);
    let (ell, cutoff, n) = header(&mut lines, "TORUSFIELD")?;
    if n != 3 {
        return Err(lines.error(format!("expected 3 components, got {n}")));
    }
    let u = read_coefficients(&mut lines, ell, cutoff)?;
    if let Some(extra) = lines.next()? {
        return Err(lines.error(format!("unexpected line `{extra}`")));
    }
    Ok(u)
}

fn keyword_time(lines: &Lines<impl BufRead>, line: &str, tag: &str) -> Result<f64> {
    let mut it = line.split_whitespace();
    if it.next() != Some(tag) {
        return Err(lines.error(format!("expected `{tag} <t>`")));
    }
    parse(lines, it.next(), "time")
}

pub fn read_trajectory(input: impl BufRead) -> Result<FieldTrajectory> {
    let mut lines = Lines::new(input);
    let (ell, cutoff, n) = header(&mut lines, "TRAJ")?;
    let mut times = Vec::with_capacity(n);
    let mut fields = Vec::with_capacity(n);
    let mut rhs = Vec::new();
    for _ in 0..n {
        let line = lines.expect("TIME")?;
        times.push(keyword_time(&lines, &line, "TIME")?);
        fields.push(read_coefficients(&mut lines, ell, cutoff)?);
        if lines.peek()?.is_some_and(|l| l.starts_with("RHS")) {
            let line = lines.next()?.unwrap();
            let t = keyword_time(&lines, &line, "RHS")?;
            if t != *times.last().unwrap() {
                return Err(lines.error("RHS time differs from the preceding TIME"));
            }
            rhs.push(read_coefficients(&mut lines, ell, cutoff)?);
        }
    }
    if let Some(extra) = lines.next()? {
        return Err(lines.error(format!("unexpected line `{extra}` after {n} samples")));
    }
    let traj = FieldTrajectory::new(times, fields)?;
    match rhs.len() {
        0 => Ok(traj),
        m if m == n => traj.with_rhs(rhs),
        _ => Err(lines.error("RHS blocks must be given for every sample or none")),
    }
}

/// One basis entry as read back from a dump.
#[derive(Clone, Debug)]
pub struct BasisRecord {
    pub kind: BasisKind,
    pub m: u32,
    pub j: usize,
    pub field: VectorField,
}

pub fn read_basis(input: impl BufRead) -> Result<Vec<BasisRecord>> {
    let mut lines = Lines::new(input);
    let (ell, cutoff, n) = header(&mut lines, "BASIS")?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let line = lines.expect("ENTRY")?;
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() != 4 || tok[0] != "ENTRY" {
            return Err(lines.error("expected `ENTRY <kind> <m> <j>`"));
        }
        let kind = match tok[1] {
            "CONST" => BasisKind::Constant,
            "DIVFREE" => BasisKind::Solenoidal,
            "GRAD" => BasisKind::Gradient,
            other => return Err(lines.error(format!("unknown entry kind `{other}`"))),
        };
        let m = parse(&lines, Some(tok[2]), "shell index")?;
        let j = parse(&lines, Some(tok[3]), "entry index")?;
        out.push(BasisRecord { kind, m, j, field: read_coefficients(&mut lines, ell, cutoff)? });
    }
    if let Some(extra) = lines.next()? {
        return Err(lines.error(format!("unexpected line `{extra}`")));
    }
    Ok(out)
}

/// Convenience for callers holding a single basis element.
pub fn element_field(e: &BasisElement, basis: &DivFreeBasis) -> VectorField {
    e.to_field(basis.ell, basis.cutoff)
}

/// One row of the norm series.
#[derive(Clone, Debug, PartialEq)]
pub struct NormRow {
    pub t: f64,
    pub l2: f64,
    pub h1: f64,
    pub h2: f64,
    pub linf: f64,
    pub div: f64,
    /// `(∫_0^t ‖u‖^s_{L^r})^{1/s}` for the monitored pair, if any.
    pub lps_partial: Option<f64>,
}

/// Norms of every sample; `lps` selects the pair `(s, r)` whose running integral is reported.
pub fn norm_series(traj: &FieldTrajectory, lps: Option<(f64, f64)>, n: usize) -> Result<Vec<NormRow>> {
    let partial = match lps {
        Some((s, r)) => {
            // validates the exponents
            lps_norm(&FieldTrajectory::new(vec![0.0], vec![traj.initial().clone()])?, s, r, n)?;
            let pw = traj.fields.iter().map(|u| Ok(lp_norm(u, r, n)?.powf(s))).collect::<Result<Vec<_>>>()?;
            Some(cumulative_trapezoid(&traj.times, &pw).into_iter().map(|x| x.powf(1.0 / s)).collect::<Vec<_>>())
        }
        None => None,
    };
    traj.times
        .iter()
        .zip(&traj.fields)
        .enumerate()
        .map(|(i, (&t, u))| {
            Ok(NormRow {
                t,
                l2: l2_norm_exact(u),
                h1: hs_norm(u, 1.0),
                h2: hs_norm(u, 2.0),
                linf: lp_norm(u, f64::INFINITY, n)?,
                div: l2_norm_exact(&div(u)),
                lps_partial: partial.as_ref().map(|p| p[i]),
            })
        })
        .collect()
}

pub const NORM_CSV_HEADER: &str = "t,l2,h1,h2,linf,div,lps_partial";

pub fn write_norm_csv(out: &mut impl Write, rows: &[NormRow]) -> Result<()> {
    writeln!(out, "{NORM_CSV_HEADER}")?;
    for r in rows {
        let lps = r.lps_partial.map(fmt).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{lps}",
            fmt(r.t),
            fmt(r.l2),
            fmt(r.h1),
            fmt(r.h2),
            fmt(r.linf),
            fmt(r.div)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenbasis::build_basis;
    use crate::sample::random_solenoidal;
    use rand::SeedableRng;

    #[test]
    fn field_round_trip_is_exact() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let u = random_solenoidal(&mut rng, 1.7, 6, 1.0);
        let mut buf = Vec::new();
        write_field(&mut buf, &u).unwrap();
        let v = read_field(buf.as_slice()).unwrap();
        assert_eq!((&u - &v).max_abs_coeff(), 0.0);
    }

    #[test]
    fn trajectory_round_trip() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(4);
        let a = random_solenoidal(&mut rng, 1.0, 3, 1.0);
        let b = random_solenoidal(&mut rng, 1.0, 3, 1.0);
        let traj = FieldTrajectory::new(vec![0.0, 0.25], vec![a.clone(), b.clone()])
            .unwrap()
            .with_rhs(vec![b, a])
            .unwrap();
        let mut buf = Vec::new();
        write_trajectory(&mut buf, &traj).unwrap();
        let back = read_trajectory(buf.as_slice()).unwrap();
        assert_eq!(back.times, traj.times);
        assert_eq!((&back.fields[1] - &traj.fields[1]).max_abs_coeff(), 0.0);
        assert_eq!((&back.rhs.unwrap()[0] - &traj.rhs.unwrap()[0]).max_abs_coeff(), 0.0);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "TORUSFIELD 1 1.0 2 3\n0 1 0 0 0.5 0.0\n0 1 0 7 0.5 0.0\n";
        match read_field(bad.as_bytes()) {
            Err(TorusError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(read_field("TORUSFIELD 1 1.0 1 3\n1 1 0 0 1 0\n".as_bytes()).is_err());
        assert!(read_field("TRAJ 1 1.0 1 3\n".as_bytes()).is_err());
        assert!(read_trajectory("TRAJ 1 1.0 1 2\nTIME 0\n".as_bytes()).is_err());
    }

    #[test]
    fn basis_dump_round_trip() {
        let basis = build_basis(1.0, 2);
        let mut buf = Vec::new();
        write_basis(&mut buf, &basis).unwrap();
        let recs = read_basis(buf.as_slice()).unwrap();
        assert_eq!(recs.len(), basis.all_elements().count());
        for (r, e) in recs.iter().zip(basis.all_elements()) {
            assert_eq!((r.m, r.j, r.kind), (e.m, e.j, e.kind));
            assert_eq!((&r.field - &element_field(e, &basis)).max_abs_coeff(), 0.0);
        }
    }
}
