//! Plain-text problem files.
//!
//! A polyhedral set `{x : Tx = r, lower ≤ x ≤ upper}` is written as
//!
//! ```text
//! q n
//! <q rows of T, n numbers each>
//! <r: q numbers>
//! <lower: n numbers>
//! <upper: n numbers>
//! ```
//!
//! Numbers are whitespace separated; `inf` and `-inf` are accepted. A network
//! file appends one more line holding the n link costs. Nash problems use
//! `key = value` lines with comma separated lists.

use std::fmt::Write as _;
use std::path::Path;

use visolve_core::operators::{NashProblem, NetworkProblem};
use visolve_core::{Matrix, PolyhedralSet};

use crate::error::{Error, Result};
use crate::format::config::key_values;

fn numbers(path: &Path, line: usize, text: &str, expected: usize) -> Result<Vec<f64>> {
    let vals: Vec<f64> = text
        .split_whitespace()
        .map(|tok| tok.parse::<f64>().map_err(|_| Error::parse(path, line, format!("`{tok}` is not a number"))))
        .collect::<Result<_>>()?;
    if vals.len() != expected {
        return Err(Error::parse(path, line, format!("expected {expected} numbers, found {}", vals.len())));
    }
    Ok(vals)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedronData {
    pub t: Matrix,
    pub r: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl PolyhedronData {
    pub fn into_set(self) -> Result<PolyhedralSet> {
        Ok(PolyhedralSet::new(self.t, self.r, self.lower, self.upper)?)
    }
}

/// Reads the polyhedron and returns it with the unread lines that follow.
fn parse_polyhedron_lines<'a>(path: &Path, text: &'a str) -> Result<(PolyhedronData, Vec<(usize, &'a str)>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut next = |what: &str| lines.next().ok_or_else(|| Error::parse(path, 0, format!("missing {what}")));

    let (ln, header) = next("header `q n`")?;
    let dims = numbers(path, ln, header, 2)?;
    let (q, n) = (dims[0] as usize, dims[1] as usize);
    if dims[0] != q as f64 || dims[1] != n as f64 || n == 0 {
        return Err(Error::parse(path, ln, "header must hold two non-negative integers with n > 0"));
    }
    let mut t = Vec::with_capacity(q * n);
    for i in 0..q {
        let (ln, row) = next(&format!("row {} of T", i + 1))?;
        t.extend(numbers(path, ln, row, n)?);
    }
    let r = if q > 0 {
        let (ln, line) = next("r")?;
        numbers(path, ln, line, q)?
    } else {
        Vec::new()
    };
    let (ln, line) = next("lower bounds")?;
    let lower = numbers(path, ln, line, n)?;
    let (ln, line) = next("upper bounds")?;
    let upper = numbers(path, ln, line, n)?;
    let rest = lines.collect();
    Ok((PolyhedronData { t: Matrix::from_row_major(q, n, t), r, lower, upper }, rest))
}

pub fn parse_polyhedron(path: &Path, text: &str) -> Result<PolyhedronData> {
    let (data, rest) = parse_polyhedron_lines(path, text)?;
    if let Some((ln, _)) = rest.first() {
        return Err(Error::parse(path, *ln, "unexpected trailing data"));
    }
    Ok(data)
}

pub fn parse_network(path: &Path, text: &str) -> Result<NetworkProblem> {
    let (data, rest) = parse_polyhedron_lines(path, text)?;
    let n = data.lower.len();
    let (ln, line) = match rest.as_slice() {
        [one] => *one,
        [] => return Err(Error::parse(path, 0, "missing cost line D")),
        [_, (ln, _), ..] => return Err(Error::parse(path, *ln, "unexpected trailing data")),
    };
    let cost = numbers(path, ln, line, n)?;
    if data.lower.iter().any(|&l| l != 0.0) {
        return Err(Error::parse(path, 0, "network flows need lower bounds of 0"));
    }
    Ok(NetworkProblem::new(cost, data.t, data.r, data.upper)?)
}

fn fmt_row(vals: impl IntoIterator<Item = f64>) -> String {
    vals.into_iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" ")
}

pub fn render_polyhedron(data: &PolyhedronData) -> String {
    let (q, n) = (data.t.rows(), data.t.cols());
    let mut out = format!("{q} {n}\n");
    for i in 0..q {
        let _ = writeln!(out, "{}", fmt_row(data.t.row(i).iter().copied()));
    }
    if q > 0 {
        let _ = writeln!(out, "{}", fmt_row(data.r.iter().copied()));
    }
    let _ = writeln!(out, "{}", fmt_row(data.lower.iter().copied()));
    let _ = writeln!(out, "{}", fmt_row(data.upper.iter().copied()));
    out
}

pub fn render_network(p: &NetworkProblem) -> String {
    let data = PolyhedronData {
        t: p.incidence().clone(),
        r: p.balances().to_vec(),
        lower: vec![0.0; p.cost().len()],
        upper: p.capacities().to_vec(),
    };
    let mut out = render_polyhedron(&data);
    let _ = writeln!(out, "{}", fmt_row(p.cost().iter().copied()));
    out
}

/// Keys: `e`, `o`, `r` (comma separated, one entry per firm),
/// `demand_scale`, `demand_exponent`.
pub fn parse_nash(path: &Path, text: &str) -> Result<NashProblem> {
    let list = |line: usize, v: &str| -> Result<Vec<f64>> {
        v.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| Error::parse(path, line, format!("`{}` is not a number", t.trim()))))
            .collect()
    };
    let (mut e, mut o, mut r, mut scale, mut exponent) = (None, None, None, None, None);
    for (line, key, v) in key_values(path, text)? {
        match key {
            "e" => e = Some(list(line, v)?),
            "o" => o = Some(list(line, v)?),
            "r" => r = Some(list(line, v)?),
            "demand_scale" => scale = Some(list(line, v)?.first().copied().unwrap_or(f64::NAN)),
            "demand_exponent" => exponent = Some(list(line, v)?.first().copied().unwrap_or(f64::NAN)),
            other => return Err(Error::parse(path, line, format!("unknown key `{other}`"))),
        }
    }
    let need = |name: &str| Error::parse(path, 0, format!("missing key `{name}`"));
    let e = e.ok_or_else(|| need("e"))?;
    let o = o.ok_or_else(|| need("o"))?;
    let r = r.ok_or_else(|| need("r"))?;
    let o = if o.len() == 1 { vec![o[0]; e.len()] } else { o };
    Ok(NashProblem::new(
        e,
        o,
        r,
        scale.ok_or_else(|| need("demand_scale"))?,
        exponent.ok_or_else(|| need("demand_exponent"))?,
    )?)
}

pub fn render_nash(p: &NashProblem) -> String {
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
    format!(
        "e = {}\no = {}\nr = {}\ndemand_scale = {:?}\ndemand_exponent = {:?}\n",
        join(p.e()),
        join(p.o()),
        join(p.r()),
        p.demand_scale(),
        p.demand_exponent()
    )
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}
