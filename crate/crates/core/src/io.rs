//! Lattice files and coefficient tables.
//!
//! Tables are rows `{"gamma": "1/4,0", "n": "9/8", "c": "-73/2"}` in the
//! group's element order, then by `n`; TSV carries the same rows.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{fmt_rational, parse_rational, Rational};
use crate::error::{Error, Result};
use crate::lattice::{DiscriminantGroup, Lattice};
use crate::series::FourierExpansion;
use crate::spaces::PrincipalPart;

#[derive(Deserialize)]
struct LatticeFile {
    gram: Vec<Vec<serde_json::Value>>,
}

/// Parses `{"gram": [[...], ...]}`; every failure is an input error.
pub fn parse_lattice(text: &str) -> Result<Lattice> {
    let file: LatticeFile = serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed lattice JSON: {e}")))?;
    let mut gram = Vec::with_capacity(file.gram.len());
    for (i, row) in file.gram.iter().enumerate() {
        let mut r = Vec::with_capacity(row.len());
        for (j, v) in row.iter().enumerate() {
            r.push(v.as_i64().ok_or_else(|| Error::Input(format!("entry ({i},{j}) = {v} is not an integer")))?);
        }
        gram.push(r);
    }
    Lattice::new(gram).map_err(|e| match e {
        Error::Singular => Error::Input("singular Gram matrix".into()),
        other => other,
    })
}

pub fn read_lattice(path: &Path) -> Result<Lattice> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    parse_lattice(&text)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub gamma: String,
    pub n: String,
    pub c: String,
}

/// A Jacobi coefficient row, with the `ζ` exponent `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobiRow {
    pub gamma: String,
    pub n: String,
    pub r: String,
    pub c: String,
}

pub fn rows(f: &FourierExpansion) -> Vec<Row> {
    f.coeffs
        .iter()
        .map(|((g, n), c)| Row { gamma: f.group.element(*g).label(), n: fmt_rational(n), c: fmt_rational(c) })
        .collect()
}

/// One JSON object per line inside a single array.
pub fn to_json<T: Serialize>(rows: &[T]) -> String {
    let body: Vec<String> = rows.iter().map(|r| format!("  {}", serde_json::to_string(r).unwrap())).collect();
    if body.is_empty() {
        "[]\n".into()
    } else {
        format!("[\n{}\n]\n", body.join(",\n"))
    }
}

pub fn rows_to_tsv(rows: &[Row]) -> String {
    let mut s = String::from("gamma\tn\tc\n");
    for r in rows {
        s.push_str(&format!("{}\t{}\t{}\n", r.gamma, r.n, r.c));
    }
    s
}

pub fn jacobi_to_tsv(rows: &[JacobiRow]) -> String {
    let mut s = String::from("gamma\tn\tr\tc\n");
    for r in rows {
        s.push_str(&format!("{}\t{}\t{}\t{}\n", r.gamma, r.n, r.r, r.c));
    }
    s
}

pub fn rows_from_json(text: &str) -> Result<Vec<Row>> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed coefficient JSON: {e}")))
}

pub fn rows_from_tsv(text: &str) -> Result<Vec<Row>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some("gamma\tn\tc") {
        return Err(Error::Input("TSV header must be gamma, n, c".into()));
    }
    lines
        .enumerate()
        .map(|(i, l)| match l.split('\t').collect::<Vec<_>>()[..] {
            [g, n, c] => Ok(Row { gamma: g.into(), n: n.into(), c: c.into() }),
            _ => Err(Error::Input(format!("TSV line {} does not have three fields", i + 2))),
        })
        .collect()
}

fn element_index(group: &DiscriminantGroup, label: &str) -> Result<usize> {
    let coords: Vec<Rational> =
        if label.trim().is_empty() { vec![] } else { label.split(',').map(parse_rational).collect::<Result<_>>()? };
    group.index_of(&coords)
}

fn keyed(group: &DiscriminantGroup, rows: &[Row]) -> Result<BTreeMap<(usize, Rational), Rational>> {
    let mut out = BTreeMap::new();
    for r in rows {
        let key = (element_index(group, &r.gamma)?, parse_rational(&r.n)?);
        if out.insert(key, parse_rational(&r.c)?).is_some() {
            return Err(Error::Input(format!("duplicate row for ({}) at n = {}", r.gamma, r.n)));
        }
    }
    Ok(out)
}

/// Rebuilds an expansion from serialized rows.
pub fn expansion_from_rows(group: &Arc<DiscriminantGroup>, weight: Rational, prec: Rational, rows: &[Row]) -> Result<FourierExpansion> {
    let mut f = FourierExpansion::new(group.clone(), weight, prec);
    f.coeffs = keyed(group, rows)?;
    Ok(f)
}

/// Reads a principal part given as rows (JSON or TSV, detected by content).
pub fn parse_principal_part(group: &Arc<DiscriminantGroup>, weight: Rational, text: &str) -> Result<PrincipalPart> {
    let rows = if text.trim_start().starts_with('[') { rows_from_json(text)? } else { rows_from_tsv(text)? };
    PrincipalPart::new(group.clone(), weight, keyed(group, &rows)?)
}
