//! Tournament files.
//!
//! Two bodies share one header line, `tournament <format> <n>`:
//!
//! ```text
//! tournament matrix 3
//! 010
//! 001
//! 100
//! ```
//!
//! ```text
//! tournament backward 3
//! ordering 0 1 2
//! 2 0
//! ```
//!
//! In the matrix body row `u`, column `v` is `1` when `u -> v`. In the
//! backward body every line `j i` is an edge from `j` to `i` where `i`
//! precedes `j` in the ordering; all other pairs point forward. Vertices are
//! numbered from 0. Blank lines and text after `#` are ignored.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::tournament::{Tournament, VertexOrdering};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Matrix,
    Backward,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matrix" => Ok(Format::Matrix),
            "backward" => Ok(Format::Backward),
            _ => Err(Error::invalid(format!(
                "unknown format {s:?}; expected matrix or backward"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TournamentFile {
    pub format: Format,
    pub tournament: Tournament,
    /// Present for backward bodies.
    pub ordering: Option<VertexOrdering>,
}

impl TournamentFile {
    /// The file's ordering, or the identity.
    pub fn ordering_or_identity(&self) -> VertexOrdering {
        self.ordering
            .clone()
            .unwrap_or_else(|| VertexOrdering::identity(self.tournament.order()))
    }
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn number(line: usize, s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| err(line, format!("expected a vertex number, found {s:?}")))
}

pub fn parse(text: &str) -> Result<TournamentFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "tournament" {
        return Err(err(
            hl,
            "expected header `tournament <matrix|backward> <n>`",
        ));
    }
    let format: Format = fields[1]
        .parse()
        .map_err(|_| err(hl, format!("unknown format {:?}", fields[1])))?;
    let n = number(hl, fields[2])?;
    match format {
        Format::Matrix => {
            let mut rows = Vec::with_capacity(n);
            for (ln, l) in lines {
                if rows.len() == n {
                    return Err(err(ln, "more rows than vertices"));
                }
                if l.len() != n {
                    return Err(err(
                        ln,
                        format!("row has {} entries, expected {n}", l.len()),
                    ));
                }
                let row = l
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(err(ln, format!("unexpected character {c:?}"))),
                    })
                    .collect::<Result<Vec<bool>>>()?;
                rows.push((ln, row));
            }
            if rows.len() != n {
                return Err(err(hl, format!("expected {n} rows, found {}", rows.len())));
            }
            for (u, (ln, row)) in rows.iter().enumerate() {
                if row[u] {
                    return Err(err(*ln, "loop on the diagonal"));
                }
                for (v, (_, other)) in rows.iter().enumerate().skip(u + 1) {
                    if row[v] == other[u] {
                        return Err(err(
                            *ln,
                            format!("pair ({u}, {v}) needs exactly one direction"),
                        ));
                    }
                }
            }
            let matrix: Vec<Vec<bool>> = rows.into_iter().map(|(_, r)| r).collect();
            Ok(TournamentFile {
                format,
                tournament: Tournament::from_matrix(&matrix)?,
                ordering: None,
            })
        }
        Format::Backward => {
            let (ol, ordering_line) = lines
                .next()
                .ok_or_else(|| err(hl, "missing ordering line"))?;
            let mut words = ordering_line.split_whitespace();
            if words.next() != Some("ordering") {
                return Err(err(ol, "expected `ordering v1 ... vn`"));
            }
            let order = words.map(|w| number(ol, w)).collect::<Result<Vec<_>>>()?;
            if order.len() != n {
                return Err(err(
                    ol,
                    format!("ordering lists {} vertices, expected {n}", order.len()),
                ));
            }
            let theta = VertexOrdering::new(order).map_err(|e| err(ol, e.to_string()))?;
            let mut edges = Vec::new();
            for (ln, l) in lines {
                let parts: Vec<&str> = l.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(err(ln, "expected an edge `j i`"));
                }
                edges.push((number(ln, parts[0])?, number(ln, parts[1])?));
            }
            let t = Tournament::from_backward_edges(n, &theta, &edges)
                .map_err(|e| err(hl, e.to_string()))?;
            Ok(TournamentFile {
                format,
                tournament: t,
                ordering: Some(theta),
            })
        }
    }
}

pub fn read(path: &std::path::Path) -> Result<TournamentFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

/// Canonical text of a matrix body.
pub fn write_matrix(t: &Tournament) -> String {
    let n = t.order();
    let mut s = format!("tournament matrix {n}\n");
    for u in 0..n {
        for v in 0..n {
            s.push(if t.beats(u, v) { '1' } else { '0' });
        }
        s.push('\n');
    }
    s
}

/// Canonical text of a backward body: edges sorted by the position of their
/// tail, then of their head.
pub fn write_backward(t: &Tournament, theta: &VertexOrdering) -> String {
    let n = t.order();
    let mut s = format!("tournament backward {n}\nordering");
    for &v in theta.as_slice() {
        let _ = write!(s, " {v}");
    }
    s.push('\n');
    for pj in 0..n {
        for pi in 0..pj {
            let (j, i) = (theta.at(pj), theta.at(pi));
            if t.beats(j, i) {
                let _ = writeln!(s, "{j} {i}");
            }
        }
    }
    s
}

pub fn write(file: &TournamentFile) -> String {
    match file.format {
        Format::Matrix => write_matrix(&file.tournament),
        Format::Backward => write_backward(&file.tournament, &file.ordering_or_identity()),
    }
}
