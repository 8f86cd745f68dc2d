//! Line-oriented text format for complexes.
//!
//! ```text
//! PCX v1 kind=path n=4 maxdim=1
//! dim 0 count 4
//! 0: 0
//! ...
//! dim 1 count 3
//! 4: 0 1
//! ...
//! boundaries
//! 0:
//! ...
//! 4: 0 1
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use super::{ComplexKind, HigherOrderComplex, Level, MemberId};
use crate::graph::Vertex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PcxError {
    #[error("unsupported format version {0:?} (expected v1)")]
    Version(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: boundary id {id} does not name a member (count {count})")]
    DanglingId { line: usize, id: u64, count: usize },
    #[error("line {line}: boundary id {id} is not one dimension below member {member}")]
    BoundaryDimension {
        line: usize,
        id: MemberId,
        member: MemberId,
    },
    #[error("line {line}: members of dimension {dim} are not in canonical order")]
    Order { line: usize, dim: usize },
    #[error("unexpected end of input")]
    Truncated,
}

pub fn serialize_complex(cx: &HigherOrderComplex) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "PCX v1 kind={} n={} maxdim={}",
        cx.kind(),
        cx.vertex_count(),
        cx.max_dim()
    );
    let write_ids = |out: &mut String, id: MemberId, list: &[u32]| {
        let _ = write!(out, "{id}:");
        for x in list {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    };
    for p in 0..=cx.max_dim() {
        let ids = cx.ids_of_dim(p);
        let _ = writeln!(out, "dim {p} count {}", ids.len());
        for id in ids {
            write_ids(&mut out, id, cx.carrier(id));
        }
    }
    out.push_str("boundaries\n");
    for id in 0..cx.len() as MemberId {
        write_ids(&mut out, id, cx.boundary(id));
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str, PcxError> {
        let (i, l) = self.inner.next().ok_or(PcxError::Truncated)?;
        self.line = i + 1;
        Ok(l.trim_end_matches('\r'))
    }

    fn syntax(&self, message: impl Into<String>) -> PcxError {
        PcxError::Syntax {
            line: self.line,
            message: message.into(),
        }
    }

    /// Parses `id: a b c`, checking the id.
    fn entry(&mut self, expected_id: usize) -> Result<Vec<u64>, PcxError> {
        let text = self.next()?;
        let (id, rest) = text
            .split_once(':')
            .ok_or_else(|| self.syntax(format!("expected `{expected_id}: ...`")))?;
        if id.trim().parse::<usize>().ok() != Some(expected_id) {
            return Err(self.syntax(format!("expected member id {expected_id}")));
        }
        rest.split_whitespace()
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|_| self.syntax(format!("bad integer {t:?}")))
            })
            .collect()
    }
}

fn header_field<'a>(token: Option<&'a str>, key: &str, lines: &Lines) -> Result<&'a str, PcxError> {
    token
        .and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| lines.syntax(format!("expected `{key}=...` in header")))
}

pub fn deserialize_complex(text: &str) -> Result<HigherOrderComplex, PcxError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    let header = lines.next()?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("PCX") {
        return Err(lines.syntax("missing `PCX` magic"));
    }
    match tokens.next() {
        Some("v1") => {}
        other => return Err(PcxError::Version(other.unwrap_or("").to_string())),
    }
    let kind: ComplexKind = header_field(tokens.next(), "kind", &lines)?
        .parse()
        .map_err(|e: String| lines.syntax(e))?;
    let n: usize = header_field(tokens.next(), "n", &lines)?
        .parse()
        .map_err(|_| lines.syntax("bad vertex count"))?;
    let max_dim: usize = header_field(tokens.next(), "maxdim", &lines)?
        .parse()
        .map_err(|_| lines.syntax("bad maxdim"))?;
    if tokens.next().is_some() {
        return Err(lines.syntax("trailing header tokens"));
    }

    let mut levels = Vec::with_capacity(max_dim + 1);
    let mut dim_start = vec![0usize];
    let mut total = 0usize;
    for p in 0..=max_dim {
        let text = lines.next()?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        let count = match fields.as_slice() {
            ["dim", d, "count", c] if d.parse::<usize>().ok() == Some(p) => c
                .parse::<usize>()
                .map_err(|_| lines.syntax("bad member count"))?,
            _ => return Err(lines.syntax(format!("expected `dim {p} count <m>`"))),
        };
        let mut level = Level::new();
        for i in 0..count {
            let verts = lines.entry(total + i)?;
            if verts.is_empty() || verts.iter().any(|&v| v as usize >= n) {
                return Err(lines.syntax(format!("carrier must list vertices below {n}")));
            }
            let verts: Vec<Vertex> = verts.into_iter().map(|v| v as Vertex).collect();
            if i > 0 && level.carrier(i - 1) >= verts.as_slice() {
                return Err(PcxError::Order {
                    line: lines.line,
                    dim: p,
                });
            }
            level.carriers.extend(verts);
            level.carrier_ptr.push(level.carriers.len());
        }
        total += count;
        dim_start.push(total);
        levels.push(level);
    }

    if lines.next()?.trim() != "boundaries" {
        return Err(lines.syntax("expected `boundaries`"));
    }
    for (p, level) in levels.iter_mut().enumerate() {
        for id in dim_start[p]..dim_start[p + 1] {
            let ids = lines.entry(id)?;
            for &b in &ids {
                if b as usize >= total {
                    return Err(PcxError::DanglingId {
                        line: lines.line,
                        id: b,
                        count: total,
                    });
                }
                let b = b as usize;
                if p == 0 || b < dim_start[p - 1] || b >= dim_start[p] {
                    return Err(PcxError::BoundaryDimension {
                        line: lines.line,
                        id: b as MemberId,
                        member: id as MemberId,
                    });
                }
            }
            let mut ids: Vec<MemberId> = ids.into_iter().map(|b| b as MemberId).collect();
            ids.sort_unstable();
            ids.dedup();
            level.boundary.extend(ids);
            level.boundary_ptr.push(level.boundary.len());
        }
    }
    for (_, rest) in lines.inner.by_ref() {
        if !rest.trim().is_empty() {
            return Err(lines.syntax("unexpected content after the boundary section"));
        }
    }
    Ok(HigherOrderComplex::assemble(kind, n, levels))
}
