//! Higher-order complexes lifted from simple graphs.
//!
//! Three liftings share one container: the path complex (simple paths up to a
//! length cap), the clique complex, and the ring complex (vertices, edges and
//! chordless cycles as 2-cells). Members carry global integer ids; ids are
//! grouped by dimension and, inside a dimension, ordered lexicographically by
//! carrier.

mod chain;
mod family;
mod lift;
mod pcx;

use std::cmp::Ordering;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Vertex;

pub use chain::{is_allowed, is_boundary_invariant, signed_boundary, ChainError, SignedChain};
pub use family::{cyclic_families, cyclic_families_of_ring, CyclicFamily};
pub use lift::{lift, lift_clique_complex, lift_path_complex, lift_ring_complex, LiftSpec};
pub use pcx::{deserialize_complex, serialize_complex, PcxError};

pub type MemberId = u32;

pub const DEFAULT_MEMBER_CAP: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplexKind {
    Path,
    Simplex,
    Cell,
}

impl ComplexKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ComplexKind::Path => "path",
            ComplexKind::Simplex => "simplex",
            ComplexKind::Cell => "cell",
        }
    }
}

impl fmt::Display for ComplexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ComplexKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "path" => Ok(ComplexKind::Path),
            "simplex" => Ok(ComplexKind::Simplex),
            "cell" => Ok(ComplexKind::Cell),
            other => Err(format!("unknown complex kind {other:?}")),
        }
    }
}

/// Which one-vertex deletions of a path count as its boundary.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    /// End truncations plus every interior deletion whose skip-edge exists.
    #[default]
    Incidence,
    /// Only the two end truncations.
    Truncation,
}

impl fmt::Display for BoundaryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryMode::Incidence => "incidence",
            BoundaryMode::Truncation => "truncation",
        })
    }
}

impl std::str::FromStr for BoundaryMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "incidence" => Ok(BoundaryMode::Incidence),
            "truncation" => Ok(BoundaryMode::Truncation),
            other => Err(format!("unknown boundary mode {other:?}")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("member count exceeds the cap of {cap}")]
    MemberCap { cap: usize },
    #[error("ring size cap must be at least 3, got {0}")]
    RingSize(usize),
    #[error("member {0} is not a 2-cell")]
    NotACell(MemberId),
}

/// Canonical orientation of a path: first vertex below the last.
pub fn canonical_path(seq: &[Vertex]) -> Vec<Vertex> {
    let mut out = seq.to_vec();
    if out.len() >= 2 && out[0] > out[out.len() - 1] {
        out.reverse();
    }
    out
}

/// Canonical form of a ring: rotated to its smallest vertex, walked towards the
/// smaller of that vertex's two ring neighbours.
pub fn canonical_ring(seq: &[Vertex]) -> Vec<Vertex> {
    let m = seq.len();
    let Some(start) = (0..m).min_by_key(|&i| seq[i]) else {
        return Vec::new();
    };
    let forward: Vec<Vertex> = (0..m).map(|i| seq[(start + i) % m]).collect();
    if m >= 3 && forward[1] > forward[m - 1] {
        let mut backward = Vec::with_capacity(m);
        backward.push(forward[0]);
        backward.extend(forward[1..].iter().rev());
        backward
    } else {
        forward
    }
}

/// An elementary path in canonical orientation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementaryPath(Vec<Vertex>);

impl ElementaryPath {
    /// Canonicalises the orientation; a sequence and its reverse give the same path.
    pub fn new(seq: &[Vertex]) -> Self {
        Self(canonical_path(seq))
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len().saturating_sub(1)
    }
}

impl fmt::Display for ElementaryPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("e")?;
        if self.0.iter().all(|&v| v < 10) {
            for v in &self.0 {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

/// Borrowed view of one member.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Member<'a> {
    pub id: MemberId,
    pub dim: usize,
    pub kind: ComplexKind,
    pub carrier: &'a [Vertex],
}

/// Members grouped by dimension with boundary and coboundary incidence in CSR form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HigherOrderComplex {
    kind: ComplexKind,
    vertex_count: usize,
    dim_start: Vec<usize>,
    carrier_ptr: Vec<usize>,
    carriers: Vec<Vertex>,
    boundary_ptr: Vec<usize>,
    boundary: Vec<MemberId>,
    coboundary_ptr: Vec<usize>,
    coboundary: Vec<MemberId>,
}

/// One dimension's worth of members, used while assembling a complex.
#[derive(Debug, Default)]
pub(crate) struct Level {
    pub carrier_ptr: Vec<usize>,
    pub carriers: Vec<Vertex>,
    pub boundary_ptr: Vec<usize>,
    pub boundary: Vec<MemberId>,
}

impl Level {
    pub fn new() -> Self {
        Self {
            carrier_ptr: vec![0],
            carriers: Vec::new(),
            boundary_ptr: vec![0],
            boundary: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.carrier_ptr.len() - 1
    }

    pub fn carrier(&self, i: usize) -> &[Vertex] {
        &self.carriers[self.carrier_ptr[i]..self.carrier_ptr[i + 1]]
    }

    /// Binary search; carriers must be sorted lexicographically.
    pub fn locate(&self, key: &[Vertex]) -> Option<usize> {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.carrier(mid).cmp(key) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

impl HigherOrderComplex {
    /// Concatenates levels (dimension 0 first) and derives the coboundary.
    pub(crate) fn assemble(kind: ComplexKind, vertex_count: usize, levels: Vec<Level>) -> Self {
        let total: usize = levels.iter().map(Level::len).sum();
        let mut dim_start = vec![0];
        let mut carrier_ptr = Vec::with_capacity(total + 1);
        let mut carriers = Vec::new();
        let mut boundary_ptr = Vec::with_capacity(total + 1);
        let mut boundary = Vec::new();
        carrier_ptr.push(0);
        boundary_ptr.push(0);
        for level in levels {
            let base_c = carriers.len();
            let base_b = boundary.len();
            carrier_ptr.extend(level.carrier_ptr[1..].iter().map(|&p| p + base_c));
            boundary_ptr.extend(level.boundary_ptr[1..].iter().map(|&p| p + base_b));
            carriers.extend(level.carriers);
            boundary.extend(level.boundary);
            dim_start.push(carrier_ptr.len() - 1);
        }

        let mut degree = vec![0usize; total + 1];
        for &b in &boundary {
            degree[b as usize + 1] += 1;
        }
        for i in 0..total {
            degree[i + 1] += degree[i];
        }
        let coboundary_ptr = degree.clone();
        let mut fill = degree;
        let mut coboundary = vec![0; boundary.len()];
        for sigma in 0..total {
            for &b in &boundary[boundary_ptr[sigma]..boundary_ptr[sigma + 1]] {
                coboundary[fill[b as usize]] = sigma as MemberId;
                fill[b as usize] += 1;
            }
        }

        Self {
            kind,
            vertex_count,
            dim_start,
            carrier_ptr,
            carriers,
            boundary_ptr,
            boundary,
            coboundary_ptr,
            coboundary,
        }
    }

    pub fn kind(&self) -> ComplexKind {
        self.kind
    }

    /// Vertex count of the source graph.
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn max_dim(&self) -> usize {
        self.dim_start.len() - 2
    }

    pub fn len(&self) -> usize {
        self.carrier_ptr.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Member count per dimension `0..=max_dim`.
    pub fn counts(&self) -> Vec<usize> {
        self.dim_start.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn dim_len(&self, p: usize) -> usize {
        self.ids_of_dim(p).len()
    }

    /// Id range of dimension `p`; empty past `max_dim`.
    pub fn ids_of_dim(&self, p: usize) -> Range<MemberId> {
        if p + 1 >= self.dim_start.len() {
            let end = self.len() as MemberId;
            return end..end;
        }
        self.dim_start[p] as MemberId..self.dim_start[p + 1] as MemberId
    }

    pub fn dim_of(&self, id: MemberId) -> usize {
        self.dim_start.partition_point(|&s| s <= id as usize) - 1
    }

    pub fn carrier(&self, id: MemberId) -> &[Vertex] {
        let i = id as usize;
        &self.carriers[self.carrier_ptr[i]..self.carrier_ptr[i + 1]]
    }

    pub fn member(&self, id: MemberId) -> Member<'_> {
        Member {
            id,
            dim: self.dim_of(id),
            kind: self.kind,
            carrier: self.carrier(id),
        }
    }

    /// Sorted ids of the boundary members, one dimension lower.
    pub fn boundary(&self, id: MemberId) -> &[MemberId] {
        let i = id as usize;
        &self.boundary[self.boundary_ptr[i]..self.boundary_ptr[i + 1]]
    }

    /// Sorted ids of the members having `id` on their boundary.
    pub fn coboundary(&self, id: MemberId) -> &[MemberId] {
        let i = id as usize;
        &self.coboundary[self.coboundary_ptr[i]..self.coboundary_ptr[i + 1]]
    }

    /// `(tau, delta)` for every `delta` in the coboundary and every other
    /// `tau` on the boundary of `delta`. A pair sharing several cofaces
    /// appears once per coface.
    pub fn upper_adjacent(&self, id: MemberId) -> impl Iterator<Item = (MemberId, MemberId)> + '_ {
        self.coboundary(id).iter().flat_map(move |&delta| {
            self.boundary(delta)
                .iter()
                .filter(move |&&tau| tau != id)
                .map(move |&tau| (tau, delta))
        })
    }

    /// `(tau, beta)` for every `beta` on the boundary and every other `tau`
    /// with `beta` on its boundary.
    pub fn lower_adjacent(&self, id: MemberId) -> impl Iterator<Item = (MemberId, MemberId)> + '_ {
        self.boundary(id).iter().flat_map(move |&beta| {
            self.coboundary(beta)
                .iter()
                .filter(move |&&tau| tau != id)
                .map(move |&tau| (tau, beta))
        })
    }

    /// Looks up a member by carrier, canonicalising orientation or rotation first.
    pub fn find(&self, carrier: &[Vertex]) -> Option<MemberId> {
        if carrier.is_empty() {
            return None;
        }
        let (key, dim) = match self.kind {
            ComplexKind::Path => (canonical_path(carrier), carrier.len() - 1),
            ComplexKind::Simplex => {
                let mut key = carrier.to_vec();
                key.sort_unstable();
                (key, carrier.len() - 1)
            }
            ComplexKind::Cell => match carrier.len() {
                1 | 2 => (canonical_path(carrier), carrier.len() - 1),
                _ => (canonical_ring(carrier), 2),
            },
        };
        let range = self.ids_of_dim(dim);
        let (mut lo, mut hi) = (range.start, range.end);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            match self.carrier(mid).cmp(&key) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Boundary-size multiset per dimension, each sorted.
    pub fn boundary_size_profile(&self) -> Vec<Vec<usize>> {
        (0..=self.max_dim())
            .map(|p| {
                let mut sizes: Vec<usize> = self
                    .ids_of_dim(p)
                    .map(|id| self.boundary(id).len())
                    .collect();
                sizes.sort_unstable();
                sizes
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        assert_eq!(canonical_path(&[3, 1, 2]), vec![2, 1, 3]);
        assert_eq!(canonical_path(&[1, 0]), vec![0, 1]);
        assert_eq!(canonical_path(&[5]), vec![5]);
        assert_eq!(canonical_ring(&[1, 0, 2, 3]), vec![0, 1, 3, 2]);
        assert_eq!(canonical_ring(&[3, 2, 0, 1]), vec![0, 1, 3, 2]);
        assert_eq!(canonical_ring(&[2, 1, 0]), vec![0, 1, 2]);
    }

    #[test]
    fn elementary_path_display() {
        assert_eq!(ElementaryPath::new(&[3, 2, 0, 1]).to_string(), "e1023");
        assert_eq!(ElementaryPath::new(&[12, 3]).to_string(), "e(3,12)");
    }
}
