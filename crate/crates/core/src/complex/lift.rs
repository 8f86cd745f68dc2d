use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    canonical_path, BoundaryMode, ComplexKind, HigherOrderComplex, Level, LiftError, MemberId,
    DEFAULT_MEMBER_CAP,
};
use crate::graph::{SimpleGraph, Vertex};

const CHUNK: usize = 2048;

/// Everything needed to lift a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LiftSpec {
    pub kind: ComplexKind,
    /// Maximum dimension for path and clique lifts; maximum ring size for cell lifts.
    pub size: usize,
    pub boundary_mode: BoundaryMode,
    pub member_cap: usize,
}

impl LiftSpec {
    pub fn path(max_dim: usize) -> Self {
        Self {
            kind: ComplexKind::Path,
            size: max_dim,
            boundary_mode: BoundaryMode::Incidence,
            member_cap: DEFAULT_MEMBER_CAP,
        }
    }

    pub fn clique(max_dim: usize) -> Self {
        Self {
            kind: ComplexKind::Simplex,
            ..Self::path(max_dim)
        }
    }

    pub fn ring(max_ring: usize) -> Self {
        Self {
            kind: ComplexKind::Cell,
            ..Self::path(max_ring)
        }
    }

    pub fn with_boundary_mode(mut self, mode: BoundaryMode) -> Self {
        self.boundary_mode = mode;
        self
    }

    pub fn with_member_cap(mut self, cap: usize) -> Self {
        self.member_cap = cap;
        self
    }
}

pub fn lift(g: &SimpleGraph, spec: &LiftSpec) -> Result<HigherOrderComplex, LiftError> {
    let budget = Budget::new(spec.member_cap);
    match spec.kind {
        ComplexKind::Path => path_complex(g, spec.size, spec.boundary_mode, &budget),
        ComplexKind::Simplex => clique_complex(g, spec.size, &budget),
        ComplexKind::Cell => ring_complex(g, spec.size, &budget),
    }
}

/// Path complex with incidence boundaries and the default member cap.
pub fn lift_path_complex(g: &SimpleGraph, max_dim: usize) -> Result<HigherOrderComplex, LiftError> {
    lift(g, &LiftSpec::path(max_dim))
}

pub fn lift_clique_complex(
    g: &SimpleGraph,
    max_dim: usize,
) -> Result<HigherOrderComplex, LiftError> {
    lift(g, &LiftSpec::clique(max_dim))
}

pub fn lift_ring_complex(
    g: &SimpleGraph,
    max_ring: usize,
) -> Result<HigherOrderComplex, LiftError> {
    lift(g, &LiftSpec::ring(max_ring))
}

struct Budget {
    cap: usize,
    used: AtomicUsize,
}

impl Budget {
    fn new(cap: usize) -> Self {
        Self {
            cap,
            used: AtomicUsize::new(0),
        }
    }

    fn take(&self, k: usize) -> Result<(), LiftError> {
        if self.used.fetch_add(k, Ordering::Relaxed) + k > self.cap {
            Err(LiftError::MemberCap { cap: self.cap })
        } else {
            Ok(())
        }
    }
}

/// Flat fixed-stride carriers for one dimension, one vector per start vertex.
type PerStart = Vec<Vec<Vertex>>;

fn merge_levels(per_start: Vec<PerStart>, dims: usize) -> Vec<Level> {
    (0..dims)
        .map(|p| {
            let mut level = Level::new();
            for part in &per_start {
                for seq in part[p].chunks_exact(p + 1) {
                    level.carriers.extend_from_slice(seq);
                    level.carrier_ptr.push(level.carriers.len());
                }
            }
            level
        })
        .collect()
}

/// Fills `levels[p].boundary` for `p >= 1` using `faces`, which lists the
/// candidate faces of a carrier; faces absent from the level below are skipped.
fn attach_boundaries<F>(levels: &mut [Level], faces: F)
where
    F: Fn(&[Vertex], &mut Vec<Vec<Vertex>>) + Sync,
{
    let mut offset = 0usize;
    for p in 0..levels.len() {
        let (lower, upper) = levels.split_at_mut(p);
        let level = &mut upper[0];
        if p == 0 {
            level.boundary_ptr = vec![0; level.len() + 1];
            offset += level.len();
            continue;
        }
        let below = &lower[p - 1];
        let below_start = offset - below.len();
        let count = level.len();
        let chunks: Vec<(Vec<usize>, Vec<MemberId>)> = (0..count.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut sizes = Vec::with_capacity(CHUNK);
                let mut ids = Vec::new();
                let mut scratch = Vec::new();
                for i in c * CHUNK..((c + 1) * CHUNK).min(count) {
                    scratch.clear();
                    faces(level.carrier(i), &mut scratch);
                    let before = ids.len();
                    for face in &scratch {
                        if let Some(j) = below.locate(face) {
                            ids.push((below_start + j) as MemberId);
                        }
                    }
                    ids[before..].sort_unstable();
                    sizes.push(ids.len() - before);
                }
                (sizes, ids)
            })
            .collect();
        let mut ptr = Vec::with_capacity(count + 1);
        ptr.push(0);
        let mut flat = Vec::new();
        for (sizes, ids) in chunks {
            for s in sizes {
                ptr.push(ptr.last().unwrap() + s);
            }
            flat.extend(ids);
        }
        level.boundary_ptr = ptr;
        level.boundary = flat;
        offset += count;
    }
}

fn path_complex(
    g: &SimpleGraph,
    max_dim: usize,
    mode: BoundaryMode,
    budget: &Budget,
) -> Result<HigherOrderComplex, LiftError> {
    let n = g.n();
    let per_start: Vec<PerStart> = (0..n as Vertex)
        .into_par_iter()
        .map(|s| {
            let mut out = vec![Vec::new(); max_dim + 1];
            out[0].push(s);
            budget.take(1)?;
            if max_dim > 0 {
                let mut on_path = vec![false; n];
                on_path[s as usize] = true;
                let mut path = vec![s];
                extend_path(g, &mut path, &mut on_path, max_dim, &mut out, budget)?;
            }
            Ok(out)
        })
        .collect::<Result<_, LiftError>>()?;

    let mut levels = merge_levels(per_start, max_dim + 1);
    attach_boundaries(&mut levels, |seq, faces| {
        let last = seq.len() - 1;
        for q in 0..=last {
            let interior = q != 0 && q != last;
            if interior && (mode == BoundaryMode::Truncation || !g.has_edge(seq[q - 1], seq[q + 1]))
            {
                continue;
            }
            let face: Vec<Vertex> = seq[..q].iter().chain(&seq[q + 1..]).copied().collect();
            faces.push(canonical_path(&face));
        }
    });
    Ok(HigherOrderComplex::assemble(ComplexKind::Path, n, levels))
}

/// Depth-first extension in sorted neighbour order; a path is recorded from
/// the end with the smaller label.
fn extend_path(
    g: &SimpleGraph,
    path: &mut Vec<Vertex>,
    on_path: &mut [bool],
    max_dim: usize,
    out: &mut PerStart,
    budget: &Budget,
) -> Result<(), LiftError> {
    let last = *path.last().unwrap();
    for &w in g.neighbors(last) {
        if on_path[w as usize] {
            continue;
        }
        path.push(w);
        on_path[w as usize] = true;
        let p = path.len() - 1;
        if path[0] < w {
            out[p].extend_from_slice(path);
            budget.take(1)?;
        }
        if p < max_dim {
            extend_path(g, path, on_path, max_dim, out, budget)?;
        }
        path.pop();
        on_path[w as usize] = false;
    }
    Ok(())
}

fn clique_complex(
    g: &SimpleGraph,
    max_dim: usize,
    budget: &Budget,
) -> Result<HigherOrderComplex, LiftError> {
    let n = g.n();
    let per_start: Vec<PerStart> = (0..n as Vertex)
        .into_par_iter()
        .map(|s| {
            let mut out = vec![Vec::new(); max_dim + 1];
            out[0].push(s);
            budget.take(1)?;
            let candidates: Vec<Vertex> =
                g.neighbors(s).iter().copied().filter(|&v| v > s).collect();
            let mut clique = vec![s];
            extend_clique(g, &mut clique, &candidates, max_dim, &mut out, budget)?;
            Ok(out)
        })
        .collect::<Result<_, LiftError>>()?;

    let mut levels = merge_levels(per_start, max_dim + 1);
    attach_boundaries(&mut levels, |seq, faces| {
        for q in 0..seq.len() {
            faces.push(seq[..q].iter().chain(&seq[q + 1..]).copied().collect());
        }
    });
    Ok(HigherOrderComplex::assemble(
        ComplexKind::Simplex,
        n,
        levels,
    ))
}

fn extend_clique(
    g: &SimpleGraph,
    clique: &mut Vec<Vertex>,
    candidates: &[Vertex],
    max_dim: usize,
    out: &mut PerStart,
    budget: &Budget,
) -> Result<(), LiftError> {
    if clique.len() > max_dim {
        return Ok(());
    }
    for (i, &w) in candidates.iter().enumerate() {
        clique.push(w);
        out[clique.len() - 1].extend_from_slice(clique);
        budget.take(1)?;
        let next: Vec<Vertex> = candidates[i + 1..]
            .iter()
            .copied()
            .filter(|&u| g.has_edge(w, u))
            .collect();
        extend_clique(g, clique, &next, max_dim, out, budget)?;
        clique.pop();
    }
    Ok(())
}

fn ring_complex(
    g: &SimpleGraph,
    max_ring: usize,
    budget: &Budget,
) -> Result<HigherOrderComplex, LiftError> {
    if max_ring < 3 {
        return Err(LiftError::RingSize(max_ring));
    }
    let n = g.n();
    let mut vertices = Level::new();
    for v in 0..n as Vertex {
        vertices.carriers.push(v);
        vertices.carrier_ptr.push(vertices.carriers.len());
    }
    let mut edges = Level::new();
    for (u, v) in g.edges() {
        edges.carriers.extend([u, v]);
        edges.carrier_ptr.push(edges.carriers.len());
    }
    budget.take(n + g.edge_count())?;

    let mut rings: Vec<Vec<Vertex>> = (0..n as Vertex)
        .into_par_iter()
        .map(|s| {
            let mut found = Vec::new();
            let mut on_path = vec![false; n];
            on_path[s as usize] = true;
            for &v in g.neighbors(s).iter().filter(|&&v| v > s) {
                on_path[v as usize] = true;
                let mut path = vec![s, v];
                grow_ring(g, &mut path, &mut on_path, max_ring, &mut found, budget)?;
                on_path[v as usize] = false;
            }
            Ok(found)
        })
        .collect::<Result<Vec<Vec<Vec<Vertex>>>, LiftError>>()?
        .into_iter()
        .flatten()
        .collect();
    rings.sort_unstable();
    let mut cells = Level::new();
    for ring in rings {
        cells.carriers.extend(ring);
        cells.carrier_ptr.push(cells.carriers.len());
    }

    let mut levels = vec![vertices, edges, cells];
    attach_boundaries(&mut levels, |seq, faces| {
        if seq.len() == 2 {
            faces.push(vec![seq[0]]);
            faces.push(vec![seq[1]]);
        } else {
            for i in 0..seq.len() {
                let (a, b) = (seq[i], seq[(i + 1) % seq.len()]);
                faces.push(vec![a.min(b), a.max(b)]);
            }
        }
    });
    Ok(HigherOrderComplex::assemble(ComplexKind::Cell, n, levels))
}

/// Grows an induced path `s = path[0] < every other vertex`, closing it into a
/// chordless cycle whenever the new vertex is adjacent to `s`.
fn grow_ring(
    g: &SimpleGraph,
    path: &mut Vec<Vertex>,
    on_path: &mut [bool],
    max_ring: usize,
    found: &mut Vec<Vec<Vertex>>,
    budget: &Budget,
) -> Result<(), LiftError> {
    let s = path[0];
    let k = path.len();
    let last = path[k - 1];
    for &w in g.neighbors(last) {
        if w <= s || on_path[w as usize] {
            continue;
        }
        if path[1..k - 1].iter().any(|&u| g.has_edge(u, w)) {
            continue;
        }
        if g.has_edge(s, w) {
            if path[1] < w {
                let mut ring = path.clone();
                ring.push(w);
                found.push(ring);
                budget.take(1)?;
            }
            continue;
        }
        if k + 1 < max_ring {
            path.push(w);
            on_path[w as usize] = true;
            grow_ring(g, path, on_path, max_ring, found, budget)?;
            on_path[w as usize] = false;
            path.pop();
        }
    }
    Ok(())
}
