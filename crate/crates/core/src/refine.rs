//! Colour refinement over complexes (PWL, SWL, CWL) and over graphs (1-WL).
//!
//! Every member of every structure in a run starts with the same colour. Each
//! round maps a member to the signature made of its own colour and the sorted
//! multisets of neighbouring colours, and relabels signatures through a
//! dictionary shared by the whole run so that colours stay comparable across
//! structures. Refinement is monotone, so a round that leaves the number of
//! colour classes unchanged leaves the partition unchanged: that round ends
//! the run.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{
    lift, BoundaryMode, ComplexKind, HigherOrderComplex, LiftError, LiftSpec, MemberId,
    DEFAULT_MEMBER_CAP,
};
use crate::graph::SimpleGraph;

pub type Color = u32;

/// Members handled per parallel signature task.
const TASK: usize = 1024;
/// Members whose signatures are materialised at once.
const BLOCK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateRule {
    /// Own colour, boundary colours, upper-adjacency pairs.
    #[default]
    Reduced,
    /// Adds coboundary colours and lower-adjacency pairs.
    Full,
}

impl fmt::Display for UpdateRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UpdateRule::Reduced => "reduced",
            UpdateRule::Full => "full",
        })
    }
}

impl std::str::FromStr for UpdateRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reduced" => Ok(UpdateRule::Reduced),
            "full" => Ok(UpdateRule::Full),
            other => Err(format!("unknown update rule {other:?}")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RefineError {
    #[error("cannot refine a {0} complex jointly with a {1} complex")]
    KindMismatch(ComplexKind, ComplexKind),
}

/// Anything whose elements can be refined: a complex or a plain graph.
pub trait Refinable: Sync {
    fn element_count(&self) -> usize;

    /// Appends the signature of element `i` given the current `colors` of this structure.
    fn signature(&self, i: usize, colors: &[Color], rule: UpdateRule, buf: &mut Vec<u32>);
}

fn push_multiset(buf: &mut Vec<u32>, items: impl Iterator<Item = Color>, scratch: &mut Vec<u64>) {
    scratch.clear();
    scratch.extend(items.map(u64::from));
    scratch.sort_unstable();
    buf.push(scratch.len() as u32);
    buf.extend(scratch.iter().map(|&c| c as u32));
}

fn push_pairs(
    buf: &mut Vec<u32>,
    items: impl Iterator<Item = (Color, Color)>,
    scratch: &mut Vec<u64>,
) {
    scratch.clear();
    scratch.extend(items.map(|(a, b)| (u64::from(a) << 32) | u64::from(b)));
    scratch.sort_unstable();
    buf.push(scratch.len() as u32);
    for &x in scratch.iter() {
        buf.push((x >> 32) as u32);
        buf.push(x as u32);
    }
}

thread_local! {
    static SCRATCH: std::cell::RefCell<Vec<u64>> = const { std::cell::RefCell::new(Vec::new()) };
}

impl Refinable for HigherOrderComplex {
    fn element_count(&self) -> usize {
        self.len()
    }

    fn signature(&self, i: usize, colors: &[Color], rule: UpdateRule, buf: &mut Vec<u32>) {
        let id = i as MemberId;
        let c = |m: MemberId| colors[m as usize];
        SCRATCH.with(|s| {
            let scratch = &mut *s.borrow_mut();
            buf.push(c(id));
            push_multiset(buf, self.boundary(id).iter().map(|&b| c(b)), scratch);
            push_pairs(
                buf,
                self.upper_adjacent(id).map(|(t, d)| (c(t), c(d))),
                scratch,
            );
            if rule == UpdateRule::Full {
                push_multiset(buf, self.coboundary(id).iter().map(|&b| c(b)), scratch);
                push_pairs(
                    buf,
                    self.lower_adjacent(id).map(|(t, d)| (c(t), c(d))),
                    scratch,
                );
            }
        });
    }
}

impl Refinable for SimpleGraph {
    fn element_count(&self) -> usize {
        self.n()
    }

    fn signature(&self, i: usize, colors: &[Color], _rule: UpdateRule, buf: &mut Vec<u32>) {
        SCRATCH.with(|s| {
            buf.push(colors[i]);
            let neighbors = self.neighbors(i as u32).iter().map(|&w| colors[w as usize]);
            push_multiset(buf, neighbors, &mut s.borrow_mut());
        });
    }
}

/// Per-colour member counts, pooled over all dimensions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColorHistogram {
    counts: BTreeMap<Color, usize>,
}

impl ColorHistogram {
    pub fn from_colors(colors: &[Color]) -> Self {
        let mut counts = BTreeMap::new();
        for &c in colors {
            *counts.entry(c).or_insert(0) += 1;
        }
        Self { counts }
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn class_count(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, color: Color) -> usize {
        self.counts.get(&color).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Color, usize)> + '_ {
        self.counts.iter().map(|(&c, &n)| (c, n))
    }
}

/// True iff the histograms differ as multisets. Only meaningful for
/// histograms produced by the same run.
pub fn distinguishes(a: &ColorHistogram, b: &ColorHistogram) -> bool {
    a != b
}

/// Refinement state for a batch of structures sharing one dictionary.
pub struct ColorState<'a, D: Refinable + ?Sized> {
    parts: Vec<&'a D>,
    offsets: Vec<usize>,
    colors: Vec<Color>,
    classes: usize,
    round: usize,
    rule: UpdateRule,
}

impl<'a, D: Refinable + ?Sized> ColorState<'a, D> {
    /// All elements of all parts start with colour 0.
    pub fn new(parts: &[&'a D], rule: UpdateRule) -> Self {
        let mut offsets = vec![0];
        for p in parts {
            offsets.push(offsets.last().unwrap() + p.element_count());
        }
        let total = *offsets.last().unwrap();
        Self {
            parts: parts.to_vec(),
            offsets,
            colors: vec![0; total],
            classes: usize::from(total > 0),
            round: 0,
            rule,
        }
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    pub fn element_count(&self) -> usize {
        self.colors.len()
    }

    pub fn colors(&self, part: usize) -> &[Color] {
        &self.colors[self.offsets[part]..self.offsets[part + 1]]
    }

    pub fn histogram(&self, part: usize) -> ColorHistogram {
        ColorHistogram::from_colors(self.colors(part))
    }

    /// One refinement round; returns whether the partition became strictly finer.
    pub fn step(&mut self) -> bool {
        let mut next = vec![0 as Color; self.colors.len()];
        let mut dictionary: FxHashMap<Box<[u32]>, Color> = FxHashMap::default();
        let rule = self.rule;
        for (k, part) in self.parts.iter().enumerate() {
            let (lo, hi) = (self.offsets[k], self.offsets[k + 1]);
            let colors = &self.colors[lo..hi];
            let len = hi - lo;
            for block in (0..len).step_by(BLOCK) {
                let block_end = (block + BLOCK).min(len);
                let pieces: Vec<(Vec<usize>, Vec<u32>)> = (block..block_end)
                    .step_by(TASK)
                    .collect::<Vec<_>>()
                    .into_par_iter()
                    .map(|start| {
                        let mut ends = Vec::with_capacity(TASK);
                        let mut arena = Vec::new();
                        for i in start..(start + TASK).min(block_end) {
                            part.signature(i, colors, rule, &mut arena);
                            ends.push(arena.len());
                        }
                        (ends, arena)
                    })
                    .collect();
                let mut i = lo + block;
                for (ends, arena) in pieces {
                    let mut from = 0;
                    for end in ends {
                        let sig = &arena[from..end];
                        next[i] = match dictionary.get(sig) {
                            Some(&c) => c,
                            None => {
                                let c = dictionary.len() as Color;
                                dictionary.insert(sig.into(), c);
                                c
                            }
                        };
                        from = end;
                        i += 1;
                    }
                }
            }
        }
        let finer = dictionary.len() != self.classes;
        self.colors = next;
        self.classes = dictionary.len();
        self.round += 1;
        finer
    }

    /// Steps until a round leaves the partition unchanged or `max_rounds`
    /// rounds have run (default: the element count). Returns rounds run.
    pub fn run(&mut self, max_rounds: Option<usize>) -> Refinement {
        let limit = max_rounds.unwrap_or(self.colors.len());
        let mut stable = false;
        let start = self.round;
        while self.round - start < limit {
            if !self.step() {
                stable = true;
                break;
            }
        }
        Refinement {
            histograms: (0..self.parts.len()).map(|k| self.histogram(k)).collect(),
            rounds: self.round - start,
            stable,
        }
    }
}

/// Outcome of a refinement run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    pub histograms: Vec<ColorHistogram>,
    /// Rounds executed, including the final round that changed nothing.
    pub rounds: usize,
    /// False when the round budget ran out first.
    pub stable: bool,
}

fn check_kinds(complexes: &[&HigherOrderComplex]) -> Result<(), RefineError> {
    if let Some(first) = complexes.first() {
        if let Some(other) = complexes.iter().find(|c| c.kind() != first.kind()) {
            return Err(RefineError::KindMismatch(first.kind(), other.kind()));
        }
    }
    Ok(())
}

/// Refines any number of complexes jointly.
pub fn refine_many(
    complexes: &[&HigherOrderComplex],
    rule: UpdateRule,
    max_rounds: Option<usize>,
) -> Result<Refinement, RefineError> {
    check_kinds(complexes)?;
    Ok(ColorState::new(complexes, rule).run(max_rounds))
}

pub fn refine_pair(
    x: &HigherOrderComplex,
    y: &HigherOrderComplex,
    rule: UpdateRule,
    max_rounds: Option<usize>,
) -> Result<(ColorHistogram, ColorHistogram, usize), RefineError> {
    let mut r = refine_many(&[x, y], rule, max_rounds)?;
    let hy = r.histograms.pop().unwrap();
    let hx = r.histograms.pop().unwrap();
    Ok((hx, hy, r.rounds))
}

pub fn wl1_refine_many(graphs: &[&SimpleGraph], max_rounds: Option<usize>) -> Refinement {
    ColorState::new(graphs, UpdateRule::Reduced).run(max_rounds)
}

pub fn wl1_refine_pair(
    g1: &SimpleGraph,
    g2: &SimpleGraph,
) -> (ColorHistogram, ColorHistogram, usize) {
    let mut r = wl1_refine_many(&[g1, g2], None);
    let h2 = r.histograms.pop().unwrap();
    let h1 = r.histograms.pop().unwrap();
    (h1, h2, r.rounds)
}

/// Pairs of structures whose stable histograms differ, from a joint run.
///
/// Joint colours after round `t` encode depth-`t` unfoldings, so histogram
/// equality between two parts is the same verdict a pairwise run would give.
pub fn pairwise_verdicts(r: &Refinement) -> Vec<(usize, usize, bool)> {
    let h = &r.histograms;
    let mut out = Vec::new();
    for a in 0..h.len() {
        for b in a + 1..h.len() {
            out.push((a, b, distinguishes(&h[a], &h[b])));
        }
    }
    out
}

/// Settings for [`power_order_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerOrderParams {
    pub pwl_dim: usize,
    pub swl_dim: usize,
    pub max_ring: usize,
    pub boundary_mode: BoundaryMode,
    pub member_cap: usize,
}

impl Default for PowerOrderParams {
    fn default() -> Self {
        Self {
            pwl_dim: 3,
            swl_dim: 2,
            max_ring: 4,
            boundary_mode: BoundaryMode::Incidence,
            member_cap: DEFAULT_MEMBER_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairVerdicts {
    pub wl: bool,
    pub swl: bool,
    pub cwl: bool,
    pub pwl: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub pair: usize,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerOrderReport {
    pub params: PowerOrderParams,
    pub verdicts: Vec<PairVerdicts>,
    pub violations: Vec<Violation>,
}

impl PowerOrderReport {
    /// Pairs separated by PWL but not by 1-WL.
    pub fn strict_witnesses(&self) -> Vec<usize> {
        self.verdicts
            .iter()
            .enumerate()
            .filter(|(_, v)| v.pwl && !v.wl)
            .map(|(i, _)| i)
            .collect()
    }
}

fn complex_verdict(a: &SimpleGraph, b: &SimpleGraph, spec: &LiftSpec) -> Result<bool, LiftError> {
    let x = lift(a, spec)?;
    let y = lift(b, spec)?;
    let (hx, hy, _) = refine_pair(&x, &y, UpdateRule::Reduced, None).expect("same kind");
    Ok(distinguishes(&hx, &hy))
}

/// Runs 1-WL, SWL, CWL and PWL on every pair and flags pairs where a method
/// PWL should dominate separates a pair PWL does not.
pub fn power_order_check(
    pairs: &[(SimpleGraph, SimpleGraph)],
    params: &PowerOrderParams,
) -> Result<PowerOrderReport, LiftError> {
    let pwl_spec = LiftSpec::path(params.pwl_dim)
        .with_boundary_mode(params.boundary_mode)
        .with_member_cap(params.member_cap);
    let swl_spec = LiftSpec::clique(params.swl_dim).with_member_cap(params.member_cap);
    let cwl_spec = LiftSpec::ring(params.max_ring).with_member_cap(params.member_cap);
    let verdicts = pairs
        .par_iter()
        .map(|(a, b)| {
            let (h1, h2, _) = wl1_refine_pair(a, b);
            Ok(PairVerdicts {
                wl: distinguishes(&h1, &h2),
                swl: complex_verdict(a, b, &swl_spec)?,
                cwl: complex_verdict(a, b, &cwl_spec)?,
                pwl: complex_verdict(a, b, &pwl_spec)?,
            })
        })
        .collect::<Result<Vec<_>, LiftError>>()?;

    let mut violations = Vec::new();
    for (pair, v) in verdicts.iter().enumerate() {
        let mut flag = |method: &str| {
            violations.push(Violation {
                pair,
                method: method.to_string(),
            })
        };
        if v.wl && !v.pwl {
            flag("wl1");
        }
        if v.swl && !v.pwl && params.pwl_dim >= params.swl_dim {
            flag("swl");
        }
        if v.cwl && !v.pwl && params.pwl_dim + 1 >= params.max_ring {
            flag("cwl");
        }
    }
    Ok(PowerOrderReport {
        params: *params,
        verdicts,
        violations,
    })
}
