use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use thiserror::Error;

use crate::graph::{SimpleGraph, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("the boundary of the empty sequence is undefined")]
    EmptySequence,
    #[error("term {0:?} is not an allowed path of the graph")]
    NotAllowed(Vec<Vertex>),
}

/// Formal integer combination of vertex sequences. Zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SignedChain {
    terms: BTreeMap<Vec<Vertex>, i64>,
}

impl SignedChain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(seq: &[Vertex], coefficient: i64) -> Self {
        let mut chain = Self::new();
        chain.add_term(seq, coefficient);
        chain
    }

    pub fn add_term(&mut self, seq: &[Vertex], coefficient: i64) {
        if coefficient == 0 {
            return;
        }
        let slot = self.terms.entry(seq.to_vec()).or_insert(0);
        *slot += coefficient;
        if *slot == 0 {
            self.terms.remove(seq);
        }
    }

    pub fn coefficient(&self, seq: &[Vertex]) -> i64 {
        self.terms.get(seq).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Vertex], i64)> {
        self.terms.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Linear extension of [`signed_boundary`].
    pub fn boundary(&self) -> Result<SignedChain, ChainError> {
        let mut out = SignedChain::new();
        for (seq, c) in self.terms() {
            for (face, s) in signed_boundary(seq)?.terms() {
                out.add_term(face, s * c);
            }
        }
        Ok(out)
    }
}

impl Add for SignedChain {
    type Output = SignedChain;

    fn add(mut self, rhs: SignedChain) -> SignedChain {
        for (seq, c) in rhs.terms {
            self.add_term(&seq, c);
        }
        self
    }
}

impl Neg for SignedChain {
    type Output = SignedChain;

    fn neg(mut self) -> SignedChain {
        for c in self.terms.values_mut() {
            *c = -*c;
        }
        self
    }
}

impl Sub for SignedChain {
    type Output = SignedChain;

    fn sub(self, rhs: SignedChain) -> SignedChain {
        self + (-rhs)
    }
}

impl fmt::Display for SignedChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (seq, c)) in self.terms().enumerate() {
            let sign = if c < 0 {
                "-"
            } else if i > 0 {
                "+"
            } else {
                ""
            };
            let sep = if i > 0 { " " } else { "" };
            let mag = c.unsigned_abs();
            write!(f, "{sep}{sign}")?;
            if i > 0 {
                f.write_str(" ")?;
            }
            if mag != 1 {
                write!(f, "{mag}")?;
            }
            f.write_str("e")?;
            let parts: Vec<String> = seq.iter().map(ToString::to_string).collect();
            write!(f, "[{}]", parts.join(","))?;
        }
        Ok(())
    }
}

/// `sum_q (-1)^q e_{i_0 .. î_q .. i_p}`; a single vertex maps to the empty sequence.
pub fn signed_boundary(seq: &[Vertex]) -> Result<SignedChain, ChainError> {
    if seq.is_empty() {
        return Err(ChainError::EmptySequence);
    }
    let mut chain = SignedChain::new();
    for q in 0..seq.len() {
        let face: Vec<Vertex> = seq[..q].iter().chain(&seq[q + 1..]).copied().collect();
        chain.add_term(&face, if q % 2 == 0 { 1 } else { -1 });
    }
    Ok(chain)
}

/// Consecutive vertices adjacent in `g`. Sequences of length at most one are
/// always allowed when their vertex exists.
pub fn is_allowed(seq: &[Vertex], g: &SimpleGraph) -> bool {
    seq.iter().all(|&v| (v as usize) < g.n()) && seq.windows(2).all(|w| g.has_edge(w[0], w[1]))
}

/// True iff the signed boundary of `chain` is a combination of allowed paths.
pub fn is_boundary_invariant(chain: &SignedChain, g: &SimpleGraph) -> Result<bool, ChainError> {
    if let Some((seq, _)) = chain.terms().find(|(seq, _)| !is_allowed(seq, g)) {
        return Err(ChainError::NotAllowed(seq.to_vec()));
    }
    Ok(chain.boundary()?.terms().all(|(seq, _)| is_allowed(seq, g)))
}
