//! Random-weight path network forward pass.
//!
//! Per layer and dimension `p`, with `B` the boundary and `N` the upper
//! adjacency (one entry per shared coface `delta`):
//!
//! ```text
//! m_B  = MLP_B((1 + eps_B) h + sum_{tau in B} h_tau)
//! m_up = MLP_up((1 + eps_up) h + sum_{(tau, delta) in N} MLP_M(h_tau || h_delta))
//! h'   = MLP_UP(m_B || m_up)
//! ```
//!
//! After the last layer each dimension is sum-pooled and passed through its
//! own dense layer, the dimension vectors are summed, and a two-layer
//! projection produces the embedding. Every dense layer uses ELU except the
//! final projection.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{HigherOrderComplex, MemberId};

const TASK: usize = 512;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite activation after layer {layer} in dimension {dim}")]
    NonFinite { layer: usize, dim: usize },
    #[error("vectors of length {0} and {1} cannot be compared")]
    LengthMismatch(usize, usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    #[default]
    Sum,
    Mean,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseFeature {
    #[default]
    Ones,
    /// Vertex degree repeated across the feature vector.
    Degree,
}

/// Shape and switches of the network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Architecture {
    pub layers: usize,
    pub max_dim: usize,
    pub hidden_dim: usize,
    pub embed_dim: usize,
    /// Include the coface feature in upper messages; off gives the isotropic variant.
    pub use_coboundaries: bool,
    pub eps_boundary: f64,
    pub eps_upper: f64,
}

impl Architecture {
    pub fn new(layers: usize, max_dim: usize) -> Self {
        Self {
            layers,
            max_dim,
            hidden_dim: 16,
            embed_dim: 32,
            use_coboundaries: true,
            eps_boundary: 0.0,
            eps_upper: 0.0,
        }
    }
}

/// Fully connected layer, weights row-major `outputs x inputs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

/// Uniform on `[-a, a)` from the top 53 bits of one ChaCha8 word.
fn uniform(rng: &mut ChaCha8Rng, a: f64) -> f64 {
    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    a * (2.0 * u - 1.0)
}

impl Dense {
    /// Weights then biases, each uniform on `[-sqrt(1/inputs), sqrt(1/inputs))`.
    fn random(inputs: usize, outputs: usize, rng: &mut ChaCha8Rng) -> Self {
        let a = (1.0 / inputs as f64).sqrt();
        let weights = (0..inputs * outputs).map(|_| uniform(rng, a)).collect();
        let bias = (0..outputs).map(|_| uniform(rng, a)).collect();
        Self {
            inputs,
            outputs,
            weights,
            bias,
        }
    }

    /// `out = W x + b` (no activation).
    fn affine(&self, x: &[f64], out: &mut [f64]) {
        for (o, (row, b)) in out
            .iter_mut()
            .zip(self.weights.chunks_exact(self.inputs).zip(&self.bias))
        {
            *o = b + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
    }

    /// `out = W[:, cols] x` over a column range, no bias.
    fn partial(&self, cols: std::ops::Range<usize>, x: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(self.weights.chunks_exact(self.inputs)) {
            *o = row[cols.clone()]
                .iter()
                .zip(x)
                .map(|(w, v)| w * v)
                .sum::<f64>();
        }
    }
}

fn elu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        x.exp_m1()
    }
}

fn elu_in_place(v: &mut [f64]) {
    for x in v {
        *x = elu(*x);
    }
}

/// Weights of one dimension inside one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct DimParams {
    pub boundary: Dense,
    pub upper: Dense,
    pub message: Dense,
    pub update: Dense,
}

/// Seeded weights for every layer, pooling layer and the projection.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    pub seed: u64,
    pub arch: Architecture,
    pub layers: Vec<Vec<DimParams>>,
    pub pool: Vec<Dense>,
    pub projection: [Dense; 2],
}

impl NetworkParams {
    /// Draws all weights from ChaCha8 seeded with `seed`: layers in order, each
    /// dimension's boundary, upper, message and update layers, then the pooling
    /// layers, then the projection.
    pub fn new(seed: u64, arch: Architecture) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = arch.hidden_dim;
        let message_in = if arch.use_coboundaries { 2 * d } else { d };
        let layers = (0..arch.layers)
            .map(|_| {
                (0..=arch.max_dim)
                    .map(|_| DimParams {
                        boundary: Dense::random(d, d, &mut rng),
                        upper: Dense::random(d, d, &mut rng),
                        message: Dense::random(message_in, d, &mut rng),
                        update: Dense::random(2 * d, d, &mut rng),
                    })
                    .collect()
            })
            .collect();
        let pool = (0..=arch.max_dim)
            .map(|_| Dense::random(d, d, &mut rng))
            .collect();
        let projection = [
            Dense::random(d, d, &mut rng),
            Dense::random(d, arch.embed_dim, &mut rng),
        ];
        Self {
            seed,
            arch,
            layers,
            pool,
            projection,
        }
    }
}

/// Row-major member features, `dim` values per member.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureState {
    pub dim: usize,
    pub values: Vec<f64>,
}

impl FeatureState {
    pub fn row(&self, id: MemberId) -> &[f64] {
        let i = id as usize * self.dim;
        &self.values[i..i + self.dim]
    }
}

/// Base vectors on vertices, then each higher member gets the sum or mean of
/// its boundary, bottom-up.
pub fn init_features(
    cx: &HigherOrderComplex,
    dim: usize,
    mode: Aggregation,
    base: BaseFeature,
) -> FeatureState {
    let mut values = vec![0.0; cx.len() * dim];
    for v in cx.ids_of_dim(0) {
        let x = match base {
            BaseFeature::Ones => 1.0,
            BaseFeature::Degree => cx.coboundary(v).len() as f64,
        };
        values[v as usize * dim..(v as usize + 1) * dim].fill(x);
    }
    for p in 1..=cx.max_dim() {
        for id in cx.ids_of_dim(p) {
            let faces = cx.boundary(id);
            let (lower, upper) = values.split_at_mut(id as usize * dim);
            let row = &mut upper[..dim];
            for &f in faces {
                for (r, x) in row
                    .iter_mut()
                    .zip(&lower[f as usize * dim..(f as usize + 1) * dim])
                {
                    *r += x;
                }
            }
            if mode == Aggregation::Mean && !faces.is_empty() {
                let k = faces.len() as f64;
                row.iter_mut().for_each(|r| *r /= k);
            }
        }
    }
    FeatureState { dim, values }
}

/// Pairwise (cascade) sum of rows `lo..hi` into `out`.
fn pairwise_rows(values: &[f64], dim: usize, lo: usize, hi: usize, out: &mut [f64]) {
    if hi - lo <= 8 {
        out.fill(0.0);
        for r in lo..hi {
            for (o, x) in out.iter_mut().zip(&values[r * dim..(r + 1) * dim]) {
                *o += x;
            }
        }
        return;
    }
    let mid = lo + (hi - lo) / 2;
    let mut right = vec![0.0; dim];
    pairwise_rows(values, dim, lo, mid, out);
    pairwise_rows(values, dim, mid, hi, &mut right);
    for (o, r) in out.iter_mut().zip(&right) {
        *o += r;
    }
}

fn check_finite(values: &[f64], layer: usize, dim: usize) -> Result<(), NetworkError> {
    if values.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(NetworkError::NonFinite { layer, dim })
    }
}

/// One message-passing layer over every dimension.
fn layer(
    cx: &HigherOrderComplex,
    h: &[f64],
    params: &[DimParams],
    arch: &Architecture,
) -> Vec<f64> {
    let d = arch.hidden_dim;
    let mut next = vec![0.0; h.len()];
    for p in 0..=cx.max_dim() {
        let w = &params[p];
        let ids = cx.ids_of_dim(p);
        // Split MLP_M into the tau block (applied on dimension p) and the delta
        // block plus bias (applied on dimension p + 1) so each pair costs one add.
        let lower_ids = ids.clone();
        let tau_part: Vec<f64> = lower_ids
            .flat_map(|t| {
                let mut out = vec![0.0; d];
                w.message
                    .partial(0..d, &h[t as usize * d..(t as usize + 1) * d], &mut out);
                out
            })
            .collect();
        let cofaces = cx.ids_of_dim(p + 1);
        let delta_part: Vec<f64> = if arch.use_coboundaries {
            cofaces
                .clone()
                .flat_map(|c| {
                    let mut out = vec![0.0; d];
                    w.message
                        .partial(d..2 * d, &h[c as usize * d..(c as usize + 1) * d], &mut out);
                    for (o, b) in out.iter_mut().zip(&w.message.bias) {
                        *o += b;
                    }
                    out
                })
                .collect()
        } else {
            Vec::new()
        };
        let (p_start, c_start) = (ids.start as usize, cofaces.start as usize);

        let block = &mut next[ids.start as usize * d..ids.end as usize * d];
        block
            .par_chunks_mut(TASK * d)
            .enumerate()
            .for_each(|(chunk, rows)| {
                let mut xb = vec![0.0; d];
                let mut xu = vec![0.0; d];
                let mut agg = vec![0.0; d];
                let mut msg = vec![0.0; d];
                let mut cat = vec![0.0; 2 * d];
                for (k, row) in rows.chunks_exact_mut(d).enumerate() {
                    let sigma = (p_start + chunk * TASK + k) as MemberId;
                    let hs = &h[sigma as usize * d..(sigma as usize + 1) * d];

                    for (x, v) in xb.iter_mut().zip(hs) {
                        *x = (1.0 + arch.eps_boundary) * v;
                    }
                    for &tau in cx.boundary(sigma) {
                        for (x, v) in xb
                            .iter_mut()
                            .zip(&h[tau as usize * d..(tau as usize + 1) * d])
                        {
                            *x += v;
                        }
                    }
                    w.boundary.affine(&xb, &mut cat[..d]);
                    elu_in_place(&mut cat[..d]);

                    agg.fill(0.0);
                    for (tau, delta) in cx.upper_adjacent(sigma) {
                        let t = &tau_part[(tau as usize - p_start) * d..][..d];
                        if arch.use_coboundaries {
                            let c = &delta_part[(delta as usize - c_start) * d..][..d];
                            for ((m, a), b) in msg.iter_mut().zip(t).zip(c) {
                                *m = elu(a + b);
                            }
                        } else {
                            for ((m, a), b) in msg.iter_mut().zip(t).zip(&w.message.bias) {
                                *m = elu(a + b);
                            }
                        }
                        for (g, m) in agg.iter_mut().zip(&msg) {
                            *g += m;
                        }
                    }
                    for ((x, v), g) in xu.iter_mut().zip(hs).zip(&agg) {
                        *x = (1.0 + arch.eps_upper) * v + g;
                    }
                    w.upper.affine(&xu, &mut cat[d..]);
                    elu_in_place(&mut cat[d..]);

                    w.update.affine(&cat, row);
                    elu_in_place(row);
                }
            });
    }
    next
}

fn check_shapes(
    cx: &HigherOrderComplex,
    features: &FeatureState,
    arch: &Architecture,
) -> Result<(), NetworkError> {
    let d = arch.hidden_dim;
    if cx.max_dim() != arch.max_dim {
        return Err(NetworkError::Shape(format!(
            "complex has max dimension {}, network expects {}",
            cx.max_dim(),
            arch.max_dim
        )));
    }
    if features.dim != d || features.values.len() != cx.len() * d {
        return Err(NetworkError::Shape(format!(
            "features have width {}, network expects {d}",
            features.dim
        )));
    }
    Ok(())
}

/// Per-dimension pooling, sum readout and the two-layer projection.
fn readout(
    cx: &HigherOrderComplex,
    h: &[f64],
    params: &NetworkParams,
) -> Result<Vec<f64>, NetworkError> {
    let arch = &params.arch;
    let d = arch.hidden_dim;
    let mut sum = vec![0.0; d];
    let mut pooled = vec![0.0; d];
    let mut dense = vec![0.0; d];
    for p in 0..=cx.max_dim() {
        let ids = cx.ids_of_dim(p);
        pairwise_rows(h, d, ids.start as usize, ids.end as usize, &mut pooled);
        params.pool[p].affine(&pooled, &mut dense);
        elu_in_place(&mut dense);
        for (r, x) in sum.iter_mut().zip(&dense) {
            *r += x;
        }
    }
    let mut hidden = vec![0.0; d];
    params.projection[0].affine(&sum, &mut hidden);
    elu_in_place(&mut hidden);
    let mut out = vec![0.0; arch.embed_dim];
    params.projection[1].affine(&hidden, &mut out);
    check_finite(&out, params.layers.len(), cx.max_dim())?;
    Ok(out)
}

/// Runs the network and returns the graph embedding.
pub fn forward(
    cx: &HigherOrderComplex,
    features: &FeatureState,
    params: &NetworkParams,
) -> Result<Vec<f64>, NetworkError> {
    Ok(forward_depths(cx, features, std::slice::from_ref(params))?
        .pop()
        .unwrap())
}

/// Embeddings of several networks that differ only in depth, sharing the
/// message passing: all of them must come from the same seed and shape, so
/// the shallower ones' layers are a prefix of the deepest one's.
pub fn forward_depths(
    cx: &HigherOrderComplex,
    features: &FeatureState,
    params: &[NetworkParams],
) -> Result<Vec<Vec<f64>>, NetworkError> {
    let Some(deepest) = params.iter().max_by_key(|p| p.layers.len()) else {
        return Ok(Vec::new());
    };
    let arch = &deepest.arch;
    for p in params {
        let same_shape = Architecture {
            layers: arch.layers,
            ..p.arch
        } == *arch;
        if p.seed != deepest.seed || !same_shape {
            return Err(NetworkError::Shape(
                "networks must share seed and shape apart from depth".into(),
            ));
        }
    }
    check_shapes(cx, features, arch)?;
    let d = arch.hidden_dim;
    let mut out = vec![Vec::new(); params.len()];
    let mut h = features.values.clone();
    for t in 0..=deepest.layers.len() {
        for (slot, p) in out.iter_mut().zip(params) {
            if p.layers.len() == t {
                *slot = readout(cx, &h, p)?;
            }
        }
        if t == deepest.layers.len() {
            break;
        }
        h = layer(cx, &h, &deepest.layers[t], arch);
        for p in 0..=cx.max_dim() {
            let ids = cx.ids_of_dim(p);
            check_finite(&h[ids.start as usize * d..ids.end as usize * d], t, p)?;
        }
    }
    Ok(out)
}

pub fn embedding_distance(a: &[f64], b: &[f64]) -> Result<f64, NetworkError> {
    if a.len() != b.len() {
        return Err(NetworkError::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{lift, lift_path_complex, BoundaryMode, LiftSpec};
    use crate::graph::SimpleGraph;

    #[test]
    fn init_features_by_hand() {
        let g = SimpleGraph::path(4);
        let trunc = lift(
            &g,
            &LiftSpec::path(2).with_boundary_mode(BoundaryMode::Truncation),
        )
        .unwrap();
        let f = init_features(&trunc, 1, Aggregation::Sum, BaseFeature::Ones);
        let by_dim = |cx: &HigherOrderComplex, f: &FeatureState, p| -> Vec<f64> {
            cx.ids_of_dim(p).map(|id| f.row(id)[0]).collect()
        };
        assert_eq!(by_dim(&trunc, &f, 1), [2.0; 3]);
        assert_eq!(by_dim(&trunc, &f, 2), [4.0; 2]);

        // No skip-edges in a path graph, so incidence mode gives the same values.
        let inc = lift_path_complex(&g, 2).unwrap();
        let f = init_features(&inc, 1, Aggregation::Sum, BaseFeature::Ones);
        assert_eq!(by_dim(&inc, &f, 2), [4.0; 2]);

        let k4 = lift_path_complex(&SimpleGraph::complete(4), 3).unwrap();
        let f = init_features(&k4, 3, Aggregation::Sum, BaseFeature::Ones);
        assert_eq!(f.row(k4.ids_of_dim(2).start), [6.0; 3]);
        let f = init_features(&k4, 3, Aggregation::Mean, BaseFeature::Ones);
        assert!(f.values.iter().all(|&x| x == 1.0));
        let f = init_features(&k4, 2, Aggregation::Sum, BaseFeature::Degree);
        assert_eq!(f.row(0), [3.0, 3.0]);
    }

    #[test]
    fn seeded_params_are_reproducible() {
        let arch = Architecture::new(3, 2);
        assert_eq!(NetworkParams::new(7, arch), NetworkParams::new(7, arch));
        assert_ne!(NetworkParams::new(7, arch), NetworkParams::new(8, arch));
        let p = NetworkParams::new(0, arch);
        let bound = (1.0f64 / 32.0).sqrt();
        assert!(p.layers[0][0]
            .update
            .weights
            .iter()
            .all(|w| w.abs() <= bound));
    }

    #[test]
    fn shallower_networks_share_the_first_layers() {
        let deep = NetworkParams::new(5, Architecture::new(6, 3));
        for l in 0..6 {
            let p = NetworkParams::new(5, Architecture::new(l, 3));
            assert_eq!(p.layers[..], deep.layers[..l]);
        }
    }

    #[test]
    fn depth_readouts_match_single_runs() {
        let cx = lift_path_complex(&SimpleGraph::cycle(6), 3).unwrap();
        let f = init_features(&cx, 16, Aggregation::Sum, BaseFeature::Ones);
        let params: Vec<_> = [5, 2, 6, 0, 2]
            .iter()
            .map(|&l| NetworkParams::new(11, Architecture::new(l, 3)))
            .collect();
        let joint = forward_depths(&cx, &f, &params).unwrap();
        for (p, e) in params.iter().zip(&joint) {
            assert_eq!(*e, forward(&cx, &f, p).unwrap());
        }
        let other_seed = [
            params[0].clone(),
            NetworkParams::new(12, Architecture::new(3, 3)),
        ];
        assert!(matches!(
            forward_depths(&cx, &f, &other_seed),
            Err(NetworkError::Shape(_))
        ));
    }

    #[test]
    fn forward_is_deterministic() {
        let cx = lift_path_complex(&SimpleGraph::cycle(5), 2).unwrap();
        let f = init_features(&cx, 16, Aggregation::Sum, BaseFeature::Ones);
        let params = NetworkParams::new(3, Architecture::new(2, 2));
        let a = forward(&cx, &f, &params).unwrap();
        let b = forward(&cx, &f, &params).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 32);
    }

    #[test]
    fn zero_layers_is_projection_of_pooled_init() {
        let cx = lift_path_complex(&SimpleGraph::path(3), 1).unwrap();
        let f = init_features(&cx, 16, Aggregation::Sum, BaseFeature::Ones);
        let params = NetworkParams::new(1, Architecture::new(0, 1));
        let out = forward(&cx, &f, &params).unwrap();

        let mut readout = vec![0.0; 16];
        for p in 0..=1 {
            let mut pooled = vec![0.0; 16];
            for id in cx.ids_of_dim(p) {
                for (s, x) in pooled.iter_mut().zip(f.row(id)) {
                    *s += x;
                }
            }
            let mut z = vec![0.0; 16];
            params.pool[p].affine(&pooled, &mut z);
            for (r, x) in readout.iter_mut().zip(&z) {
                *r += elu(*x);
            }
        }
        let mut hidden = vec![0.0; 16];
        params.projection[0].affine(&readout, &mut hidden);
        elu_in_place(&mut hidden);
        let mut expected = vec![0.0; 32];
        params.projection[1].affine(&hidden, &mut expected);
        for (a, b) in out.iter().zip(&expected) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn shape_errors() {
        let cx = lift_path_complex(&SimpleGraph::path(3), 1).unwrap();
        let f = init_features(&cx, 16, Aggregation::Sum, BaseFeature::Ones);
        let params = NetworkParams::new(1, Architecture::new(1, 2));
        assert!(matches!(
            forward(&cx, &f, &params),
            Err(NetworkError::Shape(_))
        ));
        let f8 = init_features(&cx, 8, Aggregation::Sum, BaseFeature::Ones);
        let params = NetworkParams::new(1, Architecture::new(1, 1));
        assert!(matches!(
            forward(&cx, &f8, &params),
            Err(NetworkError::Shape(_))
        ));
    }

    #[test]
    fn overflow_is_reported() {
        let cx = lift_path_complex(&SimpleGraph::complete(4), 1).unwrap();
        let mut f = init_features(&cx, 16, Aggregation::Sum, BaseFeature::Ones);
        f.values.fill(f64::MAX);
        let params = NetworkParams::new(1, Architecture::new(1, 1));
        assert!(matches!(
            forward(&cx, &f, &params),
            Err(NetworkError::NonFinite { layer: 0, .. })
        ));
    }

    #[test]
    fn distances() {
        assert_eq!(embedding_distance(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        let mut e1 = vec![0.0; 32];
        e1[0] = 3.0;
        e1[1] = 4.0;
        assert_eq!(embedding_distance(&e1, &[0.0; 32]).unwrap(), 5.0);
        assert!(embedding_distance(&[1.0], &[1.0, 2.0]).is_err());
    }
}
