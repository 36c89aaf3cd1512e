//! Recursive-matrix (RMAT) graph generation.
//!
//! Every edge is placed by descending the adjacency matrix one quadrant at a
//! time with probabilities `[a, b, c, d]` until a single cell remains. Loops
//! and repeated cells are redrawn so the realized edge count matches the
//! target whenever the redraw budget allows.

use rand::{Rng, RngCore};
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{largest_component, Graph, NodeId};
use crate::seed;

/// Draw attempts allowed per requested edge.
pub const REDRAW_FACTOR: u64 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmatParams {
    /// Requested node count; the matrix side is this rounded up to a power of two.
    pub n_target: u64,
    /// Requested number of distinct undirected edges.
    pub e_target: u64,
    /// Quadrant probabilities `[a, b, c, d]`.
    pub r: [f64; 4],
}

impl RmatParams {
    pub fn validate(&self) -> Result<()> {
        let sum: f64 = self.r.iter().sum();
        if self.r.iter().any(|&p| !(p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParams(format!(
                "r = {:?} is not a probability vector",
                self.r
            )));
        }
        if (self.r[1] - self.r[2]).abs() > 1e-12 {
            return Err(Error::InvalidParams("r must satisfy b = c".into()));
        }
        if self.e_target < 1 || self.n_target < 2 {
            return Err(Error::InvalidParams(format!(
                "need e_target >= 1 and n_target >= 2 (got {}, {})",
                self.e_target, self.n_target
            )));
        }
        if self.n_target > 1 << 31 {
            return Err(Error::InvalidParams("n_target exceeds 2^31".into()));
        }
        Ok(())
    }

    /// Largest component minus smallest component of `r`.
    pub fn skew(&self) -> f64 {
        let max = self.r.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.r.iter().cloned().fold(f64::MAX, f64::min);
        max - min
    }

    pub fn matrix_side(&self) -> u64 {
        self.n_target.next_power_of_two()
    }
}

/// Distribution the dataset builder samples RMAT parameters from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParamDistribution {
    /// Inclusive range of requested edges, sampled log-uniformly.
    pub edge_range: [f64; 2],
    /// Range of requested edges per node, sampled log-uniformly. The default
    /// `[1, 32]` corresponds to mean degrees between 2 and 64.
    pub edge_node_ratio: [f64; 2],
    /// Range of `max(r) - min(r)`, sampled uniformly; must lie in `[0, 1)`.
    pub skew_range: [f64; 2],
}

impl Default for ParamDistribution {
    fn default() -> Self {
        ParamDistribution {
            edge_range: [1e3, 1e6],
            edge_node_ratio: [1.0, 32.0],
            skew_range: [0.0, 0.9],
        }
    }
}

impl ParamDistribution {
    pub fn validate(&self) -> Result<()> {
        let ordered = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] <= r[1];
        if !ordered(self.edge_range) || self.edge_range[0] < 1.0 {
            return Err(Error::InvalidParams("edge_range must be ordered and >= 1".into()));
        }
        if !ordered(self.edge_node_ratio) || self.edge_node_ratio[0] <= 0.0 {
            return Err(Error::InvalidParams(
                "edge_node_ratio must be ordered and positive".into(),
            ));
        }
        if !ordered(self.skew_range) || self.skew_range[0] < 0.0 || self.skew_range[1] >= 1.0 {
            return Err(Error::InvalidParams("skew_range must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

fn log_uniform<R: Rng>(rng: &mut R, [lo, hi]: [f64; 2]) -> f64 {
    if lo == hi {
        return lo;
    }
    (rng.random_range(lo.ln()..=hi.ln())).exp().clamp(lo, hi)
}

/// Smallest node count whose simple graph holds at least `2 * edges` pairs,
/// which keeps the redraw loop away from saturation.
fn min_nodes_for(edges: u64) -> u64 {
    let pairs = 4.0 * edges as f64;
    let n = (1.0 + (1.0 + 4.0 * pairs).sqrt()) / 2.0;
    (n.ceil() as u64).max(2)
}

/// Quadrant vector with `b = c`, `a - d = skew` and `a >= b >= d`.
pub fn r_from_skew(skew: f64, position: f64) -> [f64; 4] {
    // d ranges over [max(0, (1 - 3s)/4), (1 - s)/4]; `position` in [0, 1] picks
    // the point inside that interval.
    let lo = ((1.0 - 3.0 * skew) / 4.0).max(0.0);
    let hi = (1.0 - skew) / 4.0;
    let d = lo + (hi - lo) * position.clamp(0.0, 1.0);
    let a = d + skew;
    let b = (1.0 - a - d) / 2.0;
    let sum = a + 2.0 * b + d;
    [a / sum, b / sum, b / sum, d / sum]
}

pub fn sample_params(dist: &ParamDistribution, seed: u64) -> Result<RmatParams> {
    dist.validate()?;
    let mut rng = seed::rng_for(seed, &[b"params"]);
    let e_target = log_uniform(&mut rng, dist.edge_range).round().max(1.0) as u64;
    let ratio = log_uniform(&mut rng, dist.edge_node_ratio);
    let n_target = ((e_target as f64 / ratio).round() as u64).max(min_nodes_for(e_target));
    let [s_lo, s_hi] = dist.skew_range;
    let skew = if s_lo == s_hi {
        s_lo
    } else {
        rng.random_range(s_lo..s_hi)
    };
    let position: f64 = rng.random();
    let params = RmatParams {
        n_target,
        e_target,
        r: r_from_skew(skew, position),
    };
    params.validate()?;
    Ok(params)
}

/// Distinct non-loop edges drawn by RMAT, before any component extraction.
///
/// Returns the matrix side (node count) and the sorted edge list.
pub fn rmat_edges(p: &RmatParams, seed: u64) -> Result<(usize, Vec<(NodeId, NodeId)>)> {
    p.validate()?;
    let side = p.matrix_side();
    let levels = side.trailing_zeros();
    let target = p.e_target as usize;
    let budget = (REDRAW_FACTOR * p.e_target) as usize;
    // Quadrant thresholds on 16-bit draws; one 64-bit word covers four levels.
    let scale = |x: f64| (x * 65_536.0).round() as u64;
    let (ta, tb, tc) = (scale(p.r[0]), scale(p.r[0] + p.r[1]), scale(p.r[0] + p.r[1] + p.r[2]));

    let mut rng = seed::rng_for(seed, &[b"rmat"]);
    let mut seen = FxHashSet::with_capacity_and_hasher(target, Default::default());
    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(target);
    let mut attempts = 0;
    while edges.len() < target && attempts < budget {
        attempts += 1;
        let (mut row, mut col, mut word) = (0u64, 0u64, 0u64);
        for level in 0..levels {
            if level % 4 == 0 {
                word = rng.next_u64();
            }
            let x = word & 0xffff;
            word >>= 16;
            // a: x < ta, b: x < tb, c: x < tc, else d. Branch-free.
            let dr = (x >= tb) as u64;
            let dc = ((x >= ta) & (x < tb)) as u64 | (x >= tc) as u64;
            row = (row << 1) | dr;
            col = (col << 1) | dc;
        }
        if row == col {
            continue;
        }
        let (u, v) = (row.min(col), row.max(col));
        if seen.insert((u << 32) | v) {
            edges.push((u as NodeId, v as NodeId));
        }
    }
    let needed = ((target as f64 * 0.5).ceil() as usize).max(1);
    if edges.len() < needed {
        return Err(Error::DegenerateParams {
            produced: edges.len(),
            target,
            attempts,
        });
    }
    edges.sort_unstable();
    Ok((side as usize, edges))
}

/// Generates an RMAT graph and reduces it to its largest component.
pub fn generate_rmat(p: &RmatParams, seed: u64) -> Result<Graph> {
    let (side, edges) = rmat_edges(p, seed)?;
    largest_component(&Graph::from_sorted_unique(side, edges))
}
