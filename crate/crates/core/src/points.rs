//! Quadrature node sets on the unit cube.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use std::path::Path;

/// How a node set was produced; part of the deterministic-report contract.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    /// Rank-1 lattice with generating vector `(1, a, a², ...) mod n`.
    Lattice,
    Uniform { seed: u64 },
    Explicit,
}

#[derive(Clone, Debug)]
pub struct PointSet {
    pub d: u32,
    pub nodes: Vec<Vec<f64>>,
    pub generator: Generator,
}

/// Korobov parameter of the default lattice.
const KOROBOV_A: u64 = 5;

impl PointSet {
    /// Rank-1 lattice rule with `n` nodes.
    pub fn lattice(d: u32, n: usize) -> Result<PointSet> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidArgument(
                "need at least one node and one dimension".into(),
            ));
        }
        let mut z = Vec::with_capacity(d as usize);
        let mut a_pow = 1u64;
        for _ in 0..d {
            z.push(a_pow % n as u64);
            a_pow = (a_pow * KOROBOV_A) % n as u64;
        }
        let nodes = (0..n)
            .map(|i| {
                z.iter()
                    .map(|&zj| (i as u64 * zj % n as u64) as f64 / n as f64)
                    .collect()
            })
            .collect();
        Ok(PointSet {
            d,
            nodes,
            generator: Generator::Lattice,
        })
    }

    /// Independent uniform nodes from a fixed-seed generator.
    pub fn uniform(d: u32, n: usize, seed: u64) -> Result<PointSet> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidArgument(
                "need at least one node and one dimension".into(),
            ));
        }
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let nodes = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect();
        Ok(PointSet {
            d,
            nodes,
            generator: Generator::Uniform { seed },
        })
    }

    pub fn explicit(d: u32, nodes: Vec<Vec<f64>>) -> Result<PointSet> {
        for node in &nodes {
            if node.len() != d as usize {
                return Err(Error::DimensionMismatch(node.len() as u32, d));
            }
        }
        if nodes.is_empty() {
            return Err(Error::InvalidArgument("need at least one node".into()));
        }
        Ok(PointSet {
            d,
            nodes,
            generator: Generator::Explicit,
        })
    }

    /// Loads nodes from plain text: one node per line, coordinates separated
    /// by whitespace, `#` comments allowed.
    pub fn from_file(d: u32, path: &Path) -> Result<PointSet> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let mut nodes = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let coords: std::result::Result<Vec<f64>, _> =
                line.split_whitespace().map(str::parse::<f64>).collect();
            let coords = coords.map_err(|e| {
                Error::Parse(format!("line {}: {e}", lineno + 1))
            })?;
            nodes.push(coords);
        }
        PointSet::explicit(d, nodes)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// First `n` nodes, keeping the generator tag.
    pub fn prefix(&self, n: usize) -> PointSet {
        PointSet {
            d: self.d,
            nodes: self.nodes[..n.min(self.nodes.len())].to_vec(),
            generator: self.generator.clone(),
        }
    }
}
