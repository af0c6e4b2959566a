//! The space `B`: an `ℓˢ` sum of finite-dimensional `ℓ^∞` blocks.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sequences::LacunaryPair;

/// Validates an exponent for the outer `ℓˢ` sum.
pub fn check_exponent(s: f64) -> Result<f64> {
    if s.is_finite() && s >= 2.0 {
        Ok(s)
    } else {
        Err(Error::InvalidExponent(s))
    }
}

/// `(Σ_k a_k^s)^{1/s}` for nonnegative block maxima `a_k`.
///
/// The sum is taken relative to the largest term so that large `s` neither
/// overflows nor flushes small maxima to zero.
pub fn ls_aggregate(maxima: &[f64], s: f64) -> f64 {
    let top = maxima.iter().copied().fold(0.0f64, f64::max);
    if top == 0.0 || !top.is_finite() {
        return top;
    }
    let sum: f64 = maxima.iter().map(|&a| (a / top).powf(s)).sum();
    top * sum.powf(1.0 / s)
}

/// Block shapes and the exponent `s`; vectors only combine within one space.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpace {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    s: f64,
}

impl BlockSpace {
    pub fn new(sizes: Vec<usize>, s: f64) -> Result<Arc<Self>> {
        let s = check_exponent(s)?;
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &n in &sizes {
            acc += n;
            offsets.push(acc);
        }
        Ok(Arc::new(Self { sizes, offsets, s }))
    }

    pub fn for_pair(pair: &LacunaryPair, s: f64) -> Result<Arc<Self>> {
        Self::new(pair.blocks().iter().map(Vec::len).collect(), s)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn block_count(&self) -> usize {
        self.sizes.len()
    }

    /// Total number of scalar components.
    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn block_range(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }

    /// Norm of a flat component slice laid out like this space.
    pub fn norm_of(&self, flat: &[f64]) -> f64 {
        debug_assert_eq!(flat.len(), self.dim());
        let maxima: Vec<f64> = (0..self.block_count())
            .map(|k| flat[self.block_range(k)].iter().fold(0.0f64, |a, &b| a.max(b.abs())))
            .collect();
        ls_aggregate(&maxima, self.s)
    }
}

/// An element of `B`, stored as a flat vector of block components.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector {
    space: Arc<BlockSpace>,
    data: Vec<f64>,
}

impl BlockVector {
    pub fn zeros(space: Arc<BlockSpace>) -> Self {
        let data = vec![0.0; space.dim()];
        Self { space, data }
    }

    pub fn from_blocks(space: Arc<BlockSpace>, blocks: &[Vec<f64>]) -> Result<Self> {
        if blocks.len() != space.block_count()
            || blocks.iter().zip(space.sizes()).any(|(b, &n)| b.len() != n)
        {
            return Err(Error::ShapeMismatch);
        }
        let data = blocks.concat();
        Ok(Self { space, data })
    }

    pub fn from_flat(space: Arc<BlockSpace>, data: Vec<f64>) -> Result<Self> {
        if data.len() != space.dim() {
            return Err(Error::ShapeMismatch);
        }
        Ok(Self { space, data })
    }

    pub fn space(&self) -> &Arc<BlockSpace> {
        &self.space
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn block(&self, k: usize) -> &[f64] {
        &self.data[self.space.block_range(k)]
    }

    pub fn blocks(&self) -> Vec<Vec<f64>> {
        (0..self.space.block_count()).map(|k| self.block(k).to_vec()).collect()
    }

    /// `(Σ_k (max_{m ∈ block k} |b_m|)^s)^{1/s}`; empty blocks contribute 0.
    pub fn norm(&self) -> f64 {
        self.space.norm_of(&self.data)
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) || self.space == other.space {
            Ok(())
        } else {
            Err(Error::ShapeMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { space: self.space.clone(), data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { space: self.space.clone(), data })
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { space: self.space.clone(), data: self.data.iter().map(|v| c * v).collect() }
    }

    /// In-place `self += c · other`.
    pub fn axpy(&mut self, c: f64, other: &Self) -> Result<()> {
        self.same_space(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
        Ok(())
    }
}

/// Norm of a vector: free-function form.
pub fn b_norm(v: &BlockVector) -> f64 {
    v.norm()
}

pub fn b_add(u: &BlockVector, v: &BlockVector) -> Result<BlockVector> {
    u.add(v)
}

pub fn b_scale(c: f64, v: &BlockVector) -> BlockVector {
    v.scale(c)
}
