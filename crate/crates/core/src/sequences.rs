//! Lacunary sequences and the block index sets `{m ∈ M : n_k ≤ m ≤ n_{k+1}}`.
//!
//! Blocks are numbered from 1 in the mathematical notation; in code block
//! `k` lives at index `k - 1` and is bounded by `n.values()[k - 1]` and
//! `n.values()[k]`. Both endpoints are inclusive, so an element of `M` that
//! coincides with some `n_k` belongs to two consecutive blocks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack applied to every `ratio >= alpha` comparison.
pub const RATIO_SLACK: f64 = 1e-12;

/// Checks that `values` is lacunary with constant `alpha`.
///
/// Returns `Ok(false)` when the sequence is increasing but some consecutive
/// ratio falls below `alpha`; non-increasing input and `alpha <= 1` are errors.
pub fn validate_lacunary(values: &[u64], alpha: f64) -> Result<bool> {
    check_shape(values)?;
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::InvalidRatio(alpha));
    }
    Ok(first_violation(values, alpha).is_none())
}

fn check_shape(values: &[u64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::EmptySequence);
    }
    if values[0] == 0 {
        return Err(Error::NonPositive);
    }
    if let Some(i) = values.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::NotIncreasing { index: i + 1 });
    }
    Ok(())
}

fn first_violation(values: &[u64], alpha: f64) -> Option<(usize, f64)> {
    values.windows(2).enumerate().find_map(|(i, w)| {
        let ratio = w[1] as f64 / w[0] as f64;
        (ratio < alpha - RATIO_SLACK).then_some((i + 1, ratio))
    })
}

/// Strictly increasing positive integers whose consecutive ratios are all at
/// least `ratio_bound > 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LacunarySequence {
    values: Vec<u64>,
    ratio_bound: f64,
}

impl LacunarySequence {
    pub fn new(values: Vec<u64>, alpha: f64) -> Result<Self> {
        if !validate_lacunary(&values, alpha)? {
            let (index, ratio) = first_violation(&values, alpha).expect("violation exists");
            return Err(Error::NotLacunary { index, ratio, alpha });
        }
        Ok(Self { values, ratio_bound: alpha })
    }

    /// Certifies the sequence with the smallest consecutive ratio it has.
    /// A single-term sequence gets the bound 2.
    pub fn with_min_ratio(values: Vec<u64>) -> Result<Self> {
        check_shape(&values)?;
        let alpha = values
            .windows(2)
            .map(|w| w[1] as f64 / w[0] as f64)
            .fold(f64::INFINITY, f64::min);
        let alpha = if alpha.is_finite() { alpha } else { 2.0 };
        Self::new(values, alpha)
    }

    /// `first · base^j` for `j = 0..count`.
    pub fn geometric(base: u64, first: u64, count: usize) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidRatio(base as f64));
        }
        let mut values = Vec::with_capacity(count);
        let mut v = first;
        for j in 0..count {
            values.push(v);
            if j + 1 < count {
                v = v
                    .checked_mul(base)
                    .ok_or_else(|| crate::error::invalid("geometric sequence overflows u64"))?;
            }
        }
        Self::new(values, base as f64)
    }

    /// Maps every term `t` to `2^t`, for the dyadic-exponent operator.
    pub fn exponentiate(&self) -> Result<Self> {
        let values = self
            .values
            .iter()
            .map(|&t| if t < 63 { Ok(1u64 << t) } else { Err(Error::ExponentOverflow(t)) })
            .collect::<Result<Vec<_>>>()?;
        Self::with_min_ratio(values)
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn ratio_bound(&self) -> f64 {
        self.ratio_bound
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `ρ/(ρ-1)` for the certified ratio `ρ`.
    pub fn tail_constant(&self) -> f64 {
        self.ratio_bound / (self.ratio_bound - 1.0)
    }
}

/// `Σ 1/t` over the terms `t ≥ y`.
pub fn lacunary_tail_sum(seq: &LacunarySequence, y: f64) -> f64 {
    seq.values
        .iter()
        .rev()
        .take_while(|&&t| t as f64 >= y)
        .map(|&t| 1.0 / t as f64)
        .sum()
}

/// The two sequences of the oscillation operator and their block structure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LacunaryPair {
    n: LacunarySequence,
    m_set: LacunarySequence,
    blocks: Vec<Vec<u64>>,
}

/// Builds the pair with blocks `1..=k_max`; empty blocks are kept.
pub fn build_blocks(
    n: LacunarySequence,
    m_set: LacunarySequence,
    k_max: usize,
) -> Result<LacunaryPair> {
    let available = n.len().saturating_sub(1);
    if k_max > available {
        return Err(Error::BlockCount { k_max, available });
    }
    let blocks = (0..k_max)
        .map(|k| {
            let (lo, hi) = (n.values[k], n.values[k + 1]);
            m_set.values.iter().copied().filter(|&m| lo <= m && m <= hi).collect()
        })
        .collect();
    Ok(LacunaryPair { n, m_set, blocks })
}

impl LacunaryPair {
    pub fn n(&self) -> &LacunarySequence {
        &self.n
    }

    pub fn m_set(&self) -> &LacunarySequence {
        &self.m_set
    }

    pub fn blocks(&self) -> &[Vec<u64>] {
        &self.blocks
    }

    pub fn k_max(&self) -> usize {
        self.blocks.len()
    }

    /// Left endpoint `n_k` of block index `k` (zero-based).
    pub fn base(&self, k: usize) -> u64 {
        self.n.values[k]
    }

    /// Every length the truncated operator averages over, sorted and
    /// deduplicated: the block bases `n_1..n_{k_max}` and the block members.
    pub fn lengths(&self) -> Vec<u64> {
        let mut out: Vec<u64> = (0..self.k_max())
            .map(|k| self.base(k))
            .chain(self.blocks.iter().flatten().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Largest averaging length; zero when there are no blocks.
    pub fn max_length(&self) -> u64 {
        self.lengths().last().copied().unwrap_or(0)
    }

    /// Index plan mapping each block onto positions in [`Self::lengths`].
    pub fn plan(&self) -> BlockPlan {
        let lengths = self.lengths();
        let pos = |v: u64| lengths.binary_search(&v).expect("length present");
        let blocks = (0..self.k_max())
            .map(|k| PlanBlock {
                base: pos(self.base(k)),
                members: self.blocks[k].iter().map(|&m| pos(m)).collect(),
            })
            .collect();
        BlockPlan { lengths, blocks }
    }

    /// Lower bounds for `n_k`, `k > k_max`, used by truncation tails: the
    /// listed terms from `n_{k_max+1}` on, then `extrapolate` further terms
    /// grown by the certified ratio.
    pub fn bases_beyond(&self, extrapolate: usize) -> Vec<f64> {
        let listed = &self.n.values[self.k_max()..];
        let mut out: Vec<f64> = listed.iter().map(|&v| v as f64).collect();
        let mut last = *out.last().expect("at least n_{k_max+1} exists");
        for _ in 0..extrapolate {
            last *= self.n.ratio_bound;
            out.push(last);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanBlock {
    pub base: usize,
    pub members: Vec<usize>,
}

/// Flattened block structure: distinct lengths plus, per block, the index of
/// its base `n_k` and of each member `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPlan {
    pub lengths: Vec<u64>,
    pub blocks: Vec<PlanBlock>,
}

impl BlockPlan {
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.members.len()).collect()
    }
}

/// Sequence source as written in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceSpec {
    List { values: Vec<u64>, alpha: Option<f64> },
    Geometric { base: u64, first: u64, count: usize },
}

impl SequenceSpec {
    pub fn build(&self) -> Result<LacunarySequence> {
        match self {
            SequenceSpec::List { values, alpha: Some(a) } => LacunarySequence::new(values.clone(), *a),
            SequenceSpec::List { values, alpha: None } => LacunarySequence::with_min_ratio(values.clone()),
            SequenceSpec::Geometric { base, first, count } => {
                LacunarySequence::geometric(*base, *first, *count)
            }
        }
    }
}
