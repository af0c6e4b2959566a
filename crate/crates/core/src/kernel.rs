//! The `B`-valued kernel
//!
//! ```text
//! K(x) = ( ( φ_m(x) − φ_{n_k}(x) : m ∈ M, n_k ≤ m ≤ n_{k+1} ) : k ≥ 1 ),   φ_ℓ = (1/ℓ) χ_[0,ℓ]
//! ```
//!
//! and exact evaluation of its regularity integrals. `x ↦ K(x − y) − K(x)` is
//! constant between consecutive points of `{0, y} ∪ {ℓ, ℓ + y}`, so integrals
//! over any union of intervals with those endpoints are finite sums.

use std::sync::Arc;

use crate::block_space::{BlockSpace, BlockVector};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::oscillation::OscillationConfig;

pub const DEFAULT_CUTOFF: f64 = 4.0;

#[derive(Debug, Clone)]
pub struct OscillationKernel {
    space: Arc<BlockSpace>,
    /// `(m, n_k)` per component, in block order.
    components: Vec<(f64, f64)>,
    lengths: Vec<f64>,
    m_ratio: f64,
    n_ratio: f64,
}

/// A maximal interval on which the difference norm is constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub value: f64,
}

impl Segment {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.start + self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HormanderIntegral {
    pub total: f64,
    /// Part of the integral over `x > 0`.
    pub positive_side: f64,
    /// Part of the integral over `x < 0`.
    pub negative_side: f64,
}

fn phi(len: f64, x: f64) -> f64 {
    if (0.0..=len).contains(&x) {
        1.0 / len
    } else {
        0.0
    }
}

fn check_shift(y: f64) -> Result<()> {
    if y == 0.0 || !y.is_finite() {
        Err(crate::error::invalid(format!("shift y must be finite and nonzero, got {y}")))
    } else {
        Ok(())
    }
}

impl OscillationKernel {
    pub fn new(cfg: &OscillationConfig) -> Self {
        let unit = cfg.unit();
        let pair = cfg.pair();
        let components = pair
            .blocks()
            .iter()
            .enumerate()
            .flat_map(|(k, block)| {
                let base = cfg.base_length(k);
                block.iter().map(move |&m| (m as f64 * unit, base))
            })
            .collect();
        Self {
            space: cfg.space().clone(),
            components,
            lengths: cfg.lengths().to_vec(),
            m_ratio: pair.m_set().ratio_bound(),
            n_ratio: pair.n().ratio_bound(),
        }
    }

    pub fn space(&self) -> &Arc<BlockSpace> {
        &self.space
    }

    /// Right end of the kernel's support.
    pub fn support_end(&self) -> f64 {
        self.lengths.last().copied().unwrap_or(0.0)
    }

    /// `C(α) + C(β)` with `C(ρ) = ρ/(ρ−1)`: the geometric-series ceiling for
    /// the Hörmander integral at cutoff 4.
    pub fn hormander_ceiling(&self) -> f64 {
        self.m_ratio / (self.m_ratio - 1.0) + self.n_ratio / (self.n_ratio - 1.0)
    }

    fn flat_at(&self, x: f64, out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.components.iter().map(|&(m, n)| phi(m, x) - phi(n, x)));
    }

    /// `K(x)`.
    pub fn kernel_at(&self, x: f64) -> BlockVector {
        let mut flat = Vec::with_capacity(self.components.len());
        self.flat_at(x, &mut flat);
        BlockVector::from_flat(self.space.clone(), flat).expect("component layout")
    }

    /// `‖K(x − y) − K(x)‖_B`.
    pub fn kernel_difference_norm(&self, x: f64, y: f64) -> f64 {
        let diff: Vec<f64> = self
            .components
            .iter()
            .map(|&(m, n)| (phi(m, x - y) - phi(n, x - y)) - (phi(m, x) - phi(n, x)))
            .collect();
        self.space.norm_of(&diff)
    }

    /// Constant pieces of `‖K(x − y) − K(x)‖_B` covering the hull of its
    /// breakpoints and `cuts`; zero outside that hull.
    pub fn segments(&self, y: f64, cuts: &[f64]) -> Vec<Segment> {
        let mut knots: Vec<f64> = [0.0, y]
            .into_iter()
            .chain(self.lengths.iter().flat_map(|&l| [l, l + y]))
            .chain(cuts.iter().copied())
            .collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        knots
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                Segment { start: w[0], end: w[1], value: self.kernel_difference_norm(mid, y) }
            })
            .collect()
    }

    /// `∫_{|x| > c|y|} ‖K(x − y) − K(x)‖_B dx`, exact.
    pub fn hormander_integral(&self, y: f64, cutoff_factor: f64) -> Result<HormanderIntegral> {
        check_shift(y)?;
        if !(cutoff_factor > 0.0 && cutoff_factor.is_finite()) {
            return Err(crate::error::invalid(format!("cutoff must be positive, got {cutoff_factor}")));
        }
        let r = cutoff_factor * y.abs();
        let mut out = HormanderIntegral { total: 0.0, positive_side: 0.0, negative_side: 0.0 };
        for seg in self.segments(y, &[-r, r]) {
            let mid = seg.mid();
            if mid.abs() <= r || seg.value == 0.0 {
                continue;
            }
            let mass = seg.len() * seg.value;
            if mid > 0.0 {
                out.positive_side += mass;
            } else {
                out.negative_side += mass;
            }
        }
        out.total = out.positive_side + out.negative_side;
        Ok(out)
    }

    /// Shell constants `c_k`, `k = 1..=shells`, for the `(D_r)` condition on
    /// `S_k = {2^k|y| < |x| ≤ 2^{k+1}|y|}`:
    /// `c_k = (∫_{S_k} ‖K(x−y) − K(x)‖^r dx)^{1/r} · |S_k|^{1 − 1/r}`,
    /// and `c_k = |S_k| · sup_{S_k} ‖K(x−y) − K(x)‖` for `r = ∞`.
    pub fn dr_condition_check(&self, r: f64, y: f64, shells: usize) -> Result<Vec<f64>> {
        check_shift(y)?;
        if !(r >= 1.0) {
            return Err(crate::error::invalid(format!("r must be at least 1, got {r}")));
        }
        let ay = y.abs();
        let radii: Vec<f64> = (1..=shells + 1).map(|k| 2f64.powi(k as i32) * ay).collect();
        let cuts: Vec<f64> = radii.iter().flat_map(|&t| [-t, t]).collect();
        let segments = self.segments(y, &cuts);
        Ok((0..shells)
            .map(|i| {
                let (lo, hi) = (radii[i], radii[i + 1]);
                let measure = 2.0 * (hi - lo);
                let inside = segments.iter().filter(|s| {
                    let a = s.mid().abs();
                    lo < a && a <= hi
                });
                if r.is_infinite() {
                    measure * inside.fold(0.0f64, |m, s| m.max(s.value))
                } else {
                    let integral: f64 = inside.map(|s| s.len() * s.value.powf(r)).sum();
                    integral.powf(1.0 / r) * measure.powf(1.0 - 1.0 / r)
                }
            })
            .collect())
    }

    /// `(K ∗ f)(x) = ∫ K(x − t) f(t) dt`, assembled from point evaluations of
    /// `K` on the pieces where both factors are constant.
    pub fn convolve_at(&self, f: &GridFunction, x: f64) -> BlockVector {
        let mut knots: Vec<f64> = (0..=f.len()).map(|i| f.cell_start(i)).collect();
        knots.push(x);
        knots.extend(self.lengths.iter().map(|&l| x - l));
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let (lo, hi) = (f.origin(), f.end());
        let mut acc = BlockVector::zeros(self.space.clone());
        for w in knots.windows(2) {
            let (a, b) = (w[0].max(lo), w[1].min(hi));
            if b <= a {
                continue;
            }
            let t = 0.5 * (a + b);
            let v = f.value_at(t);
            if v == 0.0 {
                continue;
            }
            acc.axpy((b - a) * v, &self.kernel_at(x - t)).expect("same space");
        }
        acc
    }
}

/// Rejects kernels with no blocks, for sweeps that need a nontrivial kernel.
pub fn require_blocks(kernel: &OscillationKernel) -> Result<()> {
    if kernel.space.dim() == 0 {
        Err(Error::InvalidParameter("kernel has no components".into()))
    } else {
        Ok(())
    }
}
