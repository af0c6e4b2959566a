//! The oscillation operator
//!
//! ```text
//! Of(x) = ( Σ_k ( max_{m ∈ M, n_k ≤ m ≤ n_{k+1}} |A_m f(x) − A_{n_k} f(x)| )^s )^{1/s}
//! ```
//!
//! on the real line (`A_n = φ_n ∗ ·`) and along orbits of a rotation. The
//! sum over `k` is truncated at the pair's `k_max`; every evaluation reports a
//! bound on the discarded blocks.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::block_space::{check_exponent, ls_aggregate, BlockSpace, BlockVector};
use crate::ergodic::{ergodic_average, OrbitFunction, RotationSystem, SystemKind};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::sequences::{build_blocks, BlockPlan, LacunaryPair, LacunarySequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Averages `A_m`, `A_{n_k}`.
    #[default]
    Direct,
    /// Averages `A_{2^m}`, `A_{2^{n_k}}`.
    Dyadic,
}

#[derive(Debug, Clone)]
pub struct OscillationConfig {
    pair: LacunaryPair,
    s: f64,
    mode: Mode,
    unit: f64,
    plan: BlockPlan,
    lengths: Vec<f64>,
    space: Arc<BlockSpace>,
}

impl OscillationConfig {
    /// `k_max = None` keeps every block the sequence `n` supports. In dyadic
    /// mode both sequences are read as exponents.
    pub fn new(
        n: &LacunarySequence,
        m_set: &LacunarySequence,
        k_max: Option<usize>,
        s: f64,
        mode: Mode,
    ) -> Result<Self> {
        let (n, m_set) = match mode {
            Mode::Direct => (n.clone(), m_set.clone()),
            Mode::Dyadic => (n.exponentiate()?, m_set.exponentiate()?),
        };
        let k_max = k_max.unwrap_or(n.len().saturating_sub(1));
        let pair = build_blocks(n, m_set, k_max)?;
        Self::from_pair(pair, s, mode, 1.0)
    }

    fn from_pair(pair: LacunaryPair, s: f64, mode: Mode, unit: f64) -> Result<Self> {
        let s = check_exponent(s)?;
        if !(unit > 0.0 && unit.is_finite()) {
            return Err(crate::error::invalid(format!("length unit must be positive, got {unit}")));
        }
        let plan = pair.plan();
        let lengths = plan.lengths.iter().map(|&l| l as f64 * unit).collect();
        let space = BlockSpace::for_pair(&pair, s)?;
        Ok(Self { pair, s, mode, unit, plan, lengths, space })
    }

    /// Measures every averaging length in multiples of `unit` instead of 1.
    pub fn with_unit(&self, unit: f64) -> Result<Self> {
        Self::from_pair(self.pair.clone(), self.s, self.mode, unit)
    }

    pub fn with_exponent(&self, s: f64) -> Result<Self> {
        Self::from_pair(self.pair.clone(), s, self.mode, self.unit)
    }

    /// Same sequences with fewer blocks.
    pub fn truncated(&self, k_max: usize) -> Result<Self> {
        let pair = build_blocks(self.pair.n().clone(), self.pair.m_set().clone(), k_max)?;
        Self::from_pair(pair, self.s, self.mode, self.unit)
    }

    pub fn pair(&self) -> &LacunaryPair {
        &self.pair
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn unit(&self) -> f64 {
        self.unit
    }

    pub fn k_max(&self) -> usize {
        self.pair.k_max()
    }

    pub fn plan(&self) -> &BlockPlan {
        &self.plan
    }

    pub fn space(&self) -> &Arc<BlockSpace> {
        &self.space
    }

    /// Distinct averaging lengths, ascending.
    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn max_length(&self) -> f64 {
        self.lengths.last().copied().unwrap_or(0.0)
    }

    /// Block `k`'s base length `n_k` (zero-based `k`), in real units.
    pub fn base_length(&self, k: usize) -> f64 {
        self.pair.n().values()[k] as f64 * self.unit
    }

    /// `(Σ_{k>k_max} (2/n_k)^s)^{1/s}` over the infinite continuation of `n`;
    /// terms past the listed ones grow by the certified ratio.
    pub fn tail_factor(&self) -> f64 {
        let listed = self.pair.bases_beyond(0);
        let s = self.s;
        let mut sum: f64 = listed.iter().map(|&v| (2.0 / (v * self.unit)).powf(s)).sum();
        let last = listed.last().copied().expect("n_{k_max+1} exists") * self.unit;
        let r = self.pair.n().ratio_bound().powf(-s);
        sum += (2.0 / last).powf(s) * r / (1.0 - r);
        sum.powf(1.0 / s)
    }

    /// `ℓˢ`-of-max aggregation of averages indexed like [`Self::lengths`].
    pub fn aggregate(&self, averages: &[f64]) -> f64 {
        let maxima: Vec<f64> = self
            .plan
            .blocks
            .iter()
            .map(|b| {
                let base = averages[b.base];
                b.members.iter().fold(0.0f64, |acc, &j| acc.max((averages[j] - base).abs()))
            })
            .collect();
        ls_aggregate(&maxima, self.s)
    }

    /// Block components `A_m − A_{n_k}`, flattened in [`BlockSpace`] order.
    pub fn components(&self, averages: &[f64]) -> Vec<f64> {
        self.plan
            .blocks
            .iter()
            .flat_map(|b| b.members.iter().map(move |&j| averages[j] - averages[b.base]))
            .collect()
    }
}

/// An operator value with a bound on the blocks beyond `k_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationValue {
    pub value: f64,
    /// `None` when no rigorous tail bound is available (rotation maps).
    pub tail_bound: Option<f64>,
}

/// `A_ℓ f(x)` for every configured length ℓ.
pub fn line_averages(cfg: &OscillationConfig, f: &GridFunction, x: f64) -> Vec<f64> {
    let right = f.antiderivative(x);
    cfg.lengths.iter().map(|&l| (right - f.antiderivative(x - l)) / l).collect()
}

/// `O_ℝ f(x) = ‖(K ∗ f)(x)‖_B`, with tail bound `‖f‖₁ (Σ_{k>k_max}(2/n_k)^s)^{1/s}`.
pub fn oscillation_line(cfg: &OscillationConfig, f: &GridFunction, x: f64) -> OscillationValue {
    OscillationValue {
        value: cfg.aggregate(&line_averages(cfg, f, x)),
        tail_bound: Some(f.l1_norm() * cfg.tail_factor()),
    }
}

/// `(K ∗ f)(x)` as an element of `B`.
pub fn convolution_line(cfg: &OscillationConfig, f: &GridFunction, x: f64) -> BlockVector {
    let comps = cfg.components(&line_averages(cfg, f, x));
    BlockVector::from_flat(cfg.space.clone(), comps).expect("components match the space")
}

/// A span of a [`LineProfile`] on which `O_ℝ f` is convex and smooth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePiece {
    pub start: f64,
    pub end: f64,
    /// Index of the knot interval holding the piece.
    span: usize,
    pub left_value: f64,
    pub right_value: f64,
    /// Location and value of the minimum over the piece.
    pub min_at: f64,
    pub min_value: f64,
}

impl ProfilePiece {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn max_value(&self) -> f64 {
        self.left_value.max(self.right_value)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Span {
    start: f64,
    end: f64,
    left: Vec<f64>,
    right: Vec<f64>,
}

/// `O_ℝ f` on its whole support.
///
/// Between consecutive points of `{jumps of f} + ({0} ∪ lengths)` every block
/// component `A_m f − A_{n_k} f` is affine in `x`, so it is stored by its two
/// endpoint values. The norm of an affine vector function is convex; splitting
/// further at component zeros and at points where two members of a block tie
/// in absolute value leaves pieces on which the profile is also smooth. Norms
/// use 8-point Gauss–Legendre per piece and level sets use bisection on the
/// two monotone sides. Outside `[inf supp f, sup supp f + max length]` the
/// operator vanishes exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct LineProfile {
    space: Arc<BlockSpace>,
    spans: Vec<Span>,
    pieces: Vec<ProfilePiece>,
}

const GL8: [(f64, f64); 4] = [
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

impl LineProfile {
    pub fn build(cfg: &OscillationConfig, f: &GridFunction) -> Self {
        let space = cfg.space.clone();
        let jumps = f.jumps();
        let mut knots: Vec<f64> = jumps
            .iter()
            .flat_map(|&(p, _)| std::iter::once(p).chain(cfg.lengths.iter().map(move |&l| p + l)))
            .collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let comps: Vec<Vec<f64>> =
            knots.par_iter().map(|&x| cfg.components(&line_averages(cfg, f, x))).collect();
        let spans: Vec<Span> = knots
            .windows(2)
            .zip(comps.windows(2))
            .map(|(k, c)| Span { start: k[0], end: k[1], left: c[0].clone(), right: c[1].clone() })
            .collect();
        let mut profile = Self { space, spans, pieces: Vec::new() };
        let pieces: Vec<Vec<ProfilePiece>> =
            (0..profile.spans.len()).into_par_iter().map(|i| profile.split(i)).collect();
        profile.pieces = pieces.into_iter().flatten().collect();
        profile
    }

    fn split(&self, i: usize) -> Vec<ProfilePiece> {
        let span = &self.spans[i];
        let (l, r) = (&span.left, &span.right);
        let mut cuts = vec![0.0, 1.0];
        let mut push = |num: f64, den: f64| {
            if den != 0.0 {
                let t = num / den;
                if t > 0.0 && t < 1.0 {
                    cuts.push(t);
                }
            }
        };
        for j in 0..l.len() {
            push(l[j], l[j] - r[j]);
        }
        for k in 0..self.space.block_count() {
            let range = self.space.block_range(k);
            for a in range.clone() {
                for b in a + 1..range.end {
                    push(l[a] - l[b], (l[a] - l[b]) - (r[a] - r[b]));
                    push(l[a] + l[b], (l[a] + l[b]) - (r[a] + r[b]));
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let width = span.end - span.start;
        cuts.windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| {
                let start = if w[0] == 0.0 { span.start } else { span.start + w[0] * width };
                let end = if w[1] == 1.0 { span.end } else { span.start + w[1] * width };
                let (min_at, min_value) = self.minimise(i, start, end);
                ProfilePiece {
                    start,
                    end,
                    span: i,
                    left_value: self.eval_span(i, start),
                    right_value: self.eval_span(i, end),
                    min_at,
                    min_value,
                }
            })
            .collect()
    }

    fn eval_span(&self, i: usize, x: f64) -> f64 {
        let span = &self.spans[i];
        let t = ((x - span.start) / (span.end - span.start)).clamp(0.0, 1.0);
        let flat: Vec<f64> = span.left.iter().zip(&span.right).map(|(&a, &b)| a + t * (b - a)).collect();
        self.space.norm_of(&flat)
    }

    /// Golden-section search; the profile is convex on each span.
    fn minimise(&self, i: usize, mut a: f64, mut b: f64) -> (f64, f64) {
        const G: f64 = 0.618_033_988_749_894_8;
        let mut c = b - G * (b - a);
        let mut d = a + G * (b - a);
        let (mut fc, mut fd) = (self.eval_span(i, c), self.eval_span(i, d));
        for _ in 0..80 {
            if b - a <= 1e-14 * (1.0 + a.abs()) {
                break;
            }
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - G * (b - a);
                fc = self.eval_span(i, c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + G * (b - a);
                fd = self.eval_span(i, d);
            }
        }
        let (x, v) = if fc <= fd { (c, fc) } else { (d, fd) };
        // endpoints can beat the interior when the minimum sits on the boundary
        [(a, self.eval_span(i, a)), (b, self.eval_span(i, b))]
            .into_iter()
            .fold((x, v), |best, cand| if cand.1 < best.1 { cand } else { best })
    }

    pub fn pieces(&self) -> &[ProfilePiece] {
        &self.pieces
    }

    /// `O_ℝ f(x)`; zero outside [`Self::extent`].
    pub fn value_at(&self, x: f64) -> f64 {
        let i = self.spans.partition_point(|s| s.end < x);
        match self.spans.get(i) {
            Some(s) if s.start <= x => self.eval_span(i, x),
            _ => 0.0,
        }
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.sup();
        }
        let sum: f64 = self
            .pieces
            .iter()
            .map(|pc| {
                let (mid, half) = (0.5 * (pc.start + pc.end), 0.5 * pc.len());
                let g = |x: f64| self.eval_span(pc.span, x).powf(p);
                half * GL8.iter().map(|&(t, w)| w * (g(mid - half * t) + g(mid + half * t))).sum::<f64>()
            })
            .sum();
        sum.powf(1.0 / p)
    }

    /// `|{x : O_ℝ f(x) > λ}|`.
    pub fn superlevel_measure(&self, lambda: f64) -> f64 {
        self.pieces
            .iter()
            .map(|pc| {
                if pc.max_value() <= lambda {
                    0.0
                } else if pc.min_value > lambda {
                    pc.len()
                } else {
                    let g = |x: f64| self.eval_span(pc.span, x);
                    let lo = if pc.left_value > lambda { self.crossing(&g, pc.start, pc.min_at, lambda) } else { pc.start };
                    let hi = if pc.right_value > lambda { self.crossing(&g, pc.end, pc.min_at, lambda) } else { pc.end };
                    pc.len() - (hi - lo).max(0.0)
                }
            })
            .sum()
    }

    /// Level crossing between `above` (value > λ) and `below` (value ≤ λ).
    fn crossing(&self, g: &impl Fn(f64) -> f64, mut above: f64, mut below: f64, lambda: f64) -> f64 {
        for _ in 0..100 {
            let mid = 0.5 * (above + below);
            if mid == above || mid == below {
                break;
            }
            if g(mid) > lambda {
                above = mid;
            } else {
                below = mid;
            }
        }
        0.5 * (above + below)
    }

    pub fn sup(&self) -> f64 {
        self.pieces.iter().fold(0.0f64, |a, pc| a.max(pc.max_value()))
    }

    pub fn extent(&self) -> Option<(f64, f64)> {
        Some((self.spans.first()?.start, self.spans.last()?.end))
    }
}

/// `A_ℓ f(x)` along the orbit of `x`, for every configured length.
pub fn ergodic_averages(
    cfg: &OscillationConfig,
    system: &RotationSystem,
    f: &OrbitFunction,
    x: f64,
) -> Result<Vec<f64>> {
    f.check_horizon(cfg.max_length())?;
    match system.kind() {
        SystemKind::Flow => cfg.lengths.iter().map(|&l| ergodic_average(system, f, l, x)).collect(),
        SystemKind::Map => {
            // one running Birkhoff sum serves every length
            let mut out = Vec::with_capacity(cfg.lengths.len());
            let mut sum = 0.0;
            let mut i = 0u64;
            for &l in &cfg.lengths {
                if l.fract() != 0.0 {
                    return Err(crate::error::invalid(format!(
                        "map averages need integer lengths, got {l}"
                    )));
                }
                let target = l as u64;
                while i < target {
                    sum += crate::ergodic::Observable::eval(f, system.point(x, i as f64));
                    i += 1;
                }
                out.push(sum / l);
            }
            Ok(out)
        }
    }
}

/// `Of(x)` along the orbit of `x`.
///
/// For the flow, `|A_n f − ∫f| ≤ ‖f − ∫f‖₁ / (2θn)`, which gives the same
/// tail shape as on the line with `‖f‖₁` replaced by `‖f − ∫f‖₁ / (2θ)`.
pub fn oscillation_ergodic(
    cfg: &OscillationConfig,
    system: &RotationSystem,
    f: &OrbitFunction,
    x: f64,
) -> Result<OscillationValue> {
    let averages = ergodic_averages(cfg, system, f, x)?;
    let tail_bound = match system.kind() {
        SystemKind::Flow => Some(ergodic_tail_constant(system, f) * cfg.tail_factor()),
        SystemKind::Map => None,
    };
    Ok(OscillationValue { value: cfg.aggregate(&averages), tail_bound })
}

/// `‖f − ∫f‖₁ / (2θ)`.
pub fn ergodic_tail_constant(system: &RotationSystem, f: &OrbitFunction) -> f64 {
    f.base().deviation_bound() / (2.0 * system.theta())
}

/// `Of` at each point, computed in parallel; order follows `points`.
pub fn ergodic_values(
    cfg: &OscillationConfig,
    system: &RotationSystem,
    f: &OrbitFunction,
    points: &[f64],
) -> Result<Vec<f64>> {
    points
        .par_iter()
        .map(|&x| oscillation_ergodic(cfg, system, f, x).map(|v| v.value))
        .collect()
}

/// Rejects a config whose longest window exceeds what the data can support.
pub fn require_horizon(cfg: &OscillationConfig, available: f64) -> Result<()> {
    if cfg.max_length() > available {
        Err(Error::InsufficientHorizon { required: cfg.max_length(), available })
    } else {
        Ok(())
    }
}
