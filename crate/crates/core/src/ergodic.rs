//! Rotations of the circle `[0, 1)` and the ergodic operators built on them.
//!
//! The map is `τx = x + θ mod 1`; the Kronecker flow is `U_t x = x + tθ mod 1`.
//! Discrete operators on a flow use its time-one map. Orbit points are always
//! computed directly as `x + iθ` rather than by iterating, so an orbit of
//! length `N` carries a single rounding per point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_THETA: f64 = std::f64::consts::SQRT_2 - 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    #[serde(alias = "rotation_map")]
    Map,
    #[serde(alias = "rotation_flow")]
    Flow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationSystem {
    theta: f64,
    kind: SystemKind,
}

impl RotationSystem {
    pub fn new(theta: f64, kind: SystemKind) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(crate::error::invalid(format!("rotation angle must lie in (0, 1), got {theta}")));
        }
        Ok(Self { theta, kind })
    }

    pub fn map(theta: f64) -> Result<Self> {
        Self::new(theta, SystemKind::Map)
    }

    pub fn flow(theta: f64) -> Result<Self> {
        Self::new(theta, SystemKind::Flow)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    /// `x + tθ mod 1`; `t` is an iterate count for the map and a time for
    /// the flow.
    pub fn point(&self, x: f64, t: f64) -> f64 {
        (x + t * self.theta).rem_euclid(1.0)
    }
}

/// Anything that can be evaluated at a point of the circle.
pub trait Observable: Sync {
    fn eval(&self, x: f64) -> f64;
}

impl<F: Fn(f64) -> f64 + Sync> Observable for F {
    fn eval(&self, x: f64) -> f64 {
        self(x)
    }
}

/// Piecewise-constant function on `N` equal cells of the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleGrid {
    values: Vec<f64>,
    prefix: Vec<f64>,
}

impl CircleGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(crate::error::invalid("circle grid needs finite values"));
        }
        let h = 1.0 / values.len() as f64;
        let mut prefix = Vec::with_capacity(values.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for v in &values {
            acc += h * v;
            prefix.push(acc);
        }
        Ok(Self { values, prefix })
    }

    pub fn random(seed: u64, cells: usize) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::new((0..cells).map(|_| rng.gen_range(-1.0..=1.0)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn cell(&self, x: f64) -> usize {
        ((x * self.values.len() as f64) as usize).min(self.values.len() - 1)
    }

    /// `∫_0^x` for `x ∈ [0, 1]`.
    fn partial(&self, x: f64) -> f64 {
        let n = self.values.len();
        let u = x * n as f64;
        let i = (u.floor() as usize).min(n - 1);
        self.prefix[i] + (x - i as f64 / n as f64) * self.values[i]
    }
}

/// Functions on the circle with exact antiderivatives.
#[derive(Debug, Clone, PartialEq)]
pub enum CircleFunction {
    Constant(f64),
    /// `amplitude · cos 2πx`.
    Cosine { amplitude: f64 },
    /// `height · χ_[a,b)` with `0 ≤ a < b ≤ 1`.
    Arc { a: f64, b: f64, height: f64 },
    Cells(CircleGrid),
    Sum(Vec<CircleFunction>),
}

impl CircleFunction {
    pub fn arc(a: f64, b: f64) -> Result<Self> {
        if !(0.0 <= a && a < b && b <= 1.0) {
            return Err(Error::DegenerateInterval { a, b });
        }
        Ok(Self::Arc { a, b, height: 1.0 })
    }

    pub fn cells(values: Vec<f64>) -> Result<Self> {
        Ok(Self::Cells(CircleGrid::new(values)?))
    }

    pub fn eval_at(&self, x: f64) -> f64 {
        let x = x.rem_euclid(1.0);
        match self {
            Self::Constant(c) => *c,
            Self::Cosine { amplitude } => amplitude * (std::f64::consts::TAU * x).cos(),
            Self::Arc { a, b, height } => {
                if *a <= x && x < *b {
                    *height
                } else {
                    0.0
                }
            }
            Self::Cells(g) => g.values[g.cell(x)],
            Self::Sum(parts) => parts.iter().map(|p| p.eval_at(x)).sum(),
        }
    }

    /// `∫_0^u f` over the periodic extension, any real `u`.
    pub fn antiderivative(&self, u: f64) -> f64 {
        match self {
            Self::Constant(c) => c * u,
            Self::Cosine { amplitude } => {
                amplitude * (std::f64::consts::TAU * u).sin() / std::f64::consts::TAU
            }
            Self::Arc { a, b, height } => {
                let whole = u.floor();
                let frac = u - whole;
                height * (whole * (b - a) + frac.clamp(*a, *b) - a)
            }
            Self::Cells(g) => {
                let whole = u.floor();
                let total = *g.prefix.last().unwrap();
                whole * total + g.partial(u - whole)
            }
            Self::Sum(parts) => parts.iter().map(|p| p.antiderivative(u)).sum(),
        }
    }

    /// `∫_T f`.
    pub fn mean(&self) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Cosine { .. } => 0.0,
            Self::Arc { a, b, height } => height * (b - a),
            Self::Cells(g) => *g.prefix.last().unwrap(),
            Self::Sum(parts) => parts.iter().map(Self::mean).sum(),
        }
    }

    /// Upper bound for `‖f − mean‖_{L¹(T)}`; exact except for sums.
    pub fn deviation_bound(&self) -> f64 {
        match self {
            Self::Constant(_) => 0.0,
            Self::Cosine { amplitude } => amplitude.abs() * 2.0 / std::f64::consts::PI,
            Self::Arc { a, b, height } => {
                let w = b - a;
                height.abs() * 2.0 * w * (1.0 - w)
            }
            Self::Cells(g) => {
                let mu = self.mean();
                g.values.iter().map(|v| (v - mu).abs()).sum::<f64>() / g.values.len() as f64
            }
            Self::Sum(parts) => parts.iter().map(Self::deviation_bound).sum(),
        }
    }

    /// Upper bound for `‖f‖_∞`; exact except for sums.
    pub fn sup_bound(&self) -> f64 {
        match self {
            Self::Constant(c) => c.abs(),
            Self::Cosine { amplitude } => amplitude.abs(),
            Self::Arc { height, .. } => height.abs(),
            Self::Cells(g) => g.values.iter().fold(0.0f64, |a, v| a.max(v.abs())),
            Self::Sum(parts) => parts.iter().map(Self::sup_bound).sum(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        match self {
            Self::Constant(v) => Self::Constant(c * v),
            Self::Cosine { amplitude } => Self::Cosine { amplitude: c * amplitude },
            Self::Arc { a, b, height } => Self::Arc { a: *a, b: *b, height: c * height },
            Self::Cells(g) => Self::Cells(
                CircleGrid::new(g.values.iter().map(|v| c * v).collect()).expect("finite"),
            ),
            Self::Sum(parts) => Self::Sum(parts.iter().map(|p| p.scale(c)).collect()),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        match (self, other) {
            (Self::Cells(a), Self::Cells(b)) if a.values.len() == b.values.len() => Self::Cells(
                CircleGrid::new(a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect())
                    .expect("finite"),
            ),
            _ => Self::Sum(vec![self.clone(), other.clone()]),
        }
    }
}

impl Observable for CircleFunction {
    fn eval(&self, x: f64) -> f64 {
        self.eval_at(x)
    }
}

/// A circle function observed along orbits up to a time horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitFunction {
    base: CircleFunction,
    horizon: f64,
}

impl OrbitFunction {
    /// Closed-form or piecewise-constant data is available at every time.
    pub fn new(base: CircleFunction) -> Self {
        Self { base, horizon: f64::INFINITY }
    }

    pub fn with_horizon(base: CircleFunction, horizon: f64) -> Self {
        Self { base, horizon }
    }

    pub fn base(&self) -> &CircleFunction {
        &self.base
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn check_horizon(&self, required: f64) -> Result<()> {
        if required > self.horizon {
            Err(Error::InsufficientHorizon { required, available: self.horizon })
        } else {
            Ok(())
        }
    }
}

impl Observable for OrbitFunction {
    fn eval(&self, x: f64) -> f64 {
        self.base.eval_at(x)
    }
}

/// `A_n f(x)`: `(1/n)∫_0^n f(U_t x) dt` for the flow, `(1/n)Σ_{i<n} f(τ^i x)`
/// for the map (where `n` must be a positive integer).
pub fn ergodic_average(system: &RotationSystem, f: &OrbitFunction, n: f64, x: f64) -> Result<f64> {
    if !(n > 0.0) {
        return Err(crate::error::invalid(format!("averaging length must be positive, got {n}")));
    }
    f.check_horizon(n)?;
    match system.kind {
        SystemKind::Flow => {
            let span = n * system.theta;
            let base = &f.base;
            if let CircleFunction::Constant(c) = base {
                return Ok(*c);
            }
            Ok((base.antiderivative(x + span) - base.antiderivative(x)) / span)
        }
        SystemKind::Map => {
            if n.fract() != 0.0 {
                return Err(crate::error::invalid(format!("map averages need an integer length, got {n}")));
            }
            let count = n as u64;
            let sum: f64 = (0..count).map(|i| f.eval(system.point(x, i as f64))).sum();
            Ok(sum / n)
        }
    }
}

/// `f*(x) = max_{1≤n≤N} (1/n) Σ_{i<n} |f(τ^i x)|`.
pub fn ergodic_maximal<F: Observable + ?Sized>(
    system: &RotationSystem,
    f: &F,
    x: f64,
    n_max: usize,
) -> f64 {
    let mut sum = 0.0;
    let mut best = 0.0f64;
    for i in 0..n_max {
        sum += f.eval(system.point(x, i as f64)).abs();
        best = best.max(sum / (i + 1) as f64);
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HilbertValue {
    /// Partial sum through `K` terms.
    pub value: f64,
    /// `S_K − S_{⌊K/2⌋}`, the contribution of the last dyadic block of terms.
    pub increment: f64,
}

/// Partial sum `Σ_{k=1}^{K} (f(τ^k x) − f(τ^{−k} x))/k`.
pub fn ergodic_hilbert<F: Observable + ?Sized>(
    system: &RotationSystem,
    f: &F,
    x: f64,
    k_terms: usize,
) -> Result<HilbertValue> {
    if k_terms == 0 {
        return Err(crate::error::invalid("Hilbert transform needs at least one term"));
    }
    let half = k_terms / 2;
    let mut head = 0.0;
    let mut tail = 0.0;
    for k in 1..=k_terms {
        let kf = k as f64;
        let term = (f.eval(system.point(x, kf)) - f.eval(system.point(x, -kf))) / kf;
        if k <= half {
            head += term;
        } else {
            tail += term;
        }
    }
    Ok(HilbertValue { value: head + tail, increment: tail })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SharpVariant {
    /// `T_n f = (1/n)Σ|f(τ^i x)|`, absolute values inside the mean.
    Absolute,
    /// `T_n f = (1/n)Σ f(τ^i x)`, the usual mean.
    #[default]
    Centered,
}

/// `f♯(x) = max_{n≤N} (1/n) Σ_{i<n} |f(τ^i x) − T_n f(x)|`.
pub fn ergodic_sharp<F: Observable + ?Sized>(
    system: &RotationSystem,
    f: &F,
    x: f64,
    n_max: usize,
    variant: SharpVariant,
) -> f64 {
    let orbit: Vec<f64> = (0..n_max).map(|i| f.eval(system.point(x, i as f64))).collect();
    sharp_of_orbit(&orbit, variant)
}

pub(crate) fn sharp_of_orbit(orbit: &[f64], variant: SharpVariant) -> f64 {
    let mut best = 0.0f64;
    let mut running = 0.0;
    for n in 1..=orbit.len() {
        let v = orbit[n - 1];
        running += match variant {
            SharpVariant::Absolute => v.abs(),
            SharpVariant::Centered => v,
        };
        let t_n = running / n as f64;
        let dev: f64 = orbit[..n].iter().map(|w| (w - t_n).abs()).sum::<f64>() / n as f64;
        best = best.max(dev);
    }
    best
}

/// Max of `f♯` over the sample points: a lower bound for `‖f♯‖_∞`.
pub fn ebmo_norm<F: Observable + ?Sized>(
    system: &RotationSystem,
    f: &F,
    sample_points: &[f64],
    n_max: usize,
    variant: SharpVariant,
) -> Result<f64> {
    if sample_points.is_empty() {
        return Err(crate::error::invalid("EBMO estimate needs sample points"));
    }
    Ok(sample_points
        .par_iter()
        .map(|&x| ergodic_sharp(system, f, x, n_max, variant))
        .reduce(|| 0.0, f64::max))
}

/// `count` equispaced cell centres `(j + 1/2)/count`.
pub fn sample_points(count: usize) -> Vec<f64> {
    (0..count).map(|j| (j as f64 + 0.5) / count as f64).collect()
}

/// Sample-average surrogate for `‖g‖_{L^p(T)}`.
pub fn circle_lp_norm(values: &[f64], p: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    if p.is_infinite() {
        return values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    }
    let mean = values.iter().map(|v| v.abs().powf(p)).sum::<f64>() / values.len() as f64;
    mean.powf(1.0 / p)
}

/// Measure of `τ^{-1}[a, b)` counted on `cells` equal cells of the circle:
/// the fraction of cell centres mapped into `[a, b)`.
pub fn preimage_measure(system: &RotationSystem, a: f64, b: f64, cells: usize) -> f64 {
    let hits = sample_points(cells)
        .into_iter()
        .filter(|&c| {
            let y = system.point(c, 1.0);
            a <= y && y < b
        })
        .count();
    hits as f64 / cells as f64
}
