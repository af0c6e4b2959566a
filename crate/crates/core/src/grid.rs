//! Compactly supported functions on the real line, constant on the cells
//! `[origin + i·step, origin + (i+1)·step)` of a uniform grid.
//!
//! Every window integral is exact for this representation: the antiderivative
//! is piecewise linear with knots at the cell edges, so `φ_n ∗ f` costs two
//! prefix lookups.

use std::io::Read;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// `cumulative[i] = step · Σ_{j<i} samples[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixIntegral {
    cumulative: Vec<f64>,
}

impl PrefixIntegral {
    pub fn new(samples: &[f64], step: f64) -> Self {
        let mut cumulative = Vec::with_capacity(samples.len() + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for &v in samples {
            acc += step * v;
            cumulative.push(acc);
        }
        Self { cumulative }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    origin: f64,
    step: f64,
    samples: Vec<f64>,
    prefix: PrefixIntegral,
}

pub(crate) fn check_step(step: f64) -> Result<f64> {
    if step > 0.0 && step.is_finite() {
        Ok(step)
    } else {
        Err(Error::InvalidStep(step))
    }
}

impl GridFunction {
    pub fn new(origin: f64, step: f64, samples: Vec<f64>) -> Result<Self> {
        check_step(step)?;
        if !origin.is_finite() || samples.iter().any(|v| !v.is_finite()) {
            return Err(crate::error::invalid("grid function values must be finite"));
        }
        let prefix = PrefixIntegral::new(&samples, step);
        Ok(Self { origin, step, samples, prefix })
    }

    pub fn zero(step: f64) -> Result<Self> {
        Self::new(0.0, step, Vec::new())
    }

    /// Averages `g` over each lattice cell `[i·step, (i+1)·step)` meeting
    /// `[a, b]`, using the antiderivative `big_g` of `g`.
    pub fn from_antiderivative(
        a: f64,
        b: f64,
        step: f64,
        big_g: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        check_step(step)?;
        if !(a < b) {
            return Err(Error::DegenerateInterval { a, b });
        }
        let first = (a / step).floor() as i64;
        let last = (b / step).ceil() as i64;
        let samples = (first..last)
            .map(|i| {
                let (x0, x1) = (i as f64 * step, (i + 1) as f64 * step);
                (big_g(x1) - big_g(x0)) / step
            })
            .collect();
        Self::new(first as f64 * step, step, samples)
    }

    /// `χ_[a,b]`, cell-averaged onto the lattice.
    pub fn indicator(a: f64, b: f64, step: f64) -> Result<Self> {
        Self::from_antiderivative(a, b, step, |x| x.clamp(a, b) - a)
    }

    /// Scaled indicator `c · χ_[a,b]`.
    pub fn constant_on(c: f64, a: f64, b: f64, step: f64) -> Result<Self> {
        Ok(Self::indicator(a, b, step)?.scale(c))
    }

    /// Unit-height tent on `[a, b]` peaking at the midpoint.
    pub fn tent(a: f64, b: f64, step: f64) -> Result<Self> {
        let half = 0.5 * (b - a);
        let mid = a + half;
        let big_g = move |x: f64| {
            let x = x.clamp(a, b);
            if x <= mid {
                let d = x - a;
                d * d / (2.0 * half)
            } else {
                let d = b - x;
                half - d * d / (2.0 * half)
            }
        };
        Self::from_antiderivative(a, b, step, big_g)
    }

    /// Independent uniform values in `[-1, 1]` on the cells of `[a, b]`.
    pub fn random_bounded(seed: u64, a: f64, b: f64, step: f64) -> Result<Self> {
        check_step(step)?;
        if !(a < b) {
            return Err(Error::DegenerateInterval { a, b });
        }
        let first = (a / step).round() as i64;
        let count = ((b - a) / step).round().max(1.0) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = (0..count).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        Self::new(first as f64 * step, step, samples)
    }

    /// Reads `cell index, value` rows; missing cells are zero. A first row
    /// that does not parse is treated as a header.
    pub fn from_csv<R: Read>(reader: R, origin: f64, step: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parsed = (rec.get(0).map(str::parse::<i64>), rec.get(1).map(str::parse::<f64>));
            match parsed {
                (Some(Ok(i)), Some(Ok(v))) => rows.push((i, v)),
                _ if line == 0 => continue,
                _ => {
                    return Err(crate::error::invalid(format!("bad csv row {}", line + 1)));
                }
            }
        }
        if rows.is_empty() {
            return Self::new(origin, step, Vec::new());
        }
        let lo = rows.iter().map(|r| r.0).min().unwrap();
        let hi = rows.iter().map(|r| r.0).max().unwrap();
        let mut samples = vec![0.0; (hi - lo + 1) as usize];
        for (i, v) in rows {
            samples[(i - lo) as usize] = v;
        }
        Self::new(origin + lo as f64 * step, step, samples)
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn prefix(&self) -> &PrefixIntegral {
        &self.prefix
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn end(&self) -> f64 {
        self.cell_start(self.samples.len())
    }

    pub fn cell_start(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.step
    }

    /// Smallest closed interval outside which `f` vanishes.
    pub fn support(&self) -> Option<(f64, f64)> {
        let first = self.samples.iter().position(|&v| v != 0.0)?;
        let last = self.samples.iter().rposition(|&v| v != 0.0)?;
        Some((self.cell_start(first), self.cell_start(last + 1)))
    }

    /// Value at `x`, zero off the grid.
    pub fn value_at(&self, x: f64) -> f64 {
        let u = ((x - self.origin) / self.step).floor();
        if u < 0.0 || u >= self.samples.len() as f64 {
            0.0
        } else {
            self.samples[u as usize]
        }
    }

    /// `∫_{-∞}^{x} f`.
    pub fn antiderivative(&self, x: f64) -> f64 {
        let u = (x - self.origin) / self.step;
        if !(u > 0.0) {
            return 0.0;
        }
        let n = self.samples.len();
        if u >= n as f64 {
            return self.prefix.total();
        }
        let i = u.floor() as usize;
        self.prefix.cumulative[i] + (x - self.cell_start(i)) * self.samples[i]
    }

    /// `∫_a^b f` for `a ≤ b`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.antiderivative(b) - self.antiderivative(a)
    }

    /// `(φ_n ∗ f)(x) = (1/n) ∫_{x-n}^{x} f`.
    pub fn window_average(&self, n: f64, x: f64) -> f64 {
        (self.antiderivative(x) - self.antiderivative(x - n)) / n
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        assert!(p >= 1.0, "p must be at least 1");
        if p.is_infinite() {
            return self.sup_norm();
        }
        let sum: f64 = self.samples.iter().map(|v| v.abs().powf(p)).sum();
        (self.step * sum).powf(1.0 / p)
    }

    pub fn l1_norm(&self) -> f64 {
        self.step * self.samples.iter().map(|v| v.abs()).sum::<f64>()
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// `λ · |{x : |f(x)| > λ}|`.
    pub fn distribution_bound(&self, lambda: f64) -> f64 {
        let count = self.samples.iter().filter(|v| v.abs() > lambda).count();
        lambda * (self.step * count as f64)
    }

    pub fn shift(&self, tau: f64) -> Self {
        Self { origin: self.origin + tau, ..self.clone() }
    }

    pub fn scale(&self, c: f64) -> Self {
        let samples = self.samples.iter().map(|v| c * v).collect();
        Self::new(self.origin, self.step, samples).expect("scaling keeps values finite")
    }

    /// Mirror image `x ↦ f(-x)`.
    pub fn reflect(&self) -> Self {
        let samples = self.samples.iter().rev().copied().collect();
        Self::new(-self.end(), self.step, samples).expect("reflection keeps values finite")
    }

    /// Pointwise sum; the two grids must share the step and a common lattice.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.step != other.step {
            return Err(Error::Misaligned { what: "step", value: other.step, step: self.step });
        }
        if self.is_empty() {
            return Ok(other.clone());
        }
        if other.is_empty() {
            return Ok(self.clone());
        }
        let offset = (other.origin - self.origin) / self.step;
        let shift = offset.round();
        if (offset - shift).abs() > 1e-9 {
            return Err(Error::Misaligned { what: "origin", value: other.origin, step: self.step });
        }
        let shift = shift as i64;
        let lo = 0.min(shift);
        let hi = (self.len() as i64).max(shift + other.len() as i64);
        let mut samples = vec![0.0; (hi - lo) as usize];
        for (i, v) in self.samples.iter().enumerate() {
            samples[(i as i64 - lo) as usize] += v;
        }
        for (i, v) in other.samples.iter().enumerate() {
            samples[(i as i64 + shift - lo) as usize] += v;
        }
        let origin = if lo < 0 { other.origin } else { self.origin };
        Self::new(origin, self.step, samples)
    }

    /// Positions where the value changes, with the jump sizes. The function
    /// is zero outside the grid, so the jumps sum to zero.
    pub fn jumps(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut prev = 0.0;
        for (i, &v) in self.samples.iter().enumerate() {
            if v != prev {
                out.push((self.cell_start(i), v - prev));
            }
            prev = v;
        }
        if prev != 0.0 {
            out.push((self.end(), -prev));
        }
        out
    }
}

/// Free-function form of [`GridFunction::window_average`].
pub fn window_average(f: &GridFunction, n: f64, x: f64) -> f64 {
    f.window_average(n, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Cell-overlap oracle: sums value × overlap length, no prefix sums.
    fn overlap_oracle(f: &GridFunction, a: f64, b: f64) -> f64 {
        f.samples()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let (c0, c1) = (f.cell_start(i), f.cell_start(i + 1));
                let len = (b.min(c1) - a.max(c0)).max(0.0);
                v * len
            })
            .sum()
    }

    #[test]
    fn window_average_examples() {
        let f = GridFunction::indicator(0.0, 1.0, 0.01).unwrap();
        assert!((f.window_average(2.0, 1.0) - 0.5).abs() < 1e-12);

        let c = GridFunction::constant_on(3.5, 0.0, 10.0, 0.25).unwrap();
        assert!((c.window_average(2.0, 6.3) - 3.5).abs() < 1e-12);

        assert_eq!(f.window_average(0.5, -0.2), 0.0);
        assert_eq!(f.window_average(5.0, -0.0001), 0.0);
    }

    #[test]
    fn norm_examples() {
        let f = GridFunction::indicator(0.0, 1.0, 0.125).unwrap();
        assert!((f.lp_norm(1.0) - 1.0).abs() < 1e-15);
        assert!((f.lp_norm(2.0) - 1.0).abs() < 1e-15);
        let g = GridFunction::constant_on(2.0, 0.0, 3.0, 0.125).unwrap();
        assert!((g.lp_norm(2.0) - 2.0 * 3f64.sqrt()).abs() < 1e-12);
        assert!((g.lp_norm(2.0) - 3.4641).abs() < 1e-4);
        assert_eq!(g.sup_norm(), 2.0);
    }

    #[test]
    fn distribution_examples() {
        let f = GridFunction::indicator(0.0, 1.0, 0.125).unwrap();
        assert!((f.distribution_bound(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(f.distribution_bound(2.0), 0.0);
        let g = GridFunction::constant_on(3.0, 0.0, 2.0, 0.125).unwrap();
        // direct count oracle: 16 cells of width 1/8 exceed 1
        let count = g.samples().iter().filter(|v| v.abs() > 1.0).count();
        assert_eq!(count, 16);
        assert!((g.distribution_bound(1.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn indicator_off_lattice_keeps_mass() {
        let f = GridFunction::indicator(0.3, 1.1, 0.25).unwrap();
        assert!((f.integral(-10.0, 10.0) - 0.8).abs() < 1e-15);
        assert_eq!(f.origin(), 0.25);
        assert_eq!(f.len(), 4);
    }

    #[test]
    fn tent_mass() {
        let f = GridFunction::tent(0.0, 2.0, 0.125).unwrap();
        assert!((f.l1_norm() - 1.0).abs() < 1e-14);
        assert!(f.sup_norm() <= 1.0);
    }

    #[test]
    fn csv_round_trip() {
        let text = "cell,value\n2,1.5\n0,-1\n";
        let f = GridFunction::from_csv(text.as_bytes(), 1.0, 0.5).unwrap();
        assert_eq!(f.origin(), 1.0);
        assert_eq!(f.samples(), &[-1.0, 0.0, 1.5]);
        assert!(GridFunction::from_csv("0,1\nx,y\n".as_bytes(), 0.0, 1.0).is_err());
    }

    #[test]
    fn add_aligns_lattices() {
        let a = GridFunction::indicator(0.0, 1.0, 0.25).unwrap();
        let b = GridFunction::indicator(-0.5, 0.25, 0.25).unwrap();
        let c = a.add(&b).unwrap();
        assert_eq!(c.origin(), -0.5);
        assert_eq!(c.samples(), &[1.0, 1.0, 2.0, 1.0, 1.0, 1.0]);
        let d = GridFunction::new(0.1, 0.25, vec![1.0]).unwrap();
        assert!(a.add(&d).is_err());
    }

    #[test]
    fn jumps_sum_to_zero() {
        let f = GridFunction::new(0.0, 1.0, vec![1.0, 1.0, -1.0, 0.0, 2.0]).unwrap();
        let j = f.jumps();
        assert_eq!(j, vec![(0.0, 1.0), (2.0, -2.0), (3.0, 1.0), (4.0, 2.0), (5.0, -2.0)]);
        assert_eq!(j.iter().map(|p| p.1).sum::<f64>(), 0.0);
    }

    #[test]
    fn reflect_mirrors() {
        let f = GridFunction::new(1.0, 0.5, vec![1.0, 2.0, 3.0]).unwrap();
        let r = f.reflect();
        assert_eq!(r.origin(), -2.5);
        assert_eq!(r.value_at(-1.2), f.value_at(1.2));
        assert!((r.window_average(1.5, -1.0) - f.integral(1.0, 2.5) / 1.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_step() {
        assert!(matches!(GridFunction::new(0.0, 0.0, vec![]), Err(Error::InvalidStep(_))));
        assert!(matches!(GridFunction::indicator(1.0, 1.0, 0.1), Err(Error::DegenerateInterval { .. })));
    }

    proptest! {
        #[test]
        fn window_average_matches_overlap_oracle(
            seed in 0u64..1000, n in 0.01f64..12.0, x in -3.0f64..15.0
        ) {
            let f = GridFunction::random_bounded(seed, 0.0, 8.0, 0.125).unwrap();
            let fast = f.window_average(n, x);
            let slow = overlap_oracle(&f, x - n, x) / n;
            prop_assert!((fast - slow).abs() <= 1e-10 * slow.abs().max(f.sup_norm()));
        }

        #[test]
        fn translation_equivariant_on_dyadics(
            seed in 0u64..1000, n_cells in 1u32..200, x_cells in -64i32..256, tau_cells in -512i32..512
        ) {
            let step = 0.125;
            let f = GridFunction::random_bounded(seed, 0.0, 8.0, step).unwrap();
            let (n, x, tau) = (n_cells as f64 / 16.0, x_cells as f64 / 16.0, tau_cells as f64 / 8.0);
            prop_assert_eq!(f.shift(tau).window_average(n, x + tau), f.window_average(n, x));
        }

        #[test]
        fn chebyshev(seed in 0u64..1000, lambda in 0.001f64..2.0) {
            let f = GridFunction::random_bounded(seed, -1.0, 3.0, 0.0625).unwrap();
            prop_assert!(f.distribution_bound(lambda) <= f.l1_norm());
        }
    }
}
