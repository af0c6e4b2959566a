//! Atoms, truncated Hilbert transforms, `H¹` estimates, and BMO lower bounds
//! over three interval grids.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::block_space::{BlockSpace, BlockVector};
use crate::ergodic::{ergodic_hilbert, sample_points, Observable, RotationSystem};
use crate::error::{Error, Result};
use crate::grid::{check_step, GridFunction};

pub const DEFAULT_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomShape {
    Haar,
    Randomized(u64),
}

/// Mean-zero profile supported in `[a, b]` with `sup |a| ≤ 1/(b − a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    a: f64,
    b: f64,
    profile: GridFunction,
}

fn lattice_index(x: f64, step: f64, what: &'static str) -> Result<i64> {
    let u = x / step;
    let r = u.round();
    if (u - r).abs() > 1e-9 {
        return Err(Error::Misaligned { what, value: x, step });
    }
    Ok(r as i64)
}

pub fn make_atom(a: f64, b: f64, shape: AtomShape, step: f64) -> Result<Atom> {
    check_step(step)?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::DegenerateInterval { a, b });
    }
    let first = lattice_index(a, step, "atom start")?;
    let cells = (lattice_index(b, step, "atom end")? - first) as usize;
    let height = 1.0 / (b - a);
    let samples = match shape {
        AtomShape::Haar => {
            if cells % 2 != 0 {
                return Err(crate::error::invalid(format!(
                    "haar atom on [{a}, {b}] needs an even number of cells, got {cells}"
                )));
            }
            (0..cells).map(|i| if i < cells / 2 { height } else { -height }).collect()
        }
        AtomShape::Randomized(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v: Vec<f64> = (0..cells).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let mean = v.iter().sum::<f64>() / cells as f64;
            v.iter_mut().for_each(|x| *x -= mean);
            let top = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if top == 0.0 {
                v
            } else {
                v.iter().map(|x| x * height / top).collect()
            }
        }
    };
    let profile = GridFunction::new(first as f64 * step, step, samples)?;
    Ok(Atom { a, b, profile })
}

impl Atom {
    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn profile(&self) -> &GridFunction {
        &self.profile
    }

    pub fn into_profile(self) -> GridFunction {
        self.profile
    }

    pub fn shift(&self, tau: f64) -> Self {
        Self { a: self.a + tau, b: self.b + tau, profile: self.profile.shift(tau) }
    }

    /// `∫ a`.
    pub fn integral(&self) -> f64 {
        self.profile.prefix().total()
    }

    pub fn sup(&self) -> f64 {
        self.profile.sup_norm()
    }
}

fn hilbert_from_jumps(jumps: &[(f64, f64)], x: f64, epsilon: f64) -> f64 {
    -jumps
        .iter()
        .map(|&(u, d)| d * ((u - x).max(epsilon).ln() + (x - u).max(epsilon).ln()))
        .sum::<f64>()
}

/// `∫_{t>ε} (f(x+t) − f(x−t))/t dt`, exact for a step function.
pub fn hilbert_line(f: &GridFunction, x: f64, epsilon: f64) -> Result<f64> {
    check_epsilon(f, epsilon)?;
    Ok(hilbert_from_jumps(&f.jumps(), x, epsilon))
}

fn check_epsilon(f: &GridFunction, epsilon: f64) -> Result<()> {
    if !(epsilon >= 0.5 * f.step()) || !epsilon.is_finite() {
        return Err(crate::error::invalid(format!(
            "epsilon {epsilon} is below half the grid step {}",
            f.step()
        )));
    }
    Ok(())
}

const GAUSS8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
];

fn gauss(a: f64, b: f64, g: &impl Fn(f64) -> f64) -> f64 {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    h * GAUSS8.iter().map(|&(t, w)| w * g(c + h * t)).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineH1 {
    /// `‖f‖₁ + ‖H̃_ε f‖₁`.
    pub norm: f64,
    pub l1: f64,
    pub hilbert_l1: f64,
    /// Estimated mass of `|H̃_ε f|` beyond the outer cutoff.
    pub tail_estimate: f64,
    pub epsilon: f64,
    /// Half-width of the integration window beyond the support.
    pub outer: f64,
}

/// `‖f‖₁ + ‖H̃_ε f‖₁` with the outer cutoff `2^20` support widths away.
pub fn h1_norm_line(f: &GridFunction, epsilon: f64) -> Result<LineH1> {
    let width = f.end() - f.origin();
    h1_norm_line_with(f, epsilon, width.max(f.step()) * 2f64.powi(20))
}

pub fn h1_norm_line_with(f: &GridFunction, epsilon: f64, outer: f64) -> Result<LineH1> {
    check_epsilon(f, epsilon)?;
    let jumps = f.jumps();
    let l1 = f.l1_norm();
    if jumps.is_empty() {
        return Ok(LineH1 { norm: l1, l1, hilbert_l1: 0.0, tail_estimate: 0.0, epsilon, outer });
    }
    let (lo, hi) = (jumps[0].0, jumps[jumps.len() - 1].0);
    let near = (hi - lo).max(epsilon);
    let g = |x: f64| hilbert_from_jumps(&jumps, x, epsilon).abs();

    let mut knots: Vec<f64> = jumps
        .iter()
        .flat_map(|&(u, _)| [u - epsilon, u, u + epsilon])
        .chain([lo - near, hi + near])
        .collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut hilbert_l1 = 0.0;
    for w in knots.windows(2) {
        let pieces = ((w[1] - w[0]) / epsilon).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / pieces as f64;
        hilbert_l1 += (0..pieces)
            .map(|i| gauss(w[0] + i as f64 * h, w[0] + (i + 1) as f64 * h, &g))
            .sum::<f64>();
    }
    // far field: doubling shells out to the outer cutoff, 4 pieces each
    let mut d = near;
    while d < outer {
        let e = (2.0 * d).min(outer);
        for (a, b) in [(lo - e, lo - d), (hi + d, hi + e)] {
            let h = (b - a) / 4.0;
            hilbert_l1 += (0..4).map(|i| gauss(a + i as f64 * h, a + (i + 1) as f64 * h, &g)).sum::<f64>();
        }
        d = e;
    }
    let centre = 0.5 * (lo + hi);
    let tail_estimate = [lo - d, hi + d].iter().map(|&x| g(x) * (x - centre).abs()).sum();
    Ok(LineH1 { norm: l1 + hilbert_l1, l1, hilbert_l1, tail_estimate, epsilon, outer })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErgodicH1 {
    /// `‖f‖₁ + ‖H_K f‖₁` as sample averages.
    pub norm: f64,
    pub l1: f64,
    pub hilbert_l1: f64,
    /// Sample average of `|S_K − S_{⌊K/2⌋}|`.
    pub diagnostic: f64,
}

pub fn h1_norm_ergodic<F: Observable + ?Sized>(
    system: &RotationSystem,
    f: &F,
    k_terms: usize,
    samples: usize,
) -> Result<ErgodicH1> {
    if samples == 0 {
        return Err(crate::error::invalid("need at least one sample point"));
    }
    let points = sample_points(samples);
    let rows: Vec<(f64, f64, f64)> = points
        .par_iter()
        .map(|&x| {
            let h = ergodic_hilbert(system, f, x, k_terms)?;
            Ok((f.eval(x).abs(), h.value.abs(), h.increment.abs()))
        })
        .collect::<Result<_>>()?;
    let n = samples as f64;
    let l1 = rows.iter().map(|r| r.0).sum::<f64>() / n;
    let hilbert_l1 = rows.iter().map(|r| r.1).sum::<f64>() / n;
    let diagnostic = rows.iter().map(|r| r.2).sum::<f64>() / n;
    Ok(ErgodicH1 { norm: l1 + hilbert_l1, l1, hilbert_l1, diagnostic })
}

/// Dyadic subintervals of `[lo, hi]` down to `max_depth` halvings, plus the
/// two grids shifted by a third and two thirds of the interval length at
/// each level; intervals are clipped to `[lo, hi]`.
pub fn interval_families(lo: f64, hi: f64, max_depth: usize) -> Vec<(f64, f64)> {
    let total = hi - lo;
    let mut out = Vec::new();
    for depth in 0..=max_depth {
        let len = total / 2f64.powi(depth as i32);
        for shift in [0.0, 1.0 / 3.0, 2.0 / 3.0] {
            let mut m = -1i64;
            loop {
                let a = lo + (shift + m as f64) * len;
                if a >= hi {
                    break;
                }
                let (ca, cb) = (a.max(lo), (a + len).min(hi));
                if cb > ca {
                    out.push((ca, cb));
                }
                m += 1;
            }
        }
    }
    out
}

fn check_depth(max_depth: usize) -> Result<()> {
    if max_depth == 0 {
        Err(crate::error::invalid("max_depth must be at least 1"))
    } else {
        Ok(())
    }
}

/// Cells of a uniform grid meeting `[a, b]`, with overlap lengths.
fn overlaps(origin: f64, step: f64, cells: usize, a: f64, b: f64) -> impl Iterator<Item = (usize, f64)> {
    let i0 = (((a - origin) / step).floor().max(0.0) as usize).min(cells);
    let i1 = (((b - origin) / step).ceil().max(0.0) as usize).min(cells);
    (i0..i1).filter_map(move |i| {
        let lo = origin + i as f64 * step;
        let w = b.min(lo + step) - a.max(lo);
        (w > 0.0).then_some((i, w))
    })
}

/// `(1/|I|) ∫_I |f − f_I|`.
pub fn mean_oscillation(f: &GridFunction, a: f64, b: f64) -> f64 {
    let len = b - a;
    let samples = f.samples();
    let cells: Vec<(usize, f64)> = overlaps(f.origin(), f.step(), samples.len(), a, b).collect();
    let mean = cells.iter().map(|&(i, w)| w * samples[i]).sum::<f64>() / len;
    cells.iter().map(|&(i, w)| w * (samples[i] - mean).abs()).sum::<f64>() / len
}

/// Largest mean oscillation over the three interval grids on the grid's
/// domain: a lower bound for `‖f‖_BMO` restricted to that domain.
pub fn bmo_norm(f: &GridFunction, max_depth: usize) -> Result<f64> {
    check_depth(max_depth)?;
    if f.is_empty() {
        return Ok(0.0);
    }
    Ok(interval_families(f.origin(), f.end(), max_depth)
        .par_iter()
        .map(|&(a, b)| mean_oscillation(f, a, b))
        .reduce(|| 0.0, f64::max))
}

/// A `B`-valued step function: one vector per grid cell, all in one space.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGridFunction {
    origin: f64,
    step: f64,
    space: Arc<BlockSpace>,
    /// Cell-major flat components.
    data: Vec<f64>,
}

impl BlockGridFunction {
    pub fn new(origin: f64, step: f64, space: Arc<BlockSpace>, cells: &[BlockVector]) -> Result<Self> {
        check_step(step)?;
        let dim = space.dim();
        let mut data = Vec::with_capacity(dim * cells.len());
        for v in cells {
            if v.space().as_ref() != space.as_ref() {
                return Err(Error::ShapeMismatch);
            }
            data.extend_from_slice(v.as_flat());
        }
        Ok(Self { origin, step, space, data })
    }

    pub fn from_flat(origin: f64, step: f64, space: Arc<BlockSpace>, data: Vec<f64>) -> Result<Self> {
        check_step(step)?;
        let dim = space.dim();
        if (dim == 0 && !data.is_empty()) || (dim > 0 && data.len() % dim != 0) {
            return Err(Error::ShapeMismatch);
        }
        Ok(Self { origin, step, space, data })
    }

    /// Independent uniform components in `[-1, 1]`.
    pub fn random(seed: u64, space: Arc<BlockSpace>, origin: f64, step: f64, cells: usize) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..cells * space.dim()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        Self::from_flat(origin, step, space, data)
    }

    pub fn space(&self) -> &Arc<BlockSpace> {
        &self.space
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        match self.space.dim() {
            0 => 0,
            d => self.data.len() / d,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn end(&self) -> f64 {
        self.origin + self.len() as f64 * self.step
    }

    pub fn cell(&self, i: usize) -> &[f64] {
        let d = self.space.dim();
        &self.data[i * d..(i + 1) * d]
    }

    /// `x ↦ ‖F(x)‖_B` on the same grid.
    pub fn pointwise_norm(&self) -> GridFunction {
        let samples = (0..self.len()).map(|i| self.space.norm_of(self.cell(i))).collect();
        GridFunction::new(self.origin, self.step, samples).expect("norms are finite")
    }

    /// `(1/|I|) ∫_I ‖F − F_I‖_B` with `F_I` the componentwise mean.
    pub fn mean_oscillation(&self, a: f64, b: f64) -> f64 {
        let len = b - a;
        let dim = self.space.dim();
        let cells: Vec<(usize, f64)> = overlaps(self.origin, self.step, self.len(), a, b).collect();
        let mut mean = vec![0.0; dim];
        for &(i, w) in &cells {
            for (m, v) in mean.iter_mut().zip(self.cell(i)) {
                *m += w * v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= len);
        let mut diff = vec![0.0; dim];
        cells
            .iter()
            .map(|&(i, w)| {
                for ((d, v), m) in diff.iter_mut().zip(self.cell(i)).zip(&mean) {
                    *d = v - m;
                }
                w * self.space.norm_of(&diff)
            })
            .sum::<f64>()
            / len
    }
}

/// Vector-valued counterpart of [`bmo_norm`] over the same interval grids.
pub fn bmo_vector_norm(f: &BlockGridFunction, max_depth: usize) -> Result<f64> {
    check_depth(max_depth)?;
    if f.is_empty() {
        return Ok(0.0);
    }
    Ok(interval_families(f.origin(), f.end(), max_depth)
        .par_iter()
        .map(|&(a, b)| f.mean_oscillation(a, b))
        .reduce(|| 0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ergodic::CircleFunction;
    use proptest::prelude::*;

    #[test]
    fn haar_atom_on_unit_pair() {
        let atom = make_atom(0.0, 2.0, AtomShape::Haar, 0.25).unwrap();
        let p = atom.profile();
        assert_eq!(p.value_at(0.5), 0.5);
        assert_eq!(p.value_at(1.5), -0.5);
        assert_eq!(atom.integral(), 0.0);
        assert_eq!(atom.sup(), 0.5);
        let moved = atom.shift(3.0);
        assert_eq!(moved.profile().l1_norm(), p.l1_norm());
        assert_eq!(moved.sup(), atom.sup());
        assert!(make_atom(1.0, 1.0, AtomShape::Haar, 0.25).is_err());
        assert!(make_atom(0.0, 0.75, AtomShape::Haar, 0.25).is_err());
        assert!(make_atom(0.1, 1.0, AtomShape::Haar, 0.25).is_err());
    }

    #[test]
    fn randomized_atom_invariants() {
        let atom = make_atom(0.0, 1.0, AtomShape::Randomized(7), 1.0 / 64.0).unwrap();
        // direct integration over the cells
        let v = atom.profile().samples();
        let integral: f64 = v.iter().map(|x| x / 64.0).sum();
        assert!(integral.abs() <= 1e-12);
        let sup = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(sup <= 1.0 + 1e-15);
        assert!(v.iter().all(|x| x.abs() <= 1.0 + 1e-15));
    }

    fn hilbert_oracle(f: &GridFunction, x: f64, eps: f64, reach: f64, h: f64) -> f64 {
        let steps = ((reach - eps) / h).round() as usize;
        (0..steps)
            .map(|i| {
                let t = eps + (i as f64 + 0.5) * h;
                (f.value_at(x + t) - f.value_at(x - t)) / t
            })
            .sum::<f64>()
            * h
    }

    #[test]
    fn hilbert_examples() {
        let step = 0.125;
        let even = GridFunction::tent(-2.0, 2.0, step).unwrap();
        assert!(hilbert_line(&even, 0.0, step).unwrap().abs() < 1e-13);
        let flat = GridFunction::indicator(1.0, 3.0, step).unwrap();
        assert!(hilbert_line(&flat, 2.0, step).unwrap().abs() < 1e-13);
        assert!(hilbert_line(&flat, 2.0, step / 4.0).is_err());

        let atom = make_atom(0.0, 2.0, AtomShape::Haar, step).unwrap();
        let f = atom.profile();
        let eps = step;
        assert!((hilbert_line(f, 1.0, eps).unwrap() - eps.ln()).abs() < 1e-13);
        for x in [1.0, 0.3, -0.7, 2.9] {
            let exact = hilbert_line(f, x, eps).unwrap();
            let oracle = hilbert_oracle(f, x, eps, 8.0, 1e-5);
            assert!((exact - oracle).abs() < 1e-4, "x={x}: {exact} vs {oracle}");
        }
    }

    #[test]
    fn h1_line_examples() {
        let zero = GridFunction::zero(0.25).unwrap();
        assert_eq!(h1_norm_line(&zero, 0.25).unwrap().norm, 0.0);

        let step = 1.0 / 16.0;
        let atom = make_atom(0.0, 2.0, AtomShape::Haar, step).unwrap();
        let coarse = h1_norm_line(atom.profile(), step).unwrap();
        let fine = h1_norm_line(atom.profile(), step / 2.0).unwrap();
        assert!(coarse.norm.is_finite());
        assert!((coarse.norm - fine.norm).abs() <= 0.05 * fine.norm);
        assert!(coarse.tail_estimate < 1e-4 * coarse.hilbert_l1);
    }

    #[test]
    fn h1_atoms_stay_in_band() {
        let step = 1.0 / 16.0;
        let norms: Vec<f64> = (-3..=6)
            .map(|j| {
                let w = 2f64.powi(j);
                let atom = make_atom(0.0, w, AtomShape::Haar, step).unwrap();
                h1_norm_line(atom.profile(), step / 2.0).unwrap().norm
            })
            .collect();
        let max = norms.iter().cloned().fold(0.0, f64::max);
        let min = norms.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min <= 3.0, "{norms:?}");
    }

    #[test]
    fn h1_ergodic_constant() {
        let sys = RotationSystem::map(crate::ergodic::DEFAULT_THETA).unwrap();
        let c = CircleFunction::Constant(-2.5);
        let h = h1_norm_ergodic(&sys, &c, 64, 256).unwrap();
        assert_eq!(h.hilbert_l1, 0.0);
        assert_eq!(h.norm, 2.5);
    }

    /// Every interval with endpoints on the `h`-lattice of `[lo, hi]`.
    fn exhaustive_bmo(f: &GridFunction, h: f64) -> f64 {
        let n = ((f.end() - f.origin()) / h).round() as usize;
        let mut best = 0.0f64;
        for i in 0..n {
            for j in i + 1..=n {
                let a = f.origin() + i as f64 * h;
                let b = f.origin() + j as f64 * h;
                let mean = f.integral(a, b) / (b - a);
                // fine midpoint sum at the cell resolution is exact here
                let m = ((b - a) / f.step()).round() as usize;
                let osc: f64 = (0..m)
                    .map(|k| (f.value_at(a + (k as f64 + 0.5) * f.step()) - mean).abs())
                    .sum::<f64>()
                    * f.step()
                    / (b - a);
                best = best.max(osc);
            }
        }
        best
    }

    #[test]
    fn bmo_examples() {
        let step = 0.125;
        let ind = GridFunction::new(-1.0, step, (0..24).map(|i| if (8..16).contains(&i) { 1.0 } else { 0.0 }).collect())
            .unwrap();
        let oracle = exhaustive_bmo(&ind, step);
        assert!((oracle - 0.5).abs() < 1e-12);
        let est = bmo_norm(&ind, 6).unwrap();
        assert!(est <= oracle + 1e-12);
        assert!(est >= 0.8 * oracle, "{est}");

        let c = GridFunction::new(0.0, step, vec![3.0; 40]).unwrap();
        assert!(bmo_norm(&c, 5).unwrap() < 1e-14);
        assert!(bmo_norm(&c, 0).is_err());
    }

    #[test]
    fn vector_bmo_examples() {
        let sp = BlockSpace::new(vec![1], 2.0).unwrap();
        let f = GridFunction::random_bounded(3, 0.0, 4.0, 0.125).unwrap();
        let cells: Vec<BlockVector> = f
            .samples()
            .iter()
            .map(|&v| BlockVector::from_flat(sp.clone(), vec![v]).unwrap())
            .collect();
        let big = BlockGridFunction::new(f.origin(), f.step(), sp, &cells).unwrap();
        let scalar = bmo_norm(&f, 5).unwrap();
        assert!((bmo_vector_norm(&big, 5).unwrap() - scalar).abs() <= 1e-12 * scalar);

        let sp2 = BlockSpace::new(vec![2, 3], 3.0).unwrap();
        let v = BlockVector::from_flat(sp2.clone(), vec![1.0, -2.0, 0.5, 4.0, 0.0]).unwrap();
        let constant = BlockGridFunction::new(0.0, 0.5, sp2.clone(), &vec![v; 12]).unwrap();
        assert!(bmo_vector_norm(&constant, 4).unwrap() < 1e-14);

        let other = BlockVector::zeros(BlockSpace::new(vec![5], 3.0).unwrap());
        assert!(BlockGridFunction::new(0.0, 0.5, sp2, &[other]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn factor_two(seed in any::<u64>(), s in 2.0f64..6.0, cells in 4usize..40) {
            let sp = BlockSpace::new(vec![2, 1, 3], s).unwrap();
            let f = BlockGridFunction::random(seed, sp, -1.0, 0.25, cells).unwrap();
            let lhs = bmo_norm(&f.pointwise_norm(), 5).unwrap();
            let rhs = bmo_vector_norm(&f, 5).unwrap();
            prop_assert!(lhs <= 2.0 * rhs + 1e-9);
        }

        #[test]
        fn bmo_invariances(seed in any::<u64>(), c in 0.1f64..10.0, k in -40i32..40, add in -5.0f64..5.0) {
            let f = GridFunction::random_bounded(seed, 0.0, 4.0, 0.125).unwrap();
            let base = bmo_norm(&f, 5).unwrap();
            prop_assert!((bmo_norm(&f.scale(c), 5).unwrap() - c * base).abs() <= 1e-12 * c * base.max(1.0));
            let moved = bmo_norm(&f.shift(k as f64 * 0.125), 5).unwrap();
            prop_assert!((moved - base).abs() <= 1e-12);
            let lifted = GridFunction::new(f.origin(), f.step(), f.samples().iter().map(|v| v + add).collect()).unwrap();
            prop_assert!((bmo_norm(&lifted, 5).unwrap() - base).abs() <= 1e-12);
        }
    }
}
