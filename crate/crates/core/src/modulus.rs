//! Grid estimates of the first and second moduli of continuity.
//!
//! Both are suprema over uncountable sets. The estimates restrict the
//! evaluation points to a uniform grid and therefore approach the true value
//! from below as the grid is refined.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::function::{uniform_grid, FunctionHandle, Interval};

/// Grid size used when callers do not choose one.
pub const DEFAULT_MODULUS_GRID: usize = 2001;

/// `f` sampled on a uniform grid, answering `omega(f, delta)` queries in
/// linear time.
#[derive(Debug, Clone)]
pub struct SampledGrid {
    step: f64,
    values: Vec<f64>,
}

impl SampledGrid {
    pub fn new(f: &FunctionHandle, domain: Interval, grid_points: usize) -> Result<Self> {
        let xs = uniform_grid(domain.lo(), domain.hi(), grid_points)?;
        let values = xs.iter().map(|&t| f.eval(t)).collect::<Result<Vec<_>>>()?;
        Ok(Self { step: domain.len() / (grid_points - 1) as f64, values })
    }

    /// Grid spacing.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Largest `|f(s) - f(t)|` over grid pairs at most `delta` apart.
    ///
    /// Equivalent to the largest max-minus-min over windows of
    /// `floor(delta / step) + 1` consecutive samples.
    pub fn modulus(&self, delta: f64) -> f64 {
        let n = self.values.len();
        let span = libm::floor(delta / self.step * (1.0 + 1e-12));
        let width = if span >= (n - 1) as f64 { n - 1 } else { span as usize };
        if width == 0 {
            return 0.0;
        }
        let mut lows: VecDeque<usize> = VecDeque::new();
        let mut highs: VecDeque<usize> = VecDeque::new();
        let mut best: f64 = 0.0;
        for (i, &v) in self.values.iter().enumerate() {
            while lows.back().is_some_and(|&j| self.values[j] >= v) {
                lows.pop_back();
            }
            lows.push_back(i);
            while highs.back().is_some_and(|&j| self.values[j] <= v) {
                highs.pop_back();
            }
            highs.push_back(i);
            if i >= width {
                let start = i - width;
                while lows.front().is_some_and(|&j| j < start) {
                    lows.pop_front();
                }
                while highs.front().is_some_and(|&j| j < start) {
                    highs.pop_front();
                }
            }
            if i + 1 >= width.min(n) {
                let spread = self.values[*highs.front().unwrap()] - self.values[*lows.front().unwrap()];
                best = best.max(spread);
            }
        }
        best
    }
}

/// `omega(f, delta) = sup { |f(s) - f(t)| : |s - t| <= delta }`, estimated on
/// `grid_points` equally spaced points of `domain`.
pub fn modulus_of_continuity(f: &FunctionHandle, delta: f64, domain: Interval, grid_points: usize) -> Result<f64> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::NonPositiveDelta(delta));
    }
    Ok(SampledGrid::new(f, domain, grid_points)?.modulus(delta))
}

/// Second modulus `sup_{0<h<delta} sup_x |f(x+2h) - 2f(x+h) + f(x)|` with `x`
/// on a uniform grid and `x + 2h` kept inside the domain.
///
/// Step lengths `h` run over multiples of the grid spacing below the limit,
/// plus the limit itself; a table of running maxima makes repeated queries
/// cheap.
#[derive(Debug, Clone)]
pub struct SecondModulusTable {
    f: FunctionHandle,
    domain: Interval,
    xs: Vec<f64>,
    step: f64,
    running_max: Vec<f64>,
}

impl SecondModulusTable {
    /// Prepares queries with limits up to `h_max`.
    pub fn new(f: &FunctionHandle, domain: Interval, grid_points: usize, h_max: f64) -> Result<Self> {
        let xs = uniform_grid(domain.lo(), domain.hi(), grid_points)?;
        let step = domain.len() / (grid_points - 1) as f64;
        let mut table = Self { f: f.clone(), domain, xs, step, running_max: alloc::vec![0.0] };
        let h_cap = h_max.min(domain.len() / 2.0);
        let count = libm::ceil(h_cap / step) as usize;
        let mut best: f64 = 0.0;
        for j in 1..=count {
            best = best.max(table.second_difference_sup(j as f64 * step)?);
            table.running_max.push(best);
        }
        Ok(table)
    }

    fn second_difference_sup(&self, h: f64) -> Result<f64> {
        let hi = self.domain.hi();
        let mut best: f64 = 0.0;
        for &x in &self.xs {
            let far = x + 2.0 * h;
            if far > hi * (1.0 + 1e-12) + 1e-12 {
                break;
            }
            let d = self.f.eval(far.min(hi))? - 2.0 * self.f.eval(x + h)? + self.f.eval(x)?;
            best = best.max(d.abs());
        }
        Ok(best)
    }

    pub fn query(&self, delta_sqrt: f64) -> Result<f64> {
        if delta_sqrt.is_nan() || delta_sqrt <= 0.0 {
            return Err(Error::NonPositiveDelta(delta_sqrt));
        }
        let limit = delta_sqrt.min(self.domain.len() / 2.0);
        // Multiples of the step strictly below the limit.
        let below = libm::ceil(limit / self.step) as usize;
        let idx = below.saturating_sub(1).min(self.running_max.len() - 1);
        Ok(self.running_max[idx].max(self.second_difference_sup(limit)?))
    }
}

pub fn second_modulus(f: &FunctionHandle, delta_sqrt: f64, domain: Interval, grid_points: usize) -> Result<f64> {
    if delta_sqrt.is_nan() || delta_sqrt <= 0.0 {
        return Err(Error::NonPositiveDelta(delta_sqrt));
    }
    SecondModulusTable::new(f, domain, grid_points, delta_sqrt)?.query(delta_sqrt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    fn reg(name: &str) -> FunctionHandle {
        FunctionHandle::registry(name, 0).unwrap()
    }

    /// All grid pairs, quadratic time.
    fn brute_modulus(f: &FunctionHandle, delta: f64, n: usize) -> f64 {
        let xs = uniform_grid(0.0, 1.0, n).unwrap();
        let mut best: f64 = 0.0;
        for a in &xs {
            for b in &xs {
                if (a - b).abs() <= delta * (1.0 + 1e-12) {
                    best = best.max((f.value(*a) - f.value(*b)).abs());
                }
            }
        }
        best
    }

    #[test]
    fn constant_has_zero_moduli() {
        let c = FunctionHandle::constant(3.0, unit());
        assert_eq!(modulus_of_continuity(&c, 0.4, unit(), 101).unwrap(), 0.0);
        assert_eq!(second_modulus(&c, 0.2, unit(), 101).unwrap(), 0.0);
    }

    #[test]
    fn identity_modulus_is_delta() {
        let v = modulus_of_continuity(&reg("e1"), 0.3, unit(), 1001).unwrap();
        assert!((v - 0.3).abs() < 1e-3, "{v}");
    }

    #[test]
    fn abs_half_modulus_is_delta() {
        let v = modulus_of_continuity(&reg("abs_half"), 0.2, unit(), 1001).unwrap();
        assert!((v - 0.2).abs() < 1e-3, "{v}");
    }

    #[test]
    fn sliding_window_matches_pairwise_search() {
        for name in ["e2", "exp", "sin_scaled", "abs_half", "sqrt_abs", "e3"] {
            let f = reg(name);
            let grid = SampledGrid::new(&f, unit(), 101).unwrap();
            for delta in [0.001, 0.01, 0.013, 0.05, 0.33, 0.999, 1.0, 2.5] {
                let fast = grid.modulus(delta);
                let slow = brute_modulus(&f, delta, 101);
                assert!((fast - slow).abs() < 1e-15, "{name} {delta}: {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn modulus_is_monotone_and_vanishes() {
        let f = reg("sqrt_abs");
        let grid = SampledGrid::new(&f, unit(), 2001).unwrap();
        let mut prev = 0.0;
        for i in 1..200 {
            let v = grid.modulus(i as f64 * 0.005);
            assert!(v >= prev);
            prev = v;
        }
        let coarse = modulus_of_continuity(&f, 1e-4, unit(), 101).unwrap();
        let fine = modulus_of_continuity(&f, 1e-4, unit(), 100_001).unwrap();
        assert_eq!(coarse, 0.0);
        assert!(fine > 0.0 && fine <= 0.011);
    }

    #[test]
    fn rejects_nonpositive_steps() {
        assert!(matches!(modulus_of_continuity(&reg("e1"), 0.0, unit(), 11), Err(Error::NonPositiveDelta(_))));
        assert!(second_modulus(&reg("e1"), -0.1, unit(), 11).is_err());
        assert!(modulus_of_continuity(&reg("e1"), 0.1, unit(), 1).is_err());
    }

    #[test]
    fn affine_second_modulus_vanishes() {
        let affine = FunctionHandle::from_fn("affine", unit(), |t| 3.0 * t - 1.0);
        assert!(second_modulus(&affine, 0.3, unit(), 501).unwrap() < 1e-14);
    }

    #[test]
    fn square_second_modulus_is_two_h_squared() {
        let v = second_modulus(&reg("e2"), 0.1, unit(), 2001).unwrap();
        assert!((v - 0.02).abs() < 1e-4, "{v}");
        // Limits that are not multiples of the grid spacing.
        let table = SecondModulusTable::new(&reg("e2"), unit(), 101, 0.5).unwrap();
        for h in [0.0013f64, 0.017, 0.2345, 0.5, 0.9] {
            let want = 2.0 * h.min(0.5) * h.min(0.5);
            assert!((table.query(h).unwrap() - want).abs() < 1e-12);
        }
    }
}
