use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform energy grid with trapezoid weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyGrid<T> {
    min: T,
    max: T,
    count: usize,
}

impl<T: Real> EnergyGrid<T> {
    pub fn new(min: T, max: T, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::InvalidGrid(format!("bounds {min}, {max} must be finite")));
        }
        if min >= max {
            return Err(Error::InvalidGrid(format!("E_min = {min} must be below E_max = {max}")));
        }
        if count < 2 {
            return Err(Error::InvalidGrid(format!("count = {count} must be at least 2")));
        }
        Ok(Self { min, max, count })
    }

    pub fn min(&self) -> T {
        self.min
    }

    pub fn max(&self) -> T {
        self.max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> T {
        (self.max - self.min) / T::from_usize(self.count - 1).expect("grid size")
    }

    pub fn node(&self, i: usize) -> T {
        if i + 1 == self.count {
            return self.max;
        }
        self.min + self.spacing() * T::from_usize(i).expect("grid index")
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.count).map(|i| self.node(i)).collect()
    }

    pub fn weights(&self) -> Vec<T> {
        let h = self.spacing();
        let mut w = vec![h; self.count];
        w[0] = h / T::lit(2.0);
        w[self.count - 1] = h / T::lit(2.0);
        w
    }

    /// Trapezoid rule for samples taken at the nodes.
    pub fn integrate(&self, values: &[T]) -> T {
        assert_eq!(values.len(), self.count, "one sample per node");
        values.iter().zip(self.weights()).fold(T::zero(), |acc, (v, w)| acc + *v * w)
    }

    /// Same span with `2·count - 1` nodes (every old node kept).
    pub fn refined(&self) -> Self {
        Self { count: 2 * self.count - 1, ..*self }
    }
}

/// Parses `min:max:count`.
impl<T: Real> FromStr for EnergyGrid<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [lo, hi, n] = parts[..] else {
            return Err(Error::InvalidGrid(format!("expected min:max:count, got {s:?}")));
        };
        let num = |x: &str| {
            x.parse::<f64>().map_err(|_| Error::InvalidGrid(format!("{x:?} is not a number")))
        };
        let count = n
            .parse::<usize>()
            .map_err(|_| Error::InvalidGrid(format!("{n:?} is not a node count")))?;
        Self::new(T::lit(num(lo)?), T::lit(num(hi)?), count)
    }
}
