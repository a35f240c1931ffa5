use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A named scalar time series. `None` marks a gap: a sample that has no finite
/// value, such as a temperature at population inversion onset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSeries {
    pub name: String,
    pub units: String,
    pub times: Vec<f64>,
    pub values: Vec<Option<f64>>,
}

impl MeasureSeries {
    pub fn new(
        name: impl Into<String>,
        units: impl Into<String>,
        times: Vec<f64>,
        values: Vec<Option<f64>>,
    ) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::invalid(format!(
                "series has {} times but {} values",
                times.len(),
                values.len()
            )));
        }
        Ok(Self {
            name: name.into(),
            units: units.into(),
            times,
            values,
        })
    }

    /// Series without gaps.
    pub fn dense(
        name: impl Into<String>,
        units: impl Into<String>,
        times: Vec<f64>,
        values: Vec<f64>,
    ) -> Result<Self> {
        Self::new(name, units, times, values.into_iter().map(Some).collect())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Present values with their times.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times
            .iter()
            .zip(&self.values)
            .filter_map(|(&t, v)| v.map(|v| (t, v)))
    }

    pub fn gap_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    pub fn min(&self) -> Option<f64> {
        self.points().map(|(_, v)| v).reduce(f64::min)
    }

    pub fn max(&self) -> Option<f64> {
        self.points().map(|(_, v)| v).reduce(f64::max)
    }

    /// Arithmetic mean of the present samples.
    pub fn mean(&self) -> Option<f64> {
        let (sum, n) = self
            .points()
            .fold((0.0, 0usize), |(s, n), (_, v)| (s + v, n + 1));
        (n > 0).then(|| sum / n as f64)
    }

    /// Value at sample `k`, if present.
    pub fn value(&self, k: usize) -> Option<f64> {
        self.values.get(k).copied().flatten()
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied().flatten()
    }

    /// Trapezoidal integral of `max(-v, 0)` over consecutive present samples,
    /// i.e. the magnitude of the negative part.
    pub fn negative_area(&self) -> f64 {
        self.pairs()
            .map(|((t0, v0), (t1, v1))| 0.5 * (t1 - t0) * ((-v0).max(0.0) + (-v1).max(0.0)))
            .sum()
    }

    /// Cumulative trapezoidal integral; gaps break the accumulation and are carried as gaps.
    pub fn cumulative_integral(&self) -> Vec<Option<f64>> {
        let mut out = Vec::with_capacity(self.len());
        let mut acc = Some(0.0);
        for k in 0..self.len() {
            if k > 0 {
                acc = match (acc, self.values[k - 1], self.values[k]) {
                    (Some(a), Some(v0), Some(v1)) => {
                        Some(a + 0.5 * (self.times[k] - self.times[k - 1]) * (v0 + v1))
                    }
                    _ => None,
                };
            }
            out.push(acc);
        }
        out
    }

    /// Time derivative by second-order finite differences: central inside,
    /// one-sided three-point at the ends. A gap in any stencil point gives a gap.
    pub fn derivative(&self, name: impl Into<String>, units: impl Into<String>) -> Result<Self> {
        let n = self.len();
        if n < 3 {
            return Err(Error::invalid(format!(
                "derivative needs at least 3 samples, got {n}"
            )));
        }
        let t = &self.times;
        let v = |k: usize| self.value(k);
        let three_point = |at: usize, i: usize, j: usize, k: usize| -> Option<f64> {
            let (fi, fj, fk) = (v(i)?, v(j)?, v(k)?);
            let x = t[at];
            let (xi, xj, xk) = (t[i], t[j], t[k]);
            let wi = (2.0 * x - xj - xk) / ((xi - xj) * (xi - xk));
            let wj = (2.0 * x - xi - xk) / ((xj - xi) * (xj - xk));
            let wk = (2.0 * x - xi - xj) / ((xk - xi) * (xk - xj));
            Some(wi * fi + wj * fj + wk * fk)
        };
        let values = (0..n)
            .map(|k| match k {
                0 => three_point(0, 0, 1, 2),
                k if k == n - 1 => three_point(k, k - 2, k - 1, k),
                k => Some((v(k + 1)? - v(k - 1)?) / (t[k + 1] - t[k - 1])),
            })
            .collect();
        Self::new(name, units, t.clone(), values)
    }

    fn pairs(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
        (1..self.len()).filter_map(move |k| match (self.values[k - 1], self.values[k]) {
            (Some(a), Some(b)) => Some(((self.times[k - 1], a), (self.times[k], b))),
            _ => None,
        })
    }
}
