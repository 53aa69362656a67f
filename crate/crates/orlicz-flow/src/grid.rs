//! Finite weighted measures and modular integrals.
//!
//! Everything downstream lives on a fixed finite node set `{0, …, n−1}`
//! carrying strictly positive weights `wᵢ`. A grid function is a plain
//! `Vec<f64>` of node values; integrals are weighted sums with the
//! extended-real convention that `+∞` dominates.

use crate::error::{Error, Result};

/// Values of a function on the nodes of a [`GridMeasure`].
pub type GridFunction = Vec<f64>;

/// A finite measure on `n` nodes: strictly positive weights plus optional
/// spatial labels (node coordinates, used by the PDE assembly).
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeasure {
    weights: Vec<f64>,
    labels: Option<Vec<f64>>,
    mass: f64,
}

impl GridMeasure {
    /// Validates and builds a measure. Weights must be finite and `> 0`;
    /// labels, when given, must match the weight count.
    pub fn new(weights: Vec<f64>, labels: Option<Vec<f64>>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidMeasure("empty weight list".into()));
        }
        for (i, w) in weights.iter().enumerate() {
            if !w.is_finite() || *w <= 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "weight {w} at node {i} (weights must be finite and positive)"
                )));
            }
        }
        if let Some(l) = &labels {
            if l.len() != weights.len() {
                return Err(Error::InvalidMeasure(format!(
                    "{} labels for {} weights",
                    l.len(),
                    weights.len()
                )));
            }
            if l.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidMeasure("non-finite label".into()));
            }
        }
        let mass = weights.iter().sum();
        Ok(GridMeasure {
            weights,
            labels,
            mass,
        })
    }

    /// Trapezoid measure on `n ≥ 2` equispaced nodes spanning `[0, length]`,
    /// labels set to the node coordinates.
    pub fn uniform_interval(n: usize, length: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidMeasure(format!(
                "interval grid needs at least 2 nodes, got {n}"
            )));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidMeasure(format!("interval length {length}")));
        }
        let h = length / (n - 1) as f64;
        let mut weights = vec![h; n];
        weights[0] = h / 2.0;
        weights[n - 1] = h / 2.0;
        let labels: Vec<f64> = (0..n)
            .map(|i| length * i as f64 / (n - 1) as f64)
            .collect();
        GridMeasure::new(weights, Some(labels))
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> Option<&[f64]> {
        self.labels.as_deref()
    }

    /// Total mass `Σ wᵢ`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Node spacing if the labels form a uniform partition of an interval.
    pub fn uniform_spacing(&self) -> Option<f64> {
        let labels = self.labels.as_ref()?;
        if labels.len() < 2 {
            return None;
        }
        let h = labels[1] - labels[0];
        if h <= 0.0 {
            return None;
        }
        let even = labels
            .windows(2)
            .all(|p| ((p[1] - p[0]) - h).abs() <= 1e-12 * h.abs().max(1.0));
        even.then_some(h)
    }

    pub fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.weights.len() {
            return Err(Error::ShapeMismatch {
                expected: self.weights.len(),
                got: f.len(),
            });
        }
        Ok(())
    }
}

/// Convenience constructor mirroring [`GridMeasure::new`].
pub fn make_grid(weights: Vec<f64>, labels: Option<Vec<f64>>) -> Result<GridMeasure> {
    GridMeasure::new(weights, labels)
}

/// Weighted sum `Σ wᵢ f(i)` with the extended-real convention: any `+∞`
/// entry makes the integral `+∞` (even against `−∞`, since modular
/// integrands are bounded below and only degenerate upward); otherwise any
/// `−∞` entry gives `−∞`. NaN entries are rejected.
pub fn integrate(f: &[f64], grid: &GridMeasure) -> Result<f64> {
    grid.check_len(f)?;
    let mut sum = 0.0;
    let mut pos_inf = false;
    let mut neg_inf = false;
    for (w, v) in grid.weights.iter().zip(f) {
        if v.is_nan() {
            return Err(Error::Domain("NaN integrand value".into()));
        } else if *v == f64::INFINITY {
            pos_inf = true;
        } else if *v == f64::NEG_INFINITY {
            neg_inf = true;
        } else {
            sum += w * v;
        }
    }
    Ok(if pos_inf {
        f64::INFINITY
    } else if neg_inf {
        f64::NEG_INFINITY
    } else {
        sum
    })
}
