//! Rectangular evaluation grids over chart domains. Points are visited in
//! row-major order (last axis fastest) and a relative margin keeps samples
//! away from the domain boundary, where charts are often degenerate.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Default margin as a fraction of each axis width.
pub const DEFAULT_MARGIN: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct GridAxis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GridError {
    TooFewPoints { axis: String, count: usize },
    EmptyRange { axis: String },
    BadMargin { margin: f64 },
    NoAxes,
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::TooFewPoints { axis, count } => {
                write!(f, "axis '{axis}' has {count} point(s); at least 2 are required")
            }
            GridError::EmptyRange { axis } => write!(f, "axis '{axis}' has an empty range"),
            GridError::BadMargin { margin } => {
                write!(f, "margin {margin} must lie in [0, 0.5)")
            }
            GridError::NoAxes => write!(f, "grid has no axes"),
        }
    }
}

impl core::error::Error for GridError {}

#[derive(Clone, Debug)]
pub struct Grid {
    axes: Vec<GridAxis>,
    margin: f64,
}

impl Grid {
    pub fn new(axes: Vec<GridAxis>, margin: f64) -> Result<Self, GridError> {
        if axes.is_empty() {
            return Err(GridError::NoAxes);
        }
        if !(0.0..0.5).contains(&margin) {
            return Err(GridError::BadMargin { margin });
        }
        for axis in &axes {
            if axis.count < 2 {
                return Err(GridError::TooFewPoints {
                    axis: axis.name.clone(),
                    count: axis.count,
                });
            }
            if !(axis.min < axis.max) {
                return Err(GridError::EmptyRange {
                    axis: axis.name.clone(),
                });
            }
        }
        Ok(Self { axes, margin })
    }

    /// Uniform grid over a chart domain with the default margin.
    pub fn over_domain(
        names: &[String],
        domain: &[(f64, f64)],
        count: usize,
    ) -> Result<Self, GridError> {
        let axes = names
            .iter()
            .zip(domain)
            .map(|(name, (min, max))| GridAxis {
                name: name.clone(),
                min: *min,
                max: *max,
                count,
            })
            .collect();
        Self::new(axes, DEFAULT_MARGIN)
    }

    pub fn axes(&self) -> &[GridAxis] {
        &self.axes
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    /// Sample positions along one axis with the margin applied.
    pub fn axis_points(&self, axis: usize) -> Vec<f64> {
        let a = &self.axes[axis];
        let width = a.max - a.min;
        let lo = a.min + self.margin * width;
        let hi = a.max - self.margin * width;
        let step = (hi - lo) / (a.count - 1) as f64;
        (0..a.count).map(|k| lo + k as f64 * step).collect()
    }

    /// Point for a flat row-major index (last axis varies fastest).
    pub fn point(&self, mut index: usize) -> Vec<f64> {
        let mut coords = alloc::vec![0usize; self.axes.len()];
        for (i, axis) in self.axes.iter().enumerate().rev() {
            coords[i] = index % axis.count;
            index /= axis.count;
        }
        coords
            .iter()
            .enumerate()
            .map(|(i, &k)| self.axis_points(i)[k])
            .collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Same grid with every axis count multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Grid {
        let axes = self
            .axes
            .iter()
            .map(|a| GridAxis {
                name: a.name.clone(),
                min: a.min,
                max: a.max,
                count: a.count * factor,
            })
            .collect();
        Grid {
            axes,
            margin: self.margin,
        }
    }

    pub fn counts(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    pub fn counts_label(&self) -> String {
        let mut s = String::new();
        for (i, a) in self.axes.iter().enumerate() {
            if i > 0 {
                s.push('x');
            }
            s.push_str(&a.count.to_string());
        }
        s
    }
}
