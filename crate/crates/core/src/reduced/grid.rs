use serde::{Deserialize, Serialize};

use super::Potential;
use crate::error::{Error, Result};
use crate::haar::{p_l, p_lambda};

/// Closed interval with `points` interior nodes; the endpoints carry the
/// Dirichlet condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

/// Relative axis `x_b`, running from the chamber margin to `hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelativeAxis {
    pub hi: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub chamber_margin: f64,
    #[serde(default)]
    pub sl_constraint: bool,
    /// Mean log-invariant axis, or `Q^n` for the d'Alembert chart.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<AxisRange>,
    #[serde(default)]
    pub relative: Vec<RelativeAxis>,
    /// Replace the radial density by 1 (test hook).
    #[serde(default)]
    pub flat_measure: bool,
}

fn scaled_points(points: usize, factor: f64) -> usize {
    ((points + 1) as f64 * factor).round().max(2.0) as usize - 1
}

impl GridSpec {
    /// Enlarges the box by `factor` at fixed spacing. The log trace axis
    /// grows about its midpoint, every other axis away from its lower end.
    pub fn scaled(&self, factor: f64, linear: bool) -> GridSpec {
        let eps = self.chamber_margin;
        let relative = self
            .relative
            .iter()
            .map(|r| {
                let h = (r.hi - eps) / (r.points + 1) as f64;
                let np = scaled_points(r.points, factor);
                RelativeAxis {
                    hi: eps + (np + 1) as f64 * h,
                    points: np,
                }
            })
            .collect();
        let trace = self.trace.map(|t| {
            let h = (t.hi - t.lo) / (t.points + 1) as f64;
            let np = scaled_points(t.points, factor);
            let len = (np + 1) as f64 * h;
            let lo = if linear { t.lo } else { 0.5 * (t.lo + t.hi) - 0.5 * len };
            AxisRange {
                lo,
                hi: lo + len,
                points: np,
            }
        });
        GridSpec {
            trace,
            relative,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    /// `(q, x_b = q^b - q^{b+1})`; `trace` is false under the SL constraint.
    Log { n: usize, trace: bool },
    /// `(Q^n, x_b = Q^b - Q^{b+1})`.
    Linear { n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub lo: f64,
    pub h: f64,
    pub points: usize,
}

impl Axis {
    fn new(lo: f64, hi: f64, points: usize) -> Self {
        Axis {
            lo,
            h: (hi - lo) / (points + 1) as f64,
            points,
        }
    }

    /// Coordinate at fractional node position `t` (node `i` sits at `t = i`).
    pub fn at(&self, t: f64) -> f64 {
        self.lo + (t + 1.0) * self.h
    }
}

/// Tensor-product grid with optional removal of nodes outside a well.
#[derive(Debug, Clone)]
pub struct Grid {
    chart: Chart,
    axes: Vec<Axis>,
    strides: Vec<usize>,
    flat: bool,
    active: Vec<usize>,
    slot: Vec<usize>,
}

impl Grid {
    pub fn new(spec: &GridSpec, linear: bool, pot: &Potential) -> Result<Grid> {
        let bad = |m: String| Err(Error::InvalidGrid(m));
        let n = spec.n;
        let eps = spec.chamber_margin;
        if n == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return bad(format!("chamber_margin must be positive, got {eps}"));
        }
        if spec.relative.len() != n - 1 {
            return bad(format!("n = {n} needs {} relative axes, got {}", n - 1, spec.relative.len()));
        }
        let chart = if linear {
            if spec.sl_constraint {
                return bad("the SL constraint is not available in the d'Alembert chart".into());
            }
            Chart::Linear { n }
        } else {
            Chart::Log {
                n,
                trace: !spec.sl_constraint,
            }
        };
        let mut axes = Vec::new();
        match (spec.sl_constraint, spec.trace) {
            (false, Some(t)) => {
                if !(t.lo < t.hi && t.lo.is_finite() && t.hi.is_finite()) || t.points == 0 {
                    return bad(format!("trace axis [{}, {}] with {} points is empty", t.lo, t.hi, t.points));
                }
                if linear && t.lo < 0.0 {
                    return bad(format!("Q^n axis must start at a non-negative value, got {}", t.lo));
                }
                axes.push(Axis::new(t.lo, t.hi, t.points));
            }
            (false, None) => return bad("trace axis required without the SL constraint".into()),
            (true, Some(_)) => return bad("trace axis given together with the SL constraint".into()),
            (true, None) => {}
        }
        for (b, r) in spec.relative.iter().enumerate() {
            if !(r.hi > eps && r.hi.is_finite()) || r.points == 0 {
                return bad(format!("relative axis {} must satisfy hi > chamber_margin with points > 0", b + 1));
            }
            axes.push(Axis::new(eps, r.hi, r.points));
        }
        if axes.is_empty() {
            return bad("grid has no axes".into());
        }
        let mut strides = vec![1; axes.len()];
        for d in (0..axes.len() - 1).rev() {
            strides[d] = strides[d + 1] * axes[d + 1].points;
        }
        let total = strides[0] * axes[0].points;
        let mut grid = Grid {
            chart,
            axes,
            strides,
            flat: spec.flat_measure,
            active: Vec::new(),
            slot: vec![usize::MAX; total],
        };
        let mut idx = vec![0; grid.axes.len()];
        for lin in 0..total {
            grid.unravel(lin, &mut idx);
            let y = grid.node(&idx);
            if pot.admits(grid.qbar(&y)) {
                grid.slot[lin] = grid.active.len();
                grid.active.push(lin);
            }
        }
        if grid.active.is_empty() {
            return bad("no grid node lies inside the potential well".into());
        }
        Ok(grid)
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.points).collect()
    }

    pub fn total_nodes(&self) -> usize {
        self.slot.len()
    }

    /// Linear indices of nodes carrying unknowns, in matrix order.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn active_slot(&self, lin: usize) -> Option<usize> {
        self.slot.get(lin).copied().filter(|&s| s != usize::MAX)
    }

    pub fn n(&self) -> usize {
        match self.chart {
            Chart::Log { n, .. } | Chart::Linear { n } => n,
        }
    }

    pub fn unravel(&self, mut lin: usize, idx: &mut [usize]) {
        for (d, s) in self.strides.iter().enumerate() {
            idx[d] = lin / s;
            lin %= s;
        }
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn node(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().zip(&self.axes).map(|(&i, a)| a.at(i as f64)).collect()
    }

    /// Physical invariants: `q^1..q^n` (log chart) or `Q^1..Q^n`.
    pub fn physical(&self, y: &[f64]) -> Vec<f64> {
        match self.chart {
            Chart::Log { n, trace } => {
                let (qbar, x) = if trace { (y[0], &y[1..]) } else { (0.0, y) };
                let weighted: f64 = x.iter().enumerate().map(|(b, xb)| (b + 1) as f64 * xb).sum();
                let last = qbar - weighted / n as f64;
                tail_sums(last, x)
            }
            Chart::Linear { .. } => tail_sums(y[0], &y[1..]),
        }
    }

    /// Mean of the logarithmic invariants.
    pub fn qbar(&self, y: &[f64]) -> f64 {
        match self.chart {
            Chart::Log { trace: true, .. } => y[0],
            Chart::Log { trace: false, .. } => 0.0,
            Chart::Linear { n } => self.physical(y).iter().map(|q| q.ln()).sum::<f64>() / n as f64,
        }
    }

    /// Radial density at `y`.
    pub fn measure(&self, y: &[f64]) -> f64 {
        if self.flat {
            return 1.0;
        }
        let p = self.physical(y);
        match self.chart {
            Chart::Log { .. } => p_lambda(&p),
            Chart::Linear { .. } => p_l(&p),
        }
    }

    pub fn is_flat(&self) -> bool {
        self.flat
    }
}

/// `v^n = last`, `v^a = last + sum_{b >= a} x_b`.
fn tail_sums(last: f64, x: &[f64]) -> Vec<f64> {
    let n = x.len() + 1;
    let mut v = vec![last; n];
    for a in (0..n - 1).rev() {
        v[a] = v[a + 1] + x[a];
    }
    v
}
