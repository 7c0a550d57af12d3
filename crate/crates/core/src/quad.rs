//! Gauss–Legendre panels, including grids graded geometrically out to very
//! large abscissae for integrands with power-law tails.

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

/// Quadrature nodes and weights; `∫ f ≈ Σ w_i f(x_i)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Grid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

fn reference_rule(order: usize) -> Result<Vec<(f64, f64)>> {
    GaussLegendre::new(order)
        .map(|rule| rule.as_node_weight_pairs().to_vec())
        .map_err(|e| Error::Argument(format!("Gauss-Legendre order {order}: {e}")))
}

/// Composite rule on `[a, b]` with `panels` equal panels.
pub fn uniform(a: f64, b: f64, panels: usize, order: usize) -> Result<Grid> {
    let rule = reference_rule(order)?;
    let width = (b - a) / panels as f64;
    let mut grid = Grid::default();
    for p in 0..panels {
        let lo = a + p as f64 * width;
        for &(x, w) in &rule {
            grid.nodes.push(lo + 0.5 * (x + 1.0) * width);
            grid.weights.push(0.5 * w * width);
        }
    }
    Ok(grid)
}

/// Rule for `∫_{x0}^{x0·e^{t_max}} f(x) dx` after the substitution
/// `x = x0·e^t`, with panels of width `panel_width` in `t`.
///
/// Weights carry the Jacobian `x`, so the grid integrates `f` directly.
pub fn log_graded(x0: f64, t_max: f64, panel_width: f64, order: usize) -> Result<Grid> {
    if !(x0 > 0.0 && t_max > 0.0 && panel_width > 0.0) {
        return Err(Error::Argument(format!(
            "log-graded grid needs positive x0, t_max, panel width (got {x0}, {t_max}, {panel_width})"
        )));
    }
    let panels = (t_max / panel_width).ceil() as usize;
    let t_grid = uniform(0.0, panels as f64 * panel_width, panels, order)?;
    let nodes: Vec<f64> = t_grid.nodes.iter().map(|&t| x0 * t.exp()).collect();
    let weights = t_grid
        .weights
        .iter()
        .zip(&nodes)
        .map(|(&w, &x)| w * x)
        .collect();
    Ok(Grid { nodes, weights })
}

/// `∫_0^∞ f(s) ds` for integrands that are smooth in `ln s`, bounded near
/// zero and decaying at least like `s^{-1-ε}`.
pub fn half_line(t_min: f64, t_max: f64, panels: usize, order: usize) -> Result<Grid> {
    let t_grid = uniform(t_min, t_max, panels, order)?;
    let nodes: Vec<f64> = t_grid.nodes.iter().map(|&t| t.exp()).collect();
    let weights = t_grid
        .weights
        .iter()
        .zip(&nodes)
        .map(|(&w, &x)| w * x)
        .collect();
    Ok(Grid { nodes, weights })
}
