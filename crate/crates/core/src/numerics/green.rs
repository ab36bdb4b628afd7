//! Discrete radial Green operator
//!
//! ```text
//! U(r) = ∫_{r₀}^{r} t^{1−n} ∫_{r₀}^{t} s^{n−1} g(s) ds dt
//! ```
//!
//! evaluated at every node of a grid `r₀ < r₁ < … < r_M`. The integrand `g` is
//! replaced by its piecewise-linear interpolant and both radial weights are
//! integrated exactly on each cell, which makes the scheme second order, exact
//! for piecewise-linear data, and free of the `t^{1−n}` singularity when
//! `r₀ = 0` (the inner integral is `O(tⁿ)` there).
//!
//! Each cell contributes through five nonnegative weights, and the cumulative
//! sweep only adds nonnegative multiples of `g`. The map `g ↦ U` is therefore
//! monotone in floating point too, which the Picard iteration relies on.

use alloc::vec::Vec;

use crate::math;
use crate::numerics::quad::gauss_legendre_unit;

/// Number of Gauss points per cell; exact inner integrals for `n ≤ 22`.
const GAUSS_POINTS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
struct CellWeights {
    /// `∫ t^{1−n} dt` over the cell, multiplies the inner integral at the left node.
    carry: f64,
    outer_left: f64,
    outer_right: f64,
    inner_left: f64,
    inner_right: f64,
}

/// Precomputed cell weights for a fixed grid and dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenOperator {
    nodes: Vec<f64>,
    cells: Vec<CellWeights>,
    dim: u32,
}

impl GreenOperator {
    /// Builds the operator on `nodes` (strictly increasing, first node `>= 0`).
    pub fn new(nodes: &[f64], dim: u32) -> Self {
        debug_assert!(nodes.len() >= 2 && dim >= 3);
        let (gx, gw) = gauss_legendre_unit(GAUSS_POINTS);
        let n = dim as f64;
        let up = dim - 1;
        let cells = nodes
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let h = b - a;
                if a == 0.0 {
                    // Closed forms on [0, h]; `carry` is unused because the inner
                    // integral vanishes at the origin.
                    let hn = math::powi(h, dim);
                    return CellWeights {
                        carry: 0.0,
                        outer_left: h * h * (1.0 / (2.0 * n) - 1.0 / (3.0 * (n + 1.0))),
                        outer_right: h * h / (3.0 * (n + 1.0)),
                        inner_left: hn / (n * (n + 1.0)),
                        inner_right: hn / (n + 1.0),
                    };
                }
                // Substitute s = a + hσ, t = a + hτ with σ, τ ∈ [0, 1].
                let mut carry = 0.0;
                let mut outer_left = 0.0;
                let mut outer_right = 0.0;
                let mut inner_left = 0.0;
                let mut inner_right = 0.0;
                for (&tau, &wt) in gx.iter().zip(&gw) {
                    let t = a + h * tau;
                    let t_fac = 1.0 / math::powi(t, up);
                    carry += wt * t_fac;
                    // Inner integrals over σ ∈ [0, τ] of (a + hσ)^{n-1}·{1-σ, σ}.
                    let mut il = 0.0;
                    let mut ir = 0.0;
                    for (&sig, &ws) in gx.iter().zip(&gw) {
                        let s = tau * sig;
                        let m = ws * math::powi(a + h * s, up);
                        il += m * (1.0 - s);
                        ir += m * s;
                    }
                    outer_left += wt * t_fac * il * tau;
                    outer_right += wt * t_fac * ir * tau;
                    // Full-cell inner weights, accumulated with the outer nodes.
                    let m = wt * math::powi(t, up);
                    inner_left += m * (1.0 - tau);
                    inner_right += m * tau;
                }
                CellWeights {
                    carry: (carry * h).max(0.0),
                    outer_left: (outer_left * h * h).max(0.0),
                    outer_right: (outer_right * h * h).max(0.0),
                    inner_left: (inner_left * h).max(0.0),
                    inner_right: (inner_right * h).max(0.0),
                }
            })
            .collect();
        GreenOperator {
            nodes: nodes.to_vec(),
            cells,
            dim,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Writes `U(r_i)` into `out` for integrand samples `g` (same length as the grid).
    pub fn apply_into(&self, g: &[f64], out: &mut [f64]) {
        debug_assert_eq!(g.len(), self.nodes.len());
        debug_assert_eq!(out.len(), self.nodes.len());
        let mut inner = 0.0;
        let mut acc = 0.0;
        out[0] = 0.0;
        for (i, c) in self.cells.iter().enumerate() {
            acc += c.carry * inner + c.outer_left * g[i] + c.outer_right * g[i + 1];
            inner += c.inner_left * g[i] + c.inner_right * g[i + 1];
            out[i + 1] = acc;
        }
    }

    pub fn apply(&self, g: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; g.len()];
        self.apply_into(g, &mut out);
        out
    }

    /// The inner integrals `∫_{r₀}^{r_i} s^{n−1} g(s) ds` at every node.
    pub fn inner(&self, g: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; g.len()];
        let mut inner = 0.0;
        for (i, c) in self.cells.iter().enumerate() {
            inner += c.inner_left * g[i] + c.inner_right * g[i + 1];
            out[i + 1] = inner;
        }
        out
    }
}
