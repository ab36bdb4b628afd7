use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Strictly increasing sample radii starting at exactly 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    radii: Vec<f64>,
    refinement_hint: Option<f64>,
}

impl RadialGrid {
    pub fn from_radii(radii: Vec<f64>) -> Result<Self> {
        if radii.len() < 2 {
            return Err(Error::InvalidInput("a grid needs at least two radii".into()));
        }
        if radii[0] != 0.0 {
            return Err(Error::InvalidInput("the first radius must be exactly 0".into()));
        }
        if radii.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::InvalidInput(
                "radii must be finite and strictly increasing".into(),
            ));
        }
        Ok(RadialGrid {
            radii,
            refinement_hint: None,
        })
    }

    /// Uniform grid on `[0, r_max]` whose spacing is the largest value `≤ h`
    /// that divides `r_max`.
    pub fn uniform(r_max: f64, h: f64) -> Result<Self> {
        if !(r_max > 0.0 && h > 0.0 && r_max.is_finite()) {
            return Err(Error::InvalidInput("uniform grid needs r_max > 0 and h > 0".into()));
        }
        let cells = libm::ceil(r_max / h - 1e-9).max(1.0) as usize;
        Self::uniform_cells(r_max, cells)
    }

    pub fn uniform_cells(r_max: f64, cells: usize) -> Result<Self> {
        if cells == 0 || !(r_max > 0.0) {
            return Err(Error::InvalidInput("uniform grid needs at least one cell".into()));
        }
        let radii = (0..=cells).map(|i| r_max * (i as f64 / cells as f64)).collect();
        Self::from_radii(radii)
    }

    /// Spacing `h0·max(1, r)`: uniform near the origin, logarithmic beyond 1.
    pub fn graded(r_max: f64, h0: f64) -> Result<Self> {
        graded_from(0.0, r_max, h0).and_then(Self::from_radii)
    }

    /// Uniform spacing `h` up to `hint − width`, then cells of half the
    /// remaining gap (at most `h`, at least `h_min`) up to `hint`.
    pub fn refined_toward(hint: f64, h: f64, width: f64, h_min: f64) -> Result<Self> {
        if !(hint > width && width > 0.0 && h >= h_min && h_min > 0.0) {
            return Err(Error::InvalidInput(
                "refinement needs hint > width > 0 and h ≥ h_min > 0".into(),
            ));
        }
        let start = hint - width;
        let mut radii: Vec<f64> = Self::uniform(start, h)?.radii;
        let mut r = start;
        while r < hint {
            let gap = hint - r;
            let s = (0.5 * gap).min(h).max(h_min);
            r = if gap - s < 0.5 * h_min { hint } else { r + s };
            radii.push(r);
        }
        let mut g = Self::from_radii(radii)?;
        g.refinement_hint = Some(hint);
        Ok(g)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    pub fn refinement_hint(&self) -> Option<f64> {
        self.refinement_hint
    }

    /// Largest cell width.
    pub fn max_spacing(&self) -> f64 {
        self.radii.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Grid with every cell split at its midpoint.
    pub fn halved(&self) -> Self {
        let mut radii = Vec::with_capacity(2 * self.radii.len() - 1);
        for w in self.radii.windows(2) {
            radii.push(w[0]);
            radii.push(0.5 * (w[0] + w[1]));
        }
        radii.push(self.r_max());
        RadialGrid {
            radii,
            refinement_hint: self.refinement_hint,
        }
    }

    /// Index of the first node `≥ r`, or `len()` when `r > r_max`.
    pub fn index_at_or_after(&self, r: f64) -> usize {
        self.radii.partition_point(|&x| x < r)
    }
}

/// Nodes from `r0` to `r1` with spacing `h0·max(1, r)`, last node exactly `r1`.
pub(crate) fn graded_from(r0: f64, r1: f64, h0: f64) -> Result<Vec<f64>> {
    if !(r1 > r0 && r0 >= 0.0 && h0 > 0.0 && r1.is_finite()) {
        return Err(Error::InvalidInput("graded grid needs 0 ≤ r0 < r1 and h0 > 0".into()));
    }
    let mut radii = alloc::vec![r0];
    let mut r = r0;
    loop {
        let step = h0 * r.max(1.0);
        if r + 1.5 * step >= r1 {
            break;
        }
        r += step;
        radii.push(r);
    }
    radii.push(r1);
    Ok(radii)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_spacing_divides_range() {
        let g = RadialGrid::uniform(10.0, 1e-3).unwrap();
        assert_eq!(g.len(), 10_001);
        assert_eq!(g.r_max(), 10.0);
        assert_eq!(g.radii()[0], 0.0);
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(RadialGrid::from_radii(alloc::vec![0.0]).is_err());
        assert!(RadialGrid::from_radii(alloc::vec![0.1, 0.2]).is_err());
        assert!(RadialGrid::from_radii(alloc::vec![0.0, 0.2, 0.2]).is_err());
    }

    #[test]
    fn refined_grid_reaches_hint_with_small_cells() {
        let g = RadialGrid::refined_toward(2.0, 0.1, 0.5, 1e-4).unwrap();
        assert_eq!(g.r_max(), 2.0);
        assert_eq!(g.refinement_hint(), Some(2.0));
        let last = g.radii()[g.len() - 1] - g.radii()[g.len() - 2];
        assert!(last <= 2e-4, "{last}");
    }

    #[test]
    fn halving_keeps_nodes() {
        let g = RadialGrid::uniform(1.0, 0.25).unwrap();
        let h = g.halved();
        assert_eq!(h.len(), 9);
        assert_eq!(h.radii()[2], g.radii()[1]);
    }

    proptest! {
        #[test]
        fn graded_grids_are_valid(r_max in 0.5f64..500.0, h0 in 1e-3f64..0.2) {
            let g = RadialGrid::graded(r_max, h0).unwrap();
            prop_assert_eq!(g.r_max(), r_max);
            for w in g.radii().windows(2) {
                prop_assert!(w[1] > w[0]);
                prop_assert!(w[1] - w[0] <= 1.5 * h0 * w[0].max(1.0) + 1e-12);
            }
        }
    }
}
