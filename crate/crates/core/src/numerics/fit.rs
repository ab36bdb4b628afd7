//! Ordinary least-squares line fit with a normal-approximation confidence band.

/// Slope, intercept and the standard error of the slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub samples: usize,
}

impl LineFit {
    /// Two-sided 95% band for the slope.
    pub fn band95(&self) -> (f64, f64) {
        let w = 1.96 * self.slope_se;
        (self.slope - w, self.slope + w)
    }
}

/// Fits `y ≈ intercept + slope·x`. Returns `None` for fewer than three points
/// or degenerate abscissae.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len().min(ys.len());
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let dx = xs[i] - mx;
        sxx += dx * dx;
        sxy += dx * (ys[i] - my);
    }
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ssr = 0.0;
    for i in 0..n {
        let e = ys[i] - intercept - slope * xs[i];
        ssr += e * e;
    }
    let slope_se = libm::sqrt(ssr / (nf - 2.0) / sxx);
    Some(LineFit {
        slope,
        intercept,
        slope_se,
        samples: n,
    })
}

/// Log–log fit of `values` against `radii` over `[r_end/10, r_end]`, using at
/// most `max_samples` grid nodes nearest to log-spaced targets. Nodes with
/// nonpositive radius or value are skipped.
pub fn loglog_last_decade(radii: &[f64], values: &[f64], max_samples: usize) -> Option<LineFit> {
    let n = radii.len().min(values.len());
    if n < 3 || max_samples < 3 {
        return None;
    }
    let r_end = radii[n - 1];
    let r_start = r_end / 10.0;
    let first = radii[..n].partition_point(|&r| r < r_start);
    let mut xs = alloc::vec::Vec::new();
    let mut ys = alloc::vec::Vec::new();
    let mut last_idx = usize::MAX;
    for j in 0..max_samples {
        let target = r_start * libm::pow(10.0, j as f64 / (max_samples - 1) as f64);
        let mut i = radii[..n].partition_point(|&r| r < target).min(n - 1).max(first);
        if i > first && (radii[i] - target) > (target - radii[i - 1]) {
            i -= 1;
        }
        if i == last_idx || radii[i] <= 0.0 || !(values[i] > 0.0) {
            continue;
        }
        last_idx = i;
        xs.push(libm::log(radii[i]));
        ys.push(libm::log(values[i]));
    }
    fit_line(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use approx::assert_relative_eq;

    #[test]
    fn exact_line_has_zero_error() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.5 * x).collect();
        let f = fit_line(&xs, &ys).unwrap();
        assert_relative_eq!(f.slope, -0.5, max_relative = 1e-14);
        assert_relative_eq!(f.intercept, 3.0, max_relative = 1e-14);
        assert!(f.slope_se < 1e-14);
    }

    #[test]
    fn standard_error_matches_hand_computation() {
        // x = 0,1,2,3 ; y = 0,1,1,3 → slope 0.9, residuals 0.1,0.2,-0.7,0.4
        let f = fit_line(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.0, 1.0, 3.0]).unwrap();
        assert_relative_eq!(f.slope, 0.9, max_relative = 1e-14);
        let se = (0.7f64 / 2.0 / 5.0).sqrt();
        assert_relative_eq!(f.slope_se, se, max_relative = 1e-12);
    }

    #[test]
    fn last_decade_slope_of_a_power_law() {
        let radii: Vec<f64> = (0..=10_000).map(|i| i as f64 * 0.01).collect();
        let vals: Vec<f64> = radii.iter().map(|r| 3.0 * r.powf(1.7)).collect();
        let f = loglog_last_decade(&radii, &vals, 200).unwrap();
        assert_relative_eq!(f.slope, 1.7, max_relative = 1e-10);
        assert!(f.samples > 150);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(fit_line(&[1.0, 2.0], &[1.0, 2.0]).is_none());
        assert!(fit_line(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_none());
    }
}
