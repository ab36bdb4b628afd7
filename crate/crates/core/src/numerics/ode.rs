//! Explicit adaptive Dormand–Prince 5(4) integration with a hard stop at a
//! blow-up threshold.
//!
//! When a monitored component crosses the threshold inside an accepted step,
//! the crossing cell is re-integrated with `refine_factor` fixed sub-steps,
//! `refine_rounds` times, and the crossing radius is read off the final cell by
//! linear interpolation of `1/y` (blow-up profiles are close to linear in `1/y`).

use alloc::vec::Vec;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        out[i] += h * s;
    }
    out
}

/// One Dormand–Prince step. Returns the fifth-order solution and the embedded
/// error vector.
pub fn dopri_step<const N: usize, F>(f: &F, r: f64, y: &[f64; N], h: f64) -> ([f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(r, y);
    let k2 = f(r + C2 * h, &axpy(y, h, &[(A21, &k1)]));
    let k3 = f(r + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]));
    let k4 = f(r + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(
        r + C5 * h,
        &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = f(
        r + h,
        &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    );
    let y5 = axpy(y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = f(r + h, &y5);
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y5, err)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub first_step: f64,
    pub max_step: f64,
    /// Monitored components stop the integration once they reach this value.
    pub threshold: f64,
    pub refine_factor: u32,
    pub refine_rounds: u32,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-8,
            atol: 1e-12,
            first_step: 1e-3,
            max_step: 0.25,
            threshold: 1e8,
            refine_factor: 10,
            refine_rounds: 2,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeStop {
    /// Reached the requested end radius.
    End,
    /// A monitored component crossed the threshold.
    Crossed {
        radius: f64,
        /// Width of the last refinement cell.
        cell: f64,
        component: usize,
    },
    /// Step size collapsed before the threshold; treated as a blow-up
    /// indication by callers when the solution is already large.
    StepUnderflow {
        radius: f64,
    },
    MaxSteps {
        radius: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub radii: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub stop: OdeStop,
}

fn crossed<const N: usize>(y: &[f64; N], monitored: &[usize], threshold: f64) -> bool {
    monitored.iter().any(|&i| !y[i].is_finite() || y[i] >= threshold)
}

/// Integrates `y' = f(r, y)` from `r0` to `r_end`, stopping early when any
/// component listed in `monitored` reaches `opts.threshold`.
pub fn integrate<const N: usize, F>(
    f: &F,
    r0: f64,
    y0: [f64; N],
    r_end: f64,
    monitored: &[usize],
    opts: &OdeOptions,
) -> Trajectory<N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut radii = alloc::vec![r0];
    let mut states = alloc::vec![y0];
    let mut r = r0;
    let mut y = y0;
    let mut h = opts.first_step.min(r_end - r0).max(0.0);
    let mut steps = 0usize;
    while r < r_end {
        if steps >= opts.max_steps {
            return Trajectory {
                radii,
                states,
                stop: OdeStop::MaxSteps { radius: r },
            };
        }
        steps += 1;
        h = h.min(r_end - r).min(opts.max_step);
        let min_step = 1e-14 * r.abs().max(1.0);
        if h < min_step {
            return Trajectory {
                radii,
                states,
                stop: OdeStop::StepUnderflow { radius: r },
            };
        }
        let (y_new, err) = dopri_step(f, r, &y, h);
        let mut norm = 0.0f64;
        let mut finite = true;
        for i in 0..N {
            if !y_new[i].is_finite() || !err[i].is_finite() {
                finite = false;
                break;
            }
            let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            norm = norm.max((err[i] / scale).abs());
        }
        if !finite {
            // Either the step jumped past a singularity or it is too long; a
            // crossing is confirmed only by the refinement below.
            if crossed_within(f, r, &y, h, monitored, opts) {
                let (radius, cell, component) = refine_crossing(f, r, y, h, monitored, opts);
                return Trajectory {
                    radii,
                    states,
                    stop: OdeStop::Crossed {
                        radius,
                        cell,
                        component,
                    },
                };
            }
            h *= 0.2;
            continue;
        }
        if norm <= 1.0 {
            if crossed(&y_new, monitored, opts.threshold) {
                let (radius, cell, component) = refine_crossing(f, r, y, h, monitored, opts);
                return Trajectory {
                    radii,
                    states,
                    stop: OdeStop::Crossed {
                        radius,
                        cell,
                        component,
                    },
                };
            }
            r = if r_end - (r + h) <= 1e-15 * r_end.abs() {
                r_end
            } else {
                r + h
            };
            y = y_new;
            radii.push(r);
            states.push(y);
            let grow = if norm == 0.0 {
                5.0
            } else {
                (0.9 * libm::pow(norm, -0.2)).clamp(0.2, 5.0)
            };
            h *= grow;
        } else {
            h *= (0.9 * libm::pow(norm, -0.2)).clamp(0.1, 0.9);
        }
    }
    Trajectory {
        radii,
        states,
        stop: OdeStop::End,
    }
}

fn crossed_within<const N: usize, F>(
    f: &F,
    r: f64,
    y: &[f64; N],
    h: f64,
    monitored: &[usize],
    opts: &OdeOptions,
) -> bool
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let sub = h / opts.refine_factor.max(1) as f64;
    let mut yy = *y;
    let mut rr = r;
    for _ in 0..opts.refine_factor.max(1) {
        let (next, _) = dopri_step(f, rr, &yy, sub);
        if crossed(&next, monitored, opts.threshold) {
            return true;
        }
        rr += sub;
        yy = next;
    }
    false
}

fn refine_crossing<const N: usize, F>(
    f: &F,
    mut r_a: f64,
    mut y_a: [f64; N],
    mut h: f64,
    monitored: &[usize],
    opts: &OdeOptions,
) -> (f64, f64, usize)
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let factor = opts.refine_factor.max(1);
    for _ in 0..opts.refine_rounds {
        let sub = h / factor as f64;
        let mut r = r_a;
        let mut y = y_a;
        let mut found = false;
        for _ in 0..factor {
            let (next, _) = dopri_step(f, r, &y, sub);
            if crossed(&next, monitored, opts.threshold) {
                found = true;
                break;
            }
            r += sub;
            y = next;
        }
        if !found {
            // The fixed sub-steps undershoot the adaptive step: the crossing
            // sits at the end of the original cell.
            r -= sub;
            y = {
                let mut yy = y_a;
                let mut rr = r_a;
                for _ in 0..factor - 1 {
                    yy = dopri_step(f, rr, &yy, sub).0;
                    rr += sub;
                }
                yy
            };
        }
        r_a = r;
        y_a = y;
        h = sub;
    }
    let (y_b, _) = dopri_step(f, r_a, &y_a, h);
    let target = 1.0 / opts.threshold;
    let mut best = (f64::INFINITY, monitored.first().copied().unwrap_or(0));
    for &c in monitored {
        let xa = if y_a[c] > 0.0 { 1.0 / y_a[c] } else { f64::INFINITY };
        let xb = if y_b[c].is_finite() && y_b[c] > 0.0 {
            1.0 / y_b[c]
        } else {
            0.0
        };
        if xb > target && y_b[c].is_finite() {
            continue;
        }
        let frac = if xa.is_finite() && xa > xb {
            ((xa - target) / (xa - xb)).clamp(0.0, 1.0)
        } else {
            1.0
        };
        if frac < best.0 {
            best = (frac, c);
        }
    }
    let frac = if best.0.is_finite() { best.0 } else { 1.0 };
    (r_a + frac * h, h, best.1)
}

/// Cubic Hermite resampling of a scalar component with stored derivative
/// component (`value_idx`, `deriv_idx`) onto increasing radii. Radii beyond the
/// trajectory map to `None`.
pub fn hermite_resample<const N: usize>(
    traj: &Trajectory<N>,
    value_idx: usize,
    deriv_idx: usize,
    radii: &[f64],
) -> Vec<Option<f64>> {
    let mut out = Vec::with_capacity(radii.len());
    let mut j = 0usize;
    let last = *traj.radii.last().unwrap();
    for &r in radii {
        if r > last || traj.radii.len() < 2 {
            out.push(if r == last {
                Some(traj.states.last().unwrap()[value_idx])
            } else {
                None
            });
            continue;
        }
        while j + 1 < traj.radii.len() - 1 && traj.radii[j + 1] < r {
            j += 1;
        }
        let (r0, r1) = (traj.radii[j], traj.radii[j + 1]);
        let (y0, y1) = (&traj.states[j], &traj.states[j + 1]);
        let h = r1 - r0;
        let s = ((r - r0) / h).clamp(0.0, 1.0);
        // Written as y0 + increments so constant data is reproduced exactly.
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        out.push(Some(
            y0[value_idx] + h01 * (y1[value_idx] - y0[value_idx]) + h * (h10 * y0[deriv_idx] + h11 * y1[deriv_idx]),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_growth_to_the_end() {
        let f = |_r: f64, y: &[f64; 1]| [y[0]];
        let t = integrate(&f, 0.0, [1.0], 2.0, &[], &OdeOptions::default());
        assert_eq!(t.stop, OdeStop::End);
        assert_relative_eq!(t.states.last().unwrap()[0], 2.0f64.exp(), max_relative = 1e-7);
    }

    #[test]
    fn riccati_blow_up_located() {
        // y' = y^2, y(0) = 1 blows up at 1; crossing of 1e8 at 1 - 1e-8.
        let f = |_r: f64, y: &[f64; 1]| [y[0] * y[0]];
        let t = integrate(&f, 0.0, [1.0], 5.0, &[0], &OdeOptions::default());
        match t.stop {
            OdeStop::Crossed { radius, .. } => assert!((radius - 1.0).abs() < 1e-6, "{radius}"),
            other => panic!("unexpected stop {other:?}"),
        }
    }

    #[test]
    fn hermite_resample_of_quadratic_is_exact() {
        // y = r^2 as (y, y') system: y' = 2r, (y')' = 2.
        let f = |_r: f64, y: &[f64; 2]| [y[1], 2.0];
        let t = integrate(&f, 0.0, [0.0, 0.0], 3.0, &[], &OdeOptions::default());
        let pts = [0.0, 0.37, 1.5, 2.99, 3.0, 3.5];
        let vals = hermite_resample(&t, 0, 1, &pts);
        for (r, v) in pts.iter().zip(&vals) {
            if *r <= 3.0 {
                assert_relative_eq!(v.unwrap(), r * r, epsilon = 1e-9);
            } else {
                assert!(v.is_none());
            }
        }
    }
}
