//! Thin wrappers over `libm` so numeric code reads like std code.

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

/// Integer power by square-and-multiply.
///
/// Every operation is a product of nonnegative factors when `x >= 0`, so the
/// result is monotone in `x` under round-to-nearest.
pub(crate) fn powi(x: f64, mut k: u32) -> f64 {
    let mut base = x;
    let mut acc = 1.0;
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        k >>= 1;
        if k > 0 {
            base *= base;
        }
    }
    acc
}

/// `x^y` for `x >= 0`, routed so that integer and half-integer exponents stay
/// exactly monotone in `x` (products and a correctly rounded `sqrt`).
pub(crate) fn pow_nonneg(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        return 1.0;
    }
    let twice = 2.0 * y;
    if y > 0.0 && twice == floor(twice) && twice <= 64.0 {
        let whole = floor(y) as u32;
        let int_part = powi(x, whole);
        if twice as u32 % 2 == 1 {
            int_part * sqrt(x)
        } else {
            int_part
        }
    } else {
        pow(x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_repeated_product() {
        assert_eq!(powi(3.0, 0), 1.0);
        assert_eq!(powi(3.0, 5), 243.0);
        assert_eq!(powi(0.0, 3), 0.0);
    }

    #[test]
    fn pow_nonneg_half_integers() {
        assert_eq!(pow_nonneg(4.0, 0.5), 2.0);
        assert_eq!(pow_nonneg(4.0, 1.5), 8.0);
        assert!((pow_nonneg(2.0, 0.3) - pow(2.0, 0.3)).abs() < 1e-15);
    }

    #[test]
    fn pow_nonneg_is_monotone_on_a_fine_ladder() {
        for &y in &[0.5, 1.0, 1.5, 2.0, 3.0, 4.0] {
            let mut prev = 0.0;
            let mut x = 0.0;
            while x < 10.0 {
                let v = pow_nonneg(x, y);
                assert!(v >= prev, "x={x} y={y}");
                prev = v;
                x += 1.0 / 7.0;
            }
        }
    }
}
