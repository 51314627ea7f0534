//! Scalar helpers around the standard normal: tail integrals, the Mills
//! ratio, and moments of the one-sided truncated Gaussian.
//!
//! The key object is the excess `W - alpha` of a standard normal `W`
//! conditioned on `W > alpha`. Its density on `(0, inf)` is proportional to
//! `exp(-t^2/2 - alpha*t)`, so every half-line density `exp(-r x^2 - s x)`
//! with `r > 0` is a rescaled copy of it (scale `1/sqrt(2r)`, with
//! `alpha = s/sqrt(2r)`).

use std::f64::consts::PI;

pub const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Standard normal density.
pub fn normal_pdf(t: f64) -> f64 {
    (-0.5 * t * t).exp() / SQRT_2PI
}

/// Upper tail Q(t) = P(N(0,1) > t).
pub fn normal_upper_tail(t: f64) -> f64 {
    0.5 * libm::erfc(t * std::f64::consts::FRAC_1_SQRT_2)
}

/// Above this truncation point the continued-fraction route takes over from
/// direct `pdf/tail` evaluation. At the crossover both routes carry ~1e-15
/// relative error.
const CF_CUTOFF: f64 = 2.0;
const CF_DEPTH: usize = 256;

/// Tails of the Mills-ratio continued fraction at `alpha`:
/// `t_j = j / (alpha + t_{j+1})`, returned for `j = 1..=K`.
///
/// Backward recurrence seeded at depth `CF_DEPTH` with the fixed point of
/// the constant-index approximation `t = j0/(alpha + t)`; the seed error is
/// damped by a factor `~t_j^2/j < 1` per level, which is overwhelming by the
/// time the recurrence reaches the small indices we keep.
fn mills_cf_tails<const K: usize>(alpha: f64) -> [f64; K] {
    let j0 = (CF_DEPTH + 1) as f64;
    let mut t = 0.5 * ((alpha * alpha + 4.0 * j0).sqrt() - alpha);
    let mut out = [0.0; K];
    for j in (1..=CF_DEPTH).rev() {
        t = j as f64 / (alpha + t);
        if j <= K {
            out[j - 1] = t;
        }
    }
    out
}

/// Mills ratio R(alpha) = Q(alpha) / phi(alpha).
///
/// Overflows to infinity for alpha below about -38, where phi underflows;
/// callers treat that as "the normalizer is not representable in f64".
pub fn mills_ratio(alpha: f64) -> f64 {
    if alpha >= CF_CUTOFF {
        let [t1] = mills_cf_tails::<1>(alpha);
        1.0 / (alpha + t1)
    } else {
        normal_upper_tail(alpha) / normal_pdf(alpha)
    }
}

/// Raw moments `E[(W - alpha)^k]`, `k = 1..=4`, for `W ~ N(0,1) | W > alpha`.
///
/// Equivalently: raw moments of the density proportional to exp(-t^2/2 - alpha t) on
/// `(0, inf)`. For alpha above the crossover these are computed as products
/// of continued-fraction tails,
///
///   `E[(W - alpha)^k] = t_1 t_2 ... t_k`,
///
/// which stays cancellation-free however deep the truncation; below the
/// crossover the plain integration-by-parts recurrence is stable.
pub fn truncated_excess_moments(alpha: f64) -> [f64; 4] {
    if alpha >= CF_CUTOFF {
        let t = mills_cf_tails::<4>(alpha);
        [t[0], t[0] * t[1], t[0] * t[1] * t[2], t[0] * t[1] * t[2] * t[3]]
    } else {
        let lambda = normal_pdf(alpha) / normal_upper_tail(alpha);
        let t1 = lambda - alpha;
        let t2 = 1.0 - alpha * t1;
        let t3 = 2.0 * t1 - alpha * t2;
        let t4 = 3.0 * t2 - alpha * t3;
        [t1, t2, t3, t4]
    }
}

/// Half-line Gaussian constant: E[(W)^2]/E[W]^2 for the density proportional to exp(-z^2)
/// on (0, inf); the lower end of the scaled-tilt homotopy curve.
pub fn half_gaussian_theta() -> f64 {
    PI / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_tail_matches_known_values() {
        assert!((normal_upper_tail(0.0) - 0.5).abs() < 1e-15);
        // Q(1) = 0.158655253931457051...
        assert!((normal_upper_tail(1.0) - 0.158_655_253_931_457_05).abs() < 1e-14);
        assert!((normal_upper_tail(-1.0) - 0.841_344_746_068_542_9).abs() < 1e-14);
    }

    #[test]
    fn mills_ratio_continuous_at_crossover() {
        for da in [-1e-6, 0.0, 1e-6] {
            let a = CF_CUTOFF + da;
            let direct = normal_upper_tail(a) / normal_pdf(a);
            assert!((mills_ratio(a) - direct).abs() / direct < 1e-12);
        }
    }

    #[test]
    fn excess_moments_match_untruncated_limit() {
        // For alpha -> -inf the conditioning is vacuous and
        // E[(W - alpha)^k] is a plain Gaussian moment.
        let a = -50.0;
        let t = truncated_excess_moments(a);
        assert!((t[0] - (-a)).abs() / (-a) < 1e-13);
        assert!((t[1] - (1.0 + a * a)).abs() / (1.0 + a * a) < 1e-13);
        let t3 = -3.0 * a - a * a * a;
        assert!((t[2] - t3).abs() / t3 < 1e-13);
        let t4 = 3.0 + 6.0 * a * a + a.powi(4);
        assert!((t[3] - t4).abs() / t4 < 1e-13);
    }

    #[test]
    fn excess_moments_at_zero_truncation() {
        // W | W > 0: E W = sqrt(2/pi), E W^2 = 1, E W^3 = 2 sqrt(2/pi), E W^4 = 3.
        let t = truncated_excess_moments(0.0);
        let m1 = (2.0 / PI).sqrt();
        assert!((t[0] - m1).abs() < 1e-14);
        assert!((t[1] - 1.0).abs() < 1e-14);
        assert!((t[2] - 2.0 * m1).abs() < 1e-14);
        assert!((t[3] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn cf_product_consistent_with_recurrence_near_crossover() {
        // Both routes should agree to near machine precision around the cutoff.
        for a in [2.0, 2.5, 3.0, 4.0] {
            let cf = {
                let t = mills_cf_tails::<4>(a);
                [t[0], t[0] * t[1], t[0] * t[1] * t[2], t[0] * t[1] * t[2] * t[3]]
            };
            let lambda = normal_pdf(a) / normal_upper_tail(a);
            let t1 = lambda - a;
            let t2 = 1.0 - a * t1;
            let t3 = 2.0 * t1 - a * t2;
            let t4 = 3.0 * t2 - a * t3;
            for (x, y) in cf.iter().zip([t1, t2, t3, t4]) {
                assert!((x - y).abs() / y.abs() < 1e-11, "alpha {a}: {x} vs {y}");
            }
        }
    }
}
