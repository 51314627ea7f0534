//! The tilted half-line density family: normalization, raw moments, CDF,
//! exact sampling, and the moment-matching solver.
//!
//! `G_{r,s}` has density proportional to `exp(-r x^2 - s x)` on `(0, inf)`,
//! admissible for `r > 0` or `r = 0, s > 0`. For `r > 0` this is a rescaled
//! one-sided truncated Gaussian: with `sigma0 = 1/sqrt(2r)` and
//! `alpha = s * sigma0`, if `W ~ N(0,1) | W > alpha` then
//! `sigma0 (W - alpha) ~ G_{r,s}`. All closed forms route through that
//! representation (see [`crate::special`]); an independent adaptive
//! quadrature route cross-checks every exposed moment.

use crate::error::{Error, Result};
use crate::quad;
use crate::special::{
    mills_ratio, normal_upper_tail, truncated_excess_moments, SQRT_2PI,
};
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative tolerance at which the closed-form and quadrature moment routes
/// must agree before a result is released.
pub const ROUTE_AGREEMENT_TOL: f64 = 1e-10;

/// An admissible (r, s) pair indexing the density G_{r,s}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiltedParams {
    pub r: f64,
    pub s: f64,
}

impl TiltedParams {
    pub fn new(r: f64, s: f64) -> Result<Self> {
        if Self::is_admissible(r, s) {
            Ok(TiltedParams { r, s })
        } else {
            Err(Error::InadmissibleParams { r, s })
        }
    }

    pub fn is_admissible(r: f64, s: f64) -> bool {
        r.is_finite() && s.is_finite() && (r > 0.0 || (r == 0.0 && s > 0.0))
    }

    /// Exp(1), the b = 2 boundary case.
    pub fn exp1() -> Self {
        TiltedParams { r: 0.0, s: 1.0 }
    }
}

/// Normalizer and raw moments 1..4 of G_{r,s}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiltedMoments {
    /// Normalizing constant `int_0^inf exp(-r x^2 - s x) dx`. May overflow
    /// to infinity for extreme tilts; the moments themselves never do.
    pub z: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
}

impl TiltedMoments {
    /// The paper's beta = E(Y^2).
    pub fn beta(&self) -> f64 {
        self.m2
    }

    /// Scale-invariant moment ratio E(W^2) / (E W)^2.
    pub fn theta(&self) -> f64 {
        self.m2 / (self.m1 * self.m1)
    }
}

/// Moments with the normalizer kept in scaled form
/// `z = z_scaled * exp(log_offset)` so deep tilts stay representable.
#[derive(Debug, Clone, Copy)]
pub struct ScaledMoments {
    pub z_scaled: f64,
    pub log_offset: f64,
    pub m: [f64; 4],
}

/// Offset that keeps `exp(-r x^2 - s x - offset)` bounded by 1.
fn log_offset(p: &TiltedParams) -> f64 {
    if p.r > 0.0 && p.s < 0.0 {
        p.s * p.s / (4.0 * p.r)
    } else {
        0.0
    }
}

/// Closed-form route: truncated-Gaussian moment products (r > 0) or
/// factorial moments (r = 0).
pub fn moments_closed_form(p: &TiltedParams) -> ScaledMoments {
    if p.r == 0.0 {
        let s = p.s;
        return ScaledMoments {
            z_scaled: 1.0 / s,
            log_offset: 0.0,
            m: [1.0 / s, 2.0 / (s * s), 6.0 / s.powi(3), 24.0 / s.powi(4)],
        };
    }
    let sigma0 = 1.0 / (2.0 * p.r).sqrt();
    let alpha = p.s * sigma0;
    let t = truncated_excess_moments(alpha);
    let m = [
        sigma0 * t[0],
        sigma0 * sigma0 * t[1],
        sigma0.powi(3) * t[2],
        sigma0.powi(4) * t[3],
    ];
    let z_scaled = if alpha < 0.0 {
        // z = sigma0 * sqrt(2 pi) * exp(alpha^2/2) * Q(alpha); the exp factor
        // is exactly exp(log_offset).
        sigma0 * SQRT_2PI * normal_upper_tail(alpha)
    } else {
        sigma0 * mills_ratio(alpha)
    };
    ScaledMoments {
        z_scaled,
        log_offset: log_offset(p),
        m,
    }
}

/// Quadrature route: adaptive Gauss-Kronrod on the scaled integrand.
///
/// For s < 0 the scaled integrand is a Gaussian bump `exp(-r (x - mu0)^2)`
/// centered at `mu0 = -s/(2r)`, which can sit far from the origin; the
/// integral is evaluated in the centered variable `u = x - mu0`, where the
/// exponent is exact and the window is bump-centered. Otherwise the mass is
/// anchored at zero and both exponent terms are nonnegative, so plain
/// x-space is stable. The window is chosen so that the truncated tail
/// (including an x^4 factor) is below ~1e-14 of the mass.
pub fn moments_quadrature(p: &TiltedParams) -> ScaledMoments {
    let offset = log_offset(p);
    let (r, s) = (p.r, p.s);
    let i = if r > 0.0 && s < 0.0 {
        let mu0 = -s / (2.0 * r);
        let sigma0 = 1.0 / (2.0 * r).sqrt();
        let mut margin = 14.0;
        while r * (margin * sigma0).powi(2) < 64.0 + 4.0 * (1.0 + mu0 + margin * sigma0).ln()
            && margin < 400.0
        {
            margin += 4.0;
        }
        let w = margin * sigma0;
        let lo = (-w).max(-mu0);
        let integral = |k: i32| {
            quad::integrate(
                |u: f64| (mu0 + u).powi(k) * (-r * u * u).exp(),
                lo,
                w,
                5e-14,
                16,
            )
            .value
        };
        [integral(0), integral(1), integral(2), integral(3), integral(4)]
    } else {
        let mut hi = 1.0f64;
        for _ in 0..80 {
            if r * hi * hi + s * hi >= 64.0 + 4.0 * (1.0 + hi).ln() {
                break;
            }
            hi *= 2.0;
        }
        let integral = |k: i32| {
            quad::integrate(
                |x: f64| x.powi(k) * (-(r * x * x + s * x)).exp(),
                0.0,
                hi,
                5e-14,
                16,
            )
            .value
        };
        [integral(0), integral(1), integral(2), integral(3), integral(4)]
    };
    ScaledMoments {
        z_scaled: i[0],
        log_offset: offset,
        m: [i[1] / i[0], i[2] / i[0], i[3] / i[0], i[4] / i[0]],
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Largest relative disagreement between the two routes over the normalizer
/// and the four moments.
pub fn route_disagreement(closed: &ScaledMoments, quadrature: &ScaledMoments) -> f64 {
    let mut worst = rel_diff(closed.z_scaled, quadrature.z_scaled);
    for k in 0..4 {
        worst = worst.max(rel_diff(closed.m[k], quadrature.m[k]));
    }
    worst
}

/// Normalizer and moments 1..4, computed by both routes; errors if they
/// disagree beyond [`ROUTE_AGREEMENT_TOL`].
pub fn tilted_moments(p: &TiltedParams) -> Result<TiltedMoments> {
    TiltedParams::new(p.r, p.s)?;
    let closed = moments_closed_form(p);
    let quadrature = moments_quadrature(p);
    let diff = route_disagreement(&closed, &quadrature);
    if diff > ROUTE_AGREEMENT_TOL {
        return Err(Error::MomentMismatch {
            r: p.r,
            s: p.s,
            diff,
        });
    }
    let z = closed.z_scaled * closed.log_offset.exp();
    let out = TiltedMoments {
        z,
        m1: closed.m[0],
        m2: closed.m[1],
        m3: closed.m[2],
        m4: closed.m[3],
    };
    debug_assert!(out.m2 > out.m1 * out.m1);
    debug_assert!(out.m1 * out.m3 >= out.m2 * out.m2);
    Ok(out)
}

/// F(x) = int_0^x exp(-r t^2 - s t) dt / z, via the same tail-integral
/// representation as the normalizer.
pub fn tilted_cdf(p: &TiltedParams, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if p.r == 0.0 {
        return -(-p.s * x).exp_m1();
    }
    let sqrt2r = (2.0 * p.r).sqrt();
    let alpha = p.s / sqrt2r;
    let beta = alpha + x * sqrt2r;
    let ratio = if alpha >= 2.0 {
        // Q(beta)/Q(alpha) through Mills ratios; the exponent uses the
        // product form (beta-alpha)(beta+alpha)/2 to avoid cancellation.
        let expo = -0.5 * (beta - alpha) * (beta + alpha);
        (mills_ratio(beta) / mills_ratio(alpha)) * expo.exp()
    } else {
        normal_upper_tail(beta) / normal_upper_tail(alpha)
    };
    (1.0 - ratio).clamp(0.0, 1.0)
}

/// Quantile by bisection on the CDF.
pub fn tilted_quantile(p: &TiltedParams, q: f64) -> f64 {
    assert!((0.0..1.0).contains(&q), "quantile level in [0, 1)");
    if q == 0.0 {
        return 0.0;
    }
    let mut hi = 1.0;
    while tilted_cdf(p, hi) < q {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if tilted_cdf(p, mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One exact draw from G_{r,s}.
///
/// r = 0: inverse-CDF exponential. r > 0: one-sided truncated Gaussian via
/// direct rejection when the truncation point is left of the mode, and a
/// shifted-exponential proposal when it is deep in the tail.
pub fn sample_tilted<R: Rng + ?Sized>(p: &TiltedParams, rng: &mut R) -> f64 {
    if p.r == 0.0 {
        let e: f64 = rng.sample(Exp1);
        return e / p.s;
    }
    let sigma0 = 1.0 / (2.0 * p.r).sqrt();
    let alpha = p.s * sigma0;
    let w = if alpha <= 0.0 {
        loop {
            let w: f64 = rng.sample(StandardNormal);
            if w > alpha {
                break w;
            }
        }
    } else {
        // Robert's scheme: propose alpha + Exp(lambda), accept with
        // exp(-(x - lambda)^2 / 2), where lambda is the optimal rate.
        let lambda = 0.5 * (alpha + (alpha * alpha + 4.0).sqrt());
        loop {
            let e: f64 = rng.sample(Exp1);
            let x = alpha + e / lambda;
            let u: f64 = rng.random();
            let d = x - lambda;
            if u <= (-0.5 * d * d).exp() {
                break x;
            }
        }
    };
    sigma0 * (w - alpha)
}

/// Scale-invariant theta for a parameter pair, through the closed form.
pub fn theta_of(r: f64, s: f64) -> f64 {
    let m = moments_closed_form(&TiltedParams { r, s });
    m.m[1] / (m.m[0] * m.m[0])
}

/// Moment residual (m1 - 1, m2 - b) and its max-norm, closed-form route.
fn residual(r: f64, s: f64, b: f64) -> (f64, f64, f64) {
    let m = moments_closed_form(&TiltedParams { r, s });
    let f1 = m.m[0] - 1.0;
    let f2 = m.m[1] - b;
    (f1, f2, f1.abs().max(f2.abs()))
}

/// Damped Newton refinement of (r, s) toward m1 = 1, m2 = b, from a given
/// starting point. Exposed so uniqueness can be probed from many starts.
pub fn polish(p0: TiltedParams, b: f64) -> Result<TiltedParams> {
    let mut r = p0.r.max(0.0);
    let mut s = p0.s;
    if !TiltedParams::is_admissible(r, s) {
        return Err(Error::InadmissibleParams { r, s });
    }
    let (mut f1, mut f2, mut norm) = residual(r, s, b);
    for _ in 0..100 {
        if norm <= 1e-12 {
            break;
        }
        let m = moments_closed_form(&TiltedParams { r, s }).m;
        // d m_k/d r = -(m_{k+2} - m_k m_2), d m_k/d s = -(m_{k+1} - m_k m_1)
        let j11 = -(m[2] - m[0] * m[1]);
        let j12 = -(m[1] - m[0] * m[0]);
        let j21 = -(m[3] - m[1] * m[1]);
        let j22 = -(m[2] - m[0] * m[1]);
        let det = j11 * j22 - j12 * j21;
        if !det.is_finite() || det.abs() < 1e-300 {
            break;
        }
        let dr = -(j22 * f1 - j12 * f2) / det;
        let ds = -(-j21 * f1 + j11 * f2) / det;
        // halve the step until the residual norm decreases
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let rt = (r + step * dr).max(0.0);
            let st = s + step * ds;
            if TiltedParams::is_admissible(rt, st) {
                let (g1, g2, gn) = residual(rt, st, b);
                if gn < norm {
                    r = rt;
                    s = st;
                    f1 = g1;
                    f2 = g2;
                    norm = gn;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            // fallback: rescaling to unit mean stays inside the family
            // ((r, s) -> (r m1^2, s m1)) and zeroes the first residual
            // exactly; it un-sticks iterates pinned to the r = 0 boundary.
            let (rt, st) = (r * m[0] * m[0], s * m[0]);
            if TiltedParams::is_admissible(rt, st) {
                let (g1, g2, gn) = residual(rt, st, b);
                if gn < norm {
                    r = rt;
                    s = st;
                    f1 = g1;
                    f2 = g2;
                    norm = gn;
                    accepted = true;
                }
            }
        }
        if !accepted {
            break;
        }
    }
    if norm <= 1e-8 {
        TiltedParams::new(r, s)
    } else {
        Err(Error::NonConvergence { b, residual: norm })
    }
}

/// The unique admissible (r, s) with mean 1 and second moment b, 1 < b <= 2.
///
/// Initialization follows the two existence curves: the scaled family
/// (r, 1), whose theta spans (pi/2, 2], and the point-mass family
/// `(1/(1-u), -2u/(1-u))`, whose theta spans (1, pi/2]. A bisection on the
/// matching curve pins theta = b, rescaling to unit mean stays inside the
/// family, and a damped Newton polish finishes the job.
pub fn solve_params(b: f64) -> Result<TiltedParams> {
    if !(b > 1.0 && b <= 2.0) {
        return Err(Error::OutOfRange(b));
    }
    if b < 1.0 + 1e-4 {
        return Err(Error::IllConditioned(b));
    }
    let theta0 = PI / 2.0;
    let raw = if b >= theta0 {
        // theta(0, 1) = 2 (Exp(1)); theta decreases to pi/2 as r -> inf.
        let f = |r: f64| theta_of(r, 1.0);
        let mut hi = 1.0;
        let mut expand = 0;
        while f(hi) > b && expand < 60 {
            hi *= 4.0;
            expand += 1;
        }
        let r = bisect(f, 0.0, hi, b);
        TiltedParams { r, s: 1.0 }
    } else {
        // V_u ~ G_{1/(1-u), -2u/(1-u)}: theta runs from pi/2 at u = 0 down
        // to 1 as u -> 1 (point mass).
        let params = |u: f64| {
            let w = 1.0 - u;
            TiltedParams {
                r: 1.0 / w,
                s: -2.0 * u / w,
            }
        };
        let f = |u: f64| {
            let p = params(u);
            theta_of(p.r, p.s)
        };
        let mut hi = 0.5;
        while f(hi) > b && 1.0 - hi > 1e-9 {
            hi = 1.0 - 0.25 * (1.0 - hi);
        }
        params(bisect(f, 0.0, hi, b))
    };
    // rescale to unit mean: W/m1 ~ G_{r m1^2, s m1}
    let m1 = moments_closed_form(&raw).m[0];
    let scaled = TiltedParams {
        r: raw.r * m1 * m1,
        s: raw.s * m1,
    };
    let solved = polish(scaled, b)?;
    // release only after the dual-route agreement check
    tilted_moments(&solved)?;
    Ok(solved)
}

/// Bisection for a decreasing f with f(lo) >= target >= f(hi).
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, target: f64) -> f64 {
    for _ in 0..200 {
        if (hi - lo) <= 1e-14 * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Covariance of (Y, Y^2) assembled from moments 1..4.
pub fn value_square_covariance(m: &TiltedMoments) -> [[f64; 2]; 2] {
    let var_y = m.m2 - m.m1 * m.m1;
    let cov = m.m3 - m.m1 * m.m2;
    let var_y2 = m.m4 - m.m2 * m.m2;
    [[var_y, cov], [cov, var_y2]]
}
