//! Tilted-density cross-checks: an independent Simpson oracle, the
//! closed-form/quadrature agreement grid, scaling laws, sampler law checks,
//! and the solver uniqueness probe.

use rand::Rng;
use simplex_sphere::rng::seed_stream;
use simplex_sphere::tilted::{
    moments_closed_form, moments_quadrature, polish, route_disagreement, sample_tilted,
    solve_params, tilted_cdf, tilted_moments, TiltedParams, ROUTE_AGREEMENT_TOL,
};
use simplex_sphere::verify::{ks_one_sample, KsReference};
use std::f64::consts::PI;

/// Composite Simpson with a fixed fine grid; independent of the library's
/// Gauss-Kronrod code path.
fn simpson_oracle<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels * 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn half_gaussian_matches_simpson_oracle() {
    // G_{1,0} on (0, 12): truncation error ~ e^{-144}
    let z = simpson_oracle(|x| (-x * x).exp(), 0.0, 12.0, 60_000);
    let m1 = simpson_oracle(|x| x * (-x * x).exp(), 0.0, 12.0, 60_000) / z;
    let m2 = simpson_oracle(|x| x * x * (-x * x).exp(), 0.0, 12.0, 60_000) / z;
    assert!((z - PI.sqrt() / 2.0).abs() < 1e-12);
    let m = tilted_moments(&TiltedParams::new(1.0, 0.0).unwrap()).unwrap();
    assert!((m.z - z).abs() / z < 1e-11);
    assert!((m.m1 - m1).abs() / m1 < 1e-11);
    assert!((m.m2 - m2).abs() / m2 < 1e-11);
}

#[test]
fn deep_tilt_matches_simpson_oracle() {
    // r = 2, s = -6: bump inside (0, 10), all four moments
    let g = |x: f64| (-2.0 * x * x + 6.0 * x - 4.5).exp(); // scaled by e^{-s^2/4r}
    let z = simpson_oracle(g, 0.0, 12.0, 80_000);
    let closed = moments_closed_form(&TiltedParams::new(2.0, -6.0).unwrap());
    assert!((closed.z_scaled - z).abs() / z < 1e-11);
    for k in 1..=4u32 {
        let mk = simpson_oracle(|x| x.powi(k as i32) * g(x), 0.0, 12.0, 80_000) / z;
        let got = closed.m[(k - 1) as usize];
        assert!(
            (got - mk).abs() / mk < 1e-11,
            "k = {k}: closed {got} vs simpson {mk}"
        );
    }
}

#[test]
fn route_agreement_on_the_hundred_pair_grid() {
    let rs = [1e-8, 1e-4, 0.01, 0.1, 0.5, 1.0, 5.0, 10.0, 50.0];
    let ss = [-20.0, -10.0, -5.0, -1.0, -0.1, 0.0, 0.1, 1.0, 5.0, 10.0];
    let s0 = [0.01, 0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0];
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(100);
    for &r in &rs {
        for &s in &ss {
            pairs.push((r, s));
        }
    }
    for &s in &s0 {
        pairs.push((0.0, s));
    }
    assert_eq!(pairs.len(), 100);
    let mut worst = (0.0f64, 0.0, 0.0);
    for (r, s) in pairs {
        let p = TiltedParams::new(r, s).unwrap();
        let diff = route_disagreement(&moments_closed_form(&p), &moments_quadrature(&p));
        if diff > worst.0 {
            worst = (diff, r, s);
        }
        assert!(
            diff <= ROUTE_AGREEMENT_TOL,
            "routes disagree by {diff:.3e} at r = {r}, s = {s}"
        );
    }
    println!(
        "worst route disagreement: {:.3e} at (r, s) = ({}, {})",
        worst.0, worst.1, worst.2
    );
}

#[test]
fn scale_closure_and_theta_invariance() {
    // W ~ G_{r,s} implies alpha W ~ G_{r/alpha^2, s/alpha}
    let cases = [
        (0.5, -1.0, 2.0),
        (1.0, 0.0, 0.5),
        (3.0, 2.0, 1.7),
        (0.0, 1.0, 3.0),
        (10.0, -5.0, 0.3),
    ];
    for (r, s, alpha) in cases {
        let base = moments_closed_form(&TiltedParams::new(r, s).unwrap());
        let scaled = moments_closed_form(
            &TiltedParams::new(r / (alpha * alpha), s / alpha).unwrap(),
        );
        let rel = (scaled.m[0] - alpha * base.m[0]).abs() / (alpha * base.m[0]);
        assert!(rel < 1e-10, "scale closure fails at ({r}, {s}): {rel:.2e}");
        let theta_base = base.m[1] / (base.m[0] * base.m[0]);
        let theta_scaled = scaled.m[1] / (scaled.m[0] * scaled.m[0]);
        assert!(
            (theta_base - theta_scaled).abs() / theta_base < 1e-10,
            "theta not scale invariant at ({r}, {s})"
        );
    }
}

#[test]
fn exponential_sampler_matches_its_reference() {
    let p = TiltedParams::exp1();
    let mut rng = seed_stream(2024, 0);
    let draws: Vec<f64> = (0..100_000).map(|_| sample_tilted(&p, &mut rng)).collect();
    let ks = ks_one_sample(&draws, |x| -(-x).exp_m1(), KsReference::Exp1).unwrap();
    assert!(
        ks.statistic < ks.critical_1pct,
        "ks {} vs critical {}",
        ks.statistic,
        ks.critical_1pct
    );
}

#[test]
fn half_gaussian_sampler_mean() {
    let p = TiltedParams::new(1.0, 0.0).unwrap();
    let mut rng = seed_stream(7, 0);
    let n = 100_000;
    let draws: Vec<f64> = (0..n).map(|_| sample_tilted(&p, &mut rng)).collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    let sd = (draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64).sqrt();
    let expect = 1.0 / PI.sqrt();
    assert!(
        (mean - expect).abs() < 3.0 * sd / (n as f64).sqrt(),
        "mean {mean} vs {expect}"
    );
}

#[test]
fn law_of_large_numbers_against_moments() {
    // empirical m1, m2 within 5 standard errors of the dual-route values
    for (r, s) in [(0.5, -1.0), (2.0, 3.0), (0.0, 2.0), (5.0, -4.0)] {
        let p = TiltedParams::new(r, s).unwrap();
        let m = tilted_moments(&p).unwrap();
        let mut rng = seed_stream(11, 0);
        let n = 200_000usize;
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        let mut s4 = 0.0;
        for _ in 0..n {
            let x = sample_tilted(&p, &mut rng);
            s1 += x;
            s2 += x * x;
            s4 += x * x * x * x;
        }
        let nf = n as f64;
        let (e1, e2) = (s1 / nf, s2 / nf);
        let se1 = ((m.m2 - m.m1 * m.m1) / nf).sqrt();
        let se2 = (((s4 / nf) - e2 * e2).max(0.0) / nf).sqrt();
        assert!((e1 - m.m1).abs() < 5.0 * se1, "m1 at ({r}, {s})");
        assert!((e2 - m.m2).abs() < 5.0 * se2, "m2 at ({r}, {s})");
    }
}

#[test]
fn truncated_sampler_matches_cdf() {
    // deep positive truncation exercises the shifted-exponential proposal
    let p = TiltedParams::new(0.5, 4.0).unwrap();
    let mut rng = seed_stream(5, 0);
    let draws: Vec<f64> = (0..100_000).map(|_| sample_tilted(&p, &mut rng)).collect();
    let ks = ks_one_sample(&draws, |x| tilted_cdf(&p, x), KsReference::Tilted {
        r: p.r,
        s: p.s,
    })
    .unwrap();
    assert!(ks.statistic < ks.critical_1pct);
}

#[test]
fn solver_unique_from_random_starts() {
    let mut rng = seed_stream(31, 0);
    for b in [1.05, 1.2, 1.5, 1.8, 2.0] {
        let reference = solve_params(b).unwrap();
        let mut converged = 0;
        let mut attempts = 0;
        while converged < 10 && attempts < 40 {
            attempts += 1;
            let r0 = 10f64.powf(rng.random_range(-2.0..1.0));
            let s0 = rng.random_range(-4.0..4.0);
            let Ok(p) = polish(TiltedParams::new(r0, s0).unwrap(), b) else {
                continue;
            };
            assert!(
                (p.r - reference.r).abs() < 1e-6 && (p.s - reference.s).abs() < 1e-6,
                "b = {b}: start ({r0}, {s0}) reached ({}, {}) instead of ({}, {})",
                p.r,
                p.s,
                reference.r,
                reference.s
            );
            converged += 1;
        }
        assert!(
            converged >= 10,
            "b = {b}: only {converged} of {attempts} random starts converged"
        );
    }
}
