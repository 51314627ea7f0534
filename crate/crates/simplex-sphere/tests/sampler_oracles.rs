//! Cross-validation of the three samplers against independent oracles:
//! direct Monte Carlo for the exact sampler's acceptance event, a dense
//! grid scan for the fiber arcs, the exact sampler as reference law for the
//! Gibbs chain, and the product-law scaling of the shell acceptance.

use rand::Rng;
use rand_distr::StandardNormal;
use simplex_sphere::batch::SampleBatch;
use simplex_sphere::geometry::{ManifoldSpec, ShellSpec};
use simplex_sphere::rng::seed_stream;
use simplex_sphere::samplers::{
    arc_feasible_set, fiber_point, sample_exact_seeded, sample_gibbs_seeded, shell_acceptance,
    GibbsChain,
};
use simplex_sphere::tilted::TiltedParams;
use simplex_sphere::verify::{extreme_report, ks_two_sample};
use std::f64::consts::TAU;

#[test]
fn exact_acceptance_matches_direct_monte_carlo() {
    // oracle: P(m(phi(Z)) > -1) at n = 20, b = 2, by standardizing 1e6
    // Gaussian vectors directly
    let n = 20;
    let oracle_reps = 1_000_000u64;
    let mut rng = seed_stream(101, 0);
    let mut hits = 0u64;
    let mut z = vec![0.0f64; n];
    for _ in 0..oracle_reps {
        for v in &mut z {
            *v = rng.sample(StandardNormal);
        }
        let mean = z.iter().sum::<f64>() / n as f64;
        let var = z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let sd = var.sqrt();
        let min = z.iter().cloned().fold(f64::INFINITY, f64::min);
        if (min - mean) / sd > -1.0 {
            hits += 1;
        }
    }
    let p_oracle = hits as f64 / oracle_reps as f64;

    let spec = ManifoldSpec::new(n, 2.0).unwrap();
    let batch = sample_exact_seeded(&spec, 20_000, 202, 2).unwrap();
    let p_sampler = batch.acceptance_rate();

    let se = (p_oracle * (1.0 - p_oracle)).sqrt()
        * (1.0 / oracle_reps as f64 + 1.0 / batch.proposals as f64).sqrt();
    assert!(
        (p_oracle - p_sampler).abs() <= 3.0 * se,
        "oracle {p_oracle} vs sampler {p_sampler} (3se = {:.2e})",
        3.0 * se
    );
}

#[test]
fn feasible_arcs_match_dense_grid_scan() {
    let (s3, q3) = (3.0, 6.0);
    let arcs = arc_feasible_set(s3, q3).unwrap();
    let boundary_tol = 1e-6;
    let in_arcs = |theta: f64| arcs.iter().any(|&(lo, hi)| theta >= lo && theta < hi);
    let near_boundary = |theta: f64| {
        arcs.iter().any(|&(lo, hi)| {
            (theta - lo).abs() < boundary_tol
                || (theta - hi).abs() < boundary_tol
                || (theta - lo + TAU).abs() < boundary_tol
                || (theta - hi - TAU).abs() < boundary_tol
        })
    };
    let grid = 100_000;
    let mut mismatches = 0;
    for i in 0..grid {
        let theta = TAU * (i as f64 + 0.5) / grid as f64;
        let y = fiber_point(s3, q3, theta);
        let positive = y.iter().all(|&v| v > 0.0);
        if positive != in_arcs(theta) && !near_boundary(theta) {
            mismatches += 1;
        }
    }
    assert_eq!(mismatches, 0, "arcs: {arcs:?}");
}

#[test]
fn gibbs_agrees_with_exact_sampler() {
    // first-coordinate marginals, n = 8, b = 1.5
    let spec = ManifoldSpec::new(8, 1.5).unwrap();
    let exact = sample_exact_seeded(&spec, 10_000, 42, 2).unwrap();
    let gibbs = sample_gibbs_seeded(&spec, 10_000, 10, 1000, 43, 2).unwrap();
    let ks = ks_two_sample(&exact.first_coordinates(), &gibbs.first_coordinates()).unwrap();
    assert!(
        ks.statistic < ks.critical_1pct,
        "ks {} vs critical {}",
        ks.statistic,
        ks.critical_1pct
    );
}

#[test]
fn gibbs_agrees_with_exact_sampler_in_localized_phase() {
    // b = 3 > 2 is still exactly samplable at n = 8
    let spec = ManifoldSpec::new(8, 3.0).unwrap();
    let exact = sample_exact_seeded(&spec, 10_000, 7, 2).unwrap();
    let gibbs = sample_gibbs_seeded(&spec, 10_000, 10, 1000, 8, 2).unwrap();
    let ks = ks_two_sample(&exact.first_coordinates(), &gibbs.first_coordinates()).unwrap();
    assert!(
        ks.statistic < ks.critical_1pct,
        "ks {} vs critical {}",
        ks.statistic,
        ks.critical_1pct
    );
}

#[test]
fn single_triple_step_is_uniform_on_arc() {
    // n = 3 leaves a single triple; every step is an exact draw from the
    // uniform law on the feasible arcs of (s3, q3) = (3, 3b)
    let spec = ManifoldSpec::new(3, 2.0).unwrap();
    let arcs = arc_feasible_set(3.0, 6.0).unwrap();
    let total: f64 = arcs.iter().map(|(lo, hi)| hi - lo).sum();
    let mut chain = GibbsChain::new(&spec, seed_stream(77, 0)).unwrap();
    let steps = 100_000usize;
    let bins = 50usize;
    let mut counts = vec![0u64; bins];
    for _ in 0..steps {
        chain.step().unwrap();
        let y = chain.state();
        let c = (y[0] + y[1] + y[2]) / 3.0;
        let du = (y[0] - y[1]) / 2.0f64.sqrt();
        let dv = (y[0] + y[1] - 2.0 * y[2]) / 6.0f64.sqrt();
        let theta = dv.atan2(du).rem_euclid(TAU);
        assert!(c > 0.0);
        // cumulative arc measure before theta
        let mut cum = 0.0;
        let mut found = false;
        for &(lo, hi) in &arcs {
            if theta >= lo && theta < hi {
                cum += theta - lo;
                found = true;
                break;
            }
            cum += hi - lo;
        }
        assert!(found, "theta {theta} outside feasible arcs {arcs:?}");
        let bin = ((cum / total * bins as f64) as usize).min(bins - 1);
        counts[bin] += 1;
    }
    let expect = steps as f64 / bins as f64;
    let sd = (steps as f64 * (1.0 / bins as f64) * (1.0 - 1.0 / bins as f64)).sqrt();
    for (i, &c) in counts.iter().enumerate() {
        assert!(
            (c as f64 - expect).abs() <= 3.0 * sd,
            "bin {i}: {c} vs {expect} +- {:.1}",
            3.0 * sd
        );
    }
}

#[test]
fn gibbs_chain_is_stationary_across_halves() {
    let spec = ManifoldSpec::new(10, 1.5).unwrap();
    let batch = sample_gibbs_seeded(&spec, 10_000, 5, 500, 99, 1).unwrap();
    let xs = batch.first_coordinates();
    let (a, b) = xs.split_at(5000);
    let ks = ks_two_sample(a, b).unwrap();
    assert!(
        ks.statistic < ks.critical_1pct,
        "halves differ: ks {} vs {}",
        ks.statistic,
        ks.critical_1pct
    );
}

#[test]
fn exact_sampler_coordinates_are_exchangeable() {
    let spec = ManifoldSpec::new(20, 1.5).unwrap();
    let batch = sample_exact_seeded(&spec, 10_000, 55, 2).unwrap();
    let ks = ks_two_sample(&batch.coordinate(0), &batch.coordinate(1)).unwrap();
    assert!(ks.statistic < ks.critical_1pct);
}

#[test]
fn shell_acceptance_scales_like_eps_squared() {
    // doubling eps multiplies the acceptance by ~4 while n*eps^2 stays
    // small enough for the quadratic law to dominate
    let p = TiltedParams::exp1();
    let eps = 0.004;
    let small = ShellSpec::new(100, 2.0, eps).unwrap();
    let large = ShellSpec::new(100, 2.0, 2.0 * eps).unwrap();
    let proposals = 4_000_000u64;
    let a1 = shell_acceptance(&small, &p, proposals, 1001, 2).unwrap();
    let a2 = shell_acceptance(&large, &p, proposals, 1002, 2).unwrap();
    assert!(a1.accepts > 0 && a2.accepts > 0);
    let ratio = a2.rate / a1.rate;
    let rel_se = (a1.std_err / a1.rate).hypot(a2.std_err / a2.rate);
    assert!(
        (ratio - 4.0).abs() <= 3.0 * 4.0 * rel_se,
        "ratio {ratio} vs 4 +- {:.3}",
        3.0 * 4.0 * rel_se
    );
}

#[test]
fn localized_phase_max_coordinate_scale() {
    // n = 1000, b = 3: the largest coordinate absorbs (b-2)n of square mass
    let spec = ManifoldSpec::new(1000, 3.0).unwrap();
    let batch = sample_gibbs_seeded(&spec, 500, 5, 1500, 500, 2).unwrap();
    let out = extreme_report(&batch).unwrap();
    let med = out.summary.median_ratio_loc.unwrap();
    assert!(
        (0.5..=1.5).contains(&med),
        "median M^2/((b-2)n) = {med}"
    );
}

#[test]
fn sampler_output_round_trips_through_files() {
    let dir = std::env::temp_dir().join(format!("simplex-sphere-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("batch.txt");

    let spec = ManifoldSpec::new(6, 1.5).unwrap();
    let batch = sample_exact_seeded(&spec, 25, 9, 1).unwrap();
    batch.save(&path).unwrap();
    let loaded = SampleBatch::load(&path).unwrap();
    assert_eq!(loaded.points, batch.points);
    let path2 = dir.join("batch2.txt");
    loaded.save(&path2).unwrap();
    assert_eq!(
        std::fs::read(&path).unwrap(),
        std::fs::read(&path2).unwrap()
    );
    std::fs::remove_dir_all(&dir).ok();
}
