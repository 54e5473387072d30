//! Library routines against the brute-force oracles in `common`.

mod common;

use common::*;
use mmconc::concentration::{
    alpha_exact, alpha_exact_profile, kappa_grid, sep_exact, sep_exact_profile, sep_hamming_analytic,
    sep_hamming_ball_witness,
};
use mmconc::covering::greedy_net;
use mmconc::dimension::{dim_chavez, Diagonal};
use mmconc::mmspace::{generate, Family, GeneratorSpec};
use mmconc::random::{random_measure, suite_instance};
use mmconc::rng::seeded;
use mmconc::transport::emd;
use mmconc::MMSpace;

fn cube(d: u32) -> MMSpace {
    generate(&GeneratorSpec::new(Family::HammingCube { d }, 0)).unwrap()
}

#[test]
fn alpha_exact_matches_definition() {
    for i in 0..60 {
        let s = suite_instance(11, i, 10).unwrap();
        let grid = s.distinct_distances();
        let p = alpha_exact_profile(&s, &grid).unwrap();
        for (k, &e) in grid.iter().enumerate() {
            let want = naive_alpha(&s, e);
            assert!((p.alpha[k] - want).abs() <= MASS_TOL, "instance {i} eps {e}: {} vs {want}", p.alpha[k]);
        }
    }
}

#[test]
fn sep_exact_matches_three_way_enumeration() {
    let grid = kappa_grid(20);
    for i in 0..60 {
        let s = suite_instance(12, i, 10).unwrap();
        let p = sep_exact_profile(&s, &grid).unwrap();
        assert_eq!(p.sep, naive_sep(&s, &grid), "instance {i}");
    }
}

#[test]
fn sep_exact_on_points_off_the_grid() {
    let s = suite_instance(5, 7, 8).unwrap();
    let want = naive_sep(&s, &[0.3, 0.011]);
    assert_eq!(sep_exact(&s, 0.3).unwrap(), want[0]);
    assert_eq!(sep_exact(&s, 0.011).unwrap(), want[1]);
}

#[test]
fn emd_matches_vertex_enumeration() {
    let mut rng = seeded(8);
    for i in 0..60 {
        let s = suite_instance(13, i, 8).unwrap();
        let n = s.len();
        let mu = random_measure(&mut rng, n, true);
        let nu = random_measure(&mut rng, n, true);
        let plan = emd(&s, &mu, &nu).unwrap();
        // keep the enumeration small
        if mu.iter().filter(|&&x| x > 0.0).count() * nu.iter().filter(|&&x| x > 0.0).count() <= 20 {
            let want = vertex_emd(&s, &mu, &nu);
            assert!((plan.cost - want).abs() <= 1e-9, "instance {i}: {} vs {want}", plan.cost);
        }
    }
}

#[test]
fn net_on_small_cube_is_optimal() {
    let s = cube(3);
    let net = greedy_net(&s, 0.34).unwrap();
    assert_eq!(net.len(), exact_cover(&s, 0.34));
}

#[test]
fn net_never_beats_exact_cover() {
    for i in 0..30 {
        let s = suite_instance(21, i, 9).unwrap();
        let d = s.diameter().max(1.0);
        for u in [d / 7.0, d / 3.0, d / 1.5] {
            assert!(greedy_net(&s, u).unwrap().len() >= exact_cover(&s, u));
        }
    }
}

#[test]
fn hamming_analytic_matches_harper_growth() {
    for d in 1..=12usize {
        let size = 1usize << d;
        for i in 1..=size / 2 {
            let kappa = i as f64 / size as f64;
            let steps = harper_sep_steps(d, min_points(kappa, d));
            assert_eq!(sep_hamming_analytic(d, kappa).unwrap(), steps as f64 / d as f64, "d={d} i={i}");
            assert!(sep_hamming_ball_witness(d, kappa).unwrap() <= steps as f64 / d as f64);
        }
    }
}

#[test]
fn hamming_analytic_matches_harper_off_dyadic_grid() {
    for d in [13usize, 16] {
        for &kappa in &kappa_grid(50) {
            let steps = harper_sep_steps(d, min_points(kappa, d));
            assert_eq!(sep_hamming_analytic(d, kappa).unwrap(), steps as f64 / d as f64, "d={d} κ={kappa}");
        }
    }
}

#[test]
fn hamming_analytic_matches_subset_search() {
    for d in 1..=4u32 {
        let s = cube(d);
        let size = 1usize << d;
        for i in 1..=size / 2 {
            let kappa = i as f64 / size as f64;
            assert_eq!(sep_exact(&s, kappa).unwrap(), sep_hamming_analytic(d as usize, kappa).unwrap());
        }
    }
}

#[test]
fn chavez_matches_binomial_law() {
    for d in 1..=12u32 {
        let s = cube(d);
        for (diag, inc) in [(Diagonal::Included, true), (Diagonal::Excluded, false)] {
            let got = dim_chavez(&s, diag).value();
            let want = chavez_cube(d as u64, inc);
            assert!(got == want || (got - want).abs() <= 1e-9 * want, "d={d} {diag:?}: {got} vs {want}");
        }
        assert!((chavez_cube(d as u64, true) - d as f64 / 2.0).abs() < 1e-12);
    }
}

#[test]
fn alpha_on_cube_balls() {
    // a ball of radius 1 in {0,1}^4 holds 5 of 16 points; with the radius-2
    // ball (11 points) as A, only the antipode of the centre lies farther
    // than 1/4 from it
    let s = cube(4);
    assert_eq!(alpha_exact(&s, 0.25).unwrap(), naive_alpha(&s, 0.25));
}
