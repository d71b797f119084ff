use approx::assert_relative_eq;
use choquard_core::bubble::*;
use choquard_core::constants::{bubble_mass_a, critical_exponents};
use choquard_core::{DomainSpec, QuadSpec, RadialGrid};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_point(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| scale * (2.0 * rng.random::<f64>() - 1.0)).collect()
}

#[test]
fn scaling_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let lambda = 0.2 + 5.0 * rng.random::<f64>();
        let xi = random_point(&mut rng, 5, 0.5);
        let x = random_point(&mut rng, 5, 1.0);
        let p = BubbleParams::new(lambda, xi.clone()).unwrap();
        let unit = BubbleParams::centered(5, 1.0).unwrap();
        let y: Vec<f64> = x.iter().zip(&xi).map(|(a, b)| lambda * (a - b)).collect();
        assert_relative_eq!(
            bubble_eval(&p, &x).unwrap(),
            lambda.powf(1.5) * bubble_eval(&unit, &y).unwrap(),
            max_relative = 1e-13
        );
    }
}

#[test]
fn z_fields_match_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let delta = 1e-5;
    for _ in 0..20 {
        let lambda = 0.5 + 3.0 * rng.random::<f64>();
        let xi = random_point(&mut rng, 5, 0.3);
        let x = random_point(&mut rng, 5, 1.0);
        let p = BubbleParams::new(lambda, xi.clone()).unwrap();
        let up = BubbleParams::new(lambda + delta, xi.clone()).unwrap();
        let dn = BubbleParams::new(lambda - delta, xi.clone()).unwrap();
        let fd = (bubble_eval(&up, &x).unwrap() - bubble_eval(&dn, &x).unwrap()) / (2.0 * delta);
        let z = z_field(&p, &x, 0).unwrap();
        assert!((fd - z).abs() < 1e-8 * z.abs().max(1.0), "{fd} vs {z}");
        for j in 1..=5 {
            let mut a = xi.clone();
            let mut b = xi.clone();
            a[j - 1] += delta;
            b[j - 1] -= delta;
            let pa = BubbleParams::new(lambda, a).unwrap();
            let pb = BubbleParams::new(lambda, b).unwrap();
            let fd = (bubble_eval(&pa, &x).unwrap() - bubble_eval(&pb, &x).unwrap()) / (2.0 * delta);
            let z = z_field(&p, &x, j).unwrap();
            assert!((fd - z).abs() < 1e-8 * z.abs().max(1.0), "j = {j}: {fd} vs {z}");
        }
    }
}

#[test]
fn critical_mass_is_scale_free() {
    let a = bubble_mass_a(5).unwrap();
    for lambda in [0.5, 1.0, 4.0] {
        let g = RadialGrid::free_space(5, 1e-4 / lambda, 1e4 / lambda, 2000).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|&r| bubble_radial(5, lambda, r).powf(10.0 / 3.0)).collect();
        let mass = g.integrate_smooth(&v);
        assert_relative_eq!(mass, a, max_relative = 1e-6);
    }
}

#[test]
fn laplacian_matches_radial_formula() {
    // -Delta U = -(U'' + (N-1) U' / r) by central differences
    let lambda = 2.0;
    for r in [0.1f64, 0.4, 1.3] {
        let h = 1e-4;
        let f = |s: f64| bubble_radial(5, lambda, s);
        let d2 = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
        let d1 = (f(r + h) - f(r - h)) / (2.0 * h);
        let p = BubbleParams::centered(5, lambda).unwrap();
        let got = bubble_laplacian(&p, &[r, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(got, -(d2 + 4.0 * d1 / r), max_relative = 1e-6);
    }
}

#[test]
fn first_order_projection_reduces_to_bubble_without_corrections() {
    // Small eps and a far-away evaluation point: both corrections are tiny
    // against U only when lambda is large, so compare the differences directly.
    let p = BubbleParams::centered(5, 1e4).unwrap();
    let d = DomainSpec::pierced_unit_ball(1e-9).unwrap();
    let x = [1e-3, 0.0, 0.0, 0.0, 0.0];
    let u = bubble_eval(&p, &x).unwrap();
    let pu = projected_bubble_first_order(&p, &d, &x).unwrap();
    assert!((u - pu).abs() < 1e-4 * u, "{u} vs {pu}");
}

#[test]
fn first_order_projection_nearly_vanishes_on_boundary() {
    let eps = 0.01;
    let d = DomainSpec::pierced_unit_ball(eps).unwrap();
    for lambda in [5.0, 10.0, 20.0, 40.0] {
        let p = BubbleParams::centered(5, lambda).unwrap();
        for r in [eps, 1.0] {
            let x = [0.0, r, 0.0, 0.0, 0.0];
            let pu = projected_bubble_first_order(&p, &d, &x).unwrap();
            let bound = remainder_bound(&p, &d, &x).unwrap();
            assert!(pu.abs() <= 10.0 * bound, "lambda {lambda}, r {r}: {pu} vs bound {bound}");
        }
    }
}

#[test]
fn remainder_dominated_by_bound_against_exact_projection() {
    let eps = 0.01;
    let d = DomainSpec::pierced_unit_ball(eps).unwrap();
    for lambda in [5.0, 10.0, 20.0, 40.0] {
        let p = BubbleParams::centered(5, lambda).unwrap();
        for r in [0.01, 0.02, 0.05, 0.1, 0.3, 0.6, 1.0] {
            let x = [r, 0.0, 0.0, 0.0, 0.0];
            let exact = projected_bubble_radial(5, lambda, eps, r).unwrap();
            let first = projected_bubble_first_order(&p, &d, &x).unwrap();
            let bound = remainder_bound(&p, &d, &x).unwrap();
            assert!((exact - first).abs() <= 10.0 * bound, "lambda {lambda}, r {r}");
        }
    }
}

#[test]
fn remainder_bound_decays_with_fixed_eps_lambda() {
    let x = [0.5, 0.0, 0.0, 0.0, 0.0];
    let b = |lambda: f64| {
        let p = BubbleParams::centered(5, lambda).unwrap();
        let d = DomainSpec::pierced_unit_ball(0.1 / lambda).unwrap();
        remainder_bound(&p, &d, &x).unwrap()
    };
    assert!(b(10.0) > b(20.0) && b(20.0) > b(40.0));
}

fn residual_relative(n: usize, r: f64) -> f64 {
    let params = critical_exponents(5, 0.5).unwrap();
    let p = BubbleParams::centered(5, 1.0).unwrap();
    let q = QuadSpec { radial_nodes: n, ..QuadSpec::default() };
    bubble_residual_terms(&params, &p, &[r, 0.0, 0.0, 0.0, 0.0], &q).unwrap().relative()
}

#[test]
fn residual_vanishes_at_centre_and_far_point() {
    for r in [0.0, 2.0] {
        let rel = residual_relative(256, r);
        assert!(rel < 1e-4, "r = {r}: {rel}");
    }
}

#[test]
fn residual_scaling_law() {
    let params = critical_exponents(5, 0.5).unwrap();
    let q = QuadSpec::default();
    let one = BubbleParams::centered(5, 1.0).unwrap();
    let two = BubbleParams::centered(5, 2.0).unwrap();
    let r = 0.4;
    let lhs = bubble_residual_terms(&params, &two, &[r, 0.0, 0.0, 0.0, 0.0], &q).unwrap();
    let rhs = bubble_residual_terms(&params, &one, &[2.0 * r, 0.0, 0.0, 0.0, 0.0], &q).unwrap();
    let factor = 2f64.powf(3.5);
    assert_relative_eq!(lhs.laplacian, factor * rhs.laplacian, max_relative = 1e-12);
    assert_relative_eq!(lhs.nonlocal, factor * rhs.nonlocal, max_relative = 1e-8);
    assert!((lhs.residual() - factor * rhs.residual()).abs() < 1e-6 * lhs.laplacian);
}

#[test]
fn residual_rejects_offset_centre() {
    let params = critical_exponents(5, 0.5).unwrap();
    let p = BubbleParams::new(1.0, vec![0.1, 0.0, 0.0, 0.0, 0.0]).unwrap();
    assert!(bubble_residual(&params, &p, &[0.0; 5], &QuadSpec::default()).is_err());
}
