//! Cached Gauss rules and a small adaptive integrator.
//!
//! Node/weight generation is delegated to `gauss-quad`. Rules are memoized
//! per (degree, alpha, beta) because the Riesz engine asks for the same few
//! rules millions of times.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::{GaussJacobi, GaussLegendre};

use crate::error::{Error, Result};

/// Node/weight pairs of a rule on `[-1, 1]`.
pub type Rule = Arc<Vec<(f64, f64)>>;

type Key = (usize, u64, u64);

fn cache() -> &'static Mutex<HashMap<Key, Rule>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Rule>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss-Legendre rule with `n` nodes on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Rule {
    let key = (n, u64::MAX, u64::MAX);
    if let Some(rule) = cache().lock().unwrap().get(&key) {
        return rule.clone();
    }
    let deg = NonZeroUsize::new(n.max(1)).unwrap();
    let mut pairs = GaussLegendre::new(deg).as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let rule = Arc::new(pairs);
    cache().lock().unwrap().insert(key, rule.clone());
    rule
}

/// Gauss-Jacobi rule for the weight `(1-x)^alpha (1+x)^beta` on `[-1, 1]`.
///
/// Odd degrees are bumped to the next even one; the library's odd-degree
/// path assumes `alpha == beta`.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<Rule> {
    let n = n.max(2) + n % 2;
    let key = (n, alpha.to_bits(), beta.to_bits());
    if let Some(rule) = cache().lock().unwrap().get(&key) {
        return Ok(rule.clone());
    }
    let a = alpha
        .try_into()
        .map_err(|_| Error::Domain(format!("Jacobi alpha must exceed -1, got {alpha}")))?;
    let b = beta
        .try_into()
        .map_err(|_| Error::Domain(format!("Jacobi beta must exceed -1, got {beta}")))?;
    let deg = NonZeroUsize::new(n).unwrap();
    let mut pairs = GaussJacobi::new(deg, a, b).as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let rule = Arc::new(pairs);
    cache().lock().unwrap().insert(key, rule.clone());
    Ok(rule)
}

/// Integrates `f` over `[a, b]` with a fixed rule.
pub fn integrate_rule(rule: &[(f64, f64)], a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for &(x, w) in rule {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Globally adaptive Gauss-Legendre integration on a finite interval.
///
/// Each panel is compared against its two halves; panels are bisected until
/// the estimated error falls below `tol * max(1, |I|)`.
pub fn adaptive(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let rule = gauss_legendre(15);
    let mut stack = vec![(a, b, integrate_rule(&rule, a, b, &mut f), 0usize)];
    let mut total = 0.0;
    let mut err_budget = Vec::new();
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = integrate_rule(&rule, lo, mid, &mut f);
        let right = integrate_rule(&rule, mid, hi, &mut f);
        let err = (left + right - whole).abs();
        let scale = (left + right).abs().max(1e-300);
        if err <= tol * scale.max(1.0) * 1e-2 || err <= 1e-15 * scale {
            total += left + right;
            err_budget.push(err);
        } else if depth >= 60 {
            return Err(Error::Quadrature(format!(
                "adaptive rule did not resolve [{lo}, {hi}]"
            )));
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let rule = gauss_legendre(8);
        let v = integrate_rule(&rule, 0.0, 2.0, |x| x.powi(15));
        assert_relative_eq!(v, 2f64.powi(16) / 16.0, max_relative = 1e-13);
    }

    #[test]
    fn jacobi_weight_moments() {
        // int (1-x^2) dx = 4/3, int (1-x^2) x^2 dx = 4/15
        let rule = gauss_jacobi(64, 1.0, 1.0).unwrap();
        assert_relative_eq!(integrate_rule(&rule, -1.0, 1.0, |_| 1.0), 4.0 / 3.0, max_relative = 1e-13);
        assert_relative_eq!(
            integrate_rule(&rule, -1.0, 1.0, |x| x * x),
            4.0 / 15.0,
            max_relative = 1e-13
        );
        // one-sided weight (1+x)^{2.5}: int = 2^{3.5}/3.5
        let rule = gauss_jacobi(9, 0.0, 2.5).unwrap();
        assert_eq!(rule.len(), 10);
        assert_relative_eq!(
            integrate_rule(&rule, -1.0, 1.0, |_| 1.0),
            2f64.powf(3.5) / 3.5,
            max_relative = 1e-13
        );
    }

    #[test]
    fn jacobi_rejects_bad_exponent() {
        assert!(gauss_jacobi(8, -1.0, 0.0).is_err());
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let v = adaptive(|x| x.sqrt(), 0.0, 1.0, 1e-12).unwrap();
        assert_relative_eq!(v, 2.0 / 3.0, max_relative = 1e-10);
        let v = adaptive(|x| (-x * x).exp(), -8.0, 8.0, 1e-13).unwrap();
        assert_relative_eq!(v, std::f64::consts::PI.sqrt(), max_relative = 1e-12);
    }
}
