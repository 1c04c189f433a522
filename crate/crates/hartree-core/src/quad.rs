//! Adaptive Gauss–Legendre quadrature for smooth 1-D integrands.
//!
//! Used for the free-space bubble integrals, cross-checks of closed-form
//! constants, and the surface integrals of the Green-function identities.
//! Everything is deterministic: fixed node/weight construction, fixed
//! subdivision order.

use crate::error::{HartreeError, Result};

/// Nodes and weights of the m-point Gauss–Legendre rule on [-1, 1].
///
/// Roots of the Legendre polynomial P_m are found by Newton iteration from
/// the Chebyshev-like initial guess; weights are 2/((1-x²)P_m'(x)²).
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 2, "need at least a 2-point rule");
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        // Initial guess for the i-th root (descending order).
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        for _ in 0..100 {
            // Evaluate P_m(x) and P_m'(x) by the three-term recurrence.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = mf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        // Final derivative for the weight.
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=m {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = mf * (x * p1 - p0) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

/// One Gauss–Legendre panel of `f` over [a, b].
fn panel(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, xs: &[f64], ws: &[f64]) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in xs.iter().zip(ws) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Adaptive quadrature of `f` over the finite interval [a, b].
///
/// Bisects panels until the order-16 value and the sum of its two halves
/// agree to `tol` relative to the running integral (with a tiny absolute
/// floor), then returns (value, error estimate). Fails with a tolerance
/// error if the subdivision budget is exhausted.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    let (xs, ws) = gauss_legendre(16);
    let mut stack = vec![(a, b, panel(&mut f, a, b, &xs, &ws), 0u32)];
    let mut total = 0.0f64;
    let mut err = 0.0f64;
    let mut budget = 100_000usize;
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        if budget == 0 {
            return Err(HartreeError::Tolerance {
                context: format!("adaptive quadrature on [{a}, {b}] ran out of panels"),
                achieved: err.max(whole.abs()),
                wanted: tol,
            });
        }
        budget -= 1;
        let mid = 0.5 * (lo + hi);
        let left = panel(&mut f, lo, mid, &xs, &ws);
        let right = panel(&mut f, mid, hi, &xs, &ws);
        let diff = (left + right - whole).abs();
        let scale = total.abs().max(whole.abs()).max(1e-300);
        if diff <= tol * scale.max(1.0 * tol) || depth >= 52 || (hi - lo) < 1e-15 * (b - a).abs() {
            total += left + right;
            err += diff;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    Ok((total, err))
}

/// Adaptive quadrature of `f` over [a, ∞) for integrands with algebraic
/// decay `f = O(r^{-3})` or faster: substitutes r = a + t/(1-t) and
/// integrates the transformed integrand over [0, 1].
pub fn integrate_to_inf(mut f: impl FnMut(f64) -> f64, a: f64, tol: f64) -> Result<(f64, f64)> {
    let g = move |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let om = 1.0 - t;
        let r = a + t / om;
        f(r) / (om * om)
    };
    integrate(g, 0.0, 1.0, tol)
}
