//! The shooting solver against oracles that share none of its code.
//!
//! The substitution `x = s^(p+1)` turns `y'' = x^(-q) y^(1+q)` into the
//! regular system `dy/ds = (p+1) s^p v`, `dv/ds = (p+1) y^(1+q)`, which a
//! fixed-step RK4 handles right from the origin.

use lamptf::{solve_bvp, SolveOptions};

/// Frozen from scipy `solve_ivp` (DOP853, rtol 1e-13) plus bisection.
const SCIPY_SLOPE_P1: f64 = -1.58807102420733;

enum Fate {
    Under,
    Over,
}

fn classify_shot(p: f64, slope: f64, s_max: f64, ds: f64) -> Option<Fate> {
    let q = p / (p + 1.0);
    let m = p + 1.0;
    let f = |s: f64, y: f64, v: f64| -> (f64, f64) {
        let yq = if y > 0.0 { y.powf(1.0 + q) } else { 0.0 };
        (m * s.powf(p) * v, m * yq)
    };
    let (mut s, mut y, mut v) = (0.0_f64, 1.0_f64, slope);
    while s < s_max {
        let (k1y, k1v) = f(s, y, v);
        let (k2y, k2v) = f(s + ds / 2.0, y + ds / 2.0 * k1y, v + ds / 2.0 * k1v);
        let (k3y, k3v) = f(s + ds / 2.0, y + ds / 2.0 * k2y, v + ds / 2.0 * k2v);
        let (k4y, k4v) = f(s + ds, y + ds * k3y, v + ds * k3v);
        y += ds / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += ds / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        s += ds;
        if y <= 0.0 {
            return Some(Fate::Under);
        }
        if v >= 0.0 {
            return Some(Fate::Over);
        }
    }
    None
}

fn oracle_slope(p: f64, lo: f64, hi: f64, s_max: f64, ds: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..45 {
        let mid = 0.5 * (lo + hi);
        match classify_shot(p, mid, s_max, ds) {
            Some(Fate::Under) => lo = mid,
            Some(Fate::Over) => hi = mid,
            None => break,
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn thomas_fermi_slope_matches_frozen_reference() {
    let sol = solve_bvp(1.0, &SolveOptions::default()).unwrap();
    assert!((sol.slope - SCIPY_SLOPE_P1).abs() < 1e-9, "slope {}", sol.slope);
    assert!(sol.bracket.0 <= SCIPY_SLOPE_P1 + 1e-10 && SCIPY_SLOPE_P1 <= sol.bracket.1 + 1e-10);
}

#[test]
fn thomas_fermi_slope_matches_rk4_oracle() {
    let oracle = oracle_slope(1.0, -2.0, -1.0, 10.0, 5e-4);
    let sol = solve_bvp(1.0, &SolveOptions::default()).unwrap();
    assert!(
        (sol.slope - oracle).abs() < 1e-6,
        "solver {} oracle {oracle}",
        sol.slope
    );
}

#[test]
fn p2_slope_matches_rk4_oracle() {
    // x = s^3 reaches x = 64 at s = 4.
    let oracle = oracle_slope(2.0, -3.0, -2.0, 4.0, 2e-4);
    let sol = solve_bvp(2.0, &SolveOptions::default()).unwrap();
    assert!(
        (sol.slope - oracle).abs() < 1e-5,
        "solver {} oracle {oracle}",
        sol.slope
    );
}

#[test]
fn oracle_profile_agrees_pointwise() {
    // y(1) from the oracle at the solver's own slope.
    let sol = solve_bvp(1.0, &SolveOptions::default()).unwrap();
    let (ds, mut s, mut y, mut v) = (1e-4_f64, 0.0_f64, 1.0_f64, sol.slope);
    let f = |s: f64, y: f64, v: f64| (2.0 * s * v, 2.0 * y.max(0.0).powf(1.5));
    while s < 1.0 - 1e-12 {
        let (a1, b1) = f(s, y, v);
        let (a2, b2) = f(s + ds / 2.0, y + ds / 2.0 * a1, v + ds / 2.0 * b1);
        let (a3, b3) = f(s + ds / 2.0, y + ds / 2.0 * a2, v + ds / 2.0 * b2);
        let (a4, b4) = f(s + ds, y + ds * a3, v + ds * b3);
        y += ds / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        v += ds / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
        s += ds;
    }
    let (ys, dys) = sol.eval(1.0).unwrap();
    assert!((ys - y).abs() < 1e-8, "y(1): solver {ys} oracle {y}");
    assert!((dys - v).abs() < 1e-8, "y'(1): solver {dys} oracle {v}");
}
