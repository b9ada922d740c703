use lamptf::bvp::resolve_shot;
use lamptf::{particular_solution, shoot, solve_bvp, Error, ShotKind, SolveOptions};

#[test]
fn shot_trichotomy_at_p1() {
    let o = SolveOptions::default();
    assert_eq!(shoot(1.0, -1.6, 50.0, &o).unwrap().kind, ShotKind::Undershoot);
    assert_eq!(shoot(1.0, -1.5, 50.0, &o).unwrap().kind, ShotKind::Overshoot);
    assert_eq!(shoot(1.0, -1.58807102, 50.0, &o).unwrap().kind, ShotKind::Monotone);
}

#[test]
fn monotone_shot_is_positive_decreasing_convex() {
    let out = shoot(1.0, -1.58807102, 50.0, &SolveOptions::default()).unwrap();
    assert_eq!(out.kind, ShotKind::Monotone);
    for s in &out.curve.samples {
        let (x, y, dy) = (s.t, s.state[0], s.state[1]);
        assert!(y > 0.0 && dy < 0.0, "x = {x}: y = {y}, y' = {dy}");
        let ypp = out.curve.dense_derivative(x).unwrap()[1];
        assert!(ypp > 0.0, "x = {x}: y'' = {ypp}");
    }
}

#[test]
fn bracket_endpoints_are_certified() {
    for p in [1.0, 2.0] {
        let sol = solve_bvp(p, &SolveOptions::default()).unwrap();
        let (lo, hi) = sol.bracket_shots;
        assert_eq!(lo.kind, ShotKind::Undershoot);
        assert_eq!(hi.kind, ShotKind::Overshoot);
        assert!(sol.bracket.1 - sol.bracket.0 <= 1e-10);
        assert_eq!(sol.slope, sol.bracket.0);
    }
}

#[test]
fn residual_within_design_bound() {
    let o = SolveOptions::default();
    let sol = solve_bvp(1.0, &o).unwrap();
    for (x, ypp, rhs) in sol.midpoint_residuals().unwrap() {
        assert!(
            (ypp - rhs).abs() <= 100.0 * o.rtol * ypp.abs().max(1.0),
            "x = {x}: {ypp} vs {rhs}"
        );
    }
}

#[test]
fn ratio_to_particular_increases_along_tail() {
    let sol = solve_bvp(1.0, &SolveOptions::default()).unwrap();
    let w10 = sol.ratio_at(10.0).unwrap();
    let w50 = sol.ratio_at(50.0).unwrap();
    assert!(0.0 < w10 && w10 < w50 && w50 < 1.0, "w(10) = {w10}, w(50) = {w50}");
    let y0 = particular_solution(1.0).unwrap();
    assert!(sol.eval(50.0).unwrap().0 < y0.eval(50.0));
}

#[test]
fn large_p_reports_missing_bracket() {
    match solve_bvp(20.0, &SolveOptions::default()) {
        Err(Error::NoBracket { p, lo, hi }) => assert_eq!((p, lo, hi), (20.0, -10.0, 0.0)),
        other => panic!("expected NoBracket, got {other:?}"),
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(solve_bvp(-0.5, &SolveOptions::default()).is_err());
    assert!(solve_bvp(1.0, &SolveOptions::default().slope_tol(1e-13)).is_err());
    assert!(solve_bvp(1.0, &SolveOptions::default().x_max(0.0)).is_err());
}

#[test]
fn resolved_shot_escalates_horizon() {
    let r = resolve_shot(1.0, -1.58807102, &SolveOptions::default()).unwrap();
    assert!(r.horizon > 50.0);
    assert_ne!(r.kind, ShotKind::Monotone);
}
