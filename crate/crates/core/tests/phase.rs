use lamptf::phase::{classified_fixed_points, default_seeds, family_orbit, fixed_points, system_rhs, Exit};
use lamptf::{
    classify, family_params, portrait, saddle_recovers_y0, solve_bvp, AutonomousSystem, FixedPointKind, SolveOptions,
    Window,
};

#[test]
fn thomas_fermi_equilibria() {
    let fps = classified_fixed_points(&AutonomousSystem::thomas_fermi()).unwrap();
    let coords: Vec<_> = fps.iter().map(|f| f.coords).collect();
    assert_eq!(coords, vec![(0.0, 0.0), (-1.0, 0.0), (0.0, 3.0), (-4.0, -3.0)]);
    let kinds: Vec<_> = fps.iter().map(|f| f.kind()).collect();
    use FixedPointKind::*;
    assert_eq!(kinds, vec![Saddle, UnstableNode, Saddle, Saddle]);
    assert!(fps[1].note.is_some());
    let tf = classify(&[[4.0, -4.0], [-4.5, 3.0]]).unwrap();
    assert_eq!(tf.kind, Saddle);
}

#[test]
fn interior_point_for_general_p() {
    for p in [0.5, 2.0, 5.0] {
        let chain = AutonomousSystem::for_family(p).unwrap();
        let last = *fixed_points(&chain).points.last().unwrap();
        assert!((last.0 - (-2.0 - 2.0 / p)).abs() < 1e-12 && (last.1 - (-1.0 - 2.0 / p)).abs() < 1e-12);
        let ef = AutonomousSystem::emden_fowler(&family_params(p).unwrap()).unwrap();
        let last = *fixed_points(&ef).points.last().unwrap();
        assert!((last.0 - (-3.0 - 1.0 / p)).abs() < 1e-12 && (last.1 - (-2.0 - 1.0 / p)).abs() < 1e-12);
    }
}

#[test]
fn large_p_limits() {
    let ef = AutonomousSystem::emden_fowler(&family_params(1e9).unwrap()).unwrap();
    let last = *fixed_points(&ef).points.last().unwrap();
    assert!((last.0 + 3.0).abs() < 1e-6 && (last.1 + 2.0).abs() < 1e-6);
    let r = saddle_recovers_y0(1e9).unwrap();
    assert!((r.exponent - 1.0).abs() < 1e-6);
}

#[test]
fn solved_curve_is_an_orbit_of_the_planar_system() {
    let sol = solve_bvp(1.0, &SolveOptions::default()).unwrap();
    let xs: Vec<f64> = (0..=400).map(|i| 10f64.powf(-1.0 + 2.5 * i as f64 / 400.0)).collect();
    let samples: Vec<_> = xs
        .iter()
        .map(|&x| {
            let (y, dy) = sol.eval(x).unwrap();
            (x, y, dy)
        })
        .collect();
    let orbit = family_orbit(1.0, &samples).unwrap();
    let sys = AutonomousSystem::for_family(1.0).unwrap();
    for (i, &(_, x, y)) in orbit.iter().enumerate() {
        let xi = samples[i].0;
        let eta = samples[i].1 / xi;
        let expected = xi.powi(2) * eta.powf(sys.n - 1.0);
        assert!(
            (x * y - expected).abs() < 1e-9 * expected.abs().max(1.0),
            "X Y identity at {xi}"
        );
    }
    for i in 1..orbit.len() - 1 {
        let (t0, x0, y0) = orbit[i - 1];
        let (t1, x1, y1) = orbit[i];
        let (t2, x2, y2) = orbit[i + 1];
        let h = t2 - t0;
        let (fx, fy) = system_rhs(&sys, x1, y1);
        let scale = 1.0 + fx.abs() + fy.abs();
        assert!(((x2 - x0) / h - fx).abs() < 1e-3 * scale, "dX/dt at t = {t1}");
        assert!(((y2 - y0) / h - fy).abs() < 1e-3 * scale, "dY/dt at t = {t1}");
    }
}

#[test]
fn portrait_in_reference_window() {
    let sys = AutonomousSystem::thomas_fermi();
    let window = Window::new(-6.0, 2.0, -5.0, 4.0).unwrap();
    let seeds = default_seeds(&sys, &window).unwrap();
    let pp = portrait(&sys, &seeds, 4.0, &window).unwrap();
    assert_eq!(pp.fixed_points.len(), 4);
    assert_eq!(pp.trajectories.len(), 2 * seeds.len());
    assert!(pp.trajectories.iter().all(|t| !matches!(t.exit, Exit::Failed(_))));
    assert!(pp.nullclines.len() >= 2);
}

#[test]
fn invalid_window_is_rejected() {
    assert!(Window::new(1.0, -1.0, 0.0, 1.0).is_err());
    assert!(Window::new(0.0, 1.0, 0.0, f64::NAN).is_err());
}
