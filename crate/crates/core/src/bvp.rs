//! Shooting solver for `y'' = x^(-q) y^(1+q)`, `y(0) = 1`, `y(∞) = 0`.
//!
//! Each shot starts a small distance `x0` from the singular origin using the
//! leading terms of the local expansion and integrates outward. Slopes below
//! the critical one make `y` cross zero (undershoot); slopes above it make
//! `y'` turn positive and the solution blow up (overshoot). Bisection on the
//! initial slope between the two outcome kinds gives the critical slope.

use crate::error::{Error, Result};
use crate::family::{family_params, particular_solution, FamilyParams};
use crate::integrate::{integrate_ivp, IvProblem, SolutionCurve, Status};
use rayon::prelude::*;
use serde::Serialize;

/// `(y, y')` at `x0` from `y ≈ 1 + B x + x^(2-q)/((1-q)(2-q))`.
///
/// The neglected terms are `O(B x^(3-q))`.
pub fn series_start(p: f64, slope: f64, x0: f64) -> Result<(f64, f64)> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "requires p > 0",
        });
    }
    if !(x0 > 0.0) {
        return Err(Error::Singularity { x: x0 });
    }
    let q = p / (p + 1.0);
    let y = 1.0 + slope * x0 + x0.powf(2.0 - q) / ((1.0 - q) * (2.0 - q));
    let dy = slope + x0.powf(1.0 - q) / (1.0 - q);
    Ok((y, dy))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Series-start offset from the origin.
    pub x0: f64,
    /// Truncation of the far boundary.
    pub x_max: f64,
    pub slope_tol: f64,
    /// Initial bracket search runs over `[search_lo, search_hi]`.
    pub search_lo: f64,
    pub search_hi: f64,
    pub search_step: f64,
    /// An undecided (monotone) shot is re-run on horizons doubled up to
    /// `x_max * horizon_cap`.
    pub horizon_cap: f64,
    /// Steps are capped at this fraction of `x`, which keeps the dense
    /// output accurate near the singular origin.
    pub max_step_rel: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            rtol: 1e-12,
            atol: 1e-14,
            x0: 1e-6,
            x_max: 50.0,
            slope_tol: 1e-10,
            search_lo: -10.0,
            search_hi: 0.0,
            search_step: 0.5,
            horizon_cap: 64.0,
            max_step_rel: 0.005,
        }
    }
}

impl SolveOptions {
    pub fn slope_tol(mut self, tol: f64) -> Self {
        self.slope_tol = tol;
        self
    }

    pub fn x_max(mut self, x_max: f64) -> Self {
        self.x_max = x_max;
        self
    }

    pub fn rtol(mut self, rtol: f64) -> Self {
        self.rtol = rtol;
        self
    }

    pub fn atol(mut self, atol: f64) -> Self {
        self.atol = atol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.slope_tol >= 1e-12) {
            return Err(Error::InvalidParameter {
                name: "slope_tol",
                value: self.slope_tol,
                reason: "must be at least 1e-12",
            });
        }
        if !(self.x_max > self.x0) || !(self.x0 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "x_max",
                value: self.x_max,
                reason: "must exceed the series-start offset",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShotKind {
    /// `y` reaches zero at finite `x` while still decreasing.
    Undershoot,
    /// `y'` turns positive (or the solution blows up) while `y > 0`.
    Overshoot,
    /// Reached `x_max` with `y > 0`, `y' < 0`.
    Monotone,
}

#[derive(Debug, Clone)]
pub struct ShotOutcome {
    pub kind: ShotKind,
    /// Zero crossing, turning point, or `x_max`.
    pub x_mark: f64,
    pub curve: SolutionCurve,
}

/// Integrate one shot with initial slope `slope` out to `x_max`.
pub fn shoot(p: f64, slope: f64, x_max: f64, opts: &SolveOptions) -> Result<ShotOutcome> {
    let params = FamilyParams::new(p)?;
    let (y0, dy0) = series_start(p, slope, opts.x0)?;
    if !(x_max > opts.x0) {
        return Err(Error::InvalidParameter {
            name: "x_max",
            value: x_max,
            reason: "must exceed the series-start offset",
        });
    }
    let q = params.q;
    // Stage values may step slightly past y = 0 inside the crossing step;
    // the right-hand side is continued by zero there.
    let rhs = move |x: f64, s: &[f64], d: &mut [f64]| -> Result<()> {
        d[0] = s[1];
        d[1] = x.powf(-q) * s[0].max(0.0).powf(1.0 + q);
        Ok(())
    };
    let problem = IvProblem::new(rhs, opts.x0, vec![y0, dy0], x_max)
        .rtol(opts.rtol)
        .atol(opts.atol)
        .max_step_rel(opts.max_step_rel);
    let hits_zero = |_x: f64, s: &[f64]| s[0];
    let turns = |_x: f64, s: &[f64]| s[1];
    let curve = if dy0 < 0.0 {
        integrate_ivp(&problem, &[&hits_zero, &turns])
    } else {
        integrate_ivp(&problem, &[&hits_zero])
    }
    .map_err(|e| Error::Shot {
        slope,
        source: Box::new(e),
    })?;

    let last = curve.last();
    let (kind, x_mark) = match curve.status {
        Status::StepUnderflow => {
            return Err(Error::Shot {
                slope,
                source: Box::new(Error::StepUnderflow { t: last.t, h: 0.0 }),
            })
        }
        Status::EventStopped => {
            let ev = curve.event.expect("event status carries event info");
            if ev.index == 0 {
                (ShotKind::Undershoot, ev.t)
            } else {
                (ShotKind::Overshoot, ev.t)
            }
        }
        Status::Diverged => (ShotKind::Overshoot, if dy0 >= 0.0 { opts.x0 } else { last.t }),
        Status::Completed => {
            if dy0 >= 0.0 {
                (ShotKind::Overshoot, opts.x0)
            } else if last.state[0] > 0.0 && last.state[1] < 0.0 {
                (ShotKind::Monotone, last.t)
            } else if last.state[0] <= 0.0 {
                (ShotKind::Undershoot, last.t)
            } else {
                (ShotKind::Overshoot, last.t)
            }
        }
    };
    Ok(ShotOutcome { kind, x_mark, curve })
}

/// A shot classified on the shortest horizon (doubling from `x_max`) on which
/// it is no longer monotone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolvedShot {
    pub slope: f64,
    pub kind: ShotKind,
    pub horizon: f64,
}

pub fn resolve_shot(p: f64, slope: f64, opts: &SolveOptions) -> Result<ResolvedShot> {
    let mut horizon = opts.x_max;
    loop {
        let out = shoot(p, slope, horizon, opts)?;
        if out.kind != ShotKind::Monotone || horizon >= opts.x_max * opts.horizon_cap {
            return Ok(ResolvedShot {
                slope,
                kind: out.kind,
                horizon,
            });
        }
        horizon *= 2.0;
    }
}

/// A solved boundary-value problem.
#[derive(Debug, Clone)]
pub struct TFSolution {
    pub p: f64,
    /// Critical initial slope `y'(0+)`: the undershoot side of the final
    /// bracket.
    pub slope: f64,
    pub bracket: (f64, f64),
    /// Endpoints of the final bracket with their certified outcome kinds.
    pub bracket_shots: (ResolvedShot, ResolvedShot),
    /// The representative shot at `slope`, integrated to `x_max`.
    pub curve: SolutionCurve,
    /// `w = y/y0` on a log-spaced tail grid.
    pub ratio_tail: Vec<(f64, f64)>,
    pub x_max: f64,
}

impl TFSolution {
    /// `(x, y, y')` at the stored samples.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.curve.samples.iter().map(|s| (s.t, s.state[0], s.state[1]))
    }

    pub fn eval(&self, x: f64) -> Result<(f64, f64)> {
        let s = self.curve.dense_eval(x)?;
        Ok((s[0], s[1]))
    }

    pub fn ratio_at(&self, x: f64) -> Result<f64> {
        let y0 = particular_solution(self.p)?;
        Ok(self.eval(x)?.0 / y0.eval(x))
    }

    /// `(x, y'', x^(-q) y^(1+q))` at the midpoint of every stored step, with
    /// `y''` differentiated from the dense output.
    pub fn midpoint_residuals(&self) -> Result<Vec<(f64, f64, f64)>> {
        let params = family_params(self.p)?;
        self.curve
            .step_midpoints()
            .into_iter()
            .map(|x| {
                let y = self.curve.dense_eval(x)?[0];
                let ypp = self.curve.dense_derivative(x)?[1];
                Ok((x, ypp, crate::family::ef_rhs(&params, x, y)?))
            })
            .collect()
    }
}

fn bracket_search(p: f64, opts: &SolveOptions) -> Result<(ResolvedShot, ResolvedShot)> {
    let steps = ((opts.search_hi - opts.search_lo) / opts.search_step).round() as usize;
    let slopes: Vec<f64> = (0..=steps)
        .map(|i| opts.search_lo + i as f64 * opts.search_step)
        .collect();
    let shots: Vec<ResolvedShot> = slopes
        .par_iter()
        .map(|&b| resolve_shot(p, b, opts))
        .collect::<Result<_>>()?;
    shots
        .windows(2)
        .find(|w| w[0].kind == ShotKind::Undershoot && w[1].kind != ShotKind::Undershoot)
        .map(|w| (w[0], w[1]))
        .ok_or(Error::NoBracket {
            p,
            lo: opts.search_lo,
            hi: opts.search_hi,
        })
}

/// Critical-slope shooting for the family member `p`.
pub fn solve_bvp(p: f64, opts: &SolveOptions) -> Result<TFSolution> {
    opts.validate()?;
    FamilyParams::new(p)?;
    if !(p > 0.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "requires p > 0",
        });
    }
    let (mut lo, mut hi) = bracket_search(p, opts)?;
    while hi.slope - lo.slope > opts.slope_tol {
        let mid = 0.5 * (lo.slope + hi.slope);
        if mid <= lo.slope || mid >= hi.slope {
            break;
        }
        let shot = resolve_shot(p, mid, opts)?;
        if shot.kind == ShotKind::Undershoot {
            lo = shot;
        } else {
            hi = shot;
        }
    }
    let rep = shoot(p, lo.slope, opts.x_max, opts)?;
    let mut sol = TFSolution {
        p,
        slope: lo.slope,
        bracket: (lo.slope, hi.slope),
        bracket_shots: (lo, hi),
        curve: rep.curve,
        ratio_tail: Vec::new(),
        x_max: opts.x_max,
    };
    sol.ratio_tail = asymptotic_ratio(&sol)?.samples;
    Ok(sol)
}

/// `w = y/y0` at sampled `(x, y)`.
pub fn ratio_to_particular(p: f64, curve: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    let y0 = particular_solution(p)?;
    Ok(curve.iter().map(|&(x, y)| (x, y / y0.eval(x))).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioTail {
    pub samples: Vec<(f64, f64)>,
    /// Whether `|w - 1|` is non-increasing over the sampled range.
    pub monotone_approach: bool,
}

const TAIL_POINTS: usize = 48;

/// The ratio `y/y0` on a log-spaced grid from `x = 1` to the end of the
/// stored curve.
pub fn asymptotic_ratio(sol: &TFSolution) -> Result<RatioTail> {
    let end = sol.curve.last().t;
    let start = 1.0_f64.min(end);
    let (la, lb) = (start.ln(), end.ln());
    let grid: Vec<(f64, f64)> = (0..TAIL_POINTS)
        .map(|i| {
            let x = if i + 1 == TAIL_POINTS {
                end
            } else {
                (la + (lb - la) * i as f64 / (TAIL_POINTS - 1) as f64).exp()
            };
            Ok((x, sol.curve.dense_eval(x)?[0]))
        })
        .collect::<Result<_>>()?;
    let samples = ratio_to_particular(sol.p, &grid)?;
    let monotone_approach = samples.windows(2).all(|w| (w[1].1 - 1.0).abs() <= (w[0].1 - 1.0).abs());
    Ok(RatioTail {
        samples,
        monotone_approach,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_start_values() {
        let (y, dy) = series_start(1.0, 0.0, 0.01).unwrap();
        assert!((y - (1.0 + 4.0 / 3.0 * 0.001)).abs() < 1e-15);
        assert!((dy - 0.2).abs() < 1e-15);
        let (y, _) = series_start(1.0, -1.5, 0.01).unwrap();
        assert!((y - (1.0 - 0.015 + 4.0 / 3.0 * 0.001)).abs() < 1e-15);
        let (y, _) = series_start(3.0, -2.0, 1e-12).unwrap();
        assert!((y - 1.0).abs() < 1e-11);
        assert!(series_start(1.0, -1.0, 0.0).is_err());
        assert!(series_start(0.0, -1.0, 0.1).is_err());
    }

    #[test]
    fn shot_trichotomy_at_thomas_fermi() {
        let o = SolveOptions::default();
        assert_eq!(shoot(1.0, -2.0, 50.0, &o).unwrap().kind, ShotKind::Undershoot);
        assert_eq!(shoot(1.0, -1.0, 50.0, &o).unwrap().kind, ShotKind::Overshoot);
        assert_eq!(shoot(1.0, -1.58807102, 50.0, &o).unwrap().kind, ShotKind::Monotone);
        assert_eq!(shoot(1.0, 0.0, 50.0, &o).unwrap().kind, ShotKind::Overshoot);
    }

    #[test]
    fn solve_rejects_bad_input() {
        assert!(solve_bvp(-0.5, &SolveOptions::default()).is_err());
        assert!(solve_bvp(1.0, &SolveOptions::default().slope_tol(1e-13)).is_err());
        let narrow = SolveOptions {
            search_lo: -1.0,
            search_hi: 0.0,
            ..SolveOptions::default()
        };
        assert!(matches!(solve_bvp(1.0, &narrow), Err(Error::NoBracket { .. })));
    }
}
