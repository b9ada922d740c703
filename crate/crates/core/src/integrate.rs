//! Adaptive explicit Runge-Kutta integration.
//!
//! Dormand-Prince 5(4) with the standard continuous extension, a PI step
//! controller and terminal event detection. Integration may run forward or
//! backward in `t`. Every accepted step keeps its dense-output coefficients,
//! so [`SolutionCurve::dense_eval`] is available over the whole span.

use crate::error::{Error, Result};
use serde::Serialize;

// Butcher tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// Difference between 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense output.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const PI_BETA: f64 = 0.04;
const EVENT_TOL: f64 = 1e-12;

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on |h|.
    pub max_step: f64,
    /// Upper bound on |h| / |t|, ignored at `t = 0`.
    pub max_step_rel: f64,
    /// Integration stops with [`Status::Diverged`] once the max-norm of the
    /// state exceeds this value.
    pub divergence_bound: f64,
    /// Take constant steps of this size, without error control.
    pub fixed_step: Option<f64>,
    pub initial_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: f64::INFINITY,
            max_step_rel: f64::INFINITY,
            divergence_bound: 1e12,
            fixed_step: None,
            initial_step: None,
            max_steps: 1_000_000,
        }
    }
}

/// An initial-value problem `y' = f(t, y)`, `y(t0) = y0`, on `[t0, t_end]`.
///
/// The right-hand side writes the derivative into its third argument and may
/// refuse a state with a domain error; that error is propagated together with
/// the offending `(t, state)`.
pub struct IvProblem<F> {
    pub rhs: F,
    pub t0: f64,
    pub state0: Vec<f64>,
    pub t_end: f64,
    pub options: Options,
}

impl<F> IvProblem<F>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    pub fn new(rhs: F, t0: f64, state0: Vec<f64>, t_end: f64) -> Self {
        IvProblem {
            rhs,
            t0,
            state0,
            t_end,
            options: Options::default(),
        }
    }

    pub fn rtol(mut self, rtol: f64) -> Self {
        self.options.rtol = rtol;
        self
    }

    pub fn atol(mut self, atol: f64) -> Self {
        self.options.atol = atol;
        self
    }

    pub fn max_step(mut self, max_step: f64) -> Self {
        self.options.max_step = max_step;
        self
    }

    pub fn max_step_rel(mut self, rel: f64) -> Self {
        self.options.max_step_rel = rel;
        self
    }

    pub fn divergence_bound(mut self, bound: f64) -> Self {
        self.options.divergence_bound = bound;
        self
    }

    pub fn fixed_step(mut self, h: f64) -> Self {
        self.options.fixed_step = Some(h);
        self
    }

    pub fn with_options(mut self, options: Options) -> Self {
        self.options = options;
        self
    }

    fn validate(&self) -> Result<()> {
        let o = &self.options;
        if !(o.rtol > 0.0) || !(o.atol > 0.0) {
            return Err(Error::Config("rtol and atol must be positive".into()));
        }
        if self.t_end == self.t0 || !self.t0.is_finite() || !self.t_end.is_finite() {
            return Err(Error::Config("t_end must differ from t0 and both be finite".into()));
        }
        if self.state0.is_empty() {
            return Err(Error::Config("empty state".into()));
        }
        if let Some(h) = o.fixed_step {
            if !(h > 0.0) {
                return Err(Error::Config("fixed step must be positive".into()));
            }
        }
        if !(o.max_step_rel > 0.0) {
            return Err(Error::Config("max_step_rel must be positive".into()));
        }
        if !(o.max_step > 0.0) {
            return Err(Error::Config("max_step must be positive".into()));
        }
        Ok(())
    }

    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        (self.rhs)(t, y, dy).map_err(|source| Error::Rhs {
            t,
            state: y.to_vec(),
            source: Box::new(source),
        })
    }
}

/// How an integration run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Completed,
    EventStopped,
    StepUnderflow,
    Diverged,
}

/// A stored point of the trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: Vec<f64>,
    pub derivative: Vec<f64>,
}

/// Where and which terminal event fired.
///
/// `t` is the last bracket point before the sign change and `t_after` the
/// first one past it; `|t_after - t| <= 1e-12`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventInfo {
    pub t: f64,
    pub t_after: f64,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
struct Segment {
    t0: f64,
    h: f64,
    rc: [Vec<f64>; 5],
}

impl Segment {
    fn eval(&self, t: f64, out: &mut [f64]) {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &self.rc;
        for i in 0..out.len() {
            out[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
        }
    }

    fn eval_derivative(&self, t: f64, out: &mut [f64]) {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let [_, r2, r3, r4, r5] = &self.rc;
        for i in 0..out.len() {
            let a = r4[i] + theta1 * r5[i];
            let da = -r5[i];
            let b = r3[i] + theta * a;
            let db = a + theta * da;
            let c = r2[i] + theta1 * b;
            let dc = -b + theta1 * db;
            out[i] = (c + theta * dc) / self.h;
        }
    }
}

/// A computed trajectory with dense output.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionCurve {
    pub samples: Vec<Sample>,
    pub status: Status,
    pub event: Option<EventInfo>,
    segments: Vec<Segment>,
}

impl SolutionCurve {
    /// A trajectory that sits at `state` for all `t` between `t0` and `t1`.
    pub fn stationary(t0: f64, t1: f64, state: Vec<f64>) -> Self {
        let zero = vec![0.0; state.len()];
        let mut samples = vec![Sample {
            t: t0,
            state: state.clone(),
            derivative: zero.clone(),
        }];
        let mut segments = Vec::new();
        if t1 != t0 {
            samples.push(Sample {
                t: t1,
                state: state.clone(),
                derivative: zero.clone(),
            });
            segments.push(Segment {
                t0,
                h: t1 - t0,
                rc: [state, zero.clone(), zero.clone(), zero.clone(), zero],
            });
        }
        SolutionCurve {
            samples,
            status: Status::Completed,
            event: None,
            segments,
        }
    }

    pub fn dim(&self) -> usize {
        self.samples[0].state.len()
    }

    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("curve has at least one sample")
    }

    /// `(start, end)` in integration order.
    pub fn span(&self) -> (f64, f64) {
        (self.first().t, self.last().t)
    }

    fn direction(&self) -> f64 {
        let (a, b) = self.span();
        if b >= a {
            1.0
        } else {
            -1.0
        }
    }

    fn in_span(&self, t: f64) -> bool {
        let (a, b) = self.span();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        t >= lo && t <= hi
    }

    fn locate(&self, t: f64) -> Result<std::result::Result<usize, usize>> {
        if !self.in_span(t) {
            let (start, end) = self.span();
            return Err(Error::OutOfSpan { t, start, end });
        }
        let dir = self.direction();
        // Index of the sample equal to t, or of the segment containing t.
        let found = self
            .samples
            .binary_search_by(|s| (dir * s.t).partial_cmp(&(dir * t)).unwrap());
        Ok(match found {
            Ok(i) => Ok(i),
            Err(i) => Err((i - 1).min(self.segments.len() - 1)),
        })
    }

    /// State at `t` from the continuous extension. Stored samples are
    /// returned verbatim.
    pub fn dense_eval(&self, t: f64) -> Result<Vec<f64>> {
        match self.locate(t)? {
            Ok(i) => Ok(self.samples[i].state.clone()),
            Err(seg) => {
                let mut out = vec![0.0; self.dim()];
                self.segments[seg].eval(t, &mut out);
                Ok(out)
            }
        }
    }

    /// Time derivative of the dense-output polynomial at `t`.
    pub fn dense_derivative(&self, t: f64) -> Result<Vec<f64>> {
        match self.locate(t)? {
            Ok(i) => Ok(self.samples[i].derivative.clone()),
            Err(seg) => {
                let mut out = vec![0.0; self.dim()];
                self.segments[seg].eval_derivative(t, &mut out);
                Ok(out)
            }
        }
    }

    /// Midpoints of all stored steps.
    pub fn step_midpoints(&self) -> Vec<f64> {
        self.samples.windows(2).map(|w| 0.5 * (w[0].t + w[1].t)).collect()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }
}

/// Scalar event function; a terminal event fires when it changes sign.
pub type EventFn<'a> = &'a dyn Fn(f64, &[f64]) -> f64;

struct Stages {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y1: Vec<f64>,
}

impl Stages {
    fn new(n: usize) -> Self {
        Stages {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            y1: vec![0.0; n],
        }
    }
}

/// One Dormand-Prince step from `(t, y)` with `k[0] = f(t, y)` already set.
/// Leaves the 5th-order solution in `st.y1` and `f(t+h, y1)` in `k[6]`;
/// returns the scaled error norm.
fn dopri_step<F>(problem: &IvProblem<F>, t: f64, y: &[f64], h: f64, st: &mut Stages) -> Result<f64>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let n = y.len();
    let Stages { k, tmp, y1 } = st;
    let [k1, k2, k3, k4, k5, k6, k7] = k;
    for i in 0..n {
        tmp[i] = y[i] + h * A21 * k1[i];
    }
    problem.eval(t + C2 * h, tmp, k2)?;
    for i in 0..n {
        tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
    }
    problem.eval(t + C3 * h, tmp, k3)?;
    for i in 0..n {
        tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
    }
    problem.eval(t + C4 * h, tmp, k4)?;
    for i in 0..n {
        tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
    }
    problem.eval(t + C5 * h, tmp, k5)?;
    for i in 0..n {
        tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
    }
    problem.eval(t + h, tmp, k6)?;
    for i in 0..n {
        y1[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
    }
    problem.eval(t + h, y1, k7)?;

    let o = &problem.options;
    let mut err = 0.0;
    for i in 0..n {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = o.atol + o.rtol * y[i].abs().max(y1[i].abs());
        err += (e / sc).powi(2);
    }
    Ok((err / n as f64).sqrt())
}

fn dense_segment(t: f64, h: f64, y: &[f64], st: &Stages) -> Segment {
    let n = y.len();
    let [k1, _, k3, k4, k5, k6, k7] = &st.k;
    let mut rc: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);
    for i in 0..n {
        let ydiff = st.y1[i] - y[i];
        let bspl = h * k1[i] - ydiff;
        rc[0][i] = y[i];
        rc[1][i] = ydiff;
        rc[2][i] = bspl;
        rc[3][i] = ydiff - h * k7[i] - bspl;
        rc[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    Segment { t0: t, h, rc }
}

fn max_norm(y: &[f64]) -> f64 {
    y.iter()
        .fold(0.0_f64, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

/// Initial step guess following Hairer, Nørsett & Wanner.
fn initial_step<F>(problem: &IvProblem<F>, f0: &[f64], dir: f64) -> Result<f64>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let o = &problem.options;
    let y0 = &problem.state0;
    let n = y0.len();
    let sc: Vec<f64> = y0.iter().map(|v| o.atol + o.rtol * v.abs()).collect();
    let rms =
        |v: &dyn Fn(usize) -> f64| -> f64 { ((0..n).map(|i| (v(i) / sc[i]).powi(2)).sum::<f64>() / n as f64).sqrt() };
    let dnf = rms(&|i| f0[i]);
    let dny = rms(&|i| y0[i]);
    let span = (problem.t_end - problem.t0).abs();
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        0.01 * dny / dnf
    };
    h = h.min(step_cap(o, problem.t0)).min(span);
    let y1: Vec<f64> = (0..n).map(|i| y0[i] + dir * h * f0[i]).collect();
    let mut f1 = vec![0.0; n];
    problem.eval(problem.t0 + dir * h, &y1, &mut f1)?;
    let der2 = rms(&|i| f1[i] - f0[i]) / h;
    let der12 = der2.max(dnf);
    let h1 = if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(0.2)
    };
    Ok((100.0 * h).min(h1).min(step_cap(o, problem.t0)).min(span))
}

fn step_cap(o: &Options, t: f64) -> f64 {
    if t != 0.0 {
        o.max_step.min(o.max_step_rel * t.abs())
    } else {
        o.max_step
    }
}

/// Locate the first root of `g` in the step `[seg.t0, t1]` by bisection on
/// the dense output. Returns `(t_before, t_after)`.
fn bisect_event(seg: &Segment, t1: f64, g: EventFn<'_>, g0: f64) -> (f64, f64) {
    let mut a = seg.t0;
    let mut b = t1;
    let mut y = vec![0.0; seg.rc[0].len()];
    let tol = EVENT_TOL.max(4.0 * f64::EPSILON * a.abs().max(b.abs()));
    while (b - a).abs() > tol {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        seg.eval(m, &mut y);
        let gm = g(m, &y);
        if gm == 0.0 || gm.signum() != g0.signum() {
            b = m;
        } else {
            a = m;
        }
    }
    (a, b)
}

/// Integrate `problem`, stopping at the first sign change of any event.
pub fn integrate_ivp<F>(problem: &IvProblem<F>, events: &[EventFn<'_>]) -> Result<SolutionCurve>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    problem.validate()?;
    let o = problem.options;
    let n = problem.state0.len();
    let dir = (problem.t_end - problem.t0).signum();

    let mut t = problem.t0;
    let mut y = problem.state0.clone();
    let mut st = Stages::new(n);
    problem.eval(t, &y, &mut st.k[0])?;

    let mut curve = SolutionCurve {
        samples: vec![Sample {
            t,
            state: y.clone(),
            derivative: st.k[0].clone(),
        }],
        status: Status::Completed,
        event: None,
        segments: Vec::new(),
    };
    if max_norm(&y) > o.divergence_bound || !max_norm(&y).is_finite() {
        curve.status = Status::Diverged;
        return Ok(curve);
    }

    let mut g_prev: Vec<f64> = events.iter().map(|g| g(t, &y)).collect();
    let mut h = match (o.fixed_step, o.initial_step) {
        (Some(h), _) => h,
        (None, Some(h)) => h.abs(),
        (None, None) => initial_step(problem, &st.k[0], dir)?,
    };
    let mut err_old = 1e-4_f64;
    let mut rejected_last = false;

    for _ in 0..o.max_steps {
        let remaining = (problem.t_end - t).abs();
        if remaining <= 0.0 {
            return Ok(curve);
        }
        h = h.min(step_cap(&o, t));
        let mut last = false;
        if h >= remaining || (o.fixed_step.is_some() && h * (1.0 + 1e-12) >= remaining) {
            h = remaining;
            last = true;
        }
        if o.fixed_step.is_none() && h <= 1e-14 * t.abs().max(f64::MIN_POSITIVE) {
            curve.status = Status::StepUnderflow;
            return Ok(curve);
        }
        let hs = dir * h;
        let err = dopri_step(problem, t, &y, hs, &mut st)?;

        if o.fixed_step.is_none() {
            if !err.is_finite() {
                h *= MIN_FACTOR;
                rejected_last = true;
                continue;
            }
            let fac11 = err.powf(0.2 - PI_BETA * 0.75);
            if err > 1.0 {
                h /= (1.0 / MIN_FACTOR).min(fac11 / SAFETY);
                rejected_last = true;
                continue;
            }
            let mut fac = fac11 / err_old.powf(PI_BETA);
            fac = (1.0 / MAX_FACTOR).max((1.0 / MIN_FACTOR).min(fac / SAFETY));
            let mut h_new = h / fac;
            if rejected_last {
                h_new = h_new.min(h);
            }
            err_old = err.max(1e-4);
            rejected_last = false;
            h = h_new;
        }

        let t_new = if last { problem.t_end } else { t + hs };
        let seg = dense_segment(t, t_new - t, &y, &st);

        // Events: earliest root within this step wins.
        let mut hit: Option<(f64, f64, usize)> = None;
        for (i, g) in events.iter().enumerate() {
            let g_new = g(t_new, &st.y1);
            let g0 = g_prev[i];
            let crossed = (g0 != 0.0 && g_new == 0.0) || g0 * g_new < 0.0;
            if crossed {
                let (ta, tb) = bisect_event(&seg, t_new, *g, g0);
                if hit.is_none_or(|(best, _, _)| dir * ta < dir * best) {
                    hit = Some((ta, tb, i));
                }
            }
            g_prev[i] = g_new;
        }

        if let Some((ta, tb, index)) = hit {
            let mut ya = vec![0.0; n];
            seg.eval(ta, &mut ya);
            let mut da = vec![0.0; n];
            problem.eval(ta, &ya, &mut da)?;
            if ta != t {
                curve.samples.push(Sample {
                    t: ta,
                    state: ya,
                    derivative: da,
                });
                curve.segments.push(seg);
            }
            curve.status = Status::EventStopped;
            curve.event = Some(EventInfo {
                t: ta,
                t_after: tb,
                index,
            });
            return Ok(curve);
        }

        t = t_new;
        y.copy_from_slice(&st.y1);
        let (k0, rest) = st.k.split_at_mut(1);
        k0[0].copy_from_slice(&rest[5]);
        curve.segments.push(seg);
        curve.samples.push(Sample {
            t,
            state: y.clone(),
            derivative: st.k[0].clone(),
        });

        let norm = max_norm(&y);
        if !norm.is_finite() || norm > o.divergence_bound {
            curve.status = Status::Diverged;
            return Ok(curve);
        }
        if last {
            return Ok(curve);
        }
    }
    Err(Error::MaxSteps {
        max_steps: o.max_steps,
        t,
    })
}
