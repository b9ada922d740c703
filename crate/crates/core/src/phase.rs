//! The planar autonomous system behind the self-adjoint form
//! `(ξ² η')' / ξ² = ξ^(λ-2) η^n`.
//!
//! With `X = ξ η'/η`, `Y = ξ^(λ-1) η^n / η'` and `t = ln ξ`,
//!
//! ```text
//! dX/dt = -X (1 + X - Y)
//! dY/dt =  Y (λ + 1 + n X - Y)
//! ```

use crate::error::{Error, Result};
use crate::family::{family_params, particular_solution, perturbation_expansion, pow, FamilyParams, Parameter};
use crate::integrate::{integrate_ivp, IvProblem, SolutionCurve, Status};
use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;

/// Planar system parameterized by the exponents of the embedded equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AutonomousSystem {
    pub n: f64,
    pub lambda: f64,
}

impl AutonomousSystem {
    pub fn new(n: f64, lambda: f64) -> Result<Self> {
        for (name, v) in [("n", n), ("lambda", lambda)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "must be finite",
                });
            }
        }
        Ok(AutonomousSystem { n, lambda })
    }

    /// Thomas-Fermi: `n = 3/2`, `λ = 2`.
    pub fn thomas_fermi() -> Self {
        AutonomousSystem { n: 1.5, lambda: 2.0 }
    }

    /// The system reached from `y'' = x^(-q) y^(1+q)` through
    /// `z = x y(1/x)`, `ξ = 1/x`: `n = 1 + q`, `λ = 2`.
    pub fn for_family(p: impl Into<Parameter>) -> Result<Self> {
        let fp = family_params(p.into().positive()?)?;
        let sa = fp.self_adjoint_form();
        Self::new(sa.n, sa.lambda)
    }

    /// Plugs the Emden-Fowler exponents `(n, λ)` of the family member in
    /// directly. This places the interior equilibrium at `(-3 - 1/p, -2 - 1/p)`;
    /// it agrees with [`AutonomousSystem::for_family`] only at `p = 1`.
    pub fn emden_fowler(params: &FamilyParams) -> Result<Self> {
        Self::new(params.n, params.lambda)
    }
}

pub fn system_rhs(sys: &AutonomousSystem, x: f64, y: f64) -> (f64, f64) {
    (-x * (1.0 + x - y), y * (sys.lambda + 1.0 + sys.n * x - y))
}

pub type Matrix2 = [[f64; 2]; 2];

pub fn jacobian(sys: &AutonomousSystem, x: f64, y: f64) -> Matrix2 {
    [
        [-1.0 - 2.0 * x + y, x],
        [sys.n * y, sys.lambda + 1.0 + sys.n * x - 2.0 * y],
    ]
}

/// Equilibria in the order origin, `(-1, 0)`, `(0, λ+1)`, interior point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equilibria {
    pub points: Vec<(f64, f64)>,
    /// Set when `n = 1` and the interior point does not exist.
    pub interior_missing: bool,
}

pub fn fixed_points(sys: &AutonomousSystem) -> Equilibria {
    let mut points = vec![(0.0, 0.0), (-1.0, 0.0), (0.0, sys.lambda + 1.0)];
    let interior_missing = sys.n == 1.0;
    if !interior_missing {
        let x3 = -sys.lambda / (sys.n - 1.0);
        points.push((x3, 1.0 + x3));
    }
    Equilibria {
        points,
        interior_missing,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FixedPointKind {
    Saddle,
    StableNode,
    UnstableNode,
    StableFocus,
    UnstableFocus,
    Center,
    Degenerate,
}

impl FixedPointKind {
    pub fn name(self) -> &'static str {
        match self {
            FixedPointKind::Saddle => "Saddle",
            FixedPointKind::StableNode => "StableNode",
            FixedPointKind::UnstableNode => "UnstableNode",
            FixedPointKind::StableFocus => "StableFocus",
            FixedPointKind::UnstableFocus => "UnstableFocus",
            FixedPointKind::Center => "Center",
            FixedPointKind::Degenerate => "Degenerate",
        }
    }

    pub fn is_node(self) -> bool {
        matches!(self, FixedPointKind::StableNode | FixedPointKind::UnstableNode)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type")]
pub enum Eigenvalues {
    /// Larger root first.
    Real {
        values: (f64, f64),
    },
    Complex {
        re: f64,
        im: f64,
    },
}

/// Degeneracy threshold on `δ₂` and `Δ`.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub trace: f64,
    pub det: f64,
    pub discriminant: f64,
    pub kind: FixedPointKind,
    pub eigenvalues: Eigenvalues,
    /// Unit eigenvectors matching the real eigenvalues, when they are distinct.
    pub eigenvectors: Option<[(f64, f64); 2]>,
}

fn sign_chart(trace: f64, det: f64, disc: f64) -> FixedPointKind {
    if det.abs() <= DEGENERACY_TOL || disc.abs() <= DEGENERACY_TOL {
        FixedPointKind::Degenerate
    } else if det < 0.0 {
        FixedPointKind::Saddle
    } else if disc > 0.0 {
        if trace < 0.0 {
            FixedPointKind::StableNode
        } else {
            FixedPointKind::UnstableNode
        }
    } else if trace.abs() <= DEGENERACY_TOL {
        FixedPointKind::Center
    } else if trace < 0.0 {
        FixedPointKind::StableFocus
    } else {
        FixedPointKind::UnstableFocus
    }
}

fn eigenvector(j: &Matrix2, theta: f64) -> Option<(f64, f64)> {
    let [[a, b], [c, d]] = *j;
    let v1 = (b, theta - a);
    let v2 = (theta - d, c);
    let n1 = v1.0.hypot(v1.1);
    let n2 = v2.0.hypot(v2.1);
    let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
    (n > 0.0).then(|| (v.0 / n, v.1 / n))
}

pub fn classify(j: &Matrix2) -> Result<Classification> {
    if j.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Domain {
            what: "jacobian entry",
            value: f64::NAN,
        });
    }
    let trace = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let discriminant = trace * trace - 4.0 * det;
    let kind = sign_chart(trace, det, discriminant);
    let (eigenvalues, eigenvectors) = if discriminant >= 0.0 {
        let root = discriminant.sqrt();
        // Avoid cancellation in the smaller-magnitude root.
        let big = 0.5 * (trace + if trace >= 0.0 { root } else { -root });
        let small = if big != 0.0 { det / big } else { 0.0 };
        let (hi, lo) = if big >= small { (big, small) } else { (small, big) };
        let vectors = if hi != lo {
            eigenvector(j, hi).zip(eigenvector(j, lo)).map(|(a, b)| [a, b])
        } else {
            None
        };
        (Eigenvalues::Real { values: (hi, lo) }, vectors)
    } else {
        (
            Eigenvalues::Complex {
                re: 0.5 * trace,
                im: 0.5 * (-discriminant).sqrt(),
            },
            None,
        )
    };
    Ok(Classification {
        trace,
        det,
        discriminant,
        kind,
        eigenvalues,
        eigenvectors,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPoint {
    pub coords: (f64, f64),
    #[serde(flatten)]
    pub class: Classification,
    pub note: Option<String>,
}

const UNSTABLE_NODE_NOTE: &str =
    "both eigenvalues positive in t = ln ξ: repelling as ξ grows, attracting as x = 1/ξ grows (the sense in which it is called a stable node)";

impl FixedPoint {
    pub fn at(sys: &AutonomousSystem, coords: (f64, f64)) -> Result<Self> {
        let class = classify(&jacobian(sys, coords.0, coords.1))?;
        let note = (class.kind == FixedPointKind::UnstableNode).then(|| UNSTABLE_NODE_NOTE.to_string());
        Ok(FixedPoint { coords, class, note })
    }

    pub fn kind(&self) -> FixedPointKind {
        self.class.kind
    }
}

/// Classified equilibria of `sys`, in [`fixed_points`] order.
pub fn classified_fixed_points(sys: &AutonomousSystem) -> Result<Vec<FixedPoint>> {
    fixed_points(sys)
        .points
        .into_iter()
        .map(|c| FixedPoint::at(sys, c))
        .collect()
}

/// Unit eigendirections at a point with real distinct eigenvalues, larger
/// eigenvalue first.
pub fn saddle_flow_directions(fp: &FixedPoint) -> Result<[(f64, f64); 2]> {
    match (fp.class.eigenvalues, fp.class.eigenvectors) {
        (Eigenvalues::Real { .. }, Some(v)) => Ok(v),
        (Eigenvalues::Complex { .. }, _) => Err(Error::ComplexEigenvalues),
        _ => Err(Error::Domain {
            what: "repeated eigenvalue",
            value: fp.class.trace / 2.0,
        }),
    }
}

/// Rescale a direction so its first component is 1.
pub fn normalize_first(v: (f64, f64)) -> (f64, f64) {
    (1.0, v.1 / v.0)
}

/// Rescale a direction so its second component is 1.
pub fn normalize_second(v: (f64, f64)) -> (f64, f64) {
    (v.0 / v.1, 1.0)
}

/// Eigenvalues at the interior equilibrium split into the decay exponent of
/// the particular solution plus a remainder, alongside the exponents of the
/// linearized perturbation equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenLink {
    pub theta: (f64, f64),
    pub theta0: (f64, f64),
    pub integer_part: f64,
    /// `perturbation_expansion(p).exponents` reordered to match `theta0`.
    pub perturbation_exponents: (f64, f64),
}

impl EigenLink {
    pub fn mismatch(&self) -> f64 {
        (self.theta0.0 - self.perturbation_exponents.0)
            .abs()
            .max((self.theta0.1 - self.perturbation_exponents.1).abs())
    }
}

pub fn eigen_perturbation_link(p: f64) -> Result<EigenLink> {
    let sys = AutonomousSystem::for_family(p)?;
    let interior = *fixed_points(&sys).points.last().ok_or(Error::NoInteriorFixedPoint)?;
    let fp = FixedPoint::at(&sys, interior)?;
    let theta = match fp.class.eigenvalues {
        Eigenvalues::Real { values } => values,
        Eigenvalues::Complex { .. } => return Err(Error::ComplexEigenvalues),
    };
    let integer_part = particular_solution(p)?.exponent;
    let pert = perturbation_expansion(p)?;
    Ok(EigenLink {
        theta,
        theta0: (theta.0 - integer_part, theta.1 - integer_part),
        integer_part,
        perturbation_exponents: (pert.exponents.1, pert.exponents.0),
    })
}

/// `X₃ Y₃ = ξ^λ η^(n-1)` evaluated on the power-law solution gives its
/// amplitude back: `k = (X₃ Y₃)^(1/(n-1))`, decay exponent `λ/(n-1) - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleRecovery {
    pub product: f64,
    pub k_p: f64,
    pub exponent: f64,
}

pub fn saddle_recovers_y0(p: f64) -> Result<SaddleRecovery> {
    let sys = AutonomousSystem::for_family(p)?;
    if sys.n == 1.0 {
        return Err(Error::NoInteriorFixedPoint);
    }
    let (x3, y3) = *fixed_points(&sys).points.last().ok_or(Error::NoInteriorFixedPoint)?;
    let product = x3 * y3;
    Ok(SaddleRecovery {
        product,
        k_p: pow(product, 1.0 / (sys.n - 1.0)),
        exponent: sys.lambda / (sys.n - 1.0) - 1.0,
    })
}

/// `(t, X, Y)` along a solution of the family equation, given samples
/// `(x, y, y')`. Uses `ξ = x`, `η = y/x`.
pub fn family_orbit(p: f64, samples: &[(f64, f64, f64)]) -> Result<Vec<(f64, f64, f64)>> {
    let sys = AutonomousSystem::for_family(p)?;
    samples
        .iter()
        .map(|&(x, y, dy)| {
            if !(x > 0.0 && y > 0.0) {
                return Err(Error::Domain {
                    what: "orbit sample",
                    value: x,
                });
            }
            let eta = y / x;
            let deta = (x * dy - y) / (x * x);
            let big_x = x * deta / eta;
            let big_y = pow(x, sys.lambda - 1.0) * pow(eta, sys.n) / deta;
            Ok((x.ln(), big_x, big_y))
        })
        .collect()
}

/// Exact trace, determinant and discriminant at the four equilibria for
/// rational `(n, λ)`, `n ≠ 1`.
pub fn exact_table(n: Rational64, lambda: Rational64) -> Vec<((Rational64, Rational64), [Rational64; 3])> {
    let one = Rational64::from_integer(1);
    let two = Rational64::from_integer(2);
    let four = Rational64::from_integer(4);
    let x3 = -lambda / (n - one);
    let points = [
        (Rational64::from_integer(0), Rational64::from_integer(0)),
        (-one, Rational64::from_integer(0)),
        (Rational64::from_integer(0), lambda + one),
        (x3, one + x3),
    ];
    points
        .iter()
        .map(|&(x, y)| {
            let a = -one - two * x + y;
            let b = x;
            let c = n * y;
            let d = lambda + one + n * x - two * y;
            let tr = a + d;
            let det = a * d - b * c;
            ((x, y), [tr, det, tr * tr - four * det])
        })
        .collect()
}

/// Plot bounds `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Window {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) || !(x1 > x0) || !(y1 > y0) {
            return Err(Error::Config(format!("degenerate window [{x0}, {x1}] x [{y0}, {y1}]")));
        }
        Ok(Window { x0, x1, y0, y1 })
    }

    /// Bounding box of `points` padded by `margin` on every side.
    pub fn around(points: &[(f64, f64)], margin: f64) -> Result<Self> {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        Self::new(x0 - margin, x1 + margin, y0 - margin, y1 + margin)
    }

    pub fn contains(&self, (x, y): (f64, f64)) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }

    pub fn diagonal(&self) -> f64 {
        (self.x1 - self.x0).hypot(self.y1 - self.y0)
    }

    /// `count` points spaced evenly along the boundary, counter-clockwise
    /// from the lower-left corner.
    pub fn boundary_points(&self, count: usize) -> Vec<(f64, f64)> {
        let (w, h) = (self.x1 - self.x0, self.y1 - self.y0);
        let perimeter = 2.0 * (w + h);
        (0..count)
            .map(|i| {
                let mut s = perimeter * (i as f64 + 0.5) / count as f64;
                if s < w {
                    return (self.x0 + s, self.y0);
                }
                s -= w;
                if s < h {
                    return (self.x1, self.y0 + s);
                }
                s -= h;
                if s < w {
                    return (self.x1 - s, self.y1);
                }
                s -= w;
                (self.x0, self.y1 - s)
            })
            .collect()
    }

    /// Portion of `{(x, a + b x)}` inside the window, sampled at `count` points.
    fn clip_line(&self, a: f64, b: f64, count: usize) -> Vec<(f64, f64)> {
        let (mut lo, mut hi) = (self.x0, self.x1);
        if b != 0.0 {
            let xa = (self.y0 - a) / b;
            let xb = (self.y1 - a) / b;
            lo = lo.max(xa.min(xb));
            hi = hi.min(xa.max(xb));
        } else if a < self.y0 || a > self.y1 {
            return Vec::new();
        }
        if !(hi > lo) {
            return Vec::new();
        }
        (0..count)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / (count - 1) as f64;
                (x, a + b * x)
            })
            .collect()
    }

    fn clip_vertical(&self, x: f64, count: usize) -> Vec<(f64, f64)> {
        if x < self.x0 || x > self.x1 {
            return Vec::new();
        }
        (0..count)
            .map(|i| (x, self.y0 + (self.y1 - self.y0) * i as f64 / (count - 1) as f64))
            .collect()
    }
}

/// Which field component vanishes on a nullcline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Component {
    M,
    N,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Nullcline {
    pub component: Component,
    pub label: &'static str,
    /// Empty when the locus misses the window.
    pub points: Vec<(f64, f64)>,
}

const NULLCLINE_SAMPLES: usize = 65;

pub fn nullclines(sys: &AutonomousSystem, window: &Window) -> Vec<Nullcline> {
    let k = NULLCLINE_SAMPLES;
    vec![
        Nullcline {
            component: Component::M,
            label: "X = 0",
            points: window.clip_vertical(0.0, k),
        },
        Nullcline {
            component: Component::M,
            label: "Y = 1 + X",
            points: window.clip_line(1.0, 1.0, k),
        },
        Nullcline {
            component: Component::N,
            label: "Y = 0",
            points: window.clip_line(0.0, 0.0, k),
        },
        Nullcline {
            component: Component::N,
            label: "Y = λ + 1 + n X",
            points: window.clip_line(sys.lambda + 1.0, sys.n, k),
        },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// Why a trajectory ended.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Exit {
    Completed,
    Stationary,
    BlowUp,
    StepUnderflow,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub seed: (f64, f64),
    pub direction: Direction,
    pub curve: SolutionCurve,
    pub exit: Exit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePortrait {
    pub system: AutonomousSystem,
    /// Equilibria inside the window.
    pub fixed_points: Vec<FixedPoint>,
    pub trajectories: Vec<Trajectory>,
    pub nullclines: Vec<Nullcline>,
    pub window: Window,
}

/// Trajectories are cut once `max(|X|, |Y|)` exceeds this multiple of the
/// window diagonal.
pub const BLOW_UP_FACTOR: f64 = 1e3;
/// Offset of the separatrix seeds from each saddle.
pub const SEPARATRIX_OFFSET: f64 = 1e-3;
pub const BOUNDARY_SEEDS: usize = 16;

/// Boundary seeds plus `±SEPARATRIX_OFFSET` along both eigendirections of
/// every saddle in the window.
pub fn default_seeds(sys: &AutonomousSystem, window: &Window) -> Result<Vec<(f64, f64)>> {
    let mut seeds = window.boundary_points(BOUNDARY_SEEDS);
    for fp in classified_fixed_points(sys)? {
        if fp.kind() != FixedPointKind::Saddle || !window.contains(fp.coords) {
            continue;
        }
        for v in saddle_flow_directions(&fp)? {
            for s in [1.0, -1.0] {
                seeds.push((
                    fp.coords.0 + s * SEPARATRIX_OFFSET * v.0,
                    fp.coords.1 + s * SEPARATRIX_OFFSET * v.1,
                ));
            }
        }
    }
    Ok(seeds)
}

fn trace_one(sys: &AutonomousSystem, seed: (f64, f64), t_end: f64, bound: f64) -> (SolutionCurve, Exit) {
    let (m, n) = system_rhs(sys, seed.0, seed.1);
    if m == 0.0 && n == 0.0 {
        return (
            SolutionCurve::stationary(0.0, t_end, vec![seed.0, seed.1]),
            Exit::Stationary,
        );
    }
    let sys = *sys;
    let rhs = move |_t: f64, s: &[f64], d: &mut [f64]| -> Result<()> {
        let (m, n) = system_rhs(&sys, s[0], s[1]);
        d[0] = m;
        d[1] = n;
        Ok(())
    };
    let problem = IvProblem::new(rhs, 0.0, vec![seed.0, seed.1], t_end)
        .rtol(1e-8)
        .atol(1e-10)
        .max_step(t_end.abs() / 50.0)
        .divergence_bound(bound);
    match integrate_ivp(&problem, &[]) {
        Ok(curve) => {
            let exit = match curve.status {
                Status::Completed | Status::EventStopped => Exit::Completed,
                Status::Diverged => Exit::BlowUp,
                Status::StepUnderflow => Exit::StepUnderflow,
            };
            (curve, exit)
        }
        Err(e) => (
            SolutionCurve::stationary(0.0, 0.0, vec![seed.0, seed.1]),
            Exit::Failed(e.to_string()),
        ),
    }
}

/// Integrate every seed forward and backward over `t_span`. Each seed
/// yields its forward trajectory followed by its backward one.
pub fn portrait(sys: &AutonomousSystem, seeds: &[(f64, f64)], t_span: f64, window: &Window) -> Result<PhasePortrait> {
    if seeds.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    if !(t_span > 0.0 && t_span.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t_span",
            value: t_span,
            reason: "must be positive and finite",
        });
    }
    let bound = BLOW_UP_FACTOR * window.diagonal();
    let trajectories = seeds
        .par_iter()
        .flat_map_iter(|&seed| {
            [(Direction::Forward, t_span), (Direction::Backward, -t_span)].map(|(direction, t_end)| {
                let (curve, exit) = trace_one(sys, seed, t_end, bound);
                Trajectory {
                    seed,
                    direction,
                    curve,
                    exit,
                }
            })
        })
        .collect();
    let fixed_points = classified_fixed_points(sys)?
        .into_iter()
        .filter(|fp| window.contains(fp.coords))
        .collect();
    Ok(PhasePortrait {
        system: *sys,
        fixed_points,
        trajectories,
        nullclines: nullclines(sys, window),
        window: *window,
    })
}
