//! Abel-equation reduction of the oscillator form.
//!
//! With `s(w) = dw/dt` the oscillator becomes the Abel equation of the second
//! kind
//!
//! ```text
//! s ds/dw - (3 + 4/p) s + A (w - w^(2 - 1/(p+1))) = 0,   A = 2(1 + 1/p)(1 + 2/p),
//! ```
//!
//! and `z = 1/s` turns it into one of the first kind, `z' = f2 z² + f3 z³`.
//! Its invariant `Φ = (f3 f2' - f2 f3')/3 + 2 f2³/27` decides integrability
//! by quadrature: the equation is integrable when
//! `f3 Φ' + (f2² - 3 f3') Φ = 3 α Φ^(5/3)` for a constant `α`. Here `α(w)` is
//! sampled pointwise and its spread is the certificate.

use crate::error::{Error, Result};
use crate::family::{particular_solution, pow, Parameter};
use crate::fd;
use crate::integrate::{integrate_ivp, IvProblem, SolutionCurve};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// Coefficients of a first-kind Abel equation with two derivatives each.
pub trait AbelCoefficients {
    fn f2(&self, w: f64) -> f64;
    fn df2(&self, w: f64) -> f64;
    fn d2f2(&self, w: f64) -> f64;
    fn f3(&self, w: f64) -> f64;
    fn df3(&self, w: f64) -> f64;
    fn d2f3(&self, w: f64) -> f64;

    /// Roots of the invariant in `(0, ∞)`, if known.
    fn invariant_roots(&self) -> Vec<f64> {
        Vec::new()
    }

    /// `Φ` from its definition.
    fn invariant(&self, w: f64) -> f64 {
        let f2 = self.f2(w);
        (self.f3(w) * self.df2(w) - f2 * self.df3(w)) / 3.0 + 2.0 * f2.powi(3) / 27.0
    }

    fn invariant_derivative(&self, w: f64) -> f64 {
        let f2 = self.f2(w);
        (self.f3(w) * self.d2f2(w) - f2 * self.d2f3(w)) / 3.0 + 2.0 * f2 * f2 * self.df2(w) / 9.0
    }
}

/// The family's first-kind Abel equation,
/// `f2 = -(3 + 4/p)`, `f3 = f3_amp (w - w^f3_pow)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbelForm {
    pub p: Parameter,
    pub f2: f64,
    pub f3_amp: f64,
    pub f3_pow: f64,
}

pub fn abel_coefficients(p: impl Into<Parameter>) -> Result<AbelForm> {
    let p = p.into().positive()?;
    let r = p.recip();
    Ok(AbelForm {
        p,
        f2: -(3.0 + 4.0 * r),
        f3_amp: 2.0 * (1.0 + r) * (1.0 + 2.0 * r),
        f3_pow: 2.0 - p.inv_p_plus_1(),
    })
}

impl AbelCoefficients for AbelForm {
    fn f2(&self, _w: f64) -> f64 {
        self.f2
    }
    fn df2(&self, _w: f64) -> f64 {
        0.0
    }
    fn d2f2(&self, _w: f64) -> f64 {
        0.0
    }
    fn f3(&self, w: f64) -> f64 {
        self.f3_amp * (w - pow(w, self.f3_pow))
    }
    fn df3(&self, w: f64) -> f64 {
        self.f3_amp * (1.0 - self.f3_pow * pow(w, self.f3_pow - 1.0))
    }
    fn d2f3(&self, w: f64) -> f64 {
        -self.f3_amp * self.f3_pow * (self.f3_pow - 1.0) * pow(w, self.f3_pow - 2.0)
    }
    fn invariant_roots(&self) -> Vec<f64> {
        AbelInvariant::from_form(self).root().into_iter().collect()
    }
}

/// `Φ_p(w) = a_p + b_p w^pow`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbelInvariant {
    pub a_p: f64,
    pub b_p: f64,
    pub pow: f64,
}

impl AbelInvariant {
    pub fn new(p: impl Into<Parameter>) -> Result<Self> {
        Ok(Self::from_form(&abel_coefficients(p)?))
    }

    fn from_form(form: &AbelForm) -> Self {
        let r = form.p.recip();
        AbelInvariant {
            a_p: 2.0 * (3.0 + 4.0 * r) * (3.0 + 2.0 * r) * r / 27.0,
            b_p: -2.0 * (3.0 + 4.0 * r) * (1.0 + 2.0 * r) * (2.0 + r) / 3.0,
            pow: form.f3_pow - 1.0,
        }
    }

    pub fn eval(&self, w: f64) -> f64 {
        self.a_p + self.b_p * pow(w, self.pow)
    }

    pub fn derivative(&self, w: f64) -> f64 {
        self.b_p * self.pow * pow(w, self.pow - 1.0)
    }

    /// The positive root `w*` of `Φ`, when there is one.
    pub fn root(&self) -> Option<f64> {
        let ratio = -self.a_p / self.b_p;
        (ratio > 0.0 && self.pow != 0.0).then(|| ratio.powf(1.0 / self.pow))
    }
}

pub fn abel_invariant(p: impl Into<Parameter>, w: f64) -> Result<f64> {
    if w < 0.0 {
        return Err(Error::Domain { what: "w", value: w });
    }
    Ok(AbelInvariant::new(p)?.eval(w))
}

/// `ds/dw` of the second-kind equation.
pub fn abel_second_kind_rhs(p: impl Into<Parameter>, w: f64, s: f64) -> Result<f64> {
    if w < 0.0 {
        return Err(Error::Domain { what: "w", value: w });
    }
    if s == 0.0 {
        return Err(Error::Singularity { x: w });
    }
    let form = abel_coefficients(p)?;
    Ok(-form.f2 - form.f3(w) / s)
}

/// Real branch of `x^(5/3)`: `sign(x) |x|^(5/3)`.
fn signed_five_thirds(x: f64) -> f64 {
    x.signum() * x.abs().powf(5.0 / 3.0)
}

/// `α(w)` from the integrability condition of a general Abel equation.
pub fn alpha_of<A: AbelCoefficients + ?Sized>(eq: &A, w: f64) -> Result<f64> {
    let phi = eq.invariant(w);
    if phi == 0.0 {
        return Err(Error::ExcludedPoint { w });
    }
    let f2 = eq.f2(w);
    let lhs = eq.f3(w) * eq.invariant_derivative(w) + (f2 * f2 - 3.0 * eq.df3(w)) * phi;
    Ok(lhs / (3.0 * signed_five_thirds(phi)))
}

/// `α(w)` for the family, using the closed-form invariant.
pub fn integrability_alpha(p: impl Into<Parameter>, w: f64) -> Result<f64> {
    if !(w > 0.0) {
        return Err(Error::Domain { what: "w", value: w });
    }
    let form = abel_coefficients(p)?;
    let inv = AbelInvariant::from_form(&form);
    let phi = inv.eval(w);
    if phi == 0.0 {
        return Err(Error::ExcludedPoint { w });
    }
    let lhs = form.f3(w) * inv.derivative(w) + (form.f2 * form.f2 - 3.0 * form.df3(w)) * phi;
    Ok(lhs / (3.0 * signed_five_thirds(phi)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Integrable,
    NonIntegrable,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrabilityReport {
    /// `None` for equations outside the family.
    pub p: Option<f64>,
    pub samples: Vec<(f64, f64)>,
    pub alpha_spread: f64,
    /// Spread restricted to `Φ > 0` and `Φ < 0` samples respectively.
    pub spread_by_sign: (Option<f64>, Option<f64>),
    pub tolerance: f64,
    pub verdict: Verdict,
    pub excluded: Vec<f64>,
}

/// Minimum number of valid samples behind an `Integrable` verdict.
pub const MIN_VALID_SAMPLES: usize = 8;
/// Spread below which `α` is declared constant.
pub const DEFAULT_ALPHA_TOL: f64 = 1e-8;
/// Grid points closer than this (relative) to a root of `Φ` are excluded.
pub const ROOT_EXCLUSION: f64 = 1e-3;

/// `0.05, 0.15, …, 0.95`.
pub fn default_w_grid() -> Vec<f64> {
    (0..10).map(|i| 0.05 + 0.1 * i as f64).collect()
}

fn spread(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    (lo <= hi).then_some(hi - lo)
}

/// Sample `α` over `w_grid` and decide whether it is constant.
pub fn check_integrability_of<A: AbelCoefficients + ?Sized>(
    eq: &A,
    w_grid: &[f64],
    tol: f64,
) -> Result<IntegrabilityReport> {
    if w_grid.len() < MIN_VALID_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_VALID_SAMPLES,
            got: w_grid.len(),
        });
    }
    if let Some(&w) = w_grid.iter().find(|&&w| !(w > 0.0 && w <= 1.0)) {
        return Err(Error::Domain { what: "w", value: w });
    }
    let roots = eq.invariant_roots();
    let mut samples = Vec::new();
    let mut signs = Vec::new();
    let mut excluded = Vec::new();
    for &w in w_grid {
        if roots.iter().any(|r| (w - r).abs() <= ROOT_EXCLUSION * r) {
            excluded.push(w);
            continue;
        }
        match alpha_of(eq, w) {
            Ok(a) if a.is_finite() => {
                samples.push((w, a));
                signs.push(eq.invariant(w) > 0.0);
            }
            _ => excluded.push(w),
        }
    }
    let alpha_spread = spread(samples.iter().map(|s| s.1)).unwrap_or(f64::NAN);
    let by_sign = |want: bool| spread(samples.iter().zip(&signs).filter(|(_, &s)| s == want).map(|(a, _)| a.1));
    let spread_by_sign = (by_sign(true), by_sign(false));
    let verdict = if samples.is_empty() {
        Verdict::Indeterminate
    } else if samples.len() >= 2 && alpha_spread >= tol {
        Verdict::NonIntegrable
    } else if samples.len() >= MIN_VALID_SAMPLES {
        Verdict::Integrable
    } else {
        Verdict::Indeterminate
    };
    Ok(IntegrabilityReport {
        p: None,
        samples,
        alpha_spread,
        spread_by_sign,
        tolerance: tol,
        verdict,
        excluded,
    })
}

pub fn check_integrability(p: f64, w_grid: &[f64], tol: f64) -> Result<IntegrabilityReport> {
    let form = abel_coefficients(p)?;
    let mut report = check_integrability_of(&form, w_grid, tol)?;
    report.p = Some(p);
    Ok(report)
}

/// Constant-coefficient Abel equation `z' = a z² + b z³` after the change of
/// variable `w -> w²`: `f2 = 2 a w`, `f3 = 2 b w`. It is integrable, with
/// `α = 64 / (81 (16/27)^(5/3))` whatever `a`, `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticIntegrable {
    pub a: f64,
    pub b: f64,
}

impl AbelCoefficients for SyntheticIntegrable {
    fn f2(&self, w: f64) -> f64 {
        2.0 * self.a * w
    }
    fn df2(&self, _w: f64) -> f64 {
        2.0 * self.a
    }
    fn d2f2(&self, _w: f64) -> f64 {
        0.0
    }
    fn f3(&self, w: f64) -> f64 {
        2.0 * self.b * w
    }
    fn df3(&self, _w: f64) -> f64 {
        2.0 * self.b
    }
    fn d2f3(&self, _w: f64) -> f64 {
        0.0
    }
}

/// The integrability condition of the family at rational `p`, with
/// denominators cleared:
///
/// `constant + linear u + quadratic u² = radicand^(1/3) (c4 - c5 u)^(5/3) α`,
///
/// where `u = w^q`, `q = p/(p+1)`, and `radicand` is a cube-free integer.
#[derive(Debug, Clone, PartialEq)]
pub struct ClearedCondition {
    pub q: BigRational,
    pub constant: BigRational,
    pub linear: BigRational,
    pub quadratic: BigRational,
    pub radicand: BigInt,
    pub c4: BigRational,
    pub c5: BigRational,
    /// Factor the raw condition was multiplied by.
    pub clearing_factor: BigRational,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rational_gcd(a: &BigRational, b: &BigRational) -> BigRational {
    BigRational::new(a.numer().gcd(b.numer()), a.denom().lcm(b.denom()))
}

/// Split `n = c³ m` with `m` cube-free.
fn cube_split(n: &BigInt) -> (BigInt, BigInt) {
    let mut m = n.clone();
    let mut c = BigInt::one();
    let mut d = BigInt::from(2);
    while &d * &d * &d <= m {
        let d3 = &d * &d * &d;
        while (&m % &d3).is_zero() {
            m /= &d3;
            c *= &d;
        }
        d += 1;
    }
    (c, m)
}

pub fn cleared_condition(p: &BigRational) -> Result<ClearedCondition> {
    if !p.is_positive() {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p.to_f64().unwrap_or(f64::NAN),
            reason: "requires p > 0",
        });
    }
    let one = BigRational::one();
    let r = p.recip();
    let q = p / (p + &one);
    let f2 = -(rat(3) + rat(4) * &r);
    let amp = rat(2) * (&one + &r) * (&one + rat(2) * &r);
    let a_p = rat(2) * (rat(3) + rat(4) * &r) * (rat(3) + rat(2) * &r) * &r / rat(27);
    let b_p = -rat(2) * (rat(3) + rat(4) * &r) * (&one + rat(2) * &r) * (rat(2) + &r) / rat(3);

    // f3 Φ' + (f2² - 3 f3') Φ as a polynomial in u = w^q.
    let base = &f2 * &f2 - rat(3) * &amp;
    let lift = rat(3) * &amp * (&one + &q);
    let abq = &amp * &b_p * &q;
    let c0 = &base * &a_p;
    let c1 = &abq + &base * &b_p + &lift * &a_p;
    let c2 = -&abq + &lift * &b_p;

    // Φ = m (c4 - c5 u) with coprime integers c4, c5.
    let m = rational_gcd(&a_p, &b_p.abs());
    let c4 = &a_p / &m;
    let c5 = -&b_p / &m;
    // m^(2/3) = (a² b)^(1/3) / b = (c / b) radicand^(1/3).
    let (c, radicand) = cube_split(&(m.numer() * m.numer() * m.denom()));
    let coeff = BigRational::new(c, m.denom().clone());
    let divisor = rat(3) * &m * &coeff;
    let factor = divisor.recip();
    Ok(ClearedCondition {
        q,
        constant: &c0 * &factor,
        linear: &c1 * &factor,
        quadratic: &c2 * &factor,
        radicand,
        c4,
        c5,
        clearing_factor: factor,
    })
}

/// `(w, s) -> (τ, u)` with `w = τ^((p+1)(p+2))`,
/// `s = (1 + 2/p)(1 - τ^(p(p+1)) u) w`.
pub fn lampariello_transform(p: f64, w: f64, s: f64) -> Result<(f64, f64)> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "requires p > 0",
        });
    }
    if !(w > 0.0) {
        return Err(Error::Domain { what: "w", value: w });
    }
    let tau = w.powf(1.0 / ((p + 1.0) * (p + 2.0)));
    let u = pow(tau, -p * (p + 1.0)) * (1.0 - s / ((1.0 + 2.0 / p) * w));
    Ok((tau, u))
}

/// Inverse of [`lampariello_transform`].
pub fn lampariello_inverse(p: f64, tau: f64, u: f64) -> Result<(f64, f64)> {
    if !(tau > 0.0) {
        return Err(Error::Domain {
            what: "tau",
            value: tau,
        });
    }
    let w = pow(tau, (p + 1.0) * (p + 2.0));
    let s = (1.0 + 2.0 / p) * (1.0 - pow(tau, p * (p + 1.0)) * u) * w;
    Ok((w, s))
}

const LOCUS_TOL: f64 = 1e-12;

/// `du/dτ = -2(p+1)² τ^(p-1) (1 - τ^(p²) u²) / (1 - τ^(p(p+1)) u)`.
pub fn majorana_rhs(p: f64, tau: f64, u: f64) -> Result<f64> {
    if tau < 0.0 {
        return Err(Error::Domain {
            what: "tau",
            value: tau,
        });
    }
    let den = 1.0 - pow(tau, p * (p + 1.0)) * u;
    if den.abs() <= LOCUS_TOL {
        return Err(Error::SingularLocus { tau, u });
    }
    let num = 1.0 - pow(tau, p * p) * u * u;
    Ok(-2.0 * (p + 1.0).powi(2) * pow(tau, p - 1.0) * num / den)
}

/// Residuals closer than this to the singular locus are skipped.
const LOCUS_MARGIN: f64 = 1e-3;

/// Max `|du/dτ - majorana_rhs|` along a sampled `(w, s)` trajectory, with
/// `du/dτ` from 5-point stencils in `τ`.
pub fn majorana_consistency(p: f64, curve_ws: &[(f64, f64)]) -> Result<f64> {
    let mut pts: Vec<(f64, f64)> = curve_ws
        .iter()
        .map(|&(w, s)| lampariello_transform(p, w, s))
        .collect::<Result<_>>()?;
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pts.dedup_by(|a, b| a.0 == b.0);
    let usable = |&(tau, u): &(f64, f64)| (1.0 - pow(tau, p * (p + 1.0)) * u).abs() > LOCUS_MARGIN;
    let count = pts.iter().filter(|pt| usable(pt)).count();
    if pts.len() < 5 || count < 5 {
        return Err(Error::InsufficientSamples { needed: 5, got: count });
    }
    let taus: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let us: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let du = fd::derivative(&taus, &us, 5)?;
    let mut worst: f64 = 0.0;
    for (i, pt) in pts.iter().enumerate() {
        if !usable(pt) {
            continue;
        }
        let r = majorana_rhs(p, pt.0, pt.1)?;
        worst = worst.max((du[i] - r).abs());
    }
    Ok(worst)
}

/// `(w, s)` along a sampled solution `(x, y, y')` of the family equation:
/// `w = y/y0`, `s = x dw/dx`.
pub fn ratio_trajectory(p: f64, samples: &[(f64, f64, f64)]) -> Result<Vec<(f64, f64)>> {
    let y0 = particular_solution(p)?;
    let a = y0.exponent;
    Ok(samples
        .iter()
        .map(|&(x, y, dy)| {
            let base = y0.eval(x);
            (y / base, (x * dy + a * y) / base)
        })
        .collect())
}

/// Integrate the second-kind equation `ds/dw` from `(w0, s0)` to `w_end`.
pub fn second_kind_trajectory(p: f64, w0: f64, s0: f64, w_end: f64, rtol: f64) -> Result<SolutionCurve> {
    let form = abel_coefficients(p)?;
    let rhs = move |w: f64, s: &[f64], d: &mut [f64]| -> Result<()> {
        if w < 0.0 {
            return Err(Error::Domain { what: "w", value: w });
        }
        if s[0] == 0.0 {
            return Err(Error::Singularity { x: w });
        }
        d[0] = -form.f2 - form.f3(w) / s[0];
        Ok(())
    };
    let problem = IvProblem::new(rhs, w0, vec![s0], w_end).rtol(rtol).atol(rtol * 1e-2);
    integrate_ivp(&problem, &[])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_values() {
        let f = abel_coefficients(1.0).unwrap();
        assert_eq!((f.f2, f.f3_amp, f.f3_pow), (-7.0, 12.0, 1.5));
        let f = abel_coefficients(2.0).unwrap();
        assert_eq!(f.f2, -5.0);
        assert_eq!(f.f3_amp, 6.0);
        assert!((f.f3_pow - 5.0 / 3.0).abs() < 1e-15);
        let f = abel_coefficients(Parameter::Infinite).unwrap();
        assert_eq!((f.f2, f.f3_amp, f.f3_pow), (-3.0, 2.0, 2.0));
        assert!(abel_coefficients(-1.0).is_err());
    }

    #[test]
    fn f3_vanishes_at_one() {
        for p in [0.5, 1.0, 2.0, 7.0] {
            assert_eq!(abel_coefficients(p).unwrap().f3(1.0), 0.0);
        }
    }

    #[test]
    fn second_kind_values() {
        assert_eq!(abel_second_kind_rhs(1.0, 1.0, 1.0).unwrap(), 7.0);
        assert_eq!(abel_second_kind_rhs(1.0, 0.25, 1.0).unwrap(), 5.5);
        assert_eq!(abel_second_kind_rhs(3.0, 0.0, -2.0).unwrap(), 3.0 + 4.0 / 3.0);
        assert!(abel_second_kind_rhs(1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn thomas_fermi_invariant() {
        assert_eq!(abel_invariant(1.0, 0.0).unwrap(), 70.0 / 27.0);
        assert!((abel_invariant(1.0, 1.0).unwrap() + 1064.0 / 27.0).abs() < 1e-13);
        let root = (5.0_f64 / 81.0).powi(2);
        assert!(abel_invariant(1.0, root).unwrap().abs() < 1e-14);
        let inv = AbelInvariant::new(1.0).unwrap();
        assert!((inv.root().unwrap() - root).abs() < 1e-16);
    }

    #[test]
    fn alpha_excludes_invariant_root() {
        let root = AbelInvariant::new(1.0).unwrap().root().unwrap();
        // The root is not exactly representable; evaluate where Φ is exactly 0.
        let inv = AbelInvariant::new(1.0).unwrap();
        if inv.eval(root) == 0.0 {
            assert!(matches!(
                integrability_alpha(1.0, root),
                Err(Error::ExcludedPoint { .. })
            ));
        }
        let grid: Vec<f64> = (0..9).map(|i| root * (1.0 + 1e-4 * i as f64)).collect();
        let rep = check_integrability(1.0, &grid, DEFAULT_ALPHA_TOL).unwrap();
        assert_eq!(rep.verdict, Verdict::Indeterminate);
        assert_eq!(rep.excluded.len(), 9);
    }

    #[test]
    fn alpha_varies_at_thomas_fermi() {
        let a = integrability_alpha(1.0, 0.01).unwrap();
        let b = integrability_alpha(1.0, 0.25).unwrap();
        assert!((a - b).abs() > 0.1);
    }

    #[test]
    fn synthetic_alpha_is_constant() {
        let eq = SyntheticIntegrable { a: -1.3, b: 0.7 };
        let expect = 64.0 / (81.0 * (16.0_f64 / 27.0).powf(5.0 / 3.0));
        for w in default_w_grid() {
            assert!((alpha_of(&eq, w).unwrap() - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn grid_preconditions() {
        assert!(check_integrability(1.0, &[0.1, 0.2], 1e-8).is_err());
        let mut g = default_w_grid();
        g[0] = 1.5;
        assert!(check_integrability(1.0, &g, 1e-8).is_err());
    }

    #[test]
    fn cube_split_works() {
        let (c, m) = cube_split(&BigInt::from(5292));
        assert_eq!((c, m), (BigInt::from(3), BigInt::from(196)));
        let (c, m) = cube_split(&BigInt::from(7));
        assert_eq!((c, m), (BigInt::from(1), BigInt::from(7)));
    }

    #[test]
    fn lampariello_values() {
        let (tau, u) = lampariello_transform(1.0, 1.0, 0.0).unwrap();
        assert_eq!((tau, u), (1.0, 1.0));
        let (tau, u) = lampariello_transform(1.0, 1.0, 3.0).unwrap();
        assert_eq!((tau, u), (1.0, 0.0));
        assert!(lampariello_transform(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn majorana_values() {
        assert_eq!(majorana_rhs(1.0, 0.0, 0.3).unwrap(), -8.0);
        assert!(matches!(majorana_rhs(1.0, 1.0, 1.0), Err(Error::SingularLocus { .. })));
        assert!((majorana_rhs(1.0, 0.5, 1.0).unwrap() + 16.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn majorana_rejects_locus_only_trajectory() {
        let pts = vec![(1.0, 0.0); 10];
        assert!(majorana_consistency(1.0, &pts).is_err());
    }
}
