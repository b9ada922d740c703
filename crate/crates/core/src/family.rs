//! Closed-form quantities of the Lampariello family
//! `y'' = x^(-q) y^(1+q)` with `q = p/(p+1)`.

use crate::error::{Error, Result};
use crate::fd;
use serde::Serialize;

/// The Lampariello parameter `p`, with `p -> ∞` as an explicit limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Parameter {
    Finite(f64),
    Infinite,
}

impl From<f64> for Parameter {
    fn from(p: f64) -> Self {
        if p == f64::INFINITY {
            Parameter::Infinite
        } else {
            Parameter::Finite(p)
        }
    }
}

impl Parameter {
    /// `1/p`, zero in the limit.
    pub fn recip(self) -> f64 {
        match self {
            Parameter::Finite(p) => 1.0 / p,
            Parameter::Infinite => 0.0,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Parameter::Finite(p) => p,
            Parameter::Infinite => f64::INFINITY,
        }
    }

    /// Accepts `p > 0` or the limit; solution-level quantities need this.
    pub(crate) fn positive(self) -> Result<Self> {
        match self {
            Parameter::Finite(p) if !(p > 0.0) || !p.is_finite() => Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "requires p > 0",
            }),
            other => Ok(other),
        }
    }

    /// `q = p/(p+1)`.
    pub fn q(self) -> f64 {
        match self {
            Parameter::Finite(p) => p / (p + 1.0),
            Parameter::Infinite => 1.0,
        }
    }

    /// `1/(p+1)`.
    pub fn inv_p_plus_1(self) -> f64 {
        match self {
            Parameter::Finite(p) => 1.0 / (p + 1.0),
            Parameter::Infinite => 0.0,
        }
    }
}

/// Location of a family member in Emden-Fowler exponent space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyParams {
    pub p: Parameter,
    /// Exponent of the dependent variable, `2 - 1/(p+1)`.
    pub n: f64,
    /// Power of the independent variable in `y'' = x^(n - lambda) y^n`,
    /// `3 - 2/(p+1)`.
    pub lambda: f64,
    /// Singularity exponent `p/(p+1)`.
    pub q: f64,
    /// Set for `p < -1`, where the finite-slope condition at the origin is
    /// dropped (this includes the Lane-Emden branch `p ∈ (-2, -1)`).
    pub extended: bool,
}

pub fn family_params(p: impl Into<Parameter>) -> Result<FamilyParams> {
    let p = p.into();
    let (n, lambda, q, extended) = match p {
        Parameter::Infinite => (2.0, 3.0, 1.0, false),
        Parameter::Finite(v) => {
            if v == 0.0 {
                return Err(Error::DegenerateLinear);
            }
            if v == -1.0 {
                return Err(Error::UndefinedExponent);
            }
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "p",
                    value: v,
                    reason: "must be finite or +infinity",
                });
            }
            let s = 1.0 / (v + 1.0);
            (2.0 - s, 3.0 - 2.0 * s, v / (v + 1.0), v < -1.0)
        }
    };
    Ok(FamilyParams {
        p,
        n,
        lambda,
        q,
        extended,
    })
}

impl FamilyParams {
    /// Strict constructor: only `p ∈ (-1, ∞) \ {0}`.
    pub fn new(p: impl Into<Parameter>) -> Result<Self> {
        let fp = family_params(p)?;
        if fp.extended {
            return Err(Error::InvalidParameter {
                name: "p",
                value: fp.p.value(),
                reason: "admissible range is (-1, inf) without 0",
            });
        }
        Ok(fp)
    }

    /// The self-adjoint equation reached through `z(x) = x y(1/x)` and
    /// `ξ = 1/x`, `η(ξ) = z(x)`. Its independent-variable power is 2 for
    /// every member of the family.
    pub fn self_adjoint_form(&self) -> SelfAdjointForm {
        SelfAdjointForm { n: self.n, lambda: 2.0 }
    }
}

/// `(ξ² η')' / ξ² = ξ^(λ-2) η^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfAdjointForm {
    pub n: f64,
    pub lambda: f64,
}

/// `y0(x) = k_p x^(-exponent)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParticularSolution {
    pub k_p: f64,
    pub exponent: f64,
}

impl ParticularSolution {
    pub fn eval(&self, x: f64) -> f64 {
        self.k_p * x.powf(-self.exponent)
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let a = self.exponent;
        a * (a + 1.0) * self.k_p * x.powf(-a - 2.0)
    }
}

/// Raise to a power, exactly when the exponent is a small integer.
pub(crate) fn pow(base: f64, e: f64) -> f64 {
    if e.fract() == 0.0 && e.abs() <= 64.0 {
        base.powi(e as i32)
    } else {
        base.powf(e)
    }
}

pub fn particular_solution(p: impl Into<Parameter>) -> Result<ParticularSolution> {
    let p = p.into().positive()?;
    let r = p.recip();
    let base = (2.0 + 2.0 * r) * (1.0 + 2.0 * r);
    Ok(ParticularSolution {
        k_p: pow(base, 1.0 + r),
        exponent: 1.0 + 2.0 * r,
    })
}

/// `x^(-q) y^(1+q)`.
pub fn ef_rhs(params: &FamilyParams, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Singularity { x });
    }
    if y < 0.0 {
        return Err(Error::Domain { what: "y", value: y });
    }
    Ok(pow(x, -params.q) * pow(y, 1.0 + params.q))
}

/// Coefficients of `w'' - (3 + 4/p) w' + κ w = κ w^(2 - 1/(p+1))` in
/// `t = ln x`, where `w = y / y0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatorCoefficients {
    /// Damping ratio ζ_p (negative).
    pub zeta: f64,
    /// Specific stiffness κ_p, equal to the nonlinearity strength.
    pub kappa: f64,
    pub r1: f64,
    pub r2: f64,
    /// Coefficient of `dw/dt` in the rearranged equation, `3 + 4/p`.
    pub drift: f64,
    /// Power of the nonlinear term, `2 - 1/(p+1)`.
    pub power: f64,
}

pub fn oscillator_coefficients(p: impl Into<Parameter>) -> Result<OscillatorCoefficients> {
    let p = p.into().positive()?;
    let r = p.recip();
    let k = particular_solution(p)?.k_p;
    let q = p.q();
    Ok(OscillatorCoefficients {
        zeta: -(1.5 + 2.0 * r) * pow(k, -0.5 * q),
        kappa: pow(k, q),
        r1: 2.0 + 2.0 * r,
        r2: 1.0 + 2.0 * r,
        drift: 3.0 + 4.0 * r,
        power: 2.0 - p.inv_p_plus_1(),
    })
}

/// `d²w/dt²` of the oscillator form.
pub fn oscillator_rhs(p: impl Into<Parameter>, w: f64, wdot: f64) -> Result<f64> {
    if w < 0.0 {
        return Err(Error::Domain { what: "w", value: w });
    }
    let c = oscillator_coefficients(p)?;
    Ok(c.drift * wdot - c.kappa * w + c.kappa * pow(w, c.power))
}

/// Map sampled `z(x)` to `y(x̃) = x̃ z(1/x̃)`; the output grid is ascending.
/// The map is its own inverse.
pub fn canonical_transform(curve: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if let Some(&(x, _)) = curve.iter().find(|(x, _)| !(*x > 0.0)) {
        return Err(Error::Singularity { x });
    }
    let increasing = curve.windows(2).all(|w| w[1].0 > w[0].0);
    let decreasing = curve.windows(2).all(|w| w[1].0 < w[0].0);
    if !increasing && !decreasing {
        let i = curve
            .windows(2)
            .position(|w| (w[1].0 - w[0].0) * (curve[1].0 - curve[0].0) <= 0.0)
            .unwrap_or(0);
        return Err(Error::NonMonotoneGrid { index: i + 1 });
    }
    let mut out: Vec<(f64, f64)> = curve
        .iter()
        .map(|&(x, z)| {
            let xt = 1.0 / x;
            (xt, z * xt)
        })
        .collect();
    if out.len() > 1 && out[1].0 < out[0].0 {
        out.reverse();
    }
    Ok(out)
}

/// Pointwise `|(ξ² η')'/ξ² - ξ^(λ-2) η^n|` over samples `(ξ, η, η')`.
/// The outer derivative uses 5-point stencils (3 points on short grids).
pub fn self_adjoint_residuals(form: &SelfAdjointForm, samples: &[(f64, f64, f64)]) -> Result<Vec<f64>> {
    if samples.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: samples.len(),
        });
    }
    if let Some(&(xi, _, _)) = samples.iter().find(|s| !(s.0 > 0.0)) {
        return Err(Error::Singularity { x: xi });
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let flux: Vec<f64> = samples.iter().map(|&(xi, _, d)| xi * xi * d).collect();
    let dflux = fd::derivative(&xs, &flux, 5)?;
    samples
        .iter()
        .zip(dflux)
        .map(|(&(xi, eta, _), df)| {
            if eta < 0.0 {
                return Err(Error::Domain {
                    what: "eta",
                    value: eta,
                });
            }
            Ok((df / (xi * xi) - pow(xi, form.lambda - 2.0) * pow(eta, form.n)).abs())
        })
        .collect()
}

pub fn self_adjoint_residual(form: &SelfAdjointForm, samples: &[(f64, f64, f64)]) -> Result<f64> {
    Ok(self_adjoint_residuals(form, samples)?.into_iter().fold(0.0, f64::max))
}

/// Expansion of the equation for `ε = y - y0` about the particular solution:
///
/// `ε'' = c_lin ε / x² + c_quad x^pow_quad ε² - c_cub x^pow_cub ε³ + O(ε⁴)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationExpansion {
    pub c_lin: f64,
    /// Roots of `r(r-1) = c_lin`, negative root first.
    pub exponents: (f64, f64),
    pub c_quad: f64,
    pub pow_quad: f64,
    /// Magnitude of the cubic coefficient; the term enters with a minus sign.
    pub c_cub: f64,
    pub pow_cub: f64,
}

impl PerturbationExpansion {
    /// Truncated right-hand side at `(x, ε)`.
    pub fn rhs(&self, x: f64, eps: f64) -> f64 {
        self.c_lin * eps / (x * x) + self.c_quad * pow(x, self.pow_quad) * eps * eps
            - self.c_cub * pow(x, self.pow_cub) * eps.powi(3)
    }
}

pub fn perturbation_expansion(p: impl Into<Parameter>) -> Result<PerturbationExpansion> {
    let p = p.into().positive()?;
    let Parameter::Finite(pv) = p else {
        return Err(Error::InvalidParameter {
            name: "p",
            value: f64::INFINITY,
            reason: "the expansion needs finite p",
        });
    };
    let k = particular_solution(p)?.k_p;
    let s = 1.0 / (pv + 1.0);
    let c_lin = (2.0 * pv + 1.0) * s * pow(k, pv * s);
    let c_quad = pv * (2.0 * pv + 1.0) * s * s / 2.0 * pow(k, -s);
    let c_cub = pv * (2.0 * pv + 1.0) * s * s * s / 6.0 * pow(k, -(1.0 + s));
    let disc = (1.0 + 4.0 * c_lin).sqrt();
    Ok(PerturbationExpansion {
        c_lin,
        exponents: ((1.0 - disc) / 2.0, (1.0 + disc) / 2.0),
        c_quad,
        pow_quad: 2.0 / pv - 1.0,
        c_cub,
        pow_cub: 4.0 / pv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn thomas_fermi_exponents() {
        let f = family_params(1.0).unwrap();
        assert_eq!((f.n, f.lambda, f.q, f.extended), (1.5, 2.0, 0.5, false));
    }

    #[test]
    fn lane_emden_branch_is_extended() {
        let f = family_params(-1.5).unwrap();
        assert_eq!(f.n, 4.0);
        assert!(f.extended);
        assert!(FamilyParams::new(-1.5).is_err());
    }

    #[test]
    fn infinite_limit() {
        let f = family_params(Parameter::Infinite).unwrap();
        assert_eq!((f.n, f.lambda, f.q), (2.0, 3.0, 1.0));
        assert_eq!(family_params(f64::INFINITY).unwrap(), f);
    }

    #[test]
    fn degenerate_parameters_rejected() {
        assert_eq!(family_params(0.0), Err(Error::DegenerateLinear));
        assert_eq!(family_params(-1.0), Err(Error::UndefinedExponent));
        assert!(family_params(f64::NAN).is_err());
    }

    #[test]
    fn particular_solution_values() {
        let s = particular_solution(1.0).unwrap();
        assert_eq!((s.k_p, s.exponent), (144.0, 3.0));
        let s = particular_solution(2.0).unwrap();
        assert!(rel(s.k_p, 6f64.powf(1.5)) < 1e-14);
        assert_eq!(s.exponent, 2.0);
        assert!(rel(s.k_p, 14.696938456699067) < 1e-14);
        assert!(particular_solution(-0.5).is_err());
        assert!(particular_solution(0.0).is_err());
    }

    #[test]
    fn ef_rhs_values() {
        let f = family_params(1.0).unwrap();
        assert_eq!(ef_rhs(&f, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(ef_rhs(&f, 4.0, 1.0).unwrap(), 0.5);
        assert_eq!(ef_rhs(&f, 1.0, 4.0).unwrap(), 8.0);
        assert!(matches!(ef_rhs(&f, 0.0, 1.0), Err(Error::Singularity { .. })));
        assert!(matches!(ef_rhs(&f, 1.0, -0.1), Err(Error::Domain { .. })));
    }

    #[test]
    fn oscillator_values() {
        let c = oscillator_coefficients(1.0).unwrap();
        assert_eq!((c.kappa, c.r1, c.r2), (12.0, 4.0, 3.0));
        assert!((c.zeta + 7.0 * 3f64.sqrt() / 12.0).abs() < 1e-14);
        let c = oscillator_coefficients(Parameter::Infinite).unwrap();
        assert_eq!(c.kappa, 2.0);
        assert!((c.zeta + 3.0 * 2f64.sqrt() / 4.0).abs() < 1e-14);
        assert_eq!(oscillator_rhs(1.0, 0.0, 1.0).unwrap(), 7.0);
        assert_eq!(oscillator_rhs(1.0, 4.0, 0.0).unwrap(), 48.0);
        assert!(oscillator_rhs(1.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn perturbation_at_thomas_fermi() {
        let e = perturbation_expansion(1.0).unwrap();
        assert_eq!(e.c_lin, 18.0);
        assert!(rel(e.c_quad, 1.0 / 32.0) < 1e-14);
        assert!(rel(e.c_cub, 1.0 / 27648.0) < 1e-14);
        assert_eq!((e.pow_quad, e.pow_cub), (1.0, 4.0));
        let r = 73f64.sqrt();
        assert!((e.exponents.0 - (1.0 - r) / 2.0).abs() < 1e-12);
        assert!((e.exponents.1 - (1.0 + r) / 2.0).abs() < 1e-12);
        assert_eq!(format!("{:.3}", e.exponents.0), "-3.772");
        assert_eq!(format!("{:.3}", e.exponents.1), "4.772");
    }

    #[test]
    fn perturbation_rhs_matches_taylor_of_ef_rhs() {
        // Oracle: the exact difference ef_rhs(y0+ε) - ef_rhs(y0) against the
        // truncated series, which must agree to O(ε⁴).
        for p in [0.5, 1.0, 2.0, 5.0] {
            let f = family_params(p).unwrap();
            let y0 = particular_solution(p).unwrap();
            let e = perturbation_expansion(p).unwrap();
            for x in [0.7, 1.3, 2.0] {
                let base = y0.eval(x);
                let eps = 1e-3 * base;
                let exact = ef_rhs(&f, x, base + eps).unwrap() - ef_rhs(&f, x, base).unwrap();
                let series = e.rhs(x, eps);
                let scale = ef_rhs(&f, x, base).unwrap();
                assert!((exact - series).abs() / scale < 1e-10, "p={p} x={x}");
            }
        }
    }

    #[test]
    fn canonical_transform_identity_image() {
        let z: Vec<(f64, f64)> = (1..20).map(|i| (i as f64 * 0.3, i as f64 * 0.3)).collect();
        let y = canonical_transform(&z).unwrap();
        assert!(y.iter().all(|&(_, v)| (v - 1.0).abs() < 1e-15));
        assert!(y.windows(2).all(|w| w[1].0 > w[0].0));
        assert!(canonical_transform(&[(0.0, 1.0), (1.0, 1.0)]).is_err());
        assert!(canonical_transform(&[(1.0, 1.0), (2.0, 1.0), (1.5, 1.0)]).is_err());
    }

    #[test]
    fn canonical_transform_of_particular_solution() {
        // y0 = 144/x³  =>  z(x) = x y0(1/x) = 144 x⁴, which solves z'' = x^-4 z^(3/2).
        let y0: Vec<(f64, f64)> = (1..200)
            .map(|i| {
                let x = 0.05 * i as f64;
                (x, 144.0 / x.powi(3))
            })
            .collect();
        let z = canonical_transform(&y0).unwrap();
        for &(x, v) in &z {
            assert!(rel(v, 144.0 * x.powi(4)) < 1e-13);
            let zpp = 12.0 * 144.0 * x * x;
            assert!(rel(zpp, x.powi(-4) * v.powf(1.5)) < 1e-12);
        }
    }

    #[test]
    fn self_adjoint_constant_and_zero() {
        let form = family_params(1.0).unwrap().self_adjoint_form();
        let c: Vec<(f64, f64, f64)> = (1..10).map(|i| (i as f64, 4.0, 0.0)).collect();
        for r in self_adjoint_residuals(&form, &c).unwrap() {
            assert_eq!(r, 8.0);
        }
        let z: Vec<(f64, f64, f64)> = (1..10).map(|i| (i as f64, 0.0, 0.0)).collect();
        assert_eq!(self_adjoint_residual(&form, &z).unwrap(), 0.0);
        assert!(self_adjoint_residual(&form, &z[..2]).is_err());
    }

    #[test]
    fn self_adjoint_form_of_particular_solution() {
        // η(ξ) = y0(ξ)/ξ solves the self-adjoint form for every p.
        for p in [0.5, 1.0, 2.0, 5.0] {
            let form = family_params(p).unwrap().self_adjoint_form();
            let y0 = particular_solution(p).unwrap();
            let a = y0.exponent;
            let samples: Vec<(f64, f64, f64)> = (0..400)
                .map(|i| {
                    let xi = 1.0 + 0.002 * i as f64;
                    let eta = y0.k_p * xi.powf(-a - 1.0);
                    let deta = -(a + 1.0) * y0.k_p * xi.powf(-a - 2.0);
                    (xi, eta, deta)
                })
                .collect();
            let scale = samples.iter().map(|s| s.1.powf(form.n)).fold(0.0, f64::max);
            let r = self_adjoint_residual(&form, &samples).unwrap() / scale;
            assert!(r < 1e-7, "p={p} {r}");
        }
    }
}
