//! Random variate generators and log densities used by the sampler.
//!
//! Gamma variates come from `rand_distr`; inverse-gamma, Beta and F variates
//! are built on top of them. The generalized inverse Gaussian generator is
//! implemented here following Hörmann & Leydold (2014): ratio-of-uniforms with
//! or without mode shift, plus a dedicated rejection sampler for the region
//! `λ < 1`, `ω ≤ 0.2` where both ratio-of-uniforms variants degrade.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Open01, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::real::Real;

/// GIG(λ, χ, ψ) with density ∝ x^{λ−1} exp(−(χ/x + ψx)/2) on x > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GigParams {
    pub lambda: f64,
    pub chi: f64,
    pub psi: f64,
}

impl GigParams {
    pub fn new(lambda: f64, chi: f64, psi: f64) -> Result<Self> {
        let p = Self { lambda, chi, psi };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        let ok = self.lambda.is_finite()
            && self.chi.is_finite()
            && self.psi.is_finite()
            && self.chi >= 0.0
            && self.psi >= 0.0
            && (self.chi > 0.0 || self.lambda > 0.0)
            && (self.psi > 0.0 || self.lambda < 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidGig {
                lambda: self.lambda,
                chi: self.chi,
                psi: self.psi,
            })
        }
    }

    /// Mode of the (unnormalized) density.
    pub fn mode(&self) -> f64 {
        if self.chi == 0.0 {
            return ((self.lambda - 1.0) * 2.0 / self.psi).max(0.0);
        }
        if self.psi == 0.0 {
            return self.chi / (2.0 * (1.0 - self.lambda));
        }
        let alpha = (self.chi / self.psi).sqrt();
        alpha * standardized_mode(self.lambda, (self.chi * self.psi).sqrt())
    }

    /// Unnormalized log density.
    pub fn log_kernel(&self, x: f64) -> f64 {
        (self.lambda - 1.0) * x.ln() - 0.5 * (self.chi / x + self.psi * x)
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Open01.sample(rng)
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Gamma variate with the given shape and rate (mean `shape / rate`).
pub fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, rate: f64) -> Result<f64> {
    if !(shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma(shape={shape}, rate={rate})"
        )));
    }
    let g = Gamma::new(shape, 1.0 / rate)
        .map_err(|e| Error::InvalidParameter(format!("gamma: {e}")))?;
    Ok(g.sample(rng))
}

/// Inverse-gamma variate with density ∝ x^{−shape−1} exp(−scale/x).
pub fn sample_inv_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, scale: f64) -> Result<f64> {
    Ok(1.0 / sample_gamma(rng, shape, scale)?)
}

pub fn sample_beta<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> Result<f64> {
    let x = sample_gamma(rng, a, 1.0)?;
    let y = sample_gamma(rng, b, 1.0)?;
    Ok(x / (x + y))
}

/// F(df1, df2) variate as a ratio of scaled gamma variates.
pub fn sample_f<R: Rng + ?Sized>(rng: &mut R, df1: f64, df2: f64) -> Result<f64> {
    let (a, c) = (df1 / 2.0, df2 / 2.0);
    let ga = sample_gamma(rng, a, 1.0)?;
    let gc = sample_gamma(rng, c, 1.0)?;
    Ok((ga / a) / (gc / c))
}

/// Draws from GIG(λ, χ, ψ). The boundary cases `χ = 0` and `ψ = 0` are exact
/// gamma and inverse-gamma draws.
pub fn sample_gig<R: Rng + ?Sized>(rng: &mut R, p: &GigParams) -> Result<f64> {
    p.check()?;
    let GigParams { lambda, chi, psi } = *p;
    if chi == 0.0 {
        return sample_gamma(rng, lambda, psi / 2.0);
    }
    if psi == 0.0 {
        return sample_inv_gamma(rng, -lambda, chi / 2.0);
    }

    // X ~ GIG(λ, χ, ψ)  ⇔  1/X ~ GIG(−λ, ψ, χ); sample the standardized
    // two-parameter form with λ ≥ 0 and rescale by α = √(χ/ψ).
    let alpha = (chi / psi).sqrt();
    let omega = (chi * psi).sqrt();
    let lam = lambda.abs();
    // ω^{2|λ|} bounds the mass the dropped χ (or ψ) term would move; once it
    // is below double precision the one-sided limit is exact to rounding
    if omega < 1e-6 && 2.0 * lam * omega.ln() < -36.0 {
        return if lambda > 0.0 {
            sample_gamma(rng, lambda, psi / 2.0)
        } else {
            sample_inv_gamma(rng, -lambda, chi / 2.0)
        };
    }
    let x = if lam > 2.0 || omega > 3.0 {
        rou_shifted(rng, lam, omega)
    } else if lam >= 1.0 - 2.25 * omega * omega || omega > 0.2 {
        rou_plain(rng, lam, omega)
    } else {
        concave_hat(rng, lam, omega)
    };
    Ok(if lambda < 0.0 { alpha / x } else { alpha * x })
}

fn standardized_mode(lambda: f64, omega: f64) -> f64 {
    if lambda >= 1.0 {
        (((lambda - 1.0).powi(2) + omega * omega).sqrt() + (lambda - 1.0)) / omega
    } else {
        omega / (((1.0 - lambda).powi(2) + omega * omega).sqrt() + (1.0 - lambda))
    }
}

// ratio-of-uniforms without mode shift
fn rou_plain<R: Rng + ?Sized>(rng: &mut R, lambda: f64, omega: f64) -> f64 {
    let t = 0.5 * (lambda - 1.0);
    let s = 0.25 * omega;
    let xm = standardized_mode(lambda, omega);
    let nc = t * xm.ln() - s * (xm + 1.0 / xm);
    let ym = ((lambda + 1.0) + ((lambda + 1.0).powi(2) + omega * omega).sqrt()) / omega;
    let um = (0.5 * (lambda + 1.0) * ym.ln() - s * (ym + 1.0 / ym) - nc).exp();
    loop {
        let u = um * uniform(rng);
        let v = uniform(rng);
        let x = u / v;
        if v.ln() <= t * x.ln() - s * (x + 1.0 / x) - nc {
            return x;
        }
    }
}

// ratio-of-uniforms with the hat shifted to the mode; bounds from the roots
// of a depressed cubic
fn rou_shifted<R: Rng + ?Sized>(rng: &mut R, lambda: f64, omega: f64) -> f64 {
    let t = 0.5 * (lambda - 1.0);
    let s = 0.25 * omega;
    let xm = standardized_mode(lambda, omega);
    let nc = t * xm.ln() - s * (xm + 1.0 / xm);

    let a = -(2.0 * (lambda + 1.0) / omega + xm);
    let b = 2.0 * (lambda - 1.0) * xm / omega - 1.0;
    let c = xm;
    let p = b - a * a / 3.0;
    let q = (2.0 * a * a * a) / 27.0 - (a * b) / 3.0 + c;
    let fi = (-q / (2.0 * (-(p * p * p) / 27.0).sqrt())).clamp(-1.0, 1.0).acos();
    let fak = 2.0 * (-p / 3.0).sqrt();
    let y1 = fak * (fi / 3.0).cos() - a / 3.0;
    let y2 = fak * (fi / 3.0 + 4.0 / 3.0 * PI).cos() - a / 3.0;
    let uplus = (y1 - xm) * (t * y1.ln() - s * (y1 + 1.0 / y1) - nc).exp();
    let uminus = (y2 - xm) * (t * y2.ln() - s * (y2 + 1.0 / y2) - nc).exp();
    loop {
        let u = uminus + uniform(rng) * (uplus - uminus);
        let v = uniform(rng);
        let x = u / v + xm;
        if x > 0.0 && v.ln() <= t * x.ln() - s * (x + 1.0 / x) - nc {
            return x;
        }
    }
}

// rejection from a three-piece hat: constant on [0, x0], x^{λ−1} up to 2/ω,
// exponential tail beyond
fn concave_hat<R: Rng + ?Sized>(rng: &mut R, lambda: f64, omega: f64) -> f64 {
    let xm = standardized_mode(lambda, omega);
    let x0 = omega / (1.0 - lambda);
    let k0 = ((lambda - 1.0) * xm.ln() - 0.5 * omega * (xm + 1.0 / xm)).exp();
    let a0 = k0 * x0;
    let (k1, a1, k2, a2);
    if x0 >= 2.0 / omega {
        k1 = 0.0;
        a1 = 0.0;
        k2 = x0.powf(lambda - 1.0);
        a2 = k2 * 2.0 * (-omega * x0 / 2.0).exp() / omega;
    } else {
        k1 = (-omega).exp();
        a1 = if lambda == 0.0 {
            k1 * (2.0 / (omega * omega)).ln()
        } else {
            k1 / lambda * ((2.0 / omega).powf(lambda) - x0.powf(lambda))
        };
        k2 = (2.0 / omega).powf(lambda - 1.0);
        a2 = k2 * 2.0 * (-1.0f64).exp() / omega;
    }
    let total = a0 + a1 + a2;
    loop {
        let mut v = total * uniform(rng);
        let (x, hx);
        if v <= a0 {
            x = x0 * v / a0;
            hx = k0;
        } else {
            v -= a0;
            if v <= a1 {
                if lambda == 0.0 {
                    x = omega * (omega.exp() * v).exp();
                    hx = k1 / x;
                } else {
                    x = (x0.powf(lambda) + lambda / k1 * v).powf(1.0 / lambda);
                    hx = k1 * x.powf(lambda - 1.0);
                }
            } else {
                v -= a1;
                let lo = x0.max(2.0 / omega);
                x = -2.0 / omega * ((-omega / 2.0 * lo).exp() - omega / (2.0 * k2) * v).ln();
                hx = k2 * (-omega / 2.0 * x).exp();
            }
        }
        let u = uniform(rng) * hx;
        if x > 0.0 && x.is_finite() && u.ln() <= (lambda - 1.0) * x.ln() - omega / 2.0 * (x + 1.0 / x)
        {
            return x;
        }
    }
}

/// Exact log of the univariate normal density.
pub fn log_normal_pdf<T: Real>(x: T, mean: T, variance: T) -> T {
    let z = x - mean;
    -T::lit(0.5) * (T::lit(2.0 * PI) * variance).ln() - z * z / (T::lit(2.0) * variance)
}

/// Log density of Gamma(shape, rate) at `x`.
pub fn log_gamma_pdf(x: f64, shape: f64, rate: f64) -> f64 {
    shape * rate.ln() - ln_gamma(shape) + (shape - 1.0) * x.ln() - rate * x
}

/// Log density of Beta(a, b) at `x`.
pub fn log_beta_pdf(x: f64, a: f64, b: f64) -> f64 {
    ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + (a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln()
}

/// Log density of the F(df1, df2) law at `x`.
pub fn log_f_pdf(x: f64, df1: f64, df2: f64) -> f64 {
    let (h1, h2) = (df1 / 2.0, df2 / 2.0);
    h1 * (df1 / df2).ln() + (h1 - 1.0) * x.ln()
        - (h1 + h2) * (1.0 + df1 * x / df2).ln()
        - (ln_gamma(h1) + ln_gamma(h2) - ln_gamma(h1 + h2))
}

pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}
