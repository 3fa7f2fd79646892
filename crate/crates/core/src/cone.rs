//! Similarity problem for free convection about a cone in a porous medium with
//! prescribed wall heat flux `q_w ∝ x^λ`:
//!
//! ```text
//! f''' + ((λ + 5) / 2) f f'' - ((2λ + 1) / 3) f'^2 = 0
//! f(0) = 0,  f''(0) = -1,  f'(∞) = 0
//! ```
//!
//! The dimensionless wall temperature is `θ = f'`.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{RbfError, Result};
use crate::scalar::Real;

/// Default truncation radius standing in for `η = ∞`.
pub const DEFAULT_ETA_INFINITY: f64 = 4.5;

/// Flux exponent `λ` held as an exact rational.
///
/// Parses `"1/4"`, `"3"`, and finite decimals such as `"0.25"` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FluxExponent(Ratio<i64>);

impl FluxExponent {
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(RbfError::InvalidInput("flux exponent denominator is zero".into()));
        }
        Self::from_ratio(Ratio::new(numer, denom))
    }

    pub fn from_ratio(r: Ratio<i64>) -> Result<Self> {
        if r.is_negative() {
            return Err(RbfError::Domain(format!("flux exponent must be >= 0, got {r}")));
        }
        Ok(Self(r))
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// `(λ + 5) / 2`, exact.
    pub fn convection_coefficient(&self) -> Ratio<i64> {
        (self.0 + 5) / 2
    }

    /// `(2λ + 1) / 3`, exact.
    pub fn stretching_coefficient(&self) -> Ratio<i64> {
        (self.0 * 2 + 1) / 3
    }
}

impl fmt::Display for FluxExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn parse_decimal(s: &str) -> Option<Ratio<i64>> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if (int.is_empty() && frac.is_empty())
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let scale = 10i64.checked_pow(frac.len() as u32)?;
    let digits: i64 = format!("{int}{frac}").parse().ok()?;
    Some(Ratio::new(digits, scale))
}

impl FromStr for FluxExponent {
    type Err = RbfError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || RbfError::InvalidInput(format!("cannot parse flux exponent {s:?}"));
        let (body, negative) = match s.strip_prefix('-') {
            Some(rest) => (rest, true),
            None => (s.strip_prefix('+').unwrap_or(s), false),
        };
        let r = match body.split_once('/') {
            Some((n, d)) => {
                let n = parse_decimal(n.trim()).ok_or_else(bad)?;
                let d = parse_decimal(d.trim()).ok_or_else(bad)?;
                if d.is_zero() {
                    return Err(bad());
                }
                n / d
            }
            None => parse_decimal(body).ok_or_else(bad)?,
        };
        Self::from_ratio(if negative { -r } else { r })
    }
}

impl Serialize for FluxExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FluxExponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

fn ratio_to<T: Real>(r: Ratio<i64>) -> T {
    T::lit(*r.numer() as f64) / T::lit(*r.denom() as f64)
}

/// The cone boundary-value problem on the truncated domain `[0, η∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeProblem<T> {
    flux_exponent: FluxExponent,
    eta_infinity: T,
    #[serde(skip)]
    a: T,
    #[serde(skip)]
    b: T,
}

impl<T: Real> ConeProblem<T> {
    pub const F_AT_ZERO: f64 = 0.0;
    pub const F2_AT_ZERO: f64 = -1.0;
    pub const F1_AT_INFINITY: f64 = 0.0;

    pub fn new(flux_exponent: FluxExponent, eta_infinity: T) -> Result<Self> {
        if !(eta_infinity > T::zero() && eta_infinity.is_finite()) {
            return Err(RbfError::InvalidInput(format!(
                "eta_infinity must be positive and finite, got {eta_infinity}"
            )));
        }
        Ok(Self {
            flux_exponent,
            eta_infinity,
            a: ratio_to(flux_exponent.convection_coefficient()),
            b: ratio_to(flux_exponent.stretching_coefficient()),
        })
    }

    /// Problem with the default truncation radius.
    pub fn with_lambda(flux_exponent: FluxExponent) -> Self {
        Self::new(flux_exponent, T::lit(DEFAULT_ETA_INFINITY)).expect("default radius is valid")
    }

    pub fn flux_exponent(&self) -> FluxExponent {
        self.flux_exponent
    }

    pub fn eta_infinity(&self) -> T {
        self.eta_infinity
    }

    /// `((λ + 5) / 2, (2λ + 1) / 3)`.
    pub fn coefficients(&self) -> (T, T) {
        (self.a, self.b)
    }

    /// Left-hand side of the ODE at a state `(f, f', f'', f''')`.
    #[inline]
    pub fn ode_residual(&self, f: T, f1: T, f2: T, f3: T) -> T {
        f3 + self.a * f * f2 - self.b * f1 * f1
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for ConeProblem<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw<T> {
            flux_exponent: FluxExponent,
            eta_infinity: T,
        }
        let raw = Raw::<T>::deserialize(d)?;
        Self::new(raw.flux_exponent, raw.eta_infinity).map_err(serde::de::Error::custom)
    }
}

/// Dimensional inputs of the local Rayleigh number. Angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams<T> {
    pub density_at_infinity: T,
    pub expansion_coefficient: T,
    pub gravity: T,
    pub permeability: T,
    pub half_angle: T,
    pub wall_heat_flux: T,
    pub distance: T,
    pub viscosity: T,
    pub thermal_diffusivity: T,
    pub conductivity: T,
}

impl<T: Real> PhysicalParams<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("density_at_infinity", self.density_at_infinity),
            ("expansion_coefficient", self.expansion_coefficient),
            ("gravity", self.gravity),
            ("permeability", self.permeability),
            ("wall_heat_flux", self.wall_heat_flux),
            ("distance", self.distance),
            ("viscosity", self.viscosity),
            ("thermal_diffusivity", self.thermal_diffusivity),
            ("conductivity", self.conductivity),
        ];
        for (name, v) in positive {
            if !(v > T::zero() && v.is_finite()) {
                return Err(RbfError::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.half_angle >= T::zero() && self.half_angle < T::FRAC_PI_2()) {
            return Err(RbfError::Domain(format!(
                "half angle must lie in [0, pi/2), got {}",
                self.half_angle
            )));
        }
        Ok(())
    }

    /// `Ra_x = ρ∞ β g K cos(γ) q_w x² / (μ α k)`.
    pub fn rayleigh_number(&self) -> T {
        self.density_at_infinity
            * self.expansion_coefficient
            * self.gravity
            * self.permeability
            * self.half_angle.cos()
            * self.wall_heat_flux
            * self.distance
            * self.distance
            / (self.viscosity * self.thermal_diffusivity * self.conductivity)
    }
}

/// `Nu_x / Ra_x^{1/3} = 1 / θ(0)` with `θ(0) = f'(0)`.
///
/// With prescribed flux, `Nu_x = q_w x / (k (T_w - T∞))` and
/// `T_w - T∞ = (q_w x / k) Ra_x^{-1/3} θ(0)`.
pub fn nusselt_ratio<T: Real>(f_prime_at_0: T) -> Result<T> {
    if !(f_prime_at_0 > T::zero() && f_prime_at_0.is_finite()) {
        return Err(RbfError::Domain(format!(
            "wall temperature f'(0) must be positive, got {f_prime_at_0}"
        )));
    }
    Ok(f_prime_at_0.recip())
}
