//! Adsorption and evaporation kinetics: residence time, accommodation,
//! impingement and Langmuir evaporation rates, and the condensation
//! threshold test.

use std::fmt;

use crate::core_types::{AccommodationInputs, Constants, SupportSpec};
use crate::error::{Error, Result};
use crate::Scalar;

/// Unit attached to a [`RateResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateUnit {
    Seconds,
    CentimetresPerSecond,
    PerSquareCentimetrePerSecond,
    GramsPerSquareCentimetrePerSecond,
}

impl fmt::Display for RateUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RateUnit::Seconds => "s",
            RateUnit::CentimetresPerSecond => "cm/s",
            RateUnit::PerSquareCentimetrePerSecond => "cm^-2 s^-1",
            RateUnit::GramsPerSquareCentimetrePerSecond => "g cm^-2 s^-1",
        })
    }
}

/// Which formula produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formula {
    ResidenceTime,
    KineticImpingement,
    MeanSpeed,
    PressureImpingement,
    LangmuirEvaporation,
}

impl Formula {
    pub fn unit(self) -> RateUnit {
        match self {
            Formula::ResidenceTime => RateUnit::Seconds,
            Formula::MeanSpeed => RateUnit::CentimetresPerSecond,
            Formula::KineticImpingement | Formula::PressureImpingement => RateUnit::PerSquareCentimetrePerSecond,
            Formula::LangmuirEvaporation => RateUnit::GramsPerSquareCentimetrePerSecond,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Formula::ResidenceTime => "residence-time",
            Formula::KineticImpingement => "kinetic-impingement",
            Formula::MeanSpeed => "mean-speed",
            Formula::PressureImpingement => "pressure-impingement",
            Formula::LangmuirEvaporation => "langmuir-evaporation",
        }
    }
}

/// A non-negative rate together with its unit and originating formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult<T> {
    pub value: T,
    pub unit: RateUnit,
    pub formula: Formula,
}

impl<T: Scalar> RateResult<T> {
    pub fn new(formula: Formula, value: T) -> Self {
        Self {
            value,
            unit: formula.unit(),
            formula,
        }
    }
}

fn positive<T: Scalar>(name: &str, value: T) -> Result<T> {
    if value.is_finite() && value > T::zero() {
        Ok(value)
    } else {
        Err(Error::InvalidInput(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

fn non_negative<T: Scalar>(name: &str, value: T) -> Result<T> {
    if value.is_finite() && value >= T::zero() {
        Ok(value)
    } else {
        Err(Error::InvalidInput(format!(
            "{name} must be non-negative and finite, got {value}"
        )))
    }
}

/// Mean time an adsorbed atom stays on the support, s.
///
/// `tau * exp(+E_d / (R T))` with `E_d` in cal/mol. The exponent is taken
/// positive so that stronger binding means longer residence.
pub fn residence_time<T: Scalar>(tau: T, desorption_energy: T, temperature: T) -> Result<T> {
    let tau = positive("vibration period", tau)?;
    let temperature = positive("temperature", temperature)?;
    let energy = non_negative("desorption energy", desorption_energy)?;
    let r = Constants::<T>::cgs().gas_constant;
    Ok(tau * (energy / (r * temperature)).exp())
}

/// `(T_st - T_i) / (T_s - T_i)`, or the same ratio over energies when the
/// inputs carry them. Not clamped to [0, 1].
pub fn accommodation_coefficient<T: Scalar>(inputs: &AccommodationInputs<T>) -> Result<T> {
    let (layer, support, incident) = match inputs.energies {
        Some(energies) => energies,
        None => (
            inputs.layer_temperature,
            inputs.support_temperature,
            inputs.incident_temperature,
        ),
    };
    let denominator = support - incident;
    if denominator == T::zero() {
        return Err(Error::Degenerate(format!(
            "support and incident values are equal ({support})"
        )));
    }
    Ok((layer - incident) / denominator)
}

/// Particles striking unit area per unit time from a gas of number density
/// `n` (cm^-3) and mean speed `v_mean` (cm/s): `n v / 4`.
pub fn impingement_rate_kinetic<T: Scalar>(n: T, v_mean: T) -> Result<T> {
    let n = non_negative("number density", n)?;
    let v = non_negative("mean speed", v_mean)?;
    Ok(n * v / T::lit(4.0))
}

/// Arithmetic mean molecular speed `2 sqrt(2 k_B T / (pi m))`, cm/s, for
/// molecular mass `m` in g.
pub fn mean_speed<T: Scalar>(temperature: T, molecular_mass: T) -> Result<T> {
    let t = positive("temperature", temperature)?;
    let m = positive("molecular mass", molecular_mass)?;
    let kb = Constants::<T>::cgs().boltzmann;
    let two = T::lit(2.0);
    Ok(two * (two * kb * t / (T::pi() * m)).sqrt())
}

/// Adsorbed-particle rate `3.513e22 alpha p / sqrt(M T)`, cm^-2 s^-1, with p
/// in torr and M in g/mol.
pub fn impingement_rate_pressure<T: Scalar>(alpha: T, pressure: T, molar_mass: T, temperature: T) -> Result<T> {
    let alpha = non_negative("accommodation coefficient", alpha)?;
    let p = non_negative("pressure", pressure)?;
    let m = positive("molar mass", molar_mass)?;
    let t = positive("temperature", temperature)?;
    let c = Constants::<T>::cgs().impingement_coefficient;
    Ok(c * alpha * p / (m * t).sqrt())
}

/// Langmuir evaporation rate `0.0583 alpha_v p_v sqrt(M / T)`,
/// g cm^-2 s^-1, with p_v in torr.
pub fn evaporation_rate<T: Scalar>(alpha_v: T, vapor_pressure: T, molar_mass: T, temperature: T) -> Result<T> {
    if !(alpha_v.is_finite() && alpha_v > T::zero() && alpha_v <= T::one()) {
        return Err(Error::InvalidInput(format!(
            "evaporation coefficient must lie in (0, 1], got {alpha_v}"
        )));
    }
    let p = non_negative("vapor pressure", vapor_pressure)?;
    let m = positive("molar mass", molar_mass)?;
    let t = positive("temperature", temperature)?;
    let c = Constants::<T>::cgs().langmuir_coefficient;
    Ok(c * alpha_v * p * (m / t).sqrt())
}

/// Whether a film condenses: the incident flux must strictly exceed the
/// support's critical flux and the support must be strictly colder than
/// its critical temperature.
pub fn condensation_feasible<T: Scalar>(incident_flux: T, support: &SupportSpec<T>) -> bool {
    incident_flux > support.critical_flux && support.temperature < support.critical_temperature
}
