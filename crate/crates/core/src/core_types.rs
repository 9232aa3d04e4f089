//! Domain types shared by the computational modules, the fixed physical
//! constants and invariant validation.
//!
//! Units are CGS + torr + kelvin + g/mol throughout: lengths in cm, masses
//! in g, times in s, pressures in torr, energies per mole in cal/mol. The
//! investment reading of the same models reuses these numbers as labels
//! (mass as capital, cm as economic distance); nothing converts between
//! them.
//!
//! Desorption energies are taken in **cal/mol** with R = 1.987 cal/(mol K).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::Scalar;

/// Gas constant R, cal/(mol K).
pub const GAS_CONSTANT: f64 = 1.987;
/// Boltzmann constant k_B, erg/K.
pub const BOLTZMANN: f64 = 1.3807e-16;
/// Prefactor of the pressure form of the impingement rate, for p in torr,
/// M in g/mol and T in K; result in cm^-2 s^-1.
pub const IMPINGEMENT_COEFFICIENT: f64 = 3.513e22;
/// Prefactor of the Langmuir evaporation rate, for p in torr; result in
/// g cm^-2 s^-1.
pub const LANGMUIR_COEFFICIENT: f64 = 0.0583;
/// Avogadro constant, 1/mol. Converts molar mass to mass per molecule.
pub const AVOGADRO: f64 = 6.022_140_76e23;
/// One torr in dyn/cm^2.
pub const TORR_IN_BARYE: f64 = 101_325.0 * 10.0 / 760.0;
/// Default adsorbed-atom vibration period, s.
pub const DEFAULT_VIBRATION_PERIOD: f64 = 1e-14;

/// The fixed constants, converted to the working scalar type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants<T> {
    /// cal/(mol K)
    pub gas_constant: T,
    /// erg/K
    pub boltzmann: T,
    pub impingement_coefficient: T,
    pub langmuir_coefficient: T,
    /// 1/mol
    pub avogadro: T,
}

impl<T: Scalar> Constants<T> {
    pub fn cgs() -> Self {
        Self {
            gas_constant: T::lit(GAS_CONSTANT),
            boltzmann: T::lit(BOLTZMANN),
            impingement_coefficient: T::lit(IMPINGEMENT_COEFFICIENT),
            langmuir_coefficient: T::lit(LANGMUIR_COEFFICIENT),
            avogadro: T::lit(AVOGADRO),
        }
    }
}

fn default_vibration_period<T: Scalar>() -> T {
    T::lit(DEFAULT_VIBRATION_PERIOD)
}

/// An evaporant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct Substance<T> {
    pub name: String,
    /// g/mol
    pub molar_mass: T,
    /// g/cm^3
    pub density: T,
    /// cal/mol
    pub desorption_energy: T,
    /// s
    #[serde(default = "default_vibration_period")]
    pub vibration_period: T,
    /// (temperature K, pressure torr), temperatures strictly increasing.
    #[serde(default)]
    pub vapor_pressure: Vec<(T, T)>,
}

impl<T: Scalar> Substance<T> {
    /// Mass of one molecule, g.
    pub fn molecular_mass(&self) -> T {
        self.molar_mass / Constants::<T>::cgs().avogadro
    }
}

/// Angular emission law of a source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emission {
    /// Isotropic point evaporator, emits into the full sphere.
    Point,
    /// Plane source, emits into the half-space above its plane.
    Plane,
}

impl fmt::Display for Emission {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Emission::Point => "point",
            Emission::Plane => "plane",
        })
    }
}

/// An evaporation source, or in the investment reading a mother-firm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec<T> {
    pub id: String,
    /// Name of the evaporated [`Substance`].
    pub substance: String,
    /// g, or currency units.
    pub mass_capacity: T,
    pub emission: Emission,
    /// K
    pub temperature: T,
    /// In (0, 1]; 1 for clean surfaces.
    pub evaporation_coefficient: T,
    /// Total evaporated mass rate w, g/s. When absent it is derived from
    /// the Langmuir rate times `emitting_area`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_rate_w: Option<T>,
    /// cm^2
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emitting_area: Option<T>,
}

/// A deposition support, or in the investment reading a candidate location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportSpec<T> {
    pub id: String,
    /// Normal distance from the source plane, cm (economic distance).
    pub distance_h: T,
    /// Lateral offset from the point above the source, cm.
    pub offset_x: T,
    /// K
    pub temperature: T,
    pub accommodation: T,
    /// g/cm^3, or value density for investments.
    pub attractiveness_density: T,
    /// cm^-2 s^-1
    pub critical_flux: T,
    /// K
    pub critical_temperature: T,
    /// Radius of a circular support plate, cm. Needed only for mass
    /// integration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<T>,
}

/// Inputs to the accommodation coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccommodationInputs<T> {
    /// Layer temperature T_st, K.
    pub layer_temperature: T,
    /// Support temperature T_s, K.
    pub support_temperature: T,
    /// Incident particle temperature T_i, K.
    pub incident_temperature: T,
    /// Optional (E_st, E_s, E_i) in erg, the energy form of the same ratio.
    pub energies: Option<(T, T, T)>,
}

/// A broken invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Location of the offending field, e.g. `supports[0].distance_h`.
    pub path: String,
    /// The invariant that does not hold.
    pub rule: String,
    /// Offending value, rendered.
    pub value: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: violates `{}` (got {})", self.path, self.rule, self.value)
    }
}

/// Invariant checking. Never fails; a clean aggregate yields no violations.
pub trait Validate {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>);

    fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        self.collect_violations("", &mut out);
        out
    }
}

pub(crate) fn join_path(path: &str, field: &str) -> String {
    if path.is_empty() {
        field.to_owned()
    } else if field.starts_with('[') {
        format!("{path}{field}")
    } else {
        format!("{path}.{field}")
    }
}

/// Small helper used by every `Validate` impl.
pub(crate) struct Checker<'a> {
    pub path: &'a str,
    pub out: &'a mut Vec<Violation>,
}

impl Checker<'_> {
    pub fn require(&mut self, field: &str, ok: bool, rule: &str, value: impl fmt::Display) {
        if !ok {
            self.out.push(Violation {
                path: join_path(self.path, field),
                rule: rule.to_owned(),
                value: value.to_string(),
            });
        }
    }

    /// Finite and satisfying `pred`.
    pub fn number<T: Scalar>(&mut self, field: &str, value: T, pred: impl Fn(T) -> bool, rule: &str) {
        if !value.is_finite() {
            self.require(field, false, "finite", value);
        } else {
            self.require(field, pred(value), rule, value);
        }
    }
}

impl<T: Scalar> Validate for Substance<T> {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        let zero = T::zero();
        let mut c = Checker { path, out };
        c.require("name", !self.name.is_empty(), "name non-empty", "\"\"");
        c.number("molar_mass", self.molar_mass, |v| v > zero, "molar_mass > 0");
        c.number("density", self.density, |v| v > zero, "density > 0");
        c.number(
            "desorption_energy",
            self.desorption_energy,
            |v| v >= zero,
            "desorption_energy >= 0",
        );
        c.number(
            "vibration_period",
            self.vibration_period,
            |v| v > zero,
            "vibration_period > 0",
        );
        for (i, &(t, p)) in self.vapor_pressure.iter().enumerate() {
            c.number(
                &format!("vapor_pressure[{i}].temperature"),
                t,
                |v| v > zero,
                "temperature > 0",
            );
            c.number(
                &format!("vapor_pressure[{i}].pressure"),
                p,
                |v| v > zero,
                "pressure > 0",
            );
            if i > 0 {
                let prev = self.vapor_pressure[i - 1].0;
                c.require(
                    &format!("vapor_pressure[{i}].temperature"),
                    t > prev,
                    "temperatures strictly increasing",
                    format!("{t} after {prev}"),
                );
            }
        }
    }
}

impl<T: Scalar> Validate for SourceSpec<T> {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        let zero = T::zero();
        let mut c = Checker { path, out };
        c.require("id", !self.id.is_empty(), "id non-empty", "\"\"");
        c.number("mass_capacity", self.mass_capacity, |v| v >= zero, "mass_capacity >= 0");
        c.number("temperature", self.temperature, |v| v > zero, "temperature > 0");
        c.number(
            "evaporation_coefficient",
            self.evaporation_coefficient,
            |v| v > zero && v <= T::one(),
            "0 < evaporation_coefficient <= 1",
        );
        if let Some(w) = self.total_rate_w {
            c.number("total_rate_w", w, |v| v >= zero, "total_rate_w >= 0");
        }
        if let Some(a) = self.emitting_area {
            c.number("emitting_area", a, |v| v > zero, "emitting_area > 0");
        }
    }
}

impl<T: Scalar> Validate for SupportSpec<T> {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        let zero = T::zero();
        let mut c = Checker { path, out };
        c.require("id", !self.id.is_empty(), "id non-empty", "\"\"");
        c.number("distance_h", self.distance_h, |v| v > zero, "distance_h > 0");
        c.number("offset_x", self.offset_x, |_| true, "finite");
        c.number("temperature", self.temperature, |v| v > zero, "temperature > 0");
        c.number(
            "accommodation",
            self.accommodation,
            |v| v >= zero && v <= T::one(),
            "0 <= accommodation <= 1",
        );
        c.number(
            "attractiveness_density",
            self.attractiveness_density,
            |v| v > zero,
            "attractiveness_density > 0",
        );
        c.number("critical_flux", self.critical_flux, |v| v >= zero, "critical_flux >= 0");
        c.number(
            "critical_temperature",
            self.critical_temperature,
            |v| v > zero,
            "critical_temperature > 0",
        );
        if let Some(r) = self.radius {
            c.number("radius", r, |v| v > zero, "radius > 0");
        }
    }
}

impl<T: Scalar> Validate for AccommodationInputs<T> {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        let mut c = Checker { path, out };
        let any = |_: T| true;
        c.number("layer_temperature", self.layer_temperature, any, "finite");
        c.number("support_temperature", self.support_temperature, any, "finite");
        c.number("incident_temperature", self.incident_temperature, any, "finite");
        c.require(
            "support_temperature",
            self.support_temperature != self.incident_temperature,
            "support_temperature != incident_temperature",
            self.support_temperature,
        );
        if let Some((_, es, ei)) = self.energies {
            c.require("energies", es != ei, "E_s != E_i", es);
        }
    }
}

impl<V: Validate> Validate for [V] {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        for (i, item) in self.iter().enumerate() {
            item.collect_violations(&join_path(path, &format!("[{i}]")), out);
        }
    }
}
