//! Foreign direct investment read through the deposition model.
//!
//! The mother-firm is the source (capacity `M_i` plays the source mass),
//! each candidate location is a support at economic distance `h` with
//! attractiveness density `rho`, and capital flows at transfer velocity
//! `w` the way evaporated mass does. A joint venture is growth on a
//! same-nature support, so its accommodation is 1.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::core_types::{Checker, SupportSpec, Validate, Violation};
use crate::error::{Error, Result};
use crate::kinetics::condensation_feasible;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvestmentMode {
    Greenfield,
    JointVenture,
}

impl fmt::Display for InvestmentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InvestmentMode::Greenfield => "greenfield",
            InvestmentMode::JointVenture => "joint-venture",
        })
    }
}

/// A candidate investment location.
#[derive(Debug, Clone, PartialEq)]
pub struct FdiLocation<T> {
    pub id: String,
    pub support: SupportSpec<T>,
    /// Present value of expected incomes.
    pub expected_revenue: T,
    /// Present value of the costs of realising the investment.
    pub expected_cost: T,
    pub mode: InvestmentMode,
    /// Size of the existing partner firm; zero for greenfield.
    pub existing_base_mass: T,
}

/// The investing mother-firm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FirmProfile<T> {
    /// Economic-financial capacity M_i.
    pub capacity: T,
    /// Managerial share A of the capacity directed at one target, in [0, 1].
    pub allocation_fraction: T,
    /// Proportionality k between investment mass and centre thickness.
    pub proportionality_k: T,
    /// Transfer constant A0 = pi rho A / k. Derived per location when
    /// absent; when given it must agree with the derived value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transfer_constant: Option<T>,
}

/// Relative agreement required between a stored and a derived A0.
pub const TRANSFER_CONSTANT_TOLERANCE: f64 = 1e-9;

impl<T: Scalar> FirmProfile<T> {
    /// A0 for a location of attractiveness density `rho`.
    pub fn transfer_constant_for(&self, rho: T) -> Result<T> {
        if !(self.proportionality_k.is_finite() && self.proportionality_k > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "proportionality k must be positive, got {}",
                self.proportionality_k
            )));
        }
        let derived = T::pi() * rho * self.allocation_fraction / self.proportionality_k;
        match self.transfer_constant {
            None => Ok(derived),
            Some(stored) => {
                let scale = derived.abs().max(stored.abs());
                if (stored - derived).abs() <= T::lit(TRANSFER_CONSTANT_TOLERANCE) * scale {
                    Ok(stored)
                } else {
                    Err(Error::InvalidInput(format!(
                        "transfer constant {stored} conflicts with pi*rho*A/k = {derived} (rho = {rho})"
                    )))
                }
            }
        }
    }
}

impl<T: Scalar> Validate for FirmProfile<T> {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        let zero = T::zero();
        let mut c = Checker { path, out };
        c.number("capacity", self.capacity, |v| v >= zero, "capacity >= 0");
        c.number(
            "allocation_fraction",
            self.allocation_fraction,
            |v| v >= zero && v <= T::one(),
            "0 <= allocation_fraction <= 1",
        );
        c.number(
            "proportionality_k",
            self.proportionality_k,
            |v| v > zero,
            "proportionality_k > 0",
        );
        if let Some(a0) = self.transfer_constant {
            c.number("transfer_constant", a0, |v| v > zero, "transfer_constant > 0");
        }
    }
}

impl<T: Scalar> Validate for FdiLocation<T> {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        let zero = T::zero();
        {
            let mut c = Checker { path, out: &mut *out };
            c.require("id", !self.id.is_empty(), "id non-empty", "\"\"");
            c.number(
                "expected_revenue",
                self.expected_revenue,
                |v| v >= zero,
                "expected_revenue >= 0",
            );
            c.number("expected_cost", self.expected_cost, |v| v >= zero, "expected_cost >= 0");
            c.number(
                "existing_base_mass",
                self.existing_base_mass,
                |v| v >= zero,
                "existing_base_mass >= 0",
            );
            c.require(
                "existing_base_mass",
                self.mode != InvestmentMode::Greenfield || self.existing_base_mass == zero,
                "existing_base_mass = 0 for greenfield",
                self.existing_base_mass,
            );
        }
        self.support
            .collect_violations(&crate::core_types::join_path(path, "support"), out);
    }
}

/// `V = R - C`; negative for loss-making sites.
pub fn investment_value<T: Scalar>(revenue: T, cost: T) -> T {
    revenue - cost
}

/// `m_j = A M_i`.
pub fn investment_mass<T: Scalar>(firm: &FirmProfile<T>, capacity: T) -> T {
    firm.allocation_fraction * capacity
}

/// `m_j = k w / (pi rho h^2)`: investment mass realised at distance `h`
/// under transfer velocity `w`.
pub fn mass_from_thickness<T: Scalar>(k: T, w: T, rho: T, h: T) -> Result<T> {
    if !(rho.is_finite() && rho > T::zero()) {
        return Err(Error::InvalidInput(format!("density rho must be positive, got {rho}")));
    }
    if !(h.is_finite() && h > T::zero()) {
        return Err(Error::InvalidInput(format!("distance h must be positive, got {h}")));
    }
    Ok(k * w / (T::pi() * rho * h * h))
}

/// `w = A0 M_i h^2`: the transfer velocity needed to realise `A M_i` at
/// economic distance `h`.
pub fn required_transfer_velocity<T: Scalar>(transfer_constant: T, capacity: T, h: T) -> T {
    transfer_constant * capacity * h * h
}

/// 1 for joint ventures (same-nature support), the support's own
/// accommodation otherwise.
pub fn effective_accommodation<T: Scalar>(location: &FdiLocation<T>) -> T {
    match location.mode {
        InvestmentMode::JointVenture => T::one(),
        InvestmentMode::Greenfield => location.support.accommodation,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedLocation<T> {
    pub id: String,
    pub mode: InvestmentMode,
    pub value: T,
    pub required_velocity: T,
    pub investment_mass: T,
    pub effective_accommodation: T,
    pub feasible: bool,
}

/// Evaluates every location and orders them by feasibility (feasible
/// first), then value (descending), then id (ascending).
///
/// `incident_fluxes[i]` is the raw flux reaching `locations[i]`; it is
/// scaled by the effective accommodation before the threshold test.
pub fn rank_locations<T: Scalar>(
    firm: &FirmProfile<T>,
    locations: &[FdiLocation<T>],
    incident_fluxes: &[T],
) -> Result<Vec<RankedLocation<T>>> {
    if locations.len() != incident_fluxes.len() {
        return Err(Error::InvalidInput(format!(
            "{} locations but {} incident fluxes",
            locations.len(),
            incident_fluxes.len()
        )));
    }
    let mut ranked = locations
        .iter()
        .zip(incident_fluxes)
        .map(|(loc, &flux)| {
            if !(flux.is_finite() && flux >= T::zero()) {
                return Err(Error::InvalidInput(format!(
                    "incident flux for {} must be non-negative, got {flux}",
                    loc.id
                )));
            }
            let alpha = effective_accommodation(loc);
            let a0 = firm.transfer_constant_for(loc.support.attractiveness_density)?;
            Ok(RankedLocation {
                id: loc.id.clone(),
                mode: loc.mode,
                value: investment_value(loc.expected_revenue, loc.expected_cost),
                required_velocity: required_transfer_velocity(a0, firm.capacity, loc.support.distance_h),
                investment_mass: investment_mass(firm, firm.capacity),
                effective_accommodation: alpha,
                feasible: condensation_feasible(flux * alpha, &loc.support),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| {
        b.feasible
            .cmp(&a.feasible)
            .then_with(|| b.value.partial_cmp(&a.value).unwrap_or(Ordering::Equal))
            .then_with(|| a.id.cmp(&b.id))
    });
    Ok(ranked)
}
