//! Subcommand drivers: each turns a loaded [`Scenario`] into a
//! [`ResultTable`]. The binary only parses arguments and writes output.

use crate::core_types::{Substance, Violation, BOLTZMANN, TORR_IN_BARYE};
use crate::error::{Error, Result};
use crate::fdi::{mass_from_thickness, rank_locations, required_transfer_velocity};
use crate::geometry::{disk_mass, profile_at_offsets, Disk};
use crate::kinetics::{
    condensation_feasible, evaporation_rate, impingement_rate_kinetic, impingement_rate_pressure, mean_speed,
    residence_time, Formula,
};
use crate::scenario::{incident_number_flux, vapor_pressure_at, Scenario};
use crate::table::{Cell, ResultTable};
use crate::transfer::{calibrate_matrix, forward_masses, solve_sources};

/// Relative tolerance of the disk quadrature behind `mass`.
pub const MASS_QUADRATURE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Rates,
    Profile,
    Mass,
    Forward,
    Solve,
    Calibrate,
    FdiRank,
    FdiVelocity,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Options {
    /// Lateral offsets for `profile`.
    pub offsets: Option<Vec<f64>>,
    /// Drop negative-value locations from `fdi-rank`.
    pub filter_negative_value: bool,
}

pub fn run_subcommand(cmd: Subcommand, scenario: &Scenario, options: &Options) -> Result<ResultTable> {
    match cmd {
        Subcommand::Rates => rates(scenario),
        Subcommand::Profile => {
            let offsets = options
                .offsets
                .as_deref()
                .ok_or_else(|| Error::Usage("profile requires --offsets".into()))?;
            profile(scenario, offsets)
        }
        Subcommand::Mass => mass(scenario),
        Subcommand::Forward => forward(scenario),
        Subcommand::Solve => solve(scenario),
        Subcommand::Calibrate => calibrate(scenario),
        Subcommand::FdiRank => fdi_rank(scenario, options.filter_negative_value),
        Subcommand::FdiVelocity => fdi_velocity(scenario),
    }
}

fn name(s: &Scenario) -> &str {
    &s.meta.name
}

fn missing(what: &str) -> Error {
    Error::InvalidInput(format!("scenario has no {what}"))
}

fn kinetic_impingement(substance: &Substance<f64>, pv: f64, temperature: f64) -> Result<f64> {
    let density = pv * TORR_IN_BARYE / (BOLTZMANN * temperature);
    impingement_rate_kinetic(density, mean_speed(temperature, substance.molecular_mass())?)
}

fn rates(s: &Scenario) -> Result<ResultTable> {
    let mut t = ResultTable::new(
        &[
            "source",
            "support",
            "vapor_pressure",
            "residence_time",
            "mean_speed",
            "kinetic_impingement",
            "adsorption_rate",
            "evaporation_rate",
            "incident_flux",
            "feasible",
        ],
        name(s),
        &[
            Formula::ResidenceTime.name(),
            Formula::MeanSpeed.name(),
            Formula::KineticImpingement.name(),
            Formula::PressureImpingement.name(),
            Formula::LangmuirEvaporation.name(),
            "cosine-law-flux",
        ],
    );
    for source in &s.sources {
        let substance = s.substance_of(source)?;
        let temperature = source.temperature;
        let pv = vapor_pressure_at(substance, temperature)?;
        let geometry = s.emission_geometry(source)?;
        for support in &s.supports {
            let flux = incident_number_flux(&geometry, substance, support)?;
            t.push(vec![
                source.id.as_str().into(),
                support.id.as_str().into(),
                pv.into(),
                residence_time(
                    substance.vibration_period,
                    substance.desorption_energy,
                    support.temperature,
                )?
                .into(),
                mean_speed(temperature, substance.molecular_mass())?.into(),
                kinetic_impingement(substance, pv, temperature)?.into(),
                impingement_rate_pressure(support.accommodation, pv, substance.molar_mass, temperature)?.into(),
                evaporation_rate(source.evaporation_coefficient, pv, substance.molar_mass, temperature)?.into(),
                flux.into(),
                condensation_feasible(flux, support).into(),
            ]);
        }
    }
    Ok(t)
}

fn profile(s: &Scenario, offsets: &[f64]) -> Result<ResultTable> {
    let mut t = ResultTable::new(
        &["source", "support", "distance_h", "offset_x", "thickness_rate"],
        name(s),
        &["cosine-law-thickness"],
    );
    for source in &s.sources {
        let w = s.source_rate(source)?;
        let rho = s.substance_of(source)?.density;
        for support in &s.supports {
            let p = profile_at_offsets(&source.id, &support.id, w, rho, support.distance_h, offsets)?;
            for (x, d) in p.offsets.iter().zip(&p.thickness_rate) {
                t.push(vec![
                    source.id.as_str().into(),
                    support.id.as_str().into(),
                    support.distance_h.into(),
                    (*x).into(),
                    (*d).into(),
                ]);
            }
        }
    }
    Ok(t)
}

fn mass(s: &Scenario) -> Result<ResultTable> {
    let without_radius: Vec<usize> = (0..s.supports.len())
        .filter(|&i| s.supports[i].radius.is_none())
        .collect();
    if !without_radius.is_empty() {
        return Err(Error::Validation(
            without_radius
                .iter()
                .map(|i| Violation {
                    path: format!("supports[{i}].radius"),
                    rule: "radius required for mass integration".into(),
                    value: "absent".into(),
                })
                .collect(),
        ));
    }
    let mut t = ResultTable::new(
        &[
            "source",
            "support",
            "radius",
            "center_offset",
            "mass_rate",
            "rings",
            "sectors",
            "relative_change",
        ],
        name(s),
        &["cosine-law-thickness", "deposited-mass"],
    );
    for source in &s.sources {
        let w = s.source_rate(source)?;
        let rho = s.substance_of(source)?.density;
        for support in &s.supports {
            let disk = Disk {
                center_offset: support.offset_x.abs(),
                radius: support.radius.unwrap_or_default(),
            };
            let m = disk_mass(w, rho, support.distance_h, disk, MASS_QUADRATURE_TOLERANCE)?;
            t.push(vec![
                source.id.as_str().into(),
                support.id.as_str().into(),
                disk.radius.into(),
                disk.center_offset.into(),
                m.mass_rate.into(),
                m.rings.into(),
                m.sectors.into(),
                m.relative_change.into(),
            ]);
        }
    }
    Ok(t)
}

fn forward(s: &Scenario) -> Result<ResultTable> {
    let k = s.transfer.as_ref().ok_or_else(|| missing("transfer matrix"))?;
    let masses: Vec<f64> = k
        .source_ids
        .iter()
        .map(|id| {
            s.source(id)
                .map(|src| src.mass_capacity)
                .ok_or_else(|| missing(&format!("source {id}")))
        })
        .collect::<Result<_>>()?;
    let m = forward_masses(k, &masses)?;
    let mut t = ResultTable::new(&["support", "mass"], name(s), &["linear-transfer"]);
    for (id, v) in k.support_ids.iter().zip(m) {
        t.push(vec![id.as_str().into(), v.into()]);
    }
    Ok(t)
}

fn solve(s: &Scenario) -> Result<ResultTable> {
    let k = s.transfer.as_ref().ok_or_else(|| missing("transfer matrix"))?;
    let target = s
        .target_support_masses
        .as_ref()
        .ok_or_else(|| missing("target_support_masses"))?;
    let sol = solve_sources(k, target)?;
    let mut t = ResultTable::new(
        &["source", "mass", "residual_norm"],
        name(s),
        &["linear-transfer-inverse"],
    );
    for (id, v) in k.source_ids.iter().zip(&sol.source_masses) {
        t.push(vec![id.as_str().into(), (*v).into(), sol.residual_norm.into()]);
    }
    Ok(t)
}

fn calibrate(s: &Scenario) -> Result<ResultTable> {
    let observations = s.observations.as_ref().ok_or_else(|| missing("observations"))?;
    let (support_ids, source_ids) = s.calibration_labels();
    let k = calibrate_matrix(observations, &source_ids, &support_ids, s.structure.as_deref())?;
    let mut columns = vec!["support"];
    columns.extend(k.source_ids.iter().map(String::as_str));
    let mut t = ResultTable::new(&columns, name(s), &["linear-transfer-calibration"]);
    for (id, row) in k.support_ids.iter().zip(&k.coefficients) {
        let mut cells: Vec<Cell> = vec![id.as_str().into()];
        cells.extend(row.iter().map(|&v| Cell::Number(v)));
        t.push(cells);
    }
    Ok(t)
}

fn fdi_rank(s: &Scenario, filter_negative: bool) -> Result<ResultTable> {
    let firm = s.firm.as_ref().ok_or_else(|| missing("firm"))?;
    let (locations, fluxes) = s.resolved_locations()?;
    let ranked = rank_locations(firm, &locations, &fluxes)?;
    let mut t = ResultTable::new(
        &[
            "rank",
            "location",
            "mode",
            "value",
            "required_velocity",
            "investment_mass",
            "effective_accommodation",
            "feasible",
        ],
        name(s),
        &[
            "investment-value",
            "transfer-velocity",
            "investment-mass",
            "condensation-threshold",
        ],
    );
    let kept = ranked.into_iter().filter(|r| !filter_negative || r.value >= 0.0);
    for (i, r) in kept.enumerate() {
        t.push(vec![
            (i + 1).into(),
            r.id.into(),
            r.mode.to_string().into(),
            r.value.into(),
            r.required_velocity.into(),
            r.investment_mass.into(),
            r.effective_accommodation.into(),
            r.feasible.into(),
        ]);
    }
    Ok(t)
}

fn fdi_velocity(s: &Scenario) -> Result<ResultTable> {
    let firm = s.firm.as_ref().ok_or_else(|| missing("firm"))?;
    let (locations, _) = s.resolved_locations()?;
    let mut t = ResultTable::new(
        &[
            "location",
            "distance_h",
            "attractiveness_density",
            "transfer_constant",
            "transfer_velocity",
            "investment_mass",
        ],
        name(s),
        &["transfer-velocity", "mass-from-thickness"],
    );
    for loc in &locations {
        let rho = loc.support.attractiveness_density;
        let h = loc.support.distance_h;
        let a0 = firm.transfer_constant_for(rho)?;
        let w = required_transfer_velocity(a0, firm.capacity, h);
        let m = mass_from_thickness(firm.proportionality_k, w, rho, h)?;
        t.push(vec![
            loc.id.as_str().into(),
            h.into(),
            rho.into(),
            a0.into(),
            w.into(),
            m.into(),
        ]);
    }
    Ok(t)
}
