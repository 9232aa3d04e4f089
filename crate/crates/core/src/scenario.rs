//! Scenario files: strict versioned JSON in, cross-referenced and validated
//! domain data out.
//!
//! A scenario is always `f64`. Unknown keys anywhere in the document are
//! rejected, and so are unit annotations: all quantities are in the fixed
//! CGS/torr/kelvin system.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::core_types::{join_path, Checker, SourceSpec, Substance, SupportSpec, Validate, Violation};
use crate::error::{Error, Result};
use crate::fdi::{FdiLocation, FirmProfile, InvestmentMode};
use crate::geometry::{mass_flux, EmissionGeometry};
use crate::kinetics::evaporation_rate;
use crate::transfer::{Observation, TransferMatrix};
use crate::Scalar;

/// The only schema version understood.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

/// A location as written in a scenario file: the support is referenced by
/// id and the incident flux reaching it is given directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocationRecord {
    pub id: String,
    /// Id of a support in the same scenario.
    pub support: String,
    pub expected_revenue: f64,
    pub expected_cost: f64,
    pub mode: InvestmentMode,
    #[serde(default)]
    pub existing_base_mass: f64,
    /// Raw flux reaching the location, before accommodation.
    pub incident_flux: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    #[serde(default)]
    pub meta: Meta,
    #[serde(default)]
    pub substances: Vec<Substance<f64>>,
    #[serde(default)]
    pub sources: Vec<SourceSpec<f64>>,
    #[serde(default)]
    pub supports: Vec<SupportSpec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transfer: Option<TransferMatrix<f64>>,
    /// Target support masses for the inverse problem, aligned with
    /// `transfer.support_ids`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_support_masses: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observations: Option<Vec<Observation<f64>>>,
    /// Calibration zero pattern: `false` pins a coefficient to zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<Vec<Vec<bool>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub firm: Option<FirmProfile<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locations: Option<Vec<LocationRecord>>,
}

/// Reads, parses, cross-references and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Scenario::from_json_str(&text)
}

impl Scenario {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let scenario: Scenario = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        scenario.check_references()?;
        let violations = scenario.validate();
        if violations.is_empty() {
            Ok(scenario)
        } else {
            Err(Error::Validation(violations))
        }
    }

    /// Canonical pretty-printed JSON; loading it back yields an equal
    /// scenario.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    fn check_references(&self) -> Result<()> {
        let substances: HashSet<&str> = self.substances.iter().map(|s| s.name.as_str()).collect();
        let sources: HashSet<&str> = self.sources.iter().map(|s| s.id.as_str()).collect();
        let supports: HashSet<&str> = self.supports.iter().map(|s| s.id.as_str()).collect();

        let missing = |known: &HashSet<&str>, wanted: &mut dyn Iterator<Item = &String>| -> Vec<String> {
            let set: BTreeSet<String> = wanted.filter(|id| !known.contains(id.as_str())).cloned().collect();
            set.into_iter().collect()
        };

        let ids = missing(&substances, &mut self.sources.iter().map(|s| &s.substance));
        if !ids.is_empty() {
            return Err(Error::DanglingReference { kind: "substance", ids });
        }
        let mut wanted_sources = self.transfer.iter().flat_map(|t| t.source_ids.iter());
        let ids = missing(&sources, &mut wanted_sources);
        if !ids.is_empty() {
            return Err(Error::DanglingReference { kind: "source", ids });
        }
        let mut wanted_supports = self
            .transfer
            .iter()
            .flat_map(|t| t.support_ids.iter())
            .chain(self.locations.iter().flatten().map(|l| &l.support));
        let ids = missing(&supports, &mut wanted_supports);
        if !ids.is_empty() {
            return Err(Error::DanglingReference { kind: "support", ids });
        }
        Ok(())
    }

    pub fn substance(&self, name: &str) -> Option<&Substance<f64>> {
        self.substances.iter().find(|s| s.name == name)
    }

    pub fn source(&self, id: &str) -> Option<&SourceSpec<f64>> {
        self.sources.iter().find(|s| s.id == id)
    }

    pub fn support(&self, id: &str) -> Option<&SupportSpec<f64>> {
        self.supports.iter().find(|s| s.id == id)
    }

    /// Substance evaporated by `source`; references are checked on load.
    pub fn substance_of(&self, source: &SourceSpec<f64>) -> Result<&Substance<f64>> {
        self.substance(&source.substance)
            .ok_or_else(|| Error::DanglingReference {
                kind: "substance",
                ids: vec![source.substance.clone()],
            })
    }

    /// Total evaporated mass rate of a source, g/s: the explicit
    /// `total_rate_w`, else the Langmuir rate at the source temperature
    /// times `emitting_area`.
    pub fn source_rate(&self, source: &SourceSpec<f64>) -> Result<f64> {
        if let Some(w) = source.total_rate_w {
            return Ok(w);
        }
        let Some(area) = source.emitting_area else {
            return Err(Error::InvalidInput(format!(
                "source {} has neither total_rate_w nor emitting_area",
                source.id
            )));
        };
        let substance = self.substance_of(source)?;
        let pv = vapor_pressure_at(substance, source.temperature)?;
        Ok(evaporation_rate(
            source.evaporation_coefficient,
            pv,
            substance.molar_mass,
            source.temperature,
        )? * area)
    }

    pub fn emission_geometry(&self, source: &SourceSpec<f64>) -> Result<EmissionGeometry<f64>> {
        Ok(EmissionGeometry {
            kind: source.emission,
            total_rate_w: self.source_rate(source)?,
        })
    }

    /// Locations joined with their supports, plus the aligned incident
    /// fluxes.
    pub fn resolved_locations(&self) -> Result<(Vec<FdiLocation<f64>>, Vec<f64>)> {
        let mut locations = Vec::new();
        let mut fluxes = Vec::new();
        for rec in self.locations.iter().flatten() {
            let support = self.support(&rec.support).ok_or_else(|| Error::DanglingReference {
                kind: "support",
                ids: vec![rec.support.clone()],
            })?;
            locations.push(resolve(rec, support));
            fluxes.push(rec.incident_flux);
        }
        Ok((locations, fluxes))
    }
}

fn resolve(rec: &LocationRecord, support: &SupportSpec<f64>) -> FdiLocation<f64> {
    FdiLocation {
        id: rec.id.clone(),
        support: support.clone(),
        expected_revenue: rec.expected_revenue,
        expected_cost: rec.expected_cost,
        mode: rec.mode,
        existing_base_mass: rec.existing_base_mass,
    }
}

fn unique_ids<'a>(c: &mut Checker<'_>, field: &str, ids: impl Iterator<Item = &'a str>) {
    let mut seen = HashSet::new();
    for (i, id) in ids.enumerate() {
        c.require(&format!("{field}[{i}]"), seen.insert(id), "ids unique", id);
    }
}

impl Validate for Scenario {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        {
            let mut c = Checker { path, out: &mut *out };
            c.require("version", self.version == SCHEMA_VERSION, "version = 1", self.version);
            unique_ids(&mut c, "substances", self.substances.iter().map(|s| s.name.as_str()));
            unique_ids(&mut c, "sources", self.sources.iter().map(|s| s.id.as_str()));
            unique_ids(&mut c, "supports", self.supports.iter().map(|s| s.id.as_str()));
            if let Some(locs) = &self.locations {
                unique_ids(&mut c, "locations", locs.iter().map(|l| l.id.as_str()));
            }
        }
        self.substances.collect_violations(&join_path(path, "substances"), out);
        self.sources.collect_violations(&join_path(path, "sources"), out);
        self.supports.collect_violations(&join_path(path, "supports"), out);

        if let Some(t) = &self.transfer {
            t.collect_violations(&join_path(path, "transfer"), out);
            if let Some(target) = &self.target_support_masses {
                let mut c = Checker { path, out: &mut *out };
                c.require(
                    "target_support_masses",
                    target.len() == t.support_ids.len(),
                    "one target per transfer support",
                    format!("{} targets for {} supports", target.len(), t.support_ids.len()),
                );
                for (i, &m) in target.iter().enumerate() {
                    c.number(
                        &format!("target_support_masses[{i}]"),
                        m,
                        |v| v >= 0.0,
                        "target mass >= 0",
                    );
                }
            }
        } else if self.target_support_masses.is_some() {
            out.push(Violation {
                path: join_path(path, "target_support_masses"),
                rule: "requires a transfer matrix".into(),
                value: "no transfer".into(),
            });
        }

        if let Some(obs) = &self.observations {
            let (n, p) = self.calibration_shape();
            for (o, ob) in obs.iter().enumerate() {
                let p_obs = join_path(path, &format!("observations[{o}]"));
                ob.check_dimensions(&p_obs, n, p, out);
                ob.collect_violations(&p_obs, out);
            }
        }
        if let Some(mask) = &self.structure {
            let (n, p) = self.calibration_shape();
            let mut c = Checker { path, out: &mut *out };
            c.require(
                "structure",
                mask.len() == n,
                "one row per support",
                format!("{} rows for {n}", mask.len()),
            );
            for (i, row) in mask.iter().enumerate() {
                c.require(
                    &format!("structure[{i}]"),
                    row.len() == p,
                    "one flag per source",
                    format!("{} flags for {p}", row.len()),
                );
            }
        }

        if let Some(firm) = &self.firm {
            firm.collect_violations(&join_path(path, "firm"), out);
        }
        let supports: HashMap<&str, &SupportSpec<f64>> = self.supports.iter().map(|s| (s.id.as_str(), s)).collect();
        for (i, rec) in self.locations.iter().flatten().enumerate() {
            let p_loc = join_path(path, &format!("locations[{i}]"));
            if let Some(support) = supports.get(rec.support.as_str()) {
                // support fields are reported under `supports`
                let mut v = Vec::new();
                resolve(rec, support).collect_violations(&p_loc, &mut v);
                out.extend(
                    v.into_iter()
                        .filter(|v| !v.path.starts_with(&join_path(&p_loc, "support."))),
                );
            }
            let mut c = Checker {
                path: &p_loc,
                out: &mut *out,
            };
            c.number("incident_flux", rec.incident_flux, |v| v >= 0.0, "incident_flux >= 0");
        }
    }
}

impl Scenario {
    /// `(n supports, p sources)` used by calibration: the transfer matrix
    /// labels when present, else every support and source in file order.
    pub fn calibration_shape(&self) -> (usize, usize) {
        let (supports, sources) = self.calibration_labels();
        (supports.len(), sources.len())
    }

    /// `(support ids, source ids)` for calibration.
    pub fn calibration_labels(&self) -> (Vec<String>, Vec<String>) {
        match &self.transfer {
            Some(t) => (t.support_ids.clone(), t.source_ids.clone()),
            None => (
                self.supports.iter().map(|s| s.id.clone()).collect(),
                self.sources.iter().map(|s| s.id.clone()).collect(),
            ),
        }
    }
}

/// Saturated vapor pressure at `temperature`, torr, by linear
/// interpolation of `ln p` in `T` between bracketing table points. Exact
/// at table points; no extrapolation.
pub fn vapor_pressure_at<T: Scalar>(substance: &Substance<T>, temperature: T) -> Result<T> {
    let table = &substance.vapor_pressure;
    let (Some(first), Some(last)) = (table.first(), table.last()) else {
        return Err(Error::InvalidInput(format!(
            "substance {} has no vapor-pressure table",
            substance.name
        )));
    };
    if !(temperature >= first.0 && temperature <= last.0) {
        return Err(Error::OutOfRange {
            quantity: format!("temperature for {} vapor pressure", substance.name),
            value: temperature.as_f64(),
            low: first.0.as_f64(),
            high: last.0.as_f64(),
        });
    }
    if let Some(&(_, p)) = table.iter().find(|(t, _)| *t == temperature) {
        return Ok(p);
    }
    let upper = table
        .iter()
        .position(|(t, _)| *t > temperature)
        .expect("temperature inside span");
    let (t0, p0) = table[upper - 1];
    let (t1, p1) = table[upper];
    let f = (temperature - t0) / (t1 - t0);
    Ok((p0.ln() + f * (p1.ln() - p0.ln())).exp())
}

/// Number flux reaching a support from a source, cm^-2 s^-1: the source's
/// mass flux at the support's offset divided by the molecular mass.
pub fn incident_number_flux(
    geometry: &EmissionGeometry<f64>,
    substance: &Substance<f64>,
    support: &SupportSpec<f64>,
) -> Result<f64> {
    let h = support.distance_h;
    let x = support.offset_x.abs();
    let r = h.hypot(x);
    let theta = (x / h).atan();
    Ok(mass_flux(geometry, theta, r)? / substance.molecular_mass())
}
