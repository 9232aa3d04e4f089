//! Hand-derived reference values, evaluated independently at 50 digits by
//! `tests/oracle/golden_values.py` and frozen here at full oracle precision.
#![allow(clippy::excessive_precision, clippy::approx_constant)]

use std::f64::consts::PI;

use filmfdi::core_types::{Emission, SourceSpec, Substance, SupportSpec};
use filmfdi::fdi::{investment_mass, investment_value, mass_from_thickness, required_transfer_velocity, FirmProfile};
use filmfdi::geometry::{
    disk_mass, profile_over_supports, thickness_at_offset, thickness_center, Disk, EmissionGeometry,
};
use filmfdi::kinetics::{
    evaporation_rate, impingement_rate_kinetic, impingement_rate_pressure, mean_speed, residence_time,
};
use filmfdi::scenario::vapor_pressure_at;
use filmfdi::transfer::{calibrate_matrix, forward_masses, solve_sources, Observation, TransferMatrix};

pub const TOL: f64 = 1e-9;
pub const QUADRATURE_TOL: f64 = 1e-6;

pub struct Check {
    pub group: &'static str,
    pub name: String,
    pub got: f64,
    pub want: f64,
    pub tol: f64,
}

impl Check {
    /// Relative error, or absolute error against a reference of zero.
    pub fn relative_error(&self) -> f64 {
        let diff = (self.got - self.want).abs();
        if self.want == 0.0 {
            diff
        } else {
            diff / self.want.abs()
        }
    }

    pub fn passed(&self) -> bool {
        self.relative_error() <= self.tol
    }
}

fn ids(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn unit_substance() -> Substance<f64> {
    Substance {
        name: "unit".into(),
        molar_mass: 27.0,
        density: 1.0,
        desorption_energy: 0.0,
        vibration_period: 1e-14,
        vapor_pressure: vec![(1000.0, 1e-4), (1200.0, 1e-2)],
    }
}

fn support_at(id: &str, h: f64, x: f64) -> SupportSpec<f64> {
    SupportSpec {
        id: id.into(),
        distance_h: h,
        offset_x: x,
        temperature: 300.0,
        accommodation: 1.0,
        attractiveness_density: 1.0,
        critical_flux: 0.0,
        critical_temperature: 700.0,
        radius: None,
    }
}

struct Sink(Vec<Check>);

impl Sink {
    fn add(&mut self, group: &'static str, name: impl Into<String>, got: f64, want: f64) {
        self.add_tol(group, name, got, want, TOL);
    }

    fn add_tol(&mut self, group: &'static str, name: impl Into<String>, got: f64, want: f64, tol: f64) {
        self.0.push(Check {
            group,
            name: name.into(),
            got,
            want,
            tol,
        });
    }
}

/// Every frozen reference value with what the library computes for it.
/// Panics only if a call that must succeed returns an error.
pub fn checks() -> Vec<Check> {
    let mut s = Sink(Vec::new());

    s.add(
        "kinetics",
        "residence_time",
        residence_time(1e-14, 10000.0, 300.0).unwrap(),
        1.9301797296217743065e-7,
    );
    s.add(
        "kinetics",
        "kinetic_impingement",
        impingement_rate_kinetic(2.5e14, 4.74e4).unwrap(),
        2.9625e18,
    );
    s.add(
        "kinetics",
        "mean_speed",
        mean_speed(300.0, 4.65e-23).unwrap(),
        47627.07063541447912,
    );
    s.add(
        "kinetics",
        "pressure_impingement",
        impingement_rate_pressure(1.0, 1e-6, 28.0, 300.0).unwrap(),
        383299724199520.61769,
    );
    s.add(
        "kinetics",
        "evaporation",
        evaporation_rate(1.0, 1e-2, 27.0, 1400.0).unwrap(),
        0.000080962967725109625314,
    );
    s.add(
        "kinetics",
        "vapor_pressure",
        vapor_pressure_at(&unit_substance(), 1100.0).unwrap(),
        0.001,
    );

    s.add(
        "geometry",
        "thickness_at_offset x=0",
        thickness_at_offset(PI, 1.0, 10.0, 0.0).unwrap(),
        0.01,
    );
    s.add(
        "geometry",
        "thickness_center",
        thickness_center(PI, 1.0, 10.0).unwrap(),
        0.01,
    );
    s.add(
        "geometry",
        "thickness_at_offset x=h",
        thickness_at_offset(PI, 1.0, 10.0, 10.0).unwrap(),
        0.003535533905932737622,
    );

    let source = SourceSpec {
        id: "S".into(),
        substance: "unit".into(),
        mass_capacity: 1.0,
        emission: Emission::Point,
        temperature: 1100.0,
        evaporation_coefficient: 1.0,
        total_rate_w: Some(PI),
        emitting_area: None,
    };
    let geometry = EmissionGeometry {
        kind: Emission::Point,
        total_rate_w: PI,
    };
    let supports = [
        support_at("a", 10.0, 0.0),
        support_at("b", 10.0, 10.0),
        support_at("c", 10.0, 20.0),
    ];
    let profiles = profile_over_supports(&source, &geometry, &unit_substance(), &supports).unwrap();
    assert_eq!(profiles.len(), 3);
    for (p, want) in profiles
        .iter()
        .zip([0.01, 0.003535533905932737622, 0.00089442719099991587856])
    {
        s.add(
            "geometry",
            format!("layout support {}", p.support_id),
            p.thickness_rate[0],
            want,
        );
    }

    let disk = disk_mass(
        1.0,
        1.0,
        1.0,
        Disk {
            center_offset: 0.0,
            radius: 100.0,
        },
        1e-9,
    )
    .unwrap();
    s.add_tol(
        "geometry",
        "disk mass radius 100h",
        disk.mass_rate,
        1.9800009999250062495,
        QUADRATURE_TOL,
    );

    let k = TransferMatrix::new(ids("S", 2), ids("P", 2), vec![vec![0.5, 0.2], vec![0.1, 0.4]]).unwrap();
    let m = forward_masses(&k, &[10.0, 20.0]).unwrap();
    s.add("transfer", "forward[0]", m[0], 9.0);
    s.add("transfer", "forward[1]", m[1], 9.0);
    let sol = solve_sources(&k, &[9.0, 9.0]).unwrap();
    s.add("transfer", "solve[0]", sol.source_masses[0], 10.0);
    s.add("transfer", "solve[1]", sol.source_masses[1], 20.0);
    s.add_tol("transfer", "solve residual", sol.residual_norm, 0.0, TOL * 9.0);

    let column = TransferMatrix::new(ids("S", 1), ids("P", 2), vec![vec![1.0], vec![1.0]]).unwrap();
    let sol = solve_sources(&column, &[1.0, 3.0]).unwrap();
    s.add("transfer", "least squares mass", sol.source_masses[0], 2.0);
    s.add(
        "transfer",
        "least squares residual",
        sol.residual_norm,
        1.4142135623730950488,
    );

    let obs: Vec<Observation<f64>> = [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
        .iter()
        .map(|m| Observation {
            source_masses: m.to_vec(),
            support_masses: forward_masses(&k, m).unwrap(),
        })
        .collect();
    let fitted = calibrate_matrix(&obs, &k.source_ids, &k.support_ids, None).unwrap();
    for (i, (row, expected)) in fitted.coefficients.iter().zip(&k.coefficients).enumerate() {
        for (j, (a, b)) in row.iter().zip(expected).enumerate() {
            s.add_tol("transfer", format!("calibrated K[{i}][{j}]"), *a, *b, 1e-6);
        }
    }

    s.add("fdi", "investment_value", investment_value(12.5, 9.0), 3.5);
    let firm = FirmProfile {
        capacity: 80.0,
        allocation_fraction: 0.25,
        proportionality_k: 1.0,
        transfer_constant: None,
    };
    s.add("fdi", "investment_mass", investment_mass(&firm, 80.0), 20.0);
    s.add(
        "fdi",
        "mass_from_thickness",
        mass_from_thickness(2.0, PI, 1.0, 10.0).unwrap(),
        0.02,
    );
    s.add(
        "fdi",
        "required_transfer_velocity",
        required_transfer_velocity(0.01, 100.0, 3.0),
        9.0,
    );

    s.0
}
