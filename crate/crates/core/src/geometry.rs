//! Cosine-law distribution of evaporated mass over plane supports parallel
//! to the source plane.
//!
//! Thickness values are rates: cm deposited per second of evaporation at
//! total rate `w` (g/s). Multiply by a duration to get a thickness.

use crate::core_types::{Emission, SourceSpec, Substance, SupportSpec};
use crate::error::{Error, Result};
use crate::Scalar;

/// Angular emission law plus the total evaporated mass rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionGeometry<T> {
    pub kind: Emission,
    /// g/s
    pub total_rate_w: T,
}

/// Thickness rates sampled at lateral offsets on one support plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ThicknessProfile<T> {
    pub source_id: String,
    pub support_id: String,
    /// Normal source-to-plane distance, cm.
    pub distance_h: T,
    /// Lateral distances from the point above the source, cm.
    pub offsets: Vec<T>,
    /// cm/s
    pub thickness_rate: Vec<T>,
}

fn check_density_distance<T: Scalar>(rho: T, h: T) -> Result<()> {
    if !(rho.is_finite() && rho > T::zero()) {
        return Err(Error::InvalidInput(format!("density must be positive, got {rho}")));
    }
    if !(h.is_finite() && h > T::zero()) {
        return Err(Error::InvalidInput(format!("distance h must be positive, got {h}")));
    }
    Ok(())
}

/// Mass deposited per unit receiving area per unit time, g cm^-2 s^-1, on
/// an element at distance `r` whose normal makes angle `theta` with the
/// beam.
///
/// Point sources spread `w` over 4 pi steradians, plane sources over pi, so
/// the plane value is exactly four times the point value.
pub fn mass_flux<T: Scalar>(geometry: &EmissionGeometry<T>, theta: T, r: T) -> Result<T> {
    if !(r.is_finite() && r > T::zero()) {
        return Err(Error::InvalidInput(format!("distance r must be positive, got {r}")));
    }
    if !(theta >= T::zero() && theta <= T::frac_pi_2()) {
        return Err(Error::InvalidInput(format!(
            "angle theta must lie in [0, pi/2], got {theta}"
        )));
    }
    let w = geometry.total_rate_w;
    if !(w.is_finite() && w >= T::zero()) {
        return Err(Error::InvalidInput(format!(
            "total rate w must be non-negative, got {w}"
        )));
    }
    let solid = match geometry.kind {
        Emission::Point => T::lit(4.0) * T::pi(),
        Emission::Plane => T::pi(),
    };
    // cos(pi/2) is not exactly zero in floating point
    let cos = if theta == T::frac_pi_2() {
        T::zero()
    } else {
        theta.cos()
    };
    Ok(w * cos / (solid * r * r))
}

/// Thickness rate at the point above the source: `w / (pi rho h^2)`.
pub fn thickness_center<T: Scalar>(w: T, rho: T, h: T) -> Result<T> {
    check_density_distance(rho, h)?;
    if !(w.is_finite() && w >= T::zero()) {
        return Err(Error::InvalidInput(format!(
            "total rate w must be non-negative, got {w}"
        )));
    }
    Ok(w / (T::pi() * rho * h * h))
}

/// Thickness rate at lateral offset `x`: `w h / (pi rho (h^2 + x^2)^(3/2))`.
///
/// Evaluated as the centre value times `(h^2 / (h^2 + x^2))^(3/2)`, so at
/// `x = 0` it reproduces [`thickness_center`] bit for bit.
pub fn thickness_at_offset<T: Scalar>(w: T, rho: T, h: T, x: T) -> Result<T> {
    let center = thickness_center(w, rho, h)?;
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("offset x must be finite, got {x}")));
    }
    let h2 = h * h;
    let ratio = h2 / (h2 + x * x);
    Ok(center * ratio * ratio.sqrt())
}

/// Thickness rates along `offsets` on a plane at distance `h`.
pub fn profile_at_offsets<T: Scalar>(
    source_id: &str,
    support_id: &str,
    w: T,
    rho: T,
    h: T,
    offsets: &[T],
) -> Result<ThicknessProfile<T>> {
    let thickness_rate = offsets
        .iter()
        .map(|&x| thickness_at_offset(w, rho, h, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThicknessProfile {
        source_id: source_id.to_owned(),
        support_id: support_id.to_owned(),
        distance_h: h,
        offsets: offsets.to_vec(),
        thickness_rate,
    })
}

/// One single-point profile per support, at that support's own `(h, x)`.
///
/// The film density is the evaporant's. An empty support list gives an
/// empty result.
pub fn profile_over_supports<T: Scalar>(
    source: &SourceSpec<T>,
    geometry: &EmissionGeometry<T>,
    substance: &Substance<T>,
    supports: &[SupportSpec<T>],
) -> Result<Vec<ThicknessProfile<T>>> {
    supports
        .iter()
        .map(|s| {
            profile_at_offsets(
                &source.id,
                &s.id,
                geometry.total_rate_w,
                substance.density,
                s.distance_h,
                &[s.offset_x],
            )
        })
        .collect()
}

/// `sum rho d_i A_i`, g/s: the mass rate landing on a set of surface
/// elements, exact when thickness is constant over each element.
pub fn deposited_mass<T: Scalar>(profile: &ThicknessProfile<T>, rho: T, element_areas: &[T]) -> Result<T> {
    if profile.thickness_rate.len() != element_areas.len() {
        return Err(Error::InvalidInput(format!(
            "{} thickness samples but {} element areas",
            profile.thickness_rate.len(),
            element_areas.len()
        )));
    }
    if let Some(a) = element_areas.iter().find(|a| !(a.is_finite() && **a > T::zero())) {
        return Err(Error::InvalidInput(format!("element areas must be positive, got {a}")));
    }
    Ok(profile
        .thickness_rate
        .iter()
        .zip(element_areas)
        .fold(T::zero(), |acc, (&d, &a)| acc + rho * d * a))
}

/// A circular receiving disk on the plane at distance `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk<T> {
    /// Lateral distance of the disk centre from the point above the source.
    pub center_offset: T,
    pub radius: T,
}

/// Surface elements covering a [`Disk`] plus their thickness rates.
#[derive(Debug, Clone)]
pub struct DiskElements<T> {
    pub profile: ThicknessProfile<T>,
    pub areas: Vec<T>,
}

/// Polar grid over the disk: `rings` rings with edges `h sinh(k u)` (fine
/// near the centre, geometric growth far out) and `sectors` equal sectors.
/// Each element is sampled at its area-midpoint radius.
pub fn disk_elements<T: Scalar>(
    w: T,
    rho: T,
    h: T,
    disk: Disk<T>,
    rings: usize,
    sectors: usize,
) -> Result<DiskElements<T>> {
    check_density_distance(rho, h)?;
    if !(disk.radius.is_finite() && disk.radius > T::zero()) {
        return Err(Error::InvalidInput(format!(
            "disk radius must be positive, got {}",
            disk.radius
        )));
    }
    if rings == 0 || sectors == 0 {
        return Err(Error::InvalidInput(
            "disk grid needs at least one ring and one sector".into(),
        ));
    }
    let step = (disk.radius / h).asinh() / T::from_usize(rings).unwrap();
    let sector_angle = T::two_pi() / T::from_usize(sectors).unwrap();
    let half = T::lit(0.5);
    let c = disk.center_offset;

    let mut offsets = Vec::with_capacity(rings * sectors);
    let mut areas = Vec::with_capacity(rings * sectors);
    let mut inner = T::zero();
    for k in 1..=rings {
        let outer = if k == rings {
            disk.radius
        } else {
            h * (step * T::from_usize(k).unwrap()).sinh()
        };
        let mid = ((inner * inner + outer * outer) * half).sqrt();
        let area = T::pi() * (outer * outer - inner * inner) / T::from_usize(sectors).unwrap();
        for j in 0..sectors {
            let phi = (T::from_usize(j).unwrap() + half) * sector_angle;
            let x2 = c * c + mid * mid + T::lit(2.0) * c * mid * phi.cos();
            offsets.push(x2.max(T::zero()).sqrt());
            areas.push(area);
        }
        inner = outer;
    }
    let profile = profile_at_offsets("", "", w, rho, h, &offsets)?;
    Ok(DiskElements { profile, areas })
}

/// Result of [`disk_mass`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskMass<T> {
    /// g/s
    pub mass_rate: T,
    pub rings: usize,
    pub sectors: usize,
    /// Relative change against the previous refinement level.
    pub relative_change: T,
}

/// Mass rate landing on a disk, by tolerance-driven refinement of the
/// polar grid.
///
/// Rings are doubled at each level and successive midpoint estimates are
/// Richardson-extrapolated (the error is even in the ring width); refinement
/// stops once two extrapolated values agree within `rel_tol`. Centred disks
/// need a single sector since the profile is radial there.
pub fn disk_mass<T: Scalar>(w: T, rho: T, h: T, disk: Disk<T>, rel_tol: T) -> Result<DiskMass<T>> {
    let centred = disk.center_offset == T::zero();
    let max_rings = if centred { 1 << 20 } else { 1 << 10 };
    let sectors_for = |rings: usize| if centred { 1 } else { (2 * rings).max(16) };

    let estimate = |rings: usize| -> Result<T> {
        let e = disk_elements(w, rho, h, disk, rings, sectors_for(rings))?;
        deposited_mass(&e.profile, rho, &e.areas)
    };
    let three = T::lit(3.0);
    let four = T::lit(4.0);

    let mut rings = 8;
    let mut coarse = estimate(rings)?;
    let mut previous: Option<T> = None;
    loop {
        rings *= 2;
        let fine = estimate(rings)?;
        let extrapolated = (four * fine - coarse) / three;
        if let Some(prev) = previous {
            let change = if extrapolated == T::zero() {
                (extrapolated - prev).abs()
            } else {
                ((extrapolated - prev) / extrapolated).abs()
            };
            if change <= rel_tol {
                return Ok(DiskMass {
                    mass_rate: extrapolated,
                    rings,
                    sectors: sectors_for(rings),
                    relative_change: change,
                });
            }
            if rings >= max_rings {
                return Err(Error::NoConvergence(format!(
                    "disk quadrature reached {rings} rings with relative change {change} > {rel_tol}"
                )));
            }
        }
        previous = Some(extrapolated);
        coarse = fine;
    }
}
