//! Linear coupling between `p` sources and `n` supports, `m = K M`, with
//! its non-negative inverse and row-wise calibration of `K` from
//! observations.
//!
//! `n` always counts supports (rows), `p` sources (columns).

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::core_types::{join_path, Checker, Validate, Violation};
use crate::error::{Error, Result};
use crate::nnls::{nnls, numerical_rank};
use crate::Scalar;

/// Coefficients `k_ij >= 0` coupling source `j` to support `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferMatrix<T> {
    pub source_ids: Vec<String>,
    pub support_ids: Vec<String>,
    /// Row-major, `n` rows of `p` coefficients.
    pub coefficients: Vec<Vec<T>>,
}

/// One paired measurement of source and support masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Observation<T> {
    pub source_masses: Vec<T>,
    pub support_masses: Vec<T>,
}

impl<T: Scalar> TransferMatrix<T> {
    /// Builds a matrix after checking shape and invariants.
    pub fn new(source_ids: Vec<String>, support_ids: Vec<String>, coefficients: Vec<Vec<T>>) -> Result<Self> {
        let k = Self {
            source_ids,
            support_ids,
            coefficients,
        };
        let violations = k.validate();
        if violations.is_empty() {
            Ok(k)
        } else {
            Err(Error::Validation(violations))
        }
    }

    pub fn n_supports(&self) -> usize {
        self.support_ids.len()
    }

    pub fn n_sources(&self) -> usize {
        self.source_ids.len()
    }

    pub fn to_matrix(&self) -> DMatrix<T> {
        DMatrix::from_fn(self.n_supports(), self.n_sources(), |i, j| self.coefficients[i][j])
    }

    fn from_matrix(source_ids: Vec<String>, support_ids: Vec<String>, k: &DMatrix<T>) -> Self {
        let coefficients = (0..k.nrows()).map(|i| k.row(i).iter().copied().collect()).collect();
        Self {
            source_ids,
            support_ids,
            coefficients,
        }
    }
}

fn check_ids(c: &mut Checker<'_>, field: &str, ids: &[String]) {
    let mut seen = HashSet::new();
    for (i, id) in ids.iter().enumerate() {
        c.require(&format!("{field}[{i}]"), !id.is_empty(), "id non-empty", "\"\"");
        c.require(&format!("{field}[{i}]"), seen.insert(id.as_str()), "ids unique", id);
    }
}

impl<T: Scalar> Validate for TransferMatrix<T> {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        let mut c = Checker { path, out };
        check_ids(&mut c, "source_ids", &self.source_ids);
        check_ids(&mut c, "support_ids", &self.support_ids);
        c.require(
            "coefficients",
            self.coefficients.len() == self.support_ids.len(),
            "one coefficient row per support",
            format!(
                "{} rows for {} supports",
                self.coefficients.len(),
                self.support_ids.len()
            ),
        );
        for (i, row) in self.coefficients.iter().enumerate() {
            c.require(
                &format!("coefficients[{i}]"),
                row.len() == self.source_ids.len(),
                "one coefficient per source",
                format!("{} entries for {} sources", row.len(), self.source_ids.len()),
            );
            for (j, &k) in row.iter().enumerate() {
                c.number(&format!("coefficients[{i}][{j}]"), k, |v| v >= T::zero(), "k_ij >= 0");
            }
        }
    }
}

impl<T: Scalar> Validate for Observation<T> {
    fn collect_violations(&self, path: &str, out: &mut Vec<Violation>) {
        let mut c = Checker { path, out };
        for (j, &m) in self.source_masses.iter().enumerate() {
            c.number(
                &format!("source_masses[{j}]"),
                m,
                |v| v >= T::zero(),
                "source mass >= 0",
            );
        }
        for (i, &m) in self.support_masses.iter().enumerate() {
            c.number(
                &format!("support_masses[{i}]"),
                m,
                |v| v >= T::zero(),
                "support mass >= 0",
            );
        }
    }
}

impl<T: Scalar> Observation<T> {
    /// Shape check against an `n x p` system.
    pub fn check_dimensions(&self, path: &str, n: usize, p: usize, out: &mut Vec<Violation>) {
        let mut c = Checker { path, out };
        c.require(
            "source_masses",
            self.source_masses.len() == p,
            "one mass per source",
            format!("{} entries for {p} sources", self.source_masses.len()),
        );
        c.require(
            "support_masses",
            self.support_masses.len() == n,
            "one mass per support",
            format!("{} entries for {n} supports", self.support_masses.len()),
        );
    }
}

fn non_negative_vector<T: Scalar>(name: &str, v: &[T]) -> Result<()> {
    match v.iter().position(|x| !(x.is_finite() && *x >= T::zero())) {
        Some(i) => Err(Error::InvalidInput(format!(
            "{name}[{i}] must be non-negative, got {}",
            v[i]
        ))),
        None => Ok(()),
    }
}

/// `m_i = sum_j k_ij M_j`, summed in source order.
pub fn forward_masses<T: Scalar>(k: &TransferMatrix<T>, source_masses: &[T]) -> Result<Vec<T>> {
    if source_masses.len() != k.n_sources() {
        return Err(Error::DimensionMismatch(format!(
            "{} source masses for a matrix with {} sources",
            source_masses.len(),
            k.n_sources()
        )));
    }
    non_negative_vector("source mass", source_masses)?;
    Ok(k.coefficients
        .iter()
        .map(|row| {
            row.iter()
                .zip(source_masses)
                .fold(T::zero(), |acc, (&kij, &mj)| acc + kij * mj)
        })
        .collect())
}

/// Source masses reproducing a support-mass target as closely as possible.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSolution<T> {
    pub source_masses: Vec<T>,
    /// `||K M - m_target||_2`
    pub residual_norm: T,
    pub kkt_residual: T,
}

/// Non-negative least-squares inverse of [`forward_masses`].
pub fn solve_sources<T: Scalar>(k: &TransferMatrix<T>, target: &[T]) -> Result<SourceSolution<T>> {
    if target.len() != k.n_supports() {
        return Err(Error::DimensionMismatch(format!(
            "{} target masses for a matrix with {} supports",
            target.len(),
            k.n_supports()
        )));
    }
    non_negative_vector("target mass", target)?;
    if k.n_sources() == 0 || k.n_supports() == 0 {
        return Err(Error::NoInformation);
    }
    let s = nnls(&k.to_matrix(), &DVector::from_column_slice(target))?;
    Ok(SourceSolution {
        source_masses: s.x.iter().copied().collect(),
        residual_norm: s.residual_norm,
        kkt_residual: s.kkt_residual,
    })
}

/// Fits `K >= 0` to observations, one independent non-negative
/// least-squares problem per support row.
///
/// `structure[i][j] == false` pins `k_ij` to zero. A row whose free
/// columns are not spanned by the observed source-mass vectors is
/// under-determined; all such rows are reported together.
pub fn calibrate_matrix<T: Scalar>(
    observations: &[Observation<T>],
    source_ids: &[String],
    support_ids: &[String],
    structure: Option<&[Vec<bool>]>,
) -> Result<TransferMatrix<T>> {
    let (n, p) = (support_ids.len(), source_ids.len());
    let mut violations = Vec::new();
    for (o, obs) in observations.iter().enumerate() {
        let path = join_path("observations", &format!("[{o}]"));
        obs.check_dimensions(&path, n, p, &mut violations);
        obs.collect_violations(&path, &mut violations);
    }
    if let Some(mask) = structure {
        let mut c = Checker {
            path: "structure",
            out: &mut violations,
        };
        c.require(
            "",
            mask.len() == n,
            "one row per support",
            format!("{} rows", mask.len()),
        );
        for (i, row) in mask.iter().enumerate() {
            c.require(
                &format!("[{i}]"),
                row.len() == p,
                "one flag per source",
                format!("{} flags", row.len()),
            );
        }
    }
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }

    let design = DMatrix::from_fn(observations.len(), p, |o, j| observations[o].source_masses[j]);
    let rank_tol = T::default_epsilon().sqrt();

    let mut rows = Vec::with_capacity(n);
    let mut deficient = Vec::new();
    for i in 0..n {
        let free: Vec<usize> = (0..p).filter(|&j| structure.is_none_or(|m| m[i][j])).collect();
        if free.is_empty() {
            rows.push(None);
            continue;
        }
        let sub = design.select_columns(&free);
        if observations.len() < free.len() || numerical_rank(&sub, rank_tol) < free.len() {
            deficient.push(support_ids[i].clone());
            continue;
        }
        rows.push(Some((free, sub)));
    }
    if !deficient.is_empty() {
        return Err(Error::Underdetermined { rows: deficient });
    }

    let mut k = DMatrix::<T>::zeros(n, p);
    for (i, row) in rows.into_iter().enumerate() {
        let Some((free, sub)) = row else { continue };
        let target = DVector::from_fn(observations.len(), |o, _| observations[o].support_masses[i]);
        if target.iter().all(|v| *v == T::zero()) {
            continue;
        }
        let s = nnls(&sub, &target)?;
        for (c, &j) in free.iter().enumerate() {
            k[(i, j)] = s.x[c];
        }
    }
    Ok(TransferMatrix::from_matrix(
        source_ids.to_vec(),
        support_ids.to_vec(),
        &k,
    ))
}
