//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs under `cargo test` (no libtest harness).

mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output};

use filmfdi::fdi::{
    mass_from_thickness, rank_locations, required_transfer_velocity, FdiLocation, FirmProfile, InvestmentMode,
};
use filmfdi::geometry::{disk_mass, thickness_at_offset, thickness_center, Disk};
use filmfdi::kinetics::{evaporation_rate, impingement_rate_pressure, residence_time};
use filmfdi::transfer::{calibrate_matrix, forward_masses, solve_sources, Observation, TransferMatrix};
use filmfdi::SupportSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn log_uniform(rng: &mut impl Rng, low: f64, high: f64) -> f64 {
    (rng.gen_range(low.ln()..high.ln())).exp()
}

fn ids(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn random_matrix(rng: &mut impl Rng, n: usize, p: usize) -> TransferMatrix<f64> {
    let rows = (0..n)
        .map(|_| (0..p).map(|_| rng.gen_range(0.0..1.0)).collect())
        .collect();
    TransferMatrix::new(ids("S", p), ids("P", n), rows).unwrap()
}

fn golden() -> Outcome {
    let checks = common::reference::checks();
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| format!("{}/{} (rel {:e})", c.group, c.name, c.relative_error()))
        .collect();
    if failed.is_empty() {
        Ok(format!("{} reference values", checks.len()))
    } else {
        Err(failed.join("; "))
    }
}

fn axis_consistency(rng: &mut ChaCha8Rng) -> Outcome {
    const CASES: usize = 1000;
    for _ in 0..CASES {
        let w = log_uniform(rng, 1e-6, 1e6);
        let rho = log_uniform(rng, 1e-2, 1e2);
        let h = log_uniform(rng, 1e-3, 1e4);
        let a = thickness_at_offset(w, rho, h, 0.0).map_err(|e| e.to_string())?;
        let b = thickness_center(w, rho, h).map_err(|e| e.to_string())?;
        if a.to_bits() != b.to_bits() {
            return Err(format!("w={w:e} rho={rho:e} h={h:e}: {a:e} != {b:e}"));
        }
    }
    Ok(format!("{CASES} triples bit-identical"))
}

fn disk_conservation(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let w = log_uniform(rng, 1e-3, 1e3);
        let rho = log_uniform(rng, 0.1, 20.0);
        let h = log_uniform(rng, 0.1, 100.0);
        let m = disk_mass(
            w,
            rho,
            h,
            Disk {
                center_offset: 0.0,
                radius: 100.0 * h,
            },
            1e-9,
        )
        .map_err(|e| e.to_string())?;
        let expected = 2.0 * w * (1.0 - h / (h * h + 1e4 * h * h).sqrt());
        let err = (m.mass_rate - expected).abs() / expected;
        worst = worst.max(err);
        if err > 1e-3 {
            return Err(format!(
                "w={w:e} rho={rho:e} h={h:e}: {:e} vs {expected:e}",
                m.mass_rate
            ));
        }
    }
    Ok(format!("10 disks, worst relative error {worst:.1e}"))
}

fn fdi_closure(rng: &mut ChaCha8Rng) -> Outcome {
    const CASES: usize = 2000;
    let mut worst = 0.0f64;
    for _ in 0..CASES {
        let firm = FirmProfile {
            capacity: log_uniform(rng, 1e-3, 1e9),
            allocation_fraction: rng.gen_range(1e-6..1.0),
            proportionality_k: log_uniform(rng, 1e-3, 1e3),
            transfer_constant: None,
        };
        let rho = log_uniform(rng, 1e-3, 1e3);
        let h = log_uniform(rng, 1e-3, 1e3);
        let a0 = firm.transfer_constant_for(rho).map_err(|e| e.to_string())?;
        let w = required_transfer_velocity(a0, firm.capacity, h);
        let m = mass_from_thickness(firm.proportionality_k, w, rho, h).map_err(|e| e.to_string())?;
        let want = firm.allocation_fraction * firm.capacity;
        let err = (m - want).abs() / want;
        worst = worst.max(err);
        if err > 1e-12 {
            return Err(format!("{firm:?} rho={rho:e} h={h:e}: {m:e} vs {want:e}"));
        }
    }
    Ok(format!("{CASES} cases, worst relative error {worst:.1e}"))
}

fn linear_round_trip(rng: &mut ChaCha8Rng) -> Outcome {
    const CASES: usize = 300;
    let mut worst = 0.0f64;
    for case in 0..CASES {
        let n = rng.gen_range(1..=16);
        let p = rng.gen_range(1..=16);
        let k = random_matrix(rng, n, p);
        let m: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..100.0)).collect();
        let target = forward_masses(&k, &m).map_err(|e| e.to_string())?;
        let solved = solve_sources(&k, &target).map_err(|e| format!("case {case}: {e}"))?;
        let image = forward_masses(&k, &solved.source_masses).map_err(|e| e.to_string())?;
        let norm = target.iter().map(|v| v * v).sum::<f64>().sqrt();
        let diff = image
            .iter()
            .zip(&target)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let err = diff / norm;
        worst = worst.max(err);
        if err > 1e-9 || solved.source_masses.iter().any(|v| *v < 0.0) {
            return Err(format!("case {case} ({n}x{p}): relative error {err:e}"));
        }
    }
    Ok(format!("{CASES} systems up to 16x16, worst relative error {worst:.1e}"))
}

fn calibration_recovery(rng: &mut ChaCha8Rng) -> Outcome {
    const CASES: usize = 200;
    let mut worst = 0.0f64;
    for case in 0..CASES {
        let n = rng.gen_range(1..=8);
        let p = rng.gen_range(1..=8);
        let k = random_matrix(rng, n, p);
        let count = p + rng.gen_range(0..=3);
        // a dominant diagonal block keeps the source masses spanning
        let obs: Vec<Observation<f64>> = (0..count)
            .map(|o| {
                let mut m: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..1.0)).collect();
                if o < p {
                    m[o] += 5.0;
                }
                Observation {
                    support_masses: forward_masses(&k, &m).unwrap(),
                    source_masses: m,
                }
            })
            .collect();
        let fitted =
            calibrate_matrix(&obs, &k.source_ids, &k.support_ids, None).map_err(|e| format!("case {case}: {e}"))?;
        let scale = k.coefficients.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = fitted
            .coefficients
            .iter()
            .flatten()
            .zip(k.coefficients.iter().flatten())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let err = diff / scale;
        worst = worst.max(err);
        if err > 1e-6 {
            return Err(format!("case {case} ({n}x{p}): relative error {err:e}"));
        }
    }
    Ok(format!(
        "{CASES} calibrations up to 8x8, worst relative error {worst:.1e}"
    ))
}

fn scaling_laws(rng: &mut ChaCha8Rng) -> Outcome {
    for _ in 0..1000 {
        let a0 = log_uniform(rng, 1e-6, 1e6);
        let capacity = log_uniform(rng, 1e-6, 1e9);
        let h = log_uniform(rng, 1e-3, 1e3);
        let (w1, w2) = (
            required_transfer_velocity(a0, capacity, h),
            required_transfer_velocity(a0, capacity, 2.0 * h),
        );
        if w2 != 4.0 * w1 {
            return Err(format!("w(2h)={w2:e} != 4 w(h)={:e}", 4.0 * w1));
        }

        let p = log_uniform(rng, 1e-9, 1.0);
        let alpha = rng.gen_range(0.01..0.5);
        let lambda = rng.gen_range(0.1..2.0);
        let molar = rng.gen_range(1.0..300.0);
        let t = rng.gen_range(100.0..3000.0);
        let linear = |f: &dyn Fn(f64, f64) -> f64| {
            let base = f(alpha, p);
            let rel = |v: f64| (v - lambda * base).abs() / (lambda * base);
            rel(f(alpha, lambda * p)).max(rel(f(lambda * alpha, p))) <= 1e-12
        };
        if !linear(&|a, p| impingement_rate_pressure(a, p, molar, t).unwrap()) {
            return Err(format!("impingement not linear at p={p:e} alpha={alpha}"));
        }
        if !linear(&|a, p| evaporation_rate(a, p, molar, t).unwrap()) {
            return Err(format!("evaporation not linear at p={p:e} alpha={alpha}"));
        }

        let tau = log_uniform(rng, 1e-15, 1e-12);
        let e = rng.gen_range(0.0..2e4);
        let t = rng.gen_range(100.0..2000.0);
        if residence_time(tau, e + 1.0, t).unwrap() <= residence_time(tau, e, t).unwrap() {
            return Err(format!("residence time not increasing at E_d={e}"));
        }
    }
    Ok("1000 draws of each law".into())
}

fn ranking_invariance(rng: &mut ChaCha8Rng) -> Outcome {
    const CASES: usize = 500;
    let firm = FirmProfile {
        capacity: 50.0,
        allocation_fraction: 0.4,
        proportionality_k: 1.5,
        transfer_constant: None,
    };
    let order = |locs: &[FdiLocation<f64>], fluxes: &[f64]| -> Result<Vec<String>, String> {
        Ok(rank_locations(&firm, locs, fluxes)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|r| r.id)
            .collect())
    };
    for case in 0..CASES {
        let count = rng.gen_range(1..=12);
        let mut locs = Vec::with_capacity(count);
        let mut fluxes = Vec::with_capacity(count);
        for i in 0..count {
            locs.push(FdiLocation {
                id: format!("L{i:02}"),
                support: SupportSpec {
                    id: format!("P{i}"),
                    distance_h: rng.gen_range(0.5..20.0),
                    offset_x: 0.0,
                    temperature: 300.0,
                    accommodation: rng.gen_range(0.0..1.0),
                    attractiveness_density: rng.gen_range(0.5..3.0),
                    critical_flux: 1.0,
                    critical_temperature: 600.0,
                    radius: None,
                },
                // small integers, so that ties occur and shifts stay exact
                expected_revenue: rng.gen_range(0..20) as f64,
                expected_cost: rng.gen_range(0..20) as f64,
                mode: if rng.gen_bool(0.3) {
                    InvestmentMode::JointVenture
                } else {
                    InvestmentMode::Greenfield
                },
                existing_base_mass: 0.0,
            });
            fluxes.push(rng.gen_range(0.0..3.0));
        }
        let base = order(&locs, &fluxes)?;

        let shift = rng.gen_range(-1000..1000) as f64;
        let shifted: Vec<FdiLocation<f64>> = locs
            .iter()
            .map(|l| FdiLocation {
                expected_revenue: l.expected_revenue + shift,
                expected_cost: l.expected_cost + shift,
                ..l.clone()
            })
            .collect();
        if order(&shifted, &fluxes)? != base {
            return Err(format!("case {case}: order changed under shift {shift}"));
        }

        let mut perm: Vec<usize> = (0..count).collect();
        for i in (1..count).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let l2: Vec<_> = perm.iter().map(|&i| locs[i].clone()).collect();
        let f2: Vec<_> = perm.iter().map(|&i| fluxes[i]).collect();
        if order(&l2, &f2)? != base {
            return Err(format!("case {case}: order changed under permutation {perm:?}"));
        }
    }
    Ok(format!("{CASES} location sets shifted and permuted"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn filmfdi(args: &[&str]) -> Result<Output, String> {
    Command::new(env!("CARGO_BIN_EXE_filmfdi"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())
}

fn cli_determinism() -> Outcome {
    let runs: [(&str, &str, &[&str]); 9] = [
        ("rates", "aluminium.json", &[]),
        ("profile", "point_source_layout.json", &["--offsets", "-20,-5,0,5,20"]),
        ("mass", "point_source_layout.json", &[]),
        ("forward", "transfer.json", &[]),
        ("solve", "transfer.json", &[]),
        ("calibrate", "transfer.json", &[]),
        ("fdi-rank", "fdi_sites.json", &[]),
        ("fdi-rank", "fdi_sites.json", &["--filter-negative-value"]),
        ("fdi-velocity", "fdi_sites.json", &[]),
    ];
    for (sub, file, extra) in runs {
        let path = scenario(file);
        let mut args = vec![sub, "--scenario", path.to_str().unwrap()];
        args.extend_from_slice(extra);
        let a = filmfdi(&args)?;
        let b = filmfdi(&args)?;
        if a.status.code() != Some(0) || a.stdout.is_empty() {
            return Err(format!(
                "{sub} on {file}: {}",
                String::from_utf8_lossy(&a.stderr).trim()
            ));
        }
        if a.stdout != b.stdout {
            return Err(format!("{sub} on {file}: output differs between runs"));
        }
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let base = std::fs::read_to_string(scenario("transfer.json")).map_err(|e| e.to_string())?;
    let write = |name: &str, text: String| -> Result<String, String> {
        let path = dir.path().join(name);
        std::fs::write(&path, text).map_err(|e| e.to_string())?;
        Ok(path.to_str().unwrap().to_owned())
    };
    let observations = base.find("\"observations\"").unwrap();
    let invalid = write(
        "invalid.json",
        base.replacen("\"distance_h\": 10", "\"distance_h\": -1", 1),
    )?;
    let dangling = write(
        "dangling.json",
        base.replace("\"substance\": \"Si\"", "\"substance\": \"Al\""),
    )?;
    let malformed = write("malformed.json", base[..base.len() / 2].to_owned())?;
    let underdetermined = write(
        "underdetermined.json",
        format!(
            "{}\"observations\": [{{\"source_masses\": [1, 1], \"support_masses\": [0.7, 0.5]}}]\n}}\n",
            &base[..observations]
        ),
    )?;
    let zero = write(
        "zero.json",
        base.replace("[[0.5, 0.2], [0.1, 0.4]]", "[[0, 0], [0, 0]]"),
    )?;
    let missing = dir.path().join("missing.json").to_str().unwrap().to_owned();
    let transfer = scenario("transfer.json").to_str().unwrap().to_owned();

    let expectations: [(&str, Vec<&str>, i32); 11] = [
        ("no subcommand", vec![], 1),
        ("unknown subcommand", vec!["bogus"], 1),
        ("missing --scenario", vec!["solve"], 1),
        ("missing --offsets", vec!["profile", "--scenario", &transfer], 1),
        ("validation error", vec!["forward", "--scenario", &invalid], 2),
        ("dangling reference", vec!["forward", "--scenario", &dangling], 2),
        ("malformed JSON", vec!["forward", "--scenario", &malformed], 2),
        ("unreadable file", vec!["forward", "--scenario", &missing], 2),
        ("missing section", vec!["fdi-rank", "--scenario", &transfer], 2),
        (
            "under-determined calibration",
            vec!["calibrate", "--scenario", &underdetermined],
            3,
        ),
        ("all-zero transfer matrix", vec!["solve", "--scenario", &zero], 3),
    ];
    for (label, args, want) in &expectations {
        let o = filmfdi(args)?;
        if o.status.code() != Some(*want) {
            return Err(format!("{label}: exit {:?}, expected {want}", o.status.code()));
        }
        if !o.stdout.is_empty() {
            return Err(format!("{label}: wrote to stdout on failure"));
        }
    }
    Ok(format!(
        "{} runs byte-identical, {} error paths",
        runs.len(),
        expectations.len()
    ))
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f11d);
    let results: Vec<(&str, Outcome)> = vec![
        ("golden reference values", golden()),
        ("centre thickness equals on-axis profile", axis_consistency(&mut rng)),
        ("disk quadrature conserves mass", disk_conservation(&mut rng)),
        ("investment velocity/mass closure", fdi_closure(&mut rng)),
        ("transfer solve round trip", linear_round_trip(&mut rng)),
        ("calibration exact recovery", calibration_recovery(&mut rng)),
        ("scaling laws", scaling_laws(&mut rng)),
        ("ranking determinism and invariance", ranking_invariance(&mut rng)),
        ("CLI determinism and exit statuses", cli_determinism()),
    ];
    let mut failures = 0;
    for (i, (label, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("PASS {}. {label}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {}. {label}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", results.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
