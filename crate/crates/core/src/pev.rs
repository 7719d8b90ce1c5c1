//! PEV fleet power computations and fleet scheduling constraints.

use crate::model::{ConstraintKind, ModelError, ParkingLot, Tolerances, Violation};

/// Deliverable per-vehicle power for V2G, in MW: battery capacity times
/// departure state of charge times total efficiency, over a one-hour step
/// (kWh / 1000).
pub fn per_vehicle_power(lot: &ParkingLot) -> f64 {
    lot.pv_kwh * lot.delta * lot.eta / 1000.0
}

/// Aggregate fleet power for `n` connected vehicles, in MW.
pub fn fleet_power(lot: &ParkingLot, n: u32) -> Result<f64, ModelError> {
    if n > lot.fleet_size {
        return Err(ModelError::Invariant(format!(
            "lot {}: {} vehicles exceed the fleet size {}",
            lot.id, n, lot.fleet_size
        )));
    }
    Ok(n as f64 * per_vehicle_power(lot))
}

/// Checks the fleet scheduling constraints: the daily discharge total
/// equals the fleet size, the daily charge total likewise when grid
/// charging is enabled, and the hourly count bounds (including any
/// minimum-discharge profile baked into the lot bounds).
pub fn check_fleet_constraints(
    lots: &[ParkingLot],
    n_dsch: &[Vec<u32>],
    n_ch: &[Vec<u32>],
    tol: &Tolerances,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for (j, lot) in lots.iter().enumerate() {
        let horizon = lot.n_dsch_min.len();
        let dsch = &n_dsch[j];
        let ch = &n_ch[j];

        let total_allowed = tol.fleet_total_frac * lot.fleet_size as f64;
        let dsch_total: i64 = dsch.iter().map(|&n| n as i64).sum();
        let residual = (dsch_total - lot.fleet_size as i64).abs() as f64;
        if residual > total_allowed {
            out.push(Violation {
                kind: ConstraintKind::FleetTotalDsch,
                hour: 0,
                subject: lot.id.clone(),
                residual,
            });
        }
        if lot.grid_charging {
            let ch_total: i64 = ch.iter().map(|&n| n as i64).sum();
            let residual = (ch_total - lot.fleet_size as i64).abs() as f64;
            if residual > total_allowed {
                out.push(Violation {
                    kind: ConstraintKind::FleetTotalCh,
                    hour: 0,
                    subject: lot.id.clone(),
                    residual,
                });
            }
        }

        for t in 0..horizon.min(dsch.len()) {
            let n = dsch[t] as f64;
            let shortfall = (lot.n_dsch_min[t] as f64 - n).max(n - lot.n_dsch_max[t] as f64);
            if shortfall > tol.fleet_hourly {
                out.push(Violation {
                    kind: ConstraintKind::FleetHourlyDsch,
                    hour: t + 1,
                    subject: lot.id.clone(),
                    residual: shortfall,
                });
            }
        }
        if lot.grid_charging {
            for t in 0..horizon.min(ch.len()) {
                let n = ch[t] as f64;
                let shortfall = (lot.n_ch_min[t] as f64 - n).max(n - lot.n_ch_max[t] as f64);
                if shortfall > tol.fleet_hourly {
                    out.push(Violation {
                        kind: ConstraintKind::FleetHourlyCh,
                        hour: t + 1,
                        subject: lot.id.clone(),
                        residual: shortfall,
                    });
                }
            }
        }
    }
    out
}

/// The published 24-hour minimum-discharge profile, shipped as a CSV
/// fixture next to this crate.
pub fn table3_min_dsch_profile() -> Vec<u32> {
    parse_min_profile(include_str!("../data/table3_min_dsch.csv"))
        .expect("bundled minimum-discharge fixture is well-formed")
}

/// Parses a minimum-discharge profile CSV with a `hour,min_count` header.
pub fn parse_min_profile(text: &str) -> Result<Vec<u32>, ModelError> {
    let mut rows: Vec<(usize, u32)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if lineno == 0 && line.to_ascii_lowercase().starts_with("hour") {
            continue;
        }
        let mut parts = line.split(',');
        let hour: usize = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| {
                ModelError::Invariant(format!("minimum profile line {}: bad hour", lineno + 1))
            })?;
        let count: u32 = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| {
                ModelError::Invariant(format!("minimum profile line {}: bad count", lineno + 1))
            })?;
        rows.push((hour, count));
    }
    rows.sort_by_key(|&(h, _)| h);
    for (expect, &(h, _)) in rows.iter().enumerate() {
        if h != expect + 1 {
            return Err(ModelError::Invariant(format!(
                "minimum profile hours must run 1..{}, found {}",
                rows.len(),
                h
            )));
        }
    }
    Ok(rows.into_iter().map(|(_, c)| c).collect())
}
