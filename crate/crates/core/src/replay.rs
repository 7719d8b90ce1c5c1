//! Dispatch-table replay: reconstructs demand from a table's own row
//! sums, rebuilds the schedule and validates it against the full
//! constraint set, plus column-consistency checks on the reported V2G
//! power.

use crate::io::DispatchTable;
use crate::model::{validate_schedule, System, Tolerances, ViolationReport};
use crate::pev;
use crate::scenario::{apply_scenario, MinDischargeSource, ScenarioConfig, ScenarioKind};
use crate::{io, model};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToleranceProfile {
    /// Tight tolerances for solver-produced dispatches.
    Solver,
    /// Loose tolerances for replaying the published tables.
    PaperReplay,
}

impl ToleranceProfile {
    pub fn tolerances(self) -> Tolerances {
        match self {
            ToleranceProfile::Solver => Tolerances::solver(),
            ToleranceProfile::PaperReplay => Tolerances::paper_replay(),
        }
    }
}

#[derive(Debug)]
pub struct DispatchValidation {
    pub scenario: ScenarioKind,
    pub report: ViolationReport,
    /// CSV-level inconsistencies (reported V2G power vs count times
    /// per-vehicle power).
    pub column_issues: Vec<String>,
}

impl DispatchValidation {
    pub fn passed(&self) -> bool {
        self.report.is_feasible() && self.column_issues.is_empty()
    }
}

/// Validates a dispatch table against a system. The scenario is inferred
/// from the table schema: charge columns mean scenario 3, discharge-only
/// means scenario 2 (with the published minimum-discharge profile on a
/// 24-hour horizon), no lot columns means scenario 1.
pub fn validate_dispatch(
    system: &System,
    table: &DispatchTable,
    profile: ToleranceProfile,
) -> Result<DispatchValidation, io::IoError> {
    let scenario = if table.lot_ids.is_empty() {
        ScenarioKind::S1
    } else if table.has_charging {
        ScenarioKind::S3
    } else {
        ScenarioKind::S2
    };
    let demand = model::derive_demand_from_dispatch(&table.to_dispatch_numbers(), 0.10)?;
    let mut config = ScenarioConfig::new(scenario);
    if scenario == ScenarioKind::S2 && demand.horizon() != 24 {
        config.min_dsch = MinDischargeSource::None;
    }
    let scoped = apply_scenario(system, &config, demand.horizon())?;
    let solution = io::schedule_from_dispatch(&scoped, table)?;
    let tol = profile.tolerances();
    let report = validate_schedule(&scoped, &demand, &solution, &tol);

    let mut column_issues = Vec::new();
    for (k, lot_id) in table.lot_ids.iter().enumerate() {
        let lot = match scoped.lots.iter().find(|l| l.id == *lot_id) {
            Some(l) => l,
            None => continue,
        };
        let kappa = pev::per_vehicle_power(lot);
        for row in &table.rows {
            let expect = row.n_dsch[k] as f64 * kappa;
            if (row.pv2g[k] - expect).abs() > tol.pv2g_mw {
                column_issues.push(format!(
                    "hour {}: pv2g_{} = {} MW but {} vehicles deliver {:.3} MW",
                    row.hour, lot_id, row.pv2g[k], row.n_dsch[k], expect
                ));
            }
            if table.has_charging {
                let expect = row.n_ch[k] as f64 * kappa;
                if (row.pg2v[k] - expect).abs() > tol.pv2g_mw {
                    column_issues.push(format!(
                        "hour {}: pg2v_{} = {} MW but {} vehicles draw {:.3} MW",
                        row.hour, lot_id, row.pg2v[k], row.n_ch[k], expect
                    ));
                }
            }
        }
    }

    Ok(DispatchValidation {
        scenario,
        report,
        column_issues,
    })
}
