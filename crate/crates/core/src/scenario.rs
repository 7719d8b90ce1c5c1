//! Scenario definitions: which fleet mechanisms are active and how the
//! hourly count bounds are derived.
//!
//! Scenario 1 runs the pure unit-commitment problem without PEVs.
//! Scenario 2 adds the fleet with renewable (off-grid) charging: only
//! discharge touches the grid, hourly discharge is capped at 10% of the
//! fleet and the published minimum-discharge profile applies. Scenario 3
//! charges and discharges through the grid with 20% hourly caps.

use crate::model::{ModelError, System};
use crate::pev;
use std::fmt;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    S1,
    S2,
    S3,
}

impl ScenarioKind {
    pub fn number(self) -> u8 {
        match self {
            ScenarioKind::S1 => 1,
            ScenarioKind::S2 => 2,
            ScenarioKind::S3 => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(ScenarioKind::S1),
            2 => Some(ScenarioKind::S2),
            3 => Some(ScenarioKind::S3),
            _ => None,
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "scenario {}", self.number())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum MinDischargeSource {
    /// No minimum-discharge profile.
    None,
    /// The bundled published 24-hour profile.
    #[default]
    Table3,
    /// A user-supplied `hour,min_count` CSV.
    File(PathBuf),
}

/// Scenario configuration with solver options.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    /// Overrides the lot fleet size (single-lot systems only).
    pub fleet_size: Option<u32>,
    /// Reserve requirement as a fraction of hourly load (used when demand
    /// is derived from a dispatch table).
    pub reserve_fraction: f64,
    /// Hourly discharge cap as a fleet fraction; defaults to 10% in
    /// scenario 2 and 20% in scenario 3.
    pub dsch_cap_fraction: Option<f64>,
    /// Hourly charge cap as a fleet fraction; defaults to 20% in
    /// scenario 3.
    pub ch_cap_fraction: Option<f64>,
    pub min_dsch: MinDischargeSource,
    /// Relative convergence gap of the decomposition.
    pub epsilon: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn new(kind: ScenarioKind) -> Self {
        ScenarioConfig {
            kind,
            fleet_size: None,
            reserve_fraction: 0.10,
            dsch_cap_fraction: None,
            ch_cap_fraction: None,
            min_dsch: match kind {
                ScenarioKind::S2 => MinDischargeSource::Table3,
                _ => MinDischargeSource::None,
            },
            epsilon: 1e-4,
            max_outer: 200,
            max_inner: 100,
            seed: 0,
        }
    }

    fn dsch_cap(&self) -> f64 {
        self.dsch_cap_fraction.unwrap_or(match self.kind {
            ScenarioKind::S1 => 0.0,
            ScenarioKind::S2 => 0.10,
            ScenarioKind::S3 => 0.20,
        })
    }

    fn ch_cap(&self) -> f64 {
        self.ch_cap_fraction.unwrap_or(match self.kind {
            ScenarioKind::S3 => 0.20,
            _ => 0.0,
        })
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, v) in [
            ("reserve_fraction", self.reserve_fraction),
            ("dsch_cap_fraction", self.dsch_cap()),
            ("ch_cap_fraction", self.ch_cap()),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ModelError::Invariant(format!(
                    "{} must lie in [0, 1], got {}",
                    name, v
                )));
            }
        }
        Ok(())
    }
}

/// Applies a scenario to a system: drops or reconfigures the parking
/// lots, bakes hourly caps and the minimum-discharge profile into the
/// lot count bounds.
pub fn apply_scenario(
    system: &System,
    config: &ScenarioConfig,
    horizon: usize,
) -> Result<System, ModelError> {
    config.validate()?;
    let mut out = system.clone();
    if config.kind == ScenarioKind::S1 {
        out.lots.clear();
        return Ok(out);
    }
    if let Some(fleet) = config.fleet_size {
        if out.lots.len() != 1 {
            return Err(ModelError::Invariant(
                "fleet size override needs exactly one parking lot".into(),
            ));
        }
        out.lots[0].fleet_size = fleet;
    }
    let min_profile: Option<Vec<u32>> = match &config.min_dsch {
        MinDischargeSource::None => None,
        MinDischargeSource::Table3 => Some(pev::table3_min_dsch_profile()),
        MinDischargeSource::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                ModelError::Invariant(format!("minimum profile {}: {}", path.display(), e))
            })?;
            Some(pev::parse_min_profile(&text)?)
        }
    };
    if let Some(profile) = &min_profile {
        if profile.len() != horizon {
            return Err(ModelError::Invariant(format!(
                "minimum-discharge profile has {} hours, demand has {}",
                profile.len(),
                horizon
            )));
        }
    }
    for lot in &mut out.lots {
        let dsch_cap = (config.dsch_cap() * lot.fleet_size as f64).round() as u32;
        let ch_cap = (config.ch_cap() * lot.fleet_size as f64).round() as u32;
        lot.n_dsch_max = vec![dsch_cap.min(lot.fleet_size); horizon];
        lot.n_dsch_min = match &min_profile {
            Some(profile) => profile.clone(),
            None => vec![0; horizon],
        };
        match config.kind {
            ScenarioKind::S2 => {
                lot.grid_charging = false;
                lot.n_ch_min = vec![0; horizon];
                lot.n_ch_max = vec![0; horizon];
            }
            ScenarioKind::S3 => {
                lot.grid_charging = true;
                lot.n_ch_min = vec![0; horizon];
                lot.n_ch_max = vec![ch_cap.min(lot.fleet_size); horizon];
            }
            ScenarioKind::S1 => unreachable!(),
        }
        // The daily budget must stay attainable within the hourly bounds.
        let dsch_min_total: u64 = lot.n_dsch_min.iter().map(|&n| n as u64).sum();
        let dsch_max_total: u64 = lot.n_dsch_max.iter().map(|&n| n as u64).sum();
        if dsch_min_total > lot.fleet_size as u64 || dsch_max_total < lot.fleet_size as u64 {
            return Err(ModelError::Invariant(format!(
                "lot {}: hourly discharge bounds cannot absorb the fleet of {}",
                lot.id, lot.fleet_size
            )));
        }
        if config.kind == ScenarioKind::S3 {
            let ch_max_total: u64 = lot.n_ch_max.iter().map(|&n| n as u64).sum();
            if ch_max_total < lot.fleet_size as u64 {
                return Err(ModelError::Invariant(format!(
                    "lot {}: hourly charge bounds cannot absorb the fleet of {}",
                    lot.id, lot.fleet_size
                )));
            }
        }
        lot.validate()?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io;

    #[test]
    fn scenario_defaults() {
        let s2 = ScenarioConfig::new(ScenarioKind::S2);
        assert_eq!(s2.min_dsch, MinDischargeSource::Table3);
        assert_eq!(s2.dsch_cap(), 0.10);
        assert_eq!(s2.ch_cap(), 0.0);
        let s3 = ScenarioConfig::new(ScenarioKind::S3);
        assert_eq!(s3.min_dsch, MinDischargeSource::None);
        assert_eq!(s3.dsch_cap(), 0.20);
        assert_eq!(s3.ch_cap(), 0.20);
    }

    #[test]
    fn scenario_application_reshapes_lots() {
        let loaded = io::reference_system();
        let horizon = loaded.demand.horizon();

        let s1 = apply_scenario(
            &loaded.system,
            &ScenarioConfig::new(ScenarioKind::S1),
            horizon,
        )
        .unwrap();
        assert!(s1.lots.is_empty());

        let s2 = apply_scenario(
            &loaded.system,
            &ScenarioConfig::new(ScenarioKind::S2),
            horizon,
        )
        .unwrap();
        let lot = &s2.lots[0];
        assert!(!lot.grid_charging);
        assert!(lot.n_dsch_max.iter().all(|&c| c == 5000));
        assert_eq!(lot.n_dsch_min[9], 3400);
        assert!(lot.n_ch_max.iter().all(|&c| c == 0));

        let s3 = apply_scenario(
            &loaded.system,
            &ScenarioConfig::new(ScenarioKind::S3),
            horizon,
        )
        .unwrap();
        let lot = &s3.lots[0];
        assert!(lot.grid_charging);
        assert!(lot.n_dsch_max.iter().all(|&c| c == 10_000));
        assert!(lot.n_ch_max.iter().all(|&c| c == 10_000));
        assert!(lot.n_dsch_min.iter().all(|&c| c == 0));
    }
}
