//! Domain types, cost evaluation and schedule validation for the combined
//! heat and power unit-commitment problem with PEV parking lots.

use crate::geometry::{ForPolygon, GEOM_TOL};
use crate::pev;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitKind {
    Thermal,
    Chp,
    HeatOnly,
}

impl fmt::Display for UnitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitKind::Thermal => write!(f, "thermal"),
            UnitKind::Chp => write!(f, "chp"),
            UnitKind::HeatOnly => write!(f, "heat-only"),
        }
    }
}

/// A generating unit: conventional thermal, cogeneration (CHP) or
/// heat-only boiler.
#[derive(Debug, Clone)]
pub struct GeneratingUnit {
    pub id: String,
    pub kind: UnitKind,
    /// Fuel cost coefficients: a + b P + c P^2 ($/h, $/MWh, $/MW^2 h).
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Heat cost coefficients: d H + e H^2 + f P H (zero for thermal).
    pub d: f64,
    pub e: f64,
    pub f: f64,
    /// Power limits; absent for heat-only units.
    pub p_min: Option<f64>,
    pub p_max: Option<f64>,
    /// Heat limits; absent for thermal units.
    pub h_min: Option<f64>,
    pub h_max: Option<f64>,
    /// Heat-power operation region; present exactly for CHP units.
    pub for_polygon: Option<ForPolygon>,
    pub t_up_min: u32,
    pub t_down_min: u32,
    pub startup_cost: f64,
    pub shutdown_cost: f64,
    /// Signed hours: positive = already ON that long at t = 0, negative =
    /// OFF that long. Never zero.
    pub initial_status: i32,
}

impl GeneratingUnit {
    pub fn validate(&self) -> Result<(), ModelError> {
        let nonneg = [
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("d", self.d),
            ("e", self.e),
            ("f", self.f),
        ];
        for (name, v) in nonneg {
            if v < 0.0 {
                return Err(ModelError::Invariant(format!(
                    "unit {}: coefficient {} must be nonnegative, got {}",
                    self.id, name, v
                )));
            }
        }
        if let (Some(lo), Some(hi)) = (self.p_min, self.p_max) {
            if lo > hi {
                return Err(ModelError::Invariant(format!(
                    "unit {}: p_min {} > p_max {}",
                    self.id, lo, hi
                )));
            }
        }
        if let (Some(lo), Some(hi)) = (self.h_min, self.h_max) {
            if lo > hi {
                return Err(ModelError::Invariant(format!(
                    "unit {}: h_min {} > h_max {}",
                    self.id, lo, hi
                )));
            }
        }
        match self.kind {
            UnitKind::Chp => {
                if self.for_polygon.is_none() {
                    return Err(ModelError::Invariant(format!(
                        "unit {}: chp unit needs an operation region",
                        self.id
                    )));
                }
            }
            _ => {
                if self.for_polygon.is_some() {
                    return Err(ModelError::Invariant(format!(
                        "unit {}: only chp units carry an operation region",
                        self.id
                    )));
                }
            }
        }
        if self.kind == UnitKind::Thermal && (self.p_min.is_none() || self.p_max.is_none()) {
            return Err(ModelError::Invariant(format!(
                "unit {}: thermal unit needs power limits",
                self.id
            )));
        }
        if self.kind == UnitKind::HeatOnly && (self.h_min.is_none() || self.h_max.is_none()) {
            return Err(ModelError::Invariant(format!(
                "unit {}: heat-only unit needs heat limits",
                self.id
            )));
        }
        if self.t_up_min < 1 || self.t_down_min < 1 {
            return Err(ModelError::Invariant(format!(
                "unit {}: minimum up/down times must be at least 1 hour",
                self.id
            )));
        }
        if self.initial_status == 0 {
            return Err(ModelError::Invariant(format!(
                "unit {}: initial status must be nonzero",
                self.id
            )));
        }
        Ok(())
    }

    /// Power range when committed: explicit limits for thermal units, the
    /// convex hull's power span for CHP, zero for heat-only.
    pub fn power_range(&self) -> (f64, f64) {
        match self.kind {
            UnitKind::Thermal => (self.p_min.unwrap_or(0.0), self.p_max.unwrap_or(0.0)),
            UnitKind::Chp => self
                .for_polygon
                .as_ref()
                .map(|poly| poly.convexify().0.power_range())
                .unwrap_or((0.0, 0.0)),
            UnitKind::HeatOnly => (0.0, 0.0),
        }
    }

    /// Heat range when committed.
    pub fn heat_bounds(&self) -> (f64, f64) {
        match self.kind {
            UnitKind::Thermal => (0.0, 0.0),
            UnitKind::Chp => self
                .for_polygon
                .as_ref()
                .map(|poly| poly.heat_range())
                .unwrap_or((0.0, 0.0)),
            UnitKind::HeatOnly => (self.h_min.unwrap_or(0.0), self.h_max.unwrap_or(0.0)),
        }
    }

    pub fn produces_power(&self) -> bool {
        self.kind != UnitKind::HeatOnly
    }

    pub fn produces_heat(&self) -> bool {
        self.kind != UnitKind::Thermal
    }

    /// Fuel cost at the given operating point, by unit kind.
    pub fn fuel_cost(&self, p: f64, h: f64) -> f64 {
        self.a + self.b * p + self.c * p * p + self.d * h + self.e * h * h + self.f * p * h
    }
}

/// An aggregated PEV parking lot.
#[derive(Debug, Clone)]
pub struct ParkingLot {
    pub id: String,
    pub fleet_size: u32,
    /// Average per-vehicle battery capacity, kWh.
    pub pv_kwh: f64,
    /// Departure state of charge, fraction of capacity.
    pub delta: f64,
    /// Total charge/discharge plus inverter efficiency.
    pub eta: f64,
    /// V2G energy price, $/MWh.
    pub pi: f64,
    pub n_dsch_min: Vec<u32>,
    pub n_dsch_max: Vec<u32>,
    pub n_ch_min: Vec<u32>,
    pub n_ch_max: Vec<u32>,
    pub grid_charging: bool,
}

impl ParkingLot {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.pv_kwh <= 0.0 {
            return Err(ModelError::Invariant(format!(
                "lot {}: battery capacity must be positive",
                self.id
            )));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(ModelError::Invariant(format!(
                "lot {}: departure state of charge must lie in [0, 1]",
                self.id
            )));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(ModelError::Invariant(format!(
                "lot {}: efficiency must lie in (0, 1]",
                self.id
            )));
        }
        if self.pi < 0.0 {
            return Err(ModelError::Invariant(format!(
                "lot {}: V2G price must be nonnegative",
                self.id
            )));
        }
        let horizon = self.n_dsch_min.len();
        for (name, v) in [
            ("n_dsch_max", &self.n_dsch_max),
            ("n_ch_min", &self.n_ch_min),
            ("n_ch_max", &self.n_ch_max),
        ] {
            if v.len() != horizon {
                return Err(ModelError::Invariant(format!(
                    "lot {}: {} length {} does not match horizon {}",
                    self.id,
                    name,
                    v.len(),
                    horizon
                )));
            }
        }
        for t in 0..horizon {
            if self.n_dsch_min[t] > self.n_dsch_max[t] || self.n_dsch_max[t] > self.fleet_size {
                return Err(ModelError::Invariant(format!(
                    "lot {}: discharge count bounds at hour {} are inconsistent",
                    self.id,
                    t + 1
                )));
            }
            if self.n_ch_min[t] > self.n_ch_max[t] || self.n_ch_max[t] > self.fleet_size {
                return Err(ModelError::Invariant(format!(
                    "lot {}: charge count bounds at hour {} are inconsistent",
                    self.id,
                    t + 1
                )));
            }
        }
        Ok(())
    }
}

/// Per-hour power, heat and spinning-reserve requirements.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandProfile {
    pub pd: Vec<f64>,
    pub hd: Vec<f64>,
    pub rd: Vec<f64>,
}

impl DemandProfile {
    pub fn horizon(&self) -> usize {
        self.pd.len()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.hd.len() != self.pd.len() || self.rd.len() != self.pd.len() {
            return Err(ModelError::Invariant(
                "demand vectors must share one horizon".into(),
            ));
        }
        for t in 0..self.pd.len() {
            if self.pd[t] < 0.0 || self.hd[t] < 0.0 || self.rd[t] < 0.0 {
                return Err(ModelError::Invariant(format!(
                    "demand entries at hour {} must be nonnegative",
                    t + 1
                )));
            }
        }
        Ok(())
    }
}

/// The generating system: units plus parking lots.
#[derive(Debug, Clone)]
pub struct System {
    pub units: Vec<GeneratingUnit>,
    pub lots: Vec<ParkingLot>,
}

impl System {
    pub fn validate(&self) -> Result<(), ModelError> {
        for u in &self.units {
            u.validate()?;
        }
        for l in &self.lots {
            l.validate()?;
        }
        Ok(())
    }

    pub fn unit_index(&self, id: &str) -> Option<usize> {
        self.units.iter().position(|u| u.id == id)
    }
}

/// A candidate or solved schedule: commitment, dispatch and fleet counts.
#[derive(Debug, Clone)]
pub struct ScheduleSolution {
    /// x[i][t] in {0, 1}.
    pub x: Vec<Vec<u8>>,
    /// p[i][t] in MW.
    pub p: Vec<Vec<f64>>,
    /// h[i][t] in MWth.
    pub h: Vec<Vec<f64>>,
    /// n_dsch[j][t] discharging vehicles.
    pub n_dsch: Vec<Vec<u32>>,
    /// n_ch[j][t] charging vehicles.
    pub n_ch: Vec<Vec<u32>>,
    pub hourly_cost: Vec<f64>,
    pub total_cost: f64,
}

impl ScheduleSolution {
    pub fn zeros(n_units: usize, n_lots: usize, horizon: usize) -> Self {
        ScheduleSolution {
            x: vec![vec![0; horizon]; n_units],
            p: vec![vec![0.0; horizon]; n_units],
            h: vec![vec![0.0; horizon]; n_units],
            n_dsch: vec![vec![0; horizon]; n_lots],
            n_ch: vec![vec![0; horizon]; n_lots],
            hourly_cost: vec![0.0; horizon],
            total_cost: 0.0,
        }
    }

    pub fn horizon(&self) -> usize {
        self.hourly_cost.len()
    }
}

/// Constraint families a schedule is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    PowerBalance,
    HeatBalance,
    PLimit,
    HLimit,
    ForMembership,
    MinUp,
    MinDown,
    Reserve,
    FleetTotalDsch,
    FleetTotalCh,
    FleetHourlyDsch,
    FleetHourlyCh,
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self {
            ConstraintKind::PowerBalance => "power-balance",
            ConstraintKind::HeatBalance => "heat-balance",
            ConstraintKind::PLimit => "p-limit",
            ConstraintKind::HLimit => "h-limit",
            ConstraintKind::ForMembership => "for-membership",
            ConstraintKind::MinUp => "min-up",
            ConstraintKind::MinDown => "min-down",
            ConstraintKind::Reserve => "reserve",
            ConstraintKind::FleetTotalDsch => "fleet-total-dsch",
            ConstraintKind::FleetTotalCh => "fleet-total-ch",
            ConstraintKind::FleetHourlyDsch => "fleet-hourly-dsch",
            ConstraintKind::FleetHourlyCh => "fleet-hourly-ch",
        };
        write!(f, "{}", tag)
    }
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub kind: ConstraintKind,
    /// 1-based hour; 0 for whole-horizon checks.
    pub hour: usize,
    pub subject: String,
    pub residual: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.hour == 0 {
            write!(
                f,
                "{} [{}]: residual {:.6}",
                self.kind, self.subject, self.residual
            )
        } else {
            write!(
                f,
                "{} hour {} [{}]: residual {:.6}",
                self.kind, self.hour, self.subject, self.residual
            )
        }
    }
}

/// Validation outcome: hard violations plus hull-membership warnings
/// (operating points inside the convex hull but outside the original
/// region are reported as warnings, not failures).
#[derive(Debug, Clone, Default)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Validation tolerances; see [`Tolerances::solver`] and
/// [`Tolerances::paper_replay`].
#[derive(Debug, Clone)]
pub struct Tolerances {
    pub balance_mw: f64,
    pub heat_mwth: f64,
    pub p_limit_mw: f64,
    pub h_limit_mwth: f64,
    pub for_mw: f64,
    pub reserve_mw: f64,
    /// Relative tolerance on the daily fleet totals.
    pub fleet_total_frac: f64,
    /// Count tolerance on hourly fleet bounds.
    pub fleet_hourly: f64,
    /// Tolerance on reported V2G power vs count x per-vehicle power.
    pub pv2g_mw: f64,
}

impl Tolerances {
    /// Tight tolerances for solver-produced schedules.
    pub fn solver() -> Self {
        Tolerances {
            balance_mw: 1e-6,
            heat_mwth: 1e-6,
            p_limit_mw: 1e-6,
            h_limit_mwth: 1e-6,
            for_mw: 1e-6,
            reserve_mw: 1e-6,
            fleet_total_frac: 0.0,
            fleet_hourly: 0.0,
            pv2g_mw: 1e-6,
        }
    }

    /// Loose tolerances for replaying published dispatch tables, whose
    /// entries are rounded to two decimals and whose unit data is only
    /// approximated by the reference dataset.
    pub fn paper_replay() -> Self {
        Tolerances {
            balance_mw: 0.15,
            heat_mwth: 1.0,
            p_limit_mw: 0.02,
            h_limit_mwth: 0.02,
            for_mw: 2.0,
            reserve_mw: 0.5,
            fleet_total_frac: 0.0015,
            fleet_hourly: 0.0,
            pv2g_mw: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    KindMismatch { expected: UnitKind, got: UnitKind },
    InfeasiblePoint { unit: String, p: f64, h: f64 },
    DimensionMismatch(String),
    Invariant(String),
    RaggedRows(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::KindMismatch { expected, got } => {
                write!(f, "expected a {} unit, got {}", expected, got)
            }
            ModelError::InfeasiblePoint { unit, p, h } => write!(
                f,
                "operating point ({} MW, {} MWth) lies outside the region of unit {}",
                p, h, unit
            ),
            ModelError::DimensionMismatch(msg) => write!(f, "dimension mismatch: {}", msg),
            ModelError::Invariant(msg) => write!(f, "invariant violated: {}", msg),
            ModelError::RaggedRows(msg) => write!(f, "ragged dispatch rows: {}", msg),
        }
    }
}

impl std::error::Error for ModelError {}

/// Fuel cost of a thermal unit at output `p`: a + b p + c p^2.
pub fn fuel_cost_thermal(unit: &GeneratingUnit, p: f64) -> Result<f64, ModelError> {
    if unit.kind != UnitKind::Thermal {
        return Err(ModelError::KindMismatch {
            expected: UnitKind::Thermal,
            got: unit.kind,
        });
    }
    Ok(unit.a + unit.b * p + unit.c * p * p)
}

/// Fuel cost of a CHP unit at (p, h). The point must lie inside the
/// operation region; (0, 0) stands for the OFF state and evaluates to the
/// constant term.
pub fn fuel_cost_chp(unit: &GeneratingUnit, p: f64, h: f64) -> Result<f64, ModelError> {
    if unit.kind != UnitKind::Chp {
        return Err(ModelError::KindMismatch {
            expected: UnitKind::Chp,
            got: unit.kind,
        });
    }
    if p != 0.0 || h != 0.0 {
        let poly = unit.for_polygon.as_ref().expect("validated chp unit");
        if !poly.contains(p, h, GEOM_TOL) {
            return Err(ModelError::InfeasiblePoint {
                unit: unit.id.clone(),
                p,
                h,
            });
        }
    }
    Ok(unit.fuel_cost(p, h))
}

/// Startup and shutdown costs across a commitment transition.
pub fn transition_costs(unit: &GeneratingUnit, x_prev: u8, x_curr: u8) -> (f64, f64) {
    let (xp, xc) = (x_prev as f64, x_curr as f64);
    let su = unit.startup_cost * xc * (xc - xp);
    let sd = unit.shutdown_cost * xp * (xp - xc);
    (su, sd)
}

#[derive(Debug, Clone)]
pub struct CostBreakdown {
    pub total: f64,
    pub hourly: Vec<f64>,
}

/// Total operating cost of a schedule with the per-hour breakdown:
/// committed fuel costs, startup/shutdown transitions, and the V2G energy
/// payment per discharging vehicle.
pub fn total_cost(system: &System, solution: &ScheduleSolution) -> Result<CostBreakdown, ModelError> {
    let t_len = solution.horizon();
    if solution.x.len() != system.units.len()
        || solution.p.len() != system.units.len()
        || solution.h.len() != system.units.len()
        || solution.n_dsch.len() != system.lots.len()
        || solution.n_ch.len() != system.lots.len()
    {
        return Err(ModelError::DimensionMismatch(
            "solution matrices do not match the system".into(),
        ));
    }
    for m in solution
        .x
        .iter()
        .map(Vec::len)
        .chain(solution.p.iter().map(Vec::len))
        .chain(solution.h.iter().map(Vec::len))
        .chain(solution.n_dsch.iter().map(Vec::len))
        .chain(solution.n_ch.iter().map(Vec::len))
    {
        if m != t_len {
            return Err(ModelError::DimensionMismatch(
                "solution rows do not share one horizon".into(),
            ));
        }
    }
    let mut hourly = vec![0.0; t_len];
    for (i, unit) in system.units.iter().enumerate() {
        let mut prev = if unit.initial_status > 0 { 1u8 } else { 0u8 };
        for t in 0..t_len {
            let x = solution.x[i][t];
            if x == 1 {
                hourly[t] += unit.fuel_cost(solution.p[i][t], solution.h[i][t]);
            }
            let (su, sd) = transition_costs(unit, prev, x);
            hourly[t] += su + sd;
            prev = x;
        }
    }
    for (j, lot) in system.lots.iter().enumerate() {
        let kappa = pev::per_vehicle_power(lot);
        for t in 0..t_len {
            hourly[t] += solution.n_dsch[j][t] as f64 * kappa * lot.pi;
        }
    }
    let total = hourly.iter().sum();
    Ok(CostBreakdown { total, hourly })
}

/// Recomputes and stores the cost fields of a solution.
pub fn fill_costs(system: &System, solution: &mut ScheduleSolution) -> Result<(), ModelError> {
    let costs = total_cost(system, solution)?;
    solution.hourly_cost = costs.hourly;
    solution.total_cost = costs.total;
    Ok(())
}

/// Validates a schedule against the full constraint set. Violations are
/// data, not errors: each entry carries its residual magnitude.
pub fn validate_schedule(
    system: &System,
    demand: &DemandProfile,
    solution: &ScheduleSolution,
    tol: &Tolerances,
) -> ViolationReport {
    let mut report = ViolationReport::default();
    let t_len = demand.horizon().min(solution.horizon());
    let hulls: Vec<Option<ForPolygon>> = system
        .units
        .iter()
        .map(|u| u.for_polygon.as_ref().map(|p| p.convexify().0))
        .collect();

    for t in 0..t_len {
        // Power balance, Eq. (7): committed output plus net PEV power.
        let mut gen = 0.0;
        for (i, _unit) in system.units.iter().enumerate() {
            if solution.x[i][t] == 1 {
                gen += solution.p[i][t];
            }
        }
        let mut pev_net = 0.0;
        for (j, lot) in system.lots.iter().enumerate() {
            let kappa = pev::per_vehicle_power(lot);
            pev_net += kappa * solution.n_dsch[j][t] as f64;
            pev_net -= kappa * solution.n_ch[j][t] as f64;
        }
        let residual = (gen + pev_net - demand.pd[t]).abs();
        if residual > tol.balance_mw {
            report.violations.push(Violation {
                kind: ConstraintKind::PowerBalance,
                hour: t + 1,
                subject: "system".into(),
                residual,
            });
        }

        // Heat balance, Eq. (8).
        let heat: f64 = (0..system.units.len())
            .filter(|&i| solution.x[i][t] == 1)
            .map(|i| solution.h[i][t])
            .sum();
        let residual = (heat - demand.hd[t]).abs();
        if residual > tol.heat_mwth {
            report.violations.push(Violation {
                kind: ConstraintKind::HeatBalance,
                hour: t + 1,
                subject: "system".into(),
                residual,
            });
        }

        // Unit-level limits and region membership.
        for (i, unit) in system.units.iter().enumerate() {
            let (p, h, x) = (solution.p[i][t], solution.h[i][t], solution.x[i][t]);
            if x == 0 {
                let residual = p.abs().max(h.abs());
                if residual > tol.p_limit_mw.max(tol.h_limit_mwth) {
                    report.violations.push(Violation {
                        kind: if p.abs() >= h.abs() {
                            ConstraintKind::PLimit
                        } else {
                            ConstraintKind::HLimit
                        },
                        hour: t + 1,
                        subject: unit.id.clone(),
                        residual,
                    });
                }
                continue;
            }
            match unit.kind {
                UnitKind::Thermal => {
                    let (lo, hi) = (unit.p_min.unwrap_or(0.0), unit.p_max.unwrap_or(f64::MAX));
                    let residual = (lo - p).max(p - hi).max(0.0);
                    if residual > tol.p_limit_mw {
                        report.violations.push(Violation {
                            kind: ConstraintKind::PLimit,
                            hour: t + 1,
                            subject: unit.id.clone(),
                            residual,
                        });
                    }
                }
                UnitKind::HeatOnly => {
                    let (lo, hi) = (unit.h_min.unwrap_or(0.0), unit.h_max.unwrap_or(f64::MAX));
                    let residual = (lo - h).max(h - hi).max(0.0);
                    if residual > tol.h_limit_mwth {
                        report.violations.push(Violation {
                            kind: ConstraintKind::HLimit,
                            hour: t + 1,
                            subject: unit.id.clone(),
                            residual,
                        });
                    }
                }
                UnitKind::Chp => {
                    let poly = unit.for_polygon.as_ref().expect("validated chp unit");
                    if !poly.contains(p, h, tol.for_mw) {
                        let hull = hulls[i].as_ref().expect("chp hull");
                        let residual = poly.boundary_distance(p, h);
                        if hull.contains(p, h, tol.for_mw) {
                            // Inside the convexified region only: a
                            // warning, not a hard failure.
                            report.warnings.push(Violation {
                                kind: ConstraintKind::ForMembership,
                                hour: t + 1,
                                subject: unit.id.clone(),
                                residual,
                            });
                        } else {
                            report.violations.push(Violation {
                                kind: ConstraintKind::ForMembership,
                                hour: t + 1,
                                subject: unit.id.clone(),
                                residual,
                            });
                        }
                    }
                }
            }
        }

        // Spinning reserve, Eq. (13): committed capacity plus net PEV
        // power must cover demand plus the reserve requirement. Committed
        // CHP capacity is the hull's maximum power at the dispatched heat.
        let mut capacity = 0.0;
        for (i, unit) in system.units.iter().enumerate() {
            if solution.x[i][t] != 1 {
                continue;
            }
            capacity += match unit.kind {
                UnitKind::Thermal => unit.p_max.unwrap_or(0.0),
                UnitKind::HeatOnly => 0.0,
                UnitKind::Chp => hulls[i]
                    .as_ref()
                    .and_then(|hull| hull.max_power_at_heat(solution.h[i][t]))
                    .unwrap_or(0.0),
            };
        }
        let shortfall = demand.pd[t] + demand.rd[t] - (capacity + pev_net);
        if shortfall > tol.reserve_mw {
            report.violations.push(Violation {
                kind: ConstraintKind::Reserve,
                hour: t + 1,
                subject: "system".into(),
                residual: shortfall,
            });
        }
    }

    // Minimum up/down times, Eqs. (11)-(12), seeded by the initial status.
    for (i, unit) in system.units.iter().enumerate() {
        let x = &solution.x[i];
        let mut run_on = if unit.initial_status > 0 {
            unit.initial_status as i64
        } else {
            0
        };
        let mut run_off = if unit.initial_status < 0 {
            (-unit.initial_status) as i64
        } else {
            0
        };
        for t in 0..t_len {
            let on = x[t] == 1;
            let was_on = if t == 0 {
                unit.initial_status > 0
            } else {
                x[t - 1] == 1
            };
            if on && !was_on {
                // Startup: the unit must have been down long enough.
                if run_off < unit.t_down_min as i64 {
                    report.violations.push(Violation {
                        kind: ConstraintKind::MinDown,
                        hour: t + 1,
                        subject: unit.id.clone(),
                        residual: (unit.t_down_min as i64 - run_off) as f64,
                    });
                }
                run_on = 0;
            }
            if !on && was_on {
                if run_on < unit.t_up_min as i64 {
                    report.violations.push(Violation {
                        kind: ConstraintKind::MinUp,
                        hour: t + 1,
                        subject: unit.id.clone(),
                        residual: (unit.t_up_min as i64 - run_on) as f64,
                    });
                }
                run_off = 0;
            }
            if on {
                run_on += 1;
            } else {
                run_off += 1;
            }
        }
    }

    // Fleet constraints, Eqs. (14)-(17).
    report.violations.extend(pev::check_fleet_constraints(
        &system.lots,
        &solution.n_dsch,
        &solution.n_ch,
        tol,
    ));

    report
}

/// Raw per-hour dispatch quantities used to reconstruct demand from a
/// published table: unit power and heat columns plus V2G / grid-charging
/// power.
#[derive(Debug, Clone)]
pub struct DispatchNumbers {
    pub p: Vec<f64>,
    pub h: Vec<f64>,
    pub pv2g: f64,
    pub pg2v: f64,
}

/// Reconstructs a demand profile from dispatch rows:
/// `pd = sum(P) + Pv2g - Pg2v` and `hd = sum(H)`, both rounded to the
/// nearest 0.1 MW (the tables carry two-decimal rounding noise), and
/// `rd = 10%` of `pd` rounded to the nearest MW.
pub fn derive_demand_from_dispatch(
    rows: &[DispatchNumbers],
    reserve_fraction: f64,
) -> Result<DemandProfile, ModelError> {
    if rows.is_empty() {
        return Err(ModelError::RaggedRows("no dispatch rows".into()));
    }
    let p_len = rows[0].p.len();
    let h_len = rows[0].h.len();
    let mut pd = Vec::with_capacity(rows.len());
    let mut hd = Vec::with_capacity(rows.len());
    let mut rd = Vec::with_capacity(rows.len());
    for (t, row) in rows.iter().enumerate() {
        if row.p.len() != p_len || row.h.len() != h_len {
            return Err(ModelError::RaggedRows(format!(
                "row {} has {} power / {} heat columns, expected {} / {}",
                t + 1,
                row.p.len(),
                row.h.len(),
                p_len,
                h_len
            )));
        }
        let p_sum: f64 = row.p.iter().sum::<f64>() + row.pv2g - row.pg2v;
        let h_sum: f64 = row.h.iter().sum();
        let pd_t = (p_sum * 10.0).round() / 10.0;
        let hd_t = (h_sum * 10.0).round() / 10.0;
        pd.push(pd_t);
        hd.push(hd_t);
        rd.push((reserve_fraction * pd_t).round());
    }
    Ok(DemandProfile { pd, hd, rd })
}
