//! Replay of the published dispatch tables against the reference dataset.

use chpuc_core::io;
use chpuc_core::model::{derive_demand_from_dispatch, ConstraintKind};
use chpuc_core::replay::{validate_dispatch, ToleranceProfile};
use chpuc_core::scenario::ScenarioKind;
use std::path::Path;

fn data_path(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

#[test]
fn reference_system_loads_with_expected_shape() {
    let loaded = io::load_system(&data_path("reference_system.txt")).unwrap();
    let thermal = loaded
        .system
        .units
        .iter()
        .filter(|u| u.kind == chpuc_core::model::UnitKind::Thermal)
        .count();
    let chp = loaded
        .system
        .units
        .iter()
        .filter(|u| u.kind == chpuc_core::model::UnitKind::Chp)
        .count();
    let heat_only = loaded
        .system
        .units
        .iter()
        .filter(|u| u.kind == chpuc_core::model::UnitKind::HeatOnly)
        .count();
    assert_eq!((thermal, chp, heat_only), (8, 2, 1));
    assert_eq!(loaded.system.lots.len(), 1);
    assert_eq!(loaded.system.lots[0].fleet_size, 50_000);
    assert_eq!(loaded.demand.horizon(), 24);
    // The demand profile is reconstructed from the scenario-2 table.
    assert_eq!(loaded.demand.pd[0], 700.0);
    assert_eq!(loaded.demand.pd[11], 1500.0);
    assert_eq!(loaded.demand.rd[11], 150.0);
    assert_eq!(loaded.demand.hd[0], 399.0);
    assert_eq!(loaded.demand.hd[11], 511.0);
}

#[test]
fn bundled_reference_matches_file_loader() {
    let from_file = io::load_system(&data_path("reference_system.txt")).unwrap();
    let bundled = io::reference_system();
    assert_eq!(from_file.demand, bundled.demand);
    assert_eq!(from_file.system.units.len(), bundled.system.units.len());
}

#[test]
fn table4_replays_clean_at_paper_tolerances() {
    let loaded = io::reference_system();
    let table = io::table4_fixture();
    let validation = validate_dispatch(&loaded.system, &table, ToleranceProfile::PaperReplay)
        .expect("table parses and maps onto the system");
    assert_eq!(validation.scenario, ScenarioKind::S2);
    assert!(
        validation.report.violations.is_empty(),
        "violations: {:?}",
        validation.report.violations
    );
    assert!(
        validation.column_issues.is_empty(),
        "column issues: {:?}",
        validation.column_issues
    );

    // Hourly discharge stays within the 10% cap and the published
    // minimum profile is met.
    let minimums = chpuc_core::pev::table3_min_dsch_profile();
    for (t, row) in table.rows.iter().enumerate() {
        assert!(row.n_dsch[0] <= 5000);
        assert!(row.n_dsch[0] >= minimums[t]);
    }
}

#[test]
fn table5_replays_clean_at_paper_tolerances() {
    let loaded = io::reference_system();
    let table = io::table5_fixture();
    let validation = validate_dispatch(&loaded.system, &table, ToleranceProfile::PaperReplay)
        .expect("table parses and maps onto the system");
    assert_eq!(validation.scenario, ScenarioKind::S3);
    assert!(
        validation.report.violations.is_empty(),
        "violations: {:?}",
        validation.report.violations
    );
    assert!(
        validation.column_issues.is_empty(),
        "column issues: {:?}",
        validation.column_issues
    );

    // Hourly caps at 20% of the fleet; daily totals close to within 0.15%.
    let mut dsch_total: i64 = 0;
    let mut ch_total: i64 = 0;
    for row in &table.rows {
        assert!(row.n_dsch[0] <= 10_000);
        assert!(row.n_ch[0] <= 10_000);
        dsch_total += row.n_dsch[0] as i64;
        ch_total += row.n_ch[0] as i64;
    }
    assert_eq!(dsch_total, 49_987);
    assert_eq!(ch_total, 49_991);
    assert!((dsch_total - 50_000).unsigned_abs() as f64 <= 0.0015 * 50_000.0);
    assert!((ch_total - 50_000).unsigned_abs() as f64 <= 0.0015 * 50_000.0);
}

#[test]
fn table4_fails_at_solver_tolerances() {
    let loaded = io::reference_system();
    let table = io::table4_fixture();
    let validation =
        validate_dispatch(&loaded.system, &table, ToleranceProfile::Solver).unwrap();
    assert!(
        !validation.passed(),
        "two-decimal table rounding must exceed 1e-6 tolerances"
    );
}

#[test]
fn derived_demand_matches_hand_computed_rows() {
    let table = io::table4_fixture();
    let demand = derive_demand_from_dispatch(&table.to_dispatch_numbers(), 0.10).unwrap();
    // Hour 1: 455 + 115.77 + 81 + 40 + 8.23 = 700.
    assert_eq!(demand.pd[0], 700.0);
    // Hour 12 sums to 1500.01 and rounds to 1500.0 at 0.1 MW.
    assert_eq!(demand.pd[11], 1500.0);
    // Hour 13 sums to 1425.37 and stays 1425.4.
    assert_eq!(demand.pd[12], 1425.4);
    // Reserve is 10% rounded to the nearest MW.
    assert_eq!(demand.rd[12], 143.0);
    // All-zero dispatch derives zero demand.
    let zero_rows = vec![chpuc_core::model::DispatchNumbers {
        p: vec![0.0; 3],
        h: vec![0.0; 2],
        pv2g: 0.0,
        pg2v: 0.0,
    }];
    let zero = derive_demand_from_dispatch(&zero_rows, 0.10).unwrap();
    assert_eq!((zero.pd[0], zero.hd[0], zero.rd[0]), (0.0, 0.0, 0.0));
}

#[test]
fn forced_limit_breach_is_reported() {
    let loaded = io::reference_system();
    let mut table = io::table4_fixture();
    // Push U1 above its 455 MW maximum at hour 1.
    table.rows[0].p[0] = 470.0;
    let validation =
        validate_dispatch(&loaded.system, &table, ToleranceProfile::PaperReplay).unwrap();
    let breach = validation
        .report
        .violations
        .iter()
        .find(|v| v.kind == ConstraintKind::PLimit && v.subject == "U1");
    let breach = breach.expect("the 15 MW excursion must be flagged");
    assert!((breach.residual - 15.0).abs() < 1e-9);
}

#[test]
fn system_file_round_trip() {
    let loaded = io::reference_system();
    let text = io::emit_system(&loaded.system, &loaded.demand);
    let reparsed = io::parse_system_str(&text, Path::new(".")).unwrap();
    assert_eq!(reparsed.demand, loaded.demand);
    assert_eq!(reparsed.system.units.len(), loaded.system.units.len());
    for (a, b) in reparsed.system.units.iter().zip(&loaded.system.units) {
        assert_eq!(a.id, b.id);
        assert_eq!(a.kind, b.kind);
        assert_eq!(
            (a.a, a.b, a.c, a.d, a.e, a.f),
            (b.a, b.b, b.c, b.d, b.e, b.f)
        );
        assert_eq!((a.p_min, a.p_max), (b.p_min, b.p_max));
        assert_eq!((a.h_min, a.h_max), (b.h_min, b.h_max));
        assert_eq!((a.t_up_min, a.t_down_min), (b.t_up_min, b.t_down_min));
        assert_eq!(a.initial_status, b.initial_status);
        match (&a.for_polygon, &b.for_polygon) {
            (Some(pa), Some(pb)) => assert_eq!(pa.vertices(), pb.vertices()),
            (None, None) => {}
            _ => panic!("operation region lost in round trip for {}", a.id),
        }
    }
    for (a, b) in reparsed.system.lots.iter().zip(&loaded.system.lots) {
        assert_eq!(a.id, b.id);
        assert_eq!(a.fleet_size, b.fleet_size);
        assert_eq!((a.pv_kwh, a.delta, a.eta, a.pi), (b.pv_kwh, b.delta, b.eta, b.pi));
        assert_eq!(a.grid_charging, b.grid_charging);
    }
}

#[test]
fn parse_errors_carry_line_numbers() {
    // Empty file fails at line 1.
    let err = io::parse_system_str("", Path::new(".")).unwrap_err();
    assert!(format!("{}", err).contains("line 1"));

    // Inverted power limits name the unit.
    let bad = "\
[units]
id, kind, a, b, c, d, e, f, p_min, p_max, h_min, h_max, t_up, t_down, startup_cost, shutdown_cost, initial_status
U1, thermal, 1, 1, 0, 0, 0, 0, 100, 50, , , 1, 1, 0, 0, 1

[demand]
hour, pd, hd, rd
1, 10, 0, 1
";
    let err = io::parse_system_str(bad, Path::new(".")).unwrap_err();
    assert!(format!("{}", err).contains("U1"), "got: {}", err);
}

#[test]
fn dispatch_csv_round_trip_and_header_contract() {
    let table = io::table5_fixture();
    assert_eq!(
        table.header(),
        "hour,p_U1,p_U2,p_U3,p_U4,p_U5,p_U6,p_U7,p_U8,p_U9,p_U10,h_U9,h_U10,h_B1,n_dsch_L1,pv2g_L1,n_ch_L1,pg2v_L1,hourly_cost"
    );
    let text = io::write_dispatch_csv(&table);
    let reparsed = io::parse_dispatch_csv(&text).unwrap();
    assert_eq!(reparsed.rows.len(), table.rows.len());
    for (a, b) in reparsed.rows.iter().zip(&table.rows) {
        assert_eq!(a.hour, b.hour);
        assert_eq!(a.p, b.p);
        assert_eq!(a.n_dsch, b.n_dsch);
        assert_eq!(a.n_ch, b.n_ch);
    }
}
