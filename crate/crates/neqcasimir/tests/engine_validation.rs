use neqcasimir::asymptotics::{interaction_far, interaction_near};
use neqcasimir::engine::{
    interaction_force, pair_source_force, self_force, sweep, total_force, EquilibriumTable, QuadratureControls, System,
};
use neqcasimir::materials::{thermal_wavelength, CylinderSpec, DielectricModel};
use neqcasimir::tmatrix::ProviderKind;

const UM: f64 = 1e-6;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn controls(rel_tol: f64) -> QuadratureControls {
    QuadratureControls { rel_tol, ..Default::default() }
}

fn sic(r: f64, t: f64) -> CylinderSpec {
    CylinderSpec::new(r, DielectricModel::sic(), t).unwrap()
}

fn sic_system(t1: f64, t2: f64, t_env: f64) -> System {
    System { cylinder1: sic(1e-7, t1), cylinder2: sic(1e-7, t2), t_env, provider: ProviderKind::Thin }
}

fn interaction(d: f64, ctl: &QuadratureControls) -> neqcasimir::engine::Channels {
    interaction_force(&sic(1e-7, 300.0), &sic(1e-7, 0.0), 300.0, d, ProviderKind::Thin, ctl).unwrap()
}

#[test]
fn engine_matches_near_field_form_at_short_distance() {
    let ctl = controls(1e-4);
    let m = DielectricModel::sic();
    let d = 0.3 * UM;
    let near = interaction_near(1e-7, 1e-7, &m, &m, 300.0, d, &ctl).unwrap().value;
    assert!(rel(interaction(d, &ctl).total(), near) < 0.05);
}

#[test]
fn evanescent_channel_matches_near_field_form() {
    let ctl = controls(1e-4);
    let m = DielectricModel::sic();
    let d = UM;
    let near = interaction_near(1e-7, 1e-7, &m, &m, 300.0, d, &ctl).unwrap().value;
    assert!(rel(interaction(d, &ctl).evanescent, near) < 0.05);
}

#[test]
fn engine_matches_far_field_form_at_long_distance() {
    let ctl = controls(1e-4);
    let m = DielectricModel::sic();
    let d = 50.0 * UM;
    let far = interaction_far(1e-7, 1e-7, &m, &m, 300.0, d, &ctl).unwrap().value;
    let engine = interaction(d, &ctl).total();
    assert!(engine > 0.0);
    assert!(rel(engine, far) < 0.05, "{engine:e} vs {far:e}");
}

#[test]
fn zero_temperature_and_vacuum_give_no_force() {
    let ctl = controls(1e-3);
    let cold = total_force(&sic_system(0.0, 0.0, 0.0), 2.0 * UM, 0.0, &ctl).unwrap();
    assert_eq!((cold.total_1, cold.total_2), (0.0, 0.0));
    let vac = CylinderSpec::new(1e-7, DielectricModel::Vacuum, 300.0).unwrap();
    let system = System { cylinder1: vac.clone(), cylinder2: vac, t_env: 300.0, provider: ProviderKind::Thin };
    let b = total_force(&system, 2.0 * UM, 0.0, &ctl).unwrap();
    assert_eq!((b.total_1, b.total_2), (0.0, 0.0));
}

#[test]
fn near_field_momentum_balance() {
    let ctl = controls(1e-4);
    let d = thermal_wavelength(300.0).unwrap() / 20.0;
    let system = sic_system(300.0, 0.0, 0.0);
    let own = self_force(1, &system, d, &ctl).unwrap().total();
    let on_other = interaction_force(&system.cylinder1, &system.cylinder2, 300.0, d, ProviderKind::Thin, &ctl)
        .unwrap()
        .total();
    assert!(rel(own, on_other) < 0.05, "{own:e} vs {on_other:e}");
    let pair = pair_source_force(&system.cylinder1, &system.cylinder2, 300.0, d, ProviderKind::Thin, &ctl).unwrap();
    assert!(pair.abs() / on_other.abs() < 0.05);
}

#[test]
fn thin_force_scales_with_radius_squared_per_cylinder() {
    let ctl = controls(1e-4);
    let d = 2.0 * UM;
    let base = interaction_force(&sic(5e-8, 300.0), &sic(5e-8, 0.0), 300.0, d, ProviderKind::Thin, &ctl).unwrap();
    let wide = interaction_force(&sic(5e-8, 300.0), &sic(1e-7, 0.0), 300.0, d, ProviderKind::Thin, &ctl).unwrap();
    assert!(rel(wide.total() / base.total(), 4.0) < 0.01);
}

#[test]
fn swapping_cylinders_mirrors_the_assembly() {
    let ctl = controls(1e-3);
    let system = System { cylinder1: sic(1e-7, 300.0), cylinder2: sic(5e-8, 0.0), t_env: 100.0, provider: ProviderKind::Thin };
    let a = total_force(&system, 3.0 * UM, -1e-15, &ctl).unwrap();
    let b = total_force(&system.swapped(), 3.0 * UM, -1e-15, &ctl).unwrap();
    assert!(rel(b.total_1, -a.total_2) < 1e-9);
    assert!(rel(b.total_2, -a.total_1) < 1e-9);
}

#[test]
fn halving_the_tolerance_changes_little() {
    let system = sic_system(0.0, 300.0, 0.0);
    let tol = 1e-3;
    let coarse = total_force(&system, 5.0 * UM, 0.0, &controls(tol)).unwrap().total_1;
    let fine = total_force(&system, 5.0 * UM, 0.0, &controls(tol / 2.0)).unwrap().total_1;
    assert!(rel(coarse, fine) < 10.0 * tol);
}

#[test]
fn kz_symmetry_halving_agrees() {
    let system = sic_system(300.0, 0.0, 0.0);
    let tol = 1e-4;
    let full = total_force(&system, 4.0 * UM, 0.0, &controls(tol)).unwrap();
    let half = QuadratureControls { kz_symmetry: true, ..controls(tol) };
    let halved = total_force(&system, 4.0 * UM, 0.0, &half).unwrap();
    assert!(rel(halved.total_1, full.total_1) < 10.0 * tol);
    assert!(rel(halved.total_2, full.total_2) < 10.0 * tol);
}

#[test]
fn sweep_is_deterministic_and_matches_single_points() {
    let ctl = controls(1e-3);
    let system = sic_system(300.0, 0.0, 0.0);
    let table = EquilibriumTable::new(vec![1.0 * UM, 10.0 * UM], vec![-1e-12, -1e-16]).unwrap();
    let grid = [1.5 * UM, 3.0 * UM, 6.0 * UM];
    let a = sweep(&system, &grid, Some(&table), &ctl).unwrap();
    let b = sweep(&system, &grid, Some(&table), &ctl).unwrap();
    assert_eq!(a, b);
    let single = sweep(&system, &grid[1..2], Some(&table), &ctl).unwrap();
    let direct = total_force(&system, grid[1], table.value_at(grid[1]).unwrap(), &ctl).unwrap();
    assert_eq!(single[0], direct);
    assert_eq!(a[1], direct);
}

#[test]
fn invalid_inputs_are_rejected() {
    let ctl = controls(1e-3);
    let system = sic_system(300.0, 0.0, 0.0);
    assert!(total_force(&system, 0.1 * UM, 0.0, &ctl).is_err());
    assert!(total_force(&system, -UM, 0.0, &ctl).is_err());
    assert!(total_force(&system, UM, 0.0, &controls(-1.0)).is_err());
    assert!(self_force(3, &system, UM, &ctl).is_err());
    let table = EquilibriumTable::new(vec![1.0 * UM, 10.0 * UM], vec![-1e-12, -1e-16]).unwrap();
    assert!(sweep(&system, &[20.0 * UM], Some(&table), &ctl).is_err());
}
