//! Charges, energy bookkeeping and their behaviour under refinement.

use noether_core::currents::current_for;
use noether_core::jet::{JetExpr, JetPoint, MultiIndex};
use noether_core::model::{dilation_weight, Damping, ModelSpec, Nonlinearity};
use noether_core::param::ParamField;
use noether_core::symmetry;
use noether_numerics::diagnostics::*;
use noether_numerics::grid::GridSpec;
use noether_numerics::law::NumericModel;
use noether_numerics::solver::*;
use num_rational::BigRational;

fn cubic(n: usize, damping: Damping) -> ModelSpec {
    ModelSpec::new(n, damping, Nonlinearity::Power { f0: ParamField::one(), p: ParamField::from_int(3) })
}

fn big(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

/// `u = e^{−r²/2}(1 + x₁/3)`, `u_t = x₂ e^{−r²/2}` at `t = 1.5`.
fn smooth(x: [f64; 2]) -> (f64, f64, f64, f64) {
    let g = (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp();
    let u = g * (1.0 + x[0] / 3.0);
    let ut = x[1] * g;
    let u1 = g * (1.0 / 3.0 - x[0] * (1.0 + x[0] / 3.0));
    let u2 = -x[1] * u;
    (u, ut, u1, u2)
}

fn compiled_vs_exact(density: &JetExpr, spec: &ModelSpec, points: usize) -> f64 {
    let grid = GridSpec::cube(2, 12.0, points).unwrap();
    let t = 1.5;
    let snap = Snapshot {
        index: 0,
        t,
        u: grid.sample(|x| smooth(x).0),
        ut: grid.sample(|x| smooth(x).1),
    };
    let cd = compile_density("d", density, spec, &[]).unwrap();
    let field = cd.eval_field(&snap, &grid).unwrap();
    let mut worst = 0.0f64;
    for idx in (0..grid.len()).step_by(7) {
        let x = grid.position(idx);
        let (u, ut, u1, u2) = smooth(x);
        let mut pt = JetPoint {
            t: big(t),
            x: vec![big(x[0]), big(x[1])],
            u: big(u),
            mu: big(t),
            damp: vec![big(1.0 / t), big(-1.0 / (t * t))],
            ..Default::default()
        };
        pt.derivs.insert(MultiIndex::single(0), big(ut));
        pt.derivs.insert(MultiIndex::single(1), big(u1));
        pt.derivs.insert(MultiIndex::single(2), big(u2));
        let exact = density.eval_f64(&pt).unwrap();
        worst = worst.max((field[idx] - exact).abs());
    }
    worst
}

#[test]
fn compiled_densities_agree_with_symbolic_evaluation_to_second_order() {
    let spec = cubic(2, Damping::Power(ParamField::one()));
    let gens = [
        symmetry::translation(2, 1),
        symmetry::rotation(2, 1, 2),
        symmetry::dilation(2, &dilation_weight(2, &ParamField::one())),
    ];
    for v in gens {
        let density = current_for(&v, &spec).unwrap().density;
        let e1 = compiled_vs_exact(&density, &spec, 96);
        let e2 = compiled_vs_exact(&density, &spec, 192);
        let order = error_order(e1, e2);
        assert!(e1 < 1e-2 && (order - 2.0).abs() < 0.2, "{}: {e1:e} {e2:e}", v.name());
    }
}

fn momentum_drift_1d(points: usize, ut: UtEstimate) -> f64 {
    let spec = cubic(1, Damping::Power(ParamField::one()));
    let grid = GridSpec::cube(1, 40.0, points).unwrap();
    let init = InitialData::Gaussian { amplitude: 1.0, center: vec![0.0], width: 1.0, velocity: Velocity::Translating { axis: 1 } };
    let mut cfg = RunConfig::new(NumericModel::from_spec(&spec, &[]).unwrap(), grid.clone(), 6.0, init);
    cfg.stride = points / 64;
    cfg.ut_estimate = ut;
    let run = simulate(&cfg).unwrap().completed().unwrap();
    let cd = compile_density("P_1", &current_for(&symmetry::translation(1, 1), &spec).unwrap().density, &spec, &[]).unwrap();
    drift_report(&charge_series(&run.snapshots, &cd, &grid).unwrap()).unwrap().relative
}

#[test]
fn momentum_drift_contracts_at_second_order() {
    let d: Vec<f64> = [128, 256, 512].iter().map(|&n| momentum_drift_1d(n, UtEstimate::Centered)).collect();
    for w in d.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.0..=5.0).contains(&ratio), "{:?}", d);
    }
}

#[test]
fn forward_time_differences_only_reach_first_order() {
    let d: Vec<f64> = [128, 256, 512].iter().map(|&n| momentum_drift_1d(n, UtEstimate::Forward)).collect();
    let order = error_order(d[1], d[2]);
    assert!((order - 1.0).abs() < 0.3, "{:?}", d);
}

#[test]
fn corrupted_density_drifts_at_order_one() {
    let spec = cubic(1, Damping::Power(ParamField::one()));
    let grid = GridSpec::cube(1, 40.0, 512).unwrap();
    let init = InitialData::Gaussian { amplitude: 1.0, center: vec![0.0], width: 1.0, velocity: Velocity::Translating { axis: 1 } };
    let mut cfg = RunConfig::new(NumericModel::from_spec(&spec, &[]).unwrap(), grid.clone(), 6.0, init);
    cfg.stride = 8;
    let run = simulate(&cfg).unwrap().completed().unwrap();
    // Dropping μ from the momentum density.
    let wrong = JetExpr::ud(1) * JetExpr::ud(0);
    let cd = compile_density("P_1 without mu", &wrong, &spec, &[]).unwrap();
    let drift = drift_report(&charge_series(&run.snapshots, &cd, &grid).unwrap()).unwrap();
    assert!(drift.relative > 0.1, "{:?}", drift);
}

fn energy_run(spec: &ModelSpec, points: usize, t_end: f64) -> EnergyReport {
    let grid = GridSpec::cube(spec.n, 24.0, points).unwrap();
    let init = InitialData::Gaussian { amplitude: 1.0, center: vec![0.0; spec.n], width: 1.0, velocity: Velocity::Zero };
    let cfg = RunConfig::new(NumericModel::from_spec(spec, &[]).unwrap(), grid, t_end, init);
    let mut log = EnergyLog::new();
    simulate_with(&cfg, |v| log.observe(v)).unwrap();
    energy_decay_check(&log).unwrap()
}

#[test]
fn linear_undamped_energy_is_conserved_to_rounding() {
    let spec = ModelSpec::new(1, Damping::None, Nonlinearity::Power { f0: ParamField::one(), p: ParamField::one() });
    let r = energy_run(&spec, 256, 60.0);
    assert!(r.max_relative_change < 1e-12, "{:?}", r);
}

#[test]
fn nonlinear_undamped_energy_error_scales_with_dt_squared() {
    let spec = cubic(1, Damping::None);
    let coarse = energy_run(&spec, 128, 20.0);
    let fine = energy_run(&spec, 256, 20.0);
    assert!(coarse.monotone && fine.monotone);
    let order = error_order(coarse.max_relative_change, fine.max_relative_change);
    assert!((order - 2.0).abs() < 0.3, "{:?} {:?}", coarse, fine);
}

#[test]
fn damped_energy_decays_and_balances_at_second_order() {
    let spec = cubic(1, Damping::Power(ParamField::one()));
    let r: Vec<EnergyReport> = [128, 256, 512].iter().map(|&n| energy_run(&spec, n, 8.0)).collect();
    for x in &r {
        assert!(x.strictly_decreasing && x.max_increase == 0.0, "{:?}", x);
    }
    for w in r.windows(2) {
        let order = error_order(w[0].balance_residual, w[1].balance_residual);
        assert!((order - 2.0).abs() < 0.3, "{:?}", r);
    }
}

#[test]
fn linear_damped_balance_is_exact() {
    let spec = ModelSpec::new(1, Damping::Power(ParamField::from_int(2)), Nonlinearity::Power { f0: ParamField::one(), p: ParamField::one() });
    let r = energy_run(&spec, 256, 8.0);
    assert!(r.balance_residual < 1e-12 && r.strictly_decreasing, "{:?}", r);
}
