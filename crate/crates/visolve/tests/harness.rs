use std::path::Path;

use proptest::prelude::*;
use visolve::format::{parse_config, read_trace, render_config, write_trace, RunConfig, TraceRow};
use visolve::harness::{
    build_preset, compare, run_preset, sweep, trace_rows, CellOutcome, PresetName, SweepCell, SweepGrid,
    NETWORK_SENSITIVITY,
};
use visolve_core::AlgorithmVariant;

#[test]
fn presets_round_trip_through_config_files() {
    for name in PresetName::ALL {
        let p = build_preset(name).unwrap();
        let text = render_config(&p.config);
        let back = parse_config(Path::new("preset"), &text, RunConfig::default()).unwrap();
        assert_eq!(back, p.config, "{name}");
    }
}

#[test]
fn preset_runs_are_deterministic() {
    for name in PresetName::ALL {
        let p = build_preset(name).unwrap();
        let a = run_preset(&p).unwrap();
        let b = run_preset(&p).unwrap();
        assert_eq!(a.result.x, b.result.x, "{name}");
        assert_eq!(trace_rows(&a.result, false), trace_rows(&b.result, false), "{name}");
    }
}

#[test]
fn written_traces_read_back_equal() {
    let p = build_preset(PresetName::Nash52).unwrap();
    let rows = trace_rows(&run_preset(&p).unwrap().result, true);
    let mut buf = Vec::new();
    write_trace(&mut buf, &rows).unwrap();
    assert_eq!(read_trace(buf.as_slice()).unwrap(), rows);
}

proptest! {
    #[test]
    fn arbitrary_trace_rows_round_trip(
        rows in prop::collection::vec(
            (0usize..100_000, any::<f64>(), any::<f64>(), prop::option::of(any::<f64>()), any::<f64>(), prop::option::of(any::<f64>())),
            0..20,
        )
    ) {
        let rows: Vec<TraceRow> = rows
            .into_iter()
            .map(|(n, residual, lambda, dist_to_solution, step_norm, elapsed_ms)| TraceRow {
                n, residual, lambda, dist_to_solution, step_norm, elapsed_ms,
            })
            .collect();
        let mut buf = Vec::new();
        write_trace(&mut buf, &rows).unwrap();
        let back = read_trace(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (a, b) in back.iter().zip(&rows) {
            // bit patterns, so NaN compares equal to itself
            let bits = |r: &TraceRow| {
                (r.n, r.residual.to_bits(), r.lambda.to_bits(), r.dist_to_solution.map(f64::to_bits),
                 r.step_norm.to_bits(), r.elapsed_ms.map(f64::to_bits))
            };
            let (x, y) = (bits(a), bits(b));
            if a.residual.is_nan() || a.lambda.is_nan() || a.step_norm.is_nan()
                || a.dist_to_solution.is_some_and(f64::is_nan) || a.elapsed_ms.is_some_and(f64::is_nan) {
                prop_assert_eq!(x.0, y.0);
            } else {
                prop_assert_eq!(x, y);
            }
        }
    }
}

#[test]
fn single_cell_sweep_matches_preset() {
    let p = build_preset(PresetName::Network51).unwrap();
    let run = run_preset(&p).unwrap();
    let s = &p.config.solver;
    let grid = SweepGrid { cells: vec![SweepCell { mu: s.mu, sigma: s.sigma, beta: s.beta }] };
    let res = sweep(&p.problem, &grid, &p.config, p.variant, &p.x0).unwrap();
    assert_eq!(res.len(), 1);
    assert_eq!(res[0].outcome.converged_iterations(), Some(run.result.iterations));
    assert_eq!(res[0].error_inf, run.summary.error_inf);
}

#[test]
fn beta_perturbations_all_converge() {
    let p = build_preset(PresetName::Network51).unwrap();
    let grid = SweepGrid::cartesian(&[0.6], &[0.72, 0.8, 0.88], &[1.5]);
    let res = sweep(&p.problem, &grid, &p.config, p.variant, &p.x0).unwrap();
    assert_eq!(p.config.stop.max_iter, 10_000);
    // 0.72 is below sigma/2 = 0.75, so the gate refuses it
    assert!(matches!(res[0].outcome, CellOutcome::ConfigViolation(_)), "{:?}", res[0]);
    for r in &res[1..] {
        assert!(r.outcome.converged_iterations().is_some(), "{r:?}");
    }
    // run ungated it still converges
    let mut cfg = p.config.solver.clone();
    cfg.beta = 0.72;
    let r = visolve_core::run(&p.problem, &cfg, p.variant, p.config.stop, p.x0.clone(), None).unwrap();
    assert_ne!(r.termination, visolve_core::Termination::MaxIter);
}

#[test]
fn sensitivity_grid_flags_the_out_of_range_cell() {
    let p = build_preset(PresetName::Network51).unwrap();
    let mut cfg = p.config.clone();
    cfg.stop.max_iter = 5000;
    let res = sweep(&p.problem, &SweepGrid::from_table(&NETWORK_SENSITIVITY), &cfg, p.variant, &p.x0).unwrap();
    assert_eq!(res.len(), 36);
    let violations: Vec<_> =
        res.iter().filter(|r| matches!(r.outcome, CellOutcome::ConfigViolation(_))).map(|r| r.cell).collect();
    assert_eq!(violations, vec![SweepCell { mu: 0.2323, sigma: 1.8, beta: 4.6 }]);
    // sorted by (mu, sigma, beta)
    let keys: Vec<_> = res.iter().map(|r| (r.cell.mu, r.cell.sigma, r.cell.beta)).collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
    let cell = res.iter().find(|r| r.cell == SweepCell { mu: 0.464, sigma: 1.8, beta: 1.23 }).unwrap();
    let iters = cell.outcome.converged_iterations().unwrap();
    assert!(iters <= 3 * 47, "{iters}");
}

#[test]
fn empty_sweep_is_an_error() {
    let p = build_preset(PresetName::Network51).unwrap();
    assert!(sweep(&p.problem, &SweepGrid::default(), &p.config, p.variant, &p.x0).is_err());
}

#[test]
fn comparison_rows() {
    let p = build_preset(PresetName::Network51).unwrap();
    let rows = compare(&p.problem, &[AlgorithmVariant::Mdisem, AlgorithmVariant::NoInertia], &p.config, &p.x0).unwrap();
    assert!(rows[1].iterations >= rows[0].iterations);

    let dup = compare(&p.problem, &[AlgorithmVariant::Mdisem; 2], &p.config, &p.x0).unwrap();
    assert_eq!((dup[0].iterations, dup[0].final_residual, dup[0].error_inf), (dup[1].iterations, dup[1].final_residual, dup[1].error_inf));

    assert!(compare(&p.problem, &[AlgorithmVariant::Mdisem], &p.config, &p.x0).is_err());
}

#[test]
fn simplified_variant_equals_mdisem_with_its_parameters() {
    let p = build_preset(PresetName::Network51).unwrap();
    let mut reduced = p.clone();
    reduced.config.solver = AlgorithmVariant::Simplified41a.effective_config(&p.config.solver);
    let mut simplified = p.clone();
    simplified.variant = AlgorithmVariant::Simplified41a;
    let (a, b) = (run_preset(&reduced).unwrap(), run_preset(&simplified).unwrap());
    assert_eq!(trace_rows(&a.result, false), trace_rows(&b.result, false));
}
