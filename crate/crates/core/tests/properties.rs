use ltstep::scheme::coupling_residuals;
use ltstep::solver::LevelState;
use ltstep::{build_composite_grid, manufactured_problem, solve_window, GridConfig, SolveMode, Variant};
use proptest::prelude::*;

fn grid_strategy() -> impl Strategy<Value = GridConfig> {
    (2usize..10, 2usize..10, 1usize..5, 0.15f64..0.6, 0.002f64..0.05).prop_map(|(nf, nc, k, xi, dt2)| {
        GridConfig::uniform((0.0, 1.0), xi, (nf, nc), dt2 / k as f64, dt2, 2.0 * dt2)
    })
}

fn mode_strategy() -> impl Strategy<Value = SolveMode> {
    prop_oneof![
        Just(SolveMode::SingleIteration),
        Just(SolveMode::PredictorOnly),
        Just(SolveMode::Direct),
        Just(SolveMode::Converged { eps: 1e-6, max_iters: 5 }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_mode_is_conservative(cfg in grid_strategy(), mode in mode_strategy(), v in 0usize..4) {
        let grid = build_composite_grid(&cfg).unwrap();
        let problem = manufactured_problem();
        let state = LevelState::initial(&grid, &problem);
        let (sol, rep) = solve_window(&grid, 0, &state, Variant::ALL[v], mode, &problem).unwrap();
        let scale = sol.fine.flux.max_abs().max(sol.coarse.flux.max_abs()).max(1.0);
        prop_assert!(rep.conservativity_defect <= 1e-12 * scale);
    }

    #[test]
    fn direct_solve_meets_both_interface_conditions(cfg in grid_strategy(), v in 0usize..4) {
        let grid = build_composite_grid(&cfg).unwrap();
        let problem = manufactured_problem();
        let state = LevelState::initial(&grid, &problem);
        let variant = Variant::ALL[v];
        let (sol, _) = solve_window(&grid, 0, &state, variant, SolveMode::Direct, &problem).unwrap();
        let r = coupling_residuals(&grid, &problem, variant, &state.fine, &state.coarse, &sol).unwrap();
        let scale = sol.fine.flux.max_abs().max(1.0);
        prop_assert!(r.dirichlet <= 1e-10 * scale && r.neumann <= 1e-10 * scale, "{r:?}");
    }

    #[test]
    fn solutions_scale_linearly_with_the_data(cfg in grid_strategy(), v in 0usize..4, c in -3.0f64..3.0) {
        let grid = build_composite_grid(&cfg).unwrap();
        let problem = manufactured_problem();
        let scaled = ltstep::scheme::ExponentialBump { d: -1.0 + c.abs().max(1e-3).ln(), ..ltstep::scheme::ExponentialBump::REFERENCE }
            .problem(0.0, 1.0);
        let factor = c.abs().max(1e-3);
        let s1 = LevelState::initial(&grid, &problem);
        let s2 = LevelState::initial(&grid, &scaled);
        let (a, _) = solve_window(&grid, 0, &s1, Variant::ALL[v], SolveMode::Direct, &problem).unwrap();
        let (b, _) = solve_window(&grid, 0, &s2, Variant::ALL[v], SolveMode::Direct, &scaled).unwrap();
        for (x, y) in a.fine.final_level().iter().zip(b.fine.final_level()) {
            prop_assert!((factor * x - y).abs() <= 1e-10 * (1.0 + y.abs()));
        }
    }
}
