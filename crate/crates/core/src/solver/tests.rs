use super::*;
use crate::grid::{build_composite_grid, GridConfig, Side};
use crate::scheme::{
    assemble_monolithic_window, coupling_residuals, manufactured_problem,
    unpack_monolithic, InterfaceScheme, Master,
};

fn reference() -> (CompositeGrid, Problem) {
    (build_composite_grid(&GridConfig::reference()).unwrap(), manufactured_problem())
}

fn monolithic(grid: &CompositeGrid, problem: &Problem, v: Variant, n: usize, s: &LevelState) -> WindowSolution {
    let sys = assemble_monolithic_window(grid, problem, v, n, &s.fine, &s.coarse).unwrap();
    unpack_monolithic(grid, v, n, &solve_linear(&sys).unwrap()).unwrap()
}

fn max_diff(a: &WindowSolution, b: &WindowSolution) -> f64 {
    let mut m = 0.0_f64;
    for (x, y) in a.fine.levels.iter().flatten().zip(b.fine.levels.iter().flatten()) {
        m = m.max((x - y).abs());
    }
    for (x, y) in a.coarse.levels.iter().flatten().zip(b.coarse.levels.iter().flatten()) {
        m = m.max((x - y).abs());
    }
    m
}

#[test]
fn mode_parsing_and_validation() {
    assert_eq!("converged".parse::<SolveMode>().unwrap(), SolveMode::default());
    assert_eq!("single_iteration".parse::<SolveMode>().unwrap(), SolveMode::SingleIteration);
    assert_eq!("predictor-only".parse::<SolveMode>().unwrap(), SolveMode::PredictorOnly);
    assert_eq!("direct".parse::<SolveMode>().unwrap(), SolveMode::Direct);
    assert!("fast".parse::<SolveMode>().is_err());
    assert!(SolveMode::Converged { eps: 0.0, max_iters: 3 }.validate().is_err());
    assert!(SolveMode::Converged { eps: 1e-3, max_iters: 0 }.validate().is_err());
}

#[test]
fn zero_data_predictor_is_zero() {
    let grid = build_composite_grid(&GridConfig::reference()).unwrap();
    let problem = Problem::zero();
    let s = LevelState::initial(&grid, &problem);
    let p = predictor_step(&grid, 0, &s, &problem).unwrap();
    assert!(p.fine.iter().chain(&p.coarse).all(|&v| v == 0.0));
}

#[test]
fn predictor_matches_independent_union_solve() {
    let (grid, problem) = reference();
    let s = LevelState::initial(&grid, &problem);
    let p = predictor_step(&grid, 0, &s, &problem).unwrap();

    // Whole-domain coarse step assembled by hand with a Thomas solve.
    let centers = grid.all_centers();
    let faces: Vec<f64> = grid.fine().faces().iter().chain(&grid.coarse().faces()[1..]).copied().collect();
    let n = centers.len();
    let dt = grid.dt_coarse();
    let (mut a, mut b, mut c, mut d) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let prev: Vec<f64> = s.fine.iter().chain(&s.coarse).copied().collect();
    for j in 0..n {
        let h = faces[j + 1] - faces[j];
        b[j] = h / dt;
        d[j] = h / dt * prev[j]
            + h * crate::scheme::cell_average_source(&problem, (faces[j], faces[j + 1]), (0.0, dt));
        let left = if j == 0 { faces[0] } else { centers[j - 1] };
        let right = if j == n - 1 { faces[n] } else { centers[j + 1] };
        let wl = 1.0 / (centers[j] - left);
        let wr = 1.0 / (right - centers[j]);
        b[j] += wl + wr;
        if j > 0 {
            a[j] = -wl;
        } else {
            d[j] += wl * problem.boundary_lo(dt);
        }
        if j < n - 1 {
            c[j] = -wr;
        } else {
            d[j] += wr * problem.boundary_hi(dt);
        }
    }
    for j in 1..n {
        let m = a[j] / b[j - 1];
        b[j] -= m * c[j - 1];
        d[j] -= m * d[j - 1];
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1] / b[n - 1];
    for j in (0..n - 1).rev() {
        x[j] = (d[j] - c[j] * x[j + 1]) / b[j];
    }
    let got: Vec<f64> = p.fine.iter().chain(&p.coarse).copied().collect();
    for (g, o) in got.iter().zip(&x) {
        assert!((g - o).abs() < 1e-12, "{g} vs {o}");
    }
}

#[test]
fn unit_ratio_converges_in_one_sweep() {
    let cfg = GridConfig::uniform((0.0, 1.0), 0.25, (10, 6), 0.01, 0.01, 0.03);
    let grid = build_composite_grid(&cfg).unwrap();
    let problem = manufactured_problem();
    let s = LevelState::initial(&grid, &problem);
    for v in Variant::ALL {
        let (sol, rep) = solve_window(&grid, 0, &s, v, SolveMode::default(), &problem).unwrap();
        assert_eq!(rep.iterations, 1, "{v}");
        assert!(rep.converged);
        let mono = monolithic(&grid, &problem, v, 0, &s);
        assert!(max_diff(&sol, &mono) < 1e-10, "{v}");
    }
}

#[test]
fn zero_data_is_a_fixed_point() {
    let grid = build_composite_grid(&GridConfig::reference()).unwrap();
    let problem = Problem::zero();
    let s = LevelState::initial(&grid, &problem);
    for v in Variant::ALL {
        let pred = predictor_step(&grid, 0, &s, &problem).unwrap();
        let it = initial_iterate(&grid, 0, &pred, v);
        let (next, res) = corrector_sweep(&grid, 0, &s, &it, v, &problem).unwrap();
        assert_eq!((res.dirichlet, res.neumann), (0.0, 0.0));
        assert_eq!(next, it);
    }
}

#[test]
fn flux_condition_exact_after_each_sweep() {
    let (grid, problem) = reference();
    let s = LevelState::initial(&grid, &problem);
    for v in Variant::ALL {
        let pred = predictor_step(&grid, 0, &s, &problem).unwrap();
        let mut it = initial_iterate(&grid, 0, &pred, v);
        for _ in 0..3 {
            let (next, res) = corrector_sweep(&grid, 0, &s, &it, v, &problem).unwrap();
            let scale = next.fine.flux.max_abs().max(1.0);
            assert!(res.neumann <= 1e-12 * scale, "{v}: {}", res.neumann);
            let indep = coupling_residuals(&grid, &problem, v, &s.fine, &s.coarse, &next).unwrap();
            assert!(indep.neumann <= 1e-9 * scale, "{v}: {}", indep.neumann);
            it = next;
        }
    }
}

#[test]
fn monolithic_satisfies_interface_conditions() {
    let (grid, problem) = reference();
    let s = LevelState::initial(&grid, &problem);
    for v in Variant::ALL {
        let sol = monolithic(&grid, &problem, v, 0, &s);
        let r = coupling_residuals(&grid, &problem, v, &s.fine, &s.coarse, &sol).unwrap();
        let scale = sol.fine.flux.max_abs().max(1.0);
        assert!(r.dirichlet <= 1e-12 * scale && r.neumann <= 1e-12 * scale, "{v}: {r:?}");
    }
}

#[test]
fn converged_fine_master_matches_monolithic() {
    let (grid, problem) = reference();
    let s = LevelState::initial(&grid, &problem);
    let v = Variant::new(InterfaceScheme::CellNeighbours, Master::Fine);
    let mode = SolveMode::Converged { eps: 1e-12, max_iters: 400 };
    let (sol, rep) = solve_window(&grid, 0, &s, v, mode, &problem).unwrap();
    assert!(rep.converged);
    let mono = monolithic(&grid, &problem, v, 0, &s);
    assert!(max_diff(&sol, &mono) < 1e-8);
}

#[test]
fn fine_master_residuals_decrease() {
    let (grid, problem) = reference();
    let s = LevelState::initial(&grid, &problem);
    let v = Variant::new(InterfaceScheme::CellNeighbours, Master::Fine);
    let (_, rep) = solve_window(&grid, 0, &s, v, SolveMode::default(), &problem).unwrap();
    assert!(rep.converged);
    for w in rep.residual_history.windows(2) {
        assert!(w[1].0 < w[0].0, "{:?}", rep.residual_history);
    }
}

#[test]
fn march_zero_and_determinism() {
    let grid = build_composite_grid(&GridConfig::reference()).unwrap();
    let zero = Problem::zero();
    for v in Variant::ALL {
        let (t, rep) = march(&grid, v, SolveMode::default(), &zero).unwrap();
        assert_eq!(t.max_abs(), 0.0);
        assert_eq!(t.fine.len(), grid.windows() * grid.ratio() + 1);
        assert_eq!(t.coarse.len(), grid.windows() + 1);
        assert!(rep.converged());
    }
    let problem = manufactured_problem();
    let v = Variant::new(InterfaceScheme::CellNeighbours, Master::Fine);
    let a = march(&grid, v, SolveMode::SingleIteration, &problem).unwrap();
    let b = march(&grid, v, SolveMode::SingleIteration, &problem).unwrap();
    assert_eq!(a, b);
}

#[test]
fn predictor_only_keeps_predictor_values() {
    let (grid, problem) = reference();
    let s = LevelState::initial(&grid, &problem);
    let v = Variant::new(InterfaceScheme::CellNeighbours, Master::Coarse);
    let (sol, rep) = solve_window(&grid, 0, &s, v, SolveMode::PredictorOnly, &problem).unwrap();
    let p = predictor_step(&grid, 0, &s, &problem).unwrap();
    assert_eq!(rep.iterations, 0);
    assert_eq!(sol.fine.final_level(), p.fine.as_slice());
    assert_eq!(sol.coarse.final_level(), p.coarse.as_slice());
    assert_eq!(sol.side(Side::Coarse).levels.len(), 1);
}
