//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero when
//! any criterion fails.
//!
//! Run with `cargo test -p ltstep --test acceptance` (add `--release` for the timing
//! limits to be meaningful).

use std::sync::Arc;
use std::time::{Duration, Instant};

use ltstep::cli::{compare, convergence_study, RunConfig};
use ltstep::diagnostics::{conservativity_defect, energy_balance};
use ltstep::scheme::{assemble_monolithic_window, WindowSolution};
use ltstep::solver::{march_from, solve_linear, LevelState};
use ltstep::{
    build_composite_grid, inject_coarse_to_fine, manufactured_problem, march, project_fine_to_coarse, solve_window,
    CompositeGrid, GridConfig, InterfaceScheme, Master, Problem, SolveMode, Trace, Variant,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const IS2_FINE: Variant = Variant::new(InterfaceScheme::CellNeighbours, Master::Fine);
const IS2_COARSE: Variant = Variant::new(InterfaceScheme::CellNeighbours, Master::Coarse);

struct Verdict {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn reference() -> (CompositeGrid, Problem) {
    (build_composite_grid(&GridConfig::reference()).unwrap(), manufactured_problem())
}

fn converged(eps: f64) -> SolveMode {
    SolveMode::Converged { eps, max_iters: 100 }
}

fn reference_iterations() -> Verdict {
    let (grid, problem) = reference();
    let start = Instant::now();
    let (_, fine) = march(&grid, IS2_FINE, converged(1e-5), &problem).unwrap();
    let (_, coarse) = march(&grid, IS2_COARSE, converged(1e-5), &problem).unwrap();
    let elapsed = start.elapsed();
    let (mf, mc) = (fine.mean_iterations(), coarse.mean_iterations());
    let pass = fine.converged()
        && coarse.converged()
        && (3.0..=9.0).contains(&mf)
        && (5.0..=11.0).contains(&mc)
        && elapsed < Duration::from_secs(1);
    Verdict {
        name: "reference run iteration counts",
        pass,
        detail: format!(
            "mean iterations is2-fine {mf:.1} (band 3..9, per window {:?}), is2-coarse {mc:.1} (band 5..11, per window {:?}), {:.3} s (limit 1 s)",
            fine.iterations(),
            coarse.iterations(),
            elapsed.as_secs_f64()
        ),
    }
}

fn accuracy_ordering() -> Verdict {
    let rows = compare(&RunConfig::default()).unwrap();
    let get = |m: &str| rows.iter().find(|r| r.method == m).unwrap();
    let coarse = get("uniform-coarse");
    let fine = get("uniform-fine");
    let mut ok = true;
    let mut parts = Vec::new();
    for v in Variant::ALL {
        let r = get(v.name());
        if !r.converged {
            parts.push(format!("{} not converged, left out", v.name()));
            continue;
        }
        ok &= r.final_l2_error < coarse.final_l2_error;
        parts.push(format!("{} {:.4e}", v.name(), r.final_l2_error));
    }
    parts.push(format!("uniform-coarse {:.4e}", coarse.final_l2_error));
    for v in ["is1-fine", "is2-fine"] {
        let r = get(v);
        let ratio = r.final_l2_fine / fine.final_l2_fine;
        ok &= r.converged && ratio <= 2.0;
        parts.push(format!("{v} fine-region error / uniform-fine {ratio:.2} (limit 2)"));
    }
    Verdict {
        name: "accuracy against uniform time steps",
        pass: ok,
        detail: parts.join("; "),
    }
}

fn conservativity() -> Verdict {
    let (grid, problem) = reference();
    let mut worst = 0.0_f64;
    let mut parts = Vec::new();
    for v in Variant::ALL {
        for mode in [converged(1e-5), SolveMode::SingleIteration] {
            let (traj, report) = march(&grid, v, mode, &problem).unwrap();
            for (traces, w) in traj.traces.iter().zip(&report.windows) {
                let scale = traces.fine_flux.max_abs().max(traces.coarse_flux.max_abs()).max(1.0);
                let d = conservativity_defect(&traces.fine_flux, &traces.coarse_flux, grid.dt_fine(), grid.dt_coarse());
                assert_eq!(d, w.conservativity_defect);
                worst = worst.max(d / scale);
            }
            if !report.converged() {
                parts.push(format!("{v} {mode} did not converge"));
            }
        }
    }
    let pass = worst <= 1e-12;
    Verdict {
        name: "conservativity in every window",
        pass,
        detail: format!(
            "worst defect / max(1, flux scale) {worst:.2e} (limit 1e-12) over 4 variants x (converged, single-iteration){}",
            if parts.is_empty() { String::new() } else { format!("; {}", parts.join(", ")) }
        ),
    }
}

/// Smooth random data: a few sine modes in space, linear in time.
fn random_problem(rng: &mut StdRng) -> Problem {
    let modes: Vec<(f64, f64, f64, f64)> = (1..=3)
        .map(|m| (m as f64, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..6.3), rng.gen_range(-1.0..1.0)))
        .collect();
    let init: Vec<(f64, f64, f64)> = (1..=3)
        .map(|m| (m as f64, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..6.3)))
        .collect();
    let (g0, g1, h0, h1): (f64, f64, f64, f64) =
        (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let pi = std::f64::consts::PI;
    Problem::new(
        Arc::new(move |x, t| {
            modes
                .iter()
                .map(|&(m, a, ph, b)| a * (m * pi * x + ph).sin() * (1.0 + b * t))
                .sum()
        }),
        Arc::new(move |t| g0 + g1 * t),
        Arc::new(move |t| h0 + h1 * t),
        Arc::new(move |x| init.iter().map(|&(m, c, ph)| c * (m * pi * x + ph).sin()).sum()),
    )
}

fn max_diff(a: &WindowSolution, b: &WindowSolution) -> f64 {
    let fa = a.fine.levels.iter().chain(&a.coarse.levels).flatten();
    let fb = b.fine.levels.iter().chain(&b.coarse.levels).flatten();
    fa.zip(fb).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

fn oracle_equivalence() -> Verdict {
    const SAMPLES: usize = 300;
    let mut rng = StdRng::seed_from_u64(20_261_015);
    let mut matched = [0usize; 4];
    let mut worst = [0.0_f64; 4];
    let mut failed_ratios: [Vec<usize>; 4] = Default::default();
    for _ in 0..SAMPLES {
        let nf = rng.gen_range(4..=8);
        let nc = rng.gen_range(4..=8);
        let k = rng.gen_range(1..=3);
        let r: f64 = rng.gen_range(2.0..5.0);
        let xi = nf as f64 / (nf as f64 + r * nc as f64);
        let dt2 = 10f64.powf(rng.gen_range(-3.0..(0.02f64).log10()));
        let cfg = GridConfig::uniform((0.0, 1.0), xi, (nf, nc), dt2 / k as f64, dt2, dt2);
        let grid = build_composite_grid(&cfg).unwrap();
        let problem = random_problem(&mut rng);
        let state = LevelState::initial(&grid, &problem);
        for (i, v) in Variant::ALL.into_iter().enumerate() {
            let mode = SolveMode::Converged { eps: 1e-11, max_iters: 2000 };
            let (iter, rep) = solve_window(&grid, 0, &state, v, mode, &problem).unwrap();
            let (direct, _) = solve_window(&grid, 0, &state, v, SolveMode::Direct, &problem).unwrap();
            let d = if rep.converged { max_diff(&iter, &direct) } else { f64::INFINITY };
            if d <= 1e-8 {
                matched[i] += 1;
                worst[i] = worst[i].max(d);
            } else if !failed_ratios[i].contains(&k) {
                failed_ratios[i].push(k);
            }
        }
    }
    let pass = matched.iter().all(|&m| m == SAMPLES);
    let detail = Variant::ALL
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut s = format!("{v} {}/{SAMPLES} (worst {:.1e})", matched[i], worst[i]);
            if !failed_ratios[i].is_empty() {
                failed_ratios[i].sort();
                s += &format!(" misses at K in {:?}", failed_ratios[i]);
            }
            s
        })
        .collect::<Vec<_>>()
        .join("; ");
    Verdict {
        name: "iterative window solve matches the direct solve (tol 1e-8)",
        pass,
        detail,
    }
}

fn order_of_accuracy() -> Verdict {
    let problem = manufactured_problem();
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for v in Variant::ALL {
        let rows = convergence_study(&GridConfig::reference(), 4, v, SolveMode::Direct, &problem, false).unwrap();
        let l2: Vec<f64> = rows[1..].iter().map(|r| r.order_l2.unwrap_or(f64::NAN)).collect();
        let h1: Vec<f64> = rows[1..].iter().map(|r| r.order_h1.unwrap_or(f64::NAN)).collect();
        let good = l2.iter().chain(&h1).all(|&p| p >= 0.8);
        ok &= good;
        let fmt = |p: &[f64]| p.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(" ");
        parts.push(format!("{v} L2 [{}] H1 [{}]", fmt(&l2), fmt(&h1)));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(30);
    Verdict {
        name: "observed orders >= 0.8 over 4 levels",
        pass: ok,
        detail: format!("{}; {:.2} s (limit 30 s)", parts.join("; "), elapsed.as_secs_f64()),
    }
}

fn energy_stability() -> Verdict {
    let grid = build_composite_grid(&GridConfig::reference()).unwrap();
    let problem = Problem::zero();
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst = f64::NEG_INFINITY;
    let pi = std::f64::consts::PI;
    for _ in 0..20 {
        let coeffs: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p0 = move |x: f64| {
            coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| c * ((m + 1) as f64 * pi * x).sin())
                .sum::<f64>()
        };
        let sample = |c: &[f64]| c.iter().map(|&x| p0(x)).collect();
        let initial = LevelState {
            fine: sample(grid.fine().centers()),
            coarse: sample(grid.coarse().centers()),
        };
        for v in Variant::ALL {
            let (traj, _) = march_from(&grid, v, SolveMode::Direct, &problem, initial.clone()).unwrap();
            let e = energy_balance(&traj, &problem, &grid).unwrap();
            worst = worst.max((e.lhs() - e.rhs()) / e.rhs());
        }
    }
    Verdict {
        name: "energy estimate with zero data",
        pass: worst <= 1e-10,
        detail: format!("worst (lhs - rhs) / rhs {worst:.3e} over 20 initial states x 4 variants (limit 1e-10)"),
    }
}

fn well_posedness() -> Verdict {
    let grid = build_composite_grid(&GridConfig::reference()).unwrap();
    let zero = Problem::zero();
    let mut worst = 0.0_f64;
    for v in Variant::ALL {
        for mode in [converged(1e-5), SolveMode::SingleIteration, SolveMode::PredictorOnly, SolveMode::Direct] {
            let (traj, _) = march(&grid, v, mode, &zero).unwrap();
            worst = worst.max(traj.max_abs());
        }
    }
    let problem = manufactured_problem();
    let state = LevelState::initial(&grid, &problem);
    let mut factored = 0;
    for v in Variant::ALL {
        let sys = assemble_monolithic_window(&grid, &problem, v, 0, &state.fine, &state.coarse).unwrap();
        if solve_linear(&sys).is_ok() {
            factored += 1;
        }
    }
    Verdict {
        name: "zero data gives zero, window matrices nonsingular",
        pass: worst <= 1e-13 && factored == 4,
        detail: format!("max |p| on zero data {worst:.1e} (limit 1e-13); {factored}/4 window matrices factored"),
    }
}

fn projection_adjointness() -> Verdict {
    let mut rng = StdRng::seed_from_u64(42);
    let mut worst = 0.0_f64;
    for i in 0..1000 {
        let k = [1, 2, 3, 10][i % 4];
        let dt1: f64 = rng.gen_range(1e-4..1.0);
        let fine: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let coarse: f64 = rng.gen_range(-1.0..1.0);
        let u = Trace::fine(fine, dt1);
        let w = Trace::coarse(coarse, dt1 * k as f64);
        let lhs = w.dt() * project_fine_to_coarse(&u, k).unwrap().at(0) * coarse;
        let injected = inject_coarse_to_fine(&w, k).unwrap();
        let rhs: f64 = u.values().iter().zip(injected.values()).map(|(a, b)| dt1 * a * b).sum();
        let scale: f64 = u.values().iter().map(|a| dt1 * (a * coarse).abs()).sum();
        worst = worst.max((lhs - rhs).abs() / scale.max(f64::MIN_POSITIVE));
    }
    Verdict {
        name: "projections are adjoint",
        pass: worst <= 1e-14,
        detail: format!("worst relative gap {worst:.1e} over 1000 pairs, K in {{1,2,3,10}} (limit 1e-14)"),
    }
}

fn main() {
    let checks: [(&str, fn() -> Verdict); 8] = [
        ("1", reference_iterations),
        ("2", accuracy_ordering),
        ("3", conservativity),
        ("4", oracle_equivalence),
        ("5", order_of_accuracy),
        ("6", energy_stability),
        ("7", well_posedness),
        ("8", projection_adjointness),
    ];
    let mut failed = 0;
    for (id, check) in checks {
        let v = check();
        println!("[{}] {id}. {}: {}", if v.pass { "PASS" } else { "FAIL" }, v.name, v.detail);
        if !v.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
