mod common;

use common::{rel_close, REFERENCE_EX1_THETA, REFERENCE_EX2_THETA};
use vihpm::engine::Theta;
use vihpm::problem::builtin;
use vihpm::solver::{bc_residuals, fd_jacobian, solve};

#[test]
fn example_constants() {
    let one = solve(&builtin(1).unwrap()).unwrap();
    for (got, want) in one.theta.values().iter().zip(REFERENCE_EX1_THETA) {
        assert!((got - want).abs() <= 1e-7, "{got} vs {want}");
    }
    let two = solve(&builtin(2).unwrap()).unwrap();
    for (got, want) in two.theta.values().iter().zip(REFERENCE_EX2_THETA) {
        assert!((got - want).abs() <= 1e-7, "{got} vs {want}");
    }
}

#[test]
fn printed_constants_already_satisfy_example_1() {
    let r = bc_residuals(&builtin(1).unwrap(), &Theta(REFERENCE_EX1_THETA.to_vec())).unwrap();
    assert!(r.iter().all(|v| v.abs() <= 1e-10), "{r:?}");
}

#[test]
fn final_series_coefficients() {
    let one = solve(&builtin(1).unwrap()).unwrap();
    assert!((one.solution.coeff(7) + 0.00694444).abs() < 5e-9);
    assert!((one.solution.coeff(8) + 0.00119048).abs() < 5e-9);
    assert!((one.solution.eval(0.5) - 0.41218).abs() < 1e-5);
    let two = solve(&builtin(2).unwrap()).unwrap();
    assert!((two.solution.coeff(7) - 0.000198413).abs() < 5e-10);
}

#[test]
fn newton_iteration_counts() {
    let one = solve(&builtin(1).unwrap()).unwrap();
    assert!(one.converged && one.newton_iterations <= 2);
    assert!(one.bc_residual_norm <= 1e-12);
    for n in 2..=4 {
        let r = solve(&builtin(n).unwrap()).unwrap();
        assert!(r.converged && r.newton_iterations <= 10, "example {n}");
    }
}

#[test]
fn every_condition_holds_after_convergence() {
    for n in 1..=4 {
        let spec = builtin(n).unwrap();
        let result = solve(&spec).unwrap();
        for bc in &spec.bcs {
            let got = result
                .solution
                .eval_derivative(bc.derivative_order, bc.point);
            let tol = if bc.at_origin() {
                1e-15 * bc.value.abs().max(1.0)
            } else {
                1e-10
            };
            assert!(
                (got - bc.value).abs() <= tol,
                "example {n}: {bc:?} gives {got}"
            );
        }
    }
}

#[test]
fn jacobian_is_step_consistent() {
    let spec = builtin(2).unwrap();
    let theta = solve(&spec).unwrap().theta;
    let full = fd_jacobian(&spec, &theta, 1.0).unwrap();
    let half = fd_jacobian(&spec, &theta, 0.5).unwrap();
    for (row_full, row_half) in full.iter().zip(&half) {
        for (a, b) in row_full.iter().zip(row_half) {
            assert!(rel_close(*a, *b, 1e-4), "{a} vs {b}");
        }
    }
}

#[test]
fn solves_are_deterministic() {
    for n in 1..=4 {
        let spec = builtin(n).unwrap();
        let a = solve(&spec).unwrap();
        let b = solve(&spec).unwrap();
        let bits = |t: &Theta| t.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.theta), bits(&b.theta));
    }
}

#[test]
fn concurrent_solves_agree() {
    let handles: Vec<_> = (1..=4)
        .map(|n| std::thread::spawn(move || solve(&builtin(n).unwrap()).unwrap()))
        .collect();
    for (n, h) in (1..=4).zip(handles) {
        assert_eq!(h.join().unwrap(), solve(&builtin(n).unwrap()).unwrap());
    }
}
