use distvote_lp::{
    check_point, check_solution, solve, LinearProgram, LpStatus, Relation, TAU_LP,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random LP with a known feasible point `x0 >= 0`: every row is built so
/// that `x0` satisfies it, plus a box `x <= 10` keeping it bounded.
fn random_feasible_lp(seed: u64) -> (LinearProgram, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=6);
    let m = rng.gen_range(1..=8);
    let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..5.0)).collect();
    let obj = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let mut lp = LinearProgram::new(obj).unwrap();
    for _ in 0..m {
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let act: f64 = a.iter().zip(&x0).map(|(a, x)| a * x).sum();
        match rng.gen_range(0..3) {
            0 => lp.add_constraint(a, Relation::Le, act + rng.gen_range(0.0..2.0)),
            1 => lp.add_constraint(a, Relation::Ge, act - rng.gen_range(0.0..2.0)),
            _ => lp.add_constraint(a, Relation::Eq, act),
        }
        .unwrap();
    }
    for j in 0..n {
        lp.add_sparse(&[(j, 1.0)], Relation::Le, 10.0).unwrap();
    }
    (lp, x0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn optimal_solutions_pass_the_audit(seed in any::<u64>()) {
        let (lp, x0) = random_feasible_lp(seed);
        let sol = solve(&lp).unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        let res = check_solution(&lp, &sol);
        prop_assert!(res.certifies_optimality(TAU_LP), "{res:?}");
        // weak duality: the known feasible point cannot beat the optimum
        let at_x0 = check_point(&lp, &x0);
        prop_assert!(at_x0.is_feasible(1e-9));
        prop_assert!(at_x0.objective <= sol.objective_value + TAU_LP);
        prop_assert!(at_x0.objective <= res.dual.unwrap().objective + TAU_LP);
    }

    #[test]
    fn identical_programs_pivot_identically(seed in any::<u64>()) {
        let (lp, _) = random_feasible_lp(seed);
        let a = solve(&lp).unwrap();
        let b = solve(&lp.clone()).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn perturbed_point_is_reported_infeasible() {
    // max x + y, x + y <= 1
    let mut lp = LinearProgram::new(vec![1.0, 1.0]).unwrap();
    lp.add_constraint(vec![1.0, 1.0], Relation::Le, 1.0).unwrap();
    let sol = solve(&lp).unwrap();
    assert!(check_solution(&lp, &sol).certifies_optimality(TAU_LP));
    let bad = check_point(&lp, &[0.7, 0.7]);
    assert!(bad.max_violation > TAU_LP);
    assert_eq!(bad.worst_constraint, Some(0));
    let negative = check_point(&lp, &[-0.5, 0.0]);
    assert!(negative.max_violation > TAU_LP);
    assert_eq!(negative.worst_constraint, None);
}

#[test]
fn dump_is_stable() {
    let mut lp = LinearProgram::new(vec![1.0, 0.0, -2.0]).unwrap();
    lp.add_sparse(&[(0, 1.0), (2, -1.0)], Relation::Ge, 0.5).unwrap();
    lp.add_sparse(&[(1, 1.0)], Relation::Eq, 1.0).unwrap();
    let text = lp.to_string();
    assert_eq!(
        text,
        "maximize 1 x0 - 2 x2\nsubject to\n  c0: 1 x0 - 1 x2 >= 0.5\n  c1: 1 x1 = 1\n  x >= 0 (3 vars)"
    );
}

#[test]
fn rejects_malformed_rows() {
    let mut lp = LinearProgram::new(vec![1.0, 1.0]).unwrap();
    assert!(lp.add_constraint(vec![1.0], Relation::Le, 1.0).is_err());
    assert!(lp.add_constraint(vec![1.0, 1.0], Relation::Le, f64::NAN).is_err());
    assert!(LinearProgram::new(vec![f64::INFINITY]).is_err());
}
