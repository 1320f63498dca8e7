use drsub::algorithms::{pga, sdrfw};
use drsub::graph::Graph;
use drsub::numeric::{DenseVector, SymMatrix};
use drsub::objectives::{Objective, QuadraticObjective};
use drsub::oracles::{brute_force_stability_number, exact_stability_number, jacobi_max_eigenvalue};
use drsub::sets::{BoxSet, BudgetBoxSet, FeasibleSet, SimplexSet};
use drsub::smoothness::pf_eigenvalue;
use proptest::prelude::*;

fn vec_strategy(n: usize, lo: f64, hi: f64) -> impl Strategy<Value = DenseVector<f64>> {
    prop::collection::vec(lo..hi, n).prop_map(|v| DenseVector::new(v).unwrap())
}

fn pair(n: usize) -> impl Strategy<Value = (DenseVector<f64>, DenseVector<f64>)> {
    (vec_strategy(n, -3.0, 3.0), vec_strategy(n, -3.0, 3.0))
}

fn sets(n: usize) -> Vec<Box<dyn FeasibleSet<f64>>> {
    vec![
        Box::new(BoxSet::new(DenseVector::filled(n, 0.2), DenseVector::filled(n, 1.5)).unwrap()),
        Box::new(SimplexSet::new(n, 1.3).unwrap()),
        Box::new(BudgetBoxSet::new(1.1, DenseVector::from_fn(n, |i| 0.5 + 0.25 * i as f64)).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lattice_identities((a, b) in pair(5)) {
        let j = a.join(&b).unwrap();
        let m = a.meet(&b).unwrap();
        prop_assert!(a.dominates(&j).unwrap() && b.dominates(&j).unwrap());
        prop_assert!(m.dominates(&a).unwrap() && m.dominates(&b).unwrap());
        let sum = &j + &m;
        let direct = &a + &b;
        prop_assert!(sum.distance(&direct).unwrap() < 1e-12);
        let d = &a - &b;
        let dj = &j - &a;
        let dm = &m - &a;
        prop_assert!((dj.norm_squared() + dm.norm_squared() - d.norm_squared()).abs() < 1e-9);
    }

    #[test]
    fn projection_invariants((a, b) in pair(4)) {
        for set in sets(4) {
            let pa = set.project(&a).unwrap();
            let pb = set.project(&b).unwrap();
            prop_assert!(set.contains(&pa, 1e-9), "{} infeasible", set.name());
            let again = set.project(&pa).unwrap();
            prop_assert!(again.distance(&pa).unwrap() < 1e-10, "{} not idempotent", set.name());
            prop_assert!(pa.distance(&pb).unwrap() <= a.distance(&b).unwrap() + 1e-10);
            let alpha = 0.7;
            let reg = set.reg_linear_max(&a, alpha).unwrap();
            let direct = set.project(&a.scale(1.0 / alpha)).unwrap();
            prop_assert_eq!(reg, direct);
        }
    }

    #[test]
    fn lmo_beats_feasible_points(w in vec_strategy(4, -2.0, 2.0), y in vec_strategy(4, -1.0, 2.0)) {
        for set in sets(4) {
            let v = set.linear_max(&w).unwrap();
            let x = set.project(&y).unwrap();
            prop_assert!(set.contains(&v, 1e-12));
            prop_assert!(w.dot(&v).unwrap() >= w.dot(&x).unwrap() - 1e-12);
        }
    }

    #[test]
    fn pf_matches_jacobi(entries in prop::collection::vec(0.0f64..2.0, 36)) {
        let n = 6;
        let m = SymMatrix::from_fn(n, |i, j| entries[i * n + j] + if i + 1 == j { 0.5 } else { 0.0 });
        let pf = pf_eigenvalue(&m, 1e-12, 200_000).unwrap();
        let jac = jacobi_max_eigenvalue(&m, 1e-14).unwrap();
        prop_assert!((pf.lambda - jac).abs() < 1e-8 * jac.max(1.0));
        prop_assert!(pf.eigvec.min_entry() > 0.0);
        prop_assert!((pf.eigvec.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_stability_matches_enumeration(n in 1usize..13, mask in any::<u64>(), density in 0.1f64..0.7) {
        let mut edges = Vec::new();
        let mut bits = mask;
        let mut k = 0u64;
        for u in 0..n {
            for v in (u + 1)..n {
                k += 1;
                bits = bits.rotate_left(7) ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15);
                if ((bits >> 11) as f64 / (1u64 << 53) as f64) < density {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::new(n, edges).unwrap();
        prop_assert_eq!(exact_stability_number(&g).unwrap(), brute_force_stability_number(&g).unwrap());
    }

    #[test]
    fn pga_ascends_with_lemma3_margin(
        offdiag in prop::collection::vec(0.0f64..3.0, 6),
        diag in prop::collection::vec(1.0f64..4.0, 4),
        start in vec_strategy(4, 0.0, 1.0),
    ) {
        let n = 4;
        let mut k = 0;
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            rows[i][i] = -diag[i];
            for j in (i + 1)..n {
                rows[i][j] = -offdiag[k];
                rows[j][i] = -offdiag[k];
                k += 1;
            }
        }
        let h = SymMatrix::from_rows(&rows).unwrap();
        let linear = h.mul_vec(&DenseVector::ones(n)).unwrap().scale(-1.0);
        let f = QuadraticObjective::new(h.clone(), linear, 0.0).unwrap();
        let set = BudgetBoxSet::unit_capped(n, 2.0).unwrap();
        let l = pf_eigenvalue(&h.scale(-1.0), 1e-12, 200_000).unwrap().lambda;
        let x1 = set.project(&start).unwrap();
        let trace = pga(&f, &set, &x1, l, 30).unwrap();
        for (xs, vs) in trace.iterates.windows(2).zip(trace.values.windows(2)) {
            let step = xs[1].distance(&xs[0]).unwrap();
            prop_assert!(vs[1] - vs[0] >= l / 2.0 * step * step - 1e-9);
            prop_assert!(set.contains(&xs[1], 1e-8));
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let h = SymMatrix::from_f64_rows(&[vec![-3.0, -1.0], vec![-1.0, -2.0]]).unwrap();
    let f = QuadraticObjective::new(h, DenseVector::from_f64_slice(&[5.0, 4.0]).unwrap(), 0.0).unwrap();
    let set = BudgetBoxSet::unit_capped(2, 1.5).unwrap();
    let a = sdrfw(&f, &set, 2.0, 3.5, None).unwrap();
    let b = sdrfw(&f, &set, 2.0, 3.5, None).unwrap();
    assert_eq!(a.iterates, b.iterates);
    assert_eq!(a.values, b.values);
    assert!(a.iterates.iter().all(|x| set.contains(x, 1e-8)));
    assert!(f.strong_dr_param() >= 2.0);
}

#[test]
fn single_precision_pipeline() {
    let h = SymMatrix::<f32>::from_rows(&[vec![-2.0, -0.5], vec![-0.5, -2.0]]).unwrap();
    let f = QuadraticObjective::new(h.clone(), DenseVector::new(vec![3.0f32, 3.0]).unwrap(), 0.0).unwrap();
    let set = BoxSet::<f32>::unit(2);
    let l = pf_eigenvalue(&h.scale(-1.0), 1e-6, 10_000).unwrap().lambda;
    assert!((l - 2.5).abs() < 1e-4);
    let t = sdrfw(&f, &set, 2.0, l, None).unwrap();
    let out = t.final_point().unwrap();
    assert!(out.iter().all(|&v| (0.0..=1.0).contains(&v)));
}
