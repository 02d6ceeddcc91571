mod common;

use nalgebra::DVector;
use proptest::prelude::*;
use rand::Rng;
use relact::genographe::{
    cone_member, effective_conductance, is_connected, is_kl_connected, is_strongly_connected,
    is_strongly_kl_connected, lineality_space, GenGraph,
};
use relact::linalg::RMat;
use relact::oracle::{path_oracle, PathQuery};
use relact::Tolerances;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn unit_graph(seed: u64) -> RMat {
    let mut rng = common::rng(seed);
    let q = rng.random_range(2..=6);
    let p = rng.random_range(1..=8);
    common::random_unit_incidence(&mut rng, q, p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn predicates_match_paths(seed in any::<u64>()) {
        let m = unit_graph(seed);
        let q = m.nrows();
        let g = GenGraph::from_real(q, 1, &m).unwrap();
        let t = tol();
        prop_assert_eq!(is_connected(&g, t.rank).unwrap(), path_oracle(&m, PathQuery::Connected).unwrap());
        prop_assert_eq!(
            is_strongly_connected(&g, t.cone).unwrap().holds,
            path_oracle(&m, PathQuery::StronglyConnected).unwrap()
        );
        for k in 1..=q {
            for l in 1..=q {
                if k == l {
                    continue;
                }
                let kl = is_kl_connected(&g, k, l, t.rank).unwrap();
                prop_assert_eq!(kl, path_oracle(&m, PathQuery::Kl(k, l)).unwrap());
                prop_assert_eq!(
                    is_strongly_kl_connected(&g, k, l, t.cone).unwrap().holds,
                    path_oracle(&m, PathQuery::StronglyKl(k, l)).unwrap()
                );
                prop_assert_eq!(effective_conductance(&g, k, l, t.rank).unwrap() > 0.0, kl);
            }
        }
    }

    #[test]
    fn certificates_reconstruct_the_target(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let m = common::random_cone(&mut rng);
        let g = GenGraph::from_real(1, m.nrows(), &m).unwrap();
        let v = if rng.random_bool(0.5) {
            let alpha = DVector::from_fn(m.ncols(), |_, _| rng.random_range(0.0..2.0));
            &m * alpha
        } else {
            DVector::from_fn(m.nrows(), |_, _| rng.random_range(-2.0..2.0))
        };
        let f = cone_member(&g, &v, tol().cone).unwrap();
        if f.member {
            let alpha = f.certificate.expect("members carry a certificate");
            prop_assert!(alpha.iter().all(|&a| a >= 0.0));
            prop_assert!((&m * alpha - &v).norm() <= tol().cone * (1.0 + v.norm()));
        }
    }

    #[test]
    fn lineality_basis_is_two_sided(seed in any::<u64>()) {
        let m = common::random_cone(&mut common::rng(seed));
        let g = GenGraph::from_real(1, m.nrows(), &m).unwrap();
        let lin = lineality_space(&g, tol().cone, tol().rank).unwrap();
        for b in lin.columns.column_iter() {
            let b = b.into_owned();
            prop_assert!(cone_member(&g, &b, tol().cone).unwrap().member);
            prop_assert!(cone_member(&g, &(-b), tol().cone).unwrap().member);
        }
        for j in (0..m.ncols()).filter(|j| !lin.generators.contains(j)) {
            let neg = -m.column(j).into_owned();
            prop_assert!(!cone_member(&g, &neg, tol().cone).unwrap().member);
        }
    }

    #[test]
    fn members_are_on_the_right_side_of_polar_directions(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        // pointed cone: first coordinate of every generator is positive
        let d = rng.random_range(2..=4);
        let c = rng.random_range(1..=5);
        let m = RMat::from_fn(d, c, |i, _| if i == 0 { rng.random_range(0.5..2.0) } else { rng.random_range(-1.0..1.0) });
        let g = GenGraph::from_real(1, d, &m).unwrap();
        let alpha = DVector::from_fn(c, |_, _| rng.random_range(0.0..1.0));
        let v = &m * alpha;
        prop_assert!(cone_member(&g, &v, tol().cone).unwrap().member);
        let mut found = 0;
        for _ in 0..20_000 {
            if found == 50 {
                break;
            }
            let eta = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
            if (m.transpose() * &eta).iter().all(|&x| x <= 0.0) {
                found += 1;
                prop_assert!(v.dot(&eta) <= tol().cone);
            }
        }
        prop_assert!(found > 0);
    }
}
