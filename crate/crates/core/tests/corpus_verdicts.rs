use relact::controllability::{
    is_controllable, is_pairwise_controllable, is_positive_pairwise_controllable,
    is_positively_controllable, v_graphs, Context, GraphKind,
};
use relact::corpus;
use relact::genographe::{detect_scalar_edges, is_connected, is_kl_connected};
use relact::linalg::C64;
use relact::Tolerances;

fn ctx(name: &str) -> Context {
    Context::new(&corpus::by_name(name).unwrap(), &Tolerances::default()).unwrap()
}

#[test]
fn oscillator_spectrum_matches_closed_form() {
    use std::f64::consts::PI;
    // ascending |Im|, so the middle pair is ±j√(1/2)
    let freqs = [
        (PI / 12.0).tan().sqrt(),
        (1.0_f64 / 3.0).sqrt(),
        0.5_f64.sqrt(),
        1.0,
        (5.0 * PI / 12.0).tan().sqrt(),
    ];
    for name in ["oscillators-a", "oscillators-b"] {
        let c = ctx(name);
        let mus = c.spectrum.mus();
        assert_eq!(mus.len(), 10);
        for (i, w) in freqs.iter().enumerate() {
            assert!((mus[2 * i] - C64::new(0.0, *w)).norm() < 1e-9, "{name} {i}: {:?}", mus[2 * i]);
            assert!((mus[2 * i + 1] - C64::new(0.0, -*w)).norm() < 1e-9);
        }
    }
}

#[test]
fn oscillator_graphs() {
    let a = ctx("oscillators-a");
    for (k, g) in v_graphs(&a).unwrap().iter().enumerate() {
        assert!(is_connected(g, 1e-9).unwrap());
        // some ladder modes vanish at the coupling node, dropping one edge
        let edges = detect_scalar_edges(g, 1e-9).unwrap();
        assert!(edges.len() == 2 || edges.len() == 3, "kappa {}", k + 1);
        assert!(edges.iter().all(|e| e.tail <= 3 && e.head <= 3));
    }
    assert!(is_controllable(&a).unwrap().0);
    assert!(is_positively_controllable(&a).unwrap().0);

    let b = ctx("oscillators-b");
    let flags: Vec<bool> = v_graphs(&b).unwrap().iter().map(|g| is_connected(g, 1e-9).unwrap()).collect();
    assert_eq!(flags, vec![true, true, true, true, false, false, true, true, true, true]);
    assert!(!is_controllable(&b).unwrap().0);
}

#[test]
fn counterexample_pair_23() {
    let c = ctx("counterexample-23");
    assert_eq!(c.spectrum.components.len(), 1);
    assert_eq!(c.spectrum.components[0].geo_mult, 2);
    assert_eq!(c.spectrum.components[0].alg_mult, 4);
    let v = &v_graphs(&c).unwrap()[0];
    assert!(is_kl_connected(v, 2, 3, 1e-9).unwrap());
    let (ok, rows) = is_pairwise_controllable(&c, 2, 3).unwrap();
    assert!(!ok);
    assert!(rows.iter().any(|r| r.graph_kind == GraphKind::V && r.kl_connected == Some(true)));
    let p = is_positive_pairwise_controllable(&c, 2, 3).unwrap();
    assert!(!p.holds);
    assert!(p.conditional);
}
