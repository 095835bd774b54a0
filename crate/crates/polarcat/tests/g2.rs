use polarcat::g2::{g2_subalgebra, norm_contraction, upsilon, verify_g2_suite};
use polarcat::scalars::{rat, ratio};

#[test]
fn subalgebra_is_fourteen_dimensional() {
    let g = g2_subalgebra().unwrap();
    assert_eq!(g.dim(), 14);
    assert!(g.annihilates_epsilon());
    assert_eq!(g.casimir_v().as_scalar(), Some(rat(12)));
}

#[test]
fn normalizations() {
    let u = upsilon().unwrap();
    assert_eq!(u.kappa_sq, rat(-1));
    let (c_sq, _) = norm_contraction().unwrap();
    assert_eq!(c_sq, ratio(-1, 2));
}

#[test]
fn full_suite_holds() {
    let rep = verify_g2_suite().unwrap();
    for r in &rep.relations {
        assert!(r.holds, "{} (rank {})", r.name, r.lhs_minus_rhs_rank);
    }
    assert_eq!(rep.forced_delta, rat(7));
    let js = rep.to_json();
    assert_eq!(js["ℋ(ℋ−2)(ℋ+6)(ℋ+12) = 0"]["holds"], true);
}
