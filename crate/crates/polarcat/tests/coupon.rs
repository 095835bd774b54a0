use polarcat::brauer::enhanced_coupon_check;
use polarcat::scalars::rat;
use polarcat::superlin::Osp;

#[test]
fn coupon_m3() {
    let osp = Osp::build(3, 0).unwrap();
    let rep = enhanced_coupon_check(&osp).unwrap();
    assert_eq!(rep.c_sq, rat(-1));
    assert!(rep.skew && rep.harmonic);
    assert_eq!(rep.relation_rank, 0);
    assert_eq!(rep.forced_delta, vec![rat(3)]);
    assert!(rep.holds(), "{}", rep.to_json());
}

#[test]
fn coupon_m2() {
    let osp = Osp::build(2, 0).unwrap();
    let rep = enhanced_coupon_check(&osp).unwrap();
    assert!(rep.holds(), "{}", rep.to_json());
    // closure alone leaves δ² − δ = 2 with two roots
    assert_eq!(rep.forced_delta, vec![rat(-1), rat(2)]);
}

#[test]
fn odd_space_rejected() {
    let osp = Osp::build(1, 1).unwrap();
    assert!(enhanced_coupon_check(&osp).is_err());
}
