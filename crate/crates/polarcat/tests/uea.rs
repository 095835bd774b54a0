use polarcat::polar::z_closure;
use polarcat::scalars::{rat, Frac, Rational};
use polarcat::uea::{
    harmonic_module, sl2_char_identity, sl2_verma_block, so3_char_identity, so3_identity_on_module, LieData, Pbw,
    Uea,
};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

#[test]
fn sl2_casimir_and_e_matrix() {
    let u = Uea::new(LieData::sl2().unwrap());
    let c = u.casimir();
    assert_eq!(c.display(u.labels()), "-4*Y*X + -2*T + -1*T^2");
    assert!(u.is_central(&c));
    let nat = u.eval(&c, &u.lie.mats);
    assert_eq!(nat.as_scalar(), Some(rat(-3)));
    let e = u.e_matrix();
    let (y, x, t) = (Pbw::gen(0), Pbw::gen(1), Pbw::gen(2));
    assert_eq!(e.entries[0][0], t.scale(&rat(-1)));
    assert_eq!(e.entries[0][1], y.scale(&rat(-2)));
    assert_eq!(e.entries[1][0], x.scale(&rat(-2)));
    assert_eq!(e.entries[1][1], t);
    assert_eq!(u.z_image(2), c.scale(&rat(2)));
}

#[test]
fn sl2_identity() {
    let grid = [q(1, 2), rat(1), q(5, 3), rat(3)];
    let (u, ci) = sl2_char_identity(&grid).unwrap();
    assert!(ci.vanishes);
    assert_eq!(ci.q[0], Pbw::scalar(rat(-2)));
    assert_eq!(ci.q[1], u.casimir());
    for l in [q(1, 2), rat(1), q(5, 3)] {
        assert_eq!(sl2_verma_block(&u, &l).trace(), rat(2));
    }
}

#[test]
fn so3_identity() {
    let (u, ci) = so3_char_identity(&[1, 2, 3, 4, 5]).unwrap();
    assert!(ci.vanishes);
    for j in 0..=2 {
        assert!(so3_identity_on_module(&u, &ci, j).unwrap(), "L_{j}");
    }
    assert!(ci.q.iter().all(|x| u.is_central(x)));
}

#[test]
fn gelfand_invariants() {
    for m in [3, 4] {
        let u = Uea::new(LieData::so(m).unwrap());
        let i2 = u.gelfand(2).unwrap();
        assert!(u.is_central(&i2), "so{m}");
        assert_eq!(u.z_image(2), i2);
        let pushed = u.push_forward(&Frac::from(z_closure(3).unwrap())).unwrap();
        assert_eq!(u.z_image(3), pushed, "so{m}");
        assert_eq!(u.gelfand(3).unwrap(), pushed.scale(&rat(-1)));
        let vm = u.eval(&u.casimir(), &u.lie.mats);
        assert_eq!(vm.as_scalar(), Some(rat(m as i64 - 1)));
    }
}

#[test]
fn centre_independence() {
    let u = Uea::new(LieData::so(5).unwrap());
    let i2 = u.gelfand(2).unwrap();
    let i4 = u.gelfand(4).unwrap();
    assert!(u.is_central(&i4));
    assert!(u.bracket(&i2, &i4).is_zero());
    let fam = [Pbw::one(), i2.clone(), u.mul(&i2, &i2), i4];
    assert_eq!(u.rank(&fam), 4);
    let u3 = Uea::new(LieData::so(3).unwrap());
    let j2 = u3.gelfand(2).unwrap();
    let fam3 = [Pbw::one(), j2.clone(), u3.mul(&j2, &j2), u3.gelfand(4).unwrap()];
    assert_eq!(u3.rank(&fam3), 3);
}

#[test]
fn harmonic_modules_are_representations() {
    let l = LieData::so(3).unwrap();
    for j in 0..4 {
        let rep = harmonic_module(&l, j).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let br = &(&rep[a] * &rep[b]) - &(&rep[b] * &rep[a]);
                let mut expect = polarcat::linalg::Mat::zeros(br.rows, br.cols);
                for k in 0..3 {
                    expect = &expect + &rep[k].scale(&l.c[a][b][k]);
                }
                assert_eq!(br, expect);
            }
        }
    }
}

fn small_elem(seed: &[(u8, i8)], dim: usize) -> Pbw {
    let mut p = Pbw::zero();
    for chunk in seed.chunks(3) {
        let m: Vec<usize> = {
            let mut v: Vec<usize> = chunk.iter().map(|x| x.0 as usize % dim).collect();
            v.sort();
            v
        };
        p.add_term(m, rat(chunk[0].1 as i64));
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn pbw_associative(a in proptest::collection::vec((0u8..10, -3i8..4), 1..7),
                       b in proptest::collection::vec((0u8..10, -3i8..4), 1..7),
                       c in proptest::collection::vec((0u8..10, -3i8..4), 1..7)) {
        let u = Uea::new(LieData::so(5).unwrap());
        let (a, b, c) = (small_elem(&a, 10), small_elem(&b, 10), small_elem(&c, 10));
        prop_assert_eq!(u.mul(&u.mul(&a, &b), &c), u.mul(&a, &u.mul(&b, &c)));
    }
}
