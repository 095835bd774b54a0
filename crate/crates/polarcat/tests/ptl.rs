use polarcat::brauer::{generator, GenKind};
use polarcat::polar::{PolarElem, PolarGen};
use polarcat::ptl::{
    binomial, filtration_rank, project_ptl, ptl_rank, standard_basis, tlb_specialize, tlb_witness, verma_image_rank,
    verma_oracle, Ptl,
};
use polarcat::scalars::{rat, Frac, Poly, Rational, Var};
use polarcat::superlin::{DensePole, Module, Oracle, Osp};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn g(x: PolarGen) -> PolarElem {
    PolarElem::gen(x).unwrap()
}

fn delta() -> Frac {
    Frac::delta()
}

#[test]
fn crossing_resolves() {
    let p = project_ptl(&g(PolarGen::S { i: 1, r: 2 })).unwrap();
    let two_over = Frac::int(2).div(&delta()).unwrap();
    let e = PolarElem::from_brauer(&generator(GenKind::E, 1, 2).unwrap()).unwrap();
    let expect = project_ptl(&e).unwrap().scale(&two_over).add(&project_ptl(&PolarElem::identity(2)).unwrap().scale(&Frac::int(-1))).unwrap();
    assert_eq!(p, expect);
    let theta = g(PolarGen::S { i: 1, r: 2 }).add(&PolarElem::identity(2)).unwrap().sub(&e.scale(&two_over)).unwrap();
    assert!(project_ptl(&theta).unwrap().is_zero());
}

#[test]
fn connector_square() {
    let d = g(PolarGen::D { r: 1 });
    let dd = d.compose(&d).unwrap();
    let a = (&delta() - &Frac::int(2)).scale(&Rational::new((-1).into(), 2.into()));
    let c = Frac::from(Poly::z(2)).div(&delta()).unwrap();
    let expect = d.scale(&a).add(&PolarElem::identity(1).scale(&c)).unwrap();
    assert_eq!(project_ptl(&dd).unwrap(), project_ptl(&expect).unwrap());
}

#[test]
fn ranks_are_central_binomials() {
    for n in 1..=4usize {
        for r in 0..=2 * n {
            assert_eq!(ptl_rank(r, 2 * n - r).unwrap() as u128, binomial(2 * n as u64, n as u64), "N={n} r={r}");
        }
    }
    assert_eq!(ptl_rank(0, 8).unwrap(), 70);
    assert_eq!(ptl_rank(2, 2).unwrap(), 6);
    for n in 0..=6 {
        assert_eq!(filtration_rank(n), binomial(2 * n, n));
    }
}

#[test]
fn verma_images_independent() {
    for n in 1..=2 {
        let (rank, len) = verma_image_rank(n, Rational::new(1.into(), 2.into())).unwrap();
        assert_eq!(rank, len);
    }
}

#[test]
fn type_b_quadratic() {
    let lam = Frac::from(Poly::var(Var::Lambda));
    let d = g(PolarGen::D { r: 1 });
    let id = PolarElem::identity(1);
    for d0 in [-2i64, 3, 5] {
        let shift = &(&Frac::int(d0) - &Frac::int(2)).scale(&Rational::new(1.into(), 2.into())) - &lam;
        let q = d.add(&id.scale(&lam)).unwrap().compose(&d.add(&id.scale(&shift)).unwrap()).unwrap();
        let mut ptl = Ptl::with_delta(Frac::int(d0)).unwrap();
        let p = ptl.project(&q).unwrap();
        assert!(tlb_specialize(&p, &rat(d0), &lam).unwrap().is_zero(), "delta={d0}");
        let p0 = ptl.project(&d.compose(&d.add(&id.scale(&(&Frac::int(d0 - 2)).scale(&Rational::new(1.into(), 2.into())))).unwrap()).unwrap()).unwrap();
        assert!(tlb_specialize(&p0, &rat(d0), &Frac::zero()).unwrap().is_zero());
    }
}

#[test]
fn witness_is_power_of_minus_two() {
    for t in 1..=3 {
        let img = tlb_witness(t, Rational::new(1.into(), 2.into())).unwrap();
        assert_eq!(img, vec![(t, rat((-2i64).pow(t as u32)))], "t={t}");
    }
}

fn random_word(rng: &mut ChaCha8Rng, src: usize, len: usize) -> PolarElem {
    let mut r = src;
    let mut gens = Vec::new();
    while gens.len() < len {
        let x = match rng.gen_range(0..6) {
            0 if r >= 2 => PolarGen::S { i: rng.gen_range(1..r), r },
            1 if r >= 2 => PolarGen::E { i: rng.gen_range(1..r), r },
            2 if r >= 2 => PolarGen::Cap { i: rng.gen_range(1..r), r },
            3 if r < 4 => PolarGen::Cup { i: rng.gen_range(1..=r + 1), r: r + 2 },
            4 | 5 if r >= 1 => PolarGen::D { r },
            _ => continue,
        };
        r = x.target();
        gens.push(x);
    }
    gens.reverse();
    PolarElem::product(&gens).unwrap()
}

fn sp2_dense() -> Vec<Oracle<DensePole>> {
    let osp = Osp::build(0, 1).unwrap();
    vec![
        Oracle::new(osp.clone(), DensePole::new(&osp, Module::natural(&osp))),
        Oracle::new(osp.clone(), DensePole::new(&osp, Module::adjoint(&osp).unwrap())),
    ]
}

#[test]
fn projection_sound_under_sp2() {
    let dense = sp2_dense();
    let verma = verma_oracle(Rational::new(1.into(), 2.into()), 30, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ptl = Ptl::with_delta(Frac::int(-2)).unwrap();
    for trial in 0..40 {
        let src = rng.gen_range(0..=3);
        let len = rng.gen_range(1..=7);
        let w = random_word(&mut rng, src, len);
        let p = ptl.project(&w).unwrap().to_polar().unwrap();
        for o in &dense {
            let t = o.test_vectors(src, 200, 8, trial);
            assert!(o.agree(&w, &p, &t).unwrap(), "trial {trial}: {w}");
        }
        let t = verma.test_vectors(src, 200, 8, trial);
        assert!(verma.agree(&w, &p, &t).unwrap(), "verma trial {trial}: {w}");
    }
}

#[test]
fn projection_is_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut ptl = Ptl::symbolic();
    for _ in 0..30 {
        let (la, lb) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let a = random_word(&mut rng, 2, la);
        let b = random_word(&mut rng, a.tgt(), lb);
        let lhs = ptl.project(&b.compose(&a).unwrap()).unwrap();
        let (pa, pb) = (ptl.project(&a).unwrap(), ptl.project(&b).unwrap());
        assert_eq!(lhs, ptl.compose(&pb, &pa).unwrap());
    }
}

#[test]
fn basis_is_standard_form_fixed() {
    let mut ptl = Ptl::with_delta(Frac::int(-2)).unwrap();
    for b in (0..=6).flat_map(|r| standard_basis(r, 6 - r).unwrap()) {
        let e = b.to_polar().unwrap();
        let p = ptl.project(&e).unwrap();
        assert_eq!(p.terms().count(), 1, "{b} -> {p}");
        assert!(p.coeff(&b).is_one(), "{b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn connectors_never_increase(seed in 0u64..10_000, len in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_word(&mut rng, 2, len);
        let dots: usize = w.terms().map(|(x, _)| x.gens().iter().filter(|g| matches!(g, PolarGen::D { .. })).count()).max().unwrap_or(0);
        let p = project_ptl(&w).unwrap();
        prop_assert!(p.max_connectors() <= dots);
    }
}

#[test]
fn strand_through_cup_only_consistent_at_minus_two() {
    // S2 S1 (1 ⊗ Cup) equals Cup ⊗ 1 as Brauer diagrams.
    let w = PolarElem::product(&[PolarGen::S { i: 2, r: 3 }, PolarGen::S { i: 1, r: 3 }, PolarGen::Cup { i: 2, r: 3 }]).unwrap();
    let target = PolarElem::gen(PolarGen::Cup { i: 1, r: 3 }).unwrap();
    let mut at = Ptl::with_delta(Frac::int(-2)).unwrap();
    assert_eq!(at.project(&w).unwrap(), at.project(&target).unwrap());
    let mut generic = Ptl::symbolic();
    assert_ne!(generic.project(&w).unwrap(), generic.project(&target).unwrap());
}
