use polarcat::polar::{normalize, relation_battery, z_closure, PolarElem, PolarGen};
use polarcat::scalars::Frac;
use polarcat::superlin::{standard_family, DensePole, Oracle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_word(rng: &mut ChaCha8Rng, src: usize, len: usize) -> Vec<PolarGen> {
    let mut r = src;
    let mut out = Vec::new();
    while out.len() < len {
        let g = match rng.gen_range(0..7) {
            0 if r >= 2 => PolarGen::S { i: rng.gen_range(1..r), r },
            1 if r >= 2 => PolarGen::E { i: rng.gen_range(1..r), r },
            2 if r >= 2 && r > src.saturating_sub(1) => PolarGen::Cap { i: rng.gen_range(1..r), r },
            3 if r < 4 => PolarGen::Cup { i: rng.gen_range(1..=r + 1), r: r + 2 },
            4 | 5 if r >= 1 => PolarGen::D { r },
            6 if r >= 1 && rng.gen_bool(0.3) => PolarGen::Z { l: 2, r },
            _ => continue,
        };
        r = g.target();
        out.push(g);
    }
    out
}

fn tests_for(o: &Oracle<DensePole>, r: usize) -> Vec<polarcat::superlin::SVec> {
    o.test_vectors(r, 200, 8, 7 + r as u64)
}

#[test]
fn battery_vanishes_on_family() {
    let battery = relation_battery(2).unwrap();
    for (name, o) in standard_family().unwrap() {
        for (rel, e) in &battery {
            let t = tests_for(&o, e.src());
            assert!(o.vanishes(e, &t).unwrap(), "{rel} fails on {name}");
        }
    }
}

#[test]
fn normal_forms_agree_with_family() {
    let fam = standard_family().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..30 {
        let src = rng.gen_range(1..=2);
        let len = rng.gen_range(2..=7);
        let gens = random_word(&mut rng, src, len);
        let mut comp = gens.clone();
        comp.reverse();
        let w = PolarElem::product(&comp).unwrap();
        let nf = normalize(&w).unwrap().to_elem().unwrap();
        for (name, o) in &fam {
            let t = tests_for(o, src);
            assert!(o.agree(&w, &nf, &t).unwrap(), "trial {trial} {w} on {name}");
        }
    }
}

#[test]
fn odd_closures_match_family() {
    let fam = standard_family().unwrap();
    for l in [1u32, 3, 5] {
        let p = Frac::from(z_closure(l).unwrap());
        for (name, o) in &fam {
            assert_eq!(o.scalar(&p).unwrap(), o.z_value(l).unwrap(), "z{l} on {name}");
        }
    }
}
