use std::process::Command;

use proptest::prelude::*;

use polarcat::polar::{normalize, PolarElem, PolarGen};
use polarcat::scalars::{rat, Frac, Var};
use polarcat::suites::SuiteConfig;
use polarcat_cli::parse::{elaborate, GenAtom, GenKind, Value};
use polarcat_cli::{eval_cmd, load_config, normalize_cmd, parse_elem, parse_morphism, rank_cmd, verify, CliError, MorphismAst, PoleChoice};

fn same(a: &PolarElem, b: &PolarElem) -> bool {
    let d = a.sub(b).unwrap();
    normalize(&d).unwrap().is_zero()
}

#[test]
fn parses_generators_and_composition() {
    let a = parse_elem("S1@2 * E1@2").unwrap();
    let b = PolarElem::gen(PolarGen::S { i: 1, r: 2 })
        .unwrap()
        .compose(&PolarElem::gen(PolarGen::E { i: 1, r: 2 }).unwrap())
        .unwrap();
    assert_eq!(a, b);
    let cap = parse_elem("CAP1@2 * CUP1@2").unwrap();
    assert!(same(&cap, &PolarElem::identity(0).scale(&Frac::delta())));
}

#[test]
fn scalars_and_powers() {
    let a = parse_elem("(delta - 1) * S1@2 + 1/2 * ID@2").unwrap();
    assert_eq!(a.num_terms(), 2);
    let s2 = parse_elem("S1@2^2").unwrap();
    assert!(same(&s2, &PolarElem::identity(2)));
    let e2 = parse_elem("E1@2^2 - delta*E1@2").unwrap();
    assert!(normalize(&e2).unwrap().is_zero());
}

#[test]
fn bare_bubble_takes_neighbouring_rank() {
    let a = parse_elem("Z2 * S1@2").unwrap();
    let b = parse_elem("Z2@2 * S1@2").unwrap();
    assert_eq!(a, b);
    let c = parse_elem("S1@3 + Z2").unwrap();
    assert_eq!((c.src(), c.tgt()), (3, 3));
    let d = parse_elem("Z2").unwrap();
    assert_eq!(d.src(), 0);
}

#[test]
fn rank_mismatch_reports_both_ranks() {
    match parse_elem("CAP1@2 * S1@3") {
        Err(CliError::RankMismatch { left, right, .. }) => assert_eq!((left, right), (2, 3)),
        other => panic!("expected a rank mismatch, got {other:?}"),
    }
    assert!(matches!(parse_elem("S1@2 + S1@3"), Err(CliError::RankMismatch { .. })));
    assert!(matches!(parse_elem("CAP1@2^2"), Err(CliError::RankMismatch { left: 2, right: 0, .. })));
}

#[test]
fn syntax_errors_carry_positions() {
    match parse_morphism("S1@2 +\n  * E1@2") {
        Err(CliError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 3)),
        other => panic!("{other:?}"),
    }
    match parse_morphism("S1@2 * Q") {
        Err(CliError::Syntax { line, col, .. }) => assert_eq!((line, col), (1, 8)),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_morphism("S1"), Err(CliError::Syntax { .. })));
    assert!(matches!(parse_morphism("(S1@2"), Err(CliError::Syntax { .. })));
    assert!(matches!(parse_elem("S3@3"), Err(CliError::Engine(_))));
}

#[test]
fn engine_display_reparses() {
    for text in ["S1@2 * E1@2 + delta*D@2", "(delta^2 - 1)/(delta) * CAP1@2 * D@2", "Z3@1 * D@1 - z2*ID@1"] {
        let a = parse_elem(text).unwrap();
        let b = parse_elem(&a.to_string()).unwrap();
        assert_eq!(a, b, "{text}");
    }
    let zero = PolarElem::zero(2, 2);
    assert!(parse_elem(&zero.to_string()).unwrap().is_zero());
}

#[test]
fn normalize_command_specialises_delta() {
    let sym = normalize_cmd("E1@2 * E1@2", None, false, 1_000_000).unwrap();
    assert!(sym.contains("delta"));
    let at3 = normalize_cmd("E1@2 * E1@2", Some("3"), true, 1_000_000).unwrap();
    let v: serde_json::Value = serde_json::from_str(&at3).unwrap();
    assert_eq!(v["terms"][0]["coeff"], "3");
    assert_eq!(normalize_cmd("S1@2*S1@2 - ID@2", None, false, 1_000_000).unwrap(), "0");
}

#[test]
fn rank_command_counts() {
    let v = rank_cmd(2, 2, false, 2).unwrap();
    assert_eq!(v["brauer"], "3");
    assert_eq!(v["dotted"][1]["diagrams"], "6");
    let p = rank_cmd(2, 2, true, 0).unwrap();
    assert_eq!(p["ptl_rank"], 6);
    assert!(rank_cmd(1, 2, false, 0).is_err());
}

#[test]
fn eval_flip_on_natural_module() {
    // τ on V⊗V for (3|0) with the trivial pole: a permutation matrix
    let v = eval_cmd("S1@2", (3, 0), PoleChoice::Trivial, 4).unwrap();
    let m = v["matrix"].as_array().unwrap();
    assert_eq!(m.len(), 9);
    for row in m {
        let ones = row.as_array().unwrap().iter().filter(|x| *x == "1").count();
        assert_eq!(ones, 1);
    }
    let verma = eval_cmd("D@1", (0, 1), PoleChoice::Verma { lambda: rat(1) / rat(2), cutoff: 8 }, 2).unwrap();
    assert_eq!(verma["src"], 1);
}

#[test]
fn config_file_overrides() {
    let cfg = load_config(r#"{"seed": 7, "words": 10}"#, SuiteConfig::default()).unwrap();
    assert_eq!((cfg.seed, cfg.words, cfg.pairs), (7, 10, 100));
}

#[test]
fn verify_brauer_suite_emits_json_lines() {
    let mut buf = Vec::new();
    let ok = verify("brauer", &SuiteConfig::default(), &mut buf).unwrap();
    assert!(ok);
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(!lines.is_empty());
    for l in lines {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        assert_eq!(v["pass"], true);
    }
    assert!(verify("nonsense", &SuiteConfig::default(), &mut Vec::new()).is_err());
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_polarcat");
    let out = Command::new(bin).args(["rank", "--ptl", "2", "2"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"ptl_rank\":6"));
    let bad = Command::new(bin).args(["normalize", "CAP1@2 * S1@3"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("2 vs 3"));
    let g2 = Command::new(bin).args(["verify", "g2"]).output().unwrap();
    assert!(g2.status.success());
}

fn gen_atom() -> impl Strategy<Value = GenAtom> {
    let kind = prop_oneof![
        Just(GenKind::S),
        Just(GenKind::E),
        Just(GenKind::Cap),
        Just(GenKind::Cup),
        Just(GenKind::D),
        Just(GenKind::Id),
        Just(GenKind::Z),
    ];
    (kind, 1usize..4, proptest::option::of(0usize..5)).prop_map(|(kind, index, rank)| {
        let index = if matches!(kind, GenKind::D | GenKind::Id) { 0 } else { index };
        let rank = if kind == GenKind::Z { rank } else { Some(rank.unwrap_or(2)) };
        GenAtom { kind, index, rank }
    })
}

fn ast() -> impl Strategy<Value = MorphismAst> {
    let leaf = prop_oneof![
        (0i64..20).prop_map(|n| MorphismAst::Num(rat(n))),
        prop_oneof![Just(Var::Delta), Just(Var::Lambda), (1u32..5).prop_map(Var::Z)].prop_map(MorphismAst::Var),
        gen_atom().prop_map(MorphismAst::Gen),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| MorphismAst::Neg(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| MorphismAst::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| MorphismAst::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| MorphismAst::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| MorphismAst::Div(Box::new(a), Box::new(b))),
            (inner, 0u32..4).prop_map(|(a, e)| MorphismAst::Pow(Box::new(a), e)),
        ]
    })
}

proptest! {
    #[test]
    fn printed_ast_reparses_identically(a in ast()) {
        let text = a.to_string();
        let b = parse_morphism(&text).unwrap();
        prop_assert_eq!(&a, &b, "{}", text);
    }

    #[test]
    fn random_words_survive_display(seed in 0u64..500) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let w = polarcat::suites::random_polar_word(&mut rng, 2, 4, 3, true);
        let back = parse_elem(&w.to_string()).unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn scalar_values_match_scalar_parser(a in 0i64..9, b in 1i64..9) {
        let text = format!("{a}/{b} - delta^2");
        let Value::Scalar(x) = elaborate(&parse_morphism(&text).unwrap()).unwrap() else {
            panic!("not a scalar");
        };
        prop_assert_eq!(x, polarcat::scalars::parse_scalar(&text).unwrap());
    }
}
