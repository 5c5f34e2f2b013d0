//! Formula evaluation against independent oracles: a naive back-and-forth
//! evaluator for the rational order, and automorphism invariance for the
//! other structures.

use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sepmod_core::catalog::point::Point;
use sepmod_core::logic::enumerate::FormulaGen;
use sepmod_core::logic::{parse_formula, Formula, Rel, Term};
use sepmod_core::{Signature, StructureHandle};

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn value(t: &Term<Q>, env: &[(String, Q)]) -> Q {
    match t {
        Term::Var(v) => env.iter().rev().find(|(n, _)| n == v).expect("bound").1.clone(),
        Term::Param(Point::Rat(x)) => x.clone(),
        other => panic!("not a dlo term: {other:?}"),
    }
}

/// Every order type over `known` plus one new point is realized here.
fn extension(known: &[Q]) -> Vec<Q> {
    let mut v: Vec<Q> = known.to_vec();
    v.sort();
    v.dedup();
    let mut out = v.clone();
    match (v.first(), v.last()) {
        (Some(lo), Some(hi)) => {
            out.push(lo - Q::from_integer(1.into()));
            out.push(hi + Q::from_integer(1.into()));
        }
        _ => out.push(Q::from_integer(0.into())),
    }
    for w in v.windows(2) {
        out.push((&w[0] + &w[1]) / Q::from_integer(2.into()));
    }
    out
}

fn oracle(phi: &Formula<Q>, env: &mut Vec<(String, Q)>, params: &[Q]) -> bool {
    match phi {
        Formula::Atom(rel, a, b) => {
            let (x, y) = (value(a, env), value(b, env));
            match rel {
                Rel::Lt => x < y,
                Rel::Eq => x == y,
            }
        }
        Formula::Pred(..) => panic!("no predicates in dlo"),
        Formula::Not(a) => !oracle(a, env, params),
        Formula::And(a, b) => oracle(a, env, params) && oracle(b, env, params),
        Formula::Or(a, b) => oracle(a, env, params) || oracle(b, env, params),
        Formula::Implies(a, b) => !oracle(a, env, params) || oracle(b, env, params),
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let mut known: Vec<Q> = params.to_vec();
            known.extend(env.iter().map(|(_, x)| x.clone()));
            let want = matches!(phi, Formula::Exists(..));
            for c in extension(&known) {
                env.push((v.clone(), c));
                let r = oracle(body, env, params);
                env.pop();
                if r == want {
                    return want;
                }
            }
            !want
        }
    }
}

fn dlo_params(raw: &[(i64, i64)]) -> Vec<Point<Q>> {
    raw.iter().map(|(n, d)| Point::Rat(q(*n, *d))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn printed_formulas_parse_back(seed in any::<u64>(), depth in 0usize..3) {
        let params = vec![Point::Pair(q(1, 1), q(2, 3)), Point::Single(q(-1, 2))];
        let sig = Signature::ex1();
        let gen = FormulaGen::new(&sig, &params);
        let phi: Formula<Q> = gen.one_variable(&mut ChaCha8Rng::seed_from_u64(seed), depth);
        prop_assert_eq!(parse_formula::<Q>(&phi.to_string(), &sig).unwrap(), phi);
    }

    #[test]
    fn dlo_sets_match_oracle(seed in any::<u64>(), raw in proptest::collection::vec((-4i64..5, 1i64..3), 1..4)) {
        let s = StructureHandle::dlo();
        let params = dlo_params(&raw);
        let gen = FormulaGen::new(&s.signature, &params);
        let phi: Formula<Q> = gen.one_variable(&mut ChaCha8Rng::seed_from_u64(seed), 2);
        let set = s.definable_set(&phi, &Default::default()).unwrap();
        let values: Vec<Q> = params.iter().map(|p| match p { Point::Rat(x) => x.clone(), _ => unreachable!() }).collect();
        let mut probes = extension(&values);
        probes.extend(extension(&probes));
        for x in probes {
            let mut env = vec![("x".to_string(), x.clone())];
            let expected = oracle(&phi, &mut env, &values);
            prop_assert_eq!(set.contains(&Point::Rat(x.clone())), expected, "{} at {}", phi, x);
        }
    }

    #[test]
    fn dlo_sentences_match_oracle(seed in any::<u64>(), raw in proptest::collection::vec((-4i64..5, 1i64..3), 1..4)) {
        let s = StructureHandle::dlo();
        let params = dlo_params(&raw);
        let gen = FormulaGen::new(&s.signature, &params);
        let phi: Formula<Q> = gen.one_variable(&mut ChaCha8Rng::seed_from_u64(seed), 2);
        let sentence = Formula::exists("x", phi);
        let values: Vec<Q> = params.iter().map(|p| match p { Point::Rat(x) => x.clone(), _ => unreachable!() }).collect();
        prop_assert_eq!(s.eval_formula(&sentence).unwrap(), oracle(&sentence, &mut vec![], &values));
    }

    #[test]
    fn sets_are_invariant_under_automorphisms(seed in any::<u64>(), which in 0usize..2, raw in proptest::collection::vec((-3i64..4, 1i64..3), 1..3)) {
        let s = if which == 0 { StructureHandle::ehr() } else { StructureHandle::ex1() };
        let params: Vec<Point<Q>> = raw
            .iter()
            .enumerate()
            .map(|(i, (n, d))| match (which, i % 2) {
                (0, 0) => Point::low(q(*n, *d)),
                (0, _) => Point::high(q(*n, *d)),
                (_, 0) => Point::Pair(q(*n, 1), q(1, *d)),
                _ => Point::Single(q(*n, *d)),
            })
            .collect();
        let gen = FormulaGen::new(&s.signature, &params);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi: Formula<Q> = gen.one_variable(&mut rng, 1);
        let set = s.definable_set(&phi, &Default::default()).unwrap();
        let sigma = s.sample_automorphism_fixing(&params, seed);
        let mut probes: Vec<Point<Q>> = s.cells(params.iter().cloned()).iter().map(|c| c.representative()).collect();
        probes.extend(params.iter().cloned());
        s.check_preserves(&sigma, &probes).unwrap();
        for p in probes {
            prop_assert_eq!(set.contains(&p), set.contains(&sigma.apply(&p)), "{} at {}", phi, p);
        }
    }
}

#[test]
fn extension_covers_gaps() {
    let e = extension(&[q(0, 1), q(1, 1)]);
    assert!(e.contains(&q(1, 2)) && e.contains(&q(-1, 1)) && e.contains(&q(2, 1)));
}
