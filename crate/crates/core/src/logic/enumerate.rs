//! Formula supply for fair enumeration and sampling: a fixed list of
//! one-variable templates per signature, and a seeded random generator.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{parse_formula, Formula, Rel, Signature, Term, UniverseKind};
use crate::catalog::point::{Point, Sort};
use crate::scalar::Scalar;

/// A formula in the free variable `x` and parameter slots `p0 .. p{arity-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template<Q> {
    pub formula: Formula<Q>,
    pub arity: usize,
}

impl<Q: Scalar> Template<Q> {
    pub fn slot(i: usize) -> String {
        format!("p{i}")
    }

    /// Fills the slots; `params.len()` must equal the arity.
    pub fn instantiate(&self, params: &[Point<Q>]) -> Formula<Q> {
        assert_eq!(params.len(), self.arity);
        let binding = params.iter().enumerate().map(|(i, p)| (Self::slot(i), p.clone())).collect();
        self.formula.substitute(&binding)
    }
}

const COMMON: &[&str] = &[
    "x = p0",
    "p0 < x",
    "x < p0",
    "p0 < x and x < p1",
    "not (x = p0) and not (x = p1)",
    "exists y (x < y and y < p0)",
    "forall y (y < x implies y < p0)",
    "exists y (p0 < y and y < x) and x < p1",
];

const EHR: &[&str] = &["x = c0", "c0 < x and x < c1", "c1 < x and x < p0", "p0 < x and x < c2", "x < c0 and p0 < x"];

const EX1: &[&str] = &[
    "P1(x)",
    "P2(x)",
    "x = f(p0)",
    "f(x) = p0",
    "f(x) = f(p0) and not (x = p0)",
    "P1(x) and p0 < x",
    "P2(x) and x < p0",
    "P1(x) and f(x) = p0 and p1 < x",
    "P2(x) and exists y (P1(y) and f(y) = x and p0 < y)",
    "P1(x) and f(x) < f(p0)",
];

/// One-variable templates for `sig`, simplest first.
pub fn templates<Q: Scalar>(sig: &Signature) -> Vec<Template<Q>> {
    let extra: &[&str] = match sig.universe {
        UniverseKind::Rationals => &[],
        UniverseKind::TwoTier => EHR,
        UniverseKind::Fibered => EX1,
    };
    COMMON
        .iter()
        .chain(extra)
        .map(|text| {
            let formula = parse_formula(text, sig).expect("template parses");
            let arity = formula.free_variables().iter().filter(|v| v.starts_with('p')).count();
            Template { formula, arity }
        })
        .collect()
}

/// Seeded random formulas over a signature.
pub struct FormulaGen<'a, Q> {
    pub sig: &'a Signature,
    pub params: &'a [Point<Q>],
    /// Largest constant index used (EHR).
    pub max_constant: u64,
}

impl<'a, Q: Scalar> FormulaGen<'a, Q> {
    pub fn new(sig: &'a Signature, params: &'a [Point<Q>]) -> Self {
        FormulaGen { sig, params, max_constant: 3 }
    }

    fn term<R: Rng>(&self, rng: &mut R, scope: &[String]) -> Term<Q> {
        let mut t = loop {
            match rng.gen_range(0..10) {
                0..=4 if !scope.is_empty() => break Term::Var(scope.choose(rng).unwrap().clone()),
                5..=7 if !self.params.is_empty() => break Term::Param(self.params.choose(rng).unwrap().clone()),
                8 if self.sig.has_constants() => break Term::Const(rng.gen_range(0..=self.max_constant)),
                9 if scope.is_empty() && self.params.is_empty() => {
                    break if self.sig.has_constants() { Term::Const(rng.gen_range(0..=self.max_constant)) } else { Term::Param(zero_point(self.sig)) };
                }
                _ => {}
            }
        };
        if self.sig.function_arity("f").is_some() && rng.gen_bool(0.25) {
            t = Term::f(t);
        }
        t
    }

    fn atom<R: Rng>(&self, rng: &mut R, scope: &[String]) -> Formula<Q> {
        if self.sig.relation_arity("P1").is_some() && rng.gen_bool(0.2) {
            let sort = if rng.gen_bool(0.5) { Sort::P1 } else { Sort::P2 };
            return Formula::Pred(sort, self.term(rng, scope));
        }
        let rel = if rng.gen_bool(0.6) { Rel::Lt } else { Rel::Eq };
        Formula::Atom(rel, self.term(rng, scope), self.term(rng, scope))
    }

    /// A random formula whose free variables lie in `scope`, with
    /// quantifier depth at most `depth`.
    pub fn formula<R: Rng>(&self, rng: &mut R, scope: &mut Vec<String>, depth: usize) -> Formula<Q> {
        self.formula_sized(rng, scope, depth, 3)
    }

    fn formula_sized<R: Rng>(&self, rng: &mut R, scope: &mut Vec<String>, depth: usize, size: usize) -> Formula<Q> {
        let choice = if size == 0 { 0 } else { rng.gen_range(0..6) };
        match choice {
            0 | 1 => self.atom(rng, scope),
            2 => Formula::not(self.formula_sized(rng, scope, depth, size - 1)),
            3 | 4 => {
                let a = self.formula_sized(rng, scope, depth, size - 1);
                let b = self.formula_sized(rng, scope, depth, size - 1);
                match rng.gen_range(0..3) {
                    0 => Formula::and(a, b),
                    1 => Formula::or(a, b),
                    _ => Formula::implies(a, b),
                }
            }
            _ if depth > 0 => {
                let v = format!("v{}", scope.len());
                scope.push(v.clone());
                let body = self.formula_sized(rng, scope, depth - 1, size - 1);
                scope.pop();
                if rng.gen_bool(0.5) {
                    Formula::exists(&v, body)
                } else {
                    Formula::forall(&v, body)
                }
            }
            _ => self.atom(rng, scope),
        }
    }

    /// `phi(x)` guaranteed to mention `x`, of quantifier depth at most `depth`.
    pub fn one_variable<R: Rng>(&self, rng: &mut R, depth: usize) -> Formula<Q> {
        let mut scope = vec!["x".to_string()];
        loop {
            let phi = self.formula(rng, &mut scope, depth);
            if phi.free_variables() == ["x"] {
                return phi;
            }
        }
    }
}

fn zero_point<Q: Scalar>(sig: &Signature) -> Point<Q> {
    match sig.universe {
        UniverseKind::Rationals => Point::Rat(Q::zero()),
        UniverseKind::TwoTier => Point::low(Q::zero()),
        UniverseKind::Fibered => Point::Single(Q::zero()),
    }
}
