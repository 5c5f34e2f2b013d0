//! First-order syntax over the three catalog signatures.

pub(crate) mod parse;
pub mod enumerate;

use std::collections::BTreeMap;
use std::fmt;

pub use parse::{parse_formula, ParseError};

use crate::catalog::point::{Point, Sort};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UniverseKind {
    Rationals,
    TwoTier,
    Fibered,
}

/// How a signature names its constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstantFamily {
    None,
    /// `c0, c1, c2, ...`
    Indexed { prefix: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub name: String,
    pub universe: UniverseKind,
    pub relations: Vec<(String, usize)>,
    pub functions: Vec<(String, usize)>,
    pub constants: ConstantFamily,
}

impl Signature {
    fn ordered(name: &str, universe: UniverseKind) -> Self {
        Signature {
            name: name.to_string(),
            universe,
            relations: vec![("<".into(), 2), ("=".into(), 2)],
            functions: vec![],
            constants: ConstantFamily::None,
        }
    }

    pub fn dlo() -> Self {
        Self::ordered("dlo", UniverseKind::Rationals)
    }

    pub fn ehr() -> Self {
        let mut sig = Self::ordered("ehr", UniverseKind::TwoTier);
        sig.constants = ConstantFamily::Indexed { prefix: "c".into() };
        sig
    }

    pub fn ex1() -> Self {
        let mut sig = Self::ordered("ex1", UniverseKind::Fibered);
        sig.relations.push(("P1".into(), 1));
        sig.relations.push(("P2".into(), 1));
        sig.functions.push(("f".into(), 1));
        sig
    }

    pub fn relation_arity(&self, symbol: &str) -> Option<usize> {
        self.relations.iter().find(|(s, _)| s == symbol).map(|(_, a)| *a)
    }

    pub fn function_arity(&self, symbol: &str) -> Option<usize> {
        self.functions.iter().find(|(s, _)| s == symbol).map(|(_, a)| *a)
    }

    pub fn has_constants(&self) -> bool {
        matches!(self.constants, ConstantFamily::Indexed { .. })
    }

    /// Whether `p` belongs to this signature's universe.
    pub fn admits<Q: Scalar>(&self, p: &Point<Q>) -> bool {
        matches!(
            (self.universe, p),
            (UniverseKind::Rationals, Point::Rat(_))
                | (UniverseKind::TwoTier, Point::Tier(..))
                | (UniverseKind::Fibered, Point::Pair(..) | Point::Single(_))
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term<Q> {
    Var(String),
    /// `c_i`
    Const(u64),
    Apply(String, Vec<Term<Q>>),
    /// An element injected as an opaque literal.
    Param(Point<Q>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    Lt,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula<Q> {
    Atom(Rel, Term<Q>, Term<Q>),
    Pred(Sort, Term<Q>),
    Not(Box<Formula<Q>>),
    And(Box<Formula<Q>>, Box<Formula<Q>>),
    Or(Box<Formula<Q>>, Box<Formula<Q>>),
    Implies(Box<Formula<Q>>, Box<Formula<Q>>),
    Exists(String, Box<Formula<Q>>),
    Forall(String, Box<Formula<Q>>),
}

/// Variable-to-element assignment used by [`Formula::substitute`].
pub type Binding<Q> = BTreeMap<String, Point<Q>>;

impl<Q: Scalar> Term<Q> {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    pub fn f(arg: Term<Q>) -> Self {
        Term::Apply("f".into(), vec![arg])
    }

    fn collect_vars<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !bound.contains(&v.as_str()) && !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Apply(_, args) => args.iter().for_each(|a| a.collect_vars(bound, out)),
            Term::Const(_) | Term::Param(_) => {}
        }
    }

    fn substitute(&self, binding: &Binding<Q>, bound: &[String]) -> Self {
        match self {
            Term::Var(v) if !bound.contains(v) => match binding.get(v) {
                Some(p) => Term::Param(p.clone()),
                None => self.clone(),
            },
            Term::Apply(name, args) => {
                Term::Apply(name.clone(), args.iter().map(|a| a.substitute(binding, bound)).collect())
            }
            _ => self.clone(),
        }
    }

    fn for_each_param<'a>(&'a self, visit: &mut dyn FnMut(&'a Point<Q>)) {
        match self {
            Term::Param(p) => visit(p),
            Term::Apply(_, args) => args.iter().for_each(|a| a.for_each_param(visit)),
            Term::Var(_) | Term::Const(_) => {}
        }
    }

    fn for_each_constant(&self, visit: &mut dyn FnMut(u64)) {
        match self {
            Term::Const(i) => visit(*i),
            Term::Apply(_, args) => args.iter().for_each(|a| a.for_each_constant(visit)),
            Term::Var(_) | Term::Param(_) => {}
        }
    }

    fn size(&self) -> usize {
        match self {
            Term::Apply(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            _ => 1,
        }
    }
}

impl<Q: Scalar> Formula<Q> {
    pub fn lt(a: Term<Q>, b: Term<Q>) -> Self {
        Formula::Atom(Rel::Lt, a, b)
    }

    pub fn eq(a: Term<Q>, b: Term<Q>) -> Self {
        Formula::Atom(Rel::Eq, a, b)
    }

    pub fn and(a: Self, b: Self) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Self, b: Self) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Self, b: Self) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Self) -> Self {
        Formula::Not(Box::new(a))
    }

    pub fn exists(v: &str, body: Self) -> Self {
        Formula::Exists(v.to_string(), Box::new(body))
    }

    pub fn forall(v: &str, body: Self) -> Self {
        Formula::Forall(v.to_string(), Box::new(body))
    }

    /// Free variables in order of first occurrence.
    pub fn free_variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut Vec<String>) {
        match self {
            Formula::Atom(_, a, b) => {
                a.collect_vars(bound, out);
                b.collect_vars(bound, out);
            }
            Formula::Pred(_, t) => t.collect_vars(bound, out),
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                bound.push(v);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Replaces free occurrences of the bound variables by parameter
    /// literals. Binding a variable that is not free is a no-op. Points are
    /// closed terms, so no renaming is ever needed.
    pub fn substitute(&self, binding: &Binding<Q>) -> Self {
        self.substitute_under(binding, &mut Vec::new())
    }

    fn substitute_under(&self, binding: &Binding<Q>, bound: &mut Vec<String>) -> Self {
        match self {
            Formula::Atom(r, a, b) => Formula::Atom(*r, a.substitute(binding, bound), b.substitute(binding, bound)),
            Formula::Pred(s, t) => Formula::Pred(*s, t.substitute(binding, bound)),
            Formula::Not(a) => Formula::not(a.substitute_under(binding, bound)),
            Formula::And(a, b) => Formula::and(a.substitute_under(binding, bound), b.substitute_under(binding, bound)),
            Formula::Or(a, b) => Formula::or(a.substitute_under(binding, bound), b.substitute_under(binding, bound)),
            Formula::Implies(a, b) => {
                Formula::implies(a.substitute_under(binding, bound), b.substitute_under(binding, bound))
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                bound.push(v.clone());
                let body = body.substitute_under(binding, bound);
                bound.pop();
                match self {
                    Formula::Exists(..) => Formula::exists(v, body),
                    _ => Formula::forall(v, body),
                }
            }
        }
    }

    /// Substitutes a single variable.
    pub fn instantiate(&self, var: &str, p: &Point<Q>) -> Self {
        let mut b = Binding::new();
        b.insert(var.to_string(), p.clone());
        self.substitute(&b)
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::Pred(..) => 0,
            Formula::Not(a) => a.quantifier_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            Formula::Exists(_, body) | Formula::Forall(_, body) => 1 + body.quantifier_depth(),
        }
    }

    /// Number of AST nodes, terms included.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_, a, b) => 1 + a.size() + b.size(),
            Formula::Pred(_, t) => 1 + t.size(),
            Formula::Not(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.size() + b.size(),
            Formula::Exists(_, body) | Formula::Forall(_, body) => 1 + body.size(),
        }
    }

    pub fn for_each_param<'a>(&'a self, visit: &mut dyn FnMut(&'a Point<Q>)) {
        match self {
            Formula::Atom(_, a, b) => {
                a.for_each_param(visit);
                b.for_each_param(visit);
            }
            Formula::Pred(_, t) => t.for_each_param(visit),
            Formula::Not(a) => a.for_each_param(visit),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.for_each_param(visit);
                b.for_each_param(visit);
            }
            Formula::Exists(_, body) | Formula::Forall(_, body) => body.for_each_param(visit),
        }
    }

    pub fn for_each_constant(&self, visit: &mut dyn FnMut(u64)) {
        match self {
            Formula::Atom(_, a, b) => {
                a.for_each_constant(visit);
                b.for_each_constant(visit);
            }
            Formula::Pred(_, t) => t.for_each_constant(visit),
            Formula::Not(a) => a.for_each_constant(visit),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.for_each_constant(visit);
                b.for_each_constant(visit);
            }
            Formula::Exists(_, body) | Formula::Forall(_, body) => body.for_each_constant(visit),
        }
    }

    pub fn params(&self) -> Vec<Point<Q>> {
        let mut out: Vec<Point<Q>> = Vec::new();
        self.for_each_param(&mut |p| {
            if !out.contains(p) {
                out.push(p.clone());
            }
        });
        out
    }
}

impl<Q: Scalar> fmt::Display for Term<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(i) => write!(f, "c{i}"),
            Term::Apply(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Term::Param(p) => write!(f, "{p}"),
        }
    }
}

impl<Q: Scalar> Formula<Q> {
    fn is_binary(&self) -> bool {
        matches!(self, Formula::And(..) | Formula::Or(..) | Formula::Implies(..))
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_binary() {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Canonical concrete syntax. Binary connectives always parenthesize binary
/// operands; `not` and quantifier bodies are always parenthesized.
impl<Q: Scalar> fmt::Display for Formula<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(Rel::Lt, a, b) => write!(f, "{a} < {b}"),
            Formula::Atom(Rel::Eq, a, b) => write!(f, "{a} = {b}"),
            Formula::Pred(s, t) => write!(f, "{}({t})", s.name()),
            Formula::Not(a) => write!(f, "not ({a})"),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                let op = match self {
                    Formula::And(..) => "and",
                    Formula::Or(..) => "or",
                    _ => "implies",
                };
                a.fmt_operand(f)?;
                write!(f, " {op} ")?;
                b.fmt_operand(f)
            }
            Formula::Exists(v, body) => write!(f, "exists {v} ({body})"),
            Formula::Forall(v, body) => write!(f, "forall {v} ({body})"),
        }
    }
}

/// Canonical text of a formula; inverse of [`parse_formula`].
pub fn format_formula<Q: Scalar>(phi: &Formula<Q>) -> String {
    phi.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type F = Formula<Ratio<i64>>;
    type T = Term<Ratio<i64>>;

    fn p(n: i64) -> Point<Ratio<i64>> {
        Point::Rat(Ratio::from_integer(n))
    }

    #[test]
    fn printing() {
        assert_eq!(F::eq(T::var("x"), T::var("x")).to_string(), "x = x");
        assert_eq!(F::not(F::lt(T::var("x"), T::var("y"))).to_string(), "not (x < y)");
        let phi = F::forall(
            "x",
            F::implies(F::Pred(Sort::P1, T::var("x")), F::exists("y", F::eq(T::f(T::var("x")), T::var("y")))),
        );
        assert_eq!(phi.to_string(), "forall x (P1(x) implies exists y (f(x) = y))");
        let nested = F::and(F::lt(T::var("a"), T::var("b")), F::or(F::eq(T::var("a"), T::var("b")), F::lt(T::var("b"), T::var("a"))));
        assert_eq!(nested.to_string(), "a < b and (a = b or b < a)");
    }

    #[test]
    fn free_variables_in_first_occurrence_order() {
        let sig = Signature::dlo();
        let fv = |s: &str| parse_formula::<Ratio<i64>>(s, &sig).unwrap().free_variables();
        assert_eq!(fv("exists y (x < y)"), vec!["x"]);
        assert_eq!(fv("x < y and y < z"), vec!["x", "y", "z"]);
        assert!(fv("forall x (x = x)").is_empty());
        assert_eq!(fv("z < x and exists x (x < w)"), vec!["z", "x", "w"]);
    }

    #[test]
    fn substitution() {
        let sig = Signature::dlo();
        let parse = |s: &str| parse_formula::<Ratio<i64>>(s, &sig).unwrap();
        let mut b = Binding::new();
        b.insert("y".to_string(), p(3));
        assert_eq!(parse("x < y").substitute(&b).to_string(), "x < @{3}");
        let bound = parse("exists y (x < y)");
        assert_eq!(bound.substitute(&b), bound);

        let ex1 = Signature::ex1();
        let phi = parse_formula::<Ratio<i64>>("f(x) = z", &ex1).unwrap();
        let pair = Point::Pair(Ratio::from_integer(2), Ratio::from_integer(3));
        assert_eq!(phi.instantiate("x", &pair).to_string(), "f(@{(2,3)}) = z");
    }

    #[test]
    fn depth_and_params() {
        let sig = Signature::dlo();
        let phi = parse_formula::<Ratio<i64>>("exists y (x < y and forall z (z < @{1} or z = @{2}))", &sig).unwrap();
        assert_eq!(phi.quantifier_depth(), 2);
        assert_eq!(phi.params(), vec![p(1), p(2)]);
    }
}
