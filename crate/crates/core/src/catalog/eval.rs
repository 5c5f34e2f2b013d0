//! Exact evaluation. Quantifiers range over one representative per cell of
//! the decomposition over the parameters, constants and outer variable
//! values: truth is invariant under automorphisms fixing those, and the
//! cells are exactly their orbits.

use std::collections::BTreeSet;

use super::definable::DefinableSet;
use super::point::Point;
use super::StructureHandle;
use crate::error::{Error, Result};
use crate::logic::{Binding, Formula, Rel, Term};
use crate::scalar::Scalar;

type Env<Q> = Vec<(String, Point<Q>)>;

impl StructureHandle {
    /// Truth of a sentence.
    pub fn eval_formula<Q: Scalar>(&self, phi: &Formula<Q>) -> Result<bool> {
        let fv = phi.free_variables();
        if !fv.is_empty() {
            return Err(Error::FreeVariables { expected: 0, found: fv });
        }
        self.precheck(phi)?;
        let fixed = self.fixed_points(phi);
        self.holds(phi, &mut Vec::new(), &fixed)
    }

    /// Truth of a formula under an assignment of all its free variables.
    pub fn satisfies<Q: Scalar>(&self, phi: &Formula<Q>, binding: &Binding<Q>) -> Result<bool> {
        self.eval_formula(&phi.substitute(binding))
    }

    /// The set defined by a formula in at most one free variable after
    /// substituting `params`.
    pub fn definable_set<Q: Scalar>(&self, phi: &Formula<Q>, params: &Binding<Q>) -> Result<DefinableSet<Q>> {
        let psi = phi.substitute(params);
        let fv = psi.free_variables();
        if fv.len() > 1 {
            return Err(Error::FreeVariables { expected: 1, found: fv });
        }
        self.precheck(&psi)?;
        let fixed = self.fixed_points(&psi);
        let cells = self.cells(fixed.iter().cloned());
        let mut selected = Vec::with_capacity(cells.len());
        for cell in &cells {
            let mut env = match fv.first() {
                Some(v) => vec![(v.clone(), cell.representative())],
                None => vec![],
            };
            selected.push(self.holds(&psi, &mut env, &fixed)?);
        }
        Ok(DefinableSet::from_cells(&cells, &selected))
    }

    /// Elements the truth of `phi` may depend on: its parameters, the
    /// constants it names, closed under `f`.
    fn fixed_points<Q: Scalar>(&self, phi: &Formula<Q>) -> BTreeSet<Point<Q>> {
        let mut pts: Vec<Point<Q>> = phi.params();
        phi.for_each_constant(&mut |i| pts.push(Point::constant(i)));
        self.function_closure(pts)
    }

    fn precheck<Q: Scalar>(&self, phi: &Formula<Q>) -> Result<()> {
        let depth = phi.quantifier_depth();
        if depth > self.depth_budget {
            return Err(Error::DepthBudget { depth, budget: self.depth_budget });
        }
        let mut foreign = None;
        phi.for_each_param(&mut |p| {
            if foreign.is_none() && !self.admits(p) {
                foreign = Some(p.clone());
            }
        });
        if let Some(p) = foreign {
            return Err(Error::ForeignPoint { point: p.to_string(), structure: self.id.to_string() });
        }
        let mut has_const = false;
        phi.for_each_constant(&mut |_| has_const = true);
        if has_const && !self.has_constants() {
            return Err(Error::Precondition(format!("{} has no constant symbols", self.id)));
        }
        Ok(())
    }

    fn term_value<Q: Scalar>(&self, t: &Term<Q>, env: &Env<Q>) -> Result<Point<Q>> {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(name, _)| name == v)
                .map(|(_, p)| p.clone())
                .ok_or_else(|| Error::UnboundVariable(v.clone())),
            Term::Const(i) => Ok(Point::constant(*i)),
            Term::Param(p) => Ok(p.clone()),
            Term::Apply(name, args) => {
                if name != "f" || args.len() != 1 || self.signature.function_arity("f").is_none() {
                    return Err(Error::UnknownFunction(name.clone()));
                }
                Ok(apply_f(self.term_value(&args[0], env)?))
            }
        }
    }

    fn holds<Q: Scalar>(&self, phi: &Formula<Q>, env: &mut Env<Q>, fixed: &BTreeSet<Point<Q>>) -> Result<bool> {
        Ok(match phi {
            Formula::Atom(rel, a, b) => {
                let (x, y) = (self.term_value(a, env)?, self.term_value(b, env)?);
                match rel {
                    Rel::Lt => x < y,
                    Rel::Eq => x == y,
                }
            }
            Formula::Pred(sort, t) => {
                let x = self.term_value(t, env)?;
                x.sort() == Some(*sort)
            }
            Formula::Not(a) => !self.holds(a, env, fixed)?,
            Formula::And(a, b) => self.holds(a, env, fixed)? && self.holds(b, env, fixed)?,
            Formula::Or(a, b) => self.holds(a, env, fixed)? || self.holds(b, env, fixed)?,
            Formula::Implies(a, b) => !self.holds(a, env, fixed)? || self.holds(b, env, fixed)?,
            Formula::Exists(v, body) => self.quantify(v, body, env, fixed, true)?,
            Formula::Forall(v, body) => !self.quantify(v, body, env, fixed, false)?,
        })
    }

    /// With `want = true`: is there a witness for `body`? With `want =
    /// false`: is there a counterexample?
    fn quantify<Q: Scalar>(
        &self,
        v: &str,
        body: &Formula<Q>,
        env: &mut Env<Q>,
        fixed: &BTreeSet<Point<Q>>,
        want: bool,
    ) -> Result<bool> {
        let relevant = fixed.iter().cloned().chain(env.iter().map(|(_, p)| p.clone()));
        for cell in self.cells(relevant) {
            env.push((v.to_string(), cell.representative()));
            let r = self.holds(body, env, fixed);
            env.pop();
            if r? == want {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// `f` on EX1: projection on P1, identity on P2.
pub(crate) fn apply_f<Q: Scalar>(p: Point<Q>) -> Point<Q> {
    match p {
        Point::Pair(n, _) => Point::Single(n),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::definable::{Component, Cut};
    use crate::catalog::point::Sort;
    use crate::logic::parse_formula;
    use num_rational::Ratio;

    type R = Ratio<i64>;

    fn q(n: i64) -> R {
        R::from_integer(n)
    }

    fn set(s: &StructureHandle, text: &str) -> DefinableSet<R> {
        let phi = parse_formula::<R>(text, &s.signature).unwrap();
        s.definable_set(&phi, &Binding::new()).unwrap()
    }

    fn truth(s: &StructureHandle, text: &str) -> bool {
        s.eval_formula(&parse_formula::<R>(text, &s.signature).unwrap()).unwrap()
    }

    #[test]
    fn dlo_sentences() {
        let s = StructureHandle::dlo();
        assert!(truth(&s, "forall x (exists y (x < y))"));
        assert!(truth(&s, "forall x (forall y (x < y implies exists z (x < z and z < y)))"));
        assert!(!truth(&s, "exists x (forall y (y < x or y = x))"));
        assert!(truth(&s, "@{0} < @{1}"));
    }

    #[test]
    fn dlo_interval() {
        let s = StructureHandle::dlo();
        let d = set(&s, "@{0} < x and x < @{1}");
        assert_eq!(d.components.len(), 1);
        assert_eq!(d.components[0].lower, Cut::After(Point::Rat(q(0))));
        assert_eq!(d.components[0].upper, Cut::Before(Point::Rat(q(1))));
        let d = set(&s, "x = @{0} or exists y (x < y and y < @{0})");
        assert!(d.contains(&Point::Rat(q(0))));
        assert!(d.contains(&Point::Rat(q(-7))));
        assert!(!d.contains(&Point::Rat(R::new(1, 3))));
    }

    #[test]
    fn ehr_constants_and_limit() {
        let s = StructureHandle::ehr();
        assert!(truth(&s, "c0 < c1 and c1 < c2"));
        // Something above c0..c3 that is not between any two of them.
        assert!(truth(&s, "exists x (c3 < x)"));
        let d = set(&s, "c2 < x");
        assert!(d.contains(&Point::high(q(-50))));
        assert!(d.contains(&Point::low(R::new(5, 2))));
        assert!(!d.contains(&Point::constant(2)));
    }

    #[test]
    fn ex1_fibers() {
        let s = StructureHandle::ex1();
        assert!(truth(&s, "forall x (P1(x) implies P2(f(x)))"));
        assert!(truth(&s, "forall x (P1(x) implies exists y (not (y = x) and f(y) = f(x)))"));
        let d = set(&s, "P1(x) and f(x) = @{2:P2}");
        assert_eq!(
            d.components,
            vec![Component { lower: Cut::BeforeFiber(q(2)), upper: Cut::AfterFiber(q(2)), sort: Some(Sort::P1) }]
        );
        // f(x) = x holds exactly on P2 under the identity extension.
        let d = set(&s, "f(x) = x");
        assert!(d.contains(&Point::Single(q(4))));
        assert!(!d.contains(&Point::Pair(q(4), q(4))));
    }

    #[test]
    fn errors() {
        let s = StructureHandle::dlo().with_depth_budget(1);
        let phi = parse_formula::<R>("exists x (exists y (x < y))", &s.signature).unwrap();
        assert!(matches!(s.eval_formula(&phi), Err(Error::DepthBudget { depth: 2, budget: 1 })));
        let phi = parse_formula::<R>("x < y", &s.signature).unwrap();
        assert!(matches!(s.definable_set(&phi, &Binding::new()), Err(Error::FreeVariables { .. })));
        let phi = Formula::lt(Term::var("x"), Term::Param(Point::low(q(1))));
        assert!(matches!(s.definable_set(&phi, &Binding::new()), Err(Error::ForeignPoint { .. })));
    }
}
