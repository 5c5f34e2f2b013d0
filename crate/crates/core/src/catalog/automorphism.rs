//! Finitely described automorphisms, used as an oracle for closure
//! soundness: anything definable over `A` is fixed by every automorphism
//! fixing `A` pointwise.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::point::{Point, Tier};
use super::{StructureHandle, StructureId};
use crate::scalar::Scalar;

/// Increasing piecewise-linear bijection of the rationals: linear between
/// knots, slope 1 beyond the outermost ones.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PlMap<Q> {
    pub knots: Vec<(Q, Q)>,
}

impl<Q: Scalar> PlMap<Q> {
    pub fn identity() -> Self {
        PlMap { knots: Vec::new() }
    }

    pub fn apply(&self, x: &Q) -> Q {
        let k = &self.knots;
        if k.is_empty() {
            return x.clone();
        }
        if x <= &k[0].0 {
            return x.clone() + (k[0].1.clone() - k[0].0.clone());
        }
        let last = &k[k.len() - 1];
        if x >= &last.0 {
            return x.clone() + (last.1.clone() - last.0.clone());
        }
        let i = k.partition_point(|(kx, _)| kx <= x);
        let (x0, y0) = &k[i - 1];
        let (x1, y1) = &k[i];
        y0.clone() + (x.clone() - x0.clone()) * (y1.clone() - y0.clone()) / (x1.clone() - x0.clone())
    }

    /// A random map fixing every value in `fixed` and moving each gap
    /// between them into itself.
    fn random_fixing<R: Rng>(rng: &mut R, fixed: &[Q]) -> Self {
        let mut fixed = fixed.to_vec();
        fixed.sort();
        fixed.dedup();
        let mut knots: Vec<(Q, Q)> = fixed.iter().map(|q| (q.clone(), q.clone())).collect();
        let mut bounds: Vec<(Option<Q>, Option<Q>)> = Vec::new();
        let mut lo = None;
        for f in &fixed {
            bounds.push((lo, Some(f.clone())));
            lo = Some(f.clone());
        }
        bounds.push((lo, None));
        for (lo, hi) in bounds {
            let n = rng.gen_range(0..=2);
            let mut xs: Vec<Q> = (0..n).map(|_| random_in(rng, lo.as_ref(), hi.as_ref())).collect();
            let mut ys: Vec<Q> = (0..n).map(|_| random_in(rng, lo.as_ref(), hi.as_ref())).collect();
            xs.sort();
            ys.sort();
            xs.dedup();
            ys.dedup();
            let n = xs.len().min(ys.len());
            knots.extend(xs.into_iter().zip(ys).take(n));
        }
        knots.sort();
        PlMap { knots }
    }

    /// Random self-map of the closed unit interval fixing both ends and
    /// every value in `fixed`.
    fn random_unit<R: Rng>(rng: &mut R, fixed: &[Q]) -> Self {
        let mut f: Vec<Q> = fixed.to_vec();
        f.push(Q::zero());
        f.push(Q::one());
        let mut map = Self::random_fixing(rng, &f);
        map.knots.retain(|(x, _)| x >= &Q::zero() && x <= &Q::one());
        map
    }

    /// Random map of the negative half-line fixing 0 and `fixed`.
    fn random_negative<R: Rng>(rng: &mut R, fixed: &[Q]) -> Self {
        let mut f: Vec<Q> = fixed.to_vec();
        f.push(Q::zero());
        let mut map = Self::random_fixing(rng, &f);
        map.knots.retain(|(x, _)| x <= &Q::zero());
        map
    }
}

fn random_in<Q: Scalar, R: Rng>(rng: &mut R, lo: Option<&Q>, hi: Option<&Q>) -> Q {
    const DENOMS: [i64; 6] = [2, 3, 4, 5, 7, 8];
    let d = DENOMS[rng.gen_range(0..DENOMS.len())];
    match (lo, hi) {
        (Some(l), Some(h)) => {
            let t = Q::from_fraction(rng.gen_range(1..d), d);
            l.clone() + (h.clone() - l.clone()) * t
        }
        (Some(l), None) => l.clone() + Q::from_fraction(rng.gen_range(1..=5 * d), d),
        (None, Some(h)) => h.clone() - Q::from_fraction(rng.gen_range(1..=5 * d), d),
        (None, None) => Q::from_fraction(rng.gen_range(-5 * d..=5 * d), d),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Automorphism<Q> {
    Dlo(PlMap<Q>),
    /// `negative` acts below 0 on the low tier, `blocks[i]` (or `default_block`)
    /// on `[i, i+1]` after translating to `[0, 1]`, `high` on the high tier.
    Ehr {
        negative: PlMap<Q>,
        blocks: BTreeMap<i64, PlMap<Q>>,
        default_block: PlMap<Q>,
        high: PlMap<Q>,
    },
    /// `base` moves P2 and the bases of P1; each fiber is moved by its own map.
    Ex1 {
        base: PlMap<Q>,
        fibers: BTreeMap<Q, PlMap<Q>>,
        default_fiber: PlMap<Q>,
    },
}

impl<Q: Scalar> Automorphism<Q> {
    pub fn apply(&self, p: &Point<Q>) -> Point<Q> {
        match (self, p) {
            (Automorphism::Dlo(m), Point::Rat(q)) => Point::Rat(m.apply(q)),
            (Automorphism::Ehr { negative, blocks, default_block, high }, Point::Tier(t, q)) => match t {
                Tier::High => Point::Tier(Tier::High, high.apply(q)),
                Tier::Low if q < &Q::zero() => Point::Tier(Tier::Low, negative.apply(q)),
                Tier::Low => {
                    let i = q.floor();
                    let key = i.to_i64().expect("block index fits i64");
                    let map = blocks.get(&key).unwrap_or(default_block);
                    Point::Tier(Tier::Low, i.clone() + map.apply(&(q.clone() - i)))
                }
            },
            (Automorphism::Ex1 { base, fibers, default_fiber }, Point::Pair(n, m)) => {
                let map = fibers.get(n).unwrap_or(default_fiber);
                Point::Pair(base.apply(n), map.apply(m))
            }
            (Automorphism::Ex1 { base, .. }, Point::Single(q)) => Point::Single(base.apply(q)),
            (_, other) => panic!("automorphism applied to foreign point {other}"),
        }
    }
}

impl StructureHandle {
    /// Deterministic in `seed`.
    pub fn sample_automorphism<Q: Scalar>(&self, seed: u64) -> Automorphism<Q> {
        self.sample_automorphism_fixing(&[], seed)
    }

    /// A random automorphism fixing `fixed` pointwise. Deterministic in
    /// `(fixed, seed)`.
    pub fn sample_automorphism_fixing<Q: Scalar>(&self, fixed: &[Point<Q>], seed: u64) -> Automorphism<Q> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self.id {
            StructureId::Dlo => {
                let f: Vec<Q> = fixed
                    .iter()
                    .filter_map(|p| match p {
                        Point::Rat(q) => Some(q.clone()),
                        _ => None,
                    })
                    .collect();
                Automorphism::Dlo(PlMap::random_fixing(&mut rng, &f))
            }
            StructureId::Ehr => {
                let mut neg = Vec::new();
                let mut per_block: BTreeMap<i64, Vec<Q>> = BTreeMap::new();
                let mut high = Vec::new();
                for p in fixed {
                    match p {
                        Point::Tier(Tier::Low, q) if q < &Q::zero() => neg.push(q.clone()),
                        Point::Tier(Tier::Low, q) => {
                            let i = q.floor();
                            per_block.entry(i.to_i64().unwrap()).or_default().push(q.clone() - i);
                        }
                        Point::Tier(Tier::High, q) => high.push(q.clone()),
                        _ => {}
                    }
                }
                let negative = PlMap::random_negative(&mut rng, &neg);
                let default_block = PlMap::random_unit(&mut rng, &[]);
                let mut blocks = BTreeMap::new();
                for (i, local) in per_block {
                    blocks.insert(i, PlMap::random_unit(&mut rng, &local));
                }
                // A few unconstrained blocks get their own maps too.
                for _ in 0..rng.gen_range(0..3) {
                    let i = rng.gen_range(0..6);
                    blocks.entry(i).or_insert_with(|| PlMap::random_unit(&mut rng, &[]));
                }
                let high = PlMap::random_fixing(&mut rng, &high);
                Automorphism::Ehr { negative, blocks, default_block, high }
            }
            StructureId::Ex1 => {
                let mut bases = Vec::new();
                let mut fiber_fixed: BTreeMap<Q, Vec<Q>> = BTreeMap::new();
                for p in fixed {
                    match p {
                        Point::Pair(n, m) => {
                            bases.push(n.clone());
                            fiber_fixed.entry(n.clone()).or_default().push(m.clone());
                        }
                        Point::Single(q) => bases.push(q.clone()),
                        _ => {}
                    }
                }
                let base = PlMap::random_fixing(&mut rng, &bases);
                let default_fiber = PlMap::random_fixing(&mut rng, &[]);
                let mut fibers = BTreeMap::new();
                for (n, ms) in fiber_fixed {
                    fibers.insert(n, PlMap::random_fixing(&mut rng, &ms));
                }
                Automorphism::Ex1 { base, fibers, default_fiber }
            }
        }
    }

    /// Checks that `sigma` preserves order, constants, sorts and `f` on
    /// every pair drawn from `sample`; returns the first violation.
    pub fn check_preserves<Q: Scalar>(&self, sigma: &Automorphism<Q>, sample: &[Point<Q>]) -> Result<(), String> {
        for a in sample {
            let sa = sigma.apply(a);
            if sa.sort() != a.sort() {
                return Err(format!("sort of {a} not preserved"));
            }
            if let Point::Pair(n, _) = a {
                let fa = Point::Single(n.clone());
                if super::eval::apply_f(sa.clone()) != sigma.apply(&fa) {
                    return Err(format!("f not preserved at {a}"));
                }
            }
            for b in sample {
                let sb = sigma.apply(b);
                if a.cmp(b) != sa.cmp(&sb) {
                    return Err(format!("order of {a}, {b} not preserved"));
                }
            }
        }
        if self.has_constants() {
            for i in 0..12 {
                let c: Point<Q> = Point::constant(i);
                if sigma.apply(&c) != c {
                    return Err(format!("constant c{i} moved"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type R = Ratio<i64>;

    fn grid(s: &StructureHandle) -> Vec<Point<R>> {
        let mut out = Vec::new();
        for k in -12..=24 {
            let q = R::new(k, 4);
            match s.id {
                StructureId::Dlo => out.push(Point::Rat(q)),
                StructureId::Ehr => {
                    out.push(Point::low(q));
                    out.push(Point::high(q));
                }
                StructureId::Ex1 => {
                    out.push(Point::Single(q));
                    out.push(Point::Pair(R::new(k, 3), q));
                    out.push(Point::Pair(R::from_integer(2), q));
                }
            }
        }
        out
    }

    #[test]
    fn sampled_maps_preserve_structure() {
        for s in [StructureHandle::dlo(), StructureHandle::ehr(), StructureHandle::ex1()] {
            let sample = grid(&s);
            for seed in 0..20 {
                let sigma = s.sample_automorphism::<R>(seed);
                s.check_preserves(&sigma, &sample).unwrap();
            }
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let s = StructureHandle::ehr();
        assert_eq!(s.sample_automorphism::<R>(1), s.sample_automorphism::<R>(1));
    }

    #[test]
    fn fixing_sets_are_fixed() {
        let s = StructureHandle::ex1();
        let fixed = vec![Point::Pair(R::from_integer(2), R::from_integer(3)), Point::Single(R::new(1, 2))];
        for seed in 0..20 {
            let sigma = s.sample_automorphism_fixing::<R>(&fixed, seed);
            for p in &fixed {
                assert_eq!(&sigma.apply(p), p);
            }
            assert_eq!(sigma.apply(&Point::Single(R::from_integer(2))), Point::Single(R::from_integer(2)));
        }
    }
}
