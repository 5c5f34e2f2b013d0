use sepmod_core::closure::{overlap, ClosureSet};
use sepmod_core::modelbuilder::{build_t0_separator, build_t2_separators, tarski_vaught_verify, BuildOptions, Outcome, TvStatus};
use sepmod_core::{Point, StructureHandle, ZSpec};

fn p(text: &str) -> Point {
    Point::parse_literal(text).unwrap()
}

#[test]
fn default_budget_t0_builds_verify() {
    let cases = [
        (StructureHandle::dlo(), "@{0}", "@{1}", ZSpec::Empty),
        (StructureHandle::ex1(), "@{2:P2}", "@{(2,3)}", ZSpec::Empty),
        (StructureHandle::ehr(), "@{1/2;0}", "@{3/4;0}", ZSpec::AclOf(vec![])),
    ];
    for (s, a, b, z) in cases {
        let d = build_t0_separator(&s, &[p(a)], &[p(b)], &z, &BuildOptions::default()).unwrap();
        assert_eq!(d.stages.len(), 200);
        for st in &d.stages {
            for pr in &st.processed {
                if let Outcome::WitnessAdded { choice } = &pr.outcome {
                    let forbidden = ClosureSet::listing(s.id, &d.excludes);
                    assert!(choice.reverify(&s, &forbidden, &z).unwrap(), "{}", pr.formula);
                }
            }
        }
        let r = tarski_vaught_verify(&d, 2, 500, 7);
        assert_eq!(r.status, TvStatus::Pass, "{a} vs {b}: {:?}", r.failure);
    }
}

#[test]
fn default_budget_t2_builds_are_disjoint() {
    let cases = [
        (StructureHandle::dlo(), "@{0}", "@{1}", ZSpec::Empty),
        (StructureHandle::ex1(), "@{(2,3)}", "@{(5,1)}", ZSpec::Empty),
        (StructureHandle::ex1(), "@{(2,3)}", "@{(2,4)}", ZSpec::AclOf(vec![p("@{2:P2}")])),
        (StructureHandle::ehr(), "@{1/2;0}", "@{3/4;0}", ZSpec::AclOf(vec![])),
    ];
    for (s, a, b, z) in cases {
        let (da, db) = build_t2_separators(&s, &[p(a)], &[p(b)], &z, &BuildOptions::default()).unwrap();
        let zs = z.resolve(&s);
        let (fa, fb) = (da.final_carrier(), db.final_carrier());
        assert!(overlap(&fa, &fb, &zs).is_empty(), "{a} vs {b}");
        let closed: Vec<Point> = fa.listed().cloned().collect();
        assert_eq!(s.acl_with(&closed, &z).listed().count(), fa.listed().count());
        for d in [&da, &db] {
            let r = tarski_vaught_verify(d, 2, 500, 11);
            assert_eq!(r.status, TvStatus::Pass, "{a} vs {b}: {:?}", r.failure);
        }
    }
}
