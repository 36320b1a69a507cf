use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use phindex::field::{ExprField, SharedField};
use phindex::index::IndexOptions;
use phindex::manifold::{Collar, DomainManifold};
use phindex::random::random_field;
use phindex::verify::{check_tame, doubling_check, negation_check, theorem_verdict, Verifier};
use phindex::zerofind::SearchOptions;
use phindex::HalfInteger;

fn field(comps: &[&str]) -> SharedField {
    Arc::new(ExprField::parse(comps).unwrap())
}

fn disk() -> DomainManifold {
    DomainManifold::parse("x1^2 + x2^2 - 1", &[(-2.0, 2.0), (-2.0, 2.0)], "ball_2").unwrap()
}

fn interval() -> DomainManifold {
    DomainManifold::parse("x1^2 - 1", &[(-2.0, 2.0)], "ball_1").unwrap()
}

#[test]
fn negation_examples() {
    let o = IndexOptions::default();
    let v = negation_check(&disk(), Collar::NegG, &field(&["1", "0"]), &o).unwrap();
    assert!(v.pass);
    assert_eq!(v.computed, HalfInteger::from_int(1));
    let v = negation_check(&interval(), Collar::NegG, &field(&["1"]), &o).unwrap();
    assert!(v.pass);
    assert_eq!(v.computed, HalfInteger::ZERO);
}

#[test]
fn doubling_examples() {
    let o = IndexOptions::default();
    let v = doubling_check(&disk(), Collar::NegG, &field(&["1", "0"]), &o).unwrap();
    assert!(v.pass);
    assert_eq!(v.computed, HalfInteger::from_int(2));
    let v = doubling_check(&interval(), Collar::NegG, &field(&["1"]), &o).unwrap();
    assert!(v.pass);
    assert_eq!(v.computed, HalfInteger::ZERO);
}

#[test]
fn tamed_radial_ball_doubles_to_zero() {
    let m = DomainManifold::parse("x1^2 + x2^2 + x3^2 - 1", &[(-2.0, 2.0); 3], "ball_3").unwrap();
    let r = "sqrt(x1^2 + x2^2 + x3^2)";
    let v = field(&[&format!("{r}*x1"), &format!("{r}*x2"), &format!("{r}*x3")]);
    let o = IndexOptions {
        auto_tame: true,
        ..IndexOptions::default()
    };
    let check = Verifier::new(&m, v, o);
    let d = check.doubling_check(Collar::NegG).unwrap();
    assert!(d.pass);
    assert_eq!(d.computed, HalfInteger::ZERO);
    let n = check.negation_check(Collar::NegG).unwrap();
    assert!(n.pass);
    assert_eq!(n.computed, HalfInteger::ZERO);
}

#[test]
fn annulus_suspension_style_field_totals_zero() {
    let m = DomainManifold::parse(
        "(x1^2 + x2^2 - 1)*(x1^2 + x2^2 - 9)",
        &[(-4.0, 4.0), (-4.0, 4.0)],
        "annulus",
    )
    .unwrap();
    let a = "pi/2*(sqrt(x1^2 + x2^2) - 2)";
    let v = field(&[
        &format!("-x2*cos({a}) + x1*sin({a})"),
        &format!("x1*cos({a}) + x2*sin({a})"),
    ]);
    let verdict = theorem_verdict(&m, Collar::NegG, &v, &IndexOptions::default()).unwrap();
    assert!(verdict.pass);
    assert_eq!(verdict.computed, HalfInteger::ZERO);
}

/// Ten random tame fields on the disk: the boundary index does not depend
/// on the collar.
#[test]
fn collar_independence_on_random_disk_fields() {
    let m = disk();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut done = 0;
    while done < 10 {
        let f = random_field(&mut rng, 2, 3);
        if check_tame(&m, Collar::NegG, &f, &SearchOptions::default()).is_err()
            || check_tame(&m, Collar::Scaled, &f, &SearchOptions::default()).is_err()
        {
            continue;
        }
        let v = Verifier::new(&m, Arc::new(f), IndexOptions::default());
        let c = v.collar_independence_check().unwrap();
        assert!(c.pass, "{c:?}");
        assert!(v.theorem_verdict(Collar::Scaled).unwrap().pass);
        done += 1;
    }
}

#[test]
fn interval_xwf_trials_agree() {
    let m = interval();
    let v = Verifier::new(&m, field(&["1"]), IndexOptions::default());
    let x = v.xwf_invariance_check(Collar::NegG, 5).unwrap();
    assert!(x.pass);
    assert_eq!(x.computed, HalfInteger::ZERO);
}

#[test]
fn disk_xwf_trials_agree() {
    let m = disk();
    let v = Verifier::new(&m, field(&["1", "0"]), IndexOptions::default());
    let x = v.xwf_invariance_check(Collar::NegG, 5).unwrap();
    assert!(x.pass);
    assert_eq!(x.computed, HalfInteger::from_int(1));
}
