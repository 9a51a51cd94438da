use discbound::bounds::delta1;
use discbound::flows::{
    closed_form_841, closed_form_r6, eval_flow, find_crossings, interstitial, lower_bound_at, r8, FlowEvaluator,
    FlowRecipe, Registry,
};
use discbound::numerics::Interval;
use std::f64::consts::PI;

const R4: f64 = 0.414_213_562_373_095_03;
const R1: f64 = 0.637_555_977_231_945_8;
const R6: f64 = 0.349_198_186_208_549_87;

#[test]
fn flow_841_matches_closed_form_on_its_range() {
    let recipe = FlowRecipe::builtin("flow-841-mid").unwrap();
    let mut ev = FlowEvaluator::new(recipe).unwrap();
    for k in 0..100 {
        let r = R4 + (R1 - R4) * k as f64 / 99.0;
        let (dom, d) = ev.eval(r).unwrap();
        assert!((d - closed_form_841(r)).abs() <= 1e-12, "r = {r}");
        assert!(dom.validate(1e-9).is_empty());
        let census = PI * (2.0 + 2.0 * r * r) / dom.area();
        assert!((census - d).abs() <= 1e-14, "census at r = {r}");
    }
}

#[test]
fn flow_r6_matches_closed_form_on_its_range() {
    let mut ev = FlowEvaluator::new(FlowRecipe::builtin("flow-r6-1").unwrap()).unwrap();
    for k in 0..50 {
        let r = (R6 + 1e-4) + (0.99 - R6 - 1e-4) * k as f64 / 49.0;
        let (dom, d) = ev.eval(r).unwrap();
        assert!((d - closed_form_r6(r).unwrap()).abs() <= 1e-9, "r = {r}");
        assert!(dom.validate(1e-9).is_empty());
        assert_eq!((dom.count_radius(1.0), dom.count_radius(r)), (1, 6));
    }
}

#[test]
fn continuation_order_does_not_matter() {
    let recipe = FlowRecipe::builtin("flow-r6-1").unwrap();
    let (_, a) = eval_flow(&recipe, 0.42).unwrap();
    let mut ev = FlowEvaluator::new(recipe).unwrap();
    ev.eval(0.36).unwrap();
    let (_, b) = ev.eval(0.42).unwrap();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn flow_841_fails_outside_its_existence_range() {
    let mut recipe = FlowRecipe::builtin("flow-841-mid").unwrap();
    recipe.valid_range = Interval::new(0.3, 0.9).unwrap();
    let mut ev = FlowEvaluator::new(recipe).unwrap();
    // below r4 the ratio discs collide
    assert!(ev.eval(0.35).is_err());
    assert!(ev.eval(0.5).is_ok());
}

#[test]
fn r6_crossing_with_delta1_is_recorded() {
    let range = Interval::new(R6, 0.99).unwrap();
    let c = find_crossings(|r| closed_form_r6(r).unwrap_or(f64::NAN), delta1(), range, 1e-12);
    assert_eq!(c.len(), 1);
    // mpmath root of the closed form minus delta1
    assert!((c[0].mid() - 0.355_853_479_284_926).abs() < 1e-11, "{:?}", c);
}

#[test]
fn lower_bound_is_realized_and_above_hexagonal() {
    let mut reg = Registry::builtin();
    for k in 1..100 {
        let r = k as f64 / 100.0;
        let b = lower_bound_at(r, &mut reg).unwrap();
        assert!(b.value >= delta1(), "r = {r}");
        assert!(b.domain.validate(1e-9).is_empty(), "r = {r}, {}", b.source);
        assert!((b.domain.density() - b.value).abs() < 1e-15);
    }
}

#[test]
fn interstitial_census_matches_density() {
    for k in 1..=15 {
        let r = (k as f64 / 100.0).min(r8());
        let (dom, d) = interstitial(r).unwrap();
        let n = dom.count_radius(r);
        assert!((d - PI * (1.0 + n as f64 * r * r) / (2.0 * 3f64.sqrt())).abs() < 1e-12);
    }
}
