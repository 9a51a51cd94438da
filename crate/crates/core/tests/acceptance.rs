//! Acceptance criteria 1-11. Prints one line per criterion and exits
//! nonzero if any fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use discbound::bounds::{
    delta1, delta1_interval, florian_angles, florian_bound, lipschitz_envelope, r_blind, r_blind_by_bisection,
    BoundSample,
};
use discbound::flows::{closed_form_841, closed_form_r6, find_crossings, interstitial, r8, FlowEvaluator, FlowRecipe};
use discbound::harness::{certify_interval, find_delta, BlindCertifier, HarnessError, ThresholdCertifier, Verdict};
use discbound::numerics::Interval;
use discbound::ratios::{ratio_table, TABLE};
use rand::{Rng, SeedableRng};

const R4: f64 = 0.414_213_562_373_095_03;
const R1: f64 = 0.637_555_977_231_945_8;
const R6: f64 = 0.349_198_186_208_549_87;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c1() -> Outcome {
    let d = delta1();
    let err = (d - PI / (2.0 * 3f64.sqrt())).abs().max((d - 0.906_899_682_1).abs());
    let enclosed = delta1_interval().contains(d);
    outcome(err <= 1e-10 && enclosed, format!("delta1 = {d:.12}, error {err:.1e} (tol 1e-10)"))
}

fn c2() -> Outcome {
    let t = ratio_table(1e-10);
    let worst =
        t.iter().zip(TABLE.iter()).map(|(v, row)| (v.enclosure.mid() - row.tabulated).abs()).fold(0.0, f64::max);
    outcome(t.len() == 12 && worst <= 1e-9, format!("{} rows, worst deviation {worst:.1e} (tol 1e-9)", t.len()))
}

fn c3() -> Outcome {
    let (closed, bis) = (r_blind(), r_blind_by_bisection(1e-13));
    let (e1, e2) = ((closed - bis).abs(), (closed - 0.74299).abs());
    outcome(
        e1 <= 1e-9 && e2 <= 1e-5,
        format!("r_B = {closed:.10}, bisection gap {e1:.1e} (tol 1e-9), vs 0.74299 {e2:.1e} (tol 1e-5)"),
    )
}

fn c4() -> Outcome {
    let mut ev = FlowEvaluator::new(FlowRecipe::builtin("flow-841-mid").unwrap()).unwrap();
    let (mut worst, mut invalid) = (0.0f64, 0);
    for k in 0..100 {
        let r = R4 + (R1 - R4) * k as f64 / 99.0;
        match ev.eval(r) {
            Ok((dom, d)) => {
                worst = worst.max((d - closed_form_841(r)).abs());
                invalid += !dom.validate(1e-9).is_empty() as usize;
            }
            Err(_) => invalid += 1,
        }
    }
    outcome(
        worst <= 1e-12 && invalid == 0,
        format!("100 samples on [r4, r1], worst gap {worst:.1e} (tol 1e-12), {invalid} invalid domains"),
    )
}

fn c5() -> Outcome {
    let recipe = FlowRecipe::builtin("flow-841-mid").unwrap();
    let mut ev = FlowEvaluator::new(recipe).unwrap();
    let range = Interval::new(R4, R1).unwrap();
    let mut f = |r: f64| ev.eval(r).map(|x| x.1).unwrap_or(f64::NAN);
    let cell = std::cell::RefCell::new(&mut f);
    let crossings = find_crossings(|r| (cell.borrow_mut())(r), delta1(), range, 1e-10);
    match crossings.first() {
        Some(c) => {
            let err = (c.mid() - 0.4378).abs();
            outcome(err <= 5e-4, format!("a1 = {:.10}, |a1 - 0.4378| = {err:.1e} (tol 5e-4)", c.mid()))
        }
        None => outcome(false, "no crossing found".into()),
    }
}

fn c6() -> Outcome {
    let mut ev = FlowEvaluator::new(FlowRecipe::builtin("flow-r6-1").unwrap()).unwrap();
    let (mut worst, mut failed) = (0.0f64, 0);
    for k in 0..50 {
        let r = (R6 + 1e-4) + (0.99 - R6 - 1e-4) * k as f64 / 49.0;
        match ev.eval(r) {
            Ok((_, d)) => worst = worst.max((d - closed_form_r6(r).unwrap()).abs()),
            Err(_) => failed += 1,
        }
    }
    let at_one = ev.eval(1.0).map(|x| (x.1 - delta1()).abs()).unwrap_or(f64::INFINITY);
    outcome(
        worst <= 1e-9 && failed == 0 && at_one <= 1e-9,
        format!("50 samples, worst gap {worst:.1e} (tol 1e-9), {failed} failures; |d(1) - delta1| = {at_one:.1e}"),
    )
}

fn c7() -> Outcome {
    let r = r8();
    let (dom, d) = interstitial(r).unwrap();
    let formula = PI * (1.0 + 2.0 * r * r) / (2.0 * 3f64.sqrt());
    let e = (d - formula).abs();
    let mut below = 0;
    let mut invalid = 0;
    for k in 0..100 {
        let r = 0.01 + (r8() - 0.01) * (k + 1) as f64 / 100.0;
        let (dom, d) = interstitial(r).unwrap();
        below += (d <= delta1()) as usize;
        if k % 10 == 0 {
            invalid += !dom.validate(1e-9).is_empty() as usize;
        }
    }
    outcome(
        e <= 1e-9 && (d - 0.950_307).abs() < 1e-6 && below == 0 && invalid == 0 && dom.validate(1e-9).is_empty(),
        format!("density at r8 = {d:.9}, gap {e:.1e} (tol 1e-9); {below} of 100 samples not above delta1"),
    )
}

fn c8() -> Outcome {
    let e1 = (florian_bound(1.0).unwrap() - delta1()).abs();
    let e2 = (1..=1000)
        .map(|k| {
            let (a, b) = florian_angles(k as f64 / 1000.0);
            (a + 2.0 * b - PI).abs()
        })
        .fold(0.0, f64::max);
    outcome(
        e1 <= 1e-12 && e2 <= 1e-12,
        format!("|florian(1) - delta1| = {e1:.1e}, max |alpha + 2beta - pi| = {e2:.1e} (tol 1e-12)"),
    )
}

fn c9() -> Outcome {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let mut thresholds = vec![0.92];
    thresholds.extend((0..19).map(|_| rng.gen_range(0.907..0.99)));
    let bad = thresholds
        .iter()
        .filter(|&&t| {
            let c = ThresholdCertifier { threshold: t };
            match find_delta(&c, Interval::point(0.5), 1e-4, delta1() - 1e-6, 1.0) {
                Ok(d) => !(d >= t && d <= t + 1e-4),
                Err(_) => true,
            }
        })
        .count();
    outcome(bad == 0, format!("{} thresholds, {bad} results outside [t, t + 1e-4]", thresholds.len()))
}

fn c10() -> Outcome {
    let good = certify_interval(&BlindCertifier, Interval::new(0.743, 0.99).unwrap(), delta1(), 40);
    let good_ok = match &good {
        Ok(t) => {
            let l = t.leaves();
            l.first().unwrap().interval.lo() == 0.743
                && l.last().unwrap().interval.hi() == 0.99
                && l.windows(2).all(|w| w[0].interval.hi() == w[1].interval.lo())
        }
        Err(_) => false,
    };
    let n_good = good.as_ref().map(|t| t.subintervals).unwrap_or(0);
    let rb = r_blind();
    let (bad_ok, detail) = match certify_interval(&BlindCertifier, Interval::new(0.70, 0.99).unwrap(), delta1(), 40) {
        Err(HarnessError::DepthExceeded(t)) => {
            let leaves = t.leaves();
            let failing_below =
                leaves.iter().filter(|l| l.verdict != Verdict::Proven).all(|l| l.interval.lo() < rb + 1e-9);
            let proven_above = leaves.iter().filter(|l| l.verdict == Verdict::Proven).all(|l| l.interval.lo() >= rb);
            let edge =
                leaves.iter().filter(|l| l.verdict != Verdict::Proven).map(|l| l.interval.hi()).fold(0.0, f64::max);
            (
                failing_below && proven_above && (edge - rb).abs() < 1e-9,
                format!("{} leaves, failures end at {edge:.12} (r_B = {rb:.12})", leaves.len()),
            )
        }
        _ => (false, "expected failure".into()),
    };
    outcome(good_ok && bad_ok, format!("[0.743, 0.99] proven with {n_good} leaves; [0.70, 0.99]: {detail}"))
}

fn c11() -> Outcome {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut shrink_worst = 0.0f64;
    for _ in 0..50 {
        let p = rng.gen_range(1..6);
        let y = rng.gen_range(0.1..0.95);
        let x = y * rng.gen_range(0.01..1.0);
        let q = rng.gen_range(1..4);
        let d = common::random_domain(&mut rng, p, q, y);
        let s = d.with_radius_replaced(y, x).unwrap();
        let expected = -(p as f64) * PI * (y * y - x * x) / d.area();
        shrink_worst = shrink_worst.max((s.density() - d.density() - expected).abs());
    }
    let mut violations = 0;
    for _ in 0..100 {
        let f = common::SlopeBounded::random(&mut rng, 60);
        let n = f.grid.len();
        let samples: Vec<BoundSample> = (0..rng.gen_range(1..8))
            .map(|_| rng.gen_range(0..n))
            .map(|i| BoundSample::new(f.grid[i], f.values[i]).unwrap())
            .collect();
        violations += f.grid.iter().zip(&f.values).filter(|(x, v)| lipschitz_envelope(&samples, **x) < **v).count();
    }
    outcome(
        shrink_worst <= 1e-12 && violations == 0,
        format!("shrink identity worst gap {shrink_worst:.1e} (tol 1e-12); envelope violations {violations} over 100 functions"),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 11] = [
        ("constants", c1, Duration::from_secs(1)),
        ("ratio table", c2, Duration::from_secs(1)),
        ("r_B", c3, Duration::from_secs(1)),
        ("flow-841-mid oracle", c4, Duration::from_secs(1)),
        ("a1 crossing", c5, Duration::from_secs(1)),
        ("flow-r6-1 oracle", c6, Duration::from_secs(10)),
        ("interstitial", c7, Duration::from_secs(5)),
        ("Florian identity", c8, Duration::from_secs(1)),
        ("dichotomy driver", c9, Duration::from_secs(1)),
        ("interval certification", c10, Duration::from_secs(10)),
        ("regularity properties", c11, Duration::from_secs(5)),
    ];
    let mut failed = 0;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let pass = o.pass && took <= *limit;
        failed += !pass as usize;
        println!(
            "criterion {:>2} {}: {} ({}; {:.2}s, limit {}s)",
            k + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 11 criteria passed");
}
