//! The acceptance criteria, one line each.

mod common;

use std::time::{Duration, Instant};

use common::{
    lucas_mismatches, monomial_formula_mismatches, prime, reconstruct, reflection_mismatches, table23_mismatches,
    zero_one_digit_numbers,
};
use motzkin::analysis::{
    classical_predicate, density_one_criterion, empirical_density, ratio_to_f64, table1_forms, table1_lower_bound,
    verify_forms,
};
use motzkin::field::is_prime;
use motzkin::oracle::motzkin_binomial;
use motzkin::series::{check_identities, series_closed, series_def_bruteforce_upto, series_recurrence};
use motzkin::{Automaton, BiPoly, Binomials, FieldElement, MotzkinTable};
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn dual_oracle() -> Outcome {
    let mut bad = Vec::new();
    for v in [5, 7, 11, 13, 23, 29] {
        let p = prime(v);
        let t = MotzkinTable::convolution(p, 5000);
        let b = Binomials::new(p);
        let n = (0..=5000u64).filter(|&n| motzkin_binomial(&b, n).residue() != t.values()[n as usize]).count();
        if n > 0 {
            bad.push(format!("p={v}: {n} disagreements"));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "6 primes, n <= 5000".into() } else { bad.join("; ") })
}

fn automaton_vs_oracle() -> Outcome {
    let mut bad = Vec::new();
    for v in [5, 7, 11, 13, 17, 19, 23, 29] {
        let p = prime(v);
        let m = Automaton::build(p);
        let t = MotzkinTable::convolution(p, 100_000);
        let n = (0..=100_000u64).filter(|&n| m.eval(n).residue() != t.values()[n as usize]).count();
        if n > 0 {
            bad.push(format!("p={v}: {n} disagreements"));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "8 primes, n <= 10^5".into() } else { bad.join("; ") })
}

fn state_bounds() -> Outcome {
    let mut bad = Vec::new();
    let mut count = 0;
    for v in (5..=199).filter(|&v| is_prime(v)) {
        let m = Automaton::build(prime(v));
        count += 1;
        if m.states().len() > m.state_bound() {
            bad.push(format!("p={v}: {} > {}", m.states().len(), m.state_bound()));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { format!("{count} primes") } else { bad.join("; ") })
}

fn transition_tables() -> Outcome {
    let mut bad = Vec::new();
    for v in [7, 13, 19, 5, 11, 17, 23] {
        let mism = Automaton::build(prime(v)).verify_tables();
        if !mism.is_empty() {
            bad.push(format!("p={v}: {}", mism.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "7 primes, 0 mismatches".into() } else { bad.join("; ") })
}

fn monomial_tables() -> Outcome {
    let mut bad = Vec::new();
    for v in [5, 7, 11, 13, 17, 19] {
        for m in table23_mismatches(prime(v)) {
            bad.push(format!("p={v} {} d={} [{}]: {} vs {}", m.state, m.digit, m.form, m.found, m.expected));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "6 primes, all cells".into() } else { bad.join("; ") })
}

fn series_suite() -> Outcome {
    let rec = series_recurrence(10_000);
    let rows = series_def_bruteforce_upto(10_000);
    let mut bad = Vec::new();
    let route_bad = (0..=10_000u64)
        .filter(|&n| rec[n as usize] != series_closed(n) || rec[n as usize] != rows[n as usize])
        .count();
    if route_bad > 0 {
        bad.push(format!("{route_bad} indices where the three routes disagree"));
    }
    let mut falsified = 0;
    let mut first = None;
    for v in (5..1000).filter(|&v| is_prime(v)) {
        let rep = check_identities(prime(v));
        for c in rep.falsified() {
            falsified += 1;
            first.get_or_insert(format!("p={v}: {} = {}, expected {}", c.name, c.value, c.expected));
        }
    }
    if falsified > 0 {
        bad.push(format!("{falsified} identity failures, first {}", first.unwrap()));
    }
    outcome(bad.is_empty(), if bad.is_empty() { "n <= 10^4, primes < 1000".into() } else { bad.join("; ") })
}

fn structural_forms() -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for v in [5, 7, 11, 13] {
        let p = prime(v);
        let m = Automaton::build(p);
        let t = MotzkinTable::convolution(p, 10_000);
        let rep = verify_forms(&m, 1_000_000, Some(&t));
        checked += rep.checked;
        if !rep.violations.is_empty() {
            bad.push(format!("p={v}: {} violations, first n={}", rep.violations.len(), rep.violations[0].n));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { format!("{checked} members") } else { bad.join("; ") })
}

fn classical() -> Outcome {
    let mut bad = Vec::new();
    for modulus in [5u32, 2, 3] {
        let t = MotzkinTable::convolution_mod(modulus, 100_000);
        let n = t
            .values()
            .iter()
            .enumerate()
            .filter(|&(n, &v)| !classical_predicate(modulus, n as u64).unwrap().matches(modulus, v))
            .count();
        if n > 0 {
            bad.push(format!("mod {modulus}: {n} disagreements"));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "mod 5, 2, 3 for n <= 10^5".into() } else { bad.join("; ") })
}

fn densities() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    let r5 = empirical_density(&Automaton::build(prime(5)), 0, 1_000_000);
    let gap = (r5.density_f64() - 0.1).abs();
    pass &= gap <= 0.005;
    parts.push(format!("p=5: {:.6}", r5.density_f64()));
    for v in [7, 11, 13] {
        let p = prime(v);
        let r = empirical_density(&Automaton::build(p), 0, 1_000_000);
        let lower = table1_lower_bound(p);
        let ok = BigRational::new((r.count as i64).into(), (r.limit as i64).into()) >= lower;
        pass &= ok;
        parts.push(format!("p={v}: {:.6} vs {:.6}", r.density_f64(), ratio_to_f64(&lower)));
    }
    outcome(pass, parts.join(", "))
}

fn density_one() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (v, expect) in [(7, true), (17, true), (19, true), (5, false), (11, false), (13, false), (23, false)] {
        let d = density_one_criterion(&Binomials::new(prime(v)));
        pass &= d.is_some() == expect;
        parts.push(format!("p={v}: {}", d.map_or("-".into(), |d| d.to_string())));
    }
    outcome(pass, parts.join(", "))
}

fn density_theorem() -> Outcome {
    let n = 1_000_000u64;
    let mut pass = true;
    let mut worst = 0.0f64;
    for v in [5, 7] {
        for set in table1_forms(prime(v)) {
            let empirical = BigRational::new((set.count(n) as i64).into(), (n as i64).into());
            let gap = (empirical - set.density_formula()).abs();
            let bound = BigRational::new(num_bigint::BigInt::from(set.q).pow(set.s + set.t + 2), (n as i64).into());
            worst = worst.max(ratio_to_f64(&gap));
            pass &= gap <= bound;
        }
    }
    outcome(pass, format!("6 families, largest gap {worst:.2e}"))
}

fn property_suite() -> Outcome {
    let mut bad = Vec::new();
    let mut runner = TestRunner::new_with_rng(Config::with_cases(64), proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha));
    for v in [5u64, 7] {
        let p = prime(v);
        let poly = move || prop::collection::vec((0u32..15, 0u32..15, -40i64..40), 0..14).prop_map(move |t| BiPoly::from_terms(p, t));
        let linear = runner.run(&(poly(), poly(), 0i64..1000, 0i64..1000), |(a, b, x, y)| {
            let (x, y) = (p.reduce(x), p.reduce(y));
            let combo = a.scale(x, p).add(&b.scale(y, p), p);
            for d in 0..p.value() {
                let rhs = a.cartier(d, d, p).scale(x, p).add(&b.cartier(d, d, p).scale(y, p), p);
                prop_assert_eq!(combo.cartier(d, d, p), rhs);
            }
            Ok(())
        });
        if let Err(e) = linear {
            bad.push(format!("linearity p={v}: {e}"));
        }
        if let Err(e) = runner.run(&poly(), |a| {
            prop_assert_eq!(reconstruct(&a, p), a);
            Ok(())
        }) {
            bad.push(format!("reconstruction p={v}: {e}"));
        }
    }
    for v in [5, 7, 11, 13] {
        let m = monomial_formula_mismatches(prime(v));
        if !m.is_empty() {
            bad.push(format!("monomial formula p={v}: {m:?}"));
        }
    }
    for v in [5, 7, 11] {
        if lucas_mismatches(prime(v)) > 0 {
            bad.push(format!("lucas p={v}"));
        }
    }
    for v in (5..200).filter(|&v| is_prime(v)) {
        if reflection_mismatches(prime(v)) > 0 {
            bad.push(format!("reflection p={v}"));
        }
    }
    for v in [7u64, 13] {
        let m = Automaton::build(prime(v));
        let n = zero_one_digit_numbers(v, 1_000_000).into_iter().filter(|&n| m.eval(n) != FieldElement::ONE).count();
        if n > 0 {
            bad.push(format!("0/1 digits p={v}: {n} exceptions"));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "all properties hold".into() } else { bad.join("; ") })
}

#[test]
fn acceptance() {
    let criteria: [(&str, Duration, fn() -> Outcome); 12] = [
        ("dual oracle agreement", Duration::from_secs(30), dual_oracle),
        ("automaton matches oracle", Duration::from_secs(120), automaton_vs_oracle),
        ("state-count bounds", Duration::from_secs(60), state_bounds),
        ("transition tables", Duration::MAX, transition_tables),
        ("monomial image tables", Duration::MAX, monomial_tables),
        ("series suite", Duration::from_secs(10), series_suite),
        ("structural forms", Duration::MAX, structural_forms),
        ("classical characterizations", Duration::MAX, classical),
        ("empirical densities", Duration::from_secs(60), densities),
        ("density-one criterion", Duration::MAX, density_one),
        ("density formula", Duration::MAX, density_theorem),
        ("property suite", Duration::from_secs(120), property_suite),
    ];
    let mut failed = Vec::new();
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let pass = result.pass && in_time;
        let timing = if in_time { String::new() } else { format!(" (over the {}s budget)", budget.as_secs()) };
        println!(
            "criterion {:>2} {:<28} {} [{:.2}s] {}{timing}",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            result.detail
        );
        if !pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

