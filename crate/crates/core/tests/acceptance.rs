//! End-to-end acceptance checks, one test per criterion, each printing a
//! PASS/FAIL line. Run with:
//!
//!     cargo test -p pqnorm --test acceptance -- --nocapture

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use pqnorm::{
    check_theorem1, grid_oracle, norm_via_duality, objective, operator_norm, optimize,
    optimize_logged, power_iteration_logged, random_positive_matrix, run_suite, vector_norm,
    Exponent, ExponentPair, FactorizeOptions, MatrixDistribution, NormOptions, PositiveMatrix,
    SuiteConfig, Theorem, VerificationReport,
};

fn exp(s: &str) -> Exponent {
    s.parse().unwrap()
}

fn pair(p: &str, q: &str) -> ExponentPair {
    ExponentPair::new(exp(p), exp(q)).unwrap()
}

/// The default pair grid: p in {2, 5/2, 3, 4, inf} x q in {1, 4/3, 3/2, 2}.
fn grid_pairs() -> Vec<ExponentPair> {
    let mut pairs = Vec::new();
    for p in ["2", "5/2", "3", "4", "inf"] {
        for q in ["1", "4/3", "3/2", "2"] {
            pairs.push(pair(p, q));
        }
    }
    pairs
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn report(name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {name}: {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {name} failed: {detail}");
}

fn shared_suite_report() -> &'static VerificationReport {
    static REPORT: OnceLock<VerificationReport> = OnceLock::new();
    REPORT.get_or_init(|| run_suite(&SuiteConfig::default()).expect("default suite runs"))
}

#[test]
fn criterion_1_closed_form_exactness() {
    let start = Instant::now();
    let opts = NormOptions::default();
    let mut worst = 0.0_f64;
    for n in 2..=16 {
        let id = PositiveMatrix::identity(n).unwrap();
        for pr in grid_pairs() {
            let est = operator_norm(&id, &pr, &opts).unwrap();
            let expected = (n as f64).powf(pr.r.inv());
            worst = worst.max(rel(est.value, expected));
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-9 && elapsed < Duration::from_secs(1);
    report(
        "1 (closed-form exactness)",
        pass,
        &format!("worst relative error {worst:.2e}, runtime {elapsed:.1?}"),
    );
}

#[test]
fn criterion_2_rank_one_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut worst_norm = 0.0_f64;
    let mut worst_gap = 0.0_f64;
    for _ in 0..50 {
        let m = rng.gen_range(1..=8);
        let n = rng.gen_range(1..=8);
        let u: Vec<f64> = (0..m)
            .map(|j| {
                if j > 0 && rng.gen::<f64>() < 0.15 {
                    0.0
                } else {
                    0.05 + rng.gen::<f64>()
                }
            })
            .collect();
        let v: Vec<f64> = (0..n)
            .map(|k| {
                if k > 0 && rng.gen::<f64>() < 0.15 {
                    0.0
                } else {
                    0.05 + rng.gen::<f64>()
                }
            })
            .collect();
        let a = PositiveMatrix::rank_one(&u, &v).unwrap();
        for pr in grid_pairs() {
            let expected = vector_norm(&u, pr.q) * vector_norm(&v, pr.p_conj.unwrap());
            let est = operator_norm(&a, &pr, &NormOptions::default()).unwrap();
            worst_norm = worst_norm.max(rel(est.value, expected));
            let fact = optimize(&a, &pr, &FactorizeOptions::default()).unwrap();
            worst_gap = worst_gap.max(fact.gap.abs());
        }
    }
    let pass = worst_norm <= 1e-6 && worst_gap <= 1e-6;
    report(
        "2 (rank-one exactness)",
        pass,
        &format!("worst norm error {worst_norm:.2e}, worst optimize gap {worst_gap:.2e}"),
    );
}

#[test]
fn criterion_3_oracle_equivalence() {
    let start = Instant::now();
    let interior: Vec<ExponentPair> = grid_pairs()
        .into_iter()
        .filter(|pr| pr.p.is_finite() && pr.q.is_finite())
        .collect();
    let mut checked = 0;
    for i in 0..50 {
        let a = random_positive_matrix(3, 3, MatrixDistribution::Uniform, 3000 + i).unwrap();
        for pr in &interior {
            let oracle = grid_oracle(&a, pr, 400).unwrap();
            let power = operator_norm(&a, pr, &NormOptions::default()).unwrap();
            assert!(
                oracle.value <= power.value * (1.0 + 1e-12),
                "oracle {} above power {} on instance {i} {pr}",
                oracle.value,
                power.value
            );
            assert!(
                power.value <= oracle.upper,
                "power {} above oracle upper {} on instance {i} {pr}",
                power.value,
                oracle.upper
            );
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = elapsed < Duration::from_secs(30);
    report(
        "3 (oracle equivalence)",
        pass,
        &format!("{checked} brackets held, runtime {elapsed:.1?}"),
    );
}

#[test]
fn criterion_4_duality_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(4004);
    let mut worst = 0.0_f64;
    for i in 0..100 {
        let m = rng.gen_range(1..=8);
        let n = rng.gen_range(1..=8);
        let dist = [
            MatrixDistribution::Uniform,
            MatrixDistribution::Exponential,
            MatrixDistribution::Sparse(0.5),
        ][i % 3];
        let a = random_positive_matrix(m, n, dist, 4100 + i as u64).unwrap();
        for pr in grid_pairs() {
            let direct = operator_norm(&a, &pr, &NormOptions::default()).unwrap();
            let dual = norm_via_duality(&a, &pr, &NormOptions::default()).unwrap();
            let denom = direct.value.max(dual.value).max(1e-300);
            worst = worst.max((direct.value - dual.value).abs() / denom);
        }
    }
    let pass = worst <= 1e-6;
    report(
        "4 (duality identity)",
        pass,
        &format!("worst relative difference {worst:.2e}"),
    );
}

#[test]
fn criterion_5_theorem1_constant_one() {
    let report_data = shared_suite_report();
    let t1_fails = report_data
        .records
        .iter()
        .filter(|r| matches!(r.theorem, Theorem::T1Rows | Theorem::T1Cols) && !r.pass)
        .count();
    let t1_count = report_data
        .records
        .iter()
        .filter(|r| matches!(r.theorem, Theorem::T1Rows | Theorem::T1Cols))
        .count();

    // tightness: identity family achieves ratio exactly 1
    let mut tight = true;
    for n in 2..=10 {
        let id = PositiveMatrix::identity(n).unwrap();
        for pr in grid_pairs() {
            let est = operator_norm(&id, &pr, &NormOptions::default()).unwrap();
            let [rows, cols] = check_theorem1(&id, &pr, &est, 1e-9, "identity").unwrap();
            tight &= rows.ratio == 1.0 && cols.ratio == 1.0;
        }
    }

    let pass = t1_fails == 0 && t1_count > 0 && tight;
    report(
        "5 (theorem 1, M = 1)",
        pass,
        &format!("{t1_count} records, {t1_fails} violations, identity tight: {tight}"),
    );
}

#[test]
fn criterion_6_theorem2_improved() {
    let report_data = shared_suite_report();
    let improved_small_r: Vec<_> = report_data
        .records
        .iter()
        .filter(|r| r.theorem == Theorem::T2Improved && r.r < Exponent::TWO)
        .collect();
    let improved_fails = improved_small_r.iter().filter(|r| !r.pass).count();
    let t2ii_fails = report_data
        .records
        .iter()
        .filter(|r| r.theorem == Theorem::T2Ii && !r.pass)
        .count();
    let dominance: Vec<_> = report_data
        .records
        .iter()
        .filter(|r| r.theorem == Theorem::Dominance)
        .collect();
    let dominance_fails = dominance.iter().filter(|r| !r.pass).count();

    let pass = !improved_small_r.is_empty()
        && improved_fails == 0
        && t2ii_fails == 0
        && !dominance.is_empty()
        && dominance_fails == 0;
    report(
        "6 (theorem 2 improved)",
        pass,
        &format!(
            "{} improved records with r < 2 ({improved_fails} violations), \
             {} dominance records ({dominance_fails} violations), T2-ii violations: {t2ii_fails}",
            improved_small_r.len(),
            dominance.len()
        ),
    );
}

#[test]
fn criterion_7_factorization_tightness() {
    let start = Instant::now();
    let pairs = [pair("2", "1"), pair("3", "3/2"), pair("4", "2")];
    let mut within_budget = 0;
    let mut total = 0;
    let mut sound = true;
    let mut rng = ChaCha8Rng::seed_from_u64(7007);
    for i in 0..30 {
        let a = random_positive_matrix(5, 5, MatrixDistribution::Uniform, 7000 + i).unwrap();
        for pr in &pairs {
            let est = operator_norm(&a, pr, &NormOptions::default()).unwrap();
            let fact = optimize(&a, pr, &FactorizeOptions::default()).unwrap();
            total += 1;
            if fact.gap <= 1e-2 {
                within_budget += 1;
            }
            sound &= fact.objective >= est.lower - 1e-9;
            for _ in 0..100 {
                let d: Vec<f64> = (0..5)
                    .map(|_| {
                        let z: f64 = rng.sample(StandardNormal);
                        z.exp()
                    })
                    .collect();
                let obj = objective(&a, &d, pr, &NormOptions::default()).unwrap();
                sound &= obj >= est.lower - 1e-9;
            }
        }
    }
    let elapsed = start.elapsed();
    let fraction = within_budget as f64 / total as f64;
    let pass = fraction >= 0.9 && sound && elapsed < Duration::from_secs(120);
    report(
        "7 (factorization tightness)",
        pass,
        &format!(
            "gap <= 1e-2 on {within_budget}/{total} instances, soundness: {sound}, runtime {elapsed:.1?}"
        ),
    );
}

#[test]
fn criterion_8_monotonicity_contracts() {
    let mut rng = ChaCha8Rng::seed_from_u64(8008);
    let iterative: Vec<ExponentPair> = grid_pairs()
        .into_iter()
        .filter(|pr| pr.p.is_finite())
        .collect();

    let mut power_ok = true;
    for i in 0..200 {
        let m = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=6);
        let a = random_positive_matrix(m, n, MatrixDistribution::Uniform, 8100 + i).unwrap();
        let pr = iterative[i as usize % iterative.len()];
        let x0: Vec<f64> = (0..n).map(|_| 0.1 + rng.gen::<f64>()).collect();
        let (_, history) = power_iteration_logged(&a, &pr, &x0, 1e-10, 10_000).unwrap();
        for w in history.windows(2) {
            power_ok &= w[1] >= w[0] * (1.0 - 1e-12);
        }
    }

    let mut optimize_ok = true;
    for i in 0..50 {
        let m = 2 + (i as usize % 4);
        let a = random_positive_matrix(m, m, MatrixDistribution::Uniform, 8500 + i).unwrap();
        let pr = iterative[i as usize % iterative.len()];
        let (_, log) = optimize_logged(&a, &pr, &FactorizeOptions::default()).unwrap();
        for w in log.windows(2) {
            optimize_ok &= w[1] <= w[0] * (1.0 + 1e-12);
        }
    }

    let pass = power_ok && optimize_ok;
    report(
        "8 (monotonicity contracts)",
        pass,
        &format!("power nondecreasing: {power_ok}, optimizer nonincreasing: {optimize_ok}"),
    );
}
