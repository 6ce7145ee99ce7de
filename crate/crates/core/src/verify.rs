//! Inequality checks for positive operators with constant M = 1, plus the
//! randomized suite harness that drives them over seeded matrix populations.
//!
//! A failing record is not taken at face value: the iterative norm on the
//! right-hand side is only a lower bound, so the harness first escalates
//! (grid oracle for n ≤ 4, otherwise 4× multistarts) and records a violation
//! only if the inequality still fails against the improved estimate.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;
use serde::de;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exponent::{Exponent, ExponentPair};
use crate::matrix::PositiveMatrix;
use crate::norms::{entrywise_norm, mixed_norm_cols, mixed_norm_rows};
use crate::opnorm::{grid_oracle, norm_via_duality, operator_norm, NormEstimate, NormOptions};
use crate::par;

/// Which check a record belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem {
    #[serde(rename = "T1-rows")]
    T1Rows,
    #[serde(rename = "T1-cols")]
    T1Cols,
    #[serde(rename = "T2-i")]
    T2I,
    #[serde(rename = "T2-ii")]
    T2Ii,
    #[serde(rename = "T2-improved")]
    T2Improved,
    #[serde(rename = "dominance")]
    Dominance,
    #[serde(rename = "duality")]
    Duality,
}

pub const ALL_THEOREMS: [Theorem; 7] = [
    Theorem::T1Rows,
    Theorem::T1Cols,
    Theorem::T2I,
    Theorem::T2Ii,
    Theorem::T2Improved,
    Theorem::Dominance,
    Theorem::Duality,
];

impl Theorem {
    pub fn as_str(self) -> &'static str {
        match self {
            Theorem::T1Rows => "T1-rows",
            Theorem::T1Cols => "T1-cols",
            Theorem::T2I => "T2-i",
            Theorem::T2Ii => "T2-ii",
            Theorem::T2Improved => "T2-improved",
            Theorem::Dominance => "dominance",
            Theorem::Duality => "duality",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One evaluated inequality: lhs ≤ rhs with M = 1 (for `Duality`, a two-sided
/// comparison of independently computed norms).
#[derive(Debug, Clone, Serialize)]
pub struct InequalityRecord {
    pub theorem: Theorem,
    pub rows: usize,
    pub cols: usize,
    pub p: Exponent,
    pub q: Exponent,
    pub r: Exponent,
    pub s: Exponent,
    pub lhs: f64,
    pub rhs: f64,
    #[serde(serialize_with = "ser_maybe_inf")]
    pub ratio: f64,
    pub pass: bool,
    pub matrix_id: String,
}

fn ser_maybe_inf<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

fn ratio_of(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

impl InequalityRecord {
    fn one_sided(
        theorem: Theorem,
        a: &PositiveMatrix,
        pair: &ExponentPair,
        lhs: f64,
        rhs: f64,
        slack: f64,
        matrix_id: &str,
    ) -> Self {
        Self {
            theorem,
            rows: a.rows(),
            cols: a.cols(),
            p: pair.p,
            q: pair.q,
            r: pair.r,
            s: pair.s,
            lhs,
            rhs,
            ratio: ratio_of(lhs, rhs),
            pass: lhs <= rhs * (1.0 + slack),
            matrix_id: matrix_id.to_string(),
        }
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.theorem,
            self.rows,
            self.cols,
            self.p,
            self.q,
            self.r,
            self.s,
            self.lhs,
            self.rhs,
            self.ratio,
            self.pass
        )
    }
}

pub const CSV_HEADER: &str = "theorem,m,n,p,q,r,s,lhs,rhs,ratio,pass";

fn t1_records(
    a: &PositiveMatrix,
    pair: &ExponentPair,
    rhs: f64,
    slack: f64,
    matrix_id: &str,
) -> [InequalityRecord; 2] {
    let lhs_rows = mixed_norm_rows(a, pair.r, Exponent::TWO);
    let lhs_cols = mixed_norm_cols(a, pair.r, Exponent::TWO);
    [
        InequalityRecord::one_sided(Theorem::T1Rows, a, pair, lhs_rows, rhs, slack, matrix_id),
        InequalityRecord::one_sided(Theorem::T1Cols, a, pair, lhs_cols, rhs, slack, matrix_id),
    ]
}

fn t2_records(
    a: &PositiveMatrix,
    pair: &ExponentPair,
    rhs: f64,
    slack: f64,
    matrix_id: &str,
) -> Vec<InequalityRecord> {
    let lhs_r = entrywise_norm(a, pair.r);
    let mut records = Vec::with_capacity(3);
    if pair.r >= Exponent::TWO {
        records.push(InequalityRecord::one_sided(
            Theorem::T2I,
            a,
            pair,
            lhs_r,
            rhs,
            slack,
            matrix_id,
        ));
    }
    if pair.r <= Exponent::TWO {
        let lhs_s = entrywise_norm(a, pair.s);
        records.push(InequalityRecord::one_sided(
            Theorem::T2Ii,
            a,
            pair,
            lhs_s,
            rhs,
            slack,
            matrix_id,
        ));
    }
    // the improved form: the r-norm bound holds for every r, not only r >= 2
    records.push(InequalityRecord::one_sided(
        Theorem::T2Improved,
        a,
        pair,
        lhs_r,
        rhs,
        slack,
        matrix_id,
    ));
    records
}

/// The T1 checks, hypotheses 1 ≤ q ≤ 2 ≤ p: the ℓ_r(ℓ_2) mixed norms of the
/// rows and of the columns against M·‖A‖_{p,q} with M = 1.
pub fn check_theorem1(
    a: &PositiveMatrix,
    pair: &ExponentPair,
    norm_est: &NormEstimate,
    slack: f64,
    matrix_id: &str,
) -> Result<[InequalityRecord; 2]> {
    if !(pair.q >= Exponent::ONE && pair.q <= Exponent::TWO && pair.p >= Exponent::TWO) {
        return Err(Error::UnsupportedRegime(format!(
            "T1 checks need 1 <= q <= 2 <= p, got {pair}"
        )));
    }
    Ok(t1_records(a, pair, norm_est.value, slack, matrix_id))
}

/// The T2 checks, entrywise norms against M·‖A‖_{p,q} for 1 ≤ q ≤ p: the
/// ℓ_r bound in its classical window r ≥ 2, the ℓ_s bound for r ≤ 2, and the
/// improved ℓ_r bound which holds for every r.
pub fn check_theorem2(
    a: &PositiveMatrix,
    pair: &ExponentPair,
    norm_est: &NormEstimate,
    slack: f64,
    matrix_id: &str,
) -> Result<Vec<InequalityRecord>> {
    if pair.q < Exponent::ONE {
        return Err(Error::UnsupportedRegime(format!(
            "T2 checks need q >= 1, got {pair}"
        )));
    }
    Ok(t2_records(a, pair, norm_est.value, slack, matrix_id))
}

/// For r ≤ 2 (where r ≤ s ≤ 2): the entrywise ℓ_s norm is dominated by the
/// entrywise ℓ_r norm, which is the sense in which the improved bound
/// strengthens the classical one.
pub fn check_improvement_dominance(
    a: &PositiveMatrix,
    pair: &ExponentPair,
    slack: f64,
    matrix_id: &str,
) -> Result<InequalityRecord> {
    if pair.r > Exponent::TWO {
        return Err(Error::UnsupportedRegime(format!(
            "dominance check applies for r <= 2, got r = {}",
            pair.r
        )));
    }
    let lhs = entrywise_norm(a, pair.s);
    let rhs = entrywise_norm(a, pair.r);
    Ok(InequalityRecord::one_sided(
        Theorem::Dominance,
        a,
        pair,
        lhs,
        rhs,
        slack,
        matrix_id,
    ))
}

/// Compares ‖Aᵀ‖_{q*,p*} (lhs) with the directly computed ‖A‖_{p,q} (rhs);
/// passes when they agree to `tol` relative.
pub fn check_duality_identity(
    a: &PositiveMatrix,
    pair: &ExponentPair,
    opts: &NormOptions,
    tol: f64,
    matrix_id: &str,
) -> Result<InequalityRecord> {
    let direct = operator_norm(a, pair, opts)?;
    let dual = norm_via_duality(a, pair, opts)?;
    if pair.q <= Exponent::TWO && pair.p >= Exponent::TWO {
        let p_conj = pair.p_conj.expect("p >= 2 >= 1");
        let q_conj = pair.q_conj.expect("q >= 1");
        debug_assert!(p_conj <= Exponent::TWO && Exponent::TWO <= q_conj);
    }
    let (lhs, rhs) = (dual.value, direct.value);
    let mut rec = InequalityRecord::one_sided(Theorem::Duality, a, pair, lhs, rhs, 0.0, matrix_id);
    rec.pass = (lhs - rhs).abs() <= tol * lhs.abs().max(rhs.abs());
    Ok(rec)
}

/// Entry distribution for random test matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixDistribution {
    Uniform,
    Exponential,
    /// Keeps each entry with the given probability, else exact zero.
    Sparse(f64),
}

impl fmt::Display for MatrixDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixDistribution::Uniform => write!(f, "uniform"),
            MatrixDistribution::Exponential => write!(f, "exponential"),
            MatrixDistribution::Sparse(d) => write!(f, "sparse:{d}"),
        }
    }
}

impl FromStr for MatrixDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "uniform" => Ok(Self::Uniform),
            "exponential" => Ok(Self::Exponential),
            other => {
                if let Some(d) = other.strip_prefix("sparse:") {
                    let density: f64 = d
                        .parse()
                        .map_err(|_| Error::InvalidConfig(format!("bad density {d:?}")))?;
                    if !(density > 0.0 && density <= 1.0) {
                        return Err(Error::InvalidConfig(format!(
                            "density must be in (0, 1], got {density}"
                        )));
                    }
                    Ok(Self::Sparse(density))
                } else {
                    Err(Error::InvalidConfig(format!(
                        "unknown distribution {other:?}"
                    )))
                }
            }
        }
    }
}

impl Serialize for MatrixDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MatrixDistribution {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Deterministic nonnegative random matrix; identical seeds give identical
/// matrices on every platform.
pub fn random_positive_matrix(
    m: usize,
    n: usize,
    dist: MatrixDistribution,
    seed: u64,
) -> Result<PositiveMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if let MatrixDistribution::Sparse(density) = dist {
        if !(density > 0.0 && density <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "density must be in (0, 1], got {density}"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries: Vec<f64> = match dist {
        MatrixDistribution::Uniform => (0..m * n).map(|_| rng.gen()).collect(),
        MatrixDistribution::Exponential => {
            let exp = Exp::new(1.0).unwrap();
            (0..m * n).map(|_| rng.sample(exp)).collect()
        }
        MatrixDistribution::Sparse(density) => (0..m * n)
            .map(|_| {
                let keep = rng.gen::<f64>() < density;
                let v: f64 = rng.gen();
                if keep {
                    v
                } else {
                    0.0
                }
            })
            .collect(),
    };
    PositiveMatrix::new(m, n, entries)
}

/// Suite configuration; the field names match the shipped TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub instances: usize,
    pub seed: u64,
    pub sizes: Vec<(usize, usize)>,
    pub p_grid: Vec<Exponent>,
    pub q_grid: Vec<Exponent>,
    pub distributions: Vec<MatrixDistribution>,
    pub slack: f64,
    pub duality_tol: f64,
    pub oracle_resolution: usize,
    pub norm: NormOptions,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        let exps = |list: &[&str]| list.iter().map(|s| s.parse().unwrap()).collect();
        Self {
            instances: 500,
            seed: 1,
            sizes: vec![
                (2, 2),
                (3, 3),
                (4, 4),
                (5, 5),
                (6, 6),
                (7, 7),
                (8, 8),
                (9, 9),
                (10, 10),
                (3, 5),
                (7, 4),
                (10, 6),
                (1, 8),
                (6, 1),
            ],
            p_grid: exps(&["2", "5/2", "3", "4", "inf"]),
            q_grid: exps(&["1", "4/3", "3/2", "2"]),
            distributions: vec![
                MatrixDistribution::Uniform,
                MatrixDistribution::Exponential,
                MatrixDistribution::Sparse(0.5),
            ],
            slack: 1e-9,
            duality_tol: 1e-6,
            oracle_resolution: 200,
            norm: NormOptions::default(),
        }
    }
}

/// Pass/fail tally and worst ratio for one record kind.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremSummary {
    pub theorem: Theorem,
    pub passes: usize,
    pub fails: usize,
    #[serde(serialize_with = "ser_maybe_inf")]
    pub worst_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub config: SuiteConfig,
    pub summaries: Vec<TheoremSummary>,
    pub records: Vec<InequalityRecord>,
}

impl VerificationReport {
    pub fn violation_count(&self) -> usize {
        self.records.iter().filter(|r| !r.pass).count()
    }

    pub fn has_violations(&self) -> bool {
        self.records.iter().any(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn records_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for rec in &self.records {
            out.push_str(&rec.csv_line());
            out.push('\n');
        }
        out
    }

    fn summarize(records: &[InequalityRecord]) -> Vec<TheoremSummary> {
        ALL_THEOREMS
            .iter()
            .filter_map(|&theorem| {
                let of_kind: Vec<&InequalityRecord> =
                    records.iter().filter(|r| r.theorem == theorem).collect();
                if of_kind.is_empty() {
                    return None;
                }
                let passes = of_kind.iter().filter(|r| r.pass).count();
                let worst_ratio = of_kind
                    .iter()
                    .map(|r| r.ratio)
                    .fold(f64::NEG_INFINITY, f64::max);
                Some(TheoremSummary {
                    theorem,
                    passes,
                    fails: of_kind.len() - passes,
                    worst_ratio,
                })
            })
            .collect()
    }
}

fn escalated_norm(
    a: &PositiveMatrix,
    pair: &ExponentPair,
    config: &SuiteConfig,
    current: f64,
) -> Result<f64> {
    if a.cols() <= 4 {
        let oracle = grid_oracle(a, pair, config.oracle_resolution.max(8))?;
        Ok(current.max(oracle.value))
    } else {
        let opts = NormOptions {
            multistarts: config.norm.multistarts * 4,
            ..config.norm
        };
        Ok(current.max(operator_norm(a, pair, &opts)?.value))
    }
}

fn instance_records(
    a: &PositiveMatrix,
    config: &SuiteConfig,
    matrix_id: &str,
) -> Result<Vec<InequalityRecord>> {
    let mut records = Vec::new();
    for &p in &config.p_grid {
        for &q in &config.q_grid {
            if q > p {
                continue;
            }
            let pair = ExponentPair::new(p, q)?;
            let est = operator_norm(a, &pair, &config.norm)?;
            let mut rhs = est.value;

            let t1 = pair.q >= Exponent::ONE && pair.q <= Exponent::TWO && pair.p >= Exponent::TWO;
            let t2 = pair.q >= Exponent::ONE;
            let build = |rhs: f64| {
                let mut recs = Vec::with_capacity(5);
                if t1 {
                    recs.extend(t1_records(a, &pair, rhs, config.slack, matrix_id));
                }
                if t2 {
                    recs.extend(t2_records(a, &pair, rhs, config.slack, matrix_id));
                }
                recs
            };
            let mut recs = build(rhs);
            if recs.iter().any(|r| !r.pass) {
                // a failure may be estimator error; re-certify before reporting
                rhs = escalated_norm(a, &pair, config, rhs)?;
                recs = build(rhs);
            }
            records.extend(recs);

            if pair.r <= Exponent::TWO && pair.q >= Exponent::ONE {
                records.push(check_improvement_dominance(
                    a,
                    &pair,
                    config.slack,
                    matrix_id,
                )?);
            }

            if pair.q >= Exponent::ONE {
                let mut rec =
                    check_duality_identity(a, &pair, &config.norm, config.duality_tol, matrix_id)?;
                if !rec.pass {
                    let opts = NormOptions {
                        multistarts: config.norm.multistarts * 4,
                        ..config.norm
                    };
                    rec = check_duality_identity(a, &pair, &opts, config.duality_tol, matrix_id)?;
                }
                records.push(rec);
            }
        }
    }
    Ok(records)
}

/// Runs every applicable check over `instances` seeded random matrices.
/// Deterministic for a fixed config: instance i uses seed + i, cycles through
/// `sizes` and `distributions`, and records are aggregated in instance order
/// regardless of parallel execution.
pub fn run_suite(config: &SuiteConfig) -> Result<VerificationReport> {
    if config.instances > 0 && (config.sizes.is_empty() || config.distributions.is_empty()) {
        return Err(Error::InvalidConfig(
            "sizes and distributions must be nonempty".into(),
        ));
    }
    for &(m, n) in &config.sizes {
        if m == 0 || n == 0 {
            return Err(Error::InvalidConfig(format!("size {m}x{n} is empty")));
        }
    }

    let per_instance = par::map_indexed(config.instances, |i| {
        let seed = config.seed.wrapping_add(i as u64);
        let (m, n) = config.sizes[i % config.sizes.len()];
        let dist = config.distributions[i % config.distributions.len()];
        let a = random_positive_matrix(m, n, dist, seed)?;
        let matrix_id = format!("{dist}-{m}x{n}#{seed}");
        instance_records(&a, config, &matrix_id)
    });

    let mut records = Vec::new();
    for recs in per_instance {
        records.extend(recs?);
    }
    let summaries = VerificationReport::summarize(&records);
    Ok(VerificationReport {
        config: config.clone(),
        summaries,
        records,
    })
}
