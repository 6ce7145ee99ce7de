//! Diagonal factorizations A = D·B with D = diag(d) and the minimization of
//! the objective ‖d‖_r·‖B‖_{p,p} over positive diagonals.
//!
//! Any positive d yields a valid factorization (b_{j,k} = a_{j,k}/d_j), so
//! every objective value is an upper bound on ‖A‖_{p,q}; the optimizer drives
//! the gap toward zero. It works in log coordinates u = log d, where the
//! objective is a sum of log-sum-exp-type terms, with derivative-free
//! coordinate descent, a backtracking step, and randomized restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::exponent::{Exponent, ExponentPair};
use crate::matrix::PositiveMatrix;
use crate::norms::vector_norm;
use crate::opnorm::{exact_norm, operator_norm, power_iteration, NormEstimate, NormOptions};
use crate::par;

/// A concrete factorization A = diag(d)·B with its objective and the
/// realized gap against the independently estimated norm of A.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub d: Vec<f64>,
    pub b: PositiveMatrix,
    pub objective: f64,
    pub pair: ExponentPair,
    pub gap: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct FactorizeOptions {
    /// Relative objective improvement below which a sweep counts as stalled.
    pub tol: f64,
    /// Cap on coordinate-descent sweeps per run.
    pub max_iter: usize,
    /// Randomized restarts in addition to the seeded run.
    pub restarts: usize,
    /// Options for the inner and final norm computations.
    pub norm_opts: NormOptions,
    /// Seed for restart perturbations.
    pub seed: u64,
}

impl Default for FactorizeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 400,
            restarts: 2,
            norm_opts: NormOptions::default(),
            seed: 0,
        }
    }
}

fn validate_diagonal(a: &PositiveMatrix, d: &[f64]) -> Result<()> {
    if d.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: d.len(),
        });
    }
    for (j, &v) in d.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::BadEntry {
                row: j + 1,
                col: j + 1,
                value: v,
            });
        }
        if v == 0.0 && a.row(j).iter().any(|&x| x != 0.0) {
            return Err(Error::ZeroDiagonalEntry { row: j });
        }
    }
    Ok(())
}

/// b_{j,k} = a_{j,k}/d_j; zero rows stay zero regardless of d_j.
fn scaled_rows(a: &PositiveMatrix, d: &[f64]) -> Result<PositiveMatrix> {
    validate_diagonal(a, d)?;
    let mut entries = Vec::with_capacity(a.rows() * a.cols());
    for (j, row) in a.row_iter().enumerate() {
        if d[j] == 0.0 {
            entries.resize(entries.len() + a.cols(), 0.0);
        } else {
            entries.extend(row.iter().map(|&v| v / d[j]));
        }
    }
    PositiveMatrix::new(a.rows(), a.cols(), entries)
}

/// ‖d‖_r · ‖B‖_{p,p} for the factorization induced by d.
pub fn objective(
    a: &PositiveMatrix,
    d: &[f64],
    pair: &ExponentPair,
    opts: &NormOptions,
) -> Result<f64> {
    let b = scaled_rows(a, d)?;
    let pp = ExponentPair::new(pair.p, pair.p)?;
    Ok(vector_norm(d, pair.r) * operator_norm(&b, &pp, opts)?.value)
}

/// Seed diagonal d_j = ‖row_j‖_{p*} (p > 1), else the row sup. This scales B
/// so that ‖B‖_{p,∞} = 1; zero rows get d_j = 0.
pub fn default_seed_d(a: &PositiveMatrix, pair: &ExponentPair) -> Vec<f64> {
    let inner = if pair.p > Exponent::ONE {
        pair.p.conjugate().expect("p > 1 has a conjugate")
    } else {
        Exponent::INFINITY
    };
    a.row_iter().map(|row| vector_norm(row, inner)).collect()
}

/// Warm-started evaluator for ‖B‖_{p,p}; closed forms bypass the iteration.
struct InnerNorm {
    pp: ExponentPair,
    warm: Vec<f64>,
    tol: f64,
    max_iter: usize,
}

impl InnerNorm {
    fn new(pair: &ExponentPair, cols: usize, opts: &FactorizeOptions) -> Result<Self> {
        Ok(Self {
            pp: ExponentPair::new(pair.p, pair.p)?,
            warm: vec![1.0; cols],
            tol: opts.norm_opts.tol,
            max_iter: opts.norm_opts.max_iter,
        })
    }

    fn eval(&mut self, b: &PositiveMatrix) -> Result<f64> {
        if let Some(est) = exact_norm(b, &self.pp) {
            return Ok(est.value);
        }
        let x0: Vec<f64> = self.warm.iter().map(|&v| v.max(1e-12)).collect();
        let est = power_iteration(b, &self.pp, &x0, self.tol, self.max_iter)?;
        self.warm = est.witness.clone();
        Ok(est.value)
    }
}

struct RunOutcome {
    d: Vec<f64>,
    objective: f64,
    log: Vec<f64>,
    sweeps: usize,
}

fn run_descent(
    a: &PositiveMatrix,
    pair: &ExponentPair,
    d0: &[f64],
    opts: &FactorizeOptions,
) -> Result<RunOutcome> {
    let active: Vec<usize> = (0..a.rows())
        .filter(|&j| a.row(j).iter().any(|&v| v != 0.0))
        .collect();
    let mut d: Vec<f64> = d0.to_vec();
    for (j, v) in d.iter_mut().enumerate() {
        if !active.contains(&j) {
            *v = 0.0;
        }
    }
    let mut u: Vec<f64> = active.iter().map(|&j| d[j].ln()).collect();

    let mut inner = InnerNorm::new(pair, a.cols(), opts)?;
    let r = pair.r;
    let eval = |d: &[f64], inner: &mut InnerNorm| -> Result<f64> {
        Ok(vector_norm(d, r) * inner.eval(&scaled_rows(a, d)?)?)
    };

    let mut h = eval(&d, &mut inner)?;
    let mut log = vec![h];
    let mut step = 0.5;
    let mut sweeps = 0;

    while sweeps < opts.max_iter {
        sweeps += 1;
        let h_before = h;
        let mut improved = false;
        for (i, &j) in active.iter().enumerate() {
            let mut best: Option<(f64, f64)> = None;
            for dir in [1.0, -1.0] {
                let trial_u = u[i] + dir * step;
                let saved = d[j];
                d[j] = trial_u.exp();
                let obj = eval(&d, &mut inner)?;
                d[j] = saved;
                if obj < h * (1.0 - 1e-12) && best.is_none_or(|(b, _)| obj < b) {
                    best = Some((obj, trial_u));
                }
            }
            if let Some((obj, new_u)) = best {
                u[i] = new_u;
                d[j] = new_u.exp();
                h = obj;
                log.push(obj);
                improved = true;
            }
        }
        if improved && (h_before - h) > opts.tol * h_before {
            step = (step * 2.0).min(1.0);
        } else {
            step *= 0.5;
            if step < 1e-7 {
                break;
            }
        }
    }

    Ok(RunOutcome {
        d,
        objective: h,
        log,
        sweeps,
    })
}

fn finalize(
    a: &PositiveMatrix,
    pair: &ExponentPair,
    mut d: Vec<f64>,
    sweeps: usize,
    opts: &FactorizeOptions,
) -> Result<Factorization> {
    let pp = ExponentPair::new(pair.p, pair.p)?;
    let norm_a = operator_norm(a, pair, &opts.norm_opts)?.value;

    let b = scaled_rows(a, &d)?;
    let norm_b = operator_norm(&b, &pp, &opts.norm_opts)?.value;
    let dn = vector_norm(&d, pair.r);
    if dn > 0.0 && norm_b > 0.0 {
        // balanced gauge: ||d||_r == ||B||_{p,p}
        let c = (norm_b / dn).sqrt();
        d.iter_mut().for_each(|v| *v *= c);
    }
    let b = scaled_rows(a, &d)?;
    let objective = vector_norm(&d, pair.r) * operator_norm(&b, &pp, &opts.norm_opts)?.value;
    let gap = if norm_a > 0.0 {
        (objective - norm_a) / norm_a
    } else {
        0.0
    };
    Ok(Factorization {
        d,
        b,
        objective,
        pair: *pair,
        gap,
        iterations: sweeps,
    })
}

/// Minimizes ‖d‖_r·‖B‖_{p,p} from the default seed, best over
/// `1 + opts.restarts` runs (restart t perturbs the seed log-normally with
/// seed + t). The result is gauge-balanced and its gap is measured against an
/// independent multistart estimate of ‖A‖_{p,q}.
pub fn optimize(
    a: &PositiveMatrix,
    pair: &ExponentPair,
    opts: &FactorizeOptions,
) -> Result<Factorization> {
    optimize_logged(a, pair, opts).map(|(f, _)| f)
}

/// Same as [`optimize`] but also returns the accepted-objective log of the
/// winning run, which is nonincreasing by construction.
pub fn optimize_logged(
    a: &PositiveMatrix,
    pair: &ExponentPair,
    opts: &FactorizeOptions,
) -> Result<(Factorization, Vec<f64>)> {
    if a.is_zero() {
        return Err(Error::AllZeroMatrix);
    }
    if pair.p < Exponent::ONE {
        return Err(Error::UnsupportedRegime(format!(
            "factorization objective requires p >= 1, got p = {}",
            pair.p
        )));
    }
    let seed_d = default_seed_d(a, pair);
    let runs = 1 + opts.restarts;
    let outcomes = par::map_indexed(runs, |t| {
        let mut d0 = seed_d.clone();
        if t > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(t as u64));
            for v in d0.iter_mut() {
                if *v > 0.0 {
                    let z: f64 = rng.sample(StandardNormal);
                    *v *= (0.3 * z).exp();
                }
            }
        }
        run_descent(a, pair, &d0, opts)
    });

    let mut best: Option<RunOutcome> = None;
    for outcome in outcomes {
        let run = outcome?;
        match &best {
            Some(b) if run.objective >= b.objective => {}
            _ => best = Some(run),
        }
    }
    let best = best.expect("at least one run");
    let fact = finalize(a, pair, best.d, best.sweeps, opts)?;
    Ok((fact, best.log))
}

/// Runs a single descent from a caller-supplied diagonal instead of the
/// default seed (no restarts).
pub fn optimize_from(
    a: &PositiveMatrix,
    pair: &ExponentPair,
    d0: &[f64],
    opts: &FactorizeOptions,
) -> Result<Factorization> {
    if a.is_zero() {
        return Err(Error::AllZeroMatrix);
    }
    validate_diagonal(a, d0)?;
    let run = run_descent(a, pair, d0, opts)?;
    finalize(a, pair, run.d, run.sweeps, opts)
}

/// One verification finding; indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub enum FactorizationViolation {
    Reconstruction {
        row: usize,
        col: usize,
        expected: f64,
        got: f64,
    },
    NegativeDiagonal {
        row: usize,
        value: f64,
    },
    NonFiniteDiagonal {
        row: usize,
        value: f64,
    },
    ObjectiveBelowNorm {
        objective: f64,
        lower: f64,
    },
}

#[derive(Debug, Clone)]
pub struct FactorizationCheck {
    pub violations: Vec<FactorizationViolation>,
    pub objective: f64,
    pub gap: f64,
}

impl FactorizationCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a claimed factorization of `a`: entrywise reconstruction
/// a_{j,k} = d_j·b_{j,k} (1e-12 relative), diagonal nonnegativity and
/// finiteness, and the upper-bound direction
/// objective ≥ norm_est.lower − 1e-9. Failures are collected, never raised;
/// only a shape mismatch is an error.
pub fn verify_factorization(
    a: &PositiveMatrix,
    f: &Factorization,
    norm_est: &NormEstimate,
) -> Result<FactorizationCheck> {
    if f.b.rows() != a.rows() || f.b.cols() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.rows() * a.cols(),
            got: f.b.rows() * f.b.cols(),
        });
    }
    if f.d.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: f.d.len(),
        });
    }

    let mut violations = Vec::new();
    for (j, &dj) in f.d.iter().enumerate() {
        if !dj.is_finite() {
            violations.push(FactorizationViolation::NonFiniteDiagonal { row: j, value: dj });
        } else if dj < 0.0 {
            violations.push(FactorizationViolation::NegativeDiagonal { row: j, value: dj });
        }
    }
    for j in 0..a.rows() {
        for k in 0..a.cols() {
            let expected = a.get(j, k);
            let got = f.d[j] * f.b.get(j, k);
            let scale = expected.abs().max(got.abs());
            if (expected - got).abs() > 1e-12 * scale {
                violations.push(FactorizationViolation::Reconstruction {
                    row: j,
                    col: k,
                    expected,
                    got,
                });
            }
        }
    }

    let pp = ExponentPair::new(f.pair.p, f.pair.p)?;
    let objective =
        vector_norm(&f.d, f.pair.r) * operator_norm(&f.b, &pp, &NormOptions::default())?.value;
    if objective < norm_est.lower - 1e-9 {
        violations.push(FactorizationViolation::ObjectiveBelowNorm {
            objective,
            lower: norm_est.lower,
        });
    }
    let gap = if norm_est.value > 0.0 {
        (objective - norm_est.value) / norm_est.value
    } else {
        0.0
    };
    Ok(FactorizationCheck {
        violations,
        objective,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn exp(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    fn pair(p: &str, q: &str) -> ExponentPair {
        ExponentPair::new(exp(p), exp(q)).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn random_matrix(m: usize, n: usize, seed: u64) -> PositiveMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries: Vec<f64> = (0..m * n).map(|_| rng.gen::<f64>()).collect();
        PositiveMatrix::new(m, n, entries).unwrap()
    }

    #[test]
    fn objective_diagonal_example() {
        let a = PositiveMatrix::diagonal(&[1.0, 2.0]).unwrap();
        let obj = objective(&a, &[1.0, 2.0], &pair("4", "2"), &NormOptions::default()).unwrap();
        assert!(rel(obj, 17f64.powf(0.25)) <= 1e-15);
    }

    #[test]
    fn objective_validates_diagonal() {
        let a = PositiveMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let pr = pair("2", "1");
        assert!(matches!(
            objective(&a, &[0.0, 1.0], &pr, &NormOptions::default()),
            Err(Error::ZeroDiagonalEntry { row: 0 })
        ));
        assert!(objective(&a, &[1.0], &pr, &NormOptions::default()).is_err());
        assert!(objective(&a, &[-1.0, 1.0], &pr, &NormOptions::default()).is_err());
        // zero diagonal on the zero row is fine
        assert!(objective(&a, &[1.0, 0.0], &pr, &NormOptions::default()).is_ok());
    }

    #[test]
    fn objective_rank_one_closed_form_is_tight() {
        // d_j = u_j^{q/r} reaches ||u||_q * ||v||_{p*} exactly
        let (u, v) = (vec![1.0, 1.0], vec![1.0, 1.0]);
        let a = PositiveMatrix::rank_one(&u, &v).unwrap();
        let pr = pair("2", "1");
        let obj = objective(&a, &[1.0, 1.0], &pr, &NormOptions::default()).unwrap();
        assert!(rel(obj, 2.0 * 2f64.sqrt()) <= 1e-12);
    }

    #[test]
    fn objective_gauge_invariant() {
        let diag = PositiveMatrix::diagonal(&[0.5, 2.0, 3.0]).unwrap();
        let rank1 = PositiveMatrix::rank_one(&[1.0, 0.3], &[2.0, 0.7, 0.1]).unwrap();
        let opts = NormOptions::default();
        for (a, d, pr) in [
            (&diag, vec![1.0, 0.7, 2.0], pair("4", "2")),
            (&rank1, vec![0.8, 1.3], pair("5/2", "3/2")),
        ] {
            let base = objective(a, &d, &pr, &opts).unwrap();
            for c in [0.5, 2.0, 3.7, 0.013] {
                let scaled: Vec<f64> = d.iter().map(|&v| c * v).collect();
                let obj = objective(a, &scaled, &pr, &opts).unwrap();
                assert!(rel(obj, base) <= 1e-12, "c = {c}: {obj} vs {base}");
            }
        }
        // iterative inner norm: stopping noise dominates, so 1e-9 here
        let a = random_matrix(3, 3, 21);
        let d = vec![1.0, 0.4, 2.2];
        let pr = pair("5/2", "3/2");
        let base = objective(&a, &d, &pr, &opts).unwrap();
        for c in [0.5, 3.7] {
            let scaled: Vec<f64> = d.iter().map(|&v| c * v).collect();
            let obj = objective(&a, &scaled, &pr, &opts).unwrap();
            assert!(rel(obj, base) <= 1e-9, "c = {c}");
        }
    }

    #[test]
    fn seed_examples() {
        let id = PositiveMatrix::identity(2).unwrap();
        assert_eq!(default_seed_d(&id, &pair("2", "1")), vec![1.0, 1.0]);

        let a = PositiveMatrix::from_rows(&[vec![3.0, 4.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(default_seed_d(&a, &pair("2", "1")), vec![5.0, 0.0]);

        let (u, v) = (vec![0.5, 2.0, 1.25], vec![1.0, 3.0]);
        let a = PositiveMatrix::rank_one(&u, &v).unwrap();
        let d = default_seed_d(&a, &pair("3", "1"));
        let ratio = d[0] / u[0];
        for (dj, uj) in d.iter().zip(&u) {
            assert!(rel(dj / uj, ratio) <= 1e-12);
        }
    }

    #[test]
    fn optimize_diagonal_does_not_move() {
        let a = PositiveMatrix::diagonal(&[1.0, 2.0]).unwrap();
        let (fact, log) =
            optimize_logged(&a, &pair("4", "2"), &FactorizeOptions::default()).unwrap();
        assert_eq!(log.len(), 1, "optimizer moved off the already-optimal seed");
        assert!(fact.gap.abs() <= 1e-12, "gap = {}", fact.gap);
        assert!(rel(fact.objective, 17f64.powf(0.25)) <= 1e-12);
    }

    #[test]
    fn optimize_rank_one_is_tight() {
        let a = PositiveMatrix::rank_one(&[0.9, 0.2, 1.7], &[0.4, 1.1, 0.6, 0.2]).unwrap();
        for (p, q) in [("2", "1"), ("4", "2"), ("3", "3"), ("inf", "3/2")] {
            let fact = optimize(&a, &pair(p, q), &FactorizeOptions::default()).unwrap();
            assert!(fact.gap.abs() <= 1e-6, "({p},{q}): gap = {}", fact.gap);
        }
    }

    #[test]
    fn optimize_random_5x5_seeded() {
        let a = random_matrix(5, 5, 7);
        let fact = optimize(&a, &pair("2", "1"), &FactorizeOptions::default()).unwrap();
        assert!(fact.gap <= 1e-2, "gap = {}", fact.gap);
        assert!(fact.gap >= -1e-9);
    }

    #[test]
    fn trivial_factorization_is_fixed_point_when_p_equals_q() {
        let a = PositiveMatrix::diagonal(&[0.7, 1.9, 1.1]).unwrap();
        let pr = pair("5/2", "5/2");
        let fact = optimize_from(&a, &pr, &[1.0, 1.0, 1.0], &FactorizeOptions::default()).unwrap();
        assert!(fact.gap.abs() <= 1e-12, "gap = {}", fact.gap);
        // d stayed constant: the all-ones diagonal is already optimal
        let ratio = fact.d[1] / fact.d[0];
        assert!(rel(ratio, 1.0) <= 1e-12);

        let b = random_matrix(3, 3, 31);
        let fact = optimize(&b, &pr, &FactorizeOptions::default()).unwrap();
        assert!(fact.gap.abs() <= 1e-6, "gap = {}", fact.gap);
    }

    #[test]
    fn zero_rows_get_zero_diagonal() {
        let a = PositiveMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let pr = pair("2", "1");
        let fact = optimize(&a, &pr, &FactorizeOptions::default()).unwrap();
        assert_eq!(fact.d[1], 0.0);
        assert!(fact.gap.abs() <= 1e-6);
        let est = operator_norm(&a, &pr, &NormOptions::default()).unwrap();
        let check = verify_factorization(&a, &fact, &est).unwrap();
        assert!(check.passed(), "{:?}", check.violations);
    }

    #[test]
    fn optimize_rejects_zero_matrix() {
        let z = PositiveMatrix::zeros(2, 2).unwrap();
        assert!(matches!(
            optimize(&z, &pair("2", "1"), &FactorizeOptions::default()),
            Err(Error::AllZeroMatrix)
        ));
    }

    #[test]
    fn accepted_objectives_never_increase() {
        let a = random_matrix(4, 4, 13);
        let (_, log) =
            optimize_logged(&a, &pair("3", "3/2"), &FactorizeOptions::default()).unwrap();
        for w in log.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn tampered_diagonal_is_reported() {
        let a = random_matrix(3, 3, 17);
        let pr = pair("2", "1");
        let mut fact = optimize(&a, &pr, &FactorizeOptions::default()).unwrap();
        let est = operator_norm(&a, &pr, &NormOptions::default()).unwrap();
        assert!(verify_factorization(&a, &fact, &est).unwrap().passed());

        fact.d[0] *= 0.5;
        let check = verify_factorization(&a, &fact, &est).unwrap();
        assert!(check
            .violations
            .iter()
            .any(|v| matches!(v, FactorizationViolation::Reconstruction { row: 0, .. })));
    }

    #[test]
    fn random_diagonals_stay_above_the_norm() {
        let a = random_matrix(3, 4, 23);
        let pr = pair("2", "1");
        let est = operator_norm(&a, &pr, &NormOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let d: Vec<f64> = (0..3)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    z.exp()
                })
                .collect();
            let obj = objective(&a, &d, &pr, &NormOptions::default()).unwrap();
            assert!(
                obj >= est.lower - 1e-9,
                "objective {obj} below norm {}",
                est.lower
            );
        }
    }
}
