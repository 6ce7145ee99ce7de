//! ℓp vector norms and mixed ℓ_outer(ℓ_inner) matrix norms.

use crate::exponent::Exponent;
use crate::matrix::PositiveMatrix;

/// (Σ |x_k|^p)^{1/p}, with the sup for p = ∞. Quasinorms 0 < p < 1 use the
/// same sum formula. The generic path scales by the max entry so large p and
/// extreme magnitudes stay inside the f64 range.
pub fn vector_norm(x: &[f64], p: Exponent) -> f64 {
    debug_assert!(x.iter().all(|v| v.is_finite()));
    if p.is_infinite() {
        return x.iter().fold(0.0, |m, &v| m.max(v.abs()));
    }
    let pv = p.value();
    if pv == 1.0 {
        return x.iter().map(|v| v.abs()).sum();
    }
    if pv == 2.0 {
        return x.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    let m = x.iter().fold(0.0, |m: f64, &v| m.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = x.iter().map(|&v| (v.abs() / m).powf(pv)).sum();
    m * s.powf(p.inv())
}

/// ℓ_outer norm of the vector of ℓ_inner row norms.
pub fn mixed_norm_rows(a: &PositiveMatrix, outer: Exponent, inner: Exponent) -> f64 {
    let row_norms: Vec<f64> = a.row_iter().map(|row| vector_norm(row, inner)).collect();
    vector_norm(&row_norms, outer)
}

/// Column analogue; identical to `mixed_norm_rows` on the transpose.
pub fn mixed_norm_cols(a: &PositiveMatrix, outer: Exponent, inner: Exponent) -> f64 {
    let col_norms: Vec<f64> = (0..a.cols())
        .map(|k| vector_norm(&a.column(k), inner))
        .collect();
    vector_norm(&col_norms, outer)
}

/// ℓ_p norm of all entries, flattened.
pub fn entrywise_norm(a: &PositiveMatrix, p: Exponent) -> f64 {
    vector_norm(a.entries(), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::ExponentPair;

    fn exp(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    #[test]
    fn pythagorean_triple() {
        let x = [3.0, 4.0];
        assert_eq!(vector_norm(&x, exp("2")), 5.0);
        assert_eq!(vector_norm(&x, exp("inf")), 4.0);
        assert_eq!(vector_norm(&x, exp("1")), 7.0);
    }

    #[test]
    fn zero_vector_and_quasinorm() {
        assert_eq!(vector_norm(&[0.0, 0.0], exp("3")), 0.0);
        // p = 1/2: (sqrt(1) + sqrt(4))^2 = 9
        let q = vector_norm(&[1.0, 4.0], exp("0.5"));
        assert!((q - 9.0).abs() < 1e-12);
    }

    #[test]
    fn homogeneous_and_monotone_in_p() {
        let x = [0.3, 1.7, 0.0, 2.4, 0.9];
        let grid = ["0.5", "1", "4/3", "2", "3", "7", "inf"];
        for w in grid.windows(2) {
            let lo = vector_norm(&x, exp(w[0]));
            let hi = vector_norm(&x, exp(w[1]));
            assert!(hi <= lo * (1.0 + 1e-12), "{} vs {}", w[0], w[1]);
        }
        for s in grid {
            let p = exp(s);
            let scaled: Vec<f64> = x.iter().map(|v| 3.5 * v).collect();
            let lhs = vector_norm(&scaled, p);
            let rhs = 3.5 * vector_norm(&x, p);
            assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }
    }

    #[test]
    fn mixed_norm_examples() {
        let a = PositiveMatrix::from_rows(&[vec![3.0, 4.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(mixed_norm_rows(&a, exp("1"), exp("2")), 5.0);

        let id = PositiveMatrix::identity(2).unwrap();
        assert_eq!(mixed_norm_rows(&id, exp("2"), exp("2")), 2f64.sqrt());
        assert_eq!(mixed_norm_cols(&id, exp("2"), exp("2")), 2f64.sqrt());

        let ones = PositiveMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(mixed_norm_rows(&ones, exp("2"), exp("2")), 2.0);

        let at = a.transpose();
        assert_eq!(mixed_norm_cols(&at, exp("1"), exp("2")), 5.0);
    }

    #[test]
    fn mixed_norms_are_homogeneous() {
        let a = PositiveMatrix::from_rows(&[vec![0.3, 1.7], vec![2.0, 0.9]]).unwrap();
        let scaled = a.scale(2.5).unwrap();
        for (o, i) in [("1", "2"), ("3/2", "3"), ("inf", "2"), ("2", "inf")] {
            let base = mixed_norm_rows(&a, exp(o), exp(i));
            let big = mixed_norm_rows(&scaled, exp(o), exp(i));
            assert!(
                (big - 2.5 * base).abs() <= 1e-12 * big,
                "outer {o} inner {i}"
            );
        }
    }

    #[test]
    fn cols_match_rows_of_transpose() {
        let a = PositiveMatrix::from_rows(&[vec![0.3, 1.7, 0.2], vec![2.0, 0.0, 0.9]]).unwrap();
        for o in ["1", "3/2", "2", "inf"] {
            for i in ["1", "2", "5/2", "inf"] {
                let lhs = mixed_norm_cols(&a, exp(o), exp(i));
                let rhs = mixed_norm_rows(&a.transpose(), exp(o), exp(i));
                assert_eq!(lhs, rhs, "outer {o}, inner {i}");
            }
        }
    }

    #[test]
    fn diagonal_mixed_norm_is_entrywise() {
        let a = PositiveMatrix::from_rows(&[vec![0.5, 2.0], vec![1.0, 3.0]]).unwrap();
        for s in ["0.5", "1", "4/3", "2", "3", "inf"] {
            let p = exp(s);
            let lhs = mixed_norm_rows(&a, p, p);
            let rhs = entrywise_norm(&a, p);
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(lhs), "p = {s}");
        }
    }

    #[test]
    fn entrywise_s_dominated_by_r_when_r_small() {
        // r <= s implies the s-norm is dominated by the r-norm
        let a = PositiveMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let pair = ExponentPair::new(exp("inf"), exp("1")).unwrap();
        let lr = entrywise_norm(&a, pair.r);
        let ls = entrywise_norm(&a, pair.s);
        assert_eq!(lr, 4.0);
        assert!((ls - 4f64.powf(0.75)).abs() < 1e-12);
        assert!(ls <= lr);
    }
}
