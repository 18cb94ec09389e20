use crate::linalg::SquareMatrix;
use crate::scalar::Scalar;

/// `floor(4 (T/100)^(2/9))`.
pub fn newey_west_bandwidth(len: usize) -> usize {
    (4.0 * (len as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

/// Unnormalized Bartlett-weighted sum `Γ₀ + Σ_j (1 - j/(bw+1)) (Γ_j + Γ_j')`
/// with `Γ_j = Σ_t s_t s'_{t-j}` over score columns of equal length.
///
/// Scores are not demeaned: regression scores have mean zero by construction.
pub(crate) fn hac_sum_matrix<S: Scalar>(columns: &[Vec<S>], bandwidth: usize) -> SquareMatrix<S> {
    let k = columns.len();
    let len = columns.first().map_or(0, Vec::len);
    let mut out = SquareMatrix::zeros(k);
    for lag in 0..=bandwidth.min(len.saturating_sub(1)) {
        let w = S::one() - S::of_usize(lag) / S::of_usize(bandwidth + 1);
        for a in 0..k {
            for b in 0..k {
                let gamma: S = (lag..len)
                    .map(|t| columns[a][t] * columns[b][t - lag])
                    .sum();
                if lag == 0 {
                    out.add(a, b, gamma);
                } else {
                    out.add(a, b, w * gamma);
                    out.add(b, a, w * gamma);
                }
            }
        }
    }
    out
}

/// Newey-West long-run variance `(1/T) [Γ₀ + Σ_j w_j (Γ_j + Γ_j')]` of a
/// zero-mean score sequence.
pub fn hac_variance<S: Scalar>(scores: &[S], bandwidth: usize) -> S {
    if scores.is_empty() {
        return S::zero();
    }
    hac_sum_matrix(&[scores.to_vec()], bandwidth).get(0, 0) / S::of_usize(scores.len())
}

/// Long-run covariance matrix of several score sequences (rows/cols follow `columns`).
pub fn hac_covariance<S: Scalar>(columns: &[Vec<S>], bandwidth: usize) -> Vec<Vec<S>> {
    let len = columns.first().map_or(0, Vec::len);
    assert!(
        columns.iter().all(|c| c.len() == len),
        "score columns differ in length"
    );
    let m = hac_sum_matrix(columns, bandwidth);
    let norm = S::of_usize(len.max(1));
    (0..columns.len())
        .map(|a| (0..columns.len()).map(|b| m.get(a, b) / norm).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bandwidth_rule() {
        assert_eq!(newey_west_bandwidth(70), 3);
        assert_eq!(newey_west_bandwidth(100), 4);
        assert_eq!(newey_west_bandwidth(50), 3);
        assert_eq!(newey_west_bandwidth(400), 5);
        assert_eq!(newey_west_bandwidth(1600), 7);
    }

    #[test]
    fn bandwidth_zero_is_second_moment() {
        let s = [1.0, -2.0, 0.5, 3.0, -2.5];
        let naive = s.iter().map(|v| v * v).sum::<f64>() / 5.0;
        assert!((hac_variance(&s, 0) - naive).abs() < 1e-15);
    }

    #[test]
    fn all_zero_scores() {
        assert_eq!(hac_variance(&[0.0; 50], 4), 0.0);
        assert_eq!(hac_variance::<f64>(&[], 4), 0.0);
    }

    #[test]
    fn hand_computed_bartlett_weights() {
        // s = (1, 2, 3), bw = 1: Γ0 = 14, Γ1 = 2 + 6 = 8, weight 1/2
        let v = hac_variance(&[1.0f64, 2.0, 3.0], 1);
        assert!((v - (14.0 + 8.0) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn covariance_is_symmetric() {
        let a = vec![1.0f64, -1.0, 2.0, 0.5, -0.3, 0.9];
        let b = vec![0.2, 0.4, -1.0, 1.5, 0.3, -0.7];
        let c = hac_covariance(&[a.clone(), b], 2);
        assert!((c[0][1] - c[1][0]).abs() < 1e-15);
        assert!((c[0][0] - hac_variance(&a, 2)).abs() < 1e-15);
    }
}
