//! Correlation statistics over entropy traces.

use crate::error::{Error, Result};

/// A labelled sequence of finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    label: String,
    values: Vec<f64>,
}

impl Series {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(label));
        }
        Ok(Self { label, values })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn pearson_slices(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::TooShort {
            needed: 1,
            got: x.len(),
        });
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Sample Pearson correlation. Fails when either series is constant.
pub fn pearson(x: &Series, y: &Series) -> Result<f64> {
    pearson_slices(&x.values, &y.values)
}

/// Correlation of the series with itself shifted by `lag`.
pub fn autocorrelation(x: &Series, lag: usize) -> Result<f64> {
    let n = x.len();
    if n <= lag + 1 {
        return Err(Error::TooShort {
            needed: lag + 1,
            got: n,
        });
    }
    pearson_slices(&x.values[..n - lag], &x.values[lag..])
}

/// Ranks starting at 1, ties sharing the mean of their positions.
fn ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation.
pub fn spearman(x: &Series, y: &Series) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    pearson_slices(&ranks(&x.values), &ranks(&y.values))
}

/// Equal-width bin counts over `[lo, hi]`.
///
/// Bins are right-open except the last, which also takes `hi`; values outside
/// the range land in the nearest edge bin.
pub fn histogram(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Vec<usize>> {
    if bins == 0 || lo >= hi || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::HistogramRange { lo, hi, bins });
    }
    let edge = |i: usize| lo + (hi - lo) * i as f64 / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = if v <= lo {
            0
        } else if v >= hi {
            bins - 1
        } else {
            // the floor estimate can be one bin off near an edge
            let mut i = (((v - lo) * bins as f64 / (hi - lo)).floor() as usize).min(bins - 1);
            if i + 1 < bins && v >= edge(i + 1) {
                i += 1;
            } else if i > 0 && v < edge(i) {
                i -= 1;
            }
            i
        };
        counts[idx] += 1;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(v: &[f64]) -> Series {
        Series::new("t", v.to_vec()).unwrap()
    }

    #[test]
    fn rejects_non_finite() {
        assert!(
            matches!(Series::new("h", vec![1.0, f64::NAN]), Err(Error::NonFinite(l)) if l == "h")
        );
        assert!(Series::new("h", vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn pearson_examples() {
        let x = s(&[1.0, 2.0, 3.0]);
        assert_eq!(pearson(&x, &x).unwrap(), 1.0);
        assert_eq!(pearson(&x, &s(&[-1.0, -2.0, -3.0])).unwrap(), -1.0);
        assert!((pearson(&x, &s(&[1.0, 3.0, 2.0])).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pearson_errors() {
        assert!(matches!(
            pearson(&s(&[1.0, 1.0, 1.0]), &s(&[1.0, 2.0, 3.0])),
            Err(Error::UndefinedCorrelation)
        ));
        assert!(matches!(
            pearson(&s(&[1.0, 2.0]), &s(&[1.0])),
            Err(Error::LengthMismatch(2, 1))
        ));
        assert!(pearson(&s(&[1.0]), &s(&[1.0])).is_err());
    }

    #[test]
    fn autocorrelation_of_alternating_series() {
        let alt = s(&(0..40).map(|i| (i % 2) as f64).collect::<Vec<_>>());
        assert!((autocorrelation(&alt, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!((autocorrelation(&alt, 1).unwrap() + 1.0).abs() < 1e-12);
        assert!((autocorrelation(&s(&[1.0, 4.0, 2.0]), 0).unwrap() - 1.0).abs() < 1e-12);
        assert!(autocorrelation(&s(&[1.0, 2.0]), 1).is_err());
    }

    #[test]
    fn white_noise_has_small_lag_one_autocorrelation() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let noise = s(&(0..10_000).map(|_| rng.gen::<f64>()).collect::<Vec<_>>());
        assert!(autocorrelation(&noise, 1).unwrap().abs() < 0.05);
    }

    #[test]
    fn spearman_is_rank_based() {
        let x = s(&[1.0, 2.0, 3.0, 4.0]);
        let y = s(&[1.0, 10.0, 100.0, 1000.0]);
        assert!((spearman(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(ranks(&[3.0, 1.0, 3.0]), vec![2.5, 1.0, 2.5]);
    }

    #[test]
    fn histogram_conventions() {
        assert_eq!(histogram(&[0.5], 1, 0.0, 1.0).unwrap(), vec![1]);
        assert_eq!(
            histogram(&[0.5, 1.0, 0.0], 2, 0.0, 1.0).unwrap(),
            vec![1, 2]
        );
        assert_eq!(
            histogram(&[-3.0, 7.0], 4, 0.0, 1.0).unwrap(),
            vec![1, 0, 0, 1]
        );
        assert_eq!(histogram(&[], 3, -1.0, 1.0).unwrap(), vec![0, 0, 0]);
        assert!(histogram(&[1.0], 0, 0.0, 1.0).is_err());
        assert!(histogram(&[1.0], 2, 1.0, 1.0).is_err());
    }

    #[test]
    fn histogram_edges_fall_right() {
        for i in 0..=10 {
            let edge = -1.0 + 2.0 * i as f64 / 10.0;
            let h = histogram(&[edge], 10, -1.0, 1.0).unwrap();
            assert_eq!(h[i.min(9)], 1, "edge {edge}");
        }
    }

    #[test]
    fn histogram_conserves_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let v: Vec<f64> = (0..22).map(|_| rng.gen::<f64>()).collect();
        assert_eq!(
            histogram(&v, 10, 0.0, 1.0).unwrap().iter().sum::<usize>(),
            22
        );
    }

    fn finite_pairs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (3usize..40).prop_flat_map(|n| {
            (
                proptest::collection::vec(-1e3f64..1e3, n),
                proptest::collection::vec(-1e3f64..1e3, n),
            )
        })
    }

    proptest! {
        #[test]
        fn pearson_symmetric_and_affine_invariant((x, y) in finite_pairs(), a in 0.1f64..10.0, b in -100.0f64..100.0) {
            let (sx, sy) = (s(&x), s(&y));
            if let Ok(r) = pearson(&sx, &sy) {
                prop_assert!((-1.0..=1.0).contains(&r));
                prop_assert!((r - pearson(&sy, &sx).unwrap()).abs() < 1e-12);
                let scaled = s(&x.iter().map(|v| a * v + b).collect::<Vec<_>>());
                prop_assert!((r - pearson(&scaled, &sy).unwrap()).abs() < 1e-9);
            }
        }

        #[test]
        fn histogram_counts_sum_to_len(v in proptest::collection::vec(-5.0f64..5.0, 0..100), bins in 1usize..20) {
            let h = histogram(&v, bins, -1.0, 1.0).unwrap();
            prop_assert_eq!(h.iter().sum::<usize>(), v.len());
        }
    }
}
