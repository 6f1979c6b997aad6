use std::collections::BTreeMap;

use thiserror::Error;

use super::ExperimentRecord;
use crate::PauliType;

/// Wilson score interval for `k` successes in `n` trials at 95%.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n_f = n as f64;
    let phat = k as f64 / n_f;
    let denom = 1.0 + z * z / n_f;
    let center = (phat + z * z / (2.0 * n_f)) / denom;
    let half = z * (phat * (1.0 - phat) / n_f + z * z / (4.0 * n_f * n_f)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// A logical-error curve: `(p, rate)` sorted by p.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub name: String,
    pub size: usize,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairCrossing {
    pub smaller: String,
    pub larger: String,
    /// `None` when the curves do not cross inside the common rate range.
    pub crossing: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ThresholdEstimate {
    Crossing {
        median: f64,
        min: f64,
        max: f64,
        pairs: Vec<PairCrossing>,
    },
    NoCrossing { pairs: Vec<PairCrossing> },
}

impl ThresholdEstimate {
    pub fn median(&self) -> Option<f64> {
        match self {
            Self::Crossing { median, .. } => Some(*median),
            Self::NoCrossing { .. } => None,
        }
    }

    pub fn pairs(&self) -> &[PairCrossing] {
        match self {
            Self::Crossing { pairs, .. } | Self::NoCrossing { pairs } => pairs,
        }
    }
}

impl std::fmt::Display for ThresholdEstimate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Crossing { median, min, max, .. } => {
                write!(f, "crossing {median:.6} (range {min:.6} to {max:.6})")
            }
            Self::NoCrossing { .. } => f.write_str("no crossing in range"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ThresholdError {
    #[error("need at least two instance sizes, have {0}")]
    TooFewSizes(usize),
    #[error("{a} and {b} share only {common} rates, need 3")]
    TooFewRates { a: String, b: String, common: usize },
}

/// Crossing of two curves on their common rates. The rate difference is
/// interpolated linearly in log p between the first pair of neighbouring
/// points where the smaller code goes from better to worse; failing that,
/// the first sign change of either kind. Ties (equal rates) are skipped.
pub fn pair_crossing(small: &Curve, large: &Curve) -> Result<Option<f64>, ThresholdError> {
    let lookup: BTreeMap<u64, f64> = large.points.iter().map(|&(p, r)| (p.to_bits(), r)).collect();
    let diffs: Vec<(f64, f64)> = small
        .points
        .iter()
        .filter_map(|&(p, r)| lookup.get(&p.to_bits()).map(|&rl| (p, rl - r)))
        .collect();
    if diffs.len() < 3 {
        return Err(ThresholdError::TooFewRates {
            a: small.name.clone(),
            b: large.name.clone(),
            common: diffs.len(),
        });
    }
    // d = large − small: negative below threshold, positive above
    let nonzero: Vec<(f64, f64)> = diffs.into_iter().filter(|&(p, d)| d != 0.0 && p > 0.0).collect();
    let changes: Vec<(usize, bool)> = nonzero
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0].1 < 0.0) != (w[1].1 < 0.0))
        .map(|(i, w)| (i, w[0].1 < 0.0))
        .collect();
    let pick = changes
        .iter()
        .find(|&&(_, upward)| upward)
        .or_else(|| changes.first())
        .map(|&(i, _)| i);
    Ok(pick.map(|i| {
        let (p0, d0) = nonzero[i];
        let (p1, d1) = nonzero[i + 1];
        let t = d0 / (d0 - d1);
        (p0.ln() + t * (p1.ln() - p0.ln())).exp()
    }))
}

/// Pairwise crossings over all size pairs; median and range of those found.
pub fn estimate_threshold(curves: &[Curve]) -> Result<ThresholdEstimate, ThresholdError> {
    let mut sorted: Vec<&Curve> = curves.iter().collect();
    sorted.sort_by(|a, b| a.size.cmp(&b.size).then_with(|| a.name.cmp(&b.name)));
    if sorted.len() < 2 {
        return Err(ThresholdError::TooFewSizes(sorted.len()));
    }
    let mut pairs = Vec::new();
    for i in 0..sorted.len() {
        for j in i + 1..sorted.len() {
            pairs.push(PairCrossing {
                smaller: sorted[i].name.clone(),
                larger: sorted[j].name.clone(),
                crossing: pair_crossing(sorted[i], sorted[j])?,
            });
        }
    }
    let mut found: Vec<f64> = pairs.iter().filter_map(|p| p.crossing).collect();
    if found.is_empty() {
        return Ok(ThresholdEstimate::NoCrossing { pairs });
    }
    found.sort_by(f64::total_cmp);
    let m = found.len();
    let median = if m % 2 == 1 {
        found[m / 2]
    } else {
        (found[m / 2 - 1] + found[m / 2]) / 2.0
    };
    Ok(ThresholdEstimate::Crossing {
        median,
        min: found[0],
        max: found[m - 1],
        pairs,
    })
}

/// Curves of one channel and layer count, one per instance.
pub fn curves_from_records(records: &[ExperimentRecord], channel: PauliType, layers: usize) -> Vec<Curve> {
    let mut by_name: BTreeMap<(usize, String), Vec<(f64, f64)>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.channel == channel && r.layers == layers) {
        by_name
            .entry((r.n, r.instance.clone()))
            .or_default()
            .push((r.p, r.rate()));
    }
    by_name
        .into_iter()
        .map(|((size, name), mut points)| {
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            Curve { name, size, points }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn curve(name: &str, size: usize, pts: &[(f64, f64)]) -> Curve {
        Curve {
            name: name.into(),
            size,
            points: pts.to_vec(),
        }
    }

    #[test]
    fn wilson_known_values() {
        // 0 of 10: upper bound z²/(n+z²)
        let (lo, hi) = wilson_interval(0, 10);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.277_532).abs() < 1e-5, "{hi}");
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.403_831).abs() < 1e-5 && (hi - 0.596_169).abs() < 1e-5);
    }

    #[test]
    fn synthetic_crossing_at_eight_per_mille() {
        // straight lines in log p that cross exactly at 0.008
        let grid = [0.002, 0.004, 0.008, 0.012, 0.016];
        let small: Vec<(f64, f64)> = grid.iter().map(|&p: &f64| (p, 0.2 + 0.05 * (p / 0.008).ln())).collect();
        let large: Vec<(f64, f64)> = grid.iter().map(|&p: &f64| (p, 0.2 + 0.15 * (p / 0.008).ln())).collect();
        // drop the exact tie point so interpolation is exercised
        let small: Vec<_> = small.into_iter().filter(|x| x.0 != 0.008).collect();
        let large: Vec<_> = large.into_iter().filter(|x| x.0 != 0.008).collect();
        let est = estimate_threshold(&[curve("a", 1, &small), curve("b", 2, &large)]).unwrap();
        let m = est.median().unwrap();
        assert!((m - 0.008).abs() < 1e-12, "{m}");
    }

    #[test]
    fn parallel_curves_do_not_cross() {
        let a = curve("a", 1, &[(0.001, 0.1), (0.002, 0.2), (0.004, 0.3)]);
        let b = curve("b", 2, &[(0.001, 0.05), (0.002, 0.1), (0.004, 0.15)]);
        let est = estimate_threshold(&[a, b]).unwrap();
        assert_eq!(est.to_string(), "no crossing in range");
    }

    #[test]
    fn insufficient_data() {
        let a = curve("a", 1, &[(0.001, 0.1), (0.002, 0.2)]);
        let b = curve("b", 2, &[(0.001, 0.05), (0.002, 0.1)]);
        assert!(matches!(
            estimate_threshold(&[a.clone(), b]),
            Err(ThresholdError::TooFewRates { .. })
        ));
        assert_eq!(estimate_threshold(&[a]), Err(ThresholdError::TooFewSizes(1)));
    }

    proptest! {
        #[test]
        fn wilson_contains_estimate(n in 1u64..5000, frac in 0.0f64..=1.0) {
            let k = ((n as f64) * frac).round() as u64;
            let (lo, hi) = wilson_interval(k, n);
            let phat = k as f64 / n as f64;
            prop_assert!(0.0 <= lo && lo <= phat + 1e-12 && phat <= hi + 1e-12 && hi <= 1.0);
        }
    }
}
