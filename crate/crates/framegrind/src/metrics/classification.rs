use super::MetricsError;

/// One evaluation sample: ground-truth label (smile = positive) and
/// classifier score in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledScore {
    pub label: bool,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

pub fn confusion(labels: &[bool], decisions: &[bool]) -> Result<ConfusionCounts, MetricsError> {
    if labels.len() != decisions.len() {
        return Err(MetricsError::LengthMismatch(labels.len(), decisions.len()));
    }
    let mut c = ConfusionCounts::default();
    for (&label, &decision) in labels.iter().zip(decisions) {
        match (label, decision) {
            (true, true) => c.tp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fp += 1,
            (true, false) => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// `(TP + TN) / (TP + TN + FP + FN)`.
pub fn accuracy(labels: &[bool], decisions: &[bool]) -> Result<f64, MetricsError> {
    if labels.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let c = confusion(labels, decisions)?;
    Ok((c.tp + c.tn) as f64 / c.total() as f64)
}

/// ROC curve points `(fpr, tpr)`, one per distinct score threshold with
/// ties grouped, running from (0, 0) to (1, 1).
pub fn roc_curve(samples: &[LabeledScore]) -> Result<Vec<(f64, f64)>, MetricsError> {
    let pos = samples.iter().filter(|s| s.label).count() as f64;
    let neg = samples.len() as f64 - pos;
    if pos == 0.0 || neg == 0.0 {
        return Err(MetricsError::SingleClassInput);
    }
    let mut sorted: Vec<&LabeledScore> = samples.iter().collect();
    sorted.sort_by(|a, b| b.score.partial_cmp(&a.score).expect("finite scores"));

    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < sorted.len() {
        let threshold = sorted[i].score;
        // consume the whole tie group at this threshold
        while i < sorted.len() && sorted[i].score == threshold {
            if sorted[i].label {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / neg, tp as f64 / pos));
    }
    Ok(points)
}

/// Area under the ROC curve by the trapezoid rule. With ties given half
/// credit this equals the Mann-Whitney pairwise statistic.
pub fn auc(samples: &[LabeledScore]) -> Result<f64, MetricsError> {
    let curve = roc_curve(samples)?;
    let mut area = 0.0;
    for pair in curve.windows(2) {
        let (x0, y0) = pair[0];
        let (x1, y1) = pair[1];
        area += (x1 - x0) * (y0 + y1) / 2.0;
    }
    Ok(area)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scores(pairs: &[(bool, f64)]) -> Vec<LabeledScore> {
        pairs
            .iter()
            .map(|&(label, score)| LabeledScore { label, score })
            .collect()
    }

    /// Mann-Whitney pairwise oracle: fraction of (positive, negative) pairs
    /// where the positive outscores the negative, ties counting half.
    fn pairwise_auc(samples: &[LabeledScore]) -> f64 {
        let pos: Vec<f64> = samples.iter().filter(|s| s.label).map(|s| s.score).collect();
        let neg: Vec<f64> = samples.iter().filter(|s| !s.label).map(|s| s.score).collect();
        let mut wins = 0.0;
        for &p in &pos {
            for &n in &neg {
                if p > n {
                    wins += 1.0;
                } else if p == n {
                    wins += 0.5;
                }
            }
        }
        wins / (pos.len() as f64 * neg.len() as f64)
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[true, false], &[true, false]).unwrap(), 1.0);
        assert_eq!(
            accuracy(&[true, true, false, false], &[true, false, false, false]).unwrap(),
            0.75
        );
        assert_eq!(accuracy(&[true, false], &[false, true]).unwrap(), 0.0);
        assert!(matches!(accuracy(&[], &[]), Err(MetricsError::EmptyInput)));
        assert!(matches!(
            accuracy(&[true], &[true, false]),
            Err(MetricsError::LengthMismatch(1, 2))
        ));
    }

    #[test]
    fn confusion_examples() {
        let c = confusion(&[true, false], &[true, false]).unwrap();
        assert_eq!((c.tp, c.tn, c.fp, c.fn_), (1, 1, 0, 0));
        let c = confusion(&[true, false], &[false, true]).unwrap();
        assert_eq!((c.tp, c.tn, c.fp, c.fn_), (0, 0, 1, 1));
    }

    #[test]
    fn accuracy_consistent_with_confusion() {
        let labels = [true, false, true, true, false, false, true];
        let decisions = [true, true, false, true, false, true, false];
        let c = confusion(&labels, &decisions).unwrap();
        assert_eq!(
            accuracy(&labels, &decisions).unwrap(),
            (c.tp + c.tn) as f64 / c.total() as f64
        );
    }

    #[test]
    fn perfectly_separated_curve_passes_through_0_1() {
        let s = scores(&[(true, 0.9), (true, 0.8), (false, 0.2), (false, 0.1)]);
        let curve = roc_curve(&s).unwrap();
        assert!(curve.contains(&(0.0, 1.0)));
        assert_eq!(curve.first(), Some(&(0.0, 0.0)));
        assert_eq!(curve.last(), Some(&(1.0, 1.0)));
        assert_eq!(auc(&s).unwrap(), 1.0);
    }

    #[test]
    fn constant_scores_collapse_to_two_points() {
        let s = scores(&[(true, 0.5), (false, 0.5), (true, 0.5)]);
        let curve = roc_curve(&s).unwrap();
        assert_eq!(curve, vec![(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(auc(&s).unwrap(), 0.5);
    }

    #[test]
    fn four_sample_curve_matches_hand_enumerated_thresholds() {
        // scores desc: 0.8(+), 0.6(-), 0.4(+), 0.2(-); P = N = 2
        let s = scores(&[(true, 0.8), (true, 0.4), (false, 0.6), (false, 0.2)]);
        let curve = roc_curve(&s).unwrap();
        assert_eq!(
            curve,
            vec![(0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (1.0, 1.0)]
        );
        // 3 of 4 (pos, neg) pairs concordant
        assert_eq!(auc(&s).unwrap(), 0.75);
        assert_eq!(pairwise_auc(&s), 0.75);
    }

    #[test]
    fn auc_trivial_extremes() {
        assert_eq!(auc(&scores(&[(true, 0.9), (false, 0.1)])).unwrap(), 1.0);
        assert_eq!(auc(&scores(&[(true, 0.1), (false, 0.9)])).unwrap(), 0.0);
    }

    #[test]
    fn single_class_input_is_an_error() {
        assert!(matches!(
            auc(&scores(&[(true, 0.5), (true, 0.7)])),
            Err(MetricsError::SingleClassInput)
        ));
    }

    #[test]
    fn trapezoid_equals_pairwise_oracle_with_ties() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let n = rng.gen_range(2..=60);
            let mut s: Vec<LabeledScore> = (0..n)
                .map(|_| LabeledScore {
                    label: rng.gen_bool(0.5),
                    // quantized scores force plenty of ties
                    score: (rng.gen_range(0..=10) as f64) / 10.0,
                })
                .collect();
            if !s.iter().any(|x| x.label) {
                s[0].label = true;
            }
            if s.iter().all(|x| x.label) {
                s[0].label = false;
            }
            let a = auc(&s).unwrap();
            assert!((a - pairwise_auc(&s)).abs() <= 1e-12);
            assert!((0.0..=1.0).contains(&a));
        }
    }
}
