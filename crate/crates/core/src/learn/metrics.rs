use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Confusion counts with class 1 as the positive class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl Confusion {
    pub fn from_predictions(pred: &[bool], truth: &[bool]) -> Result<Confusion> {
        if pred.len() != truth.len() {
            return Err(Error::SizeMismatch {
                expected: truth.len(),
                actual: pred.len(),
            });
        }
        let mut c = Confusion::default();
        for (&p, &t) in pred.iter().zip(truth) {
            match (p, t) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn merge(&mut self, other: &Confusion) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.tn += other.tn;
        self.fn_ += other.fn_;
    }
}

/// Accuracy plus precision and recall, the latter two `None` when their
/// denominator is zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub confusion: Confusion,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

impl Metrics {
    pub fn from_confusion(c: Confusion) -> Result<Metrics> {
        if c.total() == 0 {
            return Err(Error::EmptyData("no predictions to evaluate".into()));
        }
        Ok(Metrics {
            accuracy: (c.tp + c.tn) as f64 / c.total() as f64,
            precision: ratio(c.tp, c.tp + c.fp),
            recall: ratio(c.tp, c.tp + c.fn_),
            confusion: c,
        })
    }
}

/// Metrics of hard predictions against the truth.
pub fn evaluate(pred: &[bool], truth: &[bool]) -> Result<Metrics> {
    Metrics::from_confusion(Confusion::from_predictions(pred, truth)?)
}

/// CSV cell for an optional rate.
pub fn format_rate(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_string(), |v| v.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_counts() {
        let m = Metrics::from_confusion(Confusion { tp: 3, fp: 1, fn_: 2, tn: 4 }).unwrap();
        assert!((m.accuracy - 0.7).abs() < 1e-15);
        assert_eq!(m.precision, Some(0.75));
        assert!((m.recall.unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn edge_cases() {
        let perfect = evaluate(&[true, false, true], &[true, false, true]).unwrap();
        assert_eq!((perfect.accuracy, perfect.precision, perfect.recall), (1.0, Some(1.0), Some(1.0)));
        let zero = evaluate(&[false; 4], &[true; 4]).unwrap();
        assert_eq!((zero.recall, zero.precision), (Some(0.0), None));
        assert_eq!(format_rate(zero.precision), "NaN");
        assert!(evaluate(&[], &[]).is_err());
        assert!(evaluate(&[true], &[]).is_err());
    }

    proptest! {
        #[test]
        fn identities(tp in 0u64..1000, fp in 0u64..1000, tn in 0u64..1000, fn_ in 0u64..1000) {
            prop_assume!(tp + fp + tn + fn_ > 0);
            let m = Metrics::from_confusion(Confusion { tp, fp, tn, fn_ }).unwrap();
            prop_assert_eq!(m.accuracy, (tp + tn) as f64 / (tp + fp + tn + fn_) as f64);
            prop_assert!((0.0..=1.0).contains(&m.accuracy));
            prop_assert_eq!(m.precision, if tp + fp > 0 { Some(tp as f64 / (tp + fp) as f64) } else { None });
            prop_assert_eq!(m.recall, if tp + fn_ > 0 { Some(tp as f64 / (tp + fn_) as f64) } else { None });
        }
    }
}
