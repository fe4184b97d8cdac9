use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Train and test indices of one fold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Stratified k-fold split: each class is shuffled and dealt round-robin, so
/// fold sizes differ by at most one per class.
pub fn kfold_split<R: Rng + ?Sized>(labels: &[bool], folds: usize, rng: &mut R) -> Result<Vec<Fold>> {
    if folds < 2 {
        return Err(Error::param(format!("need at least 2 folds, got {folds}")));
    }
    let mut pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let mut neg: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    if pos.len() < folds || neg.len() < folds {
        return Err(Error::param(format!(
            "{folds} folds need at least {folds} samples per class (have {} and {})",
            pos.len(),
            neg.len()
        )));
    }
    pos.shuffle(rng);
    neg.shuffle(rng);
    let mut fold_of = vec![0; labels.len()];
    for class in [&pos, &neg] {
        for (i, &s) in class.iter().enumerate() {
            fold_of[s] = i % folds;
        }
    }
    Ok((0..folds)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..labels.len()).partition(|&i| fold_of[i] == f);
            Fold { train, test }
        })
        .collect())
}

/// Stratified holdout with roughly `test_fraction` of each class in test.
pub fn stratified_holdout<R: Rng + ?Sized>(labels: &[bool], test_fraction: f64, rng: &mut R) -> Result<Fold> {
    if !(test_fraction > 0.0 && test_fraction <= 0.5) {
        return Err(Error::param(format!("test fraction {test_fraction} outside (0, 0.5]")));
    }
    let folds = (1.0 / test_fraction).round() as usize;
    Ok(kfold_split(labels, folds, rng)?.swap_remove(0))
}
