use crate::error::{Error, Result};

/// Precision and recall of binary predictions against binary labels.
///
/// A zero denominator yields 0: no positive predictions means precision 0,
/// no positive labels means recall 0.
pub fn precision_recall(predictions: &[u8], labels: &[u8]) -> Result<(f64, f64)> {
    if predictions.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            found: predictions.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::Empty("predictions"));
    }
    if let Some(index) = predictions.iter().chain(labels).position(|&v| v > 1) {
        return Err(Error::InvalidArgument(format!(
            "non-binary entry at position {index}"
        )));
    }
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&p, &l) in predictions.iter().zip(labels) {
        match (p, l) {
            (1, 1) => tp += 1,
            (1, 0) => fp += 1,
            (0, 1) => fn_ += 1,
            _ => {}
        }
    }
    Ok((ratio(tp, tp + fp), ratio(tp, tp + fn_)))
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(
            precision_recall(&[1, 0, 1], &[1, 0, 1]).unwrap(),
            (1.0, 1.0)
        );
        assert_eq!(
            precision_recall(&[1, 1, 1, 1], &[1, 0, 0, 0]).unwrap(),
            (0.25, 1.0)
        );
        assert_eq!(
            precision_recall(&[0, 0, 0], &[1, 0, 1]).unwrap(),
            (0.0, 0.0)
        );
        assert_eq!(precision_recall(&[1, 0], &[0, 0]).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn errors() {
        assert!(precision_recall(&[1, 2], &[1, 0]).is_err());
        assert!(precision_recall(&[1], &[1, 0]).is_err());
        assert!(precision_recall(&[], &[]).is_err());
    }

    proptest! {
        #[test]
        fn agrees_with_confusion_matrix(pairs in prop::collection::vec((0u8..2, 0u8..2), 1..200)) {
            let (p, l): (Vec<u8>, Vec<u8>) = pairs.iter().copied().unzip();
            // Count every cell of the 2x2 matrix independently.
            let mut m = [[0usize; 2]; 2];
            for (&a, &b) in p.iter().zip(&l) {
                m[a as usize][b as usize] += 1;
            }
            let (prec, rec) = precision_recall(&p, &l).unwrap();
            let expect_p = if m[1][1] + m[1][0] == 0 { 0.0 } else { m[1][1] as f64 / (m[1][1] + m[1][0]) as f64 };
            let expect_r = if m[1][1] + m[0][1] == 0 { 0.0 } else { m[1][1] as f64 / (m[1][1] + m[0][1]) as f64 };
            prop_assert_eq!(prec, expect_p);
            prop_assert_eq!(rec, expect_r);
            prop_assert_eq!(m[0][0] + m[0][1] + m[1][0] + m[1][1], p.len());
        }
    }
}
