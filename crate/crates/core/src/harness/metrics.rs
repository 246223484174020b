use crate::error::{Error, Result};

/// Fraction of samples where `(score >= threshold)` agrees with the label.
pub fn accuracy(scores: &[f64], labels: &[u8], threshold: f64) -> Result<f64> {
    if scores.is_empty() || scores.len() != labels.len() {
        return Err(Error::Metric(format!(
            "accuracy needs equal non-empty inputs, got {} scores and {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let hits = scores
        .iter()
        .zip(labels)
        .filter(|(&s, &y)| (s >= threshold) == (y == 1))
        .count();
    Ok(hits as f64 / scores.len() as f64)
}

/// Average precision: rank by descending score (ties by ascending index) and
/// average the precision at each positive.
pub fn average_precision(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::Metric("scores and labels differ in length".into()));
    }
    let positives = labels.iter().filter(|&&y| y == 1).count();
    if positives == 0 {
        return Err(Error::Metric("average precision needs at least one positive".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (rank, &i) in order.iter().enumerate() {
        if labels[i] == 1 {
            hits += 1;
            sum += hits as f64 / (rank + 1) as f64;
        }
    }
    Ok(sum / positives as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_cases() {
        let labels = [1, 1, 0, 0];
        assert_eq!(accuracy(&[0.9, 0.8, 0.1, 0.2], &labels, 0.5).unwrap(), 1.0);
        assert_eq!(accuracy(&[0.1, 0.2, 0.9, 0.8], &labels, 0.5).unwrap(), 0.0);
        assert_eq!(accuracy(&[0.9, 0.4, 0.6, 0.1], &labels, 0.5).unwrap(), 0.5);
        // Exactly at threshold counts as positive.
        assert_eq!(accuracy(&[0.5], &[1], 0.5).unwrap(), 1.0);
        assert!(accuracy(&[], &[], 0.5).is_err());
        assert!(accuracy(&[0.1], &[0, 1], 0.5).is_err());
    }

    #[test]
    fn ap_cases() {
        assert_eq!(average_precision(&[0.9, 0.8, 0.2, 0.1], &[1, 1, 0, 0]).unwrap(), 1.0);
        assert_eq!(average_precision(&[0.9, 0.1], &[0, 1]).unwrap(), 0.5);
        assert!(average_precision(&[0.3, 0.2], &[0, 0]).is_err());
    }

    #[test]
    fn ap_ties_follow_index_order() {
        // Equal scores: index 0 (negative) ranks before index 1 (positive).
        assert_eq!(average_precision(&[0.5, 0.5], &[0, 1]).unwrap(), 0.5);
        assert_eq!(average_precision(&[0.5, 0.5], &[1, 0]).unwrap(), 1.0);
    }
}
