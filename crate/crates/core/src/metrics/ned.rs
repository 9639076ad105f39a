use super::mean_sorted;
use crate::error::MetricError;

/// Splits a type key into phoneme symbols.
pub fn phonemes(type_key: &str) -> Vec<&str> {
    type_key.split_whitespace().collect()
}

/// Levenshtein distance over atomic symbols with unit costs.
pub fn edit_distance<S: PartialEq>(x: &[S], y: &[S]) -> usize {
    if x.is_empty() {
        return y.len();
    }
    let mut row: Vec<usize> = (0..=y.len()).collect();
    for (i, xs) in x.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, ys) in y.iter().enumerate() {
            let above = row[j + 1];
            let sub = diag + usize::from(xs != ys);
            row[j + 1] = sub.min(above + 1).min(row[j] + 1);
            diag = above;
        }
    }
    row[y.len()]
}

/// Edit distance divided by the longer length.
pub fn ned<S: PartialEq>(x: &[S], y: &[S]) -> Result<f64, MetricError> {
    let longest = x.len().max(y.len());
    if longest == 0 {
        return Err(MetricError::Undefined("NED of two empty sequences".into()));
    }
    Ok(edit_distance(x, y) as f64 / longest as f64)
}

/// Mean NED over all unordered pairs of type keys.
pub fn mean_ned<K: AsRef<str>>(type_keys: &[K]) -> Result<f64, MetricError> {
    if type_keys.len() < 2 {
        return Err(MetricError::EmptyResult(format!(
            "mean NED needs 2 types, got {}",
            type_keys.len()
        )));
    }
    let seqs: Vec<Vec<&str>> = type_keys.iter().map(|k| phonemes(k.as_ref())).collect();
    let mut values = Vec::with_capacity(seqs.len() * (seqs.len() - 1) / 2);
    for (i, x) in seqs.iter().enumerate() {
        for y in &seqs[i + 1..] {
            values.push(ned(x, y)?);
        }
    }
    Ok(mean_sorted(values).expect("at least one pair"))
}
