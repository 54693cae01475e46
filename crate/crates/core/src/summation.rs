use crate::params::C64;

/// Balanced-tree summation with a fixed split order, so the same inputs
/// always produce the same bits.
pub fn pairwise_sum(values: &[C64]) -> C64 {
    match values.len() {
        0 => C64::new(0.0, 0.0),
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Largest modulus among the values (0 for an empty slice).
pub fn max_norm(values: &[C64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}
