//! Richardson extrapolation on geometric ladders.

/// Result of extrapolating a ladder `v_k = L + c1*y_k + c2*y_k^2 + ...`
/// sampled at `y_{k+1} = y_k / ratio`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderLimit {
    pub value: f64,
    /// Relative residual between the last two extrapolated entries; small
    /// when the ladder is Cauchy.
    pub tail: f64,
}

/// Applies `stages` elimination passes to the ladder and returns the limit
/// plus a tail residual. `values[k]` must correspond to step `y0/ratio^k`.
pub fn richardson(values: &[f64], ratio: f64, stages: usize) -> LadderLimit {
    let mut column: Vec<f64> = values.to_vec();
    let mut factor = ratio;
    for _ in 0..stages.min(column.len().saturating_sub(1)) {
        column = column
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
        factor *= ratio;
    }
    let value = *column.last().expect("ladder must be nonempty");
    let tail = if column.len() >= 2 {
        let prev = column[column.len() - 2];
        (value - prev).abs() / value.abs().max(1e-300)
    } else {
        f64::INFINITY
    };
    LadderLimit { value, tail }
}
