//! Binomial confidence intervals.

use serde::Serialize;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959963984540054;
/// One-sided 95% normal quantile, used when no error was observed.
pub const Z_95_ONE_SIDED: f64 = 1.6448536269514722;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }
}

/// 95% Wilson score interval for `errors` out of `trials`. With zero errors
/// the upper end is the one-sided 95% bound `z^2 / (n + z^2)`.
pub fn wilson(errors: u64, trials: u64) -> Interval {
    assert!(
        trials > 0 && errors <= trials,
        "{errors} errors in {trials} trials"
    );
    let n = trials as f64;
    let p = errors as f64 / n;
    if errors == 0 {
        let z2 = Z_95_ONE_SIDED * Z_95_ONE_SIDED;
        return Interval {
            estimate: 0.0,
            lower: 0.0,
            upper: z2 / (n + z2),
        };
    }
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Interval {
        estimate: p,
        lower: (center - half).max(0.0).min(p),
        upper: (center + half).min(1.0).max(p),
    }
}
