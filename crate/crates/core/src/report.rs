//! Records emitted by convergence and asymptotic studies.

use serde::{Deserialize, Serialize};

/// One (oracle, prediction) pair of an asymptotic study at scale `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub n: f64,
    pub exact: f64,
    pub predicted: f64,
    /// `exact / predicted`, NaN when the prediction is zero.
    pub ratio: f64,
    pub stderr: Option<f64>,
    pub fitted_slope: Option<f64>,
}

impl AsymptoticReport {
    pub fn new(n: f64, exact: f64, predicted: f64) -> Self {
        let ratio = if predicted != 0.0 { exact / predicted } else { f64::NAN };
        Self { n, exact, predicted, ratio, stderr: None, fitted_slope: None }
    }

    pub fn with_stderr(mut self, stderr: Option<f64>) -> Self {
        self.stderr = stderr;
        self
    }

    pub fn abs_error(&self) -> f64 {
        (self.exact - self.predicted).abs()
    }
}

/// Least-squares slope of `ys` against `xs`; `None` with fewer than two
/// points or no spread in `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    least_squares_slope(&lx, &ly)
}
