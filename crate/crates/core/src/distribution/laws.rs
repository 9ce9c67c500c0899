//! Asymptotic predictors for superlevel volumes, the `ε_N` schedules of the
//! rescaled thresholds, and the studies comparing them with exact volumes.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::level_set::{superlevel_volume_with, LevelSetProblem, VolumeOptions};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre_unit;
use crate::report::{least_squares_slope, AsymptoticReport};
use crate::special::unit_ball_volume;

/// `γ = d ln π + ½ Σ ln(2π a_i)`.
pub fn gamma_constant(a: &[f64]) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::Domain("γ needs at least one coordinate".into()));
    }
    if let Some(bad) = a.iter().find(|&&ai| !(ai > 0.0)) {
        return Err(Error::Domain(format!("γ requires every a_i > 0, got {bad}")));
    }
    Ok(a.len() as f64 * PI.ln() + 0.5 * a.iter().map(|ai| (2.0 * PI * ai).ln()).sum::<f64>())
}

/// How the user-level parameter `t` maps to the actual density threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum EpsilonSchedule {
    /// The threshold is `t`.
    Plain,
    /// The threshold is `N^{d/2} t`.
    Power,
    /// The threshold is `exp(-N^α (ln N)^β t)`.
    Exp { alpha: f64, beta: f64 },
    /// The threshold is `N^{-t}`.
    LogN,
}

impl EpsilonSchedule {
    pub fn validate(&self) -> Result<()> {
        if let Self::Exp { alpha, beta } = *self {
            let ok = (alpha > 0.0 && alpha < 1.0 && beta.is_finite()) || (alpha == 0.0 && beta > 1.0);
            if !ok {
                return Err(Error::Domain(format!(
                    "exponential rescaling needs 0 < alpha < 1, or alpha = 0 with beta > 1; got alpha = {alpha}, beta = {beta}"
                )));
            }
        }
        Ok(())
    }

    /// Log of the actual threshold for the user-level parameter `t`.
    pub fn effective_log_t(&self, n: f64, t: f64, d: usize) -> Result<f64> {
        self.validate()?;
        let ln_n = n.ln();
        match *self {
            Self::Plain | Self::Power => {
                if !(t > 0.0) {
                    return Err(Error::Domain(format!("t must be positive, got {t}")));
                }
                Ok(if matches!(self, Self::Power) { 0.5 * d as f64 * ln_n + t.ln() } else { t.ln() })
            }
            Self::Exp { alpha, beta } => Ok(-n.powf(alpha) * ln_n.powf(beta) * t),
            Self::LogN => Ok(-t * ln_n),
        }
    }

    /// `ε_N` for this schedule.
    pub fn epsilon(&self, n: f64, t: f64, gamma: f64, d: usize) -> Result<f64> {
        self.validate()?;
        if !(n >= 2.0) {
            return Err(Error::Domain(format!("ε_N needs N ≥ 2, got {n}")));
        }
        let ln_n = n.ln();
        let half_d = 0.5 * d as f64;
        match *self {
            Self::Plain => {
                if !(t > 0.0) {
                    return Err(Error::Domain(format!("t must be positive, got {t}")));
                }
                Ok(half_d * ln_n / n - (t.ln() + gamma) / n)
            }
            Self::Power => {
                if !(t > 0.0) {
                    return Err(Error::Domain(format!("t must be positive, got {t}")));
                }
                if t.ln() >= -gamma {
                    return Err(Error::OutsideValidity(format!(
                        "power rescaling needs ln t < -γ = {}, got ln t = {}",
                        -gamma,
                        t.ln()
                    )));
                }
                Ok((-t.ln() - gamma) / n)
            }
            Self::Exp { alpha, beta } => Ok(n.powf(alpha - 1.0) * ln_n.powf(beta) * t + half_d * ln_n / n - gamma / n),
            Self::LogN => Ok((half_d + t) * ln_n / n - gamma / n),
        }
    }
}

/// `(d + 2t) ln N / N`: twice the logarithmic schedule's leading term. Kept
/// to show that measured volumes follow [`EpsilonSchedule::LogN`] instead.
pub fn logn_epsilon_doubled(n: f64, t: f64, d: usize) -> f64 {
    (d as f64 + 2.0 * t) * n.ln() / n
}

impl fmt::Display for EpsilonSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Plain => f.write_str("plain"),
            Self::Power => f.write_str("power"),
            Self::Exp { alpha, beta } => write!(f, "exp:{alpha},{beta}"),
            Self::LogN => f.write_str("logn"),
        }
    }
}

impl FromStr for EpsilonSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let schedule = match s.trim().to_ascii_lowercase().as_str() {
            "plain" => Self::Plain,
            "power" => Self::Power,
            "logn" => Self::LogN,
            other => {
                let params =
                    other.strip_prefix("exp:").ok_or_else(|| Error::Parse(format!("unknown rescaling {s:?}")))?;
                let (a, b) = params
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("expected exp:ALPHA,BETA, got {s:?}")))?;
                let parse =
                    |v: &str| v.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad number {v:?}: {e}")));
                Self::Exp { alpha: parse(a)?, beta: parse(b)? }
            }
        };
        schedule.validate()?;
        Ok(schedule)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictorMode {
    /// `π^d γ_d Π (a_i d ln N / N)^{1/2}`.
    Leading,
    /// `(2π)^d γ_d Π (a_i ε / 2)^{1/2}`.
    Refined,
    /// `2^{l-d} π^l γ_{2d-l} (d ln N / N)^{d - l/2} Π_{i≤l} a_i^{1/2}`.
    Degenerate,
}

impl fmt::Display for PredictorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Leading => "leading",
            Self::Refined => "refined",
            Self::Degenerate => "degenerate",
        })
    }
}

impl FromStr for PredictorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "leading" => Ok(Self::Leading),
            "refined" => Ok(Self::Refined),
            "degenerate" => Ok(Self::Degenerate),
            _ => Err(Error::Parse(format!("unknown predictor mode {s:?}"))),
        }
    }
}

fn require_positive(p: &LevelSetProblem, mode: PredictorMode) -> Result<()> {
    if p.l < p.dim() {
        return Err(Error::Domain(format!(
            "{mode} prediction needs every k_i > 0; use the degenerate mode for k = {:?}",
            p.k
        )));
    }
    Ok(())
}

/// The refined predictor at an explicit `ε`.
pub fn refined_prediction(p: &LevelSetProblem, epsilon: f64) -> Result<f64> {
    require_positive(p, PredictorMode::Refined)?;
    if !(epsilon > 0.0) {
        return Err(Error::OutsideValidity(format!(
            "ε_N = {epsilon} is not positive, so the predicted region is empty"
        )));
    }
    let d = p.dim();
    Ok((2.0 * PI).powi(d as i32)
        * unit_ball_volume(d)
        * p.a.iter().map(|ai| (ai * epsilon / 2.0).sqrt()).product::<f64>())
}

/// `ε_N` of the plain schedule at the problem's own threshold.
pub fn plain_epsilon(p: &LevelSetProblem) -> Result<f64> {
    require_positive(p, PredictorMode::Refined)?;
    let gamma = gamma_constant(&p.a)?;
    let nf = p.n as f64;
    Ok(0.5 * p.dim() as f64 * nf.ln() / nf - (p.log_t + gamma) / nf)
}

pub fn sigma_predicted(p: &LevelSetProblem, mode: PredictorMode) -> Result<f64> {
    let d = p.dim();
    let nf = p.n as f64;
    let scale = d as f64 * nf.ln() / nf;
    match mode {
        PredictorMode::Leading => {
            require_positive(p, mode)?;
            Ok(PI.powi(d as i32) * unit_ball_volume(d) * p.a.iter().map(|ai| (ai * scale).sqrt()).product::<f64>())
        }
        PredictorMode::Refined => refined_prediction(p, plain_epsilon(p)?),
        PredictorMode::Degenerate => {
            let l = p.l;
            Ok(2f64.powi(l as i32 - d as i32)
                * PI.powi(l as i32)
                * unit_ball_volume(2 * d - l)
                * scale.powf(d as f64 - l as f64 / 2.0)
                * p.a[..l].iter().map(|ai| ai.sqrt()).product::<f64>())
        }
    }
}

/// `∫_0^∞ σ_{N,k}([t, ∞)) dt`, which should be 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerCake {
    /// exact = the integral, predicted = 1.
    pub report: AsymptoticReport,
    pub points: usize,
    /// Too few quadrature points for the result to mean anything.
    pub low_accuracy: bool,
}

/// Below this many points the layer-cake integral is flagged.
pub const LAYER_CAKE_MIN_POINTS: usize = 16;

/// Gauss–Legendre in `u` with `t = (max density) · u`.
pub fn layer_cake_check(n: u64, k: &[u64], points: usize) -> Result<LayerCake> {
    let base = LevelSetProblem::new(n, k, 0.0)?;
    let max_density = base.log_max_density.exp();
    let rule = gauss_legendre_unit(points)?;
    let opts = VolumeOptions::default();
    let mut acc = 0.0;
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        let p = LevelSetProblem::new(n, k, base.log_max_density + u.ln())?;
        acc += w * superlevel_volume_with(&p, &opts)?.volume;
    }
    let integral = acc * max_density;
    Ok(LayerCake {
        report: AsymptoticReport::new(n as f64, integral, 1.0),
        points,
        low_accuracy: points < LAYER_CAKE_MIN_POINTS,
    })
}

/// One row of a scaling study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub n: u64,
    pub d: usize,
    pub l: usize,
    /// The user-level threshold parameter.
    pub t: f64,
    pub variant: String,
    pub mode: PredictorMode,
    pub k: Vec<u64>,
    pub epsilon: Option<f64>,
    pub report: AsymptoticReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingStudy {
    pub rows: Vec<StudyRow>,
    /// Slope of `ln(exact)` against `ln(ln N / N)`.
    pub slope: Option<f64>,
}

/// `k = round(N a)`, keeping every positive direction strictly positive.
pub fn direction_to_k(a: &[f64], n: u64) -> Result<Vec<u64>> {
    a.iter()
        .map(|&ai| {
            if !(ai >= 0.0) || !ai.is_finite() {
                return Err(Error::Domain(format!("direction components must be ≥ 0, got {ai}")));
            }
            let k = (ai * n as f64).round() as u64;
            Ok(if ai > 0.0 { k.max(1) } else { 0 })
        })
        .collect()
}

/// Exact volumes against a predictor along `k = round(N a)`.
pub fn scaling_study(
    a: &[f64],
    n_list: &[u64],
    t: f64,
    schedule: EpsilonSchedule,
    mode: PredictorMode,
    opts: &VolumeOptions,
) -> Result<ScalingStudy> {
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("N values must be strictly increasing".into()));
    }
    let d = a.len();
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let nf = n as f64;
        let k = direction_to_k(a, n)?;
        let p = LevelSetProblem::new(n, &k, schedule.effective_log_t(nf, t, d)?)?;
        let (predicted, epsilon) = match mode {
            PredictorMode::Refined => {
                let gamma = gamma_constant(&p.a)?;
                let eps = schedule.epsilon(nf, t, gamma, d)?;
                (refined_prediction(&p, eps)?, Some(eps))
            }
            _ => (sigma_predicted(&p, mode)?, None),
        };
        let exact = superlevel_volume_with(&p, opts)?;
        let report = AsymptoticReport::new(nf, exact.volume, predicted).with_stderr(exact.stderr);
        rows.push(StudyRow { n, d, l: p.l, t, variant: schedule.to_string(), mode, k, epsilon, report });
    }
    let positive: Vec<&StudyRow> = rows.iter().filter(|r| r.report.exact > 0.0 && r.n > 1).collect();
    let xs: Vec<f64> = positive.iter().map(|r| (r.report.n.ln() / r.report.n).ln()).collect();
    let ys: Vec<f64> = positive.iter().map(|r| r.report.exact.ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    for r in &mut rows {
        r.report.fitted_slope = slope;
    }
    Ok(ScalingStudy { rows, slope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_examples() {
        assert_relative_eq!(gamma_constant(&[1.0]).unwrap(), (PI * (2.0 * PI).sqrt()).ln(), max_relative = 1e-15);
        assert!((gamma_constant(&[1.0]).unwrap() - 2.06367).abs() < 1e-5);
        assert_relative_eq!(
            gamma_constant(&[1.0, 1.0]).unwrap(),
            2.0 * PI.ln() + (2.0 * PI).ln(),
            max_relative = 1e-15
        );
        assert_relative_eq!(gamma_constant(&[1.0 / (2.0 * PI)]).unwrap(), PI.ln(), max_relative = 1e-15);
        assert!(gamma_constant(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn schedule_examples() {
        let g = 2.0;
        let n = 1000.0;
        let plain = EpsilonSchedule::Plain.epsilon(n, 1.0, g, 3).unwrap();
        assert_relative_eq!(plain, 1.5 * n.ln() / n - g / n, max_relative = 1e-15);
        let power = EpsilonSchedule::Power.epsilon(n, (-g - 1.0f64).exp(), g, 3).unwrap();
        assert_relative_eq!(power, 1.0 / n, max_relative = 1e-12);
        assert!(matches!(EpsilonSchedule::Power.epsilon(n, (-g).exp(), g, 1), Err(Error::OutsideValidity(_))));
        let logn = EpsilonSchedule::LogN.epsilon(n, 1.0, 0.0, 2).unwrap();
        assert_relative_eq!(logn, 2.0 * n.ln() / n, max_relative = 1e-15);
        assert_relative_eq!(logn_epsilon_doubled(n, 1.0, 2), 2.0 * logn, max_relative = 1e-15);
    }

    #[test]
    fn schedules_agree_with_plain_at_the_effective_threshold() {
        let n = 5000.0;
        let d = 2;
        let g = 1.3;
        for (s, t) in [
            (EpsilonSchedule::Power, 0.05),
            (EpsilonSchedule::Exp { alpha: 0.5, beta: 1.0 }, 0.2),
            (EpsilonSchedule::Exp { alpha: 0.0, beta: 2.0 }, 0.2),
            (EpsilonSchedule::LogN, 0.7),
        ] {
            let log_t = s.effective_log_t(n, t, d).unwrap();
            let plain = 0.5 * d as f64 * n.ln() / n - (log_t + g) / n;
            assert_relative_eq!(s.epsilon(n, t, g, d).unwrap(), plain, max_relative = 1e-12);
        }
    }

    #[test]
    fn parse_schedules() {
        assert_eq!("plain".parse::<EpsilonSchedule>().unwrap(), EpsilonSchedule::Plain);
        assert_eq!("logn".parse::<EpsilonSchedule>().unwrap(), EpsilonSchedule::LogN);
        assert_eq!("exp:0.5,1".parse::<EpsilonSchedule>().unwrap(), EpsilonSchedule::Exp { alpha: 0.5, beta: 1.0 });
        assert!("exp:1.5,1".parse::<EpsilonSchedule>().is_err());
        assert!("exp:0,0.5".parse::<EpsilonSchedule>().is_err());
        assert!("cubic".parse::<EpsilonSchedule>().is_err());
        assert_eq!(EpsilonSchedule::Exp { alpha: 0.5, beta: 1.0 }.to_string(), "exp:0.5,1");
    }

    #[test]
    fn leading_example_at_e() {
        // N = e is not an integer, so evaluate the formula directly
        let n = std::f64::consts::E;
        let leading = PI * unit_ball_volume(1) * (1.0 * n.ln() / n).sqrt();
        assert_relative_eq!(leading, 2.0 * PI * (-0.5f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn refined_equals_leading_when_log_t_is_minus_gamma() {
        for (n, k) in [(100u64, vec![100u64]), (400, vec![200, 600]), (50, vec![10, 20, 30])] {
            let a: Vec<f64> = k.iter().map(|&ki| ki as f64 / n as f64).collect();
            let p = LevelSetProblem::new(n, &k, -gamma_constant(&a).unwrap()).unwrap();
            let lead = sigma_predicted(&p, PredictorMode::Leading).unwrap();
            let refined = sigma_predicted(&p, PredictorMode::Refined).unwrap();
            assert!((lead - refined).abs() <= 1e-14 * lead, "{lead} vs {refined}");
            let degenerate = sigma_predicted(&p, PredictorMode::Degenerate).unwrap();
            assert_relative_eq!(degenerate, lead, max_relative = 1e-14);
        }
    }

    #[test]
    fn refined_outside_validity() {
        let p = LevelSetProblem::new(100, &[100], 10.0).unwrap();
        assert!(matches!(sigma_predicted(&p, PredictorMode::Refined), Err(Error::OutsideValidity(_))));
        let q = LevelSetProblem::new(100, &[100, 0], 0.0).unwrap();
        assert!(sigma_predicted(&q, PredictorMode::Leading).is_err());
        assert!(sigma_predicted(&q, PredictorMode::Degenerate).is_ok());
    }

    #[test]
    fn layer_cake_of_pure_gaussian() {
        let lc = layer_cake_check(1, &[0], 200).unwrap();
        assert!((lc.report.exact - 1.0).abs() < 1e-3, "{}", lc.report.exact);
        assert!(!lc.low_accuracy);
        assert!(layer_cake_check(1, &[0], 1).unwrap().low_accuracy);
    }

    #[test]
    fn direction_rounding() {
        assert_eq!(direction_to_k(&[1.0, 0.0, 0.004], 100).unwrap(), vec![100, 0, 1]);
        assert!(direction_to_k(&[-1.0], 10).is_err());
    }
}
