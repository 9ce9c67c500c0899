//! One function per subcommand, each producing a table of flat records.

use std::fmt;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use toric_mellin::bargmann::{
    spectral_measure, spectral_measure_by_states, spectral_measure_em, weight_lattice_points, WeightData,
};
use toric_mellin::distribution::{layer_cake_check, scaling_study, EpsilonSchedule, PredictorMode, VolumeOptions};
use toric_mellin::gk::{g_from_generating_function, g_polynomial};
use toric_mellin::mellin::{empirical_order, transform_numeric, transform_series, TestFunction};
use toric_mellin::polytope::{riemann_sum, EmExpansion, HPolytope};
use toric_mellin::Error;

use crate::output::{join, write_rows};
use crate::{Cli, Command};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Numeric(Error::NonConvergence { .. }) => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(msg) => f.write_str(msg),
            Self::Numeric(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Numeric(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn load_function(path: &Path) -> CliResult<TestFunction> {
    TestFunction::from_json(&read(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn strictly_increasing<T: PartialOrd + Copy>(values: &[T], what: &str) -> CliResult<()> {
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CliError::Config(format!("{what} must be strictly increasing")));
    }
    Ok(())
}

fn relative_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let g = &cli.global;
    let out = g.output.as_deref();
    let written = match &cli.command {
        Command::Gk { max_k } => write_rows(&gk(*max_k)?, g.format, out),
        Command::Transform { function, x, n, order } => write_rows(&transform(function, x, n, *order)?, g.format, out),
        Command::EmpiricalOrder { function, x, n_list, order } => {
            write_rows(&empirical(function, x, n_list, *order)?, g.format, out)
        }
        Command::Em { polytope, function, n_list, order } => {
            write_rows(&em(polytope, function, n_list, *order)?, g.format, out)
        }
        Command::Spectral { weights, function, n_list, alpha, em_order } => {
            write_rows(&spectral(weights, function, n_list, *alpha, *em_order)?, g.format, out)
        }
        Command::Distlaw { weights_direction, n_list, t, rescale, mode } => {
            let opts = VolumeOptions { samples: g.samples, seed: g.seed, ..VolumeOptions::default() };
            write_rows(&distlaw(weights_direction, n_list, t, rescale, mode, &opts)?, g.format, out)
        }
        Command::LayerCake { n, k, points } => write_rows(&layer_cake(n, k, *points)?, g.format, out),
    };
    written.map_err(|e| CliError::Config(format!("cannot write output: {e}")))
}

#[derive(Debug, Serialize)]
pub struct GkRow {
    pub k: u32,
    pub degree: i64,
    pub expected_degree: u32,
    pub polynomial: String,
    /// Ascending coefficients.
    pub coefficients: String,
    pub matches_generating_function: bool,
}

fn gk(max_k: u32) -> CliResult<Vec<GkRow>> {
    let oracle = g_from_generating_function(max_k);
    Ok((0..=max_k)
        .into_par_iter()
        .map(|k| {
            let g = g_polynomial(k);
            GkRow {
                k,
                degree: g.degree(),
                expected_degree: k / 2,
                polynomial: g.to_string(),
                coefficients: join(&g.univariate_coefficients()),
                matches_generating_function: g == oracle[k as usize],
            }
        })
        .collect())
}

#[derive(Debug, Serialize)]
pub struct TransformRow {
    pub function: String,
    pub x: String,
    #[serde(rename = "N")]
    pub n: f64,
    pub order: usize,
    pub numeric: f64,
    pub numeric_method: String,
    pub series: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    /// Signed sum of each layer `|β| = j`.
    pub layers: String,
}

fn transform(function: &Path, x: &[f64], n: &[f64], order: usize) -> CliResult<Vec<TransformRow>> {
    let f = load_function(function)?;
    let mut n = n.to_vec();
    n.sort_by(f64::total_cmp);
    n.par_iter()
        .map(|&n| {
            let numeric = transform_numeric(&f, x, n)?;
            let series = transform_series(&f, x, n, order)?;
            Ok(TransformRow {
                function: function.display().to_string(),
                x: join(x),
                n,
                order,
                numeric: numeric.value,
                numeric_method: numeric.method.to_string(),
                series: series.value,
                abs_error: (numeric.value - series.value).abs(),
                rel_error: relative_gap(numeric.value, series.value),
                layers: join(&series.layers),
            })
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct EmpiricalRow {
    pub function: String,
    pub x: String,
    #[serde(rename = "N")]
    pub n: f64,
    pub order: usize,
    pub exact: f64,
    pub series: f64,
    pub abs_error: f64,
    pub slope: Option<f64>,
    pub series_exact: bool,
}

fn empirical(function: &Path, x: &[f64], n_list: &[f64], order: usize) -> CliResult<Vec<EmpiricalRow>> {
    let f = load_function(function)?;
    strictly_increasing(n_list, "N-list")?;
    let study = empirical_order(&f, x, n_list, order)?;
    Ok(study
        .rows
        .iter()
        .map(|r| EmpiricalRow {
            function: function.display().to_string(),
            x: join(x),
            n: r.n,
            order,
            exact: r.exact,
            series: r.predicted,
            abs_error: r.abs_error(),
            slope: study.slope,
            series_exact: study.exact,
        })
        .collect())
}

#[derive(Debug, Serialize)]
pub struct EmRow {
    pub polytope: String,
    pub function: String,
    #[serde(rename = "N")]
    pub n: u64,
    pub order: usize,
    pub riemann: f64,
    pub euler_maclaurin: f64,
    pub abs_error: f64,
    pub rel_error: f64,
}

fn em(polytope: &Path, function: &Path, n_list: &[u64], order: usize) -> CliResult<Vec<EmRow>> {
    let p =
        HPolytope::from_json(&read(polytope)?).map_err(|e| CliError::Config(format!("{}: {e}", polytope.display())))?;
    let f = load_function(function)?;
    strictly_increasing(n_list, "N-list")?;
    let expansion = EmExpansion::new(&f, &p, order)?;
    n_list
        .par_iter()
        .map(|&n| {
            let riemann = riemann_sum(&f, &p, n)?;
            let em = expansion.evaluate(n as f64);
            Ok(EmRow {
                polytope: polytope.display().to_string(),
                function: function.display().to_string(),
                n,
                order,
                riemann,
                euler_maclaurin: em,
                abs_error: (riemann - em).abs(),
                rel_error: relative_gap(riemann, em),
            })
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct SpectralRow {
    pub weights: String,
    pub function: String,
    #[serde(rename = "N")]
    pub n: u64,
    pub alpha: u64,
    pub q: String,
    pub states: usize,
    pub lattice_sum: f64,
    pub state_sum: f64,
    pub rel_gap: f64,
    pub em_order: Option<usize>,
    pub em: Option<f64>,
    pub em_rel_error: Option<f64>,
}

fn spectral(
    weights: &Path,
    function: &Path,
    n_list: &[u64],
    alpha: Option<u64>,
    em_order: Option<usize>,
) -> CliResult<Vec<SpectralRow>> {
    let w =
        WeightData::from_json(&read(weights)?).map_err(|e| CliError::Config(format!("{}: {e}", weights.display())))?;
    let w = match alpha {
        Some(a) => WeightData::new(w.q().to_vec(), a)?,
        None => w,
    };
    let f = load_function(function)?;
    strictly_increasing(n_list, "N-list")?;
    n_list
        .iter()
        .map(|&n| {
            let lattice = spectral_measure(&f, &w, n)?;
            let states = spectral_measure_by_states(&f, &w, n)?;
            let em = em_order.map(|m| spectral_measure_em(&f, &w, n, m)).transpose()?;
            Ok(SpectralRow {
                weights: weights.display().to_string(),
                function: function.display().to_string(),
                n,
                alpha: w.alpha(),
                q: join(w.q()),
                states: weight_lattice_points(&w, n).len(),
                lattice_sum: lattice,
                state_sum: states,
                rel_gap: relative_gap(lattice, states),
                em_order,
                em,
                em_rel_error: em.map(|e| relative_gap(lattice, e)),
            })
        })
        .collect()
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Direction {
    List(Vec<f64>),
    Object { a: Vec<f64> },
}

#[derive(Debug, Serialize)]
pub struct DistlawRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub d: usize,
    pub l: usize,
    pub t: f64,
    pub variant: String,
    pub exact: f64,
    pub stderr: Option<f64>,
    pub predicted: f64,
    pub ratio: f64,
    pub slope: Option<f64>,
    pub mode: String,
    pub a: String,
    pub k: String,
    pub epsilon: Option<f64>,
    pub seed: u64,
    pub samples: u64,
}

fn distlaw(
    direction: &Path,
    n_list: &[u64],
    t_list: &[f64],
    rescale: &str,
    mode: &str,
    opts: &VolumeOptions,
) -> CliResult<Vec<DistlawRow>> {
    let a = match serde_json::from_str::<Direction>(&read(direction)?) {
        Ok(Direction::List(a)) | Ok(Direction::Object { a }) => a,
        Err(e) => return Err(CliError::Config(format!("{}: {e}", direction.display()))),
    };
    let schedule: EpsilonSchedule = rescale.parse().map_err(|e: Error| CliError::Config(e.to_string()))?;
    let mode: PredictorMode = mode.parse().map_err(|e: Error| CliError::Config(e.to_string()))?;
    strictly_increasing(n_list, "N-list")?;
    let mut t_sorted = t_list.to_vec();
    t_sorted.sort_by(f64::total_cmp);
    let studies = t_sorted
        .par_iter()
        .map(|&t| scaling_study(&a, n_list, t, schedule, mode, opts))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(studies
        .into_iter()
        .flat_map(|s| s.rows)
        .map(|r| DistlawRow {
            n: r.n,
            d: r.d,
            l: r.l,
            t: r.t,
            variant: r.variant,
            exact: r.report.exact,
            stderr: r.report.stderr,
            predicted: r.report.predicted,
            ratio: r.report.ratio,
            slope: r.report.fitted_slope,
            mode: r.mode.to_string(),
            a: join(&a),
            k: join(&r.k),
            epsilon: r.epsilon,
            seed: opts.seed,
            samples: opts.samples,
        })
        .collect())
}

#[derive(Debug, Serialize)]
pub struct LayerCakeRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub k: String,
    pub points: usize,
    pub integral: f64,
    pub ratio: f64,
    pub low_accuracy: bool,
}

fn layer_cake(n_list: &[u64], k: &[u64], points: usize) -> CliResult<Vec<LayerCakeRow>> {
    let mut n_list = n_list.to_vec();
    n_list.sort_unstable();
    n_list
        .par_iter()
        .map(|&n| {
            let lc = layer_cake_check(n, k, points)?;
            Ok(LayerCakeRow {
                n,
                k: join(k),
                points,
                integral: lc.report.exact,
                ratio: lc.report.ratio,
                low_accuracy: lc.low_accuracy,
            })
        })
        .collect()
}
