//! Input file formats and the JSON run configuration.
//!
//! All data files are plain numeric CSV:
//!
//! * vectors: one observation per row, `q` columns;
//! * curves: first row is the grid (`T` abscissae in `[0, 1]`), each later
//!   row one curve;
//! * SPD matrices: each row a row-major flattened `p x p` matrix, with `p`
//!   declared in the run configuration;
//! * distributions: first row is the grid, each later row quantile, CDF,
//!   or density values, with the representation declared in the run
//!   configuration.
//!
//! Values are written with the shortest decimal representation that parses
//! back to the identical bits, so a write/read round trip is lossless.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::objects::{
    CurveObject, DistributionObject, DistributionRepr, MetricKind, ObjectKind, ObjectSeries,
    SeriesData, SpdObject, VectorObject,
};
use crate::resampling::{ResamplingConfig, ResamplingMethod, WeightLaw};
use crate::spectral::{SpectralConfig, StatisticKind};
use crate::Result;

/// Minimum number of observations accepted from an input file.
pub const MIN_OBSERVATIONS: usize = 8;

/// JSON sidecar describing how to read a data file and run the test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub object_kind: ObjectKind,
    pub metric: MetricKind,
    #[serde(default)]
    pub statistic: StatisticKind,
    #[serde(default)]
    pub method: ResamplingMethod,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub weight_law: WeightLaw,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub seed: u64,
    /// Lag bound; omitted means `n - 4`.
    #[serde(default)]
    pub max_lag: Option<usize>,
    #[serde(default = "default_ks_grid")]
    pub ks_grid_size: usize,
    /// Matrix side length; required for SPD input.
    #[serde(default)]
    pub spd_dim: Option<usize>,
    /// Which component the distribution value rows carry; required for
    /// distribution input.
    #[serde(default)]
    pub distribution_representation: Option<DistributionRepr>,
    /// Default result path used when the command line gives none.
    #[serde(default)]
    pub output_path: Option<String>,
}

fn default_replicates() -> usize {
    300
}

fn default_alpha() -> f64 {
    0.05
}

fn default_ks_grid() -> usize {
    512
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicates must be >= 1".into()));
        }
        if self.ks_grid_size < 2 {
            return Err(Error::InvalidConfig("ks_grid_size must be >= 2".into()));
        }
        if self.metric.object_kind() != self.object_kind {
            return Err(Error::InvalidConfig(format!(
                "metric {} does not apply to {} objects",
                self.metric, self.object_kind
            )));
        }
        if self.object_kind == ObjectKind::Spd && self.spd_dim.unwrap_or(0) == 0 {
            return Err(Error::InvalidConfig(
                "spd input needs spd_dim (matrix side length)".into(),
            ));
        }
        if self.object_kind == ObjectKind::Distribution && self.distribution_representation.is_none()
        {
            return Err(Error::InvalidConfig(
                "distribution input needs distribution_representation".into(),
            ));
        }
        Ok(())
    }

    pub fn resampling(&self) -> ResamplingConfig {
        ResamplingConfig {
            method: self.method,
            replicates: self.replicates,
            weight_law: self.weight_law,
            alpha: self.alpha,
            seed: self.seed,
        }
    }

    pub fn spectral(&self) -> SpectralConfig {
        SpectralConfig { ks_grid_size: self.ks_grid_size, k_max: self.max_lag }
    }
}

/// Parse and validate a [`RunConfig`] JSON document.
pub fn parse_run_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig = serde_json::from_str(text)?;
    config.validate()?;
    Ok(config)
}

/// Parse a vector CSV: one observation per row, a fixed number of columns.
pub fn parse_vectors_csv(text: &str) -> Result<Vec<VectorObject>> {
    let rows = parse_numeric_rows(text)?;
    if rows.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    let q = rows[0].1.len();
    let mut out = Vec::with_capacity(rows.len());
    for (line, values) in rows {
        if values.len() != q {
            return Err(Error::Parse(format!(
                "row {line}: expected {q} columns, found {}",
                values.len()
            )));
        }
        out.push(VectorObject::new(values).map_err(|e| Error::Parse(format!("row {line}: {e}")))?);
    }
    Ok(out)
}

/// Parse a curve CSV: grid row followed by one curve per row.
pub fn parse_curves_csv(text: &str) -> Result<Vec<CurveObject>> {
    let mut rows = parse_numeric_rows(text)?.into_iter();
    let (grid_line, grid) =
        rows.next().ok_or_else(|| Error::Parse("missing grid row".into()))?;
    let grid = Arc::new(grid);
    let mut out = Vec::new();
    for (line, values) in rows {
        if values.len() != grid.len() {
            return Err(Error::Parse(format!(
                "row {line}: curve has {} values but the grid (row {grid_line}) has {}",
                values.len(),
                grid.len()
            )));
        }
        out.push(
            CurveObject::with_shared_grid(Arc::clone(&grid), values)
                .map_err(|e| Error::Parse(format!("row {line}: {e}")))?,
        );
    }
    Ok(out)
}

/// Parse an SPD CSV: each row a row-major flattened `p x p` matrix.
pub fn parse_spd_csv(text: &str, dim: usize) -> Result<Vec<SpdObject>> {
    if dim == 0 {
        return Err(Error::InvalidConfig("spd_dim must be >= 1".into()));
    }
    let rows = parse_numeric_rows(text)?;
    let mut out = Vec::with_capacity(rows.len());
    for (line, values) in rows {
        if values.len() != dim * dim {
            return Err(Error::Parse(format!(
                "row {line}: expected {} entries for a {dim}x{dim} matrix, found {}",
                dim * dim,
                values.len()
            )));
        }
        out.push(SpdObject::new(dim, values).map_err(|e| Error::Parse(format!("row {line}: {e}")))?);
    }
    Ok(out)
}

/// Parse a distribution CSV: grid row, then one row of the declared
/// representation per observation.
pub fn parse_distributions_csv(
    text: &str,
    repr: DistributionRepr,
) -> Result<Vec<DistributionObject>> {
    let mut rows = parse_numeric_rows(text)?.into_iter();
    let (grid_line, grid) =
        rows.next().ok_or_else(|| Error::Parse("missing grid row".into()))?;
    let grid = Arc::new(grid);
    let mut out = Vec::new();
    for (line, values) in rows {
        if values.len() != grid.len() {
            return Err(Error::Parse(format!(
                "row {line}: {} values but the grid (row {grid_line}) has {}",
                values.len(),
                grid.len()
            )));
        }
        out.push(
            DistributionObject::from_repr(Arc::clone(&grid), repr, values)
                .map_err(|e| Error::Parse(format!("row {line}: {e}")))?,
        );
    }
    Ok(out)
}

/// Build the series a [`RunConfig`] describes from the data file text.
pub fn build_series(config: &RunConfig, text: &str) -> Result<ObjectSeries> {
    config.validate()?;
    let data = match config.object_kind {
        ObjectKind::Vector => SeriesData::Vectors(parse_vectors_csv(text)?),
        ObjectKind::Curve => SeriesData::Curves(parse_curves_csv(text)?),
        ObjectKind::Spd => SeriesData::Spds(parse_spd_csv(text, config.spd_dim.unwrap())?),
        ObjectKind::Distribution => SeriesData::Distributions(parse_distributions_csv(
            text,
            config.distribution_representation.unwrap(),
        )?),
    };
    if data.len() < MIN_OBSERVATIONS {
        return Err(Error::SeriesTooShort { n: data.len(), min: MIN_OBSERVATIONS });
    }
    Ok(ObjectSeries::new(data, config.metric)?)
}

/// Render a series in its input CSV format. Distribution series are written
/// in the requested representation (deriving the density when necessary).
pub fn series_to_csv(data: &SeriesData, dist_repr: DistributionRepr) -> Result<String> {
    let mut out = String::new();
    match data {
        SeriesData::Vectors(objs) => {
            for o in objs {
                push_row(&mut out, o.values());
            }
        }
        SeriesData::Curves(objs) => {
            if let Some(first) = objs.first() {
                push_row(&mut out, first.grid());
            }
            for o in objs {
                push_row(&mut out, o.values());
            }
        }
        SeriesData::Spds(objs) => {
            for o in objs {
                push_row(&mut out, o.data());
            }
        }
        SeriesData::Distributions(objs) => {
            if let Some(first) = objs.first() {
                push_row(&mut out, first.grid());
            }
            for o in objs {
                let row: Vec<f64> = match dist_repr {
                    DistributionRepr::Quantile => o
                        .quantile()
                        .ok_or(Error::InvalidConfig(
                            "series has no quantile component to write".into(),
                        ))?
                        .to_vec(),
                    DistributionRepr::Cdf => o
                        .cdf()
                        .ok_or(Error::InvalidConfig("series has no cdf component to write".into()))?
                        .to_vec(),
                    DistributionRepr::Density => match o.density() {
                        Some(d) => d.to_vec(),
                        None => o.derive_density()?.density().unwrap().to_vec(),
                    },
                };
                push_row(&mut out, &row);
            }
        }
    }
    Ok(out)
}

fn push_row(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("{v}"));
    }
    out.push('\n');
}

/// Rows of comma-separated finite numbers with 1-based line numbers.
/// Blank lines are skipped; any bad field names its row and column.
fn parse_numeric_rows(text: &str) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut values = Vec::new();
        for (col, field) in line.split(',').enumerate() {
            let token = field.trim();
            let value: f64 = token.parse().map_err(|_| {
                Error::Parse(format!(
                    "row {line_no}, column {}: cannot parse {token:?} as a number",
                    col + 1
                ))
            })?;
            if !value.is_finite() {
                return Err(Error::Parse(format!(
                    "row {line_no}, column {}: non-finite value {token:?}",
                    col + 1
                )));
            }
            values.push(value);
        }
        rows.push((line_no, values));
    }
    Ok(rows)
}
