//! Plot-ready data files.
//!
//! Every writer emits a tab-delimited text file with a one-row header
//! naming each column and its unit; values are written at 17 significant
//! digits so downstream tooling sees exactly the computed numbers.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fitting::{GofData, ThresholdScan};
use crate::rate::SweepPoint;

/// The recognized plot kinds, in CLI spelling.
pub const PLOT_KINDS: &[&str] = &["rate_sweep", "reliability", "pp", "qq", "mrl", "stability"];

/// A plot-data family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Normalized rate versus training size: `(n, w)`.
    RateSweep,
    /// Realized outage versus training size, one file per target:
    /// `(n, outage)`.
    Reliability,
    /// Probability–probability points of a fit: `(theoretical, empirical)`.
    Pp,
    /// Quantile–quantile points of a fit: `(theoretical, empirical)`.
    Qq,
    /// Mean excess versus threshold: `(u, mean_excess)`.
    Mrl,
    /// Refit shape versus threshold with its CI half-width:
    /// `(u, shape, halfwidth)`.
    Stability,
}

impl PlotKind {
    pub fn slug(&self) -> &'static str {
        match self {
            PlotKind::RateSweep => "rate_sweep",
            PlotKind::Reliability => "reliability",
            PlotKind::Pp => "pp",
            PlotKind::Qq => "qq",
            PlotKind::Mrl => "mrl",
            PlotKind::Stability => "stability",
        }
    }
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rate_sweep" => Ok(PlotKind::RateSweep),
            "reliability" => Ok(PlotKind::Reliability),
            "pp" => Ok(PlotKind::Pp),
            "qq" => Ok(PlotKind::Qq),
            "mrl" => Ok(PlotKind::Mrl),
            "stability" => Ok(PlotKind::Stability),
            other => Err(Error::Config(format!(
                "unknown plot kind {other:?}; valid kinds: {}",
                PLOT_KINDS.join(", ")
            ))),
        }
    }
}

fn write_rows(path: &Path, header: &str, rows: &[Vec<f64>]) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{header}")?;
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                write!(out, "\t")?;
            }
            write!(out, "{v:.16e}")?;
            first = false;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

/// `(n, w)` rows of a normalized rate sweep; sizes whose fit failed are
/// omitted (they have no rate to plot).
pub fn write_rate_sweep(path: &Path, points: &[SweepPoint]) -> Result<()> {
    let rows: Vec<Vec<f64>> = points
        .iter()
        .filter_map(|p| p.w.map(|w| vec![p.n as f64, w]))
        .collect();
    write_rows(path, "n_samples\tw_normalized_rate", &rows)
}

/// `(n, outage)` rows of a reliability curve for one target level.
pub fn write_reliability(path: &Path, points: &[(usize, f64)]) -> Result<()> {
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|&(n, outage)| vec![n as f64, outage])
        .collect();
    write_rows(path, "n_samples\toutage_probability", &rows)
}

/// Probability–probability points of a fit.
pub fn write_pp(path: &Path, gof: &GofData) -> Result<()> {
    let rows: Vec<Vec<f64>> = gof.pp.iter().map(|&(t, e)| vec![t, e]).collect();
    write_rows(path, "theoretical_probability\tempirical_probability", &rows)
}

/// Quantile–quantile points of a fit (exceedance units, linear power).
pub fn write_qq(path: &Path, gof: &GofData) -> Result<()> {
    let rows: Vec<Vec<f64>> = gof.qq.iter().map(|&(t, e)| vec![t, e]).collect();
    write_rows(
        path,
        "theoretical_exceedance_linear\tempirical_exceedance_linear",
        &rows,
    )
}

/// `(u, mean_excess)` rows of a threshold scan; entries with fewer than
/// two exceedances have no mean excess and are omitted.
pub fn write_mrl(path: &Path, scan: &ThresholdScan) -> Result<()> {
    let rows: Vec<Vec<f64>> = scan
        .entries
        .iter()
        .filter_map(|e| e.mean_excess.map(|m| vec![e.threshold, m]))
        .collect();
    write_rows(path, "threshold_linear\tmean_excess_linear", &rows)
}

/// `(u, shape, ci_halfwidth)` rows of a stability scan; thresholds whose
/// fit failed are omitted, and a missing half-width is written as NaN.
pub fn write_stability(path: &Path, scan: &ThresholdScan) -> Result<()> {
    let rows: Vec<Vec<f64>> = scan
        .entries
        .iter()
        .filter_map(|e| {
            e.fit.as_ref().map(|f| {
                vec![
                    e.threshold,
                    f.shape,
                    f.shape_ci_halfwidth.unwrap_or(f64::NAN),
                ]
            })
        })
        .collect();
    write_rows(
        path,
        "threshold_linear\trefit_shape\tshape_ci_halfwidth",
        &rows,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitting::{fit_gpd_mle, gof_data, scan_thresholds};
    use crate::gpd::GpdParams;
    use crate::Execution;

    #[test]
    fn plot_kind_parsing_lists_valid_kinds_on_error() {
        for slug in PLOT_KINDS {
            assert_eq!(PlotKind::from_str(slug).unwrap().slug(), *slug);
        }
        let err = PlotKind::from_str("histogram").unwrap_err();
        let msg = err.to_string();
        for slug in PLOT_KINDS {
            assert!(msg.contains(slug), "{msg}");
        }
    }

    #[test]
    fn rate_sweep_rows_skip_failures_and_stay_monotone() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.tsv");
        let points = vec![
            SweepPoint {
                n: 100,
                rate: None,
                w: None,
            },
            SweepPoint {
                n: 1_000,
                rate: Some(2.0),
                w: Some(0.97),
            },
            SweepPoint {
                n: 10_000,
                rate: Some(2.1),
                w: Some(1.01),
            },
        ];
        write_rate_sweep(&path, &points).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n_samples\tw_normalized_rate");
        assert_eq!(lines.len(), 3);
        let ns: Vec<f64> = lines[1..]
            .iter()
            .map(|l| l.split('\t').next().unwrap().parse().unwrap())
            .collect();
        assert!(ns.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn qq_row_count_equals_tail_size() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("qq.tsv");
        let ys = GpdParams::new(1.0, -0.2, 5.0).unwrap().sample(300, 3);
        let model = fit_gpd_mle(&ys, 5.0, 10_000).unwrap();
        let gof = gof_data(&model, &ys).unwrap();
        write_qq(&path, &gof).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 301);
        write_pp(&dir.path().join("pp.tsv"), &gof).unwrap();
    }

    #[test]
    fn scan_writers_cover_mrl_and_stability() {
        let dir = tempfile::tempdir().unwrap();
        let ys = GpdParams::new(1.0, -0.2, 8.0).unwrap().sample(4_000, 4);
        let samples: Vec<f64> = ys.iter().map(|y| 8.0 - y).collect();
        let scan = scan_thresholds(&samples, &[6.0, 7.0, 7.9], 50, Execution::Sequential).unwrap();
        let mrl = dir.path().join("mrl.tsv");
        let stab = dir.path().join("stability.tsv");
        write_mrl(&mrl, &scan).unwrap();
        write_stability(&stab, &scan).unwrap();
        let mrl_text = fs::read_to_string(&mrl).unwrap();
        assert!(mrl_text.starts_with("threshold_linear\tmean_excess_linear\n"));
        assert!(mrl_text.lines().count() >= 3);
        let stab_text = fs::read_to_string(&stab).unwrap();
        assert!(stab_text.starts_with("threshold_linear\trefit_shape\tshape_ci_halfwidth\n"));
    }
}
