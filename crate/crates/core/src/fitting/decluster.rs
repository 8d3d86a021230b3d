//! Temporal preprocessing: segmentation into stationary groups and runs
//! declustering of threshold deficits.
//!
//! Fading traces violate the i.i.d. assumption behind tail fitting in two
//! ways. Slow environment changes shift the whole distribution between
//! stretches of the recording — [`segment_groups`] splits a trace into
//! fixed-length blocks and labels each block by whether it ever dips below
//! a floor power. Short-range fading correlation makes neighboring deficits
//! redundant — [`decluster`] keeps one exceedance per excursion below the
//! threshold, namely the deepest, so the retained values are approximately
//! independent.

use crate::error::{Error, Result};

/// Labels each sample of `samples` with a group id by block.
///
/// The trace is cut into consecutive blocks of `block_len` samples. A block
/// whose samples all stay strictly above `floor` belongs to group `1`
/// (clear-channel behavior); any block that touches `floor` or below is
/// group `2`, as is a trailing partial block. The per-sample labels allow
/// downstream code to fit each regime separately.
pub fn segment_groups(samples: &[f64], block_len: usize, floor: f64) -> Result<Vec<u32>> {
    if block_len == 0 {
        return Err(Error::InvalidParameter("block_len must be positive".into()));
    }
    if !floor.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "floor must be finite, got {floor}"
        )));
    }
    let mut groups = vec![0u32; samples.len()];
    for (index, block) in samples.chunks(block_len).enumerate() {
        let group = if block.len() < block_len || block.iter().any(|&x| x <= floor) {
            2
        } else {
            1
        };
        let start = index * block_len;
        for slot in &mut groups[start..start + block.len()] {
            *slot = group;
        }
    }
    Ok(groups)
}

/// Runs declustering of deficits below `threshold`.
///
/// A cluster is a maximal set of sub-threshold excursions separated by
/// fewer than `run_length` consecutive at-or-above-threshold samples;
/// `run_length` or more such samples end the cluster. Each cluster
/// contributes one exceedance, `threshold - min(cluster)`, taken from its
/// deepest sample. With `run_length = 1` every excursion is its own
/// cluster; larger values merge excursions separated by short recoveries.
///
/// Returned exceedances are strictly positive (samples exactly at the
/// threshold are not exceedances) and appear in trace order.
pub fn decluster(samples: &[f64], threshold: f64, run_length: usize) -> Result<Vec<f64>> {
    if run_length == 0 {
        return Err(Error::InvalidParameter("run_length must be at least 1".into()));
    }
    if !threshold.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "threshold must be finite, got {threshold}"
        )));
    }
    let mut exceedances = Vec::new();
    let mut cluster_min: Option<f64> = None;
    let mut gap = 0usize;
    for &x in samples {
        if x < threshold {
            cluster_min = Some(match cluster_min {
                Some(current) => current.min(x),
                None => x,
            });
            gap = 0;
        } else if cluster_min.is_some() {
            gap += 1;
            if gap >= run_length {
                exceedances.push(threshold - cluster_min.take().unwrap());
                gap = 0;
            }
        }
    }
    if let Some(current) = cluster_min {
        exceedances.push(threshold - current);
    }
    Ok(exceedances)
}
