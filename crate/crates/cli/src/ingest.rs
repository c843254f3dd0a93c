//! Reading observations from text files.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use blcband::Sample;

use crate::args::Transform;

fn apply(transform: Transform, y: f64, line: usize) -> Result<f64> {
    match transform {
        Transform::None => Ok(y),
        Transform::Log10 if y > 0.0 => Ok(y.log10()),
        Transform::Log10 => bail!("line {line}: log10 of non-positive value {y}"),
    }
}

fn fields(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c == ',' || c == ';' || c.is_whitespace()).filter(|f| !f.is_empty())
}

/// Parses observations: one value per line, or `lower upper` (comma or
/// whitespace separated) for interval data. Blank lines and lines starting
/// with `#` are skipped.
pub fn parse(text: &str, transform: Transform, censor_offset: f64) -> Result<Sample> {
    if !(censor_offset >= 0.0 && censor_offset.is_finite()) {
        bail!("censor offset must be finite and non-negative, got {censor_offset}");
    }
    let (mut vals, mut lo, mut hi) = (Vec::new(), Vec::new(), Vec::new());
    let mut intervals = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let nums: Vec<f64> = fields(trimmed)
            .map(|f| f.parse::<f64>().with_context(|| format!("line {line}: cannot parse {f:?} as a number")))
            .collect::<Result<_>>()?;
        let is_interval = match nums.len() {
            1 => false,
            2 => true,
            k => bail!("line {line}: expected 1 or 2 fields, found {k}"),
        };
        if *intervals.get_or_insert(is_interval) != is_interval {
            bail!("line {line}: mixes single values and intervals");
        }
        if let Some(f) = nums.iter().position(|v| !v.is_finite()) {
            bail!("line {line}: field {} is not finite", f + 1);
        }
        if is_interval {
            if censor_offset > 0.0 {
                bail!("line {line}: interval input cannot be combined with a censor offset");
            }
            lo.push(apply(transform, nums[0], line)?);
            hi.push(apply(transform, nums[1], line)?);
        } else if censor_offset > 0.0 {
            let y = nums[0];
            vals.push(apply(transform, y, line)?);
            lo.push(apply(transform, y - censor_offset, line)?);
            hi.push(apply(transform, y + censor_offset, line)?);
        } else {
            vals.push(apply(transform, nums[0], line)?);
        }
    }
    let sample = match intervals {
        None => bail!("no observations"),
        Some(true) => Sample::from_intervals(lo, hi)?,
        Some(false) if censor_offset > 0.0 => Sample::censored(vals, lo, hi)?,
        Some(false) => Sample::new(vals)?,
    };
    Ok(sample)
}

pub fn ingest(path: &Path, transform: Transform, censor_offset: f64) -> Result<Sample> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text, transform, censor_offset).with_context(|| format!("in {}", path.display()))
}
