use crate::error::{Error, Result};

/// Real observations, optionally interval-censored.
///
/// For censored data every observation is only known to lie in
/// `(censor_lo[i], censor_hi[i])`; `values[i]` then holds a representative
/// point (the transformed raw value) used for reporting and grid placement.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    censor: Option<(Vec<f64>, Vec<f64>)>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            values,
            censor: None,
        })
    }

    pub fn censored(values: Vec<f64>, lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if values.len() != lo.len() || values.len() != hi.len() {
            return Err(Error::OutOfRange(format!(
                "censoring vectors have lengths {}, {} for {} values",
                lo.len(),
                hi.len(),
                values.len()
            )));
        }
        let mut s = Self::new(values)?;
        for (i, (&a, &b)) in lo.iter().zip(&hi).enumerate() {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::NonFinite(i));
            }
            if a >= b {
                return Err(Error::EmptyCensorInterval { index: i, lo: a, hi: b });
            }
        }
        s.censor = Some((lo, hi));
        Ok(s)
    }

    /// Censored sample whose representative values are the interval midpoints.
    pub fn from_intervals(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let mid = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        Self::censored(mid, lo, hi)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_censored(&self) -> bool {
        self.censor.is_some()
    }

    pub fn censor_lo(&self) -> Option<&[f64]> {
        self.censor.as_ref().map(|(lo, _)| lo.as_slice())
    }

    pub fn censor_hi(&self) -> Option<&[f64]> {
        self.censor.as_ref().map(|(_, hi)| hi.as_slice())
    }

    pub fn sorted(&self) -> Vec<f64> {
        sorted(&self.values)
    }

    /// Sorted points that drive the lower boundary of a band.
    ///
    /// Lower boundaries come from the upper censoring endpoints: an
    /// observation is certainly `<= x` only once its whole interval is.
    pub fn sorted_for_lower(&self) -> Vec<f64> {
        match &self.censor {
            Some((_, hi)) => sorted(hi),
            None => self.sorted(),
        }
    }

    /// Sorted points that drive the upper boundary of a band.
    pub fn sorted_for_upper(&self) -> Vec<f64> {
        match &self.censor {
            Some((lo, _)) => sorted(lo),
            None => self.sorted(),
        }
    }

    /// Every point that must appear on an evaluation grid.
    pub fn support_points(&self) -> Vec<f64> {
        let mut pts = self.values.clone();
        if let Some((lo, hi)) = &self.censor {
            pts.extend_from_slice(lo);
            pts.extend_from_slice(hi);
        }
        pts
    }
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    out.sort_by(f64::total_cmp);
    out
}

/// Number of entries of the sorted slice `xs` that are `<= x`.
pub(crate) fn count_le(xs: &[f64], x: f64) -> usize {
    xs.partition_point(|&v| v <= x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_nan() {
        assert_eq!(Sample::new(vec![]), Err(Error::EmptySample));
        assert_eq!(Sample::new(vec![1.0, f64::NAN]), Err(Error::NonFinite(1)));
    }

    #[test]
    fn censored_interval_must_be_nonempty() {
        let e = Sample::censored(vec![1.0], vec![1.0], vec![1.0]).unwrap_err();
        assert!(matches!(e, Error::EmptyCensorInterval { index: 0, .. }));
    }

    #[test]
    fn lower_uses_upper_endpoints() {
        let s = Sample::censored(vec![2.0, 1.0], vec![1.5, 0.5], vec![2.5, 1.5]).unwrap();
        assert_eq!(s.sorted_for_lower(), vec![1.5, 2.5]);
        assert_eq!(s.sorted_for_upper(), vec![0.5, 1.5]);
        assert_eq!(s.sorted(), vec![1.0, 2.0]);
    }

    #[test]
    fn count_le_is_right_continuous() {
        let xs = [1.0, 2.0, 2.0, 3.0];
        assert_eq!(count_le(&xs, 0.5), 0);
        assert_eq!(count_le(&xs, 2.0), 3);
        assert_eq!(count_le(&xs, 9.0), 4);
    }
}
