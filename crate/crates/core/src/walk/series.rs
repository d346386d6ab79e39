use statrs::distribution::{ContinuousCDF, StudentsT};
use std::fmt;

/// Outcome attached to every record.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Ok,
    /// The path hit its budget at this `n`; the value is a sentinel.
    Truncated,
    /// Computed with less effort than requested (e.g. smaller `k`).
    Downgraded,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Truncated => "truncated",
            Status::Downgraded => "downgraded",
        }
    }

    pub fn parse(s: &str) -> Option<Status> {
        match s {
            "ok" => Some(Status::Ok),
            "truncated" => Some(Status::Truncated),
            "downgraded" => Some(Status::Downgraded),
            _ => None,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Estimator name used for the truncation marker of a path.
pub const TRUNCATION_MARKER: &str = "path";

#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub path_id: u64,
    pub n: usize,
    pub estimator: String,
    /// `NaN` is the sentinel for a missing value.
    pub value: f64,
    pub status: Status,
}

impl Record {
    pub fn ok(path_id: u64, n: usize, estimator: impl Into<String>, value: f64) -> Record {
        Record {
            path_id,
            n,
            estimator: estimator.into(),
            value,
            status: Status::Ok,
        }
    }

    pub fn truncated(path_id: u64, n: usize) -> Record {
        Record {
            path_id,
            n,
            estimator: TRUNCATION_MARKER.into(),
            value: f64::NAN,
            status: Status::Truncated,
        }
    }

    pub fn with_status(mut self, status: Status) -> Record {
        self.status = status;
        self
    }
}

/// Records of one experiment, ordered by `(path_id, n)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EstimateSeries {
    pub experiment: String,
    pub records: Vec<Record>,
    pub metadata: Vec<(String, String)>,
}

impl EstimateSeries {
    pub fn new(experiment: impl Into<String>, records: Vec<Record>) -> EstimateSeries {
        EstimateSeries {
            experiment: experiment.into(),
            records,
            metadata: Vec::new(),
        }
    }

    /// Usable values of `estimator` at time `n`, in path order.
    pub fn values_at(&self, estimator: &str, n: usize) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.n == n && r.estimator == estimator && r.status != Status::Truncated && !r.value.is_nan())
            .map(|r| r.value)
            .collect()
    }

    pub fn median_at(&self, estimator: &str, n: usize) -> Option<f64> {
        median(&self.values_at(estimator, n))
    }

    /// Paths that carry a truncation marker.
    pub fn truncated_paths(&self) -> Vec<u64> {
        self.records
            .iter()
            .filter(|r| r.status == Status::Truncated)
            .map(|r| r.path_id)
            .collect()
    }

    pub fn summarize(&self) -> Vec<SummaryRow> {
        summarize(&self.records)
    }
}

/// Mean computed around the first value, so equal inputs give that value exactly.
pub fn mean(values: &[f64]) -> f64 {
    let x0 = values[0];
    x0 + values.iter().map(|x| x - x0).sum::<f64>() / values.len() as f64
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

/// Largest number of batches used for batch-means intervals.
pub const MAX_BATCHES: usize = 20;

/// Half-width of the 95% batch-means interval for the mean of `values`
/// (in path order): `B = min(P, 20)` contiguous batches, batch `b` holding
/// items `[b P / B, (b+1) P / B)`, and half-width `t_{0.975, B-1} s / sqrt(B)`
/// with `s` the standard deviation of the batch means. `None` when `P < 2`.
pub fn batch_means_halfwidth(values: &[f64]) -> Option<f64> {
    let p = values.len();
    if p < 2 {
        return None;
    }
    let b = p.min(MAX_BATCHES);
    // centring on the first value keeps identical inputs exactly at zero width
    let x0 = values[0];
    let means: Vec<f64> = (0..b)
        .map(|i| {
            let chunk = &values[i * p / b..(i + 1) * p / b];
            chunk.iter().map(|x| x - x0).sum::<f64>() / chunk.len() as f64
        })
        .collect();
    let grand = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (b - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (b - 1) as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975);
    Some(t * var.sqrt() / (b as f64).sqrt())
}

/// Per-`(estimator, n)` aggregate over paths.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub estimator: String,
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub ci_halfwidth: Option<f64>,
    /// Paths contributing a usable value.
    pub paths: usize,
}

/// Aggregates records, sorted by estimator name then `n`. Values are taken
/// in `path_id` order; truncation markers and sentinels are skipped.
pub fn summarize(records: &[Record]) -> Vec<SummaryRow> {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<(&str, usize), Vec<(u64, f64)>> = BTreeMap::new();
    for r in records {
        if r.status == Status::Truncated || r.value.is_nan() {
            continue;
        }
        groups.entry((&r.estimator, r.n)).or_default().push((r.path_id, r.value));
    }
    groups
        .into_iter()
        .map(|((estimator, n), mut vals)| {
            vals.sort_by_key(|&(p, _)| p);
            let v: Vec<f64> = vals.into_iter().map(|(_, x)| x).collect();
            SummaryRow {
                estimator: estimator.to_string(),
                n,
                mean: mean(&v),
                median: median(&v).expect("nonempty group"),
                ci_halfwidth: batch_means_halfwidth(&v),
                paths: v.len(),
            }
        })
        .collect()
}
