use crate::error::{Error, Result};
use crate::free_group::Automorphism;
use crate::matrix_oracle::IntMatrix;
use num_bigint::BigInt;
use num_traits::Signed;

/// Tolerance on the total weight of a measure.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;

/// Support elements must agree on their ambient group.
pub trait SupportElement: Clone + Send + Sync {
    /// Checks `self` against the first support element.
    fn check_compatible(&self, first: &Self) -> Result<()>;
}

impl SupportElement for Automorphism {
    fn check_compatible(&self, first: &Self) -> Result<()> {
        if self.rank() != first.rank() {
            return Err(Error::RankMismatch {
                left: first.rank(),
                right: self.rank(),
            });
        }
        // inverses are certified at construction
        Ok(())
    }
}

impl SupportElement for IntMatrix {
    fn check_compatible(&self, first: &Self) -> Result<()> {
        if self.dim() != first.dim() {
            return Err(Error::DimensionMismatch {
                left: first.dim(),
                right: self.dim(),
            });
        }
        if self.determinant().abs() != BigInt::from(1) {
            return Err(Error::InvalidMeasure(format!(
                "matrix {self} is not invertible over the integers"
            )));
        }
        Ok(())
    }
}

/// Finitely supported probability measure.
#[derive(Clone, Debug)]
pub struct ProbMeasure<T> {
    support: Vec<T>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl<T: SupportElement> ProbMeasure<T> {
    pub fn new(support: Vec<T>, weights: Vec<f64>) -> Result<ProbMeasure<T>> {
        if support.is_empty() {
            return Err(Error::InvalidMeasure("support is empty".into()));
        }
        if support.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} support elements but {} weights",
                support.len(),
                weights.len()
            )));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidMeasure(format!("weight {i} is {w}, expected a positive number")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, expected 1")));
        }
        for s in &support {
            s.check_compatible(&support[0])?;
        }
        let cumulative = weights
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        Ok(ProbMeasure {
            support,
            weights,
            cumulative,
        })
    }

    pub fn uniform(support: Vec<T>) -> Result<ProbMeasure<T>> {
        let w = 1.0 / support.len().max(1) as f64;
        let n = support.len();
        // normalize the rounding error into the last weight
        let mut weights = vec![w; n];
        if n > 0 {
            weights[n - 1] = 1.0 - w * (n - 1) as f64;
        }
        ProbMeasure::new(support, weights)
    }

    pub fn point_mass(x: T) -> ProbMeasure<T> {
        ProbMeasure::new(vec![x], vec![1.0]).expect("point mass is valid")
    }
}

impl<T> ProbMeasure<T> {
    pub fn support(&self) -> &[T] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Support index selected by a uniform draw `u` in `[0, 1)`.
    pub fn index_for(&self, u: f64) -> usize {
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.support.len() - 1)
    }
}

impl ProbMeasure<Automorphism> {
    pub fn rank(&self) -> usize {
        self.support[0].rank()
    }
}

impl ProbMeasure<IntMatrix> {
    pub fn dim(&self) -> usize {
        self.support[0].dim()
    }
}
