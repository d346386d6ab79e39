use super::measure::ProbMeasure;
use crate::error::Result;
use crate::free_group::{Automorphism, LetterBudget};
use crate::matrix_oracle::IntMatrix;
use crate::rng::CounterRng;

/// Increment index drawn at step `n` (1-based) of path `path_id`.
pub fn increment_index<T>(measure: &ProbMeasure<T>, rng: &CounterRng, n: usize) -> usize {
    if measure.len() == 1 {
        return 0;
    }
    measure.index_for(rng.f64_at(n as u64 - 1))
}

/// The first `n_max` increment indices of a path.
pub fn increment_indices<T>(measure: &ProbMeasure<T>, master_seed: u64, path_id: u64, n_max: usize) -> Vec<usize> {
    let rng = CounterRng::new(master_seed, path_id);
    (1..=n_max).map(|n| increment_index(measure, &rng, n)).collect()
}

/// A sample path `Φ_n = s_1 ∘ ... ∘ s_n` of the right random walk on `Aut(F_N)`.
///
/// `Φ_n` and `Φ_n^-1` are kept together: composing `Φ_n` with `s` also
/// produces `s^-1 ∘ Φ_n^-1` as the inverse images.
#[derive(Clone, Debug)]
pub struct WalkPath<'m> {
    measure: &'m ProbMeasure<Automorphism>,
    rng: CounterRng,
    path_id: u64,
    increments: Vec<usize>,
    product: Automorphism,
    inverse: Automorphism,
    budget: LetterBudget,
}

impl<'m> WalkPath<'m> {
    pub fn new(measure: &'m ProbMeasure<Automorphism>, master_seed: u64, path_id: u64, budget: LetterBudget) -> Self {
        let id = Automorphism::identity(measure.rank());
        WalkPath {
            measure,
            rng: CounterRng::new(master_seed, path_id),
            path_id,
            increments: Vec::new(),
            inverse: id.clone(),
            product: id,
            budget,
        }
    }

    /// Advances to `n + 1`. On a budget error the path is left at `n`.
    pub fn step(&mut self) -> Result<()> {
        let n = self.increments.len() + 1;
        let idx = increment_index(self.measure, &self.rng, n);
        let s = &self.measure.support()[idx];
        let next = self.product.compose_with_budget(s, self.budget)?;
        self.inverse = next.invert();
        self.product = next;
        self.increments.push(idx);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.increments.len()
    }

    pub fn path_id(&self) -> u64 {
        self.path_id
    }

    pub fn increments(&self) -> &[usize] {
        &self.increments
    }

    /// `Φ_n`.
    pub fn product(&self) -> &Automorphism {
        &self.product
    }

    /// `Φ_n^-1`.
    pub fn inverse(&self) -> &Automorphism {
        &self.inverse
    }

    pub fn budget(&self) -> LetterBudget {
        self.budget
    }

    pub fn measure(&self) -> &'m ProbMeasure<Automorphism> {
        self.measure
    }
}

/// Visits `(n, Φ_n, Φ_n^-1)` for `n = 1..=n_max`. Stops early at the first
/// budget error, which is returned together with the step that failed.
pub fn sample_path<F>(
    measure: &ProbMeasure<Automorphism>,
    master_seed: u64,
    path_id: u64,
    n_max: usize,
    budget: LetterBudget,
    mut visit: F,
) -> std::result::Result<(), (usize, crate::Error)>
where
    F: FnMut(&WalkPath<'_>) -> Result<()>,
{
    let mut path = WalkPath::new(measure, master_seed, path_id, budget);
    for n in 1..=n_max {
        path.step().map_err(|e| (n, e))?;
        visit(&path).map_err(|e| (n, e))?;
    }
    Ok(())
}

/// Left products `A_n ... A_1` of a matrix walk, with the same increment
/// stream as [`WalkPath`].
pub fn matrix_increments(
    measure: &ProbMeasure<IntMatrix>,
    master_seed: u64,
    path_id: u64,
    n_max: usize,
) -> Vec<&IntMatrix> {
    increment_indices(measure, master_seed, path_id, n_max)
        .into_iter()
        .map(|i| &measure.support()[i])
        .collect()
}

/// Abelianized increment for an automorphism walk: `A_i = M_ab(s_i^-1)^T`.
///
/// With the row convention `ab(φ∘ψ) = ab(ψ) ab(φ)`, the abelianization of
/// `Φ_n^-1 = s_n^-1 ∘ ... ∘ s_1^-1` is `ab(s_1^-1) ... ab(s_n^-1)`, whose
/// transpose is the left product `A_n ... A_1`.
pub fn abelianized_increment(s: &Automorphism) -> IntMatrix {
    s.invert().abelianization().transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::parse_automorphism;
    use crate::matrix_oracle::MatrixProduct;

    fn fib() -> Automorphism {
        parse_automorphism("a->ab; b->a | a->b; b->Ba").unwrap()
    }

    fn tribonacci() -> Automorphism {
        parse_automorphism("a->b; b->c; c->ab | a->cA; b->a; c->b").unwrap()
    }

    #[test]
    fn point_mass_walk_is_a_power() {
        let m = ProbMeasure::point_mass(fib());
        let mut seen = Vec::new();
        sample_path(&m, 1, 0, 6, LetterBudget::DEFAULT, |p| {
            seen.push(p.product().clone());
            Ok(())
        })
        .unwrap();
        for (i, phi) in seen.iter().enumerate() {
            assert_eq!(phi, &fib().power(i as u32 + 1, LetterBudget::DEFAULT).unwrap());
        }
    }

    #[test]
    fn stored_inverse_matches_incremental_inverse() {
        let m = ProbMeasure::uniform(vec![fib(), fib().invert(), crate::free_group::elementary::inversion(2, 0).unwrap()]).unwrap();
        let mut path = WalkPath::new(&m, 9, 4, LetterBudget::DEFAULT);
        for _ in 0..25 {
            let prev_inv = path.inverse().clone();
            path.step().unwrap();
            let s = &m.support()[*path.increments().last().unwrap()];
            let incremental = s.invert().compose(&prev_inv).unwrap();
            assert_eq!(&incremental, path.inverse());
            assert!(path.product().compose(path.inverse()).unwrap().is_identity());
        }
    }

    #[test]
    fn increments_are_deterministic_per_path() {
        let m = ProbMeasure::uniform(vec![fib(), fib().invert()]).unwrap();
        assert_eq!(increment_indices(&m, 5, 3, 100), increment_indices(&m, 5, 3, 100));
        assert_ne!(increment_indices(&m, 5, 3, 100), increment_indices(&m, 5, 4, 100));
    }

    #[test]
    fn uniform_increment_frequencies() {
        let m = ProbMeasure::uniform(vec![fib(), fib().invert()]).unwrap();
        let n = 10_000;
        let ones = increment_indices(&m, 77, 0, n).iter().filter(|&&i| i == 1).count() as f64;
        // binomial sd is sqrt(n)/2 = 50
        assert!((ones - n as f64 / 2.0).abs() <= 150.0, "{ones}");
    }

    #[test]
    fn budget_stops_the_path() {
        let m = ProbMeasure::point_mass(tribonacci());
        let err = sample_path(&m, 0, 0, 100, LetterBudget(200), |_| Ok(())).unwrap_err();
        assert!(err.0 > 1 && err.0 < 100);
        assert!(matches!(err.1, crate::Error::WordBudgetExceeded { budget: 200 }));
    }

    #[test]
    fn abelianized_walk_matches_inverse_abelianization() {
        let m = ProbMeasure::uniform(vec![fib(), tribonacci_rank2_substitute()]).unwrap();
        let mut path = WalkPath::new(&m, 3, 1, LetterBudget::DEFAULT);
        let mut prod = MatrixProduct::new(2, 10_000);
        for _ in 0..12 {
            path.step().unwrap();
            let s = &m.support()[*path.increments().last().unwrap()];
            prod.push(&abelianized_increment(s)).unwrap();
            assert_eq!(prod.product(), &path.inverse().abelianization().transpose());
        }
    }

    fn tribonacci_rank2_substitute() -> Automorphism {
        parse_automorphism("a->aab; b->ab | a->aB; b->bAb").unwrap()
    }
}
