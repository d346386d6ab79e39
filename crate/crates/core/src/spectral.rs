//! Certified brackets for `log λ(phi)`, the log stretch factor.
//!
//! * lower: `log ρ(M_ab)`, the spectral radius of the abelianization. Conjugacy
//!   length dominates abelianized length, so `ρ(M_ab) <= λ`.
//! * upper: the translation length of `phi` on outer space is at most its
//!   displacement of any point, and `l(phi) = l(phi^k) / k`, hence
//!   `log λ <= dist_y(phi^k) / k` for every rose metric `y` and every `k`.
//!   Both the unit rose and the rose weighted by the Perron eigenvector of the
//!   letter-count matrix are used.
//! * point: the Perron ratio `||phi^{k}(c)|| / ||phi^{k-1}(c)||` of the
//!   fastest-growing seed.
//!
//! Neither bound assumes `phi` is fully irreducible.

use crate::error::{Error, Result};
use crate::free_group::{Automorphism, CyclicWord, Letter, LetterBudget};
use crate::matrix_oracle::spectral_radius;

/// Convergence tolerance for successive log ratios.
pub const CONVERGENCE_TOL: f64 = 1e-3;
/// Default iteration depth for standalone brackets.
pub const STANDALONE_K_MAX: u32 = 12;
/// Default iteration depth inside walk experiments.
pub const WALK_K_MAX: u32 = 4;

/// `(1/k) dist(phi^k)` on the unit rose.
pub fn stretch_upper(phi: &Automorphism, k: u32, budget: LetterBudget) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let mut best = 0.0f64;
    let mut lengths = phi.lengths();
    for c in candidate_words(phi.rank()) {
        let w = iterate(phi, &c, k - 1, budget)?;
        let len = lengths.conjugacy_len(&w) as f64;
        best = best.max(len / c.len() as f64);
    }
    Ok(best.ln() / k as f64)
}

/// `(1/k) dist(phi^k)` on the rose with the given edge lengths.
pub fn stretch_upper_weighted(phi: &Automorphism, k: u32, edge_lengths: &[f64], budget: LetterBudget) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let weights = phi.image_weights(edge_lengths.to_vec());
    let mut best = 0.0f64;
    let mut lengths = phi.lengths();
    for c in candidate_words(phi.rank()) {
        let w = iterate(phi, &c, k - 1, budget)?;
        let len = lengths.measure(&w, Some(&weights)).weighted;
        let base: f64 = c.iter().map(|l| edge_lengths[l.index()]).sum();
        best = best.max(len / base);
    }
    Ok(best.ln() / k as f64)
}

/// `log ρ(abelianization(phi))`, clamped at 0 (the matrix is unimodular).
pub fn stretch_lower(phi: &Automorphism) -> f64 {
    spectral_radius(&phi.abelianization()).lower.max(0.0)
}

/// Perron-ratio estimate from one seed.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct RatioEstimate {
    /// `log(||phi^k(seed)|| / ||phi^{k-1}(seed)||)` at the last `k` reached.
    pub log_ratio: f64,
    /// Whether the last two log ratios differ by less than [`CONVERGENCE_TOL`].
    pub converged: bool,
    /// Last `k` reached; below `k_max` when the letter budget stopped iteration.
    pub k_reached: u32,
    /// `||phi^k(seed)||` at `k_reached`.
    pub final_len: usize,
}

/// Successive ratios `||phi^k(seed)|| / ||phi^{k-1}(seed)||`, `k = 1..=k_max`.
pub fn stretch_ratio(phi: &Automorphism, seed: &CyclicWord, k_max: u32, budget: LetterBudget) -> Result<RatioEstimate> {
    if seed.is_empty() {
        return Err(Error::InvalidArgument("seed must be nontrivial".into()));
    }
    if k_max < 2 {
        return Err(Error::InvalidArgument("k_max must be at least 2".into()));
    }
    Ok(ratio_walk(phi, seed.letters().to_vec(), k_max, budget))
}

fn ratio_walk(phi: &Automorphism, seed: Vec<Letter>, k_max: u32, budget: LetterBudget) -> RatioEstimate {
    let mut w = seed;
    let mut prev_len = w.len();
    let mut prev_log = f64::NAN;
    let mut est = RatioEstimate {
        log_ratio: 0.0,
        converged: false,
        k_reached: 0,
        final_len: prev_len,
    };
    let mut lengths = phi.lengths();
    for k in 1..=k_max {
        let len = lengths.conjugacy_len(&w);
        assert!(len > 0, "an automorphism cannot kill a nontrivial class");
        let log_ratio = (len as f64).ln() - (prev_len as f64).ln();
        est = RatioEstimate {
            log_ratio,
            converged: k >= 2 && (log_ratio - prev_log).abs() < CONVERGENCE_TOL,
            k_reached: k,
            final_len: len,
        };
        if k == k_max {
            break;
        }
        match step(phi, &w, budget) {
            Ok(next) => w = next,
            Err(_) => break,
        }
        prev_len = len;
        prev_log = log_ratio;
    }
    est
}

/// Bracket on `log λ(phi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StretchBracket {
    pub lower: f64,
    /// Minimum of the unit-rose and eigen-rose bounds over `k <= k_used`.
    pub upper: f64,
    pub point: f64,
    pub k_used: u32,
    pub converged: bool,
    /// `(1/k) dist(phi^k)` on the unit rose for `k = 1..=k_used`.
    pub upper_unit: Vec<f64>,
    /// Same on the eigen-weighted rose.
    pub upper_weighted: Vec<f64>,
    pub edge_lengths: Vec<f64>,
}

impl StretchBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Assembles lower, upper and point estimates. `seeds` empty means the
/// candidate loops, which share the iterates used for the upper bound.
pub fn bracket(phi: &Automorphism, k_max: u32, seeds: &[CyclicWord], budget: LetterBudget) -> StretchBracket {
    let k_max = k_max.max(1);
    let lower = stretch_lower(phi);
    let edge_lengths = eigen_edge_lengths(phi);
    let weights = phi.image_weights(edge_lengths.clone());

    let cands = candidate_words(phi.rank());
    let bases: Vec<f64> = cands
        .iter()
        .map(|c| c.iter().map(|l| edge_lengths[l.index()]).sum())
        .collect();
    let mut iterates: Vec<Vec<Letter>> = cands.clone();
    let mut lens: Vec<Vec<usize>> = cands.iter().map(|c| vec![c.len()]).collect();
    let mut upper_unit = Vec::new();
    let mut upper_weighted = Vec::new();

    let mut lengths = phi.lengths();
    for k in 1..=k_max {
        let mut best_unit = 0.0f64;
        let mut best_weighted = 0.0f64;
        for (idx, w) in iterates.iter().enumerate() {
            let len = lengths.measure(w, Some(&weights));
            best_unit = best_unit.max(len.letters as f64 / cands[idx].len() as f64);
            best_weighted = best_weighted.max(len.weighted / bases[idx]);
            lens[idx].push(len.letters);
        }
        upper_unit.push(best_unit.ln() / k as f64);
        upper_weighted.push(best_weighted.ln() / k as f64);
        if k == k_max {
            break;
        }
        let next: Result<Vec<Vec<Letter>>> = iterates.iter().map(|w| step(phi, w, budget)).collect();
        match next {
            Ok(n) => iterates = n,
            Err(_) => break,
        }
    }
    let k_used = upper_unit.len() as u32;
    let upper = upper_unit
        .iter()
        .chain(&upper_weighted)
        .copied()
        .fold(f64::INFINITY, f64::min);

    let (point, converged) = if seeds.is_empty() {
        let best = (0..cands.len())
            .max_by_key(|&i| (lens[i][k_used as usize], std::cmp::Reverse(i)))
            .expect("candidates");
        let l = &lens[best];
        let log_at = |k: usize| (l[k] as f64).ln() - (l[k - 1] as f64).ln();
        let point = log_at(k_used as usize);
        let converged = k_used >= 2 && (point - log_at(k_used as usize - 1)).abs() < CONVERGENCE_TOL;
        (point, converged)
    } else {
        let est = seeds
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| ratio_walk(phi, s.letters().to_vec(), k_max.max(2), budget))
            .max_by_key(|e| (e.k_reached, e.final_len))
            .expect("at least one nontrivial seed");
        (est.log_ratio, est.converged)
    };

    StretchBracket {
        lower,
        upper,
        point,
        k_used,
        converged,
        upper_unit,
        upper_weighted,
        edge_lengths,
    }
}

/// Positive right Perron eigenvector of the unsigned letter-count matrix,
/// normalized to max 1 and floored at 1e-3 so every edge has positive length.
pub fn eigen_edge_lengths(phi: &Automorphism) -> Vec<f64> {
    let t = phi.transition_counts();
    let n = t.len();
    let mut v = vec![1.0f64; n];
    for _ in 0..500 {
        // (T + I) shares the Perron vector of T and is aperiodic
        let mut next: Vec<f64> = (0..n)
            .map(|i| v[i] + t[i].iter().zip(&v).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        let m = next.iter().copied().fold(0.0, f64::max);
        next.iter_mut().for_each(|x| *x /= m);
        let delta = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if delta < 1e-14 {
            break;
        }
    }
    v.into_iter().map(|x| x.max(1e-3)).collect()
}

fn candidate_words(rank: usize) -> Vec<Vec<Letter>> {
    crate::outer_metric::candidates(rank)
        .map(|c| c.loops().iter().map(|l| l.letters().to_vec()).collect())
        .unwrap_or_else(|_| (1..=rank).map(|i| vec![Letter::new(i, false)]).collect())
}

/// `phi(w)` cyclically reduced.
fn step(phi: &Automorphism, w: &[Letter], budget: LetterBudget) -> Result<Vec<Letter>> {
    let mut img = phi.apply_letters(w, budget)?;
    let (mut i, mut j) = (0, img.len());
    while j - i >= 2 && img[i] == img[j - 1].inverse() {
        i += 1;
        j -= 1;
    }
    img.truncate(j);
    img.drain(..i);
    Ok(img)
}

fn iterate(phi: &Automorphism, w: &[Letter], times: u32, budget: LetterBudget) -> Result<Vec<Letter>> {
    let mut cur = w.to_vec();
    for _ in 0..times {
        cur = step(phi, &cur, budget)?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::{parse_automorphism, parse_word};

    const B: LetterBudget = LetterBudget::DEFAULT;

    fn fib() -> Automorphism {
        parse_automorphism("a->ab; b->a | a->b; b->Ba").unwrap()
    }

    fn golden_log() -> f64 {
        ((1.0 + 5f64.sqrt()) / 2.0).ln()
    }

    /// Word lengths of Fibonacci iterates, from the recursion alone.
    fn fibonacci_lengths(count: usize) -> Vec<u64> {
        let mut v = vec![1u64, 2];
        while v.len() < count {
            let k = v.len();
            v.push(v[k - 1] + v[k - 2]);
        }
        v
    }

    #[test]
    fn identity_bracket_is_zero() {
        let id = Automorphism::identity(3);
        let b = bracket(&id, 5, &[], B);
        assert_eq!((b.lower, b.upper, b.point), (0.0, 0.0, 0.0));
        for k in 1..4 {
            assert_eq!(stretch_upper(&id, k, B).unwrap(), 0.0);
        }
    }

    #[test]
    fn upper_examples() {
        let f = fib();
        assert!((stretch_upper(&f, 1, B).unwrap() - 2f64.ln()).abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for k in [1, 2, 4, 8, 16] {
            let u = stretch_upper(&f, k, B).unwrap();
            assert!(u <= prev + 1e-12);
            assert!(u >= golden_log() - 1e-12);
            prev = u;
        }
        // 16 iterations leave an O(1/k) gap above the limit
        assert!(prev - golden_log() < 0.02);
    }

    #[test]
    fn lower_examples() {
        assert_eq!(stretch_lower(&Automorphism::identity(2)), 0.0);
        assert!((stretch_lower(&fib()) - golden_log()).abs() < 1e-14);
        let parabolic = parse_automorphism("a->ab; b->b | a->aB; b->b").unwrap();
        assert_eq!(stretch_lower(&parabolic), 0.0);
    }

    #[test]
    fn ratio_examples() {
        let f = fib();
        let a = parse_word("a", 2).unwrap().cyclic_reduce();
        let b = parse_word("b", 2).unwrap().cyclic_reduce();
        let est = stretch_ratio(&Automorphism::identity(2), &a, 4, B).unwrap();
        assert_eq!(est.log_ratio, 0.0);
        assert!(est.converged);

        let lens = fibonacci_lengths(14);
        let est_a = stretch_ratio(&f, &a, 12, B).unwrap();
        let oracle = (lens[12] as f64 / lens[11] as f64).ln();
        assert!((est_a.log_ratio - oracle).abs() < 1e-15);
        assert!(est_a.converged);
        let est_b = stretch_ratio(&f, &b, 12, B).unwrap();
        assert!((est_b.log_ratio - golden_log()).abs() < 1e-3);
        assert!(stretch_ratio(&f, &parse_word("1", 2).unwrap().cyclic_reduce(), 4, B).is_err());
    }

    #[test]
    fn fibonacci_bracket_collapses() {
        let b = bracket(&fib(), STANDALONE_K_MAX, &[], B);
        let g = golden_log();
        assert!((b.lower - g).abs() < 1e-12);
        assert!((b.upper - g).abs() < 1e-3, "{b:?}");
        assert!((b.point - g).abs() < 1e-3);
        assert!(b.converged);
        assert_eq!(b.k_used, STANDALONE_K_MAX);
    }

    #[test]
    fn budget_limits_depth() {
        let b = bracket(&fib(), 40, &[], LetterBudget(500));
        assert!(b.k_used < 40);
        assert!(b.lower <= b.upper + 1e-9);
        assert!(stretch_upper(&fib(), 30, LetterBudget(500)).is_err());
    }

    #[test]
    fn explicit_seeds() {
        let seeds = vec![parse_word("ab", 2).unwrap().cyclic_reduce()];
        let b = bracket(&fib(), 12, &seeds, B);
        assert!((b.point - golden_log()).abs() < 1e-3);
    }
}
