//! Lipschitz distances between points of the rose orbit in outer space.
//!
//! The base point `y0` is the unit rose `R` with the identity marking, and
//! `phi.y0 = R.phi^-1`. Every orbit distance reduces to
//!
//! ```text
//! dist(theta) = d(R, R.theta) = log max_{c in candidates} ||theta(c)|| / ||c||
//! ```
//!
//! so `d(phi.y0, psi.y0) = dist(psi^-1 ∘ phi)`. The candidates of the rose are
//! its petals `x_i` and figure-eights `x_i x_j^{±1}` (`i < j`).
//!
//! Gromov products are taken in the metric `(d + d^T) / 2`, i.e. half the
//! symmetrized distance, with base point `y0`.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::free_group::{Automorphism, CyclicWord, Letter, LetterBudget, Word};
use crate::rng::CounterRng;

/// The `N^2` candidate loops of the unit rose.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSet {
    rank: usize,
    loops: Vec<CyclicWord>,
}

impl CandidateSet {
    pub fn new(rank: usize) -> Result<CandidateSet> {
        if !(2..=crate::free_group::MAX_RANK).contains(&rank) {
            return Err(Error::InvalidRank(rank));
        }
        let loops = candidate_letters(rank)
            .map(|letters| {
                Word::from_letters(letters.iter().copied(), rank)
                    .expect("in range")
                    .cyclic_reduce()
            })
            .collect();
        Ok(CandidateSet { rank, loops })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn loops(&self) -> &[CyclicWord] {
        &self.loops
    }

    pub fn len(&self) -> usize {
        self.loops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loops.is_empty()
    }
}

/// Shorthand for [`CandidateSet::new`].
pub fn candidates(rank: usize) -> Result<CandidateSet> {
    CandidateSet::new(rank)
}

/// Petals, then figure-eights `x_i x_j`, `x_i x_j^-1` for `i < j`.
fn candidate_letters(rank: usize) -> impl Iterator<Item = Vec<Letter>> {
    let petals = (1..=rank).map(|i| vec![Letter::new(i, false)]);
    let eights = (1..=rank).flat_map(move |i| {
        (i + 1..=rank).flat_map(move |j| {
            [false, true]
                .into_iter()
                .map(move |inv| vec![Letter::new(i, false), Letter::new(j, inv)])
        })
    });
    petals.chain(eights)
}

/// An exact length ratio `||theta(c)|| / ||c||`. Equality and order are
/// those of the rational number, so `2/2 == 1/1`.
#[derive(Copy, Clone, Debug)]
pub struct StretchRatio {
    pub image_len: u64,
    pub loop_len: u64,
}

impl StretchRatio {
    pub fn ln(&self) -> f64 {
        if self.image_len == self.loop_len {
            return 0.0;
        }
        (self.image_len as f64).ln() - (self.loop_len as f64).ln()
    }

    pub fn is_one(&self) -> bool {
        self.image_len == self.loop_len
    }
}

impl PartialEq for StretchRatio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for StretchRatio {}

impl Ord for StretchRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.image_len as u128 * other.loop_len as u128;
        let r = other.image_len as u128 * self.loop_len as u128;
        l.cmp(&r)
    }
}

impl PartialOrd for StretchRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Largest candidate ratio for `theta`, i.e. `exp(dist(theta))` exactly.
pub fn max_ratio(theta: &Automorphism) -> StretchRatio {
    let mut lengths = theta.lengths();
    candidate_letters(theta.rank())
        .map(|c| StretchRatio {
            image_len: lengths.conjugacy_len(&c) as u64,
            loop_len: c.len() as u64,
        })
        .max()
        .expect("at least one candidate")
}

/// `d(R, R.theta)`; zero exactly when `theta` is a signed permutation.
pub fn dist(theta: &Automorphism) -> f64 {
    max_ratio(theta).ln()
}

/// `d(R_l, R_l.theta)` for the rose with edge lengths `edge_lengths`. The
/// candidate loops of a rose do not depend on its edge lengths.
pub fn dist_weighted(theta: &Automorphism, edge_lengths: &[f64]) -> f64 {
    let weights = theta.image_weights(edge_lengths.to_vec());
    let mut lengths = theta.lengths();
    candidate_letters(theta.rank())
        .map(|c| {
            let loop_len: f64 = c.iter().map(|l| edge_lengths[l.index()]).sum();
            lengths.measure(&c, Some(&weights)).weighted / loop_len
        })
        .fold(f64::NEG_INFINITY, f64::max)
        .ln()
}

/// `dist(outer ∘ inner)` without composing the two automorphisms: each
/// `inner(c)` is materialized, `outer` is applied lazily.
pub fn dist_composite(outer: &Automorphism, inner: &Automorphism, budget: LetterBudget) -> Result<f64> {
    Ok(max_ratio_composite(outer, inner, budget)?.ln())
}

pub fn max_ratio_composite(outer: &Automorphism, inner: &Automorphism, budget: LetterBudget) -> Result<StretchRatio> {
    if outer.rank() != inner.rank() {
        return Err(Error::RankMismatch {
            left: outer.rank(),
            right: inner.rank(),
        });
    }
    let mut best: Option<StretchRatio> = None;
    let mut lengths = outer.lengths();
    for c in candidate_letters(inner.rank()) {
        let mid = inner.apply_letters(&c, budget)?;
        let r = StretchRatio {
            image_len: lengths.conjugacy_len(&mid) as u64,
            loop_len: c.len() as u64,
        };
        best = Some(best.map_or(r, |b| b.max(r)));
    }
    Ok(best.expect("at least one candidate"))
}

/// `dist(theta) + dist(theta^-1)`.
pub fn sym_dist(theta: &Automorphism) -> f64 {
    dist(theta) + dist(&theta.invert())
}

/// `d(phi.y0, psi.y0) = dist(psi^-1 ∘ phi)`.
pub fn orbit_distance(phi: &Automorphism, psi: &Automorphism, budget: LetterBudget) -> Result<f64> {
    dist_composite(&psi.invert(), phi, budget)
}

/// `d^sym(phi.y0, psi.y0)`.
pub fn orbit_sym_distance(phi: &Automorphism, psi: &Automorphism, budget: LetterBudget) -> Result<f64> {
    let psi_inv = psi.invert();
    let phi_inv = phi.invert();
    Ok(dist_composite(&psi_inv, phi, budget)? + dist_composite(&phi_inv, psi, budget)?)
}

/// `(phi.y0 | psi.y0)_{y0}` in the half-symmetrized metric:
/// `1/2 (s(phi^-1) + s(psi^-1) - s(psi^-1 phi))` with `s = sym_dist / 2`.
pub fn gromov_product(phi: &Automorphism, psi: &Automorphism, budget: LetterBudget) -> Result<f64> {
    let to_phi = 0.5 * sym_dist(phi);
    let to_psi = 0.5 * sym_dist(psi);
    let between = 0.5 * orbit_sym_distance(phi, psi, budget)?;
    Ok(0.5 * (to_phi + to_psi - between))
}

/// Lower bound on the highness constant of `theta.y0`: the largest
/// `d^sym(y', y) / d(y', y)` over probe points `y' = probe.y0`. Probes at
/// zero distance are skipped.
pub fn highness_ratio(theta: &Automorphism, probes: &[Automorphism], budget: LetterBudget) -> Result<f64> {
    let theta_inv = theta.invert();
    let mut best: Option<f64> = None;
    for probe in probes {
        let forward = max_ratio_composite(&theta_inv, probe, budget)?;
        if forward.is_one() {
            continue;
        }
        let backward = dist_composite(&probe.invert(), theta, budget)?;
        let ratio = (forward.ln() + backward) / forward.ln();
        best = Some(best.map_or(ratio, |b: f64| b.max(ratio)));
    }
    best.ok_or(Error::NoUsableProbe)
}

/// Finite metric space with labelled points.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSample {
    labels: Vec<String>,
    distances: Vec<Vec<f64>>,
}

/// Tolerance for the ingestion checks.
pub const SAMPLE_TOLERANCE: f64 = 1e-9;

impl FiniteMetricSample {
    pub fn new(labels: Vec<String>, distances: Vec<Vec<f64>>) -> Result<FiniteMetricSample> {
        let n = labels.len();
        if distances.len() != n || distances.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidSample("distance matrix shape does not match labels".into()));
        }
        for i in 0..n {
            if distances[i][i] != 0.0 {
                return Err(Error::InvalidSample(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let d = distances[i][j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidSample(format!("bad distance at ({i},{j})")));
                }
                if (d - distances[j][i]).abs() > SAMPLE_TOLERANCE {
                    return Err(Error::InvalidSample(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if distances[i][k] > distances[i][j] + distances[j][k] + SAMPLE_TOLERANCE {
                        return Err(Error::InvalidSample(format!(
                            "triangle inequality fails on ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetricSample { labels, distances })
    }

    /// Orbit points `phi.y0` under the half-symmetrized Lipschitz metric.
    pub fn from_orbit(points: &[(String, Automorphism)], budget: LetterBudget) -> Result<FiniteMetricSample> {
        let n = points.len();
        let mut distances = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let d = 0.5 * orbit_sym_distance(&points[i].1, &points[j].1, budget)?;
                distances[i][j] = d;
                distances[j][i] = d;
            }
        }
        FiniteMetricSample::new(points.iter().map(|(l, _)| l.clone()).collect(), distances)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[i][j]
    }

    fn gromov(&self, w: usize, x: usize, y: usize) -> f64 {
        0.5 * (self.distances[w][x] + self.distances[w][y] - self.distances[x][y])
    }

    /// Distance matrix as CSV with the labels as row and column headers.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("point");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (l, row) in self.labels.iter().zip(&self.distances) {
            out.push_str(l);
            for d in row {
                let _ = write!(out, ",{d}");
            }
            out.push('\n');
        }
        out
    }
}

/// Result of a four-point hyperbolicity estimate.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct DeltaEstimate {
    pub delta: f64,
    /// Ordered quadruples examined.
    pub quadruples: u64,
    pub exhaustive: bool,
}

/// Sample size up to which [`four_point_delta`] is exhaustive.
pub const EXHAUSTIVE_DELTA_POINTS: usize = 60;
/// Quadruples drawn by [`four_point_delta`] beyond that size.
pub const SAMPLED_DELTA_QUADRUPLES: u64 = 2_000_000;

fn defect(sample: &FiniteMetricSample, w: usize, x: usize, y: usize, z: usize) -> f64 {
    sample.gromov(w, x, z).min(sample.gromov(w, y, z)) - sample.gromov(w, x, y)
}

/// Smallest `delta` with `(x|y)_w >= min((x|z)_w, (y|z)_w) - delta` over all
/// ordered quadruples; exhaustive up to 60 points, sampled beyond.
pub fn four_point_delta(sample: &FiniteMetricSample) -> Result<DeltaEstimate> {
    let n = sample.len();
    if n < 4 {
        return Err(Error::TooFewPoints(n));
    }
    if n > EXHAUSTIVE_DELTA_POINTS {
        return four_point_delta_sampled(sample, SAMPLED_DELTA_QUADRUPLES, 0);
    }
    let mut delta = 0.0f64;
    for w in 0..n {
        for x in 0..n {
            for y in 0..n {
                let base = sample.gromov(w, x, y);
                for z in 0..n {
                    let d = sample.gromov(w, x, z).min(sample.gromov(w, y, z)) - base;
                    delta = delta.max(d);
                }
            }
        }
    }
    Ok(DeltaEstimate {
        delta,
        quadruples: (n as u64).pow(4),
        exhaustive: true,
    })
}

/// Four-point estimate over `quadruples` uniformly drawn ordered quadruples.
pub fn four_point_delta_sampled(sample: &FiniteMetricSample, quadruples: u64, seed: u64) -> Result<DeltaEstimate> {
    let n = sample.len();
    if n < 4 {
        return Err(Error::TooFewPoints(n));
    }
    let rng = CounterRng::new(seed, 0);
    let mut delta = 0.0f64;
    for q in 0..quadruples {
        let pick = |k: u64| rng.below(4 * q + k, n as u64) as usize;
        delta = delta.max(defect(sample, pick(0), pick(1), pick(2), pick(3)));
    }
    Ok(DeltaEstimate {
        delta,
        quadruples,
        exhaustive: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::{elementary, parse_automorphism};

    fn aut(s: &str) -> Automorphism {
        parse_automorphism(s).unwrap()
    }

    const LN2: f64 = std::f64::consts::LN_2;
    const B: LetterBudget = LetterBudget::DEFAULT;

    #[test]
    fn candidate_sets() {
        let c2 = candidates(2).unwrap();
        let names: Vec<String> = c2.loops().iter().map(|c| c.to_string()).collect();
        assert_eq!(names, ["a", "b", "ab", "aB"]);
        assert_eq!(candidates(3).unwrap().len(), 9);
        assert!(candidates(1).is_err());
        for n in 2..=6 {
            let c = candidates(n).unwrap();
            assert_eq!(c.len(), n * n);
            assert!(c.loops().iter().all(|l| l.len() <= 2));
        }
    }

    #[test]
    fn ratios_compare_as_rationals() {
        let r = |image_len, loop_len| StretchRatio { image_len, loop_len };
        assert_eq!(r(2, 2), r(1, 1));
        assert_eq!(r(6, 4), r(3, 2));
        assert!(r(5, 4) < r(3, 2));
        assert!(r(4, 4).is_one());
    }

    #[test]
    fn dist_examples() {
        assert_eq!(dist(&Automorphism::identity(2)), 0.0);
        let t = aut("a->ab; b->b | a->aB; b->b");
        assert!((dist(&t) - LN2).abs() < 1e-15);
        assert!((dist(&t.invert()) - LN2).abs() < 1e-15);
        assert!((sym_dist(&t) - 2.0 * LN2).abs() < 1e-15);
        assert_eq!(max_ratio(&t), StretchRatio { image_len: 2, loop_len: 1 });
    }

    #[test]
    fn composite_matches_composition() {
        let f = aut("a->ab; b->a | a->b; b->Ba");
        let t = aut("a->ab; b->b | a->aB; b->b");
        let direct = dist(&f.compose(&t).unwrap());
        assert_eq!(dist_composite(&f, &t, B).unwrap(), direct);
    }

    #[test]
    fn sym_dist_is_symmetric() {
        let f = aut("a->ab; b->a | a->b; b->Ba");
        assert_eq!(sym_dist(&f), sym_dist(&f.invert()));
    }

    #[test]
    fn gromov_product_examples() {
        let id = Automorphism::identity(2);
        let f = aut("a->ab; b->a | a->b; b->Ba");
        let t = aut("a->ab; b->b | a->aB; b->b");
        assert_eq!(gromov_product(&id, &f, B).unwrap(), 0.0);
        let self_product = gromov_product(&f, &f, B).unwrap();
        assert!((self_product - 0.5 * sym_dist(&f)).abs() < 1e-12);
        assert!(gromov_product(&f, &t, B).unwrap() >= -1e-12);
    }

    #[test]
    fn highness_examples() {
        let id = Automorphism::identity(2);
        let t = aut("a->ab; b->b | a->aB; b->b");
        assert!((highness_ratio(&id, std::slice::from_ref(&t), B).unwrap() - 2.0).abs() < 1e-12);
        let sigma = elementary::permutation(&[1, 0]).unwrap();
        let probe = t.compose(&sigma).unwrap();
        assert_eq!(highness_ratio(&t, &[probe], B), Err(Error::NoUsableProbe));
    }

    #[test]
    fn weighted_dist_reaches_the_stretch_factor_on_the_eigenmetric() {
        let f = aut("a->ab; b->a | a->b; b->Ba");
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((dist_weighted(&f, &[1.0, 1.0]) - dist(&f)).abs() < 1e-12);
        assert!((dist_weighted(&f, &[golden, 1.0]) - golden.ln()).abs() < 1e-12);
    }

    fn line_sample() -> FiniteMetricSample {
        let pts = [0.0f64, 1.0, 2.0, 3.0];
        let d = pts.iter().map(|a| pts.iter().map(|b| (a - b).abs()).collect()).collect();
        FiniteMetricSample::new((0..4).map(|i| i.to_string()).collect(), d).unwrap()
    }

    /// Corners of the unit square with the l1 metric.
    fn square_sample() -> FiniteMetricSample {
        let pts = [(0.0f64, 0.0f64), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        let d = pts
            .iter()
            .map(|a| pts.iter().map(|b| (a.0 - b.0).abs() + (a.1 - b.1).abs()).collect())
            .collect();
        FiniteMetricSample::new((0..4).map(|i| i.to_string()).collect(), d).unwrap()
    }

    /// Brute force straight from the definition of hyperbolicity, one
    /// quadruple at a time with freshly computed Gromov products.
    fn delta_by_definition(s: &FiniteMetricSample) -> f64 {
        let n = s.len();
        let g = |w: usize, x: usize, y: usize| 0.5 * (s.distance(w, x) + s.distance(w, y) - s.distance(x, y));
        let mut best = 0.0f64;
        for w in 0..n {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        best = best.max(g(w, x, z).min(g(w, y, z)) - g(w, x, y));
                    }
                }
            }
        }
        best
    }

    #[test]
    fn four_point_examples() {
        assert_eq!(four_point_delta(&line_sample()).unwrap().delta, 0.0);
        let sq = square_sample();
        let est = four_point_delta(&sq).unwrap();
        assert_eq!(est.delta, delta_by_definition(&sq));
        assert_eq!(est.delta, 1.0);
        assert!(est.exhaustive);
        let three = FiniteMetricSample::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]],
        )
        .unwrap();
        assert_eq!(four_point_delta(&three), Err(Error::TooFewPoints(3)));
    }

    #[test]
    fn sampled_delta_never_exceeds_exhaustive() {
        let sq = square_sample();
        let s = four_point_delta_sampled(&sq, 1000, 7).unwrap();
        assert!(s.delta <= 1.0 && !s.exhaustive);
        assert_eq!(s.delta, 1.0); // 1000 draws hit a worst quadruple
    }

    #[test]
    fn sample_validation() {
        let bad = FiniteMetricSample::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]],
        );
        assert!(matches!(bad, Err(Error::InvalidSample(_))));
        let asym = FiniteMetricSample::new(
            vec!["x".into(), "y".into()],
            vec![vec![0.0, 1.0], vec![2.0, 0.0]],
        );
        assert!(asym.is_err());
    }

    #[test]
    fn orbit_sample_csv() {
        let pts = vec![
            ("y0".to_string(), Automorphism::identity(2)),
            ("t".to_string(), aut("a->ab; b->b | a->aB; b->b")),
        ];
        let s = FiniteMetricSample::from_orbit(&pts, B).unwrap();
        let csv = s.to_csv();
        assert!(csv.starts_with("point,y0,t\n"));
        assert!((s.distance(0, 1) - LN2).abs() < 1e-15);
    }
}
