use std::fmt;

use super::image::{substitute, ImageLengths, ImageWeights, LetterBudget};
use super::word::{check_rank, Letter, Word};
use crate::error::{Error, Result};
use crate::matrix_oracle::IntMatrix;

/// Total image size above which debug builds skip the per-composition
/// inverse certificate (the check is quadratic in the image size).
const DEBUG_CHECK_LIMIT: usize = 4_096;

/// An automorphism of `F_N`, stored as the images of the generators together
/// with the images of the generators under its inverse.
///
/// Composition is `compose(phi, psi) = phi ∘ psi` (apply `psi` first).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Automorphism {
    rank: usize,
    images: Vec<Word>,
    inverse_images: Vec<Word>,
}

impl Automorphism {
    /// Builds an automorphism and verifies the supplied inverse on every
    /// generator, in both directions.
    pub fn new(images: Vec<Word>, inverse_images: Vec<Word>) -> Result<Automorphism> {
        let rank = images.len();
        check_rank(rank)?;
        if inverse_images.len() != rank {
            return Err(Error::RankMismatch {
                left: rank,
                right: inverse_images.len(),
            });
        }
        for w in images.iter().chain(&inverse_images) {
            if w.rank() != rank {
                return Err(Error::RankMismatch {
                    left: rank,
                    right: w.rank(),
                });
            }
        }
        for (i, w) in images.iter().chain(&inverse_images).enumerate() {
            if w.is_empty() {
                return Err(Error::EmptyImage(Letter::new(i % rank + 1, false).to_char()));
            }
        }
        let phi = Automorphism {
            rank,
            images,
            inverse_images,
        };
        phi.verify_inverse()?;
        Ok(phi)
    }

    pub(crate) fn from_parts_unchecked(images: Vec<Word>, inverse_images: Vec<Word>) -> Automorphism {
        Automorphism {
            rank: images.len(),
            images,
            inverse_images,
        }
    }

    pub fn identity(rank: usize) -> Automorphism {
        let gens: Vec<Word> = (1..=rank)
            .map(|i| Word::from_reduced_unchecked(vec![Letter::new(i, false)], rank))
            .collect();
        Automorphism {
            rank,
            images: gens.clone(),
            inverse_images: gens,
        }
    }

    /// Checks `phi^-1(phi(x_i)) = x_i` and `phi(phi^-1(x_i)) = x_i` for all `i`.
    pub fn verify_inverse(&self) -> Result<()> {
        for i in 0..self.rank {
            let x = Letter::new(i + 1, false);
            let there = substitute(&self.images, &[x], LetterBudget::UNLIMITED)?;
            let back = substitute(&self.inverse_images, &there, LetterBudget::UNLIMITED)?;
            let forth = substitute(&self.inverse_images, &[x], LetterBudget::UNLIMITED)?;
            let again = substitute(&self.images, &forth, LetterBudget::UNLIMITED)?;
            for got in [back, again] {
                if got != [x] {
                    return Err(Error::InverseCheck {
                        generator: x.to_char(),
                        got: Word::from_reduced_unchecked(got, self.rank).to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn inverse_images(&self) -> &[Word] {
        &self.inverse_images
    }

    pub fn max_image_len(&self) -> usize {
        self.images.iter().map(Word::len).max().unwrap_or(0)
    }

    /// Sum of the image lengths.
    pub fn size(&self) -> usize {
        self.images.iter().map(Word::len).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| w.letters() == [Letter::new(i + 1, false)])
    }

    fn check_word_rank(&self, w_rank: usize) -> Result<()> {
        if w_rank != self.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: w_rank,
            });
        }
        Ok(())
    }

    /// Reduced image `phi(w)`.
    pub fn apply(&self, w: &Word) -> Result<Word> {
        self.apply_with_budget(w, LetterBudget::DEFAULT)
    }

    pub fn apply_with_budget(&self, w: &Word, budget: LetterBudget) -> Result<Word> {
        self.check_word_rank(w.rank())?;
        let out = substitute(&self.images, w.letters(), budget)?;
        Ok(Word::from_reduced_unchecked(out, self.rank))
    }

    pub(crate) fn apply_letters(&self, w: &[Letter], budget: LetterBudget) -> Result<Vec<Letter>> {
        substitute(&self.images, w, budget)
    }

    /// `||phi(w)||` without building `phi(w)`.
    pub fn image_conjugacy_len(&self, w: &[Letter]) -> usize {
        self.lengths().conjugacy_len(w)
    }

    /// Lazy length measurements that share state across many words.
    pub fn lengths(&self) -> ImageLengths<'_> {
        ImageLengths::new(&self.images)
    }

    /// Weighted image lengths for the rose with the given edge lengths.
    pub fn image_weights(&self, edge_lengths: Vec<f64>) -> ImageWeights {
        assert_eq!(edge_lengths.len(), self.rank);
        ImageWeights::new(&self.images, edge_lengths)
    }

    /// `phi ∘ psi`.
    pub fn compose(&self, psi: &Automorphism) -> Result<Automorphism> {
        self.compose_with_budget(psi, LetterBudget::DEFAULT)
    }

    pub fn compose_with_budget(&self, psi: &Automorphism, budget: LetterBudget) -> Result<Automorphism> {
        if self.rank != psi.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: psi.rank,
            });
        }
        let images = compose_images(&self.images, &psi.images, budget, self.rank)?;
        let inverse_images = compose_images(&psi.inverse_images, &self.inverse_images, budget, self.rank)?;
        let out = Automorphism {
            rank: self.rank,
            images,
            inverse_images,
        };
        if cfg!(debug_assertions) && out.size() + out.inverse_size() <= DEBUG_CHECK_LIMIT {
            out.verify_inverse()
                .expect("composition broke the inverse certificate");
        }
        Ok(out)
    }

    fn inverse_size(&self) -> usize {
        self.inverse_images.iter().map(Word::len).sum()
    }

    /// Swaps images and inverse images.
    pub fn invert(&self) -> Automorphism {
        Automorphism {
            rank: self.rank,
            images: self.inverse_images.clone(),
            inverse_images: self.images.clone(),
        }
    }

    pub fn into_inverse(self) -> Automorphism {
        Automorphism {
            rank: self.rank,
            images: self.inverse_images,
            inverse_images: self.images,
        }
    }

    /// `phi^k` for `k >= 0`.
    pub fn power(&self, k: u32, budget: LetterBudget) -> Result<Automorphism> {
        let mut acc = Automorphism::identity(self.rank);
        for _ in 0..k {
            acc = acc.compose_with_budget(self, budget)?;
        }
        Ok(acc)
    }

    /// Signed letter counts: row `i` is the abelianized image of `x_i`.
    ///
    /// With this row convention `abelianization(phi ∘ psi) =
    /// abelianization(psi) * abelianization(phi)`.
    pub fn abelianization(&self) -> IntMatrix {
        let n = self.rank;
        let mut rows = vec![vec![0i64; n]; n];
        for (i, w) in self.images.iter().enumerate() {
            for l in w.letters() {
                rows[i][l.index()] += if l.is_inverse() { -1 } else { 1 };
            }
        }
        IntMatrix::from_rows_i64(&rows).expect("square by construction")
    }

    /// Unsigned letter counts: entry `(i, j)` counts `x_j^{±1}` in the image of `x_i`.
    pub fn transition_counts(&self) -> Vec<Vec<f64>> {
        let n = self.rank;
        let mut rows = vec![vec![0.0; n]; n];
        for (i, w) in self.images.iter().enumerate() {
            for l in w.letters() {
                rows[i][l.index()] += 1.0;
            }
        }
        rows
    }

    /// Whether the automorphism maps each generator to a generator or its inverse.
    /// Whether `phi` is a signed permutation composed with an inner
    /// automorphism, i.e. whether its outer class fixes the unit rose.
    pub fn is_signed_permutation_mod_inner(&self) -> bool {
        let first = &self.images[0];
        let core = first.cyclic_reduce();
        if core.len() != 1 {
            return false;
        }
        // first = u l u^-1, and any conjugator g with g^-1 first g a letter
        // is u l^k; |g| is bounded by the longest image
        let u = Word::from_reduced_unchecked(first.letters()[..(first.len() - 1) / 2].to_vec(), self.rank);
        let l = core.to_word();
        let bound = self.max_image_len() as i64;
        (-bound..=bound).any(|k| {
            let mut g = u.clone();
            let step = if k < 0 { l.inverse() } else { l.clone() };
            for _ in 0..k.unsigned_abs() {
                g = g.mul(&step).expect("same rank");
            }
            let g_inv = g.inverse();
            let twisted: Vec<Word> = self
                .images
                .iter()
                .map(|w| w.conjugate_by(&g_inv).expect("same rank"))
                .collect();
            Automorphism::from_parts_unchecked(twisted, self.inverse_images.clone()).is_signed_permutation()
        })
    }

    pub fn is_signed_permutation(&self) -> bool {
        let mut seen = vec![false; self.rank];
        for w in &self.images {
            if w.len() != 1 {
                return false;
            }
            let g = w.letters()[0].index();
            if seen[g] {
                return false;
            }
            seen[g] = true;
        }
        true
    }
}

fn compose_images(outer: &[Word], inner: &[Word], budget: LetterBudget, rank: usize) -> Result<Vec<Word>> {
    let mut total = 0usize;
    let mut out = Vec::with_capacity(inner.len());
    for w in inner {
        let remaining = LetterBudget(budget.0.saturating_sub(total));
        let img = substitute(outer, w.letters(), remaining)
            .map_err(|_| Error::WordBudgetExceeded { budget: budget.0 })?;
        total += img.len();
        out.push(Word::from_reduced_unchecked(img, rank));
    }
    Ok(out)
}

fn write_images(f: &mut fmt::Formatter<'_>, images: &[Word]) -> fmt::Result {
    for (i, w) in images.iter().enumerate() {
        if i > 0 {
            f.write_str("; ")?;
        }
        write!(f, "{}->{}", Letter::new(i + 1, false).to_char(), w)?;
    }
    Ok(())
}

/// Prints in the parser grammar: `a->ab; b->a | a->b; b->Ba`.
impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_images(f, &self.images)?;
        f.write_str(" | ")?;
        write_images(f, &self.inverse_images)
    }
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.size() > 200 {
            return write!(f, "Automorphism(rank {}, {} letters)", self.rank, self.size());
        }
        write!(f, "Automorphism({self})")
    }
}
