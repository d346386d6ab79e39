//! Substitution of generator images into words.
//!
//! Two flavours: [`substitute`] materializes the reduced image, while
//! [`image_length`] only tracks the reduced image as a stack of borrowed
//! slices of the generator images, so it can measure `||phi(w)||` when the
//! image itself would be far too large to store.

use super::word::{Letter, Word};
#[cfg(test)]
use super::word::push_reduced;
use crate::error::{Error, Result};

/// Maximum number of letters any single word (or set of images) may hold.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct LetterBudget(pub usize);

impl LetterBudget {
    pub const DEFAULT: LetterBudget = LetterBudget(100_000_000);
    pub const UNLIMITED: LetterBudget = LetterBudget(usize::MAX);
}

impl Default for LetterBudget {
    fn default() -> Self {
        LetterBudget::DEFAULT
    }
}

/// A reduced word given as a slice `image[start..end]` of a generator image,
/// read forwards or as its formal inverse.
#[derive(Copy, Clone)]
pub(crate) struct Piece<'a> {
    image: &'a [Letter],
    gen: usize,
    start: usize,
    end: usize,
    inverted: bool,
}

impl<'a> Piece<'a> {
    #[inline]
    pub(crate) fn of(images: &'a [Word], letter: Letter) -> Piece<'a> {
        let image = images[letter.index()].letters();
        Piece {
            image,
            gen: letter.index(),
            start: 0,
            end: image.len(),
            inverted: letter.is_inverse(),
        }
    }

    #[inline]
    fn len(&self) -> usize {
        self.end - self.start
    }

    #[inline]
    fn letters(&self) -> &'a [Letter] {
        &self.image[self.start..self.end]
    }

    #[inline]
    fn first(&self) -> Letter {
        if self.inverted {
            self.image[self.end - 1].inverse()
        } else {
            self.image[self.start]
        }
    }

    #[inline]
    fn drop_first(&mut self, k: usize) {
        if self.inverted {
            self.end -= k;
        } else {
            self.start += k;
        }
    }

    #[inline]
    fn drop_last(&mut self, k: usize) {
        if self.inverted {
            self.start += k;
        } else {
            self.end -= k;
        }
    }

    /// The piece read from its first letter.
    #[inline]
    fn forward(&self) -> Read {
        if self.inverted {
            Read::new(self.gen, true, self.image.len() - self.end)
        } else {
            Read::new(self.gen, false, self.start)
        }
    }

    /// The inverse of the piece, i.e. its letters from the last one
    /// backwards, each inverted. A suffix of the piece cancels against a
    /// following word exactly when this read is a prefix of that word.
    #[inline]
    fn backward(&self) -> Read {
        if self.inverted {
            Read::new(self.gen, false, self.start)
        } else {
            Read::new(self.gen, true, self.image.len() - self.end)
        }
    }

    fn extend_into(&self, out: &mut Vec<Letter>) {
        if self.inverted {
            out.extend(self.letters().iter().rev().map(|l| l.inverse()));
        } else {
            out.extend_from_slice(self.letters());
        }
    }
}

/// A position in the image of generator `gen` (`reversed == false`) or in
/// the inverse of that image (`reversed == true`).
#[derive(Copy, Clone)]
struct Read {
    gen: usize,
    reversed: bool,
    pos: usize,
}

impl Read {
    #[inline]
    fn new(gen: usize, reversed: bool, pos: usize) -> Read {
        Read { gen, reversed, pos }
    }

    #[inline]
    fn letter(&self, images: &[Word], i: usize) -> Letter {
        let w = images[self.gen].letters();
        if self.reversed {
            w[w.len() - 1 - self.pos - i].inverse()
        } else {
            w[self.pos + i]
        }
    }
}

/// Letters compared one by one before a long-match search.
const DIRECT_MATCH: usize = 16;

const MODULUS: u64 = (1 << 61) - 1;
const BASES: [u64; 2] = [0x1f3d_5b79_a2c4_e6f1 % MODULUS, 0x0a5c_3e71_9b2d_f483 % MODULUS];

#[inline]
fn mul_mod(a: u64, b: u64) -> u64 {
    let p = a as u128 * b as u128;
    let r = (p & MODULUS as u128) as u64 + (p >> 61) as u64;
    if r >= MODULUS {
        r - MODULUS
    } else {
        r
    }
}

/// Prefix hashes of images and their inverses for two polynomial bases
/// modulo `2^61 - 1`, extended on demand as far as matches reach.
struct Fingerprints {
    /// `powers[i][base]`
    powers: Vec<[u64; 2]>,
    /// `prefix[gen][reversed][i][base]` hashes the first `i` letters.
    prefix: Vec<[Option<Vec<[u64; 2]>>; 2]>,
}

impl Fingerprints {
    fn new(images: &[Word]) -> Fingerprints {
        Fingerprints {
            powers: vec![[1, 1]],
            prefix: vec![[None, None]; images.len()],
        }
    }

    /// Makes `powers` cover every length up to `len`.
    fn ensure_powers(&mut self, len: usize) {
        while self.powers.len() <= len {
            let x = *self.powers.last().unwrap();
            self.powers.push([mul_mod(x[0], BASES[0]), mul_mod(x[1], BASES[1])]);
        }
    }

    /// Extends the prefix hashes of the orientation read by `r` so that they
    /// cover its first `upto` letters.
    fn ensure(&mut self, images: &[Word], r: Read, upto: usize) {
        let h = self.prefix[r.gen][r.reversed as usize].get_or_insert_with(|| vec![[0, 0]]);
        if h.len() > upto {
            return;
        }
        let w = images[r.gen].letters();
        let n = w.len();
        let mut acc = *h.last().unwrap();
        h.reserve(upto + 1 - h.len());
        for i in h.len() - 1..upto {
            let l = if r.reversed { w[n - 1 - i].inverse() } else { w[i] };
            let code = (l.signed() as i64 + 64) as u64;
            for (a, b) in acc.iter_mut().zip(BASES) {
                *a = mul_mod(*a, b) + code;
                if *a >= MODULUS {
                    *a -= MODULUS;
                }
            }
            h.push(acc);
        }
    }

    #[inline]
    fn hash(&self, r: Read, offset: usize, len: usize) -> [u64; 2] {
        let h = self.prefix[r.gen][r.reversed as usize]
            .as_ref()
            .expect("fingerprints built before use");
        let (i, j) = (r.pos + offset, r.pos + offset + len);
        let mut out = [0u64; 2];
        for base in 0..2 {
            let sub = mul_mod(h[i][base], self.powers[len][base]);
            out[base] = if h[j][base] >= sub {
                h[j][base] - sub
            } else {
                h[j][base] + MODULUS - sub
            };
        }
        out
    }

    #[inline]
    fn equal(&self, a: Read, b: Read, offset: usize, len: usize) -> bool {
        self.hash(a, offset, len) == self.hash(b, offset, len)
    }
}

/// Longest common prefixes of reads: letter by letter up to [`DIRECT_MATCH`],
/// then by block scans or fingerprint search. A fingerprint match
/// is a double 61-bit polynomial hash agreement; a false match needs both
/// hashes of distinct strings to collide.
struct Matcher<'a> {
    images: &'a [Word],
    /// Inverses of the images, copied on first use by a reversed read.
    inverses: Vec<Option<Vec<Letter>>>,
    /// Letters still allowed for direct comparison of long matches. Direct
    /// scans are much cheaper per letter than fingerprints but are not
    /// reused, so once this allowance is spent every long match goes
    /// through fingerprints and the total work stays linear in the images.
    direct_allowance: usize,
    fingerprints: Option<Fingerprints>,
}

/// Direct-comparison allowance as a multiple of the total image length.
const DIRECT_ALLOWANCE_FACTOR: usize = 8;

impl<'a> Matcher<'a> {
    fn new(images: &'a [Word]) -> Matcher<'a> {
        let total: usize = images.iter().map(Word::len).sum();
        Matcher {
            images,
            inverses: vec![None; images.len()],
            direct_allowance: DIRECT_ALLOWANCE_FACTOR * total + 1024,
            fingerprints: None,
        }
    }

    fn ensure_inverse(&mut self, r: Read) {
        if r.reversed && self.inverses[r.gen].is_none() {
            let w = self.images[r.gen].letters();
            self.inverses[r.gen] = Some(w.iter().rev().map(|l| l.inverse()).collect());
        }
    }

    /// The letters seen by `r`, from its current position on.
    fn view(&self, r: Read) -> &[Letter] {
        if r.reversed {
            &self.inverses[r.gen].as_ref().expect("inverse copied before use")[r.pos..]
        } else {
            &self.images[r.gen].letters()[r.pos..]
        }
    }

    /// Common prefix by direct scan, or `None` once the allowance is spent.
    fn direct_prefix(&mut self, a: Read, b: Read, from: usize, max: usize) -> Option<usize> {
        let copies: usize = [a, b]
            .iter()
            .filter(|r| r.reversed && self.inverses[r.gen].is_none())
            .map(|r| self.images[r.gen].len())
            .sum();
        if max - from + copies > self.direct_allowance {
            return None;
        }
        self.ensure_inverse(a);
        self.ensure_inverse(b);
        let k = from + slice_prefix(&self.view(a)[from..max], &self.view(b)[from..max]);
        self.direct_allowance -= k - from + copies;
        Some(k)
    }

    /// Length of the common prefix of `a` and `b`, capped at `max`.
    fn common_prefix(&mut self, a: Read, b: Read, max: usize) -> usize {
        let direct = max.min(DIRECT_MATCH);
        for i in 0..direct {
            if a.letter(self.images, i) != b.letter(self.images, i) {
                return i;
            }
        }
        if direct == max {
            return max;
        }
        if let Some(k) = self.direct_prefix(a, b, direct, max) {
            return k;
        }
        let images = self.images;
        let fp = self.fingerprints.get_or_insert_with(|| Fingerprints::new(images));
        // gallop then bisect; the prefix of length `lo` is known to match
        let mut lo = direct;
        let mut step = DIRECT_MATCH;
        let mut hi = loop {
            let probe = (lo + step).min(max);
            fp.ensure_powers(probe - lo);
            fp.ensure(images, a, a.pos + probe);
            fp.ensure(images, b, b.pos + probe);
            if !fp.equal(a, b, lo, probe - lo) {
                break probe;
            }
            lo = probe;
            if lo == max {
                return max;
            }
            step *= 2;
        };
        // invariant: prefix `lo` matches, prefix `hi` does not
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if fp.equal(a, b, lo, mid - lo) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

/// Length of the common prefix of two slices, compared in blocks.
fn slice_prefix(a: &[Letter], b: &[Letter]) -> usize {
    const BLOCK: usize = 64;
    let n = a.len().min(b.len());
    let mut i = 0;
    while i + BLOCK <= n && a[i..i + BLOCK] == b[i..i + BLOCK] {
        i += BLOCK;
    }
    while i < n && a[i] == b[i] {
        i += 1;
    }
    i
}

/// Reduced `phi(w)` where `images[i]` is the image of generator `i`.
pub(crate) fn substitute(images: &[Word], w: &[Letter], budget: LetterBudget) -> Result<Vec<Letter>> {
    let mut out: Vec<Letter> = Vec::new();
    for &letter in w {
        let mut piece = Piece::of(images, letter);
        while piece.len() > 0 && out.last() == Some(&piece.first().inverse()) {
            out.pop();
            piece.drop_first(1);
        }
        if out.len() + piece.len() > budget.0 {
            return Err(Error::WordBudgetExceeded { budget: budget.0 });
        }
        piece.extend_into(&mut out);
    }
    debug_assert!(out.windows(2).all(|p| p[0] != p[1].inverse()));
    Ok(out)
}

/// Letter-by-letter reference substitution; used to cross-check the fast path.
#[cfg(test)]
pub(crate) fn substitute_naive(images: &[Word], w: &[Letter]) -> Vec<Letter> {
    let mut out = Vec::new();
    for &letter in w {
        let img = images[letter.index()].letters();
        if letter.is_inverse() {
            for &l in img.iter().rev() {
                push_reduced(&mut out, l.inverse());
            }
        } else {
            for &l in img {
                push_reduced(&mut out, l);
            }
        }
    }
    out
}

/// Edge lengths of a metric rose together with the weighted lengths of the
/// generator images they induce.
#[derive(Clone, Debug)]
pub struct ImageWeights {
    letter: Vec<f64>,
    /// `prefix[gen][i]`: weighted length of the first `i` letters of the image.
    prefix: Vec<Vec<f64>>,
}

impl ImageWeights {
    pub(crate) fn new(images: &[Word], letter: Vec<f64>) -> ImageWeights {
        let prefix = images
            .iter()
            .map(|w| {
                let mut acc = 0.0;
                let mut p = Vec::with_capacity(w.len() + 1);
                p.push(acc);
                for l in w.letters() {
                    acc += letter[l.index()];
                    p.push(acc);
                }
                p
            })
            .collect();
        ImageWeights { letter, prefix }
    }

    pub fn edge_lengths(&self) -> &[f64] {
        &self.letter
    }

    #[inline]
    fn of_piece(&self, p: &Piece<'_>) -> f64 {
        let pre = &self.prefix[p.gen];
        pre[p.end] - pre[p.start]
    }
}

/// Lengths of the cyclically reduced image of a word.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ImageLength {
    /// Number of letters of the cyclically reduced image.
    pub letters: usize,
    /// Weighted length (equal to `letters` when no weights were given).
    pub weighted: f64,
}

/// `||phi(w)||` (cyclic length) without materializing `phi(w)`.
#[cfg(test)]
pub(crate) fn image_length(images: &[Word], w: &[Letter], weights: Option<&ImageWeights>) -> ImageLength {
    ImageLengths::new(images).measure(w, weights)
}

/// As [`image_length`], with every match beyond the first letters resolved
/// by fingerprints.
#[cfg(test)]
pub(crate) fn image_length_fingerprinted(images: &[Word], w: &[Letter], weights: Option<&ImageWeights>) -> ImageLength {
    let mut lengths = ImageLengths::new(images);
    lengths.matcher.direct_allowance = 0;
    lengths.measure(w, weights)
}

/// Repeated lazy length measurements under one automorphism, sharing the
/// image fingerprints between calls.
///
/// Memory is proportional to `|w|` plus the image size. Long matches are
/// scanned directly until a scan allowance proportional to the image size
/// is used up; after that each junction between consecutive pieces costs
/// `O(log L)` for images of length `L`, whatever the amount of cancellation. With `weights`, every letter of
/// generator `i` counts its edge length in the weighted length.
pub struct ImageLengths<'a> {
    images: &'a [Word],
    matcher: Matcher<'a>,
}

impl<'a> ImageLengths<'a> {
    pub(crate) fn new(images: &'a [Word]) -> ImageLengths<'a> {
        ImageLengths {
            images,
            matcher: Matcher::new(images),
        }
    }

    /// `||phi(w)||`.
    pub fn conjugacy_len(&mut self, w: &[Letter]) -> usize {
        self.measure(w, None).letters
    }

    pub fn measure(&mut self, w: &[Letter], weights: Option<&ImageWeights>) -> ImageLength {
        let images = self.images;
        let matcher = &mut self.matcher;
        let mut stack: Vec<Piece<'_>> = Vec::with_capacity(w.len());
        let mut total = 0usize;
        for &letter in w {
            let mut piece = Piece::of(images, letter);
            total += piece.len();
            while piece.len() > 0 {
                let Some(top) = stack.last_mut() else { break };
                let k = matcher.common_prefix(top.backward(), piece.forward(), top.len().min(piece.len()));
                if k == 0 {
                    break;
                }
                top.drop_last(k);
                piece.drop_first(k);
                total -= 2 * k;
                if top.len() == 0 {
                    stack.pop();
                }
            }
            if piece.len() > 0 {
                stack.push(piece);
            }
        }

        // peel matched ends for the cyclic reduction
        let (mut lo, mut hi) = (0usize, stack.len().saturating_sub(1));
        while total >= 2 {
            let k = if lo == hi {
                let p = stack[lo];
                matcher.common_prefix(p.forward(), p.backward(), p.len() / 2)
            } else {
                let max = stack[lo].len().min(stack[hi].len());
                matcher.common_prefix(stack[lo].forward(), stack[hi].backward(), max)
            };
            if k == 0 {
                break;
            }
            stack[lo].drop_first(k);
            stack[hi].drop_last(k);
            total -= 2 * k;
            if stack[lo].len() == 0 {
                lo += 1;
            }
            if stack[hi].len() == 0 {
                hi = hi.saturating_sub(1);
            }
        }

        let weighted = match weights {
            Some(wt) if total > 0 => stack[lo..=hi].iter().map(|p| wt.of_piece(p)).sum(),
            Some(_) => 0.0,
            None => total as f64,
        };
        ImageLength {
            letters: total,
            weighted,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::parse_word;

    #[test]
    fn fast_substitution_matches_naive() {
        // not an automorphism; only the substitution is exercised here
        let images: Vec<Word> = ["abC", "cA", "Bc"]
            .iter()
            .map(|s| parse_word(s, 3).unwrap())
            .collect();
        for s in ["abc", "CBA", "aCbBca", "cAAb", "1"] {
            let w = parse_word(s, 3).unwrap();
            let fast = substitute(&images, w.letters(), LetterBudget::UNLIMITED).unwrap();
            assert_eq!(fast, substitute_naive(&images, w.letters()), "{s}");
        }
    }

    #[test]
    fn lazy_length_matches_materialized() {
        let images: Vec<Word> = ["abC", "cA", "Bc"]
            .iter()
            .map(|s| parse_word(s, 3).unwrap())
            .collect();
        for s in ["abc", "CBA", "aCbBca", "cAAb", "ab", "aB", "bcA"] {
            let w = parse_word(s, 3).unwrap();
            let full = Word::from_letters(substitute_naive(&images, w.letters()), 3).unwrap();
            let lazy = image_length(&images, w.letters(), None);
            assert_eq!(lazy.letters, full.conjugacy_len(), "{s}");
        }
    }

    #[test]
    fn long_cancellations_match_materialized_lengths() {
        use crate::free_group::elementary::nielsen_generators;
        use crate::free_group::Automorphism;
        use crate::rng::CounterRng;

        let weights = [0.7, 1.3, 0.2];
        for seed in 0..4u64 {
            let rng = CounterRng::new(seed, 0);
            let gens = nielsen_generators(3);
            let mut phi = Automorphism::identity(3);
            for k in 0..40 {
                phi = phi.compose(&gens[rng.below(k, gens.len() as u64) as usize]).unwrap();
            }
            let theta = phi.invert();
            for (outer, inner) in [(&theta, &phi), (&theta, &theta), (&phi, &phi)] {
                let wts = ImageWeights::new(outer.images(), weights.to_vec());
                for k in 0..20u64 {
                    let len = 1 + rng.below(1000 + k, 4);
                    let raw = (0..len).map(|j| {
                        let v = rng.below(2000 + 8 * k + j, 6) as i64;
                        if v < 3 { v + 1 } else { 2 - v }
                    });
                    let short = Word::reduce(raw, 3).unwrap();
                    let mid = substitute(inner.images(), short.letters(), LetterBudget::UNLIMITED).unwrap();
                    let full = substitute_naive(outer.images(), &mid);
                    let full = Word::from_letters(full, 3).unwrap().cyclic_reduce();
                    let direct: f64 = full.letters().iter().map(|l| weights[l.index()]).sum();
                    for lazy in [
                        image_length(outer.images(), &mid, Some(&wts)),
                        image_length_fingerprinted(outer.images(), &mid, Some(&wts)),
                    ] {
                        assert_eq!(lazy.letters, full.len(), "seed {seed} word {short}");
                        assert!((lazy.weighted - direct).abs() < 1e-9 * direct.max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let images = vec![parse_word("aaaa", 1).unwrap()];
        let w = parse_word("aaa", 1).unwrap();
        assert!(matches!(
            substitute(&images, w.letters(), LetterBudget(11)),
            Err(Error::WordBudgetExceeded { budget: 11 })
        ));
        assert_eq!(substitute(&images, w.letters(), LetterBudget(12)).unwrap().len(), 12);
    }
}
