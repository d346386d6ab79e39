//! Elementary automorphisms with closed-form inverses: Nielsen
//! transvections, generator permutations and generator inversions. Products
//! of these build measures without hand-written inverses.
//!
//! Generator indices here are 0-based.

use super::automorphism::Automorphism;
use super::word::{check_rank, Letter, Word};
use crate::error::{Error, Result};

fn gen_word(rank: usize, i: usize, inverse: bool) -> Word {
    Word::from_reduced_unchecked(vec![Letter::new(i + 1, inverse)], rank)
}

fn check_pair(rank: usize, i: usize, j: usize) -> Result<()> {
    check_rank(rank)?;
    for k in [i, j] {
        if k >= rank {
            return Err(Error::IndexOutOfRange {
                index: k as i64 + 1,
                rank,
            });
        }
    }
    if i == j {
        return Err(Error::InvalidArgument(format!(
            "transvection needs distinct generators, got {i} twice"
        )));
    }
    Ok(())
}

fn identity_images(rank: usize) -> Vec<Word> {
    (0..rank).map(|k| gen_word(rank, k, false)).collect()
}

/// `x_i -> x_i x_j^{±1}`, inverse `x_i -> x_i x_j^{∓1}`.
pub fn right_transvection(rank: usize, i: usize, j: usize, inverse: bool) -> Result<Automorphism> {
    check_pair(rank, i, j)?;
    let mut images = identity_images(rank);
    let mut inverse_images = identity_images(rank);
    images[i] = Word::from_reduced_unchecked(vec![Letter::new(i + 1, false), Letter::new(j + 1, inverse)], rank);
    inverse_images[i] =
        Word::from_reduced_unchecked(vec![Letter::new(i + 1, false), Letter::new(j + 1, !inverse)], rank);
    Ok(Automorphism::from_parts_unchecked(images, inverse_images))
}

/// `x_i -> x_j^{±1} x_i`, inverse `x_i -> x_j^{∓1} x_i`.
pub fn left_transvection(rank: usize, i: usize, j: usize, inverse: bool) -> Result<Automorphism> {
    check_pair(rank, i, j)?;
    let mut images = identity_images(rank);
    let mut inverse_images = identity_images(rank);
    images[i] = Word::from_reduced_unchecked(vec![Letter::new(j + 1, inverse), Letter::new(i + 1, false)], rank);
    inverse_images[i] =
        Word::from_reduced_unchecked(vec![Letter::new(j + 1, !inverse), Letter::new(i + 1, false)], rank);
    Ok(Automorphism::from_parts_unchecked(images, inverse_images))
}

/// `x_i -> x_{perm[i]}`.
pub fn permutation(perm: &[usize]) -> Result<Automorphism> {
    let rank = perm.len();
    check_rank(rank)?;
    let mut seen = vec![false; rank];
    for &p in perm {
        if p >= rank || seen[p] {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    let images = perm.iter().map(|&p| gen_word(rank, p, false)).collect();
    let mut inverse_images = identity_images(rank);
    for (i, &p) in perm.iter().enumerate() {
        inverse_images[p] = gen_word(rank, i, false);
    }
    Ok(Automorphism::from_parts_unchecked(images, inverse_images))
}

/// `x_i -> x_i^{-1}`; an involution.
pub fn inversion(rank: usize, i: usize) -> Result<Automorphism> {
    check_rank(rank)?;
    if i >= rank {
        return Err(Error::IndexOutOfRange {
            index: i as i64 + 1,
            rank,
        });
    }
    let mut images = identity_images(rank);
    images[i] = gen_word(rank, i, true);
    Ok(Automorphism::from_parts_unchecked(images.clone(), images))
}

/// All right and left transvections `x_i -> x_i x_j^{±1}`, `x_i -> x_j^{±1} x_i`.
pub fn nielsen_generators(rank: usize) -> Vec<Automorphism> {
    let mut out = Vec::new();
    for i in 0..rank {
        for j in 0..rank {
            if i == j {
                continue;
            }
            for inverse in [false, true] {
                out.push(right_transvection(rank, i, j, inverse).expect("valid indices"));
                out.push(left_transvection(rank, i, j, inverse).expect("valid indices"));
            }
        }
    }
    out
}

/// All signed permutations of the generators (`2^N N!` of them).
pub fn signed_permutations(rank: usize) -> Vec<Automorphism> {
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..rank {
        let mut next = Vec::new();
        for p in &perms {
            for k in 0..rank {
                if !p.contains(&k) {
                    let mut q = p.clone();
                    q.push(k);
                    next.push(q);
                }
            }
        }
        perms = next;
    }
    let mut out = Vec::new();
    for p in perms {
        let base = permutation(&p).expect("valid permutation");
        for mask in 0..(1u32 << rank) {
            let mut phi = base.clone();
            for i in 0..rank {
                if mask & (1 << i) != 0 {
                    phi = phi
                        .compose(&inversion(rank, i).expect("valid index"))
                        .expect("tiny words");
                }
            }
            out.push(phi);
        }
    }
    out
}
